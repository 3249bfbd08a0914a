//! Minmax clique: the two-existential encoding with a global weak constraint, and
//! the brute-force value `min_f max{|Q| : Q clique of G_f}`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::syntax::QuantifiedProgram;

use super::build;

pub const MAX_ORACLE_VERTICES: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinmaxCell {
    pub i: u32,
    pub j: u32,
    pub vertices: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinmaxCliqueInstance {
    pub vertices: Vec<u32>,
    pub edges: Vec<(u32, u32)>,
    pub i: Vec<u32>,
    pub j: Vec<u32>,
    pub partition: Vec<MinmaxCell>,
}

impl MinmaxCliqueInstance {
    pub fn validate(&self) -> Result<()> {
        let vs: BTreeSet<u32> = self.vertices.iter().copied().collect();
        let mut covered = BTreeSet::new();
        for c in &self.partition {
            if !self.i.contains(&c.i) || !self.j.contains(&c.j) {
                return Err(Error::Invalid(format!("cell ({}, {}) uses an unknown index", c.i, c.j)));
            }
            for &v in &c.vertices {
                if !vs.contains(&v) || !covered.insert(v) {
                    return Err(Error::Invalid(format!("vertex {v} is unknown or in two cells")));
                }
            }
        }
        if covered != vs {
            return Err(Error::Invalid("partition does not cover every vertex".into()));
        }
        if let Some(&(x, y)) = self.edges.iter().find(|(x, y)| x == y || !vs.contains(x) || !vs.contains(y)) {
            return Err(Error::Invalid(format!("bad edge ({x}, {y})")));
        }
        Ok(())
    }

    fn adjacent(&self, x: u32, y: u32) -> bool {
        self.edges.iter().any(|&(a, b)| (a, b) == (x, y) || (a, b) == (y, x))
    }

    fn cell(&self, i: u32, j: u32) -> impl Iterator<Item = u32> + '_ {
        self.partition.iter().filter(move |c| c.i == i && c.j == j).flat_map(|c| c.vertices.iter().copied())
    }
}

pub fn encode_minmax_clique(inst: &MinmaxCliqueInstance) -> Result<QuantifiedProgram> {
    inst.validate()?;
    let mut s = String::from("%@exists\n");
    for c in &inst.partition {
        for v in &c.vertices {
            writeln!(s, "v({},{},{v}).", c.i, c.j).unwrap();
        }
    }
    for i in &inst.i {
        writeln!(s, "inI({i}).").unwrap();
    }
    for j in &inst.j {
        writeln!(s, "inJ({j}).").unwrap();
    }
    for (x, y) in &inst.edges {
        writeln!(s, "e({x},{y}).\ne({y},{x}).").unwrap();
    }
    s.push_str("{f(I,J) : inJ(J)} = 1 :- inI(I).\n");
    let ks: Vec<String> = (1..=inst.vertices.len()).map(|k| format!("valK({k})")).collect();
    writeln!(s, "{{{}}} = 1.", ks.join("; ")).unwrap();
    s.push_str(
        "%@exists\n\
         n_f(X) :- f(I,J), v(I,J,X).\n\
         e_f(X,Y) :- n_f(X), n_f(Y), e(X,Y).\n\
         {inClique(X) : n_f(X)}.\n\
         :- inClique(X), inClique(Y), X < Y, not e_f(X,Y).\n\
         :~ n_f(X), not inClique(X). [1@1,X]\n\
         %@constraint\n\
         :- valK(K), #count{X : inClique(X)} != K.\n\
         %@global\n\
         :~ valK(K). [K@1]\n",
    );
    Ok(build(&s))
}

fn max_clique(inst: &MinmaxCliqueInstance, nodes: &[u32]) -> usize {
    let n = nodes.len();
    let mut best = 0;
    for mask in 0u32..1 << n {
        let members: Vec<u32> = (0..n).filter(|&k| mask >> k & 1 == 1).map(|k| nodes[k]).collect();
        if members.len() > best && members.iter().enumerate().all(|(a, &x)| members[a + 1..].iter().all(|&y| inst.adjacent(x, y))) {
            best = members.len();
        }
    }
    best
}

/// `min` over all `f : I → J` of the largest clique in the subgraph induced by the cells `A[i][f(i)]`.
pub fn oracle_minmax(inst: &MinmaxCliqueInstance) -> Result<usize> {
    inst.validate()?;
    if inst.vertices.len() > MAX_ORACLE_VERTICES {
        return Err(Error::Resource { cap: "oracle vertices", limit: MAX_ORACLE_VERTICES as u64 });
    }
    let (ni, nj) = (inst.i.len(), inst.j.len());
    let mut best = usize::MAX;
    let mut f = vec![0usize; ni];
    loop {
        let nodes: Vec<u32> = (0..ni).flat_map(|k| inst.cell(inst.i[k], inst.j[f[k]]).collect::<Vec<_>>()).collect();
        best = best.min(max_clique(inst, &nodes));
        let Some(pos) = (0..ni).rev().find(|&k| f[k] + 1 < nj) else { break };
        f[pos] += 1;
        f[pos + 1..].iter_mut().for_each(|k| *k = 0);
    }
    Ok(if ni == 0 { 0 } else { best })
}

/// Random instance with `nodes` vertices spread over `ni × nj` non-empty cells.
pub fn random_minmax(rng: &mut impl Rng, nodes: usize, ni: usize, nj: usize, edge_prob: f64) -> Result<MinmaxCliqueInstance> {
    if ni == 0 || nj == 0 || nodes < ni * nj {
        return Err(Error::Invalid(format!("{nodes} vertices cannot fill {ni}×{nj} non-empty cells")));
    }
    let vertices: Vec<u32> = (1..=nodes as u32).collect();
    let mut shuffled = vertices.clone();
    shuffled.shuffle(rng);
    let cells: Vec<(u32, u32)> = (1..=ni as u32).flat_map(|i| (1..=nj as u32).map(move |j| (i, j))).collect();
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); cells.len()];
    for (k, &v) in shuffled.iter().enumerate() {
        let c = if k < cells.len() { k } else { rng.gen_range(0..cells.len()) };
        members[c].push(v);
    }
    let partition = cells
        .iter()
        .zip(members)
        .map(|(&(i, j), mut vs)| {
            vs.sort();
            MinmaxCell { i, j, vertices: vs }
        })
        .collect();
    let mut edges = Vec::new();
    for &x in &vertices {
        for &y in &vertices {
            if x < y && rng.gen_bool(edge_prob) {
                edges.push((x, y));
            }
        }
    }
    Ok(MinmaxCliqueInstance {
        vertices,
        edges,
        i: (1..=ni as u32).collect(),
        j: (1..=nj as u32).collect(),
        partition,
    })
}
