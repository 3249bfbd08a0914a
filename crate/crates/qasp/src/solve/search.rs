use std::ops::ControlFlow;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::ground::{AtomId, GroundLiteral, GroundProgram};

use super::eval::{literal_status, Val};
use super::unfounded::unfounded_free;
use super::{is_model, SolveOptions};

struct Conflict;

type Prop = std::result::Result<(), Conflict>;

/// Backtracking search over atom assignments with unit propagation on rule bodies
/// and support; complete assignments are accepted after an unfounded-set check.
pub(super) struct Search<'g> {
    g: &'g GroundProgram,
    opts: &'g SolveOptions,
    by_head: Vec<Vec<usize>>,
    occurs: Vec<Vec<usize>>,
    vals: Vec<Val>,
    trail: Vec<AtomId>,
    qhead: usize,
    nodes: u64,
}

impl<'g> Search<'g> {
    pub fn new(g: &'g GroundProgram, opts: &'g SolveOptions) -> Self {
        let n = g.len();
        let mut by_head = vec![Vec::new(); n];
        let mut occurs = vec![Vec::new(); n];
        for (ri, r) in g.rules().iter().enumerate() {
            if let Some(h) = r.head {
                by_head[h as usize].push(ri);
            }
            let mut atoms: Vec<AtomId> = Vec::new();
            for l in &r.body {
                match l {
                    GroundLiteral::Pos(a) | GroundLiteral::Neg(a) => atoms.push(*a),
                    GroundLiteral::Agg { aggregate, .. } => atoms.extend(aggregate.atoms()),
                }
            }
            atoms.sort_unstable();
            atoms.dedup();
            for a in atoms {
                occurs[a as usize].push(ri);
            }
        }
        Search { g, opts, by_head, occurs, vals: vec![Val::Unknown; n], trail: Vec::new(), qhead: 0, nodes: 0 }
    }

    fn set(&mut self, a: AtomId, v: Val) -> Prop {
        match self.vals[a as usize] {
            Val::Unknown => {
                self.vals[a as usize] = v;
                self.trail.push(a);
                Ok(())
            }
            cur if cur == v => Ok(()),
            _ => Err(Conflict),
        }
    }

    fn undo(&mut self, len: usize) {
        for a in self.trail.drain(len..) {
            self.vals[a as usize] = Val::Unknown;
        }
        self.qhead = len;
    }

    fn lit(&self, l: &GroundLiteral) -> Val {
        let vals = &self.vals;
        literal_status(l, &|a: AtomId| vals[a as usize])
    }

    /// Assigns `l` true when it is a plain literal.
    fn force(&mut self, l: &GroundLiteral) -> Prop {
        match l {
            GroundLiteral::Pos(a) => self.set(*a, Val::True),
            GroundLiteral::Neg(a) => self.set(*a, Val::False),
            GroundLiteral::Agg { .. } => Ok(()),
        }
    }

    fn check_rule(&mut self, ri: usize) -> Prop {
        let r = &self.g.rules()[ri];
        let mut unknown = None;
        let mut n_unknown = 0;
        let mut body = Val::True;
        for (k, l) in r.body.iter().enumerate() {
            match self.lit(l) {
                Val::True => {}
                Val::False => {
                    body = Val::False;
                    break;
                }
                Val::Unknown => {
                    body = Val::Unknown;
                    n_unknown += 1;
                    unknown = Some(k);
                }
            }
        }
        let head = r.head.map(|h| self.vals[h as usize]).unwrap_or(Val::False);
        match body {
            Val::True => match r.head {
                Some(h) => self.set(h, Val::True),
                None => Err(Conflict),
            },
            Val::False => match r.head {
                Some(h) => self.check_support(h),
                None => Ok(()),
            },
            Val::Unknown => {
                if head == Val::False && n_unknown == 1 {
                    let l = r.body[unknown.expect("one unknown literal")].clone();
                    match l {
                        GroundLiteral::Pos(a) => self.set(a, Val::False)?,
                        GroundLiteral::Neg(a) => self.set(a, Val::True)?,
                        GroundLiteral::Agg { .. } => {}
                    }
                }
                Ok(())
            }
        }
    }

    fn check_support(&mut self, h: AtomId) -> Prop {
        let v = self.vals[h as usize];
        if v == Val::False {
            return Ok(());
        }
        let mut live = None;
        let mut n_live = 0;
        for &ri in &self.by_head[h as usize] {
            let r = &self.g.rules()[ri];
            if r.body.iter().all(|l| self.lit(l) != Val::False) {
                n_live += 1;
                live = Some(ri);
                if n_live > 1 {
                    break;
                }
            }
        }
        match n_live {
            0 => self.set(h, Val::False),
            1 if v == Val::True => {
                let body = self.g.rules()[live.expect("one live rule")].body.clone();
                for l in &body {
                    self.force(l)?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn propagate(&mut self) -> Prop {
        while self.qhead < self.trail.len() {
            let a = self.trail[self.qhead];
            self.qhead += 1;
            for k in 0..self.occurs[a as usize].len() {
                self.check_rule(self.occurs[a as usize][k])?;
            }
            for k in 0..self.by_head[a as usize].len() {
                self.check_rule(self.by_head[a as usize][k])?;
            }
            self.check_support(a)?;
        }
        Ok(())
    }

    fn initial(&mut self) -> Prop {
        for a in 0..self.g.len() {
            if self.by_head[a].is_empty() {
                self.set(a as AtomId, Val::False)?;
            }
        }
        for ri in 0..self.g.rules().len() {
            self.check_rule(ri)?;
        }
        self.propagate()
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) {
            if let Some((deadline, secs)) = self.opts.deadline {
                if Instant::now() >= deadline {
                    return Err(Error::Resource { cap: "time", limit: secs });
                }
            }
        }
        Ok(())
    }

    /// Calls `f` with each answer set (sorted atom ids) until it breaks.
    pub fn run(&mut self, f: &mut dyn FnMut(&[AtomId]) -> ControlFlow<()>) -> Result<()> {
        if self.initial().is_err() {
            return Ok(());
        }
        self.dfs(0, f).map(|_| ())
    }

    fn dfs(&mut self, depth: usize, f: &mut dyn FnMut(&[AtomId]) -> ControlFlow<()>) -> Result<ControlFlow<()>> {
        self.tick()?;
        let Some(next) = self.vals.iter().position(|v| *v == Val::Unknown) else {
            return self.leaf(f);
        };
        if depth >= self.opts.max_decisions {
            return Err(Error::Resource { cap: "search decisions", limit: self.opts.max_decisions as u64 });
        }
        for v in [Val::False, Val::True] {
            let mark = self.trail.len();
            let ok = self.set(next as AtomId, v).is_ok() && self.propagate().is_ok();
            let flow = if ok { self.dfs(depth + 1, f) } else { Ok(ControlFlow::Continue(())) };
            self.undo(mark);
            if flow?.is_break() {
                return Ok(ControlFlow::Break(()));
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    fn leaf(&mut self, f: &mut dyn FnMut(&[AtomId]) -> ControlFlow<()>) -> Result<ControlFlow<()>> {
        let i: Vec<bool> = self.vals.iter().map(|v| *v == Val::True).collect();
        if !is_model(self.g, &i) {
            return Ok(ControlFlow::Continue(()));
        }
        if !unfounded_free(self.g, &i, self.opts.reduct, self.opts.max_unfounded)? {
            return Ok(ControlFlow::Continue(()));
        }
        let set: Vec<AtomId> = (0..i.len()).filter(|&a| i[a]).map(|a| a as AtomId).collect();
        Ok(f(&set))
    }
}
