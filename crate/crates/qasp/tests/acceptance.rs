//! Acceptance suite: one PASS/FAIL line per criterion. Run with
//! `cargo test -p qasp --release --test acceptance`.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qasp::bench::random::{atom_names, layout_for, random_program, random_quantified, ProgramShape, QuantifiedShape};
use qasp::bench::{generate, GenParams, Instance, PROBLEMS};
use qasp::ground::{ground, Interpretation};
use qasp::quantsem::{fix, herbrand_base, is_coherent, EvalOptions, Evaluator};
use qasp::rewrite::{check_gadget, or_transform, remap, rewrite_to_aspq, Rewriter, SuffixType};
use qasp::solve::{cost_of, first_answer_set, optimal_answer_sets, Reduct, SolveOptions};
use qasp::syntax::{Atom, GroundAtom, Program, QuantifiedProgram, Quantifier, Rule};

use common::*;

type Check = std::result::Result<String, String>;

/// Guess-heavy programs, so that most of them have several answer sets.
fn guessing() -> ProgramShape {
    ProgramShape { choices: 1..=3, rules: 0..=4, constraints: 0..=1, ..ProgramShape::default() }
}

fn criterion(n: usize, title: &str, limit: Duration, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    });
    let took = start.elapsed();
    let (pass, detail) = match outcome {
        Ok(d) if took <= limit => (true, d),
        Ok(d) => (false, format!("{d}; exceeded {limit:?}")),
        Err(e) => (false, e),
    };
    println!("{} {n}. {title} ({:.2}s, limit {}s): {detail}", if pass { "PASS" } else { "FAIL" }, took.as_secs_f64(), limit.as_secs());
    pass
}

fn set_of(xs: &[&[&str]]) -> BTreeSet<Vec<String>> {
    xs.iter().map(|m| m.iter().map(|s| s.to_string()).collect()).collect()
}

fn named(ms: &[Interpretation]) -> BTreeSet<Vec<String>> {
    ms.iter().map(names).collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn example_1() -> Check {
    let pi1 = fixture("example1_pi1.qasp");
    let g = ground(&pi1.blocks[0].program).map_err(|e| e.to_string())?;
    let (_, opt) = optimal_answer_sets(&g, &SolveOptions::default()).map_err(|e| e.to_string())?;
    let opt: Vec<Interpretation> = opt.iter().map(|s| g.interpretation(s)).collect();
    ensure(named(&opt) == set_of(&[&["a", "d"], &["b", "d"]]), || format!("OptAS(P1) = {:?}", named(&opt)))?;
    let opts = EvalOptions::default();
    let r1 = is_coherent(&pi1, &opts).map_err(|e| e.to_string())?;
    ensure(!r1.coherent, || "Pi1 reported coherent".into())?;
    let r2 = is_coherent(&fixture("example1_pi2.qasp"), &opts).map_err(|e| e.to_string())?;
    let w = r2.witness.as_ref().map(names);
    let ok = r2.coherent && matches!(w.as_deref(), Some([x, y]) if (x == "a" || x == "b") && y == "c");
    ensure(ok, || format!("Pi2: coherent={} witness={w:?}", r2.coherent))?;
    Ok(format!("OptAS(P1) = {{a,d}},{{b,d}}; Pi1 incoherent; Pi2 witness {:?}", w.unwrap_or_default()))
}

fn example_2() -> Check {
    let q = fixture("example2.qasp");
    let ev = Evaluator::new(&q, &EvalOptions::default()).map_err(|e| e.to_string())?;
    let qas = ev.quantified_answer_sets().map_err(|e| e.to_string())?;
    let costs: BTreeSet<(Vec<String>, i64)> = qas.iter().map(|m| (names(m), ev.global_cost(m).get(1))).collect();
    let want: BTreeSet<(Vec<String>, i64)> =
        [(vec![], 3), (vec!["b"], 2), (vec!["c"], 2), (vec!["b", "c"], 1)]
            .into_iter()
            .map(|(m, c)| (m.into_iter().map(String::from).collect(), c))
            .collect();
    ensure(costs == want, || format!("QAS with level-1 costs: {costs:?}"))?;
    let (_, opt) = ev.optimal_quantified_answer_sets().map_err(|e| e.to_string())?;
    ensure(named(&opt) == set_of(&[&["b", "c"]]), || format!("optimal QAS = {:?}", named(&opt)))?;
    Ok("QAS {}, {b}, {c}, {b,c} with costs 3, 2, 2, 1; optimal {b,c}".into())
}

fn or_guard() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0b5e);
    let l = Atom::prop("l");
    let only_l: Vec<Interpretation> = vec![[GroundAtom::prop("l")].into_iter().collect()];
    for k in 0..50 {
        let heads = atom_names("a", rng.gen_range(1..=8));
        let p = random_program(&mut rng, &guessing(), &heads, &[]);
        let or = or_transform(&p, &l).map_err(|e| e.to_string())?;
        let mut with_fact = or.clone();
        with_fact.push_rule(Rule::fact(l.clone()));
        let mut with_ban = or;
        with_ban.push_rule(Rule::constraint(vec![qasp::syntax::Literal::pos(l.clone())]));
        let a = program_answer_sets(&with_fact);
        ensure(a == only_l, || format!("program {k}: AS(or(P,l) + l.) = {a:?}\n{p}"))?;
        let (b, base) = (program_answer_sets(&with_ban), program_answer_sets(&p));
        ensure(b == base, || format!("program {k}: {b:?} vs AS(P) = {base:?}\n{p}"))?;
        let oracle = oracle_answer_sets(&exhaustive_ground(&p), false);
        ensure(base == oracle, || format!("program {k}: solver and oracle disagree on AS(P)\n{p}"))?;
    }
    Ok("50 programs".into())
}

fn remap_preserves_answer_sets() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e4a);
    let mut triples = 0;
    let mut sets = 0;
    while triples < 50 {
        let h1 = atom_names("p", rng.gen_range(1..=4));
        let p1 = random_program(&mut rng, &guessing(), &h1, &[]);
        let mut h2 = atom_names("q", rng.gen_range(1..=3));
        h2.extend(h1.iter().filter(|_| rng.gen_bool(0.4)).cloned());
        let p2 = random_program(&mut rng, &guessing(), &h2, &h1);
        let as1 = program_answer_sets(&p1);
        let Some(m1) = (!as1.is_empty()).then(|| as1[rng.gen_range(0..as1.len())].clone()) else { continue };
        triples += 1;
        let fixed = fix(&p1, &m1);
        let r = remap(&p2, &p1);
        let p1_preds = p1.predicates();
        let clash: Vec<_> = r.head_predicates().into_iter().filter(|h| p1_preds.contains(h)).collect();
        ensure(clash.is_empty(), || format!("remap defines predicates of P1: {clash:?}"))?;
        let lhs: BTreeSet<Interpretation> = program_answer_sets(&p2.union(&fixed))
            .iter()
            .map(|m2| m1.iter().cloned().chain(clone_interpretation(m2, "c")).collect())
            .collect();
        let rhs: BTreeSet<Interpretation> = program_answer_sets(&r.union(&fixed)).into_iter().collect();
        ensure(lhs == rhs, || format!("triple {triples}: {lhs:?} vs {rhs:?}\nP1:\n{p1}P2:\n{p2}M1: {m1:?}"))?;
        sets += lhs.len();
    }
    Ok(format!("50 triples, {sets} answer sets matched, heads disjoint"))
}

fn gadget_vs_dominance() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd0);
    let shape = ProgramShape { weaks: 1..=4, levels: 3, weights: -3..=3, ..guessing() };
    let dom = GroundAtom::prop("dom$P");
    let mut pairs = 0;
    for k in 0..100 {
        let heads = atom_names("a", rng.gen_range(1..=4));
        let p = random_program(&mut rng, &shape, &heads, &[]);
        let gadget = check_gadget(&p).map_err(|e| e.to_string())?;
        let g = ground(&p).map_err(|e| e.to_string())?;
        let sets = solver_answer_sets(&g, Reduct::Flp);
        for m in &sets {
            for m2 in &sets {
                let mut prog = gadget.union(&facts(m));
                prog.extend(&facts(&clone_interpretation(m2, "o")));
                let gg = ground(&prog).map_err(|e| e.to_string())?;
                let s = first_answer_set(&gg, &SolveOptions::default()).map_err(|e| e.to_string())?;
                let derived = s.map(|s| gg.interpretation(&s).contains(&dom)).ok_or("gadget has no answer set")?;
                let cost = |x: &Interpretation| cost_of(g.weaks(), |a| x.contains(g.atom(a)));
                let expected = cost(m2).dominates(&cost(m));
                let oracle = oracle_dominated(&oracle_cost(&g, &ids(&g, m)), &oracle_cost(&g, &ids(&g, m2)));
                ensure(derived == expected && expected == oracle, || {
                    format!("program {k}: dom={derived} dominates={expected} oracle={oracle} for {m:?} vs {m2:?}\n{p}")
                })?;
                pairs += 1;
            }
        }
    }
    Ok(format!("100 programs, {pairs} pairs"))
}

/// Rewritten programs merge and clone blocks, so they get a larger search budget
/// than the default caps.
fn eval_opts() -> EvalOptions {
    let mut o = EvalOptions::default();
    o.solve.max_decisions = 64;
    o.solve.max_unfounded = 40;
    o
}

fn coherence(q: &QuantifiedProgram) -> Result<bool, String> {
    is_coherent(q, &eval_opts()).map(|r| r.coherent).map_err(|e| e.to_string())
}

fn per_transformation() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc01);
    let mut summary = Vec::new();
    for ty in SuffixType::ORDER {
        let (mut coherent, mut n) = (0, 0);
        while n < 100 {
            let (blocks, i) = layout_for(&mut rng, ty, 3);
            let shape = QuantifiedShape { blocks, atoms: 1..=4, program: guessing(), global: true };
            let q = random_quantified(&mut rng, &shape);
            let after = Rewriter::new(&q).apply(ty, &q, i).map_err(|e| e.to_string())?;
            let (b, a) = (coherence(&q)?, coherence(&after)?);
            ensure(a == b, || format!("{ty:?} at block {i}: before {b}, after {a}\n{q}\n--- after ---\n{after}"))?;
            coherent += b as usize;
            n += 1;
        }
        summary.push(format!("{ty:?} {n} ({coherent} coherent)"));
    }
    Ok(summary.join(", "))
}

fn qas_projection(q: &QuantifiedProgram, base: &BTreeSet<GroundAtom>) -> Result<BTreeSet<Interpretation>, String> {
    let ev = Evaluator::new(q, &eval_opts()).map_err(|e| e.to_string())?;
    Ok(ev.quantified_answer_sets().map_err(|e| e.to_string())?.iter().map(|m| project(m, base)).collect())
}

fn end_to_end_one(label: &str, q: &QuantifiedProgram) -> Result<(), String> {
    let (out, _) = rewrite_to_aspq(q).map_err(|e| format!("{label}: {e}"))?;
    ensure(out.is_plain() && out.global.is_empty(), || format!("{label}: output not plain\n{out}"))?;
    ensure(out.is_alternating(), || format!("{label}: output not alternating\n{out}"))?;
    ensure(out.n_quant() <= q.n_quant() + 1, || format!("{label}: {} blocks from {}", out.n_quant(), q.n_quant()))?;
    let (b, a) = (coherence(q)?, coherence(&out)?);
    ensure(a == b, || format!("{label}: coherence {b} became {a}\n{q}\n--- output ---\n{out}"))?;
    if q.blocks[0].quantifier == Quantifier::Exists {
        let base = herbrand_base(&q.blocks[0].program);
        let (x, y) = (qas_projection(q, &base)?, qas_projection(&out, &base)?);
        ensure(x == y, || format!("{label}: QAS {x:?} vs projected {y:?}\n{q}\n--- output ---\n{out}"))?;
    }
    Ok(())
}

fn end_to_end() -> Check {
    for f in fixture_names() {
        end_to_end_one(f, &fixture(f))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xa1);
    for k in 0..200 {
        let n = rng.gen_range(1..=3);
        let blocks = (0..n)
            .map(|_| (if rng.gen_bool(0.5) { Quantifier::Exists } else { Quantifier::Forall }, rng.gen_bool(0.4)))
            .collect();
        let shape = QuantifiedShape { blocks, atoms: 1..=4, program: guessing(), global: true };
        end_to_end_one(&format!("random {k}"), &random_quantified(&mut rng, &shape))?;
    }
    Ok(format!("{} fixtures and 200 random programs", fixture_names().len()))
}

fn params_for(problem: &str, rng: &mut ChaCha8Rng) -> GenParams {
    let mut p = GenParams::default();
    match problem {
        "qbf-ee" => {
            p.vars = vec![rng.gen_range(1..=3), rng.gen_range(1..=3)];
            p.terms = rng.gen_range(1..=4);
        }
        "qbf-lex" => {
            p.vars = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(1..=3)).collect();
            p.terms = rng.gen_range(1..=4);
        }
        "qbf-seq" => {
            p.formulas = rng.gen_range(1..=3);
            p.vars = vec![rng.gen_range(1..=2), rng.gen_range(1..=2)];
            p.terms = rng.gen_range(1..=3);
        }
        "minmax-clique" => {
            p.i = rng.gen_range(1..=2);
            p.j = rng.gen_range(1..=2);
            p.nodes = rng.gen_range(p.i * p.j..=6);
            p.edge_percent = rng.gen_range(20..=80);
        }
        _ => {
            p.pap_vars = rng.gen_range(1..=4);
            p.terms = rng.gen_range(0..=3);
            p.hypotheses = rng.gen_range(1..=p.pap_vars);
            p.manifestations = rng.gen_range(1..=p.pap_vars);
            p.relevance = rng.gen_bool(0.3);
        }
    }
    p
}

fn encodings() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xe4c);
    let opts = EvalOptions::default();
    for problem in PROBLEMS {
        for k in 0..50 {
            let params = params_for(problem, &mut rng);
            let inst: Instance = generate(problem, &params, &mut rng).expect("known problem").map_err(|e| e.to_string())?;
            let got = inst.solve(&opts).map_err(|e| format!("{problem} {k}: {e}"))?;
            let want = inst.oracle().map_err(|e| e.to_string())?;
            ensure(got == want, || format!("{problem} {k}: encoding {got:?}, oracle {want:?}\n{inst:?}"))?;
        }
    }
    Ok(format!("50 instances each of {}", PROBLEMS.join(", ")))
}

fn solver_cross_check() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5017);
    let mut n = 0;
    let mut total = 0;
    while n < 300 {
        let heads = atom_names("a", rng.gen_range(1..=10));
        let inputs = atom_names("b", rng.gen_range(0..=2));
        let shape = ProgramShape { rules: 1..=10, choices: 0..=3, ..guessing() };
        let p: Program = random_program(&mut rng, &shape, &heads, &inputs);
        let g = ground(&p).map_err(|e| e.to_string())?;
        if g.head_atoms().len() > 12 {
            continue;
        }
        n += 1;
        for (reduct, classic) in [(Reduct::Flp, false), (Reduct::FlpClassic, true)] {
            let got = solver_answer_sets(&g, reduct);
            let want = oracle_answer_sets(&g, classic);
            ensure(got == want, || format!("program {n} ({reduct:?}): {got:?} vs {want:?}\n{p}"))?;
            total += got.len();
        }
    }
    Ok(format!("300 ground programs, {total} answer sets under both reducts"))
}

fn main() -> ExitCode {
    let s = Duration::from_secs;
    let results = [
        criterion(1, "Example 1 golden", s(1), example_1),
        criterion(2, "Example 2 golden", s(1), example_2),
        criterion(3, "or-guard behaviour", s(10), or_guard),
        criterion(4, "remapping preserves answer sets", s(30), remap_preserves_answer_sets),
        criterion(5, "check gadget vs dominance", s(60), gadget_vs_dominance),
        criterion(6, "per-transformation equi-coherence", s(300), per_transformation),
        criterion(7, "rewriting end to end", s(600), end_to_end),
        criterion(8, "encodings vs oracles", s(900), encodings),
        criterion(9, "solver cross-check", s(120), solver_cross_check),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
