use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::time::Duration;

use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use qasp::bench::random::{random_quantified, ProgramShape, QuantifiedShape};
use qasp::bench::{generate, GenParams};
use qasp::ground::{GroundOptions, Interpretation};
use qasp::quantsem::{herbrand_base, EvalOptions, Evaluator};
use qasp::rewrite::rewrite_to_aspq_with;
use qasp::solve::{Reduct, SolveOptions};
use qasp::syntax::{parse_program_with, render_program, GroundAtom, ParseMode, QuantifiedProgram, Quantifier};
use qasp::Error;

use crate::report::{Caps, Timer};

pub struct Ctx {
    pub caps: Caps,
    pub reduct: Reduct,
    pub parallel: bool,
    pub timer: Timer,
}

/// What a command produced: a result payload, plus a mismatch message for `verify`.
pub struct Outcome {
    pub result: Value,
    pub mismatch: Option<String>,
}

impl From<Value> for Outcome {
    fn from(result: Value) -> Self {
        Outcome { result, mismatch: None }
    }
}

impl Ctx {
    fn ground_opts(&self) -> GroundOptions {
        GroundOptions { max_rules: self.caps.max_ground }
    }

    fn eval_opts(&self) -> EvalOptions {
        EvalOptions {
            solve: SolveOptions { reduct: self.reduct, max_decisions: self.caps.max_atoms, ..SolveOptions::default() },
            ground: self.ground_opts(),
            parallel: self.parallel,
            normalize: true,
            timeout: Some(Duration::from_secs(self.caps.timeout_secs)),
        }
    }

    fn parse(&mut self, text: &str) -> Result<QuantifiedProgram> {
        // rewriter output uses `$` names and must be accepted back
        Ok(self.timer.time("parse", || parse_program_with(text, ParseMode::Internal))?)
    }
}

pub fn solve(ctx: &mut Ctx, text: &str, enumerate: bool, optimal: bool) -> Result<Outcome> {
    let q = ctx.parse(text)?;
    let opts = ctx.eval_opts();
    let ev = ctx.timer.time("ground", || Evaluator::new(&q, &opts))?;
    let res = ctx.timer.time("evaluate", || ev.is_coherent())?;
    eprintln!("{}", if res.coherent { "coherent" } else { "incoherent" });
    let mut out = json!({ "coherent": res.coherent, "witness": res.witness, "notes": res.notes });
    if enumerate {
        let qas = ctx.timer.time("enumerate", || ev.quantified_answer_sets())?;
        eprintln!("{} quantified answer set(s)", qas.len());
        out["quantifiedAnswerSets"] = json!(qas);
    }
    if optimal {
        let (cost, sets) = ctx.timer.time("optimize", || ev.optimal_quantified_answer_sets())?;
        eprintln!("{} optimal quantified answer set(s), cost {cost}", sets.len());
        out["optimal"] = Value::Array(sets.iter().map(|m| json!({ "set": m, "cost": cost })).collect());
    }
    Ok(out.into())
}

fn quantifier_names(q: &QuantifiedProgram) -> Vec<String> {
    q.blocks.iter().map(|b| b.quantifier.to_string()).collect()
}

pub fn rewrite(ctx: &mut Ctx, text: &str, output: &Path, trace: bool) -> Result<Outcome> {
    let q = ctx.parse(text)?;
    let opts = ctx.ground_opts();
    let (out, tr) = ctx.timer.time("rewrite", || rewrite_to_aspq_with(&q, &opts))?;
    fs::write(output, render_program(&out)).with_context(|| format!("writing {}", output.display()))?;
    eprintln!("{} step(s), {} block(s) written to {}", tr.steps.len(), out.n_quant(), output.display());
    let mut result = json!({
        "output": output.display().to_string(),
        "blocks": out.n_quant(),
        "quantifiers": quantifier_names(&out),
        "steps": tr.steps.len(),
        "notes": tr.notes,
    });
    if trace {
        result["trace"] = json!(tr.steps);
    }
    Ok(result.into())
}

/// Coherence, plus quantified answer sets projected onto `base` for existential programs.
fn side(q: &QuantifiedProgram, base: &BTreeSet<GroundAtom>, opts: &EvalOptions) -> Result<Value> {
    let ev = Evaluator::new(q, opts)?;
    let coherent = ev.is_coherent()?.coherent;
    let qas: Option<BTreeSet<Interpretation>> = match q.blocks[0].quantifier {
        Quantifier::Exists => Some(
            ev.quantified_answer_sets()?.into_iter().map(|m| m.intersection(base).cloned().collect()).collect(),
        ),
        Quantifier::Forall => None,
    };
    Ok(json!({ "coherent": coherent, "quantifiedAnswerSets": qas }))
}

/// Evaluates `q` and its rewriting; returns both sides and whether they agree.
fn differential(ctx: &mut Ctx, q: &QuantifiedProgram) -> Result<(Value, Value, Vec<String>)> {
    let opts = ctx.eval_opts();
    let gopts = ctx.ground_opts();
    let (out, tr) = ctx.timer.time("rewrite", || rewrite_to_aspq_with(q, &gopts))?;
    let base = herbrand_base(&q.blocks[0].program);
    let input = ctx.timer.time("evaluate", || side(q, &base, &opts))?;
    let rewritten = ctx.timer.time("evaluate", || side(&out, &base, &opts))?;
    Ok((input, rewritten, tr.notes))
}

fn sample(rng: &mut ChaCha8Rng) -> QuantifiedProgram {
    let n = rng.gen_range(1..=3);
    let blocks = (0..n)
        .map(|_| (if rng.gen_bool(0.5) { Quantifier::Exists } else { Quantifier::Forall }, rng.gen_bool(0.4)))
        .collect();
    let shape = QuantifiedShape { blocks, atoms: 1..=3, program: ProgramShape::default(), global: true };
    random_quantified(rng, &shape)
}

pub fn verify(ctx: &mut Ctx, text: &str, samples: usize, seed: u64) -> Result<Outcome> {
    let q = ctx.parse(text)?;
    let (input, rewritten, notes) = differential(ctx, &q)?;
    let mut mismatch = (input != rewritten).then(|| "input and rewritten program disagree".to_string());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    let mut failed_sample = Value::Null;
    if mismatch.is_none() {
        for k in 0..samples {
            let s = sample(&mut rng);
            let (a, b, _) = differential(ctx, &s)?;
            checked += 1;
            if a != b {
                mismatch = Some(format!("sample {k} disagrees"));
                failed_sample = json!({ "index": k, "program": render_program(&s), "input": a, "rewritten": b });
                break;
            }
        }
    }
    eprintln!("{}", mismatch.as_deref().unwrap_or("agreement"));
    let result = json!({
        "agree": mismatch.is_none(),
        "input": input,
        "rewritten": rewritten,
        "notes": notes,
        "samples": { "requested": samples, "checked": checked, "seed": seed, "failed": failed_sample },
    });
    Ok(Outcome { result, mismatch })
}

pub fn gen(ctx: &mut Ctx, problem: &str, params: &GenParams, seed: u64, dir: &Path) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = generate(problem, params, &mut rng)
        .ok_or_else(|| Error::Usage(format!("unknown problem {problem}; expected one of {}", qasp::bench::PROBLEMS.join(", "))))??;
    let program = ctx.timer.time("encode", || inst.encode())?;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let stem = format!("{problem}-s{seed}");
    let (json_path, qasp_path) = (dir.join(format!("{stem}.json")), dir.join(format!("{stem}.qasp")));
    fs::write(&json_path, serde_json::to_string_pretty(&inst)? + "\n")?;
    fs::write(&qasp_path, render_program(&program))?;
    let mut notes = Vec::new();
    let oracle = match ctx.timer.time("oracle", || inst.oracle()) {
        Ok(a) => json!(a),
        Err(e) if e.is_resource() => {
            notes.push(format!("oracle skipped: {e}"));
            Value::Null
        }
        Err(e) => return Err(e.into()),
    };
    eprintln!("wrote {} and {}", json_path.display(), qasp_path.display());
    Ok(json!({
        "problem": problem,
        "seed": seed,
        "params": params,
        "instance": json_path.display().to_string(),
        "program": qasp_path.display().to_string(),
        "oracle": oracle,
        "notes": notes,
    })
    .into())
}
