use std::collections::BTreeMap;

use crate::ground::{AtomId, GroundAggregate, GroundLiteral};
use crate::syntax::{AggFunction, CmpOp, Constant};

/// Three-valued truth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Val {
    True,
    False,
    Unknown,
}

impl std::ops::Not for Val {
    type Output = Val;

    fn not(self) -> Val {
        match self {
            Val::True => Val::False,
            Val::False => Val::True,
            Val::Unknown => Val::Unknown,
        }
    }
}

impl Val {
    pub fn from_bool(b: bool) -> Val {
        if b {
            Val::True
        } else {
            Val::False
        }
    }
}

fn weight(f: AggFunction, tuple: &[Constant]) -> i64 {
    match f {
        AggFunction::Count => 1,
        AggFunction::Sum => tuple.first().and_then(Constant::as_int).unwrap_or(0),
    }
}

/// Interval `[lo, hi]` containing the aggregate value in every completion of `val`.
pub fn bounds(a: &GroundAggregate, val: &impl Fn(AtomId) -> Val) -> (i64, i64) {
    // tuple -> (certainly true, possibly true)
    let mut tuples: BTreeMap<&Vec<Constant>, (bool, bool)> = BTreeMap::new();
    for e in &a.elements {
        let mut certain = true;
        let mut possible = true;
        for &(x, neg) in &e.condition {
            let v = if neg { !val(x) } else { val(x) };
            match v {
                Val::True => {}
                Val::False => {
                    certain = false;
                    possible = false;
                }
                Val::Unknown => certain = false,
            }
        }
        let t = tuples.entry(&e.tuple).or_insert((false, false));
        t.0 |= certain;
        t.1 |= possible;
    }
    let (mut lo, mut hi) = (0i64, 0i64);
    for (t, (certain, possible)) in tuples {
        let w = weight(a.function, t);
        if certain {
            lo += w;
            hi += w;
        } else if possible {
            if w > 0 {
                hi += w;
            } else {
                lo += w;
            }
        }
    }
    (lo, hi)
}

/// Whether `v op g` holds for every, no, or some `v` in `[lo, hi]`.
pub fn interval_status(op: CmpOp, lo: i64, hi: i64, g: i64) -> Val {
    let (all, none) = match op {
        CmpOp::Eq => (lo == g && hi == g, g < lo || g > hi),
        CmpOp::Ne => (g < lo || g > hi, lo == g && hi == g),
        CmpOp::Lt => (hi < g, lo >= g),
        CmpOp::Le => (hi <= g, lo > g),
        CmpOp::Gt => (lo > g, hi <= g),
        CmpOp::Ge => (lo >= g, hi < g),
    };
    if all {
        Val::True
    } else if none {
        Val::False
    } else {
        Val::Unknown
    }
}

pub fn aggregate_status(a: &GroundAggregate, val: &impl Fn(AtomId) -> Val) -> Val {
    let (lo, hi) = bounds(a, val);
    interval_status(a.op, lo, hi, a.guard)
}

pub fn literal_status(l: &GroundLiteral, val: &impl Fn(AtomId) -> Val) -> Val {
    match l {
        GroundLiteral::Pos(a) => val(*a),
        GroundLiteral::Neg(a) => !val(*a),
        GroundLiteral::Agg { negated, aggregate } => {
            let s = aggregate_status(aggregate, val);
            if *negated {
                !s
            } else {
                s
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::GroundElement;

    fn agg(function: AggFunction, elems: &[(i64, AtomId)], op: CmpOp, guard: i64) -> GroundAggregate {
        GroundAggregate {
            function,
            elements: elems
                .iter()
                .map(|&(w, a)| GroundElement { tuple: vec![Constant::Int(w)], condition: vec![(a, false)] })
                .collect(),
            op,
            guard,
        }
    }

    #[test]
    fn sum_bounds_with_negative_weights() {
        let a = agg(AggFunction::Sum, &[(2, 0), (-3, 1), (1, 2)], CmpOp::Ge, 0);
        let val = |x: AtomId| [Val::True, Val::Unknown, Val::False][x as usize];
        assert_eq!(bounds(&a, &val), (-1, 2));
        assert_eq!(aggregate_status(&a, &val), Val::Unknown);
        let val = |x: AtomId| [Val::True, Val::False, Val::False][x as usize];
        assert_eq!(aggregate_status(&a, &val), Val::True);
    }

    #[test]
    fn shared_tuples_count_once() {
        let mut a = agg(AggFunction::Count, &[(7, 0), (7, 1)], CmpOp::Eq, 1);
        a.elements[1].condition = vec![(1, true)];
        let val = |x: AtomId| [Val::True, Val::False][x as usize];
        assert_eq!(bounds(&a, &val), (1, 1));
        assert_eq!(aggregate_status(&a, &val), Val::True);
    }
}
