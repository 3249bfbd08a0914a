use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::ground::{AtomId, GroundWeak};
use crate::syntax::Constant;

/// Per-level weight sums; levels with a zero sum are not stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Cost {
    levels: BTreeMap<i64, i64>,
}

impl Cost {
    pub fn from_levels(it: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let mut levels: BTreeMap<i64, i64> = BTreeMap::new();
        for (l, w) in it {
            *levels.entry(l).or_default() += w;
        }
        levels.retain(|_, w| *w != 0);
        Cost { levels }
    }

    pub fn get(&self, level: i64) -> i64 {
        self.levels.get(&level).copied().unwrap_or(0)
    }

    /// Nonzero `(level, weight)` entries, highest level first.
    pub fn entries(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.levels.iter().rev().map(|(&l, &w)| (l, w))
    }

    pub fn is_zero(&self) -> bool {
        self.levels.is_empty()
    }

    /// Strict lexicographic improvement, most significant level first.
    pub fn dominates(&self, other: &Cost) -> bool {
        self < other
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        let levels: BTreeSet<i64> = self.levels.keys().chain(other.levels.keys()).copied().collect();
        for l in levels.into_iter().rev() {
            match self.get(l).cmp(&other.get(l)) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (l, w)) in self.entries().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{w}@{l}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for Cost {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            level: i64,
            weight: i64,
        }
        let mut seq = s.serialize_seq(Some(self.levels.len()))?;
        for (level, weight) in self.entries() {
            seq.serialize_element(&Entry { level, weight })?;
        }
        seq.end()
    }
}

/// Cost of an interpretation: the set of distinct `(weight, level, tuple)` triples of
/// violated weak constraints, summed per level. Non-integer weights or levels are skipped.
pub fn cost_of(weaks: &[GroundWeak], truth: impl Fn(AtomId) -> bool) -> Cost {
    let mut ws: BTreeSet<(i64, i64, &Vec<Constant>)> = BTreeSet::new();
    for w in weaks {
        let (Some(weight), Some(level)) = (w.weight.as_int(), w.level.as_int()) else { continue };
        if w.body.iter().all(|l| l.holds(&truth)) {
            ws.insert((weight, level, &w.tuple));
        }
    }
    Cost::from_levels(ws.into_iter().map(|(w, l, _)| (l, w)))
}
