//! Short-circuiting quantifier loops over candidate interpretations, data-parallel
//! with rayon when the `parallel` feature is on and requested at run time.

use crate::error::Result;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// `∃ x ∈ items. f(x)`; an error stops the search.
pub fn exists<T: Sync>(items: &[T], parallel: bool, f: impl Fn(&T) -> Result<bool> + Sync) -> Result<bool> {
    #[cfg(feature = "parallel")]
    if parallel {
        return match items.par_iter().map(&f).find_any(|r| !matches!(r, Ok(false))) {
            Some(r) => r,
            None => Ok(false),
        };
    }
    let _ = parallel;
    for x in items {
        if f(x)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `∀ x ∈ items. f(x)`; an error stops the search.
pub fn forall<T: Sync>(items: &[T], parallel: bool, f: impl Fn(&T) -> Result<bool> + Sync) -> Result<bool> {
    #[cfg(feature = "parallel")]
    if parallel {
        return match items.par_iter().map(&f).find_any(|r| !matches!(r, Ok(true))) {
            Some(r) => r,
            None => Ok(true),
        };
    }
    let _ = parallel;
    for x in items {
        if !f(x)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Index of the first item satisfying `f`, in item order.
pub fn position<T: Sync>(
    items: &[T],
    parallel: bool,
    f: impl Fn(&T) -> Result<bool> + Sync,
) -> Result<Option<usize>> {
    #[cfg(feature = "parallel")]
    if parallel {
        let hit = items.par_iter().enumerate().map(|(k, x)| (k, f(x))).find_first(|(_, r)| !matches!(r, Ok(false)));
        return match hit {
            Some((k, r)) => r.map(|_| Some(k)),
            None => Ok(None),
        };
    }
    let _ = parallel;
    for (k, x) in items.iter().enumerate() {
        if f(x)? {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// The items satisfying `f`, in item order.
pub fn filter<T: Sync + Clone + Send>(
    items: &[T],
    parallel: bool,
    f: impl Fn(&T) -> Result<bool> + Sync,
) -> Result<Vec<T>> {
    #[cfg(feature = "parallel")]
    if parallel {
        let flags: Vec<bool> = items.par_iter().map(&f).collect::<Result<_>>()?;
        return Ok(items.iter().zip(flags).filter(|(_, b)| *b).map(|(x, _)| x.clone()).collect());
    }
    let _ = parallel;
    let mut out = Vec::new();
    for x in items {
        if f(x)? {
            out.push(x.clone());
        }
    }
    Ok(out)
}
