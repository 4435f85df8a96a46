//! Serial/parallel dispatch for grid-shaped work.
//!
//! Every parallel path in the crate goes through [`map_ordered`], which keeps
//! the output in input order. Reductions are always done afterwards on the
//! calling thread, so a parallel run produces the same bits as a serial one.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How grid evaluations are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Serial,
    /// Uses rayon when the `parallel` feature is on; otherwise identical to `Serial`.
    Parallel,
}

impl Default for ExecMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Serial
        }
    }
}

/// Applies `f` to every item and returns the results in input order.
pub fn map_ordered<I, O, F>(mode: ExecMode, items: &[I], f: F) -> Vec<O>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> O + Sync + Send,
{
    match mode {
        ExecMode::Serial => items.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => items.par_iter().map(f).collect(),
        #[cfg(not(feature = "parallel"))]
        ExecMode::Parallel => items.iter().map(f).collect(),
    }
}

/// Neumaier-compensated sum of a sequence, evaluated left to right.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut carry = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_map_matches_serial() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64 * 0.37).collect();
        let a = map_ordered(ExecMode::Serial, &xs, |x| x.sin());
        let b = map_ordered(ExecMode::Parallel, &xs, |x| x.sin());
        assert_eq!(a, b);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let vals = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(vals), 2.0);
        assert_eq!(compensated_sum(std::iter::empty()), 0.0);
    }
}
