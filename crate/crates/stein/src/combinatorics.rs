//! Exact integer combinatorics behind the constant `h_n` that weights every
//! bound: Stirling numbers of the second kind and the weighted row sum
//! `h_n = Σ_k {n brace k}·‖h^(k)‖`.

use crate::error::{Result, SteinError};

/// Largest `n` for which `stirling2` is defined. All values for `n ≤ 25`
/// fit in a `u64` (the row sums are the Bell numbers; Bell(25) < 2^63).
pub const MAX_STIRLING_N: usize = 25;

/// Stirling number of the second kind `{n brace k}`: the number of
/// partitions of an `n`-element set into `k` non-empty blocks.
///
/// Computed by the recurrence `{n k} = k·{n−1 k} + {n−1 k−1}` in exact
/// integer arithmetic (the alternating-sum formula cancels catastrophically
/// for large `n`).
pub fn stirling2(n: usize, k: usize) -> Result<u64> {
    if n == 0 {
        return Err(SteinError::Range("stirling2: n must be positive".into()));
    }
    if n > MAX_STIRLING_N {
        return Err(SteinError::Range(format!(
            "stirling2: n = {n} exceeds the u64-safe cap {MAX_STIRLING_N}"
        )));
    }
    if k > n {
        return Err(SteinError::Range(format!(
            "stirling2: k = {k} exceeds n = {n}"
        )));
    }
    // Row-by-row recurrence; row[j] = {m brace j}.
    let mut row = vec![0u64; n + 1];
    row[0] = 1; // {0 brace 0} = 1
    for m in 1..=n {
        // Sweep right-to-left so row[j-1] still holds the previous row.
        for j in (1..=m).rev() {
            row[j] = (j as u64) * row[j] + row[j - 1];
        }
        row[0] = 0;
    }
    Ok(row[k])
}

/// Sup-norms of the derivatives of a test function `h`: `norms()[k-1]`
/// is `‖h^(k)‖`, for `k = 1..=len`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivNormProfile {
    norms: Vec<f64>,
}

impl DerivNormProfile {
    /// Builds a profile from `‖h'‖, ‖h''‖, …`; every entry must be
    /// non-negative and finite.
    pub fn new(norms: Vec<f64>) -> Result<Self> {
        if norms.is_empty() {
            return Err(SteinError::Range(
                "derivative norm profile must not be empty".into(),
            ));
        }
        for (i, &v) in norms.iter().enumerate() {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(SteinError::Range(format!(
                    "derivative norm ‖h^({})‖ = {v} must be finite and ≥ 0",
                    i + 1
                )));
            }
        }
        Ok(Self { norms })
    }

    /// A profile with `‖h^(k)‖ = c` for `k = 1..=len`.
    pub fn constant(c: f64, len: usize) -> Result<Self> {
        Self::new(vec![c; len])
    }

    /// `‖h^(k)‖`, 1-indexed. Errors when `k` is 0 or past the profile end.
    pub fn norm(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.norms.len() {
            return Err(SteinError::Range(format!(
                "derivative norm ‖h^({k})‖ requested but profile covers 1..={}",
                self.norms.len()
            )));
        }
        Ok(self.norms[k - 1])
    }

    pub fn len(&self) -> usize {
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }
}

/// The constant `h_n = Σ_{k=1}^n {n brace k}·‖h^(k)‖` that bounds the n-th
/// derivative of the composition `h∘g` relative to the dominating function.
pub fn h_n(n: usize, profile: &DerivNormProfile) -> Result<f64> {
    if n == 0 {
        return Err(SteinError::Range("h_n: n must be positive".into()));
    }
    if profile.len() < n {
        return Err(SteinError::Range(format!(
            "h_n: profile covers derivatives 1..={} but n = {n}",
            profile.len()
        )));
    }
    let mut total = 0.0;
    for k in 1..=n {
        total += stirling2(n, k)? as f64 * profile.norm(k)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Oracle: count partitions of {0,..,n-1} into exactly k non-empty
    /// blocks by direct enumeration (restricted growth strings).
    fn count_partitions(n: usize, k: usize) -> u64 {
        fn go(assign: &mut Vec<usize>, n: usize, used: usize, k: usize) -> u64 {
            if assign.len() == n {
                return u64::from(used == k);
            }
            let mut total = 0;
            // Element may join an existing block or open block `used`.
            for b in 0..=used.min(k - 1) {
                assign.push(b);
                let next_used = used.max(b + 1);
                total += go(assign, n, next_used, k);
                assign.pop();
            }
            total
        }
        if k == 0 {
            return u64::from(n == 0);
        }
        go(&mut Vec::new(), n, 0, k)
    }

    /// Oracle: Bell numbers by the Bell triangle, independent of stirling2.
    fn bell_numbers(n_max: usize) -> Vec<u64> {
        let mut bell = vec![1u64];
        let mut row = vec![1u64];
        for _ in 1..=n_max {
            let mut next = Vec::with_capacity(row.len() + 1);
            next.push(*row.last().unwrap());
            for &v in &row {
                next.push(next.last().unwrap() + v);
            }
            bell.push(next[0]);
            row = next;
        }
        bell
    }

    #[test]
    fn stirling_matches_partition_enumeration() {
        for n in 1..=10 {
            for k in 1..=n {
                assert_eq!(
                    stirling2(n, k).unwrap(),
                    count_partitions(n, k),
                    "mismatch at n={n}, k={k}"
                );
            }
        }
    }

    #[test]
    fn stirling_known_values() {
        assert_eq!(stirling2(4, 4).unwrap(), 1);
        assert_eq!(stirling2(3, 2).unwrap(), 3);
        assert_eq!(stirling2(4, 2).unwrap(), 7);
        assert_eq!(stirling2(1, 0).unwrap(), 0);
        assert_eq!(stirling2(25, 2).unwrap(), (1u64 << 24) - 1);
    }

    #[test]
    fn stirling_row_sums_are_bell_numbers() {
        let bell = bell_numbers(15);
        for n in 1..=15 {
            let row_sum: u64 = (0..=n).map(|k| stirling2(n, k).unwrap()).sum();
            assert_eq!(row_sum, bell[n], "row sum mismatch at n={n}");
        }
    }

    #[test]
    fn stirling_rejects_out_of_range() {
        assert!(matches!(stirling2(3, 4), Err(SteinError::Range(_))));
        assert!(matches!(stirling2(26, 1), Err(SteinError::Range(_))));
        assert!(matches!(stirling2(0, 0), Err(SteinError::Range(_))));
    }

    #[test]
    fn h_n_examples() {
        let unit = DerivNormProfile::constant(1.0, 8).unwrap();
        // n=1: {1 brace 1} = 1.
        assert_eq!(h_n(1, &DerivNormProfile::new(vec![2.5]).unwrap()).unwrap(), 2.5);
        // n=3 with unit norms: 1 + 3 + 1 = 5 (Stirling row of n=3).
        assert_eq!(h_n(3, &unit).unwrap(), 5.0);
        // Only the k=1 term survives: {3 brace 1} = 1.
        let spiked = DerivNormProfile::new(vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(h_n(3, &spiked).unwrap(), 1.0);
    }

    #[test]
    fn h_n_rejects_short_profile() {
        let short = DerivNormProfile::constant(1.0, 2).unwrap();
        assert!(matches!(h_n(3, &short), Err(SteinError::Range(_))));
    }

    #[test]
    fn profile_rejects_negative_and_nan() {
        assert!(DerivNormProfile::new(vec![1.0, -0.5]).is_err());
        assert!(DerivNormProfile::new(vec![f64::NAN]).is_err());
        assert!(DerivNormProfile::new(vec![]).is_err());
    }

    proptest! {
        /// h_n is monotone non-decreasing in every entry of the profile.
        #[test]
        fn h_n_monotone_in_norms(
            base in proptest::collection::vec(0.0f64..10.0, 5),
            bump in proptest::collection::vec(0.0f64..5.0, 5),
            n in 1usize..=5,
        ) {
            let lo = DerivNormProfile::new(base.clone()).unwrap();
            let hi = DerivNormProfile::new(
                base.iter().zip(&bump).map(|(a, b)| a + b).collect(),
            ).unwrap();
            prop_assert!(h_n(n, &hi).unwrap() >= h_n(n, &lo).unwrap());
        }
    }
}
