//! Exact sampling distributions and moments of the estimators under
//! simple random sampling without replacement from `{1..N}`.
//!
//! Everything here is computed in arbitrary-precision rational arithmetic:
//! `C(300, 15)` already exceeds 10^23, and the oracle-equality tests need
//! exact equality, not floating-point closeness.
//!
//! [`exact_moments`] uses closed forms (plus an order-statistic pmf
//! summation for the midrange variance); [`enumerate_moments`] is the
//! brute-force oracle that walks every k-subset.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::model::EstimatorId;

/// Largest subset count [`enumerate_moments`] will walk.
pub const ENUMERATION_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("infeasible setting: k = {k}, N = {n} (need 1 <= k <= N)")]
    Infeasible { n: u64, k: u64 },
    #[error(
        "C({n}, {k}) exceeds the enumeration limit {limit}; use exact_moments instead"
    )]
    Capacity { n: u64, k: u64, limit: u64 },
    #[error("joint min/max pmf needs k >= 2, got k = {k}")]
    MinMaxDomain { k: u64 },
}

/// Exact mean, bias, variance, and MSE of one estimator at one (N, k).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMoments {
    pub estimator: EstimatorId,
    pub n: u64,
    pub k: u64,
    pub mean: BigRational,
    /// `mean - N`.
    pub bias: BigRational,
    pub variance: BigRational,
    /// `variance + bias^2`.
    pub mse: BigRational,
}

impl ExactMoments {
    fn from_mean_var(
        estimator: EstimatorId,
        n: u64,
        k: u64,
        mean: BigRational,
        variance: BigRational,
    ) -> Self {
        let bias = &mean - int_ratio(n);
        let mse = &variance + &bias * &bias;
        ExactMoments {
            estimator,
            n,
            k,
            mean,
            bias,
            variance,
            mse,
        }
    }
}

fn int_ratio(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

fn feasible(n: u64, k: u64) -> Result<(), ExactError> {
    if k == 0 || k > n {
        return Err(ExactError::Infeasible { n, k });
    }
    Ok(())
}

/// Exact binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut res = BigUint::one();
    // each partial product of j consecutive integers is divisible by j!
    for i in 0..k {
        res = res * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    res
}

/// P(max = m) = `C(m-1, k-1) / C(N, k)` on `k <= m <= N`, else 0.
pub fn pmf_max(n: u64, k: u64, m: u64) -> Result<BigRational, ExactError> {
    feasible(n, k)?;
    if m < k || m > n {
        return Ok(BigRational::zero());
    }
    Ok(ratio(
        BigInt::from(binomial(m - 1, k - 1)),
        BigInt::from(binomial(n, k)),
    ))
}

/// P(min = a) = `C(N-a, k-1) / C(N, k)` on `1 <= a <= N-k+1`, else 0.
pub fn pmf_min(n: u64, k: u64, a: u64) -> Result<BigRational, ExactError> {
    feasible(n, k)?;
    if a < 1 || a > n - k + 1 {
        return Ok(BigRational::zero());
    }
    Ok(ratio(
        BigInt::from(binomial(n - a, k - 1)),
        BigInt::from(binomial(n, k)),
    ))
}

/// Joint P(min = a, max = b) = `C(b-a-1, k-2) / C(N, k)` where
/// `b - a >= k - 1`, else 0. Needs `k >= 2`; the k = 1 case is the
/// single-value uniform pmf, not a joint law.
pub fn pmf_minmax(n: u64, k: u64, a: u64, b: u64) -> Result<BigRational, ExactError> {
    feasible(n, k)?;
    if k < 2 {
        return Err(ExactError::MinMaxDomain { k });
    }
    if a < 1 || b > n || b < a || b - a < k - 1 {
        return Ok(BigRational::zero());
    }
    Ok(ratio(
        BigInt::from(binomial(b - a - 1, k - 2)),
        BigInt::from(binomial(n, k)),
    ))
}

/// Midrange moments by summation over the joint min/max pmf (k >= 2) or
/// the single-draw uniform pmf (k = 1).
///
/// For k >= 2 the sum over (a, b) is grouped by span d = b - a: the pmf
/// weight `C(d-1, k-2) / C(N, k)` depends only on d, and with T = 2a+d-1
/// the inner sums over a have closed power-sum forms, so the whole sum is
/// O(N) exact integer terms scaled by C(N, k) once.
fn midrange_moments(n: u64, k: u64) -> (BigRational, BigRational) {
    if k == 1 {
        // T = 2x - 1, x uniform on {1..N}, each with weight 1/N.
        let mut s1 = BigInt::zero();
        let mut s2 = BigInt::zero();
        for x in 1..=n {
            let t = BigInt::from(2 * x as i128 - 1);
            s1 += &t;
            s2 += &t * &t;
        }
        let den = BigInt::from(n);
        let mean = ratio(s1, den.clone());
        let e2 = ratio(s2, den);
        let var = e2 - &mean * &mean;
        return (mean, var);
    }

    let mut s1 = BigInt::zero();
    let mut s2 = BigInt::zero();
    for d in (k - 1)..=(n - 1) {
        let w = BigInt::from(binomial(d - 1, k - 2));
        let nd = BigInt::from(n - d); // count of positions a = 1..N-d
        let c = BigInt::from(d - 1); // T = 2a + c
        let nd1 = &nd + 1u32;
        // sum over a of (2a + c) and (2a + c)^2
        let lin = &nd * &nd1 + &c * &nd;
        let sq = BigInt::from(4u32) * (&nd * &nd1 * (BigInt::from(2u32) * &nd + 1u32) / 6u32)
            + BigInt::from(2u32) * &c * &nd * &nd1
            + &c * &c * &nd;
        s1 += &w * lin;
        s2 += &w * sq;
    }
    let total = BigInt::from(binomial(n, k));
    let mean = ratio(s1, total.clone());
    let e2 = ratio(s2, total);
    let var = e2 - &mean * &mean;
    (mean, var)
}

/// Exact moments from closed forms, validated against
/// [`enumerate_moments`] over the full desk-scale range by the test
/// suite. Midrange variance has no simple closed form and is summed from
/// the joint min/max pmf.
pub fn exact_moments(id: EstimatorId, n: u64, k: u64) -> Result<ExactMoments, ExactError> {
    feasible(n, k)?;
    let nn = BigInt::from(n);
    let kk = BigInt::from(k);
    let np1 = &nn + 1u32; // N + 1
    let nmk = &nn - &kk; // N - k
    let kp1 = &kk + 1u32; // k + 1
    let kp2 = &kk + 2u32; // k + 2

    let (mean, variance) = match id {
        EstimatorId::Mom => (
            int_ratio(n),
            ratio(&np1 * &nmk, BigInt::from(3u32) * &kk),
        ),
        EstimatorId::Mle => (
            ratio(&kk * &np1, kp1.clone()),
            ratio(&kk * &np1 * &nmk, &kp1 * &kp1 * &kp2),
        ),
        EstimatorId::Umvu => (
            int_ratio(n),
            ratio(&np1 * &nmk, &kk * &kp2),
        ),
        EstimatorId::Midrange => midrange_moments(n, k),
        EstimatorId::Nonsense => (
            // min is the reflection of max: E = 2(N+1)/(k+1) - 1,
            // Var = 4 Var(min) = 4 Var(max).
            ratio(BigInt::from(2u32) * &np1, kp1.clone()) - BigRational::one(),
            ratio(
                BigInt::from(4u32) * &kk * &np1 * &nmk,
                &kp1 * &kp1 * &kp2,
            ),
        ),
    };
    Ok(ExactMoments::from_mean_var(id, n, k, mean, variance))
}

/// Walks every k-subset of `{1..N}` (equal weight `1/C(N,k)`), applies
/// the estimator in exact arithmetic, and accumulates exact moments.
/// The ground truth the closed forms are checked against.
pub fn enumerate_moments(id: EstimatorId, n: u64, k: u64) -> Result<ExactMoments, ExactError> {
    feasible(n, k)?;
    let total = binomial(n, k);
    if total > BigUint::from(ENUMERATION_LIMIT) {
        return Err(ExactError::Capacity {
            n,
            k,
            limit: ENUMERATION_LIMIT,
        });
    }

    // Every catalog estimate times k is an integer, so accumulate the
    // scaled values in i128: with C(N,k) <= 10^6 the scaled squares top
    // out near 4*10^30, far inside the i128 range.
    let ki = k as i128;
    let mut s1: i128 = 0;
    let mut s2: i128 = 0;
    for_each_k_subset(n, k, |subset| {
        let a = subset[0] as i128;
        let m = subset[subset.len() - 1] as i128;
        let v = match id {
            EstimatorId::Mom => {
                let sum: i128 = subset.iter().map(|&x| x as i128).sum();
                2 * sum - ki
            }
            EstimatorId::Mle => m * ki,
            EstimatorId::Umvu => m * (ki + 1) - ki,
            EstimatorId::Midrange => (a + m - 1) * ki,
            EstimatorId::Nonsense => (2 * a - 1) * ki,
        };
        s1 += v;
        s2 += v * v;
    });

    let c = BigInt::from(total);
    let kk = BigInt::from(k);
    let mean = ratio(BigInt::from(s1), &c * &kk);
    let e2 = ratio(BigInt::from(s2), &c * &kk * &kk);
    let variance = e2 - &mean * &mean;
    Ok(ExactMoments::from_mean_var(id, n, k, mean, variance))
}

/// Calls `f` with every k-subset of `{1..n}` in lexicographic order,
/// ascending within each subset.
pub(crate) fn for_each_k_subset<F: FnMut(&[u64])>(n: u64, k: u64, mut f: F) {
    debug_assert!(k >= 1 && k <= n);
    let k = k as usize;
    let mut comb: Vec<u64> = (1..=k as u64).collect();
    loop {
        f(&comb);
        let mut i = k;
        while i > 0 && comb[i - 1] == n - (k - i) as u64 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        comb[i - 1] += 1;
        for j in i..k {
            comb[j] = comb[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn r(num: i64, den: i64) -> BigRational {
        ratio(BigInt::from(num), BigInt::from(den))
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(binomial(3, 5), BigUint::zero());
        assert_eq!(binomial(12, 6), BigUint::from(924u32));
        // C(300, 15) needs big integers
        assert_eq!(
            binomial(300, 15).to_string(),
            "7687875149867948862546720"
        );
    }

    #[test]
    fn pmf_max_matches_enumeration() {
        // C(5,2) = 10 subsets; 4 of them have max 5.
        let mut count = 0u64;
        let mut total = 0u64;
        for_each_k_subset(5, 2, |s| {
            total += 1;
            if s[1] == 5 {
                count += 1;
            }
        });
        assert_eq!((count, total), (4, 10));
        assert_eq!(pmf_max(5, 2, 5).unwrap(), r(4, 10));
    }

    #[test]
    fn pmf_max_normalizes_and_handles_census() {
        let sum: BigRational = (4..=9).map(|m| pmf_max(9, 4, m).unwrap()).sum();
        assert_eq!(sum, BigRational::one());
        assert_eq!(pmf_max(7, 7, 7).unwrap(), BigRational::one());
        assert_eq!(pmf_max(9, 4, 3).unwrap(), BigRational::zero());
        assert_eq!(pmf_max(9, 4, 10).unwrap(), BigRational::zero());
    }

    #[test]
    fn pmf_min_matches_enumeration() {
        // 4 of the 10 pairs from {1..5} contain 1.
        let mut count = 0u64;
        for_each_k_subset(5, 2, |s| {
            if s[0] == 1 {
                count += 1;
            }
        });
        assert_eq!(count, 4);
        assert_eq!(pmf_min(5, 2, 1).unwrap(), r(4, 10));
        assert_eq!(pmf_min(5, 5, 1).unwrap(), BigRational::one());
    }

    #[test]
    fn min_reflects_max() {
        // reflection i -> N+1-i swaps min and max
        assert_eq!(
            pmf_min(8, 3, 2).unwrap(),
            pmf_max(8, 3, 8 + 1 - 2).unwrap()
        );
    }

    #[test]
    fn pmf_minmax_values() {
        assert_eq!(pmf_minmax(5, 2, 1, 5).unwrap(), r(1, 10));
        assert_eq!(pmf_minmax(5, 3, 1, 2).unwrap(), BigRational::zero());

        let mut sum = BigRational::zero();
        for a in 1..=6 {
            for b in 1..=6 {
                sum += pmf_minmax(6, 3, a, b).unwrap();
            }
        }
        assert_eq!(sum, BigRational::one());
    }

    #[test]
    fn pmf_guards() {
        assert_eq!(
            pmf_max(5, 6, 5),
            Err(ExactError::Infeasible { n: 5, k: 6 })
        );
        assert_eq!(pmf_minmax(5, 1, 1, 3), Err(ExactError::MinMaxDomain { k: 1 }));
    }

    #[test]
    fn closed_form_examples() {
        let m = exact_moments(EstimatorId::Mle, 5, 2).unwrap();
        assert_eq!(m.mean, r(4, 1));
        assert_eq!(m.variance, r(1, 1));
        assert_eq!(m.mse, r(2, 1));

        let m = exact_moments(EstimatorId::Umvu, 5, 2).unwrap();
        assert_eq!(m.mean, r(5, 1));
        assert_eq!(m.variance, r(9, 4));

        let m = exact_moments(EstimatorId::Mom, 4, 3).unwrap();
        assert_eq!(m.mean, r(4, 1));
        assert_eq!(m.variance, r(5, 9));

        let m = exact_moments(EstimatorId::Midrange, 4, 3).unwrap();
        assert_eq!(m.mean, r(4, 1));
        assert_eq!(m.variance, r(1, 2));

        // census: zero variance, zero bias
        let m = exact_moments(EstimatorId::Mom, 9, 9).unwrap();
        assert_eq!(m.mean, r(9, 1));
        assert_eq!(m.variance, BigRational::zero());
        assert_eq!(m.bias, BigRational::zero());
    }

    #[test]
    fn mle_bias_closed_form() {
        // bias = (k - N) / (k + 1)
        let m = exact_moments(EstimatorId::Mle, 300, 15).unwrap();
        assert_eq!(m.bias, r(15 - 300, 16));
        assert_eq!(m.bias.to_f64().unwrap(), -17.8125);
    }

    #[test]
    fn oracle_examples() {
        let m = enumerate_moments(EstimatorId::Mle, 6, 6).unwrap();
        assert_eq!(m.mean, r(6, 1));
        assert_eq!(m.variance, BigRational::zero());

        let m = enumerate_moments(EstimatorId::Nonsense, 5, 2).unwrap();
        assert_eq!(m.mean, r(3, 1));
        assert_eq!(m.variance, r(4, 1));

        assert_eq!(
            enumerate_moments(EstimatorId::Umvu, 5, 2).unwrap(),
            exact_moments(EstimatorId::Umvu, 5, 2).unwrap()
        );
    }

    #[test]
    fn oracle_capacity_guard() {
        assert_eq!(
            enumerate_moments(EstimatorId::Mom, 50, 25),
            Err(ExactError::Capacity {
                n: 50,
                k: 25,
                limit: ENUMERATION_LIMIT
            })
        );
        // boundary: C(21, 10) = 352716 is inside the limit
        assert!(enumerate_moments(EstimatorId::Mle, 21, 10).is_ok());
    }

    #[test]
    fn infeasible_settings_rejected() {
        assert!(exact_moments(EstimatorId::Mom, 5, 6).is_err());
        assert!(exact_moments(EstimatorId::Mom, 5, 0).is_err());
        assert!(enumerate_moments(EstimatorId::Mom, 5, 6).is_err());
    }

    #[test]
    fn mse_identity_holds() {
        for id in EstimatorId::ALL {
            let m = exact_moments(id, 10, 4).unwrap();
            assert_eq!(m.mse, &m.variance + &m.bias * &m.bias);
        }
    }

    // The grouped span sum must agree with the naive double sum over the
    // joint pmf; two independent routes to the midrange moments.
    #[test]
    fn midrange_grouped_sum_matches_direct_pmf_sum() {
        for (n, k) in [(4u64, 2u64), (6, 3), (9, 4), (12, 7)] {
            let mut mean = BigRational::zero();
            let mut e2 = BigRational::zero();
            for a in 1..=n {
                for b in a..=n {
                    let p = pmf_minmax(n, k, a, b).unwrap();
                    let t = BigRational::from_integer(BigInt::from(a + b - 1));
                    mean += &p * &t;
                    e2 += &p * &t * &t;
                }
            }
            let var = e2 - &mean * &mean;
            let m = exact_moments(EstimatorId::Midrange, n, k).unwrap();
            assert_eq!(m.mean, mean, "mean at ({n},{k})");
            assert_eq!(m.variance, var, "variance at ({n},{k})");
        }
    }

    #[test]
    fn k1_degenerate_cases() {
        // at k = 1 every estimator except mle is 2x - 1
        let mid = exact_moments(EstimatorId::Midrange, 7, 1).unwrap();
        let mom = exact_moments(EstimatorId::Mom, 7, 1).unwrap();
        let non = exact_moments(EstimatorId::Nonsense, 7, 1).unwrap();
        assert_eq!(mid.mean, mom.mean);
        assert_eq!(mid.variance, mom.variance);
        assert_eq!(mid.variance, non.variance);
        assert_eq!(mid.variance, r(48, 3)); // (N^2 - 1) / 3
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        // closed forms equal the enumeration oracle, exactly
        #[test]
        fn oracle_equivalence_spot(n in 1u64..=9, seed in any::<u64>()) {
            let k = 1 + seed % n;
            for id in EstimatorId::ALL {
                prop_assert_eq!(
                    exact_moments(id, n, k).unwrap(),
                    enumerate_moments(id, n, k).unwrap()
                );
            }
        }

        // pmfs are nonnegative and sum to one over their support
        #[test]
        fn pmf_normalization(n in 1u64..=20, seed in any::<u64>()) {
            let k = 1 + seed % n;
            let zero = BigRational::zero();
            let mut sum_max = BigRational::zero();
            let mut sum_min = BigRational::zero();
            for v in 1..=n {
                let pm = pmf_max(n, k, v).unwrap();
                let pa = pmf_min(n, k, v).unwrap();
                prop_assert!(pm >= zero);
                prop_assert!(pa >= zero);
                // reflection symmetry of sampling without replacement
                prop_assert_eq!(&pa, &pmf_max(n, k, n + 1 - v).unwrap());
                sum_max += pm;
                sum_min += pa;
            }
            prop_assert_eq!(sum_max, BigRational::one());
            prop_assert_eq!(sum_min, BigRational::one());
        }

        // Var(min) = Var(max) via direct pmf summation
        #[test]
        fn min_max_variance_equal(n in 2u64..=16, seed in any::<u64>()) {
            let k = 1 + seed % n;
            let var_of = |pmf: &dyn Fn(u64) -> BigRational| {
                let mut mean = BigRational::zero();
                let mut e2 = BigRational::zero();
                for v in 1..=n {
                    let p = pmf(v);
                    let t = BigRational::from_integer(BigInt::from(v));
                    mean += &p * &t;
                    e2 += &p * &t * &t;
                }
                e2 - &mean * &mean
            };
            let vmax = var_of(&|v| pmf_max(n, k, v).unwrap());
            let vmin = var_of(&|v| pmf_min(n, k, v).unwrap());
            prop_assert_eq!(vmax, vmin);
        }
    }
}
