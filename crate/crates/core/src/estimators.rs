//! The point-estimator catalog.
//!
//! Every estimator maps a [`SerialSample`] to an estimate of the
//! population size `N`. With `m` = sample max, `a` = sample min,
//! `x̄` = sample mean, and `k` = sample size:
//!
//! | id       | formula             | unbiased |
//! |----------|---------------------|----------|
//! | mom      | `2·x̄ − 1`           | yes      |
//! | mle      | `m`                 | no       |
//! | umvu     | `m·(1 + 1/k) − 1`   | yes      |
//! | midrange | `a + m − 1`         | yes      |
//! | nonsense | `2·a − 1`           | no       |
//!
//! `umvu` is the sample maximum plus the average gap between ordered
//! observations; `nonsense` is a deliberately bad negative control for
//! simulation comparisons.

use thiserror::Error;

use crate::model::{EstimateRecord, EstimatorId, SerialSample};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EstimatorError {
    #[error("no estimators requested")]
    NoEstimators,
}

/// Catalog metadata for one estimator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EstimatorInfo {
    pub id: EstimatorId,
    pub name: &'static str,
    pub formula: &'static str,
    /// Whether the exact sampling mean equals `N` for every valid (N, k).
    pub unbiased: bool,
}

/// Point estimate of `N` for one sample.
///
/// Results are exact in double precision up to relative error 1e-12 for
/// labels below 2^52.
pub fn estimate(id: EstimatorId, sample: &SerialSample) -> f64 {
    let m = sample.max() as f64;
    let a = sample.min() as f64;
    let k = sample.k() as f64;
    match id {
        EstimatorId::Mom => 2.0 * sample.mean() - 1.0,
        EstimatorId::Mle => m,
        EstimatorId::Umvu => m * (1.0 + 1.0 / k) - 1.0,
        EstimatorId::Midrange => a + m - 1.0,
        EstimatorId::Nonsense => 2.0 * a - 1.0,
    }
}

/// Applies the requested estimators to one sample, one record per id in
/// canonical order. Duplicate ids collapse to one record.
pub fn estimate_all(
    sample: &SerialSample,
    ids: &[EstimatorId],
) -> Result<Vec<EstimateRecord>, EstimatorError> {
    if ids.is_empty() {
        return Err(EstimatorError::NoEstimators);
    }
    let mut ids = ids.to_vec();
    ids.sort();
    ids.dedup();
    Ok(ids
        .into_iter()
        .map(|id| EstimateRecord {
            estimator: id,
            estimate: estimate(id, sample),
            k: sample.k(),
        })
        .collect())
}

/// Catalog entry for one estimator id.
pub fn describe(id: EstimatorId) -> EstimatorInfo {
    match id {
        EstimatorId::Mom => EstimatorInfo {
            id,
            name: "method of moments",
            formula: "2·mean − 1",
            unbiased: true,
        },
        EstimatorId::Mle => EstimatorInfo {
            id,
            name: "maximum likelihood (sample maximum)",
            formula: "max",
            unbiased: false,
        },
        EstimatorId::Umvu => EstimatorInfo {
            id,
            name: "minimum-variance unbiased (max plus average gap)",
            formula: "max·(1 + 1/k) − 1",
            unbiased: true,
        },
        EstimatorId::Midrange => EstimatorInfo {
            id,
            name: "midrange",
            formula: "min + max − 1",
            unbiased: true,
        },
        EstimatorId::Nonsense => EstimatorInfo {
            id,
            name: "nonsense control",
            formula: "2·min − 1",
            unbiased: false,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample(values: &[u64]) -> SerialSample {
        SerialSample::new(values.to_vec()).unwrap()
    }

    #[test]
    fn formula_values() {
        let s = sample(&[2, 7, 4]);
        assert_eq!(estimate(EstimatorId::Mom, &s), 2.0 * (13.0 / 3.0) - 1.0);
        assert_eq!(estimate(EstimatorId::Mle, &s), 7.0);
        assert!((estimate(EstimatorId::Umvu, &s) - 25.0 / 3.0).abs() < 1e-12);
        assert_eq!(estimate(EstimatorId::Midrange, &s), 8.0);
        assert_eq!(estimate(EstimatorId::Nonsense, &s), 3.0);
    }

    #[test]
    fn census_recovers_population() {
        let s = sample(&[1, 2, 3, 4, 5]);
        assert_eq!(estimate(EstimatorId::Mom, &s), 5.0);
        assert_eq!(estimate(EstimatorId::Umvu, &s), 5.0);
        assert_eq!(estimate(EstimatorId::Midrange, &s), 5.0);
    }

    #[test]
    fn estimate_all_in_canonical_order() {
        let s = sample(&[2, 7, 4]);
        let records = estimate_all(&s, &EstimatorId::ALL).unwrap();
        let ids: Vec<_> = records.iter().map(|r| r.estimator).collect();
        assert_eq!(ids, EstimatorId::ALL.to_vec());
        let values: Vec<_> = records.iter().map(|r| r.estimate).collect();
        let expected = [23.0 / 3.0, 7.0, 25.0 / 3.0, 8.0, 3.0];
        for (got, want) in values.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }

        // Duplicates collapse; odd request order comes back canonical.
        let records = estimate_all(
            &s,
            &[EstimatorId::Mle, EstimatorId::Mom, EstimatorId::Mle],
        )
        .unwrap();
        let ids: Vec<_> = records.iter().map(|r| r.estimator).collect();
        assert_eq!(ids, vec![EstimatorId::Mom, EstimatorId::Mle]);
    }

    #[test]
    fn estimate_all_rejects_empty_request() {
        let s = sample(&[5]);
        assert_eq!(estimate_all(&s, &[]), Err(EstimatorError::NoEstimators));
    }

    #[test]
    fn k1_collapses_all_but_mle() {
        let s = sample(&[5]);
        let records = estimate_all(&s, &EstimatorId::ALL).unwrap();
        for r in &records {
            match r.estimator {
                EstimatorId::Mle => assert_eq!(r.estimate, 5.0),
                _ => assert_eq!(r.estimate, 9.0),
            }
        }
    }

    #[test]
    fn catalog_entries() {
        assert!(!describe(EstimatorId::Mle).unbiased);
        assert!(describe(EstimatorId::Mom).unbiased);
        assert!(describe(EstimatorId::Umvu).unbiased);
        assert!(describe(EstimatorId::Midrange).unbiased);
        assert!(!describe(EstimatorId::Nonsense).unbiased);
        assert_eq!(describe(EstimatorId::Mom).formula, "2·mean − 1");
    }

    fn sample_strategy() -> impl Strategy<Value = Vec<u64>> {
        proptest::collection::btree_set(1u64..=3000, 1..=20)
            .prop_map(|s| s.into_iter().collect::<Vec<_>>())
            .prop_shuffle()
    }

    proptest! {
        #[test]
        fn permutation_invariance(values in sample_strategy(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let s1 = SerialSample::new(values.clone()).unwrap();
            let mut shuffled = values;
            shuffled.shuffle(&mut rand_chacha::ChaCha12Rng::seed_from_u64(seed));
            let s2 = SerialSample::new(shuffled).unwrap();
            for id in EstimatorId::ALL {
                prop_assert_eq!(estimate(id, &s1), estimate(id, &s2));
            }
        }

        // max·(1 + 1/k) − 1 equals max + (max − k)/k up to fp rounding.
        #[test]
        fn umvu_gap_identity(values in sample_strategy()) {
            let s = SerialSample::new(values).unwrap();
            let direct = estimate(EstimatorId::Umvu, &s);
            let m = s.max() as f64;
            let k = s.k() as f64;
            let gap_form = m + (m - k) / k;
            prop_assert!((direct - gap_form).abs() <= 1e-12 * gap_form.abs().max(1.0));
        }

        // umvu >= mle, equal exactly when the sample is {1..k}.
        #[test]
        fn umvu_dominates_mle(values in sample_strategy()) {
            let s = SerialSample::new(values).unwrap();
            let umvu = estimate(EstimatorId::Umvu, &s);
            let mle = estimate(EstimatorId::Mle, &s);
            prop_assert!(umvu >= mle);
            if s.max() == s.k() {
                prop_assert_eq!(umvu, mle);
            } else {
                prop_assert!(umvu > mle);
            }
        }

        #[test]
        fn mle_is_a_sample_member(values in sample_strategy()) {
            let s = SerialSample::new(values).unwrap();
            let mle = estimate(EstimatorId::Mle, &s);
            prop_assert!(s.values().iter().any(|&v| v as f64 == mle));
        }

        // For k = 2 the method of moments and the midrange coincide.
        #[test]
        fn k2_mom_equals_midrange(pair in proptest::collection::btree_set(1u64..=100_000, 2)) {
            let values: Vec<u64> = pair.into_iter().collect();
            let s = SerialSample::new(values).unwrap();
            prop_assert_eq!(
                estimate(EstimatorId::Mom, &s),
                estimate(EstimatorId::Midrange, &s)
            );
        }
    }
}
