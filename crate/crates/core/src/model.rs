//! Domain types shared by every other module: the observed sample of
//! serial labels, the true population size, and the estimator identifiers.
//!
//! All types are immutable after construction and cheap to clone.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Errors raised by sample construction and sample-file parsing.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DataError {
    #[error("empty sample")]
    Empty,
    #[error("line {line}: expected a positive base-10 integer, got `{token}`")]
    InvalidToken { line: usize, token: String },
    #[error("duplicate serial value {value}")]
    Duplicate { value: u64 },
    #[error("serial values must be >= 1")]
    ZeroValue,
    #[error("population size must be >= 1")]
    InvalidPopulation,
    #[error("unknown estimator `{0}` (expected one of: mom, mle, umvu, midrange, nonsense)")]
    UnknownEstimator(String),
}

/// An observed set of `k` distinct positive serial labels, in the order
/// they were recorded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SerialSample {
    values: Vec<u64>,
}

impl SerialSample {
    /// Validates and wraps a list of serial labels.
    ///
    /// The labels must be nonempty, all `>= 1`, and pairwise distinct.
    /// Insertion order is preserved.
    pub fn new(values: Vec<u64>) -> Result<Self, DataError> {
        if values.is_empty() {
            return Err(DataError::Empty);
        }
        let mut seen = HashSet::with_capacity(values.len());
        for &v in &values {
            if v == 0 {
                return Err(DataError::ZeroValue);
            }
            if !seen.insert(v) {
                return Err(DataError::Duplicate { value: v });
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// Sample size `k`. Always >= 1.
    pub fn k(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn min(&self) -> u64 {
        *self.values.iter().min().expect("sample is nonempty")
    }

    /// The largest observed label. Always >= `k`, since the sample holds
    /// `k` distinct positive integers.
    pub fn max(&self) -> u64 {
        *self.values.iter().max().expect("sample is nonempty")
    }

    pub fn sum(&self) -> u128 {
        self.values.iter().map(|&v| v as u128).sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() as f64 / self.values.len() as f64
    }

    /// Renders the sample in the plain-text file format accepted by
    /// [`parse_sample_file`]: one label per line.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for v in &self.values {
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }
}

/// The true population size `N`; serial labels run 1..=N.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PopulationConfig {
    n: u64,
}

impl PopulationConfig {
    pub fn new(n: u64) -> Result<Self, DataError> {
        if n == 0 {
            return Err(DataError::InvalidPopulation);
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> u64 {
        self.n
    }
}

/// The closed estimator catalog. Declaration order is the canonical
/// external order (and the derived `Ord`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EstimatorId {
    /// Method of moments: `2·mean − 1`.
    Mom,
    /// Maximum likelihood: the sample maximum.
    Mle,
    /// Minimum-variance unbiased: `max·(1 + 1/k) − 1`.
    Umvu,
    /// Midrange: `min + max − 1`.
    Midrange,
    /// Negative control: `2·min − 1`. Badly biased for k > 1 on purpose.
    Nonsense,
}

impl EstimatorId {
    /// Every estimator, in canonical order.
    pub const ALL: [EstimatorId; 5] = [
        EstimatorId::Mom,
        EstimatorId::Mle,
        EstimatorId::Umvu,
        EstimatorId::Midrange,
        EstimatorId::Nonsense,
    ];

    /// Canonical lowercase name, the external identifier.
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorId::Mom => "mom",
            EstimatorId::Mle => "mle",
            EstimatorId::Umvu => "umvu",
            EstimatorId::Midrange => "midrange",
            EstimatorId::Nonsense => "nonsense",
        }
    }
}

impl fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorId {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mom" => Ok(EstimatorId::Mom),
            "mle" => Ok(EstimatorId::Mle),
            "umvu" => Ok(EstimatorId::Umvu),
            "midrange" => Ok(EstimatorId::Midrange),
            "nonsense" => Ok(EstimatorId::Nonsense),
            other => Err(DataError::UnknownEstimator(other.to_string())),
        }
    }
}

/// One estimator's point estimate for one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRecord {
    pub estimator: EstimatorId,
    pub estimate: f64,
    pub k: u64,
}

/// Parses the plain-text sample format: one base-10 positive integer per
/// line; blank lines and lines starting with `#` are skipped. Accepts LF
/// or CRLF endings and preserves file order.
pub fn parse_sample_file(text: &str) -> Result<SerialSample, DataError> {
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: u64 = line.parse().map_err(|_| DataError::InvalidToken {
            line: idx + 1,
            token: line.to_string(),
        })?;
        if v == 0 {
            return Err(DataError::InvalidToken {
                line: idx + 1,
                token: line.to_string(),
            });
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(DataError::Empty);
    }
    SerialSample::new(values)
}

/// True iff the sample could have been drawn from `{1..N}`: every label
/// is within range and the sample is no larger than the population.
pub fn validate_feasible(sample: &SerialSample, pop: &PopulationConfig) -> bool {
    sample.max() <= pop.n() && sample.k() <= pop.n()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_plain_values() {
        let s = parse_sample_file("3\n7\n4\n").unwrap();
        assert_eq!(s.values(), &[3, 7, 4]);
        assert_eq!(s.k(), 3);
    }

    #[test]
    fn parse_skips_comments_and_blanks() {
        let s = parse_sample_file("# fixture\n5\n").unwrap();
        assert_eq!(s.values(), &[5]);
        assert_eq!(s.k(), 1);

        let s = parse_sample_file("\n\n# a\n9\n\n12\n").unwrap();
        assert_eq!(s.values(), &[9, 12]);
    }

    #[test]
    fn parse_accepts_crlf() {
        let s = parse_sample_file("3\r\n7\r\n4\r\n").unwrap();
        assert_eq!(s.values(), &[3, 7, 4]);
    }

    #[test]
    fn parse_rejects_duplicates() {
        assert_eq!(
            parse_sample_file("4\n4\n"),
            Err(DataError::Duplicate { value: 4 })
        );
    }

    #[test]
    fn parse_rejects_bad_tokens_with_line_number() {
        assert_eq!(
            parse_sample_file("3\n-2\n"),
            Err(DataError::InvalidToken {
                line: 2,
                token: "-2".into()
            })
        );
        assert_eq!(
            parse_sample_file("0\n"),
            Err(DataError::InvalidToken {
                line: 1,
                token: "0".into()
            })
        );
        assert_eq!(
            parse_sample_file("# only comments\n\n"),
            Err(DataError::Empty)
        );
        assert!(matches!(
            parse_sample_file("3.5\n"),
            Err(DataError::InvalidToken { line: 1, .. })
        ));
    }

    #[test]
    fn feasibility_predicate() {
        let s = SerialSample::new(vec![2, 7, 4]).unwrap();
        assert!(validate_feasible(&s, &PopulationConfig::new(10).unwrap()));
        assert!(!validate_feasible(&s, &PopulationConfig::new(6).unwrap()));

        let census = SerialSample::new(vec![1, 2, 3, 4, 5]).unwrap();
        assert!(validate_feasible(
            &census,
            &PopulationConfig::new(5).unwrap()
        ));
    }

    #[test]
    fn sample_invariants() {
        assert_eq!(SerialSample::new(vec![]), Err(DataError::Empty));
        assert_eq!(SerialSample::new(vec![3, 0]), Err(DataError::ZeroValue));
        assert_eq!(
            SerialSample::new(vec![3, 3]),
            Err(DataError::Duplicate { value: 3 })
        );
        assert_eq!(PopulationConfig::new(0), Err(DataError::InvalidPopulation));
    }

    #[test]
    fn estimator_id_round_trip_and_order() {
        for id in EstimatorId::ALL {
            assert_eq!(id.name().parse::<EstimatorId>().unwrap(), id);
        }
        let mut sorted = EstimatorId::ALL;
        sorted.sort();
        assert_eq!(sorted, EstimatorId::ALL);
        assert!(matches!(
            "best".parse::<EstimatorId>(),
            Err(DataError::UnknownEstimator(_))
        ));
    }

    fn sample_strategy() -> impl Strategy<Value = Vec<u64>> {
        proptest::collection::btree_set(1u64..=5000, 1..=24)
            .prop_map(|s| s.into_iter().collect::<Vec<_>>())
            .prop_shuffle()
    }

    proptest! {
        // Rendering then reparsing reproduces the sample, order included.
        #[test]
        fn render_parse_round_trip(values in sample_strategy()) {
            let s = SerialSample::new(values).unwrap();
            let reparsed = parse_sample_file(&s.to_file_string()).unwrap();
            prop_assert_eq!(s, reparsed);
        }

        // k distinct positive integers force max >= k.
        #[test]
        fn max_at_least_k(values in sample_strategy()) {
            let s = SerialSample::new(values).unwrap();
            prop_assert!(s.max() >= s.k());
        }
    }
}
