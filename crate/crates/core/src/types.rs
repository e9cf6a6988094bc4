//! Validated probability vectors, M-type approximations and cost tags.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A probability vector: nonnegative entries summing to one.
///
/// Zero entries are kept so that index positions stay aligned with the
/// approximation and with rows of a transition matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetDistribution<T> {
    probs: Vec<T>,
}

impl<T: Scalar> TargetDistribution<T> {
    /// Validates `raw` as a distribution. With `normalize` set the entries are
    /// first divided by their sum.
    pub fn new(raw: Vec<T>, normalize: bool) -> Result<Self> {
        validate_target(raw, normalize)
    }

    /// The uniform distribution on `n` points.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let mass = T::one() / T::from_count(n);
        Ok(Self { probs: vec![mass; n] })
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn get(&self, i: usize) -> T {
        self.probs[i]
    }

    /// Indices with strictly positive mass.
    pub fn support(&self) -> Vec<usize> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > T::zero())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn support_size(&self) -> usize {
        self.probs.iter().filter(|&&p| p > T::zero()).count()
    }

    /// Smallest positive entry.
    pub fn min_positive(&self) -> T {
        self.probs
            .iter()
            .copied()
            .filter(|&p| p > T::zero())
            .fold(T::infinity(), T::min)
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> T {
        entropy(self)
    }

    pub fn into_inner(self) -> Vec<T> {
        self.probs
    }
}

/// Checks `raw` for finiteness, sign and normalization.
pub fn validate_target<T: Scalar>(raw: Vec<T>, normalize: bool) -> Result<TargetDistribution<T>> {
    if raw.is_empty() {
        return Err(Error::EmptyInput);
    }
    for (index, &x) in raw.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::NonFiniteEntry { index });
        }
        if x < T::zero() {
            return Err(Error::NegativeEntry { index, value: x.as_f64() });
        }
    }
    let sum: T = raw.iter().copied().sum();
    let tol = T::simplex_tolerance(raw.len());
    let probs = if normalize {
        if sum <= T::zero() {
            return Err(Error::ZeroSum);
        }
        if sum == T::one() {
            raw
        } else {
            raw.into_iter().map(|x| x / sum).collect()
        }
    } else {
        if (sum - T::one()).abs() > tol {
            return Err(Error::NotNormalized { sum: sum.as_f64() });
        }
        raw
    };
    Ok(TargetDistribution { probs })
}

/// `-Σ t_i log t_i` over the support, natural log.
pub fn entropy<T: Scalar>(t: &TargetDistribution<T>) -> T {
    t.probs
        .iter()
        .filter(|&&p| p > T::zero())
        .map(|&p| -p * p.ln())
        .sum()
}

/// An M-type distribution: integer counts summing to the precision `M`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MTypeApprox {
    precision: usize,
    counts: Vec<usize>,
}

impl MTypeApprox {
    pub fn new(counts: Vec<usize>, precision: usize) -> Result<Self> {
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        let sum: usize = counts.iter().sum();
        if sum != precision {
            return Err(Error::CountMismatch { sum, precision });
        }
        Ok(Self { precision, counts })
    }

    /// Builds the approximation whose precision is the sum of `counts`.
    pub fn from_counts(counts: Vec<usize>) -> Result<Self> {
        let precision = counts.iter().sum();
        Self::new(counts, precision)
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// `c_i / M` for every index.
    pub fn probs<T: Scalar>(&self) -> Vec<T> {
        let m = T::from_count(self.precision);
        self.counts.iter().map(|&c| T::from_count(c) / m).collect()
    }

    /// The approximation viewed as a target distribution.
    pub fn to_target<T: Scalar>(&self) -> TargetDistribution<T> {
        TargetDistribution { probs: self.probs() }
    }

    pub fn into_counts(self) -> Vec<usize> {
        self.counts
    }
}

/// Counts fixed before the greedy loop starts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Preallocation(pub Vec<usize>);

impl Preallocation {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    /// Fails unless the pre-allocation fits within `precision` units.
    pub fn check(&self, precision: usize) -> Result<()> {
        let required = self.total();
        if required > precision {
            return Err(Error::InfeasiblePrealloc { required, precision });
        }
        Ok(())
    }
}

/// Approximation error being minimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CostKind {
    /// `Σ |p_i - t_i|`
    VariationalDistance,
    /// `D(p‖t)`
    KlApproxFirst,
    /// `D(t‖p)`
    KlTargetFirst,
    /// `χ²(p‖t) = Σ (p_i - t_i)² / t_i`
    Chi2ApproxFirst,
    /// `χ²(t‖p) = Σ (t_i - p_i)² / p_i`
    Chi2TargetFirst,
}

impl CostKind {
    pub const ALL: [CostKind; 5] = [
        CostKind::VariationalDistance,
        CostKind::KlApproxFirst,
        CostKind::KlTargetFirst,
        CostKind::Chi2ApproxFirst,
        CostKind::Chi2TargetFirst,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CostKind::VariationalDistance => "variational",
            CostKind::KlApproxFirst => "kl-approx-first",
            CostKind::KlTargetFirst => "kl-target-first",
            CostKind::Chi2ApproxFirst => "chi2-approx-first",
            CostKind::Chi2TargetFirst => "chi2-target-first",
        }
    }

    /// Kinds that are infinite unless every target support point gets mass.
    pub fn is_target_first(self) -> bool {
        matches!(self, CostKind::KlTargetFirst | CostKind::Chi2TargetFirst)
    }
}

impl fmt::Display for CostKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown cost kind `{0}`")]
pub struct UnknownCostKind(pub String);

impl FromStr for CostKind {
    type Err = UnknownCostKind;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        CostKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| UnknownCostKind(s.to_owned()))
    }
}
