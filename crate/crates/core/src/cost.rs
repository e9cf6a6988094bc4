//! Concrete cost models for M-type approximation.
//!
//! Every cost is written as `Σ_i f_i(c_i)` for a convex `f_i` (up to an affine
//! map), so the greedy increments `δ_i(k) = f_i(k) - f_i(k-1)` are
//! non-decreasing and [`greedy_allocate`] returns an optimum.
//!
//! | kind | `f_i(x)` | `c_{i,0}` | cost from `F = Σ f_i(c_i)` |
//! |---|---|---|---|
//! | variational | `|x - M t_i|` | `⌊M t_i⌋` | `F / M` |
//! | kl-approx-first | `x log(x / t_i)` | `0` | `F / M - log M` |
//! | kl-target-first | `-t_i log x` | `⌈t_i⌉` | `log M - H(t) + F` |
//! | chi2-approx-first | `(x/M - t_i)² / t_i` | `0` | `F` |
//! | chi2-target-first | `t_i² M / x` | `⌈t_i⌉` | `F - 1` |

use crate::error::{Error, Result};
use crate::greedy::{greedy_allocate, AllocationResult, DeltaSource};
use crate::scalar::Scalar;
use crate::types::{CostKind, MTypeApprox, Preallocation, TargetDistribution};

/// Increment `δ_i(k)` for one entry `t_i` of the target at precision `M`.
///
/// Singular points follow the limits of `f_i`: `0 log 0 = 0`, and a target-first
/// cost at `x = 0` is `+∞` when `t_i > 0`.
pub fn delta<T: Scalar>(kind: CostKind, t_i: T, precision: usize, k: usize) -> T {
    debug_assert!(k >= 1);
    let zero = T::zero();
    let one = T::one();
    let m = T::from_count(precision);
    let kf = T::from_count(k);
    match kind {
        CostKind::VariationalDistance => {
            // |k - Mt| - |k-1 - Mt|, evaluated piecewise so it is exactly
            // -1 below Mt and +1 above it
            let target = m * t_i;
            if kf <= target {
                -one
            } else if kf - one >= target {
                one
            } else {
                (kf + kf - one) - (target + target)
            }
        }
        CostKind::KlApproxFirst => {
            if t_i <= zero {
                T::infinity()
            } else if k == 1 {
                -t_i.ln()
            } else {
                // k log(k/(k-1)) + log(k-1) - log t_i
                let km1 = kf - one;
                -kf * (-one / kf).ln_1p() + km1.ln() - t_i.ln()
            }
        }
        CostKind::KlTargetFirst => {
            if t_i <= zero {
                zero
            } else {
                // t_i log((k-1)/k)
                t_i * (-one / kf).ln_1p()
            }
        }
        CostKind::Chi2ApproxFirst => {
            if t_i <= zero {
                T::infinity()
            } else {
                let two = one + one;
                (two * kf - one) / (m * m * t_i) - two / m
            }
        }
        CostKind::Chi2TargetFirst => {
            if t_i <= zero {
                zero
            } else if k == 1 {
                T::neg_infinity()
            } else {
                -(t_i * t_i * m) / (kf * (kf - one))
            }
        }
    }
}

/// Pre-allocation `c_{i,0}` for one entry.
pub fn prealloc<T: Scalar>(kind: CostKind, t_i: T, precision: usize) -> usize {
    match kind {
        CostKind::VariationalDistance => {
            let floor = (T::from_count(precision) * t_i).floor();
            floor.to_usize().unwrap_or(0)
        }
        CostKind::KlTargetFirst | CostKind::Chi2TargetFirst => usize::from(t_i > T::zero()),
        CostKind::KlApproxFirst | CostKind::Chi2ApproxFirst => 0,
    }
}

/// `f_i(x)` for one entry, with the same conventions as [`delta`].
pub fn convex_term<T: Scalar>(kind: CostKind, t_i: T, precision: usize, x: usize) -> T {
    let zero = T::zero();
    let m = T::from_count(precision);
    let xf = T::from_count(x);
    match kind {
        CostKind::VariationalDistance => (xf - m * t_i).abs(),
        CostKind::KlApproxFirst => match (x, t_i > zero) {
            (0, _) => zero,
            (_, false) => T::infinity(),
            (_, true) => xf * (xf / t_i).ln(),
        },
        CostKind::KlTargetFirst => {
            if t_i > zero {
                -t_i * xf.ln()
            } else {
                zero
            }
        }
        CostKind::Chi2ApproxFirst => {
            if t_i > zero {
                let d = xf / m - t_i;
                d * d / t_i
            } else if x == 0 {
                zero
            } else {
                T::infinity()
            }
        }
        CostKind::Chi2TargetFirst => {
            if t_i > zero {
                t_i * t_i * m / xf
            } else {
                zero
            }
        }
    }
}

/// Exact cost between `t` and the M-type distribution with the given counts.
///
/// This is the direct definition of each cost, not the rewritten
/// `Σ f_i(c_i)` form, so it serves as an independent check on the allocator.
pub fn evaluate_counts<T: Scalar>(
    kind: CostKind,
    t: &TargetDistribution<T>,
    counts: &[usize],
    precision: usize,
) -> Result<T> {
    if counts.len() != t.len() {
        return Err(Error::DimensionMismatch { expected: t.len(), found: counts.len() });
    }
    let m = T::from_count(precision);
    let pairs = t.probs().iter().zip(counts).map(|(&ti, &c)| (ti, T::from_count(c) / m));
    Ok(match kind {
        CostKind::VariationalDistance => variational_distance_iter(pairs),
        CostKind::KlApproxFirst => kl_iter(pairs.map(|(ti, pi)| (pi, ti))),
        CostKind::KlTargetFirst => kl_iter(pairs),
        CostKind::Chi2ApproxFirst => chi2_iter(pairs.map(|(ti, pi)| (pi, ti))),
        CostKind::Chi2TargetFirst => chi2_iter(pairs),
    })
}

/// Exact cost of approximating `t` by `p`.
pub fn evaluate<T: Scalar>(kind: CostKind, t: &TargetDistribution<T>, p: &MTypeApprox) -> Result<T> {
    evaluate_counts(kind, t, p.counts(), p.precision())
}

fn variational_distance_iter<T: Scalar>(pairs: impl Iterator<Item = (T, T)>) -> T {
    pairs.map(|(a, b)| (a - b).abs()).sum()
}

/// `Σ_{a_i>0} a_i log(a_i/b_i)`, `+∞` if some `b_i = 0 < a_i`.
fn kl_iter<T: Scalar>(pairs: impl Iterator<Item = (T, T)>) -> T {
    pairs
        .filter(|&(a, _)| a > T::zero())
        .map(|(a, b)| if b > T::zero() { a * (a / b).ln() } else { T::infinity() })
        .sum()
}

/// `Σ (a_i - b_i)² / b_i` over indices where either is positive.
fn chi2_iter<T: Scalar>(pairs: impl Iterator<Item = (T, T)>) -> T {
    pairs
        .filter(|&(a, b)| a > T::zero() || b > T::zero())
        .map(|(a, b)| if b > T::zero() { (a - b) * (a - b) / b } else { T::infinity() })
        .sum()
}

/// Informational divergence `D(a‖b)` between two equal-length vectors.
pub fn kl_divergence<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    Ok(kl_iter(a.iter().copied().zip(b.iter().copied())))
}

/// `D(a‖b)` for two probability vectors, summed as
/// `Σ [a_i log(a_i/b_i) - a_i + b_i]`.
///
/// Equal to [`kl_divergence`] when both vectors sum to one, but every term is
/// nonnegative, so near-identical inputs give a result near zero instead of
/// `±` rounding noise.
pub fn kl_divergence_distributions<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    Ok(a.iter()
        .zip(b)
        .map(|(&a, &b)| {
            if a <= T::zero() {
                b
            } else if b <= T::zero() {
                T::infinity()
            } else {
                // b [(1+r) log(1+r) - r] with r = a/b - 1
                let r = (a - b) / b;
                let l = r.ln_1p();
                b * (r * l + (l - r))
            }
        })
        .sum())
}

/// `‖a - b‖₁`.
pub fn variational_distance<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    Ok(variational_distance_iter(a.iter().copied().zip(b.iter().copied())))
}

/// A cost model bound to a target and a precision; drives the allocator.
#[derive(Debug, Clone, Copy)]
pub struct CostInstance<'a, T> {
    kind: CostKind,
    target: &'a TargetDistribution<T>,
    precision: usize,
}

impl<'a, T: Scalar> CostInstance<'a, T> {
    pub fn new(kind: CostKind, target: &'a TargetDistribution<T>, precision: usize) -> Result<Self> {
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        if kind.is_target_first() {
            let support = target.support_size();
            if precision < support {
                return Err(Error::InfeasibleSupport { support, precision });
            }
        }
        Ok(Self { kind, target, precision })
    }

    pub fn kind(&self) -> CostKind {
        self.kind
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn target(&self) -> &'a TargetDistribution<T> {
        self.target
    }

    pub fn preallocation(&self) -> Preallocation {
        Preallocation((0..self.target.len()).map(|i| DeltaSource::prealloc(self, i)).collect())
    }

    /// Maps `Σ_i f_i(c_i)` to the cost it represents.
    pub fn cost_from_terms(&self, sum_f: T) -> T {
        let m = T::from_count(self.precision);
        match self.kind {
            CostKind::VariationalDistance => sum_f / m,
            CostKind::KlApproxFirst => sum_f / m - m.ln(),
            CostKind::KlTargetFirst => m.ln() - self.target.entropy() + sum_f,
            CostKind::Chi2ApproxFirst => sum_f,
            CostKind::Chi2TargetFirst => sum_f - T::one(),
        }
    }

    /// Cost recovered from an allocation's increment sum plus the
    /// pre-allocated terms.
    pub fn cost_from_allocation(&self, alloc: &AllocationResult<T>) -> T {
        let base: T = alloc
            .prealloc
            .counts()
            .iter()
            .enumerate()
            .map(|(i, &c)| convex_term(self.kind, self.target.get(i), self.precision, c))
            .sum();
        self.cost_from_terms(base + alloc.cost_sum)
    }

    /// Runs the allocator and checks that no zero-mass index was chosen by a
    /// target-first cost.
    pub fn allocate(&self) -> Result<AllocationResult<T>> {
        let alloc = greedy_allocate(self, self.precision)?;
        if self.kind.is_target_first() {
            if let Some(i) = (0..self.target.len())
                .find(|&i| alloc.counts[i] > 0 && self.target.get(i) <= T::zero())
            {
                return Err(Error::InternalInvariantViolation(format!(
                    "{} assigned mass to zero-probability index {i}",
                    self.kind
                )));
            }
        }
        Ok(alloc)
    }

    pub fn quantize(&self) -> Result<MTypeApprox> {
        MTypeApprox::new(self.allocate()?.counts, self.precision)
    }
}

impl<T: Scalar> DeltaSource<T> for CostInstance<'_, T> {
    fn len(&self) -> usize {
        self.target.len()
    }

    fn delta(&self, i: usize, k: usize) -> T {
        delta(self.kind, self.target.get(i), self.precision, k)
    }

    fn prealloc(&self, i: usize) -> usize {
        prealloc(self.kind, self.target.get(i), self.precision)
    }
}

/// Optimal M-type approximation of `t` under `kind`.
pub fn quantize<T: Scalar>(
    t: &TargetDistribution<T>,
    precision: usize,
    kind: CostKind,
) -> Result<MTypeApprox> {
    CostInstance::new(kind, t, precision)?.quantize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::validate_target;
    use approx::assert_abs_diff_eq;

    fn target(v: &[f64]) -> TargetDistribution<f64> {
        validate_target(v.to_vec(), false).unwrap()
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(CostKind::VariationalDistance, 0.08, 50, 5), 1.0);
        assert_abs_diff_eq!(
            delta(CostKind::KlTargetFirst, 0.85, 20, 2),
            -0.589_175_103_475_953_5,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            delta(CostKind::KlApproxFirst, 0.7, 10, 1),
            0.356_674_943_938_732_45,
            epsilon = 1e-15
        );
    }

    #[test]
    fn delta_is_difference_of_convex_terms() {
        for kind in CostKind::ALL {
            for &ti in &[0.013, 0.2, 0.5, 0.97] {
                for k in 2..40 {
                    let d: f64 = delta(kind, ti, 17, k);
                    let f: f64 = convex_term(kind, ti, 17, k) - convex_term(kind, ti, 17, k - 1);
                    assert!((d - f).abs() <= 1e-12 * (1.0 + f.abs()), "{kind} t={ti} k={k}: {d} vs {f}");
                }
            }
        }
    }

    #[test]
    fn delta_is_non_decreasing() {
        for kind in CostKind::ALL {
            for &ti in &[0.0, 1e-6, 0.013, 0.2, 0.5, 0.97, 1.0] {
                for m in [1, 7, 50, 1000] {
                    for k in 1..200 {
                        let (a, b) = (delta(kind, ti, m, k), delta(kind, ti, m, k + 1));
                        assert!(b >= a, "{kind} t={ti} M={m} k={k}: {a} > {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn zero_mass_conventions() {
        assert_eq!(delta(CostKind::KlApproxFirst, 0.0, 5, 1), f64::INFINITY);
        assert_eq!(delta(CostKind::Chi2ApproxFirst, 0.0, 5, 3), f64::INFINITY);
        assert_eq!(delta(CostKind::KlTargetFirst, 0.0, 5, 1), 0.0);
        assert_eq!(delta(CostKind::Chi2TargetFirst, 0.0, 5, 1), 0.0);
        assert_eq!(delta(CostKind::VariationalDistance, 0.0, 5, 1), 1.0);
    }

    #[test]
    fn prealloc_examples() {
        assert_eq!(prealloc(CostKind::VariationalDistance, 0.719, 50), 35);
        assert_eq!(prealloc(CostKind::KlTargetFirst, 0.075, 20), 1);
        assert_eq!(prealloc(CostKind::KlTargetFirst, 0.0, 20), 0);
        assert_eq!(prealloc(CostKind::KlTargetFirst, 1.0, 20), 1);
        assert_eq!(prealloc(CostKind::KlApproxFirst, 0.5, 20), 0);
        assert_eq!(prealloc(CostKind::Chi2ApproxFirst, 0.5, 20), 0);
    }

    #[test]
    fn identical_distributions_cost_zero() {
        let t = target(&[0.5, 0.5]);
        let p = MTypeApprox::new(vec![1, 1], 2).unwrap();
        for kind in CostKind::ALL {
            assert_eq!(evaluate(kind, &t, &p).unwrap(), 0.0, "{kind}");
        }
    }

    #[test]
    fn rounding_off_counterexample_value() {
        let t = target(&[0.85, 0.075, 0.075]);
        let p = MTypeApprox::new(vec![16, 2, 2], 20).unwrap();
        let expected = 0.85 * (0.85f64 / 0.8).ln() + 2.0 * 0.075 * (0.075f64 / 0.1).ln();
        assert_abs_diff_eq!(evaluate(CostKind::KlTargetFirst, &t, &p).unwrap(), expected, epsilon = 1e-15);
    }

    #[test]
    fn uniform_approximation_costs_log_n_minus_entropy() {
        let eps = 0.01;
        let t = target(&[1.0 - eps, eps / 3.0, eps / 3.0, eps / 3.0]);
        let p = MTypeApprox::new(vec![1, 1, 1, 1], 4).unwrap();
        let got = evaluate(CostKind::KlTargetFirst, &t, &p).unwrap();
        assert_abs_diff_eq!(got, 4f64.ln() - t.entropy(), epsilon = 1e-12);
        assert_eq!(quantize(&t, 4, CostKind::KlTargetFirst).unwrap().counts(), &[1, 1, 1, 1]);
    }

    #[test]
    fn infinite_costs() {
        let t = target(&[0.5, 0.5, 0.0]);
        let missing = MTypeApprox::new(vec![2, 0, 0], 2).unwrap();
        let extra = MTypeApprox::new(vec![1, 0, 1], 2).unwrap();
        let spread = MTypeApprox::new(vec![1, 1, 1], 3).unwrap();
        assert_eq!(evaluate(CostKind::KlTargetFirst, &t, &missing).unwrap(), f64::INFINITY);
        assert_eq!(evaluate(CostKind::Chi2TargetFirst, &t, &missing).unwrap(), f64::INFINITY);
        assert_eq!(evaluate(CostKind::KlApproxFirst, &t, &extra).unwrap(), f64::INFINITY);
        assert_eq!(evaluate(CostKind::Chi2ApproxFirst, &t, &extra).unwrap(), f64::INFINITY);
        assert!(evaluate(CostKind::KlTargetFirst, &t, &spread).unwrap().is_finite());
        assert!(evaluate(CostKind::Chi2TargetFirst, &t, &spread).unwrap().is_finite());
    }

    #[test]
    fn dimension_mismatch() {
        let t = target(&[0.5, 0.5]);
        let p = MTypeApprox::new(vec![1, 1, 0], 2).unwrap();
        assert_eq!(
            evaluate(CostKind::VariationalDistance, &t, &p),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        );
    }

    #[test]
    fn small_variational_instance() {
        let t = target(&[0.4, 0.35, 0.25]);
        let p = quantize(&t, 4, CostKind::VariationalDistance).unwrap();
        assert_eq!(p.counts(), &[2, 1, 1]);
        assert_abs_diff_eq!(evaluate(CostKind::VariationalDistance, &t, &p).unwrap(), 0.2, epsilon = 1e-15);
    }

    #[test]
    fn target_first_rejects_small_precision() {
        let t = target(&[0.85, 0.075, 0.075]);
        for kind in [CostKind::KlTargetFirst, CostKind::Chi2TargetFirst] {
            assert_eq!(quantize(&t, 2, kind), Err(Error::InfeasibleSupport { support: 3, precision: 2 }));
        }
        // the other kinds accept M < n
        for kind in [CostKind::VariationalDistance, CostKind::KlApproxFirst, CostKind::Chi2ApproxFirst] {
            let p = quantize(&t, 2, kind).unwrap();
            assert_eq!(p.counts().iter().sum::<usize>(), 2);
        }
    }

    #[test]
    fn zero_precision_rejected() {
        let t = target(&[1.0]);
        assert_eq!(quantize(&t, 0, CostKind::VariationalDistance), Err(Error::ZeroPrecision));
    }

    #[test]
    fn single_support_point_takes_everything() {
        let t = target(&[0.0, 1.0, 0.0]);
        for kind in CostKind::ALL {
            assert_eq!(quantize(&t, 5, kind).unwrap().counts(), &[0, 5, 0], "{kind}");
        }
    }

    #[test]
    fn rewritten_kl_matches_direct() {
        let t = target(&[0.719, 0.145, 0.088, 0.048]);
        let p = quantize(&t, 50, CostKind::KlTargetFirst).unwrap();
        let direct = evaluate(CostKind::KlTargetFirst, &t, &p).unwrap();
        let rewritten = 50f64.ln() - t.entropy()
            - t.probs().iter().zip(p.counts()).map(|(&ti, &c)| ti * (c as f64).ln()).sum::<f64>();
        assert_abs_diff_eq!(direct, rewritten, epsilon = 1e-12);
    }

    #[test]
    fn stable_kl_agrees_on_distributions() {
        let a = [0.48, 0.48, 0.02, 0.02];
        let b = [0.4, 0.4, 0.1, 0.1];
        let plain = kl_divergence(&a, &b).unwrap();
        assert_abs_diff_eq!(kl_divergence_distributions(&a, &b).unwrap(), plain, epsilon = 1e-15);
        assert_abs_diff_eq!(kl_divergence_distributions(&b, &a).unwrap(), kl_divergence(&b, &a).unwrap(), epsilon = 1e-15);
        // one-ulp perturbation of the uniform distribution
        let third = 1.0f64 / 3.0;
        let u = [third, third, 1.0 - 2.0 * third];
        let v = [third, f64::from_bits(third.to_bits() + 1), 1.0 - 2.0 * third];
        let d = kl_divergence_distributions(&v, &u).unwrap();
        assert!((0.0..1e-30).contains(&d));
        assert_eq!(kl_divergence_distributions(&[1.0, 0.0], &[0.5, 0.5]).unwrap(), 2f64.ln());
        assert_eq!(kl_divergence_distributions(&[0.5, 0.5], &[1.0, 0.0]).unwrap(), f64::INFINITY);
    }

    #[test]
    fn single_precision_rounding_off_counterexample() {
        let t = validate_target(vec![0.85f32, 0.075, 0.075], false).unwrap();
        assert_eq!(quantize(&t, 20, CostKind::KlTargetFirst).unwrap().counts(), &[16, 2, 2]);
    }
}
