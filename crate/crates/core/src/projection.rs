//! Reverse I-projection onto `P_M = {p : p_i ≥ 1/M, Σ p_i = 1}` and upper
//! bounds on the error of the optimal `D(t‖p)` approximation.
//!
//! All quantities are computed on the support of `t`; zero entries stay zero
//! in the projection and `n` always means the support size.

use crate::cost::{evaluate, kl_divergence, kl_divergence_distributions, quantize, variational_distance};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::types::{validate_target, CostKind, MTypeApprox, TargetDistribution};

/// The minimizer `t*` of `D(t‖q)` over `q ∈ P_M`.
///
/// `t*_i = max(t_i / ν, 1/M)` on the support, where `ν ≥ 1` normalizes the
/// result. Indices clamped to `1/M` form the saturated set.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult<T> {
    pub t_star: Vec<T>,
    pub nu: T,
    /// Indices with `t_i < ν / M`, in ascending order of `t_i`.
    pub saturated: Vec<usize>,
    /// `Σ_{i ∈ saturated} t_i`.
    pub saturated_mass: T,
}

impl<T: Scalar> ProjectionResult<T> {
    /// Size of the saturated set.
    pub fn k(&self) -> usize {
        self.saturated.len()
    }

    pub fn to_target(&self) -> Result<TargetDistribution<T>> {
        validate_target(self.t_star.clone(), false)
    }
}

/// Computes the projection in one pass over the sorted support.
///
/// For a saturated prefix of size `k` of the ascending order,
/// `ν_k = (1 - T_k) / (1 - k/M)`. The smallest `k` whose next entry satisfies
/// `s_{k+1} ≥ ν_k / M` is the answer; minimality of `k` implies
/// `s_k < ν_k / M`, so no separate check of the prefix is needed.
pub fn reverse_i_projection<T: Scalar>(
    t: &TargetDistribution<T>,
    precision: usize,
) -> Result<ProjectionResult<T>> {
    let mut order = t.support();
    let n = order.len();
    if precision < n {
        return Err(Error::EmptySimplex { support: n, precision });
    }
    order.sort_by(|&a, &b| {
        t.get(a)
            .partial_cmp(&t.get(b))
            .expect("validated entries are finite")
            .then(a.cmp(&b))
    });
    let sorted: Vec<T> = order.iter().map(|&i| t.get(i)).collect();

    // tail[k] = mass of sorted[k..]
    let mut tail = vec![T::zero(); n + 1];
    for k in (0..n).rev() {
        tail[k] = tail[k + 1] + sorted[k];
    }
    let m = T::from_count(precision);
    // s_{k+1} (M - k) >= 1 - T_k, with k = n-1 always accepted since M ≥ n
    let k = (0..n)
        .find(|&k| sorted[k] * (m - T::from_count(k)) >= tail[k])
        .unwrap_or(n - 1);

    // with nothing saturated t already lies in P_M
    let nu = if k == 0 {
        T::one()
    } else {
        (tail[k] * m / (m - T::from_count(k))).max(T::one())
    };
    let floor = T::one() / m;
    let t_star = t
        .probs()
        .iter()
        .map(|&ti| if ti > T::zero() { (ti / nu).max(floor) } else { T::zero() })
        .collect();
    let saturated = order[..k].to_vec();
    let saturated_mass = sorted[..k].iter().copied().sum();
    Ok(ProjectionResult { t_star, nu, saturated, saturated_mass })
}

/// Upper bound on `D(t‖t^a)` valid for every `M ≥ n`:
/// `log ν + (log 2 / 2)(1 - ν (1 - n/M))`.
pub fn projection_bound<T: Scalar>(t: &TargetDistribution<T>, precision: usize) -> Result<T> {
    let proj = reverse_i_projection(t, precision)?;
    Ok(projection_bound_from_nu(proj.nu, t.support_size(), precision))
}

pub(crate) fn projection_bound_from_nu<T: Scalar>(nu: T, n: usize, precision: usize) -> T {
    let one = T::one();
    let ratio = T::from_count(n) / T::from_count(precision);
    nu.ln() + T::LN_2() / (one + one) * (one - nu * (one - ratio))
}

/// `log(1 + n / (2M))` and whether it applies (`M · min t_i ≥ 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VdBound<T> {
    pub value: T,
    pub valid: bool,
}

/// Bound through the variational-distance-optimal approximation; only valid
/// once every support point of `t` has at least `1/M` mass.
pub fn vd_bound<T: Scalar>(t: &TargetDistribution<T>, precision: usize) -> VdBound<T> {
    let m = T::from_count(precision);
    let n = T::from_count(t.support_size());
    let value = (n / (m + m)).ln_1p();
    let valid = m * t.min_positive() >= T::one();
    VdBound { value, valid }
}

/// One row of a bound sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport<T> {
    pub precision: usize,
    /// `D(t‖t^a)` of the optimal approximation.
    pub exact: T,
    pub projection_bound: T,
    pub vd_bound: T,
    pub vd_bound_valid: bool,
    pub nu: T,
}

pub fn bound_report<T: Scalar>(t: &TargetDistribution<T>, precision: usize) -> Result<BoundReport<T>> {
    let approx = quantize(t, precision, CostKind::KlTargetFirst)?;
    let exact = evaluate(CostKind::KlTargetFirst, t, &approx)?;
    let proj = reverse_i_projection(t, precision)?;
    let vd = vd_bound(t, precision);
    Ok(BoundReport {
        precision,
        exact,
        projection_bound: projection_bound_from_nu(proj.nu, t.support_size(), precision),
        vd_bound: vd.value,
        vd_bound_valid: vd.valid,
        nu: proj.nu,
    })
}

/// Exact error and both bounds for every `M` in `[min, max]`, ascending.
pub fn bound_sweep<T: Scalar>(
    t: &TargetDistribution<T>,
    min: usize,
    max: usize,
) -> Result<Vec<BoundReport<T>>> {
    if min == 0 || min > max {
        return Err(Error::InvalidRange { min, max });
    }
    let support = t.support_size();
    if min < support {
        return Err(Error::InfeasibleSupport { support, precision: min });
    }
    (min..=max).map(|m| bound_report(t, m)).collect()
}

/// Left and right side of an inequality or identity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sides<T> {
    pub lhs: T,
    pub rhs: T,
}

/// `D(t‖t^vd)` against `D(t‖t*) + ν D(t*‖t^vd)`, where `t^vd` is the
/// variational-distance-optimal M-type approximation of the projection. The
/// two sides are equal.
pub fn pythagorean_check<T: Scalar>(t: &TargetDistribution<T>, precision: usize) -> Result<Sides<T>> {
    let proj = reverse_i_projection(t, precision)?;
    let t_star = proj.to_target()?;
    let t_vd: Vec<T> = quantize(&t_star, precision, CostKind::VariationalDistance)?.probs();
    let lhs = kl_divergence(t.probs(), &t_vd)?;
    let rhs = kl_divergence(t.probs(), &proj.t_star)? + proj.nu * kl_divergence(&proj.t_star, &t_vd)?;
    Ok(Sides { lhs, rhs })
}

/// `D(t*‖t^vd)` against `log 2 · ‖t* - t^vd‖₁`; the first never exceeds the
/// second when `t* ∈ P_M` and `t^vd` is its VD-optimal approximation.
pub fn reverse_pinsker_check<T: Scalar>(
    t_star: &TargetDistribution<T>,
    t_vd: &MTypeApprox,
) -> Result<Sides<T>> {
    if t_vd.len() != t_star.len() {
        return Err(Error::DimensionMismatch { expected: t_star.len(), found: t_vd.len() });
    }
    if let Some(index) = (0..t_star.len()).find(|&i| t_star.get(i) > T::zero() && t_vd.counts()[i] == 0) {
        return Err(Error::SupportMismatch { index });
    }
    let q: Vec<T> = t_vd.probs();
    let lhs = kl_divergence_distributions(t_star.probs(), &q)?;
    let rhs = T::LN_2() * variational_distance(t_star.probs(), &q)?;
    Ok(Sides { lhs, rhs })
}

/// `D(t‖t*)` against `log ν`; the first never exceeds the second.
pub fn log_nu_check<T: Scalar>(t: &TargetDistribution<T>, precision: usize) -> Result<Sides<T>> {
    let proj = reverse_i_projection(t, precision)?;
    Ok(Sides { lhs: kl_divergence(t.probs(), &proj.t_star)?, rhs: proj.nu.ln() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn target(v: &[f64]) -> TargetDistribution<f64> {
        validate_target(v.to_vec(), false).unwrap()
    }

    fn skewed_target() -> TargetDistribution<f64> {
        target(&[0.48, 0.48, 0.02, 0.02])
    }

    #[test]
    fn interior_target_is_its_own_projection() {
        let t = target(&[0.3, 0.3, 0.4]);
        let p = reverse_i_projection(&t, 10).unwrap();
        assert_eq!(p.nu, 1.0);
        assert_eq!(p.t_star, t.probs());
        assert!(p.saturated.is_empty());
        assert_eq!(p.saturated_mass, 0.0);
    }

    #[test]
    fn waterfilling_example() {
        let p = reverse_i_projection(&skewed_target(), 10).unwrap();
        assert_abs_diff_eq!(p.nu, 1.2, epsilon = 1e-12);
        assert_eq!(p.saturated, vec![2, 3]);
        assert_eq!(p.k(), 2);
        assert_abs_diff_eq!(p.saturated_mass, 0.04, epsilon = 1e-15);
        for (a, b) in p.t_star.iter().zip([0.4, 0.4, 0.1, 0.1]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn nearly_deterministic_target_projects_to_uniform() {
        let eps = 0.01;
        let t = target(&[1.0 - eps, eps / 3.0, eps / 3.0, eps / 3.0]);
        let p = reverse_i_projection(&t, 4).unwrap();
        assert_eq!(p.k(), 3);
        assert_eq!(p.saturated, vec![1, 2, 3]);
        assert_abs_diff_eq!(p.nu, 3.96, epsilon = 1e-12);
        for x in &p.t_star {
            assert_abs_diff_eq!(*x, 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn empty_simplex() {
        assert_eq!(
            reverse_i_projection(&skewed_target(), 3),
            Err(Error::EmptySimplex { support: 4, precision: 3 })
        );
        assert!(projection_bound(&skewed_target(), 3).is_err());
    }

    #[test]
    fn zero_entries_are_left_out() {
        let t = target(&[0.48, 0.0, 0.48, 0.02, 0.02]);
        let p = reverse_i_projection(&t, 4).unwrap();
        assert_eq!(p.t_star[1], 0.0);
        assert_abs_diff_eq!(p.t_star.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn projection_bound_values() {
        let t = skewed_target();
        let half_ln2 = std::f64::consts::LN_2 / 2.0;
        assert_abs_diff_eq!(
            projection_bound(&t, 10).unwrap(),
            1.2f64.ln() + half_ln2 * (1.0 - 1.2 * 0.6),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(projection_bound(&t, 10).unwrap(), 0.279_362, epsilon = 1e-6);
        assert_abs_diff_eq!(projection_bound(&t, 60).unwrap(), half_ln2 * 4.0 / 60.0, epsilon = 1e-15);
        assert_abs_diff_eq!(projection_bound(&t, 60).unwrap(), 0.023_105, epsilon = 1e-6);
        let interior = target(&[0.3, 0.3, 0.4]);
        assert_abs_diff_eq!(projection_bound(&interior, 10).unwrap(), half_ln2 * 0.3, epsilon = 1e-15);
    }

    #[test]
    fn vd_bound_values() {
        let t = skewed_target();
        let b = vd_bound(&t, 50);
        assert!(b.valid);
        assert_abs_diff_eq!(b.value, 1.04f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(b.value, 0.039_221, epsilon = 1e-6);
        assert!(!vd_bound(&t, 49).valid);
        let two = target(&[0.5, 0.5]);
        assert_abs_diff_eq!(vd_bound(&two, 1000).value, 1.001f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn sweep_rows_and_errors() {
        let t = skewed_target();
        let rows = bound_sweep(&t, 4, 60).unwrap();
        assert_eq!(rows.len(), 57);
        assert_eq!(rows[0].precision, 4);
        assert_eq!(bound_sweep(&t, 9, 9).unwrap().len(), 1);
        assert!(matches!(bound_sweep(&t, 3, 10), Err(Error::InfeasibleSupport { .. })));
        assert!(matches!(bound_sweep(&t, 10, 9), Err(Error::InvalidRange { .. })));
        let uniform = target(&[0.25; 4]);
        for m in [4, 8, 12] {
            assert_eq!(bound_report(&uniform, m).unwrap().exact, 0.0);
        }
    }

    #[test]
    fn projection_bound_beats_vd_bound_for_large_m() {
        let t = skewed_target();
        for m in [55, 60] {
            let r = bound_report(&t, m).unwrap();
            assert!(r.projection_bound < r.vd_bound, "M={m}");
        }
    }

    #[test]
    fn side_checks_at_fixed_point() {
        let t = skewed_target();
        let s = pythagorean_check(&t, 10).unwrap();
        assert!((s.lhs - s.rhs).abs() <= 1e-9);
        let s = log_nu_check(&t, 10).unwrap();
        assert!(s.lhs <= 1.2f64.ln());
        let interior = target(&[0.3, 0.3, 0.4]);
        let s = log_nu_check(&interior, 10).unwrap();
        assert_eq!((s.lhs, s.rhs), (0.0, 0.0));
        let s = pythagorean_check(&interior, 10).unwrap();
        let direct = kl_divergence(
            interior.probs(),
            &quantize(&interior, 10, CostKind::VariationalDistance).unwrap().probs::<f64>(),
        )
        .unwrap();
        assert_eq!(s.lhs, direct);
        assert_abs_diff_eq!(s.rhs, direct, epsilon = 1e-15);
    }

    #[test]
    fn reverse_pinsker_on_mtype_projection() {
        let t_star = target(&[0.4, 0.4, 0.1, 0.1]);
        let t_vd = quantize(&t_star, 10, CostKind::VariationalDistance).unwrap();
        assert_eq!(t_vd.counts(), &[4, 4, 1, 1]);
        let s = reverse_pinsker_check(&t_star, &t_vd).unwrap();
        assert_eq!((s.lhs, s.rhs), (0.0, 0.0));
        let bad = MTypeApprox::new(vec![5, 5, 0, 0], 10).unwrap();
        assert_eq!(reverse_pinsker_check(&t_star, &bad), Err(Error::SupportMismatch { index: 2 }));
    }
}
