//! Exhaustive search over all M-type distributions, for small instances.
//!
//! Used as ground truth for the greedy allocator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::cost::{evaluate_counts, quantize};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::types::{validate_target, CostKind, TargetDistribution};

/// Largest number of compositions [`brute_force`] will enumerate.
pub const MAX_CANDIDATES: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult<T> {
    pub best_cost: T,
    /// Lexicographically smallest minimizer.
    pub best_counts: Vec<usize>,
    pub num_candidates: u128,
}

/// `C(M + n - 1, n - 1)`, saturating at `u128::MAX`.
pub fn composition_count(precision: usize, n: usize) -> u128 {
    if n == 0 {
        return 0;
    }
    let k = (n - 1) as u128;
    let mut acc: u128 = 1;
    for i in 1..=k {
        // acc * (M + i) / i stays integral at every step
        acc = match acc.checked_mul(precision as u128 + i) {
            Some(v) => v / i,
            None => return u128::MAX,
        };
    }
    acc
}

/// Minimizes the exact cost over every composition of `precision` into
/// `t.len()` parts.
///
/// When no composition has finite cost (a target-first kind with fewer units
/// than support points) the result carries `+∞` and the first composition.
pub fn brute_force<T: Scalar>(
    t: &TargetDistribution<T>,
    precision: usize,
    kind: CostKind,
) -> Result<OracleResult<T>> {
    if precision == 0 {
        return Err(Error::ZeroPrecision);
    }
    let n = t.len();
    let total = composition_count(precision, n);
    if total > MAX_CANDIDATES {
        return Err(Error::TooLarge { candidates: total, limit: MAX_CANDIDATES });
    }

    struct Search<'a, T> {
        t: &'a TargetDistribution<T>,
        kind: CostKind,
        precision: usize,
        current: Vec<usize>,
        best: Option<(T, Vec<usize>)>,
        visited: u128,
    }

    impl<T: Scalar> Search<'_, T> {
        fn descend(&mut self, pos: usize, left: usize) -> Result<()> {
            let n = self.current.len();
            if pos + 1 == n {
                self.current[pos] = left;
                self.visited += 1;
                let cost = evaluate_counts(self.kind, self.t, &self.current, self.precision)?;
                let better = match &self.best {
                    None => true,
                    Some((b, _)) => cost < *b,
                };
                if better {
                    self.best = Some((cost, self.current.clone()));
                }
                return Ok(());
            }
            for c in 0..=left {
                self.current[pos] = c;
                self.descend(pos + 1, left - c)?;
            }
            Ok(())
        }
    }

    let mut search = Search {
        t,
        kind,
        precision,
        current: vec![0; n],
        best: None,
        visited: 0,
    };
    search.descend(0, precision)?;
    let (best_cost, best_counts) = search.best.expect("at least one composition");
    debug_assert_eq!(search.visited, total);
    Ok(OracleResult { best_cost, best_counts, num_candidates: search.visited })
}

/// Greedy and exhaustive costs for one kind on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct KindOutcome<T> {
    pub kind: CostKind,
    pub greedy_cost: T,
    pub oracle_cost: T,
}

impl<T: Scalar> KindOutcome<T> {
    pub fn gap(&self) -> T {
        if self.greedy_cost == self.oracle_cost {
            T::zero()
        } else {
            (self.greedy_cost - self.oracle_cost).abs()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome<T> {
    pub target: TargetDistribution<T>,
    pub precision: usize,
    pub kinds: Vec<KindOutcome<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgreementReport<T> {
    pub trials: Vec<TrialOutcome<T>>,
    pub max_discrepancy: T,
}

/// Random positive target on `n` points: flat-Dirichlet weights rounded to
/// six decimals and renormalized.
pub fn random_positive_target<T: Scalar, R: Rng>(rng: &mut R, n: usize) -> TargetDistribution<T> {
    loop {
        let w: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let s: f64 = w.iter().sum();
        let rounded: Vec<f64> = w.iter().map(|x| (x / s * 1e6).round() / 1e6).collect();
        if rounded.iter().all(|&x| x > 0.0) {
            let raw = rounded.into_iter().map(T::lit).collect();
            return validate_target(raw, true).expect("positive finite weights");
        }
    }
}

/// Runs greedy and brute force side by side on `trials` seeded random
/// instances (`n ∈ [2, 5]`, `M ∈ [n, 12]`) for every cost kind.
pub fn agreement_suite<T: Scalar>(seed: u64, trials: usize) -> Result<AgreementReport<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(trials);
    let mut max_discrepancy = T::zero();
    for _ in 0..trials {
        let n = rng.random_range(2..=5);
        let precision = rng.random_range(n..=12);
        let target = random_positive_target::<T, _>(&mut rng, n);
        let mut kinds = Vec::with_capacity(CostKind::ALL.len());
        for kind in CostKind::ALL {
            let greedy = quantize(&target, precision, kind)?;
            let greedy_cost = evaluate_counts(kind, &target, greedy.counts(), precision)?;
            let oracle_cost = brute_force(&target, precision, kind)?.best_cost;
            let outcome = KindOutcome { kind, greedy_cost, oracle_cost };
            max_discrepancy = max_discrepancy.max(outcome.gap());
            kinds.push(outcome);
        }
        out.push(TrialOutcome { target, precision, kinds });
    }
    Ok(AgreementReport { trials: out, max_discrepancy })
}
