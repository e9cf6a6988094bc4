//! Row-wise M-type quantization of transition matrices.

use std::collections::VecDeque;

use crate::cost::{kl_divergence, quantize};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::types::{validate_target, CostKind, TargetDistribution};

/// A row-stochastic square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovModel<T> {
    rows: Vec<TargetDistribution<T>>,
}

impl<T: Scalar> MarkovModel<T> {
    /// Validates every row as a distribution and checks squareness.
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(row, r)| {
                if r.len() != n {
                    return Err(Error::NotSquare { row, len: r.len(), expected: n });
                }
                validate_target(r, false)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rows })
    }

    pub fn states(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[TargetDistribution<T>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &TargetDistribution<T> {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.rows[i].get(j)
    }

    /// Adjacency pattern of positive transitions.
    pub fn pattern(&self) -> Vec<Vec<bool>> {
        self.rows
            .iter()
            .map(|r| r.probs().iter().map(|&p| p > T::zero()).collect())
            .collect()
    }

    pub fn is_irreducible(&self) -> bool {
        is_strongly_connected(&self.pattern())
    }
}

/// Integer transition counts, every row summing to `M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedMarkov {
    precision: usize,
    count_rows: Vec<Vec<usize>>,
}

impl QuantizedMarkov {
    pub fn new(count_rows: Vec<Vec<usize>>, precision: usize) -> Result<Self> {
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        let n = count_rows.len();
        for (row, r) in count_rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { row, len: r.len(), expected: n });
            }
            let sum = r.iter().sum();
            if sum != precision {
                return Err(Error::CountMismatch { sum, precision });
            }
        }
        Ok(Self { precision, count_rows })
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn count_rows(&self) -> &[Vec<usize>] {
        &self.count_rows
    }

    pub fn states(&self) -> usize {
        self.count_rows.len()
    }

    /// Row `i` as probabilities `c_ij / M`.
    pub fn row_probs<T: Scalar>(&self, i: usize) -> Vec<T> {
        let m = T::from_count(self.precision);
        self.count_rows[i].iter().map(|&c| T::from_count(c) / m).collect()
    }

    pub fn pattern(&self) -> Vec<Vec<bool>> {
        self.count_rows
            .iter()
            .map(|r| r.iter().map(|&c| c > 0).collect())
            .collect()
    }

    pub fn is_irreducible(&self) -> bool {
        is_strongly_connected(&self.pattern())
    }
}

fn reaches_all(n: usize, edge: impl Fn(usize, usize) -> bool) -> bool {
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        for v in 0..n {
            if !seen[v] && edge(u, v) {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Strong connectivity: state 0 reaches every state, forwards and backwards.
pub fn is_strongly_connected(pattern: &[Vec<bool>]) -> bool {
    let n = pattern.len();
    n > 0 && reaches_all(n, |u, v| pattern[u][v]) && reaches_all(n, |u, v| pattern[v][u])
}

/// Stationary distribution `μ` with `μ T = μ`.
///
/// Solves `(Tᵀ - I) μ = 0` with the last equation replaced by `Σ μ_i = 1`,
/// which is nonsingular for an irreducible chain.
pub fn stationary_distribution<T: Scalar>(chain: &MarkovModel<T>) -> Result<TargetDistribution<T>> {
    if !chain.is_irreducible() {
        return Err(Error::NotIrreducible);
    }
    let n = chain.states();
    let mut a = vec![vec![T::zero(); n + 1]; n];
    for (i, row) in a.iter_mut().enumerate().take(n - 1) {
        for (j, cell) in row.iter_mut().enumerate().take(n) {
            *cell = chain.get(j, i);
        }
        row[i] = row[i] - T::one();
    }
    a[n - 1] = vec![T::one(); n + 1];

    let mu = solve_augmented(a)?;
    let mu: Vec<T> = mu.into_iter().map(|x| x.max(T::zero())).collect();
    validate_target(mu, true)
}

/// Gaussian elimination with partial pivoting on an `n × (n+1)` system.
fn solve_augmented<T: Scalar>(mut a: Vec<Vec<T>>) -> Result<Vec<T>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| {
                a[x][col]
                    .abs()
                    .partial_cmp(&a[y][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty range");
        if a[pivot][col].abs() <= T::epsilon() {
            return Err(Error::SingularSystem);
        }
        a.swap(col, pivot);
        for r in col + 1..n {
            let factor = a[r][col] / a[col][col];
            if factor == T::zero() {
                continue;
            }
            for c in col..=n {
                a[r][c] = a[r][c] - factor * a[col][c];
            }
        }
    }
    let mut x = vec![T::zero(); n];
    for r in (0..n).rev() {
        let dot: T = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (a[r][n] - dot) / a[r][r];
    }
    Ok(x)
}

/// `‖μ T - μ‖₁`.
pub fn stationary_residual<T: Scalar>(chain: &MarkovModel<T>, mu: &TargetDistribution<T>) -> T {
    let n = chain.states();
    (0..n)
        .map(|j| {
            let flow: T = (0..n).map(|i| mu.get(i) * chain.get(i, j)).sum();
            (flow - mu.get(j)).abs()
        })
        .sum()
}

/// Quantizes each row independently for `D(t_i‖p_i)`.
///
/// Every row keeps its support, so the quantized chain has the same
/// transition graph as the source.
pub fn quantize_markov<T: Scalar>(chain: &MarkovModel<T>, precision: usize) -> Result<QuantizedMarkov> {
    let count_rows = chain
        .rows()
        .iter()
        .map(|row| quantize(row, precision, CostKind::KlTargetFirst).map(|p| p.into_counts()))
        .collect::<Result<Vec<_>>>()?;
    QuantizedMarkov::new(count_rows, precision)
}

/// Whether the quantized chain has exactly the source's positive transitions.
pub fn graph_preserved<T: Scalar>(chain: &MarkovModel<T>, quantized: &QuantizedMarkov) -> bool {
    chain.pattern() == quantized.pattern()
}

/// `Σ_i μ_i D(t_i‖p_i)` with `μ` the stationary distribution of the source.
pub fn divergence_rate<T: Scalar>(chain: &MarkovModel<T>, quantized: &QuantizedMarkov) -> Result<T> {
    let mu = stationary_distribution(chain)?;
    divergence_rate_with(chain, quantized, &mu)
}

/// [`divergence_rate`] with a precomputed stationary distribution.
pub fn divergence_rate_with<T: Scalar>(
    chain: &MarkovModel<T>,
    quantized: &QuantizedMarkov,
    mu: &TargetDistribution<T>,
) -> Result<T> {
    let n = chain.states();
    if quantized.states() != n {
        return Err(Error::DimensionMismatch { expected: n, found: quantized.states() });
    }
    if mu.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: mu.len() });
    }
    let mut rate = T::zero();
    for i in 0..n {
        if let Some(col) = (0..n).find(|&j| chain.get(i, j) > T::zero() && quantized.count_rows()[i][j] == 0) {
            return Err(Error::SupportViolation { row: i, col });
        }
        let q: Vec<T> = quantized.row_probs(i);
        rate = rate + mu.get(i) * kl_divergence(chain.row(i).probs(), &q)?;
    }
    Ok(rate)
}
