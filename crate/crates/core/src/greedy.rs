//! Generic greedy allocator over per-index increment sequences.
//!
//! Each index `i` owns a queue of increments `δ_i(1), δ_i(2), …`. Starting from
//! a pre-allocation, the allocator repeatedly takes the smallest next
//! increment across all queues (lowest index on ties) until `M` units are
//! placed. When every `δ_i` is non-decreasing in `k` the resulting allocation
//! minimizes `Σ_i Σ_{k = c_{i,0}+1}^{c_i} δ_i(k)` over all allocations with
//! `c_i ≥ c_{i,0}` and `Σ c_i = M`. For non-monotone increments the loop
//! still runs but no optimality is claimed.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::types::Preallocation;

/// Source of increments and pre-allocations for [`greedy_allocate`].
pub trait DeltaSource<T: Scalar> {
    /// Number of queues.
    fn len(&self) -> usize;

    /// Cost of taking the `k`-th unit (1-based) at index `i`.
    fn delta(&self, i: usize, k: usize) -> T;

    /// Units fixed at index `i` before the loop.
    fn prealloc(&self, i: usize) -> usize {
        let _ = i;
        0
    }

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Final allocation and the sum of the increments that were selected.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationResult<T> {
    pub counts: Vec<usize>,
    pub prealloc: Preallocation,
    pub steps_taken: usize,
    pub cost_sum: T,
}

/// One selection of the greedy loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep<T> {
    /// 1-based step number.
    pub step: usize,
    pub index: usize,
    pub delta: T,
}

/// Increments given as explicit per-index tables. Steps past the end of a
/// table cost `+∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaTable<T> {
    pub tables: Vec<Vec<T>>,
    pub prealloc: Vec<usize>,
}

impl<T: Scalar> DeltaTable<T> {
    pub fn new(tables: Vec<Vec<T>>) -> Self {
        let prealloc = vec![0; tables.len()];
        Self { tables, prealloc }
    }

    pub fn with_prealloc(mut self, prealloc: Vec<usize>) -> Self {
        assert_eq!(prealloc.len(), self.tables.len());
        self.prealloc = prealloc;
        self
    }
}

impl<T: Scalar> DeltaSource<T> for DeltaTable<T> {
    fn len(&self) -> usize {
        self.tables.len()
    }

    fn delta(&self, i: usize, k: usize) -> T {
        self.tables[i].get(k - 1).copied().unwrap_or_else(T::infinity)
    }

    fn prealloc(&self, i: usize) -> usize {
        self.prealloc[i]
    }
}

/// Heap entry ordered by `(delta, index)`. NaN never enters the heap.
#[derive(Debug, Clone, Copy)]
struct Candidate<T> {
    delta: T,
    index: usize,
}

impl<T: Scalar> PartialEq for Candidate<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Candidate<T> {}

impl<T: Scalar> PartialOrd for Candidate<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Candidate<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.delta
            .partial_cmp(&other.delta)
            .expect("NaN deltas are rejected before insertion")
            .then(self.index.cmp(&other.index))
    }
}

fn checked_delta<T: Scalar, S: DeltaSource<T> + ?Sized>(
    source: &S,
    index: usize,
    k: usize,
) -> Result<Candidate<T>> {
    let delta = source.delta(index, k);
    if delta.is_nan() {
        return Err(Error::NonFiniteDelta { index, k });
    }
    Ok(Candidate { delta, index })
}

fn run<T, S, F>(source: &S, precision: usize, mut on_step: F) -> Result<AllocationResult<T>>
where
    T: Scalar,
    S: DeltaSource<T> + ?Sized,
    F: FnMut(TraceStep<T>),
{
    let n = source.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let prealloc = Preallocation((0..n).map(|i| source.prealloc(i)).collect());
    prealloc.check(precision)?;
    let steps = precision - prealloc.total();
    let mut counts = prealloc.0.clone();
    let mut cost_sum = T::zero();

    if steps > 0 {
        let initial = (0..n)
            .map(|i| checked_delta(source, i, counts[i] + 1).map(Reverse))
            .collect::<Result<Vec<_>>>()?;
        let mut heap = BinaryHeap::from(initial);
        for step in 1..=steps {
            let Reverse(best) = heap.pop().expect("one candidate per index");
            counts[best.index] += 1;
            cost_sum = cost_sum + best.delta;
            on_step(TraceStep { step, index: best.index, delta: best.delta });
            if step < steps {
                heap.push(Reverse(checked_delta(source, best.index, counts[best.index] + 1)?));
            }
        }
    }

    Ok(AllocationResult { counts, prealloc, steps_taken: steps, cost_sum })
}

/// Places `precision` units greedily, starting from the source's
/// pre-allocation.
pub fn greedy_allocate<T, S>(source: &S, precision: usize) -> Result<AllocationResult<T>>
where
    T: Scalar,
    S: DeltaSource<T> + ?Sized,
{
    run(source, precision, |_| {})
}

/// The sequence of selections [`greedy_allocate`] makes, in order.
pub fn selection_trace<T, S>(source: &S, precision: usize) -> Result<Vec<TraceStep<T>>>
where
    T: Scalar,
    S: DeltaSource<T> + ?Sized,
{
    let mut trace = Vec::new();
    run(source, precision, |s| trace.push(s))?;
    Ok(trace)
}

/// Rebuilds final counts from a pre-allocation and a trace.
pub fn replay_trace<T>(prealloc: &Preallocation, trace: &[TraceStep<T>]) -> Vec<usize> {
    let mut counts = prealloc.0.clone();
    for s in trace {
        counts[s.index] += 1;
    }
    counts
}
