//! Probabilistic feedback graphs.
//!
//! A [`ProbGraph`] is a directed graph on `K` arms whose edges carry
//! independent per-round triggering probabilities in `(0, 1]`. Each round the
//! environment draws an [`EdgeRealization`] (every edge live independently
//! with its probability); the realization determines which arms are observed
//! under one-step or cascade triggering. [`ConnectionMatrix`] holds the
//! probabilities that a realization contains a directed path of length >= 1
//! between each ordered pair, either enumerated exactly on tiny graphs or
//! estimated by Monte-Carlo sampling.

use rand::distr::{Distribution, StandardUniform};
use rand::Rng;
use std::collections::HashSet;
use std::fmt;
use thiserror::Error;

use crate::Real;

/// Exact connection-probability enumeration walks all `2^|E|` edge subsets;
/// beyond this many edges the cost is unreasonable and callers must sample.
pub const ENUMERATION_LIMIT: usize = 20;

/// A directed edge with its triggering probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge<T> {
    pub src: usize,
    pub dst: usize,
    pub prob: T,
}

/// Structural errors raised while building or enumerating a graph.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("graph must have at least one arm")]
    NoArms,
    #[error("edge ({src}, {dst}) references an arm outside 0..{num_arms}")]
    IndexOutOfRange {
        src: usize,
        dst: usize,
        num_arms: usize,
    },
    #[error("edge ({src}, {dst}) has probability {prob} outside (0, 1]")]
    InvalidProbability { src: usize, dst: usize, prob: f64 },
    #[error("duplicate edge ({src}, {dst})")]
    DuplicateEdge { src: usize, dst: usize },
    #[error("exact enumeration is limited to {limit} edges, graph has {edges}")]
    TooManyEdges { edges: usize, limit: usize },
}

/// One observability or probability violation found by [`ProbGraph::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// The arm has no incoming edge, so no play can ever observe it.
    UnobservableArm(usize),
    /// Edge probability escaped `(0, 1]` (cannot happen through the
    /// constructor, kept so the report covers the full contract).
    BadProbability { src: usize, dst: usize, prob: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnobservableArm(j) => write!(f, "arm {j} has no incoming edge"),
            Violation::BadProbability { src, dst, prob } => {
                write!(f, "edge ({src}, {dst}) has probability {prob} outside (0, 1]")
            }
        }
    }
}

/// Everything wrong with a graph, one entry per violation.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid feedback graph: ")?;
        for (n, v) in self.violations.iter().enumerate() {
            if n > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Directed feedback graph with per-edge triggering probabilities.
///
/// Immutable after construction and safe to share across threads. Sampling
/// takes an explicit random stream; concurrent callers must use independent
/// streams.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbGraph<T> {
    num_arms: usize,
    edges: Vec<Edge<T>>,
    out: Vec<Vec<(usize, T)>>,
    incoming: Vec<Vec<(usize, T)>>,
}

impl<T: Real> ProbGraph<T> {
    /// Builds a graph from `(src, dst, prob)` triples. Rejects out-of-range
    /// indices, probabilities outside `(0, 1]`, and duplicate ordered pairs
    /// (duplicates are configuration errors, never merged). Observability is
    /// checked separately by [`validate`](Self::validate).
    pub fn new(
        num_arms: usize,
        edges: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Result<Self, GraphError> {
        if num_arms == 0 {
            return Err(GraphError::NoArms);
        }
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        let mut out = vec![Vec::new(); num_arms];
        let mut incoming = vec![Vec::new(); num_arms];
        for (src, dst, prob) in edges {
            if src >= num_arms || dst >= num_arms {
                return Err(GraphError::IndexOutOfRange { src, dst, num_arms });
            }
            if !(prob.is_finite() && prob > T::zero() && prob <= T::one()) {
                return Err(GraphError::InvalidProbability {
                    src,
                    dst,
                    prob: prob.to_f64().unwrap_or(f64::NAN),
                });
            }
            if !seen.insert((src, dst)) {
                return Err(GraphError::DuplicateEdge { src, dst });
            }
            list.push(Edge { src, dst, prob });
            out[src].push((dst, prob));
            incoming[dst].push((src, prob));
        }
        for adj in out.iter_mut().chain(incoming.iter_mut()) {
            adj.sort_by_key(|&(n, _)| n);
        }
        Ok(Self {
            num_arms,
            edges: list,
            out,
            incoming,
        })
    }

    pub fn num_arms(&self) -> usize {
        self.num_arms
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    /// Out-edges of `i` as `(dst, prob)`, sorted by destination.
    pub fn out_edges(&self, i: usize) -> &[(usize, T)] {
        &self.out[i]
    }

    /// In-edges of `j` as `(src, prob)`, sorted by source.
    pub fn in_edges(&self, j: usize) -> &[(usize, T)] {
        &self.incoming[j]
    }

    /// The common edge probability, if every edge carries the same one.
    pub fn uniform_prob(&self) -> Option<T> {
        let first = self.edges.first()?.prob;
        self.edges
            .iter()
            .all(|e| e.prob == first)
            .then_some(first)
    }

    /// Checks the observability assumption: every arm needs at least one
    /// incoming edge. Returns a report naming every violating arm.
    pub fn validate(&self) -> Result<(), ValidationReport> {
        let mut violations = Vec::new();
        for j in 0..self.num_arms {
            if self.incoming[j].is_empty() {
                violations.push(Violation::UnobservableArm(j));
            }
        }
        for e in &self.edges {
            if !(e.prob > T::zero() && e.prob <= T::one()) {
                violations.push(Violation::BadProbability {
                    src: e.src,
                    dst: e.dst,
                    prob: e.prob.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ValidationReport { violations })
        }
    }

    /// Draws one realization: each edge is live independently with its
    /// probability. Deterministic given the stream state.
    pub fn sample_realization<R: Rng + ?Sized>(&self, rng: &mut R) -> EdgeRealization
    where
        StandardUniform: Distribution<T>,
    {
        let mut live = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let u: T = rng.random();
            if u < e.prob {
                live.push((e.src, e.dst));
            }
        }
        EdgeRealization {
            num_arms: self.num_arms,
            edges: live,
        }
    }

    /// Probability that a realization contains a directed path (of length
    /// one or more) from `i` to `j`, for every ordered pair, by exhaustive
    /// enumeration of edge subsets. Exact to floating precision; refuses
    /// graphs above [`ENUMERATION_LIMIT`] edges.
    pub fn exact_connection_matrix(&self) -> Result<ConnectionMatrix<T>, GraphError> {
        let m = self.edges.len();
        if m > ENUMERATION_LIMIT {
            return Err(GraphError::TooManyEdges {
                edges: m,
                limit: ENUMERATION_LIMIT,
            });
        }
        let k = self.num_arms;
        let mut data = vec![T::zero(); k * k];
        let mut adj = vec![Vec::new(); k];
        for mask in 0u32..(1u32 << m) {
            let mut weight = T::one();
            for (idx, e) in self.edges.iter().enumerate() {
                let live = mask & (1 << idx) != 0;
                weight = weight * if live { e.prob } else { T::one() - e.prob };
            }
            if weight == T::zero() {
                continue;
            }
            for a in adj.iter_mut() {
                a.clear();
            }
            for (idx, e) in self.edges.iter().enumerate() {
                if mask & (1 << idx) != 0 {
                    adj[e.src].push(e.dst);
                }
            }
            for i in 0..k {
                for j in reach_from(&adj, i) {
                    data[i * k + j] = data[i * k + j] + weight;
                }
            }
        }
        // Summation can overshoot 1 by an ulp on probability-one entries.
        for v in data.iter_mut() {
            *v = v.min(T::one());
        }
        Ok(ConnectionMatrix { k, data })
    }

    /// Monte-Carlo estimate of the connection matrix from `samples`
    /// realizations. Entry `(i, j)` is the fraction of realizations with a
    /// directed path `i -> j`; by Hoeffding all entries are within
    /// `sqrt(ln(2 K^2 / delta) / (2 samples))` of the truth simultaneously
    /// with probability `1 - delta`.
    pub fn estimate_connection_matrix<R: Rng + ?Sized>(
        &self,
        samples: u64,
        rng: &mut R,
    ) -> ConnectionMatrix<T>
    where
        StandardUniform: Distribution<T>,
    {
        assert!(samples >= 1, "need at least one sample");
        let k = self.num_arms;
        let mut counts = vec![0u64; k * k];
        let mut adj = vec![Vec::new(); k];
        for _ in 0..samples {
            let realization = self.sample_realization(rng);
            for a in adj.iter_mut() {
                a.clear();
            }
            for &(s, d) in &realization.edges {
                adj[s].push(d);
            }
            for i in 0..k {
                for j in reach_from(&adj, i) {
                    counts[i * k + j] += 1;
                }
            }
        }
        let total = T::from_u64(samples).expect("sample count fits the scalar");
        let data = counts
            .iter()
            .map(|&c| T::from_u64(c).expect("count fits the scalar") / total)
            .collect();
        ConnectionMatrix { k, data }
    }
}

/// Arms reachable from `start` by a path of length >= 1 over `adj`,
/// ascending. `start` itself appears only when a directed cycle returns
/// to it.
fn reach_from(adj: &[Vec<usize>], start: usize) -> Vec<usize> {
    let mut seen = vec![false; adj.len()];
    let mut stack = Vec::new();
    for &d in &adj[start] {
        if !seen[d] {
            seen[d] = true;
            stack.push(d);
        }
    }
    while let Some(u) = stack.pop() {
        for &w in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    (0..adj.len()).filter(|&j| seen[j]).collect()
}

/// The subset of edges that came up live in one round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRealization {
    num_arms: usize,
    edges: Vec<(usize, usize)>,
}

impl EdgeRealization {
    /// Builds a realization directly from live ordered pairs (tests and
    /// oracles). Pairs must reference arms in `0..num_arms`.
    pub fn from_edges(num_arms: usize, edges: Vec<(usize, usize)>) -> Self {
        assert!(
            edges.iter().all(|&(s, d)| s < num_arms && d < num_arms),
            "live edge out of range"
        );
        Self { num_arms, edges }
    }

    pub fn num_arms(&self) -> usize {
        self.num_arms
    }

    pub fn live_edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Arms observed when playing `arm` under one-step triggering: exactly
    /// the heads of live out-edges of `arm`. The played arm shows up only
    /// through a live self-loop. Ascending order.
    pub fn one_step_observed(&self, arm: usize) -> Vec<usize> {
        assert!(arm < self.num_arms, "arm out of range");
        let mut obs: Vec<usize> = self
            .edges
            .iter()
            .filter(|&&(s, _)| s == arm)
            .map(|&(_, d)| d)
            .collect();
        obs.sort_unstable();
        obs.dedup();
        obs
    }

    /// Arms observed when playing `arm` under cascade triggering: every arm
    /// reachable from `arm` by a live directed path of length >= 1. The
    /// played arm shows up only through a live directed cycle. Ascending
    /// order.
    pub fn cascade_observed(&self, arm: usize) -> Vec<usize> {
        assert!(arm < self.num_arms, "arm out of range");
        let mut adj = vec![Vec::new(); self.num_arms];
        for &(s, d) in &self.edges {
            adj[s].push(d);
        }
        reach_from(&adj, arm)
    }
}

/// How a connection matrix was produced; the cascade lower bound records
/// it because the exact value is intractable in general.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConnectionSource {
    Exact,
    MonteCarlo { samples: u64 },
}

impl fmt::Display for ConnectionSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConnectionSource::Exact => write!(f, "exact"),
            ConnectionSource::MonteCarlo { samples } => write!(f, "monte-carlo({samples})"),
        }
    }
}

/// `K x K` matrix of path-connection probabilities; entry `(i, j)` is the
/// probability (or an estimate of it) that a realization contains a directed
/// path of length >= 1 from `i` to `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionMatrix<T> {
    k: usize,
    data: Vec<T>,
}

impl<T: Real> ConnectionMatrix<T> {
    /// Wraps row-major entries; every entry must lie in `[0, 1]`.
    pub fn new(k: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), k * k, "entry count must be K*K");
        assert!(
            data.iter().all(|v| *v >= T::zero() && *v <= T::one()),
            "entries must lie in [0, 1]"
        );
        Self { k, data }
    }

    pub fn identity(k: usize) -> Self {
        let mut data = vec![T::zero(); k * k];
        for i in 0..k {
            data[i * k + i] = T::one();
        }
        Self { k, data }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.k + j]
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    /// Zeroes every entry `<= eta` and keeps the rest unchanged. Idempotent
    /// at fixed `eta`. Accepts `eta` up to and including 1 so that schedule
    /// values at round one (`eta(1) = 1`) compose; at 1 everything is zeroed.
    pub fn thresholded(&self, eta: T) -> Self {
        assert!(
            eta >= T::zero() && eta <= T::one(),
            "threshold must lie in [0, 1]"
        );
        let data = self
            .data
            .iter()
            .map(|&v| if v <= eta { T::zero() } else { v })
            .collect();
        Self { k: self.k, data }
    }

    /// Largest absolute entrywise difference to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.k, other.k, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max)
    }
}
