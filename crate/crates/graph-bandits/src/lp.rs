//! Exploration-rate constraint systems and a dense simplex solver.
//!
//! An [`LpInstance`] is the feasibility system
//!
//! ```text
//!     sum_i P[i][j] * c_i >= b_j   for every constraint j,    c >= 0,
//! ```
//!
//! minimized against the gap vector `delta`. Column `j` asks for enough
//! observation rate on arm `j` to separate it from the best arm; the
//! right-hand side is `1/KL` or `1/gap^2` depending on [`RhsMode`]. The
//! solver is a dense two-phase simplex with Bland's rule, which keeps ties
//! deterministic and cannot cycle; instance sizes here are tiny.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{self, Family};
use crate::graph::{ConnectionMatrix, ProbGraph};
use crate::Real;

/// Pivot and reduced-cost tolerance of the simplex.
pub const PIVOT_TOLERANCE: f64 = 1e-9;

/// Right-hand-side convention for the constraint system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhsMode {
    /// `b_j = 1 / KL(theta_j, theta_best)` — the lower-bound form.
    InverseKl,
    /// `b_j = 1 / gap_j^2` — the form the cascade policy optimizes.
    InverseGapSquared,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("constraint system needs at least 2 arms, got {0}")]
    TooFewArms(usize),
    #[error("theta has {theta} entries but the system has {expected} arms")]
    ThetaLengthMismatch { theta: usize, expected: usize },
    #[error("constraint column {constraint} has no positive coefficient (unobservable node)")]
    InfeasibleColumn { constraint: usize },
    #[error("constraint {constraint} has a non-finite right-hand side")]
    NonFiniteRhs { constraint: usize },
    #[error("kl evaluation failed: {0}")]
    Kl(#[from] env::EnvError),
    #[error("simplex failed: {0}")]
    Numerical(String),
}

/// One constraint system: coefficients, right-hand sides, objective costs,
/// and the best-arm index whose constraint borrows the second-best gap.
///
/// `coeff(i, j)` multiplies variable `c_i` in constraint `j`; `b` is indexed
/// by constraint (node to observe) and `delta` by variable (node to play).
#[derive(Debug, Clone, PartialEq)]
pub struct LpInstance<T> {
    k: usize,
    coeffs: Vec<T>,
    b: Vec<T>,
    delta: Vec<T>,
    best: usize,
}

impl<T: Real> LpInstance<T> {
    /// Assembles an instance from row-major coefficients (`coeffs[i*k+j]`
    /// multiplies `c_i` in constraint `j`). Coefficients must lie in
    /// `[0, 1]`, costs must be nonnegative, and right-hand sides positive
    /// (`+inf` is allowed and makes the constraint unsatisfiable).
    pub fn new(coeffs: Vec<T>, b: Vec<T>, delta: Vec<T>, best: usize) -> Self {
        let k = b.len();
        assert_eq!(coeffs.len(), k * k, "coefficient matrix must be K*K");
        assert_eq!(delta.len(), k, "delta length mismatch");
        assert!(best < k, "best index out of range");
        assert!(
            coeffs
                .iter()
                .all(|&v| v >= T::zero() && v <= T::one()),
            "coefficients must lie in [0, 1]"
        );
        assert!(delta.iter().all(|&v| v >= T::zero()), "negative cost");
        assert!(b.iter().all(|&v| v > T::zero()), "rhs must be positive");
        Self {
            k,
            coeffs,
            b,
            delta,
            best,
        }
    }

    pub fn num_arms(&self) -> usize {
        self.k
    }

    /// Coefficient of variable `i` in constraint `j`.
    pub fn coeff(&self, i: usize, j: usize) -> T {
        self.coeffs[i * self.k + j]
    }

    pub fn rhs(&self) -> &[T] {
        &self.b
    }

    pub fn costs(&self) -> &[T] {
        &self.delta
    }

    pub fn best(&self) -> usize {
        self.best
    }

    /// Left-hand side of constraint `j` at rates `c`.
    pub fn constraint_lhs(&self, j: usize, c: &[T]) -> T {
        (0..self.k).fold(T::zero(), |acc, i| acc + self.coeff(i, j) * c[i])
    }

    /// Returns a copy with one coefficient replaced (test and robustness
    /// probes).
    pub fn with_coeff(&self, i: usize, j: usize, value: T) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs[i * self.k + j] = value;
        Self::new(coeffs, self.b.clone(), self.delta.clone(), self.best)
    }

    /// Returns a copy with the right-hand side scaled by `lambda > 0`.
    pub fn with_scaled_rhs(&self, lambda: T) -> Self {
        assert!(lambda > T::zero());
        let b = self.b.iter().map(|&v| v * lambda).collect();
        Self::new(self.coeffs.clone(), b, self.delta.clone(), self.best)
    }
}

/// Builds the right-hand sides and costs shared by both constraint builders.
///
/// Gaps below `gap_floor` are lifted to `gap_floor` before the right-hand
/// sides are formed, so ties in the mean estimates keep the system bounded.
/// The cost of the best arm itself stays exactly zero.
fn rhs_and_costs<T: Real>(
    theta: &[T],
    family: Family,
    mode: RhsMode,
    gap_floor: T,
) -> Result<(Vec<T>, Vec<T>, usize), LpError> {
    let k = theta.len();
    if k < 2 {
        return Err(LpError::TooFewArms(k));
    }
    let best = env::argmax(theta);
    let mut second = usize::MAX;
    for j in 0..k {
        if j != best && (second == usize::MAX || theta[j] > theta[second]) {
            second = j;
        }
    }
    let mut b = Vec::with_capacity(k);
    let mut delta = Vec::with_capacity(k);
    for j in 0..k {
        let gap = theta[best] - theta[j];
        delta.push(if j == best {
            T::zero()
        } else {
            gap.max(gap_floor)
        });
        let target = if j == best { second } else { j };
        let floored = (theta[best] - theta[target]).max(gap_floor);
        let rhs = match mode {
            RhsMode::InverseKl => {
                let div = env::kl(family, theta[best] - floored, theta[best])?;
                T::one() / div
            }
            RhsMode::InverseGapSquared => T::one() / (floored * floored),
        };
        if !rhs.is_finite() {
            return Err(LpError::NonFiniteRhs { constraint: j });
        }
        b.push(rhs);
    }
    Ok((b, delta, best))
}

/// Constraint system for one-step triggering: coefficient `(i, j)` is the
/// edge probability `p_ij` when the edge exists and zero otherwise.
pub fn build_one_step_constraints<T: Real>(
    graph: &ProbGraph<T>,
    theta: &[T],
    family: Family,
    mode: RhsMode,
    gap_floor: T,
) -> Result<LpInstance<T>, LpError> {
    let k = graph.num_arms();
    if theta.len() != k {
        return Err(LpError::ThetaLengthMismatch {
            theta: theta.len(),
            expected: k,
        });
    }
    let (b, delta, best) = rhs_and_costs(theta, family, mode, gap_floor)?;
    let mut coeffs = vec![T::zero(); k * k];
    for e in graph.edges() {
        coeffs[e.src * k + e.dst] = e.prob;
    }
    Ok(LpInstance {
        k,
        coeffs,
        b,
        delta,
        best,
    })
}

/// Constraint system for cascade triggering: coefficients come from a
/// (true, enumerated, or thresholded Monte-Carlo) connection matrix.
pub fn build_cascade_constraints<T: Real>(
    connection: &ConnectionMatrix<T>,
    theta: &[T],
    family: Family,
    mode: RhsMode,
    gap_floor: T,
) -> Result<LpInstance<T>, LpError> {
    let k = connection.k();
    if theta.len() != k {
        return Err(LpError::ThetaLengthMismatch {
            theta: theta.len(),
            expected: k,
        });
    }
    let (b, delta, best) = rhs_and_costs(theta, family, mode, gap_floor)?;
    Ok(LpInstance {
        k,
        coeffs: connection.entries().to_vec(),
        b,
        delta,
        best,
    })
}

/// Whether the nonnegative rate vector `c` satisfies every constraint:
/// `sum_i P[i][j] c_i >= b_j` for all `j`. An infinite right-hand side is
/// never satisfied.
pub fn is_member<T: Real>(instance: &LpInstance<T>, c: &[T]) -> bool {
    assert_eq!(c.len(), instance.k, "rate vector length mismatch");
    debug_assert!(c.iter().all(|&v| v >= T::zero()), "rates must be >= 0");
    (0..instance.k).all(|j| instance.constraint_lhs(j, c) >= instance.b[j])
}

/// An optimal rate vector and its objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub c: Vec<T>,
    pub value: T,
}

/// Minimizes `<delta, c>` over the feasible set. Requires every constraint
/// column to own at least one strictly positive coefficient; an all-zero
/// column is reported as [`LpError::InfeasibleColumn`] with its index. The
/// returned vector always passes [`is_member`] and ties between optimal
/// vertices resolve deterministically through Bland's rule.
pub fn solve<T: Real>(instance: &LpInstance<T>) -> Result<LpSolution<T>, LpError> {
    let k = instance.k;
    for j in 0..k {
        if !instance.b[j].is_finite() {
            return Err(LpError::NonFiniteRhs { constraint: j });
        }
        if !(0..k).any(|i| instance.coeff(i, j) > T::zero()) {
            return Err(LpError::InfeasibleColumn { constraint: j });
        }
    }
    let mut c = simplex_min(instance)?;
    for v in c.iter_mut() {
        *v = v.max(T::zero());
    }
    // A vertex solution can miss tight constraints by accumulated rounding;
    // the coefficients are nonnegative, so scaling every rate up by the
    // worst measured shortfall restores membership while moving the value
    // by the same (machine-precision) relative amount.
    let safety = T::one() + T::epsilon() * T::from_f64(4.0).expect("constant");
    let mut tries = 0;
    while !is_member(instance, &c) {
        let mut worst = T::one();
        for j in 0..k {
            let lhs = instance.constraint_lhs(j, &c);
            if lhs < instance.b[j] {
                if lhs <= T::zero() {
                    return Err(LpError::Numerical(format!(
                        "solver output leaves constraint {j} uncovered"
                    )));
                }
                worst = worst.max(instance.b[j] / lhs);
            }
        }
        let factor = worst * safety;
        for v in c.iter_mut() {
            *v = *v * factor;
        }
        tries += 1;
        if tries > 50 {
            return Err(LpError::Numerical(
                "could not certify feasibility of the solver output".into(),
            ));
        }
    }
    let value = c
        .iter()
        .zip(instance.costs())
        .fold(T::zero(), |acc, (&ci, &di)| acc + ci * di);
    Ok(LpSolution { c, value })
}

/// Dense two-phase primal simplex on
/// `min <delta, c>  s.t.  A c - s = b,  c, s >= 0`
/// with one artificial variable per row for the starting basis.
fn simplex_min<T: Real>(instance: &LpInstance<T>) -> Result<Vec<T>, LpError> {
    let k = instance.k;
    let tol = T::from_f64(PIVOT_TOLERANCE).expect("tolerance fits the scalar");

    // Rows with b_j <= 0 are vacuous for c >= 0 and nonnegative coefficients.
    let rows: Vec<usize> = (0..k).filter(|&j| instance.b[j] > T::zero()).collect();
    let m = rows.len();
    if m == 0 {
        return Ok(vec![T::zero(); k]);
    }

    let surplus = k; // columns [k, k+m)
    let artificial = k + m; // columns [k+m, k+2m)
    let ncols = k + 2 * m;

    // tableau[r] = coefficients followed by the right-hand side.
    let mut tab = vec![vec![T::zero(); ncols + 1]; m];
    let mut basis = vec![0usize; m];
    for (r, &j) in rows.iter().enumerate() {
        for i in 0..k {
            tab[r][i] = instance.coeff(i, j);
        }
        tab[r][surplus + r] = -T::one();
        tab[r][artificial + r] = T::one();
        tab[r][ncols] = instance.b[j];
        basis[r] = artificial + r;
    }

    // Phase 1: minimize the artificial sum.
    let mut phase1_costs = vec![T::zero(); ncols];
    for col in artificial..ncols {
        phase1_costs[col] = T::one();
    }
    run_simplex(&mut tab, &mut basis, &phase1_costs, tol, |_| true)?;
    let infeasibility = basis
        .iter()
        .enumerate()
        .filter(|&(_, &bv)| bv >= artificial)
        .map(|(r, _)| tab[r][ncols])
        .fold(T::zero(), |acc, v| acc + v.max(T::zero()));
    if infeasibility > tol * T::from_f64(1e3).expect("scale fits") {
        // Unreachable after the all-zero-column pre-check; kept as a guard.
        return Err(LpError::Numerical(format!(
            "phase 1 left infeasibility {infeasibility}"
        )));
    }

    // Drive leftover artificial variables out of the basis where possible.
    for r in 0..m {
        if basis[r] >= artificial {
            if let Some(col) = (0..artificial).find(|&c| tab[r][c].abs() > tol) {
                pivot(&mut tab, &mut basis, r, col);
            }
        }
    }

    // Phase 2: minimize the real objective, artificial columns locked out.
    let mut phase2_costs = vec![T::zero(); ncols];
    phase2_costs[..k].copy_from_slice(instance.costs());
    run_simplex(&mut tab, &mut basis, &phase2_costs, tol, |col| {
        col < artificial
    })?;

    // Re-solve the final basic system against the original data; the long
    // pivot chain accumulates error, a fresh factorization does not.
    if let Some(values) = refactor_basis(instance, &rows, &basis, surplus, artificial) {
        let mut c = vec![T::zero(); k];
        for (&bv, &x) in basis.iter().zip(&values) {
            if bv < k {
                c[bv] = x;
            }
        }
        return Ok(c);
    }
    let mut c = vec![T::zero(); k];
    for (r, &bv) in basis.iter().enumerate() {
        if bv < k {
            c[bv] = tab[r][ncols];
        }
    }
    Ok(c)
}

/// Solves `B x_B = b` for the basic variables of the final basis, built
/// from the original coefficients. Returns `None` when the basis matrix is
/// numerically singular (the caller then keeps the tableau values).
fn refactor_basis<T: Real>(
    instance: &LpInstance<T>,
    rows: &[usize],
    basis: &[usize],
    surplus: usize,
    artificial: usize,
) -> Option<Vec<T>> {
    let m = rows.len();
    let mut a = vec![vec![T::zero(); m + 1]; m];
    for (r, &j) in rows.iter().enumerate() {
        for (col, &bv) in basis.iter().enumerate() {
            a[r][col] = if bv < surplus {
                instance.coeff(bv, j)
            } else if bv < artificial {
                if bv - surplus == r {
                    -T::one()
                } else {
                    T::zero()
                }
            } else if bv - artificial == r {
                T::one()
            } else {
                T::zero()
            };
        }
        a[r][m] = instance.b[j];
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..m {
        let pivot_row = (col..m).max_by(|&x, &y| {
            a[x][col]
                .abs()
                .partial_cmp(&a[y][col].abs())
                .expect("finite")
        })?;
        if a[pivot_row][col].abs() <= T::from_f64(1e-12).expect("constant") {
            return None;
        }
        a.swap(col, pivot_row);
        for r in (col + 1)..m {
            let f = a[r][col] / a[col][col];
            if f != T::zero() {
                for c in col..=m {
                    let delta = f * a[col][c];
                    a[r][c] = a[r][c] - delta;
                }
            }
        }
    }
    let mut x = vec![T::zero(); m];
    for col in (0..m).rev() {
        let mut acc = a[col][m];
        for c in (col + 1)..m {
            acc = acc - a[col][c] * x[c];
        }
        x[col] = acc / a[col][col];
    }
    // Basic values must be nonnegative up to noise.
    for v in x.iter_mut() {
        if *v < T::zero() {
            if *v < -T::from_f64(1e-7).expect("constant") {
                return None;
            }
            *v = T::zero();
        }
    }
    Some(x)
}

/// Runs minimizing simplex iterations in place until optimality. Entering:
/// smallest column index with reduced cost below `-tol` (Bland). Leaving:
/// minimum ratio, ties to the smallest basis variable (Bland).
fn run_simplex<T: Real>(
    tab: &mut [Vec<T>],
    basis: &mut [usize],
    costs: &[T],
    tol: T,
    allowed: impl Fn(usize) -> bool,
) -> Result<(), LpError> {
    let m = basis.len();
    let ncols = costs.len();
    let max_pivots = 200 * (ncols + m);
    for _ in 0..max_pivots {
        // Reduced costs: costs[col] - sum_r costs[basis[r]] * tab[r][col].
        let mut entering = None;
        for col in 0..ncols {
            if !allowed(col) || basis.contains(&col) {
                continue;
            }
            let mut reduced = costs[col];
            for r in 0..m {
                let cb = costs[basis[r]];
                if cb != T::zero() {
                    reduced = reduced - cb * tab[r][col];
                }
            }
            if reduced < -tol {
                entering = Some(col);
                break;
            }
        }
        let Some(pcol) = entering else {
            return Ok(());
        };

        let mut leaving: Option<(usize, T)> = None;
        for r in 0..m {
            let a = tab[r][pcol];
            if a > tol {
                let ratio = tab[r][ncols] / a;
                let better = match leaving {
                    None => true,
                    Some((lr, lratio)) => {
                        ratio < lratio || (ratio == lratio && basis[r] < basis[lr])
                    }
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
        }
        let Some((prow, _)) = leaving else {
            // Cannot happen: the objective is bounded below by zero.
            return Err(LpError::Numerical("unbounded direction".into()));
        };
        pivot(tab, basis, prow, pcol);
    }
    Err(LpError::Numerical("pivot limit exceeded".into()))
}

fn pivot<T: Real>(tab: &mut [Vec<T>], basis: &mut [usize], prow: usize, pcol: usize) {
    let ncols = tab[prow].len();
    let p = tab[prow][pcol];
    for v in tab[prow].iter_mut() {
        *v = *v / p;
    }
    for r in 0..tab.len() {
        if r == prow {
            continue;
        }
        let factor = tab[r][pcol];
        if factor != T::zero() {
            for col in 0..ncols {
                let delta = factor * tab[prow][col];
                tab[r][col] = tab[r][col] - delta;
            }
            tab[r][pcol] = T::zero();
        }
    }
    basis[prow] = pcol;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ConnectionMatrix;

    fn self_loop_bandit() -> (ProbGraph<f64>, Vec<f64>) {
        let g = ProbGraph::new(3, [(0, 0, 1.0f64), (1, 1, 1.0), (2, 2, 1.0)]).unwrap();
        (g, vec![0.9, 0.7, 0.5])
    }

    #[test]
    fn bandit_instance_matches_closed_form() {
        let (g, theta) = self_loop_bandit();
        let inst = build_one_step_constraints(
            &g,
            &theta,
            Family::GaussianUnitVariance,
            RhsMode::InverseKl,
            1e-6,
        )
        .unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_eq!(inst.coeff(i, j), expected);
            }
        }
        let b = inst.rhs();
        assert!((b[0] - 50.0).abs() < 1e-9);
        assert!((b[1] - 50.0).abs() < 1e-9);
        assert!((b[2] - 12.5).abs() < 1e-9);
        assert_eq!(inst.costs()[0], 0.0);
        assert!((inst.costs()[1] - 0.2).abs() < 1e-12);
        assert!((inst.costs()[2] - 0.4).abs() < 1e-12);
        assert_eq!(inst.best(), 0);
    }

    #[test]
    fn tied_means_clamp_to_finite_rhs() {
        let (g, _) = self_loop_bandit();
        let inst = build_one_step_constraints(
            &g,
            &[0.5f64, 0.5, 0.5],
            Family::GaussianUnitVariance,
            RhsMode::InverseKl,
            1e-6,
        )
        .unwrap();
        assert!(inst.rhs().iter().all(|v| v.is_finite()));
        // All gaps clamped to the floor: 1/KL = 2/floor^2, up to the
        // cancellation noise of forming (best - floor) - best.
        let expected = 2.0 / (1e-6f64 * 1e-6);
        for &v in inst.rhs() {
            assert!((v - expected).abs() / expected < 1e-8);
        }
    }

    #[test]
    fn single_arm_is_rejected() {
        let g = ProbGraph::new(1, [(0, 0, 1.0f64)]).unwrap();
        assert!(matches!(
            build_one_step_constraints(
                &g,
                &[0.5],
                Family::GaussianUnitVariance,
                RhsMode::InverseKl,
                1e-6
            ),
            Err(LpError::TooFewArms(1))
        ));
    }

    #[test]
    fn cycle6_coefficients_follow_the_edges() {
        let probs = [0.7, 0.4, 0.7, 0.3, 0.9, 0.1];
        let g = ProbGraph::new(6, (0..6).map(|i| (i, (i + 1) % 6, probs[i]))).unwrap();
        let theta = [0.7f64, 0.5, 0.5, 0.5, 0.5, 0.5];
        let inst = build_one_step_constraints(
            &g,
            &theta,
            Family::GaussianUnitVariance,
            RhsMode::InverseKl,
            1e-6,
        )
        .unwrap();
        let mut nonzero = 0;
        for i in 0..6 {
            for j in 0..6 {
                let v = inst.coeff(i, j);
                if v != 0.0 {
                    nonzero += 1;
                    assert_eq!(j, (i + 1) % 6);
                    assert_eq!(v, probs[i]);
                }
            }
        }
        assert_eq!(nonzero, 6);
    }

    #[test]
    fn identity_connection_reduces_to_bandit() {
        let (g, theta) = self_loop_bandit();
        let one_step = build_one_step_constraints(
            &g,
            &theta,
            Family::GaussianUnitVariance,
            RhsMode::InverseKl,
            1e-6,
        )
        .unwrap();
        let cascade = build_cascade_constraints(
            &ConnectionMatrix::identity(3),
            &theta,
            Family::GaussianUnitVariance,
            RhsMode::InverseKl,
            1e-6,
        )
        .unwrap();
        assert_eq!(one_step, cascade);
    }

    #[test]
    fn cycle6_connection_columns_are_fully_positive() {
        let probs = [0.7, 0.4, 0.7, 0.3, 0.9, 0.1];
        let g = ProbGraph::new(6, (0..6).map(|i| (i, (i + 1) % 6, probs[i]))).unwrap();
        let conn = g.exact_connection_matrix().unwrap();
        let inst = build_cascade_constraints(
            &conn,
            &[0.7f64, 0.5, 0.5, 0.5, 0.5, 0.5],
            Family::GaussianUnitVariance,
            RhsMode::InverseKl,
            1e-6,
        )
        .unwrap();
        for j in 0..6 {
            let positive = (0..6).filter(|&i| inst.coeff(i, j) > 0.0).count();
            assert_eq!(positive, 6, "column {j}");
        }
    }

    #[test]
    fn membership_examples() {
        let (g, theta) = self_loop_bandit();
        let inst = build_one_step_constraints(
            &g,
            &theta,
            Family::GaussianUnitVariance,
            RhsMode::InverseKl,
            1e-6,
        )
        .unwrap();
        assert!(!is_member(&inst, &[0.0, 0.0, 0.0]));
        assert!(is_member(&inst, &[50.0, 50.0, 12.5]));
        assert!(!is_member(&inst, &[50.0, 49.9, 12.5]));
        // Scaling every entry to the largest requirement satisfies an
        // identity system.
        assert!(is_member(&inst, &[50.0, 50.0, 50.0]));
    }

    #[test]
    fn membership_rejects_infinite_rhs() {
        let inst = LpInstance::new(
            vec![1.0f64, 0.0, 0.0, 1.0],
            vec![f64::INFINITY, 1.0],
            vec![0.0, 1.0],
            0,
        );
        assert!(!is_member(&inst, &[1e12, 1e12]));
        assert!(matches!(
            solve(&inst),
            Err(LpError::NonFiniteRhs { constraint: 0 })
        ));
    }

    #[test]
    fn solve_bandit_instance() {
        let (g, theta) = self_loop_bandit();
        let inst = build_one_step_constraints(
            &g,
            &theta,
            Family::GaussianUnitVariance,
            RhsMode::InverseKl,
            1e-6,
        )
        .unwrap();
        let sol = solve(&inst).unwrap();
        assert!((sol.value - 15.0).abs() < 1e-9, "{}", sol.value);
        for (got, want) in sol.c.iter().zip([50.0, 50.0, 12.5]) {
            assert!((got - want).abs() < 1e-9);
        }
        assert!(is_member(&inst, &sol.c));
    }

    #[test]
    fn free_best_arm_column_drives_value_to_zero() {
        // Best arm reaches everything with probability one: pouring rate on
        // the free variable satisfies the system at zero cost.
        let g = ProbGraph::new(
            3,
            [
                (0, 0, 1.0f64),
                (1, 1, 1.0),
                (2, 2, 1.0),
                (0, 1, 1.0),
                (0, 2, 1.0),
            ],
        )
        .unwrap();
        let inst = build_one_step_constraints(
            &g,
            &[0.9f64, 0.7, 0.5],
            Family::GaussianUnitVariance,
            RhsMode::InverseKl,
            1e-6,
        )
        .unwrap();
        let sol = solve(&inst).unwrap();
        assert!(sol.value.abs() < 1e-9, "{}", sol.value);
        assert!(sol.c[0] >= 50.0 - 1e-9);
    }

    #[test]
    fn rhs_scaling_scales_the_value() {
        let (g, theta) = self_loop_bandit();
        let inst = build_one_step_constraints(
            &g,
            &theta,
            Family::GaussianUnitVariance,
            RhsMode::InverseKl,
            1e-6,
        )
        .unwrap();
        let base = solve(&inst).unwrap();
        for lambda in [0.5f64, 2.0, 3.25] {
            let scaled = solve(&inst.with_scaled_rhs(lambda)).unwrap();
            assert!((scaled.value - lambda * base.value).abs() < 1e-8);
        }
    }

    #[test]
    fn all_zero_column_is_reported() {
        let inst = LpInstance::new(
            vec![1.0f64, 0.0, 0.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 0.5],
            0,
        );
        assert!(matches!(
            solve(&inst),
            Err(LpError::InfeasibleColumn { constraint: 1 })
        ));
    }

    #[test]
    fn inverse_gap_squared_halves_gaussian_rates() {
        let (g, theta) = self_loop_bandit();
        let kl_inst = build_one_step_constraints(
            &g,
            &theta,
            Family::GaussianUnitVariance,
            RhsMode::InverseKl,
            1e-6,
        )
        .unwrap();
        let sq_inst = build_one_step_constraints(
            &g,
            &theta,
            Family::GaussianUnitVariance,
            RhsMode::InverseGapSquared,
            1e-6,
        )
        .unwrap();
        for j in 0..3 {
            assert!((kl_inst.rhs()[j] - 2.0 * sq_inst.rhs()[j]).abs() < 1e-9);
        }
    }

    #[test]
    fn f32_solve_smoke() {
        let g = ProbGraph::new(2, [(0, 0, 1.0f32), (1, 1, 1.0)]).unwrap();
        let inst = build_one_step_constraints(
            &g,
            &[0.9f32, 0.5],
            Family::GaussianUnitVariance,
            RhsMode::InverseKl,
            1e-4,
        )
        .unwrap();
        let sol = solve(&inst).unwrap();
        // 1/KL = 2/0.16 = 12.5 on both constraints; value = 0.4 * 12.5.
        assert!((sol.value - 5.0).abs() < 1e-3);
    }
}
