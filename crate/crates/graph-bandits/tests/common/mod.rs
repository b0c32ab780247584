//! Independent oracles shared by the integration suites. Everything here
//! recomputes results from first principles and stays off the library's
//! solver and reachability paths.

use graph_bandits::graph::EdgeRealization;
use graph_bandits::lp::LpInstance;

/// Dense transitive closure of a realization by Floyd-Warshall; entry
/// `(i, j)` says a directed path of length >= 1 runs from `i` to `j`.
pub fn closure_oracle(realization: &EdgeRealization) -> Vec<Vec<bool>> {
    let k = realization.num_arms();
    let mut reach = vec![vec![false; k]; k];
    for &(s, d) in realization.live_edges() {
        reach[s][d] = true;
    }
    for mid in 0..k {
        for a in 0..k {
            if reach[a][mid] {
                for b in 0..k {
                    if reach[mid][b] {
                        reach[a][b] = true;
                    }
                }
            }
        }
    }
    reach
}

/// Solves the square system `m x = rhs` by Gaussian elimination with
/// partial pivoting. `None` when numerically singular.
fn solve_square(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col].abs() < 1e-11 {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in (col + 1)..n {
            let f = m[row][col] / m[col][col];
            if f != 0.0 {
                for c in col..n {
                    m[row][c] -= f * m[col][c];
                }
                rhs[row] -= f * rhs[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut acc = rhs[col];
        for c in (col + 1)..n {
            acc -= m[col][c] * x[c];
        }
        x[col] = acc / m[col][col];
    }
    Some(x)
}

/// Minimum of `<delta, c>` over `{P^T c >= b, c >= 0}` by enumerating every
/// candidate vertex: each subset of K constraints drawn from the K
/// inequality rows plus the K sign constraints, solved as a linear system
/// and kept when feasible. Exponential, intended for K <= 4.
pub fn brute_force_lp_value(instance: &LpInstance<f64>) -> Option<f64> {
    let k = instance.num_arms();
    assert!(k <= 4, "vertex enumeration is for tiny instances");
    let mut best: Option<f64> = None;
    // Constraint rows 0..k are sum_i P[i][j] c_i = b_j, rows k..2k are c_i = 0.
    for subset in 0u32..(1u32 << (2 * k)) {
        if subset.count_ones() as usize != k {
            continue;
        }
        let mut m = Vec::with_capacity(k);
        let mut rhs = Vec::with_capacity(k);
        for row in 0..(2 * k) {
            if subset & (1 << row) == 0 {
                continue;
            }
            if row < k {
                m.push((0..k).map(|i| instance.coeff(i, row)).collect());
                rhs.push(instance.rhs()[row]);
            } else {
                let mut sign_row = vec![0.0; k];
                sign_row[row - k] = 1.0;
                m.push(sign_row);
                rhs.push(0.0);
            }
        }
        let Some(c) = solve_square(m, rhs) else {
            continue;
        };
        let feasible = c.iter().all(|&v| v >= -1e-9)
            && (0..k).all(|j| instance.constraint_lhs(j, &c) >= instance.rhs()[j] - 1e-9);
        if !feasible {
            continue;
        }
        let value = c
            .iter()
            .zip(instance.costs())
            .map(|(&ci, &di)| ci * di)
            .sum::<f64>();
        if best.is_none_or(|b| value < b) {
            best = Some(value);
        }
    }
    best
}
