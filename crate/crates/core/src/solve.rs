//! Exact rational linear algebra: Gaussian elimination, a phase-1 simplex
//! for convex-hull membership, and an active-set solver for quadratic
//! minimization over the probability simplex.
//!
//! Everything pivots in exact arithmetic; Bland's rule keeps the simplex
//! finite and an explicit pivot budget turns any residual degeneracy into an
//! honest error instead of a wrong answer. Final answers are always verified
//! against their optimality conditions before being returned.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Solves A·x = b for square A by exact Gaussian elimination.
/// Singular-but-consistent systems return a particular solution with free
/// variables pinned to zero; inconsistent systems return None.
pub fn solve_linear<T: Scalar>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let rows = a.len();
    if rows == 0 {
        return Some(Vec::new());
    }
    let cols = a[0].len();
    let mut m: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    let mut pivot_col_of_row = Vec::new();
    let mut row = 0usize;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let pivot = m[row][col].clone();
        for v in m[row].iter_mut() {
            *v = v.clone() / pivot.clone();
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..=cols {
                    let delta = factor.clone() * m[row][c].clone();
                    m[r][c] = m[r][c].clone() - delta;
                }
            }
        }
        pivot_col_of_row.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    // inconsistency: a zero row with nonzero rhs
    for r in row..rows {
        if !m[r][cols].is_zero() {
            return None;
        }
    }
    let mut x = vec![T::zero(); cols];
    for (r, &c) in pivot_col_of_row.iter().enumerate() {
        x[c] = m[r][cols].clone();
        // subtract contributions of free columns (all pinned to zero), so
        // nothing further to do
    }
    Some(x)
}

/// Is `point` a convex combination of `generators`? Returns verified weights.
///
/// Phase-1 simplex with Bland's rule on the system Σ αᵢ·gᵢ = point, Σ αᵢ = 1,
/// α ≥ 0. Exact: feasibility is decided by whether the artificial objective
/// reaches exactly zero.
pub fn hull_membership<T: Scalar>(generators: &[Vec<T>], point: &[T]) -> Result<Option<Vec<T>>> {
    if generators.is_empty() {
        return Err(Error::EmptySet);
    }
    let dim = point.len();
    if generators.iter().any(|g| g.len() != dim) {
        return Err(Error::ArityMismatch { expected: dim, got: generators[0].len() });
    }
    let n = generators.len();
    let rows = dim + 1;
    let cols = n + rows; // weights + one artificial per row

    // tableau rows: [coefficients | rhs], rhs arranged nonnegative
    let mut tab: Vec<Vec<T>> = Vec::with_capacity(rows);
    for r in 0..rows {
        let mut row: Vec<T> = Vec::with_capacity(cols + 1);
        for g in generators {
            row.push(if r < dim { g[r].clone() } else { T::one() });
        }
        for a in 0..rows {
            row.push(if a == r { T::one() } else { T::zero() });
        }
        row.push(if r < dim { point[r].clone() } else { T::one() });
        if row[cols].is_negative() {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
            // the artificial column must stay +1
            row[n + r] = T::one();
        }
        tab.push(row);
    }
    let mut basis: Vec<usize> = (n..n + rows).collect();

    // objective: minimize the sum of artificials; reduced costs start as
    // -(sum of rows) on the structural columns
    let mut obj: Vec<T> = vec![T::zero(); cols + 1];
    for row in &tab {
        for (c, v) in row.iter().enumerate() {
            if c < n || c == cols {
                obj[c] = obj[c].clone() - v.clone();
            }
        }
    }

    let budget = 200 + 20 * cols;
    for _ in 0..budget {
        // Bland: smallest entering index with negative reduced cost
        let Some(enter) = (0..cols).find(|&c| obj[c].is_negative()) else {
            // optimal; feasible iff the artificial objective is exactly 0
            if !obj[cols].is_zero() {
                return Ok(None);
            }
            let mut weights = vec![T::zero(); n];
            for (r, &b) in basis.iter().enumerate() {
                if b < n {
                    weights[b] = tab[r][cols].clone();
                }
            }
            verify_hull_weights(generators, point, &weights)?;
            return Ok(Some(weights));
        };
        // ratio test with Bland tie-breaking on the leaving basis index
        let mut leave: Option<(usize, T)> = None;
        for r in 0..rows {
            if tab[r][enter].is_positive() {
                let ratio = tab[r][cols].clone() / tab[r][enter].clone();
                match &leave {
                    None => leave = Some((r, ratio)),
                    Some((lr, best)) => {
                        if ratio < *best || (ratio == *best && basis[r] < basis[*lr]) {
                            leave = Some((r, ratio));
                        }
                    }
                }
            }
        }
        let Some((lr, _)) = leave else {
            // unbounded phase-1 cannot happen with artificials; treat as stall
            return Err(Error::SolverStalled("phase-1 ratio test found no pivot".into()));
        };
        pivot(&mut tab, &mut obj, &mut basis, lr, enter);
    }
    Err(Error::SolverStalled("phase-1 pivot budget exhausted".into()))
}

fn pivot<T: Scalar>(
    tab: &mut [Vec<T>],
    obj: &mut [T],
    basis: &mut [usize],
    row: usize,
    col: usize,
) {
    let p = tab[row][col].clone();
    for v in tab[row].iter_mut() {
        *v = v.clone() / p.clone();
    }
    let width = tab[row].len();
    for r in 0..tab.len() {
        if r != row && !tab[r][col].is_zero() {
            let f = tab[r][col].clone();
            for c in 0..width {
                let delta = f.clone() * tab[row][c].clone();
                tab[r][c] = tab[r][c].clone() - delta;
            }
        }
    }
    if !obj[col].is_zero() {
        let f = obj[col].clone();
        for c in 0..width {
            let delta = f.clone() * tab[row][c].clone();
            obj[c] = obj[c].clone() - delta;
        }
    }
    basis[row] = col;
}

fn verify_hull_weights<T: Scalar>(
    generators: &[Vec<T>],
    point: &[T],
    weights: &[T],
) -> Result<()> {
    let mut total = T::zero();
    for w in weights {
        if w.is_negative() {
            return Err(Error::SolverStalled("negative hull weight".into()));
        }
        total = total + w.clone();
    }
    if !total.is_one() {
        return Err(Error::SolverStalled("hull weights do not sum to 1".into()));
    }
    for (j, target) in point.iter().enumerate() {
        let mut acc = T::zero();
        for (g, w) in generators.iter().zip(weights) {
            acc = acc + g[j].clone() * w.clone();
        }
        if &acc != target {
            return Err(Error::SolverStalled("hull combination mismatch".into()));
        }
    }
    Ok(())
}

/// Quadratic form data for min αᵀGα − 2·bᵀα + c over the probability simplex.
#[derive(Debug, Clone)]
pub struct SimplexQp<T> {
    pub gram: Vec<Vec<T>>,
    pub lin: Vec<T>,
    pub constant: T,
}

#[derive(Debug, Clone)]
pub struct QpSolution<T> {
    pub weights: Vec<T>,
    pub value: T,
}

impl<T: Scalar> SimplexQp<T> {
    pub fn size(&self) -> usize {
        self.lin.len()
    }

    pub fn objective(&self, alpha: &[T]) -> T {
        let n = self.size();
        let mut acc = self.constant.clone();
        for i in 0..n {
            let mut g = T::zero();
            for j in 0..n {
                g = g + self.gram[i][j].clone() * alpha[j].clone();
            }
            acc = acc + alpha[i].clone() * (g - T::from_int(2) * self.lin[i].clone());
        }
        acc
    }

    fn gradient(&self, alpha: &[T]) -> Vec<T> {
        let n = self.size();
        (0..n)
            .map(|i| {
                let mut g = T::zero();
                for j in 0..n {
                    g = g + self.gram[i][j].clone() * alpha[j].clone();
                }
                T::from_int(2) * (g - self.lin[i].clone())
            })
            .collect()
    }

    /// Exact KKT check: feasibility, stationarity on the support, and
    /// nonnegative reduced gradients off it. With a positive semidefinite
    /// Gram this certifies a global minimum.
    pub fn verify_kkt(&self, alpha: &[T]) -> bool {
        let n = self.size();
        if alpha.len() != n {
            return false;
        }
        let mut total = T::zero();
        for a in alpha {
            if a.is_negative() {
                return false;
            }
            total = total + a.clone();
        }
        if !total.is_one() {
            return false;
        }
        let grad = self.gradient(alpha);
        let Some(support) = (0..n).find(|&i| alpha[i].is_positive()) else {
            return false;
        };
        let lambda = grad[support].clone();
        for i in 0..n {
            if alpha[i].is_positive() {
                if grad[i] != lambda {
                    return false;
                }
            } else if grad[i] < lambda {
                return false;
            }
        }
        true
    }

    /// Active-set minimization. Starts from the best vertex, alternates
    /// equality-constrained exact solves with support updates, and only
    /// returns solutions that pass `verify_kkt`.
    pub fn minimize(&self) -> Result<QpSolution<T>> {
        let n = self.size();
        if n == 0 {
            return Err(Error::EmptySet);
        }
        if self.gram.len() != n || self.gram.iter().any(|r| r.len() != n) {
            return Err(Error::ArityMismatch { expected: n, got: self.gram.len() });
        }

        // best single vertex as the feasible start
        let mut best = 0usize;
        let mut best_val = self.objective(&unit_vector(n, 0));
        for i in 1..n {
            let v = self.objective(&unit_vector(n, i));
            if v < best_val {
                best = i;
                best_val = v;
            }
        }
        let mut alpha = unit_vector(n, best);
        let mut support: Vec<bool> = alpha.iter().map(|a: &T| a.is_positive()).collect();

        let budget = 100 + 30 * n;
        for _ in 0..budget {
            let idx: Vec<usize> = (0..n).filter(|&i| support[i]).collect();
            let target = self.solve_equality(&idx)?;
            let feasible = idx.iter().enumerate().all(|(k, _)| !target[k].is_negative());
            if feasible {
                for (k, &i) in idx.iter().enumerate() {
                    alpha[i] = target[k].clone();
                }
                for i in 0..n {
                    if !support[i] {
                        alpha[i] = T::zero();
                    }
                }
                // multiplier from any support coordinate
                let grad = self.gradient(&alpha);
                let lambda = grad[idx[0]].clone();
                // Bland: first violated complementarity constraint enters
                let entering = (0..n).find(|&i| !support[i] && grad[i] < lambda);
                match entering {
                    None => {
                        // zero out support coordinates that landed exactly on 0
                        for i in 0..n {
                            if support[i] && alpha[i].is_zero() {
                                support[i] = false;
                            }
                        }
                        if !self.verify_kkt(&alpha) {
                            return Err(Error::SolverStalled(
                                "KKT verification failed after convergence".into(),
                            ));
                        }
                        let value = self.objective(&alpha);
                        return Ok(QpSolution { weights: alpha, value });
                    }
                    Some(i) => support[i] = true,
                }
            } else {
                // step toward the equality solution until a coordinate hits 0
                let mut theta: Option<T> = None;
                let mut blocker = usize::MAX;
                for (k, &i) in idx.iter().enumerate() {
                    if target[k] < alpha[i] && target[k].is_negative() {
                        let denom = alpha[i].clone() - target[k].clone();
                        let t = alpha[i].clone() / denom;
                        let better = match &theta {
                            None => true,
                            Some(cur) => t < *cur || (t == *cur && i < blocker),
                        };
                        if better {
                            theta = Some(t);
                            blocker = i;
                        }
                    }
                }
                let theta = theta.ok_or_else(|| {
                    Error::SolverStalled("no blocking constraint on infeasible step".into())
                })?;
                for (k, &i) in idx.iter().enumerate() {
                    let step = target[k].clone() - alpha[i].clone();
                    alpha[i] = alpha[i].clone() + theta.clone() * step;
                }
                alpha[blocker] = T::zero();
                support[blocker] = false;
            }
        }
        Err(Error::SolverStalled("active-set pivot budget exhausted".into()))
    }

    /// Minimizes over the affine slice where only `idx` coordinates are free
    /// and they sum to one: the KKT system [2G_S 1; 1ᵀ 0]·[α_S; λ] = [2b_S; 1].
    fn solve_equality(&self, idx: &[usize]) -> Result<Vec<T>> {
        // diagonal Gram on the support: closed-form stationarity
        // α_i = (2b_i − λ)/(2g_ii) with λ fixed by Σα = 1
        let diagonal = idx.iter().all(|&i| {
            idx.iter()
                .all(|&j| i == j || self.gram[i][j].is_zero())
        }) && idx.iter().all(|&i| self.gram[i][i].is_positive());
        if diagonal {
            let two = T::from_int(2);
            let mut sum_b_over_g = T::zero();
            let mut sum_inv = T::zero();
            for &i in idx {
                sum_b_over_g = sum_b_over_g + self.lin[i].clone() / self.gram[i][i].clone();
                sum_inv = sum_inv + T::one() / (two.clone() * self.gram[i][i].clone());
            }
            let lambda = (sum_b_over_g - T::one()) / sum_inv;
            return Ok(idx
                .iter()
                .map(|&i| {
                    (two.clone() * self.lin[i].clone() - lambda.clone())
                        / (two.clone() * self.gram[i][i].clone())
                })
                .collect());
        }
        let k = idx.len();
        let mut a = vec![vec![T::zero(); k + 1]; k + 1];
        let mut b = vec![T::zero(); k + 1];
        for (r, &i) in idx.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                a[r][c] = T::from_int(2) * self.gram[i][j].clone();
            }
            a[r][k] = T::one();
            b[r] = T::from_int(2) * self.lin[i].clone();
        }
        for c in 0..k {
            a[k][c] = T::one();
        }
        b[k] = T::one();
        let sol = solve_linear(&a, &b).ok_or_else(|| {
            Error::SolverStalled("singular KKT system with inconsistent data".into())
        })?;
        Ok(sol[..k].to_vec())
    }
}

fn unit_vector<T: Scalar>(n: usize, i: usize) -> Vec<T> {
    let mut v = vec![T::zero(); n];
    v[i] = T::one();
    v
}
