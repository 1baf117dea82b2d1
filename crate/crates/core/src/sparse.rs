//! Minimal sparse matrix arithmetic and linear solvers.
//!
//! Everything here is exact triplet/CSR arithmetic — no drop tolerances, no
//! reordering heuristics. The target scale is desk-sized problems (≤ 100k
//! unknowns), where a hand-rolled CSR kernel plus conjugate-gradient style
//! iterations is plenty.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SparseError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix index ({row},{col}) out of bounds for {nrows}x{ncols}")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },
    #[error("matrix is singular (or numerically singular)")]
    SingularMatrix,
    #[error("direct solver is dense-backed and limited to n <= {limit}; got n = {n}")]
    DirectSizeLimit { n: usize, limit: usize },
    #[error("iteration budget exhausted: {iterations} iterations, residual {residual:e}")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("matrix contains a non-finite entry")]
    NonFiniteEntry,
}

/// Triplet (COO) accumulator. Duplicate entries are summed on compression.
#[derive(Debug, Clone)]
pub struct TripletMatrix {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletMatrix {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        if value != 0.0 {
            self.entries.push((row, col, value));
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Compress to CSR, summing duplicates.
    pub fn to_csr(&self) -> CsrMatrix {
        let mut row_counts = vec![0usize; self.nrows + 1];
        for &(r, _, _) in &self.entries {
            row_counts[r + 1] += 1;
        }
        for i in 0..self.nrows {
            row_counts[i + 1] += row_counts[i];
        }
        let mut cols = vec![0usize; self.entries.len()];
        let mut vals = vec![0.0f64; self.entries.len()];
        let mut cursor = row_counts.clone();
        for &(r, c, v) in &self.entries {
            let k = cursor[r];
            cols[k] = c;
            vals[k] = v;
            cursor[r] += 1;
        }
        // sort within each row and sum duplicates
        let mut indptr = Vec::with_capacity(self.nrows + 1);
        let mut out_cols = Vec::with_capacity(cols.len());
        let mut out_vals = Vec::with_capacity(vals.len());
        indptr.push(0);
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for r in 0..self.nrows {
            scratch.clear();
            scratch.extend(
                cols[row_counts[r]..row_counts[r + 1]]
                    .iter()
                    .copied()
                    .zip(vals[row_counts[r]..row_counts[r + 1]].iter().copied()),
            );
            scratch.sort_unstable_by_key(|&(c, _)| c);
            let mut i = 0;
            while i < scratch.len() {
                let c = scratch[i].0;
                let mut sum = 0.0;
                while i < scratch.len() && scratch[i].0 == c {
                    sum += scratch[i].1;
                    i += 1;
                }
                if sum != 0.0 {
                    out_cols.push(c);
                    out_vals.push(sum);
                }
            }
            indptr.push(out_cols.len());
        }
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            indptr,
            indices: out_cols,
            data: out_vals,
        }
    }
}

/// Compressed sparse row matrix: sorted, deduplicated column indices per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            data: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            data: vec![1.0; n],
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut t = TripletMatrix::new(n, n);
        for (i, &v) in diag.iter().enumerate() {
            t.push(i, i, v);
        }
        t.to_csr()
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let span = self.indptr[r]..self.indptr[r + 1];
        (&self.indices[span.clone()], &self.data[span])
    }

    /// Value at (row, col); zero if not stored.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        let (cols, vals) = self.row(row);
        match cols.binary_search(&col) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals.iter()).map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>, SparseError> {
        if x.len() != self.ncols {
            return Err(SparseError::DimensionMismatch(format!(
                "matvec: matrix is {}x{}, vector has length {}",
                self.nrows,
                self.ncols,
                x.len()
            )));
        }
        let mut y = vec![0.0; self.nrows];
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            let mut acc = 0.0;
            for (&c, &v) in cols.iter().zip(vals) {
                acc += v * x[c];
            }
            y[r] = acc;
        }
        Ok(y)
    }

    /// y = Aᵀ x without forming the transpose.
    pub fn matvec_transpose(&self, x: &[f64]) -> Result<Vec<f64>, SparseError> {
        if x.len() != self.nrows {
            return Err(SparseError::DimensionMismatch(format!(
                "matvec_transpose: matrix is {}x{}, vector has length {}",
                self.nrows,
                self.ncols,
                x.len()
            )));
        }
        let mut y = vec![0.0; self.ncols];
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                y[c] += v * x[r];
            }
        }
        Ok(y)
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut t = TripletMatrix::new(self.ncols, self.nrows);
        for (r, c, v) in self.iter() {
            t.push(c, r, v);
        }
        t.to_csr()
    }

    /// Sparse matrix product `self * other` (Gustavson, exact accumulation).
    pub fn multiply(&self, other: &CsrMatrix) -> Result<CsrMatrix, SparseError> {
        if self.ncols != other.nrows {
            return Err(SparseError::DimensionMismatch(format!(
                "multiply: {}x{} times {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let mut indptr = Vec::with_capacity(self.nrows + 1);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        indptr.push(0);
        let mut acc = vec![0.0f64; other.ncols];
        let mut mark = vec![usize::MAX; other.ncols];
        let mut active: Vec<usize> = Vec::new();
        for r in 0..self.nrows {
            active.clear();
            let (cols, vals) = self.row(r);
            for (&k, &v) in cols.iter().zip(vals) {
                let (bcols, bvals) = other.row(k);
                for (&c, &bv) in bcols.iter().zip(bvals) {
                    if mark[c] != r {
                        mark[c] = r;
                        acc[c] = 0.0;
                        active.push(c);
                    }
                    acc[c] += v * bv;
                }
            }
            active.sort_unstable();
            for &c in &active {
                if acc[c] != 0.0 {
                    indices.push(c);
                    data.push(acc[c]);
                }
            }
            indptr.push(indices.len());
        }
        Ok(CsrMatrix {
            nrows: self.nrows,
            ncols: other.ncols,
            indptr,
            indices,
            data,
        })
    }

    /// alpha * self + beta * other.
    pub fn add_scaled(&self, alpha: f64, other: &CsrMatrix, beta: f64) -> Result<CsrMatrix, SparseError> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(SparseError::DimensionMismatch(format!(
                "add: {}x{} plus {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let mut t = TripletMatrix::new(self.nrows, self.ncols);
        for (r, c, v) in self.iter() {
            t.push(r, c, alpha * v);
        }
        for (r, c, v) in other.iter() {
            t.push(r, c, beta * v);
        }
        Ok(t.to_csr())
    }

    pub fn scale(&self, alpha: f64) -> CsrMatrix {
        let mut m = self.clone();
        for v in &mut m.data {
            *v *= alpha;
        }
        m
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Induced infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows)
            .map(|r| self.row(r).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum |A - Aᵀ| entry; zero for symmetric matrices.
    pub fn asymmetry(&self) -> f64 {
        let t = self.transpose();
        let mut worst = 0.0f64;
        for (r, c, v) in self.iter() {
            worst = worst.max((v - t.get(r, c)).abs());
        }
        for (r, c, v) in t.iter() {
            worst = worst.max((v - self.get(r, c)).abs());
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solver selection for [`solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    /// Dense LU factorization; nonsingular square systems of moderate size.
    Direct,
    /// Conjugate gradients; symmetric positive (semi)definite systems.
    IterativeSymmetric,
    /// CGLS on the normal equations; minimal-norm least-squares solution
    /// for singular or rectangular systems.
    LeastSquares,
}

impl SolveMethod {
    pub fn name(self) -> &'static str {
        match self {
            SolveMethod::Direct => "direct-lu",
            SolveMethod::IterativeSymmetric => "cg",
            SolveMethod::LeastSquares => "cgls",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub method: SolveMethod,
    /// Relative residual target.
    pub tol: f64,
    /// Iteration cap; `0` means the default `10 * n`.
    pub max_iter: usize,
}

impl SolveOptions {
    pub fn new(method: SolveMethod) -> Self {
        Self {
            method,
            tol: 1e-10,
            max_iter: 0,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    fn iter_budget(&self, n: usize) -> usize {
        if self.max_iter == 0 {
            10 * n.max(1)
        } else {
            self.max_iter
        }
    }
}

/// Outcome record attached to every solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub method: &'static str,
    pub iterations: usize,
    /// Final relative residual ‖Ax − b‖₂ / ‖b‖₂ (absolute when b = 0).
    pub residual: f64,
    pub converged: bool,
    /// Per-iteration residual norms; for the iterative-symmetric method this
    /// is the running minimum, matching the best iterate that is returned.
    pub residual_history: Vec<f64>,
}

/// Largest square system the dense-backed direct method accepts.
pub const DIRECT_DENSE_LIMIT: usize = 6000;

/// Solve `A x = b` according to `options`.
///
/// `Direct` requires a square nonsingular system and is backed by a dense LU
/// factorization, so it is capped at [`DIRECT_DENSE_LIMIT`] unknowns; the
/// iterative methods are matrix-free over the CSR kernels and scale to the
/// full desk-size range.
pub fn solve(a: &CsrMatrix, b: &[f64], options: &SolveOptions) -> Result<(Vec<f64>, SolveReport), SparseError> {
    if b.len() != a.nrows() {
        return Err(SparseError::DimensionMismatch(format!(
            "solve: matrix is {}x{}, rhs has length {}",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    if !a.is_finite() || b.iter().any(|v| !v.is_finite()) {
        return Err(SparseError::NonFiniteEntry);
    }
    match options.method {
        SolveMethod::Direct => solve_direct(a, b),
        SolveMethod::IterativeSymmetric => solve_cg(a, b, options),
        SolveMethod::LeastSquares => solve_cgls(a, b, options),
    }
}

fn solve_direct(a: &CsrMatrix, b: &[f64]) -> Result<(Vec<f64>, SolveReport), SparseError> {
    if a.nrows() != a.ncols() {
        return Err(SparseError::DimensionMismatch(format!(
            "direct solve requires a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let n = a.nrows();
    if n > DIRECT_DENSE_LIMIT {
        return Err(SparseError::DirectSizeLimit {
            n,
            limit: DIRECT_DENSE_LIMIT,
        });
    }
    let mut dense = nalgebra::DMatrix::<f64>::zeros(n, n);
    for (r, c, v) in a.iter() {
        dense[(r, c)] = v;
    }
    let rhs = nalgebra::DVector::from_column_slice(b);
    let lu = dense.lu();
    let x = lu.solve(&rhs).ok_or(SparseError::SingularMatrix)?;
    if !x.iter().all(|v| v.is_finite()) {
        return Err(SparseError::SingularMatrix);
    }
    let x: Vec<f64> = x.iter().copied().collect();
    let r = residual_norm(a, &x, b)?;
    let bn = norm2(b);
    let rel = if bn > 0.0 { r / bn } else { r };
    Ok((
        x,
        SolveReport {
            method: SolveMethod::Direct.name(),
            iterations: 0,
            residual: rel,
            converged: rel.is_finite(),
            residual_history: vec![rel],
        },
    ))
}

fn residual_norm(a: &CsrMatrix, x: &[f64], b: &[f64]) -> Result<f64, SparseError> {
    let ax = a.matvec(x)?;
    Ok(ax.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt())
}

/// Conjugate gradients with Jacobi preconditioning. Returns the best iterate
/// seen (by residual norm), so the reported residual history is monotone.
fn solve_cg(a: &CsrMatrix, b: &[f64], options: &SolveOptions) -> Result<(Vec<f64>, SolveReport), SparseError> {
    if a.nrows() != a.ncols() {
        return Err(SparseError::DimensionMismatch(format!(
            "cg requires a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let n = a.nrows();
    let bn = norm2(b);
    if bn == 0.0 {
        return Ok((
            vec![0.0; n],
            SolveReport {
                method: SolveMethod::IterativeSymmetric.name(),
                iterations: 0,
                residual: 0.0,
                converged: true,
                residual_history: vec![0.0],
            },
        ));
    }
    let inv_diag: Vec<f64> = (0..n)
        .map(|i| {
            let d = a.get(i, i);
            if d.abs() > 0.0 {
                1.0 / d
            } else {
                1.0
            }
        })
        .collect();
    let budget = options.iter_budget(n);
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut best_x = x.clone();
    let mut best_res = bn;
    let mut history = vec![1.0f64];
    let mut iterations = 0;
    for _ in 0..budget {
        iterations += 1;
        let ap = a.matvec(&p)?;
        let pap = dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            break; // not positive definite along p; keep best iterate
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rn = norm2(&r);
        if rn < best_res {
            best_res = rn;
            best_x.copy_from_slice(&x);
        }
        history.push(best_res / bn);
        if rn <= options.tol * bn {
            return Ok((
                x,
                SolveReport {
                    method: SolveMethod::IterativeSymmetric.name(),
                    iterations,
                    residual: rn / bn,
                    converged: true,
                    residual_history: history,
                },
            ));
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Ok((
        best_x,
        SolveReport {
            method: SolveMethod::IterativeSymmetric.name(),
            iterations,
            residual: best_res / bn,
            converged: best_res <= options.tol * bn,
            residual_history: history,
        },
    ))
}

/// CGLS: conjugate gradients on the normal equations AᵀA x = Aᵀb. Starting
/// from x = 0 the iterates stay in range(Aᵀ), so the limit is the
/// minimal-norm least-squares solution.
fn solve_cgls(a: &CsrMatrix, b: &[f64], options: &SolveOptions) -> Result<(Vec<f64>, SolveReport), SparseError> {
    let n = a.ncols();
    let bn = norm2(b);
    if bn == 0.0 {
        return Ok((
            vec![0.0; n],
            SolveReport {
                method: SolveMethod::LeastSquares.name(),
                iterations: 0,
                residual: 0.0,
                converged: true,
                residual_history: vec![0.0],
            },
        ));
    }
    let budget = options.iter_budget(n.max(a.nrows()));
    let mut x = vec![0.0; n];
    let mut r = b.to_vec(); // r = b - A x
    let mut s = a.matvec_transpose(&r)?; // s = Aᵀ r
    let s0 = norm2(&s);
    let mut p = s.clone();
    let mut ss = dot(&s, &s);
    let mut history = vec![1.0f64];
    let mut best_res = bn;
    let mut best_x = x.clone();
    let mut iterations = 0;
    // Dual stopping criterion: consistent systems stop on ‖r‖, singular or
    // inconsistent ones on ‖Aᵀr‖ (the least-squares optimality residual).
    let normal_tol = options.tol * s0;
    for _ in 0..budget {
        iterations += 1;
        let q = a.matvec(&p)?;
        let qq = dot(&q, &q);
        if qq == 0.0 || !qq.is_finite() {
            break;
        }
        let alpha = ss / qq;
        for i in 0..n {
            x[i] += alpha * p[i];
        }
        for i in 0..r.len() {
            r[i] -= alpha * q[i];
        }
        let rn = norm2(&r);
        if rn < best_res {
            best_res = rn;
            best_x.copy_from_slice(&x);
        }
        history.push(best_res / bn);
        s = a.matvec_transpose(&r)?;
        let sn = norm2(&s);
        if rn <= options.tol * bn || sn <= normal_tol {
            return Ok((
                x,
                SolveReport {
                    method: SolveMethod::LeastSquares.name(),
                    iterations,
                    residual: rn / bn,
                    converged: true,
                    residual_history: history,
                },
            ));
        }
        let ss_new = sn * sn;
        let beta = ss_new / ss;
        ss = ss_new;
        for i in 0..n {
            p[i] = s[i] + beta * p[i];
        }
    }
    Ok((
        best_x,
        SolveReport {
            method: SolveMethod::LeastSquares.name(),
            iterations,
            residual: best_res / bn,
            converged: false,
            residual_history: history,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_csr(nrows: usize, ncols: usize, seed: u64) -> CsrMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut t = TripletMatrix::new(nrows, ncols);
        for r in 0..nrows {
            for c in 0..ncols {
                if rng.gen_bool(0.4) {
                    t.push(r, c, rng.gen_range(-2.0..2.0));
                }
            }
        }
        t.to_csr()
    }

    #[test]
    fn identity_matvec_is_identity() {
        let a = CsrMatrix::identity(5);
        let x = vec![1.0, -2.0, 3.0, 0.5, 0.0];
        assert_eq!(a.matvec(&x).unwrap(), x);
    }

    #[test]
    fn duplicate_triplets_are_summed() {
        let mut t = TripletMatrix::new(2, 2);
        t.push(0, 1, 1.5);
        t.push(0, 1, 2.5);
        t.push(1, 0, -1.0);
        t.push(1, 0, 1.0); // cancels
        let m = t.to_csr();
        assert_eq!(m.get(0, 1), 4.0);
        assert_eq!(m.nnz(), 1);
    }

    #[test]
    fn product_transpose_identity() {
        let m = random_csr(7, 5, 1);
        let n = random_csr(5, 6, 2);
        let mn_t = m.multiply(&n).unwrap().transpose();
        let nt_mt = n.transpose().multiply(&m.transpose()).unwrap();
        for (r, c, v) in mn_t.iter() {
            assert!((v - nt_mt.get(r, c)).abs() < 1e-12);
        }
        assert_eq!(mn_t.nnz(), nt_mt.nnz());
    }

    #[test]
    fn direct_identity_returns_rhs() {
        let a = CsrMatrix::identity(4);
        let b = vec![3.0, -1.0, 2.0, 0.0];
        let (x, rep) = solve(&a, &b, &SolveOptions::new(SolveMethod::Direct)).unwrap();
        assert_eq!(x, b);
        assert!(rep.converged);
    }

    #[test]
    fn direct_small_spd_hand_solution() {
        // [[2,1],[1,2]] x = (1,1)  =>  x = (1/3, 1/3)
        let mut t = TripletMatrix::new(2, 2);
        t.push(0, 0, 2.0);
        t.push(0, 1, 1.0);
        t.push(1, 0, 1.0);
        t.push(1, 1, 2.0);
        let a = t.to_csr();
        let (x, _) = solve(&a, &[1.0, 1.0], &SolveOptions::new(SolveMethod::Direct)).unwrap();
        assert!((x[0] - 1.0 / 3.0).abs() < 1e-14);
        assert!((x[1] - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn direct_singular_is_reported() {
        let mut t = TripletMatrix::new(2, 2);
        t.push(0, 0, 1.0);
        t.push(0, 1, 1.0);
        t.push(1, 0, 2.0);
        t.push(1, 1, 2.0);
        let a = t.to_csr();
        let err = solve(&a, &[1.0, 0.0], &SolveOptions::new(SolveMethod::Direct)).unwrap_err();
        assert!(matches!(err, SparseError::SingularMatrix));
    }

    #[test]
    fn cg_recovers_known_solution() {
        // SPD: AᵀA + I from a random A
        let r = random_csr(6, 6, 3);
        let a = r
            .transpose()
            .multiply(&r)
            .unwrap()
            .add_scaled(1.0, &CsrMatrix::identity(6), 1.0)
            .unwrap();
        let x0 = vec![1.0, -1.0, 0.5, 2.0, -0.25, 3.0];
        let b = a.matvec(&x0).unwrap();
        let (x, rep) = solve(&a, &b, &SolveOptions::new(SolveMethod::IterativeSymmetric)).unwrap();
        assert!(rep.converged);
        for (xi, x0i) in x.iter().zip(&x0) {
            assert!((xi - x0i).abs() < 1e-8);
        }
    }

    #[test]
    fn cg_residual_history_is_monotone() {
        let r = random_csr(12, 12, 4);
        let a = r
            .transpose()
            .multiply(&r)
            .unwrap()
            .add_scaled(1.0, &CsrMatrix::identity(12), 0.1)
            .unwrap();
        let b = vec![1.0; 12];
        let (_, rep) = solve(&a, &b, &SolveOptions::new(SolveMethod::IterativeSymmetric)).unwrap();
        for w in rep.residual_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-15);
        }
    }

    #[test]
    fn least_squares_on_singular_consistent_system() {
        // rank-1 matrix, b in range
        let mut t = TripletMatrix::new(3, 3);
        for r in 0..3 {
            t.push(r, 0, 1.0);
            t.push(r, 1, 2.0);
            t.push(r, 2, 3.0);
        }
        let a = t.to_csr();
        let b = vec![6.0, 6.0, 6.0];
        let opts = SolveOptions::new(SolveMethod::LeastSquares).with_tol(1e-12);
        let (x, rep) = solve(&a, &b, &opts).unwrap();
        let res = residual_norm(&a, &x, &b).unwrap();
        assert!(res <= 1e-10 * norm2(&b), "residual {res}");
        assert!(rep.converged);
        // minimal-norm solution is proportional to (1,2,3)
        let t = x[0];
        assert!((x[1] - 2.0 * t).abs() < 1e-9 && (x[2] - 3.0 * t).abs() < 1e-9);
    }

    #[test]
    fn least_squares_rectangular() {
        let a = random_csr(10, 4, 5);
        let x0 = vec![0.3, -1.2, 0.7, 2.0];
        let b = a.matvec(&x0).unwrap();
        let opts = SolveOptions::new(SolveMethod::LeastSquares).with_tol(1e-13);
        let (x, _) = solve(&a, &b, &opts).unwrap();
        for (xi, x0i) in x.iter().zip(&x0) {
            assert!((xi - x0i).abs() < 1e-8);
        }
    }

    #[test]
    fn solve_dimension_mismatch() {
        let a = CsrMatrix::identity(3);
        let err = solve(&a, &[1.0, 2.0], &SolveOptions::new(SolveMethod::Direct)).unwrap_err();
        assert!(matches!(err, SparseError::DimensionMismatch(_)));
    }
}
