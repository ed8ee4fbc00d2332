//! Sparse complex operators and the Krylov routines used on them.
//!
//! [`OperatorMatrix`] is a compressed-row matrix over the full qubit
//! Hilbert space. Dense conversion goes through `nalgebra` and is limited to
//! [`MAX_DENSE_DIM`](crate::MAX_DENSE_DIM).

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::{C64, MAX_DENSE_DIM};

/// Anything that can be applied to a state vector.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    /// `y = A x`.
    fn apply_into(&self, x: &[C64], y: &mut [C64]);

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.dim()];
        self.apply_into(x, &mut y);
        y
    }
}

/// Accumulates `(row, col, value)` entries, summing duplicates.
#[derive(Debug, Clone, Default)]
pub struct SparseBuilder {
    dim: usize,
    entries: HashMap<(usize, usize), C64>,
}

impl SparseBuilder {
    pub fn new(dim: usize) -> Self {
        Self { dim, entries: HashMap::new() }
    }

    pub fn add(&mut self, row: usize, col: usize, value: C64) {
        debug_assert!(row < self.dim && col < self.dim);
        *self.entries.entry((row, col)).or_insert(C64::new(0.0, 0.0)) += value;
    }

    pub fn build(self) -> OperatorMatrix {
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); self.dim];
        for ((r, c), v) in self.entries {
            if v != C64::new(0.0, 0.0) {
                rows[r].push((c, v));
            }
        }
        OperatorMatrix::from_rows(self.dim, rows)
    }
}

/// Square sparse complex matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
    hermitian: bool,
}

impl OperatorMatrix {
    fn from_rows(dim: usize, mut rows: Vec<Vec<(usize, C64)>>) -> Self {
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in rows.iter_mut() {
            row.sort_by_key(|e| e.0);
            let start = cols.len();
            for &(c, v) in row.iter() {
                if cols.len() > start && cols[cols.len() - 1] == c {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                }
            }
            // drop entries that summed to exact zero
            let mut w = start;
            for k in start..cols.len() {
                if vals[k] != C64::new(0.0, 0.0) {
                    cols[w] = cols[k];
                    vals[w] = vals[k];
                    w += 1;
                }
            }
            cols.truncate(w);
            vals.truncate(w);
            row_ptr.push(cols.len());
        }
        let mut m = Self { dim, row_ptr, cols, vals, hermitian: false };
        m.hermitian = m.hermiticity_defect() <= 1e-12;
        m
    }

    /// Build row by row; `fill(r, out)` pushes `(col, value)` pairs for row
    /// `r`, duplicates are summed.
    pub fn from_row_fn(dim: usize, mut fill: impl FnMut(usize, &mut Vec<(usize, C64)>)) -> Self {
        let rows = (0..dim)
            .map(|r| {
                let mut v = Vec::new();
                fill(r, &mut v);
                v
            })
            .collect();
        Self::from_rows(dim, rows)
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_rows(dim, vec![Vec::new(); dim])
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![C64::new(1.0, 0.0); dim])
    }

    pub fn diagonal(d: &[C64]) -> Self {
        let rows = d
            .iter()
            .enumerate()
            .map(|(i, &v)| if v == C64::new(0.0, 0.0) { vec![] } else { vec![(i, v)] })
            .collect();
        Self::from_rows(d.len(), rows)
    }

    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        let rows = (0..m.nrows())
            .map(|r| {
                (0..m.ncols())
                    .filter(|&c| m[(r, c)] != C64::new(0.0, 0.0))
                    .map(|c| (c, m[(r, c)]))
                    .collect()
            })
            .collect();
        Self::from_rows(m.nrows(), rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Whether the matrix was Hermitian to 1e-12 when it was built.
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn adjoint(&self) -> Self {
        let mut rows = vec![Vec::new(); self.dim];
        for (r, c, v) in self.triplets() {
            rows[c].push((r, v.conj()));
        }
        Self::from_rows(self.dim, rows)
    }

    /// `max |A - A^dagger|` over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (r, c, v) in self.triplets() {
            worst = worst.max((v - self.get(c, r).conj()).norm());
        }
        worst
    }

    fn combine(&self, other: &Self, a: C64, b: C64) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let rows = (0..self.dim)
            .map(|r| {
                self.row(r)
                    .map(|(c, v)| (c, a * v))
                    .chain(other.row(r).map(|(c, v)| (c, b * v)))
                    .collect()
            })
            .collect();
        Self::from_rows(self.dim, rows)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, C64::new(1.0, 0.0), C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, C64::new(1.0, 0.0), C64::new(-1.0, 0.0))
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = self.clone();
        m.vals.iter_mut().for_each(|v| *v *= s);
        m.hermitian = m.hermiticity_defect() <= 1e-12;
        m
    }

    pub fn add_identity(&self, shift: f64) -> Self {
        self.add(&Self::identity(self.dim).scale(C64::new(shift, 0.0)))
    }

    /// Sparse matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut rows = Vec::with_capacity(self.dim);
        let mut acc: HashMap<usize, C64> = HashMap::new();
        for r in 0..self.dim {
            acc.clear();
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    *acc.entry(c).or_insert(C64::new(0.0, 0.0)) += a * b;
                }
            }
            rows.push(acc.iter().filter(|e| *e.1 != C64::new(0.0, 0.0)).map(|(&c, &v)| (c, v)).collect());
        }
        Self::from_rows(self.dim, rows)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        self.matmul(other).add(&other.matmul(self))
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max |A - B|` entrywise.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs()
    }

    pub fn is_diagonal(&self) -> bool {
        self.triplets().all(|(r, c, _)| r == c)
    }

    pub fn diagonal_entries(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> C64 {
        self.diagonal_entries().iter().sum()
    }

    /// Kronecker product `self (x) other`; `self` acts on the more
    /// significant index.
    pub fn kron(&self, other: &Self) -> Self {
        let dim = self.dim * other.dim;
        let mut rows = vec![Vec::new(); dim];
        for (r1, c1, v1) in self.triplets() {
            for (r2, c2, v2) in other.triplets() {
                rows[r1 * other.dim + r2].push((c1 * other.dim + c2, v1 * v2));
            }
        }
        Self::from_rows(dim, rows)
    }

    /// Keep only the rows and columns in `indices`, in that order.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        let mut map = HashMap::with_capacity(indices.len());
        for (k, &i) in indices.iter().enumerate() {
            map.insert(i, k);
        }
        let rows = indices
            .iter()
            .map(|&r| self.row(r).filter_map(|(c, v)| map.get(&c).map(|&k| (k, v))).collect())
            .collect();
        Self::from_rows(indices.len(), rows)
    }

    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        if self.dim > MAX_DENSE_DIM {
            return Err(Error::Capability(format!(
                "dense conversion of dimension {} exceeds {}",
                self.dim, MAX_DENSE_DIM
            )));
        }
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.triplets() {
            m[(r, c)] += v;
        }
        Ok(m)
    }

    /// Ascending eigenvalues by dense diagonalization.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.hermitian {
            return Err(Error::Domain("eigenvalues requested for a non-Hermitian matrix".into()));
        }
        Ok(hermitian_eigenvalues(&self.to_dense()?))
    }

    pub fn expectation(&self, psi: &[C64]) -> C64 {
        inner(psi, &self.apply(psi))
    }

    pub(crate) fn from_row_lists(dim: usize, rows: Vec<Vec<(usize, C64)>>) -> Self {
        Self::from_rows(dim, rows)
    }
}

impl LinearOperator for OperatorMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        for r in 0..self.dim {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            y[r] = acc;
        }
    }
}

/// Sum of operators applied term by term.
pub struct SumOperator<'a> {
    pub parts: Vec<&'a dyn LinearOperator>,
}

impl LinearOperator for SumOperator<'_> {
    fn dim(&self) -> usize {
        self.parts[0].dim()
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        y.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        let mut tmp = vec![C64::new(0.0, 0.0); x.len()];
        for p in &self.parts {
            p.apply_into(x, &mut tmp);
            for (a, b) in y.iter_mut().zip(&tmp) {
                *a += b;
            }
        }
    }
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Eigenvalues (ascending) and column eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = m.clone().symmetric_eigen();
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(m.nrows(), idx.len(), |r, c| eig.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

/// Lanczos tridiagonalization with full reorthogonalization, started from
/// `start`. Returns the orthonormal basis and the tridiagonal coefficients
/// `(alpha, beta)` with `beta[k]` coupling basis vectors `k` and `k + 1`,
/// plus the norm of the residual left after the last step.
fn lanczos(
    op: &dyn LinearOperator,
    start: &[C64],
    max_steps: usize,
) -> (Vec<Vec<C64>>, Vec<f64>, Vec<f64>, f64) {
    let n = op.dim();
    let s = norm(start);
    let mut basis: Vec<Vec<C64>> = vec![start.iter().map(|v| v / s).collect()];
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    let mut residual = 0.0;
    let mut w = vec![C64::new(0.0, 0.0); n];
    for k in 0..max_steps.min(n) {
        op.apply_into(&basis[k], &mut w);
        let a = inner(&basis[k], &w).re;
        alpha.push(a);
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for q in &basis {
                let c = inner(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let b = norm(&w);
        residual = b;
        if k + 1 == max_steps.min(n) || b < 1e-13 * (1.0 + a.abs()) {
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|v| v / b).collect());
    }
    (basis, alpha, beta, residual)
}

fn tridiagonal(alpha: &[f64], beta: &[f64]) -> DMatrix<f64> {
    let m = alpha.len();
    DMatrix::from_fn(m, m, |r, c| {
        if r == c {
            alpha[r]
        } else if r + 1 == c {
            beta[r]
        } else if c + 1 == r {
            beta[c]
        } else {
            0.0
        }
    })
}

/// Smallest and largest eigenvalue of a Hermitian operator by Lanczos.
pub fn extremal_eigenvalues(op: &dyn LinearOperator, seed: u64, max_steps: usize) -> (f64, f64) {
    let start = pseudo_random_vector(op.dim(), seed);
    let (_, alpha, beta, _) = lanczos(op, &start, max_steps);
    let t = tridiagonal(&alpha, &beta);
    let ev = t.symmetric_eigenvalues();
    let lo = ev.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Spectral norm of a Hermitian operator.
pub fn hermitian_norm(op: &dyn LinearOperator, seed: u64, max_steps: usize) -> f64 {
    let (lo, hi) = extremal_eigenvalues(op, seed, max_steps);
    lo.abs().max(hi.abs())
}

/// Deterministic dense vector with generic overlap on every eigenvector.
pub fn pseudo_random_vector(n: usize, seed: u64) -> Vec<C64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<C64> = (0..n).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let s = norm(&v);
    v.into_iter().map(|x| x / s).collect()
}

/// `exp(-i H t) psi` by restarted Lanczos with adaptive substeps.
pub fn expm_multiply(op: &dyn LinearOperator, psi: &[C64], t: f64, tol: f64) -> Vec<C64> {
    const KRYLOV_DIM: usize = 30;
    let mut state = psi.to_vec();
    if t == 0.0 {
        return state;
    }
    let mut remaining = t;
    let mut tau = t;
    while remaining.abs() > 0.0 {
        let s = norm(&state);
        if s == 0.0 {
            return state;
        }
        let (basis, alpha, beta, residual) = lanczos(op, &state, KRYLOV_DIM);
        let m = alpha.len();
        let tri = tridiagonal(&alpha, &beta);
        let eig = tri.symmetric_eigen();
        tau = tau.abs().min(remaining.abs()).copysign(remaining);
        let coeffs = loop {
            // e^{-i T tau} e_0
            let c: DVector<C64> = DVector::from_fn(m, |r, _| {
                (0..m)
                    .map(|k| {
                        let phase = C64::from_polar(1.0, -eig.eigenvalues[k] * tau);
                        eig.eigenvectors[(r, k)] * eig.eigenvectors[(0, k)] * phase
                    })
                    .sum::<C64>()
            });
            let err = residual * c[m - 1].norm() * s;
            if err <= tol * (tau / t).abs().max(1e-3) || tau.abs() < 1e-12 * t.abs() {
                break c;
            }
            tau /= 2.0;
        };
        let mut next = vec![C64::new(0.0, 0.0); state.len()];
        for (k, q) in basis.iter().enumerate().take(m) {
            let w = coeffs[k] * s;
            for (n, qi) in next.iter_mut().zip(q) {
                *n += w * qi;
            }
        }
        state = next;
        remaining -= tau;
        if remaining.abs() < 1e-14 * t.abs() {
            break;
        }
        tau *= 1.5;
    }
    state
}
