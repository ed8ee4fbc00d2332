//! Truncated field basis for a single gauge degree of freedom.
//!
//! Each register of `n` qubits holds `2^n` field levels spread evenly over
//! `[-a_max, a_max]`, level `k` stored as the big-endian binary number `k`.
//! The conjugate variable is diagonal in the basis reached by a centered
//! discrete Fourier transform.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::linalg::OperatorMatrix;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldGrid {
    pub a_max: f64,
    pub n_qubits: usize,
}

/// Widest register a grid may describe; level indices stay exact in `f64`.
pub const MAX_REGISTER_QUBITS: usize = 52;

impl FieldGrid {
    /// Number of levels. Only meaningful for registers that fit in `usize`,
    /// i.e. those small enough to simulate.
    pub fn levels(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.a_max / ((self.n_qubits as f64).exp2() - 1.0)
    }

    pub fn value(&self, k: usize) -> f64 {
        -self.a_max + k as f64 * self.spacing()
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.levels()).map(|k| self.value(k)).collect()
    }

    /// The conjugate grid with `pi_max * spacing = pi`.
    pub fn conjugate(&self) -> ConjugateGrid {
        ConjugateGrid { pi_max: PI / self.spacing(), levels: self.levels() }
    }
}

/// Eigenvalues of the conjugate variable paired with a [`FieldGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugateGrid {
    pub pi_max: f64,
    pub levels: usize,
}

impl ConjugateGrid {
    pub fn spacing(&self) -> f64 {
        2.0 * self.pi_max / (self.levels - 1) as f64
    }

    pub fn value(&self, k: usize) -> f64 {
        -self.pi_max + k as f64 * self.spacing()
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.levels).map(|k| self.value(k)).collect()
    }
}

pub fn make_field_grid(a_max: f64, n_qubits: usize) -> Result<FieldGrid> {
    if !(a_max > 0.0) || !a_max.is_finite() {
        return domain(format!("field cutoff must be positive, got {a_max}"));
    }
    if n_qubits == 0 || n_qubits > MAX_REGISTER_QUBITS {
        return domain(format!("register size must be in 1..={MAX_REGISTER_QUBITS}, got {n_qubits}"));
    }
    Ok(FieldGrid { a_max, n_qubits })
}

/// Qubits needed for `2 * ratio + 1` levels, where `ratio = a_max / delta_a`.
pub fn qubits_for_ratio(ratio: f64) -> usize {
    ((2.0 * ratio + 1.0).log2().ceil() as usize).max(1)
}

pub fn field_operator(grid: &FieldGrid) -> OperatorMatrix {
    let d: Vec<C64> = grid.values().into_iter().map(C64::from).collect();
    OperatorMatrix::diagonal(&d)
}

/// Centered DFT on `2^n` points: `F[j][k] = exp(-2 pi i (j-c)(k-c)/N) / sqrt(N)`
/// with `c = (N-1)/2`. Row `j` is the conjugate eigenstate `j` written in
/// the field basis (conjugated).
pub fn fourier_matrix(n_qubits: usize) -> DMatrix<C64> {
    let n = 1usize << n_qubits;
    let c = (n as f64 - 1.0) / 2.0;
    let norm = 1.0 / (n as f64).sqrt();
    DMatrix::from_fn(n, n, |j, k| {
        let phase = -2.0 * PI * (j as f64 - c) * (k as f64 - c) / n as f64;
        C64::from_polar(norm, phase)
    })
}

/// `F^dagger D F` with `D` the conjugate-grid eigenvalues, as a dense matrix.
pub fn conjugate_matrix(grid: &FieldGrid) -> DMatrix<C64> {
    conjugate_function_matrix(grid, |p| p)
}

/// `F^dagger f(D) F` for an arbitrary real function of the conjugate variable.
pub fn conjugate_function_matrix(grid: &FieldGrid, f: impl Fn(f64) -> f64) -> DMatrix<C64> {
    let fm = fourier_matrix(grid.n_qubits);
    let conj = grid.conjugate();
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        grid.levels(),
        conj.values().into_iter().map(|p| C64::from(f(p))),
    ));
    fm.adjoint() * d * fm
}

pub fn conjugate_operator(grid: &FieldGrid) -> OperatorMatrix {
    OperatorMatrix::from_dense(&conjugate_matrix(grid))
}

pub fn local_fourier_swap(n_qubits: usize) -> OperatorMatrix {
    OperatorMatrix::from_dense(&fourier_matrix(n_qubits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eigenvalues;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn grid_examples() {
        let g = make_field_grid(3.5, 3).unwrap();
        assert_eq!(g.levels(), 8);
        assert!(close(g.spacing(), 1.0, 1e-15));
        let expect = [-3.5, -2.5, -1.5, -0.5, 0.5, 1.5, 2.5, 3.5];
        for (v, e) in g.values().iter().zip(expect) {
            assert!(close(*v, e, 1e-14));
        }
        let g1 = make_field_grid(1.0, 1).unwrap();
        assert_eq!(g1.values(), vec![-1.0, 1.0]);
        assert_eq!(qubits_for_ratio(3.5), 3);
        assert!(make_field_grid(0.0, 2).is_err());
        assert!(make_field_grid(-1.0, 2).is_err());
    }

    #[test]
    fn grid_symmetry_and_span() {
        for n in 1..8 {
            let g = make_field_grid(2.7, n).unwrap();
            for k in 0..g.levels() {
                assert!(close(g.value(k), -g.value(g.levels() - 1 - k), 1e-12));
            }
            assert!(close(g.spacing() * (g.levels() - 1) as f64, 2.0 * g.a_max, 1e-12));
            let c = g.conjugate();
            assert!(close(c.pi_max * g.spacing(), PI, 1e-12));
        }
    }

    #[test]
    fn field_operator_examples() {
        let a = field_operator(&make_field_grid(1.0, 1).unwrap());
        assert_eq!(a.diagonal_entries(), vec![C64::from(-1.0), C64::from(1.0)]);
        let a = field_operator(&make_field_grid(3.0, 2).unwrap());
        let d: Vec<f64> = a.diagonal_entries().iter().map(|z| z.re).collect();
        assert_eq!(d, vec![-3.0, -1.0, 1.0, 3.0]);
        assert!(a.trace().norm() < 1e-14);
        assert!(a.is_hermitian());
    }

    #[test]
    fn conjugate_spectrum_matches_grid() {
        for n in 1..=6 {
            let g = make_field_grid(1.3, n).unwrap();
            let pi = conjugate_operator(&g);
            assert!(pi.hermiticity_defect() < 1e-12);
            let ev = hermitian_eigenvalues(&conjugate_matrix(&g));
            for (e, v) in ev.iter().zip(g.conjugate().values()) {
                assert!(close(*e, v, 1e-10));
            }
        }
        // two-point transform
        let g = make_field_grid(1.0, 1).unwrap();
        let ev = hermitian_eigenvalues(&conjugate_matrix(&g));
        let pm = g.conjugate().pi_max;
        assert!(close(ev[0], -pm, 1e-12) && close(ev[1], pm, 1e-12));
    }

    #[test]
    fn fourier_is_unitary_and_diagonalizes_conjugate() {
        for n in 1..=6 {
            let f = fourier_matrix(n);
            let dim = 1 << n;
            let id = &f * f.adjoint();
            assert!((id - DMatrix::<C64>::identity(dim, dim)).camax() < 1e-12);
            let scale = (dim as f64).powf(-0.5);
            assert!(f.iter().all(|z| close(z.norm(), scale, 1e-12)));
            let g = make_field_grid(0.9, n).unwrap();
            let d = &f * conjugate_matrix(&g) * f.adjoint();
            let vals = g.conjugate().values();
            for r in 0..dim {
                for c in 0..dim {
                    let want = if r == c { C64::from(vals[r]) } else { C64::new(0.0, 0.0) };
                    assert!((d[(r, c)] - want).norm() < 1e-10);
                }
            }
        }
    }

    fn central_commutator(n: usize, a_max: f64) -> C64 {
        let g = make_field_grid(a_max, n).unwrap();
        let dim = g.levels();
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            dim,
            g.values().into_iter().map(C64::from),
        ));
        let p = conjugate_matrix(&g);
        let comm = &a * &p - &p * &a;
        let width = 0.15 * a_max;
        let mut c = nalgebra::DVector::from_iterator(
            dim,
            g.values().into_iter().map(|x| C64::from((-x * x / (2.0 * width * width)).exp())),
        );
        c /= C64::from(c.norm());
        (c.adjoint() * comm * &c)[(0, 0)]
    }

    #[test]
    fn commutator_is_canonical_on_central_states() {
        let z = central_commutator(6, 8.0);
        assert!((z - C64::new(0.0, 1.0)).norm() < 0.05, "{z}");
    }

    /// Worst `|([A, Pi] - i) v|` over unit wave packets of fixed width centred
    /// in the middle half of the field range.
    fn central_defect(n: usize, a_max: f64, width: f64) -> f64 {
        let g = make_field_grid(a_max, n).unwrap();
        let dim = g.levels();
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            dim,
            g.values().into_iter().map(C64::from),
        ));
        let p = conjugate_matrix(&g);
        let defect = &a * &p - &p * &a - DMatrix::<C64>::identity(dim, dim) * C64::i();
        let mut worst = 0.0f64;
        for k in 0..=16 {
            let centre = -a_max / 2.0 + a_max * k as f64 / 16.0;
            let mut v = nalgebra::DVector::from_iterator(
                dim,
                g.values().into_iter().map(|y| C64::from((-(y - centre).powi(2) / (2.0 * width * width)).exp())),
            );
            v /= C64::from(v.norm());
            worst = worst.max((&defect * &v).norm());
        }
        worst
    }

    #[test]
    fn central_commutator_defect_shrinks_with_register_size() {
        let defects: Vec<f64> = (4..=7).map(|n| central_defect(n, 8.0, 1.0)).collect();
        for w in defects.windows(2) {
            assert!(w[1] < w[0], "{defects:?}");
        }
    }
}
