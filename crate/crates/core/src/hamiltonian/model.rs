//! Matrix-free representation of the Hamiltonian and of any subset of its
//! terms.

use nalgebra::DMatrix;

use super::{
    all_terms, check_dim, electric_kernel, electric_matrix, magnetic_energy, HamiltonianParams,
    Piece, TaggedTerm, Term,
};
use crate::error::{Error, Result};
use crate::gauge::{fourier_matrix, FieldGrid};
use crate::layout::RegisterLayout;
use crate::linalg::{LinearOperator, OperatorMatrix};
use crate::{C64, MAX_EXPLICIT_DIM};

/// Largest dimension handled by matrix-free application.
pub const MAX_MATRIX_FREE_DIM: usize = 1 << 20;

/// The Hamiltonian as gauge quadratic kernels plus a list of fermion terms.
#[derive(Debug, Clone)]
pub struct HamiltonianModel {
    pub params: HamiltonianParams,
    pub layout: RegisterLayout,
    /// Kernel of `H_Pi` in the conjugate variables.
    pub electric: Option<DMatrix<f64>>,
    pub terms: Vec<TaggedTerm>,
    magnetic_diag: Option<Vec<f64>>,
}

impl HamiltonianModel {
    pub fn new(params: &HamiltonianParams) -> Result<Self> {
        params.validate()?;
        let layout = params.layout();
        check_dim(&layout, MAX_MATRIX_FREE_DIM)?;
        let electric = params.grid.map(|_| electric_kernel(&params.geometry));
        let magnetic_diag = params.grid.map(|grid| {
            let gdim = layout.gauge_dim();
            (0..gdim)
                .map(|s| magnetic_energy(&params.geometry, &field_values(&layout, &grid, s)))
                .collect()
        });
        Ok(Self { params: params.clone(), layout, electric, terms: all_terms(params), magnetic_diag })
    }

    pub fn grid(&self) -> Option<&FieldGrid> {
        self.params.grid.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.layout.dim().expect("dimension checked at construction")
    }

    /// Operator for the selected gauge pieces and the terms picked by
    /// `select`.
    pub fn operator(
        &self,
        electric: bool,
        magnetic: bool,
        select: impl Fn(&TaggedTerm) -> bool,
    ) -> PieceOperator {
        let terms: Vec<Term> = self.terms.iter().filter(|t| select(t)).map(|t| t.term.clone()).collect();
        self.operator_from_terms(electric, magnetic, terms)
    }

    pub fn operator_from_terms(&self, electric: bool, magnetic: bool, terms: Vec<Term>) -> PieceOperator {
        let dim = self.dim();
        let gmask = self.layout.gauge_dim() - 1;
        let grid = self.params.grid;
        let mut diag = vec![0.0; dim];
        if magnetic {
            if let Some(m) = &self.magnetic_diag {
                for (s, d) in diag.iter_mut().enumerate() {
                    *d += m[s & gmask];
                }
            }
        }
        let mut hops = Vec::new();
        for t in terms {
            if t.is_diagonal() {
                for (s, d) in diag.iter_mut().enumerate() {
                    *d += t.diagonal_value(&self.layout, grid.as_ref(), s);
                }
            } else {
                hops.push(t);
            }
        }
        let electric = match (electric, grid, &self.electric) {
            (true, Some(grid), Some(k)) => Some(ElectricPart::new(&self.layout, &grid, k)),
            _ => None,
        };
        PieceOperator { layout: self.layout, grid, diag, hops, electric }
    }

    /// The full Hamiltonian.
    pub fn total(&self) -> PieceOperator {
        self.operator(true, true, |_| true)
    }

    /// A single Hamiltonian piece.
    pub fn piece(&self, piece: Piece) -> PieceOperator {
        self.operator(piece == Piece::Electric, piece == Piece::Magnetic, |t| t.piece == piece)
    }
}

/// Field values of all gauge registers in gauge basis state `s`.
pub fn field_values(layout: &RegisterLayout, grid: &FieldGrid, s: usize) -> Vec<f64> {
    (0..layout.gauge_registers).map(|r| grid.value(layout.level(s, r))).collect()
}

/// Conjugate-variable values of all gauge registers in conjugate basis
/// state `s`.
pub fn conjugate_values(layout: &RegisterLayout, grid: &FieldGrid, s: usize) -> Vec<f64> {
    let c = grid.conjugate();
    (0..layout.gauge_registers).map(|r| c.value(layout.level(s, r))).collect()
}

/// `H_Pi` applied as Fourier transform, diagonal, inverse transform.
#[derive(Debug, Clone)]
pub struct ElectricPart {
    pub fourier: DMatrix<C64>,
    pub inverse: DMatrix<C64>,
    pub kernel: DMatrix<f64>,
    /// Electric energy of every gauge basis state in the conjugate basis.
    pub conj_diag: Vec<f64>,
}

impl ElectricPart {
    pub fn new(layout: &RegisterLayout, grid: &FieldGrid, kernel: &DMatrix<f64>) -> Self {
        let fourier = fourier_matrix(grid.n_qubits);
        let inverse = fourier.adjoint();
        let conj_diag = (0..layout.gauge_dim())
            .map(|s| super::quadratic_value(kernel, &conjugate_values(layout, grid, s)))
            .collect();
        Self { fourier, inverse, kernel: kernel.clone(), conj_diag }
    }
}

/// Apply a `2^n x 2^n` unitary to one gauge register of a state vector.
pub fn apply_register_unitary(psi: &mut [C64], layout: &RegisterLayout, register: usize, u: &DMatrix<C64>) {
    let shift = layout.register_shift(register);
    let levels = 1usize << layout.qubits_per_register;
    let mask = (levels - 1) << shift;
    let mut buf = vec![C64::new(0.0, 0.0); levels];
    for base in 0..psi.len() {
        if base & mask != 0 {
            continue;
        }
        for k in 0..levels {
            buf[k] = psi[base | (k << shift)];
        }
        for j in 0..levels {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..levels {
                acc += u[(j, k)] * buf[k];
            }
            psi[base | (j << shift)] = acc;
        }
    }
}

/// Transform every gauge register to the conjugate basis (`forward`) or back.
pub fn to_conjugate_basis(psi: &mut [C64], layout: &RegisterLayout, part: &ElectricPart, forward: bool) {
    let u = if forward { &part.fourier } else { &part.inverse };
    for r in 0..layout.gauge_registers {
        apply_register_unitary(psi, layout, r, u);
    }
}

/// A Hermitian operator made of a diagonal, hopping terms and optionally
/// the electric piece, applied without forming a matrix.
#[derive(Debug, Clone)]
pub struct PieceOperator {
    pub layout: RegisterLayout,
    pub grid: Option<FieldGrid>,
    pub diag: Vec<f64>,
    pub hops: Vec<Term>,
    pub electric: Option<ElectricPart>,
}

impl PieceOperator {
    pub fn is_empty(&self) -> bool {
        self.electric.is_none() && self.hops.is_empty() && self.diag.iter().all(|&d| d == 0.0)
    }

    /// Explicit sparse matrix; limited to [`MAX_EXPLICIT_DIM`].
    pub fn to_matrix(&self) -> Result<OperatorMatrix> {
        let dim = check_dim(&self.layout, MAX_EXPLICIT_DIM)?;
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); dim];
        for (s, &d) in self.diag.iter().enumerate() {
            if d != 0.0 {
                rows[s].push((s, C64::from(d)));
            }
        }
        for t in &self.hops {
            for s in 0..dim {
                if let Some((r, amp)) = t.hop(&self.layout, self.grid.as_ref(), s) {
                    rows[r].push((s, amp));
                }
            }
        }
        let mut m = OperatorMatrix::from_row_lists(dim, rows);
        if let Some(e) = &self.electric {
            m = m.add(&electric_matrix(&self.layout, self.grid.as_ref().unwrap(), &e.kernel)?);
        }
        Ok(m)
    }

    /// Dense matrix on the span of the given basis states. Hopping terms
    /// leaving the span are dropped, so the span should be invariant.
    pub fn restricted_dense(&self, states: &[usize]) -> Result<DMatrix<C64>> {
        if self.electric.is_some() {
            return Err(Error::Capability("restriction of the electric piece is not supported".into()));
        }
        let index: std::collections::HashMap<usize, usize> =
            states.iter().enumerate().map(|(k, &s)| (s, k)).collect();
        let n = states.len();
        let mut m = DMatrix::zeros(n, n);
        for (k, &s) in states.iter().enumerate() {
            m[(k, k)] += C64::from(self.diag[s]);
            for t in &self.hops {
                if let Some((r, amp)) = t.hop(&self.layout, self.grid.as_ref(), s) {
                    if let Some(&kr) = index.get(&r) {
                        m[(kr, k)] += amp;
                    }
                }
            }
        }
        Ok(m)
    }
}

impl LinearOperator for PieceOperator {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        for (s, v) in y.iter_mut().enumerate() {
            *v = x[s] * self.diag[s];
        }
        for t in &self.hops {
            for (s, &xs) in x.iter().enumerate() {
                if xs == C64::new(0.0, 0.0) {
                    continue;
                }
                if let Some((r, amp)) = t.hop(&self.layout, self.grid.as_ref(), s) {
                    y[r] += amp * xs;
                }
            }
        }
        if let Some(e) = &self.electric {
            let mut z = x.to_vec();
            to_conjugate_basis(&mut z, &self.layout, e, true);
            let gmask = self.layout.gauge_dim() - 1;
            for (s, v) in z.iter_mut().enumerate() {
                *v *= e.conj_diag[s & gmask];
            }
            to_conjugate_basis(&mut z, &self.layout, e, false);
            for (a, b) in y.iter_mut().zip(&z) {
                *a += b;
            }
        }
    }
}

/// `i [A, B]`, Hermitian when `A` and `B` are.
pub struct CommutatorOperator<'a> {
    pub a: &'a dyn LinearOperator,
    pub b: &'a dyn LinearOperator,
}

impl LinearOperator for CommutatorOperator<'_> {
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        let ab = self.a.apply(&self.b.apply(x));
        let ba = self.b.apply(&self.a.apply(x));
        for ((v, p), q) in y.iter_mut().zip(ab).zip(ba) {
            *v = C64::new(0.0, 1.0) * (p - q);
        }
    }
}

/// Basis states of the fermion register with exactly `n` particles, the
/// gauge registers in state 0.
pub fn particle_sector(layout: &RegisterLayout, n: u32) -> Vec<usize> {
    let shift = layout.gauge_qubits();
    (0..layout.fermion_dim()).filter(|f| f.count_ones() == n).map(|f| f << shift).collect()
}
