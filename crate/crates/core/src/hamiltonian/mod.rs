//! The lattice Hamiltonian `H = H_Pi + H_A + H_I + H_C + H_f`.
//!
//! Gauge pieces are quadratic forms in the field (`H_A`) or the conjugate
//! variable (`H_Pi`); fermion pieces are sums of Jordan-Wigner bilinears and
//! density-density products, some carrying a field-basis diagonal factor.
//! Every piece can be assembled as an explicit sparse matrix on small
//! registers and applied matrix-free through [`HamiltonianModel`].

mod build;
mod checks;
mod kernels;
mod model;
mod terms;

pub use build::*;
pub use checks::*;
pub use kernels::*;
pub use model::*;
pub use terms::*;

use nalgebra::{DMatrix, Matrix3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{current_matrix, gamma};
use crate::gauge::FieldGrid;
use crate::lattice::{LatticeGeometry, MomentumMode, SnakePath};
use crate::layout::RegisterLayout;
use crate::{C64, MAX_EXPLICIT_DIM};

/// The five Hamiltonian pieces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Piece {
    Electric,
    Magnetic,
    Interaction,
    Coulomb,
    Fermion,
}

impl Piece {
    pub fn name(self) -> &'static str {
        match self {
            Piece::Electric => "H_Pi",
            Piece::Magnetic => "H_A",
            Piece::Interaction => "H_I",
            Piece::Coulomb => "H_C",
            Piece::Fermion => "H_f",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianParams {
    pub geometry: LatticeGeometry,
    pub g: f64,
    pub mass: f64,
    pub wilson: f64,
    /// Field grid shared by every gauge register; `None` drops the gauge
    /// registers.
    pub grid: Option<FieldGrid>,
    /// Whether the fermion register is present.
    pub fermions: bool,
    /// Couple the current to the transverse part of the field only.
    pub transverse_hi: bool,
}

impl HamiltonianParams {
    pub fn new(
        geometry: LatticeGeometry,
        g: f64,
        mass: f64,
        wilson: f64,
        grid: Option<FieldGrid>,
        fermions: bool,
    ) -> Result<Self> {
        let p = Self { geometry, g, mass, wilson, grid, fermions, transverse_hi: true };
        p.validate()?;
        Ok(p)
    }

    pub fn fermion_only(geometry: LatticeGeometry, mass: f64, wilson: f64) -> Result<Self> {
        Self::new(geometry, 0.0, mass, wilson, None, true)
    }

    pub fn gauge_only(geometry: LatticeGeometry, grid: FieldGrid) -> Result<Self> {
        Self::new(geometry, 0.0, 0.0, 1.0, Some(grid), false)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("g", self.g), ("mass", self.mass), ("wilson", self.wilson)] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite")));
            }
        }
        if self.mass < 0.0 {
            return Err(Error::Config(format!("mass must be nonnegative, got {}", self.mass)));
        }
        if self.wilson <= 0.0 {
            return Err(Error::Config(format!("Wilson coefficient must be positive, got {}", self.wilson)));
        }
        if self.grid.is_none() && !self.fermions {
            return Err(Error::Config("neither gauge nor fermion registers requested".into()));
        }
        Ok(())
    }

    pub fn volume(&self) -> usize {
        self.geometry.volume()
    }

    pub fn layout(&self) -> RegisterLayout {
        let v = self.volume();
        let fermion = if self.fermions { 4 * v } else { 0 };
        match self.grid {
            Some(g) => RegisterLayout::new(fermion, 3 * v, g.n_qubits),
            None => RegisterLayout::new(fermion, 0, 0),
        }
    }

    pub fn snake(&self) -> SnakePath {
        SnakePath::new(&self.geometry)
    }

    /// Hilbert-space dimension, provided explicit matrices are supported.
    pub fn explicit_dim(&self) -> Result<usize> {
        check_dim(&self.layout(), MAX_EXPLICIT_DIM)
    }
}

pub(crate) fn check_dim(layout: &RegisterLayout, cap: usize) -> Result<usize> {
    match layout.dim() {
        Some(d) if d <= cap => Ok(d),
        _ => Err(Error::Capability(format!(
            "{} qubits exceed the supported dimension {cap}",
            layout.n_qubits()
        ))),
    }
}

/// Free Wilson-fermion energy `E_p`.
pub fn dispersion(p: [f64; 3], mass: f64, wilson: f64) -> f64 {
    let kinetic: f64 = p.iter().map(|q| q.sin().powi(2)).sum();
    let m_eff = mass + 2.0 * wilson * p.iter().map(|q| (q / 2.0).sin().powi(2)).sum::<f64>();
    (kinetic + m_eff * m_eff).sqrt()
}

/// Upper bound on `E_p^2` over the Brillouin zone.
pub fn dispersion_bound_sq(mass: f64, wilson: f64) -> f64 {
    3.0 + mass * mass + 12.0 * mass * wilson + 36.0 * wilson * wilson
}

/// Constant that makes the fermion Hamiltonian positive semidefinite.
pub fn shift_constant(volume: usize, mass: f64, wilson: f64) -> f64 {
    2.0 * volume as f64 * dispersion_bound_sq(mass, wilson).sqrt()
}

/// Forward-difference symbol `D_i = e^{i p_i} - 1`.
pub fn difference_symbol(mode: &MomentumMode) -> [C64; 3] {
    mode.p.map(|q| C64::from_polar(1.0, q) - 1.0)
}

/// Transverse projector `P_ij = delta_ij - D_i conj(D_j) / |D|^2`; Hermitian
/// and real whenever every `p_i` is `0` or `pi`.
pub fn transverse_projector(mode: &MomentumMode) -> Result<Matrix3<C64>> {
    if mode.is_zero() {
        return Err(Error::Domain("transverse projector is undefined on the zero mode".into()));
    }
    let d = difference_symbol(mode);
    let norm: f64 = d.iter().map(|z| z.norm_sqr()).sum();
    Ok(Matrix3::from_fn(|i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        C64::from(delta) - d[i] * d[j].conj() / norm
    }))
}

/// Projector used by the electric energy: transverse on nonzero modes and
/// the identity on the zero mode.
pub fn electric_projector(mode: &MomentumMode) -> Matrix3<C64> {
    transverse_projector(mode).unwrap_or_else(|_| Matrix3::identity())
}

/// Single-particle Bloch matrix `h(p) = sum_j gamma^0 gamma^j sin p_j +
/// gamma^0 (m + 2 r sum_j sin^2(p_j/2))`, eigenvalues `+-E_p`.
pub fn bloch_matrix(p: [f64; 3], mass: f64, wilson: f64) -> DMatrix<C64> {
    let m_eff = mass + 2.0 * wilson * p.iter().map(|q| (q / 2.0).sin().powi(2)).sum::<f64>();
    let beta = gamma(0);
    let mut h = DMatrix::from_fn(4, 4, |a, b| beta[a][b] * m_eff);
    for (j, &q) in p.iter().enumerate() {
        let alpha = current_matrix(j + 1);
        for a in 0..4 {
            for b in 0..4 {
                h[(a, b)] += alpha[a][b] * q.sin();
            }
        }
    }
    h
}
