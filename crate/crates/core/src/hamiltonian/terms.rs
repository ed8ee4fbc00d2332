//! Fermionic terms of `H_I`, `H_C` and `H_f` in Jordan-Wigner form.

use serde::{Deserialize, Serialize};

use super::{transverse_kernel, HamiltonianParams, Piece};
use crate::fermion::{current_matrix, gamma};
use crate::gauge::FieldGrid;
use crate::lattice::coulomb_kernel;
use crate::layout::RegisterLayout;
use crate::C64;

/// A Hermitian operator acting on at most two fermion modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Term {
    /// `c w psi^dagger_a psi_b + h.c.` for `a != b`, or `c w n_a` for
    /// `a == b` (then `c w` must be real). `w = sum_r weight_r A_r` is a
    /// field-basis diagonal factor, `w = 1` when `field` is `None`.
    Bilinear {
        create: usize,
        annihilate: usize,
        coeff: C64,
        field: Option<Vec<(usize, C64)>>,
    },
    /// `c n_a n_b`.
    DensityDensity { a: usize, b: usize, coeff: f64 },
}

impl Term {
    pub fn modes(&self) -> (usize, usize) {
        match *self {
            Term::Bilinear { create, annihilate, .. } => (create, annihilate),
            Term::DensityDensity { a, b, .. } => (a, b),
        }
    }

    /// Whether the term is diagonal in the computational basis.
    pub fn is_diagonal(&self) -> bool {
        match self {
            Term::Bilinear { create, annihilate, .. } => create == annihilate,
            Term::DensityDensity { .. } => true,
        }
    }

    pub fn has_field(&self) -> bool {
        matches!(self, Term::Bilinear { field: Some(_), .. })
    }

    /// Amplitude multiplying `psi^dagger_a psi_b` in computational state
    /// `state` (which fixes the field values).
    pub fn amplitude(&self, layout: &RegisterLayout, grid: Option<&FieldGrid>, state: usize) -> C64 {
        match self {
            Term::Bilinear { coeff, field: None, .. } => *coeff,
            Term::Bilinear { coeff, field: Some(w), .. } => {
                let grid = grid.expect("field-dependent term without a field grid");
                let mut s = C64::new(0.0, 0.0);
                for &(r, wr) in w {
                    s += wr * grid.value(layout.level(state, r));
                }
                coeff * s
            }
            Term::DensityDensity { coeff, .. } => C64::from(*coeff),
        }
    }

    /// Diagonal matrix element at `state`; zero for hopping terms.
    pub fn diagonal_value(&self, layout: &RegisterLayout, grid: Option<&FieldGrid>, state: usize) -> f64 {
        match *self {
            Term::Bilinear { create, annihilate, .. } if create == annihilate => {
                if layout.occupied(state, create) {
                    self.amplitude(layout, grid, state).re
                } else {
                    0.0
                }
            }
            Term::DensityDensity { a, b, coeff }
                if layout.occupied(state, a) && layout.occupied(state, b) => {
                    coeff
                }
            _ => 0.0,
        }
    }

    /// For a hopping term, the single basis state reached from `state` and
    /// its amplitude; `None` when the term annihilates `state` or is diagonal.
    pub fn hop(&self, layout: &RegisterLayout, grid: Option<&FieldGrid>, state: usize) -> Option<(usize, C64)> {
        let Term::Bilinear { create: a, annihilate: b, .. } = *self else { return None };
        if a == b {
            return None;
        }
        let (na, nb) = (layout.occupied(state, a), layout.occupied(state, b));
        if na == nb {
            return None;
        }
        let flipped = state ^ (1 << layout.bit_of_qubit(a)) ^ (1 << layout.bit_of_qubit(b));
        let sign = if layout.occupied_between(state, a, b).is_multiple_of(2) { 1.0 } else { -1.0 };
        let amp = self.amplitude(layout, grid, state) * sign;
        // b occupied: psi^dagger_a psi_b acts; otherwise its adjoint does
        Some((flipped, if nb { amp } else { amp.conj() }))
    }
}

/// A term together with where it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggedTerm {
    pub piece: Piece,
    /// Axis of a nearest-neighbour hop; `create` sits at the backward end.
    pub hop_axis: Option<usize>,
    pub term: Term,
}

/// `H_f`: forward hops `psi^dagger(x) M_j psi(x + j) + h.c.` along active
/// axes with `M_j = -(i/2) gamma^0 gamma^j - (r/2) gamma^0`, and the on-site
/// `(m + r * #active axes) gamma^0`.
pub fn fermion_terms(params: &HamiltonianParams) -> Vec<TaggedTerm> {
    if !params.fermions {
        return Vec::new();
    }
    let geom = &params.geometry;
    let snake = params.snake();
    let axes = geom.active_axes();
    let beta = gamma(0);
    let mut out = Vec::new();
    for x in geom.sites() {
        for &j in &axes {
            let y = geom.shift(x, j, 1);
            let alpha = current_matrix(j + 1);
            for a in 0..4 {
                for b in 0..4 {
                    let c = alpha[a][b] * C64::new(0.0, -0.5) - beta[a][b] * (params.wilson / 2.0);
                    if c.norm() == 0.0 {
                        continue;
                    }
                    out.push(TaggedTerm {
                        piece: Piece::Fermion,
                        hop_axis: Some(j),
                        term: Term::Bilinear {
                            create: snake.jw_position(x, a),
                            annihilate: snake.jw_position(y, b),
                            coeff: c,
                            field: None,
                        },
                    });
                }
            }
        }
        let onsite = params.mass + params.wilson * axes.len() as f64;
        for a in 0..4 {
            for b in a..4 {
                let c = beta[a][b] * onsite;
                if c.norm() == 0.0 {
                    continue;
                }
                out.push(TaggedTerm {
                    piece: Piece::Fermion,
                    hop_axis: None,
                    term: Term::Bilinear {
                        create: snake.jw_position(x, a),
                        annihilate: snake.jw_position(x, b),
                        coeff: c,
                        field: None,
                    },
                });
            }
        }
    }
    out
}

/// `H_I = -sum_x J^i(x) A'_i(x)`, where `A'` is the transverse projection
/// of the field when `params.transverse_hi` is set and the bare field
/// otherwise. One term per on-site spinor pair.
pub fn interaction_terms(params: &HamiltonianParams) -> Vec<TaggedTerm> {
    if !params.fermions || params.grid.is_none() || params.g == 0.0 {
        return Vec::new();
    }
    let geom = &params.geometry;
    let snake = params.snake();
    let n = 3 * geom.volume();
    let kernel = if params.transverse_hi {
        transverse_kernel(geom)
    } else {
        nalgebra::DMatrix::identity(n, n)
    };
    let mut out = Vec::new();
    for x in geom.sites() {
        for a in 0..4 {
            for b in a..4 {
                let mut weights = vec![C64::new(0.0, 0.0); n];
                for i in 0..3 {
                    let m = current_matrix(i + 1)[a][b];
                    if m.norm() == 0.0 {
                        continue;
                    }
                    let row = crate::layout::gauge_register(x, i);
                    for r in 0..n {
                        weights[r] += -params.g * m * kernel[(row, r)];
                    }
                }
                let field: Vec<(usize, C64)> = weights
                    .into_iter()
                    .enumerate()
                    .filter(|(_, w)| w.norm() > 1e-14)
                    .collect();
                if field.is_empty() {
                    continue;
                }
                out.push(TaggedTerm {
                    piece: Piece::Interaction,
                    hop_axis: None,
                    term: Term::Bilinear {
                        create: snake.jw_position(x, a),
                        annihilate: snake.jw_position(x, b),
                        coeff: C64::new(1.0, 0.0),
                        field: Some(field),
                    },
                });
            }
        }
    }
    out
}

/// `H_C = (g^2/2) sum_x sum_{y != x} N(x) N(y) / (4 pi |x - y|)`, one
/// density-density term per pair of modes on distinct sites.
pub fn coulomb_terms(params: &HamiltonianParams) -> Vec<TaggedTerm> {
    if !params.fermions || params.g == 0.0 {
        return Vec::new();
    }
    let geom = &params.geometry;
    let snake = params.snake();
    let g2 = params.g * params.g;
    let mut out = Vec::new();
    for x in geom.sites() {
        for y in x + 1..geom.volume() {
            let k = coulomb_kernel(geom.coords(x).unwrap(), geom.coords(y).unwrap(), geom).unwrap();
            for a in 0..4 {
                for b in 0..4 {
                    out.push(TaggedTerm {
                        piece: Piece::Coulomb,
                        hop_axis: None,
                        term: Term::DensityDensity {
                            a: snake.jw_position(x, a),
                            b: snake.jw_position(y, b),
                            coeff: g2 * k,
                        },
                    });
                }
            }
        }
    }
    out
}

/// All fermionic terms, in the order `H_f`, `H_I`, `H_C`.
pub fn all_terms(params: &HamiltonianParams) -> Vec<TaggedTerm> {
    let mut t = fermion_terms(params);
    t.extend(interaction_terms(params));
    t.extend(coulomb_terms(params));
    t
}
