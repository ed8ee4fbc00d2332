//! Explicit sparse assembly of each piece, in position space and through
//! momentum-space rewrites.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{
    difference_symbol, electric_kernel, electric_kernel_momentum, electric_projector, field_values,
    magnetic_energy, magnetic_energy_momentum, shift_constant, transverse_kernel,
    transverse_projector, HamiltonianParams,
};
use crate::error::{Error, Result};
use crate::fermion::{bilinear, current_density, current_matrix, gamma};
use crate::gauge::{conjugate_function_matrix, conjugate_matrix, FieldGrid};
use crate::lattice::{coulomb_kernel, momentum_modes, MomentumMode};
use crate::layout::{gauge_register, RegisterLayout};
use crate::linalg::{OperatorMatrix, SparseBuilder};
use crate::C64;

/// Lift a gauge-register operator to the full register.
fn lift_gauge(layout: &RegisterLayout, op: &OperatorMatrix) -> OperatorMatrix {
    OperatorMatrix::identity(layout.fermion_dim()).kron(op)
}

/// Lift a fermion-register operator to the full register.
fn lift_fermion(layout: &RegisterLayout, op: &OperatorMatrix) -> OperatorMatrix {
    op.kron(&OperatorMatrix::identity(layout.gauge_dim()))
}

/// `1/2 sum_{rs} K_rs Pi_r Pi_s` on the full register.
pub fn electric_matrix(layout: &RegisterLayout, grid: &FieldGrid, kernel: &DMatrix<f64>) -> Result<OperatorMatrix> {
    let gauge_only = RegisterLayout::new(0, layout.gauge_registers, layout.qubits_per_register);
    let gdim = super::check_dim(&gauge_only, crate::MAX_EXPLICIT_DIM)?;
    let pi = conjugate_matrix(grid);
    let pi2 = conjugate_function_matrix(grid, |p| p * p);
    let levels = grid.levels();
    let nreg = layout.gauge_registers;
    let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); gdim];
    for col in 0..gdim {
        for r in 0..nreg {
            let kr = gauge_only.level(col, r);
            let w = 0.5 * kernel[(r, r)];
            if w != 0.0 {
                for j in 0..levels {
                    rows[gauge_only.with_level(col, r, j)].push((col, pi2[(j, kr)] * w));
                }
            }
            for s in r + 1..nreg {
                let w = kernel[(r, s)] + kernel[(s, r)];
                if w.abs() < 1e-15 {
                    continue;
                }
                let ks = gauge_only.level(col, s);
                for j in 0..levels {
                    let row_r = gauge_only.with_level(col, r, j);
                    for jj in 0..levels {
                        let row = gauge_only.with_level(row_r, s, jj);
                        rows[row].push((col, pi[(j, kr)] * pi[(jj, ks)] * (0.5 * w)));
                    }
                }
            }
        }
    }
    Ok(lift_gauge(layout, &OperatorMatrix::from_row_lists(gdim, rows)))
}

/// `H_Pi` with the position-space kernel.
pub fn build_h_pi(params: &HamiltonianParams) -> Result<OperatorMatrix> {
    let dim = params.explicit_dim()?;
    match params.grid {
        Some(grid) => electric_matrix(&params.layout(), &grid, &electric_kernel(&params.geometry)),
        None => Ok(OperatorMatrix::zeros(dim)),
    }
}

/// `H_Pi` with an arbitrary kernel, e.g. the continuum Coulomb comparison.
pub fn build_h_pi_with_kernel(params: &HamiltonianParams, kernel: &DMatrix<f64>) -> Result<OperatorMatrix> {
    let dim = params.explicit_dim()?;
    match params.grid {
        Some(grid) => electric_matrix(&params.layout(), &grid, kernel),
        None => Ok(OperatorMatrix::zeros(dim)),
    }
}

fn gauge_dense_ops(grid: &FieldGrid, layout: &RegisterLayout, single: &DMatrix<C64>) -> Vec<OperatorMatrix> {
    let gauge_only = RegisterLayout::new(0, layout.gauge_registers, layout.qubits_per_register);
    let gdim = gauge_only.gauge_dim();
    let levels = grid.levels();
    (0..layout.gauge_registers)
        .map(|r| {
            let mut b = SparseBuilder::new(gdim);
            for col in 0..gdim {
                let k = gauge_only.level(col, r);
                for j in 0..levels {
                    let v = single[(j, k)];
                    if v.norm() > 1e-15 {
                        b.add(gauge_only.with_level(col, r, j), col, v);
                    }
                }
            }
            b.build()
        })
        .collect()
}

fn fourier_component(ops: &[OperatorMatrix], params: &HamiltonianParams, mode: &MomentumMode, dir: usize) -> OperatorMatrix {
    let geom = &params.geometry;
    let v = geom.volume() as f64;
    let mut acc = OperatorMatrix::zeros(ops[0].dim());
    for x in geom.sites() {
        let ph = mode.phase(geom.coords(x).unwrap()).conj() / v;
        acc = acc.add(&ops[gauge_register(x, dir)].scale(ph));
    }
    acc
}

/// `H_Pi = V/2 sum_p Pi(p)^dagger P(p) Pi(p)` from momentum-space operators.
pub fn build_h_pi_momentum(params: &HamiltonianParams) -> Result<OperatorMatrix> {
    let dim = params.explicit_dim()?;
    let Some(grid) = params.grid else { return Ok(OperatorMatrix::zeros(dim)) };
    let layout = params.layout();
    let pis = gauge_dense_ops(&grid, &layout, &conjugate_matrix(&grid));
    let v = params.volume() as f64;
    let mut h = OperatorMatrix::zeros(layout.gauge_dim());
    for mode in momentum_modes(&params.geometry) {
        let p = electric_projector(&mode);
        let comps: Vec<_> = (0..3).map(|i| fourier_component(&pis, params, &mode, i)).collect();
        for i in 0..3 {
            for j in 0..3 {
                if p[(i, j)].norm() < 1e-15 {
                    continue;
                }
                h = h.add(&comps[i].adjoint().matmul(&comps[j]).scale(p[(i, j)] * (v / 2.0)));
            }
        }
    }
    Ok(lift_gauge(&layout, &h))
}

fn gauge_diagonal(params: &HamiltonianParams, f: impl Fn(&[f64]) -> f64) -> Result<OperatorMatrix> {
    let dim = params.explicit_dim()?;
    let Some(grid) = params.grid else { return Ok(OperatorMatrix::zeros(dim)) };
    let layout = params.layout();
    let d: Vec<C64> = (0..layout.gauge_dim()).map(|s| C64::from(f(&field_values(&layout, &grid, s)))).collect();
    Ok(lift_gauge(&layout, &OperatorMatrix::diagonal(&d)))
}

/// `H_A`, diagonal in the field basis with the magnetic energy of each
/// configuration.
pub fn build_h_a(params: &HamiltonianParams) -> Result<OperatorMatrix> {
    gauge_diagonal(params, |a| magnetic_energy(&params.geometry, a))
}

pub fn build_h_a_momentum(params: &HamiltonianParams) -> Result<OperatorMatrix> {
    gauge_diagonal(params, |a| magnetic_energy_momentum(&params.geometry, a))
}

fn fermion_qubits(params: &HamiltonianParams) -> usize {
    4 * params.volume()
}

/// `H_I = -sum_x J^i(x) A'_i(x)` as a sum of Kronecker products of on-site
/// currents and diagonal field operators.
pub fn build_h_i(params: &HamiltonianParams) -> Result<OperatorMatrix> {
    let dim = params.explicit_dim()?;
    let (Some(grid), true) = (params.grid, params.fermions) else { return Ok(OperatorMatrix::zeros(dim)) };
    let layout = params.layout();
    let geom = &params.geometry;
    let snake = params.snake();
    let n = 3 * geom.volume();
    let kernel = if params.transverse_hi { transverse_kernel(geom) } else { DMatrix::identity(n, n) };
    let mut h = OperatorMatrix::zeros(dim);
    for x in geom.sites() {
        for i in 0..3 {
            let row = gauge_register(x, i);
            let field: Vec<C64> = (0..layout.gauge_dim())
                .map(|s| {
                    let a = field_values(&layout, &grid, s);
                    C64::from(-(0..n).map(|r| kernel[(row, r)] * a[r]).sum::<f64>())
                })
                .collect();
            let j = current_density(&snake, x, i + 1, params.g, fermion_qubits(params))?;
            h = h.add(&j.kron(&OperatorMatrix::diagonal(&field)));
        }
    }
    Ok(h)
}

/// `H_C` evaluated directly on occupation numbers.
pub fn build_h_c(params: &HamiltonianParams) -> Result<OperatorMatrix> {
    let dim = params.explicit_dim()?;
    if !params.fermions {
        return Ok(OperatorMatrix::zeros(dim));
    }
    let layout = params.layout();
    let geom = &params.geometry;
    let snake = params.snake();
    let g2 = params.g * params.g;
    let d: Vec<C64> = (0..dim)
        .map(|s| {
            let occ: Vec<f64> = geom
                .sites()
                .map(|x| (0..4).filter(|&a| layout.occupied(s, snake.jw_position(x, a))).count() as f64)
                .collect();
            let mut e = 0.0;
            for x in geom.sites() {
                for y in geom.sites() {
                    if x != y && occ[x] != 0.0 && occ[y] != 0.0 {
                        let k = coulomb_kernel(geom.coords(x).unwrap(), geom.coords(y).unwrap(), geom).unwrap();
                        e += 0.5 * g2 * occ[x] * occ[y] * k;
                    }
                }
            }
            C64::from(e)
        })
        .collect();
    Ok(OperatorMatrix::diagonal(&d))
}

/// `H_f` assembled from Jordan-Wigner bilinear strings.
pub fn build_h_f(params: &HamiltonianParams) -> Result<OperatorMatrix> {
    let dim = params.explicit_dim()?;
    if !params.fermions {
        return Ok(OperatorMatrix::zeros(dim));
    }
    let layout = params.layout();
    let nq = layout.n_qubits();
    let total = fermion_qubits(params);
    let geom = &params.geometry;
    let snake = params.snake();
    let axes = geom.active_axes();
    let g0 = gamma(0);
    let mut b = SparseBuilder::new(dim);
    let mut add = |s: crate::fermion::PauliString, c: C64| {
        for col in 0..dim {
            if let Some((row, amp)) = s.act_on_basis(col, nq) {
                b.add(row, col, amp * c);
            }
        }
    };
    for x in geom.sites() {
        for &j in &axes {
            let y = geom.shift(x, j, 1);
            let yb = geom.shift(x, j, -1);
            let gj = current_matrix(j + 1);
            for a in 0..4 {
                for c in 0..4 {
                    // -(i/2) psibar gamma^j [psi(x+j) - psi(x-j)]
                    let kin = gj[a][c] * C64::new(0.0, -0.5);
                    // -(r/2) psibar [psi(x+j) + psi(x-j)], the on-site part is below
                    let wil = g0[a][c] * (-params.wilson / 2.0);
                    if (kin + wil).norm() > 0.0 {
                        add(bilinear(snake.jw_position(x, a), snake.jw_position(y, c), total)?, kin + wil);
                    }
                    if (wil - kin).norm() > 0.0 {
                        add(bilinear(snake.jw_position(x, a), snake.jw_position(yb, c), total)?, wil - kin);
                    }
                }
            }
        }
        let onsite = params.mass + params.wilson * axes.len() as f64;
        for a in 0..4 {
            for c in 0..4 {
                if g0[a][c].norm() > 0.0 {
                    add(bilinear(snake.jw_position(x, a), snake.jw_position(x, c), total)?, g0[a][c] * onsite);
                }
            }
        }
    }
    Ok(b.build())
}

fn current_fourier(params: &HamiltonianParams, mode: &MomentumMode, dir: usize) -> Result<OperatorMatrix> {
    let geom = &params.geometry;
    let snake = params.snake();
    let v = geom.volume() as f64;
    let nf = fermion_qubits(params);
    let mut acc = OperatorMatrix::zeros(1 << nf);
    for x in geom.sites() {
        let ph = mode.phase(geom.coords(x).unwrap()).conj() / v;
        acc = acc.add(&current_density(&snake, x, dir + 1, params.g, nf)?.scale(ph));
    }
    Ok(acc)
}

fn field_fourier(params: &HamiltonianParams, grid: &FieldGrid, mode: &MomentumMode, dir: usize) -> OperatorMatrix {
    let layout = params.layout();
    let geom = &params.geometry;
    let v = geom.volume() as f64;
    let d: Vec<C64> = (0..layout.gauge_dim())
        .map(|s| {
            let a = field_values(&layout, grid, s);
            geom.sites()
                .map(|x| mode.phase(geom.coords(x).unwrap()).conj() * (a[gauge_register(x, dir)] / v))
                .sum()
        })
        .collect();
    OperatorMatrix::diagonal(&d)
}

fn require_coupled(params: &HamiltonianParams) -> Result<(FieldGrid, RegisterLayout)> {
    params.explicit_dim()?;
    match (params.grid, params.fermions) {
        (Some(grid), true) => Ok((grid, params.layout())),
        _ => Err(Error::Config("momentum-space coupling needs both gauge and fermion registers".into())),
    }
}

/// `H_I = -V sum_p J(p)^dagger P(p) A(p)` from momentum-space operators; the
/// zero mode is dropped when the coupling is transverse.
pub fn build_h_i_momentum(params: &HamiltonianParams) -> Result<OperatorMatrix> {
    let (grid, layout) = require_coupled(params)?;
    let v = params.volume() as f64;
    let mut h = OperatorMatrix::zeros(layout.dim().unwrap());
    for mode in momentum_modes(&params.geometry) {
        let p = if params.transverse_hi {
            match transverse_projector(&mode) {
                Ok(p) => p,
                Err(_) => continue,
            }
        } else {
            nalgebra::Matrix3::identity()
        };
        for i in 0..3 {
            let ji = current_fourier(params, &mode, i)?.adjoint();
            for j in 0..3 {
                if p[(i, j)].norm() < 1e-15 {
                    continue;
                }
                let aj = field_fourier(params, &grid, &mode, j);
                h = h.add(&ji.kron(&aj).scale(p[(i, j)] * -v));
            }
        }
    }
    Ok(h)
}

/// `V/2 sum_{p != 0} |D|^2 O(p)^dagger P(p) O(p)` with
/// `O(p) = A(p) - J(p) / |D|^2`; positive semidefinite term by term.
pub fn completed_square(params: &HamiltonianParams) -> Result<OperatorMatrix> {
    let (grid, layout) = require_coupled(params)?;
    if !params.transverse_hi {
        return Err(Error::Config("the completed-square form requires the transverse coupling".into()));
    }
    let v = params.volume() as f64;
    let mut h = OperatorMatrix::zeros(layout.dim().unwrap());
    for mode in momentum_modes(&params.geometry) {
        let Ok(p) = transverse_projector(&mode) else { continue };
        let d2: f64 = difference_symbol(&mode).iter().map(|z| z.norm_sqr()).sum();
        let o: Vec<OperatorMatrix> = (0..3)
            .map(|j| {
                let a = lift_gauge(&layout, &field_fourier(params, &grid, &mode, j));
                let jj = lift_fermion(&layout, &current_fourier(params, &mode, j)?);
                Ok(a.sub(&jj.scale(C64::from(1.0 / d2))))
            })
            .collect::<Result<_>>()?;
        for i in 0..3 {
            let oi = o[i].adjoint();
            for j in 0..3 {
                if p[(i, j)].norm() < 1e-15 {
                    continue;
                }
                h = h.add(&oi.matmul(&o[j]).scale(p[(i, j)] * (v * d2 / 2.0)));
            }
        }
    }
    Ok(h)
}

/// `V/2 sum_{p != 0} J(p)^dagger P(p) J(p) / |D|^2`, the current-current
/// remainder of the completed square.
pub fn current_counterterm(params: &HamiltonianParams) -> Result<OperatorMatrix> {
    let (_, layout) = require_coupled(params)?;
    let v = params.volume() as f64;
    let mut h = OperatorMatrix::zeros(layout.fermion_dim());
    for mode in momentum_modes(&params.geometry) {
        let Ok(p) = transverse_projector(&mode) else { continue };
        let d2: f64 = difference_symbol(&mode).iter().map(|z| z.norm_sqr()).sum();
        let js: Vec<OperatorMatrix> = (0..3).map(|j| current_fourier(params, &mode, j)).collect::<Result<_>>()?;
        for i in 0..3 {
            let ji = js[i].adjoint();
            for j in 0..3 {
                if p[(i, j)].norm() < 1e-15 {
                    continue;
                }
                h = h.add(&ji.matmul(&js[j]).scale(p[(i, j)] * (v / (2.0 * d2))));
            }
        }
    }
    Ok(lift_fermion(&layout, &h))
}

/// `H_A + H_I` through the completed square: `CS - counterterm`.
pub fn build_ha_hi_momentum(params: &HamiltonianParams) -> Result<OperatorMatrix> {
    Ok(completed_square(params)?.sub(&current_counterterm(params)?))
}

/// The five pieces as explicit matrices.
#[derive(Debug, Clone)]
pub struct HamiltonianPieces {
    pub electric: OperatorMatrix,
    pub magnetic: OperatorMatrix,
    pub interaction: OperatorMatrix,
    pub coulomb: OperatorMatrix,
    pub fermion: OperatorMatrix,
    pub shift_constant: f64,
}

impl HamiltonianPieces {
    pub fn build(params: &HamiltonianParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            electric: build_h_pi(params)?,
            magnetic: build_h_a(params)?,
            interaction: build_h_i(params)?,
            coulomb: build_h_c(params)?,
            fermion: build_h_f(params)?,
            shift_constant: if params.fermions {
                shift_constant(params.volume(), params.mass, params.wilson)
            } else {
                0.0
            },
        })
    }

    pub fn total(&self) -> OperatorMatrix {
        self.electric
            .add(&self.magnetic)
            .add(&self.interaction)
            .add(&self.coulomb)
            .add(&self.fermion)
    }

    pub fn iter(&self) -> impl Iterator<Item = (super::Piece, &OperatorMatrix)> {
        use super::Piece::*;
        [
            (Electric, &self.electric),
            (Magnetic, &self.magnetic),
            (Interaction, &self.interaction),
            (Coulomb, &self.coulomb),
            (Fermion, &self.fermion),
        ]
        .into_iter()
    }
}

/// Summary of how far the continuum-kernel electric energy departs from the
/// transverse lattice one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelComparison {
    pub max_kernel_difference: f64,
    pub transverse_kernel_momentum_mismatch: f64,
}

pub fn compare_electric_kernels(params: &HamiltonianParams) -> KernelComparison {
    let geom = &params.geometry;
    let k = electric_kernel(geom);
    KernelComparison {
        max_kernel_difference: (super::electric_kernel_coulomb(geom) - &k).amax(),
        transverse_kernel_momentum_mismatch: (electric_kernel_momentum(geom) - &k).amax(),
    }
}
