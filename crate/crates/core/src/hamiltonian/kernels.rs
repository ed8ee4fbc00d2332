//! Quadratic kernels of the gauge pieces.
//!
//! A gauge configuration is a vector of `3V` reals indexed by the register
//! number `3 * site + direction`. Kernels are real symmetric `3V x 3V`
//! matrices `K` with energy `x^T K x / 2`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::{difference_symbol, electric_projector, transverse_projector};
use crate::lattice::{coulomb_kernel, lattice_green_function, momentum_modes, LatticeGeometry};
use crate::layout::gauge_register;
use crate::C64;

/// `x^T K x / 2`.
pub fn quadratic_value(k: &DMatrix<f64>, x: &[f64]) -> f64 {
    let n = x.len();
    let mut e = 0.0;
    for r in 0..n {
        if x[r] == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for s in 0..n {
            row += k[(r, s)] * x[s];
        }
        e += x[r] * row;
    }
    0.5 * e
}

/// Site index of the separation `x - y` reduced onto the torus.
fn separation(geom: &LatticeGeometry, x: usize, y: usize) -> usize {
    let (cx, cy) = (geom.coords(x).unwrap(), geom.coords(y).unwrap());
    let d = geom.dims();
    let c = [0, 1, 2].map(|i| (cx[i] + d[i] - cy[i]) % d[i]);
    geom.site_index(c).unwrap()
}

/// Magnetic energy `1/2 sum_x sum_{i<j} (d_i A_j - d_j A_i)^2` with forward
/// differences `d_i f(x) = f(x + i) - f(x)`.
pub fn magnetic_energy(geom: &LatticeGeometry, a: &[f64]) -> f64 {
    let mut e = 0.0;
    for x in geom.sites() {
        for i in 0..3 {
            for j in i + 1..3 {
                let dij = a[gauge_register(geom.shift(x, i, 1), j)] - a[gauge_register(x, j)];
                let dji = a[gauge_register(geom.shift(x, j, 1), i)] - a[gauge_register(x, i)];
                e += (dij - dji).powi(2);
            }
        }
    }
    0.5 * e
}

/// The same functional written as a Laplacian term plus a mixed term whose
/// second difference is taken forward in both directions,
/// `-1/2 sum A_j lap_i A_j + 1/2 sum A_i (A_j(x+i+j) - A_j(x+i) - A_j(x+j) + A_j(x))`.
/// Because the mixed difference is displaced by one site relative to
/// `d_i^+ d_j^-`, this form assigns energy to pure-gradient fields and
/// differs from [`magnetic_energy`] on every lattice with an active axis.
pub fn magnetic_energy_forward_stencil(geom: &LatticeGeometry, a: &[f64]) -> f64 {
    let f = |site: usize, dir: usize| a[gauge_register(site, dir)];
    let mut e = 0.0;
    for x in geom.sites() {
        for i in 0..3 {
            let xp = geom.shift(x, i, 1);
            let xm = geom.shift(x, i, -1);
            for j in 0..3 {
                e -= 0.5 * f(x, j) * (f(xp, j) - 2.0 * f(x, j) + f(xm, j));
                let xij = geom.shift(xp, j, 1);
                let xj = geom.shift(x, j, 1);
                e += 0.5 * f(x, i) * (f(xij, j) - f(xp, j) - f(xj, j) + f(x, j));
            }
        }
    }
    e
}

fn fourier_components(geom: &LatticeGeometry, a: &[f64]) -> Vec<[C64; 3]> {
    let v = geom.volume() as f64;
    momentum_modes(geom)
        .iter()
        .map(|mode| {
            let mut out = [C64::new(0.0, 0.0); 3];
            for x in geom.sites() {
                let ph = mode.phase(geom.coords(x).unwrap()).conj() / v;
                for (i, o) in out.iter_mut().enumerate() {
                    *o += ph * a[gauge_register(x, i)];
                }
            }
            out
        })
        .collect()
}

/// Magnetic energy in momentum space,
/// `V/2 sum_{p != 0} |D(p)|^2 A(p)^dagger P(p) A(p)`.
pub fn magnetic_energy_momentum(geom: &LatticeGeometry, a: &[f64]) -> f64 {
    let v = geom.volume() as f64;
    let comps = fourier_components(geom, a);
    let mut e = 0.0;
    for (mode, ap) in momentum_modes(geom).iter().zip(&comps) {
        if mode.is_zero() {
            continue;
        }
        let p = transverse_projector(mode).unwrap();
        let d2: f64 = difference_symbol(mode).iter().map(|z| z.norm_sqr()).sum();
        let mut q = C64::new(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                q += ap[i].conj() * p[(i, j)] * ap[j];
            }
        }
        e += 0.5 * v * d2 * q.re;
    }
    e
}

/// Kernel of a quadratic functional recovered by polarization.
pub fn polarize(n: usize, energy: impl Fn(&[f64]) -> f64) -> DMatrix<f64> {
    let unit = |r: usize| {
        let mut x = vec![0.0; n];
        x[r] = 1.0;
        x
    };
    let diag: Vec<f64> = (0..n).map(|r| energy(&unit(r))).collect();
    DMatrix::from_fn(n, n, |r, s| {
        if r == s {
            2.0 * diag[r]
        } else {
            let mut x = unit(r);
            x[s] = 1.0;
            energy(&x) - diag[r] - diag[s]
        }
    })
}

pub fn magnetic_kernel(geom: &LatticeGeometry) -> DMatrix<f64> {
    polarize(3 * geom.volume(), |a| magnetic_energy(geom, a))
}

/// `(d_i^+ d_j^- f)(y) = f(y+i) - f(y+i-j) - f(y) + f(y-j)` as a list of
/// `(site, coefficient)` pairs.
fn mixed_stencil(geom: &LatticeGeometry, y: usize, i: usize, j: usize) -> [(usize, f64); 4] {
    let yi = geom.shift(y, i, 1);
    [(yi, 1.0), (geom.shift(yi, j, -1), -1.0), (y, -1.0), (geom.shift(y, j, -1), 1.0)]
}

/// Add `sum_y w(x, y) (d_i^+ d_j^- f_j)(y)` couplings into `k` (row `(x,i)`).
fn add_convolved_stencil(geom: &LatticeGeometry, k: &mut DMatrix<f64>, w: impl Fn(usize, usize) -> f64) {
    for x in geom.sites() {
        for y in geom.sites() {
            let wxy = w(x, y);
            if wxy == 0.0 {
                continue;
            }
            for i in 0..3 {
                for j in 0..3 {
                    for (z, c) in mixed_stencil(geom, y, i, j) {
                        k[(gauge_register(x, i), gauge_register(z, j))] += wxy * c;
                    }
                }
            }
        }
    }
}

/// Electric kernel in position space: identity plus the lattice Green's
/// function convolved with the mixed second difference. Transverse on every
/// nonzero mode and the identity on the zero mode.
pub fn electric_kernel(geom: &LatticeGeometry) -> DMatrix<f64> {
    let n = 3 * geom.volume();
    let green = lattice_green_function(geom);
    let mut k = DMatrix::identity(n, n);
    add_convolved_stencil(geom, &mut k, |x, y| green[separation(geom, x, y)]);
    symmetrize(k)
}

/// Electric kernel from the momentum-space projector,
/// `K = (1/V) sum_p e^{ip(x-y)} P(p)` with `P(0) = 1`.
pub fn electric_kernel_momentum(geom: &LatticeGeometry) -> DMatrix<f64> {
    momentum_kernel(geom, |mode| Some(electric_projector(mode)))
}

/// Comparison build with the continuum Coulomb kernel `1/(4 pi |x - y|)`
/// (coincident points excluded) and forward second differences in both
/// directions. Not transverse on the lattice.
pub fn electric_kernel_coulomb(geom: &LatticeGeometry) -> DMatrix<f64> {
    let n = 3 * geom.volume();
    let mut k = DMatrix::identity(n, n);
    for x in geom.sites() {
        for y in geom.sites() {
            if x == y {
                continue;
            }
            let w = coulomb_kernel(geom.coords(x).unwrap(), geom.coords(y).unwrap(), geom).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let yi = geom.shift(y, i, 1);
                    let stencil = [
                        (geom.shift(yi, j, 1), 1.0),
                        (yi, -1.0),
                        (geom.shift(y, j, 1), -1.0),
                        (y, 1.0),
                    ];
                    for (z, c) in stencil {
                        k[(gauge_register(x, i), gauge_register(z, j))] += w * c;
                    }
                }
            }
        }
    }
    symmetrize(k)
}

/// Kernel `T` with `A^T_i(x) = sum T[(x,i),(y,j)] A_j(y)`, the transverse
/// part of the field with the zero mode removed. Position-space route.
pub fn transverse_kernel(geom: &LatticeGeometry) -> DMatrix<f64> {
    let v = geom.volume();
    let n = 3 * v;
    let green = lattice_green_function(geom);
    let mut k = DMatrix::zeros(n, n);
    for x in geom.sites() {
        for y in geom.sites() {
            let kron = if x == y { 1.0 } else { 0.0 };
            for i in 0..3 {
                k[(gauge_register(x, i), gauge_register(y, i))] += kron - 1.0 / v as f64;
            }
        }
    }
    add_convolved_stencil(geom, &mut k, |x, y| green[separation(geom, x, y)]);
    symmetrize(k)
}

/// Momentum-space route to [`transverse_kernel`].
pub fn transverse_kernel_momentum(geom: &LatticeGeometry) -> DMatrix<f64> {
    momentum_kernel(geom, |mode| transverse_projector(mode).ok())
}

fn momentum_kernel(
    geom: &LatticeGeometry,
    projector: impl Fn(&crate::lattice::MomentumMode) -> Option<nalgebra::Matrix3<C64>>,
) -> DMatrix<f64> {
    let v = geom.volume();
    let mut k = DMatrix::zeros(3 * v, 3 * v);
    for mode in momentum_modes(geom) {
        let Some(p) = projector(&mode) else { continue };
        for x in geom.sites() {
            let cx = geom.coords(x).unwrap();
            for y in geom.sites() {
                let ph = mode.phase(cx) * mode.phase(geom.coords(y).unwrap()).conj() / v as f64;
                for i in 0..3 {
                    for j in 0..3 {
                        k[(gauge_register(x, i), gauge_register(y, j))] += (ph * p[(i, j)]).re;
                    }
                }
            }
        }
    }
    k
}

fn symmetrize(k: DMatrix<f64>) -> DMatrix<f64> {
    (&k + k.transpose()) * 0.5
}

/// `1 / (4 pi)`, the nearest-neighbour value of the Coulomb kernel.
pub const UNIT_COULOMB: f64 = 1.0 / (4.0 * PI);

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn gradient_config(geom: &LatticeGeometry, phi: &[f64]) -> Vec<f64> {
        let mut a = vec![0.0; 3 * geom.volume()];
        for x in geom.sites() {
            for j in 0..3 {
                a[gauge_register(x, j)] = phi[geom.shift(x, j, 1)] - phi[x];
            }
        }
        a
    }

    #[test]
    fn magnetic_energy_examples() {
        let geom = LatticeGeometry::new([2, 1, 1]).unwrap();
        let mut a = vec![0.0; 6];
        a[gauge_register(0, 1)] = 0.8;
        // curl_xy = d_x A_y is -0.8 at site 0 and +0.8 at site 1
        assert!((magnetic_energy(&geom, &a) - 0.64).abs() < 1e-14);
        assert!((magnetic_energy_momentum(&geom, &a) - 0.64).abs() < 1e-14);
        let uniform = vec![1.7; 6];
        assert_eq!(magnetic_energy(&geom, &uniform), 0.0);
    }

    #[test]
    fn gradients_cost_nothing() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for dims in [[2, 2, 1], [3, 2, 1], [3, 3, 2], [4, 1, 1]] {
            let geom = LatticeGeometry::new(dims).unwrap();
            for _ in 0..20 {
                let phi: Vec<f64> = (0..geom.volume()).map(|_| rng.random_range(-2.0..2.0)).collect();
                let a = gradient_config(&geom, &phi);
                assert!(magnetic_energy(&geom, &a).abs() < 1e-12);
                assert!(magnetic_energy_momentum(&geom, &a).abs() < 1e-12);
                let t = transverse_kernel(&geom);
                let at = &t * nalgebra::DVector::from_vec(a.clone());
                assert!(at.amax() < 1e-10);
                let pi_energy = quadratic_value(&electric_kernel(&geom), &a);
                // only the zero mode of a gradient survives, and it has none
                assert!(pi_energy.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn forward_stencil_variant_is_not_gradient_free() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        for dims in [[2, 1, 1], [2, 2, 1], [3, 3, 1]] {
            let geom = LatticeGeometry::new(dims).unwrap();
            let phi: Vec<f64> = (0..geom.volume()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let a = gradient_config(&geom, &phi);
            assert!(magnetic_energy(&geom, &a).abs() < 1e-12);
            assert!(magnetic_energy_forward_stencil(&geom, &a).abs() > 1e-3);
        }
        // on a constant field both forms vanish
        let geom = LatticeGeometry::new([3, 2, 1]).unwrap();
        assert!(magnetic_energy_forward_stencil(&geom, &[0.4; 18]).abs() < 1e-12);
    }

    #[test]
    fn position_and_momentum_kernels_agree() {
        for dims in [[2, 1, 1], [2, 2, 1], [3, 2, 1], [4, 1, 1], [2, 2, 2]] {
            let geom = LatticeGeometry::new(dims).unwrap();
            let km = magnetic_kernel(&geom);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
            for _ in 0..10 {
                let a: Vec<f64> = (0..3 * geom.volume()).map(|_| rng.random_range(-1.0..1.0)).collect();
                let e = magnetic_energy(&geom, &a);
                assert!((quadratic_value(&km, &a) - e).abs() < 1e-10);
                assert!((magnetic_energy_momentum(&geom, &a) - e).abs() < 1e-10);
            }
            assert!((electric_kernel(&geom) - electric_kernel_momentum(&geom)).amax() < 1e-10);
            assert!((transverse_kernel(&geom) - transverse_kernel_momentum(&geom)).amax() < 1e-10);
        }
    }

    #[test]
    fn electric_kernel_is_psd_projector_plus_zero_mode() {
        let geom = LatticeGeometry::new([3, 2, 1]).unwrap();
        let k = electric_kernel(&geom);
        assert!((&k * &k - &k).amax() < 1e-10);
        let t = transverse_kernel(&geom);
        assert!((&t * &t - &t).amax() < 1e-10);
        // rank: 2 transverse per nonzero mode, 3 for the zero mode
        let trace: f64 = k.trace();
        assert!((trace - (2.0 * (geom.volume() - 1) as f64 + 3.0)).abs() < 1e-9);
    }

    #[test]
    fn coulomb_comparison_is_reported_not_equal() {
        let geom = LatticeGeometry::new([3, 3, 1]).unwrap();
        let diff = (electric_kernel_coulomb(&geom) - electric_kernel(&geom)).amax();
        assert!(diff.is_finite() && diff > 0.0);
    }
}
