//! Periodic lattice geometry, momentum modes and lattice kernels.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Integer site coordinates `(x, y, z)`.
pub type Coords = [usize; 3];

/// Anisotropic periodic lattice with `dims[i]` sites along axis `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeGeometry {
    dims: [usize; 3],
}

impl LatticeGeometry {
    pub fn new(dims: [usize; 3]) -> Result<Self> {
        if dims.contains(&0) {
            return domain(format!("lattice dims must be positive, got {dims:?}"));
        }
        Ok(Self { dims })
    }

    pub fn cubic(l: usize) -> Result<Self> {
        Self::new([l, l, l])
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn volume(&self) -> usize {
        self.dims.iter().product()
    }

    /// Axes with at least two sites. Hopping and finite differences along
    /// the other axes are suppressed.
    pub fn active_axes(&self) -> Vec<usize> {
        (0..3).filter(|&i| self.dims[i] >= 2).collect()
    }

    /// Row-major linear index `(x * L_y + y) * L_z + z`.
    pub fn site_index(&self, x: Coords) -> Result<usize> {
        for i in 0..3 {
            if x[i] >= self.dims[i] {
                return domain(format!(
                    "coordinate {x:?} outside lattice {:?}",
                    self.dims
                ));
            }
        }
        Ok(self.index_unchecked(x))
    }

    pub(crate) fn index_unchecked(&self, x: Coords) -> usize {
        (x[0] * self.dims[1] + x[1]) * self.dims[2] + x[2]
    }

    pub fn coords(&self, index: usize) -> Result<Coords> {
        if index >= self.volume() {
            return domain(format!("site index {index} >= volume {}", self.volume()));
        }
        let z = index % self.dims[2];
        let y = (index / self.dims[2]) % self.dims[1];
        let x = index / (self.dims[1] * self.dims[2]);
        Ok([x, y, z])
    }

    /// Site reached from `site` by `step` lattice units along `axis`,
    /// wrapping periodically.
    pub fn shift(&self, site: usize, axis: usize, step: isize) -> usize {
        let mut c = self.coords(site).expect("site index in range");
        let l = self.dims[axis] as isize;
        c[axis] = (c[axis] as isize + step).rem_euclid(l) as usize;
        self.index_unchecked(c)
    }

    pub fn sites(&self) -> impl Iterator<Item = usize> {
        0..self.volume()
    }

    /// Minimum-image separation vector from `y` to `x`, each component in
    /// `(-L/2, L/2]`.
    pub fn min_image(&self, x: Coords, y: Coords) -> [i64; 3] {
        let mut d = [0i64; 3];
        for i in 0..3 {
            let l = self.dims[i] as i64;
            let mut v = (x[i] as i64 - y[i] as i64).rem_euclid(l);
            if 2 * v > l {
                v -= l;
            }
            d[i] = v;
        }
        d
    }
}

/// A reciprocal-lattice vector `p_i = 2 pi l_i / L_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumMode {
    pub labels: [usize; 3],
    pub p: [f64; 3],
}

impl MomentumMode {
    pub fn is_zero(&self) -> bool {
        self.labels == [0, 0, 0]
    }

    /// `sum_i 4 sin^2(p_i / 2)`, the symbol of minus the lattice Laplacian.
    pub fn laplacian_symbol(&self) -> f64 {
        self.p.iter().map(|&q| 4.0 * (q / 2.0).sin().powi(2)).sum()
    }

    /// Phase `e^{i p.x}` at site coordinates `x`.
    pub fn phase(&self, x: Coords) -> crate::C64 {
        let arg: f64 = (0..3).map(|i| self.p[i] * x[i] as f64).sum();
        crate::C64::from_polar(1.0, arg)
    }
}

/// All `V` momentum modes in row-major label order, zero mode first.
pub fn momentum_modes(geom: &LatticeGeometry) -> Vec<MomentumMode> {
    let d = geom.dims();
    let mut modes = Vec::with_capacity(geom.volume());
    for lx in 0..d[0] {
        for ly in 0..d[1] {
            for lz in 0..d[2] {
                let labels = [lx, ly, lz];
                let p = [0, 1, 2].map(|i| 2.0 * PI * labels[i] as f64 / d[i] as f64);
                modes.push(MomentumMode { labels, p });
            }
        }
    }
    modes
}

/// Lattice inverse Laplacian in momentum space, `-1 / (4 sum_i sin^2(p_i/2))`.
pub fn inverse_laplacian(mode: &MomentumMode) -> Result<f64> {
    if mode.is_zero() {
        return domain("inverse Laplacian is undefined on the zero mode");
    }
    Ok(-1.0 / mode.laplacian_symbol())
}

/// Position-space Coulomb kernel `1 / (4 pi |x - y|)` with minimum-image
/// distance on the torus.
pub fn coulomb_kernel(x: Coords, y: Coords, geom: &LatticeGeometry) -> Result<f64> {
    let d = geom.min_image(x, y);
    let r2: i64 = d.iter().map(|v| v * v).sum();
    if r2 == 0 {
        return domain(format!("coincident points {x:?} and {y:?} in Coulomb kernel"));
    }
    Ok(1.0 / (4.0 * PI * (r2 as f64).sqrt()))
}

/// Periodic lattice Green's function of `-nabla^2` with the zero mode
/// removed, `G(r) = (1/V) sum_{p != 0} e^{i p r} / (4 sum sin^2(p/2))`,
/// obtained by solving `-nabla^2 G = delta - 1/V` with conjugate gradients
/// on the mean-free subspace. Indexed by the site index of `r`.
pub fn lattice_green_function(geom: &LatticeGeometry) -> Vec<f64> {
    let v = geom.volume();
    let axes = geom.active_axes();
    let neg_laplacian = |f: &[f64]| -> Vec<f64> {
        (0..v)
            .map(|s| {
                axes.iter()
                    .map(|&i| 2.0 * f[s] - f[geom.shift(s, i, 1)] - f[geom.shift(s, i, -1)])
                    .sum()
            })
            .collect()
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let mut rhs = vec![-1.0 / v as f64; v];
    rhs[0] += 1.0;
    let mut x = vec![0.0; v];
    if axes.is_empty() {
        return x;
    }
    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    for _ in 0..10 * v + 100 {
        if rr.sqrt() < 1e-15 {
            break;
        }
        let ap = neg_laplacian(&p);
        let alpha = rr / dot(&p, &ap);
        for k in 0..v {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        for k in 0..v {
            p[k] = r[k] + beta * p[k];
        }
        rr = rr_new;
    }
    let mean = x.iter().sum::<f64>() / v as f64;
    x.iter().map(|g| g - mean).collect()
}

/// Jordan-Wigner ordering of the `4V` fermion modes along a boustrophedon
/// path: rows alternate direction, planes alternate row order, and the
/// mode `alpha` of the `n`-th path site sits at position `4n + alpha`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnakePath {
    order: Vec<usize>,
    position: Vec<usize>,
}

pub const SPINOR_COMPONENTS: usize = 4;

impl SnakePath {
    pub fn new(geom: &LatticeGeometry) -> Self {
        let [lx, ly, lz] = geom.dims();
        let mut order = Vec::with_capacity(geom.volume());
        let mut row = 0usize;
        for z in 0..lz {
            let ys: Vec<usize> = if z % 2 == 0 {
                (0..ly).collect()
            } else {
                (0..ly).rev().collect()
            };
            for y in ys {
                let xs: Vec<usize> = if row.is_multiple_of(2) {
                    (0..lx).collect()
                } else {
                    (0..lx).rev().collect()
                };
                for x in xs {
                    order.push(geom.index_unchecked([x, y, z]));
                }
                row += 1;
            }
        }
        let mut position = vec![0; order.len()];
        for (n, &s) in order.iter().enumerate() {
            position[s] = n;
        }
        Self { order, position }
    }

    /// Site visited at path step `n`.
    pub fn site_at(&self, n: usize) -> usize {
        self.order[n]
    }

    /// Path step at which `site` is visited.
    pub fn position_of(&self, site: usize) -> usize {
        self.position[site]
    }

    /// Jordan-Wigner position `l = 4n + alpha`.
    pub fn jw_position(&self, site: usize, alpha: usize) -> usize {
        debug_assert!(alpha < SPINOR_COMPONENTS);
        SPINOR_COMPONENTS * self.position[site] + alpha
    }

    /// Inverse of [`jw_position`](Self::jw_position): `(site, alpha)`.
    pub fn mode_at(&self, l: usize) -> (usize, usize) {
        (self.order[l / SPINOR_COMPONENTS], l % SPINOR_COMPONENTS)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }
}
