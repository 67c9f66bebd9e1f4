//! Discrete rearrangements on polar grids: two-point rearrangement across
//! lines through the origin, foliated Schwarz symmetrization, the symmetry
//! test by polarizations, and weighted decreasing rearrangements.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::diskspec::sphere_area;
use crate::error::{Error, Result};
use crate::grid::{radial_moment, GridFunction, PolarGrid};

/// Open half-plane `{x : x . (cos phi, sin phi) > 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace2D {
    pub angle: f64,
}

impl HalfSpace2D {
    pub fn new(angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(Error::Domain(format!("half-plane angle must be finite, got {angle}")));
        }
        Ok(Self {
            angle: angle.rem_euclid(2.0 * PI),
        })
    }

    pub fn normal(&self) -> (f64, f64) {
        (self.angle.cos(), self.angle.sin())
    }

    /// Reflection `sigma_H` of a point across the boundary line.
    pub fn reflect(&self, x: (f64, f64)) -> (f64, f64) {
        let n = self.normal();
        let d = 2.0 * (x.0 * n.0 + x.1 * n.1);
        (x.0 - d * n.0, x.1 - d * n.1)
    }

    /// Node permutation `j -> sigma_H j` on each ring, and the side of each
    /// node (`1` in `H`, `-1` in the complement, `0` on the line).
    fn grid_action(&self, grid: &PolarGrid) -> Result<(Vec<usize>, Vec<i8>)> {
        let k = grid.k();
        if grid.is_radial() {
            return Err(Error::Grid("reflections need a two-dimensional grid".into()));
        }
        // theta -> 2 phi + pi - theta maps nodes to nodes iff K phi / pi is an integer
        let t = self.angle * k as f64 / PI;
        let s = t.round();
        if (t - s).abs() > 1e-9 * k as f64 {
            return Err(Error::Grid(format!(
                "half-plane angle {} is not a multiple of pi/{k}; the reflection does not map the grid to itself",
                self.angle
            )));
        }
        let shift = (s as usize + k / 2) % k;
        let map: Vec<usize> = (0..k).map(|j| (shift + k - j) % k).collect();
        let side = (0..k)
            .map(|j| {
                if map[j] == j {
                    0
                } else if (grid.theta(j) - self.angle).cos() > 0.0 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        Ok((map, side))
    }
}

/// The `2K` half-planes whose reflections map the grid to itself, by angle
/// `j pi / K`.
pub fn compatible_halfspaces(grid: &PolarGrid) -> Vec<HalfSpace2D> {
    let k = grid.k();
    (0..2 * k)
        .map(|j| HalfSpace2D {
            angle: PI * j as f64 / k as f64,
        })
        .collect()
}

/// `u_H`: the larger of `u(x)`, `u(sigma_H x)` on `H`, the smaller on the
/// complement, `u` on the boundary line.
pub fn two_point(u: &GridFunction, h: &HalfSpace2D) -> Result<GridFunction> {
    let grid = &u.grid;
    let (map, side) = h.grid_action(grid)?;
    let k = grid.k();
    let mut out = u.clone();
    for i in 0..=grid.m() {
        let ring = &u.values[i * k..(i + 1) * k];
        for j in 0..k {
            if side[j] == 1 {
                let (a, b) = (ring[j], ring[map[j]]);
                out.values[i * k + j] = a.max(b);
                out.values[i * k + map[j]] = a.min(b);
            }
        }
    }
    Ok(out)
}

/// `sigma_H u`: `u(sigma_H x)`.
pub fn reflected(u: &GridFunction, h: &HalfSpace2D) -> Result<GridFunction> {
    let (map, _) = h.grid_action(&u.grid)?;
    let k = u.grid.k();
    let mut out = u.clone();
    for i in 0..=u.grid.m() {
        for j in 0..k {
            out.values[i * k + j] = u.values[i * k + map[j]];
        }
    }
    Ok(out)
}

/// Weighted Dirichlet energy with the five-point polar stencil: radial edge
/// weights `dtheta int r^{alpha+1} dr / h_i^2`, angular edge weights
/// `m_i / (r_i dtheta)^2`. Edge weights depend on the ring only, so every
/// grid reflection maps the stencil onto itself.
pub fn dirichlet_energy(u: &GridFunction, alpha: f64) -> f64 {
    let grid = &u.grid;
    let (k, m) = (grid.k(), grid.m());
    let r = grid.radii();
    let dt = grid.angular_measure();
    let masses = grid.node_masses(alpha);
    let mut e = 0.0;
    for i in 0..=m {
        if i < m {
            let h = r[i + 1] - r[i];
            let a = dt * radial_moment(alpha + grid.dimension() as f64 - 1.0, r[i], r[i + 1]) / (h * h);
            for j in 0..k {
                let d = u.at(i + 1, j) - u.at(i, j);
                e += a * d * d;
            }
        }
        if k > 1 {
            let b = masses[i] / (r[i] * grid.dtheta()).powi(2);
            for j in 0..k {
                let d = u.at(i, (j + 1) % k) - u.at(i, j);
                e += b * d * d;
            }
        }
    }
    e
}

/// Weighted Dirichlet energies of `u` and `u_H`.
pub fn two_point_energy_check(u: &GridFunction, h: &HalfSpace2D, alpha: f64) -> Result<(f64, f64)> {
    let uh = two_point(u, h)?;
    Ok((dirichlet_energy(u, alpha), dirichlet_energy(&uh, alpha)))
}

fn pole_node(grid: &PolarGrid, pole: f64) -> Result<usize> {
    if grid.is_radial() {
        return Err(Error::Grid(
            "foliated Schwarz symmetrization needs a two-dimensional grid".into(),
        ));
    }
    let t = pole.rem_euclid(2.0 * PI) / grid.dtheta();
    let j = t.round();
    if (t - j).abs() > 1e-9 * grid.k() as f64 {
        return Err(Error::Grid(format!("pole angle {pole} is not a node direction")));
    }
    Ok(j as usize % grid.k())
}

/// Per ring, the values sorted nonincreasingly and placed by angular
/// distance from the pole node: largest at the pole, then alternately one
/// step counterclockwise and one step clockwise, smallest at the antipode.
pub fn foliated_schwarz(u: &GridFunction, pole: f64) -> Result<GridFunction> {
    let grid = &u.grid;
    let j0 = pole_node(grid, pole)?;
    let k = grid.k();
    let order: Vec<usize> = (0..k)
        .map(|n| {
            let step = (n + 1) / 2;
            if n % 2 == 1 {
                (j0 + step) % k
            } else {
                (j0 + k - step) % k
            }
        })
        .collect();
    let mut out = u.clone();
    let mut sorted = vec![0.0; k];
    for i in 0..=grid.m() {
        sorted.copy_from_slice(u.ring(i));
        sorted.sort_by(|a, b| b.total_cmp(a));
        for (n, &j) in order.iter().enumerate() {
            out.values[i * k + j] = sorted[n];
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FssReport {
    /// Every compatible half-plane satisfies `u = u_H` or `sigma_H u = u_H`
    /// within the tolerance.
    pub symmetric: bool,
    /// Phase of the weighted first angular Fourier coefficient, in `[0, 2 pi)`.
    pub pole: f64,
    /// Largest over half-planes of the smaller of the two alternatives'
    /// ring-relative deviations.
    pub worst_violation: f64,
}

/// Foliated Schwarz symmetry test by polarizations. On each ring the
/// deviation of an alternative is `max_j |.| / (max_j u - min_j u)`; rings
/// with oscillation below `1e-14 sup|u|` count as exact.
pub fn fss_test(u: &GridFunction, tolerance: f64) -> Result<FssReport> {
    let grid = &u.grid;
    let (k, m) = (grid.k(), grid.m());
    let sup = u.values.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let osc: Vec<f64> = (0..=m)
        .map(|i| {
            let r = u.ring(i);
            r.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - r.iter().cloned().fold(f64::INFINITY, f64::min)
        })
        .collect();
    let deviation = |a: &GridFunction, b: &GridFunction| {
        (0..=m)
            .filter(|&i| osc[i] > 1e-14 * sup)
            .map(|i| {
                a.ring(i)
                    .iter()
                    .zip(b.ring(i))
                    .fold(0.0_f64, |d, (x, y)| d.max((x - y).abs()))
                    / osc[i]
            })
            .fold(0.0_f64, f64::max)
    };
    let mut worst = 0.0_f64;
    // H and its complement give the same pair of alternatives
    for h in compatible_halfspaces(grid).iter().take(k) {
        let uh = two_point(u, h)?;
        let su = reflected(u, h)?;
        worst = worst.max(deviation(u, &uh).min(deviation(&su, &uh)));
    }
    let masses = grid.node_masses(0.0);
    let (mut c, mut s) = (0.0, 0.0);
    for i in 0..=m {
        for j in 0..k {
            let t = grid.theta(j);
            c += masses[i] * u.at(i, j) * t.cos();
            s += masses[i] * u.at(i, j) * t.sin();
        }
    }
    Ok(FssReport {
        symmetric: worst <= tolerance,
        pole: s.atan2(c).rem_euclid(2.0 * PI),
        worst_violation: worst,
    })
}

/// Step representation of `u*`: `u*(s) = values[n]` for
/// `breakpoints[n] <= s < breakpoints[n + 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedProfile {
    pub dimension: usize,
    pub alpha: f64,
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
}

impl WeightedProfile {
    /// `|Omega|_alpha`.
    pub fn total_measure(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    /// `u*(s)`, `0 <= s < |Omega|_alpha`; zero beyond.
    pub fn decreasing(&self, s: f64) -> f64 {
        if s < 0.0 {
            return self.values[0];
        }
        let n = self.breakpoints.partition_point(|&b| b <= s);
        if n == 0 || n > self.values.len() {
            0.0
        } else {
            self.values[n - 1]
        }
    }

    /// `u_*(s) = u*(|Omega|_alpha - s)`.
    pub fn increasing(&self, s: f64) -> f64 {
        let total = self.total_measure();
        // left limit of u* at total - s, so that u_* is right-continuous
        let t = total - s;
        let n = self.breakpoints.partition_point(|&b| b < t);
        if n == 0 {
            self.values[0]
        } else {
            self.values[(n - 1).min(self.values.len() - 1)]
        }
    }

    /// `N omega_N / (N + alpha)`, so that `|B_r|_alpha = c r^{N+alpha}`.
    fn ball_constant(&self) -> f64 {
        sphere_area(self.dimension) / (self.dimension as f64 + self.alpha)
    }

    /// Radius of the centered ball of measure `|Omega|_alpha`.
    pub fn r_sharp(&self) -> f64 {
        (self.total_measure() / self.ball_constant()).powf(1.0 / (self.dimension as f64 + self.alpha))
    }

    fn ball_measure(&self, r: f64) -> f64 {
        self.ball_constant() * r.powf(self.dimension as f64 + self.alpha)
    }

    /// `u^sharp(r) = u*(|B_r|_alpha)`.
    pub fn sharp(&self, r: f64) -> f64 {
        self.decreasing(self.ball_measure(r))
    }

    /// `u_sharp(r) = u_*(|B_r|_alpha)`.
    pub fn sharp_increasing(&self, r: f64) -> f64 {
        self.increasing(self.ball_measure(r))
    }
}

/// `u*` of `|u|` with respect to `|x|^alpha dx`, nodes carrying their lumped
/// masses. Equal values are merged into one step.
pub fn weighted_decreasing_rearrangement(u: &GridFunction, alpha: f64) -> Result<WeightedProfile> {
    let grid = &u.grid;
    let n = grid.dimension() as f64;
    if !(alpha > -n) {
        return Err(Error::Precondition(format!("alpha > -N required, got alpha = {alpha}")));
    }
    let masses = grid.node_masses(alpha);
    let k = grid.k();
    let mut cells: Vec<(f64, f64)> = u
        .values
        .iter()
        .enumerate()
        .map(|(idx, v)| (v.abs(), masses[idx / k]))
        .collect();
    cells.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut breakpoints = vec![0.0];
    let mut values: Vec<f64> = Vec::new();
    let mut acc = 0.0;
    for (v, w) in cells {
        acc += w;
        if values.last() == Some(&v) {
            *breakpoints.last_mut().unwrap() = acc;
        } else {
            values.push(v);
            breakpoints.push(acc);
        }
    }
    Ok(WeightedProfile {
        dimension: grid.dimension(),
        alpha,
        breakpoints,
        values,
    })
}

/// `int_0^T f(s) g(s) ds` for step functions given as sorted breakpoint lists.
fn step_product(a: &[f64], fa: impl Fn(usize) -> f64, b: &[f64], fb: impl Fn(usize) -> f64) -> f64 {
    let (mut i, mut j) = (0, 0);
    let mut lo = 0.0;
    let mut total = 0.0;
    while i + 1 < a.len() && j + 1 < b.len() {
        let hi = a[i + 1].min(b[j + 1]);
        if hi > lo {
            total += (hi - lo) * fa(i) * fb(j);
            lo = hi;
        }
        if a[i + 1] <= hi {
            i += 1;
        }
        if b[j + 1] <= hi {
            j += 1;
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyLittlewood {
    /// `int_0^{|Omega|} u* v_* ds`.
    pub lower: f64,
    /// `int |u v| |x|^alpha dx` on the grid.
    pub middle: f64,
    /// `int_0^{|Omega|} u* v* ds`.
    pub upper: f64,
    /// `int u^sharp v^sharp |x|^alpha dx` over the ball of radius `r^sharp`,
    /// integrated in `x`.
    pub sharp_upper: f64,
}

impl HardyLittlewood {
    /// The chain `lower <= middle <= upper` with relative slack `rel`.
    pub fn holds(&self, rel: f64) -> bool {
        let scale = self.upper.abs().max(f64::MIN_POSITIVE);
        self.lower <= self.middle + rel * scale && self.middle <= self.upper + rel * scale
    }
}

pub fn hardy_littlewood_check(u: &GridFunction, v: &GridFunction, alpha: f64) -> Result<HardyLittlewood> {
    if u.grid != v.grid {
        return Err(Error::Grid("u and v live on different grids".into()));
    }
    let pu = weighted_decreasing_rearrangement(u, alpha)?;
    let pv = weighted_decreasing_rearrangement(v, alpha)?;
    let total = pu.total_measure();
    let upper = step_product(&pu.breakpoints, |i| pu.values[i], &pv.breakpoints, |j| pv.values[j]);
    // v_* has the reversed breakpoints of v*
    let rev: Vec<f64> = pv.breakpoints.iter().rev().map(|b| total - b).collect();
    let nv = pv.values.len();
    let lower = step_product(&pu.breakpoints, |i| pu.values[i], &rev, |j| pv.values[nv - 1 - j]);
    let masses = u.grid.node_masses(alpha);
    let k = u.grid.k();
    let middle = u
        .values
        .iter()
        .zip(&v.values)
        .enumerate()
        .map(|(idx, (a, b))| (a * b).abs() * masses[idx / k])
        .sum();
    // radial pieces between the radii of all breakpoints
    let mut radii: Vec<f64> = pu
        .breakpoints
        .iter()
        .chain(&pv.breakpoints)
        .map(|&s| (s / pu.ball_constant()).powf(1.0 / (pu.dimension as f64 + alpha)))
        .collect();
    radii.sort_by(|a, b| a.total_cmp(b));
    radii.dedup();
    let e = alpha + pu.dimension as f64 - 1.0;
    let area = sphere_area(pu.dimension);
    let sharp_upper = radii
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            pu.sharp(mid) * pv.sharp(mid) * area * radial_moment(e, w[0], w[1])
        })
        .sum();
    Ok(HardyLittlewood {
        lower,
        middle,
        upper,
        sharp_upper,
    })
}
