//! Tensor-product polar grids on the unit disk and grid functions.
//!
//! Radial nodes start at `r_0 = eps` and grow geometrically until the spacing
//! matches the uniform spacing of the remaining nodes up to `r_M = 1`. The
//! hole `|x| < eps` carries no energy; its weighted measure is lumped onto the
//! innermost ring. A grid with a single angular node (`K = 1`) stands for the
//! space of radial functions in any dimension.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::diskspec::sphere_area;
use crate::error::{Error, Result};

pub const DEFAULT_EPSILON: f64 = 1e-4;
pub const DEFAULT_RATIO: f64 = 1.05;

/// `int_a^b r^e dr` in closed form.
pub fn radial_moment(e: f64, a: f64, b: f64) -> f64 {
    if (e + 1.0).abs() < 1e-14 {
        (b / a).ln()
    } else {
        (b.powf(e + 1.0) - a.powf(e + 1.0)) / (e + 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    radii: Vec<f64>,
    k: usize,
    dimension: usize,
}

impl PolarGrid {
    /// Disk grid with `m` radial intervals and `k` angular nodes (`k` even).
    pub fn new(m: usize, k: usize, epsilon: f64, ratio: f64) -> Result<Self> {
        if k < 2 || k % 2 != 0 {
            return Err(Error::Grid(format!(
                "angular node count must be even and >= 2, got {k}"
            )));
        }
        Ok(Self {
            radii: graded_radii(m, epsilon, ratio)?,
            k,
            dimension: 2,
        })
    }

    /// Grid of radial functions in dimension `dimension`.
    pub fn radial(m: usize, epsilon: f64, ratio: f64, dimension: usize) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::Grid(format!("dimension must be >= 2, got {dimension}")));
        }
        Ok(Self {
            radii: graded_radii(m, epsilon, ratio)?,
            k: 1,
            dimension,
        })
    }

    /// Grid with prescribed radial nodes (increasing, ending at 1).
    pub fn from_radii(radii: Vec<f64>, k: usize) -> Result<Self> {
        if radii.len() < 3 || radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Grid(
                "radial nodes must be positive and strictly increasing".into(),
            ));
        }
        if (radii[radii.len() - 1] - 1.0).abs() > 1e-14 {
            return Err(Error::Grid("outermost radial node must be 1".into()));
        }
        if k != 1 && (k < 2 || k % 2 != 0) {
            return Err(Error::Grid(format!("angular node count must be even, got {k}")));
        }
        Ok(Self { radii, k, dimension: 2 })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Number of radial intervals `M`.
    pub fn m(&self) -> usize {
        self.radii.len() - 1
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn is_radial(&self) -> bool {
        self.k == 1
    }

    pub fn epsilon(&self) -> f64 {
        self.radii[0]
    }

    pub fn len(&self) -> usize {
        self.radii.len() * self.k
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dtheta(&self) -> f64 {
        2.0 * PI / self.k as f64
    }

    pub fn theta(&self, j: usize) -> f64 {
        self.dtheta() * j as f64
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.k + j
    }

    /// Angular measure carried by one node column: `dtheta` in the plane,
    /// the full sphere for radial grids.
    pub fn angular_measure(&self) -> f64 {
        if self.is_radial() {
            sphere_area(self.dimension)
        } else {
            self.dtheta()
        }
    }

    /// Node position in the plane.
    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        let r = self.radii[i];
        let t = self.theta(j);
        (r * t.cos(), r * t.sin())
    }

    /// Weighted measure `int |x|^gamma dx` of each annular sector
    /// `r_i < |x| < r_{i+1}` (one value per ring of cells) and of one sector of
    /// the inner hole.
    pub fn cell_measures(&self, gamma: f64) -> CellMeasures {
        let e = gamma + self.dimension as f64 - 1.0;
        let a = self.angular_measure();
        // e + 1 = gamma + N > 0 keeps the hole integrable
        CellMeasures {
            inner: a * self.radii[0].powf(e + 1.0) / (e + 1.0),
            rings: self
                .radii
                .windows(2)
                .map(|w| a * radial_moment(e, w[0], w[1]))
                .collect(),
            sectors: self.k,
        }
    }

    /// Lumped node masses for the weight `|x|^gamma`, one per ring (all nodes
    /// of a ring share it).
    pub fn node_masses(&self, gamma: f64) -> Vec<f64> {
        let c = self.cell_measures(gamma);
        let m = self.m();
        (0..=m)
            .map(|i| {
                let below = if i == 0 { 2.0 * c.inner } else { c.rings[i - 1] };
                let above = if i == m { 0.0 } else { c.rings[i] };
                0.5 * (below + above)
            })
            .collect()
    }

    /// Ring index whose radius is nearest to `r`.
    pub fn nearest_ring(&self, r: f64) -> usize {
        match self.radii.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i >= self.radii.len() => self.radii.len() - 1,
            Err(i) => {
                if r - self.radii[i - 1] < self.radii[i] - r {
                    i - 1
                } else {
                    i
                }
            }
        }
    }
}

fn graded_radii(m: usize, epsilon: f64, ratio: f64) -> Result<Vec<f64>> {
    if m < 2 {
        return Err(Error::Grid(format!("need at least 2 radial intervals, got {m}")));
    }
    if !(epsilon > 0.0 && epsilon < 0.5) || !(ratio >= 1.0) {
        return Err(Error::Grid(format!(
            "need 0 < eps < 1/2 and ratio >= 1, got eps={epsilon}, ratio={ratio}"
        )));
    }
    // smallest i* with geometric spacing at r_{i*} >= remaining uniform spacing
    let mut split = if ratio == 1.0 { Some(0) } else { None };
    for i in 0..m {
        if split.is_some() {
            break;
        }
        let r = epsilon * ratio.powi(i as i32);
        if r >= 1.0 {
            break;
        }
        let geometric_step = r * (ratio - 1.0);
        let uniform_step = (1.0 - r) / (m - i) as f64;
        if geometric_step >= uniform_step {
            split = Some(i);
            break;
        }
    }
    let (split, ratio) = match split {
        Some(s) => (s, ratio),
        // too few intervals for the requested ratio: steepen the geometric
        // part so that it meets the uniform part halfway
        _ => (m / 2, matching_ratio(m, m / 2, epsilon)),
    };
    let mut radii: Vec<f64> = (0..=split).map(|i| epsilon * ratio.powi(i as i32)).collect();
    let r0 = radii[split];
    let rest = m - split;
    for i in 1..=rest {
        radii.push(r0 + (1.0 - r0) * i as f64 / rest as f64);
    }
    radii[m] = 1.0;
    Ok(radii)
}

/// Ratio `rho` with `eps rho^s (rho - 1) = (1 - eps rho^s) / (m - s)`.
fn matching_ratio(m: usize, s: usize, epsilon: f64) -> f64 {
    let f = |rho: f64| {
        let r = epsilon * rho.powi(s as i32);
        r * (rho - 1.0) - (1.0 - r) / (m - s) as f64
    };
    let (mut lo, mut hi) = (1.0, 2.0);
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Weighted measures of the cells of a [`PolarGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct CellMeasures {
    /// One sector of the hole `|x| < eps`.
    pub inner: f64,
    /// One sector of each annulus `r_i < |x| < r_{i+1}`.
    pub rings: Vec<f64>,
    pub sectors: usize,
}

impl CellMeasures {
    pub fn total(&self) -> f64 {
        self.sectors as f64 * (self.inner + self.rings.iter().sum::<f64>())
    }
}

/// Samples on the nodes of a [`PolarGrid`], ring-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub grid: PolarGrid,
    pub values: Vec<f64>,
    /// The outer ring is a Dirichlet boundary and holds zeros.
    pub dirichlet: bool,
}

impl GridFunction {
    pub fn zeros(grid: &PolarGrid, dirichlet: bool) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
            dirichlet,
        }
    }

    pub fn from_fn(grid: &PolarGrid, dirichlet: bool, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut g = Self::zeros(grid, dirichlet);
        let m = grid.m();
        for i in 0..=m {
            for j in 0..grid.k() {
                if !(dirichlet && i == m) {
                    g.values[grid.index(i, j)] = f(grid.radii()[i], grid.theta(j));
                }
            }
        }
        g
    }

    pub fn from_values(grid: &PolarGrid, dirichlet: bool, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Grid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("grid function values must be finite".into()));
        }
        let mut g = Self {
            grid: grid.clone(),
            values,
            dirichlet,
        };
        if dirichlet {
            g.clear_boundary();
        }
        Ok(g)
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn ring(&self, i: usize) -> &[f64] {
        let k = self.grid.k();
        &self.values[i * k..(i + 1) * k]
    }

    pub fn clear_boundary(&mut self) {
        let m = self.grid.m();
        let k = self.grid.k();
        for v in &mut self.values[m * k..] {
            *v = 0.0;
        }
    }

    pub fn scale(&mut self, c: f64) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    /// `int v |x|^gamma dx` with lumped masses.
    pub fn weighted_integral(&self, gamma: f64) -> f64 {
        let masses = self.grid.node_masses(gamma);
        masses
            .iter()
            .enumerate()
            .map(|(i, m)| m * self.ring(i).iter().sum::<f64>())
            .sum()
    }

    /// `max_i (max_j v - min_j v)` over rings.
    pub fn angular_variation(&self) -> f64 {
        (0..=self.grid.m())
            .map(|i| {
                let r = self.ring(i);
                let hi = r.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let lo = r.iter().cloned().fold(f64::INFINITY, f64::min);
                hi - lo
            })
            .fold(0.0, f64::max)
    }

    /// Values rotated by `shift` angular steps: `out(i, j) = v(i, j - shift)`.
    pub fn rotated(&self, shift: usize) -> Self {
        let k = self.grid.k();
        let mut out = self.clone();
        for i in 0..=self.grid.m() {
            for j in 0..k {
                out.values[i * k + (j + shift) % k] = self.values[i * k + j];
            }
        }
        out
    }

    /// Reflection `theta -> -theta`.
    pub fn reflected_x2(&self) -> Self {
        let k = self.grid.k();
        let mut out = self.clone();
        for i in 0..=self.grid.m() {
            for j in 0..k {
                out.values[i * k + (k - j) % k] = self.values[i * k + j];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_radii_are_increasing_and_end_at_one() {
        let g = PolarGrid::new(200, 128, DEFAULT_EPSILON, DEFAULT_RATIO).unwrap();
        let r = g.radii();
        assert_eq!(r.len(), 201);
        assert_eq!(r[0], 1e-4);
        assert_eq!(r[200], 1.0);
        assert!(r.windows(2).all(|w| w[1] > w[0]));
        // spacing never decreases by more than rounding
        let h: Vec<f64> = r.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(h.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9)));
    }

    #[test]
    fn odd_angular_count_rejected() {
        assert!(PolarGrid::new(50, 63, DEFAULT_EPSILON, DEFAULT_RATIO).is_err());
        assert!(PolarGrid::new(1, 64, DEFAULT_EPSILON, DEFAULT_RATIO).is_err());
    }

    #[test]
    fn measures_sum_to_weighted_area() {
        for &gamma in &[-1.5, -1.0, 0.0, 0.5, 8.0, 32.0] {
            let g = PolarGrid::new(100, 64, DEFAULT_EPSILON, DEFAULT_RATIO).unwrap();
            let total = g.cell_measures(gamma).total();
            let exact = 2.0 * PI / (gamma + 2.0);
            assert!(
                (total - exact).abs() < 1e-12 * exact,
                "gamma={gamma}: {total} vs {exact}"
            );
            let masses: f64 = g.node_masses(gamma).iter().sum::<f64>() * 64.0;
            assert!((masses - exact).abs() < 1e-12 * exact);
        }
        let rad = PolarGrid::radial(80, DEFAULT_EPSILON, DEFAULT_RATIO, 3).unwrap();
        let exact = 4.0 * PI / 4.0;
        assert!((rad.cell_measures(1.0).total() - exact).abs() < 1e-12);
    }

    #[test]
    fn moment_of_minus_one_is_log() {
        assert!((radial_moment(-1.0, 1.0, std::f64::consts::E) - 1.0).abs() < 1e-15);
        assert!((radial_moment(2.0, 0.0, 3.0) - 9.0).abs() < 1e-14);
    }

    #[test]
    fn rotation_and_reflection_are_permutations() {
        let g = PolarGrid::new(10, 8, DEFAULT_EPSILON, 1.3).unwrap();
        let f = GridFunction::from_fn(&g, false, |r, t| r + t.sin());
        let back = f.rotated(3).rotated(5);
        assert_eq!(back.values, f.values);
        assert_eq!(f.reflected_x2().reflected_x2().values, f.values);
    }
}
