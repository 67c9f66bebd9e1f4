//! The discrete quotient `R_{p,q,alpha,gamma}(v) = E_p(v) / S_q(v)^{p/q}`.
//!
//! On a cell `r_i < r < r_{i+1}`, `theta_j < theta < theta_{j+1}` the squared
//! gradient is the average of the two radial and the two angular difference
//! quotients,
//!
//! ```text
//! g = 1/2 [(dr_j)^2 + (dr_{j+1})^2] / h_i^2
//!   + 1/2 [(dt_i)^2 / r_i^2 + (dt_{i+1})^2 / r_{i+1}^2] / dtheta^2
//! ```
//!
//! and `E_p = sum W_i g^{p/2}` with `W_i` the exact `|x|^alpha` measure of the
//! cell. `S_q = sum m_i |v|^q` uses lumped `|x|^gamma` node masses.

use crate::error::{Error, Result};
use crate::grid::{GridFunction, PolarGrid};

#[derive(Debug, Clone)]
pub struct QuotientForm {
    pub(crate) grid: PolarGrid,
    pub(crate) p: f64,
    pub(crate) q: f64,
    /// `|x|^alpha` measure of one cell of ring `i`, `i < M`.
    pub(crate) cell_w: Vec<f64>,
    pub(crate) inv_h2: Vec<f64>,
    /// `1 / (r_i^2 dtheta^2)`, zero on radial grids.
    pub(crate) ang: Vec<f64>,
    /// `|x|^gamma` node masses.
    pub(crate) mass: Vec<f64>,
    pub(crate) dirichlet: bool,
}

/// Below this the `p/2 - 1` power is regularized (only matters for `p < 2`).
const GRADIENT_FLOOR: f64 = 1e-300;

impl QuotientForm {
    pub fn new(grid: &PolarGrid, p: f64, q: f64, alpha: f64, gamma: f64, dirichlet: bool) -> Self {
        let r = grid.radii();
        let cells = grid.cell_measures(alpha);
        let inv_h2 = r.windows(2).map(|w| 1.0 / ((w[1] - w[0]) * (w[1] - w[0]))).collect();
        let dt = grid.dtheta();
        let ang = r
            .iter()
            .map(|&ri| {
                if grid.is_radial() {
                    0.0
                } else {
                    1.0 / (ri * ri * dt * dt)
                }
            })
            .collect();
        Self {
            grid: grid.clone(),
            p,
            q,
            cell_w: cells.rings,
            inv_h2,
            ang,
            mass: grid.node_masses(gamma),
            dirichlet,
        }
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    /// Rings carrying unknowns.
    pub fn active_rings(&self) -> usize {
        if self.dirichlet {
            self.grid.m()
        } else {
            self.grid.m() + 1
        }
    }

    #[inline]
    fn cell_g(&self, v: &[f64], i: usize, j: usize, jn: usize) -> f64 {
        let k = self.grid.k();
        let a = v[i * k + j];
        let b = v[i * k + jn];
        let c = v[(i + 1) * k + j];
        let d = v[(i + 1) * k + jn];
        0.5 * ((c - a) * (c - a) + (d - b) * (d - b)) * self.inv_h2[i]
            + 0.5 * ((b - a) * (b - a) * self.ang[i] + (d - c) * (d - c) * self.ang[i + 1])
    }

    /// `E_p(v) = int |grad v|^p |x|^alpha dx`.
    pub fn energy(&self, v: &[f64]) -> f64 {
        let k = self.grid.k();
        let half_p = 0.5 * self.p;
        let mut total = 0.0;
        for i in 0..self.grid.m() {
            let mut ring = 0.0;
            for j in 0..k {
                let g = self.cell_g(v, i, j, (j + 1) % k);
                ring += if self.p == 2.0 { g } else { g.powf(half_p) };
            }
            total += self.cell_w[i] * ring;
        }
        total
    }

    /// Gradient of `E_p` with respect to the node values.
    pub fn energy_gradient(&self, v: &[f64], out: &mut [f64]) {
        let k = self.grid.k();
        out.iter_mut().for_each(|x| *x = 0.0);
        let half_p = 0.5 * self.p;
        for i in 0..self.grid.m() {
            for j in 0..k {
                let jn = (j + 1) % k;
                let coef = if self.p == 2.0 {
                    self.cell_w[i]
                } else {
                    let g = self.cell_g(v, i, j, jn).max(GRADIENT_FLOOR);
                    self.cell_w[i] * half_p * g.powf(half_p - 1.0)
                };
                let (ia, ib, ic, id) = (i * k + j, i * k + jn, (i + 1) * k + j, (i + 1) * k + jn);
                let (a, b, c, d) = (v[ia], v[ib], v[ic], v[id]);
                let hr = coef * self.inv_h2[i];
                let t0 = coef * self.ang[i];
                let t1 = coef * self.ang[i + 1];
                // d/dv of 1/2 (x-y)^2 w is w (x-y)
                out[ic] += hr * (c - a);
                out[ia] -= hr * (c - a);
                out[id] += hr * (d - b);
                out[ib] -= hr * (d - b);
                out[ib] += t0 * (b - a);
                out[ia] -= t0 * (b - a);
                out[id] += t1 * (d - c);
                out[ic] -= t1 * (d - c);
            }
        }
        if self.dirichlet {
            let m = self.grid.m();
            out[m * k..].iter_mut().for_each(|x| *x = 0.0);
        }
    }

    /// `S_q(v) = int |v|^q |x|^gamma dx`.
    pub fn q_sum(&self, v: &[f64]) -> f64 {
        let k = self.grid.k();
        self.mass
            .iter()
            .enumerate()
            .map(|(i, m)| m * v[i * k..(i + 1) * k].iter().map(|x| x.abs().powf(self.q)).sum::<f64>())
            .sum()
    }

    pub fn q_norm(&self, v: &[f64]) -> f64 {
        self.q_sum(v).powf(1.0 / self.q)
    }

    fn check_denominator(&self, v: &[f64], norm: f64) -> Result<()> {
        let vmax = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let measure: f64 = self.mass.iter().sum::<f64>() * self.grid.k() as f64;
        if !(norm > 1e-13 * vmax * measure.powf(1.0 / self.q)) || vmax == 0.0 {
            return Err(Error::ZeroDenominator { norm });
        }
        Ok(())
    }

    pub fn value(&self, v: &[f64]) -> Result<f64> {
        let s = self.q_sum(v);
        let norm = s.powf(1.0 / self.q);
        self.check_denominator(v, norm)?;
        Ok(self.energy(v) / s.powf(self.p / self.q))
    }

    /// Gradient of the quotient.
    pub fn gradient(&self, v: &[f64], out: &mut [f64]) -> Result<f64> {
        let s = self.q_sum(v);
        self.check_denominator(v, s.powf(1.0 / self.q))?;
        let e = self.energy(v);
        self.energy_gradient(v, out);
        let k = self.grid.k();
        let sp = s.powf(self.p / self.q);
        let c = self.p * e / s;
        for i in 0..self.active_rings() {
            for j in 0..k {
                let idx = i * k + j;
                let x = v[idx];
                out[idx] = (out[idx] - c * self.mass[i] * x.abs().powf(self.q - 2.0) * x) / sp;
            }
        }
        Ok(e / sp)
    }

    /// Fills `out` with `|v|^{q-2}` on the active rings and returns `S_q(v)`.
    pub(crate) fn power_weights(&self, v: &[f64], out: &mut [f64]) -> f64 {
        let k = self.grid.k();
        let e = self.q - 2.0;
        let int_e = if e.fract() == 0.0 && e.abs() < 64.0 {
            Some(e as i32)
        } else {
            None
        };
        let mut total = 0.0;
        for (i, m) in self.mass.iter().enumerate() {
            let mut ring = 0.0;
            for idx in i * k..(i + 1) * k {
                let x = v[idx];
                let w = match int_e {
                    Some(0) => 1.0,
                    Some(n) => x.abs().powi(n),
                    None => x.abs().powf(e),
                };
                out[idx] = w;
                ring += w * x * x;
            }
            total += m * ring;
        }
        total
    }

    /// `M w v` with precomputed weights `w = |v|^{q-2}`.
    pub(crate) fn load_from_weights(&self, v: &[f64], w: &[f64], out: &mut [f64]) {
        let k = self.grid.k();
        for (i, m) in self.mass.iter().enumerate() {
            for idx in i * k..(i + 1) * k {
                out[idx] = m * w[idx] * v[idx];
            }
        }
    }

    /// `M |v|^{q-2} v`.
    pub fn nonlinear_load(&self, v: &[f64], out: &mut [f64]) {
        let k = self.grid.k();
        for i in 0..=self.grid.m() {
            for j in 0..k {
                let idx = i * k + j;
                let x = v[idx];
                out[idx] = self.mass[i] * x.abs().powf(self.q - 2.0) * x;
            }
        }
    }

    /// Weighted mean `sum m v / sum m` over the `gamma` masses.
    pub fn weighted_mean(&self, v: &[f64]) -> f64 {
        let k = self.grid.k();
        let (mut num, mut den) = (0.0, 0.0);
        for (i, m) in self.mass.iter().enumerate() {
            num += m * v[i * k..(i + 1) * k].iter().sum::<f64>();
            den += m * k as f64;
        }
        num / den
    }

    pub fn function(&self, values: Vec<f64>) -> GridFunction {
        GridFunction {
            grid: self.grid.clone(),
            values,
            dirichlet: self.dirichlet,
        }
    }
}
