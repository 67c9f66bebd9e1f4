//! Exact solves with the `p = 2` operator `A + sigma M` on a polar grid.
//!
//! The quadratic energy is rotation invariant on the uniform angular grid, so
//! a discrete Fourier transform in `theta` splits `A` into one symmetric
//! tridiagonal matrix per angular mode `m`, with the angular difference
//! operator acting as the symbol `2 - 2 cos(2 pi m / K)`.

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use super::form::QuotientForm;
use super::tridiag::{generalized_eigenpair, TridiagFactor};
use crate::error::Result;

/// Per-ring coefficients of the `p = 2` energy
/// `E = sum_i a_i sum_j (v_{i+1,j} - v_{i,j})^2 + sum_i b_i sum_j (v_{i,j+1} - v_{i,j})^2`.
#[derive(Debug, Clone)]
pub struct ModeOperator {
    a: Vec<f64>,
    b: Vec<f64>,
    mass: Vec<f64>,
    n: usize,
    k: usize,
}

impl ModeOperator {
    pub fn new(form: &QuotientForm) -> Self {
        let m = form.grid.m();
        let a: Vec<f64> = (0..m).map(|i| form.cell_w[i] * form.inv_h2[i]).collect();
        let b = (0..=m)
            .map(|i| {
                let below = if i > 0 { form.cell_w[i - 1] } else { 0.0 };
                let above = if i < m { form.cell_w[i] } else { 0.0 };
                0.5 * (below + above) * form.ang[i]
            })
            .collect();
        Self {
            a,
            b,
            mass: form.mass.clone(),
            n: form.active_rings(),
            k: form.grid.k(),
        }
    }

    pub fn symbol(&self, mode: usize) -> f64 {
        2.0 - 2.0 * (2.0 * std::f64::consts::PI * mode as f64 / self.k as f64).cos()
    }

    /// Tridiagonal matrix of `A + sigma M` restricted to angular mode `mode`.
    pub fn matrix(&self, mode: usize, sigma: f64) -> (Vec<f64>, Vec<f64>) {
        let s = self.symbol(mode);
        let m = self.a.len();
        let diag = (0..self.n)
            .map(|i| {
                let below = if i > 0 { self.a[i - 1] } else { 0.0 };
                let above = if i < m { self.a[i] } else { 0.0 };
                below + above + s * self.b[i] + sigma * self.mass[i]
            })
            .collect();
        let off = (0..self.n - 1).map(|i| -self.a[i]).collect();
        (diag, off)
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass[..self.n]
    }

    /// `index`-th generalized eigenpair of mode `mode` (radial profile only).
    pub fn mode_eigenpair(&self, mode: usize, index: usize) -> Result<(f64, Vec<f64>)> {
        let (d, o) = self.matrix(mode, 0.0);
        generalized_eigenpair(&d, &o, self.masses(), index)
    }

    pub fn modes(&self) -> usize {
        self.k / 2 + 1
    }
}

/// Solver for `(A + sigma M) u = f` on the active rings. With `sigma = 0` and
/// no Dirichlet ring the constant mode is singular; it is solved with
/// `u_0 = 0` pinned, which is exact for right-hand sides of zero sum.
pub struct FourierSolver {
    k: usize,
    n: usize,
    factors: Vec<(TridiagFactor, bool)>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FourierSolver {
    pub fn new(op: &ModeOperator, sigma: f64, singular_constant: bool) -> Result<Self> {
        let mut factors = Vec::with_capacity(op.modes());
        for mode in 0..op.modes() {
            let (d, o) = op.matrix(mode, sigma);
            if mode == 0 && singular_constant {
                factors.push((TridiagFactor::new(&d[1..], &o[1..])?, true));
            } else {
                factors.push((TridiagFactor::new(&d, &o)?, false));
            }
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            k: op.k,
            n: op.n,
            factors,
            forward: planner.plan_fft_forward(op.k),
            inverse: planner.plan_fft_inverse(op.k),
        })
    }

    /// Solves in place on a ring-major array of the full grid length; rings
    /// beyond the active ones are set to zero.
    pub fn solve(&self, rhs: &mut [f64]) {
        let (k, n) = (self.k, self.n);
        if k == 1 {
            let (f, pinned) = &self.factors[0];
            if *pinned {
                rhs[0] = 0.0;
                f.solve_in_place(&mut rhs[1..n]);
            } else {
                f.solve_in_place(&mut rhs[..n]);
            }
            rhs[n..].iter_mut().for_each(|x| *x = 0.0);
            return;
        }
        // spectra[mode][ring]
        let mut spectra = vec![Complex64::new(0.0, 0.0); k * n];
        let mut buf = vec![Complex64::new(0.0, 0.0); k];
        for i in 0..n {
            for j in 0..k {
                buf[j] = Complex64::new(rhs[i * k + j], 0.0);
            }
            self.forward.process(&mut buf);
            for (mode, c) in buf.iter().enumerate() {
                spectra[mode * n + i] = *c;
            }
        }
        for mode in 0..k {
            let (f, pinned) = &self.factors[mode.min(k - mode)];
            let col = &mut spectra[mode * n..(mode + 1) * n];
            if *pinned {
                col[0] = Complex64::new(0.0, 0.0);
                f.solve_in_place(&mut col[1..]);
            } else {
                f.solve_in_place(col);
            }
        }
        let scale = 1.0 / k as f64;
        for i in 0..n {
            for (mode, b) in buf.iter_mut().enumerate() {
                *b = spectra[mode * n + i];
            }
            self.inverse.process(&mut buf);
            for j in 0..k {
                rhs[i * k + j] = buf[j].re * scale;
            }
        }
        rhs[n * k..].iter_mut().for_each(|x| *x = 0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{PolarGrid, DEFAULT_EPSILON};

    fn apply(form: &QuotientForm, v: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; v.len()];
        form.energy_gradient(v, &mut g);
        g.iter().map(|x| 0.5 * x).collect()
    }

    #[test]
    fn solve_inverts_the_energy_operator() {
        let grid = PolarGrid::new(20, 16, DEFAULT_EPSILON, 1.3).unwrap();
        for &dirichlet in &[true, false] {
            let form = QuotientForm::new(&grid, 2.0, 2.0, -0.5, -0.5, dirichlet);
            let op = ModeOperator::new(&form);
            let sigma = if dirichlet { 0.0 } else { 0.7 };
            let solver = FourierSolver::new(&op, sigma, false).unwrap();
            let mut f: Vec<f64> = (0..grid.len()).map(|i| ((i * 31 % 23) as f64 - 11.0) / 7.0).collect();
            if dirichlet {
                let m = grid.m();
                f[m * 16..].iter_mut().for_each(|x| *x = 0.0);
            }
            let mut u = f.clone();
            solver.solve(&mut u);
            let au = apply(&form, &u);
            for idx in 0..form.active_rings() * 16 {
                let i = idx / 16;
                let lhs = au[idx] + sigma * form.mass[i] * u[idx];
                assert!(
                    (lhs - f[idx]).abs() < 1e-8 * (1.0 + f[idx].abs()),
                    "dirichlet={dirichlet} idx={idx}"
                );
            }
        }
    }
}
