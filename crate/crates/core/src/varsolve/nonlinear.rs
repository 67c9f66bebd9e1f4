//! Minimization engine shared by all grid problems.
//!
//! * `p = q = 2`: per-mode generalized tridiagonal eigensolves.
//! * `p = 2 < q`: nonlinear inverse power method. Each step solves
//!   `A u = M |v|^{q-2} v` (projected onto the constraint) and normalizes;
//!   the quotient decreases monotonically.
//! * `p != 2`: gradient descent preconditioned by the `p = 2` operator with
//!   Armijo backtracking and renormalization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::form::QuotientForm;
use super::fourier::{FourierSolver, ModeOperator};
use super::{Diagnostics, SolverSettings, SpectralResult, StartRecord};
use crate::error::{Error, Result};
use crate::grid::GridFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Constraint {
    /// Zero on the outer ring.
    Dirichlet,
    /// Zero weighted mean, natural boundary condition.
    MeanZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Symmetry {
    None,
    /// `v(x_1, -x_2) = -v(x_1, x_2)`.
    OddX2,
}

pub(crate) struct Problem {
    pub form: QuotientForm,
    pub constraint: Constraint,
    pub symmetry: Symmetry,
    /// Energy weight exponent, used to build the `p = 2` preconditioner.
    pub alpha: f64,
}

struct Run {
    value: f64,
    v: Vec<f64>,
    iterations: usize,
    error_estimate: f64,
    converged: bool,
}

impl Problem {
    pub fn new(form: QuotientForm, constraint: Constraint, symmetry: Symmetry, alpha: f64) -> Result<Self> {
        if symmetry == Symmetry::OddX2 && form.grid.is_radial() {
            return Err(Error::Grid("odd-in-x2 problems need a two-dimensional grid".into()));
        }
        if (constraint == Constraint::Dirichlet) != form.dirichlet {
            return Err(Error::Precondition(
                "form boundary flag does not match the constraint".into(),
            ));
        }
        Ok(Self {
            form,
            constraint,
            symmetry,
            alpha,
        })
    }

    fn k(&self) -> usize {
        self.form.grid.k()
    }

    /// Projects onto the admissible subspace.
    pub fn project(&self, v: &mut [f64]) {
        let k = self.k();
        if self.symmetry == Symmetry::OddX2 {
            for i in 0..=self.form.grid.m() {
                let ring = &mut v[i * k..(i + 1) * k];
                ring[0] = 0.0;
                ring[k / 2] = 0.0;
                for j in 1..k / 2 {
                    let a = 0.5 * (ring[j] - ring[k - j]);
                    ring[j] = a;
                    ring[k - j] = -a;
                }
            }
        }
        match self.constraint {
            Constraint::Dirichlet => {
                let m = self.form.grid.m();
                v[m * k..].iter_mut().for_each(|x| *x = 0.0);
            }
            Constraint::MeanZero => {
                if self.symmetry == Symmetry::None {
                    let mean = self.form.weighted_mean(v);
                    v.iter_mut().for_each(|x| *x -= mean);
                }
            }
        }
    }

    fn normalize(&self, v: &mut [f64]) -> Result<()> {
        let n = self.form.q_norm(v);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::ZeroDenominator { norm: n });
        }
        v.iter_mut().for_each(|x| *x /= n);
        Ok(())
    }

    fn preconditioner(&self) -> Result<FourierSolver> {
        let form2 = if self.form.p == 2.0 {
            self.form.clone()
        } else {
            let g = &self.form.grid;
            let mut f = QuotientForm::new(g, 2.0, self.form.q, self.alpha, 0.0, self.form.dirichlet);
            f.mass = self.form.mass.clone();
            f
        };
        let op = ModeOperator::new(&form2);
        FourierSolver::new(&op, 0.0, self.constraint == Constraint::MeanZero)
    }

    /// Removes the multiple of the masses that makes `s` orthogonal to the
    /// constants (dual projection for the mean-zero constraint).
    fn project_dual(&self, s: &mut [f64]) {
        if self.constraint != Constraint::MeanZero {
            return;
        }
        let k = self.k();
        let total: f64 = s.iter().sum();
        let mass_total: f64 = self.form.mass.iter().sum::<f64>() * k as f64;
        let c = total / mass_total;
        for (i, m) in self.form.mass.iter().enumerate() {
            for x in &mut s[i * k..(i + 1) * k] {
                *x -= c * m;
            }
        }
    }

    fn inverse_power(&self, solver: &FourierSolver, start: &[f64], s: &SolverSettings, best: f64) -> Result<Run> {
        let mut v = start.to_vec();
        self.project(&mut v);
        let mut weights = vec![0.0; v.len()];
        let mut value = self.normalize_weighted(&mut v, &mut weights)?;
        let mut load = vec![0.0; v.len()];
        let mut next_weights = vec![0.0; v.len()];
        let mut tracker = Tracker::new(s.tol);
        for it in 1..=s.max_iter {
            self.form.load_from_weights(&v, &weights, &mut load);
            self.project_dual(&mut load);
            solver.solve(&mut load);
            self.project(&mut load);
            let next = self.normalize_weighted(&mut load, &mut next_weights)?;
            let drop = value - next;
            if next <= value {
                std::mem::swap(&mut v, &mut load);
                std::mem::swap(&mut weights, &mut next_weights);
                value = next;
            }
            if let Some((estimate, converged)) = tracker.push(drop, value, best, it) {
                return Ok(Run {
                    value,
                    v,
                    iterations: it,
                    error_estimate: estimate,
                    converged,
                });
            }
        }
        Ok(Run {
            value,
            v,
            iterations: s.max_iter,
            error_estimate: tracker.estimate(value),
            converged: false,
        })
    }

    /// Normalizes `v` to unit q-norm, fills `weights` with `|v|^{q-2}` of the
    /// normalized field and returns the quotient.
    fn normalize_weighted(&self, v: &mut [f64], weights: &mut [f64]) -> Result<f64> {
        let sum = self.form.power_weights(v, weights);
        let norm = sum.powf(1.0 / self.form.q);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::ZeroDenominator { norm });
        }
        v.iter_mut().for_each(|x| *x /= norm);
        let c = norm.powf(2.0 - self.form.q);
        weights.iter_mut().for_each(|w| *w *= c);
        Ok(self.form.energy(v))
    }

    fn descent(&self, solver: &FourierSolver, start: &[f64], s: &SolverSettings, best: f64) -> Result<Run> {
        let n = start.len();
        let mut v = start.to_vec();
        self.project(&mut v);
        self.normalize(&mut v)?;
        let mut grad = vec![0.0; n];
        let mut value = self.form.gradient(&v, &mut grad)?;
        let mut step = 1.0;
        let mut tracker = Tracker::new(s.tol);
        let mut trial = vec![0.0; n];
        for it in 1..=s.max_iter {
            let mut dir = grad.clone();
            self.project_dual(&mut dir);
            solver.solve(&mut dir);
            self.project(&mut dir);
            let slope: f64 = -grad.iter().zip(&dir).map(|(g, d)| g * d).sum::<f64>();
            // dir holds A^{-1} grad; move along -dir
            let mut accepted = false;
            if slope < 0.0 {
                for _ in 0..60 {
                    for idx in 0..n {
                        trial[idx] = v[idx] - step * dir[idx];
                    }
                    self.project(&mut trial);
                    if let Ok(t) = self.form.value(&trial) {
                        if t <= value + 1e-4 * step * slope {
                            accepted = true;
                            break;
                        }
                    }
                    step *= 0.5;
                }
            }
            if !accepted {
                return Ok(Run {
                    value,
                    v,
                    iterations: it,
                    error_estimate: tracker.estimate(value),
                    converged: true,
                });
            }
            std::mem::swap(&mut v, &mut trial);
            self.normalize(&mut v)?;
            let next = self.form.gradient(&v, &mut grad)?;
            let drop = value - next;
            value = next;
            step = (step * 2.0).min(1e6);
            if let Some((estimate, converged)) = tracker.push(drop, value, best, it) {
                return Ok(Run {
                    value,
                    v,
                    iterations: it,
                    error_estimate: estimate,
                    converged,
                });
            }
        }
        Ok(Run {
            value,
            v,
            iterations: s.max_iter,
            error_estimate: tracker.estimate(value),
            converged: false,
        })
    }

    /// Named starting fields.
    pub fn starts(&self, s: &SolverSettings) -> Vec<(String, Vec<f64>)> {
        let grid = &self.form.grid;
        let dirichlet = self.constraint == Constraint::Dirichlet;
        let odd = self.symmetry == Symmetry::OddX2;
        let envelope = move |r: f64| if dirichlet { 1.0 - r * r } else { 1.0 };
        let sample = |f: &dyn Fn(f64, f64) -> f64| GridFunction::from_fn(grid, dirichlet, |r, t| f(r, t)).values;
        let mut out: Vec<(String, Vec<f64>)> = Vec::new();
        if grid.is_radial() {
            out.push((
                "radial".into(),
                sample(&|r, _| envelope(r) * if dirichlet { 1.0 } else { (PI * r).cos() }),
            ));
        } else if odd {
            out.push(("sin".into(), sample(&|r, t| envelope(r) * r * t.sin())));
            out.push(("sin2".into(), sample(&|r, t| envelope(r) * r * r * (2.0 * t).sin())));
            out.push((
                "bump".into(),
                sample(&|r, t| {
                    let (x, y) = (r * t.cos(), r * t.sin());
                    let b = |cy: f64| (-((x * x) + (y - cy) * (y - cy)) / 0.02).exp();
                    envelope(r) * (b(0.85) - b(-0.85))
                }),
            ));
        } else {
            let radial = move |r: f64| if dirichlet { 1.0 - r * r } else { (PI * r).cos() };
            out.push(("radial".into(), sample(&|r, _| radial(r))));
            out.push(("cos".into(), sample(&|r, t| envelope(r) * r * t.cos())));
            out.push(("sin".into(), sample(&|r, t| envelope(r) * r * t.sin())));
            out.push((
                "bump".into(),
                sample(&|r, t| {
                    let (x, y) = (r * t.cos(), r * t.sin());
                    let d2 = (x - 0.85) * (x - 0.85) + y * y;
                    envelope(r) * (-d2 / 0.02).exp()
                }),
            ));
        }
        let mut index = 0u64;
        while out.len() < s.multistarts.max(1) {
            let mut rng = ChaCha8Rng::seed_from_u64(s.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index));
            index += 1;
            let modes = if grid.is_radial() { 1 } else { 4 };
            let mut coef = vec![[0.0f64; 6]; modes];
            for c in coef.iter_mut() {
                for x in c.iter_mut() {
                    *x = rng.gen_range(-1.0..1.0);
                }
            }
            let field = sample(&|r, t| {
                let mut acc = 0.0;
                for (m, c) in coef.iter().enumerate() {
                    let poly = c[2] + c[3] * r + c[4] * r * r + c[5] * r * r * r;
                    let ang = if m == 0 {
                        if odd {
                            0.0
                        } else {
                            1.0
                        }
                    } else {
                        let mt = m as f64 * t;
                        c[0] * mt.cos() + c[1] * mt.sin()
                    };
                    acc += r.powi(m as i32) * poly * ang;
                }
                envelope(r) * acc
            });
            out.push((format!("random{index}"), field));
        }
        out.truncate(s.multistarts.max(1).max(out.len().min(s.multistarts.max(1))));
        out
    }

    /// Best value over the multistarts.
    pub fn minimize(&self, s: &SolverSettings) -> Result<SpectralResult> {
        if self.form.p == 2.0 && self.form.q == 2.0 {
            return self.linear();
        }
        let solver = self.preconditioner()?;
        let mut best: Option<Run> = None;
        let mut starts = Vec::new();
        let mut last_err = None;
        for (name, field) in self.starts(s) {
            let best_value = best.as_ref().map_or(f64::INFINITY, |b| b.value);
            let run = if self.form.p == 2.0 {
                self.inverse_power(&solver, &field, s, best_value)
            } else {
                self.descent(&solver, &field, s, best_value)
            };
            match run {
                Ok(run) => {
                    starts.push(StartRecord {
                        name,
                        value: run.value,
                        iterations: run.iterations,
                        converged: run.converged,
                    });
                    if run.converged && best.as_ref().map_or(true, |b| run.value < b.value) {
                        best = Some(run);
                    }
                }
                Err(e) => {
                    starts.push(StartRecord {
                        name,
                        value: f64::NAN,
                        iterations: 0,
                        converged: false,
                    });
                    last_err = Some(e);
                }
            }
        }
        let best = match best {
            Some(b) => b,
            None if starts.iter().any(|r| r.value.is_finite()) => {
                return Err(Error::Convergence(format!(
                    "no start reached tolerance {} within {} iterations",
                    s.tol, s.max_iter
                )))
            }
            None => return Err(last_err.unwrap_or_else(|| Error::Convergence("no start produced a value".into()))),
        };
        let diagnostics = Diagnostics {
            iterations: best.iterations,
            error_estimate: best.error_estimate,
            converged: true,
            starts,
            ..Default::default()
        };
        self.finish(best.value, best.v, diagnostics)
    }

    fn finish(&self, value: f64, v: Vec<f64>, mut diagnostics: Diagnostics) -> Result<SpectralResult> {
        let mut g = vec![0.0; v.len()];
        self.form.gradient(&v, &mut g)?;
        self.project_dual(&mut g);
        self.project(&mut g);
        let k = self.k();
        diagnostics.gradient_norm = (0..self.form.active_rings())
            .flat_map(|i| {
                let m = self.form.mass[i];
                g[i * k..(i + 1) * k]
                    .iter()
                    .map(move |x| (x / m).abs())
                    .collect::<Vec<_>>()
            })
            .fold(0.0, f64::max);
        diagnostics.weighted_mean = self.form.weighted_mean(&v);
        let sup = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let minimizer = self.form.function(v);
        let mut normalized = minimizer.clone();
        if sup > 0.0 {
            normalized.scale(1.0 / sup);
        }
        diagnostics.angular_variation = normalized.angular_variation();
        Ok(SpectralResult {
            value,
            minimizer,
            diagnostics,
        })
    }

    fn linear(&self) -> Result<SpectralResult> {
        let op = ModeOperator::new(&self.form);
        let radial = self.form.grid.is_radial();
        let candidates: Vec<(usize, usize)> = match (self.constraint, self.symmetry) {
            (Constraint::Dirichlet, Symmetry::None) if radial => vec![(0, 0)],
            (Constraint::Dirichlet, Symmetry::None) => vec![(0, 0), (1, 0)],
            (Constraint::MeanZero, Symmetry::None) if radial => vec![(0, 1)],
            (Constraint::MeanZero, Symmetry::None) => vec![(0, 1), (1, 0)],
            (_, Symmetry::OddX2) => vec![(1, 0)],
        };
        let mut best: Option<(f64, usize, Vec<f64>)> = None;
        let mut starts = Vec::new();
        for (mode, index) in candidates {
            let (value, profile) = op.mode_eigenpair(mode, index)?;
            starts.push(StartRecord {
                name: format!("mode{mode}"),
                value,
                iterations: 1,
                converged: true,
            });
            if best.as_ref().map_or(true, |b| value < b.0) {
                best = Some((value, mode, profile));
            }
        }
        let (value, mode, profile) = best.expect("at least one candidate mode");
        let (d, o) = op.matrix(mode, 0.0);
        let mass = op.masses();
        let residual: f64 = (0..d.len())
            .map(|i| {
                let mut r = (d[i] - value * mass[i]) * profile[i];
                if i > 0 {
                    r += o[i - 1] * profile[i - 1];
                }
                if i + 1 < d.len() {
                    r += o[i] * profile[i + 1];
                }
                r * r / mass[i]
            })
            .sum::<f64>()
            .sqrt();
        let k = self.k();
        let mut v = vec![0.0; self.form.grid.len()];
        let dt = self.form.grid.dtheta();
        for (i, p) in profile.iter().enumerate() {
            for j in 0..k {
                let t = mode as f64 * dt * j as f64;
                let ang = if mode == 0 {
                    1.0
                } else if self.symmetry == Symmetry::OddX2 {
                    t.sin()
                } else {
                    t.cos()
                };
                v[i * k + j] = p * ang;
            }
        }
        self.normalize(&mut v)?;
        let diagnostics = Diagnostics {
            iterations: 1,
            error_estimate: residual.max(4.0 * f64::EPSILON * value),
            converged: true,
            starts,
            mode: Some(mode),
            ..Default::default()
        };
        self.finish(value, v, diagnostics)
    }
}

/// Stopping rule for monotone iterations. The contraction factor is the
/// largest ratio of consecutive decreases over a short window, and the
/// distance to the limit is estimated geometrically from it.
struct Tracker {
    tol: f64,
    drops: Vec<f64>,
}

const WINDOW: usize = 5;
const ABANDON_AFTER: usize = 40;

impl Tracker {
    fn new(tol: f64) -> Self {
        Self { tol, drops: Vec::new() }
    }

    fn rho(&self) -> Option<f64> {
        if self.drops.len() < WINDOW {
            return None;
        }
        let w = &self.drops[self.drops.len() - WINDOW..];
        let mut rho = 0.0_f64;
        for pair in w.windows(2) {
            if !(pair[0] > 0.0) {
                return None;
            }
            rho = rho.max(pair[1] / pair[0]);
        }
        Some(rho)
    }

    fn estimate(&self, value: f64) -> f64 {
        let floor = 4.0 * f64::EPSILON * value;
        let last = self.drops.last().copied().unwrap_or(f64::INFINITY).max(0.0);
        match self.rho() {
            Some(rho) if rho < 1.0 => (last * rho / (1.0 - rho)).max(floor),
            _ => f64::INFINITY,
        }
    }

    /// Records a decrease. Returns `(estimate, converged)` when the iteration
    /// should stop: converged to tolerance, stalled at rounding level, or
    /// (`converged = false`) unable to beat `best`.
    fn push(&mut self, drop: f64, value: f64, best: f64, it: usize) -> Option<(f64, bool)> {
        let floor = 4.0 * f64::EPSILON * value;
        if drop <= floor {
            return Some((floor.max(self.estimate(value).min(value * 1e-12)), true));
        }
        self.drops.push(drop);
        let estimate = self.estimate(value);
        if estimate <= self.tol * value {
            return Some((estimate, true));
        }
        if it >= ABANDON_AFTER && estimate.is_finite() && value - 2.0 * estimate > best * (1.0 - 1e-8) {
            return Some((estimate, false));
        }
        None
    }
}
