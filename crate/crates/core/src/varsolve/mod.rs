//! Discrete minimization of the weighted quotients
//!
//! ```text
//! R_{p,q,alpha,gamma}(v) = int |grad v|^p |x|^alpha dx / (int |v|^q |x|^gamma dx)^{p/q}
//! ```
//!
//! over Dirichlet functions, weighted mean-zero functions (natural boundary
//! condition), and their antisymmetric subclasses, on polar grids.

mod bounds;
mod fe;
mod form;
mod fourier;
mod nonlinear;
mod ops;
mod tridiag;

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{hypothesis, Error, Result};
use crate::grid::{GridFunction, PolarGrid, DEFAULT_EPSILON, DEFAULT_RATIO};

pub use bounds::{
    break_certificate, break_certificate_row, bump_bound, dirichlet_ground_state, log_bump_quotient, LogBump,
    LogBumpDomain, RadialGroundState,
};
pub use fe::{sw_compare, FeSettings, SwComparison, SymmetricDomain};
pub use form::QuotientForm;
pub use fourier::{FourierSolver, ModeOperator};
pub use nonlinear::{Constraint, Symmetry};
pub use ops::{
    halfdisk_dirichlet_min, pd_full_min, pd_radial_min, pd_radial_min_substituted, pm_antisym_min, pm_euler_residual,
    pm_min, radial_lower_bound, EulerResidual,
};
pub use tridiag::{generalized_eigenpair, TridiagFactor};

/// The exponent tuple `(N, p, q, alpha, gamma)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayleighParams {
    #[serde(rename = "N")]
    pub dimension: usize,
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub gamma: f64,
}

impl RayleighParams {
    pub fn new(dimension: usize, p: f64, q: f64, alpha: f64, gamma: f64) -> Result<Self> {
        let s = Self {
            dimension,
            p,
            q,
            alpha,
            gamma,
        };
        s.validate_basic()?;
        Ok(s)
    }

    /// Parameters of the mean-zero problem: `p = 2`, `gamma = alpha`.
    pub fn mean_zero(q: f64, alpha: f64) -> Result<Self> {
        Self::new(2, 2.0, q, alpha, alpha)
    }

    fn validate_basic(&self) -> Result<()> {
        if self.dimension < 2 {
            return Err(Error::Precondition(format!("N >= 2 required, got {}", self.dimension)));
        }
        for (name, v) in [
            ("p", self.p),
            ("q", self.q),
            ("alpha", self.alpha),
            ("gamma", self.gamma),
        ] {
            if !v.is_finite() {
                return Err(Error::Precondition(format!("{name} must be finite, got {v}")));
            }
        }
        if self.p < 1.0 {
            return Err(Error::Precondition(format!("p >= 1 required, got {}", self.p)));
        }
        if self.q < self.p {
            return Err(Error::Precondition(format!(
                "q >= p required, got p={}, q={}",
                self.p, self.q
            )));
        }
        Ok(())
    }

    /// Critical exponent `q_0 = (N+alpha) p / (N-p+alpha)`, infinite when
    /// `N - p + alpha <= 0`.
    pub fn q0(&self) -> f64 {
        let n = self.dimension as f64;
        let den = n - self.p + self.alpha;
        if den <= 0.0 {
            f64::INFINITY
        } else {
            (n + self.alpha) * self.p / den
        }
    }

    fn check_q_below_q0(&self, q_cap: f64, context: &str) -> Result<()> {
        let q0 = self.q0();
        if !(self.q < q0) {
            return Err(hypothesis(
                format!("q < q0(N,p,alpha) = {q0} (q = {})", self.q),
                context,
            ));
        }
        if q0.is_finite() && self.q > q_cap * q0 {
            return Err(hypothesis(
                format!(
                    "q <= {q_cap} q0 = {} (q = {}); raise the cap to go closer to q0",
                    q_cap * q0,
                    self.q
                ),
                context,
            ));
        }
        Ok(())
    }

    /// Hypotheses of the Dirichlet problem: `-N < alpha < N(p-1)`,
    /// `gamma >= alpha`, `p <= q < q0`.
    pub fn validate_dirichlet(&self, q_cap: f64) -> Result<()> {
        self.validate_basic()?;
        let n = self.dimension as f64;
        let ctx = "Dirichlet problem (P^D)";
        if !(self.alpha > -n) {
            return Err(hypothesis(format!("alpha > -N (alpha = {})", self.alpha), ctx));
        }
        if !(self.alpha < n * (self.p - 1.0)) {
            return Err(hypothesis(format!("alpha < N(p-1) (alpha = {})", self.alpha), ctx));
        }
        if !(self.gamma >= self.alpha) {
            return Err(hypothesis(
                format!("gamma >= alpha (gamma = {}, alpha = {})", self.gamma, self.alpha),
                ctx,
            ));
        }
        self.check_q_below_q0(q_cap, ctx)
    }

    /// Hypotheses of the mean-zero problem: `p = 2`, `gamma = alpha`,
    /// `|alpha| < N`, `2 <= q < q0`.
    pub fn validate_mean_zero(&self, q_cap: f64) -> Result<()> {
        self.validate_basic()?;
        let n = self.dimension as f64;
        let ctx = "mean-zero Neumann problem (P^M)";
        if self.p != 2.0 {
            return Err(hypothesis(format!("p = 2 (p = {})", self.p), ctx));
        }
        if self.gamma != self.alpha {
            return Err(hypothesis(
                format!("gamma = alpha (gamma = {}, alpha = {})", self.gamma, self.alpha),
                ctx,
            ));
        }
        if !(self.alpha.abs() < n) {
            return Err(hypothesis(format!("|alpha| < N (alpha = {})", self.alpha), ctx));
        }
        if !(self.q >= 2.0) {
            return Err(hypothesis(format!("q >= 2 (q = {})", self.q), ctx));
        }
        self.check_q_below_q0(q_cap, ctx)
    }
}

/// Grid and iteration controls shared by the solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSettings {
    /// Radial intervals `M`.
    pub m: usize,
    /// Angular nodes `K`.
    pub k: usize,
    pub epsilon: f64,
    pub ratio: f64,
    /// Relative change of the quotient at which iterations stop.
    pub tol: f64,
    pub max_iter: usize,
    pub multistarts: usize,
    pub seed: u64,
    /// Solves refuse `q > q_cap * q0`.
    pub q_cap: f64,
    /// Weighted mean tolerance (relative to the sup norm) for mean-zero results.
    pub constraint_tol: f64,
    /// Grid nodes required inside a bump support.
    pub min_bump_nodes: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            m: 200,
            k: 128,
            epsilon: DEFAULT_EPSILON,
            ratio: DEFAULT_RATIO,
            tol: 1e-11,
            max_iter: 4000,
            multistarts: 8,
            seed: 0,
            q_cap: 0.9,
            constraint_tol: 1e-9,
            min_bump_nodes: 16,
        }
    }
}

impl SolverSettings {
    pub fn with_grid(mut self, m: usize, k: usize) -> Self {
        self.m = m;
        self.k = k;
        self
    }

    pub fn disk_grid(&self) -> Result<PolarGrid> {
        PolarGrid::new(self.m, self.k, self.epsilon, self.ratio)
    }

    pub fn radial_grid(&self, dimension: usize) -> Result<PolarGrid> {
        PolarGrid::radial(self.m, self.epsilon, self.ratio, dimension)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub iterations: usize,
    /// Max-norm of the strong-form quotient gradient at the minimizer.
    pub gradient_norm: f64,
    pub euler_residual: Option<f64>,
    /// Multiplier of the mean-zero constraint.
    pub multiplier: Option<f64>,
    pub weighted_mean: f64,
    /// Estimated distance of `value` from the converged discrete minimum.
    pub error_estimate: f64,
    /// `max_i (max_j u - min_j u)` of the sup-normalized minimizer.
    pub angular_variation: f64,
    /// Outcome of each start, in start order.
    pub starts: Vec<StartRecord>,
    pub converged: bool,
    /// Angular mode of the minimizer (linear problems only).
    pub mode: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartRecord {
    pub name: String,
    /// `NaN` when the start failed.
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    pub value: f64,
    pub minimizer: GridFunction,
    pub diagnostics: Diagnostics,
}

/// One row of a parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub params: RayleighParams,
    /// Free-form row tag, such as a domain name.
    #[serde(default)]
    pub label: String,
    pub quantities: BTreeMap<String, f64>,
    pub flags: BTreeMap<String, bool>,
    pub error: Option<String>,
}

impl ScanRecord {
    pub fn new(params: RayleighParams) -> Self {
        Self {
            params,
            label: String::new(),
            quantities: BTreeMap::new(),
            flags: BTreeMap::new(),
            error: None,
        }
    }

    pub fn set(&mut self, name: &str, value: f64) {
        self.quantities.insert(name.to_string(), value);
    }

    pub fn flag(&mut self, name: &str, value: bool) {
        self.flags.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.quantities.get(name).copied()
    }

    pub fn fail(&mut self, err: &Error) {
        self.error = Some(err.to_string());
    }
}

/// Discrete `R_{p,q,alpha,gamma}(v)` on the grid of `v`.
pub fn rayleigh_value(params: &RayleighParams, v: &GridFunction) -> Result<f64> {
    params.validate_basic()?;
    if !v.grid.is_radial() && params.dimension != 2 {
        return Err(Error::Grid(format!(
            "disk grids are two-dimensional, got N = {}",
            params.dimension
        )));
    }
    if v.grid.is_radial() && v.grid.dimension() != params.dimension {
        return Err(Error::Grid(format!(
            "radial grid built for N = {}, quotient asked for N = {}",
            v.grid.dimension(),
            params.dimension
        )));
    }
    QuotientForm::new(&v.grid, params.p, params.q, params.alpha, params.gamma, v.dirichlet).value(&v.values)
}

/// Gradient of the discrete quotient with respect to the node values.
pub fn rayleigh_gradient(params: &RayleighParams, v: &GridFunction) -> Result<Vec<f64>> {
    let form = QuotientForm::new(&v.grid, params.p, params.q, params.alpha, params.gamma, v.dirichlet);
    let mut g = vec![0.0; v.values.len()];
    form.gradient(&v.values, &mut g)?;
    Ok(g)
}
