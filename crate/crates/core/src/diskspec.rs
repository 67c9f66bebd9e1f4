//! Closed-form spectra on balls for the weight `|x|^alpha`.
//!
//! Separating variables in the weighted Neumann problem on `B_R` gives radial
//! factors `f_k(r) = r^{-beta/2} J_{nu_k}(sqrt(mu) r)` with `beta = N-2+alpha`
//! and `nu_k = sqrt(beta^2/4 + k(k+N-2))`. The Neumann condition at `r = R`
//! becomes `-(beta/2) J_{nu_k}(x) + x J_{nu_k}'(x) = 0` with `x = sqrt(mu) R`.

use serde::{Deserialize, Serialize};

use crate::bessel::{self, BesselOrder, RootRecord};
use crate::error::{hypothesis, Error, Result};

/// Ball `B_R` in dimension `N` with weight `|x|^alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskSpectrumParams {
    pub dimension: usize,
    pub alpha: f64,
    pub radius: f64,
}

impl DiskSpectrumParams {
    pub fn new(dimension: usize, alpha: f64, radius: f64) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::Precondition(format!("dimension must be >= 2, got {dimension}")));
        }
        if !alpha.is_finite() || !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Precondition(format!(
                "alpha must be finite and radius > 0, got alpha={alpha}, R={radius}"
            )));
        }
        Ok(Self {
            dimension,
            alpha,
            radius,
        })
    }

    pub fn beta(&self) -> f64 {
        self.dimension as f64 - 2.0 + self.alpha
    }

    fn require_positive_weight_range(&self) -> Result<()> {
        let n = self.dimension as f64;
        if !(self.alpha > 0.0 && self.alpha < n) {
            return Err(hypothesis(
                format!("0 < alpha < N (alpha = {}, N = {})", self.alpha, self.dimension),
                "weighted Neumann spectrum of the ball",
            ));
        }
        Ok(())
    }

    /// Weighted measure `|B_R|_alpha = N omega_N R^{N+alpha} / (N+alpha)`.
    pub fn weighted_measure(&self) -> f64 {
        let n = self.dimension as f64;
        sphere_area(self.dimension) * self.radius.powf(n + self.alpha) / (n + self.alpha)
    }
}

/// Surface area `N omega_N` of the unit sphere in `R^N`.
pub fn sphere_area(dimension: usize) -> f64 {
    let n = dimension as f64;
    2.0 * std::f64::consts::PI.powf(0.5 * n) / bessel::gamma(0.5 * n)
}

/// Radius of the ball centered at 0 with weighted measure `measure`.
pub fn equal_measure_radius(dimension: usize, alpha: f64, measure: f64) -> f64 {
    let n = dimension as f64;
    (measure * (n + alpha) / sphere_area(dimension)).powf(1.0 / (n + alpha))
}

/// One separated mode of a ball spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpectrum {
    /// Spherical-harmonic degree `k`.
    pub mode: usize,
    pub order: BesselOrder,
    pub root: RootRecord,
    /// `(root/R)^2` for Neumann spectra, `root^2/2` for the q=2 mean-zero problem.
    pub eigenvalue: f64,
    /// Eigenvalue appearing in the Euler equation (`2 lambda` for the mean-zero
    /// problem, equal to `eigenvalue` otherwise).
    pub euler_eigenvalue: f64,
    /// Number of linearly independent eigenfunctions sharing this eigenvalue.
    pub multiplicity: usize,
}

/// `r -> c r^exponent J_order(scale r)` on `(0, R]`, with samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub order: f64,
    pub scale: f64,
    pub exponent: f64,
    pub coefficient: f64,
    pub radius: f64,
    /// Limit at `r -> 0+`, `None` when it diverges.
    pub origin_limit: Option<f64>,
    pub samples: Vec<(f64, f64)>,
}

/// Profiles are evaluated on `(PROFILE_EPS R, R]`.
pub const PROFILE_EPS: f64 = 1e-8;

const DEFAULT_SAMPLES: usize = 1001;

impl RadialProfile {
    fn build(order: f64, scale: f64, exponent: f64, coefficient: f64, radius: f64) -> Self {
        let origin_limit = if order > -exponent + 1e-14 {
            Some(0.0)
        } else if (order + exponent).abs() <= 1e-14 {
            Some(coefficient * (0.5 * scale).powf(order) / bessel::gamma(order + 1.0))
        } else {
            None
        };
        let mut p = Self {
            order,
            scale,
            exponent,
            coefficient,
            radius,
            origin_limit,
            samples: Vec::new(),
        };
        p.samples = p.sample(DEFAULT_SAMPLES);
        p
    }

    /// Value at `r`; `r` below `PROFILE_EPS R` returns the origin limit.
    pub fn value(&self, r: f64) -> f64 {
        if r <= PROFILE_EPS * self.radius {
            return self.origin_limit.unwrap_or(f64::INFINITY);
        }
        self.coefficient
            * r.powf(self.exponent)
            * bessel::bessel_j_signed(self.order, self.scale * r).unwrap_or(f64::NAN)
    }

    pub fn derivative(&self, r: f64) -> f64 {
        let r = r.max(PROFILE_EPS * self.radius);
        let o = BesselOrder::new(self.order).expect("profile orders are nonnegative");
        let x = self.scale * r;
        let j = bessel::bessel_j(o, x).unwrap_or(f64::NAN);
        let jp = bessel::bessel_j_prime(o, x).unwrap_or(f64::NAN);
        self.coefficient * r.powf(self.exponent - 1.0) * (self.exponent * j + x * jp)
    }

    /// `n` equally spaced samples on `[PROFILE_EPS R, R]`.
    pub fn sample(&self, n: usize) -> Vec<(f64, f64)> {
        let lo = PROFILE_EPS * self.radius;
        let n = n.max(2);
        (0..n)
            .map(|i| {
                let r = lo + (self.radius - lo) * i as f64 / (n - 1) as f64;
                (r, self.value(r))
            })
            .collect()
    }
}

/// Quotient minimum `lambda = x_{nu_1,1}^2 / 2` of the mean-zero problem with
/// `N = 2`, `q = 2`, `p = 2` on the unit disk, `nu_1 = sqrt(1 + alpha^2/4)`.
pub fn pm_eigenvalue_q2(alpha: f64) -> Result<ModeSpectrum> {
    if !(alpha.abs() < 2.0) {
        return Err(Error::Precondition(format!(
            "|alpha| < 2 required for the q=2 mean-zero disk problem, got alpha = {alpha}"
        )));
    }
    let order = BesselOrder::new((1.0 + 0.25 * alpha * alpha).sqrt())?;
    let root = bessel::robin_root(order, alpha, 1)?;
    let x2 = root.value * root.value;
    Ok(ModeSpectrum {
        mode: 1,
        order,
        root,
        eigenvalue: 0.5 * x2,
        euler_eigenvalue: x2,
        multiplicity: 2,
    })
}

/// `u(r, theta) = phi_1(r) (A_1 cos theta + B_1 sin theta)` with
/// `phi_1(r) = r^{-alpha/2} J_{nu_1}(x_{nu_1,1} r)` scaled to sup-norm 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmEigenfunction {
    pub alpha: f64,
    pub a1: f64,
    pub b1: f64,
    pub spectrum: ModeSpectrum,
    pub profile: RadialProfile,
    /// `C` in `C phi_1(r) cos(theta - theta_0)`.
    pub amplitude: f64,
    pub phase: f64,
}

impl PmEigenfunction {
    pub fn eval(&self, r: f64, theta: f64) -> f64 {
        self.profile.value(r) * (self.a1 * theta.cos() + self.b1 * theta.sin())
    }
}

pub fn pm_eigenfunction_q2(alpha: f64, a1: f64, b1: f64) -> Result<PmEigenfunction> {
    if !(a1.is_finite() && b1.is_finite()) || (a1 == 0.0 && b1 == 0.0) {
        return Err(Error::Precondition(format!(
            "(A1, B1) must be finite and nonzero, got ({a1}, {b1})"
        )));
    }
    let spectrum = pm_eigenvalue_q2(alpha)?;
    let nu = spectrum.order.nu();
    let mut profile = RadialProfile::build(nu, spectrum.root.value, -0.5 * alpha, 1.0, 1.0);
    let sup = profile.sample(10_001).iter().fold(0.0_f64, |m, &(_, v)| m.max(v.abs()));
    profile = RadialProfile::build(nu, spectrum.root.value, -0.5 * alpha, 1.0 / sup, 1.0);
    Ok(PmEigenfunction {
        alpha,
        a1,
        b1,
        spectrum,
        profile,
        amplitude: a1.hypot(b1),
        phase: b1.atan2(a1),
    })
}

fn neumann_mode(params: &DiskSpectrumParams, k: usize) -> Result<ModeSpectrum> {
    let beta = params.beta();
    let order = BesselOrder::spherical_mode(params.dimension, params.alpha, k)?;
    let root = bessel::robin_root(order, beta, 1)?;
    let x = root.value / params.radius;
    let multiplicity = if k == 0 { 1 } else { params.dimension };
    Ok(ModeSpectrum {
        mode: k,
        order,
        root,
        eigenvalue: x * x,
        euler_eigenvalue: x * x,
        multiplicity,
    })
}

/// First nonzero radial Neumann eigenvalue `tau_1(R) = (x_{nu_0,1}/R)^2`, `nu_0 = beta/2`.
pub fn neumann_radial_tau1(params: &DiskSpectrumParams) -> Result<ModeSpectrum> {
    params.require_positive_weight_range()?;
    neumann_mode(params, 0)
}

/// First angular Neumann eigenvalue `upsilon_1(R) = (x_{nu_1,1}/R)^2`,
/// `nu_1 = sqrt(N-1+beta^2/4)`. Equals `mu_{1,alpha}(B_R)`, with multiplicity `N`.
pub fn neumann_angular_upsilon1(params: &DiskSpectrumParams) -> Result<ModeSpectrum> {
    params.require_positive_weight_range()?;
    neumann_mode(params, 1)
}

/// Weinberger's auxiliary functions on `B_{r#}`: `G = w_1` inside (with
/// `w_1(r#) = 1`), constant beyond; `N(r) = G'(r)^2 + (N-1) G(r)^2 / r^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weinberger {
    pub params: DiskSpectrumParams,
    pub mode: ModeSpectrum,
    pub w1: RadialProfile,
}

impl Weinberger {
    pub fn new(params: DiskSpectrumParams) -> Result<Self> {
        params.require_positive_weight_range()?;
        Self::build(params)
    }

    /// Same construction for `alpha` outside `(0, N)`, used only to report
    /// the behaviour of `N(r)` there. Requires `alpha > -N`.
    pub fn exploratory(params: DiskSpectrumParams) -> Result<Self> {
        if !(params.alpha > -(params.dimension as f64)) {
            return Err(hypothesis("alpha > -N", "local integrability of |x|^alpha"));
        }
        Self::build(params)
    }

    fn build(params: DiskSpectrumParams) -> Result<Self> {
        let mode = neumann_mode(&params, 1)?;
        let r = params.radius;
        let scale = mode.root.value / r;
        let exponent = -0.5 * params.beta();
        let raw = RadialProfile::build(mode.order.nu(), scale, exponent, 1.0, r);
        let at_edge = raw.value(r);
        let w1 = RadialProfile::build(mode.order.nu(), scale, exponent, 1.0 / at_edge, r);
        Ok(Self { params, mode, w1 })
    }

    pub fn r_sharp(&self) -> f64 {
        self.params.radius
    }

    pub fn g(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("G requires r >= 0, got {r}")));
        }
        Ok(if r <= self.r_sharp() { self.w1.value(r) } else { 1.0 })
    }

    pub fn g_prime(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("G' requires r >= 0, got {r}")));
        }
        Ok(if r <= self.r_sharp() {
            self.w1.derivative(r)
        } else {
            0.0
        })
    }

    pub fn n(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("N(r) is singular at r <= 0, got {r}")));
        }
        let g = self.g(r)?;
        let gp = self.g_prime(r)?;
        Ok(gp * gp + (self.params.dimension as f64 - 1.0) * g * g / (r * r))
    }

    /// Central-difference slopes of `N` at `count` equally spaced points of `(lo, hi)`.
    pub fn n_slopes(&self, lo: f64, hi: f64, count: usize) -> Result<Vec<(f64, f64)>> {
        let mut out = Vec::with_capacity(count);
        for i in 0..count {
            let r = lo + (hi - lo) * (i as f64 + 0.5) / count as f64;
            let h = 1e-6 * r;
            out.push((r, (self.n(r + h)? - self.n(r - h)?) / (2.0 * h)));
        }
        Ok(out)
    }
}

pub fn weinberger_g(params: &DiskSpectrumParams, r: f64) -> Result<f64> {
    Weinberger::new(*params)?.g(r)
}

pub fn weinberger_n(params: &DiskSpectrumParams, r: f64) -> Result<f64> {
    Weinberger::new(*params)?.n(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_zero_gives_classical_neumann_value() {
        let s = pm_eigenvalue_q2(0.0).unwrap();
        assert_eq!(s.order.nu(), 1.0);
        assert!((s.euler_eigenvalue - 3.3899577167).abs() < 1e-9);
        assert!((s.eigenvalue - 0.5 * 3.3899577167).abs() < 1e-9);
    }

    #[test]
    fn rejects_out_of_range_alpha() {
        assert!(pm_eigenvalue_q2(2.0).is_err());
        assert!(neumann_radial_tau1(&DiskSpectrumParams::new(2, -0.5, 1.0).unwrap()).is_err());
        assert!(pm_eigenfunction_q2(0.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn measure_and_radius_invert() {
        let p = DiskSpectrumParams::new(3, 1.0, 1.7).unwrap();
        let m = p.weighted_measure();
        assert!((equal_measure_radius(3, 1.0, m) - 1.7).abs() < 1e-13);
        assert!((sphere_area(2) - 2.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * std::f64::consts::PI).abs() < 1e-13);
    }

    #[test]
    fn eigenfunction_has_unit_sup_and_phase() {
        let u = pm_eigenfunction_q2(0.5, 1.0, 1.0).unwrap();
        let sup = u.profile.samples.iter().fold(0.0_f64, |m, &(_, v)| m.max(v.abs()));
        assert!((sup - 1.0).abs() < 1e-6);
        assert!((u.phase - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        for &r in &[0.1, 0.5, 0.9] {
            let t = 0.3;
            let alt = u.amplitude * u.profile.value(r) * (t - u.phase).cos();
            assert!((u.eval(r, t) - alt).abs() < 1e-14);
        }
    }
}
