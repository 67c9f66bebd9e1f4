//! Exact-arithmetic power-series references for `J_nu` and `J_nu'` at
//! integer and half-integer orders and rational arguments. Independent of the
//! library's evaluation path (no recurrence, no floating-point series).

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = 80 + den.bits() as i64 - num.bits() as i64;
    let scaled = if shift >= 0 {
        (num.abs() << shift as usize) / den
    } else {
        (num.abs() >> (-shift) as usize) / den
    };
    let v = scaled.to_f64().unwrap() * 2f64.powi(-(shift as i32));
    if num.is_negative() {
        -v
    } else {
        v
    }
}

/// `sum_{k=0}^{terms} (-1)^k c^k P_k / Q_k` with `c = a/b`, returned as an
/// exact fraction. `Q_k` must divide `Q_terms`.
fn alternating_sum(
    a: &BigInt,
    b: &BigInt,
    terms: u64,
    p: impl Fn(u64) -> BigInt,
    q: impl Fn(u64) -> BigInt,
) -> (BigInt, BigInt) {
    let q_top = q(terms);
    let mut num = BigInt::zero();
    let mut a_pow = BigInt::one();
    for k in 0..=terms {
        let b_pow = num_traits::pow(b.clone(), (terms - k) as usize);
        let mut t = &a_pow * b_pow * p(k) * (&q_top / q(k));
        if k % 2 == 1 {
            t = -t;
        }
        num += t;
        a_pow *= a;
    }
    let den = num_traits::pow(b.clone(), terms as usize) * q_top;
    (num, den)
}

fn terms_for(x: f64) -> u64 {
    (2.0 * x + 60.0) as u64
}

/// Argument `x = p/q`.
#[derive(Clone, Copy, Debug)]
pub struct Rational {
    pub p: i64,
    pub q: i64,
}

impl Rational {
    pub fn value(self) -> f64 {
        self.p as f64 / self.q as f64
    }
    fn c(self) -> (BigInt, BigInt) {
        // x^2 / 4
        (
            BigInt::from(self.p).pow(2),
            BigInt::from(4) * BigInt::from(self.q).pow(2),
        )
    }
}

/// `J_n(x)` for integer `n >= 0`.
pub fn j_integer(n: u64, x: Rational) -> f64 {
    let (a, b) = x.c();
    let terms = terms_for(x.value());
    let (num, den) = alternating_sum(&a, &b, terms, |_| BigInt::one(), |k| factorial(k) * factorial(k + n));
    let num = num * BigInt::from(x.p).pow(n as u32);
    let den = den * (BigInt::from(2 * x.q)).pow(n as u32);
    to_f64(&num, &den)
}

/// `J_n'(x)` for integer `n >= 0`, by term-wise differentiation.
pub fn jp_integer(n: u64, x: Rational) -> f64 {
    let (a, b) = x.c();
    let terms = terms_for(x.value());
    let (num, den) = alternating_sum(
        &a,
        &b,
        terms,
        |k| BigInt::from(2 * k + n),
        |k| factorial(k) * factorial(k + n),
    );
    // (x/2)^{n-1} / 2
    let (num, den) = if n >= 1 {
        (
            num * BigInt::from(x.p).pow(n as u32 - 1),
            den * BigInt::from(2 * x.q).pow(n as u32 - 1) * 2,
        )
    } else {
        (num * BigInt::from(2 * x.q), den * BigInt::from(x.p) * 2)
    };
    to_f64(&num, &den)
}

fn half_integer_sum(m: u64, x: Rational, derivative: bool) -> f64 {
    // Gamma(k + m + 3/2) = (2n)! / (4^n n!) sqrt(pi), n = k + m + 1
    let (a, b) = x.c();
    let terms = terms_for(x.value());
    let nu2 = 2 * m + 1; // 2 nu
    let (num, den) = alternating_sum(
        &a,
        &b,
        terms,
        |k| {
            let n = k + m + 1;
            let base = BigInt::from(4).pow(n as u32) * factorial(n);
            if derivative {
                base * BigInt::from(4 * k + nu2)
            } else {
                base
            }
        },
        |k| {
            let n = k + m + 1;
            factorial(k) * factorial(2 * n)
        },
    );
    to_f64(&num, &den)
}

/// `J_{m+1/2}(x)`.
pub fn j_half_integer(m: u64, x: Rational) -> f64 {
    let nu = m as f64 + 0.5;
    let xv = x.value();
    (0.5 * xv).powf(nu) / std::f64::consts::PI.sqrt() * half_integer_sum(m, x, false)
}

/// `J_{m+1/2}'(x)`.
pub fn jp_half_integer(m: u64, x: Rational) -> f64 {
    let nu = m as f64 + 0.5;
    let xv = x.value();
    // d/dx (x/2)^{2k+nu} = (2k+nu)/2 (x/2)^{2k+nu-1}; (2k+nu) = (4k+2nu)/2
    (0.5 * xv).powf(nu - 1.0) / std::f64::consts::PI.sqrt() * 0.25 * half_integer_sum(m, x, true)
}

/// Reference `J_nu(x)` for `nu` in {0, 0.5, 1, 1.5, 2, ...}.
pub fn j_ref(nu: f64, x: Rational) -> f64 {
    if nu.fract() == 0.0 {
        j_integer(nu as u64, x)
    } else {
        j_half_integer(nu.floor() as u64, x)
    }
}

pub fn jp_ref(nu: f64, x: Rational) -> f64 {
    if nu.fract() == 0.0 {
        jp_integer(nu as u64, x)
    } else {
        jp_half_integer(nu.floor() as u64, x)
    }
}

/// Plain `f64` ascending series, only trustworthy for small `x`.
pub fn j_series_f64(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    // 1 / Gamma(nu + 1) for nu in {0, 0.5, 1, 1.5, 2, ...} built by recurrence
    let mut g = if nu.fract() == 0.0 {
        1.0
    } else {
        std::f64::consts::PI.sqrt() / 2.0
    };
    let mut s = if nu.fract() == 0.0 { 1.0 } else { 1.5 };
    while s <= nu + 1e-12 {
        g *= s;
        s += 1.0;
    }
    let mut term = half.powf(nu) / g;
    let mut sum = term;
    for k in 0..200 {
        let k = k as f64;
        term *= -half * half / ((k + 1.0) * (k + nu + 1.0));
        sum += term;
    }
    sum
}

/// Bisection to full precision on a sign change of `f` in `[lo, hi]`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    assert!(flo * f(hi) < 0.0, "no sign change on [{lo}, {hi}]");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `F_nu(x) = x J_nu'(x) / J_nu(x)` for any real `nu > -1` as a ratio of two
/// ascending series; the `1/Gamma(nu+1)` prefactor cancels.
pub fn f_nu_series(nu: f64, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut t = 1.0;
    let mut num = nu;
    let mut den = 1.0;
    for k in 1..300 {
        let k = k as f64;
        t *= q / (k * (nu + k));
        num += (2.0 * k + nu) * t;
        den += t;
    }
    num / den
}
