//! Real-order evaluation of `J_mu(x)` for `x >= 0`.
//!
//! Small arguments use the ascending series. Everything else runs Miller's
//! backward recurrence on the order family `f, f+1, f+2, ...` (with `f` the
//! fractional part of `mu`), normalized by
//!
//! ```text
//! sum_k d_k J_{f+2k}(x) = (x/2)^f / Gamma(f+1),
//! d_0 = 1,  d_k = (f+2k)/k * prod_{i=1}^{k-1} (f+i)/i
//! ```
//!
//! Negative non-integer orders continue the (then dominant) downward
//! recurrence past `f`.

use super::gamma::gamma;

/// Below this argument the ascending series loses at most one digit to
/// cancellation for every order we care about.
pub(crate) const SERIES_MAX_X: f64 = 3.0;

const RESCALE_AT: f64 = 1e200;

pub(crate) fn series(mu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if mu == 0.0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * x;
    let mut term = half.powf(mu) / gamma(mu + 1.0);
    let mut sum = term;
    let q = half * half;
    for k in 0..500 {
        let k = k as f64;
        term *= -q / ((k + 1.0) * (k + mu + 1.0));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn miller(mu: f64, x: f64) -> f64 {
    let base = mu.floor();
    let f = mu - base;
    let top_order = mu.max(x).max(f);
    let n_start = (top_order - f).ceil() as i64 + 40 + (10.0 * x.cbrt()).ceil() as i64;
    let n_target = base as i64; // mu = f + n_target

    // b_{n+1}, b_n for the order f + n
    let mut above = 0.0_f64;
    let mut cur = 1e-30_f64;
    let mut norm_sum = 0.0_f64;
    let mut stored = if n_target == n_start { cur } else { 0.0 };
    let mut stored_at_one = 0.0; // b_1, needed to continue below f

    let kmax = (n_start / 2 + 1) as usize;
    let mut dk = Vec::with_capacity(kmax + 1);
    dk.push(1.0);
    let mut prod = 1.0;
    for k in 1..=kmax as i64 {
        if k >= 2 {
            prod *= (f + (k - 1) as f64) / (k - 1) as f64;
        }
        dk.push((f + 2.0 * k as f64) / k as f64 * prod);
    }

    if n_start % 2 == 0 {
        norm_sum += dk[(n_start / 2) as usize] * cur;
    }
    let mut n = n_start;
    while n > 0 {
        let order = f + n as f64;
        let below = 2.0 * order / x * cur - above;
        above = cur;
        cur = below;
        n -= 1;
        if n % 2 == 0 {
            norm_sum += dk[(n / 2) as usize] * cur;
        }
        if n == n_target {
            stored = cur;
        }
        if n == 1 {
            stored_at_one = cur;
        }
        if cur.abs() > RESCALE_AT {
            let s = 1.0 / RESCALE_AT;
            cur *= s;
            above *= s;
            norm_sum *= s;
            stored *= s;
            stored_at_one *= s;
        }
    }
    let scale = (0.5 * x).powf(f) / gamma(f + 1.0) / norm_sum;
    if n_target >= 0 {
        return stored * scale;
    }
    // continue downward: cur = b_0 (order f), above = b_1
    let mut above = stored_at_one * scale;
    let mut cur = cur * scale;
    let mut n = 0_i64;
    while n > n_target {
        let order = f + n as f64;
        let below = 2.0 * order / x * cur - above;
        above = cur;
        cur = below;
        n -= 1;
    }
    cur
}

/// `J_mu(x)` for real `mu` and `x >= 0`. Negative integer orders use
/// `J_{-n} = (-1)^n J_n`.
pub(crate) fn jv(mu: f64, x: f64) -> f64 {
    if mu < 0.0 && mu == mu.floor() {
        let n = -mu;
        let sign = if (n as i64) % 2 == 0 { 1.0 } else { -1.0 };
        return sign * jv(n, x);
    }
    if x <= SERIES_MAX_X {
        series(mu, x)
    } else {
        miller(mu, x)
    }
}
