//! Incomplete gamma functions for integer shape.
//!
//! For integer `M` the upper function has the finite form
//! `Gamma(M, x) = (M-1)! e^{-x} sum_{m<M} x^m / m!`. Below `x = M` the lower
//! function is summed from its own power series instead, so neither side is
//! obtained by cancelling two nearly equal numbers.

use crate::error::{invalid, Result};

/// Upper and lower incomplete gamma values, unnormalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncGamma {
    pub upper: f64,
    pub lower: f64,
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

pub fn inc_gamma_int(m: u32, x: f64) -> Result<IncGamma> {
    if m < 1 {
        return Err(invalid("m", "shape must be at least 1"));
    }
    if x.is_nan() || x < 0.0 {
        return Err(invalid("x", format!("must be nonnegative, got {x}")));
    }
    let fact = factorial(m - 1);
    let (lower, upper) = regularized(m, x);
    Ok(IncGamma {
        upper: upper * fact,
        lower: lower * fact,
    })
}

/// `(P(m, x), Q(m, x))`, the regularized lower and upper functions.
pub(crate) fn regularized(m: u32, x: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 1.0);
    }
    if x == f64::INFINITY {
        return (1.0, 0.0);
    }
    if x < f64::from(m) {
        let p = lower_series(m, x);
        (p, 1.0 - p)
    } else {
        let q = upper_sum(m, x);
        (1.0 - q, q)
    }
}

/// `e^{-x} sum_{n<m} x^n / n!`
fn upper_sum(m: u32, x: f64) -> f64 {
    let mut term = (-x).exp();
    let mut sum = term;
    for n in 1..m {
        term *= x / f64::from(n);
        sum += term;
    }
    sum
}

/// `x^m e^{-x} / m! * sum_{n>=0} x^n m! / (m+n)!`, valid for `x < m + 1`.
fn lower_series(m: u32, x: f64) -> f64 {
    let mut lead = (-x).exp();
    for n in 1..=m {
        lead *= x / f64::from(n);
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = f64::from(m);
    loop {
        k += 1.0;
        term *= x / k;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    lead * sum
}

pub(crate) fn gamma_p(m: u32, x: f64) -> f64 {
    regularized(m, x).0
}

pub(crate) fn gamma_q(m: u32, x: f64) -> f64 {
    regularized(m, x).1
}

/// `P(m, hi) - P(m, lo)` for `lo <= hi`, taken from whichever tail is small.
pub(crate) fn gamma_p_diff(m: u32, lo: f64, hi: f64) -> f64 {
    if lo >= f64::from(m) {
        gamma_q(m, lo) - gamma_q(m, hi)
    } else {
        gamma_p(m, hi) - gamma_p(m, lo)
    }
}
