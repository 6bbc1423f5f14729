//! Chebyshev-Gauss rule and an adaptive Gauss-Kronrod reference integrator.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};

/// First-kind Chebyshev-Gauss rule on `[-1, 1]`.
///
/// Applied to an unweighted integrand through
/// `int g = int (g(x) sqrt(1-x^2)) / sqrt(1-x^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevRule {
    nodes: Vec<f64>,
    weight: f64,
}

impl ChebyshevRule {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n_a", "need at least one node"));
        }
        let nodes = (1..=n)
            .map(|i| ((2 * i - 1) as f64 * PI / (2 * n) as f64).cos())
            .collect();
        Ok(Self {
            nodes,
            weight: PI / n as f64,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// `sum_i w_i f(x_i)`: the rule for `int f(x) / sqrt(1-x^2) dx`.
    pub fn weighted_sum<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.weight * self.nodes.iter().map(|&x| f(x)).sum::<f64>()
    }

    /// Approximates `int_lo^hi f(t) dt`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, lo: f64, hi: f64) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        half * self.weighted_sum(|x| f(half * x + mid) * (1.0 - x * x).sqrt())
    }
}

// 15-point Kronrod abscissae and weights with the embedded 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_SEGMENTS: usize = 4000;

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64) -> (f64, f64) {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let fc = f(mid);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(mid - dx) + f(mid + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * half, ((k - g) * half).abs())
}

fn adaptive<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (v, e) = kronrod(f, lo, hi);
    let mut segments = vec![(lo, hi, v, e)];
    loop {
        let (total, err) = segments
            .iter()
            .fold((0.0, 0.0), |(t, r), s| (t + s.2, r + s.3));
        if !total.is_finite() {
            return Err(Error::NonConvergence {
                refinements: segments.len(),
                error: f64::NAN,
            });
        }
        if err <= tol {
            return Ok(total);
        }
        if segments.len() >= MAX_SEGMENTS {
            return Err(Error::NonConvergence {
                refinements: segments.len(),
                error: err,
            });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .3.total_cmp(&b.1 .3))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (a, b, _, _) = segments.swap_remove(worst);
        let m = 0.5 * (a + b);
        let (v1, e1) = kronrod(f, a, m);
        let (v2, e2) = kronrod(f, m, b);
        segments.push((a, m, v1, e1));
        segments.push((m, b, v2, e2));
    }
}

/// Adaptive reference integral of `f` over `[lo, hi]`; `hi` may be `+inf`,
/// in which case the tail is mapped through `t = 1/x`.
///
/// Refines the worst Gauss-Kronrod segment until the summed error estimate
/// drops below `tol`.
pub fn oracle_integrate<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !lo.is_finite() || hi.is_nan() || hi < lo {
        return Err(invalid(
            "bounds",
            format!("unsupported interval [{lo}, {hi}]"),
        ));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(invalid("tol", "must be positive"));
    }
    if hi == lo {
        return Ok(0.0);
    }
    if hi.is_finite() {
        return adaptive(&mut f, lo, hi, tol);
    }
    let split = lo.max(0.0) + 1.0;
    let head = adaptive(&mut f, lo, split, 0.5 * tol)?;
    let tail = adaptive(
        &mut |t: f64| {
            let x = 1.0 / t;
            f(x) * x * x
        },
        0.0,
        1.0 / split,
        0.5 * tol,
    )?;
    Ok(head + tail)
}
