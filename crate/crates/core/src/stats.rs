//! Aggregation of per-query bias and the significance tests run on it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("no samples")]
    EmptyInput,
    #[error("at least 2 samples required, got {0}")]
    InsufficientSamples(usize),
    #[error("all samples equal {constant}; the t statistic is undefined")]
    ZeroVariance { constant: f64 },
    #[error("paired samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("sample {0} is not finite")]
    NonFiniteSample(usize),
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
}

/// Mean bias: the plain average of per-query scores. Opposite-signed
/// scores cancel.
pub fn mean_bias(scores: &[f64]) -> Result<f64, StatsError> {
    if scores.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

/// Mean absolute bias: magnitude without direction.
pub fn mean_absolute_bias(scores: &[f64]) -> Result<f64, StatsError> {
    if scores.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    Ok(scores.iter().map(|s| s.abs()).sum::<f64>() / scores.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t_statistic: f64,
    pub degrees_of_freedom: u64,
    pub p_value_two_tailed: f64,
    pub alpha: f64,
    pub reject_at_alpha: bool,
}

impl TTestResult {
    fn new(t: f64, df: u64, alpha: f64) -> Self {
        let p = student_t_two_tailed_p(t, df);
        Self {
            t_statistic: t,
            degrees_of_freedom: df,
            p_value_two_tailed: p,
            alpha,
            reject_at_alpha: rejects(p, alpha),
        }
    }
}

/// The test decision: reject the null iff `p < alpha`.
pub fn rejects(p: f64, alpha: f64) -> bool {
    p < alpha
}

/// Two-tailed one-sample t-test of `H0: mean = mu0`.
pub fn one_sample_ttest(samples: &[f64], mu0: f64, alpha: f64) -> Result<TTestResult, StatsError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(StatsError::InvalidAlpha(alpha));
    }
    if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
        return Err(StatsError::NonFiniteSample(i));
    }
    let m = samples.len();
    if m < 2 {
        return Err(StatsError::InsufficientSamples(m));
    }
    if samples.iter().all(|&s| s == samples[0]) {
        return Err(StatsError::ZeroVariance {
            constant: samples[0],
        });
    }
    let mean = samples.iter().sum::<f64>() / m as f64;
    let ss: f64 = samples.iter().map(|s| (s - mean) * (s - mean)).sum();
    let sd = (ss / (m - 1) as f64).sqrt();
    let t = (mean - mu0) / (sd / (m as f64).sqrt());
    Ok(TTestResult::new(t, (m - 1) as u64, alpha))
}

/// Two-tailed paired t-test of `H0: mean(a - b) = 0`. Inputs must be
/// aligned element by element.
pub fn paired_ttest(a: &[f64], b: &[f64], alpha: f64) -> Result<TTestResult, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    one_sample_ttest(&diffs, 0.0, alpha)
}

/// Two-tailed p-value of a Student-t statistic with `df` degrees of freedom:
/// `I_x(df/2, 1/2)` with `x = df / (df + t²)`.
///
/// # Panics
///
/// If `df == 0`.
pub fn student_t_two_tailed_p(t: f64, df: u64) -> f64 {
    assert!(df >= 1, "degrees of freedom must be positive");
    if t.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    if t == 0.0 {
        return 1.0;
    }
    let v = df as f64;
    let x = v / (v + t * t);
    regularized_incomplete_beta(x, v / 2.0, 0.5).clamp(0.0, 1.0)
}

/// Lanczos approximation (g = 7, 9 terms), accurate to ~1e-15 for x > 0.
pub(crate) fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized incomplete beta `I_x(a, b)` by continued fraction
/// (modified Lentz), using the symmetry `I_x(a,b) = 1 - I_{1-x}(b,a)` to stay
/// in the fast-converging region.
pub(crate) fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(x, a, b) / a
    } else {
        1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b
    }
}

fn beta_continued_fraction(x: f64, a: f64, b: f64) -> f64 {
    const MAX_ITER: usize = 500;
    const EPS: f64 = 1e-16;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        // Even step.
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        // Odd step.
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Pearson correlation. `None` when fewer than two points or either series
/// is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    // Tested exactly: a constant series can leave a rounding-sized spread
    // around its computed mean.
    if x.iter().all(|&a| a == x[0]) || y.iter().all(|&b| b == y[0]) {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}
