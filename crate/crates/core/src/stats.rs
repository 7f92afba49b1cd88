//! Sample summaries, two-sample z and Welch t tests.

use core::f64::consts::SQRT_2;
use core::fmt;

use libm::{erfc, exp, fabs, lgamma, log, sqrt};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StatsError {
    Empty,
    TooFewSamples { needed: usize, got: usize },
}

impl fmt::Display for StatsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatsError::Empty => f.write_str("no samples"),
            StatsError::TooFewSamples { needed, got } => {
                write!(f, "need at least {needed} samples, got {got}")
            }
        }
    }
}

impl core::error::Error for StatsError {}

/// Divisor used for the standard deviation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StdKind {
    /// Divide by `n`.
    #[default]
    Population,
    /// Divide by `n - 1`.
    Sample,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleSummary {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
}

fn mean_and_ss(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let ss = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    (mean, ss)
}

/// Mean and population standard deviation.
pub fn summarize(samples: &[f64]) -> Result<SampleSummary, StatsError> {
    summarize_with(samples, StdKind::Population)
}

pub fn summarize_with(samples: &[f64], kind: StdKind) -> Result<SampleSummary, StatsError> {
    let n = samples.len();
    if n == 0 {
        return Err(StatsError::Empty);
    }
    let (mean, ss) = mean_and_ss(samples);
    let divisor = match kind {
        StdKind::Population => n as f64,
        StdKind::Sample if n > 1 => (n - 1) as f64,
        StdKind::Sample => return Err(StatsError::TooFewSamples { needed: 2, got: 1 }),
    };
    Ok(SampleSummary {
        n,
        mean,
        std: sqrt(ss / divisor),
    })
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Two-tailed normal p-value of `z`.
pub fn normal_two_tailed(z: f64) -> f64 {
    erfc(fabs(z) / SQRT_2)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZTest {
    /// Infinite when both groups have zero spread and different means.
    pub z: f64,
    pub p: f64,
}

impl ZTest {
    pub fn saturated(&self) -> bool {
        self.z.is_infinite()
    }
}

pub fn z_test(a: &SampleSummary, b: &SampleSummary) -> ZTest {
    let diff = a.mean - b.mean;
    let se = sqrt(a.std * a.std / a.n as f64 + b.std * b.std / b.n as f64);
    if se == 0.0 {
        return degenerate(diff);
    }
    let z = diff / se;
    ZTest {
        z,
        p: normal_two_tailed(z),
    }
}

fn degenerate(diff: f64) -> ZTest {
    if diff == 0.0 {
        ZTest { z: 0.0, p: 1.0 }
    } else {
        ZTest {
            z: f64::INFINITY.copysign(diff),
            p: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WelchT {
    pub t: f64,
    pub dof: f64,
    pub p: f64,
}

/// Welch's unequal-variance t-test with Welch–Satterthwaite degrees of
/// freedom.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<WelchT, StatsError> {
    for s in [a, b] {
        if s.len() < 2 {
            return Err(StatsError::TooFewSamples {
                needed: 2,
                got: s.len(),
            });
        }
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, ssa) = mean_and_ss(a);
    let (mb, ssb) = mean_and_ss(b);
    let qa = ssa / (na - 1.0) / na;
    let qb = ssb / (nb - 1.0) / nb;
    let se2 = qa + qb;
    if se2 == 0.0 {
        let z = degenerate(ma - mb);
        return Ok(WelchT {
            t: z.z,
            dof: na + nb - 2.0,
            p: z.p,
        });
    }
    let t = (ma - mb) / sqrt(se2);
    let dof = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
    Ok(WelchT {
        t,
        dof,
        p: student_t_two_tailed(t, dof),
    })
}

/// Two-tailed Student-t p-value: `I_{v/(v+t^2)}(v/2, 1/2)`.
pub fn student_t_two_tailed(t: f64, dof: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    if t.is_infinite() {
        return 0.0;
    }
    regularized_beta(dof / (dof + t * t), dof / 2.0, 0.5)
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn regularized_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = lgamma(a + b) - lgamma(a) - lgamma(b) + a * log(x) + b * log(1.0 - x);
    if x < (a + 1.0) / (a + b + 2.0) {
        exp(ln_front) * beta_fraction(x, a, b) / a
    } else {
        1.0 - exp(ln_front) * beta_fraction(1.0 - x, b, a) / b
    }
}

/// Continued fraction for the incomplete beta, modified Lentz evaluation.
fn beta_fraction(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let clamp = |v: f64| if fabs(v) < TINY { TINY } else { v };
    let mut c = 1.0;
    let mut d = 1.0 / clamp(1.0 - (a + b) * x / (a + 1.0));
    let mut h = d;
    for m in 1..1000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let even = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
        d = 1.0 / clamp(1.0 + even * d);
        c = clamp(1.0 + even / c);
        h *= d * c;
        let odd = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
        d = 1.0 / clamp(1.0 + odd * d);
        c = clamp(1.0 + odd / c);
        let delta = d * c;
        h *= delta;
        if fabs(delta - 1.0) < EPS {
            break;
        }
    }
    h
}

/// Renders a p-value, reporting underflow as `< 1e-300` rather than 0.
pub struct PValue(pub f64);

impl fmt::Display for PValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 < 1e-300 {
            f.write_str("< 1e-300")
        } else {
            write!(f, "{:.6e}", self.0)
        }
    }
}
