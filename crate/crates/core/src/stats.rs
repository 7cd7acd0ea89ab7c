//! Beta-binomial numerics: regularized incomplete beta function, beta
//! quantiles, conjugate posterior updates, and Clopper-Pearson exact
//! binomial confidence intervals.

use thiserror::Error;

/// Continued-fraction convergence tolerance.
const CF_EPS: f64 = 1e-15;
/// Continued-fraction iteration cap.
const CF_MAX_ITER: usize = 500;
/// Bisection target interval width for quantiles.
const QUANTILE_WIDTH: f64 = 1e-12;
/// Bisection iteration cap.
const QUANTILE_MAX_ITER: usize = 200;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("argument {name} = {value} outside valid domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("iteration cap exceeded in {routine}")]
    Convergence { routine: &'static str },
}

/// Parameters (a, b) of a beta distribution; the Bayes agent's belief state.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BetaParams {
    pub a: f64,
    pub b: f64,
}

impl BetaParams {
    pub fn new(a: f64, b: f64) -> Result<Self, StatsError> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(StatsError::Domain {
                name: "a",
                value: a,
                domain: "(0, inf)",
            });
        }
        if !(b > 0.0) || !b.is_finite() {
            return Err(StatsError::Domain {
                name: "b",
                value: b,
                domain: "(0, inf)",
            });
        }
        Ok(Self { a, b })
    }

    /// Flat beta(1, 1) prior.
    pub fn flat() -> Self {
        Self { a: 1.0, b: 1.0 }
    }
}

/// Observed heads/tails counts shared by all agents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counts {
    pub heads: u32,
    pub tails: u32,
}

impl Counts {
    pub fn new(heads: u32, tails: u32) -> Self {
        Self { heads, tails }
    }

    pub fn total(&self) -> u32 {
        self.heads + self.tails
    }
}

/// Accepted frequency bounds [lower, upper] at confidence `level` = 1 - alpha.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

impl ConfidenceInterval {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Natural log of the gamma function (Lanczos approximation, g = 7).
fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        std::f64::consts::PI.ln() - (std::f64::consts::PI * x).sin().ln() - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let mut sum = COEFFS[0];
        for (i, c) in COEFFS.iter().enumerate().skip(1) {
            sum += c / (x + i as f64);
        }
        let t = x + 7.5;
        0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + sum.ln()
    }
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_cf(x: f64, a: f64, b: f64) -> Result<f64, StatsError> {
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

    for m in 1..=CF_MAX_ITER {
        let mf = m as f64;
        let m2 = 2.0 * mf;

        let aa = mf * (b - mf) * x / ((qam + m2) * (a + m2));
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

        let aa = -(a + mf) * (qab + mf) * x / ((a + m2) * (qap + m2));
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

        if (del - 1.0).abs() < CF_EPS {
            return Ok(h);
        }
    }
    Err(StatsError::Convergence { routine: "beta_cf" })
}

/// Regularized incomplete beta function I_x(a, b), the Beta(a, b) CDF at x.
///
/// Uses the continued-fraction expansion with the symmetry switch at
/// x > (a + 1) / (a + b + 2).
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> Result<f64, StatsError> {
    if !(0.0..=1.0).contains(&x) || !x.is_finite() {
        return Err(StatsError::Domain {
            name: "x",
            value: x,
            domain: "[0, 1]",
        });
    }
    BetaParams::new(a, b)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok(front * beta_cf(x, a, b)? / a)
    } else {
        Ok(1.0 - front * beta_cf(1.0 - x, b, a)? / b)
    }
}

/// Inverse of the Beta(a, b) CDF, by bisection on [0, 1].
pub fn beta_quantile(q: f64, a: f64, b: f64) -> Result<f64, StatsError> {
    if !(0.0..=1.0).contains(&q) || !q.is_finite() {
        return Err(StatsError::Domain {
            name: "q",
            value: q,
            domain: "[0, 1]",
        });
    }
    BetaParams::new(a, b)?;
    if q == 0.0 {
        return Ok(0.0);
    }
    if q == 1.0 {
        return Ok(1.0);
    }
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    let mut best = 0.5;
    let mut best_residual = f64::INFINITY;
    for _ in 0..QUANTILE_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let f = regularized_incomplete_beta(mid, a, b)?;
        let residual = (f - q).abs();
        if residual < best_residual {
            best = mid;
            best_residual = residual;
        }
        // Width alone is not enough where the CDF is steep (extreme
        // quantiles at small a or b); keep halving until the CDF value
        // matches too.
        if hi - lo <= QUANTILE_WIDTH && residual <= 1e-11 {
            return Ok(mid);
        }
        if f < q {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo == 0.0 {
            break;
        }
        // Bracket down to adjacent doubles: `best` is the representable
        // optimum even though the residual target is out of reach (J-shaped
        // densities put extreme quantiles within a few ulps of 0 or 1).
        if hi - lo <= 2.0 * f64::EPSILON * hi.abs() {
            return Ok(best);
        }
    }
    if best_residual <= 1e-10 {
        Ok(best)
    } else {
        Err(StatsError::Convergence {
            routine: "beta_quantile",
        })
    }
}

/// Conjugate update: beta(a, b) with h heads and t tails becomes
/// beta(a + h, b + t).
pub fn beta_posterior(prior: BetaParams, evidence: Counts) -> BetaParams {
    BetaParams {
        a: prior.a + f64::from(evidence.heads),
        b: prior.b + f64::from(evidence.tails),
    }
}

/// Mean of a beta distribution: a / (a + b).
pub fn beta_mean(p: BetaParams) -> f64 {
    p.a / (p.a + p.b)
}

/// Clopper-Pearson exact two-sided binomial confidence interval at level
/// 1 - alpha.
///
/// With n observations and h successes:
/// lower = 0 when h = 0, else the alpha/2 quantile of Beta(h, n - h + 1);
/// upper = 1 when h = n, else the 1 - alpha/2 quantile of Beta(h + 1, n - h).
/// Zero observations give [0, 1].
pub fn confidence_interval(evidence: Counts, alpha: f64) -> Result<ConfidenceInterval, StatsError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(StatsError::Domain {
            name: "alpha",
            value: alpha,
            domain: "(0, 1)",
        });
    }
    let n = evidence.total();
    let h = evidence.heads;
    let level = 1.0 - alpha;
    if n == 0 {
        return Ok(ConfidenceInterval {
            lower: 0.0,
            upper: 1.0,
            level,
        });
    }
    let nf = f64::from(n);
    let hf = f64::from(h);
    let lower = if h == 0 {
        0.0
    } else {
        beta_quantile(alpha / 2.0, hf, nf - hf + 1.0)?
    };
    let upper = if h == n {
        1.0
    } else {
        beta_quantile(1.0 - alpha / 2.0, hf + 1.0, nf - hf)?
    };
    Ok(ConfidenceInterval {
        lower,
        upper,
        level,
    })
}
