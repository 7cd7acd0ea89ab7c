//! Shared test support: an independent numeric-integration oracle for the
//! beta CDF. Deliberately avoids the library's continued-fraction and
//! log-gamma code paths; everything here is plain quadrature.

/// Integrate f over [0, x] by tanh-sinh (double-exponential) quadrature.
/// Handles integrable endpoint singularities such as t^(a-1) at 0.
fn tanh_sinh<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
    let half = x / 2.0;
    let max_level = 12;
    // Wide enough that the remaining tail is negligible even for the
    // slowest-decaying integrands here (exponents down to 0.1).
    let u_max = 6.5_f64;
    let mut h = 1.0_f64;
    let mut prev = f64::INFINITY;
    let mut result = 0.0;
    for level in 0..=max_level {
        let mut sum = 0.0;
        // At level 0 take every node; afterwards only the odd ones, since
        // the even nodes were already summed at coarser spacing.
        let step = if level == 0 { 1 } else { 2 };
        let start = if level == 0 { 0 } else { 1 };
        let n_nodes = (u_max / h).ceil() as i64;
        let mut k = start;
        while k <= n_nodes {
            for sign in [1.0, -1.0] {
                let u = sign * h * k as f64;
                if u == 0.0 && sign < 0.0 {
                    continue;
                }
                let s = std::f64::consts::FRAC_PI_2 * u.sinh();
                // t = half * (1 + tanh(s)), evaluated in a form stable at
                // both ends
                let e2 = (2.0 * s).exp();
                let t = if e2.is_infinite() {
                    x
                } else {
                    x * e2 / (1.0 + e2)
                };
                if t <= 0.0 || t >= x {
                    continue;
                }
                let w = std::f64::consts::FRAC_PI_2 * u.cosh() / s.cosh().powi(2);
                let v = f(t);
                if v.is_finite() {
                    sum += w * v;
                }
            }
            k += step;
        }
        result = if level == 0 {
            half * h * sum
        } else {
            0.5 * result + half * h * sum
        };
        // Relative convergence check, so small-magnitude integrals (sharply
        // peaked densities far from x) are still resolved.
        if level >= 4 && (result - prev).abs() <= 4e-15 * result.abs() {
            break;
        }
        prev = result;
        h /= 2.0;
    }
    result
}

/// Beta CDF at x by direct quadrature of the density, normalized by the
/// complete integral computed the same way.
pub fn beta_cdf_oracle(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    // Integrate from the nearer endpoint for accuracy.
    if x > 0.5 {
        return 1.0 - beta_cdf_oracle(1.0 - x, b, a);
    }
    let density = |t: f64| t.powf(a - 1.0) * (1.0 - t).powf(b - 1.0);
    let partial = tanh_sinh(density, x);
    let lower = tanh_sinh(density, 0.5);
    let upper = tanh_sinh(|t: f64| t.powf(b - 1.0) * (1.0 - t).powf(a - 1.0), 0.5);
    partial / (lower + upper)
}

/// Invert the oracle CDF by bisection.
pub fn beta_quantile_oracle(q: f64, a: f64, b: f64) -> f64 {
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if beta_cdf_oracle(mid, a, b) < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// ln of n choose k, by direct summation.
pub fn ln_choose(n: u32, k: u32) -> f64 {
    let mut acc = 0.0;
    for i in 0..k {
        acc += ((n - i) as f64).ln() - ((i + 1) as f64).ln();
    }
    acc
}

/// Binomial pmf by direct evaluation.
pub fn binomial_pmf(n: u32, h: u32, p: f64) -> f64 {
    (ln_choose(n, h) + f64::from(h) * p.ln() + f64::from(n - h) * (1.0 - p).ln()).exp()
}
