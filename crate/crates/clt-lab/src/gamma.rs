//! Standardized sums of unit exponentials: the smooth companion family for
//! the `h = 0` branch of the interval limit.
//!
//! For `X_i ~ Exp(1)` (`mu = 1`, `sigma = 1`, `alpha = 2`, `beta_3 = 2`,
//! span 0), the standardized sum has the exactly computable distribution
//! function `F_n(x) = P(n, n + sqrt(n) x)` with `P` the regularized lower
//! incomplete gamma function, so the non-lattice limits can be verified
//! without Monte Carlo:
//!
//! * `sqrt(n) * interval   -> (1/3 + (2/3) e^{-3/2}) / sqrt(2 pi)`
//! * `sqrt(n) * kolmogorov -> 1 / (3 sqrt(2 pi))`

use crate::deviation::{DeviationExtrema, ExtremumSite};
use crate::normal::phi_cdf;
use thiserror::Error;

/// Largest `n` accepted by this module.
pub const MAX_N: u32 = 4096;

/// Scan window and step for locating deviation extrema: beyond +-12 both
/// tails are far below any extremum at the supported n, and between grid
/// points the derivative of `D` is O(1), so a 0.01 step brackets every
/// extremum.
const SCAN_LIMIT: f64 = 12.0;
const SCAN_STEP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("gamma family limited to n <= {max}, got {n}")]
pub struct ScaleExceeded {
    pub n: u32,
    pub max: u32,
}

/// Distribution function of the standardized sum of `n` unit exponentials:
/// `P(n, n + sqrt(n) x)`, zero when the argument is non-positive.
///
/// Relative error below 1e-12: series for arguments under `n + 1`,
/// continued fraction otherwise, with the log-gamma prefactor assembled
/// from a cancellation-free Stirling form.
pub fn gamma_standardized_cdf(n: u32, x: f64) -> Result<f64, ScaleExceeded> {
    if !(1..=MAX_N).contains(&n) {
        return Err(ScaleExceeded { n, max: MAX_N });
    }
    let y = n as f64 + (n as f64).sqrt() * x;
    if y <= 0.0 {
        return Ok(0.0);
    }
    Ok(reg_lower_gamma(n, y))
}

/// Regularized lower incomplete gamma `P(a, y)` for integer `a >= 1`.
fn reg_lower_gamma(a_int: u32, y: f64) -> f64 {
    let a = a_int as f64;
    let prefactor = log_prefactor(a_int, y).exp();
    if y < a + 1.0 {
        // P(a, y) = prefactor * sum_k y^k / (a (a+1) ... (a+k))
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut denom = a;
        for _ in 0..100_000 {
            denom += 1.0;
            term *= y / denom;
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        prefactor * sum
    } else {
        // Q(a, y) by the modified Lentz continued fraction.
        const TINY: f64 = 1e-300;
        let mut b = y + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut q = d;
        for i in 1..100_000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            q *= delta;
            if (delta - 1.0).abs() < 1e-17 {
                break;
            }
        }
        1.0 - prefactor * q
    }
}

/// `-y + a ln y - ln Gamma(a)` without the catastrophic cancellation of the
/// three large terms: with `u = (y - a)/a`,
///
/// `= a (ln(1+u) - u) + ln(a / (2 pi)) / 2 - stirling_tail(a)`.
fn log_prefactor(a_int: u32, y: f64) -> f64 {
    let a = a_int as f64;
    let u = (y - a) / a;
    a * ln1p_minus_x(u) + 0.5 * (a / (2.0 * core::f64::consts::PI)).ln() - stirling_tail(a_int)
}

/// `ln(1 + u) - u`, by series for small `u` where the direct form cancels.
fn ln1p_minus_x(u: f64) -> f64 {
    if u.abs() >= 0.5 {
        return u.ln_1p() - u;
    }
    // -u^2/2 + u^3/3 - u^4/4 + ...
    let mut term = -u * u / 2.0;
    let mut sum = term;
    let mut power = -u * u;
    let mut k = 2.0;
    loop {
        power *= -u;
        k += 1.0;
        term = power / k;
        sum += term;
        if term.abs() < sum.abs() * 1e-17 || k > 200.0 {
            return sum;
        }
    }
}

/// `ln Gamma(a) - [(a - 1/2) ln a - a + ln(2 pi)/2]` for integer `a`.
///
/// Exact log-factorial for small `a`, Stirling series (error far below
/// 1e-16 from a = 21 on) above.
fn stirling_tail(a_int: u32) -> f64 {
    let a = a_int as f64;
    if a_int <= 20 {
        let mut fact = 1.0f64; // (a-1)! is exact in f64 up to a = 20 digits-wise
        for k in 2..a_int {
            fact *= k as f64;
        }
        let ln_gamma = fact.ln();
        return ln_gamma - ((a - 0.5) * a.ln() - a + 0.5 * (2.0 * core::f64::consts::PI).ln());
    }
    let z2 = a * a;
    (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * z2)) / z2) / z2) / a
}

/// Locations and values of the extrema of `D(x) = F_n(x) - Phi(x)`: sign
/// changes of the grid increments on `[-12, 12]`, each bracket refined by
/// ternary search to 1e-10 in `x`.
pub fn smooth_deviation_extrema(n: u32) -> Result<DeviationExtrema, ScaleExceeded> {
    if !(1..=MAX_N).contains(&n) {
        return Err(ScaleExceeded { n, max: MAX_N });
    }
    let dev = |x: f64| reg_lower_gamma_clamped(n, x) - phi_cdf(x);
    let cells = (2.0 * SCAN_LIMIT / SCAN_STEP).round() as usize;
    let xs: Vec<f64> = (0..=cells).map(|i| -SCAN_LIMIT + i as f64 * SCAN_STEP).collect();
    let d: Vec<f64> = xs.iter().map(|&x| dev(x)).collect();

    let mut sup = (0.0f64, ExtremumSite::Point(f64::NEG_INFINITY));
    let mut inf = (0.0f64, ExtremumSite::Point(f64::NEG_INFINITY));
    for i in 1..cells {
        if d[i] >= d[i - 1] && d[i] >= d[i + 1] {
            let (x, v) = ternary_max(&dev, xs[i - 1], xs[i + 1], true);
            let (x, v) = if v >= d[i] { (x, v) } else { (xs[i], d[i]) };
            if v > sup.0 {
                sup = (v, ExtremumSite::Point(x));
            }
        }
        if d[i] <= d[i - 1] && d[i] <= d[i + 1] {
            let (x, v) = ternary_max(&dev, xs[i - 1], xs[i + 1], false);
            let (x, v) = if v <= d[i] { (x, v) } else { (xs[i], d[i]) };
            if v < inf.0 {
                inf = (v, ExtremumSite::Point(x));
            }
        }
    }
    Ok(DeviationExtrema {
        sup_dev: sup.0,
        inf_dev: inf.0,
        arg_sup: sup.1,
        arg_inf: inf.1,
    })
}

fn reg_lower_gamma_clamped(n: u32, x: f64) -> f64 {
    let y = n as f64 + (n as f64).sqrt() * x;
    if y <= 0.0 {
        0.0
    } else {
        reg_lower_gamma(n, y)
    }
}

fn ternary_max(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, maximize: bool) -> (f64, f64) {
    while hi - lo > 1e-10 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        let better = if maximize {
            f(m1) < f(m2)
        } else {
            f(m1) > f(m2)
        };
        if better {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// `sup D - inf D` for the standardized Erlang sum.
pub fn smooth_interval_distance(n: u32) -> Result<f64, ScaleExceeded> {
    Ok(smooth_deviation_extrema(n)?.interval())
}

/// `max(sup D, -inf D)` for the standardized Erlang sum.
pub fn smooth_kolmogorov_distance(n: u32) -> Result<f64, ScaleExceeded> {
    Ok(smooth_deviation_extrema(n)?.kolmogorov())
}
