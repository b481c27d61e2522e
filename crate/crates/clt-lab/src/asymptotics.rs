//! The sawtooth-corrected expansion of `F_n`, the closed-form limits of
//! `sqrt(n)` times both distances, the profile function behind the interval
//! limit, and the named constants.
//!
//! For a lattice law with span `h`, mean `mu`, standard deviation `sigma`
//! and third central moment `alpha`, the distribution function of the
//! standardized sum satisfies
//!
//! ```text
//! F_n(x) = Phi(x) + h/(sigma sqrt(n)) * psi_n(x) * phi(x)
//!                 - alpha/(6 sigma^3 sqrt(n)) * phi''(x) + o(1/sqrt(n))
//! ```
//!
//! uniformly in `x`, where `psi_n` is the sawtooth of period
//! `h/(sigma sqrt(n))` that jumps from -1/2 to +1/2 exactly at the atoms of
//! the standardized sum. From this expansion,
//!
//! * `sqrt(n) * kolmogorov  ->  (h/(2 sigma) + |alpha|/(6 sigma^3)) / sqrt(2 pi)`
//! * `sqrt(n) * interval    ->  L` with `L` branching on `|alpha|` vs `h sigma^2`
//!   (see [`interval_limit`]); the two branch formulas agree at the tie.

use crate::convolve::{self, ConvolveError};
use crate::law::{lattice_span, moments, Law, MomentSet};
use crate::normal::{phi_cdf, phi_pdd, phi_pdf, FRAC_1_SQRT_2PI};
use crate::rational::{self, Rational};
use crate::sum::NeumaierSum;
use thiserror::Error;

/// sqrt(2*pi)
pub(crate) const SQRT_2PI: f64 = 2.50662827463100050241576528481;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AsymptoticsError {
    #[error("law has zero variance; asymptotics require at least two atoms")]
    DegenerateLaw,
    #[error("single-atom law has unbounded span; the sawtooth is undefined")]
    UnboundedSpan,
    #[error(transparent)]
    Convolve(#[from] ConvolveError),
}

/// Which term dominates the interval limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitBranch {
    /// `|alpha| <= h sigma^2`: the lattice jump term alone sets the limit.
    LatticeDominant,
    /// `|alpha| > h sigma^2`: the skewness term contributes away from 0.
    SkewDominant,
}

/// The interval limit `L`, its branch, and its three summands before the
/// common division by `sqrt(2 pi)`. `y0` is the off-center maximizer of the
/// profile function, present exactly in the skew-dominant branch.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitReport {
    pub branch: LimitBranch,
    pub value: f64,
    pub h_term: f64,
    pub alpha_term: f64,
    pub exp_term: f64,
    pub y0: Option<f64>,
}

/// Named constants: the asymptotic Berry-Esseen constant for half-lines
/// (exact closed form), its interval counterpart, and the published bounds
/// on the finite-n constant (stored as data, not derived here).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaperConstants {
    /// `(sqrt(10) + 3) / (6 sqrt(2 pi))`
    pub c_inf_be: f64,
    /// `sqrt(2/pi) = 2 / sqrt(2 pi)`
    pub c_inf_be_intervals: f64,
    /// Lower bound on the finite-n Kolmogorov constant.
    pub c_be_lower: f64,
    /// Upper bound on the finite-n Kolmogorov constant.
    pub c_be_upper: f64,
}

pub fn constants() -> PaperConstants {
    PaperConstants {
        c_inf_be: (10f64.sqrt() + 3.0) / (6.0 * SQRT_2PI),
        c_inf_be_intervals: 2.0 / SQRT_2PI,
        c_be_lower: 0.4097,
        c_be_upper: 0.4748,
    }
}

/// The sawtooth `psi_n(x) = 1/2 - frac((x sigma sqrt(n) - n(a - mu)) / h)`
/// with the smallest atom position as the canonical anchor `a`.
///
/// Values lie in `(-1/2, 1/2]`, the period is `h/(sigma sqrt(n))`, and the
/// jumps sit exactly at the atoms of the standardized sum (the `- n mu`
/// recentering mirrors the standardization of `F_n`; any admissible anchor
/// `a + m h` shifts the argument by the integer `m n` and leaves the value
/// unchanged).
pub fn psi_n(law: &Law, n: u32, x: f64) -> Result<f64, AsymptoticsError> {
    let anchor = law.min_pos().clone();
    psi_n_with_anchor(law, n, x, &anchor)
}

/// `psi_n` with an explicit anchor; the anchor must differ from the smallest
/// atom by an integer multiple of the span.
pub fn psi_n_with_anchor(
    law: &Law,
    n: u32,
    x: f64,
    anchor: &Rational,
) -> Result<f64, AsymptoticsError> {
    let span = lattice_span(law).map_err(|_| AsymptoticsError::UnboundedSpan)?;
    assert!(
        rational::divides(&span, &(anchor - law.min_pos())),
        "anchor must lie on the lattice of the law"
    );
    let m = moments(law);
    let h = rational::to_f64(&span);
    let a = rational::to_f64(anchor);
    Ok(sawtooth(
        (x * m.sigma * (n as f64).sqrt() - n as f64 * (a - m.mu)) / h,
    ))
}

#[inline]
fn sawtooth(t: f64) -> f64 {
    0.5 - (t - t.floor())
}

/// The expansion evaluated at `x`:
/// `Phi + (h/(sigma sqrt n)) psi_n phi - (alpha/(6 sigma^3 sqrt n)) phi''`.
pub fn edgeworth_cdf(law: &Law, n: u32, x: f64) -> Result<f64, AsymptoticsError> {
    if law.len() < 2 {
        return Err(AsymptoticsError::DegenerateLaw);
    }
    let psi = psi_n(law, n, x)?;
    let span = rational::to_f64(&lattice_span(law).expect("multi-atom"));
    Ok(edgeworth_eval(&moments(law), span, n, x, psi))
}

/// Expansion value with the sawtooth supplied by the caller; the jump term
/// is dropped when `h = 0` (smooth laws have no sawtooth).
fn edgeworth_eval(m: &MomentSet, h: f64, n: u32, x: f64, psi: f64) -> f64 {
    let sqrt_n = (n as f64).sqrt();
    let jump = if h > 0.0 {
        h / (m.sigma * sqrt_n) * psi * phi_pdf(x)
    } else {
        0.0
    };
    phi_cdf(x) + jump - m.alpha / (6.0 * m.sigma.powi(3) * sqrt_n) * phi_pdd(x)
}

/// Supremum of `|F_n - edgeworth|` over the candidate set: both one-sided
/// limits at every atom of the standardized sum (both step functions jump
/// exactly there, with sawtooth values +1/2 at and -1/2 approaching an
/// atom), plus 8 equispaced interior points per gap.
pub fn expansion_residual_sup(law: &Law, n: u32) -> Result<f64, AsymptoticsError> {
    if law.len() < 2 {
        return Err(AsymptoticsError::DegenerateLaw);
    }
    let m = moments(law);
    let span = rational::to_f64(&lattice_span(law).expect("multi-atom"));
    let pmf = convolve::standardize(&convolve::self_convolve(law, n)?, &m)?;
    let a = rational::to_f64(law.min_pos());
    let sqrt_n = (n as f64).sqrt();
    let shift = n as f64 * (a - m.mu) / span;

    let mut acc = NeumaierSum::new();
    let mut cdf = Vec::with_capacity(pmf.len());
    for &mass in pmf.masses() {
        acc.add(mass);
        cdf.push(acc.total());
    }
    *cdf.last_mut().expect("nonempty") = 1.0;

    let mut best = 0.0f64;
    let mut prev = 0.0f64;
    for k in 0..pmf.len() {
        let x = pmf.position(k);
        best = best.max((cdf[k] - edgeworth_eval(&m, span, n, x, 0.5)).abs());
        best = best.max((prev - edgeworth_eval(&m, span, n, x, -0.5)).abs());
        if k + 1 < pmf.len() {
            let next = pmf.position(k + 1);
            for j in 1..=8 {
                let t = x + (next - x) * j as f64 / 9.0;
                let psi = sawtooth(t * m.sigma * sqrt_n / span - shift);
                best = best.max((cdf[k] - edgeworth_eval(&m, span, n, t, psi)).abs());
            }
        }
        prev = cdf[k];
    }
    Ok(best)
}

/// Limit of `sqrt(n)` times the Kolmogorov distance:
/// `(h/(2 sigma) + |alpha|/(6 sigma^3)) / sqrt(2 pi)`.
pub fn kolmogorov_limit(law: &Law) -> Result<f64, AsymptoticsError> {
    let (m, h) = law_parts(law)?;
    Ok(kolmogorov_limit_given_span(&m, h))
}

/// Kolmogorov limit from explicit moments and span (`h = 0` for smooth laws).
pub fn kolmogorov_limit_given_span(m: &MomentSet, h: f64) -> f64 {
    assert!(m.sigma > 0.0, "need positive variance");
    FRAC_1_SQRT_2PI * (h / (2.0 * m.sigma) + m.alpha.abs() / (6.0 * m.sigma.powi(3)))
}

/// Limit of `sqrt(n)` times the interval distance, with branch and parts.
pub fn interval_limit(law: &Law) -> Result<LimitReport, AsymptoticsError> {
    let (m, h) = law_parts(law)?;
    Ok(interval_limit_given_span(&m, h))
}

/// Interval limit from explicit moments and span. Ties `|alpha| = h sigma^2`
/// take the lattice-dominant branch; both formulas agree there.
pub fn interval_limit_given_span(m: &MomentSet, h: f64) -> LimitReport {
    assert!(m.sigma > 0.0, "need positive variance");
    let s = m.sigma;
    let abs_alpha = m.alpha.abs();
    if abs_alpha <= h * m.sigma2 {
        let h_term = h / s;
        LimitReport {
            branch: LimitBranch::LatticeDominant,
            value: h_term / SQRT_2PI,
            h_term,
            alpha_term: 0.0,
            exp_term: 0.0,
            y0: None,
        }
    } else {
        let h_term = h / (2.0 * s);
        let alpha_term = abs_alpha / (6.0 * s.powi(3));
        let exp_term = abs_alpha / (3.0 * s.powi(3))
            * (-1.5 * (1.0 - h * m.sigma2 / abs_alpha)).exp();
        LimitReport {
            branch: LimitBranch::SkewDominant,
            value: (h_term + alpha_term + exp_term) / SQRT_2PI,
            h_term,
            alpha_term,
            exp_term,
            y0: Some((3.0 - 3.0 * h * m.sigma2 / abs_alpha).sqrt()),
        }
    }
}

fn law_parts(law: &Law) -> Result<(MomentSet, f64), AsymptoticsError> {
    if law.len() < 2 {
        return Err(AsymptoticsError::DegenerateLaw);
    }
    let m = moments(law);
    let h = rational::to_f64(&lattice_span(law).expect("multi-atom"));
    Ok((m, h))
}

/// The profile function whose supremum over `y` is twice the interval
/// limit, after rescaling the law to unit variance and reflecting so that
/// `alpha >= 0`:
///
/// `f(y) = (h + alpha/3)/sqrt(2 pi) + h phi(y) + (alpha/3) phi''(y)`.
pub fn profile_f(law: &Law, y: f64) -> Result<f64, AsymptoticsError> {
    let (m, h) = law_parts(law)?;
    Ok(profile_f_given(
        h / m.sigma,
        m.alpha.abs() / m.sigma.powi(3),
        y,
    ))
}

/// Profile function from normalized span and skewness (`sigma = 1`,
/// `alpha >= 0`).
pub fn profile_f_given(h_norm: f64, alpha_norm: f64, y: f64) -> f64 {
    (h_norm + alpha_norm / 3.0) * FRAC_1_SQRT_2PI
        + h_norm * phi_pdf(y)
        + alpha_norm / 3.0 * phi_pdd(y)
}

/// Maximizers of the profile function: `{0}` when `alpha <= h` (normalized),
/// otherwise `{-y0, +y0}` with `y0 = sqrt(3 - 3h/alpha)`.
pub fn profile_argmax(law: &Law) -> Result<Vec<f64>, AsymptoticsError> {
    let (m, h) = law_parts(law)?;
    Ok(profile_argmax_given(
        h / m.sigma,
        m.alpha.abs() / m.sigma.powi(3),
    ))
}

pub fn profile_argmax_given(h_norm: f64, alpha_norm: f64) -> Vec<f64> {
    if alpha_norm <= h_norm {
        vec![0.0]
    } else {
        let y0 = (3.0 - 3.0 * h_norm / alpha_norm).sqrt();
        vec![-y0, y0]
    }
}
