//! The separation inequality `eta * beta_s <= 2 * beta_{s+1}` for laws whose
//! atoms are `eta`-separated, with its exact equality classification, plus
//! the two identities its proof rests on.
//!
//! `eta` is fixed to the minimal atom gap, the largest admissible
//! separation; the inequality is tightest there and the equality cases refer
//! to that gap. Equality holds precisely for two-point laws when `s = 1`,
//! and for point masses and symmetric two-point laws when `s > 1`.

use crate::law::{min_gap, moments, Law};
use crate::rational::{self, Rational};
use num::One;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("the inequality is checked for s in {{1, 2, 3}}, got {s}")]
pub struct InvalidS {
    pub s: u32,
}

/// Relative tolerance for both the inequality and equality detection, in
/// units of `sigma^(s+1)` (all quantities are O(1) at unit variance).
pub const EQUALITY_TOLERANCE: f64 = 1e-12;

/// Outcome of one inequality check.
///
/// `lhs = eta * beta_s` and `rhs = 2 * beta_{s+1}` are the raw (unscaled)
/// sides; `holds` and `equality` compare them at the unit-variance scale.
/// `predicted_equality` is the classification's verdict, computed from the
/// shape of the law alone.
#[derive(Debug, Clone, PartialEq)]
pub struct VonMisesReport {
    pub eta: Rational,
    pub s: u32,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub equality: bool,
    pub predicted_equality: bool,
}

/// Checks `eta * beta_s <= 2 * beta_{s+1}` with `eta` the minimal gap.
///
/// Single-atom laws report trivially: both sides vanish, `eta` is reported
/// as 1 (any separation is admissible for a point mass), and equality is
/// both observed and predicted (`s = 1` covers point masses as the
/// degenerate two-point case, `s > 1` lists them outright).
pub fn vonmises_check(law: &Law, s: u32) -> Result<VonMisesReport, InvalidS> {
    if !(1..=3).contains(&s) {
        return Err(InvalidS { s });
    }
    if law.len() == 1 {
        return Ok(VonMisesReport {
            eta: Rational::one(),
            s,
            lhs: 0.0,
            rhs: 0.0,
            holds: true,
            equality: true,
            predicted_equality: true,
        });
    }
    let eta = min_gap(law).expect("multi-atom law");
    let m = moments(law);
    let lhs = rational::to_f64(&eta) * m.beta(s as usize);
    let rhs = 2.0 * m.beta(s as usize + 1);
    let tol = EQUALITY_TOLERANCE * m.sigma.powi(s as i32 + 1);
    let predicted_equality = if s == 1 {
        law.len() == 2
    } else {
        law.len() == 2 && (law.atoms()[0].mass - law.atoms()[1].mass).abs() <= 1e-12
    };
    Ok(VonMisesReport {
        eta,
        s,
        lhs,
        rhs,
        holds: lhs <= rhs + tol,
        equality: (lhs - rhs).abs() <= tol,
        predicted_equality,
    })
}

/// Midpoint convexity of `t -> log beta_t` on {1,2,3} and {2,3,4}:
/// `beta_2^2 <= beta_1 * beta_3` and `beta_3^2 <= beta_2 * beta_4`, strictly
/// when `|X - mu|` is not almost surely constant. Point masses (all moments
/// zero) pass vacuously.
pub fn log_moment_convexity(law: &Law) -> bool {
    let m = moments(law);
    if m.beta(1) == 0.0 {
        return true;
    }
    let tol = EQUALITY_TOLERANCE;
    let mid12 = m.beta(2) * m.beta(2) <= m.beta(1) * m.beta(3) * (1.0 + tol);
    let mid23 = m.beta(3) * m.beta(3) <= m.beta(2) * m.beta(4) * (1.0 + tol);
    if !(mid12 && mid23) {
        return false;
    }
    if abs_deviation_constant(law, &m.mu) {
        return true;
    }
    // Strict convexity when |X - mu| genuinely varies.
    m.beta(2) * m.beta(2) < m.beta(1) * m.beta(3) * (1.0 - tol)
        && m.beta(3) * m.beta(3) < m.beta(2) * m.beta(4) * (1.0 - tol)
}

fn abs_deviation_constant(law: &Law, mu: &f64) -> bool {
    let devs: Vec<f64> = law
        .atoms()
        .iter()
        .map(|a| (rational::to_f64(&a.pos) - mu).abs())
        .collect();
    let lo = devs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = devs.iter().cloned().fold(0.0f64, f64::max);
    hi - lo <= 1e-12 * hi.max(1e-300)
}

/// Verifies `2 beta_2 = E(X-Y)^2` for independent copies `X, Y`, and the
/// chain `E(X-Y)^2 >= eta E|X-Y| >= eta E|X-mu|` with `eta` the minimal gap.
pub fn pair_identity_check(law: &Law) -> bool {
    if law.len() == 1 {
        return true;
    }
    let m = moments(law);
    let eta = rational::to_f64(&min_gap(law).expect("multi-atom law"));
    let xs: Vec<f64> = law
        .atoms()
        .iter()
        .map(|a| rational::to_f64(&a.pos))
        .collect();
    let mut e_sq = 0.0;
    let mut e_abs = 0.0;
    for (i, a) in law.atoms().iter().enumerate() {
        for (j, b) in law.atoms().iter().enumerate() {
            let d = xs[i] - xs[j];
            e_sq += a.mass * b.mass * d * d;
            e_abs += a.mass * b.mass * d.abs();
        }
    }
    let tol = EQUALITY_TOLERANCE * m.sigma2.max(1e-300);
    (2.0 * m.sigma2 - e_sq).abs() <= tol
        && e_sq >= eta * e_abs - tol
        && eta * e_abs >= eta * m.beta(1) - tol
}
