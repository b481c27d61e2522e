//! Finite-support laws: construction, moments, lattice span, minimal gap.

use crate::rational::{self, Rational};
use crate::sum::NeumaierSum;
use num::{BigInt, Signed, Zero};
use thiserror::Error;

/// Largest tolerated deviation of the input mass sum from 1. Decimal-entry
/// rounding passes; genuinely malformed laws do not.
pub const MASS_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LawError {
    #[error("a law needs at least one atom")]
    EmptyLaw,
    #[error("atom mass {mass} at index {index} is not a positive finite number")]
    NonPositiveMass { index: usize, mass: f64 },
    #[error("atom masses sum to {sum}, more than {MASS_SUM_TOLERANCE} away from 1")]
    MassSumOutOfTolerance { sum: f64 },
    #[error("single-atom law has unbounded span (every spacing qualifies)")]
    UnboundedSpan,
}

/// One atom of a finite-support law: exact position, double-precision mass.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub pos: Rational,
    pub mass: f64,
}

/// A finite-support probability law.
///
/// Atoms are strictly increasing in position, every mass is positive, and
/// the masses sum to 1 exactly (compensated total) after construction-time
/// renormalization. Immutable once built; share freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Law {
    atoms: Vec<Atom>,
}

impl Law {
    /// Builds a law from `(position, mass)` pairs.
    ///
    /// Duplicate positions are merged by summing masses, atoms are sorted,
    /// and masses are renormalized to sum exactly to 1. Rejects empty input,
    /// non-positive masses, and mass sums farther than [`MASS_SUM_TOLERANCE`]
    /// from 1.
    pub fn new(pairs: Vec<(Rational, f64)>) -> Result<Self, LawError> {
        if pairs.is_empty() {
            return Err(LawError::EmptyLaw);
        }
        for (index, (_, mass)) in pairs.iter().enumerate() {
            if !(mass.is_finite() && *mass > 0.0) {
                return Err(LawError::NonPositiveMass {
                    index,
                    mass: *mass,
                });
            }
        }
        let mut raw_sum = NeumaierSum::new();
        for (_, mass) in &pairs {
            raw_sum.add(*mass);
        }
        let raw_sum = raw_sum.total();
        if (raw_sum - 1.0).abs() > MASS_SUM_TOLERANCE {
            return Err(LawError::MassSumOutOfTolerance { sum: raw_sum });
        }

        let mut pairs = pairs;
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut atoms: Vec<Atom> = Vec::with_capacity(pairs.len());
        for (pos, mass) in pairs {
            match atoms.last_mut() {
                Some(last) if last.pos == pos => last.mass += mass,
                _ => atoms.push(Atom { pos, mass }),
            }
        }

        // Renormalize, then pin the compensated total to exactly 1 by
        // absorbing the residual into the largest mass.
        for atom in &mut atoms {
            atom.mass /= raw_sum;
        }
        let mut total = NeumaierSum::new();
        for atom in &atoms {
            total.add(atom.mass);
        }
        let residual = 1.0 - total.total();
        if residual != 0.0 {
            let argmax = atoms
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.mass.total_cmp(&b.1.mass))
                .map(|(i, _)| i)
                .expect("nonempty");
            atoms[argmax].mass += residual;
        }
        Ok(Self { atoms })
    }

    /// Convenience constructor for integer atom positions.
    pub fn from_integer_atoms(pairs: &[(i64, f64)]) -> Result<Self, LawError> {
        Self::new(
            pairs
                .iter()
                .map(|&(x, p)| (Rational::from(BigInt::from(x)), p))
                .collect(),
        )
    }

    /// The symmetric two-point law on {-1, +1}.
    pub fn rademacher() -> Self {
        Self::from_integer_atoms(&[(-1, 0.5), (1, 0.5)]).expect("valid law")
    }

    /// The law on {0, 1} with mass `p` at 1.
    pub fn bernoulli(p: f64) -> Result<Self, LawError> {
        Self::from_integer_atoms(&[(0, 1.0 - p), (1, p)])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees at least one atom
    }

    /// Smallest atom position.
    pub fn min_pos(&self) -> &Rational {
        &self.atoms[0].pos
    }

    /// Image law under the affine map `x -> u*x + v` (`u != 0`).
    pub fn affine_image(&self, u: &Rational, v: &Rational) -> Self {
        assert!(!u.is_zero(), "affine map must be invertible");
        let mut atoms: Vec<Atom> = self
            .atoms
            .iter()
            .map(|a| Atom {
                pos: u * &a.pos + v,
                mass: a.mass,
            })
            .collect();
        if u.is_negative() {
            atoms.reverse();
        }
        Self { atoms }
    }
}

/// First four absolute central moments of a law, with the signed third.
///
/// `mu` is the mean, `sigma2 = beta_2` the variance, `alpha` the signed
/// third central moment, and `beta(s)` the absolute central moment of order
/// `s` for `s` in 1..=4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub mu: f64,
    pub sigma2: f64,
    pub sigma: f64,
    pub alpha: f64,
    beta: [f64; 4],
}

impl MomentSet {
    /// Absolute central moment of order `s`, `s` in 1..=4.
    pub fn beta(&self, s: usize) -> f64 {
        assert!((1..=4).contains(&s), "beta_s defined here for s in 1..=4");
        self.beta[s - 1]
    }
}

/// Computes mean and central moments by direct weighted summation with
/// compensated accumulation.
pub fn moments(law: &Law) -> MomentSet {
    let xs: Vec<f64> = law.atoms().iter().map(|a| rational::to_f64(&a.pos)).collect();
    let mut mean = NeumaierSum::new();
    for (atom, &x) in law.atoms().iter().zip(&xs) {
        mean.add(atom.mass * x);
    }
    let mu = mean.total();

    let mut beta = [NeumaierSum::new(); 4];
    let mut alpha = NeumaierSum::new();
    for (atom, &x) in law.atoms().iter().zip(&xs) {
        let c = x - mu;
        let a = c.abs();
        beta[0].add(atom.mass * a);
        beta[1].add(atom.mass * a * a);
        beta[2].add(atom.mass * a * a * a);
        beta[3].add(atom.mass * a * a * a * a);
        alpha.add(atom.mass * c * c * c);
    }
    let beta = [
        beta[0].total(),
        beta[1].total(),
        beta[2].total().max(0.0),
        beta[3].total(),
    ];
    let sigma2 = beta[1].max(0.0);
    MomentSet {
        mu,
        sigma2,
        sigma: sigma2.sqrt(),
        alpha: alpha.total(),
        beta,
    }
}

/// Whether the law belongs to the moment class of order `s` (`s` in 1..=4),
/// i.e. `0 < beta_s < infinity`. For finite support this holds exactly when
/// the law has at least two atoms.
pub fn check_membership(law: &Law, s: usize) -> bool {
    assert!((1..=4).contains(&s), "membership defined here for s in 1..=4");
    law.len() >= 2
}

/// Largest `eta` such that all atoms lie in `a + eta*Z` for some shift `a`:
/// the rational gcd of consecutive atom differences.
///
/// Finite multi-atom laws are always lattice laws, so the result is positive.
/// Single-atom laws have no maximal span (every `eta` qualifies).
pub fn lattice_span(law: &Law) -> Result<Rational, LawError> {
    let atoms = law.atoms();
    if atoms.len() < 2 {
        return Err(LawError::UnboundedSpan);
    }
    let mut g = Rational::zero();
    for pair in atoms.windows(2) {
        g = rational::rational_gcd(&g, &(&pair[1].pos - &pair[0].pos));
    }
    Ok(g)
}

/// Minimum over consecutive differences of atom positions.
pub fn min_gap(law: &Law) -> Result<Rational, LawError> {
    let atoms = law.atoms();
    if atoms.len() < 2 {
        return Err(LawError::UnboundedSpan);
    }
    atoms
        .windows(2)
        .map(|pair| &pair[1].pos - &pair[0].pos)
        .min()
        .ok_or(LawError::UnboundedSpan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn rademacher_has_two_atoms() {
        let law = Law::rademacher();
        assert_eq!(law.len(), 2);
        assert_eq!(law.atoms()[0].pos, rat(-1, 1));
        assert_eq!(law.atoms()[1].mass, 0.5);
    }

    #[test]
    fn duplicates_merge_by_summing() {
        let law = Law::new(vec![
            (rat(0, 1), 0.3),
            (rat(0, 1), 0.2),
            (rat(1, 1), 0.5),
        ])
        .unwrap();
        assert_eq!(law.len(), 2);
        assert_eq!(law.atoms()[0].mass, 0.5);
        assert_eq!(law.atoms()[1].mass, 0.5);
    }

    #[test]
    fn empty_and_bad_masses_rejected() {
        assert_eq!(Law::new(vec![]), Err(LawError::EmptyLaw));
        let err = Law::new(vec![(rat(0, 1), 0.0), (rat(1, 1), 1.0)]).unwrap_err();
        assert!(matches!(err, LawError::NonPositiveMass { index: 0, .. }));
        let err = Law::new(vec![(rat(0, 1), f64::NAN)]).unwrap_err();
        assert!(matches!(err, LawError::NonPositiveMass { .. }));
    }

    #[test]
    fn mass_sum_tolerance_enforced() {
        // A lone half-unit mass is out of tolerance, not silently rescaled.
        let err = Law::new(vec![(rat(0, 1), 0.5)]).unwrap_err();
        assert!(matches!(err, LawError::MassSumOutOfTolerance { .. }));
        // Within tolerance: renormalized to an exact unit total.
        let law = Law::new(vec![(rat(0, 1), 0.3 + 2e-10), (rat(1, 1), 0.7)]).unwrap();
        let total: f64 = crate::sum::compensated_sum(law.atoms().iter().map(|a| a.mass));
        assert_eq!(total, 1.0);
    }

    #[test]
    fn single_atom_law_is_valid() {
        let law = Law::new(vec![(rat(5, 1), 1.0)]).unwrap();
        assert_eq!(law.len(), 1);
        let m = moments(&law);
        assert_eq!(m.mu, 5.0);
        assert_eq!(m.sigma2, 0.0);
        assert_eq!(m.alpha, 0.0);
        for s in 1..=4 {
            assert_eq!(m.beta(s), 0.0);
        }
    }

    #[test]
    fn rademacher_moments() {
        let m = moments(&Law::rademacher());
        assert_eq!(m.mu, 0.0);
        assert_eq!(m.sigma, 1.0);
        assert_eq!(m.alpha, 0.0);
        assert_eq!(m.beta(3), 1.0);
    }

    #[test]
    fn bernoulli_moments_match_closed_forms() {
        // p=0.3 at 1: sigma^2 = pq, alpha = pq(q-p), beta_3 = pq(p^2+q^2).
        let m = moments(&Law::bernoulli(0.3).unwrap());
        assert!((m.mu - 0.3).abs() < 1e-15);
        assert!((m.sigma2 - 0.21).abs() < 1e-15);
        assert!((m.alpha - 0.084).abs() < 1e-15);
        assert!((m.beta(3) - 0.1218).abs() < 1e-15);
    }

    #[test]
    fn membership_needs_two_atoms() {
        assert!(check_membership(&Law::rademacher(), 3));
        assert!(check_membership(&Law::bernoulli(0.3).unwrap(), 1));
        let delta = Law::new(vec![(rat(0, 1), 1.0)]).unwrap();
        assert!(!check_membership(&delta, 3));
    }

    #[test]
    fn span_and_gap_hand_values() {
        let law = Law::from_integer_atoms(&[(0, 0.25), (2, 0.5), (6, 0.25)]).unwrap();
        assert_eq!(lattice_span(&law).unwrap(), rat(2, 1));
        assert_eq!(min_gap(&law).unwrap(), rat(2, 1));

        let law = Law::new(vec![
            (rat(0, 1), 0.25),
            (rat(1, 3), 0.5),
            (rat(1, 1), 0.25),
        ])
        .unwrap();
        assert_eq!(lattice_span(&law).unwrap(), rat(1, 3));
        assert_eq!(min_gap(&law).unwrap(), rat(1, 3));

        let law = Law::new(vec![
            (rat(0, 1), 0.25),
            (rat(1, 2), 0.5),
            (rat(3, 4), 0.25),
        ])
        .unwrap();
        assert_eq!(lattice_span(&law).unwrap(), rat(1, 4));
        assert_eq!(min_gap(&law).unwrap(), rat(1, 4));

        let law = Law::from_integer_atoms(&[(0, 0.5), (1, 0.25), (5, 0.25)]).unwrap();
        assert_eq!(min_gap(&law).unwrap(), rat(1, 1));
        assert_eq!(lattice_span(&law).unwrap(), rat(1, 1));
    }

    #[test]
    fn single_atom_span_is_unbounded() {
        let delta = Law::new(vec![(rat(0, 1), 1.0)]).unwrap();
        assert_eq!(lattice_span(&delta), Err(LawError::UnboundedSpan));
        assert_eq!(min_gap(&delta), Err(LawError::UnboundedSpan));
    }

    #[test]
    fn affine_image_reverses_under_negative_scale() {
        let law = Law::bernoulli(0.3).unwrap();
        let img = law.affine_image(&rat(-2, 1), &rat(1, 1));
        assert_eq!(img.atoms()[0].pos, rat(-1, 1));
        assert_eq!(img.atoms()[1].pos, rat(1, 1));
        assert_eq!(img.atoms()[0].mass, 0.3);
    }
}
