//! Seeded random laws for the randomized verification suites.
//!
//! Positions are random exact rationals (small numerators over small
//! denominators) and masses are bounded away from zero, so inequality
//! margins in the suites sit far above the comparison tolerances.

use crate::law::Law;
use crate::rational::Rational;
use num::BigInt;
use rand::Rng;

/// Random law with between `min_atoms` and `max_atoms` atoms, distinct
/// rational positions with numerators in -24..=24 and denominators in
/// 1..=12, and masses at least 0.05 before normalization.
pub fn random_law<R: Rng>(rng: &mut R, min_atoms: usize, max_atoms: usize) -> Law {
    assert!(1 <= min_atoms && min_atoms <= max_atoms && max_atoms <= 16);
    let k = rng.gen_range(min_atoms..=max_atoms);
    let mut positions: Vec<Rational> = Vec::with_capacity(k);
    while positions.len() < k {
        let numer = rng.gen_range(-24i64..=24);
        let denom = rng.gen_range(1i64..=12);
        let candidate = Rational::new(BigInt::from(numer), BigInt::from(denom));
        if !positions.contains(&candidate) {
            positions.push(candidate);
        }
    }
    let masses: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = masses.iter().sum();
    Law::new(
        positions
            .into_iter()
            .zip(masses)
            .map(|(pos, m)| (pos, m / total))
            .collect(),
    )
    .expect("generated pairs are valid")
}

/// Random two-point law on a random rational gap. Symmetric laws carry
/// exactly half the mass on each atom; asymmetric ones keep the mass spread
/// `|p - q|` in [0.1, 0.9] so near-equality ambiguity cannot arise.
pub fn random_two_point<R: Rng>(rng: &mut R, symmetric: bool) -> Law {
    let x0 = rng.gen_range(-12i64..=12);
    let gap_num = rng.gen_range(1i64..=24);
    let gap_den = rng.gen_range(1i64..=12);
    let a = Rational::new(BigInt::from(x0), BigInt::from(1));
    let b = &a + Rational::new(BigInt::from(gap_num), BigInt::from(gap_den));
    let p = if symmetric {
        0.5
    } else {
        let spread = rng.gen_range(0.1..0.9);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        0.5 + sign * spread / 2.0
    };
    Law::new(vec![(a, p), (b, 1.0 - p)]).expect("two-point law is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_laws_are_well_formed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let law = random_law(&mut rng, 2, 8);
            assert!((2..=8).contains(&law.len()));
            let total: f64 = law.atoms().iter().map(|a| a.mass).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_point_laws_have_requested_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let sym = random_two_point(&mut rng, true);
            assert_eq!(sym.atoms()[0].mass, 0.5);
            let asym = random_two_point(&mut rng, false);
            assert!((asym.atoms()[0].mass - asym.atoms()[1].mass).abs() >= 0.1 - 1e-12);
        }
    }
}
