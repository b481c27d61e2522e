//! Cross-module randomized invariant suites: lattice structure, moment
//! inequalities, convolution against the exact oracle, deviation extrema
//! against brute force, and the limit/profile identities.

use clt_lab::asymptotics::{
    interval_limit, kolmogorov_limit, profile_argmax, profile_f, psi_n, psi_n_with_anchor,
    LimitBranch,
};
use clt_lab::convolve::{exact_self_convolve, self_convolve, standardize};
use clt_lab::deviation::{interval_distance, interval_distance_bruteforce, kolmogorov_distance};
use clt_lab::extremal::{interval_objective, kolmogorov_objective};
use clt_lab::law::{lattice_span, min_gap, moments, Law};
use clt_lab::lawgen::random_law;
use clt_lab::rational::{self, divides, Rational};
use num::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Strategy: a law with 2..=6 distinct rational atoms.
fn law_strategy() -> impl Strategy<Value = Law> {
    proptest::collection::vec(((-24i64..=24, 1i64..=12), 1u32..=40), 2..=6).prop_filter_map(
        "needs two distinct positions",
        |entries| {
            let total: f64 = entries.iter().map(|&(_, w)| w as f64).sum();
            let law = Law::new(
                entries
                    .iter()
                    .map(|&((n, d), w)| (rat(n, d), w as f64 / total))
                    .collect(),
            )
            .ok()?;
            (law.len() >= 2).then_some(law)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn span_divides_every_gap_and_is_maximal(law in law_strategy()) {
        let h = lattice_span(&law).unwrap();
        let gap = min_gap(&law).unwrap();
        prop_assert!(gap >= h);
        for pair in law.atoms().windows(2) {
            let diff = &pair[1].pos - &pair[0].pos;
            prop_assert!(divides(&h, &diff), "span must divide {diff}");
        }
        // No proper multiple of the span divides every gap.
        for k in [2i64, 3] {
            let bigger = &h * rat(k, 1);
            let all = law
                .atoms()
                .windows(2)
                .all(|p| divides(&bigger, &(&p[1].pos - &p[0].pos)));
            prop_assert!(!all, "{k} * span still divides all gaps");
        }
    }

    #[test]
    fn affine_equivariance_of_moments_and_span(
        law in law_strategy(),
        u_num in prop::sample::select(vec![-4i64, -3, -1, 1, 2, 5]),
        u_den in 1i64..=3,
        v_num in -6i64..=6,
    ) {
        let u = rat(u_num, u_den);
        let v = rat(v_num, 2);
        let image = law.affine_image(&u, &v);
        let m = moments(&law);
        let mi = moments(&image);
        let uf = rational::to_f64(&u);
        let vf = rational::to_f64(&v);

        let tol = |scale: f64| 1e-11 * (1.0 + scale.abs());
        prop_assert!((mi.mu - (uf * m.mu + vf)).abs() <= tol(uf * m.mu + vf));
        prop_assert!((mi.sigma2 - uf * uf * m.sigma2).abs() <= tol(uf * uf * m.sigma2));
        prop_assert!((mi.alpha - uf.powi(3) * m.alpha).abs() <= tol(uf.abs().powi(3) * m.beta(3)));
        for s in 1..=4 {
            let want = uf.abs().powi(s as i32) * m.beta(s);
            prop_assert!((mi.beta(s) - want).abs() <= tol(want));
        }
        // The span transforms exactly: rational arithmetic end to end.
        let h = lattice_span(&law).unwrap();
        let hi = lattice_span(&image).unwrap();
        prop_assert_eq!(hi, h * u.abs_ref());
    }
}

// `Ratio` has no `abs_ref`; a tiny helper keeps the proptest body tidy.
trait AbsRef {
    fn abs_ref(&self) -> Self;
}

impl AbsRef for Rational {
    fn abs_ref(&self) -> Self {
        if self < &Rational::from_integer(0.into()) {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

#[test]
fn min_gap_equals_span_for_adjacent_lattice_support() {
    let law = Law::from_integer_atoms(&[(3, 0.4), (5, 0.6)]).unwrap();
    assert_eq!(lattice_span(&law).unwrap(), min_gap(&law).unwrap());
    let law = Law::new(vec![(rat(0, 1), 0.5), (rat(1, 3), 0.5)]).unwrap();
    assert_eq!(lattice_span(&law).unwrap(), min_gap(&law).unwrap());
}

#[test]
fn moment_inequalities_on_random_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..1000 {
        let law = random_law(&mut rng, 2, 8);
        let m = moments(&law);
        assert!(m.alpha.abs() <= m.beta(3) * (1.0 + 1e-12));
        assert!(m.sigma.powi(3) <= m.beta(3) * (1.0 + 1e-12));
    }
}

#[test]
fn float_convolution_tracks_exact_oracle() {
    // Integer positions keep the exact oracle's support small; the point of
    // the comparison is the mass arithmetic.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let k = rng.gen_range(2..=5);
        let mut positions: Vec<i64> = Vec::new();
        while positions.len() < k {
            let p = rng.gen_range(0..=4);
            if !positions.contains(&p) {
                positions.push(p);
            }
        }
        positions.sort_unstable();
        let weights: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=6)).collect();
        let total: i64 = weights.iter().sum();
        let pairs: Vec<(Rational, Rational)> = positions
            .iter()
            .zip(&weights)
            .map(|(&x, &w)| (rat(x, 1), rat(w, total)))
            .collect();
        let law = Law::new(
            pairs
                .iter()
                .map(|(x, m)| (x.clone(), rational::to_f64(m)))
                .collect(),
        )
        .unwrap();
        for n in [2u32, 8, 32, 64] {
            let float = self_convolve(&law, n).unwrap();
            let exact = exact_self_convolve(&pairs, n).unwrap();
            assert_eq!(float.masses().len(), exact.masses.len());
            for (i, (got, want)) in float
                .masses()
                .iter()
                .zip(exact.masses_f64())
                .enumerate()
            {
                assert!(
                    (got - want).abs() <= 1e-13,
                    "cell {i} at n = {n}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn mass_conservation_at_large_n() {
    for law in [Law::rademacher(), Law::bernoulli(0.3).unwrap()] {
        for n in [1u32 << 10, 1 << 14] {
            let pmf = self_convolve(&law, n).unwrap();
            let k = pmf.masses().len() as f64;
            let total: f64 = {
                let mut acc = 0.0f64;
                let mut c = 0.0f64;
                for &m in pmf.masses() {
                    // plain Kahan in the test, independent of the library path
                    let y = m - c;
                    let t = acc + y;
                    c = (t - acc) - y;
                    acc = t;
                }
                acc
            };
            let tol = 16.0 * k * n as f64 * 2f64.powi(-52);
            assert!(
                (total - 1.0).abs() <= tol,
                "n = {n}: total {total} off by more than {tol}"
            );
        }
    }
}

#[test]
fn mean_and_variance_propagate() {
    let laws = [
        Law::bernoulli(0.3).unwrap(),
        Law::from_integer_atoms(&[(-2, 0.2), (0, 0.5), (3, 0.3)]).unwrap(),
    ];
    for law in laws {
        let m = moments(&law);
        for n in [16u32, 256, 4096] {
            let pmf = self_convolve(&law, n).unwrap();
            let mut mean = 0.0;
            let mut var = 0.0;
            for (kidx, &mass) in pmf.masses().iter().enumerate() {
                mean += mass * pmf.position_f64(kidx);
            }
            for (kidx, &mass) in pmf.masses().iter().enumerate() {
                let c = pmf.position_f64(kidx) - mean;
                var += mass * c * c;
            }
            assert!((mean - n as f64 * m.mu).abs() <= 1e-9 * n as f64);
            assert!((var - n as f64 * m.sigma2).abs() <= 1e-8 * n as f64);

            let std = standardize(&pmf, &m).unwrap();
            let mut mean_s = 0.0;
            let mut var_s = 0.0;
            for (kidx, &mass) in std.masses().iter().enumerate() {
                mean_s += mass * std.position(kidx);
            }
            for (kidx, &mass) in std.masses().iter().enumerate() {
                let c = std.position(kidx) - mean_s;
                var_s += mass * c * c;
            }
            assert!(mean_s.abs() <= 1e-8, "standardized mean {mean_s} at n = {n}");
            assert!((var_s - 1.0).abs() <= 1e-8, "standardized var {var_s} at n = {n}");
        }
    }
}

#[test]
fn interval_distance_matches_brute_force_and_sandwich() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let law = random_law(&mut rng, 2, 5);
        let n = rng.gen_range(1..=32);
        let pmf = standardize(&self_convolve(&law, n).unwrap(), &moments(&law)).unwrap();
        let fast = interval_distance(&pmf);
        let brute = interval_distance_bruteforce(&pmf).unwrap();
        assert!(
            (fast - brute).abs() <= 1e-12,
            "oracle mismatch at n = {n}: {fast} vs {brute}"
        );
        let dk = kolmogorov_distance(&pmf);
        assert!(dk <= fast + 1e-15 && fast <= 2.0 * dk + 1e-15);
    }
}

#[test]
fn distances_invariant_under_reflection() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let minus_one = rat(-1, 1);
    let zero = rat(0, 1);
    for _ in 0..50 {
        let law = random_law(&mut rng, 2, 5);
        let n = rng.gen_range(1..=16);
        let reflected = law.affine_image(&minus_one, &zero);
        let pmf = standardize(&self_convolve(&law, n).unwrap(), &moments(&law)).unwrap();
        let pmf_r =
            standardize(&self_convolve(&reflected, n).unwrap(), &moments(&reflected)).unwrap();
        assert!((kolmogorov_distance(&pmf) - kolmogorov_distance(&pmf_r)).abs() <= 1e-12);
        assert!((interval_distance(&pmf) - interval_distance(&pmf_r)).abs() <= 1e-12);
    }
}

#[test]
fn sawtooth_anchor_invariance_on_random_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..40 {
        let law = random_law(&mut rng, 2, 6);
        let n = rng.gen_range(1..=64);
        let h = lattice_span(&law).unwrap();
        for m_shift in [1i64, 5] {
            let anchor = law.min_pos() + &h * rat(m_shift, 1);
            for i in 0..12 {
                let x = -3.0 + 0.511 * i as f64;
                let a = psi_n(&law, n, x).unwrap();
                let b = psi_n_with_anchor(&law, n, x, &anchor).unwrap();
                assert!((a - b).abs() <= 1e-9, "anchor variance at x = {x}");
            }
        }
    }
}

#[test]
fn profile_supremum_is_twice_the_interval_limit() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for i in 0..200 {
        let law = random_law(&mut rng, 2, 6);
        let report = interval_limit(&law).unwrap();
        // Closed-form argmax evaluation.
        let sup = profile_argmax(&law)
            .unwrap()
            .into_iter()
            .map(|y| profile_f(&law, y).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(
            (sup - 2.0 * report.value).abs() <= 1e-10,
            "law {i}: sup f = {sup} vs 2L = {}",
            2.0 * report.value
        );
        // Grid + golden-section oracle against the closed form, every 10th law.
        if i % 10 == 0 {
            let f = |y: f64| profile_f(&law, y).unwrap();
            let mut best = (f(-10.0), -10.0);
            for step in 0..=4000 {
                let y = -10.0 + step as f64 * 0.005;
                let v = f(y);
                if v > best.0 {
                    best = (v, y);
                }
            }
            let (mut lo, mut hi) = (best.1 - 0.005, best.1 + 0.005);
            const INV_PHI: f64 = 0.61803398874989484820;
            let (mut x1, mut x2) = (hi - INV_PHI * (hi - lo), lo + INV_PHI * (hi - lo));
            let (mut f1, mut f2) = (f(x1), f(x2));
            while hi - lo > 1e-9 {
                if f1 < f2 {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + INV_PHI * (hi - lo);
                    f2 = f(x2);
                } else {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - INV_PHI * (hi - lo);
                    f1 = f(x1);
                }
            }
            let x_star = 0.5 * (lo + hi);
            let numeric = f(x_star).max(best.0);
            assert!((numeric - sup).abs() <= 1e-10, "law {i}: numeric sup off");
            // Argmax agreement, away from the branch tie where the two
            // stationary points merge.
            let m = moments(&law);
            let h_norm = rational::to_f64(&lattice_span(&law).unwrap()) / m.sigma;
            let alpha_norm = m.alpha.abs() / m.sigma.powi(3);
            if (alpha_norm - h_norm).abs() > 0.05 {
                let want = profile_argmax(&law)
                    .unwrap()
                    .iter()
                    .map(|y| y.abs())
                    .fold(f64::INFINITY, f64::min);
                assert!(
                    (x_star.abs() - want).abs() <= 1e-6,
                    "law {i}: argmax {x_star} vs {want}"
                );
            }
        }
    }
}

#[test]
fn limit_sandwich_on_random_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..200 {
        let law = random_law(&mut rng, 2, 6);
        let k = kolmogorov_limit(&law).unwrap();
        let i = interval_limit(&law).unwrap().value;
        assert!(k <= i + 1e-14 && i <= 2.0 * k + 1e-14);
    }
}

/// One-parameter family on {0, 1, 6} crossing the branch tie.
fn crossing_family(theta: f64) -> Law {
    Law::from_integer_atoms(&[(0, (1.0 - theta) / 2.0), (1, 0.5), (6, theta / 2.0)]).unwrap()
}

fn branch_gap(theta: f64) -> f64 {
    let m = moments(&crossing_family(theta));
    m.alpha.abs() - m.sigma2 // h = 1 for this family
}

#[test]
fn interval_limit_continuous_across_the_branch_tie() {
    // Bisect |alpha| = h sigma^2 along the family, then sample both sides.
    let (mut lo, mut hi) = (0.001f64, 0.6f64);
    assert!(branch_gap(lo) < 0.0 && branch_gap(hi) > 0.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if branch_gap(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let star = 0.5 * (lo + hi);
    let below = interval_limit(&crossing_family(star - 1e-6)).unwrap();
    let above = interval_limit(&crossing_family(star + 1e-6)).unwrap();
    assert_ne!(below.branch, above.branch);
    assert!(
        (below.value - above.value).abs() < 1e-5,
        "jump {} at theta = {star}",
        (below.value - above.value).abs()
    );
}

#[test]
fn limits_and_objectives_affine_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let shifts = [rat(-3, 2), rat(0, 1), rat(5, 1)];
    let scales = [rat(-3, 1), rat(-1, 2), rat(2, 1), rat(7, 3)];
    for _ in 0..50 {
        let law = random_law(&mut rng, 2, 6);
        let k0 = kolmogorov_limit(&law).unwrap();
        let i0 = interval_limit(&law).unwrap().value;
        let ko0 = kolmogorov_objective(&law).unwrap();
        let io0 = interval_objective(&law).unwrap();
        for u in &scales {
            for v in &shifts {
                let image = law.affine_image(u, v);
                assert!((kolmogorov_limit(&image).unwrap() - k0).abs() <= 1e-12);
                assert!((interval_limit(&image).unwrap().value - i0).abs() <= 1e-12);
                assert!((kolmogorov_objective(&image).unwrap() - ko0).abs() <= 1e-12);
                assert!((interval_objective(&image).unwrap() - io0).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn corollary_chains_by_branch() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let sqrt_2pi = (2.0 * std::f64::consts::PI).sqrt();
    let mut seen_lattice = 0;
    let mut seen_skew = 0;
    // Random laws plus the skewed family to guarantee both branches appear.
    let mut laws: Vec<Law> = (0..300).map(|_| random_law(&mut rng, 2, 6)).collect();
    laws.extend((1..=9).map(|i| crossing_family(0.1 * i as f64)));
    laws.push(Law::rademacher());
    for law in &laws {
        let m = moments(law);
        let report = interval_limit(law).unwrap();
        let h = rational::to_f64(&lattice_span(law).unwrap());
        match report.branch {
            LimitBranch::LatticeDominant => {
                seen_lattice += 1;
                let lhs = h / m.sigma;
                let rhs = 2.0 * m.beta(3) / m.sigma.powi(3);
                assert!(lhs <= rhs + 1e-12);
                let symmetric_two_point =
                    law.len() == 2 && (law.atoms()[0].mass - law.atoms()[1].mass).abs() <= 1e-12;
                let equal = (lhs - rhs).abs() <= 1e-12 * (1.0 + rhs);
                assert_eq!(equal, symmetric_two_point, "equality classification");
            }
            LimitBranch::SkewDominant => {
                seen_skew += 1;
                let mid = m.alpha.abs() / m.sigma.powi(3);
                assert!(sqrt_2pi * report.value < mid);
                assert!(mid <= m.beta(3) / m.sigma.powi(3) * (1.0 + 1e-12));
            }
        }
    }
    assert!(seen_lattice > 0 && seen_skew > 0, "need both branches covered");
}

#[test]
fn strictness_away_from_the_extremal_family() {
    // Laws whose top-two masses leave more than 0.05 of total variation to
    // every symmetric two-point law must stay visibly below sqrt(2/pi).
    let sqrt_2_over_pi = 0.797884560802865355879892119869;
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let mut tested = 0;
    for _ in 0..2000 {
        let law = random_law(&mut rng, 2, 8);
        let mut masses: Vec<f64> = law.atoms().iter().map(|a| a.mass).collect();
        masses.sort_by(|a, b| b.total_cmp(a));
        let overlap = masses[0].min(0.5) + masses.get(1).copied().unwrap_or(0.0).min(0.5);
        let tv = 1.0 - overlap;
        if tv > 0.05 {
            tested += 1;
            let v = interval_objective(&law).unwrap();
            assert!(
                v < sqrt_2_over_pi - 1e-4,
                "law at tv = {tv} reached {v}"
            );
        }
    }
    assert!(tested > 500, "suite must actually exercise the bound");
}
