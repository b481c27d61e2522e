//! Numerical optimization of the normalized asymptotic objectives over
//! laws: certifying that `(sigma^3 / beta_3) * interval_limit` never exceeds
//! `sqrt(2/pi)` and rediscovering the half-line constant
//! `(sqrt(10) + 3)/(6 sqrt(2 pi))`.
//!
//! The supremum is resolved analytically in closed form elsewhere; the
//! search procedures here are numerical certificates. A dedicated scan
//! covers two-point laws, where both objectives reduce to one-dimensional
//! closed forms in the mass spread `t = |p - q|`:
//!
//! * interval:   `2 / ((1 + t^2) sqrt(2 pi))`, maximal at `t = 0`;
//! * kolmogorov: `(3 + t) / (3 (1 + t^2) sqrt(2 pi))`, maximal at the root
//!   of `1 - 6t - t^2`, i.e. `t = sqrt(10) - 3`.
//!
//! For k-atom laws a derivative-free simplex descent runs over `k - 1`
//! unconstrained mass parameters (mapped to the simplex by normalized
//! exponentials), with positions either fixed on an integer grid (so the
//! span stays exact and the objective is piecewise-smooth in masses only)
//! or free reals with the objective forced onto the `h = 0` branch.

use crate::asymptotics::{interval_limit_given_span, kolmogorov_limit_given_span};
use crate::law::{lattice_span, moments, Law};
use crate::rational::{self, Rational};
use num::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ExtremalError {
    #[error("objective undefined for a zero-variance law")]
    DegenerateLaw,
    #[error("k-atom search supports k in 2..=8, got {k}")]
    InvalidK { k: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveKind {
    Interval,
    Kolmogorov,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    TwoPoint,
    Lattice,
    ContinuousH0,
}

/// Outcome of a search: the best law found, its normalized objective value,
/// and the improvement trace `(iteration, value)` of the winning run.
#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best_law: Law,
    pub objective_value: f64,
    pub objective_kind: ObjectiveKind,
    pub trace: Vec<(u64, f64)>,
    pub mode: SearchMode,
}

/// Integer grid `0..=LATTICE_GRID_MAX` for lattice-mode positions.
pub const LATTICE_GRID_MAX: i64 = 12;

/// `(sigma^3 / beta_3)` times the interval limit of the law.
pub fn interval_objective(law: &Law) -> Result<f64, ExtremalError> {
    let (m, h) = objective_parts(law)?;
    Ok(m.sigma.powi(3) / m.beta(3) * interval_limit_given_span(&m, h).value)
}

/// `(sigma^3 / beta_3)` times the Kolmogorov limit of the law.
pub fn kolmogorov_objective(law: &Law) -> Result<f64, ExtremalError> {
    let (m, h) = objective_parts(law)?;
    Ok(m.sigma.powi(3) / m.beta(3) * kolmogorov_limit_given_span(&m, h))
}

fn objective_parts(law: &Law) -> Result<(crate::law::MomentSet, f64), ExtremalError> {
    if law.len() < 2 {
        return Err(ExtremalError::DegenerateLaw);
    }
    let m = moments(law);
    let h = rational::to_f64(&lattice_span(law).expect("multi-atom"));
    Ok((m, h))
}

/// Normalized objective with the span forced to zero (smooth-family bound).
fn h0_objective(law: &Law, kind: ObjectiveKind) -> f64 {
    if law.len() < 2 {
        return -1.0;
    }
    let m = moments(law);
    if !(m.sigma > 0.0) || !(m.beta(3) > 0.0) {
        return -1.0;
    }
    let limit = match kind {
        ObjectiveKind::Interval => interval_limit_given_span(&m, 0.0).value,
        ObjectiveKind::Kolmogorov => kolmogorov_limit_given_span(&m, 0.0),
    };
    m.sigma.powi(3) / m.beta(3) * limit
}

fn lattice_objective(law: &Law, kind: ObjectiveKind) -> f64 {
    let result = match kind {
        ObjectiveKind::Interval => interval_objective(law),
        ObjectiveKind::Kolmogorov => kolmogorov_objective(law),
    };
    result.unwrap_or(-1.0)
}

/// Two-point law `{0, 1}` with mass spread `t = |p - q|`.
fn two_point_law(t: f64) -> Law {
    let p = (1.0 + t) / 2.0;
    Law::from_integer_atoms(&[(0, p), (1, 1.0 - p)]).expect("valid two-point law")
}

/// Scans two-point laws on a uniform grid over `t in [0, 1)`, then refines
/// the best cell by golden-section search to a 1e-10 bracket.
pub fn two_point_scan(kind: ObjectiveKind, grid_size: usize) -> SearchResult {
    assert!(grid_size >= 1000, "need a grid of at least 1000 cells");
    let eval = |t: f64| lattice_objective(&two_point_law(t), kind);

    let mut trace = Vec::new();
    let mut best_t = 0.0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..grid_size {
        let t = i as f64 / grid_size as f64;
        let v = eval(t);
        if v > best {
            best = v;
            best_t = t;
            trace.push((i as u64, v));
        }
    }

    // Golden-section refinement inside the winning cell's neighborhood.
    const INV_PHI: f64 = 0.61803398874989484820;
    let cell = 1.0 / grid_size as f64;
    let mut lo = (best_t - cell).max(0.0);
    let mut hi = (best_t + cell).min(1.0 - 1e-12);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    let mut iter = grid_size as u64;
    while hi - lo > 1e-10 {
        iter += 1;
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = eval(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = eval(x1);
        }
        let (t, v) = if f1 > f2 { (x1, f1) } else { (x2, f2) };
        if v > best {
            best = v;
            best_t = t;
            trace.push((iter, v));
        }
    }

    SearchResult {
        best_law: two_point_law(best_t),
        objective_value: best,
        objective_kind: kind,
        trace,
        mode: SearchMode::TwoPoint,
    }
}

/// Simplex-descent search over k-atom laws, `restarts` seeded restarts run
/// concurrently and merged by maximum (ties to the lowest restart index, so
/// the result is deterministic for a fixed seed).
pub fn search_k_atoms(
    k: usize,
    mode: SearchMode,
    kind: ObjectiveKind,
    restarts: usize,
    seed: u64,
) -> Result<SearchResult, ExtremalError> {
    if !(2..=8).contains(&k) {
        return Err(ExtremalError::InvalidK { k });
    }
    assert!(restarts >= 1, "need at least one restart");
    if mode == SearchMode::TwoPoint {
        return Ok(two_point_scan(kind, 4096));
    }

    let runs: Vec<(f64, Law, Vec<(u64, f64)>)> = (0..restarts)
        .into_par_iter()
        .map(|restart| run_restart(k, mode, kind, seed, restart))
        .collect();
    let (mut best_idx, mut best_val) = (0usize, f64::NEG_INFINITY);
    for (i, run) in runs.iter().enumerate() {
        if run.0 > best_val {
            best_val = run.0;
            best_idx = i;
        }
    }
    let winner = runs.into_iter().nth(best_idx).expect("restarts >= 1");
    Ok(SearchResult {
        best_law: winner.1,
        objective_value: winner.0,
        objective_kind: kind,
        trace: winner.2,
        mode,
    })
}

fn run_restart(
    k: usize,
    mode: SearchMode,
    kind: ObjectiveKind,
    seed: u64,
    restart: usize,
) -> (f64, Law, Vec<(u64, f64)>) {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(restart as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);

    match mode {
        SearchMode::Lattice => {
            let mut grid: Vec<i64> = (0..=LATTICE_GRID_MAX).collect();
            grid.shuffle(&mut rng);
            let mut positions: Vec<i64> = grid.into_iter().take(k).collect();
            positions.sort_unstable();
            let x0: Vec<f64> = (0..k - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let build = move |z: &[f64]| {
                let masses = softmax_with_implicit_last(z);
                Law::new(
                    positions
                        .iter()
                        .zip(&masses)
                        .map(|(&x, &m)| (Rational::from(BigInt::from(x)), m))
                        .collect(),
                )
                .expect("softmax masses are valid")
            };
            let f = |z: &[f64]| lattice_objective(&build(z), kind);
            let (z, value, trace) = nelder_mead_max(&f, &x0, 0.7, 4000, 1e-14);
            (value, build(&z), trace)
        }
        SearchMode::ContinuousH0 => {
            let mut x0: Vec<f64> = (0..k - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
            x0.extend((0..k).map(|_| rng.gen_range(-2.0..2.0)));
            let build = move |v: &[f64]| -> Option<Law> {
                let masses = softmax_with_implicit_last(&v[..k - 1]);
                let mut pairs = Vec::with_capacity(k);
                for (i, &pos) in v[k - 1..].iter().enumerate() {
                    pairs.push((rational::from_f64(pos)?, masses[i]));
                }
                Law::new(pairs).ok()
            };
            let f = |v: &[f64]| match build(v) {
                Some(law) => h0_objective(&law, kind),
                None => -1.0,
            };
            let (v, value, trace) = nelder_mead_max(&f, &x0, 0.7, 4000, 1e-14);
            let law = build(&v).expect("optimum was evaluable");
            (value, law, trace)
        }
        SearchMode::TwoPoint => unreachable!("handled by the scan"),
    }
}

/// Maps `k - 1` free parameters to `k` positive masses summing to 1:
/// `softmax(z_1, ..., z_{k-1}, 0)`. Exponents are clamped at -700 so no
/// mass underflows to an exact zero, keeping every law well-formed.
fn softmax_with_implicit_last(z: &[f64]) -> Vec<f64> {
    let peak = z.iter().cloned().fold(0.0f64, f64::max);
    let mut weights: Vec<f64> = z.iter().map(|&v| (v - peak).max(-700.0).exp()).collect();
    weights.push((-peak).max(-700.0).exp());
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    weights
}

/// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2), maximizing. Returns the best point, its value, and the
/// improvement trace.
fn nelder_mead_max(
    f: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    init_step: f64,
    max_iter: u64,
    ftol: f64,
) -> (Vec<f64>, f64, Vec<(u64, f64)>) {
    let dim = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for i in 0..dim {
        let mut p = x0.to_vec();
        p[i] += init_step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();
    let mut trace: Vec<(u64, f64)> = Vec::new();
    let mut record = f64::NEG_INFINITY;

    for iter in 0..max_iter {
        // Sort descending by value (best first).
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        let reordered: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let revalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        simplex = reordered;
        values = revalues;

        if values[0] > record {
            record = values[0];
            trace.push((iter, record));
        }
        if (values[0] - values[dim]).abs() < ftol {
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|p| p[j]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let reflect: Vec<f64> = (0..dim)
            .map(|j| centroid[j] + (centroid[j] - worst[j]))
            .collect();
        let f_reflect = f(&reflect);

        if f_reflect > values[0] {
            let expand: Vec<f64> = (0..dim)
                .map(|j| centroid[j] + 2.0 * (centroid[j] - worst[j]))
                .collect();
            let f_expand = f(&expand);
            if f_expand > f_reflect {
                simplex[dim] = expand;
                values[dim] = f_expand;
            } else {
                simplex[dim] = reflect;
                values[dim] = f_reflect;
            }
        } else if f_reflect > values[dim - 1] {
            simplex[dim] = reflect;
            values[dim] = f_reflect;
        } else {
            let contract: Vec<f64> = (0..dim)
                .map(|j| centroid[j] + 0.5 * (worst[j] - centroid[j]))
                .collect();
            let f_contract = f(&contract);
            if f_contract > values[dim] {
                simplex[dim] = contract;
                values[dim] = f_contract;
            } else {
                for i in 1..=dim {
                    simplex[i] = (0..dim)
                        .map(|j| 0.5 * (simplex[i][j] + simplex[0][j]))
                        .collect();
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=dim {
        if values[i] > values[best] {
            best = i;
        }
    }
    (simplex[best].clone(), values[best], trace)
}
