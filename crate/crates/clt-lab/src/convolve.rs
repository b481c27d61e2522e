//! Exact-support n-fold self-convolution of a lattice law and the lattice
//! representation of the standardized sum.
//!
//! Atoms are re-indexed as integers on the base lattice (shift = smallest
//! atom, step = lattice span), so an n-fold convolution is a plain
//! square-and-multiply on probability vectors: `O(log n)` pairwise
//! convolutions instead of `n - 1`, which also keeps the number of rounding
//! stages small. A big-rational twin of the same pipeline serves as the
//! independent oracle for rounding-error bounds in tests.

use crate::law::{lattice_span, Law, MomentSet};
use crate::rational::{self, Rational};
use crate::sum::NeumaierSum;
use num::{One, Signed, ToPrimitive, Zero};
use std::sync::Arc;
use thiserror::Error;

/// Default cap on the support size of the n-fold sum.
pub const DEFAULT_SUPPORT_CAP: usize = 1 << 20;

/// Largest `n` accepted by the exact big-rational oracle.
pub const EXACT_ORACLE_MAX_N: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConvolveError {
    #[error("support of the n-fold sum needs {required} cells, over the cap {cap}")]
    SupportOverflow { required: u128, cap: usize },
    #[error("law has zero variance; the standardized sum is undefined")]
    DegenerateLaw,
    #[error("exact convolution oracle limited to n <= {max}, got {n}")]
    OracleScaleExceeded { n: u32, max: u32 },
}

/// Law of the sum of `n` i.i.d. copies of the base law, on the base lattice.
///
/// Cell `k` carries the probability of the point `base + k * step`. The
/// first and last cells are positive (exact-zero underflow at the ends is
/// trimmed away); interior cells may be zero.
#[derive(Debug, Clone)]
pub struct SumPMF {
    n: u32,
    base: Rational,
    step: Rational,
    masses: Arc<[f64]>,
}

impl SumPMF {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Position of the lowest atom.
    pub fn base(&self) -> &Rational {
        &self.base
    }

    /// Lattice span of the base law.
    pub fn step(&self) -> &Rational {
        &self.step
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Exact position of cell `k`.
    pub fn position(&self, k: usize) -> Rational {
        &self.base + &self.step * Rational::from_integer(k.into())
    }

    pub fn position_f64(&self, k: usize) -> f64 {
        rational::to_f64(&self.base) + rational::to_f64(&self.step) * k as f64
    }
}

/// Lattice law of the standardized sum `(S_n - n*mu) / (sigma * sqrt(n))`.
///
/// Shares its mass vector with the [`SumPMF`] it came from; positions are
/// `offset + k * step_std` with `step_std = h / (sigma * sqrt(n))`.
#[derive(Debug, Clone)]
pub struct StandardizedLatticePMF {
    n: u32,
    offset: f64,
    step_std: f64,
    masses: Arc<[f64]>,
    mu: f64,
    sigma: f64,
}

impl StandardizedLatticePMF {
    /// Builds a pmf directly from raw parts (synthetic pmfs in tests, the
    /// single-atom edge case, discretizations).
    pub fn from_parts(
        n: u32,
        offset: f64,
        step_std: f64,
        masses: Vec<f64>,
        mu: f64,
        sigma: f64,
    ) -> Result<Self, ConvolveError> {
        if !(step_std > 0.0) || masses.is_empty() {
            return Err(ConvolveError::DegenerateLaw);
        }
        Ok(Self {
            n,
            offset,
            step_std,
            masses: masses.into(),
            mu,
            sigma,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn step_std(&self) -> f64 {
        self.step_std
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Standardized position of cell `k`.
    pub fn position(&self, k: usize) -> f64 {
        self.offset + self.step_std * k as f64
    }

    /// Mean of the base law.
    pub fn base_mu(&self) -> f64 {
        self.mu
    }

    /// Standard deviation of the base law.
    pub fn base_sigma(&self) -> f64 {
        self.sigma
    }
}

/// n-fold self-convolution of `law` with the default support cap.
pub fn self_convolve(law: &Law, n: u32) -> Result<SumPMF, ConvolveError> {
    self_convolve_with_cap(law, n, DEFAULT_SUPPORT_CAP)
}

/// n-fold self-convolution with an explicit support cap.
pub fn self_convolve_with_cap(law: &Law, n: u32, cap: usize) -> Result<SumPMF, ConvolveError> {
    assert!(n >= 1, "need n >= 1");
    let atoms = law.atoms();
    if atoms.len() == 1 {
        // Point mass: the sum is deterministic; any positive step works.
        return Ok(SumPMF {
            n,
            base: &atoms[0].pos * Rational::from_integer(n.into()),
            step: Rational::one(),
            masses: vec![1.0].into(),
        });
    }

    let step = lattice_span(law).expect("multi-atom law has a span");
    let shift = law.min_pos().clone();
    let mut cells = vec![0.0f64; grid_index(&atoms[atoms.len() - 1].pos, &shift, &step) + 1];
    for atom in atoms {
        cells[grid_index(&atom.pos, &shift, &step)] = atom.mass;
    }

    let required = (cells.len() as u128 - 1) * n as u128 + 1;
    if required > cap as u128 {
        return Err(ConvolveError::SupportOverflow { required, cap });
    }

    // Square-and-multiply on probability vectors.
    let mut result: Option<Vec<f64>> = None;
    let mut power = cells;
    let mut e = n;
    loop {
        if e & 1 == 1 {
            result = Some(match result {
                None => power.clone(),
                Some(r) => convolve_vec(&r, &power),
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        power = convolve_vec(&power, &power);
    }
    let mut masses = result.expect("n >= 1");

    // Trim exact-zero ends (extreme masses underflow for large n).
    let lo = masses.iter().position(|&m| m > 0.0).unwrap_or(0);
    let hi = masses.iter().rposition(|&m| m > 0.0).unwrap_or(0);
    masses.truncate(hi + 1);
    masses.drain(..lo);

    // Single renormalization pass.
    let total = crate::sum::compensated_sum(masses.iter().copied());
    for m in &mut masses {
        *m /= total;
    }

    let base = &shift * Rational::from_integer(n.into()) + &step * Rational::from_integer(lo.into());
    Ok(SumPMF {
        n,
        base,
        step,
        masses: masses.into(),
    })
}

fn grid_index(pos: &Rational, shift: &Rational, step: &Rational) -> usize {
    let q = (pos - shift) / step;
    debug_assert!(q.is_integer(), "atom off the base lattice");
    q.to_integer().to_usize().expect("index fits usize")
}

/// Pairwise convolution with per-cell compensated accumulation; negative
/// rounding residues are clamped to zero.
fn convolve_vec(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0f64; a.len() + b.len() - 1];
    for (k, cell) in out.iter_mut().enumerate() {
        let mut acc = NeumaierSum::new();
        let i_lo = k.saturating_sub(b.len() - 1);
        let i_hi = k.min(a.len() - 1);
        for i in i_lo..=i_hi {
            acc.add(a[i] * b[k - i]);
        }
        *cell = acc.total().max(0.0);
    }
    out
}

/// Standardizes an n-fold sum by the base-law moments.
pub fn standardize(
    sum: &SumPMF,
    base_moments: &MomentSet,
) -> Result<StandardizedLatticePMF, ConvolveError> {
    if !(base_moments.sigma > 0.0) {
        return Err(ConvolveError::DegenerateLaw);
    }
    let scale = base_moments.sigma * (sum.n as f64).sqrt();
    Ok(StandardizedLatticePMF {
        n: sum.n,
        offset: (rational::to_f64(&sum.base) - sum.n as f64 * base_moments.mu) / scale,
        step_std: rational::to_f64(&sum.step) / scale,
        masses: Arc::clone(&sum.masses),
        mu: base_moments.mu,
        sigma: base_moments.sigma,
    })
}

/// n-fold self-convolution in exact big-rational arithmetic.
///
/// Takes `(position, mass)` pairs with exact rational masses (renormalized
/// exactly to total 1), `n <=` [`EXACT_ORACLE_MAX_N`]. Test oracle for the
/// floating pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSumPMF {
    pub n: u32,
    pub base: Rational,
    pub step: Rational,
    pub masses: Vec<Rational>,
}

impl ExactSumPMF {
    pub fn masses_f64(&self) -> Vec<f64> {
        self.masses.iter().map(rational::to_f64).collect()
    }
}

pub fn exact_self_convolve(
    pairs: &[(Rational, Rational)],
    n: u32,
) -> Result<ExactSumPMF, ConvolveError> {
    assert!(n >= 1, "need n >= 1");
    assert!(!pairs.is_empty() && pairs.iter().all(|(_, m)| m.is_positive()));
    if n > EXACT_ORACLE_MAX_N {
        return Err(ConvolveError::OracleScaleExceeded {
            n,
            max: EXACT_ORACLE_MAX_N,
        });
    }

    let mut pairs: Vec<(Rational, Rational)> = pairs.to_vec();
    pairs.sort_by(|a, b| a.0.cmp(&b.0));
    let total: Rational = pairs.iter().map(|(_, m)| m.clone()).sum();
    for (_, m) in &mut pairs {
        *m /= &total;
    }

    if pairs.len() == 1 {
        return Ok(ExactSumPMF {
            n,
            base: &pairs[0].0 * Rational::from_integer(n.into()),
            step: Rational::one(),
            masses: vec![Rational::one()],
        });
    }

    let mut step = Rational::zero();
    for pair in pairs.windows(2) {
        step = rational::rational_gcd(&step, &(&pair[1].0 - &pair[0].0));
    }
    let shift = pairs[0].0.clone();
    let top = grid_index(&pairs[pairs.len() - 1].0, &shift, &step);
    let mut cells = vec![Rational::zero(); top + 1];
    for (pos, mass) in &pairs {
        cells[grid_index(pos, &shift, &step)] = mass.clone();
    }

    let mut result: Option<Vec<Rational>> = None;
    let mut power = cells;
    let mut e = n;
    loop {
        if e & 1 == 1 {
            result = Some(match result {
                None => power.clone(),
                Some(r) => convolve_exact(&r, &power),
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        power = convolve_exact(&power, &power);
    }

    Ok(ExactSumPMF {
        n,
        base: &shift * Rational::from_integer(n.into()),
        step,
        masses: result.expect("n >= 1"),
    })
}

fn convolve_exact(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}
