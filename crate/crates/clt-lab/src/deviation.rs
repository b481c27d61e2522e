//! Exact extrema of the deviation `D(x) = F_n(x) - Phi(x)` and the two
//! distances built from them.
//!
//! Between consecutive atoms `F_n` is constant and `Phi` strictly increases,
//! so `D` decreases there: the supremum of `D` is attained at an atom (value
//! at the jump) and the infimum at a left limit. Scanning atoms with a
//! compensated running CDF therefore gives the exact suprema, no grids.

use crate::convolve::StandardizedLatticePMF;
use crate::normal::phi_cdf;
use crate::sum::NeumaierSum;
use thiserror::Error;

/// Which side of an atom realizes an extremum of `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    At,
    LeftLimit,
}

/// Location of a deviation extremum: an atom side for lattice pmfs, a free
/// point for smooth distribution functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtremumSite {
    Atom { index: usize, side: Side },
    Point(f64),
}

/// Supremum and infimum of `D = F_n - Phi`, with their locations.
///
/// `D` vanishes at both infinities, so `sup_dev >= 0 >= inf_dev` always.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationExtrema {
    pub sup_dev: f64,
    pub inf_dev: f64,
    pub arg_sup: ExtremumSite,
    pub arg_inf: ExtremumSite,
}

impl DeviationExtrema {
    /// `max(sup D, -inf D)`: the Kolmogorov (half-line) distance.
    pub fn kolmogorov(&self) -> f64 {
        self.sup_dev.max(-self.inf_dev)
    }

    /// `sup D - inf D`: the supremum distance over all intervals.
    pub fn interval(&self) -> f64 {
        self.sup_dev - self.inf_dev
    }
}

/// Error of the brute-force pair oracle on oversized inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("brute-force oracle limited to {max} atoms, got {len}")]
pub struct OracleScaleExceeded {
    pub len: usize,
    pub max: usize,
}

/// Largest pmf the `O(k^2)` brute-force oracle accepts.
pub const BRUTE_FORCE_MAX_ATOMS: usize = 4096;

/// CDF value and normal CDF value at each atom, the shared ingredient of the
/// exact scan and the brute-force oracle. The running CDF is accumulated
/// with compensation and pinned to exactly 1 at the final atom.
fn cdf_and_phi(pmf: &StandardizedLatticePMF) -> (Vec<f64>, Vec<f64>) {
    let masses = pmf.masses();
    let mut cdf = Vec::with_capacity(masses.len());
    let mut acc = NeumaierSum::new();
    for &m in masses {
        acc.add(m);
        cdf.push(acc.total());
    }
    if let Some(last) = cdf.last_mut() {
        *last = 1.0;
    }
    let phi = (0..masses.len()).map(|k| phi_cdf(pmf.position(k))).collect();
    (cdf, phi)
}

/// One-pass exact extrema of `D` over atoms and their left limits.
pub fn deviation_extrema(pmf: &StandardizedLatticePMF) -> DeviationExtrema {
    let (cdf, phi) = cdf_and_phi(pmf);
    let mut sup_dev = 0.0f64;
    let mut inf_dev = 0.0f64;
    let mut arg_sup = ExtremumSite::Point(f64::NEG_INFINITY);
    let mut arg_inf = ExtremumSite::Point(f64::NEG_INFINITY);
    let mut prev = 0.0f64;
    for k in 0..cdf.len() {
        let at = cdf[k] - phi[k];
        if at > sup_dev {
            sup_dev = at;
            arg_sup = ExtremumSite::Atom {
                index: k,
                side: Side::At,
            };
        }
        let left = prev - phi[k];
        if left < inf_dev {
            inf_dev = left;
            arg_inf = ExtremumSite::Atom {
                index: k,
                side: Side::LeftLimit,
            };
        }
        prev = cdf[k];
    }
    DeviationExtrema {
        sup_dev,
        inf_dev,
        arg_sup,
        arg_inf,
    }
}

/// Kolmogorov distance of the standardized sum to the standard normal law.
pub fn kolmogorov_distance(pmf: &StandardizedLatticePMF) -> f64 {
    deviation_extrema(pmf).kolmogorov()
}

/// Interval distance: supremum over all intervals `I` of
/// `|P_n(I) - N(I)|`, which equals `sup D - inf D`.
pub fn interval_distance(pmf: &StandardizedLatticePMF) -> f64 {
    deviation_extrema(pmf).interval()
}

/// Brute-force interval distance: maximizes `|dF - dPhi|` over all ordered
/// pairs of candidate endpoints (each an atom value or its left limit) plus
/// the one-sided half-lines. Quadratic on purpose; test oracle.
pub fn interval_distance_bruteforce(
    pmf: &StandardizedLatticePMF,
) -> Result<f64, OracleScaleExceeded> {
    let len = pmf.masses().len();
    if len > BRUTE_FORCE_MAX_ATOMS {
        return Err(OracleScaleExceeded {
            len,
            max: BRUTE_FORCE_MAX_ATOMS,
        });
    }
    let (cdf, phi) = cdf_and_phi(pmf);
    // Candidate endpoints as (F, Phi) pairs; the two infinities cover the
    // half-lines and the empty interval.
    let mut cands: Vec<(f64, f64)> = vec![(0.0, 0.0), (1.0, 1.0)];
    let mut prev = 0.0f64;
    for k in 0..len {
        cands.push((cdf[k], phi[k]));
        cands.push((prev, phi[k]));
        prev = cdf[k];
    }
    let mut best = 0.0f64;
    for (fa, pa) in cands.iter().copied() {
        // Half-line through this endpoint alone.
        best = best.max((fa - pa).abs());
        for (fb, pb) in cands.iter().copied() {
            best = best.max(((fa - fb) - (pa - pb)).abs());
        }
    }
    Ok(best)
}
