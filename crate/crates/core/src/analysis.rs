//! Fidelity landscapes, infidelity scaling and cyclic-phase decomposition.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::error_model::finite_difference_propagator;
use crate::sequences::PulseSequence;
use crate::su2::{eig_unitary, fidelity, infidelity, rotation, wrap_phase};

/// Default half-width of the (ε, ε′) square.
pub const DEFAULT_RANGE: (f64, f64) = (-0.1, 0.1);
/// Default samples per axis; odd so that (0, 0) is on the grid.
pub const DEFAULT_RESOLUTION: usize = 201;
/// Strength ladder for slope fits.
pub const DEFAULT_LADDER: [f64; 5] = [1e-3, 2e-3, 4e-3, 8e-3, 1e-2];
/// Infidelities below this are treated as round-off and dropped from fits.
pub const INFIDELITY_FLOOR: f64 = 1e-14;

/// F = ½|Tr(U† R(m^k + δm^k)⋯R(m^1 + δm^1))| with the exact perturbed product.
pub fn fidelity_under_error(seq: &PulseSequence, eps: f64, eps_prime: f64) -> f64 {
    fidelity(
        seq.target(),
        &finite_difference_propagator(seq, eps, eps_prime),
    )
}

/// 1 − F evaluated without cancellation.
pub fn infidelity_under_error(seq: &PulseSequence, eps: f64, eps_prime: f64) -> f64 {
    infidelity(
        seq.target(),
        &finite_difference_propagator(seq, eps, eps_prime),
    )
}

/// Fidelity sampled on an (ε, ε′) grid. Row i is ε = `eps[i]`, column j is ε′ = `eps_prime[j]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LandscapeGrid {
    pub family: String,
    pub eps: Vec<f64>,
    pub eps_prime: Vec<f64>,
    pub fidelity: Vec<Vec<f64>>,
}

impl LandscapeGrid {
    pub fn cells(&self) -> usize {
        self.eps.len() * self.eps_prime.len()
    }

    pub fn min(&self) -> f64 {
        self.fidelity
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `eps,eps_prime,fidelity` rows, row-major over ε then ε′, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.cells() + 1));
        out.push_str("eps,eps_prime,fidelity\n");
        for (i, e) in self.eps.iter().enumerate() {
            for (j, ep) in self.eps_prime.iter().enumerate() {
                writeln!(out, "{:.16e},{:.16e},{:.16e}", e, ep, self.fidelity[i][j])
                    .expect("writing to a String");
            }
        }
        out
    }
}

/// `n` evenly spaced samples from `lo` to `hi` inclusive; symmetric ranges
/// hit 0 exactly at the midpoint.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            let t = i as f64 / last;
            let x = lo * (1.0 - t) + hi * t;
            if 2 * i == n - 1 && lo == -hi {
                0.0
            } else {
                x
            }
        })
        .collect()
}

/// Fidelity over the Cartesian product of two strength axes.
///
/// Rows are evaluated in parallel on the current rayon pool; every cell is
/// computed independently so the result does not depend on scheduling.
pub fn landscape(
    seq: &PulseSequence,
    eps_range: (f64, f64),
    eps_prime_range: (f64, f64),
    resolution: usize,
) -> Result<LandscapeGrid> {
    if resolution < 2 {
        return Err(Error::InvalidArgument(format!(
            "landscape resolution must be at least 2, got {resolution}"
        )));
    }
    for (lo, hi) in [eps_range, eps_prime_range] {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!(
                "invalid strength range [{lo}, {hi}]"
            )));
        }
    }
    let eps = linspace(eps_range.0, eps_range.1, resolution);
    let eps_prime = linspace(eps_prime_range.0, eps_prime_range.1, resolution);
    let fidelity = eps
        .par_iter()
        .map(|&e| {
            eps_prime
                .iter()
                .map(|&ep| fidelity_under_error(seq, e, ep))
                .collect()
        })
        .collect();
    Ok(LandscapeGrid {
        family: seq.family().as_str().to_string(),
        eps,
        eps_prime,
        fidelity,
    })
}

/// [`landscape`] on a dedicated pool with at most `threads` workers (0 = rayon default).
pub fn landscape_with_threads(
    seq: &PulseSequence,
    eps_range: (f64, f64),
    eps_prime_range: (f64, f64),
    resolution: usize,
    threads: usize,
) -> Result<LandscapeGrid> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot build thread pool: {e}")))?;
    pool.install(|| landscape(seq, eps_range, eps_prime_range, resolution))
}

/// Fraction of grid cells with F ≥ `threshold`.
pub fn robust_area(grid: &LandscapeGrid, threshold: f64) -> f64 {
    let cells = grid.cells();
    if cells == 0 {
        return 0.0;
    }
    let hits = grid
        .fidelity
        .iter()
        .flatten()
        .filter(|&&f| f >= threshold)
        .count();
    hits as f64 / cells as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingAxis {
    /// (s, 0)
    Eps,
    /// (0, s)
    EpsPrime,
    /// (s, s)
    Diagonal,
}

impl std::str::FromStr for ScalingAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "eps" | "epsilon" | "pulse-length" => Ok(ScalingAxis::Eps),
            "eps-prime" | "eps_prime" | "off-resonance" => Ok(ScalingAxis::EpsPrime),
            "diagonal" | "both" => Ok(ScalingAxis::Diagonal),
            other => Err(Error::InvalidArgument(format!(
                "unknown scaling axis '{other}'"
            ))),
        }
    }
}

impl ScalingAxis {
    fn strengths(&self, s: f64) -> (f64, f64) {
        match self {
            ScalingAxis::Eps => (s, 0.0),
            ScalingAxis::EpsPrime => (0.0, s),
            ScalingAxis::Diagonal => (s, s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub strength: f64,
    pub infidelity: f64,
}

/// Least-squares fit of log(1 − F) against log(strength).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub axis: ScalingAxis,
    pub slope: f64,
    pub intercept: f64,
    pub points: Vec<ScalingPoint>,
    /// Strengths whose infidelity fell below [`INFIDELITY_FLOOR`].
    pub dropped: Vec<f64>,
    pub warnings: Vec<String>,
}

pub fn infidelity_scaling(
    seq: &PulseSequence,
    axis: ScalingAxis,
    strengths: &[f64],
) -> Result<ScalingFit> {
    if strengths.len() < 5 {
        return Err(Error::InvalidArgument(format!(
            "need at least 5 ladder points, got {}",
            strengths.len()
        )));
    }
    if let Some(s) = strengths.iter().find(|s| !(**s >= 1e-3 && **s <= 1e-2)) {
        return Err(Error::InvalidArgument(format!(
            "ladder point {s} outside [1e-3, 1e-2]"
        )));
    }
    let mut points = Vec::new();
    let mut dropped = Vec::new();
    let mut warnings = Vec::new();
    for &s in strengths {
        let (e, ep) = axis.strengths(s);
        let inf = infidelity_under_error(seq, e, ep);
        if inf < INFIDELITY_FLOOR {
            warnings.push(format!(
                "infidelity {inf:.3e} at strength {s} is below the precision floor; point dropped"
            ));
            dropped.push(s);
        } else {
            points.push(ScalingPoint {
                strength: s,
                infidelity: inf,
            });
        }
    }
    if points.len() < 2 {
        return Err(Error::Precision(format!(
            "{} of {} points above the infidelity floor",
            points.len(),
            strengths.len()
        )));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.strength.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.infidelity.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument(
            "ladder must contain at least two distinct strengths".into(),
        ));
    }
    let slope = sxy / sxx;
    Ok(ScalingFit {
        axis,
        slope,
        intercept: my - slope * mx,
        points,
        dropped,
        warnings,
    })
}

/// Total, dynamical and geometric phase of one cyclic state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CyclicPhase {
    pub total: f64,
    pub dynamical: f64,
    pub geometric: f64,
    /// Initial state as [[re, im], [re, im]].
    pub state: [[f64; 2]; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseReport {
    pub family: String,
    pub states: [CyclicPhase; 2],
    /// True when the ideal product is ±I, so the cyclic basis is a convention.
    pub degenerate: bool,
}

/// Splits each cyclic phase of the ideal product into its dynamical and
/// geometric (Aharonov–Anandan) parts.
///
/// Within a hard pulse ⟨ψ|H|ψ⟩ is constant, so the dynamical phase is
/// −Σ_i ⟨ψ(t_{i−1})|W^i|ψ(t_{i−1})⟩ regardless of the pulse durations.
pub fn phase_decomposition(seq: &PulseSequence) -> Result<PhaseReport> {
    if seq.is_empty() {
        return Err(Error::InvalidArgument("sequence has no pulses".into()));
    }
    let u = seq.ideal_product();
    let pairs = eig_unitary(&u);
    let gap = (Complex64::from_polar(1.0, pairs[0].phase)
        - Complex64::from_polar(1.0, pairs[1].phase))
    .norm();
    let ms = seq.rotation_vectors();
    let states = pairs.map(|pair| {
        let mut psi = pair.vector;
        let mut dynamical = 0.0;
        for m in &ms {
            dynamical -= m.generator().expectation(&psi);
            let r = rotation(m);
            let r = r.matrix();
            psi = [
                r[(0, 0)] * psi[0] + r[(0, 1)] * psi[1],
                r[(1, 0)] * psi[0] + r[(1, 1)] * psi[1],
            ];
        }
        CyclicPhase {
            total: pair.phase,
            dynamical: wrap_phase(dynamical),
            geometric: wrap_phase(pair.phase - dynamical),
            state: pair.vector.map(|z| [z.re, z.im]),
        }
    });
    Ok(PhaseReport {
        family: seq.family().as_str().to_string(),
        states,
        degenerate: gap < 1e-9,
    })
}
