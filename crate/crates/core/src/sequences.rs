//! Composite pulse synthesis.
//!
//! A sequence is an ordered list of hard pulses applied left to right in
//! time, so its ideal product is R(m^k)⋯R(m^1). Every pulse rotates about an
//! axis in the xy-plane, m = θ(cos φ, sin φ, 0) with θ ≥ 0.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::su2::{fidelity, rotation, RotationVector, Unitary2};

/// Default winding for a standalone CORPSE (n₁ = n₃ = 1, n₂ = 2).
pub const CORPSE_WINDING: [i64; 3] = [1, 2, 1];
/// Default winding for the CORPSE constituents of CIS-CCCP.
pub const CIS_CCCP_WINDING: [i64; 3] = [1, 1, 0];

/// Wraps an azimuth into [0, 2π).
pub fn wrap_azimuth(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Plain,
    Corpse,
    Scrofulous,
    CisCccp,
    Bb1,
    AlwayJones,
    /// Three SCROFULOUS blocks arranged to compose a CORPSE. Not robust; kept
    /// as a negative control.
    ScrofulousInCorpse,
    Custom,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Plain,
        Family::Corpse,
        Family::Scrofulous,
        Family::CisCccp,
        Family::Bb1,
        Family::AlwayJones,
        Family::ScrofulousInCorpse,
        Family::Custom,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Plain => "plain",
            Family::Corpse => "corpse",
            Family::Scrofulous => "scrofulous",
            Family::CisCccp => "cis-cccp",
            Family::Bb1 => "bb1",
            Family::AlwayJones => "alway-jones",
            Family::ScrofulousInCorpse => "scrofulous-in-corpse",
            Family::Custom => "custom",
        }
    }

    /// Channels the construction is meant to cancel: (pulse length, off resonance).
    pub fn declared_robustness(&self) -> (bool, bool) {
        match self {
            Family::Plain | Family::Custom => (false, false),
            Family::Corpse => (false, true),
            Family::Scrofulous | Family::Bb1 => (true, false),
            Family::CisCccp | Family::AlwayJones | Family::ScrofulousInCorpse => (true, true),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == key)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown sequence family '{s}'")))
    }
}

/// One hard pulse: rotation by θ about (cos φ, sin φ, 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    pub theta: f64,
    pub phi: f64,
}

impl Pulse {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "pulse angles must be finite (theta = {theta}, phi = {phi})"
            )));
        }
        if theta < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "pulse angle must be non-negative, got {theta}"
            )));
        }
        Ok(Pulse {
            theta,
            phi: wrap_azimuth(phi),
        })
    }

    pub fn rotation_vector(&self) -> RotationVector {
        RotationVector::in_plane(self.theta, self.phi)
    }

    pub fn rotation(&self) -> Unitary2 {
        rotation(&self.rotation_vector())
    }
}

/// An ordered pulse list together with the gate it is meant to implement.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    pulses: Vec<Pulse>,
    family: Family,
    target_theta: f64,
    target_phi: f64,
    target: Unitary2,
    winding: Option<[i64; 3]>,
}

impl PulseSequence {
    /// A user-assembled sequence aimed at rotation(θ(cos φ, sin φ, 0)).
    pub fn custom(pulses: Vec<Pulse>, target_theta: f64, target_phi: f64) -> Result<Self> {
        Self::assemble(Family::Custom, pulses, target_theta, target_phi, None)
    }

    fn assemble(
        family: Family,
        pulses: Vec<Pulse>,
        target_theta: f64,
        target_phi: f64,
        winding: Option<[i64; 3]>,
    ) -> Result<Self> {
        if !target_theta.is_finite() || !target_phi.is_finite() {
            return Err(Error::InvalidArgument(
                "target angles must be finite".into(),
            ));
        }
        Ok(PulseSequence {
            pulses,
            family,
            target_theta,
            target_phi,
            target: rotation(&RotationVector::in_plane(target_theta, target_phi)),
            winding,
        })
    }

    pub fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn target(&self) -> &Unitary2 {
        &self.target
    }

    /// (θ, φ) of the target rotation.
    pub fn target_angles(&self) -> (f64, f64) {
        (self.target_theta, self.target_phi)
    }

    pub fn winding(&self) -> Option<[i64; 3]> {
        self.winding
    }

    pub fn rotation_vectors(&self) -> Vec<RotationVector> {
        self.pulses.iter().map(Pulse::rotation_vector).collect()
    }

    /// R(m^k)⋯R(m^1).
    pub fn ideal_product(&self) -> Unitary2 {
        product_of(&self.pulses)
    }

    pub fn product_fidelity(&self) -> f64 {
        fidelity(&self.target, &self.ideal_product())
    }

    /// The same pulses with every azimuth shifted by `delta`.
    pub fn shifted(&self, delta: f64) -> Self {
        let pulses = self
            .pulses
            .iter()
            .map(|p| Pulse {
                theta: p.theta,
                phi: wrap_azimuth(p.phi + delta),
            })
            .collect();
        Self::assemble(
            self.family,
            pulses,
            self.target_theta,
            self.target_phi + delta,
            self.winding,
        )
        .expect("finite angles stay finite")
    }

    pub fn to_document(&self) -> SequenceDocument {
        SequenceDocument {
            family: self.family.as_str().to_string(),
            target: Angles {
                theta: self.target_theta,
                phi: self.target_phi,
            },
            winding: self.winding,
            pulses: self
                .pulses
                .iter()
                .map(|p| Angles {
                    theta: p.theta,
                    phi: p.phi,
                })
                .collect(),
        }
    }

    pub fn from_document(doc: &SequenceDocument) -> Result<Self> {
        let family: Family = doc.family.parse()?;
        let pulses = doc
            .pulses
            .iter()
            .map(|a| Pulse::new(a.theta, a.phi))
            .collect::<Result<Vec<_>>>()?;
        if pulses.is_empty() {
            return Err(Error::InvalidArgument("sequence has no pulses".into()));
        }
        Self::assemble(
            family,
            pulses,
            doc.target.theta,
            doc.target.phi,
            doc.winding,
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("document serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SequenceDocument = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("malformed sequence JSON: {e}")))?;
        Self::from_document(&doc)
    }
}

/// Product R(m^k)⋯R(m^1) of a pulse list.
pub fn product_of(pulses: &[Pulse]) -> Unitary2 {
    pulses
        .iter()
        .fold(Unitary2::identity(), |acc, p| p.rotation() * acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Angles {
    pub theta: f64,
    pub phi: f64,
}

/// Serialised form of a sequence, shared with the command line tool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceDocument {
    pub family: String,
    pub target: Angles,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub winding: Option<[i64; 3]>,
    pub pulses: Vec<Angles>,
}

fn check_theta(theta: f64, lo: f64, hi: f64, lo_open: bool, what: &str) -> Result<()> {
    let ok = theta.is_finite() && theta <= hi && if lo_open { theta > lo } else { theta >= lo };
    if ok {
        Ok(())
    } else {
        let open = if lo_open { "(" } else { "[" };
        Err(Error::InvalidArgument(format!(
            "{what}: theta = {theta} outside {open}{lo}, {hi}]"
        )))
    }
}

fn check_phi(phi: f64) -> Result<()> {
    if phi.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "phi must be finite, got {phi}"
        )))
    }
}

/// A single uncompensated pulse.
pub fn plain(theta: f64, phi: f64) -> Result<PulseSequence> {
    check_phi(phi)?;
    if !(0.0..2.0 * TAU).contains(&theta) {
        return Err(Error::InvalidArgument(format!(
            "plain: theta = {theta} outside [0, 4π)"
        )));
    }
    PulseSequence::assemble(
        Family::Plain,
        vec![Pulse::new(theta, phi)?],
        theta,
        phi,
        None,
    )
}

/// κ = arcsin(sin(θ/2)/2).
pub fn corpse_kappa(theta: f64) -> f64 {
    ((0.5 * theta).sin() / 2.0).asin()
}

fn corpse_pulses(theta: f64, phi: f64, winding: [i64; 3]) -> Result<Vec<Pulse>> {
    let kappa = corpse_kappa(theta);
    let [n1, n2, n3] = winding.map(|n| n as f64);
    let angles = [
        0.5 * theta - kappa + TAU * n1,
        -2.0 * kappa + TAU * n2,
        0.5 * theta - kappa + TAU * n3,
    ];
    for (i, &a) in angles.iter().enumerate() {
        if a < 0.0 {
            return Err(Error::Winding {
                index: i + 1,
                angle: a,
            });
        }
    }
    Ok(vec![
        Pulse::new(angles[0], phi)?,
        Pulse::new(angles[1], phi + PI)?,
        Pulse::new(angles[2], phi)?,
    ])
}

/// CORPSE: three collinear pulses cancelling the off-resonance error.
pub fn corpse(theta: f64, phi: f64, winding: [i64; 3]) -> Result<PulseSequence> {
    check_theta(theta, 0.0, TAU, false, "corpse")?;
    check_phi(phi)?;
    let pulses = corpse_pulses(theta, phi, winding)?;
    PulseSequence::assemble(Family::Corpse, pulses, theta, phi, Some(winding))
}

/// Parameters of a SCROFULOUS solution: pulses (θ₁, φ₁), (π, φ₂), (θ₁, φ₁).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScrofulousSolution {
    pub theta1: f64,
    pub phi1: f64,
    pub phi2: f64,
    /// Final ‖residual‖ of the product-match system.
    pub residual: f64,
    pub iterations: usize,
}

impl ScrofulousSolution {
    /// |θ₁ cos(φ₁ − φ₂) + π/2|.
    pub fn constraint_residual(&self) -> f64 {
        (self.theta1 * (self.phi1 - self.phi2).cos() + FRAC_PI_2).abs()
    }
}

const SCROFULOUS_MAX_ITER: usize = 100;
const SCROFULOUS_TOL: f64 = 1e-12;

/// Outer pulses' middle-pulse offset, φ₁ − φ₂ = arccos(−π/(2θ₁)).
fn scrofulous_gap(theta1: f64) -> f64 {
    (-FRAC_PI_2 / theta1).clamp(-1.0, 1.0).acos()
}

/// Residual of R(θ₁,φ₁) R(π,φ₂) R(θ₁,φ₁) = ±R(θ, x̂) in the (σ₁, σ₂)
/// components. Palindromic xy-plane products carry no σ₃ part, and the
/// identity part follows from normalisation up to the global sign.
fn scrofulous_residual(theta: f64, x: [f64; 2]) -> [f64; 2] {
    let [theta1, phi1] = x;
    let phi2 = phi1 - scrofulous_gap(theta1);
    let outer = rotation(&RotationVector::in_plane(theta1, phi1));
    let middle = rotation(&RotationVector::in_plane(PI, phi2));
    let p = (outer * middle * outer).matrix().to_owned();
    // P = a₀ I − i a·σ
    let a0 = 0.5 * (p[(0, 0)] + p[(1, 1)]).re;
    let a1 = -0.5 * (p[(0, 1)] + p[(1, 0)]).im;
    let a2 = 0.5 * (p[(1, 0)] - p[(0, 1)]).re;
    let (u0, u1) = ((0.5 * theta).cos(), (0.5 * theta).sin());
    let sign = if a0 * u0 + a1 * u1 >= 0.0 { 1.0 } else { -1.0 };
    [a1 - sign * u1, a2]
}

/// Solves the SCROFULOUS system for a target rotation by θ ∈ (0, π] about x̂.
///
/// Damped Gauss–Newton (Levenberg–Marquardt) over (θ₁, φ₁) with a
/// central-difference Jacobian; φ₂ is eliminated through the constraint.
pub fn solve_scrofulous(theta: f64) -> Result<ScrofulousSolution> {
    if !(theta > 0.0 && theta <= PI) {
        return Err(Error::InvalidArgument(format!(
            "reduced SCROFULOUS target must lie in (0, π], got {theta}"
        )));
    }
    let norm = |r: [f64; 2]| r[0].hypot(r[1]);
    // initial guess: θ₁ interpolates π/2 → π and φ₁ interpolates π/2 → π/3
    let mut x = [FRAC_PI_2 + 0.5 * theta, FRAC_PI_2 - theta / 6.0];
    let mut r = scrofulous_residual(theta, x);
    let mut damping = 1e-6;
    let mut iterations = 0;
    let h = 1e-7;
    while norm(r) > 1e-15 && iterations < SCROFULOUS_MAX_ITER {
        iterations += 1;
        let mut jac = [[0.0; 2]; 2];
        for k in 0..2 {
            let (mut xp, mut xm) = (x, x);
            xp[k] += h;
            xm[k] -= h;
            let (rp, rm) = (
                scrofulous_residual(theta, xp),
                scrofulous_residual(theta, xm),
            );
            for i in 0..2 {
                jac[i][k] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        // (JᵀJ + μ I) δ = −Jᵀ r
        let jtj = [
            [
                jac[0][0] * jac[0][0] + jac[1][0] * jac[1][0],
                jac[0][0] * jac[0][1] + jac[1][0] * jac[1][1],
            ],
            [
                jac[0][1] * jac[0][0] + jac[1][1] * jac[1][0],
                jac[0][1] * jac[0][1] + jac[1][1] * jac[1][1],
            ],
        ];
        let jtr = [
            jac[0][0] * r[0] + jac[1][0] * r[1],
            jac[0][1] * r[0] + jac[1][1] * r[1],
        ];
        let mut accepted = false;
        for _ in 0..30 {
            let a = [
                [jtj[0][0] + damping, jtj[0][1]],
                [jtj[1][0], jtj[1][1] + damping],
            ];
            let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            if det == 0.0 || !det.is_finite() {
                damping *= 10.0;
                continue;
            }
            let step = [
                -(a[1][1] * jtr[0] - a[0][1] * jtr[1]) / det,
                -(a[0][0] * jtr[1] - a[1][0] * jtr[0]) / det,
            ];
            let trial = [(x[0] + step[0]).max(FRAC_PI_2), x[1] + step[1]];
            let rt = scrofulous_residual(theta, trial);
            if norm(rt) < norm(r) {
                x = trial;
                r = rt;
                damping = (damping * 0.1).max(1e-15);
                accepted = true;
                break;
            }
            damping *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    let residual = norm(r);
    if residual.is_nan() || residual > SCROFULOUS_TOL {
        return Err(Error::Synthesis {
            message: format!(
                "SCROFULOUS root solve for theta = {theta} stalled at theta1 = {}, phi1 = {}",
                x[0], x[1]
            ),
            residual,
            iterations,
        });
    }
    let phi1 = x[1].rem_euclid(TAU);
    if !(phi1 > 0.0 && phi1 < PI) {
        return Err(Error::Synthesis {
            message: format!("SCROFULOUS root left the branch 0 < phi1 < pi (phi1 = {phi1})"),
            residual,
            iterations,
        });
    }
    Ok(ScrofulousSolution {
        theta1: x[0],
        phi1,
        phi2: phi1 - scrofulous_gap(x[0]),
        residual,
        iterations,
    })
}

fn scrofulous_pulses(theta: f64, phi: f64) -> Result<Vec<Pulse>> {
    // R(θ, φ) = −R(2π − θ, φ + π): solve the equivalent target with θ ≤ π
    let (reduced, axis) = if theta > PI {
        (TAU - theta, phi + PI)
    } else {
        (theta, phi)
    };
    let sol = solve_scrofulous(reduced)?;
    let outer = Pulse::new(sol.theta1, axis + sol.phi1)?;
    Ok(vec![outer, Pulse::new(PI, axis + sol.phi2)?, outer])
}

/// SCROFULOUS: a π pulse between two identical pulses, cancelling the
/// pulse-length error.
pub fn scrofulous(theta: f64, phi: f64) -> Result<PulseSequence> {
    if !(theta > 0.0 && theta < TAU) {
        return Err(Error::InvalidArgument(format!(
            "scrofulous: theta = {theta} outside (0, 2π)"
        )));
    }
    check_phi(phi)?;
    let pulses = scrofulous_pulses(theta, phi)?;
    PulseSequence::assemble(Family::Scrofulous, pulses, theta, phi, None)
}

/// CIS-CCCP: each SCROFULOUS pulse realised by a CORPSE with winding
/// n₁ − n₂ + n₃ = 0, cancelling both error channels.
pub fn cis_cccp(theta: f64, phi: f64, winding: [i64; 3]) -> Result<PulseSequence> {
    let [n1, n2, n3] = winding;
    if n1 - n2 + n3 != 0 {
        return Err(Error::InvalidArgument(format!(
            "cis-cccp winding must satisfy n1 - n2 + n3 = 0, got {winding:?}"
        )));
    }
    if !(theta > 0.0 && theta < TAU) {
        return Err(Error::InvalidArgument(format!(
            "cis-cccp: theta = {theta} outside (0, 2π)"
        )));
    }
    check_phi(phi)?;
    let mut pulses = Vec::with_capacity(9);
    for p in scrofulous_pulses(theta, phi)? {
        pulses.extend(corpse_pulses(p.theta, p.phi, winding)?);
    }
    PulseSequence::assemble(Family::CisCccp, pulses, theta, phi, Some(winding))
}

/// Reverse concatenation: the CORPSE pulses for (θ, φ), each realised by a
/// SCROFULOUS. Constituent angles are taken mod 2π, which only flips the
/// sign of the product.
pub fn scrofulous_in_corpse(theta: f64, phi: f64, winding: [i64; 3]) -> Result<PulseSequence> {
    check_theta(theta, 0.0, TAU, true, "scrofulous-in-corpse")?;
    check_phi(phi)?;
    let mut pulses = Vec::with_capacity(9);
    for p in corpse_pulses(theta, phi, winding)? {
        let reduced = p.theta.rem_euclid(TAU);
        pulses.extend(scrofulous_pulses(reduced, p.phi)?);
    }
    PulseSequence::assemble(
        Family::ScrofulousInCorpse,
        pulses,
        theta,
        phi,
        Some(winding),
    )
}

/// The three-pulse block (π, 2π, π) at azimuths (φ_pl, 3φ_pl, φ_pl), relative to `axis`.
pub fn pulse_length_block(phi_pl: f64, axis: f64) -> Vec<Pulse> {
    vec![
        Pulse::new(PI, axis + phi_pl).expect("finite"),
        Pulse::new(TAU, axis + 3.0 * phi_pl).expect("finite"),
        Pulse::new(PI, axis + phi_pl).expect("finite"),
    ]
}

/// The four π pulses at azimuths (π − φ_or, −φ_or, π + φ_or, φ_or), relative to `axis`.
pub fn off_resonance_block(phi_or: f64, axis: f64) -> Vec<Pulse> {
    [PI - phi_or, -phi_or, PI + phi_or, phi_or]
        .into_iter()
        .map(|a| Pulse::new(PI, axis + a).expect("finite"))
        .collect()
}

/// BB1: the target pulse followed by the pulse-length block with
/// cos φ_pl = −θ/(4π).
pub fn bb1(theta: f64, phi: f64) -> Result<PulseSequence> {
    check_theta(theta, 0.0, TAU, true, "bb1")?;
    check_phi(phi)?;
    let phi_pl = (-theta / (4.0 * PI)).acos();
    let mut pulses = vec![Pulse::new(theta, phi)?];
    pulses.extend(pulse_length_block(phi_pl, phi));
    PulseSequence::assemble(Family::Bb1, pulses, theta, phi, None)
}

/// φ_pl = φ_or = arccos(−1/4).
pub fn alway_jones_angle() -> f64 {
    (-0.25f64).acos()
}

/// The eight-pulse π rotation robust against both channels: target π pulse,
/// then the pulse-length block, then the off-resonance block.
pub fn alway_jones(phi_axis: f64) -> Result<PulseSequence> {
    check_phi(phi_axis)?;
    let a = alway_jones_angle();
    let mut pulses = vec![Pulse::new(PI, phi_axis)?];
    pulses.extend(pulse_length_block(a, phi_axis));
    pulses.extend(off_resonance_block(a, phi_axis));
    PulseSequence::assemble(Family::AlwayJones, pulses, PI, phi_axis, None)
}

/// Closed form of a product of xy-plane π pulses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReducedProduct {
    /// Odd count: a single π pulse at this azimuth.
    Pulse(Pulse),
    /// Even count: rotation about z, m = (0, 0, 2Θ).
    ZRotation(RotationVector),
}

impl ReducedProduct {
    pub fn rotation(&self) -> Unitary2 {
        match self {
            ReducedProduct::Pulse(p) => p.rotation(),
            ReducedProduct::ZRotation(m) => rotation(m),
        }
    }
}

/// Reduces R(π,φ_k)⋯R(π,φ_1) to one π pulse (k odd) or a z rotation by
/// 2Θ with Θ = Σ_j (φ_{2j} − φ_{2j−1} + π) (k even).
pub fn aj_product_reduce(phases: &[f64]) -> Result<ReducedProduct> {
    if phases.is_empty() {
        return Err(Error::InvalidArgument("no pulses to reduce".into()));
    }
    if let Some(bad) = phases.iter().find(|p| !p.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite azimuth {bad}")));
    }
    let pairs = phases.len() / 2;
    let big_theta: f64 = (0..pairs)
        .map(|j| phases[2 * j + 1] - phases[2 * j] + PI)
        .sum();
    if phases.len().is_multiple_of(2) {
        Ok(ReducedProduct::ZRotation(RotationVector::new(
            0.0,
            0.0,
            2.0 * big_theta,
        )))
    } else {
        // R(π, φ) R_z(2Θ) = R(π, φ − Θ)
        let last = phases[phases.len() - 1];
        Ok(ReducedProduct::Pulse(Pulse::new(PI, last - big_theta)?))
    }
}
