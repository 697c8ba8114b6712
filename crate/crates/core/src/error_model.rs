//! Systematic control errors and their first-order effect on a sequence.
//!
//! A pulse m^i = λ^i (t_i − t_{i−1}) with error δm^i becomes R(m^i + δm^i).
//! To first order R(m + δm) ≈ R(m)(I − i δW_I) with the interaction-picture
//! error δW_I = ∫₀¹ e^{ixW} δW e^{−ixW} dx, and a whole sequence picks up
//!
//! ```text
//! U_pert ≈ U (I − i ΔW),   ΔW = Σ_i V^{i−1}† δW_I^i V^{i−1},
//! ```
//!
//! where V^i = R(m^i)⋯R(m^1). The gate is robust against the error iff ΔW = 0.

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{composite_unit, gauss_legendre_unit};
use crate::sequences::PulseSequence;
use crate::su2::{
    frobenius, pauli, pauli_generator, rotation, HermitianGen, Mat2, RotationVector, Unitary2,
};

/// Per-unit-strength ‖ΔW‖_F at or below which a channel counts as compensated.
pub const ROBUST_TOL: f64 = 1e-10;

/// Node count for the interaction-picture integral when no closed form applies.
pub const DEFAULT_NODES: usize = 64;

/// Panels per pulse for the moment integrals.
pub const DEFAULT_SUBDIVISIONS: usize = 256;

/// Gauss–Legendre order used on each moment-integral panel.
const PANEL_ORDER: usize = 4;

const COMMUTE_TOL: f64 = 1e-12;

/// A systematic error specification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorChannel {
    /// δm = ε m.
    PulseLength { eps: f64 },
    /// δm = ε′ |m| ẑ.
    OffResonance { eps_prime: f64 },
    /// δm = ε m + ε′ |m| ẑ.
    Combined { eps: f64, eps_prime: f64 },
    /// δm_μ = f_μ + f_μν m_ν.
    GeneralLinear {
        constant: [f64; 3],
        linear: [[f64; 3]; 3],
    },
}

impl ErrorChannel {
    pub fn combined(eps: f64, eps_prime: f64) -> Self {
        ErrorChannel::Combined { eps, eps_prime }
    }

    /// Unit-strength pulse-length channel.
    pub const UNIT_PULSE_LENGTH: ErrorChannel = ErrorChannel::PulseLength { eps: 1.0 };
    /// Unit-strength off-resonance channel.
    pub const UNIT_OFF_RESONANCE: ErrorChannel = ErrorChannel::OffResonance { eps_prime: 1.0 };

    /// (ε, ε′); zero for the general channel.
    pub fn strengths(&self) -> (f64, f64) {
        match *self {
            ErrorChannel::PulseLength { eps } => (eps, 0.0),
            ErrorChannel::OffResonance { eps_prime } => (0.0, eps_prime),
            ErrorChannel::Combined { eps, eps_prime } => (eps, eps_prime),
            ErrorChannel::GeneralLinear { .. } => (0.0, 0.0),
        }
    }

    /// The same channel with every strength multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        match *self {
            ErrorChannel::PulseLength { eps } => ErrorChannel::PulseLength { eps: s * eps },
            ErrorChannel::OffResonance { eps_prime } => ErrorChannel::OffResonance {
                eps_prime: s * eps_prime,
            },
            ErrorChannel::Combined { eps, eps_prime } => ErrorChannel::Combined {
                eps: s * eps,
                eps_prime: s * eps_prime,
            },
            ErrorChannel::GeneralLinear { constant, linear } => ErrorChannel::GeneralLinear {
                constant: constant.map(|c| s * c),
                linear: linear.map(|row| row.map(|c| s * c)),
            },
        }
    }

    /// δm for a pulse m.
    pub fn delta_m(&self, m: &RotationVector) -> RotationVector {
        match *self {
            ErrorChannel::GeneralLinear { constant, linear } => {
                let mut out = constant;
                for (mu, row) in linear.iter().enumerate() {
                    out[mu] += row.iter().zip(m.0.iter()).map(|(f, x)| f * x).sum::<f64>();
                }
                RotationVector(out)
            }
            _ => {
                let (eps, eps_prime) = self.strengths();
                let mut out = m.scale(eps);
                out.0[2] += eps_prime * m.norm();
                out
            }
        }
    }
}

/// δW = δm_μ τ_μ for one pulse.
pub fn pulse_error(m: &RotationVector, ch: &ErrorChannel) -> HermitianGen {
    ch.delta_m(m).generator()
}

fn in_plane(m: &RotationVector) -> bool {
    m.0[2].abs() <= 1e-15 * m.norm().max(1.0)
}

/// Interaction-picture error δW_I of one pulse.
///
/// For xy-plane pulses under the NMR channels this is the closed form
/// δW_I = ε W + ε′ sin(θ/2) R(m)† σ₃, θ = |m|. A general channel whose δW
/// commutes with W passes through unchanged; everything else falls back to
/// quadrature with [`DEFAULT_NODES`] nodes.
pub fn interaction_error(m: &RotationVector, ch: &ErrorChannel) -> HermitianGen {
    match ch {
        ErrorChannel::GeneralLinear { .. } => {
            let dw = pulse_error(m, ch);
            if m.generator().commutator_norm(&dw) <= COMMUTE_TOL {
                dw
            } else {
                quadrature_unchecked(m, &dw, DEFAULT_NODES)
            }
        }
        _ if in_plane(m) => {
            let (eps, eps_prime) = ch.strengths();
            let w = m.generator().scale(eps);
            if eps_prime == 0.0 {
                return w;
            }
            let theta = m.norm();
            let sigma3 = pauli(3).expect("valid index");
            let off = rotation(m).adjoint().matrix()
                * sigma3
                * Complex64::new(eps_prime * (0.5 * theta).sin(), 0.0);
            w.add(&HermitianGen::from_matrix_unchecked(off))
        }
        _ => quadrature_unchecked(m, &pulse_error(m, ch), DEFAULT_NODES),
    }
}

/// Gauss–Legendre evaluation of ∫₀¹ e^{ixW} δW e^{−ixW} dx with W = m_μ τ_μ.
pub fn interaction_error_quadrature(
    m: &RotationVector,
    dw: &HermitianGen,
    nodes: usize,
) -> Result<HermitianGen> {
    if nodes < 2 {
        return Err(Error::InvalidArgument(format!(
            "quadrature needs at least 2 nodes, got {nodes}"
        )));
    }
    Ok(quadrature_unchecked(m, dw, nodes))
}

fn quadrature_unchecked(m: &RotationVector, dw: &HermitianGen, nodes: usize) -> HermitianGen {
    let mut acc = Mat2::zeros();
    for (x, w) in gauss_legendre_unit(nodes) {
        // e^{−ixW} = R(x m)
        let r = rotation(&m.scale(x));
        acc += r.conjugate(dw).matrix() * Complex64::new(w, 0.0);
    }
    HermitianGen::from_matrix_unchecked(acc)
}

fn require_nonempty(seq: &PulseSequence) -> Result<()> {
    if seq.is_empty() {
        Err(Error::InvalidArgument("sequence has no pulses".into()))
    } else {
        Ok(())
    }
}

/// ΔW = Σ_i V^{i−1}† δW_I^i V^{i−1} for a list of rotation vectors.
pub fn delta_w_of(ms: &[RotationVector], ch: &ErrorChannel) -> HermitianGen {
    let mut v = Unitary2::identity();
    let mut total = HermitianGen::zero();
    for m in ms {
        total = total.add(&v.conjugate(&interaction_error(m, ch)));
        v = rotation(m) * v;
    }
    total
}

/// First-order error generator of a sequence and its channel breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrderReport {
    /// ΔW for the requested channel and strengths.
    pub delta_w: HermitianGen,
    /// ‖ΔW‖_F per unit ε.
    pub pulse_length_norm: f64,
    /// ‖ΔW‖_F per unit ε′.
    pub off_resonance_norm: f64,
    pub pulse_length_robust: bool,
    pub off_resonance_robust: bool,
}

impl FirstOrderReport {
    pub fn norm(&self) -> f64 {
        self.delta_w.norm()
    }
}

pub fn accumulate_delta_w(seq: &PulseSequence, ch: &ErrorChannel) -> Result<FirstOrderReport> {
    require_nonempty(seq)?;
    let ms = seq.rotation_vectors();
    let pulse_length_norm = delta_w_of(&ms, &ErrorChannel::UNIT_PULSE_LENGTH).norm();
    let off_resonance_norm = delta_w_of(&ms, &ErrorChannel::UNIT_OFF_RESONANCE).norm();
    Ok(FirstOrderReport {
        delta_w: delta_w_of(&ms, ch),
        pulse_length_norm,
        off_resonance_norm,
        pulse_length_robust: pulse_length_norm <= ROBUST_TOL,
        off_resonance_robust: off_resonance_norm <= ROBUST_TOL,
    })
}

/// ΔW = Σ_i V^{i−1}† δW^i V^{i−1}, valid when every δW^i commutes with its
/// W^i (for the pulse-length channel, ε Σ_i V^{i−1}† W^i V^{i−1}).
pub fn delta_w_commuting(seq: &PulseSequence, ch: &ErrorChannel) -> Result<HermitianGen> {
    require_nonempty(seq)?;
    let mut v = Unitary2::identity();
    let mut total = HermitianGen::zero();
    for (i, m) in seq.rotation_vectors().iter().enumerate() {
        let dw = pulse_error(m, ch);
        let c = m.generator().commutator_norm(&dw);
        if c > COMMUTE_TOL {
            return Err(Error::InvalidArgument(format!(
                "error on pulse {} does not commute with its generator (‖[W, δW]‖ = {c:.3e})",
                i + 1
            )));
        }
        total = total.add(&v.conjugate(&dw));
        v = rotation(m) * v;
    }
    Ok(total)
}

/// S and T of a three-pulse sequence, defined by U ΔW = ε R(m³) S + ε′ T.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StDecomposition {
    pub s: Mat2,
    pub t: Mat2,
}

pub fn st_decomposition(seq: &PulseSequence) -> Result<StDecomposition> {
    if seq.len() != 3 {
        return Err(Error::InvalidArgument(format!(
            "S/T decomposition needs exactly 3 pulses, got {}",
            seq.len()
        )));
    }
    let ms = seq.rotation_vectors();
    if let Some(i) = ms.iter().position(|m| !in_plane(m)) {
        return Err(Error::InvalidArgument(format!(
            "pulse {} is not in the xy-plane",
            i + 1
        )));
    }
    let r: Vec<Mat2> = ms.iter().map(|m| *rotation(m).matrix()).collect();
    let w: Vec<Mat2> = ms.iter().map(|m| *m.generator().matrix()).collect();
    let sin_half: Vec<Complex64> = ms
        .iter()
        .map(|m| Complex64::new((0.5 * m.norm()).sin(), 0.0))
        .collect();
    let sigma3 = pauli(3)?;
    let s = w[2] * r[1] * r[0] + r[1] * w[1] * r[0] + r[1] * r[0] * w[0];
    let t = sigma3 * r[1] * r[0] * sin_half[2]
        + r[2] * sigma3 * r[0] * sin_half[1]
        + r[2] * r[1] * sigma3 * sin_half[0];
    Ok(StDecomposition { s, t })
}

/// Error-moment integrals of a piecewise-constant drive on t ∈ [0, 1].
///
/// With τ̃_μ(t) = U(t)† τ_μ U(t):
/// * `first[(μ, ρ)]` = 2 Tr[(∫ τ̃_μ dt) τ_ρ],
/// * `second[ρ][(μ, ν)]` = 2 Tr[(∫ τ̃_μ λ_ν dt) τ_ρ].
///
/// The second moment does not depend on how the pulses are laid out in time;
/// the first does.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentIntegrals {
    pub first: Matrix3<f64>,
    pub second: [Matrix3<f64>; 3],
}

impl MomentIntegrals {
    /// τ-components of ∫ τ̃_μ λ_μ dt = ∫ U† H U dt.
    pub fn trace_part(&self) -> [f64; 3] {
        self.second.map(|m| m.trace())
    }

    /// Irreducible split of each operator component of the second moment.
    pub fn decompose_second(&self) -> [IrreducibleParts; 3] {
        self.second.map(|m| irreducible_decompose(&m))
    }
}

/// Moment integrals with pulse durations proportional to |m^i|.
pub fn error_moment_integrals(seq: &PulseSequence, subdivisions: usize) -> Result<MomentIntegrals> {
    require_nonempty(seq)?;
    let durations: Vec<f64> = seq.rotation_vectors().iter().map(|m| m.norm()).collect();
    moments(seq, &durations, subdivisions)
}

/// Moment integrals with explicit (positive, later normalised) pulse durations.
pub fn error_moment_integrals_with_durations(
    seq: &PulseSequence,
    durations: &[f64],
    subdivisions: usize,
) -> Result<MomentIntegrals> {
    require_nonempty(seq)?;
    if durations.len() != seq.len() {
        return Err(Error::InvalidArgument(format!(
            "{} durations given for {} pulses",
            durations.len(),
            seq.len()
        )));
    }
    if durations.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
        return Err(Error::InvalidArgument("durations must be positive".into()));
    }
    moments(seq, durations, subdivisions)
}

fn moments(seq: &PulseSequence, durations: &[f64], subdivisions: usize) -> Result<MomentIntegrals> {
    if subdivisions == 0 {
        return Err(Error::InvalidArgument(
            "subdivisions must be positive".into(),
        ));
    }
    let total: f64 = durations.iter().sum();
    let mut first = Matrix3::zeros();
    let mut second = [Matrix3::zeros(); 3];
    if total == 0.0 {
        return Ok(MomentIntegrals { first, second });
    }
    let taus: Vec<HermitianGen> = (1..=3)
        .map(|k| pauli_generator(k).expect("valid index"))
        .collect();
    let rule = composite_unit(subdivisions, PANEL_ORDER);
    let mut v = Unitary2::identity();
    for (m, &d) in seq.rotation_vectors().iter().zip(durations) {
        if m.norm() == 0.0 {
            continue;
        }
        let fraction = d / total;
        // average over the pulse of the adjoint action: avg[μ][ρ] = ∫₀¹ 2Tr(U†τ_μU τ_ρ) dx
        let mut avg = Matrix3::<f64>::zeros();
        for &(x, w) in &rule {
            let u = rotation(&m.scale(x)) * v;
            for (mu, tau) in taus.iter().enumerate() {
                let c = u.conjugate(tau).coefficients();
                for rho in 0..3 {
                    avg[(mu, rho)] += w * c[rho];
                }
            }
        }
        // ∫ τ̃_μ dt over the pulse = duration × average;
        // ∫ τ̃_μ λ_ν dt = m_ν × average since λ = m / duration
        first += avg * fraction;
        for (rho, block) in second.iter_mut().enumerate() {
            for mu in 0..3 {
                for nu in 0..3 {
                    block[(mu, nu)] += avg[(mu, rho)] * m.0[nu];
                }
            }
        }
        v = rotation(m) * v;
    }
    Ok(MomentIntegrals { first, second })
}

/// M = (trace/3) I + antisymmetric + symmetric-traceless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrreducibleParts {
    pub trace: f64,
    pub antisymmetric: Matrix3<f64>,
    pub symmetric_traceless: Matrix3<f64>,
}

impl IrreducibleParts {
    pub fn reconstruct(&self) -> Matrix3<f64> {
        Matrix3::identity() * (self.trace / 3.0) + self.antisymmetric + self.symmetric_traceless
    }
}

/// Splits a real 3×3 tensor into its isotropic, antisymmetric and
/// symmetric-traceless parts.
pub fn irreducible_decompose(m: &Matrix3<f64>) -> IrreducibleParts {
    let trace = m.trace();
    let antisymmetric = (m - m.transpose()) * 0.5;
    let mut symmetric_traceless = (m + m.transpose()) * 0.5;
    for k in 0..3 {
        symmetric_traceless[(k, k)] -= trace / 3.0;
    }
    IrreducibleParts {
        trace,
        antisymmetric,
        symmetric_traceless,
    }
}

/// Exact perturbed gate R(m^k + δm^k)⋯R(m^1 + δm^1).
pub fn perturbed_propagator(seq: &PulseSequence, ch: &ErrorChannel) -> Unitary2 {
    perturbed_product(&seq.rotation_vectors(), ch)
}

pub fn perturbed_product(ms: &[RotationVector], ch: &ErrorChannel) -> Unitary2 {
    ms.iter().fold(Unitary2::identity(), |acc, m| {
        rotation(&m.add(&ch.delta_m(m))) * acc
    })
}

/// Exact gate under the NMR error pair (ε, ε′).
pub fn finite_difference_propagator(seq: &PulseSequence, eps: f64, eps_prime: f64) -> Unitary2 {
    perturbed_propagator(seq, &ErrorChannel::combined(eps, eps_prime))
}

/// Central-difference estimate of ΔW: the Hermitian part of
/// i U†(U(+h) − U(−h))/(2h), where U(±h) is the exact gate with the channel
/// scaled by ±h.
pub fn first_order_oracle(
    seq: &PulseSequence,
    ch: &ErrorChannel,
    step: f64,
) -> Result<HermitianGen> {
    require_nonempty(seq)?;
    if !(step > 0.0 && step <= 1e-3) {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step must lie in (0, 1e-3], got {step}"
        )));
    }
    Ok(fd_generator(&seq.rotation_vectors(), ch, step))
}

pub(crate) fn fd_generator(ms: &[RotationVector], ch: &ErrorChannel, step: f64) -> HermitianGen {
    let u = perturbed_product(ms, &ch.scaled(0.0));
    let plus = perturbed_product(ms, &ch.scaled(step));
    let minus = perturbed_product(ms, &ch.scaled(-step));
    let x = u.matrix().adjoint()
        * (plus.matrix() - minus.matrix())
        * Complex64::new(0.0, 1.0 / (2.0 * step));
    let mut h = (x + x.adjoint()) * Complex64::new(0.5, 0.0);
    let tr = (h[(0, 0)] + h[(1, 1)]) * 0.5;
    h[(0, 0)] -= tr;
    h[(1, 1)] -= tr;
    HermitianGen::from_matrix_unchecked(h)
}

/// ‖A − B‖_F for two generators.
pub fn distance(a: &HermitianGen, b: &HermitianGen) -> f64 {
    frobenius(&(a.matrix() - b.matrix()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{corpse, plain, scrofulous, CORPSE_WINDING};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

    fn sig(k: usize) -> Mat2 {
        pauli(k).unwrap()
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn pulse_error_terms() {
        let m = RotationVector::new(PI, 0.0, 0.0);
        let a = pulse_error(&m, &ErrorChannel::PulseLength { eps: 0.1 });
        assert!(frobenius(&(a.matrix() - sig(1) * c(0.1 * PI / 2.0))) < 1e-15);
        let b = pulse_error(&m, &ErrorChannel::OffResonance { eps_prime: 0.1 });
        assert!(frobenius(&(b.matrix() - sig(3) * c(0.1 * PI / 2.0))) < 1e-15);
        let z = pulse_error(&m, &ErrorChannel::combined(0.0, 0.0));
        assert_eq!(z.norm(), 0.0);
    }

    #[test]
    fn general_linear_pulse_error() {
        let m = RotationVector::new(1.0, 2.0, 3.0);
        let ch = ErrorChannel::GeneralLinear {
            constant: [0.1, 0.0, -0.2],
            linear: [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.5, 0.0]],
        };
        let got = pulse_error(&m, &ch).coefficients();
        let want = [1.1, 3.0, 0.8];
        for k in 0..3 {
            assert!((got[k] - want[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn off_resonance_vanishes_for_two_pi_pulse() {
        let m = RotationVector::new(TAU, 0.0, 0.0);
        let ch = ErrorChannel::OffResonance { eps_prime: 0.7 };
        assert!(interaction_error(&m, &ch).norm() < 1e-15);
        let q = interaction_error_quadrature(&m, &pulse_error(&m, &ch), 64).unwrap();
        assert!(q.norm() < 1e-14);
    }

    #[test]
    fn pulse_length_commutes_through() {
        let m = RotationVector::new(PI, 0.0, 0.0);
        let got = interaction_error(&m, &ErrorChannel::PulseLength { eps: 0.1 });
        assert!(frobenius(&(got.matrix() - sig(1) * c(0.1 * PI / 2.0))) < 1e-15);
    }

    #[test]
    fn quarter_turn_off_resonance_closed_form() {
        let m = RotationVector::new(FRAC_PI_2, 0.0, 0.0);
        let got = interaction_error(&m, &ErrorChannel::OffResonance { eps_prime: 1.0 });
        let s = FRAC_PI_4.sin();
        let want = (sig(3) * c(FRAC_PI_4.cos()) + sig(2) * c(s)) * c(s);
        assert!(frobenius(&(got.matrix() - want)) < 1e-15);
        let q = interaction_error_quadrature(
            &m,
            &HermitianGen::from_coefficients([0.0, 0.0, FRAC_PI_2]),
            64,
        )
        .unwrap();
        assert!(frobenius(&(q.matrix() - want)) < 1e-12);
    }

    #[test]
    fn quadrature_rejects_single_node_and_zero_is_zero() {
        let m = RotationVector::new(0.4, 0.2, 0.0);
        assert!(interaction_error_quadrature(&m, &HermitianGen::zero(), 1).is_err());
        let q = interaction_error_quadrature(&m, &HermitianGen::zero(), 8).unwrap();
        assert_eq!(q.norm(), 0.0);
    }

    #[test]
    fn single_pulse_delta_w() {
        let s = plain(PI, 0.0).unwrap();
        let r = accumulate_delta_w(&s, &ErrorChannel::PulseLength { eps: 0.2 }).unwrap();
        assert!(frobenius(&(r.delta_w.matrix() - sig(1) * c(0.2 * PI / 2.0))) < 1e-15);
        assert!(!r.pulse_length_robust && !r.off_resonance_robust);
        let dc = delta_w_commuting(&s, &ErrorChannel::PulseLength { eps: 0.2 }).unwrap();
        assert!(distance(&dc, &r.delta_w) < 1e-15);
    }

    #[test]
    fn commuting_formula_rejects_off_resonance() {
        let s = plain(PI, 0.0).unwrap();
        assert!(matches!(
            delta_w_commuting(&s, &ErrorChannel::OffResonance { eps_prime: 0.1 }),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn scrofulous_commuting_delta_w_vanishes() {
        let s = scrofulous(PI, 0.0).unwrap();
        let dw = delta_w_commuting(&s, &ErrorChannel::UNIT_PULSE_LENGTH).unwrap();
        assert!(dw.norm() < 1e-10);
    }

    #[test]
    fn st_golden_values() {
        let c_pi = corpse(PI, 0.0, CORPSE_WINDING).unwrap();
        assert!(frobenius(&st_decomposition(&c_pi).unwrap().t) < 1e-10);
        let s_pi = scrofulous(PI, 0.0).unwrap();
        let st = st_decomposition(&s_pi).unwrap();
        assert!(frobenius(&st.s) < 1e-10);
        // T differs from σ₃ sin(π/2)
        assert!(frobenius(&(st.t - sig(3))) > 0.1);
    }

    #[test]
    fn st_needs_three_pulses() {
        assert!(st_decomposition(&plain(PI, 0.0).unwrap()).is_err());
    }

    #[test]
    fn moments_of_plain_pulse() {
        let s = plain(PI, 0.0).unwrap();
        let mi = error_moment_integrals(&s, 64).unwrap();
        let tr = mi.trace_part();
        assert!((tr[0] - PI).abs() < 1e-12 && tr[1].abs() < 1e-12 && tr[2].abs() < 1e-12);
    }

    #[test]
    fn moments_of_zero_pulse_vanish() {
        let s = plain(0.0, 0.0).unwrap();
        let mi = error_moment_integrals(&s, 16).unwrap();
        assert_eq!(mi.first, Matrix3::zeros());
        assert!(mi.second.iter().all(|m| *m == Matrix3::zeros()));
    }

    #[test]
    fn irreducible_parts_of_identity_and_antisymmetric() {
        let p = irreducible_decompose(&Matrix3::identity());
        assert_eq!(p.trace, 3.0);
        assert_eq!(p.antisymmetric, Matrix3::zeros());
        assert_eq!(p.symmetric_traceless, Matrix3::zeros());
        let a = Matrix3::new(0.0, 1.0, -2.0, -1.0, 0.0, 3.0, 2.0, -3.0, 0.0);
        let p = irreducible_decompose(&a);
        assert_eq!(p.trace, 0.0);
        assert_eq!(p.antisymmetric, a);
        assert_eq!(p.symmetric_traceless, Matrix3::zeros());
    }

    #[test]
    fn fd_propagator_definitions() {
        let s = plain(PI, 0.0).unwrap();
        let a = finite_difference_propagator(&s, 0.05, 0.0);
        let b = rotation(&RotationVector::new(PI * 1.05, 0.0, 0.0));
        assert!(frobenius(&(a.matrix() - b.matrix())) < 1e-15);
        let a = finite_difference_propagator(&s, 0.0, 0.05);
        let b = rotation(&RotationVector::new(PI, 0.0, 0.05 * PI));
        assert!(frobenius(&(a.matrix() - b.matrix())) < 1e-15);
        assert_eq!(
            finite_difference_propagator(&s, 0.0, 0.0),
            s.ideal_product()
        );
    }

    #[test]
    fn oracle_step_validation() {
        let s = plain(PI, 0.0).unwrap();
        assert!(first_order_oracle(&s, &ErrorChannel::UNIT_PULSE_LENGTH, 0.0).is_err());
        assert!(first_order_oracle(&s, &ErrorChannel::UNIT_PULSE_LENGTH, 1e-2).is_err());
        let g = first_order_oracle(&s, &ErrorChannel::UNIT_PULSE_LENGTH, 1e-5).unwrap();
        assert!(frobenius(&(g.matrix() - sig(1) * c(PI / 2.0))) < 1e-4);
    }
}
