//! Exact 2×2 special-unitary algebra.
//!
//! Conventions: generators are τ_μ = σ_μ/2 and a rotation vector m maps to
//! R(m) = exp(−i m_μ τ_μ) = cos(|m|/2) I − i sin(|m|/2) (m̂·σ). All angles
//! are in radians.

use std::fmt;
use std::ops::Mul;

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Mat2 = Matrix2<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Tolerance used when validating user-supplied matrices.
pub const VALIDATION_TOL: f64 = 1e-10;

/// Below this norm the rotation exponential switches to its Taylor series.
const SMALL_ANGLE: f64 = 1e-12;

/// Off-diagonal magnitude below which a unitary is treated as diagonal.
const DIAGONAL_TOL: f64 = 1e-14;

/// Pauli matrix σ_index for index in 1..=3.
pub fn pauli(index: usize) -> Result<Mat2> {
    match index {
        1 => Ok(Mat2::new(ZERO, ONE, ONE, ZERO)),
        2 => Ok(Mat2::new(ZERO, -I, I, ZERO)),
        3 => Ok(Mat2::new(ONE, ZERO, ZERO, -ONE)),
        _ => Err(Error::InvalidArgument(format!(
            "Pauli index must be 1, 2 or 3, got {index}"
        ))),
    }
}

fn sigma(index: usize) -> Mat2 {
    pauli(index).expect("index in 1..=3")
}

/// m·σ for a real 3-vector.
fn dot_sigma(v: [f64; 3]) -> Mat2 {
    let [x, y, z] = v;
    Mat2::new(
        Complex64::new(z, 0.0),
        Complex64::new(x, -y),
        Complex64::new(x, y),
        Complex64::new(-z, 0.0),
    )
}

/// Frobenius norm of an arbitrary 2×2 complex matrix.
pub fn frobenius(m: &Mat2) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Real rotation vector m = (m₁, m₂, m₃).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationVector(pub [f64; 3]);

impl RotationVector {
    pub const ZERO: RotationVector = RotationVector([0.0; 3]);

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        RotationVector([x, y, z])
    }

    /// θ(cos φ, sin φ, 0).
    pub fn in_plane(theta: f64, phi: f64) -> Self {
        RotationVector([theta * phi.cos(), theta * phi.sin(), 0.0])
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        RotationVector(self.0.map(|c| c * s))
    }

    pub fn add(&self, other: &RotationVector) -> Self {
        let [a, b, c] = self.0;
        let [x, y, z] = other.0;
        RotationVector([a + x, b + y, c + z])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// W = m_μ τ_μ.
    pub fn generator(&self) -> HermitianGen {
        HermitianGen::from_coefficients(self.0)
    }
}

/// A 2×2 unitary matrix. Constructors from rotation vectors give det = +1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2(Mat2);

impl Unitary2 {
    pub fn identity() -> Self {
        Unitary2(Mat2::identity())
    }

    /// Validates U†U = I within [`VALIDATION_TOL`].
    pub fn from_matrix(m: Mat2) -> Result<Self> {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NotUnitary {
                deviation: f64::INFINITY,
            });
        }
        let deviation = frobenius(&(m.adjoint() * m - Mat2::identity()));
        if deviation > VALIDATION_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Unitary2(m))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Unitary2(self.0.adjoint())
    }

    pub fn det(&self) -> Complex64 {
        self.0[(0, 0)] * self.0[(1, 1)] - self.0[(0, 1)] * self.0[(1, 0)]
    }

    pub fn trace(&self) -> Complex64 {
        self.0[(0, 0)] + self.0[(1, 1)]
    }

    /// Scalar multiple by a unit-modulus phase e^{iα}.
    pub fn with_phase(&self, alpha: f64) -> Self {
        Unitary2(self.0 * Complex64::from_polar(1.0, alpha))
    }

    /// ‖U†U − I‖_F.
    pub fn unitarity_defect(&self) -> f64 {
        frobenius(&(self.0.adjoint() * self.0 - Mat2::identity()))
    }

    /// U† H U, i.e. H expressed in the frame moved by U.
    pub fn conjugate(&self, h: &HermitianGen) -> HermitianGen {
        HermitianGen(self.0.adjoint() * h.0 * self.0)
    }
}

impl Mul for Unitary2 {
    type Output = Unitary2;
    fn mul(self, rhs: Unitary2) -> Unitary2 {
        Unitary2(self.0 * rhs.0)
    }
}

impl Mul for &Unitary2 {
    type Output = Unitary2;
    fn mul(self, rhs: &Unitary2) -> Unitary2 {
        Unitary2(self.0 * rhs.0)
    }
}

impl fmt::Display for Unitary2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            m[(0, 0)],
            m[(0, 1)],
            m[(1, 0)],
            m[(1, 1)]
        )
    }
}

/// Traceless Hermitian 2×2 matrix, an element of su(2) up to the factor −i.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianGen(Mat2);

impl HermitianGen {
    pub fn zero() -> Self {
        HermitianGen(Mat2::zeros())
    }

    /// Validates H = H† and Tr H = 0 within [`VALIDATION_TOL`].
    pub fn from_matrix(m: Mat2) -> Result<Self> {
        let herm = frobenius(&(m - m.adjoint()));
        let tr = (m[(0, 0)] + m[(1, 1)]).norm();
        if herm > VALIDATION_TOL || tr > VALIDATION_TOL {
            return Err(Error::InvalidArgument(format!(
                "matrix is not traceless Hermitian (‖H − H†‖ = {herm:.3e}, |Tr H| = {tr:.3e})"
            )));
        }
        Ok(HermitianGen(m))
    }

    pub(crate) fn from_matrix_unchecked(m: Mat2) -> Self {
        HermitianGen(m)
    }

    /// Σ_μ c_μ τ_μ.
    pub fn from_coefficients(c: [f64; 3]) -> Self {
        HermitianGen(dot_sigma(c) * Complex64::new(0.5, 0.0))
    }

    /// Coefficients c_μ = 2 Tr(H τ_μ) so that H = c_μ τ_μ.
    pub fn coefficients(&self) -> [f64; 3] {
        let m = &self.0;
        [
            m[(0, 1)].re + m[(1, 0)].re,
            m[(1, 0)].im - m[(0, 1)].im,
            m[(0, 0)].re - m[(1, 1)].re,
        ]
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        frobenius(&self.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianGen(self.0 * Complex64::new(s, 0.0))
    }

    pub fn add(&self, other: &HermitianGen) -> Self {
        HermitianGen(self.0 + other.0)
    }

    pub fn sub(&self, other: &HermitianGen) -> Self {
        HermitianGen(self.0 - other.0)
    }

    /// ‖[A, B]‖_F.
    pub fn commutator_norm(&self, other: &HermitianGen) -> f64 {
        frobenius(&(self.0 * other.0 - other.0 * self.0))
    }

    /// ‖H − H†‖_F + |Tr H|.
    pub fn hermiticity_defect(&self) -> f64 {
        frobenius(&(self.0 - self.0.adjoint())) + (self.0[(0, 0)] + self.0[(1, 1)]).norm()
    }

    /// ⟨ψ|H|ψ⟩ for a (normalised) state.
    pub fn expectation(&self, psi: &[Complex64; 2]) -> f64 {
        let m = &self.0;
        let h0 = m[(0, 0)] * psi[0] + m[(0, 1)] * psi[1];
        let h1 = m[(1, 0)] * psi[0] + m[(1, 1)] * psi[1];
        (psi[0].conj() * h0 + psi[1].conj() * h1).re
    }
}

/// τ_index = σ_index / 2.
pub fn pauli_generator(index: usize) -> Result<HermitianGen> {
    Ok(HermitianGen(pauli(index)? * Complex64::new(0.5, 0.0)))
}

/// R(m) = exp(−i m_μ τ_μ).
pub fn rotation(m: &RotationVector) -> Unitary2 {
    let angle = m.norm();
    let half = 0.5 * angle;
    // sin(|m|/2)/|m|, with its Taylor limit near zero
    let s = if angle < SMALL_ANGLE {
        0.5 * (1.0 - angle * angle / 24.0)
    } else {
        half.sin() / angle
    };
    let c = half.cos();
    let [x, y, z] = m.0.map(|v| v * s);
    // c I − i (x σ₁ + y σ₂ + z σ₃)
    Unitary2(Mat2::new(
        Complex64::new(c, -z),
        Complex64::new(-y, -x),
        Complex64::new(y, -x),
        Complex64::new(c, z),
    ))
}

/// Quaternion-like components (a₀, a) of U = a₀ I − i a·σ for U ∈ SU(2).
fn su2_components(u: &Mat2) -> (f64, [f64; 3]) {
    let a0 = 0.5 * (u[(0, 0)] + u[(1, 1)]).re;
    // a_k = (i/2) Tr(U σ_k)
    let t1 = u[(0, 1)] + u[(1, 0)];
    let t2 = I * (u[(0, 1)] - u[(1, 0)]);
    let t3 = u[(0, 0)] - u[(1, 1)];
    let a = [t1, t2, t3].map(|t| (0.5 * I * t).re);
    (a0, a)
}

/// Principal logarithm: returns m with |m| ∈ [0, 2π) such that
/// rotation(m) = U. The matrix −I is reported as (0, 0, 2π).
pub fn log_rotation(u: &Unitary2) -> Result<RotationVector> {
    let deviation = u.unitarity_defect() + (u.det() - ONE).norm();
    if deviation.is_nan() || deviation > VALIDATION_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    let (a0, a) = su2_components(u.matrix());
    let sin_half = a.iter().map(|c| c * c).sum::<f64>().sqrt();
    if sin_half == 0.0 {
        return Ok(if a0 < 0.0 {
            RotationVector([0.0, 0.0, 2.0 * std::f64::consts::PI])
        } else {
            RotationVector::ZERO
        });
    }
    let angle = 2.0 * sin_half.atan2(a0);
    Ok(RotationVector(a.map(|c| c * angle / sin_half)))
}

/// F = ½ |Tr(U†V)|, clamped to [0, 1].
pub fn fidelity(u: &Unitary2, v: &Unitary2) -> f64 {
    let tr = (u.0.adjoint() * v.0).trace();
    (0.5 * tr.norm()).min(1.0)
}

/// 1 − F computed without cancellation: for W = U†V unitary,
/// 1 − F = (Σ_k |Tr(W σ_k)|²/4) / (1 + F).
pub fn infidelity(u: &Unitary2, v: &Unitary2) -> f64 {
    let w = u.0.adjoint() * v.0;
    let f = 0.5 * w.trace().norm();
    let vector_part: f64 = (1..=3)
        .map(|k| 0.25 * (w * sigma(k)).trace().norm_sqr())
        .sum();
    vector_part / (1.0 + f.min(1.0))
}

/// One eigenpair of a unitary: U v = e^{iγ} v.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenpair {
    /// γ ∈ (−π, π].
    pub phase: f64,
    pub vector: [Complex64; 2],
}

/// Wraps an angle into (−π, π].
pub fn wrap_phase(x: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    y
}

fn normalise(v: [Complex64; 2]) -> [Complex64; 2] {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    // fix the gauge: leading component real and non-negative
    let lead = if v[0].norm() > 1e-12 * n { v[0] } else { v[1] };
    let gauge = lead.conj() / lead.norm();
    [v[0] * gauge / n, v[1] * gauge / n]
}

/// Spectral decomposition of a 2×2 unitary.
///
/// Diagonal input (including the degenerate U = e^{iγ} I) returns the
/// computational basis in order. Otherwise the pairs are sorted by
/// ascending phase and each eigenvector is gauged so its first nonzero
/// component is real and positive.
pub fn eig_unitary(u: &Unitary2) -> [Eigenpair; 2] {
    let m = u.matrix();
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    if b.norm() <= DIAGONAL_TOL && c.norm() <= DIAGONAL_TOL {
        return [
            Eigenpair {
                phase: wrap_phase(a.arg()),
                vector: [ONE, ZERO],
            },
            Eigenpair {
                phase: wrap_phase(d.arg()),
                vector: [ZERO, ONE],
            },
        ];
    }
    let half_tr = 0.5 * (a + d);
    let disc = (0.25 * (a - d) * (a - d) + b * c).sqrt();
    let mut pairs = [half_tr + disc, half_tr - disc].map(|lambda| {
        // (b, λ − a) and (λ − d, c) both solve (U − λ)v = 0; keep the better-conditioned one
        let v1 = [b, lambda - a];
        let v2 = [lambda - d, c];
        let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
        let n2 = v2[0].norm_sqr() + v2[1].norm_sqr();
        Eigenpair {
            phase: wrap_phase(lambda.arg()),
            vector: normalise(if n1 >= n2 { v1 } else { v2 }),
        }
    });
    if pairs[0].phase > pairs[1].phase {
        pairs.swap(0, 1);
    }
    pairs
}
