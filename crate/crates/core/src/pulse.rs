//! Drive-pulse propagators.
//!
//! Two models are available. [`exact_pulse_propagator`] exponentiates the
//! full rotating-frame Hamiltonian, zero-field term included. The hard-pulse
//! model drops `D_gs·Sz²` during the pulse but keeps the longitudinal offset,
//! so the pulse becomes a rotation about a tilted axis:
//!
//! ```text
//! H_p = −(δ + 2D_gs)·Sz + ω₁·Sx = Ω_Rabi·(cos β·Sz + sin β·Sx)
//! U_p = d(β) · diag(e^{−3iθ/2}, e^{−iθ/2}, e^{iθ/2}, e^{3iθ/2}) · d(−β),   θ = Ω_Rabi·τ_p
//! ```
//!
//! with `d(β) = exp(−iβ·Sy)` the j = 3/2 Wigner small-d matrix. Writing the
//! product as `d(−β')·Λ·d(β')` with `β' = −β ∈ (−π, 0)` gives the same
//! matrix; the closed-form element expressions are stated in that primed
//! angle.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{QuditError, Result};
use crate::hamiltonian::{rotating_hamiltonian_with_phase, SpinParams};
use crate::linalg::{propagator, spin_operators, ComplexMatrix4};
use crate::units::ns_to_us;

/// Pulse propagator model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PulseModel {
    #[default]
    Exact,
    Hard,
}

impl PulseModel {
    pub fn name(self) -> &'static str {
        match self {
            PulseModel::Exact => "exact",
            PulseModel::Hard => "hard",
        }
    }
}

/// A square drive pulse. `duration` is in µs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseParams {
    pub spin: SpinParams,
    pub duration: f64,
    /// Microwave phase of the drive axis in the xy-plane.
    pub phase: f64,
}

impl PulseParams {
    pub fn new(spin: SpinParams, duration: f64) -> Self {
        PulseParams {
            spin,
            duration,
            phase: 0.0,
        }
    }

    pub fn from_ns(spin: SpinParams, duration_ns: f64) -> Self {
        Self::new(spin, ns_to_us(duration_ns))
    }

    pub fn with_phase(self, phase: f64) -> Self {
        PulseParams { phase, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration >= 0.0) || !self.duration.is_finite() {
            return Err(QuditError::InvalidParameter(format!(
                "pulse duration must be finite and >= 0, got {}",
                self.duration
            )));
        }
        if !(self.spin.omega1 >= 0.0) {
            return Err(QuditError::InvalidParameter(format!(
                "drive amplitude must be >= 0, got {}",
                self.spin.omega1
            )));
        }
        Ok(())
    }
}

/// Duration `π / (2ω₁)` of a resonant quarter rotation (µs).
pub fn resonant_half_pi_duration(omega1: f64) -> f64 {
    FRAC_PI_2 / omega1
}

/// Effective rotation of the hard-pulse model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HardPulseFrame {
    pub omega_rabi: f64,
    /// Tilt of the rotation axis from +z toward +x, in `(0, π]` for `ω₁ > 0`.
    pub beta: f64,
    /// Rotation angle `Ω_Rabi·τ_p`.
    pub theta: f64,
}

pub fn hard_pulse_frame(spin: &SpinParams, duration: f64) -> Result<HardPulseFrame> {
    let longitudinal = -(spin.delta + 2.0 * spin.dgs);
    let omega_rabi = longitudinal.hypot(spin.omega1);
    if omega_rabi == 0.0 {
        return Err(QuditError::DegenerateFrame);
    }
    Ok(HardPulseFrame {
        omega_rabi,
        beta: spin.omega1.atan2(longitudinal),
        theta: omega_rabi * duration,
    })
}

/// Wigner small-d matrix `⟨m'|exp(−iβ·Sy)|m⟩` for j = 3/2. Real orthogonal.
pub fn wigner_small_d(beta: f64) -> ComplexMatrix4 {
    let (s, c) = (0.5 * beta).sin_cos();
    let r3 = 3.0_f64.sqrt();
    ComplexMatrix4::from_real([
        [c * c * c, -r3 * c * c * s, r3 * c * s * s, -s * s * s],
        [r3 * c * c * s, c * (c * c - 2.0 * s * s), (s * s - 2.0 * c * c) * s, r3 * c * s * s],
        [r3 * c * s * s, (2.0 * c * c - s * s) * s, c * (c * c - 2.0 * s * s), -r3 * c * c * s],
        [s * s * s, r3 * c * s * s, r3 * c * c * s, c * c * c],
    ])
}

fn rotation_phases(theta: f64) -> ComplexMatrix4 {
    ComplexMatrix4::from_diagonal([1.5, 0.5, -0.5, -1.5].map(|m| Complex64::from_polar(1.0, -m * theta)))
}

/// Rotates the drive axis by `phase` about z: `R·U·R†`, `R = exp(−iφ·Sz)`.
fn apply_drive_phase(u: ComplexMatrix4, phase: f64) -> ComplexMatrix4 {
    if phase == 0.0 {
        return u;
    }
    let r = rotation_phases(phase);
    r * u * r.adjoint()
}

/// `exp(−i·H_rot·τ_p)` with the full rotating-frame Hamiltonian.
pub fn exact_pulse_propagator(pp: &PulseParams) -> Result<ComplexMatrix4> {
    pp.validate()?;
    let h = rotating_hamiltonian_with_phase(&pp.spin, pp.phase);
    propagator(&h, pp.duration)
}

/// Hard-pulse propagator as a product of Wigner rotations.
pub fn hard_pulse_propagator(pp: &PulseParams) -> Result<ComplexMatrix4> {
    pp.validate()?;
    if pp.duration == 0.0 {
        return Ok(ComplexMatrix4::identity());
    }
    let f = hard_pulse_frame(&pp.spin, pp.duration)?;
    let u = wigner_small_d(f.beta) * rotation_phases(f.theta) * wigner_small_d(-f.beta);
    Ok(apply_drive_phase(u, pp.phase))
}

/// The hard-pulse Hamiltonian `−(δ+2D_gs)·Sz + ω₁·(cos φ·Sx + sin φ·Sy)`.
pub fn hard_pulse_hamiltonian(pp: &PulseParams) -> ComplexMatrix4 {
    let s = spin_operators();
    let p = &pp.spin;
    s.sz * (-(p.delta + 2.0 * p.dgs)) + (s.sx * pp.phase.cos() + s.sy * pp.phase.sin()) * p.omega1
}

/// The six independent elements of the hard-pulse matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedFormElements {
    pub z1: Complex64,
    pub n1: Complex64,
    pub d1: Complex64,
    pub t1: Complex64,
    pub z2: Complex64,
    pub n2: Complex64,
}

impl ClosedFormElements {
    /// Evaluates the polynomial forms in `c = cos(β'/2)`, `s = sin(β'/2)`,
    /// `q = e^{−iθ/2}`, `p = e^{−3iθ/2}`.
    pub fn evaluate(beta_primed: f64, theta: f64) -> Self {
        let (s, c) = (0.5 * beta_primed).sin_cos();
        let q = Complex64::from_polar(1.0, -0.5 * theta);
        let p = Complex64::from_polar(1.0, -1.5 * theta);
        let (qc, pc) = (q.conj(), p.conj());
        let r3 = 3.0_f64.sqrt();
        let (c2, s2) = (c * c, s * s);
        let a = c2 - 2.0 * s2;
        let b = 2.0 * c2 - s2;

        let z1 = p * c2 * c2 * c2 + q * 3.0 * c2 * c2 * s2 + qc * 3.0 * c2 * s2 * s2 + pc * s2 * s2 * s2;
        let n1 = (-p * c2 * c2 + q * c2 * a + qc * s2 * b + pc * s2 * s2) * (r3 * c * s);
        let d1 = (p * c2 + q * (s2 - 2.0 * c2) + qc * a + pc * s2) * (r3 * c2 * s2);
        let t1 = (-p + q * 3.0 - qc * 3.0 + pc) * (c2 * c * s2 * s);
        let z2 = p * 3.0 * c2 * c2 * s2 + q * c2 * a * a + qc * s2 * b * b + pc * 3.0 * c2 * s2 * s2;
        let n2 = (qc - q) * (c * s * a * b) + (pc - p) * (3.0 * c2 * c * s2 * s);
        ClosedFormElements { z1, n1, d1, t1, z2, n2 }
    }

    /// Fills all 16 entries from the transpose symmetry and the
    /// mirror-conjugation relations.
    pub fn to_matrix(&self) -> ComplexMatrix4 {
        let mut u = ComplexMatrix4::zeros();
        u[(0, 0)] = self.z1;
        u[(0, 1)] = self.n1;
        u[(0, 2)] = self.d1;
        u[(0, 3)] = self.t1;
        u[(1, 1)] = self.z2;
        u[(1, 2)] = self.n2;
        u[(1, 3)] = self.d1.conj();
        u[(2, 2)] = self.z2.conj();
        u[(2, 3)] = -self.n1.conj();
        u[(3, 3)] = self.z1.conj();
        for i in 0..4 {
            for j in 0..i {
                u[(i, j)] = u[(j, i)];
            }
        }
        u
    }
}

/// Hard-pulse propagator assembled from its closed-form matrix elements.
pub fn closed_form_elements(pp: &PulseParams) -> Result<ComplexMatrix4> {
    pp.validate()?;
    if pp.duration == 0.0 {
        return Ok(ComplexMatrix4::identity());
    }
    let f = hard_pulse_frame(&pp.spin, pp.duration)?;
    let u = ClosedFormElements::evaluate(-f.beta, f.theta).to_matrix();
    Ok(apply_drive_phase(u, pp.phase))
}

/// Largest violation of the zero-phase hard-pulse symmetries: `U = Uᵀ`,
/// `U₄₄ = U₁₁*`, `U₃₃ = U₂₂*`, `U₂₄ = U₁₃*`, `U₃₄ = −U₁₂*`, and the general
/// mirror rule `U_ij = (−1)^{i−j}·U*_{3−i,3−j}`.
pub fn hard_pulse_symmetry_residual(u: &ComplexMatrix4) -> f64 {
    let mut worst = u.max_abs_diff(&u.transpose());
    let pairs = [
        (u[(3, 3)], u[(0, 0)].conj()),
        (u[(2, 2)], u[(1, 1)].conj()),
        (u[(1, 3)], u[(0, 2)].conj()),
        (u[(2, 3)], -u[(0, 1)].conj()),
    ];
    for (a, b) in pairs {
        worst = worst.max((a - b).norm());
    }
    for i in 0..4 {
        for j in 0..4 {
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            worst = worst.max((u[(i, j)] - u[(3 - i, 3 - j)].conj() * sign).norm());
        }
    }
    worst
}

/// Propagator for the selected model.
pub fn pulse_propagator(model: PulseModel, pp: &PulseParams) -> Result<ComplexMatrix4> {
    match model {
        PulseModel::Exact => exact_pulse_propagator(pp),
        PulseModel::Hard => hard_pulse_propagator(pp),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::free_eigenvalues;
    use crate::linalg::diagonal_propagator;
    use crate::units::mhz_to_angular;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn strong_pulse() -> PulseParams {
        PulseParams::from_ns(SpinParams::from_mhz(2.25, 1.0, 5.0), 50.0)
    }

    #[test]
    fn zero_duration_is_identity() {
        let pp = PulseParams::new(SpinParams::from_mhz(2.25, 1.0, 5.0), 0.0);
        for model in [PulseModel::Exact, PulseModel::Hard] {
            assert_eq!(pulse_propagator(model, &pp).unwrap(), ComplexMatrix4::identity());
        }
        assert_eq!(closed_form_elements(&pp).unwrap(), ComplexMatrix4::identity());
    }

    #[test]
    fn drive_off_exact_pulse_is_free_phase() {
        let spin = SpinParams::from_mhz(2.25, -4.0, 0.0);
        let pp = PulseParams::from_ns(spin, 80.0);
        let u = exact_pulse_propagator(&pp).unwrap();
        let want = diagonal_propagator(free_eigenvalues(&spin).as_array(), pp.duration);
        assert!(u.max_abs_diff(&want) < 1e-13);
    }

    #[test]
    fn calibrated_exact_pulse_is_unitary() {
        let pp = PulseParams::from_ns(SpinParams::from_mhz(2.25, 0.0, 3.125), 80.0);
        let u = exact_pulse_propagator(&pp).unwrap();
        assert!(u.unitarity_deviation() < 1e-12);
        for j in 0..4 {
            let norm: f64 = u.column(j).iter().map(|z| z.norm_sqr()).sum();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn frame_pure_transverse() {
        let spin = SpinParams::new(1.0, -2.0, 4.0);
        let f = hard_pulse_frame(&spin, 0.1).unwrap();
        assert_abs_diff_eq!(f.beta, FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(f.omega_rabi, 4.0, epsilon = 1e-15);
    }

    #[test]
    fn frame_weak_drive_limit() {
        let spin = SpinParams::new(1.0, 1.0, 1e-9);
        let f = hard_pulse_frame(&spin, 0.1).unwrap();
        assert!((f.beta - PI).abs() < 1e-9);
    }

    #[test]
    fn frame_rabi_rate() {
        let spin = SpinParams::from_mhz(2.25, 1.0, 5.0);
        let f = hard_pulse_frame(&spin, 0.05).unwrap();
        let want = mhz_to_angular((5.5_f64 * 5.5 + 25.0).sqrt());
        assert_abs_diff_eq!(f.omega_rabi, want, epsilon = 1e-12);
        assert_abs_diff_eq!(f.beta.cos() * f.omega_rabi, -(spin.delta + 2.0 * spin.dgs), epsilon = 1e-12);
        assert_abs_diff_eq!(f.beta.sin() * f.omega_rabi, spin.omega1, epsilon = 1e-12);
        assert!(f.beta > 0.0 && f.beta <= PI);
    }

    #[test]
    fn frame_degenerate_rejected() {
        let spin = SpinParams::new(1.0, -2.0, 0.0);
        assert_eq!(hard_pulse_frame(&spin, 0.1), Err(QuditError::DegenerateFrame));
        assert!(hard_pulse_propagator(&PulseParams::new(spin, 0.1)).is_err());
    }

    #[test]
    fn small_d_special_angles() {
        assert!(wigner_small_d(0.0).max_abs_diff(&ComplexMatrix4::identity()) < 1e-15);
        // c = 0, s = 1: anti-diagonal (−1, −1, ... ) pattern read off the matrix
        let d = wigner_small_d(PI);
        let want = ComplexMatrix4::from_real([
            [0.0, 0.0, 0.0, -1.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
        ]);
        assert!(d.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn small_d_is_exp_of_sy() {
        let sy = spin_operators().sy;
        for beta in [0.3, -1.1, 2.9] {
            let via_exp = propagator(&sy, beta).unwrap();
            assert!(wigner_small_d(beta).max_abs_diff(&via_exp) < 1e-13);
        }
    }

    #[test]
    fn resonant_quarter_rotation() {
        // δ + 2D = 0, ω₁τ = π/2
        let spin = SpinParams::new(1.0, -2.0, mhz_to_angular(3.125));
        let pp = PulseParams::new(spin, resonant_half_pi_duration(spin.omega1));
        let u = hard_pulse_propagator(&pp).unwrap();
        let want = propagator(&(spin_operators().sx * spin.omega1), pp.duration).unwrap();
        assert!(u.max_abs_diff(&want) < 1e-12);
        let quarter = propagator(&spin_operators().sx, FRAC_PI_2).unwrap();
        assert!(u.max_abs_diff(&quarter) < 1e-12);
    }

    #[test]
    fn hard_pulse_equals_exponential_of_tilted_hamiltonian() {
        let pp = strong_pulse().with_phase(0.4);
        let u = hard_pulse_propagator(&pp).unwrap();
        let want = propagator(&hard_pulse_hamiltonian(&pp), pp.duration).unwrap();
        assert!(u.max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn closed_form_matches_wigner_product() {
        let pp = strong_pulse();
        let a = closed_form_elements(&pp).unwrap();
        let b = hard_pulse_propagator(&pp).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
        assert!(hard_pulse_symmetry_residual(&b) < 1e-12);
        assert_abs_diff_eq!(b[(0, 1)].re, b[(1, 0)].re, epsilon = 1e-12);
        assert!((b[(3, 3)] - b[(0, 0)].conj()).norm() < 1e-12);
    }

    #[test]
    fn closed_form_identity_at_zero_angle() {
        let e = ClosedFormElements::evaluate(-0.8, 0.0);
        assert!((e.z1 - 1.0).norm() < 1e-15);
        assert!(e.n1.norm() < 1e-15 && e.d1.norm() < 1e-15 && e.t1.norm() < 1e-15 && e.n2.norm() < 1e-15);
        assert!(e.to_matrix().max_abs_diff(&ComplexMatrix4::identity()) < 1e-15);
    }

    #[test]
    fn beta_sign_convention_only_flips_drive_sign() {
        // d(−β)Λd(β) with β > 0 equals the hard pulse for −ω₁, i.e. drive phase π.
        let pp = strong_pulse();
        let f = hard_pulse_frame(&pp.spin, pp.duration).unwrap();
        let mirrored = wigner_small_d(-f.beta) * rotation_phases(f.theta) * wigner_small_d(f.beta);
        let flipped = hard_pulse_propagator(&pp.with_phase(PI)).unwrap();
        assert!(mirrored.max_abs_diff(&flipped) < 1e-12);
    }

    #[test]
    fn negative_duration_rejected() {
        let pp = PulseParams::new(SpinParams::from_mhz(2.25, 0.0, 1.0), -0.01);
        assert!(exact_pulse_propagator(&pp).is_err());
    }
}
