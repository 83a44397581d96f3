//! Spin Hamiltonians of the spin-3/2 ground manifold.
//!
//! The detuning is measured from the `|+3/2⟩ ↔ |+1/2⟩` resonance:
//! `δ = ω − (ω₀ + 2·D_gs)`, so `ω₀ − ω = −(δ + 2·D_gs)` in the rotating frame.

use std::fmt;

use crate::linalg::{spin_operators, ComplexMatrix4};
use crate::units::mhz_to_angular;

/// One of the four `m_s` sublevels, in basis order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sublevel {
    PlusThreeHalves,
    PlusHalf,
    MinusHalf,
    MinusThreeHalves,
}

impl Sublevel {
    pub const ALL: [Sublevel; 4] = [
        Sublevel::PlusThreeHalves,
        Sublevel::PlusHalf,
        Sublevel::MinusHalf,
        Sublevel::MinusThreeHalves,
    ];

    /// Position in the basis `{+3/2, +1/2, −1/2, −3/2}`.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(k: usize) -> Option<Self> {
        Self::ALL.get(k).copied()
    }

    /// The magnetic quantum number `m`.
    pub fn m(self) -> f64 {
        1.5 - self.index() as f64
    }

    pub fn label(self) -> &'static str {
        match self {
            Sublevel::PlusThreeHalves => "+3/2",
            Sublevel::PlusHalf => "+1/2",
            Sublevel::MinusHalf => "-1/2",
            Sublevel::MinusThreeHalves => "-3/2",
        }
    }

    /// Parses `+3/2`, `3/2`, `-1/2`, etc. (Unicode minus accepted).
    pub fn parse(s: &str) -> Option<Self> {
        let t = s.trim().replace('−', "-");
        let t = t.strip_prefix('+').unwrap_or(&t);
        match t {
            "3/2" => Some(Sublevel::PlusThreeHalves),
            "1/2" => Some(Sublevel::PlusHalf),
            "-1/2" => Some(Sublevel::MinusHalf),
            "-3/2" => Some(Sublevel::MinusThreeHalves),
            _ => None,
        }
    }
}

impl fmt::Display for Sublevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Physical parameters. All frequencies are angular (rad/µs).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinParams {
    /// `D_gs`; the zero-field splitting is `2·D_gs`.
    pub dgs: f64,
    /// Drive detuning `δ`.
    pub delta: f64,
    /// Rabi drive amplitude `ω₁ ≥ 0`.
    pub omega1: f64,
    /// Larmor frequency `ω₀`, only used by the lab-frame Hamiltonian.
    pub omega0: f64,
}

impl SpinParams {
    pub fn new(dgs: f64, delta: f64, omega1: f64) -> Self {
        SpinParams {
            dgs,
            delta,
            omega1,
            omega0: 0.0,
        }
    }

    /// Parameters from ordinary frequencies in MHz.
    pub fn from_mhz(dgs_mhz: f64, delta_mhz: f64, omega1_mhz: f64) -> Self {
        Self::new(
            mhz_to_angular(dgs_mhz),
            mhz_to_angular(delta_mhz),
            mhz_to_angular(omega1_mhz),
        )
    }

    pub fn with_delta(self, delta: f64) -> Self {
        SpinParams { delta, ..self }
    }

    pub fn with_omega1(self, omega1: f64) -> Self {
        SpinParams { omega1, ..self }
    }

    pub fn with_omega0(self, omega0: f64) -> Self {
        SpinParams { omega0, ..self }
    }

    /// Zero-field splitting `2·D_gs/2π` in MHz.
    pub fn zfs_mhz(&self) -> f64 {
        crate::units::angular_to_mhz(2.0 * self.dgs)
    }

    /// Longitudinal rotating-frame coefficient `ω₀ − ω = −(δ + 2·D_gs)`.
    pub fn frame_offset(&self) -> f64 {
        -(self.delta + 2.0 * self.dgs)
    }

    /// Drive frequency `ω = ω₀ + 2·D_gs + δ` implied by the detuning convention.
    pub fn drive_frequency(&self) -> f64 {
        self.omega0 + 2.0 * self.dgs + self.delta
    }
}

/// Lab-frame `ω₀·Sz + D_gs·Sz² + ω₁·cos(ω t)·Sx` (constant `−5D_gs/4` omitted).
pub fn lab_hamiltonian(p: &SpinParams, drive_freq: f64, t: f64) -> ComplexMatrix4 {
    let s = spin_operators();
    s.sz * p.omega0 + s.sz_squared() * p.dgs + s.sx * (p.omega1 * (drive_freq * t).cos())
}

/// Rotating-frame Hamiltonian in the explicit matrix form
/// `(ω₀−ω)·Sz + D_gs·(Sz² − 5/4) + ω₁·Sx`.
///
/// The `−5/4` shift makes the diagonal read `(D, −D, −D, D) + (ω₀−ω)·m`,
/// which is the form whose drive-off eigenvalues are [`free_eigenvalues`].
pub fn rotating_hamiltonian(p: &SpinParams) -> ComplexMatrix4 {
    rotating_hamiltonian_with_phase(p, 0.0)
}

/// As [`rotating_hamiltonian`] with the drive axis `cos φ·Sx + sin φ·Sy`.
pub fn rotating_hamiltonian_with_phase(p: &SpinParams, phase: f64) -> ComplexMatrix4 {
    let s = spin_operators();
    let mut h = ComplexMatrix4::from_diagonal_real(free_eigenvalues(p).as_array());
    if p.omega1 != 0.0 {
        let axis = if phase == 0.0 {
            s.sx
        } else {
            s.sx * phase.cos() + s.sy * phase.sin()
        };
        h = h + axis * p.omega1;
    }
    h
}

/// Drive-off rotating Hamiltonian. Exactly diagonal.
pub fn free_hamiltonian(p: &SpinParams) -> ComplexMatrix4 {
    ComplexMatrix4::from_diagonal_real(free_eigenvalues(p).as_array())
}

/// Free-evolution energies labeled by sublevel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelEnergies {
    pub plus_three_halves: f64,
    pub plus_half: f64,
    pub minus_half: f64,
    pub minus_three_halves: f64,
}

impl LevelEnergies {
    /// Energies in basis order.
    pub fn as_array(&self) -> [f64; 4] {
        [
            self.plus_three_halves,
            self.plus_half,
            self.minus_half,
            self.minus_three_halves,
        ]
    }

    pub fn get(&self, level: Sublevel) -> f64 {
        self.as_array()[level.index()]
    }
}

pub fn free_eigenvalues(p: &SpinParams) -> LevelEnergies {
    let (d, g) = (p.delta, p.dgs);
    LevelEnergies {
        plus_three_halves: -1.5 * d - 2.0 * g,
        plus_half: -0.5 * d - 2.0 * g,
        minus_half: 0.5 * d,
        minus_three_halves: 1.5 * d + 4.0 * g,
    }
}
