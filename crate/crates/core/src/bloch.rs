//! Two-level Bloch pictures of the four-level state.
//!
//! For a pair `(m, n)` with `m` the higher-`m_s` level (north pole):
//! `x = 2·Re ρ_mn`, `y = −2·Im ρ_mn`, `z = ρ_mm − ρ_nn`. The vector is not
//! renormalized, so population leaking out of the pair shrinks it.

use crate::error::{QuditError, Result};
use crate::hamiltonian::{free_hamiltonian, rotating_hamiltonian_with_phase, Sublevel};
use crate::linalg::{propagator, ComplexMatrix4, QuartetState};
use crate::ramsey::RamseySettings;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub pair: (Sublevel, Sublevel),
    /// `ρ_mm + ρ_nn`.
    pub pair_population: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Azimuth `atan2(y, x)`.
    pub fn azimuth(&self) -> f64 {
        self.y.atan2(self.x)
    }
}

/// Orders a pair so the higher-`m_s` level comes first.
pub fn north_first(pair: (Sublevel, Sublevel)) -> (Sublevel, Sublevel) {
    if pair.0.index() <= pair.1.index() {
        pair
    } else {
        (pair.1, pair.0)
    }
}

pub fn pair_projection_density(rho: &ComplexMatrix4, pair: (Sublevel, Sublevel)) -> Result<BlochVector> {
    if pair.0 == pair.1 {
        return Err(QuditError::InvalidParameter(format!(
            "Bloch pair needs two distinct sublevels, got ({}, {})",
            pair.0, pair.1
        )));
    }
    let (m, n) = north_first(pair);
    let (i, j) = (m.index(), n.index());
    let coh = rho[(i, j)];
    Ok(BlochVector {
        x: 2.0 * coh.re,
        y: -2.0 * coh.im,
        z: rho[(i, i)].re - rho[(j, j)].re,
        pair: (m, n),
        pair_population: rho[(i, i)].re + rho[(j, j)].re,
    })
}

pub fn pair_projection(state: &QuartetState, pair: (Sublevel, Sublevel)) -> Result<BlochVector> {
    pair_projection_density(&state.density_matrix(), pair)
}

/// Segment of the sequence a trajectory sample belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Segment {
    Start,
    FirstPulse,
    FreeEvolution,
    SecondPulse,
}

impl Segment {
    pub fn name(self) -> &'static str {
        match self {
            Segment::Start => "start",
            Segment::FirstPulse => "pulse1",
            Segment::FreeEvolution => "free",
            Segment::SecondPulse => "pulse2",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryPoint {
    /// Elapsed time since the start of the first pulse, µs.
    pub t: f64,
    pub segment: Segment,
    pub vector: BlochVector,
    pub rho: ComplexMatrix4,
}

/// Default sub-step: pulse duration / 50.
pub fn default_intra_step(s: &RamseySettings) -> f64 {
    s.pulse.duration / 50.0
}

/// Pulse, free evolution for `free_time`, pulse, in sub-steps of at most
/// `intra_step` (µs) with the full rotating-frame Hamiltonian.
pub fn trajectory(
    s: &RamseySettings,
    pair: (Sublevel, Sublevel),
    free_time: f64,
    intra_step: f64,
) -> Result<Vec<TrajectoryPoint>> {
    s.pulse.validate()?;
    let state = s.initial_state.state();
    state.validate()?;
    if !(intra_step > 0.0) || (s.pulse.duration > 0.0 && intra_step > s.pulse.duration * (1.0 + 1e-12)) {
        return Err(QuditError::InvalidParameter(format!(
            "intra-pulse step must be in (0, pulse duration], got {intra_step}"
        )));
    }
    if !(free_time >= 0.0) || !free_time.is_finite() {
        return Err(QuditError::InvalidParameter(format!(
            "free-evolution time must be >= 0, got {free_time}"
        )));
    }

    let h_pulse = rotating_hamiltonian_with_phase(s.spin(), s.pulse.phase);
    let h_free = free_hamiltonian(s.spin());
    let segments = [
        (Segment::FirstPulse, h_pulse, s.pulse.duration),
        (Segment::FreeEvolution, h_free, free_time),
        (Segment::SecondPulse, h_pulse, s.pulse.duration),
    ];

    let mut rho = state.density_matrix();
    let mut t = 0.0;
    let mut out = vec![TrajectoryPoint {
        t,
        segment: Segment::Start,
        vector: pair_projection_density(&rho, pair)?,
        rho,
    }];
    for (segment, h, length) in segments {
        if length == 0.0 {
            continue;
        }
        let steps = ((length / intra_step) - 1e-9).ceil().max(1.0) as usize;
        let dt = length / steps as f64;
        let u = propagator(&h, dt)?;
        let start = t;
        for k in 1..=steps {
            rho = u * rho * u.adjoint();
            t = start + dt * k as f64;
            out.push(TrajectoryPoint {
                t,
                segment,
                vector: pair_projection_density(&rho, pair)?,
                rho,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::SpinParams;
    use crate::pulse::PulseParams;
    use crate::ramsey::TauGrid;
    use num_complex::Complex64;
    use Sublevel::*;

    #[test]
    fn projection_examples() {
        let v = pair_projection(&QuartetState::plus_half(), (PlusThreeHalves, PlusHalf)).unwrap();
        assert_eq!((v.x, v.y, v.z), (0.0, 0.0, -1.0));

        let a = Complex64::new(0.5_f64.sqrt(), 0.0);
        let plus = QuartetState::Pure([a, a, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]);
        let v = pair_projection(&plus, (PlusThreeHalves, PlusHalf)).unwrap();
        assert!((v.x - 1.0).abs() < 1e-15 && v.y.abs() < 1e-15 && v.z.abs() < 1e-15);

        let v = pair_projection(&QuartetState::plus_half(), (MinusHalf, MinusThreeHalves)).unwrap();
        assert_eq!((v.x, v.y, v.z, v.pair_population), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn pair_order_normalized() {
        let v = pair_projection(&QuartetState::plus_half(), (PlusHalf, PlusThreeHalves)).unwrap();
        assert_eq!(v.pair, (PlusThreeHalves, PlusHalf));
        assert_eq!(v.z, -1.0);
        assert!(pair_projection(&QuartetState::plus_half(), (PlusHalf, PlusHalf)).is_err());
    }

    #[test]
    fn drive_off_is_pinned() {
        let spin = SpinParams::from_mhz(2.25, 1.0, 0.0);
        let s = RamseySettings::new(PulseParams::from_ns(spin, 50.0), TauGrid::from_ns(0.0, 60.0, 2))
            .with_initial_state(crate::ramsey::InitialState::PlusHalf);
        let traj = trajectory(&s, (PlusThreeHalves, PlusHalf), 0.3, 0.001).unwrap();
        assert!(traj.iter().all(|p| (p.vector.z + 1.0).abs() < 1e-12 && p.vector.x.abs() < 1e-12));
        assert_eq!(traj.len(), 1 + 50 + 300 + 50);
        assert!((traj.last().unwrap().t - 0.4).abs() < 1e-12);
    }

    #[test]
    fn step_validation() {
        let spin = SpinParams::from_mhz(2.25, 1.0, 5.0);
        let s = RamseySettings::new(PulseParams::from_ns(spin, 50.0), TauGrid::from_ns(0.0, 60.0, 2));
        assert!(trajectory(&s, (PlusThreeHalves, PlusHalf), 0.1, 0.0).is_err());
        assert!(trajectory(&s, (PlusThreeHalves, PlusHalf), 0.1, 0.06).is_err());
        assert!(trajectory(&s, (PlusThreeHalves, PlusHalf), -0.1, 0.001).is_err());
        assert_eq!(default_intra_step(&s), 0.001);
    }
}
