//! The Ramsey sequence: pulse, free evolution for `τ`, pulse, then a
//! population readout.

use num_complex::Complex64;

use crate::error::{QuditError, Result};
use crate::hamiltonian::{free_eigenvalues, SpinParams, Sublevel};
use crate::linalg::{diagonal_propagator, ComplexMatrix4, QuartetState};
use crate::pulse::{pulse_propagator, PulseModel, PulseParams};
use crate::spectral::TimeTrace;
use crate::units::ns_to_us;

/// Population readout channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Observable {
    /// `|+1/2⟩⟨+1/2| + |−1/2⟩⟨−1/2|`
    O1,
    /// `|+3/2⟩⟨+3/2| + |−3/2⟩⟨−3/2|`
    #[default]
    O2,
}

impl Observable {
    /// Sublevels the projector covers.
    pub fn support(self) -> [Sublevel; 2] {
        match self {
            Observable::O1 => [Sublevel::PlusHalf, Sublevel::MinusHalf],
            Observable::O2 => [Sublevel::PlusThreeHalves, Sublevel::MinusThreeHalves],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Observable::O1 => "o1",
            Observable::O2 => "o2",
        }
    }
}

pub fn observable_projector(which: Observable) -> ComplexMatrix4 {
    let mut d = [0.0; 4];
    for l in which.support() {
        d[l.index()] = 1.0;
    }
    ComplexMatrix4::from_diagonal_real(d)
}

/// Initial state of the sequence.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum InitialState {
    PlusHalf,
    MinusHalf,
    /// Equal statistical mixture of `|+1/2⟩` and `|−1/2⟩`.
    #[default]
    MixedHalf,
    Custom(QuartetState),
}

impl InitialState {
    pub fn state(&self) -> QuartetState {
        match self {
            InitialState::PlusHalf => QuartetState::plus_half(),
            InitialState::MinusHalf => QuartetState::minus_half(),
            InitialState::MixedHalf => QuartetState::mixed_half(),
            InitialState::Custom(s) => *s,
        }
    }
}

/// Uniform grid of free-evolution times (µs).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TauGrid {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl TauGrid {
    pub fn new(start: f64, step: f64, count: usize) -> Self {
        TauGrid { start, step, count }
    }

    pub fn from_ns(start_ns: f64, step_ns: f64, count: usize) -> Self {
        Self::new(ns_to_us(start_ns), ns_to_us(step_ns), count)
    }

    pub fn tau(&self, k: usize) -> f64 {
        self.start + self.step * k as f64
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|k| self.tau(k))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(QuditError::InvalidParameter(format!(
                "tau step must be > 0, got {}",
                self.step
            )));
        }
        if self.count < 2 {
            return Err(QuditError::TooFewSamples(self.count));
        }
        if !(self.start >= 0.0) {
            return Err(QuditError::InvalidParameter(format!(
                "tau start must be >= 0, got {}",
                self.start
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RamseySettings {
    pub pulse: PulseParams,
    pub pulse_model: PulseModel,
    pub tau_grid: TauGrid,
    pub initial_state: InitialState,
    pub observable: Observable,
    /// Optional exponential decay time (µs) of the oscillating part.
    pub t2star: Option<f64>,
}

impl RamseySettings {
    /// Mixed `±1/2` start, `O2` readout, exact pulses, no decay.
    pub fn new(pulse: PulseParams, tau_grid: TauGrid) -> Self {
        RamseySettings {
            pulse,
            pulse_model: PulseModel::Exact,
            tau_grid,
            initial_state: InitialState::MixedHalf,
            observable: Observable::O2,
            t2star: None,
        }
    }

    pub fn spin(&self) -> &SpinParams {
        &self.pulse.spin
    }

    pub fn with_spin(mut self, spin: SpinParams) -> Self {
        self.pulse.spin = spin;
        self
    }

    pub fn with_model(mut self, model: PulseModel) -> Self {
        self.pulse_model = model;
        self
    }

    pub fn with_initial_state(mut self, s: InitialState) -> Self {
        self.initial_state = s;
        self
    }

    pub fn with_observable(mut self, o: Observable) -> Self {
        self.observable = o;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.pulse.validate()?;
        self.tau_grid.validate()?;
        self.initial_state.state().validate()?;
        if let Some(t2) = self.t2star {
            if !(t2 > 0.0) {
                return Err(QuditError::InvalidParameter(format!(
                    "decay time must be > 0, got {t2}"
                )));
            }
        }
        Ok(())
    }
}

/// A Ramsey sequence with the pulse propagator already evaluated.
#[derive(Clone, Copy, Debug)]
pub struct RamseySequence {
    pub pulse_unitary: ComplexMatrix4,
    pub energies: [f64; 4],
}

impl RamseySequence {
    pub fn new(s: &RamseySettings) -> Result<Self> {
        Ok(Self::from_pulse(
            pulse_propagator(s.pulse_model, &s.pulse)?,
            s.spin(),
        ))
    }

    pub fn from_pulse(pulse_unitary: ComplexMatrix4, spin: &SpinParams) -> Self {
        RamseySequence {
            pulse_unitary,
            energies: free_eigenvalues(spin).as_array(),
        }
    }

    /// `U_pulse · exp(−i·H_free·τ) · U_pulse`.
    pub fn unitary(&self, tau: f64) -> ComplexMatrix4 {
        self.pulse_unitary * diagonal_propagator(self.energies, tau) * self.pulse_unitary
    }

    pub fn evolve(&self, rho0: &ComplexMatrix4, tau: f64) -> ComplexMatrix4 {
        let u = self.unitary(tau);
        u * *rho0 * u.adjoint()
    }

    /// `Tr[O·U(τ)·ρ₀·U(τ)†]`.
    pub fn signal(&self, observable: &ComplexMatrix4, rho0: &ComplexMatrix4, tau: f64) -> f64 {
        (*observable * self.evolve(rho0, tau)).trace().re
    }

    /// Long-time average of the signal: coherences between non-degenerate
    /// levels are removed before the second pulse.
    pub fn dephased_mean(&self, observable: &ComplexMatrix4, rho0: &ComplexMatrix4) -> f64 {
        let u = self.pulse_unitary;
        let rho1 = u * *rho0 * u.adjoint();
        let scale = self.energies.iter().fold(1.0_f64, |a, e| a.max(e.abs()));
        let kept = ComplexMatrix4::from_fn(|m, n| {
            if (self.energies[m] - self.energies[n]).abs() <= 1e-12 * scale {
                rho1[(m, n)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        (*observable * u * kept * u.adjoint()).trace().re
    }
}

pub fn ramsey_unitary(s: &RamseySettings, tau: f64) -> Result<ComplexMatrix4> {
    if !(tau >= 0.0) {
        return Err(QuditError::InvalidParameter(format!(
            "free-evolution time must be >= 0, got {tau}"
        )));
    }
    Ok(RamseySequence::new(s)?.unitary(tau))
}

fn apply_envelope(samples: &mut [f64], grid: &TauGrid, mean: f64, t2star: Option<f64>) {
    if let Some(t2) = t2star {
        for (k, v) in samples.iter_mut().enumerate() {
            *v = mean + (*v - mean) * (-grid.tau(k) / t2).exp();
        }
    }
}

/// Ramsey signal over the τ grid, propagating the density matrix.
pub fn ramsey_signal_trace(s: &RamseySettings) -> Result<TimeTrace> {
    s.validate()?;
    let seq = RamseySequence::new(s)?;
    let obs = observable_projector(s.observable);
    let rho0 = s.initial_state.state().density_matrix();
    let mut samples: Vec<f64> = s.tau_grid.iter().map(|tau| seq.signal(&obs, &rho0, tau)).collect();
    apply_envelope(&mut samples, &s.tau_grid, seq.dephased_mean(&obs, &rho0), s.t2star);
    TimeTrace::new(s.tau_grid.start, s.tau_grid.step, samples)
}

/// Same trace computed as the weighted average of pure-state runs.
pub fn ramsey_signal_trace_pure_average(s: &RamseySettings) -> Result<TimeTrace> {
    s.validate()?;
    let seq = RamseySequence::new(s)?;
    let obs = observable_projector(s.observable);
    let state = s.initial_state.state();
    let mut samples = vec![0.0; s.tau_grid.count];
    for (w, ket) in state.ensemble()? {
        for (k, tau) in s.tau_grid.iter().enumerate() {
            let psi = seq.unitary(tau).mul_vec(&ket);
            let pop: f64 = obs
                .diagonal()
                .iter()
                .zip(psi.iter())
                .map(|(o, a)| o.re * a.norm_sqr())
                .sum();
            samples[k] += w * pop;
        }
    }
    let rho0 = state.density_matrix();
    apply_envelope(&mut samples, &s.tau_grid, seq.dephased_mean(&obs, &rho0), s.t2star);
    TimeTrace::new(s.tau_grid.start, s.tau_grid.step, samples)
}

/// Weight of one sublevel-pair coherence in the signal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairCoefficient {
    /// `(m, n)` with `m` before `n` in basis order.
    pub pair: (Sublevel, Sublevel),
    /// Complex weight, phase referenced to `cos(Ω·τ − arg X)`.
    pub x: Complex64,
    /// `Ω = |E_m − E_n|` (rad/µs).
    pub omega: f64,
}

/// `S(τ) = c₀ + Σ 2|X_mn|·cos(Ω_mn·τ − arg X_mn)` over the six pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalDecomposition {
    pub c0: f64,
    pub terms: Vec<PairCoefficient>,
}

impl SignalDecomposition {
    pub fn get(&self, a: Sublevel, b: Sublevel) -> Option<&PairCoefficient> {
        self.terms
            .iter()
            .find(|t| t.pair == (a, b) || t.pair == (b, a))
    }

    pub fn evaluate(&self, tau: f64) -> f64 {
        self.c0
            + self
                .terms
                .iter()
                .map(|t| 2.0 * t.x.norm() * (t.omega * tau - t.x.arg()).cos())
                .sum::<f64>()
    }

    /// Weighted sum of decompositions of pure components sharing the same
    /// Hamiltonian. The signal is linear in the initial density matrix.
    pub fn combine(parts: &[(f64, SignalDecomposition)]) -> Option<SignalDecomposition> {
        let (_, first) = parts.first()?;
        let mut out = SignalDecomposition {
            c0: 0.0,
            terms: first
                .terms
                .iter()
                .map(|t| PairCoefficient {
                    x: Complex64::new(0.0, 0.0),
                    ..*t
                })
                .collect(),
        };
        for (w, d) in parts {
            out.c0 += w * d.c0;
            for (acc, t) in out.terms.iter_mut().zip(&d.terms) {
                acc.x += t.x * *w;
            }
        }
        Some(out)
    }
}

/// Cosine decomposition of the signal for a pure initial state.
///
/// With `A = U·ψ₀` and `B_km = U_km·A_m` for the readout levels `k`,
/// `c₀ = Σ_k Σ_m |B_km|²` and `X_mn = Σ_k B_km·B_kn*` (conjugated when
/// `E_m < E_n` so that every `Ω` is non-negative).
pub fn analytic_decomposition(
    pulse_u: &ComplexMatrix4,
    psi0: &QuartetState,
    p: &SpinParams,
    observable: Observable,
) -> Result<SignalDecomposition> {
    let ket = match psi0 {
        QuartetState::Pure(a) => *a,
        QuartetState::Mixed(_) => return Err(QuditError::MixedState),
    };
    psi0.validate()?;
    let a = pulse_u.mul_vec(&ket);
    let support = observable.support().map(Sublevel::index);
    let b = |k: usize, m: usize| pulse_u[(k, m)] * a[m];
    let energies = free_eigenvalues(p).as_array();

    let c0 = support
        .iter()
        .flat_map(|&k| (0..4).map(move |m| (k, m)))
        .map(|(k, m)| b(k, m).norm_sqr())
        .sum();

    let mut terms = Vec::with_capacity(6);
    for m in 0..4 {
        for n in (m + 1)..4 {
            let raw: Complex64 = support.iter().map(|&k| b(k, m) * b(k, n).conj()).sum();
            let diff = energies[m] - energies[n];
            let x = if diff >= 0.0 { raw } else { raw.conj() };
            terms.push(PairCoefficient {
                pair: (Sublevel::ALL[m], Sublevel::ALL[n]),
                x,
                omega: diff.abs(),
            });
        }
    }
    Ok(SignalDecomposition { c0, terms })
}

/// Decomposition for the settings' pulse model and (pure) initial state.
pub fn decomposition_for_settings(s: &RamseySettings) -> Result<SignalDecomposition> {
    let u = pulse_propagator(s.pulse_model, &s.pulse)?;
    analytic_decomposition(&u, &s.initial_state.state(), s.spin(), s.observable)
}
