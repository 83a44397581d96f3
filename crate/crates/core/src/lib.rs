//! Ramsey interferometry on a four-level spin-3/2 qudit.
//!
//! The crate covers the whole pipeline from the spin Hamiltonian to the
//! Nyquist-folded Fourier spectrum of a sampled Ramsey trace:
//!
//! * [`linalg`]: fixed-size 4×4 complex matrices, spin-3/2 operators, a
//!   Jacobi eigensolver and exact propagators.
//! * [`hamiltonian`]: lab-frame, rotating-frame and free-evolution
//!   Hamiltonians and the free level energies.
//! * [`pulse`]: drive-pulse propagators, both exact and in the hard-pulse
//!   (tilted-axis rotation) picture.
//! * [`ramsey`]: the pulse / free evolution / pulse sequence, population
//!   readout and the analytic cosine decomposition of the signal.
//! * [`spectral`]: DFT magnitude spectra, the six frequency branches,
//!   alias folding, peak extraction and detuning sweeps.
//! * [`bloch`]: two-level Bloch-vector projections and trajectories.
//!
//! Internally every frequency is an angular frequency in rad/µs and every
//! time is in µs. Constructors named `*_mhz` / `*_ns` take ordinary
//! frequencies and nanoseconds; see [`units`].

pub mod bloch;
pub mod error;
pub mod hamiltonian;
pub mod linalg;
pub mod pulse;
pub mod ramsey;
pub mod spectral;
pub mod units;

pub use error::{QuditError, Result};
pub use hamiltonian::{SpinParams, Sublevel};
pub use linalg::{ComplexMatrix4, QuartetState};
pub use num_complex::Complex64;
