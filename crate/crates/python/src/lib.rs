//! Python bindings. Interface units are MHz and ns, as in the CLI.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ququart::bloch::{default_intra_step, trajectory};
use ququart::pulse::{pulse_propagator, PulseModel, PulseParams};
use ququart::ramsey::{
    decomposition_for_settings, ramsey_signal_trace, InitialState, Observable, RamseySettings, TauGrid,
};
use ququart::spectral::{
    assign_peaks, branch_frequencies, dft_magnitude, extract_peaks, fold_frequency as fold, folded_branch_frequencies,
    sweep_spectra, DftOptions, Spectrum, Window,
};
use ququart::units::{angular_to_mhz, mhz_to_angular, ns_to_us, us_to_ns};
use ququart::{QuditError, SpinParams, Sublevel};

fn err(e: QuditError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_model(s: &str) -> PyResult<PulseModel> {
    match s {
        "exact" => Ok(PulseModel::Exact),
        "hard" => Ok(PulseModel::Hard),
        _ => Err(PyValueError::new_err(format!("pulse_model must be 'exact' or 'hard', got {s:?}"))),
    }
}

fn parse_state(s: &str) -> PyResult<InitialState> {
    match s {
        "plus_half" => Ok(InitialState::PlusHalf),
        "minus_half" => Ok(InitialState::MinusHalf),
        "mixed_half" => Ok(InitialState::MixedHalf),
        _ => Err(PyValueError::new_err(format!(
            "initial_state must be 'plus_half', 'minus_half' or 'mixed_half', got {s:?}"
        ))),
    }
}

fn parse_observable(s: &str) -> PyResult<Observable> {
    match s {
        "o1" => Ok(Observable::O1),
        "o2" => Ok(Observable::O2),
        _ => Err(PyValueError::new_err(format!("observable must be 'o1' or 'o2', got {s:?}"))),
    }
}

fn parse_level(s: &str) -> PyResult<Sublevel> {
    Sublevel::parse(s).ok_or_else(|| PyValueError::new_err(format!("unknown sublevel {s:?}")))
}

fn dft_options(window: &str, zero_pad: usize, mean_subtract: bool) -> PyResult<DftOptions> {
    let window = match window {
        "hann" => Window::Hann,
        "none" => Window::None,
        _ => return Err(PyValueError::new_err(format!("window must be 'hann' or 'none', got {window:?}"))),
    };
    Ok(DftOptions {
        window,
        zero_pad,
        mean_subtract,
    })
}

type BlochRow = (f64, f64, f64, f64, f64);
type SweepRow = (f64, Vec<f64>, Vec<f64>);

fn spectrum_lists(s: &Spectrum) -> (Vec<f64>, Vec<f64>) {
    ((0..s.magnitudes.len()).map(|k| s.frequency(k)).collect(), s.magnitudes.clone())
}

/// Complete Ramsey experiment description.
#[pyclass(name = "RamseySettings", module = "ququart", from_py_object)]
#[derive(Clone)]
struct PyRamseySettings {
    inner: RamseySettings,
}

#[pymethods]
impl PyRamseySettings {
    #[new]
    #[pyo3(signature = (
        dgs_mhz = 2.25,
        delta_mhz = 0.0,
        omega1_mhz = 3.125,
        pulse_ns = 80.0,
        pulse_phase_rad = 0.0,
        pulse_model = "exact",
        tau_start_ns = 0.0,
        dtau_ns = 60.0,
        n_samples = 512,
        initial_state = "mixed_half",
        observable = "o2",
        t2star_us = None,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        dgs_mhz: f64,
        delta_mhz: f64,
        omega1_mhz: f64,
        pulse_ns: f64,
        pulse_phase_rad: f64,
        pulse_model: &str,
        tau_start_ns: f64,
        dtau_ns: f64,
        n_samples: usize,
        initial_state: &str,
        observable: &str,
        t2star_us: Option<f64>,
    ) -> PyResult<Self> {
        let spin = SpinParams::from_mhz(dgs_mhz, delta_mhz, omega1_mhz);
        let inner = RamseySettings {
            pulse: PulseParams::from_ns(spin, pulse_ns).with_phase(pulse_phase_rad),
            pulse_model: parse_model(pulse_model)?,
            tau_grid: TauGrid::from_ns(tau_start_ns, dtau_ns, n_samples),
            initial_state: parse_state(initial_state)?,
            observable: parse_observable(observable)?,
            t2star: t2star_us,
        };
        inner.validate().map_err(err)?;
        Ok(PyRamseySettings { inner })
    }

    #[getter]
    fn delta_mhz(&self) -> f64 {
        angular_to_mhz(self.inner.spin().delta)
    }

    #[getter]
    fn sampling_rate_mhz(&self) -> f64 {
        1.0 / self.inner.tau_grid.step
    }

    /// Copy with a different detuning.
    fn with_delta(&self, delta_mhz: f64) -> Self {
        let spin = self.inner.spin().with_delta(mhz_to_angular(delta_mhz));
        PyRamseySettings {
            inner: self.inner.with_spin(spin),
        }
    }

    fn tau_ns(&self) -> Vec<f64> {
        self.inner.tau_grid.iter().map(us_to_ns).collect()
    }

    fn signal(&self) -> PyResult<Vec<f64>> {
        Ok(ramsey_signal_trace(&self.inner).map_err(err)?.samples)
    }

    /// `(freq_mhz, magnitude)` of the one-sided spectrum.
    #[pyo3(signature = (window = "hann", zero_pad = 4, mean_subtract = true))]
    fn spectrum(&self, window: &str, zero_pad: usize, mean_subtract: bool) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let trace = ramsey_signal_trace(&self.inner).map_err(err)?;
        let spec = dft_magnitude(&trace, &dft_options(window, zero_pad, mean_subtract)?).map_err(err)?;
        Ok(spectrum_lists(&spec))
    }

    /// Spectral peaks with their branch assignment, by descending magnitude.
    /// Separation and tolerance default to three and one acquisition bins.
    #[pyo3(signature = (prominence = 0.05, min_sep_mhz = None, tol_mhz = None))]
    fn peaks<'py>(
        &self,
        py: Python<'py>,
        prominence: f64,
        min_sep_mhz: Option<f64>,
        tol_mhz: Option<f64>,
    ) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let trace = ramsey_signal_trace(&self.inner).map_err(err)?;
        let spec = dft_magnitude(&trace, &DftOptions::default()).map_err(err)?;
        let peaks = extract_peaks(&spec, prominence, min_sep_mhz.unwrap_or(3.0 * spec.resolution));
        let folded = folded_branch_frequencies(self.inner.spin(), trace.sampling_rate_mhz());
        assign_peaks(&peaks, &folded, tol_mhz.unwrap_or(spec.resolution))
            .into_iter()
            .map(|a| {
                let d = PyDict::new(py);
                d.set_item("frequency_mhz", a.peak.frequency)?;
                d.set_item("magnitude", a.peak.magnitude)?;
                d.set_item("branches", a.branches.iter().map(|b| b.0).collect::<Vec<u8>>())?;
                d.set_item("residual_mhz", a.residual)?;
                Ok(d)
            })
            .collect()
    }

    /// 4×4 pulse propagator as nested lists of complex numbers.
    fn pulse_unitary(&self) -> PyResult<Vec<Vec<Complex64>>> {
        let u = pulse_propagator(self.inner.pulse_model, &self.inner.pulse).map_err(err)?;
        Ok(u.0.iter().map(|row| row.to_vec()).collect())
    }

    /// `{"c0": float, "terms": [{"pair", "omega_mhz", "x"}]}` for a pure initial state.
    fn decomposition<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = decomposition_for_settings(&self.inner).map_err(err)?;
        let out = PyDict::new(py);
        out.set_item("c0", d.c0)?;
        let terms = d
            .terms
            .iter()
            .map(|t| {
                let row = PyDict::new(py);
                row.set_item("pair", (t.pair.0.label(), t.pair.1.label()))?;
                row.set_item("omega_mhz", angular_to_mhz(t.omega))?;
                row.set_item("x", t.x)?;
                Ok(row)
            })
            .collect::<PyResult<Vec<_>>>()?;
        out.set_item("terms", terms)?;
        Ok(out)
    }

    /// Rows `(t_ns, x, y, z, pair_population)` for the given sublevel pair.
    #[pyo3(signature = (pair = ("+3/2".to_string(), "+1/2".to_string()), free_ns = 1000.0, step_ns = None))]
    fn bloch(&self, pair: (String, String), free_ns: f64, step_ns: Option<f64>) -> PyResult<Vec<BlochRow>> {
        let pair = (parse_level(&pair.0)?, parse_level(&pair.1)?);
        let step = match step_ns {
            Some(ns) => ns_to_us(ns),
            None if self.inner.pulse.duration > 0.0 => default_intra_step(&self.inner),
            None => ns_to_us(1.0),
        };
        let traj = trajectory(&self.inner, pair, ns_to_us(free_ns), step).map_err(err)?;
        Ok(traj
            .iter()
            .map(|p| (us_to_ns(p.t), p.vector.x, p.vector.y, p.vector.z, p.vector.pair_population))
            .collect())
    }

    /// `[(delta_mhz, freq_mhz, magnitude)]` per detuning, in input order.
    #[pyo3(signature = (deltas_mhz, threads = None))]
    fn sweep(&self, py: Python<'_>, deltas_mhz: Vec<f64>, threads: Option<usize>) -> PyResult<Vec<SweepRow>> {
        let inner = self.inner;
        let spectra = py
            .detach(|| sweep_spectra(&deltas_mhz, &inner, &DftOptions::default(), threads))
            .map_err(err)?;
        Ok(spectra
            .iter()
            .map(|(d, s)| {
                let (f, m) = spectrum_lists(s);
                (*d, f, m)
            })
            .collect())
    }

    fn __repr__(&self) -> String {
        let s = &self.inner;
        format!(
            "RamseySettings(dgs_mhz={}, delta_mhz={}, omega1_mhz={}, pulse_ns={}, pulse_model='{}', dtau_ns={}, n_samples={})",
            angular_to_mhz(s.spin().dgs),
            angular_to_mhz(s.spin().delta),
            angular_to_mhz(s.spin().omega1),
            us_to_ns(s.pulse.duration),
            s.pulse_model.name(),
            us_to_ns(s.tau_grid.step),
            s.tau_grid.count
        )
    }
}

/// Six branch rows `(id, pair, freq_unfolded_mhz, freq_folded_mhz)`; the
/// folded column equals the unfolded one when `fs_mhz` is omitted.
#[pyfunction]
#[pyo3(signature = (dgs_mhz, delta_mhz, fs_mhz = None))]
fn branch_table(dgs_mhz: f64, delta_mhz: f64, fs_mhz: Option<f64>) -> Vec<(u8, String, f64, f64)> {
    let p = SpinParams::from_mhz(dgs_mhz, delta_mhz, 0.0);
    branch_frequencies(&p)
        .iter()
        .map(|b| {
            let folded = fs_mhz.map_or(b.frequency, |fs| fold(b.frequency, fs));
            (b.line.id.0, b.line.pair_label(), b.frequency, folded)
        })
        .collect()
}

/// Alias of `f` in the first Nyquist zone of `fs`.
#[pyfunction]
fn fold_frequency(f: f64, fs: f64) -> f64 {
    fold(f, fs)
}

#[pymodule(name = "ququart")]
fn ququart_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRamseySettings>()?;
    m.add_function(wrap_pyfunction!(branch_table, m)?)?;
    m.add_function(wrap_pyfunction!(fold_frequency, m)?)?;
    Ok(())
}
