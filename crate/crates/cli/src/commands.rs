//! Subcommand pipelines. Each returns its tables; writing is left to the caller.

use anyhow::{anyhow, bail, Context, Result};
use ququart::bloch::{default_intra_step, trajectory};
use ququart::pulse::{pulse_propagator, PulseModel};
use ququart::ramsey::{analytic_decomposition, ramsey_signal_trace, InitialState, SignalDecomposition};
use ququart::spectral::{
    assign_peaks, branch_frequencies, dft_magnitude, extract_peaks, fold_frequency, folded_branch_frequencies,
    sweep_spectra, BranchLine, Spectrum,
};
use ququart::units::{angular_to_mhz, mhz_to_angular, ns_to_us, us_to_ns};
use ququart::{QuditError, Sublevel};

use crate::config::RunConfig;
use crate::output::{Table, Value};

pub const BRANCHES_HEADER: [&str; 7] = [
    "delta_mhz",
    "branch_id",
    "pair",
    "slope",
    "intercept_mhz",
    "freq_unfolded_mhz",
    "freq_folded_mhz",
];
pub const TRACE_HEADER: [&str; 2] = ["tau_ns", "signal"];
pub const SPECTRUM_HEADER: [&str; 2] = ["freq_mhz", "magnitude"];
pub const SWEEP_HEADER: [&str; 3] = ["delta_mhz", "freq_mhz", "magnitude"];
pub const PEAKS_HEADER: [&str; 5] = ["delta_mhz", "peak_freq_mhz", "magnitude", "branch_id", "residual_mhz"];
pub const COEFFICIENTS_HEADER: [&str; 5] = ["pair", "omega_mhz", "abs_x", "arg_x_rad", "c0"];
pub const BLOCH_HEADER: [&str; 5] = ["t_ns", "x", "y", "z", "pair_population"];

/// Largest tolerated gap between the cosine reconstruction and propagation.
pub const RECONSTRUCTION_TOLERANCE: f64 = 1e-10;

fn validated(cfg: &RunConfig) -> Result<()> {
    cfg.validate()?;
    cfg.settings().validate()?;
    Ok(())
}

pub fn branches(cfg: &RunConfig) -> Result<Table> {
    validated(cfg)?;
    let fs = cfg.sampling_rate_mhz();
    let mut table = Table::new(&BRANCHES_HEADER);
    for delta in cfg.delta_range().values()? {
        let spin = cfg.spin().with_delta(mhz_to_angular(delta));
        for b in branch_frequencies(&spin) {
            table.push(vec![
                delta.into(),
                Value::Int(b.line.id.0 as i64),
                b.line.pair_label().into(),
                Value::Int(b.line.slope as i64),
                b.line.intercept_mhz(&spin).into(),
                b.frequency.into(),
                fold_frequency(b.frequency, fs).into(),
            ]);
        }
    }
    Ok(table)
}

fn spectrum_table(spec: &Spectrum) -> Table {
    let mut table = Table::new(&SPECTRUM_HEADER);
    for (k, &m) in spec.magnitudes.iter().enumerate() {
        table.push(vec![spec.frequency(k).into(), m.into()]);
    }
    table
}

pub struct SimulateOutput {
    pub trace: Table,
    pub spectrum: Table,
}

pub fn simulate(cfg: &RunConfig) -> Result<SimulateOutput> {
    validated(cfg)?;
    let settings = cfg.settings();
    let trace = ramsey_signal_trace(&settings)?;
    let mut table = Table::new(&TRACE_HEADER);
    for (k, &s) in trace.samples.iter().enumerate() {
        table.push(vec![us_to_ns(trace.time(k)).into(), s.into()]);
    }
    let spec = dft_magnitude(&trace, &cfg.dft_options())?;
    Ok(SimulateOutput {
        trace: table,
        spectrum: spectrum_table(&spec),
    })
}

fn sweep_points(cfg: &RunConfig, threads: Option<usize>) -> Result<Vec<(f64, Spectrum)>> {
    validated(cfg)?;
    let deltas = cfg.delta_range().values()?;
    Ok(sweep_spectra(&deltas, &cfg.settings(), &cfg.dft_options(), threads)?)
}

pub fn sweep(cfg: &RunConfig, threads: Option<usize>) -> Result<Table> {
    let mut table = Table::new(&SWEEP_HEADER);
    for (delta, spec) in sweep_points(cfg, threads)? {
        for (k, &m) in spec.magnitudes.iter().enumerate() {
            table.push(vec![delta.into(), spec.frequency(k).into(), m.into()]);
        }
    }
    Ok(table)
}

/// Peak list per detuning, frequency-ascending. Unassigned peaks carry
/// empty `branch_id` and `residual_mhz` cells; peaks matching several
/// branches list them joined by `;`, nearest first.
pub fn sweep_peaks(cfg: &RunConfig, threads: Option<usize>) -> Result<Table> {
    let fs = cfg.sampling_rate_mhz();
    let mut table = Table::new(&PEAKS_HEADER);
    for (delta, spec) in sweep_points(cfg, threads)? {
        let spin = cfg.spin().with_delta(mhz_to_angular(delta));
        let mut peaks = extract_peaks(&spec, cfg.peak_prominence, cfg.peak_min_sep());
        peaks.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
        for a in assign_peaks(&peaks, &folded_branch_frequencies(&spin, fs), cfg.assign_tol()) {
            let ids: Vec<String> = a.branches.iter().map(|b| b.to_string()).collect();
            let id = match ids.len() {
                0 => Value::Empty,
                1 => Value::Int(a.branches[0].0 as i64),
                _ => Value::Text(ids.join(";")),
            };
            table.push(vec![
                delta.into(),
                a.peak.frequency.into(),
                a.peak.magnitude.into(),
                id,
                a.residual.into(),
            ]);
        }
    }
    Ok(table)
}

pub struct CoefficientsOutput {
    pub table: Table,
    /// Largest pointwise reconstruction error per model, when requested.
    pub reconstruction: Vec<(PulseModel, f64)>,
}

fn decomposition(cfg: &RunConfig, model: PulseModel) -> Result<SignalDecomposition> {
    let s = cfg.settings();
    let u = pulse_propagator(model, &s.pulse)?;
    match analytic_decomposition(&u, &s.initial_state.state(), s.spin(), s.observable) {
        Err(QuditError::MixedState) => bail!(
            "coefficients need a pure initial state; run once with initial_state = plus_half and once with \
             initial_state = minus_half and weight each component by 1/2"
        ),
        other => Ok(other?),
    }
}

/// Largest `|S_decomposed(τ) − S_propagated(τ)|` over the configured grid,
/// ignoring any decay envelope.
pub fn reconstruction_error(cfg: &RunConfig, model: PulseModel, d: &SignalDecomposition) -> Result<f64> {
    let mut s = cfg.settings().with_model(model);
    s.t2star = None;
    let trace = ramsey_signal_trace(&s)?;
    Ok(trace
        .samples
        .iter()
        .enumerate()
        .map(|(k, &v)| (d.evaluate(trace.time(k)) - v).abs())
        .fold(0.0, f64::max))
}

pub fn coefficients(cfg: &RunConfig, both_models: bool, check: bool) -> Result<CoefficientsOutput> {
    validated(cfg)?;
    if matches!(cfg.initial_state, InitialState::MixedHalf) {
        bail!(
            "coefficients need a pure initial state; run once with initial_state = plus_half and once with \
             initial_state = minus_half and weight each component by 1/2"
        );
    }
    let models = if both_models {
        vec![PulseModel::Exact, PulseModel::Hard]
    } else {
        vec![cfg.pulse_model]
    };
    let mut header: Vec<&'static str> = Vec::new();
    if both_models {
        header.push("model");
    }
    header.extend(COEFFICIENTS_HEADER);
    let mut table = Table::new(&header);
    let mut reconstruction = Vec::new();
    for model in models {
        let d = decomposition(cfg, model).with_context(|| format!("{} pulse model", model.name()))?;
        for t in &d.terms {
            let label = BranchLine::by_pair(t.pair.0, t.pair.1)
                .map(|b| b.pair_label())
                .ok_or_else(|| anyhow!("no branch for pair {:?}", t.pair))?;
            let mut row: Vec<Value> = Vec::new();
            if both_models {
                row.push(model.name().into());
            }
            row.extend([
                label.into(),
                angular_to_mhz(t.omega).into(),
                t.x.norm().into(),
                t.x.arg().into(),
                d.c0.into(),
            ]);
            table.push(row);
        }
        if check {
            reconstruction.push((model, reconstruction_error(cfg, model, &d)?));
        }
    }
    Ok(CoefficientsOutput { table, reconstruction })
}

/// Parses `"+3/2,+1/2"` (or `:`-separated) into an ordered pair.
pub fn parse_pair(text: &str) -> Result<(Sublevel, Sublevel)> {
    let (a, b) = text
        .split_once([',', ':'])
        .ok_or_else(|| anyhow!("pair must look like `+3/2,+1/2`, got `{text}`"))?;
    let level = |s: &str| Sublevel::parse(s).ok_or_else(|| anyhow!("unknown sublevel `{s}` in pair `{text}`"));
    let pair = (level(a)?, level(b)?);
    if pair.0 == pair.1 {
        bail!("pair needs two distinct sublevels, got `{text}`");
    }
    Ok(pair)
}

pub fn bloch(cfg: &RunConfig, pair: (Sublevel, Sublevel), free_ns: f64, step_ns: Option<f64>) -> Result<Table> {
    validated(cfg)?;
    let s = cfg.settings();
    let step = match step_ns {
        Some(ns) => ns_to_us(ns),
        None if s.pulse.duration > 0.0 => default_intra_step(&s),
        None => ns_to_us(1.0),
    };
    let mut table = Table::new(&BLOCH_HEADER);
    for p in trajectory(&s, pair, ns_to_us(free_ns), step)? {
        let v = p.vector;
        table.push(vec![
            us_to_ns(p.t).into(),
            v.x.into(),
            v.y.into(),
            v.z.into(),
            v.pair_population.into(),
        ]);
    }
    Ok(table)
}
