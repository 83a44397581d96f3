//! Fourier analysis of Ramsey traces and the six-branch frequency model.
//!
//! Everything here works in ordinary frequency: with times in µs, DFT bin
//! spacings come out directly in MHz.

use std::fmt;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{QuditError, Result};
use crate::hamiltonian::{SpinParams, Sublevel};
use crate::ramsey::{ramsey_signal_trace, RamseySettings};
use crate::units::angular_to_mhz;

/// Uniformly sampled real signal. `t0` and `dt` in µs.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeTrace {
    pub t0: f64,
    pub dt: f64,
    pub samples: Vec<f64>,
}

impl TimeTrace {
    pub fn new(t0: f64, dt: f64, samples: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(QuditError::InvalidParameter(format!(
                "sample spacing must be > 0, got {dt}"
            )));
        }
        if samples.len() < 2 {
            return Err(QuditError::TooFewSamples(samples.len()));
        }
        Ok(TimeTrace { t0, dt, samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + self.dt * k as f64
    }

    /// `f_s = 1/Δτ` in MHz.
    pub fn sampling_rate_mhz(&self) -> f64 {
        1.0 / self.dt
    }

    /// Acquisition-limited resolution `1/(N·Δτ)` in MHz.
    pub fn resolution_mhz(&self) -> f64 {
        1.0 / (self.dt * self.len() as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Window {
    None,
    #[default]
    Hann,
}

impl Window {
    pub fn name(self) -> &'static str {
        match self {
            Window::None => "none",
            Window::Hann => "hann",
        }
    }

    fn weights(self, n: usize) -> Vec<f64> {
        match self {
            Window::None => vec![1.0; n],
            Window::Hann => (0..n)
                .map(|k| 0.5 - 0.5 * (std::f64::consts::TAU * k as f64 / n as f64).cos())
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DftOptions {
    pub window: Window,
    pub zero_pad: usize,
    pub mean_subtract: bool,
}

impl Default for DftOptions {
    fn default() -> Self {
        DftOptions {
            window: Window::Hann,
            zero_pad: 4,
            mean_subtract: true,
        }
    }
}

impl DftOptions {
    /// Rectangular window, no padding, no mean subtraction.
    pub fn bare() -> Self {
        DftOptions {
            window: Window::None,
            zero_pad: 1,
            mean_subtract: false,
        }
    }
}

/// One-sided magnitude spectrum over `[0, f_N]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    /// Bin spacing of the (padded) transform, MHz.
    pub df: f64,
    /// Acquisition resolution `1/(N·Δτ)`, MHz.
    pub resolution: f64,
    /// Nyquist frequency `f_s/2`, MHz.
    pub nyquist: f64,
    pub magnitudes: Vec<f64>,
    pub options: DftOptions,
    pub sample_count: usize,
}

impl Spectrum {
    pub fn frequency(&self, bin: usize) -> f64 {
        self.df * bin as f64
    }

    pub fn max_magnitude(&self) -> f64 {
        self.magnitudes.iter().fold(0.0, |a, &m| a.max(m))
    }

    /// Sum of `|X_k|²` over the full two-sided spectrum, reconstructed from
    /// the one-sided bins.
    pub fn two_sided_power(&self) -> f64 {
        let m = self.sample_count * self.options.zero_pad;
        self.magnitudes
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let w = if k == 0 || (m % 2 == 0 && k == m / 2) { 1.0 } else { 2.0 };
                w * v * v
            })
            .sum()
    }
}

/// `|DFT|` of the prepared samples, normalized by `1/√N`.
pub fn dft_magnitude(trace: &TimeTrace, opts: &DftOptions) -> Result<Spectrum> {
    let n = trace.len();
    if n < 2 {
        return Err(QuditError::TooFewSamples(n));
    }
    if opts.zero_pad == 0 {
        return Err(QuditError::InvalidParameter("zero-pad factor must be >= 1".into()));
    }
    let weights = opts.window.weights(n);
    // Window-weighted mean, so the windowed DC bin vanishes exactly.
    let mean = if opts.mean_subtract {
        let wsum: f64 = weights.iter().sum();
        trace.samples.iter().zip(&weights).map(|(x, w)| x * w).sum::<f64>() / wsum
    } else {
        0.0
    };
    let padded = n * opts.zero_pad;
    let mut buf: Vec<Complex<f64>> = trace
        .samples
        .iter()
        .zip(&weights)
        .map(|(x, w)| Complex::new((x - mean) * w, 0.0))
        .collect();
    buf.resize(padded, Complex::new(0.0, 0.0));

    FftPlanner::<f64>::new().plan_fft_forward(padded).process(&mut buf);

    let norm = 1.0 / (n as f64).sqrt();
    let magnitudes = buf[..=padded / 2].iter().map(|z| z.norm() * norm).collect();
    Ok(Spectrum {
        df: 1.0 / (padded as f64 * trace.dt),
        resolution: trace.resolution_mhz(),
        nyquist: 0.5 * trace.sampling_rate_mhz(),
        magnitudes,
        options: *opts,
        sample_count: n,
    })
}

/// Branch label ①–⑥.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BranchId(pub u8);

impl fmt::Display for BranchId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A linear branch `Ω(δ) = |slope·δ + intercept·D_gs|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BranchLine {
    pub id: BranchId,
    pub pair: (Sublevel, Sublevel),
    pub slope: u8,
    /// Intercept as a multiple of `D_gs`.
    pub intercept_dgs: u8,
}

use Sublevel::{MinusHalf as M1, MinusThreeHalves as M3, PlusHalf as P1, PlusThreeHalves as P3};

/// The six branches, labeled in ascending frequency at small positive `δ`.
pub const BRANCHES: [BranchLine; 6] = [
    BranchLine { id: BranchId(1), pair: (P1, P3), slope: 1, intercept_dgs: 0 },
    BranchLine { id: BranchId(2), pair: (M1, P1), slope: 1, intercept_dgs: 2 },
    BranchLine { id: BranchId(3), pair: (M1, P3), slope: 2, intercept_dgs: 2 },
    BranchLine { id: BranchId(4), pair: (M1, M3), slope: 1, intercept_dgs: 4 },
    BranchLine { id: BranchId(5), pair: (M3, P1), slope: 2, intercept_dgs: 6 },
    BranchLine { id: BranchId(6), pair: (M3, P3), slope: 3, intercept_dgs: 6 },
];

impl BranchLine {
    /// Signed linear form `slope·δ + intercept·D_gs` in rad/µs.
    pub fn signed_angular(&self, p: &SpinParams) -> f64 {
        self.slope as f64 * p.delta + self.intercept_dgs as f64 * p.dgs
    }

    /// Unfolded `Ω/2π` in MHz.
    pub fn frequency_mhz(&self, p: &SpinParams) -> f64 {
        angular_to_mhz(self.signed_angular(p).abs())
    }

    /// Intercept `intercept·D_gs/2π` in MHz.
    pub fn intercept_mhz(&self, p: &SpinParams) -> f64 {
        angular_to_mhz(self.intercept_dgs as f64 * p.dgs)
    }

    pub fn pair_label(&self) -> String {
        format!("{}:{}", self.pair.0, self.pair.1)
    }

    pub fn by_pair(a: Sublevel, b: Sublevel) -> Option<&'static BranchLine> {
        BRANCHES
            .iter()
            .find(|l| l.pair == (a, b) || l.pair == (b, a))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchValue {
    pub line: BranchLine,
    /// Unfolded frequency, MHz.
    pub frequency: f64,
}

pub fn branch_frequencies(p: &SpinParams) -> [BranchValue; 6] {
    BRANCHES.map(|line| BranchValue {
        line,
        frequency: line.frequency_mhz(p),
    })
}

/// Branch frequencies folded into the first Nyquist zone of `fs` (MHz).
pub fn folded_branch_frequencies(p: &SpinParams, fs: f64) -> [(BranchId, f64); 6] {
    branch_frequencies(p).map(|b| (b.line.id, fold_frequency(b.frequency, fs)))
}

/// Alias of `f` under uniform sampling at `fs`: `|f − fs·round(f/fs)|`.
pub fn fold_frequency(f: f64, fs: f64) -> f64 {
    (f - fs * (f / fs).round()).abs()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    /// Interpolated frequency, MHz.
    pub frequency: f64,
    pub magnitude: f64,
    pub bin_index: usize,
}

/// Local maxima of at least `min_prominence × max`, refined by three-point
/// parabolic interpolation, greedily thinned to `min_separation` (MHz) and
/// sorted by descending magnitude.
pub fn extract_peaks(spec: &Spectrum, min_prominence: f64, min_separation: f64) -> Vec<Peak> {
    extract_peaks_above(spec, min_prominence * spec.max_magnitude(), min_separation)
}

/// As [`extract_peaks`] with an absolute magnitude threshold.
pub fn extract_peaks_above(spec: &Spectrum, threshold: f64, min_separation: f64) -> Vec<Peak> {
    let m = &spec.magnitudes;
    let n = m.len();
    if n == 0 || spec.max_magnitude() == 0.0 {
        return Vec::new();
    }
    let mut candidates: Vec<Peak> = (0..n)
        .filter(|&k| {
            let left = k == 0 || m[k] > m[k - 1];
            let right = k + 1 == n || m[k] >= m[k + 1];
            left && right && m[k] > 0.0 && m[k] >= threshold
        })
        .map(|k| refine(spec, k))
        .collect();
    candidates.sort_by(|a, b| {
        b.magnitude
            .total_cmp(&a.magnitude)
            .then(a.bin_index.cmp(&b.bin_index))
    });
    let mut kept: Vec<Peak> = Vec::new();
    for c in candidates {
        if kept
            .iter()
            .all(|k| (k.frequency - c.frequency).abs() >= min_separation)
        {
            kept.push(c);
        }
    }
    kept
}

fn refine(spec: &Spectrum, k: usize) -> Peak {
    let m = &spec.magnitudes;
    let centre = Peak {
        frequency: spec.frequency(k),
        magnitude: m[k],
        bin_index: k,
    };
    if k == 0 || k + 1 >= m.len() {
        return centre;
    }
    let (a, b, c) = (m[k - 1], m[k], m[k + 1]);
    let denom = a - 2.0 * b + c;
    if denom >= 0.0 {
        return centre;
    }
    let offset = (0.5 * (a - c) / denom).clamp(-0.5, 0.5);
    Peak {
        frequency: (spec.df * (k as f64 + offset)).clamp(0.0, spec.nyquist),
        magnitude: b - 0.25 * (a - c) * offset,
        bin_index: k,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    pub peak: Peak,
    /// Every branch within tolerance, nearest first. Empty when unassigned.
    pub branches: Vec<BranchId>,
    /// `peak − nearest branch` (MHz), when assigned.
    pub residual: Option<f64>,
}

impl Assignment {
    pub fn is_assigned(&self) -> bool {
        !self.branches.is_empty()
    }
}

pub fn assign_peaks(peaks: &[Peak], branches_folded: &[(BranchId, f64)], tolerance: f64) -> Vec<Assignment> {
    peaks
        .iter()
        .map(|peak| {
            let mut near: Vec<(f64, BranchId, f64)> = branches_folded
                .iter()
                .map(|&(id, f)| ((peak.frequency - f).abs(), id, peak.frequency - f))
                .filter(|(d, _, _)| *d <= tolerance)
                .collect();
            near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            Assignment {
                peak: *peak,
                residual: near.first().map(|n| n.2),
                branches: near.into_iter().map(|n| n.1).collect(),
            }
        })
        .collect()
}

/// Inclusive detuning range in MHz. Empty when `max < min`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaRange {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl DeltaRange {
    pub fn single(delta_mhz: f64) -> Self {
        DeltaRange {
            min: delta_mhz,
            max: delta_mhz,
            step: 1.0,
        }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !self.step.is_finite() || !self.min.is_finite() || !self.max.is_finite() {
            return Err(QuditError::InvalidParameter(format!(
                "detuning range needs finite bounds and step > 0 (got {:?})",
                self
            )));
        }
        if self.max < self.min {
            return Ok(Vec::new());
        }
        let n = ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..n).map(|k| self.min + self.step * k as f64).collect())
    }
}

/// One `(δ, f, |X|)` cell of a detuning map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRecord {
    pub delta_mhz: f64,
    pub freq_mhz: f64,
    pub magnitude: f64,
}

fn run_point(delta_mhz: f64, template: &RamseySettings, opts: &DftOptions) -> Result<Spectrum> {
    let spin = template.spin().with_delta(crate::units::mhz_to_angular(delta_mhz));
    let trace = ramsey_signal_trace(&template.with_spin(spin))?;
    dft_magnitude(&trace, opts)
}

/// Spectrum for every detuning, in input order. `threads = None` uses the
/// global pool; each point is computed independently, so the result does
/// not depend on the thread count.
pub fn sweep_spectra(
    deltas_mhz: &[f64],
    template: &RamseySettings,
    opts: &DftOptions,
    threads: Option<usize>,
) -> Result<Vec<(f64, Spectrum)>> {
    let job = || {
        deltas_mhz
            .par_iter()
            .map(|&d| run_point(d, template, opts).map(|s| (d, s)))
            .collect::<Result<Vec<_>>>()
    };
    match threads {
        None => job(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| QuditError::InvalidParameter(format!("thread pool: {e}")))?
            .install(job),
    }
}

/// Long-format detuning map, ordered by δ then frequency.
pub fn sweep_map(
    range: &DeltaRange,
    template: &RamseySettings,
    opts: &DftOptions,
    threads: Option<usize>,
) -> Result<Vec<SweepRecord>> {
    let spectra = sweep_spectra(&range.values()?, template, opts, threads)?;
    Ok(spectra
        .iter()
        .flat_map(|(d, s)| {
            s.magnitudes.iter().enumerate().map(move |(k, &m)| SweepRecord {
                delta_mhz: *d,
                freq_mhz: s.frequency(k),
                magnitude: m,
            })
        })
        .collect())
}
