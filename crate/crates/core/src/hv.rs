//! The vector hidden variable and the devices acting on it.
//!
//! An [`IntervalHV`] is the transverse vector `V(t) = f(t) e_x + g(t) e_y`
//! sampled on a fixed step over one i-interval. Everything is expressed in
//! threshold units: a detector fires once per unit of integrated squared
//! modulus.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, Error, Result};
use crate::state::BellState;

/// Detection threshold `u`. Moduli are scaled so that it equals one.
pub const THRESHOLD: f64 = 1.0;

/// Relative slack used when comparing an integral with a threshold multiple.
///
/// Integrals that are exactly `q·u` in exact arithmetic come out of the
/// trigonometry a few ulps low; without the slack an aligned analyzer would
/// occasionally miss its detection.
pub const DETECTION_TOLERANCE: f64 = 1e-9;

/// Reduces an angle to `[0, π)`. Polarization directions are defined mod π.
pub fn reduce_angle(angle: f64) -> f64 {
    let r = angle.rem_euclid(PI);
    // rem_euclid may return exactly PI for tiny negative inputs
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// Distance between two directions, folded into `[0, π/2]`.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = reduce_angle(a - b);
    d.min(PI - d)
}

/// One i-interval of a vector hidden variable.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalHV {
    samples: Vec<(f64, f64)>,
    dt: f64,
}

impl IntervalHV {
    pub fn new(samples: Vec<(f64, f64)>, dt: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Input("interval needs at least one sample".into()));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Input(format!("sample step must be positive, got {dt}")));
        }
        if samples.iter().any(|(f, g)| !f.is_finite() || !g.is_finite()) {
            return Err(Error::Input("amplitudes must be finite".into()));
        }
        Ok(IntervalHV { samples, dt })
    }

    /// Single-sample interval of unit length.
    pub fn constant(f: f64, g: f64) -> Self {
        IntervalHV {
            samples: vec![(f, g)],
            dt: 1.0,
        }
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Interval length `T = dt · len`.
    pub fn duration(&self) -> f64 {
        self.dt * self.samples.len() as f64
    }

    /// `m = Σ (f² + g²)·dt`, the integrated squared modulus.
    pub fn modulus_integral(&self) -> f64 {
        self.samples.iter().map(|(f, g)| f * f + g * g).sum::<f64>() * self.dt
    }

    /// `Σ f²·dt`.
    pub fn x_integral(&self) -> f64 {
        self.samples.iter().map(|(f, _)| f * f).sum::<f64>() * self.dt
    }

    /// `Σ f·g·dt`.
    pub fn cross_integral(&self) -> f64 {
        self.samples.iter().map(|(f, g)| f * g).sum::<f64>() * self.dt
    }

    /// Direction of the first non-zero sample, in `[0, π)`.
    pub fn angle(&self) -> Option<f64> {
        self.samples
            .iter()
            .find(|(f, g)| *f != 0.0 || *g != 0.0)
            .map(|(f, g)| reduce_angle(g.atan2(*f)))
    }

    fn map(&self, op: impl Fn(f64, f64) -> (f64, f64)) -> IntervalHV {
        IntervalHV {
            samples: self.samples.iter().map(|&(f, g)| op(f, g)).collect(),
            dt: self.dt,
        }
    }
}

/// Free-function form of [`IntervalHV::modulus_integral`].
pub fn modulus_integral(hv: &IntervalHV) -> f64 {
    hv.modulus_integral()
}

/// An ideal two-output polarization analyzer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Analyzer {
    angle: f64,
    cos: f64,
    sin: f64,
}

impl Analyzer {
    pub fn new(angle: f64) -> Self {
        let (sin, cos) = angle.sin_cos();
        Analyzer { angle, cos, sin }
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// Splits `hv` into its components parallel and orthogonal to the axis.
    pub fn split(&self, hv: &IntervalHV) -> (IntervalHV, IntervalHV) {
        let (c, s) = (self.cos, self.sin);
        let parallel = hv.map(|f, g| {
            let p = f * c + g * s;
            (p * c, p * s)
        });
        let orthogonal = hv.map(|f, g| {
            let o = -f * s + g * c;
            (-o * s, o * c)
        });
        (parallel, orthogonal)
    }

    /// Transmitted and reflected integrals, without building the split vectors.
    pub fn integrals(&self, hv: &IntervalHV) -> (f64, f64) {
        let (c, s) = (self.cos, self.sin);
        let (mut t, mut r) = (0.0, 0.0);
        for &(f, g) in &hv.samples {
            let p = f * c + g * s;
            let o = -f * s + g * c;
            t += p * p;
            r += o * o;
        }
        (t * hv.dt, r * hv.dt)
    }
}

/// Projects `hv` onto the analyzer axis at `alpha`; returns
/// `(parallel, orthogonal)`.
pub fn project(hv: &IntervalHV, alpha: f64) -> (IntervalHV, IntervalHV) {
    Analyzer::new(alpha).split(hv)
}

/// Station-B hidden variable for the given entangled state.
///
/// Per sample `(f, g)` maps to `(g, −f)` for Ψ⁻, `(f, g)` for Φ⁺,
/// `(g, f)` for Ψ⁺ and `(f, −g)` for Φ⁻.
pub fn partner_hv(hv: &IntervalHV, state: BellState) -> IntervalHV {
    hv.map(|f, g| partner_components(f, g, state))
}

pub(crate) fn partner_components(f: f64, g: f64, state: BellState) -> (f64, f64) {
    match state {
        BellState::PsiMinus => (g, -f),
        BellState::PhiPlus => (f, g),
        BellState::PsiPlus => (g, f),
        BellState::PhiMinus => (f, -g),
    }
}

/// How the per-interval direction is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AngleMode {
    Fixed { angle: f64 },
    Uniform,
}

/// How the per-interval integral `m` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModulusMode {
    Fixed { m: f64 },
    /// Uniform on `[lo, hi]`; the ensemble mean must equal the threshold.
    Uniform { lo: f64, hi: f64 },
}

impl ModulusMode {
    pub fn mean(&self) -> f64 {
        match *self {
            ModulusMode::Fixed { m } => m,
            ModulusMode::Uniform { lo, hi } => 0.5 * (lo + hi),
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ModulusMode::Fixed { m } => m,
            ModulusMode::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
        }
    }
}

/// Time profile of `V(t)` inside an interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Waveform {
    Constant,
    /// Amplitude `∝ cos(2π·cycles·t/T)`; the direction stays fixed.
    Harmonic { cycles: u32 },
}

/// Parameters of the hidden-variable source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub angle_mode: AngleMode,
    pub modulus_mode: ModulusMode,
    pub samples_per_interval: usize,
    pub waveform: Waveform,
    /// Interval length `T`; the sample step is `T / samples_per_interval`.
    pub interval_length: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            angle_mode: AngleMode::Uniform,
            modulus_mode: ModulusMode::Fixed { m: THRESHOLD },
            samples_per_interval: 1,
            waveform: Waveform::Constant,
            interval_length: 1.0,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples_per_interval == 0 {
            return config_err("samples_per_interval must be at least 1");
        }
        if !(self.interval_length.is_finite() && self.interval_length > 0.0) {
            return config_err("interval_length must be positive");
        }
        if let AngleMode::Fixed { angle } = self.angle_mode {
            if !angle.is_finite() {
                return config_err("fixed angle must be finite");
            }
        }
        match self.modulus_mode {
            ModulusMode::Fixed { m } => {
                if !(m.is_finite() && m >= 0.0) {
                    return config_err(format!("fixed integral must be >= 0, got {m}"));
                }
            }
            ModulusMode::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
                    return config_err(format!("uniform integral needs 0 <= lo <= hi, got [{lo}, {hi}]"));
                }
                if ((lo + hi) - 2.0 * THRESHOLD).abs() > 1e-12 {
                    return config_err(format!(
                        "uniform integral mean must equal the threshold (lo + hi = 2), got {}",
                        lo + hi
                    ));
                }
            }
        }
        if let Waveform::Harmonic { cycles } = self.waveform {
            if cycles == 0 {
                return config_err("harmonic waveform needs at least one cycle");
            }
        }
        Ok(())
    }

    fn dt(&self) -> f64 {
        self.interval_length / self.samples_per_interval as f64
    }
}

/// Draws one interval from the source.
pub fn generate_interval<R: Rng + ?Sized>(rng: &mut R, cfg: &GeneratorConfig) -> Result<IntervalHV> {
    cfg.validate()?;
    let angle = match cfg.angle_mode {
        AngleMode::Fixed { angle } => angle,
        AngleMode::Uniform => PI * rng.random::<f64>(),
    };
    Ok(generate_with_angle(rng, cfg, angle))
}

/// Draws an interval whose direction is forced to `angle`. `cfg` must be valid.
pub(crate) fn generate_with_angle<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &GeneratorConfig,
    angle: f64,
) -> IntervalHV {
    let m = cfg.modulus_mode.draw(rng);
    shaped_interval(cfg, angle, m)
}

fn shaped_interval(cfg: &GeneratorConfig, angle: f64, m: f64) -> IntervalHV {
    let n = cfg.samples_per_interval;
    let dt = cfg.dt();
    let (sin, cos) = angle.sin_cos();
    let samples = match cfg.waveform {
        Waveform::Constant => {
            let amp = (m / cfg.interval_length).sqrt();
            vec![(amp * cos, amp * sin); n]
        }
        Waveform::Harmonic { cycles } => {
            let shape: Vec<f64> = (0..n)
                .map(|k| (2.0 * PI * f64::from(cycles) * k as f64 / n as f64).cos())
                .collect();
            // shape[0] == 1, so the norm is never zero
            let norm: f64 = shape.iter().map(|w| w * w).sum::<f64>() * dt;
            let scale = (m / norm).sqrt();
            shape
                .into_iter()
                .map(|w| (scale * w * cos, scale * w * sin))
                .collect()
        }
    };
    IntervalHV { samples, dt }
}

/// Counting discipline of a threshold detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Discipline {
    /// Integrate-and-fire with the residual carried to the next interval.
    #[default]
    Accumulator,
    /// One count with probability `min(1, m/u)`, memoryless.
    Bernoulli,
}

/// A threshold detector with its carried state.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorState {
    discipline: Discipline,
    residual: f64,
    threshold: f64,
}

impl DetectorState {
    pub fn new(discipline: Discipline) -> Self {
        DetectorState {
            discipline,
            residual: 0.0,
            threshold: THRESHOLD,
        }
    }

    pub fn discipline(&self) -> Discipline {
        self.discipline
    }

    /// Carried integral of the accumulator; always zero for Bernoulli.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Feeds one interval's integral and returns the number of counts.
    pub fn detect<R: Rng + ?Sized>(&mut self, m: f64, rng: &mut R) -> Result<u32> {
        check_integral(m)?;
        Ok(match self.discipline {
            Discipline::Accumulator => self.accumulate(m),
            Discipline::Bernoulli => self.bernoulli(m, rng.random()),
        })
    }

    /// Like [`detect`](Self::detect) but with the Bernoulli variate supplied
    /// by the caller. Accumulators ignore `uniform`.
    pub fn detect_with_uniform(&mut self, m: f64, uniform: f64) -> Result<u32> {
        check_integral(m)?;
        Ok(match self.discipline {
            Discipline::Accumulator => self.accumulate(m),
            Discipline::Bernoulli => self.bernoulli(m, uniform),
        })
    }

    fn accumulate(&mut self, m: f64) -> u32 {
        self.residual += m;
        let count = ((self.residual + DETECTION_TOLERANCE) / self.threshold).floor();
        self.residual = (self.residual - count * self.threshold).max(0.0);
        count as u32
    }

    fn bernoulli(&self, m: f64, uniform: f64) -> u32 {
        let p = m / self.threshold;
        if p >= 1.0 - DETECTION_TOLERANCE {
            1
        } else if p <= DETECTION_TOLERANCE {
            0
        } else {
            u32::from(uniform < p)
        }
    }
}

fn check_integral(m: f64) -> Result<()> {
    if m.is_finite() && m >= 0.0 {
        Ok(())
    } else {
        Err(Error::Input(format!("integral must be finite and >= 0, got {m}")))
    }
}

/// Detectors behind the two outputs of one analyzer.
///
/// Under the Bernoulli discipline the two ports share one uniform variate
/// `U`: the transmitted port fires when `U < m₊` and the reflected port when
/// `1 − U < m₋`. Each port keeps its own marginal law, and with
/// `m₊ + m₋ = u` exactly one of them fires.
#[derive(Debug, Clone, PartialEq)]
pub struct StationDetectors {
    pub transmitted: DetectorState,
    pub reflected: DetectorState,
}

impl StationDetectors {
    pub fn new(discipline: Discipline) -> Self {
        StationDetectors {
            transmitted: DetectorState::new(discipline),
            reflected: DetectorState::new(discipline),
        }
    }

    /// Returns `(transmitted count, reflected count)`.
    pub fn detect<R: Rng + ?Sized>(&mut self, m_t: f64, m_r: f64, rng: &mut R) -> Result<(u32, u32)> {
        let u: f64 = rng.random();
        Ok((
            self.transmitted.detect_with_uniform(m_t, u)?,
            self.reflected.detect_with_uniform(m_r, 1.0 - u)?,
        ))
    }
}

/// Angle of the orthogonal branch at an analyzer set to `alpha`.
pub(crate) fn orthogonal_angle(alpha: f64) -> f64 {
    alpha + FRAC_PI_2
}
