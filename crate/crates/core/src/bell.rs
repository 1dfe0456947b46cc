//! Two-station experiments under the vector hidden-variable model.
//!
//! Every interval the source emits a station-A vector, station B receives the
//! partner vector dictated by the entangled state, and each station splits its
//! vector at a two-output analyzer feeding one threshold detector per output.
//! Joint detections are tallied into a 2×2 table.
//!
//! The direction of the station-A vector is drawn according to a
//! [`SamplingSemantics`]. Under [`SamplingSemantics::Projection`] it is
//! parallel or orthogonal to the station-A analyzer with equal weight, which is
//! how a sequential program realizes the projection of every incoming vector
//! onto the analyzer axes. [`SamplingSemantics::NaiveUniform`] draws a
//! setting-independent uniform direction instead and serves as the control.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, Error, Result};
use crate::hv::{
    generate_with_angle, orthogonal_angle, partner_hv, Analyzer, Discipline, GeneratorConfig,
    StationDetectors,
};
use crate::rng::{run_intervals, Merge};
use crate::state::BellState;
use crate::stats::{binomial_stderr, correlation_stderr};

/// How station A's hidden-variable direction is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingSemantics {
    /// Direction `α` or `α + π/2` with probability ½ each.
    #[default]
    Projection,
    /// Direction uniform on `[0, π)`, independent of the settings.
    NaiveUniform,
}

impl SamplingSemantics {
    pub fn name(self) -> &'static str {
        match self {
            SamplingSemantics::Projection => "projection",
            SamplingSemantics::NaiveUniform => "naive-uniform",
        }
    }

    fn draw_angle<R: Rng + ?Sized>(self, rng: &mut R, alpha: f64) -> f64 {
        match self {
            SamplingSemantics::Projection => {
                if rng.random::<bool>() {
                    alpha
                } else {
                    orthogonal_angle(alpha)
                }
            }
            SamplingSemantics::NaiveUniform => PI * rng.random::<f64>(),
        }
    }
}

impl std::str::FromStr for SamplingSemantics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "projection" => Ok(SamplingSemantics::Projection),
            "naive-uniform" | "naive" | "uniform" => Ok(SamplingSemantics::NaiveUniform),
            other => Err(Error::Config(format!("unknown sampling semantics `{other}`"))),
        }
    }
}

fn one() -> usize {
    1
}

/// Full description of one two-station run.
///
/// The angle mode of [`GeneratorConfig`] is ignored: the sampling semantics
/// decide the station-A direction. Partition count only affects scheduling
/// and is therefore not serialized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub state: BellState,
    pub semantics: SamplingSemantics,
    pub alpha: f64,
    pub beta: f64,
    pub n_intervals: u64,
    pub seed: u64,
    pub generator: GeneratorConfig,
    pub discipline: Discipline,
    #[serde(skip, default = "one")]
    pub partitions: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            state: BellState::PsiMinus,
            semantics: SamplingSemantics::Projection,
            alpha: 0.0,
            beta: 0.0,
            n_intervals: 1_000_000,
            seed: 0,
            generator: GeneratorConfig::default(),
            discipline: Discipline::Accumulator,
            partitions: 1,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_intervals == 0 {
            return config_err("n_intervals must be at least 1");
        }
        if !(self.alpha.is_finite() && self.beta.is_finite()) {
            return config_err("analyzer angles must be finite");
        }
        if self.partitions == 0 {
            return config_err("partition count must be at least 1");
        }
        self.generator.validate()
    }

    /// Copy with the analyzer angles replaced.
    pub fn with_angles(&self, alpha: f64, beta: f64) -> RunConfig {
        RunConfig {
            alpha,
            beta,
            ..self.clone()
        }
    }
}

/// Joint and single detection tallies of a two-station run.
///
/// `+` is the transmitted output of an analyzer and `−` the reflected one.
/// An output registers when its detector reports at least one count in the
/// interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CoincidenceCounts {
    pub n_pp: u64,
    pub n_pm: u64,
    pub n_mp: u64,
    pub n_mm: u64,
    pub a_plus: u64,
    pub a_minus: u64,
    pub b_plus: u64,
    pub b_minus: u64,
    pub n_intervals: u64,
}

impl CoincidenceCounts {
    /// Records one interval's four output flags.
    pub fn record(&mut self, a_plus: bool, a_minus: bool, b_plus: bool, b_minus: bool) {
        self.n_intervals += 1;
        self.a_plus += u64::from(a_plus);
        self.a_minus += u64::from(a_minus);
        self.b_plus += u64::from(b_plus);
        self.b_minus += u64::from(b_minus);
        self.n_pp += u64::from(a_plus && b_plus);
        self.n_pm += u64::from(a_plus && b_minus);
        self.n_mp += u64::from(a_minus && b_plus);
        self.n_mm += u64::from(a_minus && b_minus);
    }

    pub fn joint_total(&self) -> u64 {
        self.n_pp + self.n_pm + self.n_mp + self.n_mm
    }

    /// `n_pp / n_intervals`.
    pub fn pp_fraction(&self) -> f64 {
        self.n_pp as f64 / self.n_intervals as f64
    }

    /// Singles fractions `(A+, A−, B+, B−)` per interval.
    pub fn singles_fractions(&self) -> [f64; 4] {
        let n = self.n_intervals as f64;
        [
            self.a_plus as f64 / n,
            self.a_minus as f64 / n,
            self.b_plus as f64 / n,
            self.b_minus as f64 / n,
        ]
    }
}

impl Merge for CoincidenceCounts {
    fn merge(&mut self, o: Self) {
        self.n_pp += o.n_pp;
        self.n_pm += o.n_pm;
        self.n_mp += o.n_mp;
        self.n_mm += o.n_mm;
        self.a_plus += o.a_plus;
        self.a_minus += o.a_minus;
        self.b_plus += o.b_plus;
        self.b_minus += o.b_minus;
        self.n_intervals += o.n_intervals;
    }
}

/// Runs a two-station experiment and returns the coincidence table.
pub fn run_bell(cfg: &RunConfig) -> Result<CoincidenceCounts> {
    cfg.validate()?;
    let an_a = Analyzer::new(cfg.alpha);
    let an_b = Analyzer::new(cfg.beta);
    let gen = cfg.generator;
    run_intervals(
        cfg.seed,
        cfg.n_intervals,
        cfg.partitions,
        || {
            (
                StationDetectors::new(cfg.discipline),
                StationDetectors::new(cfg.discipline),
            )
        },
        |(det_a, det_b), rng, _, tally: &mut CoincidenceCounts| {
            let angle = cfg.semantics.draw_angle(rng, cfg.alpha);
            let hv_a = generate_with_angle(rng, &gen, angle);
            let hv_b = partner_hv(&hv_a, cfg.state);
            let (at, ar) = an_a.integrals(&hv_a);
            let (bt, br) = an_b.integrals(&hv_b);
            let (ap, am) = det_a.detect(at, ar, rng).expect("analyzer integrals are non-negative");
            let (bp, bm) = det_b.detect(bt, br, rng).expect("analyzer integrals are non-negative");
            tally.record(ap > 0, am > 0, bp > 0, bm > 0);
        },
    )
}

/// Correlation estimate `E = (n₊₊ + n₋₋ − n₊₋ − n₋₊) / (n₊₊ + n₋₋ + n₊₋ + n₋₊)`.
pub fn correlation(counts: &CoincidenceCounts) -> Result<f64> {
    let total = counts.joint_total();
    if total == 0 {
        return Err(Error::Statistic("no joint detections".into()));
    }
    let same = (counts.n_pp + counts.n_mm) as f64;
    let diff = (counts.n_pm + counts.n_mp) as f64;
    Ok((same - diff) / total as f64)
}

/// Analyzer settings of a CHSH experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshAngles {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl Default for ChshAngles {
    /// `(0, π/4, π/8, 3π/8)`, where the quantum prediction is maximal.
    fn default() -> Self {
        ChshAngles {
            a: 0.0,
            a_prime: FRAC_PI_4,
            b: FRAC_PI_8,
            b_prime: 3.0 * FRAC_PI_8,
        }
    }
}

impl ChshAngles {
    /// The four `(α, β)` pairs, in the order `(a,b), (a,b′), (a′,b), (a′,b′)`.
    pub fn pairs(&self) -> [(f64, f64); 4] {
        [
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        ]
    }

    /// Combines four correlations in [`pairs`](Self::pairs) order.
    pub fn combine(e: [f64; 4]) -> f64 {
        (e[0] - e[1] + e[2] + e[3]).abs()
    }
}

/// One correlation term of a CHSH estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEstimate {
    pub alpha: f64,
    pub beta: f64,
    pub counts: CoincidenceCounts,
    pub e: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshEstimate {
    pub terms: [CorrelationEstimate; 4],
    pub s: f64,
    pub stderr: f64,
}

/// Seed of the `k`-th CHSH term, so that the four estimates are independent.
pub fn term_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add((k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Runs the four CHSH terms, each with the config's angles replaced and
/// its seed from [`term_seed`].
pub(crate) fn chsh_from<F>(cfg_base: &RunConfig, angles: &ChshAngles, mut run: F) -> Result<ChshEstimate>
where
    F: FnMut(&RunConfig) -> Result<CoincidenceCounts>,
{
    let mut terms = Vec::with_capacity(4);
    for (k, (alpha, beta)) in angles.pairs().into_iter().enumerate() {
        let cfg = RunConfig {
            seed: term_seed(cfg_base.seed, k),
            ..cfg_base.with_angles(alpha, beta)
        };
        let counts = run(&cfg)?;
        let e = correlation(&counts)?;
        terms.push(CorrelationEstimate {
            alpha,
            beta,
            counts,
            e,
            stderr: correlation_stderr(e, counts.joint_total()),
        });
    }
    let terms: [CorrelationEstimate; 4] = terms.try_into().expect("four CHSH terms");
    let s = ChshAngles::combine([terms[0].e, terms[1].e, terms[2].e, terms[3].e]);
    let stderr = terms.iter().map(|t| t.stderr * t.stderr).sum::<f64>().sqrt();
    Ok(ChshEstimate { terms, s, stderr })
}

/// Four-run CHSH estimate `S = |E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)|`.
///
/// All runs share the state, semantics and source of `cfg_base`.
pub fn chsh(cfg_base: &RunConfig, angles: &ChshAngles) -> Result<ChshEstimate> {
    chsh_from(cfg_base, angles, run_bell)
}

/// Outcome of a single-beam two-analyzer chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MalusOutcome {
    pub n_intervals: u64,
    /// Intervals with a detection behind the first analyzer.
    pub subset_a: u64,
    /// Intervals of `subset_a` also detected behind the second analyzer.
    pub detected: u64,
}

impl MalusOutcome {
    pub fn fraction(&self) -> Result<f64> {
        if self.subset_a == 0 {
            return Err(Error::Statistic("no detections behind the first analyzer".into()));
        }
        Ok(self.detected as f64 / self.subset_a as f64)
    }

    /// Binomial standard error of [`fraction`](Self::fraction) at probability `p`.
    pub fn stderr_at(&self, p: f64) -> f64 {
        binomial_stderr(p, self.subset_a)
    }
}

impl Merge for MalusOutcome {
    fn merge(&mut self, o: Self) {
        self.n_intervals += o.n_intervals;
        self.subset_a += o.subset_a;
        self.detected += o.detected;
    }
}

/// Sends one beam through analyzers at `alpha` and then `beta`.
///
/// Intervals detected behind the first analyzer form subset A; the
/// transmitted component is projected at `beta` and detected again. The
/// state and `cfg.alpha`/`cfg.beta` are not used.
pub fn run_malus(cfg: &RunConfig, alpha: f64, beta: f64) -> Result<MalusOutcome> {
    let cfg = cfg.with_angles(alpha, beta);
    cfg.validate()?;
    let first = Analyzer::new(alpha);
    let second = Analyzer::new(beta);
    let gen = cfg.generator;
    run_intervals(
        cfg.seed,
        cfg.n_intervals,
        cfg.partitions,
        || {
            (
                StationDetectors::new(cfg.discipline),
                StationDetectors::new(cfg.discipline),
            )
        },
        |(det_1, det_2), rng, _, tally: &mut MalusOutcome| {
            tally.n_intervals += 1;
            let angle = cfg.semantics.draw_angle(rng, alpha);
            let hv = generate_with_angle(rng, &gen, angle);
            let (t, r) = first.integrals(&hv);
            let (passed, _) = det_1.detect(t, r, rng).expect("analyzer integrals are non-negative");
            if passed == 0 {
                return;
            }
            tally.subset_a += 1;
            let (transmitted, _) = first.split(&hv);
            let (t2, r2) = second.integrals(&transmitted);
            let (hit, _) = det_2.detect(t2, r2, rng).expect("analyzer integrals are non-negative");
            tally.detected += u64::from(hit > 0);
        },
    )
}

/// One grid point of a coincidence sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub counts: CoincidenceCounts,
    pub measured: f64,
    pub analytic: f64,
    /// Binomial standard error of the `++` fraction at the analytic value.
    pub stderr: f64,
}

/// Runs one experiment per `Δ` with `β = α − Δ`.
pub fn sweep_coincidence(cfg: &RunConfig, deltas: &[f64]) -> Result<Vec<SweepRow>> {
    if deltas.is_empty() {
        return config_err("sweep grid is empty");
    }
    deltas
        .iter()
        .map(|&delta| {
            let run = cfg.with_angles(cfg.alpha, cfg.alpha - delta);
            let counts = run_bell(&run)?;
            let analytic = analytic_fraction(cfg.state, cfg.semantics, run.alpha, run.beta);
            Ok(SweepRow {
                delta,
                alpha: run.alpha,
                beta: run.beta,
                counts,
                measured: counts.pp_fraction(),
                analytic,
                stderr: binomial_stderr(analytic, counts.n_intervals),
            })
        })
        .collect()
}

/// Conditional coincidence law `L(α, β)`: the probability that station B's
/// transmitted output fires given station A's transmitted output fired.
pub fn coincidence_law(state: BellState, alpha: f64, beta: f64) -> f64 {
    match state {
        BellState::PsiMinus => (alpha - beta).sin().powi(2),
        BellState::PhiPlus => (alpha - beta).cos().powi(2),
        BellState::PsiPlus => (alpha + beta).sin().powi(2),
        BellState::PhiMinus => (alpha + beta).cos().powi(2),
    }
}

/// Expected `n₊₊ / n_intervals` with a fixed unit integral per interval.
///
/// Projection: `½·L`. Naive uniform (Bernoulli detectors): `⅛ + L/4`.
pub fn analytic_fraction(state: BellState, semantics: SamplingSemantics, alpha: f64, beta: f64) -> f64 {
    let law = coincidence_law(state, alpha, beta);
    match semantics {
        SamplingSemantics::Projection => 0.5 * law,
        SamplingSemantics::NaiveUniform => 0.125 + 0.25 * law,
    }
}

/// Expected correlation `E(α, β)`; `2L − 1` under projection, half that
/// under naive uniform sampling.
pub fn analytic_correlation(state: BellState, semantics: SamplingSemantics, alpha: f64, beta: f64) -> f64 {
    let e = 2.0 * coincidence_law(state, alpha, beta) - 1.0;
    match semantics {
        SamplingSemantics::Projection => e,
        SamplingSemantics::NaiveUniform => 0.5 * e,
    }
}

pub fn analytic_chsh(state: BellState, semantics: SamplingSemantics, angles: &ChshAngles) -> f64 {
    let p = angles.pairs();
    ChshAngles::combine(p.map(|(a, b)| analytic_correlation(state, semantics, a, b)))
}

/// Expected Malus-chain fraction: `cos²(α − β)` under projection,
/// `¾·cos²(α − β)` under naive uniform sampling with Bernoulli detectors.
pub fn analytic_malus(semantics: SamplingSemantics, alpha: f64, beta: f64) -> f64 {
    let c2 = (alpha - beta).cos().powi(2);
    match semantics {
        SamplingSemantics::Projection => c2,
        SamplingSemantics::NaiveUniform => 0.75 * c2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hv::ModulusMode;
    use crate::stats::within_sigma;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};
    use std::f64::consts::FRAC_PI_6;

    fn base(state: BellState, n: u64) -> RunConfig {
        RunConfig {
            state,
            n_intervals: n,
            seed: 42,
            discipline: Discipline::Bernoulli,
            partitions: 4,
            ..RunConfig::default()
        }
    }

    #[test]
    fn aligned_psi_minus_never_coincides() {
        let c = run_bell(&base(BellState::PsiMinus, 1_000_000)).unwrap();
        assert_eq!(c.n_pp, 0);
        assert_eq!(c.n_mm, 0);
        assert_eq!(c.joint_total(), c.n_intervals);
    }

    #[test]
    fn crossed_psi_minus_half() {
        let c = run_bell(&base(BellState::PsiMinus, 1_000_000).with_angles(FRAC_PI_2, 0.0)).unwrap();
        assert!((c.pp_fraction() - 0.5).abs() < 0.0015, "{}", c.pp_fraction());
    }

    #[test]
    fn phi_plus_at_sixty_degrees() {
        let c = run_bell(&base(BellState::PhiPlus, 1_000_000).with_angles(FRAC_PI_3, 0.0)).unwrap();
        assert!((c.pp_fraction() - 0.125).abs() < 0.0015, "{}", c.pp_fraction());
    }

    #[test]
    fn correlation_examples() {
        let c = CoincidenceCounts {
            n_pm: 500,
            n_mp: 500,
            n_intervals: 1000,
            ..Default::default()
        };
        assert_eq!(correlation(&c).unwrap(), -1.0);
        assert!(matches!(
            correlation(&CoincidenceCounts::default()),
            Err(Error::Statistic(_))
        ));
        let cfg = base(BellState::PsiMinus, 1_000_000);
        let e = correlation(&run_bell(&cfg.with_angles(FRAC_PI_4, 0.0)).unwrap()).unwrap();
        assert!(e.abs() < 0.005, "{e}");
        let e = correlation(&run_bell(&cfg.with_angles(FRAC_PI_8, 0.0)).unwrap()).unwrap();
        assert!((e + 0.5f64.sqrt()).abs() < 0.005, "{e}");
    }

    #[test]
    fn chsh_projection_and_control() {
        let cfg = base(BellState::PsiMinus, 1_000_000);
        let angles = ChshAngles::default();
        let s = chsh(&cfg, &angles).unwrap();
        assert!((s.s - 2.0 * 2f64.sqrt()).abs() < 0.01, "{}", s.s);
        let naive = RunConfig {
            semantics: SamplingSemantics::NaiveUniform,
            ..cfg.clone()
        };
        let s = chsh(&naive, &angles).unwrap();
        assert!(s.s <= 2.01, "{}", s.s);
        assert!((s.s - analytic_chsh(BellState::PsiMinus, SamplingSemantics::NaiveUniform, &angles)).abs() < 0.01);
    }

    #[test]
    fn chsh_degenerate_angles() {
        let cfg = base(BellState::PsiMinus, 200_000);
        let angles = ChshAngles { a: 0.3, a_prime: 0.3, b: 0.3, b_prime: 0.3 };
        let s = chsh(&cfg, &angles).unwrap();
        // every term is E = −1, so S = 2|E|
        assert!(s.terms.iter().all(|t| t.e == -1.0));
        assert_eq!(s.s, 2.0);
    }

    #[test]
    fn analytic_chsh_canonical() {
        let s = analytic_chsh(BellState::PsiMinus, SamplingSemantics::Projection, &ChshAngles::default());
        assert!((s - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn malus_examples() {
        let cfg = base(BellState::PsiMinus, 1_000_000);
        let m = run_malus(&cfg, 0.4, 0.4).unwrap();
        assert_eq!(m.fraction().unwrap(), 1.0);
        let m = run_malus(&cfg, 0.4, 0.4 + FRAC_PI_2).unwrap();
        assert_eq!(m.fraction().unwrap(), 0.0);
        let m = run_malus(&cfg, FRAC_PI_6, 0.0).unwrap();
        assert!((m.fraction().unwrap() - 0.75).abs() < 0.005);
        let accumulate = RunConfig { discipline: Discipline::Accumulator, ..cfg };
        assert_eq!(run_malus(&accumulate, 1.0, 1.0).unwrap().fraction().unwrap(), 1.0);
        assert_eq!(run_malus(&accumulate, 1.0, 1.0 - FRAC_PI_2).unwrap().fraction().unwrap(), 0.0);
    }

    #[test]
    fn sweep_analytic_columns() {
        let cfg = base(BellState::PsiMinus, 100_000);
        let rows = sweep_coincidence(&cfg, &[0.0, FRAC_PI_4, FRAC_PI_2]).unwrap();
        let analytic: Vec<f64> = rows.iter().map(|r| r.analytic).collect();
        assert!((analytic[0]).abs() < 1e-15);
        assert!((analytic[1] - 0.25).abs() < 1e-15);
        assert!((analytic[2] - 0.5).abs() < 1e-15);
        for r in &rows {
            assert!(within_sigma(r.measured, r.analytic, r.stderr, 3.0), "{r:?}");
            assert_eq!(r.beta, r.alpha - r.delta);
        }
        let phi = base(BellState::PhiMinus, 1000);
        let rows = sweep_coincidence(&phi, &[0.0]).unwrap();
        assert_eq!(rows[0].analytic, 0.5);
        assert!(sweep_coincidence(&cfg, &[]).is_err());
    }

    #[test]
    fn joint_table_closure() {
        let delta: f64 = 0.6;
        let c = run_bell(&base(BellState::PsiMinus, 1_000_000).with_angles(delta, 0.0)).unwrap();
        let n = c.n_intervals;
        let s2 = 0.5 * delta.sin().powi(2);
        let c2 = 0.5 * delta.cos().powi(2);
        for (count, p) in [(c.n_pp, s2), (c.n_mm, s2), (c.n_pm, c2), (c.n_mp, c2)] {
            assert!(within_sigma(count as f64 / n as f64, p, binomial_stderr(p, n), 3.0));
        }
        assert_eq!(c.joint_total(), n);
    }

    #[test]
    fn psi_minus_matches_phi_plus_shifted() {
        for (k, delta) in [0.2, 0.7, 1.1].into_iter().enumerate() {
            let psi = base(BellState::PsiMinus, 500_000);
            let phi = RunConfig { state: BellState::PhiPlus, seed: 1000 + k as u64, ..psi.clone() };
            let a = run_bell(&psi.with_angles(delta, 0.0)).unwrap().pp_fraction();
            let b = run_bell(&phi.with_angles(delta + FRAC_PI_2, 0.0)).unwrap().pp_fraction();
            let p = 0.5 * delta.sin().powi(2);
            let se = (2.0f64).sqrt() * binomial_stderr(p, 500_000);
            assert!((a - b).abs() <= 3.0 * se, "{a} vs {b}");
        }
    }

    #[test]
    fn counts_do_not_depend_on_partitions_under_bernoulli() {
        let cfg = base(BellState::PsiPlus, 200_003).with_angles(0.3, 1.2);
        let one = run_bell(&RunConfig { partitions: 1, ..cfg.clone() }).unwrap();
        for p in [2, 3, 8] {
            assert_eq!(run_bell(&RunConfig { partitions: p, ..cfg.clone() }).unwrap(), one);
        }
    }

    #[test]
    fn accumulator_partitions_differ_by_boundary_effects_only() {
        let cfg = RunConfig { discipline: Discipline::Accumulator, ..base(BellState::PsiMinus, 300_000) }
            .with_angles(0.5, 0.0);
        let one = run_bell(&RunConfig { partitions: 1, ..cfg.clone() }).unwrap();
        let eight = run_bell(&RunConfig { partitions: 8, ..cfg.clone() }).unwrap();
        // at most one count per detector per partition
        for (x, y) in [(one.b_plus, eight.b_plus), (one.b_minus, eight.b_minus), (one.a_plus, eight.a_plus)] {
            assert!(x.abs_diff(y) <= 8, "{x} vs {y}");
        }
        let law = analytic_fraction(BellState::PsiMinus, SamplingSemantics::Projection, 0.5, 0.0);
        assert!((one.pp_fraction() - law).abs() < 0.01);
    }

    #[test]
    fn uniform_integral_keeps_marginals() {
        let cfg = RunConfig {
            generator: GeneratorConfig {
                modulus_mode: ModulusMode::Uniform { lo: 0.5, hi: 1.5 },
                ..GeneratorConfig::default()
            },
            discipline: Discipline::Accumulator,
            ..base(BellState::PsiMinus, 400_000)
        };
        let c = run_bell(&cfg.with_angles(0.9, 0.1)).unwrap();
        let [ap, am, bp, bm] = c.singles_fractions();
        // intervals holding two counts pull fractions below one half, but
        // both outputs of each analyzer stay equally weighted
        for f in [ap, am, bp, bm] {
            assert!(f < 0.505, "{f}");
        }
        assert!(ap < 0.45 && am < 0.45, "{ap} {am}");
        assert!((ap - am).abs() < 0.01, "{ap} {am}");
        assert!((bp - bm).abs() < 0.01, "{bp} {bm}");
    }

    #[test]
    fn invalid_configs() {
        assert!(run_bell(&RunConfig { n_intervals: 0, ..RunConfig::default() }).is_err());
        assert!(run_bell(&RunConfig { alpha: f64::NAN, ..RunConfig::default() }).is_err());
        assert!(run_bell(&RunConfig { partitions: 0, ..RunConfig::default() }).is_err());
    }

    #[test]
    fn semantics_parse() {
        assert_eq!("naive-uniform".parse::<SamplingSemantics>().unwrap(), SamplingSemantics::NaiveUniform);
        assert_eq!("Projection".parse::<SamplingSemantics>().unwrap(), SamplingSemantics::Projection);
        assert!("both".parse::<SamplingSemantics>().is_err());
    }
}
