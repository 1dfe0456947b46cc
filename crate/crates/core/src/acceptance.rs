//! The numeric acceptance suite.
//!
//! Each criterion compares simulation output with expected values written
//! out here as plain formulas, independently of the analytic helpers in
//! [`crate::bell`] and [`crate::boolean`]. All runs use the Bernoulli
//! discipline so that results do not depend on the partition count.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    beamsplitter, bell_vector, dot, gram_average, hom_classifier, hom_outputs, qm_swap_discrepancy,
    swap_regime_report, HomConfig, SwapRegime, SwapReport,
};
use crate::bell::{chsh, run_bell, run_malus, sweep_coincidence, ChshAngles, RunConfig, SamplingSemantics};
use crate::boolean::{boolean_chsh, run_boolean_bell};
use crate::error::Result;
use crate::hv::{generate_interval, partner_hv, AngleMode, Discipline, GeneratorConfig, ModulusMode, Waveform};
use crate::report::{bell_table, config_digest, sha256_hex};
use crate::rng::{default_partitions, substream};
use crate::state::BellState;

/// Multiple of the standard error allowed by statistical checks.
pub const SIGMA: f64 = 3.0;
/// Tolerance of exact algebraic checks.
pub const EXACT_TOL: f64 = 1e-12;
/// Allowed deviation of the CHSH statistic from its target.
pub const CHSH_TOL: f64 = 0.01;
/// Upper bound on the naive-sampling CHSH statistic.
pub const NAIVE_CHSH_BOUND: f64 = 2.01;
/// Allowed deviation of averaged Gram entries from the identity.
pub const GRAM_TOL: f64 = 0.01;
/// Intervals per beam-splitter classifier run.
pub const HOM_INTERVALS: u64 = 10_000;
/// Random draws per swap regime.
pub const SWAP_DRAWS: usize = 200;
/// Random draws for per-draw algebraic checks.
pub const ALGEBRA_DRAWS: usize = 10_000;

/// Settings shared by every criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceConfig {
    pub seed: u64,
    /// Intervals (or draws) per measured point.
    pub n_intervals: u64,
    pub partitions: usize,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        AcceptanceConfig {
            seed: 7,
            n_intervals: 1_000_000,
            partitions: default_partitions(),
        }
    }
}

impl AcceptanceConfig {
    fn run(&self, state: BellState, semantics: SamplingSemantics) -> RunConfig {
        RunConfig {
            state,
            semantics,
            n_intervals: self.n_intervals,
            seed: self.seed,
            discipline: Discipline::Bernoulli,
            partitions: self.partitions,
            ..RunConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} [{}] {}: {}", self.id, self.name, self.detail)
    }
}

/// Collects named sub-checks; the criterion passes when all of them do.
struct Checks {
    failures: Vec<String>,
    count: usize,
}

impl Checks {
    fn new() -> Self {
        Checks {
            failures: Vec::new(),
            count: 0,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.count += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn sigma(&mut self, label: &str, measured: f64, expected: f64, stderr: f64) {
        let ok = (measured - expected).abs() <= SIGMA * stderr;
        self.check(ok, || {
            format!("{label}: measured {measured:.6}, expected {expected:.6} ± {:.6}", SIGMA * stderr)
        });
    }

    fn finish(self, id: u8, name: &str, summary: String) -> CriterionResult {
        let passed = self.failures.is_empty();
        let detail = if passed {
            format!("{} checks; {summary}", self.count)
        } else {
            format!(
                "{} of {} checks failed; {}",
                self.failures.len(),
                self.count,
                self.failures.join("; ")
            )
        };
        CriterionResult {
            id,
            name: name.to_owned(),
            passed,
            detail,
        }
    }
}

fn binom_se(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

fn failed(id: u8, name: &str, err: crate::Error) -> CriterionResult {
    CriterionResult {
        id,
        name: name.to_owned(),
        passed: false,
        detail: format!("error: {err}"),
    }
}

fn wrap(id: u8, name: &str, body: impl FnOnce() -> Result<CriterionResult>) -> CriterionResult {
    body().unwrap_or_else(|e| failed(id, name, e))
}

/// Two-analyzer transmission follows `cos²Δ`, exactly 1 and 0 at the ends.
pub fn malus_law(cfg: &AcceptanceConfig) -> CriterionResult {
    let name = "malus-law";
    wrap(1, name, || {
        let mut c = Checks::new();
        let base = cfg.run(BellState::PsiMinus, SamplingSemantics::Projection);
        let mut worst: f64 = 0.0;
        for delta in [0.0, PI / 6.0, PI / 4.0, PI / 3.0, PI / 2.0] {
            let out = run_malus(&base, 0.0, delta)?;
            let p = delta.cos() * delta.cos();
            let f = out.fraction()?;
            worst = worst.max((f - p).abs());
            c.sigma(&format!("Δ={delta:.4}"), f, p, binom_se(p, out.subset_a));
            if delta == 0.0 {
                c.check(f == 1.0, || format!("Δ=0: fraction {f} is not exactly 1"));
            }
            if delta == PI / 2.0 {
                c.check(f == 0.0, || format!("Δ=π/2: fraction {f} is not exactly 0"));
            }
        }
        Ok(c.finish(1, name, format!("max |measured − cos²Δ| = {worst:.5}")))
    })
}

/// `++` fractions of all four states against their coincidence laws.
pub fn coincidence_curves(cfg: &AcceptanceConfig) -> CriterionResult {
    let name = "coincidence-curves";
    wrap(2, name, || {
        let mut c = Checks::new();
        let mut worst_z: f64 = 0.0;
        let grid: Vec<f64> = (0..=16).map(|k| k as f64 * PI / 16.0).collect();
        let mut run = |state: BellState, alpha: f64, deltas: &[f64], law: &dyn Fn(f64, f64) -> f64| -> Result<()> {
            let cfg_run = RunConfig {
                alpha,
                ..cfg.run(state, SamplingSemantics::Projection)
            };
            for row in sweep_coincidence(&cfg_run, deltas)? {
                let p = 0.5 * law(row.alpha, row.beta);
                let se = binom_se(p, row.counts.n_intervals);
                if se > 0.0 {
                    worst_z = worst_z.max((row.measured - p).abs() / se);
                }
                c.sigma(&format!("{state} α={:.4} β={:.4}", row.alpha, row.beta), row.measured, p, se);
            }
            Ok(())
        };
        run(BellState::PsiMinus, 0.0, &grid, &|a, b| (a - b).sin().powi(2))?;
        let five = [0.0, PI / 8.0, PI / 4.0, 3.0 * PI / 8.0, PI / 2.0];
        let alpha = PI / 7.0;
        run(BellState::PhiPlus, alpha, &five, &|a, b| (a - b).cos().powi(2))?;
        run(BellState::PsiPlus, alpha, &five, &|a, b| (a + b).sin().powi(2))?;
        run(BellState::PhiMinus, alpha, &five, &|a, b| (a + b).cos().powi(2))?;
        Ok(c.finish(2, name, format!("largest deviation {worst_z:.2}σ")))
    })
}

/// Vector model violates CHSH, the naive control and the Boolean model do not.
pub fn chsh_violation(cfg: &AcceptanceConfig) -> CriterionResult {
    let name = "chsh-violation";
    wrap(3, name, || {
        let mut c = Checks::new();
        let angles = ChshAngles::default();
        let vector = chsh(&cfg.run(BellState::PsiMinus, SamplingSemantics::Projection), &angles)?.s;
        let naive = chsh(&cfg.run(BellState::PsiMinus, SamplingSemantics::NaiveUniform), &angles)?.s;
        let boolean = boolean_chsh(&cfg.run(BellState::PsiMinus, SamplingSemantics::Projection), &angles)?.s;
        let target = 2.0 * 2f64.sqrt();
        c.check((vector - target).abs() <= CHSH_TOL, || format!("vector S = {vector:.4}, want {target:.4} ± {CHSH_TOL}"));
        c.check(naive <= NAIVE_CHSH_BOUND, || format!("naive S = {naive:.4} exceeds {NAIVE_CHSH_BOUND}"));
        c.check((boolean - 2.0).abs() <= CHSH_TOL, || format!("Boolean S = {boolean:.4}, want 2 ± {CHSH_TOL}"));
        Ok(c.finish(3, name, format!("vector {vector:.4}, naive {naive:.4}, Boolean {boolean:.4}")))
    })
}

/// Every output channel fires half the time; station A's marginals do not
/// depend on the remote setting.
pub fn half_transmission(cfg: &AcceptanceConfig) -> CriterionResult {
    let name = "half-transmission";
    wrap(4, name, || {
        let mut c = Checks::new();
        let se = binom_se(0.5, cfg.n_intervals);
        for alpha in [0.0, PI / 8.0, PI / 4.0, PI / 3.0, PI / 2.0] {
            let counts = run_bell(&cfg.run(BellState::PsiMinus, SamplingSemantics::Projection).with_angles(alpha, 0.3))?;
            let n = counts.n_intervals as f64;
            for (label, k) in [
                ("A+", counts.a_plus),
                ("A−", counts.a_minus),
                ("B+", counts.b_plus),
                ("B−", counts.b_minus),
            ] {
                c.sigma(&format!("α={alpha:.4} {label}"), k as f64 / n, 0.5, se);
            }
        }
        let mut marginals = Vec::new();
        for (k, beta) in [0.0, PI / 5.0, PI / 3.0, PI / 2.0].into_iter().enumerate() {
            let run = RunConfig {
                seed: cfg.seed.wrapping_add(1 + k as u64),
                ..cfg.run(BellState::PsiMinus, SamplingSemantics::Projection)
            }
            .with_angles(0.0, beta);
            let counts = run_bell(&run)?;
            marginals.push((beta, counts.a_plus as f64 / counts.n_intervals as f64));
        }
        let (b0, p0) = marginals[0];
        for &(b, p) in &marginals[1..] {
            c.sigma(&format!("A+ at β={b0:.4} vs β={b:.4}"), p, p0, se * 2f64.sqrt());
        }
        Ok(c.finish(4, name, format!("channel stderr {se:.5}")))
    })
}

fn folded_over_pi(delta: f64) -> f64 {
    let d = delta.rem_euclid(PI);
    d.min(PI - d) / PI
}

/// The Boolean `++` curve is the saw-tooth; it meets the vector curve at
/// multiples of π/4 and separates from it in between.
pub fn boolean_sawtooth(cfg: &AcceptanceConfig) -> CriterionResult {
    let name = "boolean-sawtooth";
    wrap(5, name, || {
        let mut c = Checks::new();
        let base = cfg.run(BellState::PsiMinus, SamplingSemantics::Projection);
        let boolean_at = |delta: f64| -> Result<(f64, u64)> {
            let counts = run_boolean_bell(&base.with_angles(0.0, -delta))?;
            Ok((counts.pp_fraction(), counts.n_intervals))
        };
        let vector_at = |delta: f64| -> Result<(f64, u64)> {
            let counts = run_bell(&base.with_angles(0.0, -delta))?;
            Ok((counts.pp_fraction(), counts.n_intervals))
        };
        for k in 0..=16 {
            let delta = k as f64 * PI / 16.0;
            let (p, n) = boolean_at(delta)?;
            let expected = folded_over_pi(delta);
            c.sigma(&format!("Boolean Δ={delta:.4}"), p, expected, binom_se(expected, n));
        }
        for delta in [0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0] {
            let (pb, nb) = boolean_at(delta)?;
            let (pv, nv) = vector_at(delta)?;
            let se = (binom_se(folded_over_pi(delta), nb).powi(2) + binom_se(0.5 * delta.sin().powi(2), nv).powi(2)).sqrt();
            c.sigma(&format!("agreement Δ={delta:.4}"), pb, pv, se);
        }
        let mut gaps = Vec::new();
        // the saw-tooth lies above the vector curve at π/8 and below at 3π/8
        for (delta, sign) in [(PI / 8.0, 1.0), (3.0 * PI / 8.0, -1.0)] {
            let (pb, nb) = boolean_at(delta)?;
            let (pv, nv) = vector_at(delta)?;
            let se = (binom_se(pb, nb).powi(2) + binom_se(pv, nv).powi(2)).sqrt();
            let z = sign * (pb - pv) / se;
            gaps.push(z);
            c.check(z >= SIGMA, || {
                format!("separation Δ={delta:.4}: Boolean {pb:.5} vs vector {pv:.5} is {z:.1}σ in the expected direction")
            });
        }
        Ok(c.finish(5, name, format!("separations {:.0}σ and {:.0}σ", gaps[0], gaps[1])))
    })
}

/// Bell vectors: exact per-draw norms and orthogonalities, and an averaged
/// Gram matrix close to the identity.
pub fn orthonormality(cfg: &AcceptanceConfig) -> CriterionResult {
    let name = "orthonormality";
    wrap(6, name, || {
        let mut c = Checks::new();
        let mut rng = substream(cfg.seed, u64::MAX);
        let mut worst: f64 = 0.0;
        for _ in 0..ALGEBRA_DRAWS {
            let [fa, ga, fb, gb] = [(); 4].map(|_| 4.0 * rng.random::<f64>() - 2.0);
            let norm = (fa * fa + ga * ga) * (fb * fb + gb * gb);
            for s in BellState::ALL {
                let v = bell_vector(s, fa, ga, fb, gb);
                worst = worst.max((dot(&v, &v) - norm).abs());
            }
            let pm = dot(
                &bell_vector(BellState::PsiMinus, fa, ga, fb, gb),
                &bell_vector(BellState::PhiPlus, fa, ga, fb, gb),
            );
            let pp = dot(
                &bell_vector(BellState::PsiPlus, fa, ga, fb, gb),
                &bell_vector(BellState::PhiMinus, fa, ga, fb, gb),
            );
            worst = worst.max(pm.abs()).max(pp.abs());
        }
        c.check(worst <= EXACT_TOL, || format!("per-draw algebra off by {worst:e}"));
        let g = gram_average(ModulusMode::Fixed { m: 1.0 }, cfg.n_intervals, cfg.seed, cfg.partitions)?;
        let mut max_dev: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let id = if i == j { 1.0 } else { 0.0 };
                max_dev = max_dev.max((g.matrix[i][j] - id).abs());
            }
        }
        c.check(max_dev <= GRAM_TOL, || format!("Gram matrix deviates from identity by {max_dev:.4}"));
        Ok(c.finish(6, name, format!("per-draw error {worst:.1e}, Gram deviation {max_dev:.4}")))
    })
}

/// Beam-splitter closed forms, conservation and the Ψ⁻ classifier.
pub fn hom(cfg: &AcceptanceConfig) -> CriterionResult {
    let name = "hong-ou-mandel";
    wrap(7, name, || {
        let mut c = Checks::new();
        let mut rng = substream(cfg.seed, u64::MAX - 1);
        let generators = [
            GeneratorConfig::default(),
            GeneratorConfig {
                modulus_mode: ModulusMode::Uniform { lo: 0.25, hi: 1.75 },
                samples_per_interval: 16,
                waveform: Waveform::Harmonic { cycles: 3 },
                ..GeneratorConfig::default()
            },
            GeneratorConfig {
                angle_mode: AngleMode::Fixed { angle: 0.3 },
                samples_per_interval: 5,
                interval_length: 2.5,
                ..GeneratorConfig::default()
            },
        ];
        let mut worst: f64 = 0.0;
        for gen in &generators {
            for _ in 0..ALGEBRA_DRAWS / generators.len() {
                let hv = generate_interval(&mut rng, gen)?;
                let m: f64 = hv.samples().iter().map(|(f, g)| (f * f + g * g) * hv.dt()).sum();
                for state in BellState::ALL {
                    let (out_c, out_d) = beamsplitter(&hv, &partner_hv(&hv, state))?;
                    let (mc, md) = hom_outputs(state, &hv);
                    worst = worst
                        .max((out_c.modulus_integral() - mc).abs())
                        .max((out_d.modulus_integral() - md).abs())
                        .max((mc + md - 2.0 * m).abs());
                }
            }
        }
        c.check(worst <= EXACT_TOL, || format!("closed forms off by {worst:e}"));
        let s = FRAC_1_SQRT_2;
        let examples = [
            (BellState::PhiPlus, (1.0, 0.0), (2.0, 0.0)),
            (BellState::PsiMinus, (s, s), (1.0, 1.0)),
            (BellState::PhiMinus, (1.0, 0.0), (2.0, 0.0)),
        ];
        for (state, (f, g), want) in examples {
            let got = hom_outputs(state, &crate::hv::IntervalHV::constant(f, g));
            c.check((got.0 - want.0).abs() <= EXACT_TOL && (got.1 - want.1).abs() <= EXACT_TOL, || {
                format!("{state}: {got:?}, want {want:?}")
            });
        }
        let hcfg = HomConfig {
            n_intervals: HOM_INTERVALS,
            seed: cfg.seed,
            discipline: Discipline::Bernoulli,
            routing: true,
            partitions: cfg.partitions,
            ..HomConfig::default()
        };
        let mut fractions = Vec::new();
        for state in BellState::ALL {
            let f = hom_classifier(state, &hcfg)?.coincidence_fraction();
            let want = if state == BellState::PsiMinus { 1.0 } else { 0.0 };
            c.check(f == want, || format!("{state} C∧D fraction {f}, want {want}"));
            fractions.push(format!("{state} {f}"));
        }
        Ok(c.finish(7, name, format!("closed-form error {worst:.1e}; C∧D {}", fractions.join(", "))))
    })
}

type Expansion = BTreeMap<String, f64>;

/// Factor pair `(own, partner)` of a two-party vector, keyed by axis letter.
fn labeled_terms(state: BellState, a: (f64, f64), b: (f64, f64)) -> Vec<(f64, char, char)> {
    let (fa, ga) = a;
    let (fb, gb) = b;
    let (px, py) = match state {
        BellState::PsiMinus => (gb, -fb),
        BellState::PsiPlus => (gb, fb),
        BellState::PhiPlus => (fb, gb),
        BellState::PhiMinus => (fb, -gb),
    };
    vec![(fa * px, 'x', 'x'), (fa * py, 'x', 'y'), (ga * px, 'y', 'x'), (ga * py, 'y', 'y')]
}

/// Multiplies two labeled two-party expansions, keying each monomial by
/// its axis letters sorted by party.
fn expand(
    scale: f64,
    first: (usize, usize, Vec<(f64, char, char)>),
    second: (usize, usize, Vec<(f64, char, char)>),
    into: &mut Expansion,
) {
    let (p, q, u) = first;
    let (r, s, v) = second;
    for &(cu, au, bu) in &u {
        for &(cv, av, bv) in &v {
            let mut labels = [(p, au), (q, bu), (r, av), (s, bv)];
            labels.sort();
            let key: String = labels.iter().map(|&(party, axis)| format!("{party}{axis}")).collect();
            *into.entry(key).or_insert(0.0) += scale * cu * cv;
        }
    }
}

/// Term-by-term expansion of both sides of the hidden-variable swap identity.
pub(crate) fn swap_oracle(x: [f64; 8]) -> (Expansion, Expansion) {
    let party = |k: usize| (x[2 * k - 2], x[2 * k - 1]);
    let mut lhs = Expansion::new();
    expand(
        1.0,
        (1, 2, labeled_terms(BellState::PsiMinus, party(1), party(2))),
        (3, 4, labeled_terms(BellState::PsiMinus, party(3), party(4))),
        &mut lhs,
    );
    let mut rhs = Expansion::new();
    for (state, sign) in [
        (BellState::PsiPlus, -1.0),
        (BellState::PsiMinus, 1.0),
        (BellState::PhiPlus, -1.0),
        (BellState::PhiMinus, -1.0),
    ] {
        expand(
            0.5 * sign,
            (1, 4, labeled_terms(state, party(1), party(4))),
            (2, 3, labeled_terms(state, party(2), party(3))),
            &mut rhs,
        );
    }
    (lhs, rhs)
}

/// Position of a sorted key such as `1x2y3x4y` in the party-major basis.
fn key_index(key: &str) -> usize {
    key.chars()
        .filter(|ch| *ch == 'x' || *ch == 'y')
        .fold(0, |acc, ch| 2 * acc + usize::from(ch == 'y'))
}

/// Largest disagreement between a swap report and the expansion oracle.
pub(crate) fn oracle_mismatch(report: &SwapReport) -> f64 {
    let (lhs, rhs) = swap_oracle(report.inputs);
    let mut worst: f64 = 0.0;
    for (exp, tensor) in [(&lhs, &report.lhs), (&rhs, &report.rhs)] {
        let mut dense = [0.0; 16];
        for (k, v) in exp {
            dense[key_index(k)] += v;
        }
        for (a, b) in dense.iter().zip(tensor.coeffs) {
            worst = worst.max((a - b).abs());
        }
    }
    let diff_max = report.discrepancy().iter().fold(0.0f64, |m, d| m.max(d.abs()));
    worst.max((diff_max - report.max_discrepancy).abs())
}

/// Four-qubit amplitude identity built from explicit basis kets.
fn qm_oracle_discrepancy() -> f64 {
    let s = FRAC_1_SQRT_2;
    let ket = |state: BellState| -> Vec<(f64, char, char)> {
        match state {
            BellState::PsiMinus => vec![(s, 'x', 'y'), (-s, 'y', 'x')],
            BellState::PsiPlus => vec![(s, 'x', 'y'), (s, 'y', 'x')],
            BellState::PhiPlus => vec![(s, 'x', 'x'), (s, 'y', 'y')],
            BellState::PhiMinus => vec![(s, 'x', 'x'), (-s, 'y', 'y')],
        }
    };
    let mut lhs = Expansion::new();
    expand(1.0, (1, 2, ket(BellState::PsiMinus)), (3, 4, ket(BellState::PsiMinus)), &mut lhs);
    let mut rhs = Expansion::new();
    for (state, sign) in [
        (BellState::PsiPlus, 1.0),
        (BellState::PsiMinus, -1.0),
        (BellState::PhiPlus, -1.0),
        (BellState::PhiMinus, 1.0),
    ] {
        expand(0.5 * sign, (1, 4, ket(state)), (2, 3, ket(state)), &mut rhs);
    }
    let keys: std::collections::BTreeSet<&String> = lhs.keys().chain(rhs.keys()).collect();
    keys.into_iter()
        .map(|k| (lhs.get(k).unwrap_or(&0.0) - rhs.get(k).unwrap_or(&0.0)).abs())
        .fold(0.0, f64::max)
}

/// Quantum swap identity holds; hidden-variable reports are complete and
/// agree with the term-by-term expansion.
pub fn swap_oracle_check(cfg: &AcceptanceConfig) -> CriterionResult {
    let name = "swap-oracle";
    wrap(8, name, || {
        let mut c = Checks::new();
        let qm_lib = qm_swap_discrepancy();
        let qm_oracle = qm_oracle_discrepancy();
        c.check(qm_lib <= EXACT_TOL, || format!("quantum identity off by {qm_lib:e}"));
        c.check(qm_oracle <= EXACT_TOL, || format!("quantum oracle off by {qm_oracle:e}"));
        let mut summary = Vec::new();
        for regime in SwapRegime::ALL {
            let report = swap_regime_report(regime, SWAP_DRAWS, cfg.seed)?;
            c.check(report.draws.len() == SWAP_DRAWS, || format!("{}: {} draws", regime.name(), report.draws.len()));
            let mut worst: f64 = 0.0;
            for d in &report.draws {
                let finite = d.lhs.coeffs.iter().chain(&d.rhs.coeffs).all(|v| v.is_finite());
                c.check(finite, || format!("{}: non-finite coefficient", regime.name()));
                worst = worst.max(oracle_mismatch(d));
            }
            c.check(worst <= EXACT_TOL, || format!("{}: expansion mismatch {worst:e}", regime.name()));
            summary.push(format!(
                "{} per-draw gap {:.4}, averaged gap {:.4}",
                regime.name(),
                report.mean_max_discrepancy,
                report.averaged_discrepancy
            ));
        }
        Ok(c.finish(8, name, summary.join(", ")))
    })
}

/// The same seeded sweep yields byte-identical CSV at 1, 2 and 8 partitions.
pub fn reproducibility(cfg: &AcceptanceConfig) -> CriterionResult {
    let name = "reproducibility";
    wrap(9, name, || {
        let mut c = Checks::new();
        let deltas = [0.0, PI / 8.0, PI / 4.0, 3.0 * PI / 8.0, PI / 2.0];
        let mut hashes = Vec::new();
        for partitions in [1, 2, 8] {
            let run = RunConfig {
                partitions,
                ..cfg.run(BellState::PsiMinus, SamplingSemantics::Projection)
            };
            let rows = sweep_coincidence(&run, &deltas)?;
            let digest = config_digest("bell", &run)?;
            let csv = bell_table(run.state, run.semantics.name(), &rows).to_csv(&digest);
            hashes.push(sha256_hex(csv.as_bytes()));
        }
        c.check(hashes.iter().all(|h| *h == hashes[0]), || format!("CSV hashes differ: {hashes:?}"));
        Ok(c.finish(9, name, format!("sha256 {}", &hashes[0][..16])))
    })
}

/// Runs one criterion by number.
pub fn run_criterion(id: u8, cfg: &AcceptanceConfig) -> Option<CriterionResult> {
    Some(match id {
        1 => malus_law(cfg),
        2 => coincidence_curves(cfg),
        3 => chsh_violation(cfg),
        4 => half_transmission(cfg),
        5 => boolean_sawtooth(cfg),
        6 => orthonormality(cfg),
        7 => hom(cfg),
        8 => swap_oracle_check(cfg),
        9 => reproducibility(cfg),
        _ => return None,
    })
}

/// Identifiers of all criteria, in order.
pub const CRITERIA: [u8; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];

pub fn run_all(cfg: &AcceptanceConfig) -> Vec<CriterionResult> {
    CRITERIA.iter().filter_map(|&id| run_criterion(id, cfg)).collect()
}
