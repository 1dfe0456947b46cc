//! Bell vectors, beam-splitter outputs and the four-party swapping identity.
//!
//! A two-party Bell vector is the tensor product of the station-A hidden
//! variable `(f_A, g_A)` with the partner of `(f_B, g_B)`, written on the
//! ordered basis `(x_A x_B, x_A y_B, y_A x_B, y_A y_B)`. Per draw the four
//! vectors are not orthonormal; their ensemble average is.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, Error, Result};
use crate::hv::{partner_components, Discipline, DetectorState, GeneratorConfig, IntervalHV, ModulusMode, THRESHOLD};
use crate::rng::{run_intervals, substream, Merge};
use crate::state::BellState;

/// Coefficients of a two-party vector on `(xx, xy, yx, yy)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BellVector4 {
    pub c_xx: f64,
    pub c_xy: f64,
    pub c_yx: f64,
    pub c_yy: f64,
}

impl BellVector4 {
    pub fn from_array(c: [f64; 4]) -> Self {
        BellVector4 {
            c_xx: c[0],
            c_xy: c[1],
            c_yx: c[2],
            c_yy: c[3],
        }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.c_xx, self.c_xy, self.c_yx, self.c_yy]
    }

    /// Coefficient on `e_a ⊗ e_b`, with axis `0 = x`, `1 = y`.
    pub fn coeff(&self, a: usize, b: usize) -> f64 {
        self.to_array()[2 * a + b]
    }

    pub fn norm_squared(&self) -> f64 {
        dot(self, self)
    }
}

/// Bell vector of `state` built from both parties' source components.
///
/// For Ψ⁻ this is `(f_A g_B, −f_A f_B, g_A g_B, −g_A f_B)`.
pub fn bell_vector(state: BellState, f_a: f64, g_a: f64, f_b: f64, g_b: f64) -> BellVector4 {
    let (bx, by) = partner_components(f_b, g_b, state);
    BellVector4 {
        c_xx: f_a * bx,
        c_xy: f_a * by,
        c_yx: g_a * bx,
        c_yy: g_a * by,
    }
}

/// Euclidean inner product of coefficient quadruples.
pub fn dot(u: &BellVector4, v: &BellVector4) -> f64 {
    u.c_xx * v.c_xx + u.c_xy * v.c_xy + u.c_yx * v.c_yx + u.c_yy * v.c_yy
}

/// Ensemble averages of the Bell-vector inner products.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub n_draws: u64,
    /// `matrix[i][j] = ⟨Bᵢ · Bⱼ⟩` in [`BellState::ALL`] order.
    pub matrix: [[f64; 4]; 4],
    pub mean_f2: f64,
    pub mean_g2: f64,
    pub mean_fg: f64,
}

impl GramReport {
    pub fn max_diagonal_error(&self) -> f64 {
        (0..4).map(|i| (self.matrix[i][i] - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    m = m.max(self.matrix[i][j].abs());
                }
            }
        }
        m
    }
}

#[derive(Default)]
struct GramSums {
    n: u64,
    gram: [[f64; 4]; 4],
    f2: f64,
    g2: f64,
    fg: f64,
}

impl Merge for GramSums {
    fn merge(&mut self, o: Self) {
        self.n += o.n;
        for i in 0..4 {
            for j in 0..4 {
                self.gram[i][j] += o.gram[i][j];
            }
        }
        self.f2 += o.f2;
        self.g2 += o.g2;
        self.fg += o.fg;
    }
}

/// Minimum ensemble size accepted by [`gram_average`].
pub const MIN_GRAM_DRAWS: u64 = 10_000;

fn draw_components<R: Rng + ?Sized>(rng: &mut R, modulus: &ModulusMode) -> (f64, f64) {
    let v = PI * rng.random::<f64>();
    let m = match *modulus {
        ModulusMode::Fixed { m } => m,
        ModulusMode::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
    };
    let amp = m.sqrt();
    (amp * v.cos(), amp * v.sin())
}

/// Averages the 4×4 matrix of Bell-vector inner products over `n_draws`
/// independent draws of `(f_A, g_A, f_B, g_B)`.
///
/// Each party's components are `V cos v`, `V sin v` with `v` uniform and
/// `V²` drawn from `modulus` (mean one).
pub fn gram_average(modulus: ModulusMode, n_draws: u64, seed: u64, partitions: usize) -> Result<GramReport> {
    if n_draws < MIN_GRAM_DRAWS {
        return Err(Error::Statistic(format!(
            "gram average needs at least {MIN_GRAM_DRAWS} draws, got {n_draws}"
        )));
    }
    GeneratorConfig {
        modulus_mode: modulus,
        ..GeneratorConfig::default()
    }
    .validate()?;
    let sums = run_intervals(seed, n_draws, partitions, || (), |_, rng, _, s: &mut GramSums| {
        let (fa, ga) = draw_components(rng, &modulus);
        let (fb, gb) = draw_components(rng, &modulus);
        let vs = BellState::ALL.map(|st| bell_vector(st, fa, ga, fb, gb));
        for i in 0..4 {
            for j in 0..4 {
                s.gram[i][j] += dot(&vs[i], &vs[j]);
            }
        }
        s.n += 1;
        s.f2 += fa * fa;
        s.g2 += ga * ga;
        s.fg += fa * ga;
    })?;
    let n = sums.n as f64;
    let mut matrix = sums.gram;
    for row in matrix.iter_mut() {
        for x in row.iter_mut() {
            *x /= n;
        }
    }
    Ok(GramReport {
        n_draws: sums.n,
        matrix,
        mean_f2: sums.f2 / n,
        mean_g2: sums.g2 / n,
        mean_fg: sums.fg / n,
    })
}

/// Balanced beam splitter: `C = (A + B)/√2`, `D = (A − B)/√2` per sample.
pub fn beamsplitter(hv_a: &IntervalHV, hv_b: &IntervalHV) -> Result<(IntervalHV, IntervalHV)> {
    if hv_a.len() != hv_b.len() || hv_a.dt() != hv_b.dt() {
        return Err(Error::Input(format!(
            "beam-splitter inputs differ in shape: {}×{} vs {}×{}",
            hv_a.len(),
            hv_a.dt(),
            hv_b.len(),
            hv_b.dt()
        )));
    }
    let s = FRAC_1_SQRT_2;
    let (c, d): (Vec<_>, Vec<_>) = hv_a
        .samples()
        .iter()
        .zip(hv_b.samples())
        .map(|(&(fa, ga), &(fb, gb))| (((fa + fb) * s, (ga + gb) * s), ((fa - fb) * s, (ga - gb) * s)))
        .unzip();
    Ok((IntervalHV::new(c, hv_a.dt())?, IntervalHV::new(d, hv_a.dt())?))
}

/// Output integrals `(m_C, m_D)` when `hv` and its partner under `state`
/// enter the two ports of a balanced beam splitter.
///
/// Closed forms, with `m = ∫(f² + g²)`:
/// Φ⁺ → `(2m, 0)`, Ψ⁻ → `(m, m)`, Φ⁻ → `(2∫f², 2m − 2∫f²)`,
/// Ψ⁺ → `(m + 2∫fg, m − 2∫fg)`.
pub fn hom_outputs(state: BellState, hv: &IntervalHV) -> (f64, f64) {
    let m = hv.modulus_integral();
    match state {
        BellState::PhiPlus => (2.0 * m, 0.0),
        BellState::PsiMinus => (m, m),
        BellState::PhiMinus => {
            let fx = 2.0 * hv.x_integral();
            (fx, 2.0 * m - fx)
        }
        BellState::PsiPlus => {
            let cross = 2.0 * hv.cross_integral();
            (m + cross, m - cross)
        }
    }
}

/// Sends the whole output to the port with the larger integral; ties go to C.
pub fn apply_routing_rule(m_c: f64, m_d: f64) -> (f64, f64) {
    let total = m_c + m_d;
    if m_c >= m_d {
        (total, 0.0)
    } else {
        (0.0, total)
    }
}

/// States whose outputs the routing rule applies to. Ψ⁻ is never routed:
/// its equal split is what the classifier detects.
pub fn routing_applies(state: BellState) -> bool {
    matches!(state, BellState::PhiMinus | BellState::PsiPlus)
}

/// Settings of a Hong-Ou-Mandel classification run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HomConfig {
    pub n_intervals: u64,
    pub seed: u64,
    pub generator: GeneratorConfig,
    pub discipline: Discipline,
    pub routing: bool,
    #[serde(skip, default = "one")]
    pub partitions: usize,
}

fn one() -> usize {
    1
}

impl Default for HomConfig {
    fn default() -> Self {
        HomConfig {
            n_intervals: 10_000,
            seed: 0,
            generator: GeneratorConfig::default(),
            discipline: Discipline::Accumulator,
            routing: true,
            partitions: 1,
        }
    }
}

/// Detection pattern tallies at the two beam-splitter outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct HomCounts {
    pub n_intervals: u64,
    pub both: u64,
    pub c_only: u64,
    pub d_only: u64,
    pub neither: u64,
}

impl HomCounts {
    /// Fraction of intervals with simultaneous C and D detections.
    pub fn coincidence_fraction(&self) -> f64 {
        self.both as f64 / self.n_intervals as f64
    }
}

impl Merge for HomCounts {
    fn merge(&mut self, o: Self) {
        self.n_intervals += o.n_intervals;
        self.both += o.both;
        self.c_only += o.c_only;
        self.d_only += o.d_only;
        self.neither += o.neither;
    }
}

/// Runs the beam-splitter experiment for `state` and tallies C∧D events.
pub fn hom_classifier(state: BellState, cfg: &HomConfig) -> Result<HomCounts> {
    if cfg.n_intervals == 0 {
        return config_err("n_intervals must be at least 1");
    }
    cfg.generator.validate()?;
    let gen = cfg.generator;
    run_intervals(
        cfg.seed,
        cfg.n_intervals,
        cfg.partitions,
        || (DetectorState::new(cfg.discipline), DetectorState::new(cfg.discipline)),
        |(det_c, det_d), rng, _, tally: &mut HomCounts| {
            let hv = crate::hv::generate_interval(rng, &gen).expect("validated generator");
            let (mut m_c, mut m_d) = hom_outputs(state, &hv);
            if cfg.routing && routing_applies(state) {
                (m_c, m_d) = apply_routing_rule(m_c, m_d);
            }
            // rounding can leave −1e-17 on an output that is zero in exact arithmetic
            let c = det_c.detect(m_c.max(0.0), rng).expect("finite integral") > 0;
            let d = det_d.detect(m_d.max(0.0), rng).expect("finite integral") > 0;
            tally.n_intervals += 1;
            match (c, d) {
                (true, true) => tally.both += 1,
                (true, false) => tally.c_only += 1,
                (false, true) => tally.d_only += 1,
                (false, false) => tally.neither += 1,
            }
        },
    )
}

/// Real coefficients of a four-party vector on `{x, y}⊗⁴`.
///
/// Index `8·a₁ + 4·a₂ + 2·a₃ + a₄` with axis `0 = x`, `1 = y` for parties
/// `1..=4` in that order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourPartyTensor {
    pub coeffs: [f64; 16],
}

impl Default for FourPartyTensor {
    fn default() -> Self {
        FourPartyTensor { coeffs: [0.0; 16] }
    }
}

impl FourPartyTensor {
    pub fn index(a1: usize, a2: usize, a3: usize, a4: usize) -> usize {
        8 * a1 + 4 * a2 + 2 * a3 + a4
    }

    /// `u₁₂ ⊗ v₃₄` on the party-major basis.
    pub fn pair_12_34(u12: &BellVector4, v34: &BellVector4) -> Self {
        let mut t = FourPartyTensor::default();
        for (a1, a2, a3, a4) in axes() {
            t.coeffs[Self::index(a1, a2, a3, a4)] = u12.coeff(a1, a2) * v34.coeff(a3, a4);
        }
        t
    }

    /// `u₁₄ ⊗ v₂₃`, reindexed onto the `(1, 2, 3, 4)` basis.
    pub fn pair_14_23(u14: &BellVector4, v23: &BellVector4) -> Self {
        let mut t = FourPartyTensor::default();
        for (a1, a2, a3, a4) in axes() {
            t.coeffs[Self::index(a1, a2, a3, a4)] = u14.coeff(a1, a4) * v23.coeff(a2, a3);
        }
        t
    }

    pub fn scaled(mut self, k: f64) -> Self {
        self.coeffs.iter_mut().for_each(|c| *c *= k);
        self
    }

    pub fn add(mut self, other: &Self) -> Self {
        for (c, o) in self.coeffs.iter_mut().zip(other.coeffs) {
            *c += o;
        }
        self
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(other.coeffs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn axes() -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..16).map(|i| ((i >> 3) & 1, (i >> 2) & 1, (i >> 1) & 1, i & 1))
}

/// Coefficient comparison of the two sides of the hidden-variable swapping
/// identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwapReport {
    pub inputs: [f64; 8],
    /// `Ψ⁻₁₂ · Ψ⁻₃₄`.
    pub lhs: FourPartyTensor,
    /// `½{−Ψ⁺₁₄Ψ⁺₂₃ + Ψ⁻₁₄Ψ⁻₂₃ − Φ⁺₁₄Φ⁺₂₃ − Φ⁻₁₄Φ⁻₂₃}`.
    pub rhs: FourPartyTensor,
    pub max_discrepancy: f64,
}

impl SwapReport {
    pub fn discrepancy(&self) -> [f64; 16] {
        std::array::from_fn(|i| self.lhs.coeffs[i] - self.rhs.coeffs[i])
    }
}

/// Sign pattern of the right-hand side, in [`BellState::ALL`] order.
const HV_SWAP_SIGNS: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Expands both sides of the hidden-variable swapping identity for the
/// party components `[f₁, g₁, f₂, g₂, f₃, g₃, f₄, g₄]` and reports their
/// coefficient-wise difference. Equality is not asserted.
pub fn swap_identity_check(x: [f64; 8]) -> SwapReport {
    let [f1, g1, f2, g2, f3, g3, f4, g4] = x;
    let lhs = FourPartyTensor::pair_12_34(
        &bell_vector(BellState::PsiMinus, f1, g1, f2, g2),
        &bell_vector(BellState::PsiMinus, f3, g3, f4, g4),
    );
    let mut rhs = FourPartyTensor::default();
    for (state, sign) in BellState::ALL.into_iter().zip(HV_SWAP_SIGNS) {
        let term = FourPartyTensor::pair_14_23(
            &bell_vector(state, f1, g1, f4, g4),
            &bell_vector(state, f2, g2, f3, g3),
        );
        rhs = rhs.add(&term.scaled(0.5 * sign));
    }
    SwapReport {
        inputs: x,
        lhs,
        rhs,
        max_discrepancy: lhs.max_abs_diff(&rhs),
    }
}

/// How the eight party components of a swap check are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwapRegime {
    /// All eight components independent.
    Unconstrained,
    /// Pairs (1,2) and (3,4) tied by `f₂ = g₁, g₂ = −f₁, f₄ = g₃, g₄ = −f₃`.
    PsiMinusPartner,
    /// Pairs (1,2) and (3,4) share their source: `f₂ = f₁, g₂ = g₁`, etc.
    SharedSource,
}

impl SwapRegime {
    pub const ALL: [SwapRegime; 3] = [
        SwapRegime::Unconstrained,
        SwapRegime::PsiMinusPartner,
        SwapRegime::SharedSource,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SwapRegime::Unconstrained => "unconstrained",
            SwapRegime::PsiMinusPartner => "psi-minus-partner",
            SwapRegime::SharedSource => "shared-source",
        }
    }

    /// Draws inputs with each free party at a uniform angle and unit modulus.
    pub fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> [f64; 8] {
        let mut unit = || {
            let v = PI * rng.random::<f64>();
            (v.cos(), v.sin())
        };
        let (f1, g1) = unit();
        let (f3, g3) = unit();
        let ((f2, g2), (f4, g4)) = match self {
            SwapRegime::Unconstrained => (unit(), unit()),
            SwapRegime::PsiMinusPartner => ((g1, -f1), (g3, -f3)),
            SwapRegime::SharedSource => ((f1, g1), (f3, g3)),
        };
        [f1, g1, f2, g2, f3, g3, f4, g4]
    }
}

impl std::str::FromStr for SwapRegime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SwapRegime::ALL
            .into_iter()
            .find(|r| r.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown swap regime `{s}`")))
    }
}

/// Per-regime swap report: individual draws plus the ensemble averages of
/// both sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapRegimeReport {
    pub regime: SwapRegime,
    pub draws: Vec<SwapReport>,
    pub mean_lhs: FourPartyTensor,
    pub mean_rhs: FourPartyTensor,
    pub mean_max_discrepancy: f64,
    pub averaged_discrepancy: f64,
}

pub fn swap_regime_report(regime: SwapRegime, n_draws: usize, seed: u64) -> Result<SwapRegimeReport> {
    if n_draws == 0 {
        return config_err("swap report needs at least one draw");
    }
    let mut rng = substream(seed, 0);
    let draws: Vec<SwapReport> = (0..n_draws).map(|_| swap_identity_check(regime.draw(&mut rng))).collect();
    let k = 1.0 / n_draws as f64;
    let mut mean_lhs = FourPartyTensor::default();
    let mut mean_rhs = FourPartyTensor::default();
    for d in &draws {
        mean_lhs = mean_lhs.add(&d.lhs.scaled(k));
        mean_rhs = mean_rhs.add(&d.rhs.scaled(k));
    }
    Ok(SwapRegimeReport {
        regime,
        mean_max_discrepancy: draws.iter().map(|d| d.max_discrepancy).sum::<f64>() * k,
        averaged_discrepancy: mean_lhs.max_abs_diff(&mean_rhs),
        mean_lhs,
        mean_rhs,
        draws,
    })
}

/// Normalized two-qubit Bell amplitudes on `(xx, xy, yx, yy)`.
pub fn qm_bell_amplitudes(state: BellState) -> BellVector4 {
    let s = FRAC_1_SQRT_2;
    BellVector4::from_array(match state {
        BellState::PsiMinus => [0.0, s, -s, 0.0],
        BellState::PsiPlus => [0.0, s, s, 0.0],
        BellState::PhiPlus => [s, 0.0, 0.0, s],
        BellState::PhiMinus => [s, 0.0, 0.0, -s],
    })
}

/// Both sides of the quantum swapping identity
/// `|ψ⁻₁₂⟩|ψ⁻₃₄⟩ = ½{|ψ⁺₁₄⟩|ψ⁺₂₃⟩ − |ψ⁻₁₄⟩|ψ⁻₂₃⟩ − |φ⁺₁₄⟩|φ⁺₂₃⟩ + |φ⁻₁₄⟩|φ⁻₂₃⟩}`.
pub fn qm_swap_sides() -> (FourPartyTensor, FourPartyTensor) {
    let psi = qm_bell_amplitudes(BellState::PsiMinus);
    let lhs = FourPartyTensor::pair_12_34(&psi, &psi);
    let signs = [1.0, -1.0, -1.0, 1.0];
    let [psi_plus, psi_minus, phi_plus, phi_minus] = [
        BellState::PsiPlus,
        BellState::PsiMinus,
        BellState::PhiPlus,
        BellState::PhiMinus,
    ]
    .map(qm_bell_amplitudes);
    let mut rhs = FourPartyTensor::default();
    for (v, sign) in [psi_plus, psi_minus, phi_plus, phi_minus].iter().zip(signs) {
        rhs = rhs.add(&FourPartyTensor::pair_14_23(v, v).scaled(0.5 * sign));
    }
    (lhs, rhs)
}

/// Largest coefficient mismatch of the quantum swapping identity.
pub fn qm_swap_discrepancy() -> f64 {
    let (l, r) = qm_swap_sides();
    l.max_abs_diff(&r)
}

/// Threshold used by the classifier detectors; re-exported for reports.
pub const HOM_THRESHOLD: f64 = THRESHOLD;

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use crate::hv::{generate_interval, partner_hv, AngleMode, Waveform};
    use proptest::prelude::*;

    #[test]
    fn bell_vector_examples() {
        assert_eq!(bell_vector(BellState::PsiMinus, 1.0, 0.0, 0.0, 1.0).to_array(), [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(bell_vector(BellState::PhiPlus, 1.0, 0.0, 1.0, 0.0).to_array(), [1.0, 0.0, 0.0, 0.0]);
        let (fa, ga, fb, gb) = (0.3, -1.1, 0.7, 0.2);
        assert_eq!(
            bell_vector(BellState::PsiMinus, fa, ga, fb, gb).to_array(),
            [fa * gb, -fa * fb, ga * gb, -ga * fb]
        );
        assert_eq!(
            bell_vector(BellState::PsiPlus, fa, ga, fb, gb).to_array(),
            [fa * gb, fa * fb, ga * gb, ga * fb]
        );
        assert_eq!(
            bell_vector(BellState::PhiPlus, fa, ga, fb, gb).to_array(),
            [fa * fb, fa * gb, ga * fb, ga * gb]
        );
        assert_eq!(
            bell_vector(BellState::PhiMinus, fa, ga, fb, gb).to_array(),
            [fa * fb, -fa * gb, ga * fb, -ga * gb]
        );
    }

    proptest! {
        #[test]
        fn norm_factorizes(fa in -2.0f64..2.0, ga in -2.0f64..2.0, fb in -2.0f64..2.0, gb in -2.0f64..2.0) {
            for s in BellState::ALL {
                let n = bell_vector(s, fa, ga, fb, gb).norm_squared();
                prop_assert!((n - (fa * fa + ga * ga) * (fb * fb + gb * gb)).abs() < 1e-12);
            }
        }

        #[test]
        fn closed_form_inner_products(fa in -2.0f64..2.0, ga in -2.0f64..2.0, fb in -2.0f64..2.0, gb in -2.0f64..2.0) {
            let v = |s| bell_vector(s, fa, ga, fb, gb);
            let a2 = fa * fa + ga * ga;
            let d = dot(&v(BellState::PsiPlus), &v(BellState::PsiMinus));
            prop_assert!((d - a2 * (gb * gb - fb * fb)).abs() < 1e-12);
            // different letter and parity: exactly orthogonal
            prop_assert!(dot(&v(BellState::PsiPlus), &v(BellState::PhiMinus)).abs() < 1e-12);
            prop_assert!(dot(&v(BellState::PsiMinus), &v(BellState::PhiPlus)).abs() < 1e-12);
            prop_assert!(dot(&v(BellState::PsiMinus), &v(BellState::PsiMinus)) >= 0.0);
        }

        #[test]
        fn beamsplitter_conserves_energy(
            a in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..8),
            seed in 0u64..1000,
        ) {
            let mut rng = substream(seed, 0);
            let b: Vec<(f64, f64)> = a.iter().map(|_| (rng.random::<f64>() - 0.5, rng.random::<f64>() * 3.0)).collect();
            let hv_a = IntervalHV::new(a, 0.125).unwrap();
            let hv_b = IntervalHV::new(b, 0.125).unwrap();
            let (c, d) = beamsplitter(&hv_a, &hv_b).unwrap();
            let before = hv_a.modulus_integral() + hv_b.modulus_integral();
            prop_assert!((c.modulus_integral() + d.modulus_integral() - before).abs() < 1e-12 * before.max(1.0));
            // applying the transform twice returns the inputs
            let (a2, b2) = beamsplitter(&c, &d).unwrap();
            for (x, y) in a2.samples().iter().zip(hv_a.samples()).chain(b2.samples().iter().zip(hv_b.samples())) {
                prop_assert!((x.0 - y.0).abs() < 1e-12 && (x.1 - y.1).abs() < 1e-12);
            }
        }

        #[test]
        fn hom_closed_forms_match_beamsplitter(
            s in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..10),
            dt in 0.05f64..1.0,
        ) {
            let hv = IntervalHV::new(s, dt).unwrap();
            let m = hv.modulus_integral();
            for state in BellState::ALL {
                let (c, d) = beamsplitter(&hv, &partner_hv(&hv, state)).unwrap();
                let (mc, md) = hom_outputs(state, &hv);
                prop_assert!((c.modulus_integral() - mc).abs() < 1e-12 * m.max(1.0), "{}", state);
                prop_assert!((d.modulus_integral() - md).abs() < 1e-12 * m.max(1.0), "{}", state);
                prop_assert!((mc + md - 2.0 * m).abs() < 1e-12 * m.max(1.0));
            }
        }
    }

    #[test]
    fn beamsplitter_edge_cases() {
        let a = IntervalHV::new(vec![(0.3, 0.4), (1.0, -2.0)], 0.5).unwrap();
        let (_, d) = beamsplitter(&a, &a).unwrap();
        assert!(d.samples().iter().all(|&(f, g)| f == 0.0 && g == 0.0));
        let neg = IntervalHV::new(vec![(-0.3, -0.4), (-1.0, 2.0)], 0.5).unwrap();
        let (c, _) = beamsplitter(&a, &neg).unwrap();
        assert!(c.samples().iter().all(|&(f, g)| f == 0.0 && g == 0.0));
        let short = IntervalHV::constant(1.0, 0.0);
        assert!(matches!(beamsplitter(&a, &short), Err(Error::Input(_))));
    }

    #[test]
    fn hom_examples() {
        let h = IntervalHV::constant(1.0, 0.0);
        assert_eq!(hom_outputs(BellState::PhiPlus, &h), (2.0, 0.0));
        assert_eq!(hom_outputs(BellState::PhiMinus, &h), (2.0, 0.0));
        let s = FRAC_1_SQRT_2;
        let (c, d) = hom_outputs(BellState::PsiMinus, &IntervalHV::constant(s, s));
        assert!((c - 1.0).abs() < 1e-15 && (d - 1.0).abs() < 1e-15);
    }

    #[test]
    fn routing_examples() {
        assert_eq!(apply_routing_rule(1.5, 0.5), (2.0, 0.0));
        assert_eq!(apply_routing_rule(0.3, 1.7), (0.0, 2.0));
        assert_eq!(apply_routing_rule(1.0, 1.0), (2.0, 0.0));
        assert!(!routing_applies(BellState::PsiMinus));
        assert!(!routing_applies(BellState::PhiPlus));
    }

    #[test]
    fn classifier_isolates_psi_minus() {
        for discipline in [Discipline::Accumulator, Discipline::Bernoulli] {
            let cfg = HomConfig { discipline, seed: 3, ..HomConfig::default() };
            let f = |s| hom_classifier(s, &cfg).unwrap().coincidence_fraction();
            assert_eq!(f(BellState::PsiMinus), 1.0);
            assert_eq!(f(BellState::PhiPlus), 0.0);
            assert_eq!(f(BellState::PhiMinus), 0.0);
            assert_eq!(f(BellState::PsiPlus), 0.0);
        }
    }

    #[test]
    fn classifier_without_routing_leaks_for_untidy_states() {
        let cfg = HomConfig { discipline: Discipline::Bernoulli, routing: false, ..HomConfig::default() };
        assert!(hom_classifier(BellState::PhiMinus, &cfg).unwrap().coincidence_fraction() > 0.0);
        assert_eq!(hom_classifier(BellState::PsiMinus, &cfg).unwrap().coincidence_fraction(), 1.0);
    }

    #[test]
    fn classifier_with_harmonic_waveform() {
        let cfg = HomConfig {
            generator: GeneratorConfig {
                samples_per_interval: 8,
                waveform: Waveform::Harmonic { cycles: 2 },
                angle_mode: AngleMode::Uniform,
                ..GeneratorConfig::default()
            },
            ..HomConfig::default()
        };
        assert_eq!(hom_classifier(BellState::PsiMinus, &cfg).unwrap().coincidence_fraction(), 1.0);
        assert_eq!(hom_classifier(BellState::PsiPlus, &cfg).unwrap().coincidence_fraction(), 0.0);
    }

    #[test]
    fn gram_matrix_is_identity_on_average() {
        let g = gram_average(ModulusMode::Fixed { m: 1.0 }, 1_000_000, 5, 4).unwrap();
        assert!(g.max_diagonal_error() < 0.01, "{g:?}");
        assert!(g.max_off_diagonal() < 0.01, "{g:?}");
        assert!((g.mean_f2 - 0.5).abs() < 0.005);
        assert!((g.mean_g2 - 0.5).abs() < 0.005);
        assert!(g.mean_fg.abs() < 0.005);
        assert!(matches!(
            gram_average(ModulusMode::Fixed { m: 1.0 }, 10, 5, 1),
            Err(Error::Statistic(_))
        ));
    }

    #[test]
    fn gram_with_varying_modulus() {
        let g = gram_average(ModulusMode::Uniform { lo: 0.5, hi: 1.5 }, 400_000, 1, 2).unwrap();
        assert!(g.max_diagonal_error() < 0.02 && g.max_off_diagonal() < 0.02, "{g:?}");
    }

    #[test]
    fn generated_hv_feeds_hom() {
        let mut rng = substream(12, 0);
        let hv = generate_interval(&mut rng, &GeneratorConfig::default()).unwrap();
        let (c, d) = hom_outputs(BellState::PsiMinus, &hv);
        assert!((c - 1.0).abs() < 1e-12 && (d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qm_identity_holds() {
        assert!(qm_swap_discrepancy() < 1e-12);
    }

    #[test]
    fn swap_zero_inputs() {
        let r = swap_identity_check([0.0; 8]);
        assert_eq!(r.max_discrepancy, 0.0);
        assert!(r.lhs.coeffs.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn reindexing_is_a_permutation_of_coefficients() {
        let u = BellVector4::from_array([1.0, 2.0, 3.0, 4.0]);
        let v = BellVector4::from_array([5.0, 6.0, 7.0, 8.0]);
        let mut a = FourPartyTensor::pair_12_34(&u, &v).coeffs.to_vec();
        let mut b = FourPartyTensor::pair_14_23(&u, &v).coeffs.to_vec();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert_eq!(a, b);
        // u₁₄ ⊗ v₂₃ at (a1,a2,a3,a4) = u[a1,a4]·v[a2,a3]
        let t = FourPartyTensor::pair_14_23(&u, &v);
        assert_eq!(t.coeffs[FourPartyTensor::index(0, 1, 0, 1)], u.coeff(0, 1) * v.coeff(1, 0));
    }

    #[test]
    fn regime_reports_are_complete() {
        for regime in SwapRegime::ALL {
            let r = swap_regime_report(regime, 50, 1).unwrap();
            assert_eq!(r.draws.len(), 50);
            for d in &r.draws {
                assert!(d.lhs.coeffs.iter().chain(&d.rhs.coeffs).all(|c| c.is_finite()));
                let diff = d.discrepancy();
                let max = diff.iter().map(|x| x.abs()).fold(0.0, f64::max);
                assert_eq!(max, d.max_discrepancy);
            }
            assert_eq!(regime.name().parse::<SwapRegime>().unwrap(), regime);
        }
        let r = swap_regime_report(SwapRegime::PsiMinusPartner, 1, 0).unwrap();
        let [f1, g1, f2, g2, f3, g3, f4, g4] = r.draws[0].inputs;
        assert_eq!((f2, g2, f4, g4), (g1, -f1, g3, -f3));
        assert!(swap_regime_report(SwapRegime::Unconstrained, 0, 0).is_err());
    }
}
