//! The Boolean comparator model.
//!
//! Each interval carries one scalar token `λ`, uniform on `[0, π)`. An
//! analyzer at `α` transmits exactly the tokens in the arc `[α, α + π/2)`
//! (mod π) and reflects the complementary arc, so coincidences are governed by
//! arc intersections. The resulting correlations trace the saw-tooth that
//! sits exactly on the CHSH bound.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bell::{chsh_from, ChshAngles, ChshEstimate, CoincidenceCounts, RunConfig};
use crate::error::{config_err, Result};
use crate::hv::reduce_angle;
use crate::rng::{run_intervals, Merge};
use crate::state::BellState;

/// A hidden-variable token.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Token {
    pub lambda: f64,
}

impl Token {
    /// Token with `λ` reduced to `[0, π)`.
    pub fn new(lambda: f64) -> Self {
        Token {
            lambda: reduce_angle(lambda),
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Token {
            lambda: PI * rng.random::<f64>(),
        }
    }
}

/// Set-membership analyzer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BooleanAnalyzer {
    pub alpha: f64,
}

impl BooleanAnalyzer {
    pub fn new(alpha: f64) -> Self {
        BooleanAnalyzer { alpha }
    }

    /// `true` iff `λ ∈ [α, α + π/2)` mod π.
    pub fn transmits(&self, tok: Token) -> bool {
        reduce_angle(tok.lambda - self.alpha) < FRAC_PI_2
    }
}

/// Transmitted bit of `an` for `tok`; the reflected output is its complement.
pub fn transmit(an: &BooleanAnalyzer, tok: Token) -> bool {
    an.transmits(tok)
}

/// Station-B token for the entangled state, in `[0, π)`.
pub fn boolean_partner(lambda: f64, state: BellState) -> f64 {
    reduce_angle(match state {
        BellState::PsiMinus => lambda - FRAC_PI_2,
        BellState::PhiPlus => lambda,
        BellState::PhiMinus => -lambda,
        BellState::PsiPlus => lambda + FRAC_PI_2,
    })
}

/// Runs the Boolean model at `cfg.alpha`, `cfg.beta`.
///
/// Only the state, angles, interval count, seed and partition count of
/// `cfg` are used; the token stream replaces the vector source.
pub fn run_boolean_bell(cfg: &RunConfig) -> Result<CoincidenceCounts> {
    validate(cfg)?;
    let an_a = BooleanAnalyzer::new(cfg.alpha);
    let an_b = BooleanAnalyzer::new(cfg.beta);
    run_intervals(
        cfg.seed,
        cfg.n_intervals,
        cfg.partitions,
        || (),
        |_, rng, _, tally: &mut CoincidenceCounts| {
            let tok = Token::random(rng);
            let partner = Token {
                lambda: boolean_partner(tok.lambda, cfg.state),
            };
            let a = an_a.transmits(tok);
            let b = an_b.transmits(partner);
            tally.record(a, !a, b, !b);
        },
    )
}

/// Tallies of the single-beam two-analyzer chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ChainCounts {
    pub n_intervals: u64,
    pub first: u64,
    pub both: u64,
}

impl ChainCounts {
    /// Fraction of all intervals passing both analyzers.
    pub fn both_fraction(&self) -> f64 {
        self.both as f64 / self.n_intervals as f64
    }
}

impl Merge for ChainCounts {
    fn merge(&mut self, o: Self) {
        self.n_intervals += o.n_intervals;
        self.first += o.first;
        self.both += o.both;
    }
}

/// One token stream through analyzers at `alpha` and then `beta`.
pub fn run_boolean_chain(cfg: &RunConfig, alpha: f64, beta: f64) -> Result<ChainCounts> {
    validate(cfg)?;
    let first = BooleanAnalyzer::new(alpha);
    let second = BooleanAnalyzer::new(beta);
    run_intervals(
        cfg.seed,
        cfg.n_intervals,
        cfg.partitions,
        || (),
        |_, rng, _, tally: &mut ChainCounts| {
            let tok = Token::random(rng);
            tally.n_intervals += 1;
            if first.transmits(tok) {
                tally.first += 1;
                tally.both += u64::from(second.transmits(tok));
            }
        },
    )
}

fn validate(cfg: &RunConfig) -> Result<()> {
    if cfg.n_intervals == 0 {
        return config_err("n_intervals must be at least 1");
    }
    if !(cfg.alpha.is_finite() && cfg.beta.is_finite()) {
        return config_err("analyzer angles must be finite");
    }
    if cfg.partitions == 0 {
        return config_err("partition count must be at least 1");
    }
    Ok(())
}

/// Overlap of the transmission arcs at `alpha` and `beta`, as a fraction
/// of the token range: `(π/2 − d)/π` with `d` the folded angular distance.
pub fn boolean_overlap(alpha: f64, beta: f64) -> f64 {
    let d = reduce_angle(alpha - beta);
    let d = d.min(PI - d);
    (FRAC_PI_2 - d) / PI
}

/// Angle of the station-A arc that coincides with station B transmitting
/// at `beta` under `state`.
fn pulled_back_arc(state: BellState, beta: f64) -> f64 {
    match state {
        // λ − π/2 ∈ [β, β+π/2)  ⇔  λ ∈ [β+π/2, β+π)
        BellState::PsiMinus | BellState::PsiPlus => beta + FRAC_PI_2,
        BellState::PhiPlus => beta,
        // −λ ∈ [β, β+π/2)  ⇔  λ ∈ (−β−π/2, −β]
        BellState::PhiMinus => -beta - FRAC_PI_2,
    }
}

/// Expected `n₊₊ / n_intervals` of [`run_boolean_bell`].
pub fn boolean_fraction(state: BellState, alpha: f64, beta: f64) -> f64 {
    boolean_overlap(alpha, pulled_back_arc(state, beta))
}

/// Expected correlation: `4·P₊₊ − 1`.
pub fn boolean_correlation(state: BellState, alpha: f64, beta: f64) -> f64 {
    4.0 * boolean_fraction(state, alpha, beta) - 1.0
}

pub fn boolean_chsh_analytic(state: BellState, angles: &ChshAngles) -> f64 {
    ChshAngles::combine(angles.pairs().map(|(a, b)| boolean_correlation(state, a, b)))
}

/// Four-run Monte Carlo CHSH estimate of the Boolean model.
pub fn boolean_chsh(cfg_base: &RunConfig, angles: &ChshAngles) -> Result<ChshEstimate> {
    chsh_from(cfg_base, angles, run_boolean_bell)
}
