use std::time::Instant;

use hvlab::acceptance::{run_criterion, AcceptanceConfig, CRITERIA};
use hvlab::algebra::{
    apply_routing_rule, gram_average, hom_classifier, hom_outputs, routing_applies, swap_regime_report, HomConfig,
    SwapRegime,
};
use hvlab::bell::{
    analytic_chsh, analytic_correlation, analytic_fraction, analytic_malus, chsh, run_bell, run_malus, ChshAngles,
    RunConfig, SamplingSemantics, SweepRow,
};
use hvlab::boolean::{boolean_chsh, boolean_chsh_analytic, boolean_correlation, boolean_fraction, run_boolean_bell};
use hvlab::hv::{generate_interval, Discipline, GeneratorConfig, ModulusMode, Waveform};
use hvlab::report::{bell_table, chsh_table, config_digest, gram_table, hom_table, malus_table, swap_table, Table};
use hvlab::rng::{default_partitions, substream};
use hvlab::stats::binomial_stderr;
use hvlab::BellState;
use serde::Serialize;

use crate::config::{load_config, AngleValue, RunManifest, Settings};
use crate::error::CliError;
use crate::output::{manifest_path_for, write_all};
use crate::Common;

const DEFAULT_N: u64 = 1_000_000;
const DEFAULT_SWAP_DRAWS: usize = 10;
/// Seed of `accept` when none is given.
const ACCEPT_SEED: u64 = 7;

/// Result of one subcommand before anything is written.
struct Outcome {
    table: Table,
    resolved: Settings,
    /// Lines echoed to stdout in addition to the table.
    lines: Vec<String>,
    failures: usize,
}

#[derive(Serialize)]
struct DigestInput<'a> {
    seed: u64,
    config: &'a Settings,
}

fn config_err<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Config(msg.into()))
}

fn resolve_seed(subcommand: &str, common: &Common, file_seed: Option<u64>) -> Result<u64, CliError> {
    let seed = if let Some(s) = common.seed.or(file_seed) {
        s
    } else if common.allow_env_seed {
        match std::env::var("HVLAB_SEED") {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("HVLAB_SEED `{v}` is not an unsigned integer")))?,
            Err(_) => return config_err("--allow-env-seed is set but HVLAB_SEED is not"),
        }
    } else if subcommand == "accept" {
        ACCEPT_SEED
    } else {
        return config_err("a seed is required: pass --seed (or set HVLAB_SEED with --allow-env-seed)");
    };
    // manifests store the seed as a TOML integer
    if seed > i64::MAX as u64 {
        return config_err(format!("seed {seed} exceeds {}", i64::MAX));
    }
    Ok(seed)
}

pub fn run(subcommand: &str, flags: Settings, common: &Common) -> Result<(), CliError> {
    let loaded = match &common.config {
        Some(path) => load_config(path, subcommand)?,
        None => Default::default(),
    };
    let mut settings = loaded.settings.overlay(flags);
    if common.n.is_some() {
        settings.n = common.n;
    }
    let seed = resolve_seed(subcommand, common, loaded.seed)?;
    let partitions = common.partitions.or(loaded.partitions).unwrap_or_else(default_partitions);
    if partitions == 0 {
        return config_err("--partitions must be at least 1");
    }
    if common.manifest.is_some() && common.out.is_none() {
        return config_err("--manifest needs --out");
    }

    let start = Instant::now();
    let outcome = execute(subcommand, &settings, seed, partitions)?;
    let elapsed = start.elapsed().as_secs_f64();

    let digest = config_digest(
        subcommand,
        &DigestInput {
            seed,
            config: &outcome.resolved,
        },
    )?;
    let body = if common.json {
        outcome.table.to_json(&digest)
    } else {
        outcome.table.to_csv(&digest)
    };
    for line in &outcome.lines {
        println!("{line}");
    }
    match &common.out {
        Some(out) => {
            let manifest = RunManifest {
                subcommand: subcommand.to_owned(),
                seed,
                partitions,
                version: format!("hvlab {}", env!("CARGO_PKG_VERSION")),
                wall_clock_seconds: elapsed,
                config: outcome.resolved,
            };
            let manifest_path = common.manifest.clone().unwrap_or_else(|| manifest_path_for(out));
            write_all(&[(out.clone(), body), (manifest_path, manifest.to_toml()?)])?;
        }
        None if subcommand == "accept" => {}
        None => print!("{body}"),
    }
    if outcome.failures > 0 {
        return Err(CliError::Acceptance(outcome.failures));
    }
    Ok(())
}

fn execute(subcommand: &str, s: &Settings, seed: u64, partitions: usize) -> Result<Outcome, CliError> {
    match subcommand {
        "bell" => cmd_bell(s, seed, partitions),
        "chsh" => cmd_chsh(s, seed, partitions),
        "malus" => cmd_malus(s, seed, partitions),
        "boolean" => cmd_boolean(s, seed, partitions),
        "gram" => cmd_gram(s, seed, partitions),
        "hom" => cmd_hom(s, seed, partitions),
        "swap" => cmd_swap(s, seed),
        "accept" => cmd_accept(s, seed, partitions),
        other => config_err(format!("unknown subcommand `{other}`")),
    }
}

fn n_intervals(s: &Settings) -> Result<u64, CliError> {
    match s.n.unwrap_or(DEFAULT_N) {
        0 => config_err("--n must be at least 1"),
        n => Ok(n),
    }
}

fn angle(v: &Option<AngleValue>) -> Result<Option<f64>, CliError> {
    v.as_ref().map(AngleValue::radians).transpose()
}

fn generator(s: &Settings) -> Result<GeneratorConfig, CliError> {
    let modulus_mode = match (s.modulus_lo, s.modulus_hi) {
        (Some(lo), Some(hi)) => ModulusMode::Uniform { lo, hi },
        (None, None) => ModulusMode::Fixed { m: 1.0 },
        _ => return config_err("modulus_lo and modulus_hi go together"),
    };
    let g = GeneratorConfig {
        modulus_mode,
        samples_per_interval: s.samples.unwrap_or(1),
        waveform: s.cycles.map_or(Waveform::Constant, |cycles| Waveform::Harmonic { cycles }),
        ..GeneratorConfig::default()
    };
    g.validate()?;
    Ok(g)
}

/// Resolved generator keys, kept only where they differ from the defaults.
fn generator_settings(s: &Settings) -> Settings {
    Settings {
        samples: s.samples,
        cycles: s.cycles,
        modulus_lo: s.modulus_lo,
        modulus_hi: s.modulus_hi,
        ..Settings::default()
    }
}

fn base_run(s: &Settings, seed: u64, partitions: usize) -> Result<RunConfig, CliError> {
    Ok(RunConfig {
        state: s.state.unwrap_or_default(),
        semantics: s.semantics.unwrap_or_default(),
        n_intervals: n_intervals(s)?,
        seed,
        generator: generator(s)?,
        discipline: s.discipline.unwrap_or_default(),
        partitions,
        ..RunConfig::default()
    })
}

/// Analyzer pairs: one per Δ with `β = α − Δ`, or the single `(α, β)`.
fn settings_points(s: &Settings) -> Result<(Vec<(f64, f64)>, Settings), CliError> {
    let alpha = angle(&s.alpha)?.unwrap_or(0.0);
    match s.grid()? {
        Some(deltas) => {
            if s.beta.is_some() {
                return config_err("beta cannot be combined with a delta grid");
            }
            let points = deltas.iter().map(|d| (alpha, alpha - d)).collect();
            let resolved = Settings {
                alpha: Some(AngleValue::Radians(alpha)),
                deltas: Some(deltas),
                ..Settings::default()
            };
            Ok((points, resolved))
        }
        None => {
            let beta = angle(&s.beta)?.unwrap_or(0.0);
            let resolved = Settings {
                alpha: Some(AngleValue::Radians(alpha)),
                beta: Some(AngleValue::Radians(beta)),
                ..Settings::default()
            };
            Ok((vec![(alpha, beta)], resolved))
        }
    }
}

fn outcome(table: Table, resolved: Settings) -> Outcome {
    Outcome {
        table,
        resolved,
        lines: Vec::new(),
        failures: 0,
    }
}

fn row(alpha: f64, beta: f64, counts: hvlab::bell::CoincidenceCounts, analytic: f64) -> SweepRow {
    SweepRow {
        delta: alpha - beta,
        alpha,
        beta,
        counts,
        measured: counts.pp_fraction(),
        analytic,
        stderr: binomial_stderr(analytic, counts.n_intervals),
    }
}

fn cmd_bell(s: &Settings, seed: u64, partitions: usize) -> Result<Outcome, CliError> {
    let base = base_run(s, seed, partitions)?;
    let (points, angles) = settings_points(s)?;
    let mut rows = Vec::with_capacity(points.len());
    for (alpha, beta) in points {
        let counts = run_bell(&base.with_angles(alpha, beta))?;
        rows.push(row(alpha, beta, counts, analytic_fraction(base.state, base.semantics, alpha, beta)));
    }
    let resolved = Settings {
        n: Some(base.n_intervals),
        state: Some(base.state),
        semantics: Some(base.semantics),
        discipline: Some(base.discipline),
        ..angles.overlay(generator_settings(s))
    };
    Ok(outcome(bell_table(base.state, base.semantics.name(), &rows), resolved))
}

fn cmd_boolean(s: &Settings, seed: u64, partitions: usize) -> Result<Outcome, CliError> {
    let base = RunConfig {
        state: s.state.unwrap_or_default(),
        n_intervals: n_intervals(s)?,
        seed,
        partitions,
        ..RunConfig::default()
    };
    let (points, angles) = settings_points(s)?;
    let mut rows = Vec::with_capacity(points.len());
    for (alpha, beta) in points {
        let counts = run_boolean_bell(&base.with_angles(alpha, beta))?;
        rows.push(row(alpha, beta, counts, boolean_fraction(base.state, alpha, beta)));
    }
    let resolved = Settings {
        n: Some(base.n_intervals),
        state: Some(base.state),
        ..angles
    };
    Ok(outcome(bell_table(base.state, "boolean", &rows), resolved))
}

fn cmd_malus(s: &Settings, seed: u64, partitions: usize) -> Result<Outcome, CliError> {
    let base = base_run(s, seed, partitions)?;
    let (points, angles) = settings_points(s)?;
    let mut rows = Vec::with_capacity(points.len());
    for (alpha, beta) in points {
        let out = run_malus(&base, alpha, beta)?;
        rows.push((alpha, beta, out, analytic_malus(base.semantics, alpha, beta)));
    }
    let resolved = Settings {
        n: Some(base.n_intervals),
        semantics: Some(base.semantics),
        discipline: Some(base.discipline),
        ..angles.overlay(generator_settings(s))
    };
    Ok(outcome(malus_table(&rows)?, resolved))
}

fn cmd_chsh(s: &Settings, seed: u64, partitions: usize) -> Result<Outcome, CliError> {
    let base = base_run(s, seed, partitions)?;
    let custom = [&s.a, &s.a_prime, &s.b, &s.b_prime];
    let angles = match custom.map(angle) {
        [Ok(None), Ok(None), Ok(None), Ok(None)] => ChshAngles::default(),
        [Ok(Some(a)), Ok(Some(a_prime)), Ok(Some(b)), Ok(Some(b_prime))] => ChshAngles { a, a_prime, b, b_prime },
        results => {
            for r in results {
                r?;
            }
            return config_err("custom CHSH settings need all of a, a_prime, b, b_prime");
        }
    };
    let projection = RunConfig {
        semantics: SamplingSemantics::Projection,
        ..base.clone()
    };
    let naive = RunConfig {
        semantics: SamplingSemantics::NaiveUniform,
        ..base.clone()
    };
    let state = base.state;
    let pairs = angles.pairs();
    let vector_e = |sem| pairs.map(|(a, b)| analytic_correlation(state, sem, a, b));
    let est_p = chsh(&projection, &angles)?;
    let est_n = chsh(&naive, &angles)?;
    let est_b = boolean_chsh(&base, &angles)?;
    let table = chsh_table(&[
        (
            "vector-projection",
            &est_p,
            vector_e(SamplingSemantics::Projection),
            analytic_chsh(state, SamplingSemantics::Projection, &angles),
        ),
        (
            "vector-naive-uniform",
            &est_n,
            vector_e(SamplingSemantics::NaiveUniform),
            analytic_chsh(state, SamplingSemantics::NaiveUniform, &angles),
        ),
        (
            "boolean",
            &est_b,
            pairs.map(|(a, b)| boolean_correlation(state, a, b)),
            boolean_chsh_analytic(state, &angles),
        ),
    ]);
    let rad = |x: f64| Some(AngleValue::Radians(x));
    let resolved = Settings {
        n: Some(base.n_intervals),
        state: Some(state),
        discipline: Some(base.discipline),
        a: rad(angles.a),
        a_prime: rad(angles.a_prime),
        b: rad(angles.b),
        b_prime: rad(angles.b_prime),
        ..generator_settings(s)
    };
    Ok(outcome(table, resolved))
}

fn cmd_gram(s: &Settings, seed: u64, partitions: usize) -> Result<Outcome, CliError> {
    let n = n_intervals(s)?;
    let modulus = generator(s)?.modulus_mode;
    let g = gram_average(modulus, n, seed, partitions)?;
    let resolved = Settings {
        n: Some(n),
        modulus_lo: s.modulus_lo,
        modulus_hi: s.modulus_hi,
        ..Settings::default()
    };
    Ok(outcome(gram_table(&g), resolved))
}

fn cmd_hom(s: &Settings, seed: u64, partitions: usize) -> Result<Outcome, CliError> {
    let gen = generator(s)?;
    let cfg = HomConfig {
        n_intervals: n_intervals(s)?,
        seed,
        generator: gen,
        discipline: s.discipline.unwrap_or(Discipline::Accumulator),
        routing: s.routing.unwrap_or(true),
        partitions,
    };
    let states = s.state.map_or(BellState::ALL.to_vec(), |st| vec![st]);
    // one reference interval drawn from a stream the classifier never uses
    let reference = generate_interval(&mut substream(seed, u64::MAX), &gen)?;
    let m = reference.modulus_integral();
    let mut rows = Vec::with_capacity(states.len());
    for state in states {
        let (mc, md) = hom_outputs(state, &reference);
        let routed = if cfg.routing && routing_applies(state) {
            apply_routing_rule(mc, md)
        } else {
            (mc, md)
        };
        rows.push((state, m, (mc, md), routed, hom_classifier(state, &cfg)?));
    }
    let resolved = Settings {
        n: Some(cfg.n_intervals),
        state: s.state,
        discipline: Some(cfg.discipline),
        routing: Some(cfg.routing),
        ..generator_settings(s)
    };
    Ok(outcome(hom_table(&rows), resolved))
}

fn cmd_swap(s: &Settings, seed: u64) -> Result<Outcome, CliError> {
    let draws = s.draws.unwrap_or(DEFAULT_SWAP_DRAWS);
    let regimes = s.regime.map_or(SwapRegime::ALL.to_vec(), |r| vec![r]);
    let reports = regimes
        .into_iter()
        .map(|r| swap_regime_report(r, draws, seed))
        .collect::<Result<Vec<_>, _>>()?;
    let resolved = Settings {
        draws: Some(draws),
        regime: s.regime,
        ..Settings::default()
    };
    Ok(outcome(swap_table(&reports), resolved))
}

const ACCEPT_COLUMNS: [&str; 4] = ["id", "name", "passed", "detail"];

fn cmd_accept(s: &Settings, seed: u64, partitions: usize) -> Result<Outcome, CliError> {
    let cfg = AcceptanceConfig {
        seed,
        n_intervals: n_intervals(s)?,
        partitions,
    };
    let ids = s.criteria.clone().unwrap_or_else(|| CRITERIA.to_vec());
    let mut table = Table::new(&ACCEPT_COLUMNS);
    let mut lines = Vec::new();
    let mut failures = 0;
    for &id in &ids {
        let Some(r) = run_criterion(id, &cfg) else {
            return config_err(format!("no acceptance criterion {id}"));
        };
        failures += usize::from(!r.passed);
        lines.push(r.to_string());
        table.push(vec![
            u64::from(r.id).into(),
            r.name.clone().into(),
            (if r.passed { "true" } else { "false" }).into(),
            r.detail.clone().into(),
        ])?;
    }
    let resolved = Settings {
        n: Some(cfg.n_intervals),
        criteria: Some(ids),
        ..Settings::default()
    };
    Ok(Outcome {
        table,
        resolved,
        lines,
        failures,
    })
}
