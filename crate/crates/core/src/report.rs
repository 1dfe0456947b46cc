//! Plot-ready tables with a fixed column order, rendered as CSV or JSON.

use std::fmt;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::algebra::{FourPartyTensor, GramReport, HomCounts, SwapRegimeReport};
use crate::bell::{ChshEstimate, MalusOutcome, SweepRow};
use crate::error::{Error, Result};
use crate::state::BellState;

/// One table cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Text(String),
    Int(u64),
    Float(f64),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Text(s) => f.write_str(s),
            Cell::Int(n) => write!(f, "{n}"),
            Cell::Float(x) => write!(f, "{x:?}"),
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

/// A rectangular table whose column order is part of its interface.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[&'static str] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Input(format!(
                "row has {} cells, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// CSV with a leading `# manifest-sha256=<digest>` comment line.
    pub fn to_csv(&self, digest: &str) -> String {
        let mut w = csv::Writer::from_writer(format!("# manifest-sha256={digest}\n").into_bytes());
        let write = |w: &mut csv::Writer<Vec<u8>>| -> csv::Result<()> {
            w.write_record(&self.columns)?;
            for row in &self.rows {
                w.write_record(row.iter().map(Cell::to_string))?;
            }
            w.flush()?;
            Ok(())
        };
        write(&mut w).expect("writing to memory");
        let bytes = w.into_inner().expect("flushed writer");
        String::from_utf8(bytes).expect("cells are UTF-8")
    }

    /// JSON mirror: `{"manifest_sha256": .., "columns": [..], "rows": [{col: val}]}`.
    pub fn to_json(&self, digest: &str) -> String {
        let rows: Vec<serde_json::Map<String, serde_json::Value>> = self
            .rows
            .iter()
            .map(|row| {
                self.columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), serde_json::to_value(v).expect("cells serialize")))
                    .collect()
            })
            .collect();
        let doc = serde_json::json!({
            "manifest_sha256": digest,
            "columns": self.columns,
            "rows": rows,
        });
        serde_json::to_string_pretty(&doc).expect("json value serializes")
    }
}

/// Columns of [`bell_table`].
pub const BELL_COLUMNS: [&str; 11] = [
    "state", "semantics", "alpha", "beta", "n_pp", "n_pm", "n_mp", "n_mm", "fraction", "analytic", "stderr",
];

/// One row per sweep point; `semantics` is a free label so the Boolean
/// model can share the schema.
pub fn bell_table(state: BellState, semantics: &str, rows: &[SweepRow]) -> Table {
    let mut t = Table::new(&BELL_COLUMNS);
    for r in rows {
        let c = &r.counts;
        t.rows.push(vec![
            state.name().into(),
            semantics.into(),
            r.alpha.into(),
            r.beta.into(),
            c.n_pp.into(),
            c.n_pm.into(),
            c.n_mp.into(),
            c.n_mm.into(),
            r.measured.into(),
            r.analytic.into(),
            r.stderr.into(),
        ]);
    }
    t
}

pub const CHSH_COLUMNS: [&str; 7] = ["model", "term", "alpha", "beta", "value", "stderr", "analytic"];

/// Four correlation rows and one `S` row per model.
pub fn chsh_table(models: &[(&str, &ChshEstimate, [f64; 4], f64)]) -> Table {
    let mut t = Table::new(&CHSH_COLUMNS);
    let names = ["E(a,b)", "E(a,b')", "E(a',b)", "E(a',b')"];
    for &(model, est, analytic_e, analytic_s) in models {
        for ((term, name), analytic) in est.terms.iter().zip(names).zip(analytic_e) {
            t.rows.push(vec![
                model.into(),
                name.into(),
                term.alpha.into(),
                term.beta.into(),
                term.e.into(),
                term.stderr.into(),
                analytic.into(),
            ]);
        }
        t.rows.push(vec![
            model.into(),
            "S".into(),
            Cell::Text(String::new()),
            Cell::Text(String::new()),
            est.s.into(),
            est.stderr.into(),
            analytic_s.into(),
        ]);
    }
    t
}

pub const MALUS_COLUMNS: [&str; 8] =
    ["alpha", "beta", "n_intervals", "subset_a", "detected", "fraction", "analytic", "stderr"];

pub fn malus_table(rows: &[(f64, f64, MalusOutcome, f64)]) -> Result<Table> {
    let mut t = Table::new(&MALUS_COLUMNS);
    for &(alpha, beta, o, analytic) in rows {
        t.rows.push(vec![
            alpha.into(),
            beta.into(),
            o.n_intervals.into(),
            o.subset_a.into(),
            o.detected.into(),
            o.fraction()?.into(),
            analytic.into(),
            o.stderr_at(analytic).into(),
        ]);
    }
    Ok(t)
}

pub const GRAM_COLUMNS: [&str; 5] = ["state", "psi-minus", "psi-plus", "phi-plus", "phi-minus"];

pub fn gram_table(g: &GramReport) -> Table {
    let mut t = Table::new(&GRAM_COLUMNS);
    for (state, row) in BellState::ALL.iter().zip(g.matrix) {
        let mut cells = vec![Cell::from(state.name())];
        cells.extend(row.map(Cell::from));
        t.rows.push(cells);
    }
    t
}

pub const HOM_COLUMNS: [&str; 12] = [
    "state", "m", "m_c", "m_d", "routed_c", "routed_d", "n_intervals", "both", "c_only", "d_only", "neither",
    "coincidence_fraction",
];

/// Per-state outputs for one reference interval plus classifier tallies.
pub fn hom_table(rows: &[(BellState, f64, (f64, f64), (f64, f64), HomCounts)]) -> Table {
    let mut t = Table::new(&HOM_COLUMNS);
    for &(state, m, (mc, md), (rc, rd), h) in rows {
        t.rows.push(vec![
            state.name().into(),
            m.into(),
            mc.into(),
            md.into(),
            rc.into(),
            rd.into(),
            h.n_intervals.into(),
            h.both.into(),
            h.c_only.into(),
            h.d_only.into(),
            h.neither.into(),
            h.coincidence_fraction().into(),
        ]);
    }
    t
}

pub const SWAP_COLUMNS: [&str; 10] = ["regime", "draw", "index", "a1", "a2", "a3", "a4", "lhs", "rhs", "diff"];

/// Sixteen coefficient rows per draw, plus sixteen `mean` rows per regime.
pub fn swap_table(reports: &[SwapRegimeReport]) -> Table {
    let mut t = Table::new(&SWAP_COLUMNS);
    let axis = |b: usize| if b == 0 { "x" } else { "y" };
    let push = |t: &mut Table, regime: &str, draw: String, lhs: &FourPartyTensor, rhs: &FourPartyTensor| {
        for i in 0..16 {
            t.rows.push(vec![
                regime.into(),
                draw.clone().into(),
                i.into(),
                axis((i >> 3) & 1).into(),
                axis((i >> 2) & 1).into(),
                axis((i >> 1) & 1).into(),
                axis(i & 1).into(),
                lhs.coeffs[i].into(),
                rhs.coeffs[i].into(),
                (lhs.coeffs[i] - rhs.coeffs[i]).into(),
            ]);
        }
    };
    for r in reports {
        for (k, d) in r.draws.iter().enumerate() {
            push(&mut t, r.regime.name(), k.to_string(), &d.lhs, &d.rhs);
        }
        push(&mut t, r.regime.name(), "mean".into(), &r.mean_lhs, &r.mean_rhs);
    }
    t
}

/// SHA-256 of `subcommand` and the JSON form of `config`, as lowercase hex.
pub fn config_digest<C: Serialize>(subcommand: &str, config: &C) -> Result<String> {
    let body = serde_json::to_vec(config).map_err(|e| Error::Input(format!("config does not serialize: {e}")))?;
    let mut h = Sha256::new();
    h.update(subcommand.as_bytes());
    h.update([0u8]);
    h.update(&body);
    Ok(format!("{:x}", h.finalize()))
}

/// SHA-256 of arbitrary bytes as lowercase hex.
pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}
