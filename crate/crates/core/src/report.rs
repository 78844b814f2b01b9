//! One-stop analysis of a repertoire, and the JSON / TSV renderings shared by
//! every command.
//!
//! JSON numbers that are not integers are written with 17 significant digits
//! so reports round-trip exactly and compare byte for byte across runs.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::correlation::{correlation_report, RhoBounds};
use crate::cost::{moments, CostModel};
use crate::error::Result;
use crate::repertoire::Repertoire;
use crate::significance::{permutation_test, Mode, PermutationTestConfig, PermutationTestResult, Statistic};

pub const TOOL_NAME: &str = "abbrev";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// SHA-256 over the exact bits of every `(id, p, l)` triple.
pub fn repertoire_digest(r: &Repertoire) -> String {
    let mut h = Sha256::new();
    for item in r.iter() {
        h.update(item.id.as_bytes());
        h.update([0]);
        h.update(item.probability.to_bits().to_le_bytes());
        h.update(item.magnitude.to_bits().to_le_bytes());
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    pub mode: Mode,
    pub replicates: u64,
    pub seed: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { mode: Mode::MonteCarlo, replicates: 9999, seed: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub input_digest: String,
    pub cost_model: CostModel,
    pub types: usize,
    pub mean_cost: f64,
    pub type_mean_cost: f64,
    pub sd_probability: f64,
    pub sd_cost: f64,
    pub r: Option<f64>,
    pub rho: Option<f64>,
    pub tau: f64,
    pub concordant: u64,
    pub discordant: u64,
    pub total_pairs: u64,
    pub sign_criterion: bool,
    pub rho_bounds: RhoBounds,
    pub rho_within_bounds: Option<bool>,
    pub mean_cost_test: PermutationTestResult,
    pub tau_test: PermutationTestResult,
    pub seed: u64,
}

/// Cost, correlations, bound check and permutation p-values for `Λ` and `τ`.
pub fn law_report(r: &Repertoire, g: &CostModel, options: &ReportOptions) -> Result<AnalysisReport> {
    let m = moments(r, g);
    let corr = correlation_report(r, g)?;
    let config = |statistic| PermutationTestConfig {
        statistic,
        mode: options.mode,
        replicates: options.replicates,
        seed: options.seed,
        exhaustive_cap: crate::significance::DEFAULT_EXHAUSTIVE_CAP,
    };
    Ok(AnalysisReport {
        tool: TOOL_NAME,
        version: TOOL_VERSION,
        input_digest: repertoire_digest(r),
        cost_model: *g,
        types: r.len(),
        mean_cost: m.mean_cost,
        type_mean_cost: m.type_mean_cost,
        sd_probability: m.sd_probability,
        sd_cost: m.sd_cost,
        r: corr.r,
        rho: corr.rho,
        tau: corr.tau,
        concordant: corr.counts.concordant,
        discordant: corr.counts.discordant,
        total_pairs: corr.counts.total_pairs,
        sign_criterion: corr.sign_criterion,
        rho_bounds: corr.bounds,
        rho_within_bounds: corr.rho_within_bounds,
        mean_cost_test: permutation_test(r, g, &config(Statistic::MeanCost))?,
        tau_test: permutation_test(r, g, &config(Statistic::Tau))?,
        seed: options.seed,
    })
}

/// `(rank, id, probability, magnitude)` rows, most probable first.
pub fn rank_rows(r: &Repertoire) -> Vec<(usize, String, f64, f64)> {
    r.rank_order()
        .into_iter()
        .enumerate()
        .map(|(k, idx)| {
            let it = r.item(idx).unwrap();
            (k + 1, it.id.to_string(), it.probability, it.magnitude)
        })
        .collect()
}

pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty JSON with 17 significant digits for floating-point numbers.
struct Sig17<'a>(PrettyFormatter<'a>);

impl Formatter for Sig17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("serialising to memory cannot fail");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&key(k), v, out);
            }
        }
        Value::Array(items) => {
            for (k, v) in items.iter().enumerate() {
                flatten(&key(&k.to_string()), v, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), "null".into())),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Number(n) => {
            let text = if n.is_f64() { format_f64(n.as_f64().unwrap()) } else { n.to_string() };
            out.push((prefix.to_string(), text));
        }
    }
}

/// `key<TAB>value` rows; nested keys are joined with `.`.
pub fn to_tsv<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("serialisable value");
    let mut rows = Vec::new();
    flatten("", &value, &mut rows);
    rows.into_iter().map(|(k, v)| format!("{k}\t{v}\n")).collect()
}
