//! Pipeline commands behind the `lpmirror` binary. Each command returns its
//! output as a string so that it can be tested without spawning a process.

pub mod store;
pub mod survey;

use std::fs;
use std::path::{Path, PathBuf};

use lpmirror_core::format::{
    parse_operator_file, parse_period, parse_polynomial, parse_polytope, parse_quantum_matrix, parse_toric,
    write_operator, write_period, write_polynomial, ParseError,
};
use lpmirror_core::fuchs::ramification_report;
use lpmirror_core::laurent::{period_sequence, LaurentPolynomial, PeriodSequence};
use lpmirror_core::minkowski::minkowski_polynomials;
use lpmirror_core::pf::{fit_operator, DifferentialOperator, FitConfig, PfError};
use lpmirror_core::quantum::{
    ci_quantum_period, matrix_quantum_period, mirror_match_with_operators, regularize,
};
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed input file.
    #[error("{0}")]
    Parse(String),
    /// Bad flags or unreadable inputs.
    #[error("{0}")]
    Config(String),
    /// The computation itself failed.
    #[error("{0}")]
    Compute(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse(_) | Self::Config(_) => 2,
            Self::Compute(_) | Self::Io { .. } => 1,
        }
    }

    fn compute(e: impl std::fmt::Display) -> Self {
        Self::Compute(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Structured,
}

#[derive(Debug, Clone)]
pub struct Settings {
    /// Number of period coefficients `c_0, …, c_{terms-1}` to compute.
    pub terms: usize,
    pub fit: FitConfig,
    pub dedup_depth: usize,
    pub format: OutputFormat,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            terms: 60,
            fit: FitConfig::default(),
            dedup_depth: 20,
            format: OutputFormat::Text,
        }
    }
}

impl Settings {
    fn render(&self, text: String, value: serde_json::Value) -> String {
        match self.format {
            OutputFormat::Text => text,
            OutputFormat::Structured => {
                let mut s = serde_json::to_string_pretty(&value).expect("json values serialize");
                s.push('\n');
                s
            }
        }
    }

    fn period(&self, f: &LaurentPolynomial) -> Result<PeriodSequence, CliError> {
        if self.terms == 0 {
            return Err(CliError::Config("--terms must be positive".into()));
        }
        period_sequence(f, self.terms - 1).map_err(CliError::compute)
    }

    fn fit(&self, c: &PeriodSequence) -> Result<DifferentialOperator, CliError> {
        fit_operator(c, &self.fit).map_err(|e| match e {
            PfError::TooFewTerms { .. } => CliError::Config(e.to_string()),
            e => CliError::compute(e),
        })
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn parsed<T>(path: &Path, r: Result<T, ParseError>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

/// First keyword of the first non-comment line.
fn sniff(text: &str) -> Option<&str> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .and_then(|l| l.split_whitespace().next())
}

pub fn load_polynomial(path: &Path) -> Result<LaurentPolynomial, CliError> {
    parsed(path, parse_polynomial(&read(path)?))
}

/// A period file, or a polynomial file whose period is computed.
pub fn load_period(path: &Path, s: &Settings) -> Result<PeriodSequence, CliError> {
    let text = read(path)?;
    match sniff(&text) {
        Some("dim") => s.period(&parsed(path, parse_polynomial(&text))?),
        _ => parsed(path, parse_period(&text)),
    }
}

/// An operator file, or a period/polynomial file to fit.
pub fn load_operator(path: &Path, s: &Settings) -> Result<DifferentialOperator, CliError> {
    let text = read(path)?;
    match sniff(&text) {
        Some("order") => parsed(path, parse_operator_file(&text)),
        _ => s.fit(&load_period(path, s)?),
    }
}

pub fn cmd_period(path: &Path, s: &Settings) -> Result<String, CliError> {
    let c = s.period(&load_polynomial(path)?)?;
    Ok(s.render(write_period(&c), json!({ "period": c })))
}

pub fn cmd_fit(path: &Path, s: &Settings) -> Result<String, CliError> {
    let l = load_operator(path, s)?;
    Ok(s.render(write_operator(&l), json!({ "operator": l, "pretty": l.pretty() })))
}

pub fn cmd_ramify(path: &Path, s: &Settings) -> Result<String, CliError> {
    let l = load_operator(path, s)?;
    let r = ramification_report(&l).map_err(CliError::compute)?;
    Ok(s.render(
        format!("{}\n{r}\n", l.pretty()),
        json!({ "operator": l.pretty(), "report": r }),
    ))
}

pub fn cmd_type(path: &Path, s: &Settings) -> Result<String, CliError> {
    let l = load_operator(path, s)?;
    let z = l.operator_at_zero();
    let roots: Vec<String> = z
        .roots
        .iter()
        .map(|(r, m)| if *m == 1 { r.to_string() } else { format!("{r} (×{m})") })
        .collect();
    Ok(s.render(
        format!(
            "P_0 = {}\nroots: {{{}}}\ntype: {}\n",
            z.p0.display_in("D"),
            roots.join(", "),
            z.verdict
        ),
        json!({
            "p0": z.p0.display_in("D"),
            "roots": z.roots.iter().map(|(r, m)| (r.to_string(), *m)).collect::<Vec<_>>(),
            "type": z.verdict,
        }),
    ))
}

/// Minkowski polynomials of a polytope; with `out_dir`, also writes
/// `mp-<i>.poly` files and `provenance.json` there.
pub fn cmd_mink(path: &Path, out_dir: Option<&Path>, s: &Settings) -> Result<String, CliError> {
    let p = parsed(path, parse_polytope(&read(path)?))?;
    let r = minkowski_polynomials(&p).map_err(CliError::compute)?;
    let mut text = String::new();
    if r.is_empty() {
        text.push_str("# no Minkowski polynomials\n");
    }
    for d in r.blocking_facets() {
        text.push_str(&format!("# facet {:?} has no admissible decomposition\n", d.vertices));
    }
    for (i, m) in r.polynomials.iter().enumerate() {
        text.push_str(&format!("# mp {i}: {}\n# choices {:?}\n", m.polynomial, m.choices));
        text.push_str(&write_polynomial(&m.polynomial));
    }
    let provenance = json!({
        "input": p.id().map_or_else(|| path.display().to_string(), str::to_string),
        "facets": r.facets,
        "polynomials": r.polynomials.iter().enumerate().map(|(i, m)| json!({
            "index": i,
            "polynomial": m.polynomial.to_string(),
            "choices": m.choices,
        })).collect::<Vec<_>>(),
    });
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        for (i, m) in r.polynomials.iter().enumerate() {
            let f = dir.join(format!("mp-{i}.poly"));
            fs::write(&f, write_polynomial(&m.polynomial)).map_err(|e| CliError::io(&f, e))?;
        }
        let f = dir.join("provenance.json");
        let bytes = serde_json::to_string_pretty(&provenance).expect("json values serialize");
        fs::write(&f, bytes + "\n").map_err(|e| CliError::io(&f, e))?;
    }
    Ok(s.render(text, provenance))
}

pub fn cmd_reflexive_check(path: &Path, s: &Settings) -> Result<String, CliError> {
    let p = parsed(path, parse_polytope(&read(path)?))?;
    let reflexive = p.is_reflexive();
    let polar: Option<Vec<Vec<String>>> = p
        .polar()
        .ok()
        .map(|q| q.vertices.iter().map(|v| v.iter().map(|x| x.to_string()).collect()).collect());
    let volume = p.is_full_dimensional().then(|| p.normalized_volume());
    let mut text = format!("reflexive: {reflexive}\n");
    if let Some(v) = volume {
        text.push_str(&format!("normalized volume: {v}\n"));
    }
    if let Some(q) = &polar {
        let rows: Vec<String> = q.iter().map(|v| format!("({})", v.join(", "))).collect();
        text.push_str(&format!("polar vertices: {}\n", rows.join(" ")));
    }
    Ok(s.render(
        text,
        json!({ "reflexive": reflexive, "normalized_volume": volume, "polar": polar }),
    ))
}

/// Where a quantum period comes from.
#[derive(Debug, Clone)]
pub enum QuantumSource {
    /// Toric data with optional bundles (quantum Lefschetz).
    Toric(PathBuf),
    Matrix(PathBuf),
    /// A precomputed (unregularized) quantum period.
    Period(PathBuf),
}

pub fn quantum_period(src: &QuantumSource, s: &Settings) -> Result<PeriodSequence, CliError> {
    let m_max = s.terms.checked_sub(1).ok_or_else(|| CliError::Config("--terms must be positive".into()))?;
    match src {
        QuantumSource::Toric(p) => {
            let (t, b) = parsed(p, parse_toric(&read(p)?))?;
            Ok(ci_quantum_period(&t, &b, m_max))
        }
        QuantumSource::Matrix(p) => {
            let m = parsed(p, parse_quantum_matrix(&read(p)?))?;
            matrix_quantum_period(&m, m_max).map_err(CliError::compute)
        }
        QuantumSource::Period(p) => parsed(p, parse_period(&read(p)?)),
    }
}

pub fn cmd_quantum(src: &QuantumSource, regularized: bool, s: &Settings) -> Result<String, CliError> {
    let mut g = quantum_period(src, s)?;
    if regularized {
        g = regularize(&g);
    }
    Ok(s.render(write_period(&g), json!({ "period": g, "regularized": regularized })))
}

pub fn cmd_regularize(path: &Path, s: &Settings) -> Result<String, CliError> {
    let g = parsed(path, parse_period(&read(path)?))?;
    let r = regularize(&g);
    Ok(s.render(write_period(&r), json!({ "period": r })))
}

/// `classical` is a polynomial or period file.
pub fn cmd_match(classical: &Path, quantum: &QuantumSource, s: &Settings) -> Result<String, CliError> {
    let c = load_period(classical, s)?;
    let g = quantum_period(quantum, s)?;
    let report = mirror_match_with_operators(&c, &g, s.dedup_depth, &s.fit).map_err(CliError::compute)?;
    let mut text = format!("{}\n", report.verdict);
    if let Some(agree) = report.operators_agree {
        text.push_str(&format!("operators agree: {agree}\n"));
    }
    Ok(s.render(text, json!(report)))
}

pub fn cmd_survey(dir: &Path, store: Option<&Path>, s: &Settings) -> Result<String, CliError> {
    let store_dir = store.ok_or_else(|| CliError::Config("survey requires --store DIR".into()))?;
    let store = store::Store::open(store_dir)?;
    let summary = survey::run_survey(dir, &store, s)?;
    Ok(s.render(summary.to_string(), json!(summary)))
}
