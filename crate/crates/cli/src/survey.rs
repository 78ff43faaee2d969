//! Batch survey: Minkowski polynomials of every polytope in a directory,
//! their periods, operators and ramification, deduplicated by period head.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use lpmirror_core::arith::format_rational;
use lpmirror_core::format::parse_polytope;
use lpmirror_core::fuchs::ramification_report;
use lpmirror_core::minkowski::{minkowski_polynomials, MinkowskiPolynomial};
use rayon::prelude::*;
use serde::Serialize;

use crate::store::{head_hash, Store, SurveyRecord};
use crate::{CliError, Settings};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurveySummary {
    pub inputs: usize,
    /// `(input, error)` for inputs that produced no polynomials.
    pub failed_inputs: Vec<(String, String)>,
    pub records: usize,
    pub new_records: usize,
    pub dedup_depth: usize,
    pub distinct_heads: usize,
    /// Defect → number of distinct fitted operators with that defect.
    pub operator_defects: BTreeMap<i64, usize>,
    /// Defect → number of records with that defect.
    pub record_defects: BTreeMap<i64, usize>,
    /// Type of `L(0)` → number of records.
    pub types: BTreeMap<String, usize>,
    /// Records whose fit or analysis failed.
    pub record_errors: usize,
}

impl fmt::Display for SurveySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let counts = |m: &BTreeMap<i64, usize>| {
            m.iter().map(|(d, n)| format!("{d}: {n}")).collect::<Vec<_>>().join(", ")
        };
        writeln!(f, "inputs: {} ({} failed)", self.inputs, self.failed_inputs.len())?;
        for (input, e) in &self.failed_inputs {
            writeln!(f, "  {input}: {e}")?;
        }
        writeln!(f, "records: {} ({} new, {} with errors)", self.records, self.new_records, self.record_errors)?;
        writeln!(f, "distinct period heads (depth {}): {}", self.dedup_depth, self.distinct_heads)?;
        writeln!(f, "defects of distinct operators: {{{}}}", counts(&self.operator_defects))?;
        writeln!(f, "defects of records: {{{}}}", counts(&self.record_defects))?;
        let types: Vec<String> = self.types.iter().map(|(t, n)| format!("{t}: {n}")).collect();
        writeln!(f, "types: {{{}}}", types.join(", "))
    }
}

/// Regular, non-hidden files of `dir`, sorted by name.
fn input_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::Config(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_file() && !p.file_name().is_some_and(|n| n.to_string_lossy().starts_with('.')))
        .collect();
    files.sort();
    Ok(files)
}

fn failure(input: &str, error: String) -> SurveyRecord {
    SurveyRecord {
        input: input.to_string(),
        mp_index: None,
        choices: Vec::new(),
        polynomial: None,
        period_head: Vec::new(),
        head_hash: String::new(),
        operator: None,
        report: None,
        defect: None,
        verdict: None,
        error: Some(error),
    }
}

fn analyze(input: &str, index: usize, mp: &MinkowskiPolynomial, s: &Settings) -> SurveyRecord {
    let mut rec = failure(input, String::new());
    rec.error = None;
    rec.mp_index = Some(index);
    rec.choices = mp.choices.clone();
    rec.polynomial = Some(mp.polynomial.to_string());
    let c = match s.period(&mp.polynomial) {
        Ok(c) => c,
        Err(e) => {
            rec.error = Some(e.to_string());
            return rec;
        }
    };
    rec.period_head = c.head(s.dedup_depth).coeffs().iter().map(format_rational).collect();
    rec.head_hash = head_hash(&rec.period_head);
    let l = match s.fit(&c) {
        Ok(l) => l,
        Err(e) => {
            rec.error = Some(e.to_string());
            return rec;
        }
    };
    rec.operator = Some(l.pretty());
    rec.verdict = Some(l.operator_at_zero().verdict.to_string());
    match ramification_report(&l) {
        Ok(r) => {
            rec.defect = Some(r.defect);
            rec.report = Some(serde_json::to_value(&r).expect("reports serialize"));
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

fn records_for(path: &Path, s: &Settings) -> Vec<SurveyRecord> {
    let fallback = path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return vec![failure(&fallback, e.to_string())],
    };
    let p = match parse_polytope(&text) {
        Ok(p) => p,
        Err(e) => return vec![failure(&fallback, e.to_string())],
    };
    let input = p.id().map_or(fallback, str::to_string);
    let result = match minkowski_polynomials(&p) {
        Ok(r) => r,
        Err(e) => return vec![failure(&input, e.to_string())],
    };
    if result.is_empty() {
        let blocking: Vec<String> = result.blocking_facets().iter().map(|d| format!("{:?}", d.vertices)).collect();
        return vec![failure(
            &input,
            format!("no Minkowski polynomials; facets without admissible decomposition: {}", blocking.join(", ")),
        )];
    }
    result
        .polynomials
        .par_iter()
        .enumerate()
        .map(|(i, mp)| analyze(&input, i, mp, s))
        .collect()
}

pub fn run_survey(dir: &Path, store: &Store, s: &Settings) -> Result<SurveySummary, CliError> {
    let files = input_files(dir)?;
    let per_input: Vec<Vec<SurveyRecord>> = files.par_iter().map(|p| records_for(p, s)).collect();

    let mut summary = SurveySummary {
        inputs: files.len(),
        failed_inputs: Vec::new(),
        records: 0,
        new_records: 0,
        dedup_depth: s.dedup_depth,
        distinct_heads: 0,
        operator_defects: BTreeMap::new(),
        record_defects: BTreeMap::new(),
        types: BTreeMap::new(),
        record_errors: 0,
    };
    let mut heads = BTreeSet::new();
    let mut operators = BTreeMap::new();
    for rec in per_input.iter().flatten() {
        let (_, new) = store.put(rec)?;
        summary.records += 1;
        summary.new_records += usize::from(new);
        if rec.mp_index.is_none() {
            summary.failed_inputs.push((rec.input.clone(), rec.error.clone().unwrap_or_default()));
            continue;
        }
        if rec.error.is_some() {
            summary.record_errors += 1;
        }
        if !rec.head_hash.is_empty() {
            heads.insert(rec.head_hash.clone());
        }
        if let Some(d) = rec.defect {
            *summary.record_defects.entry(d).or_default() += 1;
            if let Some(op) = &rec.operator {
                operators.insert(op.clone(), d);
            }
        }
        if let Some(v) = &rec.verdict {
            *summary.types.entry(v.clone()).or_default() += 1;
        }
    }
    summary.distinct_heads = heads.len();
    for d in operators.values() {
        *summary.operator_defects.entry(*d).or_default() += 1;
    }
    store.rebuild_index()?;
    Ok(summary)
}
