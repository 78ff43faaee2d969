//! Content-addressed survey store: `records/<sha256>.json`, one immutable
//! record per file, plus `index.json`, which can always be rebuilt from the
//! records.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Result of one Minkowski polynomial (or a failed input) in a survey.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyRecord {
    pub input: String,
    pub mp_index: Option<usize>,
    /// Facet choices producing this polynomial, see `minkowski`.
    pub choices: Vec<Vec<usize>>,
    pub polynomial: Option<String>,
    pub period_head: Vec<String>,
    /// Hash of the canonical period head, empty for failed inputs.
    pub head_hash: String,
    pub operator: Option<String>,
    pub report: Option<serde_json::Value>,
    pub defect: Option<i64>,
    pub verdict: Option<String>,
    pub error: Option<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Hash of a period head: coefficients in canonical form, one per line.
pub fn head_hash(head: &[String]) -> String {
    let mut text = String::new();
    for c in head {
        text.push_str(c);
        text.push('\n');
    }
    sha256_hex(text.as_bytes())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub file: String,
    pub input: String,
    pub mp_index: Option<usize>,
    pub head_hash: String,
}

pub struct Store {
    root: PathBuf,
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Writes through a uniquely named temporary file and renames, so readers
/// never see a partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().expect("store paths have a parent");
    let tmp = dir.join(format!(
        ".tmp-{}-{}",
        std::process::id(),
        TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    let mut f = fs::File::create(&tmp)?;
    f.write_all(bytes)?;
    f.sync_all()?;
    fs::rename(&tmp, path)
}

impl Store {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, CliError> {
        let root = root.into();
        fs::create_dir_all(root.join("records")).map_err(|e| CliError::io(&root, e))?;
        Ok(Self { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn record_path(&self, hash: &str) -> PathBuf {
        self.root.join("records").join(format!("{hash}.json"))
    }

    /// Stores `record` under the hash of its serialization. Returns the hash
    /// and whether the record is new.
    pub fn put(&self, record: &SurveyRecord) -> Result<(String, bool), CliError> {
        let bytes = serde_json::to_vec_pretty(record).expect("records serialize");
        let hash = sha256_hex(&bytes);
        let path = self.record_path(&hash);
        if path.exists() {
            return Ok((hash, false));
        }
        write_atomic(&path, &bytes).map_err(|e| CliError::io(&path, e))?;
        Ok((hash, true))
    }

    /// All records, sorted by hash.
    pub fn records(&self) -> Result<Vec<(String, SurveyRecord)>, CliError> {
        let dir = self.root.join("records");
        let mut names: Vec<String> = fs::read_dir(&dir)
            .map_err(|e| CliError::io(&dir, e))?
            .filter_map(|e| e.ok())
            .map(|e| e.file_name().to_string_lossy().into_owned())
            .filter(|n| n.ends_with(".json") && !n.starts_with('.'))
            .collect();
        names.sort();
        names
            .into_iter()
            .map(|n| {
                let hash = n.trim_end_matches(".json").to_string();
                let path = self.record_path(&hash);
                let bytes = fs::read(&path).map_err(|e| CliError::io(&path, e))?;
                let rec = serde_json::from_slice(&bytes)
                    .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
                Ok((hash, rec))
            })
            .collect()
    }

    /// Hashes of records whose content no longer matches their name.
    pub fn verify(&self) -> Result<Vec<String>, CliError> {
        let mut bad = Vec::new();
        for (hash, _) in self.records()? {
            let path = self.record_path(&hash);
            let bytes = fs::read(&path).map_err(|e| CliError::io(&path, e))?;
            if sha256_hex(&bytes) != hash {
                bad.push(hash);
            }
        }
        Ok(bad)
    }

    pub fn rebuild_index(&self) -> Result<Vec<IndexEntry>, CliError> {
        let index: Vec<IndexEntry> = self
            .records()?
            .into_iter()
            .map(|(hash, r)| IndexEntry {
                file: format!("records/{hash}.json"),
                input: r.input,
                mp_index: r.mp_index,
                head_hash: r.head_hash,
            })
            .collect();
        let path = self.root.join("index.json");
        let bytes = serde_json::to_vec_pretty(&index).expect("index serializes");
        write_atomic(&path, &bytes).map_err(|e| CliError::io(&path, e))?;
        Ok(index)
    }
}
