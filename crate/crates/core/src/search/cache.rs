//! Append-only result cache.
//!
//! One JSON record per line. A torn or otherwise unreadable line is skipped
//! with a warning and the problem is simply recomputed; appends start on a
//! fresh line so a torn tail never corrupts the next record.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ExtremalResult, ForbiddenFamily, LetterAssignment, Mode, Status, ENGINE_VERSION};
use crate::error::{Error, Result};
use crate::matrix::{BitMatrix, Shape};

/// Identity of a search problem: canonical text plus its SHA-256 digest.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProblemKey {
    canonical: String,
    digest: String,
}

impl ProblemKey {
    pub fn new(shape: &Shape, family: &ForbiddenFamily, mode: Mode) -> Self {
        Self::with_version(shape, family, mode, ENGINE_VERSION)
    }

    pub fn with_version(shape: &Shape, family: &ForbiddenFamily, mode: Mode, version: &str) -> Self {
        let mode_name = match mode {
            Mode::Ex => "ex",
            Mode::Lx { .. } => "lx",
        };
        let canonical = format!(
            "engine={version};mode={mode_name};k={};shape={shape};{}",
            mode.k(),
            family.canonical_string()
        );
        let digest = hex::encode(Sha256::digest(canonical.as_bytes()));
        ProblemKey { canonical, digest }
    }

    pub fn canonical(&self) -> &str {
        &self.canonical
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }
}

/// One cached search result, self-contained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub key: String,
    pub canonical: String,
    pub engine_version: String,
    pub mode: Mode,
    pub shape: Shape,
    pub value: u64,
    pub status: Status,
    /// Run lengths of the flattened witness, alternating zeros and ones and
    /// starting with zeros.
    pub witness: String,
    pub nodes: u64,
    pub elapsed: f64,
}

impl CacheRecord {
    pub fn new(key: &ProblemKey, result: &ExtremalResult) -> Self {
        CacheRecord {
            key: key.digest.clone(),
            canonical: key.canonical.clone(),
            engine_version: ENGINE_VERSION.to_string(),
            mode: result.mode,
            shape: result.witness.shape().clone(),
            value: result.value,
            status: result.status,
            witness: encode_runs(&result.witness),
            nodes: result.nodes_explored,
            elapsed: result.elapsed_seconds,
        }
    }

    pub fn to_result(&self) -> Result<ExtremalResult> {
        let witness = decode_runs(&self.shape, &self.witness)?;
        let letters = match self.mode {
            Mode::Ex => None,
            Mode::Lx { k } => Some(LetterAssignment::from_witness(&witness, k)),
        };
        Ok(ExtremalResult {
            mode: self.mode,
            value: self.value,
            status: self.status,
            witness,
            letters,
            nodes_explored: self.nodes,
            elapsed_seconds: self.elapsed,
        })
    }
}

/// Run-length encoding of a matrix in row-major order.
pub fn encode_runs(m: &BitMatrix) -> String {
    let mut runs = Vec::new();
    let mut current = false;
    let mut len = 0usize;
    for i in 0..m.shape().volume() {
        let bit = m.get_flat(i);
        if bit != current {
            runs.push(len.to_string());
            current = bit;
            len = 0;
        }
        len += 1;
    }
    runs.push(len.to_string());
    runs.join(",")
}

pub fn decode_runs(shape: &Shape, runs: &str) -> Result<BitMatrix> {
    let bad = |msg: &str| Error::Parse { line: 0, msg: format!("witness runs: {msg}") };
    let mut m = BitMatrix::zeros(shape.clone());
    let mut pos = 0usize;
    for (i, part) in runs.split(',').enumerate() {
        let len: usize = part.trim().parse().map_err(|_| bad("not a number"))?;
        if pos + len > shape.volume() {
            return Err(bad("longer than the shape"));
        }
        if i % 2 == 1 {
            for flat in pos..pos + len {
                m.set_flat(flat, true);
            }
        }
        pos += len;
    }
    if pos != shape.volume() {
        return Err(bad("shorter than the shape"));
    }
    Ok(m)
}

/// File-backed cache. Readers see the state at [`ResultCache::open`] plus
/// their own writes.
#[derive(Debug)]
pub struct ResultCache {
    path: PathBuf,
    records: BTreeMap<String, CacheRecord>,
    skipped: usize,
}

impl ResultCache {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut records = BTreeMap::new();
        let mut skipped = 0;
        if path.exists() {
            let reader = BufReader::new(File::open(&path)?);
            for (lineno, line) in reader.lines().enumerate() {
                let line = match line {
                    Ok(l) => l,
                    Err(e) => {
                        log::warn!("{}:{}: unreadable cache line ({e}), skipping", path.display(), lineno + 1);
                        skipped += 1;
                        continue;
                    }
                };
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<CacheRecord>(&line) {
                    Ok(rec) => {
                        records.insert(rec.key.clone(), rec);
                    }
                    Err(e) => {
                        log::warn!("{}:{}: corrupt cache record ({e}), skipping", path.display(), lineno + 1);
                        skipped += 1;
                    }
                }
            }
        }
        Ok(ResultCache { path, records, skipped })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Lines skipped while loading.
    pub fn skipped(&self) -> usize {
        self.skipped
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> impl Iterator<Item = &CacheRecord> {
        self.records.values()
    }

    pub fn get(&self, key: &ProblemKey) -> Option<ExtremalResult> {
        let rec = self.records.get(&key.digest)?;
        if rec.canonical != key.canonical || rec.engine_version != ENGINE_VERSION {
            return None;
        }
        match rec.to_result() {
            Ok(r) => Some(r),
            Err(e) => {
                log::warn!("cache record {} unusable ({e}), recomputing", rec.key);
                None
            }
        }
    }

    pub fn put(&mut self, key: &ProblemKey, result: &ExtremalResult) -> Result<()> {
        let rec = CacheRecord::new(key, result);
        let line = serde_json::to_string(&rec).map_err(|e| Error::Io(e.to_string()))?;
        if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let mut file = OpenOptions::new().create(true).append(true).read(true).open(&self.path)?;
        let len = file.metadata()?.len();
        if len > 0 {
            let mut last = [0u8; 1];
            file.seek(SeekFrom::Start(len - 1))?;
            file.read_exact(&mut last)?;
            if last[0] != b'\n' {
                file.write_all(b"\n")?;
            }
        }
        file.write_all(line.as_bytes())?;
        file.write_all(b"\n")?;
        file.sync_data()?;
        self.records.insert(rec.key.clone(), rec);
        Ok(())
    }

    /// Rewrites the file with one record per key, dropping corrupt lines and
    /// records from other engine versions. Returns the number of records kept.
    pub fn gc(&mut self) -> Result<usize> {
        self.records.retain(|_, r| r.engine_version == ENGINE_VERSION);
        let tmp = self.path.with_extension("gc-tmp");
        {
            let mut out = File::create(&tmp)?;
            for rec in self.records.values() {
                let line = serde_json::to_string(rec).map_err(|e| Error::Io(e.to_string()))?;
                out.write_all(line.as_bytes())?;
                out.write_all(b"\n")?;
            }
            out.sync_all()?;
        }
        fs::rename(&tmp, &self.path)?;
        self.skipped = 0;
        Ok(self.records.len())
    }
}
