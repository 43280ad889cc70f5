//! On-disk expansion cache: one JSON-lines file per weight,
//! `weight-<k>.jsonl`, rewritten atomically.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::expander::{Expander, Expansion, Kind};
use crate::index::Index;
use crate::qseries::QSeries;

/// Bumped whenever the expansion algorithm could change stored values.
pub const ENGINE_VERSION: &str = concat!("qzeta-core/", env!("CARGO_PKG_VERSION"), "/dp1");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub index: Index,
    pub kind: Kind,
    pub trunc: usize,
    /// Coefficients of `q^0..=q^trunc` as `"n"` or `"n/d"`.
    pub coeffs: Vec<String>,
    pub engine_version: String,
}

impl CacheEntry {
    pub fn from_expansion(e: &Expansion) -> Self {
        CacheEntry {
            index: e.index.clone(),
            kind: e.kind,
            trunc: e.trunc(),
            coeffs: e.series.coeffs().iter().map(ToString::to_string).collect(),
            engine_version: ENGINE_VERSION.to_string(),
        }
    }

    /// The stored series, or a reason the entry is unusable.
    pub fn to_expansion(&self) -> Result<Expansion, String> {
        if self.coeffs.len() != self.trunc + 1 {
            return Err(format!("{} coefficients for truncation {}", self.coeffs.len(), self.trunc));
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| BigRational::from_str(c).map_err(|_| format!("bad coefficient `{c}`")))
            .collect::<Result<Vec<_>, _>>()?;
        let series = QSeries::new(coeffs);
        if self.kind == Kind::Modified && !series.is_integral() {
            return Err("modified expansion with non-integral coefficients".into());
        }
        Ok(Expansion { index: self.index.clone(), kind: self.kind, series })
    }
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct LoadStats {
    pub loaded: usize,
    pub stale: usize,
    pub corrupt: usize,
}

pub struct DiskCache {
    dir: PathBuf,
}

impl DiskCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        DiskCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn file(&self, weight: usize) -> PathBuf {
        self.dir.join(format!("weight-{weight}.jsonl"))
    }

    fn weight_files(&self) -> io::Result<Vec<PathBuf>> {
        if !self.dir.exists() {
            return Ok(Vec::new());
        }
        let mut files: Vec<PathBuf> = fs::read_dir(&self.dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with("weight-") && n.ends_with(".jsonl"))
            })
            .collect();
        files.sort();
        Ok(files)
    }

    /// Reads one file. Entries from another engine version count as stale
    /// and are dropped, so they get recomputed; unreadable lines are
    /// skipped with a warning on stderr.
    fn read_file(path: &Path, stats: &mut LoadStats) -> io::Result<Vec<Expansion>> {
        let text = fs::read_to_string(path)?;
        let mut out = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parsed = serde_json::from_str::<CacheEntry>(line)
                .map_err(|e| e.to_string())
                .and_then(|entry| {
                    if entry.engine_version != ENGINE_VERSION {
                        return Ok(None);
                    }
                    entry.to_expansion().map(Some)
                });
            match parsed {
                Ok(Some(e)) => out.push(e),
                Ok(None) => stats.stale += 1,
                Err(msg) => {
                    stats.corrupt += 1;
                    eprintln!("warning: skipping cache line {}:{}: {msg}", path.display(), lineno + 1);
                }
            }
        }
        Ok(out)
    }

    /// Loads every usable entry into `exp`.
    pub fn load_into(&self, exp: &Expander) -> io::Result<LoadStats> {
        let mut stats = LoadStats::default();
        for path in self.weight_files()? {
            for e in Self::read_file(&path, &mut stats)? {
                stats.loaded += 1;
                exp.insert(e.index, e.kind, e.series);
            }
        }
        Ok(stats)
    }

    /// Merges the expander's contents with what is on disk, keeping the
    /// longest series per `(index, kind)`, and rewrites each affected file.
    pub fn store_from(&self, exp: &Expander) -> io::Result<()> {
        let mut by_weight: BTreeMap<usize, Vec<Expansion>> = BTreeMap::new();
        for e in exp.entries() {
            by_weight.entry(e.index.weight()).or_default().push(e);
        }
        if by_weight.is_empty() {
            return Ok(());
        }
        fs::create_dir_all(&self.dir)?;
        for (w, fresh) in by_weight {
            let path = self.file(w);
            let mut merged: BTreeMap<(Index, Kind), Expansion> = BTreeMap::new();
            if path.exists() {
                for e in Self::read_file(&path, &mut LoadStats::default())? {
                    merged.insert((e.index.clone(), e.kind), e);
                }
            }
            for e in fresh {
                let key = (e.index.clone(), e.kind);
                if merged.get(&key).is_none_or(|old| old.trunc() < e.trunc()) {
                    merged.insert(key, e);
                }
            }
            let mut body = String::new();
            for e in merged.values() {
                body.push_str(&serde_json::to_string(&CacheEntry::from_expansion(e)).map_err(io::Error::other)?);
                body.push('\n');
            }
            write_atomic(&path, body.as_bytes())?;
        }
        Ok(())
    }
}

/// Writes to a sibling temp file, then renames over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}
