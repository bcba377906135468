//! Plain-text scan manifest: `key=value` parameter lines, one line per shard,
//! and an overall completion flag.
//!
//! ```text
//! kind=grid
//! dmax=5000
//! pmax=100
//! mode=full
//! partition=D
//! block=1000
//! shards=5
//! shard=0 lo=0 hi=1000 rows=7272 sha256=... complete=true file=shard-00000.csv
//! complete=true
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{incomplete, CliResult};

pub const MANIFEST_FILE: &str = "manifest.txt";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShardEntry {
    pub id: usize,
    pub lo: u64,
    pub hi: u64,
    pub rows: u64,
    pub digest: Option<String>,
    pub complete: bool,
    pub file: String,
}

impl ShardEntry {
    pub fn pending(id: usize, lo: u64, hi: u64) -> Self {
        Self { id, lo, hi, rows: 0, digest: None, complete: false, file: format!("shard-{id:05}.csv") }
    }

    fn to_line(&self) -> String {
        format!(
            "shard={} lo={} hi={} rows={} sha256={} complete={} file={}",
            self.id,
            self.lo,
            self.hi,
            self.rows,
            self.digest.as_deref().unwrap_or("-"),
            self.complete,
            self.file
        )
    }

    fn parse(line: &str) -> Option<Self> {
        let mut e = ShardEntry::pending(0, 0, 0);
        for tok in line.split_whitespace() {
            let (k, v) = tok.split_once('=')?;
            match k {
                "shard" => e.id = v.parse().ok()?,
                "lo" => e.lo = v.parse().ok()?,
                "hi" => e.hi = v.parse().ok()?,
                "rows" => e.rows = v.parse().ok()?,
                "sha256" => e.digest = (v != "-").then(|| v.to_string()),
                "complete" => e.complete = v.parse().ok()?,
                "file" => e.file = v.to_string(),
                _ => return None,
            }
        }
        Some(e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    /// Parameter echo, in writing order.
    pub params: Vec<(String, String)>,
    pub shards: Vec<ShardEntry>,
}

impl Manifest {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn is_complete(&self) -> bool {
        self.shards.iter().all(|s| s.complete)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.params {
            out.push_str(&format!("{k}={v}\n"));
        }
        for s in &self.shards {
            out.push_str(&s.to_line());
            out.push('\n');
        }
        out.push_str(&format!("complete={}\n", self.is_complete()));
        out
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let mut params = Vec::new();
        let mut shards = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            if line.starts_with("shard=") {
                shards.push(ShardEntry::parse(line).ok_or_else(|| incomplete(format!("bad manifest line {line:?}")))?);
            } else if let Some((k, v)) = line.split_once('=') {
                if k != "complete" {
                    params.push((k.to_string(), v.to_string()));
                }
            } else {
                return Err(incomplete(format!("bad manifest line {line:?}")));
            }
        }
        Ok(Self { params, shards })
    }

    pub fn load(dir: &Path) -> CliResult<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path)
            .map_err(|e| incomplete(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn store(&self, dir: &Path) -> CliResult<()> {
        write_atomic(&dir.join(MANIFEST_FILE), self.render().as_bytes())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp: PathBuf = path.with_file_name(format!(".{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}
