//! Per-shard checkpoints.
//!
//! A run directory holds `completed` (one finished shard index per line) and
//! `shard-<i>.txt` (that shard's results, one line each). A shard file is
//! written to a temporary name and renamed before its index is appended, so
//! an index in `completed` always refers to a whole file.

use std::collections::BTreeSet;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use crate::error::{Error, Result};

pub(crate) struct Checkpoint {
    dir: PathBuf,
    lock: Mutex<()>,
}

impl Checkpoint {
    pub fn open(dir: PathBuf) -> Result<Self> {
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Checkpoint {
            dir,
            lock: Mutex::new(()),
        })
    }

    fn completed_path(&self) -> PathBuf {
        self.dir.join("completed")
    }

    fn shard_path(&self, shard: usize) -> PathBuf {
        self.dir.join(format!("shard-{shard}.txt"))
    }

    pub fn completed(&self) -> Result<BTreeSet<usize>> {
        let path = self.completed_path();
        match fs::read_to_string(&path) {
            Ok(text) => Ok(text.lines().filter_map(|l| l.trim().parse().ok()).collect()),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(BTreeSet::new()),
            Err(e) => Err(Error::io(path, e)),
        }
    }

    pub fn read_shard(&self, shard: usize) -> Result<Vec<String>> {
        let path = self.shard_path(shard);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Ok(text.lines().map(str::to_string).collect())
    }

    pub fn write_shard(&self, shard: usize, lines: &[String]) -> Result<()> {
        let path = self.shard_path(shard);
        let tmp = path.with_extension("tmp");
        let mut body = lines.join("\n");
        if !body.is_empty() {
            body.push('\n');
        }
        fs::write(&tmp, body).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
        let _guard = self.lock.lock().unwrap();
        let cpath = self.completed_path();
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&cpath)
            .map_err(|e| Error::io(&cpath, e))?;
        writeln!(f, "{shard}").map_err(|e| Error::io(&cpath, e))
    }

    /// Drops a shard whose file failed re-verification.
    pub fn forget(&self, shard: usize) -> Result<()> {
        let _guard = self.lock.lock().unwrap();
        let keep: Vec<String> = self
            .completed()?
            .into_iter()
            .filter(|&s| s != shard)
            .map(|s| s.to_string())
            .collect();
        let cpath = self.completed_path();
        let mut body = keep.join("\n");
        if !body.is_empty() {
            body.push('\n');
        }
        fs::write(&cpath, body).map_err(|e| Error::io(&cpath, e))
    }
}

/// Run directory name for one census: kind, `m`, `Q` and shard count.
pub(crate) fn run_dir(
    base: &Path,
    kind: &str,
    m: usize,
    q: &num_rational::BigRational,
    shards: usize,
) -> PathBuf {
    let q = q.to_string().replace('/', "_");
    base.join(format!("{kind}-m{m}-q{q}-n{shards}"))
}
