//! Census runs: sharded, checkpointed and compared against the main terms.

mod checkpoint;
mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly::{IntPoly, PalindromicPoly};
use crate::salem::shape::{shape_of, Shape};
use crate::salem::{
    enumerate_salem_shard, estimate_candidates, parse_record_line, EnumOptions, SalemRecord,
    DEFAULT_BUDGET, DEFAULT_PRECISION_BITS,
};
use crate::sqrt::{
    estimate_sq_candidates, group_witnesses, large_root_positive, parse_witness_line,
    sq_census_shard, verify_algebra, RawWitness, SqGroup,
};

use checkpoint::{run_dir, Checkpoint};
pub use report::{
    fmt_sig, least_squares_slope, CensusReport, CensusRow, OutputFormat, SlopeFit, CSV_HEADER,
};

/// Environment variable naming the checkpoint base directory.
pub const WORK_DIR_ENV: &str = "SALEM_CENSUS_DIR";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub precision_bits: u32,
    /// Largest candidate estimate a census may start with.
    pub budget: u64,
    pub shards: usize,
    pub format: OutputFormat,
    /// Orders the pending shards; results do not depend on it.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision_bits: DEFAULT_PRECISION_BITS,
            budget: DEFAULT_BUDGET,
            shards: rayon::current_num_threads().max(1),
            format: OutputFormat::Csv,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.precision_bits < 64 {
            return Err(Error::InvalidArgument(format!(
                "precision must be at least 64 bits, got {}",
                self.precision_bits
            )));
        }
        if self.budget < 1000 {
            return Err(Error::InvalidArgument(format!(
                "budget must be at least 1000, got {}",
                self.budget
            )));
        }
        if self.shards == 0 {
            return Err(Error::InvalidArgument(
                "shard count must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Result of one `count` point.
#[derive(Clone, Debug)]
pub struct CountOutcome {
    pub row: CensusRow,
    /// All Salem numbers, when that census was run.
    pub records: Option<Vec<SalemRecord>>,
    pub groups: Option<Vec<SqGroup>>,
}

impl CountOutcome {
    /// Record lines; square-rootable groups list their witnesses indented
    /// under the record.
    pub fn record_stream(&self) -> String {
        let mut out = String::new();
        if let Some(groups) = &self.groups {
            for g in groups {
                out.push_str(&g.record.record_line());
                out.push('\n');
                for w in &g.witnesses {
                    out.push_str("  ");
                    out.push_str(&w.witness_line());
                    out.push('\n');
                }
            }
        } else if let Some(records) = &self.records {
            for r in records {
                out.push_str(&r.record_line());
                out.push('\n');
            }
        }
        out
    }
}

/// Distributes shards to the rayon pool, merges by shard index and keeps
/// per-shard checkpoints when a work directory is set.
#[derive(Clone, Debug)]
pub struct Coordinator {
    pub config: RunConfig,
    pub work_dir: Option<PathBuf>,
    cancel: Arc<AtomicBool>,
}

impl Coordinator {
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        Ok(Coordinator {
            config,
            work_dir: None,
            cancel: Arc::new(AtomicBool::new(false)),
        })
    }

    pub fn with_work_dir(mut self, dir: Option<PathBuf>) -> Self {
        self.work_dir = dir;
        self
    }

    /// Setting the flag stops workers at their next work unit; completed
    /// shards stay checkpointed.
    pub fn cancel_handle(&self) -> Arc<AtomicBool> {
        self.cancel.clone()
    }

    pub fn options(&self) -> EnumOptions {
        EnumOptions {
            budget: self.config.budget,
            precision_bits: self.config.precision_bits,
            shards: self.config.shards,
            cancel: Some(self.cancel.clone()),
        }
    }

    fn run_sharded<T, J, E, D>(
        &self,
        kind: &str,
        m: usize,
        q: &BigRational,
        job: J,
        encode: E,
        decode: D,
    ) -> Result<Vec<T>>
    where
        T: Send,
        J: Fn(usize, usize, &EnumOptions) -> Result<Vec<T>> + Sync,
        E: Fn(&T) -> String + Sync,
        D: Fn(&str) -> Option<T> + Sync,
    {
        let shards = self.config.shards;
        let opts = self.options();
        let ck = match &self.work_dir {
            Some(base) => Some(Checkpoint::open(run_dir(base, kind, m, q, shards))?),
            None => None,
        };
        let mut done: BTreeMap<usize, Vec<T>> = BTreeMap::new();
        if let Some(ck) = &ck {
            for s in ck.completed()?.into_iter().filter(|&s| s < shards) {
                let restored: Option<Vec<T>> =
                    ck.read_shard(s)?.par_iter().map(|l| decode(l)).collect();
                match restored {
                    Some(v) => {
                        done.insert(s, v);
                    }
                    None => ck.forget(s)?,
                }
            }
        }
        let mut pending: Vec<usize> = (0..shards).filter(|s| !done.contains_key(s)).collect();
        pending.shuffle(&mut StdRng::seed_from_u64(self.config.seed));
        let results: Vec<(usize, Result<Vec<T>>)> = pending
            .into_par_iter()
            .map(|s| {
                if self.cancel.load(Ordering::Relaxed) {
                    return (s, Err(Error::Cancelled));
                }
                let r = job(s, shards, &opts).and_then(|v| {
                    if let Some(ck) = &ck {
                        let lines: Vec<String> = v.iter().map(&encode).collect();
                        ck.write_shard(s, &lines)?;
                    }
                    Ok(v)
                });
                (s, r)
            })
            .collect();
        let mut first_err = None;
        for (s, r) in results {
            match r {
                Ok(v) => {
                    done.insert(s, v);
                }
                Err(e) => {
                    if first_err.is_none() || matches!(first_err, Some(Error::Cancelled)) {
                        first_err = Some(e);
                    }
                }
            }
        }
        if let Some(e) = first_err {
            return Err(e);
        }
        Ok(done.into_values().flatten().collect())
    }

    /// Every Salem number of degree `2m` in `(1, Q]`, sorted by `λ`.
    pub fn salem_census(&self, m: usize, q: &BigRational) -> Result<Vec<SalemRecord>> {
        check_estimate(m, estimate_candidates(m, q), self.config.budget)?;
        let bits = self.config.precision_bits;
        let mut all = self.run_sharded(
            "all",
            m,
            q,
            |s, n, o| enumerate_salem_shard(m, q, s, n, o),
            SalemRecord::record_line,
            |line| restore_record(line, m, q, bits),
        )?;
        all.sort_by(SalemRecord::cmp_by_lambda);
        Ok(all)
    }

    /// Square-rootable Salem numbers of degree `2m` in `(1, Q]` with their
    /// witnesses, sorted by `λ`.
    pub fn sq_census(&self, m: usize, q: &BigRational) -> Result<Vec<SqGroup>> {
        check_estimate(m, estimate_sq_candidates(m, q), self.config.budget)?;
        let raw = self.run_sharded(
            "sq",
            m,
            q,
            |s, n, o| sq_census_shard(m, q, s, n, o),
            |w: &RawWitness| {
                format!(
                    "{}; {}; {}",
                    w.alpha,
                    w.a.to_coeff_list(),
                    w.b.to_coeff_list()
                )
            },
            |line| restore_witness(line, m, q),
        )?;
        Ok(group_witnesses(raw, self.config.precision_bits))
    }

    /// One census point. With `sq`, the all-Salem census is added only when
    /// it fits the budget.
    pub fn count(&self, m: usize, q: &BigRational, sq: bool) -> Result<CountOutcome> {
        let start = Instant::now();
        let (records, groups) = if sq {
            let groups = self.sq_census(m, q)?;
            let records = if estimate_candidates(m, q) <= self.config.budget as u128 {
                Some(self.salem_census(m, q)?)
            } else {
                None
            };
            (records, Some(groups))
        } else {
            (Some(self.salem_census(m, q)?), None)
        };
        let row = CensusRow::new(
            m as u32,
            q.to_f64().unwrap_or(f64::NAN),
            records.as_ref().map(|r| r.len() as u64),
            groups.as_ref().map(|g| g.len() as u64),
            start.elapsed().as_secs_f64(),
            self.config.shards,
        )?;
        Ok(CountOutcome {
            row,
            records,
            groups,
        })
    }

    /// Runs every `Q` (ascending), keeps going past failed points and fits
    /// the growth exponent of each counted column.
    pub fn sweep(
        &self,
        m: usize,
        qs: &[BigRational],
        sq: bool,
    ) -> (CensusReport, Vec<(BigRational, Error)>) {
        let mut qs = qs.to_vec();
        qs.sort();
        qs.dedup();
        let mut report = CensusReport::default();
        let mut errors = Vec::new();
        for q in qs {
            match self.count(m, &q, sq) {
                Ok(o) => report.rows.push(o.row),
                Err(e) => errors.push((q, e)),
            }
        }
        report.slopes.extend(SlopeFit::fit(&report.rows, false));
        if sq {
            report.slopes.extend(SlopeFit::fit(&report.rows, true));
        }
        (report, errors)
    }
}

fn check_estimate(m: usize, estimated: u128, budget: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    if estimated > budget as u128 {
        return Err(Error::BudgetExceeded { estimated, budget });
    }
    Ok(())
}

/// Re-verifies a checkpointed record line with the exact shape test and
/// recomputes its `λ` enclosure.
fn restore_record(line: &str, m: usize, q: &BigRational, bits: u32) -> Option<SalemRecord> {
    let (_, rm, p) = parse_record_line(line).ok()?;
    if rm != m {
        return None;
    }
    let trace = PalindromicPoly::new(p).ok()?.trace_transform();
    if shape_of(trace.as_poly(), q) != Shape::Salem {
        return None;
    }
    Some(SalemRecord::from_certified_trace(trace, bits))
}

/// Re-verifies a checkpointed witness: the identity, the sign of the large
/// root and the exact shape of its Salem source.
fn restore_witness(line: &str, m: usize, q: &BigRational) -> Option<RawWitness> {
    let d = parse_witness_line(line).ok()?;
    if d.m() != m || verify_algebra(&d).is_err() || !large_root_positive(&d) {
        return None;
    }
    let trace: IntPoly = d.source.trace_transform().into_poly();
    if shape_of(&trace, q) != Shape::Salem {
        return None;
    }
    Some(RawWitness {
        trace,
        alpha: d.alpha,
        a: d.a,
        b: d.b,
    })
}

/// Checkpoint base: an explicit directory, else `SALEM_CENSUS_DIR`, else none.
pub fn resolve_work_dir(explicit: Option<PathBuf>) -> Option<PathBuf> {
    explicit.or_else(|| {
        std::env::var_os(WORK_DIR_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
    })
}
