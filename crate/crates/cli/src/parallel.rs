//! Thread-parallel drivers over the library's splittable work units.
//!
//! Every driver combines partial results with an associative merge, so the
//! output does not depend on the number of threads or on scheduling.

use std::fs;
use std::path::Path;

use coconvex_core::caterpillar::canonical_prefixes;
use coconvex_core::coconvex::enumerate_coconvex;
use coconvex_core::expectation::{mc_range, MonteCarlo};
use coconvex_core::extremal::{MinAccumulator, SearchReport, SearchState, SharedCounter, WITNESS_CAP};
use coconvex_core::{CountTable, Error, Label, Tree};
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ToolError};
use crate::report::SCHEMA_VERSION;

/// Runs `f` on a pool with `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| ToolError::Usage(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Common convex characters counted over `8^depth`-ish independent chunks.
pub fn coconvex_counts(trees: &[Tree], max_n: usize, depth: usize) -> Result<CountTable> {
    let stream = enumerate_coconvex(trees, max_n)?;
    let n = trees[0].n();
    Ok(stream
        .split(depth)
        .into_par_iter()
        .map(|chunk| CountTable::tally(n, chunk.map(|p| p.stats())))
        .reduce(|| CountTable::new(n), |mut a, b| {
            a.merge(&b);
            a
        }))
}

/// Monte-Carlo estimate with sample `i` drawn from stream `i` of `seed`.
pub fn monte_carlo(n: usize, samples: u64, seed: u64, max_n: usize) -> Result<MonteCarlo> {
    if samples == 0 {
        return Err(Error::OutOfRange("at least one sample is needed".into()).into());
    }
    let counter = SharedCounter::identity(n, max_n)?;
    const BATCH: u64 = 32;
    Ok((0..samples.div_ceil(BATCH))
        .into_par_iter()
        .map(|b| mc_range(&counter, seed, b * BATCH..((b + 1) * BATCH).min(samples)))
        .reduce(MonteCarlo::default, |mut a, b| {
            a.merge(&b);
            a
        }))
}

/// Symmetric matrix of `metric` over all pairs of `trees`.
pub fn distance_matrix<F>(trees: &[Tree], metric: F) -> Result<Vec<Vec<BigUint>>>
where
    F: Fn(&Tree, &Tree) -> coconvex_core::Result<BigUint> + Sync,
{
    let m = trees.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let values: Vec<BigUint> = pairs
        .par_iter()
        .map(|&(i, j)| metric(&trees[i], &trees[j]))
        .collect::<coconvex_core::Result<_>>()?;
    let mut out = vec![vec![BigUint::default(); m]; m];
    for (&(i, j), v) in pairs.iter().zip(values) {
        out[i][j] = v.clone();
        out[j][i] = v;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct AccumulatorFile {
    value: Option<u64>,
    witness_count: u64,
    witnesses: Vec<Vec<Label>>,
}

impl AccumulatorFile {
    fn from_acc(a: &MinAccumulator) -> Self {
        AccumulatorFile {
            value: a.value,
            witness_count: a.witness_count,
            witnesses: a.witnesses.clone(),
        }
    }

    fn to_acc(&self, cap: usize) -> MinAccumulator {
        MinAccumulator {
            cap,
            value: self.value,
            witnesses: self.witnesses.clone(),
            witness_count: self.witness_count,
        }
    }
}

/// Resumable state of an exhaustive caterpillar search, stored as JSON.
///
/// `chunks` is the number of prefix chunks the search is split into and
/// `done` lists the finished chunk indices; the accumulators hold the
/// merged nontrivial minima over those chunks only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub schema_version: u32,
    pub n: usize,
    pub chunks: usize,
    pub done: Vec<usize>,
    pub examined: u64,
    per_k: Vec<AccumulatorFile>,
    total: AccumulatorFile,
}

impl Checkpoint {
    fn new(state: &SearchState, chunks: usize, done: Vec<usize>) -> Self {
        Checkpoint {
            schema_version: SCHEMA_VERSION,
            n: state.n,
            chunks,
            done,
            examined: state.examined,
            per_k: state.per_k.iter().map(AccumulatorFile::from_acc).collect(),
            total: AccumulatorFile::from_acc(&state.total),
        }
    }

    fn state(&self) -> SearchState {
        SearchState {
            n: self.n,
            per_k: self.per_k.iter().map(|a| a.to_acc(WITNESS_CAP)).collect(),
            total: self.total.to_acc(WITNESS_CAP),
            examined: self.examined,
        }
    }

    pub fn read(path: &Path) -> Result<Checkpoint> {
        let text = fs::read_to_string(path).map_err(|e| ToolError::io(path, e))?;
        let c: Checkpoint = serde_json::from_str(&text).map_err(|e| ToolError::Checkpoint(format!("{}: {e}", path.display())))?;
        if c.schema_version != SCHEMA_VERSION {
            return Err(ToolError::Checkpoint(format!("unsupported schema version {}", c.schema_version)));
        }
        if c.per_k.len() != c.n + 1 || c.done.iter().any(|&i| i >= c.chunks) {
            return Err(ToolError::Checkpoint("inconsistent checkpoint contents".into()));
        }
        Ok(c)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        let text = serde_json::to_string(self)?;
        fs::write(&tmp, text).map_err(|e| ToolError::io(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| ToolError::io(path, e))
    }
}

/// Exhaustive search over canonical caterpillars, one prefix chunk per
/// task. With a checkpoint path, finished chunks are recorded after every
/// batch and a later call resumes from the file.
pub fn exhaustive_search(n: usize, max_n: usize, checkpoint: Option<&Path>) -> Result<SearchReport> {
    if n > max_n {
        return Err(Error::GuardExceeded {
            what: "exhaustive caterpillar search",
            n,
            limit: max_n,
        }
        .into());
    }
    if n == 0 {
        return Err(Error::OutOfRange("n must be positive".into()).into());
    }
    let counter = SharedCounter::identity(n, usize::MAX)?;
    let prefixes = canonical_prefixes(n);
    let (mut state, mut done) = match checkpoint.filter(|p| p.exists()) {
        Some(path) => {
            let c = Checkpoint::read(path)?;
            if c.n != n || c.chunks != prefixes.len() {
                return Err(ToolError::Checkpoint(format!(
                    "{} belongs to a search with n = {} and {} chunks",
                    path.display(),
                    c.n,
                    c.chunks
                )));
            }
            (c.state(), c.done)
        }
        None => (SearchState::new(n, WITNESS_CAP), Vec::new()),
    };
    let pending: Vec<usize> = (0..prefixes.len()).filter(|i| !done.contains(i)).collect();
    let batch = match checkpoint {
        Some(_) => (4 * rayon::current_num_threads()).max(1),
        None => pending.len().max(1),
    };
    for group in pending.chunks(batch) {
        let part = group
            .par_iter()
            .map(|&i| {
                let mut s = SearchState::new(n, WITNESS_CAP);
                s.examine_chunk(&counter, &prefixes[i])?;
                Ok(s)
            })
            .collect::<coconvex_core::Result<Vec<_>>>()?;
        for s in &part {
            state.merge(s);
        }
        done.extend_from_slice(group);
        if let Some(path) = checkpoint {
            done.sort_unstable();
            Checkpoint::new(&state, prefixes.len(), done.clone()).write(path)?;
        }
    }
    Ok(state.finish())
}
