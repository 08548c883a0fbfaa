//! Deterministic counter-based random streams.
//!
//! Every random draw in this crate comes from a keyed counter generator:
//! output `i` of a stream is a pure function of `(seed, partition, trial, i)`.
//! Trials therefore never share state, experiments can be split across
//! partitions and threads freely, and a fixed `(seed, partition plan)` pair
//! reproduces results bit for bit regardless of how many worker threads the
//! process happens to have.
//!
//! The generator is the SplitMix64 finalizer applied to `key + i * GOLDEN`,
//! which is a counter-mode construction with full avalanche. It is not
//! cryptographically secure.

use rayon::prelude::*;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const TRIAL_SALT: u64 = 0xD1B5_4A32_D192_ED03;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A seed plus derivation path. Cheap to copy; produces independent
/// substreams and per-trial generators without mutating shared state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomStream {
    key: u64,
}

impl RandomStream {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            key: mix64(seed ^ GOLDEN),
        }
    }

    /// Independent substream, e.g. one per partition of a trial loop.
    #[must_use]
    pub fn substream(&self, index: u64) -> Self {
        Self {
            key: mix64(self.key ^ mix64(index.wrapping_add(1).wrapping_mul(GOLDEN))),
        }
    }

    /// Generator for a single trial. Distinct trial indices give
    /// statistically independent generators.
    #[must_use]
    pub fn trial(&self, index: u64) -> TrialRng {
        TrialRng {
            key: mix64(self.key ^ mix64(index ^ TRIAL_SALT)),
            ctr: 0,
        }
    }
}

/// Counter-mode generator handed to sampling operations.
#[derive(Debug, Clone)]
pub struct TrialRng {
    key: u64,
    ctr: u64,
}

impl TrialRng {
    pub fn next_u64(&mut self) -> u64 {
        self.ctr = self.ctr.wrapping_add(1);
        mix64(self.key.wrapping_add(self.ctr.wrapping_mul(GOLDEN)))
    }

    /// Uniform in `[0, 1)` with 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Fair bit.
    pub fn bit(&mut self) -> u8 {
        (self.next_u64() >> 63) as u8
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Index drawn proportionally to `weights` (assumed non-negative,
    /// summing to ~1). Accumulated float slack falls on the last
    /// positive-weight entry.
    pub fn choose_weighted(&mut self, weights: &[f64]) -> usize {
        debug_assert!(!weights.is_empty());
        let u = self.next_f64();
        let mut acc = 0.0;
        for (i, &w) in weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return i;
            }
        }
        weights
            .iter()
            .rposition(|&w| w > 0.0)
            .unwrap_or(weights.len() - 1)
    }
}

/// Contiguous slice of a trial range, assigned to one substream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Partition {
    pub index: u64,
    pub start: u64,
    pub len: u64,
}

/// Split `n_trials` into `n_partitions` near-equal contiguous ranges.
pub fn partition_trials(n_trials: u64, n_partitions: u32) -> Vec<Partition> {
    let parts = u64::from(n_partitions.max(1)).min(n_trials.max(1));
    let base = n_trials / parts;
    let extra = n_trials % parts;
    let mut out = Vec::with_capacity(parts as usize);
    let mut start = 0;
    for index in 0..parts {
        let len = base + u64::from(index < extra);
        out.push(Partition { index, start, len });
        start += len;
    }
    out
}

/// Run one record per trial across partitions in parallel.
///
/// Partition `p` draws its records from `stream.substream(p)` with local
/// attempt indices, so the output depends only on `(stream, n_trials,
/// n_partitions)` — never on thread scheduling. Records are returned in
/// partition order.
pub fn run_partitioned<T, F>(
    stream: &RandomStream,
    n_trials: u64,
    n_partitions: u32,
    f: F,
) -> Vec<T>
where
    T: Send,
    F: Fn(&mut TrialRng) -> T + Sync,
{
    run_partitioned_filtered(stream, n_trials, n_partitions, |rng| Some(f(rng)))
}

/// Like [`run_partitioned`], but the closure may reject an attempt by
/// returning `None`; each partition keeps drawing fresh attempts from its
/// substream until it has filled its quota of kept records.
pub fn run_partitioned_filtered<T, F>(
    stream: &RandomStream,
    n_keep: u64,
    n_partitions: u32,
    f: F,
) -> Vec<T>
where
    T: Send,
    F: Fn(&mut TrialRng) -> Option<T> + Sync,
{
    let plan = partition_trials(n_keep, n_partitions);
    let mut chunks: Vec<(u64, Vec<T>)> = plan
        .par_iter()
        .map(|part| {
            let sub = stream.substream(part.index);
            let mut kept = Vec::with_capacity(part.len as usize);
            let mut attempt = 0u64;
            while (kept.len() as u64) < part.len {
                let mut rng = sub.trial(attempt);
                attempt += 1;
                if let Some(record) = f(&mut rng) {
                    kept.push(record);
                }
            }
            (part.index, kept)
        })
        .collect();
    chunks.sort_by_key(|(index, _)| *index);
    chunks.into_iter().flat_map(|(_, kept)| kept).collect()
}
