//! Shared workloads for the benchmarks.

use drsmatch_core::synth::{random_pair, SynthParams};
use drsmatch_core::{serialize_corpus, ClausalForm};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn pairs(n: usize, params: &SynthParams, seed: u64) -> Vec<(ClausalForm, ClausalForm)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_pair(&mut rng, params)).collect()
}

/// A corpus file with `n` documents.
pub fn corpus_text(n: usize, seed: u64) -> String {
    let docs = pairs(n, &SynthParams::sweep(), seed);
    let ids: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    serialize_corpus(ids.iter().zip(&docs).map(|(id, (a, _))| (id.as_str(), a)))
}
