//! The trivial "most central document" baseline: pick the corpus DRS with
//! the highest mean F1 against every other document and emit it for every
//! input.

use serde::Serialize;
use thiserror::Error;

use crate::form::ClausalForm;
use crate::matcher::{match_forms, MatchConfig};
use crate::parallel::map_ordered;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("need at least 2 documents, got {size}")]
pub struct CorpusTooSmall {
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparSelection {
    /// Position of the chosen document in the input.
    pub index: usize,
    pub doc_id: String,
    pub mean_f1: f64,
}

/// Scores all unordered pairs (F1 is symmetric) and returns the argmax of
/// mean F1; ties go to the lowest index. Documents without an id are named
/// by their 1-based position.
pub fn spar_select(
    corpus: &[ClausalForm],
    config: &MatchConfig,
    threads: Option<usize>,
) -> Result<SparSelection, CorpusTooSmall> {
    let n = corpus.len();
    if n < 2 {
        return Err(CorpusTooSmall { size: n });
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let scores = map_ordered(&pairs, threads, |&(i, j)| match_forms(&corpus[i], &corpus[j], config).f1);
    let mut sums = vec![0.0; n];
    for (&(i, j), f) in pairs.iter().zip(&scores) {
        sums[i] += f;
        sums[j] += f;
    }
    let mut index = 0;
    for i in 1..n {
        if sums[i] > sums[index] {
            index = i;
        }
    }
    Ok(SparSelection {
        index,
        doc_id: corpus[index]
            .doc_id()
            .map_or_else(|| (index + 1).to_string(), str::to_string),
        mean_f1: sums[index] / (n - 1) as f64,
    })
}
