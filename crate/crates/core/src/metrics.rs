//! Scoring arithmetic, corpus aggregation, clause-type statistics and
//! restart sweeps.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::clause::{ClauseTag, Operator};
use crate::form::ClausalForm;
use crate::matcher::{match_forms, MatchConfig, MatchResult};
use crate::normalize::prepare_for_matching;
use crate::oracle::{optimal_match, OracleError, OracleLimits};
use crate::parallel::map_ordered;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("matched count {matched} exceeds a form size ({size_sys}, {size_gold})")]
pub struct InvalidCounts {
    pub matched: usize,
    pub size_sys: usize,
    pub size_gold: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Precision, recall and F1 from clause counts; 0/0 is 0.
pub fn prf(matched: usize, size_sys: usize, size_gold: usize) -> Result<Prf, InvalidCounts> {
    if matched > size_sys || matched > size_gold {
        return Err(InvalidCounts {
            matched,
            size_sys,
            size_gold,
        });
    }
    Ok(Prf {
        precision: ratio(matched, size_sys),
        recall: ratio(matched, size_gold),
        f1: ratio(2 * matched, size_sys + size_gold),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MicroScore {
    pub matched: usize,
    pub size_sys: usize,
    pub size_gold: usize,
    #[serde(flatten)]
    pub scores: Prf,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusScore {
    /// From summed counts; the headline number.
    pub micro: MicroScore,
    /// Unweighted mean of per-document F1.
    pub macro_f1: f64,
    pub per_doc: Vec<(String, MatchResult)>,
}

pub fn aggregate(results: Vec<(String, MatchResult)>) -> CorpusScore {
    let (matched, size_sys, size_gold) = results.iter().fold((0, 0, 0), |(m, s, g), (_, r)| {
        (m + r.matched, s + r.size_sys, g + r.size_gold)
    });
    let macro_f1 = if results.is_empty() {
        0.0
    } else {
        results.iter().map(|(_, r)| r.f1).sum::<f64>() / results.len() as f64
    };
    CorpusScore {
        micro: MicroScore {
            matched,
            size_sys,
            size_gold,
            scores: prf(matched, size_sys, size_gold).expect("per-document counts are bounded"),
        },
        macro_f1,
        per_doc: results,
    }
}

/// Clause counts per category.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub struct ClauseTypeStats {
    pub r#ref: usize,
    pub not: usize,
    pub pos: usize,
    pub nec: usize,
    pub imp: usize,
    pub dis: usize,
    pub prp: usize,
    pub rel: usize,
    pub drs: usize,
    #[serde(rename = "Compare")]
    pub compare: usize,
    #[serde(rename = "Concept")]
    pub concept: usize,
    #[serde(rename = "Role")]
    pub role: usize,
}

impl ClauseTypeStats {
    pub fn total(&self) -> usize {
        self.rows().iter().map(|(_, n)| n).sum()
    }

    /// (label, count) in display order.
    pub fn rows(&self) -> [(&'static str, usize); 12] {
        [
            ("REF", self.r#ref),
            ("NOT", self.not),
            ("POS", self.pos),
            ("NEC", self.nec),
            ("IMP", self.imp),
            ("DIS", self.dis),
            ("PRP", self.prp),
            ("REL", self.rel),
            ("DRS", self.drs),
            ("Compare", self.compare),
            ("Concept", self.concept),
            ("Role", self.role),
        ]
    }

    fn add(&mut self, tag: &ClauseTag) {
        let slot = match tag {
            ClauseTag::Concept { .. } => &mut self.concept,
            ClauseTag::Role(_) => &mut self.role,
            ClauseTag::DiscourseRel(_) => &mut self.rel,
            ClauseTag::Operator(op) => match op {
                Operator::Ref => &mut self.r#ref,
                Operator::Not => &mut self.not,
                Operator::Pos => &mut self.pos,
                Operator::Nec => &mut self.nec,
                Operator::Imp => &mut self.imp,
                Operator::Dis => &mut self.dis,
                Operator::Prp => &mut self.prp,
                Operator::Drs => &mut self.drs,
                _ => &mut self.compare,
            },
        };
        *slot += 1;
    }
}

/// Totals over forms as given (REF clauses are counted before any removal).
pub fn clause_type_stats<'a>(corpus: impl IntoIterator<Item = &'a ClausalForm>) -> ClauseTypeStats {
    let mut stats = ClauseTypeStats::default();
    for form in corpus {
        for clause in form.clauses() {
            stats.add(clause.tag());
        }
    }
    stats
}

#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    /// Worker threads for per-pair scoring; `None` or 1 runs sequentially.
    pub threads: Option<usize>,
    /// Record wall time per row.
    pub timings: bool,
    /// Length attribute per pair for a per-length breakdown.
    pub lengths: Option<Vec<usize>>,
    /// Also compute an exact row with these limits.
    pub oracle: Option<OracleLimits>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub restarts: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub seconds: Option<f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub by_length: BTreeMap<usize, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleRow {
    #[serde(flatten)]
    pub row: SweepRow,
    /// Pairs whose search hit the node budget (their scores are lower bounds).
    pub budget_exceeded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub pairs: usize,
    pub rows: Vec<SweepRow>,
    pub optimal: Option<OracleRow>,
}

fn micro_row(
    restarts: usize,
    results: &[MatchResult],
    lengths: Option<&[usize]>,
    seconds: Option<f64>,
) -> SweepRow {
    let (m, s, g) = results
        .iter()
        .fold((0, 0, 0), |(m, s, g), r| (m + r.matched, s + r.size_sys, g + r.size_gold));
    let scores = prf(m, s, g).expect("bounded counts");
    let mut by_length = BTreeMap::new();
    if let Some(lengths) = lengths {
        let mut sums: BTreeMap<usize, (usize, usize, usize)> = BTreeMap::new();
        for (r, len) in results.iter().zip(lengths) {
            let e = sums.entry(*len).or_default();
            e.0 += r.matched;
            e.1 += r.size_sys;
            e.2 += r.size_gold;
        }
        by_length = sums
            .into_iter()
            .map(|(len, (m, s, g))| (len, prf(m, s, g).expect("bounded counts").f1))
            .collect();
    }
    SweepRow {
        restarts,
        precision: scores.precision,
        recall: scores.recall,
        f1: scores.f1,
        seconds,
        by_length,
    }
}

/// Micro scores for each restart count, using prefixes of one seed schedule
/// so that rows are non-decreasing in matched clauses.
///
/// Panics if `restart_list` is not ascending or `lengths` has the wrong size.
pub fn sweep_report(
    pairs: &[(ClausalForm, ClausalForm)],
    restart_list: &[usize],
    config: &MatchConfig,
    options: &SweepOptions,
) -> SweepReport {
    assert!(
        restart_list.windows(2).all(|w| w[0] <= w[1]),
        "restart list must be ascending"
    );
    let lengths = options.lengths.as_deref();
    if let Some(lengths) = lengths {
        assert_eq!(lengths.len(), pairs.len(), "one length per pair");
    }
    let mut rows = Vec::with_capacity(restart_list.len());
    for &restarts in restart_list {
        let row_config = config.clone().with_restarts(restarts);
        let start = Instant::now();
        let results = map_ordered(pairs, options.threads, |(sys, gold)| {
            match_forms(sys, gold, &row_config)
        });
        let seconds = options.timings.then(|| start.elapsed().as_secs_f64());
        rows.push(micro_row(restarts, &results, lengths, seconds));
    }
    let optimal = options.oracle.map(|limits| {
        let start = Instant::now();
        let outcomes = map_ordered(pairs, options.threads, |(sys, gold)| {
            let a = prepare_for_matching(sys, config.keep_refs);
            let b = prepare_for_matching(gold, config.keep_refs);
            optimal_match(&a, &b, &limits)
        });
        let seconds = options.timings.then(|| start.elapsed().as_secs_f64());
        let mut budget_exceeded = 0;
        let results: Vec<MatchResult> = outcomes
            .into_iter()
            .zip(pairs)
            .map(|(outcome, (sys, gold))| match outcome {
                Ok(r) => r,
                Err(OracleError::BudgetExceeded { best, .. }) => {
                    budget_exceeded += 1;
                    *best
                }
                Err(OracleError::TooLarge { .. }) => {
                    budget_exceeded += 1;
                    match_forms(sys, gold, config)
                }
            })
            .collect();
        OracleRow {
            row: micro_row(0, &results, lengths, seconds),
            budget_exceeded,
        }
    });
    SweepReport {
        pairs: pairs.len(),
        rows,
        optimal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_document;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-3
    }

    #[test]
    fn prf_examples() {
        let s = prf(6, 9, 13).unwrap();
        assert!(close(s.f1, 0.545));
        assert!(close(prf(3, 6, 9).unwrap().f1, 0.400));
        let zero = prf(0, 0, 5).unwrap();
        assert_eq!((zero.precision, zero.recall, zero.f1), (0.0, 0.0, 0.0));
        assert!(prf(4, 3, 9).is_err());
    }

    #[test]
    fn f1_is_symmetric_in_sizes() {
        for (m, s, g) in [(1, 2, 3), (5, 7, 11), (0, 4, 4), (3, 3, 3)] {
            assert_eq!(prf(m, s, g).unwrap().f1, prf(m, g, s).unwrap().f1);
        }
    }

    fn result(m: usize, s: usize, g: usize) -> MatchResult {
        MatchResult::new(Default::default(), m, s, g, vec![])
    }

    #[test]
    fn aggregation() {
        let score = aggregate(vec![("a".into(), result(1, 2, 2)), ("b".into(), result(3, 4, 4))]);
        assert!(close(score.micro.scores.f1, 0.667));
        assert!(close(score.macro_f1, 0.625));
        assert_eq!(score.per_doc[0].0, "a");

        let single = aggregate(vec![("a".into(), result(2, 3, 4))]);
        assert_eq!(single.micro.scores.f1, single.macro_f1);
        assert_eq!(single.micro.scores.f1, single.per_doc[0].1.f1);

        let empty = aggregate(vec![]);
        assert_eq!((empty.micro.scores.f1, empty.macro_f1), (0.0, 0.0));
    }

    #[test]
    fn stats_of_negated_modal_form() {
        let f = parse_document(
            "k0 NOT b2\nb2 REF x1\nb2 person n.01 x1\nb2 POS b3\nb3 Agent e1 x1\nb3 REF e1\nb3 resist v.02 e1\n",
        )
        .unwrap();
        let stats = clause_type_stats([&f]);
        assert_eq!(
            stats,
            ClauseTypeStats {
                r#ref: 2,
                not: 1,
                pos: 1,
                concept: 2,
                role: 1,
                ..Default::default()
            }
        );
        assert_eq!(stats.total(), f.len());
        assert_eq!(clause_type_stats(std::iter::empty()), ClauseTypeStats::default());
    }

    #[test]
    fn stats_json_labels() {
        let json = serde_json::to_value(ClauseTypeStats::default()).unwrap();
        let keys: Vec<_> = json.as_object().unwrap().keys().cloned().collect();
        for (label, _) in ClauseTypeStats::default().rows() {
            assert!(keys.contains(&label.to_string()), "{label}");
        }
    }
}
