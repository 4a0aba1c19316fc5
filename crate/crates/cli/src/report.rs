use std::fmt::Write as _;

use drsmatch_core::{CorpusScore, SweepReport, SweepRow};
use serde::Serialize;

/// Envelope of every JSON report.
#[derive(Serialize)]
pub struct RunReport<T: Serialize> {
    pub command: Vec<String>,
    pub config: serde_json::Value,
    pub result: T,
    /// Seconds; only with `--timings` so that reports are reproducible.
    pub elapsed: Option<f64>,
}

impl<T: Serialize> RunReport<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports are serializable")
    }
}

/// A fraction as a percentage with one decimal.
pub fn pct(x: f64) -> String {
    format!("{:.1}%", 100.0 * x)
}

pub fn score_text(score: &CorpusScore) -> String {
    let m = &score.micro;
    let mut out = String::new();
    let _ = writeln!(out, "documents: {}", score.per_doc.len());
    let _ = writeln!(
        out,
        "matched: {}  system: {}  gold: {}",
        m.matched, m.size_sys, m.size_gold
    );
    let _ = writeln!(out, "precision: {}", pct(m.scores.precision));
    let _ = writeln!(out, "recall: {}", pct(m.scores.recall));
    let _ = writeln!(out, "F1: {}", pct(m.scores.f1));
    if score.per_doc.len() > 1 {
        let _ = writeln!(out, "macro F1: {}", pct(score.macro_f1));
    }
    out
}

fn row_text(out: &mut String, label: &str, row: &SweepRow) {
    let _ = write!(
        out,
        "{label:<9} {:>7} {:>7} {:>7}",
        pct(row.precision),
        pct(row.recall),
        pct(row.f1)
    );
    if let Some(secs) = row.seconds {
        let _ = write!(out, " {secs:>9.3}s");
    }
    out.push('\n');
    for (len, f1) in &row.by_length {
        let _ = writeln!(out, "  len {len:<4} F1 {}", pct(*f1));
    }
}

pub fn sweep_text(report: &SweepReport) -> String {
    let mut out = format!("pairs: {}\n{:<9} {:>7} {:>7} {:>7}\n", report.pairs, "restarts", "P", "R", "F1");
    for row in &report.rows {
        row_text(&mut out, &row.restarts.to_string(), row);
    }
    if let Some(opt) = &report.optimal {
        row_text(&mut out, "optimal", &opt.row);
        if opt.budget_exceeded > 0 {
            let _ = writeln!(out, "  {} pairs exceeded the search budget", opt.budget_exceeded);
        }
    }
    out
}
