//! Brute-force reference matcher for cross-checking the search code.
//!
//! Enumerates every partial injective kind-respecting mapping and scores
//! it by textual substitution, sharing nothing with the indexed matcher
//! beyond kind inference.

use std::collections::HashSet;

use crate::clause::{Term, VariableId};
use crate::form::ClausalForm;

fn substituted(form: &ClausalForm, a_vars: &[VariableId], assign: &[Option<usize>], b_vars: &[VariableId]) -> Vec<String> {
    form.clauses()
        .iter()
        .map(|c| {
            let rename = |v: &VariableId| {
                let i = a_vars.iter().position(|x| x == v).expect("known variable");
                match assign[i] {
                    Some(t) => b_vars[t].as_str().to_string(),
                    // never equal to any token of the other form
                    None => format!("\u{0}{}", v.as_str()),
                }
            };
            let mut out = vec![rename(c.box_var()), c.tag().to_string()];
            for arg in c.args() {
                out.push(match arg {
                    Term::Var(v) => rename(v),
                    Term::Const(_) => arg.to_token(),
                });
            }
            out.join(" ")
        })
        .collect()
}

/// Maximum matched-clause count by exhaustive enumeration. Exponential:
/// only for forms with a handful of variables.
pub fn naive_max_matched(a: &ClausalForm, b: &ClausalForm) -> usize {
    let a_vars: Vec<VariableId> = a.kinds().keys().cloned().collect();
    let b_vars: Vec<VariableId> = b.kinds().keys().cloned().collect();
    let targets: HashSet<String> = b.clauses().iter().map(|c| c.tokens().join(" ")).collect();
    let mut assign = vec![None; a_vars.len()];
    let mut used = vec![false; b_vars.len()];
    let mut best = 0;
    enumerate(a, b, &a_vars, &b_vars, &targets, 0, &mut assign, &mut used, &mut best);
    best
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    a: &ClausalForm,
    b: &ClausalForm,
    a_vars: &[VariableId],
    b_vars: &[VariableId],
    targets: &HashSet<String>,
    depth: usize,
    assign: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
    best: &mut usize,
) {
    if depth == a_vars.len() {
        let count = substituted(a, a_vars, assign, b_vars)
            .iter()
            .filter(|c| targets.contains(*c))
            .count();
        *best = (*best).max(count);
        return;
    }
    let kind = a.kind_of(&a_vars[depth]);
    for t in 0..b_vars.len() {
        if used[t] || b.kind_of(&b_vars[t]) != kind {
            continue;
        }
        used[t] = true;
        assign[depth] = Some(t);
        enumerate(a, b, a_vars, b_vars, targets, depth + 1, assign, used, best);
        used[t] = false;
    }
    assign[depth] = None;
    enumerate(a, b, a_vars, b_vars, targets, depth + 1, assign, used, best);
}
