//! Pre-matching normalization: variable standardization and redundant
//! REF-clause removal.

use std::collections::{BTreeMap, HashSet};

use crate::clause::{ClauseTag, Operator, Term, VariableId};
use crate::form::ClausalForm;

/// Old-name to new-name table produced by [`standardize_variables`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RenamingTable {
    pub prefix: String,
    pub map: BTreeMap<VariableId, VariableId>,
}

impl RenamingTable {
    pub fn get(&self, var: &VariableId) -> Option<&VariableId> {
        self.map.get(var)
    }

    pub fn inverse(&self) -> BTreeMap<VariableId, VariableId> {
        self.map.iter().map(|(k, v)| (v.clone(), k.clone())).collect()
    }
}

/// Renames every variable to `<prefix><k>`, numbering by first occurrence.
///
/// Panics if `prefix` is empty or contains whitespace or quotes.
pub fn standardize_variables(form: &ClausalForm, prefix: &str) -> (ClausalForm, RenamingTable) {
    assert!(
        VariableId::new(prefix).is_ok(),
        "variable prefix must be a non-empty token, got {prefix:?}"
    );
    let map: BTreeMap<VariableId, VariableId> = form
        .variables_in_order()
        .into_iter()
        .enumerate()
        .map(|(k, v)| (v, VariableId::new(format!("{prefix}{k}")).expect("valid prefix")))
        .collect();
    let renamed = ClausalForm::new(form.clauses().iter().map(|c| c.map_variables(|v| map[v].clone())));
    let renamed = match form.doc_id() {
        Some(id) => renamed.with_doc_id(id),
        None => renamed,
    };
    (
        renamed,
        RenamingTable {
            prefix: prefix.to_string(),
            map,
        },
    )
}

/// Drops `b REF x` when some concept, role or comparison clause labelled `b`
/// mentions `x`.
pub fn remove_redundant_refs(form: &ClausalForm) -> ClausalForm {
    let licensed: HashSet<(&VariableId, &VariableId)> = form
        .clauses()
        .iter()
        .filter(|c| c.tag().is_basic_condition())
        .flat_map(|c| {
            c.args()
                .iter()
                .filter_map(Term::as_var)
                .map(move |v| (c.box_var(), v))
        })
        .collect();
    let redundant: HashSet<usize> = form
        .clauses()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.tag() == &ClauseTag::Operator(Operator::Ref))
        .filter(|(_, c)| {
            c.args()[0]
                .as_var()
                .is_some_and(|x| licensed.contains(&(c.box_var(), x)))
        })
        .map(|(i, _)| i)
        .collect();
    let mut index = 0;
    form.retain(|_| {
        let keep = !redundant.contains(&index);
        index += 1;
        keep
    })
}

/// Applies the REF policy used before matching.
pub fn prepare_for_matching(form: &ClausalForm, keep_refs: bool) -> ClausalForm {
    if keep_refs {
        form.clone()
    } else {
        remove_redundant_refs(form)
    }
}
