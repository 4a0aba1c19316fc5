use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;

use crate::clause::{is_valid_sense, Clause, ClauseTag, Operator, Slot, Term, VariableId, VariableKind};

/// A document's DRS as a set of clauses, kept in document order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClausalForm {
    clauses: Vec<Clause>,
    kinds: BTreeMap<VariableId, VariableKind>,
    doc_id: Option<String>,
    collapsed_duplicates: usize,
}

impl ClausalForm {
    /// Collapses duplicate clauses (first occurrence wins) and infers variable kinds.
    pub fn new(clauses: impl IntoIterator<Item = Clause>) -> Self {
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        let mut collapsed = 0;
        for clause in clauses {
            if seen.insert(clause.clone()) {
                kept.push(clause);
            } else {
                collapsed += 1;
            }
        }
        let kinds = infer_variable_kinds(&kept);
        ClausalForm {
            clauses: kept,
            kinds,
            doc_id: None,
            collapsed_duplicates: collapsed,
        }
    }

    pub fn with_doc_id(mut self, doc_id: impl Into<String>) -> Self {
        self.doc_id = Some(doc_id.into());
        self
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn kinds(&self) -> &BTreeMap<VariableId, VariableKind> {
        &self.kinds
    }

    pub fn kind_of(&self, var: &VariableId) -> Option<VariableKind> {
        self.kinds.get(var).copied()
    }

    pub fn doc_id(&self) -> Option<&str> {
        self.doc_id.as_deref()
    }

    /// Number of duplicate clauses dropped at construction.
    pub fn collapsed_duplicates(&self) -> usize {
        self.collapsed_duplicates
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn contains(&self, clause: &Clause) -> bool {
        self.clauses.contains(clause)
    }

    /// Distinct variables in order of first occurrence (clause order, then
    /// left to right within a clause).
    pub fn variables_in_order(&self) -> Vec<VariableId> {
        let mut seen = HashSet::new();
        self.clauses
            .iter()
            .flat_map(Clause::variables)
            .filter(|v| seen.insert(*v))
            .cloned()
            .collect()
    }

    /// Keeps the clauses for which `keep` holds; kinds are re-inferred.
    pub fn retain(&self, mut keep: impl FnMut(&Clause) -> bool) -> ClausalForm {
        let mut out = ClausalForm::new(self.clauses.iter().filter(|c| keep(c)).cloned());
        out.doc_id = self.doc_id.clone();
        out.collapsed_duplicates = self.collapsed_duplicates;
        out
    }
}

impl fmt::Display for ClausalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for clause in &self.clauses {
            writeln!(f, "{clause}")?;
        }
        Ok(())
    }
}

/// Derives each variable's kind from the slots it occupies.
pub fn infer_variable_kinds(clauses: &[Clause]) -> BTreeMap<VariableId, VariableKind> {
    let mut kinds: BTreeMap<VariableId, VariableKind> = BTreeMap::new();
    for clause in clauses {
        for (var, slot) in clause.variable_slots() {
            let kind = slot.kind();
            kinds
                .entry(var.clone())
                .and_modify(|k| *k = k.join(kind))
                .or_insert(kind);
        }
    }
    kinds
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    UndeclaredReferent { var: VariableId },
    UnusedBox { var: VariableId },
    DuplicateClauses { count: usize },
    MalformedSense { sense: String, clause: String },
}

impl Violation {
    pub fn severity(&self) -> Severity {
        match self {
            Violation::UndeclaredReferent { .. } | Violation::MalformedSense { .. } => Severity::Error,
            Violation::UnusedBox { .. } | Violation::DuplicateClauses { .. } => Severity::Warning,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UndeclaredReferent { var } => write!(f, "undeclared referent {var}"),
            Violation::UnusedBox { var } => write!(f, "box {var} never labels a clause"),
            Violation::DuplicateClauses { count } => write!(f, "{count} duplicate clause(s) collapsed"),
            Violation::MalformedSense { sense, clause } => {
                write!(f, "malformed sense {sense} in `{clause}`")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    /// No error-level violations (warnings allowed).
    pub fn is_valid(&self) -> bool {
        self.violations.iter().all(|v| v.severity() == Severity::Warning)
    }
}

/// Structural checks on a parsed form. Never fails; an empty report means valid.
pub fn validate_form(form: &ClausalForm) -> ValidationReport {
    let mut violations = Vec::new();

    let declared: HashSet<&VariableId> = form
        .clauses()
        .iter()
        .filter(|c| c.tag() == &ClauseTag::Operator(Operator::Ref))
        .filter_map(|c| c.args()[0].as_var())
        .collect();
    let mut undeclared = BTreeSet::new();
    let mut labels = HashSet::new();
    let mut box_args = BTreeSet::new();
    for clause in form.clauses() {
        labels.insert(clause.box_var());
        if clause.tag().is_basic_condition() {
            for var in clause.args().iter().filter_map(Term::as_var) {
                if !declared.contains(var) {
                    undeclared.insert(var.clone());
                }
            }
        }
        for (var, slot) in clause.variable_slots().skip(1) {
            if slot == Slot::Box {
                box_args.insert(var.clone());
            }
        }
        if let ClauseTag::Concept { sense, .. } = clause.tag() {
            if !is_valid_sense(sense) {
                violations.push(Violation::MalformedSense {
                    sense: sense.clone(),
                    clause: clause.to_string(),
                });
            }
        }
    }
    violations.extend(
        undeclared
            .into_iter()
            .map(|var| Violation::UndeclaredReferent { var }),
    );
    violations.extend(
        box_args
            .into_iter()
            .filter(|v| !labels.contains(v))
            .map(|var| Violation::UnusedBox { var }),
    );
    if form.collapsed_duplicates() > 0 {
        violations.push(Violation::DuplicateClauses {
            count: form.collapsed_duplicates(),
        });
    }
    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clause::classify_clause;

    fn form(lines: &[&str]) -> ClausalForm {
        ClausalForm::new(lines.iter().map(|l| {
            let toks: Vec<&str> = l.split_whitespace().collect();
            classify_clause(&toks).unwrap()
        }))
    }

    fn v(s: &str) -> VariableId {
        VariableId::new(s).unwrap()
    }

    const NO_ONE_CAN_RESIST: &[&str] = &[
        "k0 NOT b2",
        "b2 REF x1",
        "b2 person n.01 x1",
        "b2 POS b3",
        "b3 Agent e1 x1",
        "b3 REF e1",
        "b3 resist v.02 e1",
    ];

    #[test]
    fn kinds_of_negated_modal_form() {
        let f = form(NO_ONE_CAN_RESIST);
        let expected: BTreeMap<_, _> = [
            (v("k0"), VariableKind::Box),
            (v("b2"), VariableKind::Box),
            (v("b3"), VariableKind::Box),
            (v("x1"), VariableKind::Referent),
            (v("e1"), VariableKind::Referent),
        ]
        .into_iter()
        .collect();
        assert_eq!(f.kinds(), &expected);
    }

    #[test]
    fn proposition_referent_is_dual() {
        let f = form(&["b1 PRP x6", "x6 DRS b9"]);
        assert_eq!(f.kind_of(&v("x6")), Some(VariableKind::Dual));
        assert_eq!(f.kind_of(&v("b9")), Some(VariableKind::Box));
        assert_eq!(f.kind_of(&v("b1")), Some(VariableKind::Box));
    }

    #[test]
    fn empty_form_has_no_kinds() {
        assert!(infer_variable_kinds(&[]).is_empty());
    }

    #[test]
    fn kind_inference_is_order_independent() {
        let mut clauses: Vec<Clause> = form(NO_ONE_CAN_RESIST).clauses().to_vec();
        let forward = infer_variable_kinds(&clauses);
        clauses.reverse();
        assert_eq!(forward, infer_variable_kinds(&clauses));
    }

    #[test]
    fn duplicates_collapse() {
        let f = form(&["b1 REF x1", "b1 REF x1", "b1 male n.02 x1"]);
        assert_eq!(f.len(), 2);
        assert_eq!(f.collapsed_duplicates(), 1);
        let report = validate_form(&f);
        assert_eq!(report.violations, vec![Violation::DuplicateClauses { count: 1 }]);
        assert!(report.is_valid());
    }

    #[test]
    fn implication_form_is_valid() {
        let f = form(&[
            "k0 IMP b2 b3",
            "b2 REF x1",
            "b2 thing n.12 x1",
            "b3 REF s1",
            "b3 Theme s1 x1",
            "b3 new a.01 s1",
            "b3 Time s1 t1",
            "b4 REF t1",
            "b4 time n.08 t1",
            "b4 EQU t1 \"now\"",
        ]);
        assert_eq!(f.len(), 10);
        assert!(validate_form(&f).is_empty());
    }

    #[test]
    fn undeclared_referent() {
        let report = validate_form(&form(&["k0 Agent e1 x1"]));
        assert!(report
            .violations
            .contains(&Violation::UndeclaredReferent { var: v("x1") }));
        assert!(report.violations.iter().any(|x| x.to_string() == "undeclared referent x1"));
        assert!(!report.is_valid());
    }

    #[test]
    fn malformed_sense() {
        let report = validate_form(&form(&["b2 REF e3", "b2 hurt v.2 e3"]));
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].to_string().starts_with("malformed sense v.2"));
    }

    #[test]
    fn box_argument_that_labels_nothing() {
        let report = validate_form(&form(&["k0 NOT b2"]));
        assert_eq!(report.violations, vec![Violation::UnusedBox { var: v("b2") }]);
        assert!(report.is_valid());
    }
}
