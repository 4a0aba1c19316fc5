//! Rule-based conversion of AMR graphs into DRS clausal forms.
//!
//! Every node becomes a referent with a REF clause and a concept clause in
//! its own box; every edge becomes a role clause in the box of its source.
//! The first verb node (concept shaped `lemma-NN`) lives in the main box
//! `b0` and receives a past-tense block: a time referent with `time.n.08`,
//! `TPR ... "now"`, and a `Time` role from the verb.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use super::penman::{AmrGraph, AmrTarget};
use crate::clause::{is_valid_sense, Clause, ClauseTag, Operator, Term, VariableId};
use crate::form::ClausalForm;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DictionaryError {
    #[error("dictionary line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// Relation and concept rewrite rules plus default senses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConversionDictionary {
    /// AMR relation (no colon) to role name.
    pub relations: BTreeMap<String, String>,
    /// AMR concept to (lemma, sense).
    pub concepts: BTreeMap<String, (String, String)>,
    pub noun_sense: String,
    pub verb_sense: String,
}

impl Default for ConversionDictionary {
    fn default() -> Self {
        let relations = [("ARG0", "Agent"), ("ARG1", "Patient"), ("ARG2", "Theme")]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        let concepts = [
            ("she", "female", "n.02"),
            ("he", "male", "n.02"),
            ("it", "thing", "n.12"),
            ("they", "person", "n.01"),
        ]
        .into_iter()
        .map(|(k, l, s)| (k.to_string(), (l.to_string(), s.to_string())))
        .collect();
        ConversionDictionary {
            relations,
            concepts,
            noun_sense: "n.01".into(),
            verb_sense: "v.01".into(),
        }
    }
}

fn is_role_name(s: &str) -> bool {
    s.chars().next().is_some_and(char::is_uppercase)
        && s.chars().any(char::is_lowercase)
        && !s.chars().any(|c| c.is_whitespace() || c == '"')
}

/// Splits `female.n.02` into (`female`, `n.02`).
fn split_synset(s: &str) -> Option<(String, String)> {
    let (lemma, pos_num) = s.rsplit_once('.')?;
    let (lemma, pos) = lemma.rsplit_once('.')?;
    let sense = format!("{pos}.{pos_num}");
    (!lemma.is_empty() && is_valid_sense(&sense) && !lemma.contains(['"', ' ', '\t']))
        .then(|| (lemma.to_string(), sense))
}

impl ConversionDictionary {
    /// Adds rules from `kind<TAB>source<TAB>target` lines (kinds `rel` and
    /// `concept`), overriding existing entries. `#` lines are comments.
    pub fn extend_from_tsv(&mut self, text: &str) -> Result<(), DictionaryError> {
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let malformed = |message: String| DictionaryError::Malformed { line, message };
            if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = raw.split('\t').map(str::trim).collect();
            let [kind, source, target] = fields[..] else {
                return Err(malformed(format!("expected 3 tab-separated fields, found {}", fields.len())));
            };
            match kind {
                "rel" => {
                    if !is_role_name(target) {
                        return Err(malformed(format!("`{target}` is not a role name")));
                    }
                    self.relations
                        .insert(source.trim_start_matches(':').to_string(), target.to_string());
                }
                "concept" => {
                    let synset = split_synset(target)
                        .ok_or_else(|| malformed(format!("`{target}` is not lemma.p.NN")))?;
                    self.concepts.insert(source.to_string(), synset);
                }
                other => return Err(malformed(format!("unknown kind `{other}`"))),
            }
        }
        Ok(())
    }

    pub fn from_tsv(text: &str) -> Result<Self, DictionaryError> {
        let mut dict = ConversionDictionary {
            relations: BTreeMap::new(),
            concepts: BTreeMap::new(),
            ..Default::default()
        };
        dict.extend_from_tsv(text)?;
        Ok(dict)
    }

    fn role_for(&self, relation: &str) -> Option<String> {
        if let Some(role) = self.relations.get(relation) {
            return Some(role.clone());
        }
        if relation.starts_with("ARG") {
            return None;
        }
        let mut chars = relation.chars();
        let first = chars.next()?;
        let role: String = first.to_uppercase().chain(chars).collect();
        is_role_name(&role).then_some(role)
    }

    fn concept_for(&self, concept: &str) -> (String, String) {
        if let Some(synset) = self.concepts.get(concept) {
            return synset.clone();
        }
        match verb_lemma(concept) {
            Some(lemma) => (lemma.to_string(), self.verb_sense.clone()),
            None => (concept.to_string(), self.noun_sense.clone()),
        }
    }
}

/// `remove-01` -> `remove`.
fn verb_lemma(concept: &str) -> Option<&str> {
    let (lemma, num) = concept.rsplit_once('-')?;
    (!lemma.is_empty() && !num.is_empty() && num.bytes().all(|b| b.is_ascii_digit())).then_some(lemma)
}

/// What to do with a relation the dictionary cannot map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnmappedPolicy {
    /// Drop the edge and record a warning.
    #[default]
    Skip,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConvertError {
    #[error("no role for relation :{relation}")]
    UnmappedRelation { relation: String },
    #[error("cannot build clause: {0}")]
    InvalidClause(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conversion {
    pub form: ClausalForm,
    pub warnings: Vec<String>,
}

fn var(name: String) -> VariableId {
    VariableId::new(name).expect("generated names are valid")
}

pub fn amr_to_drs(
    graph: &AmrGraph,
    dict: &ConversionDictionary,
    policy: UnmappedPolicy,
) -> Result<Conversion, ConvertError> {
    let n = graph.nodes.len();
    let first_verb = graph.nodes.iter().position(|node| verb_lemma(&node.concept).is_some());

    let mut referent = HashMap::new();
    let mut label = HashMap::new();
    let mut next_box = 1;
    for (i, node) in graph.nodes.iter().enumerate() {
        referent.insert(node.id.as_str(), var(format!("x{}", i + 1)));
        let b = if Some(i) == first_verb {
            0
        } else {
            next_box += 1;
            next_box - 1
        };
        label.insert(node.id.as_str(), var(format!("b{b}")));
    }
    let time_ref = var(format!("x{}", n + 1));
    let time_box = var(format!("b{next_box}"));

    let mut clauses = Vec::new();
    let mut warnings = Vec::new();
    let build = |b: &VariableId, tag: ClauseTag, args: Vec<Term>| {
        Clause::new(b.clone(), tag, args).map_err(|e| ConvertError::InvalidClause(e.to_string()))
    };

    let emit_node = |i: usize, clauses: &mut Vec<Clause>| -> Result<(), ConvertError> {
        let node = &graph.nodes[i];
        let (b, x) = (&label[node.id.as_str()], &referent[node.id.as_str()]);
        let (lemma, sense) = dict.concept_for(&node.concept);
        clauses.push(build(b, ClauseTag::Operator(Operator::Ref), vec![Term::Var(x.clone())])?);
        clauses.push(build(b, ClauseTag::Concept { lemma, sense }, vec![Term::Var(x.clone())])?);
        if Some(i) == first_verb {
            let t = Term::Var(time_ref.clone());
            clauses.push(build(&time_box, ClauseTag::Operator(Operator::Ref), vec![t.clone()])?);
            clauses.push(build(
                &time_box,
                ClauseTag::Operator(Operator::Tpr),
                vec![t.clone(), Term::Const("now".into())],
            )?);
            clauses.push(build(
                &time_box,
                ClauseTag::Concept {
                    lemma: "time".into(),
                    sense: "n.08".into(),
                },
                vec![t.clone()],
            )?);
            clauses.push(build(b, ClauseTag::Role("Time".into()), vec![Term::Var(x.clone()), t])?);
        }
        Ok(())
    };

    let introduced: HashMap<usize, usize> = graph
        .nodes
        .iter()
        .enumerate()
        .filter_map(|(i, node)| node.introduced_by.map(|e| (e, i)))
        .collect();
    for (i, node) in graph.nodes.iter().enumerate() {
        if node.introduced_by.is_none() {
            emit_node(i, &mut clauses)?;
        }
    }
    for (e, edge) in graph.edges.iter().enumerate() {
        match dict.role_for(&edge.relation) {
            Some(role) => {
                let target = match &edge.target {
                    AmrTarget::Node(id) => Term::Var(referent[id.as_str()].clone()),
                    AmrTarget::Const(c) => Term::Const(c.clone()),
                };
                clauses.push(build(
                    &label[edge.source.as_str()],
                    ClauseTag::Role(role),
                    vec![Term::Var(referent[edge.source.as_str()].clone()), target],
                )?);
            }
            None if policy == UnmappedPolicy::Fail => {
                return Err(ConvertError::UnmappedRelation {
                    relation: edge.relation.clone(),
                })
            }
            None => warnings.push(format!("skipped unmapped relation :{}", edge.relation)),
        }
        if let Some(&i) = introduced.get(&e) {
            emit_node(i, &mut clauses)?;
        }
    }

    Ok(Conversion {
        form: ClausalForm::new(clauses),
        warnings,
    })
}
