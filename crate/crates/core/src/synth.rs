//! Random clausal forms and perturbed pairs for property tests, oracle
//! cross-checks and restart sweeps.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::clause::{classify_clause, Clause};
use crate::form::ClausalForm;

const CONCEPTS: [&str; 6] = ["dog", "cat", "man", "see", "eat", "time"];
const SENSES: [&str; 3] = ["n.01", "n.02", "v.01"];
const ROLES: [&str; 4] = ["Agent", "Patient", "Theme", "Time"];
const BOX_OPS: [&str; 3] = ["NOT", "POS", "NEC"];
const COMPARISONS: [&str; 3] = ["EQU", "TPR", "APX"];
const CONSTANTS: [&str; 2] = ["\"now\"", "\"speaker\""];

/// Size limits of generated forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub max_boxes: usize,
    pub max_referents: usize,
    pub max_clauses: usize,
    /// Chance that a box also appears as a PRP referent, making it dual-kind.
    pub dual_prob: f64,
}

impl Default for SynthParams {
    /// At most 6 variables and 12 clauses: small enough for brute force.
    fn default() -> Self {
        SynthParams {
            max_boxes: 3,
            max_referents: 3,
            max_clauses: 12,
            dual_prob: 0.1,
        }
    }
}

impl SynthParams {
    /// Larger forms on which restarts make a visible difference.
    pub fn sweep() -> Self {
        SynthParams {
            max_boxes: 6,
            max_referents: 12,
            max_clauses: 40,
            dual_prob: 0.05,
        }
    }
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn term(rng: &mut impl Rng, referents: &[String]) -> String {
    if rng.random_bool(0.15) {
        CONSTANTS.choose(rng).unwrap().to_string()
    } else {
        referents.choose(rng).unwrap().clone()
    }
}

fn random_clause(rng: &mut impl Rng, boxes: &[String], referents: &[String]) -> Clause {
    let b = boxes.choose(rng).unwrap().clone();
    let tokens: Vec<String> = match rng.random_range(0..10) {
        0..=2 => vec![b, "REF".into(), referents.choose(rng).unwrap().clone()],
        3..=4 => vec![
            b,
            CONCEPTS.choose(rng).unwrap().to_string(),
            SENSES.choose(rng).unwrap().to_string(),
            referents.choose(rng).unwrap().clone(),
        ],
        5..=6 => vec![
            b,
            ROLES.choose(rng).unwrap().to_string(),
            referents.choose(rng).unwrap().clone(),
            term(rng, referents),
        ],
        7 => vec![b, BOX_OPS.choose(rng).unwrap().to_string(), boxes.choose(rng).unwrap().clone()],
        8 => vec![
            b,
            COMPARISONS.choose(rng).unwrap().to_string(),
            referents.choose(rng).unwrap().clone(),
            term(rng, referents),
        ],
        _ => vec![
            b,
            "CONTINUATION".into(),
            boxes.choose(rng).unwrap().clone(),
            boxes.choose(rng).unwrap().clone(),
        ],
    };
    classify_clause(&tokens).expect("generated clauses are well-formed")
}

fn build(
    rng: &mut impl Rng,
    params: &SynthParams,
    boxes: &[String],
    referents: &[String],
    count: usize,
) -> Vec<Clause> {
    let mut clauses: Vec<Clause> = (0..count).map(|_| random_clause(rng, boxes, referents)).collect();
    if boxes.len() > 1 && !clauses.is_empty() && rng.random_bool(params.dual_prob) {
        let tokens = [boxes[0].as_str(), "PRP", boxes[1].as_str()];
        let at = rng.random_range(0..clauses.len());
        clauses[at] = classify_clause(&tokens).expect("PRP clause");
    }
    clauses
}

/// A random form using variables `b1..` and `x1..`.
pub fn random_form(rng: &mut impl Rng, params: &SynthParams) -> ClausalForm {
    let boxes = names("b", rng.random_range(1..=params.max_boxes.max(1)));
    let referents = names("x", rng.random_range(1..=params.max_referents.max(1)));
    let count = rng.random_range(1..=params.max_clauses.max(1));
    ClausalForm::new(build(rng, params, &boxes, &referents, count))
}

/// A renamed and perturbed copy of `a` (variables `k1..`, `y1..`): clauses
/// are shuffled, some dropped or relabelled, and a few random ones added,
/// staying within `params`.
pub fn perturb(rng: &mut impl Rng, a: &ClausalForm, params: &SynthParams) -> ClausalForm {
    // A box that only occurs under PRP counts as a referent, so size both
    // pools for every variable.
    let total = params.max_boxes.max(1) + params.max_referents.max(1);
    let mut box_names = names("k", total);
    let mut ref_names = names("y", total);
    box_names.shuffle(rng);
    ref_names.shuffle(rng);
    let (mut next_box, mut next_ref) = (0, 0);
    let mut renaming = std::collections::HashMap::new();
    for v in a.variables_in_order() {
        let is_box = a.kind_of(&v).is_some_and(|k| k != crate::clause::VariableKind::Referent);
        let name = if is_box {
            next_box += 1;
            box_names[next_box - 1].clone()
        } else {
            next_ref += 1;
            ref_names[next_ref - 1].clone()
        };
        renaming.insert(v, crate::clause::VariableId::new(name).expect("valid name"));
    }
    let mut clauses: Vec<Clause> = Vec::new();
    for clause in a.clauses() {
        if rng.random_bool(0.2) {
            continue;
        }
        let renamed = clause.map_variables(|v| renaming[v].clone());
        if rng.random_bool(0.15) {
            let mut tokens = renamed.tokens();
            match tokens.len() {
                4 if SENSES.contains(&tokens[2].as_str()) => {
                    tokens[2] = SENSES.choose(rng).unwrap().to_string();
                }
                4 if ROLES.contains(&tokens[1].as_str()) => {
                    tokens[1] = ROLES.choose(rng).unwrap().to_string();
                }
                _ => {}
            }
            clauses.push(classify_clause(&tokens).expect("relabelled clause"));
        } else {
            clauses.push(renamed);
        }
    }
    let boxes: Vec<String> = box_names[..next_box.max(1)].to_vec();
    let referents: Vec<String> = ref_names[..next_ref.max(1)].to_vec();
    // Never empty, so that corpus files keep one block per document.
    let extra = rng.random_range(usize::from(clauses.is_empty())..=3);
    let mut added = build(rng, &SynthParams { dual_prob: 0.0, ..*params }, &boxes, &referents, extra);
    clauses.append(&mut added);
    clauses.shuffle(rng);
    clauses.truncate(params.max_clauses.max(1));
    ClausalForm::new(clauses)
}

/// A form and a perturbed, renamed copy of it.
pub fn random_pair(rng: &mut impl Rng, params: &SynthParams) -> (ClausalForm, ClausalForm) {
    let a = random_form(rng, params);
    let b = perturb(rng, &a, params);
    (a, b)
}
