//! Approximate maximal matching of two clausal forms by hill-climbing over
//! partial one-to-one variable mappings, restarted from smart and random seeds.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clause::{ClauseTag, Term, VariableId, VariableKind};
use crate::form::ClausalForm;
use crate::io::serialize_form;
use crate::metrics::prf;
use crate::normalize::{prepare_for_matching, standardize_variables};
use crate::problem::{Problem, Var};

/// How a restart's initial mapping is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedKind {
    /// Pair variables of concept clauses with equal lemma and sense.
    Concept,
    /// Pair variables of role clauses with equal role name.
    Role,
    /// Random kind-respecting injective assignment.
    Random,
}

/// Order in which variables are indexed; fixes move enumeration and tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariableOrder {
    /// First occurrence in document order. Invariant under renaming.
    #[default]
    FirstOccurrence,
    /// Sorted by variable name.
    Lexicographic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchConfig {
    /// Number of hill-climbing runs; 0 is treated as 1.
    pub restarts: usize,
    pub rng_seed: u64,
    /// Seeds for the first restarts; later restarts are random.
    pub seed_schedule: Vec<SeedKind>,
    pub keep_refs: bool,
    pub node_order: VariableOrder,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            restarts: 20,
            rng_seed: 42,
            seed_schedule: vec![SeedKind::Concept, SeedKind::Role],
            keep_refs: false,
            node_order: VariableOrder::FirstOccurrence,
        }
    }
}

impl MatchConfig {
    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_keep_refs(mut self, keep_refs: bool) -> Self {
        self.keep_refs = keep_refs;
        self
    }

    pub fn with_seed(mut self, rng_seed: u64) -> Self {
        self.rng_seed = rng_seed;
        self
    }

    pub fn with_schedule(mut self, schedule: Vec<SeedKind>) -> Self {
        self.seed_schedule = schedule;
        self
    }

    pub fn seed_for(&self, restart: usize) -> SeedKind {
        self.seed_schedule
            .get(restart)
            .copied()
            .unwrap_or(SeedKind::Random)
    }

    /// Random stream for one restart; independent of the total restart count.
    pub fn restart_rng(&self, restart: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        rng.set_stream(restart as u64);
        rng
    }
}

/// Partial map from source variables to target variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VariableMapping(BTreeMap<VariableId, VariableId>);

impl VariableMapping {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, from: VariableId, to: VariableId) -> Option<VariableId> {
        self.0.insert(from, to)
    }

    pub fn get(&self, from: &VariableId) -> Option<&VariableId> {
        self.0.get(from)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VariableId, &VariableId)> {
        self.0.iter()
    }

    pub fn inverse(&self) -> VariableMapping {
        VariableMapping(self.0.iter().map(|(k, v)| (v.clone(), k.clone())).collect())
    }
}

impl<A: AsRef<str>, B: AsRef<str>> FromIterator<(A, B)> for VariableMapping {
    /// Panics on invalid variable names; intended for literals.
    fn from_iter<I: IntoIterator<Item = (A, B)>>(iter: I) -> Self {
        VariableMapping(
            iter.into_iter()
                .map(|(a, b)| {
                    (
                        VariableId::new(a.as_ref()).expect("valid variable name"),
                        VariableId::new(b.as_ref()).expect("valid variable name"),
                    )
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestartTrace {
    pub seed: SeedKind,
    pub matched: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub best_mapping: VariableMapping,
    pub matched: usize,
    pub size_sys: usize,
    pub size_gold: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub per_restart: Vec<RestartTrace>,
}

impl MatchResult {
    pub fn new(
        best_mapping: VariableMapping,
        matched: usize,
        size_sys: usize,
        size_gold: usize,
        per_restart: Vec<RestartTrace>,
    ) -> Self {
        let scores = prf(matched, size_sys, size_gold).expect("matched count bounded by form sizes");
        MatchResult {
            best_mapping,
            matched,
            size_sys,
            size_gold,
            precision: scores.precision,
            recall: scores.recall,
            f1: scores.f1,
            per_restart,
        }
    }

    /// Both forms fully matched (also true for two empty forms).
    pub fn is_perfect(&self) -> bool {
        self.matched == self.size_sys && self.matched == self.size_gold
    }

    /// Same scores with system and gold exchanged.
    pub fn swapped(self) -> MatchResult {
        MatchResult::new(
            self.best_mapping.inverse(),
            self.matched,
            self.size_gold,
            self.size_sys,
            self.per_restart,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchError {
    #[error("invalid mapping: {0}")]
    InvalidMapping(String),
}

/// Index-level mapping with its reverse for O(1) freeness checks.
#[derive(Debug, Clone)]
pub(crate) struct Assignment {
    pub fwd: Vec<Option<Var>>,
    pub rev: Vec<Option<Var>>,
}

impl Assignment {
    pub fn empty(p: &Problem) -> Self {
        Assignment {
            fwd: vec![None; p.src.len()],
            rev: vec![None; p.tgt.len()],
        }
    }

    fn try_pair(&mut self, p: &Problem, s: Var, t: Var) {
        if self.fwd[s as usize].is_none() && self.rev[t as usize].is_none() && p.compatible(s, t) {
            self.fwd[s as usize] = Some(t);
            self.rev[t as usize] = Some(s);
        }
    }

    pub fn to_mapping(&self, p: &Problem) -> VariableMapping {
        VariableMapping(
            self.fwd
                .iter()
                .enumerate()
                .filter_map(|(s, t)| {
                    t.map(|t| (p.src.names[s].clone(), p.tgt.names[t as usize].clone()))
                })
                .collect(),
        )
    }

    pub fn from_mapping(p: &Problem, mapping: &VariableMapping) -> Result<Self, MatchError> {
        let mut out = Assignment::empty(p);
        for (from, to) in mapping.iter() {
            let s = *p
                .src
                .index
                .get(from)
                .ok_or_else(|| MatchError::InvalidMapping(format!("{from} is not a source variable")))?;
            let t = *p
                .tgt
                .index
                .get(to)
                .ok_or_else(|| MatchError::InvalidMapping(format!("{to} is not a target variable")))?;
            if !p.compatible(s, t) {
                return Err(MatchError::InvalidMapping(format!(
                    "{from} ({:?}) cannot map to {to} ({:?})",
                    p.src.kinds[s as usize], p.tgt.kinds[t as usize]
                )));
            }
            if let Some(prev) = out.rev[t as usize] {
                return Err(MatchError::InvalidMapping(format!(
                    "{} and {from} both map to {to}",
                    p.src.names[prev as usize]
                )));
            }
            out.fwd[s as usize] = Some(t);
            out.rev[t as usize] = Some(s);
        }
        Ok(out)
    }

    #[cfg(debug_assertions)]
    fn check(&self, p: &Problem) {
        for (s, t) in self.fwd.iter().enumerate() {
            if let Some(t) = t {
                debug_assert_eq!(self.rev[*t as usize], Some(s as Var), "mapping not injective");
                debug_assert!(p.compatible(s as Var, *t), "mapping not kind-respecting");
            }
        }
        for (t, s) in self.rev.iter().enumerate() {
            if let Some(s) = s {
                debug_assert_eq!(self.fwd[*s as usize], Some(t as Var));
            }
        }
    }
}

/// Counts source clauses that become identical to a target clause under `mapping`.
pub fn score_mapping(
    mapping: &VariableMapping,
    a: &ClausalForm,
    b: &ClausalForm,
) -> Result<usize, MatchError> {
    let p = Problem::new(a, b, VariableOrder::FirstOccurrence);
    let assignment = Assignment::from_mapping(&p, mapping)?;
    Ok(p.count(&assignment.fwd))
}

fn seed_assignment(
    p: &Problem,
    a: &ClausalForm,
    b: &ClausalForm,
    kind: SeedKind,
    rng: &mut impl Rng,
) -> Assignment {
    let mut out = Assignment::empty(p);
    match kind {
        SeedKind::Concept | SeedKind::Role => {
            let wanted = |tag: &ClauseTag| match kind {
                SeedKind::Concept => matches!(tag, ClauseTag::Concept { .. }),
                _ => matches!(tag, ClauseTag::Role(_)),
            };
            for ca in a.clauses().iter().filter(|c| wanted(c.tag())) {
                for cb in b.clauses().iter().filter(|c| c.tag() == ca.tag()) {
                    let pairs = std::iter::once((ca.box_var(), cb.box_var())).chain(
                        ca.args()
                            .iter()
                            .zip(cb.args())
                            .filter_map(|(x, y)| match (x, y) {
                                (Term::Var(x), Term::Var(y)) => Some((x, y)),
                                _ => None,
                            }),
                    );
                    for (x, y) in pairs {
                        out.try_pair(p, p.src.index[x], p.tgt.index[y]);
                    }
                }
            }
        }
        SeedKind::Random => {
            for kind in [VariableKind::Box, VariableKind::Referent, VariableKind::Dual] {
                let of_kind = |kinds: &[VariableKind]| -> Vec<Var> {
                    (0..kinds.len() as Var)
                        .filter(|&v| kinds[v as usize] == kind)
                        .collect()
                };
                let mut sources = of_kind(&p.src.kinds);
                let mut targets = of_kind(&p.tgt.kinds);
                sources.shuffle(rng);
                targets.shuffle(rng);
                for (s, t) in sources.into_iter().zip(targets) {
                    out.try_pair(p, s, t);
                }
            }
        }
    }
    out
}

/// Builds the initial mapping for one restart.
pub fn generate_seed(
    kind: SeedKind,
    a: &ClausalForm,
    b: &ClausalForm,
    rng: &mut impl Rng,
) -> VariableMapping {
    let p = Problem::new(a, b, VariableOrder::FirstOccurrence);
    seed_assignment(&p, a, b, kind, rng).to_mapping(&p)
}

#[derive(Debug, Clone, Copy)]
enum Move {
    /// Map an unmapped source to a free target, or move a mapped one there.
    Assign(Var, Var),
    /// Exchange the targets of two mapped sources.
    Swap(Var, Var),
}

/// (source, old target, new target)
type Change = (Var, Option<Var>, Option<Var>);

struct Climber<'p> {
    p: &'p Problem,
    state: Assignment,
    sat: Vec<bool>,
    matched: usize,
    scratch: Vec<usize>,
}

impl<'p> Climber<'p> {
    fn new(p: &'p Problem, state: Assignment) -> Self {
        let sat: Vec<bool> = (0..p.candidates.len())
            .map(|c| p.satisfied(c, &state.fwd))
            .collect();
        let matched = sat.iter().filter(|s| **s).count();
        Climber {
            p,
            state,
            sat,
            matched,
            scratch: Vec::new(),
        }
    }

    fn collect_affected(&mut self, changes: &[Change]) {
        self.scratch.clear();
        for &(s, old, new) in changes {
            for t in [old, new].into_iter().flatten() {
                self.scratch.extend_from_slice(self.p.pairs(s, t));
            }
        }
        self.scratch.sort_unstable();
        self.scratch.dedup();
    }

    fn lookup(&self, changes: &[Change], v: Var) -> Option<Var> {
        changes
            .iter()
            .find(|c| c.0 == v)
            .map_or(self.state.fwd[v as usize], |c| c.2)
    }

    fn sat_under(&self, cand: usize, changes: &[Change]) -> bool {
        self.p.candidates[cand]
            .required
            .iter()
            .all(|&(s, t)| self.lookup(changes, s) == Some(t))
    }

    /// Change in matched count if `changes` were applied.
    fn gain(&mut self, changes: &[Change]) -> isize {
        self.collect_affected(changes);
        let mut delta = 0isize;
        for &c in &self.scratch {
            delta += self.sat_under(c, changes) as isize - self.sat[c] as isize;
        }
        delta
    }

    fn changes(&self, mv: Move) -> ([Change; 2], usize) {
        let fwd = &self.state.fwd;
        match mv {
            Move::Assign(s, t) => ([(s, fwd[s as usize], Some(t)), (0, None, None)], 1),
            Move::Swap(s1, s2) => {
                let (t1, t2) = (fwd[s1 as usize], fwd[s2 as usize]);
                ([(s1, t1, t2), (s2, t2, t1)], 2)
            }
        }
    }

    fn apply(&mut self, mv: Move, gain: isize) {
        let (changes, n) = self.changes(mv);
        let changes = &changes[..n];
        self.collect_affected(changes);
        for &(s, old, _) in changes {
            if let Some(t) = old {
                self.state.rev[t as usize] = None;
            }
            self.state.fwd[s as usize] = None;
        }
        for &(s, _, new) in changes {
            if let Some(t) = new {
                self.state.fwd[s as usize] = Some(t);
                self.state.rev[t as usize] = Some(s);
            }
        }
        let affected = std::mem::take(&mut self.scratch);
        for &c in &affected {
            self.sat[c] = self.p.satisfied(c, &self.state.fwd);
        }
        self.scratch = affected;
        self.matched = (self.matched as isize + gain) as usize;

        #[cfg(debug_assertions)]
        {
            self.state.check(self.p);
            debug_assert_eq!(self.matched, self.p.count(&self.state.fwd), "incremental count drifted");
        }
    }

    /// Steepest ascent until no single change improves the count.
    ///
    /// Moves are enumerated by source index, then target index; the first
    /// move with the largest positive gain wins. Unmapping is never
    /// improving (matching is monotone in the mapping) so it is not scored.
    fn run(mut self) -> (Assignment, usize) {
        let p = self.p;
        let n_src = p.src.len() as Var;
        loop {
            let mut best: Option<(isize, Move)> = None;
            let mut consider = |this: &mut Self, mv: Move| {
                let (changes, n) = this.changes(mv);
                let g = this.gain(&changes[..n]);
                if g > 0 && best.is_none_or(|(bg, _)| g > bg) {
                    best = Some((g, mv));
                }
            };
            for s in 0..n_src {
                let current = self.state.fwd[s as usize];
                for &t in &p.src_targets[s as usize] {
                    if Some(t) != current && self.state.rev[t as usize].is_none() {
                        consider(&mut self, Move::Assign(s, t));
                    }
                }
                let Some(t1) = current else { continue };
                for s2 in s + 1..n_src {
                    let Some(t2) = self.state.fwd[s2 as usize] else { continue };
                    if p.src.kinds[s as usize] != p.src.kinds[s2 as usize] {
                        continue;
                    }
                    if p.pairs(s, t2).is_empty() && p.pairs(s2, t1).is_empty() {
                        continue;
                    }
                    consider(&mut self, Move::Swap(s, s2));
                }
            }
            match best {
                Some((gain, mv)) => self.apply(mv, gain),
                None => return (self.state, self.matched),
            }
        }
    }
}

pub(crate) fn climb(p: &Problem, initial: Assignment) -> (Assignment, usize) {
    Climber::new(p, initial).run()
}

/// Hill-climbs from `initial` to a local optimum.
pub fn hill_climb(
    a: &ClausalForm,
    b: &ClausalForm,
    initial: &VariableMapping,
) -> Result<(VariableMapping, usize), MatchError> {
    let p = Problem::new(a, b, VariableOrder::FirstOccurrence);
    let start = Assignment::from_mapping(&p, initial)?;
    let (end, matched) = climb(&p, start);
    Ok((end.to_mapping(&p), matched))
}

fn orientation_key(form: &ClausalForm) -> (usize, String) {
    (form.len(), serialize_form(&standardize_variables(form, "v").0))
}

fn run_restarts(a: &ClausalForm, b: &ClausalForm, config: &MatchConfig) -> MatchResult {
    let p = Problem::new(a, b, config.node_order);
    let mut best: Option<(Assignment, usize)> = None;
    let mut trace = Vec::with_capacity(config.restarts.max(1));
    for restart in 0..config.restarts.max(1) {
        let seed = config.seed_for(restart);
        let mut rng = config.restart_rng(restart);
        let start = seed_assignment(&p, a, b, seed, &mut rng);
        let (end, matched) = climb(&p, start);
        trace.push(RestartTrace { seed, matched });
        if best.as_ref().is_none_or(|(_, m)| matched > *m) {
            best = Some((end, matched));
        }
    }
    let (assignment, matched) = best.expect("at least one restart");
    MatchResult::new(assignment.to_mapping(&p), matched, a.len(), b.len(), trace)
}

/// Scores `sys` against `gold` with restarts per `config`.
///
/// The search always runs from the form with the smaller canonical key, so
/// swapping the arguments swaps precision and recall and nothing else.
pub fn match_forms(sys: &ClausalForm, gold: &ClausalForm, config: &MatchConfig) -> MatchResult {
    let a = prepare_for_matching(sys, config.keep_refs);
    let b = prepare_for_matching(gold, config.keep_refs);
    if orientation_key(&a) <= orientation_key(&b) {
        run_restarts(&a, &b, config)
    } else {
        run_restarts(&b, &a, config).swapped()
    }
}
