//! Integer-indexed view of a pair of forms shared by the matcher and the
//! exact search.
//!
//! A *candidate* is a pair (source clause, target clause) that can be made
//! identical by some kind-respecting injective mapping; it records the
//! variable pairs that mapping must contain. A mapping matches exactly the
//! candidates whose required pairs it contains, and every source clause has
//! at most one such candidate because target clauses are distinct.

use std::collections::HashMap;

use crate::clause::{ClauseTag, Term, VariableId, VariableKind};
use crate::form::ClausalForm;
use crate::matcher::VariableOrder;

pub(crate) type Var = u32;

#[derive(Debug)]
pub(crate) struct Side {
    pub names: Vec<VariableId>,
    pub kinds: Vec<VariableKind>,
    pub index: HashMap<VariableId, Var>,
}

impl Side {
    fn new(form: &ClausalForm, order: VariableOrder) -> Side {
        let names = match order {
            VariableOrder::FirstOccurrence => form.variables_in_order(),
            VariableOrder::Lexicographic => form.kinds().keys().cloned().collect(),
        };
        let kinds = names
            .iter()
            .map(|n| form.kind_of(n).expect("kind table covers every variable"))
            .collect();
        let index = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i as Var))
            .collect();
        Side { names, kinds, index }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }
}

#[derive(Debug)]
pub(crate) struct Candidate {
    pub required: Vec<(Var, Var)>,
}

#[derive(Debug)]
pub(crate) struct Problem {
    pub src: Side,
    pub tgt: Side,
    pub candidates: Vec<Candidate>,
    /// Candidate ids requiring a given (source, target) pair.
    pub by_pair: HashMap<(Var, Var), Vec<usize>>,
    /// Targets paired with each source in at least one candidate, ascending.
    pub src_targets: Vec<Vec<Var>>,
    /// Distinct source variables of each source clause.
    pub clause_vars: Vec<Vec<Var>>,
    /// Candidate ids per source clause.
    pub clause_candidates: Vec<Vec<usize>>,
}

/// Value at one argument position, with variables replaced by indices.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot<'a> {
    Var(Var),
    Const(&'a str),
}

fn encode<'a>(
    form: &'a ClausalForm,
    side: &Side,
) -> Vec<(&'a ClauseTag, Vec<Slot<'a>>)> {
    form.clauses()
        .iter()
        .map(|c| {
            let mut slots = vec![Slot::Var(side.index[c.box_var()])];
            slots.extend(c.args().iter().map(|t| match t {
                Term::Var(v) => Slot::Var(side.index[v]),
                Term::Const(s) => Slot::Const(s.as_str()),
            }));
            (c.tag(), slots)
        })
        .collect()
}

impl Problem {
    pub fn new(a: &ClausalForm, b: &ClausalForm, order: VariableOrder) -> Problem {
        let src = Side::new(a, order);
        let tgt = Side::new(b, order);
        let a_enc = encode(a, &src);
        let b_enc = encode(b, &tgt);

        let mut by_tag: HashMap<(&ClauseTag, usize), Vec<usize>> = HashMap::new();
        for (j, (tag, slots)) in b_enc.iter().enumerate() {
            by_tag.entry((*tag, slots.len())).or_default().push(j);
        }

        let mut candidates = Vec::new();
        let mut clause_vars = Vec::with_capacity(a_enc.len());
        let mut clause_candidates = vec![Vec::new(); a_enc.len()];
        for (i, (tag, slots)) in a_enc.iter().enumerate() {
            let mut vars: Vec<Var> = slots
                .iter()
                .filter_map(|s| match s {
                    Slot::Var(v) => Some(*v),
                    Slot::Const(_) => None,
                })
                .collect();
            vars.sort_unstable();
            vars.dedup();
            clause_vars.push(vars);

            let Some(targets) = by_tag.get(&(*tag, slots.len())) else {
                continue;
            };
            'target: for &j in targets {
                let mut required: Vec<(Var, Var)> = Vec::with_capacity(3);
                for (s, t) in slots.iter().zip(&b_enc[j].1) {
                    match (s, t) {
                        (Slot::Const(x), Slot::Const(y)) if x == y => {}
                        (Slot::Var(x), Slot::Var(y)) => {
                            if src.kinds[*x as usize] != tgt.kinds[*y as usize] {
                                continue 'target;
                            }
                            // The same variable must pair consistently in both directions.
                            for &(px, py) in &required {
                                if (px == *x) != (py == *y) {
                                    continue 'target;
                                }
                            }
                            if !required.contains(&(*x, *y)) {
                                required.push((*x, *y));
                            }
                        }
                        _ => continue 'target,
                    }
                }
                clause_candidates[i].push(candidates.len());
                candidates.push(Candidate {
                    required,
                });
            }
        }

        let mut by_pair: HashMap<(Var, Var), Vec<usize>> = HashMap::new();
        for (id, cand) in candidates.iter().enumerate() {
            for &pair in &cand.required {
                by_pair.entry(pair).or_default().push(id);
            }
        }
        let mut src_targets = vec![Vec::new(); src.len()];
        for &(s, t) in by_pair.keys() {
            src_targets[s as usize].push(t);
        }
        for targets in &mut src_targets {
            targets.sort_unstable();
        }

        Problem {
            src,
            tgt,
            candidates,
            by_pair,
            src_targets,
            clause_vars,
            clause_candidates,
        }
    }

    pub fn compatible(&self, s: Var, t: Var) -> bool {
        self.src.kinds[s as usize] == self.tgt.kinds[t as usize]
    }

    pub fn satisfied(&self, cand: usize, fwd: &[Option<Var>]) -> bool {
        self.candidates[cand]
            .required
            .iter()
            .all(|&(s, t)| fwd[s as usize] == Some(t))
    }

    /// Matched-clause count of a full assignment, recomputed from scratch.
    pub fn count(&self, fwd: &[Option<Var>]) -> usize {
        (0..self.candidates.len())
            .filter(|&c| self.satisfied(c, fwd))
            .count()
    }

    pub fn pairs(&self, s: Var, t: Var) -> &[usize] {
        self.by_pair.get(&(s, t)).map_or(&[], Vec::as_slice)
    }
}
