//! Exact maximum matching by depth-first branch-and-bound.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::form::ClausalForm;
use crate::matcher::{Assignment, MatchResult, VariableOrder};
use crate::problem::{Problem, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleLimits {
    /// Search nodes visited before giving up.
    pub max_nodes: u64,
    /// Refuse forms with more variables than this on either side.
    pub max_vars_per_side: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_nodes: 20_000_000,
            max_vars_per_side: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    /// The best mapping found so far is returned but may not be optimal.
    #[error("search budget of {nodes} nodes exceeded")]
    BudgetExceeded { best: Box<MatchResult>, nodes: u64 },
    #[error("{side} form has {vars} variables, limit is {limit}")]
    TooLarge {
        side: &'static str,
        vars: usize,
        limit: usize,
    },
}

struct Search<'p> {
    p: &'p Problem,
    order: Vec<Var>,
    pos: Vec<usize>,
    /// Depth at which each source clause has all its variables decided.
    clause_depth: Vec<usize>,
    /// Clauses completed by the decision at each depth.
    completed_at: Vec<Vec<usize>>,
    state: Assignment,
    best: usize,
    best_fwd: Vec<Option<Var>>,
    nodes: u64,
    max_nodes: u64,
    exhausted: bool,
}

impl<'p> Search<'p> {
    fn new(p: &'p Problem, max_nodes: u64) -> Self {
        let n = p.src.len();
        let mut degree = vec![0usize; n];
        for vars in &p.clause_vars {
            for &v in vars {
                degree[v as usize] += 1;
            }
        }
        let mut order: Vec<Var> = (0..n as Var).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(degree[v as usize]), v));
        let mut pos = vec![0; n];
        for (d, &v) in order.iter().enumerate() {
            pos[v as usize] = d;
        }
        let clause_depth: Vec<usize> = p
            .clause_vars
            .iter()
            .map(|vars| vars.iter().map(|&v| pos[v as usize]).max().unwrap_or(0))
            .collect();
        let mut completed_at = vec![Vec::new(); n.max(1)];
        for (i, &d) in clause_depth.iter().enumerate() {
            completed_at[d].push(i);
        }
        let state = Assignment::empty(p);
        Search {
            p,
            order,
            pos,
            clause_depth,
            completed_at,
            best_fwd: state.fwd.clone(),
            state,
            best: 0,
            nodes: 0,
            max_nodes,
            exhausted: false,
        }
    }

    /// Undecided clauses that some candidate could still satisfy.
    fn bound(&self, depth: usize) -> usize {
        (0..self.clause_depth.len())
            .filter(|&i| self.clause_depth[i] >= depth)
            .filter(|&i| {
                self.p.clause_candidates[i].iter().any(|&c| {
                    self.p.candidates[c].required.iter().all(|&(s, t)| {
                        if self.pos[s as usize] < depth {
                            self.state.fwd[s as usize] == Some(t)
                        } else {
                            self.state.rev[t as usize].is_none()
                        }
                    })
                })
            })
            .count()
    }

    fn completed(&self, depth: usize) -> usize {
        self.completed_at[depth]
            .iter()
            .filter(|&&i| {
                self.p.clause_candidates[i]
                    .iter()
                    .any(|&c| self.p.satisfied(c, &self.state.fwd))
            })
            .count()
    }

    fn dfs(&mut self, depth: usize, current: usize) {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            self.exhausted = true;
            return;
        }
        if current > self.best {
            self.best = current;
            self.best_fwd.clone_from(&self.state.fwd);
        }
        if depth == self.order.len() || current + self.bound(depth) <= self.best {
            return;
        }
        let s = self.order[depth];
        // Targets outside every candidate of `s` can only block others, so
        // they are equivalent to leaving `s` unmapped.
        let p = self.p;
        for &t in &p.src_targets[s as usize] {
            if self.state.rev[t as usize].is_some() {
                continue;
            }
            self.state.fwd[s as usize] = Some(t);
            self.state.rev[t as usize] = Some(s);
            let gained = self.completed(depth);
            self.dfs(depth + 1, current + gained);
            self.state.fwd[s as usize] = None;
            self.state.rev[t as usize] = None;
            if self.exhausted {
                return;
            }
        }
        self.dfs(depth + 1, current);
    }
}

/// True maximum matched-clause count over all partial injective
/// kind-respecting mappings. Forms are compared as given.
pub fn optimal_match(
    a: &ClausalForm,
    b: &ClausalForm,
    limits: &OracleLimits,
) -> Result<MatchResult, OracleError> {
    for (side, form) in [("system", a), ("gold", b)] {
        let vars = form.kinds().len();
        if vars > limits.max_vars_per_side {
            return Err(OracleError::TooLarge {
                side,
                vars,
                limit: limits.max_vars_per_side,
            });
        }
    }
    let p = Problem::new(a, b, VariableOrder::FirstOccurrence);
    let mut search = Search::new(&p, limits.max_nodes);
    search.dfs(0, 0);
    let assignment = Assignment {
        rev: Vec::new(),
        fwd: search.best_fwd,
    };
    let result = MatchResult::new(assignment.to_mapping(&p), search.best, a.len(), b.len(), vec![]);
    if search.exhausted {
        Err(OracleError::BudgetExceeded {
            best: Box::new(result),
            nodes: limits.max_nodes,
        })
    } else {
        Ok(result)
    }
}
