//! Clause-level data types and the classifier that turns raw tokens into
//! typed clauses.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Name of a box label or discourse referent, e.g. `b1`, `x4`, `k0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct VariableId(String);

impl VariableId {
    pub fn new(name: impl Into<String>) -> Result<Self, ClauseError> {
        let name = name.into();
        if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == '"') {
            return Err(ClauseError::InvalidVariable(name));
        }
        Ok(VariableId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for VariableId {
    type Error = ClauseError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        VariableId::new(value)
    }
}

impl FromStr for VariableId {
    type Err = ClauseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        VariableId::new(s)
    }
}

impl From<VariableId> for String {
    fn from(value: VariableId) -> Self {
        value.0
    }
}

impl fmt::Display for VariableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// What a variable stands for, derived from where it occurs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariableKind {
    /// Labels a scope.
    Box,
    /// A discourse referent (entity, event, state, time).
    Referent,
    /// Occurs both as a scope label and as a referent (propositional referents).
    Dual,
}

impl VariableKind {
    pub(crate) fn join(self, other: VariableKind) -> VariableKind {
        if self == other {
            self
        } else {
            VariableKind::Dual
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(VariableId),
    /// A quoted constant, stored without its quotes.
    Const(String),
}

impl Term {
    pub fn as_var(&self) -> Option<&VariableId> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }

    /// Token form: constants are re-quoted.
    pub fn to_token(&self) -> String {
        match self {
            Term::Var(v) => v.0.clone(),
            Term::Const(c) => format!("\"{c}\""),
        }
    }

    fn from_token(token: &str) -> Result<Term, ClauseError> {
        if let Some(inner) = token.strip_prefix('"') {
            match inner.strip_suffix('"') {
                Some(c) if !c.contains('"') => Ok(Term::Const(c.to_string())),
                _ => Err(ClauseError::MalformedConstant(token.to_string())),
            }
        } else {
            Ok(Term::Var(VariableId::new(token)?))
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_token())
    }
}

/// The closed set of DRS operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Operator {
    Ref,
    Not,
    Pos,
    Nec,
    Equ,
    Neq,
    Apx,
    Les,
    Leq,
    Tpr,
    Tab,
    Imp,
    Dis,
    Prp,
    Drs,
}

impl Operator {
    pub const ALL: [Operator; 15] = [
        Operator::Ref,
        Operator::Not,
        Operator::Pos,
        Operator::Nec,
        Operator::Equ,
        Operator::Neq,
        Operator::Apx,
        Operator::Les,
        Operator::Leq,
        Operator::Tpr,
        Operator::Tab,
        Operator::Imp,
        Operator::Dis,
        Operator::Prp,
        Operator::Drs,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Operator::Ref => "REF",
            Operator::Not => "NOT",
            Operator::Pos => "POS",
            Operator::Nec => "NEC",
            Operator::Equ => "EQU",
            Operator::Neq => "NEQ",
            Operator::Apx => "APX",
            Operator::Les => "LES",
            Operator::Leq => "LEQ",
            Operator::Tpr => "TPR",
            Operator::Tab => "TAB",
            Operator::Imp => "IMP",
            Operator::Dis => "DIS",
            Operator::Prp => "PRP",
            Operator::Drs => "DRS",
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            Operator::Equ
                | Operator::Neq
                | Operator::Apx
                | Operator::Les
                | Operator::Leq
                | Operator::Tpr
                | Operator::Tab
        )
    }

    /// Argument slots following the operator token.
    fn slots(self) -> &'static [Slot] {
        use Slot::*;
        match self {
            Operator::Ref | Operator::Prp => &[Referent],
            Operator::Not | Operator::Pos | Operator::Nec | Operator::Drs => &[Box],
            Operator::Imp | Operator::Dis => &[Box, Box],
            _ => &[Term, Term],
        }
    }
}

impl FromStr for Operator {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Operator::ALL.into_iter().find(|op| op.as_str() == s).ok_or(())
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The second token of a clause, resolved.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClauseTag {
    Operator(Operator),
    /// Thematic role such as `Agent` or `Time`.
    Role(String),
    /// WordNet concept: lemma plus sense (`n.01`).
    Concept { lemma: String, sense: String },
    /// Discourse relation such as `CONTINUATION`.
    DiscourseRel(String),
}

/// Kind of an argument position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    /// Must hold a box variable.
    Box,
    /// Must hold a referent variable (no constants).
    Referent,
    /// Variable or constant.
    Term,
}

impl Slot {
    /// Kind implied for a variable occupying this slot.
    pub fn kind(self) -> VariableKind {
        match self {
            Slot::Box => VariableKind::Box,
            Slot::Referent | Slot::Term => VariableKind::Referent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClauseError {
    #[error("wrong number of arguments for {tag}: got {got}")]
    WrongArity { tag: String, got: usize },
    #[error("unknown clause tag `{0}`")]
    UnknownTag(String),
    #[error("constant {0} in box position")]
    ConstantInBoxPosition(String),
    #[error("constant {0} where a discourse referent is required")]
    ConstantAsReferent(String),
    #[error("invalid variable name `{0}`")]
    InvalidVariable(String),
    #[error("malformed constant {0}")]
    MalformedConstant(String),
}

/// One flat fact of a clausal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    box_var: VariableId,
    tag: ClauseTag,
    args: Vec<Term>,
}

impl Clause {
    /// Builds a clause, checking arity and argument slots for the tag.
    pub fn new(box_var: VariableId, tag: ClauseTag, args: Vec<Term>) -> Result<Self, ClauseError> {
        let clause = Clause { box_var, tag, args };
        let slots = clause.tag.slots_for(clause.args.len()).ok_or_else(|| {
            ClauseError::WrongArity {
                tag: clause.tag.to_string(),
                got: clause.args.len(),
            }
        })?;
        for (slot, arg) in slots.iter().zip(&clause.args) {
            if let Term::Const(_) = arg {
                match slot {
                    Slot::Box => return Err(ClauseError::ConstantInBoxPosition(arg.to_token())),
                    Slot::Referent => return Err(ClauseError::ConstantAsReferent(arg.to_token())),
                    Slot::Term => {}
                }
            }
        }
        Ok(clause)
    }

    pub fn box_var(&self) -> &VariableId {
        &self.box_var
    }

    pub fn tag(&self) -> &ClauseTag {
        &self.tag
    }

    pub fn args(&self) -> &[Term] {
        &self.args
    }

    /// Every variable occurrence with the slot it sits in, box first.
    pub fn variable_slots(&self) -> impl Iterator<Item = (&VariableId, Slot)> {
        let slots = self
            .tag
            .slots_for(self.args.len())
            .expect("arity checked at construction");
        std::iter::once((&self.box_var, Slot::Box)).chain(
            self.args
                .iter()
                .zip(slots.iter().copied())
                .filter_map(|(t, s)| t.as_var().map(|v| (v, s))),
        )
    }

    pub fn variables(&self) -> impl Iterator<Item = &VariableId> {
        self.variable_slots().map(|(v, _)| v)
    }

    /// Token form as it appears in a clausal-form file.
    pub fn tokens(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(4);
        out.push(self.box_var.0.clone());
        match &self.tag {
            ClauseTag::Concept { lemma, sense } => {
                out.push(lemma.clone());
                out.push(sense.clone());
            }
            other => out.push(other.to_string()),
        }
        out.extend(self.args.iter().map(Term::to_token));
        out
    }

    /// Applies `f` to every variable, keeping constants and tag intact.
    pub fn map_variables(&self, mut f: impl FnMut(&VariableId) -> VariableId) -> Clause {
        Clause {
            box_var: f(&self.box_var),
            tag: self.tag.clone(),
            args: self
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => Term::Var(f(v)),
                    Term::Const(c) => Term::Const(c.clone()),
                })
                .collect(),
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tokens().join(" "))
    }
}

impl ClauseTag {
    fn slots_for(&self, nargs: usize) -> Option<&'static [Slot]> {
        use Slot::*;
        let slots: &'static [Slot] = match self {
            ClauseTag::Operator(op) => op.slots(),
            ClauseTag::Role(_) => &[Term, Term],
            ClauseTag::Concept { .. } => &[Term],
            ClauseTag::DiscourseRel(_) => match nargs {
                1 => &[Box],
                _ => &[Box, Box],
            },
        };
        (slots.len() == nargs).then_some(slots)
    }

    /// True for concept, role and comparison clauses.
    pub fn is_basic_condition(&self) -> bool {
        match self {
            ClauseTag::Concept { .. } | ClauseTag::Role(_) => true,
            ClauseTag::Operator(op) => op.is_comparison(),
            ClauseTag::DiscourseRel(_) => false,
        }
    }
}

impl fmt::Display for ClauseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClauseTag::Operator(op) => f.write_str(op.as_str()),
            ClauseTag::Role(r) | ClauseTag::DiscourseRel(r) => f.write_str(r),
            ClauseTag::Concept { lemma, sense } => write!(f, "{lemma} {sense}"),
        }
    }
}

/// Loose sense shape used for recognition: one letter, a dot, digits.
pub(crate) fn looks_like_sense(token: &str) -> bool {
    let mut chars = token.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.next() == Some('.')
        && {
            let rest = chars.as_str();
            !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit())
        }
}

/// Strict sense shape: part of speech in {n, v, a, r}, dot, two digits.
pub fn is_valid_sense(token: &str) -> bool {
    let b = token.as_bytes();
    b.len() == 4
        && matches!(b[0], b'n' | b'v' | b'a' | b'r')
        && b[1] == b'.'
        && b[2].is_ascii_digit()
        && b[3].is_ascii_digit()
}

fn is_role_name(token: &str) -> bool {
    token.chars().next().is_some_and(char::is_uppercase) && token.chars().any(char::is_lowercase)
}

fn is_relation_name(token: &str) -> bool {
    token.chars().next().is_some_and(|c| c.is_alphabetic() && c.is_uppercase())
        && !token.chars().any(char::is_lowercase)
}

/// Resolves a raw token list (constants still quoted) into a typed clause.
pub fn classify_clause<S: AsRef<str>>(tokens: &[S]) -> Result<Clause, ClauseError> {
    let tokens: Vec<&str> = tokens.iter().map(AsRef::as_ref).collect();
    if !(3..=4).contains(&tokens.len()) {
        return Err(ClauseError::WrongArity {
            tag: tokens.get(1).copied().unwrap_or("").to_string(),
            got: tokens.len().saturating_sub(2),
        });
    }
    let box_var = match Term::from_token(tokens[0])? {
        Term::Var(v) => v,
        Term::Const(_) => return Err(ClauseError::ConstantInBoxPosition(tokens[0].to_string())),
    };
    let head = tokens[1];
    if head.starts_with('"') {
        return Err(ClauseError::UnknownTag(head.to_string()));
    }
    let (tag, rest) = if let Ok(op) = head.parse::<Operator>() {
        (ClauseTag::Operator(op), &tokens[2..])
    } else if tokens.len() == 4 && looks_like_sense(tokens[2]) {
        (
            ClauseTag::Concept {
                lemma: head.to_string(),
                sense: tokens[2].to_string(),
            },
            &tokens[3..],
        )
    } else if is_role_name(head) {
        (ClauseTag::Role(head.to_string()), &tokens[2..])
    } else if is_relation_name(head) {
        (ClauseTag::DiscourseRel(head.to_string()), &tokens[2..])
    } else {
        return Err(ClauseError::UnknownTag(head.to_string()));
    };
    let args = rest
        .iter()
        .map(|t| Term::from_token(t))
        .collect::<Result<Vec<_>, _>>()?;
    Clause::new(box_var, tag, args)
}
