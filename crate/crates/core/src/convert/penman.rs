//! A reader for the PENMAN subset emitted by AMR parsers: nested
//! `(var / concept :rel value ...)` expressions with re-entrant variables and
//! string or numeric attribute values.

use std::collections::HashSet;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("PENMAN line {line}: {message}")]
pub struct PenmanError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmrNode {
    pub id: String,
    pub concept: String,
    /// Edge whose value defines this node inline; `None` for the root.
    pub introduced_by: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AmrTarget {
    Node(String),
    Const(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmrEdge {
    pub source: String,
    /// Relation label without the leading colon, e.g. `ARG0`.
    pub relation: String,
    pub target: AmrTarget,
}

/// Nodes and edges in document order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmrGraph {
    pub root: String,
    pub nodes: Vec<AmrNode>,
    pub edges: Vec<AmrEdge>,
}

impl AmrGraph {
    pub fn node(&self, id: &str) -> Option<&AmrNode> {
        self.nodes.iter().find(|n| n.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    Slash,
    Rel(String),
    Str(String),
    Atom(String),
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, PenmanError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut chars = text.chars().peekable();
    let is_delim = |c: char| c.is_whitespace() || c == '(' || c == ')' || c == '"';
    while let Some(c) = chars.next() {
        match c {
            '\n' => line += 1,
            c if c.is_whitespace() => {}
            '(' => out.push((Tok::Open, line)),
            ')' => out.push((Tok::Close, line)),
            '/' => out.push((Tok::Slash, line)),
            '"' => {
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some('\n') | None => {
                            return Err(PenmanError {
                                line,
                                message: "unterminated string".into(),
                            })
                        }
                        Some(ch) => s.push(ch),
                    }
                }
                out.push((Tok::Str(s), line));
            }
            _ => {
                let mut s = String::from(c);
                while let Some(&n) = chars.peek() {
                    if is_delim(n) {
                        break;
                    }
                    s.push(n);
                    chars.next();
                }
                match s.strip_prefix(':') {
                    Some(rel) if !rel.is_empty() => out.push((Tok::Rel(rel.to_string()), line)),
                    Some(_) => {
                        return Err(PenmanError {
                            line,
                            message: "empty relation name".into(),
                        })
                    }
                    None => out.push((Tok::Atom(s), line)),
                }
            }
        }
    }
    Ok(out)
}

enum RawValue {
    Str(String),
    Atom(String),
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    nodes: Vec<AmrNode>,
    /// (source, relation, value); nested nodes are recorded by id.
    edges: Vec<(String, String, RawValue)>,
    defined: HashSet<String>,
}

impl Parser {
    fn line(&self) -> usize {
        self.toks
            .get(self.at)
            .or_else(|| self.toks.last())
            .map_or(1, |t| t.1)
    }

    fn err(&self, message: impl Into<String>) -> PenmanError {
        PenmanError {
            line: self.line(),
            message: message.into(),
        }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|t| t.0.clone());
        self.at += 1;
        t
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn node(&mut self, introduced_by: Option<usize>) -> Result<String, PenmanError> {
        if self.next() != Some(Tok::Open) {
            return Err(self.err("expected `(`"));
        }
        let id = match self.next() {
            Some(Tok::Atom(a)) => a,
            _ => return Err(self.err("expected a variable after `(`")),
        };
        if self.next() != Some(Tok::Slash) {
            return Err(self.err(format!("expected `/` after variable {id}")));
        }
        let concept = match self.next() {
            Some(Tok::Atom(a)) | Some(Tok::Str(a)) => a,
            _ => return Err(self.err(format!("expected a concept for {id}"))),
        };
        if !self.defined.insert(id.clone()) {
            self.at -= 1;
            return Err(self.err(format!("variable {id} defined twice")));
        }
        self.nodes.push(AmrNode {
            id: id.clone(),
            concept,
            introduced_by,
        });
        loop {
            match self.next() {
                Some(Tok::Close) => return Ok(id),
                Some(Tok::Rel(rel)) => match self.peek() {
                    Some(Tok::Open) => {
                        // Reserve the slot so edges stay in document order.
                        let index = self.edges.len();
                        self.edges.push((id.clone(), rel, RawValue::Atom(String::new())));
                        let child = self.node(Some(index))?;
                        self.edges[index].2 = RawValue::Atom(child);
                    }
                    Some(Tok::Atom(_)) | Some(Tok::Str(_)) => {
                        let value = match self.next() {
                            Some(Tok::Atom(a)) => RawValue::Atom(a),
                            Some(Tok::Str(s)) => RawValue::Str(s),
                            _ => unreachable!("peeked an atom or string"),
                        };
                        self.edges.push((id.clone(), rel, value));
                    }
                    _ => return Err(self.err(format!("missing value for :{rel}"))),
                },
                None => return Err(self.err("unbalanced parentheses: missing `)`")),
                Some(_) => return Err(self.err("expected a relation or `)`")),
            }
        }
    }
}

fn inverse_arg(rel: &str) -> Option<&str> {
    let base = rel.strip_suffix("-of")?;
    let digits = base.strip_prefix("ARG")?;
    (!digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())).then_some(base)
}

/// Parses one parenthesized PENMAN expression.
///
/// `:ARGn-of` edges are reversed into `:ARGn` with swapped endpoints.
pub fn parse_penman(text: &str) -> Result<AmrGraph, PenmanError> {
    let toks = lex(text)?;
    let mut parser = Parser {
        toks,
        at: 0,
        nodes: Vec::new(),
        edges: Vec::new(),
        defined: HashSet::new(),
    };
    if parser.toks.is_empty() {
        return Err(parser.err("empty input"));
    }
    let root = parser.node(None)?;
    if parser.at < parser.toks.len() {
        return Err(parser.err("unexpected content after the closing `)`"));
    }
    let defined = parser.defined;
    let edges = parser
        .edges
        .into_iter()
        .map(|(source, relation, value)| {
            let target = match value {
                RawValue::Atom(a) if defined.contains(&a) => AmrTarget::Node(a),
                RawValue::Atom(a) | RawValue::Str(a) => AmrTarget::Const(a),
            };
            match (inverse_arg(&relation), target) {
                (Some(base), AmrTarget::Node(child)) => AmrEdge {
                    source: child,
                    relation: base.to_string(),
                    target: AmrTarget::Node(source),
                },
                (_, target) => AmrEdge {
                    source,
                    relation,
                    target,
                },
            }
        })
        .collect();
    Ok(AmrGraph {
        root,
        nodes: parser.nodes,
        edges,
    })
}

/// A graph from a multi-graph file with its optional `# ::id` value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PenmanBlock {
    pub id: Option<String>,
    pub graph: AmrGraph,
}

/// Splits on blank lines; `#` lines are comments, `# ::id X` names the graph.
pub fn parse_penman_corpus(text: &str) -> Result<Vec<PenmanBlock>, PenmanError> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    let mut out = Vec::new();
    for block in lines.split(|(_, l)| l.trim().is_empty()) {
        let mut id = None;
        let mut body = String::new();
        let mut first_line = None;
        for (n, line) in block {
            let trimmed = line.trim_start();
            if let Some(comment) = trimmed.strip_prefix('#') {
                if let Some(rest) = comment.trim_start().strip_prefix("::id") {
                    id = rest.split_whitespace().next().map(str::to_string);
                }
                continue;
            }
            first_line.get_or_insert(*n);
            body.push_str(line);
            body.push('\n');
        }
        let Some(first) = first_line else { continue };
        let graph = parse_penman(&body).map_err(|e| PenmanError {
            line: e.line + first - 1,
            message: e.message,
        })?;
        out.push(PenmanBlock { id, graph });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const REMOVE: &str = "(r / remove-01\n  :ARG0 (s / she)\n  :ARG1 (d / dish)\n  :ARG2 (t / table))";

    #[test]
    fn nested_graph() {
        let g = parse_penman(REMOVE).unwrap();
        assert_eq!(g.root, "r");
        let ids: Vec<_> = g.nodes.iter().map(|n| n.id.as_str()).collect();
        assert_eq!(ids, ["r", "s", "d", "t"]);
        let rels: Vec<_> = g.edges.iter().map(|e| e.relation.as_str()).collect();
        assert_eq!(rels, ["ARG0", "ARG1", "ARG2"]);
        assert_eq!(g.node("s").unwrap().introduced_by, Some(0));
        assert_eq!(g.node("t").unwrap().introduced_by, Some(2));
        assert_eq!(g.edges[1].target, AmrTarget::Node("d".into()));
    }

    #[test]
    fn single_node() {
        let g = parse_penman("(a / thing)").unwrap();
        assert_eq!(g.nodes.len(), 1);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn unbalanced() {
        assert!(parse_penman("(a / x (b / y)").is_err());
        assert!(parse_penman("(a / x))").is_err());
    }

    #[test]
    fn duplicate_definition() {
        let err = parse_penman("(a / x :ARG0 (a / y))").unwrap_err();
        assert!(err.message.contains("defined twice"));
    }

    #[test]
    fn reentrancy_constants_and_inverse_edges() {
        let g = parse_penman(
            "(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b) :name \"Ann Lee\" :quant 5 \
             :mod (p / person :ARG0-of (h / hike-01)))",
        )
        .unwrap();
        assert_eq!(g.nodes.len(), 5);
        let reentrant = &g.edges[2];
        assert_eq!((reentrant.source.as_str(), &reentrant.target), ("g", &AmrTarget::Node("b".into())));
        assert_eq!(g.edges[3].target, AmrTarget::Const("Ann Lee".into()));
        assert_eq!(g.edges[4].target, AmrTarget::Const("5".into()));
        let inv = &g.edges[6];
        assert_eq!(inv.source, "h");
        assert_eq!(inv.relation, "ARG0");
        assert_eq!(inv.target, AmrTarget::Node("p".into()));
        assert_eq!(g.node("h").unwrap().introduced_by, Some(6));
    }

    #[test]
    fn corpus_blocks() {
        let text = "# ::id 14/0849\n# ::snt She removed the dishes.\n(r / remove-01 :ARG0 (s / she))\n\n\n(a / thing)\n";
        let blocks = parse_penman_corpus(text).unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0].id.as_deref(), Some("14/0849"));
        assert_eq!(blocks[1].id, None);
        let err = parse_penman_corpus("(a / b)\n\n\n(c / d\n").unwrap_err();
        assert_eq!(err.line, 4);
    }
}
