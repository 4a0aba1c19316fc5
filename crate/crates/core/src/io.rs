//! Reading and writing the plain-text clausal-form format.
//!
//! One clause per line, tokens separated by spaces or tabs, constants in
//! double quotes, `%` starts a comment. A corpus file holds several documents
//! separated by blank lines; a `% id: <doc_id>` comment inside a document's
//! block names it.

use std::collections::HashMap;
use std::ops::RangeInclusive;

use serde::Serialize;
use thiserror::Error;

use crate::clause::{classify_clause, ClauseError};
use crate::form::ClausalForm;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    /// 1-based line number within the parsed text.
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }

    fn from_clause(line: usize, err: ClauseError) -> Self {
        ParseError::new(line, err.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("document {document}: {source}")]
    Parse {
        /// 1-based document index.
        document: usize,
        source: ParseError,
    },
    #[error("line {line}: duplicate document id `{doc_id}`")]
    DuplicateDocId { doc_id: String, line: usize },
}

impl CorpusError {
    pub fn line(&self) -> usize {
        match self {
            CorpusError::Parse { source, .. } => source.line,
            CorpusError::DuplicateDocId { line, .. } => *line,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusDocument {
    pub doc_id: String,
    /// Whether the id came from a `% id:` line rather than the position.
    pub explicit_id: bool,
    pub form: ClausalForm,
    /// 1-based line span of the document's block.
    pub source_lines: RangeInclusive<usize>,
}

/// Strips a `%` comment that is not inside a quoted constant.
fn strip_comment(line: &str) -> (&str, Option<&str>) {
    let mut in_quote = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_quote = !in_quote,
            '%' if !in_quote => return (&line[..i], Some(&line[i + 1..])),
            _ => {}
        }
    }
    (line, None)
}

/// Splits on runs of spaces/tabs; a quoted constant is one token and may hold spaces.
fn tokenize(line: &str) -> Result<Vec<&str>, String> {
    let mut tokens = Vec::new();
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b' ' | b'\t' | b'\r' => i += 1,
            b'"' => {
                let close = line[i + 1..]
                    .find('"')
                    .map(|p| i + 1 + p)
                    .ok_or_else(|| "unbalanced quote".to_string())?;
                if close + 1 < bytes.len() && !matches!(bytes[close + 1], b' ' | b'\t' | b'\r') {
                    return Err("quote character inside a constant".into());
                }
                tokens.push(&line[i..=close]);
                i = close + 1;
            }
            _ => {
                let start = i;
                while i < bytes.len() && !matches!(bytes[i], b' ' | b'\t' | b'\r') {
                    if bytes[i] == b'"' {
                        return Err("quote character inside a token".into());
                    }
                    i += 1;
                }
                tokens.push(&line[start..i]);
            }
        }
    }
    Ok(tokens)
}

fn parse_lines<'a>(
    lines: impl Iterator<Item = (usize, &'a str)>,
) -> Result<ClausalForm, ParseError> {
    let mut clauses = Vec::new();
    for (lineno, raw) in lines {
        let (content, _) = strip_comment(raw);
        let tokens = tokenize(content).map_err(|m| ParseError::new(lineno, m))?;
        if tokens.is_empty() {
            continue;
        }
        if !(3..=4).contains(&tokens.len()) {
            return Err(ParseError::new(
                lineno,
                format!("expected 3 or 4 tokens, found {}", tokens.len()),
            ));
        }
        clauses.push(classify_clause(&tokens).map_err(|e| ParseError::from_clause(lineno, e))?);
    }
    Ok(ClausalForm::new(clauses))
}

/// Parses a single document: every non-empty, non-comment line is a clause.
pub fn parse_document(text: &str) -> Result<ClausalForm, ParseError> {
    parse_lines(text.lines().enumerate().map(|(i, l)| (i + 1, l)))
}

fn id_comment(comment: &str) -> Option<&str> {
    let id = comment.trim_start().strip_prefix("id:")?.trim();
    (!id.is_empty()).then_some(id)
}

/// Parses a multi-document file. Documents are separated by blank lines.
pub fn parse_corpus(text: &str) -> Result<Vec<CorpusDocument>, CorpusError> {
    let mut docs = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();

    for block in lines.split(|(_, l)| l.trim().is_empty()) {
        if block.is_empty() {
            continue;
        }
        let mut id = None;
        let mut has_clause = false;
        for (_, line) in block {
            let (content, comment) = strip_comment(line);
            if !content.trim().is_empty() {
                has_clause = true;
            } else if let Some(found) = comment.and_then(id_comment) {
                id = Some(found.to_string());
            }
        }
        if !has_clause {
            continue;
        }
        let index = docs.len() + 1;
        let form = parse_lines(block.iter().copied())
            .map_err(|source| CorpusError::Parse { document: index, source })?;
        let first = block[0].0;
        let last = block[block.len() - 1].0;
        let explicit_id = id.is_some();
        let doc_id = id.unwrap_or_else(|| index.to_string());
        if seen.insert(doc_id.clone(), index).is_some() {
            return Err(CorpusError::DuplicateDocId { doc_id, line: first });
        }
        docs.push(CorpusDocument {
            form: form.with_doc_id(doc_id.clone()),
            doc_id,
            explicit_id,
            source_lines: first..=last,
        });
    }
    Ok(docs)
}

/// One clause per line, single-space separated, constants re-quoted.
pub fn serialize_form(form: &ClausalForm) -> String {
    form.to_string()
}

/// Serializes documents with `% id:` headers, separated by blank lines.
pub fn serialize_corpus<'a>(docs: impl IntoIterator<Item = (&'a str, &'a ClausalForm)>) -> String {
    docs.into_iter()
        .map(|(id, form)| format!("% id: {id}\n{}", serialize_form(form)))
        .collect::<Vec<_>>()
        .join("\n")
}

/// JSON shape of a form for downstream tools.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormJson {
    pub doc_id: Option<String>,
    pub clauses: Vec<Vec<String>>,
}

impl From<&ClausalForm> for FormJson {
    fn from(form: &ClausalForm) -> Self {
        FormJson {
            doc_id: form.doc_id().map(str::to_string),
            clauses: form.clauses().iter().map(|c| c.tokens()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text() {
        assert!(parse_document("").unwrap().is_empty());
        assert_eq!(serialize_form(&parse_document("").unwrap()), "");
    }

    #[test]
    fn too_many_tokens() {
        let err = parse_document("b1 REF x1 x2 x3").unwrap_err();
        assert_eq!(err.line, 1);
    }

    #[test]
    fn comments_and_whitespace() {
        let f = parse_document("% header\n  b1   REF\tx1   % trailing\n\nb1 male n.02 x1  \n").unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(serialize_form(&f), "b1 REF x1\nb1 male n.02 x1\n");
    }

    #[test]
    fn constants_keep_spaces_and_percent() {
        let f = parse_document("b2 Name x2 \"new york\"\nb3 EQU x3 \"50%\"").unwrap();
        let text = serialize_form(&f);
        assert!(text.contains("\"new york\""));
        assert!(text.contains("\"50%\""));
    }

    #[test]
    fn quote_errors() {
        assert_eq!(parse_document("b1 Name x1 \"abc").unwrap_err().line, 1);
        assert!(parse_document("b1 Name x1 \"a\"b\"").is_err());
        assert!(parse_document("\nb1 Name x\"1 \"a\"").unwrap_err().line == 2);
    }

    #[test]
    fn constant_serializes_with_quotes() {
        let f = parse_document("b4 EQU t1 \"now\"").unwrap();
        assert!(serialize_form(&f).trim_end().ends_with("\"now\""));
    }

    #[test]
    fn corpus_ids_and_positions() {
        let text = "% id: 01/3445\nb1 REF x1\n\n\n% a comment only\n\nb2 REF x2\nb2 male n.02 x2\n";
        let docs = parse_corpus(text).unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].doc_id, "01/3445");
        assert!(docs[0].explicit_id);
        assert_eq!(docs[1].doc_id, "2");
        assert!(!docs[1].explicit_id);
        assert_eq!(docs[1].source_lines, 7..=8);
        assert_eq!(docs[1].form.doc_id(), Some("2"));
    }

    #[test]
    fn corpus_of_comments_is_empty() {
        assert!(parse_corpus("% nothing\n\n% id: x\n\n").unwrap().is_empty());
    }

    #[test]
    fn duplicate_doc_ids() {
        let text = "% id: 00/3514\nb1 REF x1\n\n% id: 00/3514\nb1 REF x1\n";
        assert!(matches!(
            parse_corpus(text),
            Err(CorpusError::DuplicateDocId { ref doc_id, line: 4 }) if doc_id == "00/3514"
        ));
    }

    #[test]
    fn corpus_error_carries_document_and_line() {
        let err = parse_corpus("b1 REF x1\n\nb1 REF x1\nb1 bogus x1\n").unwrap_err();
        match err {
            CorpusError::Parse { document, source } => {
                assert_eq!(document, 2);
                assert_eq!(source.line, 4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn json_shape() {
        let f = parse_document("b3 TPR t1 \"now\"").unwrap().with_doc_id("d");
        let json = serde_json::to_string(&FormJson::from(&f)).unwrap();
        assert_eq!(json, r#"{"doc_id":"d","clauses":[["b3","TPR","t1","\"now\""]]}"#);
    }
}
