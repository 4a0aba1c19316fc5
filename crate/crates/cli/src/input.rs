use std::collections::{HashMap, HashSet};
use std::io::Read;

use drsmatch_core::{parse_corpus, ClausalForm, CorpusDocument, CorpusError};

use crate::CliError;

/// Reads a path, or stdin for `-`.
pub fn read_text(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::Io(format!("<stdin>: {e}")))?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))
    }
}

pub fn read_corpus(path: &str) -> Result<Vec<CorpusDocument>, CliError> {
    let text = read_text(path)?;
    parse_corpus(&text).map_err(|e| {
        let detail = match &e {
            CorpusError::Parse { document, source } => format!("document {document}: {}", source.message),
            CorpusError::DuplicateDocId { doc_id, .. } => format!("duplicate document id {doc_id}"),
        };
        CliError::Parse(format!("{path}:{}: {detail}", e.line()))
    })
}

pub fn check_distinct(a: &str, b: &str) -> Result<(), CliError> {
    if a == "-" && b == "-" {
        return Err(CliError::Usage("only one input can be read from stdin".into()));
    }
    Ok(())
}

pub struct Pairing {
    pub pairs: Vec<(String, ClausalForm, ClausalForm)>,
    /// Ids present on only one side, in input order.
    pub unpaired: Vec<String>,
    pub by_id: bool,
}

/// Pairs documents by id when both files name every document, otherwise by
/// position. With `strict`, any unpaired document is an error.
pub fn pair_documents(
    sys: Vec<CorpusDocument>,
    gold: Vec<CorpusDocument>,
    strict: bool,
) -> Result<Pairing, CliError> {
    let named = |docs: &[CorpusDocument]| !docs.is_empty() && docs.iter().all(|d| d.explicit_id);
    let sys_ids: HashSet<&str> = sys.iter().map(|d| d.doc_id.as_str()).collect();
    let gold_ids: HashSet<&str> = gold.iter().map(|d| d.doc_id.as_str()).collect();
    let by_id = named(&sys) && named(&gold) && (!strict || sys_ids == gold_ids);

    if !by_id {
        if sys.len() != gold.len() {
            return Err(CliError::Pairing(format!(
                "document counts differ: {} system vs {} gold",
                sys.len(),
                gold.len()
            )));
        }
        let pairs = sys
            .into_iter()
            .zip(gold)
            .map(|(s, g)| (g.doc_id, s.form, g.form))
            .collect();
        return Ok(Pairing {
            pairs,
            unpaired: Vec::new(),
            by_id,
        });
    }

    let unpaired: Vec<String> = sys
        .iter()
        .filter(|d| !gold_ids.contains(d.doc_id.as_str()))
        .chain(gold.iter().filter(|d| !sys_ids.contains(d.doc_id.as_str())))
        .map(|d| d.doc_id.clone())
        .collect();
    let mut gold_by_id: HashMap<String, ClausalForm> = gold.into_iter().map(|d| (d.doc_id, d.form)).collect();
    let pairs = sys
        .into_iter()
        .filter_map(|s| {
            let g = gold_by_id.remove(&s.doc_id)?;
            Some((s.doc_id, s.form, g))
        })
        .collect();
    Ok(Pairing { pairs, unpaired, by_id })
}
