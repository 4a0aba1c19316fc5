//! Discourse Representation Structures in clausal form: parsing,
//! validation, normalization, clause matching with hill-climbing and an
//! exact oracle, corpus metrics, AMR conversion and the SPAR baseline.

pub mod clause;
pub mod convert;
pub mod form;
pub mod io;
pub mod matcher;
pub mod metrics;
pub mod normalize;
pub mod oracle;
pub mod parallel;
mod problem;
pub mod synth;
#[cfg(feature = "testing")]
pub mod testing;

pub use clause::{classify_clause, Clause, ClauseError, ClauseTag, Operator, Term, VariableId, VariableKind};
pub use form::{infer_variable_kinds, validate_form, ClausalForm, Severity, ValidationReport, Violation};
pub use io::{parse_corpus, parse_document, serialize_corpus, serialize_form, CorpusDocument, CorpusError, FormJson, ParseError};
pub use matcher::{
    generate_seed, hill_climb, match_forms, score_mapping, MatchConfig, MatchError, MatchResult, RestartTrace, SeedKind,
    VariableMapping, VariableOrder,
};
pub use metrics::{
    aggregate, clause_type_stats, prf, sweep_report, ClauseTypeStats, CorpusScore, MicroScore, Prf, SweepOptions,
    SweepReport, SweepRow,
};
pub use normalize::{prepare_for_matching, remove_redundant_refs, standardize_variables, RenamingTable};
pub use oracle::{optimal_match, OracleError, OracleLimits};
