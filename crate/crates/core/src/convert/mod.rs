//! AMR-to-DRS conversion and the SPAR baseline.

pub mod amr2drs;
pub mod penman;
pub mod spar;

pub use amr2drs::{amr_to_drs, Conversion, ConversionDictionary, ConvertError, DictionaryError, UnmappedPolicy};
pub use penman::{parse_penman, parse_penman_corpus, AmrEdge, AmrGraph, AmrNode, AmrTarget, PenmanBlock, PenmanError};
pub use spar::{spar_select, CorpusTooSmall, SparSelection};
