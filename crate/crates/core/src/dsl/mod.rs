//! The controlled motion-description language: AST, parser, canonical
//! formatter and description similarity.

mod ast;
mod format;
mod parse;
mod similarity;

pub use ast::*;
pub use format::{format_clause, format_description};
pub use parse::{parse_description, Vocabulary};
pub use similarity::{description_similarity, word_tokens, SimilarityIndex};
