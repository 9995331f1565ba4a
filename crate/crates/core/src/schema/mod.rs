//! Annotation categories, record types, the GD&T symbol table, and document
//! (de)serialization.
//!
//! Everything here is immutable value data; all operations are pure.

mod category;
mod document;
mod records;
mod symbols;
mod validate;

pub use category::AnnotationCategory;
pub use document::{parse_document, serialize_document, DrawingDocument, SchemaDialect};
pub use records::{
    AnnotationRecord, DepthQualifier, GdtFrame, GeneralToleranceSpec, MaterialSpec, Measure,
    MeasureUnit, NotesBlock, RadiusSpec, RoughnessParameter, SurfaceRoughnessSpec, ThreadSpec,
};
pub use symbols::{
    escape_codepoint, gdt_symbol_name, lookup_gdt_symbol, parse_symbol_token, GDT_SYMBOL_TABLE,
};
pub use validate::{check_record, validate_record, Violation};

pub(crate) use records::{is_decimal, is_signed_decimal, signed_decimal_value};
pub(crate) use validate::{is_datum_ref, is_fit_class};

use thiserror::Error;

/// Errors raised by schema lookups, parsing, and validation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchemaError {
    /// A name or codepoint is not one of the 14 tabulated GD&T symbols.
    #[error("unknown GD&T symbol: {0}")]
    UnknownSymbol(String),
    /// Input was not valid JSON at all.
    #[error("malformed JSON: {0}")]
    MalformedJson(String),
    /// JSON parsed but does not fit the schema; `path` locates the offender.
    #[error("schema violation at {path}: {message}")]
    SchemaViolation { path: String, message: String },
    /// A record of one category was supplied where another was expected.
    #[error("category mismatch: expected {expected}, got {actual}")]
    CategoryMismatch { expected: String, actual: String },
    /// A record failed its type invariants.
    #[error("invalid record: {0:?}")]
    InvalidRecord(Vec<Violation>),
}

impl SchemaError {
    pub fn violation(path: impl Into<String>, message: impl Into<String>) -> Self {
        SchemaError::SchemaViolation {
            path: path.into(),
            message: message.into(),
        }
    }
}
