//! Deterministic annotation-text parsing, canonical rendering, and the
//! external-parser adapter.
//!
//! The grammars are the in-process stand-in for a neural patch parser: they
//! map one transcription to one structured record per category. The adapter
//! speaks newline-delimited JSON to an external parser and schema-checks
//! everything it returns.

mod adapter;
mod canon;
mod grammar;

pub use adapter::{
    adapter_parse, AdapterClient, AdapterError, AdapterTransport, ParsePayload, ParseRequest,
    ParseResult, SubprocessTransport, TcpTransport, DEFAULT_ADAPTER_TIMEOUT,
};
pub use canon::{
    render_annotation, render_gdt_frames, render_measure, render_measure_value, render_radius,
    render_surface_roughness, render_thread, render_title_block,
};
pub use grammar::{
    parse_annotation, parse_gdt, parse_measure, parse_radius, parse_roughness_value,
    parse_surface_roughness, parse_thread,
};

pub(crate) use grammar::{normalize_ws, parse_datum, parse_gdt_tolerance};

use crate::schema::{AnnotationCategory, Violation};
use thiserror::Error;

/// Errors raised by the category grammars.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("unknown GD&T symbol: {0:?}")]
    UnknownSymbol(String),
    #[error("feature control frame has an empty tolerance compartment")]
    EmptyTolerance,
    #[error("malformed tolerance token {0:?}")]
    MalformedTolerance(String),
    #[error("malformed datum reference {0:?}")]
    MalformedDatum(String),
    #[error("measure has no nominal value")]
    NoNominalValue,
    #[error("measure carries both a symmetric tolerance and a limit pair")]
    ConflictingTolerances,
    #[error("not a thread callout: {0:?}")]
    NotAThread(String),
    #[error("unknown surface-roughness form: {0:?}")]
    UnknownRoughnessForm(String),
    #[error("title block line without key/value separator: {0:?}")]
    MalformedTitleBlockLine(String),
    #[error("unexpected token {0:?}")]
    UnexpectedToken(String),
    #[error("annotation text is empty")]
    EmptyAnnotation,
    #[error("parsed {category} record fails validation: {violations:?}")]
    InvalidRecord {
        category: AnnotationCategory,
        violations: Vec<Violation>,
    },
}
