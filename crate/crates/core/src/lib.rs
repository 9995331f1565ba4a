//! Toolkit for turning annotated 2D engineering drawings into structured,
//! machine-actionable records.
//!
//! The crate is organised around the stages of that pipeline:
//!
//! - [`schema`] — the nine annotation categories, their record types, the
//!   GD&T symbol table, and whole-drawing document (de)serialization.
//! - [`geometry`] — oriented bounding boxes, rotated IoU, prediction/ground
//!   truth matching, confusion matrices, and average precision.
//! - [`dataset`] — OBB label files, patch extraction, category statistics,
//!   and the seeded augmentation pipeline.
//! - [`parser`] — deterministic grammars mapping annotation transcriptions to
//!   records, a canonical renderer, and the external-parser wire adapter.
//! - [`eval`] — field-level comparison of predicted vs ground-truth records
//!   and precision/recall/F1/hallucination reporting.
//! - [`decide`] — the rule engine, ISO tolerance-grade classification, and
//!   the tool/cutting-parameter database.
//! - [`render`] — SVG detection overlays and HTML/CSV report rendering.

pub mod dataset;
pub mod decide;
pub mod eval;
pub mod geometry;
pub mod parser;
pub mod render;
pub mod samples;
pub mod schema;
