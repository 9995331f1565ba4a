//! Whole-drawing documents and their two JSON dialects.
//!
//! - **Patch dialect**: single-category objects as used for patch labels,
//!   e.g. `{"GD&Ts": [{"index": 1, "geometricCharacteristic": "U+2316", ...}]}`.
//!   GD&T symbols appear in `U+XXXX` escape form.
//! - **Document dialect**: whole-drawing exports with the fixed key order
//!   `Material, Threads, GD&T, General Tolerance, Radii, Surface Roughness,
//!   Measures, Title Block, Notes`. Symbols appear as glyphs (`Ø0.020`) and
//!   GD&T characteristics by name (`"Position"`).
//!
//! Serialization is deterministic (fixed key order, insertion-ordered maps);
//! parsing auto-detects the dialect by key presence and accepts both glyph
//! and escape spellings.

use serde_json::{json, Map, Value};

use crate::parser::{
    normalize_ws, parse_datum, parse_gdt_tolerance, parse_measure, parse_radius,
    parse_roughness_value, parse_thread, render_measure_value, render_radius, render_thread,
};

use super::category::AnnotationCategory;
use super::records::*;
use super::symbols::{escape_codepoint, gdt_symbol_name, lookup_gdt_symbol, parse_symbol_token};
use super::validate::{check_gdt_frames, check_measure, check_radius, check_record};
use super::{SchemaError, Violation};

/// Output dialect selector for [`serialize_document`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemaDialect {
    /// Single-category patch labels; empty slots are omitted.
    Patch,
    /// Whole-drawing export; all nine keys always present, empty slots as `""`.
    Document,
}

/// Fixed key order of the document dialect.
const DOCUMENT_KEYS: [&str; 9] = [
    "Material",
    "Threads",
    "GD&T",
    "General Tolerance",
    "Radii",
    "Surface Roughness",
    "Measures",
    "Title Block",
    "Notes",
];

/// Keys that only occur in the document dialect; their presence forces
/// document-dialect parsing.
const DOCUMENT_ONLY_KEYS: [&str; 4] = ["Material", "GD&T", "General Tolerance", "Title Block"];

/// A whole drawing: one slot per annotation category. Slots may be empty,
/// but are always serialized, so exports carry all nine categories.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DrawingDocument {
    pub gdts: Vec<GdtFrame>,
    pub measures: Vec<Measure>,
    pub threads: Vec<ThreadSpec>,
    pub surface_roughness: Vec<SurfaceRoughnessSpec>,
    pub radii: Vec<RadiusSpec>,
    pub material: Option<MaterialSpec>,
    pub general_tolerance: Option<GeneralToleranceSpec>,
    pub title_block: Option<TitleBlock>,
    pub notes: Option<NotesBlock>,
}

impl DrawingDocument {
    pub fn is_empty(&self) -> bool {
        self.gdts.is_empty()
            && self.measures.is_empty()
            && self.threads.is_empty()
            && self.surface_roughness.is_empty()
            && self.radii.is_empty()
            && self.material.is_none()
            && self.general_tolerance.is_none()
            && self.title_block.is_none()
            && self.notes.is_none()
    }

    /// Every invariant violation in the document, across all slots.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        check_gdt_frames(&self.gdts, &mut out);
        for (i, m) in self.measures.iter().enumerate() {
            check_measure(m, &format!("measures.{}.", i + 1), &mut out);
        }
        for (i, r) in self.radii.iter().enumerate() {
            check_radius(r, &format!("radii.{}.", i + 1), &mut out);
        }
        for t in &self.threads {
            let mut nested = Vec::new();
            super::validate::check_thread(t, &mut nested);
            out.extend(nested);
        }
        for s in &self.surface_roughness {
            let mut nested = Vec::new();
            super::validate::check_roughness(s, &mut nested);
            out.extend(nested);
        }
        for slot in [
            self.material.clone().map(AnnotationRecord::Material),
            self.general_tolerance.clone().map(AnnotationRecord::GeneralTolerance),
            self.title_block.clone().map(AnnotationRecord::TitleBlock),
            self.notes.clone().map(AnnotationRecord::Notes),
        ]
        .into_iter()
        .flatten()
        {
            out.extend(check_record(&slot));
        }
        out
    }

    /// Break the document into per-category records. GD&T frames travel as
    /// one stacked record; list slots yield one record per entry.
    pub fn into_records(self) -> Vec<AnnotationRecord> {
        let mut out = Vec::new();
        if !self.gdts.is_empty() {
            out.push(AnnotationRecord::Gdt(self.gdts));
        }
        out.extend(self.measures.into_iter().map(AnnotationRecord::Measure));
        out.extend(self.threads.into_iter().map(AnnotationRecord::Thread));
        out.extend(
            self.surface_roughness
                .into_iter()
                .map(AnnotationRecord::SurfaceRoughness),
        );
        out.extend(self.radii.into_iter().map(AnnotationRecord::Radius));
        out.extend(self.material.map(AnnotationRecord::Material));
        out.extend(self.general_tolerance.map(AnnotationRecord::GeneralTolerance));
        out.extend(self.title_block.map(AnnotationRecord::TitleBlock));
        out.extend(self.notes.map(AnnotationRecord::Notes));
        out
    }

    /// Absorb one record. GD&T frames are appended and renumbered; list
    /// categories accumulate. A singular slot that is already occupied
    /// rejects the record and returns `false`.
    pub fn absorb(&mut self, record: AnnotationRecord) -> bool {
        match record {
            AnnotationRecord::Gdt(frames) => {
                for mut frame in frames {
                    frame.index = self.gdts.len() as u32 + 1;
                    self.gdts.push(frame);
                }
                true
            }
            AnnotationRecord::Measure(m) => {
                self.measures.push(m);
                true
            }
            AnnotationRecord::Thread(t) => {
                self.threads.push(t);
                true
            }
            AnnotationRecord::SurfaceRoughness(s) => {
                self.surface_roughness.push(s);
                true
            }
            AnnotationRecord::Radius(r) => {
                self.radii.push(r);
                true
            }
            AnnotationRecord::Material(m) => slot_fill(&mut self.material, m),
            AnnotationRecord::GeneralTolerance(g) => slot_fill(&mut self.general_tolerance, g),
            AnnotationRecord::TitleBlock(t) => slot_fill(&mut self.title_block, t),
            AnnotationRecord::Notes(n) => slot_fill(&mut self.notes, n),
        }
    }
}

fn slot_fill<T>(slot: &mut Option<T>, value: T) -> bool {
    if slot.is_some() {
        return false;
    }
    *slot = Some(value);
    true
}

// ---------------------------------------------------------------------------
// Serialization

/// Deterministic JSON text for a document in the requested dialect.
pub fn serialize_document(doc: &DrawingDocument, dialect: SchemaDialect) -> String {
    let value = match dialect {
        SchemaDialect::Document => document_value(doc),
        SchemaDialect::Patch => patch_value(doc),
    };
    serde_json::to_string_pretty(&value).expect("document serialization is infallible")
}

/// Convert the internal escape-form diameter prefix to the glyph used by the
/// document dialect: `U+2300 0.020` becomes `Ø0.020`.
fn to_glyph_form(text: &str) -> String {
    text.replace("U+2300 ", "Ø")
}

fn document_value(doc: &DrawingDocument) -> Value {
    let mut map = Map::new();
    map.insert(
        "Material".into(),
        Value::String(doc.material.as_ref().map(|m| m.designation.clone()).unwrap_or_default()),
    );
    map.insert(
        "Threads".into(),
        list_or_empty(doc.threads.iter().map(|t| json!({ "Type": render_thread(t) }))),
    );
    map.insert(
        "GD&T".into(),
        list_or_empty(doc.gdts.iter().map(|frame| {
            json!({
                "Type": gdt_symbol_name(frame.characteristic).unwrap_or("Unknown"),
                "Tolerance": to_glyph_form(&frame.tolerance),
                "Datums": frame.datums,
            })
        })),
    );
    map.insert(
        "General Tolerance".into(),
        Value::String(
            doc.general_tolerance
                .as_ref()
                .map(|g| g.text.clone())
                .unwrap_or_default(),
        ),
    );
    map.insert(
        "Radii".into(),
        list_or_empty(doc.radii.iter().map(|r| Value::String(render_radius(r)))),
    );
    map.insert(
        "Surface Roughness".into(),
        list_or_empty(
            doc.surface_roughness
                .iter()
                .map(|s| json!({ "Ra": s.value })),
        ),
    );
    map.insert(
        "Measures".into(),
        list_or_empty(doc.measures.iter().map(|m| {
            json!({
                "Feature": m.feature.clone().unwrap_or_default(),
                "Value": to_glyph_form(&render_measure_value(m)),
            })
        })),
    );
    map.insert(
        "Title Block".into(),
        match &doc.title_block {
            None => Value::String(String::new()),
            Some(t) => {
                let mut entries = Map::new();
                for (k, v) in &t.entries {
                    entries.insert(k.clone(), Value::String(v.clone()));
                }
                Value::Object(entries)
            }
        },
    );
    map.insert(
        "Notes".into(),
        Value::String(doc.notes.as_ref().map(|n| n.lines.join("\n")).unwrap_or_default()),
    );
    Value::Object(map)
}

/// Empty list slots serialize as `""` in the document dialect, matching the
/// export convention; nested empty lists (datums) stay `[]`.
fn list_or_empty(items: impl Iterator<Item = Value>) -> Value {
    let list: Vec<Value> = items.collect();
    if list.is_empty() {
        Value::String(String::new())
    } else {
        Value::Array(list)
    }
}

fn patch_value(doc: &DrawingDocument) -> Value {
    let mut map = Map::new();
    if !doc.gdts.is_empty() {
        map.insert(
            AnnotationCategory::Gdt.display_name().into(),
            Value::Array(doc.gdts.iter().map(patch_gdt_frame).collect()),
        );
    }
    if let Some(g) = &doc.general_tolerance {
        map.insert(
            AnnotationCategory::GeneralTolerance.display_name().into(),
            Value::String(g.text.clone()),
        );
    }
    if !doc.measures.is_empty() {
        map.insert(
            AnnotationCategory::Measure.display_name().into(),
            Value::Array(doc.measures.iter().map(patch_measure).collect()),
        );
    }
    if let Some(m) = &doc.material {
        map.insert(
            AnnotationCategory::Material.display_name().into(),
            Value::String(m.designation.clone()),
        );
    }
    if let Some(n) = &doc.notes {
        map.insert(
            AnnotationCategory::Note.display_name().into(),
            Value::Array(n.lines.iter().map(|l| Value::String(l.clone())).collect()),
        );
    }
    if !doc.radii.is_empty() {
        map.insert(
            AnnotationCategory::Radius.display_name().into(),
            Value::Array(
                doc.radii
                    .iter()
                    .map(|r| {
                        json!({
                            "quantity": quantity_string(r.quantity),
                            "value": r.value,
                        })
                    })
                    .collect(),
            ),
        );
    }
    if !doc.surface_roughness.is_empty() {
        map.insert(
            AnnotationCategory::SurfaceRoughness.display_name().into(),
            Value::Array(
                doc.surface_roughness
                    .iter()
                    .map(|s| {
                        json!({
                            "parameter": match s.parameter {
                                RoughnessParameter::Ra => "Ra",
                                RoughnessParameter::NGrade => "N",
                            },
                            "value": s.value,
                        })
                    })
                    .collect(),
            ),
        );
    }
    if !doc.threads.is_empty() {
        map.insert(
            AnnotationCategory::Thread.display_name().into(),
            Value::Array(
                doc.threads
                    .iter()
                    .map(|t| {
                        json!({
                            "quantity": quantity_string(t.quantity),
                            "designation": t.designation,
                            "fitClass": t.fit_class.clone().unwrap_or_default(),
                            "depthQualifier": match &t.depth {
                                None => String::new(),
                                Some(DepthQualifier::Thru) => "THRU".into(),
                                Some(DepthQualifier::Depth(d)) => d.clone(),
                            },
                        })
                    })
                    .collect(),
            ),
        );
    }
    if let Some(t) = &doc.title_block {
        let mut entries = Map::new();
        for (k, v) in &t.entries {
            entries.insert(k.clone(), Value::String(v.clone()));
        }
        map.insert(
            AnnotationCategory::TitleBlock.display_name().into(),
            Value::Object(entries),
        );
    }
    Value::Object(map)
}

fn patch_gdt_frame(frame: &GdtFrame) -> Value {
    json!({
        "index": frame.index,
        "geometricCharacteristic": escape_codepoint(frame.characteristic),
        "tolerance": frame.tolerance,
        "datumReference": frame.datums,
    })
}

fn patch_measure(m: &Measure) -> Value {
    let mut map = Map::new();
    if let Some(f) = &m.feature {
        map.insert("feature".into(), Value::String(f.clone()));
    }
    map.insert("quantity".into(), Value::String(quantity_string(m.quantity)));
    map.insert("nominalValue".into(), Value::String(m.nominal.clone()));
    if let Some(fit) = &m.fit_class {
        map.insert("fitClass".into(), Value::String(fit.clone()));
    }
    map.insert(
        "tolerance".into(),
        Value::String(m.tolerance.clone().unwrap_or_default()),
    );
    map.insert(
        "upperLimit".into(),
        Value::String(m.upper_limit.clone().unwrap_or_default()),
    );
    map.insert(
        "lowerLimit".into(),
        Value::String(m.lower_limit.clone().unwrap_or_default()),
    );
    if let Some(unit) = m.unit {
        map.insert("unit".into(), Value::String(unit.as_str().into()));
    }
    Value::Object(map)
}

fn quantity_string(q: Option<u32>) -> String {
    q.map(|v| v.to_string()).unwrap_or_default()
}

// ---------------------------------------------------------------------------
// Parsing

/// Parse JSON text in either dialect into a validated document.
pub fn parse_document(text: &str) -> Result<DrawingDocument, SchemaError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| SchemaError::MalformedJson(e.to_string()))?;
    let object = value
        .as_object()
        .ok_or_else(|| SchemaError::violation("$", "top level must be a JSON object"))?;

    let has_all_document_keys = DOCUMENT_KEYS.iter().all(|k| object.contains_key(*k));
    let has_document_only_key = DOCUMENT_ONLY_KEYS.iter().any(|k| object.contains_key(*k));

    let doc = if has_all_document_keys {
        for key in object.keys() {
            if !DOCUMENT_KEYS.contains(&key.as_str()) {
                return Err(SchemaError::violation(key, "unexpected document key"));
            }
        }
        parse_document_dialect(object)?
    } else if has_document_only_key {
        let missing: Vec<&str> = DOCUMENT_KEYS
            .iter()
            .copied()
            .filter(|k| !object.contains_key(*k))
            .collect();
        return Err(SchemaError::violation(
            "$",
            format!("document is missing category keys: {}", missing.join(", ")),
        ));
    } else {
        parse_patch_dialect(object)?
    };

    let violations = doc.validate();
    match violations.into_iter().next() {
        None => Ok(doc),
        Some(v) => Err(SchemaError::SchemaViolation {
            path: v.path,
            message: v.message,
        }),
    }
}

fn parse_document_dialect(object: &Map<String, Value>) -> Result<DrawingDocument, SchemaError> {
    let mut doc = DrawingDocument::default();

    if let Some(text) = non_empty_str(&object["Material"]) {
        doc.material = Some(MaterialSpec {
            designation: normalize_ws(text),
        });
    }

    for (i, entry) in entries_of(&object["Threads"], "Threads")?.iter().enumerate() {
        let path = format!("Threads.{}", i + 1);
        let text = string_field(entry, "Type", &path)?;
        doc.threads.push(
            parse_thread(&text).map_err(|e| SchemaError::violation(&path, e.to_string()))?,
        );
    }

    for (i, entry) in entries_of(&object["GD&T"], "GD&T")?.iter().enumerate() {
        let path = format!("GD&T.{}", i + 1);
        let name = string_field(entry, "Type", &path)?;
        let characteristic = lookup_gdt_symbol(&name)
            .map_err(|e| SchemaError::violation(format!("{path}.Type"), e.to_string()))?;
        let tolerance_text = string_field(entry, "Tolerance", &path)?;
        let tolerance = parse_gdt_tolerance(&tolerance_text)
            .map_err(|e| SchemaError::violation(format!("{path}.Tolerance"), e.to_string()))?;
        let datums = match entry.get("Datums") {
            None => Vec::new(),
            Some(Value::Array(items)) => items
                .iter()
                .enumerate()
                .map(|(j, item)| {
                    item.as_str()
                        .ok_or_else(|| {
                            SchemaError::violation(
                                format!("{path}.Datums.{}", j + 1),
                                "datum must be a string",
                            )
                        })
                        .and_then(|s| {
                            parse_datum(s).map_err(|e| {
                                SchemaError::violation(
                                    format!("{path}.Datums.{}", j + 1),
                                    e.to_string(),
                                )
                            })
                        })
                })
                .collect::<Result<Vec<_>, _>>()?,
            Some(Value::String(s)) if s.is_empty() => Vec::new(),
            Some(_) => {
                return Err(SchemaError::violation(
                    format!("{path}.Datums"),
                    "datums must be a list of strings",
                ))
            }
        };
        doc.gdts.push(GdtFrame {
            index: doc.gdts.len() as u32 + 1,
            characteristic,
            tolerance,
            datums,
        });
    }

    if let Some(text) = non_empty_str(&object["General Tolerance"]) {
        doc.general_tolerance = Some(GeneralToleranceSpec {
            text: normalize_ws(text),
        });
    }

    for (i, entry) in string_entries_of(&object["Radii"], "Radii")?.iter().enumerate() {
        let path = format!("Radii.{}", i + 1);
        doc.radii
            .push(parse_radius(entry).map_err(|e| SchemaError::violation(&path, e.to_string()))?);
    }

    for (i, entry) in entries_of(&object["Surface Roughness"], "Surface Roughness")?
        .iter()
        .enumerate()
    {
        let path = format!("Surface Roughness.{}", i + 1);
        let value = string_field(entry, "Ra", &path)?;
        doc.surface_roughness.push(
            parse_roughness_value(&value)
                .map_err(|e| SchemaError::violation(&path, e.to_string()))?,
        );
    }

    for (i, entry) in entries_of(&object["Measures"], "Measures")?.iter().enumerate() {
        let path = format!("Measures.{}", i + 1);
        let value = string_field(entry, "Value", &path)?;
        let mut measure = parse_measure(&value)
            .map_err(|e| SchemaError::violation(format!("{path}.Value"), e.to_string()))?;
        match entry.get("Feature").and_then(Value::as_str) {
            Some(label) if !label.trim().is_empty() => {
                measure.feature = Some(normalize_ws(label));
            }
            _ => {}
        }
        doc.measures.push(measure);
    }

    match &object["Title Block"] {
        Value::String(s) if s.is_empty() => {}
        Value::Object(entries) => {
            let mut block = TitleBlock::default();
            for (k, v) in entries {
                let value = v.as_str().ok_or_else(|| {
                    SchemaError::violation(
                        format!("Title Block.{k}"),
                        "title block values must be strings",
                    )
                })?;
                block.entries.push((k.clone(), value.to_string()));
            }
            doc.title_block = Some(block);
        }
        _ => {
            return Err(SchemaError::violation(
                "Title Block",
                "expected an object or empty string",
            ))
        }
    }

    match &object["Notes"] {
        Value::String(s) => {
            let lines: Vec<String> = s
                .lines()
                .map(normalize_ws)
                .filter(|l| !l.is_empty())
                .collect();
            if !lines.is_empty() {
                doc.notes = Some(NotesBlock { lines });
            }
        }
        Value::Array(items) => {
            let lines: Vec<String> = items
                .iter()
                .filter_map(Value::as_str)
                .map(normalize_ws)
                .filter(|l| !l.is_empty())
                .collect();
            if !lines.is_empty() {
                doc.notes = Some(NotesBlock { lines });
            }
        }
        _ => return Err(SchemaError::violation("Notes", "expected a string")),
    }

    Ok(doc)
}

fn parse_patch_dialect(object: &Map<String, Value>) -> Result<DrawingDocument, SchemaError> {
    if object.is_empty() {
        return Err(SchemaError::violation("$", "missing category keys"));
    }
    let mut doc = DrawingDocument::default();
    for (key, value) in object {
        let category = AnnotationCategory::from_name(key)
            .map_err(|_| SchemaError::violation(key, "unknown category key"))?;
        if matches!(value, Value::String(s) if s.is_empty()) {
            continue;
        }
        match category {
            AnnotationCategory::Gdt => {
                for (i, entry) in entries_of(value, key)?.iter().enumerate() {
                    let path = format!("{key}.{}", i + 1);
                    doc.gdts.push(parse_patch_gdt_frame(entry, &path)?);
                }
            }
            AnnotationCategory::Measure => {
                for (i, entry) in entries_of(value, key)?.iter().enumerate() {
                    let path = format!("{key}.{}", i + 1);
                    doc.measures.push(parse_patch_measure(entry, &path)?);
                }
            }
            AnnotationCategory::Thread => {
                for (i, entry) in entries_of(value, key)?.iter().enumerate() {
                    let path = format!("{key}.{}", i + 1);
                    doc.threads.push(parse_patch_thread(entry, &path)?);
                }
            }
            AnnotationCategory::SurfaceRoughness => {
                for (i, entry) in entries_of(value, key)?.iter().enumerate() {
                    let path = format!("{key}.{}", i + 1);
                    let parameter = match string_field(entry, "parameter", &path)?.as_str() {
                        "Ra" => RoughnessParameter::Ra,
                        "N" => RoughnessParameter::NGrade,
                        other => {
                            return Err(SchemaError::violation(
                                format!("{path}.parameter"),
                                format!("unknown roughness parameter {other:?}"),
                            ))
                        }
                    };
                    doc.surface_roughness.push(SurfaceRoughnessSpec {
                        parameter,
                        value: string_field(entry, "value", &path)?,
                    });
                }
            }
            AnnotationCategory::Radius => {
                for (i, entry) in entries_of(value, key)?.iter().enumerate() {
                    let path = format!("{key}.{}", i + 1);
                    doc.radii.push(RadiusSpec {
                        quantity: quantity_field(entry, "quantity", &path)?,
                        value: string_field(entry, "value", &path)?,
                    });
                }
            }
            AnnotationCategory::Material => {
                doc.material = Some(MaterialSpec {
                    designation: plain_string(value, key)?,
                });
            }
            AnnotationCategory::GeneralTolerance => {
                doc.general_tolerance = Some(GeneralToleranceSpec {
                    text: plain_string(value, key)?,
                });
            }
            AnnotationCategory::Note => {
                let items = value.as_array().ok_or_else(|| {
                    SchemaError::violation(key, "notes must be a list of lines")
                })?;
                let lines = items
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        v.as_str().map(str::to_string).ok_or_else(|| {
                            SchemaError::violation(
                                format!("{key}.{}", i + 1),
                                "note lines must be strings",
                            )
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                doc.notes = Some(NotesBlock { lines });
            }
            AnnotationCategory::TitleBlock => {
                let entries = value.as_object().ok_or_else(|| {
                    SchemaError::violation(key, "title block must be an object")
                })?;
                let mut block = TitleBlock::default();
                for (k, v) in entries {
                    let text = v.as_str().ok_or_else(|| {
                        SchemaError::violation(
                            format!("{key}.{k}"),
                            "title block values must be strings",
                        )
                    })?;
                    block.entries.push((k.clone(), text.to_string()));
                }
                doc.title_block = Some(block);
            }
        }
    }
    Ok(doc)
}

fn parse_patch_gdt_frame(entry: &Value, path: &str) -> Result<GdtFrame, SchemaError> {
    let index = match entry.get("index") {
        Some(Value::Number(n)) => n.as_u64().unwrap_or(0) as u32,
        Some(Value::String(s)) => s.parse().map_err(|_| {
            SchemaError::violation(format!("{path}.index"), "index must be an integer")
        })?,
        _ => {
            return Err(SchemaError::violation(
                format!("{path}.index"),
                "missing frame index",
            ))
        }
    };
    let token = string_field(entry, "geometricCharacteristic", path)?;
    let characteristic = parse_symbol_token(&token).ok_or_else(|| {
        SchemaError::violation(
            format!("{path}.geometricCharacteristic"),
            format!("{token:?} is not a tabulated symbol"),
        )
    })?;
    let tolerance_text = string_field(entry, "tolerance", path)?;
    let tolerance = parse_gdt_tolerance(&tolerance_text)
        .map_err(|e| SchemaError::violation(format!("{path}.tolerance"), e.to_string()))?;
    let datums = match entry.get("datumReference") {
        None => Vec::new(),
        Some(Value::Array(items)) => items
            .iter()
            .enumerate()
            .map(|(j, item)| {
                item.as_str()
                    .ok_or_else(|| {
                        SchemaError::violation(
                            format!("{path}.datumReference.{}", j + 1),
                            "datum must be a string",
                        )
                    })
                    .and_then(|s| {
                        parse_datum(s).map_err(|e| {
                            SchemaError::violation(
                                format!("{path}.datumReference.{}", j + 1),
                                e.to_string(),
                            )
                        })
                    })
            })
            .collect::<Result<Vec<_>, _>>()?,
        Some(_) => {
            return Err(SchemaError::violation(
                format!("{path}.datumReference"),
                "datum references must be a list",
            ))
        }
    };
    Ok(GdtFrame {
        index,
        characteristic,
        tolerance,
        datums,
    })
}

fn parse_patch_measure(entry: &Value, path: &str) -> Result<Measure, SchemaError> {
    let mut measure = Measure {
        feature: optional_string(entry, "feature"),
        quantity: quantity_field(entry, "quantity", path)?,
        nominal: string_field(entry, "nominalValue", path)?,
        fit_class: optional_string(entry, "fitClass"),
        tolerance: optional_string(entry, "tolerance"),
        upper_limit: optional_string(entry, "upperLimit"),
        lower_limit: optional_string(entry, "lowerLimit"),
        unit: None,
    };
    measure.unit = match optional_string(entry, "unit").as_deref() {
        None => None,
        Some("mm") => Some(MeasureUnit::Millimetre),
        Some("°") => Some(MeasureUnit::Degree),
        Some(other) => {
            return Err(SchemaError::violation(
                format!("{path}.unit"),
                format!("unknown unit {other:?}"),
            ))
        }
    };
    Ok(measure)
}

fn parse_patch_thread(entry: &Value, path: &str) -> Result<ThreadSpec, SchemaError> {
    let depth = match optional_string(entry, "depthQualifier").as_deref() {
        None => None,
        Some("THRU") | Some("THROUGH") => Some(DepthQualifier::Thru),
        Some(d) => Some(DepthQualifier::Depth(d.to_string())),
    };
    Ok(ThreadSpec {
        quantity: quantity_field(entry, "quantity", path)?,
        designation: string_field(entry, "designation", path)?,
        fit_class: optional_string(entry, "fitClass"),
        depth,
    })
}

// ---------------------------------------------------------------------------
// JSON access helpers

fn non_empty_str(value: &Value) -> Option<&str> {
    value.as_str().filter(|s| !s.is_empty())
}

/// A list slot: `""` and `[]` both mean empty.
fn entries_of<'v>(value: &'v Value, key: &str) -> Result<Vec<&'v Value>, SchemaError> {
    match value {
        Value::String(s) if s.is_empty() => Ok(Vec::new()),
        Value::Array(items) => Ok(items.iter().collect()),
        _ => Err(SchemaError::violation(
            key,
            "expected a list of entries or an empty string",
        )),
    }
}

fn string_entries_of(value: &Value, key: &str) -> Result<Vec<String>, SchemaError> {
    entries_of(value, key)?
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_str().map(str::to_string).ok_or_else(|| {
                SchemaError::violation(format!("{key}.{}", i + 1), "expected a string entry")
            })
        })
        .collect()
}

fn string_field(entry: &Value, field: &str, path: &str) -> Result<String, SchemaError> {
    entry
        .get(field)
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| {
            SchemaError::violation(format!("{path}.{field}"), "missing string field")
        })
}

fn optional_string(entry: &Value, field: &str) -> Option<String> {
    entry
        .get(field)
        .and_then(Value::as_str)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
}

fn quantity_field(entry: &Value, field: &str, path: &str) -> Result<Option<u32>, SchemaError> {
    match entry.get(field) {
        None => Ok(None),
        Some(Value::String(s)) if s.is_empty() => Ok(None),
        Some(Value::String(s)) => s.parse().map(Some).map_err(|_| {
            SchemaError::violation(
                format!("{path}.{field}"),
                format!("{s:?} is not a positive integer"),
            )
        }),
        Some(Value::Number(n)) => n
            .as_u64()
            .map(|v| Some(v as u32))
            .ok_or_else(|| {
                SchemaError::violation(format!("{path}.{field}"), "quantity must be positive")
            }),
        Some(_) => Err(SchemaError::violation(
            format!("{path}.{field}"),
            "quantity must be a string or number",
        )),
    }
}

fn plain_string(value: &Value, key: &str) -> Result<String, SchemaError> {
    value
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| SchemaError::violation(key, "expected a string"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gdt_patch_json() -> &'static str {
        r#"{"GD&Ts": [{"index": 1, "geometricCharacteristic": "U+2316", "tolerance": "U+2300 0.014 (M)", "datumReference": ["A", "B", "C"]}]}"#
    }

    #[test]
    fn patch_label_parses() {
        let doc = parse_document(gdt_patch_json()).unwrap();
        assert_eq!(doc.gdts.len(), 1);
        assert_eq!(doc.gdts[0].characteristic, '\u{2316}');
        assert_eq!(doc.gdts[0].tolerance, "U+2300 0.014 (M)");
        assert_eq!(doc.gdts[0].datums, vec!["A", "B", "C"]);
    }

    #[test]
    fn empty_object_is_a_violation() {
        assert!(matches!(
            parse_document("{}"),
            Err(SchemaError::SchemaViolation { .. })
        ));
    }

    #[test]
    fn truncated_text_is_malformed() {
        assert!(matches!(
            parse_document("{\"Material\": \"C-4"),
            Err(SchemaError::MalformedJson(_))
        ));
    }

    #[test]
    fn all_empty_document_emits_nine_keys() {
        let doc = DrawingDocument::default();
        let text = serialize_document(&doc, SchemaDialect::Document);
        let value: Value = serde_json::from_str(&text).unwrap();
        let object = value.as_object().unwrap();
        assert_eq!(object.len(), 9);
        let keys: Vec<&String> = object.keys().collect();
        assert_eq!(keys, DOCUMENT_KEYS.to_vec());
        for v in object.values() {
            assert_eq!(v, &Value::String(String::new()));
        }
    }

    #[test]
    fn document_round_trip_preserves_bytes() {
        let doc = DrawingDocument {
            material: Some(MaterialSpec {
                designation: "C-45".into(),
            }),
            threads: vec![ThreadSpec {
                quantity: Some(6),
                designation: "M5".into(),
                fit_class: None,
                depth: Some(DepthQualifier::Thru),
            }],
            gdts: vec![GdtFrame {
                index: 1,
                characteristic: '\u{2316}',
                tolerance: "U+2300 0.020".into(),
                datums: vec!["A".into(), "B(M)".into()],
            }],
            ..DrawingDocument::default()
        };
        let text = serialize_document(&doc, SchemaDialect::Document);
        let parsed = parse_document(&text).unwrap();
        assert_eq!(parsed, doc);
        assert_eq!(serialize_document(&parsed, SchemaDialect::Document), text);
    }

    #[test]
    fn glyph_conversion_in_document_dialect() {
        let doc = DrawingDocument {
            gdts: vec![GdtFrame {
                index: 1,
                characteristic: '\u{2316}',
                tolerance: "U+2300 0.020".into(),
                datums: vec![],
            }],
            ..DrawingDocument::default()
        };
        let text = serialize_document(&doc, SchemaDialect::Document);
        assert!(text.contains("\"Ø0.020\""));
        assert!(text.contains("\"Position\""));
        assert!(!text.contains("U+2300"));
    }

    #[test]
    fn dialect_auto_detection() {
        let patch = parse_document(gdt_patch_json()).unwrap();
        let document_text = serialize_document(&patch, SchemaDialect::Document);
        let document = parse_document(&document_text).unwrap();
        assert_eq!(document, patch);
    }

    #[test]
    fn patch_serialization_emits_one_key_per_populated_slot() {
        let doc = parse_document(gdt_patch_json()).unwrap();
        let text = serialize_document(&doc, SchemaDialect::Patch);
        let value: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value.as_object().unwrap().len(), 1);
        assert!(value.get("GD&Ts").is_some());
    }

    #[test]
    fn absorb_renumbers_gdt_frames() {
        let mut doc = DrawingDocument::default();
        let frame = |index| GdtFrame {
            index,
            characteristic: '\u{2316}',
            tolerance: "0.1".into(),
            datums: vec![],
        };
        assert!(doc.absorb(AnnotationRecord::Gdt(vec![frame(1)])));
        assert!(doc.absorb(AnnotationRecord::Gdt(vec![frame(1)])));
        assert_eq!(doc.gdts[1].index, 2);
        assert!(doc.absorb(AnnotationRecord::Material(MaterialSpec {
            designation: "C-45".into()
        })));
        assert!(!doc.absorb(AnnotationRecord::Material(MaterialSpec {
            designation: "AL-6061".into()
        })));
    }
}
