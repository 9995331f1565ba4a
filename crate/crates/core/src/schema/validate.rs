use serde::{Deserialize, Serialize};

use super::category::AnnotationCategory;
use super::records::*;
use super::symbols::gdt_symbol_name;
use super::SchemaError;

/// One invariant failure, located by a field path such as
/// `gdts.2.tolerance`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl Violation {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Violation {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// Check `record` against the invariants of `category`.
///
/// Returns `CategoryMismatch` when the record is of a different category, and
/// `InvalidRecord` with the full violation list when any invariant fails.
pub fn validate_record(
    category: AnnotationCategory,
    record: &AnnotationRecord,
) -> Result<(), SchemaError> {
    if record.category() != category {
        return Err(SchemaError::CategoryMismatch {
            expected: category.display_name().to_string(),
            actual: record.category().display_name().to_string(),
        });
    }
    let violations = check_record(record);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(SchemaError::InvalidRecord(violations))
    }
}

/// Collect every invariant violation of a record. Empty means valid.
pub fn check_record(record: &AnnotationRecord) -> Vec<Violation> {
    let mut out = Vec::new();
    match record {
        AnnotationRecord::Gdt(frames) => check_gdt_frames(frames, &mut out),
        AnnotationRecord::Measure(m) => check_measure(m, "", &mut out),
        AnnotationRecord::Thread(t) => check_thread(t, &mut out),
        AnnotationRecord::SurfaceRoughness(s) => check_roughness(s, &mut out),
        AnnotationRecord::Radius(r) => check_radius(r, "", &mut out),
        AnnotationRecord::Material(m) => {
            if m.designation.trim().is_empty() {
                out.push(Violation::new("designation", "material designation is empty"));
            }
        }
        AnnotationRecord::GeneralTolerance(g) => {
            if g.text.trim().is_empty() {
                out.push(Violation::new("text", "general tolerance text is empty"));
            }
        }
        AnnotationRecord::TitleBlock(t) => check_title_block(t, &mut out),
        AnnotationRecord::Notes(n) => {
            for (i, line) in n.lines.iter().enumerate() {
                if line.trim().is_empty() {
                    out.push(Violation::new(format!("notes.{}", i + 1), "empty note line"));
                }
            }
        }
    }
    out
}

pub(crate) fn check_gdt_frames(frames: &[GdtFrame], out: &mut Vec<Violation>) {
    for (i, frame) in frames.iter().enumerate() {
        let expected = (i + 1) as u32;
        if frame.index != expected {
            out.push(Violation::new(
                format!("gdts.{}.index", frame.index),
                format!("indices must be contiguous from 1; expected {expected}"),
            ));
        }
        check_gdt_frame(frame, out);
    }
}

pub(crate) fn check_gdt_frame(frame: &GdtFrame, out: &mut Vec<Violation>) {
    let base = format!("gdts.{}", frame.index);
    if frame.index == 0 {
        out.push(Violation::new(format!("{base}.index"), "index must be >= 1"));
    }
    if gdt_symbol_name(frame.characteristic).is_err() {
        out.push(Violation::new(
            format!("{base}.geometricCharacteristic"),
            format!(
                "U+{:04X} is not one of the 14 tabulated symbols",
                frame.characteristic as u32
            ),
        ));
    }
    if frame.tolerance.trim().is_empty() {
        out.push(Violation::new(format!("{base}.tolerance"), "tolerance is empty"));
    } else if !contains_decimal(&frame.tolerance) {
        out.push(Violation::new(
            format!("{base}.tolerance"),
            "tolerance contains no decimal value",
        ));
    }
    for (j, datum) in frame.datums.iter().enumerate() {
        if !is_datum_ref(datum) {
            out.push(Violation::new(
                format!("{base}.datumReference.{}", j + 1),
                format!("{datum:?} is not letter + optional (M)/(L) modifier"),
            ));
        }
    }
}

pub(crate) fn check_measure(m: &Measure, prefix: &str, out: &mut Vec<Violation>) {
    let path = |f: &str| format!("{prefix}{f}");
    if m.nominal.trim().is_empty() {
        out.push(Violation::new(path("nominalValue"), "nominal value is required"));
    } else if !is_nominal_value(&m.nominal) {
        out.push(Violation::new(
            path("nominalValue"),
            format!("{:?} is not an optional U+2300 prefix plus decimal", m.nominal),
        ));
    }
    if let Some(q) = m.quantity {
        if q == 0 {
            out.push(Violation::new(path("quantity"), "quantity must be positive"));
        }
    }
    if let Some(t) = &m.tolerance {
        if !is_symmetric_tolerance(t) {
            out.push(Violation::new(
                path("tolerance"),
                format!("{t:?} is not ± plus a decimal"),
            ));
        }
    }
    for (field, value) in [("upperLimit", &m.upper_limit), ("lowerLimit", &m.lower_limit)] {
        if let Some(v) = value {
            if !is_signed_decimal(v) {
                out.push(Violation::new(
                    path(field),
                    format!("{v:?} is not signed decimal text"),
                ));
            }
        }
    }
    if let (Some(u), Some(l)) = (&m.upper_limit, &m.lower_limit) {
        if let (Some(uv), Some(lv)) = (signed_decimal_value(u), signed_decimal_value(l)) {
            if uv < lv {
                out.push(Violation::new(
                    path("upperLimit"),
                    format!("upper limit {u} < lower limit {l}"),
                ));
            }
        }
    }
    if m.tolerance.is_some() && (m.upper_limit.is_some() || m.lower_limit.is_some()) {
        out.push(Violation::new(
            path("tolerance"),
            "symmetric tolerance and limit pair are mutually exclusive",
        ));
    }
    if let Some(fit) = &m.fit_class {
        if !is_fit_class(fit) {
            out.push(Violation::new(
                path("fitClass"),
                format!("{fit:?} is not a letter followed by digits"),
            ));
        }
    }
}

pub(crate) fn check_thread(t: &ThreadSpec, out: &mut Vec<Violation>) {
    let mut chars = t.designation.chars();
    let series_ok = matches!(chars.next(), Some(c) if c.is_ascii_uppercase())
        && matches!(chars.next(), Some(c) if c.is_ascii_digit());
    if !series_ok {
        out.push(Violation::new(
            "designation",
            format!(
                "{:?} does not begin with a thread-series letter and diameter",
                t.designation
            ),
        ));
    }
    if let Some(q) = t.quantity {
        if q == 0 {
            out.push(Violation::new("quantity", "quantity must be positive"));
        }
    }
    if let Some(fit) = &t.fit_class {
        if fit.is_empty() || !fit.chars().all(|c| c.is_ascii_alphanumeric()) {
            out.push(Violation::new(
                "fitClass",
                format!("{fit:?} is not alphanumeric"),
            ));
        }
    }
    if let Some(DepthQualifier::Depth(d)) = &t.depth {
        if !is_decimal(d) {
            out.push(Violation::new(
                "depthQualifier",
                format!("{d:?} is not a decimal depth"),
            ));
        }
    }
}

pub(crate) fn check_roughness(s: &SurfaceRoughnessSpec, out: &mut Vec<Violation>) {
    match s.parameter {
        RoughnessParameter::Ra => {
            let body = s.value.strip_suffix("µm").unwrap_or(&s.value).trim();
            let positive = is_decimal(body) && body.parse::<f64>().map_or(false, |v| v > 0.0);
            if !positive {
                out.push(Violation::new(
                    "value",
                    format!("{:?} is not a positive Ra decimal", s.value),
                ));
            }
        }
        RoughnessParameter::NGrade => {
            let grade = s
                .value
                .strip_prefix('N')
                .and_then(|d| d.parse::<u32>().ok());
            if !matches!(grade, Some(1..=12)) {
                out.push(Violation::new(
                    "value",
                    format!("{:?} is not an N1-N12 grade", s.value),
                ));
            }
        }
    }
}

pub(crate) fn check_radius(r: &RadiusSpec, prefix: &str, out: &mut Vec<Violation>) {
    let body = r.value.strip_prefix('R');
    let positive = body
        .map(|b| is_decimal(b) && b.parse::<f64>().map_or(false, |v| v > 0.0))
        .unwrap_or(false);
    if !positive {
        out.push(Violation::new(
            format!("{prefix}value"),
            format!("{:?} is not R plus a positive decimal", r.value),
        ));
    }
    if let Some(q) = r.quantity {
        if q == 0 {
            out.push(Violation::new(
                format!("{prefix}quantity"),
                "quantity must be positive",
            ));
        }
    }
}

fn check_title_block(t: &TitleBlock, out: &mut Vec<Violation>) {
    for (i, (key, _)) in t.entries.iter().enumerate() {
        if key.trim().is_empty() {
            out.push(Violation::new(format!("titleBlock.{}", i + 1), "empty key"));
        }
        if t.entries.iter().take(i).any(|(k, _)| k == key) {
            out.push(Violation::new(
                format!("titleBlock.{key}"),
                "duplicate title block key",
            ));
        }
    }
}

/// Datum entries: capital letter, optional `(M)`/`(L)` modifier.
pub(crate) fn is_datum_ref(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_uppercase() => {}
        _ => return false,
    }
    let rest: String = chars.collect();
    rest.is_empty() || rest == "(M)" || rest == "(L)"
}

/// Optional diameter prefix (escape form), decimal value.
pub(crate) fn is_nominal_value(s: &str) -> bool {
    let body = s.strip_prefix("U+2300 ").unwrap_or(s);
    is_decimal(body)
}

pub(crate) fn is_symmetric_tolerance(s: &str) -> bool {
    s.strip_prefix('±').map_or(false, is_decimal)
}

/// Fit class on a measure, e.g. `H7` or `h6`.
pub(crate) fn is_fit_class(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.clone().count() > 0
        && chars.all(|c| c.is_ascii_digit())
}

pub(crate) fn contains_decimal(s: &str) -> bool {
    s.split([' ', '|']).any(is_decimal)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig_gdt_record() -> AnnotationRecord {
        AnnotationRecord::Gdt(vec![GdtFrame {
            index: 1,
            characteristic: '\u{2316}',
            tolerance: "U+2300 0.014 (M)".into(),
            datums: vec!["A".into(), "B".into(), "C".into()],
        }])
    }

    #[test]
    fn position_frame_is_valid() {
        assert!(validate_record(AnnotationCategory::Gdt, &fig_gdt_record()).is_ok());
    }

    #[test]
    fn category_mismatch_detected() {
        let err = validate_record(AnnotationCategory::Measure, &fig_gdt_record()).unwrap_err();
        assert!(matches!(err, SchemaError::CategoryMismatch { .. }));
    }

    #[test]
    fn inverted_limits_rejected() {
        let measure = AnnotationRecord::Measure(Measure {
            nominal: "10".into(),
            upper_limit: Some("-0.1".into()),
            lower_limit: Some("+0.1".into()),
            ..Measure::default()
        });
        let violations = check_record(&measure);
        assert!(violations.iter().any(|v| v.message.contains('<')));
    }

    #[test]
    fn non_table_characteristic_rejected() {
        let rec = AnnotationRecord::Gdt(vec![GdtFrame {
            index: 1,
            characteristic: 'A',
            tolerance: "0.1".into(),
            datums: vec![],
        }]);
        let violations = check_record(&rec);
        assert!(violations
            .iter()
            .any(|v| v.path == "gdts.1.geometricCharacteristic"));
    }

    #[test]
    fn tolerance_and_limits_conflict() {
        let measure = AnnotationRecord::Measure(Measure {
            nominal: "10".into(),
            tolerance: Some("±0.1".into()),
            upper_limit: Some("+0.2".into()),
            lower_limit: Some("-0.2".into()),
            ..Measure::default()
        });
        assert!(!check_record(&measure).is_empty());
    }

    #[test]
    fn gdt_indices_must_be_contiguous() {
        let frame = |index| GdtFrame {
            index,
            characteristic: '\u{2316}',
            tolerance: "0.1".into(),
            datums: vec![],
        };
        let rec = AnnotationRecord::Gdt(vec![frame(1), frame(3)]);
        assert!(!check_record(&rec).is_empty());
    }

    #[test]
    fn roughness_grades_bounded() {
        let ok = AnnotationRecord::SurfaceRoughness(SurfaceRoughnessSpec {
            parameter: RoughnessParameter::NGrade,
            value: "N6".into(),
        });
        assert!(check_record(&ok).is_empty());
        let bad = AnnotationRecord::SurfaceRoughness(SurfaceRoughnessSpec {
            parameter: RoughnessParameter::NGrade,
            value: "N13".into(),
        });
        assert!(!check_record(&bad).is_empty());
    }

    #[test]
    fn datum_patterns() {
        assert!(is_datum_ref("A"));
        assert!(is_datum_ref("B(M)"));
        assert!(is_datum_ref("C(L)"));
        assert!(!is_datum_ref("a"));
        assert!(!is_datum_ref("B(X)"));
        assert!(!is_datum_ref("AB"));
    }
}
