use serde::{Deserialize, Serialize};

use super::category::AnnotationCategory;

/// One compartment row of a feature control frame.
///
/// `tolerance` keeps the zone symbol in `U+XXXX` escape form, e.g.
/// `"U+2300 0.014 (M)"`. Datum entries are a capital letter plus optional
/// material-condition modifier, e.g. `"B(M)"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GdtFrame {
    /// 1-based ordinal of the frame within its patch or document.
    pub index: u32,
    /// Geometric characteristic; always one of the 14 table codepoints.
    pub characteristic: char,
    pub tolerance: String,
    pub datums: Vec<String>,
}

/// Unit suffix of a dimensional callout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasureUnit {
    /// Rendered as a space-separated `mm` suffix.
    Millimetre,
    /// Rendered as a `°` glued to the value.
    Degree,
}

impl MeasureUnit {
    pub fn as_str(self) -> &'static str {
        match self {
            MeasureUnit::Millimetre => "mm",
            MeasureUnit::Degree => "°",
        }
    }
}

/// A dimensional callout.
///
/// Values are canonical decimal text, never floats, so trailing zeros such as
/// `"0.020"` survive round trips. The diameter prefix is kept in escape form
/// (`"U+2300 28"`). `tolerance` (symmetric `±`) and the limit pair are
/// mutually exclusive.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Measure {
    /// Feature label carried by the whole-drawing dialect (e.g. "Shaft Length").
    pub feature: Option<String>,
    pub quantity: Option<u32>,
    pub nominal: String,
    /// ISO fit class on the nominal, e.g. "H7".
    pub fit_class: Option<String>,
    /// Symmetric tolerance including the sign, e.g. "±0.05".
    pub tolerance: Option<String>,
    pub upper_limit: Option<String>,
    pub lower_limit: Option<String>,
    pub unit: Option<MeasureUnit>,
}

/// Depth qualifier of a thread callout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DepthQualifier {
    /// Through hole; `THROUGH` is normalized to this on parse.
    Thru,
    /// Explicit depth value as decimal text.
    Depth(String),
}

/// A thread callout such as `6×M5 TAP THRU` or `M20×2-6H`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreadSpec {
    pub quantity: Option<u32>,
    /// Series letter plus diameter, with optional `×pitch`, e.g. "M20×2".
    pub designation: String,
    pub fit_class: Option<String>,
    pub depth: Option<DepthQualifier>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RoughnessParameter {
    /// Arithmetic-mean roughness in µm.
    Ra,
    /// ISO roughness grade N1–N12.
    NGrade,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceRoughnessSpec {
    pub parameter: RoughnessParameter,
    /// `"0.8 µm"` for Ra, `"N6"` for grades.
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadiusSpec {
    pub quantity: Option<u32>,
    /// `"R"` + positive decimal, e.g. "R12".
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaterialSpec {
    pub designation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralToleranceSpec {
    pub text: String,
}

/// Ordered key/value entries of a title block. Keys are unique; values may
/// be empty.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TitleBlock {
    pub entries: Vec<(String, String)>,
}

impl TitleBlock {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotesBlock {
    pub lines: Vec<String>,
}

/// One parsed annotation of any category.
///
/// A GD&T patch may contain several stacked frames, so that variant carries
/// a list; all other categories are single records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AnnotationRecord {
    Gdt(Vec<GdtFrame>),
    Measure(Measure),
    Thread(ThreadSpec),
    SurfaceRoughness(SurfaceRoughnessSpec),
    Radius(RadiusSpec),
    Material(MaterialSpec),
    GeneralTolerance(GeneralToleranceSpec),
    TitleBlock(TitleBlock),
    Notes(NotesBlock),
}

impl AnnotationRecord {
    pub fn category(&self) -> AnnotationCategory {
        match self {
            AnnotationRecord::Gdt(_) => AnnotationCategory::Gdt,
            AnnotationRecord::Measure(_) => AnnotationCategory::Measure,
            AnnotationRecord::Thread(_) => AnnotationCategory::Thread,
            AnnotationRecord::SurfaceRoughness(_) => AnnotationCategory::SurfaceRoughness,
            AnnotationRecord::Radius(_) => AnnotationCategory::Radius,
            AnnotationRecord::Material(_) => AnnotationCategory::Material,
            AnnotationRecord::GeneralTolerance(_) => AnnotationCategory::GeneralTolerance,
            AnnotationRecord::TitleBlock(_) => AnnotationCategory::TitleBlock,
            AnnotationRecord::Notes(_) => AnnotationCategory::Note,
        }
    }
}

/// True for unsigned decimal text like `81` or `0.020` (decimal point only,
/// no comma).
pub(crate) fn is_decimal(s: &str) -> bool {
    let mut parts = s.splitn(2, '.');
    let int = parts.next().unwrap_or("");
    let frac = parts.next();
    if int.is_empty() || !int.bytes().all(|b| b.is_ascii_digit()) {
        return false;
    }
    match frac {
        None => true,
        Some(f) => !f.is_empty() && f.bytes().all(|b| b.is_ascii_digit()),
    }
}

/// True for decimal text with an optional leading sign, e.g. `-0.1`, `+0.3`,
/// `0`.
pub(crate) fn is_signed_decimal(s: &str) -> bool {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    is_decimal(body)
}

/// Numeric value of signed decimal text.
pub(crate) fn signed_decimal_value(s: &str) -> Option<f64> {
    if is_signed_decimal(s) {
        s.parse::<f64>().ok()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_text_shapes() {
        assert!(is_decimal("81"));
        assert!(is_decimal("0.020"));
        assert!(!is_decimal("0,020"));
        assert!(!is_decimal(".5"));
        assert!(!is_decimal("5."));
        assert!(!is_decimal(""));
        assert!(is_signed_decimal("-0.1"));
        assert!(is_signed_decimal("+0.3"));
        assert!(is_signed_decimal("0"));
        assert!(!is_signed_decimal("+-1"));
    }

    #[test]
    fn record_category_mapping() {
        let rec = AnnotationRecord::Material(MaterialSpec {
            designation: "C-45".into(),
        });
        assert_eq!(rec.category(), AnnotationCategory::Material);
    }
}
