//! Canonical transcriptions of records: `parse_annotation(category,
//! render_annotation(r)) == r` for every valid record.

use crate::schema::{
    escape_codepoint, AnnotationRecord, DepthQualifier, GdtFrame, Measure, MeasureUnit,
    RadiusSpec, RoughnessParameter, SurfaceRoughnessSpec, ThreadSpec, TitleBlock,
};

/// Canonical feature-control-frame transcription, one frame per line:
/// `U+2316 | U+2300 0.014 (M) | A | B | C`.
pub fn render_gdt_frames(frames: &[GdtFrame]) -> String {
    frames
        .iter()
        .map(|frame| {
            let mut parts = vec![escape_codepoint(frame.characteristic), frame.tolerance.clone()];
            parts.extend(frame.datums.iter().cloned());
            parts.join(" | ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Canonical measure transcription without the feature label, e.g.
/// `2×4 mm`, `U+2300 28 ±0.05 mm`, `U+2300 0.980 +0.005/-0.000`.
pub fn render_measure_value(m: &Measure) -> String {
    let mut out = String::new();
    if let Some(q) = m.quantity {
        out.push_str(&format!("{q}×"));
    }
    out.push_str(&m.nominal);
    if m.unit == Some(MeasureUnit::Degree) {
        out.push('°');
    }
    if let Some(fit) = &m.fit_class {
        out.push(' ');
        out.push_str(fit);
    }
    if let Some(t) = &m.tolerance {
        out.push(' ');
        out.push_str(t);
    }
    if let (Some(u), Some(l)) = (&m.upper_limit, &m.lower_limit) {
        out.push(' ');
        out.push_str(u);
        out.push('/');
        out.push_str(l);
    }
    if m.unit == Some(MeasureUnit::Millimetre) {
        out.push_str(" mm");
    }
    out
}

pub fn render_measure(m: &Measure) -> String {
    match &m.feature {
        Some(label) => format!("{label}: {}", render_measure_value(m)),
        None => render_measure_value(m),
    }
}

/// Canonical thread transcription, e.g. `6×M5 TAP THRU` or `M20×2-6H`.
pub fn render_thread(t: &ThreadSpec) -> String {
    let mut out = String::new();
    if let Some(q) = t.quantity {
        out.push_str(&format!("{q}×"));
    }
    out.push_str(&t.designation);
    if let Some(fit) = &t.fit_class {
        out.push('-');
        out.push_str(fit);
    }
    match &t.depth {
        Some(DepthQualifier::Thru) => out.push_str(" TAP THRU"),
        Some(DepthQualifier::Depth(d)) => {
            out.push(' ');
            out.push_str(d);
        }
        None => {}
    }
    out
}

pub fn render_surface_roughness(s: &SurfaceRoughnessSpec) -> String {
    match s.parameter {
        RoughnessParameter::Ra => format!("Ra {}", s.value),
        RoughnessParameter::NGrade => s.value.clone(),
    }
}

pub fn render_radius(r: &RadiusSpec) -> String {
    match r.quantity {
        Some(q) => format!("{q}×{}", r.value),
        None => r.value.clone(),
    }
}

pub fn render_title_block(t: &TitleBlock) -> String {
    t.entries
        .iter()
        .map(|(k, v)| {
            if v.is_empty() {
                format!("{k}:")
            } else {
                format!("{k}: {v}")
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Deterministic canonical transcription of any record.
pub fn render_annotation(record: &AnnotationRecord) -> String {
    match record {
        AnnotationRecord::Gdt(frames) => render_gdt_frames(frames),
        AnnotationRecord::Measure(m) => render_measure(m),
        AnnotationRecord::Thread(t) => render_thread(t),
        AnnotationRecord::SurfaceRoughness(s) => render_surface_roughness(s),
        AnnotationRecord::Radius(r) => render_radius(r),
        AnnotationRecord::Material(m) => m.designation.clone(),
        AnnotationRecord::GeneralTolerance(g) => g.text.clone(),
        AnnotationRecord::TitleBlock(t) => render_title_block(t),
        AnnotationRecord::Notes(n) => n.lines.join("\n"),
    }
}
