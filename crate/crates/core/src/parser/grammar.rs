//! Deterministic grammars mapping annotation transcriptions to structured
//! records.
//!
//! Transcription conventions:
//! - Feature control frames: one frame per line, compartments separated by
//!   `|` (or runs of two or more spaces when no pipe is present).
//! - Quantities accept `6X`, `6x`, and `6×` interchangeably.
//! - The diameter zone symbol is accepted as `U+2300`, `⌀`, or `Ø`;
//!   records store the escape form.
//! - `THROUGH` is normalized to `THRU`.
//! - Decimal points only; decimal commas are rejected.

use crate::schema::records::{is_decimal, is_signed_decimal};
use crate::schema::validate::{check_record, is_fit_class};
use crate::schema::{
    lookup_gdt_symbol, parse_symbol_token, AnnotationCategory, AnnotationRecord, DepthQualifier,
    GdtFrame, GeneralToleranceSpec, MaterialSpec, Measure, MeasureUnit, NotesBlock, RadiusSpec,
    RoughnessParameter, SurfaceRoughnessSpec, ThreadSpec, TitleBlock,
};

use super::ParseError;

/// Collapse runs of spaces/tabs and trim, preserving line structure.
pub(crate) fn normalize_ws(text: &str) -> String {
    text.lines()
        .map(|line| {
            line.split([' ', '\t'])
                .filter(|t| !t.is_empty())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n")
        .trim_matches('\n')
        .to_string()
}

/// Split a feature-control-frame line into compartments: `|` when present,
/// otherwise runs of two or more spaces.
fn split_compartments(line: &str) -> Vec<String> {
    if line.contains('|') {
        return line.split('|').map(|c| normalize_ws(c.trim())).collect();
    }
    let mut out = Vec::new();
    let mut current = String::new();
    let mut space_run = 0usize;
    for ch in line.trim().chars() {
        if ch == ' ' {
            space_run += 1;
            continue;
        }
        if space_run >= 2 && !current.is_empty() {
            out.push(current.clone());
            current.clear();
        } else if space_run == 1 && !current.is_empty() {
            current.push(' ');
        }
        space_run = 0;
        current.push(ch);
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

/// Diameter-symbol spellings accepted on input. `Ø` (LATIN CAPITAL O WITH
/// STROKE) is what drawings and whole-drawing exports typically contain.
const DIAMETER_GLYPHS: [char; 2] = ['\u{2300}', '\u{00D8}'];

fn strip_diameter_prefix(token: &str) -> Option<&str> {
    for glyph in DIAMETER_GLYPHS {
        if let Some(rest) = token.strip_prefix(glyph) {
            return Some(rest);
        }
    }
    None
}

/// Parse the tolerance compartment of a feature control frame into the
/// canonical `[U+2300 ]value[ (M)|(L)]` form.
pub(crate) fn parse_gdt_tolerance(text: &str) -> Result<String, ParseError> {
    let text = normalize_ws(text);
    if text.is_empty() {
        return Err(ParseError::EmptyTolerance);
    }
    let mut tokens: Vec<String> = Vec::new();
    for raw in text.split(' ') {
        if raw == "U+2300" || raw == "u+2300" {
            tokens.push("⌀".into());
        } else if let Some(rest) = strip_diameter_prefix(raw) {
            tokens.push("⌀".into());
            if !rest.is_empty() {
                tokens.push(rest.into());
            }
        } else {
            tokens.push(raw.into());
        }
    }
    let mut iter = tokens.iter().peekable();
    let mut diameter = false;
    if iter.peek().map(|t| t.as_str()) == Some("⌀") {
        diameter = true;
        iter.next();
    }
    let value = iter
        .next()
        .filter(|t| is_decimal(t))
        .ok_or(ParseError::EmptyTolerance)?;
    let modifier = match iter.next() {
        None => None,
        Some(t) if t == "(M)" || t == "(L)" => Some(t.clone()),
        Some(t) => {
            return Err(ParseError::MalformedTolerance(t.clone()));
        }
    };
    if let Some(extra) = iter.next() {
        return Err(ParseError::MalformedTolerance(extra.clone()));
    }
    let mut out = String::new();
    if diameter {
        out.push_str("U+2300 ");
    }
    out.push_str(value);
    if let Some(m) = modifier {
        out.push(' ');
        out.push_str(&m);
    }
    Ok(out)
}

/// Normalize a datum entry: `B (M)` becomes `B(M)`.
pub(crate) fn parse_datum(text: &str) -> Result<String, ParseError> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if crate::schema::validate::is_datum_ref(&compact) {
        Ok(compact)
    } else {
        Err(ParseError::MalformedDatum(text.trim().to_string()))
    }
}

/// Parse the transcription of one feature-control-frame region. Each
/// non-blank line becomes one frame; indices are assigned 1..n.
pub fn parse_gdt(text: &str) -> Result<Vec<GdtFrame>, ParseError> {
    let mut frames = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let compartments = split_compartments(line);
        if compartments.is_empty() {
            continue;
        }
        let characteristic = parse_symbol_token(&compartments[0])
            .ok_or_else(|| ParseError::UnknownSymbol(compartments[0].clone()))?;
        let tolerance = parse_gdt_tolerance(compartments.get(1).map(String::as_str).unwrap_or(""))?;
        let datums = compartments[2..]
            .iter()
            .filter(|c| !c.is_empty())
            .map(|c| parse_datum(c))
            .collect::<Result<Vec<_>, _>>()?;
        frames.push(GdtFrame {
            index: frames.len() as u32 + 1,
            characteristic,
            tolerance,
            datums,
        });
    }
    if frames.is_empty() {
        return Err(ParseError::EmptyAnnotation);
    }
    Ok(frames)
}

/// Split a leading repeat count: `8X`, `8x`, `8×`, possibly glued to the
/// next token (`2×4` → quantity 2, remainder `4`).
fn split_quantity(token: &str) -> Option<(u32, &str)> {
    let digits: String = token.chars().take_while(|c| c.is_ascii_digit()).collect();
    if digits.is_empty() {
        return None;
    }
    let rest = &token[digits.len()..];
    let mut chars = rest.chars();
    match chars.next() {
        Some('X') | Some('x') | Some('×') => {
            let quantity = digits.parse().ok()?;
            Some((quantity, chars.as_str()))
        }
        _ => None,
    }
}

/// Parse one dimensional callout. An optional `label:` prefix carries the
/// feature name used by the whole-drawing dialect.
pub fn parse_measure(text: &str) -> Result<Measure, ParseError> {
    let text = normalize_ws(text);
    let (feature, body) = match text.split_once(':') {
        Some((label, rest)) if !label.trim().is_empty() => {
            (Some(normalize_ws(label)), normalize_ws(rest))
        }
        _ => (None, text.clone()),
    };
    if body.is_empty() {
        return Err(ParseError::NoNominalValue);
    }

    let mut measure = Measure {
        feature,
        ..Measure::default()
    };
    let mut tokens: Vec<String> = body.split(' ').map(str::to_string).collect();

    // Quantity prefix, possibly glued: "2×4" or "8X U+2300 6.5".
    if let Some((q, rest)) = split_quantity(&tokens[0]) {
        measure.quantity = Some(q);
        if rest.is_empty() {
            tokens.remove(0);
        } else {
            tokens[0] = rest.to_string();
        }
    }
    if tokens.is_empty() {
        return Err(ParseError::NoNominalValue);
    }

    // Diameter prefix.
    let mut diameter = false;
    if tokens[0] == "U+2300" || tokens[0] == "u+2300" {
        diameter = true;
        tokens.remove(0);
    } else if let Some(rest) = strip_diameter_prefix(&tokens[0]) {
        diameter = true;
        tokens[0] = rest.to_string();
        if tokens[0].is_empty() {
            tokens.remove(0);
        }
    }
    if tokens.is_empty() {
        return Err(ParseError::NoNominalValue);
    }

    // Nominal value, with an optional glued degree sign.
    let mut nominal_token = tokens.remove(0);
    if let Some(v) = nominal_token.strip_suffix('°') {
        measure.unit = Some(MeasureUnit::Degree);
        nominal_token = v.to_string();
    }
    if !is_decimal(&nominal_token) {
        return Err(ParseError::NoNominalValue);
    }
    measure.nominal = if diameter {
        format!("U+2300 {nominal_token}")
    } else {
        nominal_token
    };

    let mut rest = tokens.into_iter().peekable();
    if let Some(tok) = rest.peek() {
        if is_fit_class(tok) {
            measure.fit_class = Some(rest.next().unwrap());
        }
    }

    while let Some(tok) = rest.next() {
        if let Some(value) = tok.strip_prefix('±') {
            if !is_decimal(value) {
                return Err(ParseError::MalformedTolerance(tok));
            }
            if measure.tolerance.is_some() || measure.upper_limit.is_some() {
                return Err(ParseError::ConflictingTolerances);
            }
            measure.tolerance = Some(tok);
        } else if tok.contains('/') {
            let (upper, lower) = tok
                .split_once('/')
                .filter(|(u, l)| is_signed_decimal(u) && is_signed_decimal(l))
                .ok_or_else(|| ParseError::MalformedTolerance(tok.clone()))?;
            if measure.tolerance.is_some() || measure.upper_limit.is_some() {
                return Err(ParseError::ConflictingTolerances);
            }
            measure.upper_limit = Some(upper.to_string());
            measure.lower_limit = Some(lower.to_string());
        } else if (tok.starts_with('+') || tok.starts_with('-')) && is_signed_decimal(&tok) {
            let lower = rest
                .next()
                .filter(|l| (l.starts_with('+') || l.starts_with('-')) && is_signed_decimal(l))
                .ok_or_else(|| ParseError::MalformedTolerance(tok.clone()))?;
            if measure.tolerance.is_some() || measure.upper_limit.is_some() {
                return Err(ParseError::ConflictingTolerances);
            }
            measure.upper_limit = Some(tok);
            measure.lower_limit = Some(lower);
        } else if tok == "mm" {
            measure.unit = Some(MeasureUnit::Millimetre);
        } else if tok == "°" {
            measure.unit = Some(MeasureUnit::Degree);
        } else {
            return Err(ParseError::UnexpectedToken(tok));
        }
    }

    finish(AnnotationRecord::Measure(measure)).map(|r| match r {
        AnnotationRecord::Measure(m) => m,
        _ => unreachable!(),
    })
}

/// Parse one thread callout such as `6X M20 X2-6H` or `6×M5 TAP THRU`.
pub fn parse_thread(text: &str) -> Result<ThreadSpec, ParseError> {
    let text = normalize_ws(text);
    if text.is_empty() {
        return Err(ParseError::NotAThread(text));
    }
    let mut tokens: Vec<String> = text.split(' ').map(str::to_string).collect();

    let mut spec = ThreadSpec {
        quantity: None,
        designation: String::new(),
        fit_class: None,
        depth: None,
    };
    if let Some((q, rest)) = split_quantity(&tokens[0]) {
        spec.quantity = Some(q);
        if rest.is_empty() {
            tokens.remove(0);
        } else {
            tokens[0] = rest.to_string();
        }
    }
    if tokens.is_empty() {
        return Err(ParseError::NotAThread(text));
    }

    // The designation (plus optional pitch and fit class) may span tokens:
    // "M20 X2-6H" and "M20×2-6H" are the same callout.
    let mut head = tokens.remove(0);
    while let Some(next) = tokens.first() {
        let starts_pitch = next.starts_with(['X', 'x', '×']);
        let starts_fit = next.starts_with('-');
        let head_ends_open = head.ends_with(['X', 'x', '×', '-']);
        if starts_pitch || starts_fit || head_ends_open {
            head.push_str(&tokens.remove(0));
        } else {
            break;
        }
    }

    let mut chars = head.chars().peekable();
    let series = chars.next().filter(|c| c.is_ascii_uppercase());
    let diameter: String = {
        let mut d = String::new();
        while let Some(c) = chars.peek() {
            if c.is_ascii_digit() || *c == '.' {
                d.push(*c);
                chars.next();
            } else {
                break;
            }
        }
        d
    };
    let (series, _) = match (series, is_decimal(&diameter)) {
        (Some(s), true) => (s, ()),
        _ => return Err(ParseError::NotAThread(text)),
    };
    let mut designation = format!("{series}{diameter}");
    if matches!(chars.peek(), Some('X') | Some('x') | Some('×')) {
        chars.next();
        let pitch: String = chars
            .clone()
            .take_while(|c| c.is_ascii_digit() || *c == '.')
            .collect();
        if !is_decimal(&pitch) {
            return Err(ParseError::NotAThread(text));
        }
        for _ in 0..pitch.len() {
            chars.next();
        }
        designation.push('×');
        designation.push_str(&pitch);
    }
    spec.designation = designation;
    if chars.peek() == Some(&'-') {
        chars.next();
        let fit: String = chars.by_ref().collect();
        if fit.is_empty() || !fit.chars().all(|c| c.is_ascii_alphanumeric()) {
            return Err(ParseError::NotAThread(text));
        }
        spec.fit_class = Some(fit);
    } else if chars.peek().is_some() {
        return Err(ParseError::NotAThread(text));
    }

    for tok in tokens {
        match tok.to_ascii_uppercase().as_str() {
            "TAP" => {}
            "THRU" | "THROUGH" => spec.depth = Some(DepthQualifier::Thru),
            _ if is_decimal(&tok) => spec.depth = Some(DepthQualifier::Depth(tok)),
            _ => return Err(ParseError::UnexpectedToken(tok)),
        }
    }

    finish(AnnotationRecord::Thread(spec)).map(|r| match r {
        AnnotationRecord::Thread(t) => t,
        _ => unreachable!(),
    })
}

/// Parse one surface-roughness callout: `Ra 0.8 µm` or an `N6`-style grade.
pub fn parse_surface_roughness(text: &str) -> Result<SurfaceRoughnessSpec, ParseError> {
    let text = normalize_ws(text);
    let spec = if let Some(value) = text.strip_prefix("Ra ").or_else(|| text.strip_prefix("Ra")) {
        SurfaceRoughnessSpec {
            parameter: RoughnessParameter::Ra,
            value: value.trim().to_string(),
        }
    } else if text.starts_with('N') && text.len() > 1 {
        SurfaceRoughnessSpec {
            parameter: RoughnessParameter::NGrade,
            value: text.clone(),
        }
    } else {
        return Err(ParseError::UnknownRoughnessForm(text));
    };
    finish(AnnotationRecord::SurfaceRoughness(spec)).map(|r| match r {
        AnnotationRecord::SurfaceRoughness(s) => s,
        _ => unreachable!(),
    })
}

/// Roughness value as it appears in whole-drawing exports, where the key is
/// always `Ra` and grades are distinguished by their `N` prefix.
pub fn parse_roughness_value(value: &str) -> Result<SurfaceRoughnessSpec, ParseError> {
    let value = normalize_ws(value);
    if value.starts_with('N') && value[1..].chars().all(|c| c.is_ascii_digit()) {
        parse_surface_roughness(&value)
    } else {
        parse_surface_roughness(&format!("Ra {value}"))
    }
}

/// Parse one radius callout: `R12`, optionally with a repeat count.
pub fn parse_radius(text: &str) -> Result<RadiusSpec, ParseError> {
    let text = normalize_ws(text);
    let mut tokens: Vec<String> = text.split(' ').map(str::to_string).collect();
    if tokens.is_empty() || tokens[0].is_empty() {
        return Err(ParseError::EmptyAnnotation);
    }
    let mut spec = RadiusSpec {
        quantity: None,
        value: String::new(),
    };
    if let Some((q, rest)) = split_quantity(&tokens[0]) {
        spec.quantity = Some(q);
        if rest.is_empty() {
            tokens.remove(0);
        } else {
            tokens[0] = rest.to_string();
        }
    }
    if tokens.len() != 1 {
        return Err(ParseError::UnexpectedToken(tokens.join(" ")));
    }
    spec.value = tokens.remove(0);
    finish(AnnotationRecord::Radius(spec)).map(|r| match r {
        AnnotationRecord::Radius(s) => s,
        _ => unreachable!(),
    })
}

fn parse_title_block(text: &str) -> Result<TitleBlock, ParseError> {
    let mut entries = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| ParseError::MalformedTitleBlockLine(line.trim().to_string()))?;
        entries.push((normalize_ws(key), normalize_ws(value)));
    }
    if entries.is_empty() {
        return Err(ParseError::EmptyAnnotation);
    }
    Ok(TitleBlock { entries })
}

fn parse_notes(text: &str) -> Result<NotesBlock, ParseError> {
    let lines: Vec<String> = text
        .lines()
        .map(normalize_ws)
        .filter(|l| !l.is_empty())
        .collect();
    if lines.is_empty() {
        return Err(ParseError::EmptyAnnotation);
    }
    Ok(NotesBlock { lines })
}

/// Dispatch a transcription to its category parser and validate the result.
pub fn parse_annotation(
    category: AnnotationCategory,
    text: &str,
) -> Result<AnnotationRecord, ParseError> {
    let record = match category {
        AnnotationCategory::Gdt => AnnotationRecord::Gdt(parse_gdt(text)?),
        AnnotationCategory::Measure => AnnotationRecord::Measure(parse_measure(text)?),
        AnnotationCategory::Thread => AnnotationRecord::Thread(parse_thread(text)?),
        AnnotationCategory::SurfaceRoughness => {
            AnnotationRecord::SurfaceRoughness(parse_surface_roughness(text)?)
        }
        AnnotationCategory::Radius => AnnotationRecord::Radius(parse_radius(text)?),
        AnnotationCategory::Material => {
            let designation = normalize_ws(text);
            if designation.is_empty() {
                return Err(ParseError::EmptyAnnotation);
            }
            AnnotationRecord::Material(MaterialSpec { designation })
        }
        AnnotationCategory::GeneralTolerance => {
            let text = normalize_ws(text);
            if text.is_empty() {
                return Err(ParseError::EmptyAnnotation);
            }
            AnnotationRecord::GeneralTolerance(GeneralToleranceSpec { text })
        }
        AnnotationCategory::TitleBlock => AnnotationRecord::TitleBlock(parse_title_block(text)?),
        AnnotationCategory::Note => AnnotationRecord::Notes(parse_notes(text)?),
    };
    finish(record)
}

/// Every parser output must satisfy the schema invariants; anything else is
/// a parser bug surfaced as an error rather than silently propagated.
fn finish(record: AnnotationRecord) -> Result<AnnotationRecord, ParseError> {
    let violations = check_record(&record);
    if violations.is_empty() {
        Ok(record)
    } else {
        Err(ParseError::InvalidRecord {
            category: record.category(),
            violations,
        })
    }
}

// Used by the grammar via the symbol table, kept here so the lookup path is
// exercised even when only names are given.
#[allow(dead_code)]
fn characteristic_from_name(name: &str) -> Result<char, ParseError> {
    lookup_gdt_symbol(name).map_err(|_| ParseError::UnknownSymbol(name.to_string()))
}
