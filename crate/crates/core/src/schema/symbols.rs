use super::SchemaError;

/// The 14 geometric-characteristic symbols and their Unicode codepoints.
///
/// Names and codepoints are each unique, so the table is a bijection.
pub const GDT_SYMBOL_TABLE: [(&str, char); 14] = [
    ("Position", '\u{2316}'),
    ("Flatness", '\u{23E5}'),
    ("Roundness", '\u{25CB}'),
    ("Cylindricity", '\u{232D}'),
    ("Profile of a line", '\u{2312}'),
    ("Profile of a plane", '\u{2313}'),
    ("Parallelism", '\u{2225}'),
    ("Perpendicularity", '\u{27C2}'),
    ("Straightness", '\u{23E4}'),
    ("Concentricity", '\u{25CE}'),
    ("Angularity", '\u{2220}'),
    ("Symmetry", '\u{232F}'),
    ("Circular runout", '\u{2197}'),
    ("Total runout", '\u{2330}'),
];

/// Codepoint for a symbol name; case-insensitive.
pub fn lookup_gdt_symbol(name: &str) -> Result<char, SchemaError> {
    let wanted = name.trim().to_ascii_lowercase();
    GDT_SYMBOL_TABLE
        .iter()
        .find(|(n, _)| n.to_ascii_lowercase() == wanted)
        .map(|(_, cp)| *cp)
        .ok_or_else(|| SchemaError::UnknownSymbol(name.to_string()))
}

/// Symbol name for a codepoint; inverse of [`lookup_gdt_symbol`] on table
/// members.
pub fn gdt_symbol_name(codepoint: char) -> Result<&'static str, SchemaError> {
    GDT_SYMBOL_TABLE
        .iter()
        .find(|(_, cp)| *cp == codepoint)
        .map(|(n, _)| *n)
        .ok_or_else(|| SchemaError::UnknownSymbol(escape_codepoint(codepoint)))
}

/// `U+XXXX` escape form of a codepoint, e.g. `U+2316`.
pub fn escape_codepoint(codepoint: char) -> String {
    format!("U+{:04X}", codepoint as u32)
}

/// Resolve a token to a table codepoint. Accepts the raw glyph, the `U+XXXX`
/// escape form, or the symbol name. Returns `None` for anything outside the
/// table.
pub fn parse_symbol_token(token: &str) -> Option<char> {
    let token = token.trim();
    if let Some(hex) = token.strip_prefix("U+").or_else(|| token.strip_prefix("u+")) {
        let value = u32::from_str_radix(hex, 16).ok()?;
        let cp = char::from_u32(value)?;
        return gdt_symbol_name(cp).ok().map(|_| cp);
    }
    let mut chars = token.chars();
    if let (Some(cp), None) = (chars.next(), chars.next()) {
        if gdt_symbol_name(cp).is_ok() {
            return Some(cp);
        }
    }
    lookup_gdt_symbol(token).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_has_fourteen_unique_entries() {
        assert_eq!(GDT_SYMBOL_TABLE.len(), 14);
        for (i, (name, cp)) in GDT_SYMBOL_TABLE.iter().enumerate() {
            for (other_name, other_cp) in GDT_SYMBOL_TABLE.iter().skip(i + 1) {
                assert_ne!(name, other_name);
                assert_ne!(cp, other_cp);
            }
        }
    }

    #[test]
    fn position_and_total_runout() {
        assert_eq!(lookup_gdt_symbol("Position").unwrap(), '\u{2316}');
        assert_eq!(lookup_gdt_symbol("Total runout").unwrap(), '\u{2330}');
        assert!(matches!(
            lookup_gdt_symbol("Hexagon"),
            Err(SchemaError::UnknownSymbol(_))
        ));
    }

    #[test]
    fn name_from_codepoint() {
        assert_eq!(gdt_symbol_name('\u{27C2}').unwrap(), "Perpendicularity");
        assert!(gdt_symbol_name('A').is_err());
    }

    #[test]
    fn name_round_trip() {
        for (name, _) in GDT_SYMBOL_TABLE {
            assert_eq!(gdt_symbol_name(lookup_gdt_symbol(name).unwrap()).unwrap(), name);
        }
    }

    #[test]
    fn symbol_tokens() {
        assert_eq!(parse_symbol_token("U+2316"), Some('\u{2316}'));
        assert_eq!(parse_symbol_token("⌖"), Some('\u{2316}'));
        assert_eq!(parse_symbol_token("flatness"), Some('\u{23E5}'));
        assert_eq!(parse_symbol_token("U+0041"), None);
        assert_eq!(parse_symbol_token("A"), None);
    }

    #[test]
    fn escape_form_matches_convention() {
        assert_eq!(escape_codepoint('\u{2316}'), "U+2316");
        assert_eq!(escape_codepoint('\u{23E4}'), "U+23E4");
    }
}
