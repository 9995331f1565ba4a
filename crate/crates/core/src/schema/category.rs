use serde::{Deserialize, Serialize};
use std::fmt;

use super::SchemaError;

/// The nine annotation categories found on 2D mechanical drawings.
///
/// The declaration order doubles as the class-id table of the OBB label
/// format (`GD&Ts` = 0 … `Title Blocks` = 8).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AnnotationCategory {
    Gdt,
    GeneralTolerance,
    Measure,
    Material,
    Note,
    Radius,
    SurfaceRoughness,
    Thread,
    TitleBlock,
}

impl AnnotationCategory {
    /// All nine categories in class-id order.
    pub const ALL: [AnnotationCategory; 9] = [
        AnnotationCategory::Gdt,
        AnnotationCategory::GeneralTolerance,
        AnnotationCategory::Measure,
        AnnotationCategory::Material,
        AnnotationCategory::Note,
        AnnotationCategory::Radius,
        AnnotationCategory::SurfaceRoughness,
        AnnotationCategory::Thread,
        AnnotationCategory::TitleBlock,
    ];

    /// Class id used in OBB label files.
    pub fn class_id(self) -> usize {
        Self::ALL.iter().position(|c| *c == self).unwrap()
    }

    pub fn from_class_id(id: usize) -> Result<Self, SchemaError> {
        Self::ALL.get(id).copied().ok_or_else(|| {
            SchemaError::violation("classId", format!("unknown class id {id} (valid: 0-8)"))
        })
    }

    /// Human-readable plural name, used in patch labels, overlays, and on the
    /// adapter wire.
    pub fn display_name(self) -> &'static str {
        match self {
            AnnotationCategory::Gdt => "GD&Ts",
            AnnotationCategory::GeneralTolerance => "General Tolerances",
            AnnotationCategory::Measure => "Measures",
            AnnotationCategory::Material => "Materials",
            AnnotationCategory::Note => "Notes",
            AnnotationCategory::Radius => "Radii",
            AnnotationCategory::SurfaceRoughness => "Surface Roughness",
            AnnotationCategory::Thread => "Threads",
            AnnotationCategory::TitleBlock => "Title Blocks",
        }
    }

    /// Filesystem-safe name for per-category directories.
    pub fn slug(self) -> &'static str {
        match self {
            AnnotationCategory::Gdt => "gdts",
            AnnotationCategory::GeneralTolerance => "general_tolerances",
            AnnotationCategory::Measure => "measures",
            AnnotationCategory::Material => "materials",
            AnnotationCategory::Note => "notes",
            AnnotationCategory::Radius => "radii",
            AnnotationCategory::SurfaceRoughness => "surface_roughness",
            AnnotationCategory::Thread => "threads",
            AnnotationCategory::TitleBlock => "title_blocks",
        }
    }

    /// Resolve a display name (or slug) back to a category, case-insensitively.
    pub fn from_name(name: &str) -> Result<Self, SchemaError> {
        let wanted = name.trim().to_ascii_lowercase();
        Self::ALL
            .iter()
            .copied()
            .find(|c| {
                c.display_name().to_ascii_lowercase() == wanted
                    || c.slug() == wanted
                    || c.display_name()
                        .to_ascii_lowercase()
                        .trim_end_matches('s')
                        == wanted.trim_end_matches('s')
            })
            .ok_or_else(|| {
                SchemaError::violation("category", format!("unknown category name {name:?}"))
            })
    }
}

impl fmt::Display for AnnotationCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactly_nine_categories() {
        assert_eq!(AnnotationCategory::ALL.len(), 9);
    }

    #[test]
    fn class_id_round_trip() {
        for cat in AnnotationCategory::ALL {
            assert_eq!(AnnotationCategory::from_class_id(cat.class_id()).unwrap(), cat);
        }
        assert!(AnnotationCategory::from_class_id(9).is_err());
    }

    #[test]
    fn class_id_two_is_measures() {
        // Pinned by the label-file convention: ids follow the category
        // listing order, with Measures third.
        assert_eq!(
            AnnotationCategory::from_class_id(2).unwrap(),
            AnnotationCategory::Measure
        );
    }

    #[test]
    fn name_lookup_is_case_insensitive() {
        assert_eq!(
            AnnotationCategory::from_name("gd&ts").unwrap(),
            AnnotationCategory::Gdt
        );
        assert_eq!(
            AnnotationCategory::from_name("Surface Roughness").unwrap(),
            AnnotationCategory::SurfaceRoughness
        );
        assert_eq!(
            AnnotationCategory::from_name("title_blocks").unwrap(),
            AnnotationCategory::TitleBlock
        );
        assert!(AnnotationCategory::from_name("Dimension").is_err());
    }
}
