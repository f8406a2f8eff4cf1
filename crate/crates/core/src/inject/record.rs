use std::collections::HashSet;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::AnnotationError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskFamily {
    Compositional,
    Selective,
    Stylization,
    RelationTransfer,
    Editing,
    Layout,
}

impl TaskFamily {
    pub const ALL: [TaskFamily; 6] = [
        TaskFamily::Compositional,
        TaskFamily::Selective,
        TaskFamily::Stylization,
        TaskFamily::RelationTransfer,
        TaskFamily::Editing,
        TaskFamily::Layout,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskFamily::Compositional => "compositional",
            TaskFamily::Selective => "selective",
            TaskFamily::Stylization => "stylization",
            TaskFamily::RelationTransfer => "relation_transfer",
            TaskFamily::Editing => "editing",
            TaskFamily::Layout => "layout",
        }
    }
}

impl fmt::Display for TaskFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageRole {
    Reference,
    Target,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    /// Byte range into the caption.
    #[serde(with = "span_pair")]
    pub span: Range<usize>,
    pub attribute: String,
    #[serde(rename = "image")]
    pub image_ref: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageSpec {
    #[serde(rename = "id")]
    pub image_id: String,
    #[serde(rename = "patches")]
    pub patch_count: u32,
    pub role: ImageRole,
}

/// One entity-annotated caption with its image manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub caption: String,
    #[serde(default)]
    pub entities: Vec<Entity>,
    #[serde(default)]
    pub images: Vec<ImageSpec>,
    #[serde(rename = "task")]
    pub task_family: TaskFamily,
}

impl AnnotationRecord {
    pub fn target(&self) -> Option<&ImageSpec> {
        self.images.iter().find(|i| i.role == ImageRole::Target)
    }

    pub fn references(&self) -> impl Iterator<Item = &ImageSpec> {
        self.images.iter().filter(|i| i.role == ImageRole::Reference)
    }

    /// Serializes as a single line (no trailing newline).
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("annotation records always serialize")
    }
}

mod span_pair {
    use std::ops::Range;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(span: &Range<usize>, s: S) -> Result<S::Ok, S::Error> {
        [span.start, span.end].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Range<usize>, D::Error> {
        let [start, end] = <[usize; 2]>::deserialize(d)?;
        Ok(start..end)
    }
}

/// Parses and structurally checks one line-delimited annotation record.
pub fn parse_annotation(bytes: &[u8]) -> Result<AnnotationRecord, AnnotationError> {
    let record: AnnotationRecord = serde_json::from_slice(bytes).map_err(|e| AnnotationError::MalformedRecord {
        offset: byte_offset(bytes, e.line(), e.column()),
        message: e.to_string(),
    })?;
    check_record(&record)?;
    Ok(record)
}

fn malformed(message: impl Into<String>) -> AnnotationError {
    AnnotationError::MalformedRecord { offset: 0, message: message.into() }
}

pub(crate) fn check_record(record: &AnnotationRecord) -> Result<(), AnnotationError> {
    let mut ids = HashSet::new();
    for image in &record.images {
        if image.image_id.is_empty() {
            return Err(malformed("empty image id"));
        }
        if !ids.insert(image.image_id.as_str()) {
            return Err(malformed(format!("duplicate image id {:?}", image.image_id)));
        }
        if image.patch_count == 0 {
            return Err(malformed(format!("image {:?} has zero patches", image.image_id)));
        }
    }
    if record.images.iter().filter(|i| i.role == ImageRole::Target).count() > 1 {
        return Err(malformed("more than one target image"));
    }

    let len = record.caption.len();
    for (i, e) in record.entities.iter().enumerate() {
        if e.span.start > e.span.end || e.span.end > len {
            return Err(AnnotationError::SpanOutOfBounds { entity: i, start: e.span.start, end: e.span.end, len });
        }
        if e.span.is_empty() {
            return Err(malformed(format!("entity {i} has an empty span")));
        }
        if !record.caption.is_char_boundary(e.span.start) || !record.caption.is_char_boundary(e.span.end) {
            return Err(malformed(format!("entity {i} span splits a UTF-8 character")));
        }
    }

    // Identical spans are allowed (several attributes on one mention); any
    // other intersection is an overlap.
    let mut order: Vec<usize> = (0..record.entities.len()).collect();
    order.sort_by_key(|&i| (record.entities[i].span.start, record.entities[i].span.end));
    for pair in order.windows(2) {
        let (a, b) = (&record.entities[pair[0]].span, &record.entities[pair[1]].span);
        if a != b && b.start < a.end {
            let (first, second) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            return Err(AnnotationError::OverlappingSpans { first, second });
        }
    }

    for (i, e) in record.entities.iter().enumerate() {
        let resolved = record
            .images
            .iter()
            .any(|img| img.image_id == e.image_ref && img.role == ImageRole::Reference);
        if !resolved {
            return Err(AnnotationError::UnknownImageRef { entity: i, image: e.image_ref.clone() });
        }
    }
    Ok(())
}

fn byte_offset(bytes: &[u8], line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let line_start: usize = bytes
        .split_inclusive(|&b| b == b'\n')
        .take(line - 1)
        .map(<[u8]>::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(bytes.len())
}
