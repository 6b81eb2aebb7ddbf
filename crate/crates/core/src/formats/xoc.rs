//! XOC documents: one ordered table of events. Each row carries the event
//! type, the referenced objects and the object model (objects seen so far
//! and their relations, identified by generic ids).

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{sidecar_path, Cell, Format, FormatError, FormatMetadata, RelationalTable};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XocRelation {
    #[serde(rename = "RelationId")]
    pub relation_id: String,
    #[serde(rename = "SourceId")]
    pub source_id: String,
    #[serde(rename = "TargetId")]
    pub target_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XocObjectModel {
    #[serde(rename = "Objects", default)]
    pub objects: Vec<String>,
    #[serde(rename = "Relations", default)]
    pub relations: Vec<XocRelation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XocEvent {
    #[serde(rename = "Index")]
    pub index: usize,
    #[serde(rename = "EventType")]
    pub event_type: String,
    #[serde(rename = "References", default)]
    pub references: Vec<String>,
    #[serde(rename = "ObjectModel", default)]
    pub object_model: XocObjectModel,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XocDocument {
    #[serde(rename = "Events", default)]
    pub events: Vec<XocEvent>,
}

impl XocDocument {
    /// Indices run 1, 2, 3, ... in table order.
    pub fn validate(&self) -> Result<(), FormatError> {
        for (i, ev) in self.events.iter().enumerate() {
            if ev.index != i + 1 {
                return Err(FormatError::NonContiguousIndex {
                    expected: i + 1,
                    found: ev.index,
                });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("XOC serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        let doc: XocDocument = serde_json::from_str(text)
            .map_err(|e| FormatError::MalformedDocument(e.to_string()))?;
        doc.validate()?;
        Ok(doc)
    }
}

pub fn read_xoc(path: &Path) -> Result<XocDocument, FormatError> {
    XocDocument::from_json(&super::read_file(path)?)
}

pub fn write_xoc(doc: &XocDocument, path: &Path) -> Result<(), FormatError> {
    super::write_file(path, doc.to_json().as_bytes())?;
    super::write_file(
        &sidecar_path(path),
        FormatMetadata::for_format(Format::Xoc).to_json().as_bytes(),
    )
}

pub fn flatten_xoc(doc: &XocDocument) -> Vec<RelationalTable> {
    let cols = ["Index", "EventType", "References", "Objects", "Relations"];
    let mut t = RelationalTable::new("Events", cols.map(String::from).to_vec());
    for ev in &doc.events {
        t.push_row(vec![
            Cell::scalar(ev.index.to_string()),
            Cell::scalar(&ev.event_type),
            Cell::List(ev.references.clone()),
            Cell::List(ev.object_model.objects.clone()),
            Cell::List(
                ev.object_model
                    .relations
                    .iter()
                    .map(|r| format!("{}: {} -> {}", r.relation_id, r.source_id, r.target_id))
                    .collect(),
            ),
        ]);
    }
    let meta = FormatMetadata::for_format(Format::Xoc);
    vec![t.with_metadata(meta.lookup("Events"))]
}
