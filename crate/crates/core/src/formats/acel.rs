//! ACEL documents: an `Events` table with nested object references, object
//! changes and relation changes; an `Objects` table with static attributes;
//! a `Relations` table with relation sources.
//!
//! Column spellings follow the ACEL schema where it names them
//! (`EventId`, `objects`, `ObjectChanges.ObjectID`, `ChangeStatus`,
//! `RelationId`). `Resource`, the per-reference `Qualifier` and the
//! relation `Qualifier`/`DeletedQualifier` columns are this crate's
//! canonical encoding of event resources and relation meanings.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{sidecar_path, Cell, Format, FormatError, FormatMetadata, RelationalTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChangeStatus {
    #[serde(rename = "addedTarget")]
    AddedTarget,
    #[serde(rename = "deletedTarget")]
    DeletedTarget,
}

impl ChangeStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ChangeStatus::AddedTarget => "addedTarget",
            ChangeStatus::DeletedTarget => "deletedTarget",
        }
    }
}

impl fmt::Display for ChangeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcelObjectRef {
    #[serde(rename = "ObjectId")]
    pub object_id: String,
    #[serde(rename = "Qualifier", default, skip_serializing_if = "Option::is_none")]
    pub qualifier: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcelObjectChange {
    #[serde(rename = "ObjectID")]
    pub object_id: String,
    #[serde(rename = "Attribute")]
    pub attribute: String,
    #[serde(rename = "Value")]
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcelRelationChange {
    #[serde(rename = "RelationId")]
    pub relation_id: String,
    #[serde(rename = "ChangeStatus")]
    pub change_status: ChangeStatus,
    #[serde(rename = "Target")]
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcelEvent {
    #[serde(rename = "EventId")]
    pub event_id: String,
    #[serde(rename = "Activity")]
    pub activity: String,
    #[serde(rename = "Timestamp")]
    pub timestamp: String,
    #[serde(rename = "Resource", default, skip_serializing_if = "Option::is_none")]
    pub resource: Option<String>,
    #[serde(default)]
    pub objects: Vec<AcelObjectRef>,
    #[serde(rename = "ObjectChanges", default)]
    pub object_changes: Vec<AcelObjectChange>,
    #[serde(rename = "RelationChanges", default)]
    pub relation_changes: Vec<AcelRelationChange>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcelObject {
    #[serde(rename = "ObjectId")]
    pub object_id: String,
    #[serde(rename = "Type")]
    pub object_type: String,
    #[serde(rename = "Attributes", default)]
    pub attributes: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcelRelation {
    #[serde(rename = "RelationId")]
    pub relation_id: String,
    #[serde(rename = "Source")]
    pub source: String,
    #[serde(rename = "Qualifier", default, skip_serializing_if = "Option::is_none")]
    pub qualifier: Option<String>,
    #[serde(
        rename = "DeletedQualifier",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub deleted_qualifier: Option<String>,
    #[serde(rename = "Cardinality", default)]
    pub cardinality: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcelDocument {
    #[serde(rename = "Events", default)]
    pub events: Vec<AcelEvent>,
    #[serde(rename = "Objects", default)]
    pub objects: Vec<AcelObject>,
    #[serde(rename = "Relations", default)]
    pub relations: Vec<AcelRelation>,
}

impl AcelDocument {
    pub fn relation(&self, id: &str) -> Option<&AcelRelation> {
        self.relations.iter().find(|r| r.relation_id == id)
    }

    /// Relation ids are unique and every relation change names one.
    pub fn validate(&self) -> Result<(), FormatError> {
        let mut ids = HashSet::new();
        for r in &self.relations {
            if !ids.insert(r.relation_id.as_str()) {
                return Err(FormatError::MalformedDocument(format!(
                    "duplicate RelationId `{}`",
                    r.relation_id
                )));
            }
        }
        for ev in &self.events {
            for rc in &ev.relation_changes {
                if !ids.contains(rc.relation_id.as_str()) {
                    return Err(FormatError::UnknownRelation(rc.relation_id.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("ACEL serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| FormatError::MalformedDocument(e.to_string()))?;
        // report bad ChangeStatus literals by name rather than as a serde error
        if let Some(events) = value.get("Events").and_then(|v| v.as_array()) {
            for ev in events {
                let changes = ev.get("RelationChanges").and_then(|v| v.as_array());
                for rc in changes.into_iter().flatten() {
                    if let Some(status) = rc.get("ChangeStatus").and_then(|v| v.as_str()) {
                        if !matches!(status, "addedTarget" | "deletedTarget") {
                            return Err(FormatError::UnknownChangeStatus(status.to_owned()));
                        }
                    }
                }
            }
        }
        let doc: AcelDocument = serde_json::from_value(value)
            .map_err(|e| FormatError::MalformedDocument(e.to_string()))?;
        doc.validate()?;
        Ok(doc)
    }
}

pub fn read_acel(path: &Path) -> Result<AcelDocument, FormatError> {
    AcelDocument::from_json(&super::read_file(path)?)
}

pub fn write_acel(doc: &AcelDocument, path: &Path) -> Result<(), FormatError> {
    super::write_file(path, doc.to_json().as_bytes())?;
    super::write_file(
        &sidecar_path(path),
        FormatMetadata::for_format(Format::Acel)
            .to_json()
            .as_bytes(),
    )
}

/// Hierarchical event columns become dotted paths holding list cells.
pub fn flatten_acel(doc: &AcelDocument) -> Vec<RelationalTable> {
    let meta = FormatMetadata::for_format(Format::Acel);
    let event_cols = [
        "EventId",
        "Activity",
        "Timestamp",
        "Resource",
        "objects",
        "objects.Qualifier",
        "ObjectChanges.ObjectID",
        "ObjectChanges.Attribute",
        "ObjectChanges.Value",
        "RelationChanges.RelationId",
        "RelationChanges.ChangeStatus",
        "RelationChanges.Target",
    ];
    let mut events = RelationalTable::new("Events", event_cols.map(String::from).to_vec());
    for ev in &doc.events {
        let list = |items: Vec<String>| Cell::List(items);
        events.push_row(vec![
            Cell::scalar(&ev.event_id),
            Cell::scalar(&ev.activity),
            Cell::scalar(&ev.timestamp),
            Cell::scalar(ev.resource.clone().unwrap_or_default()),
            list(ev.objects.iter().map(|o| o.object_id.clone()).collect()),
            list(
                ev.objects
                    .iter()
                    .map(|o| o.qualifier.clone().unwrap_or_default())
                    .collect(),
            ),
            list(
                ev.object_changes
                    .iter()
                    .map(|c| c.object_id.clone())
                    .collect(),
            ),
            list(
                ev.object_changes
                    .iter()
                    .map(|c| c.attribute.clone())
                    .collect(),
            ),
            list(ev.object_changes.iter().map(|c| c.value.clone()).collect()),
            list(
                ev.relation_changes
                    .iter()
                    .map(|c| c.relation_id.clone())
                    .collect(),
            ),
            list(
                ev.relation_changes
                    .iter()
                    .map(|c| c.change_status.to_string())
                    .collect(),
            ),
            list(
                ev.relation_changes
                    .iter()
                    .map(|c| c.target.clone())
                    .collect(),
            ),
        ]);
    }

    let attrs: BTreeSet<&String> = doc
        .objects
        .iter()
        .flat_map(|o| o.attributes.keys())
        .collect();
    let mut obj_cols = vec!["ObjectId".to_owned(), "Type".to_owned()];
    obj_cols.extend(attrs.iter().map(|a| a.to_string()));
    let mut objects = RelationalTable::new("Objects", obj_cols);
    for o in &doc.objects {
        let mut row = vec![Cell::scalar(&o.object_id), Cell::scalar(&o.object_type)];
        row.extend(
            attrs
                .iter()
                .map(|a| Cell::scalar(o.attributes.get(*a).cloned().unwrap_or_default())),
        );
        objects.push_row(row);
    }

    let rel_cols = [
        "RelationId",
        "Source",
        "Qualifier",
        "DeletedQualifier",
        "Cardinality",
    ];
    let mut relations = RelationalTable::new("Relations", rel_cols.map(String::from).to_vec());
    for r in &doc.relations {
        relations.push_row(vec![
            Cell::scalar(&r.relation_id),
            Cell::scalar(&r.source),
            Cell::scalar(r.qualifier.clone().unwrap_or_default()),
            Cell::scalar(r.deleted_qualifier.clone().unwrap_or_default()),
            Cell::scalar(&r.cardinality),
        ]);
    }

    [events, objects, relations]
        .into_iter()
        .map(|t| {
            let m = meta.lookup(&t.name).cloned();
            t.with_metadata(m.as_ref())
        })
        .collect()
}
