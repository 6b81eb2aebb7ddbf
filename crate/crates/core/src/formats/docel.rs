//! DOCEL bundles: an events table, one static-attribute table per object
//! type and one table per dynamic attribute.
//!
//! Layout:
//!
//! ```text
//! events.csv                      EventID,Activity,Timestamp,Resource,Objects
//! objects/<Type>.csv              ObjectId,<static attributes...>
//! dynamic/<Type>/<Attribute>.csv  AttributeId,Value,EventId,ObjectId
//! ```
//!
//! The multi-valued `Objects` cell holds a JSON array of
//! `[object id, qualifier]` pairs.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::csvio::{read_table, write_table};
use super::{check_table_name, Cell, Format, FormatError, FormatMetadata, RelationalTable};

pub const EVENT_COLUMNS: [&str; 5] = ["EventID", "Activity", "Timestamp", "Resource", "Objects"];
pub const DYNAMIC_COLUMNS: [&str; 4] = ["AttributeId", "Value", "EventId", "ObjectId"];
pub const SIDECAR: &str = "_fds.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocelEvent {
    pub event_id: String,
    pub activity: String,
    pub timestamp: String,
    pub resource: Option<String>,
    /// (object id, qualifier)
    pub objects: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocelObject {
    pub object_id: String,
    pub attributes: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocelAttributeRow {
    pub attribute_id: String,
    pub value: String,
    pub event_id: String,
    pub object_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DocelBundle {
    pub events: Vec<DocelEvent>,
    /// object type -> rows
    pub static_tables: BTreeMap<String, Vec<DocelObject>>,
    /// (object type, attribute) -> rows
    pub dynamic_tables: BTreeMap<(String, String), Vec<DocelAttributeRow>>,
}

impl DocelBundle {
    pub fn object_type(&self, object_id: &str) -> Option<&str> {
        self.static_tables.iter().find_map(|(ty, rows)| {
            rows.iter()
                .any(|r| r.object_id == object_id)
                .then_some(ty.as_str())
        })
    }

    /// Every dynamic row names an existing event and object.
    pub fn validate(&self) -> Result<(), FormatError> {
        let events: HashSet<&str> = self.events.iter().map(|e| e.event_id.as_str()).collect();
        let objects: HashSet<&str> = self
            .static_tables
            .values()
            .flatten()
            .map(|o| o.object_id.as_str())
            .collect();
        for ((ty, attr), rows) in &self.dynamic_tables {
            for row in rows {
                let dangling = |what, id: &str| FormatError::DanglingAttributeRow {
                    table: format!("dynamic/{ty}/{attr}"),
                    row: row.attribute_id.clone(),
                    what,
                    id: id.to_owned(),
                };
                if !events.contains(row.event_id.as_str()) {
                    return Err(dangling("event", &row.event_id));
                }
                if !objects.contains(row.object_id.as_str()) {
                    return Err(dangling("object", &row.object_id));
                }
            }
        }
        Ok(())
    }
}

fn static_columns(rows: &[DocelObject]) -> Vec<String> {
    let attrs: BTreeSet<&String> = rows.iter().flat_map(|r| r.attributes.keys()).collect();
    let mut cols = vec!["ObjectId".to_owned()];
    cols.extend(attrs.into_iter().cloned());
    cols
}

fn encode_objects(objects: &[(String, String)]) -> String {
    serde_json::to_string(objects).expect("object list serializes")
}

pub fn write_docel(bundle: &DocelBundle, dir: &Path) -> Result<(), FormatError> {
    for ty in bundle.static_tables.keys() {
        check_table_name(ty)?;
    }
    for (ty, attr) in bundle.dynamic_tables.keys() {
        check_table_name(ty)?;
        check_table_name(attr)?;
    }
    super::create_dir(dir)?;
    write_table(
        &dir.join("events.csv"),
        &EVENT_COLUMNS,
        bundle.events.iter().map(|e| {
            vec![
                e.event_id.clone(),
                e.activity.clone(),
                e.timestamp.clone(),
                e.resource.clone().unwrap_or_default(),
                encode_objects(&e.objects),
            ]
        }),
    )?;
    let objects_dir = dir.join("objects");
    super::create_dir(&objects_dir)?;
    for (ty, rows) in &bundle.static_tables {
        let cols = static_columns(rows);
        write_table(
            &objects_dir.join(format!("{ty}.csv")),
            &cols,
            rows.iter().map(|r| {
                let mut out = vec![r.object_id.clone()];
                out.extend(
                    cols[1..]
                        .iter()
                        .map(|c| r.attributes.get(c).cloned().unwrap_or_default()),
                );
                out
            }),
        )?;
    }
    let dynamic_dir = dir.join("dynamic");
    super::create_dir(&dynamic_dir)?;
    for ((ty, attr), rows) in &bundle.dynamic_tables {
        let type_dir = dynamic_dir.join(ty);
        super::create_dir(&type_dir)?;
        write_table(
            &type_dir.join(format!("{attr}.csv")),
            &DYNAMIC_COLUMNS,
            rows.iter().map(|r| {
                vec![
                    r.attribute_id.clone(),
                    r.value.clone(),
                    r.event_id.clone(),
                    r.object_id.clone(),
                ]
            }),
        )?;
    }
    super::write_file(
        &dir.join(SIDECAR),
        FormatMetadata::for_format(Format::Docel)
            .to_json()
            .as_bytes(),
    )
}

fn csv_files(dir: &Path) -> Result<Vec<(String, std::path::PathBuf)>, FormatError> {
    let mut out = Vec::new();
    if !dir.is_dir() {
        return Ok(out);
    }
    for entry in std::fs::read_dir(dir).map_err(|e| FormatError::io(dir, e))? {
        let entry = entry.map_err(|e| FormatError::io(dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(stem) = name.strip_suffix(".csv") {
            out.push((stem.to_owned(), entry.path()));
        }
    }
    out.sort();
    Ok(out)
}

pub fn read_docel(dir: &Path) -> Result<DocelBundle, FormatError> {
    let events_t = read_table(&dir.join("events.csv"), "events")?;
    events_t.expect_headers(&EVENT_COLUMNS)?;
    let mut bundle = DocelBundle::default();
    for (line, row) in &events_t.rows {
        let objects: Vec<(String, String)> = if row[4].is_empty() {
            Vec::new()
        } else {
            serde_json::from_str(&row[4])
                .map_err(|e| events_t.malformed(*line, format!("Objects cell: {e}")))?
        };
        bundle.events.push(DocelEvent {
            event_id: row[0].clone(),
            activity: row[1].clone(),
            timestamp: row[2].clone(),
            resource: (!row[3].is_empty()).then(|| row[3].clone()),
            objects,
        });
    }
    for (ty, path) in csv_files(&dir.join("objects"))? {
        let t = read_table(&path, &format!("objects/{ty}"))?;
        if t.headers.first().map(String::as_str) != Some("ObjectId") {
            return Err(t.malformed(1, "first column must be ObjectId"));
        }
        let rows = t
            .rows
            .iter()
            .map(|(_, r)| DocelObject {
                object_id: r[0].clone(),
                attributes: t.headers[1..]
                    .iter()
                    .zip(&r[1..])
                    .filter(|(_, v)| !v.is_empty())
                    .map(|(h, v)| (h.clone(), v.clone()))
                    .collect(),
            })
            .collect();
        bundle.static_tables.insert(ty, rows);
    }
    let dynamic_dir = dir.join("dynamic");
    if dynamic_dir.is_dir() {
        let mut type_dirs = Vec::new();
        for entry in
            std::fs::read_dir(&dynamic_dir).map_err(|e| FormatError::io(&dynamic_dir, e))?
        {
            let entry = entry.map_err(|e| FormatError::io(&dynamic_dir, e))?;
            if entry.path().is_dir() {
                type_dirs.push((
                    entry.file_name().to_string_lossy().into_owned(),
                    entry.path(),
                ));
            }
        }
        type_dirs.sort();
        for (ty, type_dir) in type_dirs {
            for (attr, path) in csv_files(&type_dir)? {
                let t = read_table(&path, &format!("dynamic/{ty}/{attr}"))?;
                t.expect_headers(&DYNAMIC_COLUMNS)?;
                let rows = t
                    .rows
                    .iter()
                    .map(|(_, r)| DocelAttributeRow {
                        attribute_id: r[0].clone(),
                        value: r[1].clone(),
                        event_id: r[2].clone(),
                        object_id: r[3].clone(),
                    })
                    .collect();
                bundle.dynamic_tables.insert((ty.clone(), attr), rows);
            }
        }
    }
    bundle.validate()?;
    Ok(bundle)
}

pub fn flatten_docel(bundle: &DocelBundle) -> Vec<RelationalTable> {
    let meta = FormatMetadata::for_format(Format::Docel);
    let mut tables = Vec::new();
    let mut events = RelationalTable::new("events", EVENT_COLUMNS.map(String::from).to_vec());
    for e in &bundle.events {
        events.push_row(vec![
            Cell::scalar(&e.event_id),
            Cell::scalar(&e.activity),
            Cell::scalar(&e.timestamp),
            Cell::scalar(e.resource.clone().unwrap_or_default()),
            Cell::List(
                e.objects
                    .iter()
                    .map(|(id, q)| format!("{id} ({q})"))
                    .collect(),
            ),
        ]);
    }
    tables.push(events.with_metadata(meta.lookup("events")));
    for (ty, rows) in &bundle.static_tables {
        let cols = static_columns(rows);
        let mut t = RelationalTable::new(format!("objects/{ty}"), cols.clone());
        for r in rows {
            let mut row = vec![Cell::scalar(&r.object_id)];
            row.extend(
                cols[1..]
                    .iter()
                    .map(|c| Cell::scalar(r.attributes.get(c).cloned().unwrap_or_default())),
            );
            t.push_row(row);
        }
        tables.push(t.with_metadata(meta.lookup("objects/*")));
    }
    for ((ty, attr), rows) in &bundle.dynamic_tables {
        let mut t = RelationalTable::new(
            format!("dynamic/{ty}/{attr}"),
            DYNAMIC_COLUMNS.map(String::from).to_vec(),
        );
        for r in rows {
            t.push_row(vec![
                Cell::scalar(&r.attribute_id),
                Cell::scalar(&r.value),
                Cell::scalar(&r.event_id),
                Cell::scalar(&r.object_id),
            ]);
        }
        tables.push(t.with_metadata(meta.lookup("dynamic/*")));
    }
    tables
}
