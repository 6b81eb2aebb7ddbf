//! The Dirigo tabular bundle: one directory holding `timeline.csv`,
//! `events.csv`, one `object_<Type>.csv` per object type, `e2o.csv` and
//! `o2o.csv`.
//!
//! In an object table a row with an empty `ocel_changed_field` is a static
//! snapshot taken at the row's timestamp. A row naming attribute `A` records
//! a change of `A` and carries a value only in column `A`. Attribute columns
//! are the type's static attributes followed by its dynamic attributes, each
//! group in lexical order.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;

use super::csvio::{read_table, write_table, CsvTable};
use super::{check_table_name, Cell, Format, FormatError, FormatMetadata, RelationalTable};
use crate::model::{
    Change, DirigoLog, E2ORecord, EventRecord, O2ORecord, ObjectInstance, StaticValue, Timestamp,
};

pub const TIMELINE_COLUMNS: [&str; 1] = ["Timestamp"];
pub const EVENT_COLUMNS: [&str; 4] = ["Event_id", "ActivityName", "ResourceId", "Timestamp"];
pub const OBJECT_FIXED_COLUMNS: [&str; 3] = ["Object_id", "Timestamp", "ocel_changed_field"];
pub const E2O_COLUMNS: [&str; 3] = ["Event_id", "Object_id", "E2O_Qualifier"];
pub const O2O_COLUMNS: [&str; 4] = [
    "Source_Object_id",
    "Target_Object_id",
    "Timestamp",
    "O2O_Qualifier",
];
pub const SIDECAR: &str = "_fds.json";
const OBJECT_PREFIX: &str = "object_";

struct Table {
    name: String,
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn headers(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

fn object_tables(log: &DirigoLog) -> Vec<Table> {
    let mut by_type: BTreeMap<&str, Vec<&ObjectInstance>> = BTreeMap::new();
    for obj in log.objects() {
        by_type.entry(&obj.object_type).or_default().push(obj);
    }
    let first = log.timeline().first().map(|t| t.token().to_owned());
    let mut tables = Vec::new();
    for (ty, objs) in by_type {
        let statics: BTreeSet<&str> = objs
            .iter()
            .flat_map(|o| o.static_attributes.keys().map(String::as_str))
            .collect();
        let dynamics: BTreeSet<&str> = objs
            .iter()
            .flat_map(|o| o.dynamic_history.keys().map(String::as_str))
            .filter(|a| !statics.contains(a))
            .collect();
        let attrs: Vec<&str> = statics.iter().chain(dynamics.iter()).copied().collect();
        let col = |a: &str| attrs.iter().position(|x| *x == a).expect("column");
        // (rank, object, changed field, cells)
        let mut rows: Vec<(usize, &str, String, Vec<String>)> = Vec::new();
        for obj in objs {
            let mut snapshots: BTreeMap<usize, Vec<String>> = BTreeMap::new();
            for (name, sv) in &obj.static_attributes {
                let cells = snapshots
                    .entry(log.rank(&sv.recorded_at).expect("on timeline"))
                    .or_insert_with(|| vec![String::new(); attrs.len()]);
                cells[col(name)] = sv.value.clone();
            }
            if snapshots.is_empty() && obj.dynamic_history.values().all(Vec::is_empty) {
                // bare object: an all-empty snapshot keeps it in the bundle
                let rank = if first.is_some() { 0 } else { usize::MAX };
                snapshots.insert(rank, vec![String::new(); attrs.len()]);
            }
            for (rank, cells) in snapshots {
                rows.push((rank, &obj.object_id, String::new(), cells));
            }
            for (name, history) in &obj.dynamic_history {
                for change in history {
                    let mut cells = vec![String::new(); attrs.len()];
                    cells[col(name)] = change.value.clone();
                    rows.push((
                        log.rank(&change.timestamp).expect("on timeline"),
                        &obj.object_id,
                        name.clone(),
                        cells,
                    ));
                }
            }
        }
        rows.sort_by(|a, b| (a.0, a.1, &a.2).cmp(&(b.0, b.1, &b.2)));
        let mut hdr = headers(&OBJECT_FIXED_COLUMNS);
        hdr.extend(attrs.iter().map(|s| s.to_string()));
        let rows = rows
            .into_iter()
            .map(|(rank, id, field, cells)| {
                let ts = log
                    .timeline()
                    .get(rank)
                    .map(|t| t.token().to_owned())
                    .unwrap_or_default();
                let mut row = vec![id.to_owned(), ts, field];
                row.extend(cells);
                row
            })
            .collect();
        tables.push(Table {
            name: format!("{OBJECT_PREFIX}{ty}"),
            headers: hdr,
            rows,
        });
    }
    tables
}

fn bundle_tables(log: &DirigoLog) -> Vec<Table> {
    let mut tables = vec![
        Table {
            name: "timeline".into(),
            headers: headers(&TIMELINE_COLUMNS),
            rows: log
                .timeline()
                .iter()
                .map(|t| vec![t.token().to_owned()])
                .collect(),
        },
        Table {
            name: "events".into(),
            headers: headers(&EVENT_COLUMNS),
            rows: log
                .events()
                .iter()
                .map(|e| {
                    vec![
                        e.event_id.clone(),
                        e.activity.clone(),
                        e.resource.clone().unwrap_or_default(),
                        e.timestamp.token().to_owned(),
                    ]
                })
                .collect(),
        },
    ];
    tables.extend(object_tables(log));
    tables.push(Table {
        name: "e2o".into(),
        headers: headers(&E2O_COLUMNS),
        rows: log
            .e2o()
            .iter()
            .map(|r| vec![r.event_id.clone(), r.object_id.clone(), r.qualifier.clone()])
            .collect(),
    });
    tables.push(Table {
        name: "o2o".into(),
        headers: headers(&O2O_COLUMNS),
        rows: log
            .o2o()
            .iter()
            .map(|r| {
                vec![
                    r.source_object_id.clone(),
                    r.target_object_id.clone(),
                    r.timestamp.token().to_owned(),
                    r.qualifier.clone(),
                ]
            })
            .collect(),
    });
    tables
}

/// Writes `log` as a canonical bundle into `dir` (created if needed).
pub fn write_dirigo(log: &DirigoLog, dir: &Path) -> Result<(), FormatError> {
    for obj in log.objects() {
        check_table_name(&obj.object_type)?;
    }
    super::create_dir(dir)?;
    for table in bundle_tables(log) {
        write_table(
            &dir.join(format!("{}.csv", table.name)),
            &table.headers,
            table.rows,
        )?;
    }
    super::write_file(
        &dir.join(SIDECAR),
        FormatMetadata::for_format(Format::Dirigo)
            .to_json()
            .as_bytes(),
    )
}

/// Reads a bundle and integrity-checks it into a [`DirigoLog`].
///
/// `timeline.csv` is optional; without it the timeline is the order in which
/// timestamps first appear in events, object tables and o2o rows (absolute
/// timelines are re-sorted chronologically anyway).
pub fn read_dirigo(dir: &Path) -> Result<DirigoLog, FormatError> {
    if !dir.is_dir() {
        return Err(FormatError::MissingTable(dir.display().to_string()));
    }
    let events_t = read_table(&dir.join("events.csv"), "events")?;
    events_t.expect_headers(&EVENT_COLUMNS)?;
    let e2o_t = read_table(&dir.join("e2o.csv"), "e2o")?;
    e2o_t.expect_headers(&E2O_COLUMNS)?;
    let o2o_t = read_table(&dir.join("o2o.csv"), "o2o")?;
    o2o_t.expect_headers(&O2O_COLUMNS)?;
    let timeline_path = dir.join("timeline.csv");
    let timeline_t = if timeline_path.exists() {
        let t = read_table(&timeline_path, "timeline")?;
        t.expect_headers(&TIMELINE_COLUMNS)?;
        Some(t)
    } else {
        None
    };

    let mut object_files = Vec::new();
    let entries = std::fs::read_dir(dir).map_err(|e| FormatError::io(dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| FormatError::io(dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(ty) = name
            .strip_prefix(OBJECT_PREFIX)
            .and_then(|s| s.strip_suffix(".csv"))
        {
            object_files.push((ty.to_owned(), entry.path()));
        }
    }
    object_files.sort();

    let mut seen_ts: Vec<Timestamp> = Vec::new();
    let mut seen_set: HashSet<Timestamp> = HashSet::new();
    let mut note = |t: &str| {
        let t = Timestamp::new(t);
        if seen_set.insert(t.clone()) {
            seen_ts.push(t);
        }
    };

    let mut events = Vec::new();
    for (_, row) in &events_t.rows {
        note(&row[3]);
        events.push(EventRecord {
            event_id: row[0].clone(),
            activity: row[1].clone(),
            resource: (!row[2].is_empty()).then(|| row[2].clone()),
            timestamp: Timestamp::new(row[3].as_str()),
        });
    }

    let mut objects: BTreeMap<String, ObjectInstance> = BTreeMap::new();
    for (ty, path) in &object_files {
        let table = read_table(path, &format!("{OBJECT_PREFIX}{ty}"))?;
        read_object_table(&table, ty, &mut objects, &mut note)?;
    }

    let e2o = e2o_t
        .rows
        .iter()
        .map(|(_, r)| E2ORecord::new(r[0].as_str(), r[1].as_str(), r[2].as_str()))
        .collect();
    let mut o2o = Vec::new();
    for (_, r) in &o2o_t.rows {
        note(&r[2]);
        o2o.push(O2ORecord::new(
            r[0].as_str(),
            r[1].as_str(),
            r[2].as_str(),
            r[3].as_str(),
        ));
    }

    let timeline = match timeline_t {
        Some(t) => t
            .rows
            .iter()
            .map(|(_, r)| Timestamp::new(r[0].as_str()))
            .collect(),
        None => seen_ts,
    };
    Ok(DirigoLog::build(
        timeline,
        events,
        objects.into_values().collect(),
        e2o,
        o2o,
    )?)
}

fn read_object_table(
    table: &CsvTable,
    ty: &str,
    objects: &mut BTreeMap<String, ObjectInstance>,
    note: &mut impl FnMut(&str),
) -> Result<(), FormatError> {
    for (i, expected) in OBJECT_FIXED_COLUMNS.iter().enumerate() {
        match table.headers.get(i) {
            Some(h) if h == expected => {}
            Some(h) => {
                return Err(FormatError::UnknownColumn {
                    table: table.name.clone(),
                    column: h.clone(),
                })
            }
            None => return Err(table.malformed(1, format!("missing column {expected}"))),
        }
    }
    let attrs = &table.headers[OBJECT_FIXED_COLUMNS.len()..];
    for (line, row) in &table.rows {
        let (id, ts, field) = (&row[0], &row[1], &row[2]);
        if id.is_empty() {
            return Err(table.malformed(*line, "empty Object_id"));
        }
        let obj = objects
            .entry(id.clone())
            .or_insert_with(|| ObjectInstance::new(id.as_str(), ty));
        if obj.object_type != ty {
            return Err(table.malformed(*line, format!("object `{id}` appears under two types")));
        }
        let values = &row[OBJECT_FIXED_COLUMNS.len()..];
        if field.is_empty() {
            let mut any = false;
            for (name, value) in attrs.iter().zip(values) {
                if value.is_empty() {
                    continue;
                }
                any = true;
                if obj.static_attributes.contains_key(name) {
                    return Err(table.malformed(*line, format!("static `{name}` recorded twice")));
                }
                obj.static_attributes.insert(
                    name.clone(),
                    StaticValue {
                        value: value.clone(),
                        recorded_at: Timestamp::new(ts.as_str()),
                    },
                );
            }
            if any || !ts.is_empty() {
                if ts.is_empty() {
                    return Err(table.malformed(*line, "static snapshot without timestamp"));
                }
                note(ts);
            }
        } else {
            let col = table
                .column(field)
                .ok_or_else(|| FormatError::UnknownColumn {
                    table: table.name.clone(),
                    column: field.clone(),
                })?;
            if col < OBJECT_FIXED_COLUMNS.len() {
                return Err(table.malformed(*line, format!("`{field}` is not an attribute")));
            }
            if let Some((other, _)) = attrs
                .iter()
                .zip(values)
                .find(|(name, v)| *name != field && !v.is_empty())
            {
                return Err(
                    table.malformed(*line, format!("change of `{field}` also fills `{other}`"))
                );
            }
            if ts.is_empty() {
                return Err(table.malformed(*line, "change without timestamp"));
            }
            note(ts);
            obj.dynamic_history
                .entry(field.clone())
                .or_default()
                .push(Change {
                    timestamp: Timestamp::new(ts.as_str()),
                    value: row[col].clone(),
                });
        }
    }
    Ok(())
}

/// Every bundle table as a relational table (all cells scalar).
pub fn flatten_dirigo(log: &DirigoLog) -> Vec<RelationalTable> {
    let meta = FormatMetadata::for_format(Format::Dirigo);
    bundle_tables(log)
        .into_iter()
        .map(|t| {
            let mut rt = RelationalTable::new(t.name.clone(), t.headers);
            for row in t.rows {
                rt.push_row(row.into_iter().map(Cell::Scalar).collect());
            }
            rt.with_metadata(meta.lookup(&t.name))
        })
        .collect()
}
