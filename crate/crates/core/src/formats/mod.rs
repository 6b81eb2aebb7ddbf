//! Readers and writers for the four concrete log representations, plus
//! flattening into generic relational tables.
//!
//! | format | container | layout |
//! |--------|-----------|--------|
//! | Dirigo | directory of CSV | `timeline.csv`, `events.csv`, `object_<Type>.csv`, `e2o.csv`, `o2o.csv` |
//! | ACEL   | JSON document | `Events`, `Objects`, `Relations` |
//! | DOCEL  | directory of CSV | `events.csv`, `objects/<Type>.csv`, `dynamic/<Type>/<Attribute>.csv` |
//! | XOC    | JSON document | one ordered `Events` table |
//!
//! Every writer also emits a functional-dependency sidecar (`_fds.json` in
//! bundle directories, `<file>.fds.json` next to JSON documents).

use std::fmt;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::ModelError;

pub mod acel;
mod csvio;
pub mod dirigo;
pub mod docel;
pub mod relational;
pub mod xoc;

pub use relational::{Cell, FunctionalDependency, RelationalTable};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("missing table `{0}`")]
    MissingTable(String),
    #[error("table `{table}`: unknown column `{column}`")]
    UnknownColumn { table: String, column: String },
    #[error("table `{table}` line {line}: {message}")]
    MalformedRow {
        table: String,
        line: u64,
        message: String,
    },
    #[error("malformed document: {0}")]
    MalformedDocument(String),
    #[error("unknown change status `{0}` (expected addedTarget or deletedTarget)")]
    UnknownChangeStatus(String),
    #[error("relation change references undeclared relation `{0}`")]
    UnknownRelation(String),
    #[error("table `{table}`: attribute row `{row}` references unknown {what} `{id}`")]
    DanglingAttributeRow {
        table: String,
        row: String,
        what: &'static str,
        id: String,
    },
    #[error("event index {found} where {expected} was expected")]
    NonContiguousIndex { expected: usize, found: usize },
    #[error("name `{0}` cannot be used as a table name")]
    InvalidName(String),
    #[error(transparent)]
    Integrity(#[from] ModelError),
}

impl FormatError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        FormatError::Io {
            path: path.to_owned(),
            source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Dirigo,
    Acel,
    Docel,
    Xoc,
}

impl Format {
    pub const ALL: [Format; 4] = [Format::Dirigo, Format::Acel, Format::Docel, Format::Xoc];

    pub fn name(self) -> &'static str {
        match self {
            Format::Dirigo => "Dirigo",
            Format::Acel => "ACEL",
            Format::Docel => "DOCEL",
            Format::Xoc => "XOC",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dirigo" => Ok(Format::Dirigo),
            "acel" => Ok(Format::Acel),
            "docel" => Ok(Format::Docel),
            "xoc" => Ok(Format::Xoc),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

/// Key and declared dependencies of one logical table. A trailing `*` in
/// `table` matches a family of per-type tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableMetadata {
    pub table: String,
    pub key: Vec<String>,
    #[serde(default)]
    pub fds: Vec<FunctionalDependency>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormatMetadata {
    pub format: Format,
    pub tables: Vec<TableMetadata>,
}

fn meta(table: &str, key: &[&str], fds: Vec<FunctionalDependency>) -> TableMetadata {
    TableMetadata {
        table: table.to_owned(),
        key: key.iter().map(|s| s.to_string()).collect(),
        fds,
    }
}

impl FormatMetadata {
    pub fn for_format(format: Format) -> Self {
        let tables = match format {
            Format::Dirigo => vec![
                meta("timeline", &["Timestamp"], vec![]),
                meta("events", &["Event_id"], vec![]),
                meta(
                    "object_*",
                    &["Object_id", "Timestamp", "ocel_changed_field"],
                    vec![],
                ),
                meta("e2o", &["Event_id", "Object_id", "E2O_Qualifier"], vec![]),
                meta(
                    "o2o",
                    &[
                        "Source_Object_id",
                        "Target_Object_id",
                        "Timestamp",
                        "O2O_Qualifier",
                    ],
                    vec![],
                ),
            ],
            Format::Acel => vec![
                meta(
                    "Events",
                    &["EventId"],
                    vec![FunctionalDependency::new(
                        &["ObjectChanges.ObjectID"],
                        &["ObjectChanges.Attribute"],
                    )],
                ),
                meta("Objects", &["ObjectId"], vec![]),
                meta("Relations", &["RelationId"], vec![]),
            ],
            Format::Docel => vec![
                meta("events", &["EventID"], vec![]),
                meta("objects/*", &["ObjectId"], vec![]),
                meta("dynamic/*", &["AttributeId"], vec![]),
            ],
            Format::Xoc => vec![meta("Events", &["Index"], vec![])],
        };
        FormatMetadata { format, tables }
    }

    pub fn lookup(&self, table: &str) -> Option<&TableMetadata> {
        self.tables
            .iter()
            .find(|m| match m.table.strip_suffix('*') {
                Some(prefix) => table.starts_with(prefix),
                None => m.table == table,
            })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("metadata serializes");
        s.push('\n');
        s
    }
}

pub(crate) fn write_file(path: &Path, contents: &[u8]) -> Result<(), FormatError> {
    std::fs::write(path, contents).map_err(|e| FormatError::io(path, e))
}

pub(crate) fn read_file(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|e| FormatError::io(path, e))
}

pub(crate) fn create_dir(path: &Path) -> Result<(), FormatError> {
    std::fs::create_dir_all(path).map_err(|e| FormatError::io(path, e))
}

pub(crate) fn sidecar_path(document: &Path) -> PathBuf {
    let mut name = document.file_name().unwrap_or_default().to_os_string();
    name.push(".fds.json");
    document.with_file_name(name)
}

/// Type and attribute names end up in file names.
pub(crate) fn check_table_name(name: &str) -> Result<(), FormatError> {
    let bad = name.is_empty()
        || name.starts_with('.')
        || name
            .chars()
            .any(|c| matches!(c, '/' | '\\' | ':' | '\0') || c.is_control());
    if bad {
        Err(FormatError::InvalidName(name.to_owned()))
    } else {
        Ok(())
    }
}
