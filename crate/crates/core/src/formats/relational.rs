use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Scalar(String),
    List(Vec<String>),
}

impl Cell {
    pub fn scalar(s: impl Into<String>) -> Self {
        Cell::Scalar(s.into())
    }

    pub fn is_list(&self) -> bool {
        matches!(self, Cell::List(_))
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Scalar(s) => f.write_str(s),
            Cell::List(items) => write!(f, "[{}]", items.join(", ")),
        }
    }
}

/// `determinant -> dependent` over column names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FunctionalDependency {
    pub determinant: Vec<String>,
    pub dependent: Vec<String>,
}

impl FunctionalDependency {
    pub fn new(determinant: &[&str], dependent: &[&str]) -> Self {
        FunctionalDependency {
            determinant: determinant.iter().map(|s| s.to_string()).collect(),
            dependent: dependent.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl fmt::Display for FunctionalDependency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{{{}}} -> {{{}}}",
            self.determinant.join(", "),
            self.dependent.join(", ")
        )
    }
}

/// A flat table: every row has one cell per column. Hierarchical columns
/// are flattened to dotted paths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationalTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub key: Vec<String>,
    pub declared_fds: Vec<FunctionalDependency>,
}

impl RelationalTable {
    pub fn new(name: impl Into<String>, columns: Vec<String>) -> Self {
        RelationalTable {
            name: name.into(),
            columns,
            rows: Vec::new(),
            key: Vec::new(),
            declared_fds: Vec::new(),
        }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width of `{}`",
            self.name
        );
        self.rows.push(row);
    }

    pub fn with_metadata(mut self, meta: Option<&super::TableMetadata>) -> Self {
        if let Some(m) = meta {
            self.key = m.key.clone();
            self.declared_fds = m
                .fds
                .iter()
                .filter(|fd| {
                    fd.determinant
                        .iter()
                        .chain(&fd.dependent)
                        .all(|c| self.columns.contains(c))
                })
                .cloned()
                .collect();
        }
        self
    }
}
