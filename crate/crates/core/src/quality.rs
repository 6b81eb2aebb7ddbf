//! Quality criteria for object-centric log representations.
//!
//! | id   | question |
//! |------|----------|
//! | QC1  | are all tables at least in third normal form? |
//! | QC2a | are all static object attributes included? |
//! | QC2b | are all dynamic object attributes included, with their full history? |
//! | QC2c | are all event attributes included? |
//! | QC3a | are all static O2O relations included? |
//! | QC3b | are all dynamic O2O relations included? |
//! | QC3c | are all E2O relations included? |
//! | QC4a | do all O2O relations carry a meaningful qualifier? |
//! | QC4b | do all E2O relations carry a meaningful qualifier? |
//!
//! Normal forms are checked on the flattened tables of a representation
//! against the keys and dependencies declared in the format metadata. The
//! other criteria compare a [`FactView`] lifted from the representation
//! with the [`Inventory`] derived from a domain spec.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{
    expected_inventory, DomainSpec, Inventory, EVENT_ACTIVITY, EVENT_RESOURCE, EVENT_TIMESTAMP,
};
use crate::formats::acel::{flatten_acel, read_acel, write_acel, AcelDocument};
use crate::formats::dirigo::{flatten_dirigo, read_dirigo, write_dirigo};
use crate::formats::docel::{flatten_docel, read_docel, write_docel, DocelBundle};
use crate::formats::xoc::{flatten_xoc, read_xoc, write_xoc, XocDocument};
use crate::formats::{Cell, Format, FormatError, FunctionalDependency, RelationalTable};
use crate::model::DirigoLog;

pub const DEFAULT_GENERIC_QUALIFIER: &str = "^r[0-9]+$";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Criterion {
    QC1,
    QC2a,
    QC2b,
    QC2c,
    QC3a,
    QC3b,
    QC3c,
    QC4a,
    QC4b,
}

impl Criterion {
    pub const ALL: [Criterion; 9] = [
        Criterion::QC1,
        Criterion::QC2a,
        Criterion::QC2b,
        Criterion::QC2c,
        Criterion::QC3a,
        Criterion::QC3b,
        Criterion::QC3c,
        Criterion::QC4a,
        Criterion::QC4b,
    ];

    pub fn description(self) -> &'static str {
        match self {
            Criterion::QC1 => "tables in third normal form",
            Criterion::QC2a => "static object attributes",
            Criterion::QC2b => "dynamic object attributes",
            Criterion::QC2c => "event attributes",
            Criterion::QC3a => "static O2O relations",
            Criterion::QC3b => "dynamic O2O relations",
            Criterion::QC3c => "E2O relations",
            Criterion::QC4a => "O2O qualifiers",
            Criterion::QC4b => "E2O qualifiers",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

// ---------------------------------------------------------------------------
// normal forms

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// 1NF: a cell holds several values.
    MultiValued {
        table: String,
        column: String,
        row: usize,
    },
    /// 2NF: a non-key column depends on part of a composite key.
    PartialDependency {
        table: String,
        determinant: Vec<String>,
        dependent: String,
    },
    /// 3NF: a non-key column depends on something other than a superkey.
    TransitiveDependency {
        table: String,
        determinant: Vec<String>,
        dependent: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MultiValued { table, column, row } => {
                write!(
                    f,
                    "{table}: column `{column}` holds multiple values (row {row})"
                )
            }
            Violation::PartialDependency {
                table,
                determinant,
                dependent,
            } => write!(
                f,
                "{table}: `{dependent}` depends on part of the key {{{}}}",
                determinant.join(", ")
            ),
            Violation::TransitiveDependency {
                table,
                determinant,
                dependent,
            } => write!(
                f,
                "{table}: `{dependent}` depends on non-key {{{}}}",
                determinant.join(", ")
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NfError {
    #[error("table `{table}` is not in first normal form ({violations} multi-valued cells)")]
    PrerequisiteFailed { table: String, violations: usize },
}

pub fn check_1nf(table: &RelationalTable) -> Vec<Violation> {
    let mut out = Vec::new();
    for (r, row) in table.rows.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            if cell.is_list() {
                out.push(Violation::MultiValued {
                    table: table.name.clone(),
                    column: table.columns[c].clone(),
                    row: r,
                });
            }
        }
    }
    out
}

fn require_1nf(table: &RelationalTable) -> Result<(), NfError> {
    let n = check_1nf(table).len();
    if n == 0 {
        Ok(())
    } else {
        Err(NfError::PrerequisiteFailed {
            table: table.name.clone(),
            violations: n,
        })
    }
}

/// Attribute closure of `start` under the declared dependencies plus the
/// key determining every column.
fn closure(table: &RelationalTable, start: &BTreeSet<&str>) -> BTreeSet<String> {
    let mut fds: Vec<(Vec<&str>, Vec<&str>)> = table
        .declared_fds
        .iter()
        .map(|fd| {
            (
                fd.determinant.iter().map(String::as_str).collect(),
                fd.dependent.iter().map(String::as_str).collect(),
            )
        })
        .collect();
    if !table.key.is_empty() {
        fds.push((
            table.key.iter().map(String::as_str).collect(),
            table.columns.iter().map(String::as_str).collect(),
        ));
    }
    let mut set: BTreeSet<String> = start.iter().map(|s| s.to_string()).collect();
    loop {
        let before = set.len();
        for (x, y) in &fds {
            if x.iter().all(|c| set.contains(*c)) {
                set.extend(y.iter().map(|s| s.to_string()));
            }
        }
        if set.len() == before {
            return set;
        }
    }
}

fn is_superkey(table: &RelationalTable, cols: &[String]) -> bool {
    let start: BTreeSet<&str> = cols.iter().map(String::as_str).collect();
    let cl = closure(table, &start);
    table.columns.iter().all(|c| cl.contains(c))
}

/// Declared dependencies that break 2NF, ignoring whether cells are atomic.
pub fn declared_2nf_violations(table: &RelationalTable) -> Vec<Violation> {
    let mut out = BTreeSet::new();
    if table.key.len() < 2 {
        return Vec::new();
    }
    for fd in &table.declared_fds {
        let x: BTreeSet<&String> = fd.determinant.iter().collect();
        let proper_subset = x.len() < table.key.len() && x.iter().all(|c| table.key.contains(c));
        if !proper_subset {
            continue;
        }
        for a in &fd.dependent {
            if !table.key.contains(a) && !x.contains(a) {
                out.insert(Violation::PartialDependency {
                    table: table.name.clone(),
                    determinant: sorted(&fd.determinant),
                    dependent: a.clone(),
                });
            }
        }
    }
    out.into_iter().collect()
}

/// Declared dependencies that break 3NF, ignoring whether cells are atomic.
pub fn declared_3nf_violations(table: &RelationalTable) -> Vec<Violation> {
    let mut out = BTreeSet::new();
    for fd in &table.declared_fds {
        if is_superkey(table, &fd.determinant) {
            continue;
        }
        for a in &fd.dependent {
            if !table.key.contains(a) && !fd.determinant.contains(a) {
                out.insert(Violation::TransitiveDependency {
                    table: table.name.clone(),
                    determinant: sorted(&fd.determinant),
                    dependent: a.clone(),
                });
            }
        }
    }
    out.into_iter().collect()
}

fn sorted(cols: &[String]) -> Vec<String> {
    let mut v = cols.to_vec();
    v.sort();
    v.dedup();
    v
}

pub fn check_2nf(table: &RelationalTable) -> Result<Vec<Violation>, NfError> {
    require_1nf(table)?;
    Ok(declared_2nf_violations(table))
}

pub fn check_3nf(table: &RelationalTable) -> Result<Vec<Violation>, NfError> {
    require_1nf(table)?;
    Ok(declared_3nf_violations(table))
}

// ---------------------------------------------------------------------------
// fact views

/// An O2O association as seen through a representation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct O2oFact {
    pub source_type: Option<String>,
    pub target_type: Option<String>,
    pub qualifier: Option<String>,
}

/// An E2O association as seen through a representation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct E2oFact {
    pub activity: String,
    pub object_type: Option<String>,
    pub qualifier: Option<String>,
}

/// What a representation makes available, in schema-neutral terms.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct FactView {
    /// populated (object type, attribute) pairs
    pub static_attrs: BTreeSet<(String, String)>,
    pub dynamic_attrs: BTreeSet<(String, String)>,
    /// whether attribute changes that no event caused can be recorded
    pub unanchored_changes: bool,
    pub event_attrs: BTreeSet<String>,
    /// (source type, relation name) of relations that do not change
    pub static_o2o: BTreeSet<(String, String)>,
    pub dynamic_o2o: BTreeSet<O2oFact>,
    pub e2o: BTreeSet<E2oFact>,
}

impl FactView {
    pub fn of_dirigo(log: &DirigoLog) -> Self {
        let mut v = FactView {
            unanchored_changes: true,
            ..FactView::default()
        };
        for e in log.events() {
            v.event_attrs.insert(EVENT_ACTIVITY.to_owned());
            v.event_attrs.insert(EVENT_TIMESTAMP.to_owned());
            if e.resource.is_some() {
                v.event_attrs.insert(EVENT_RESOURCE.to_owned());
            }
        }
        let mut types = HashMap::new();
        for o in log.objects() {
            types.insert(o.object_id.as_str(), o.object_type.as_str());
            for a in o.static_attributes.keys() {
                v.static_attrs.insert((o.object_type.clone(), a.clone()));
                v.static_o2o.insert((o.object_type.clone(), a.clone()));
            }
            for a in o.dynamic_history.keys() {
                v.dynamic_attrs.insert((o.object_type.clone(), a.clone()));
            }
        }
        for r in log.o2o() {
            let src = types[r.source_object_id.as_str()];
            v.static_o2o.insert((src.to_owned(), r.qualifier.clone()));
            v.dynamic_o2o.insert(O2oFact {
                source_type: Some(src.to_owned()),
                target_type: Some(types[r.target_object_id.as_str()].to_owned()),
                qualifier: Some(r.qualifier.clone()),
            });
        }
        for r in log.e2o() {
            v.e2o.insert(E2oFact {
                activity: log
                    .event(&r.event_id)
                    .map(|e| e.activity.clone())
                    .unwrap_or_default(),
                object_type: Some(types[r.object_id.as_str()].to_owned()),
                qualifier: Some(r.qualifier.clone()),
            });
        }
        v
    }

    /// Changes live in event rows, so a change needs an event.
    pub fn of_acel(doc: &AcelDocument) -> Self {
        let mut v = FactView::default();
        let types: HashMap<&str, &str> = doc
            .objects
            .iter()
            .map(|o| (o.object_id.as_str(), o.object_type.as_str()))
            .collect();
        let ty = |id: &str| types.get(id).map(|t| t.to_string());
        for o in &doc.objects {
            for a in o.attributes.keys() {
                v.static_attrs.insert((o.object_type.clone(), a.clone()));
                v.static_o2o.insert((o.object_type.clone(), a.clone()));
            }
        }
        for r in &doc.relations {
            if let (Some(src), Some(q)) = (ty(&r.source), &r.qualifier) {
                v.static_o2o.insert((src, q.clone()));
            }
        }
        for e in &doc.events {
            v.event_attrs.insert(EVENT_ACTIVITY.to_owned());
            v.event_attrs.insert(EVENT_TIMESTAMP.to_owned());
            if e.resource.is_some() {
                v.event_attrs.insert(EVENT_RESOURCE.to_owned());
            }
            for r in &e.objects {
                v.e2o.insert(E2oFact {
                    activity: e.activity.clone(),
                    object_type: ty(&r.object_id),
                    qualifier: r.qualifier.clone(),
                });
            }
            for c in &e.object_changes {
                if let Some(t) = ty(&c.object_id) {
                    v.dynamic_attrs.insert((t, c.attribute.clone()));
                }
            }
            for rc in &e.relation_changes {
                let Some(rel) = doc.relation(&rc.relation_id) else {
                    continue;
                };
                let qualifier = match rc.change_status {
                    crate::formats::acel::ChangeStatus::AddedTarget => rel.qualifier.clone(),
                    crate::formats::acel::ChangeStatus::DeletedTarget => rel
                        .deleted_qualifier
                        .clone()
                        .or_else(|| rel.qualifier.clone()),
                };
                v.dynamic_o2o.insert(O2oFact {
                    source_type: ty(&rel.source),
                    target_type: ty(&rc.target),
                    qualifier,
                });
            }
        }
        v
    }

    /// Objects sharing an event are related, but the relation has no name.
    pub fn of_docel(bundle: &DocelBundle) -> Self {
        let mut v = FactView::default();
        let mut types: HashMap<&str, &str> = HashMap::new();
        for (ty, rows) in &bundle.static_tables {
            for r in rows {
                types.insert(&r.object_id, ty);
                for a in r.attributes.keys() {
                    v.static_attrs.insert((ty.clone(), a.clone()));
                    v.static_o2o.insert((ty.clone(), a.clone()));
                }
            }
        }
        let ty = |id: &str| types.get(id).map(|t| t.to_string());
        for ((t, a), rows) in &bundle.dynamic_tables {
            if !rows.is_empty() {
                v.dynamic_attrs.insert((t.clone(), a.clone()));
            }
        }
        for e in &bundle.events {
            v.event_attrs.insert(EVENT_ACTIVITY.to_owned());
            v.event_attrs.insert(EVENT_TIMESTAMP.to_owned());
            if e.resource.is_some() {
                v.event_attrs.insert(EVENT_RESOURCE.to_owned());
            }
            for (o, q) in &e.objects {
                v.e2o.insert(E2oFact {
                    activity: e.activity.clone(),
                    object_type: ty(o),
                    qualifier: Some(q.clone()),
                });
            }
            for (i, (a, _)) in e.objects.iter().enumerate() {
                for (b, _) in &e.objects[i + 1..] {
                    v.dynamic_o2o.insert(O2oFact {
                        source_type: ty(a),
                        target_type: ty(b),
                        qualifier: None,
                    });
                }
            }
        }
        v
    }

    /// Only event types, object ids and generically labelled relations.
    pub fn of_xoc(doc: &XocDocument) -> Self {
        let mut v = FactView::default();
        for e in &doc.events {
            v.event_attrs.insert(EVENT_ACTIVITY.to_owned());
            for _ in &e.references {
                v.e2o.insert(E2oFact {
                    activity: e.event_type.clone(),
                    object_type: None,
                    qualifier: None,
                });
            }
            for r in &e.object_model.relations {
                v.dynamic_o2o.insert(O2oFact {
                    source_type: None,
                    target_type: None,
                    qualifier: Some(r.relation_id.clone()),
                });
            }
        }
        v
    }
}

// ---------------------------------------------------------------------------
// completeness and qualifiers

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub pass: bool,
    pub evidence: Vec<String>,
}

impl CriterionResult {
    fn from_missing(missing: Vec<String>) -> Self {
        CriterionResult {
            pass: missing.is_empty(),
            evidence: missing,
        }
    }
}

fn missing_attrs(
    expected: &BTreeMap<String, BTreeSet<String>>,
    present: &BTreeSet<(String, String)>,
    what: &str,
) -> Vec<String> {
    let mut out = Vec::new();
    for (ty, attrs) in expected {
        for a in attrs {
            if !present.contains(&(ty.clone(), a.clone())) {
                out.push(format!("missing {what} {ty}.{a}"));
            }
        }
    }
    out
}

/// Checks one of QC2a, QC2b, QC2c, QC3a, QC3b, QC3c.
///
/// # Panics
///
/// On QC1, QC4a or QC4b.
pub fn check_completeness(
    view: &FactView,
    inventory: &Inventory,
    criterion: Criterion,
) -> CriterionResult {
    let missing = match criterion {
        Criterion::QC2a => missing_attrs(
            &inventory.static_attributes,
            &view.static_attrs,
            "static attribute",
        ),
        Criterion::QC2b => {
            let mut m = missing_attrs(
                &inventory.dynamic_attributes,
                &view.dynamic_attrs,
                "dynamic attribute",
            );
            let any = inventory.dynamic_attributes.values().any(|s| !s.is_empty());
            if any && !view.unanchored_changes {
                m.push(
                    "attribute changes without an event (such as stock history before the first event) cannot be recorded"
                        .to_owned(),
                );
            }
            m
        }
        Criterion::QC2c => inventory
            .event_attributes
            .iter()
            .filter(|a| !view.event_attrs.contains(*a))
            .map(|a| format!("missing event attribute {a}"))
            .collect(),
        Criterion::QC3a => inventory
            .static_o2o
            .iter()
            .filter(|r| {
                !view
                    .static_o2o
                    .contains(&(r.source_type.clone(), r.name.clone()))
            })
            .map(|r| format!("missing static relation {}.{}", r.source_type, r.name))
            .collect(),
        Criterion::QC3b => inventory
            .dynamic_o2o
            .iter()
            .filter(|r| {
                !view
                    .dynamic_o2o
                    .iter()
                    .any(|f| match (&f.source_type, &f.target_type) {
                        (Some(s), Some(t)) => {
                            (s == &r.source_type && t == &r.target_type)
                                || (s == &r.target_type && t == &r.source_type)
                        }
                        _ => false,
                    })
            })
            .map(|r| {
                format!(
                    "missing dynamic relation {} -> {} ({})",
                    r.source_type, r.target_type, r.qualifier
                )
            })
            .collect(),
        Criterion::QC3c => {
            let pairs: BTreeSet<(&str, &str)> = inventory
                .e2o
                .iter()
                .map(|m| (m.activity.as_str(), m.object_type.as_str()))
                .collect();
            pairs
                .into_iter()
                .filter(|(act, ty)| {
                    !view
                        .e2o
                        .iter()
                        .any(|f| f.activity == *act && f.object_type.as_deref() == Some(*ty))
                })
                .map(|(act, ty)| format!("missing E2O relation {act} / {ty}"))
                .collect()
        }
        other => panic!("{other} is not a completeness criterion"),
    };
    CriterionResult::from_missing(missing)
}

fn qualifier_problem(q: Option<&str>, generic: &Regex) -> Option<String> {
    match q {
        None => Some("no qualifier".to_owned()),
        Some(q) if q.trim().is_empty() => Some("empty qualifier".to_owned()),
        Some(q) if generic.is_match(q) => Some(format!("generic qualifier `{q}`")),
        Some(_) => None,
    }
}

/// Checks QC4a or QC4b.
///
/// # Panics
///
/// On any other criterion.
pub fn check_qualifiers(view: &FactView, criterion: Criterion, generic: &Regex) -> CriterionResult {
    let problems: BTreeSet<String> = match criterion {
        Criterion::QC4a => view
            .dynamic_o2o
            .iter()
            .filter_map(|f| {
                qualifier_problem(f.qualifier.as_deref(), generic).map(|p| {
                    format!(
                        "O2O {} -> {}: {p}",
                        f.source_type.as_deref().unwrap_or("?"),
                        f.target_type.as_deref().unwrap_or("?")
                    )
                })
            })
            .collect(),
        Criterion::QC4b => view
            .e2o
            .iter()
            .filter_map(|f| {
                qualifier_problem(f.qualifier.as_deref(), generic).map(|p| {
                    format!(
                        "E2O {} / {}: {p}",
                        f.activity,
                        f.object_type.as_deref().unwrap_or("?")
                    )
                })
            })
            .collect(),
        other => panic!("{other} is not a qualifier criterion"),
    };
    CriterionResult::from_missing(problems.into_iter().collect())
}

// ---------------------------------------------------------------------------
// reports

/// A parsed log in one of the four formats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Representation {
    Dirigo(DirigoLog),
    Acel(AcelDocument),
    Docel(DocelBundle),
    Xoc(XocDocument),
}

impl Representation {
    pub fn format(&self) -> Format {
        match self {
            Representation::Dirigo(_) => Format::Dirigo,
            Representation::Acel(_) => Format::Acel,
            Representation::Docel(_) => Format::Docel,
            Representation::Xoc(_) => Format::Xoc,
        }
    }

    pub fn tables(&self) -> Vec<RelationalTable> {
        match self {
            Representation::Dirigo(l) => flatten_dirigo(l),
            Representation::Acel(d) => flatten_acel(d),
            Representation::Docel(b) => flatten_docel(b),
            Representation::Xoc(d) => flatten_xoc(d),
        }
    }

    pub fn view(&self) -> FactView {
        match self {
            Representation::Dirigo(l) => FactView::of_dirigo(l),
            Representation::Acel(d) => FactView::of_acel(d),
            Representation::Docel(b) => FactView::of_docel(b),
            Representation::Xoc(d) => FactView::of_xoc(d),
        }
    }

    /// Reads a bundle directory (Dirigo, DOCEL) or a JSON document (ACEL, XOC).
    pub fn read(format: Format, path: &Path) -> Result<Self, FormatError> {
        Ok(match format {
            Format::Dirigo => Representation::Dirigo(read_dirigo(path)?),
            Format::Acel => Representation::Acel(read_acel(path)?),
            Format::Docel => Representation::Docel(read_docel(path)?),
            Format::Xoc => Representation::Xoc(read_xoc(path)?),
        })
    }

    pub fn write(&self, path: &Path) -> Result<(), FormatError> {
        match self {
            Representation::Dirigo(l) => write_dirigo(l, path),
            Representation::Acel(d) => write_acel(d, path),
            Representation::Docel(b) => write_docel(b, path),
            Representation::Xoc(d) => write_xoc(d, path),
        }
    }
}

#[derive(Debug, Clone)]
pub struct QualityOptions {
    pub generic_qualifier: Regex,
}

impl Default for QualityOptions {
    fn default() -> Self {
        QualityOptions {
            generic_qualifier: Regex::new(DEFAULT_GENERIC_QUALIFIER).expect("valid pattern"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QcReport {
    pub representation: String,
    pub results: BTreeMap<Criterion, CriterionResult>,
}

impl QcReport {
    pub fn passes(&self) -> usize {
        self.results.values().filter(|r| r.pass).count()
    }

    pub fn failed(&self) -> Vec<Criterion> {
        self.results
            .iter()
            .filter(|(_, r)| !r.pass)
            .map(|(c, _)| *c)
            .collect()
    }

    pub fn all_pass(&self) -> bool {
        self.results.len() == Criterion::ALL.len() && self.failed().is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// One line per criterion: `QC2b FAIL dynamic object attributes`, followed
/// by indented evidence.
impl fmt::Display for QcReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {}/{} criteria pass",
            self.representation,
            self.passes(),
            self.results.len()
        )?;
        for (c, r) in &self.results {
            writeln!(
                f,
                "{:<5} {} {}",
                c.to_string(),
                if r.pass { "PASS" } else { "FAIL" },
                c.description()
            )?;
            for e in &r.evidence {
                writeln!(f, "      {e}")?;
            }
        }
        Ok(())
    }
}

fn normal_form_result(tables: &[RelationalTable]) -> CriterionResult {
    let mut evidence = Vec::new();
    for t in tables {
        let nf1 = check_1nf(t);
        if nf1.is_empty() {
            let v2 = check_2nf(t).expect("1NF holds");
            let v3 = check_3nf(t).expect("1NF holds");
            evidence.extend(v2.iter().chain(&v3).map(|v| format!("3NF: {v}")));
            continue;
        }
        let columns: BTreeSet<&str> = nf1
            .iter()
            .map(|v| match v {
                Violation::MultiValued { column, .. } => column.as_str(),
                _ => unreachable!(),
            })
            .collect();
        for c in columns {
            evidence.push(format!(
                "1NF: {}: column `{c}` contains multiple values",
                t.name
            ));
        }
        // the declared dependencies are still worth pointing out
        for v in declared_2nf_violations(t)
            .iter()
            .chain(&declared_3nf_violations(t))
        {
            evidence.push(format!("3NF (declared): {v}"));
        }
    }
    CriterionResult::from_missing(evidence)
}

pub fn evaluate_all(representation: &Representation, spec: &DomainSpec) -> QcReport {
    evaluate_with(representation, spec, &QualityOptions::default())
}

pub fn evaluate_with(
    representation: &Representation,
    spec: &DomainSpec,
    options: &QualityOptions,
) -> QcReport {
    let inventory = expected_inventory(spec);
    let view = representation.view();
    let mut results = BTreeMap::new();
    results.insert(Criterion::QC1, normal_form_result(&representation.tables()));
    for c in [
        Criterion::QC2a,
        Criterion::QC2b,
        Criterion::QC2c,
        Criterion::QC3a,
        Criterion::QC3b,
        Criterion::QC3c,
    ] {
        results.insert(c, check_completeness(&view, &inventory, c));
    }
    for c in [Criterion::QC4a, Criterion::QC4b] {
        results.insert(c, check_qualifiers(&view, c, &options.generic_qualifier));
    }
    QcReport {
        representation: representation.format().name().to_owned(),
        results,
    }
}

/// Criteria as rows, representations as columns, a check mark per pass.
pub fn report_matrix(reports: &[QcReport]) -> String {
    let mut widths: Vec<usize> = reports
        .iter()
        .map(|r| r.representation.chars().count().max(1))
        .collect();
    widths.iter_mut().for_each(|w| *w = (*w).max(2));
    let mut out = format!("{:<10}", "Criterion");
    for (r, w) in reports.iter().zip(&widths) {
        out.push_str(&format!(" {:<w$}", r.representation, w = w));
    }
    out = out.trim_end().to_owned();
    out.push('\n');
    for c in Criterion::ALL {
        let mut line = format!("{:<10}", c.to_string());
        for (r, w) in reports.iter().zip(&widths) {
            let mark = match r.results.get(&c) {
                Some(res) if res.pass => "✓",
                _ => "",
            };
            line.push_str(&format!(" {:<w$}", mark, w = w));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

pub fn report_matrix_csv(reports: &[QcReport]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut header = vec!["criterion".to_owned()];
    header.extend(reports.iter().map(|r| r.representation.clone()));
    w.write_record(&header).expect("in-memory write");
    for c in Criterion::ALL {
        let mut row = vec![c.to_string()];
        row.extend(reports.iter().map(|r| {
            match r.results.get(&c) {
                Some(res) if res.pass => "pass",
                _ => "fail",
            }
            .to_owned()
        }));
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// Whether the dependency holds row by row in the table data.
pub fn fd_holds(table: &RelationalTable, fd: &FunctionalDependency) -> bool {
    let idx = |cols: &[String]| -> Option<Vec<usize>> {
        cols.iter().map(|c| table.column_index(c)).collect()
    };
    let (Some(x), Some(y)) = (idx(&fd.determinant), idx(&fd.dependent)) else {
        return false;
    };
    let mut seen: HashMap<Vec<&Cell>, Vec<&Cell>> = HashMap::new();
    table.rows.iter().all(|row| {
        let k: Vec<&Cell> = x.iter().map(|&i| &row[i]).collect();
        let v: Vec<&Cell> = y.iter().map(|&i| &row[i]).collect();
        seen.entry(k).or_insert_with(|| v.clone()) == &v
    })
}
