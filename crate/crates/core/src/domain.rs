//! Declarative domain model: goals, activities with roles, object types with
//! attribute declarations, the E2O qualifier map and O2O relation types.
//!
//! The document is TOML with five sections, one per modelling step:
//!
//! ```toml
//! [goal]
//! statement = "Reduce truck turnaround time"
//! questions = ["How long does a truck wait at the weighbridge?"]
//!
//! [[activities]]
//! name = "Weigh the empty truck"
//! roles = ["Weighbridge staff"]
//!
//! [[object_types]]
//! name = "Truck"
//! id_scheme = "VIN"
//! attributes = [
//!   { name = "AxleNo", dynamics = "static", necessity = "mandatory", domain = "{2,4,6}" },
//! ]
//!
//! [[e2o]]
//! activity = "Weigh the empty truck"
//! object_type = "Truck"
//! qualifier = "Weighed empty truck"
//!
//! [[o2o]]
//! source_type = "Truck"
//! target_type = "Truck"
//! qualifier = "Towed by"
//! kind = "dynamic"
//! ```
//!
//! An attribute whose `domain` is `object:<Type>` holds the id of another
//! object and counts as a static object-to-object relation. An `o2o` entry
//! may name the qualifier it `closes` (e.g. a drop that ends an assignment).

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::DirigoLog;

pub const BOOLEAN_DOMAIN: &str = "{true,false}";
const OBJECT_DOMAIN_PREFIX: &str = "object:";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dynamics {
    Static,
    Dynamic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Necessity {
    Mandatory,
    Optional,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Goal {
    #[serde(default)]
    pub statement: String,
    #[serde(default)]
    pub questions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Activity {
    pub name: String,
    #[serde(default)]
    pub roles: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttributeDef {
    pub name: String,
    pub dynamics: Dynamics,
    pub necessity: Necessity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub boolean_flag: bool,
}

impl AttributeDef {
    /// Object type referenced by an `object:<Type>` domain.
    pub fn referenced_type(&self) -> Option<&str> {
        self.domain
            .as_deref()
            .and_then(|d| d.strip_prefix(OBJECT_DOMAIN_PREFIX))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectTypeDef {
    pub name: String,
    #[serde(default)]
    pub id_scheme: String,
    #[serde(default)]
    pub attributes: Vec<AttributeDef>,
}

impl ObjectTypeDef {
    pub fn attribute(&self, name: &str) -> Option<&AttributeDef> {
        self.attributes.iter().find(|a| a.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct E2OMapping {
    pub activity: String,
    pub object_type: String,
    pub qualifier: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct O2OType {
    pub source_type: String,
    pub target_type: String,
    pub qualifier: String,
    pub kind: Dynamics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closes: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    #[serde(default)]
    pub goal: Goal,
    #[serde(default)]
    pub activities: Vec<Activity>,
    #[serde(default)]
    pub object_types: Vec<ObjectTypeDef>,
    #[serde(default)]
    pub e2o: Vec<E2OMapping>,
    #[serde(default)]
    pub o2o: Vec<O2OType>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("syntax error{}: {message}", location.map(|(l, c)| format!(" at line {l}, column {c}")).unwrap_or_default())]
    Syntax {
        message: String,
        location: Option<(usize, usize)>,
    },
    #[error("{context} references undeclared {kind} `{name}`")]
    UnknownReference {
        context: String,
        kind: &'static str,
        name: String,
    },
    #[error("duplicate {kind} name `{name}`")]
    DuplicateName { kind: &'static str, name: String },
    #[error("empty {0}")]
    Empty(String),
    #[error("boolean attribute `{0}` must have domain {BOOLEAN_DOMAIN}")]
    BooleanDomain(String),
}

impl DomainSpec {
    pub fn parse(document: &str) -> Result<Self, SpecError> {
        let mut spec: DomainSpec = toml::from_str(document).map_err(|e| {
            let location = e.span().map(|span| line_col(document, span.start));
            SpecError::Syntax {
                message: e.message().to_owned(),
                location,
            }
        })?;
        spec.normalize();
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_document(&self) -> String {
        toml::to_string(self).expect("domain spec serializes")
    }

    fn normalize(&mut self) {
        for ty in &mut self.object_types {
            for attr in &mut ty.attributes {
                if attr.boolean_flag && attr.domain.is_none() {
                    attr.domain = Some(BOOLEAN_DOMAIN.to_owned());
                }
            }
        }
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        let mut activities = HashSet::new();
        for a in &self.activities {
            if a.name.trim().is_empty() {
                return Err(SpecError::Empty("activity name".into()));
            }
            if !activities.insert(a.name.as_str()) {
                return Err(SpecError::DuplicateName {
                    kind: "activity",
                    name: a.name.clone(),
                });
            }
        }
        let mut types = HashSet::new();
        for ty in &self.object_types {
            if ty.name.trim().is_empty() {
                return Err(SpecError::Empty("object type name".into()));
            }
            if !types.insert(ty.name.as_str()) {
                return Err(SpecError::DuplicateName {
                    kind: "object type",
                    name: ty.name.clone(),
                });
            }
            let mut attrs = HashSet::new();
            for attr in &ty.attributes {
                if attr.name.trim().is_empty() {
                    return Err(SpecError::Empty(format!("attribute name in {}", ty.name)));
                }
                if !attrs.insert(attr.name.as_str()) {
                    return Err(SpecError::DuplicateName {
                        kind: "attribute",
                        name: format!("{}.{}", ty.name, attr.name),
                    });
                }
                if attr.boolean_flag && attr.domain.as_deref() != Some(BOOLEAN_DOMAIN) {
                    return Err(SpecError::BooleanDomain(format!(
                        "{}.{}",
                        ty.name, attr.name
                    )));
                }
            }
        }
        let unknown =
            |context: String, kind: &'static str, name: &str| SpecError::UnknownReference {
                context,
                kind,
                name: name.to_owned(),
            };
        for m in &self.e2o {
            let ctx = format!("e2o entry `{}`", m.qualifier);
            if !activities.contains(m.activity.as_str()) {
                return Err(unknown(ctx, "activity", &m.activity));
            }
            if !types.contains(m.object_type.as_str()) {
                return Err(unknown(ctx, "object type", &m.object_type));
            }
            if m.qualifier.trim().is_empty() {
                return Err(SpecError::Empty("e2o qualifier".into()));
            }
        }
        let qualifiers: HashSet<&str> = self.o2o.iter().map(|r| r.qualifier.as_str()).collect();
        for r in &self.o2o {
            let ctx = format!("o2o entry `{}`", r.qualifier);
            for t in [&r.source_type, &r.target_type] {
                if !types.contains(t.as_str()) {
                    return Err(unknown(ctx.clone(), "object type", t));
                }
            }
            if r.qualifier.trim().is_empty() {
                return Err(SpecError::Empty("o2o qualifier".into()));
            }
            if let Some(closed) = &r.closes {
                if !qualifiers.contains(closed.as_str()) {
                    return Err(unknown(ctx, "o2o qualifier", closed));
                }
            }
        }
        Ok(())
    }

    pub fn activity(&self, name: &str) -> Option<&Activity> {
        self.activities.iter().find(|a| a.name == name)
    }

    pub fn object_type(&self, name: &str) -> Option<&ObjectTypeDef> {
        self.object_types.iter().find(|t| t.name == name)
    }

    /// Pairs of (opening qualifier, closing qualifier) declared via `closes`.
    pub fn closing_pairs(&self) -> Vec<(String, String)> {
        self.o2o
            .iter()
            .filter_map(|r| {
                r.closes
                    .as_ref()
                    .map(|open| (open.clone(), r.qualifier.clone()))
            })
            .collect()
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
    (line, col)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Deviation {
    UndeclaredActivity {
        event_id: String,
        activity: String,
    },
    UndeclaredObjectType {
        object_id: String,
        object_type: String,
    },
    MissingMandatoryAttribute {
        object_id: String,
        attribute: String,
    },
    UndeclaredAttribute {
        object_id: String,
        attribute: String,
    },
    E2OWithoutMapping {
        event_id: String,
        object_id: String,
        qualifier: String,
    },
    O2OWithoutDeclaredType {
        source: String,
        target: String,
        qualifier: String,
    },
    MissingRole {
        event_id: String,
        activity: String,
    },
}

/// Compares a log against the domain model. An empty result means the log
/// is fully conformant.
pub fn conformance(log: &DirigoLog, spec: &DomainSpec) -> Vec<Deviation> {
    let mut out = Vec::new();
    for ev in log.events() {
        match spec.activity(&ev.activity) {
            None => out.push(Deviation::UndeclaredActivity {
                event_id: ev.event_id.clone(),
                activity: ev.activity.clone(),
            }),
            Some(a) if !a.roles.is_empty() && ev.resource.as_deref().is_none_or(str::is_empty) => {
                out.push(Deviation::MissingRole {
                    event_id: ev.event_id.clone(),
                    activity: ev.activity.clone(),
                })
            }
            Some(_) => {}
        }
    }
    for obj in log.objects() {
        let Some(ty) = spec.object_type(&obj.object_type) else {
            out.push(Deviation::UndeclaredObjectType {
                object_id: obj.object_id.clone(),
                object_type: obj.object_type.clone(),
            });
            continue;
        };
        for attr in &ty.attributes {
            let present = match attr.dynamics {
                Dynamics::Static => obj.static_attributes.contains_key(&attr.name),
                Dynamics::Dynamic => obj
                    .dynamic_history
                    .get(&attr.name)
                    .is_some_and(|h| !h.is_empty()),
            };
            if attr.necessity == Necessity::Mandatory && !present {
                out.push(Deviation::MissingMandatoryAttribute {
                    object_id: obj.object_id.clone(),
                    attribute: attr.name.clone(),
                });
            }
        }
        let declared = |name: &str, dynamics: Dynamics| {
            ty.attribute(name).is_some_and(|a| a.dynamics == dynamics)
        };
        for name in obj.static_attributes.keys() {
            if !declared(name, Dynamics::Static) {
                out.push(Deviation::UndeclaredAttribute {
                    object_id: obj.object_id.clone(),
                    attribute: name.clone(),
                });
            }
        }
        for name in obj.dynamic_history.keys() {
            if !declared(name, Dynamics::Dynamic) {
                out.push(Deviation::UndeclaredAttribute {
                    object_id: obj.object_id.clone(),
                    attribute: name.clone(),
                });
            }
        }
    }
    let e2o_map: HashSet<(&str, &str, &str)> = spec
        .e2o
        .iter()
        .map(|m| {
            (
                m.activity.as_str(),
                m.object_type.as_str(),
                m.qualifier.as_str(),
            )
        })
        .collect();
    for row in log.e2o() {
        let activity = log.event(&row.event_id).map(|e| e.activity.as_str());
        let ty = log.object(&row.object_id).map(|o| o.object_type.as_str());
        let ok = matches!((activity, ty), (Some(a), Some(t)) if e2o_map.contains(&(a, t, row.qualifier.as_str())));
        if !ok {
            out.push(Deviation::E2OWithoutMapping {
                event_id: row.event_id.clone(),
                object_id: row.object_id.clone(),
                qualifier: row.qualifier.clone(),
            });
        }
    }
    let o2o_types: HashSet<(&str, &str, &str)> = spec
        .o2o
        .iter()
        .map(|r| {
            (
                r.source_type.as_str(),
                r.target_type.as_str(),
                r.qualifier.as_str(),
            )
        })
        .collect();
    for row in log.o2o() {
        let src = log
            .object(&row.source_object_id)
            .map(|o| o.object_type.as_str());
        let tgt = log
            .object(&row.target_object_id)
            .map(|o| o.object_type.as_str());
        let ok = matches!((src, tgt), (Some(s), Some(t)) if o2o_types.contains(&(s, t, row.qualifier.as_str())));
        if !ok {
            out.push(Deviation::O2OWithoutDeclaredType {
                source: row.source_object_id.clone(),
                target: row.target_object_id.clone(),
                qualifier: row.qualifier.clone(),
            });
        }
    }
    out
}

/// A static object-to-object relation as expected by the completeness
/// checks: either an `object:`-typed attribute or a static `o2o` qualifier,
/// keyed by its source type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct StaticRelation {
    pub source_type: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DynamicRelation {
    pub source_type: String,
    pub target_type: String,
    pub qualifier: String,
}

/// The expectation sets the completeness criteria are measured against.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Inventory {
    pub static_attributes: BTreeMap<String, BTreeSet<String>>,
    pub dynamic_attributes: BTreeMap<String, BTreeSet<String>>,
    pub event_attributes: BTreeSet<String>,
    pub static_o2o: BTreeSet<StaticRelation>,
    pub dynamic_o2o: BTreeSet<DynamicRelation>,
    pub e2o: BTreeSet<E2OMapping>,
}

pub const EVENT_ACTIVITY: &str = "activity";
pub const EVENT_TIMESTAMP: &str = "timestamp";
pub const EVENT_RESOURCE: &str = "resource";

pub fn expected_inventory(spec: &DomainSpec) -> Inventory {
    let mut inv = Inventory::default();
    for ty in &spec.object_types {
        for attr in &ty.attributes {
            let bucket = match attr.dynamics {
                Dynamics::Static => &mut inv.static_attributes,
                Dynamics::Dynamic => &mut inv.dynamic_attributes,
            };
            bucket
                .entry(ty.name.clone())
                .or_default()
                .insert(attr.name.clone());
            if attr.dynamics == Dynamics::Static && attr.referenced_type().is_some() {
                inv.static_o2o.insert(StaticRelation {
                    source_type: ty.name.clone(),
                    name: attr.name.clone(),
                });
            }
        }
    }
    if !spec.activities.is_empty() {
        inv.event_attributes.insert(EVENT_ACTIVITY.to_owned());
        inv.event_attributes.insert(EVENT_TIMESTAMP.to_owned());
    }
    if spec.activities.iter().any(|a| !a.roles.is_empty()) {
        inv.event_attributes.insert(EVENT_RESOURCE.to_owned());
    }
    for r in &spec.o2o {
        match r.kind {
            Dynamics::Static => {
                inv.static_o2o.insert(StaticRelation {
                    source_type: r.source_type.clone(),
                    name: r.qualifier.clone(),
                });
            }
            Dynamics::Dynamic => {
                inv.dynamic_o2o.insert(DynamicRelation {
                    source_type: r.source_type.clone(),
                    target_type: r.target_type.clone(),
                    qualifier: r.qualifier.clone(),
                });
            }
        }
    }
    inv.e2o = spec.e2o.iter().cloned().collect();
    inv
}
