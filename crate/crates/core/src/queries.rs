//! Parameterized goal queries over a [`DirigoLog`].
//!
//! Objects are addressed with an [`ObjectSelector`]: a raw id, or a static
//! attribute value such as a license plate.
//!
//! ```
//! use dirigo::queries::{q_static_attribute, ObjectSelector};
//! use dirigo::sim::golden_log;
//!
//! let log = golden_log();
//! let truck: ObjectSelector = "LicensePlateNr=841DKJ".parse().unwrap();
//! assert_eq!(q_static_attribute(&log, &truck, "AxleNo").unwrap(), "4");
//! ```

use std::convert::Infallible;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::model::{DirigoLog, LookupError, ObjectInstance, Timestamp};

pub const ASSIGN_QUALIFIER: &str = "Assigned Truck for Pickup Plan";
pub const DROP_QUALIFIER: &str = "Dropped Truck from Pickup Plan";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("selector `{selector}` matches several objects: {}", matches.join(", "))]
    AmbiguousSelector {
        selector: String,
        matches: Vec<String>,
    },
    #[error("object `{object}` has no attribute `{attribute}`")]
    UnknownAttribute { object: String, attribute: String },
    #[error("`{object}.{attribute}` has no value before its latest one")]
    NoPriorValue { object: String, attribute: String },
    #[error("no match: {0}")]
    NoMatch(String),
    #[error("several matches for {what}: {}", candidates.join(", "))]
    AmbiguousMatch {
        what: String,
        candidates: Vec<String>,
    },
    #[error("`{object}.{attribute}` has no value at {at}")]
    NoValue {
        object: String,
        attribute: String,
        at: String,
    },
}

impl From<LookupError> for QueryError {
    fn from(e: LookupError) -> Self {
        match e {
            LookupError::UnknownObject(o) => QueryError::UnknownObject(o),
            LookupError::UnknownEvent(ev) => QueryError::NoMatch(format!("unknown event `{ev}`")),
            LookupError::UnknownAttribute { object, attribute } => {
                QueryError::UnknownAttribute { object, attribute }
            }
            LookupError::NoValue {
                object,
                attribute,
                at,
            } => QueryError::NoValue {
                object,
                attribute,
                at,
            },
            LookupError::UnknownTimestamp(t) => {
                QueryError::NoMatch(format!("unknown timestamp `{t}`"))
            }
        }
    }
}

/// How a query names its object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObjectSelector {
    Id(String),
    /// An object whose static `attribute` equals `value`.
    ByAttribute {
        object_type: Option<String>,
        attribute: String,
        value: String,
    },
    /// An id if one exists, otherwise a unique static attribute value.
    Auto(String),
}

/// `Type.Attr=Value`, `Attr=Value`, or a bare id or value.
impl FromStr for ObjectSelector {
    type Err = Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.split_once('=') {
            Some((lhs, value)) => {
                let (object_type, attribute) = match lhs.split_once('.') {
                    Some((t, a)) => (Some(t.trim().to_owned()), a.trim()),
                    None => (None, lhs.trim()),
                };
                ObjectSelector::ByAttribute {
                    object_type,
                    attribute: attribute.to_owned(),
                    value: value.trim().to_owned(),
                }
            }
            None => ObjectSelector::Auto(s.trim().to_owned()),
        })
    }
}

impl fmt::Display for ObjectSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectSelector::Id(id) | ObjectSelector::Auto(id) => f.write_str(id),
            ObjectSelector::ByAttribute {
                object_type: Some(t),
                attribute,
                value,
            } => write!(f, "{t}.{attribute}={value}"),
            ObjectSelector::ByAttribute {
                object_type: None,
                attribute,
                value,
            } => write!(f, "{attribute}={value}"),
        }
    }
}

impl ObjectSelector {
    pub fn id(id: impl Into<String>) -> Self {
        ObjectSelector::Id(id.into())
    }

    pub fn resolve<'a>(&self, log: &'a DirigoLog) -> Result<&'a ObjectInstance, QueryError> {
        match self {
            ObjectSelector::Id(id) => log
                .object(id)
                .ok_or_else(|| QueryError::UnknownObject(id.clone())),
            ObjectSelector::ByAttribute {
                object_type,
                attribute,
                value,
            } => self.unique(log, |o| {
                object_type.as_ref().is_none_or(|t| *t == o.object_type)
                    && o.static_attributes
                        .get(attribute)
                        .is_some_and(|sv| sv.value == *value)
            }),
            ObjectSelector::Auto(text) => match log.object(text) {
                Some(o) => Ok(o),
                None => self.unique(log, |o| {
                    o.static_attributes.values().any(|sv| sv.value == *text)
                }),
            },
        }
    }

    fn unique<'a>(
        &self,
        log: &'a DirigoLog,
        pred: impl Fn(&ObjectInstance) -> bool,
    ) -> Result<&'a ObjectInstance, QueryError> {
        let hits: Vec<&ObjectInstance> = log.objects().iter().filter(|o| pred(o)).collect();
        match hits.as_slice() {
            [] => Err(QueryError::UnknownObject(self.to_string())),
            [one] => Ok(one),
            many => Err(QueryError::AmbiguousSelector {
                selector: self.to_string(),
                matches: many.iter().map(|o| o.object_id.clone()).collect(),
            }),
        }
    }
}

/// The value of a static attribute.
pub fn q_static_attribute(
    log: &DirigoLog,
    selector: &ObjectSelector,
    attribute: &str,
) -> Result<String, QueryError> {
    let obj = selector.resolve(log)?;
    obj.static_attributes
        .get(attribute)
        .map(|sv| sv.value.clone())
        .ok_or_else(|| QueryError::UnknownAttribute {
            object: obj.object_id.clone(),
            attribute: attribute.to_owned(),
        })
}

/// The second to last entry of an attribute's history.
pub fn q_last_but_one(
    log: &DirigoLog,
    selector: &ObjectSelector,
    attribute: &str,
) -> Result<(Timestamp, String), QueryError> {
    let obj = selector.resolve(log)?;
    let history = log.attribute_history(&obj.object_id, attribute)?;
    match history.len() {
        0 | 1 => Err(QueryError::NoPriorValue {
            object: obj.object_id.clone(),
            attribute: attribute.to_owned(),
        }),
        n => {
            let c = &history[n - 2];
            Ok((c.timestamp.clone(), c.value.clone()))
        }
    }
}

/// When the single `activity` event involving the object happened.
pub fn q_event_time(
    log: &DirigoLog,
    activity: &str,
    selector: &ObjectSelector,
) -> Result<Timestamp, QueryError> {
    let obj = selector.resolve(log)?;
    let hits: Vec<_> = log
        .events()
        .iter()
        .filter(|e| e.activity == activity && log.event_involves(&e.event_id, &obj.object_id))
        .collect();
    match hits.as_slice() {
        [] => Err(QueryError::NoMatch(format!(
            "no `{activity}` event involves {}",
            obj.object_id
        ))),
        [one] => Ok(one.timestamp.clone()),
        many => Err(QueryError::AmbiguousMatch {
            what: format!("`{activity}` events of {}", obj.object_id),
            candidates: many.iter().map(|e| e.event_id.clone()).collect(),
        }),
    }
}

/// The object a static relation points to: a static attribute whose value
/// is an object id, or the target of O2O rows with that qualifier.
pub fn q_static_o2o(
    log: &DirigoLog,
    selector: &ObjectSelector,
    name: &str,
) -> Result<String, QueryError> {
    let obj = selector.resolve(log)?;
    if let Some(sv) = obj.static_attributes.get(name) {
        return if log.object(&sv.value).is_some() {
            Ok(sv.value.clone())
        } else {
            Err(QueryError::NoMatch(format!(
                "`{}.{name}` = `{}` is not an object",
                obj.object_id, sv.value
            )))
        };
    }
    let mut targets: Vec<&str> = log
        .o2o()
        .iter()
        .filter(|r| r.source_object_id == obj.object_id && r.qualifier == name)
        .map(|r| r.target_object_id.as_str())
        .collect();
    targets.sort_unstable();
    targets.dedup();
    match targets.as_slice() {
        [] => Err(QueryError::NoMatch(format!(
            "{} has no relation `{name}`",
            obj.object_id
        ))),
        [one] => Ok((*one).to_owned()),
        many => Err(QueryError::AmbiguousMatch {
            what: format!("relation `{name}` of {}", obj.object_id),
            candidates: many.iter().map(|s| s.to_string()).collect(),
        }),
    }
}

/// Where the object went after it was last dropped, using the default
/// assign and drop qualifiers.
pub fn q_next_assignment(log: &DirigoLog, selector: &ObjectSelector) -> Result<String, QueryError> {
    q_next_assignment_with(log, selector, ASSIGN_QUALIFIER, DROP_QUALIFIER)
}

/// Target of the first `assign` row strictly after the latest `drop` row.
pub fn q_next_assignment_with(
    log: &DirigoLog,
    selector: &ObjectSelector,
    assign: &str,
    drop: &str,
) -> Result<String, QueryError> {
    let obj = selector.resolve(log)?;
    let own: Vec<_> = log
        .o2o()
        .iter()
        .filter(|r| r.source_object_id == obj.object_id)
        .collect();
    let last_drop = own
        .iter()
        .rev()
        .find(|r| r.qualifier == drop)
        .ok_or_else(|| QueryError::NoMatch(format!("{} was never dropped", obj.object_id)))?;
    let dropped_at = log.rank(&last_drop.timestamp);
    own.iter()
        .find(|r| r.qualifier == assign && log.rank(&r.timestamp) > dropped_at)
        .map(|r| r.target_object_id.clone())
        .ok_or_else(|| {
            QueryError::NoMatch(format!(
                "{} was not assigned again after {}",
                obj.object_id, last_drop.timestamp
            ))
        })
}

/// The attribute's value at the first `activity` event involving the object.
pub fn q_attribute_before_event(
    log: &DirigoLog,
    selector: &ObjectSelector,
    attribute: &str,
    activity: &str,
) -> Result<String, QueryError> {
    let obj = selector.resolve(log)?;
    let event = log
        .events()
        .iter()
        .find(|e| e.activity == activity && log.event_involves(&e.event_id, &obj.object_id))
        .ok_or_else(|| {
            QueryError::NoMatch(format!("no `{activity}` event involves {}", obj.object_id))
        })?;
    Ok(log
        .attribute_at(&obj.object_id, attribute, &event.timestamp)?
        .to_owned())
}

/// The event during which the earliest `qualifier` relation of the object
/// was recorded.
pub fn q_o2o_event(
    log: &DirigoLog,
    selector: &ObjectSelector,
    qualifier: &str,
) -> Result<(String, Timestamp), QueryError> {
    let obj = selector.resolve(log)?;
    let row = log
        .o2o()
        .iter()
        .find(|r| r.involves(&obj.object_id) && r.qualifier == qualifier)
        .ok_or_else(|| {
            QueryError::NoMatch(format!("{} has no `{qualifier}` relation", obj.object_id))
        })?;
    let events: Vec<_> = log
        .events_at(&row.timestamp)
        .filter(|e| log.event_involves(&e.event_id, &obj.object_id))
        .collect();
    match events.as_slice() {
        [] => Err(QueryError::NoMatch(format!(
            "no event at {} involves {}",
            row.timestamp, obj.object_id
        ))),
        [one] => Ok((one.event_id.clone(), one.timestamp.clone())),
        many => Err(QueryError::AmbiguousMatch {
            what: format!("events at {} involving {}", row.timestamp, obj.object_id),
            candidates: many.iter().map(|e| e.event_id.clone()).collect(),
        }),
    }
}

/// Timestamps where the attribute went from `from` to `to`.
pub fn q_status_transitions(
    log: &DirigoLog,
    selector: &ObjectSelector,
    attribute: &str,
    from: &str,
    to: &str,
) -> Result<Vec<Timestamp>, QueryError> {
    let obj = selector.resolve(log)?;
    let history = log.attribute_history(&obj.object_id, attribute)?;
    Ok(history
        .windows(2)
        .filter(|w| w[0].value == from && w[1].value == to)
        .map(|w| w[1].timestamp.clone())
        .collect())
}
