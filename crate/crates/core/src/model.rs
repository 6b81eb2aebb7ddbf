//! Normalized object-centric log: events, objects with attribute histories,
//! qualified event-to-object rows and time-stamped object-to-object rows,
//! all anchored on one shared timeline.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimestampKind {
    Symbolic,
    Absolute,
}

/// A point on the log timeline.
///
/// Tokens that parse as RFC 3339 instants are absolute; anything else
/// (`t0`, `t_pre`, ...) is symbolic and ordered by its position in the
/// timeline rather than lexically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Timestamp(String);

impl Timestamp {
    pub fn new(token: impl Into<String>) -> Self {
        Timestamp(token.into())
    }

    pub fn token(&self) -> &str {
        &self.0
    }

    pub fn kind(&self) -> TimestampKind {
        if self.instant().is_some() {
            TimestampKind::Absolute
        } else {
            TimestampKind::Symbolic
        }
    }

    pub fn instant(&self) -> Option<DateTime<Utc>> {
        DateTime::parse_from_rfc3339(&self.0)
            .ok()
            .map(|dt| dt.with_timezone(&Utc))
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Timestamp {
    fn from(s: &str) -> Self {
        Timestamp::new(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRecord {
    pub event_id: String,
    pub activity: String,
    pub timestamp: Timestamp,
    pub resource: Option<String>,
}

impl EventRecord {
    pub fn new(
        event_id: impl Into<String>,
        activity: impl Into<String>,
        timestamp: impl Into<Timestamp>,
        resource: Option<&str>,
    ) -> Self {
        EventRecord {
            event_id: event_id.into(),
            activity: activity.into(),
            timestamp: timestamp.into(),
            resource: resource.map(str::to_owned),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StaticValue {
    pub value: String,
    pub recorded_at: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Change {
    pub timestamp: Timestamp,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectInstance {
    pub object_id: String,
    pub object_type: String,
    pub static_attributes: BTreeMap<String, StaticValue>,
    pub dynamic_history: BTreeMap<String, Vec<Change>>,
}

impl ObjectInstance {
    pub fn new(object_id: impl Into<String>, object_type: impl Into<String>) -> Self {
        ObjectInstance {
            object_id: object_id.into(),
            object_type: object_type.into(),
            static_attributes: BTreeMap::new(),
            dynamic_history: BTreeMap::new(),
        }
    }

    pub fn with_static(
        mut self,
        attribute: impl Into<String>,
        value: impl Into<String>,
        recorded_at: impl Into<Timestamp>,
    ) -> Self {
        self.static_attributes.insert(
            attribute.into(),
            StaticValue {
                value: value.into(),
                recorded_at: recorded_at.into(),
            },
        );
        self
    }

    pub fn with_change(
        mut self,
        attribute: impl Into<String>,
        timestamp: impl Into<Timestamp>,
        value: impl Into<String>,
    ) -> Self {
        self.dynamic_history
            .entry(attribute.into())
            .or_default()
            .push(Change {
                timestamp: timestamp.into(),
                value: value.into(),
            });
        self
    }

    pub fn has_attribute(&self, attribute: &str) -> bool {
        self.static_attributes.contains_key(attribute)
            || self.dynamic_history.contains_key(attribute)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct E2ORecord {
    pub event_id: String,
    pub object_id: String,
    pub qualifier: String,
}

impl E2ORecord {
    pub fn new(
        event_id: impl Into<String>,
        object_id: impl Into<String>,
        qualifier: impl Into<String>,
    ) -> Self {
        E2ORecord {
            event_id: event_id.into(),
            object_id: object_id.into(),
            qualifier: qualifier.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct O2ORecord {
    pub source_object_id: String,
    pub target_object_id: String,
    pub timestamp: Timestamp,
    pub qualifier: String,
}

impl O2ORecord {
    pub fn new(
        source: impl Into<String>,
        target: impl Into<String>,
        timestamp: impl Into<Timestamp>,
        qualifier: impl Into<String>,
    ) -> Self {
        O2ORecord {
            source_object_id: source.into(),
            target_object_id: target.into(),
            timestamp: timestamp.into(),
            qualifier: qualifier.into(),
        }
    }

    pub fn involves(&self, object_id: &str) -> bool {
        self.source_object_id == object_id || self.target_object_id == object_id
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("dangling reference: {context} names unknown id `{id}`")]
    DanglingReference { context: &'static str, id: String },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("timestamp `{0}` is not on the timeline")]
    UnknownTimestamp(String),
    #[error("timestamp `{0}` appears on the timeline more than once")]
    DuplicateTimestamp(String),
    #[error("timeline mixes symbolic and absolute timestamps")]
    MixedTimestampKinds,
    #[error("event `{0}` has an empty activity name")]
    EmptyActivity(String),
    #[error("empty qualifier on {0}")]
    EmptyQualifier(String),
    #[error("object `{object}` records `{attribute}` twice at {timestamp}")]
    DuplicateChange {
        object: String,
        attribute: String,
        timestamp: String,
    },
    #[error("object `{object}` declares `{attribute}` as both static and dynamic")]
    AttributeKindConflict { object: String, attribute: String },
    #[error("object `{object}` has an empty value for static attribute `{attribute}`")]
    EmptyStaticValue { object: String, attribute: String },
    #[error("duplicate e2o row ({0})")]
    DuplicateE2O(String),
    #[error("duplicate o2o row ({0})")]
    DuplicateO2O(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LookupError {
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("object `{object}` has no attribute `{attribute}`")]
    UnknownAttribute { object: String, attribute: String },
    #[error("object `{object}` has no value for `{attribute}` at or before {at}")]
    NoValue {
        object: String,
        attribute: String,
        at: String,
    },
    #[error("timestamp `{0}` is not on the timeline")]
    UnknownTimestamp(String),
}

/// An integrity-checked object-centric log. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirigoLog {
    timeline: Vec<Timestamp>,
    rank: HashMap<Timestamp, usize>,
    events: Vec<EventRecord>,
    objects: Vec<ObjectInstance>,
    e2o: Vec<E2ORecord>,
    o2o: Vec<O2ORecord>,
    event_index: HashMap<String, usize>,
    object_index: HashMap<String, usize>,
}

impl Default for DirigoLog {
    fn default() -> Self {
        DirigoLog::build(vec![], vec![], vec![], vec![], vec![]).expect("empty log is valid")
    }
}

impl DirigoLog {
    /// Validates the records and assembles a log.
    ///
    /// Absolute timelines are sorted chronologically; symbolic timelines keep
    /// the given order. Events are sorted by `(timeline position, event_id)`,
    /// histories by timeline position, e2o rows by their event's position and
    /// o2o rows by `(position, source, target, qualifier)`.
    pub fn build(
        timeline: Vec<Timestamp>,
        events: Vec<EventRecord>,
        objects: Vec<ObjectInstance>,
        e2o: Vec<E2ORecord>,
        o2o: Vec<O2ORecord>,
    ) -> Result<Self, ModelError> {
        let mut timeline = timeline;
        if let Some(first) = timeline.first() {
            let kind = first.kind();
            if timeline.iter().any(|t| t.kind() != kind) {
                return Err(ModelError::MixedTimestampKinds);
            }
            if kind == TimestampKind::Absolute {
                timeline.sort_by_key(|t| t.instant());
            }
        }
        let mut rank = HashMap::with_capacity(timeline.len());
        for (i, t) in timeline.iter().enumerate() {
            if rank.insert(t.clone(), i).is_some() {
                return Err(ModelError::DuplicateTimestamp(t.to_string()));
            }
        }
        let check_ts = |t: &Timestamp| -> Result<usize, ModelError> {
            rank.get(t)
                .copied()
                .ok_or_else(|| ModelError::UnknownTimestamp(t.to_string()))
        };

        let mut seen = HashSet::new();
        for ev in &events {
            if !seen.insert(ev.event_id.as_str()) {
                return Err(ModelError::DuplicateId(ev.event_id.clone()));
            }
            if ev.activity.trim().is_empty() {
                return Err(ModelError::EmptyActivity(ev.event_id.clone()));
            }
            check_ts(&ev.timestamp)?;
        }
        let mut seen_objects = HashSet::new();
        let mut objects = objects;
        for obj in &mut objects {
            obj.dynamic_history.retain(|_, h| !h.is_empty());
            if seen.contains(obj.object_id.as_str()) || !seen_objects.insert(obj.object_id.clone())
            {
                return Err(ModelError::DuplicateId(obj.object_id.clone()));
            }
            for (name, sv) in &obj.static_attributes {
                check_ts(&sv.recorded_at)?;
                if sv.value.is_empty() {
                    return Err(ModelError::EmptyStaticValue {
                        object: obj.object_id.clone(),
                        attribute: name.clone(),
                    });
                }
                if obj.dynamic_history.contains_key(name) {
                    return Err(ModelError::AttributeKindConflict {
                        object: obj.object_id.clone(),
                        attribute: name.clone(),
                    });
                }
            }
            for (name, history) in &mut obj.dynamic_history {
                for change in history.iter() {
                    check_ts(&change.timestamp)?;
                }
                history.sort_by_key(|c| rank[&c.timestamp]);
                if let Some(w) = history
                    .windows(2)
                    .find(|w| w[0].timestamp == w[1].timestamp)
                {
                    return Err(ModelError::DuplicateChange {
                        object: obj.object_id.clone(),
                        attribute: name.clone(),
                        timestamp: w[0].timestamp.to_string(),
                    });
                }
            }
        }
        objects.sort_by(|a, b| a.object_id.cmp(&b.object_id));

        let mut events = events;
        events.sort_by(|a, b| {
            rank[&a.timestamp]
                .cmp(&rank[&b.timestamp])
                .then_with(|| a.event_id.cmp(&b.event_id))
        });
        let event_index: HashMap<String, usize> = events
            .iter()
            .enumerate()
            .map(|(i, e)| (e.event_id.clone(), i))
            .collect();
        let object_index: HashMap<String, usize> = objects
            .iter()
            .enumerate()
            .map(|(i, o)| (o.object_id.clone(), i))
            .collect();

        let mut e2o_seen = HashSet::new();
        for row in &e2o {
            if !event_index.contains_key(&row.event_id) {
                return Err(ModelError::DanglingReference {
                    context: "e2o event",
                    id: row.event_id.clone(),
                });
            }
            if !object_index.contains_key(&row.object_id) {
                return Err(ModelError::DanglingReference {
                    context: "e2o object",
                    id: row.object_id.clone(),
                });
            }
            if row.qualifier.trim().is_empty() {
                return Err(ModelError::EmptyQualifier(format!(
                    "e2o {}/{}",
                    row.event_id, row.object_id
                )));
            }
            if !e2o_seen.insert(row) {
                return Err(ModelError::DuplicateE2O(format!(
                    "{}, {}, {}",
                    row.event_id, row.object_id, row.qualifier
                )));
            }
        }
        let mut o2o_seen = HashSet::new();
        for row in &o2o {
            for id in [&row.source_object_id, &row.target_object_id] {
                if !object_index.contains_key(id) {
                    return Err(ModelError::DanglingReference {
                        context: "o2o object",
                        id: id.clone(),
                    });
                }
            }
            check_ts(&row.timestamp)?;
            if row.qualifier.trim().is_empty() {
                return Err(ModelError::EmptyQualifier(format!(
                    "o2o {}/{}",
                    row.source_object_id, row.target_object_id
                )));
            }
            if !o2o_seen.insert(row) {
                return Err(ModelError::DuplicateO2O(format!(
                    "{}, {}, {}, {}",
                    row.source_object_id, row.target_object_id, row.timestamp, row.qualifier
                )));
            }
        }
        drop(e2o_seen);
        drop(o2o_seen);

        let mut e2o = e2o;
        e2o.sort_by_key(|r| event_index[&r.event_id]);
        let mut o2o = o2o;
        o2o.sort_by(|a, b| {
            rank[&a.timestamp]
                .cmp(&rank[&b.timestamp])
                .then_with(|| a.source_object_id.cmp(&b.source_object_id))
                .then_with(|| a.target_object_id.cmp(&b.target_object_id))
                .then_with(|| a.qualifier.cmp(&b.qualifier))
        });

        Ok(DirigoLog {
            timeline,
            rank,
            events,
            objects,
            e2o,
            o2o,
            event_index,
            object_index,
        })
    }

    pub fn timeline(&self) -> &[Timestamp] {
        &self.timeline
    }

    pub fn events(&self) -> &[EventRecord] {
        &self.events
    }

    pub fn objects(&self) -> &[ObjectInstance] {
        &self.objects
    }

    pub fn e2o(&self) -> &[E2ORecord] {
        &self.e2o
    }

    pub fn o2o(&self) -> &[O2ORecord] {
        &self.o2o
    }

    pub fn is_empty(&self) -> bool {
        self.timeline.is_empty()
            && self.events.is_empty()
            && self.objects.is_empty()
            && self.e2o.is_empty()
            && self.o2o.is_empty()
    }

    /// Position of `t` on the timeline.
    pub fn rank(&self, t: &Timestamp) -> Option<usize> {
        self.rank.get(t).copied()
    }

    /// Total order over timestamps on this log's timeline.
    ///
    /// Panics if either timestamp is not on the timeline; every timestamp
    /// held by a built log is.
    pub fn compare(&self, a: &Timestamp, b: &Timestamp) -> Ordering {
        self.rank[a].cmp(&self.rank[b])
    }

    pub fn event(&self, event_id: &str) -> Option<&EventRecord> {
        self.event_index.get(event_id).map(|&i| &self.events[i])
    }

    pub fn object(&self, object_id: &str) -> Option<&ObjectInstance> {
        self.object_index.get(object_id).map(|&i| &self.objects[i])
    }

    fn require_object(&self, object_id: &str) -> Result<&ObjectInstance, LookupError> {
        self.object(object_id)
            .ok_or_else(|| LookupError::UnknownObject(object_id.to_owned()))
    }

    /// Value of `attribute` on `object_id` as of `t`.
    pub fn attribute_at(
        &self,
        object_id: &str,
        attribute: &str,
        t: &Timestamp,
    ) -> Result<&str, LookupError> {
        let obj = self.require_object(object_id)?;
        let at = self
            .rank(t)
            .ok_or_else(|| LookupError::UnknownTimestamp(t.to_string()))?;
        let no_value = || LookupError::NoValue {
            object: object_id.to_owned(),
            attribute: attribute.to_owned(),
            at: t.to_string(),
        };
        if let Some(sv) = obj.static_attributes.get(attribute) {
            return if self.rank[&sv.recorded_at] <= at {
                Ok(&sv.value)
            } else {
                Err(no_value())
            };
        }
        let history =
            obj.dynamic_history
                .get(attribute)
                .ok_or_else(|| LookupError::UnknownAttribute {
                    object: object_id.to_owned(),
                    attribute: attribute.to_owned(),
                })?;
        // histories are sorted by rank, so the last entry at or before `at` wins
        let idx = history.partition_point(|c| self.rank[&c.timestamp] <= at);
        if idx == 0 {
            Err(no_value())
        } else {
            Ok(&history[idx - 1].value)
        }
    }

    /// Full chronological change list; a static attribute yields one entry.
    pub fn attribute_history(
        &self,
        object_id: &str,
        attribute: &str,
    ) -> Result<Vec<Change>, LookupError> {
        let obj = self.require_object(object_id)?;
        if let Some(sv) = obj.static_attributes.get(attribute) {
            return Ok(vec![Change {
                timestamp: sv.recorded_at.clone(),
                value: sv.value.clone(),
            }]);
        }
        obj.dynamic_history
            .get(attribute)
            .cloned()
            .ok_or_else(|| LookupError::UnknownAttribute {
                object: object_id.to_owned(),
                attribute: attribute.to_owned(),
            })
    }

    pub fn objects_for_event(&self, event_id: &str) -> Result<Vec<(&str, &str)>, LookupError> {
        if !self.event_index.contains_key(event_id) {
            return Err(LookupError::UnknownEvent(event_id.to_owned()));
        }
        Ok(self
            .e2o
            .iter()
            .filter(|r| r.event_id == event_id)
            .map(|r| (r.object_id.as_str(), r.qualifier.as_str()))
            .collect())
    }

    pub fn events_for_object(&self, object_id: &str) -> Result<Vec<(&str, &str)>, LookupError> {
        self.require_object(object_id)?;
        Ok(self
            .e2o
            .iter()
            .filter(|r| r.object_id == object_id)
            .map(|r| (r.event_id.as_str(), r.qualifier.as_str()))
            .collect())
    }

    /// O2O rows where the object is source or target, in timeline order.
    pub fn o2o_history(&self, object_id: &str) -> Result<Vec<&O2ORecord>, LookupError> {
        self.require_object(object_id)?;
        Ok(self.o2o.iter().filter(|r| r.involves(object_id)).collect())
    }

    /// Events at exactly `t`, in log order.
    pub fn events_at<'a>(&'a self, t: &'a Timestamp) -> impl Iterator<Item = &'a EventRecord> + 'a {
        self.events.iter().filter(move |e| &e.timestamp == t)
    }

    pub fn event_involves(&self, event_id: &str, object_id: &str) -> bool {
        self.e2o
            .iter()
            .any(|r| r.event_id == event_id && r.object_id == object_id)
    }

    /// Decomposes the log back into its record lists.
    pub fn into_parts(self) -> LogParts {
        (self.timeline, self.events, self.objects, self.e2o, self.o2o)
    }
}

/// Record lists of a log, in the order taken by [`DirigoLog::build`].
pub type LogParts = (
    Vec<Timestamp>,
    Vec<EventRecord>,
    Vec<ObjectInstance>,
    Vec<E2ORecord>,
    Vec<O2ORecord>,
);
