//! Conversion from Dirigo logs to the ACEL, DOCEL and XOC documents, and
//! from ACEL back to Dirigo.
//!
//! Every forward conversion returns the converted document together with a
//! [`LossReport`] listing each fact of the source log that the target
//! document cannot carry.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::domain::DomainSpec;
use crate::formats::acel::{
    AcelDocument, AcelEvent, AcelObject, AcelObjectChange, AcelObjectRef, AcelRelation,
    AcelRelationChange, ChangeStatus,
};
use crate::formats::docel::{DocelAttributeRow, DocelBundle, DocelEvent, DocelObject};
use crate::formats::xoc::{XocDocument, XocEvent, XocObjectModel, XocRelation};
use crate::formats::Format;
use crate::model::{
    Change, DirigoLog, E2ORecord, EventRecord, ModelError, O2ORecord, ObjectInstance, Timestamp,
};
use crate::quality::Representation;

/// Timestamp used for static values when a document has no events.
pub const FALLBACK_ANCHOR: &str = "t0";

/// ACEL cardinality text written for generated relations.
pub const DEFAULT_CARDINALITY: &str = "0..*";

/// Which O2O qualifiers end a relation opened by another qualifier.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct O2oPairing {
    /// closing qualifier -> opening qualifier
    closes: BTreeMap<String, String>,
}

impl O2oPairing {
    pub fn new<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let mut closes = BTreeMap::new();
        for (open, close) in pairs {
            closes.entry(close.into()).or_insert_with(|| open.into());
        }
        O2oPairing { closes }
    }

    pub fn from_spec(spec: &DomainSpec) -> Self {
        O2oPairing::new(spec.closing_pairs())
    }

    /// The opening qualifier this closing qualifier ends, if any.
    pub fn opened_by(&self, qualifier: &str) -> Option<&str> {
        self.closes.get(qualifier).map(String::as_str)
    }
}

/// A single datum of a Dirigo log.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Fact {
    EventActivity {
        event_id: String,
        activity: String,
    },
    EventTimestamp {
        event_id: String,
        timestamp: String,
    },
    EventResource {
        event_id: String,
        resource: String,
    },
    ObjectType {
        object_id: String,
        object_type: String,
    },
    StaticAttr {
        object_id: String,
        attribute: String,
        value: String,
        recorded_at: String,
    },
    DynamicChange {
        object_id: String,
        attribute: String,
        timestamp: String,
        value: String,
    },
    E2O {
        event_id: String,
        object_id: String,
        qualifier: String,
    },
    O2O {
        source: String,
        target: String,
        timestamp: String,
        qualifier: String,
    },
}

impl Fact {
    pub fn kind(&self) -> &'static str {
        match self {
            Fact::EventActivity { .. } => "event_activity",
            Fact::EventTimestamp { .. } => "event_timestamp",
            Fact::EventResource { .. } => "event_resource",
            Fact::ObjectType { .. } => "object_type",
            Fact::StaticAttr { .. } => "static_attr",
            Fact::DynamicChange { .. } => "dynamic_change",
            Fact::E2O { .. } => "e2o",
            Fact::O2O { .. } => "o2o",
        }
    }

    fn ids(&self) -> String {
        match self {
            Fact::EventActivity { event_id, activity } => format!("{event_id} {activity}"),
            Fact::EventTimestamp { event_id, .. } => event_id.clone(),
            Fact::EventResource { event_id, resource } => format!("{event_id} {resource}"),
            Fact::ObjectType {
                object_id,
                object_type,
            } => format!("{object_id} {object_type}"),
            Fact::StaticAttr {
                object_id,
                attribute,
                value,
                ..
            }
            | Fact::DynamicChange {
                object_id,
                attribute,
                value,
                ..
            } => format!("{object_id}.{attribute}={value}"),
            Fact::E2O {
                event_id,
                object_id,
                qualifier,
            } => format!("{event_id} {object_id} ({qualifier})"),
            Fact::O2O {
                source,
                target,
                qualifier,
                ..
            } => format!("{source} -> {target} ({qualifier})"),
        }
    }

    fn timestamp(&self) -> &str {
        match self {
            Fact::EventTimestamp { timestamp, .. }
            | Fact::DynamicChange { timestamp, .. }
            | Fact::O2O { timestamp, .. } => timestamp,
            Fact::StaticAttr { recorded_at, .. } => recorded_at,
            _ => "",
        }
    }
}

/// Every fact of a log, in a stable order.
pub fn log_facts(log: &DirigoLog) -> Vec<Fact> {
    let mut facts = Vec::new();
    for e in log.events() {
        facts.extend(event_facts(e));
    }
    for o in log.objects() {
        facts.push(Fact::ObjectType {
            object_id: o.object_id.clone(),
            object_type: o.object_type.clone(),
        });
        facts.extend(static_facts(o));
        facts.extend(change_facts(o));
    }
    facts.extend(log.e2o().iter().map(e2o_fact));
    facts.extend(log.o2o().iter().map(o2o_fact));
    facts
}

fn event_facts(e: &EventRecord) -> Vec<Fact> {
    let mut out = vec![
        Fact::EventActivity {
            event_id: e.event_id.clone(),
            activity: e.activity.clone(),
        },
        Fact::EventTimestamp {
            event_id: e.event_id.clone(),
            timestamp: e.timestamp.to_string(),
        },
    ];
    if let Some(r) = &e.resource {
        out.push(Fact::EventResource {
            event_id: e.event_id.clone(),
            resource: r.clone(),
        });
    }
    out
}

fn static_facts(o: &ObjectInstance) -> impl Iterator<Item = Fact> + '_ {
    o.static_attributes.iter().map(|(a, sv)| Fact::StaticAttr {
        object_id: o.object_id.clone(),
        attribute: a.clone(),
        value: sv.value.clone(),
        recorded_at: sv.recorded_at.to_string(),
    })
}

fn change_facts(o: &ObjectInstance) -> impl Iterator<Item = Fact> + '_ {
    o.dynamic_history.iter().flat_map(move |(a, h)| {
        h.iter()
            .map(move |c| change_fact(&o.object_id, a, &c.timestamp, &c.value))
    })
}

fn change_fact(object_id: &str, attribute: &str, t: &Timestamp, value: &str) -> Fact {
    Fact::DynamicChange {
        object_id: object_id.to_owned(),
        attribute: attribute.to_owned(),
        timestamp: t.to_string(),
        value: value.to_owned(),
    }
}

fn e2o_fact(r: &E2ORecord) -> Fact {
    Fact::E2O {
        event_id: r.event_id.clone(),
        object_id: r.object_id.clone(),
        qualifier: r.qualifier.clone(),
    }
}

fn o2o_fact(r: &O2ORecord) -> Fact {
    Fact::O2O {
        source: r.source_object_id.clone(),
        target: r.target_object_id.clone(),
        timestamp: r.timestamp.to_string(),
        qualifier: r.qualifier.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LossItem {
    pub fact: Fact,
    pub reason: String,
}

/// Facts dropped by a conversion.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LossReport {
    pub items: Vec<LossItem>,
}

impl LossReport {
    fn push(&mut self, fact: Fact, reason: impl Into<String>) {
        self.items.push(LossItem {
            fact,
            reason: reason.into(),
        });
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn facts(&self) -> HashSet<&Fact> {
        self.items.iter().map(|i| &i.fact).collect()
    }

    pub fn count(&self, kind: &str) -> usize {
        self.items.iter().filter(|i| i.fact.kind() == kind).count()
    }
}

/// One tab-separated line per dropped fact: kind, ids, timestamp, reason.
impl fmt::Display for LossReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            writeln!(
                f,
                "{}\t{}\t{}\t{}",
                item.fact.kind(),
                item.fact.ids(),
                item.fact.timestamp(),
                item.reason
            )?;
        }
        Ok(())
    }
}

/// A converted document and what was lost on the way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conversion<T> {
    pub output: T,
    pub loss: LossReport,
}

const ORPHAN: &str = "no co-timestamped event involves the object";

/// The timestamp static values are assumed to be recorded at once the
/// original recording time is gone.
fn anchor(log: &DirigoLog) -> String {
    log.events()
        .first()
        .map_or_else(|| FALLBACK_ANCHOR.to_owned(), |e| e.timestamp.to_string())
}

/// First event at `t` (in log order) that is linked to one of `objects`.
fn host_event<'a>(log: &'a DirigoLog, t: &Timestamp, objects: &[&str]) -> Option<&'a EventRecord> {
    log.events()
        .iter()
        .find(|e| &e.timestamp == t && objects.iter().any(|o| log.event_involves(&e.event_id, o)))
}

fn report_unanchored_statics(log: &DirigoLog, loss: &mut LossReport, format: &str) {
    let anchor = anchor(log);
    for o in log.objects() {
        for fact in static_facts(o) {
            if fact.timestamp() != anchor {
                loss.push(
                    fact,
                    format!("{format} does not record when static values are set"),
                );
            }
        }
    }
}

pub fn dirigo_to_acel(log: &DirigoLog, pairing: &O2oPairing) -> Conversion<AcelDocument> {
    let mut loss = LossReport::default();
    let mut events: Vec<AcelEvent> = log
        .events()
        .iter()
        .map(|e| AcelEvent {
            event_id: e.event_id.clone(),
            activity: e.activity.clone(),
            timestamp: e.timestamp.to_string(),
            resource: e.resource.clone(),
            objects: log
                .objects_for_event(&e.event_id)
                .unwrap_or_default()
                .into_iter()
                .map(|(o, q)| AcelObjectRef {
                    object_id: o.to_owned(),
                    qualifier: Some(q.to_owned()),
                })
                .collect(),
            object_changes: Vec::new(),
            relation_changes: Vec::new(),
        })
        .collect();
    let position: HashMap<&str, usize> = log
        .events()
        .iter()
        .enumerate()
        .map(|(i, e)| (e.event_id.as_str(), i))
        .collect();

    report_unanchored_statics(log, &mut loss, "ACEL");
    let objects = log
        .objects()
        .iter()
        .map(|o| AcelObject {
            object_id: o.object_id.clone(),
            object_type: o.object_type.clone(),
            attributes: o
                .static_attributes
                .iter()
                .map(|(a, sv)| (a.clone(), sv.value.clone()))
                .collect(),
        })
        .collect();

    for o in log.objects() {
        for (attr, history) in &o.dynamic_history {
            for c in history {
                match host_event(log, &c.timestamp, &[&o.object_id]) {
                    Some(e) => events[position[e.event_id.as_str()]].object_changes.push(
                        AcelObjectChange {
                            object_id: o.object_id.clone(),
                            attribute: attr.clone(),
                            value: c.value.clone(),
                        },
                    ),
                    None => loss.push(
                        change_fact(&o.object_id, attr, &c.timestamp, &c.value),
                        ORPHAN,
                    ),
                }
            }
        }
    }

    let mut relations: Vec<AcelRelation> = Vec::new();
    let mut relation_index: HashMap<(String, String), usize> = HashMap::new();
    for r in log.o2o() {
        let closing = pairing.opened_by(&r.qualifier);
        let opening = closing.unwrap_or(&r.qualifier);
        let key = (r.source_object_id.clone(), opening.to_owned());
        let idx = *relation_index.entry(key).or_insert_with(|| {
            relations.push(AcelRelation {
                relation_id: format!("r{}", relations.len() + 1),
                source: r.source_object_id.clone(),
                qualifier: Some(opening.to_owned()),
                deleted_qualifier: None,
                cardinality: DEFAULT_CARDINALITY.to_owned(),
            });
            relations.len() - 1
        });
        if closing.is_some() {
            let rel = &mut relations[idx];
            match &rel.deleted_qualifier {
                None => rel.deleted_qualifier = Some(r.qualifier.clone()),
                Some(q) if *q == r.qualifier => {}
                Some(_) => {
                    loss.push(o2o_fact(r), "relation already closed by another qualifier");
                    continue;
                }
            }
        }
        let host = host_event(
            log,
            &r.timestamp,
            &[&r.source_object_id, &r.target_object_id],
        );
        match host {
            Some(e) => {
                events[position[e.event_id.as_str()]]
                    .relation_changes
                    .push(AcelRelationChange {
                        relation_id: relations[idx].relation_id.clone(),
                        change_status: if closing.is_some() {
                            ChangeStatus::DeletedTarget
                        } else {
                            ChangeStatus::AddedTarget
                        },
                        target: r.target_object_id.clone(),
                    })
            }
            None => loss.push(o2o_fact(r), ORPHAN),
        }
    }

    Conversion {
        output: AcelDocument {
            events,
            objects,
            relations,
        },
        loss,
    }
}

/// Lifts an ACEL document into a Dirigo log.
///
/// The timeline is the distinct event timestamps in document order. Static
/// values are taken as recorded at the first event's timestamp. Objects
/// referenced without a qualifier get their type name as qualifier.
pub fn acel_to_dirigo(doc: &AcelDocument) -> Result<DirigoLog, ModelError> {
    let mut timeline: Vec<Timestamp> = Vec::new();
    let mut seen = HashSet::new();
    for e in &doc.events {
        if seen.insert(e.timestamp.as_str()) {
            timeline.push(Timestamp::from(e.timestamp.as_str()));
        }
    }
    let anchor = timeline
        .first()
        .cloned()
        .unwrap_or_else(|| Timestamp::from(FALLBACK_ANCHOR));
    let needs_anchor = doc.objects.iter().any(|o| !o.attributes.is_empty());
    if timeline.is_empty() && needs_anchor {
        timeline.push(anchor.clone());
    }

    let mut objects: Vec<ObjectInstance> = Vec::with_capacity(doc.objects.len());
    let mut object_index: HashMap<&str, usize> = HashMap::new();
    for o in &doc.objects {
        let mut inst = ObjectInstance::new(&o.object_id, &o.object_type);
        for (a, v) in &o.attributes {
            inst = inst.with_static(a, v, anchor.clone());
        }
        object_index.insert(&o.object_id, objects.len());
        objects.push(inst);
    }

    let mut events = Vec::with_capacity(doc.events.len());
    let mut e2o = Vec::new();
    let mut o2o = Vec::new();
    for e in &doc.events {
        let t = Timestamp::from(e.timestamp.as_str());
        events.push(EventRecord::new(
            &e.event_id,
            &e.activity,
            t.clone(),
            e.resource.as_deref(),
        ));
        for r in &e.objects {
            let qualifier = match &r.qualifier {
                Some(q) => q.clone(),
                None => object_index
                    .get(r.object_id.as_str())
                    .map(|&i| objects[i].object_type.clone())
                    .unwrap_or_default(),
            };
            e2o.push(E2ORecord::new(&e.event_id, &r.object_id, qualifier));
        }
        for c in &e.object_changes {
            let &i = object_index.get(c.object_id.as_str()).ok_or_else(|| {
                ModelError::DanglingReference {
                    context: "ObjectChanges",
                    id: c.object_id.clone(),
                }
            })?;
            objects[i]
                .dynamic_history
                .entry(c.attribute.clone())
                .or_default()
                .push(Change {
                    timestamp: t.clone(),
                    value: c.value.clone(),
                });
        }
        for rc in &e.relation_changes {
            let rel =
                doc.relation(&rc.relation_id)
                    .ok_or_else(|| ModelError::DanglingReference {
                        context: "RelationChanges",
                        id: rc.relation_id.clone(),
                    })?;
            let qualifier = match rc.change_status {
                ChangeStatus::AddedTarget => rel.qualifier.clone(),
                ChangeStatus::DeletedTarget => rel
                    .deleted_qualifier
                    .clone()
                    .or_else(|| rel.qualifier.clone()),
            }
            .unwrap_or_else(|| rel.relation_id.clone());
            o2o.push(O2ORecord::new(
                &rel.source,
                &rc.target,
                t.clone(),
                qualifier,
            ));
        }
    }
    DirigoLog::build(timeline, events, objects, e2o, o2o)
}

pub fn dirigo_to_docel(log: &DirigoLog) -> Conversion<DocelBundle> {
    let mut loss = LossReport::default();
    let events = log
        .events()
        .iter()
        .map(|e| DocelEvent {
            event_id: e.event_id.clone(),
            activity: e.activity.clone(),
            timestamp: e.timestamp.to_string(),
            resource: e.resource.clone(),
            objects: log
                .objects_for_event(&e.event_id)
                .unwrap_or_default()
                .into_iter()
                .map(|(o, q)| (o.to_owned(), q.to_owned()))
                .collect(),
        })
        .collect();

    report_unanchored_statics(log, &mut loss, "DOCEL");
    let mut static_tables: BTreeMap<String, Vec<DocelObject>> = BTreeMap::new();
    let mut dynamic_tables: BTreeMap<(String, String), Vec<DocelAttributeRow>> = BTreeMap::new();
    for o in log.objects() {
        static_tables
            .entry(o.object_type.clone())
            .or_default()
            .push(DocelObject {
                object_id: o.object_id.clone(),
                attributes: o
                    .static_attributes
                    .iter()
                    .map(|(a, sv)| (a.clone(), sv.value.clone()))
                    .collect(),
            });
        for (attr, history) in &o.dynamic_history {
            for c in history {
                let Some(e) = host_event(log, &c.timestamp, &[&o.object_id]) else {
                    loss.push(
                        change_fact(&o.object_id, attr, &c.timestamp, &c.value),
                        ORPHAN,
                    );
                    continue;
                };
                let rows = dynamic_tables
                    .entry((o.object_type.clone(), attr.clone()))
                    .or_default();
                rows.push(DocelAttributeRow {
                    attribute_id: format!("{attr}{}", rows.len() + 1),
                    value: c.value.clone(),
                    event_id: e.event_id.clone(),
                    object_id: o.object_id.clone(),
                });
            }
        }
    }
    for r in log.o2o() {
        loss.push(o2o_fact(r), "DOCEL has no object-to-object relations");
    }
    Conversion {
        output: DocelBundle {
            events,
            static_tables,
            dynamic_tables,
        },
        loss,
    }
}

pub fn dirigo_to_xoc(log: &DirigoLog, pairing: &O2oPairing) -> Conversion<XocDocument> {
    let mut loss = LossReport::default();
    for e in log.events() {
        for fact in event_facts(e) {
            if !matches!(fact, Fact::EventActivity { .. }) {
                loss.push(fact, "XOC orders events by index only and has no resources");
            }
        }
    }
    for o in log.objects() {
        loss.push(
            Fact::ObjectType {
                object_id: o.object_id.clone(),
                object_type: o.object_type.clone(),
            },
            "XOC has no object information",
        );
        for fact in static_facts(o).chain(change_facts(o)) {
            loss.push(fact, "XOC has no object information");
        }
    }
    for r in log.e2o() {
        loss.push(e2o_fact(r), "XOC references carry no qualifier");
    }
    for r in log.o2o() {
        loss.push(o2o_fact(r), "XOC relations carry generic ids only");
    }

    // generic relation ids, one per object pair, in order of first appearance
    let mut pair_ids: HashMap<(&str, &str), String> = HashMap::new();
    for r in log.o2o() {
        let n = pair_ids.len() + 1;
        pair_ids
            .entry((&r.source_object_id, &r.target_object_id))
            .or_insert_with(|| format!("r{n}"));
    }

    let mut events = Vec::with_capacity(log.events().len());
    let mut seen_objects: Vec<String> = Vec::new();
    let mut seen_set: HashSet<String> = HashSet::new();
    // (source, target, opening qualifier) -> number of open relations
    let mut active: BTreeMap<(&str, &str, &str), usize> = BTreeMap::new();
    let mut next_o2o = 0;
    let mut remember = |id: &str, seen: &mut Vec<String>| {
        if seen_set.insert(id.to_owned()) {
            seen.push(id.to_owned());
        }
    };
    for (i, e) in log.events().iter().enumerate() {
        let rank = log.rank(&e.timestamp);
        while next_o2o < log.o2o().len() && log.rank(&log.o2o()[next_o2o].timestamp) <= rank {
            let r = &log.o2o()[next_o2o];
            next_o2o += 1;
            let (s, t) = (r.source_object_id.as_str(), r.target_object_id.as_str());
            match pairing.opened_by(&r.qualifier) {
                Some(open) => {
                    if let Some(n) = active.get_mut(&(s, t, open)) {
                        *n -= 1;
                        if *n == 0 {
                            active.remove(&(s, t, open));
                        }
                    }
                }
                None => *active.entry((s, t, r.qualifier.as_str())).or_default() += 1,
            }
        }
        let references: Vec<String> = log
            .objects_for_event(&e.event_id)
            .unwrap_or_default()
            .into_iter()
            .map(|(o, _)| o.to_owned())
            .collect();
        for o in &references {
            remember(o, &mut seen_objects);
        }
        let mut relations: Vec<XocRelation> = Vec::new();
        let mut emitted = HashSet::new();
        for &(s, t, _) in active.keys() {
            if emitted.insert((s, t)) {
                remember(s, &mut seen_objects);
                remember(t, &mut seen_objects);
                relations.push(XocRelation {
                    relation_id: pair_ids[&(s, t)].clone(),
                    source_id: s.to_owned(),
                    target_id: t.to_owned(),
                });
            }
        }
        relations.sort_by(|a, b| {
            let num = |r: &XocRelation| r.relation_id[1..].parse::<usize>().unwrap_or(0);
            num(a).cmp(&num(b))
        });
        events.push(XocEvent {
            index: i + 1,
            event_type: e.activity.clone(),
            references,
            object_model: XocObjectModel {
                objects: seen_objects.clone(),
                relations,
            },
        });
    }
    Conversion {
        output: XocDocument { events },
        loss,
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConvertError {
    #[error("conversion from {from} to {to} is not supported")]
    Unsupported { from: Format, to: Format },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Converts between any two representations the crate can bridge.
///
/// Same-format conversions are identity copies. Dirigo converts to every
/// format and ACEL goes through its Dirigo lift. DOCEL and XOC cannot be
/// converted to another format.
pub fn convert_representation(
    source: Representation,
    to: Format,
    pairing: &O2oPairing,
) -> Result<Conversion<Representation>, ConvertError> {
    let from = source.format();
    if from == to {
        return Ok(Conversion {
            output: source,
            loss: LossReport::default(),
        });
    }
    let log = match source {
        Representation::Dirigo(log) => log,
        Representation::Acel(doc) => acel_to_dirigo(&doc)?,
        Representation::Docel(_) | Representation::Xoc(_) => {
            return Err(ConvertError::Unsupported { from, to })
        }
    };
    Ok(match to {
        Format::Dirigo => Conversion {
            output: Representation::Dirigo(log),
            loss: LossReport::default(),
        },
        Format::Acel => {
            let c = dirigo_to_acel(&log, pairing);
            Conversion {
                output: Representation::Acel(c.output),
                loss: c.loss,
            }
        }
        Format::Docel => {
            let c = dirigo_to_docel(&log);
            Conversion {
                output: Representation::Docel(c.output),
                loss: c.loss,
            }
        }
        Format::Xoc => {
            let c = dirigo_to_xoc(&log, pairing);
            Conversion {
                output: Representation::Xoc(c.output),
                loss: c.loss,
            }
        }
    })
}
