//! Seeded generator of cargo pickup logs, a replay checker for the pickup
//! lifecycle, and the pinned golden log.
//!
//! Each pickup plan produces:
//!
//! ```text
//! Lodge pickup plan -> Assign trucks -> per truck:
//!   Weigh the empty truck -> Load cargo -> Weigh the loaded truck
//!   -> Issue weighing ticket -> Issue tally sheet -> Evaluate the truck exit
//! ```
//!
//! Timestamps are symbolic. `t0` holds the initial object state and every
//! event gets the next `t<n>`. Weights are kept in hundredths and printed
//! with two decimals.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{DomainSpec, SpecError};
use crate::model::{
    DirigoLog, E2ORecord, EventRecord, ModelError, O2ORecord, ObjectInstance, Timestamp,
};

pub const CARGO_PICKUP_SPEC: &str = include_str!("../fixtures/cargo_pickup.toml");

pub const LODGE: &str = "Lodge pickup plan";
pub const ASSIGN: &str = "Assign trucks";
pub const WEIGH_EMPTY: &str = "Weigh the empty truck";
pub const LOAD: &str = "Load cargo";
pub const WEIGH_LOADED: &str = "Weigh the loaded truck";
pub const ISSUE_TICKET: &str = "Issue weighing ticket";
pub const ISSUE_TALLY: &str = "Issue tally sheet";
pub const EXIT: &str = "Evaluate the truck exit";

pub const TRUCK: &str = "Truck";
pub const CARGO: &str = "Cargo";
pub const PLAN: &str = "PickupPlan";
pub const SILO: &str = "Silo";

pub const TRUCK_STATUS: &str = "TruckStatus";
pub const TRUCK_WEIGHT: &str = "TruckWeight";
pub const SCHEDULED_WEIGHT: &str = "ScheduledPickupWeight";
pub const STOCK_WEIGHT: &str = "StockWeight";
pub const AVAILABLE: &str = "Available";
pub const OCCUPIED: &str = "Occupied";

pub const LODGED_FOR: &str = "Lodged Pickup Plan for Cargo";
pub const ASSIGNED_TO: &str = "Assigned Truck for Pickup Plan";
pub const DROPPED_FROM: &str = "Dropped Truck from Pickup Plan";

/// The cargo pickup domain spec shipped with the crate.
pub fn canonical_spec() -> DomainSpec {
    DomainSpec::parse(CARGO_PICKUP_SPEC).expect("bundled spec is valid")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("a plan may need {needed} trucks but the pool has {pool}")]
    InsufficientTrucks { needed: usize, pool: usize },
    #[error("spec does not match the cargo pickup process: {0}")]
    SpecMismatch(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no cargo has stock left for plan {plan}")]
    StockExhausted { plan: String },
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountRange {
    pub min: usize,
    pub max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightRange {
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CargoEntry {
    pub cargo_type: String,
    pub initial_stock: f64,
    pub silo: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub seed: u64,
    pub num_plans: usize,
    pub trucks_per_plan: CountRange,
    pub truck_pool_size: usize,
    /// Chance that a truck of the previous plan is picked again first.
    pub reassignment_probability: f64,
    #[serde(default = "default_resources")]
    pub resources_per_role: usize,
    pub empty_weight: WeightRange,
    pub pick_weight: WeightRange,
    pub cargo_catalogue: Vec<CargoEntry>,
}

fn default_resources() -> usize {
    3
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            seed: 1,
            num_plans: 3,
            trucks_per_plan: CountRange { min: 1, max: 3 },
            truck_pool_size: 4,
            reassignment_probability: 0.5,
            resources_per_role: default_resources(),
            empty_weight: WeightRange {
                min: 10.0,
                max: 15.0,
            },
            pick_weight: WeightRange { min: 2.0, max: 5.0 },
            cargo_catalogue: vec![
                CargoEntry {
                    cargo_type: "Rice".into(),
                    initial_stock: 200.0,
                    silo: "Sid1".into(),
                },
                CargoEntry {
                    cargo_type: "Wheat".into(),
                    initial_stock: 150.0,
                    silo: "Sid2".into(),
                },
            ],
        }
    }
}

impl SimConfig {
    pub fn from_toml(text: &str) -> Result<Self, SimError> {
        let cfg: SimConfig =
            toml::from_str(text).map_err(|e| SimError::InvalidConfig(e.message().to_owned()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::InvalidConfig(m.to_owned()));
        if !(0.0..=1.0).contains(&self.reassignment_probability) {
            return bad("reassignment_probability must lie in [0, 1]");
        }
        if self.trucks_per_plan.min > self.trucks_per_plan.max {
            return bad("trucks_per_plan.min exceeds max");
        }
        if self.num_plans > 0 {
            if self.trucks_per_plan.min == 0 {
                return bad("a plan needs at least one truck");
            }
            if self.cargo_catalogue.is_empty() {
                return bad("cargo_catalogue is empty");
            }
            if self.resources_per_role == 0 {
                return bad("resources_per_role must be positive");
            }
        }
        for (name, r) in [
            ("empty_weight", self.empty_weight),
            ("pick_weight", self.pick_weight),
        ] {
            if !(r.min.is_finite() && r.max.is_finite() && r.min > 0.0 && r.min <= r.max) {
                return Err(SimError::InvalidConfig(format!(
                    "{name} must be a positive range"
                )));
            }
        }
        for c in &self.cargo_catalogue {
            if !(c.initial_stock.is_finite() && c.initial_stock > 0.0) {
                return Err(SimError::InvalidConfig(format!(
                    "initial stock of {} must be positive",
                    c.cargo_type
                )));
            }
            if c.cargo_type.is_empty() || c.silo.is_empty() {
                return bad("cargo entries need a type and a silo");
            }
        }
        if self.num_plans > 0 && self.trucks_per_plan.max > self.truck_pool_size {
            return Err(SimError::InsufficientTrucks {
                needed: self.trucks_per_plan.max,
                pool: self.truck_pool_size,
            });
        }
        Ok(())
    }
}

fn hundredths(x: f64) -> i64 {
    (x * 100.0).round() as i64
}

pub fn format_weight(h: i64) -> String {
    format!("{}.{:02}", h / 100, h % 100)
}

fn parse_weight(s: &str) -> Option<i64> {
    s.trim().parse::<f64>().ok().map(hundredths)
}

/// Resource id prefix: the initials of the role name, e.g. `WS`.
pub fn role_prefix(role: &str) -> String {
    role.split_whitespace()
        .filter_map(|w| w.chars().next())
        .flat_map(char::to_uppercase)
        .collect()
}

fn check_spec(spec: &DomainSpec) -> Result<(), SimError> {
    let mismatch = |m: String| Err(SimError::SpecMismatch(m));
    for a in [
        LODGE,
        ASSIGN,
        WEIGH_EMPTY,
        LOAD,
        WEIGH_LOADED,
        ISSUE_TICKET,
        ISSUE_TALLY,
        EXIT,
    ] {
        if spec.activity(a).is_none() {
            return mismatch(format!("missing activity `{a}`"));
        }
    }
    for (ty, attrs) in [
        (TRUCK, &[TRUCK_STATUS, TRUCK_WEIGHT, SCHEDULED_WEIGHT][..]),
        (CARGO, &[STOCK_WEIGHT][..]),
        (PLAN, &[][..]),
        (SILO, &[][..]),
    ] {
        let Some(def) = spec.object_type(ty) else {
            return mismatch(format!("missing object type `{ty}`"));
        };
        for a in attrs {
            if def.attribute(a).is_none() {
                return mismatch(format!("missing attribute `{ty}.{a}`"));
            }
        }
    }
    for q in [LODGED_FOR, ASSIGNED_TO, DROPPED_FROM] {
        if !spec.o2o.iter().any(|r| r.qualifier == q) {
            return mismatch(format!("missing O2O qualifier `{q}`"));
        }
    }
    for (act, ty) in [
        (LODGE, PLAN),
        (LODGE, CARGO),
        (ASSIGN, PLAN),
        (ASSIGN, TRUCK),
        (WEIGH_EMPTY, TRUCK),
        (LOAD, TRUCK),
        (LOAD, CARGO),
        (WEIGH_LOADED, TRUCK),
        (ISSUE_TICKET, TRUCK),
        (ISSUE_TALLY, TRUCK),
        (EXIT, TRUCK),
        (EXIT, PLAN),
    ] {
        if qualifier_for(spec, act, ty).is_none() {
            return mismatch(format!("no E2O qualifier for `{act}` / `{ty}`"));
        }
    }
    Ok(())
}

fn qualifier_for<'a>(spec: &'a DomainSpec, activity: &str, ty: &str) -> Option<&'a str> {
    spec.e2o
        .iter()
        .find(|m| m.activity == activity && m.object_type == ty)
        .map(|m| m.qualifier.as_str())
}

/// Static attributes the spec declares for `ty` beyond the ones the
/// generator fills in itself.
fn optional_statics<'a>(spec: &'a DomainSpec, ty: &str, known: &[&str]) -> Vec<&'a str> {
    spec.object_type(ty)
        .map(|d| {
            d.attributes
                .iter()
                .filter(|a| a.dynamics == crate::domain::Dynamics::Static)
                .map(|a| a.name.as_str())
                .filter(|n| !known.contains(n))
                .collect()
        })
        .unwrap_or_default()
}

struct Builder<'s> {
    spec: &'s DomainSpec,
    rng: ChaCha8Rng,
    resources_per_role: usize,
    timeline: Vec<Timestamp>,
    events: Vec<EventRecord>,
    objects: BTreeMap<String, ObjectInstance>,
    e2o: Vec<E2ORecord>,
    o2o: Vec<O2ORecord>,
}

impl Builder<'_> {
    fn tick(&mut self) -> Timestamp {
        let t = Timestamp::new(format!("t{}", self.timeline.len()));
        self.timeline.push(t.clone());
        t
    }

    fn resource(&mut self, activity: &str) -> Option<String> {
        let role = self.spec.activity(activity)?.roles.first()?.clone();
        let n = self.rng.gen_range(1..=self.resources_per_role);
        Some(format!("{}{n:03}", role_prefix(&role)))
    }

    /// Records an event at a fresh timestamp linking `objects` of the given
    /// types with the spec's qualifiers.
    fn event(&mut self, activity: &str, objects: &[(&str, &str)]) -> Timestamp {
        let t = self.tick();
        let id = format!("e{}", self.events.len() + 1);
        let resource = self.resource(activity);
        self.events.push(EventRecord::new(
            &id,
            activity,
            t.clone(),
            resource.as_deref(),
        ));
        for (obj, ty) in objects {
            let q = qualifier_for(self.spec, activity, ty).expect("checked spec");
            self.e2o.push(E2ORecord::new(&id, *obj, q));
        }
        t
    }

    fn change(&mut self, obj: &str, attr: &str, t: &Timestamp, value: impl Into<String>) {
        let o = self.objects.get_mut(obj).expect("known object");
        o.dynamic_history
            .entry(attr.to_owned())
            .or_default()
            .push(crate::model::Change {
                timestamp: t.clone(),
                value: value.into(),
            });
    }

    fn set_static(&mut self, obj: &str, attr: &str, t: &Timestamp, value: impl Into<String>) {
        let o = self.objects.get_mut(obj).expect("known object");
        o.static_attributes.insert(
            attr.to_owned(),
            crate::model::StaticValue {
                value: value.into(),
                recorded_at: t.clone(),
            },
        );
    }

    fn add_object(&mut self, id: &str, ty: &str) {
        self.objects
            .insert(id.to_owned(), ObjectInstance::new(id, ty));
    }

    fn relate(&mut self, src: &str, tgt: &str, t: &Timestamp, q: &str) {
        self.o2o.push(O2ORecord::new(src, tgt, t.clone(), q));
    }
}

fn uniform(rng: &mut ChaCha8Rng, r: WeightRange) -> i64 {
    rng.gen_range(hundredths(r.min)..=hundredths(r.max))
}

fn license_plate(rng: &mut ChaCha8Rng) -> String {
    let digits: u32 = rng.gen_range(100..1000);
    let letters: String = (0..3).map(|_| rng.gen_range(b'A'..=b'Z') as char).collect();
    format!("{digits}{letters}")
}

/// Generates one log. Equal `(config, spec)` give equal logs.
pub fn simulate(config: &SimConfig, spec: &DomainSpec) -> Result<DirigoLog, SimError> {
    config.validate()?;
    if config.num_plans == 0 {
        return Ok(DirigoLog::default());
    }
    check_spec(spec)?;
    let mut b = Builder {
        spec,
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        resources_per_role: config.resources_per_role,
        timeline: Vec::new(),
        events: Vec::new(),
        objects: BTreeMap::new(),
        e2o: Vec::new(),
        o2o: Vec::new(),
    };
    let t0 = b.tick();

    let truck_extra = optional_statics(spec, TRUCK, &["AxleNo", "LicensePlateNr", "BelongsToPort"]);
    let mut plates = BTreeSet::new();
    let trucks: Vec<String> = (1..=config.truck_pool_size)
        .map(|i| format!("Tr{i}"))
        .collect();
    for tr in &trucks {
        b.add_object(tr, TRUCK);
        let axles = [2, 3, 4, 5, 6][b.rng.gen_range(0..5)];
        let mut plate = license_plate(&mut b.rng);
        while !plates.insert(plate.clone()) {
            plate = license_plate(&mut b.rng);
        }
        let own = b.rng.gen_bool(0.5);
        b.set_static(tr, "AxleNo", &t0, axles.to_string());
        b.set_static(tr, "LicensePlateNr", &t0, plate);
        b.set_static(tr, "BelongsToPort", &t0, own.to_string());
        for a in &truck_extra {
            b.set_static(tr, a, &t0, "unknown");
        }
        b.change(tr, TRUCK_STATUS, &t0, AVAILABLE);
    }

    let mut silos = BTreeSet::new();
    let mut stock: Vec<i64> = Vec::new();
    let cargos: Vec<String> = (1..=config.cargo_catalogue.len())
        .map(|i| format!("Cid{i}"))
        .collect();
    for (cid, entry) in cargos.iter().zip(&config.cargo_catalogue) {
        if silos.insert(entry.silo.clone()) {
            b.add_object(&entry.silo, SILO);
        }
        b.add_object(cid, CARGO);
        b.set_static(cid, "CargoType", &t0, &entry.cargo_type);
        b.set_static(cid, "Location", &t0, &entry.silo);
        let s = hundredths(entry.initial_stock);
        stock.push(s);
        b.change(cid, STOCK_WEIGHT, &t0, format_weight(s));
    }
    if cargos.iter().any(|c| silos.contains(c)) || trucks.iter().any(|t| silos.contains(t)) {
        return Err(SimError::InvalidConfig(
            "silo ids clash with object ids".into(),
        ));
    }

    let mut previous: Vec<String> = Vec::new();
    for p in 1..=config.num_plans {
        let plan = format!("Pcp{p}");
        let n = b
            .rng
            .gen_range(config.trucks_per_plan.min..=config.trucks_per_plan.max);

        // trucks of the previous plan go first with the configured chance
        let mut pool = trucks.clone();
        pool.shuffle(&mut b.rng);
        let mut preferred = Vec::new();
        for tr in &previous {
            if b.rng.gen_bool(config.reassignment_probability) {
                preferred.push(tr.clone());
            }
        }
        pool.retain(|t| !preferred.contains(t));
        preferred.extend(pool);
        let assigned: Vec<String> = preferred.into_iter().take(n).collect();

        let picks: Vec<i64> = (0..n)
            .map(|_| uniform(&mut b.rng, config.pick_weight))
            .collect();
        let total: i64 = picks.iter().sum();
        let candidates: Vec<usize> = (0..cargos.len()).filter(|&i| stock[i] >= total).collect();
        let Some(&ci) = candidates.get(b.rng.gen_range(0..candidates.len().max(1))) else {
            return Err(SimError::StockExhausted { plan });
        };
        let cid = cargos[ci].clone();

        b.add_object(&plan, PLAN);
        let t = b.event(LODGE, &[(&plan, PLAN), (&cid, CARGO)]);
        b.set_static(&plan, "TotalPickupWeight", &t, format_weight(total));
        for a in optional_statics(spec, PLAN, &["TotalPickupWeight"]) {
            b.set_static(&plan, a, &t, "unknown");
        }
        b.relate(&plan, &cid, &t, LODGED_FOR);

        let mut linked: Vec<(&str, &str)> = vec![(&plan, PLAN)];
        linked.extend(assigned.iter().map(|tr| (tr.as_str(), TRUCK)));
        let t = b.event(ASSIGN, &linked);
        for (tr, pick) in assigned.iter().zip(&picks) {
            b.change(tr, TRUCK_STATUS, &t, OCCUPIED);
            b.change(tr, SCHEDULED_WEIGHT, &t, format_weight(*pick));
            b.relate(tr, &plan, &t, ASSIGNED_TO);
        }

        for (tr, pick) in assigned.iter().zip(&picks) {
            let empty = uniform(&mut b.rng, config.empty_weight);
            let t = b.event(WEIGH_EMPTY, &[(tr, TRUCK)]);
            b.change(tr, TRUCK_WEIGHT, &t, format_weight(empty));
            let t = b.event(LOAD, &[(tr, TRUCK), (&cid, CARGO)]);
            stock[ci] -= pick;
            b.change(&cid, STOCK_WEIGHT, &t, format_weight(stock[ci]));
            let t = b.event(WEIGH_LOADED, &[(tr, TRUCK)]);
            b.change(tr, TRUCK_WEIGHT, &t, format_weight(empty + pick));
            b.event(ISSUE_TICKET, &[(tr, TRUCK)]);
            b.event(ISSUE_TALLY, &[(tr, TRUCK), (&cid, CARGO)]);
            let t = b.event(EXIT, &[(tr, TRUCK), (&plan, PLAN)]);
            b.change(tr, TRUCK_STATUS, &t, AVAILABLE);
            b.relate(tr, &plan, &t, DROPPED_FROM);
        }
        previous = assigned;
    }

    Ok(DirigoLog::build(
        b.timeline,
        b.events,
        b.objects.into_values().collect(),
        b.e2o,
        b.o2o,
    )?)
}

/// The pinned example log used by the query tests and the format fixtures.
///
/// Truck Tr1 (plate 841DKJ) is assigned to plan Pcp1 at t2, weighed empty
/// (12.6) at t4, loads rice from silo Sid1, leaves at t8 and is assigned to
/// Pcp3 at t9. Cargo Cid1's stock was 10.0 before any event and 6.1 after
/// the plan was lodged at t1.
pub fn golden_log() -> DirigoLog {
    let ts = |s: &str| Timestamp::from(s);
    let mut timeline = vec![ts("t_pre")];
    timeline.extend((0..=9).map(|i| ts(&format!("t{i}"))));
    let ev = |id: &str, act: &str, t: &str, r: &str| EventRecord::new(id, act, ts(t), Some(r));
    let events = vec![
        ev("e1", LODGE, "t1", "C001"),
        ev("e2", ASSIGN, "t2", "PP001"),
        ev("e3", LODGE, "t3", "C002"),
        ev("e4", WEIGH_EMPTY, "t4", "WS001"),
        ev("e5", LOAD, "t5", "WI001"),
        ev("e6", WEIGH_LOADED, "t6", "WS001"),
        ev("e7", ISSUE_TICKET, "t7", "WS001"),
        ev("e8", ISSUE_TALLY, "t7", "WI001"),
        ev("e9", EXIT, "t8", "SO001"),
        ev("e10", ASSIGN, "t9", "PP001"),
    ];
    let objects = vec![
        ObjectInstance::new("Tr1", TRUCK)
            .with_static("AxleNo", "4", "t0")
            .with_static("LicensePlateNr", "841DKJ", "t0")
            .with_static("BelongsToPort", "false", "t0")
            .with_change(TRUCK_STATUS, "t0", AVAILABLE)
            .with_change(TRUCK_STATUS, "t2", OCCUPIED)
            .with_change(TRUCK_STATUS, "t8", AVAILABLE)
            .with_change(TRUCK_STATUS, "t9", OCCUPIED)
            .with_change(SCHEDULED_WEIGHT, "t2", "3.9")
            .with_change(SCHEDULED_WEIGHT, "t9", "4.2")
            .with_change(TRUCK_WEIGHT, "t4", "12.6")
            .with_change(TRUCK_WEIGHT, "t6", "16.5"),
        ObjectInstance::new("Cid1", CARGO)
            .with_static("CargoType", "Rice", "t0")
            .with_static("Location", "Sid1", "t0")
            .with_change(STOCK_WEIGHT, "t_pre", "10.0")
            .with_change(STOCK_WEIGHT, "t1", "6.1"),
        ObjectInstance::new("Cid4", CARGO)
            .with_static("CargoType", "Wheat", "t0")
            .with_static("Location", "Sid2", "t0")
            .with_change(STOCK_WEIGHT, "t_pre", "8.0"),
        ObjectInstance::new("Pcp1", PLAN).with_static("TotalPickupWeight", "3.9", "t1"),
        ObjectInstance::new("Pcp3", PLAN).with_static("TotalPickupWeight", "4.2", "t3"),
        ObjectInstance::new("Sid1", SILO),
        ObjectInstance::new("Sid2", SILO),
    ];
    let e2o = [
        ("e1", "Pcp1", "Lodged pickup plan"),
        ("e1", "Cid1", "Cargo scheduled to be picked up"),
        ("e2", "Pcp1", "Trucks assigned to pickup plan"),
        ("e2", "Tr1", "Assigned truck for pickup"),
        ("e3", "Pcp3", "Lodged pickup plan"),
        ("e3", "Cid4", "Cargo scheduled to be picked up"),
        ("e4", "Tr1", "Weighed empty truck"),
        ("e5", "Tr1", "Truck scheduled for cargo loading"),
        ("e5", "Cid1", "Cargo loaded onto truck"),
        ("e6", "Tr1", "Weighed loaded truck"),
        ("e7", "Tr1", "Weighing ticket issued for truck"),
        ("e8", "Tr1", "Tally sheet issued for truck"),
        ("e8", "Cid1", "Cargo tallied"),
        ("e9", "Tr1", "Truck exit evaluated"),
        ("e9", "Pcp1", "Truck released from pickup plan"),
        ("e10", "Pcp3", "Trucks assigned to pickup plan"),
        ("e10", "Tr1", "Assigned truck for pickup"),
    ]
    .into_iter()
    .map(|(e, o, q)| E2ORecord::new(e, o, q))
    .collect();
    let o2o = [
        ("Pcp1", "Cid1", "t1", LODGED_FOR),
        ("Pcp3", "Cid4", "t3", LODGED_FOR),
        ("Tr1", "Pcp1", "t2", ASSIGNED_TO),
        ("Tr1", "Pcp1", "t8", DROPPED_FROM),
        ("Tr1", "Pcp3", "t9", ASSIGNED_TO),
    ]
    .into_iter()
    .map(|(s, t, at, q)| O2ORecord::new(s, t, ts(at), q))
    .collect();
    DirigoLog::build(timeline, events, objects, e2o, o2o).expect("golden log is valid")
}

// ---------------------------------------------------------------------------
// replay

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReplayViolation {
    /// A truck event out of lifecycle order.
    EventOrder {
        truck: String,
        event_id: String,
        expected: String,
    },
    /// Loaded weight not above the empty weight.
    WeightOrder {
        truck: String,
        event_id: String,
    },
    StockIncrease {
        cargo: String,
        at: String,
    },
    /// A stock decrease that matches no truck's picked amount.
    StockMismatch {
        cargo: String,
        at: String,
    },
    StatusAlternation {
        truck: String,
        at: String,
    },
    /// Assign and drop rows not alternating for a (truck, plan) pair.
    RelationNesting {
        truck: String,
        plan: String,
        at: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stage {
    Idle,
    Assigned,
    WeighedEmpty,
    Loaded,
    WeighedLoaded,
    /// (ticket issued, tally issued)
    Documents(bool, bool),
}

impl Stage {
    fn step(self, activity: &str) -> Option<Stage> {
        use Stage::*;
        match (self, activity) {
            (Idle, ASSIGN) => Some(Assigned),
            (Assigned, WEIGH_EMPTY) => Some(WeighedEmpty),
            (WeighedEmpty, LOAD) => Some(Loaded),
            (Loaded, WEIGH_LOADED) => Some(WeighedLoaded),
            (WeighedLoaded, ISSUE_TICKET) => Some(Documents(true, false)),
            (WeighedLoaded, ISSUE_TALLY) => Some(Documents(false, true)),
            (Documents(false, tally), ISSUE_TICKET) => Some(Documents(true, tally)),
            (Documents(ticket, false), ISSUE_TALLY) => Some(Documents(ticket, true)),
            (Documents(true, true), EXIT) => Some(Idle),
            _ => None,
        }
    }

    fn expected(self) -> &'static str {
        match self {
            Stage::Idle => ASSIGN,
            Stage::Assigned => WEIGH_EMPTY,
            Stage::WeighedEmpty => LOAD,
            Stage::Loaded => WEIGH_LOADED,
            Stage::WeighedLoaded => "weighing ticket or tally sheet",
            Stage::Documents(true, true) => EXIT,
            Stage::Documents(..) => "the remaining document",
        }
    }
}

/// Checks the pickup lifecycle invariants. Empty for every simulator log
/// and for the golden log.
pub fn replay_check(log: &DirigoLog, spec: &DomainSpec) -> Vec<ReplayViolation> {
    let mut out = Vec::new();
    let trucks: Vec<&ObjectInstance> = log
        .objects()
        .iter()
        .filter(|o| o.object_type == TRUCK)
        .collect();
    let mut picked: Vec<i64> = Vec::new();

    for tr in &trucks {
        let mut stage = Stage::Idle;
        let mut empty_weight: Option<i64> = None;
        for (event_id, _) in log.events_for_object(&tr.object_id).unwrap_or_default() {
            let Some(e) = log.event(event_id) else {
                continue;
            };
            if !matches!(
                e.activity.as_str(),
                ASSIGN | WEIGH_EMPTY | LOAD | WEIGH_LOADED | ISSUE_TICKET | ISSUE_TALLY | EXIT
            ) {
                continue;
            }
            match stage.step(&e.activity) {
                Some(next) => stage = next,
                None => {
                    out.push(ReplayViolation::EventOrder {
                        truck: tr.object_id.clone(),
                        event_id: e.event_id.clone(),
                        expected: stage.expected().to_owned(),
                    });
                    continue;
                }
            }
            let weight = || {
                log.attribute_at(&tr.object_id, TRUCK_WEIGHT, &e.timestamp)
                    .ok()
                    .and_then(parse_weight)
            };
            match e.activity.as_str() {
                WEIGH_EMPTY => empty_weight = weight(),
                WEIGH_LOADED => match (empty_weight, weight()) {
                    (Some(empty), Some(loaded)) if loaded > empty => picked.push(loaded - empty),
                    _ => out.push(ReplayViolation::WeightOrder {
                        truck: tr.object_id.clone(),
                        event_id: e.event_id.clone(),
                    }),
                },
                _ => {}
            }
        }

        if let Some(h) = tr.dynamic_history.get(TRUCK_STATUS) {
            for (i, c) in h.iter().enumerate() {
                let expected = if i % 2 == 0 { AVAILABLE } else { OCCUPIED };
                if c.value != expected {
                    out.push(ReplayViolation::StatusAlternation {
                        truck: tr.object_id.clone(),
                        at: c.timestamp.to_string(),
                    });
                    break;
                }
            }
        }
    }

    for cargo in log.objects().iter().filter(|o| o.object_type == CARGO) {
        let Some(h) = cargo.dynamic_history.get(STOCK_WEIGHT) else {
            continue;
        };
        for w in h.windows(2) {
            let (Some(a), Some(b)) = (parse_weight(&w[0].value), parse_weight(&w[1].value)) else {
                continue;
            };
            let at = w[1].timestamp.to_string();
            if b > a {
                out.push(ReplayViolation::StockIncrease {
                    cargo: cargo.object_id.clone(),
                    at,
                });
            } else if b < a && !picked.contains(&(a - b)) {
                out.push(ReplayViolation::StockMismatch {
                    cargo: cargo.object_id.clone(),
                    at,
                });
            }
        }
    }

    let pairs = spec.closing_pairs();
    let mut open: HashMap<(&str, &str, &str), bool> = HashMap::new();
    for r in log.o2o() {
        let (assign, closing) = match pairs
            .iter()
            .find(|(o, c)| *o == r.qualifier || *c == r.qualifier)
        {
            Some((o, c)) => (o.as_str(), *c == r.qualifier),
            None => continue,
        };
        let key = (
            r.source_object_id.as_str(),
            r.target_object_id.as_str(),
            assign,
        );
        let is_open = open.entry(key).or_insert(false);
        if *is_open == closing {
            *is_open = !closing;
        } else {
            out.push(ReplayViolation::RelationNesting {
                truck: r.source_object_id.clone(),
                plan: r.target_object_id.clone(),
                at: r.timestamp.to_string(),
            });
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_format_with_two_decimals() {
        assert_eq!(format_weight(1260), "12.60");
        assert_eq!(format_weight(5), "0.05");
        assert_eq!(parse_weight("12.6"), Some(1260));
        assert_eq!(role_prefix("Weighbridge staff"), "WS");
    }

    #[test]
    fn zero_plans_is_empty() {
        let cfg = SimConfig {
            num_plans: 0,
            ..SimConfig::default()
        };
        assert!(simulate(&cfg, &canonical_spec()).unwrap().is_empty());
    }

    #[test]
    fn pool_too_small() {
        let cfg = SimConfig {
            truck_pool_size: 1,
            ..SimConfig::default()
        };
        assert!(matches!(
            simulate(&cfg, &canonical_spec()),
            Err(SimError::InsufficientTrucks { needed: 3, pool: 1 })
        ));
    }

    #[test]
    fn spec_without_activities_is_a_mismatch() {
        let spec = DomainSpec::parse("[[object_types]]\nname = \"Truck\"\n").unwrap();
        assert!(matches!(
            simulate(&SimConfig::default(), &spec),
            Err(SimError::SpecMismatch(_))
        ));
    }

    #[test]
    fn golden_replays_cleanly() {
        assert_eq!(replay_check(&golden_log(), &canonical_spec()), vec![]);
    }

    #[test]
    fn config_round_trips_through_toml() {
        let cfg = SimConfig::default();
        assert_eq!(SimConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        assert!(matches!(
            SimConfig::from_toml("seed = 1"),
            Err(SimError::InvalidConfig(_))
        ));
    }

    #[test]
    fn simulated_logs_replay_and_conform() {
        let spec = canonical_spec();
        let cfg = SimConfig::from_toml(include_str!("../fixtures/sim_config.toml")).unwrap();
        for seed in 0..20 {
            let log = simulate(&cfg.clone().with_seed(seed), &spec).unwrap();
            assert_eq!(replay_check(&log, &spec), vec![], "seed {seed}");
            assert_eq!(
                crate::domain::conformance(&log, &spec),
                vec![],
                "seed {seed}"
            );
        }
    }

    #[test]
    fn same_seed_same_log() {
        let spec = canonical_spec();
        let cfg = SimConfig::default().with_seed(42);
        assert_eq!(
            simulate(&cfg, &spec).unwrap(),
            simulate(&cfg, &spec).unwrap()
        );
    }
}
