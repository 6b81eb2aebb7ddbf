//! One check per acceptance criterion. Each returns the list of problems it
//! found, so the same code backs the regular tests and the acceptance run.

use std::collections::BTreeSet;

use dirigo::convert::{dirigo_to_acel, dirigo_to_docel, dirigo_to_xoc, O2oPairing};
use dirigo::quality::{evaluate_all, Criterion, Representation};
use dirigo::queries::{self, ObjectSelector, DROP_QUALIFIER};
use dirigo::sim::{self, replay_check};
use dirigo::{domain, Format, Timestamp};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    expected_failures, facts_of_acel, facts_of_docel, facts_of_xoc, golden, golden_path,
    library_verdict, lifecycle_problems, oracle_verdict, random_nf_table, simulated, snapshot,
    spec, target_in, unreported,
};

pub type Problems = Vec<String>;

fn failing(rep: &Representation) -> BTreeSet<Criterion> {
    evaluate_all(rep, &spec()).failed().into_iter().collect()
}

/// Criterion 1: the golden fixtures reproduce the summary matrix.
pub fn summary_matrix() -> Problems {
    let mut out = Vec::new();
    for f in Format::ALL {
        let got = failing(&golden(f));
        if got != expected_failures(f) {
            out.push(format!(
                "{}: fails {got:?}, expected {:?}",
                f.name(),
                expected_failures(f)
            ));
        }
    }
    out
}

/// Criterion 2: the eight goal questions on the golden bundle.
pub fn goal_queries() -> Problems {
    let log = match golden(Format::Dirigo) {
        Representation::Dirigo(l) => l,
        _ => unreachable!(),
    };
    let truck: ObjectSelector = "841DKJ".parse().unwrap();
    let cid1 = ObjectSelector::id("Cid1");
    let ts = |s: &str| Timestamp::new(s);
    let checks: Vec<(&str, bool)> = vec![
        (
            "static attribute",
            queries::q_static_attribute(&log, &cid1, "CargoType").ok() == Some("Rice".into()),
        ),
        (
            "last but one",
            queries::q_last_but_one(&log, &cid1, "StockWeight").ok()
                == Some((ts("t_pre"), "10.0".into())),
        ),
        (
            "event time",
            queries::q_event_time(&log, sim::WEIGH_EMPTY, &truck).ok() == Some(ts("t4")),
        ),
        (
            "static o2o",
            queries::q_static_o2o(&log, &cid1, "Location").ok() == Some("Sid1".into()),
        ),
        (
            "next assignment",
            queries::q_next_assignment(&log, &truck).ok() == Some("Pcp3".into()),
        ),
        (
            "attribute before event",
            queries::q_attribute_before_event(&log, &truck, "TruckWeight", sim::WEIGH_EMPTY).ok()
                == Some("12.6".into()),
        ),
        (
            "o2o event",
            queries::q_o2o_event(&log, &truck, DROP_QUALIFIER).ok()
                == Some(("e9".into(), ts("t8"))),
        ),
        (
            "status transitions",
            queries::q_status_transitions(&log, &truck, "TruckStatus", "Occupied", "Available")
                .ok()
                == Some(vec![ts("t8")]),
        ),
    ];
    checks
        .into_iter()
        .filter(|(_, ok)| !ok)
        .map(|(name, _)| format!("{name} query gave a different answer"))
        .collect()
}

/// Criterion 3: random tables agree with the brute-force dependency oracle.
pub fn normal_forms(tables: usize) -> Problems {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    (0..tables)
        .filter_map(|i| {
            let t = random_nf_table(&mut rng, &format!("t{i}"));
            let (lib, oracle) = (library_verdict(&t), oracle_verdict(&t));
            (lib != oracle).then(|| format!("table {i}: library {lib:?}, oracle {oracle:?}"))
        })
        .collect()
}

fn pairing() -> O2oPairing {
    O2oPairing::from_spec(&spec())
}

fn converted(log: &dirigo::DirigoLog) -> Vec<Representation> {
    let p = pairing();
    vec![
        Representation::Dirigo(log.clone()),
        Representation::Acel(dirigo_to_acel(log, &p).output),
        Representation::Docel(dirigo_to_docel(log).output),
        Representation::Xoc(dirigo_to_xoc(log, &p).output),
    ]
}

/// Writes `rep` twice and reads it back. Reports inequality or differing bytes.
fn round_trip(rep: &Representation, label: &str) -> Problems {
    let mut out = Vec::new();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let f = rep.format();
    let (pa, pb) = (target_in(a.path(), f), target_in(b.path(), f));
    if let Err(e) = rep.write(&pa).and_then(|_| rep.write(&pb)) {
        return vec![format!("{label}: write failed: {e}")];
    }
    match Representation::read(f, &pa) {
        Ok(back) if &back == rep => {}
        Ok(_) => out.push(format!("{label}: read back differs")),
        Err(e) => out.push(format!("{label}: read failed: {e}")),
    }
    if snapshot(a.path()) != snapshot(b.path()) {
        out.push(format!("{label}: two writes differ"));
    }
    out
}

/// Criterion 4: fixtures and simulated logs survive write and read in every
/// format, byte for byte.
pub fn round_trips(seeds: u64) -> Problems {
    let mut out = Vec::new();
    for f in Format::ALL {
        let rep = golden(f);
        let dir = tempfile::tempdir().unwrap();
        let target = target_in(dir.path(), f);
        rep.write(&target).unwrap();
        if snapshot(&target) != snapshot(&golden_path(f)) {
            out.push(format!(
                "{} fixture: rewrite differs from checked-in bytes",
                f.name()
            ));
        }
        out.extend(round_trip(&rep, &format!("{} fixture", f.name())));
    }
    for seed in 0..seeds {
        for rep in converted(&simulated(seed)) {
            out.extend(round_trip(
                &rep,
                &format!("seed {seed} {}", rep.format().name()),
            ));
        }
    }
    out
}

/// Criterion 5: every dropped fact is reported and each converted log fails
/// the same criteria as its schema in the summary matrix.
pub fn loss_soundness(seeds: u64) -> Problems {
    let mut out = Vec::new();
    let p = pairing();
    for seed in 0..seeds {
        let log = simulated(seed);
        let acel = dirigo_to_acel(&log, &p);
        let docel = dirigo_to_docel(&log);
        let xoc = dirigo_to_xoc(&log, &p);
        let missing = [
            (
                Format::Acel,
                unreported(&log, &facts_of_acel(&acel.output), &acel.loss),
            ),
            (
                Format::Docel,
                unreported(&log, &facts_of_docel(&docel.output), &docel.loss),
            ),
            (
                Format::Xoc,
                unreported(&log, &facts_of_xoc(&xoc.output, &log), &xoc.loss),
            ),
        ];
        for (f, m) in missing {
            if !m.is_empty() {
                out.push(format!(
                    "seed {seed} {}: {} unreported facts",
                    f.name(),
                    m.len()
                ));
            }
        }
        let reps = [
            Representation::Dirigo(log.clone()),
            Representation::Acel(acel.output),
            Representation::Docel(docel.output),
            Representation::Xoc(xoc.output),
        ];
        for rep in reps {
            let f = rep.format();
            let got = failing(&rep);
            if got != expected_failures(f) {
                out.push(format!("seed {seed} {}: fails {got:?}", f.name()));
            }
        }
    }
    out
}

/// Criterion 6: simulated logs replay, conform and pass all criteria.
pub fn simulation(seeds: u64) -> Problems {
    let spec = spec();
    let mut out = Vec::new();
    for seed in 0..seeds {
        let log = simulated(seed);
        let replay = replay_check(&log, &spec);
        if !replay.is_empty() {
            out.push(format!("seed {seed}: replay {replay:?}"));
        }
        let dev = domain::conformance(&log, &spec);
        if !dev.is_empty() {
            out.push(format!("seed {seed}: deviations {dev:?}"));
        }
        let report = evaluate_all(&Representation::Dirigo(log.clone()), &spec);
        if !report.all_pass() {
            out.push(format!("seed {seed}: fails {:?}", report.failed()));
        }
        for p in lifecycle_problems(&log) {
            out.push(format!("seed {seed}: {p}"));
        }
    }
    out
}
