// Parse the cargo pickup domain spec, list what a complete log must hold,
// and check a log against it.
//
// ```text
// cargo run --example domain_spec
// ```

use dirigo::domain::{conformance, expected_inventory};
use dirigo::model::EventRecord;
use dirigo::{sim, DirigoLog, DomainSpec};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = DomainSpec::parse(sim::CARGO_PICKUP_SPEC)?;
    println!("goal: {}", spec.goal.statement);
    for q in &spec.goal.questions {
        println!("  ? {q}");
    }
    for a in &spec.activities {
        println!("  {} by {}", a.name, a.roles.join(", "));
    }

    let inv = expected_inventory(&spec);
    for (ty, attrs) in &inv.static_attributes {
        println!(
            "{ty} static: {}",
            attrs.iter().cloned().collect::<Vec<_>>().join(", ")
        );
    }
    for (ty, attrs) in &inv.dynamic_attributes {
        println!(
            "{ty} dynamic: {}",
            attrs.iter().cloned().collect::<Vec<_>>().join(", ")
        );
    }
    println!("static O2O relations: {}", inv.static_o2o.len());
    println!("dynamic O2O relations: {}", inv.dynamic_o2o.len());
    println!("E2O relations: {}", inv.e2o.len());
    for (open, close) in spec.closing_pairs() {
        println!("`{close}` ends `{open}`");
    }

    let golden = sim::golden_log();
    println!(
        "golden log deviations: {}",
        conformance(&golden, &spec).len()
    );

    // drop the resource of every event and the log no longer conforms
    let (timeline, events, objects, e2o, o2o) = golden.into_parts();
    let events = events
        .into_iter()
        .map(|e| EventRecord::new(e.event_id, e.activity, e.timestamp, None))
        .collect();
    let stripped = DirigoLog::build(timeline, events, objects, e2o, o2o)?;
    for d in conformance(&stripped, &spec).iter().take(3) {
        println!("  {d:?}");
    }

    // the spec round-trips through its document form
    assert_eq!(DomainSpec::parse(&spec.to_document())?, spec);
    Ok(())
}
