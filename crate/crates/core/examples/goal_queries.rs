// Answer the monitoring questions of the cargo pickup goal on the golden
// log. Trucks are addressed by licence plate.
//
// ```text
// cargo run --example goal_queries
// ```

use dirigo::queries::{self, ObjectSelector, DROP_QUALIFIER};
use dirigo::sim;

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let log = sim::golden_log();
    let truck: ObjectSelector = "LicensePlateNr=841DKJ".parse()?;
    let cargo = ObjectSelector::id("Cid1");

    println!(
        "type of cargo Cid1: {}",
        queries::q_static_attribute(&log, &cargo, "CargoType")?
    );
    let (t, stock) = queries::q_last_but_one(&log, &cargo, "StockWeight")?;
    println!("last but one stock of Cid1: {stock} at {t}");
    println!(
        "truck 841DKJ weighed empty at: {}",
        queries::q_event_time(&log, sim::WEIGH_EMPTY, &truck)?
    );
    println!(
        "silo of Cid1: {}",
        queries::q_static_o2o(&log, &cargo, "Location")?
    );
    println!(
        "next plan of 841DKJ: {}",
        queries::q_next_assignment(&log, &truck)?
    );
    println!(
        "weight of 841DKJ before loading: {}",
        queries::q_attribute_before_event(&log, &truck, sim::TRUCK_WEIGHT, sim::WEIGH_EMPTY)?
    );
    let (event, at) = queries::q_o2o_event(&log, &truck, DROP_QUALIFIER)?;
    println!("841DKJ dropped from its plan by {event} at {at}");
    let ts = queries::q_status_transitions(
        &log,
        &truck,
        sim::TRUCK_STATUS,
        sim::OCCUPIED,
        sim::AVAILABLE,
    )?;
    let ts: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
    println!("841DKJ became available at: {}", ts.join(", "));

    match queries::q_next_assignment(&log, &cargo) {
        Ok(plan) => println!("unexpected answer {plan}"),
        Err(e) => println!("cargo has no assignments: {e}"),
    }
    Ok(())
}
