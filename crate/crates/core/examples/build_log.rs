// Build a small log by hand and look up attribute values at points in time.
//
// ```text
// cargo run --example build_log
// ```

use dirigo::model::{DirigoLog, E2ORecord, EventRecord, O2ORecord, ObjectInstance};
use dirigo::Timestamp;

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let timeline = ["t0", "t1", "t2", "t3"].map(Timestamp::from).to_vec();
    let events = vec![
        EventRecord::new("e1", "Assign trucks", "t1", Some("PP001")),
        EventRecord::new("e2", "Weigh the empty truck", "t2", Some("WS001")),
        EventRecord::new("e3", "Evaluate the truck exit", "t3", Some("SO001")),
    ];
    let truck = ObjectInstance::new("Tr1", "Truck")
        .with_static("LicensePlateNr", "841DKJ", "t0")
        .with_change("TruckStatus", "t0", "Available")
        .with_change("TruckStatus", "t1", "Occupied")
        .with_change("TruckWeight", "t2", "12.6")
        .with_change("TruckStatus", "t3", "Available");
    let plan = ObjectInstance::new("Pcp1", "PickupPlan");
    let e2o = vec![
        E2ORecord::new("e1", "Tr1", "Assigned truck for pickup"),
        E2ORecord::new("e1", "Pcp1", "Trucks assigned to pickup plan"),
        E2ORecord::new("e2", "Tr1", "Weighed empty truck"),
        E2ORecord::new("e3", "Tr1", "Truck exit evaluated"),
    ];
    let o2o = vec![
        O2ORecord::new("Tr1", "Pcp1", "t1", "Assigned Truck for Pickup Plan"),
        O2ORecord::new("Tr1", "Pcp1", "t3", "Dropped Truck from Pickup Plan"),
    ];
    let log = DirigoLog::build(timeline, events, vec![truck, plan], e2o, o2o)?;

    for t in log.timeline() {
        println!("{t}: status {}", log.attribute_at("Tr1", "TruckStatus", t)?);
    }
    println!(
        "plate {}",
        log.attribute_at("Tr1", "LicensePlateNr", &"t3".into())?
    );
    for (event, qualifier) in log.events_for_object("Tr1")? {
        println!("{event} ({qualifier})");
    }
    for row in log.o2o_history("Tr1")? {
        println!(
            "{} {} -> {} {}",
            row.timestamp, row.source_object_id, row.target_object_id, row.qualifier
        );
    }

    // an event pointing at an unknown object is rejected
    let broken = DirigoLog::build(
        vec!["t1".into()],
        vec![EventRecord::new("e1", "Load cargo", "t1", None)],
        vec![],
        vec![E2ORecord::new("e1", "Cid9", "Cargo loaded onto truck")],
        vec![],
    );
    println!("rejected: {}", broken.unwrap_err());
    Ok(())
}
