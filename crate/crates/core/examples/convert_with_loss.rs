// Convert a simulated log to ACEL, DOCEL and XOC and summarise what each
// target cannot carry.
//
// ```text
// cargo run --example convert_with_loss
// ```

use std::collections::BTreeMap;

use dirigo::convert::{
    acel_to_dirigo, dirigo_to_acel, dirigo_to_docel, dirigo_to_xoc, LossReport, O2oPairing,
};
use dirigo::sim::{self, SimConfig};

fn summary(name: &str, loss: &LossReport) {
    let mut by_kind: BTreeMap<&str, usize> = BTreeMap::new();
    for item in &loss.items {
        *by_kind.entry(item.fact.kind()).or_default() += 1;
    }
    println!("{name}: {} facts lost", loss.len());
    for (kind, n) in by_kind {
        println!("  {kind:<16} {n}");
    }
}

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = sim::canonical_spec();
    let log = sim::simulate(&SimConfig::default().with_seed(3), &spec)?;
    let pairing = O2oPairing::from_spec(&spec);

    let acel = dirigo_to_acel(&log, &pairing);
    summary("ACEL", &acel.loss);
    summary("DOCEL", &dirigo_to_docel(&log).loss);
    summary("XOC", &dirigo_to_xoc(&log, &pairing).loss);

    // ACEL can be lifted back; the lift keeps what the loss report did not list
    let back = acel_to_dirigo(&acel.output)?;
    println!(
        "ACEL lift: {} events, {} objects, {} O2O rows",
        back.events().len(),
        back.objects().len(),
        back.o2o().len()
    );
    if let Some(item) = acel.loss.items.first() {
        print!(
            "first lost fact: {}",
            LossReport {
                items: vec![item.clone()]
            }
        );
    }
    Ok(())
}
