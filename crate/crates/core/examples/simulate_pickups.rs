// Generate cargo pickup logs from a seeded configuration and replay them
// against the lifecycle invariants.
//
// ```text
// cargo run --example simulate_pickups
// ```

use dirigo::domain::conformance;
use dirigo::quality::{evaluate_all, Representation};
use dirigo::sim::{self, replay_check, simulate, SimConfig};

const CONFIG: &str = include_str!(concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/fixtures/sim_config.toml"
));

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = sim::canonical_spec();
    let config = SimConfig::from_toml(CONFIG)?;
    let log = simulate(&config, &spec)?;
    println!(
        "seed {}: {} events, {} objects, {} O2O rows",
        config.seed,
        log.events().len(),
        log.objects().len(),
        log.o2o().len()
    );
    for e in log.events().iter().take(8) {
        println!(
            "  {:<4} {:<4} {:<24} {}",
            e.event_id,
            e.timestamp,
            e.activity,
            e.resource.as_deref().unwrap_or("-")
        );
    }
    println!("replay violations: {}", replay_check(&log, &spec).len());
    println!("spec deviations: {}", conformance(&log, &spec).len());
    let report = evaluate_all(&Representation::Dirigo(log.clone()), &spec);
    println!("quality: {}/9", report.passes());

    // same seed, same log
    assert_eq!(simulate(&config, &spec)?, log);

    let too_small = SimConfig {
        truck_pool_size: 1,
        ..config
    };
    println!("pool of one: {}", simulate(&too_small, &spec).unwrap_err());
    Ok(())
}
