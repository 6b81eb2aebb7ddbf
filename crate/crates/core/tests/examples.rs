//! Every runnable example is compiled into this test and run once.

mod build_log {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/build_log.rs"
    ));
}

mod domain_spec {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/domain_spec.rs"
    ));
}

mod formats_round_trip {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/formats_round_trip.rs"
    ));
}

mod convert_with_loss {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/convert_with_loss.rs"
    ));
}

mod quality_matrix {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/quality_matrix.rs"
    ));
}

mod normal_forms {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/normal_forms.rs"
    ));
}

mod goal_queries {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/goal_queries.rs"
    ));
}

mod simulate_pickups {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/simulate_pickups.rs"
    ));
}

mod cli_pipeline {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/cli_pipeline.rs"
    ));
}

#[test]
fn build_log_runs() {
    build_log::main().expect("build_log example runs");
}

#[test]
fn domain_spec_runs() {
    domain_spec::main().expect("domain_spec example runs");
}

#[test]
fn formats_round_trip_runs() {
    formats_round_trip::main().expect("formats_round_trip example runs");
}

#[test]
fn convert_with_loss_runs() {
    convert_with_loss::main().expect("convert_with_loss example runs");
}

#[test]
fn quality_matrix_runs() {
    quality_matrix::main().expect("quality_matrix example runs");
}

#[test]
fn normal_forms_runs() {
    normal_forms::main().expect("normal_forms example runs");
}

#[test]
fn goal_queries_runs() {
    goal_queries::main().expect("goal_queries example runs");
}

#[test]
fn simulate_pickups_runs() {
    simulate_pickups::main().expect("simulate_pickups example runs");
}

#[test]
fn cli_pipeline_runs() {
    cli_pipeline::main().expect("cli_pipeline example runs");
}
