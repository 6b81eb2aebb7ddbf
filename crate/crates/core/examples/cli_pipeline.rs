// Drive the command-line interface in-process: generate the golden bundle,
// convert it, validate both and run a query.
//
// ```text
// cargo run --example cli_pipeline
// ```

use dirigo::cli;

fn dirigo(args: &[&str]) -> i32 {
    let mut out = std::io::stdout();
    let mut err = std::io::stderr();
    let code = cli::run(
        std::iter::once("dirigo").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    println!("-> exit {code}");
    code
}

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let bundle = dir.path().join("golden");
    let acel = dir.path().join("golden.json");
    let (bundle, acel) = (bundle.to_str().unwrap(), acel.to_str().unwrap());

    assert_eq!(
        dirigo(&["generate", "--golden", "--out", bundle]),
        cli::EXIT_OK
    );
    assert_eq!(
        dirigo(&["convert", "--from", "dirigo", "--to", "acel", bundle, acel]),
        cli::EXIT_OK
    );
    assert_eq!(dirigo(&["validate", bundle]), cli::EXIT_OK);
    assert_eq!(
        dirigo(&["validate", "--format", "acel", acel]),
        cli::EXIT_FAILED
    );
    assert_eq!(
        dirigo(&[
            "query",
            bundle,
            "o2o_event",
            "841DKJ",
            "Dropped Truck from Pickup Plan"
        ]),
        cli::EXIT_OK
    );
    assert_eq!(
        dirigo(&["convert", "--from", "xoc", "--to", "dirigo", acel, bundle]),
        cli::EXIT_UNSUPPORTED
    );
    Ok(())
}
