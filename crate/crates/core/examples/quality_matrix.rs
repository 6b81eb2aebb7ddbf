// Evaluate the nine quality criteria on the golden log in every
// representation and print the summary matrix.
//
// ```text
// cargo run --example quality_matrix
// ```

use dirigo::convert::{convert_representation, O2oPairing};
use dirigo::quality::{evaluate_all, report_matrix, report_matrix_csv, Representation};
use dirigo::{sim, Format};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = sim::canonical_spec();
    let pairing = O2oPairing::from_spec(&spec);
    let mut reports = Vec::new();
    for format in Format::ALL {
        let rep =
            convert_representation(Representation::Dirigo(sim::golden_log()), format, &pairing)?
                .output;
        reports.push(evaluate_all(&rep, &spec));
    }
    println!("{}", report_matrix(&reports));
    print!("{}", report_matrix_csv(&reports));

    // evidence for one failing representation
    println!();
    print!("{}", reports[1]);
    Ok(())
}
