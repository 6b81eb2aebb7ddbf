// Write the golden log in all four representations and read each back.
//
// ```text
// cargo run --example formats_round_trip
// ```

use dirigo::convert::{convert_representation, O2oPairing};
use dirigo::quality::Representation;
use dirigo::{sim, Format};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let pairing = O2oPairing::from_spec(&sim::canonical_spec());
    for format in Format::ALL {
        let rep =
            convert_representation(Representation::Dirigo(sim::golden_log()), format, &pairing)?
                .output;
        let path = match format {
            Format::Acel | Format::Xoc => dir.path().join(format!("{format}.json")),
            Format::Dirigo | Format::Docel => dir.path().join(format.name()),
        };
        rep.write(&path)?;
        let back = Representation::read(format, &path)?;
        let tables = back.tables();
        let rows: usize = tables.iter().map(|t| t.rows.len()).sum();
        println!(
            "{format:<6} {} tables, {rows} rows, read back equal: {}",
            tables.len(),
            back == rep
        );
        for t in &tables {
            println!("         {} [{}]", t.name, t.columns.join(", "));
        }
    }
    Ok(())
}
