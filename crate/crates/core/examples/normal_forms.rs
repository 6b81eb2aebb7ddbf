// Check hand-made tables against first, second and third normal form.
//
// ```text
// cargo run --example normal_forms
// ```

use dirigo::formats::{Cell, FunctionalDependency, RelationalTable};
use dirigo::quality::{check_1nf, check_2nf, check_3nf, fd_holds};

fn row(cells: &[&str]) -> Vec<Cell> {
    cells.iter().map(|c| Cell::scalar(*c)).collect()
}

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    // key (Truck, Plan); Plate depends on Truck alone
    let mut assignments = RelationalTable::new(
        "assignments",
        ["Truck", "Plan", "Plate", "Weight"]
            .map(String::from)
            .to_vec(),
    );
    assignments.key = vec!["Truck".into(), "Plan".into()];
    assignments.declared_fds = vec![FunctionalDependency::new(&["Truck"], &["Plate"])];
    assignments.push_row(row(&["Tr1", "Pcp1", "841DKJ", "3.9"]));
    assignments.push_row(row(&["Tr1", "Pcp3", "841DKJ", "4.2"]));
    println!("2NF: {:?}", check_2nf(&assignments)?);

    // key Cargo; Silo -> Zone is transitive
    let mut cargo = RelationalTable::new(
        "cargo",
        ["Cargo", "Silo", "Zone"].map(String::from).to_vec(),
    );
    cargo.key = vec!["Cargo".into()];
    cargo.declared_fds = vec![FunctionalDependency::new(&["Silo"], &["Zone"])];
    cargo.push_row(row(&["Cid1", "Sid1", "North"]));
    cargo.push_row(row(&["Cid4", "Sid1", "North"]));
    println!("3NF: {:?}", check_3nf(&cargo)?);
    println!(
        "Silo -> Zone holds on the data: {}",
        fd_holds(&cargo, &cargo.declared_fds[0])
    );

    // a list-valued cell breaks 1NF, and 2NF/3NF are not assessed
    let mut events =
        RelationalTable::new("events", ["Event", "Objects"].map(String::from).to_vec());
    events.key = vec!["Event".into()];
    events.push_row(vec![
        Cell::scalar("e1"),
        Cell::List(vec!["Tr1".into(), "Pcp1".into()]),
    ]);
    println!("1NF: {:?}", check_1nf(&events));
    println!("3NF: {}", check_3nf(&events).unwrap_err());
    Ok(())
}
