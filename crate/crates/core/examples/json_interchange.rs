//! Serializing objects and reading them back, plus what a bad document reports.

use qme::ensembles::{random_instrument, random_state, RngSeed};
use qme::interchange::{parse_instrument, parse_state, to_json};

fn main() -> qme::Result<()> {
    let mut rng = RngSeed(1).rng();
    let rho = random_state(2, 1, &mut rng)?;
    let text = to_json(&rho);
    print!("{text}");
    assert_eq!(parse_state(&text)?, rho);

    let inst = random_instrument(2, 2, 1, &mut rng)?;
    assert_eq!(parse_instrument(&to_json(&inst))?, inst);
    println!("instrument round trip ok");

    let not_a_state = r#"{"dim": 2, "entries": [[1,0],[0,0],[0,0],[1,0]]}"#;
    match parse_state(not_a_state) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!("trace 2 is not a state"),
    }
    Ok(())
}
