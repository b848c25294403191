//! Merging outcomes never lowers the entropy.

use qme::ensembles::{random_observable, random_state, RngSeed};
use qme::{coarse_grain, observable_entropy, CoarseGraining};

fn main() -> qme::Result<()> {
    let mut rng = RngSeed(8).rng();
    let fine = random_observable(3, 4, &mut rng)?;
    let rho = random_state(3, 3, &mut rng)?;
    let f = CoarseGraining::from_pairs([("0", "low"), ("1", "low"), ("2", "high"), ("3", "high")]);
    let coarse = coarse_grain(&fine, &f)?;
    println!("fine   S = {:.6}", observable_entropy(&fine, &rho)?.nats());
    println!("coarse S = {:.6}", observable_entropy(&coarse, &rho)?.nats());
    Ok(())
}
