//! Running one instrument after another measures the sequential product.

use qme::ensembles::{random_instrument, random_state, RngSeed};
use qme::{compose_instruments, instrument_entropy, measured_observable, observable_sequential};

fn main() -> qme::Result<()> {
    let mut rng = RngSeed(13).rng();
    let first = random_instrument(3, 2, 2, &mut rng)?;
    let second = random_instrument(3, 3, 1, &mut rng)?;
    let composed = compose_instruments(&second, &first)?;

    let a = measured_observable(&first)?;
    let b = measured_observable(&second)?;
    let product = observable_sequential(&a, &first, &b)?.observable;
    let measured = measured_observable(&composed)?;
    let worst = product
        .outcomes()
        .iter()
        .map(|o| o.effect.matrix().max_abs_diff(measured.get(&o.label).unwrap().matrix()))
        .fold(0.0, f64::max);
    println!("max |A∘B − measured| = {worst:.2e}");

    let rho = random_state(3, 3, &mut rng)?;
    println!("S_first(rho)    = {:.6}", instrument_entropy(&first, &rho)?.nats());
    println!("S_composed(rho) = {:.6}", instrument_entropy(&composed, &rho)?.nats());
    Ok(())
}
