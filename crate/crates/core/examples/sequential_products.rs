//! Lüders and Holevo sequential products of effects and of observables.

use qme::ensembles::{random_effect, random_observable, random_state, RngSeed};
use qme::{
    effect_entropy, holevo_instrument, holevo_operation, luders_instrument, luders_operation, observable_entropy,
    observable_sequential, sequential_product_effect, ComplexMatrix, Effect,
};

fn main() -> qme::Result<()> {
    let a = Effect::new(ComplexMatrix::diag(&[1.0, 0.0]))?;
    let b = Effect::new(ComplexMatrix::diag(&[0.5, 0.5]))?;
    let ab = sequential_product_effect(&luders_operation(&a)?, &b)?;
    println!("luders a∘b diagonal = {:?}", (0..2).map(|i| ab.matrix().get(i, i).re).collect::<Vec<_>>());

    let mut rng = RngSeed(11).rng();
    let rho = random_state(3, 3, &mut rng)?;
    let alpha = random_state(3, 2, &mut rng)?;
    let a = random_effect(3, &mut rng)?;
    let b = random_effect(3, &mut rng)?;
    let ab = sequential_product_effect(&holevo_operation(&a, &alpha)?, &b)?;
    println!(
        "holevo: S_(a∘b) = {:.6} ≤ S_a = {:.6}",
        effect_entropy(&ab, &rho)?.nats(),
        effect_entropy(&a, &rho)?.nats()
    );

    let obs_a = random_observable(3, 3, &mut rng)?;
    let obs_b = random_observable(3, 2, &mut rng)?;
    let luders = observable_sequential(&obs_a, &luders_instrument(&obs_a)?, &obs_b)?;
    let alphas = (0..3).map(|_| random_state(3, 1, &mut rng)).collect::<qme::Result<Vec<_>>>()?;
    let holevo = observable_sequential(&obs_a, &holevo_instrument(&obs_a, &alphas)?, &obs_b)?;
    println!("S_A            = {:.6}", observable_entropy(&obs_a, &rho)?.nats());
    println!("S_(A∘B) luders = {:.6}", observable_entropy(&luders.observable, &rho)?.nats());
    println!("S_(A∘B) holevo = {:.6}", observable_entropy(&holevo.observable, &rho)?.nats());
    println!("labels: {:?}", luders.observable.labels().collect::<Vec<_>>());
    Ok(())
}
