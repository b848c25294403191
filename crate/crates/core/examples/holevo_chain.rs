//! A chain of Holevo products collapses to a product of traces times a₁.

use qme::ensembles::{random_effect, random_state, RngSeed};
use qme::{effect_entropy, holevo_chain};

fn main() -> qme::Result<()> {
    let mut rng = RngSeed(5).rng();
    let dim = 3;
    let effects = (0..3).map(|_| random_effect(dim, &mut rng)).collect::<qme::Result<Vec<_>>>()?;
    let alphas = (0..2).map(|_| random_state(dim, 2, &mut rng)).collect::<qme::Result<Vec<_>>>()?;
    let rho = random_state(dim, dim, &mut rng)?;

    let chain = holevo_chain(&effects, &alphas)?;
    let coeff: f64 = alphas
        .iter()
        .zip(&effects[1..])
        .map(|(al, a)| (al.matrix() * a.matrix()).trace().re)
        .product();
    println!("coefficient            = {coeff:.10}");
    println!("S_(a1∘a2∘a3)(rho)      = {:.10}", effect_entropy(&chain, &rho)?.nats());
    println!("coefficient · S_a1(rho) = {:.10}", coeff * effect_entropy(&effects[0], &rho)?.nats());
    Ok(())
}
