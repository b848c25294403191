//! ρ-entropy of a single effect next to its spectral bounds.

use qme::{effect_entropy, effect_entropy_bounds, von_neumann_entropy, ComplexMatrix, Effect, State};

fn main() -> qme::Result<()> {
    let rho = State::new(ComplexMatrix::diag(&[0.75, 0.25]))?;
    let a = Effect::new(ComplexMatrix::diag(&[1.0, 0.0]))?;

    let s = effect_entropy(&a, &rho)?.nats();
    let b = effect_entropy_bounds(&a, &rho)?;
    println!("S(rho)          = {:.10}", von_neumann_entropy(&rho).nats());
    println!("S_a(rho)        = {s:.10}");
    println!("bounds          = [{:.10}, {:.10}]", b.lower, b.upper);

    // Scaling the effect scales the entropy.
    for lambda in [0.25, 0.5, 1.0] {
        let scaled = Effect::identity(2).scale(lambda)?;
        println!("S_(λI)(rho), λ={lambda:<4} = {:.10}", effect_entropy(&scaled, &rho)?.nats());
    }
    Ok(())
}
