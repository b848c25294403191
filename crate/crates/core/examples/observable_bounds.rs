//! S(ρ) ≤ S_A(ρ) ≤ ln n on random observables, and the spectral observable
//! that attains the lower end.

use qme::ensembles::{random_observable, random_state, RngSeed};
use qme::{observable_entropy, von_neumann_entropy, Effect, Observable};

fn main() -> qme::Result<()> {
    let mut rng = RngSeed(3).rng();
    let n = 4;
    let rho = random_state(n, n, &mut rng)?;
    let s = von_neumann_entropy(&rho).nats();
    println!("S(rho) = {s:.6}, ln n = {:.6}", (n as f64).ln());

    for k in 2..=5 {
        let obs = random_observable(n, k, &mut rng)?;
        println!("{k} outcomes: S_A(rho) = {:.6}", observable_entropy(&obs, &rho)?.nats());
    }

    let eig = rho.matrix().hermitian_eig()?;
    let spectral = Observable::new(
        eig.spectral_projections(1e-9)
            .into_iter()
            .enumerate()
            .map(|(i, (_, p))| Ok((i.to_string(), Effect::new(p)?)))
            .collect::<qme::Result<Vec<_>>>()?,
    )?;
    println!("eigenbasis:  S_A(rho) = {:.6}", observable_entropy(&spectral, &rho)?.nats());
    Ok(())
}
