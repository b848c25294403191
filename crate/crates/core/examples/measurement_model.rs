//! Observable and entropy gap induced by a measurement model with an atomic probe.

use qme::ensembles::{random_atomic_observable, random_channel, random_state, RngSeed};
use qme::{model_entropy_gap, model_observable, MeasurementModel};

fn main() -> qme::Result<()> {
    let mut rng = RngSeed(21).rng();
    let (dh, dk) = (2, 3);
    let nu = random_channel(dh * dk, 2, &mut rng)?;
    let sigma = random_state(dk, 1, &mut rng)?;
    let probe = random_atomic_observable(dk, &mut rng)?;
    let model = MeasurementModel::new(dh, dk, nu, sigma, probe)?;

    let a = model_observable(&model)?;
    for o in a.outcomes() {
        println!("A_{}: tr = {:.6}", o.label, o.effect.trace());
    }
    let rho = random_state(dh, dh, &mut rng)?;
    let g = model_entropy_gap(&model, &rho)?;
    println!("S_A(rho)          = {:.6}", g.observable_entropy);
    println!("S_(I⊗P)[ν(ρ⊗σ)]   = {:.6}", g.probe_entropy);
    println!("gap               = {:.6} (≤ 0 for atomic probes)", g.gap);
    Ok(())
}
