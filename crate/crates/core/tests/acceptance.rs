//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line and then
//! asserts it. Run with `--nocapture` to see the lines.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qme::ensembles::{
    ginibre_square, random_atomic_observable, random_channel, random_effect, random_instrument, random_observable,
    random_state, RngSeed, SeededRng,
};
use qme::suite::{self, CheckReport, PropertyCheck};
use qme::{
    compose_instruments, effect_entropy, effect_entropy_bounds, holevo_chain, holevo_instrument, holevo_operation,
    luders_instrument, luders_operation, measured_observable, model_instrument, model_observable,
    observable_entropy, observable_sequential, tensor_observable, von_neumann_entropy, ComplexMatrix, Effect,
    Instrument, MeasurementModel, Observable, Operation, State,
};
use rand::Rng;

const DIMS: [usize; 4] = [2, 3, 4, 5];
const PER_DIM: usize = 25;

fn report(criterion: u32, what: &str, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("criterion {criterion} [{verdict}] {what}: {detail}");
    assert!(ok, "criterion {criterion} failed: {detail}");
}

/// Worst |lhs − rhs| over 100 seeded instances spread across dims 2..=5.
fn worst_over_instances(name: &str, mut f: impl FnMut(usize, &mut SeededRng) -> (f64, f64)) -> (f64, usize) {
    let mut worst = 0.0f64;
    let mut count = 0;
    for (k, &d) in DIMS.iter().enumerate() {
        for i in 0..PER_DIM {
            let mut rng = RngSeed(1000 + k as u64).derive(name, i as u64).rng();
            let (lhs, rhs) = f(d, &mut rng);
            let diff = (lhs - rhs).abs();
            worst = if diff.is_nan() { f64::INFINITY } else { worst.max(diff) };
            count += 1;
        }
    }
    (worst, count)
}

fn tr(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a * b).trace().re
}

fn spectral_observable(rho: &State) -> Observable {
    let eig = rho.matrix().hermitian_eig().unwrap();
    Observable::new(
        eig.spectral_projections(1e-9)
            .into_iter()
            .enumerate()
            .map(|(i, (_, p))| (i.to_string(), Effect::new(p).unwrap()))
            .collect(),
    )
    .unwrap()
}

#[test]
fn criterion_1_closed_form_identities() {
    let tol = 1e-9;
    let mut cases: Vec<(&str, f64, usize)> = Vec::new();

    let (w, n) = worst_over_instances("scaled-identity", |d, rng| {
        let rho = random_state(d, rng.random_range(1..=d), rng).unwrap();
        let lambda: f64 = rng.random_range(0.01..=1.0);
        let a = Effect::new(ComplexMatrix::identity(d).scale(lambda)).unwrap();
        (effect_entropy(&a, &rho).unwrap().nats(), lambda * (d as f64).ln())
    });
    cases.push(("S_(λI)(ρ) = λ ln n", w, n));

    let (w, n) = worst_over_instances("mixed-effect", |d, rng| {
        let a = random_effect(d, rng).unwrap();
        let s = effect_entropy(&a, &State::maximally_mixed(d)).unwrap().nats();
        (s, a.trace() / d as f64 * (d as f64).ln())
    });
    cases.push(("S_a(I/n) = (tr a / n) ln n", w, n));

    let (w, n) = worst_over_instances("mixed-observable", |d, rng| {
        let k = rng.random_range(2..=5);
        let obs = random_observable(d, k, rng).unwrap();
        (observable_entropy(&obs, &State::maximally_mixed(d)).unwrap().nats(), (d as f64).ln())
    });
    cases.push(("S_A(I/n) = ln n", w, n));

    let (w, n) = worst_over_instances("spectral", |d, rng| {
        let rho = random_state(d, rng.random_range(1..=d), rng).unwrap();
        let obs = spectral_observable(&rho);
        (observable_entropy(&obs, &rho).unwrap().nats(), von_neumann_entropy(&rho).nats())
    });
    cases.push(("S_A(ρ) = S(ρ) for the spectral observable of ρ", w, n));

    let (w, n) = worst_over_instances("tensor-effect", |d, rng| {
        let d2 = rng.random_range(2..=3);
        let (a1, a2) = (random_effect(d, rng).unwrap(), random_effect(d2, rng).unwrap());
        let (r1, r2) = (random_state(d, d, rng).unwrap(), random_state(d2, d2, rng).unwrap());
        let lhs = effect_entropy(&a1.tensor(&a2), &r1.tensor(&r2)).unwrap().nats();
        let rhs = tr(r2.matrix(), a2.matrix()) * effect_entropy(&a1, &r1).unwrap().nats()
            + tr(r1.matrix(), a1.matrix()) * effect_entropy(&a2, &r2).unwrap().nats();
        (lhs, rhs)
    });
    cases.push(("tensor formula S_(a1⊗a2)(ρ1⊗ρ2)", w, n));

    let (w, n) = worst_over_instances("tensor-observable", |d, rng| {
        let d2 = rng.random_range(2..=3);
        let a = random_observable(d, rng.random_range(2..=3), rng).unwrap();
        let b = random_observable(d2, rng.random_range(2..=3), rng).unwrap();
        let (r1, r2) = (random_state(d, d, rng).unwrap(), random_state(d2, d2, rng).unwrap());
        let lhs = observable_entropy(&tensor_observable(&a, &b), &r1.tensor(&r2)).unwrap().nats();
        let rhs = observable_entropy(&a, &r1).unwrap().nats() + observable_entropy(&b, &r2).unwrap().nats();
        (lhs, rhs)
    });
    cases.push(("S_(A⊗B)(ρ1⊗ρ2) = S_A(ρ1) + S_B(ρ2)", w, n));

    let (w, n) = worst_over_instances("holevo-collapse", |d, rng| {
        let a = random_observable(d, rng.random_range(2..=4), rng).unwrap();
        let b = random_observable(d, rng.random_range(2..=4), rng).unwrap();
        let alphas: Vec<State> = (0..a.len()).map(|_| random_state(d, d, rng).unwrap()).collect();
        let rho = random_state(d, d, rng).unwrap();
        let prod = observable_sequential(&a, &holevo_instrument(&a, &alphas).unwrap(), &b).unwrap();
        (
            observable_entropy(&prod.observable, &rho).unwrap().nats(),
            observable_entropy(&a, &rho).unwrap().nats(),
        )
    });
    cases.push(("Holevo instruments give S_(A∘B) = S_A", w, n));

    let (w, n) = worst_over_instances("holevo-chain", |d, rng| {
        let a: Vec<Effect> = (0..3).map(|_| random_effect(d, rng).unwrap()).collect();
        let alpha: Vec<State> = (0..2).map(|_| random_state(d, d, rng).unwrap()).collect();
        let rho = random_state(d, d, rng).unwrap();
        let chain = holevo_chain(&a, &alpha).unwrap();
        let coeff = tr(alpha[1].matrix(), a[2].matrix()) * tr(alpha[0].matrix(), a[1].matrix());
        (
            effect_entropy(&chain, &rho).unwrap().nats(),
            coeff * effect_entropy(&a[0], &rho).unwrap().nats(),
        )
    });
    cases.push(("three-stage Holevo chain formula", w, n));

    let ok = cases.iter().all(|&(_, w, n)| w <= tol && n >= 100);
    let detail = cases
        .iter()
        .map(|(name, w, n)| format!("{name}: worst {w:.1e} over {n}"))
        .collect::<Vec<_>>()
        .join("; ");
    report(1, "closed-form identities (tol 1e-9)", ok, &detail);
}

struct FullRun {
    reports: Vec<CheckReport>,
    exit_code: i32,
    elapsed: Duration,
}

/// One default `verify` run through the CLI entry point, shared by several criteria.
fn full_run() -> &'static FullRun {
    static RUN: OnceLock<FullRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let start = Instant::now();
        let out = qme::cli::run(["qme", "verify", "--seed", "42"]);
        let elapsed = start.elapsed();
        let parsed: Vec<serde_json::Value> = serde_json::from_str(&out.stdout).expect("verify emits a JSON array");
        let reports = parsed
            .into_iter()
            .map(|v| CheckReport {
                id: v["id"].as_str().unwrap().to_string(),
                passed: v["passed"].as_bool().unwrap(),
                worst_margin: v["worst_margin"].as_f64().unwrap_or(f64::NAN),
                counterexample: v.get("counterexample").filter(|c| !c.is_null()).cloned(),
                elapsed: v["elapsed"].as_f64().unwrap(),
                trials: v["trials"].as_u64().unwrap() as usize,
                skipped: v["skipped"].as_u64().unwrap() as usize,
            })
            .collect();
        FullRun {
            reports,
            exit_code: out.code,
            elapsed,
        }
    })
}

fn lookup<'a>(run: &'a FullRun, id: &str) -> &'a CheckReport {
    run.reports
        .iter()
        .find(|r| r.id == id)
        .unwrap_or_else(|| panic!("{id} missing from the report"))
}

#[test]
fn criterion_2_inequality_suite() {
    let ids = [
        "thm-2.2", "thm-2.8", "thm-2.10-iii", "thm-2.10-iv", "thm-3.1", "thm-3.3-i", "thm-3.3-ii", "thm-3.4",
        "cor-2.3", "cor-2.4", "cor-2.5", "cor-2.6", "cor-2.7-scaling", "cor-2.7-mixture", "cor-3.6", "cor-3.7",
        "model-atomic-probe",
    ];
    let run = full_run();
    let failed: Vec<&str> = ids.iter().copied().filter(|id| !lookup(run, id).passed).collect();
    let all_passed = run.reports.iter().all(|r| r.passed);
    let trials_ok = run.reports.iter().all(|r| r.trials == 1000);
    let fast = run.elapsed < Duration::from_secs(60);
    let ok = failed.is_empty() && all_passed && run.exit_code == 0 && trials_ok && fast;
    let detail = format!(
        "{} listed checks, failed {:?}; full verify exit {} in {:.1} s over {} checks",
        ids.len(),
        failed,
        run.exit_code,
        run.elapsed.as_secs_f64(),
        run.reports.len()
    );
    report(2, "inequality suite at 1000 trials, dims 2..5", ok, &detail);
}

#[test]
fn criterion_3_equality_constructions() {
    let run = full_run();
    let ids = ["thm-2.2-equality", "cor-2.3-equality", "thm-2.8-equality", "cor-3.5"];
    let margins: Vec<(&str, f64, bool)> = ids
        .iter()
        .map(|id| {
            let r = lookup(run, id);
            (*id, r.worst_margin, r.passed)
        })
        .collect();
    let ok = margins.iter().all(|&(_, m, p)| p && m >= 0.0);
    let detail = margins
        .iter()
        .map(|(id, m, _)| format!("{id} margin {m:.2e}"))
        .collect::<Vec<_>>()
        .join(", ");
    report(3, "equality constructions within 1e-9", ok, &detail);
}

fn duality_residual(op: &Operation, rng: &mut SeededRng) -> f64 {
    let d = op.dim();
    let x = ginibre_square(d, rng);
    let y = ginibre_square(d, rng);
    let lhs: Complex64 = (&op.apply(&x).unwrap() * &y).trace();
    let rhs: Complex64 = (&x * &op.apply_dual(&y).unwrap()).trace();
    (lhs - rhs).norm()
}

fn observable_gap(a: &Observable, b: &Observable) -> f64 {
    a.outcomes()
        .iter()
        .map(|o| match b.get(&o.label) {
            Some(e) => o.effect.matrix().max_abs_diff(e.matrix()),
            None => f64::INFINITY,
        })
        .fold(if a.len() == b.len() { 0.0 } else { f64::INFINITY }, f64::max)
}

fn random_model(d: usize, rng: &mut SeededRng) -> MeasurementModel {
    let dk = rng.random_range(2..=3);
    let nu = random_channel(d * dk, rng.random_range(1..=2), rng).unwrap();
    let sigma = random_state(dk, rng.random_range(1..=dk), rng).unwrap();
    let probe = if rng.random_bool(0.5) {
        random_atomic_observable(dk, rng).unwrap()
    } else {
        random_observable(dk, rng.random_range(2..=3), rng).unwrap()
    };
    MeasurementModel::new(d, dk, nu, sigma, probe).unwrap()
}

#[test]
fn criterion_4_oracle_cross_checks() {
    // Holevo Kraus construction against X ↦ tr(Xa) α on arbitrary operators.
    let (holevo, n_holevo) = worst_over_instances("holevo-kraus", |d, rng| {
        let a = random_effect(d, rng).unwrap();
        let alpha = random_state(d, rng.random_range(1..=d), rng).unwrap();
        let x = ginibre_square(d, rng);
        let via_kraus = holevo_operation(&a, &alpha).unwrap().apply(&x).unwrap();
        let defining = alpha.matrix().scale_complex((&x * a.matrix()).trace());
        (via_kraus.max_abs_diff(&defining), 0.0)
    });

    let (model, n_model) = worst_over_instances("model-routes", |d, rng| {
        let m = random_model(d, rng);
        let reduced = model_observable(&m).unwrap();
        let via_instrument = measured_observable(&model_instrument(&m).unwrap()).unwrap();
        (observable_gap(&reduced, &via_instrument), 0.0)
    });

    // Every operation constructed by the library: Lüders, Holevo, random
    // instruments, compositions and model instruments.
    let (duality, n_duality) = worst_over_instances("duality", |d, rng| {
        let a = random_observable(d, rng.random_range(2..=3), rng).unwrap();
        let alphas: Vec<State> = (0..a.len()).map(|_| random_state(d, d, rng).unwrap()).collect();
        let i1 = random_instrument(d, 2, 2, rng).unwrap();
        let i2 = random_instrument(d, 3, 1, rng).unwrap();
        let instruments: Vec<Instrument> = vec![
            luders_instrument(&a).unwrap(),
            holevo_instrument(&a, &alphas).unwrap(),
            i1.clone(),
            compose_instruments(&i2, &i1).unwrap(),
            model_instrument(&random_model(d, rng)).unwrap(),
        ];
        let e = random_effect(d, rng).unwrap();
        let mut ops: Vec<Operation> = instruments
            .iter()
            .flat_map(|i| i.outcomes().iter().map(|o| o.operation.clone()))
            .collect();
        ops.push(luders_operation(&e).unwrap());
        ops.push(holevo_operation(&e, &alphas[0]).unwrap());
        let worst = ops.iter().map(|op| duality_residual(op, rng)).fold(0.0, f64::max);
        (worst, 0.0)
    });

    let (compose, n_compose) = worst_over_instances("composition", |d, rng| {
        let i1 = random_instrument(d, rng.random_range(2..=3), 2, rng).unwrap();
        let i2 = random_instrument(d, rng.random_range(2..=3), 1, rng).unwrap();
        let a = measured_observable(&i1).unwrap();
        let b = measured_observable(&i2).unwrap();
        let product = observable_sequential(&a, &i1, &b).unwrap();
        let measured = measured_observable(&compose_instruments(&i2, &i1).unwrap()).unwrap();
        let gap = if product.dropped.is_empty() {
            observable_gap(&product.observable, &measured)
        } else {
            f64::INFINITY
        };
        (gap, 0.0)
    });

    let ok = holevo <= 1e-10 && model <= 1e-8 && duality <= 1e-10 && compose <= 1e-8;
    let detail = format!(
        "Holevo Kraus {holevo:.1e} ({n_holevo}), model routes {model:.1e} ({n_model}), \
         duality {duality:.1e} ({n_duality}), composition {compose:.1e} ({n_compose})"
    );
    report(4, "oracle cross-checks", ok, &detail);
}

#[test]
fn criterion_5_harness_integrity() {
    let canary = suite::run_check(&PropertyCheck::with_defaults("canary").unwrap(), suite::DEFAULT_SEED).unwrap();
    let canary_ok = !canary.passed && canary.counterexample.is_some() && canary.worst_margin < 0.0;

    let first = suite::run_all(suite::DEFAULT_TRIALS, &suite::DEFAULT_DIMS, RngSeed(42)).unwrap();
    let second = suite::run_all(suite::DEFAULT_TRIALS, &suite::DEFAULT_DIMS, RngSeed(42)).unwrap();
    let reproducible = first.len() == second.len() && first.iter().zip(&second).all(|(a, b)| a.same_outcome(b));
    // The CLI run went through JSON; margins must survive the trip bit for bit.
    let via_cli = full_run();
    let cli_matches = via_cli.reports.len() == first.len()
        && via_cli.reports.iter().zip(&first).all(|(a, b)| {
            a.id == b.id && a.passed == b.passed && a.worst_margin.to_bits() == b.worst_margin.to_bits()
        });

    let ok = canary_ok && reproducible && cli_matches;
    let detail = format!(
        "canary passed={} margin {:.3e} counterexample={}; two runs identical={reproducible}; CLI report identical={cli_matches}",
        canary.passed,
        canary.worst_margin,
        canary.counterexample.is_some()
    );
    report(5, "harness integrity", ok, &detail);
}

#[test]
fn criterion_6_numeric_spot_values() {
    let rho = State::new(ComplexMatrix::diag(&[0.75, 0.25])).unwrap();
    let a = Effect::new(ComplexMatrix::diag(&[1.0, 0.0])).unwrap();
    let s = von_neumann_entropy(&rho).nats();
    let sa = effect_entropy(&a, &rho).unwrap().nats();
    let upper = effect_entropy_bounds(&a, &rho).unwrap().upper;

    // Independent scalar evaluations.
    let s_ref = -(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
    let sa_ref = -0.75 * 0.75f64.ln();
    let upper_ref = (1.0f64 / 0.75).ln();
    // The published figure for S_a is 0.2157615516, which differs from
    // −0.75 ln 0.75 = 0.21576155433883... by 2.8e-9; the direct value is used.
    let sa_published = 0.2157615516;

    let checks = [
        ("S(ρ)", s, 0.5623351446, s_ref),
        ("S_a(ρ)", sa, sa_ref, sa_ref),
        ("ln[tr a / tr(ρa)]", upper, 0.2876820724, upper_ref),
    ];
    let ok = checks
        .iter()
        .all(|&(_, got, quoted, direct)| (got - quoted).abs() <= 1e-9 && (got - direct).abs() <= 1e-12);
    let detail = checks
        .iter()
        .map(|(name, got, quoted, _)| format!("{name} = {got:.12} (expected {quoted:.10})"))
        .collect::<Vec<_>>()
        .join(", ")
        + &format!("; published S_a value is off by {:.1e}", (sa - sa_published).abs());
    report(6, "numeric spot values (±1e-9)", ok, &detail);
}
