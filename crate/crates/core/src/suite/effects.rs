//! Checks on single effects and effect sequential products.

use num_complex::Complex64;
use rand::Rng;

use super::Trial;
use crate::ensembles::{ginibre_square, random_effect, random_instrument, random_observable, random_simplex, random_state};
use crate::entropy::{effect_entropy, effect_entropy_bounds, probability, trace_product};
use crate::error::Result;
use crate::linalg::ComplexMatrix;
use crate::objects::{Effect, Operation, State};
use crate::sequential::{holevo_chain, holevo_operation, luders_operation, measured_effect, sequential_product_effect};
use crate::tolerance::{PROB_ZERO_TOL, TOL_PSD};

/// Threshold on an equality-condition violation above which the matching
/// strict inequality is certified to exceed the tolerance.
const CONDITION_GAP: f64 = 1e-3;

const OPERATOR_TOL: f64 = 1e-10;

pub(super) fn s(a: &Effect, rho: &State) -> Result<f64> {
    Ok(effect_entropy(a, rho)?.nats())
}

pub(super) fn p(a: &Effect, rho: &State) -> Result<f64> {
    probability(a, rho)
}

/// `−p ln(p / v)` with the zero convention.
pub(super) fn log_term(p: f64, v: f64) -> f64 {
    if p <= PROB_ZERO_TOL {
        0.0
    } else {
        -p * (p / v).ln()
    }
}

pub(super) fn any_state(t: &mut Trial) -> Result<State> {
    let d = t.dim;
    let rank = t.rng().random_range(1..=d);
    random_state(d, rank, t.rng())
}

pub(super) fn full_rank_state(t: &mut Trial) -> Result<State> {
    let d = t.dim;
    random_state(d, d, t.rng())
}

pub(super) fn effect(t: &mut Trial) -> Result<Effect> {
    let d = t.dim;
    random_effect(d, t.rng())
}

/// Two effects with `a + b ≤ I`.
fn orthogonal_pair(t: &mut Trial) -> Result<(Effect, Effect)> {
    let d = t.dim;
    if t.index % 2 == 0 {
        let obs = random_observable(d, 3, t.rng())?;
        let e = obs.outcomes();
        Ok((e[0].effect.clone(), e[1].effect.clone()))
    } else {
        let share: f64 = t.rng().random_range(0.05..0.95);
        let (e1, e2) = (effect(t)?, effect(t)?);
        Ok((e1.scale(share)?, e2.scale(1.0 - share)?))
    }
}

/// Zero-diagonal Hermitian matrix with spectral radius at most `radius`.
fn off_diagonal_hermitian(t: &mut Trial, radius: f64) -> Result<ComplexMatrix> {
    let d = t.dim;
    let g = ginibre_square(d, t.rng()).hermitian_part();
    let h = ComplexMatrix::from_fn(d, |i, j| if i == j { Complex64::new(0.0, 0.0) } else { g.get(i, j) });
    let eig = h.hermitian_eig()?;
    let norm = eig.max_eigenvalue().abs().max(eig.min_eigenvalue().abs());
    Ok(if norm > 0.0 { h.scale(radius / norm) } else { h })
}

/// Hermitian `H` with `tr H = 0`, `tr(ρH) = 0` and spectral radius `radius`.
pub(super) fn invisible_perturbation(t: &mut Trial, rho: &State, radius: f64) -> Result<ComplexMatrix> {
    let d = t.dim;
    let g = ginibre_square(d, t.rng()).hermitian_part();
    // Solve for s, u in H = G − sI − uρ:  tr H = 0, tr ρH = 0.
    let n = d as f64;
    let tr_g = g.trace().re;
    let tr_rg = trace_product(rho.matrix(), &g).re;
    let tr_r2 = trace_product(rho.matrix(), rho.matrix()).re;
    let det = n * tr_r2 - 1.0;
    let (s, u) = if det.abs() < 1e-12 {
        // ρ = I/n: the two conditions coincide.
        (tr_g / n, 0.0)
    } else {
        ((tr_g * tr_r2 - tr_rg) / det, (n * tr_rg - tr_g) / det)
    };
    let h = &(&g - &ComplexMatrix::identity(d).scale(s)) - &rho.matrix().scale(u);
    let eig = h.hermitian_eig()?;
    let norm = eig.max_eigenvalue().abs().max(eig.min_eigenvalue().abs());
    Ok(if norm > 0.0 { h.scale(radius / norm) } else { h })
}

/// An operation together with the effect it measures, cycling through a
/// generic instrument element, a Lüders operation and a Holevo operation.
pub(super) fn measuring_operation(t: &mut Trial) -> Result<(Operation, Effect)> {
    let d = t.dim;
    let op = match t.index % 3 {
        0 => {
            let k = t.rng().random_range(1..=3);
            random_instrument(d, 2, k, t.rng())?.outcomes()[0].operation.clone()
        }
        1 => luders_operation(&effect(t)?)?,
        _ => {
            let a = effect(t)?;
            let alpha = any_state(t)?;
            holevo_operation(&a, &alpha)?
        }
    };
    let a = measured_effect(&op)?;
    Ok((op, a))
}

pub(super) fn thm_2_1_bounds(t: &mut Trial) -> Result<()> {
    let (rho, a) = (any_state(t)?, effect(t)?);
    t.record("rho", &rho);
    t.record("a", &a);
    if p(&a, &rho)? <= PROB_ZERO_TOL {
        t.skip("tr(ρa) = 0");
        return Ok(());
    }
    let b = effect_entropy_bounds(&a, &rho)?;
    let sa = s(&a, &rho)?;
    t.le("lower bound ≤ S_a(ρ)", b.lower, sa);
    t.le("S_a(ρ) ≤ ln[tr a / tr(ρa)]", sa, b.upper);
    Ok(())
}

pub(super) fn thm_2_1_upper_equality(t: &mut Trial) -> Result<()> {
    let d = t.dim;
    // Pure ρ and a = ρ + QbQ with Q = I − ρ, so tr(ρa) = 1.
    let rho = random_state(d, 1, t.rng())?;
    let q = &ComplexMatrix::identity(d) - rho.matrix();
    let b = effect(t)?;
    let a = Effect::new((rho.matrix() + &(&(&q * b.matrix()) * &q)).hermitian_part())?;
    t.record("rho", &rho);
    t.record("a", &a);
    let bounds = effect_entropy_bounds(&a, &rho)?;
    let sa = s(&a, &rho)?;
    t.eq("tr(ρa) = 1", p(&a, &rho)?, 1.0);
    t.eq("S_a(ρ) = ln tr a", sa, a.trace().ln());
    t.eq("S_a(ρ) = upper bound", sa, bounds.upper);

    // The bound is also attained when tr a = tr(ρa): a = cρ for pure ρ.
    let c: f64 = t.rng().random_range(0.05..1.0);
    let scaled = Effect::new(rho.matrix().scale(c))?;
    let upper = effect_entropy_bounds(&scaled, &rho)?.upper;
    t.eq("S_cρ(ρ) = upper bound", s(&scaled, &rho)?, upper);

    // Away from both cases the upper bound is strict: the slack is
    // (1 − p) ln(tr a / p) ≥ CONDITION_GAP · ln(1 + CONDITION_GAP).
    let (generic_rho, generic) = (any_state(t)?, effect(t)?);
    t.record("generic_rho", &generic_rho);
    t.record("generic_a", &generic);
    let pg = p(&generic, &generic_rho)?;
    if pg > PROB_ZERO_TOL && pg <= 1.0 - CONDITION_GAP && generic.trace() - pg >= CONDITION_GAP {
        let upper = effect_entropy_bounds(&generic, &generic_rho)?.upper;
        t.gt_strict("upper bound strict when tr(ρa) < 1 and tr a > tr(ρa)", upper, s(&generic, &generic_rho)?);
    }
    Ok(())
}

pub(super) fn thm_2_1_equal_projection_case(t: &mut Trial) -> Result<()> {
    let d = t.dim;
    let rho = full_rank_state(t)?;
    let eig = rho.matrix().hermitian_eig()?;
    let u = &eig.eigenvectors;
    let c: f64 = t.rng().random_range(0.05..0.95);
    let radius = 0.9 * c.min(1.0 - c) * t.rng().random::<f64>();
    let h = off_diagonal_hermitian(t, radius)?;
    let inner = &ComplexMatrix::identity(d).scale(c) + &h;
    let a = Effect::new((&(u * &inner) * &u.adjoint()).hermitian_part())?;
    t.record("rho", &rho);
    t.record("a", &a);
    for (i, (_, proj)) in eig.spectral_projections(crate::tolerance::EIG_GROUP_TOL).iter().enumerate() {
        let w = trace_product(proj, a.matrix()).re;
        t.eq(&format!("tr(P_{i} a) = c"), w, c);
    }
    let m = d as f64;
    t.eq("S_a(ρ) = (tr a / m) ln m", s(&a, &rho)?, a.trace() / m * m.ln());
    Ok(())
}

pub(super) fn thm_2_2(t: &mut Trial) -> Result<()> {
    let rho = any_state(t)?;
    let (a, b) = orthogonal_pair(t)?;
    t.record("rho", &rho);
    t.record("a", &a);
    t.record("b", &b);
    let ab = a.orthosum(&b)?;
    t.ge("S_(a+b) ≥ S_a + S_b", s(&ab, &rho)?, s(&a, &rho)? + s(&b, &rho)?);
    Ok(())
}

pub(super) fn thm_2_2_equality(t: &mut Trial) -> Result<()> {
    let rho = any_state(t)?;
    let e = effect(t)?;
    let lambda: f64 = t.rng().random_range(0.1..3.0);
    let scale = t.rng().random_range(0.2..=1.0) / (1.0 + lambda);
    let a = e.scale(scale)?;
    let b = e.scale(lambda * scale)?;
    t.record("rho", &rho);
    t.record("a", &a);
    t.record("b", &b);
    let (pa, pb) = (p(&a, &rho)?, p(&b, &rho)?);
    t.eq("tr(b)tr(ρa) = tr(a)tr(ρb)", b.trace() * pa, a.trace() * pb);
    let ab = a.orthosum(&b)?;
    t.eq("S_(a+b) = S_a + S_b", s(&ab, &rho)?, s(&a, &rho)? + s(&b, &rho)?);

    // Converse: a violation V of the condition forces a gap of at least V²/(2n³).
    let (a, b) = orthogonal_pair(t)?;
    t.record("generic_a", &a);
    t.record("generic_b", &b);
    let v = (b.trace() * p(&a, &rho)? - a.trace() * p(&b, &rho)?).abs();
    if v > CONDITION_GAP {
        let ab = a.orthosum(&b)?;
        t.gt_strict("S_(a+b) > S_a + S_b when the condition fails", s(&ab, &rho)?, s(&a, &rho)? + s(&b, &rho)?);
    }
    Ok(())
}

pub(super) fn cor_2_3(t: &mut Trial) -> Result<()> {
    let rho = any_state(t)?;
    let a = effect(t)?;
    t.record("rho", &rho);
    t.record("a", &a);
    let Ok(ac) = a.complement() else {
        t.skip("a = I has no nonzero complement");
        return Ok(());
    };
    let n = t.dim as f64;
    t.le("S_a + S_a′ ≤ ln n", s(&a, &rho)? + s(&ac, &rho)?, n.ln());
    Ok(())
}

pub(super) fn cor_2_3_equality(t: &mut Trial) -> Result<()> {
    let d = t.dim;
    let n = d as f64;
    let a = effect(t)?;
    t.record("a", &a);
    if let Ok(ac) = a.complement() {
        let mixed = State::maximally_mixed(d);
        t.eq("S_a(I/n) + S_a′(I/n) = ln n", s(&a, &mixed)? + s(&ac, &mixed)?, n.ln());
    }

    // A non-uniform ρ with tr a = n tr(ρa): a = cI + H, tr H = tr(ρH) = 0.
    let rho = full_rank_state(t)?;
    let c: f64 = t.rng().random_range(0.1..0.9);
    let h = invisible_perturbation(t, &rho, 0.9 * c.min(1.0 - c))?;
    let a = Effect::new(&ComplexMatrix::identity(d).scale(c) + &h)?;
    let ac = a.complement()?;
    t.record("rho", &rho);
    t.record("a_balanced", &a);
    t.eq("tr a = n tr(ρa)", a.trace(), n * p(&a, &rho)?);
    t.eq("S_a + S_a′ = ln n", s(&a, &rho)? + s(&ac, &rho)?, n.ln());

    // Converse: |tr a − n tr(ρa)| > CONDITION_GAP gives a strict inequality.
    let generic = effect(t)?;
    t.record("generic_a", &generic);
    if let Ok(gc) = generic.complement() {
        if (generic.trace() - n * p(&generic, &rho)?).abs() > CONDITION_GAP {
            t.gt_strict("S_a + S_a′ < ln n when tr a ≠ n tr(ρa)", n.ln(), s(&generic, &rho)? + s(&gc, &rho)?);
        }
    }
    Ok(())
}

pub(super) fn cor_2_4(t: &mut Trial) -> Result<()> {
    let rho = any_state(t)?;
    let (a, b) = orthogonal_pair(t)?;
    t.record("rho", &rho);
    t.record("a", &a);
    t.record("b", &b);
    let sab = s(&a.orthosum(&b)?, &rho)?;
    t.ge("S_(a+b) ≥ S_a", sab, s(&a, &rho)?);
    t.ge("S_(a+b) ≥ S_b", sab, s(&b, &rho)?);
    Ok(())
}

pub(super) fn cor_2_5(t: &mut Trial) -> Result<()> {
    let rho = any_state(t)?;
    let b = effect(t)?;
    // a = b^{1/2} c b^{1/2} ≤ b, or a = λb.
    let a = if t.index % 2 == 0 {
        let c = effect(t)?;
        match sequential_product_effect(&luders_operation(&b)?, &c) {
            Ok(a) => a,
            Err(_) => {
                t.skip("b^{1/2} c b^{1/2} vanished");
                return Ok(());
            }
        }
    } else {
        let lambda: f64 = t.rng().random_range(0.01..=1.0);
        b.scale(lambda)?
    };
    t.record("rho", &rho);
    t.record("a", &a);
    t.record("b", &b);
    t.psd("a ≤ b", &(b.matrix() - a.matrix()))?;
    t.le("S_a ≤ S_b", s(&a, &rho)?, s(&b, &rho)?);
    Ok(())
}

pub(super) fn cor_2_6(t: &mut Trial) -> Result<()> {
    let d = t.dim;
    let rho = any_state(t)?;
    let m = t.rng().random_range(2..=4);
    let obs = random_observable(d, m + 1, t.rng())?;
    let parts: Vec<Effect> = obs.effects().take(m).cloned().collect();
    t.record("rho", &rho);
    t.record("parts", &parts);
    let mut total = parts[0].clone();
    for e in &parts[1..] {
        total = total.orthosum(e)?;
    }
    let sum_s: f64 = parts.iter().map(|e| s(e, &rho)).sum::<Result<f64>>()?;
    t.ge("S_(Σ a_i) ≥ Σ S_(a_i)", s(&total, &rho)?, sum_s);

    // Equality when all tr(ρ a_i)/tr(a_i) agree: a_i = μ_i e.
    let e = effect(t)?;
    let mu = random_simplex(m, t.rng());
    let scaled = mu.iter().map(|&w| e.scale(w)).collect::<Result<Vec<_>>>()?;
    let sum_s: f64 = scaled.iter().map(|x| s(x, &rho)).sum::<Result<f64>>()?;
    t.record("e", &e);
    t.eq("S_e = Σ S_(μ_i e)", s(&e, &rho)?, sum_s);
    Ok(())
}

pub(super) fn cor_2_7_scaling(t: &mut Trial) -> Result<()> {
    let rho = any_state(t)?;
    let a = effect(t)?;
    let lambda: f64 = t.rng().random_range(f64::EPSILON..=1.0);
    t.record("rho", &rho);
    t.record("a", &a);
    t.record("lambda", &lambda);
    t.eq("S_(λa) = λ S_a", s(&a.scale(lambda)?, &rho)?, lambda * s(&a, &rho)?);
    Ok(())
}

/// The convex combination is superadditive: `S_(Σλ_i a_i) ≥ Σ λ_i S_(a_i)`.
pub(super) fn cor_2_7_mixture(t: &mut Trial) -> Result<()> {
    let d = t.dim;
    let rho = any_state(t)?;
    let m = t.rng().random_range(2..=4);
    let lambdas = random_simplex(m, t.rng());
    let effects = (0..m).map(|_| random_effect(d, t.rng())).collect::<Result<Vec<_>>>()?;
    t.record("rho", &rho);
    t.record("lambdas", &lambdas);
    t.record("effects", &effects);
    let mut mix = ComplexMatrix::zeros(d);
    for (w, e) in lambdas.iter().zip(&effects) {
        mix += &e.matrix().scale(*w);
    }
    let mix = Effect::new(mix)?;
    let weighted: f64 = lambdas
        .iter()
        .zip(&effects)
        .map(|(w, e)| Ok(w * s(e, &rho)?))
        .sum::<Result<f64>>()?;
    t.ge("S_(Σλa) ≥ Σ λ S_a", s(&mix, &rho)?, weighted);

    // Equality for proportional effects.
    let e = effect(t)?;
    let coeffs: Vec<f64> = (0..m).map(|_| t.rng().random_range(0.05..=1.0)).collect();
    let mut mix = ComplexMatrix::zeros(d);
    let mut weighted = 0.0;
    for (w, c) in lambdas.iter().zip(&coeffs) {
        let ai = e.scale(*c)?;
        mix += &ai.matrix().scale(*w);
        weighted += w * s(&ai, &rho)?;
    }
    t.eq("S_(Σλa) = Σ λ S_a for proportional a_i", s(&Effect::new(mix)?, &rho)?, weighted);
    Ok(())
}

pub(super) fn thm_2_8(t: &mut Trial) -> Result<()> {
    let a = effect(t)?;
    let m = t.rng().random_range(2..=4);
    let lambdas = random_simplex(m, t.rng());
    let states = (0..m).map(|_| any_state(t)).collect::<Result<Vec<_>>>()?;
    t.record("a", &a);
    t.record("lambdas", &lambdas);
    t.record("states", &states);
    let mix = State::mixture(&lambdas, &states)?;
    let weighted: f64 = lambdas
        .iter()
        .zip(&states)
        .map(|(w, r)| Ok(w * s(&a, r)?))
        .sum::<Result<f64>>()?;
    t.ge("S_a(Σλρ) ≥ Σ λ S_a(ρ)", s(&a, &mix)?, weighted);
    Ok(())
}

pub(super) fn thm_2_8_equality(t: &mut Trial) -> Result<()> {
    let d = t.dim;
    let a = effect(t)?;
    let rho0 = any_state(t)?;
    let v = a.matrix().hermitian_eig()?.eigenvectors;
    let m = t.rng().random_range(2..=4);
    let lambdas = random_simplex(m, t.rng());
    // ρ_i = D_i ρ₀ D_i† with D_i diagonal in the eigenbasis of a, so tr(ρ_i a) is constant.
    let mut states = Vec::with_capacity(m);
    for _ in 0..m {
        let phases: Vec<Complex64> = (0..d)
            .map(|_| Complex64::from_polar(1.0, t.rng().random_range(0.0..std::f64::consts::TAU)))
            .collect();
        let diag = ComplexMatrix::from_fn(d, |i, j| if i == j { phases[i] } else { Complex64::new(0.0, 0.0) });
        let di = &(&v * &diag) * &v.adjoint();
        states.push(State::new((&(&di * rho0.matrix()) * &di.adjoint()).hermitian_part())?);
    }
    t.record("a", &a);
    t.record("lambdas", &lambdas);
    t.record("states", &states);
    let p0 = p(&a, &states[0])?;
    for (i, r) in states.iter().enumerate().skip(1) {
        t.eq(&format!("tr(ρ_{i} a) = tr(ρ_0 a)"), p(&a, r)?, p0);
    }
    let mix = State::mixture(&lambdas, &states)?;
    let weighted: f64 = lambdas
        .iter()
        .zip(&states)
        .map(|(w, r)| Ok(w * s(&a, r)?))
        .sum::<Result<f64>>()?;
    t.eq("S_a(Σλρ) = Σ λ S_a(ρ)", s(&a, &mix)?, weighted);

    // Converse for two states: the gap is at least λ₁λ₂V²/(2 tr a).
    let (r1, r2) = (any_state(t)?, any_state(t)?);
    let l1: f64 = t.rng().random_range(0.1..0.9);
    let v = (p(&a, &r1)? - p(&a, &r2)?).abs();
    let bound = l1 * (1.0 - l1) * v * v / (2.0 * a.trace());
    if bound > 2.0 * t.tol {
        t.record("generic_states", &[&r1, &r2]);
        let mix = State::mixture(&[l1, 1.0 - l1], &[r1.clone(), r2.clone()])?;
        let weighted = l1 * s(&a, &r1)? + (1.0 - l1) * s(&a, &r2)?;
        t.gt_strict("S_a(Σλρ) > Σ λ S_a(ρ) when tr(ρ_i a) differ", s(&a, &mix)?, weighted);
    }
    Ok(())
}

pub(super) fn thm_2_9(t: &mut Trial) -> Result<()> {
    let d2 = 2 + t.index % 2;
    let (r1, a1) = (any_state(t)?, effect(t)?);
    let r2 = {
        let rank = t.rng().random_range(1..=d2);
        random_state(d2, rank, t.rng())?
    };
    let a2 = random_effect(d2, t.rng())?;
    t.record("rho1", &r1);
    t.record("a1", &a1);
    t.record("rho2", &r2);
    t.record("a2", &a2);
    let lhs = s(&a1.tensor(&a2), &r1.tensor(&r2))?;
    let (s1, s2) = (s(&a1, &r1)?, s(&a2, &r2)?);
    t.eq(
        "S_(a₁⊗a₂)(ρ₁⊗ρ₂) = tr(ρ₂a₂)S_a₁(ρ₁) + tr(ρ₁a₁)S_a₂(ρ₂)",
        lhs,
        p(&a2, &r2)? * s1 + p(&a1, &r1)? * s2,
    );
    t.le("S_(a₁⊗a₂)(ρ₁⊗ρ₂) ≤ S_a₁(ρ₁) + S_a₂(ρ₂)", lhs, s1 + s2);
    Ok(())
}

pub(super) fn thm_2_10_i(t: &mut Trial) -> Result<()> {
    let (op, a) = measuring_operation(t)?;
    let d = t.dim;
    let split = random_observable(d, 3, t.rng())?;
    let (b, c) = (split.outcomes()[0].effect.clone(), split.outcomes()[1].effect.clone());
    t.record("operation", &op);
    t.record("b", &b);
    t.record("c", &c);
    let lhs = sequential_product_effect(&op, &b.orthosum(&c)?)?;
    let rhs = sequential_product_effect(&op, &b)?.matrix() + sequential_product_effect(&op, &c)?.matrix();
    t.close("a∘(b+c) = a∘b + a∘c", lhs.matrix(), &rhs, t.tol);
    t.record("a", &a);
    Ok(())
}

pub(super) fn thm_2_10_ii(t: &mut Trial) -> Result<()> {
    let (op, a) = measuring_operation(t)?;
    t.record("operation", &op);
    let d = t.dim;
    let ai = sequential_product_effect(&op, &Effect::identity(d))?;
    t.close("a∘I = a", ai.matrix(), a.matrix(), t.tol);
    // The measured effect also reproduces tr ℐ(ρ).
    let rho = any_state(t)?;
    t.record("rho", &rho);
    t.eq("tr ℐ(ρ) = tr(ρa)", op.apply(rho.matrix())?.trace().re, p(&a, &rho)?);
    Ok(())
}

pub(super) fn thm_2_10_iii(t: &mut Trial) -> Result<()> {
    let (op, a) = measuring_operation(t)?;
    let b = effect(t)?;
    t.record("operation", &op);
    t.record("b", &b);
    let ab = op.apply_dual(b.matrix())?;
    t.psd("a∘b ≤ a", &(a.matrix() - &ab))?;
    Ok(())
}

pub(super) fn thm_2_10_iv(t: &mut Trial) -> Result<()> {
    let (op, a) = measuring_operation(t)?;
    let b = effect(t)?;
    let rho = any_state(t)?;
    t.record("operation", &op);
    t.record("b", &b);
    t.record("rho", &rho);
    let Ok(ab) = sequential_product_effect(&op, &b) else {
        t.skip("a∘b vanished");
        return Ok(());
    };
    t.le("S_(a∘b)(ρ) ≤ S_a(ρ)", s(&ab, &rho)?, s(&a, &rho)?);
    Ok(())
}

/// `|tr[ℐ(X)Y] − tr[Xℐ*(Y)]|` for random `X`, `Y`.
pub(super) fn duality_residual(t: &mut Trial, op: &Operation) -> Result<f64> {
    let d = t.dim;
    let x = ginibre_square(d, t.rng());
    let y = ginibre_square(d, t.rng());
    let lhs = trace_product(&op.apply(&x)?, &y);
    let rhs = trace_product(&x, &op.apply_dual(&y)?);
    Ok((lhs - rhs).norm())
}

pub(super) fn ex_1_luders(t: &mut Trial) -> Result<()> {
    let d = t.dim;
    let (a, b, rho) = (effect(t)?, effect(t)?, any_state(t)?);
    t.record("a", &a);
    t.record("b", &b);
    t.record("rho", &rho);
    let op = luders_operation(&a)?;
    let x = ginibre_square(d, t.rng());
    t.close("(ℒ^a)* = ℒ^a", &op.apply_dual(&x)?, &op.apply(&x)?, OPERATOR_TOL);
    let residual = duality_residual(t, &op)?;
    t.require("duality residual ≤ 1e-10", OPERATOR_TOL - residual);
    t.eq("tr ℒ^a(ρ) = tr(ρa)", op.apply(rho.matrix())?.trace().re, p(&a, &rho)?);

    let root = a.matrix().psd_sqrt()?;
    let direct = &(&root * b.matrix()) * &root;
    let ab = op.apply_dual(b.matrix())?;
    t.close("a∘b = a^{1/2} b a^{1/2}", &ab, &direct, OPERATOR_TOL);

    // S_(a∘b)(ρ) = −tr(a∘ρ b) ln[tr(a∘ρ b) / tr(ab)] with a∘ρ = a^{1/2}ρa^{1/2}.
    let a_rho = &(&root * rho.matrix()) * &root;
    let q = trace_product(&a_rho, b.matrix()).re;
    let v = trace_product(a.matrix(), b.matrix()).re;
    if ab.max_abs() > TOL_PSD {
        let ab = Effect::new(ab.hermitian_part())?;
        t.eq("S_(a∘b)(ρ) = −tr(a∘ρ b) ln[tr(a∘ρ b)/tr(ab)]", s(&ab, &rho)?, log_term(q, v));
    }
    Ok(())
}

pub(super) fn ex_2_holevo(t: &mut Trial) -> Result<()> {
    let (a, b, rho, alpha) = (effect(t)?, effect(t)?, any_state(t)?, any_state(t)?);
    t.record("a", &a);
    t.record("b", &b);
    t.record("rho", &rho);
    t.record("alpha", &alpha);
    let op = holevo_operation(&a, &alpha)?;
    let pr = p(&a, &rho)?;
    t.close("ℋ(ρ) = tr(ρa) α", &op.apply(rho.matrix())?, &alpha.matrix().scale(pr), OPERATOR_TOL);
    let tb = p(&b, &alpha)?;
    t.close("ℋ*(b) = tr(αb) a", &op.apply_dual(b.matrix())?, &a.matrix().scale(tb), OPERATOR_TOL);
    let residual = duality_residual(t, &op)?;
    t.require("duality residual ≤ 1e-10", OPERATOR_TOL - residual);
    t.eq("tr ℋ(ρ) = tr(ρa)", op.apply(rho.matrix())?.trace().re, pr);
    if let Ok(ab) = sequential_product_effect(&op, &b) {
        t.eq("S_(a∘b)(ρ) = tr(αb) S_a(ρ)", s(&ab, &rho)?, tb * s(&a, &rho)?);
    }
    Ok(())
}

pub(super) fn ex_2_chain(t: &mut Trial) -> Result<()> {
    let m = 2 + t.index % 3;
    let effects = (0..m).map(|_| effect(t)).collect::<Result<Vec<_>>>()?;
    let alphas = (0..m - 1).map(|_| any_state(t)).collect::<Result<Vec<_>>>()?;
    let rho = any_state(t)?;
    t.record("effects", &effects);
    t.record("alphas", &alphas);
    t.record("rho", &rho);

    // a₁∘(a₂∘(⋯∘a_m)) by iterated duals.
    let mut acc = effects[m - 1].matrix().clone();
    for k in (0..m - 1).rev() {
        acc = holevo_operation(&effects[k], &alphas[k])?.apply_dual(&acc)?;
    }
    let coefficient: f64 = alphas
        .iter()
        .zip(&effects[1..])
        .map(|(al, e)| p(e, al))
        .product::<Result<f64>>()?;
    t.close("iterated duals = Π tr(α_k a_(k+1)) · a₁", &acc, &effects[0].matrix().scale(coefficient), OPERATOR_TOL);
    let Ok(closed) = holevo_chain(&effects, &alphas) else {
        t.skip("chain coefficient vanished");
        return Ok(());
    };
    t.close("closed form = iterated duals", closed.matrix(), &acc, OPERATOR_TOL);
    t.eq("S_chain(ρ) = Π tr(α_k a_(k+1)) · S_a₁(ρ)", s(&closed, &rho)?, coefficient * s(&effects[0], &rho)?);
    Ok(())
}

/// Deliberately false: asserts `S_(a+b) ≤ S_a + S_b` strictly.
pub(super) fn canary(t: &mut Trial) -> Result<()> {
    let rho = any_state(t)?;
    let (a, b) = orthogonal_pair(t)?;
    t.record("rho", &rho);
    t.record("a", &a);
    t.record("b", &b);
    let lhs = s(&a.orthosum(&b)?, &rho)?;
    let rhs = s(&a, &rho)? + s(&b, &rho)?;
    t.require("S_(a+b) < S_a + S_b", rhs - lhs);
    Ok(())
}
