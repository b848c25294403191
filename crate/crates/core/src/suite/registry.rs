use super::{effects as e, models as m, observables as o, Trial};
use crate::error::{QmeError, Result};

pub type TrialFn = fn(&mut Trial) -> Result<()>;

/// A registered property: stable id, plain-language statement and trial body.
pub struct CheckSpec {
    pub id: &'static str,
    pub description: &'static str,
    pub run: TrialFn,
    /// False for checks that exist to exercise the harness.
    pub in_suite: bool,
}

const fn check(id: &'static str, description: &'static str, run: TrialFn) -> CheckSpec {
    CheckSpec {
        id,
        description,
        run,
        in_suite: true,
    }
}

static REGISTRY: &[CheckSpec] = &[
    check("thm-2.1-bounds", "S_a(ρ) lies between the spectral lower bound and ln[tr a / tr(ρa)]", e::thm_2_1_bounds),
    check("thm-2.1-upper-equality", "the upper bound is attained when tr(ρa) = 1 and is strict away from that case", e::thm_2_1_upper_equality),
    check("thm-2.1-equal-projection-case", "equal weights tr(P_i a) give S_a(ρ) = (tr a / m) ln m", e::thm_2_1_equal_projection_case),
    check("thm-2.2", "ρ-entropy is superadditive over orthogonal effects", e::thm_2_2),
    check("thm-2.2-equality", "superadditivity is tight exactly when tr(b)tr(ρa) = tr(a)tr(ρb)", e::thm_2_2_equality),
    check("cor-2.3", "S_a(ρ) + S_a′(ρ) ≤ ln n", e::cor_2_3),
    check("cor-2.3-equality", "S_a(ρ) + S_a′(ρ) = ln n exactly when tr a = n tr(ρa)", e::cor_2_3_equality),
    check("cor-2.4", "S_(a+b)(ρ) dominates both S_a(ρ) and S_b(ρ)", e::cor_2_4),
    check("cor-2.5", "ρ-entropy is monotone in the effect", e::cor_2_5),
    check("cor-2.6", "superadditivity over finite orthogonal families", e::cor_2_6),
    check("cor-2.7-scaling", "S_(λa)(ρ) = λ S_a(ρ)", e::cor_2_7_scaling),
    check("cor-2.7-mixture", "ρ-entropy of a convex combination of effects dominates the combination of entropies", e::cor_2_7_mixture),
    check("thm-2.8", "ρ-entropy is concave in the state", e::thm_2_8),
    check("thm-2.8-equality", "concavity is tight when all tr(ρ_i a) agree", e::thm_2_8_equality),
    check("thm-2.9", "product effects on product states: exact formula and subadditivity", e::thm_2_9),
    check("thm-2.10-i", "a∘(b + c) = a∘b + a∘c", e::thm_2_10_i),
    check("thm-2.10-ii", "a∘I = a", e::thm_2_10_ii),
    check("thm-2.10-iii", "a∘b ≤ a", e::thm_2_10_iii),
    check("thm-2.10-iv", "S_(a∘b)(ρ) ≤ S_a(ρ)", e::thm_2_10_iv),
    check("ex-1-luders", "Lüders operations are self-dual and give a∘b = a^{1/2} b a^{1/2}", e::ex_1_luders),
    check("ex-2-holevo", "Holevo operations give a∘b = tr(αb) a and scale the entropy by tr(αb)", e::ex_2_holevo),
    check("ex-2-chain", "Holevo chains collapse to a product of traces times a₁", e::ex_2_chain),
    check("eq-3.1", "every observable has entropy ln n in the maximally mixed state", o::eq_3_1),
    check("thm-3.1", "S(ρ) ≤ S_A(ρ) ≤ ln n", o::thm_3_1),
    check("cor-3.2-i", "for full-rank ρ, S_A(ρ) = ln n iff tr(A_x) tr(ρA_y) = tr(A_y) tr(ρA_x)", o::cor_3_2_i),
    check("cor-3.2-ii", "only trivial observables have entropy ln n in every state", o::cor_3_2_ii),
    check("cor-3.2-iii", "only I/n gives entropy ln n for every observable", o::cor_3_2_iii),
    check("cor-3.2-iv", "S(ρ) = ln n iff ρ = I/n", o::cor_3_2_iv),
    check("thm-3.3-i", "ρ-entropy is concave in the observable", o::thm_3_3_i),
    check("thm-3.3-ii", "observable ρ-entropy is concave in the state", o::thm_3_3_ii),
    check("thm-3.4", "coarse-graining never decreases ρ-entropy", o::thm_3_4),
    check("cor-3.5", "coarse-graining preserves entropy iff effects within each fiber are proportional", o::cor_3_5),
    check("cor-3.6", "S_(A∘B)(ρ) ≤ S_A(ρ)", o::cor_3_6),
    check("cor-3.6-holevo-equality", "Holevo instruments give S_(A∘B)(ρ) = S_A(ρ)", o::cor_3_6_holevo_equality),
    check("cor-3.7", "each further sequential stage can only lower the entropy", o::cor_3_7),
    check("instrument-entropy-def", "instrument entropy equals the entropy of the measured observable", o::instrument_entropy_def),
    check("instrument-composition", "composed instruments measure the sequential product of their observables", o::instrument_composition),
    check("lem-3.8", "S_(A⊗B)(ρ₁⊗ρ₂) = S_A(ρ₁) + S_B(ρ₂)", o::lem_3_8),
    check("luders-seqprod-form", "Lüders products have entries A_x^{1/2} B_y A_x^{1/2}", o::luders_seqprod_form),
    check("model-distribution", "a measurement model's observable reproduces the probe statistics", m::model_distribution),
    check("model-atomic-probe", "atomic or sharp probes give S_A(ρ) ≤ S_(I⊗P)[ν(ρ⊗σ)]", m::model_atomic_probe),
    check("eq-3.3-gap-identity", "S_(I⊗P)[ν(ρ⊗σ)] = S_A(ρ) − gap", m::eq_3_3_gap_identity),
    CheckSpec {
        id: "canary",
        description: "deliberately false: S_(a+b)(ρ) ≤ S_a(ρ) + S_b(ρ); must fail",
        run: e::canary,
        in_suite: false,
    },
];

/// Every registered check, including harness-only ones.
pub fn registry() -> &'static [CheckSpec] {
    REGISTRY
}

/// Ids run by the full suite, in registry order.
pub fn suite_ids() -> impl Iterator<Item = &'static str> {
    REGISTRY.iter().filter(|c| c.in_suite).map(|c| c.id)
}

pub fn lookup(id: &str) -> Result<&'static CheckSpec> {
    REGISTRY
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| QmeError::UnknownCheck(id.to_string()))
}
