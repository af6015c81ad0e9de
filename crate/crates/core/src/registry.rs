//! Lookup of bounds by their stable identifiers.

use crate::bounds::{
    born_beta_estimate, bound_case1_dispersion, bound_case2, bound_case2_closed, bound_case3_optimal,
    bound_case4_optimal, general_bound, wkb_estimate, AuxiliaryChoice, BoundKind, BoundResult, BoundSet,
};
use crate::error::{Error, Result};
use crate::millergood::{
    delta_param_optimal, improved_bound, low_energy_bound, schwarzian_bound, wkb_like_bound, MgBoundChoice, MgForm,
};
use crate::model::Dispersion;
use crate::quadrature::QuadratureConfig;

/// Every identifier `evaluate` understands, in output order.
pub const BOUND_IDS: &[&str] = &[
    "born-estimate",
    "case1",
    "case2",
    "case2a",
    "case2b",
    "case2c",
    "case3",
    "case4",
    "delta-param",
    "general",
    "low-energy",
    "mg-form1",
    "mg-form2",
    "mg-form3",
    "schwarzian",
    "wkb-estimate",
    "wkb-like",
];

pub fn is_known(id: &str) -> bool {
    BOUND_IDS.contains(&id)
}

/// The default auxiliary function for the open-ended bounds: `h = max(k, k0)`
/// with `k0` half the smaller asymptotic wavenumber.
pub fn default_auxiliary(d: &Dispersion) -> AuxiliaryChoice {
    AuxiliaryChoice::MaxClamp(0.5 * d.k_minus.min(d.k_plus))
}

fn set_for(id: &str, d: &Dispersion, quad: &QuadratureConfig) -> Result<BoundSet> {
    let form = |f| improved_bound(d, &MgBoundChoice::plain(default_auxiliary(d)), f, quad);
    match id {
        "general" => general_bound(d, &default_auxiliary(d), quad),
        "case1" => bound_case1_dispersion(d, quad),
        "case2" => bound_case2(d, quad),
        "case2a" | "case2b" | "case2c" => bound_case2_closed(d, id),
        "case3" => bound_case3_optimal(d, quad),
        "case4" => bound_case4_optimal(d, quad),
        "mg-form1" => form(MgForm::Form1),
        "mg-form2" => form(MgForm::Form2),
        "mg-form3" => form(MgForm::Form3),
        "schwarzian" => schwarzian_bound(d, quad),
        "low-energy" => low_energy_bound(d, quad),
        "wkb-like" => wkb_like_bound(d, quad),
        "delta-param" => delta_param_optimal(d, quad),
        _ => Err(Error::InvalidParameter(format!("unknown bound id {id}"))),
    }
}

fn estimate(id: &str, value: Result<f64>) -> BoundResult {
    match value {
        Ok(v) => {
            let mut r = BoundResult::new(BoundKind::EstimateT, id, v, f64::NAN, 0.0);
            r.estimate = true;
            r
        }
        Err(e) => {
            let mut r = BoundResult::invalid(BoundKind::EstimateT, id, e.to_string());
            r.estimate = true;
            r
        }
    }
}

/// All rows produced by bound `id` on `d`. Unmet preconditions and numerical
/// failures become invalid rows carrying the reason; only an unknown id is an error.
pub fn evaluate(id: &str, d: &Dispersion, quad: &QuadratureConfig) -> Result<Vec<BoundResult>> {
    if !is_known(id) {
        return Err(Error::InvalidParameter(format!("unknown bound id {id}")));
    }
    Ok(match id {
        "wkb-estimate" => vec![estimate(id, wkb_estimate(d, quad))],
        "born-estimate" => {
            let t = born_beta_estimate(d, quad).map(|b| 1.0 / (1.0 + b.norm_sqr()));
            vec![estimate(id, t)]
        }
        _ => match set_for(id, d, quad) {
            Ok(set) => set.into_vec(),
            Err(e) => [BoundKind::LowerT, BoundKind::UpperR, BoundKind::UpperAbsAlpha, BoundKind::UpperAbsBeta]
                .into_iter()
                .map(|k| BoundResult::invalid(k, id, e.to_string()))
                .collect(),
        },
    })
}

/// Identifiers whose preconditions hold on `d` (estimates included).
pub fn applicable(d: &Dispersion, quad: &QuadratureConfig) -> Vec<&'static str> {
    BOUND_IDS
        .iter()
        .copied()
        .filter(|id| evaluate(id, d, quad).is_ok_and(|rows| rows.iter().any(|r| r.valid)))
        .collect()
}
