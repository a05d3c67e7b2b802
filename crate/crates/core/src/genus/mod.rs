//! Exact characteristic-class algebra: multiplicative sequences, `Â`, the
//! Chern character, Pontryagin classes, and twisted K-theoretic pairings on
//! finite ring models. No floating point is used anywhere in this module.

pub mod poly;
pub mod ring;
pub mod series;

pub use poly::{Monomial, Polynomial, Var, VarKind};
pub use ring::{
    a_hat_in_ring, cp3, cp3_tangent_chern, evaluate_in_ring, is_normalized_multiplier,
    line_bundle_ch, torus, twisted_k_pairing, unimodularity_report, BasisElement,
    CohomologyRingModel, RingElement, UnimodularityReport,
};
pub use series::{
    a_hat_q_coefficients, a_hat_series, a_hat_total, chern_character, complexify, pontryagin,
    q_series_for_p, q_series_in, PowerSeriesQ,
};
