//! Polarized Hodge structures and the complex tori built from them.
//!
//! A [`HodgeStructure`] is stored by explicit bases of its `(p, q)` pieces.
//! Odd weight gives a complex torus through [`weil_jacobian`], even weight
//! through [`even_to_weight_one`]. [`LefschetzModule`] covers the primitive
//! decomposition and the Riemann form of a Kähler class, and the `etau`
//! functions reproduce the periods of `E_τ × E_τ`.

mod etau;
mod lefschetz;
mod structure;

pub use etau::{
    determinant_closed_form, etau_build, nonholomorphy_probe, plucker_ratio,
    plucker_ratio_closed_form, printed_second_plucker, second_plucker_closed_form,
    wirtinger_derivatives, EtauFixture, FIRST_PLUCKER_COLUMNS, SECOND_PLUCKER_COLUMNS,
};
pub use lefschetz::{torus_module, LefschetzModule, PrimitiveComponent};
pub use structure::{
    check_riemann, curve_polarization, even_to_weight_one, weight_one_curve, weil_jacobian,
    EvenWeightTorus, HodgePiece, HodgeStructure, PolarizationForm, RiemannCheck, WeilJacobian,
    WeilOperator,
};
