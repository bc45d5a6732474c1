//! The `SL(2,ℝ)` side of the dual pair `(Sp₂(ℝ), O_{p,p})` acting on
//! `M_{2,p}(ℝ)`: Casimir and Capelli operators, principal-series data,
//! orbital integrals, the continued model resolvent with its resonances, and
//! the `K`-type splitting of residue forms.

pub mod casimir;
pub mod group;
pub mod ktype;
pub mod model;
pub mod orbital;
pub mod testfn;

pub use casimir::{capelli_identity_check, casimir_operator, positive_capelli_operator, CapelliReport};
pub use group::{
    lambda_coth, lambda_tanh, plancherel_density, stable_range_table, CartanCoords, IwasawaCoords, KTypeBlock,
    PlancherelDensity, PrincipalSeriesLabel, SL2Element, StableRangeGroup, StableRangeRow, SubquotientLabel,
};
pub use ktype::{
    ktype_project, ktype_project_block, residue_form, KTypeConfig, KTypeTable, ResidueFormConfig, ResidueForms,
};
pub use model::{continued_model_resolvent, locate_resonances, model_resolvent, ModelConfig, ModelResolvent, Resonance};
pub use orbital::{f_epsilon, orbital_integral, GroupFunction, OrbitalConfig, OrbitalProfile};
pub use testfn::{psi_from_pair, psi_hermitian, ColumnProduct, DiskBump, PsiConfig, TestFunctionM2p};
