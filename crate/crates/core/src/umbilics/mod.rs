//! Umbilical points of the curvature-line foliation.
//!
//! The traceless part of the shape operator in an h-orthonormal frame gives
//! the planar field `𝓑 = (b11 - b22, 2 b12)`. Its zeros are the umbilics, and
//! its winding number around an isolated zero is twice the index of the
//! curvature-line foliation there.

mod census;
mod classify;
mod field;
mod index;
mod search;

pub use census::{check_coverage, umbilic_census, CensusRegion, CensusReport, CensusUmbilic};
pub use classify::{
    characterized_order, classify_umbilic, jet_identity_check, max_structure_order,
    order_characterization_check, umbilic_order, ClassifyOptions, JetIdentity, UmbilicReport,
    LOCATED_ORDER_TOL, ORDER_TOL,
};
pub use field::{
    b_and_p_jets, b_field, b_field_from, b_field_jets, b_field_sample, p_field_base_order,
    rotated_b_field, shape_floor, umbilic_eigenvalue, PField,
};
pub use index::{
    hessian_deviator, hessian_deviator_index, semi_homogeneity, stable_index, winding_index,
    winding_number, HomogeneousField, SemiHomogeneity,
};
pub use search::{
    find_umbilics, param_distance, param_offset, SearchOptions, UmbilicCandidate, UmbilicRegion,
    UmbilicSearch,
};
