//! Central extensions of finite groups.

pub mod cohomology;
pub mod finite;
pub mod smooth;
pub mod table;
pub mod verify;

pub use cohomology::{
    averaging_homotopy, coboundary_values, is_coboundary, solve_elimination, solve_exhaustive, solve_mod,
    CoboundaryVerdict, ModCochain, EXHAUSTIVE_LIMIT,
};
pub use finite::FiniteCentralExtension;
pub use table::FiniteGroupTable;
pub use smooth::discrete_model;
pub use verify::{exact_cocycle, real_vanishing, shifted_section, verify_coboundary, verify_tables};
