//! Periodic lattice, fields, Fourier multipliers and norms.

mod field;
mod lattice;
mod norm;
mod ops;
mod snapshot;
pub mod symbol;

pub use field::{
    CField, ComplexField, GridField, RField, ScalarField, Spectra, SpinorField, TwoSpinorField,
    VectorField,
};
pub(crate) use field::{check_same, modewise};
pub use lattice::Lattice;
pub use norm::{h1_norm, l2_norm, lp_norm, sobolev_norm};
pub use ops::{
    apply_matrix_symbol, apply_symbol, curl, divergence, divergence_defect, dyadic_range, gradient,
    h_eps, lambda_eps, leray_project, littlewood_paley, low_high_split, partial, poisson_solve,
    spinor_gradient,
};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot, SnapshotHeader};
pub use symbol::{MatrixSymbol, SymbolSpec};
