pub mod linalg;
pub mod matrix;
pub mod poly;
pub mod ratfunc;
pub mod roots;

pub use linalg::{
    adjugate_poly, bareiss_det, char_poly, det_one_minus_z, solve_poly_system, spectral_radius,
    PolyMatrix, SpectralRadius,
};
pub use matrix::{solve_linear, Matrix};
pub use poly::Polynomial;
pub use ratfunc::RationalFunction;
pub use roots::{compare_smallest_roots, isolate_largest_real_root, isolate_smallest_real_root, RootInterval};
