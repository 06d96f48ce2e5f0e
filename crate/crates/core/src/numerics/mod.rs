//! Exact integer linear algebra, Laurent polynomial arithmetic and complex
//! root finding.

pub mod cpoly;
pub mod intmat;
pub mod laurent;

pub use cpoly::{char_poly, distinct_roots, dilatation_root, roots, spectral_radius, CMatrix};
pub use intmat::{hermite_rows, integer_nullspace, saturate_rows, smith_normal_form, IntMatrix, Smith};
pub use laurent::{LaurentMatrix, LaurentPoly};
