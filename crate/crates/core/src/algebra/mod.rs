//! Exact arithmetic: group elements of `Z^m`, big-integer matrices, sparse
//! multivariate Laurent polynomials and integer lattice normal forms.

mod group;
mod lattice;
mod laurent;
mod matrix;

pub use group::GroupElement;
pub use lattice::{
    hermite_normal_form, in_lattice, integer_kernel, invariant_factors, HermiteForm,
};
pub use laurent::{LaurentMatrix, LaurentPolynomial};
pub use matrix::IntegerMatrix;
