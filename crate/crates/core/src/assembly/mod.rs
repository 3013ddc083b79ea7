//! Fitted IIPG-0 matrices in the midpoint (edge) basis.
//!
//! On element `K` the basis function of local edge `i` is `1` at that
//! edge's midpoint and `0` at the other two; its gradient is
//! `n_i |e_i| / |K|` with `n_i` the outward normal. All fitted matrices are
//! assembled in [`LogScaled`](crate::fitting::LogScaled) arithmetic.

mod dofmap;
mod factored;
mod forms;
mod solution;
mod sparse;

pub use dofmap::DofMap;
pub use factored::{FactoredMatrix, Term, NO_WEIGHT};
pub use forms::{assemble_a, assemble_b, assemble_d, assemble_rhs, element_geometry, factored_form};
pub use solution::{count_out_of_range, error_norms, error_norms_where, recover_u, DGSolution, ErrorNorms, ExactSolution};
pub use sparse::{CsrMatrix, Scalar, SparseMatrix};
