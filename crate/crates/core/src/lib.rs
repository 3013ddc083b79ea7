//! Exponentially fitted IIPG-0 discontinuous Galerkin discretization of
//! advection-dominated advection-diffusion problems on triangular meshes,
//! with an exact block solver.
//!
//! The pipeline is
//!
//! 1. [`mesh`]: build or load a conforming triangulation, refine it;
//! 2. [`fitting`]: edge and element means of `exp(-psi/eps)` in log form;
//! 3. [`assembly`]: the matrices `A`, `D` and `B = A D` and the load vector;
//! 4. [`splitting`]: change to the Crouzeix-Raviart plus jump basis, where
//!    `B` is block lower triangular with a diagonal leading block;
//! 5. [`scc_solver`]: solve the diagonal block, then run block Gauss-Seidel
//!    on the CR block ordered by its strongly connected components.
//!
//! [`experiment`] ties the steps together and writes the result tables.

pub mod assembly;
pub mod error;
pub mod experiment;
pub mod fitting;
pub mod mesh;
pub mod problems;
pub mod scc_solver;
pub mod splitting;

pub use error::{Error, Result};
