//! Change of basis from the DG midpoint basis to the Crouzeix-Raviart plus
//! jump (Z) basis.
//!
//! On an interior edge with dofs `u+`, `u-` the CR coefficient is
//! `(u+ + u-)/2` and the Z coefficient `(u+ - u-)/2`, with basis functions
//! `phi+ + phi-` and `phi+ - phi-`. A boundary dof is its own Z function. Z
//! indices coincide with edge indices; CR indices number the interior edges
//! in edge order. In the split ordering Z comes first.

use crate::assembly::{CsrMatrix, DofMap, FactoredMatrix, Scalar};
use crate::error::{Error, Result};
use crate::fitting::{FittingData, LogScaled};
use crate::mesh::Mesh;

/// Relative size of the (z-row, cr-column) block above which the split is
/// treated as broken.
pub const STRUCTURE_TOL: f64 = 1e-13;

#[derive(Clone, Debug)]
pub struct SplitTransform {
    edge_dofs: Vec<[Option<usize>; 2]>,
    edge_cr: Vec<Option<usize>>,
    cr_edge: Vec<usize>,
    dof_images: Vec<[(usize, f64); 2]>,
    n_dg: usize,
}

impl SplitTransform {
    pub fn new(mesh: &Mesh, dofs: &DofMap) -> Self {
        let n_e = mesh.n_edges();
        let mut edge_cr = vec![None; n_e];
        let mut cr_edge = Vec::with_capacity(mesh.n_interior_edges());
        for (e, edge) in mesh.edges().iter().enumerate() {
            if !edge.is_boundary() {
                edge_cr[e] = Some(cr_edge.len());
                cr_edge.push(e);
            }
        }
        let edge_dofs: Vec<_> = (0..n_e).map(|e| dofs.edge_dofs(e)).collect();
        let mut dof_images = vec![[(usize::MAX, 0.0); 2]; dofs.n_dofs()];
        for d in 0..dofs.n_dofs() {
            let e = dofs.edge(d);
            let zs = if dofs.side(d) == 0 { 1.0 } else { -1.0 };
            dof_images[d][0] = (e, zs);
            if let Some(c) = edge_cr[e] {
                dof_images[d][1] = (n_e + c, 1.0);
            }
        }
        SplitTransform {
            edge_dofs,
            edge_cr,
            cr_edge,
            dof_images,
            n_dg: dofs.n_dofs(),
        }
    }

    pub fn n_dg(&self) -> usize {
        self.n_dg
    }

    pub fn n_cr(&self) -> usize {
        self.cr_edge.len()
    }

    pub fn n_z(&self) -> usize {
        self.edge_dofs.len()
    }

    /// Edge carrying CR index `c`.
    pub fn cr_edge(&self, c: usize) -> usize {
        self.cr_edge[c]
    }

    pub fn cr_index(&self, e: usize) -> Option<usize> {
        self.edge_cr[e]
    }

    /// Images of DG dof `d` in the split ordering (z first, then cr), as
    /// `(index, coefficient)` pairs of the basis change matrix `P`.
    pub fn images(&self, d: usize) -> Vec<(usize, f64)> {
        self.dof_images[d].iter().copied().filter(|&(i, _)| i != usize::MAX).collect()
    }

    /// DG coefficients to `(cr, z)` coefficients.
    pub fn to_split(&self, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut z = vec![0.0; self.n_z()];
        let mut cr = vec![0.0; self.n_cr()];
        for (e, [p, m]) in self.edge_dofs.iter().enumerate() {
            let up = u[p.unwrap()];
            match m {
                Some(m) => {
                    let um = u[*m];
                    z[e] = 0.5 * (up - um);
                    cr[self.edge_cr[e].unwrap()] = 0.5 * (up + um);
                }
                None => z[e] = up,
            }
        }
        (cr, z)
    }

    /// `(cr, z)` coefficients back to DG coefficients.
    pub fn from_split<T: Scalar>(&self, cr: &[T], z: &[T]) -> Vec<T> {
        let mut u = vec![T::zero(); self.n_dg];
        for (e, [p, m]) in self.edge_dofs.iter().enumerate() {
            match (p, m) {
                (Some(p), Some(m)) => {
                    let c = cr[self.edge_cr[e].unwrap()];
                    u[*p] = c.plus(z[e]);
                    u[*m] = c.plus(z[e].times(-1.0));
                }
                (Some(p), None) => u[*p] = z[e],
                _ => unreachable!("edge without plus dof"),
            }
        }
        u
    }

    /// `P^T f` split into `(cr, z)` parts.
    pub fn transform_rhs<T: Scalar>(&self, f: &[T]) -> (Vec<T>, Vec<T>) {
        let mut z = Vec::with_capacity(self.n_z());
        let mut cr = vec![T::zero(); self.n_cr()];
        for (e, [p, m]) in self.edge_dofs.iter().enumerate() {
            let fp = f[p.unwrap()];
            match m {
                Some(m) => {
                    let fm = f[*m];
                    z.push(fp.plus(fm.times(-1.0)));
                    cr[self.edge_cr[e].unwrap()] = fp.plus(fm);
                }
                None => z.push(fp),
            }
        }
        (cr, z)
    }
}

/// What to do when the (z-row, cr-column) block is not negligible.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum StructureCheck {
    #[default]
    Enforce,
    /// Keep going and record the magnitude; used for discontinuous `psi`.
    Record,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize)]
pub struct StructureReport {
    /// `max |M_{z,cr}| / max |M|`.
    pub top_right_rel: f64,
    /// Largest off-diagonal of the zz block relative to `max |M|`.
    pub zz_offdiag_rel: f64,
    pub zz_positive: bool,
}

/// `P^T M P` cut into its four blocks.
#[derive(Clone, Debug)]
pub struct BlockSystem<T> {
    pub zz: CsrMatrix<T>,
    /// Top-right block: z rows, cr columns.
    pub zv: CsrMatrix<T>,
    pub vz: CsrMatrix<T>,
    pub vv: CsrMatrix<T>,
    pub structure: StructureReport,
}

impl<T: Scalar> BlockSystem<T> {
    pub fn zz_diagonal(&self) -> Vec<T> {
        (0..self.zz.nrows()).map(|i| self.zz.get(i, i)).collect()
    }

    fn from_full(full: CsrMatrix<T>, n_z: usize, n_cr: usize, rel: impl Fn(T) -> f64, positive: impl Fn(T) -> bool) -> Self {
        let z: Vec<usize> = (0..n_z).collect();
        let c: Vec<usize> = (n_z..n_z + n_cr).collect();
        let zz = full.submatrix(&z, &z);
        let zv = full.submatrix(&z, &c);
        let vz = full.submatrix(&c, &z);
        let vv = full.submatrix(&c, &c);
        let top_right_rel = zv.iter().map(|(_, _, v)| rel(v)).fold(0.0, f64::max);
        let zz_offdiag_rel = zz.iter().filter(|(i, j, _)| i != j).map(|(_, _, v)| rel(v)).fold(0.0, f64::max);
        let zz_positive = (0..n_z).all(|i| positive(zz.get(i, i)));
        BlockSystem {
            zz,
            zv,
            vz,
            vv,
            structure: StructureReport {
                top_right_rel,
                zz_offdiag_rel,
                zz_positive,
            },
        }
    }
}

fn full_transform(matrix: &CsrMatrix<f64>, t: &SplitTransform) -> CsrMatrix<f64> {
    let mut trip = Vec::new();
    for (i, j, v) in matrix.iter() {
        for (r, a) in t.images(i) {
            for (c, b) in t.images(j) {
                trip.push((r, c, v * a * b));
            }
        }
    }
    CsrMatrix::from_triplets(t.n_dg(), t.n_dg(), trip)
}

/// Splits an already evaluated matrix. No structure is enforced; the report
/// says how far the result is from block lower triangular.
pub fn split_matrix(matrix: &CsrMatrix<f64>, t: &SplitTransform) -> BlockSystem<f64> {
    let full = full_transform(matrix, t);
    let max = matrix.max_abs();
    let rel = |v: f64| if max > 0.0 { v.abs() / max } else { 0.0 };
    BlockSystem::from_full(full, t.n_z(), t.n_cr(), rel, |v| v > 0.0)
}

/// Splits a fitted matrix kept in factored form, so algebraic cancellations
/// are exact, then evaluates it.
pub fn split_factored(
    matrix: &FactoredMatrix,
    fitting: &FittingData,
    t: &SplitTransform,
    check: StructureCheck,
) -> Result<BlockSystem<LogScaled>> {
    let n = t.n_dg();
    let split = matrix.transform(n, n, |i| t.images(i), |j| t.images(j));
    let full = split.evaluate(fitting);
    let max = matrix.evaluate(fitting).max_abs();
    let rel = |v: LogScaled| if max.is_zero() { 0.0 } else { (v.abs() / max).to_f64() };
    let sys = BlockSystem::from_full(full, t.n_z(), t.n_cr(), rel, |v| v.sign() == 1);
    let worst = sys.structure.top_right_rel.max(sys.structure.zz_offdiag_rel);
    if check == StructureCheck::Enforce && worst > STRUCTURE_TOL {
        return Err(Error::StructureViolation {
            log_top_right: worst.ln() + max.log_mag(),
            log_max: max.log_mag(),
            tol: STRUCTURE_TOL,
        });
    }
    Ok(sys)
}

/// Step 1 of the two-step solve: the zz block is diagonal and positive, so
/// `z = rhs_z / diag`, computed in log arithmetic.
pub fn solve_zz(diag: &[LogScaled], rhs_z: &[LogScaled]) -> Result<Vec<LogScaled>> {
    diag.iter()
        .zip(rhs_z)
        .enumerate()
        .map(|(i, (d, r))| {
            if d.sign() != 1 {
                Err(Error::NotPositiveDefinite(i))
            } else {
                Ok(*r / *d)
            }
        })
        .collect()
}
