use super::dofmap::DofMap;
use super::factored::{FactoredMatrix, NO_WEIGHT};
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};
use crate::fitting::{FittingData, LogScaled};
use crate::mesh::{Mesh, Point};

/// `|e_i||e_j|/|K| (n_i . n_j)` for the outward normals of element `k`:
/// the integral of the product of two midpoint basis gradients.
pub fn element_geometry(mesh: &Mesh, k: usize) -> [[f64; 3]; 3] {
    let edges = mesh.element_edges(k);
    let len = edges.map(|e| mesh.edge(e).length);
    let n = [0, 1, 2].map(|i| mesh.outward_normal(k, i));
    let area = mesh.area(k);
    let mut g = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let v = len[i] * len[j] / area * (n[i][0] * n[j][0] + n[i][1] * n[j][1]);
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    g
}

fn check(mesh: &Mesh, fitting: &FittingData) -> Result<()> {
    if fitting.kappa_star.len() != mesh.n_elements() || fitting.d_side.len() != mesh.n_edges() {
        return Err(Error::InvalidArgument("fitting data was built on a different mesh".into()));
    }
    Ok(())
}

/// Term list of the fitted IIPG-0 form. With `weighted` each term also
/// carries the trial dof's edge weight, which turns A into B = A D.
pub fn factored_form(mesh: &Mesh, dofs: &DofMap, fitting: &FittingData, weighted: bool) -> Result<FactoredMatrix> {
    check(mesh, fitting)?;
    let n = dofs.n_dofs();
    let mut m = FactoredMatrix::new(n, n);
    let weight = |dof: usize| {
        if weighted {
            fitting.weight_index(dofs.edge(dof), dofs.side(dof))
        } else {
            NO_WEIGHT
        }
    };
    let geom: Vec<[[f64; 3]; 3]> = (0..mesh.n_elements()).map(|k| element_geometry(mesh, k)).collect();

    for (k, g) in geom.iter().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                let col = dofs.dof(k, j);
                m.push(dofs.dof(k, i), col, k, weight(col), g[i][j]);
            }
        }
    }

    for (e, edge) in mesh.edges().iter().enumerate() {
        // (element, local index, sign of n_e against its outward normal)
        let mut sides = vec![(edge.plus, mesh.local_index(edge.plus, e).unwrap(), 1.0)];
        if let Some(minus) = edge.minus {
            sides.push((minus, mesh.local_index(minus, e).unwrap(), -1.0));
        }
        let w = if edge.is_boundary() { 1.0 } else { 0.5 };
        let pen = fitting.alpha[e] * edge.length / fitting.h[e] * w;

        for &(kt, lt, st) in &sides {
            let row = dofs.dof(kt, lt);
            for &(kr, lr, sr) in &sides {
                for j in 0..3 {
                    let col = dofs.dof(kr, j);
                    m.push(row, col, kr, weight(col), -w * st * sr * geom[kr][lr][j]);
                }
                let col = dofs.dof(kr, lr);
                for &(owner, _, _) in &sides {
                    m.push(row, col, owner, weight(col), pen * st * sr);
                }
            }
        }
    }
    m.compress();
    Ok(m)
}

/// Matrix of the fitted diffusion form acting on `rho`.
pub fn assemble_a(mesh: &Mesh, dofs: &DofMap, fitting: &FittingData) -> Result<CsrMatrix<LogScaled>> {
    Ok(factored_form(mesh, dofs, fitting, false)?.evaluate(fitting))
}

/// Matrix of the fitted form acting on `u`, equal to `A D`; each term is
/// multiplied by its weight before anything is exponentiated.
pub fn assemble_b(mesh: &Mesh, dofs: &DofMap, fitting: &FittingData) -> Result<CsrMatrix<LogScaled>> {
    Ok(factored_form(mesh, dofs, fitting, true)?.evaluate(fitting))
}

/// Diagonal fitting operator.
pub fn assemble_d(mesh: &Mesh, dofs: &DofMap, fitting: &FittingData) -> Result<CsrMatrix<LogScaled>> {
    check(mesh, fitting)?;
    let n = dofs.n_dofs();
    let trip = (0..n).map(|d| (d, d, fitting.weight(dofs.edge(d), dofs.side(d)))).collect();
    Ok(CsrMatrix::from_triplets(n, n, trip))
}

/// Load vector: midpoint quadrature of `f` against each basis function plus
/// the weakly imposed Dirichlet data `S_e |e| d_e g(m_e)` on boundary dofs.
pub fn assemble_rhs(
    mesh: &Mesh,
    dofs: &DofMap,
    fitting: &FittingData,
    f: impl Fn(Point) -> f64,
    g: impl Fn(Point) -> f64,
) -> Result<Vec<LogScaled>> {
    check(mesh, fitting)?;
    let mut rhs = vec![LogScaled::ZERO; dofs.n_dofs()];
    for k in 0..mesh.n_elements() {
        let w = mesh.area(k) / 3.0;
        for i in 0..3 {
            let v = f(mesh.local_midpoint(k, i));
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!("source is not finite on element {k}")));
            }
            rhs[dofs.dof(k, i)] = LogScaled::from_f64(w * v);
        }
    }
    for (e, edge) in mesh.edges().iter().enumerate() {
        if !edge.is_boundary() {
            continue;
        }
        let gv = g(edge.midpoint);
        if !gv.is_finite() {
            return Err(Error::InvalidArgument(format!("boundary data is not finite on edge {e}")));
        }
        let d = dofs.edge_dofs(e)[0].unwrap();
        let bc = fitting.penalty[e] * fitting.d_side[e][0] * LogScaled::from_f64(edge.length * gv);
        rhs[d] = rhs[d] + bc;
    }
    Ok(rhs)
}
