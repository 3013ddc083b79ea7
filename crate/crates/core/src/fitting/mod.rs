//! Overflow-safe exponential fitting quantities.
//!
//! For `kappa = eps * exp(psi/eps)` every element carries the harmonic
//! average `kappa*_K = eps / mean_K(exp(-psi/eps))`, and every edge carries
//! the fitting weight `d_e = mean_e(exp(-psi/eps))` and the interior penalty
//! `S_e = alpha_e / h_e * avg(kappa*)`. All of them are stored as
//! [`LogScaled`] values.

mod log_scaled;
mod means;

pub use log_scaled::LogScaled;
pub use means::{edge_exp_mean, phi1, tri_exp_mean, tri_mean_shifted};

use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Piecewise linear potential given by its vertex values on each element.
#[derive(Clone, Debug)]
pub struct ElementPsi {
    /// Values at the three vertices of each triangle, in the mesh's local
    /// vertex order.
    pub values: Vec<[f64; 3]>,
    /// Whether shared vertices carry identical values across elements.
    pub continuous: bool,
}

impl ElementPsi {
    /// Values of `psi|_K` at the two endpoints of local edge `i`.
    pub fn edge_values(&self, k: usize, i: usize) -> (f64, f64) {
        let v = self.values[k];
        (v[(i + 1) % 3], v[(i + 2) % 3])
    }

    /// True when every vertex shared by several elements carries the same
    /// value in all of them.
    pub fn check_continuity(&self, mesh: &Mesh) -> bool {
        let mut at_vertex: Vec<Option<f64>> = vec![None; mesh.vertices().len()];
        for (k, t) in mesh.triangles().iter().enumerate() {
            for i in 0..3 {
                let v = self.values[k][i];
                match at_vertex[t[i]] {
                    None => at_vertex[t[i]] = Some(v),
                    Some(prev) if prev != v => return false,
                    _ => {}
                }
            }
        }
        true
    }
}

/// How the edge weight `d_e` is chosen when the two sides of an interior
/// edge disagree (discontinuous `psi`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    /// Arithmetic mean of the two one-sided values; keeps the fitting
    /// operator diagonal in the CR/Z basis.
    #[default]
    Mean,
    /// One value per side.
    Sided,
}

#[derive(Clone, Debug)]
pub struct FittingData {
    pub epsilon: f64,
    /// `kappa*_K` per element.
    pub kappa_star: Vec<LogScaled>,
    /// `psi_{m,K}` per element.
    pub psi_min_elem: Vec<f64>,
    /// One-sided `d_e` per edge, `[plus, minus]`; boundary edges repeat the
    /// plus value.
    pub d_side: Vec<[LogScaled; 2]>,
    /// One-sided `psi_{m,e}` per edge, same layout as `d_side`.
    pub psi_min_edge: Vec<[f64; 2]>,
    /// Penalty `S_e` per edge.
    pub penalty: Vec<LogScaled>,
    pub alpha: Vec<f64>,
    pub h: Vec<f64>,
    weights: Vec<LogScaled>,
    mode: WeightMode,
    continuous: bool,
}

impl FittingData {
    /// Builds all fitting quantities for a uniform penalty coefficient.
    pub fn build(mesh: &Mesh, psi: &ElementPsi, eps: f64, alpha: f64, mode: WeightMode) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
        }
        if !(alpha > 0.0) {
            return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
        }
        if psi.values.len() != mesh.n_elements() {
            return Err(Error::InvalidArgument(format!(
                "psi has {} elements, mesh has {}",
                psi.values.len(),
                mesh.n_elements()
            )));
        }
        let n_k = mesh.n_elements();
        let n_e = mesh.n_edges();
        let log_eps = LogScaled::from_f64(eps);

        let mut kappa_star = Vec::with_capacity(n_k);
        let mut psi_min_elem = Vec::with_capacity(n_k);
        for v in &psi.values {
            let mean = tri_exp_mean(v[0], v[1], v[2], eps)?;
            kappa_star.push(log_eps / mean);
            psi_min_elem.push(v[0].min(v[1]).min(v[2]));
        }

        let mut d_side = vec![[LogScaled::ZERO; 2]; n_e];
        let mut psi_min_edge = vec![[0.0; 2]; n_e];
        for k in 0..n_k {
            let edges = mesh.element_edges(k);
            let signs = mesh.element_signs(k);
            for i in 0..3 {
                let (a, b) = psi.edge_values(k, i);
                let d = edge_exp_mean(a, b, eps)?;
                let e = edges[i];
                let side = if signs[i] > 0.0 { 0 } else { 1 };
                d_side[e][side] = d;
                psi_min_edge[e][side] = a.min(b);
                if mesh.edge(e).is_boundary() {
                    d_side[e][1] = d;
                    psi_min_edge[e][1] = a.min(b);
                }
            }
        }

        let alpha_e = vec![alpha; n_e];
        let h: Vec<f64> = mesh.edges().iter().map(|e| e.length).collect();
        let half = LogScaled::from_f64(0.5);
        let penalty = mesh
            .edges()
            .iter()
            .enumerate()
            .map(|(e, edge)| {
                let avg = match edge.minus {
                    Some(m) => (kappa_star[edge.plus] + kappa_star[m]) * half,
                    None => kappa_star[edge.plus],
                };
                avg.scale(alpha_e[e] / h[e])
            })
            .collect();

        let continuous = psi.continuous;
        let weights = match mode {
            WeightMode::Mean => d_side
                .iter()
                .map(|[p, m]| if p == m { *p } else { (*p + *m) * half })
                .collect(),
            WeightMode::Sided => d_side.iter().flat_map(|s| s.iter().copied()).collect(),
        };

        Ok(FittingData {
            epsilon: eps,
            kappa_star,
            psi_min_elem,
            d_side,
            psi_min_edge,
            penalty,
            alpha: alpha_e,
            h,
            weights,
            mode,
            continuous,
        })
    }

    pub fn mode(&self) -> WeightMode {
        self.mode
    }

    pub fn is_continuous(&self) -> bool {
        self.continuous
    }

    /// True when every dof of an edge shares one weight, which is what keeps
    /// the fitting operator diagonal in the CR/Z basis.
    pub fn single_valued_weights(&self) -> bool {
        self.mode == WeightMode::Mean
    }

    /// Index into [`weights`](Self::weights) for the dof on `side` (0 = plus,
    /// 1 = minus) of edge `e`.
    pub fn weight_index(&self, e: usize, side: usize) -> usize {
        match self.mode {
            WeightMode::Mean => e,
            WeightMode::Sided => 2 * e + side,
        }
    }

    pub fn weights(&self) -> &[LogScaled] {
        &self.weights
    }

    pub fn weight(&self, e: usize, side: usize) -> LogScaled {
        self.weights[self.weight_index(e, side)]
    }

    /// Positivity, finiteness and `psi_{m,K} <= psi_{m,e}`.
    pub fn check_invariants(&self, mesh: &Mesh) -> Result<()> {
        let bad = |what: &str, i: usize| Err(Error::InvalidArgument(format!("fitting invariant violated: {what} at {i}")));
        for (k, v) in self.kappa_star.iter().enumerate() {
            if v.sign() != 1 || !v.is_finite() {
                return bad("kappa* not positive finite", k);
            }
        }
        for (e, (d, p)) in self.d_side.iter().zip(&self.penalty).enumerate() {
            if d.iter().any(|x| x.sign() != 1 || !x.is_finite()) {
                return bad("d_e not positive finite", e);
            }
            if p.sign() != 1 || !p.is_finite() {
                return bad("S_e not positive finite", e);
            }
            if self.continuous && d[0] != d[1] {
                return bad("one-sided d_e differ for continuous psi", e);
            }
        }
        for k in 0..mesh.n_elements() {
            let edges = mesh.element_edges(k);
            let signs = mesh.element_signs(k);
            for i in 0..3 {
                let side = if signs[i] > 0.0 { 0 } else { 1 };
                if self.psi_min_elem[k] > self.psi_min_edge[edges[i]][side] {
                    return bad("psi_{m,K} > psi_{m,e}", k);
                }
            }
        }
        Ok(())
    }
}
