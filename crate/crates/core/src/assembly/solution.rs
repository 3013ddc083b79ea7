use super::dofmap::DofMap;
use crate::error::{Error, Result};
use crate::fitting::{FittingData, LogScaled};
use crate::mesh::{Mesh, Point};

/// A field with known value and gradient, used to measure errors.
pub trait ExactSolution {
    fn value(&self, p: Point) -> f64;
    fn gradient(&self, p: Point) -> [f64; 2];
}

/// Piecewise linear DG function stored by its midpoint values, indexed like
/// [`DofMap`].
#[derive(Clone, Debug, PartialEq)]
pub struct DGSolution {
    pub values: Vec<f64>,
}

impl DGSolution {
    pub fn new(values: Vec<f64>) -> Self {
        DGSolution { values }
    }

    /// Plain values; fails on the first entry outside the double range.
    pub fn from_log(values: &[LogScaled]) -> Result<Self> {
        let mut out = Vec::with_capacity(values.len());
        for (i, v) in values.iter().enumerate() {
            out.push(v.try_to_f64().ok_or_else(|| Error::Overflow(format!("u at dof {i}")))?);
        }
        Ok(DGSolution { values: out })
    }

    /// Plain values with out-of-range entries saturated to infinity.
    pub fn from_log_lossy(values: &[LogScaled]) -> Self {
        DGSolution {
            values: values.iter().map(|v| v.to_f64()).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Constant gradient on element `k`.
    pub fn gradient(&self, mesh: &Mesh, k: usize) -> [f64; 2] {
        let edges = mesh.element_edges(k);
        let area = mesh.area(k);
        let mut g = [0.0; 2];
        for i in 0..3 {
            let n = mesh.outward_normal(k, i);
            let s = self.values[3 * k + i] * mesh.edge(edges[i]).length / area;
            g[0] += s * n[0];
            g[1] += s * n[1];
        }
        g
    }

    /// Value of the element-`k` polynomial at `p`.
    pub fn eval(&self, mesh: &Mesh, k: usize, p: Point) -> f64 {
        let c = mesh.barycenter(k);
        let mean = (self.values[3 * k] + self.values[3 * k + 1] + self.values[3 * k + 2]) / 3.0;
        let g = self.gradient(mesh, k);
        mean + g[0] * (p[0] - c[0]) + g[1] * (p[1] - c[1])
    }

    /// Midpoint values of the elementwise interpolant of `f`.
    pub fn interpolate(mesh: &Mesh, f: impl Fn(Point) -> f64) -> Self {
        let mut values = vec![0.0; 3 * mesh.n_elements()];
        for k in 0..mesh.n_elements() {
            for i in 0..3 {
                values[3 * k + i] = f(mesh.local_midpoint(k, i));
            }
        }
        DGSolution { values }
    }
}

/// `u = rho / d` dof by dof, in log arithmetic. The result can exceed the
/// double range; see [`DGSolution::from_log`].
pub fn recover_u(rho: &[LogScaled], dofs: &DofMap, fitting: &FittingData) -> Result<Vec<LogScaled>> {
    rho.iter()
        .enumerate()
        .map(|(i, r)| {
            let d = fitting.weight(dofs.edge(i), dofs.side(i));
            if d.is_zero() {
                Err(Error::SingularOperator(i))
            } else {
                Ok(*r / d)
            }
        })
        .collect()
}

/// Number of entries whose magnitude does not fit in a double.
pub fn count_out_of_range(values: &[LogScaled]) -> usize {
    values.iter().filter(|v| v.try_to_f64().is_none()).count()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize)]
pub struct ErrorNorms {
    pub l2: f64,
    pub broken_h1: f64,
    pub midpoint_max: f64,
}

/// L2 and broken H1 errors by the edge-midpoint rule, and the largest
/// midpoint deviation.
pub fn error_norms(mesh: &Mesh, u: &DGSolution, exact: &dyn ExactSolution) -> ErrorNorms {
    error_norms_where(mesh, u, exact, |_| true)
}

/// Like [`error_norms`] restricted to a subdomain: integrals over elements
/// whose barycenter satisfies `keep`, the maximum over midpoints that do.
pub fn error_norms_where(mesh: &Mesh, u: &DGSolution, exact: &dyn ExactSolution, keep: impl Fn(Point) -> bool) -> ErrorNorms {
    let mut l2 = 0.0;
    let mut h1 = 0.0;
    let mut max: f64 = 0.0;
    for k in 0..mesh.n_elements() {
        let inside = keep(mesh.barycenter(k));
        let w = mesh.area(k) / 3.0;
        let gu = u.gradient(mesh, k);
        for i in 0..3 {
            let m = mesh.local_midpoint(k, i);
            let diff = u.values[3 * k + i] - exact.value(m);
            if keep(m) {
                max = max.max(diff.abs());
            }
            if inside {
                let ge = exact.gradient(m);
                l2 += w * diff * diff;
                h1 += w * ((gu[0] - ge[0]).powi(2) + (gu[1] - ge[1]).powi(2));
            }
        }
    }
    ErrorNorms {
        l2: l2.sqrt(),
        broken_h1: h1.sqrt(),
        midpoint_max: max,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{Diagonal, Rect};

    struct Linear(f64, f64, f64);
    impl ExactSolution for Linear {
        fn value(&self, p: Point) -> f64 {
            self.0 + self.1 * p[0] + self.2 * p[1]
        }
        fn gradient(&self, _: Point) -> [f64; 2] {
            [self.1, self.2]
        }
    }

    #[test]
    fn norms_of_interpolant_and_shift() {
        let mesh = Mesh::generate_rect(Rect::new(0.0, 1.0, 0.0, 2.0), 3, 3, Diagonal::NW).unwrap();
        let ex = Linear(0.5, 2.0, -1.0);
        let u = DGSolution::interpolate(&mesh, |p| ex.value(p));
        let n = error_norms(&mesh, &u, &ex);
        assert!(n.l2 < 1e-14 && n.broken_h1 < 1e-13 && n.midpoint_max < 1e-15);
        let shifted = Linear(0.75, 2.0, -1.0);
        let n = error_norms(&mesh, &u, &shifted);
        assert!((n.midpoint_max - 0.25).abs() < 1e-15);
        assert!(n.broken_h1 < 1e-13);
        assert!((n.l2 - 0.25 * 2f64.sqrt()).abs() < 1e-14);
        assert!((u.eval(&mesh, 4, [0.4, 0.9]) - ex.value([0.4, 0.9])).abs() < 1e-14);
    }
}
