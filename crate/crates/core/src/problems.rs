//! Benchmark problems `-div(eps grad u - beta u) = f` with `beta = grad psi`
//! and Dirichlet data `g`.

use std::fmt;
use std::sync::Arc;

use crate::assembly::ExactSolution;
use crate::error::{Error, Result};
use crate::fitting::{ElementPsi, FittingData, WeightMode};
use crate::mesh::{Mesh, Point, Rect};

pub type Field = Arc<dyn Fn(Point) -> f64 + Send + Sync>;

/// How the potential is specified.
#[derive(Clone)]
pub enum PsiSpec {
    /// A globally defined function, sampled at the vertices.
    Continuous(Field),
    /// `psi|_K = a x + b y` with `[a, b]` computed from the barycenter of `K`.
    ElementLinear(Arc<dyn Fn(Point) -> [f64; 2] + Send + Sync>),
    /// One value per mesh vertex.
    Tabulated(Vec<f64>),
}

impl PsiSpec {
    /// Carries tabulated values over to `parent.refine_red()`; the new
    /// midpoint vertices get the mean of their edge's endpoints.
    pub fn refine(&self, parent: &Mesh) -> PsiSpec {
        match self {
            PsiSpec::Tabulated(v) => {
                let mut out = v.clone();
                out.extend(parent.edges().iter().map(|e| 0.5 * (v[e.vertices[0]] + v[e.vertices[1]])));
                PsiSpec::Tabulated(out)
            }
            other => other.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Test2PsiVariant {
    /// `b_K = -2 x_K (1 - 2 y_K^2)`.
    #[default]
    Literal,
    /// `b_K = -2 x_K (1 - y_K^2)`, matching the second component of `beta`.
    Consistent,
}

#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub domain: Rect,
    pub epsilon: f64,
    pub alpha: f64,
    pub psi: PsiSpec,
    pub source: Field,
    pub boundary: Field,
    pub exact: Option<Arc<dyn ExactSolution + Send + Sync>>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("epsilon", &self.epsilon)
            .field("alpha", &self.alpha)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("epsilon must be positive, got {eps}")))
    }
}

impl ProblemSpec {
    /// Vertex values of `psi` element by element.
    pub fn psi_on(&self, mesh: &Mesh) -> Result<ElementPsi> {
        let vs = mesh.vertices();
        let (values, continuous) = match &self.psi {
            PsiSpec::Continuous(f) => (mesh.triangles().iter().map(|t| t.map(|v| f(vs[v]))).collect(), true),
            PsiSpec::ElementLinear(coef) => {
                let values = (0..mesh.n_elements())
                    .map(|k| {
                        let [a, b] = coef(mesh.barycenter(k));
                        mesh.triangles()[k].map(|v| a * vs[v][0] + b * vs[v][1])
                    })
                    .collect();
                (values, false)
            }
            PsiSpec::Tabulated(v) => {
                if v.len() != vs.len() {
                    return Err(Error::InvalidArgument(format!(
                        "psi table has {} values, mesh has {} vertices",
                        v.len(),
                        vs.len()
                    )));
                }
                (mesh.triangles().iter().map(|t| t.map(|i| v[i])).collect(), true)
            }
        };
        let psi = ElementPsi { values, continuous };
        if continuous && !psi.check_continuity(mesh) {
            return Err(Error::InvalidArgument("psi values differ at a shared vertex".into()));
        }
        if psi.values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("psi is not finite".into()));
        }
        Ok(psi)
    }

    pub fn fitting(&self, mesh: &Mesh, mode: WeightMode) -> Result<FittingData> {
        FittingData::build(mesh, &self.psi_on(mesh)?, self.epsilon, self.alpha, mode)
    }
}

/// `U(x) = x + (1 + e^{-2/eps} - 2 e^{(x-1)/eps}) / (1 - e^{-2/eps})` and
/// `U'(x)`, with every exponential kept at non-positive argument.
pub fn layer_factor(x: f64, eps: f64) -> (f64, f64) {
    let a = (x - 1.0) / eps;
    let ea = a.exp();
    let q1 = -(-2.0 / eps).exp_m1();
    let num = -a.exp_m1() + ea * (-(x + 1.0) / eps).exp_m1();
    (x + num / q1, 1.0 - 2.0 * ea / (eps * q1))
}

pub fn exact_u_test1(x: f64, y: f64, eps: f64) -> f64 {
    layer_factor(x, eps).0 * layer_factor(y, eps).0
}

/// Since `-eps U'' + U' = 1`, the source for `u = U(x) U(y)` is
/// `U(x) + U(y)`.
pub fn source_test1(x: f64, y: f64, eps: f64) -> f64 {
    layer_factor(x, eps).0 + layer_factor(y, eps).0
}

#[derive(Clone, Copy, Debug)]
pub struct Test1Exact {
    pub epsilon: f64,
}

impl ExactSolution for Test1Exact {
    fn value(&self, p: Point) -> f64 {
        exact_u_test1(p[0], p[1], self.epsilon)
    }

    fn gradient(&self, p: Point) -> [f64; 2] {
        let (ux, dux) = layer_factor(p[0], self.epsilon);
        let (uy, duy) = layer_factor(p[1], self.epsilon);
        [dux * uy, ux * duy]
    }
}

/// Linear field `a + b x + c y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearField(pub [f64; 3]);

impl ExactSolution for LinearField {
    fn value(&self, p: Point) -> f64 {
        self.0[0] + self.0[1] * p[0] + self.0[2] * p[1]
    }

    fn gradient(&self, _: Point) -> [f64; 2] {
        [self.0[1], self.0[2]]
    }
}

/// Boundary layer problem on `(-1,1)^2` with `beta = (1,1)`, `psi = x + y`.
pub fn test1(epsilon: f64) -> Result<ProblemSpec> {
    check_eps(epsilon)?;
    let exact = Test1Exact { epsilon };
    Ok(ProblemSpec {
        name: "test1".into(),
        domain: Rect::new(-1.0, 1.0, -1.0, 1.0),
        epsilon,
        alpha: 2.0,
        psi: PsiSpec::Continuous(Arc::new(|p: Point| p[0] + p[1])),
        source: Arc::new(move |p: Point| source_test1(p[0], p[1], epsilon)),
        boundary: Arc::new(move |p: Point| exact.value(p)),
        exact: Some(Arc::new(exact)),
    })
}

/// Coefficients `[a_K, b_K]` of `psi|_K = a_K x + b_K y` for the rotating
/// flow, given the barycenter.
pub fn test2_psi_coefficients(c: Point, variant: Test2PsiVariant) -> [f64; 2] {
    let (x, y) = (c[0], c[1]);
    let k = match variant {
        Test2PsiVariant::Literal => 2.0,
        Test2PsiVariant::Consistent => 1.0,
    };
    [2.0 * y * (1.0 - x * x), -2.0 * x * (1.0 - k * y * y)]
}

/// Inflow profile: `1 + tanh(10(2x+1))` on the bottom edge for `x <= 0`,
/// zero elsewhere.
pub fn test2_boundary(p: Point) -> f64 {
    if p[1].abs() <= 1e-12 && p[0] <= 0.0 {
        1.0 + (10.0 * (2.0 * p[0] + 1.0)).tanh()
    } else {
        0.0
    }
}

/// Rotating flow on `(-1,1) x (0,1)`; `psi` is linear per element.
pub fn test2(epsilon: f64, variant: Test2PsiVariant) -> Result<ProblemSpec> {
    check_eps(epsilon)?;
    Ok(ProblemSpec {
        name: "test2".into(),
        domain: Rect::new(-1.0, 1.0, 0.0, 1.0),
        epsilon,
        alpha: 2.0,
        psi: PsiSpec::ElementLinear(Arc::new(move |c| test2_psi_coefficients(c, variant))),
        source: Arc::new(|_| 0.0),
        boundary: Arc::new(test2_boundary),
        exact: None,
    })
}

/// Tabulated potential, constant source and linear boundary data. When
/// `g_is_exact` the linear `g` also serves as the exact solution.
pub fn custom(domain: Rect, epsilon: f64, psi: Vec<f64>, f: f64, g: [f64; 3], g_is_exact: bool) -> Result<ProblemSpec> {
    check_eps(epsilon)?;
    let lin = LinearField(g);
    Ok(ProblemSpec {
        name: "custom".into(),
        domain,
        epsilon,
        alpha: 2.0,
        psi: PsiSpec::Tabulated(psi),
        source: Arc::new(move |_| f),
        boundary: Arc::new(move |p| lin.value(p)),
        exact: if g_is_exact { Some(Arc::new(lin)) } else { None },
    })
}
