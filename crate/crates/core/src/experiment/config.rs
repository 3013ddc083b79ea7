use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitting::WeightMode;
use crate::mesh::{Diagonal, Mesh, Point, Rect};
use crate::problems::{self, ProblemSpec, PsiSpec, Test2PsiVariant};
use crate::scc_solver::SolverOptions;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    #[default]
    Test1,
    Test2,
    Custom,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Test1 => "test1",
            ProblemKind::Test2 => "test2",
            ProblemKind::Custom => "custom",
        }
    }

    /// Domain of the built-in problems and of the default custom setup.
    pub fn default_bounds(self) -> Rect {
        match self {
            ProblemKind::Test2 => Rect::new(-1.0, 1.0, 0.0, 1.0),
            _ => Rect::new(-1.0, 1.0, -1.0, 1.0),
        }
    }

    /// Coarse grid `(nx, ny)`: 112 triangles for Test 1, 224 for Test 2.
    pub fn default_grid(self) -> (usize, usize) {
        match self {
            ProblemKind::Test2 => (16, 7),
            _ => (8, 7),
        }
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "test1" => Ok(ProblemKind::Test1),
            "test2" => Ok(ProblemKind::Test2),
            "custom" => Ok(ProblemKind::Custom),
            _ => Err(Error::Config(format!("unknown problem '{s}' (expected test1, test2 or custom)"))),
        }
    }
}

/// Coarse mesh: a file, or a structured grid on `bounds` (default: the
/// problem's domain).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshSource {
    pub file: Option<PathBuf>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub diagonal: Diagonal,
    /// `[x0, x1, y0, y1]`.
    pub bounds: Option<[f64; 4]>,
}

impl Default for MeshSource {
    fn default() -> Self {
        MeshSource {
            file: None,
            nx: None,
            ny: None,
            diagonal: Diagonal::NE,
            bounds: None,
        }
    }
}

/// Potential of a custom problem: a built-in by name or one value per
/// coarse-mesh vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CustomPsi {
    Named(String),
    Table(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CustomProblem {
    pub psi: CustomPsi,
    /// Constant source.
    pub f: f64,
    /// Boundary data `g = a + b x + c y`.
    pub g: [f64; 3],
    /// Also use `g` as the exact solution; only meaningful when it solves
    /// the problem, e.g. constant `psi` and `f = 0`.
    pub g_is_exact: bool,
}

impl Default for CustomProblem {
    fn default() -> Self {
        CustomProblem {
            psi: CustomPsi::Named("zero".into()),
            f: 0.0,
            g: [1.0, 0.0, 0.0],
            g_is_exact: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputToggles {
    pub stats: bool,
    pub errors: bool,
    pub matrices: bool,
    pub svg: bool,
    pub partition: bool,
}

impl Default for OutputToggles {
    fn default() -> Self {
        OutputToggles {
            stats: true,
            errors: true,
            matrices: false,
            svg: false,
            partition: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub eps: Vec<f64>,
    /// Refinement levels; `1` is the coarse mesh.
    pub levels: Vec<usize>,
    pub mesh: MeshSource,
    pub alpha: f64,
    pub solver: SolverOptions,
    pub weight_mode: WeightMode,
    pub test2_psi_variant: Test2PsiVariant,
    pub custom: CustomProblem,
    pub out: PathBuf,
    pub outputs: OutputToggles,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            problem: ProblemKind::Test1,
            eps: vec![1e-5],
            levels: vec![1],
            mesh: MeshSource::default(),
            alpha: 2.0,
            solver: SolverOptions::default(),
            weight_mode: WeightMode::Mean,
            test2_psi_variant: Test2PsiVariant::Literal,
            custom: CustomProblem::default(),
            out: PathBuf::from("out"),
            outputs: OutputToggles::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse("experiment config", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.eps.is_empty() {
            return Err(Error::Config("eps list is empty".into()));
        }
        if let Some(e) = self.eps.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return Err(Error::Config(format!("eps values must be positive, got {e}")));
        }
        if self.levels.is_empty() {
            return Err(Error::Config("levels list is empty".into()));
        }
        if self.levels.iter().enumerate().any(|(i, &j)| j != i + 1) {
            return Err(Error::Config(format!("levels must be 1, 2, ..., n; got {:?}", self.levels)));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Config(format!("alpha must be positive, got {}", self.alpha)));
        }
        let s = &self.solver;
        if !(s.tau >= 0.0 && s.tau < 1.0) {
            return Err(Error::Config(format!("tau must lie in [0, 1), got {}", s.tau)));
        }
        if !(s.tol > 0.0) || s.max_sweeps == 0 || s.block_limit == 0 {
            return Err(Error::Config("solver tol, max_sweeps and block_limit must be positive".into()));
        }
        if let (Some(0), _) | (_, Some(0)) = (self.mesh.nx, self.mesh.ny) {
            return Err(Error::Config("mesh nx and ny must be positive".into()));
        }
        Ok(())
    }

    pub fn bounds(&self) -> Rect {
        match self.mesh.bounds {
            Some([x0, x1, y0, y1]) => Rect::new(x0, x1, y0, y1),
            None => self.problem.default_bounds(),
        }
    }

    /// The `J = 1` mesh.
    pub fn coarse_mesh(&self) -> Result<Mesh> {
        if let Some(path) = &self.mesh.file {
            return Mesh::read_text_file(path);
        }
        let (nx, ny) = self.problem.default_grid();
        Mesh::generate_rect(self.bounds(), self.mesh.nx.unwrap_or(nx), self.mesh.ny.unwrap_or(ny), self.mesh.diagonal)
    }

    /// Meshes for every configured level, coarsest first.
    pub fn meshes(&self) -> Result<Vec<Mesh>> {
        let mut out = vec![self.coarse_mesh()?];
        while out.len() < self.levels.len() {
            let next = out.last().unwrap().refine_red();
            out.push(next);
        }
        Ok(out)
    }

    /// The problem at `eps` on level `j` (1-based) of `meshes`.
    pub fn problem_at(&self, eps: f64, meshes: &[Mesh], j: usize) -> Result<ProblemSpec> {
        let mut p = match self.problem {
            ProblemKind::Test1 => problems::test1(eps)?,
            ProblemKind::Test2 => problems::test2(eps, self.test2_psi_variant)?,
            ProblemKind::Custom => {
                let c = &self.custom;
                let mut p = problems::custom(meshes[0].bounding_box(), eps, Vec::new(), c.f, c.g, c.g_is_exact)?;
                p.psi = match &c.psi {
                    CustomPsi::Named(name) => named_psi(name, self.test2_psi_variant)?,
                    CustomPsi::Table(v) => {
                        if v.len() != meshes[0].vertices().len() {
                            return Err(Error::Config(format!(
                                "custom psi table has {} values, coarse mesh has {} vertices",
                                v.len(),
                                meshes[0].vertices().len()
                            )));
                        }
                        let mut psi = PsiSpec::Tabulated(v.clone());
                        for m in &meshes[..j - 1] {
                            psi = psi.refine(m);
                        }
                        psi
                    }
                };
                p
            }
        };
        p.alpha = self.alpha;
        Ok(p)
    }
}

fn named_psi(name: &str, variant: Test2PsiVariant) -> Result<PsiSpec> {
    Ok(match name {
        "zero" => PsiSpec::Continuous(Arc::new(|_: Point| 0.0)),
        "test1" => PsiSpec::Continuous(Arc::new(|p: Point| p[0] + p[1])),
        "test2" => PsiSpec::ElementLinear(Arc::new(move |c| problems::test2_psi_coefficients(c, variant))),
        _ => return Err(Error::Config(format!("unknown built-in psi '{name}' (expected zero, test1 or test2)"))),
    })
}
