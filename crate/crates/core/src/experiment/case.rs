use std::time::Instant;

use crate::assembly::{assemble_rhs, error_norms, factored_form, CsrMatrix, DofMap, ErrorNorms};
use crate::error::{Error, Result};
use crate::fitting::{FittingData, LogScaled, WeightMode};
use crate::mesh::Mesh;
use crate::problems::ProblemSpec;
use crate::scc_solver::{solve_full, FullSolution, SolverOptions};
use crate::splitting::{split_factored, BlockSystem, SplitTransform, StructureCheck};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CaseSettings {
    pub weight_mode: WeightMode,
    pub solver: SolverOptions,
    /// `None` enforces the split structure for continuous `psi` and only
    /// records it otherwise.
    pub structure: Option<StructureCheck>,
}

/// Everything produced by one solve on one mesh.
#[derive(Clone, Debug)]
pub struct CaseResult {
    pub dofs: DofMap,
    pub fitting: FittingData,
    pub transform: SplitTransform,
    pub b: CsrMatrix<LogScaled>,
    pub rhs: Vec<LogScaled>,
    pub system: BlockSystem<LogScaled>,
    pub solution: FullSolution,
    pub norms: Option<ErrorNorms>,
    pub runtime_ms: f64,
}

/// Fitting, assembly, splitting and the block solve for one problem on one
/// mesh.
pub fn solve_case(mesh: &Mesh, problem: &ProblemSpec, settings: &CaseSettings) -> Result<CaseResult> {
    let start = Instant::now();
    let mean = problem.fitting(mesh, settings.weight_mode)?;
    if !mean.is_continuous() && settings.weight_mode == WeightMode::Sided {
        return Err(Error::Config(
            "one-sided edge weights couple the CR and Z blocks for discontinuous psi; the split solver needs weight_mode = mean".into(),
        ));
    }
    let dofs = DofMap::new(mesh);
    let transform = SplitTransform::new(mesh, &dofs);
    let form = factored_form(mesh, &dofs, &mean, true)?;
    let b_mean = form.evaluate(&mean);
    let rhs = assemble_rhs(mesh, &dofs, &mean, |p| (problem.source)(p), |p| (problem.boundary)(p))?;
    let check = settings.structure.unwrap_or(if mean.is_continuous() {
        StructureCheck::Enforce
    } else {
        StructureCheck::Record
    });
    let system = split_factored(&form, &mean, &transform, check)?;
    let solution = solve_full(&system, &transform, &b_mean, &rhs, &settings.solver)?;

    let (fitting, b) = (mean, b_mean);

    let norms = match (&problem.exact, solution.dg()) {
        (Some(ex), Ok(u)) => Some(error_norms(mesh, &u, ex.as_ref())),
        (Some(_), Err(_)) => {
            log::warn!("{} of {} dofs of u exceed the double range; skipping error norms", solution.out_of_range(), solution.u.len());
            None
        }
        _ => None,
    };
    Ok(CaseResult {
        dofs,
        fitting,
        transform,
        b,
        rhs,
        system,
        solution,
        norms,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
