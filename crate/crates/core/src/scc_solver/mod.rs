//! Exact two-step solve of the split system: the diagonal zz block first,
//! then block Gauss-Seidel on the CR block ordered by the strongly connected
//! components of its dependency graph.

mod gauss_seidel;
mod graph;
mod lu;
mod tarjan;

pub use gauss_seidel::{block_gauss_seidel, relative_residual, BlockGaussSeidel, GaussSeidelResult, LogBlockGaussSeidel};
pub use graph::{build_digraph, DiGraph, DropCensus};
pub use lu::DenseLu;
pub use tarjan::{tarjan_scc, BlockPartition, BlockStats, UpperCensus};

use std::time::Instant;

use crate::assembly::{count_out_of_range, CsrMatrix, DGSolution};
use crate::error::Result;
use crate::fitting::LogScaled;
use crate::splitting::{solve_zz, BlockSystem, SplitTransform, StructureReport};

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Relative drop tolerance for the dependency graph.
    pub tau: f64,
    pub tol: f64,
    pub max_sweeps: usize,
    /// Largest diagonal block factored densely.
    pub block_limit: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tau: 1e-14,
            tol: 1e-10,
            max_sweeps: 5,
            block_limit: 20_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct SolverReport {
    pub n_cr: usize,
    pub n_blocks: usize,
    pub max_block: usize,
    pub n_av: f64,
    pub graph_edges: usize,
    pub one_way_edges: usize,
    pub dropped: DropCensus,
    /// Entries above the block diagonal of the permuted CR block.
    pub upper: UpperCensus,
    pub block_lower_triangular: bool,
    pub structure: StructureReport,
    pub sweeps: usize,
    /// Relative residual of the unsplit system after each sweep.
    pub residuals: Vec<f64>,
    pub residual: f64,
    pub converged: bool,
    pub runtime_ms: f64,
}

#[derive(Clone, Debug)]
pub struct FullSolution {
    /// Midpoint values of `u`. Z parts on outflow edges can be far outside
    /// the double range, so they are kept in log form.
    pub u: Vec<LogScaled>,
    pub cr: Vec<LogScaled>,
    pub z: Vec<LogScaled>,
    pub partition: BlockPartition,
    /// Row-equilibrated CR block the graph and sweeps were built on.
    pub vv_scaled: CsrMatrix<f64>,
    pub report: SolverReport,
}

impl FullSolution {
    /// `u` as plain doubles, or an overflow error naming the first dof that
    /// does not fit.
    pub fn dg(&self) -> Result<DGSolution> {
        DGSolution::from_log(&self.u)
    }

    /// Number of dofs of `u` outside the double range.
    pub fn out_of_range(&self) -> usize {
        count_out_of_range(&self.u)
    }
}

/// `||f - B u|| / ||f||` with row `i` divided by
/// `max(|f_i|, max_j |B_ij u_j|, max_j |B_ij| * typical)`, evaluated in log
/// arithmetic. `typical` is the size of the solution in the interior (the
/// largest CR coefficient), so this is the row-equilibrated residual for an
/// O(1) solution. The first two terms keep rows whose load or products are
/// far larger (outflow Z rows, `exp(1e4)` sized values) from overflowing or
/// being judged against rounding.
pub fn relative_residual_log(b: &CsrMatrix<LogScaled>, u: &[LogScaled], f: &[LogScaled], typical: LogScaled) -> f64 {
    let typical = if typical.is_zero() { LogScaled::ONE } else { typical.abs() };
    let mut num = 0.0;
    let mut den = 0.0;
    let mut terms = Vec::new();
    for i in 0..b.nrows() {
        let (cols, vals) = b.row(i);
        terms.clear();
        terms.extend(cols.iter().zip(vals).map(|(&j, v)| -(*v * u[j])));
        terms.push(f[i]);
        let bmax = vals.iter().fold(LogScaled::ZERO, |a, &v| a.max_abs(v));
        let scale = terms.iter().fold(bmax * typical, |a, &t| a.max_abs(t));
        if scale.is_zero() {
            continue;
        }
        terms.sort_by(|a, b| a.cmp_abs(b));
        let r: LogScaled = terms.iter().copied().sum();
        let r = (r / scale).to_f64();
        let fi = (f[i] / scale).to_f64();
        num += r * r;
        den += fi * fi;
    }
    if den > 0.0 {
        (num / den).sqrt()
    } else {
        num.sqrt()
    }
}

/// Solves `B u = f` through the split blocks of `B`. `b` and `rhs` are the
/// unsplit operator and load vector, used for the final residual check.
pub fn solve_full(
    system: &BlockSystem<LogScaled>,
    transform: &SplitTransform,
    b: &CsrMatrix<LogScaled>,
    rhs: &[LogScaled],
    opts: &SolverOptions,
) -> Result<FullSolution> {
    let start = Instant::now();
    let (rhs_cr, rhs_z) = transform.transform_rhs(rhs);

    // The top-right block vanishes (up to rounding, recorded in the
    // structure report), so the zz step sees no CR coupling and one pass of
    // the two steps is exact.
    let z = solve_zz(&system.zz_diagonal(), &rhs_z)?;
    let coupling = system.vz.mul_vec_log(&z);
    let rhs_v: Vec<LogScaled> = rhs_cr.iter().zip(&coupling).map(|(f, c)| *f - *c).collect();

    let (vv_scaled, _) = system.vv.equilibrate_rows();
    let (graph, dropped) = build_digraph(&vv_scaled, opts.tau);
    let partition = tarjan_scc(&graph);
    let upper = partition.upper_census(&vv_scaled);
    let block_lower_triangular = upper.count == 0 || upper.max_rel <= opts.tau;

    let mut gs = LogBlockGaussSeidel::new(&system.vv, &partition, opts.block_limit)?;
    let mut cr = vec![LogScaled::ZERO; transform.n_cr()];
    let mut u = Vec::new();
    let mut residuals = Vec::new();
    for sweep in 0..opts.max_sweeps.max(1) {
        if sweep == 1 {
            gs.rescale(&cr)?;
        }
        gs.sweep(&mut cr, &rhs_v);
        u = transform.from_split(&cr, &z);
        let typical = cr.iter().fold(LogScaled::ZERO, |a, &c| a.max_abs(c));
        let r = relative_residual_log(b, &u, rhs, typical);
        residuals.push(r);
        if r <= opts.tol {
            break;
        }
    }
    let residual = *residuals.last().unwrap();
    let stats = partition.stats();
    let report = SolverReport {
        n_cr: transform.n_cr(),
        n_blocks: stats.n_blocks,
        max_block: stats.max_block,
        n_av: stats.n_av,
        graph_edges: graph.n_edges(),
        one_way_edges: graph.one_way_edges(),
        dropped,
        upper,
        block_lower_triangular,
        structure: system.structure,
        sweeps: residuals.len(),
        converged: residual <= opts.tol,
        residual,
        residuals,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    if !report.converged {
        log::warn!("block Gauss-Seidel stopped at residual {:.3e} after {} sweeps", report.residual, report.sweeps);
    }
    Ok(FullSolution {
        u,
        cr,
        z,
        partition,
        vv_scaled,
        report,
    })
}
