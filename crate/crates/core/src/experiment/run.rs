use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::case::{solve_case, CaseResult, CaseSettings};
use super::config::ExperimentConfig;
use super::format::{fmt_e, fmt_g};
use super::matrix_market::write_matrix_market;
use super::svg::blocks_svg;
use crate::assembly::{assemble_a, CsrMatrix, ErrorNorms};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::scc_solver::SolverReport;

pub const STATS_HEADER: &str = "problem,eps,J,n_K,n_e,n_b,n_cr,N_b,M_b,n_av,sweeps,residual,runtime_ms";
pub const ERRORS_HEADER: &str = "eps,J,l2,broken_h1,midpoint_max";

/// One line of `stats.csv` plus what the summary needs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellRow {
    pub problem: String,
    pub eps: f64,
    pub j: usize,
    pub n_k: usize,
    pub n_e: usize,
    pub n_b: usize,
    pub n_cr: usize,
    pub n_blocks: usize,
    pub max_block: usize,
    pub n_av: f64,
    pub sweeps: usize,
    pub residual: f64,
    pub converged: bool,
    pub runtime_ms: f64,
    /// Dofs of `u` outside the double range.
    pub out_of_range: usize,
    pub norms: Option<ErrorNorms>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellFailure {
    pub eps: f64,
    pub j: usize,
    pub message: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ExperimentReport {
    pub rows: Vec<CellRow>,
    pub failures: Vec<CellFailure>,
    pub files: Vec<PathBuf>,
    pub has_exact: bool,
}

impl ExperimentReport {
    pub fn success(&self) -> bool {
        self.failures.is_empty()
    }

    /// Rows whose residual did not reach the tolerance.
    pub fn unconverged(&self) -> impl Iterator<Item = &CellRow> {
        self.rows.iter().filter(|r| !r.converged)
    }

    /// Block statistics table: one row per level,
    /// one `N_b M_b n_av` group per epsilon.
    pub fn table(&self) -> String {
        let mut eps: Vec<f64> = Vec::new();
        let mut levels: Vec<usize> = Vec::new();
        for r in &self.rows {
            if !eps.contains(&r.eps) {
                eps.push(r.eps);
            }
            if !levels.contains(&r.j) {
                levels.push(r.j);
            }
        }
        levels.sort_unstable();
        let mut s = String::new();
        let _ = write!(s, "{:>3} {:>7}", "J", "n_cr");
        for e in &eps {
            let _ = write!(s, " | {:^24}", format!("eps = {}", fmt_g(*e, 3)));
        }
        let _ = writeln!(s);
        let _ = write!(s, "{:>3} {:>7}", "", "");
        for _ in &eps {
            let _ = write!(s, " | {:>7} {:>7} {:>8}", "N_b", "M_b", "n_av");
        }
        let _ = writeln!(s);
        for j in levels {
            let n_cr = self.rows.iter().find(|r| r.j == j).map_or(0, |r| r.n_cr);
            let _ = write!(s, "{j:>3} {n_cr:>7}");
            for e in &eps {
                match self.rows.iter().find(|r| r.j == j && r.eps == *e) {
                    Some(r) => {
                        let _ = write!(s, " | {:>7} {:>7} {:>8.2}", r.n_blocks, r.max_block, r.n_av);
                    }
                    None => {
                        let _ = write!(s, " | {:>7} {:>7} {:>8}", "-", "-", "-");
                    }
                }
            }
            let _ = writeln!(s);
        }
        s
    }
}

impl CellRow {
    fn new(problem: &str, eps: f64, j: usize, mesh: &Mesh, case: &CaseResult) -> Self {
        let r = &case.solution.report;
        CellRow {
            problem: problem.to_string(),
            eps,
            j,
            n_k: mesh.n_elements(),
            n_e: mesh.n_edges(),
            n_b: mesh.n_boundary_edges(),
            n_cr: r.n_cr,
            n_blocks: r.n_blocks,
            max_block: r.max_block,
            n_av: r.n_av,
            sweeps: r.sweeps,
            residual: r.residual,
            converged: r.converged,
            runtime_ms: case.runtime_ms,
            out_of_range: case.solution.out_of_range(),
            norms: case.norms,
        }
    }
}

pub fn stats_csv(rows: &[CellRow]) -> String {
    let mut s = String::from(STATS_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.problem,
            fmt_g(r.eps, 6),
            r.j,
            r.n_k,
            r.n_e,
            r.n_b,
            r.n_cr,
            r.n_blocks,
            r.max_block,
            fmt_g(r.n_av, 6),
            r.sweeps,
            fmt_e(r.residual, 3),
            fmt_g(r.runtime_ms, 6)
        );
    }
    s
}

/// Rows without norms (solution outside the double range) are written as
/// `nan`.
pub fn errors_csv(rows: &[CellRow]) -> String {
    let mut s = String::from(ERRORS_HEADER);
    s.push('\n');
    for r in rows {
        let n = r.norms.unwrap_or(ErrorNorms {
            l2: f64::NAN,
            broken_h1: f64::NAN,
            midpoint_max: f64::NAN,
        });
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            fmt_g(r.eps, 6),
            r.j,
            fmt_g(n.l2, 6),
            fmt_g(n.broken_h1, 6),
            fmt_g(n.midpoint_max, 6)
        );
    }
    s
}

/// Writes through a temporary file in the same directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    std::fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

pub fn cell_dir(out: &Path, problem: &str, eps: f64, j: usize) -> PathBuf {
    out.join(format!("{problem}_eps{}_J{j}", fmt_g(eps, 6)))
}

#[derive(Serialize)]
struct CellReport<'a> {
    problem: &'a str,
    eps: f64,
    j: usize,
    solver: &'a SolverReport,
    out_of_range: usize,
    norms: Option<ErrorNorms>,
    skipped: &'a [String],
}

fn mtx_bytes(m: &CsrMatrix<f64>) -> Vec<u8> {
    let mut buf = Vec::new();
    write_matrix_market(m, &mut buf).expect("writing to memory");
    buf
}

/// Writes the per-cell files selected in `config.outputs` into `dir`:
/// `A.mtx`, `B.mtx`, `Bvv.mtx` and `Bvv_permuted.mtx` when they fit in
/// doubles, the row-equilibrated `Bvv_scaled.mtx` and
/// `Bvv_scaled_permuted.mtx` with `permutation.txt`, `partition.txt`,
/// `blocks.svg` and always `report.json`.
pub fn export_artifacts(
    config: &ExperimentConfig,
    dir: &Path,
    mesh: &Mesh,
    eps: f64,
    j: usize,
    case: &CaseResult,
) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    let mut skipped = Vec::new();
    let put = |name: &str, bytes: &[u8], files: &mut Vec<PathBuf>| -> Result<()> {
        let path = dir.join(name);
        write_atomic(&path, bytes)?;
        files.push(path);
        Ok(())
    };
    let sol = &case.solution;
    let perm = sol.partition.permutation();
    if config.outputs.matrices {
        let a = assemble_a(mesh, &case.dofs, &case.fitting)?;
        let vv = &case.system.vv;
        for (name, m) in [("A.mtx", &a), ("B.mtx", &case.b), ("Bvv.mtx", vv)] {
            match m.to_f64(name) {
                Ok(m) => put(name, &mtx_bytes(&m), &mut files)?,
                Err(_) => skipped.push(format!("{name}: entries outside the double range")),
            }
        }
        if let Ok(m) = vv.to_f64("Bvv") {
            put("Bvv_permuted.mtx", &mtx_bytes(&m.permute_symmetric(&perm)), &mut files)?;
        } else {
            skipped.push("Bvv_permuted.mtx: entries outside the double range".into());
        }
        put("Bvv_scaled.mtx", &mtx_bytes(&sol.vv_scaled), &mut files)?;
        put("Bvv_scaled_permuted.mtx", &mtx_bytes(&sol.vv_scaled.permute_symmetric(&perm)), &mut files)?;
        let mut p = String::new();
        for k in &perm {
            let _ = writeln!(p, "{k}");
        }
        put("permutation.txt", p.as_bytes(), &mut files)?;
    }
    if config.outputs.partition {
        let mut buf = Vec::new();
        sol.partition.write(&mut buf).expect("writing to memory");
        put("partition.txt", &buf, &mut files)?;
    }
    if config.outputs.svg {
        put("blocks.svg", blocks_svg(mesh, &case.transform, &sol.partition).as_bytes(), &mut files)?;
    }
    let report = CellReport {
        problem: config.problem.name(),
        eps,
        j,
        solver: &sol.report,
        out_of_range: sol.out_of_range(),
        norms: case.norms,
        skipped: &skipped,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    put("report.json", json.as_bytes(), &mut files)?;
    Ok(files)
}

/// Solves every `(eps, J)` cell of `config` and writes `stats.csv`,
/// `errors.csv` (when an exact solution exists) and the per-cell artifacts.
/// Failed cells are recorded in the report and do not stop the others;
/// only invalid configurations and unreadable meshes return `Err`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let meshes = config.meshes()?;
    let settings = CaseSettings {
        weight_mode: config.weight_mode,
        solver: config.solver,
        structure: None,
    };
    let name = config.problem.name();
    let mut report = ExperimentReport::default();
    let per_cell = config.outputs.matrices || config.outputs.partition || config.outputs.svg;
    for &eps in &config.eps {
        for &j in &config.levels {
            let mesh = &meshes[j - 1];
            let fail = |msg: String| CellFailure { eps, j, message: msg };
            let problem = config.problem_at(eps, &meshes, j)?;
            report.has_exact |= problem.exact.is_some();
            let case = match solve_case(mesh, &problem, &settings) {
                Ok(c) => c,
                Err(e) => {
                    log::error!("eps = {eps:e}, J = {j}: {e}");
                    report.failures.push(fail(e.to_string()));
                    continue;
                }
            };
            let r = &case.solution.report;
            log::info!(
                "{name} eps = {eps:e} J = {j}: N_b = {} M_b = {} sweeps = {} residual = {:.3e}",
                r.n_blocks,
                r.max_block,
                r.sweeps,
                r.residual
            );
            if !r.block_lower_triangular {
                report.failures.push(fail(format!(
                    "permuted CR block is not block lower triangular ({} entries above the block diagonal, largest {:e})",
                    r.upper.count, r.upper.max_rel
                )));
            }
            if per_cell {
                match export_artifacts(config, &cell_dir(&config.out, name, eps, j), mesh, eps, j, &case) {
                    Ok(files) => report.files.extend(files),
                    Err(e) => report.failures.push(fail(e.to_string())),
                }
            }
            report.rows.push(CellRow::new(name, eps, j, mesh, &case));
        }
    }
    if config.outputs.stats {
        let path = config.out.join("stats.csv");
        write_atomic(&path, stats_csv(&report.rows).as_bytes())?;
        report.files.push(path);
    }
    if config.outputs.errors && report.has_exact {
        let path = config.out.join("errors.csv");
        write_atomic(&path, errors_csv(&report.rows).as_bytes())?;
        report.files.push(path);
    }
    for r in report.unconverged() {
        log::warn!("eps = {:e}, J = {}: residual {:.3e} above tolerance", r.eps, r.j, r.residual);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::ProblemKind;

    fn small(problem: ProblemKind, dir: &Path) -> ExperimentConfig {
        let mut c = ExperimentConfig::default();
        c.problem = problem;
        c.mesh.nx = Some(3);
        c.mesh.ny = Some(2);
        c.eps = vec![1e-2, 1e-6];
        c.levels = vec![1, 2];
        c.out = dir.to_path_buf();
        c
    }

    #[test]
    fn stats_rows_satisfy_identities() {
        let dir = tempfile::tempdir().unwrap();
        let rep = run_experiment(&small(ProblemKind::Test1, dir.path())).unwrap();
        assert!(rep.success());
        assert_eq!(rep.rows.len(), 4);
        for r in &rep.rows {
            assert_eq!(r.n_cr, r.n_e - r.n_b);
            assert!((r.n_av * r.n_blocks as f64 - r.n_cr as f64).abs() < 1e-9);
            assert!(r.max_block <= r.n_cr && r.converged);
        }
        let csv = std::fs::read_to_string(dir.path().join("stats.csv")).unwrap();
        assert_eq!(csv.lines().next().unwrap(), STATS_HEADER);
        assert_eq!(csv.lines().count(), 5);
        assert!(dir.path().join("errors.csv").exists());
    }

    #[test]
    fn csv_is_reproducible_modulo_runtime() {
        let strip = |s: String| s.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect::<Vec<_>>();
        let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        run_experiment(&small(ProblemKind::Test2, d1.path())).unwrap();
        run_experiment(&small(ProblemKind::Test2, d2.path())).unwrap();
        let a = std::fs::read_to_string(d1.path().join("stats.csv")).unwrap();
        let b = std::fs::read_to_string(d2.path().join("stats.csv")).unwrap();
        assert_eq!(strip(a), strip(b));
        assert!(!d1.path().join("errors.csv").exists());
    }

    #[test]
    fn block_limit_failure_names_the_cell() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small(ProblemKind::Custom, dir.path());
        c.solver.block_limit = 2;
        c.eps = vec![0.5];
        let rep = run_experiment(&c).unwrap();
        assert!(!rep.success());
        assert_eq!(rep.failures.len(), 2);
        assert_eq!((rep.failures[1].eps, rep.failures[1].j), (0.5, 2));
        assert!(rep.failures[0].message.contains("dense block limit"));
    }

    #[test]
    fn table_layout() {
        let row = |eps: f64, j: usize, nb: usize| CellRow {
            problem: "test1".into(),
            eps,
            j,
            n_k: 0,
            n_e: 0,
            n_b: 0,
            n_cr: 10,
            n_blocks: nb,
            max_block: 10 / nb,
            n_av: 10.0 / nb as f64,
            sweeps: 1,
            residual: 0.0,
            converged: true,
            runtime_ms: 0.0,
            out_of_range: 0,
            norms: None,
        };
        let rep = ExperimentReport {
            rows: vec![row(1e-3, 1, 1), row(1e-5, 1, 5)],
            ..Default::default()
        };
        let t = rep.table();
        assert_eq!(t.lines().count(), 3);
        assert!(t.contains("eps = 0.001") && t.contains("eps = 1e-05"));
        assert!(t.lines().nth(2).unwrap().ends_with("2.00"));
    }
}
