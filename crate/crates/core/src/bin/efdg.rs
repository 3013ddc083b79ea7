use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use efdg::experiment::{fmt_e, run_experiment, write_atomic, ExperimentConfig, ExperimentReport, ProblemKind};
use efdg::fitting::WeightMode;
use efdg::problems::Test2PsiVariant;

#[derive(Parser)]
#[command(name = "efdg", version, about = "Exponentially fitted DG with an SCC block solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve every (eps, J) cell and write stats.csv, errors.csv and
    /// optional artifacts.
    Solve(Common),
    /// Like `solve`, and print the block statistics table.
    Table(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<ProblemKind>,
    /// Comma-separated list.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// Number of levels; runs J = 1..=levels.
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_sweeps: Option<usize>,
    #[arg(long)]
    block_limit: Option<usize>,
    #[arg(long, value_parser = parse_weight_mode)]
    weight_mode: Option<WeightMode>,
    #[arg(long, value_parser = parse_variant)]
    test2_psi_variant: Option<Test2PsiVariant>,
    /// Coarse mesh file (vertices and triangles, see `Mesh::read_text`).
    #[arg(long)]
    mesh: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    export_matrices: bool,
    #[arg(long)]
    svg: bool,
    #[arg(long)]
    partition: bool,
}

fn parse_weight_mode(s: &str) -> Result<WeightMode, String> {
    match s {
        "mean" => Ok(WeightMode::Mean),
        "sided" => Ok(WeightMode::Sided),
        _ => Err("expected mean or sided".into()),
    }
}

fn parse_variant(s: &str) -> Result<Test2PsiVariant, String> {
    match s {
        "literal" => Ok(Test2PsiVariant::Literal),
        "consistent" => Ok(Test2PsiVariant::Consistent),
        _ => Err("expected literal or consistent".into()),
    }
}

impl Common {
    fn config(&self) -> efdg::Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(p) = self.problem {
            c.problem = p;
        }
        if let Some(e) = &self.eps {
            c.eps = e.clone();
        }
        if let Some(n) = self.levels {
            c.levels = (1..=n).collect();
        }
        if let Some(a) = self.alpha {
            c.alpha = a;
        }
        if let Some(t) = self.tau {
            c.solver.tau = t;
        }
        if let Some(t) = self.tol {
            c.solver.tol = t;
        }
        if let Some(n) = self.max_sweeps {
            c.solver.max_sweeps = n;
        }
        if let Some(n) = self.block_limit {
            c.solver.block_limit = n;
        }
        if let Some(w) = self.weight_mode {
            c.weight_mode = w;
        }
        if let Some(v) = self.test2_psi_variant {
            c.test2_psi_variant = v;
        }
        if let Some(m) = &self.mesh {
            c.mesh.file = Some(m.clone());
        }
        if let Some(o) = &self.out {
            c.out = o.clone();
        }
        c.outputs.matrices |= self.export_matrices;
        c.outputs.svg |= self.svg;
        c.outputs.partition |= self.partition;
        c.validate()?;
        Ok(c)
    }
}

fn summary(report: &ExperimentReport) {
    for r in &report.rows {
        let flag = if r.converged { "" } else { "  (above tol)" };
        println!(
            "{} eps={:e} J={}: n_cr={} N_b={} M_b={} n_av={:.2} sweeps={} residual={}{flag}",
            r.problem,
            r.eps,
            r.j,
            r.n_cr,
            r.n_blocks,
            r.max_block,
            r.n_av,
            r.sweeps,
            fmt_e(r.residual, 3)
        );
    }
}

fn run(cmd: &Command) -> efdg::Result<bool> {
    let (common, table) = match cmd {
        Command::Solve(c) => (c, false),
        Command::Table(c) => (c, true),
    };
    let config = common.config()?;
    let report = run_experiment(&config)?;
    if table {
        let t = report.table();
        print!("{t}");
        write_atomic(&config.out.join("table.txt"), t.as_bytes())?;
    } else {
        summary(&report);
    }
    for f in &report.failures {
        eprintln!("failed: eps={:e} J={}: {}", f.eps, f.j, f.message);
    }
    Ok(report.success())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
