//! Test 1: exponential boundary layers at x = 1 and y = 1. Solves on a few
//! levels and reports block statistics and errors away from the layers.
//!
//! cargo run --release --example boundary_layer -- 1e-5

use efdg::assembly::{error_norms_where, DGSolution};
use efdg::experiment::{solve_case, CaseSettings};
use efdg::mesh::{Diagonal, Mesh, Rect};
use efdg::problems::{self, Test1Exact};

fn main() -> efdg::Result<()> {
    let eps: f64 = std::env::args().nth(1).map(|s| s.parse().expect("eps")).unwrap_or(1e-5);
    let coarse = Mesh::generate_rect(Rect::new(-1.0, 1.0, -1.0, 1.0), 8, 7, Diagonal::NE)?;
    let p = problems::test1(eps)?;
    let exact = Test1Exact { epsilon: eps };
    println!("eps = {eps:e}");
    println!("{:>2} {:>7} {:>6} {:>4} {:>5} {:>6} {:>10} {:>12} {:>10}", "J", "n_cr", "N_b", "M_b", "n_av", "sweeps", "residual", "max |e| in", "huge dofs");
    for j in 1..=4 {
        let mesh = coarse.refine_to_level(j);
        let c = solve_case(&mesh, &p, &CaseSettings::default())?;
        let r = &c.solution.report;
        // Z values at outflow midpoints can exceed f64; those dofs become inf
        let u = DGSolution::from_log_lossy(&c.solution.u);
        let inner = error_norms_where(&mesh, &u, &exact, |x| x[0] <= 0.5 && x[1] <= 0.5);
        println!(
            "{j:>2} {:>7} {:>6} {:>4} {:>5.2} {:>6} {:>10.2e} {:>12.3e} {:>10}",
            r.n_cr,
            r.n_blocks,
            r.max_block,
            r.n_av,
            r.sweeps,
            r.residual,
            inner.midpoint_max,
            c.solution.out_of_range()
        );
    }
    Ok(())
}
