//! Test 2: a rotating flow with a discontinuous potential. Writes an SVG of
//! the SCC blocks over the mesh.
//!
//! cargo run --release --example rotating_flow -- 1e-3 2 out/blocks.svg

use std::path::PathBuf;

use efdg::experiment::{blocks_svg, solve_case, CaseSettings};
use efdg::mesh::{Diagonal, Mesh, Rect};
use efdg::problems::{self, Test2PsiVariant};

fn main() -> efdg::Result<()> {
    let mut args = std::env::args().skip(1);
    let eps: f64 = args.next().map(|s| s.parse().expect("eps")).unwrap_or(1e-3);
    let j: usize = args.next().map(|s| s.parse().expect("level")).unwrap_or(2);
    let svg = PathBuf::from(args.next().unwrap_or_else(|| "blocks.svg".into()));

    let mesh = Mesh::generate_rect(Rect::new(-1.0, 1.0, 0.0, 1.0), 16, 7, Diagonal::NE)?.refine_to_level(j);
    for variant in [Test2PsiVariant::Literal, Test2PsiVariant::Consistent] {
        let p = problems::test2(eps, variant)?;
        let c = solve_case(&mesh, &p, &CaseSettings::default())?;
        let r = &c.solution.report;
        println!(
            "{variant:?}: n_cr {} N_b {} M_b {} n_av {:.2} sweeps {} residual {:.2e} top-right {:.2e}",
            r.n_cr, r.n_blocks, r.max_block, r.n_av, r.sweeps, r.residual, r.structure.top_right_rel
        );
        if variant == Test2PsiVariant::Literal {
            std::fs::write(&svg, blocks_svg(&mesh, &c.transform, &c.solution.partition)).map_err(|e| efdg::Error::io(&svg, e))?;
            println!("wrote {}", svg.display());
        }
    }
    Ok(())
}
