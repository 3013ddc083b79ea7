//! Assemble the fitted system on a coarse mesh, split it into CR and Z parts
//! and inspect the block structure.
//!
//! cargo run --example assemble_and_split -- 1e-5

use efdg::assembly::{assemble_a, assemble_b, factored_form, DofMap};
use efdg::fitting::WeightMode;
use efdg::mesh::{Diagonal, Mesh, Rect};
use efdg::problems;
use efdg::splitting::{split_factored, SplitTransform, StructureCheck};

fn main() -> efdg::Result<()> {
    let eps: f64 = std::env::args().nth(1).map(|s| s.parse().expect("eps")).unwrap_or(1e-5);
    let mesh = Mesh::generate_rect(Rect::new(-1.0, 1.0, -1.0, 1.0), 4, 4, Diagonal::NE)?;
    let p = problems::test1(eps)?;
    let fit = p.fitting(&mesh, WeightMode::Mean)?;
    let dofs = DofMap::new(&mesh);
    let t = SplitTransform::new(&mesh, &dofs);

    let a = assemble_a(&mesh, &dofs, &fit)?;
    let b = assemble_b(&mesh, &dofs, &fit)?;
    println!("{} dofs, {} CR, {} Z", t.n_dg(), t.n_cr(), t.n_z());
    println!("A: nnz {}, max |a| = e^{:.1}", a.nnz(), a.max_abs().log_mag());
    println!("B: nnz {}, max |b| = e^{:.1}", b.nnz(), b.max_abs().log_mag());

    let form = factored_form(&mesh, &dofs, &fit, true)?;
    let sys = split_factored(&form, &fit, &t, StructureCheck::Enforce)?;
    let s = &sys.structure;
    println!("top-right block / max entry: {:.2e}", s.top_right_rel);
    println!("zz off-diagonal / max entry: {:.2e}, diagonal positive: {}", s.zz_offdiag_rel, s.zz_positive);
    println!("vv: {}x{} with {} entries", sys.vv.nrows(), sys.vv.ncols(), sys.vv.nnz());
    println!("vz: {} entries, zv: {} entries", sys.vz.nnz(), sys.zv.nnz());
    Ok(())
}
