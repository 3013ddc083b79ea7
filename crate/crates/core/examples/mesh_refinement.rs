//! Structured meshes, red refinement and the acute-angle check.
//!
//! cargo run --example mesh_refinement

use efdg::mesh::{Diagonal, Mesh, Rect};

fn main() -> efdg::Result<()> {
    let square = Rect::new(-1.0, 1.0, -1.0, 1.0);
    for diag in [Diagonal::NE, Diagonal::Alternating] {
        let coarse = Mesh::generate_rect(square, 8, 7, diag)?;
        println!("{diag:?}");
        for j in 1..=4 {
            let m = coarse.refine_to_level(j);
            let a = m.check_acute();
            println!(
                "  J={j}: {:6} triangles {:6} edges ({:5} boundary), max angle {:.1} deg, weakly acute: {}",
                m.n_elements(),
                m.n_edges(),
                m.n_boundary_edges(),
                a.max_angle.to_degrees(),
                a.is_weakly_acute
            );
        }
    }

    // round trip through the plain text format
    let m = Mesh::generate_rect(square, 2, 2, Diagonal::NE)?;
    let mut buf = Vec::new();
    m.write_text(&mut buf).expect("write to memory");
    let back = Mesh::read_text(buf.as_slice())?;
    assert_eq!(back.n_edges(), m.n_edges());
    print!("{}", String::from_utf8_lossy(&buf));
    Ok(())
}
