//! Block map: the mesh with every CR dof (interior edge midpoint) colored by
//! the SCC block it belongs to.

use std::fmt::Write;

use crate::mesh::Mesh;
use crate::scc_solver::BlockPartition;
use crate::splitting::SplitTransform;

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 10.0;
const SINGLETON: &str = "#b0b0b0";

fn block_color(b: usize) -> String {
    // golden-angle hue spacing keeps neighbouring ids apart
    let hue = (b as f64 * 137.507_764) % 360.0;
    format!("hsl({hue:.1},70%,45%)")
}

pub fn blocks_svg(mesh: &Mesh, transform: &SplitTransform, partition: &BlockPartition) -> String {
    let bb = mesh.bounding_box();
    let scale = (WIDTH - 2.0 * MARGIN) / (bb.x1 - bb.x0);
    let height = (bb.y1 - bb.y0) * scale + 2.0 * MARGIN;
    let px = |p: [f64; 2]| (MARGIN + (p[0] - bb.x0) * scale, height - MARGIN - (p[1] - bb.y0) * scale);
    let r = (0.15 * scale * mesh.edges().iter().map(|e| e.length).fold(f64::INFINITY, f64::min)).clamp(0.8, 6.0);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height:.2}" viewBox="0 0 {WIDTH} {height:.2}">"#
    );
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(s, r##"<g fill="none" stroke="#606060" stroke-width="0.5">"##);
    for t in mesh.triangles() {
        let pts: Vec<String> = t
            .iter()
            .map(|&v| {
                let (x, y) = px(mesh.vertices()[v]);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(s, r#"<polygon points="{}"/>"#, pts.join(" "));
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "<g>");
    for c in 0..transform.n_cr() {
        let (x, y) = px(mesh.edge(transform.cr_edge(c)).midpoint);
        let b = partition.block_of(c);
        let fill = if partition.blocks()[b].len() == 1 { SINGLETON.to_string() } else { block_color(b) };
        let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r:.2}" fill="{fill}" data-block="{b}"/>"#);
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    s
}
