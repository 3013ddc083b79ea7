use crate::mesh::Mesh;

/// Global numbering of the midpoint basis: local edge `i` of element `k`
/// is dof `3k + i`.
#[derive(Clone, Debug)]
pub struct DofMap {
    dof_edge: Vec<usize>,
    dof_side: Vec<u8>,
    edge_dofs: Vec<[Option<usize>; 2]>,
    n_boundary: usize,
}

impl DofMap {
    pub fn new(mesh: &Mesh) -> Self {
        let n = 3 * mesh.n_elements();
        let mut dof_edge = vec![0; n];
        let mut dof_side = vec![0; n];
        let mut edge_dofs = vec![[None, None]; mesh.n_edges()];
        for k in 0..mesh.n_elements() {
            let edges = mesh.element_edges(k);
            let signs = mesh.element_signs(k);
            for i in 0..3 {
                let d = 3 * k + i;
                let side = if signs[i] > 0.0 { 0 } else { 1 };
                dof_edge[d] = edges[i];
                dof_side[d] = side as u8;
                edge_dofs[edges[i]][side] = Some(d);
            }
        }
        DofMap {
            dof_edge,
            dof_side,
            edge_dofs,
            n_boundary: mesh.n_boundary_edges(),
        }
    }

    pub fn n_dofs(&self) -> usize {
        self.dof_edge.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edge_dofs.len()
    }

    pub fn n_boundary_edges(&self) -> usize {
        self.n_boundary
    }

    pub fn dof(&self, k: usize, i: usize) -> usize {
        3 * k + i
    }

    pub fn element(&self, dof: usize) -> usize {
        dof / 3
    }

    pub fn local(&self, dof: usize) -> usize {
        dof % 3
    }

    pub fn edge(&self, dof: usize) -> usize {
        self.dof_edge[dof]
    }

    /// 0 for the plus side of its edge, 1 for the minus side.
    pub fn side(&self, dof: usize) -> usize {
        self.dof_side[dof] as usize
    }

    pub fn is_boundary(&self, dof: usize) -> bool {
        self.edge_dofs[self.dof_edge[dof]][1].is_none()
    }

    /// `[plus, minus]` dofs of edge `e`; boundary edges have no minus dof.
    pub fn edge_dofs(&self, e: usize) -> [Option<usize>; 2] {
        self.edge_dofs[e]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{Diagonal, Rect};

    #[test]
    fn counts_and_sides() {
        let mesh = Mesh::generate_rect(Rect::new(0.0, 1.0, 0.0, 1.0), 3, 2, Diagonal::Alternating).unwrap();
        let dm = DofMap::new(&mesh);
        assert_eq!(dm.n_dofs(), 2 * mesh.n_edges() - mesh.n_boundary_edges());
        let mut interior = 0;
        for e in 0..mesh.n_edges() {
            let [p, m] = dm.edge_dofs(e);
            let p = p.unwrap();
            assert_eq!(dm.edge(p), e);
            assert_eq!(dm.element(p), mesh.edge(e).plus);
            if let Some(m) = m {
                interior += 1;
                assert_eq!(dm.side(m), 1);
                assert_eq!(Some(dm.element(m)), mesh.edge(e).minus);
            } else {
                assert!(dm.is_boundary(p));
            }
        }
        assert_eq!(interior, mesh.n_interior_edges());
    }
}
