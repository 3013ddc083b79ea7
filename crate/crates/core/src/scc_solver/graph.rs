use crate::assembly::CsrMatrix;

/// Directed graph stored as sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiGraph {
    adj: Vec<Vec<usize>>,
}

/// Off-diagonal entries left out of the graph by the drop tolerance.
#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize)]
pub struct DropCensus {
    pub count: usize,
    /// Largest dropped `|b_ij| / max_k |b_ik|`.
    pub max_rel: f64,
}

impl DiGraph {
    pub fn new(n: usize) -> Self {
        DiGraph { adj: vec![Vec::new(); n] }
    }

    /// Self-loops and duplicates are ignored.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = DiGraph::new(n);
        for (i, j) in edges {
            if i != j {
                g.adj[i].push(j);
            }
        }
        for a in &mut g.adj {
            a.sort_unstable();
            a.dedup();
        }
        g
    }

    pub fn n_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn n_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].binary_search(&j).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(i, a)| a.iter().map(move |&j| (i, j)))
    }

    /// Number of edges `(i, j)` whose reverse `(j, i)` is absent.
    pub fn one_way_edges(&self) -> usize {
        self.edges().filter(|&(i, j)| !self.has_edge(j, i)).count()
    }
}

/// Edge `(i, j)` for every off-diagonal `|b_ij| > tau * max_k |b_ik|`: row
/// `i` depends on unknown `j`.
pub fn build_digraph(b: &CsrMatrix<f64>, tau: f64) -> (DiGraph, DropCensus) {
    assert_eq!(b.nrows(), b.ncols(), "digraph needs a square matrix");
    let mut g = DiGraph::new(b.nrows());
    let mut census = DropCensus::default();
    for i in 0..b.nrows() {
        let scale = b.row_max_abs(i);
        let (cols, vals) = b.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            if i == j {
                continue;
            }
            if v.abs() > tau * scale {
                g.adj[i].push(j);
            } else {
                census.count += 1;
                census.max_rel = census.max_rel.max(v.abs() / scale);
            }
        }
    }
    (g, census)
}
