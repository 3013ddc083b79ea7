use std::io::Write;

use super::graph::DiGraph;
use crate::assembly::CsrMatrix;

/// Strongly connected components in an order that makes the permuted
/// matrix block lower triangular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockPartition {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct BlockStats {
    pub n_blocks: usize,
    pub max_block: usize,
    pub n_av: f64,
}

/// Entries strictly above the block diagonal after permutation.
#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize)]
pub struct UpperCensus {
    pub count: usize,
    pub max_rel: f64,
}

impl BlockPartition {
    /// Takes blocks in solve order; each block's vertices are sorted.
    pub fn from_blocks(n: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        let mut block_of = vec![usize::MAX; n];
        for (b, verts) in blocks.iter_mut().enumerate() {
            verts.sort_unstable();
            for &v in verts.iter() {
                assert_eq!(block_of[v], usize::MAX, "vertex {v} in two blocks");
                block_of[v] = b;
            }
        }
        assert!(block_of.iter().all(|&b| b != usize::MAX), "blocks do not cover all vertices");
        BlockPartition { blocks, block_of }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, v: usize) -> usize {
        self.block_of[v]
    }

    pub fn n_vertices(&self) -> usize {
        self.block_of.len()
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn max_block(&self) -> usize {
        self.blocks.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn stats(&self) -> BlockStats {
        let n_blocks = self.n_blocks();
        BlockStats {
            n_blocks,
            max_block: self.max_block(),
            n_av: if n_blocks == 0 { 0.0 } else { self.n_vertices() as f64 / n_blocks as f64 },
        }
    }

    /// New position `k` holds old index `perm[k]`.
    pub fn permutation(&self) -> Vec<usize> {
        self.blocks.iter().flatten().copied().collect()
    }

    /// Scans `b` for entries `(i, j)` with `block(j) > block(i)`.
    pub fn upper_census(&self, b: &CsrMatrix<f64>) -> UpperCensus {
        let mut c = UpperCensus::default();
        for i in 0..b.nrows() {
            let scale = b.row_max_abs(i);
            let (cols, vals) = b.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if self.block_of[j] > self.block_of[i] {
                    c.count += 1;
                    c.max_rel = c.max_rel.max(v.abs() / scale);
                }
            }
        }
        c
    }

    /// True when every entry above the block diagonal is at most
    /// `tau * row_scale`.
    pub fn is_block_lower_triangular(&self, b: &CsrMatrix<f64>, tau: f64) -> bool {
        let c = self.upper_census(b);
        c.count == 0 || c.max_rel <= tau
    }

    /// One line per block: `block_id size dof1 dof2 ...`.
    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (b, verts) in self.blocks.iter().enumerate() {
            write!(w, "{b} {}", verts.len())?;
            for v in verts {
                write!(w, " {v}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Tarjan's algorithm with an explicit stack. Components come out sinks
/// first, which for "row depends on column" edges is the forward solve
/// order.
pub fn tarjan_scc(g: &DiGraph) -> BlockPartition {
    const UNSEEN: usize = usize::MAX;
    let n = g.n_vertices();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut calls: Vec<(usize, usize)> = Vec::new();
    let mut blocks = Vec::new();
    let mut next = 0;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        calls.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = calls.last_mut() {
            let nbrs = g.neighbors(v);
            if *pos < nbrs.len() {
                let w = nbrs[*pos];
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    calls.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            calls.pop();
            if let Some(&(parent, _)) = calls.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                blocks.push(comp);
            }
        }
    }
    BlockPartition::from_blocks(n, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edgeless_graph_keeps_index_order() {
        let p = tarjan_scc(&DiGraph::new(5));
        assert_eq!(p.blocks(), &[vec![0], vec![1], vec![2], vec![3], vec![4]]);
        assert_eq!(p.stats().n_av, 1.0);
    }

    #[test]
    fn cycle_is_one_block() {
        let p = tarjan_scc(&DiGraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]));
        assert_eq!(p.blocks(), &[vec![0, 1, 2]]);
        assert_eq!(p.max_block(), 3);
    }

    #[test]
    fn chain_orders_dependencies_first() {
        let p = tarjan_scc(&DiGraph::from_edges(3, [(2, 1), (1, 0)]));
        assert_eq!(p.blocks(), &[vec![0], vec![1], vec![2]]);
        let p = tarjan_scc(&DiGraph::from_edges(3, [(0, 1), (1, 2)]));
        assert_eq!(p.blocks(), &[vec![2], vec![1], vec![0]]);
        assert_eq!(p.permutation(), vec![2, 1, 0]);
    }

    #[test]
    fn long_path_does_not_recurse() {
        let n = 200_000;
        let g = DiGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)));
        assert_eq!(tarjan_scc(&g).n_blocks(), 1);
    }

    #[test]
    fn partition_file_format() {
        let p = tarjan_scc(&DiGraph::from_edges(3, [(0, 2), (2, 0)]));
        let mut out = Vec::new();
        p.write(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0 2 0 2\n1 1 1\n");
    }
}
