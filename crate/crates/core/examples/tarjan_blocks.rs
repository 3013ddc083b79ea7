//! Strongly connected components of a small dependency graph and the block
//! lower triangular permutation they induce.
//!
//! cargo run --example tarjan_blocks

use efdg::assembly::CsrMatrix;
use efdg::scc_solver::{build_digraph, tarjan_scc, DenseLu};

fn main() {
    // 1 <-> 2 form a cycle, 3 depends on 1, 0 depends on 3
    let m = CsrMatrix::from_dense(&[
        vec![2.0, 0.0, 0.0, -1.0],
        vec![0.0, 4.0, -1.0, 0.0],
        vec![0.0, -2.0, 5.0, 0.0],
        vec![0.0, -1.0, 0.0, 3.0],
    ]);
    let (g, dropped) = build_digraph(&m, 0.0);
    println!("{} vertices, {} edges, {} one-way, dropped {:?}", g.n_vertices(), g.n_edges(), g.one_way_edges(), dropped);
    let part = tarjan_scc(&g);
    for (i, b) in part.blocks().iter().enumerate() {
        println!("block {i}: {b:?}");
    }
    let s = part.stats();
    println!("{s:?}");

    let order = part.permutation();
    let pm = m.permute_symmetric(&order);
    println!("permuted (order {order:?}):");
    for row in pm.to_dense() {
        println!("  {row:?}");
    }
    assert!(part.is_block_lower_triangular(&m, 0.0));

    // each diagonal block is factored densely
    let first = m.submatrix(&part.blocks()[0], &part.blocks()[0]);
    let n = first.nrows();
    let lu = DenseLu::factor(first.to_dense().concat(), n).expect("nonsingular");
    let mut x = vec![1.0; n];
    lu.solve(&mut x);
    println!("first block solve of ones: {x:?}");
}
