//! Edge and triangle means of exp(-psi/eps) without overflow.
//!
//! cargo run --example exponential_means

use efdg::fitting::{edge_exp_mean, tri_exp_mean, LogScaled};

fn main() -> efdg::Result<()> {
    println!("{:>8} {:>22} {:>22}", "eps", "edge mean (log)", "triangle mean (log)");
    for eps in [1.0, 1e-1, 1e-3, 1e-5, 1e-7, 1e-9] {
        // psi = x + y on an edge from (0,0) to (0.25,0) and a right triangle
        let e = edge_exp_mean(0.0, 0.25, eps)?;
        let t = tri_exp_mean(0.0, 0.25, 0.25, eps)?;
        println!("{eps:>8.0e} {:>22.12} {:>22.12}", e.log_mag(), t.log_mag());
    }

    // nearly constant psi goes through the series branch
    let flat = edge_exp_mean(1.0, 1.0 + 1e-12, 1.0)?;
    println!("flat edge: {:.16} (exp(-1) = {:.16})", flat.to_f64(), (-1f64).exp());

    // values far outside the double range still compare and multiply
    let huge = LogScaled::exp_neg_ratio(-1.0, 1e-7);
    let tiny = LogScaled::exp_neg_ratio(1.0, 1e-7);
    println!("huge: log = {:.1}, finite: {}, as f64: {:?}", huge.log_mag(), huge.is_finite(), huge.try_to_f64());
    println!("huge * tiny = {}", (huge * tiny).to_f64());
    Ok(())
}
