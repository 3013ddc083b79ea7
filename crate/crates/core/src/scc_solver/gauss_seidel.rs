use super::lu::DenseLu;
use super::tarjan::BlockPartition;
use crate::assembly::CsrMatrix;
use crate::error::{Error, Result};
use crate::fitting::LogScaled;

/// Diagonal blocks of a matrix, factored once, for repeated block
/// Gauss-Seidel sweeps in partition order.
#[derive(Debug)]
pub struct BlockGaussSeidel<'a> {
    matrix: &'a CsrMatrix<f64>,
    partition: &'a BlockPartition,
    factors: Vec<DenseLu>,
}

impl<'a> BlockGaussSeidel<'a> {
    pub fn new(matrix: &'a CsrMatrix<f64>, partition: &'a BlockPartition, block_limit: usize) -> Result<Self> {
        assert_eq!(matrix.nrows(), partition.n_vertices());
        let mut local = vec![usize::MAX; matrix.nrows()];
        let mut factors = Vec::with_capacity(partition.n_blocks());
        for (b, verts) in partition.blocks().iter().enumerate() {
            let m = verts.len();
            if m > block_limit {
                return Err(Error::BlockTooLarge {
                    block: b,
                    size: m,
                    limit: block_limit,
                });
            }
            for (li, &v) in verts.iter().enumerate() {
                local[v] = li;
            }
            let mut dense = vec![0.0; m * m];
            for (li, &r) in verts.iter().enumerate() {
                let (cols, vals) = matrix.row(r);
                for (&c, &v) in cols.iter().zip(vals) {
                    if partition.block_of(c) == b {
                        dense[li * m + local[c]] = v;
                    }
                }
            }
            factors.push(DenseLu::factor(dense, m).ok_or(Error::SingularBlock { block: b, size: m })?);
        }
        Ok(BlockGaussSeidel {
            matrix,
            partition,
            factors,
        })
    }

    /// One sweep of `u <- u + I_i B_i^{-1} I_i^T (f - B u)` over all blocks.
    pub fn sweep(&self, u: &mut [f64], f: &[f64]) {
        let mut r = Vec::new();
        for (verts, lu) in self.partition.blocks().iter().zip(&self.factors) {
            r.clear();
            for &i in verts {
                let (cols, vals) = self.matrix.row(i);
                let bu: f64 = cols.iter().zip(vals).map(|(&j, &v)| v * u[j]).sum();
                r.push(f[i] - bu);
            }
            lu.solve(&mut r);
            for (&i, d) in verts.iter().zip(&r) {
                u[i] += d;
            }
        }
    }
}

#[derive(Debug)]
enum LogBlock {
    Single(LogScaled),
    /// LU of `diag(1/row) B_i diag(1/col)`.
    Dense {
        id: usize,
        entries: Vec<(usize, usize, LogScaled)>,
        lu: DenseLu,
        row: Vec<LogScaled>,
        col: Vec<LogScaled>,
    },
}

/// Scaled dense factorization of one block. `col0` holds initial column
/// log scales.
fn factor_block(id: usize, entries: Vec<(usize, usize, LogScaled)>, m: usize, col0: Vec<f64>) -> Result<LogBlock> {
    let singular = || Error::SingularBlock { block: id, size: m };
    let (row_log, col_log) = ruiz_scaling(&entries, m, col0).ok_or_else(singular)?;
    let row: Vec<LogScaled> = row_log.iter().map(|&l| LogScaled::from_log(1, l)).collect();
    let col: Vec<LogScaled> = col_log.iter().map(|&l| LogScaled::from_log(1, l)).collect();
    let mut scaled = vec![0.0; m * m];
    for &(i, j, v) in &entries {
        scaled[i * m + j] = (v / row[i] / col[j]).to_f64();
    }
    let lu = DenseLu::factor(scaled, m).ok_or_else(singular)?;
    Ok(LogBlock::Dense { id, entries, lu, row, col })
}

/// Block Gauss-Seidel on a matrix kept in log arithmetic. Residuals are
/// accumulated in log form; each diagonal block is scaled on both sides
/// before its dense factorization, so blocks whose entries span far more
/// than the double range are still solved accurately.
#[derive(Debug)]
pub struct LogBlockGaussSeidel<'a> {
    matrix: &'a CsrMatrix<LogScaled>,
    partition: &'a BlockPartition,
    blocks: Vec<LogBlock>,
}

impl<'a> LogBlockGaussSeidel<'a> {
    pub fn new(matrix: &'a CsrMatrix<LogScaled>, partition: &'a BlockPartition, block_limit: usize) -> Result<Self> {
        assert_eq!(matrix.nrows(), partition.n_vertices());
        let mut local = vec![usize::MAX; matrix.nrows()];
        let mut blocks = Vec::with_capacity(partition.n_blocks());
        for (b, verts) in partition.blocks().iter().enumerate() {
            let m = verts.len();
            if m > block_limit {
                return Err(Error::BlockTooLarge {
                    block: b,
                    size: m,
                    limit: block_limit,
                });
            }
            let singular = || Error::SingularBlock { block: b, size: m };
            if m == 1 {
                let d = matrix.get(verts[0], verts[0]);
                if d.is_zero() {
                    return Err(singular());
                }
                blocks.push(LogBlock::Single(d));
                continue;
            }
            for (li, &v) in verts.iter().enumerate() {
                local[v] = li;
            }
            let mut entries = Vec::new();
            for (li, &r) in verts.iter().enumerate() {
                let (cols, vals) = matrix.row(r);
                for (&c, &v) in cols.iter().zip(vals) {
                    if partition.block_of(c) == b && !v.is_zero() {
                        entries.push((li, local[c], v));
                    }
                }
            }
            blocks.push(factor_block(b, entries, m, vec![0.0; m])?);
        }
        Ok(LogBlockGaussSeidel { matrix, partition, blocks })
    }

    /// Refactors every multi-dof block with its columns weighted by the
    /// current `|u|`. Inside a block the solution can span many orders of
    /// magnitude; with these weights the LU error is small relative to each
    /// component instead of only relative to the largest one.
    pub fn rescale(&mut self, u: &[LogScaled]) -> Result<()> {
        for (verts, block) in self.partition.blocks().iter().zip(self.blocks.iter_mut()) {
            if let LogBlock::Dense { id, entries, .. } = block {
                let top = verts.iter().fold(LogScaled::ZERO, |a, &i| a.max_abs(u[i]));
                if top.is_zero() {
                    continue;
                }
                let col0 = verts
                    .iter()
                    .map(|&i| if u[i].is_zero() { top.log_mag() } else { u[i].log_mag() })
                    .map(|l| -l)
                    .collect();
                *block = factor_block(*id, std::mem::take(entries), verts.len(), col0)?;
            }
        }
        Ok(())
    }

    /// One sweep of `u <- u + I_i B_i^{-1} I_i^T (f - B u)` over all blocks.
    pub fn sweep(&self, u: &mut [LogScaled], f: &[LogScaled]) {
        let mut r = Vec::new();
        for (verts, block) in self.partition.blocks().iter().zip(&self.blocks) {
            r.clear();
            for &i in verts {
                let (cols, vals) = self.matrix.row(i);
                let bu: LogScaled = cols.iter().zip(vals).map(|(&j, &v)| v * u[j]).sum();
                r.push(f[i] - bu);
            }
            match block {
                LogBlock::Single(d) => {
                    let i = verts[0];
                    u[i] = u[i] + r[0] / *d;
                }
                LogBlock::Dense { lu, row, col, .. } => {
                    for (v, s) in r.iter_mut().zip(row) {
                        *v = *v / *s;
                    }
                    let shift = r.iter().fold(LogScaled::ZERO, |a, &v| a.max_abs(v));
                    if shift.is_zero() {
                        continue;
                    }
                    let mut y: Vec<f64> = r.iter().map(|v| (*v / shift).to_f64()).collect();
                    lu.solve(&mut y);
                    for ((&i, y), c) in verts.iter().zip(y).zip(col) {
                        u[i] = u[i] + LogScaled::from_f64(y) * shift / *c;
                    }
                }
            }
        }
    }
}

/// Log row and column scales that bring every row and column maximum of the
/// block to about one (Ruiz equilibration on the logarithms). `None` when a
/// row or column is empty.
fn ruiz_scaling(entries: &[(usize, usize, LogScaled)], m: usize, mut col: Vec<f64>) -> Option<(Vec<f64>, Vec<f64>)> {
    let logs: Vec<f64> = entries.iter().map(|e| e.2.log_mag()).collect();
    let mut row = vec![0.0; m];
    let mut rmax = vec![f64::NEG_INFINITY; m];
    let mut cmax = vec![f64::NEG_INFINITY; m];
    for _ in 0..60 {
        rmax.fill(f64::NEG_INFINITY);
        cmax.fill(f64::NEG_INFINITY);
        for (&(i, j, _), &l) in entries.iter().zip(&logs) {
            let v = l - row[i] - col[j];
            rmax[i] = rmax[i].max(v);
            cmax[j] = cmax[j].max(v);
        }
        if rmax.iter().chain(&cmax).any(|v| !v.is_finite()) {
            return None;
        }
        let worst = rmax.iter().chain(&cmax).fold(0.0f64, |a, v| a.max(v.abs()));
        if worst < 0.5 {
            break;
        }
        for i in 0..m {
            row[i] += 0.5 * rmax[i];
            col[i] += 0.5 * cmax[i];
        }
    }
    Some((row, col))
}

/// `||f - B u|| / ||f||`, or the absolute residual when `f = 0`.
pub fn relative_residual(b: &CsrMatrix<f64>, u: &[f64], f: &[f64]) -> f64 {
    let bu = b.mul_vec(u);
    let num = f.iter().zip(&bu).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let den = f.iter().map(|a| a * a).sum::<f64>().sqrt();
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct GaussSeidelResult {
    pub u: Vec<f64>,
    pub sweeps: usize,
    pub residuals: Vec<f64>,
    pub converged: bool,
}

/// Block Gauss-Seidel from `u = 0` until the relative residual is at most
/// `tol` or `max_sweeps` sweeps have run.
pub fn block_gauss_seidel(
    b: &CsrMatrix<f64>,
    f: &[f64],
    partition: &BlockPartition,
    tol: f64,
    max_sweeps: usize,
    block_limit: usize,
) -> Result<GaussSeidelResult> {
    let gs = BlockGaussSeidel::new(b, partition, block_limit)?;
    let mut u = vec![0.0; b.nrows()];
    let mut residuals = Vec::new();
    let mut converged = false;
    for _ in 0..max_sweeps {
        gs.sweep(&mut u, f);
        let r = relative_residual(b, &u, f);
        residuals.push(r);
        if r <= tol {
            converged = true;
            break;
        }
    }
    Ok(GaussSeidelResult {
        u,
        sweeps: residuals.len(),
        residuals,
        converged,
    })
}
