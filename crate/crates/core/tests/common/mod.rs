#![allow(dead_code)]

use efdg::assembly::CsrMatrix;
use efdg::fitting::LogScaled;
use efdg::mesh::{Diagonal, Mesh, Rect};
use efdg::splitting::SplitTransform;
use nalgebra::{DMatrix, DVector};

/// `|a - b| / max(|a|, |b|)`, computed without leaving log form.
pub fn log_rel(a: LogScaled, b: LogScaled) -> f64 {
    if a.is_zero() && b.is_zero() {
        return 0.0;
    }
    ((a - b).abs() / a.max_abs(b)).to_f64()
}

/// `|a - b| / scale` in log form.
pub fn log_rel_to(a: LogScaled, b: LogScaled, scale: LogScaled) -> f64 {
    if (a - b).is_zero() {
        return 0.0;
    }
    ((a - b).abs() / scale.abs()).to_f64()
}

pub fn test1_mesh(j: usize) -> Mesh {
    Mesh::generate_rect(Rect::new(-1.0, 1.0, -1.0, 1.0), 8, 7, Diagonal::NE).unwrap().refine_to_level(j)
}

pub fn test2_mesh(j: usize) -> Mesh {
    Mesh::generate_rect(Rect::new(-1.0, 1.0, 0.0, 1.0), 16, 7, Diagonal::NE).unwrap().refine_to_level(j)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for it in 0.. {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 || it == 50 {
                    return (x, 2.0 / ((1.0 - x * x) * dp * dp));
                }
            }
            unreachable!()
        })
        .collect()
}

/// Composite Gauss-Legendre on `[a, b]` with `panels` equal panels.
pub fn quad(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    thread_local!(static RULE: Vec<(f64, f64)> = gauss_legendre(12));
    RULE.with(|rule| {
        let h = (b - a) / panels as f64;
        let mut sum = 0.0;
        for p in 0..panels {
            let c = a + (p as f64 + 0.5) * h;
            for &(x, w) in rule {
                sum += w * f(c + 0.5 * h * x);
            }
        }
        0.5 * h * sum
    })
}

/// Crouzeix-Raviart stiffness with coefficient `kappa*_K`, built from
/// barycentric coordinates: the basis function of edge `e` on `K` is
/// `1 - 2 lambda_c` with `c` the vertex opposite `e`.
pub fn cr_stiffness(mesh: &Mesh, t: &SplitTransform, kappa: &[LogScaled]) -> CsrMatrix<LogScaled> {
    let mut trip = Vec::new();
    for (k, tri) in mesh.triangles().iter().enumerate() {
        let v = tri.map(|i| mesh.vertices()[i]);
        let area = 0.5 * ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1])).abs();
        let mut grads = Vec::new();
        for e in mesh.element_edges(k) {
            let [a, b] = mesh.edge(e).vertices;
            let c = *tri.iter().find(|&&x| x != a && x != b).unwrap();
            let (pa, pb, pc) = (mesh.vertices()[a], mesh.vertices()[b], mesh.vertices()[c]);
            let n = [-(pb[1] - pa[1]), pb[0] - pa[0]];
            let s = n[0] * (pc[0] - pa[0]) + n[1] * (pc[1] - pa[1]);
            grads.push((e, [-2.0 * n[0] / s, -2.0 * n[1] / s]));
        }
        for &(e, ge) in &grads {
            for &(f, gf) in &grads {
                if let (Some(i), Some(j)) = (t.cr_index(e), t.cr_index(f)) {
                    let g = area * (ge[0] * gf[0] + ge[1] * gf[1]);
                    trip.push((i, j, kappa[k].scale(g)));
                }
            }
        }
    }
    CsrMatrix::from_triplets(t.n_cr(), t.n_cr(), trip)
}

/// Solves `B u = f` densely. `B` is first equilibrated in log form (Ruiz
/// iterations on row and column maxima) so the double-precision LU sees
/// entries of order one.
pub fn dense_solve(b: &CsrMatrix<LogScaled>, f: &[LogScaled]) -> Vec<LogScaled> {
    let n = b.nrows();
    let entries: Vec<(usize, usize, LogScaled)> = b.iter().filter(|e| !e.2.is_zero()).collect();
    let (mut r, mut c) = (vec![0.0; n], vec![0.0; n]);
    for _ in 0..100 {
        let mut rmax = vec![f64::NEG_INFINITY; n];
        for &(i, j, v) in &entries {
            rmax[i] = rmax[i].max(v.log_mag() + r[i] + c[j]);
        }
        for i in 0..n {
            r[i] -= 0.5 * rmax[i];
        }
        let mut cmax = vec![f64::NEG_INFINITY; n];
        for &(i, j, v) in &entries {
            cmax[j] = cmax[j].max(v.log_mag() + r[i] + c[j]);
        }
        for j in 0..n {
            c[j] -= 0.5 * cmax[j];
        }
        if rmax.iter().chain(&cmax).all(|m| m.abs() < 1e-3) {
            break;
        }
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    for &(i, j, v) in &entries {
        m[(i, j)] = f64::from(v.sign()) * (v.log_mag() + r[i] + c[j]).exp();
    }
    let shift = f.iter().enumerate().map(|(i, v)| v.log_mag() + r[i]).fold(f64::NEG_INFINITY, f64::max);
    let rhs = DVector::from_iterator(n, f.iter().enumerate().map(|(i, v)| {
        if v.is_zero() {
            0.0
        } else {
            f64::from(v.sign()) * (v.log_mag() + r[i] - shift).exp()
        }
    }));
    let y = m.lu().solve(&rhs).expect("dense LU");
    (0..n).map(|j| LogScaled::from_f64(y[j]) * LogScaled::from_log(1, c[j] + shift)).collect()
}

/// Gaussian elimination with row-scaled partial pivoting, carried out in
/// log arithmetic so no entry leaves the representable range.
pub fn log_gauss_solve(b: &CsrMatrix<LogScaled>, f: &[LogScaled]) -> Vec<LogScaled> {
    let n = b.nrows();
    let mut a = vec![LogScaled::ZERO; n * n];
    for (i, j, v) in b.iter() {
        a[i * n + j] = v;
    }
    let mut rhs = f.to_vec();
    for i in 0..n {
        let s = a[i * n..(i + 1) * n].iter().fold(LogScaled::ZERO, |m, &v| m.max_abs(v));
        for v in &mut a[i * n..(i + 1) * n] {
            *v = *v / s;
        }
        rhs[i] = rhs[i] / s;
    }
    for k in 0..n {
        let p = (k..n).max_by(|&x, &y| a[x * n + k].cmp_abs(&a[y * n + k])).unwrap();
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            rhs.swap(k, p);
        }
        let piv = a[k * n + k];
        assert!(!piv.is_zero(), "singular at column {k}");
        for i in k + 1..n {
            let l = a[i * n + k] / piv;
            if l.is_zero() {
                continue;
            }
            for j in k + 1..n {
                let u = a[k * n + j];
                if !u.is_zero() {
                    a[i * n + j] = a[i * n + j] - l * u;
                }
            }
            rhs[i] = rhs[i] - l * rhs[k];
        }
    }
    let mut x = vec![LogScaled::ZERO; n];
    for k in (0..n).rev() {
        let mut s = rhs[k];
        for j in k + 1..n {
            s = s - a[k * n + j] * x[j];
        }
        x[k] = s / a[k * n + k];
    }
    x
}
