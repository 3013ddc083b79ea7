//! Conforming triangular meshes with full edge topology.
//!
//! Local numbering convention: local edge `i` of a triangle is the edge
//! opposite its local vertex `i`. Every edge carries a unit normal `n_e`
//! pointing out of its `plus` element, which is always the lower element
//! index; on boundary edges `n_e` is the outward normal of the domain.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }
}

/// Diagonal pattern used to split each rectangular cell into two triangles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Diagonal {
    /// From the lower-left to the upper-right corner.
    NE,
    /// From the lower-right to the upper-left corner.
    NW,
    /// NE on cells with even `i + j`, NW otherwise.
    Alternating,
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub midpoint: Point,
    pub length: f64,
    /// Unit normal, outward with respect to `plus`.
    pub normal: [f64; 2],
    pub plus: usize,
    pub minus: Option<usize>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.minus.is_none()
    }

    /// Sign of `n_e` relative to the outward normal of element `k`.
    pub fn sign_for(&self, k: usize) -> Option<f64> {
        if k == self.plus {
            Some(1.0)
        } else if self.minus == Some(k) {
            Some(-1.0)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<Edge>,
    element_edges: Vec<[usize; 3]>,
    element_signs: Vec<[f64; 3]>,
    areas: Vec<f64>,
    n_boundary: usize,
}

/// Result of [`Mesh::check_acute`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AcuteReport {
    pub is_acute: bool,
    pub is_weakly_acute: bool,
    pub max_angle: f64,
}

const ANGLE_TOL: f64 = 1e-12;

fn signed_area2(a: Point, b: Point, c: Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

impl Mesh {
    /// Builds the edge table and orientation data from raw vertices and
    /// triangles. Triangles are reoriented counterclockwise.
    pub fn build_topology(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Mesh> {
        let nv = vertices.len();
        let mut tris = triangles;
        let mut areas = Vec::with_capacity(tris.len());
        let mut seen: HashMap<[usize; 3], usize> = HashMap::new();
        for (k, t) in tris.iter_mut().enumerate() {
            for &v in t.iter() {
                if v >= nv {
                    return Err(Error::InvalidArgument(format!(
                        "triangle {k} references vertex {v}, but there are only {nv} vertices"
                    )));
                }
            }
            let mut key = *t;
            key.sort_unstable();
            if key[0] == key[1] || key[1] == key[2] {
                return Err(Error::DegenerateTriangle(k));
            }
            if let Some(&first) = seen.get(&key) {
                return Err(Error::DuplicateTriangle(k, first));
            }
            seen.insert(key, k);
            let a2 = signed_area2(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
            if a2 == 0.0 || !a2.is_finite() {
                return Err(Error::DegenerateTriangle(k));
            }
            if a2 < 0.0 {
                t.swap(1, 2);
            }
            areas.push(0.5 * a2.abs());
        }

        let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut element_edges = vec![[0usize; 3]; tris.len()];
        let mut element_signs = vec![[0.0f64; 3]; tris.len()];
        for (k, t) in tris.iter().enumerate() {
            for i in 0..3 {
                let a = t[(i + 1) % 3];
                let b = t[(i + 2) % 3];
                let key = (a.min(b), a.max(b));
                match edge_index.get(&key) {
                    None => {
                        let pa = vertices[a];
                        let pb = vertices[b];
                        let dx = pb[0] - pa[0];
                        let dy = pb[1] - pa[1];
                        let length = dx.hypot(dy);
                        // (a, b) runs counterclockwise around k, so the
                        // outward normal is the tangent rotated clockwise.
                        let normal = [dy / length, -dx / length];
                        edge_index.insert(key, edges.len());
                        element_edges[k][i] = edges.len();
                        element_signs[k][i] = 1.0;
                        edges.push(Edge {
                            vertices: [a, b],
                            midpoint: [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])],
                            length,
                            normal,
                            plus: k,
                            minus: None,
                        });
                    }
                    Some(&e) => {
                        if edges[e].minus.is_some() {
                            return Err(Error::NonManifold(key.0, key.1));
                        }
                        edges[e].minus = Some(k);
                        element_edges[k][i] = e;
                        element_signs[k][i] = -1.0;
                    }
                }
            }
        }
        let n_boundary = edges.iter().filter(|e| e.is_boundary()).count();
        Ok(Mesh {
            vertices,
            triangles: tris,
            edges,
            element_edges,
            element_signs,
            areas,
            n_boundary,
        })
    }

    /// Structured mesh of `2 * nx * ny` triangles on a rectangle.
    pub fn generate_rect(bounds: Rect, nx: usize, ny: usize, diagonal: Diagonal) -> Result<Mesh> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidArgument(format!(
                "grid counts must be positive (nx={nx}, ny={ny})"
            )));
        }
        if !(bounds.x0 < bounds.x1 && bounds.y0 < bounds.y1) {
            return Err(Error::InvalidArgument(format!(
                "degenerate bounds {bounds:?}"
            )));
        }
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            let y = bounds.y0 + (bounds.y1 - bounds.y0) * (j as f64) / (ny as f64);
            for i in 0..=nx {
                let x = bounds.x0 + (bounds.x1 - bounds.x0) * (i as f64) / (nx as f64);
                vertices.push([x, y]);
            }
        }
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut triangles = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (v00, v10, v01, v11) = (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
                let ne = match diagonal {
                    Diagonal::NE => true,
                    Diagonal::NW => false,
                    Diagonal::Alternating => (i + j) % 2 == 0,
                };
                if ne {
                    triangles.push([v00, v10, v11]);
                    triangles.push([v00, v11, v01]);
                } else {
                    triangles.push([v00, v10, v01]);
                    triangles.push([v10, v11, v01]);
                }
            }
        }
        Mesh::build_topology(vertices, triangles)
    }

    /// Red refinement: every triangle is split into four congruent children
    /// through its edge midpoints. Children of parent `k` are `4k..4k+4`, the
    /// last one being the central triangle.
    pub fn refine_red(&self) -> Mesh {
        let nv = self.vertices.len();
        let mut vertices = self.vertices.clone();
        vertices.extend(self.edges.iter().map(|e| e.midpoint));
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for (k, t) in self.triangles.iter().enumerate() {
            let [e0, e1, e2] = self.element_edges[k];
            let (m0, m1, m2) = (nv + e0, nv + e1, nv + e2);
            triangles.push([t[0], m2, m1]);
            triangles.push([m2, t[1], m0]);
            triangles.push([m1, m0, t[2]]);
            triangles.push([m0, m1, m2]);
        }
        Mesh::build_topology(vertices, triangles)
            .expect("red refinement of a valid mesh is a valid mesh")
    }

    /// Refines `levels - 1` times, so `levels == 1` returns a copy.
    pub fn refine_to_level(&self, levels: usize) -> Mesh {
        let mut m = self.clone();
        for _ in 1..levels {
            m = m.refine_red();
        }
        m
    }

    pub fn check_acute(&self) -> AcuteReport {
        let mut max_angle: f64 = 0.0;
        for t in &self.triangles {
            for i in 0..3 {
                let p = self.vertices[t[i]];
                let a = self.vertices[t[(i + 1) % 3]];
                let b = self.vertices[t[(i + 2) % 3]];
                let u = [a[0] - p[0], a[1] - p[1]];
                let v = [b[0] - p[0], b[1] - p[1]];
                let cross = u[0] * v[1] - u[1] * v[0];
                let dot = u[0] * v[0] + u[1] * v[1];
                max_angle = max_angle.max(cross.abs().atan2(dot));
            }
        }
        AcuteReport {
            is_acute: max_angle < FRAC_PI_2 - ANGLE_TOL,
            is_weakly_acute: max_angle <= FRAC_PI_2 + ANGLE_TOL,
            max_angle,
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn element_edges(&self, k: usize) -> [usize; 3] {
        self.element_edges[k]
    }

    /// `+1` where `k` is the plus element of its local edge, `-1` otherwise.
    pub fn element_signs(&self, k: usize) -> [f64; 3] {
        self.element_signs[k]
    }

    pub fn area(&self, k: usize) -> f64 {
        self.areas[k]
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn n_elements(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_boundary_edges(&self) -> usize {
        self.n_boundary
    }

    pub fn n_interior_edges(&self) -> usize {
        self.edges.len() - self.n_boundary
    }

    /// Outward unit normal of element `k` on its local edge `i`.
    pub fn outward_normal(&self, k: usize, i: usize) -> [f64; 2] {
        let n = self.edges[self.element_edges[k][i]].normal;
        let s = self.element_signs[k][i];
        [s * n[0], s * n[1]]
    }

    /// Local slot of edge `e` inside element `k`.
    pub fn local_index(&self, k: usize, e: usize) -> Option<usize> {
        self.element_edges[k].iter().position(|&x| x == e)
    }

    pub fn barycenter(&self, k: usize) -> Point {
        let t = self.triangles[k];
        let mut c = [0.0, 0.0];
        for &v in &t {
            c[0] += self.vertices[v][0];
            c[1] += self.vertices[v][1];
        }
        [c[0] / 3.0, c[1] / 3.0]
    }

    /// Midpoint of local edge `i` of element `k`.
    pub fn local_midpoint(&self, k: usize, i: usize) -> Point {
        self.edges[self.element_edges[k][i]].midpoint
    }

    pub fn bounding_box(&self) -> Rect {
        let mut r = Rect::new(f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            r.x0 = r.x0.min(p[0]);
            r.x1 = r.x1.max(p[0]);
            r.y0 = r.y0.min(p[1]);
            r.y1 = r.y1.max(p[1]);
        }
        r
    }

    /// Reads the plain-text mesh format: `nv nt`, then `nv` lines `x y`,
    /// then `nt` lines `i j k` with 0-based vertex indices.
    pub fn read_text<R: BufRead>(reader: R) -> Result<Mesh> {
        let mut tokens = Vec::new();
        for line in reader.lines() {
            let line = line.map_err(|e| Error::parse("mesh text", e.to_string()))?;
            tokens.extend(line.split_whitespace().map(str::to_owned));
        }
        let mut it = tokens.into_iter();
        let mut next = |what: &str| {
            it.next()
                .ok_or_else(|| Error::parse("mesh text", format!("unexpected end of input reading {what}")))
        };
        let parse_usize = |s: String| {
            s.parse::<usize>()
                .map_err(|e| Error::parse("mesh text", format!("bad integer {s:?}: {e}")))
        };
        let parse_f64 = |s: String| {
            s.parse::<f64>()
                .map_err(|e| Error::parse("mesh text", format!("bad number {s:?}: {e}")))
        };
        let nv = parse_usize(next("vertex count")?)?;
        let nt = parse_usize(next("triangle count")?)?;
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let x = parse_f64(next("x")?)?;
            let y = parse_f64(next("y")?)?;
            vertices.push([x, y]);
        }
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let i = parse_usize(next("vertex index")?)?;
            let j = parse_usize(next("vertex index")?)?;
            let k = parse_usize(next("vertex index")?)?;
            triangles.push([i, j, k]);
        }
        Mesh::build_topology(vertices, triangles)
    }

    pub fn read_text_file(path: &Path) -> Result<Mesh> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Mesh::read_text(std::io::BufReader::new(f))
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{} {}", self.vertices.len(), self.triangles.len())?;
        for p in &self.vertices {
            writeln!(w, "{} {}", p[0], p[1])?;
        }
        for t in &self.triangles {
            writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_square(diag: Diagonal) -> Mesh {
        Mesh::generate_rect(Rect::new(0.0, 1.0, 0.0, 1.0), 1, 1, diag).unwrap()
    }

    fn assert_counting(m: &Mesh) {
        assert_eq!(3 * m.n_elements(), 2 * m.n_edges() - m.n_boundary_edges());
    }

    #[test]
    fn two_triangle_square_counts() {
        let m = unit_square(Diagonal::NE);
        assert_eq!(m.n_elements(), 2);
        assert_eq!(m.n_edges(), 5);
        assert_eq!(m.n_boundary_edges(), 4);
        assert_eq!(2 * m.n_edges() - m.n_boundary_edges(), 6);
        assert_counting(&m);
    }

    #[test]
    fn four_by_four_counts() {
        let m = Mesh::generate_rect(Rect::new(-1.0, 1.0, -1.0, 1.0), 4, 4, Diagonal::NE).unwrap();
        assert_eq!(m.n_elements(), 32);
        assert_eq!(m.n_boundary_edges(), 16);
        assert_counting(&m);
    }

    #[test]
    fn alternating_mesh_is_weakly_acute() {
        let m = Mesh::generate_rect(Rect::new(0.0, 1.0, 0.0, 1.0), 2, 2, Diagonal::Alternating).unwrap();
        assert_eq!(m.n_elements(), 8);
        let r = m.check_acute();
        assert!(!r.is_acute);
        assert!(r.is_weakly_acute);
        assert!((r.max_angle - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn equilateral_is_acute() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]];
        let m = Mesh::build_topology(v, vec![[0, 1, 2]]).unwrap();
        let r = m.check_acute();
        assert!(r.is_acute);
        assert!((r.max_angle - PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn obtuse_angle_is_reported() {
        // angle at the origin is exactly 2 rad
        let v = vec![[0.0, 0.0], [1.0, 0.0], [2f64.cos(), 2f64.sin()]];
        let m = Mesh::build_topology(v, vec![[0, 1, 2]]).unwrap();
        let r = m.check_acute();
        assert!((r.max_angle - 2.0).abs() < 1e-14);
        assert!(!r.is_weakly_acute);
    }

    #[test]
    fn shared_edge_is_interior() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
        let m = Mesh::build_topology(v, vec![[0, 1, 2], [1, 3, 2]]).unwrap();
        let interior: Vec<_> = m.edges().iter().filter(|e| !e.is_boundary()).collect();
        assert_eq!(interior.len(), 1);
        let mut vs = interior[0].vertices;
        vs.sort_unstable();
        assert_eq!(vs, [1, 2]);
        assert_eq!(m.n_boundary_edges(), 4);
    }

    #[test]
    fn single_triangle_all_boundary() {
        let m = Mesh::build_topology(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 2, 1]]).unwrap();
        assert_eq!(m.n_boundary_edges(), 3);
        assert_eq!(m.n_interior_edges(), 0);
        // reoriented counterclockwise
        let t = m.triangles()[0];
        let p = m.vertices();
        assert!(signed_area2(p[t[0]], p[t[1]], p[t[2]]) > 0.0);
    }

    #[test]
    fn non_manifold_rejected() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.5, 1.0], [0.5, -1.0], [0.5, 2.0]];
        let err = Mesh::build_topology(v, vec![[0, 1, 2], [0, 3, 1], [0, 1, 4]]).unwrap_err();
        assert!(matches!(err, Error::NonManifold(0, 1)));
    }

    #[test]
    fn duplicate_rejected() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let err = Mesh::build_topology(v, vec![[0, 1, 2], [2, 1, 0]]).unwrap_err();
        assert!(matches!(err, Error::DuplicateTriangle(1, 0)));
    }

    #[test]
    fn degenerate_bounds_rejected() {
        assert!(Mesh::generate_rect(Rect::new(1.0, 1.0, 0.0, 1.0), 2, 2, Diagonal::NE).is_err());
        assert!(Mesh::generate_rect(Rect::new(0.0, 1.0, 0.0, 1.0), 0, 2, Diagonal::NE).is_err());
    }

    #[test]
    fn red_refinement_counts() {
        let m = unit_square(Diagonal::NE);
        let r = m.refine_red();
        assert_eq!(r.n_elements(), 8);
        assert_eq!(r.n_edges(), 16);
        assert_eq!(r.n_boundary_edges(), 8);
        assert_eq!(r.n_edges(), 2 * m.n_edges() + 3 * m.n_elements());
        let rr = r.refine_red();
        assert_eq!(rr.n_elements(), 16 * m.n_elements());
        assert_counting(&rr);
    }

    #[test]
    fn reference_sized_mesh_level_two() {
        let m = Mesh::generate_rect(Rect::new(-1.0, 1.0, -1.0, 1.0), 8, 7, Diagonal::NE).unwrap();
        assert_eq!(m.n_elements(), 112);
        assert_eq!(m.refine_red().n_elements(), 448);
    }

    #[test]
    fn children_are_similar_and_nested() {
        let m = Mesh::generate_rect(Rect::new(0.0, 2.0, 0.0, 1.0), 2, 1, Diagonal::NW).unwrap();
        let r = m.refine_red();
        for k in 0..m.n_elements() {
            for c in 0..4 {
                let child = 4 * k + c;
                assert!((r.area(child) - m.area(k) / 4.0).abs() < 1e-15);
                let b = r.barycenter(child);
                // child barycenter lies inside the parent
                let t = m.triangles()[k];
                let p = m.vertices();
                for i in 0..3 {
                    assert!(signed_area2(p[t[i]], p[t[(i + 1) % 3]], b) > 0.0);
                }
            }
        }
        // boundary vertex set of the parent is preserved
        for e in m.edges().iter().filter(|e| e.is_boundary()) {
            for &v in &e.vertices {
                assert_eq!(r.vertices()[v], m.vertices()[v]);
            }
        }
    }

    #[test]
    fn normals_are_outward_and_signed() {
        let m = Mesh::generate_rect(Rect::new(-1.0, 1.0, 0.0, 1.0), 3, 2, Diagonal::Alternating).unwrap();
        for k in 0..m.n_elements() {
            let c = m.barycenter(k);
            for i in 0..3 {
                let e = m.edge(m.element_edges(k)[i]);
                let n = m.outward_normal(k, i);
                let d = [e.midpoint[0] - c[0], e.midpoint[1] - c[1]];
                assert!(n[0] * d[0] + n[1] * d[1] > 0.0);
                assert_eq!(e.sign_for(k), Some(m.element_signs(k)[i]));
            }
        }
        for e in m.edges() {
            if let Some(minus) = e.minus {
                assert!(e.plus < minus);
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let m = Mesh::generate_rect(Rect::new(-1.0, 1.0, 0.0, 1.0), 3, 2, Diagonal::NE).unwrap();
        let mut buf = Vec::new();
        m.write_text(&mut buf).unwrap();
        let back = Mesh::read_text(&buf[..]).unwrap();
        assert_eq!(back.vertices(), m.vertices());
        assert_eq!(back.triangles(), m.triangles());
        assert_eq!(back.n_edges(), m.n_edges());
    }

    #[test]
    fn text_parse_errors() {
        assert!(Mesh::read_text("3 1\n0 0\n1 0\n".as_bytes()).is_err());
        assert!(Mesh::read_text("3 1\n0 0\n1 0\n0 1\n0 1 7\n".as_bytes()).is_err());
    }

    proptest::proptest! {
        #[test]
        fn generated_meshes_satisfy_invariants(
            nx in 1usize..6, ny in 1usize..6, d in 0u8..3, levels in 1usize..3,
            w in 0.5f64..3.0, h in 0.5f64..3.0,
        ) {
            let diag = [Diagonal::NE, Diagonal::NW, Diagonal::Alternating][d as usize];
            let m = Mesh::generate_rect(Rect::new(0.0, w, 0.0, h), nx, ny, diag).unwrap()
                .refine_to_level(levels);
            proptest::prop_assert_eq!(3 * m.n_elements(), 2 * m.n_edges() - m.n_boundary_edges());
            let total: f64 = m.areas().iter().sum();
            proptest::prop_assert!((total - w * h).abs() <= 1e-12 * w * h);
            proptest::prop_assert!(m.areas().iter().all(|&a| a > 0.0));
            proptest::prop_assert!(m.edges().iter().all(|e| e.length > 0.0));
            for e in m.edges() {
                let minus_sign = e.minus.map(|k| e.sign_for(k));
                proptest::prop_assert_eq!(e.sign_for(e.plus), Some(1.0));
                if let Some(s) = minus_sign {
                    proptest::prop_assert_eq!(s, Some(-1.0));
                }
            }
        }
    }
}
