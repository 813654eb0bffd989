//! Iso-contours of grid fields: triangle meshes in 3D, segment sets in 2D.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::grid::{dist, dot, lerp, norm, sub, Point, ScalarField};
use crate::measure::triangle_area;
use crate::path::SweepSurface;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub segments: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsoStatus {
    Surface,
    Empty,
}

impl Mesh {
    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty() && self.segments.is_empty()
    }

    pub fn status(&self) -> IsoStatus {
        if self.is_empty() {
            IsoStatus::Empty
        } else {
            IsoStatus::Surface
        }
    }

    pub fn triangle(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| triangle_area(&self.triangle(t))).sum()
    }

    pub fn length(&self) -> f64 {
        self.segments
            .iter()
            .map(|&[a, b]| dist(self.vertices[a], self.vertices[b]))
            .sum()
    }

    /// Area of a surface mesh or length of a contour set.
    pub fn measure(&self) -> f64 {
        self.area() + self.length()
    }

    pub fn validate(&self) -> Result<()> {
        let nv = self.vertices.len();
        let bad = self.triangles.iter().flatten().chain(self.segments.iter().flatten()).find(|&&i| i >= nv);
        match bad {
            Some(i) => Err(Error::Geometry(format!("mesh index {i} out of range ({nv} vertices)"))),
            None => Ok(()),
        }
    }

    /// Connected components (elements sharing a vertex); returns per-component measure, largest first.
    pub fn components(&self) -> Vec<f64> {
        let nv = self.vertices.len();
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        let union = |a: usize, b: usize, parent: &mut Vec<usize>| {
            let (ra, rb) = (find(parent, a), find(parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        };
        for t in &self.triangles {
            union(t[0], t[1], &mut parent);
            union(t[0], t[2], &mut parent);
        }
        for s in &self.segments {
            union(s[0], s[1], &mut parent);
        }
        let mut sizes: HashMap<usize, f64> = HashMap::new();
        for (k, t) in self.triangles.iter().enumerate() {
            *sizes.entry(find(&mut parent, t[0])).or_default() += triangle_area(&self.triangle(k));
        }
        for s in &self.segments {
            *sizes.entry(find(&mut parent, s[0])).or_default() += dist(self.vertices[s[0]], self.vertices[s[1]]);
        }
        let mut v: Vec<f64> = sizes.into_values().collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// Half the area of a two-sided shell, ignoring the part that spills past the rims.
    pub fn spanning_area(&self, rims: &[Rim]) -> f64 {
        let kept: f64 = (0..self.triangles.len())
            .filter_map(|k| {
                let t = self.triangle(k);
                let c = centroid(&t);
                (!rims.iter().any(|r| r.beyond(c))).then(|| triangle_area(&t))
            })
            .sum();
        0.5 * kept
    }
}

fn centroid(t: &[Point; 3]) -> Point {
    [
        (t[0][0] + t[1][0] + t[2][0]) / 3.0,
        (t[0][1] + t[1][1] + t[2][1]) / 3.0,
        (t[0][2] + t[1][2] + t[2][2]) / 3.0,
    ]
}

/// Boundary curve of a sweep with the outward conormal at each sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Rim {
    pub points: Vec<Point>,
    pub conormal: Vec<Point>,
}

impl Rim {
    /// Rim at row 0 of the sweep; `None` if the sweep never leaves it.
    pub fn first(s: &SweepSurface) -> Option<Rim> {
        Self::from_rows(s.rows().iter())
    }

    /// Rim at the final row.
    pub fn last(s: &SweepSurface) -> Option<Rim> {
        Self::from_rows(s.rows().iter().rev())
    }

    fn from_rows<'a>(mut rows: impl Iterator<Item = &'a Vec<Point>>) -> Option<Rim> {
        let edge = rows.next()?;
        let mut conormal: Vec<Option<Point>> = vec![None; edge.len()];
        for row in rows {
            for (j, q) in row.iter().enumerate() {
                if conormal[j].is_none() {
                    let d = sub(edge[j], *q);
                    let len = norm(d);
                    if len > 1e-12 {
                        conormal[j] = Some([d[0] / len, d[1] / len, d[2] / len]);
                    }
                }
            }
            if conormal.iter().all(Option::is_some) {
                break;
            }
        }
        let conormal: Option<Vec<Point>> = conormal.into_iter().collect();
        Some(Rim {
            points: edge.clone(),
            conormal: conormal?,
        })
    }

    /// True when `p` lies past the rim along the conormal of its nearest sample.
    pub fn beyond(&self, p: Point) -> bool {
        let j = (0..self.points.len())
            .min_by(|&a, &b| dist(p, self.points[a]).total_cmp(&dist(p, self.points[b])))
            .unwrap();
        dot(sub(p, self.points[j]), self.conormal[j]) > 0.0
    }
}

/// Kuhn decomposition of the unit cube into six tetrahedra along the 0-7 diagonal.
const TETS: [[usize; 4]; 6] = [
    [0, 1, 3, 7],
    [0, 1, 5, 7],
    [0, 2, 3, 7],
    [0, 2, 6, 7],
    [0, 4, 5, 7],
    [0, 4, 6, 7],
];

struct Builder<'a> {
    u: &'a ScalarField,
    level: f64,
    mesh: Mesh,
    edges: HashMap<(usize, usize), usize>,
}

impl Builder<'_> {
    fn vertex(&mut self, a: (usize, Point), b: (usize, Point)) -> usize {
        let key = (a.0.min(b.0), a.0.max(b.0));
        if let Some(&v) = self.edges.get(&key) {
            return v;
        }
        let (fa, fb) = (self.u.values()[a.0], self.u.values()[b.0]);
        let t = if fb == fa { 0.5 } else { (self.level - fa) / (fb - fa) };
        let p = lerp(a.1, b.1, t.clamp(0.0, 1.0));
        let v = self.mesh.vertices.len();
        self.mesh.vertices.push(p);
        self.edges.insert(key, v);
        v
    }
}

/// Marching triangles (2D) or marching tetrahedra (3D) with linear interpolation on edges.
pub fn extract_isosurface(u: &ScalarField, level: f64) -> Result<Mesh> {
    let (min, max) = (u.min(), u.max());
    if min == max {
        return Ok(Mesh::default());
    }
    if !(level > min && level < max) {
        return Err(Error::LevelOutOfRange { level, min, max });
    }
    let spec = u.spec();
    let n = spec.n();
    let h = spec.h();
    let dim = spec.dim();
    let mut b = Builder {
        u,
        level,
        mesh: Mesh::default(),
        edges: HashMap::new(),
    };
    // Cells between interior nodes only; the periodic seam is not stitched.
    let kz = if dim == 3 { n - 1 } else { 1 };
    for k in 0..kz {
        for j in 0..n - 1 {
            for i in 0..n - 1 {
                let corner = |c: usize| -> (usize, Point) {
                    let (bx, by, bz) = (c & 1, (c >> 1) & 1, (c >> 2) & 1);
                    let idx = spec.wrapped_index([(i + bx) as i64, (j + by) as i64, (k + bz) as i64]);
                    let p = [(i + bx) as f64 * h, (j + by) as f64 * h, if dim == 3 { (k + bz) as f64 * h } else { 0.0 }];
                    (idx, p)
                };
                if dim == 2 {
                    for tri in [[0usize, 1, 3], [0, 2, 3]] {
                        let c = tri.map(corner);
                        march_triangle(&mut b, c);
                    }
                } else {
                    for tet in TETS {
                        let c = tet.map(corner);
                        march_tet(&mut b, c);
                    }
                }
            }
        }
    }
    Ok(b.mesh)
}

fn march_triangle(b: &mut Builder, c: [(usize, Point); 3]) {
    let inside: Vec<usize> = (0..3).filter(|&q| b.u.values()[c[q].0] > b.level).collect();
    let lone = match inside.len() {
        1 => inside[0],
        2 => (0..3).find(|q| !inside.contains(q)).unwrap(),
        _ => return,
    };
    let others: Vec<usize> = (0..3).filter(|&q| q != lone).collect();
    let v0 = b.vertex(c[lone], c[others[0]]);
    let v1 = b.vertex(c[lone], c[others[1]]);
    if v0 != v1 {
        b.mesh.segments.push([v0, v1]);
    }
}

fn march_tet(b: &mut Builder, c: [(usize, Point); 4]) {
    let inside: Vec<usize> = (0..4).filter(|&q| b.u.values()[c[q].0] > b.level).collect();
    let outside: Vec<usize> = (0..4).filter(|q| !inside.contains(q)).collect();
    match inside.len() {
        1 | 3 => {
            let (lone, rest) = if inside.len() == 1 { (inside[0], &outside) } else { (outside[0], &inside) };
            let v: Vec<usize> = rest.iter().map(|&q| b.vertex(c[lone], c[q])).collect();
            push_triangle(&mut b.mesh, [v[0], v[1], v[2]]);
        }
        2 => {
            let (a0, a1) = (inside[0], inside[1]);
            let (b0, b1) = (outside[0], outside[1]);
            let p00 = b.vertex(c[a0], c[b0]);
            let p01 = b.vertex(c[a0], c[b1]);
            let p11 = b.vertex(c[a1], c[b1]);
            let p10 = b.vertex(c[a1], c[b0]);
            push_triangle(&mut b.mesh, [p00, p01, p11]);
            push_triangle(&mut b.mesh, [p00, p11, p10]);
        }
        _ => {}
    }
}

fn push_triangle(mesh: &mut Mesh, t: [usize; 3]) {
    if t[0] != t[1] && t[1] != t[2] && t[0] != t[2] {
        mesh.triangles.push(t);
    }
}
