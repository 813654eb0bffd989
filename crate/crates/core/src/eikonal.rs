//! First-order fast marching for `|grad d| = w` on the (non-wrapping) unit box.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::grid::{closest_on_segment, dist, GridSpec, Point, ScalarField};

/// A strictly positive weight field.
#[derive(Debug, Clone)]
pub struct WeightField {
    field: ScalarField,
    max: f64,
}

impl WeightField {
    pub fn new(field: ScalarField) -> Result<Self> {
        if let Some((index, &value)) = field
            .values()
            .iter()
            .enumerate()
            .find(|(_, &v)| !(v > 0.0) || !v.is_finite())
        {
            return Err(Error::NonPositiveWeight { index, value });
        }
        let max = field.max();
        Ok(WeightField { field, max })
    }

    /// Floors the field at `floor > 0` before validating.
    pub fn with_floor(field: ScalarField, floor: f64) -> Result<Self> {
        Self::new(field.map(|v| v.max(floor)))
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn spec(&self) -> GridSpec {
        self.field.spec()
    }

    pub fn max(&self) -> f64 {
        self.max
    }
}

/// Geometric set from which distances are measured.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceSet {
    Points(Vec<Point>),
    /// A polyline; `closed` adds the segment from the last point back to the first.
    Curve { points: Vec<Point>, closed: bool },
}

impl SourceSet {
    pub fn point(p: Point) -> Self {
        SourceSet::Points(vec![p])
    }

    pub fn closed_curve(points: Vec<Point>) -> Self {
        SourceSet::Curve {
            points,
            closed: true,
        }
    }

    fn points(&self) -> &[Point] {
        match self {
            SourceSet::Points(p) => p,
            SourceSet::Curve { points, .. } => points,
        }
    }

    fn is_empty(&self) -> bool {
        self.points().is_empty()
    }

    /// Closest point of the set to `p`.
    pub fn closest(&self, p: Point) -> Point {
        match self {
            SourceSet::Points(pts) => *pts
                .iter()
                .min_by(|a, b| dist(**a, p).total_cmp(&dist(**b, p)))
                .expect("nonempty source"),
            SourceSet::Curve { points, closed } => {
                if points.len() == 1 {
                    return points[0];
                }
                let segs = if *closed { points.len() } else { points.len() - 1 };
                let mut best = points[0];
                let mut best_d = f64::INFINITY;
                for s in 0..segs {
                    let q = closest_on_segment(p, points[s], points[(s + 1) % points.len()]);
                    let d = dist(p, q);
                    if d < best_d {
                        best_d = d;
                        best = q;
                    }
                }
                best
            }
        }
    }

    pub fn distance(&self, p: Point) -> f64 {
        dist(p, self.closest(p))
    }
}

/// Weighted distance from a source set, stored on grid nodes.
#[derive(Debug, Clone)]
pub struct DistanceMap {
    spec: GridSpec,
    values: Vec<f64>,
    source: SourceSet,
    source_nodes: Vec<usize>,
    is_source: Vec<bool>,
    omega_max: f64,
}

impl DistanceMap {
    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source(&self) -> &SourceSet {
        &self.source
    }

    pub fn source_nodes(&self) -> &[usize] {
        &self.source_nodes
    }

    pub fn is_source_node(&self, index: usize) -> bool {
        self.is_source[index]
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    pub fn to_field(&self) -> ScalarField {
        ScalarField::from_values(self.spec, self.values.clone()).expect("finite distances")
    }

    /// Multilinear interpolation of the distance (clamped to the box).
    pub fn value_at(&self, x: Point) -> f64 {
        let (base, frac) = self.cell(x);
        let mut acc = 0.0;
        for_corners(self.spec.dim(), frac, |offset, w| {
            acc += w * self.values[self.node(base, offset)];
        });
        acc
    }

    fn cell(&self, x: Point) -> ([usize; 3], [f64; 3]) {
        let n = self.spec.n();
        let mut base = [0usize; 3];
        let mut frac = [0.0; 3];
        for a in 0..self.spec.dim() {
            let t = (x[a] * n as f64).clamp(0.0, (n - 1) as f64);
            let b = (t.floor() as usize).min(n - 2);
            base[a] = b;
            frac[a] = t - b as f64;
        }
        (base, frac)
    }

    fn node(&self, base: [usize; 3], offset: [usize; 3]) -> usize {
        self.spec
            .index([base[0] + offset[0], base[1] + offset[1], base[2] + offset[2]])
    }

    fn node_gradient(&self, index: usize) -> Point {
        let spec = self.spec;
        let n = spec.n();
        let h = spec.h();
        let c = spec.coords(index);
        let mut g = [0.0; 3];
        if self.is_source[index] {
            return g;
        }
        let d0 = self.values[index];
        for (a, ga) in g.iter_mut().enumerate().take(spec.dim()) {
            let stride = spec.stride(a);
            let lo = (c[a] > 0).then(|| index - stride);
            let hi = (c[a] + 1 < n).then(|| index + stride);
            *ga = match (lo, hi) {
                (Some(l), Some(_)) if self.is_source[l] => (d0 - self.values[l]) / h,
                (Some(_), Some(u)) if self.is_source[u] => (self.values[u] - d0) / h,
                (Some(l), Some(u)) => (self.values[u] - self.values[l]) / (2.0 * h),
                (Some(l), None) => (d0 - self.values[l]) / h,
                (None, Some(u)) => (self.values[u] - d0) / h,
                (None, None) => 0.0,
            };
        }
        g
    }

    /// Gradient of the distance at `x`: nodal differences, multilinearly interpolated.
    pub fn gradient_at(&self, x: Point) -> Point {
        let spec = self.spec;
        let nearest = {
            let n = spec.n();
            let mut c = [0usize; 3];
            for a in 0..spec.dim() {
                c[a] = ((x[a] * n as f64).round().max(0.0) as usize).min(n - 1);
            }
            spec.index(c)
        };
        if self.is_source[nearest] && dist(spec.node_point(nearest), x) < 1e-9 * spec.h() {
            return [0.0; 3];
        }
        let (base, frac) = self.cell(x);
        let mut g = [0.0; 3];
        for_corners(spec.dim(), frac, |offset, w| {
            let ng = self.node_gradient(self.node(base, offset));
            for a in 0..3 {
                g[a] += w * ng[a];
            }
        });
        g
    }
}

fn for_corners(dim: usize, frac: [f64; 3], mut f: impl FnMut([usize; 3], f64)) {
    for c in 0..(1usize << dim) {
        let mut w = 1.0;
        let mut offset = [0usize; 3];
        for a in 0..dim {
            if c >> a & 1 == 1 {
                offset[a] = 1;
                w *= frac[a];
            } else {
                w *= 1.0 - frac[a];
            }
        }
        if w > 0.0 {
            f(offset, w);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Trial {
    d: f64,
    index: usize,
}

impl Eq for Trial {}

impl Ord for Trial {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .d
            .total_cmp(&self.d)
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for Trial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Far,
    Trial,
    Seed,
    Accepted,
}

/// Nodes within distance `< h` of the source, plus the nearest node of every source point.
fn seed_nodes(spec: GridSpec, source: &SourceSet) -> Vec<(usize, f64)> {
    let n = spec.n();
    let h = spec.h();
    let dim = spec.dim();
    let radius = h * (1.0 - 1e-9);
    let mut seeds: Vec<(usize, f64)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut visit_box = |lo: Point, hi: Point, seeds: &mut Vec<(usize, f64)>| {
        let mut range = [(0usize, 0usize); 3];
        for a in 0..dim {
            let l = ((lo[a] - h) * n as f64).floor().max(0.0) as usize;
            let u = (((hi[a] + h) * n as f64).ceil().max(0.0) as usize).min(n - 1);
            range[a] = (l.min(n - 1), u);
        }
        for k in range[2].0..=range[2].1 {
            for j in range[1].0..=range[1].1 {
                for i in range[0].0..=range[0].1 {
                    let idx = spec.index([i, j, k]);
                    if seen.contains(&idx) {
                        continue;
                    }
                    let d = source.distance(spec.node_point(idx));
                    if d < radius {
                        seen.insert(idx);
                        seeds.push((idx, d));
                    }
                }
            }
        }
    };
    match source {
        SourceSet::Points(pts) => {
            for &p in pts {
                visit_box(p, p, &mut seeds);
            }
        }
        SourceSet::Curve { points, closed } => {
            let segs = if *closed { points.len() } else { points.len().saturating_sub(1) };
            if segs == 0 {
                visit_box(points[0], points[0], &mut seeds);
            }
            for s in 0..segs {
                let a = points[s];
                let b = points[(s + 1) % points.len()];
                let lo = [a[0].min(b[0]), a[1].min(b[1]), a[2].min(b[2])];
                let hi = [a[0].max(b[0]), a[1].max(b[1]), a[2].max(b[2])];
                visit_box(lo, hi, &mut seeds);
            }
        }
    }
    // Make sure every source point owns at least its nearest node.
    for &p in source.points() {
        let mut c = [0usize; 3];
        for a in 0..dim {
            c[a] = ((p[a] * n as f64).round().max(0.0) as usize).min(n - 1);
        }
        let idx = spec.index(c);
        if seen.insert(idx) {
            seeds.push((idx, source.distance(spec.node_point(idx))));
        }
    }
    seeds
}

/// Solves the upwind quadratic given the smallest accepted neighbour per axis.
fn upwind_update(mut neighbours: [f64; 3], count: usize, f: f64) -> f64 {
    let a = &mut neighbours[..count];
    a.sort_by(f64::total_cmp);
    let mut d = a[0] + f;
    let mut sum = a[0];
    let mut sum_sq = a[0] * a[0];
    for m in 1..count {
        if d <= a[m] {
            break;
        }
        sum += a[m];
        sum_sq += a[m] * a[m];
        let k = (m + 1) as f64;
        let disc = sum * sum - k * (sum_sq - f * f);
        if disc < 0.0 {
            break;
        }
        d = (sum + disc.sqrt()) / k;
    }
    d
}

/// Weighted distance from `source` by fast marching.
pub fn fast_march(omega: &WeightField, source: &SourceSet) -> Result<DistanceMap> {
    if source.is_empty() {
        return Err(Error::EmptySource);
    }
    let spec = omega.spec();
    for &p in source.points() {
        if !spec.contains(p) {
            return Err(Error::OutsideBox(p));
        }
    }
    let n = spec.n();
    let h = spec.h();
    let w = omega.field().values();
    let len = spec.len();
    let mut values = vec![f64::INFINITY; len];
    let mut state = vec![State::Far; len];
    let mut heap = BinaryHeap::new();

    let seeds = seed_nodes(spec, source);
    let mut is_source = vec![false; len];
    let mut source_nodes = Vec::with_capacity(seeds.len());
    for &(idx, d) in &seeds {
        values[idx] = (w[idx] * d).max(0.0);
        state[idx] = State::Seed;
        is_source[idx] = true;
        source_nodes.push(idx);
        heap.push(Trial { d: values[idx], index: idx });
    }

    let mut last = 0.0f64;
    while let Some(Trial { d, index }) = heap.pop() {
        if state[index] == State::Accepted || d > values[index] {
            continue;
        }
        debug_assert!(d >= last - 1e-12 * last.max(1.0), "fast marching order violated");
        last = d;
        state[index] = State::Accepted;
        let c = spec.coords(index);
        for axis in 0..spec.dim() {
            let stride = spec.stride(axis);
            for (exists, nb) in [
                (c[axis] > 0, index.wrapping_sub(stride)),
                (c[axis] + 1 < n, index + stride),
            ] {
                if !exists {
                    continue;
                }
                if matches!(state[nb], State::Accepted | State::Seed) {
                    continue;
                }
                let nc = spec.coords(nb);
                let mut mins = [0.0; 3];
                let mut count = 0;
                for a in 0..spec.dim() {
                    let s = spec.stride(a);
                    let mut best = f64::INFINITY;
                    if nc[a] > 0 && state[nb - s] == State::Accepted {
                        best = best.min(values[nb - s]);
                    }
                    if nc[a] + 1 < n && state[nb + s] == State::Accepted {
                        best = best.min(values[nb + s]);
                    }
                    if best.is_finite() {
                        mins[count] = best;
                        count += 1;
                    }
                }
                let cand = upwind_update(mins, count, w[nb] * h);
                if cand < values[nb] {
                    values[nb] = cand;
                    state[nb] = State::Trial;
                    heap.push(Trial { d: cand, index: nb });
                }
            }
        }
    }

    Ok(DistanceMap {
        spec,
        values,
        source: source.clone(),
        source_nodes,
        is_source,
        omega_max: omega.max(),
    })
}
