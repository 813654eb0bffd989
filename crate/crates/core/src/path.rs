//! Discrete curves, geodesic backtracking and homotopy sweeps.

use std::f64::consts::PI;

use crate::eikonal::{fast_march, DistanceMap, SourceSet, WeightField};
use crate::error::{Error, Result};
use crate::grid::{add, cross, dist, lerp, norm, scale, sub, GridSpec, Point, ScalarField};

/// Default number of samples on a closed curve.
pub const DEFAULT_SAMPLES: usize = 256;
/// Default cap on the number of rows kept in a sweep.
pub const DEFAULT_MAX_ROWS: usize = 512;
/// Arc-length spacing ratio that triggers reparameterization during a sweep.
const RESAMPLE_TRIGGER: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<Point>,
    pub closed: bool,
}

impl Polyline {
    pub fn open(points: Vec<Point>) -> Self {
        Polyline {
            points,
            closed: false,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.points.len();
        let count = match (self.closed, n) {
            (_, 0 | 1) => 0,
            (true, _) => n,
            (false, _) => n - 1,
        };
        (0..count).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| dist(a, b)).sum()
    }

    /// `integral w ds` along the polyline, midpoint rule on pieces no longer than `h / 4`.
    pub fn weighted_length(&self, w: &ScalarField) -> f64 {
        let piece = w.spec().h() / 4.0;
        self.segments()
            .map(|(a, b)| {
                let len = dist(a, b);
                let k = (len / piece).ceil().max(1.0) as usize;
                (0..k)
                    .map(|i| w.sample(lerp(a, b, (i as f64 + 0.5) / k as f64)))
                    .sum::<f64>()
                    * len
                    / k as f64
            })
            .sum()
    }
}

/// Closed curve sampled at `M` parameters `theta_m = 2 pi m / M`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedCurve {
    samples: Vec<Point>,
}

impl ClosedCurve {
    pub fn new(samples: Vec<Point>) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::Geometry(format!(
                "a closed curve needs at least 3 samples, got {}",
                samples.len()
            )));
        }
        let c = ClosedCurve { samples };
        if c.length() == 0.0 {
            return Err(Error::Geometry("zero-length curve".into()));
        }
        Ok(c)
    }

    /// Circle in the plane orthogonal to `normal`.
    pub fn circle(center: Point, radius: f64, normal: Point, m: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Geometry(format!("circle radius must be positive, got {radius}")));
        }
        let nz = norm(normal);
        if nz == 0.0 {
            return Err(Error::Geometry("circle normal must be nonzero".into()));
        }
        let nrm = scale(normal, 1.0 / nz);
        let helper = if nrm[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let e1 = {
            let c = cross(nrm, helper);
            scale(c, 1.0 / norm(c))
        };
        let e2 = cross(nrm, e1);
        // Horizontal circles keep the conventional orientation theta -> (cos, sin).
        let (e1, e2) = if nrm[2].abs() > 0.999 {
            ([1.0, 0.0, 0.0], [0.0, nrm[2].signum(), 0.0])
        } else {
            (e1, e2)
        };
        let samples = (0..m)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / m as f64;
                add(center, add(scale(e1, radius * t.cos()), scale(e2, radius * t.sin())))
            })
            .collect();
        Self::new(samples)
    }

    /// Horizontal circle `(cx + r cos t, cy + r sin t, z)`.
    pub fn horizontal_circle(center: Point, radius: f64, m: usize) -> Result<Self> {
        Self::circle(center, radius, [0.0, 0.0, 1.0], m)
    }

    /// Planar circle in a 2D problem (third coordinate zero).
    pub fn planar_circle(cx: f64, cy: f64, radius: f64, m: usize) -> Result<Self> {
        Self::horizontal_circle([cx, cy, 0.0], radius, m)
    }

    pub fn samples(&self) -> &[Point] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn segment_lengths(&self) -> Vec<f64> {
        let m = self.samples.len();
        (0..m)
            .map(|i| dist(self.samples[i], self.samples[(i + 1) % m]))
            .collect()
    }

    pub fn length(&self) -> f64 {
        self.segment_lengths().iter().sum()
    }

    /// Max over min segment length.
    pub fn spacing_ratio(&self) -> f64 {
        spacing_ratio(&self.segment_lengths())
    }

    pub fn to_polyline(&self) -> Polyline {
        Polyline {
            points: self.samples.clone(),
            closed: true,
        }
    }
}

fn spacing_ratio(lengths: &[f64]) -> f64 {
    let max = lengths.iter().copied().fold(0.0, f64::max);
    let min = lengths.iter().copied().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        1.0
    } else {
        max / min.max(1e-300)
    }
}

/// Same polygon, samples redistributed uniformly in arc length; sample 0 stays put.
pub fn resample_uniform(c: &ClosedCurve) -> Result<ClosedCurve> {
    let m = c.samples.len();
    if m < 3 {
        return Err(Error::Geometry("need at least 3 samples".into()));
    }
    let total = c.length();
    if total == 0.0 {
        return Err(Error::Geometry("zero-length curve".into()));
    }
    let mut ring = c.samples.clone();
    ring.push(c.samples[0]);
    let pts = resample_arc(&ring, m + 1);
    Ok(ClosedCurve {
        samples: pts[..m].to_vec(),
    })
}

/// Places `count` points uniformly by arc length along an open polyline, keeping both ends.
fn resample_arc(points: &[Point], count: usize) -> Vec<Point> {
    if count == 0 {
        return Vec::new();
    }
    if count == 1 || points.len() == 1 {
        return vec![points[0]; count];
    }
    let mut cum = Vec::with_capacity(points.len());
    cum.push(0.0);
    for w in points.windows(2) {
        let last = *cum.last().unwrap();
        cum.push(last + dist(w[0], w[1]));
    }
    let total = *cum.last().unwrap();
    if total == 0.0 {
        return vec![points[0]; count];
    }
    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    for k in 0..count {
        let target = total * k as f64 / (count - 1) as f64;
        if k == 0 {
            out.push(points[0]);
            continue;
        }
        if k == count - 1 {
            out.push(*points.last().unwrap());
            continue;
        }
        while seg + 1 < cum.len() - 1 && cum[seg + 1] < target {
            seg += 1;
        }
        let len = cum[seg + 1] - cum[seg];
        let t = if len > 0.0 { (target - cum[seg]) / len } else { 0.0 };
        out.push(lerp(points[seg], points[seg + 1], t));
    }
    out
}

/// Lattice of `(T + 1) x M` points; rows are closed curves unless `closed_rows` is false.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSurface {
    rows: Vec<Vec<Point>>,
    closed_rows: bool,
}

impl SweepSurface {
    pub fn new(rows: Vec<Vec<Point>>, closed_rows: bool) -> Result<Self> {
        let m = rows.first().map(|r| r.len()).unwrap_or(0);
        if m == 0 || rows.iter().any(|r| r.len() != m) {
            return Err(Error::Geometry("sweep rows must be nonempty and of equal length".into()));
        }
        Ok(SweepSurface { rows, closed_rows })
    }

    pub fn rows(&self) -> &[Vec<Point>] {
        &self.rows
    }

    pub fn closed_rows(&self) -> bool {
        self.closed_rows
    }

    /// Number of pseudo-time steps `T` (rows minus one).
    pub fn steps(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn samples_per_row(&self) -> usize {
        self.rows[0].len()
    }

    /// Two triangles per lattice cell.
    pub fn triangles(&self) -> impl Iterator<Item = [Point; 3]> + '_ {
        let m = self.samples_per_row();
        let cols = if self.closed_rows { m } else { m.saturating_sub(1) };
        (0..self.steps()).flat_map(move |k| {
            (0..cols).flat_map(move |j| {
                let j1 = (j + 1) % m;
                let a = self.rows[k][j];
                let b = self.rows[k][j1];
                let c = self.rows[k + 1][j1];
                let d = self.rows[k + 1][j];
                [[a, b, c], [a, c, d]]
            })
        })
    }

    /// Lifts a planar polyline into a degenerate sweep: each point becomes a one-sample row.
    pub fn all_points(&self) -> impl Iterator<Item = Point> + '_ {
        self.rows.iter().flat_map(|r| r.iter().copied())
    }
}

fn check_inside(spec: GridSpec, p: Point) -> Result<()> {
    if spec.contains(p) {
        Ok(())
    } else {
        Err(Error::OutsideBox(p))
    }
}

/// One normalized-gradient step that must lower `d`.
///
/// Shrinks the step a few times when the interpolated gradient overshoots a narrow
/// valley, then falls back to the lowest neighbouring node.
fn descent_step(d: &DistanceMap, x: Point, step: f64) -> Option<Point> {
    let spec = d.spec();
    let dim = spec.dim();
    let here = d.value_at(x);
    let g = d.gradient_at(x);
    let gn = norm(g);
    if gn >= 1e-12 {
        let mut s = step;
        for _ in 0..4 {
            let mut y = sub(x, scale(g, s / gn));
            for a in 0..dim {
                y[a] = y[a].clamp(0.0, 1.0);
            }
            if d.value_at(y) < here {
                return Some(y);
            }
            s /= 2.0;
        }
    }
    let n = spec.n() as i64;
    let h = spec.h();
    let c: Vec<i64> = (0..dim).map(|a| ((x[a] / h).round() as i64).clamp(0, n - 1)).collect();
    let mut best: Option<(f64, Point)> = None;
    for k in 0..3usize.pow(dim as u32) {
        let mut q = [0usize; 3];
        let mut p = [0.0; 3];
        let mut ok = true;
        for a in 0..dim {
            let off = (k / 3usize.pow(a as u32)) % 3;
            let v = c[a] + off as i64 - 1;
            ok &= (0..n).contains(&v);
            q[a] = v.max(0) as usize;
            p[a] = v as f64 * h;
        }
        if !ok {
            continue;
        }
        let v = d.values()[spec.index(q)];
        if v < here && best.map_or(true, |(b, _)| v < b) {
            best = Some((v, p));
        }
    }
    best.map(|(_, p)| p)
}

/// Normalized gradient descent on `d` from `start` down to the source set.
pub fn backtrack_point(d: &DistanceMap, start: Point, step: f64) -> Result<Polyline> {
    let spec = d.spec();
    check_inside(spec, start)?;
    if !(step > 0.0) {
        return Err(Error::param("step", format!("must be positive, got {step}")));
    }
    let h = spec.h();
    let source = d.source();
    let cap = 10 * spec.n() * spec.dim();
    let mut points = vec![start];
    let mut x = start;
    loop {
        let to_source = source.closest(x);
        let gap = dist(x, to_source);
        if gap < 1e-12 {
            break;
        }
        if gap < h {
            points.push(to_source);
            break;
        }
        if points.len() > cap {
            return Err(Error::StepCap {
                cap,
                partial: Polyline::open(points),
            });
        }
        match descent_step(d, x, step) {
            Some(next) => x = next,
            None => {
                return Err(Error::Stagnation {
                    partial: Polyline::open(points),
                })
            }
        }
        points.push(x);
    }
    Ok(Polyline::open(points))
}

/// All samples of `start` descend `d` in lockstep until each reaches the source set.
pub fn sweep_curve(d: &DistanceMap, start: &ClosedCurve, step: f64) -> Result<SweepSurface> {
    sweep_curve_with(d, start, step, DEFAULT_MAX_ROWS)
}

pub fn sweep_curve_with(
    d: &DistanceMap,
    start: &ClosedCurve,
    step: f64,
    max_rows: usize,
) -> Result<SweepSurface> {
    let spec = d.spec();
    if !(step > 0.0) {
        return Err(Error::param("step", format!("must be positive, got {step}")));
    }
    for &p in start.samples() {
        check_inside(spec, p)?;
    }
    let h = spec.h();
    let source = d.source();
    let m = start.len();
    let cap = 10 * spec.n() * spec.dim();

    let mut current = start.samples().to_vec();
    let mut frozen: Vec<bool> = current.iter().map(|&p| source.distance(p) < h).collect();
    let mut rows = vec![current.clone()];
    let mut steps = 0;
    let mut failures: Vec<Error> = Vec::new();

    while frozen.iter().any(|f| !f) {
        if steps >= cap {
            let partial = Polyline::open(rows.iter().map(|r| r[0]).collect());
            return Err(Error::Sweep {
                failed: frozen.iter().filter(|f| !**f).count(),
                total: m,
                first: Box::new(Error::StepCap { cap, partial }),
            });
        }
        steps += 1;
        for j in 0..m {
            if frozen[j] {
                continue;
            }
            let Some(x) = descent_step(d, current[j], step) else {
                failures.push(Error::Stagnation {
                    partial: Polyline::open(rows.iter().map(|r| r[j]).collect()),
                });
                frozen[j] = true;
                continue;
            };
            current[j] = x;
            if source.distance(x) < h {
                frozen[j] = true;
            }
        }
        reparameterize_unfrozen(&mut current, &frozen);
        rows.push(current.clone());
    }
    if !failures.is_empty() {
        return Err(Error::Sweep {
            failed: failures.len(),
            total: m,
            first: Box::new(failures.swap_remove(0)),
        });
    }

    // Close the homotopy onto the target itself.
    let projected: Vec<Point> = current.iter().map(|&p| source.closest(p)).collect();
    let moved = projected
        .iter()
        .zip(&current)
        .map(|(a, b)| dist(*a, *b))
        .fold(0.0, f64::max);
    if moved > 1e-12 {
        rows.push(projected);
    }
    let rows = thin_rows(rows, max_rows);
    SweepSurface::new(rows, true)
}

fn reparameterize_unfrozen(current: &mut [Point], frozen: &[bool]) {
    let m = current.len();
    let lengths: Vec<f64> = (0..m)
        .filter(|&i| !frozen[i] || !frozen[(i + 1) % m])
        .map(|i| dist(current[i], current[(i + 1) % m]))
        .collect();
    if lengths.is_empty() || spacing_ratio(&lengths) <= RESAMPLE_TRIGGER {
        return;
    }
    let anchors: Vec<usize> = (0..m).filter(|&i| frozen[i]).collect();
    if anchors.is_empty() {
        if let Ok(c) = ClosedCurve::new(current.to_vec()) {
            if let Ok(r) = resample_uniform(&c) {
                current.copy_from_slice(r.samples());
            }
        }
        return;
    }
    for (k, &a) in anchors.iter().enumerate() {
        let b = anchors[(k + 1) % anchors.len()];
        let span = if b > a { b - a } else { b + m - a };
        if span < 2 {
            continue;
        }
        let arc: Vec<Point> = (0..=span).map(|s| current[(a + s) % m]).collect();
        let placed = resample_arc(&arc, span + 1);
        for s in 1..span {
            current[(a + s) % m] = placed[s];
        }
    }
}

/// Linear interpolation of recorded rows onto at most `max_rows` uniform pseudo-times.
fn thin_rows(rows: Vec<Vec<Point>>, max_rows: usize) -> Vec<Vec<Point>> {
    let recorded = rows.len();
    if max_rows < 2 || recorded <= max_rows {
        return rows;
    }
    let last = (recorded - 1) as f64;
    let t_count = max_rows - 1;
    (0..=t_count)
        .map(|k| {
            let t = last * k as f64 / t_count as f64;
            let i = (t.floor() as usize).min(recorded - 2);
            let f = t - i as f64;
            rows[i]
                .iter()
                .zip(&rows[i + 1])
                .map(|(&a, &b)| lerp(a, b, f))
                .collect()
        })
        .collect()
}

/// A circle coaxial with the vertical axis through the box centre: `(radius, height)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxialCircle {
    pub radius: f64,
    pub z: f64,
}

/// Horizontal axis position used by the reduced circular geodesic.
pub const AXIS: [f64; 2] = [0.5, 0.5];

/// Weight of the reduced `(r, z)` space,
/// `w(r, z) = sum_m (1 - 4u(circle point))^2 r dtheta` (trapezoidal in theta).
pub fn reduced_circle_weight(u: &ScalarField, m_theta: usize) -> Result<ScalarField> {
    reduced_weight(&phase_metric(u), m_theta)
}

fn phase_metric(u: &ScalarField) -> ScalarField {
    u.map(|x| (1.0 - 4.0 * x).powi(2))
}

/// Integrates a 3D metric over the axial circle through each `(r, z)`.
pub fn reduced_weight(w: &ScalarField, m_theta: usize) -> Result<ScalarField> {
    let spec = w.spec();
    if spec.dim() != 3 {
        return Err(Error::param("u", "reduced circular geodesics need a 3D field"));
    }
    if m_theta < 3 {
        return Err(Error::param("m_theta", "need at least 3 angular samples"));
    }
    let reduced = GridSpec::new(2, spec.n())?;
    let dtheta = 2.0 * PI / m_theta as f64;
    let angles: Vec<(f64, f64)> = (0..m_theta)
        .map(|k| {
            let t = k as f64 * dtheta;
            (t.cos(), t.sin())
        })
        .collect();
    Ok(ScalarField::from_fn(reduced, |q| {
        let (r, z) = (q[0], q[1]);
        angles
            .iter()
            .map(|&(c, s)| w.sample([AXIS[0] + r * c, AXIS[1] + r * s, z]))
            .sum::<f64>()
            * r
            * dtheta
    }))
}

/// Optimal homotopy among horizontal axial circles, found by a 2D geodesic in `(r, z)`.
pub fn circular_reduced_geodesic(
    u: &ScalarField,
    c1: AxialCircle,
    c2: AxialCircle,
    m_theta: usize,
) -> Result<SweepSurface> {
    circular_reduced_geodesic_on(&phase_metric(u), c1, c2, m_theta)
}

/// As [`circular_reduced_geodesic`], with an explicit 3D metric in place of `(1 - 4u)^2`.
pub fn circular_reduced_geodesic_on(
    metric: &ScalarField,
    c1: AxialCircle,
    c2: AxialCircle,
    m_theta: usize,
) -> Result<SweepSurface> {
    for c in [c1, c2] {
        if !(c.radius >= 0.0) || !(0.0..=1.0).contains(&c.z) || c.radius > 1.0 {
            return Err(Error::Geometry(format!("axial circle {c:?} outside the reduced box")));
        }
    }
    let lift = |r: f64, z: f64| -> Vec<Point> {
        (0..m_theta)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / m_theta as f64;
                [AXIS[0] + r * t.cos(), AXIS[1] + r * t.sin(), z]
            })
            .collect()
    };
    if c1 == c2 {
        return SweepSurface::new(vec![lift(c1.radius, c1.z)], true);
    }
    let weight = reduced_weight(metric, m_theta)?;
    let h = weight.spec().h();
    // The exact weight vanishes on the axis; floor it so fast marching stays causal.
    let omega = WeightField::with_floor(weight, 1e-3 * 2.0 * PI * h)?;
    let d = fast_march(&omega, &SourceSet::point([c1.radius, c1.z, 0.0]))?;
    let mut path = backtrack_point(&d, [c2.radius, c2.z, 0.0], h / 2.0)?;
    path.points.reverse();
    let rows = path.points.iter().map(|p| lift(p[0], p[1])).collect();
    SweepSurface::new(thin_rows(rows, DEFAULT_MAX_ROWS), true)
}
