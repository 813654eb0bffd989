//! Alternating minimization: geodesics for the current phase field, then phase-field steps.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use crate::eikonal::{fast_march, DistanceMap, SourceSet, WeightField};
use crate::error::{Error, Result};
use crate::flow::{self, pick_stabilizers, total_energy, EnergyReport, ModelParams};
use crate::grid::{closest_on_segment, convolve_gaussian, dist, GridSpec, Point, ScalarField};
use crate::measure::{self, geodesic_weight, MeasureField};
use crate::path::{self, backtrack_point, sweep_curve, AxialCircle, ClosedCurve, Polyline, SweepSurface};
use crate::mesh::Rim;
use crate::potential::{self, PotentialKind, OBSTACLE};

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Point(Point),
    Curve(ClosedCurve),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryObject {
    pub id: usize,
    pub geometry: Geometry,
}

impl BoundaryObject {
    pub fn point(id: usize, p: Point) -> Self {
        BoundaryObject {
            id,
            geometry: Geometry::Point(p),
        }
    }

    pub fn curve(id: usize, c: ClosedCurve) -> Self {
        BoundaryObject {
            id,
            geometry: Geometry::Curve(c),
        }
    }

    pub fn source_set(&self) -> SourceSet {
        match &self.geometry {
            Geometry::Point(p) => SourceSet::point(*p),
            Geometry::Curve(c) => SourceSet::closed_curve(c.samples().to_vec()),
        }
    }

    /// Euclidean distance from `p` to the object (curves as closed polylines).
    pub fn distance(&self, p: Point) -> f64 {
        match &self.geometry {
            Geometry::Point(q) => dist(p, *q),
            Geometry::Curve(c) => c
                .to_polyline()
                .segments()
                .map(|(a, b)| dist(p, closest_on_segment(p, a, b)))
                .fold(f64::INFINITY, f64::min),
        }
    }

    fn points(&self) -> &[Point] {
        match &self.geometry {
            Geometry::Point(p) => std::slice::from_ref(p),
            Geometry::Curve(c) => c.samples(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeodesicMode {
    GeneralSweep,
    CircularReduced,
}

/// Connection between two objects: geodesics run from `from` down to the distance source `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pair {
    pub from: usize,
    pub to: usize,
    pub mode: GeodesicMode,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeedU {
    Zeros,
    Ones,
    Profile(PathBuf),
    /// Optimal profile around the listed objects.
    Objects(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig {
    pub name: String,
    pub model: PotentialKind,
    pub dim: usize,
    pub n: usize,
    pub params: ModelParams,
    pub objects: Vec<BoundaryObject>,
    pub pairs: Vec<Pair>,
    pub max_iters: usize,
    pub geodesic_every: usize,
    pub seed_u: SeedU,
    /// PFLD snapshot cadence for the CLI; 0 disables snapshots.
    pub snapshot_every: usize,
    pub convergence_tol: f64,
    pub convergence_window: usize,
    /// Angular samples for the reduced circular geodesic.
    pub m_theta: usize,
}

impl ProblemConfig {
    pub fn new(name: &str, model: PotentialKind, dim: usize, n: usize) -> Self {
        ProblemConfig {
            name: name.to_string(),
            model,
            dim,
            n,
            params: ModelParams::reproduction(n, model),
            objects: Vec::new(),
            pairs: Vec::new(),
            max_iters: 3000,
            geodesic_every: 10,
            seed_u: match model {
                PotentialKind::AmbrosioTortorelli => SeedU::Ones,
                PotentialKind::WillmoreCahnHilliard => SeedU::Zeros,
            },
            snapshot_every: 0,
            convergence_tol: 1e-6,
            convergence_window: 50,
            m_theta: path::DEFAULT_SAMPLES,
        }
    }

    pub fn spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.dim, self.n)
    }

    pub fn object(&self, id: usize) -> Option<&BoundaryObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn validate(&self) -> Result<()> {
        let spec = self.spec()?;
        self.params.validate()?;
        if self.geodesic_every == 0 {
            return Err(Error::param("geodesic_every", "must be at least 1"));
        }
        for (k, o) in self.objects.iter().enumerate() {
            if self.objects[..k].iter().any(|p| p.id == o.id) {
                return Err(Error::param("objects", format!("duplicate id {}", o.id)));
            }
            for &p in o.points() {
                if !spec.contains(p) {
                    return Err(Error::OutsideBox(p));
                }
            }
        }
        if let SeedU::Objects(ids) = &self.seed_u {
            if let Some(id) = ids.iter().find(|&&id| self.object(id).is_none()) {
                return Err(Error::param("seed_u", format!("missing object {id}")));
            }
        }
        for pair in &self.pairs {
            let (Some(from), Some(_)) = (self.object(pair.from), self.object(pair.to)) else {
                return Err(Error::param(
                    "pairs",
                    format!("pair ({}, {}) references a missing object", pair.from, pair.to),
                ));
            };
            if pair.from == pair.to {
                return Err(Error::param("pairs", format!("pair ({0}, {0}) is degenerate", pair.from)));
            }
            if self.dim == 2 && matches!(from.geometry, Geometry::Curve(_)) {
                return Err(Error::param("pairs", "2D problems connect points only"));
            }
            if pair.mode == GeodesicMode::CircularReduced {
                self.axial_circle(pair.from)?;
                self.axial_circle(pair.to)?;
            }
        }
        Ok(())
    }

    /// `(radius, height)` of an object usable by the reduced circular geodesic.
    fn axial_circle(&self, id: usize) -> Result<AxialCircle> {
        let obj = self
            .object(id)
            .ok_or_else(|| Error::param("pairs", format!("missing object {id}")))?;
        let pts = obj.points();
        let z = pts[0][2];
        let r0 = ((pts[0][0] - path::AXIS[0]).powi(2) + (pts[0][1] - path::AXIS[1]).powi(2)).sqrt();
        let coaxial = pts.iter().all(|p| {
            let r = ((p[0] - path::AXIS[0]).powi(2) + (p[1] - path::AXIS[1]).powi(2)).sqrt();
            (p[2] - z).abs() < 1e-9 && (r - r0).abs() < 1e-6
        });
        if !coaxial || self.dim != 3 {
            return Err(Error::param(
                "mode",
                format!("object {id} is not a horizontal circle around the box axis"),
            ));
        }
        Ok(AxialCircle { radius: r0, z })
    }
}

/// Result of one geodesic computation for a pair.
#[derive(Debug, Clone, PartialEq)]
pub enum Geodesic {
    Path(Polyline),
    Sweep(SweepSurface),
}

impl Geodesic {
    pub fn rasterize(&self, spec: GridSpec) -> MeasureField {
        match self {
            Geodesic::Path(p) => measure::rasterize_polyline(p, spec),
            Geodesic::Sweep(s) => measure::rasterize_sweep(s, spec),
        }
    }

    /// Length of a path or area of a sweep.
    pub fn size(&self) -> f64 {
        match self {
            Geodesic::Path(p) => p.length(),
            Geodesic::Sweep(s) => measure::surface_area(s),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Timings {
    pub fmm: Duration,
    pub step: Duration,
    pub rasterize: Duration,
}

#[derive(Debug, Clone)]
pub struct SolveState {
    pub u: ScalarField,
    pub geodesics: Vec<Geodesic>,
    pub omega: ScalarField,
    pub history: Vec<EnergyReport>,
    pub converged: bool,
    /// Steps where the WCH energy rose after clamping, with the relative increase.
    pub clamp_events: Vec<(usize, f64)>,
    pub timings: Timings,
}

impl SolveState {
    pub fn last_energy(&self) -> Option<&EnergyReport> {
        self.history.last()
    }
}

/// Stiffened WCH re-solves allowed when a clamped step raises the energy.
const MAX_RETRIES: usize = 6;

/// Initial phase field.
pub fn seed_field(cfg: &ProblemConfig) -> Result<ScalarField> {
    let spec = cfg.spec()?;
    match &cfg.seed_u {
        SeedU::Zeros => Ok(ScalarField::zeros(spec)),
        SeedU::Ones => {
            if cfg.model == PotentialKind::WillmoreCahnHilliard {
                return Err(Error::param("seed_u", "ones violates the obstacle u <= 1/4"));
            }
            Ok(ScalarField::constant(spec, 1.0))
        }
        SeedU::Profile(path) => {
            let u = crate::io::read_field(path)?;
            if u.spec() != spec {
                return Err(Error::SpecMismatch {
                    left: u.spec().to_string(),
                    right: spec.to_string(),
                });
            }
            Ok(u)
        }
        SeedU::Objects(ids) => {
            let objects: Vec<&BoundaryObject> = ids.iter().filter_map(|&id| cfg.object(id)).collect();
            let d = ScalarField::from_fn(spec, |p| {
                objects.iter().map(|o| o.distance(p)).fold(f64::INFINITY, f64::min)
            });
            potential::expected_profile(&d, cfg.params.eps, cfg.model)
        }
    }
}

/// `rho * (delta + phi(u)^2)`, the metric whose geodesics minimize the penalty.
pub fn geodesic_metric(u: &ScalarField, params: &ModelParams, model: PotentialKind) -> Result<WeightField> {
    let raw = u.map(|x| {
        let phi = model.geodesic_phase(x);
        params.delta + phi * phi
    });
    let smooth = convolve_gaussian(&raw, params.kernel_width)?;
    WeightField::with_floor(smooth, params.delta)
}

/// Computes every pair's geodesic for the phase field `u`.
pub fn compute_geodesics(cfg: &ProblemConfig, u: &ScalarField, timings: &mut Timings) -> Result<Vec<Geodesic>> {
    let spec = u.spec();
    let h = spec.h();
    let t0 = Instant::now();
    let metric = geodesic_metric(u, &cfg.params, cfg.model)?;
    let mut maps: Vec<(usize, DistanceMap)> = Vec::new();
    let mut out = Vec::with_capacity(cfg.pairs.len());
    for pair in &cfg.pairs {
        let from = cfg.object(pair.from).expect("validated");
        let to = cfg.object(pair.to).expect("validated");
        if pair.mode == GeodesicMode::CircularReduced {
            let c1 = cfg.axial_circle(pair.to)?;
            let c2 = cfg.axial_circle(pair.from)?;
            let s = path::circular_reduced_geodesic_on(metric.field(), c1, c2, cfg.m_theta)?;
            out.push(Geodesic::Sweep(s));
            continue;
        }
        if !maps.iter().any(|(id, _)| *id == pair.to) {
            maps.push((pair.to, fast_march(&metric, &to.source_set())?));
        }
        let d = &maps.iter().find(|(id, _)| *id == pair.to).unwrap().1;
        out.push(match &from.geometry {
            Geometry::Point(p) => Geodesic::Path(backtrack_point(d, *p, h / 2.0)?),
            Geometry::Curve(c) => Geodesic::Sweep(sweep_curve(d, c, h / 2.0)?),
        });
    }
    timings.fmm += t0.elapsed();
    Ok(out)
}

fn rasterize_all(geodesics: &[Geodesic], spec: GridSpec) -> Result<MeasureField> {
    let mut m = MeasureField::zeros(spec);
    for g in geodesics {
        m.accumulate(&g.rasterize(spec))?;
    }
    Ok(m)
}

/// What a per-iteration observer sees.
pub struct IterInfo<'a> {
    pub iteration: usize,
    pub u: &'a ScalarField,
    pub report: &'a EnergyReport,
    pub geodesics: &'a [Geodesic],
    pub recomputed: bool,
}

/// Runs the alternating scheme with a per-iteration callback (used for snapshots).
pub fn solve_with(cfg: &ProblemConfig, mut on_iter: impl FnMut(&IterInfo) -> Result<()>) -> Result<SolveState> {
    cfg.validate()?;
    let spec = cfg.spec()?;
    let model = cfg.model;
    let params = &cfg.params;
    let mut timings = Timings::default();
    let mut u = seed_field(cfg)?;
    let mut geodesics = Vec::new();
    let mut omega = ScalarField::zeros(spec);
    let mut history: Vec<EnergyReport> = Vec::with_capacity(cfg.max_iters);
    let mut clamp_events = Vec::new();
    let mut converged = false;
    let mut prev_total = f64::NAN;

    for iter in 0..cfg.max_iters {
        let recompute = iter % cfg.geodesic_every == 0;
        if recompute {
            geodesics = compute_geodesics(cfg, &u, &mut timings).map_err(|e| Error::Geodesic {
                iteration: iter,
                source: Box::new(e),
            })?;
            let t0 = Instant::now();
            let m = rasterize_all(&geodesics, spec)?;
            omega = geodesic_weight(&m, &u, params, model)?.omega;
            timings.rasterize += t0.elapsed();
            prev_total = total_energy(&u, Some(&omega), params, model)?.total;
        }
        let t0 = Instant::now();
        let (mut alpha, mut beta) = pick_stabilizers(&omega, &u, params, model);
        let mut next;
        let mut report;
        let mut retries = 0;
        loop {
            next = match model {
                PotentialKind::AmbrosioTortorelli => flow::at_step_with(&u, &omega, params, alpha),
                PotentialKind::WillmoreCahnHilliard => flow::wch_step_with(&u, &omega, params, alpha, beta),
            };
            if !next.is_finite() {
                return Err(Error::Degenerate(format!("phase field became non-finite at iteration {iter}")));
            }
            report = total_energy(&next, Some(&omega), params, model)?;
            // The obstacle clamp can undo the splitting guarantee; retry with stiffer stabilizers.
            if model == PotentialKind::AmbrosioTortorelli || report.total <= prev_total || retries == MAX_RETRIES {
                break;
            }
            retries += 1;
            alpha *= 4.0;
            beta *= 4.0;
        }
        u = next;
        timings.step += t0.elapsed();
        report.iteration = iter;
        report.alpha = alpha;
        report.beta = beta;
        if report.total > prev_total {
            let rel = (report.total - prev_total) / prev_total.abs().max(f64::MIN_POSITIVE);
            if model == PotentialKind::WillmoreCahnHilliard {
                clamp_events.push((iter, rel));
            }
            log::debug!("energy rose by {rel:e} at iteration {iter}");
        }
        prev_total = report.total;
        on_iter(&IterInfo {
            iteration: iter,
            u: &u,
            report: &report,
            geodesics: &geodesics,
            recomputed: recompute,
        })?;
        history.push(report);
        let w = cfg.convergence_window;
        if w > 0 && history.len() > w {
            let old = history[history.len() - 1 - w].total;
            if ((report.total - old) / report.total).abs() < cfg.convergence_tol {
                converged = true;
                break;
            }
        }
    }
    if model == PotentialKind::WillmoreCahnHilliard && u.max() > OBSTACLE {
        return Err(Error::ObstacleViolation {
            index: 0,
            value: u.max(),
        });
    }
    Ok(SolveState {
        u,
        geodesics,
        omega,
        history,
        converged,
        clamp_events,
        timings,
    })
}

pub fn solve(cfg: &ProblemConfig) -> Result<SolveState> {
    solve_with(cfg, |_| Ok(()))
}

/// Alternating scheme for points in 2D.
pub fn steiner_solve(cfg: &ProblemConfig) -> Result<SolveState> {
    if cfg.dim != 2 {
        return Err(Error::param("dim", "the Steiner solver works in 2D"));
    }
    if cfg.pairs.is_empty() {
        return Err(Error::param("pairs", "at least one pair is required"));
    }
    solve(cfg)
}

/// Alternating scheme for curves and points in 3D.
pub fn plateau_solve(cfg: &ProblemConfig) -> Result<SolveState> {
    if cfg.dim != 3 {
        return Err(Error::param("dim", "the Plateau solver works in 3D"));
    }
    if cfg.pairs.is_empty() {
        return Err(Error::param("pairs", "at least one pair is required"));
    }
    solve(cfg)
}

/// Length of the union of polylines; pieces within `tol` of already-counted pieces are skipped.
pub fn network_length(paths: &[Polyline], tol: f64, piece: f64) -> f64 {
    let mut counted: Vec<Point> = Vec::new();
    let mut total = 0.0;
    for p in paths {
        let mut fresh = Vec::new();
        for (a, b) in p.segments() {
            let len = dist(a, b);
            let k = (len / piece).ceil().max(1.0) as usize;
            for i in 0..k {
                let mid = crate::grid::lerp(a, b, (i as f64 + 0.5) / k as f64);
                if counted.iter().all(|&q| dist(q, mid) > tol) {
                    total += len / k as f64;
                    fresh.push(mid);
                }
            }
        }
        counted.extend(fresh);
    }
    total
}

/// Polylines of the point-to-point geodesics of a state.
pub fn paths(state: &SolveState) -> Vec<Polyline> {
    state
        .geodesics
        .iter()
        .filter_map(|g| match g {
            Geodesic::Path(p) => Some(p.clone()),
            Geodesic::Sweep(_) => None,
        })
        .collect()
}

/// Rims of the sweeps that end on boundary curves, for [`crate::mesh::Mesh::spanning_area`].
pub fn spanning_rims(cfg: &ProblemConfig, geodesics: &[Geodesic]) -> Vec<Rim> {
    let is_curve = |id: usize| matches!(cfg.object(id).map(|o| &o.geometry), Some(Geometry::Curve(_)));
    let mut rims = Vec::new();
    for (pair, g) in cfg.pairs.iter().zip(geodesics) {
        let Geodesic::Sweep(s) = g else { continue };
        // Reduced sweeps start on `to`, general sweeps on `from`.
        let (first, last) = match pair.mode {
            GeodesicMode::GeneralSweep => (pair.from, pair.to),
            GeodesicMode::CircularReduced => (pair.to, pair.from),
        };
        if is_curve(first) {
            rims.extend(Rim::first(s));
        }
        if is_curve(last) {
            rims.extend(Rim::last(s));
        }
    }
    rims
}
