//! The ten acceptance criteria. Runs without the libtest harness so every
//! criterion prints one PASS/FAIL line; exits non-zero if any fails.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use phasegeo::analysis::{self, CoareaParams, CylinderGeometry};
use phasegeo::eikonal::{fast_march, SourceSet, WeightField};
use phasegeo::flow::{self, ModelParams};
use phasegeo::grid::{convolve_gaussian, dist, GridSpec, Point, ScalarField};
use phasegeo::measure::{rasterize_polyline, rasterize_sweep, surface_area};
use phasegeo::mesh::extract_isosurface;
use phasegeo::path::{self, ClosedCurve, Polyline, SweepSurface};
use phasegeo::potential::{self, PotentialKind};
use phasegeo::solver::{self, BoundaryObject, Geodesic, GeodesicMode, Pair, ProblemConfig, SolveState};

const AT: PotentialKind = PotentialKind::AmbrosioTortorelli;
const WCH: PotentialKind = PotentialKind::WillmoreCahnHilliard;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn main() -> ExitCode {
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("eikonal consistency", c1_eikonal),
        ("geodesic oracle", c2_geodesic_oracle),
        ("profile identities", c3_profile),
        ("WCH profile stability", c4_wch_profile),
        ("energy decrease", c5_energy_decrease),
        ("Steiner reproduction", c6_steiner),
        ("Plateau disk", c7_disk),
        ("Plateau catenoid", c8_catenoid),
        ("limsup trend", c9_limsup),
        ("measure mass", c10_mass),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let tag = format!("c{}", k + 1);
        if filter.as_ref().is_some_and(|f| f != &tag) {
            continue;
        }
        let t = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict} {name}: {} [{:.1} s]", k + 1, o.detail, t.elapsed().as_secs_f64());
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

fn linf_point_error(n: usize, src: Point) -> f64 {
    let spec = GridSpec::new(2, n).unwrap();
    let w = WeightField::new(ScalarField::constant(spec, 1.0)).unwrap();
    let d = fast_march(&w, &SourceSet::point(src)).unwrap();
    d.values()
        .iter()
        .enumerate()
        .map(|(i, &v)| (v - dist(spec.node_point(i), src)).abs())
        .fold(0.0, f64::max)
}

fn c1_eikonal() -> Outcome {
    let t = Instant::now();
    let src = [0.37, 0.52, 0.0];
    let e64 = linf_point_error(64, src);
    let e128 = linf_point_error(128, src);
    let h = 1.0 / 128.0;
    let ratio = e128 / e64;
    let elapsed = t.elapsed();
    outcome(
        e128 <= 2.0 * h && ratio <= 0.6 && elapsed < Duration::from_secs(5),
        format!("Linf at n=128 = {:.3}h (<= 2h), decay ratio {ratio:.3} (<= 0.6), {:.2} s", e128 / h, elapsed.as_secs_f64()),
    )
}

fn c2_geodesic_oracle() -> Outcome {
    // [-1, 1]^2 mapped onto the unit box.
    let weight = |x: f64, y: f64| ((2.0 * x - 1.0).powi(2) + (2.0 * y - 1.0).powi(2)).max(1e-4);
    let a0 = [0.15, 0.85, 0.0];
    let a1 = [0.85, 0.15, 0.0];
    let oracle = common::dijkstra_8(256, weight, [a0[0], a0[1]], [a1[0], a1[1]]);

    let spec = GridSpec::new(2, 128).unwrap();
    let w = ScalarField::from_fn(spec, |p| weight(p[0], p[1]));
    let d = fast_march(&WeightField::with_floor(w.clone(), 1e-4).unwrap(), &SourceSet::point(a0)).unwrap();
    let fmm = d.value_at(a1);
    let (path_len, ok_path) = match path::backtrack_point(&d, a1, 0.5 * spec.h()) {
        Ok(p) => (p.weighted_length(&w), true),
        Err(_) => (f64::NAN, false),
    };
    let e_fmm = (fmm / oracle - 1.0).abs();
    let e_path = (path_len / oracle - 1.0).abs();
    outcome(
        ok_path && e_fmm <= 0.03 && e_path <= 0.03,
        format!("Dijkstra {oracle:.5}, FMM {fmm:.5} ({:.2}%), path {path_len:.5} ({:.2}%)", 100.0 * e_fmm, 100.0 * e_path),
    )
}

fn c3_profile() -> Outcome {
    let mut worst1: f64 = 0.0;
    let mut worst2: f64 = 0.0;
    let step = 1e-3;
    for i in 0..=40 {
        let s = -5.0 + 0.25 * i as f64;
        let y = potential::profile_y(s);
        let first = (potential::profile_y_prime(s).abs() - (2.0 * potential::w(y)).sqrt()).abs();
        let f = |k: f64| potential::profile_y(s + k * step);
        let ypp = (-f(2.0) + 16.0 * f(1.0) - 30.0 * y + 16.0 * f(-1.0) - f(-2.0)) / (12.0 * step * step);
        let second = (ypp - potential::w_prime(y).unwrap()).abs();
        worst1 = worst1.max(first);
        worst2 = worst2.max(second);
    }
    outcome(
        worst1 <= 1e-8 && worst2 <= 1e-8,
        format!("max | |y'| - sqrt(2W(y)) | = {worst1:.1e}, max |y'' - W'(y)| = {worst2:.1e} (<= 1e-8)"),
    )
}

fn c4_wch_profile() -> Outcome {
    let n = 128;
    let spec = GridSpec::new(2, n).unwrap();
    let p = ModelParams::reproduction(n, WCH);
    let eps = 2.0 / n as f64;
    let params_ok = (p.eps - eps).abs() < 1e-15 && (p.dt - 10.0 * eps * eps).abs() < 1e-15 && (p.sigma - 1.0 / (eps * eps)).abs() < 1e-9;
    let u0 = ScalarField::from_fn(spec, |x| potential::profile_y((x[0] - 0.5).abs() / p.eps));
    let zero = ScalarField::zeros(spec);
    let mut u = u0.clone();
    for _ in 0..100 {
        u = flow::wch_step(&u, &zero, &p).unwrap();
    }
    let drift = u.max_abs_diff(&u0);
    outcome(params_ok && drift <= 0.02, format!("Linf drift after 100 steps = {drift:.2e} (<= 0.02)"))
}

fn steiner3_config(model: PotentialKind, iters: usize) -> ProblemConfig {
    let mut cfg = ProblemConfig::new("steiner3", model, 2, 128);
    for k in 0..3 {
        let a = PI / 2.0 + 2.0 * PI * k as f64 / 3.0;
        cfg.objects.push(BoundaryObject::point(k, [0.5 + 0.3 * a.cos(), 0.5 + 0.3 * a.sin(), 0.0]));
    }
    cfg.pairs = (1..3).map(|k| Pair { from: k, to: 0, mode: GeodesicMode::GeneralSweep }).collect();
    cfg.max_iters = iters;
    cfg.convergence_window = 0;
    cfg
}

struct SteinerRun {
    state: SolveState,
    /// Largest relative energy rise between consecutive steps with the same geodesics.
    worst_rise: f64,
    elapsed: Duration,
}

fn run_steiner(model: PotentialKind, iters: usize) -> SteinerRun {
    let cfg = steiner3_config(model, iters);
    let t = Instant::now();
    let mut prev: Option<f64> = None;
    let mut worst_rise: f64 = 0.0;
    let state = solver::solve_with(&cfg, |info| {
        if let (Some(p), false) = (prev, info.recomputed) {
            worst_rise = worst_rise.max((info.report.total - p) / p.abs());
        }
        prev = Some(info.report.total);
        Ok(())
    })
    .unwrap();
    SteinerRun { state, worst_rise, elapsed: t.elapsed() }
}

fn steiner_runs() -> &'static (SteinerRun, SteinerRun) {
    static RUNS: std::sync::OnceLock<(SteinerRun, SteinerRun)> = std::sync::OnceLock::new();
    RUNS.get_or_init(|| (run_steiner(AT, 3000), run_steiner(WCH, 1000)))
}

fn c5_energy_decrease() -> Outcome {
    let (at, wch) = steiner_runs();
    let worst_clamp = wch.state.clamp_events.iter().map(|e| e.1).fold(0.0, f64::max);
    // Round-off allowance only: the AT step is unconditionally stable.
    let at_ok = at.worst_rise <= 1e-12;
    outcome(
        at_ok && worst_clamp <= 1e-3 && wch.worst_rise <= 1e-3,
        format!(
            "AT worst rise {:.1e} over {} steps; WCH {} clamp events, worst {worst_clamp:.1e} (<= 1e-3)",
            at.worst_rise,
            at.state.history.len(),
            wch.state.clamp_events.len()
        ),
    )
}

fn c6_steiner() -> Outcome {
    let (at, wch) = steiner_runs();
    let h = 1.0 / 128.0;
    let fermat = common::fermat_length([0, 1, 2].map(|k| {
        let a = PI / 2.0 + 2.0 * PI * k as f64 / 3.0;
        [0.3 * a.cos(), 0.3 * a.sin()]
    }));
    let len = |s: &SolveState| solver::network_length(&solver::paths(s), 2.0 * h, 0.25 * h);
    let (la, lw) = (len(&at.state), len(&wch.state));
    let (ea, ew) = ((la / fermat - 1.0).abs(), (lw / fermat - 1.0).abs());
    let limit = Duration::from_secs(180);
    outcome(
        ea <= 0.05 && ew <= 0.05 && at.elapsed < limit && wch.elapsed < limit,
        format!(
            "3R = {fermat:.3}; AT 3000 it {la:.4} ({:.1}%, {:.0} s); WCH 1000 it {lw:.4} ({:.1}%, {:.0} s)",
            100.0 * ea,
            at.elapsed.as_secs_f64(),
            100.0 * ew,
            wch.elapsed.as_secs_f64()
        ),
    )
}

fn c7_disk() -> Outcome {
    let r = 0.3;
    let center = [0.5, 0.5, 0.5];
    let mut cfg = ProblemConfig::new("plateau_d1_a", WCH, 3, 64);
    cfg.objects.push(BoundaryObject::curve(0, ClosedCurve::horizontal_circle(center, r, 256).unwrap()));
    cfg.objects.push(BoundaryObject::point(1, center));
    cfg.pairs = vec![Pair { from: 0, to: 1, mode: GeodesicMode::GeneralSweep }];
    cfg.max_iters = 300;
    cfg.convergence_window = 0;
    let t = Instant::now();
    let st = match solver::plateau_solve(&cfg) {
        Ok(st) => st,
        Err(e) => return outcome(false, format!("solver failed: {e}")),
    };
    let mesh = extract_isosurface(&st.u, cfg.params.level).unwrap();
    let area = mesh.spanning_area(&solver::spanning_rims(&cfg, &st.geodesics));
    let exact = PI * r * r;
    let err = (area / exact - 1.0).abs();

    let spec = st.u.spec();
    let cyl = CylinderGeometry::flat(center, r, 0.15, 1.3).unwrap();
    let g = analysis::coarea_g(&st.u, WCH);
    let params = CoareaParams::new(cfg.params.eps, cfg.params.lambda);
    let sep = analysis::coarea_scan(&g, &params).and_then(|scan| {
        let obstacle = analysis::mask_union(&analysis::sublevel_mask(&g, scan.t_eps), &cyl.sigma_mask(spec))?;
        analysis::separation_check(&cyl, &obstacle, spec)
    });
    let elapsed = t.elapsed();
    let (separated, sep_detail) = match sep {
        Ok(s) => (s.separated, format!("{:?}, {} components", s.status, s.components)),
        Err(e) => (false, format!("separation check failed: {e}")),
    };
    outcome(
        err <= 0.10 && separated && elapsed < Duration::from_secs(600),
        format!("area {area:.4} vs pi R^2 = {exact:.4} ({:.1}%), separation {sep_detail}, {:.0} s", 100.0 * err, elapsed.as_secs_f64()),
    )
}

fn c8_catenoid() -> Outcome {
    let (r, sep) = (0.25, 0.25);
    let oracle = common::catenoid_area(r, sep).expect("inside the catenoid regime");
    let cylinder = 2.0 * PI * r * sep;
    let mut cfg = ProblemConfig::new("plateau_2circ_cat", WCH, 3, 64);
    for (k, z) in [0.5 - sep / 2.0, 0.5 + sep / 2.0].into_iter().enumerate() {
        cfg.objects.push(BoundaryObject::curve(k, ClosedCurve::horizontal_circle([0.5, 0.5, z], r, 256).unwrap()));
    }
    cfg.pairs = vec![Pair { from: 0, to: 1, mode: GeodesicMode::GeneralSweep }];
    cfg.max_iters = 400;
    cfg.convergence_window = 0;
    let t = Instant::now();
    let st = match solver::plateau_solve(&cfg) {
        Ok(st) => st,
        Err(e) => return outcome(false, format!("solver failed: {e}")),
    };
    let mesh = extract_isosurface(&st.u, cfg.params.level).unwrap();
    let area = mesh.spanning_area(&solver::spanning_rims(&cfg, &st.geodesics));
    let sweep = match &st.geodesics[0] {
        Geodesic::Sweep(s) => surface_area(s),
        Geodesic::Path(_) => f64::NAN,
    };
    let err = (area / oracle - 1.0).abs();
    outcome(
        area < cylinder && err <= 0.10,
        format!(
            "area {area:.4} (sweep {sweep:.4}) vs catenoid {oracle:.4} ({:.1}%), cylinder {cylinder:.4}, {:.0} s",
            100.0 * err,
            t.elapsed().as_secs_f64()
        ),
    )
}

fn c9_limsup() -> Outcome {
    let spec = GridSpec::new(3, 256).unwrap();
    let (center, r) = ([0.5, 0.5, 0.5], 0.3);
    let exact = PI * r * r;
    let d = analysis::disk_distance(spec, center, r);
    let mut errors = Vec::new();
    let mut worst_geo: f64 = 0.0;
    let mut ratios = Vec::new();
    for eps in [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0] {
        let c = eps * eps;
        let (k, delta) = (c * c, c * c);
        let u = analysis::recovery_sequence(&d, eps, k).unwrap();
        let e = analysis::at_energy_in(&u, eps, |p| ((p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2)).sqrt() <= r);
        // The geodesic penalty of the disk itself.
        let geo = (k + delta) * exact / c;
        worst_geo = worst_geo.max(geo / (e + geo));
        errors.push((e - exact).abs());
        ratios.push(e / exact);
    }
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);
    let last = (ratios[2] - 1.0).abs();
    outcome(
        monotone && last <= 0.15 && worst_geo < 0.01,
        format!(
            "E / pi R^2 = {:.4}, {:.4}, {:.4}; geodesic share {worst_geo:.1e} (< 0.01)",
            ratios[0], ratios[1], ratios[2]
        ),
    )
}

fn c10_mass() -> Outcome {
    let spec2 = GridSpec::new(2, 128).unwrap();
    let seg = Polyline::open(vec![[0.2, 0.3, 0.0], [0.7, 0.3, 0.0]]);
    let e_seg = (rasterize_polyline(&seg, spec2).mass() - 0.5).abs();
    let circle = ClosedCurve::planar_circle(0.5, 0.5, 0.3, 4096).unwrap();
    let circ_mass = rasterize_polyline(&circle.to_polyline(), spec2);
    let e_circ = (circ_mass.mass() - 2.0 * PI * 0.3).abs();

    let spec3 = GridSpec::new(3, 32).unwrap();
    let disk_rows = (0..=64)
        .map(|k| {
            let rr = 0.3 * (1.0 - k as f64 / 64.0);
            (0..256)
                .map(|j| {
                    let a = 2.0 * PI * j as f64 / 256.0;
                    [0.5 + rr * a.cos(), 0.5 + rr * a.sin(), 0.45]
                })
                .collect()
        })
        .collect();
    let disk = SweepSurface::new(disk_rows, true).unwrap();
    let disk_mass = rasterize_sweep(&disk, spec3);
    let e_disk = (disk_mass.mass() / surface_area(&disk) - 1.0).abs();
    let e_exact = (disk_mass.mass() / (PI * 0.09) - 1.0).abs();

    let smooth2 = convolve_gaussian(circ_mass.field(), 2.0 * spec2.h()).unwrap();
    let smooth3 = convolve_gaussian(disk_mass.field(), 2.0 * spec3.h()).unwrap();
    let e_moll = (smooth2.integral() - circ_mass.mass()).abs().max((smooth3.integral() - disk_mass.mass()).abs());
    outcome(
        e_seg <= 1e-4 && e_circ <= 1e-4 && e_disk <= 0.01 && e_exact <= 0.01 && e_moll <= 1e-10,
        format!(
            "polyline errors {e_seg:.1e}, {e_circ:.1e} (<= 1e-4); sweep {:.2}% / {:.2}% of pi R^2 (<= 1%); mollifier {e_moll:.1e} (<= 1e-10)",
            100.0 * e_disk,
            100.0 * e_exact
        ),
    )
}
