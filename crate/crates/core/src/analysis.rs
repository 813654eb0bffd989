//! Desk checks of the limit theory: recovery sequences, coarea level selection,
//! and topological separation of sublevel sets inside a cylinder.

use std::collections::VecDeque;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, Point, ScalarField};
use crate::mesh::extract_isosurface;
use crate::path::ClosedCurve;
use crate::potential::PotentialKind;

/// Cylinder `C0` (radius, half height) around `center`, its dilation `C = dilation * C0`,
/// and a boundary curve given as heights `graph[m]` over the rim at `theta = 2 pi m / M`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderGeometry {
    pub center: Point,
    pub radius: f64,
    pub half_height: f64,
    pub dilation: f64,
    pub graph: Vec<f64>,
}

impl CylinderGeometry {
    pub fn new(center: Point, radius: f64, half_height: f64, dilation: f64, graph: Vec<f64>) -> Result<Self> {
        if !(radius > 0.0) || !(half_height > 0.0) {
            return Err(Error::param("cylinder", "radius and half height must be positive"));
        }
        if !(dilation > 1.0) {
            return Err(Error::param("dilation", format!("must exceed 1, got {dilation}")));
        }
        if graph.len() < 3 {
            return Err(Error::param("graph", "need at least 3 samples"));
        }
        if let Some(g) = graph.iter().find(|g| !(g.abs() < half_height)) {
            return Err(Error::Geometry(format!("boundary height {g} leaves the cylinder")));
        }
        Ok(CylinderGeometry {
            center,
            radius,
            half_height,
            dilation,
            graph,
        })
    }

    /// Flat boundary: the horizontal circle through the middle of the cylinder.
    pub fn flat(center: Point, radius: f64, half_height: f64, dilation: f64) -> Result<Self> {
        Self::new(center, radius, half_height, dilation, vec![0.0; 64])
    }

    /// Checks that `C` stays four cells away from the box faces.
    pub fn check_fits(&self, spec: GridSpec) -> Result<()> {
        let margin = 4.0 * spec.h();
        let rr = self.dilation * self.radius;
        let hh = self.dilation * self.half_height;
        let lo = [self.center[0] - rr, self.center[1] - rr, self.center[2] - hh];
        let hi = [self.center[0] + rr, self.center[1] + rr, self.center[2] + hh];
        if (0..3).any(|a| lo[a] < margin || hi[a] > 1.0 - margin) {
            return Err(Error::Geometry(format!(
                "dilated cylinder [{lo:?}, {hi:?}] is closer than 4 cells to the box"
            )));
        }
        Ok(())
    }

    /// Height of the boundary graph at angle `theta` (periodic linear interpolation).
    pub fn height(&self, theta: f64) -> f64 {
        let m = self.graph.len();
        let s = theta.rem_euclid(2.0 * PI) / (2.0 * PI) * m as f64;
        let k = s.floor() as usize % m;
        let f = s - s.floor();
        (1.0 - f) * self.graph[k] + f * self.graph[(k + 1) % m]
    }

    pub fn boundary_curve(&self, samples: usize) -> Result<ClosedCurve> {
        ClosedCurve::new(
            (0..samples)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / samples as f64;
                    [
                        self.center[0] + self.radius * t.cos(),
                        self.center[1] + self.radius * t.sin(),
                        self.center[2] + self.height(t),
                    ]
                })
                .collect(),
        )
    }

    fn polar(&self, p: Point) -> (f64, f64, f64) {
        let (x, y) = (p[0] - self.center[0], p[1] - self.center[1]);
        ((x * x + y * y).sqrt(), y.atan2(x), p[2] - self.center[2])
    }

    /// Inside the inner cylinder `C0` (closed).
    pub fn in_inner(&self, p: Point) -> bool {
        let (r, _, z) = self.polar(p);
        r <= self.radius && z.abs() <= self.half_height
    }

    /// Inside the dilated cylinder `C`.
    pub fn in_outer(&self, p: Point) -> bool {
        let (r, _, z) = self.polar(p);
        r <= self.dilation * self.radius && z.abs() <= self.dilation * self.half_height
    }

    /// Voxels of the radial extension of the boundary between `C0` and `C`, one cell thick.
    pub fn sigma_mask(&self, spec: GridSpec) -> ScalarField {
        let h = spec.h();
        ScalarField::from_fn(spec, |p| {
            let (r, t, z) = self.polar(p);
            let on = r >= self.radius - h && r <= self.dilation * self.radius && (z - self.height(t)).abs() <= h;
            if on {
                1.0
            } else {
                0.0
            }
        })
    }

    /// North and south poles on the axis at `±0.9` of the inner half height.
    pub fn poles(&self) -> [Point; 2] {
        let dz = 0.9 * self.half_height;
        [
            [self.center[0], self.center[1], self.center[2] + dz],
            [self.center[0], self.center[1], self.center[2] - dz],
        ]
    }
}

/// Distance to the horizontal disk of `radius` centred at `center`.
pub fn disk_distance(spec: GridSpec, center: Point, radius: f64) -> ScalarField {
    ScalarField::from_fn(spec, |p| {
        let (x, y) = (p[0] - center[0], p[1] - center[1]);
        let radial = ((x * x + y * y).sqrt() - radius).max(0.0);
        (radial * radial + (p[2] - center[2]).powi(2)).sqrt()
    })
}

/// Optimal-profile phase field built from the distance to a surface:
/// `k` on the core, an exponential rise through the shell, `1` outside.
pub fn recovery_sequence(dist_k: &ScalarField, eps: f64, k_eps: f64) -> Result<ScalarField> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param("eps", format!("must lie in (0, 1), got {eps}")));
    }
    if !(0.0..1.0).contains(&k_eps) {
        return Err(Error::param("k_eps", format!("must lie in [0, 1), got {k_eps}")));
    }
    if dist_k.values().iter().any(|&d| d < 0.0) {
        return Err(Error::param("dist_k", "distances must be nonnegative"));
    }
    let a = -2.0 * eps * eps.ln();
    let b = eps * eps;
    let lam = (1.0 - k_eps) / (1.0 - eps);
    Ok(dist_k.map(|d| {
        if d <= b {
            k_eps
        } else if d <= a + b {
            k_eps + lam * (1.0 - ((b - d) / (2.0 * eps)).exp())
        } else {
            1.0
        }
    }))
}

/// `∫ eps |∇u|^2 + (1 - u)^2 / (4 eps)` over the nodes where `region` holds,
/// with forward differences.
pub fn at_energy_in(u: &ScalarField, eps: f64, region: impl Fn(Point) -> bool) -> f64 {
    let spec = u.spec();
    let n = spec.n();
    let h = spec.h();
    let v = u.values();
    let mut sum = 0.0;
    for i in 0..spec.len() {
        let p = spec.node_point(i);
        if !region(p) {
            continue;
        }
        let c = spec.coords(i);
        let mut grad2 = 0.0;
        for a in 0..spec.dim() {
            if c[a] + 1 < n {
                let g = (v[i + spec.stride(a)] - v[i]) / h;
                grad2 += g * g;
            }
        }
        sum += eps * grad2 + (1.0 - v[i]).powi(2) / (4.0 * eps);
    }
    sum * spec.cell_volume()
}

/// Parameters of the coarea level scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoareaParams {
    pub eps: f64,
    /// Lower end of the scanned interval.
    pub s_eps: f64,
    pub levels: usize,
}

impl CoareaParams {
    /// `s_eps = 2 c_eps`, 64 levels.
    pub fn new(eps: f64, c_eps: f64) -> Self {
        CoareaParams {
            eps,
            s_eps: 2.0 * c_eps,
            levels: 64,
        }
    }
}

/// `g = v - v^2 / 2` for the well-at-one variable `v` of the model.
pub fn coarea_g(u: &ScalarField, model: PotentialKind) -> ScalarField {
    u.map(|x| {
        let v = model.geodesic_phase(x).clamp(0.0, 1.0);
        v - v * v / 2.0
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoareaScan {
    pub t_eps: f64,
    /// `(t, perimeter of {g = t})`.
    pub table: Vec<(f64, f64)>,
    pub spacing: f64,
}

impl CoareaScan {
    /// Riemann sum of the perimeters over the scanned levels.
    pub fn integral(&self) -> f64 {
        self.table.iter().map(|(_, p)| p).sum::<f64>() * self.spacing
    }

    /// Mean perimeter over the scanned interval.
    pub fn average(&self) -> f64 {
        self.integral() / (self.spacing * self.table.len() as f64)
    }
}

/// Scans level sets of `g` on `[s_eps, 1/2 - eps]` and picks a level whose
/// perimeter does not exceed the mean: the largest such level, since the
/// lowest sublevel sets of a grid field are perforated.
pub fn coarea_scan(g: &ScalarField, params: &CoareaParams) -> Result<CoareaScan> {
    let (lo, hi) = (params.s_eps, 0.5 - params.eps);
    if !(lo < hi) || params.levels == 0 {
        return Err(Error::param("s_eps", format!("empty level interval [{lo}, {hi}]")));
    }
    let (min, max) = (g.min(), g.max());
    if max - min < 1e-12 {
        return Err(Error::Degenerate(format!("g is constant ({min})")));
    }
    let spacing = (hi - lo) / params.levels as f64;
    let mut table = Vec::with_capacity(params.levels);
    for k in 0..params.levels {
        let t = lo + (k as f64 + 0.5) * spacing;
        let perimeter = if t > min && t < max {
            extract_isosurface(g, t)?.measure()
        } else {
            0.0
        };
        table.push((t, perimeter));
    }
    let mean = table.iter().map(|(_, p)| p).sum::<f64>() / table.len() as f64;
    let (t_eps, _) = table
        .iter()
        .copied()
        .filter(|&(_, p)| p <= mean)
        .last()
        .expect("some level is at most the mean");
    Ok(CoareaScan { t_eps, table, spacing })
}

/// Mask (1 = obstacle) of `{g <= t}`.
pub fn sublevel_mask(g: &ScalarField, t: f64) -> ScalarField {
    g.map(|x| if x <= t { 1.0 } else { 0.0 })
}

/// Pointwise union of two masks.
pub fn mask_union(a: &ScalarField, b: &ScalarField) -> Result<ScalarField> {
    a.zip_map(b, |x, y| if x > 0.5 || y > 0.5 { 1.0 } else { 0.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeparationStatus {
    Separated,
    Connected,
    /// A pole voxel is itself part of the obstacle.
    PoleBlocked,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Separation {
    pub separated: bool,
    pub components: usize,
    pub status: SeparationStatus,
}

/// Flood fills `C` minus the obstacle (6-connected) and tests whether the poles
/// end up in different components.
pub fn separation_check(region: &CylinderGeometry, obstacle: &ScalarField, spec: GridSpec) -> Result<Separation> {
    obstacle.spec().check_same(&spec)?;
    if spec.dim() != 3 {
        return Err(Error::param("spec", "separation is checked on 3D grids"));
    }
    region.check_fits(spec)?;
    let n = spec.n();
    let h = spec.h();
    let free: Vec<bool> = (0..spec.len())
        .map(|i| region.in_outer(spec.node_point(i)) && obstacle.values()[i] <= 0.5)
        .collect();
    let mut label = vec![usize::MAX; spec.len()];
    let mut components = 0;
    let mut queue = VecDeque::new();
    for seed in 0..spec.len() {
        if !free[seed] || label[seed] != usize::MAX {
            continue;
        }
        label[seed] = components;
        queue.push_back(seed);
        while let Some(i) = queue.pop_front() {
            let c = spec.coords(i);
            for a in 0..3 {
                let s = spec.stride(a);
                let nbrs = [(c[a] > 0).then(|| i - s), (c[a] + 1 < n).then(|| i + s)];
                for j in nbrs.into_iter().flatten() {
                    if free[j] && label[j] == usize::MAX {
                        label[j] = components;
                        queue.push_back(j);
                    }
                }
            }
        }
        components += 1;
    }
    let pole_index = |p: Point| {
        let c = [0, 1, 2].map(|a| ((p[a] / h).round() as usize).min(n - 1));
        spec.index(c)
    };
    let [north, south] = region.poles().map(pole_index);
    if !free[north] || !free[south] {
        return Ok(Separation {
            separated: false,
            components,
            status: SeparationStatus::PoleBlocked,
        });
    }
    let separated = label[north] != label[south];
    Ok(Separation {
        separated,
        components,
        status: if separated {
            SeparationStatus::Separated
        } else {
            SeparationStatus::Connected
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometry() -> CylinderGeometry {
        CylinderGeometry::flat([0.5, 0.5, 0.5], 0.25, 0.15, 1.3).unwrap()
    }

    #[test]
    fn recovery_values() {
        let spec = GridSpec::new(3, 16).unwrap();
        let eps = 0.05;
        let k = eps * eps;
        let d = ScalarField::from_fn(spec, |p| (p[2] - 0.5).abs());
        let u = recovery_sequence(&d, eps, k).unwrap();
        let a = -2.0 * eps * eps.ln();
        for (&di, &ui) in d.values().iter().zip(u.values()) {
            if di == 0.0 {
                assert_eq!(ui, k);
            }
            if di > a + eps * eps {
                assert_eq!(ui, 1.0);
            }
            assert!((k..=1.0 + 1e-12).contains(&ui));
        }
        assert!(recovery_sequence(&d, 1.0, k).is_err());
    }

    #[test]
    fn recovery_is_continuous() {
        let eps: f64 = 0.03;
        let k = eps * eps;
        let a = -2.0 * eps * eps.ln();
        let b = eps * eps;
        let spec = GridSpec::new(2, 8).unwrap();
        let at = |d: f64| recovery_sequence(&ScalarField::constant(spec, d), eps, k).unwrap().values()[0];
        for edge in [b, a + b] {
            assert!((at(edge - 1e-9) - at(edge + 1e-9)).abs() < 1e-6);
        }
    }

    #[test]
    fn coarea_degenerate() {
        let spec = GridSpec::new(3, 8).unwrap();
        let g = coarea_g(&ScalarField::constant(spec, 1.0), PotentialKind::AmbrosioTortorelli);
        assert!(matches!(coarea_scan(&g, &CoareaParams::new(0.1, 0.01)), Err(Error::Degenerate(_))));
    }

    #[test]
    fn coarea_matches_gradient_quadrature() {
        let spec = GridSpec::new(2, 256).unwrap();
        let eps = 4.0 * spec.h();
        let u = ScalarField::from_fn(spec, |p| 1.0 - (-(p[0] - 0.5).abs() / (2.0 * eps)).exp());
        let g = coarea_g(&u, PotentialKind::AmbrosioTortorelli);
        let params = CoareaParams::new(eps, 0.01);
        let scan = coarea_scan(&g, &params).unwrap();
        // Direct quadrature of |∇g| over the nodes whose value is in the scanned interval.
        let (lo, hi) = (params.s_eps, 0.5 - eps);
        let h = spec.h();
        let gv = g.values();
        let mut direct = 0.0;
        for i in 0..spec.len() {
            let c = spec.coords(i);
            if c[0] + 1 >= spec.n() {
                continue;
            }
            let (a, b) = (gv[i], gv[i + 1]);
            let (s, t) = (a.min(b), a.max(b));
            direct += (t.min(hi) - s.max(lo)).max(0.0) * h;
        }
        let rel = (scan.integral() / direct - 1.0).abs();
        assert!(rel < 0.1, "{} vs {direct}", scan.integral());
        assert!(scan.table.iter().all(|(_, p)| *p >= 0.0));
        let best = scan.table.iter().find(|(t, _)| *t == scan.t_eps).unwrap().1;
        assert!(best <= scan.average() + 1e-12);
    }

    #[test]
    fn slab_separates() {
        let spec = GridSpec::new(3, 32).unwrap();
        let geo = geometry();
        let h = spec.h();
        let slab = ScalarField::from_fn(spec, |p| if (p[2] - 0.5).abs() <= h / 2.0 { 1.0 } else { 0.0 });
        let s = separation_check(&geo, &slab, spec).unwrap();
        assert!(s.separated);
        assert_eq!(s.components, 2);
        let none = separation_check(&geo, &ScalarField::zeros(spec), spec).unwrap();
        assert_eq!(none, Separation { separated: false, components: 1, status: SeparationStatus::Connected });
    }

    #[test]
    fn disk_with_extension_separates() {
        let spec = GridSpec::new(3, 32).unwrap();
        let geo = geometry();
        let h = spec.h();
        let disk = ScalarField::from_fn(spec, |p| {
            let r = ((p[0] - 0.5).powi(2) + (p[1] - 0.5).powi(2)).sqrt();
            if r <= 0.25 && (p[2] - 0.5).abs() <= h / 2.0 {
                1.0
            } else {
                0.0
            }
        });
        let alone = separation_check(&geo, &disk, spec).unwrap();
        assert!(!alone.separated);
        let both = mask_union(&disk, &geo.sigma_mask(spec)).unwrap();
        assert!(separation_check(&geo, &both, spec).unwrap().separated);
    }

    #[test]
    fn blocked_pole_is_reported() {
        let spec = GridSpec::new(3, 32).unwrap();
        let full = ScalarField::constant(spec, 1.0);
        let s = separation_check(&geometry(), &full, spec).unwrap();
        assert_eq!(s.status, SeparationStatus::PoleBlocked);
        assert!(!s.separated);
    }

    #[test]
    fn geometry_must_fit() {
        let spec = GridSpec::new(3, 32).unwrap();
        let big = CylinderGeometry::flat([0.5, 0.5, 0.5], 0.4, 0.1, 1.2).unwrap();
        assert!(big.check_fits(spec).is_err());
        assert!(CylinderGeometry::flat([0.5; 3], 0.2, 0.1, 0.9).is_err());
        assert!(CylinderGeometry::new([0.5; 3], 0.2, 0.1, 1.2, vec![0.0, 0.2, 0.0]).is_err());
    }
}
