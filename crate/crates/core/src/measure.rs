//! Rasterized Hausdorff measures of curves and sweeps, and the mollified geodesic weight.

use crate::error::Result;
use crate::flow::ModelParams;
use crate::grid::{convolve_gaussian, cross, dist, lerp, norm, sub, GridSpec, Point, ScalarField};
use crate::path::{Polyline, SweepSurface};
use crate::potential::PotentialKind;

/// Grid density whose integral approximates a length or an area.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureField {
    field: ScalarField,
}

impl MeasureField {
    pub fn zeros(spec: GridSpec) -> Self {
        MeasureField {
            field: ScalarField::zeros(spec),
        }
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn into_field(self) -> ScalarField {
        self.field
    }

    pub fn spec(&self) -> GridSpec {
        self.field.spec()
    }

    /// Total deposited measure.
    pub fn mass(&self) -> f64 {
        self.field.integral()
    }

    /// Adds another measure on the same grid.
    pub fn accumulate(&mut self, other: &MeasureField) -> Result<()> {
        self.field = self.field.zip_map(&other.field, |a, b| a + b)?;
        Ok(())
    }

    /// Multilinear deposit of `mass` at `p` (periodic).
    fn splat(&mut self, p: Point, mass: f64) {
        let spec = self.field.spec();
        let dim = spec.dim();
        let n = spec.n() as f64;
        let density = mass / spec.cell_volume();
        let mut base = [0i64; 3];
        let mut frac = [0.0; 3];
        for a in 0..dim {
            let s = p[a] * n;
            let f = s.floor();
            base[a] = f as i64;
            frac[a] = s - f;
        }
        let values = self.field.values_mut();
        for corner in 0..(1usize << dim) {
            let mut c = [0i64; 3];
            let mut wgt = 1.0;
            for a in 0..dim {
                let bit = (corner >> a) & 1;
                c[a] = base[a] + bit as i64;
                wgt *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
            }
            if wgt != 0.0 {
                values[spec.wrapped_index(c)] += wgt * density;
            }
        }
    }
}

/// `H^1` measure of a polyline: pieces no longer than `h/2` splatted at their midpoints.
pub fn rasterize_polyline(c: &Polyline, spec: GridSpec) -> MeasureField {
    let mut m = MeasureField::zeros(spec);
    let max_piece = spec.h() / 2.0;
    for (a, b) in c.segments() {
        let len = dist(a, b);
        if len == 0.0 {
            continue;
        }
        let k = (len / max_piece).ceil().max(1.0) as usize;
        let piece = len / k as f64;
        for i in 0..k {
            m.splat(lerp(a, b, (i as f64 + 0.5) / k as f64), piece);
        }
    }
    m
}

pub fn triangle_area(t: &[Point; 3]) -> f64 {
    0.5 * norm(cross(sub(t[1], t[0]), sub(t[2], t[0])))
}

fn diameter(t: &[Point; 3]) -> f64 {
    dist(t[0], t[1]).max(dist(t[1], t[2])).max(dist(t[2], t[0]))
}

fn deposit_triangle(m: &mut MeasureField, t: [Point; 3], max_diam: f64) {
    let area = triangle_area(&t);
    if area == 0.0 {
        return;
    }
    if diameter(&t) <= max_diam {
        let c = [
            (t[0][0] + t[1][0] + t[2][0]) / 3.0,
            (t[0][1] + t[1][1] + t[2][1]) / 3.0,
            (t[0][2] + t[1][2] + t[2][2]) / 3.0,
        ];
        m.splat(c, area);
        return;
    }
    let m01 = lerp(t[0], t[1], 0.5);
    let m12 = lerp(t[1], t[2], 0.5);
    let m20 = lerp(t[2], t[0], 0.5);
    deposit_triangle(m, [t[0], m01, m20], max_diam);
    deposit_triangle(m, [m01, t[1], m12], max_diam);
    deposit_triangle(m, [m20, m12, t[2]], max_diam);
    deposit_triangle(m, [m01, m12, m20], max_diam);
}

/// `H^2` measure of a sweep lattice.
pub fn rasterize_sweep(s: &SweepSurface, spec: GridSpec) -> MeasureField {
    let mut m = MeasureField::zeros(spec);
    let h = spec.h();
    for t in s.triangles() {
        deposit_triangle(&mut m, t, h);
    }
    m
}

/// Sum of lattice triangle areas.
pub fn surface_area(s: &SweepSurface) -> f64 {
    s.triangles().map(|t| triangle_area(&t)).sum()
}

/// Mollified weight together with the scalar penalty it induces.
#[derive(Debug, Clone)]
pub struct GeodesicWeight {
    pub omega: ScalarField,
    pub penalty: f64,
}

/// `omega = rho * m` and `R = (1/lambda) int omega (delta + phi(u)^2)`.
pub fn geodesic_weight(
    m: &MeasureField,
    u: &ScalarField,
    params: &ModelParams,
    model: PotentialKind,
) -> Result<GeodesicWeight> {
    m.spec().check_same(&u.spec())?;
    // Round-off of the spectral convolution can leave tiny negative values.
    let omega = convolve_gaussian(m.field(), params.kernel_width)?.map(|w| w.max(0.0));
    let penalty = geodesic_penalty(&omega, u, params, model)?;
    Ok(GeodesicWeight { omega, penalty })
}

pub fn geodesic_penalty(
    omega: &ScalarField,
    u: &ScalarField,
    params: &ModelParams,
    model: PotentialKind,
) -> Result<f64> {
    omega.spec().check_same(&u.spec())?;
    let sum: f64 = omega
        .values()
        .iter()
        .zip(u.values())
        .map(|(&w, &x)| {
            let phi = model.geodesic_phase(x);
            w * (params.delta + phi * phi)
        })
        .sum();
    Ok(sum * omega.spec().cell_volume() / params.lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::ClosedCurve;
    use std::f64::consts::PI;

    fn square_patch(side: f64, k: usize, z: f64) -> SweepSurface {
        let x0 = 0.5 - side / 2.0;
        let rows = (0..=k)
            .map(|i| {
                (0..=k)
                    .map(|j| [x0 + side * j as f64 / k as f64, x0 + side * i as f64 / k as f64, z])
                    .collect()
            })
            .collect();
        SweepSurface::new(rows, false).unwrap()
    }

    fn disk_sweep(r: f64, m: usize, t: usize) -> SweepSurface {
        let rows = (0..=t)
            .map(|k| {
                let rr = r * (1.0 - k as f64 / t as f64);
                (0..m)
                    .map(|j| {
                        let a = 2.0 * PI * j as f64 / m as f64;
                        [0.5 + rr * a.cos(), 0.5 + rr * a.sin(), 0.45]
                    })
                    .collect()
            })
            .collect();
        SweepSurface::new(rows, true).unwrap()
    }

    #[test]
    fn segment_mass() {
        let spec = GridSpec::new(2, 64).unwrap();
        let seg = Polyline::open(vec![[0.2, 0.3, 0.0], [0.7, 0.3, 0.0]]);
        assert!((rasterize_polyline(&seg, spec).mass() - 0.5).abs() < 1e-8);
        let single = Polyline::open(vec![[0.4, 0.4, 0.0]]);
        assert_eq!(rasterize_polyline(&single, spec).mass(), 0.0);
    }

    #[test]
    fn circle_mass() {
        let spec = GridSpec::new(2, 128).unwrap();
        let c = ClosedCurve::planar_circle(0.5, 0.5, 0.3, 4096).unwrap();
        let mass = rasterize_polyline(&c.to_polyline(), spec).mass();
        assert!((mass - 2.0 * PI * 0.3).abs() < 1e-4, "{mass}");
    }

    #[test]
    fn sweep_masses() {
        let spec = GridSpec::new(3, 32).unwrap();
        let patch = square_patch(0.4, 8, 0.5);
        assert!((rasterize_sweep(&patch, spec).mass() - 0.16).abs() < 1e-3);
        let disk = disk_sweep(0.3, 256, 64);
        let mass = rasterize_sweep(&disk, spec).mass();
        assert!((mass / (PI * 0.09) - 1.0).abs() < 0.01, "{mass}");
        let degenerate = SweepSurface::new(vec![vec![[0.5, 0.5, 0.5]; 8]], true).unwrap();
        assert_eq!(rasterize_sweep(&degenerate, spec).mass(), 0.0);
        assert_eq!(surface_area(&degenerate), 0.0);
    }

    #[test]
    fn lattice_areas() {
        let unit = SweepSurface::new(
            vec![vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]], vec![[0.0, 1.0, 0.0], [1.0, 1.0, 0.0]]],
            false,
        )
        .unwrap();
        assert!((surface_area(&unit) - 1.0).abs() < 1e-15);
        let (r, height, m, t) = (0.25, 0.3, 256, 64);
        let rows = (0..=t)
            .map(|k| {
                let z = 0.35 + height * k as f64 / t as f64;
                (0..m)
                    .map(|j| {
                        let a = 2.0 * PI * j as f64 / m as f64;
                        [0.5 + r * a.cos(), 0.5 + r * a.sin(), z]
                    })
                    .collect()
            })
            .collect();
        let cyl = SweepSurface::new(rows, true).unwrap();
        let exact = 2.0 * PI * r * height;
        assert!((surface_area(&cyl) / exact - 1.0).abs() < 5e-3);
    }

    #[test]
    fn weight_penalties() {
        let spec = GridSpec::new(3, 32).unwrap();
        let params = ModelParams::reproduction(32, PotentialKind::WillmoreCahnHilliard);
        let patch = square_patch(0.4, 8, 0.5);
        let m = rasterize_sweep(&patch, spec);
        let area = m.mass();
        let wch = PotentialKind::WillmoreCahnHilliard;

        let zero = geodesic_weight(&MeasureField::zeros(spec), &ScalarField::zeros(spec), &params, wch).unwrap();
        assert_eq!(zero.penalty, 0.0);
        assert!(zero.omega.values().iter().all(|&w| w.abs() < 1e-12));

        let g = geodesic_weight(&m, &ScalarField::zeros(spec), &params, wch).unwrap();
        let expected = (params.delta + 1.0) * area / params.lambda;
        assert!((g.penalty / expected - 1.0).abs() < 1e-6);
        assert!((g.omega.integral() - area).abs() < 1e-10 * area.max(1.0));

        let quarter = geodesic_weight(&m, &ScalarField::constant(spec, 0.25), &params, wch).unwrap();
        let expected = params.delta * area / params.lambda;
        assert!((quarter.penalty / expected - 1.0).abs() < 1e-6);
    }

    #[test]
    fn translation_equivariance() {
        let spec = GridSpec::new(2, 64).unwrap();
        let h = spec.h();
        let shift = [0.37 * h, 0.61 * h, 0.0];
        let a = ClosedCurve::planar_circle(0.45, 0.5, 0.2, 512).unwrap();
        let b = ClosedCurve::planar_circle(0.45 + shift[0], 0.5 + shift[1], 0.2, 512).unwrap();
        let fa = rasterize_polyline(&a.to_polyline(), spec);
        let fb = rasterize_polyline(&b.to_polyline(), spec);
        // Compare against the continuous shift of fa, by sampling.
        let shifted = ScalarField::from_fn(spec, |p| fa.field().sample([p[0] - shift[0], p[1] - shift[1], 0.0]));
        let l1: f64 = shifted
            .values()
            .iter()
            .zip(fb.field().values())
            .map(|(x, y)| (x - y).abs())
            .sum::<f64>()
            * spec.cell_volume();
        assert!(l1 < 2.0 * PI * 0.2, "{l1}");
        assert!((fa.mass() - fb.mass()).abs() < 1e-10);
    }
}
