//! Periodic uniform grids on the unit box, scalar fields, and Fourier-diagonal operators.
//!
//! Node `i` along an axis sits at `i * h`, `h = 1 / n`. Values are stored row-major with
//! the x index fastest. Fourier coefficients share the same layout; index `i` along an axis
//! carries the integer frequency `i` for `i < n/2` and `i - n` otherwise.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// A point in the unit box. Planar problems leave the third coordinate at zero.
pub type Point = [f64; 3];

pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn scale(a: Point, s: f64) -> Point {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Point, b: Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: Point) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: Point, b: Point) -> f64 {
    norm(sub(a, b))
}

pub fn lerp(a: Point, b: Point, t: f64) -> Point {
    [
        a[0] + t * (b[0] - a[0]),
        a[1] + t * (b[1] - a[1]),
        a[2] + t * (b[2] - a[2]),
    ]
}

/// Closest point to `p` on the segment `[a, b]`.
pub fn closest_on_segment(p: Point, a: Point, b: Point) -> Point {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    if len2 == 0.0 {
        return a;
    }
    let t = (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0);
    lerp(a, b, t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    dim: usize,
    n: usize,
}

impl GridSpec {
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidGrid(format!("dimension must be 2 or 3, got {dim}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= 8, got {n}"
            )));
        }
        Ok(GridSpec { dim, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Number of nodes, `n^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Volume element `h^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.dim as i32)
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.n.pow(axis as u32)
    }

    pub fn index(&self, c: [usize; 3]) -> usize {
        let n = self.n;
        if self.dim == 2 {
            c[0] + n * c[1]
        } else {
            c[0] + n * (c[1] + n * c[2])
        }
    }

    /// Index of integer coordinates wrapped modulo `n` on every axis.
    pub fn wrapped_index(&self, c: [i64; 3]) -> usize {
        let n = self.n as i64;
        let w = |v: i64| v.rem_euclid(n) as usize;
        self.index([w(c[0]), w(c[1]), if self.dim == 3 { w(c[2]) } else { 0 }])
    }

    pub fn coords(&self, index: usize) -> [usize; 3] {
        let n = self.n;
        if self.dim == 2 {
            [index % n, index / n, 0]
        } else {
            [index % n, (index / n) % n, index / (n * n)]
        }
    }

    pub fn node_point(&self, index: usize) -> Point {
        let c = self.coords(index);
        let h = self.h();
        [c[0] as f64 * h, c[1] as f64 * h, c[2] as f64 * h]
    }

    /// Signed integer frequency carried by index `i` along one axis.
    pub fn frequency(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Frequency vector of a Fourier index (zero in unused axes).
    pub fn wavevector(&self, index: usize) -> [f64; 3] {
        let c = self.coords(index);
        let mut k = [0.0; 3];
        for (a, kk) in k.iter_mut().enumerate().take(self.dim) {
            *kk = self.frequency(c[a]) as f64;
        }
        k
    }

    pub fn contains(&self, p: Point) -> bool {
        (0..self.dim).all(|a| (0.0..=1.0).contains(&p[a]))
    }

    pub(crate) fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpecMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.n, self.dim)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    spec: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(spec: GridSpec) -> Self {
        Self::constant(spec, 0.0)
    }

    pub fn constant(spec: GridSpec, value: f64) -> Self {
        ScalarField {
            spec,
            values: vec![value; spec.len()],
        }
    }

    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values for a {spec} grid, got {}",
                spec.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Degenerate(format!("non-finite value at node {i}")));
        }
        Ok(ScalarField { spec, values })
    }

    /// Samples `f` at every node position.
    pub fn from_fn(spec: GridSpec, f: impl Fn(Point) -> f64) -> Self {
        let values = (0..spec.len()).map(|i| f(spec.node_point(i))).collect();
        ScalarField { spec, values }
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            spec: self.spec,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<ScalarField> {
        self.spec.check_same(&other.spec)?;
        Ok(ScalarField {
            spec: self.spec,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Grid-sum quadrature of the field over the unit box.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spec.cell_volume()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs_diff(&self, other: &ScalarField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Periodic multilinear interpolation at `p`.
    pub fn sample(&self, p: Point) -> f64 {
        let spec = self.spec;
        let n = spec.n as f64;
        let mut base = [0i64; 3];
        let mut frac = [0.0; 3];
        for a in 0..spec.dim {
            let x = p[a] * n;
            let f = x.floor();
            base[a] = f as i64;
            frac[a] = x - f;
        }
        let corners = 1usize << spec.dim;
        let mut acc = 0.0;
        for c in 0..corners {
            let mut w = 1.0;
            let mut idx = base;
            for a in 0..spec.dim {
                if c >> a & 1 == 1 {
                    idx[a] += 1;
                    w *= frac[a];
                } else {
                    w *= 1.0 - frac[a];
                }
            }
            if w != 0.0 {
                acc += w * self.values[spec.wrapped_index(idx)];
            }
        }
        acc
    }
}

/// Real, even Fourier multiplier over the frequency lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSymbol {
    spec: GridSpec,
    values: Vec<f64>,
}

impl FourierSymbol {
    /// Builds a symbol from a function of the angular wavevector `2 pi k`.
    pub fn from_fn(spec: GridSpec, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values = (0..spec.len())
            .map(|i| {
                let k = spec.wavevector(i);
                f([2.0 * PI * k[0], 2.0 * PI * k[1], 2.0 * PI * k[2]])
            })
            .collect();
        FourierSymbol { spec, values }
    }

    pub fn constant(spec: GridSpec, value: f64) -> Self {
        FourierSymbol {
            spec,
            values: vec![value; spec.len()],
        }
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at the integer frequency `k` (unused axes ignored).
    pub fn at(&self, k: [i64; 3]) -> f64 {
        self.values[self.spec.wrapped_index(k)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> FourierSymbol {
        FourierSymbol {
            spec: self.spec,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// Symbol `-(2 pi)^2 |k|^2` of the Laplacian.
pub fn laplacian_symbol(spec: GridSpec) -> FourierSymbol {
    FourierSymbol::from_fn(spec, |w| -(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]))
}

/// Symbol `exp(-width^2 (2 pi |k|)^2 / 2)` of convolution with a centred Gaussian.
pub fn gaussian_symbol(spec: GridSpec, width: f64) -> FourierSymbol {
    FourierSymbol::from_fn(spec, |w| {
        (-0.5 * width * width * (w[0] * w[0] + w[1] * w[1] + w[2] * w[2])).exp()
    })
}

/// Cached forward/inverse complex transforms for one grid.
pub struct Spectral {
    spec: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    lines: Vec<Complex64>,
}

impl Spectral {
    pub fn new(spec: GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(spec.n);
        let inverse = planner.plan_fft_inverse(spec.n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Spectral {
            spec,
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            lines: vec![Complex64::new(0.0, 0.0); spec.len()],
        }
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    /// Unnormalized forward transform of a real array.
    pub fn forward_real(&mut self, values: &[f64], out: &mut Vec<Complex64>) {
        out.clear();
        out.extend(values.iter().map(|&v| Complex64::new(v, 0.0)));
        self.transform(out, false);
    }

    /// Inverse transform (normalized by `1/N`), keeping the real part. Clobbers `data`.
    pub fn inverse_real(&mut self, data: &mut [Complex64], out: &mut [f64]) {
        self.transform(data, true);
        let scale = 1.0 / self.spec.len() as f64;
        for (o, c) in out.iter_mut().zip(data.iter()) {
            *o = c.re * scale;
        }
    }

    fn transform(&mut self, data: &mut [Complex64], inverse: bool) {
        let n = self.spec.n;
        let total = self.spec.len();
        debug_assert_eq!(data.len(), total);
        let fft = if inverse {
            self.inverse.clone()
        } else {
            self.forward.clone()
        };
        fft.process_with_scratch(data, &mut self.scratch);
        for axis in 1..self.spec.dim {
            let stride = self.spec.stride(axis);
            let block = stride * n;
            let lines = &mut self.lines;
            for ob in 0..total / block {
                let base = ob * block;
                for i in 0..n {
                    let row = &data[base + i * stride..base + (i + 1) * stride];
                    for (j, &v) in row.iter().enumerate() {
                        lines[(ob * stride + j) * n + i] = v;
                    }
                }
            }
            fft.process_with_scratch(lines, &mut self.scratch);
            for ob in 0..total / block {
                let base = ob * block;
                for i in 0..n {
                    let row = &mut data[base + i * stride..base + (i + 1) * stride];
                    for (j, v) in row.iter_mut().enumerate() {
                        *v = lines[(ob * stride + j) * n + i];
                    }
                }
            }
        }
    }

    /// `F^-1 [ symbol * F[f] ]` written into `out`.
    pub fn apply(&mut self, f: &[f64], symbol: &[f64], buf: &mut Vec<Complex64>, out: &mut [f64]) {
        self.forward_real(f, buf);
        for (c, &s) in buf.iter_mut().zip(symbol) {
            *c *= s;
        }
        self.inverse_real(buf, out);
    }
}

thread_local! {
    static ENGINES: RefCell<HashMap<GridSpec, Spectral>> = RefCell::new(HashMap::new());
}

/// Runs `f` with a per-thread cached transform engine for `spec`.
pub fn with_spectral<R>(spec: GridSpec, f: impl FnOnce(&mut Spectral) -> R) -> R {
    ENGINES.with(|cell| {
        let mut map = cell.borrow_mut();
        let engine = map.entry(spec).or_insert_with(|| Spectral::new(spec));
        f(engine)
    })
}

pub fn apply_symbol(f: &ScalarField, s: &FourierSymbol) -> Result<ScalarField> {
    f.spec.check_same(&s.spec)?;
    let mut out = vec![0.0; f.spec.len()];
    with_spectral(f.spec, |eng| {
        let mut buf = Vec::with_capacity(f.spec.len());
        eng.apply(&f.values, &s.values, &mut buf, &mut out);
    });
    Ok(ScalarField {
        spec: f.spec,
        values: out,
    })
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    apply_symbol(f, &laplacian_symbol(f.spec)).expect("same spec")
}

pub fn convolve_gaussian(f: &ScalarField, width: f64) -> Result<ScalarField> {
    if !(width >= 0.0) || !width.is_finite() {
        return Err(Error::param("width", format!("must be finite and >= 0, got {width}")));
    }
    if width == 0.0 {
        return Ok(f.clone());
    }
    apply_symbol(f, &gaussian_symbol(f.spec, width))
}

/// Spectral gradient, one field per axis. The Nyquist mode is dropped so the result is real.
pub fn spectral_gradient(f: &ScalarField) -> Vec<ScalarField> {
    let spec = f.spec;
    let n = spec.n;
    with_spectral(spec, |eng| {
        let mut hat = Vec::with_capacity(spec.len());
        eng.forward_real(&f.values, &mut hat);
        let mut buf = vec![Complex64::new(0.0, 0.0); spec.len()];
        (0..spec.dim)
            .map(|axis| {
                for (i, (b, &c)) in buf.iter_mut().zip(&hat).enumerate() {
                    let ci = spec.coords(i)[axis];
                    *b = if ci == n / 2 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        let w = 2.0 * PI * spec.frequency(ci) as f64;
                        c * Complex64::new(0.0, w)
                    };
                }
                let mut out = vec![0.0; spec.len()];
                eng.inverse_real(&mut buf, &mut out);
                ScalarField { spec, values: out }
            })
            .collect()
    })
}

/// `integral |grad f|^2 dx` by Parseval, consistent with `-integral f * lap f`.
pub fn dirichlet_integral(f: &ScalarField) -> f64 {
    let spec = f.spec;
    let lap = laplacian_symbol(spec);
    with_spectral(spec, |eng| {
        let mut hat = Vec::with_capacity(spec.len());
        eng.forward_real(&f.values, &mut hat);
        let sum: f64 = hat
            .iter()
            .zip(lap.values())
            .map(|(c, &s)| -s * c.norm_sqr())
            .sum();
        // Parseval: sum |f|^2 = sum |f_hat|^2 / N; the integral adds another 1/N.
        sum / (spec.len() as f64 * spec.len() as f64)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec2(n: usize) -> GridSpec {
        GridSpec::new(2, n).unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(1, 64).is_err());
        assert!(GridSpec::new(2, 4).is_err());
        assert!(GridSpec::new(3, 48).is_err());
        let s = GridSpec::new(3, 64).unwrap();
        assert_eq!(s.h() * s.n() as f64, 1.0);
    }

    #[test]
    fn laplacian_symbol_values() {
        let s = laplacian_symbol(spec2(128));
        assert_eq!(s.at([0, 0, 0]), 0.0);
        assert!((s.at([1, 0, 0]) + 4.0 * PI * PI).abs() < 1e-12);
        assert_eq!(s.at([1, 2, 0]), s.at([-1, -2, 0]));
    }

    #[test]
    fn laplacian_of_sine_mode() {
        let spec = spec2(128);
        let f = ScalarField::from_fn(spec, |p| (2.0 * PI * p[0]).sin());
        let lf = laplacian(&f);
        let expect = f.map(|v| -4.0 * PI * PI * v);
        assert!(lf.max_abs_diff(&expect) < 1e-10);
    }

    #[test]
    fn identity_and_zero_symbols() {
        let spec = GridSpec::new(3, 16).unwrap();
        let f = ScalarField::from_fn(spec, |p| (p[0] * 7.0).sin() + p[1] * p[2]);
        let same = apply_symbol(&f, &FourierSymbol::constant(spec, 1.0)).unwrap();
        assert!(same.max_abs_diff(&f) < 1e-12);
        let zero = apply_symbol(&f, &FourierSymbol::constant(spec, 0.0)).unwrap();
        assert_eq!(zero.max(), 0.0);
        assert_eq!(zero.min(), 0.0);
    }

    #[test]
    fn negative_laplacian_on_cosine() {
        let spec = spec2(64);
        let f = ScalarField::from_fn(spec, |p| (2.0 * PI * 3.0 * p[0]).cos());
        let neg_lap = laplacian_symbol(spec).map(|v| -v);
        let out = apply_symbol(&f, &neg_lap).unwrap();
        let w = 2.0 * PI * 3.0;
        assert!(out.max_abs_diff(&f.map(|v| w * w * v)) < 1e-9);
    }

    #[test]
    fn mismatched_specs_error() {
        let f = ScalarField::zeros(spec2(16));
        let s = FourierSymbol::constant(spec2(32), 1.0);
        assert!(matches!(apply_symbol(&f, &s), Err(Error::SpecMismatch { .. })));
    }

    #[test]
    fn gaussian_width_zero_and_constants() {
        let spec = spec2(32);
        let f = ScalarField::from_fn(spec, |p| p[0] * p[1]);
        assert_eq!(convolve_gaussian(&f, 0.0).unwrap(), f);
        let c = ScalarField::constant(spec, 2.5);
        let g = convolve_gaussian(&c, 0.1).unwrap();
        assert!(g.max_abs_diff(&c) < 1e-12);
        assert!(convolve_gaussian(&f, -1.0).is_err());
    }

    #[test]
    fn gaussian_matches_direct_convolution() {
        // Oracle: periodic real-space convolution with a truncated Gaussian of the
        // same width, normalized to unit discrete mass.
        let spec = spec2(32);
        let h = spec.h();
        let width = 0.05;
        let mut spike = ScalarField::zeros(spec);
        spike.values_mut()[spec.index([16, 16, 0])] = 1.0 / spec.cell_volume();
        let spectral = convolve_gaussian(&spike, width).unwrap();
        assert!((spectral.integral() - 1.0).abs() < 1e-10);

        let radius = (6.0 * width / h).ceil() as i64;
        let mut kernel = Vec::new();
        for dy in -radius..=radius {
            for dx in -radius..=radius {
                let r2 = ((dx * dx + dy * dy) as f64) * h * h;
                kernel.push((dx, dy, (-r2 / (2.0 * width * width)).exp()));
            }
        }
        let mass: f64 = kernel.iter().map(|k| k.2).sum();
        let mut direct = ScalarField::zeros(spec);
        for &(dx, dy, w) in &kernel {
            let idx = spec.wrapped_index([16 + dx, 16 + dy, 0]);
            direct.values_mut()[idx] += w / mass / spec.cell_volume();
        }
        let peak = direct.max();
        assert!(spectral.max_abs_diff(&direct) < 1e-3 * peak);
    }

    #[test]
    fn dirichlet_integral_of_mode() {
        let spec = spec2(32);
        let f = ScalarField::from_fn(spec, |p| (2.0 * PI * p[0]).sin());
        // integral of (2 pi cos)^2 over the unit square = 2 pi^2.
        assert!((dirichlet_integral(&f) - 2.0 * PI * PI).abs() < 1e-10);
        let g = spectral_gradient(&f);
        assert!(g[1].max().abs() < 1e-10);
        let expect = ScalarField::from_fn(spec, |p| 2.0 * PI * (2.0 * PI * p[0]).cos());
        assert!(g[0].max_abs_diff(&expect) < 1e-9);
    }

    #[test]
    fn sample_interpolates_and_wraps() {
        let spec = spec2(16);
        let f = ScalarField::from_fn(spec, |p| p[0] + 2.0 * p[1]);
        let v = f.sample([0.3, 0.4, 0.0]);
        assert!((v - 1.1).abs() < 1e-12);
        let spec3 = GridSpec::new(3, 8).unwrap();
        let g = ScalarField::constant(spec3, 3.0);
        assert!((g.sample([0.99, 0.01, 0.5]) - 3.0).abs() < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(16))]

            #[test]
            fn fft_round_trip(values in proptest::collection::vec(-10.0f64..10.0, 16 * 16)) {
                let spec = spec2(16);
                let f = ScalarField::from_values(spec, values).unwrap();
                let back = apply_symbol(&f, &FourierSymbol::constant(spec, 1.0)).unwrap();
                let scale = f.values().iter().fold(1.0f64, |m, v| m.max(v.abs()));
                prop_assert!(back.max_abs_diff(&f) <= 1e-12 * scale * 10.0);
            }

            #[test]
            fn gaussian_preserves_mass(values in proptest::collection::vec(0.0f64..1.0, 8 * 8 * 8),
                                       width in 0.0f64..0.2) {
                let spec = GridSpec::new(3, 8).unwrap();
                let f = ScalarField::from_values(spec, values).unwrap();
                let g = convolve_gaussian(&f, width).unwrap();
                prop_assert!((g.integral() - f.integral()).abs() < 1e-12);
            }

            #[test]
            fn spectral_laplacian_close_to_stencil(a in 0.5f64..2.0, phase in 0.0f64..6.0) {
                let spec = spec2(64);
                let f = ScalarField::from_fn(spec, |p| {
                    (a * (2.0 * PI * p[0] + phase).sin()).exp() * (2.0 * PI * p[1]).cos()
                });
                let lf = laplacian(&f);
                let h = spec.h();
                let mut err: f64 = 0.0;
                for i in 0..spec.len() {
                    let c = spec.coords(i);
                    let c = [c[0] as i64, c[1] as i64, 0];
                    let v = |dx: i64, dy: i64| f.values()[spec.wrapped_index([c[0] + dx, c[1] + dy, 0])];
                    let st = (v(1, 0) + v(-1, 0) + v(0, 1) + v(0, -1) - 4.0 * v(0, 0)) / (h * h);
                    err = err.max((st - lf.values()[i]).abs());
                }
                let fmax = f.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
                // Stencil truncation error is O(h^2) times fourth derivatives, here well
                // below (2 pi)^4 (1 + a)^4 h^2 ||f||.
                let bound = (2.0 * PI).powi(4) * (1.0 + a).powi(4) * h * h * fmax;
                prop_assert!(err < bound);
            }
        }
    }
}
