//! Text configuration files.
//!
//! The format is line based: `key = value`, `#` comments, and section headers.
//! Top-level keys (before any header, or under `[problem]`) describe the run:
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `name` | run name | `run` |
//! | `model` | `at` or `wch` | required |
//! | `dim` | 2 or 3 | required |
//! | `n` | grid points per axis | required |
//! | `max_iters` | iteration cap | 3000 |
//! | `geodesic_every` | recomputation cadence | 10 |
//! | `seed_u` | `zeros`, `ones`, `profile:<file.pfld>` or `objects:<id>,<id>,...` | model default |
//! | `snapshot_every` | PFLD snapshot cadence (0 = off) | 0 |
//! | `convergence_tol`, `convergence_window` | flatness stop rule | `1e-6`, 50 |
//! | `m_theta` | angular samples of reduced geodesics | 256 |
//!
//! `[params]` overrides model parameters: `eps`, `dt`, `sigma`, `lambda`, `delta`,
//! `alpha`, `beta`, `kernel_width`, `level`. Unset values follow `eps`
//! (see [`ModelParams::for_eps`]), and `eps` itself defaults from `n`.
//!
//! `[object <id>]` declares a boundary object with `type =`
//! - `point`: `at = x, y[, z]`
//! - `circle`: `center = x, y, z`, `radius`, optional `normal` (default `0, 0, 1`), `samples`
//! - `graph`: a curve on the vertical cylinder `center`, `radius` with heights
//!   `heights = h0, h1, ...` (periodic, linearly interpolated), `samples`
//! - `square`: axis-aligned square `center`, `side`, `axis = x|y|z` (normal), `samples`
//! - `csv`: `path` to an `x,y[,z]` file of closed-curve samples
//!
//! `[pair]` (repeatable) connects `from` and `to` object ids, with `mode = sweep|reduced`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::flow::ModelParams;
use crate::grid::Point;
use crate::path::{ClosedCurve, DEFAULT_SAMPLES};
use crate::potential::PotentialKind;
use crate::solver::{BoundaryObject, GeodesicMode, Pair, ProblemConfig, SeedU};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn name(self) -> &'static str {
        ["x", "y", "z"][self as usize]
    }
}

/// Symbolic description of a boundary object.
#[derive(Debug, Clone, PartialEq)]
pub enum ObjectSpec {
    Point(Point),
    Circle {
        center: Point,
        radius: f64,
        normal: Point,
        samples: usize,
    },
    Graph {
        center: Point,
        radius: f64,
        heights: Vec<f64>,
        samples: usize,
    },
    Square {
        center: Point,
        side: f64,
        axis: Axis,
        samples: usize,
    },
    Csv(PathBuf),
}

impl ObjectSpec {
    pub fn horizontal_circle(center: Point, radius: f64) -> Self {
        ObjectSpec::Circle {
            center,
            radius,
            normal: [0.0, 0.0, 1.0],
            samples: DEFAULT_SAMPLES,
        }
    }

    pub fn build(&self, id: usize) -> Result<BoundaryObject> {
        let curve = match self {
            ObjectSpec::Point(p) => return Ok(BoundaryObject::point(id, *p)),
            ObjectSpec::Circle {
                center,
                radius,
                normal,
                samples,
            } => ClosedCurve::circle(*center, *radius, *normal, *samples)?,
            ObjectSpec::Graph {
                center,
                radius,
                heights,
                samples,
            } => graph_curve(*center, *radius, heights, *samples)?,
            ObjectSpec::Square {
                center,
                side,
                axis,
                samples,
            } => square_curve(*center, *side, *axis, *samples)?,
            ObjectSpec::Csv(path) => ClosedCurve::new(crate::io::read_points_csv(path)?)?,
        };
        Ok(BoundaryObject::curve(id, curve))
    }
}

/// Lipschitz graph `theta -> center + (r cos, r sin, height(theta))`.
pub fn graph_curve(center: Point, radius: f64, heights: &[f64], samples: usize) -> Result<ClosedCurve> {
    if heights.is_empty() {
        return Err(Error::param("heights", "need at least one height"));
    }
    let m = heights.len();
    let pts = (0..samples)
        .map(|k| {
            let t = k as f64 / samples as f64;
            let s = t * m as f64;
            let j = s.floor() as usize % m;
            let f = s - s.floor();
            let z = (1.0 - f) * heights[j] + f * heights[(j + 1) % m];
            let a = 2.0 * std::f64::consts::PI * t;
            [center[0] + radius * a.cos(), center[1] + radius * a.sin(), center[2] + z]
        })
        .collect();
    ClosedCurve::new(pts)
}

/// Axis-aligned square boundary, uniformly sampled along its perimeter.
pub fn square_curve(center: Point, side: f64, axis: Axis, samples: usize) -> Result<ClosedCurve> {
    if !(side > 0.0) {
        return Err(Error::param("side", format!("must be positive, got {side}")));
    }
    let (u, v) = match axis {
        Axis::X => (1, 2),
        Axis::Y => (2, 0),
        Axis::Z => (0, 1),
    };
    let half = side / 2.0;
    let corners = [[-half, -half], [half, -half], [half, half], [-half, half]];
    let pts = (0..samples)
        .map(|k| {
            let s = 4.0 * k as f64 / samples as f64;
            let e = s.floor() as usize % 4;
            let f = s - s.floor();
            let (a, b) = (corners[e], corners[(e + 1) % 4]);
            let mut p = center;
            p[u] += a[0] + f * (b[0] - a[0]);
            p[v] += a[1] + f * (b[1] - a[1]);
            p
        })
        .collect();
    ClosedCurve::new(pts)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamOverrides {
    pub eps: Option<f64>,
    pub dt: Option<f64>,
    pub sigma: Option<f64>,
    pub lambda: Option<f64>,
    pub delta: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub kernel_width: Option<f64>,
    pub level: Option<f64>,
}

impl ParamOverrides {
    fn fields(&self) -> [(&'static str, Option<f64>); 9] {
        [
            ("eps", self.eps),
            ("dt", self.dt),
            ("sigma", self.sigma),
            ("lambda", self.lambda),
            ("delta", self.delta),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("kernel_width", self.kernel_width),
            ("level", self.level),
        ]
    }

    fn slot(&mut self, key: &str) -> Option<&mut Option<f64>> {
        Some(match key {
            "eps" => &mut self.eps,
            "dt" => &mut self.dt,
            "sigma" => &mut self.sigma,
            "lambda" => &mut self.lambda,
            "delta" => &mut self.delta,
            "alpha" => &mut self.alpha,
            "beta" => &mut self.beta,
            "kernel_width" => &mut self.kernel_width,
            "level" => &mut self.level,
            _ => return None,
        })
    }

    pub fn resolve(&self, n: usize, model: PotentialKind) -> ModelParams {
        let eps = self.eps.unwrap_or_else(|| ModelParams::default_eps(n, model));
        let mut p = ModelParams::for_eps(eps, n, model);
        p.dt = self.dt.unwrap_or(p.dt);
        p.sigma = self.sigma.unwrap_or(p.sigma);
        p.lambda = self.lambda.unwrap_or(p.lambda);
        p.delta = self.delta.unwrap_or(p.delta);
        p.alpha = self.alpha.or(p.alpha);
        p.beta = self.beta.or(p.beta);
        p.kernel_width = self.kernel_width.unwrap_or(p.kernel_width);
        p.level = self.level.unwrap_or(p.level);
        p
    }
}

/// A parsed configuration file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub name: String,
    pub model: PotentialKind,
    pub dim: usize,
    pub n: usize,
    pub max_iters: usize,
    pub geodesic_every: usize,
    pub seed_u: Option<SeedU>,
    pub snapshot_every: usize,
    pub convergence_tol: f64,
    pub convergence_window: usize,
    pub m_theta: usize,
    pub params: ParamOverrides,
    pub objects: Vec<(usize, ObjectSpec)>,
    pub pairs: Vec<Pair>,
}

impl RunConfig {
    pub fn new(name: &str, model: PotentialKind, dim: usize, n: usize) -> Self {
        RunConfig {
            name: name.to_string(),
            model,
            dim,
            n,
            max_iters: 3000,
            geodesic_every: 10,
            seed_u: None,
            snapshot_every: 0,
            convergence_tol: 1e-6,
            convergence_window: 50,
            m_theta: DEFAULT_SAMPLES,
            params: ParamOverrides::default(),
            objects: Vec::new(),
            pairs: Vec::new(),
        }
    }

    pub fn object(mut self, id: usize, spec: ObjectSpec) -> Self {
        self.objects.push((id, spec));
        self
    }

    pub fn pair(mut self, from: usize, to: usize, mode: GeodesicMode) -> Self {
        self.pairs.push(Pair { from, to, mode });
        self
    }

    /// Builds the solver configuration (curves are sampled, parameters resolved).
    pub fn build(&self) -> Result<ProblemConfig> {
        let mut cfg = ProblemConfig::new(&self.name, self.model, self.dim, self.n);
        cfg.params = self.params.resolve(self.n, self.model);
        cfg.max_iters = self.max_iters;
        cfg.geodesic_every = self.geodesic_every;
        if let Some(s) = &self.seed_u {
            cfg.seed_u = s.clone();
        }
        cfg.snapshot_every = self.snapshot_every;
        cfg.convergence_tol = self.convergence_tol;
        cfg.convergence_window = self.convergence_window;
        cfg.m_theta = self.m_theta;
        for (id, o) in &self.objects {
            cfg.objects.push(o.build(*id)?);
        }
        cfg.pairs = self.pairs.clone();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let model = match self.model {
            PotentialKind::AmbrosioTortorelli => "at",
            PotentialKind::WillmoreCahnHilliard => "wch",
        };
        writeln!(s, "name = {}", self.name).unwrap();
        writeln!(s, "model = {model}").unwrap();
        writeln!(s, "dim = {}", self.dim).unwrap();
        writeln!(s, "n = {}", self.n).unwrap();
        writeln!(s, "max_iters = {}", self.max_iters).unwrap();
        writeln!(s, "geodesic_every = {}", self.geodesic_every).unwrap();
        if let Some(seed) = &self.seed_u {
            writeln!(s, "seed_u = {}", seed_text(seed)).unwrap();
        }
        writeln!(s, "snapshot_every = {}", self.snapshot_every).unwrap();
        writeln!(s, "convergence_tol = {:?}", self.convergence_tol).unwrap();
        writeln!(s, "convergence_window = {}", self.convergence_window).unwrap();
        writeln!(s, "m_theta = {}", self.m_theta).unwrap();
        let set: Vec<_> = self.params.fields().into_iter().filter_map(|(k, v)| v.map(|v| (k, v))).collect();
        if !set.is_empty() {
            s.push_str("\n[params]\n");
            for (k, v) in set {
                writeln!(s, "{k} = {v:?}").unwrap();
            }
        }
        for (id, o) in &self.objects {
            writeln!(s, "\n[object {id}]").unwrap();
            match o {
                ObjectSpec::Point(p) => {
                    writeln!(s, "type = point").unwrap();
                    writeln!(s, "at = {}", list(&p[..self.dim.max(2)])).unwrap();
                }
                ObjectSpec::Circle {
                    center,
                    radius,
                    normal,
                    samples,
                } => {
                    writeln!(s, "type = circle\ncenter = {}\nradius = {radius:?}", list(center)).unwrap();
                    writeln!(s, "normal = {}\nsamples = {samples}", list(normal)).unwrap();
                }
                ObjectSpec::Graph {
                    center,
                    radius,
                    heights,
                    samples,
                } => {
                    writeln!(s, "type = graph\ncenter = {}\nradius = {radius:?}", list(center)).unwrap();
                    writeln!(s, "heights = {}\nsamples = {samples}", list(heights)).unwrap();
                }
                ObjectSpec::Square {
                    center,
                    side,
                    axis,
                    samples,
                } => {
                    writeln!(s, "type = square\ncenter = {}\nside = {side:?}", list(center)).unwrap();
                    writeln!(s, "axis = {}\nsamples = {samples}", axis.name()).unwrap();
                }
                ObjectSpec::Csv(path) => {
                    writeln!(s, "type = csv\npath = {}", path.display()).unwrap();
                }
            }
        }
        for p in &self.pairs {
            let mode = match p.mode {
                GeodesicMode::GeneralSweep => "sweep",
                GeodesicMode::CircularReduced => "reduced",
            };
            writeln!(s, "\n[pair]\nfrom = {}\nto = {}\nmode = {mode}", p.from, p.to).unwrap();
        }
        s
    }

    pub fn parse(text: &str) -> Result<RunConfig> {
        Parser::default().run(text, None)
    }

    /// Reads a file; relative `csv` and `profile:` paths resolve against its directory.
    pub fn read(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        Parser::default().run(&text, path.parent())
    }
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
}

fn seed_text(seed: &SeedU) -> String {
    match seed {
        SeedU::Zeros => "zeros".into(),
        SeedU::Ones => "ones".into(),
        SeedU::Profile(p) => format!("profile:{}", p.display()),
        SeedU::Objects(ids) => {
            let ids: Vec<String> = ids.iter().map(|i| i.to_string()).collect();
            format!("objects:{}", ids.join(","))
        }
    }
}

/// Parses a `seed_u` value; `base` resolves relative profile paths.
pub fn parse_seed(v: &str, base: Option<&Path>) -> std::result::Result<SeedU, String> {
    match v {
        "zeros" => Ok(SeedU::Zeros),
        "ones" => Ok(SeedU::Ones),
        _ => {
            if let Some(p) = v.strip_prefix("profile:") {
                Ok(SeedU::Profile(resolve(base, p.trim())))
            } else if let Some(ids) = v.strip_prefix("objects:") {
                ids.split(',')
                    .map(|t| t.trim().parse::<usize>().map_err(|e| format!("bad object id `{t}`: {e}")))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map(SeedU::Objects)
            } else {
                Err(format!("unknown seed `{v}` (zeros, ones, profile:<file>, objects:<ids>)"))
            }
        }
    }
}

fn resolve(base: Option<&Path>, p: &str) -> PathBuf {
    let path = PathBuf::from(p);
    match base {
        Some(b) if path.is_relative() && !b.as_os_str().is_empty() => b.join(path),
        _ => path,
    }
}

enum Section {
    Problem,
    Params,
    Object { id: usize },
    Pair { line: usize },
}

#[derive(Default)]
struct Fields {
    entries: Vec<(String, String, usize)>,
}

impl Fields {
    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        let i = self.entries.iter().position(|(k, _, _)| k == key)?;
        let (_, v, l) = self.entries.remove(i);
        Some((v, l))
    }

    fn finish(self) -> Result<()> {
        match self.entries.into_iter().next() {
            Some((k, _, line)) => Err(Error::Config {
                line,
                reason: format!("unknown key `{k}`"),
            }),
            None => Ok(()),
        }
    }
}

fn err(line: usize, reason: impl Into<String>) -> Error {
    Error::Config {
        line,
        reason: reason.into(),
    }
}

fn num<T: std::str::FromStr>(v: &str, line: usize, key: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| err(line, format!("`{key}`: {e}")))
}

fn floats(v: &str, line: usize, key: &str) -> Result<Vec<f64>> {
    v.split(',').map(|t| num::<f64>(t.trim(), line, key)).collect()
}

fn point(v: &str, line: usize, key: &str) -> Result<Point> {
    let f = floats(v, line, key)?;
    match f.len() {
        2 => Ok([f[0], f[1], 0.0]),
        3 => Ok([f[0], f[1], f[2]]),
        k => Err(err(line, format!("`{key}` needs 2 or 3 numbers, got {k}"))),
    }
}

#[derive(Default)]
struct Parser {
    problem: Fields,
    params: Fields,
    objects: Vec<(usize, usize, Fields)>,
    pairs: Vec<(usize, Fields)>,
}

impl Parser {
    fn run(mut self, text: &str, base: Option<&Path>) -> Result<RunConfig> {
        let mut section = Section::Problem;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let body = raw.split('#').next().unwrap().trim();
            if body.is_empty() {
                continue;
            }
            if let Some(head) = body.strip_prefix('[') {
                let head = head
                    .strip_suffix(']')
                    .ok_or_else(|| err(line, "unterminated section header"))?
                    .trim();
                let mut words = head.split_whitespace();
                section = match (words.next(), words.next(), words.next()) {
                    (Some("problem"), None, _) => Section::Problem,
                    (Some("params"), None, _) => Section::Params,
                    (Some("pair"), None, _) => {
                        self.pairs.push((line, Fields::default()));
                        Section::Pair { line }
                    }
                    (Some("object"), Some(id), None) => {
                        let id = num::<usize>(id, line, "object id")?;
                        if self.objects.iter().any(|(i, _, _)| *i == id) {
                            return Err(err(line, format!("object {id} declared twice")));
                        }
                        self.objects.push((id, line, Fields::default()));
                        Section::Object { id }
                    }
                    _ => return Err(err(line, format!("unknown section `[{head}]`"))),
                };
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| err(line, format!("expected `key = value`, got `{body}`")))?;
            let (key, value) = (key.trim().to_string(), value.trim().to_string());
            let fields = match &section {
                Section::Problem => &mut self.problem,
                Section::Params => &mut self.params,
                Section::Object { id } => &mut self.objects.iter_mut().find(|(i, _, _)| i == id).unwrap().2,
                Section::Pair { line: at } => &mut self.pairs.iter_mut().find(|(l, _)| l == at).unwrap().1,
            };
            if fields.entries.iter().any(|(k, _, _)| *k == key) {
                return Err(err(line, format!("duplicate key `{key}`")));
            }
            fields.entries.push((key, value, line));
        }
        self.assemble(base)
    }

    fn assemble(mut self, base: Option<&Path>) -> Result<RunConfig> {
        let p = &mut self.problem;
        let required = |p: &mut Fields, key: &str| p.take(key).ok_or_else(|| err(0, format!("missing `{key}`")));
        let (model, ml) = required(p, "model")?;
        let model = match model.as_str() {
            "at" => PotentialKind::AmbrosioTortorelli,
            "wch" => PotentialKind::WillmoreCahnHilliard,
            other => return Err(err(ml, format!("unknown model `{other}` (at, wch)"))),
        };
        let (dim, dl) = required(p, "dim")?;
        let dim = num::<usize>(&dim, dl, "dim")?;
        let (n, nl) = required(p, "n")?;
        let n = num::<usize>(&n, nl, "n")?;
        let name = p.take("name").map(|(v, _)| v).unwrap_or_else(|| "run".into());
        let mut cfg = RunConfig::new(&name, model, dim, n);
        macro_rules! opt {
            ($key:literal, $field:expr, $t:ty) => {
                if let Some((v, l)) = p.take($key) {
                    $field = num::<$t>(&v, l, $key)?;
                }
            };
        }
        opt!("max_iters", cfg.max_iters, usize);
        opt!("geodesic_every", cfg.geodesic_every, usize);
        opt!("snapshot_every", cfg.snapshot_every, usize);
        opt!("convergence_tol", cfg.convergence_tol, f64);
        opt!("convergence_window", cfg.convergence_window, usize);
        opt!("m_theta", cfg.m_theta, usize);
        if let Some((v, l)) = p.take("seed_u") {
            cfg.seed_u = Some(parse_seed(&v, base).map_err(|e| err(l, e))?);
        }
        std::mem::take(p).finish()?;

        let keys: Vec<(String, String, usize)> = std::mem::take(&mut self.params.entries);
        for (k, v, l) in keys {
            let slot = cfg.params.slot(&k).ok_or_else(|| err(l, format!("unknown parameter `{k}`")))?;
            *slot = Some(num::<f64>(&v, l, &k)?);
        }

        for (id, line, mut f) in self.objects {
            let (kind, kl) = f.take("type").ok_or_else(|| err(line, "object needs a `type`"))?;
            let need = |f: &mut Fields, key: &str| f.take(key).ok_or_else(|| err(line, format!("object {id}: missing `{key}`")));
            let samples = |f: &mut Fields| -> Result<usize> {
                match f.take("samples") {
                    Some((v, l)) => num::<usize>(&v, l, "samples"),
                    None => Ok(DEFAULT_SAMPLES),
                }
            };
            let spec = match kind.as_str() {
                "point" => {
                    let (v, l) = need(&mut f, "at")?;
                    ObjectSpec::Point(point(&v, l, "at")?)
                }
                "circle" => {
                    let (c, cl) = need(&mut f, "center")?;
                    let (r, rl) = need(&mut f, "radius")?;
                    let normal = match f.take("normal") {
                        Some((v, l)) => point(&v, l, "normal")?,
                        None => [0.0, 0.0, 1.0],
                    };
                    ObjectSpec::Circle {
                        center: point(&c, cl, "center")?,
                        radius: num(&r, rl, "radius")?,
                        normal,
                        samples: samples(&mut f)?,
                    }
                }
                "graph" => {
                    let (c, cl) = need(&mut f, "center")?;
                    let (r, rl) = need(&mut f, "radius")?;
                    let (hs, hl) = need(&mut f, "heights")?;
                    ObjectSpec::Graph {
                        center: point(&c, cl, "center")?,
                        radius: num(&r, rl, "radius")?,
                        heights: floats(&hs, hl, "heights")?,
                        samples: samples(&mut f)?,
                    }
                }
                "square" => {
                    let (c, cl) = need(&mut f, "center")?;
                    let (sd, sl) = need(&mut f, "side")?;
                    let axis = match f.take("axis") {
                        None => Axis::Z,
                        Some((v, l)) => match v.as_str() {
                            "x" => Axis::X,
                            "y" => Axis::Y,
                            "z" => Axis::Z,
                            other => return Err(err(l, format!("unknown axis `{other}`"))),
                        },
                    };
                    ObjectSpec::Square {
                        center: point(&c, cl, "center")?,
                        side: num(&sd, sl, "side")?,
                        axis,
                        samples: samples(&mut f)?,
                    }
                }
                "csv" => {
                    let (v, _) = need(&mut f, "path")?;
                    ObjectSpec::Csv(resolve(base, &v))
                }
                other => return Err(err(kl, format!("unknown object type `{other}`"))),
            };
            f.finish()?;
            cfg.objects.push((id, spec));
        }

        for (line, mut f) in self.pairs {
            let mut id = |key: &str| -> Result<usize> {
                let (v, l) = f.take(key).ok_or_else(|| err(line, format!("pair: missing `{key}`")))?;
                num::<usize>(&v, l, key)
            };
            let (from, to) = (id("from")?, id("to")?);
            let mode = match f.take("mode") {
                None => GeodesicMode::GeneralSweep,
                Some((v, l)) => match v.as_str() {
                    "sweep" => GeodesicMode::GeneralSweep,
                    "reduced" => GeodesicMode::CircularReduced,
                    other => return Err(err(l, format!("unknown mode `{other}` (sweep, reduced)"))),
                },
            };
            f.finish()?;
            cfg.pairs.push(Pair { from, to, mode });
        }
        Ok(cfg)
    }
}
