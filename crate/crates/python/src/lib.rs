//! Python bindings: grids and fields, fast marching, geodesics, isosurfaces,
//! config files and the alternating solver.

use std::path::PathBuf;

use phasegeo::config::RunConfig;
use phasegeo::eikonal::{self, DistanceMap, SourceSet, WeightField};
use phasegeo::grid::{self, GridSpec, Point, ScalarField};
use phasegeo::mesh::{self, Mesh};
use phasegeo::path::{self, ClosedCurve};
use phasegeo::{io, solver, Error};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    if e.is_config_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn point(p: Vec<f64>) -> PyResult<Point> {
    match p.len() {
        2 => Ok([p[0], p[1], 0.0]),
        3 => Ok([p[0], p[1], p[2]]),
        k => Err(PyValueError::new_err(format!("points have 2 or 3 coordinates, got {k}"))),
    }
}

fn points(ps: Vec<Vec<f64>>) -> PyResult<Vec<Point>> {
    ps.into_iter().map(point).collect()
}

#[pyclass(name = "Grid", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyGrid(GridSpec);

#[pymethods]
impl PyGrid {
    #[new]
    fn new(dim: usize, n: usize) -> PyResult<Self> {
        GridSpec::new(dim, n).map(PyGrid).map_err(py_err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn h(&self) -> f64 {
        self.0.h()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// Coordinates of every node, in storage order.
    fn nodes(&self) -> Vec<Vec<f64>> {
        let d = self.0.dim();
        (0..self.0.len()).map(|i| self.0.node_point(i)[..d].to_vec()).collect()
    }

    fn __repr__(&self) -> String {
        format!("Grid(dim={}, n={})", self.0.dim(), self.0.n())
    }
}

/// Periodic scalar field on a grid, stored with the first axis fastest.
#[pyclass(name = "Field", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyField(ScalarField);

#[pymethods]
impl PyField {
    #[new]
    fn new(grid: &PyGrid, values: Vec<f64>) -> PyResult<Self> {
        ScalarField::from_values(grid.0, values).map(PyField).map_err(py_err)
    }

    #[staticmethod]
    fn constant(grid: &PyGrid, value: f64) -> Self {
        PyField(ScalarField::constant(grid.0, value))
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        io::read_field(&path).map(PyField).map_err(py_err)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        io::write_field(&path, &self.0).map_err(py_err)
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(self.0.spec())
    }

    fn values(&self) -> Vec<f64> {
        self.0.values().to_vec()
    }

    fn min(&self) -> f64 {
        self.0.min()
    }

    fn max(&self) -> f64 {
        self.0.max()
    }

    fn integral(&self) -> f64 {
        self.0.integral()
    }

    /// Trilinear periodic interpolation.
    fn sample(&self, p: Vec<f64>) -> PyResult<f64> {
        Ok(self.0.sample(point(p)?))
    }

    fn laplacian(&self) -> Self {
        PyField(grid::laplacian(&self.0))
    }

    fn smooth(&self, width: f64) -> PyResult<Self> {
        grid::convolve_gaussian(&self.0, width).map(PyField).map_err(py_err)
    }

    fn dirichlet(&self) -> f64 {
        grid::dirichlet_integral(&self.0)
    }

    /// Level set as a mesh: triangles in 3D, segments in 2D.
    fn isosurface(&self, level: f64) -> PyResult<PyMesh> {
        mesh::extract_isosurface(&self.0, level).map(PyMesh).map_err(py_err)
    }

    fn __len__(&self) -> usize {
        self.0.values().len()
    }
}

#[pyclass(name = "Mesh", frozen)]
struct PyMesh(Mesh);

#[pymethods]
impl PyMesh {
    fn vertices(&self) -> Vec<Vec<f64>> {
        self.0.vertices.iter().map(|v| v.to_vec()).collect()
    }

    fn triangles(&self) -> Vec<[usize; 3]> {
        self.0.triangles.clone()
    }

    fn segments(&self) -> Vec<[usize; 2]> {
        self.0.segments.clone()
    }

    /// Total area (3D) or length (2D).
    fn measure(&self) -> f64 {
        self.0.measure()
    }

    /// Measure of each connected component, largest first.
    fn components(&self) -> Vec<f64> {
        self.0.components()
    }

    fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn save_obj(&self, path: PathBuf) -> PyResult<()> {
        io::write_obj(&path, &self.0).map(|_| ()).map_err(py_err)
    }
}

#[pyclass(name = "DistanceMap", frozen)]
struct PyDistance(DistanceMap);

#[pymethods]
impl PyDistance {
    fn value_at(&self, p: Vec<f64>) -> PyResult<f64> {
        Ok(self.0.value_at(point(p)?))
    }

    fn gradient_at(&self, p: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.0.gradient_at(point(p)?)[..self.0.spec().dim()].to_vec())
    }

    fn field(&self) -> PyField {
        PyField(self.0.to_field())
    }

    /// Descend from `start` to the source; returns the polyline points.
    #[pyo3(signature = (start, step=None))]
    fn backtrack(&self, start: Vec<f64>, step: Option<f64>) -> PyResult<Vec<Vec<f64>>> {
        let step = step.unwrap_or(0.5 * self.0.spec().h());
        let line = path::backtrack_point(&self.0, point(start)?, step).map_err(py_err)?;
        Ok(line.points.iter().map(|p| p.to_vec()).collect())
    }

    /// Flow a closed curve to the source; returns the swept area.
    #[pyo3(signature = (curve, step=None))]
    fn sweep_area(&self, curve: Vec<Vec<f64>>, step: Option<f64>) -> PyResult<f64> {
        let step = step.unwrap_or(0.5 * self.0.spec().h());
        let c = ClosedCurve::new(points(curve)?).map_err(py_err)?;
        let s = path::sweep_curve(&self.0, &c, step).map_err(py_err)?;
        Ok(phasegeo::measure::surface_area(&s))
    }
}

/// Weighted distance to a point, or to a closed curve given as a list of points.
#[pyfunction]
#[pyo3(signature = (weight, source, floor=None))]
fn fast_march(weight: &PyField, source: Vec<Vec<f64>>, floor: Option<f64>) -> PyResult<PyDistance> {
    let w = match floor {
        Some(f) => WeightField::with_floor(weight.0.clone(), f),
        None => WeightField::new(weight.0.clone()),
    }
    .map_err(py_err)?;
    let src = match source.len() {
        1 => SourceSet::point(point(source[0].clone())?),
        _ => SourceSet::closed_curve(points(source)?),
    };
    eikonal::fast_march(&w, &src).map(PyDistance).map_err(py_err)
}

#[pyclass(name = "Config")]
struct PyConfig(RunConfig);

#[pymethods]
impl PyConfig {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        RunConfig::parse(text).map(PyConfig).map_err(py_err)
    }

    #[staticmethod]
    fn read(path: PathBuf) -> PyResult<Self> {
        RunConfig::read(&path).map(PyConfig).map_err(py_err)
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    #[getter]
    fn get_n(&self) -> usize {
        self.0.n
    }

    #[setter]
    fn set_n(&mut self, n: usize) {
        self.0.n = n;
    }

    #[getter]
    fn get_max_iters(&self) -> usize {
        self.0.max_iters
    }

    #[setter]
    fn set_max_iters(&mut self, iters: usize) {
        self.0.max_iters = iters;
    }

    /// Run the alternating solver to convergence or the iteration cap.
    fn solve(&self, py: Python<'_>) -> PyResult<PySolution> {
        let cfg = self.0.build().map_err(py_err)?;
        let state = py.detach(|| solver::solve(&cfg)).map_err(py_err)?;
        let extent = if cfg.dim == 3 {
            let rims = solver::spanning_rims(&cfg, &state.geodesics);
            mesh::extract_isosurface(&state.u, cfg.params.level).map_err(py_err)?.spanning_area(&rims)
        } else {
            let h = 1.0 / cfg.n as f64;
            solver::network_length(&solver::paths(&state), 2.0 * h, 0.25 * h)
        };
        Ok(PySolution {
            u: state.u.clone(),
            energy: state.history.iter().map(|r| r.total).collect(),
            converged: state.converged,
            extent,
        })
    }
}

#[pyclass(name = "Solution", frozen)]
struct PySolution {
    u: ScalarField,
    #[pyo3(get)]
    energy: Vec<f64>,
    #[pyo3(get)]
    converged: bool,
    /// Network length in 2D, spanning area in 3D.
    #[pyo3(get)]
    extent: f64,
}

#[pymethods]
impl PySolution {
    #[getter]
    fn u(&self) -> PyField {
        PyField(self.u.clone())
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.energy.len()
    }
}

#[pymodule]
fn phasegeo_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyField>()?;
    m.add_class::<PyMesh>()?;
    m.add_class::<PyDistance>()?;
    m.add_class::<PyConfig>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(fast_march, m)?)?;
    Ok(())
}
