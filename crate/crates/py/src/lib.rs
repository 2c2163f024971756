//! Python bindings: guard sets, the per-point oracle, batched queries,
//! regions, rasters and lower-bound instances.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use theta_region::arcgen::{generate_candidate_arcs, TangentBackend};
use theta_region::lowerbound::{self, LowerBoundInstance, VerifyMethod};
use theta_region::oracle::max_empty_cone;
use theta_region::{
    batch_unguarded, compute_region, convex_hull, is_theta_guarded, rasterize, BBox,
    ClassifyBackend, ConeWitness, Error, GuardSet, Point, Raster, Region, RegionOptions,
};

create_exception!(
    theta_region,
    DegeneracyError,
    PyException,
    "Numerically degenerate input."
);
create_exception!(
    theta_region,
    VerificationError,
    PyException,
    "A verification check failed."
);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Degeneracy { .. }
        | Error::ProbeDisagreement { .. }
        | Error::DegenerateChord(_)
        | Error::CoincidentPoints(_) => DegeneracyError::new_err(e.to_string()),
        Error::Verification(m) => VerificationError::new_err(m),
        _ => PyValueError::new_err(e.to_string()),
    }
}

type Xy = (f64, f64);

fn pt(p: Xy) -> Point {
    Point::new(p.0, p.1)
}

fn xy(p: Point) -> Xy {
    (p.x, p.y)
}

fn bbox(b: (f64, f64, f64, f64)) -> PyResult<BBox> {
    if !(b.0 < b.2 && b.1 < b.3) {
        return Err(PyValueError::new_err(
            "bbox must be (xmin, ymin, xmax, ymax) with min < max",
        ));
    }
    Ok(BBox::new(Point::new(b.0, b.1), Point::new(b.2, b.3)))
}

/// An empty open cone: apex, clockwise start direction, extent and the
/// guards on its bounding rays.
#[pyclass(frozen, skip_from_py_object, name = "Cone", module = "theta_region")]
#[derive(Clone)]
struct PyCone(ConeWitness);

#[pymethods]
impl PyCone {
    #[getter]
    fn apex(&self) -> Xy {
        xy(self.0.apex)
    }
    #[getter]
    fn start(&self) -> f64 {
        self.0.start
    }
    #[getter]
    fn extent(&self) -> f64 {
        self.0.extent
    }
    #[getter]
    fn g_min(&self) -> Option<Xy> {
        self.0.g_min.map(xy)
    }
    #[getter]
    fn g_max(&self) -> Option<Xy> {
        self.0.g_max.map(xy)
    }
    fn __repr__(&self) -> String {
        format!(
            "Cone(apex=({}, {}), start={}, extent={})",
            self.0.apex.x, self.0.apex.y, self.0.start, self.0.extent
        )
    }
}

#[pyclass(frozen, name = "GuardSet", module = "theta_region")]
struct PyGuardSet(GuardSet);

#[pymethods]
impl PyGuardSet {
    #[new]
    fn new(points: Vec<Xy>) -> PyResult<Self> {
        GuardSet::new(points.into_iter().map(pt))
            .map(PyGuardSet)
            .map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    #[getter]
    fn guards(&self) -> Vec<Xy> {
        self.0.guards().iter().map(|&p| xy(p)).collect()
    }

    /// Largest empty cone angle at `p`.
    fn f(&self, p: Xy) -> f64 {
        max_empty_cone(pt(p), &self.0).extent
    }

    fn max_empty_cone(&self, p: Xy) -> PyCone {
        PyCone(max_empty_cone(pt(p), &self.0))
    }

    fn is_guarded(&self, p: Xy, theta: f64) -> bool {
        is_theta_guarded(pt(p), &self.0, theta)
    }

    /// Indices of the unguarded points with one witness cone each, Θ ∈ (0, π).
    fn batch_unguarded(
        &self,
        py: Python<'_>,
        points: Vec<Xy>,
        theta: f64,
    ) -> PyResult<Vec<(usize, PyCone)>> {
        let pts: Vec<Point> = points.into_iter().map(pt).collect();
        let out = py
            .detach(|| batch_unguarded(&pts, &self.0, theta))
            .map_err(to_py)?;
        Ok(out.into_iter().map(|(i, w)| (i, PyCone(w))).collect())
    }

    #[pyo3(signature = (theta, bbox, cols, rows=None))]
    fn rasterize(
        &self,
        py: Python<'_>,
        theta: f64,
        bbox: (f64, f64, f64, f64),
        cols: usize,
        rows: Option<usize>,
    ) -> PyResult<PyRaster> {
        let b = self::bbox(bbox)?;
        py.detach(|| rasterize(&self.0, theta, b, cols, rows.unwrap_or(cols)))
            .map(PyRaster)
            .map_err(to_py)
    }

    fn convex_hull(&self) -> PyResult<Vec<Xy>> {
        Ok(convex_hull(self.0.guards())
            .map_err(to_py)?
            .vertices
            .into_iter()
            .map(xy)
            .collect())
    }

    /// Number of candidate boundary arcs for Θ ∈ (0, π).
    #[pyo3(signature = (theta, tangent="naive"))]
    fn candidate_arc_count(&self, py: Python<'_>, theta: f64, tangent: &str) -> PyResult<usize> {
        let backend = tangent_backend(tangent)?;
        py.detach(|| generate_candidate_arcs(&self.0, theta, backend))
            .map(|s| s.len())
            .map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("GuardSet(n={})", self.0.len())
    }
}

fn tangent_backend(s: &str) -> PyResult<TangentBackend> {
    match s {
        "naive" => Ok(TangentBackend::Naive),
        "partition-tree" => Ok(TangentBackend::PartitionTree),
        _ => Err(PyValueError::new_err(format!(
            "unknown tangent backend {s:?} (naive | partition-tree)"
        ))),
    }
}

#[pyclass(frozen, name = "Raster", module = "theta_region")]
struct PyRaster(Raster);

#[pymethods]
impl PyRaster {
    #[getter]
    fn cols(&self) -> usize {
        self.0.cols
    }
    #[getter]
    fn rows(&self) -> usize {
        self.0.rows
    }
    /// f at cell centres, row-major from the bottom row.
    #[getter]
    fn f(&self) -> Vec<f64> {
        self.0.f.clone()
    }
    #[getter]
    fn guarded(&self) -> Vec<bool> {
        self.0.guarded.clone()
    }
    fn guarded_count(&self) -> usize {
        self.0.guarded_count()
    }
    /// 4-connected components of guarded cells.
    fn guarded_components(&self) -> usize {
        self.0.guarded_components()
    }
    fn to_pgm(&self) -> String {
        self.0.to_pgm()
    }
    fn to_svg(&self) -> String {
        self.0.to_svg()
    }
}

#[pyclass(frozen, name = "Region", module = "theta_region")]
struct PyRegion(Region);

#[pymethods]
impl PyRegion {
    #[getter]
    fn theta(&self) -> f64 {
        self.0.theta
    }
    #[getter]
    fn whole_plane(&self) -> bool {
        self.0.whole_plane
    }
    fn __len__(&self) -> usize {
        self.0.components.len()
    }
    fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    fn contains(&self, p: Xy) -> bool {
        self.0.contains(pt(p))
    }
    fn component_of(&self, p: Xy) -> Option<usize> {
        self.0.component_of(pt(p))
    }
    fn area(&self) -> f64 {
        self.0.area()
    }
    fn complexity(&self) -> usize {
        self.0.complexity()
    }
    fn arc_count(&self) -> usize {
        self.0.arc_count()
    }
    fn boundary_distance(&self, p: Xy) -> f64 {
        self.0.boundary_distance(pt(p))
    }
    fn to_json(&self) -> String {
        self.0.to_json()
    }
    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Region::from_json(s)
            .map(PyRegion)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }
    #[pyo3(signature = (guards=None))]
    fn to_svg(&self, guards: Option<&PyGuardSet>) -> String {
        self.0
            .to_svg(guards.map(|g| g.0.guards()).unwrap_or(&[]), &[])
    }
    fn __repr__(&self) -> String {
        format!(
            "Region(theta={}, components={}, complexity={})",
            self.0.theta,
            self.0.components.len(),
            self.0.complexity()
        )
    }
}

/// The Θ-region for Θ ∈ (0, 2π].
#[pyfunction(name = "compute_region")]
#[pyo3(signature = (guards, theta, window=None, tangent="naive", classify="batch"))]
fn py_compute_region(
    py: Python<'_>,
    guards: &PyGuardSet,
    theta: f64,
    window: Option<(f64, f64, f64, f64)>,
    tangent: &str,
    classify: &str,
) -> PyResult<PyRegion> {
    let opts = RegionOptions {
        tangent: tangent_backend(tangent)?,
        classify: match classify {
            "batch" => ClassifyBackend::Batch,
            "oracle" => ClassifyBackend::Oracle,
            _ => {
                return Err(PyValueError::new_err(format!(
                    "unknown classify backend {classify:?} (batch | oracle)"
                )))
            }
        },
        window: window.map(bbox).transpose()?,
    };
    py.detach(|| compute_region(&guards.0, theta, &opts))
        .map(PyRegion)
        .map_err(to_py)
}

#[pyclass(frozen, name = "LowerBoundInstance", module = "theta_region")]
struct PyLowerBound(LowerBoundInstance);

#[pymethods]
impl PyLowerBound {
    #[new]
    fn new(py: Python<'_>, i: usize) -> PyResult<Self> {
        py.detach(|| lowerbound::generate(i))
            .map(PyLowerBound)
            .map_err(to_py)
    }
    #[getter]
    fn i(&self) -> usize {
        self.0.i
    }
    #[getter]
    fn theta(&self) -> f64 {
        self.0.theta
    }
    #[getter]
    fn guards(&self) -> Vec<Xy> {
        self.0.guards.iter().map(|&p| xy(p)).collect()
    }
    #[getter]
    fn blockers(&self) -> Vec<Xy> {
        self.0.blockers.iter().map(|&p| xy(p)).collect()
    }
    #[getter]
    fn expected_components(&self) -> usize {
        self.0.expected_components
    }
    /// Half-width of B_x.
    #[getter]
    fn b_x(&self) -> f64 {
        self.0.boxes.b_x
    }
    fn guard_set(&self) -> PyResult<PyGuardSet> {
        self.0.guard_set().map(PyGuardSet).map_err(to_py)
    }
    /// Component count inside B_i by "raster", "arrangement" or "both".
    #[pyo3(signature = (method="raster"))]
    fn verify(&self, py: Python<'_>, method: &str) -> PyResult<usize> {
        let inst = &self.0;
        let run = |m| {
            py.detach(|| lowerbound::verify_fragmentation(inst, m))
                .map_err(to_py)
        };
        match method {
            "raster" => run(VerifyMethod::Raster),
            "arrangement" => run(VerifyMethod::Arrangement),
            "both" => py
                .detach(|| lowerbound::verify_fragmentation_both(inst))
                .map_err(to_py),
            _ => Err(PyValueError::new_err(format!(
                "unknown method {method:?} (raster | arrangement | both)"
            ))),
        }
    }
    fn to_json(&self) -> String {
        self.0.to_json()
    }
    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        LowerBoundInstance::from_json(s)
            .map(PyLowerBound)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }
}

#[pymodule]
#[pyo3(name = "theta_region")]
fn theta_region_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGuardSet>()?;
    m.add_class::<PyCone>()?;
    m.add_class::<PyRaster>()?;
    m.add_class::<PyRegion>()?;
    m.add_class::<PyLowerBound>()?;
    m.add_function(wrap_pyfunction!(py_compute_region, m)?)?;
    m.add("DegeneracyError", m.py().get_type::<DegeneracyError>())?;
    m.add("VerificationError", m.py().get_type::<VerificationError>())?;
    Ok(())
}
