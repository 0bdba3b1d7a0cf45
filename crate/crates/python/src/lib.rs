//! Python bindings: convex bodies, Minkowski norms, Crofton densities,
//! metric fields, geodesics and the rigidity checks. Reports come back as
//! plain dictionaries.

use finsler_core::convexbody::blaschke_body as core_blaschke;
use finsler_core::crofton::DensityKind;
use finsler_core::geodesic::{self, GeodesicOptions};
use finsler_core::metricfield::{FieldSpec, Region};
use finsler_core::report::CheckReport;
use finsler_core::{rigidity, FinslerError};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: FinslerError) -> PyErr {
    if e.is_non_convergence() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn vec3(v: &[f64]) -> PyResult<[f64; 3]> {
    match v.len() {
        2 => Ok([v[0], v[1], 0.0]),
        3 => Ok([v[0], v[1], v[2]]),
        n => Err(PyValueError::new_err(format!("expected 2 or 3 components, got {n}"))),
    }
}

fn report_dict<'py>(py: Python<'py>, r: &CheckReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("check", &r.check)?;
    d.set_item("inputs", &r.inputs)?;
    d.set_item("values", r.values.clone())?;
    d.set_item("residuals", r.residuals.clone())?;
    d.set_item("tolerances", r.tolerances.clone())?;
    d.set_item("verdict", r.verdict.to_string())?;
    d.set_item("notes", r.notes.clone())?;
    Ok(d)
}

#[pyclass(name = "ConvexBody", module = "finsler", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyConvexBody {
    inner: finsler_core::ConvexBody,
}

#[pymethods]
impl PyConvexBody {
    #[staticmethod]
    fn from_vertices(dim: usize, vertices: Vec<Vec<f64>>) -> PyResult<Self> {
        let inner = finsler_core::ConvexBody::from_vertices(dim, &vertices).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (dim, center=None, radius=1.0))]
    fn ball(dim: usize, center: Option<Vec<f64>>, radius: f64) -> PyResult<Self> {
        let c = center.unwrap_or_else(|| vec![0.0; dim]);
        let inner = finsler_core::ConvexBody::ball(dim, &c, radius).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn ellipsoid(center: Vec<f64>, axes: Vec<f64>) -> PyResult<Self> {
        let inner = finsler_core::ConvexBody::ellipsoid(axes.len(), &center, &axes).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = finsler_core::ConvexBody::from_json(text).map_err(err)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn support(&self, u: Vec<f64>) -> PyResult<f64> {
        if u.len() != self.inner.dim() {
            return Err(PyValueError::new_err("direction has the wrong dimension"));
        }
        Ok(self.inner.support(&u))
    }

    fn volume(&self) -> PyResult<f64> {
        self.inner.volume().map_err(err)
    }

    fn brightness(&self, u: Vec<f64>) -> PyResult<f64> {
        self.inner.brightness(&u).map_err(err)
    }

    fn polar(&self) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.polar().map_err(err)?,
        })
    }

    fn central_symmetral(&self) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.central_symmetral().map_err(err)?,
        })
    }

    fn minkowski_sum(&self, other: &PyConvexBody) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.minkowski_sum(&other.inner).map_err(err)?,
        })
    }

    fn translate(&self, t: Vec<f64>) -> Self {
        Self {
            inner: self.inner.translate(&t),
        }
    }

    fn scale(&self, c: f64) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.scale(c).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("ConvexBody(dim={})", self.inner.dim())
    }
}

#[pyclass(name = "MinkowskiNorm", module = "finsler", frozen, skip_from_py_object)]
struct PyMinkowskiNorm {
    inner: finsler_core::MinkowskiNorm,
}

#[pymethods]
impl PyMinkowskiNorm {
    #[staticmethod]
    fn euclidean(dim: usize) -> PyResult<Self> {
        Ok(Self {
            inner: finsler_core::MinkowskiNorm::euclidean(dim).map_err(err)?,
        })
    }

    /// `|v| + b·v`, requires `|b| < 1`.
    #[staticmethod]
    fn randers(b: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: finsler_core::MinkowskiNorm::randers(&b).map_err(err)?,
        })
    }

    /// Norm whose unit ball is `body` (origin in the interior).
    #[staticmethod]
    fn from_body(body: &PyConvexBody) -> PyResult<Self> {
        Ok(Self {
            inner: finsler_core::MinkowskiNorm::from_body(&body.inner).map_err(err)?,
        })
    }

    fn __call__(&self, v: Vec<f64>) -> f64 {
        self.inner.eval(&v)
    }

    /// `(F*(ξ), maximizer)`.
    fn dual(&self, xi: Vec<f64>) -> PyResult<(f64, Vec<f64>)> {
        let d = self.inner.dual(&xi).map_err(err)?;
        Ok((d.value, d.argmax))
    }

    fn legendre(&self, v: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.legendre(&v).map_err(err)
    }
}

#[pyclass(name = "CroftonDensity", module = "finsler", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCroftonDensity {
    inner: finsler_core::CroftonDensity,
}

#[pymethods]
impl PyCroftonDensity {
    #[staticmethod]
    fn constant(value: f64) -> PyResult<Self> {
        Ok(Self {
            inner: finsler_core::CroftonDensity::constant(value).map_err(err)?,
        })
    }

    /// The density `m ≡ 1/4` of the round sphere.
    #[staticmethod]
    fn round() -> Self {
        Self {
            inner: finsler_core::CroftonDensity::round(),
        }
    }

    #[staticmethod]
    fn poly(axis: Vec<f64>, coeffs: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: finsler_core::CroftonDensity::poly(&axis, &coeffs).map_err(err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (center, amplitude, width, base=0.25))]
    fn bump(center: Vec<f64>, amplitude: f64, width: f64, base: f64) -> PyResult<Self> {
        let inner = finsler_core::CroftonDensity::new(DensityKind::Bump {
            center,
            amplitude,
            width,
            base,
        })
        .map_err(err)?;
        Ok(Self { inner })
    }

    fn __call__(&self, p: Vec<f64>) -> PyResult<f64> {
        Ok(self.inner.eval(&vec3(&p)?))
    }

    fn total_mass(&self) -> f64 {
        self.inner.total_mass()
    }

    fn normalized_to(&self, target: f64) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.normalized_to(target).map_err(err)?,
        })
    }
}

#[pyclass(name = "MetricField", module = "finsler", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyMetricField {
    inner: finsler_core::MetricField,
}

#[pymethods]
impl PyMetricField {
    #[staticmethod]
    #[pyo3(signature = (radius=1.0))]
    fn round(radius: f64) -> PyResult<Self> {
        Ok(Self {
            inner: finsler_core::MetricField::round(radius).map_err(err)?,
        })
    }

    #[staticmethod]
    fn euclidean(dim: usize) -> PyResult<Self> {
        Ok(Self {
            inner: finsler_core::MetricField::euclidean(dim).map_err(err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (b, sphere=false))]
    fn randers(b: Vec<f64>, sphere: bool) -> PyResult<Self> {
        Ok(Self {
            inner: finsler_core::MetricField::randers(&b, sphere).map_err(err)?,
        })
    }

    #[staticmethod]
    fn busemann(density: &PyCroftonDensity) -> Self {
        Self {
            inner: finsler_core::MetricField::busemann(density.inner.clone()),
        }
    }

    #[staticmethod]
    fn funk(body: &PyConvexBody) -> Self {
        Self {
            inner: finsler_core::MetricField::funk(body.inner.clone()),
        }
    }

    #[staticmethod]
    fn hilbert(body: &PyConvexBody) -> Self {
        Self {
            inner: finsler_core::MetricField::hilbert(body.inner.clone()),
        }
    }

    /// Builds a field from its JSON configuration.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let spec = FieldSpec::from_json(text).map_err(err)?;
        Ok(Self {
            inner: spec.build().map_err(err)?,
        })
    }

    fn __call__(&self, x: Vec<f64>, v: Vec<f64>) -> PyResult<f64> {
        self.inner.evaluate(&x, &v).map_err(err)
    }

    fn ht_density(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.ht_density(&vec3(&x)?).map_err(err)
    }

    /// Holmes–Thompson volume of the whole base (sphere fields).
    #[pyo3(signature = (level=3))]
    fn ht_volume(&self, level: u32) -> PyResult<f64> {
        self.inner.ht_volume(&Region::Whole, level).map_err(err)
    }

    /// Length of `equator`, `latitude:<deg>` or `great_circle:x,y,z`.
    fn curve_length(&self, curve: &str) -> PyResult<f64> {
        let c = finsler_core::Curve::parse(curve).map_err(err)?;
        self.inner.curve_length(&c).map_err(err)
    }

    /// `F + c·dx`.
    fn add_constant_form(&self, c: Vec<f64>) -> PyResult<Self> {
        let form = finsler_core::OneForm::constant(self.inner.manifold_dim(), self.inner.is_sphere(), &c).map_err(err)?;
        Ok(Self {
            inner: self.inner.add_one_form(&form).map_err(err)?,
        })
    }

    /// `F` plus the infinitesimal rotation about `axis`, scaled by `scale`.
    fn add_rotation_form(&self, axis: Vec<f64>, scale: f64) -> PyResult<Self> {
        let form = finsler_core::OneForm::rotation(self.inner.manifold_dim(), self.inner.is_sphere(), &axis, scale)
            .map_err(err)?;
        Ok(Self {
            inner: self.inner.add_one_form(&form).map_err(err)?,
        })
    }

    fn scale(&self, c: f64) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.scale(c).map_err(err)?,
        })
    }

    fn reverse(&self) -> Self {
        Self {
            inner: self.inner.reverse(),
        }
    }

    fn symmetrize(&self) -> Self {
        Self {
            inner: self.inner.symmetrize(),
        }
    }

    #[getter]
    fn is_sphere(&self) -> bool {
        self.inner.is_sphere()
    }

    fn __repr__(&self) -> String {
        format!("MetricField({})", self.inner.describe())
    }
}

/// Unit-speed geodesic as a list of `(t, x, v)` samples.
#[pyfunction]
fn geodesic_trace(field: &PyMetricField, x0: Vec<f64>, v0: Vec<f64>, t: f64) -> PyResult<Vec<(f64, Vec<f64>, Vec<f64>)>> {
    let tr = geodesic::geodesic_trace(&field.inner, &x0, &v0, t, &GeodesicOptions::default()).map_err(err)?;
    let n = field.inner.ambient_dim();
    Ok(tr.samples.iter().map(|s| (s.t, s.x[..n].to_vec(), s.v[..n].to_vec())).collect())
}

#[pyfunction]
fn blaschke_body(body: &PyConvexBody) -> PyResult<PyConvexBody> {
    Ok(PyConvexBody {
        inner: core_blaschke(&body.inner).map_err(err)?,
    })
}

#[pyfunction]
#[pyo3(signature = (field, level=3))]
fn zoll_volume_check<'py>(py: Python<'py>, field: &PyMetricField, level: u32) -> PyResult<Bound<'py, PyDict>> {
    report_dict(py, &rigidity::zoll_volume_check(&field.inner, level).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (field, level=3))]
fn santalo_check<'py>(py: Python<'py>, field: &PyMetricField, level: u32) -> PyResult<Bound<'py, PyDict>> {
    report_dict(py, &geodesic::santalo_check(&field.inner, level).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (field, curve="equator", level=4))]
fn crofton_area_check<'py>(py: Python<'py>, field: &PyMetricField, curve: &str, level: u32) -> PyResult<Bound<'py, PyDict>> {
    let c = finsler_core::Curve::parse(curve).map_err(err)?;
    report_dict(py, &geodesic::crofton_area_check(&field.inner, &c, level).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (field, samples, t=1.0))]
fn reversibility_check<'py>(
    py: Python<'py>,
    field: &PyMetricField,
    samples: Vec<(Vec<f64>, Vec<f64>)>,
    t: f64,
) -> PyResult<Bound<'py, PyDict>> {
    report_dict(py, &geodesic::reversibility_check(&field.inner, &samples, t).map_err(err)?)
}

#[pyfunction]
fn detect_reversible_plus_closed<'py>(py: Python<'py>, field: &PyMetricField) -> PyResult<Bound<'py, PyDict>> {
    let nodes = field.inner.sample_points().map_err(err)?;
    let d = rigidity::detect_reversible_plus_closed(&field.inner, &nodes).map_err(err)?;
    report_dict(py, &d.report)
}

#[pyfunction]
#[pyo3(signature = (body, gauge, level=2))]
fn chakerian_check<'py>(py: Python<'py>, body: &PyConvexBody, gauge: &PyConvexBody, level: u32) -> PyResult<Bound<'py, PyDict>> {
    report_dict(py, &rigidity::chakerian_check(&body.inner, &gauge.inner, level).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (f1, f2, level=3))]
fn ht_density_rigidity_check<'py>(
    py: Python<'py>,
    f1: &PyMetricField,
    f2: &PyMetricField,
    level: u32,
) -> PyResult<Bound<'py, PyDict>> {
    report_dict(py, &rigidity::ht_density_rigidity_check(&f1.inner, &f2.inner, level).map_err(err)?)
}

#[pymodule]
fn finsler(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConvexBody>()?;
    m.add_class::<PyMinkowskiNorm>()?;
    m.add_class::<PyCroftonDensity>()?;
    m.add_class::<PyMetricField>()?;
    m.add_function(wrap_pyfunction!(geodesic_trace, m)?)?;
    m.add_function(wrap_pyfunction!(blaschke_body, m)?)?;
    m.add_function(wrap_pyfunction!(zoll_volume_check, m)?)?;
    m.add_function(wrap_pyfunction!(santalo_check, m)?)?;
    m.add_function(wrap_pyfunction!(crofton_area_check, m)?)?;
    m.add_function(wrap_pyfunction!(reversibility_check, m)?)?;
    m.add_function(wrap_pyfunction!(detect_reversible_plus_closed, m)?)?;
    m.add_function(wrap_pyfunction!(chakerian_check, m)?)?;
    m.add_function(wrap_pyfunction!(ht_density_rigidity_check, m)?)?;
    Ok(())
}
