//! Python bindings: instances, certificates, verification reports and
//! Maharam cylinder measures.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use skewadic::algebra::{invariant_factors as factors, GroupElement, IntegerMatrix};
use skewadic::bratteli::{build_diagram, Diagram};
use skewadic::cocycles::{amplify_for_common_prefix, FloorCocycle};
use skewadic::iet::pf_lengths;
use skewadic::instance::{InstanceSpec, RauzyInstance, PACKAGED};
use skewadic::maharam::{MaharamMeasure, MaharamParameter, MeasureTable};
use skewadic::verify::{run_verification, Injection};

create_exception!(pyskewadic, SkewadicError, PyValueError);

fn err(e: skewadic::Error) -> PyErr {
    SkewadicError::new_err(e.to_string())
}

fn json_to_py(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

#[pyclass(module = "pyskewadic", frozen)]
struct Instance {
    inst: RauzyInstance,
    diagram: Diagram,
    f: Option<FloorCocycle>,
}

impl Instance {
    fn wrap(inst: RauzyInstance) -> PyResult<Self> {
        let diagram = build_diagram(&inst.towers);
        let f = match &inst.phi {
            Some(phi) => Some(FloorCocycle::new(&diagram, phi).map_err(err)?),
            None => None,
        };
        Ok(Self { inst, diagram, f })
    }

    fn floor_cocycle(&self) -> PyResult<&FloorCocycle> {
        self.f
            .as_ref()
            .ok_or_else(|| SkewadicError::new_err("no periodic-type skew-product on this loop"))
    }

    fn measure(&self, psi: Vec<f64>) -> PyResult<MaharamMeasure<'_>> {
        let param = MaharamParameter::new(psi).map_err(err)?;
        MaharamMeasure::new(&self.diagram, self.floor_cocycle()?, param).map_err(err)
    }
}

#[pymethods]
impl Instance {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let spec = InstanceSpec::from_json(text).map_err(err)?;
        Self::wrap(RauzyInstance::from_spec(&spec).map_err(err)?)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Self::wrap(RauzyInstance::load(path.as_ref()).map_err(err)?)
    }

    /// One of the instances shipped with the library.
    #[staticmethod]
    fn packaged(name: &str) -> PyResult<Self> {
        let (_, text) = PACKAGED
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| SkewadicError::new_err(format!("no packaged instance {name:?}")))?;
        Self::from_json(text)
    }

    #[getter]
    fn name(&self) -> String {
        self.inst.name.clone()
    }

    #[getter]
    fn d(&self) -> usize {
        self.inst.d()
    }

    /// Fiber dimension of the cocycle, 0 when there is none.
    #[getter]
    fn m(&self) -> usize {
        self.inst.phi.as_ref().map_or(0, |p| p.m())
    }

    #[getter]
    fn repetitions(&self) -> u32 {
        self.inst.repetitions
    }

    #[getter]
    fn steps(&self) -> String {
        self.inst.lp.steps_string()
    }

    #[getter]
    fn matrix(&self) -> PyResult<Vec<Vec<i64>>> {
        self.inst
            .lp
            .matrix()
            .to_i64_rows()
            .ok_or_else(|| err(skewadic::Error::Overflow("loop matrix")))
    }

    #[getter]
    fn heights(&self) -> Vec<u64> {
        self.inst.towers.heights().to_vec()
    }

    /// Tower words with 1-based labels.
    #[getter]
    fn words(&self) -> Vec<Vec<usize>> {
        self.inst
            .towers
            .words()
            .iter()
            .map(|w| w.iter().map(|x| x + 1).collect())
            .collect()
    }

    #[getter]
    fn phi(&self) -> Option<Vec<Vec<i64>>> {
        self.inst
            .phi
            .as_ref()
            .map(|p| p.values().iter().map(|v| v.coords().to_vec()).collect())
    }

    /// Integer basis of the fixed cocycles, one vector of length `d` each.
    fn eigencocycles(&self) -> Vec<Vec<i64>> {
        self.inst.eigen.basis.clone()
    }

    /// Normalized Perron-Frobenius lengths and the eigenvalue.
    fn pf_lengths(&self) -> PyResult<(Vec<f64>, f64)> {
        let l = pf_lengths(&self.inst.lp.matrix()).map_err(err)?;
        Ok((l.lengths_f64(), l.eigenvalue()))
    }

    fn certify(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let phi = self.inst.require_phi().map_err(err)?;
        let cert = amplify_for_common_prefix(&self.inst.lp, phi).map_err(err)?;
        let text = serde_json::to_string(&cert).map_err(|e| SkewadicError::new_err(e.to_string()))?;
        json_to_py(py, &text)
    }

    /// Run the layered checks; `inject` is `"phi-plus-one"` or `"swap-word"`.
    #[pyo3(signature = (seed=None, inject=None))]
    fn verify(&self, py: Python<'_>, seed: Option<u64>, inject: Option<&str>) -> PyResult<Py<PyAny>> {
        let injection = match inject {
            None => None,
            Some("phi-plus-one") => Some(Injection::PhiPlusOne),
            Some("swap-word") => Some(Injection::SwapWord),
            Some(other) => return Err(SkewadicError::new_err(format!("unknown injection {other:?}"))),
        };
        let report = run_verification(&self.inst, seed.unwrap_or(self.inst.seed), injection).map_err(err)?;
        json_to_py(py, &report.to_json())
    }

    /// `(r, v)` for `M(exp(psi))`, with `sum(v) = 1`.
    fn perron(&self, psi: Vec<f64>) -> PyResult<(f64, Vec<f64>)> {
        let mu = self.measure(psi)?;
        Ok((mu.perron().r, mu.perron().v.clone()))
    }

    /// `mu_psi(J(p) x {fiber})` for a path written like `(1,0)(2,3)`.
    fn cylinder_measure(&self, psi: Vec<f64>, path: &str, fiber: Vec<i64>) -> PyResult<f64> {
        let p = self.diagram.parse_path(path).map_err(err)?;
        let mu = self.measure(psi)?;
        if fiber.len() != self.m() {
            return Err(SkewadicError::new_err(format!("fiber must have {} coordinates", self.m())));
        }
        Ok(mu.cylinder_measure(&p, &GroupElement::new(fiber)))
    }

    /// `(tower, height)` of a path, tower 1-based.
    fn path_to_floor(&self, path: &str) -> PyResult<(usize, u64)> {
        let p = self.diagram.parse_path(path).map_err(err)?;
        let c = self.diagram.path_to_floor(&p).map_err(err)?;
        Ok((c.tower + 1, c.height))
    }

    fn floor_to_path(&self, level: usize, tower: usize, height: u64) -> PyResult<String> {
        if tower == 0 {
            return Err(SkewadicError::new_err("towers are numbered from 1"));
        }
        let p = self.diagram.floor_to_path(level, tower - 1, height).map_err(err)?;
        Ok(p.to_string())
    }

    fn measure_table_csv(&self, psi: Vec<f64>, level: usize) -> PyResult<String> {
        let mu = self.measure(psi)?;
        Ok(MeasureTable::build(&mu, level).to_csv())
    }

    fn __repr__(&self) -> String {
        format!("Instance(name={:?}, d={}, m={})", self.inst.name, self.d(), self.m())
    }
}

/// Smith invariant factors of an integer matrix given by rows.
#[pyfunction]
fn invariant_factors(rows: Vec<Vec<i64>>) -> PyResult<Vec<String>> {
    let m = IntegerMatrix::from_rows(&rows).map_err(err)?;
    Ok(factors(&m).iter().map(ToString::to_string).collect())
}

#[pymodule]
fn pyskewadic(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Instance>()?;
    m.add_function(wrap_pyfunction!(invariant_factors, m)?)?;
    m.add("SkewadicError", m.py().get_type::<SkewadicError>())?;
    Ok(())
}
