//! Python bindings: the poset substrate and table operations as classes, the
//! staged constructions and family machinery as JSON-in/JSON-out functions.

use ladders::bits::Bits;
use ladders::poset::IdealSet;
use ladders::{cohen, club, diamond, extension, gen, io as lio, rho, FinitePoset, Report};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

fn value_to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    Ok(match v {
        serde_json::Value::Null => py.None(),
        serde_json::Value::Bool(b) => b.into_pyobject(py)?.to_owned().unbind().into(),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.unbind().into()
            } else {
                n.as_f64().unwrap().into_pyobject(py)?.unbind().into()
            }
        }
        serde_json::Value::String(s) => s.into_pyobject(py)?.unbind().into(),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(value_to_py(py, item)?)?;
            }
            list.unbind().into()
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, val) in map {
                dict.set_item(k, value_to_py(py, val)?)?;
            }
            dict.unbind().into()
        }
    })
}

fn report_to_py(py: Python<'_>, rep: &Report) -> PyResult<Py<PyAny>> {
    value_to_py(py, &serde_json::to_value(rep).unwrap())
}

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Finite poset over string ids with the full order relation.
#[pyclass(name = "Poset")]
struct PyPoset {
    inner: FinitePoset,
}

impl PyPoset {
    fn bits_of(&self, ids: Vec<String>) -> PyResult<Bits> {
        let mut bits = Bits::new(self.inner.len());
        for id in &ids {
            bits.set(self.inner.index_or_err(id).map_err(value_err)?);
        }
        Ok(bits)
    }

    fn idx(&self, id: &str) -> PyResult<usize> {
        self.inner.index_or_err(id).map_err(value_err)
    }
}

#[pymethods]
impl PyPoset {
    /// Parse a poset document (covers or full relation).
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<PyPoset> {
        Ok(PyPoset {
            inner: lio::poset_from_json(text).map_err(value_err)?,
        })
    }

    /// Build from cover pairs; the order is the reflexive-transitive closure.
    #[staticmethod]
    fn from_covers(elements: Vec<String>, covers: Vec<(String, String)>) -> PyResult<PyPoset> {
        Ok(PyPoset {
            inner: FinitePoset::from_covers(elements, &covers).map_err(value_err)?,
        })
    }

    fn elements(&self) -> Vec<String> {
        self.inner.ids().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn leq(&self, x: &str, y: &str) -> PyResult<bool> {
        Ok(self.inner.leq(self.idx(x)?, self.idx(y)?))
    }

    fn validate(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        report_to_py(py, &self.inner.validate())
    }

    fn is_lattice(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        report_to_py(py, &self.inner.is_lattice())
    }

    fn join(&self, x: &str, y: &str) -> PyResult<Option<String>> {
        Ok(self
            .inner
            .join_ids(x, y)
            .map_err(value_err)?
            .map(String::from))
    }

    fn meet(&self, x: &str, y: &str) -> PyResult<Option<String>> {
        Ok(self
            .inner
            .meet_ids(x, y)
            .map_err(value_err)?
            .map(String::from))
    }

    fn lower_covers(&self, x: &str) -> PyResult<Vec<String>> {
        let mut out: Vec<String> = self
            .inner
            .lower_covers(self.idx(x)?)
            .into_iter()
            .map(|i| self.inner.id(i).to_string())
            .collect();
        out.sort();
        Ok(out)
    }

    fn is_n_ladder(&self, py: Python<'_>, n: usize) -> PyResult<Py<PyAny>> {
        report_to_py(py, &self.inner.is_n_ladder(n))
    }

    /// Ladder check for downward-closed box truncations: pairs bounded in the
    /// box must have joins/meets, and the cover bound holds.
    fn is_n_ladder_box(&self, py: Python<'_>, n: usize) -> PyResult<Py<PyAny>> {
        report_to_py(py, &self.inner.is_n_ladder_box(n))
    }

    fn lattice_defects(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        report_to_py(py, &self.inner.lattice_defects())
    }

    fn breadth(&self) -> PyResult<usize> {
        self.inner.breadth().map_err(value_err)
    }

    fn breadth_by_definition(&self) -> PyResult<usize> {
        self.inner.breadth_by_definition().map_err(value_err)
    }

    fn is_ideal(&self, py: Python<'_>, subset: Vec<String>) -> PyResult<Py<PyAny>> {
        report_to_py(py, &self.inner.is_ideal(&self.bits_of(subset)?))
    }

    fn is_proper_ideal(&self, py: Python<'_>, subset: Vec<String>) -> PyResult<Py<PyAny>> {
        report_to_py(py, &self.inner.is_proper_ideal(&self.bits_of(subset)?))
    }

    fn ideal_generated(&self, xs: Vec<String>) -> PyResult<Vec<String>> {
        let ideal = self
            .inner
            .ideal_generated(&self.bits_of(xs)?)
            .map_err(value_err)?;
        let mut out: Vec<String> = ideal
            .members()
            .into_iter()
            .map(|i| self.inner.id(i).to_string())
            .collect();
        out.sort();
        Ok(out)
    }

    /// Greatest element of the ideal below `x`; `ideal` must pass `is_ideal`.
    fn pi(&self, ideal: Vec<String>, x: &str) -> PyResult<String> {
        let bits = self.bits_of(ideal)?;
        let rep = self.inner.is_ideal(&bits);
        if !rep.passed() {
            return Err(value_err(format!("not an ideal: {rep}")));
        }
        let i = self
            .inner
            .pi(&IdealSet::from_unchecked(bits), self.idx(x)?)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        Ok(self.inner.id(i).to_string())
    }

    fn is_meet_subsemilattice(&self, py: Python<'_>, subset: Vec<String>) -> PyResult<Py<PyAny>> {
        report_to_py(py, &self.inner.is_meet_subsemilattice(&self.bits_of(subset)?))
    }

    fn is_cofinal(&self, py: Python<'_>, subset: Vec<String>) -> PyResult<Py<PyAny>> {
        report_to_py(py, &self.inner.is_cofinal(&self.bits_of(subset)?))
    }

    fn to_json(&self) -> String {
        lio::poset_to_json(&self.inner)
    }

    fn to_dot(&self) -> String {
        lio::export_dot(&self.inner)
    }
}

/// Extend an n-ladder by a cofinal copy of the given meet-subsemilattice.
#[pyfunction]
fn extend_by_cofinal_copy(
    py: Python<'_>,
    poset: &PyPoset,
    subset: Vec<String>,
    n: usize,
) -> PyResult<Py<PyAny>> {
    let bits = poset.bits_of(subset)?;
    let (ext, res) =
        extension::extend_by_cofinal_copy(&poset.inner, &bits, n).map_err(value_err)?;
    let dict = PyDict::new(py);
    dict.set_item("extended", PyPoset { inner: ext }.into_pyobject(py)?)?;
    dict.set_item("embedded_ideal", res.embedded_ideal)?;
    dict.set_item("new_elements", res.new_elements)?;
    Ok(dict.unbind().into())
}

#[pyfunction]
fn induced_cofinal_subsemilattice(
    poset: &PyPoset,
    ideal: Vec<String>,
    b: &str,
    n: usize,
) -> PyResult<Vec<String>> {
    let bits = poset.bits_of(ideal)?;
    let c = extension::induced_cofinal_subsemilattice(&poset.inner, &bits, poset.idx(b)?, n)
        .map_err(value_err)?;
    let mut out: Vec<String> = c
        .iter_ones()
        .map(|i| poset.inner.id(i).to_string())
        .collect();
    out.sort();
    Ok(out)
}

#[pyfunction]
fn finite_nonmaximality_check(py: Python<'_>, poset: &PyPoset, n: usize) -> PyResult<Py<PyAny>> {
    report_to_py(py, &extension::finite_nonmaximality_check(&poset.inner, n))
}

type PyKPoint = Option<(u32, u32, u32)>;

fn kpoint_of(p: PyKPoint) -> rho::KPoint {
    match p {
        None => rho::KPoint::Zero,
        Some((level, n, m)) => rho::KPoint::node(level, n, m),
    }
}

fn kpoint_to(p: rho::KPoint) -> PyKPoint {
    match p {
        rho::KPoint::Zero => None,
        rho::KPoint::Node { level, n, m } => Some((level, n, m)),
    }
}

/// Level-pair table driving the order on `{0} ∪ (levels × ω × ω)`.
/// Points are `(level, n, m)` tuples, with `None` for the least element.
#[pyclass(name = "RhoTable")]
struct PyRhoTable {
    inner: rho::RhoTable,
}

#[pymethods]
impl PyRhoTable {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<PyRhoTable> {
        let doc: rho::RhoDoc = serde_json::from_str(text).map_err(value_err)?;
        Ok(PyRhoTable {
            inner: doc.to_table().map_err(value_err)?,
        })
    }

    /// Run the inductive construction over a seeded random family.
    #[staticmethod]
    fn build(levels: u32, window: u32, seed: u64) -> PyResult<PyRhoTable> {
        let mut rng = gen::substream(seed, "rho-f-family");
        let family: Vec<Vec<u32>> = (0..levels)
            .map(|_| gen::random_nondecreasing(&mut rng, window as usize, 5))
            .collect();
        Ok(PyRhoTable {
            inner: rho::build_rho(levels, window, &family, &rho::BuildChoices::default())
                .map_err(value_err)?,
        })
    }

    /// Run the inductive construction over an explicit family of rows.
    #[staticmethod]
    fn build_from_family(levels: u32, window: u32, family: Vec<Vec<u32>>) -> PyResult<PyRhoTable> {
        Ok(PyRhoTable {
            inner: rho::build_rho(levels, window, &family, &rho::BuildChoices::default())
                .map_err(value_err)?,
        })
    }

    #[getter]
    fn levels(&self) -> u32 {
        self.inner.levels()
    }

    #[getter]
    fn window(&self) -> u32 {
        self.inner.window()
    }

    fn row(&self, a: u32, b: u32) -> Vec<u32> {
        self.inner.row(a, b).to_vec()
    }

    fn check_axioms(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        report_to_py(py, &self.inner.check_axioms())
    }

    fn lower_finiteness(&self, py: Python<'_>, bound: u32) -> PyResult<Py<PyAny>> {
        report_to_py(py, &self.inner.check_lower_finiteness(bound))
    }

    fn leq(&self, x: PyKPoint, y: PyKPoint) -> PyResult<bool> {
        self.inner.leq(kpoint_of(x), kpoint_of(y)).map_err(value_err)
    }

    fn join(&self, x: PyKPoint, y: PyKPoint) -> PyResult<PyKPoint> {
        Ok(kpoint_to(
            self.inner.join(kpoint_of(x), kpoint_of(y)).map_err(value_err)?,
        ))
    }

    fn pi(&self, level: u32, x: PyKPoint) -> PyResult<PyKPoint> {
        Ok(kpoint_to(
            self.inner.pi(level, kpoint_of(x)).map_err(value_err)?,
        ))
    }

    fn check_3ladder_box(
        &self,
        py: Python<'_>,
        levels: u32,
        window: u32,
        mmax: u32,
    ) -> PyResult<Py<PyAny>> {
        report_to_py(
            py,
            &self.inner.check_3ladder_box(&rho::KBox::new(levels, window, mmax)),
        )
    }

    fn nonmax_witness(
        &self,
        py: Python<'_>,
        f: Vec<u32>,
        levels: u32,
        window: u32,
        mmax: u32,
    ) -> PyResult<Py<PyAny>> {
        let rep = rho::nonmax_witness(&self.inner, &f, &rho::KBox::new(levels, window, mmax))
            .map_err(value_err)?;
        report_to_py(py, &rep)
    }

    /// Materialize a box as a Poset.
    fn export_box(&self, levels: u32, window: u32, mmax: u32) -> PyResult<PyPoset> {
        let (p, _) = self
            .inner
            .materialize(&rho::KBox::new(levels, window, mmax))
            .map_err(value_err)?;
        Ok(PyPoset { inner: p })
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.inner.to_doc()).unwrap()
    }
}

/// Build a staged breadth-2 state; returns the state document and reports.
#[pyfunction]
#[pyo3(signature = (widths, base_width=None, seed=0, target_parity=None))]
fn club_build(
    py: Python<'_>,
    widths: Vec<u32>,
    base_width: Option<u32>,
    seed: u64,
    target_parity: Option<u8>,
) -> PyResult<Py<PyAny>> {
    let state = club::build(&widths, base_width, seed, target_parity).map_err(value_err)?;
    let dict = PyDict::new(py);
    dict.set_item(
        "state",
        value_to_py(py, &serde_json::to_value(state.to_doc()).unwrap())?,
    )?;
    dict.set_item(
        "stage_properties",
        report_to_py(py, &state.check_stage_properties())?,
    )?;
    dict.set_item("breadth2", report_to_py(py, &state.check_breadth2())?)?;
    dict.set_item(
        "poset",
        PyPoset {
            inner: state.poset().clone(),
        }
        .into_pyobject(py)?,
    )?;
    Ok(dict.unbind().into())
}

/// Build a staged tree-labelled state; returns the state document and reports.
#[pyfunction]
fn diamond_build(py: Python<'_>, stages: u32, width: u32) -> PyResult<Py<PyAny>> {
    let state = diamond::build(stages, width).map_err(value_err)?;
    let dict = PyDict::new(py);
    dict.set_item(
        "state",
        value_to_py(py, &serde_json::to_value(state.to_doc()).unwrap())?,
    )?;
    dict.set_item("properties", report_to_py(py, &state.check_properties())?)?;
    dict.set_item(
        "lower_cover_profile",
        report_to_py(py, &state.lower_cover_profile())?,
    )?;
    let nodes = PyDict::new(py);
    for node in state.nodes() {
        nodes.set_item(
            node.to_string(),
            report_to_py(py, &state.gamma_ladder_check(node))?,
        )?;
    }
    dict.set_item("gamma_checks", nodes)?;
    dict.set_item(
        "poset",
        PyPoset {
            inner: state.poset().clone(),
        }
        .into_pyobject(py)?,
    )?;
    Ok(dict.unbind().into())
}

#[pyfunction]
fn cohen_validate_family(py: Python<'_>, family_json: &str) -> PyResult<Py<PyAny>> {
    let doc: cohen::FamilyDoc = serde_json::from_str(family_json).map_err(value_err)?;
    let fam = cohen::IdealFamily::from_doc(&doc).map_err(value_err)?;
    report_to_py(py, &fam.validate())
}

#[pyfunction]
fn cohen_candidate_set(family_json: &str, condition_json: &str) -> PyResult<Vec<String>> {
    let doc: cohen::FamilyDoc = serde_json::from_str(family_json).map_err(value_err)?;
    let fam = cohen::IdealFamily::from_doc(&doc).map_err(value_err)?;
    let cdoc: cohen::ConditionDoc = serde_json::from_str(condition_json).map_err(value_err)?;
    let cond = cohen::Condition::from_doc(&cdoc, &fam).map_err(value_err)?;
    let c = cohen::c_of(&fam, &cond).map_err(value_err)?;
    let mut out: Vec<String> = c.iter_ones().map(|i| fam.base().id(i).to_string()).collect();
    out.sort();
    Ok(out)
}

#[pyfunction]
fn cohen_random_family(py: Python<'_>, seed: u64, depth: usize, max_base: usize) -> PyResult<Py<PyAny>> {
    let mut rng = gen::substream(seed, "py-cohen-family");
    let fam = cohen::random_toy_family(&mut rng, depth, max_base);
    value_to_py(py, &serde_json::to_value(fam.to_doc()).unwrap())
}

/// Run the acceptance criteria; returns one dict per criterion.
#[pyfunction]
fn run_acceptance(py: Python<'_>) -> PyResult<Py<PyAny>> {
    let list = PyList::empty(py);
    for o in ladders::acceptance::run_all() {
        let dict = PyDict::new(py);
        dict.set_item("id", o.id)?;
        dict.set_item("name", o.name)?;
        dict.set_item("passed", o.passed)?;
        dict.set_item("detail", &o.detail)?;
        dict.set_item("seconds", o.elapsed.as_secs_f64())?;
        list.append(dict)?;
    }
    Ok(list.unbind().into())
}

#[pymodule]
fn ladders_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPoset>()?;
    m.add_class::<PyRhoTable>()?;
    m.add_function(wrap_pyfunction!(extend_by_cofinal_copy, m)?)?;
    m.add_function(wrap_pyfunction!(induced_cofinal_subsemilattice, m)?)?;
    m.add_function(wrap_pyfunction!(finite_nonmaximality_check, m)?)?;
    m.add_function(wrap_pyfunction!(club_build, m)?)?;
    m.add_function(wrap_pyfunction!(diamond_build, m)?)?;
    m.add_function(wrap_pyfunction!(cohen_validate_family, m)?)?;
    m.add_function(wrap_pyfunction!(cohen_candidate_set, m)?)?;
    m.add_function(wrap_pyfunction!(cohen_random_family, m)?)?;
    m.add_function(wrap_pyfunction!(run_acceptance, m)?)?;
    Ok(())
}
