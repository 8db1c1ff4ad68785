//! Python bindings: the command line entry point, tree enumeration and finite presheaves.

use std::sync::Arc;

use dendro::fixtures::{fixture, Fixture};
use dendro::format::{self, emit_presheaf};
use dendro::presheaf::FinitePresheaf;
use dendro::site::{Omega, Shape};
use dendro::DendroError;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: DendroError) -> PyErr {
    match e {
        DendroError::Parse { .. }
        | DendroError::Unknown(_)
        | DendroError::MalformedTree(_)
        | DendroError::MalformedCarrier(_)
        | DendroError::InvalidMorphism(_)
        | DendroError::InvalidPresheaf(_)
        | DendroError::InvalidMap(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Runs the `dendro` command line with `args` and returns `(exit_code, output)`.
#[pyfunction]
fn run(args: Vec<String>) -> (i32, String) {
    let out = dendro::cli::run(args);
    (out.code, out.output())
}

/// Codes of all trees of degree at most `max_degree` with vertex arities at most `arity_cap`.
#[pyfunction]
#[pyo3(signature = (max_degree, arity_cap = 3))]
fn trees(max_degree: usize, arity_cap: usize) -> Vec<String> {
    Omega::with_arity_cap(arity_cap).objects(max_degree).iter().map(|s| s.code().to_string()).collect()
}

/// Degree of a shape given as `eta`, `C<n>`, `L<n>` or a tree code.
#[pyfunction]
fn degree(shape: &str) -> PyResult<usize> {
    Ok(Shape::parse(shape).map_err(py_err)?.degree())
}

#[pyclass(frozen, module = "dendro_py")]
struct Presheaf {
    inner: Arc<FinitePresheaf>,
}

#[pymethods]
impl Presheaf {
    /// The last presheaf declared in `text`.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let doc = format::parse(text).map_err(py_err)?;
        let inner = doc.last_presheaf().map_err(py_err)?.clone();
        Ok(Presheaf { inner })
    }

    /// A shipped fixture; for maps, their source.
    #[staticmethod]
    #[pyo3(signature = (name, arg = None, degree = 3))]
    fn fixture(name: &str, arg: Option<&str>, degree: usize) -> PyResult<Self> {
        let inner = match fixture(name, arg, degree).map_err(py_err)? {
            Fixture::Presheaf(x) => x,
            Fixture::Map(f) => f.source().clone(),
            Fixture::Diagram(_) => return Err(PyValueError::new_err(format!("{name} is a diagram"))),
        };
        Ok(Presheaf { inner })
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Number of generators in each degree.
    fn counts(&self) -> Vec<usize> {
        let top = self.inner.max_degree().map_or(0, |d| d + 1);
        (0..top).map(|n| self.inner.generators().iter().filter(|g| g.shape.degree() == n).count()).collect()
    }

    /// `(name, shape code)` for every generator.
    fn generators(&self) -> Vec<(String, String)> {
        self.inner.generators().iter().map(|g| (g.name.clone(), g.shape.code().to_string())).collect()
    }

    fn is_normal(&self) -> bool {
        self.inner.is_normal()
    }

    /// Elements over `shape`, degenerate ones included.
    fn evaluate(&self, shape: &str) -> PyResult<Vec<String>> {
        let s = Shape::parse(shape).map_err(py_err)?;
        Ok(self.inner.evaluate(&s).iter().map(|x| self.inner.display(x)).collect())
    }

    fn to_text(&self) -> String {
        emit_presheaf(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Presheaf({:?}, generators={})", self.inner.name(), self.inner.len())
    }
}

#[pymodule]
pub fn dendro_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(trees, m)?)?;
    m.add_function(wrap_pyfunction!(degree, m)?)?;
    m.add_class::<Presheaf>()?;
    Ok(())
}
