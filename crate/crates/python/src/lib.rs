use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use geomext::cellposet::homology::homology_dims;
use geomext::fixtures::{validated_fixture, REGISTRY};
use geomext::report::{RunConfig, COMMANDS};
use geomext::with_ring;

fn err(e: geomext::error::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Fixture expressions understood by `run`.
#[pyfunction]
fn fixtures() -> Vec<&'static str> {
    REGISTRY.to_vec()
}

#[pyfunction]
fn commands() -> Vec<&'static str> {
    COMMANDS.to_vec()
}

/// Betti numbers of a fixture's space.
#[pyfunction]
#[pyo3(signature = (fixture, coeffs = "F2"))]
fn homology(fixture: &str, coeffs: &str) -> PyResult<Vec<usize>> {
    let f = validated_fixture(fixture).map_err(err)?;
    let spec = coeffs.parse().map_err(err)?;
    Ok(with_ring!(spec, |ring| homology_dims(&f.complex, &ring)))
}

/// Runs a pipeline and returns `(exit status, report JSON)`.
#[pyfunction]
#[pyo3(signature = (command, fixture, coeffs = "F2", seed = 0, options = None))]
fn run(
    command: &str,
    fixture: &str,
    coeffs: &str,
    seed: u64,
    options: Option<BTreeMap<String, String>>,
) -> PyResult<(i32, String)> {
    let mut config = RunConfig::new(coeffs, fixture).map_err(err)?;
    config.seed = seed;
    config.options = options.unwrap_or_default();
    let rep = geomext::report::run(command, &config, None).map_err(err)?;
    Ok((rep.status.exit_code(), rep.to_json()))
}

#[pymodule]
fn geomext_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(fixtures, m)?)?;
    m.add_function(wrap_pyfunction!(commands, m)?)?;
    m.add_function(wrap_pyfunction!(homology, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
