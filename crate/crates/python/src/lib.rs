//! Python bindings: rule vectors, configurations as bit strings, the decider,
//! the brute-force oracle and the sample-size helpers.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use reach::experiment::{self, SampleStats};
use reach::{oracle, tree, Configuration, DecideOptions, MinSteps, Outcome};

fn err(e: reach::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn config(s: &str) -> PyResult<Configuration> {
    s.parse().map_err(err)
}

#[pyclass(frozen, module = "nuca_reach")]
struct RuleVector {
    inner: reach::RuleVector,
}

#[pymethods]
impl RuleVector {
    #[new]
    fn new(codes: Vec<u8>) -> PyResult<Self> {
        let inner = reach::RuleVector::from_codes(&codes).map_err(err)?;
        Ok(RuleVector { inner })
    }

    /// Parses the comma-separated form, e.g. `"9,170,195,80"`.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(RuleVector { inner: text.parse().map_err(err)? })
    }

    #[getter]
    fn codes(&self) -> Vec<u32> {
        // Vec<u8> would surface as `bytes`
        self.inner.codes().into_iter().map(u32::from).collect()
    }

    fn is_uniform(&self) -> bool {
        self.inner.is_uniform()
    }

    fn evolve(&self, state: &str) -> PyResult<String> {
        Ok(self.inner.evolve(&config(state)?).map_err(err)?.to_string())
    }

    fn evolve_t(&self, state: &str, t: u64) -> PyResult<String> {
        Ok(self.inner.evolve_t(&config(state)?, t).map_err(err)?.to_string())
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("RuleVector({:?})", self.inner.codes())
    }
}

#[pyclass(frozen, get_all, module = "nuca_reach")]
struct Decision {
    reachable: bool,
    min_steps: Option<u64>,
    reason: Option<String>,
    at_level: Option<usize>,
    explored_edges: u64,
}

#[pymethods]
impl Decision {
    fn __repr__(&self) -> String {
        match (&self.reason, self.at_level) {
            (Some(r), Some(l)) => format!("Decision(not_reachable, {r} at level {l})"),
            _ => format!("Decision(reachable, min_steps={})", self.min_steps.unwrap_or(0)),
        }
    }
}

/// Decides whether `dest` is reachable from `source`.
#[pyfunction]
#[pyo3(signature = (rules, source, dest, min_steps = 0, prune = true))]
fn decide(rules: &RuleVector, source: &str, dest: &str, min_steps: u8, prune: bool) -> PyResult<Decision> {
    let opts = DecideOptions {
        min_steps_required: MinSteps::from_u8(min_steps).map_err(err)?,
        prune_enabled: prune,
        ..DecideOptions::default()
    };
    let d = reach::decide(&rules.inner, &config(source)?, &config(dest)?, opts).map_err(err)?;
    let record = d.record(true);
    Ok(Decision {
        reachable: matches!(d.outcome, Outcome::Reachable { .. }),
        min_steps: record.min_steps,
        reason: record.reason.map(|r| serde_json::to_value(r).unwrap().as_str().unwrap().to_string()),
        at_level: record.at_level,
        explored_edges: d.explored_edges,
    })
}

/// Brute-force answer: the first step count at which `dest` appears, or None.
#[pyfunction]
#[pyo3(signature = (rules, source, dest, min_steps = 0))]
fn oracle_decide(rules: &RuleVector, source: &str, dest: &str, min_steps: u8) -> PyResult<Option<u64>> {
    let m = MinSteps::from_u8(min_steps).map_err(err)?;
    let v = oracle::oracle_decide(&rules.inner, &config(source)?, &config(dest)?, m).map_err(err)?;
    Ok(v.min_t)
}

#[pyfunction]
fn trajectory(rules: &RuleVector, state: &str) -> PyResult<Vec<String>> {
    let t = oracle::trajectory(&rules.inner, &config(state)?).map_err(err)?;
    Ok(t.states.iter().map(ToString::to_string).collect())
}

/// Number of configurations with a predecessor, from the full tree.
#[pyfunction]
fn leaf_count(rules: &RuleVector) -> PyResult<usize> {
    Ok(tree::enumerate_full_tree(&rules.inner, tree::DEFAULT_TREE_CAP).map_err(err)?.leaf_count)
}

#[pyfunction]
fn reachable_states(rules: &RuleVector) -> PyResult<Vec<String>> {
    let full = tree::enumerate_full_tree(&rules.inner, tree::DEFAULT_TREE_CAP).map_err(err)?;
    Ok(full.reachable_states().iter().map(ToString::to_string).collect())
}

#[pyfunction]
fn cochran_c(t: f64, rel_err: f64) -> f64 {
    experiment::cochran_c(t, rel_err)
}

#[pyfunction]
fn pilot_to_second_size(size: usize, mean: f64, variance: f64, c: f64) -> PyResult<u64> {
    experiment::pilot_to_second_size(&SampleStats { size, mean, variance }, c).map_err(err)
}

/// Returns `(m0, m)`: the uncorrected size and the corrected, rounded size.
#[pyfunction]
fn final_sample_size(size: usize, mean: f64, variance: f64, t: f64, rel_err: f64, population: f64) -> PyResult<(f64, u64)> {
    let stats = SampleStats { size, mean, variance };
    let f = experiment::final_sample_size(&stats, t, rel_err, population).map_err(err)?;
    Ok((f.m0, f.m))
}

#[pyfunction]
fn growth_rate(p1: (f64, f64), p2: (f64, f64)) -> PyResult<f64> {
    experiment::growth_rate(p1, p2).map_err(err)
}

#[pymodule]
fn nuca_reach(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<RuleVector>()?;
    m.add_class::<Decision>()?;
    m.add_function(wrap_pyfunction!(decide, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_decide, m)?)?;
    m.add_function(wrap_pyfunction!(trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(leaf_count, m)?)?;
    m.add_function(wrap_pyfunction!(reachable_states, m)?)?;
    m.add_function(wrap_pyfunction!(cochran_c, m)?)?;
    m.add_function(wrap_pyfunction!(pilot_to_second_size, m)?)?;
    m.add_function(wrap_pyfunction!(final_sample_size, m)?)?;
    m.add_function(wrap_pyfunction!(growth_rate, m)?)?;
    Ok(())
}
