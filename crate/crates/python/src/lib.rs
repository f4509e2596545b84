use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use topics_qif::pipeline::{parse_taxonomy, run_pipeline, Classification, SuffixList, TreatmentConfig};
use topics_qif::reports::{analyze, to_json};
use topics_qif::{qif, sim, topics, Label};

create_exception!(topics_qif_py, QifError, PyValueError);

/// Errors surface as `QifError("<Kind>: <message>")`.
fn err(e: topics_qif::Error) -> PyErr {
    QifError::new_err(format!("{}: {e}", e.kind()))
}

fn labels(items: Vec<String>) -> PyResult<Vec<Label>> {
    items.into_iter().map(|s| Label::new(s).map_err(err)).collect()
}

fn strings(items: &[Label]) -> Vec<String> {
    items.iter().map(|l| l.to_string()).collect()
}

#[pyclass(name = "Channel", frozen, skip_from_py_object, module = "topics_qif_py")]
#[derive(Clone)]
struct PyChannel(topics_qif::Channel);

#[pymethods]
impl PyChannel {
    #[new]
    fn new(rows: Vec<String>, cols: Vec<String>, entries: Vec<Vec<f64>>) -> PyResult<Self> {
        topics_qif::Channel::new(labels(rows)?, labels(cols)?, entries).map(PyChannel).map_err(err)
    }

    #[staticmethod]
    fn identity(labels_: Vec<String>) -> PyResult<Self> {
        topics_qif::Channel::identity(labels(labels_)?).map(PyChannel).map_err(err)
    }

    #[getter]
    fn rows(&self) -> Vec<String> {
        strings(self.0.rows())
    }

    #[getter]
    fn cols(&self) -> Vec<String> {
        strings(self.0.cols())
    }

    fn to_list(&self) -> Vec<Vec<f64>> {
        self.0.to_rows()
    }

    fn get(&self, row: usize, col: usize) -> PyResult<f64> {
        if row >= self.0.n_rows() || col >= self.0.n_cols() {
            return Err(pyo3::exceptions::PyIndexError::new_err("entry out of range"));
        }
        Ok(self.0.get(row, col))
    }

    fn bayes_capacity(&self) -> f64 {
        qif::bayes_capacity(&self.0)
    }

    fn maxcase_capacity(&self) -> PyResult<f64> {
        qif::maxcase_capacity(&self.0).map_err(err)
    }

    fn epsilon(&self) -> PyResult<f64> {
        qif::epsilon_of(&self.0).map_err(err)
    }

    fn posterior_bayes_vulnerability(&self, prior: &PyPrior) -> PyResult<f64> {
        qif::posterior_bayes_vulnerability(&prior.0, &self.0).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        qif::io::LabeledMatrix::from(&self.0).to_json().map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let m = qif::io::LabeledMatrix::from_json(text).map_err(err)?;
        topics_qif::Channel::try_from(m).map(PyChannel).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.n_rows()
    }

    fn __repr__(&self) -> String {
        format!("Channel({} x {})", self.0.n_rows(), self.0.n_cols())
    }
}

#[pyclass(name = "Prior", frozen, skip_from_py_object, module = "topics_qif_py")]
#[derive(Clone)]
struct PyPrior(topics_qif::Prior);

#[pymethods]
impl PyPrior {
    #[new]
    fn new(labels_: Vec<String>, probs: Vec<f64>) -> PyResult<Self> {
        topics_qif::Prior::new(labels(labels_)?, probs).map(PyPrior).map_err(err)
    }

    #[staticmethod]
    fn uniform(labels_: Vec<String>) -> PyResult<Self> {
        topics_qif::Prior::uniform(labels(labels_)?).map(PyPrior).map_err(err)
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        strings(self.0.labels())
    }

    #[getter]
    fn probs(&self) -> Vec<f64> {
        self.0.probs().to_vec()
    }

    fn vulnerability(&self) -> f64 {
        qif::prior_bayes_vulnerability(&self.0)
    }
}

#[pyclass(name = "TopicsParams", frozen, skip_from_py_object, module = "topics_qif_py")]
#[derive(Clone)]
struct PyTopicsParams(topics_qif::TopicsParams);

#[pymethods]
impl PyTopicsParams {
    #[new]
    #[pyo3(signature = (m, s, r, m_prime = None))]
    fn new(m: usize, s: usize, r: f64, m_prime: Option<usize>) -> PyResult<Self> {
        let mut p = topics_qif::TopicsParams::new(m, s, r).map_err(err)?;
        if let Some(mp) = m_prime {
            p = p.with_m_prime(mp).map_err(err)?;
        }
        Ok(PyTopicsParams(p))
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    #[getter]
    fn s(&self) -> usize {
        self.0.s()
    }

    #[getter]
    fn r(&self) -> f64 {
        self.0.r()
    }

    #[getter]
    fn m_prime(&self) -> Option<usize> {
        self.0.m_prime()
    }

    /// Average-case capacity `r + m'(1-r)/s`; needs `m_prime`.
    fn capacity(&self) -> PyResult<f64> {
        self.0.m_prime().ok_or_else(|| err(topics_qif::Error::MissingMPrime))?;
        Ok(topics::topics_capacity(&self.0))
    }

    fn maxcase_capacity(&self) -> PyResult<f64> {
        topics::topics_maxcase_capacity(&self.0).map_err(err)
    }

    fn epsilon(&self) -> PyResult<f64> {
        topics::topics_epsilon(&self.0).map_err(err)
    }

    /// `(p, q)` of the per-topic randomized response.
    fn counting(&self) -> PyResult<(f64, f64)> {
        let rr: topics::RandomizedResponse = topics::counting_params(&self.0).map_err(err)?.into();
        Ok((rr.p, rr.q))
    }

    fn __repr__(&self) -> String {
        format!("TopicsParams(m={}, s={}, r={})", self.0.m(), self.0.s(), self.0.r())
    }
}

fn rr(p: f64, q: f64) -> PyResult<topics::RandomizedResponse> {
    topics::RandomizedResponse::new(p, q).map_err(err)
}

#[pymodule]
mod topics_qif_py {
    use super::*;

    #[pymodule_export]
    use super::{PyChannel, PyPrior, PyTopicsParams, QifError};

    #[pyfunction]
    fn cascade(a: &PyChannel, b: &PyChannel) -> PyResult<PyChannel> {
        qif::cascade(&a.0, &b.0).map(PyChannel).map_err(err)
    }

    #[pyfunction]
    fn parallel(a: &PyChannel, b: &PyChannel) -> PyResult<PyChannel> {
        qif::parallel(&a.0, &b.0).map(PyChannel).map_err(err)
    }

    #[pyfunction]
    fn kronecker(a: &PyChannel, b: &PyChannel) -> PyResult<PyChannel> {
        qif::kronecker(&a.0, &b.0).map(PyChannel).map_err(err)
    }

    #[pyfunction]
    fn internal_choice(a: &PyChannel, b: &PyChannel, r: f64) -> PyResult<PyChannel> {
        qif::internal_choice(&a.0, &b.0, r).map(PyChannel).map_err(err)
    }

    #[pyfunction]
    fn external_choice(a: &PyChannel, b: &PyChannel, r: f64) -> PyResult<PyChannel> {
        qif::external_choice(&a.0, &b.0, r).map(PyChannel).map_err(err)
    }

    /// Report channel from the distinct top-sets to the taxonomy.
    #[pyfunction]
    fn report_channel(topsets: Vec<Vec<String>>, taxonomy: Vec<String>, r: f64) -> PyResult<PyChannel> {
        let taxonomy = labels(taxonomy)?;
        let sets =
            topsets.into_iter().map(|s| topics::TopSet::new(labels(s)?).map_err(err)).collect::<PyResult<Vec<_>>>()?;
        let s = sets.first().map_or(1, topics::TopSet::len);
        let params = topics_qif::TopicsParams::new(taxonomy.len(), s, r).map_err(err)?;
        topics::topics_report_channel(&sets, &params, &taxonomy).map(PyChannel).map_err(err)
    }

    /// The privacy channel `C_T` from users to reported topics.
    #[pyfunction]
    fn topics_channel(assignment: Vec<(String, Vec<String>)>, taxonomy: Vec<String>, r: f64) -> PyResult<PyChannel> {
        let entries = assignment
            .into_iter()
            .map(|(u, s)| Ok((Label::new(u).map_err(err)?, topics::TopSet::new(labels(s)?).map_err(err)?)))
            .collect::<PyResult<Vec<_>>>()?;
        let a = topics_qif::TopicAssignment::new(entries, labels(taxonomy)?).map_err(err)?;
        let params = a.params(r).map_err(err)?;
        topics::TopicsChannels::build(&a, &params).map(|c| PyChannel(c.complete)).map_err(err)
    }

    #[pyfunction]
    fn counting_probability(n: u64, p: f64, q: f64) -> PyResult<f64> {
        Ok(topics::counting_exact_probability(n, rr(p, q)?))
    }

    /// Returns `(estimate, stderr)`.
    #[pyfunction]
    #[pyo3(signature = (n, p, q, trials, seed = 0))]
    fn simulate_counting(py: Python<'_>, n: u64, p: f64, q: f64, trials: u64, seed: u64) -> PyResult<(f64, f64)> {
        let rr = rr(p, q)?;
        let report = py.detach(|| sim::run_counting_experiment(n, rr, trials, seed)).map_err(err)?;
        Ok((report.estimate, report.stderr))
    }

    /// Runs the pipeline on the four input files and returns the analysis
    /// report as JSON.
    #[pyfunction]
    #[pyo3(signature = (history, classification, suffixes, taxonomy = None, s = 5, r = 0.05))]
    fn analyze_files(
        py: Python<'_>,
        history: String,
        classification: String,
        suffixes: String,
        taxonomy: Option<String>,
        s: usize,
        r: f64,
    ) -> PyResult<String> {
        py.detach(|| -> topics_qif::Result<String> {
            let suffixes = SuffixList::parse(&std::fs::read_to_string(suffixes)?);
            let taxonomy = match taxonomy {
                Some(path) => Some(parse_taxonomy(&std::fs::read_to_string(path)?)?),
                None => None,
            };
            let classification = Classification::from_csv(std::fs::File::open(classification)?, taxonomy)?;
            let output =
                run_pipeline(std::fs::File::open(history)?, &suffixes, &classification, &TreatmentConfig::new(s)?)?;
            to_json(&analyze(&output, &classification, r)?)
        })
        .map_err(err)
    }
}
