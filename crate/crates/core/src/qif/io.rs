//! JSON and CSV forms of channels, priors and gain functions.
//!
//! All three share one document shape, `{"rows":[..], "cols":[..],
//! "entries":[[..]]}`. A prior is stored as a single row labeled `prior`
//! whose columns are the secrets; a gain matrix has actions as rows and
//! secrets as columns. CSV output has a header of column labels (the first
//! header cell is empty) and the row label in the first column.

use serde::{Deserialize, Serialize};

use super::{Channel, GainMatrix, Label, Prior};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledMatrix {
    pub rows: Vec<Label>,
    pub cols: Vec<Label>,
    pub entries: Vec<Vec<f64>>,
}

const PRIOR_ROW: &str = "prior";

impl LabeledMatrix {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header = std::iter::once(String::new()).chain(self.cols.iter().map(|c| c.to_string()));
        w.write_record(header).map_err(csv_err)?;
        for (label, row) in self.rows.iter().zip(&self.entries) {
            let record = std::iter::once(label.to_string()).chain(row.iter().map(|v| format!("{v:?}")));
            w.write_record(record).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::MalformedCsv(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::MalformedCsv(e.to_string()))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(text.as_bytes());
        let mut records = r.records();
        let header = records.next().ok_or_else(|| Error::MalformedCsv("missing header".into()))?.map_err(csv_err)?;
        let cols = header.iter().skip(1).map(Label::new).collect::<Result<Vec<_>>>()?;
        let mut rows = Vec::new();
        let mut entries = Vec::new();
        for record in records {
            let record = record.map_err(csv_err)?;
            let mut fields = record.iter();
            let label = fields.next().ok_or_else(|| Error::MalformedCsv("empty record".into()))?;
            rows.push(Label::new(label)?);
            let values = fields
                .map(|f| f.trim().parse::<f64>().map_err(|e| Error::MalformedCsv(format!("{f:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            entries.push(values);
        }
        Ok(LabeledMatrix { rows, cols, entries })
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::MalformedCsv(e.to_string())
}

impl From<&Channel> for LabeledMatrix {
    fn from(c: &Channel) -> Self {
        LabeledMatrix { rows: c.rows().to_vec(), cols: c.cols().to_vec(), entries: c.to_rows() }
    }
}

impl TryFrom<LabeledMatrix> for Channel {
    type Error = Error;

    fn try_from(m: LabeledMatrix) -> Result<Channel> {
        Channel::new(m.rows, m.cols, m.entries)
    }
}

impl From<&Prior> for LabeledMatrix {
    fn from(p: &Prior) -> Self {
        LabeledMatrix {
            rows: vec![Label::new(PRIOR_ROW).expect("non-empty")],
            cols: p.labels().to_vec(),
            entries: vec![p.probs().to_vec()],
        }
    }
}

impl TryFrom<LabeledMatrix> for Prior {
    type Error = Error;

    fn try_from(m: LabeledMatrix) -> Result<Prior> {
        let [row]: [Vec<f64>; 1] =
            m.entries.try_into().map_err(|_| Error::DimensionMismatch("a prior has exactly one row".into()))?;
        Prior::new(m.cols, row)
    }
}

impl From<&GainMatrix> for LabeledMatrix {
    fn from(g: &GainMatrix) -> Self {
        LabeledMatrix { rows: g.actions().to_vec(), cols: g.secrets().to_vec(), entries: g.to_rows() }
    }
}

impl TryFrom<LabeledMatrix> for GainMatrix {
    type Error = Error;

    fn try_from(m: LabeledMatrix) -> Result<GainMatrix> {
        GainMatrix::new(m.rows, m.cols, m.entries)
    }
}

impl Channel {
    pub fn to_json(&self) -> Result<String> {
        LabeledMatrix::from(self).to_json()
    }

    pub fn from_json(text: &str) -> Result<Channel> {
        LabeledMatrix::from_json(text)?.try_into()
    }

    pub fn to_csv(&self) -> Result<String> {
        LabeledMatrix::from(self).to_csv()
    }

    pub fn from_csv(text: &str) -> Result<Channel> {
        LabeledMatrix::from_csv(text)?.try_into()
    }
}

impl Prior {
    pub fn to_json(&self) -> Result<String> {
        LabeledMatrix::from(self).to_json()
    }

    pub fn from_json(text: &str) -> Result<Prior> {
        LabeledMatrix::from_json(text)?.try_into()
    }
}

impl GainMatrix {
    pub fn to_json(&self) -> Result<String> {
        LabeledMatrix::from(self).to_json()
    }

    pub fn from_json(text: &str) -> Result<GainMatrix> {
        LabeledMatrix::from_json(text)?.try_into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channel_json_shape() {
        let c = Channel::identity(Label::seq(&["a", "b"]).unwrap()).unwrap();
        let json = c.to_json().unwrap();
        assert_eq!(json, r#"{"rows":["a","b"],"cols":["a","b"],"entries":[[1.0,0.0],[0.0,1.0]]}"#);
        assert_eq!(Channel::from_json(&json).unwrap(), c);
    }

    #[test]
    fn csv_layout() {
        let c = Channel::new(
            Label::seq(&["{M,N}", "b"]).unwrap(),
            Label::seq(&["x", "y"]).unwrap(),
            vec![vec![0.25, 0.75], vec![1.0, 0.0]],
        )
        .unwrap();
        let text = c.to_csv().unwrap();
        assert_eq!(text.lines().next().unwrap(), ",x,y");
        assert_eq!(text.lines().nth(1).unwrap(), "\"{M,N}\",0.25,0.75");
        assert_eq!(Channel::from_csv(&text).unwrap(), c);
    }

    #[test]
    fn prior_and_gain_round_trip() {
        let p = Prior::new(Label::seq(&["a", "b"]).unwrap(), vec![0.1, 0.9]).unwrap();
        assert_eq!(Prior::from_json(&p.to_json().unwrap()).unwrap(), p);
        let g = GainMatrix::identity(Label::seq(&["a", "b"]).unwrap()).unwrap();
        assert_eq!(GainMatrix::from_json(&g.to_json().unwrap()).unwrap(), g);
    }

    #[test]
    fn non_stochastic_json_rejected() {
        let bad = r#"{"rows":["a"],"cols":["x","y"],"entries":[[0.5,0.6]]}"#;
        assert!(matches!(Channel::from_json(bad), Err(Error::NonStochasticRow { .. })));
    }
}
