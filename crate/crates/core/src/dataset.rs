//! Sparse binary-labelled datasets in svmlight / LIBSVM format.
//!
//! Feature indices are 1-based in the text format and 0-based everywhere in
//! this crate. Absent entries are implicit zeros.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use flate2::read::MultiGzDecoder;

use crate::assessor::Stump;
use crate::error::{Error, Result};

/// A class label, always `+1` or `-1`.
pub type Label = i8;

/// Column-oriented sparse example matrix with binary labels.
///
/// Rows are kept as well (CSR) so that single examples can be evaluated
/// without scanning columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n_features: usize,
    labels: Vec<Label>,
    row_ptr: Vec<usize>,
    row_idx: Vec<u32>,
    row_val: Vec<f64>,
    columns: Vec<Vec<(u32, f64)>>,
}

impl Dataset {
    /// Builds a dataset from per-example sparse rows.
    ///
    /// Each row must list strictly increasing 0-based feature indices.
    pub fn from_rows(
        labels: Vec<Label>,
        rows: Vec<Vec<(usize, f64)>>,
        declared_dim: Option<usize>,
    ) -> Result<Self> {
        if labels.len() != rows.len() {
            return Err(Error::arg("label count differs from row count"));
        }
        if labels.is_empty() {
            return Err(Error::parse(0, "empty input"));
        }
        if labels.iter().any(|&y| y != 1 && y != -1) {
            return Err(Error::arg("labels must be +1 or -1"));
        }
        let mut n_features = declared_dim.unwrap_or(0);
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut row_idx = Vec::new();
        let mut row_val = Vec::new();
        row_ptr.push(0);
        for (i, row) in rows.iter().enumerate() {
            for (pos, &(k, v)) in row.iter().enumerate() {
                if pos > 0 && row[pos - 1].0 >= k {
                    return Err(Error::arg(format!(
                        "feature indices of example {i} are not strictly increasing"
                    )));
                }
                if !v.is_finite() {
                    return Err(Error::arg(format!("non-finite value in example {i}")));
                }
                n_features = n_features.max(k + 1);
                row_idx.push(k as u32);
                row_val.push(v);
            }
            row_ptr.push(row_idx.len());
        }
        let mut columns = vec![Vec::new(); n_features];
        for i in 0..labels.len() {
            for p in row_ptr[i]..row_ptr[i + 1] {
                columns[row_idx[p] as usize].push((i as u32, row_val[p]));
            }
        }
        Ok(Dataset {
            n_features,
            labels,
            row_ptr,
            row_idx,
            row_val,
            columns,
        })
    }

    /// Loads an svmlight file; names ending in `.gz` are decompressed.
    pub fn load(path: impl AsRef<Path>, declared_dim: Option<usize>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path)?;
        let reader: Box<dyn Read> = if path.extension().is_some_and(|e| e == "gz") {
            Box::new(MultiGzDecoder::new(file))
        } else {
            Box::new(file)
        };
        parse_svmlight(BufReader::new(reader), declared_dim)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    /// Explicit entries of feature `k`, as `(example, value)` sorted by example.
    pub fn column(&self, k: usize) -> &[(u32, f64)] {
        &self.columns[k]
    }

    /// Explicit entries of example `i`, as `(feature, value)`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.row_idx[span.clone()]
            .iter()
            .zip(&self.row_val[span])
            .map(|(&k, &v)| (k as usize, v))
    }

    /// `x_i[k]`, zero when absent.
    pub fn value(&self, i: usize, k: usize) -> f64 {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        let idx = &self.row_idx[span.clone()];
        match idx.binary_search(&(k as u32)) {
            Ok(p) => self.row_val[span.start + p],
            Err(_) => 0.0,
        }
    }

    /// Explicit entries of column `k` restricted to the members of `view`.
    pub fn column_values(&self, k: usize, view: &ExampleView<'_>) -> Result<Vec<(u32, f64)>> {
        if k >= self.n_features {
            return Err(Error::arg(format!(
                "feature {} out of range (dataset has {})",
                k + 1,
                self.n_features
            )));
        }
        let mut member = vec![false; self.len()];
        for &i in view.members() {
            member[i as usize] = true;
        }
        Ok(self.columns[k]
            .iter()
            .copied()
            .filter(|&(i, _)| member[i as usize])
            .collect())
    }

    /// Serializes back to svmlight text with 1-based feature indices.
    pub fn to_svmlight(&self) -> String {
        let mut out = String::new();
        for i in 0..self.len() {
            out.push_str(if self.labels[i] > 0 { "+1" } else { "-1" });
            for (k, v) in self.row(i) {
                let _ = write!(out, " {}:{}", k + 1, v);
            }
            out.push('\n');
        }
        out
    }
}

/// Parses svmlight text: `<label> <index>:<value> ...` per line.
///
/// Positive labels map to `+1`, everything else to `-1`. Text after `#` is a
/// comment. `declared_dim` raises the feature count above the largest index
/// seen.
pub fn parse_svmlight<R: BufRead>(reader: R, declared_dim: Option<usize>) -> Result<Dataset> {
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let content = match line.find('#') {
            Some(p) => &line[..p],
            None => &line[..],
        };
        let mut tokens = content.split_whitespace();
        let Some(label_tok) = tokens.next() else {
            continue;
        };
        let label: f64 = label_tok
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad label '{label_tok}'")))?;
        if label.is_nan() {
            return Err(Error::parse(lineno, "label is NaN"));
        }
        let mut row: Vec<(usize, f64)> = Vec::new();
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| Error::parse(lineno, format!("malformed token '{tok}'")))?;
            let idx: i64 = idx
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad feature index in '{tok}'")))?;
            if idx <= 0 {
                return Err(Error::parse(
                    lineno,
                    format!("feature index {idx} is not positive"),
                ));
            }
            let val: f64 = val
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad feature value in '{tok}'")))?;
            if !val.is_finite() {
                return Err(Error::parse(lineno, format!("non-finite value in '{tok}'")));
            }
            let k = (idx - 1) as usize;
            if let Some(&(prev, _)) = row.last() {
                if k <= prev {
                    return Err(Error::parse(
                        lineno,
                        format!(
                            "feature indices not increasing ({} after {})",
                            k + 1,
                            prev + 1
                        ),
                    ));
                }
            }
            row.push((k, val));
        }
        labels.push(if label > 0.0 { 1 } else { -1 });
        rows.push(row);
    }
    if labels.is_empty() {
        return Err(Error::parse(0, "empty input"));
    }
    Dataset::from_rows(labels, rows, declared_dim)
}

/// An ordered, duplicate-free subset of a dataset's examples.
#[derive(Debug, Clone)]
pub struct ExampleView<'a> {
    base: &'a Dataset,
    members: Vec<u32>,
}

impl<'a> ExampleView<'a> {
    pub fn full(base: &'a Dataset) -> Self {
        ExampleView {
            base,
            members: (0..base.len() as u32).collect(),
        }
    }

    pub fn new(base: &'a Dataset, members: Vec<u32>) -> Result<Self> {
        let mut seen = vec![false; base.len()];
        for &i in &members {
            let slot = seen
                .get_mut(i as usize)
                .ok_or_else(|| Error::arg(format!("example {i} out of range")))?;
            if *slot {
                return Err(Error::arg(format!("example {i} listed twice")));
            }
            *slot = true;
        }
        Ok(ExampleView { base, members })
    }

    pub(crate) fn new_unchecked(base: &'a Dataset, members: Vec<u32>) -> Self {
        ExampleView { base, members }
    }

    pub fn base(&self) -> &'a Dataset {
        self.base
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Partitions the view by `stump`: members predicted `+1` first, `-1` second.
    /// Both halves keep the input order.
    pub fn split(&self, stump: &Stump) -> Result<(ExampleView<'a>, ExampleView<'a>)> {
        if stump.feature >= self.base.n_features() {
            return Err(Error::arg(format!(
                "stump feature {} out of range",
                stump.feature + 1
            )));
        }
        let (pos, neg): (Vec<u32>, Vec<u32>) = self
            .members
            .iter()
            .partition(|&&i| stump.predict_value(self.base.value(i as usize, stump.feature)) > 0);
        Ok((
            ExampleView::new_unchecked(self.base, pos),
            ExampleView::new_unchecked(self.base, neg),
        ))
    }
}
