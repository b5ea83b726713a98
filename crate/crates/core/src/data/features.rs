//! Feature table CSV: one header row of `b<band>_<kind>` names plus `label`.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use super::{FeatureColumn, FeatureMatrix};
use crate::error::{Error, Result};

pub fn export_features(f: &FeatureMatrix, path: &Path) -> Result<()> {
    if f.n_trials() == 0 {
        return Err(Error::Dimension("cannot export an empty trial set".into()));
    }
    let mut out = String::new();
    for c in f.columns() {
        out.push_str(&c.header());
        out.push(',');
    }
    out.push_str("label\n");
    for i in 0..f.n_trials() {
        for j in 0..f.n_features() {
            out.push_str(&format!("{:.16e},", f.values()[(i, j)]));
        }
        out.push_str(&format!("{}\n", f.labels()[i]));
    }
    fs::write(path, out).map_err(|err| Error::io(path, err))
}

pub fn import_features(path: &Path) -> Result<FeatureMatrix> {
    let text = fs::read_to_string(path).map_err(|err| Error::io(path, err))?;
    let bad = |reason: String| Error::Csv {
        path: path.to_path_buf(),
        reason,
    };
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
    let names: Vec<&str> = header.split(',').collect();
    if names.last() != Some(&"label") {
        return Err(bad("last column must be `label`".into()));
    }
    let columns = names[..names.len() - 1]
        .iter()
        .map(|n| FeatureColumn::parse_header(n).ok_or_else(|| bad(format!("bad column `{n}`"))))
        .collect::<Result<Vec<_>>>()?;
    let d = columns.len();
    let mut data = Vec::new();
    let mut labels = Vec::new();
    for (ln, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != d + 1 {
            return Err(bad(format!("row {} has {} fields", ln + 2, fields.len())));
        }
        for f in &fields[..d] {
            data.push(
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| bad(format!("bad value `{f}` on row {}", ln + 2)))?,
            );
        }
        labels.push(
            fields[d]
                .trim()
                .parse::<u8>()
                .map_err(|_| bad(format!("bad label on row {}", ln + 2)))?,
        );
    }
    let values = DMatrix::from_row_slice(labels.len(), d, &data);
    FeatureMatrix::new(values, columns, labels)
}
