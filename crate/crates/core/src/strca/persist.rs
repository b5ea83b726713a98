//! Model storage: a JSON header next to a little-endian f64 payload holding
//! the filters and both templates, each in column-major order.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::StrcaModel;
use crate::error::{Error, Result};

const HEADER: &str = "model.json";
const PAYLOAD: &str = "model.bin";

#[derive(Serialize, Deserialize)]
struct Header {
    n_channels: usize,
    n_samples: usize,
    n_components: usize,
    eigenvalues: Vec<f64>,
    payload: String,
}

pub fn save_model(model: &StrcaModel, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let header = Header {
        n_channels: model.n_channels(),
        n_samples: model.n_samples(),
        n_components: model.n_components(),
        eigenvalues: model.eigenvalues().to_vec(),
        payload: PAYLOAD.into(),
    };
    let json = serde_json::to_string_pretty(&header).expect("header serialises");
    let hp = dir.join(HEADER);
    fs::write(&hp, json).map_err(|e| Error::io(&hp, e))?;
    let mut bytes = Vec::new();
    for m in [model.filters(), &model.templates()[0], &model.templates()[1]] {
        for v in m.iter() {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    let bp = dir.join(PAYLOAD);
    fs::write(&bp, bytes).map_err(|e| Error::io(&bp, e))
}

pub fn load_model(dir: &Path) -> Result<StrcaModel> {
    let hp = dir.join(HEADER);
    let text = fs::read_to_string(&hp).map_err(|e| Error::io(&hp, e))?;
    let h: Header = serde_json::from_str(&text).map_err(|e| Error::Sidecar {
        path: hp.clone(),
        reason: e.to_string(),
    })?;
    let bp = dir.join(&h.payload);
    let bytes = fs::read(&bp).map_err(|e| Error::io(&bp, e))?;
    let (nc, ns, p) = (h.n_channels, h.n_samples, 2 * h.n_components);
    let want = 8 * (nc * p + 2 * nc * ns);
    if bytes.len() != want {
        return Err(Error::Dimension(format!(
            "model payload has {} bytes, expected {want}",
            bytes.len()
        )));
    }
    let mut values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")));
    let mut take = |r: usize, c: usize| DMatrix::from_iterator(r, c, values.by_ref().take(r * c));
    let filters = take(nc, p);
    let t1 = take(nc, ns);
    let t2 = take(nc, ns);
    StrcaModel::from_parts(filters, [t1, t2], h.eigenvalues, h.n_components)
}
