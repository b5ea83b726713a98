//! On-disk epoch format.
//!
//! Each class lives in its own directory holding an `epochs.json` sidecar and
//! either `epochs.bin` (little-endian f64, channel-major: index
//! `(c * n_samples + s) * n_trials + t`) or `epochs.csv` for small fixtures
//! (header `trial,channel,s0,...`, one row per trial and channel).

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{ClassLabel, EpochSet};
use crate::error::{Error, Result};

const SIDECAR: &str = "epochs.json";
const BINARY: &str = "epochs.bin";
const CSV: &str = "epochs.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpochFormat {
    PackedBinary,
    CsvDir,
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    n_channels: usize,
    n_samples: usize,
    n_trials: usize,
    fs: f64,
    channel_names: Vec<String>,
    label: ClassLabel,
    window: (f64, f64),
    encoding: EpochFormat,
}

pub fn save_epochs(e: &EpochSet, dir: &Path, format: EpochFormat) -> Result<()> {
    fs::create_dir_all(dir).map_err(|err| Error::io(dir, err))?;
    let (nc, ns, nt) = (e.n_channels(), e.n_samples(), e.n_trials());
    let sidecar = Sidecar {
        n_channels: nc,
        n_samples: ns,
        n_trials: nt,
        fs: e.fs(),
        channel_names: e.channel_names().to_vec(),
        label: e.label(),
        window: e.window(),
        encoding: format,
    };
    let json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    let side_path = dir.join(SIDECAR);
    fs::write(&side_path, json + "\n").map_err(|err| Error::io(&side_path, err))?;

    match format {
        EpochFormat::PackedBinary => {
            let mut buf = Vec::with_capacity(nc * ns * nt * 8);
            for c in 0..nc {
                for s in 0..ns {
                    for t in 0..nt {
                        buf.extend_from_slice(&e.trial(t)[(c, s)].to_le_bytes());
                    }
                }
            }
            let path = dir.join(BINARY);
            fs::write(&path, buf).map_err(|err| Error::io(&path, err))
        }
        EpochFormat::CsvDir => {
            let path = dir.join(CSV);
            let mut out = String::new();
            out.push_str("trial,channel");
            for s in 0..ns {
                out.push_str(&format!(",s{s}"));
            }
            out.push('\n');
            for t in 0..nt {
                for c in 0..nc {
                    out.push_str(&format!("{t},{c}"));
                    for s in 0..ns {
                        out.push_str(&format!(",{:.16e}", e.trial(t)[(c, s)]));
                    }
                    out.push('\n');
                }
            }
            let mut f = fs::File::create(&path).map_err(|err| Error::io(&path, err))?;
            f.write_all(out.as_bytes()).map_err(|err| Error::io(&path, err))
        }
    }
}

/// Load one class directory. `format` must match the sidecar's encoding.
pub fn load_epochs(dir: &Path, format: EpochFormat) -> Result<EpochSet> {
    let side_path = dir.join(SIDECAR);
    let text = fs::read_to_string(&side_path).map_err(|err| Error::io(&side_path, err))?;
    let side: Sidecar = serde_json::from_str(&text).map_err(|err| Error::Sidecar {
        path: side_path.clone(),
        reason: err.to_string(),
    })?;
    if side.encoding != format {
        return Err(Error::Sidecar {
            path: side_path,
            reason: format!("sidecar declares {:?}, requested {:?}", side.encoding, format),
        });
    }
    let (nc, ns, nt) = (side.n_channels, side.n_samples, side.n_trials);
    let mut trials = vec![DMatrix::<f64>::zeros(nc, ns); nt];

    match format {
        EpochFormat::PackedBinary => {
            let path = dir.join(BINARY);
            let bytes = fs::read(&path).map_err(|err| Error::io(&path, err))?;
            if bytes.len() != nc * ns * nt * 8 {
                return Err(Error::Dimension(format!(
                    "{} holds {} bytes, header declares {nc}x{ns}x{nt} f64 values",
                    path.display(),
                    bytes.len()
                )));
            }
            let mut it = bytes.chunks_exact(8);
            for c in 0..nc {
                for s in 0..ns {
                    for trial in trials.iter_mut() {
                        let chunk = it.next().expect("length checked");
                        trial[(c, s)] = f64::from_le_bytes(chunk.try_into().expect("8 bytes"));
                    }
                }
            }
        }
        EpochFormat::CsvDir => {
            let path = dir.join(CSV);
            let text = fs::read_to_string(&path).map_err(|err| Error::io(&path, err))?;
            let csv_err = |reason: String| Error::Csv {
                path: path.clone(),
                reason,
            };
            let mut lines = text.lines();
            let header = lines.next().ok_or_else(|| csv_err("empty file".into()))?;
            if header.split(',').count() != ns + 2 {
                return Err(Error::Dimension(format!(
                    "csv header has {} sample columns, sidecar declares {ns}",
                    header.split(',').count().saturating_sub(2)
                )));
            }
            let mut filled = vec![false; nc * nt];
            for (ln, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
                let fields: Vec<&str> = line.split(',').collect();
                if fields.len() != ns + 2 {
                    return Err(Error::Dimension(format!(
                        "csv row {} has {} fields, expected {}",
                        ln + 2,
                        fields.len(),
                        ns + 2
                    )));
                }
                let t: usize = fields[0]
                    .trim()
                    .parse()
                    .map_err(|_| csv_err(format!("bad trial index on row {}", ln + 2)))?;
                let c: usize = fields[1]
                    .trim()
                    .parse()
                    .map_err(|_| csv_err(format!("bad channel index on row {}", ln + 2)))?;
                if t >= nt || c >= nc || filled[t * nc + c] {
                    return Err(Error::Dimension(format!(
                        "row {} addresses trial {t} channel {c} outside or twice",
                        ln + 2
                    )));
                }
                filled[t * nc + c] = true;
                for (s, f) in fields[2..].iter().enumerate() {
                    trials[t][(c, s)] = f
                        .trim()
                        .parse()
                        .map_err(|_| csv_err(format!("bad value on row {}", ln + 2)))?;
                }
            }
            if filled.iter().any(|&f| !f) {
                return Err(Error::Dimension(
                    "csv payload is missing trial/channel rows".into(),
                ));
            }
        }
    }
    if side.channel_names.len() != nc {
        return Err(Error::Sidecar {
            path: side_path,
            reason: format!("{} channel names for {nc} channels", side.channel_names.len()),
        });
    }
    EpochSet::new(trials, side.fs, side.channel_names, side.label, side.window)
}

/// Write a movement/rest pair as `<root>/movement` and `<root>/rest`.
pub fn save_dataset(root: &Path, movement: &EpochSet, rest: &EpochSet, format: EpochFormat) -> Result<()> {
    save_epochs(movement, &root.join("movement"), format)?;
    save_epochs(rest, &root.join("rest"), format)
}

/// Load a dataset written by [`save_dataset`], detecting the payload encoding.
pub fn load_dataset(root: &Path) -> Result<(EpochSet, EpochSet)> {
    let load = |name: &str| {
        let dir = root.join(name);
        let format = if dir.join(BINARY).exists() {
            EpochFormat::PackedBinary
        } else {
            EpochFormat::CsvDir
        };
        load_epochs(&dir, format)
    };
    let movement = load("movement")?;
    let rest = load("rest")?;
    if movement.label() != ClassLabel::Movement || rest.label() != ClassLabel::Rest {
        return Err(Error::InvalidParameter(
            "class directories carry mismatched labels".into(),
        ));
    }
    if movement.n_channels() != rest.n_channels()
        || movement.n_samples() != rest.n_samples()
        || movement.fs() != rest.fs()
    {
        return Err(Error::Dimension(
            "movement and rest epochs differ in shape or sampling rate".into(),
        ));
    }
    Ok((movement, rest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_set(nc: usize, ns: usize, nt: usize, seed: u64) -> EpochSet {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let trials = (0..nt)
            .map(|_| DMatrix::from_fn(nc, ns, |_, _| rng.gen_range(-1e3..1e3) * 1e-6))
            .collect();
        let names = (0..nc).map(|c| format!("ch{c}")).collect();
        EpochSet::new(trials, 256.0, names, ClassLabel::Movement, (-(ns as f64) / 256.0, 0.0)).unwrap()
    }

    #[test]
    fn eleven_by_512_by_60() {
        let dir = tempfile::tempdir().unwrap();
        let e = random_set(11, 512, 60, 1);
        save_epochs(&e, dir.path(), EpochFormat::PackedBinary).unwrap();
        let back = load_epochs(dir.path(), EpochFormat::PackedBinary).unwrap();
        assert_eq!((back.n_channels(), back.n_samples(), back.n_trials()), (11, 512, 60));
        assert_eq!(back, e);
    }

    #[test]
    fn nan_payload_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let e = random_set(2, 4, 3, 2);
        save_epochs(&e, dir.path(), EpochFormat::PackedBinary).unwrap();
        let path = dir.path().join(BINARY);
        let mut bytes = fs::read(&path).unwrap();
        bytes[8..16].copy_from_slice(&f64::NAN.to_le_bytes());
        fs::write(&path, bytes).unwrap();
        assert!(matches!(
            load_epochs(dir.path(), EpochFormat::PackedBinary),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn truncated_payload_is_a_dimension_error() {
        let dir = tempfile::tempdir().unwrap();
        let e = random_set(2, 4, 3, 3);
        save_epochs(&e, dir.path(), EpochFormat::PackedBinary).unwrap();
        let path = dir.path().join(BINARY);
        let bytes = fs::read(&path).unwrap();
        fs::write(&path, &bytes[..bytes.len() - 8]).unwrap();
        assert!(matches!(
            load_epochs(dir.path(), EpochFormat::PackedBinary),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn missing_directory() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_epochs(&dir.path().join("nope"), EpochFormat::CsvDir),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn csv_fixture_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let e = random_set(3, 8, 4, 4);
        save_epochs(&e, dir.path(), EpochFormat::CsvDir).unwrap();
        assert_eq!(load_epochs(dir.path(), EpochFormat::CsvDir).unwrap(), e);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn binary_round_trip_is_bitwise(nc in 2usize..6, ns in 1usize..40, nt in 2usize..7, seed in any::<u64>()) {
            let dir = tempfile::tempdir().unwrap();
            let e = random_set(nc, ns, nt, seed);
            save_epochs(&e, dir.path(), EpochFormat::PackedBinary).unwrap();
            let back = load_epochs(dir.path(), EpochFormat::PackedBinary).unwrap();
            for t in 0..nt {
                for (a, b) in e.trial(t).iter().zip(back.trial(t).iter()) {
                    prop_assert_eq!(a.to_bits(), b.to_bits());
                }
            }
        }
    }
}
