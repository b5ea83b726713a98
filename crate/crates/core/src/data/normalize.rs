use super::EpochSet;
use crate::error::{Error, Result};

/// Z-score every (channel, trial) series over the time axis.
///
/// Uses the `n - 1` standard deviation. A series whose spread is zero (up to
/// rounding of its mean) is reported as a degenerate channel.
pub fn zscore_normalize(e: &EpochSet) -> Result<EpochSet> {
    let ns = e.n_samples();
    if ns < 2 {
        return Err(Error::Dimension("z-scoring needs at least 2 samples".into()));
    }
    let mut out = Vec::with_capacity(e.n_trials());
    for (t, trial) in e.trials().iter().enumerate() {
        let mut z = trial.clone();
        for c in 0..trial.nrows() {
            let row = trial.row(c);
            let mean = row.sum() / ns as f64;
            let var = row.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (ns - 1) as f64;
            let sd = var.sqrt();
            if sd == 0.0 || sd <= 1e-12 * mean.abs() {
                return Err(Error::DegenerateChannel { channel: c, trial: t });
            }
            for v in z.row_mut(c).iter_mut() {
                *v = (*v - mean) / sd;
            }
        }
        out.push(z);
    }
    e.with_trials(out)
}
