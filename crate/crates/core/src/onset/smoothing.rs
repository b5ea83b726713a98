use crate::error::{Error, Result};

/// First-order Savitzky–Golay smoother.
///
/// Interior points are the window mean (the value of the least-squares line at
/// the window centre). The first and last `window / 2` points are taken from a
/// line fitted to the first and last `window` samples respectively.
pub fn savgol_order1(x: &[f64], window: usize) -> Result<Vec<f64>> {
    if window < 3 || window % 2 == 0 {
        return Err(Error::InvalidParameter(format!(
            "smoothing window must be odd and at least 3, got {window}"
        )));
    }
    let n = x.len();
    if window > n {
        return Err(Error::InvalidParameter(format!(
            "smoothing window {window} longer than signal of {n} samples"
        )));
    }
    let half = window / 2;
    let mut out = vec![0.0; n];

    let mut acc: f64 = x[..window].iter().sum();
    out[half] = acc / window as f64;
    for i in half + 1..n - half {
        acc += x[i + half] - x[i - half - 1];
        out[i] = acc / window as f64;
    }

    let (head_slope, head_icpt) = line_fit(&x[..window]);
    for (i, o) in out.iter_mut().enumerate().take(half) {
        *o = head_icpt + head_slope * i as f64;
    }
    let start = n - window;
    let (tail_slope, tail_icpt) = line_fit(&x[start..]);
    for i in n - half..n {
        out[i] = tail_icpt + tail_slope * (i - start) as f64;
    }
    Ok(out)
}

/// Least-squares line through `(i, y[i])`; returns (slope, intercept).
fn line_fit(y: &[f64]) -> (f64, f64) {
    let n = y.len() as f64;
    let xm = (n - 1.0) / 2.0;
    let ym = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (i, v) in y.iter().enumerate() {
        let dx = i as f64 - xm;
        sxy += dx * (v - ym);
        sxx += dx * dx;
    }
    let slope = sxy / sxx;
    (slope, ym - slope * xm)
}

pub fn first_difference(x: &[f64]) -> Vec<f64> {
    x.windows(2).map(|w| w[1] - w[0]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lines_are_preserved_exactly() {
        let x: Vec<f64> = (0..50).map(|i| 2.0 - 0.3 * i as f64).collect();
        let y = savgol_order1(&x, 7).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_windows() {
        let x = vec![0.0; 10];
        assert!(savgol_order1(&x, 4).is_err());
        assert!(savgol_order1(&x, 1).is_err());
        assert!(savgol_order1(&x, 11).is_err());
        assert!(savgol_order1(&x, 9).is_ok());
    }
}
