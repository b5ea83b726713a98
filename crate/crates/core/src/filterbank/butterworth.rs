//! Butterworth band-pass design as cascaded second-order sections.
//!
//! The analog low-pass prototype of order `N` is mapped to a band-pass of
//! order `2N` around the prewarped edges and discretised with the bilinear
//! transform. Every prototype pole yields two band-pass poles; each is paired
//! with its conjugate into one section whose numerator is `1 - z^-2`.

use std::f64::consts::PI;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use super::BandSpec;
use crate::error::{Error, Result};

type C64 = Complex<f64>;

/// Prototype order of every subband filter.
pub const BUTTERWORTH_ORDER: usize = 8;

/// One biquad `(b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sos {
    pub b: [f64; 3],
    pub a: [f64; 3],
}

impl Sos {
    fn response(&self, z_inv: C64) -> C64 {
        let z2 = z_inv * z_inv;
        (z_inv * self.b[1] + z2 * self.b[2] + self.b[0]) / (z_inv * self.a[1] + z2 * self.a[2] + self.a[0])
    }

    /// Poles of the section (roots of `z^2 + a1 z + a2`).
    pub fn poles(&self) -> [C64; 2] {
        let (a1, a2) = (self.a[1], self.a[2]);
        let disc = C64::new(a1 * a1 - 4.0 * a2, 0.0).sqrt();
        [(-disc - a1) * 0.5, (disc - a1) * 0.5]
    }

    /// DC gain `H(1)`.
    fn dc_gain(&self) -> f64 {
        let den = self.a.iter().sum::<f64>();
        self.b.iter().sum::<f64>() / den
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandDesign {
    pub band: BandSpec,
    pub fs: f64,
    pub order: usize,
    pub sections: Vec<Sos>,
}

pub fn design_butterworth(band: &BandSpec, fs: f64) -> Result<BandDesign> {
    design_bandpass(band, fs, BUTTERWORTH_ORDER)
}

pub fn design_bandpass(band: &BandSpec, fs: f64, order: usize) -> Result<BandDesign> {
    let nyq = fs / 2.0;
    if !(fs > 0.0) {
        return Err(Error::FilterDesign(format!("sampling rate {fs} must be positive")));
    }
    if band.high_hz >= nyq {
        return Err(Error::FilterDesign(format!(
            "band edge {} Hz is not below Nyquist ({nyq} Hz)",
            band.high_hz
        )));
    }
    if !(band.low_hz > 0.0 && band.low_hz < band.high_hz) {
        return Err(Error::FilterDesign(format!("degenerate band {}", band.label())));
    }
    if order == 0 || order % 2 == 1 {
        return Err(Error::FilterDesign(format!("prototype order {order} must be even")));
    }

    let k = 2.0 * fs;
    let w1 = k * (PI * band.low_hz / fs).tan();
    let w2 = k * (PI * band.high_hz / fs).tan();
    let bw = w2 - w1;
    let w0_sq = w1 * w2;
    // digital centre frequency where the analog response is exactly 1
    let centre = 2.0 * (w0_sq.sqrt() / k).atan();
    let z_centre_inv = C64::from_polar(1.0, -centre);

    let mut sections = Vec::with_capacity(order);
    for i in 0..order / 2 {
        let theta = PI * (2 * i + order + 1) as f64 / (2 * order) as f64;
        let p = C64::from_polar(1.0, theta);
        let half = p * (bw / 2.0);
        let root = (half * half - w0_sq).sqrt();
        for s in [half + root, half - root] {
            let z = (s + k) / (-s + k);
            let mut sos = Sos {
                b: [1.0, 0.0, -1.0],
                a: [1.0, -2.0 * z.re, z.norm_sqr()],
            };
            let g = sos.response(z_centre_inv).norm();
            for b in &mut sos.b {
                *b /= g;
            }
            sections.push(sos);
        }
    }
    let design = BandDesign {
        band: *band,
        fs,
        order,
        sections,
    };
    if design.max_pole_radius() >= 1.0 {
        return Err(Error::FilterDesign(format!(
            "unstable design for {}",
            band.label()
        )));
    }
    Ok(design)
}

impl BandDesign {
    /// Magnitude of the single-pass response at `f_hz`.
    pub fn magnitude(&self, f_hz: f64) -> f64 {
        let z_inv = C64::from_polar(1.0, -2.0 * PI * f_hz / self.fs);
        self.sections
            .iter()
            .map(|s| s.response(z_inv))
            .fold(C64::new(1.0, 0.0), |acc, h| acc * h)
            .norm()
    }

    pub fn poles(&self) -> Vec<C64> {
        self.sections.iter().flat_map(|s| s.poles()).collect()
    }

    pub fn max_pole_radius(&self) -> f64 {
        self.poles().iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    /// Causal cascade in transposed direct form II. The state starts at the
    /// steady state for a constant input equal to `x[0]`.
    pub fn filter_in_place(&self, x: &mut [f64]) {
        if x.is_empty() {
            return;
        }
        let mut level = x[0];
        for s in &self.sections {
            let h = s.dc_gain();
            let mut z2 = (s.b[2] - s.a[2] * h) * level;
            let mut z1 = (s.b[1] - s.a[1] * h) * level + z2;
            let [b0, b1, b2] = s.b;
            let [_, a1, a2] = s.a;
            for v in x.iter_mut() {
                let u = *v;
                let y = b0 * u + z1;
                z1 = b1 * u - a1 * y + z2;
                z2 = b2 * u - a2 * y;
                *v = y;
            }
            level *= h;
        }
    }

    /// Zero-phase forward-backward filtering with `pad` samples of mirror
    /// padding on each side.
    pub fn filtfilt(&self, x: &[f64], pad: usize) -> Vec<f64> {
        let n = x.len();
        if n == 0 {
            return Vec::new();
        }
        let mut ext: Vec<f64> = (0..n + 2 * pad)
            .map(|i| odd_extension(x, i as isize - pad as isize))
            .collect();
        self.filter_in_place(&mut ext);
        ext.reverse();
        self.filter_in_place(&mut ext);
        ext.reverse();
        ext[pad..pad + n].to_vec()
    }
}

/// Point-symmetric continuation of `x` about its end samples, repeated as often
/// as needed: each mirror image is flipped around the boundary value, so a
/// smooth signal stays smooth (up to a linear drift the band-pass removes).
fn odd_extension(x: &[f64], i: isize) -> f64 {
    let n = x.len();
    if n == 1 {
        return x[0];
    }
    let last = n as isize - 1;
    let period = 2 * last;
    let shift = i.div_euclid(period);
    let j = i.rem_euclid(period);
    // each full period adds twice the end-to-end rise
    let drift = 2.0 * (x[n - 1] - x[0]) * shift as f64;
    let base = if j <= last {
        x[j as usize]
    } else {
        2.0 * x[n - 1] - x[(period - j) as usize]
    };
    base + drift
}
