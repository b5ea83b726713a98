//! Canonical correlation analysis on spatially filtered signals.
//!
//! Signals are held as `p × n` matrices (one row per spatial component), so
//! every quantity reduces to `p × p` Gram matrices and row sums.

use nalgebra::{DMatrix, DVector};

use super::geneig::symmetric_eigen;

use super::geneig::{orient_columns, symmetrize};

/// Eigenvalues below this fraction of the largest one are dropped when whitening.
pub const WHITEN_CUTOFF: f64 = 1e-10;

/// Second-order statistics of one projected signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub n: usize,
    pub sum: DVector<f64>,
    pub gram: DMatrix<f64>,
}

impl Moments {
    pub fn of(p: &DMatrix<f64>) -> Self {
        Moments {
            n: p.ncols(),
            sum: row_sums(p),
            gram: cross_gram(p, p),
        }
    }

    pub fn covariance(&self) -> DMatrix<f64> {
        let mut c = centred(&self.gram, &self.sum, &self.sum, self.n);
        symmetrize(&mut c);
        c
    }
}

/// `a bᵀ` for two signals with the same number of samples.
pub fn cross_gram(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b.transpose()
}

pub fn row_sums(p: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(p.nrows(), p.row_iter().map(|r| r.sum()))
}

/// Product of two small matrices by plain loops; avoids the setup cost of a
/// blocked kernel on the p × p work inside feature extraction.
fn mul_small(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, k, m) = (a.nrows(), a.ncols(), b.ncols());
    debug_assert_eq!(k, b.nrows());
    let (sa, sb) = (a.as_slice(), b.as_slice());
    let mut out = vec![0.0; n * m];
    for (dst, bj) in out.chunks_exact_mut(n.max(1)).zip(sb.chunks_exact(k.max(1))) {
        for (al, &y) in sa.chunks_exact(n.max(1)).zip(bj) {
            for (o, &x) in dst.iter_mut().zip(al) {
                *o += x * y;
            }
        }
    }
    DMatrix::from_vec(n, m, out)
}

/// `Σ_c b_cᵀ G b_c` over the columns of `b`, i.e. `tr(Bᵀ G B)`.
fn quad_trace(b: &DMatrix<f64>, g: &DMatrix<f64>) -> f64 {
    let p = g.nrows();
    if p == 0 {
        return 0.0;
    }
    let gs = g.as_slice();
    b.as_slice()
        .chunks_exact(p)
        .map(|bc| {
            gs.chunks_exact(p)
                .zip(bc)
                .map(|(gj, &y)| y * gj.iter().zip(bc).map(|(x, z)| x * z).sum::<f64>())
                .sum::<f64>()
        })
        .sum()
}

fn centred(raw: &DMatrix<f64>, sa: &DVector<f64>, sb: &DVector<f64>, n: usize) -> DMatrix<f64> {
    let nf = n as f64;
    DMatrix::from_fn(raw.nrows(), raw.ncols(), |i, j| (raw[(i, j)] - sa[i] * sb[j] / nf) / (nf - 1.0))
}

/// Whitening transform `K` with `Kᵀ C K = I` on the retained subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct Whitener {
    pub k: DMatrix<f64>,
}

impl Whitener {
    pub fn new(cov: &DMatrix<f64>) -> Self {
        let p = cov.nrows();
        if cov.iter().any(|v| !v.is_finite()) {
            return Whitener { k: DMatrix::zeros(p, 0) };
        }
        if let Some(k) = cholesky_whitener(cov) {
            return Whitener { k };
        }
        let (values, vectors) = symmetric_eigen(cov.clone());
        let top = values.iter().copied().fold(0.0, f64::max);
        if !(top > 0.0) {
            return Whitener { k: DMatrix::zeros(p, 0) };
        }
        let keep = values.iter().take_while(|&&v| v > WHITEN_CUTOFF * top).count();
        let k = DMatrix::from_fn(p, keep, |r, c| vectors[(r, c)] / values[c].sqrt());
        Whitener { k }
    }

    pub fn rank(&self) -> usize {
        self.k.ncols()
    }
}

/// `L⁻ᵀ` from `C = L Lᵀ`, or `None` unless `tr(C) ‖L⁻¹‖²_F < 1 / WHITEN_CUTOFF`,
/// which bounds the condition number so the eigen route would keep every direction.
fn cholesky_whitener(cov: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let p = cov.nrows();
    let l = cov.clone().cholesky()?.unpack();
    let inv = l.solve_lower_triangular(&DMatrix::identity(p, p))?;
    let bound = cov.trace() * inv.norm_squared();
    (bound.is_finite() && bound * WHITEN_CUTOFF < 1.0).then(|| inv.transpose())
}

#[derive(Debug, Clone)]
pub struct CcaFit {
    /// Right-side projection, one column per canonical pair.
    pub b: DMatrix<f64>,
    /// Canonical correlations in descending order.
    pub correlations: Vec<f64>,
}

/// CCA between two signals given their moments, the raw cross Gram `u vᵀ`
/// and a whitener for the right side.
pub fn cca(u: &Moments, v: &Moments, cross: &DMatrix<f64>, v_white: &Whitener) -> CcaFit {
    cca_whitened(u, &Whitener::new(&u.covariance()), v, cross, v_white)
}

/// [`cca`] with the left whitener supplied by the caller.
pub fn cca_whitened(u: &Moments, u_white: &Whitener, v: &Moments, cross: &DMatrix<f64>, v_white: &Whitener) -> CcaFit {
    let p = v.gram.nrows();
    let r = u_white.rank().min(v_white.rank());
    if r == 0 {
        return CcaFit {
            b: DMatrix::zeros(p, 0),
            correlations: Vec::new(),
        };
    }
    let cuv = centred(cross, &u.sum, &v.sum, u.n);
    let m = mul_small(&u_white.k.transpose(), &mul_small(&cuv, &v_white.k));
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    order.truncate(r);
    let rot = DMatrix::from_fn(v_white.rank(), r, |i, c| vt[(order[c], i)]);
    let mut b = mul_small(&v_white.k, &rot);
    orient_columns(&mut b);
    let correlations = order
        .iter()
        .map(|&i| svd.singular_values[i].clamp(0.0, 1.0))
        .collect();
    CcaFit { b, correlations }
}

/// Pearson correlation between the flattened projections `Bᵀu` and `Bᵀv`.
/// Zero when either side has no variance.
pub fn projected_correlation(u: &Moments, v: &Moments, cross: &DMatrix<f64>, b: Option<&DMatrix<f64>>) -> f64 {
    let (saa, sbb, sab, sa, sb, r) = match b {
        Some(b) => (
            quad_trace(b, &u.gram),
            quad_trace(b, &v.gram),
            quad_trace(b, cross),
            b.tr_mul(&u.sum).sum(),
            b.tr_mul(&v.sum).sum(),
            b.ncols(),
        ),
        None => (
            u.gram.trace(),
            v.gram.trace(),
            cross.trace(),
            u.sum.sum(),
            v.sum.sum(),
            u.gram.nrows(),
        ),
    };
    let count = (u.n * r) as f64;
    if r == 0 {
        return 0.0;
    }
    let cov = sab - sa * sb / count;
    let va = saa - sa * sa / count;
    let vb = sbb - sb * sb / count;
    let scale = saa.abs().max(sbb.abs()).max(f64::MIN_POSITIVE);
    if va <= 1e-14 * scale || vb <= 1e-14 * scale {
        return 0.0;
    }
    let rho = cov / (va.sqrt() * vb.sqrt());
    if rho.is_finite() {
        rho.clamp(-1.0, 1.0)
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(p: usize, n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        DMatrix::from_fn(p, n, |_, _| rng.gen_range(-1.0..1.0))
    }

    /// CCA by orthonormalising both centred sides with QR; independent of the
    /// covariance whitening route.
    fn qr_canonical_correlations(u: &DMatrix<f64>, v: &DMatrix<f64>) -> Vec<f64> {
        let centre = |m: &DMatrix<f64>| {
            let mut c = m.transpose();
            for mut col in c.column_iter_mut() {
                let mean = col.mean();
                col.add_scalar_mut(-mean);
            }
            c
        };
        let qu = centre(u).qr().q();
        let qv = centre(v).qr().q();
        let mut s: Vec<f64> = (qu.transpose() * qv).singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    #[test]
    fn canonical_correlations_match_qr_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let u = random(4, 200, &mut rng);
            let mix = random(4, 4, &mut rng);
            let v = &mix * &u + random(4, 200, &mut rng) * 0.7;
            let (mu, mv) = (Moments::of(&u), Moments::of(&v));
            let fit = cca(&mu, &mv, &(&u * v.transpose()), &Whitener::new(&mv.covariance()));
            let want = qr_canonical_correlations(&u, &v);
            assert_eq!(fit.correlations.len(), 4);
            for (a, b) in fit.correlations.iter().zip(&want) {
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
            for w in fit.correlations.windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn rank_deficient_side_reduces_component_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let base = random(2, 100, &mut rng);
        let mix = random(4, 2, &mut rng);
        let u = &mix * &base;
        let v = random(4, 100, &mut rng);
        let (mu, mv) = (Moments::of(&u), Moments::of(&v));
        let fit = cca(&mu, &mv, &(&u * v.transpose()), &Whitener::new(&mv.covariance()));
        assert_eq!(fit.correlations.len(), 2);
        let rho = projected_correlation(&mu, &mv, &(&u * v.transpose()), Some(&fit.b));
        assert!(rho.is_finite());
    }

    #[test]
    fn cholesky_and_eigen_whiteners_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let u = random(5, 60, &mut rng);
        let v = random(5, 60, &mut rng) + &u * 0.7;
        let (mu, mv) = (Moments::of(&u), Moments::of(&v));
        let cov = mu.covariance();
        let chol = Whitener::new(&cov);
        let (values, vectors) = symmetric_eigen(cov.clone());
        let eig = Whitener {
            k: DMatrix::from_fn(5, 5, |r, c| vectors[(r, c)] / values[c].sqrt()),
        };
        for w in [&chol, &eig] {
            assert!((w.k.transpose() * &cov * &w.k - DMatrix::identity(5, 5)).amax() < 1e-10);
        }
        let cross = &u * v.transpose();
        let vw = Whitener::new(&mv.covariance());
        let a = cca_whitened(&mu, &chol, &mv, &cross, &vw);
        let b = cca_whitened(&mu, &eig, &mv, &cross, &vw);
        for (x, y) in a.correlations.iter().zip(&b.correlations) {
            assert!((x - y).abs() < 1e-10);
        }
        assert!((a.b.clone() - &b.b).amax() < 1e-8);
    }

    #[test]
    fn constant_side_gives_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = DMatrix::from_element(3, 50, 1.5);
        let v = random(3, 50, &mut rng);
        let (mu, mv) = (Moments::of(&u), Moments::of(&v));
        let cross = &u * v.transpose();
        assert_eq!(projected_correlation(&mu, &mv, &cross, None), 0.0);
        let fit = cca(&mu, &mv, &cross, &Whitener::new(&mv.covariance()));
        assert!(fit.correlations.is_empty());
        assert_eq!(projected_correlation(&mu, &mv, &cross, Some(&fit.b)), 0.0);
    }

    #[test]
    fn flattened_correlation_matches_direct_pearson() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = random(3, 40, &mut rng).add_scalar(0.3);
        let v = &u * 0.5 + random(3, 40, &mut rng);
        let got = projected_correlation(&Moments::of(&u), &Moments::of(&v), &(&u * v.transpose()), None);
        let (a, b) = (u.as_slice(), v.as_slice());
        let n = a.len() as f64;
        let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
        let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
        assert!((got - cov / (va * vb).sqrt()).abs() < 1e-12);
    }
}
