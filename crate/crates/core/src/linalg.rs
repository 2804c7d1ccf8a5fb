//! Small dense linear-algebra helpers over complex matrices.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::{CMat, CVec, C64};

/// Hermitian part `(M + Mᴴ)/2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Largest entrywise modulus of `M − Mᴴ`.
pub fn asymmetry(m: &CMat) -> f64 {
    let d = m - m.adjoint();
    d.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest entrywise modulus of a matrix.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Eigen-decomposition of a Hermitian matrix (the strict lower triangle is
/// ignored after symmetrization).
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// Symmetrizes and floors the spectrum at zero. Returns the repaired matrix
/// and the most negative eigenvalue seen before flooring.
pub fn psd_repair(m: &CMat) -> (CMat, f64) {
    let h = hermitian_part(m);
    let (vals, vecs) = hermitian_eigen(&h);
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    if min >= 0.0 {
        return (h, min);
    }
    let n = h.nrows();
    let mut out = CMat::zeros(n, n);
    for (i, &lam) in vals.iter().enumerate() {
        if lam <= 0.0 {
            continue;
        }
        let v = vecs.column(i);
        out += (&v * v.adjoint()).scale(lam);
    }
    (out, min)
}

/// Hermitian quadratic form `xᴴ M x` (real part).
pub fn quad_form(m: &CMat, x: &CVec) -> f64 {
    x.dotc(&(m * x)).re
}

/// Solves `G x = b` for Hermitian positive semidefinite `G` using the
/// minimum-norm pseudo-inverse on the numerically nonzero spectrum.
/// Returns `None` when `b` has a component along a (numerically) zero
/// eigenvector, i.e. the associated quadratic is unbounded below.
pub fn psd_solve(g: &CMat, b: &CVec) -> Option<CVec> {
    if let Some(chol) = g.clone().cholesky() {
        let d = chol.l_dirty().diagonal();
        let (lo, hi) = d.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), z| (lo.min(z.re), hi.max(z.re)));
        // Cholesky of a nearly singular matrix inflates null-space components.
        if lo > 1e-6 * hi {
            let x = chol.solve(b);
            if x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Some(x);
            }
        }
    }
    let (vals, vecs) = hermitian_eigen(g);
    let scale = vals.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let thr = scale * 1e-12;
    let bnorm = b.norm();
    let mut x = CVec::zeros(g.nrows());
    for (i, &lam) in vals.iter().enumerate() {
        let v = vecs.column(i);
        let c = v.dotc(b);
        if lam > thr {
            x += v.scale(1.0) * (c / lam);
        } else if c.norm() > 1e-10 * bnorm.max(1e-300) {
            return None;
        }
    }
    Some(x)
}

/// Moore-Penrose pseudo-inverse.
pub fn pinv(m: &CMat) -> CMat {
    if m.nrows() == 0 || m.ncols() == 0 {
        return CMat::zeros(m.ncols(), m.nrows());
    }
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &s| a.max(s));
    let eps = smax * 1e-12 * (m.nrows().max(m.ncols()) as f64);
    svd.pseudo_inverse(eps.max(f64::MIN_POSITIVE))
        .unwrap_or_else(|_| CMat::zeros(m.ncols(), m.nrows()))
}

/// Squared Frobenius norm.
pub fn fro2(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// Elementwise squared modulus.
pub fn abs2(m: &CMat) -> DMatrix<f64> {
    m.map(|z| z.norm_sqr())
}

/// Unit-modulus complex number with the phase of `z`, or `fallback` when `z` is zero.
pub fn unit_phase(z: C64, fallback: C64) -> C64 {
    let r = z.norm();
    if r > 0.0 && r.is_finite() {
        z / r
    } else {
        fallback
    }
}
