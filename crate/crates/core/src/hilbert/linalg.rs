//! Small dense complex linear algebra: Hermitian Jacobi eigensolver,
//! Gram-Schmidt, least squares via normal equations.  Dimensions stay tiny
//! (Choi matrices, state spaces), so no external backend is used.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C;

pub fn dagger(m: &Array2<C>) -> Array2<C> {
    m.t().mapv(|z| z.conj())
}

pub fn max_abs(m: &Array2<C>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn trace(m: &Array2<C>) -> C {
    m.diag().sum()
}

/// Cyclic Jacobi for Hermitian matrices; returns (eigenvalues ascending,
/// unitary eigenvector matrix with matching columns).
pub fn hermitian_eig(m: &Array2<C>) -> (Vec<f64>, Array2<C>) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut v: Array2<C> = Array2::eye(n);
    let tol = 1e-14 * max_abs(m).max(1e-300);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(a[[p, q]].norm());
            }
        }
        if off < tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[[p, q]];
                if apq.norm() < tol {
                    continue;
                }
                let phase = apq / apq.norm();
                let app = a[[p, p]].re;
                let aqq = a[[q, q]].re;
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Columns p,q rotate by [[c, s·phase], [-s·phase*, c]].
                for i in 0..n {
                    let aip = a[[i, p]];
                    let aiq = a[[i, q]];
                    a[[i, p]] = aip * c - aiq * phase.conj() * s;
                    a[[i, q]] = aip * phase * s + aiq * c;
                }
                for j in 0..n {
                    let apj = a[[p, j]];
                    let aqj = a[[q, j]];
                    a[[p, j]] = apj * c - aqj * phase * s;
                    a[[q, j]] = apj * phase.conj() * s + aqj * c;
                }
                for i in 0..n {
                    let vip = v[[i, p]];
                    let viq = v[[i, q]];
                    v[[i, p]] = vip * c - viq * phase.conj() * s;
                    v[[i, q]] = vip * phase * s + viq * c;
                }
            }
        }
    }
    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a[[i, i]].re, i)).collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let vals: Vec<f64> = pairs.iter().map(|(x, _)| *x).collect();
    let mut vecs = Array2::zeros((n, n));
    for (col, (_, i)) in pairs.iter().enumerate() {
        for r in 0..n {
            vecs[[r, col]] = v[[r, *i]];
        }
    }
    (vals, vecs)
}

/// Orthonormalizes the given vectors (modified Gram-Schmidt), dropping
/// near-dependent ones.
pub fn orthonormalize(vectors: &[Array1<C>], tol: f64) -> Vec<Array1<C>> {
    let mut basis: Vec<Array1<C>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _pass in 0..2 {
            for b in &basis {
                let inner: C = b.iter().zip(w.iter()).map(|(x, y)| x.conj() * y).sum();
                w = &w - &b.mapv(|z| z * inner);
            }
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > tol {
            basis.push(w.mapv(|z| z / C::new(norm, 0.0)));
        }
    }
    basis
}

/// Least-squares solve min ‖A x − b‖ via normal equations; returns
/// (x, residual, condition number of A).
pub fn lstsq(a: &Array2<C>, b: &Array1<C>) -> (Array1<C>, f64, f64) {
    let ah = dagger(a);
    let gram = ah.dot(a);
    let rhs = ah.dot(b);
    let (vals, vecs) = hermitian_eig(&gram);
    let vmax = vals.last().copied().unwrap_or(0.0).max(0.0);
    let vmin = vals.first().copied().unwrap_or(0.0).max(0.0);
    let cond = if vmin > 0.0 { (vmax / vmin).sqrt() } else { f64::INFINITY };
    // x = V diag(1/λ) V† rhs, pseudo-inverting tiny eigenvalues.
    let n = gram.nrows();
    let cutoff = vmax * 1e-14;
    let mut x = Array1::zeros(n);
    for k in 0..n {
        if vals[k] <= cutoff {
            continue;
        }
        let col = vecs.column(k);
        let coeff: C = col.iter().zip(rhs.iter()).map(|(u, r)| u.conj() * r).sum();
        x = &x + &col.mapv(|z| z * coeff / C::new(vals[k], 0.0));
    }
    let res = {
        let diff = &a.dot(&x) - b;
        diff.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    };
    (x, res, cond)
}

/// exp(M) for complex matrices by scaling and squaring on a Taylor series.
pub fn expm_c(m: &Array2<C>) -> Array2<C> {
    let n = m.nrows();
    let norm = m.iter().map(|z| z.norm()).fold(0.0f64, f64::max) * n as f64;
    let mut s = 0u32;
    while norm / 2f64.powi(s as i32) > 0.5 {
        s += 1;
    }
    let scaled = m.mapv(|z| z / C::new(2f64.powi(s as i32), 0.0));
    let mut result: Array2<C> = Array2::eye(n);
    let mut term: Array2<C> = Array2::eye(n);
    for k in 1..=20 {
        term = term.dot(&scaled).mapv(|z| z / C::new(k as f64, 0.0));
        result = result + &term;
    }
    for _ in 0..s {
        result = result.dot(&result);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn jacobi_diagonalizes_hermitian() {
        let m = array![
            [c(2.0, 0.0), c(0.5, 0.3), c(0.0, -1.0)],
            [c(0.5, -0.3), c(1.0, 0.0), c(0.2, 0.0)],
            [c(0.0, 1.0), c(0.2, 0.0), c(-1.0, 0.0)]
        ];
        let (vals, vecs) = hermitian_eig(&m);
        // Reconstruct and compare.
        let mut d = Array2::<C>::zeros((3, 3));
        for i in 0..3 {
            d[[i, i]] = c(vals[i], 0.0);
        }
        let rec = vecs.dot(&d).dot(&dagger(&vecs));
        assert!(max_abs(&(&rec - &m)) < 1e-12);
        // Unitarity
        let g = dagger(&vecs).dot(&vecs);
        assert!(max_abs(&(&g - &Array2::eye(3))) < 1e-12);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn lstsq_solves_square_system() {
        let a = array![[c(2.0, 0.0), c(1.0, 0.0)], [c(0.0, 1.0), c(3.0, 0.0)]];
        let x_true = Array1::from(vec![c(1.0, -1.0), c(0.5, 0.0)]);
        let b = a.dot(&x_true);
        let (x, res, cond) = lstsq(&a, &b);
        assert!(res < 1e-12);
        assert!(cond < 1e3);
        let err: f64 = x.iter().zip(x_true.iter()).map(|(u, v)| (u - v).norm()).sum();
        assert!(err < 1e-12);
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z = Array2::<C>::zeros((3, 3));
        assert!(max_abs(&(&expm_c(&z) - &Array2::eye(3))) < 1e-15);
    }
}
