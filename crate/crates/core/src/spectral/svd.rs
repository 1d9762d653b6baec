//! Singular value decomposition by one-sided complex Jacobi rotations.
//! Accurate for the small dense matrices this crate works with.

use crate::error::{Error, Result};
use crate::tensor::{Matrix, C64};

pub struct Svd {
    pub u: Matrix,
    /// Singular values, non-increasing.
    pub sigma: Vec<f64>,
    /// Conjugate transpose of V; `A = U diag(sigma) Vh`.
    pub vh: Matrix,
}

impl Svd {
    pub fn rank(&self, tol: f64) -> usize {
        let s1 = self.sigma.first().copied().unwrap_or(0.0);
        if s1 == 0.0 {
            return 0;
        }
        self.sigma.iter().filter(|&&s| s > tol * s1).count()
    }

    pub fn reconstruct(&self) -> Matrix {
        let n = self.sigma.len();
        let mut us = self.u.clone();
        for (j, &s) in self.sigma.iter().enumerate() {
            for i in 0..us.rows() {
                us[(i, j)] *= s;
            }
        }
        let _ = n;
        us.matmul(&self.vh)
    }
}

/// One-sided Jacobi on the columns of a tall-or-square matrix.
fn jacobi_tall(a: &Matrix) -> Result<(Matrix, Vec<f64>, Matrix)> {
    let m = a.rows();
    let n = a.cols();
    debug_assert!(m >= n);
    let mut g = a.clone();
    let mut v = Matrix::identity(n);
    let tol = 1e-14;
    let max_sweeps = 60;
    let mut converged = false;
    for _ in 0..max_sweeps {
        let mut off = 0.0f64;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = C64::new(0.0, 0.0);
                for i in 0..m {
                    let gp = g[(i, p)];
                    let gq = g[(i, q)];
                    app += gp.norm_sqr();
                    aqq += gq.norm_sqr();
                    apq += gp.conj() * gq;
                }
                let denom = (app * aqq).sqrt();
                if denom == 0.0 || apq.norm() <= tol * denom {
                    continue;
                }
                off = off.max(apq.norm() / denom);
                let phase = apq / apq.norm();
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = {
                    let sg = if tau >= 0.0 { 1.0 } else { -1.0 };
                    sg / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let sp = s * phase.conj();
                let sq = s * phase;
                for i in 0..m {
                    let gp = g[(i, p)];
                    let gq = g[(i, q)];
                    g[(i, p)] = gp * c - gq * sp;
                    g[(i, q)] = gp * sq + gq * c;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = vp * c - vq * sp;
                    v[(i, q)] = vp * sq + vq * c;
                }
            }
        }
        if off < tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure(
            "Jacobi SVD did not reach the orthogonality tolerance".into(),
        ));
    }

    // singular values = column norms; sort descending
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| g[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap());

    let mut u = Matrix::zeros(m, n);
    let mut vs = Matrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    let smax = order.first().map(|&j| norms[j]).unwrap_or(0.0);
    for (dst, &src) in order.iter().enumerate() {
        sigma.push(norms[src]);
        for i in 0..n {
            vs[(i, dst)] = v[(i, src)];
        }
        if norms[src] > smax * 1e-300 && norms[src] > 0.0 {
            for i in 0..m {
                u[(i, dst)] = g[(i, src)] / norms[src];
            }
        }
    }
    // complete U columns lost to rank deficiency
    for j in 0..n {
        let colnorm: f64 = (0..m).map(|i| u[(i, j)].norm_sqr()).sum();
        if colnorm > 0.5 {
            continue;
        }
        'candidate: for e in 0..m {
            let mut cand = vec![C64::new(0.0, 0.0); m];
            cand[e] = C64::new(1.0, 0.0);
            for k in 0..n {
                if k == j {
                    continue;
                }
                let mut dot = C64::new(0.0, 0.0);
                for i in 0..m {
                    dot += u[(i, k)].conj() * cand[i];
                }
                for i in 0..m {
                    let upd = u[(i, k)] * dot;
                    cand[i] -= upd;
                }
            }
            let nrm = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nrm > 1e-3 {
                for i in 0..m {
                    u[(i, j)] = cand[i] / nrm;
                }
                break 'candidate;
            }
        }
    }
    Ok((u, sigma, vs.dagger()))
}

/// Full SVD. The reconstruction `U diag(sigma) Vh` reproduces the input
/// to working accuracy; singular values are non-increasing.
pub fn svd(a: &Matrix) -> Result<Svd> {
    if !a.is_finite() {
        return Err(Error::NonFinite("svd input".into()));
    }
    if a.rows() >= a.cols() {
        let (u, sigma, vh) = jacobi_tall(a)?;
        Ok(Svd { u, sigma, vh })
    } else {
        let (u, sigma, vh) = jacobi_tall(&a.dagger())?;
        Ok(Svd {
            u: vh.dagger(),
            sigma,
            vh: u.dagger(),
        })
    }
}

/// Singular values only.
pub fn singular_values(a: &Matrix) -> Result<Vec<f64>> {
    Ok(svd(a)?.sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rand_mat(seed: u64, rows: usize, cols: usize) -> Matrix {
        let mut s = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(3);
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s as f64 / u64::MAX as f64) * 2.0 - 1.0
        };
        Matrix::from_fn(rows, cols, |_, _| c(next(), next()))
    }

    #[test]
    fn reconstructs_and_orders() {
        for (r, cdim) in [(6usize, 6usize), (8, 3), (3, 8)] {
            let a = rand_mat(r as u64 * 31 + cdim as u64, r, cdim);
            let s = svd(&a).unwrap();
            let rel = s.reconstruct().sub(&a).frobenius_norm() / a.frobenius_norm();
            assert!(rel < 1e-12, "{r}x{cdim} rel={rel:.3e}");
            for w in s.sigma.windows(2) {
                assert!(w[0] >= w[1] - 1e-14);
            }
            let k = s.sigma.len();
            let uhu = s.u.dagger().matmul(&s.u);
            assert!(uhu.sub(&Matrix::identity(k)).frobenius_norm() < 1e-12);
            let vvh = s.vh.matmul(&s.vh.dagger());
            assert!(vvh.sub(&Matrix::identity(k)).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn rank_of_outer_product_is_one() {
        let u = [c(1.0, 0.5), c(-0.3, 0.2), c(0.0, 1.0), c(0.7, 0.0)];
        let v = [c(0.2, -0.4), c(1.0, 1.0), c(-0.5, 0.1), c(0.3, 0.3)];
        let a = Matrix::from_fn(4, 4, |i, j| u[i] * v[j].conj());
        let s = svd(&a).unwrap();
        assert_eq!(s.rank(1e-8), 1);
    }

    #[test]
    fn rank_of_identity() {
        let s = svd(&Matrix::identity(16)).unwrap();
        assert_eq!(s.rank(1e-8), 16);
        assert!((s.sigma[0] - 1.0).abs() < 1e-14);
        assert!((s.sigma[15] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn singular_matrix_gets_complete_u() {
        let a = Matrix::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)],
            vec![c(2.0, 0.0), c(4.0, 0.0), c(6.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        let s = svd(&a).unwrap();
        assert_eq!(s.rank(1e-10), 1);
        let uhu = s.u.dagger().matmul(&s.u);
        assert!(uhu.sub(&Matrix::identity(3)).frobenius_norm() < 1e-10);
    }
}
