//! Complex Schur decomposition: Hessenberg reduction by Householder
//! reflections followed by shifted QR iteration with deflation.

use crate::error::{Error, Result};
use crate::tensor::{Matrix, C64};

pub struct Schur {
    /// Upper triangular factor; eigenvalues on the diagonal.
    pub t: Matrix,
    /// Unitary factor with `A = Q T Q^H`.
    pub q: Matrix,
}

/// Normalized Householder vector v with `(I - 2 v v^H) x = -mu e1`.
fn householder(x: &[C64]) -> Option<Vec<C64>> {
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return None;
    }
    let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
    if tail == 0.0 && x[0].im == 0.0 && x[0].re < 0.0 {
        // already -|x| e1; nothing to do
        return None;
    }
    let phase = if x[0].norm() > 0.0 {
        x[0] / x[0].norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let mut v: Vec<C64> = x.to_vec();
    v[0] += phase * norm;
    let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if vnorm == 0.0 {
        return None;
    }
    for z in &mut v {
        *z /= vnorm;
    }
    Some(v)
}

/// Rows `r0..r0+v.len()`, columns `c0..`: `M <- (I - 2 v v^H) M`.
fn reflect_left(m: &mut Matrix, v: &[C64], r0: usize, c0: usize) {
    let cols = m.cols();
    for j in c0..cols {
        let mut dot = C64::new(0.0, 0.0);
        for (k, vk) in v.iter().enumerate() {
            dot += vk.conj() * m[(r0 + k, j)];
        }
        let dot = dot * 2.0;
        for (k, vk) in v.iter().enumerate() {
            let upd = vk * dot;
            m[(r0 + k, j)] -= upd;
        }
    }
}

/// Columns `c0..c0+v.len()`, rows `0..rmax`: `M <- M (I - 2 v v^H)`.
fn reflect_right(m: &mut Matrix, v: &[C64], c0: usize, rmax: usize) {
    for i in 0..rmax {
        let mut dot = C64::new(0.0, 0.0);
        for (k, vk) in v.iter().enumerate() {
            dot += m[(i, c0 + k)] * vk;
        }
        let dot = dot * 2.0;
        for (k, vk) in v.iter().enumerate() {
            let upd = dot * vk.conj();
            m[(i, c0 + k)] -= upd;
        }
    }
}

/// Unitary similarity to upper Hessenberg form. Returns (H, Q) with
/// `A = Q H Q^H`.
pub fn hessenberg(a: &Matrix) -> (Matrix, Matrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = Matrix::identity(n);
    if n < 3 {
        return (h, q);
    }
    for k in 0..n - 2 {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        if let Some(v) = householder(&x) {
            reflect_left(&mut h, &v, k + 1, k);
            reflect_right(&mut h, &v, k + 1, n);
            reflect_right(&mut q, &v, k + 1, n);
        }
        for i in k + 2..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    (h, q)
}

/// Complex Givens rotation `[c s; -conj(s) c]` with real `c` mapping
/// `(f, g)` to `(r, 0)`.
fn givens(f: C64, g: C64) -> (f64, C64) {
    let fa = f.norm();
    let ga = g.norm();
    if ga == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if fa == 0.0 {
        return (0.0, g.conj() / ga);
    }
    let r = (fa * fa + ga * ga).sqrt();
    let c = fa / r;
    let s = (f / fa) * g.conj() / r;
    (c, s)
}

/// Eigenvalue of the trailing 2x2 of the active block closest to the
/// bottom-right entry (Wilkinson shift).
fn wilkinson_shift(h: &Matrix, m: usize) -> C64 {
    let a = h[(m - 2, m - 2)];
    let b = h[(m - 2, m - 1)];
    let c = h[(m - 1, m - 2)];
    let d = h[(m - 1, m - 1)];
    let delta = (a - d) * 0.5;
    let disc = (delta * delta + b * c).sqrt();
    let denom = if (delta + disc).norm() >= (delta - disc).norm() {
        delta + disc
    } else {
        delta - disc
    };
    if denom.norm() == 0.0 {
        return d;
    }
    d - b * c / denom
}

/// Schur decomposition of a general complex square matrix.
pub fn schur(a: &Matrix, max_sweeps_per_eigenvalue: usize) -> Result<Schur> {
    assert!(a.is_square());
    let n = a.rows();
    let (mut h, mut q) = hessenberg(a);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let budget = max_sweeps_per_eigenvalue * n.max(1);
    let mut iters = 0usize;
    let mut stuck = 0usize;

    let mut m = n;
    while m > 1 {
        // deflation scan from the bottom of the active block
        let mut l = m - 1;
        while l > 0 {
            let s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let s = if s == 0.0 { scale } else { s };
            if h[(l, l - 1)].norm() <= f64::EPSILON * s {
                h[(l, l - 1)] = C64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == m - 1 {
            m -= 1;
            stuck = 0;
            continue;
        }
        iters += 1;
        stuck += 1;
        if iters > budget {
            return Err(Error::ConvergenceFailure(format!(
                "QR iteration exceeded {budget} sweeps at block size {m}"
            )));
        }
        let mut mu = wilkinson_shift(&h, m);
        if stuck > 0 && stuck % 16 == 0 {
            // exceptional shift to break rare cycles
            mu = h[(m - 1, m - 1)] + C64::new(1.5 * h[(m - 1, m - 2)].norm(), 0.0);
        }

        // explicit shifted QR step on the active block [l, m)
        for i in l..m {
            h[(i, i)] -= mu;
        }
        let mut rots: Vec<(f64, C64)> = Vec::with_capacity(m - l - 1);
        for i in l..m - 1 {
            let (c, s) = givens(h[(i, i)], h[(i + 1, i)]);
            for j in i..n {
                let x = h[(i, j)];
                let y = h[(i + 1, j)];
                h[(i, j)] = x * c + s * y;
                h[(i + 1, j)] = -s.conj() * x + y * c;
            }
            rots.push((c, s));
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let i = l + idx;
            let rmax = (i + 2).min(m);
            for r in 0..rmax {
                let x = h[(r, i)];
                let y = h[(r, i + 1)];
                h[(r, i)] = x * c + s.conj() * y;
                h[(r, i + 1)] = -s * x + y * c;
            }
            for r in 0..n {
                let x = q[(r, i)];
                let y = q[(r, i + 1)];
                q[(r, i)] = x * c + s.conj() * y;
                q[(r, i + 1)] = -s * x + y * c;
            }
        }
        for i in l..m {
            h[(i, i)] += mu;
        }
    }
    // clean below-diagonal residue
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    Ok(Schur { t: h, q })
}

/// Eigenvectors of a triangular factor by back-substitution, mapped back
/// through Q. Column k corresponds to the k-th diagonal entry of T.
pub fn triangular_eigenvectors(s: &Schur) -> Matrix {
    let n = s.t.rows();
    let tnorm = s.t.frobenius_norm().max(f64::MIN_POSITIVE);
    let smin = f64::EPSILON * tnorm;
    let mut vecs = Matrix::zeros(n, n);
    for k in 0..n {
        let lam = s.t[(k, k)];
        let mut y = vec![C64::new(0.0, 0.0); n];
        y[k] = C64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for i in j + 1..=k {
                acc += s.t[(j, i)] * y[i];
            }
            let mut denom = s.t[(j, j)] - lam;
            if denom.norm() < smin {
                denom = C64::new(smin, 0.0);
            }
            y[j] = -acc / denom;
        }
        let ynorm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut y {
            *z /= ynorm;
        }
        let v = s.q.matvec(&y);
        vecs.set_col(k, &v);
    }
    vecs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rand_mat(seed: u64, n: usize) -> Matrix {
        let mut s = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(7);
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s as f64 / u64::MAX as f64) * 2.0 - 1.0
        };
        Matrix::from_fn(n, n, |_, _| c(next(), next()))
    }

    #[test]
    fn hessenberg_preserves_similarity() {
        let a = rand_mat(5, 8);
        let (h, q) = hessenberg(&a);
        let back = q.matmul(&h).matmul(&q.dagger());
        assert!(back.sub(&a).frobenius_norm() < 1e-12 * a.frobenius_norm());
        for i in 2..8 {
            for j in 0..i - 1 {
                assert_eq!(h[(i, j)], c(0.0, 0.0));
            }
        }
        assert!(q.matmul(&q.dagger()).sub(&Matrix::identity(8)).frobenius_norm() < 1e-13);
    }

    #[test]
    fn schur_reconstructs_random_matrices() {
        for seed in [1u64, 2, 3] {
            for n in [2usize, 5, 16] {
                let a = rand_mat(seed, n);
                let s = schur(&a, 60).unwrap();
                let back = s.q.matmul(&s.t).matmul(&s.q.dagger());
                let rel = back.sub(&a).frobenius_norm() / a.frobenius_norm();
                assert!(rel < 1e-12, "n={n} seed={seed} rel={rel:.3e}");
                assert!(
                    s.q.matmul(&s.q.dagger())
                        .sub(&Matrix::identity(n))
                        .frobenius_norm()
                        < 1e-12
                );
            }
        }
    }

    #[test]
    fn schur_diagonal_matches_known_eigenvalues() {
        // triangular input: eigenvalues are the diagonal, in some order
        let a = Matrix::from_rows(&[
            vec![c(2.0, 1.0), c(1.0, 0.0), c(0.5, -0.5)],
            vec![c(0.0, 0.0), c(-1.0, 0.0), c(3.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 2.0)],
        ]);
        let s = schur(&a, 60).unwrap();
        let mut got: Vec<C64> = (0..3).map(|i| s.t[(i, i)]).collect();
        let mut expect = vec![c(2.0, 1.0), c(-1.0, 0.0), c(0.0, 2.0)];
        let key = |z: &C64| (z.re * 1e6).round() as i64 * 10_000 + (z.im * 1e3).round() as i64;
        got.sort_by_key(key);
        expect.sort_by_key(key);
        for (g, e) in got.iter().zip(&expect) {
            assert!((g - e).norm() < 1e-10);
        }
    }

    #[test]
    fn eigenvectors_satisfy_residual_bound() {
        let a = rand_mat(9, 12);
        let s = schur(&a, 60).unwrap();
        let v = triangular_eigenvectors(&s);
        let anorm = a.frobenius_norm();
        for k in 0..12 {
            let col = v.col(k);
            let av = a.matvec(&col);
            let lam = s.t[(k, k)];
            let res: f64 = av
                .iter()
                .zip(&col)
                .map(|(x, y)| (x - lam * y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res < 1e-11 * anorm, "k={k} res={res:.3e}");
        }
    }

    #[test]
    fn jordan_block_converges() {
        let a = Matrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]);
        let s = schur(&a, 60).unwrap();
        assert!((s.t[(0, 0)] - c(1.0, 0.0)).norm() < 1e-7);
        assert!((s.t[(1, 1)] - c(1.0, 0.0)).norm() < 1e-7);
    }
}
