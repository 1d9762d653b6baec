//! LU factorization with partial pivoting: linear solves, inverses and
//! determinant magnitudes.

use crate::error::{Error, Result};
use crate::tensor::{Matrix, C64};

pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    swaps: usize,
}

pub fn lu(a: &Matrix) -> Result<Lu> {
    assert!(a.is_square());
    let n = a.rows();
    let mut m = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut swaps = 0usize;
    for k in 0..n {
        let mut piv = k;
        let mut best = m[(k, k)].norm();
        for i in k + 1..n {
            let v = m[(i, k)].norm();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == 0.0 {
            return Err(Error::SingularInput(format!("zero pivot at column {k}")));
        }
        if piv != k {
            for j in 0..n {
                let tmp = m[(k, j)];
                m[(k, j)] = m[(piv, j)];
                m[(piv, j)] = tmp;
            }
            perm.swap(k, piv);
            swaps += 1;
        }
        let d = m[(k, k)];
        for i in k + 1..n {
            let f = m[(i, k)] / d;
            m[(i, k)] = f;
            for j in k + 1..n {
                let upd = f * m[(k, j)];
                m[(i, j)] -= upd;
            }
        }
    }
    Ok(Lu { lu: m, perm, swaps })
}

impl Lu {
    pub fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.rows();
        assert_eq!(b.len(), n);
        let mut y = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = b[self.perm[i]];
            for j in 0..i {
                acc -= self.lu[(i, j)] * y[j];
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in i + 1..n {
                acc -= self.lu[(i, j)] * y[j];
            }
            y[i] = acc / self.lu[(i, i)];
        }
        y
    }

    pub fn inverse(&self) -> Matrix {
        let n = self.lu.rows();
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            e[j] = C64::new(1.0, 0.0);
            let col = self.solve_vec(&e);
            inv.set_col(j, &col);
            e[j] = C64::new(0.0, 0.0);
        }
        inv
    }

    /// log of |det|; stable for large dimensions.
    pub fn log_abs_det(&self) -> f64 {
        (0..self.lu.rows())
            .map(|i| self.lu[(i, i)].norm().ln())
            .sum()
    }

    pub fn det(&self) -> C64 {
        let sign = if self.swaps % 2 == 0 { 1.0 } else { -1.0 };
        (0..self.lu.rows())
            .map(|i| self.lu[(i, i)])
            .fold(C64::new(sign, 0.0), |acc, d| acc * d)
    }
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    Ok(lu(a)?.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rand_mat(seed: u64, n: usize) -> Matrix {
        let mut s = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(5);
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s as f64 / u64::MAX as f64) * 2.0 - 1.0
        };
        Matrix::from_fn(n, n, |_, _| c(next(), next()))
    }

    #[test]
    fn inverse_round_trip() {
        let a = rand_mat(17, 9);
        let inv = inverse(&a).unwrap();
        let eye = a.matmul(&inv);
        assert!(eye.sub(&Matrix::identity(9)).frobenius_norm() < 1e-11);
    }

    #[test]
    fn determinant_of_diagonal() {
        let d = Matrix::diag(&[c(2.0, 0.0), c(0.0, 3.0), c(-1.0, 0.0)]);
        let f = lu(&d).unwrap();
        assert!((f.det() - c(0.0, -6.0)).norm() < 1e-12);
        assert!((f.log_abs_det() - 6.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn singular_detected() {
        let a = Matrix::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(2.0, 0.0), c(4.0, 0.0)],
        ]);
        assert!(lu(&a).is_err());
    }
}
