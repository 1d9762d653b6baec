//! Operator families on qubit chains: extraspecial-2-group generators and
//! their wider cousins, swap/projector generators, the four-qubit ansatz,
//! the two partition-algebra R-matrices and the unitary W-state operators.

use crate::error::{Error, Result};
use crate::tensor::{embed, pauli, Matrix, Pauli, SiteEmbedding, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Generator kinds, `generator(kind, j, n)` builds the 2^n x 2^n matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    /// `i X_j Z_{j+1}`
    Theta,
    /// `i X_j Z_{j+1} Z_{j+2}`
    Xi,
    /// `i X_j Z_{j+1} .. Z_{j+width-1}`
    Eta { width: usize },
    /// adjacent transposition of sites j and j+1
    Swap,
    /// `(1 + X_j)/2`
    ProjP,
    /// `1 + X_j X_{j+1}`
    ProjPp,
}

impl GeneratorKind {
    pub fn window_width(&self) -> usize {
        match self {
            GeneratorKind::Theta => 2,
            GeneratorKind::Xi => 3,
            GeneratorKind::Eta { width } => *width,
            GeneratorKind::Swap => 2,
            GeneratorKind::ProjP => 1,
            GeneratorKind::ProjPp => 2,
        }
    }
}

/// Pauli-string generator with X on the leading site and Z on the rest of
/// the window, times i. Built entrywise; the string is a signed
/// permutation, so no products are needed.
fn x_z_string(j: usize, width: usize, n: usize) -> Result<Matrix> {
    let dim = 1usize << n;
    let xmask = 1usize << (n - j);
    let mut zmask = 0usize;
    for t in 1..width {
        zmask |= 1usize << (n - j - t);
    }
    let mut m = Matrix::zeros(dim, dim);
    for col in 0..dim {
        let sign = if (col & zmask).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        m[(col ^ xmask, col)] = C64::new(0.0, sign);
    }
    Ok(m)
}

/// Two-site SWAP embedded at sites (j, j+1).
fn swap_adjacent(j: usize, n: usize) -> Result<Matrix> {
    let mut s = Matrix::zeros(4, 4);
    s[(0, 0)] = c(1.0, 0.0);
    s[(1, 2)] = c(1.0, 0.0);
    s[(2, 1)] = c(1.0, 0.0);
    s[(3, 3)] = c(1.0, 0.0);
    embed(&s, &SiteEmbedding::new(2, j, n)?)
}

pub fn generator(kind: GeneratorKind, j: usize, n: usize) -> Result<Matrix> {
    let width = kind.window_width();
    if j == 0 || j + width - 1 > n {
        return Err(Error::WindowOverflow {
            start: j,
            end: j + width - 1,
            num_sites: n,
        });
    }
    match kind {
        GeneratorKind::Theta => x_z_string(j, 2, n),
        GeneratorKind::Xi => x_z_string(j, 3, n),
        GeneratorKind::Eta { width } => x_z_string(j, width, n),
        GeneratorKind::Swap => swap_adjacent(j, n),
        GeneratorKind::ProjP => {
            let x = pauli(Pauli::X, j, n)?;
            let mut m = x;
            m.shift_diagonal(c(1.0, 0.0));
            Ok(m.scaled(c(0.5, 0.0)))
        }
        GeneratorKind::ProjPp => {
            let xx = pauli(Pauli::X, j, n)?.matmul(&pauli(Pauli::X, j + 1, n)?);
            let mut m = xx;
            m.shift_diagonal(c(1.0, 0.0));
            Ok(m)
        }
    }
}

/// Swap of sites j and j+2 realized as `s_j s_{j+1} s_j`.
pub fn swap_next_nearest(j: usize, n: usize) -> Result<Matrix> {
    let s1 = generator(GeneratorKind::Swap, j, n)?;
    let s2 = generator(GeneratorKind::Swap, j + 1, n)?;
    Ok(s1.matmul(&s2).matmul(&s1))
}

/// The seven coefficients of the four-qubit ansatz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnsatzCoeffs {
    pub a1: C64,
    pub a2: C64,
    pub a3: C64,
    pub b1: C64,
    pub b2: C64,
    pub b3: C64,
    pub g: C64,
}

impl AnsatzCoeffs {
    pub fn zero() -> Self {
        AnsatzCoeffs {
            a1: c(0.0, 0.0),
            a2: c(0.0, 0.0),
            a3: c(0.0, 0.0),
            b1: c(0.0, 0.0),
            b2: c(0.0, 0.0),
            b3: c(0.0, 0.0),
            g: c(0.0, 0.0),
        }
    }
}

/// 16x16 operator
/// `1 + a1 t1 + a2 t2 + a3 t3 + b1 t1 t2 + b2 t2 t3 + b3 t1 t3 + g t1 t2 t3`
/// on four qubits, where `t_j` is the theta generator at site j. The fourth
/// qubit only ever sees Z factors, so the operator is diagonal on it.
pub fn extraspecial_ansatz(p: &AnsatzCoeffs) -> Matrix {
    let n = 4;
    let t1 = generator(GeneratorKind::Theta, 1, n).unwrap();
    let t2 = generator(GeneratorKind::Theta, 2, n).unwrap();
    let t3 = generator(GeneratorKind::Theta, 3, n).unwrap();
    let t12 = t1.matmul(&t2);
    let t23 = t2.matmul(&t3);
    let t13 = t1.matmul(&t3);
    let t123 = t12.matmul(&t3);
    let mut r = Matrix::identity(16);
    r = r.add(&t1.scaled(p.a1));
    r = r.add(&t2.scaled(p.a2));
    r = r.add(&t3.scaled(p.a3));
    r = r.add(&t12.scaled(p.b1));
    r = r.add(&t23.scaled(p.b2));
    r = r.add(&t13.scaled(p.b3));
    r = r.add(&t123.scaled(p.g));
    r
}

/// 8x8 partition-algebra operator
/// `s_{1,3} (1 + a1 p1 + a3 p3 + b1 p1 p2 + b2 p2 p3 + b3 p1 p3 + g p1 p2 p3)`
/// built from the rank-one projectors `p_j = (1 + X_j)/2`.
pub fn partition_swap_proj(
    a1: C64,
    a3: C64,
    b1: C64,
    b2: C64,
    b3: C64,
    g: C64,
) -> Matrix {
    let n = 3;
    let p1 = generator(GeneratorKind::ProjP, 1, n).unwrap();
    let p2 = generator(GeneratorKind::ProjP, 2, n).unwrap();
    let p3 = generator(GeneratorKind::ProjP, 3, n).unwrap();
    let mut m = Matrix::identity(8);
    m = m.add(&p1.scaled(a1));
    m = m.add(&p3.scaled(a3));
    m = m.add(&p1.matmul(&p2).scaled(b1));
    m = m.add(&p2.matmul(&p3).scaled(b2));
    m = m.add(&p1.matmul(&p3).scaled(b3));
    m = m.add(&p1.matmul(&p2).matmul(&p3).scaled(g));
    swap_next_nearest(1, n).unwrap().matmul(&m)
}

/// 8x8 partition-algebra operator
/// `s_{1,3} (1 + a p12 + b p23 + g p12 p23 + d p13)` with
/// `p_{jk} = 1 + X_j X_k`.
pub fn partition_swap_pair_proj(a: C64, b: C64, g: C64, d: C64) -> Matrix {
    let n = 3;
    let pp = |j: usize, k: usize| -> Matrix {
        let mut m = pauli(Pauli::X, j, n)
            .unwrap()
            .matmul(&pauli(Pauli::X, k, n).unwrap());
        m.shift_diagonal(c(1.0, 0.0));
        m
    };
    let p12 = pp(1, 2);
    let p23 = pp(2, 3);
    let p13 = pp(1, 3);
    let mut m = Matrix::identity(8);
    m = m.add(&p12.scaled(a));
    m = m.add(&p23.scaled(b));
    m = m.add(&p12.matmul(&p23).scaled(g));
    m = m.add(&p13.scaled(d));
    swap_next_nearest(1, n).unwrap().matmul(&m)
}

/// Sum `eta_j + .. + eta_{j+count-1}` of width-`width` generators on an
/// n-qubit chain.
pub fn eta_sum(width: usize, count: usize, start: usize, n: usize) -> Result<Matrix> {
    let mut acc = generator(GeneratorKind::Eta { width }, start, n)?;
    for j in start + 1..start + count {
        acc = acc.add(&generator(GeneratorKind::Eta { width }, j, n)?);
    }
    Ok(acc)
}

/// Unitary W-state entangler on `2n-1` qubits:
/// `sqrt(3n-4)/(2 sqrt(n-1)) * 1 +- 1/(2 sqrt(n-1)) * (eta_j + .. + eta_{j+n-1})`.
/// For n = 3 the generators reduce to the xi realization on five qubits.
pub fn unitary_w_operator(n: usize, plus_sign: bool) -> Result<Matrix> {
    if n < 3 {
        return Err(Error::DomainViolation {
            case: "Un".into(),
            reason: format!("n must be at least 3, got {n}"),
        });
    }
    let chain = 2 * n - 1;
    let norm = 2.0 * ((n - 1) as f64).sqrt();
    let sum = eta_sum(n, n, 1, chain)?;
    let sign = if plus_sign { 1.0 } else { -1.0 };
    let mut r = sum.scaled(c(sign / norm, 0.0));
    r.shift_diagonal(c(((3 * n - 4) as f64).sqrt() / norm, 0.0));
    Ok(r)
}

/// The sixteen unnormalized eigenvector columns published for the
/// six-state case 6B, as a full-rank 16x16 matrix. Columns 1..=8 share one
/// eigenvalue, columns 9..=16 the other.
pub fn case2_eigenbasis() -> Matrix {
    let s = std::f64::consts::SQRT_2;
    let one = 1.0;
    // (column, basis index, real coefficient)
    let entries: [(usize, usize, f64); 48] = [
        (1, 0b0001, one),
        (1, 0b1111, one),
        (2, 0b1110, one),
        (2, 0b0000, -one),
        (3, 0b1101, one),
        (3, 0b0011, -one),
        (4, 0b0010, one),
        (4, 0b1100, one),
        (5, 0b1011, one),
        (5, 0b0101, -one),
        (6, 0b0100, one),
        (6, 0b1010, one),
        (7, 0b0111, one),
        (7, 0b1001, one),
        (8, 0b1000, one),
        (8, 0b0110, -one),
        (9, 0b0011, s),
        (9, 0b0111, -s),
        (9, 0b0001, -one),
        (9, 0b1111, one),
        (10, 0b0000, one),
        (10, 0b0010, s),
        (10, 0b0110, -s),
        (10, 0b1110, one),
        (11, 0b0011, one),
        (11, 0b0001, -s),
        (11, 0b0101, -s),
        (11, 0b1101, one),
        (12, 0b1100, one),
        (12, 0b0100, -s),
        (12, 0b0000, -s),
        (12, 0b0010, -one),
        (13, 0b0011, s),
        (13, 0b0111, -s),
        (13, 0b0101, one),
        (13, 0b1011, one),
        (14, 0b0010, s),
        (14, 0b0110, -s),
        (14, 0b0100, -one),
        (14, 0b1010, one),
        (15, 0b0001, s),
        (15, 0b0101, s),
        (15, 0b0111, -one),
        (15, 0b1001, one),
        (16, 0b0000, s),
        (16, 0b0100, s),
        (16, 0b0110, one),
        (16, 0b1000, one),
    ];
    let mut v = Matrix::zeros(16, 16);
    for &(col, idx, val) in entries.iter() {
        v[(idx, col - 1)] = c(val, 0.0);
    }
    v
}
