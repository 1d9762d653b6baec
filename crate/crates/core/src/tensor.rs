//! Dense complex matrices, Kronecker products, qubit-chain embeddings,
//! pure states and partial traces.
//!
//! Site convention: site 1 is the leftmost tensor factor and the most
//! significant bit of a basis-state index, so `|q1 q2 .. qn>` has index
//! `q1*2^(n-1) + .. + qn`.

use crate::error::{Error, Result};
use num_complex::Complex64;

pub type C64 = Complex64;

/// Dense complex matrix in row-major order.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                let z = self[(i, j)];
                write!(f, "{:+.3}{:+.3}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Matrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        assert!(!rows.is_empty());
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m.data[i * n + i] = e;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[C64]) {
        assert_eq!(v.len(), self.rows);
        for i in 0..self.rows {
            self.data[i * self.cols + j] = v[i];
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn scaled(&self, c: C64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Adds `c` to every diagonal entry in place.
    pub fn shift_diagonal(&mut self, c: C64) {
        assert!(self.is_square());
        for i in 0..self.rows {
            self.data[i * self.cols + i] += c;
        }
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, other.rows,
            "matmul dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Matrix::zeros(self.rows, other.cols);
        // Complex64 is layout-compatible with [f64; 2].
        unsafe {
            matrixmultiply::zgemm(
                matrixmultiply::CGemmOption::Standard,
                matrixmultiply::CGemmOption::Standard,
                self.rows,
                self.cols,
                other.cols,
                [1.0, 0.0],
                self.data.as_ptr() as *const [f64; 2],
                self.cols as isize,
                1,
                other.data.as_ptr() as *const [f64; 2],
                other.cols as isize,
                1,
                [0.0, 0.0],
                out.data.as_mut_ptr() as *mut [f64; 2],
                out.cols as isize,
                1,
            );
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        self.data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value, estimated by power iteration on `M^H M`.
    pub fn spectral_norm(&self) -> f64 {
        let n = self.cols;
        let mut v = vec![C64::new(1.0 / (n as f64).sqrt(), 0.0); n];
        let mut prev = 0.0;
        for _ in 0..200 {
            let w = self.matvec(&v);
            let u = self.dagger().matvec(&w);
            let norm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            for (x, y) in v.iter_mut().zip(&u) {
                *x = y / norm;
            }
            let sigma = norm.sqrt();
            if (sigma - prev).abs() <= 1e-12 * sigma.max(1.0) {
                return sigma;
            }
            prev = sigma;
        }
        prev
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.sub(&self.dagger()).frobenius_norm()
    }

    pub fn approx_eq(&self, other: &Matrix, tol: f64) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.sub(other).max_abs() <= tol
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl std::ops::Mul<&Matrix> for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs)
    }
}

/// Kronecker product with the standard ordering: the left factor owns the
/// most significant index bits.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, ca) = (a.rows(), a.cols());
    let (rb, cb) = (b.rows(), b.cols());
    let mut out = Matrix::zeros(ra * rb, ca * cb);
    for ia in 0..ra {
        for ja in 0..ca {
            let f = a[(ia, ja)];
            if f.norm_sqr() == 0.0 {
                continue;
            }
            for ib in 0..rb {
                let dst = (ia * rb + ib) * out.cols;
                let src = ib * cb;
                for jb in 0..cb {
                    out.data[dst + ja * cb + jb] += f * b.data[src + jb];
                }
            }
        }
    }
    out
}

/// Placement of a `2^m x 2^m` operator window on an n-qubit chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SiteEmbedding {
    pub local_dim: usize,
    pub window_width: usize,
    pub start_site: usize,
    pub total_sites: usize,
}

impl SiteEmbedding {
    pub fn new(window_width: usize, start_site: usize, total_sites: usize) -> Result<Self> {
        if start_site == 0 || start_site + window_width - 1 > total_sites {
            return Err(Error::WindowOverflow {
                start: start_site,
                end: start_site + window_width - 1,
                num_sites: total_sites,
            });
        }
        Ok(SiteEmbedding {
            local_dim: 2,
            window_width,
            start_site,
            total_sites,
        })
    }
}

/// `I^(start-1) (x) op (x) I^(n-start-m+1)` as a dense `2^n x 2^n` matrix.
pub fn embed(op: &Matrix, placement: &SiteEmbedding) -> Result<Matrix> {
    let dim = 1usize << placement.window_width;
    if op.rows() != dim || op.cols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, window of width {} needs {}x{}",
            op.rows(),
            op.cols(),
            placement.window_width,
            dim,
            dim
        )));
    }
    let pre = 1usize << (placement.start_site - 1);
    let post =
        1usize << (placement.total_sites + 1 - placement.start_site - placement.window_width);
    let mut m = kron(&Matrix::identity(pre), op);
    if post > 1 {
        m = kron(&m, &Matrix::identity(post));
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Z,
}

/// Single-site Pauli operator on an n-qubit chain.
pub fn pauli(kind: Pauli, site: usize, n: usize) -> Result<Matrix> {
    if site == 0 || site > n {
        return Err(Error::SiteOutOfRange {
            site,
            num_sites: n,
        });
    }
    let local = match kind {
        Pauli::X => Matrix::from_rows(&[
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        ]),
        Pauli::Z => Matrix::diag(&[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]),
    };
    embed(&local, &SiteEmbedding::new(1, site, n)?)
}

/// Pure state of an n-qubit register. Amplitude vectors need not be
/// normalized; the `normalized` flag records whether the norm is within
/// 1e-12 of one.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amps: Vec<C64>,
    normalized: bool,
}

pub const NORM_FLAG_TOL: f64 = 1e-12;

impl PureState {
    pub fn from_amplitudes(num_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != 1usize << num_qubits {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for {} qubits (need {})",
                amps.len(),
                num_qubits,
                1usize << num_qubits
            )));
        }
        if !amps.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("state amplitudes".into()));
        }
        let mut s = PureState {
            num_qubits,
            amps,
            normalized: false,
        };
        s.normalized = (s.norm() - 1.0).abs() < NORM_FLAG_TOL;
        Ok(s)
    }

    /// Computational basis state with the given index.
    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << num_qubits];
        amps[index] = C64::new(1.0, 0.0);
        PureState {
            num_qubits,
            amps,
            normalized: true,
        }
    }

    /// Basis ket from a bit string, e.g. `ket("0110")`.
    pub fn ket(bits: &str) -> Self {
        let n = bits.len();
        let idx = usize::from_str_radix(bits, 2).expect("binary string");
        PureState::basis(n, idx)
    }

    /// `(|10..0> + |01..0> + .. + |0..01>)/sqrt(n)`.
    pub fn w(num_qubits: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << num_qubits];
        let c = C64::new(1.0 / (num_qubits as f64).sqrt(), 0.0);
        for q in 0..num_qubits {
            amps[1 << (num_qubits - 1 - q)] = c;
        }
        PureState {
            num_qubits,
            amps,
            normalized: true,
        }
    }

    /// `(|0..0> + |1..1>)/sqrt(2)`.
    pub fn ghz(num_qubits: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << num_qubits];
        let c = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amps[0] = c;
        amps[(1 << num_qubits) - 1] = c;
        PureState {
            num_qubits,
            amps,
            normalized: true,
        }
    }

    /// Tensor product of single-qubit states, site 1 first.
    pub fn product(factors: &[[C64; 2]]) -> Self {
        let n = factors.len();
        let mut amps = vec![C64::new(1.0, 0.0)];
        for f in factors {
            let mut next = Vec::with_capacity(amps.len() * 2);
            for a in &amps {
                next.push(a * f[0]);
                next.push(a * f[1]);
            }
            amps = next;
        }
        PureState::from_amplitudes(n, amps).expect("product state")
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn normalized(&self) -> PureState {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        let amps = self.amps.iter().map(|z| z / n).collect();
        PureState {
            num_qubits: self.num_qubits,
            amps,
            normalized: true,
        }
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        assert_eq!(self.num_qubits, other.num_qubits);
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Matrix-vector action of a full-register operator on a state.
pub fn apply(op: &Matrix, state: &PureState) -> Result<PureState> {
    if !op.is_square() || op.rows() != state.dim() {
        return Err(Error::DimensionMismatch(format!(
            "operator {}x{} on a {}-qubit state",
            op.rows(),
            op.cols(),
            state.num_qubits()
        )));
    }
    PureState::from_amplitudes(state.num_qubits(), op.matvec(state.amplitudes()))
}

/// Applies a windowed operator to a state without forming the embedded
/// matrix. Equivalent to `apply(&embed(op, placement)?, state)`.
pub fn apply_embedded(op: &Matrix, placement: &SiteEmbedding, state: &PureState) -> Result<PureState> {
    let w = placement.window_width;
    let dim = 1usize << w;
    if op.rows() != dim || op.cols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, window of width {w} needs {dim}x{dim}",
            op.rows(),
            op.cols(),
        )));
    }
    if placement.total_sites != state.num_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "placement on {} sites, state has {} qubits",
            placement.total_sites,
            state.num_qubits()
        )));
    }
    let n = placement.total_sites;
    let post_bits = n + 1 - placement.start_site - w;
    let post = 1usize << post_bits;
    let pre = 1usize << (placement.start_site - 1);
    let amps = state.amplitudes();
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    for p in 0..pre {
        for s in 0..post {
            let base = (p << (w + post_bits)) | s;
            for wo in 0..dim {
                let mut acc = C64::new(0.0, 0.0);
                let row = wo * dim;
                for wi in 0..dim {
                    acc += op.as_slice()[row + wi] * amps[base | (wi << post_bits)];
                }
                out[base | (wo << post_bits)] = acc;
            }
        }
    }
    PureState::from_amplitudes(n, out)
}

fn check_keep(keep: &[usize], n: usize) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::EmptyKeepSet);
    }
    let mut sites: Vec<usize> = keep.to_vec();
    sites.sort_unstable();
    sites.dedup();
    for &s in &sites {
        if s == 0 || s > n {
            return Err(Error::SiteOutOfRange {
                site: s,
                num_sites: n,
            });
        }
    }
    Ok(sites)
}

/// Index masks for assembling a full register index from kept-site bits
/// and traced-site bits.
fn site_positions(n: usize, kept: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let kept_pos: Vec<usize> = kept.iter().map(|&s| n - s).collect();
    let traced_pos: Vec<usize> = (1..=n)
        .filter(|s| !kept.contains(s))
        .map(|s| n - s)
        .collect();
    (kept_pos, traced_pos)
}

fn expand(bits: usize, positions: &[usize]) -> usize {
    let mut out = 0usize;
    for (b, &p) in positions.iter().enumerate() {
        if (bits >> (positions.len() - 1 - b)) & 1 == 1 {
            out |= 1 << p;
        }
    }
    out
}

/// Reduced density matrix of a pure state on the kept sites.
pub fn reduced_density_matrix(state: &PureState, keep: &[usize]) -> Result<Matrix> {
    let n = state.num_qubits();
    let sites = check_keep(keep, n)?;
    let (kp, tp) = site_positions(n, &sites);
    let dk = 1usize << kp.len();
    let dt = 1usize << tp.len();
    let amps = state.amplitudes();
    let mut rho = Matrix::zeros(dk, dk);
    for a in 0..dk {
        let ia = expand(a, &kp);
        for b in 0..dk {
            let ib = expand(b, &kp);
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..dt {
                let it = expand(t, &tp);
                acc += amps[ia | it] * amps[ib | it].conj();
            }
            rho[(a, b)] = acc;
        }
    }
    Ok(rho)
}

/// Partial trace of an n-qubit density matrix onto the kept sites.
pub fn partial_trace(rho: &Matrix, num_qubits: usize, keep: &[usize]) -> Result<Matrix> {
    let dim = 1usize << num_qubits;
    if rho.rows() != dim || rho.cols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "density matrix is {}x{}, expected {dim}x{dim}",
            rho.rows(),
            rho.cols()
        )));
    }
    let sites = check_keep(keep, num_qubits)?;
    let (kp, tp) = site_positions(num_qubits, &sites);
    let dk = 1usize << kp.len();
    let dt = 1usize << tp.len();
    let mut out = Matrix::zeros(dk, dk);
    for a in 0..dk {
        let ia = expand(a, &kp);
        for b in 0..dk {
            let ib = expand(b, &kp);
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..dt {
                let it = expand(t, &tp);
                acc += rho[(ia | it, ib | it)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// Rearranges an operator on n qubits across the bipartition `cut | rest`
/// so that the ordinary matrix rank of the result is the operator-Schmidt
/// rank of the input across that cut.
pub fn op_schmidt_reshape(m: &Matrix, num_qubits: usize, cut: &[usize]) -> Result<Matrix> {
    let dim = 1usize << num_qubits;
    if m.rows() != dim || m.cols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, expected {dim}x{dim}",
            m.rows(),
            m.cols()
        )));
    }
    let a_sites = check_keep(cut, num_qubits).map_err(|_| {
        Error::InvalidPartition("cut must be a non-empty set of valid sites".into())
    })?;
    if a_sites.len() == num_qubits {
        return Err(Error::InvalidPartition(
            "cut must be a proper subset of the sites".into(),
        ));
    }
    let (ap, bp) = site_positions(num_qubits, &a_sites);
    let da = 1usize << ap.len();
    let db = 1usize << bp.len();
    let mut out = Matrix::zeros(da * da, db * db);
    for ar in 0..da {
        let iar = expand(ar, &ap);
        for ac in 0..da {
            let iac = expand(ac, &ap);
            for br in 0..db {
                let ibr = expand(br, &bp);
                for bc in 0..db {
                    let ibc = expand(bc, &bp);
                    out[(ar * da + ac, br * db + bc)] = m[(iar | ibr, iac | ibc)];
                }
            }
        }
    }
    Ok(out)
}
