//! Eigen-analysis, SVD, polar decomposition, numerical rank and unitarity
//! deviation for dense complex matrices.

mod lu;
mod schur;
mod svd;

pub use lu::{inverse, lu, Lu};
pub use schur::{hessenberg, schur, triangular_eigenvectors, Schur};
pub use svd::{singular_values, svd, Svd};

use crate::error::{Error, Result};
use crate::tensor::{Matrix, C64};
use serde::Serialize;

/// Default tolerances; all overridable per call.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-9;
pub const DEFAULT_RANK_TOL: f64 = 1e-8;
pub const DEFAULT_SPECTRUM_TOL: f64 = 1e-7;
pub const CLUSTER_RADIUS: f64 = 1e-6;
/// Rank cutoff used when counting eigenvector null spaces. Looser than the
/// generic rank cutoff because cluster centers carry eigenvalue rounding
/// of order sqrt(machine epsilon) for defective blocks.
pub const MULTIPLICITY_RANK_TOL: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct EigenOptions {
    pub residual_tol: f64,
    pub cluster_radius: f64,
    pub multiplicity_rank_tol: f64,
    pub max_dim: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            residual_tol: DEFAULT_RESIDUAL_TOL,
            cluster_radius: CLUSTER_RADIUS,
            multiplicity_rank_tol: MULTIPLICITY_RANK_TOL,
            max_dim: 1024,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenCluster {
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub value: C64,
    pub algebraic: usize,
    pub geometric: usize,
}

/// Full eigen-analysis of one matrix.
#[derive(Debug, Clone)]
pub struct EigenReport {
    /// Eigenvalue multiset in Schur order.
    pub eigenvalues: Vec<C64>,
    /// Clustered eigenvalues sorted by (modulus, phase).
    pub clusters: Vec<EigenCluster>,
    /// Eigenvector columns aligned with `eigenvalues`.
    pub eigenvectors: Matrix,
    /// max over eigenpairs of |Mv - lambda v| / |M|_F.
    pub max_residual: f64,
    pub diagonalizable: bool,
}

impl EigenReport {
    pub fn geometric_sum(&self) -> usize {
        self.clusters.iter().map(|c| c.geometric).sum()
    }
}

fn cluster_values(values: &[C64], radius: f64) -> Vec<(C64, usize)> {
    let scale = values.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(1.0);
    let mut clusters: Vec<(C64, Vec<C64>)> = Vec::new();
    for &v in values {
        match clusters
            .iter_mut()
            .find(|(center, _)| (v - *center).norm() <= radius * scale)
        {
            Some((center, members)) => {
                members.push(v);
                let n = members.len() as f64;
                let sum: C64 = members.iter().sum();
                *center = sum / n;
            }
            None => clusters.push((v, vec![v])),
        }
    }
    let mut out: Vec<(C64, usize)> = clusters
        .into_iter()
        .map(|(center, members)| (center, members.len()))
        .collect();
    out.sort_by(|a, b| {
        let ka = (a.0.norm(), a.0.arg());
        let kb = (b.0.norm(), b.0.arg());
        ka.partial_cmp(&kb).unwrap()
    });
    out
}

/// Eigenvalues, multiplicities (algebraic by clustering, geometric by
/// null-space dimension) and diagonalizability at the given residual
/// tolerance.
pub fn eigen(m: &Matrix, tol: f64) -> Result<EigenReport> {
    eigen_with(
        m,
        &EigenOptions {
            residual_tol: tol,
            ..EigenOptions::default()
        },
    )
}

pub fn eigen_with(m: &Matrix, opts: &EigenOptions) -> Result<EigenReport> {
    assert!(m.is_square());
    if m.rows() > opts.max_dim {
        return Err(Error::DimensionCap {
            dim: m.rows(),
            cap: opts.max_dim,
        });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("eigen input".into()));
    }
    let n = m.rows();
    let s = schur(m, 60)?;
    let eigenvalues: Vec<C64> = (0..n).map(|i| s.t[(i, i)]).collect();
    let eigenvectors = triangular_eigenvectors(&s);
    let mnorm = m.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut max_residual = 0.0f64;
    for k in 0..n {
        let col = eigenvectors.col(k);
        let mv = m.matvec(&col);
        let res: f64 = mv
            .iter()
            .zip(&col)
            .map(|(x, y)| (x - eigenvalues[k] * y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        max_residual = max_residual.max(res / mnorm);
    }
    if max_residual > opts.residual_tol {
        return Err(Error::EigenResidual {
            achieved: max_residual,
            requested: opts.residual_tol,
        });
    }

    let mut clusters = Vec::new();
    for (value, algebraic) in cluster_values(&eigenvalues, opts.cluster_radius) {
        let mut shifted = m.clone();
        shifted.shift_diagonal(-value);
        let sv = singular_values(&shifted)?;
        let s1 = sv.first().copied().unwrap_or(0.0);
        let nullity = if s1 == 0.0 {
            n
        } else {
            sv.iter().filter(|&&x| x <= opts.multiplicity_rank_tol * s1).count()
        };
        let geometric = nullity.clamp(1, algebraic);
        clusters.push(EigenCluster {
            value,
            algebraic,
            geometric,
        });
    }
    let diagonalizable = clusters.iter().map(|c| c.geometric).sum::<usize>() == n;
    Ok(EigenReport {
        eigenvalues,
        clusters,
        eigenvectors,
        max_residual,
        diagonalizable,
    })
}

/// Eigenvalues only (no multiplicity analysis).
pub fn eigenvalues(m: &Matrix) -> Result<Vec<C64>> {
    let s = schur(m, 60)?;
    Ok((0..m.rows()).map(|i| s.t[(i, i)]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMode {
    Exact,
    UpToCommonScalar,
}

/// A claimed eigenvalue multiset.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumClaim {
    #[serde(serialize_with = "crate::report::ser_spectrum_entries")]
    pub entries: Vec<(C64, usize)>,
    pub mode: SpectrumMode,
}

impl SpectrumClaim {
    pub fn exact(entries: &[(C64, usize)]) -> Self {
        SpectrumClaim {
            entries: entries.to_vec(),
            mode: SpectrumMode::Exact,
        }
    }

    pub fn up_to_scalar(entries: &[(C64, usize)]) -> Self {
        SpectrumClaim {
            entries: entries.to_vec(),
            mode: SpectrumMode::UpToCommonScalar,
        }
    }

    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.1).sum()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumCheck {
    pub matched: bool,
    /// Fitted scalar for `UpToCommonScalar` mode (1 for exact matches).
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub scale: C64,
    /// Worst pairing distance relative to the eigenvalue scale.
    pub max_distance: f64,
    pub mismatch: Option<String>,
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(k - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, k - 1);
            out.push(p);
        }
    }
    out
}

/// Compares the computed spectrum of `m` against a claim. Exact mode pairs
/// the multisets directly; `UpToCommonScalar` fits a single complex scale
/// by least squares over multiplicity-preserving assignments tried in
/// modulus-sorted order.
pub fn check_spectrum(m: &Matrix, claim: &SpectrumClaim, tol: f64) -> Result<SpectrumCheck> {
    if claim.total_multiplicity() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "claim multiplicities sum to {}, matrix dimension is {}",
            claim.total_multiplicity(),
            m.rows()
        )));
    }
    let values = eigenvalues(m)?;
    let computed = cluster_values(&values, CLUSTER_RADIUS);
    // coincident claim entries (e.g. a +-x pair at x = 0) act as one
    let claimed: Vec<(C64, usize)> = {
        let scale = claim
            .entries
            .iter()
            .map(|e| e.0.norm())
            .fold(0.0f64, f64::max)
            .max(1.0);
        let mut merged: Vec<(C64, usize)> = Vec::new();
        for &(v, mult) in &claim.entries {
            match merged
                .iter_mut()
                .find(|(center, _)| (v - *center).norm() <= CLUSTER_RADIUS * scale)
            {
                Some((_, m0)) => *m0 += mult,
                None => merged.push((v, mult)),
            }
        }
        merged.sort_by(|a, b| {
            let ka = (a.0.norm(), a.0.arg());
            let kb = (b.0.norm(), b.0.arg());
            ka.partial_cmp(&kb).unwrap()
        });
        merged
    };
    let scale_ref = values.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(1.0);

    if computed.len() != claimed.len() {
        return Ok(SpectrumCheck {
            matched: false,
            scale: C64::new(1.0, 0.0),
            max_distance: f64::INFINITY,
            mismatch: Some(format!(
                "{} computed clusters vs {} claimed entries",
                computed.len(),
                claimed.len()
            )),
        });
    }
    let k = computed.len();
    if k > 7 {
        return Err(Error::ConvergenceFailure(format!(
            "{k} distinct eigenvalue clusters exceed the assignment search limit"
        )));
    }

    let mut best: Option<SpectrumCheck> = None;
    for perm in permutations(k) {
        if (0..k).any(|i| computed[i].1 != claimed[perm[i]].1) {
            continue;
        }
        let scale = match claim.mode {
            SpectrumMode::Exact => C64::new(1.0, 0.0),
            SpectrumMode::UpToCommonScalar => {
                let mut num = C64::new(0.0, 0.0);
                let mut den = 0.0f64;
                for i in 0..k {
                    let w = computed[i].1 as f64;
                    num += computed[i].0 * claimed[perm[i]].0.conj() * w;
                    den += claimed[perm[i]].0.norm_sqr() * w;
                }
                if den < 1e-300 {
                    C64::new(1.0, 0.0)
                } else {
                    num / den
                }
            }
        };
        if claim.mode == SpectrumMode::UpToCommonScalar && scale.norm() < 1e-6 {
            continue;
        }
        let max_distance = (0..k)
            .map(|i| (computed[i].0 - scale * claimed[perm[i]].0).norm())
            .fold(0.0f64, f64::max)
            / scale_ref;
        let matched = max_distance <= tol;
        let cand = SpectrumCheck {
            matched,
            scale,
            max_distance,
            mismatch: if matched {
                None
            } else {
                Some(format!("worst pairing distance {max_distance:.3e} above {tol:.1e}"))
            },
        };
        if matched {
            return Ok(cand);
        }
        if best
            .as_ref()
            .map(|b| cand.max_distance < b.max_distance)
            .unwrap_or(true)
        {
            best = Some(cand);
        }
    }
    Ok(best.unwrap_or(SpectrumCheck {
        matched: false,
        scale: C64::new(1.0, 0.0),
        max_distance: f64::INFINITY,
        mismatch: Some("no multiplicity-preserving assignment exists".into()),
    }))
}

/// Count of singular values above `tol * sigma_max`.
pub fn numerical_rank(m: &Matrix, tol: f64) -> Result<usize> {
    Ok(svd(m)?.rank(tol))
}

/// Polar factors `M = H U` with `H` hermitian positive definite and `U`
/// unitary.
#[derive(Debug, Clone)]
pub struct PolarFactors {
    pub h: Matrix,
    pub u: Matrix,
}

pub fn polar(m: &Matrix) -> Result<PolarFactors> {
    assert!(m.is_square());
    let s = svd(m)?;
    let smax = s.sigma.first().copied().unwrap_or(0.0);
    let smin = s.sigma.last().copied().unwrap_or(0.0);
    if smax == 0.0 || smin <= DEFAULT_RANK_TOL * smax {
        return Err(Error::SingularInput(format!(
            "polar decomposition needs full rank (sigma_min/sigma_max = {:.3e})",
            if smax == 0.0 { 0.0 } else { smin / smax }
        )));
    }
    let n = m.rows();
    let mut us = s.u.clone();
    for (j, &sv) in s.sigma.iter().enumerate() {
        for i in 0..n {
            us[(i, j)] *= sv;
        }
    }
    let h_raw = us.matmul(&s.u.dagger());
    // hermitize against rounding
    let h = h_raw.add(&h_raw.dagger()).scaled(C64::new(0.5, 0.0));
    let u = s.u.matmul(&s.vh);
    Ok(PolarFactors { h, u })
}

/// Frobenius norm of `M M^H - I`.
pub fn unitarity_deviation(m: &Matrix) -> f64 {
    assert!(m.is_square());
    let mut g = m.matmul(&m.dagger());
    g.shift_diagonal(C64::new(-1.0, 0.0));
    g.frobenius_norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eigen_identity() {
        let rep = eigen(&Matrix::identity(16), 1e-9).unwrap();
        assert_eq!(rep.clusters.len(), 1);
        assert_eq!(rep.clusters[0].algebraic, 16);
        assert_eq!(rep.clusters[0].geometric, 16);
        assert!(rep.diagonalizable);
        assert!(rep.max_residual < 1e-13);
    }

    #[test]
    fn eigen_jordan_block() {
        let j = Matrix::from_rows(&[
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ]);
        let rep = eigen(&j, 1e-9).unwrap();
        assert_eq!(rep.clusters.len(), 1);
        assert_eq!(rep.clusters[0].algebraic, 2);
        assert_eq!(rep.clusters[0].geometric, 1);
        assert!(!rep.diagonalizable);
    }

    #[test]
    fn eigen_respects_dimension_cap() {
        let opts = EigenOptions {
            max_dim: 4,
            ..EigenOptions::default()
        };
        assert!(matches!(
            eigen_with(&Matrix::identity(8), &opts),
            Err(Error::DimensionCap { .. })
        ));
    }

    #[test]
    fn spectrum_exact_match_and_reject() {
        let m = Matrix::diag(&[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        let good = SpectrumClaim::exact(&[(c(1.0, 0.0), 3), (c(2.0, 0.0), 1)]);
        assert!(check_spectrum(&m, &good, 1e-7).unwrap().matched);
        let eye = Matrix::identity(4);
        let bad = SpectrumClaim::exact(&[(c(1.0, 0.0), 3), (c(2.0, 0.0), 1)]);
        assert!(!check_spectrum(&eye, &bad, 1e-7).unwrap().matched);
    }

    #[test]
    fn spectrum_scalar_mode_fits_scale() {
        let m = Matrix::diag(&[c(2.0, 0.0), c(2.0, 0.0), c(-2.0, 0.0), c(6.0, 0.0)]);
        let claim =
            SpectrumClaim::up_to_scalar(&[(c(1.0, 0.0), 2), (c(-1.0, 0.0), 1), (c(3.0, 0.0), 1)]);
        let chk = check_spectrum(&m, &claim, 1e-7).unwrap();
        assert!(chk.matched);
        assert!((chk.scale - c(2.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn spectrum_multiplicity_sum_validated() {
        let claim = SpectrumClaim::exact(&[(c(1.0, 0.0), 3)]);
        assert!(check_spectrum(&Matrix::identity(4), &claim, 1e-7).is_err());
    }

    #[test]
    fn polar_of_unitary_and_diagonal() {
        // permutation is unitary: H must be I
        let mut p = Matrix::zeros(3, 3);
        p[(0, 1)] = c(1.0, 0.0);
        p[(1, 2)] = c(1.0, 0.0);
        p[(2, 0)] = c(1.0, 0.0);
        let f = polar(&p).unwrap();
        assert!(f.h.approx_eq(&Matrix::identity(3), 1e-10));
        assert!(f.u.approx_eq(&p, 1e-10));

        let d = Matrix::diag(&[c(2.0, 0.0), c(3.0, 0.0)]);
        let f = polar(&d).unwrap();
        assert!(f.h.approx_eq(&d, 1e-10));
        assert!(f.u.approx_eq(&Matrix::identity(2), 1e-10));
    }

    #[test]
    fn polar_invariants_on_random_input() {
        let mut s = 42u64;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s as f64 / u64::MAX as f64) * 2.0 - 1.0
        };
        let m = Matrix::from_fn(6, 6, |_, _| c(next(), next())).add(&Matrix::identity(6).scaled(c(3.0, 0.0)));
        let f = polar(&m).unwrap();
        let back = f.h.matmul(&f.u);
        assert!(back.sub(&m).frobenius_norm() < 1e-9 * m.frobenius_norm());
        assert!(f.h.hermitian_deviation() < 1e-10);
        assert!(unitarity_deviation(&f.u) < 1e-10);
    }

    #[test]
    fn polar_rejects_singular() {
        let m = Matrix::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(2.0, 0.0), c(4.0, 0.0)],
        ]);
        assert!(matches!(polar(&m), Err(Error::SingularInput(_))));
    }

    #[test]
    fn operator_schmidt_ranks_via_svd() {
        // SWAP reshaped across the 1|2 cut has full rank; tensor products
        // and the identity reshape to rank one
        let mut swap = Matrix::zeros(4, 4);
        swap[(0, 0)] = c(1.0, 0.0);
        swap[(1, 2)] = c(1.0, 0.0);
        swap[(2, 1)] = c(1.0, 0.0);
        swap[(3, 3)] = c(1.0, 0.0);
        let reshaped = crate::tensor::op_schmidt_reshape(&swap, 2, &[1]).unwrap();
        assert_eq!(numerical_rank(&reshaped, DEFAULT_RANK_TOL).unwrap(), 4);
        let eye = crate::tensor::op_schmidt_reshape(&Matrix::identity(4), 2, &[2]).unwrap();
        assert_eq!(numerical_rank(&eye, DEFAULT_RANK_TOL).unwrap(), 1);
    }

    #[test]
    fn published_eigenbasis_is_full_rank_with_skewed_polar_factor() {
        let v = crate::operators::case2_eigenbasis();
        assert_eq!(numerical_rank(&v, DEFAULT_RANK_TOL).unwrap(), 16);
        let f = polar(&v).unwrap();
        assert!(f.h.matmul(&f.u).sub(&v).frobenius_norm() < 1e-9 * v.frobenius_norm());
        assert!(f.h.hermitian_deviation() < 1e-10);
        assert!(unitarity_deviation(&f.u) < 1e-10);
        // the columns are not orthonormal, so H stays away from any scalar
        let mean = f.h.trace() / 16.0;
        let mut dev = f.h.clone();
        dev.shift_diagonal(-mean);
        assert!(dev.frobenius_norm() > 0.1);
    }

    #[test]
    fn unitarity_deviation_basics() {
        assert!(unitarity_deviation(&Matrix::identity(8)) == 0.0);
        let m = Matrix::identity(4).scaled(c(2.0, 0.0));
        assert!((unitarity_deviation(&m) - 6.0).abs() < 1e-12);
    }
}
