//! Entanglement-class analysis for pure states: local ranks, tangle
//! invariants, spectator stripping, explicit local-operator equivalence
//! certificates for W-type states, and the invertible-local-operator
//! unitarizability obstruction test for candidate braiding operators.

use crate::error::{Error, Result};
use crate::registry::GybeInstance;
use crate::spectral::{eigen_with, eigenvalues, inverse, svd, EigenOptions};
use crate::tensor::{
    op_schmidt_reshape, reduced_density_matrix, Matrix, PureState, C64,
};
use serde::Serialize;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Tangle threshold separating the two genuinely tripartite classes.
pub const TAU_TOL: f64 = 1e-8;
/// Relative rank tolerance for local reduced density matrices.
pub const LOCAL_RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SloccClass {
    Product,
    Biseparable,
    W,
    Ghz,
    Undetermined,
}

#[derive(Debug, Clone, Serialize)]
pub struct SloccReport {
    pub local_ranks: Vec<usize>,
    pub three_tangle: Option<f64>,
    /// Pairwise concurrences ((site, site), value) of the two-qubit
    /// marginals, 3-qubit cores only.
    pub concurrences: Vec<((usize, usize), f64)>,
    pub class: SloccClass,
    pub spectator_sites: Vec<usize>,
}

/// Eigenvalues of a 2x2 hermitian PSD matrix, descending.
fn rdm_eigenvalues(rho: &Matrix) -> Result<Vec<f64>> {
    let s = svd(rho)?;
    Ok(s.sigma)
}

fn local_rank(rho: &Matrix, tol: f64) -> Result<usize> {
    let ev = rdm_eigenvalues(rho)?;
    let top = ev.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(ev.iter().filter(|&&x| x > tol * top).count())
}

/// Genuine-tripartite-entanglement invariant of a normalized 3-qubit state
/// (the modulus of the degree-4 hyperdeterminant, scaled to [0, 1]).
pub fn three_tangle(state: &PureState) -> Result<f64> {
    if state.num_qubits() != 3 {
        return Err(Error::DimensionMismatch(format!(
            "three_tangle needs 3 qubits, got {}",
            state.num_qubits()
        )));
    }
    if !state.is_normalized() {
        return Err(Error::UnnormalizedState {
            deviation: (state.norm() - 1.0).abs(),
        });
    }
    let a = |i: usize| state.amplitudes()[i];
    let (a000, a001, a010, a011) = (a(0b000), a(0b001), a(0b010), a(0b011));
    let (a100, a101, a110, a111) = (a(0b100), a(0b101), a(0b110), a(0b111));
    let d1 = a000 * a000 * a111 * a111
        + a001 * a001 * a110 * a110
        + a010 * a010 * a101 * a101
        + a100 * a100 * a011 * a011;
    let d2 = a000 * a111 * a011 * a100
        + a000 * a111 * a101 * a010
        + a000 * a111 * a110 * a001
        + a011 * a100 * a101 * a010
        + a011 * a100 * a110 * a001
        + a101 * a010 * a110 * a001;
    let d3 = a000 * a110 * a101 * a011 + a111 * a001 * a010 * a100;
    let tau = 4.0 * (d1 - d2 * 2.0 + d3 * 4.0).norm();
    Ok(tau.min(1.0 + 1e-12))
}

/// Wootters concurrence of a two-qubit density matrix.
pub fn concurrence(rho: &Matrix) -> Result<f64> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(Error::DimensionMismatch(
            "concurrence needs a 4x4 density matrix".into(),
        ));
    }
    if rho.hermitian_deviation() > 1e-8 {
        return Err(Error::NonPhysicalState("not hermitian".into()));
    }
    if (rho.trace().re - 1.0).abs() > 1e-8 || rho.trace().im.abs() > 1e-10 {
        return Err(Error::NonPhysicalState("trace differs from one".into()));
    }
    let probe = eigenvalues(rho)?;
    if probe.iter().any(|z| z.re < -1e-8) {
        return Err(Error::NonPhysicalState("negative eigenvalue".into()));
    }
    // spin-flipped companion (Y x Y) conj(rho) (Y x Y)
    let mut yy = Matrix::zeros(4, 4);
    yy[(0, 3)] = c(-1.0, 0.0);
    yy[(1, 2)] = c(1.0, 0.0);
    yy[(2, 1)] = c(1.0, 0.0);
    yy[(3, 0)] = c(-1.0, 0.0);
    let rho_tilde = yy.matmul(&rho.conj()).matmul(&yy);
    let prod = rho.matmul(&rho_tilde);
    let mut lams: Vec<f64> = eigenvalues(&prod)?
        .iter()
        .map(|z| z.re.max(0.0).sqrt())
        .collect();
    lams.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok((lams[0] - lams[1] - lams[2] - lams[3]).max(0.0))
}

/// Removes every site whose one-site marginal is pure (rank one at the
/// given tolerance). Returns the residual core and the removed sites under
/// their original labels.
pub fn strip_spectators(state: &PureState, tol: f64) -> (PureState, Vec<usize>) {
    let mut labels: Vec<usize> = (1..=state.num_qubits()).collect();
    let mut current = state.clone();
    let mut spectators = Vec::new();
    'outer: loop {
        let n = current.num_qubits();
        if n == 0 {
            break;
        }
        for site in 1..=n {
            let rho = match reduced_density_matrix(&current, &[site]) {
                Ok(r) => r,
                Err(_) => break 'outer,
            };
            let ev = match rdm_eigenvalues(&rho) {
                Ok(e) => e,
                Err(_) => break 'outer,
            };
            if ev.len() == 2 && ev[1] <= tol * ev[0].max(f64::MIN_POSITIVE) {
                // contract the dominant local vector out of the state
                let chi = dominant_local_vector(&rho);
                let amps = current.amplitudes();
                let post = n - site;
                let mut out = vec![c(0.0, 0.0); 1 << (n - 1)];
                for idx in 0..out.len() {
                    let high = idx >> post;
                    let low = idx & ((1 << post) - 1);
                    let mut acc = c(0.0, 0.0);
                    for b in 0..2usize {
                        let full = (high << (post + 1)) | (b << post) | low;
                        acc += chi[b].conj() * amps[full];
                    }
                    out[idx] = acc;
                }
                spectators.push(labels.remove(site - 1));
                let next = PureState::from_amplitudes(n - 1, out)
                    .expect("contracted state")
                    .normalized();
                current = next;
                continue 'outer;
            }
        }
        break;
    }
    spectators.sort_unstable();
    (current, spectators)
}

fn dominant_local_vector(rho: &Matrix) -> [C64; 2] {
    // power iteration on a 2x2 PSD matrix
    let mut v = [c(1.0, 0.0), c(1.0, 0.0)];
    for _ in 0..64 {
        let w = [
            rho[(0, 0)] * v[0] + rho[(0, 1)] * v[1],
            rho[(1, 0)] * v[0] + rho[(1, 1)] * v[1],
        ];
        let n = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
        if n < 1e-300 {
            return [c(1.0, 0.0), c(0.0, 0.0)];
        }
        v = [w[0] / n, w[1] / n];
    }
    v
}

/// Full three-qubit entanglement-class decision.
pub fn classify3(state: &PureState, tol: f64) -> Result<SloccReport> {
    if state.num_qubits() != 3 {
        return Err(Error::DimensionMismatch(format!(
            "classify3 needs 3 qubits, got {}",
            state.num_qubits()
        )));
    }
    if !state.is_normalized() {
        return Err(Error::UnnormalizedState {
            deviation: (state.norm() - 1.0).abs(),
        });
    }
    let mut ranks = Vec::with_capacity(3);
    for site in 1..=3 {
        let rho = reduced_density_matrix(state, &[site])?;
        ranks.push(local_rank(&rho, LOCAL_RANK_TOL)?);
    }
    let tau = three_tangle(state)?;
    let mut concurrences = Vec::new();
    for (a, b) in [(1usize, 2usize), (1, 3), (2, 3)] {
        let rho = reduced_density_matrix(state, &[a, b])?;
        concurrences.push(((a, b), concurrence(&rho)?));
    }
    let rank1_sites: Vec<usize> = (0..3).filter(|&i| ranks[i] == 1).collect();
    let class = match rank1_sites.len() {
        3 => SloccClass::Product,
        1 => SloccClass::Biseparable,
        0 => {
            if tau < tol.max(TAU_TOL) {
                SloccClass::W
            } else {
                SloccClass::Ghz
            }
        }
        _ => SloccClass::Undetermined,
    };
    Ok(SloccReport {
        local_ranks: ranks,
        three_tangle: Some(tau),
        concurrences,
        class,
        spectator_sites: vec![],
    })
}

/// Tensor product of per-site invertible 2x2 operators.
#[derive(Debug, Clone)]
pub struct IloOperator {
    pub factors: Vec<Matrix>,
}

impl IloOperator {
    pub fn new(factors: Vec<Matrix>) -> Result<Self> {
        for f in &factors {
            if f.rows() != 2 || f.cols() != 2 {
                return Err(Error::DimensionMismatch(
                    "local factors must be 2x2".into(),
                ));
            }
            let det = f[(0, 0)] * f[(1, 1)] - f[(0, 1)] * f[(1, 0)];
            if det.norm() < 1e-12 {
                return Err(Error::SingularInput("local factor not invertible".into()));
            }
        }
        Ok(IloOperator { factors })
    }

    pub fn num_sites(&self) -> usize {
        self.factors.len()
    }
}

/// Applies a local operator site by site.
pub fn apply_ilo(state: &PureState, ilo: &IloOperator) -> Result<PureState> {
    let n = state.num_qubits();
    if ilo.num_sites() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} local factors for {} qubits",
            ilo.num_sites(),
            n
        )));
    }
    let mut amps = state.amplitudes().to_vec();
    for (site, f) in ilo.factors.iter().enumerate() {
        let post = n - site - 1;
        let mut next = vec![c(0.0, 0.0); amps.len()];
        for idx in 0..amps.len() {
            let bit = (idx >> post) & 1;
            for out_bit in 0..2usize {
                let target = (idx & !(1 << post)) | (out_bit << post);
                next[target] += f[(out_bit, bit)] * amps[idx];
            }
        }
        amps = next;
    }
    PureState::from_amplitudes(n, amps)
}

#[derive(Debug, Clone)]
pub struct WCertificate {
    pub ilo: IloOperator,
    /// Relative distance between the transformed state and the standard
    /// W state after fitting the global scalar.
    pub residual: f64,
    /// Whether the support sat on the bit-flip complements and a global
    /// flip was folded into the certificate.
    pub complement_pattern: bool,
}

/// Constructs an explicit invertible local operator taking a state with
/// vacuum-plus-single-excitation support (or its bit-flip complement) to
/// the standard W state, verifying it by application. Returns None when
/// the support pattern does not fit or an excitation amplitude vanishes.
pub fn w_equivalence_certificate(state: &PureState) -> Option<WCertificate> {
    let n = state.num_qubits();
    if n < 2 {
        return None;
    }
    let amps = state.amplitudes();
    let peak = amps.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    if peak == 0.0 {
        return None;
    }
    let support_tol = 1e-10 * peak;
    let singles: Vec<usize> = (0..n).map(|q| 1usize << (n - 1 - q)).collect();
    let fits = |flip: bool| -> Option<(C64, Vec<C64>)> {
        let idx_of = |i: usize| if flip { (1 << n) - 1 - i } else { i };
        let vacuum = amps[idx_of(0)];
        let mut exc = Vec::with_capacity(n);
        for &e in &singles {
            let a = amps[idx_of(e)];
            if a.norm() <= support_tol {
                return None;
            }
            exc.push(a);
        }
        // everything else must vanish
        for i in 0..amps.len() {
            let raw = idx_of(i);
            if i != 0 && !singles.contains(&i) && amps[raw].norm() > support_tol {
                return None;
            }
        }
        Some((vacuum, exc))
    };
    let (flip, vacuum, exc) = match fits(false) {
        Some((v, e)) => (false, v, e),
        None => match fits(true) {
            Some((v, e)) => (true, v, e),
            None => return None,
        },
    };
    // site 1 absorbs the vacuum amplitude; every site rescales its
    // excitation to one
    let x = Matrix::from_rows(&[
        vec![c(0.0, 0.0), c(1.0, 0.0)],
        vec![c(1.0, 0.0), c(0.0, 0.0)],
    ]);
    let mut factors = Vec::with_capacity(n);
    for (q, aq) in exc.iter().enumerate() {
        let inv = c(1.0, 0.0) / aq;
        let top_right = if q == 0 { -vacuum / exc[0] } else { c(0.0, 0.0) };
        let f = Matrix::from_rows(&[
            vec![c(1.0, 0.0), top_right],
            vec![c(0.0, 0.0), inv],
        ]);
        factors.push(if flip { f.matmul(&x) } else { f });
    }
    let ilo = IloOperator::new(factors).ok()?;
    let out = apply_ilo(state, &ilo).ok()?;
    let w = PureState::w(n);
    let scale = w.inner(&out);
    let residual = {
        let mut acc = 0.0f64;
        for (o, t) in out.amplitudes().iter().zip(w.amplitudes()) {
            acc += (o - scale * t).norm_sqr();
        }
        acc.sqrt() / out.norm().max(f64::MIN_POSITIVE)
    };
    if residual > 1e-10 {
        return None;
    }
    Some(WCertificate {
        ilo,
        residual,
        complement_pattern: flip,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitarizabilityVerdict {
    AlreadyUnitary,
    ImpossibleModuli,
    ImpossibleNondiagonalizable,
    ImpossibleFactorability,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct UnitarizabilityReport {
    pub verdict: UnitarizabilityVerdict,
    /// (max - min) / max over eigenvalue moduli.
    pub moduli_spread: f64,
    pub diagonalizable: Option<bool>,
    /// Operator-Schmidt rank of (V V^H)^{-1} across each single-site cut.
    pub cut_ranks: Option<Vec<usize>>,
    /// Which eigenbasis was used for the factorability step.
    pub eigenbasis: String,
    /// Per-site positive factors of a candidate conjugator, present only
    /// when every cut factorizes.
    #[serde(skip)]
    pub candidate_factors: Option<Vec<Matrix>>,
}

/// Decision cascade for "does an invertible local operator make this
/// operator unitary":
/// already unitary / unequal eigenvalue moduli (similarity preserves the
/// spectrum) / defective / non-factorable Gram inverse of the eigenbasis.
/// A factorable Gram inverse yields a candidate conjugator and the verdict
/// stays inconclusive.
pub fn ilo_unitarizability_test(inst: &GybeInstance) -> Result<UnitarizabilityReport> {
    let r = &inst.r;
    let udev = crate::spectral::unitarity_deviation(r);
    if udev < 1e-9 {
        return Ok(UnitarizabilityReport {
            verdict: UnitarizabilityVerdict::AlreadyUnitary,
            moduli_spread: 0.0,
            diagonalizable: None,
            cut_ranks: None,
            eigenbasis: "not needed".into(),
            candidate_factors: None,
        });
    }
    let rep = eigen_with(r, &EigenOptions::default())?;
    let moduli: Vec<f64> = rep.eigenvalues.iter().map(|z| z.norm()).collect();
    let max = moduli.iter().cloned().fold(0.0f64, f64::max);
    let min = moduli.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = if max > 0.0 { (max - min) / max } else { 0.0 };
    if spread > 1e-6 {
        return Ok(UnitarizabilityReport {
            verdict: UnitarizabilityVerdict::ImpossibleModuli,
            moduli_spread: spread,
            diagonalizable: None,
            cut_ranks: None,
            eigenbasis: "not needed".into(),
            candidate_factors: None,
        });
    }
    if !rep.diagonalizable {
        return Ok(UnitarizabilityReport {
            verdict: UnitarizabilityVerdict::ImpossibleNondiagonalizable,
            moduli_spread: spread,
            diagonalizable: Some(false),
            cut_ranks: None,
            eigenbasis: "not needed".into(),
            candidate_factors: None,
        });
    }
    // factorability of (V V^H)^{-1} across every single-site cut
    let (v, basis) = if inst.case_id == "6B" {
        (crate::operators::case2_eigenbasis(), "published-columns".to_string())
    } else {
        (rep.eigenvectors.clone(), "computed".to_string())
    };
    let gram_inv = inverse(&v.matmul(&v.dagger()))?;
    let num_qubits = inst.m;
    let mut cut_ranks = Vec::with_capacity(num_qubits);
    for site in 1..=num_qubits {
        let reshaped = op_schmidt_reshape(&gram_inv, num_qubits, &[site])?;
        cut_ranks.push(svd(&reshaped)?.rank(crate::spectral::DEFAULT_RANK_TOL));
    }
    if cut_ranks.iter().any(|&rk| rk >= 2) {
        return Ok(UnitarizabilityReport {
            verdict: UnitarizabilityVerdict::ImpossibleFactorability,
            moduli_spread: spread,
            diagonalizable: Some(true),
            cut_ranks: Some(cut_ranks),
            eigenbasis: basis,
            candidate_factors: None,
        });
    }
    // every cut has rank one: peel per-site positive factors and build a
    // candidate conjugator
    let factors = extract_site_factors(&gram_inv, num_qubits)?;
    Ok(UnitarizabilityReport {
        verdict: UnitarizabilityVerdict::Inconclusive,
        moduli_spread: spread,
        diagonalizable: Some(true),
        cut_ranks: Some(cut_ranks),
        eigenbasis: basis,
        candidate_factors: Some(factors),
    })
}

/// Splits a positive matrix with operator-Schmidt rank one across every
/// single-site cut into per-site 2x2 factors (nearest-Kronecker peeling),
/// then takes hermitian square roots so the product reconstructs a
/// candidate `Q` with `Q^H Q` equal to the input.
fn extract_site_factors(m: &Matrix, num_qubits: usize) -> Result<Vec<Matrix>> {
    let mut rest = m.clone();
    let mut qubits_left = num_qubits;
    let mut factors = Vec::with_capacity(num_qubits);
    while qubits_left > 1 {
        let reshaped = op_schmidt_reshape(&rest, qubits_left, &[1])?;
        let s = svd(&reshaped)?;
        let sigma = s.sigma[0];
        // leading Kronecker factor (2x2) and remainder
        let mut a = Matrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                a[(i, j)] = s.u[(i * 2 + j, 0)] * sigma.sqrt();
            }
        }
        let rdim = 1 << (qubits_left - 1);
        let mut b = Matrix::zeros(rdim, rdim);
        for i in 0..rdim {
            for j in 0..rdim {
                b[(i, j)] = s.vh[(0, i * rdim + j)] * sigma.sqrt();
            }
        }
        // fix phases so both factors are hermitian positive
        let a = hermitize_positive(&a);
        let b = hermitize_positive(&b);
        factors.push(sqrt_2x2_psd(&a)?);
        rest = b;
        qubits_left -= 1;
    }
    factors.push(sqrt_2x2_psd(&hermitize_positive(&rest))?);
    Ok(factors)
}

fn hermitize_positive(m: &Matrix) -> Matrix {
    // a rank-one Kronecker factor of a positive matrix is positive up to a
    // phase; rotate so the trace is real positive, then symmetrize
    let tr = m.trace();
    let phase = if tr.norm() > 0.0 {
        tr / tr.norm()
    } else {
        c(1.0, 0.0)
    };
    let rotated = m.scaled(phase.conj());
    rotated.add(&rotated.dagger()).scaled(c(0.5, 0.0))
}

/// Hermitian square root of a 2x2 PSD matrix in closed form.
fn sqrt_2x2_psd(m: &Matrix) -> Result<Matrix> {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    let tr = a + d;
    let det = (a * d) - b.norm_sqr();
    let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
    let l1 = (tr / 2.0 + disc).max(0.0);
    let l2 = (tr / 2.0 - disc).max(0.0);
    let (s1, s2) = (l1.sqrt(), l2.sqrt());
    // sqrt(M) = (M + sqrt(det) I) / sqrt(tr + 2 sqrt(det))
    let sdet = (s1 * s2).max(0.0);
    let denom = (l1 + l2 + 2.0 * sdet).sqrt();
    if denom < 1e-150 {
        return Err(Error::SingularInput("zero factor in square root".into()));
    }
    let mut out = m.clone();
    out.shift_diagonal(c(sdet, 0.0));
    Ok(out.scaled(c(1.0 / denom, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_standard_states() {
        let w = classify3(&PureState::w(3), 1e-8).unwrap();
        assert_eq!(w.class, SloccClass::W);
        assert!(w.three_tangle.unwrap() < 1e-10);
        assert_eq!(w.local_ranks, vec![2, 2, 2]);

        let ghz = classify3(&PureState::ghz(3), 1e-8).unwrap();
        assert_eq!(ghz.class, SloccClass::Ghz);
        assert!((ghz.three_tangle.unwrap() - 1.0).abs() < 1e-10);

        // |0> x Bell
        let mut amps = vec![c(0.0, 0.0); 8];
        amps[0b000] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amps[0b011] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let bisep = PureState::from_amplitudes(3, amps).unwrap();
        let rep = classify3(&bisep, 1e-8).unwrap();
        assert_eq!(rep.class, SloccClass::Biseparable);
        assert_eq!(rep.local_ranks[0], 1);

        let prod = classify3(&PureState::ket("010"), 1e-8).unwrap();
        assert_eq!(prod.class, SloccClass::Product);
    }

    #[test]
    fn classify_rejects_unnormalized() {
        let amps = vec![c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
                        c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let s = PureState::from_amplitudes(3, amps).unwrap();
        assert!(matches!(
            classify3(&s, 1e-8),
            Err(Error::UnnormalizedState { .. })
        ));
    }

    #[test]
    fn tangle_of_ghz_superposition_matches_closed_form() {
        // alpha |000> + beta |111>: tangle is 4 |alpha beta|^2
        for (ar, br) in [(0.6f64, 0.8f64), (0.3, (1.0f64 - 0.09).sqrt())] {
            let mut amps = vec![c(0.0, 0.0); 8];
            amps[0] = c(ar, 0.0);
            amps[7] = c(0.0, br);
            let s = PureState::from_amplitudes(3, amps).unwrap();
            let tau = three_tangle(&s).unwrap();
            let expect = 4.0 * ar * ar * br * br;
            assert!((tau - expect).abs() < 1e-10, "tau={tau} expect={expect}");
        }
    }

    #[test]
    fn tangle_invariant_under_local_unitaries() {
        // deterministic pseudo-random single-qubit unitaries
        let mut seed = 77u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed as f64 / u64::MAX as f64) * std::f64::consts::PI
        };
        let w = PureState::w(3);
        let tau0 = three_tangle(&w).unwrap();
        for _ in 0..25 {
            let factors: Vec<Matrix> = (0..3)
                .map(|_| {
                    let (t, p, l) = (next(), next(), next());
                    Matrix::from_rows(&[
                        vec![
                            C64::from_polar(t.cos(), p),
                            C64::from_polar(t.sin(), l),
                        ],
                        vec![
                            C64::from_polar(-t.sin(), -l),
                            C64::from_polar(t.cos(), -p),
                        ],
                    ])
                })
                .collect();
            let u = IloOperator::new(factors).unwrap();
            let out = apply_ilo(&w, &u).unwrap().normalized();
            let tau = three_tangle(&out).unwrap();
            assert!((tau - tau0).abs() < 1e-10);
        }
    }

    #[test]
    fn class_invariant_under_random_ilos() {
        let mut seed = 1234u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed as f64 / u64::MAX as f64) * 1.2 - 0.6
        };
        for state in [PureState::w(3), PureState::ghz(3)] {
            let want = classify3(&state, 1e-8).unwrap().class;
            for _ in 0..20 {
                let factors: Vec<Matrix> = (0..3)
                    .map(|_| {
                        // identity plus a moderate perturbation stays
                        // comfortably invertible
                        Matrix::from_rows(&[
                            vec![c(1.0 + 0.3 * next(), 0.2 * next()), c(0.3 * next(), 0.3 * next())],
                            vec![c(0.3 * next(), 0.3 * next()), c(1.0 + 0.3 * next(), 0.2 * next())],
                        ])
                    })
                    .collect();
                let q = IloOperator::new(factors).unwrap();
                let out = apply_ilo(&state, &q).unwrap().normalized();
                assert_eq!(classify3(&out, 1e-8).unwrap().class, want);
            }
        }
    }

    #[test]
    fn concurrence_of_w_and_ghz_marginals() {
        let w_rho = reduced_density_matrix(&PureState::w(3), &[1, 2]).unwrap();
        let cw = concurrence(&w_rho).unwrap();
        assert!((cw - 2.0 / 3.0).abs() < 1e-10, "c={cw}");
        let g_rho = reduced_density_matrix(&PureState::ghz(3), &[1, 2]).unwrap();
        assert!(concurrence(&g_rho).unwrap() < 1e-10);
        let mixed = Matrix::identity(4).scaled(c(0.25, 0.0));
        assert!(concurrence(&mixed).unwrap() < 1e-12);
    }

    #[test]
    fn concurrence_rejects_non_physical() {
        let bad = Matrix::identity(4);
        assert!(concurrence(&bad).is_err());
    }

    #[test]
    fn strip_spectators_basics() {
        // W3 x |00>
        let w3 = PureState::w(3);
        let mut amps = vec![c(0.0, 0.0); 32];
        for (i, a) in w3.amplitudes().iter().enumerate() {
            amps[i << 2] = *a;
        }
        let s = PureState::from_amplitudes(5, amps).unwrap();
        let (core, spect) = strip_spectators(&s, 1e-8);
        assert_eq!(core.num_qubits(), 3);
        assert_eq!(spect, vec![4, 5]);
        assert!((core.inner(&w3).norm() - 1.0).abs() < 1e-10);

        let (core, spect) = strip_spectators(&PureState::ket("0101"), 1e-8);
        assert_eq!(core.num_qubits(), 0);
        assert_eq!(spect, vec![1, 2, 3, 4]);

        let (core, spect) = strip_spectators(&PureState::ghz(3), 1e-8);
        assert_eq!(core.num_qubits(), 3);
        assert!(spect.is_empty());
    }

    #[test]
    fn certificate_matches_published_template() {
        // |000> + (i/sqrt5)(|100> + |010> + |001>)
        let a = 1.0 / 5f64.sqrt();
        let mut amps = vec![c(0.0, 0.0); 8];
        amps[0b000] = c(1.0, 0.0);
        for e in [0b100, 0b010, 0b001] {
            amps[e] = c(0.0, a);
        }
        let s = PureState::from_amplitudes(3, amps).unwrap();
        let cert = w_equivalence_certificate(&s).expect("certificate");
        assert!(cert.residual < 1e-12);
        assert!(!cert.complement_pattern);
        // first factor [[1, i/alpha], [0, -i/alpha]] with alpha = 1/sqrt5
        let f = &cert.ilo.factors[0];
        assert!((f[(0, 1)] - c(0.0, 1.0 / a)).norm() < 1e-12);
        assert!((f[(1, 1)] - c(0.0, -1.0 / a)).norm() < 1e-12);
        // remaining factors diagonal
        assert!(cert.ilo.factors[1][(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn certificate_failure_cases() {
        assert!(w_equivalence_certificate(&PureState::ket("000")).is_none());
        assert!(w_equivalence_certificate(&PureState::ghz(3)).is_none());
        // zero amplitude on one excitation
        let mut amps = vec![c(0.0, 0.0); 8];
        amps[0b000] = c(1.0, 0.0);
        amps[0b100] = c(0.5, 0.0);
        amps[0b010] = c(0.5, 0.0);
        let s = PureState::from_amplitudes(3, amps).unwrap();
        assert!(w_equivalence_certificate(&s).is_none());
    }

    #[test]
    fn certificate_handles_complement_support() {
        // (1/2)|011> - 2|101> - (1/2)|110>
        let mut amps = vec![c(0.0, 0.0); 8];
        amps[0b011] = c(0.5, 0.0);
        amps[0b101] = c(-2.0, 0.0);
        amps[0b110] = c(-0.5, 0.0);
        let s = PureState::from_amplitudes(3, amps).unwrap();
        let cert = w_equivalence_certificate(&s).expect("certificate");
        assert!(cert.complement_pattern);
        assert!(cert.residual < 1e-12);
        let out = apply_ilo(&s, &cert.ilo).unwrap().normalized();
        let overlap = out.inner(&PureState::w(3)).norm();
        assert!((overlap - 1.0).abs() < 1e-10);
    }

    #[test]
    fn eigenvalue_moduli_invariant_under_similarity() {
        // conjugating by an invertible operator preserves the spectrum
        let mut seed = 99u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed as f64 / u64::MAX as f64) * 0.8 - 0.4
        };
        let m = Matrix::from_fn(8, 8, |_, _| c(next(), next()));
        let mut q = Matrix::from_fn(8, 8, |_, _| c(0.25 * next(), 0.25 * next()));
        q.shift_diagonal(c(1.0, 0.0));
        let qi = inverse(&q).unwrap();
        let conj = q.matmul(&m).matmul(&qi);
        let mut e1: Vec<f64> = eigenvalues(&m).unwrap().iter().map(|z| z.norm()).collect();
        let mut e2: Vec<f64> = eigenvalues(&conj).unwrap().iter().map(|z| z.norm()).collect();
        e1.sort_by(|a, b| a.partial_cmp(b).unwrap());
        e2.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in e1.iter().zip(&e2) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn factor_extraction_reconstructs_products() {
        // A (x) B (x) C positive: peeled factors must square back to it
        let site = |a: f64, b: C64, d: f64| {
            Matrix::from_rows(&[vec![c(a, 0.0), b], vec![b.conj(), c(d, 0.0)]])
        };
        let m1 = site(2.0, c(0.3, 0.1), 1.0);
        let m2 = site(1.5, c(-0.2, 0.4), 2.5);
        let m3 = site(1.0, c(0.1, -0.1), 0.8);
        let prod = crate::tensor::kron(&crate::tensor::kron(&m1, &m2), &m3);
        let factors = extract_site_factors(&prod, 3).unwrap();
        assert_eq!(factors.len(), 3);
        let rebuilt = crate::tensor::kron(
            &crate::tensor::kron(
                &factors[0].matmul(&factors[0]),
                &factors[1].matmul(&factors[1]),
            ),
            &factors[2].matmul(&factors[2]),
        );
        assert!(rebuilt.sub(&prod).frobenius_norm() < 1e-8 * prod.frobenius_norm());
    }

    #[test]
    fn sqrt_2x2_roundtrip() {
        let m = Matrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.5, 0.3)],
            vec![c(0.5, -0.3), c(1.0, 0.0)],
        ]);
        let s = sqrt_2x2_psd(&m).unwrap();
        assert!(s.matmul(&s).sub(&m).frobenius_norm() < 1e-12);
    }

    #[test]
    fn apply_ilo_identity() {
        let s = PureState::w(4);
        let ident = IloOperator::new(vec![Matrix::identity(2); 4]).unwrap();
        let out = apply_ilo(&s, &ident).unwrap();
        assert_eq!(out, s);
    }
}
