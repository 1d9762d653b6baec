//! Machine checks: the generalized Yang-Baxter identity, braid-relation and
//! far-commutativity residuals, the closed-form power identity for the
//! unitary W entangler, finite-order probes and the per-case verification
//! pipeline.

use crate::error::{Error, Result};
use crate::operators::eta_sum;
use crate::registry::{CaseData, GybeInstance};
use crate::report::Outcome;
use crate::slocc::{
    classify3, ilo_unitarizability_test, strip_spectators, w_equivalence_certificate, SloccClass,
    SloccReport, UnitarizabilityReport,
};
use crate::spectral::{
    check_spectrum, eigen_with, unitarity_deviation, EigenOptions, SpectrumCheck,
};
use crate::tensor::{apply, kron, Matrix, C64};
use serde::Serialize;
use std::collections::BTreeMap;

/// Hard cap on the dimension of any dense identity check.
pub const DIMENSION_CAP: usize = 1 << 14;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Relative residual of the gYBE for an operator window of width m with
/// identity padding l:
/// `|(R x I)(I x R)(R x I) - (I x R)(R x I)(I x R)| / |lhs|`.
pub fn gybe_residual(r: &Matrix, m: usize, l: usize) -> Result<f64> {
    if r.rows() != 1 << m {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, window width m={} needs {}",
            r.rows(),
            r.cols(),
            m,
            1 << m
        )));
    }
    let dim = r.rows() << l;
    if dim > DIMENSION_CAP {
        return Err(Error::DimensionCap {
            dim,
            cap: DIMENSION_CAP,
        });
    }
    let pad = Matrix::identity(1 << l);
    let a = kron(r, &pad);
    let b = kron(&pad, r);
    let lhs = a.matmul(&b).matmul(&a);
    let rhs = b.matmul(&a).matmul(&b);
    let denom = lhs.frobenius_norm().max(f64::MIN_POSITIVE);
    Ok(lhs.sub(&rhs).frobenius_norm() / denom)
}

pub fn gybe_check(inst: &GybeInstance, _tol: f64) -> Result<f64> {
    gybe_residual(&inst.r, inst.m, inst.l)
}

/// Braid-generator placement for an instance: generator i occupies qubits
/// `l(i-1)+1 ..= l(i-1)+m` on a chain of `l(num_strands-1)+m` qubits.
#[derive(Debug, Clone, Copy)]
pub struct BraidEmbedding {
    pub strand: usize,
    pub num_strands: usize,
    pub chain_qubits: usize,
    pub window_start: usize,
}

impl BraidEmbedding {
    pub fn new(inst: &GybeInstance, strand: usize, num_strands: usize) -> Result<Self> {
        if strand == 0 || strand >= num_strands {
            return Err(Error::DomainViolation {
                case: inst.case_id.clone(),
                reason: format!("strand {strand} outside 1..{num_strands}"),
            });
        }
        let chain_qubits = inst.l * (num_strands - 1) + inst.m;
        let window_start = inst.l * (strand - 1) + 1;
        if window_start + inst.m - 1 > chain_qubits {
            return Err(Error::WindowOverflow {
                start: window_start,
                end: window_start + inst.m - 1,
                num_sites: chain_qubits,
            });
        }
        Ok(BraidEmbedding {
            strand,
            num_strands,
            chain_qubits,
            window_start,
        })
    }
}

/// Dense braid-generator representation on the strand chain.
pub fn braid_embed(inst: &GybeInstance, strand: usize, num_strands: usize) -> Result<Matrix> {
    let emb = BraidEmbedding::new(inst, strand, num_strands)?;
    if 1usize << emb.chain_qubits > DIMENSION_CAP {
        return Err(Error::DimensionCap {
            dim: 1 << emb.chain_qubits,
            cap: DIMENSION_CAP,
        });
    }
    crate::tensor::embed(
        &inst.r,
        &crate::tensor::SiteEmbedding::new(inst.m, emb.window_start, emb.chain_qubits)?,
    )
}

/// Relative residual of `s1 s2 s1 = s2 s1 s2` on three strands.
pub fn braid_relation_residual(inst: &GybeInstance) -> Result<f64> {
    let s1 = braid_embed(inst, 1, 3)?;
    let s2 = braid_embed(inst, 2, 3)?;
    let lhs = s1.matmul(&s2).matmul(&s1);
    let rhs = s2.matmul(&s1).matmul(&s2);
    Ok(lhs.sub(&rhs).frobenius_norm() / lhs.frobenius_norm().max(f64::MIN_POSITIVE))
}

/// `|AB - BA|_F / |AB|_F` for the two windowed embeddings of R at qubit
/// offset `o = l*k`, computed without materializing the chain operators.
///
/// Chain layout: window A on qubits `1..=m`, window B on `o+1..=o+m`.
/// Writing row/column indices as (prefix p, overlap w, suffix s) blocks,
///   (AB)[pws, p'w's'] = sum_x R[(p,w),(p',x)] R[(x,s),(w',s')]
///   (BA)[pws, p'w's'] = sum_x R[(w,s),(x,s')] R[(p,x),(p',w')]
/// with the overlap width `m - o` (an empty overlap makes both sides equal
/// entrywise and the norm exactly zero).
pub fn commutator_ratio(r: &Matrix, m: usize, offset: usize) -> f64 {
    let o = offset.min(m);
    let w = m - o;
    let pd = 1usize << o;
    let wd = 1usize << w;
    let rr = r.as_slice();
    let rdim = 1usize << m;
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    // A-window index: (p << w) | x ; B-window index: (x << o) | s
    for p in 0..pd {
        for w1 in 0..wd {
            let arow = (p << w) | w1;
            for pp in 0..pd {
                for w2 in 0..wd {
                    for s in 0..pd {
                        let brow = (w1 << o) | s;
                        for ss in 0..pd {
                            let mut ab = c(0.0, 0.0);
                            let mut ba = c(0.0, 0.0);
                            for x in 0..wd {
                                ab += rr[arow * rdim + ((pp << w) | x)]
                                    * rr[((x << o) | s) * rdim + ((w2 << o) | ss)];
                                ba += rr[brow * rdim + ((x << o) | ss)]
                                    * rr[((p << w) | x) * rdim + ((pp << w) | w2)];
                            }
                            num += (ab - ba).norm_sqr();
                            den += ab.norm_sqr();
                        }
                    }
                }
            }
        }
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FarCommutativity {
    /// k -> normalized commutator Frobenius norm.
    pub measured: BTreeMap<usize, f64>,
    pub skipped: BTreeMap<usize, String>,
}

/// Normalized commutator norms of the embeddings of sigma_1 and
/// sigma_{1+k} for k = 2..=k_max.
pub fn far_commutativity_check(
    inst: &GybeInstance,
    k_max: usize,
    op_budget: u64,
) -> FarCommutativity {
    let mut measured = BTreeMap::new();
    let mut skipped = BTreeMap::new();
    for k in 2..=k_max {
        let offset = inst.l * k;
        let chain = offset + inst.m;
        if 1u64 << chain > DIMENSION_CAP as u64 {
            skipped.insert(
                k,
                format!("chain of {chain} qubits exceeds the dimension cap"),
            );
            continue;
        }
        let o = offset.min(inst.m);
        let w = inst.m - o;
        // loop cost from the index structure above
        let ops: u64 = 1u64 << (4 * o.min(inst.m) as u64 + 2 * w as u64 + w as u64);
        if ops > op_budget {
            skipped.insert(k, format!("estimated {ops} kernel operations exceed budget"));
            continue;
        }
        measured.insert(k, commutator_ratio(&inst.r, inst.m, offset));
    }
    FarCommutativity { measured, skipped }
}

/// Closed-form coefficients for powers of the normalized five-qubit W
/// entangler: the p-th power expands over {1, sum of generators} with
/// binomial sums in (-3/5)^k.
fn power_closed_form(p: u32, plus_sign: bool, sum: &Matrix) -> Matrix {
    let pref = (5f64.sqrt() / (2.0 * 2f64.sqrt())).powi(p as i32);
    let mut s0 = 0.0f64;
    let mut k = 0u32;
    while 2 * k <= p {
        s0 += binomial(p, 2 * k) * (-0.6f64).powi(k as i32);
        k += 1;
    }
    let mut s1 = 0.0f64;
    let mut k = 0u32;
    while 2 * k + 1 <= p {
        s1 += binomial(p, 2 * k + 1) * (-0.6f64).powi(k as i32);
        k += 1;
    }
    let sign = if plus_sign { 1.0 } else { -1.0 };
    let mut out = sum.scaled(c(pref * sign * s1 / 5f64.sqrt(), 0.0));
    out.shift_diagonal(c(pref * s0, 0.0));
    out
}

fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Compares direct matrix powers of the normalized W entangler against the
/// closed form for p = 1..=p_max. Returns the largest Frobenius deviation.
pub fn power_formula_check(plus_sign: bool, p_max: u32) -> Result<f64> {
    let r = crate::operators::unitary_w_operator(3, plus_sign)?;
    let sum = eta_sum(3, 3, 1, 5)?;
    let mut acc = Matrix::identity(32);
    let mut worst = 0.0f64;
    for p in 1..=p_max {
        acc = acc.matmul(&r);
        let closed = power_closed_form(p, plus_sign, &sum);
        worst = worst.max(acc.sub(&closed).frobenius_norm());
    }
    Ok(worst)
}

/// Smallest p <= n_max with `M^p = I` after removing the overall scale
/// (M is divided by |det M|^(1/dim) first, so 'order' is insensitive to
/// normalization conventions). None when no power matches.
pub fn order_probe(m: &Matrix, n_max: usize, tol: f64) -> Result<Option<usize>> {
    assert!(m.is_square());
    let n = m.rows();
    let f = crate::spectral::lu(m)?;
    let scale = (f.log_abs_det() / n as f64).exp();
    if !scale.is_finite() || scale == 0.0 {
        return Err(Error::SingularInput("order probe needs invertible input".into()));
    }
    let mh = m.scaled(c(1.0 / scale, 0.0));
    let mut acc = Matrix::identity(n);
    let sqrt_dim = (n as f64).sqrt();
    for p in 1..=n_max {
        acc = acc.matmul(&mh);
        let mut dev = acc.clone();
        dev.shift_diagonal(c(-1.0, 0.0));
        if dev.frobenius_norm() <= tol * sqrt_dim {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

/// Tolerances and caps for the per-case pipeline.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub gybe_tol: f64,
    pub spectrum_tol: f64,
    pub unitary_tol: f64,
    pub nonunitary_floor: f64,
    pub eigen_dim_cap: usize,
    pub braid_dim_cap: usize,
    pub farcomm_budget: u64,
    pub farcomm_k_max: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            gybe_tol: 1e-10,
            spectrum_tol: crate::spectral::DEFAULT_SPECTRUM_TOL,
            unitary_tol: 1e-12,
            nonunitary_floor: 1e-3,
            eigen_dim_cap: 256,
            braid_dim_cap: 1 << 10,
            farcomm_budget: 1 << 29,
            farcomm_k_max: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SloccOutcome {
    pub report: SloccReport,
    pub certificate_found: Option<bool>,
    pub certificate_residual: Option<f64>,
    pub amplitudes_match: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumOutcome {
    #[serde(serialize_with = "crate::report::ser_spectrum_entries")]
    pub computed: Vec<(C64, usize)>,
    pub check: Option<SpectrumCheck>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlagChecks {
    pub gybe: Option<bool>,
    pub spectrum: Option<bool>,
    pub diagonalizable: Option<bool>,
    pub unitarity: Option<bool>,
    pub w_class: Option<bool>,
    pub unitarizability: Option<bool>,
    pub overall: bool,
}

/// Everything measured for one case, with explicit skips.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub case_id: String,
    #[serde(serialize_with = "ser_param_map")]
    pub resolved_params: BTreeMap<String, C64>,
    pub signature: Signature,
    pub invertible: Option<bool>,
    pub gybe_residual: Outcome<f64>,
    pub braid_residual: Outcome<f64>,
    pub far_commutativity: FarCommutativity,
    pub spectrum: Outcome<SpectrumOutcome>,
    pub diagonalizable: Outcome<bool>,
    pub unitarity_deviation: f64,
    pub slocc: Outcome<SloccOutcome>,
    pub unitarizability: Outcome<UnitarizabilityReport>,
    pub flags: FlagChecks,
    #[serde(skip)]
    pub timings_ms: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Signature {
    pub d: usize,
    pub m: usize,
    pub l: usize,
}

fn ser_param_map<S: serde::Serializer>(
    map: &BTreeMap<String, C64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = s.serialize_map(Some(map.len()))?;
    for (k, v) in map {
        m.serialize_entry(k, &[v.re, v.im])?;
    }
    m.end()
}

fn timed<T>(timings: &mut BTreeMap<String, f64>, key: &str, f: impl FnOnce() -> T) -> T {
    let t0 = std::time::Instant::now();
    let out = f();
    timings.insert(key.to_string(), t0.elapsed().as_secs_f64() * 1e3);
    out
}

/// Runs every check for one instantiated case.
pub fn run_case(data: &CaseData, opts: &VerifyOptions) -> VerificationReport {
    let inst = &data.instance;
    let claims = &data.claims;
    let mut timings = BTreeMap::new();

    // rank tolerance via SVD where affordable, pivot-based beyond
    let invertible = timed(&mut timings, "rank", || {
        if inst.dim() <= 256 {
            crate::spectral::numerical_rank(&inst.r, crate::spectral::DEFAULT_RANK_TOL)
                .ok()
                .map(|rank| rank == inst.dim())
        } else {
            Some(crate::spectral::lu(&inst.r).is_ok())
        }
    });

    let gybe = timed(&mut timings, "gybe", || gybe_check(inst, opts.gybe_tol));
    let gybe_outcome = match &gybe {
        Ok(v) => Outcome::done(*v),
        Err(e) => Outcome::skipped(e.to_string()),
    };

    let braid = timed(&mut timings, "braid", || {
        let chain = inst.l * 2 + inst.m;
        if 1usize << chain > opts.braid_dim_cap {
            return Outcome::skipped(format!(
                "three-strand chain dimension 2^{chain} exceeds cap {}",
                opts.braid_dim_cap
            ));
        }
        match braid_relation_residual(inst) {
            Ok(v) => Outcome::done(v),
            Err(e) => Outcome::skipped(e.to_string()),
        }
    });

    let k_max = opts.farcomm_k_max.unwrap_or_else(|| {
        if inst.l * 2 >= inst.m {
            3
        } else {
            // smallest k with disjoint windows, plus nothing beyond
            inst.m.div_ceil(inst.l)
        }
    });
    let farcomm = timed(&mut timings, "far_commutativity", || {
        far_commutativity_check(inst, k_max, opts.farcomm_budget)
    });

    let spectrum = timed(&mut timings, "spectrum", || {
        if inst.dim() > opts.eigen_dim_cap {
            return Outcome::skipped(format!(
                "dimension {} exceeds the spectral cap {}",
                inst.dim(),
                opts.eigen_dim_cap
            ));
        }
        let eigen_opts = EigenOptions {
            max_dim: opts.eigen_dim_cap,
            ..EigenOptions::default()
        };
        match eigen_with(&inst.r, &eigen_opts) {
            Ok(rep) => {
                let computed: Vec<(C64, usize)> = rep
                    .clusters
                    .iter()
                    .map(|cl| (cl.value, cl.algebraic))
                    .collect();
                let check = claims.spectrum.as_ref().map(|claim| {
                    check_spectrum(&inst.r, claim, opts.spectrum_tol).unwrap_or(SpectrumCheck {
                        matched: false,
                        scale: c(1.0, 0.0),
                        max_distance: f64::INFINITY,
                        mismatch: Some("spectrum check failed to run".into()),
                    })
                });
                Outcome::done((SpectrumOutcome { computed, check }, rep.diagonalizable))
            }
            Err(e) => Outcome::skipped(e.to_string()),
        }
    });
    let (spectrum_outcome, diag_outcome) = match spectrum {
        Outcome::Done { value: (s, d) } => (Outcome::done(s), Outcome::done(d)),
        Outcome::Skipped { reason } => (
            Outcome::skipped(reason.clone()),
            Outcome::skipped(reason),
        ),
    };

    let udev = timed(&mut timings, "unitarity", || unitarity_deviation(&inst.r));

    let slocc = timed(&mut timings, "slocc", || match &data.w_input {
        None => Outcome::skipped("no input state recipe for this case"),
        Some(input) => match apply(&inst.r, input) {
            Err(e) => Outcome::skipped(format!("action failed: {e}")),
            Ok(output) => {
                let amplitudes_match = data.expected_output.as_ref().map(|expected| {
                    let amps = output.amplitudes();
                    let mut ok = true;
                    for (idx, want) in expected {
                        if (amps[*idx] - want).norm() > 1e-10 {
                            ok = false;
                        }
                    }
                    let support: f64 = expected
                        .iter()
                        .map(|(idx, _)| amps[*idx].norm_sqr())
                        .sum();
                    let total: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
                    ok && (support - total).abs() <= 1e-9 * total.max(1.0)
                });
                let normalized = output.normalized();
                let (core, spectators) = strip_spectators(&normalized, 1e-8);
                if core.num_qubits() == 3 {
                    match classify3(&core, 1e-8) {
                        Ok(mut rep) => {
                            rep.spectator_sites = spectators;
                            let (cert_found, cert_res) = match w_equivalence_certificate(&core) {
                                Some(cert) => (Some(true), Some(cert.residual)),
                                None => (Some(false), None),
                            };
                            Outcome::done(SloccOutcome {
                                report: rep,
                                certificate_found: cert_found,
                                certificate_residual: cert_res,
                                amplitudes_match,
                            })
                        }
                        Err(e) => Outcome::skipped(format!("classification failed: {e}")),
                    }
                } else {
                    // W_n core for n > 3: classify via the certificate
                    let cert = w_equivalence_certificate(&core);
                    let class = match &cert {
                        Some(_) => SloccClass::W,
                        None => SloccClass::Undetermined,
                    };
                    let rep = SloccReport {
                        local_ranks: vec![2; core.num_qubits()],
                        three_tangle: None,
                        concurrences: vec![],
                        class,
                        spectator_sites: spectators,
                    };
                    Outcome::done(SloccOutcome {
                        certificate_found: Some(cert.is_some()),
                        certificate_residual: cert.map(|cr| cr.residual),
                        report: rep,
                        amplitudes_match,
                    })
                }
            }
        },
    });

    let unitarizability = timed(&mut timings, "unitarizability", || {
        if inst.dim() > opts.eigen_dim_cap {
            return Outcome::skipped(format!(
                "dimension {} exceeds the spectral cap {}",
                inst.dim(),
                opts.eigen_dim_cap
            ));
        }
        match ilo_unitarizability_test(inst) {
            Ok(rep) => Outcome::done(rep),
            Err(e) => Outcome::skipped(e.to_string()),
        }
    });

    // claim comparisons
    let gybe_ok = gybe_outcome
        .value()
        .map(|v| (*v < opts.gybe_tol) == claims.gybe_holds);
    let spectrum_ok = spectrum_outcome.value().and_then(|s| {
        s.check.as_ref().map(|chk| chk.matched)
    });
    let diag_ok = match (&diag_outcome, claims.diagonalizable) {
        (Outcome::Done { value }, Some(want)) => Some(*value == want),
        _ => None,
    };
    let unit_ok = Some(if claims.unitary {
        udev < opts.unitary_tol
    } else {
        udev > opts.nonunitary_floor
    });
    let w_ok = match (slocc.value(), claims.w_class_output) {
        (Some(out), Some(true)) => Some(
            out.report.class == SloccClass::W
                && out.amplitudes_match.unwrap_or(true)
                && (!claims.w_certificate_claimed || out.certificate_found == Some(true)),
        ),
        _ => None,
    };
    let unitz_ok = match (unitarizability.value(), claims.expected_unitarizability) {
        (Some(rep), Some(want)) => Some(rep.verdict == want),
        _ => None,
    };
    let overall = [gybe_ok, spectrum_ok, diag_ok, unit_ok, w_ok, unitz_ok]
        .into_iter()
        .flatten()
        .all(|b| b);

    VerificationReport {
        case_id: inst.case_id.clone(),
        resolved_params: inst.resolved_params.clone(),
        signature: Signature {
            d: inst.d,
            m: inst.m,
            l: inst.l,
        },
        invertible,
        gybe_residual: gybe_outcome,
        braid_residual: braid,
        far_commutativity: farcomm,
        spectrum: spectrum_outcome,
        diagonalizable: diag_outcome,
        unitarity_deviation: udev,
        slocc,
        unitarizability,
        flags: FlagChecks {
            gybe: gybe_ok,
            spectrum: spectrum_ok,
            diagonalizable: diag_ok,
            unitarity: unit_ok,
            w_class: w_ok,
            unitarizability: unitz_ok,
            overall,
        },
        timings_ms: timings,
    }
}
