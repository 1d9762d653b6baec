//! Numerical rediscovery of gYBE solution points: residual evaluation over
//! parametrized operator families, derivative-free simplex minimization and
//! seeded manifold probes.

use crate::error::{Error, Result};
use crate::operators::{eta_sum, extraspecial_ansatz, AnsatzCoeffs};
use crate::tensor::{kron, Matrix, C64};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// How a family turns a parameter vector into an operator.
pub enum FamilyForm {
    /// `base + sum_i p_i * terms_i`; enables a precomputed polynomial for
    /// fast residual evaluation during searches.
    Affine {
        base: Matrix,
        terms: Vec<Matrix>,
    },
    /// Arbitrary builder. `Err` marks a rejected (near-singular) sample.
    General(fn(&[C64]) -> Result<Matrix>),
}

pub struct AnsatzFamily {
    pub id: &'static str,
    pub description: &'static str,
    pub param_names: Vec<&'static str>,
    pub real_only: Vec<bool>,
    /// (d, m, l) signature of the gYBE the family targets.
    pub signature: (usize, usize, usize),
    pub form: FamilyForm,
    pub known_targets: Vec<Vec<C64>>,
}

impl AnsatzFamily {
    pub fn num_params(&self) -> usize {
        self.param_names.len()
    }

    pub fn build(&self, params: &[C64]) -> Result<Matrix> {
        if params.len() != self.num_params() {
            return Err(Error::ParamCount {
                family: self.id.into(),
                expected: self.num_params(),
                got: params.len(),
            });
        }
        match &self.form {
            FamilyForm::Affine { base, terms } => {
                let mut m = base.clone();
                for (p, t) in params.iter().zip(terms) {
                    m = m.add(&t.scaled(*p));
                }
                Ok(m)
            }
            FamilyForm::General(f) => f(params),
        }
    }
}

/// Squared Frobenius norm of `lhs - rhs` of the gYBE at the given point.
pub fn residual(family: &AnsatzFamily, params: &[C64]) -> Result<f64> {
    let r = family.build(params)?;
    let (_, _, l) = family.signature;
    let pad = Matrix::identity(1 << l);
    let a = kron(&r, &pad);
    let b = kron(&pad, &r);
    let diff = a
        .matmul(&b)
        .matmul(&a)
        .sub(&b.matmul(&a).matmul(&b));
    let f = diff.frobenius_norm();
    Ok(f * f)
}

/// Relative gYBE residual at the point (for probes).
pub fn relative_residual(family: &AnsatzFamily, params: &[C64]) -> Result<f64> {
    let r = family.build(params)?;
    let (_, m, l) = family.signature;
    let _ = m;
    crate::verify::gybe_residual(&r, family.signature.1, l)
}

/// Degree-3 matrix polynomial of the gYBE difference for affine families:
/// `lhs - rhs = sum_k mono_k(p) D_k`. The Gram matrix of the coefficient
/// matrices turns each residual evaluation into an O(terms^2) sum.
struct GybePoly {
    /// Exponent multi-indices, one per coefficient matrix.
    monomials: Vec<Vec<u8>>,
    /// gram[i][j] = <D_i, D_j> (Frobenius inner product).
    gram: Vec<Vec<C64>>,
}

impl GybePoly {
    fn build(family: &AnsatzFamily) -> Option<Self> {
        let FamilyForm::Affine { base, terms } = &family.form else {
            return None;
        };
        let k = terms.len();
        let (_, _, l) = family.signature;
        let pad = Matrix::identity(1 << l);
        // factors of the two sides as affine polynomials
        let mut a_terms: Vec<(Vec<u8>, Matrix)> = vec![(vec![0; k], kron(base, &pad))];
        let mut b_terms: Vec<(Vec<u8>, Matrix)> = vec![(vec![0; k], kron(&pad, base))];
        for (i, t) in terms.iter().enumerate() {
            let mut e = vec![0u8; k];
            e[i] = 1;
            a_terms.push((e.clone(), kron(t, &pad)));
            b_terms.push((e, kron(&pad, t)));
        }
        let mul = |x: &[(Vec<u8>, Matrix)], y: &[(Vec<u8>, Matrix)]| {
            let mut out: BTreeMap<Vec<u8>, Matrix> = BTreeMap::new();
            for (ex, mx) in x {
                for (ey, my) in y {
                    let e: Vec<u8> = ex.iter().zip(ey).map(|(a, b)| a + b).collect();
                    let p = mx.matmul(my);
                    match out.get_mut(&e) {
                        Some(acc) => *acc = acc.add(&p),
                        None => {
                            out.insert(e, p);
                        }
                    }
                }
            }
            out
        };
        let ab = mul(&a_terms, &b_terms);
        let ab_vec: Vec<(Vec<u8>, Matrix)> = ab.into_iter().collect();
        let aba = mul(&ab_vec, &a_terms.iter().map(|(e, m)| (e.clone(), m.clone())).collect::<Vec<_>>());
        let ba = mul(&b_terms, &a_terms);
        let ba_vec: Vec<(Vec<u8>, Matrix)> = ba.into_iter().collect();
        let bab = mul(&ba_vec, &b_terms.iter().map(|(e, m)| (e.clone(), m.clone())).collect::<Vec<_>>());
        let mut diff: BTreeMap<Vec<u8>, Matrix> = aba;
        for (e, m) in bab {
            match diff.get_mut(&e) {
                Some(acc) => *acc = acc.sub(&m),
                None => {
                    diff.insert(e, m.scaled(c(-1.0, 0.0)));
                }
            }
        }
        diff.retain(|_, m| m.frobenius_norm() > 1e-13);
        let monomials: Vec<Vec<u8>> = diff.keys().cloned().collect();
        let mats: Vec<&Matrix> = diff.values().collect();
        let n = mats.len();
        let mut gram = vec![vec![c(0.0, 0.0); n]; n];
        for i in 0..n {
            for j in i..n {
                let mut acc = c(0.0, 0.0);
                for (x, y) in mats[i].as_slice().iter().zip(mats[j].as_slice()) {
                    acc += x.conj() * y;
                }
                gram[i][j] = acc;
                gram[j][i] = acc.conj();
            }
        }
        Some(GybePoly { monomials, gram })
    }

    fn eval(&self, params: &[C64]) -> f64 {
        let coeffs: Vec<C64> = self
            .monomials
            .iter()
            .map(|e| {
                let mut acc = c(1.0, 0.0);
                for (p, &exp) in params.iter().zip(e) {
                    for _ in 0..exp {
                        acc *= *p;
                    }
                }
                acc
            })
            .collect();
        let mut total = c(0.0, 0.0);
        for (i, ci) in coeffs.iter().enumerate() {
            for (j, cj) in coeffs.iter().enumerate() {
                total += ci.conj() * cj * self.gram[i][j];
            }
        }
        total.re.max(0.0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    pub family: String,
    #[serde(serialize_with = "ser_cvec")]
    pub params: Vec<C64>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub matched_known_target: Option<TargetMatch>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TargetMatch {
    pub index: usize,
    pub distance: f64,
}

fn ser_cvec<S: serde::Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub max_iterations: usize,
    pub residual_threshold: f64,
    pub simplex_step: f64,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_iterations: 400,
            residual_threshold: 1e-14,
            simplex_step: 0.1,
            seed: 0,
        }
    }
}

/// Packs complex parameters into the real search vector respecting
/// real-only flags.
fn pack(family: &AnsatzFamily, params: &[C64]) -> Vec<f64> {
    let mut out = Vec::new();
    for (i, p) in params.iter().enumerate() {
        out.push(p.re);
        if !family.real_only[i] {
            out.push(p.im);
        }
    }
    out
}

fn unpack(family: &AnsatzFamily, x: &[f64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(family.num_params());
    let mut k = 0;
    for real_only in &family.real_only {
        if *real_only {
            out.push(c(x[k], 0.0));
            k += 1;
        } else {
            out.push(c(x[k], x[k + 1]));
            k += 2;
        }
    }
    out
}

/// Derivative-free simplex descent on the squared gYBE residual. The best
/// vertex never worsens, and the run is deterministic for fixed inputs.
pub fn minimize(family: &AnsatzFamily, start: &[C64], opts: &SearchOptions) -> Result<SearchResult> {
    if start.len() != family.num_params() {
        return Err(Error::ParamCount {
            family: family.id.into(),
            expected: family.num_params(),
            got: start.len(),
        });
    }
    let poly = GybePoly::build(family);
    let eval = |x: &[f64]| -> Result<f64> {
        let params = unpack(family, x);
        match &poly {
            Some(p) => Ok(p.eval(&params)),
            None => residual(family, &params),
        }
    };

    let x0 = pack(family, start);
    let dim = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let f0 = eval(&x0)?;
    simplex.push((x0.clone(), f0));
    for i in 0..dim {
        let mut x = x0.clone();
        x[i] += opts.simplex_step;
        let f = eval(&x)?;
        simplex.push((x, f));
    }

    let mut iterations = 0usize;
    if f0 < opts.residual_threshold {
        return Ok(finish(family, &simplex, 0, true));
    }

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    while iterations < opts.max_iterations {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        if simplex[0].1 < opts.residual_threshold {
            return Ok(finish(family, &simplex, iterations, true));
        }
        let spread: f64 = (0..dim)
            .map(|i| {
                let lo = simplex.iter().map(|(x, _)| x[i]).fold(f64::INFINITY, f64::min);
                let hi = simplex.iter().map(|(x, _)| x[i]).fold(f64::NEG_INFINITY, f64::max);
                hi - lo
            })
            .fold(0.0f64, f64::max);
        if spread < 1e-13 {
            break;
        }
        iterations += 1;
        let centroid: Vec<f64> = (0..dim)
            .map(|i| simplex[..dim].iter().map(|(x, _)| x[i]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let reflect: Vec<f64> = (0..dim)
            .map(|i| centroid[i] + alpha * (centroid[i] - worst.0[i]))
            .collect();
        let fr = eval(&reflect)?;
        if fr < simplex[0].1 {
            let expand: Vec<f64> = (0..dim)
                .map(|i| centroid[i] + gamma * (reflect[i] - centroid[i]))
                .collect();
            let fe = eval(&expand)?;
            simplex[dim] = if fe < fr { (expand, fe) } else { (reflect, fr) };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflect, fr);
            continue;
        }
        let contract: Vec<f64> = (0..dim)
            .map(|i| centroid[i] + rho * (worst.0[i] - centroid[i]))
            .collect();
        let fc = eval(&contract)?;
        if fc < worst.1 {
            simplex[dim] = (contract, fc);
            continue;
        }
        // shrink toward the best vertex
        let best = simplex[0].0.clone();
        for v in simplex.iter_mut().skip(1) {
            for i in 0..dim {
                v.0[i] = best[i] + sigma * (v.0[i] - best[i]);
            }
            v.1 = eval(&v.0)?;
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let converged = simplex[0].1 < opts.residual_threshold;
    Ok(finish(family, &simplex, iterations, converged))
}

fn finish(
    family: &AnsatzFamily,
    simplex: &[(Vec<f64>, f64)],
    iterations: usize,
    converged: bool,
) -> SearchResult {
    let best = simplex
        .iter()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    let params = unpack(family, &best.0);
    let matched = family
        .known_targets
        .iter()
        .enumerate()
        .map(|(i, target)| {
            // overall sign is a symmetry of every registered family
            let direct: f64 = params
                .iter()
                .zip(target)
                .map(|(p, t)| (p - t).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let flipped: f64 = params
                .iter()
                .zip(target)
                .map(|(p, t)| (p + t).norm_sqr())
                .sum::<f64>()
                .sqrt();
            (i, direct.min(flipped))
        })
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .filter(|(_, d)| *d < 1e-5)
        .map(|(index, distance)| TargetMatch { index, distance });
    SearchResult {
        family: family.id.into(),
        params,
        residual: best.1,
        iterations,
        converged,
        matched_known_target: matched,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeResult {
    pub family: String,
    pub samples: usize,
    pub passes: usize,
    pub pass_fraction: f64,
    pub worst_residual: f64,
    pub rejected_samples: usize,
    pub tol: f64,
    pub seed: u64,
}

/// Samples the family's free parameters from a seeded box (|re|, |im| <= 2)
/// and reports the fraction of samples whose relative gYBE residual stays
/// below `tol`. Builder-rejected samples (constraint singularities) are
/// redrawn.
pub fn manifold_probe(
    family: &AnsatzFamily,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<ProbeResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passes = 0usize;
    let mut worst = 0.0f64;
    let mut rejected = 0usize;
    for _ in 0..samples {
        let value = loop {
            let params: Vec<C64> = (0..family.num_params())
                .map(|i| {
                    let re = rng.gen_range(-2.0..2.0);
                    let im = if family.real_only[i] {
                        0.0
                    } else {
                        rng.gen_range(-2.0..2.0)
                    };
                    c(re, im)
                })
                .collect();
            match relative_residual(family, &params) {
                Ok(v) => break v,
                Err(_) => {
                    rejected += 1;
                    if rejected > samples * 100 {
                        return Err(Error::ConvergenceFailure(
                            "manifold probe rejected too many samples".into(),
                        ));
                    }
                }
            }
        };
        worst = worst.max(value);
        if value < tol {
            passes += 1;
        }
    }
    Ok(ProbeResult {
        family: family.id.into(),
        samples,
        passes,
        pass_fraction: passes as f64 / samples.max(1) as f64,
        worst_residual: worst,
        rejected_samples: rejected,
        tol,
        seed,
    })
}

fn p1_builder(params: &[C64]) -> Result<Matrix> {
    let (a1, a3, b1, b3) = (params[0], params[1], params[2], params[3]);
    let denom = c(1.0, 0.0) + a1 + b1;
    if denom.norm() < 0.05 {
        return Err(Error::DomainViolation {
            case: "P1".into(),
            reason: "sample too close to the constraint singularity".into(),
        });
    }
    let b2 = -b1 * (c(1.0, 0.0) + a3) / denom;
    let g = b1 * (a3 - a1 - b1) / denom;
    Ok(crate::operators::partition_swap_proj(a1, a3, b1, b2, b3, g))
}

fn p2_builder(params: &[C64]) -> Result<Matrix> {
    let (a, b, d) = (params[0], params[1], params[2]);
    let g = -(a + b) * 0.5;
    Ok(crate::operators::partition_swap_pair_proj(a, b, g, d))
}

fn theta7_builder(params: &[C64]) -> Result<Matrix> {
    Ok(extraspecial_ansatz(&AnsatzCoeffs {
        a1: params[0],
        a2: params[1],
        a3: params[2],
        b1: params[3],
        b2: params[4],
        b3: params[5],
        g: params[6],
    }))
}

fn symmetric_sum_family(
    id: &'static str,
    description: &'static str,
    width: usize,
) -> AnsatzFamily {
    let chain = 2 * width - 1;
    let sum = eta_sum(width, width, 1, chain).expect("generator sum");
    let target = 1.0 / ((3 * width - 4) as f64).sqrt();
    AnsatzFamily {
        id,
        description,
        param_names: vec!["alpha"],
        real_only: vec![true],
        signature: (2, chain, 1),
        form: FamilyForm::Affine {
            base: Matrix::identity(1 << chain),
            terms: vec![sum],
        },
        known_targets: vec![vec![c(target, 0.0)]],
    }
}

fn registry() -> &'static Vec<AnsatzFamily> {
    use std::sync::OnceLock;
    static FAMILIES: OnceLock<Vec<AnsatzFamily>> = OnceLock::new();
    FAMILIES.get_or_init(|| {
        let t5 = 1.0 / 5f64.sqrt();
        let xi_terms: Vec<Matrix> = (1..=3)
            .map(|j| {
                crate::operators::generator(crate::operators::GeneratorKind::Xi, j, 5).unwrap()
            })
            .collect();
        vec![
            symmetric_sum_family(
                "U3sym",
                "five-qubit entangler, one real coefficient on the generator sum",
                3,
            ),
            AnsatzFamily {
                id: "U3",
                description: "five-qubit entangler with independent real coefficients",
                param_names: vec!["alpha", "beta", "gamma"],
                real_only: vec![true, true, true],
                signature: (2, 5, 1),
                form: FamilyForm::Affine {
                    base: Matrix::identity(32),
                    terms: xi_terms,
                },
                known_targets: vec![vec![c(t5, 0.0), c(t5, 0.0), c(t5, 0.0)]],
            },
            symmetric_sum_family(
                "U4sym",
                "seven-qubit entangler, one real coefficient on the generator sum",
                4,
            ),
            symmetric_sum_family(
                "U5sym",
                "nine-qubit entangler, one real coefficient on the generator sum",
                5,
            ),
            AnsatzFamily {
                id: "P1",
                description: "three-qubit swap/projector family with its two constraints applied",
                param_names: vec!["alpha1", "alpha3", "beta1", "beta3"],
                real_only: vec![false, false, false, false],
                signature: (2, 3, 2),
                form: FamilyForm::General(p1_builder),
                known_targets: vec![vec![
                    c(-1.0, 0.0),
                    c(-1.0 / 3.0, 0.0),
                    c(1.0, 0.0),
                    c(0.5, 0.0),
                ]],
            },
            AnsatzFamily {
                id: "P2",
                description: "three-qubit pair-projector family with gamma = -(alpha+beta)/2",
                param_names: vec!["alpha", "beta", "delta"],
                real_only: vec![false, false, false],
                signature: (2, 3, 2),
                form: FamilyForm::General(p2_builder),
                known_targets: vec![],
            },
            AnsatzFamily {
                id: "Theta7",
                description: "full seven-coefficient four-qubit ansatz (unconstrained)",
                param_names: vec![
                    "alpha1", "alpha2", "alpha3", "beta1", "beta2", "beta3", "gamma",
                ],
                real_only: vec![false; 7],
                signature: (2, 4, 2),
                form: FamilyForm::General(theta7_builder),
                known_targets: vec![],
            },
        ]
    })
}

pub fn family(id: &str) -> Result<&'static AnsatzFamily> {
    registry()
        .iter()
        .find(|f| f.id == id)
        .ok_or_else(|| Error::UnknownFamily(id.into()))
}

pub fn all_family_ids() -> Vec<&'static str> {
    registry().iter().map(|f| f.id).collect()
}
