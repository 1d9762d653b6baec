//! Command-line front end: runs per-case or full verification suites,
//! classifies state files, drives searches and prints reports.
//!
//! Exit codes: 0 all checks pass, 1 verification mismatch, 2 usage error,
//! 3 I/O or schema error, 4 numerical non-convergence.

mod render;
mod state_io;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use gybe_core::registry::{all_case_ids, case_def, instantiate_case, registry_listing, CaseData};
use gybe_core::search::{family, manifold_probe, minimize, SearchOptions};
use gybe_core::slocc::{classify3, strip_spectators, w_equivalence_certificate};
use gybe_core::spectral::check_spectrum;
use gybe_core::verify::{power_formula_check, run_case, VerifyOptions};
use gybe_core::{C64, Error as CoreError};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_NO_CONVERGENCE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "gybe",
    about = "Builds generalized Yang-Baxter operators from the case registry and machine-checks their algebraic and entanglement properties",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Markdown,
    Csv,
}

#[derive(Args)]
struct VerifyArgs {
    /// Case id to verify (repeatable). See `gybe cases` for the registry.
    #[arg(long = "case")]
    cases: Vec<String>,
    /// Verify every registry case at its defaults (plus Un at n = 5).
    #[arg(long)]
    all: bool,
    /// Override the gYBE residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value = "markdown")]
    format: Format,
    /// Worker threads for independent cases.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Accepted for reproducibility bookkeeping; the verification pipeline
    /// itself is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Free-parameter override `name=value` (repeatable); requires exactly
    /// one --case.
    #[arg(long = "param")]
    params: Vec<String>,
    /// Write the report to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    /// Family id. See `gybe search --help` output of available families.
    family: String,
    /// Comma-separated start values (complex entries allowed), one per
    /// family parameter.
    #[arg(long, default_value = "0.3")]
    start: String,
    #[arg(long, default_value_t = 400)]
    max_iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ProbeArgs {
    /// Family id (constraints are applied inside the family builder).
    family: String,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification pipeline for selected cases.
    Verify(VerifyArgs),
    /// Classify a pure state stored as a JSON state file.
    Classify {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "markdown")]
        format: Format,
    },
    /// Minimize the gYBE residual over an operator family.
    Search(SearchArgs),
    /// Sample a constrained family and report the solution-manifold pass rate.
    Probe(ProbeArgs),
    /// Compare direct powers of the five-qubit entangler with the closed form.
    Powers {
        /// `+` or `-` branch.
        sign: String,
        #[arg(long, default_value_t = 12)]
        nmax: u32,
    },
    /// Print the computed spectrum of one case next to its claim.
    Spectrum {
        case: String,
        #[arg(long = "param")]
        params: Vec<String>,
    },
    /// Export the case registry as JSON.
    Cases,
}

fn parse_complex(text: &str) -> Result<C64, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty value".into());
    }
    // forms: a, bi, a+bi, a-bi, i, -i
    let parse_real = |s: &str| -> Result<f64, String> {
        s.parse::<f64>().map_err(|_| format!("bad number `{s}`"))
    };
    if let Some(body) = t.strip_suffix(['i', 'j']) {
        // split into real and imaginary at the last +/- that is not an exponent sign
        let chars: Vec<char> = body.chars().collect();
        let mut split = None;
        for k in (1..chars.len()).rev() {
            if (chars[k] == '+' || chars[k] == '-')
                && chars[k - 1] != 'e'
                && chars[k - 1] != 'E'
            {
                split = Some(k);
                break;
            }
        }
        match split {
            Some(k) => {
                let re = parse_real(&chars[..k].iter().collect::<String>())?;
                let imtext: String = chars[k..].iter().collect();
                let im = if imtext == "+" {
                    1.0
                } else if imtext == "-" {
                    -1.0
                } else {
                    parse_real(&imtext)?
                };
                Ok(C64::new(re, im))
            }
            None => {
                let im = if body.is_empty() {
                    1.0
                } else if body == "-" {
                    -1.0
                } else {
                    parse_real(body)?
                };
                Ok(C64::new(0.0, im))
            }
        }
    } else {
        Ok(C64::new(parse_real(&t)?, 0.0))
    }
}

fn parse_params(items: &[String]) -> Result<BTreeMap<String, C64>, String> {
    let mut map = BTreeMap::new();
    for item in items {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| format!("expected name=value, got `{item}`"))?;
        let z = parse_complex(value)?;
        map.insert(name.trim().to_string(), z);
    }
    Ok(map)
}

fn usage_error(msg: &str) -> u8 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn core_error_exit(e: &CoreError) -> u8 {
    match e {
        CoreError::UnknownCase(_)
        | CoreError::UnknownParam { .. }
        | CoreError::UnknownFamily(_)
        | CoreError::ParamCount { .. }
        | CoreError::DomainViolation { .. } => EXIT_USAGE,
        CoreError::ConvergenceFailure(_)
        | CoreError::EigenResidual { .. }
        | CoreError::BranchResolutionFailed { .. } => EXIT_NO_CONVERGENCE,
        _ => EXIT_MISMATCH,
    }
}

fn cmd_verify(args: &VerifyArgs) -> anyhow::Result<u8> {
    // (case id, overrides, display label)
    let mut selection: Vec<(String, BTreeMap<String, C64>, String)> = Vec::new();
    if args.all {
        for id in all_case_ids() {
            selection.push((id.to_string(), BTreeMap::new(), id.to_string()));
        }
        let mut un5 = BTreeMap::new();
        un5.insert("n".to_string(), C64::new(5.0, 0.0));
        selection.push(("Un".to_string(), un5, "Un(n=5)".to_string()));
    } else {
        if args.cases.is_empty() {
            return Ok(usage_error("select cases with --case or pass --all"));
        }
        let overrides = match parse_params(&args.params) {
            Ok(m) => m,
            Err(e) => return Ok(usage_error(&e)),
        };
        if !overrides.is_empty() && args.cases.len() != 1 {
            return Ok(usage_error("--param needs exactly one --case"));
        }
        for id in &args.cases {
            selection.push((id.clone(), overrides.clone(), id.clone()));
        }
    }

    // reject unknown ids before any computation
    for (id, overrides, _) in &selection {
        let def = match case_def(id) {
            Ok(d) => d,
            Err(e) => return Ok(usage_error(&e.to_string())),
        };
        for name in overrides.keys() {
            if !def.params.iter().any(|p| p.name == name) {
                return Ok(usage_error(&format!(
                    "case `{id}` has no parameter `{name}`"
                )));
            }
        }
    }

    let mut opts = VerifyOptions::default();
    if let Some(tol) = args.tol {
        opts.gybe_tol = tol;
    }

    let built: Vec<Result<CaseData, CoreError>> = selection
        .iter()
        .map(|(id, overrides, _)| instantiate_case(id, overrides))
        .collect();
    for b in &built {
        if let Err(e) = b {
            eprintln!("error: {e}");
            return Ok(core_error_exit(e));
        }
    }
    let cases: Vec<CaseData> = built.into_iter().map(|b| b.unwrap()).collect();

    let jobs = args.jobs.max(1).min(cases.len().max(1));
    let mut reports: Vec<Option<gybe_core::VerificationReport>> = (0..cases.len())
        .map(|_| None)
        .collect();
    if jobs <= 1 {
        for (i, data) in cases.iter().enumerate() {
            eprintln!("verifying {} ...", selection[i].2);
            reports[i] = Some(run_case(data, &opts));
        }
    } else {
        // static round-robin chunking keeps the merge order deterministic
        let indices: Vec<usize> = (0..cases.len()).collect();
        let mut slots: Vec<Option<gybe_core::VerificationReport>> =
            (0..cases.len()).map(|_| None).collect();
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for chunk in indices.chunks(cases.len().div_ceil(jobs)) {
                let cases = &cases;
                let opts = &opts;
                let chunk = chunk.to_vec();
                handles.push(scope.spawn(move || {
                    chunk
                        .into_iter()
                        .map(|i| (i, run_case(&cases[i], opts)))
                        .collect::<Vec<_>>()
                }));
            }
            for h in handles {
                for (i, rep) in h.join().expect("verification worker") {
                    slots[i] = Some(rep);
                }
            }
        });
        reports = slots;
    }
    let mut reports: Vec<gybe_core::VerificationReport> =
        reports.into_iter().map(|r| r.unwrap()).collect();
    for (rep, (_, _, label)) in reports.iter_mut().zip(&selection) {
        rep.case_id = label.clone();
    }

    let rendered = match args.format {
        Format::Json => render::to_sorted_json(&reports)?,
        Format::Markdown => render::to_markdown(&reports),
        Format::Csv => render::to_csv(&reports),
    };
    match &args.out {
        Some(path) => std::fs::write(path, rendered)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{rendered}"),
    }

    let mismatches: Vec<&str> = reports
        .iter()
        .filter(|r| !r.flags.overall)
        .map(|r| r.case_id.as_str())
        .collect();
    if mismatches.is_empty() {
        Ok(EXIT_OK)
    } else {
        eprintln!("mismatched cases: {}", mismatches.join(", "));
        Ok(EXIT_MISMATCH)
    }
}

fn cmd_classify(path: &PathBuf, format: Format) -> anyhow::Result<u8> {
    let state = match state_io::read_state(path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e:#}");
            return Ok(EXIT_IO);
        }
    };
    let state = if state.is_normalized() {
        state
    } else {
        eprintln!(
            "note: normalizing input (norm deviates by {:.3e})",
            (state.norm() - 1.0).abs()
        );
        state.normalized()
    };
    let (core, spectators) = strip_spectators(&state, 1e-8);
    #[derive(serde::Serialize)]
    struct ClassifyOut {
        input_qubits: usize,
        spectator_sites: Vec<usize>,
        core_qubits: usize,
        report: Option<gybe_core::slocc::SloccReport>,
        certificate_found: Option<bool>,
        class: String,
    }
    let (report, cert, class) = if core.num_qubits() == 3 {
        let mut rep = classify3(&core, 1e-8)?;
        rep.spectator_sites = spectators.clone();
        let cert = w_equivalence_certificate(&core).is_some();
        let class = format!("{:?}", rep.class);
        (Some(rep), Some(cert), class)
    } else if core.num_qubits() == 0 {
        (None, None, "Product".to_string())
    } else {
        let cert = w_equivalence_certificate(&core);
        let class = if cert.is_some() {
            format!("W (certificate, {} qubits)", core.num_qubits())
        } else {
            format!("Undetermined ({}-qubit core)", core.num_qubits())
        };
        (None, Some(cert.is_some()), class)
    };
    let out = ClassifyOut {
        input_qubits: state.num_qubits(),
        spectator_sites: spectators,
        core_qubits: core.num_qubits(),
        report,
        certificate_found: cert,
        class,
    };
    match format {
        Format::Json => print!("{}", render::to_sorted_json(&out)?),
        _ => {
            println!("input qubits:    {}", out.input_qubits);
            println!("spectator sites: {:?}", out.spectator_sites);
            println!("core qubits:     {}", out.core_qubits);
            if let Some(rep) = &out.report {
                println!("local ranks:     {:?}", rep.local_ranks);
                if let Some(tau) = rep.three_tangle {
                    println!("three-tangle:    {tau:.6e}");
                }
                for ((a, b), c) in &rep.concurrences {
                    println!("concurrence {a}{b}:  {c:.6}");
                }
            }
            println!("class:           {}", out.class);
        }
    }
    // classification itself always exits 0; it reports, it does not judge
    Ok(EXIT_OK)
}

fn cmd_search(args: &SearchArgs) -> anyhow::Result<u8> {
    let fam = match family(&args.family) {
        Ok(f) => f,
        Err(e) => {
            return Ok(usage_error(&format!(
                "{e}; available: {}",
                gybe_core::search::all_family_ids().join(", ")
            )))
        }
    };
    let parts: Vec<&str> = args.start.split(',').collect();
    let mut start: Vec<C64> = Vec::new();
    for p in &parts {
        match parse_complex(p) {
            Ok(z) => start.push(z),
            Err(e) => return Ok(usage_error(&e)),
        }
    }
    if start.len() == 1 && fam.num_params() > 1 {
        start = vec![start[0]; fam.num_params()];
    }
    if start.len() != fam.num_params() {
        return Ok(usage_error(&format!(
            "family `{}` has {} parameters, got {} start values",
            fam.id,
            fam.num_params(),
            start.len()
        )));
    }
    eprintln!(
        "searching family {} from {:?} (max {} iterations)",
        fam.id,
        parts,
        args.max_iters
    );
    let opts = SearchOptions {
        max_iterations: args.max_iters,
        seed: args.seed,
        ..SearchOptions::default()
    };
    let result = minimize(fam, &start, &opts)?;
    eprintln!(
        "finished after {} iterations, residual {:.3e}",
        result.iterations, result.residual
    );
    print!("{}", render::to_sorted_json(&result)?);
    Ok(if result.converged {
        EXIT_OK
    } else {
        EXIT_NO_CONVERGENCE
    })
}

fn cmd_probe(args: &ProbeArgs) -> anyhow::Result<u8> {
    let fam = match family(&args.family) {
        Ok(f) => f,
        Err(e) => return Ok(usage_error(&e.to_string())),
    };
    let result = manifold_probe(fam, args.samples, args.seed, args.tol)?;
    print!("{}", render::to_sorted_json(&result)?);
    Ok(EXIT_OK)
}

fn cmd_powers(sign: &str, nmax: u32) -> anyhow::Result<u8> {
    let plus = match sign {
        "+" | "plus" => true,
        "-" | "minus" => false,
        other => return Ok(usage_error(&format!("sign must be + or -, got `{other}`"))),
    };
    let max_deviation = power_formula_check(plus, nmax)?;
    #[derive(serde::Serialize)]
    struct PowersOut {
        sign: String,
        p_max: u32,
        max_deviation: f64,
    }
    print!(
        "{}",
        render::to_sorted_json(&PowersOut {
            sign: if plus { "+".into() } else { "-".into() },
            p_max: nmax,
            max_deviation,
        })?
    );
    Ok(EXIT_OK)
}

fn cmd_spectrum(case: &str, params: &[String]) -> anyhow::Result<u8> {
    let overrides = match parse_params(params) {
        Ok(m) => m,
        Err(e) => return Ok(usage_error(&e)),
    };
    let data = match instantiate_case(case, &overrides) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(core_error_exit(&e));
        }
    };
    let rep = gybe_core::spectral::eigen(&data.instance.r, 1e-9)?;
    let check = data
        .claims
        .spectrum
        .as_ref()
        .map(|claim| check_spectrum(&data.instance.r, claim, 1e-7))
        .transpose()?;
    #[derive(serde::Serialize)]
    struct SpectrumOut {
        case: String,
        clusters: Vec<gybe_core::spectral::EigenCluster>,
        diagonalizable: bool,
        claim: Option<gybe_core::spectral::SpectrumClaim>,
        check: Option<gybe_core::spectral::SpectrumCheck>,
    }
    let matched = check.as_ref().map(|c| c.matched);
    print!(
        "{}",
        render::to_sorted_json(&SpectrumOut {
            case: data.instance.case_id.clone(),
            clusters: rep.clusters,
            diagonalizable: rep.diagonalizable,
            claim: data.claims.spectrum.clone(),
            check,
        })?
    );
    Ok(match matched {
        Some(false) => EXIT_MISMATCH,
        _ => EXIT_OK,
    })
}

fn cmd_cases() -> anyhow::Result<u8> {
    print!("{}", render::to_sorted_json(&registry_listing())?);
    Ok(EXIT_OK)
}

fn run() -> anyhow::Result<u8> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Classify { path, format } => cmd_classify(path, *format),
        Command::Search(args) => cmd_search(args),
        Command::Probe(args) => cmd_probe(args),
        Command::Powers { sign, nmax } => cmd_powers(sign, *nmax),
        Command::Spectrum { case, params } => cmd_spectrum(case, params),
        Command::Cases => cmd_cases(),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            // untyped failures out of the library layer are I/O-ish
            ExitCode::from(EXIT_IO)
        }
    }
}
