//! Report rendering: key-sorted JSON, markdown tables and CSV.

use gybe_core::report::Outcome;
use gybe_core::slocc::SloccClass;
use gybe_core::VerificationReport;

/// Serializes any value as stable, key-sorted, pretty JSON (serde_json's
/// default map is ordered, so round-tripping through `Value` sorts keys).
pub fn to_sorted_json<T: serde::Serialize>(value: &T) -> anyhow::Result<String> {
    let v = serde_json::to_value(value)?;
    Ok(format!("{}\n", serde_json::to_string_pretty(&v)?))
}

fn fmt_outcome_f64(o: &Outcome<f64>) -> String {
    match o {
        Outcome::Done { value } => format!("{value:.3e}"),
        Outcome::Skipped { .. } => "skipped".into(),
    }
}

fn fmt_flag(f: Option<bool>) -> &'static str {
    match f {
        Some(true) => "ok",
        Some(false) => "MISMATCH",
        None => "-",
    }
}

fn class_str(c: &SloccClass) -> &'static str {
    match c {
        SloccClass::Product => "product",
        SloccClass::Biseparable => "biseparable",
        SloccClass::W => "W",
        SloccClass::Ghz => "GHZ",
        SloccClass::Undetermined => "undetermined",
    }
}

pub fn to_markdown(reports: &[VerificationReport]) -> String {
    let mut out = String::new();
    out.push_str(
        "| case | (d,m,l) | gybe | braid | spectrum | diag | unitarity dev | class | unitarizability | overall | time |\n",
    );
    out.push_str(
        "|------|---------|------|-------|----------|------|---------------|-------|-----------------|---------|------|\n",
    );
    for r in reports {
        let spectrum = match &r.spectrum {
            Outcome::Done { value } => match &value.check {
                Some(chk) if chk.matched => "match".to_string(),
                Some(_) => "MISMATCH".to_string(),
                None => "unclaimed".to_string(),
            },
            Outcome::Skipped { .. } => "skipped".to_string(),
        };
        let diag = match &r.diagonalizable {
            Outcome::Done { value } => value.to_string(),
            Outcome::Skipped { .. } => "skipped".to_string(),
        };
        let class = match &r.slocc {
            Outcome::Done { value } => class_str(&value.report.class).to_string(),
            Outcome::Skipped { .. } => "-".to_string(),
        };
        let unitz = match &r.unitarizability {
            Outcome::Done { value } => format!("{:?}", value.verdict),
            Outcome::Skipped { .. } => "skipped".to_string(),
        };
        let total_ms: f64 = r.timings_ms.values().sum();
        out.push_str(&format!(
            "| {} | ({},{},{}) | {} | {} | {} | {} | {:.2e} | {} | {} | {} | {:.0} ms |\n",
            r.case_id,
            r.signature.d,
            r.signature.m,
            r.signature.l,
            fmt_outcome_f64(&r.gybe_residual),
            fmt_outcome_f64(&r.braid_residual),
            spectrum,
            diag,
            r.unitarity_deviation,
            class,
            unitz,
            if r.flags.overall { "ok" } else { "MISMATCH" },
            total_ms,
        ));
    }
    out
}

pub fn to_csv(reports: &[VerificationReport]) -> String {
    let mut out = String::from(
        "case,d,m,l,gybe_residual,braid_residual,spectrum_ok,diagonalizable,unitarity_deviation,slocc_class,unitarizability,gybe_ok,unitarity_ok,w_class_ok,overall_ok\n",
    );
    for r in reports {
        let gybe = match &r.gybe_residual {
            Outcome::Done { value } => format!("{value:e}"),
            Outcome::Skipped { .. } => String::new(),
        };
        let braid = match &r.braid_residual {
            Outcome::Done { value } => format!("{value:e}"),
            Outcome::Skipped { .. } => String::new(),
        };
        let spectrum_ok = r
            .spectrum
            .value()
            .and_then(|s| s.check.as_ref().map(|c| c.matched.to_string()))
            .unwrap_or_default();
        let diag = r
            .diagonalizable
            .value()
            .map(|d| d.to_string())
            .unwrap_or_default();
        let class = r
            .slocc
            .value()
            .map(|s| class_str(&s.report.class).to_string())
            .unwrap_or_default();
        let unitz = r
            .unitarizability
            .value()
            .map(|u| format!("{:?}", u.verdict))
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{:e},{},{},{},{},{},{}\n",
            r.case_id,
            r.signature.d,
            r.signature.m,
            r.signature.l,
            gybe,
            braid,
            spectrum_ok,
            diag,
            r.unitarity_deviation,
            class,
            unitz,
            fmt_flag(r.flags.gybe),
            fmt_flag(r.flags.unitarity),
            fmt_flag(r.flags.w_class),
            if r.flags.overall { "ok" } else { "MISMATCH" },
        ));
    }
    out
}
