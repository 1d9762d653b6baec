//! Serialization helpers shared by the report types. Complex numbers are
//! rendered as `[re, im]` pairs, matching the state-file convention.

use num_complex::Complex64;
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

pub fn ser_complex<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(2))?;
    seq.serialize_element(&z.re)?;
    seq.serialize_element(&z.im)?;
    seq.end()
}

pub fn ser_complex_opt<S: Serializer>(z: &Option<Complex64>, s: S) -> Result<S::Ok, S::Error> {
    match z {
        Some(z) => ser_complex(z, s),
        None => s.serialize_none(),
    }
}

#[derive(Serialize)]
struct Entry {
    value: [f64; 2],
    multiplicity: usize,
}

pub fn ser_spectrum_entries<S: Serializer>(
    entries: &[(Complex64, usize)],
    s: S,
) -> Result<S::Ok, S::Error> {
    let rows: Vec<Entry> = entries
        .iter()
        .map(|&(z, m)| Entry {
            value: [z.re, z.im],
            multiplicity: m,
        })
        .collect();
    rows.serialize(s)
}

/// A per-check outcome that is either a value or an explicit skip with a
/// reason; nothing is ever silently absent from a report.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome<T: Serialize> {
    Done { value: T },
    Skipped { reason: String },
}

impl<T: Serialize> Outcome<T> {
    pub fn done(value: T) -> Self {
        Outcome::Done { value }
    }

    pub fn skipped(reason: impl Into<String>) -> Self {
        Outcome::Skipped {
            reason: reason.into(),
        }
    }

    pub fn value(&self) -> Option<&T> {
        match self {
            Outcome::Done { value } => Some(value),
            Outcome::Skipped { .. } => None,
        }
    }

    pub fn is_done(&self) -> bool {
        matches!(self, Outcome::Done { .. })
    }
}
