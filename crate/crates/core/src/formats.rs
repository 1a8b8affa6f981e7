//! Text formats: sample files, probability tables and numeric rendering.
//!
//! Sample file: one bitstring per line, characters `0`/`1`, rightmost
//! character is qubit 0. Probability file: CSV `bitstring,probability`, header
//! line optional.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serializer;

use crate::error::{Error, Result};
use crate::estimators::ProbabilityLookup;
use crate::noise::{Provenance, SampleSet};
use crate::statevector::{OutputDistribution, SystemDims, DEFAULT_MAX_QUBITS};

/// Significant digits for JSON output.
pub const JSON_DIGITS: usize = 17;

/// Significant digits for CSV result tables.
pub const CSV_DIGITS: usize = 12;

/// `%g`-style rendering with `digits` significant digits.
///
/// Trailing zeros are trimmed; non-finite values render as `nan`, `inf`, `-inf`.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').unwrap_or((&sci, "0"));
    let exp: i32 = exp.parse().unwrap_or(0);
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// CSV cell for a float.
pub fn csv_num(v: f64) -> String {
    format_sig(v, CSV_DIGITS)
}

/// JSON token for a float at [`JSON_DIGITS`] digits; non-finite values become `null`.
pub fn json_num(v: f64) -> String {
    if v.is_finite() {
        format_sig(v, JSON_DIGITS)
    } else {
        "null".into()
    }
}

/// `serialize_with` helper emitting a float at [`JSON_DIGITS`] significant digits.
pub fn serialize_f64_17<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::Error as _;
    use serde::Serialize as _;
    let raw = serde_json::value::RawValue::from_string(json_num(*v)).map_err(S::Error::custom)?;
    raw.serialize(s)
}

/// As [`serialize_f64_17`] for optional values (`None` is `null`).
pub fn serialize_opt_f64_17<S: Serializer>(
    v: &Option<f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => serialize_f64_17(x, s),
        None => s.serialize_none(),
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Parse a `0`/`1` string (rightmost character is qubit 0) into an index.
fn parse_bits(s: &str) -> Option<u64> {
    if s.is_empty() || s.len() > 63 {
        return None;
    }
    s.bytes().try_fold(0u64, |acc, b| match b {
        b'0' => Some(acc << 1),
        b'1' => Some((acc << 1) | 1),
        _ => None,
    })
}

/// Read a sample file. The register size is taken from `dims` or, if `None`,
/// from the first bitstring. Blank lines are skipped.
pub fn read_samples(path: &Path, dims: Option<SystemDims>) -> Result<SampleSet> {
    let text = std::fs::read_to_string(path)?;
    let mut dims = dims;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() {
            continue;
        }
        let d = match dims {
            Some(d) => d,
            None => {
                let d = SystemDims::new(s.len() as u32)
                    .map_err(|e| parse_err(path, line, e.to_string()))?;
                dims = Some(d);
                d
            }
        };
        if s.len() != d.qubits() as usize {
            return Err(parse_err(
                path,
                line,
                format!(
                    "bitstring '{s}' has length {}, expected {}",
                    s.len(),
                    d.qubits()
                ),
            ));
        }
        let x = parse_bits(s)
            .ok_or_else(|| parse_err(path, line, format!("'{s}' is not a bitstring")))?;
        out.push(x);
    }
    let dims = dims.ok_or_else(|| parse_err(path, 1, "sample file contains no bitstrings"))?;
    SampleSet::new(
        dims,
        out,
        Provenance::Ingested {
            path: path.to_path_buf(),
        },
    )
}

/// 1-based line of the `index`-th bitstring in a sample file.
pub(crate) fn sample_line(path: &Path, index: usize) -> Option<usize> {
    let text = std::fs::read_to_string(path).ok()?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .nth(index)
        .map(|(i, _)| i + 1)
}

/// Write a sample file.
pub fn write_samples(path: &Path, samples: &SampleSet) -> Result<()> {
    let d = samples.dims();
    let mut s = String::with_capacity(samples.len() * (d.qubits() as usize + 1));
    for &x in samples.bitstrings() {
        s.push_str(&d.format_bitstring(x));
        s.push('\n');
    }
    std::fs::write(path, s)?;
    Ok(())
}

/// Ideal probabilities read from a file, keyed by bitstring index.
///
/// May be partial; a sampled bitstring missing from the table is an error at
/// lookup time.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    dims: SystemDims,
    probs: BTreeMap<u64, f64>,
}

impl ProbabilityTable {
    pub fn dims(&self) -> SystemDims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn get(&self, x: u64) -> Option<f64> {
        self.probs.get(&x).copied()
    }

    /// Dense distribution; the table must cover all `N` bitstrings.
    pub fn to_distribution(&self) -> Result<OutputDistribution> {
        if self.dims.qubits() > DEFAULT_MAX_QUBITS {
            return Err(Error::SizeCap(format!(
                "dense distribution for {} qubits",
                self.dims.qubits()
            )));
        }
        if self.probs.len() as u64 != self.dims.dim() {
            return Err(Error::Distribution(format!(
                "probability table covers {} of {} bitstrings",
                self.probs.len(),
                self.dims.dim()
            )));
        }
        OutputDistribution::from_probs(self.dims, self.probs.values().copied().collect())
    }
}

impl From<&OutputDistribution> for ProbabilityTable {
    fn from(p: &OutputDistribution) -> Self {
        Self {
            dims: p.dims(),
            probs: p
                .probs()
                .iter()
                .enumerate()
                .map(|(x, &v)| (x as u64, v))
                .collect(),
        }
    }
}

impl ProbabilityLookup for ProbabilityTable {
    fn dims(&self) -> SystemDims {
        self.dims
    }

    fn probability(&self, x: u64) -> Option<f64> {
        self.get(x)
    }
}

/// Read a `bitstring,probability` file.
pub fn read_probabilities(path: &Path) -> Result<ProbabilityTable> {
    let text = std::fs::read_to_string(path)?;
    let mut dims: Option<SystemDims> = None;
    let mut probs = BTreeMap::new();
    let mut first_content = true;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() {
            continue;
        }
        let (bits, value) = s
            .split_once(',')
            .ok_or_else(|| parse_err(path, line, "expected 'bitstring,probability'"))?;
        let (bits, value) = (bits.trim(), value.trim());
        if std::mem::take(&mut first_content)
            && parse_bits(bits).is_none()
            && value.parse::<f64>().is_err()
        {
            // header line
            continue;
        }
        let d = match dims {
            Some(d) => d,
            None => {
                let d = SystemDims::new(bits.len() as u32)
                    .map_err(|e| parse_err(path, line, e.to_string()))?;
                dims = Some(d);
                d
            }
        };
        if bits.len() != d.qubits() as usize {
            return Err(parse_err(
                path,
                line,
                format!(
                    "bitstring '{bits}' has length {}, expected {}",
                    bits.len(),
                    d.qubits()
                ),
            ));
        }
        let x = parse_bits(bits)
            .ok_or_else(|| parse_err(path, line, format!("'{bits}' is not a bitstring")))?;
        let p: f64 = value
            .parse()
            .map_err(|_| parse_err(path, line, format!("'{value}' is not a number")))?;
        if !(0.0..=1.0).contains(&p) {
            return Err(parse_err(
                path,
                line,
                format!("probability {p} outside [0, 1]"),
            ));
        }
        if probs.insert(x, p).is_some() {
            return Err(parse_err(path, line, format!("duplicate bitstring {bits}")));
        }
    }
    let dims = dims.ok_or_else(|| parse_err(path, 1, "probability file contains no rows"))?;
    Ok(ProbabilityTable { dims, probs })
}

/// Write all `N` rows of `p` with a header, at [`JSON_DIGITS`] significant digits.
pub fn write_probabilities(path: &Path, p: &OutputDistribution) -> Result<()> {
    let d = p.dims();
    let mut s = String::from("bitstring,probability\n");
    for (x, &v) in p.probs().iter().enumerate() {
        let _ = writeln!(
            s,
            "{},{}",
            d.format_bitstring(x as u64),
            format_sig(v, JSON_DIGITS)
        );
    }
    std::fs::write(path, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_formatting() {
        assert_eq!(format_sig(0.0, 12), "0");
        assert_eq!(format_sig(1.5, 12), "1.5");
        assert_eq!(format_sig(-0.0125, 12), "-0.0125");
        assert_eq!(format_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_sig(1.5e-7, 12), "1.5e-7");
        assert_eq!(format_sig(123456789012345.0, 12), "1.23456789012e14");
        assert_eq!(format_sig(100.0, 3), "100");
        assert_eq!(format_sig(f64::NAN, 12), "nan");
        assert_eq!(json_num(f64::INFINITY), "null");
        for v in [0.1, 1.0 / 3.0, -2.625, 6.02e23, 1e-300] {
            assert_eq!(json_num(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn bit_order() {
        assert_eq!(parse_bits("001"), Some(1));
        assert_eq!(parse_bits("100"), Some(4));
        assert_eq!(parse_bits("10a"), None);
    }

    #[test]
    fn sample_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.txt");
        let d = SystemDims::new(3).unwrap();
        let s = SampleSet::new(d, vec![0, 1, 5, 7], Provenance::Simulated { seed: 1 }).unwrap();
        write_samples(&path, &s).unwrap();
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            "000\n001\n101\n111\n"
        );
        let back = read_samples(&path, None).unwrap();
        assert_eq!(back.bitstrings(), s.bitstrings());
        assert!(matches!(back.provenance(), Provenance::Ingested { .. }));
    }

    #[test]
    fn sample_errors_name_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.txt");
        std::fs::write(&path, "000\n01\n").unwrap();
        let err = read_samples(&path, None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        std::fs::write(&path, "000\n0x0\n").unwrap();
        assert!(matches!(
            read_samples(&path, None),
            Err(Error::Parse { line: 2, .. })
        ));
        let d4 = SystemDims::new(4).unwrap();
        std::fs::write(&path, "000\n").unwrap();
        assert!(matches!(
            read_samples(&path, Some(d4)),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn probability_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        let d = SystemDims::new(2).unwrap();
        let p = OutputDistribution::from_probs(d, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        write_probabilities(&path, &p).unwrap();
        let t = read_probabilities(&path).unwrap();
        assert_eq!(t.to_distribution().unwrap(), p);
        // headerless, partial
        std::fs::write(&path, "01,0.5\n10,0.25\n").unwrap();
        let t = read_probabilities(&path).unwrap();
        assert_eq!(t.get(1), Some(0.5));
        assert_eq!(t.get(0), None);
        assert!(t.to_distribution().is_err());
    }

    #[test]
    fn probability_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        std::fs::write(&path, "bitstring,probability\n00,0.5\n00,0.5\n").unwrap();
        assert!(matches!(
            read_probabilities(&path),
            Err(Error::Parse { line: 3, .. })
        ));
        std::fs::write(&path, "00,0.5\n01,abc\n").unwrap();
        assert!(matches!(
            read_probabilities(&path),
            Err(Error::Parse { line: 2, .. })
        ));
        std::fs::write(&path, "00,1.5\n").unwrap();
        assert!(matches!(
            read_probabilities(&path),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
