//! Name parsing for schemes, ensembles and noise kinds, with suggestions.

use ergoxeb::estimators::SchemeFunction;

pub const ENSEMBLES: [&str; 4] = ["haar", "pauli", "brickwork", "fixed"];
pub const NOISE_KINDS: [&str; 4] = ["noiseless", "depolarizing", "completely-noisy", "custom"];
pub const SCHEME_HELP: &str =
    "monomial<i> (i >= 1), normmonomial<i> (i >= 2), plogp, neglog, power<q> (q > 0)";
const SCHEME_STEMS: [&str; 5] = ["monomial", "normmonomial", "plogp", "neglog", "power"];

fn closest<'a>(input: &str, candidates: &[&'a str]) -> Option<&'a str> {
    candidates
        .iter()
        .map(|c| (strsim::jaro_winkler(input, c), *c))
        .filter(|(score, _)| *score >= 0.8)
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, c)| c)
}

fn unknown(what: &str, input: &str, suggestion: Option<String>, valid: &str) -> String {
    match suggestion {
        Some(s) => format!("unknown {what} '{input}'; did you mean '{s}'? (valid: {valid})"),
        None => format!("unknown {what} '{input}' (valid: {valid})"),
    }
}

fn one_of(what: &str, input: &str, candidates: &[&'static str]) -> Result<&'static str, String> {
    let lower = input.trim().to_ascii_lowercase();
    candidates
        .iter()
        .find(|c| **c == lower)
        .copied()
        .ok_or_else(|| {
            let hint = closest(&lower, candidates).map(str::to_string);
            unknown(what, input, hint, &candidates.join(", "))
        })
}

pub fn parse_ensemble(s: &str) -> Result<&'static str, String> {
    one_of("ensemble", s, &ENSEMBLES)
}

pub fn parse_noise(s: &str) -> Result<&'static str, String> {
    one_of("noise kind", s, &NOISE_KINDS)
}

pub fn parse_scheme(s: &str) -> Result<SchemeFunction, String> {
    s.parse::<SchemeFunction>().map_err(|e| {
        let lower = s.trim().to_ascii_lowercase();
        let split = lower
            .find(|c: char| c.is_ascii_digit() || c == '.')
            .unwrap_or(lower.len());
        let (stem, suffix) = lower.split_at(split);
        if SCHEME_STEMS.contains(&stem) {
            // Known family, bad parameter.
            return e.to_string();
        }
        let hint = closest(stem, &SCHEME_STEMS).map(|c| {
            if suffix.is_empty() && matches!(c, "monomial" | "normmonomial") {
                format!("{c}2")
            } else {
                format!("{c}{suffix}")
            }
        });
        unknown("scheme", s, hint, SCHEME_HELP)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suggestions() {
        assert_eq!(parse_ensemble("Haar"), Ok("haar"));
        assert!(parse_ensemble("brickwrok")
            .unwrap_err()
            .contains("did you mean 'brickwork'"));
        assert!(parse_noise("depolarising")
            .unwrap_err()
            .contains("'depolarizing'"));
        assert!(parse_scheme("monomail2")
            .unwrap_err()
            .contains("'monomial2'"));
        assert!(parse_scheme("neglg").unwrap_err().contains("'neglog'"));
        assert!(!parse_scheme("zzz").unwrap_err().contains("did you mean"));
        assert_eq!(parse_scheme("plogp"), Ok(SchemeFunction::PLogP));
    }
}
