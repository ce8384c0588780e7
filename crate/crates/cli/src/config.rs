//! Hopf data config files.
//!
//! ```toml
//! n = 3
//! alphas = [[0.5, 0.0], [0.5, 0.0], [0.5, 0.0]]   # [re, im] per eigenvalue
//! C = 4.0                                          # optional
//! ```
//!
//! When `C` is omitted the smallest admissible value `max |α_i|^{-2}` is used.

use std::ops::Range;

use hopf_core::manifold::{HopfData, ManifoldError};
use num_complex::Complex64;
use serde::Deserialize;
use toml::Spanned;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n: Spanned<usize>,
    alphas: Spanned<Vec<[f64; 2]>>,
    #[serde(rename = "C")]
    c: Option<Spanned<f64>>,
}

fn line_of(text: &str, span: Range<usize>) -> usize {
    text[..span.start.min(text.len())].matches('\n').count() + 1
}

/// Parses a config file's text. Errors carry the line they refer to.
pub fn parse_config(text: &str) -> Result<HopfData, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let line = e.span().map_or(1, |s| line_of(text, s));
        CliError::Config {
            line,
            message: e.message().to_string(),
        }
    })?;
    let at = |span: Range<usize>, message: String| CliError::Config {
        line: line_of(text, span),
        message,
    };
    let alphas: Vec<Complex64> = raw
        .alphas
        .get_ref()
        .iter()
        .map(|[re, im]| Complex64::new(*re, *im))
        .collect();
    if *raw.n.get_ref() != alphas.len() {
        return Err(at(
            raw.n.span(),
            format!(
                "n = {} but {} eigenvalues are listed",
                raw.n.get_ref(),
                alphas.len()
            ),
        ));
    }
    let result = match &raw.c {
        Some(c) => HopfData::new(alphas, *c.get_ref()),
        None => HopfData::with_minimal_c(alphas),
    };
    result.map_err(|e| {
        let span = match (&e, &raw.c) {
            (ManifoldError::InvalidC(_) | ManifoldError::BetaTooSmall { .. }, Some(c)) => c.span(),
            (ManifoldError::DimensionTooSmall(_), _) => raw.n.span(),
            _ => raw.alphas.span(),
        };
        at(span, e.to_string())
    })
}
