//! Text format for monomial modules.
//!
//! ```text
//! # comment
//! rank 2
//! var t1 : 1, 0
//! var t2 : 0, 1
//! gen e1 : 0, 0
//! gen e2 : 1, 0
//! rel t1*e1 - e2
//! rel 2*t2^3*e1 + -1*t1^2*t2*e1
//! ```
//!
//! Each relation term is a product of an optional integer coefficient,
//! variables with optional exponents, and exactly one generator.

use std::collections::HashMap;

use thiserror::Error;

use super::module::{
    EquivariantError, Generator, MonomialModule, RelationTerm, TorusAction, Weight,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

fn parse_weight(line: usize, text: &str) -> Result<Weight, ParseError> {
    text.split(',')
        .map(|x| {
            x.trim()
                .parse::<i64>()
                .map_err(|_| err(line, format!("invalid weight entry '{}'", x.trim())))
        })
        .collect::<Result<_, _>>()
        .map(Weight)
}

/// `name : w_1, …, w_l`.
fn parse_declaration(line: usize, rest: &str) -> Result<(String, Weight), ParseError> {
    let (name, weight) = rest
        .split_once(':')
        .ok_or_else(|| err(line, "expected 'name : weight'"))?;
    let name = name.trim();
    if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
        return Err(err(line, format!("invalid name '{name}'")));
    }
    Ok((name.to_string(), parse_weight(line, weight)?))
}

/// A term before names are resolved into variables and the generator.
struct RawTerm {
    coefficient: i64,
    vars: Vec<(String, u32)>,
}

fn parse_term(line: usize, text: &str) -> Result<RawTerm, ParseError> {
    let mut text = text.trim();
    let mut coefficient: i64 = 1;
    if let Some(rest) = text.strip_prefix('-') {
        coefficient = -1;
        text = rest.trim();
    }
    if text.is_empty() {
        return Err(err(line, "empty relation term"));
    }
    let mut vars = Vec::new();
    for factor in text.split('*').map(str::trim) {
        if factor.is_empty() {
            return Err(err(line, "empty factor"));
        }
        if let Ok(c) = factor.parse::<i64>() {
            coefficient = coefficient
                .checked_mul(c)
                .ok_or_else(|| err(line, "coefficient overflow"))?;
            continue;
        }
        let (name, exp) = match factor.split_once('^') {
            Some((n, e)) => (
                n.trim(),
                e.trim()
                    .parse::<u32>()
                    .map_err(|_| err(line, format!("invalid exponent in '{factor}'")))?,
            ),
            None => (factor, 1),
        };
        vars.push((name.to_string(), exp));
    }
    Ok(RawTerm { coefficient, vars })
}

fn split_terms(text: &str) -> Vec<String> {
    let mut terms = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        match c {
            '+' => terms.push(std::mem::take(&mut current)),
            '-' if !current.trim().is_empty() => {
                terms.push(std::mem::take(&mut current));
                current.push('-');
            }
            _ => current.push(c),
        }
    }
    terms.push(current);
    terms
}

pub fn parse_module(text: &str) -> Result<MonomialModule, ParseError> {
    let mut rank: Option<(usize, usize)> = None;
    let mut vars: Vec<(usize, String, Weight)> = Vec::new();
    let mut gens: Vec<(usize, String, Weight)> = Vec::new();
    let mut rels: Vec<(usize, Vec<RawTerm>)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (keyword, rest) = content
            .split_once(char::is_whitespace)
            .unwrap_or((content, ""));
        match keyword {
            "rank" => {
                if rank.is_some() {
                    return Err(err(line, "rank declared twice"));
                }
                let l = rest
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| err(line, format!("invalid rank '{}'", rest.trim())))?;
                rank = Some((line, l));
            }
            "var" => {
                let (name, w) = parse_declaration(line, rest)?;
                vars.push((line, name, w));
            }
            "gen" => {
                let (name, w) = parse_declaration(line, rest)?;
                gens.push((line, name, w));
            }
            "rel" => {
                let terms = split_terms(rest)
                    .iter()
                    .map(|t| parse_term(line, t))
                    .collect::<Result<Vec<_>, _>>()?;
                rels.push((line, terms));
            }
            other => return Err(err(line, format!("unknown keyword '{other}'"))),
        }
    }

    let (rank_line, l) =
        rank.ok_or_else(|| err(text.lines().count().max(1), "missing 'rank' line"))?;
    let mut names: HashMap<&str, usize> = HashMap::new();
    for (line, name, w) in vars.iter().chain(&gens) {
        if names.insert(name, *line).is_some() {
            return Err(err(*line, format!("duplicate name '{name}'")));
        }
        if w.rank() != l {
            return Err(err(
                *line,
                format!("weight has {} entries, rank is {l}", w.rank()),
            ));
        }
    }
    let var_index: HashMap<&str, usize> = vars
        .iter()
        .enumerate()
        .map(|(i, (_, n, _))| (n.as_str(), i))
        .collect();
    let gen_index: HashMap<&str, usize> = gens
        .iter()
        .enumerate()
        .map(|(i, (_, n, _))| (n.as_str(), i))
        .collect();

    let action = TorusAction::new(l, vars.iter().map(|(_, _, w)| w.clone()).collect()).map_err(
        |e| match e {
            EquivariantError::ZeroCoordWeight { index } => {
                err(vars[index].0, "coordinate weight must be nonzero")
            }
            other => err(rank_line, other.to_string()),
        },
    )?;

    let mut relations = Vec::with_capacity(rels.len());
    for (line, terms) in &rels {
        let mut row = Vec::with_capacity(terms.len());
        for t in terms {
            let mut exponents = vec![0u32; vars.len()];
            let mut generator = None;
            for (name, exp) in &t.vars {
                if let Some(&j) = var_index.get(name.as_str()) {
                    exponents[j] += exp;
                } else if let Some(&g) = gen_index.get(name.as_str()) {
                    if *exp != 1 {
                        return Err(err(
                            *line,
                            format!("generator '{name}' cannot carry an exponent"),
                        ));
                    }
                    if generator.replace(g).is_some() {
                        return Err(err(*line, "a term must contain exactly one generator"));
                    }
                } else {
                    return Err(err(*line, format!("unknown name '{name}'")));
                }
            }
            let generator =
                generator.ok_or_else(|| err(*line, "a term must contain exactly one generator"))?;
            row.push(RelationTerm {
                generator,
                coefficient: t.coefficient,
                exponents,
            });
        }
        relations.push(row);
    }

    let generators = gens
        .iter()
        .map(|(_, name, w)| Generator {
            name: name.clone(),
            weight: w.clone(),
        })
        .collect();
    MonomialModule::new(action, generators, relations).map_err(|e| match e {
        EquivariantError::NonHomogeneousRelation { row } => err(
            rels[row].0,
            format!("relation {} is not weight-homogeneous", row + 1),
        ),
        EquivariantError::ZeroCoefficient { row } => err(rels[row].0, "zero coefficient"),
        EquivariantError::NoGenerators => {
            err(text.lines().count().max(1), "no generators declared")
        }
        other => err(rank_line, other.to_string()),
    })
}
