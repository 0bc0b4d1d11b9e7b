//! Engine configuration: the coefficient field, the scalar ring, order mode
//! and resource limits, parsed from a flat `key = value` text format.
//!
//! ```text
//! field = a^2 - 2        # or: rationals
//! ring = integers        # or: invert 2,3
//! ordered = true
//! root_index = 1         # which real root realizes `a` (by increasing value)
//! limits.clauses = 10000
//! limits.samples = 10000
//! limits.seed = 17
//! ```

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{FieldSpec, Rat, RingSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    pub max_clauses: usize,
    pub samples: usize,
    pub coeff_box: i64,
    pub generators: usize,
    pub seed: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_clauses: 10_000, samples: 10_000, coeff_box: 3, generators: 3, seed: 17 }
    }
}

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub field: Arc<FieldSpec>,
    pub ring: RingSpec,
    pub limits: Limits,
}

impl EngineConfig {
    pub fn rationals_integers() -> EngineConfig {
        EngineConfig {
            field: FieldSpec::rationals(false),
            ring: RingSpec::integers(),
            limits: Limits::default(),
        }
    }

    pub fn parse(text: &str) -> Result<EngineConfig> {
        let mut field_txt = "rationals".to_string();
        let mut ring_txt = "integers".to_string();
        let mut ordered = false;
        let mut root_index = 0usize;
        let mut limits = Limits::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!("line {}: expected key = value", lineno + 1)));
            };
            let key = key.trim();
            let value = value.trim();
            match key {
                "field" => field_txt = value.to_string(),
                "ring" => ring_txt = value.to_string(),
                "ordered" => {
                    ordered = value
                        .parse()
                        .map_err(|_| Error::Config(format!("bad boolean `{value}`")))?
                }
                "root_index" => {
                    root_index = value
                        .parse()
                        .map_err(|_| Error::Config(format!("bad root index `{value}`")))?
                }
                "limits.clauses" => limits.max_clauses = parse_usize(value)?,
                "limits.samples" => limits.samples = parse_usize(value)?,
                "limits.box" => {
                    limits.coeff_box = value
                        .parse()
                        .map_err(|_| Error::Config(format!("bad box `{value}`")))?
                }
                "limits.generators" => limits.generators = parse_usize(value)?,
                "limits.seed" => {
                    limits.seed = value
                        .parse()
                        .map_err(|_| Error::Config(format!("bad seed `{value}`")))?
                }
                other => return Err(Error::Config(format!("unknown key `{other}`"))),
            }
        }
        let field = parse_field(&field_txt, ordered, root_index)?;
        let ring = parse_ring(&ring_txt)?;
        Ok(EngineConfig { field, ring, limits })
    }
}

fn parse_usize(value: &str) -> Result<usize> {
    value.parse().map_err(|_| Error::Config(format!("bad number `{value}`")))
}

/// `rationals`, or a monic integer polynomial in `a` such as `a^2 - 2`.
pub fn parse_field(text: &str, ordered: bool, root_index: usize) -> Result<Arc<FieldSpec>> {
    let text = text.trim();
    if text == "rationals" || text == "Q" {
        return Ok(FieldSpec::rationals(ordered));
    }
    let coeffs = parse_int_poly(text)?;
    FieldSpec::number_field(coeffs, ordered.then_some(root_index))
}

/// `integers`, or `invert p1,p2,...` for a localization of the integers.
pub fn parse_ring(text: &str) -> Result<RingSpec> {
    let text = text.trim();
    if text == "integers" || text == "Z" {
        return Ok(RingSpec::integers());
    }
    if let Some(rest) = text.strip_prefix("invert") {
        let mut primes = Vec::new();
        for part in rest.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let p: u64 =
                part.parse().map_err(|_| Error::Config(format!("bad prime `{part}`")))?;
            primes.push(p);
        }
        if primes.is_empty() {
            return Err(Error::Config("invert needs at least one prime".into()));
        }
        return RingSpec::localization(primes);
    }
    Err(Error::Config(format!("unknown ring `{text}`")))
}

pub fn parse_rat(text: &str) -> Result<Rat> {
    let text = text.trim();
    let (neg, text) = match text.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, text),
    };
    let q = if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| Error::Config(format!("bad rational `{text}`")))?;
        let d: BigInt = d.trim().parse().map_err(|_| Error::Config(format!("bad rational `{text}`")))?;
        if d.is_zero() {
            return Err(Error::Config("zero denominator".into()));
        }
        Rat::new(n, d)
    } else {
        let n: BigInt =
            text.parse().map_err(|_| Error::Config(format!("bad rational `{text}`")))?;
        Rat::from(n)
    };
    Ok(if neg { -q } else { q })
}

/// Integer polynomial in `a`, little-endian coefficients.
fn parse_int_poly(text: &str) -> Result<Vec<BigInt>> {
    let mut coeffs: Vec<BigInt> = Vec::new();
    let mut add = |power: usize, c: BigInt| {
        if coeffs.len() <= power {
            coeffs.resize(power + 1, BigInt::zero());
        }
        coeffs[power] += c;
    };
    let cleaned = text.replace(' ', "");
    let mut rest = cleaned.as_str();
    let mut sign = 1i64;
    if let Some(r) = rest.strip_prefix('-') {
        sign = -1;
        rest = r;
    } else if let Some(r) = rest.strip_prefix('+') {
        rest = r;
    }
    while !rest.is_empty() {
        let term_end = rest
            .find(['+', '-'])
            .unwrap_or(rest.len());
        let term = &rest[..term_end];
        if term.is_empty() {
            return Err(Error::Config(format!("bad polynomial `{text}`")));
        }
        let (coeff_txt, power) = if let Some(idx) = term.find('a') {
            let c = &term[..idx];
            let after = &term[idx + 1..];
            let power = if let Some(e) = after.strip_prefix('^') {
                e.parse::<usize>().map_err(|_| Error::Config(format!("bad exponent in `{term}`")))?
            } else if after.is_empty() {
                1
            } else {
                return Err(Error::Config(format!("bad term `{term}`")));
            };
            (c.trim_end_matches('*'), power)
        } else {
            (term, 0)
        };
        let coeff: BigInt = if coeff_txt.is_empty() {
            BigInt::from(1)
        } else {
            coeff_txt
                .parse()
                .map_err(|_| Error::Config(format!("bad coefficient `{coeff_txt}`")))?
        };
        add(power, coeff * BigInt::from(sign));
        if term_end == rest.len() {
            break;
        }
        sign = if rest.as_bytes()[term_end] == b'-' { -1 } else { 1 };
        rest = &rest[term_end + 1..];
    }
    while coeffs.last().map_or(false, |c| c.is_zero()) {
        coeffs.pop();
    }
    if coeffs.len() < 2 {
        return Err(Error::Config(format!("`{text}` is not a polynomial in a")));
    }
    Ok(coeffs)
}
