//! Versioned JSON certificate files. Every rational is a `"num/den"` string.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{CertTerm, Certificate, Derivation, ProofStep, StepParent};
use crate::poly::{ExponentVec, Generator, KrivineTerm, Polynomial, Rational};

pub const CERT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CertFileError {
    #[error("malformed certificate: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported certificate format version {found} (expected {CERT_FORMAT_VERSION})")]
    Version { found: u32 },
    #[error("bad rational {0:?}: expected \"num/den\"")]
    Rational(String),
    #[error("malformed certificate: {0}")]
    Shape(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileRepr {
    format_version: u32,
    problem: String,
    digest: String,
    nvars: usize,
    gamma: String,
    terms: Vec<TermRepr>,
    #[serde(default)]
    trace: Vec<StepRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MonoRepr {
    coeff: String,
    exponents: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRepr {
    lambda: String,
    polynomial: Vec<MonoRepr>,
    derivation: DerivationRepr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    step: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum DerivationRepr {
    Krivine { alpha: Vec<u32>, beta: Vec<u32> },
    Axiom { axiom: usize, multiplier: Vec<u32> },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum ParentRepr {
    Initial { alpha: Vec<u32>, beta: Vec<u32> },
    Step { step: usize },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepRepr {
    index: usize,
    alpha: Vec<u32>,
    beta: Vec<u32>,
    polynomial: Vec<MonoRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parent: Option<ParentRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<String>,
}

fn fraction(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_fraction(s: &str) -> Result<Rational, CertFileError> {
    let bad = || CertFileError::Rational(s.to_string());
    let (num, den) = s.split_once('/').unwrap_or((s, "1"));
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    if !digits(num.strip_prefix('-').unwrap_or(num)) || !digits(den) {
        return Err(bad());
    }
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

fn poly_repr(p: &Polynomial) -> Vec<MonoRepr> {
    p.terms()
        .map(|(e, c)| MonoRepr { coeff: fraction(c), exponents: e.as_slice().to_vec() })
        .collect()
}

fn poly_from(n: usize, terms: Vec<MonoRepr>) -> Result<Polynomial, CertFileError> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        out.push((ExponentVec::new(t.exponents), parse_fraction(&t.coeff)?));
    }
    Polynomial::from_terms(n, out).map_err(|e| CertFileError::Shape(e.to_string()))
}

fn term_from(n: usize, alpha: Vec<u32>, beta: Vec<u32>) -> Result<KrivineTerm, CertFileError> {
    if alpha.len() != n || beta.len() != n {
        return Err(CertFileError::Shape(format!("exponent vectors must have length {n}")));
    }
    Ok(KrivineTerm::new(alpha, beta))
}

fn generator_from(s: &str) -> Result<Generator, CertFileError> {
    let bad = || CertFileError::Shape(format!("bad generator {s:?}"));
    let inner = s.strip_prefix('(').and_then(|r| r.strip_suffix(')'));
    let (one_minus, rest) = match inner.and_then(|r| r.strip_prefix("1-")) {
        Some(r) => (true, r),
        None => (false, s),
    };
    let v: usize = rest.strip_prefix('x').ok_or_else(bad)?.parse().map_err(|_| bad())?;
    if v == 0 {
        return Err(bad());
    }
    Ok(if one_minus { Generator::OneMinusX(v - 1) } else { Generator::X(v - 1) })
}

impl Certificate {
    pub fn to_json(&self) -> String {
        let repr = FileRepr {
            format_version: CERT_FORMAT_VERSION,
            problem: self.problem.clone(),
            digest: self.digest.clone(),
            nvars: self.nvars,
            gamma: fraction(&self.gamma),
            terms: self
                .terms
                .iter()
                .map(|t| TermRepr {
                    lambda: fraction(&t.lambda),
                    polynomial: poly_repr(&t.element),
                    derivation: match &t.derivation {
                        Derivation::Krivine(k) => DerivationRepr::Krivine {
                            alpha: k.alpha.as_slice().to_vec(),
                            beta: k.beta.as_slice().to_vec(),
                        },
                        Derivation::Axiom { axiom, multiplier } => {
                            DerivationRepr::Axiom { axiom: *axiom, multiplier: multiplier.as_slice().to_vec() }
                        }
                    },
                    step: t.step,
                })
                .collect(),
            trace: self
                .trace
                .iter()
                .map(|s| StepRepr {
                    index: s.index,
                    alpha: s.term.alpha.as_slice().to_vec(),
                    beta: s.term.beta.as_slice().to_vec(),
                    polynomial: poly_repr(&s.poly),
                    parent: s.parent.as_ref().map(|p| match p {
                        StepParent::Initial(t) => ParentRepr::Initial {
                            alpha: t.alpha.as_slice().to_vec(),
                            beta: t.beta.as_slice().to_vec(),
                        },
                        StepParent::Step(k) => ParentRepr::Step { step: *k },
                    }),
                    generator: s.generator.map(|g| g.to_string()),
                })
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&repr).expect("certificate serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, CertFileError> {
        let repr: FileRepr = serde_json::from_str(text)?;
        if repr.format_version != CERT_FORMAT_VERSION {
            return Err(CertFileError::Version { found: repr.format_version });
        }
        let n = repr.nvars;
        let mut terms = Vec::with_capacity(repr.terms.len());
        for t in repr.terms {
            let derivation = match t.derivation {
                DerivationRepr::Krivine { alpha, beta } => Derivation::Krivine(term_from(n, alpha, beta)?),
                DerivationRepr::Axiom { axiom, multiplier } => {
                    if multiplier.len() != n {
                        return Err(CertFileError::Shape(format!("multiplier must have length {n}")));
                    }
                    Derivation::Axiom { axiom, multiplier: ExponentVec::new(multiplier) }
                }
            };
            terms.push(CertTerm {
                lambda: parse_fraction(&t.lambda)?,
                element: poly_from(n, t.polynomial)?,
                derivation,
                step: t.step,
            });
        }
        let mut trace = Vec::with_capacity(repr.trace.len());
        for s in repr.trace {
            trace.push(ProofStep {
                index: s.index,
                term: term_from(n, s.alpha, s.beta)?,
                poly: poly_from(n, s.polynomial)?,
                parent: match s.parent {
                    None => None,
                    Some(ParentRepr::Initial { alpha, beta }) => Some(StepParent::Initial(term_from(n, alpha, beta)?)),
                    Some(ParentRepr::Step { step }) => Some(StepParent::Step(step)),
                },
                generator: s.generator.as_deref().map(generator_from).transpose()?,
            });
        }
        Ok(Certificate {
            problem: repr.problem,
            digest: repr.digest,
            nvars: n,
            gamma: parse_fraction(&repr.gamma)?,
            terms,
            trace,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational;

    #[test]
    fn fractions_are_strict() {
        assert_eq!(parse_fraction("-8/3").unwrap(), rational(-8, 3));
        assert_eq!(parse_fraction("4/2").unwrap(), rational(2, 1));
        for bad in ["0.5", "1/0", "1e3", "", "/3", "+2/3", "2/-3"] {
            assert!(parse_fraction(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn generators() {
        for g in [Generator::X(0), Generator::OneMinusX(11)] {
            assert_eq!(generator_from(&g.to_string()).unwrap(), g);
        }
        assert!(generator_from("y1").is_err());
        assert!(generator_from("x0").is_err());
    }

    #[test]
    fn version_is_checked() {
        let c = Certificate::from_terms(1, rational(1, 1), &[]);
        let text = c.to_json().replace("\"format_version\": 1", "\"format_version\": 9");
        assert!(matches!(Certificate::from_json(&text), Err(CertFileError::Version { found: 9 })));
        assert_eq!(Certificate::from_json(&c.to_json()).unwrap(), c);
    }
}
