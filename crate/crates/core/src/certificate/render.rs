//! Human-readable proof listings and their parser.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::{CertTerm, Certificate, Derivation};
use crate::poly::{ExponentVec, KrivineTerm, Polynomial, Rational, Style};

const HEADER: &str = "Non-negative representation:";

fn tex_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom())
    }
}

fn step_ref(k: usize) -> String {
    format!("\\textrm{{[step {k}]}}")
}

fn term_item(cert: &Certificate, t: &CertTerm) -> String {
    match &t.derivation {
        Derivation::Krivine(k) => match t.step {
            Some(s) if cert.trace.get(s - 1).is_some_and(|st| st.poly == t.element) => step_ref(s),
            _ => k.render_tex(),
        },
        Derivation::Axiom { axiom, multiplier } => {
            let axiom = format!("\\textrm{{[axiom {}]}}", axiom + 1);
            if multiplier.is_constant() {
                axiom
            } else {
                let m = KrivineTerm { alpha: multiplier.clone(), beta: ExponentVec::zero(cert.nvars) };
                format!("{}*{axiom}", m.render_tex())
            }
        }
    }
}

/// Numbered derivation steps followed by the weighted combination. A
/// certificate without steps renders as the single combination line.
pub fn render_proof(cert: &Certificate) -> String {
    let mut out = String::new();
    for s in &cert.trace {
        let _ = writeln!(out, "{} ${}$", step_ref(s.index), s.poly.render(Style::Tex));
        out.push('\n');
    }
    let mut parts: Vec<(bool, String)> = Vec::new();
    for t in &cert.terms {
        let item = term_item(cert, t);
        let mag = t.lambda.abs();
        let text = if mag.is_one() { item } else { format!("{}*{item}", tex_rational(&mag)) };
        parts.push((t.lambda.is_negative(), text));
    }
    if !cert.gamma.is_zero() || parts.is_empty() {
        parts.push((cert.gamma.is_negative(), tex_rational(&cert.gamma.abs())));
    }
    let mut line = String::new();
    for (i, (neg, text)) in parts.iter().enumerate() {
        match (i, neg) {
            (0, true) => line.push('-'),
            (0, false) => {}
            (_, true) => line.push_str(" - "),
            (_, false) => line.push_str(" + "),
        }
        line.push_str(text);
    }
    if !cert.trace.is_empty() {
        let _ = writeln!(out, "{HEADER}");
        out.push('\n');
    }
    let _ = writeln!(out, "${line} \\geq 0$");
    out
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProofParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("reference to unknown step {0}")]
    UnknownStep(usize),
    #[error("step {0} is not a single Krivine product")]
    NotKrivine(usize),
    #[error("reference to unknown axiom {0}")]
    UnknownAxiom(usize),
    #[error("no representation line")]
    MissingRepresentation,
}

enum Factor {
    Coef(Rational),
    Var { var: usize, exp: u32, one_minus: bool },
    Step(usize),
    Axiom(usize),
}

#[derive(Default)]
struct Term {
    coef: Option<Rational>,
    alpha: BTreeMap<usize, u32>,
    beta: BTreeMap<usize, u32>,
    step: Option<usize>,
    axiom: Option<usize>,
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn err<T>(&self, msg: &str) -> Result<T, ProofParseError> {
        Err(ProofParseError::Syntax { line: self.line, msg: format!("{msg} at column {}", self.pos + 1) })
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.s[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<(), ProofParseError> {
        if self.eat(lit) {
            Ok(())
        } else {
            self.err(&format!("expected {lit:?}"))
        }
    }

    fn digits(&mut self) -> Result<&'a str, ProofParseError> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        Ok(std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits"))
    }

    fn small(&mut self) -> Result<usize, ProofParseError> {
        let d = self.digits()?;
        d.parse().or_else(|_| self.err("number out of range"))
    }

    fn braced_or_bare(&mut self) -> Result<usize, ProofParseError> {
        if self.eat("{") {
            let v = self.small()?;
            self.expect("}")?;
            Ok(v)
        } else {
            self.small()
        }
    }

    fn exponent(&mut self) -> Result<u32, ProofParseError> {
        if self.eat("^") {
            let e = self.braced_or_bare()?;
            u32::try_from(e).or_else(|_| self.err("exponent out of range"))
        } else {
            Ok(1)
        }
    }

    fn var_index(&mut self) -> Result<usize, ProofParseError> {
        let v = self.braced_or_bare()?;
        if v == 0 {
            return self.err("variables are numbered from 1");
        }
        Ok(v - 1)
    }

    fn factor(&mut self) -> Result<Factor, ProofParseError> {
        if self.eat("\\frac{") {
            let n: BigInt = self.digits()?.parse().expect("digits");
            self.expect("}{")?;
            let d: BigInt = self.digits()?.parse().expect("digits");
            self.expect("}")?;
            if d.is_zero() {
                return self.err("zero denominator");
            }
            return Ok(Factor::Coef(Rational::new(n, d)));
        }
        if self.eat("\\textrm{[step") {
            let k = self.small()?;
            self.expect("]}")?;
            return Ok(Factor::Step(k));
        }
        if self.eat("\\textrm{[axiom") {
            let k = self.small()?;
            self.expect("]}")?;
            return Ok(Factor::Axiom(k));
        }
        if self.eat("x_") {
            let var = self.var_index()?;
            let exp = self.exponent()?;
            return Ok(Factor::Var { var, exp, one_minus: false });
        }
        if self.eat("(1-x_") {
            let var = self.var_index()?;
            self.expect(")")?;
            let exp = self.exponent()?;
            return Ok(Factor::Var { var, exp, one_minus: true });
        }
        if self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            let n: BigInt = self.digits()?.parse().expect("digits");
            return Ok(Factor::Coef(Rational::from_integer(n)));
        }
        self.err("unexpected input")
    }

    fn term(&mut self) -> Result<Term, ProofParseError> {
        let mut t = Term::default();
        loop {
            match self.factor()? {
                Factor::Coef(c) => t.coef = Some(t.coef.take().unwrap_or_else(Rational::one) * c),
                Factor::Var { var, exp, one_minus } => {
                    let slot = if one_minus { &mut t.beta } else { &mut t.alpha };
                    *slot.entry(var).or_insert(0) += exp;
                }
                Factor::Step(k) if t.step.is_none() && t.axiom.is_none() => t.step = Some(k),
                Factor::Axiom(k) if t.step.is_none() && t.axiom.is_none() => t.axiom = Some(k),
                _ => return self.err("more than one reference in a term"),
            }
            if !self.eat("*") {
                return Ok(t);
            }
        }
    }

    /// A signed sum of terms running to the end of input.
    fn sum(&mut self) -> Result<Vec<(Rational, Term)>, ProofParseError> {
        let mut out = Vec::new();
        let mut sign = if self.eat("-") {
            -Rational::one()
        } else {
            self.eat("+");
            Rational::one()
        };
        loop {
            let mut t = self.term()?;
            let c = t.coef.take().unwrap_or_else(Rational::one) * &sign;
            out.push((c, t));
            if self.pos == self.s.len() {
                return Ok(out);
            }
            sign = if self.eat("+") {
                Rational::one()
            } else if self.eat("-") {
                -Rational::one()
            } else {
                return self.err("expected '+' or '-'");
            };
        }
    }
}

fn parse_sum(text: &str, line: usize) -> Result<Vec<(Rational, Term)>, ProofParseError> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    Cursor { s: compact.as_bytes(), pos: 0, line }.sum()
}

fn exponents(n: usize, map: &BTreeMap<usize, u32>, line: usize) -> Result<ExponentVec, ProofParseError> {
    let mut e = vec![0; n];
    for (&v, &k) in map {
        if v >= n {
            return Err(ProofParseError::Syntax { line, msg: format!("variable x_{} out of range", v + 1) });
        }
        e[v] = k;
    }
    Ok(ExponentVec::new(e))
}

fn dollars(s: &str) -> Option<&str> {
    let start = s.find('$')?;
    let end = s.rfind('$')?;
    (end > start).then(|| &s[start + 1..end])
}

/// Parses the output of [`render_proof`] back into a certificate over
/// `nvars` variables. Axiom references index into `axioms`. Step
/// references are resolved to the Krivine products they name.
pub fn parse_proof(text: &str, nvars: usize, axioms: &[Polynomial]) -> Result<Certificate, ProofParseError> {
    let mut steps: BTreeMap<usize, Polynomial> = BTreeMap::new();
    let mut repr = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let s = raw.trim();
        if s.is_empty() || s == HEADER {
            continue;
        }
        let syntax = |msg: &str| ProofParseError::Syntax { line, msg: msg.to_string() };
        let body = dollars(s).ok_or_else(|| syntax("expected a $...$ expression"))?;
        if let Some(rest) = s.strip_prefix("\\textrm{[step") {
            let k: usize = rest
                .split(']')
                .next()
                .and_then(|d| d.trim().parse().ok())
                .ok_or_else(|| syntax("bad step label"))?;
            let mut p = Polynomial::zero(nvars);
            for (c, t) in parse_sum(body, line)? {
                if !t.beta.is_empty() || t.step.is_some() || t.axiom.is_some() {
                    return Err(syntax("step polynomials are plain monomial sums"));
                }
                p.add_term(exponents(nvars, &t.alpha, line)?, c);
            }
            steps.insert(k, p);
        } else {
            let body = body.trim_end().strip_suffix("\\geq 0").ok_or_else(|| syntax("expected '\\geq 0'"))?;
            repr = Some((line, body.to_string()));
        }
    }
    let (line, body) = repr.ok_or(ProofParseError::MissingRepresentation)?;

    let mut gamma = Rational::zero();
    let mut terms = Vec::new();
    for (lambda, t) in parse_sum(&body, line)? {
        let alpha = exponents(nvars, &t.alpha, line)?;
        let beta = exponents(nvars, &t.beta, line)?;
        if let Some(k) = t.step {
            let p = steps.get(&k).ok_or(ProofParseError::UnknownStep(k))?;
            let term = KrivineTerm::recognize(p).ok_or(ProofParseError::NotKrivine(k))?;
            let term = KrivineTerm::new(
                term.alpha.mul(&alpha).as_slice().to_vec(),
                term.beta.mul(&beta).as_slice().to_vec(),
            );
            terms.push(CertTerm { lambda, element: term.expand(), derivation: Derivation::Krivine(term), step: None });
        } else if let Some(k) = t.axiom {
            if k == 0 || k > axioms.len() || !beta.is_constant() {
                return Err(ProofParseError::UnknownAxiom(k));
            }
            let element = &Polynomial::monomial(alpha.clone(), Rational::one()) * &axioms[k - 1];
            terms.push(CertTerm {
                lambda,
                element,
                derivation: Derivation::Axiom { axiom: k - 1, multiplier: alpha },
                step: None,
            });
        } else if alpha.is_constant() && beta.is_constant() {
            gamma += lambda;
        } else {
            let term = KrivineTerm { alpha, beta };
            terms.push(CertTerm { lambda, element: term.expand(), derivation: Derivation::Krivine(term), step: None });
        }
    }
    Ok(Certificate {
        problem: String::new(),
        digest: String::new(),
        nvars,
        gamma,
        terms,
        trace: Vec::new(),
    })
}
