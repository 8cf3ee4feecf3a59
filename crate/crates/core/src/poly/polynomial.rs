use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{check_dims, format_rational, parse_rational, ExponentVec, PolyError, Rational};

/// Sparse polynomial with exact rational coefficients.
///
/// Terms are kept in graded-lex order and zero coefficients are never
/// stored, so structural equality is polynomial equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<ExponentVec, Rational>,
}

/// Rendering style for [`Polynomial::render`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    /// `3*x1^2*x2 - 14/3`
    Plain,
    /// `3*x_{1}^{2}*x_{2} - \frac{14}{3}`
    Tex,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(ExponentVec::zero(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    /// The polynomial `x_{var+1}`.
    pub fn var(nvars: usize, var: usize) -> Self {
        Self::monomial(ExponentVec::unit(nvars, var), Rational::one())
    }

    /// The polynomial `1 - x_{var+1}`.
    pub fn one_minus_var(nvars: usize, var: usize) -> Self {
        let mut p = Self::one(nvars);
        p.add_term(ExponentVec::unit(nvars, var), -Rational::one());
        p
    }

    pub fn monomial(exp: ExponentVec, coeff: Rational) -> Self {
        let mut p = Self::zero(exp.nvars());
        p.add_term(exp, coeff);
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, combining
    /// repeated monomials.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (ExponentVec, Rational)>,
    {
        let mut p = Self::zero(nvars);
        for (exp, c) in terms {
            check_dims(nvars, exp.nvars())?;
            p.add_term(exp, c);
        }
        Ok(p)
    }

    /// Convenience constructor from integer data, mainly for tests and examples.
    pub fn from_i64(nvars: usize, terms: &[(i64, &[u32])]) -> Self {
        let mut p = Self::zero(nvars);
        for (c, e) in terms {
            assert_eq!(e.len(), nvars, "exponent length must equal nvars");
            p.add_term(ExponentVec::new(e.to_vec()), Rational::from_integer(BigInt::from(*c)));
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ExponentVec, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &ExponentVec) -> Rational {
        self.terms.get(exp).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&ExponentVec::zero(self.nvars))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(ExponentVec::is_constant)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(ExponentVec::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e.get(var)).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, exp: ExponentVec, coeff: Rational) {
        debug_assert_eq!(exp.nvars(), self.nvars);
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        check_dims(self.nvars, other.nvars)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        check_dims(self.nvars, other.nvars)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        Ok(out)
    }

    /// Schoolbook product. This is the reference multiplication that the
    /// certificate verifier relies on.
    pub fn mul_naive(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        check_dims(self.nvars, other.nvars)?;
        let mut out = Polynomial::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.mul(eb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Rational) -> Polynomial {
        if s.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    /// Repeated naive multiplication.
    pub fn pow(&self, k: u32) -> Polynomial {
        let mut out = Polynomial::one(self.nvars);
        for _ in 0..k {
            out = out.mul_naive(self).expect("same nvars");
        }
        out
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational, PolyError> {
        check_dims(self.nvars, point.len())?;
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(e.as_slice()) {
                for _ in 0..k {
                    term *= x;
                }
            }
            total += term;
        }
        Ok(total)
    }

    pub fn evaluate_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let m: f64 = point.iter().zip(e.as_slice()).map(|(x, &k)| x.powi(k as i32)).product();
                super::to_f64(c) * m
            })
            .sum()
    }

    /// Maps every exponent through `f`, combining terms that collide.
    pub fn map_exponents(&self, mut f: impl FnMut(&ExponentVec) -> ExponentVec) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(f(e), c.clone());
        }
        out
    }

    pub fn render(&self, style: Style) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        // Highest monomial first in pure lexicographic order.
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by(|a, b| b.0.lex_cmp(a.0));
        for (i, (e, c)) in ordered.into_iter().enumerate() {
            let negative = c.is_negative();
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mag = c.abs();
            let mono = render_monomial(e, style);
            let coeff = match style {
                Style::Plain => format_rational(&mag),
                Style::Tex if mag.is_integer() => mag.numer().to_string(),
                Style::Tex => format!("\\frac{{{}}}{{{}}}", mag.numer(), mag.denom()),
            };
            match (mono.is_empty(), mag.is_one()) {
                (true, _) => out.push_str(&coeff),
                (false, true) => out.push_str(&mono),
                (false, false) => {
                    out.push_str(&coeff);
                    out.push('*');
                    out.push_str(&mono);
                }
            }
        }
        out
    }
}

fn render_monomial(e: &ExponentVec, style: Style) -> String {
    let mut parts = Vec::new();
    for (i, &k) in e.as_slice().iter().enumerate() {
        if k == 0 {
            continue;
        }
        let v = i + 1;
        parts.push(match (style, k) {
            (Style::Plain, 1) => format!("x{v}"),
            (Style::Plain, _) => format!("x{v}^{k}"),
            (Style::Tex, 1) => format!("x_{{{v}}}"),
            (Style::Tex, _) => format!("x_{{{v}}}^{{{k}}}"),
        });
    }
    parts.join("*")
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Style::Plain))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("polynomial addition with mismatched nvars")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("polynomial subtraction with mismatched nvars")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.mul_naive(rhs).expect("polynomial product with mismatched nvars")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coeff: String,
    exponents: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    nvars: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyRepr {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermRepr { coeff: format_rational(c), exponents: e.as_slice().to_vec() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = PolyRepr::deserialize(d)?;
        let mut terms = Vec::with_capacity(repr.terms.len());
        for t in repr.terms {
            let c = parse_rational(&t.coeff).map_err(D::Error::custom)?;
            terms.push((ExponentVec::new(t.exponents), c));
        }
        Polynomial::from_terms(repr.nvars, terms).map_err(D::Error::custom)
    }
}
