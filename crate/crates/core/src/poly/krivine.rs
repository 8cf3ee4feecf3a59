use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{binomial, ExponentVec, Polynomial, Rational};

/// A generator of the Krivine cone on the unit cube.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Generator {
    /// `x_{i+1}`
    X(usize),
    /// `1 - x_{i+1}`
    OneMinusX(usize),
}

impl Generator {
    /// The `2n` generators in the order `x_1, 1-x_1, x_2, 1-x_2, …`.
    pub fn all(nvars: usize) -> impl Iterator<Item = Generator> {
        (0..nvars).flat_map(|i| [Generator::X(i), Generator::OneMinusX(i)])
    }

    pub fn var(self) -> usize {
        match self {
            Generator::X(i) | Generator::OneMinusX(i) => i,
        }
    }

    pub fn polynomial(self, nvars: usize) -> Polynomial {
        match self {
            Generator::X(i) => Polynomial::var(nvars, i),
            Generator::OneMinusX(i) => Polynomial::one_minus_var(nvars, i),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::X(i) => write!(f, "x{}", i + 1),
            Generator::OneMinusX(i) => write!(f, "(1-x{})", i + 1),
        }
    }
}

/// The product `x^α (1 − x)^β`, non-negative on `[0,1]^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KrivineTerm {
    pub alpha: ExponentVec,
    pub beta: ExponentVec,
}

impl KrivineTerm {
    pub fn new(alpha: Vec<u32>, beta: Vec<u32>) -> Self {
        assert_eq!(alpha.len(), beta.len(), "alpha and beta must have equal length");
        Self { alpha: ExponentVec::new(alpha), beta: ExponentVec::new(beta) }
    }

    pub fn one(nvars: usize) -> Self {
        Self { alpha: ExponentVec::zero(nvars), beta: ExponentVec::zero(nvars) }
    }

    pub fn generator(nvars: usize, g: Generator) -> Self {
        Self::one(nvars).times(g)
    }

    pub fn nvars(&self) -> usize {
        self.alpha.nvars()
    }

    pub fn degree(&self) -> u32 {
        self.alpha.degree() + self.beta.degree()
    }

    pub fn times(&self, g: Generator) -> KrivineTerm {
        match g {
            Generator::X(i) => KrivineTerm { alpha: self.alpha.with_incremented(i), beta: self.beta.clone() },
            Generator::OneMinusX(i) => KrivineTerm { alpha: self.alpha.clone(), beta: self.beta.with_incremented(i) },
        }
    }

    /// Expands `Π x_i^{α_i} (1 − x_i)^{β_i}` with the binomial theorem.
    pub fn expand(&self) -> Polynomial {
        let n = self.nvars();
        let mut partial: Vec<(Vec<u32>, BigInt)> = vec![(Vec::with_capacity(n), BigInt::from(1))];
        for i in 0..n {
            let a = self.alpha.get(i);
            let b = self.beta.get(i);
            let mut next = Vec::with_capacity(partial.len() * (b as usize + 1));
            for (e, c) in &partial {
                for j in 0..=b {
                    let mut coeff = c * BigInt::from(binomial(b as u64, j as u64));
                    if j % 2 == 1 {
                        coeff = -coeff;
                    }
                    let mut e2 = e.clone();
                    e2.push(a + j);
                    next.push((e2, coeff));
                }
            }
            partial = next;
        }
        let mut p = Polynomial::zero(n);
        for (e, c) in partial {
            if !c.is_zero() {
                p.add_term(ExponentVec::new(e), Rational::from_integer(c));
            }
        }
        p
    }

    /// Finds the Krivine term whose expansion equals `p`, if any.
    ///
    /// For each variable the lowest exponent present must be `α_i` and the
    /// spread up to the highest must be `β_i`; the candidate is then expanded
    /// and compared exactly.
    pub fn recognize(p: &Polynomial) -> Option<KrivineTerm> {
        if p.is_zero() {
            return None;
        }
        let n = p.nvars();
        let mut alpha = vec![u32::MAX; n];
        let mut top = vec![0u32; n];
        for (e, _) in p.terms() {
            for i in 0..n {
                alpha[i] = alpha[i].min(e.get(i));
                top[i] = top[i].max(e.get(i));
            }
        }
        let beta: Vec<u32> = top.iter().zip(&alpha).map(|(t, a)| t - a).collect();
        let term = KrivineTerm::new(alpha, beta);
        (term.expand() == *p).then_some(term)
    }

    /// TeX-style product, e.g. `x_1*(1-x_2)^2`; the empty product is `1`.
    pub fn render_tex(&self) -> String {
        let mut parts = Vec::new();
        for i in 0..self.nvars() {
            let v = i + 1;
            match self.alpha.get(i) {
                0 => {}
                1 => parts.push(format!("x_{v}")),
                k => parts.push(format!("x_{v}^{k}")),
            }
            match self.beta.get(i) {
                0 => {}
                1 => parts.push(format!("(1-x_{v})")),
                k => parts.push(format!("(1-x_{v})^{k}")),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl fmt::Display for KrivineTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for i in 0..self.nvars() {
            let v = i + 1;
            match self.alpha.get(i) {
                0 => {}
                1 => parts.push(format!("x{v}")),
                k => parts.push(format!("x{v}^{k}")),
            }
            match self.beta.get(i) {
                0 => {}
                1 => parts.push(format!("(1-x{v})")),
                k => parts.push(format!("(1-x{v})^{k}")),
            }
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}
