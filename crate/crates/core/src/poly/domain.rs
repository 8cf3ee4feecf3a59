use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{check_dims, format_rational, ExponentVec, PolyError, Polynomial, Rational};

/// Axis-aligned box `[a_1,b_1] × ⋯ × [a_n,b_n]` with rational bounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxDomain {
    lo: Vec<Rational>,
    hi: Vec<Rational>,
}

impl BoxDomain {
    pub fn new(lo: Vec<Rational>, hi: Vec<Rational>) -> Result<Self, PolyError> {
        check_dims(lo.len(), hi.len())?;
        for (var, (a, b)) in lo.iter().zip(&hi).enumerate() {
            if a >= b {
                return Err(PolyError::DegenerateBox {
                    var: var + 1,
                    lo: format_rational(a),
                    hi: format_rational(b),
                });
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn unit(nvars: usize) -> Self {
        Self { lo: vec![Rational::zero(); nvars], hi: vec![Rational::one(); nvars] }
    }

    pub fn nvars(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[Rational] {
        &self.lo
    }

    pub fn hi(&self) -> &[Rational] {
        &self.hi
    }

    /// Image of a unit-cube point `k` in the box: `a + (b - a) ∘ k`.
    pub fn map_point(&self, k: &[Rational]) -> Vec<Rational> {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(k)
            .map(|((a, b), t)| a + (b - a) * t)
            .collect()
    }

    /// Substitutes `x_i ← a_i + (b_i − a_i)·x_i`, giving a polynomial on the
    /// unit cube that takes the same values as `f` on the box.
    pub fn regularize(&self, f: &Polynomial) -> Result<Polynomial, PolyError> {
        let n = self.nvars();
        check_dims(n, f.nvars())?;
        // powers[i][k] = (a_i + w_i x_i)^k as a univariate coefficient list
        let powers: Vec<Vec<Vec<Rational>>> = (0..n)
            .map(|i| {
                let maxk = f.degree_in(i) as usize;
                let a = &self.lo[i];
                let w = &self.hi[i] - a;
                let mut out = vec![vec![Rational::one()]];
                for k in 1..=maxk {
                    let prev = &out[k - 1];
                    let mut next = vec![Rational::zero(); k + 1];
                    for (j, c) in prev.iter().enumerate() {
                        next[j] += c * a;
                        next[j + 1] += c * &w;
                    }
                    out.push(next);
                }
                out
            })
            .collect();

        let mut result = Polynomial::zero(n);
        for (exp, coeff) in f.terms() {
            let mut partial: Vec<(Vec<u32>, Rational)> = vec![(Vec::with_capacity(n), coeff.clone())];
            for (i, &k) in exp.as_slice().iter().enumerate() {
                let expansion = &powers[i][k as usize];
                let mut next = Vec::with_capacity(partial.len() * expansion.len());
                for (e, c) in &partial {
                    for (j, cj) in expansion.iter().enumerate() {
                        if cj.is_zero() {
                            continue;
                        }
                        let mut e2 = e.clone();
                        e2.push(j as u32);
                        next.push((e2, c * cj));
                    }
                }
                partial = next;
            }
            for (e, c) in partial {
                result.add_term(ExponentVec::new(e), c);
            }
        }
        Ok(result)
    }
}
