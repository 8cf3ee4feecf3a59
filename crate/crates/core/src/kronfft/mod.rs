//! Multivariate multiplication by Kronecker substitution and FFT.
//!
//! A monomial `x^α` is packed to `z^ν` with `ν = Σ α_k D^{k-1}`, the two
//! univariate images are convolved with a radix-2 FFT, and the product is
//! unpacked digit by digit in base `D`.

mod fft;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::poly::{lcm_of_denominators, ExponentVec, Polynomial, Rational};

pub use fft::{fft_convolve, naive_convolve, PRECISION_LIMIT, RESIDUAL_LIMIT};

/// Packed products spanning more than this many coefficients are
/// multiplied naively instead.
pub const MAX_DENSE_SPAN: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KronError {
    #[error("exponent {exponent} of x{var} does not fit radix {radix}")]
    ExponentTooLarge { var: usize, exponent: u32, radix: u64 },
    #[error("degree {degree} is outside the packed range of radix {radix} in {nvars} variables")]
    DegreeOutOfRange { degree: u64, radix: u64, nvars: usize },
    #[error("coefficient is not an integer")]
    NonInteger,
    #[error("packed degree span overflows")]
    SpanOverflow,
    #[error("FFT precision guard: N*max|a|*max|b| = {bound:e} exceeds 2^52")]
    PrecisionGuard { bound: f64 },
    #[error("FFT output {index} is {residual} away from an integer")]
    Residual { index: usize, residual: f64 },
}

/// Sparse univariate polynomial with integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UnivariatePoly {
    coeffs: BTreeMap<u64, BigInt>,
}

impl UnivariatePoly {
    pub fn from_pairs<I: IntoIterator<Item = (u64, i64)>>(pairs: I) -> Self {
        let mut p = Self::default();
        for (d, c) in pairs {
            p.add(d, BigInt::from(c));
        }
        p
    }

    fn add(&mut self, degree: u64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(degree).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&degree);
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<u64, BigInt> {
        &self.coeffs
    }

    pub fn max_degree(&self) -> Option<u64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Dense coefficient array `[c_0, …, c_max]` when every coefficient fits `i64`.
    pub fn to_dense(&self) -> Option<Vec<i64>> {
        let len = self.max_degree().map_or(0, |d| d as usize + 1);
        let mut out = vec![0i64; len];
        for (&d, c) in &self.coeffs {
            out[d as usize] = c.to_i64()?;
        }
        Some(out)
    }

    pub fn from_dense(dense: &[i64]) -> Self {
        Self::from_pairs(dense.iter().enumerate().map(|(d, &c)| (d as u64, c)))
    }

    fn mul_naive(&self, other: &UnivariatePoly) -> UnivariatePoly {
        let mut out = UnivariatePoly::default();
        for (da, ca) in &self.coeffs {
            for (db, cb) in &other.coeffs {
                out.add(da + db, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for UnivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (i, (d, c)) in self.coeffs.iter().enumerate() {
            let neg = c < &BigInt::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let one = mag == BigInt::from(1);
            match d {
                0 => write!(f, "{mag}")?,
                1 if one => f.write_str("z")?,
                1 => write!(f, "{mag}z")?,
                _ if one => write!(f, "z^{d}")?,
                _ => write!(f, "{mag}z^{d}")?,
            }
        }
        Ok(())
    }
}

/// Packing radix `D` and variable count for Kronecker substitution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KroneckerContext {
    pub radix: u64,
    pub nvars: usize,
}

impl KroneckerContext {
    /// A context with an explicit radix, e.g. to reproduce a worked example.
    pub fn with_radix(radix: u64, nvars: usize) -> Self {
        assert!(radix >= 1, "radix must be positive");
        Self { radix, nvars }
    }

    /// `D^n`, the exclusive upper bound on packed degrees, if it fits in `u64`.
    pub fn packed_limit(&self) -> Option<u64> {
        let mut acc: u64 = 1;
        for _ in 0..self.nvars {
            acc = acc.checked_mul(self.radix)?;
        }
        Some(acc)
    }

    /// True when every per-variable degree of `p·q` is below the radix.
    pub fn admits(&self, p: &Polynomial, q: &Polynomial) -> bool {
        (0..self.nvars).all(|k| ((p.degree_in(k) + q.degree_in(k)) as u64) < self.radix)
    }
}

/// `D = 1 + max_k (deg_k p + deg_k q)`, the smallest radix for which the
/// product packs and unpacks without carries between digits.
pub fn choose_degree_bound(p: &Polynomial, q: &Polynomial) -> KroneckerContext {
    let n = p.nvars();
    let top = (0..n).map(|k| p.degree_in(k) + q.degree_in(k)).max().unwrap_or(0);
    KroneckerContext { radix: 1 + top as u64, nvars: n }
}

/// Packs `x^α ↦ z^{Σ α_k D^{k-1}}`. Coefficients must be integers.
pub fn to_univariate(p: &Polynomial, ctx: &KroneckerContext) -> Result<UnivariatePoly, KronError> {
    let mut out = UnivariatePoly::default();
    for (e, c) in p.terms() {
        if !c.is_integer() {
            return Err(KronError::NonInteger);
        }
        out.add(pack(e, ctx)?, c.numer().clone());
    }
    Ok(out)
}

fn pack(e: &ExponentVec, ctx: &KroneckerContext) -> Result<u64, KronError> {
    let mut nu: u64 = 0;
    let mut place: u64 = 1;
    for (var, &a) in e.as_slice().iter().enumerate() {
        if a as u64 >= ctx.radix {
            return Err(KronError::ExponentTooLarge { var: var + 1, exponent: a, radix: ctx.radix });
        }
        nu = (a as u64)
            .checked_mul(place)
            .and_then(|t| nu.checked_add(t))
            .ok_or(KronError::SpanOverflow)?;
        if var + 1 < e.nvars() {
            place = place.checked_mul(ctx.radix).ok_or(KronError::SpanOverflow)?;
        }
    }
    Ok(nu)
}

/// Unpacks `z^d` by repeated division by `D`: the k-th remainder is the
/// exponent of `x_k`.
pub fn from_univariate(g: &UnivariatePoly, ctx: &KroneckerContext) -> Result<Polynomial, KronError> {
    let mut out = Polynomial::zero(ctx.nvars);
    let limit = ctx.packed_limit();
    for (&d, c) in g.coeffs() {
        if limit.is_some_and(|l| d >= l) {
            return Err(KronError::DegreeOutOfRange { degree: d, radix: ctx.radix, nvars: ctx.nvars });
        }
        let mut rest = d;
        let mut exps = Vec::with_capacity(ctx.nvars);
        for _ in 0..ctx.nvars {
            exps.push((rest % ctx.radix) as u32);
            rest /= ctx.radix;
        }
        out.add_term(ExponentVec::new(exps), Rational::from_integer(c.clone()));
    }
    Ok(out)
}

/// Intermediate values of one Kronecker multiplication.
#[derive(Clone, Debug)]
pub struct KroneckerTrace {
    pub ctx: KroneckerContext,
    pub p_tilde: UnivariatePoly,
    pub q_tilde: UnivariatePoly,
    pub g: UnivariatePoly,
    pub product: Polynomial,
    /// False when the FFT path was abandoned for schoolbook convolution.
    pub used_fft: bool,
}

/// Exact product via Kronecker substitution with an explicit context.
///
/// Rational inputs are scaled by the least common multiple of their
/// denominators and the product divided back afterwards.
pub fn fast_mul_traced(
    p: &Polynomial,
    q: &Polynomial,
    ctx: KroneckerContext,
) -> Result<KroneckerTrace, KronError> {
    if !ctx.admits(p, q) {
        let var = (0..ctx.nvars)
            .find(|&k| (p.degree_in(k) + q.degree_in(k)) as u64 >= ctx.radix)
            .unwrap_or(0);
        return Err(KronError::ExponentTooLarge {
            var: var + 1,
            exponent: p.degree_in(var) + q.degree_in(var),
            radix: ctx.radix,
        });
    }
    let lp = lcm_of_denominators(p.terms().map(|(_, c)| c));
    let lq = lcm_of_denominators(q.terms().map(|(_, c)| c));
    let sp = p.scale(&Rational::from_integer(lp.clone()));
    let sq = q.scale(&Rational::from_integer(lq.clone()));
    let p_tilde = to_univariate(&sp, &ctx)?;
    let q_tilde = to_univariate(&sq, &ctx)?;

    let span = p_tilde.max_degree().unwrap_or(0) + q_tilde.max_degree().unwrap_or(0) + 1;
    let dense = if span <= MAX_DENSE_SPAN { p_tilde.to_dense().zip(q_tilde.to_dense()) } else { None };
    let (g, used_fft) = match dense.map(|(u, v)| fft_convolve(&u, &v)) {
        Some(Ok(conv)) => (UnivariatePoly::from_dense(&conv), true),
        _ => (p_tilde.mul_naive(&q_tilde), false),
    };
    let unscale = Rational::new(BigInt::from(1), lp * lq);
    let product = from_univariate(&g, &ctx)?.scale(&unscale);
    Ok(KroneckerTrace { ctx, p_tilde, q_tilde, g, product, used_fft })
}

/// Exact product of `p` and `q`, equal to [`Polynomial::mul_naive`].
///
/// Uses the smallest safe radix; falls back to naive multiplication when
/// packing would overflow or the FFT precision guard fires.
pub fn fast_mul(p: &Polynomial, q: &Polynomial) -> Polynomial {
    assert_eq!(p.nvars(), q.nvars(), "fast_mul with mismatched nvars");
    if p.is_zero() || q.is_zero() {
        return Polynomial::zero(p.nvars());
    }
    let ctx = choose_degree_bound(p, q);
    match fast_mul_traced(p, q, ctx) {
        Ok(trace) => trace.product,
        Err(_) => p.mul_naive(q).expect("same nvars"),
    }
}

/// Which multiplication routine to use for products inside the search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MulStrategy {
    /// FFT when the estimated transform cost beats the schoolbook term count.
    #[default]
    Auto,
    Fft,
    Naive,
}

/// Multiplies with the chosen strategy. `Auto` compares `|p|·|q|` term
/// products against `N log2 N` for the padded FFT length `N`.
pub fn mul_with(p: &Polynomial, q: &Polynomial, strategy: MulStrategy) -> Polynomial {
    match strategy {
        MulStrategy::Naive => p.mul_naive(q).expect("same nvars"),
        MulStrategy::Fft => fast_mul(p, q),
        MulStrategy::Auto => {
            if p.is_zero() || q.is_zero() {
                return Polynomial::zero(p.nvars());
            }
            let ctx = choose_degree_bound(p, q);
            let naive_cost = (p.len() * q.len()) as f64;
            let fft_cost = ctx.packed_limit().map_or(f64::INFINITY, |l| {
                let n = l.next_power_of_two() as f64;
                3.0 * n * n.log2().max(1.0)
            });
            if fft_cost < naive_cost {
                fast_mul(p, q)
            } else {
                p.mul_naive(q).expect("same nvars")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> (Polynomial, Polynomial) {
        (
            Polynomial::from_i64(2, &[(1, &[1, 0]), (3, &[1, 1])]),
            Polynomial::from_i64(2, &[(2, &[0, 1]), (-5, &[2, 0])]),
        )
    }

    #[test]
    fn per_variable_radix() {
        let (p, q) = example();
        assert_eq!(choose_degree_bound(&p, &q).radix, 4);
        let x = Polynomial::var(1, 0);
        assert_eq!(choose_degree_bound(&x, &x).radix, 3);
        let one = Polynomial::one(1);
        assert_eq!(choose_degree_bound(&one, &one).radix, 1);
        assert_eq!(fast_mul(&one, &one), one);
    }

    #[test]
    fn too_small_radix_is_refused() {
        let x = Polynomial::var(1, 0);
        assert!(fast_mul_traced(&x, &x, KroneckerContext::with_radix(2, 1)).is_err());
    }

    #[test]
    fn rational_coefficients() {
        let p = Polynomial::from_terms(1, [(ExponentVec::new(vec![1]), crate::poly::rational(1, 3))]).unwrap();
        let q = Polynomial::from_terms(1, [(ExponentVec::new(vec![0]), crate::poly::rational(3, 4))]).unwrap();
        assert_eq!(fast_mul(&p, &q), p.mul_naive(&q).unwrap());
    }

    #[test]
    fn univariate_display() {
        let (p, _) = example();
        let t = to_univariate(&p, &KroneckerContext::with_radix(5, 2)).unwrap();
        assert_eq!(t.to_string(), "z + 3z^6");
    }
}
