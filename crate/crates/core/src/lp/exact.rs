//! Exact rational re-solve of the equality system on a chosen support.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::poly::{ExponentVec, Polynomial, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("the restricted system has no solution")]
    Inconsistent,
    #[error("multiplier {index} is negative")]
    NegativeMultiplier { index: usize },
    #[error("variable count mismatch")]
    DimensionMismatch,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactSolution {
    pub gamma: Rational,
    pub lambda: Vec<Rational>,
}

/// Solves `Σ λ_i s_i + γ = f` exactly over the rationals by Gauss–Jordan
/// elimination. Free unknowns are set to zero. Fails if the system is
/// inconsistent or a multiplier comes out negative; the sign of `γ` is
/// left to the caller.
pub fn solve_restricted_exact(f: &Polynomial, support: &[Polynomial]) -> Result<ExactSolution, ExactError> {
    if support.iter().any(|s| s.nvars() != f.nvars()) {
        return Err(ExactError::DimensionMismatch);
    }
    let k = support.len();
    let monomials: BTreeSet<ExponentVec> = support
        .iter()
        .chain(std::iter::once(f))
        .flat_map(|p| p.terms().map(|(e, _)| e.clone()))
        .chain(std::iter::once(ExponentVec::zero(f.nvars())))
        .collect();

    // Augmented matrix [S | e_const | f].
    let width = k + 2;
    let mut m: Vec<Vec<Rational>> = monomials
        .iter()
        .map(|e| {
            let mut row: Vec<Rational> = support.iter().map(|s| s.coeff(e)).collect();
            row.push(if e.is_constant() { Rational::from_integer(1.into()) } else { Rational::zero() });
            row.push(f.coeff(e));
            row
        })
        .collect();

    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..width - 1 {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let factor = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    if !y.is_zero() {
                        *x -= &factor * y;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[width - 1].is_zero()) {
        return Err(ExactError::Inconsistent);
    }

    let mut x = vec![Rational::zero(); k + 1];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][width - 1].clone();
    }
    let gamma = x.pop().expect("gamma slot");
    if let Some(index) = x.iter().position(Signed::is_negative) {
        return Err(ExactError::NegativeMultiplier { index });
    }
    Ok(ExactSolution { gamma, lambda: x })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rational, KrivineTerm};

    #[test]
    fn single_variable() {
        let f = Polynomial::var(1, 0);
        let s = solve_restricted_exact(&f, &[Polynomial::var(1, 0)]).unwrap();
        assert_eq!(s.lambda, vec![rational(1, 1)]);
        assert!(s.gamma.is_zero());
    }

    #[test]
    fn three_term_support() {
        // -2x1 + 8x2^2 - 8x2 + 14/3 = 2(1-x1) + 8/3 (1-x2)^3 + 8/3 x2^3
        let f = Polynomial::from_terms(
            2,
            [
                (ExponentVec::new(vec![1, 0]), rational(-2, 1)),
                (ExponentVec::new(vec![0, 2]), rational(8, 1)),
                (ExponentVec::new(vec![0, 1]), rational(-8, 1)),
                (ExponentVec::new(vec![0, 0]), rational(14, 3)),
            ],
        )
        .unwrap();
        let support = [
            KrivineTerm::new(vec![0, 0], vec![1, 0]).expand(),
            KrivineTerm::new(vec![0, 0], vec![0, 3]).expand(),
            KrivineTerm::new(vec![0, 3], vec![0, 0]).expand(),
        ];
        let s = solve_restricted_exact(&f, &support).unwrap();
        assert_eq!(s.lambda, vec![rational(2, 1), rational(8, 3), rational(8, 3)]);
        assert!(s.gamma.is_zero());
    }

    #[test]
    fn inconsistent_and_negative() {
        let f = Polynomial::from_i64(1, &[(1, &[2])]);
        assert_eq!(solve_restricted_exact(&f, &[Polynomial::var(1, 0)]), Err(ExactError::Inconsistent));
        let g = Polynomial::from_i64(1, &[(-1, &[1])]);
        assert_eq!(
            solve_restricted_exact(&g, &[Polynomial::var(1, 0)]),
            Err(ExactError::NegativeMultiplier { index: 0 })
        );
    }
}
