//! Coefficient-matching linear programs `f − γ = Σ λ_i m_i` with `λ ≥ 0`.
//!
//! [`build_lp`] produces the exact instance with graded-lex rows and the
//! columns `[λ_1 … λ_m, γ]`. Solvers work on the floating-point view
//! [`NumericLp`], which the search environment also maintains incrementally.

mod exact;
mod simplex;

use std::collections::HashMap;
use std::fmt::Write as _;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{format_rational, monomial_basis, to_f64, ExponentVec, Polynomial, Rational};

pub use exact::{solve_restricted_exact, ExactError, ExactSolution};
pub use simplex::{PivotRule, SimplexSolver};

/// Primal feasibility tolerance, relative to `max(1, ‖c‖∞)`.
pub const FEAS_TOL: f64 = 1e-9;
/// Multipliers at or below this value are treated as zero when choosing a support.
pub const SUPPORT_TOL: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("the memory is empty")]
    EmptyMemory,
    #[error("variable count mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

/// Exact linear program `A·[λ, γ]ᵀ = c`.
#[derive(Clone, Debug)]
pub struct LpInstance {
    nvars: usize,
    rows: Vec<ExponentVec>,
    columns: Vec<Polynomial>,
    target: Polynomial,
}

/// Builds the instance for `f` over the given memory polynomials. Rows are
/// every monomial of degree at most `max(deg f, max deg m_i)` in graded-lex
/// order.
pub fn build_lp(f: &Polynomial, memory: &[Polynomial]) -> Result<LpInstance, LpError> {
    if memory.is_empty() {
        return Err(LpError::EmptyMemory);
    }
    for m in memory {
        if m.nvars() != f.nvars() {
            return Err(LpError::DimensionMismatch(f.nvars(), m.nvars()));
        }
    }
    let d = memory.iter().map(Polynomial::degree).chain([f.degree()]).max().unwrap_or(0);
    Ok(LpInstance {
        nvars: f.nvars(),
        rows: monomial_basis(f.nvars(), d),
        columns: memory.to_vec(),
        target: f.clone(),
    })
}

impl LpInstance {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rows(&self) -> &[ExponentVec] {
        &self.rows
    }

    pub fn columns(&self) -> &[Polynomial] {
        &self.columns
    }

    pub fn target(&self) -> &Polynomial {
        &self.target
    }

    /// Index of the `γ` column in [`LpInstance::matrix`].
    pub fn gamma_column(&self) -> usize {
        self.columns.len()
    }

    /// Dense `A` with columns `[λ_1 … λ_m, γ]`.
    pub fn matrix(&self) -> Vec<Vec<Rational>> {
        self.rows
            .iter()
            .map(|r| {
                let mut row: Vec<Rational> = self.columns.iter().map(|m| m.coeff(r)).collect();
                row.push(if r.is_constant() { Rational::one() } else { Rational::zero() });
                row
            })
            .collect()
    }

    /// Right-hand side: the coefficients of `f` in row order.
    pub fn rhs(&self) -> Vec<Rational> {
        self.rows.iter().map(|r| self.target.coeff(r)).collect()
    }

    pub fn numeric(&self) -> NumericLp {
        let mut lp = NumericLp::new(self.nvars);
        for r in &self.rows {
            lp.row_for(r);
        }
        lp.set_target(&self.target);
        for m in &self.columns {
            lp.push_column(m);
        }
        lp
    }

    /// Plain-text dump of `[A | c]`, one row per line, tab separated.
    pub fn dump(&self, exact: bool) -> String {
        let mut out = String::new();
        let a = self.matrix();
        for (row, c) in a.iter().zip(self.rhs()) {
            let cells: Vec<String> = row
                .iter()
                .chain(std::iter::once(&c))
                .map(|v| if exact { format_rational(v) } else { format!("{:.17e}", to_f64(v)) })
                .collect();
            let _ = writeln!(out, "{}", cells.join("\t"));
        }
        out
    }
}

/// Floating-point LP `Σ_j a_rj λ_j + [r = const]·γ = b_r`, `λ ≥ 0`,
/// maximize `γ`. Columns are sparse; rows are identified by monomial.
#[derive(Clone, Debug)]
pub struct NumericLp {
    nvars: usize,
    row_of: HashMap<ExponentVec, usize>,
    rhs: Vec<f64>,
    cols: Vec<Vec<(usize, f64)>>,
}

impl NumericLp {
    pub fn new(nvars: usize) -> Self {
        let mut lp = Self { nvars, row_of: HashMap::new(), rhs: Vec::new(), cols: Vec::new() };
        lp.row_for(&ExponentVec::zero(nvars));
        lp
    }

    /// The row holding monomial `e`, created on first use. Row 0 is the constant.
    pub fn row_for(&mut self, e: &ExponentVec) -> usize {
        if let Some(&r) = self.row_of.get(e) {
            return r;
        }
        let r = self.rhs.len();
        self.row_of.insert(e.clone(), r);
        self.rhs.push(0.0);
        r
    }

    pub fn set_target(&mut self, f: &Polynomial) {
        assert_eq!(f.nvars(), self.nvars);
        self.rhs.iter_mut().for_each(|b| *b = 0.0);
        for (e, c) in f.terms() {
            let r = self.row_for(e);
            self.rhs[r] = to_f64(c);
        }
    }

    pub fn push_column(&mut self, m: &Polynomial) -> usize {
        let mut col: Vec<(usize, f64)> = Vec::with_capacity(m.len());
        for (e, c) in m.terms() {
            col.push((self.row_for(e), to_f64(c)));
        }
        col.sort_by_key(|&(r, _)| r);
        self.cols.push(col);
        self.cols.len() - 1
    }

    pub fn nrows(&self) -> usize {
        self.rhs.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn column(&self, j: usize) -> &[(usize, f64)] {
        &self.cols[j]
    }

    /// Coefficient of `λ_j` in the objective after eliminating `γ` through
    /// the constant row.
    pub fn cost(&self, j: usize) -> f64 {
        self.cols[j].iter().find(|&&(r, _)| r == 0).map_or(0.0, |&(_, v)| v)
    }

    /// `max_r |(A λ + γ e_0 − b)_r|`.
    pub fn residual(&self, lambda: &[f64], gamma: f64) -> f64 {
        let mut acc = vec![0.0; self.nrows()];
        acc[0] = gamma;
        for (col, &l) in self.cols.iter().zip(lambda) {
            if l != 0.0 {
                for &(r, v) in col {
                    acc[r] += v * l;
                }
            }
        }
        acc.iter().zip(&self.rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn scale(&self) -> f64 {
        self.rhs.iter().fold(1.0f64, |m, b| m.max(b.abs()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    NumericFailure,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub gamma: f64,
    pub lambda: Vec<f64>,
    /// Columns basic at the optimum, in ascending order.
    pub basis: Vec<usize>,
    pub iterations: usize,
}

impl LpSolution {
    pub fn failed(status: LpStatus, ncols: usize, iterations: usize) -> Self {
        Self { status, gamma: f64::NEG_INFINITY, lambda: vec![0.0; ncols], basis: Vec::new(), iterations }
    }

    /// Columns whose multiplier exceeds `tol`.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        self.lambda.iter().enumerate().filter(|(_, &l)| l > tol).map(|(j, _)| j).collect()
    }
}

/// A linear-programming backend.
pub trait LpSolver: Send + Sync {
    fn solve(&self, lp: &NumericLp) -> LpSolution;
}

/// Solves an exact instance with the built-in simplex.
pub fn solve_lp(inst: &LpInstance) -> LpSolution {
    SimplexSolver::default().solve(&inst.numeric())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_target_needs_no_multipliers() {
        let f = Polynomial::constant(1, Rational::from_integer(3.into()));
        let mem = [Polynomial::var(1, 0), Polynomial::one_minus_var(1, 0)];
        let sol = solve_lp(&build_lp(&f, &mem).unwrap());
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.gamma - 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_memory_is_an_error() {
        assert_eq!(build_lp(&Polynomial::one(1), &[]).unwrap_err(), LpError::EmptyMemory);
    }

    #[test]
    fn zero_target_layout() {
        let inst = build_lp(&Polynomial::zero(1), &[Polynomial::var(1, 0)]).unwrap();
        let one = Rational::one();
        let zero = Rational::zero();
        assert_eq!(inst.matrix(), vec![vec![zero.clone(), one.clone()], vec![one, zero.clone()]]);
        assert!(inst.rhs().iter().all(Zero::is_zero));
    }
}
