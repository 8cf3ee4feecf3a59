//! Exact non-negativity certificates: extraction from an LP optimum,
//! independent verification, proof text and the certificate file format.

mod file;
mod render;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::environment::{MemoryElement, Origin};
use crate::lp::{solve_restricted_exact, ExactError, LpSolution, LpStatus, SUPPORT_TOL};
use crate::poly::{ExponentVec, Generator, KrivineTerm, Polynomial, Rational};
use crate::problem::Problem;

pub use file::{CertFileError, CERT_FORMAT_VERSION};
pub use render::{parse_proof, render_proof, ProofParseError};

/// Why a term is non-negative, or why it vanishes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Derivation {
    /// `x^α (1−x)^β`, non-negative on the unit cube.
    Krivine(KrivineTerm),
    /// `x^multiplier · axiom`, zero on the feasible set; any sign allowed.
    Axiom { axiom: usize, multiplier: ExponentVec },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertTerm {
    pub lambda: Rational,
    pub element: Polynomial,
    pub derivation: Derivation,
    /// Proof step that produced this term, when it came from one.
    pub step: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepParent {
    Initial(KrivineTerm),
    Step(usize),
}

/// One search step: a memory element multiplied by a generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofStep {
    /// One-based.
    pub index: usize,
    pub term: KrivineTerm,
    pub poly: Polynomial,
    pub parent: Option<StepParent>,
    pub generator: Option<Generator>,
}

/// `f = γ + Σ λ_i · element_i`, exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub problem: String,
    pub digest: String,
    pub nvars: usize,
    pub gamma: Rational,
    pub terms: Vec<CertTerm>,
    pub trace: Vec<ProofStep>,
}

impl Certificate {
    /// A certificate from Krivine terms alone.
    pub fn from_terms(nvars: usize, gamma: Rational, terms: &[(Rational, KrivineTerm)]) -> Self {
        Self {
            problem: String::new(),
            digest: String::new(),
            nvars,
            gamma,
            terms: terms
                .iter()
                .map(|(l, t)| CertTerm {
                    lambda: l.clone(),
                    element: t.expand(),
                    derivation: Derivation::Krivine(t.clone()),
                    step: None,
                })
                .collect(),
            trace: Vec::new(),
        }
    }

    pub fn for_problem(mut self, problem: &Problem) -> Self {
        self.problem = problem.name.clone();
        self.digest = problem.digest();
        self
    }

    /// Number of Krivine terms.
    pub fn krivine_len(&self) -> usize {
        self.terms.iter().filter(|t| matches!(t.derivation, Derivation::Krivine(_))).count()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtractError {
    #[error("LP status is {0:?}")]
    NotOptimal(LpStatus),
    #[error("LP bound {0} is below the success tolerance")]
    BoundTooLow(f64),
    #[error("exact re-solve failed: {0}")]
    Exact(#[from] ExactError),
    #[error("exact bound {0} is negative")]
    NegativeGamma(String),
}

/// Recovers an exact certificate from a float LP optimum over `memory` by
/// re-solving the equality system on the optimum's support in rationals.
pub fn extract(
    problem: &Problem,
    memory: &[MemoryElement],
    solution: &LpSolution,
    success_tol: f64,
) -> Result<Certificate, ExtractError> {
    if solution.status != LpStatus::Optimal {
        return Err(ExtractError::NotOptimal(solution.status));
    }
    if solution.gamma < -success_tol {
        return Err(ExtractError::BoundTooLow(solution.gamma));
    }
    let f = &problem.target;
    let mut attempts: Vec<Vec<usize>> = vec![solution.support(SUPPORT_TOL)];
    let basis: Vec<usize> = solution.basis.iter().copied().filter(|&j| j < memory.len()).collect();
    attempts.push(basis);
    attempts.push(solution.support(0.0));
    attempts.dedup();

    let mut last = ExtractError::Exact(ExactError::Inconsistent);
    for support in attempts {
        let polys: Vec<Polynomial> = support.iter().map(|&j| memory[j].poly.clone()).collect();
        match solve_restricted_exact(f, &polys) {
            Ok(sol) if sol.gamma.is_negative() => last = ExtractError::NegativeGamma(sol.gamma.to_string()),
            Ok(sol) => return Ok(assemble(problem, memory, &support, sol.gamma, &sol.lambda)),
            Err(e) => last = e.into(),
        }
    }
    Err(last)
}

fn assemble(problem: &Problem, memory: &[MemoryElement], support: &[usize], gamma: Rational, lambda: &[Rational]) -> Certificate {
    let n = problem.nvars();
    let mut step_of = HashMap::new();
    let mut trace = Vec::new();
    for (idx, m) in memory.iter().enumerate() {
        if let Origin::Product { parent, generator } = m.origin {
            let parent = match step_of.get(&parent) {
                Some(&k) => StepParent::Step(k),
                None => StepParent::Initial(memory[parent].term.clone()),
            };
            let index = trace.len() + 1;
            step_of.insert(idx, index);
            trace.push(ProofStep {
                index,
                term: m.term.clone(),
                poly: m.poly.clone(),
                parent: Some(parent),
                generator: Some(generator),
            });
        }
    }

    let mut terms = Vec::new();
    let mut axiom_acc: BTreeMap<(usize, ExponentVec), Rational> = BTreeMap::new();
    for (&j, l) in support.iter().zip(lambda) {
        if l.is_zero() {
            continue;
        }
        let m = &memory[j];
        let element = m.term.expand();
        if let Some(ideal) = &problem.ideal {
            for w in ideal.witness(&element) {
                *axiom_acc.entry((w.axiom, w.multiplier)).or_insert_with(Rational::zero) -= l * &w.coeff;
            }
        }
        terms.push(CertTerm {
            lambda: l.clone(),
            element,
            derivation: Derivation::Krivine(m.term.clone()),
            step: step_of.get(&j).copied(),
        });
    }
    if let Some(ideal) = &problem.ideal {
        for ((axiom, multiplier), coeff) in axiom_acc {
            if coeff.is_zero() {
                continue;
            }
            let element = &Polynomial::monomial(multiplier.clone(), Rational::one()) * &ideal.axiom(axiom);
            terms.push(CertTerm { lambda: coeff, element, derivation: Derivation::Axiom { axiom, multiplier }, step: None });
        }
    }
    Certificate {
        problem: problem.name.clone(),
        digest: problem.digest(),
        nvars: n,
        gamma,
        terms,
        trace,
    }
}

/// The clause of the verification contract that failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clause {
    /// Dimensions or indices do not fit the problem.
    Shape,
    /// `γ < 0` or a Krivine multiplier is negative.
    Sign,
    /// A stored element differs from the re-expansion of its derivation.
    Derivation,
    /// `γ + Σ λ_i e_i ≠ f`.
    Identity,
    /// A proof step does not follow from its parent.
    Trace,
    /// The certificate names a different problem.
    Digest,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct Rejection {
    pub clause: Clause,
    /// Offending term or step, zero-based.
    pub index: Option<usize>,
    pub detail: String,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} check failed", self.clause)?;
        if let Some(i) = self.index {
            write!(f, " at {i}")?;
        }
        write!(f, ": {}", self.detail)
    }
}

fn reject(clause: Clause, index: Option<usize>, detail: impl Into<String>) -> Rejection {
    Rejection { clause, index, detail: detail.into() }
}

fn naive_expand(t: &KrivineTerm, n: usize) -> Polynomial {
    let mut p = Polynomial::one(n);
    for i in 0..n {
        for _ in 0..t.alpha.get(i) {
            p = &p * &Polynomial::var(n, i);
        }
        for _ in 0..t.beta.get(i) {
            p = &p * &Polynomial::one_minus_var(n, i);
        }
    }
    p
}

/// Checks `cert` against `f` and the equality axioms, re-deriving every
/// element with naive multiplication.
pub fn verify(cert: &Certificate, f: &Polynomial, axioms: &[Polynomial]) -> Result<(), Rejection> {
    let n = f.nvars();
    if cert.nvars != n {
        return Err(reject(Clause::Shape, None, format!("certificate has {} variables, target has {n}", cert.nvars)));
    }
    for (i, t) in cert.terms.iter().enumerate() {
        let ok = t.element.nvars() == n
            && match &t.derivation {
                Derivation::Krivine(k) => k.alpha.nvars() == n && k.beta.nvars() == n,
                Derivation::Axiom { axiom, multiplier } => *axiom < axioms.len() && multiplier.nvars() == n,
            };
        if !ok {
            return Err(reject(Clause::Shape, Some(i), "term does not fit the problem"));
        }
    }

    if cert.gamma.is_negative() {
        return Err(reject(Clause::Sign, None, format!("gamma = {}", cert.gamma)));
    }
    for (i, t) in cert.terms.iter().enumerate() {
        if matches!(t.derivation, Derivation::Krivine(_)) && t.lambda.is_negative() {
            return Err(reject(Clause::Sign, Some(i), format!("lambda = {}", t.lambda)));
        }
    }

    for (i, t) in cert.terms.iter().enumerate() {
        let expected = match &t.derivation {
            Derivation::Krivine(k) => naive_expand(k, n),
            Derivation::Axiom { axiom, multiplier } => {
                &Polynomial::monomial(multiplier.clone(), Rational::one()) * &axioms[*axiom]
            }
        };
        if expected != t.element {
            return Err(reject(Clause::Derivation, Some(i), format!("expected {expected}, found {}", t.element)));
        }
    }

    let mut sum = Polynomial::constant(n, cert.gamma.clone());
    for t in &cert.terms {
        sum = &sum + &t.element.scale(&t.lambda);
    }
    let diff = &sum - f;
    if !diff.is_zero() {
        return Err(reject(Clause::Identity, None, format!("representation minus target = {diff}")));
    }

    for (k, s) in cert.trace.iter().enumerate() {
        if s.index != k + 1 || s.term.alpha.nvars() != n || s.term.beta.nvars() != n {
            return Err(reject(Clause::Trace, Some(k), "malformed step"));
        }
        if let (Some(parent), Some(g)) = (&s.parent, s.generator) {
            let base = match parent {
                StepParent::Initial(t) => t.clone(),
                StepParent::Step(j) if *j >= 1 && *j <= k => cert.trace[j - 1].term.clone(),
                StepParent::Step(j) => return Err(reject(Clause::Trace, Some(k), format!("dangling parent step {j}"))),
            };
            if g.var() >= n || base.times(g) != s.term {
                return Err(reject(Clause::Trace, Some(k), format!("{} is not {base} times {g}", s.term)));
            }
        }
        if axioms.is_empty() && naive_expand(&s.term, n) != s.poly {
            return Err(reject(Clause::Trace, Some(k), "step polynomial differs from its term"));
        }
    }
    for (i, t) in cert.terms.iter().enumerate() {
        if let (Some(k), Derivation::Krivine(term)) = (t.step, &t.derivation) {
            if k == 0 || k > cert.trace.len() || cert.trace[k - 1].term != *term {
                return Err(reject(Clause::Trace, Some(i), format!("term does not match step {k}")));
            }
        }
    }
    Ok(())
}

/// [`verify`] against a problem, also checking the recorded digest.
pub fn verify_for(cert: &Certificate, problem: &Problem) -> Result<(), Rejection> {
    if !cert.digest.is_empty() && cert.digest != problem.digest() {
        return Err(reject(Clause::Digest, None, format!("certificate is for {:?}", cert.problem)));
    }
    verify(cert, &problem.target, &problem.axioms())
}
