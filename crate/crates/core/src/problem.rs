//! Problem definitions, the problem file format, and the bundled benchmarks.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::poly::{format_rational, parse_rational, BoxDomain, ExponentVec, PolyError, Polynomial, Rational};
use crate::stableset::{parse_graph, EdgeIdeal, Graph, GraphError};

pub const PROBLEM_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid problem file: {0}")]
    Syntax(String),
    #[error("unsupported problem format version {0}")]
    Version(u32),
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Per-problem settings that take precedence over run defaults.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub episodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemma_degree_cap: Option<u32>,
}

/// An inequality `f ≥ 0` to prove, already mapped to the unit cube.
#[derive(Clone, Debug)]
pub struct Problem {
    pub name: String,
    pub variables: Vec<String>,
    pub domain: BoxDomain,
    /// `f` over the original box.
    pub original: Polynomial,
    /// `f` after regularization to `[0,1]^n`; this is what gets proved.
    pub target: Polynomial,
    /// A published unit-cube form to compare against, when known.
    pub reference: Option<Polynomial>,
    /// Equality constraints for stable-set problems.
    pub ideal: Option<EdgeIdeal>,
    pub overrides: Overrides,
}

impl Problem {
    pub fn from_box(name: &str, domain: BoxDomain, f: Polynomial) -> Result<Self, ProblemError> {
        let target = domain.regularize(&f)?;
        let n = f.nvars();
        Ok(Self {
            name: name.to_string(),
            variables: (1..=n).map(|i| format!("x{i}")).collect(),
            domain,
            original: f,
            target,
            reference: None,
            ideal: None,
            overrides: Overrides::default(),
        })
    }

    pub fn on_unit_cube(name: &str, f: Polynomial) -> Self {
        let n = f.nvars();
        Self::from_box(name, BoxDomain::unit(n), f).expect("unit box is valid")
    }

    /// `bound − Σ x_i ≥ 0` on the cube, modulo the graph's edge ideal.
    /// Intermediate lemmas are capped at degree 2 unless overridden.
    pub fn stable_set(name: &str, graph: &Graph, bound: Rational) -> Self {
        let n = graph.vertex_count();
        let mut f = Polynomial::constant(n, bound);
        for i in 0..n {
            f.add_term(ExponentVec::unit(n, i), -Rational::from_integer(1.into()));
        }
        let mut p = Self::on_unit_cube(name, f);
        p.ideal = Some(EdgeIdeal::new(graph));
        p.overrides.lemma_degree_cap = Some(2);
        p
    }

    pub fn nvars(&self) -> usize {
        self.target.nvars()
    }

    pub fn axioms(&self) -> Vec<Polynomial> {
        self.ideal.as_ref().map(EdgeIdeal::axioms).unwrap_or_default()
    }

    /// SHA-256 over the canonical JSON of the target and axioms.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(&(&self.target, self.axioms())).expect("polynomials serialize");
        Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn load(path: &Path) -> Result<Self, ProblemError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ProblemError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    /// Parses a problem file, applying `exact` coefficient overrides.
    pub fn parse(text: &str) -> Result<Self, ProblemError> {
        Self::parse_with(text, true)
    }

    pub fn parse_with(text: &str, use_exact: bool) -> Result<Self, ProblemError> {
        let file: ProblemFile = toml::from_str(text).map_err(|e| ProblemError::Syntax(e.to_string()))?;
        if file.format_version != PROBLEM_FORMAT_VERSION {
            return Err(ProblemError::Version(file.format_version));
        }
        let mut problem = match file.kind.as_str() {
            "box" => file.to_box(use_exact)?,
            "stableset" => file.to_stable_set()?,
            other => return Err(ProblemError::Invalid(format!("unknown kind {other:?}"))),
        };
        let default_cap = problem.overrides.lemma_degree_cap;
        problem.overrides = file.overrides;
        problem.overrides.lemma_degree_cap = problem.overrides.lemma_degree_cap.or(default_cap);
        Ok(problem)
    }

    /// Problem file text for a box problem.
    pub fn to_toml(&self) -> String {
        let entries = |p: &Polynomial| -> Vec<TermEntry> {
            p.terms()
                .rev()
                .map(|(e, c)| TermEntry { coeff: format_rational(c), exact: None, exponents: e.as_slice().to_vec() })
                .collect()
        };
        let file = ProblemFile {
            format_version: PROBLEM_FORMAT_VERSION,
            name: self.name.clone(),
            kind: "box".to_string(),
            variables: Some(self.variables.clone()),
            lo: Some(self.domain.lo().iter().map(format_rational).collect()),
            hi: Some(self.domain.hi().iter().map(format_rational).collect()),
            overrides: self.overrides.clone(),
            polynomial: entries(&self.original),
            regularized: self.reference.as_ref().map(entries).unwrap_or_default(),
            vertices: None,
            edges: None,
            graph: None,
            bound: None,
        };
        toml::to_string(&file).expect("problem file serializes")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermEntry {
    coeff: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exact: Option<String>,
    exponents: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    format_version: u32,
    name: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    variables: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lo: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hi: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vertices: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<[usize; 2]>>,
    /// Inline graph text in edge-list or DIMACS form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    graph: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bound: Option<String>,
    #[serde(default)]
    overrides: Overrides,
    #[serde(default)]
    polynomial: Vec<TermEntry>,
    #[serde(default)]
    regularized: Vec<TermEntry>,
}

fn parse_terms(nvars: usize, entries: &[TermEntry], use_exact: bool) -> Result<Polynomial, ProblemError> {
    let mut terms = Vec::with_capacity(entries.len());
    for t in entries {
        if t.exponents.len() != nvars {
            return Err(ProblemError::Invalid(format!(
                "term {:?} has {} exponents, expected {nvars}",
                t.coeff,
                t.exponents.len()
            )));
        }
        let text = match (&t.exact, use_exact) {
            (Some(exact), true) => exact,
            _ => &t.coeff,
        };
        terms.push((ExponentVec::new(t.exponents.clone()), parse_rational(text)?));
    }
    Ok(Polynomial::from_terms(nvars, terms)?)
}

impl ProblemFile {
    fn to_box(&self, use_exact: bool) -> Result<Problem, ProblemError> {
        let missing = |what: &str| ProblemError::Invalid(format!("box problem needs `{what}`"));
        let lo = self.lo.as_ref().ok_or_else(|| missing("lo"))?;
        let hi = self.hi.as_ref().ok_or_else(|| missing("hi"))?;
        let n = lo.len();
        if n == 0 {
            return Err(ProblemError::Invalid("no variables".into()));
        }
        let lo: Vec<Rational> = lo.iter().map(|s| parse_rational(s)).collect::<Result<_, _>>()?;
        let hi: Vec<Rational> = hi.iter().map(|s| parse_rational(s)).collect::<Result<_, _>>()?;
        let domain = BoxDomain::new(lo, hi)?;
        let f = parse_terms(n, &self.polynomial, use_exact)?;
        let mut p = Problem::from_box(&self.name, domain, f)?;
        if let Some(vars) = &self.variables {
            if vars.len() != n {
                return Err(ProblemError::Invalid(format!("{} variable names for {n} variables", vars.len())));
            }
            p.variables = vars.clone();
        }
        if !self.regularized.is_empty() {
            p.reference = Some(parse_terms(n, &self.regularized, true)?);
        }
        Ok(p)
    }

    fn to_stable_set(&self) -> Result<Problem, ProblemError> {
        let graph = match (&self.graph, &self.edges) {
            (Some(text), None) => parse_graph(text)?,
            (None, Some(edges)) => {
                let n = self
                    .vertices
                    .or_else(|| edges.iter().flat_map(|e| e.iter().copied()).max())
                    .ok_or_else(|| ProblemError::Invalid("stable-set problem needs vertices or edges".into()))?;
                let pairs: Vec<(usize, usize)> = edges.iter().map(|e| (e[0], e[1])).collect();
                Graph::new(n, &pairs)?
            }
            (None, None) => match self.vertices {
                Some(n) if n > 0 => Graph::edgeless(n),
                _ => return Err(ProblemError::Invalid("stable-set problem needs a graph".into())),
            },
            (Some(_), Some(_)) => return Err(ProblemError::Invalid("give either `graph` or `edges`".into())),
        };
        let bound = self
            .bound
            .as_deref()
            .ok_or_else(|| ProblemError::Invalid("stable-set problem needs `bound`".into()))
            .and_then(|b| parse_rational(b).map_err(ProblemError::from))?;
        Ok(Problem::stable_set(&self.name, &graph, bound))
    }
}

const BUNDLED: [&str; 10] = [
    include_str!("../data/benchmarks/c01.toml"),
    include_str!("../data/benchmarks/c02.toml"),
    include_str!("../data/benchmarks/c03.toml"),
    include_str!("../data/benchmarks/c04.toml"),
    include_str!("../data/benchmarks/c05.toml"),
    include_str!("../data/benchmarks/c06.toml"),
    include_str!("../data/benchmarks/c07.toml"),
    include_str!("../data/benchmarks/c08.toml"),
    include_str!("../data/benchmarks/c09.toml"),
    include_str!("../data/benchmarks/c10.toml"),
];

/// The ten bundled benchmark problems `C1` … `C10`.
pub fn bundled_benchmarks() -> Vec<Problem> {
    BUNDLED.iter().map(|t| Problem::parse(t).expect("bundled benchmark parses")).collect()
}

/// Raw text of a bundled benchmark file, by name (`"C1"` … `"C10"`).
pub fn bundled_text(name: &str) -> Option<&'static str> {
    let idx: usize = name.strip_prefix(['C', 'c'])?.parse().ok()?;
    BUNDLED.get(idx.checked_sub(1)?).copied()
}

pub fn benchmark(name: &str) -> Option<Problem> {
    bundled_text(name).map(|t| Problem::parse(t).expect("bundled benchmark parses"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_files_parse() {
        let all = bundled_benchmarks();
        assert_eq!(all.len(), 10);
        assert_eq!(all[0].name, "C1");
        assert_eq!(all[9].nvars(), 6);
    }

    #[test]
    fn exact_override_is_optional() {
        let text = bundled_text("C1").unwrap();
        let exact = Problem::parse_with(text, true).unwrap();
        let literal = Problem::parse_with(text, false).unwrap();
        assert_eq!(exact.target.constant_term(), crate::poly::rational(14, 3));
        assert_eq!(literal.target.constant_term(), crate::poly::rational(467, 100));
    }

    #[test]
    fn version_and_kind_checked() {
        assert!(matches!(Problem::parse("format_version = 2\nname='x'\nkind='box'"), Err(ProblemError::Version(2))));
        assert!(matches!(Problem::parse("format_version = 1\nname='x'\nkind='cone'"), Err(ProblemError::Invalid(_))));
        assert!(matches!(Problem::parse("not toml ["), Err(ProblemError::Syntax(_))));
    }

    #[test]
    fn stable_set_file() {
        let p = Problem::parse("format_version = 1\nname = 'k3'\nkind = 'stableset'\nedges = [[1,2],[2,3],[1,3]]\nbound = '1'\n")
            .unwrap();
        assert_eq!(p.nvars(), 3);
        assert_eq!(p.axioms().len(), 6);
        assert_eq!(p.overrides.lemma_degree_cap, Some(2));
    }

    #[test]
    fn toml_round_trip() {
        let p = benchmark("C4").unwrap();
        let back = Problem::parse(&p.to_toml()).unwrap();
        assert_eq!(back.target, p.target);
        assert_eq!(back.digest(), p.digest());
    }
}
