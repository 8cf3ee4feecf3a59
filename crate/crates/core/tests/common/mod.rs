//! Oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use krivine::poly::{monomial_basis, ExponentVec, Polynomial, Rational};
use krivine::stableset::{parse_graph, Graph};
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;

pub const GRAPH_FIXTURES: [&str; 6] = ["fig1", "k3", "k7", "c5", "petersen", "edgeless3"];

pub fn graph_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/graphs").join(format!("{name}.txt"))
}

pub fn graph(name: &str) -> Graph {
    let text = std::fs::read_to_string(graph_path(name)).expect("graph fixture exists");
    parse_graph(&text).expect("graph fixture parses")
}

/// Largest stable set by exhaustive enumeration of vertex subsets.
pub fn max_stable_set(g: &Graph) -> usize {
    let n = g.vertex_count();
    assert!(n <= 24, "brute force is only meant for small graphs");
    let mut adj = vec![0u32; n];
    for (i, j) in g.edges() {
        adj[i] |= 1 << j;
        adj[j] |= 1 << i;
    }
    let mut best = 0;
    for set in 0u32..(1 << n) {
        let size = set.count_ones() as usize;
        if size <= best {
            continue;
        }
        if (0..n).all(|v| set & (1 << v) == 0 || adj[v] & set == 0) {
            best = size;
        }
    }
    best
}

/// Optimum of `max γ` s.t. `f − γ = Σ λ_j m_j`, `λ ≥ 0`, by enumerating
/// every column subset and solving its square-or-tall system exactly.
/// Returns `None` when no subset gives a non-negative solution.
pub fn vertex_enumeration(f: &Polynomial, memory: &[Polynomial]) -> Option<Rational> {
    let n = f.nvars();
    let d = memory.iter().map(Polynomial::degree).chain([f.degree()]).max().unwrap_or(0);
    let rows: Vec<ExponentVec> = monomial_basis(n, d).into_iter().filter(|e| !e.is_constant()).collect();
    let constant = ExponentVec::zero(n);
    let k = memory.len();
    assert!(k <= 16);
    let mut best: Option<Rational> = None;
    for mask in 0u32..(1 << k) {
        let cols: Vec<usize> = (0..k).filter(|j| mask & (1 << j) != 0).collect();
        let a: Vec<Vec<Rational>> =
            rows.iter().map(|r| cols.iter().map(|&j| memory[j].coeff(r)).collect()).collect();
        let b: Vec<Rational> = rows.iter().map(|r| f.coeff(r)).collect();
        let Some(lambda) = solve_exact(a, b, cols.len()) else { continue };
        if lambda.iter().any(Signed::is_negative) {
            continue;
        }
        let used: Rational = cols.iter().zip(&lambda).map(|(&j, l)| memory[j].coeff(&constant) * l).sum();
        let gamma = f.coeff(&constant) - used;
        if best.as_ref().is_none_or(|g| &gamma > g) {
            best = Some(gamma);
        }
    }
    best
}

/// Unique solution of `a x = b` when the columns are independent and the
/// system is consistent.
fn solve_exact(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>, cols: usize) -> Option<Vec<Rational>> {
    let m = a.len();
    let mut r = 0;
    for c in 0..cols {
        let p = (r..m).find(|&i| !a[i][c].is_zero())?;
        a.swap(r, p);
        b.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        b[r] *= &inv;
        for i in 0..m {
            if i != r && !a[i][c].is_zero() {
                let factor = a[i][c].clone();
                for cc in 0..cols {
                    let sub = &factor * &a[r][cc];
                    a[i][cc] -= sub;
                }
                let sub = &factor * &b[r];
                b[i] -= sub;
            }
        }
        r += 1;
    }
    if b[r..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    Some(b[..cols].to_vec())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().expect("finite")
}

/// Random exponent vector with total degree at most `deg`.
pub fn random_exponents<R: Rng>(rng: &mut R, n: usize, deg: u32) -> Vec<u32> {
    loop {
        let e: Vec<u32> = (0..n).map(|_| rng.random_range(0..=deg)).collect();
        if e.iter().sum::<u32>() <= deg {
            return e;
        }
    }
}

/// Random polynomial with integer coefficients in `[-cmax, cmax]`.
pub fn random_poly<R: Rng>(rng: &mut R, n: usize, deg: u32, cmax: i64, terms: usize) -> Polynomial {
    let data: Vec<(i64, Vec<u32>)> = (0..terms)
        .map(|_| (rng.random_range(-cmax..=cmax), random_exponents(rng, n, deg)))
        .collect();
    let refs: Vec<(i64, &[u32])> = data.iter().map(|(c, e)| (*c, e.as_slice())).collect();
    Polynomial::from_i64(n, &refs)
}
