use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::Graph;
use crate::poly::{ExponentVec, Polynomial, Rational};

/// The ideal generated by `x_i x_j` for every edge and `x_i² − x_i` for
/// every vertex.
///
/// Axioms are indexed with the edges first, in sorted order, followed by
/// one square axiom per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeIdeal {
    graph: Graph,
    edge_list: Vec<(usize, usize)>,
}

/// One summand `coeff · x^multiplier · axiom` of an ideal-membership witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomMultiple {
    pub axiom: usize,
    pub multiplier: ExponentVec,
    pub coeff: Rational,
}

impl EdgeIdeal {
    pub fn new(graph: &Graph) -> Self {
        Self { graph: graph.clone(), edge_list: graph.edges().collect() }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn nvars(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn axiom_count(&self) -> usize {
        self.edge_list.len() + self.nvars()
    }

    pub fn axiom(&self, index: usize) -> Polynomial {
        let n = self.nvars();
        if let Some(&(i, j)) = self.edge_list.get(index) {
            let mut e = vec![0; n];
            e[i] = 1;
            e[j] = 1;
            Polynomial::monomial(ExponentVec::new(e), Rational::one())
        } else {
            let i = index - self.edge_list.len();
            let mut sq = vec![0; n];
            sq[i] = 2;
            let mut p = Polynomial::monomial(ExponentVec::new(sq), Rational::one());
            p.add_term(ExponentVec::unit(n, i), -Rational::one());
            p
        }
    }

    pub fn axioms(&self) -> Vec<Polynomial> {
        (0..self.axiom_count()).map(|k| self.axiom(k)).collect()
    }

    fn edge_index(&self, i: usize, j: usize) -> Option<usize> {
        self.edge_list.binary_search(&(i.min(j), i.max(j))).ok()
    }

    /// Normal form: every exponent capped at one, and monomials containing
    /// an edge removed.
    pub fn reduce(&self, p: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(p.nvars());
        for (e, c) in p.terms() {
            let ml: Vec<u32> = e.as_slice().iter().map(|&k| k.min(1)).collect();
            if self.first_edge(&ml).is_none() {
                out.add_term(ExponentVec::new(ml), c.clone());
            }
        }
        out
    }

    fn first_edge(&self, ml: &[u32]) -> Option<(usize, usize)> {
        let support: Vec<usize> = (0..ml.len()).filter(|&i| ml[i] > 0).collect();
        for (a, &i) in support.iter().enumerate() {
            for &j in &support[a + 1..] {
                if self.graph.has_edge(i, j) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Expresses `p − reduce(p)` as a combination of axiom multiples.
    pub fn witness(&self, p: &Polynomial) -> Vec<AxiomMultiple> {
        let n = p.nvars();
        let sq_base = self.edge_list.len();
        let mut acc: BTreeMap<(usize, ExponentVec), Rational> = BTreeMap::new();
        let mut record = |axiom: usize, mult: Vec<u32>, c: &Rational| {
            let slot = acc.entry((axiom, ExponentVec::new(mult))).or_insert_with(Rational::zero);
            *slot += c;
        };
        for (e, c) in p.terms() {
            let mut a = e.as_slice().to_vec();
            // x^a = x^{a-2e_i} (x_i^2 - x_i) + x^{a-e_i}
            for i in 0..n {
                while a[i] >= 2 {
                    let mut m = a.clone();
                    m[i] -= 2;
                    record(sq_base + i, m, c);
                    a[i] -= 1;
                }
            }
            if let Some((i, j)) = self.first_edge(&a) {
                let mut m = a.clone();
                m[i] -= 1;
                m[j] -= 1;
                record(self.edge_index(i, j).expect("edge present"), m, c);
            }
        }
        acc.into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((axiom, multiplier), coeff)| AxiomMultiple { axiom, multiplier, coeff })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::KrivineTerm;

    #[test]
    fn triangle_product_reduces_to_bound() {
        let ideal = EdgeIdeal::new(&Graph::complete(3));
        let prod = KrivineTerm::new(vec![0, 0, 0], vec![1, 1, 1]).expand();
        let nf = ideal.reduce(&prod);
        assert_eq!(nf, Polynomial::from_i64(3, &[(1, &[0, 0, 0]), (-1, &[1, 0, 0]), (-1, &[0, 1, 0]), (-1, &[0, 0, 1])]));
    }

    #[test]
    fn witness_accounts_for_the_difference() {
        let g = Graph::new(3, &[(1, 2)]).unwrap();
        let ideal = EdgeIdeal::new(&g);
        let p = Polynomial::from_i64(3, &[(3, &[2, 1, 1]), (-2, &[0, 0, 3]), (5, &[1, 0, 1])]);
        let mut rebuilt = ideal.reduce(&p);
        for w in ideal.witness(&p) {
            let m = Polynomial::monomial(w.multiplier.clone(), w.coeff.clone());
            rebuilt = &rebuilt + &(&m * &ideal.axiom(w.axiom));
        }
        assert_eq!(rebuilt, p);
    }
}
