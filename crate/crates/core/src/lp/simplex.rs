//! Two-phase revised primal simplex with a dense basis inverse.

use super::{LpSolution, LpSolver, LpStatus, NumericLp, FEAS_TOL};

/// Entering-variable rule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PivotRule {
    /// Lowest-index improving column and lowest-index leaving row on ties.
    #[default]
    Bland,
    /// Most negative reduced cost; switches to Bland after a run of
    /// degenerate pivots so that it cannot cycle.
    Dantzig,
}

/// Two-phase revised simplex.
///
/// `γ` is eliminated through the constant row, leaving
/// `min Σ_j cost_j λ_j` subject to the remaining rows and `λ ≥ 0`.
/// A light presolve drops rows that force their variables to zero and
/// fixes singleton rows before the basis is formed. The basis inverse is
/// refactorized periodically and the leaving row is chosen with a
/// two-pass Harris ratio test.
#[derive(Clone, Debug)]
pub struct SimplexSolver {
    pub rule: PivotRule,
    /// Iteration cap is `iteration_factor · (rows + cols)`.
    pub iteration_factor: usize,
}

impl Default for SimplexSolver {
    fn default() -> Self {
        Self { rule: PivotRule::Bland, iteration_factor: 50 }
    }
}

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const HARRIS_TOL: f64 = 1e-9;
const ZERO_TOL: f64 = 1e-12;
const DEGENERATE_SWITCH: usize = 50;
const REFACTOR_EVERY: usize = 64;

enum Outcome {
    Optimal,
    Unbounded,
    IterationLimit,
    Singular,
}

/// Basis state over `m` rows. Variables `0..n` are structural, `n + i` is
/// the artificial unit column of row `i`.
struct Revised<'a> {
    m: usize,
    n: usize,
    cols: &'a [Vec<(usize, f64)>],
    b: &'a [f64],
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    /// Row-major `B⁻¹`.
    binv: Vec<f64>,
    x: Vec<f64>,
    since_refactor: usize,
}

impl<'a> Revised<'a> {
    fn new(n: usize, cols: &'a [Vec<(usize, f64)>], b: &'a [f64]) -> Self {
        let m = b.len();
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = 1.0;
        }
        let mut in_basis = vec![false; n + m];
        in_basis[n..].iter_mut().for_each(|v| *v = true);
        Self { m, n, cols, b, basis: (n..n + m).collect(), in_basis, binv, x: b.to_vec(), since_refactor: 0 }
    }

    fn dot(&self, y: &[f64], k: usize) -> f64 {
        if k < self.n {
            self.cols[k].iter().map(|&(r, v)| y[r] * v).sum()
        } else {
            y[k - self.n]
        }
    }

    /// `w = B⁻¹ a_k`.
    fn ftran(&self, k: usize, w: &mut [f64]) {
        let m = self.m;
        for (i, wi) in w.iter_mut().enumerate() {
            let row = &self.binv[i * m..(i + 1) * m];
            *wi = self.dot(row, k);
        }
    }

    /// `y = c_Bᵀ B⁻¹`.
    fn btran(&self, cost: &[f64], y: &mut [f64]) {
        let m = self.m;
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..m {
            let c = cost[self.basis[i]];
            if c != 0.0 {
                for (yr, &v) in y.iter_mut().zip(&self.binv[i * m..(i + 1) * m]) {
                    *yr += c * v;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, q: usize, w: &[f64]) {
        let m = self.m;
        let theta = self.x[r] / w[r];
        for i in 0..m {
            if i != r {
                self.x[i] -= theta * w[i];
            }
        }
        self.x[r] = theta;
        let inv = 1.0 / w[r];
        self.binv[r * m..(r + 1) * m].iter_mut().for_each(|v| *v *= inv);
        let (before, rest) = self.binv.split_at_mut(r * m);
        let (prow, after) = rest.split_at_mut(m);
        for (i, row) in before.chunks_exact_mut(m).chain(after.chunks_exact_mut(m)).enumerate() {
            let f = w[if i < r { i } else { i + 1 }];
            if f != 0.0 {
                for (a, &p) in row.iter_mut().zip(prow.iter()) {
                    *a -= f * p;
                }
            }
        }
        self.in_basis[self.basis[r]] = false;
        self.in_basis[q] = true;
        self.basis[r] = q;
        self.since_refactor += 1;
    }

    /// Rebuilds `B⁻¹` and `x_B` from scratch by Gauss-Jordan elimination.
    fn refactor(&mut self) -> bool {
        let m = self.m;
        let mut a = vec![0.0; m * m];
        for (k, &var) in self.basis.iter().enumerate() {
            if var < self.n {
                for &(r, v) in &self.cols[var] {
                    a[r * m + k] = v;
                }
            } else {
                a[(var - self.n) * m + k] = 1.0;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let Some(p) = (col..m).max_by(|&i, &j| a[i * m + col].abs().total_cmp(&a[j * m + col].abs())) else {
                return false;
            };
            if a[p * m + col].abs() < ZERO_TOL {
                return false;
            }
            if p != col {
                for k in 0..m {
                    a.swap(p * m + k, col * m + k);
                    inv.swap(p * m + k, col * m + k);
                }
            }
            let d = 1.0 / a[col * m + col];
            for k in 0..m {
                a[col * m + k] *= d;
                inv[col * m + k] *= d;
            }
            for i in 0..m {
                let f = a[i * m + col];
                if i != col && f != 0.0 {
                    for k in 0..m {
                        a[i * m + k] -= f * a[col * m + k];
                        inv[i * m + k] -= f * inv[col * m + k];
                    }
                }
            }
        }
        // Row k of the inverse belongs to basis position k.
        self.binv = inv;
        for i in 0..m {
            self.x[i] = self.binv[i * m..(i + 1) * m].iter().zip(self.b).map(|(p, q)| p * q).sum();
        }
        self.since_refactor = 0;
        true
    }

    /// Two-pass Harris test: the largest pivot among rows whose ratio is
    /// within the tolerance-relaxed minimum.
    fn leaving(&self, w: &[f64], bland: bool) -> Option<usize> {
        let mut bound = f64::INFINITY;
        for i in 0..self.m {
            if w[i] > PIVOT_TOL {
                bound = bound.min((self.x[i].max(0.0) + HARRIS_TOL) / w[i]);
            }
        }
        if !bound.is_finite() {
            return None;
        }
        let cands = (0..self.m).filter(|&i| w[i] > PIVOT_TOL && self.x[i].max(0.0) / w[i] <= bound);
        if bland {
            let wmax = cands.clone().map(|i| w[i]).fold(0.0, f64::max);
            cands.filter(|&i| w[i] >= 0.1 * wmax).min_by_key(|&i| self.basis[i])
        } else {
            cands.max_by(|&i, &j| w[i].total_cmp(&w[j]).then(self.basis[j].cmp(&self.basis[i])))
        }
    }

    fn optimize(&mut self, cost: &[f64], rule: PivotRule, budget: &mut usize, iters: &mut usize) -> Outcome {
        let (m, n) = (self.m, self.n);
        let mut y = vec![0.0; m];
        let mut w = vec![0.0; m];
        let mut degenerate_run = 0usize;
        let mut blocked = vec![false; n];
        loop {
            if self.since_refactor >= REFACTOR_EVERY && !self.refactor() {
                return Outcome::Singular;
            }
            self.btran(cost, &mut y);
            let bland = rule == PivotRule::Bland || degenerate_run >= DEGENERATE_SWITCH;
            let mut entering: Option<(usize, f64)> = None;
            for k in 0..n {
                if self.in_basis[k] || blocked[k] {
                    continue;
                }
                let d = cost[k] - self.dot(&y, k);
                if d < -COST_TOL && entering.is_none_or(|(_, best)| d < best) {
                    entering = Some((k, d));
                    if bland {
                        break;
                    }
                }
            }
            let Some((q, _)) = entering else {
                if self.since_refactor > 0 {
                    if !self.refactor() {
                        return Outcome::Singular;
                    }
                    continue;
                }
                return Outcome::Optimal;
            };
            self.ftran(q, &mut w);
            let Some(r) = self.leaving(&w, bland) else {
                // The true LP is bounded, so this is round-off; skip the column.
                blocked[q] = true;
                if blocked.iter().filter(|&&b| b).count() > n / 2 + 1 {
                    return Outcome::Unbounded;
                }
                continue;
            };
            let step = self.x[r].max(0.0) / w[r];
            if step > ZERO_TOL && blocked.iter().any(|&b| b) {
                blocked.iter_mut().for_each(|b| *b = false);
            }
            if *budget == 0 {
                return Outcome::IterationLimit;
            }
            *budget -= 1;
            *iters += 1;
            degenerate_run = if step <= ZERO_TOL { degenerate_run + 1 } else { 0 };
            self.pivot(r, q, &w);
        }
    }
}

impl LpSolver for SimplexSolver {
    /// Falls back to the other pricing rule when the first attempt fails
    /// numerically.
    fn solve(&self, lp: &NumericLp) -> LpSolution {
        let first = self.solve_with(lp, self.rule);
        if first.status != LpStatus::NumericFailure {
            return first;
        }
        let other = match self.rule {
            PivotRule::Bland => PivotRule::Dantzig,
            PivotRule::Dantzig => PivotRule::Bland,
        };
        let second = self.solve_with(lp, other);
        LpSolution { iterations: first.iterations + second.iterations, ..second }
    }
}

impl SimplexSolver {
    /// Solves with every column scaled to unit max-norm, then maps the
    /// multipliers back.
    fn solve_with(&self, lp: &NumericLp, rule: PivotRule) -> LpSolution {
        let mut work = lp.clone();
        let mut col_scale = vec![1.0; lp.ncols()];
        for (col, s) in work.cols.iter_mut().zip(col_scale.iter_mut()) {
            let m = col.iter().fold(0.0f64, |m, &(_, v)| m.max(v.abs()));
            if m > 0.0 {
                *s = m;
                col.iter_mut().for_each(|e| e.1 /= m);
            }
        }
        let mut sol = self.solve_raw(&work, rule);
        if sol.status != LpStatus::Optimal {
            return sol;
        }
        for (l, s) in sol.lambda.iter_mut().zip(&col_scale) {
            *l /= s;
        }
        sol.gamma = lp.rhs()[0] - (0..lp.ncols()).map(|j| lp.cost(j) * sol.lambda[j]).sum::<f64>();
        if lp.residual(&sol.lambda, sol.gamma) > FEAS_TOL * lp.scale() {
            return LpSolution::failed(LpStatus::NumericFailure, lp.ncols(), sol.iterations);
        }
        sol
    }

    fn solve_raw(&self, lp: &NumericLp, rule: PivotRule) -> LpSolution {
        let ncols = lp.ncols();
        let nrows = lp.nrows();
        let scale = lp.scale();
        let mut b: Vec<f64> = lp.rhs().iter().map(|x| x / scale).collect();
        let mut budget = self.iteration_factor * (nrows + ncols).max(1);
        let mut iters = 0usize;
        let infeasible = |iters| LpSolution::failed(LpStatus::Infeasible, ncols, iters);
        let numeric = |iters| LpSolution::failed(LpStatus::NumericFailure, ncols, iters);

        // Row-wise view of the constraint rows.
        let mut row_entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nrows];
        for j in 0..ncols {
            for &(r, v) in lp.column(j) {
                row_entries[r].push((j, v));
            }
        }

        // Presolve.
        let mut fixed: Vec<Option<f64>> = vec![None; ncols];
        let mut active = vec![true; nrows];
        active[0] = false;
        let mut changed = true;
        while changed {
            changed = false;
            for r in 1..nrows {
                if !active[r] {
                    continue;
                }
                let live: Vec<(usize, f64)> =
                    row_entries[r].iter().copied().filter(|&(j, v)| fixed[j].is_none() && v != 0.0).collect();
                let br = b[r];
                if live.is_empty() {
                    if br.abs() > FEAS_TOL {
                        return infeasible(iters);
                    }
                    active[r] = false;
                    changed = true;
                    continue;
                }
                let all_pos = live.iter().all(|&(_, v)| v > 0.0);
                let all_neg = live.iter().all(|&(_, v)| v < 0.0);
                if br.abs() <= ZERO_TOL && (all_pos || all_neg) {
                    for &(j, _) in &live {
                        fixed[j] = Some(0.0);
                    }
                    active[r] = false;
                    changed = true;
                } else if (all_pos && br < -FEAS_TOL) || (all_neg && br > FEAS_TOL) {
                    return infeasible(iters);
                } else if live.len() == 1 {
                    let (j, a) = live[0];
                    let v = br / a;
                    if v < -FEAS_TOL {
                        return infeasible(iters);
                    }
                    let v = v.max(0.0);
                    fixed[j] = Some(v);
                    for &(r2, a2) in lp.column(j) {
                        b[r2] -= a2 * v;
                    }
                    active[r] = false;
                    changed = true;
                }
            }
        }

        let free: Vec<usize> = (0..ncols).filter(|&j| fixed[j].is_none()).collect();
        let rows: Vec<usize> = (1..nrows).filter(|&r| active[r]).collect();
        let nf = free.len();
        let nr = rows.len();
        let mut pos_of_row = vec![usize::MAX; nrows];
        for (i, &r) in rows.iter().enumerate() {
            pos_of_row[r] = i;
        }
        // Rows with negative right-hand side are negated so that the
        // artificial basis starts feasible.
        let flip: Vec<f64> = rows.iter().map(|&r| if b[r] < 0.0 { -1.0 } else { 1.0 }).collect();
        let rb: Vec<f64> = rows.iter().zip(&flip).map(|(&r, s)| b[r] * s).collect();
        let cols: Vec<Vec<(usize, f64)>> = free
            .iter()
            .map(|&j| {
                lp.column(j)
                    .iter()
                    .filter_map(|&(r, v)| {
                        let i = pos_of_row[r];
                        (i != usize::MAX).then(|| (i, v * flip[i]))
                    })
                    .collect()
            })
            .collect();

        let mut s = Revised::new(nf, &cols, &rb);
        let mut cost = vec![0.0; nf + nr];
        cost[nf..].iter_mut().for_each(|c| *c = 1.0);
        match s.optimize(&cost, rule, &mut budget, &mut iters) {
            Outcome::Optimal => {}
            _ => return numeric(iters),
        }
        let artificial: f64 = (0..nr).filter(|&i| s.basis[i] >= nf).map(|i| s.x[i].max(0.0)).sum();
        if artificial > FEAS_TOL {
            return infeasible(iters);
        }

        // Drive artificials out of the basis. Those that cannot leave sit on
        // redundant rows and stay at zero.
        let mut w = vec![0.0; nr];
        for i in 0..nr {
            if s.basis[i] < nf {
                continue;
            }
            let row = s.binv[i * nr..(i + 1) * nr].to_vec();
            let best = (0..nf)
                .filter(|&k| !s.in_basis[k])
                .map(|k| (k, s.dot(&row, k).abs()))
                .filter(|&(_, a)| a > 1e-7)
                .max_by(|a, b| a.1.total_cmp(&b.1));
            if let Some((k, _)) = best {
                s.ftran(k, &mut w);
                s.pivot(i, k, &w);
            }
        }
        if s.since_refactor > 0 && !s.refactor() {
            return numeric(iters);
        }

        let mut cost = vec![0.0; nf + nr];
        for (c, &j) in cost.iter_mut().zip(&free) {
            *c = lp.cost(j);
        }
        match s.optimize(&cost, rule, &mut budget, &mut iters) {
            Outcome::Optimal => {}
            _ => return numeric(iters),
        }

        let mut lambda = vec![0.0; ncols];
        for (j, v) in fixed.iter().enumerate() {
            if let Some(v) = v {
                lambda[j] = *v;
            }
        }
        let mut basis = Vec::new();
        for i in 0..nr {
            let k = s.basis[i];
            if k < nf {
                lambda[free[k]] = s.x[i].max(0.0);
                basis.push(free[k]);
            }
        }
        for l in lambda.iter_mut() {
            *l *= scale;
        }
        let gamma = lp.rhs()[0] - (0..ncols).map(|j| lp.cost(j) * lambda[j]).sum::<f64>();
        if lp.residual(&lambda, gamma) > FEAS_TOL * scale {
            return numeric(iters);
        }
        basis.sort_unstable();
        LpSolution { status: LpStatus::Optimal, gamma, lambda, basis, iterations: iters }
    }
}
