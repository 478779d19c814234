//! Dense two-phase bounded-variable primal simplex, used only as a pruning bound.
//!
//! Results are floating point and never certify anything on their own: the search
//! re-checks every integral candidate exactly and prunes with an integrality margin.

use crate::model::{Comparator, LinearConstraint};

const PIVOT_EPS: f64 = 1e-9;
const COST_EPS: f64 = 1e-9;
const DEGENERATE_SWITCH: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpResult {
    Optimal { value: f64, x: Vec<f64> },
    Infeasible,
    /// Unbounded or out of iterations; the caller must not prune on it.
    Inconclusive,
}

struct Tableau {
    m: usize,
    cols: usize,
    t: Vec<f64>,
    beta: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    at_upper: Vec<bool>,
    upper: Vec<f64>,
    d: Vec<f64>,
}

enum Phase {
    Optimal,
    Unbounded,
    IterationLimit,
}

impl Tableau {
    fn set_costs(&mut self, cost: &[f64]) {
        self.d = cost.to_vec();
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let start = i * self.cols;
                for j in 0..self.cols {
                    self.d[j] -= cb * self.t[start + j];
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let cols = self.cols;
        let p = self.t[r * cols + j];
        for k in 0..cols {
            self.t[r * cols + k] /= p;
        }
        let (before, rest) = self.t.split_at_mut(r * cols);
        let (prow, after) = rest.split_at_mut(cols);
        for row in before.chunks_mut(cols).chain(after.chunks_mut(cols)) {
            let f = row[j];
            if f != 0.0 {
                for k in 0..cols {
                    row[k] -= f * prow[k];
                }
                row[j] = 0.0;
            }
        }
        let f = self.d[j];
        if f != 0.0 {
            for k in 0..cols {
                self.d[k] -= f * prow[k];
            }
            self.d[j] = 0.0;
        }
        let leaving = self.basis[r];
        self.is_basic[leaving] = false;
        self.is_basic[j] = true;
        self.at_upper[j] = false;
        self.basis[r] = j;
    }

    fn run(&mut self, max_iter: usize) -> Phase {
        let mut degenerate = 0usize;
        for _ in 0..max_iter {
            let bland = degenerate >= DEGENERATE_SWITCH;
            // pricing
            let mut enter = None;
            let mut best = 0.0;
            for j in 0..self.cols {
                if self.is_basic[j] || self.upper[j] <= 0.0 {
                    continue;
                }
                let dj = self.d[j];
                let improving = if self.at_upper[j] { dj > COST_EPS } else { dj < -COST_EPS };
                if improving {
                    if bland {
                        enter = Some(j);
                        break;
                    }
                    if dj.abs() > best {
                        best = dj.abs();
                        enter = Some(j);
                    }
                }
            }
            let Some(j) = enter else { return Phase::Optimal };
            let dir = if self.at_upper[j] { -1.0 } else { 1.0 };

            // ratio test
            let mut step = self.upper[j];
            let mut leave: Option<(usize, bool)> = None;
            let mut leave_mag = 0.0;
            for i in 0..self.m {
                let g = self.t[i * self.cols + j] * dir;
                let (limit, to_upper) = if g > PIVOT_EPS {
                    (self.beta[i].max(0.0) / g, false)
                } else if g < -PIVOT_EPS {
                    let ub = self.upper[self.basis[i]];
                    if ub.is_infinite() {
                        continue;
                    }
                    ((ub - self.beta[i]).max(0.0) / -g, true)
                } else {
                    continue;
                };
                let better = match leave {
                    None => limit < step,
                    Some((li, _)) => {
                        if limit < step - 1e-12 {
                            true
                        } else if limit <= step + 1e-12 {
                            if bland {
                                self.basis[i] < self.basis[li]
                            } else {
                                g.abs() > leave_mag
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    step = limit;
                    leave = Some((i, to_upper));
                    leave_mag = g.abs();
                }
            }
            if step.is_infinite() {
                return Phase::Unbounded;
            }
            if step <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            for i in 0..self.m {
                let g = self.t[i * self.cols + j] * dir;
                if g != 0.0 {
                    self.beta[i] -= g * step;
                }
            }
            match leave {
                None => {
                    self.at_upper[j] = !self.at_upper[j];
                }
                Some((r, to_upper)) => {
                    let entering_value = if dir > 0.0 { step } else { self.upper[j] - step };
                    let leaving = self.basis[r];
                    self.pivot(r, j);
                    self.beta[r] = entering_value;
                    self.at_upper[leaving] = to_upper;
                }
            }
        }
        Phase::IterationLimit
    }

    fn value_of(&self, j: usize) -> f64 {
        if self.is_basic[j] {
            let r = self.basis.iter().position(|&b| b == j).unwrap_or(0);
            self.beta[r]
        } else if self.at_upper[j] {
            self.upper[j]
        } else {
            0.0
        }
    }
}

/// Minimizes `cost·x` over the rows within `lo ≤ x ≤ hi`.
pub(crate) fn solve_lp(rows: &[LinearConstraint], cost: &[f64], lo: &[i64], hi: &[i64]) -> LpResult {
    let n = lo.len();
    // only unfixed structurals become columns
    let mut col_of = vec![usize::MAX; n];
    let mut var_of = Vec::new();
    for j in 0..n {
        if hi[j] > lo[j] {
            col_of[j] = var_of.len();
            var_of.push(j);
        }
    }
    let nf = var_of.len();

    struct Row {
        coeffs: Vec<(usize, f64)>,
        cmp: Comparator,
        rhs: f64,
    }
    let mut lp_rows = Vec::new();
    for row in rows {
        let mut rhs = row.rhs as f64;
        let mut coeffs = Vec::new();
        for (v, a) in &row.terms {
            let j = v.idx();
            rhs -= *a as f64 * lo[j] as f64;
            if col_of[j] != usize::MAX {
                coeffs.push((col_of[j], *a as f64));
            }
        }
        if coeffs.is_empty() {
            let ok = match row.cmp {
                Comparator::Le => rhs >= -1e-9,
                Comparator::Ge => rhs <= 1e-9,
                Comparator::Eq => rhs.abs() <= 1e-9,
            };
            if !ok {
                return LpResult::Infeasible;
            }
            continue;
        }
        lp_rows.push(Row { coeffs, cmp: row.cmp, rhs });
    }

    let m = lp_rows.len();
    let n_slack = lp_rows.iter().filter(|r| r.cmp != Comparator::Eq).count();
    // decide which rows need an artificial
    let mut needs_art = Vec::with_capacity(m);
    for r in &lp_rows {
        let slack_sign = match r.cmp {
            Comparator::Le => 1.0,
            Comparator::Ge => -1.0,
            Comparator::Eq => 0.0,
        };
        let flipped = r.rhs < 0.0;
        let eff = if flipped { -slack_sign } else { slack_sign };
        needs_art.push(eff <= 0.0);
    }
    let n_art = needs_art.iter().filter(|&&x| x).count();
    let cols = nf + n_slack + n_art;

    let mut tab = Tableau {
        m,
        cols,
        t: vec![0.0; m * cols],
        beta: vec![0.0; m],
        basis: vec![0; m],
        is_basic: vec![false; cols],
        at_upper: vec![false; cols],
        upper: vec![f64::INFINITY; cols],
        d: vec![0.0; cols],
    };
    for (k, &j) in var_of.iter().enumerate() {
        tab.upper[k] = (hi[j] - lo[j]) as f64;
    }
    let mut slack_col = nf;
    let mut art_col = nf + n_slack;
    for (i, r) in lp_rows.iter().enumerate() {
        let sgn = if r.rhs < 0.0 { -1.0 } else { 1.0 };
        let base = i * cols;
        for (c, a) in &r.coeffs {
            tab.t[base + c] += sgn * a;
        }
        tab.beta[i] = sgn * r.rhs;
        let slack_sign = match r.cmp {
            Comparator::Le => Some(1.0),
            Comparator::Ge => Some(-1.0),
            Comparator::Eq => None,
        };
        if let Some(s) = slack_sign {
            tab.t[base + slack_col] = sgn * s;
            if !needs_art[i] {
                tab.basis[i] = slack_col;
                tab.is_basic[slack_col] = true;
            }
            slack_col += 1;
        }
        if needs_art[i] {
            tab.t[base + art_col] = 1.0;
            tab.basis[i] = art_col;
            tab.is_basic[art_col] = true;
            art_col += 1;
        }
    }

    let max_iter = 50 * (m + cols) + 1_000;
    if n_art > 0 {
        let mut c1 = vec![0.0; cols];
        for c in c1.iter_mut().skip(nf + n_slack) {
            *c = 1.0;
        }
        tab.set_costs(&c1);
        match tab.run(max_iter) {
            Phase::Optimal => {}
            _ => return LpResult::Inconclusive,
        }
        let infeas: f64 = (nf + n_slack..cols).map(|j| tab.value_of(j)).sum();
        let scale = 1.0 + lp_rows.iter().map(|r| r.rhs.abs()).fold(0.0, f64::max);
        if infeas > 1e-7 * scale {
            return LpResult::Infeasible;
        }
        for j in nf + n_slack..cols {
            tab.upper[j] = 0.0;
        }
    }
    let mut c2 = vec![0.0; cols];
    for (k, &j) in var_of.iter().enumerate() {
        c2[k] = cost[j];
    }
    tab.set_costs(&c2);
    match tab.run(max_iter) {
        Phase::Optimal => {}
        Phase::Unbounded | Phase::IterationLimit => return LpResult::Inconclusive,
    }

    let mut x: Vec<f64> = lo.iter().map(|&l| l as f64).collect();
    let mut basic_val = vec![None; cols];
    for i in 0..m {
        basic_val[tab.basis[i]] = Some(tab.beta[i]);
    }
    for (k, &j) in var_of.iter().enumerate() {
        let v = match basic_val[k] {
            Some(b) => b,
            None if tab.at_upper[k] => tab.upper[k],
            None => 0.0,
        };
        x[j] += v.clamp(0.0, tab.upper[k]);
    }
    let value = x.iter().zip(cost).map(|(a, c)| a * c).sum();
    LpResult::Optimal { value, x }
}
