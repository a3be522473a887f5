//! Bounded-variable primal simplex with an explicit basis inverse.
//!
//! Variables carry two-sided bounds; every constraint row gets a slack, so
//! the basis always has one column per row and the all-slack basis is a
//! valid starting point. Infeasibility is removed by a composite phase that
//! minimizes the total bound violation of the basic variables, which handles
//! warm starts from a neighboring problem without artificial columns.
//!
//! Pivot selection is Dantzig pricing with a Bland's-rule fallback after a
//! run of degenerate steps, and all ties break on the lowest column index,
//! so the pivot sequence is a pure function of the problem data.

use crate::algebra::Sense;

/// One constraint row borrowed from the caller's assembly buffers.
#[derive(Debug, Clone, Copy)]
pub struct Row<'a> {
    pub coeffs: &'a [(usize, f64)],
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct LpOptions {
    /// Absolute bound violation treated as feasible.
    pub feas_tol: f64,
    /// Reduced-cost threshold below which a column cannot improve.
    pub cost_tol: f64,
    /// Smallest pivot element accepted during ratio tests.
    pub pivot_tol: f64,
    pub max_iters: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            feas_tol: 1e-7,
            cost_tol: 1e-8,
            pivot_tol: 1e-9,
            max_iters: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    /// The factorization or ratio test lost precision beyond repair.
    Numerical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColState {
    Basic,
    AtLo,
    AtHi,
}

/// Restartable basis snapshot: which column sits in each basis slot plus the
/// resting bound of every nonbasic column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    pub basic: Vec<usize>,
    pub state: Vec<ColState>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    /// Values of the structural columns only.
    pub x: Vec<f64>,
    pub basis: Basis,
    pub iterations: usize,
}

/// A prepared problem: structural columns stored by column, slack columns
/// implicit. Column j >= n denotes the slack of row j - n.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub n: usize,
    pub m: usize,
    cols: Vec<Vec<(usize, f64)>>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    cost: Vec<f64>,
    rhs: Vec<f64>,
}

impl LpProblem {
    /// Builds the column-wise form. `lo`, `hi`, and `cost` cover the `n`
    /// structural variables; slack bounds follow each row's sense.
    pub fn new(lo: &[f64], hi: &[f64], cost: &[f64], rows: &[Row]) -> LpProblem {
        let n = lo.len();
        let m = rows.len();
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut full_lo = lo.to_vec();
        let mut full_hi = hi.to_vec();
        let mut rhs = Vec::with_capacity(m);
        for (i, row) in rows.iter().enumerate() {
            for &(j, c) in row.coeffs {
                if c != 0.0 {
                    cols[j].push((i, c));
                }
            }
            rhs.push(row.rhs);
            let (slo, shi) = match row.sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            full_lo.push(slo);
            full_hi.push(shi);
        }
        LpProblem {
            n,
            m,
            cols,
            lo: full_lo,
            hi: full_hi,
            cost: cost.to_vec(),
            rhs,
        }
    }

    fn col(&self, j: usize) -> ColRef<'_> {
        if j < self.n {
            ColRef::Sparse(&self.cols[j])
        } else {
            ColRef::Unit(j - self.n)
        }
    }

    fn cost_of(&self, j: usize) -> f64 {
        if j < self.n {
            self.cost[j]
        } else {
            0.0
        }
    }

    /// The one slack basis every problem admits.
    pub fn slack_basis(&self) -> Basis {
        let mut state = vec![ColState::AtLo; self.n + self.m];
        let mut basic = Vec::with_capacity(self.m);
        for j in 0..self.n {
            // Rest on the bound of smaller magnitude for gentler initial
            // activities.
            state[j] = if self.hi[j].abs() < self.lo[j].abs() {
                ColState::AtHi
            } else {
                ColState::AtLo
            };
        }
        for i in 0..self.m {
            basic.push(self.n + i);
            state[self.n + i] = ColState::Basic;
        }
        Basis { basic, state }
    }
}

enum ColRef<'a> {
    Sparse(&'a [(usize, f64)]),
    Unit(usize),
}

/// Working state of one solve: dense column-major basis inverse plus the
/// basic values.
struct Simplex<'p> {
    p: &'p LpProblem,
    opt: LpOptions,
    basis: Basis,
    /// Position of each column in the basis, or usize::MAX.
    pos: Vec<usize>,
    /// Column-major m x m inverse of the basis matrix.
    binv: Vec<f64>,
    xb: Vec<f64>,
    iters: usize,
    pivots_since_refactor: usize,
    degenerate_run: usize,
}

impl<'p> Simplex<'p> {
    fn new(p: &'p LpProblem, basis: Basis, opt: LpOptions) -> Simplex<'p> {
        let m = p.m;
        let mut s = Simplex {
            p,
            opt,
            basis,
            pos: Vec::new(),
            binv: vec![0.0; m * m],
            xb: vec![0.0; m],
            iters: 0,
            pivots_since_refactor: 0,
            degenerate_run: 0,
        };
        s.sync_pos();
        s
    }

    fn sync_pos(&mut self) {
        self.pos = vec![usize::MAX; self.p.n + self.p.m];
        for (k, &j) in self.basis.basic.iter().enumerate() {
            self.pos[j] = k;
        }
    }

    /// Resting value of a nonbasic column.
    fn nb_value(&self, j: usize) -> f64 {
        match self.basis.state[j] {
            ColState::AtLo => self.p.lo[j],
            ColState::AtHi => self.p.hi[j],
            ColState::Basic => unreachable!("basic column has no resting value"),
        }
    }

    /// Rebuilds the inverse from scratch. Returns false when the basis
    /// matrix is numerically singular.
    fn refactor(&mut self) -> bool {
        let m = self.p.m;
        // Dense column-major copy of the basis matrix.
        let mut b = vec![0.0; m * m];
        for (k, &j) in self.basis.basic.iter().enumerate() {
            match self.p.col(j) {
                ColRef::Sparse(entries) => {
                    for &(i, c) in entries {
                        b[k * m + i] = c;
                    }
                }
                ColRef::Unit(i) => b[k * m + i] = 1.0,
            }
        }
        // Gauss-Jordan with partial pivoting applied to [B | I].
        let inv = &mut self.binv;
        inv.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for k in 0..m {
            let mut piv = k;
            let mut best = b[k * m + k].abs();
            for r in k + 1..m {
                let a = b[k * m + r].abs();
                if a > best {
                    best = a;
                    piv = r;
                }
            }
            if best < 1e-11 {
                return false;
            }
            if piv != k {
                for c in 0..m {
                    b.swap(c * m + k, c * m + piv);
                    inv.swap(c * m + k, c * m + piv);
                }
            }
            let d = b[k * m + k];
            for c in 0..m {
                b[c * m + k] /= d;
                inv[c * m + k] /= d;
            }
            for r in 0..m {
                if r == k {
                    continue;
                }
                let f = b[k * m + r];
                if f == 0.0 {
                    continue;
                }
                for c in 0..m {
                    let t = b[c * m + k] * f;
                    b[c * m + r] -= t;
                    let t = inv[c * m + k] * f;
                    inv[c * m + r] -= t;
                }
            }
        }
        self.pivots_since_refactor = 0;
        true
    }

    /// x_B = Binv (rhs - sum of nonbasic columns at their resting values).
    fn recompute_xb(&mut self) {
        let m = self.p.m;
        let mut r = self.p.rhs.clone();
        for j in 0..self.p.n + m {
            if self.basis.state[j] == ColState::Basic {
                continue;
            }
            let v = self.nb_value(j);
            if v == 0.0 {
                continue;
            }
            match self.p.col(j) {
                ColRef::Sparse(entries) => {
                    for &(i, c) in entries {
                        r[i] -= c * v;
                    }
                }
                ColRef::Unit(i) => r[i] -= v,
            }
        }
        for i in 0..m {
            self.xb[i] = 0.0;
        }
        for (k, &rk) in r.iter().enumerate() {
            if rk == 0.0 {
                continue;
            }
            let col = &self.binv[k * m..(k + 1) * m];
            for i in 0..m {
                self.xb[i] += col[i] * rk;
            }
        }
    }

    /// alpha = Binv A_j.
    fn ftran(&self, j: usize, alpha: &mut [f64]) {
        let m = self.p.m;
        alpha.iter_mut().for_each(|v| *v = 0.0);
        match self.p.col(j) {
            ColRef::Sparse(entries) => {
                for &(k, c) in entries {
                    let col = &self.binv[k * m..(k + 1) * m];
                    for i in 0..m {
                        alpha[i] += col[i] * c;
                    }
                }
            }
            ColRef::Unit(k) => {
                let col = &self.binv[k * m..(k + 1) * m];
                alpha[..m].copy_from_slice(col);
            }
        }
    }

    /// y = Binv^T g, the row multipliers for a basic-space gradient.
    fn btran(&self, g: &[f64], y: &mut [f64]) {
        let m = self.p.m;
        for k in 0..m {
            let col = &self.binv[k * m..(k + 1) * m];
            let mut acc = 0.0;
            for i in 0..m {
                acc += col[i] * g[i];
            }
            y[k] = acc;
        }
    }

    /// y . A_j over one column.
    fn dot_col(&self, j: usize, y: &[f64]) -> f64 {
        match self.p.col(j) {
            ColRef::Sparse(entries) => entries.iter().map(|&(i, c)| y[i] * c).sum(),
            ColRef::Unit(i) => y[i],
        }
    }

    /// Applies the elimination that maps the entering column to e_r.
    fn update_binv(&mut self, alpha: &[f64], r: usize) {
        let m = self.p.m;
        let d = alpha[r];
        for k in 0..m {
            let col = &mut self.binv[k * m..(k + 1) * m];
            let cr = col[r] / d;
            if cr == 0.0 {
                continue;
            }
            for i in 0..m {
                col[i] -= alpha[i] * cr;
            }
            col[r] = cr;
        }
        self.pivots_since_refactor += 1;
    }

    /// Total bound violation of the basic variables.
    fn infeasibility(&self) -> f64 {
        let mut s = 0.0;
        for (k, &j) in self.basis.basic.iter().enumerate() {
            let v = self.xb[k];
            if v < self.p.lo[j] {
                s += self.p.lo[j] - v;
            } else if v > self.p.hi[j] {
                s += v - self.p.hi[j];
            }
        }
        s
    }

    /// One primal phase. `phase1` prices the composite infeasibility
    /// gradient; otherwise the true costs. Returns the terminal status of
    /// the phase.
    fn primal(&mut self, phase1: bool) -> LpStatus {
        let m = self.p.m;
        let ncols = self.p.n + m;
        let mut y = vec![0.0; m];
        let mut g = vec![0.0; m];
        let mut alpha = vec![0.0; m];
        loop {
            self.iters += 1;
            if self.iters > self.opt.max_iters {
                return LpStatus::IterationLimit;
            }
            if self.pivots_since_refactor >= 64 {
                if !self.refactor() {
                    eprintln!("[lp-diag] mid-primal refactor singular at iter {}", self.iters);
                    return LpStatus::Numerical;
                }
                self.recompute_xb();
            }

            // Pricing gradient in basic space. Any bound violation switches
            // to the pure infeasibility gradient, even mid phase 2.
            let mut any_infeasible = false;
            for k in 0..m {
                let j = self.basis.basic[k];
                let v = self.xb[k];
                if v < self.p.lo[j] - self.opt.feas_tol || v > self.p.hi[j] + self.opt.feas_tol {
                    any_infeasible = true;
                    break;
                }
            }
            if phase1 && !any_infeasible {
                return LpStatus::Optimal;
            }
            let pricing_phase1 = phase1 || any_infeasible;
            for k in 0..m {
                let j = self.basis.basic[k];
                let v = self.xb[k];
                g[k] = if v < self.p.lo[j] - self.opt.feas_tol {
                    -1.0
                } else if v > self.p.hi[j] + self.opt.feas_tol {
                    1.0
                } else if pricing_phase1 {
                    0.0
                } else {
                    self.p.cost_of(j)
                };
            }
            self.btran(&g, &mut y);

            // Entering column: Dantzig on the violation magnitude, Bland
            // after a degenerate run.
            let bland = self.degenerate_run > (m + self.p.n) * 2;
            let mut enter = usize::MAX;
            let mut best = self.opt.cost_tol;
            for j in 0..ncols {
                let st = self.basis.state[j];
                if st == ColState::Basic || self.p.lo[j] == self.p.hi[j] {
                    continue;
                }
                let rc = if pricing_phase1 {
                    -self.dot_col(j, &y)
                } else {
                    self.p.cost_of(j) - self.dot_col(j, &y)
                };
                let score = match st {
                    ColState::AtLo => -rc,
                    ColState::AtHi => rc,
                    ColState::Basic => unreachable!(),
                };
                if score > best {
                    best = score;
                    enter = j;
                    if bland {
                        break;
                    }
                }
            }
            if enter == usize::MAX {
                return if pricing_phase1 {
                    LpStatus::Infeasible
                } else {
                    LpStatus::Optimal
                };
            }

            let delta = match self.basis.state[enter] {
                ColState::AtLo => 1.0,
                ColState::AtHi => -1.0,
                ColState::Basic => unreachable!(),
            };
            self.ftran(enter, &mut alpha);

            // Ratio test: first event among basics reaching a bound and the
            // entering column reaching its opposite bound.
            let span = self.p.hi[enter] - self.p.lo[enter];
            let mut t_best = if span.is_finite() { span } else { f64::INFINITY };
            let mut leave: usize = usize::MAX;
            for k in 0..m {
                let a = alpha[k];
                if a.abs() <= self.opt.pivot_tol {
                    continue;
                }
                let j = self.basis.basic[k];
                let v = self.xb[k];
                let rate = -delta * a;
                let (l, h) = (self.p.lo[j], self.p.hi[j]);
                // Target bound this basic runs into, honoring current
                // violations: a basic below range blocks at its lower
                // bound, one above range at its upper bound.
                let t = if v < l - self.opt.feas_tol {
                    if rate > 0.0 {
                        (l - v) / rate
                    } else {
                        continue;
                    }
                } else if v > h + self.opt.feas_tol {
                    if rate < 0.0 {
                        (h - v) / rate
                    } else {
                        continue;
                    }
                } else if rate > 0.0 {
                    if h.is_finite() {
                        ((h - v) / rate).max(0.0)
                    } else {
                        continue;
                    }
                } else if l.is_finite() {
                    ((v - l) / -rate).max(0.0)
                } else {
                    continue;
                };
                if t < t_best - 1e-12 || (t < t_best + 1e-12 && leave != usize::MAX && k < leave)
                {
                    t_best = t;
                    leave = k;
                }
            }

            if !t_best.is_finite() {
                if pricing_phase1 {
                    let amax = alpha.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                    eprintln!(
                        "[lp-diag] infinite ratio at iter {}: enter {} score {:.3e} span {:.3e} max|alpha| {:.3e} infeas {:.3e}",
                        self.iters, enter, best, span, amax, self.infeasibility()
                    );
                }
                return if pricing_phase1 {
                    LpStatus::Numerical
                } else {
                    LpStatus::Unbounded
                };
            }
            if t_best <= 1e-11 {
                self.degenerate_run += 1;
            } else {
                self.degenerate_run = 0;
            }

            // Move the basics.
            for k in 0..m {
                self.xb[k] -= delta * t_best * alpha[k];
            }
            if leave == usize::MAX {
                // Bound flip: the entering column crossed to its other
                // bound before any basic blocked.
                self.basis.state[enter] = match self.basis.state[enter] {
                    ColState::AtLo => ColState::AtHi,
                    ColState::AtHi => ColState::AtLo,
                    ColState::Basic => unreachable!(),
                };
            } else {
                let enter_val = self.nb_value(enter) + delta * t_best;
                let out = self.basis.basic[leave];
                let vout = self.xb[leave];
                // The leaving column rests on the bound it ran into.
                let to_hi = (vout - self.p.hi[out]).abs() <= (vout - self.p.lo[out]).abs();
                self.basis.state[out] = if to_hi { ColState::AtHi } else { ColState::AtLo };
                self.basis.state[enter] = ColState::Basic;
                self.xb[leave] = enter_val;
                self.update_binv(&alpha, leave);
                self.basis.basic[leave] = enter;
                self.pos[out] = usize::MAX;
                self.pos[enter] = leave;
            }
        }
    }

    fn extract(&self, status: LpStatus) -> LpSolution {
        let n = self.p.n;
        let mut x = vec![0.0; n];
        for (j, xv) in x.iter_mut().enumerate() {
            *xv = match self.basis.state[j] {
                ColState::Basic => self.xb[self.pos[j]],
                ColState::AtLo => self.p.lo[j],
                ColState::AtHi => self.p.hi[j],
            };
        }
        let objective = x
            .iter()
            .zip(&self.p.cost)
            .map(|(v, c)| v * c)
            .sum::<f64>();
        LpSolution {
            status,
            objective,
            x,
            basis: self.basis.clone(),
            iterations: self.iters,
        }
    }
}

/// Solves the problem, optionally warm-starting from a prior basis of the
/// same shape. Returns the terminal status with the best point found.
pub fn solve_lp(p: &LpProblem, warm: Option<&Basis>, opt: LpOptions) -> LpSolution {
    let mut basis = match warm {
        Some(b) if b.basic.len() == p.m && b.state.len() == p.n + p.m => b.clone(),
        _ => p.slack_basis(),
    };
    // A warm basis may rest nonbasic columns on bounds that are no longer
    // finite or ordered; snap those states.
    for j in 0..p.n + p.m {
        match basis.state[j] {
            ColState::AtLo if !p.lo[j].is_finite() => basis.state[j] = ColState::AtHi,
            ColState::AtHi if !p.hi[j].is_finite() => basis.state[j] = ColState::AtLo,
            _ => {}
        }
    }
    let mut s = Simplex::new(p, basis, opt);
    if !s.refactor() {
        // Singular warm basis: fall back to the slack basis.
        s = Simplex::new(p, p.slack_basis(), opt);
        if !s.refactor() {
            return s.extract(LpStatus::Numerical);
        }
    }
    s.recompute_xb();

    if s.infeasibility() > opt.feas_tol {
        match s.primal(true) {
            LpStatus::Optimal => {}
            other => return s.extract(other),
        }
    }
    // Guard against drift introduced by the composite phase.
    if !s.refactor() {
        return s.extract(LpStatus::Numerical);
    }
    s.recompute_xb();
    if s.infeasibility() > opt.feas_tol * 10.0 {
        match s.primal(true) {
            LpStatus::Optimal => {}
            other => return s.extract(other),
        }
    }
    let status = s.primal(false);
    s.extract(status)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn solve(
        lo: &[f64],
        hi: &[f64],
        cost: &[f64],
        rows: &[(Vec<(usize, f64)>, Sense, f64)],
    ) -> LpSolution {
        let borrowed: Vec<Row> = rows
            .iter()
            .map(|(c, s, r)| Row {
                coeffs: c,
                sense: *s,
                rhs: *r,
            })
            .collect();
        let p = LpProblem::new(lo, hi, cost, &borrowed);
        solve_lp(&p, None, LpOptions::default())
    }

    #[test]
    fn one_constraint_minimum_sits_on_the_better_vertex() {
        let sol = solve(
            &[0.0, 0.0],
            &[10.0, 10.0],
            &[-1.0, -2.0],
            &[(vec![(0, 1.0), (1, 1.0)], Sense::Le, 1.0)],
        );
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - -2.0).abs() < 1e-9);
        assert!((sol.x[0] - 0.0).abs() < 1e-9);
        assert!((sol.x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn contradictory_rows_report_infeasible() {
        let sol = solve(
            &[0.0],
            &[5.0],
            &[1.0],
            &[(vec![(0, 1.0)], Sense::Le, -1.0)],
        );
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn equality_rows_are_honored() {
        let sol = solve(
            &[0.0, 0.0],
            &[4.0, 4.0],
            &[1.0, 3.0],
            &[
                (vec![(0, 1.0), (1, 1.0)], Sense::Eq, 3.0),
                (vec![(0, 1.0), (1, -1.0)], Sense::Le, 1.0),
            ],
        );
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.x[0] + sol.x[1] - 3.0).abs() < 1e-8);
        // Cheapest split pushes x0 as high as the second row allows.
        assert!((sol.x[0] - 2.0).abs() < 1e-8, "x = {:?}", sol.x);
        assert!((sol.objective - 5.0).abs() < 1e-8);
    }

    #[test]
    fn nonzero_lower_bounds_shift_the_optimum() {
        let sol = solve(
            &[1.0, -2.0],
            &[3.0, 2.0],
            &[2.0, 1.0],
            &[(vec![(0, 1.0), (1, 1.0)], Sense::Ge, 0.5)],
        );
        assert_eq!(sol.status, LpStatus::Optimal);
        // x0 rests at its lower bound; x1 covers the remainder.
        assert!((sol.x[0] - 1.0).abs() < 1e-8);
        assert!((sol.x[1] - -0.5).abs() < 1e-8);
    }

    #[test]
    fn free_maximization_hits_the_variable_box() {
        // No rows at all: the minimum of -x is the upper bound.
        let sol = solve(&[0.0], &[7.5], &[-1.0], &[]);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.x[0] - 7.5).abs() < 1e-12);
    }

    /// Gaussian elimination with partial pivoting for the oracle.
    fn dense_solve(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
        let n = b.len();
        for k in 0..n {
            let mut piv = k;
            for r in k + 1..n {
                if a[r][k].abs() > a[piv][k].abs() {
                    piv = r;
                }
            }
            if a[piv][k].abs() < 1e-10 {
                return None;
            }
            a.swap(k, piv);
            b.swap(k, piv);
            for r in k + 1..n {
                let f = a[r][k] / a[k][k];
                if f == 0.0 {
                    continue;
                }
                for c in k..n {
                    a[r][c] -= f * a[k][c];
                }
                b[r] -= f * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for k in (0..n).rev() {
            let mut acc = b[k];
            for c in k + 1..n {
                acc -= a[k][c] * x[c];
            }
            x[k] = acc / a[k][k];
        }
        Some(x)
    }

    /// Brute-force vertex enumeration oracle: every choice of n active
    /// constraints among rows and bounds is intersected and checked.
    fn vertex_oracle(
        lo: &[f64],
        hi: &[f64],
        cost: &[f64],
        rows: &[(Vec<(usize, f64)>, Sense, f64)],
    ) -> Option<f64> {
        let n = lo.len();
        // Candidate active sets: rows as equalities plus single bounds.
        let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
        for (c, _, r) in rows {
            let mut dense = vec![0.0; n];
            for &(j, v) in c {
                dense[j] += v;
            }
            planes.push((dense, *r));
        }
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            planes.push((e.clone(), lo[j]));
            planes.push((e, hi[j]));
        }
        let ids: Vec<usize> = (0..planes.len()).collect();
        let mut best: Option<f64> = None;
        let mut pick = vec![0usize; n];
        fn combos(
            ids: &[usize],
            k: usize,
            start: usize,
            pick: &mut Vec<usize>,
            f: &mut impl FnMut(&[usize]),
        ) {
            if k == 0 {
                f(pick);
                return;
            }
            for idx in start..=ids.len().saturating_sub(k) {
                let at = pick.len() - k;
                pick[at] = ids[idx];
                combos(ids, k - 1, idx + 1, pick, f);
            }
        }
        let feas = |x: &[f64]| -> bool {
            for (j, &v) in x.iter().enumerate() {
                if v < lo[j] - 1e-7 || v > hi[j] + 1e-7 {
                    return false;
                }
            }
            for (c, s, r) in rows {
                let lhs: f64 = c.iter().map(|&(j, v)| v * x[j]).sum();
                let ok = match s {
                    Sense::Le => lhs <= r + 1e-7,
                    Sense::Ge => lhs >= r - 1e-7,
                    Sense::Eq => (lhs - r).abs() <= 1e-7,
                };
                if !ok {
                    return false;
                }
            }
            true
        };
        combos(&ids, n, 0, &mut pick, &mut |active: &[usize]| {
            let mut a: Vec<Vec<f64>> = active.iter().map(|&i| planes[i].0.clone()).collect();
            let mut b: Vec<f64> = active.iter().map(|&i| planes[i].1).collect();
            if let Some(x) = dense_solve(&mut a, &mut b) {
                if feas(&x) {
                    let obj: f64 = x.iter().zip(cost).map(|(v, c)| v * c).sum();
                    best = Some(best.map_or(obj, |b: f64| b.min(obj)));
                }
            }
        });
        best
    }

    #[test]
    fn fifty_random_programs_match_the_vertex_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for case in 0..50 {
            let n = rng.random_range(2..=4);
            let m = rng.random_range(1..=5);
            let lo: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..0.0)).collect();
            let hi: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..3.0)).collect();
            let cost: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            // A random interior point keeps every instance feasible.
            let x0: Vec<f64> = (0..n)
                .map(|j| {
                    let t: f64 = rng.random_range(0.2..0.8);
                    lo[j] + t * (hi[j] - lo[j])
                })
                .collect();
            let mut rows = Vec::new();
            for _ in 0..m {
                let coeffs: Vec<(usize, f64)> = (0..n)
                    .map(|j| (j, rng.random_range(-1.0..1.0)))
                    .collect();
                let act: f64 = coeffs.iter().map(|&(j, c)| c * x0[j]).sum();
                let slack: f64 = rng.random_range(0.05..1.0);
                rows.push((coeffs, Sense::Le, act + slack));
            }
            let sol = solve(&lo, &hi, &cost, &rows);
            assert_eq!(sol.status, LpStatus::Optimal, "case {case}");
            let oracle = vertex_oracle(&lo, &hi, &cost, &rows).expect("feasible by design");
            assert!(
                (sol.objective - oracle).abs() <= 1e-6 * (1.0 + oracle.abs()),
                "case {case}: simplex {} vs oracle {}",
                sol.objective,
                oracle
            );
        }
    }

    #[test]
    fn warm_start_reuses_the_parent_basis() {
        let rows = vec![
            (vec![(0, 1.0), (1, 2.0)], Sense::Le, 4.0),
            (vec![(0, 3.0), (1, 1.0)], Sense::Le, 6.0),
        ];
        let borrowed: Vec<Row> = rows
            .iter()
            .map(|(c, s, r)| Row {
                coeffs: c,
                sense: *s,
                rhs: *r,
            })
            .collect();
        let p = LpProblem::new(&[0.0, 0.0], &[5.0, 5.0], &[-1.0, -1.0], &borrowed);
        let cold = solve_lp(&p, None, LpOptions::default());
        assert_eq!(cold.status, LpStatus::Optimal);

        // Perturb the rhs slightly; the optimal basis carries over.
        let rows2 = vec![
            (vec![(0, 1.0), (1, 2.0)], Sense::Le, 4.1),
            (vec![(0, 3.0), (1, 1.0)], Sense::Le, 5.9),
        ];
        let borrowed2: Vec<Row> = rows2
            .iter()
            .map(|(c, s, r)| Row {
                coeffs: c,
                sense: *s,
                rhs: *r,
            })
            .collect();
        let p2 = LpProblem::new(&[0.0, 0.0], &[5.0, 5.0], &[-1.0, -1.0], &borrowed2);
        let warm = solve_lp(&p2, Some(&cold.basis), LpOptions::default());
        assert_eq!(warm.status, LpStatus::Optimal);
        assert!(warm.iterations <= cold.iterations);
        let cold2 = solve_lp(&p2, None, LpOptions::default());
        assert!((warm.objective - cold2.objective).abs() < 1e-9);
    }

    #[test]
    fn degenerate_overlapping_rows_still_terminate() {
        // Many rows active at the same vertex force degenerate pivots.
        let rows = vec![
            (vec![(0, 1.0), (1, 1.0)], Sense::Le, 1.0),
            (vec![(0, 2.0), (1, 2.0)], Sense::Le, 2.0),
            (vec![(0, 1.0), (1, 1.0)], Sense::Ge, 1.0),
            (vec![(0, 1.0), (1, -1.0)], Sense::Le, 1.0),
        ];
        let sol = solve(&[0.0, 0.0], &[1.0, 1.0], &[1.0, 2.0], &rows);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-8, "{}", sol.objective);
        assert!((sol.x[0] - 1.0).abs() < 1e-8);
    }
}
