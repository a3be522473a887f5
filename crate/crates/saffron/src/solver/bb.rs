//! Best-first branch and bound over the mixed-integer bilinear model.
//!
//! Nodes order by lowest relaxation bound with node id as the tie-break, so
//! the search sequence is a pure function of the model and options. Each
//! node reconstructs its box from the ancestor bound changes, tightens it by
//! interval propagation, rebuilds the product envelopes over the tightened
//! box, and solves the LP warm-started from the parent basis. Branching
//! fixes the most fractional binary; once the binaries are integral the
//! largest product violation is branched spatially at the LP point, clamped
//! away from the box edges so the envelopes shrink geometrically.
//!
//! Incumbents come either from LP points that already satisfy every product
//! equality or from a restoration pass that fixes the binaries and
//! substitutes mixture ratios until the flows agree with them; every
//! incumbent must pass the independent verifier before it is accepted.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::io::Write;
use std::rc::Rc;
use std::time::Instant;

use crate::algebra::{Exactness, ModelIR, VarId, VarKind};

use super::bounds::{propagate_bounds, BoundBox, PropagationOutcome};
use super::lp::{solve_lp, Basis, LpOptions, LpProblem, LpStatus, Row};
use super::relax::relax_bilinear;
use super::verify::{verify_solution, VerifierReport};

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Terminate when (incumbent - bound) / |incumbent| falls below this.
    pub rel_gap: f64,
    pub abs_gap: f64,
    pub node_limit: usize,
    pub time_limit: Option<f64>,
    /// Distance from an integer accepted as integral.
    pub int_tol: f64,
    pub lp: LpOptions,
    pub propagation_passes: usize,
    pub restoration_rounds: usize,
    /// Starting point whose binary pattern seeds the first incumbent try.
    pub warm_start: Option<Vec<f64>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            rel_gap: 1e-4,
            abs_gap: 1e-9,
            node_limit: 200_000,
            time_limit: None,
            int_tol: 1e-6,
            lp: LpOptions::default(),
            propagation_passes: 20,
            restoration_rounds: 50,
            warm_start: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    /// Incumbent proven within the gap tolerances.
    Optimal,
    /// A verified incumbent exists but a resource limit stopped the proof.
    Feasible,
    Infeasible,
    /// A resource limit hit before any incumbent was found.
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub status: SolveStatus,
    /// Incumbent objective; infinite when no incumbent exists.
    pub objective: f64,
    pub best_bound: f64,
    /// Relative gap at termination.
    pub gap: f64,
    /// Values for every model variable; empty without an incumbent.
    pub x: Vec<f64>,
    pub verifier: Option<VerifierReport>,
    pub nodes: usize,
}

/// Total order for f64 keys in the node heap.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64);
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

struct NodeData {
    parent: Option<usize>,
    /// Bound overrides this node adds on top of its ancestors.
    change: Vec<(VarId, f64, f64)>,
    depth: usize,
    basis: Option<Rc<Basis>>,
}

struct Search<'m> {
    model: &'m ModelIR,
    opts: SolveOptions,
    root_box: BoundBox,
    nodes: Vec<NodeData>,
    heap: BinaryHeap<Reverse<(Key, usize)>>,
    incumbent: Option<(f64, Vec<f64>, VerifierReport)>,
    /// Chosen substitution factor per registered product, for restoration.
    ratio_factor: Vec<VarId>,
    processed: usize,
}

impl<'m> Search<'m> {
    /// Reconstructs the node box by replaying ancestor changes over the
    /// root box, oldest first.
    fn node_box(&self, id: usize) -> BoundBox {
        let mut chain = Vec::new();
        let mut cur = Some(id);
        while let Some(i) = cur {
            chain.push(i);
            cur = self.nodes[i].parent;
        }
        let mut bx = self.root_box.clone();
        for &i in chain.iter().rev() {
            for &(v, lo, hi) in &self.nodes[i].change {
                bx[v] = (bx[v].0.max(lo), bx[v].1.min(hi));
            }
        }
        bx
    }

    fn cutoff(&self) -> f64 {
        match &self.incumbent {
            Some((obj, _, _)) => obj - self.opts.abs_gap.max(self.opts.rel_gap * obj.abs()),
            None => f64::INFINITY,
        }
    }

    fn build_lp(&self, bx: &BoundBox) -> LpProblem {
        let n = self.model.vars.len();
        let mut cost = vec![0.0; n];
        for &(j, c) in &self.model.objective {
            cost[j] += c;
        }
        let lo: Vec<f64> = bx.iter().map(|b| b.0).collect();
        let hi: Vec<f64> = bx.iter().map(|b| b.1).collect();
        let relaxed = relax_bilinear(self.model, bx);
        let mut rows: Vec<Row> = Vec::with_capacity(self.model.cons.len() + relaxed.rows.len());
        for con in &self.model.cons {
            rows.push(Row {
                coeffs: &con.coeffs,
                sense: con.sense,
                rhs: con.rhs,
            });
        }
        for r in &relaxed.rows {
            rows.push(Row {
                coeffs: &r.coeffs,
                sense: r.sense,
                rhs: r.rhs,
            });
        }
        LpProblem::new(&lo, &hi, &cost, &rows)
    }

    /// The most fractional unfixed binary at the LP point, if any.
    fn fractional_binary(&self, bx: &BoundBox, x: &[f64]) -> Option<VarId> {
        let mut best: Option<(f64, VarId)> = None;
        for (j, v) in self.model.vars.iter().enumerate() {
            if v.kind != VarKind::Binary || bx[j].0 == bx[j].1 {
                continue;
            }
            let frac = (x[j] - x[j].round()).abs();
            if frac <= self.opts.int_tol {
                continue;
            }
            let score = frac.min(1.0 - frac);
            if best.map_or(true, |(b, _)| score > b + 1e-12) {
                best = Some((score, j));
            }
        }
        best.map(|(_, j)| j)
    }

    /// The registered product with the largest scaled violation.
    fn worst_product(&self, x: &[f64]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, bl) in self.model.bilinears.iter().enumerate() {
            let viol = (x[bl.product] - x[bl.a] * x[bl.b]).abs()
                / (1.0 + x[bl.a].abs() + x[bl.b].abs());
            if best.map_or(true, |(_, b)| viol > b + 1e-15) {
                best = Some((i, viol));
            }
        }
        best
    }

    fn try_incumbent(&mut self, x: Vec<f64>, log: &mut dyn Write) {
        let obj = self.model.eval_objective(&x);
        if let Some((best, _, _)) = &self.incumbent {
            if obj >= *best - 1e-12 {
                return;
            }
        }
        let report = verify_solution(self.model, &x);
        if report.pass {
            let _ = writeln!(log, "incumbent objective {obj:.9e}");
            self.incumbent = Some((obj, x, report));
        }
    }

    /// Fix binaries and substitute mixture ratios until the LP point agrees
    /// with every product, then hand the point to the verifier.
    fn restore(&mut self, bx: &BoundBox, x0: &[f64], log: &mut dyn Write) {
        let mut bx = bx.clone();
        for (j, v) in self.model.vars.iter().enumerate() {
            if v.kind == VarKind::Binary {
                let r = x0[j].round().clamp(bx[j].0, bx[j].1);
                bx[j] = (r, r);
            }
        }
        if propagate_bounds(self.model, &mut bx, self.opts.propagation_passes)
            == PropagationOutcome::Empty
        {
            return;
        }

        // Current ratio guesses, seeded from the LP point.
        let conts: Vec<usize> = self
            .model
            .bilinears
            .iter()
            .enumerate()
            .filter(|(_, bl)| bl.exactness == Exactness::McCormick)
            .map(|(i, _)| i)
            .collect();
        let mut ratios: Vec<(VarId, f64)> = Vec::new();
        let mut seen = vec![false; self.model.vars.len()];
        for &i in &conts {
            let f = self.ratio_factor[i];
            if !seen[f] {
                seen[f] = true;
                ratios.push((f, x0[f].clamp(bx[f].0, bx[f].1)));
            }
        }

        let mut basis: Option<Basis> = None;
        let mut point: Option<Vec<f64>> = None;
        for _round in 0..self.opts.restoration_rounds {
            let mut fixed = bx.clone();
            for &(f, v) in &ratios {
                let v = v.clamp(bx[f].0, bx[f].1);
                fixed[f] = (v, v);
            }
            if propagate_bounds(self.model, &mut fixed, self.opts.propagation_passes)
                == PropagationOutcome::Empty
            {
                return;
            }
            let p = self.build_lp(&fixed);
            let sol = solve_lp(&p, basis.as_ref(), self.opts.lp);
            if sol.status != LpStatus::Optimal {
                return;
            }
            basis = Some(sol.basis.clone());

            // Next ratio estimates from the most informative product each
            // factor participates in.
            let mut shift = 0.0;
            let mut next = ratios.clone();
            for (f, value) in next.iter_mut() {
                let mut best_partner = 0.0;
                let mut estimate = *value;
                for bl in &self.model.bilinears {
                    if bl.exactness != Exactness::McCormick {
                        continue;
                    }
                    let partner = if bl.a == *f {
                        bl.b
                    } else if bl.b == *f {
                        bl.a
                    } else {
                        continue;
                    };
                    let pv = sol.x[partner].abs();
                    if pv > best_partner && pv > 1e-7 {
                        best_partner = pv;
                        estimate = sol.x[bl.product] / sol.x[partner];
                    }
                }
                let estimate = estimate.clamp(bx[*f].0, bx[*f].1);
                shift = f64::max(shift, (estimate - *value).abs());
                *value = estimate;
            }
            point = Some(sol.x);
            ratios = next;
            if shift <= 1e-8 {
                break;
            }
        }
        if let Some(mut x) = point {
            // Snap the substituted ratios onto the point they converged to.
            for &(f, v) in &ratios {
                x[f] = v.clamp(bx[f].0, bx[f].1);
            }
            self.try_incumbent(x, log);
        }
    }
}

/// Chooses which factor of each product restoration substitutes: prefer the
/// factor shaped like a fraction (unit-interval box), then the narrower one.
fn pick_ratio_factors(model: &ModelIR) -> Vec<VarId> {
    model
        .bilinears
        .iter()
        .map(|bl| {
            let (a, b) = (&model.vars[bl.a], &model.vars[bl.b]);
            let unit = |v: &crate::algebra::Var| v.lo >= -1e-9 && v.hi <= 1.0 + 1e-6;
            match (unit(a), unit(b)) {
                (true, false) => bl.a,
                (false, true) => bl.b,
                _ => {
                    if (a.hi - a.lo) <= (b.hi - b.lo) {
                        bl.a
                    } else {
                        bl.b
                    }
                }
            }
        })
        .collect()
}

/// Solves the model to the configured gap. `log` receives one line per node
/// with bound, incumbent, and gap.
pub fn solve_miqcp(
    model: &ModelIR,
    opts: &SolveOptions,
    log: Option<&mut dyn Write>,
) -> Solution {
    let mut sink = std::io::sink();
    let log: &mut dyn Write = match log {
        Some(w) => w,
        None => &mut sink,
    };
    let started = Instant::now();

    let mut root_box: BoundBox = model.vars.iter().map(|v| (v.lo, v.hi)).collect();
    if propagate_bounds(model, &mut root_box, opts.propagation_passes)
        == PropagationOutcome::Empty
    {
        return Solution {
            status: SolveStatus::Infeasible,
            objective: f64::INFINITY,
            best_bound: f64::INFINITY,
            gap: 0.0,
            x: Vec::new(),
            verifier: None,
            nodes: 0,
        };
    }

    let mut s = Search {
        model,
        opts: opts.clone(),
        root_box,
        nodes: Vec::new(),
        heap: BinaryHeap::new(),
        incumbent: None,
        ratio_factor: pick_ratio_factors(model),
        processed: 0,
    };

    // A caller-provided point seeds the incumbent before the search.
    if let Some(warm) = opts.warm_start.clone() {
        if warm.len() == model.vars.len() {
            let bx = s.root_box.clone();
            s.restore(&bx, &warm, log);
        }
    }

    s.nodes.push(NodeData {
        parent: None,
        change: Vec::new(),
        depth: 0,
        basis: None,
    });
    s.heap.push(Reverse((Key(f64::NEG_INFINITY), 0)));

    let mut best_bound = f64::NEG_INFINITY;
    let mut limit_hit = false;

    while let Some(&Reverse((Key(top), _))) = s.heap.peek() {
        best_bound = top.max(best_bound);
        if let Some((inc, _, _)) = &s.incumbent {
            let gap = (inc - best_bound) / inc.abs().max(1e-9);
            if gap <= s.opts.rel_gap || inc - best_bound <= s.opts.abs_gap {
                break;
            }
        }
        if s.processed >= s.opts.node_limit {
            limit_hit = true;
            break;
        }
        if let Some(tl) = s.opts.time_limit {
            if started.elapsed().as_secs_f64() > tl {
                limit_hit = true;
                break;
            }
        }

        let Reverse((Key(bound), id)) = s.heap.pop().unwrap();
        s.processed += 1;
        if bound >= s.cutoff() {
            let _ = writeln!(log, "node {id} pruned by bound {bound:.9e}");
            continue;
        }

        let mut bx = s.node_box(id);
        if propagate_bounds(model, &mut bx, s.opts.propagation_passes)
            == PropagationOutcome::Empty
        {
            let _ = writeln!(log, "node {id} pruned by propagation");
            continue;
        }

        let p = s.build_lp(&bx);
        let warm = s.nodes[id].basis.clone();
        let mut sol = solve_lp(&p, warm.as_deref(), s.opts.lp);
        if sol.status == LpStatus::Numerical || sol.status == LpStatus::IterationLimit {
            // Retry cold before surfacing the failure.
            sol = solve_lp(&p, None, s.opts.lp);
        }
        match sol.status {
            LpStatus::Infeasible => {
                let _ = writeln!(log, "node {id} infeasible");
                continue;
            }
            LpStatus::Optimal => {}
            other => {
                let _ = writeln!(log, "node {id} abandoned: lp status {other:?}");
                limit_hit = true;
                break;
            }
        }
        let node_bound = sol.objective.max(bound);
        if node_bound >= s.cutoff() {
            let _ = writeln!(log, "node {id} pruned after lp {node_bound:.9e}");
            continue;
        }

        let inc_str = match &s.incumbent {
            Some((o, _, _)) => format!("{o:.9e}"),
            None => "-".into(),
        };
        let _ = writeln!(
            log,
            "node {id} depth {} bound {node_bound:.9e} incumbent {inc_str}",
            s.nodes[id].depth
        );

        let basis = Rc::new(sol.basis.clone());
        let depth = s.nodes[id].depth + 1;

        if let Some(j) = s.fractional_binary(&bx, &sol.x) {
            for (lo, hi) in [(0.0, 0.0), (1.0, 1.0)] {
                let nid = s.nodes.len();
                s.nodes.push(NodeData {
                    parent: Some(id),
                    change: vec![(j, lo, hi)],
                    depth,
                    basis: Some(basis.clone()),
                });
                s.heap.push(Reverse((Key(node_bound), nid)));
            }
            continue;
        }

        // Binaries integral: either the point already satisfies the
        // products, or restoration plus a spatial split take over.
        let worst = s.worst_product(&sol.x);
        match worst {
            None => {
                s.try_incumbent(sol.x, log);
                continue;
            }
            Some((_, viol)) if viol <= 1e-7 => {
                let mut x = sol.x;
                for (j, v) in model.vars.iter().enumerate() {
                    if v.kind == VarKind::Binary {
                        x[j] = x[j].round();
                    }
                }
                // Snap the products exactly onto their factors.
                for bl in &model.bilinears {
                    x[bl.product] = x[bl.a] * x[bl.b];
                }
                s.try_incumbent(x, log);
                continue;
            }
            Some((i, _)) => {
                s.restore(&bx, &sol.x, log);
                if node_bound >= s.cutoff() {
                    continue;
                }
                let bl = s.model.bilinears[i];
                // Split the wider factor at the LP point, clamped inside.
                let (wa, wb) = (bx[bl.a].1 - bx[bl.a].0, bx[bl.b].1 - bx[bl.b].0);
                let f = if wa >= wb { bl.a } else { bl.b };
                let (lo, hi) = bx[f];
                let split = sol.x[f].clamp(lo + 0.2 * (hi - lo), lo + 0.8 * (hi - lo));
                for (clo, chi) in [(lo, split), (split, hi)] {
                    let nid = s.nodes.len();
                    s.nodes.push(NodeData {
                        parent: Some(id),
                        change: vec![(f, clo, chi)],
                        depth,
                        basis: Some(basis.clone()),
                    });
                    s.heap.push(Reverse((Key(node_bound), nid)));
                }
            }
        }
    }

    if s.heap.is_empty() && !limit_hit {
        best_bound = match &s.incumbent {
            Some((obj, _, _)) => *obj,
            None => f64::INFINITY,
        };
    }

    let nodes = s.processed;
    match s.incumbent {
        Some((obj, x, report)) => {
            let gap = ((obj - best_bound) / obj.abs().max(1e-9)).max(0.0);
            let proven = gap <= opts.rel_gap || obj - best_bound <= opts.abs_gap;
            let _ = writeln!(
                log,
                "done objective {obj:.9e} bound {best_bound:.9e} gap {gap:.3e} nodes {nodes}"
            );
            Solution {
                status: if proven {
                    SolveStatus::Optimal
                } else {
                    SolveStatus::Feasible
                },
                objective: obj,
                best_bound,
                gap,
                x,
                verifier: Some(report),
                nodes,
            }
        }
        None => {
            let status = if limit_hit {
                SolveStatus::IterationLimit
            } else {
                SolveStatus::Infeasible
            };
            let _ = writeln!(log, "done without incumbent: {status:?}");
            Solution {
                status,
                objective: f64::INFINITY,
                best_bound,
                gap: f64::INFINITY,
                x: Vec::new(),
                verifier: None,
                nodes,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Family, ModelIR, Sense, VarKind};

    fn solve(model: &ModelIR) -> Solution {
        let opts = SolveOptions {
            rel_gap: 1e-6,
            ..Default::default()
        };
        solve_miqcp(model, &opts, None)
    }

    #[test]
    fn bilinear_peak_is_found() {
        // max z with z = x y, x + y <= 1: optimum 0.25 at (0.5, 0.5).
        let mut m = ModelIR::default();
        let x = m.push_var(VarKind::Continuous, 0.0, 1.0, "x".into());
        let y = m.push_var(VarKind::Continuous, 0.0, 1.0, "y".into());
        let z = m.product_of(x, y);
        m.push_con(
            "cap".into(),
            Family::MassConservation,
            vec![(x, 1.0), (y, 1.0)],
            Sense::Le,
            1.0,
        );
        m.objective = vec![(z, -1.0)];
        let sol = solve(&m);
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective - -0.25).abs() < 1e-5, "{}", sol.objective);
        assert!((sol.x[x] - 0.5).abs() < 1e-3);
        assert!((sol.x[y] - 0.5).abs() < 1e-3);
        assert!(sol.verifier.as_ref().unwrap().pass);
    }

    #[test]
    fn knapsack_enumeration_matches() {
        // max 3a + 2b subject to 2a + b <= 2 over binaries: optimum 3.
        let mut m = ModelIR::default();
        let a = m.push_var(VarKind::Binary, 0.0, 1.0, "a".into());
        let b = m.push_var(VarKind::Binary, 0.0, 1.0, "b".into());
        m.push_con(
            "cap".into(),
            Family::MassConservation,
            vec![(a, 2.0), (b, 1.0)],
            Sense::Le,
            2.0,
        );
        m.objective = vec![(a, -3.0), (b, -2.0)];
        let sol = solve(&m);
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective - -3.0).abs() < 1e-9);
        assert!((sol.x[a] - 1.0).abs() < 1e-9);
        assert!(sol.x[b].abs() < 1e-9);
    }

    #[test]
    fn cheaper_of_two_routes_wins() {
        // Two processes can serve a demand of 10; unit costs 1 and 2, with
        // a fixed activation cost tied to each binary.
        let mut m = ModelIR::default();
        let y1 = m.push_var(VarKind::Binary, 0.0, 1.0, "y1".into());
        let y2 = m.push_var(VarKind::Binary, 0.0, 1.0, "y2".into());
        let f1 = m.push_var(VarKind::Continuous, 0.0, 10.0, "f1".into());
        let f2 = m.push_var(VarKind::Continuous, 0.0, 10.0, "f2".into());
        m.push_con(
            "demand".into(),
            Family::ProductionTarget,
            vec![(f1, 1.0), (f2, 1.0)],
            Sense::Eq,
            10.0,
        );
        m.push_con(
            "gate1".into(),
            Family::ActivationGate,
            vec![(f1, 1.0), (y1, -10.0)],
            Sense::Le,
            0.0,
        );
        m.push_con(
            "gate2".into(),
            Family::ActivationGate,
            vec![(f2, 1.0), (y2, -10.0)],
            Sense::Le,
            0.0,
        );
        m.objective = vec![(f1, 1.0), (f2, 2.0), (y1, 0.5), (y2, 0.5)];
        let sol = solve(&m);
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective - 10.5).abs() < 1e-6, "{}", sol.objective);
        assert!((sol.x[f1] - 10.0).abs() < 1e-6);
        assert!(sol.x[f2].abs() < 1e-6);
    }

    #[test]
    fn infeasible_model_is_reported() {
        let mut m = ModelIR::default();
        let x = m.push_var(VarKind::Continuous, 0.0, 1.0, "x".into());
        m.push_con(
            "too_much".into(),
            Family::ProductionTarget,
            vec![(x, 1.0)],
            Sense::Ge,
            2.0,
        );
        m.objective = vec![(x, 1.0)];
        let sol = solve(&m);
        assert_eq!(sol.status, SolveStatus::Infeasible);
    }

    #[test]
    fn binary_times_flow_is_exact_without_spatial_work() {
        // z = y f with binary y: choosing y = 1 pays 1 but unlocks profit
        // 2 f; optimum turns the unit on at full flow.
        let mut m = ModelIR::default();
        let y = m.push_var(VarKind::Binary, 0.0, 1.0, "y".into());
        let f = m.push_var(VarKind::Continuous, 0.0, 2.0, "f".into());
        let z = m.product_of(y, f);
        m.objective = vec![(z, -2.0), (y, 1.0)];
        let sol = solve(&m);
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective - -3.0).abs() < 1e-6, "{}", sol.objective);
        assert!((sol.x[z] - 2.0).abs() < 1e-6);
    }

    // Temporary diagnostic for the desk-scale root relaxation; run with
    // `cargo test -p saffron --lib -- --ignored desk_root --nocapture`.
    #[test]
    #[ignore]
    fn desk_root_lp_probe() {
        use std::time::Instant;

        let toml = r#"
name = "desk-probe"
seed = 0

[superstructure]
builtin = "ft-saf-desk"

[networks.gasification]
oracle = "gasification"
samples = 1500
epochs = 150

[networks.rwgs]
oracle = "rwgs"
samples = 800
epochs = 100

[networks.ft]
oracle = "ft"
samples = 1000
epochs = 150

[solver]
rel_gap = 5e-3

[model.frozen]
"Gasification.4" = 0.5
"Gasification.5" = 0.2
"Gasification.6" = 0.15
"Gasification.7" = 1050.0
"RWGS.1" = 950.0
"RWGS.2" = 0.1
"FT.1" = 220.0
"FT.2" = 35.0
"FT.3" = 0.13
"#;
        let cfg = crate::scenario::ScenarioConfig::from_toml(toml, "probe").unwrap();
        let t0 = Instant::now();
        let prep = crate::scenario::prepare(&cfg, std::path::Path::new(".")).unwrap();
        let model = &prep.model;
        eprintln!(
            "[probe] prepared in {:.1}s: {} vars, {} rows, {} products",
            t0.elapsed().as_secs_f64(),
            model.vars.len(),
            model.cons.len(),
            model.bilinears.len()
        );

        let mut bx: BoundBox = model.vars.iter().map(|v| (v.lo, v.hi)).collect();
        let t0 = Instant::now();
        let out = propagate_bounds(model, &mut bx, 20);
        eprintln!(
            "[probe] propagation {:?} in {:.2}s",
            out,
            t0.elapsed().as_secs_f64()
        );

        // Bound magnitude census after propagation.
        let mut wide: Vec<(f64, usize)> = Vec::new();
        let mut infinite = 0usize;
        for (j, &(lo, hi)) in bx.iter().enumerate() {
            let mag = lo.abs().max(hi.abs());
            if !mag.is_finite() {
                infinite += 1;
            } else if mag > 1e6 {
                wide.push((mag, j));
            }
        }
        wide.sort_by(|a, b| b.0.total_cmp(&a.0));
        eprintln!(
            "[probe] bounds: {} infinite, {} over 1e6",
            infinite,
            wide.len()
        );
        for &(mag, j) in wide.iter().take(30) {
            eprintln!(
                "[probe]   |bound| {:9.3e}  {} in [{:.3e}, {:.3e}]",
                mag, model.vars[j].name, bx[j].0, bx[j].1
            );
        }

        // Coefficient magnitude census over model rows and envelope rows.
        let relaxed = relax_bilinear(model, &bx);
        let mut cmin = f64::INFINITY;
        let mut cmax: f64 = 0.0;
        let mut big_rows: Vec<(f64, String)> = Vec::new();
        let mut scan = |coeffs: &[(usize, f64)], name: &str| {
            let mut row_max: f64 = 0.0;
            for &(_, c) in coeffs {
                let a = c.abs();
                if a > 0.0 {
                    cmin = cmin.min(a);
                    cmax = cmax.max(a);
                    row_max = row_max.max(a);
                }
            }
            if row_max > 1e4 {
                big_rows.push((row_max, name.to_string()));
            }
        };
        for con in &model.cons {
            scan(&con.coeffs, &con.name);
        }
        for (i, r) in relaxed.rows.iter().enumerate() {
            scan(&r.coeffs, &format!("envelope[{i}]"));
        }
        big_rows.sort_by(|a, b| b.0.total_cmp(&a.0));
        eprintln!(
            "[probe] coefficients: min {:.3e} max {:.3e}, {} rows over 1e4",
            cmin,
            cmax,
            big_rows.len()
        );
        for (mag, name) in big_rows.iter().take(20) {
            eprintln!("[probe]   row max {mag:9.3e}  {name}");
        }

        // Root LP, cold start, with the solver's default tolerances.
        let n = model.vars.len();
        let mut cost = vec![0.0; n];
        for &(j, c) in &model.objective {
            cost[j] += c;
        }
        let lo: Vec<f64> = bx.iter().map(|b| b.0).collect();
        let hi: Vec<f64> = bx.iter().map(|b| b.1).collect();
        let mut rows: Vec<Row> = Vec::new();
        for con in &model.cons {
            rows.push(Row {
                coeffs: &con.coeffs,
                sense: con.sense,
                rhs: con.rhs,
            });
        }
        for r in &relaxed.rows {
            rows.push(Row {
                coeffs: &r.coeffs,
                sense: r.sense,
                rhs: r.rhs,
            });
        }
        let p = LpProblem::new(&lo, &hi, &cost, &rows);
        eprintln!("[probe] lp: {} structural, {} rows", n, rows.len());
        let t0 = Instant::now();
        let sol = solve_lp(&p, None, prep.options.lp);
        eprintln!(
            "[probe] root lp {:?} after {} iters in {:.1}s, objective {:.6e}",
            sol.status,
            sol.iterations,
            t0.elapsed().as_secs_f64(),
            sol.objective
        );
    }

    #[test]
    fn node_sequence_is_deterministic() {
        let mut m = ModelIR::default();
        let x = m.push_var(VarKind::Continuous, 0.0, 1.0, "x".into());
        let y = m.push_var(VarKind::Continuous, 0.0, 1.0, "y".into());
        let z = m.product_of(x, y);
        m.push_con(
            "cap".into(),
            Family::MassConservation,
            vec![(x, 1.0), (y, 2.0)],
            Sense::Le,
            1.5,
        );
        m.objective = vec![(z, -1.0), (x, 0.1)];
        let opts = SolveOptions {
            rel_gap: 1e-6,
            ..Default::default()
        };
        let mut log1 = Vec::new();
        let mut log2 = Vec::new();
        let s1 = solve_miqcp(&m, &opts, Some(&mut log1));
        let s2 = solve_miqcp(&m, &opts, Some(&mut log2));
        assert_eq!(log1, log2);
        assert_eq!(s1.nodes, s2.nodes);
        assert_eq!(s1.objective.to_bits(), s2.objective.to_bits());
    }
}
