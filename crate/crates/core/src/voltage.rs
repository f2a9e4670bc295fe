//! Voltage assignment by convex-cost flow.
//!
//! The timing-constrained power minimisation is posed on a split DAG where
//! every module `i` becomes an input node `I_i` and an output node `O_i`, with
//! the module delay carried by the edge `I_i -> O_i`. Dualising the arrival
//! time constraints gives a min-cost circulation whose arcs are the linear
//! pieces of the conjugates of the per-edge cost functions; the node
//! potentials of an optimal circulation, read off by a shortest path search in
//! the residual network, are (negated) arrival times, and the potential drop
//! across an `I_i -> O_i` edge is the delay budget of module `i`.
//!
//! Residual distances `d(v)` relate to arrival times by `mu(v) = -d(v)`, so the
//! budget of module `i` is `d(I_i) - d(O_i) = mu(O_i) - mu(I_i)`.
//!
//! The flow problem is the continuous relaxation of the discrete choice of one
//! curve point per module. Snapping every budget down to the nearest curve
//! point keeps the schedule feasible but is not always optimal, so
//! [`solve_voltage_assignment`] wraps the relaxation in a branch and bound
//! that splits the point range of a module whose budget falls strictly between
//! two points. The relaxation value is a valid lower bound for every subtree.

use crate::cbl::Floorplan;
use crate::error::{Error, Result};
use crate::flow::{min_cost_flow, residual_shortest_paths, FlowNetwork};
use crate::model::{Delay, DpCurve, Power, TimingDag, VoltageAssignment};

/// `delay = delta * len`, rounded half up, with pins at room centers.
pub fn edge_delays(fp: &Floorplan, dag: &TimingDag) -> Vec<Delay> {
    dag.edges()
        .iter()
        .map(|e| {
            let a = fp.module_center(e.from);
            let b = fp.module_center(e.to);
            scale_length((a.0 - b.0).abs() + (a.1 - b.1).abs(), dag.delta)
        })
        .collect()
}

pub fn scale_length(len: f64, delta: f64) -> Delay {
    (delta * len + 0.5 + 1e-9).floor() as Delay
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Ok,
    /// Index of the first edge whose delay alone reaches the clock period.
    Infeasible(usize),
}

/// Rejects floorplans in which some single interconnect already uses the
/// whole clock period.
pub fn feasibility_gate(delays: &[Delay], t_cycle: Delay) -> Gate {
    match delays.iter().position(|&d| d >= t_cycle) {
        Some(i) => Gate::Infeasible(i),
        None => Gate::Ok,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeClass {
    /// `I_i -> O_i`, carries the module delay.
    Module,
    /// Interconnect `O_i -> I_j`, or `O_i -> t` with zero delay.
    Interconnect,
    /// `s -> I_i` for source modules, and `s -> t`.
    Auxiliary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitEdge {
    pub from: usize,
    pub to: usize,
    pub class: EdgeClass,
    /// Module for [`EdgeClass::Module`] edges.
    pub module: Option<usize>,
    /// Index into [`TimingDag::edges`] for interconnects between modules.
    pub dag_edge: Option<usize>,
}

/// The DAG with start and end nodes added and every module split in two.
///
/// Node layout: `s = 0`, `t = 1`, `I_i = 2 + 2i`, `O_i = 3 + 2i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitDag {
    num_modules: usize,
    edges: Vec<SplitEdge>,
}

impl SplitDag {
    pub const SOURCE: usize = 0;
    pub const SINK: usize = 1;

    pub const fn input(module: usize) -> usize {
        2 + 2 * module
    }

    pub const fn output(module: usize) -> usize {
        3 + 2 * module
    }

    pub fn num_nodes(&self) -> usize {
        2 * self.num_modules + 2
    }

    pub fn num_modules(&self) -> usize {
        self.num_modules
    }

    pub fn edges(&self) -> &[SplitEdge] {
        &self.edges
    }

    pub fn count(&self, class: EdgeClass) -> usize {
        self.edges.iter().filter(|e| e.class == class).count()
    }
}

/// Edge order: module edges, interconnects in DAG order, sink edges, source
/// edges, then `s -> t`.
pub fn build_split_dag(dag: &TimingDag) -> SplitDag {
    let m = dag.num_modules();
    let mut edges = Vec::with_capacity(m * 3 + dag.edges().len() + 1);
    for i in 0..m {
        edges.push(SplitEdge {
            from: SplitDag::input(i),
            to: SplitDag::output(i),
            class: EdgeClass::Module,
            module: Some(i),
            dag_edge: None,
        });
    }
    for (k, e) in dag.edges().iter().enumerate() {
        edges.push(SplitEdge {
            from: SplitDag::output(e.from),
            to: SplitDag::input(e.to),
            class: EdgeClass::Interconnect,
            module: None,
            dag_edge: Some(k),
        });
    }
    let (indeg, outdeg) = (dag.in_degree(), dag.out_degree());
    for i in (0..m).filter(|&i| outdeg[i] == 0) {
        edges.push(SplitEdge {
            from: SplitDag::output(i),
            to: SplitDag::SINK,
            class: EdgeClass::Interconnect,
            module: None,
            dag_edge: None,
        });
    }
    for i in (0..m).filter(|&i| indeg[i] == 0) {
        edges.push(SplitEdge {
            from: SplitDag::SOURCE,
            to: SplitDag::input(i),
            class: EdgeClass::Auxiliary,
            module: None,
            dag_edge: None,
        });
    }
    edges.push(SplitEdge {
        from: SplitDag::SOURCE,
        to: SplitDag::SINK,
        class: EdgeClass::Auxiliary,
        module: None,
        dag_edge: None,
    });
    SplitDag { num_modules: m, edges }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

const MAX_SCALE: i128 = 1 << 32;

/// Smallest power multiplier that makes every curve slope an integer.
pub fn power_scale(curves: &[DpCurve]) -> Result<i64> {
    let mut scale: i128 = 1;
    for c in curves {
        for w in c.points().windows(2) {
            let dd = (w[1].0 - w[0].0) as i128;
            let dp = (w[0].1 - w[1].1) as i128;
            let need = dd / gcd(dp, dd);
            scale = scale / gcd(scale, need) * need;
            if scale > MAX_SCALE {
                return Err(Error::ScaleOverflow);
            }
        }
    }
    Ok(scale as i64)
}

/// Slope magnitudes `sigma_s = (p_s - p_{s+1}) * scale / (d_{s+1} - d_s)`.
pub fn scaled_slopes(curve: &DpCurve, scale: i64) -> Result<Vec<i64>> {
    curve
        .points()
        .windows(2)
        .map(|w| {
            let num = (w[0].1 - w[1].1) as i128 * scale as i128;
            let den = (w[1].0 - w[0].0) as i128;
            if num % den != 0 {
                Err(Error::InvalidCurve(format!("slope of {:?} is not integral at scale {scale}", curve.points())))
            } else {
                Ok((num / den) as i64)
            }
        })
        .collect()
}

/// Capacity bound: one more than the summed steepest slopes.
pub fn default_capacity(curves: &[DpCurve], scale: i64) -> Result<i64> {
    let mut m: i64 = 1;
    for c in curves {
        if let Some(&s) = scaled_slopes(c, scale)?.first() {
            m = m.checked_add(s).ok_or(Error::ScaleOverflow)?;
        }
    }
    Ok(m)
}

/// Builds the expanded min-cost flow network.
///
/// Arcs are emitted in split-edge order. A module edge with points
/// `d_1 < ... < d_k` and slope magnitudes `sigma_1 > ... > sigma_{k-1}` gives
/// `k` arcs: `(-d_k, sigma_{k-1})`, then `(-d_{s+1}, sigma_s - sigma_{s+1})`
/// for `s = k-2 .. 1`, then `(-d_1, M - sigma_1)`; for two points this is
/// the pair `(-d_2, sigma)`, `(-d_1, M - sigma)`. An interconnect is one arc
/// `(-delay, 0, M)`. An auxiliary edge `s -> j` gives `(-K_j, -M, 0)` and
/// `(0, 0, M)` with `K_t = T_cycle` and `K_j = K` otherwise.
#[allow(clippy::too_many_arguments)]
pub fn build_expanded_network(
    split: &SplitDag,
    curves: &[DpCurve],
    scale: i64,
    delays: &[Delay],
    t_cycle: Delay,
    k_bound: Delay,
    capacity: i64,
) -> Result<FlowNetwork> {
    let mut net = FlowNetwork::new(split.num_nodes());
    for e in split.edges() {
        match e.class {
            EdgeClass::Module => {
                let curve = &curves[e.module.expect("module edge")];
                let sigma = scaled_slopes(curve, scale)?;
                let pts = curve.points();
                let k = pts.len();
                if k == 1 {
                    net.add_arc(e.from, e.to, -pts[0].0, 0, capacity);
                    continue;
                }
                net.add_arc(e.from, e.to, -pts[k - 1].0, 0, sigma[k - 2]);
                for s in (0..k - 2).rev() {
                    let cap = sigma[s] - sigma[s + 1];
                    if cap < 0 {
                        return Err(Error::InvalidCurve(format!("curve {pts:?} is not convex")));
                    }
                    net.add_arc(e.from, e.to, -pts[s + 1].0, 0, cap);
                }
                if capacity < sigma[0] {
                    return Err(Error::Config("capacity bound below steepest slope".into()));
                }
                net.add_arc(e.from, e.to, -pts[0].0, 0, capacity - sigma[0]);
            }
            EdgeClass::Interconnect => {
                let d = e.dag_edge.map_or(0, |k| delays[k]);
                net.add_arc(e.from, e.to, -d, 0, capacity);
            }
            EdgeClass::Auxiliary => {
                let kj = if e.to == SplitDag::SINK { t_cycle } else { k_bound };
                net.add_arc(e.from, e.to, -kj, -capacity, 0);
                net.add_arc(e.from, e.to, 0, 0, capacity);
            }
        }
    }
    Ok(net)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VaOptions {
    /// Branch-and-bound node budget. `1` solves the relaxation once and snaps
    /// every delay budget down to a curve point.
    pub node_limit: usize,
}

impl VaOptions {
    pub const EXACT: VaOptions = VaOptions { node_limit: usize::MAX };
    pub const RELAXED: VaOptions = VaOptions { node_limit: 1 };
}

impl Default for VaOptions {
    fn default() -> Self {
        VaOptions { node_limit: 256 }
    }
}

/// Outcome of one relaxation solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Relaxation {
    /// Delay budget per module, `mu(O_i) - mu(I_i)`, in half time units.
    pub budget_half_units: Vec<Delay>,
    /// Curve index chosen per module by snapping the budget down.
    pub snapped: Vec<usize>,
    /// Relaxed optimum, in power units multiplied by `power_scale`.
    pub scaled_bound: i128,
    pub power_scale: i64,
    /// Residual distances from `s`.
    pub distances: Vec<Option<i64>>,
}

impl Relaxation {
    /// Lower bound on the power of any discrete assignment in this range.
    pub fn power_bound(&self) -> Power {
        let s = self.power_scale as i128;
        ((self.scaled_bound + s - 1).div_euclid(s)) as Power
    }
}

/// Shared data for the relaxation solves of one floorplan. Time is measured
/// in half units with a clock period of `2T + 1`, which leaves the discrete
/// problem unchanged and keeps the circulation away from zero-cost cycles.
struct Relaxer<'a> {
    dag: &'a TimingDag,
    curves: &'a [DpCurve],
    split: SplitDag,
    doubled: Vec<DpCurve>,
    delays2: Vec<Delay>,
    scale: i64,
    capacity: i64,
    t2: Delay,
}

impl<'a> Relaxer<'a> {
    fn new(dag: &'a TimingDag, curves: &'a [DpCurve], delays: &[Delay]) -> Result<Self> {
        let doubled: Vec<DpCurve> = curves
            .iter()
            .map(|c| DpCurve::new(c.points().iter().map(|&(d, p)| (2 * d, p)).collect()))
            .collect::<Result<_>>()?;
        let scale = power_scale(&doubled)?;
        let capacity = default_capacity(&doubled, scale)?;
        let arcs_estimate = (doubled.iter().map(|c| c.len()).sum::<usize>() + 2 * delays.len() + 4 * curves.len() + 4) as i128;
        if capacity as i128 * arcs_estimate > (1i128 << 62) {
            return Err(Error::ScaleOverflow);
        }
        Ok(Relaxer {
            dag,
            curves,
            split: build_split_dag(dag),
            doubled,
            delays2: delays.iter().map(|d| 2 * d).collect(),
            scale,
            capacity,
            t2: 2 * dag.t_cycle + 1,
        })
    }

    fn feasible(&self, ranges: &[(usize, usize)], delays: &[Delay]) -> bool {
        let d: Vec<Delay> = ranges.iter().zip(self.curves).map(|(&(lo, _), c)| c.delay(lo)).collect();
        self.dag.longest_path(&d, delays) <= self.dag.t_cycle
    }

    fn solve(&self, ranges: &[(usize, usize)]) -> Result<Relaxation> {
        let sub: Vec<DpCurve> = ranges
            .iter()
            .zip(&self.doubled)
            .map(|(&(lo, hi), c)| DpCurve::new(c.points()[lo..=hi].to_vec()))
            .collect::<Result<_>>()?;
        let k_bound = 4 * self.t2;
        let net = build_expanded_network(&self.split, &sub, self.scale, &self.delays2, self.t2, k_bound, self.capacity)?;
        let flow = min_cost_flow(&net);
        if !flow.feasible {
            return Err(Error::FlowInfeasible);
        }
        let distances = residual_shortest_paths(&net, &flow.flow, SplitDag::SOURCE)?;
        let m = self.split.num_modules();
        let mut budget = Vec::with_capacity(m);
        let mut snapped = Vec::with_capacity(m);
        for i in 0..m {
            let (di, dout) = (distances[SplitDag::input(i)], distances[SplitDag::output(i)]);
            let (Some(di), Some(dout)) = (di, dout) else {
                return Err(Error::FlowInfeasible);
            };
            let b = di - dout;
            let (lo, hi) = ranges[i];
            let pts = self.doubled[i].points();
            let idx = (lo..=hi).rev().find(|&s| pts[s].0 <= b).ok_or_else(|| {
                Error::TimingInfeasible(format!("module {i} budget {b} below its fastest delay"))
            })?;
            budget.push(b);
            snapped.push(idx);
        }
        let base: i128 = sub.iter().map(|c| c.power(c.len() - 1) as i128 * self.scale as i128).sum();
        Ok(Relaxation {
            budget_half_units: budget,
            snapped,
            scaled_bound: base - flow.cost,
            power_scale: self.scale,
            distances,
        })
    }
}

/// Solves the flow relaxation over the full curves once.
pub fn relax(dag: &TimingDag, curves: &[DpCurve], delays: &[Delay]) -> Result<Relaxation> {
    let r = Relaxer::new(dag, curves, delays)?;
    let ranges: Vec<(usize, usize)> = curves.iter().map(|c| (0, c.len() - 1)).collect();
    if !r.feasible(&ranges, delays) {
        return Err(Error::TimingInfeasible("longest path exceeds T_cycle at the highest voltages".into()));
    }
    r.solve(&ranges)
}

/// Assigns a curve point to every module so that the longest path meets
/// `T_cycle` with least total power.
///
/// `curves` are the level-shifter adjusted curves, `delays` the interconnect
/// delays per DAG edge. With [`VaOptions::EXACT`] the result is optimal; with
/// a finite node budget the best assignment found is returned.
pub fn solve_voltage_assignment(
    dag: &TimingDag,
    curves: &[DpCurve],
    delays: &[Delay],
    opts: VaOptions,
) -> Result<VoltageAssignment> {
    if curves.len() != dag.num_modules() || delays.len() != dag.edges().len() {
        return Err(Error::Config("curve or delay count does not match the DAG".into()));
    }
    let r = Relaxer::new(dag, curves, delays)?;
    let root: Vec<(usize, usize)> = curves.iter().map(|c| (0, c.len() - 1)).collect();
    if !r.feasible(&root, delays) {
        return Err(Error::TimingInfeasible("longest path exceeds T_cycle at the highest voltages".into()));
    }

    let mut best: Option<(Power, Vec<usize>)> = None;
    let mut stack = vec![root];
    let mut nodes = 0usize;
    while let Some(ranges) = stack.pop() {
        if nodes >= opts.node_limit.max(1) {
            break;
        }
        nodes += 1;
        if !r.feasible(&ranges, delays) {
            continue;
        }
        let relax = r.solve(&ranges)?;
        let bound = relax.power_bound();
        if best.as_ref().map_or(false, |(p, _)| bound >= *p) {
            continue;
        }
        let chosen: Vec<Delay> = relax.snapped.iter().zip(curves).map(|(&s, c)| c.delay(s)).collect();
        if dag.longest_path(&chosen, delays) <= dag.t_cycle {
            let power: Power = relax.snapped.iter().zip(curves).map(|(&s, c)| c.power(s)).sum();
            if best.as_ref().map_or(true, |(p, _)| power < *p) {
                best = Some((power, relax.snapped.clone()));
            }
            if power <= bound {
                continue;
            }
        }
        // Branch on the first module whose budget falls strictly between points.
        let split_at = (0..curves.len()).find_map(|i| {
            let (lo, hi) = ranges[i];
            let b = relax.budget_half_units[i];
            let s = relax.snapped[i];
            (s < hi && r.doubled[i].delay(s) < b).then_some((i, s, lo, hi))
        });
        if let Some((i, s, lo, hi)) = split_at {
            let mut slow = ranges.clone();
            slow[i] = (s + 1, hi);
            let mut fast = ranges;
            fast[i] = (lo, s);
            stack.push(slow);
            stack.push(fast);
        }
    }

    // Full speed meets the clock here, so the budget running out never means infeasible.
    let (total_power, idx) = best.unwrap_or_else(|| greedy_slowdown(dag, curves, delays));
    let va = assignment_from_indices(dag, curves, delays, &idx, total_power);
    debug_assert_eq!(va.timing_violations(dag), 0);
    debug_assert!(va.mu[SplitDag::SINK] <= dag.t_cycle);
    Ok(va)
}

/// Starts at full speed and keeps taking the single slowdown that saves the
/// most power while the clock is still met.
fn greedy_slowdown(dag: &TimingDag, curves: &[DpCurve], delays: &[Delay]) -> (Power, Vec<usize>) {
    let mut idx = vec![0usize; curves.len()];
    let mut module_delay: Vec<Delay> = curves.iter().map(|c| c.delay(0)).collect();
    loop {
        let mut order: Vec<(Power, usize)> = (0..curves.len())
            .filter(|&i| idx[i] + 1 < curves[i].len())
            .map(|i| (curves[i].power(idx[i]) - curves[i].power(idx[i] + 1), i))
            .collect();
        order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let step = order.into_iter().find(|&(_, i)| {
            let old = module_delay[i];
            module_delay[i] = curves[i].delay(idx[i] + 1);
            let ok = dag.longest_path(&module_delay, delays) <= dag.t_cycle;
            module_delay[i] = old;
            ok
        });
        match step {
            Some((_, i)) => {
                idx[i] += 1;
                module_delay[i] = curves[i].delay(idx[i]);
            }
            None => break,
        }
    }
    let power = idx.iter().zip(curves).map(|(&s, c)| c.power(s)).sum();
    (power, idx)
}

fn assignment_from_indices(
    dag: &TimingDag,
    curves: &[DpCurve],
    delays: &[Delay],
    idx: &[usize],
    total_power: Power,
) -> VoltageAssignment {
    let module_delay: Vec<Delay> = idx.iter().zip(curves).map(|(&s, c)| c.delay(s)).collect();
    let arrival = dag.arrival_times(&module_delay, delays);
    let m = dag.num_modules();
    let mut mu = vec![0; 2 * m + 2];
    for i in 0..m {
        mu[SplitDag::input(i)] = arrival[i];
        mu[SplitDag::output(i)] = arrival[i] + module_delay[i];
    }
    mu[SplitDag::SINK] = dag.longest_path(&module_delay, delays);
    VoltageAssignment {
        levels: idx.iter().map(|&s| s + 1).collect(),
        module_delay,
        edge_delay: delays.to_vec(),
        mu,
        total_power,
    }
}
