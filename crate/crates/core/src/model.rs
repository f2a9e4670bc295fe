//! Domain data: delay-power curves, modules and the timing DAG.
//!
//! Delays and powers are integers in the base units declared by the benchmark.
//! Voltage levels are 1-based, level 1 being the highest supply voltage (the
//! fastest, most power hungry point of every curve).

use crate::error::{Error, Result};

pub type Delay = i64;
pub type Power = i64;

/// Returns true when the polyline through `points` has non-decreasing slopes.
///
/// Points are expected sorted by x. The test is done by cross multiplication,
/// so zero-length segments (as found in an all-zero level-shifter curve) are
/// accepted. Fewer than three points are trivially convex.
pub fn check_convex(points: &[(i64, i64)]) -> bool {
    points.windows(3).all(|w| {
        let (x1, y1) = (w[0].0 as i128, w[0].1 as i128);
        let (x2, y2) = (w[1].0 as i128, w[1].1 as i128);
        let (x3, y3) = (w[2].0 as i128, w[2].1 as i128);
        (y2 - y1) * (x3 - x2) <= (y3 - y2) * (x2 - x1)
    })
}

fn strictly_convex(points: &[(i64, i64)]) -> bool {
    points.windows(3).all(|w| {
        let (x1, y1) = (w[0].0 as i128, w[0].1 as i128);
        let (x2, y2) = (w[1].0 as i128, w[1].1 as i128);
        let (x3, y3) = (w[2].0 as i128, w[2].1 as i128);
        (y2 - y1) * (x3 - x2) < (y3 - y2) * (x2 - x1)
    })
}

/// Delay-power tradeoff of one module, one point per legal voltage.
///
/// Index 0 holds the highest voltage (smallest delay, largest power).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DpCurve {
    points: Vec<(Delay, Power)>,
}

impl DpCurve {
    pub fn new(points: Vec<(Delay, Power)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidCurve("curve has no points".into()));
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidCurve(format!(
                    "delays must strictly increase ({} then {})",
                    w[0].0, w[1].0
                )));
            }
            if w[1].1 >= w[0].1 {
                return Err(Error::InvalidCurve(format!(
                    "powers must strictly decrease ({} then {})",
                    w[0].1, w[1].1
                )));
            }
        }
        if points[0].0 < 0 || points.last().map_or(false, |p| p.1 < 0) {
            return Err(Error::InvalidCurve("negative delay or power".into()));
        }
        if !strictly_convex(&points) {
            return Err(Error::InvalidCurve(format!("curve {points:?} is not convex")));
        }
        Ok(DpCurve { points })
    }

    pub fn points(&self) -> &[(Delay, Power)] {
        &self.points
    }

    /// Number of legal voltages.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn delay(&self, idx: usize) -> Delay {
        self.points[idx].0
    }

    pub fn power(&self, idx: usize) -> Power {
        self.points[idx].1
    }

    /// Power on the piecewise-linear interpolation at delay `d`, clamped to the
    /// curve's delay range.
    pub fn interpolate(&self, d: f64) -> f64 {
        let pts = &self.points;
        if d <= pts[0].0 as f64 {
            return pts[0].1 as f64;
        }
        for w in pts.windows(2) {
            let (d0, p0) = (w[0].0 as f64, w[0].1 as f64);
            let (d1, p1) = (w[1].0 as f64, w[1].1 as f64);
            if d <= d1 {
                return p0 + (p1 - p0) * (d - d0) / (d1 - d0);
            }
        }
        pts[pts.len() - 1].1 as f64
    }

    /// Index of the point with delay exactly `d`.
    pub fn index_of_delay(&self, d: Delay) -> Option<usize> {
        self.points.iter().position(|p| p.0 == d)
    }
}

/// Level-shifter cost as a function of the driving module's voltage level.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LsDpCurve {
    pairs: Vec<(Delay, Power)>,
    area: i64,
}

impl LsDpCurve {
    pub fn new(pairs: Vec<(Delay, Power)>, area: i64) -> Result<Self> {
        if pairs.first() != Some(&(0, 0)) {
            return Err(Error::InvalidCurve(
                "level-shifter curve must start with (0,0)".into(),
            ));
        }
        if area <= 0 {
            return Err(Error::InvalidCurve("level-shifter area must be positive".into()));
        }
        if pairs.windows(2).any(|w| w[1].0 < w[0].0 || w[1].1 < w[0].1) {
            return Err(Error::InvalidCurve(
                "level-shifter delay and power must be non-decreasing".into(),
            ));
        }
        if !check_convex(&pairs) {
            return Err(Error::InvalidCurve(format!(
                "level-shifter curve {pairs:?} is not convex"
            )));
        }
        Ok(LsDpCurve { pairs, area })
    }

    /// Zero-cost shifter curve with `k` levels.
    pub fn zeros(k: usize, area: i64) -> Result<Self> {
        Self::new(vec![(0, 0); k.max(1)], area)
    }

    pub fn pairs(&self) -> &[(Delay, Power)] {
        &self.pairs
    }

    pub fn area(&self) -> i64 {
        self.area
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Folds the level-shifter cost into a module curve, point by point.
///
/// Every module is charged the shifter it would need when driving a faster
/// neighbour, so the timing budget can stay at the full clock period.
pub fn modify_dp_curve(curve: &DpCurve, ls: &LsDpCurve) -> Result<DpCurve> {
    if curve.len() != ls.len() {
        return Err(Error::CurveLengthMismatch { curve: curve.len(), ls: ls.len() });
    }
    let points = curve
        .points()
        .iter()
        .zip(ls.pairs())
        .map(|(&(d, p), &(dl, pl))| (d + dl, p + pl))
        .collect();
    DpCurve::new(points)
}

/// A hard block: fixed outline, one delay-power curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Module {
    pub id: String,
    pub width: i64,
    pub height: i64,
    pub curve: DpCurve,
}

impl Module {
    pub fn new(id: impl Into<String>, width: i64, height: i64, curve: DpCurve) -> Result<Self> {
        let id = id.into();
        if width <= 0 || height <= 0 {
            return Err(Error::InvalidModule { id, reason: "dimensions must be positive".into() });
        }
        Ok(Module { id, width, height, curve })
    }

    pub fn area(&self) -> i64 {
        self.width * self.height
    }
}

/// A multi-pin net: one driver, one or more sinks (module indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPinNet {
    pub name: String,
    pub source: usize,
    pub sinks: Vec<usize>,
}

/// Splits a multi-pin net into source-to-sink two-pin edges.
pub fn decompose_multipin(net: &MultiPinNet) -> Vec<(usize, usize)> {
    net.sinks.iter().map(|&s| (net.source, s)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DagEdge {
    pub from: usize,
    pub to: usize,
    /// Name of the multi-pin net this two-pin edge came from.
    pub net: String,
}

/// Two-pin netlist over module indices, with the clock period and the
/// length-to-delay factor.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingDag {
    num_modules: usize,
    edges: Vec<DagEdge>,
    topo: Vec<usize>,
    pub t_cycle: Delay,
    pub delta: f64,
}

impl TimingDag {
    pub fn new(num_modules: usize, edges: Vec<DagEdge>, t_cycle: Delay, delta: f64) -> Result<Self> {
        if t_cycle <= 0 {
            return Err(Error::Config("T_cycle must be positive".into()));
        }
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::Config("delta must be positive".into()));
        }
        for e in &edges {
            if e.from >= num_modules || e.to >= num_modules {
                return Err(Error::UnknownModule(format!("index {}", e.from.max(e.to))));
            }
        }
        let topo = topological_order(num_modules, &edges)
            .ok_or_else(|| Error::Cycle(cycle_witness(num_modules, &edges)))?;
        Ok(TimingDag { num_modules, edges, topo, t_cycle, delta })
    }

    /// Builds the DAG from multi-pin nets, decomposing each one.
    pub fn from_nets(num_modules: usize, nets: &[MultiPinNet], t_cycle: Delay, delta: f64) -> Result<Self> {
        let edges = nets
            .iter()
            .flat_map(|n| {
                decompose_multipin(n)
                    .into_iter()
                    .map(move |(from, to)| DagEdge { from, to, net: n.name.clone() })
            })
            .collect();
        Self::new(num_modules, edges, t_cycle, delta)
    }

    pub fn num_modules(&self) -> usize {
        self.num_modules
    }

    pub fn edges(&self) -> &[DagEdge] {
        &self.edges
    }

    /// Module indices in topological order.
    pub fn topo_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn in_degree(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_modules];
        for e in &self.edges {
            deg[e.to] += 1;
        }
        deg
    }

    pub fn out_degree(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_modules];
        for e in &self.edges {
            deg[e.from] += 1;
        }
        deg
    }

    /// Longest source-to-sink path given per-module and per-edge delays.
    pub fn longest_path(&self, module_delay: &[Delay], edge_delay: &[Delay]) -> Delay {
        self.arrival_times(module_delay, edge_delay)
            .iter()
            .zip(module_delay)
            .map(|(a, d)| a + d)
            .max()
            .unwrap_or(0)
    }

    /// Earliest input arrival time of every module.
    pub fn arrival_times(&self, module_delay: &[Delay], edge_delay: &[Delay]) -> Vec<Delay> {
        let mut incoming: Vec<Vec<(usize, Delay)>> = vec![Vec::new(); self.num_modules];
        for (e, &d) in self.edges.iter().zip(edge_delay) {
            incoming[e.to].push((e.from, d));
        }
        let mut arrival = vec![0; self.num_modules];
        for &v in &self.topo {
            arrival[v] = incoming[v]
                .iter()
                .map(|&(u, d)| arrival[u] + module_delay[u] + d)
                .max()
                .unwrap_or(0);
        }
        arrival
    }
}

fn topological_order(n: usize, edges: &[DagEdge]) -> Option<Vec<usize>> {
    let mut indeg = vec![0usize; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in edges {
        indeg[e.to] += 1;
        out[e.from].push(e.to);
    }
    let mut stack: Vec<usize> = (0..n).rev().filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = stack.pop() {
        order.push(v);
        for &w in out[v].iter().rev() {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                stack.push(w);
            }
        }
    }
    (order.len() == n).then_some(order)
}

fn cycle_witness(n: usize, edges: &[DagEdge]) -> String {
    // Any module left with positive in-degree after peeling sits on or behind a cycle.
    let mut indeg = vec![0usize; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in edges {
        indeg[e.to] += 1;
        out[e.from].push(e.to);
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    while let Some(v) = stack.pop() {
        for &w in &out[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                stack.push(w);
            }
        }
    }
    indeg.iter().position(|&d| d > 0).map_or_else(String::new, |v| v.to_string())
}

/// Result of voltage assignment for one floorplan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoltageAssignment {
    /// 1-based voltage level per module.
    pub levels: Vec<usize>,
    /// Chosen (level-shifter adjusted) delay per module.
    pub module_delay: Vec<Delay>,
    /// Interconnect delay per DAG edge.
    pub edge_delay: Vec<Delay>,
    /// Arrival time per split-DAG node, indexed as in [`crate::voltage::SplitDag`].
    pub mu: Vec<Delay>,
    pub total_power: Power,
}

impl VoltageAssignment {
    /// Number of timing constraints violated by the stored arrival times.
    pub fn timing_violations(&self, dag: &TimingDag) -> usize {
        use crate::voltage::SplitDag;
        let mut bad = 0;
        let n = dag.num_modules();
        for i in 0..n {
            let (inp, out) = (SplitDag::input(i), SplitDag::output(i));
            if self.mu[out] - self.mu[inp] < self.module_delay[i] || self.mu[inp] < self.mu[SplitDag::SOURCE] {
                bad += 1;
            }
            if self.mu[SplitDag::SINK] < self.mu[out] {
                bad += 1;
            }
        }
        for (e, &d) in dag.edges().iter().zip(&self.edge_delay) {
            if self.mu[SplitDag::input(e.to)] - self.mu[SplitDag::output(e.from)] < d {
                bad += 1;
            }
        }
        if self.mu[SplitDag::SINK] - self.mu[SplitDag::SOURCE] > dag.t_cycle {
            bad += 1;
        }
        bad
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convexity_examples() {
        assert!(check_convex(&[(0, 0), (1, 1), (2, 3)]));
        assert!(!check_convex(&[(0, 0), (1, 2), (2, 3)]));
        assert!(check_convex(&[(0, 0)]));
        assert!(check_convex(&[]));
    }

    #[test]
    fn modify_adds_pointwise() {
        let c = DpCurve::new(vec![(2, 10), (4, 3)]).unwrap();
        let ls = LsDpCurve::new(vec![(0, 0), (1, 2)], 4).unwrap();
        let m = modify_dp_curve(&c, &ls).unwrap();
        assert_eq!(m.points(), &[(2, 10), (5, 5)]);
    }

    #[test]
    fn modify_with_zero_ls_is_identity() {
        let c = DpCurve::new(vec![(1, 9), (2, 5), (4, 1)]).unwrap();
        let ls = LsDpCurve::zeros(3, 1).unwrap();
        assert_eq!(modify_dp_curve(&c, &ls).unwrap(), c);
    }

    #[test]
    fn modify_rejects_length_mismatch() {
        let c = DpCurve::new(vec![(2, 10), (4, 3)]).unwrap();
        let ls = LsDpCurve::zeros(3, 1).unwrap();
        assert_eq!(
            modify_dp_curve(&c, &ls),
            Err(Error::CurveLengthMismatch { curve: 2, ls: 3 })
        );
    }

    #[test]
    fn modify_rejects_nonconvex_result() {
        // The last shifter point outweighs the module's power saving.
        let c = DpCurve::new(vec![(0, 10), (1, 7), (2, 6)]).unwrap();
        let ls = LsDpCurve::new(vec![(0, 0), (0, 0), (5, 6)], 1).unwrap();
        assert!(modify_dp_curve(&c, &ls).is_err());
    }

    #[test]
    fn curve_validation() {
        assert!(DpCurve::new(vec![]).is_err());
        assert!(DpCurve::new(vec![(2, 10), (2, 3)]).is_err());
        assert!(DpCurve::new(vec![(2, 10), (4, 11)]).is_err());
        assert!(DpCurve::new(vec![(0, 10), (1, 9), (2, 7)]).is_err());
        assert!(LsDpCurve::new(vec![(1, 0)], 1).is_err());
        assert!(LsDpCurve::new(vec![(0, 0)], 0).is_err());
    }

    #[test]
    fn interpolation_hits_breakpoints() {
        let c = DpCurve::new(vec![(1, 9), (2, 5), (4, 1)]).unwrap();
        for &(d, p) in c.points() {
            assert_eq!(c.interpolate(d as f64), p as f64);
        }
        assert_eq!(c.interpolate(3.0), 3.0);
    }

    #[test]
    fn decompose_fanout() {
        let net = MultiPinNet { name: "n".into(), source: 0, sinks: vec![1, 2, 3] };
        assert_eq!(decompose_multipin(&net), vec![(0, 1), (0, 2), (0, 3)]);
        let net = MultiPinNet { name: "n".into(), source: 0, sinks: vec![1] };
        assert_eq!(decompose_multipin(&net), vec![(0, 1)]);
    }

    #[test]
    fn cycle_is_rejected() {
        let nets = vec![
            MultiPinNet { name: "a".into(), source: 0, sinks: vec![1] },
            MultiPinNet { name: "b".into(), source: 1, sinks: vec![2, 0] },
        ];
        assert!(matches!(TimingDag::from_nets(3, &nets, 10, 1.0), Err(Error::Cycle(_))));
    }

    #[test]
    fn longest_path_chain() {
        let nets = vec![MultiPinNet { name: "a".into(), source: 0, sinks: vec![1] }];
        let dag = TimingDag::from_nets(2, &nets, 10, 1.0).unwrap();
        assert_eq!(dag.longest_path(&[2, 3], &[4]), 9);
        assert_eq!(dag.arrival_times(&[2, 3], &[4]), vec![0, 6]);
    }
}
