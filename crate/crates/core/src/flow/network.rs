use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::simplex::{network_simplex, SimplexArc};

/// One arc of a [`FlowNetwork`]: flow must stay within `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub cost: i64,
    pub lower: i64,
    pub upper: i64,
}

/// Directed network with integer costs and bounds plus optional node supplies.
///
/// A positive supply means the node emits that much flow; a negative one means
/// it absorbs it. With all supplies zero the solver looks for a min-cost
/// circulation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FlowNetwork {
    num_nodes: usize,
    arcs: Vec<Arc>,
    supply: Vec<i64>,
}

impl FlowNetwork {
    pub fn new(num_nodes: usize) -> Self {
        FlowNetwork { num_nodes, arcs: Vec::new(), supply: vec![0; num_nodes] }
    }

    /// Appends an arc and returns its index.
    pub fn add_arc(&mut self, from: usize, to: usize, cost: i64, lower: i64, upper: i64) -> usize {
        assert!(from < self.num_nodes && to < self.num_nodes, "arc endpoint out of range");
        assert!(lower <= upper, "arc lower bound exceeds upper bound");
        self.arcs.push(Arc { from, to, cost, lower, upper });
        self.arcs.len() - 1
    }

    pub fn set_supply(&mut self, node: usize, supply: i64) {
        self.supply[node] = supply;
    }

    pub fn supply(&self) -> &[i64] {
        &self.supply
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Total cost of a flow vector on this network.
    pub fn cost_of(&self, flow: &[i64]) -> i128 {
        self.arcs.iter().zip(flow).map(|(a, &x)| a.cost as i128 * x as i128).sum()
    }

    /// True when `flow` respects every bound and every node balance.
    pub fn is_feasible_flow(&self, flow: &[i64]) -> bool {
        if flow.len() != self.arcs.len() {
            return false;
        }
        let mut balance = vec![0i64; self.num_nodes];
        for (a, &x) in self.arcs.iter().zip(flow) {
            if x < a.lower || x > a.upper {
                return false;
            }
            balance[a.from] += x;
            balance[a.to] -= x;
        }
        balance == self.supply
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowResult {
    /// Flow per arc, in arc insertion order.
    pub flow: Vec<i64>,
    pub cost: i128,
    pub feasible: bool,
}

struct Residual {
    head: Vec<usize>,
    cap: Vec<i64>,
    cost: Vec<i64>,
    adj: Vec<Vec<usize>>,
}

impl Residual {
    fn new(n: usize) -> Self {
        Residual { head: Vec::new(), cap: Vec::new(), cost: Vec::new(), adj: vec![Vec::new(); n] }
    }

    /// Adds a forward/backward residual pair; the backward edge is `id ^ 1`.
    fn add(&mut self, from: usize, to: usize, cap: i64, back_cap: i64, cost: i64) -> usize {
        let id = self.head.len();
        self.head.push(to);
        self.cap.push(cap);
        self.cost.push(cost);
        self.adj[from].push(id);
        self.head.push(from);
        self.cap.push(back_cap);
        self.cost.push(-cost);
        self.adj[to].push(id + 1);
        id
    }
}

/// Exact integer min-cost flow by the primal network simplex.
///
/// Lower bounds are shifted into the node supplies first. Pivots scan arcs in
/// insertion order, so results are reproducible.
pub fn min_cost_flow(net: &FlowNetwork) -> FlowResult {
    let mut supply = net.supply.clone();
    let arcs: Vec<SimplexArc> = net
        .arcs
        .iter()
        .map(|a| {
            supply[a.from] -= a.lower;
            supply[a.to] += a.lower;
            SimplexArc { from: a.from, to: a.to, cost: a.cost, cap: a.upper - a.lower }
        })
        .collect();
    match network_simplex(net.num_nodes, &arcs, &supply) {
        Some(x) => {
            let flow: Vec<i64> = net.arcs.iter().zip(x).map(|(a, x)| a.lower + x).collect();
            FlowResult { cost: net.cost_of(&flow), flow, feasible: true }
        }
        None => FlowResult { flow: net.arcs.iter().map(|a| a.lower).collect(), cost: 0, feasible: false },
    }
}

/// Same optimum as [`min_cost_flow`] by a different route, kept as a
/// cross-check.
///
/// Bounds are normalised first: arcs whose range lies at or below zero are
/// reversed, then every lower bound is shifted into the node supplies.
/// Negative-cost arcs are saturated up front, which leaves a residual graph
/// with non-negative costs, and the remaining imbalances are routed by
/// primal-dual augmentation with Dijkstra and node potentials.
pub fn min_cost_flow_ssp(net: &FlowNetwork) -> FlowResult {
    let n = net.num_nodes;
    let src = n;
    let snk = n + 1;
    let mut res = Residual::new(n + 2);
    let mut excess: Vec<i64> = net.supply.clone();
    excess.resize(n + 2, 0);

    // (residual edge id, sign, shifted lower bound) per original arc
    let mut map = Vec::with_capacity(net.arcs.len());
    for a in &net.arcs {
        let (from, to, cost, lo, hi, sign) = if a.upper <= 0 && a.lower < 0 {
            (a.to, a.from, -a.cost, -a.upper, -a.lower, -1)
        } else {
            (a.from, a.to, a.cost, a.lower, a.upper, 1)
        };
        excess[from] -= lo;
        excess[to] += lo;
        let cap = hi - lo;
        let id = if cost < 0 {
            excess[from] -= cap;
            excess[to] += cap;
            res.add(from, to, 0, cap, cost)
        } else {
            res.add(from, to, cap, 0, cost)
        };
        map.push((id, sign, lo));
    }

    let mut demand = 0i64;
    for v in 0..n {
        if excess[v] > 0 {
            res.add(src, v, excess[v], 0, 0);
            demand += excess[v];
        } else if excess[v] < 0 {
            res.add(v, snk, -excess[v], 0, 0);
        }
    }

    let pushed = successive_shortest_paths(&mut res, src, snk, demand);

    let flow: Vec<i64> = map
        .iter()
        .map(|&(id, sign, lo)| sign * (lo + res.cap[id ^ 1]))
        .collect();
    let cost = net.cost_of(&flow);
    FlowResult { flow, cost, feasible: pushed == demand }
}

/// Primal-dual augmentation: one Dijkstra per distance phase, then a blocking
/// flow over the arcs of zero reduced cost.
fn successive_shortest_paths(res: &mut Residual, src: usize, snk: usize, demand: i64) -> i64 {
    let nodes = res.adj.len();
    let mut potential = vec![0i64; nodes];
    let mut dist = vec![i64::MAX; nodes];
    let mut done = vec![false; nodes];
    let mut level = vec![u32::MAX; nodes];
    let mut iter = vec![0usize; nodes];
    let mut queue = Vec::with_capacity(nodes);
    let mut pushed = 0i64;
    let mut heap = BinaryHeap::new();

    while pushed < demand {
        dist.iter_mut().for_each(|d| *d = i64::MAX);
        done.iter_mut().for_each(|d| *d = false);
        dist[src] = 0;
        heap.clear();
        heap.push(Reverse((0i64, src)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            if u == snk {
                break;
            }
            for &e in &res.adj[u] {
                if res.cap[e] <= 0 {
                    continue;
                }
                let v = res.head[e];
                let nd = d + res.cost[e] + potential[u] - potential[v];
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        if !done[snk] {
            break;
        }
        // Capping at the sink distance keeps every reduced cost non-negative.
        let cap_d = dist[snk];
        for v in 0..nodes {
            potential[v] += if done[v] { dist[v].min(cap_d) } else { cap_d };
        }
        let admissible = |res: &Residual, potential: &[i64], u: usize, e: usize| {
            res.cap[e] > 0 && res.cost[e] + potential[u] - potential[res.head[e]] == 0
        };
        loop {
            level.iter_mut().for_each(|l| *l = u32::MAX);
            level[src] = 0;
            queue.clear();
            queue.push(src);
            let mut qi = 0;
            while qi < queue.len() {
                let u = queue[qi];
                qi += 1;
                for &e in &res.adj[u] {
                    let v = res.head[e];
                    if level[v] == u32::MAX && admissible(res, &potential, u, e) {
                        level[v] = level[u] + 1;
                        queue.push(v);
                    }
                }
            }
            if level[snk] == u32::MAX {
                break;
            }
            iter.iter_mut().for_each(|i| *i = 0);
            let mut phase = 0;
            while pushed < demand {
                let f = blocking_dfs(res, &potential, &level, &mut iter, src, snk, demand - pushed);
                if f == 0 {
                    break;
                }
                pushed += f;
                phase += f;
            }
            if phase == 0 || pushed >= demand {
                break;
            }
        }
    }
    pushed
}

fn blocking_dfs(
    res: &mut Residual,
    potential: &[i64],
    level: &[u32],
    iter: &mut [usize],
    src: usize,
    snk: usize,
    limit: i64,
) -> i64 {
    // Iterative DFS along level-increasing admissible arcs.
    let mut path: Vec<usize> = Vec::new();
    let mut u = src;
    loop {
        if u == snk {
            let f = path.iter().fold(limit, |m, &e| m.min(res.cap[e]));
            for &e in &path {
                res.cap[e] -= f;
                res.cap[e ^ 1] += f;
            }
            return f;
        }
        let mut advanced = false;
        while iter[u] < res.adj[u].len() {
            let e = res.adj[u][iter[u]];
            let v = res.head[e];
            if res.cap[e] > 0 && level[v] == level[u] + 1 && res.cost[e] + potential[u] - potential[v] == 0 {
                path.push(e);
                u = v;
                advanced = true;
                break;
            }
            iter[u] += 1;
        }
        if !advanced {
            match path.pop() {
                Some(e) => {
                    u = res.head[e ^ 1];
                    iter[u] += 1;
                }
                None => return 0,
            }
        }
    }
}
