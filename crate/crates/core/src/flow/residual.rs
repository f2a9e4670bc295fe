use std::collections::VecDeque;

use super::network::FlowNetwork;
use crate::error::{Error, Result};

/// Shortest distances from `source` in the residual graph of `flow`.
///
/// An arc with flow below its upper bound contributes a forward residual arc
/// at its cost; an arc with flow above its lower bound contributes a reverse
/// residual arc at the negated cost. Costs may be negative, so this is a
/// queue-based Bellman-Ford. Unreachable nodes map to `None`.
///
/// A negative cycle means the flow was not optimal and is reported as
/// [`Error::NegativeCycle`].
pub fn residual_shortest_paths(net: &FlowNetwork, flow: &[i64], source: usize) -> Result<Vec<Option<i64>>> {
    let n = net.num_nodes();
    let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    for (a, &x) in net.arcs().iter().zip(flow) {
        if x < a.upper {
            adj[a.from].push((a.to, a.cost));
        }
        if x > a.lower {
            adj[a.to].push((a.from, -a.cost));
        }
    }

    let mut dist: Vec<Option<i64>> = vec![None; n];
    let mut in_queue = vec![false; n];
    let mut relax_count = vec![0usize; n];
    let mut queue = VecDeque::new();
    dist[source] = Some(0);
    queue.push_back(source);
    in_queue[source] = true;

    while let Some(u) = queue.pop_front() {
        in_queue[u] = false;
        let du = dist[u].expect("queued nodes have a distance");
        for &(v, c) in &adj[u] {
            let nd = du + c;
            if dist[v].map_or(true, |dv| nd < dv) {
                dist[v] = Some(nd);
                if !in_queue[v] {
                    relax_count[v] += 1;
                    if relax_count[v] > n {
                        return Err(Error::NegativeCycle);
                    }
                    in_queue[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::min_cost_flow;

    #[test]
    fn zero_cost_network() {
        let mut net = FlowNetwork::new(3);
        net.add_arc(0, 1, 0, 0, 2);
        net.add_arc(1, 2, 0, 0, 2);
        let r = min_cost_flow(&net);
        let d = residual_shortest_paths(&net, &r.flow, 0).unwrap();
        assert_eq!(d, vec![Some(0), Some(0), Some(0)]);
    }

    #[test]
    fn saturated_negative_arc_reverses() {
        let mut net = FlowNetwork::new(2);
        net.add_arc(0, 1, -5, 0, 2);
        net.add_arc(1, 0, 0, 0, 2);
        let r = min_cost_flow(&net);
        assert_eq!(r.flow, vec![2, 2]);
        // From node 1 the saturated arc is only traversable backwards, at +5.
        let d = residual_shortest_paths(&net, &r.flow, 1).unwrap();
        assert_eq!(d, vec![Some(5), Some(0)]);
        // The return arc is saturated too, so its reverse links 0 to 1 at cost 0.
        let d = residual_shortest_paths(&net, &r.flow, 0).unwrap();
        assert_eq!(d, vec![Some(0), Some(0)]);
    }

    #[test]
    fn detects_non_optimal_flow() {
        let mut net = FlowNetwork::new(2);
        net.add_arc(0, 1, -5, 0, 2);
        net.add_arc(1, 0, 0, 0, 2);
        assert_eq!(residual_shortest_paths(&net, &[0, 0], 0), Err(Error::NegativeCycle));
    }
}
