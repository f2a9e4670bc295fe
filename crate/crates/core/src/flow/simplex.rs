//! Primal network simplex over a strongly feasible spanning tree.

/// Arc with the lower bound already shifted to zero.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SimplexArc {
    pub from: usize,
    pub to: usize,
    pub cost: i64,
    pub cap: i64,
}

const AT_LOWER: i8 = 1;
const IN_TREE: i8 = 0;
const AT_UPPER: i8 = -1;

struct Tree {
    parent: Vec<usize>,
    pred: Vec<usize>,
    depth: Vec<usize>,
    pi: Vec<i128>,
}

/// Solves `min Σ cost·x` with `0 <= x <= cap` and node balances `supply`.
/// Returns `None` when no feasible flow exists.
///
/// An artificial root is joined to every node by a high-cost arc; the
/// leaving arc follows Cunningham's rule, which rules out cycling on
/// degenerate pivots.
pub(crate) fn network_simplex(n: usize, arcs: &[SimplexArc], supply: &[i64]) -> Option<Vec<i64>> {
    if supply.iter().map(|&b| b as i128).sum::<i128>() != 0 {
        return None;
    }
    let m = arcs.len();
    let root = n;
    let max_cost = arcs.iter().map(|a| (a.cost as i128).abs()).max().unwrap_or(0);
    let art = (n as i128 + 1) * max_cost + 1;
    let inf = supply.iter().chain(arcs.iter().map(|a| &a.cap)).fold(1i64, |s, &x| s.saturating_add(x.abs()));

    let mut from: Vec<usize> = arcs.iter().map(|a| a.from).collect();
    let mut to: Vec<usize> = arcs.iter().map(|a| a.to).collect();
    let mut cost: Vec<i128> = arcs.iter().map(|a| a.cost as i128).collect();
    let mut cap: Vec<i64> = arcs.iter().map(|a| a.cap).collect();
    let mut flow = vec![0i64; m];
    let mut state = vec![AT_LOWER; m];
    for (v, &b) in supply.iter().enumerate().take(n) {
        if b >= 0 {
            from.push(v);
            to.push(root);
            flow.push(b);
        } else {
            from.push(root);
            to.push(v);
            flow.push(-b);
        }
        cost.push(art);
        cap.push(inf);
        state.push(IN_TREE);
    }
    let total = m + n;

    let mut tree = Tree { parent: vec![root; n + 1], pred: vec![usize::MAX; n + 1], depth: vec![0; n + 1], pi: vec![0; n + 1] };
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for a in m..total {
        adj[from[a]].push(a);
        adj[to[a]].push(a);
    }
    let mut stack = Vec::with_capacity(n + 1);
    // Hangs the subtree containing `top` below `under` through arc `via` and
    // refreshes parents, depths and potentials inside it.
    let mut rehang = |tree: &mut Tree, adj: &[Vec<usize>], top: usize, under: usize, via: usize, cost: &[i128]| {
        stack.clear();
        stack.push((top, under, via));
        while let Some((v, u, a)) = stack.pop() {
            tree.parent[v] = u;
            tree.pred[v] = a;
            tree.depth[v] = tree.depth[u] + 1;
            tree.pi[v] = if from[a] == u { tree.pi[u] + cost[a] } else { tree.pi[u] - cost[a] };
            for &b in &adj[v] {
                if b != a {
                    let c = if from[b] == v { to[b] } else { from[b] };
                    stack.push((c, v, b));
                }
            }
        }
    };
    tree.pred[root] = usize::MAX;
    for v in 0..n {
        rehang(&mut tree, &adj, v, root, m + v, &cost);
    }

    let block = ((total as f64).sqrt().ceil() as usize).max(10);
    let mut next = 0usize;
    loop {
        // Block search: best violation within the first block that has one.
        let mut entering = None;
        let mut best = 0i128;
        let mut scanned = 0;
        while scanned < total {
            let end = (scanned + block).min(total);
            for _ in scanned..end {
                let a = next;
                next = if next + 1 == total { 0 } else { next + 1 };
                if state[a] == IN_TREE {
                    continue;
                }
                let rc = cost[a] + tree.pi[from[a]] - tree.pi[to[a]];
                let v = state[a] as i128 * rc;
                if v < best {
                    best = v;
                    entering = Some(a);
                }
            }
            scanned = end;
            if entering.is_some() {
                break;
            }
        }
        let Some(e) = entering else { break };

        let (first, second) = if state[e] == AT_LOWER { (from[e], to[e]) } else { (to[e], from[e]) };
        let mut join_a = first;
        let mut join_b = second;
        while join_a != join_b {
            if tree.depth[join_a] >= tree.depth[join_b] {
                join_a = tree.parent[join_a];
            } else {
                join_b = tree.parent[join_b];
            }
        }
        let join = join_a;

        // Flow runs from join down to `first`, across `e`, then up from
        // `second` back to join. The leaving arc is the last blocking arc in
        // that order.
        let residual_down = |w: usize, flow: &[i64]| {
            let a = tree.pred[w];
            if from[a] == tree.parent[w] { cap[a] - flow[a] } else { flow[a] }
        };
        let residual_up = |w: usize, flow: &[i64]| {
            let a = tree.pred[w];
            if from[a] == w { cap[a] - flow[a] } else { flow[a] }
        };
        let mut delta = cap[e];
        let mut leave: Option<usize> = None;
        let mut on_first_side = false;
        let mut first_min = i64::MAX;
        let mut first_leave = None;
        let mut w = first;
        while w != join {
            let r = residual_down(w, &flow);
            if r < first_min {
                first_min = r;
                first_leave = Some(w);
            }
            w = tree.parent[w];
        }
        let mut second_min = i64::MAX;
        let mut second_leave = None;
        let mut w = second;
        while w != join {
            let r = residual_up(w, &flow);
            if r <= second_min {
                second_min = r;
                second_leave = Some(w);
            }
            w = tree.parent[w];
        }
        if first_min < delta {
            delta = first_min;
            leave = first_leave;
            on_first_side = true;
        }
        if second_min <= delta {
            delta = second_min;
            leave = second_leave;
            on_first_side = false;
        }

        if delta > 0 {
            flow[e] += if state[e] == AT_LOWER { delta } else { -delta };
            let mut w = first;
            while w != join {
                let a = tree.pred[w];
                flow[a] += if from[a] == tree.parent[w] { delta } else { -delta };
                w = tree.parent[w];
            }
            let mut w = second;
            while w != join {
                let a = tree.pred[w];
                flow[a] += if from[a] == w { delta } else { -delta };
                w = tree.parent[w];
            }
        }

        match leave {
            None => state[e] = -state[e],
            Some(w) => {
                let out = tree.pred[w];
                state[out] = if flow[out] == 0 { AT_LOWER } else { AT_UPPER };
                state[e] = IN_TREE;
                for v in [from[out], to[out]] {
                    adj[v].retain(|&a| a != out);
                }
                adj[from[e]].push(e);
                adj[to[e]].push(e);
                let (top, under) = if on_first_side { (first, second) } else { (second, first) };
                rehang(&mut tree, &adj, top, under, e, &cost);
            }
        }
    }

    if flow[m..].iter().any(|&x| x != 0) {
        return None;
    }
    flow.truncate(m);
    Some(flow)
}
