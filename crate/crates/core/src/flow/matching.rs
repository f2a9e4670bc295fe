/// A bipartite matching: `(left, right)` index pairs and their summed cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    pub cost: f64,
}

impl Matching {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Maximum-cardinality, then minimum-cost, bipartite matching.
///
/// `costs[i][j]` is `None` when left vertex `i` and right vertex `j` are not
/// adjacent. Every real edge receives a bonus larger than any cost difference
/// between matchings and absent edges cost zero, so the Hungarian method
/// returns a matching of maximum size and, among those, of least cost. Runs in
/// `O(a^2 b)` for `a <= b` vertices on the two sides.
pub fn hungarian_matching(costs: &[Vec<Option<f64>>]) -> Matching {
    let rows = costs.len();
    let cols = costs.iter().map(|r| r.len()).max().unwrap_or(0);
    if rows == 0 || cols == 0 {
        return Matching { pairs: Vec::new(), cost: 0.0 };
    }
    let get = |i: usize, j: usize| costs.get(i).and_then(|r| r.get(j)).copied().flatten();
    let max_abs = costs.iter().flatten().flatten().fold(0.0f64, |m, c| m.max(c.abs()));
    let bonus = 2.0 * rows.max(cols) as f64 * max_abs + 1.0;
    let transpose = rows > cols;
    let (n, m) = if transpose { (cols, rows) } else { (rows, cols) };
    let entry = |i: usize, j: usize| -> f64 {
        let c = if transpose { get(j, i) } else { get(i, j) };
        c.map_or(0.0, |c| c - bonus)
    };

    // Potentials-based Hungarian method for n <= m, 1-based internally.
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=m {
                if !used[j] {
                    let cur = entry(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut pairs = Vec::new();
    let mut cost = 0.0;
    for j in 1..=m {
        if p[j] == 0 {
            continue;
        }
        let (l, r) = if transpose { (j - 1, p[j] - 1) } else { (p[j] - 1, j - 1) };
        if let Some(c) = get(l, r) {
            pairs.push((l, r));
            cost += c;
        }
    }
    pairs.sort_unstable();
    Matching { pairs, cost }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pair() {
        let m = hungarian_matching(&[vec![Some(3.0)]]);
        assert_eq!(m.pairs, vec![(0, 0)]);
        assert_eq!(m.cost, 3.0);
    }

    #[test]
    fn empty_sides() {
        assert!(hungarian_matching(&[]).is_empty());
        assert!(hungarian_matching(&[vec![], vec![]]).is_empty());
    }

    #[test]
    fn cardinality_beats_cost() {
        // Matching (0,0) alone is cheap but blocks the larger matching.
        let costs = vec![vec![Some(0.0), Some(100.0)], vec![Some(100.0), None]];
        let m = hungarian_matching(&costs);
        assert_eq!(m.pairs, vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn rectangular_with_isolated_vertex() {
        let costs = vec![vec![None, None, None], vec![Some(1.0), Some(2.0), None]];
        let m = hungarian_matching(&costs);
        assert_eq!(m.pairs, vec![(1, 0)]);
    }

    #[test]
    fn tall_input_is_transposed() {
        let costs = vec![vec![Some(5.0)], vec![Some(1.0)], vec![None]];
        let m = hungarian_matching(&costs);
        assert_eq!(m.pairs, vec![(1, 0)]);
        assert_eq!(m.cost, 1.0);
    }
}
