//! Random instance builders and brute-force oracles shared by the
//! integration tests.

#![allow(dead_code)]

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vlsaf::cbl::{pack, Cbl, Floorplan};
use vlsaf::io::{generate_benchmark, Bench, GenConfig};
use vlsaf::model::{DagEdge, Delay, DpCurve, Module, Power, TimingDag};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Convex curve with `k` points: delays strictly increasing, powers
/// strictly decreasing with strictly shrinking slope magnitudes.
pub fn random_curve<R: Rng>(rng: &mut R, k: usize) -> DpCurve {
    loop {
        let mut pts = vec![(rng.gen_range(1..=8i64), rng.gen_range(30..=90i64))];
        let mut ok = true;
        let mut last_slope = f64::INFINITY;
        for _ in 1..k {
            let (d, p) = *pts.last().unwrap();
            let dd = rng.gen_range(1..=5);
            let dp = rng.gen_range(1..=15);
            let slope = dp as f64 / dd as f64;
            if slope >= last_slope || p - dp < 0 {
                ok = false;
                break;
            }
            last_slope = slope;
            pts.push((d + dd, p - dp));
        }
        if ok {
            if let Ok(c) = DpCurve::new(pts) {
                return c;
            }
        }
    }
}

/// Random DAG whose edges all run from a lower to a higher module index.
pub fn random_forward_edges<R: Rng>(rng: &mut R, m: usize) -> Vec<DagEdge> {
    let mut edges = Vec::new();
    for j in 1..m {
        for i in 0..j {
            if rng.gen_bool(0.3) {
                edges.push(DagEdge { from: i, to: j, net: format!("n{i}_{j}") });
            }
        }
    }
    edges
}

pub fn random_modules<R: Rng>(rng: &mut R, curves: &[DpCurve]) -> Vec<Module> {
    curves
        .iter()
        .enumerate()
        .map(|(i, c)| Module::new(format!("m{i}"), rng.gen_range(2..=12), rng.gen_range(2..=12), c.clone()).unwrap())
        .collect()
}

pub fn random_floorplan<R: Rng>(rng: &mut R, modules: &[Module]) -> Floorplan {
    pack(&Cbl::random(modules.len(), rng), modules).unwrap()
}

/// Longest source-to-sink path for a DAG given in index order, computed
/// without the library's topological machinery.
pub fn forward_longest_path(m: usize, edges: &[DagEdge], module_delay: &[Delay], edge_delay: &[Delay]) -> Delay {
    let mut start = vec![0 as Delay; m];
    for j in 0..m {
        for (e, &d) in edges.iter().zip(edge_delay) {
            assert!(e.from < e.to, "oracle needs index-ordered edges");
            if e.to == j {
                start[j] = start[j].max(start[e.from] + module_delay[e.from] + d);
            }
        }
    }
    (0..m).map(|i| start[i] + module_delay[i]).max().unwrap_or(0)
}

/// Least total power over all `k^m` point choices meeting `t_cycle`.
pub fn brute_force_power(m: usize, edges: &[DagEdge], curves: &[DpCurve], edge_delay: &[Delay], t_cycle: Delay) -> Option<Power> {
    let mut idx = vec![0usize; m];
    let mut best: Option<Power> = None;
    let mut delay = vec![0 as Delay; m];
    loop {
        for i in 0..m {
            delay[i] = curves[i].delay(idx[i]);
        }
        if forward_longest_path(m, edges, &delay, edge_delay) <= t_cycle {
            let p: Power = (0..m).map(|i| curves[i].power(idx[i])).sum();
            best = Some(best.map_or(p, |b: Power| b.min(p)));
        }
        let mut pos = 0;
        loop {
            if pos == m {
                return best;
            }
            idx[pos] += 1;
            if idx[pos] < curves[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Exhaustive shifter assignment: every way of splitting each group over its
/// candidate rooms, scored by (most shifters placed, then least summed cost).
/// `cands[g]` lists `(room, cost)`.
pub fn brute_force_ls(sizes: &[usize], cands: &[Vec<(usize, i64)>], caps: &[i64]) -> (usize, i64) {
    fn go(
        g: usize,
        sizes: &[usize],
        cands: &[Vec<(usize, i64)>],
        caps: &mut Vec<i64>,
        memo: &mut HashMap<(usize, Vec<i64>), (usize, i64)>,
    ) -> (usize, i64) {
        if g == sizes.len() {
            return (0, 0);
        }
        if let Some(&v) = memo.get(&(g, caps.clone())) {
            return v;
        }
        let mut best = (0usize, 0i64);
        let mut first = true;
        let mut counts = vec![0usize; cands[g].len()];
        loop {
            let used: usize = counts.iter().sum();
            let fits = used <= sizes[g] && counts.iter().zip(&cands[g]).all(|(&c, &(r, _))| c as i64 <= caps[r]);
            if fits {
                let cost: i64 = counts.iter().zip(&cands[g]).map(|(&c, &(_, f))| c as i64 * f).sum();
                for (&c, &(r, _)) in counts.iter().zip(&cands[g]) {
                    caps[r] -= c as i64;
                }
                let (n, rest) = go(g + 1, sizes, cands, caps, memo);
                for (&c, &(r, _)) in counts.iter().zip(&cands[g]) {
                    caps[r] += c as i64;
                }
                let cand = (used + n, cost + rest);
                if first || cand.0 > best.0 || (cand.0 == best.0 && cand.1 < best.1) {
                    best = cand;
                    first = false;
                }
            }
            let mut pos = 0;
            loop {
                if pos == counts.len() {
                    memo.insert((g, caps.clone()), best);
                    return best;
                }
                counts[pos] += 1;
                if counts[pos] <= sizes[g] {
                    break;
                }
                counts[pos] = 0;
                pos += 1;
            }
        }
    }
    // Parallel candidates to the same room cannot occur: one per (group, room).
    go(0, sizes, cands, &mut caps.to_vec(), &mut HashMap::new())
}

/// Maximum matching size by trying every subset of left vertices in order.
pub fn brute_force_matching_size(adj: &[Vec<bool>], cols: usize) -> usize {
    fn go(i: usize, adj: &[Vec<bool>], used: &mut Vec<bool>) -> usize {
        if i == adj.len() {
            return 0;
        }
        let mut best = go(i + 1, adj, used);
        for j in 0..used.len() {
            if adj[i][j] && !used[j] {
                used[j] = true;
                best = best.max(1 + go(i + 1, adj, used));
                used[j] = false;
            }
        }
        best
    }
    go(0, adj, &mut vec![false; cols])
}

/// Checks that `text` is one well-formed XML element tree: balanced tags,
/// quoted attributes, no stray `<`.
pub fn xml_well_formed(text: &str) -> Result<(), String> {
    let mut stack: Vec<String> = Vec::new();
    let mut rest = text.trim();
    let mut roots = 0;
    while !rest.is_empty() {
        let Some(lt) = rest.find('<') else {
            return if rest.trim().is_empty() { Ok(()) } else { Err(format!("text outside root: {rest:.20}")) };
        };
        if stack.is_empty() && !rest[..lt].trim().is_empty() {
            return Err("text outside root".into());
        }
        let gt = rest[lt..].find('>').ok_or("unterminated tag")? + lt;
        let tag = &rest[lt + 1..gt];
        if tag.contains('<') {
            return Err(format!("`<` inside tag `{tag}`"));
        }
        if let Some(name) = tag.strip_prefix('/') {
            match stack.pop() {
                Some(open) if open == name.trim() => {}
                other => return Err(format!("closing `{name}` does not match {other:?}")),
            }
        } else if !tag.starts_with('?') && !tag.starts_with('!') {
            let self_closing = tag.ends_with('/');
            let body = tag.trim_end_matches('/');
            let name = body.split_whitespace().next().ok_or("empty tag")?.to_string();
            if body[name.len()..].matches('"').count() % 2 != 0 {
                return Err(format!("unbalanced quotes in `{tag}`"));
            }
            if stack.is_empty() {
                roots += 1;
            }
            if !self_closing {
                stack.push(name);
            }
        }
        rest = &rest[gt + 1..];
    }
    if !stack.is_empty() {
        return Err(format!("unclosed {stack:?}"));
    }
    if roots != 1 {
        return Err(format!("{roots} root elements"));
    }
    Ok(())
}

pub fn generated(m: usize, k: usize, seed: u64) -> Bench {
    generate_benchmark(&GenConfig::new(m, k, seed)).unwrap()
}

pub fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Index-ordered DAG with a clock period between the fastest and slowest
/// longest paths.
pub fn random_va_instance<R: Rng>(rng: &mut R, m: usize, k: usize) -> (TimingDag, Vec<DpCurve>, Vec<Delay>, Floorplan) {
    let curves: Vec<DpCurve> = (0..m).map(|_| random_curve(rng, k)).collect();
    let modules = random_modules(rng, &curves);
    let edges = random_forward_edges(rng, m);
    let fp = random_floorplan(rng, &modules);
    let delta = 0.2;
    let probe = TimingDag::new(m, edges.clone(), 1, delta).unwrap();
    let delays = vlsaf::voltage::edge_delays(&fp, &probe);
    let fast: Vec<Delay> = curves.iter().map(|c| c.delay(0)).collect();
    let slow: Vec<Delay> = curves.iter().map(|c| c.delay(c.len() - 1)).collect();
    let lo = forward_longest_path(m, &edges, &fast, &delays);
    let hi = forward_longest_path(m, &edges, &slow, &delays);
    let t = rng.gen_range(lo..=hi.max(lo));
    let dag = TimingDag::new(m, edges, t.max(1), delta).unwrap();
    (dag, curves, delays, fp)
}

pub struct LsCase {
    pub groups: Vec<vlsaf::ls::LsGroup>,
    pub infos: Vec<vlsaf::ls::FeasibleRegionInfo>,
    pub ws: Vec<i64>,
    pub a_ls: i64,
}

impl LsCase {
    /// `(size per group, (room, F) candidates per group, capacity per room)`.
    pub fn oracle_input(&self) -> (Vec<usize>, Vec<Vec<(usize, i64)>>, Vec<i64>) {
        let sizes = self.groups.iter().map(|g| g.size()).collect();
        let mut cands = vec![Vec::new(); self.groups.len()];
        for f in &self.infos {
            cands[f.group].push((f.room, f.cost));
        }
        let caps = self.ws.iter().map(|&w| w.max(0) / self.a_ls).collect();
        (sizes, cands, caps)
    }
}

/// Rooms of random size scattered over a 60 x 60 square, each holding a
/// smaller module, and groups with random net boxes.
pub fn random_ls_case<R: Rng>(rng: &mut R, groups: usize, rooms: usize) -> LsCase {
    use vlsaf::geom::Rect;
    use vlsaf::ls::{feasible_region, LsCostParams, LsGroup};
    let a_ls = rng.gen_range(1..=4);
    let mut room_rects = Vec::new();
    let mut dims = Vec::new();
    for _ in 0..rooms {
        let (w, h) = (rng.gen_range(2..=14i64), rng.gen_range(2..=14i64));
        let (x, y) = (rng.gen_range(0..=46i64), rng.gen_range(0..=46i64));
        room_rects.push(Rect::from_size(x as f64, y as f64, w as f64, h as f64));
        dims.push((rng.gen_range(1..=w), rng.gen_range(1..=h)));
    }
    let ws: Vec<i64> = room_rects
        .iter()
        .zip(&dims)
        .map(|(r, d)| vlsaf::ls::white_space_area((r.width() as i64, r.height() as i64), *d))
        .collect();
    let mut gs = Vec::new();
    let mut infos = Vec::new();
    let mut edge = 0;
    for g in 0..groups {
        let size = rng.gen_range(1..=3);
        gs.push(LsGroup { source: g, sink: g + groups, edges: (edge..edge + size).collect() });
        edge += size;
        let a = (rng.gen_range(0.0..60.0), rng.gen_range(0.0..60.0));
        let b = (rng.gen_range(0.0..60.0), rng.gen_range(0.0..60.0));
        let bbox = Rect::bounding(a, b);
        for (ri, room) in room_rects.iter().enumerate() {
            if let Some(f) = feasible_region(g, ri, room, dims[ri], &bbox, LsCostParams::default()) {
                infos.push(f);
            }
        }
    }
    LsCase { groups: gs, infos, ws, a_ls }
}

/// A short annealing schedule for end-to-end tests.
pub fn quick(mode: vlsaf::anneal::Mode, seed: u64, temps: usize) -> vlsaf::io::PipelineConfig {
    vlsaf::io::PipelineConfig {
        mode,
        anneal: vlsaf::anneal::AnnealConfig { seed, max_temps: Some(temps), final_nodes: 256, ..Default::default() },
        ..Default::default()
    }
}

/// Every geometric check on a placed design; returns the first failure.
pub fn design_soundness(out: &vlsaf::io::PipelineOutput) -> Result<(), String> {
    let d = &out.design;
    if d.overlap_violations() != 0 {
        return Err(format!("{} overlaps", d.overlap_violations()));
    }
    if d.area_condition_violations() != 0 {
        return Err(format!("{} rooms over their area", d.area_condition_violations()));
    }
    for (j, (room, m)) in d.rooms.iter().zip(&d.modules).enumerate() {
        if !room.contains_rect(m) {
            return Err(format!("module {j} leaves its room"));
        }
    }
    for s in &d.shifters {
        let g = &d.grids[s.grid];
        if g.occupant != Some(s.instance) || g.rect != s.rect {
            return Err(format!("shifter {} does not match its grid", s.instance));
        }
        if d.modules.iter().any(|m| m.overlaps(&s.rect)) {
            return Err(format!("shifter {} sits on a module", s.instance));
        }
    }
    let placed_in_room = d.shifters.len() - d.via_els.len();
    let free_before_els = d.grids.len() - placed_in_room;
    let demand = d.via_els.len() + d.failed.len();
    if free_before_els >= demand && !d.failed.is_empty() {
        return Err(format!("{} shifters failed with {free_before_els} free grids for {demand}", d.failed.len()));
    }
    if d.shifters.len() + d.failed.len() != out.plan.assignment.instances.len() {
        return Err("shifter count mismatch".into());
    }
    Ok(())
}
