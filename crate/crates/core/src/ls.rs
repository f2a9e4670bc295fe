//! Level-shifter assignment to rooms.
//!
//! Every two-pin net driven from a lower voltage into a higher one needs a
//! shifter. Shifters of nets with the same source and sink form a group and
//! share a bounding box. A room whose interior meets that box is a candidate;
//! the room's white space is split into the part inside the box (`fr1`) and
//! the rest, and the share of `fr1` drives the assignment cost `F`. Groups are
//! routed to rooms by a min-cost flow that first maximises the number of
//! placed shifters and then minimises the summed `F`.

use crate::cbl::Floorplan;
use crate::flow::{min_cost_flow, FlowNetwork};
use crate::geom::{Rect, EPS};
use crate::model::{TimingDag, VoltageAssignment};

/// Shifters needed on nets from `source` to `sink`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LsGroup {
    pub source: usize,
    pub sink: usize,
    /// DAG edge indices, one shifter each.
    pub edges: Vec<usize>,
}

impl LsGroup {
    pub fn size(&self) -> usize {
        self.edges.len()
    }
}

/// One group per `(source, sink)` pair whose source sits at a larger level
/// index (lower voltage) than its sink. Sorted by `(source, sink)`.
pub fn required_ls(va: &VoltageAssignment, dag: &TimingDag) -> Vec<LsGroup> {
    let mut groups: Vec<LsGroup> = Vec::new();
    let mut order: Vec<usize> = (0..dag.edges().len()).collect();
    order.sort_by_key(|&k| (dag.edges()[k].from, dag.edges()[k].to, k));
    for k in order {
        let e = &dag.edges()[k];
        if va.levels[e.from] <= va.levels[e.to] {
            continue;
        }
        match groups.last_mut() {
            Some(g) if g.source == e.from && g.sink == e.to => g.edges.push(k),
            _ => groups.push(LsGroup { source: e.from, sink: e.to, edges: vec![k] }),
        }
    }
    groups
}

pub fn total_shifters(groups: &[LsGroup]) -> usize {
    groups.iter().map(LsGroup::size).sum()
}

/// `w_r * h_r - w_m * h_m`.
pub fn white_space_area(room: (i64, i64), module: (i64, i64)) -> i64 {
    room.0 * room.1 - module.0 * module.1
}

/// Area of the white space inside `bbox`, given the room and module sizes and
/// the dimensions `(w, h)` of `bbox ∩ room`.
pub fn fr1_area(room: (f64, f64), module: (f64, f64), inter: (f64, f64)) -> f64 {
    let (wc, hc) = (room.0 - module.0, room.1 - module.1);
    let w = (inter.0 - wc).max(0.0);
    let h = (inter.1 - hc).max(0.0);
    inter.0 * inter.1 - w * h
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsCostParams {
    pub mu: f64,
    pub k: f64,
}

impl Default for LsCostParams {
    fn default() -> Self {
        LsCostParams { mu: 0.01, k: 1.0 }
    }
}

/// `ceil(1 / (p + mu) + (1 - p) * k * (term1 + term2))`.
pub fn edge_cost(p: f64, term1: f64, term2: f64, params: LsCostParams) -> i64 {
    let v = 1.0 / (p + params.mu) + (1.0 - p) * params.k * (term1 + term2);
    (v - 1e-9).ceil() as i64
}

/// Feasible-region data for one (group, room) candidate pair.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleRegionInfo {
    pub group: usize,
    pub room: usize,
    pub ws: i64,
    pub fr1: f64,
    pub p: f64,
    /// Channel widths `w_r - w_m` and `h_r - h_m`.
    pub wc: f64,
    pub hc: f64,
    /// Dimensions of `bbox ∩ room`.
    pub wij: f64,
    pub hij: f64,
    pub cost: i64,
}

/// True when the closed box meets the open room interior. A zero-width box
/// running through a room counts; one lying on the room boundary does not.
pub fn is_candidate(bbox: &Rect, room: &Rect) -> bool {
    bbox.x0 < room.x1 - EPS && bbox.x1 > room.x0 + EPS && bbox.y0 < room.y1 - EPS && bbox.y1 > room.y0 + EPS
}

pub fn feasible_region(
    group: usize,
    room_idx: usize,
    room: &Rect,
    module: (i64, i64),
    bbox: &Rect,
    params: LsCostParams,
) -> Option<FeasibleRegionInfo> {
    if !is_candidate(bbox, room) {
        return None;
    }
    let inter = bbox.intersection(room)?;
    let (wr, hr) = (room.width(), room.height());
    let (wm, hm) = (module.0 as f64, module.1 as f64);
    let (wij, hij) = (inter.width(), inter.height());
    let ws = white_space_area((wr as i64, hr as i64), module);
    let fr1 = fr1_area((wr, hr), (wm, hm), (wij, hij));
    let p = if ws != 0 { (fr1 / ws as f64).clamp(0.0, 1.0) } else { 0.0 };
    let (wc, hc) = (wr - wm, hr - hm);
    let term1 = if wc != 0.0 { (hr - hij) / wc } else { 0.0 };
    let term2 = if hc != 0.0 { (wr - wij) / hc } else { 0.0 };
    Some(FeasibleRegionInfo {
        group,
        room: room_idx,
        ws,
        fr1,
        p,
        wc,
        hc,
        wij,
        hij,
        cost: edge_cost(p, term1, term2, params),
    })
}

/// Net bounding box of a group in the room-level floorplan.
pub fn group_bbox(fp: &Floorplan, g: &LsGroup) -> Rect {
    Rect::bounding(fp.module_center(g.source), fp.module_center(g.sink))
}

/// All candidate pairs, group-major with rooms ascending.
pub fn candidates(fp: &Floorplan, groups: &[LsGroup], params: LsCostParams) -> Vec<FeasibleRegionInfo> {
    let mut out = Vec::new();
    for (gi, g) in groups.iter().enumerate() {
        let bbox = group_bbox(fp, g);
        for (ri, room) in fp.rooms.iter().enumerate() {
            if let Some(info) = feasible_region(gi, ri, &room.rect(), fp.module_dims[ri], &bbox, params) {
                out.push(info);
            }
        }
    }
    out
}

/// The assignment network and the bookkeeping needed to read it back.
#[derive(Debug, Clone)]
pub struct LsNetwork {
    pub net: FlowNetwork,
    pub num_groups: usize,
    pub num_rooms: usize,
    /// `(group, room, arc index)` for every group-to-room arc.
    pub candidate_arcs: Vec<(usize, usize, usize)>,
    pub room_capacity: Vec<i64>,
    /// Reward per shifter on room-to-sink arcs, larger than any total `F`.
    pub bonus: i64,
    pub num_shifters: i64,
}

impl LsNetwork {
    pub const SOURCE: usize = 0;
    pub const SINK: usize = 1;

    pub fn group_node(&self, g: usize) -> usize {
        2 + g
    }

    pub fn room_node(&self, r: usize) -> usize {
        2 + self.num_groups + r
    }
}

/// Nodes `s, t`, one per group, one per room. Arcs `s -> group` (size, 0),
/// `group -> room` per candidate (size, `F`), `room -> t`
/// (`floor(ws / a_ls)`, `-B`).
pub fn build_ls_network(groups: &[LsGroup], ws: &[i64], infos: &[FeasibleRegionInfo], a_ls: i64) -> LsNetwork {
    let (g, r) = (groups.len(), ws.len());
    let mut net = FlowNetwork::new(2 + g + r);
    let mut bonus: i64 = 1;
    for (gi, grp) in groups.iter().enumerate() {
        let worst = infos.iter().filter(|f| f.group == gi).map(|f| f.cost).max().unwrap_or(0);
        bonus += grp.size() as i64 * worst;
    }
    for (gi, grp) in groups.iter().enumerate() {
        net.add_arc(LsNetwork::SOURCE, 2 + gi, 0, 0, grp.size() as i64);
    }
    let mut candidate_arcs = Vec::with_capacity(infos.len());
    for f in infos {
        let a = net.add_arc(2 + f.group, 2 + g + f.room, f.cost, 0, groups[f.group].size() as i64);
        candidate_arcs.push((f.group, f.room, a));
    }
    let room_capacity: Vec<i64> = ws.iter().map(|&w| (w.max(0)) / a_ls).collect();
    for (ri, &cap) in room_capacity.iter().enumerate() {
        net.add_arc(2 + g + ri, LsNetwork::SINK, -bonus, 0, cap);
    }
    LsNetwork {
        net,
        num_groups: g,
        num_rooms: r,
        candidate_arcs,
        room_capacity,
        bonus,
        num_shifters: total_shifters(groups) as i64,
    }
}

/// A single shifter: its group and the DAG edge it sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LsInstance {
    pub group: usize,
    pub edge: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LsAssignment {
    /// Group-major, edges in group order.
    pub instances: Vec<LsInstance>,
    /// Room per instance, `None` for shifters left to the white-space phase.
    pub room_of: Vec<Option<usize>>,
    /// Summed `F` over assigned shifters.
    pub total_cost: i64,
}

impl LsAssignment {
    /// Instances that found no room.
    pub fn els(&self) -> Vec<usize> {
        (0..self.instances.len()).filter(|&i| self.room_of[i].is_none()).collect()
    }

    pub fn unassigned(&self) -> usize {
        self.room_of.iter().filter(|r| r.is_none()).count()
    }

    pub fn assigned(&self) -> usize {
        self.instances.len() - self.unassigned()
    }

    pub fn in_room(&self, room: usize) -> Vec<usize> {
        (0..self.instances.len()).filter(|&i| self.room_of[i] == Some(room)).collect()
    }
}

/// Solves the network closed by a zero-cost `t -> s` return arc.
pub fn assign_ls(network: &LsNetwork, groups: &[LsGroup]) -> LsAssignment {
    let mut net = network.net.clone();
    net.add_arc(LsNetwork::SINK, LsNetwork::SOURCE, 0, 0, network.num_shifters);
    let flow = min_cost_flow(&net);
    debug_assert!(flow.feasible);

    let mut instances = Vec::new();
    let mut room_of = Vec::new();
    let mut total_cost = 0;
    for (gi, grp) in groups.iter().enumerate() {
        let mut slots: Vec<usize> = Vec::new();
        for &(g, room, arc) in &network.candidate_arcs {
            if g == gi {
                let f = flow.flow[arc];
                total_cost += f * net.arcs()[arc].cost;
                slots.extend(std::iter::repeat(room).take(f as usize));
            }
        }
        for (k, &edge) in grp.edges.iter().enumerate() {
            instances.push(LsInstance { group: gi, edge });
            room_of.push(slots.get(k).copied());
        }
    }
    LsAssignment { instances, room_of, total_cost }
}

/// Phase-I result for one floorplan.
#[derive(Debug, Clone, PartialEq)]
pub struct LsPlan {
    pub groups: Vec<LsGroup>,
    pub infos: Vec<FeasibleRegionInfo>,
    pub assignment: LsAssignment,
}

pub fn plan_ls(fp: &Floorplan, dag: &TimingDag, va: &VoltageAssignment, a_ls: i64, params: LsCostParams) -> LsPlan {
    let groups = required_ls(va, dag);
    let infos = candidates(fp, &groups, params);
    let ws: Vec<i64> = (0..fp.rooms.len()).map(|i| fp.white_space(i)).collect();
    let network = build_ls_network(&groups, &ws, &infos, a_ls);
    let assignment = assign_ls(&network, &groups);
    LsPlan { groups, infos, assignment }
}

/// Growth of the box half-perimeter when it is stretched to reach `p`.
pub fn ilo(bbox: &Rect, p: (f64, f64)) -> f64 {
    let dx = (p.0 - bbox.x1).max(0.0) + (bbox.x0 - p.0).max(0.0);
    let dy = (p.1 - bbox.y1).max(0.0) + (bbox.y0 - p.1).max(0.0);
    dx + dy
}
