//! White-space redistribution: places modules inside their rooms and level
//! shifters in the freed white space.
//!
//! Each shifter assigned to a room pushes the module away from its prefer
//! region (the part of its net box inside the room). The module settles where
//! the pushes balance, the remaining white space is tiled into shifter-sized
//! grids, and shifters take grids in order of increasing prefer-region area.
//! Shifters without a grid are matched to free grids inside progressively
//! inflated net boxes. Finally modules slide toward their voltage island or,
//! for the lowest voltage, toward the lower-left corner.

use crate::cbl::{islands, Floorplan};
use crate::flow::hungarian_matching;
use crate::geom::{Rect, EPS};
use crate::ls::{group_bbox, ilo, LsPlan};
use crate::model::TimingDag;

/// A prefer rectangle with its distances to the left, right, lower and upper
/// room walls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreferRegion {
    pub rect: Rect,
    pub w1: f64,
    pub w2: f64,
    pub h1: f64,
    pub h2: f64,
}

impl PreferRegion {
    pub fn new(room: &Rect, rect: Rect) -> Self {
        PreferRegion {
            rect,
            w1: rect.x0 - room.x0,
            w2: room.x1 - rect.x1,
            h1: rect.y0 - room.y0,
            h2: room.y1 - rect.y1,
        }
    }
}

/// `bbox ∩ room`; a box that misses the room collapses to the room point
/// nearest the box center.
pub fn prefer_region(room: &Rect, bbox: &Rect) -> PreferRegion {
    let rect = bbox.intersection(room).unwrap_or_else(|| {
        let (cx, cy) = bbox.center();
        let p = (cx.clamp(room.x0, room.x1), cy.clamp(room.y0, room.y1));
        Rect::bounding(p, p)
    });
    PreferRegion::new(room, rect)
}

/// Push on the module, `((w2 - w1) / w_r, (h2 - h1) / h_r)`. A region in the
/// lower-left corner pushes right and up.
pub fn ls_force(room: &Rect, pr: &PreferRegion) -> (f64, f64) {
    ((pr.w2 - pr.w1) / room.width(), (pr.h2 - pr.h1) / room.height())
}

/// Offset of the module's lower-left corner from the room's. An axis with no
/// push at all stays centered.
pub fn module_relative_position(room: (f64, f64), module: (f64, f64), forces: &[(f64, f64)]) -> (f64, f64) {
    let axis = |slack: f64, vals: &mut dyn Iterator<Item = f64>| {
        let (mut pos, mut neg) = (0.0, 0.0);
        for f in vals {
            if f >= 0.0 {
                pos += f;
            } else {
                neg += f;
            }
        }
        if pos - neg <= EPS {
            slack / 2.0
        } else {
            slack * pos / (pos - neg)
        }
    };
    let x = axis(room.0 - module.0, &mut forces.iter().map(|f| f.0));
    let y = axis(room.1 - module.1, &mut forces.iter().map(|f| f.1));
    (x, y)
}

/// Squares of side `sqrt(a_ls)` tiling up to four white strips around the
/// module: full-height strips left and right, module-wide strips below and
/// above. Slivers are dropped.
pub fn generate_grids(room: &Rect, module: &Rect, a_ls: i64) -> Vec<Rect> {
    let side = (a_ls as f64).sqrt();
    let strips = [
        Rect::new(room.x0, room.y0, module.x0, room.y1),
        Rect::new(module.x1, room.y0, room.x1, room.y1),
        Rect::new(module.x0, room.y0, module.x1, module.y0),
        Rect::new(module.x0, module.y1, module.x1, room.y1),
    ];
    let mut out = Vec::new();
    for s in strips {
        let nx = (s.width() / side + 1e-9).floor() as usize;
        let ny = (s.height() / side + 1e-9).floor() as usize;
        for iy in 0..ny {
            for ix in 0..nx {
                out.push(Rect::from_size(s.x0 + ix as f64 * side, s.y0 + iy as f64 * side, side, side));
            }
        }
    }
    out
}

fn dist2(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)
}

/// Shifters `(id, prefer region)` take grids in order of prefer-region area,
/// each the free grid nearest its region center. Returns the ids left
/// without a grid.
pub fn insert_room_ls(ls: &[(usize, PreferRegion)], grids: &[Rect], occupant: &mut [Option<usize>]) -> Vec<usize> {
    let mut order: Vec<&(usize, PreferRegion)> = ls.iter().collect();
    order.sort_by(|a, b| a.1.rect.area().total_cmp(&b.1.rect.area()).then(a.0.cmp(&b.0)));
    let mut left = Vec::new();
    for &(id, pr) in order {
        let c = pr.rect.center();
        let pick = (0..grids.len())
            .filter(|&g| occupant[g].is_none())
            .min_by(|&a, &b| dist2(grids[a].center(), c).total_cmp(&dist2(grids[b].center(), c)).then(a.cmp(&b)));
        match pick {
            Some(g) => occupant[g] = Some(id),
            None => left.push(id),
        }
    }
    left
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ElsOutcome {
    /// `(l, matched)` per round.
    pub rounds: Vec<(f64, usize)>,
    /// Placed on the nearest free grid after `l` reached the cap.
    pub forced: Vec<usize>,
    /// No free grid left.
    pub failed: Vec<usize>,
}

/// Matches shifters `(id, net box)` to free grids inside boxes inflated by
/// `l = step, 2 step, ...` until none are left or `l` exceeds `cap`.
pub fn insert_els(requests: &[(usize, Rect)], grids: &[Rect], occupant: &mut [Option<usize>], step: f64, cap: f64) -> ElsOutcome {
    assert!(step > 0.0, "step must be positive");
    let mut out = ElsOutcome::default();
    let mut pending: Vec<(usize, Rect)> = requests.to_vec();
    let mut l = 0.0;
    while !pending.is_empty() && l <= cap {
        l += step;
        let n = pending.len();
        // Keeping each shifter's n nearest candidates preserves the maximum
        // matching size.
        let mut cols: Vec<usize> = Vec::new();
        let mut adj: Vec<Vec<usize>> = Vec::with_capacity(n);
        for (_, bbox) in &pending {
            let lb = bbox.inflate(l);
            let c = bbox.center();
            let mut cand: Vec<usize> = (0..grids.len())
                .filter(|&g| occupant[g].is_none() && lb.contains_rect(&grids[g]))
                .collect();
            cand.sort_by(|&a, &b| dist2(grids[a].center(), c).total_cmp(&dist2(grids[b].center(), c)).then(a.cmp(&b)));
            cand.truncate(n);
            cols.extend(&cand);
            adj.push(cand);
        }
        cols.sort_unstable();
        cols.dedup();
        if cols.is_empty() {
            out.rounds.push((l, 0));
            continue;
        }
        let costs: Vec<Vec<Option<f64>>> = pending
            .iter()
            .zip(&adj)
            .map(|((_, bbox), cand)| {
                let c = bbox.center();
                cols.iter()
                    .map(|g| cand.contains(g).then(|| dist2(grids[*g].center(), c).sqrt()))
                    .collect()
            })
            .collect();
        let m = hungarian_matching(&costs);
        let mut done = vec![false; n];
        for &(i, j) in &m.pairs {
            occupant[cols[j]] = Some(pending[i].0);
            done[i] = true;
        }
        out.rounds.push((l, m.len()));
        let mut k = 0;
        pending.retain(|_| {
            k += 1;
            !done[k - 1]
        });
    }
    for (id, bbox) in pending {
        let c = bbox.center();
        let pick = (0..grids.len())
            .filter(|&g| occupant[g].is_none())
            .min_by(|&a, &b| dist2(grids[a].center(), c).total_cmp(&dist2(grids[b].center(), c)).then(a.cmp(&b)));
        match pick {
            Some(g) => {
                occupant[g] = Some(id);
                out.forced.push(id);
            }
            None => out.failed.push(id),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub rect: Rect,
    pub room: usize,
    /// Shifter instance placed here.
    pub occupant: Option<usize>,
}

/// A placed shifter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacedLs {
    pub instance: usize,
    /// DAG edge of its net.
    pub edge: usize,
    pub grid: usize,
    pub rect: Rect,
}

/// Absolute positions of modules and level shifters.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacedDesign {
    pub chip: Rect,
    pub rooms: Vec<Rect>,
    pub modules: Vec<Rect>,
    pub levels: Vec<usize>,
    /// Same-voltage rooms joined through shared edges.
    pub islands: Vec<Vec<usize>>,
    pub grids: Vec<Grid>,
    /// Ordered by instance.
    pub shifters: Vec<PlacedLs>,
    /// Instances that found no free grid.
    pub failed: Vec<usize>,
    /// Instances placed by the inflated-box matching.
    pub via_els: Vec<usize>,
}

impl PlacedDesign {
    pub fn module_center(&self, i: usize) -> (f64, f64) {
        self.modules[i].center()
    }

    pub fn net_bbox(&self, dag: &TimingDag, edge: usize) -> Rect {
        let e = &dag.edges()[edge];
        Rect::bounding(self.module_center(e.from), self.module_center(e.to))
    }

    pub fn hpwl(&self, dag: &TimingDag) -> f64 {
        (0..dag.edges().len()).map(|k| self.net_bbox(dag, k).half_perimeter()).sum()
    }

    pub fn ls_ilo(&self, dag: &TimingDag, ls: &PlacedLs) -> f64 {
        ilo(&self.net_bbox(dag, ls.edge), ls.rect.center())
    }

    pub fn total_ilo(&self, dag: &TimingDag) -> f64 {
        self.shifters.iter().map(|s| self.ls_ilo(dag, s)).sum()
    }

    /// Summed island half-perimeters over module rectangles.
    pub fn pnr(&self) -> f64 {
        self.islands.iter().map(|isl| island_extent(isl, &self.modules)).sum()
    }

    /// Bounding box of every module and shifter.
    pub fn extent(&self) -> Rect {
        let mut it = self.modules.iter().chain(self.shifters.iter().map(|s| &s.rect));
        match it.next() {
            Some(first) => it.fold(*first, |acc, r| acc.union(r)),
            None => Rect::new(0.0, 0.0, 0.0, 0.0),
        }
    }

    pub fn area(&self) -> f64 {
        self.extent().area()
    }

    pub fn shifters_in_room(&self, room: usize) -> impl Iterator<Item = &PlacedLs> + '_ {
        self.shifters.iter().filter(move |s| self.grids[s.grid].room == room)
    }

    /// Count of overlapping pairs among modules and shifters, plus shifters
    /// outside the chip or overlapping their room's module.
    pub fn overlap_violations(&self) -> usize {
        let mut rects: Vec<&Rect> = self.modules.iter().collect();
        rects.extend(self.shifters.iter().map(|s| &s.rect));
        let mut bad = 0;
        for a in 0..rects.len() {
            for b in a + 1..rects.len() {
                if rects[a].overlaps(rects[b]) {
                    bad += 1;
                }
            }
        }
        for s in &self.shifters {
            let room = &self.rooms[self.grids[s.grid].room];
            if !self.chip.contains_rect(&s.rect) || !room.contains_rect(&s.rect) {
                bad += 1;
            }
        }
        bad
    }

    /// Rooms where module plus shifter area exceeds the room.
    pub fn area_condition_violations(&self) -> usize {
        (0..self.rooms.len())
            .filter(|&j| {
                let used = self.modules[j].area() + self.shifters_in_room(j).map(|s| s.rect.area()).sum::<f64>();
                used > self.rooms[j].area() + EPS
            })
            .count()
    }
}

fn island_extent(members: &[usize], modules: &[Rect]) -> f64 {
    let mut r = modules[members[0]];
    for &i in &members[1..] {
        r = r.union(&modules[i]);
    }
    r.half_perimeter()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WsrConfig {
    pub a_ls: i64,
    /// Growth per round of the inflated search box, `sqrt(a_ls)` when unset.
    pub step: Option<f64>,
    pub final_moves: bool,
}

impl WsrConfig {
    pub fn new(a_ls: i64) -> Self {
        WsrConfig { a_ls, step: None, final_moves: true }
    }
}

/// Runs the full white-space redistribution on a room-level floorplan whose
/// shifters were assigned by [`crate::ls::plan_ls`].
pub fn run_wsr(fp: &Floorplan, dag: &TimingDag, levels: &[usize], plan: &LsPlan, cfg: WsrConfig) -> PlacedDesign {
    let m = fp.rooms.len();
    let rooms: Vec<Rect> = fp.rooms.iter().map(|r| r.rect()).collect();
    let asg = &plan.assignment;
    let mut modules = Vec::with_capacity(m);
    let mut grids: Vec<Grid> = Vec::new();
    let mut leftovers = Vec::new();
    for j in 0..m {
        let room = rooms[j];
        let dims = fp.module_dims[j];
        let mine: Vec<(usize, PreferRegion)> = asg
            .in_room(j)
            .into_iter()
            .map(|i| (i, prefer_region(&room, &group_bbox(fp, &plan.groups[asg.instances[i].group]))))
            .collect();
        let forces: Vec<(f64, f64)> = mine.iter().map(|(_, pr)| ls_force(&room, pr)).collect();
        let (dx, dy) = module_relative_position((room.width(), room.height()), (dims.0 as f64, dims.1 as f64), &forces);
        let module = Rect::from_size(room.x0 + dx, room.y0 + dy, dims.0 as f64, dims.1 as f64);
        modules.push(module);
        let local = generate_grids(&room, &module, cfg.a_ls);
        let mut occ = vec![None; local.len()];
        leftovers.extend(insert_room_ls(&mine, &local, &mut occ));
        grids.extend(local.into_iter().zip(occ).map(|(rect, occupant)| Grid { rect, room: j, occupant }));
    }

    let mut els = asg.els();
    els.extend(leftovers);
    els.sort_unstable();
    let center = |i: usize, modules: &[Rect]| modules[i].center();
    let requests: Vec<(usize, Rect)> = els
        .iter()
        .map(|&i| {
            let e = &dag.edges()[asg.instances[i].edge];
            (i, Rect::bounding(center(e.from, &modules), center(e.to, &modules)))
        })
        .collect();
    let rects: Vec<Rect> = grids.iter().map(|g| g.rect).collect();
    let mut occ: Vec<Option<usize>> = grids.iter().map(|g| g.occupant).collect();
    let chip = fp.chip();
    let outcome = insert_els(&requests, &rects, &mut occ, cfg.step.unwrap_or((cfg.a_ls as f64).sqrt()), chip.half_perimeter());
    for (g, o) in grids.iter_mut().zip(occ) {
        g.occupant = o;
    }

    let mut shifters: Vec<PlacedLs> = grids
        .iter()
        .enumerate()
        .filter_map(|(gi, g)| g.occupant.map(|i| PlacedLs { instance: i, edge: asg.instances[i].edge, grid: gi, rect: g.rect }))
        .collect();
    shifters.sort_by_key(|s| s.instance);
    let via_els: Vec<usize> = els.iter().copied().filter(|i| !outcome.failed.contains(i)).collect();

    let mut design = PlacedDesign {
        chip,
        rooms,
        modules,
        levels: levels.to_vec(),
        islands: islands(fp, levels),
        grids,
        shifters,
        failed: outcome.failed,
        via_els,
    };
    if cfg.final_moves {
        final_module_moves(&mut design, dag);
    }
    design
}

/// Slides `rect` toward `target` (lower-left corner), x first, stopping at
/// the first obstacle.
fn slide(rect: Rect, target: (f64, f64), obstacles: &[Rect]) -> Rect {
    let (w, h) = (rect.width(), rect.height());
    let mut r = rect;
    let tx = target.0;
    if tx < r.x0 - EPS {
        let stop = obstacles
            .iter()
            .filter(|o| o.y0 < r.y1 - EPS && o.y1 > r.y0 + EPS && o.x1 <= r.x0 + EPS)
            .map(|o| o.x1)
            .fold(f64::NEG_INFINITY, f64::max);
        r = Rect::from_size(tx.max(stop), r.y0, w, h);
    } else if tx > r.x0 + EPS {
        let stop = obstacles
            .iter()
            .filter(|o| o.y0 < r.y1 - EPS && o.y1 > r.y0 + EPS && o.x0 >= r.x1 - EPS)
            .map(|o| o.x0)
            .fold(f64::INFINITY, f64::min);
        r = Rect::from_size(tx.min(stop - w), r.y0, w, h);
    }
    let ty = target.1;
    if ty < r.y0 - EPS {
        let stop = obstacles
            .iter()
            .filter(|o| o.x0 < r.x1 - EPS && o.x1 > r.x0 + EPS && o.y1 <= r.y0 + EPS)
            .map(|o| o.y1)
            .fold(f64::NEG_INFINITY, f64::max);
        r = Rect::from_size(r.x0, ty.max(stop), w, h);
    } else if ty > r.y0 + EPS {
        let stop = obstacles
            .iter()
            .filter(|o| o.x0 < r.x1 - EPS && o.x1 > r.x0 + EPS && o.y0 >= r.y1 - EPS)
            .map(|o| o.y0)
            .fold(f64::INFINITY, f64::min);
        r = Rect::from_size(r.x0, ty.min(stop - h), w, h);
    }
    r
}

/// Moves modules in rooms that still have free grids. Lowest-voltage modules
/// head for the room's lower-left corner, the others for the center of their
/// island. A move is kept only when neither the island's half-perimeter nor
/// the overhead of the module's shifted nets grows.
pub fn final_module_moves(design: &mut PlacedDesign, dag: &TimingDag) {
    let m = design.modules.len();
    let Some(&lowest) = design.levels.iter().max() else {
        return;
    };
    let mut island_of = vec![0; m];
    for (k, isl) in design.islands.iter().enumerate() {
        for &i in isl {
            island_of[i] = k;
        }
    }
    for j in 0..m {
        let in_room: Vec<&Grid> = design.grids.iter().filter(|g| g.room == j).collect();
        if !in_room.iter().any(|g| g.occupant.is_none()) {
            continue;
        }
        let obstacles: Vec<Rect> = in_room.iter().filter(|g| g.occupant.is_some()).map(|g| g.rect).collect();
        let room = design.rooms[j];
        let cur = design.modules[j];
        let island = &design.islands[island_of[j]];
        let target = if design.levels[j] == lowest {
            (room.x0, room.y0)
        } else {
            let mut b = design.modules[island[0]];
            for &i in &island[1..] {
                b = b.union(&design.modules[i]);
            }
            let (cx, cy) = b.center();
            (
                (cx - cur.width() / 2.0).clamp(room.x0, room.x1 - cur.width()),
                (cy - cur.height() / 2.0).clamp(room.y0, room.y1 - cur.height()),
            )
        };
        let cand = slide(cur, target, &obstacles);
        if (cand.x0 - cur.x0).abs() <= EPS && (cand.y0 - cur.y0).abs() <= EPS {
            continue;
        }
        let before_pnr = island_extent(island, &design.modules);
        let before_ilo = module_ilo(design, dag, j);
        design.modules[j] = cand;
        let after_pnr = island_extent(&design.islands[island_of[j]], &design.modules);
        let after_ilo = module_ilo(design, dag, j);
        if after_pnr > before_pnr + EPS || after_ilo > before_ilo + EPS {
            design.modules[j] = cur;
        }
    }
}

fn module_ilo(design: &PlacedDesign, dag: &TimingDag, j: usize) -> f64 {
    design
        .shifters
        .iter()
        .filter(|s| {
            let e = &dag.edges()[s.edge];
            e.from == j || e.to == j
        })
        .map(|s| design.ls_ilo(dag, s))
        .sum()
}
