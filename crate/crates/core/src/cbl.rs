//! Corner Block List floorplans.
//!
//! A CBL is a triple of lists: the block order, the orientation of every
//! insertion and the number of T-junctions each insertion covers. Packing
//! replays the insertions: the first block fills the chip, and every following
//! block is attached at the top-right corner, either on the right side
//! (vertical) or on top (horizontal), covering `t + 1` of the rooms currently
//! on that boundary. The resulting dissection is a mosaic of rooms, one module
//! per room, and real coordinates come from longest paths over the maximal
//! segments so that every room is at least as large as its module.

use rand::Rng;

use crate::error::{Error, Result};
use crate::geom::Rect;
use crate::model::{DagEdge, Module};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// Inserted on the right-hand side of the chip.
    Vertical,
    /// Inserted on top of the chip.
    Horizontal,
}

impl Orientation {
    fn flip(self) -> Self {
        match self {
            Orientation::Vertical => Orientation::Horizontal,
            Orientation::Horizontal => Orientation::Vertical,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cbl {
    /// Module index per insertion position.
    pub order: Vec<usize>,
    /// Orientation per insertion position (ignored for position 0).
    pub orient: Vec<Orientation>,
    /// Covered T-junctions per insertion position (ignored for position 0).
    pub tjunc: Vec<u32>,
    /// Rotation flag per module index.
    pub rotated: Vec<bool>,
}

impl Cbl {
    /// Modules in index order, alternating orientations, no T-junctions.
    pub fn initial(m: usize) -> Self {
        Cbl {
            order: (0..m).collect(),
            orient: (0..m)
                .map(|i| if i % 2 == 0 { Orientation::Vertical } else { Orientation::Horizontal })
                .collect(),
            tjunc: vec![0; m],
            rotated: vec![false; m],
        }
    }

    /// Random permutation and orientations with T-junction counts kept packable.
    pub fn random<R: Rng>(m: usize, rng: &mut R) -> Self {
        let mut cbl = Cbl::initial(m);
        for i in (1..m).rev() {
            let j = rng.gen_range(0..=i);
            cbl.order.swap(i, j);
        }
        for o in cbl.orient.iter_mut().skip(1) {
            *o = if rng.gen_bool(0.5) { Orientation::Vertical } else { Orientation::Horizontal };
        }
        let (mut right, mut top) = (1usize, 1usize);
        for pos in 1..m {
            let q = match cbl.orient[pos] {
                Orientation::Vertical => right,
                Orientation::Horizontal => top,
            };
            let t = rng.gen_range(0..q.min(3));
            cbl.tjunc[pos] = t as u32;
            match cbl.orient[pos] {
                Orientation::Vertical => {
                    right = right - (t + 1) + 1;
                    top += 1;
                }
                Orientation::Horizontal => {
                    top = top - (t + 1) + 1;
                    right += 1;
                }
            }
        }
        cbl
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Checks list lengths, the permutation and every T-junction count.
    pub fn validate(&self, m: usize) -> Result<()> {
        if self.order.len() != m || self.orient.len() != m || self.tjunc.len() != m || self.rotated.len() != m {
            return Err(Error::InvalidCbl(format!("lists must all have length {m}")));
        }
        let mut seen = vec![false; m];
        for &b in &self.order {
            if b >= m || seen[b] {
                return Err(Error::InvalidCbl("block order is not a permutation".into()));
            }
            seen[b] = true;
        }
        let (mut right, mut top) = (1usize, 1usize);
        for pos in 1..m {
            let t = self.tjunc[pos] as usize;
            let q = match self.orient[pos] {
                Orientation::Vertical => right,
                Orientation::Horizontal => top,
            };
            if t >= q {
                return Err(Error::InvalidCbl(format!(
                    "position {pos} covers {} rooms but only {q} are exposed",
                    t + 1
                )));
            }
            match self.orient[pos] {
                Orientation::Vertical => {
                    right -= t;
                    top += 1;
                }
                Orientation::Horizontal => {
                    top -= t;
                    right += 1;
                }
            }
        }
        Ok(())
    }
}

/// A room of the dissection, holding one module.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Room {
    pub module: usize,
    pub x: i64,
    pub y: i64,
    pub width: i64,
    pub height: i64,
}

impl Room {
    pub fn rect(&self) -> Rect {
        Rect::from_size(self.x as f64, self.y as f64, self.width as f64, self.height as f64)
    }

    pub fn area(&self) -> i64 {
        self.width * self.height
    }

    /// True when the rooms share a boundary segment of positive length.
    pub fn adjacent(&self, other: &Room) -> bool {
        let (ax1, ay1) = (self.x + self.width, self.y + self.height);
        let (bx1, by1) = (other.x + other.width, other.y + other.height);
        let y_overlap = ay1.min(by1) - self.y.max(other.y);
        let x_overlap = ax1.min(bx1) - self.x.max(other.x);
        ((ax1 == other.x || bx1 == self.x) && y_overlap > 0) || ((ay1 == other.y || by1 == self.y) && x_overlap > 0)
    }
}

/// Packed floorplan: one room per module plus the module outlines as packed
/// (after rotation).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Floorplan {
    /// Indexed by module.
    pub rooms: Vec<Room>,
    /// Module width/height per module after rotation.
    pub module_dims: Vec<(i64, i64)>,
    pub width: i64,
    pub height: i64,
}

impl Floorplan {
    pub fn area(&self) -> i64 {
        self.width * self.height
    }

    pub fn chip(&self) -> Rect {
        Rect::from_size(0.0, 0.0, self.width as f64, self.height as f64)
    }

    /// Pin position used during floorplanning: the room center, where the
    /// module sits before white space is redistributed.
    pub fn module_center(&self, module: usize) -> (f64, f64) {
        self.rooms[module].rect().center()
    }

    pub fn white_space(&self, module: usize) -> i64 {
        let (w, h) = self.module_dims[module];
        self.rooms[module].area() - w * h
    }
}

/// Packs a CBL into rooms sized for the given hard blocks.
pub fn pack(cbl: &Cbl, modules: &[Module]) -> Result<Floorplan> {
    let m = modules.len();
    if m == 0 {
        return Err(Error::InvalidCbl("no modules to pack".into()));
    }
    cbl.validate(m)?;

    // Segment ids: vertical 0 = chip left, horizontal 0 = chip bottom.
    // [left, right, bottom, top] per insertion position.
    let mut seg = vec![[0usize; 4]; m];
    seg[0] = [0, 1, 0, 1];
    let (mut v_count, mut h_count) = (2usize, 2usize);
    let (mut v_right, mut h_top) = (1usize, 1usize);
    let mut right_list = vec![0usize]; // top to bottom
    let mut top_list = vec![0usize]; // right to left

    for pos in 1..m {
        let t = cbl.tjunc[pos] as usize;
        match cbl.orient[pos] {
            Orientation::Vertical => {
                let vn = v_count;
                v_count += 1;
                let q = right_list.len();
                let bottom = if t + 1 == q { 0 } else { seg[right_list[t]][2] };
                for &r in &right_list[t + 1..] {
                    seg[r][1] = vn;
                }
                seg[pos] = [v_right, vn, bottom, h_top];
                let mut next = vec![pos];
                next.extend_from_slice(&right_list[t + 1..]);
                right_list = next;
                top_list.insert(0, pos);
                v_right = vn;
            }
            Orientation::Horizontal => {
                let hn = h_count;
                h_count += 1;
                let q = top_list.len();
                let left = if t + 1 == q { 0 } else { seg[top_list[t]][0] };
                for &r in &top_list[t + 1..] {
                    seg[r][3] = hn;
                }
                seg[pos] = [left, v_right, h_top, hn];
                let mut next = vec![pos];
                next.extend_from_slice(&top_list[t + 1..]);
                top_list = next;
                right_list.insert(0, pos);
                h_top = hn;
            }
        }
    }

    let module_dims: Vec<(i64, i64)> = modules
        .iter()
        .enumerate()
        .map(|(i, md)| if cbl.rotated[i] { (md.height, md.width) } else { (md.width, md.height) })
        .collect();

    // Segment ids were handed out in creation order, and every room spans from
    // an older segment to a newer one, so index order is topological.
    let mut by_left: Vec<usize> = (0..m).collect();
    by_left.sort_by_key(|&p| seg[p][0]);
    let mut x = vec![0i64; v_count];
    for &p in &by_left {
        let w = module_dims[cbl.order[p]].0;
        x[seg[p][1]] = x[seg[p][1]].max(x[seg[p][0]] + w);
    }
    let mut by_bottom: Vec<usize> = (0..m).collect();
    by_bottom.sort_by_key(|&p| seg[p][2]);
    let mut y = vec![0i64; h_count];
    for &p in &by_bottom {
        let h = module_dims[cbl.order[p]].1;
        y[seg[p][3]] = y[seg[p][3]].max(y[seg[p][2]] + h);
    }

    let mut rooms = vec![Room { module: 0, x: 0, y: 0, width: 0, height: 0 }; m];
    for pos in 0..m {
        let b = cbl.order[pos];
        let [l, r, bo, to] = seg[pos];
        rooms[b] = Room { module: b, x: x[l], y: y[bo], width: x[r] - x[l], height: y[to] - y[bo] };
    }
    Ok(Floorplan { rooms, module_dims, width: x[v_right], height: y[h_top] })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Swap(usize, usize),
    ToggleOrientation(usize),
    IncrementT(usize),
    DecrementT(usize),
    Rotate(usize),
}

/// Applies one random neighbourhood move, re-rolling moves that would make the
/// list unpackable.
pub fn perturb<R: Rng>(cbl: &Cbl, rng: &mut R, allow_rotation: bool) -> Cbl {
    perturb_with_move(cbl, rng, allow_rotation).0
}

/// As [`perturb`], also reporting the move that was applied (`None` when the
/// list admits no move at all).
pub fn perturb_with_move<R: Rng>(cbl: &Cbl, rng: &mut R, allow_rotation: bool) -> (Cbl, Option<Move>) {
    let m = cbl.len();
    let mut kinds = Vec::with_capacity(4);
    if m >= 2 {
        kinds.extend_from_slice(&[0u8, 1, 2]);
    }
    if allow_rotation && m >= 1 {
        kinds.push(3);
    }
    if kinds.is_empty() {
        return (cbl.clone(), None);
    }
    for _ in 0..16 {
        let mv = match kinds[rng.gen_range(0..kinds.len())] {
            0 => {
                let a = rng.gen_range(0..m);
                let mut b = rng.gen_range(0..m - 1);
                if b >= a {
                    b += 1;
                }
                Move::Swap(a, b)
            }
            1 => Move::ToggleOrientation(rng.gen_range(1..m)),
            2 => {
                let p = rng.gen_range(1..m);
                if cbl.tjunc[p] > 0 && rng.gen_bool(0.5) {
                    Move::DecrementT(p)
                } else {
                    Move::IncrementT(p)
                }
            }
            _ => Move::Rotate(rng.gen_range(0..m)),
        };
        let next = apply_move(cbl, mv);
        if next.validate(m).is_ok() {
            return (next, Some(mv));
        }
    }
    // Swaps never change list lengths, so they are always packable.
    let mv = if m >= 2 { Move::Swap(0, m - 1) } else { Move::Rotate(0) };
    (apply_move(cbl, mv), Some(mv))
}

pub fn apply_move(cbl: &Cbl, mv: Move) -> Cbl {
    let mut c = cbl.clone();
    match mv {
        Move::Swap(a, b) => c.order.swap(a, b),
        Move::ToggleOrientation(p) => c.orient[p] = c.orient[p].flip(),
        Move::IncrementT(p) => c.tjunc[p] += 1,
        Move::DecrementT(p) => c.tjunc[p] = c.tjunc[p].saturating_sub(1),
        Move::Rotate(b) => c.rotated[b] = !c.rotated[b],
    }
    c
}

/// Total half-perimeter wirelength of two-pin edges between given pin positions.
pub fn hpwl_of(centers: &[(f64, f64)], edges: &[DagEdge]) -> Result<f64> {
    let mut total = 0.0;
    for e in edges {
        let a = centers.get(e.from).ok_or_else(|| Error::UnknownModule(e.from.to_string()))?;
        let b = centers.get(e.to).ok_or_else(|| Error::UnknownModule(e.to.to_string()))?;
        total += (a.0 - b.0).abs() + (a.1 - b.1).abs();
    }
    Ok(total)
}

/// Half-perimeter wirelength with pins at module (room) centers.
pub fn hpwl(fp: &Floorplan, edges: &[DagEdge]) -> Result<f64> {
    let centers: Vec<(f64, f64)> = (0..fp.rooms.len()).map(|i| fp.module_center(i)).collect();
    hpwl_of(&centers, edges)
}

/// Groups same-voltage rooms into islands connected through shared edges of
/// positive length. Islands are listed by smallest member, members ascending.
pub fn islands(fp: &Floorplan, levels: &[usize]) -> Vec<Vec<usize>> {
    let m = fp.rooms.len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for a in 0..m {
        for b in a + 1..m {
            if levels[a] == levels[b] && fp.rooms[a].adjacent(&fp.rooms[b]) {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; m];
    for v in 0..m {
        let r = find(&mut parent, v);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(v);
    }
    groups
}

/// Power-network resource: summed half-perimeter of every island's bounding
/// box. With `count_highest` false, level-1 islands are skipped.
pub fn pnr(fp: &Floorplan, levels: &[usize], count_highest: bool) -> i64 {
    islands(fp, levels)
        .iter()
        .filter(|isl| count_highest || levels[isl[0]] != 1)
        .map(|isl| {
            let x0 = isl.iter().map(|&i| fp.rooms[i].x).min().unwrap();
            let y0 = isl.iter().map(|&i| fp.rooms[i].y).min().unwrap();
            let x1 = isl.iter().map(|&i| fp.rooms[i].x + fp.rooms[i].width).max().unwrap();
            let y1 = isl.iter().map(|&i| fp.rooms[i].y + fp.rooms[i].height).max().unwrap();
            (x1 - x0) + (y1 - y0)
        })
        .sum()
}
