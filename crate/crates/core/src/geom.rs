//! Axis-aligned rectangles in real coordinates.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

/// Slack used when comparing coordinates produced by chained float arithmetic.
pub const EPS: f64 = 1e-9;

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect { x0: x0.min(x1), y0: y0.min(y1), x1: x0.max(x1), y1: y0.max(y1) }
    }

    pub fn from_size(x: f64, y: f64, w: f64, h: f64) -> Self {
        Rect { x0: x, y0: y, x1: x + w, y1: y + h }
    }

    /// Smallest rectangle containing both points.
    pub fn bounding(a: (f64, f64), b: (f64, f64)) -> Self {
        Rect::new(a.0, a.1, b.0, b.1)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn half_perimeter(&self) -> f64 {
        self.width() + self.height()
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)
    }

    /// Closed intersection, `None` when the rectangles are disjoint.
    pub fn intersection(&self, other: &Rect) -> Option<Rect> {
        let x0 = self.x0.max(other.x0);
        let y0 = self.y0.max(other.y0);
        let x1 = self.x1.min(other.x1);
        let y1 = self.y1.min(other.y1);
        (x0 <= x1 && y0 <= y1).then_some(Rect { x0, y0, x1, y1 })
    }

    /// True when the interiors overlap (shared edges do not count).
    pub fn overlaps(&self, other: &Rect) -> bool {
        self.x0.max(other.x0) < self.x1.min(other.x1) - EPS
            && self.y0.max(other.y0) < self.y1.min(other.y1) - EPS
    }

    pub fn contains_point(&self, p: (f64, f64)) -> bool {
        p.0 >= self.x0 - EPS && p.0 <= self.x1 + EPS && p.1 >= self.y0 - EPS && p.1 <= self.y1 + EPS
    }

    pub fn contains_rect(&self, r: &Rect) -> bool {
        r.x0 >= self.x0 - EPS && r.x1 <= self.x1 + EPS && r.y0 >= self.y0 - EPS && r.y1 <= self.y1 + EPS
    }

    /// Same center, grown by `l` on every side.
    pub fn inflate(&self, l: f64) -> Rect {
        Rect { x0: self.x0 - l, y0: self.y0 - l, x1: self.x1 + l, y1: self.y1 + l }
    }

    pub fn including(&self, p: (f64, f64)) -> Rect {
        Rect { x0: self.x0.min(p.0), y0: self.y0.min(p.1), x1: self.x1.max(p.0), y1: self.y1.max(p.1) }
    }

    pub fn union(&self, other: &Rect) -> Rect {
        Rect {
            x0: self.x0.min(other.x0),
            y0: self.y0.min(other.y0),
            x1: self.x1.max(other.x1),
            y1: self.y1.max(other.y1),
        }
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Rect {
        Rect { x0: self.x0 + dx, y0: self.y0 + dy, x1: self.x1 + dx, y1: self.y1 + dy }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn touching_is_not_overlap() {
        let a = Rect::new(0.0, 0.0, 1.0, 1.0);
        let b = Rect::new(1.0, 0.0, 2.0, 1.0);
        assert!(!a.overlaps(&b));
        assert!(a.intersection(&b).is_some());
        assert!(a.overlaps(&Rect::new(0.5, 0.5, 3.0, 3.0)));
    }

    #[test]
    fn inflate_keeps_center() {
        let r = Rect::new(1.0, 2.0, 3.0, 6.0).inflate(2.0);
        assert_eq!(r.center(), (2.0, 4.0));
        assert_eq!(r.width(), 6.0);
        assert_eq!(r.height(), 8.0);
    }
}
