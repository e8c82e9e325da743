use serde::{Deserialize, Serialize};

/// Axis-aligned integer rectangle; `x + w` and `y + h` are exclusive.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl Rect {
    pub const fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        Rect { x, y, w, h }
    }

    /// Tight box around a non-empty set of pixels.
    pub fn enclosing<'a, I>(pixels: I) -> Option<Rect>
    where
        I: IntoIterator<Item = &'a (u32, u32)>,
    {
        let mut it = pixels.into_iter();
        let &(x0, y0) = it.next()?;
        let (mut min_x, mut min_y, mut max_x, mut max_y) = (x0, y0, x0, y0);
        for &(x, y) in it {
            min_x = min_x.min(x);
            min_y = min_y.min(y);
            max_x = max_x.max(x);
            max_y = max_y.max(y);
        }
        Some(Rect::from_corners(min_x, min_y, max_x + 1, max_y + 1))
    }

    pub const fn from_corners(x0: u32, y0: u32, x1: u32, y1: u32) -> Self {
        Rect {
            x: x0,
            y: y0,
            w: x1 - x0,
            h: y1 - y0,
        }
    }

    pub const fn right(&self) -> u32 {
        self.x + self.w
    }

    pub const fn bottom(&self) -> u32 {
        self.y + self.h
    }

    pub const fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }

    pub fn is_empty(&self) -> bool {
        self.w == 0 || self.h == 0
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        x >= self.x && x < self.right() && y >= self.y && y < self.bottom()
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.x >= self.x
            && other.y >= self.y
            && other.right() <= self.right()
            && other.bottom() <= self.bottom()
    }

    pub fn intersection(&self, other: &Rect) -> Option<Rect> {
        let x0 = self.x.max(other.x);
        let y0 = self.y.max(other.y);
        let x1 = self.right().min(other.right());
        let y1 = self.bottom().min(other.bottom());
        (x0 < x1 && y0 < y1).then(|| Rect::from_corners(x0, y0, x1, y1))
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.intersection(other).is_some()
    }

    pub fn union(&self, other: &Rect) -> Rect {
        Rect::from_corners(
            self.x.min(other.x),
            self.y.min(other.y),
            self.right().max(other.right()),
            self.bottom().max(other.bottom()),
        )
    }

    /// Rows shared by both boxes.
    pub fn vertical_overlap(&self, other: &Rect) -> u32 {
        self.bottom()
            .min(other.bottom())
            .saturating_sub(self.y.max(other.y))
    }

    /// Columns shared by both boxes.
    pub fn horizontal_overlap(&self, other: &Rect) -> u32 {
        self.right()
            .min(other.right())
            .saturating_sub(self.x.max(other.x))
    }

    /// Empty columns between the boxes, 0 when they touch or overlap.
    pub fn horizontal_gap(&self, other: &Rect) -> u32 {
        if self.right() <= other.x {
            other.x - self.right()
        } else if other.right() <= self.x {
            self.x - other.right()
        } else {
            0
        }
    }

    pub fn vertical_gap(&self, other: &Rect) -> u32 {
        if self.bottom() <= other.y {
            other.y - self.bottom()
        } else if other.bottom() <= self.y {
            self.y - other.bottom()
        } else {
            0
        }
    }

    pub fn center(&self) -> (f64, f64) {
        (
            self.x as f64 + self.w as f64 / 2.0,
            self.y as f64 + self.h as f64 / 2.0,
        )
    }

    /// Grow by `pad` on every side, clipped to a `width` x `height` canvas.
    pub fn padded(&self, pad: u32, width: u32, height: u32) -> Rect {
        Rect::from_corners(
            self.x.saturating_sub(pad),
            self.y.saturating_sub(pad),
            (self.right() + pad).min(width),
            (self.bottom() + pad).min(height),
        )
    }
}

pub fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}
