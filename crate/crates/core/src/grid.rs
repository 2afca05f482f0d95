use std::fmt;
use std::ops::{Add, Neg, Sub};

/// Integer position or displacement on the grid. One-dimensional worlds use
/// `row == 0` throughout.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub row: i32,
    pub col: i32,
}

impl Coord {
    pub const ZERO: Coord = Coord { row: 0, col: 0 };

    pub const fn new(row: i32, col: i32) -> Self {
        Coord { row, col }
    }
}

impl Add for Coord {
    type Output = Coord;
    fn add(self, rhs: Coord) -> Coord {
        Coord::new(self.row + rhs.row, self.col + rhs.col)
    }
}

impl Sub for Coord {
    type Output = Coord;
    fn sub(self, rhs: Coord) -> Coord {
        Coord::new(self.row - rhs.row, self.col - rhs.col)
    }
}

impl Neg for Coord {
    type Output = Coord;
    fn neg(self) -> Coord {
        Coord::new(-self.row, -self.col)
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

/// Rectangular size in cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Extent {
    pub rows: usize,
    pub cols: usize,
}

impl Extent {
    pub const fn new(rows: usize, cols: usize) -> Self {
        Extent { rows, cols }
    }

    pub const fn line(len: usize) -> Self {
        Extent { rows: 1, cols: len }
    }

    pub fn cells(&self) -> usize {
        self.rows * self.cols
    }

    pub fn contains(&self, c: Coord) -> bool {
        c.row >= 0 && c.col >= 0 && (c.row as usize) < self.rows && (c.col as usize) < self.cols
    }

    /// Row-major flat index. Caller guarantees `contains(c)`.
    #[inline]
    pub fn index(&self, c: Coord) -> usize {
        c.row as usize * self.cols + c.col as usize
    }

    pub fn fits(&self, inner: Extent) -> bool {
        inner.rows <= self.rows && inner.cols <= self.cols
    }

    /// Range of origins at which `inner` lies fully inside `self`, or `None`
    /// if it does not fit at all.
    pub fn placements(&self, inner: Extent) -> Option<Placements> {
        if inner.rows == 0 || inner.cols == 0 || !self.fits(inner) {
            return None;
        }
        Some(Placements {
            rows: self.rows - inner.rows + 1,
            cols: self.cols - inner.cols + 1,
        })
    }
}

impl fmt::Display for Extent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

/// The set of legal origins for a window inside a larger grid, enumerated in
/// lexicographic (row-major) order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Placements {
    pub rows: usize,
    pub cols: usize,
}

impl Placements {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, c: Coord) -> bool {
        Extent::new(self.rows, self.cols).contains(c)
    }

    pub fn nth(&self, n: usize) -> Coord {
        Coord::new((n / self.cols) as i32, (n % self.cols) as i32)
    }

    pub fn ordinal(&self, c: Coord) -> usize {
        Extent::new(self.rows, self.cols).index(c)
    }

    pub fn iter(&self) -> impl Iterator<Item = Coord> + '_ {
        (0..self.len()).map(move |n| self.nth(n))
    }
}
