//! Index geometry on N^d: dyadic projections, the multiscale total order,
//! predecessor sets, cells, and exact cell-cardinality formulas.
//!
//! The order compares two points at the coarsest dyadic scale where their
//! projections still disagree; it is total, refines the coordinate-wise
//! partial order, and is compatible with every projection `pi_k`. Everything
//! here is pure integer arithmetic.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Coordinates are capped below 2^32 so that per-coordinate products like
/// `q * 2^(2k)` stay inside 64 bits.
pub const MAX_COORD: u64 = 1 << 32;

/// A point of N^d. The derived `Ord` is plain lexicographic on coordinates
/// and is only used for container bookkeeping; the multiscale order is
/// exposed through [`dyadic_cmp`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point(Vec<u64>);

impl Point {
    pub fn new(coords: Vec<u64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::DimensionMismatch(0, 1));
        }
        for &c in &coords {
            if c >= MAX_COORD {
                return Err(Error::CoordinateOverflow(c));
            }
        }
        Ok(Point(coords))
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn coord(&self, i: usize) -> u64 {
        self.0[i]
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn norm_inf(&self) -> u64 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// sup-distance between two points of equal dimension.
    pub fn dist_inf(&self, other: &Point) -> u64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| a.abs_diff(b))
            .max()
            .unwrap_or(0)
    }

    /// Coordinate-wise partial order: `self <= other` in every coordinate.
    pub fn le_cw(&self, other: &Point) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Origin-anchored box `prod_i {0, ..., N_i - 1}` with positive sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rectangle {
    sides: Vec<u64>,
}

impl Rectangle {
    pub fn new(sides: Vec<u64>) -> Result<Self> {
        if sides.is_empty() || sides.iter().any(|&n| n == 0 || n > MAX_COORD) {
            return Err(Error::InvalidRectangle);
        }
        // reject products that do not fit u128
        let mut card: u128 = 1;
        for &n in &sides {
            card = card.checked_mul(n as u128).ok_or(Error::Overflow)?;
        }
        Ok(Rectangle { sides })
    }

    /// Cube `[n]^d`.
    pub fn cube(dim: usize, side: u64) -> Result<Self> {
        Self::new(vec![side; dim])
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn sides(&self) -> &[u64] {
        &self.sides
    }

    pub fn cardinality(&self) -> u128 {
        self.sides.iter().map(|&n| n as u128).product()
    }

    /// `m(R) = max_i floor(log2 N_i)`, the top dyadic scale of the box.
    pub fn max_scale(&self) -> u32 {
        self.sides.iter().map(|&n| n.ilog2()).max().unwrap()
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim() && p.coords().iter().zip(&self.sides).all(|(&c, &n)| c < n)
    }

    /// `|C_k cap R| = prod_i min(2^k, N_i)` for the origin cell of scale k.
    pub fn origin_cell_card(&self, k: u32) -> u128 {
        let side = 1u128 << k.min(63);
        self.sides.iter().map(|&n| side.min(n as u128)).product()
    }

    /// Row-major iteration over all points of the box.
    pub fn points(&self) -> RectIter {
        RectIter {
            sides: self.sides.clone(),
            cursor: vec![0; self.sides.len()],
            done: false,
        }
    }
}

pub struct RectIter {
    sides: Vec<u64>,
    cursor: Vec<u64>,
    done: bool,
}

impl Iterator for RectIter {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        if self.done {
            return None;
        }
        let out = Point(self.cursor.clone());
        // advance like an odometer, last coordinate fastest
        for i in (0..self.cursor.len()).rev() {
            self.cursor[i] += 1;
            if self.cursor[i] < self.sides[i] {
                return Some(out);
            }
            self.cursor[i] = 0;
        }
        self.done = true;
        Some(out)
    }
}

/// Dyadic cell `C_{k,b} = {b} + [2^k]_0^d`; the base must be a multiple of 2^k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub scale: u32,
    pub base: Point,
}

impl Cell {
    pub fn new(scale: u32, base: Point) -> Result<Self> {
        let step = 1u64 << scale.min(63);
        if base.coords().iter().any(|&c| c % step != 0) {
            return Err(Error::InvalidModel(format!(
                "cell base {base} is not aligned to scale {scale}"
            )));
        }
        Ok(Cell { scale, base })
    }

    pub fn cardinality(&self) -> u128 {
        (1u128 << self.scale).pow(self.base.dim() as u32)
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.base.dim() && dyadic_project(p, self.scale) == self.base
    }
}

fn floor_to_scale(x: u64, k: u32) -> u64 {
    if k >= 64 {
        0
    } else {
        (x >> k) << k
    }
}

/// Dyadic projection `pi_k(t) = (floor(t_i / 2^k) * 2^k)_i`.
///
/// `pi_0` is the identity and `pi_l . pi_k = pi_max(k,l)`.
pub fn dyadic_project(t: &Point, k: u32) -> Point {
    Point(t.coords().iter().map(|&c| floor_to_scale(c, k)).collect())
}

/// The last scale at which the dyadic projections of two points disagree:
/// `min { k : pi_k(t) = pi_k(t') } - 1`. Equals -1 iff the points coincide.
pub fn split_scale(t: &Point, u: &Point) -> Result<i32> {
    if t.dim() != u.dim() {
        return Err(Error::DimensionMismatch(t.dim(), u.dim()));
    }
    let mut k = 0u32;
    loop {
        if dyadic_project(t, k) == dyadic_project(u, k) {
            return Ok(k as i32 - 1);
        }
        k += 1;
        // both projections are the origin at scale 33 at the latest
        debug_assert!(k <= 33);
    }
}

/// Total multiscale order: points are compared lexicographically at the
/// coarsest scale where their projections disagree.
pub fn dyadic_cmp(t: &Point, u: &Point) -> Result<Ordering> {
    let kappa = split_scale(t, u)?;
    if kappa < 0 {
        return Ok(Ordering::Equal);
    }
    let pt = dyadic_project(t, kappa as u32);
    let pu = dyadic_project(u, kappa as u32);
    Ok(pt.coords().cmp(pu.coords()))
}

/// Strict (`pi_k(t') < pi_k(t)`) or weak (`<=`) predecessor set at scale k.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PredecessorKind {
    Strict,
    Weak,
}

/// Predecessor set at scale k intersected with a finite window.
///
/// Strict variant: `{ t' : pi_k(t') < pi_k(t) }`; weak variant replaces `<`
/// by `<=`. The strict set is empty iff `pi_k(t) = 0`.
pub fn predecessors_at_scale(
    t: &Point,
    k: u32,
    window: &Rectangle,
    kind: PredecessorKind,
) -> Result<Vec<Point>> {
    if t.dim() != window.dim() {
        return Err(Error::DimensionMismatch(t.dim(), window.dim()));
    }
    let pivot = dyadic_project(t, k);
    let mut out = Vec::new();
    for u in window.points() {
        let ord = dyadic_cmp(&dyadic_project(&u, k), &pivot)?;
        let keep = match kind {
            PredecessorKind::Strict => ord == Ordering::Less,
            PredecessorKind::Weak => ord != Ordering::Greater,
        };
        if keep {
            out.push(u);
        }
    }
    Ok(out)
}

/// Distance from a point to its strict predecessor set at scale k.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Separation {
    /// The predecessor set is empty (`pi_k(t) = 0`).
    Unbounded,
    Finite(u64),
}

impl Separation {
    pub fn at_least(&self, d: u64) -> bool {
        match self {
            Separation::Unbounded => true,
            Separation::Finite(v) => *v >= d,
        }
    }
}

/// Exact `inf { |t - t'|_inf : t' in strict predecessor set at scale k }`.
///
/// If `pi_k(t) != 0` a predecessor exists at distance exactly 2^k (shift the
/// cell base down by 2^k along a coordinate with `pi_k(t)_i > 0`), so an
/// exhaustive search over the sup-ball of radius 2^k is sufficient.
pub fn separation_distance(t: &Point, k: u32) -> Separation {
    let pivot = dyadic_project(t, k);
    if pivot.is_origin() {
        return Separation::Unbounded;
    }
    let radius = 1u64 << k.min(62);
    let d = t.dim();
    let lo: Vec<u64> = t
        .coords()
        .iter()
        .map(|&c| c.saturating_sub(radius))
        .collect();
    let hi: Vec<u64> = t.coords().iter().map(|&c| c + radius).collect();
    let mut best = u64::MAX;
    let mut cursor = lo.clone();
    'outer: loop {
        let cand = Point(cursor.clone());
        if cand != *t {
            let proj = dyadic_project(&cand, k);
            if dyadic_cmp(&proj, &pivot).expect("same dimension") == Ordering::Less {
                best = best.min(cand.dist_inf(t));
            }
        }
        for i in (0..d).rev() {
            cursor[i] += 1;
            if cursor[i] <= hi[i] {
                continue 'outer;
            }
            cursor[i] = lo[i];
            if i == 0 {
                break 'outer;
            }
        }
    }
    debug_assert!(best <= radius);
    Separation::Finite(best)
}

/// Exact `sum_b |C_{k,b} cap R|^2` via the per-coordinate product formula
/// `prod_i (q_i 4^k + r_i^2)` with `q_i = floor(N_i / 2^k)`, `r_i = N_i - q_i 2^k`,
/// together with the bound `|R| * prod_i min(2^k, N_i)`.
pub fn cell_sum_of_squares(rect: &Rectangle, k: u32) -> Result<(u128, u128)> {
    let step = 1u128 << k.min(63);
    let mut sum: u128 = 1;
    for &n in rect.sides() {
        let n = n as u128;
        let q = n / step;
        let r = n - q * step;
        let factor = q
            .checked_mul(step * step)
            .and_then(|v| v.checked_add(r * r))
            .ok_or(Error::Overflow)?;
        sum = sum.checked_mul(factor).ok_or(Error::Overflow)?;
    }
    let bound = rect
        .cardinality()
        .checked_mul(rect.origin_cell_card(k))
        .ok_or(Error::Overflow)?;
    Ok((sum, bound))
}
