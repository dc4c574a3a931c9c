//! Frame bands, the framed-set decomposition of a rectangle, and the
//! compression of product sets onto origin rectangles.
//!
//! At each scale k a band of width `delta_k` after every positive multiple
//! of 2^k is removed from each axis; the surviving points form the framed
//! set, and the removed part splits into d disjoint product-set strips. Each
//! strip compresses onto a strictly smaller rectangle without changing sums.

use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::{Point, Rectangle};

/// Exact dyadic rational `num / 2^exp`; used for the budget check
/// `sum_k delta_k 2^-k <= 1/(4 d^2)` which is never done in floating point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dyadic {
    num: u128,
    exp: u32,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { num: 0, exp: 0 }
    }

    /// `num / 2^exp`
    pub fn new(num: u128, exp: u32) -> Self {
        Dyadic { num, exp }.normalized()
    }

    fn normalized(self) -> Self {
        let mut d = self;
        while d.exp > 0 && d.num > 0 && d.num.is_multiple_of(2) {
            d.num /= 2;
            d.exp -= 1;
        }
        if d.num == 0 {
            d.exp = 0;
        }
        d
    }

    pub fn checked_add(self, other: Dyadic) -> Result<Dyadic> {
        let exp = self.exp.max(other.exp);
        let a = self
            .num
            .checked_shl(exp - self.exp)
            .ok_or(Error::Overflow)?;
        let b = other
            .num
            .checked_shl(exp - other.exp)
            .ok_or(Error::Overflow)?;
        Ok(Dyadic::new(a.checked_add(b).ok_or(Error::Overflow)?, exp))
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Exact comparison `self <= 1/q`.
    pub fn le_inverse(&self, q: u128) -> Result<bool> {
        let lhs = self.num.checked_mul(q).ok_or(Error::Overflow)?;
        let rhs = 1u128.checked_shl(self.exp).ok_or(Error::Overflow)?;
        Ok(lhs <= rhs)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / (self.exp as f64).exp2()
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1u128 << self.exp)
        }
    }
}

/// Nondecreasing band widths `delta_1 .. delta_m` with `delta_k <= 2^k`;
/// `delta_0 = 0` is implied and scales beyond the stored length read as 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaSeq {
    deltas: Vec<u64>,
}

impl DeltaSeq {
    pub fn new(deltas: Vec<u64>) -> Result<Self> {
        for (i, &d) in deltas.iter().enumerate() {
            let k = (i + 1) as u32;
            if k < 64 && d > (1u64 << k) {
                return Err(Error::InvalidDelta(format!(
                    "delta_{k} = {d} exceeds 2^{k}"
                )));
            }
            if i > 0 && deltas[i - 1] > d {
                return Err(Error::InvalidDelta(format!(
                    "sequence decreases at index {k}"
                )));
            }
        }
        Ok(DeltaSeq { deltas })
    }

    pub fn zeros(m: usize) -> Self {
        DeltaSeq { deltas: vec![0; m] }
    }

    pub fn values(&self) -> &[u64] {
        &self.deltas
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    /// `delta_k` with the conventions `delta_0 = 0` and zero beyond the end.
    pub fn get(&self, k: u32) -> u64 {
        if k == 0 {
            0
        } else {
            self.deltas.get(k as usize - 1).copied().unwrap_or(0)
        }
    }

    /// The zero extension stays nondecreasing through scale m, so the
    /// sequence is usable for a rectangle with that top scale.
    pub fn covers(&self, m: u32) -> bool {
        self.deltas.len() >= m as usize || self.deltas.iter().all(|&d| d == 0)
    }

    /// Exact `sum_{k=1}^{m} delta_k 2^-k`.
    pub fn constraint_sum(&self, m: u32) -> Result<Dyadic> {
        let mut acc = Dyadic::zero();
        for k in 1..=m {
            acc = acc.checked_add(Dyadic::new(self.get(k) as u128, k))?;
        }
        Ok(acc)
    }

    /// Exact check of `sum_{k<=m} delta_k 2^-k <= 1/(4 d^2)`.
    pub fn satisfies_constraint(&self, m: u32, dim: usize) -> Result<bool> {
        let budget = 4u128
            .checked_mul((dim as u128).pow(2))
            .ok_or(Error::Overflow)?;
        self.constraint_sum(m)?.le_inverse(budget)
    }
}

/// Membership in the band `Lambda_{k,delta} = 2^k N_{>0} + [delta]_0`,
/// i.e. whether `x = q 2^k + j` for some `q >= 1` and `0 <= j < delta`.
/// The band is empty when `delta = 0`.
pub fn in_frame_band(x: u64, k: u32, delta: u64) -> Result<bool> {
    if k < 64 && delta > (1u64 << k) {
        return Err(Error::InvalidDelta(format!(
            "band width {delta} exceeds 2^{k}"
        )));
    }
    if delta == 0 || k >= 64 {
        return Ok(false);
    }
    let q = x >> k;
    let offset = x - (q << k);
    Ok(q >= 1 && offset < delta)
}

/// Membership in the union `Lambda_delta = U_k Lambda_{k,delta_k}`.
/// Only scales with `2^k <= x` can contain x, which bounds the loop.
pub fn in_frame(x: u64, delta: &DeltaSeq) -> bool {
    let mut k = 1u32;
    while k < 64 && (1u64 << k) <= x {
        if k as usize <= delta.len() && in_frame_band(x, k, delta.get(k)).expect("validated width")
        {
            return true;
        }
        k += 1;
    }
    false
}

/// Finite product set `prod_i A_i` stored as sorted coordinate lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductSet {
    factors: Vec<Vec<u64>>,
}

impl ProductSet {
    pub fn new(mut factors: Vec<Vec<u64>>) -> Self {
        for f in &mut factors {
            f.sort_unstable();
            f.dedup();
        }
        ProductSet { factors }
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Vec<u64>] {
        &self.factors
    }

    pub fn is_empty(&self) -> bool {
        self.factors.iter().any(|f| f.is_empty())
    }

    pub fn cardinality(&self) -> u128 {
        self.factors.iter().map(|f| f.len() as u128).product()
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim()
            && p.coords()
                .iter()
                .zip(&self.factors)
                .all(|(c, f)| f.binary_search(c).is_ok())
    }

    pub fn points(&self) -> Vec<Point> {
        if self.is_empty() {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(self.cardinality() as usize);
        let mut idx = vec![0usize; self.dim()];
        'outer: loop {
            let coords: Vec<u64> = idx.iter().zip(&self.factors).map(|(&i, f)| f[i]).collect();
            out.push(Point::new(coords).expect("coordinates validated by factors"));
            for i in (0..idx.len()).rev() {
                idx[i] += 1;
                if idx[i] < self.factors[i].len() {
                    continue 'outer;
                }
                idx[i] = 0;
                if i == 0 {
                    break 'outer;
                }
            }
        }
        out
    }
}

/// Partition of a rectangle into the framed set and d strips, one per axis.
/// The d+1 parts are pairwise disjoint product sets whose union is R.
#[derive(Clone, Debug)]
pub struct FramePartition {
    pub framed: ProductSet,
    pub strips: Vec<ProductSet>,
}

impl FramePartition {
    pub fn parts(&self) -> impl Iterator<Item = &ProductSet> {
        std::iter::once(&self.framed).chain(self.strips.iter())
    }
}

/// Split `R` into `R cap framed-set` and the strips `R cap Delta_i`, where
/// strip i confines the band membership to coordinate i, excludes it for
/// coordinates j < i and is unconstrained for j > i.
pub fn framed_partition(rect: &Rectangle, delta: &DeltaSeq) -> FramePartition {
    let d = rect.dim();
    let mut banded: Vec<Vec<u64>> = Vec::with_capacity(d);
    let mut free: Vec<Vec<u64>> = Vec::with_capacity(d);
    for &n in rect.sides() {
        let mut in_band = Vec::new();
        let mut out_band = Vec::new();
        for x in 0..n {
            if in_frame(x, delta) {
                in_band.push(x);
            } else {
                out_band.push(x);
            }
        }
        banded.push(in_band);
        free.push(out_band);
    }
    let framed = ProductSet::new(free.clone());
    let full: Vec<Vec<u64>> = rect.sides().iter().map(|&n| (0..n).collect()).collect();
    let strips = (0..d)
        .map(|i| {
            let mut factors = Vec::with_capacity(d);
            for j in 0..d {
                factors.push(match j.cmp(&i) {
                    std::cmp::Ordering::Less => free[j].clone(),
                    std::cmp::Ordering::Equal => banded[j].clone(),
                    std::cmp::Ordering::Greater => full[j].clone(),
                });
            }
            ProductSet::new(factors)
        })
        .collect();
    FramePartition { framed, strips }
}

/// Order-preserving bijection between `K(A) = prod [|A_i|]_0` and a product
/// set A: index j maps to the (j+1)-th smallest element of each factor.
#[derive(Clone, Debug)]
pub struct Compression {
    source: ProductSet,
}

impl Compression {
    pub fn new(source: ProductSet) -> Result<Self> {
        if source.is_empty() {
            return Err(Error::EmptyFactor);
        }
        Ok(Compression { source })
    }

    pub fn source(&self) -> &ProductSet {
        &self.source
    }

    /// Target rectangle `K(A)`.
    pub fn target(&self) -> Rectangle {
        Rectangle::new(
            self.source
                .factors()
                .iter()
                .map(|f| f.len() as u64)
                .collect(),
        )
        .expect("nonempty factors yield positive sides")
    }

    /// `(t : A)` for `t` in the target rectangle.
    pub fn forward(&self, t: &Point) -> Result<Point> {
        if t.dim() != self.source.dim() {
            return Err(Error::DimensionMismatch(t.dim(), self.source.dim()));
        }
        let mut coords = Vec::with_capacity(t.dim());
        for (i, &j) in t.coords().iter().enumerate() {
            let factor = &self.source.factors()[i];
            let j = usize::try_from(j).map_err(|_| Error::OutOfDomain)?;
            coords.push(*factor.get(j).ok_or(Error::OutOfDomain)?);
        }
        Point::new(coords)
    }

    /// Inverse map, defined on points of A.
    pub fn inverse(&self, x: &Point) -> Result<Point> {
        if x.dim() != self.source.dim() {
            return Err(Error::DimensionMismatch(x.dim(), self.source.dim()));
        }
        let mut coords = Vec::with_capacity(x.dim());
        for (i, c) in x.coords().iter().enumerate() {
            let factor = &self.source.factors()[i];
            let j = factor.binary_search(c).map_err(|_| Error::OutOfDomain)?;
            coords.push(j as u64);
        }
        Point::new(coords)
    }

    /// Whether the map is the identity (A is already an origin rectangle).
    pub fn is_identity(&self) -> bool {
        self.source
            .factors()
            .iter()
            .all(|f| f.iter().enumerate().all(|(i, &x)| i as u64 == x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_membership_examples() {
        for x in 0..64 {
            assert!(!in_frame_band(x, 3, 0).unwrap());
        }
        assert!(in_frame_band(5, 2, 2).unwrap());
        assert!(in_frame_band(2, 1, 1).unwrap());
        assert!(!in_frame_band(3, 1, 1).unwrap());
        // Lambda_{1,1} = {2, 4, 6, ...}
        let members: Vec<u64> = (0..10)
            .filter(|&x| in_frame_band(x, 1, 1).unwrap())
            .collect();
        assert_eq!(members, vec![2, 4, 6, 8]);
        assert!(in_frame_band(1, 1, 3).is_err());
    }

    #[test]
    fn partition_example() {
        let r = Rectangle::new(vec![4, 4]).unwrap();
        let delta = DeltaSeq::new(vec![1]).unwrap();
        let p = framed_partition(&r, &delta);
        assert_eq!(p.framed.cardinality(), 9);
        assert_eq!(p.strips[0].cardinality(), 4);
        assert_eq!(p.strips[1].cardinality(), 3);
        assert!(p.strips[0].contains(&Point::new(vec![2, 3]).unwrap()));
        assert!(p.strips[1].contains(&Point::new(vec![0, 2]).unwrap()));
        assert!(!p.framed.contains(&Point::new(vec![2, 2]).unwrap()));
    }

    #[test]
    fn partition_trivial_when_zero() {
        let r = Rectangle::new(vec![5, 3]).unwrap();
        let p = framed_partition(&r, &DeltaSeq::zeros(4));
        assert_eq!(p.framed.cardinality(), r.cardinality());
        assert!(p.strips.iter().all(|s| s.is_empty()));
    }

    #[test]
    fn partition_is_exact() {
        // disjointness and exhaustiveness over every point of R
        let r = Rectangle::new(vec![12, 9]).unwrap();
        let delta = DeltaSeq::new(vec![1, 2, 2]).unwrap();
        let p = framed_partition(&r, &delta);
        for point in r.points() {
            let hits = p.parts().filter(|part| part.contains(&point)).count();
            assert_eq!(hits, 1, "point {point} covered {hits} times");
        }
        let total: u128 = p.parts().map(|part| part.cardinality()).sum();
        assert_eq!(total, r.cardinality());
    }

    #[test]
    fn strip_cardinality_bound() {
        // with the budget met, each axis loses at most N/(4 d^2) points
        let delta = DeltaSeq::new(vec![0, 0, 0, 0, 2]).unwrap();
        let d = 2u128;
        assert!(delta.satisfies_constraint(5, d as usize).unwrap());
        for n in 1..=4096u64 {
            let banded = (0..n).filter(|&x| in_frame(x, &delta)).count() as u128;
            assert!(banded * 4 * d * d <= n as u128, "n={n} banded={banded}");
        }
    }

    #[test]
    fn constraint_examples() {
        let zero = DeltaSeq::zeros(3);
        let s = zero.constraint_sum(3).unwrap();
        assert!(s.is_zero());
        assert!(zero.satisfies_constraint(3, 2).unwrap());

        // d = 2: delta_1 = 1 gives 1/2 > 1/16
        let one = DeltaSeq::new(vec![1]).unwrap();
        assert_eq!(one.constraint_sum(1).unwrap(), Dyadic::new(1, 1));
        assert!(!one.satisfies_constraint(1, 2).unwrap());

        // d = 1: (0,0,0,1) sums to 1/16 <= 1/4
        let seq = DeltaSeq::new(vec![0, 0, 0, 1]).unwrap();
        assert_eq!(seq.constraint_sum(4).unwrap(), Dyadic::new(1, 4));
        assert!(seq.satisfies_constraint(4, 1).unwrap());
    }

    #[test]
    fn delta_validation() {
        assert!(DeltaSeq::new(vec![3]).is_err()); // 3 > 2^1
        assert!(DeltaSeq::new(vec![2, 1]).is_err()); // decreasing
        assert!(DeltaSeq::new(vec![1, 2, 8]).is_ok());
    }

    #[test]
    fn compression_examples() {
        // an origin rectangle compresses to itself
        let rect_set = ProductSet::new(vec![vec![0, 1, 2], vec![0, 1]]);
        let c = Compression::new(rect_set).unwrap();
        assert!(c.is_identity());

        let a = ProductSet::new(vec![vec![0, 1, 3], vec![2]]);
        let c = Compression::new(a).unwrap();
        assert_eq!(c.target(), Rectangle::new(vec![3, 1]).unwrap());
        let mapped = c.forward(&Point::new(vec![2, 0]).unwrap()).unwrap();
        assert_eq!(mapped, Point::new(vec![3, 2]).unwrap());
        let back = c.inverse(&mapped).unwrap();
        assert_eq!(back, Point::new(vec![2, 0]).unwrap());
        assert!(c.forward(&Point::new(vec![3, 0]).unwrap()).is_err());
    }

    #[test]
    fn compression_bijective_and_monotone() {
        let a = ProductSet::new(vec![vec![1, 4, 6, 7], vec![0, 2, 9]]);
        let c = Compression::new(a.clone()).unwrap();
        let target = c.target();
        let mut images = std::collections::BTreeSet::new();
        let domain: Vec<Point> = target.points().collect();
        for t in &domain {
            let x = c.forward(t).unwrap();
            assert!(a.contains(&x));
            images.insert(x);
        }
        assert_eq!(images.len() as u128, a.cardinality());
        // coordinate-wise monotone
        for t in &domain {
            for u in &domain {
                if t.le_cw(u) {
                    assert!(c.forward(t).unwrap().le_cw(&c.forward(u).unwrap()));
                }
            }
        }
    }

    #[test]
    fn compression_expands_gaps() {
        // sup_i((t:A)_i - (u:A)_i) >= sup_i(t_i - u_i) whenever the latter is
        // nonnegative; strictly increasing factors expand positive gaps
        let sets = [
            ProductSet::new(vec![vec![0, 1, 3], vec![2, 5, 6]]),
            ProductSet::new(vec![vec![2, 7], vec![0, 1, 4], vec![3, 8]]),
            ProductSet::new(vec![vec![0, 1, 3, 4, 6]]),
        ];
        for a in sets {
            let c = Compression::new(a).unwrap();
            let domain: Vec<Point> = c.target().points().collect();
            for t in &domain {
                for u in &domain {
                    let ti = c.forward(t).unwrap();
                    let ui = c.forward(u).unwrap();
                    let orig = t
                        .coords()
                        .iter()
                        .zip(u.coords())
                        .map(|(&a, &b)| a as i128 - b as i128)
                        .max()
                        .unwrap();
                    if orig < 0 {
                        continue;
                    }
                    let img = ti
                        .coords()
                        .iter()
                        .zip(ui.coords())
                        .map(|(&a, &b)| a as i128 - b as i128)
                        .max()
                        .unwrap();
                    assert!(img >= orig, "t={t} u={u}");
                }
            }
        }
    }

    #[test]
    fn dyadic_arithmetic() {
        let a = Dyadic::new(1, 2); // 1/4
        let b = Dyadic::new(1, 2);
        assert_eq!(a.checked_add(b).unwrap(), Dyadic::new(1, 1));
        assert!(Dyadic::new(1, 4).le_inverse(16).unwrap());
        assert!(!Dyadic::new(3, 4).le_inverse(16).unwrap());
        assert_eq!(format!("{}", Dyadic::new(3, 3)), "3/8");
        assert_eq!(format!("{}", Dyadic::zero()), "0");
    }
}
