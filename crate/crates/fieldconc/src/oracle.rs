//! Exact conditional expectations over enumerated universes, and the checks
//! built on them: weak-dependence coefficients, the multiscale martingale
//! decomposition, the martingale-difference property, and the behaviour of
//! compressed fields.
//!
//! Sigma-algebras are represented by generating site sets; conditioning
//! groups outcomes by the exact value tuple of the field on those sites,
//! which matches field-generated sigma-algebras on a finite space. All
//! expectations are plain finite averages, so identities that hold
//! algebraically hold here to float round-off.

use std::collections::HashMap;

use crate::bounds::PNorm;
use crate::error::{Error, Result};
use crate::fields::Universe;
use crate::frames::{Compression, ProductSet};
use crate::lattice::{dyadic_cmp, dyadic_project, predecessors_at_scale, Point, PredecessorKind};
use crate::mc::pairwise_sum;

/// Outcome partition induced by the field values on a generating site set,
/// with per-class probabilities. The empty set yields the trivial partition.
pub struct ConditionalTable {
    class_of: Vec<u32>,
    class_probs: Vec<f64>,
}

impl ConditionalTable {
    pub fn group(universe: &Universe, sites: &[Point]) -> Result<Self> {
        let idx: Vec<usize> = sites
            .iter()
            .map(|p| {
                universe
                    .point_index(p)
                    .ok_or_else(|| Error::UntabulatedSite(p.to_string()))
            })
            .collect::<Result<_>>()?;
        let outcomes = universe.outcomes();
        let mut keys: HashMap<Vec<u64>, u32> = HashMap::new();
        let mut class_of = Vec::with_capacity(outcomes);
        let mut counts: Vec<u64> = Vec::new();
        for outcome in 0..outcomes {
            let key: Vec<u64> = idx
                .iter()
                .map(|&i| universe.value(outcome, i).to_bits())
                .collect();
            let next = counts.len() as u32;
            let class = *keys.entry(key).or_insert(next);
            if class == next {
                counts.push(0);
            }
            counts[class as usize] += 1;
            class_of.push(class);
        }
        let prob = universe.prob();
        Ok(ConditionalTable {
            class_of,
            class_probs: counts.iter().map(|&c| c as f64 * prob).collect(),
        })
    }

    pub fn classes(&self) -> usize {
        self.class_probs.len()
    }

    pub fn class_probs(&self) -> &[f64] {
        &self.class_probs
    }

    /// Per-class conditional expectation of a target variable.
    pub fn class_means(&self, target: &[f64]) -> Vec<f64> {
        let mut sums = vec![0.0; self.classes()];
        let mut counts = vec![0u64; self.classes()];
        for (outcome, &class) in self.class_of.iter().enumerate() {
            sums[class as usize] += target[outcome];
            counts[class as usize] += 1;
        }
        sums.iter()
            .zip(&counts)
            .map(|(&s, &c)| s / c as f64)
            .collect()
    }

    /// `E[target | class]` expanded back over outcomes.
    pub fn per_outcome(&self, target: &[f64]) -> Vec<f64> {
        let means = self.class_means(target);
        self.class_of.iter().map(|&c| means[c as usize]).collect()
    }

    /// `| sum_c P(c) E[Y|c] - E[Y] |`, zero up to round-off by construction.
    pub fn total_expectation_gap(&self, target: &[f64], mean: f64) -> f64 {
        let means = self.class_means(target);
        let total: f64 = means
            .iter()
            .zip(&self.class_probs)
            .map(|(m, p)| m * p)
            .sum();
        (total - mean).abs()
    }

    /// `|E[Y | sigma] - E[Y]|_p` over the universe.
    pub fn centered_norm(&self, target: &[f64], mean: f64, p: PNorm) -> f64 {
        let means = self.class_means(target);
        match p {
            PNorm::Infinity => means.iter().map(|m| (m - mean).abs()).fold(0.0, f64::max),
            PNorm::Finite(q) => means
                .iter()
                .zip(&self.class_probs)
                .map(|(m, prob)| prob * (m - mean).abs().powf(q))
                .sum::<f64>()
                .powf(1.0 / q),
        }
    }

    pub fn max_abs_class_mean(&self, target: &[f64]) -> f64 {
        self.class_means(target)
            .iter()
            .map(|m| m.abs())
            .fold(0.0, f64::max)
    }
}

/// Which conditioning geometry to use for the lag-r coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SigmaAlgebra {
    /// Sites with `sup_i (t_i - u_i) >= r` (one-sided past).
    OneSidedPast,
    /// Sites with `|u - t|_inf >= r` (symmetric distance); generates a
    /// larger sigma-algebra than the one-sided version.
    SupDistance,
}

/// Generating sites of the lag-r sigma-algebra at `t`, within the window.
pub fn generating_set(universe: &Universe, t: &Point, r: u64, kind: SigmaAlgebra) -> Vec<Point> {
    universe
        .points()
        .iter()
        .filter(|u| {
            let gap = t
                .coords()
                .iter()
                .zip(u.coords())
                .map(|(&a, &b)| a as i128 - b as i128)
                .max()
                .unwrap_or(i128::MIN);
            match kind {
                SigmaAlgebra::OneSidedPast => gap >= r as i128,
                SigmaAlgebra::SupDistance => t.dist_inf(u) >= r,
            }
        })
        .cloned()
        .collect()
}

/// Exact `|E[X_t | lag-r sigma-algebra] - E[X_t]|_p` over the universe.
pub fn wd_coefficient(
    universe: &Universe,
    t: &Point,
    r: u64,
    p: PNorm,
    kind: SigmaAlgebra,
) -> Result<f64> {
    let sites = generating_set(universe, t, r, kind);
    let table = ConditionalTable::group(universe, &sites)?;
    let target = universe.field_column(t)?;
    let mean = universe.mean(&target);
    Ok(table.centered_norm(&target, mean, p))
}

fn top_scale(points: &[Point]) -> u32 {
    let max = points.iter().map(|p| p.norm_inf()).max().unwrap_or(0);
    if max == 0 {
        0
    } else {
        max.ilog2() + 1
    }
}

fn sort_by_order(points: &mut [Point]) {
    points.sort_by(|a, b| dyadic_cmp(a, b).expect("equal dimensions"));
}

/// Per-outcome `E[X_t | strict predecessors at scale k, within the window]`.
fn strict_past_expectation(universe: &Universe, t: &Point, k: u32) -> Result<Vec<f64>> {
    let sites = predecessors_at_scale(t, k, universe.window(), PredecessorKind::Strict)?;
    let table = ConditionalTable::group(universe, &sites)?;
    let target = universe.field_column(t)?;
    Ok(table.per_outcome(&target))
}

type PastCache = HashMap<(Point, u32), Vec<f64>>;

fn cached_past<'a>(
    universe: &Universe,
    t: &Point,
    k: u32,
    cache: &'a mut PastCache,
) -> Result<&'a Vec<f64>> {
    match cache.entry((t.clone(), k)) {
        std::collections::hash_map::Entry::Occupied(e) => Ok(e.into_mut()),
        std::collections::hash_map::Entry::Vacant(e) => {
            Ok(e.insert(strict_past_expectation(universe, t, k)?))
        }
    }
}

/// Per-outcome increments at one scale, keyed by cell base.
pub type ScaleIncrements = Vec<(Point, Vec<f64>)>;

/// Martingale increments of a finite set at one scale, keyed by cell base
/// and ordered by the multiscale order. Scale 0 yields
/// `Z_t = X_t - E[X_t | strict past of t]`; scale k >= 1 sums the coarsening
/// differences `E[X_t | past_{k-1}] - E[X_t | past_k]` over each cell, so
/// that the scales telescope from full information down to the mean.
pub fn martingale_increments(
    universe: &Universe,
    set: &[Point],
    k: u32,
) -> Result<ScaleIncrements> {
    let mut cache = PastCache::new();
    increments_with_cache(universe, set, k, &mut cache)
}

fn increments_with_cache(
    universe: &Universe,
    set: &[Point],
    k: u32,
    cache: &mut PastCache,
) -> Result<ScaleIncrements> {
    let outcomes = universe.outcomes();
    let mut by_base: HashMap<Point, Vec<f64>> = HashMap::new();
    for t in set {
        let base = dyadic_project(t, k);
        let column = universe.field_column(t)?;
        let term: Vec<f64> = if k == 0 {
            let past = cached_past(universe, t, 0, cache)?;
            column.iter().zip(past).map(|(x, e)| x - e).collect()
        } else {
            let finer = cached_past(universe, t, k - 1, cache)?.clone();
            let coarser = cached_past(universe, t, k, cache)?;
            finer.iter().zip(coarser).map(|(a, b)| a - b).collect()
        };
        let acc = by_base.entry(base).or_insert_with(|| vec![0.0; outcomes]);
        for (a, v) in acc.iter_mut().zip(&term) {
            *a += v;
        }
    }
    let mut out: ScaleIncrements = by_base.into_iter().collect();
    out.sort_by(|(a, _), (b, _)| dyadic_cmp(a, b).expect("equal dimensions"));
    Ok(out)
}

/// All scales `0 ..= floor(log2 |set|_inf) + 1` of the decomposition.
pub fn martingale_decomposition(
    universe: &Universe,
    set: &[Point],
) -> Result<Vec<(u32, ScaleIncrements)>> {
    let mut cache = PastCache::new();
    let top = top_scale(set);
    let mut out = Vec::new();
    for k in 0..=top {
        out.push((k, increments_with_cache(universe, set, k, &mut cache)?));
    }
    Ok(out)
}

/// Max over outcomes of the defect in the telescoping identity
/// `sum_k sum_b Z_{b,k} = S_set`; algebraically zero for any window.
pub fn decomposition_error(universe: &Universe, set: &[Point]) -> Result<f64> {
    let outcomes = universe.outcomes();
    let mut total = vec![0.0f64; outcomes];
    for (_, increments) in martingale_decomposition(universe, set)? {
        for (_, z) in increments {
            for (acc, v) in total.iter_mut().zip(&z) {
                *acc += v;
            }
        }
    }
    let mut centered_sum = vec![0.0f64; outcomes];
    for t in set {
        let column = universe.field_column(t)?;
        let mean = universe.mean(&column);
        for (acc, v) in centered_sum.iter_mut().zip(&column) {
            *acc += v - mean;
        }
    }
    Ok(total
        .iter()
        .zip(&centered_sum)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Max conditional-expectation defect of the martingale property at scale k:
/// over earlier bases b' and conditioning classes of the weak predecessor
/// sigma-algebra of b', the largest `|E[Z_{b,k} | class]|`.
pub fn martingale_violation(universe: &Universe, set: &[Point], k: u32) -> Result<f64> {
    let increments = martingale_increments(universe, set, k)?;
    let mut bases: Vec<Point> = increments.iter().map(|(b, _)| b.clone()).collect();
    sort_by_order(&mut bases);
    let mut worst = 0.0f64;
    for (i, earlier) in bases.iter().enumerate() {
        if i + 1 == bases.len() {
            break;
        }
        let sites = predecessors_at_scale(earlier, k, universe.window(), PredecessorKind::Weak)?;
        let table = ConditionalTable::group(universe, &sites)?;
        for (base, z) in &increments {
            if dyadic_cmp(earlier, base).expect("equal dimensions") == std::cmp::Ordering::Less {
                worst = worst.max(table.max_abs_class_mean(z));
            }
        }
    }
    Ok(worst)
}

/// Exact lag-r coefficient of the compressed field on `K(A)` against the
/// original model's envelope at the same lag. Returns
/// `(max coefficient over K(A), M_p * phi(r))`.
pub fn compression_wd_check(
    model: &crate::fields::FieldModel,
    set: &ProductSet,
    p: PNorm,
    r: u64,
    cap: u32,
) -> Result<(f64, f64)> {
    let compression = Compression::new(set.clone())?;
    let window = crate::lattice::Rectangle::new(
        set.factors()
            .iter()
            .map(|f| f.last().copied().unwrap_or(0) + 1)
            .collect(),
    )?;
    let universe = model.enumerate_universe(&window, cap)?;
    let target_rect = compression.target();
    let domain: Vec<Point> = target_rect.points().collect();
    let mut worst = 0.0f64;
    for t in &domain {
        let mapped_t = compression.forward(t)?;
        let target = universe.field_column(&mapped_t)?;
        let mean = universe.mean(&target);
        let sites: Vec<Point> = domain
            .iter()
            .filter(|u| {
                t.coords()
                    .iter()
                    .zip(u.coords())
                    .map(|(&a, &b)| a as i128 - b as i128)
                    .max()
                    .unwrap()
                    >= r as i128
            })
            .map(|u| compression.forward(u))
            .collect::<Result<_>>()?;
        let table = ConditionalTable::group(&universe, &sites)?;
        worst = worst.max(table.centered_norm(&target, mean, p));
    }
    let envelope = model.wd_envelope(p);
    Ok((worst, envelope.m_p * envelope.phi(r)))
}

/// Sum of centered field values over a set, per outcome.
pub fn centered_sums(universe: &Universe, set: &[Point]) -> Result<Vec<f64>> {
    let mut out = vec![0.0f64; universe.outcomes()];
    for t in set {
        let column = universe.field_column(t)?;
        let mean = universe.mean(&column);
        for (acc, v) in out.iter_mut().zip(&column) {
            *acc += v - mean;
        }
    }
    Ok(out)
}

/// `|target|_p`-style helper for diagnostics on per-outcome vectors.
pub fn outcome_lp(universe: &Universe, values: &[f64], p: f64) -> f64 {
    let moments: Vec<f64> = values.iter().map(|v| v.abs().powf(p)).collect();
    (pairwise_sum(&moments) / universe.outcomes() as f64).powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::FieldModel;
    use crate::lattice::Rectangle;

    fn pt(coords: &[u64]) -> Point {
        Point::new(coords.to_vec()).unwrap()
    }

    #[test]
    fn rejects_untabulated_sites() {
        let model = FieldModel::iid(1).unwrap();
        let r = Rectangle::new(vec![4]).unwrap();
        let u = model.enumerate_universe(&r, 20).unwrap();
        let outside = pt(&[9]);
        assert!(matches!(
            ConditionalTable::group(&u, &[outside]),
            Err(crate::error::Error::UntabulatedSite(_))
        ));
    }

    #[test]
    fn trivial_conditioning_recovers_mean() {
        let model = FieldModel::iid(1).unwrap();
        let r = Rectangle::new(vec![4]).unwrap();
        let u = model.enumerate_universe(&r, 20).unwrap();
        let target = u.field_column(&pt(&[2])).unwrap();
        let table = ConditionalTable::group(&u, &[]).unwrap();
        assert_eq!(table.classes(), 1);
        let means = table.class_means(&target);
        assert!((means[0] - u.mean(&target)).abs() < 1e-15);
    }

    #[test]
    fn independence_gives_zero_coefficient() {
        let model = FieldModel::iid(1).unwrap();
        let r = Rectangle::new(vec![4]).unwrap();
        let u = model.enumerate_universe(&r, 20).unwrap();
        let target = u.field_column(&pt(&[3])).unwrap();
        let mean = u.mean(&target);
        let table = ConditionalTable::group(&u, &[pt(&[0]), pt(&[1])]).unwrap();
        for m in table.class_means(&target) {
            assert!(m.abs() < 1e-12);
        }
        assert!(table.total_expectation_gap(&target, mean) < 1e-14);
    }

    #[test]
    fn total_expectation_always_exact() {
        let model = FieldModel::uniform_moving_average(1, 1).unwrap();
        let r = Rectangle::new(vec![6]).unwrap();
        let u = model.enumerate_universe(&r, 20).unwrap();
        let target = u.field_column(&pt(&[3])).unwrap();
        let mean = u.mean(&target);
        for sites in [vec![], vec![pt(&[0])], vec![pt(&[1]), pt(&[2]), pt(&[4])]] {
            let table = ConditionalTable::group(&u, &sites).unwrap();
            assert!(table.total_expectation_gap(&target, mean) < 1e-14);
        }
    }

    #[test]
    fn lag_zero_reveals_the_point() {
        let model = FieldModel::uniform_moving_average(1, 1).unwrap();
        let r = Rectangle::new(vec![6]).unwrap();
        let u = model.enumerate_universe(&r, 20).unwrap();
        let p = PNorm::finite(2.0).unwrap();
        let t = pt(&[3]);
        let coeff = wd_coefficient(&u, &t, 0, p, SigmaAlgebra::OneSidedPast).unwrap();
        let target = u.field_column(&t).unwrap();
        assert!((coeff - u.lp_norm(&target, p)).abs() < 1e-12);
    }

    #[test]
    fn moving_average_vanishes_beyond_twice_radius() {
        let model = FieldModel::uniform_moving_average(1, 1).unwrap();
        let r = Rectangle::new(vec![8]).unwrap();
        let u = model.enumerate_universe(&r, 20).unwrap();
        let p = PNorm::finite(2.0).unwrap();
        let coeff = wd_coefficient(&u, &pt(&[4]), 3, p, SigmaAlgebra::OneSidedPast).unwrap();
        assert!(coeff < 1e-12, "coefficient {coeff}");
    }

    #[test]
    fn block_coefficient_example() {
        let model = FieldModel::block(2, 4, 1.0).unwrap();
        let r = Rectangle::cube(2, 4).unwrap();
        let u = model.enumerate_universe(&r, 20).unwrap();
        let p = PNorm::finite(2.0).unwrap();
        let coeff = wd_coefficient(&u, &pt(&[3, 3]), 2, p, SigmaAlgebra::OneSidedPast).unwrap();
        assert!((coeff - 0.25).abs() < 1e-12);
        assert!(coeff <= 0.5); // min(1, r^-alpha) at r = 2
    }

    #[test]
    fn coefficients_nonincreasing_and_dominated_by_symmetric() {
        let model = FieldModel::uniform_moving_average(1, 1).unwrap();
        let r = Rectangle::new(vec![8]).unwrap();
        let u = model.enumerate_universe(&r, 20).unwrap();
        let p = PNorm::finite(2.0).unwrap();
        let t = pt(&[4]);
        let mut last = f64::INFINITY;
        for lag in 0..6u64 {
            let one = wd_coefficient(&u, &t, lag, p, SigmaAlgebra::OneSidedPast).unwrap();
            let sym = wd_coefficient(&u, &t, lag, p, SigmaAlgebra::SupDistance).unwrap();
            assert!(one <= last + 1e-12);
            assert!(
                one <= sym + 1e-12,
                "lag {lag}: one-sided {one} > symmetric {sym}"
            );
            last = one;
        }
    }

    #[test]
    fn jensen_monotone_in_generating_set() {
        let model = FieldModel::uniform_moving_average(1, 1).unwrap();
        let r = Rectangle::new(vec![6]).unwrap();
        let u = model.enumerate_universe(&r, 20).unwrap();
        let p = PNorm::finite(2.0).unwrap();
        let target = u.field_column(&pt(&[3])).unwrap();
        let mean = u.mean(&target);
        let nested: [&[Point]; 3] = [
            &[pt(&[1])],
            &[pt(&[1]), pt(&[2])],
            &[pt(&[1]), pt(&[2]), pt(&[4])],
        ];
        let mut last = 0.0;
        for sites in nested {
            let table = ConditionalTable::group(&u, sites).unwrap();
            let norm = table.centered_norm(&target, mean, p);
            assert!(norm >= last - 1e-12);
            last = norm;
        }
    }

    #[test]
    fn decomposition_identity_exact() {
        let model = FieldModel::iid(2).unwrap();
        let r = Rectangle::cube(2, 3).unwrap();
        let u = model.enumerate_universe(&r, 20).unwrap();
        let set: Vec<Point> = r.points().collect();
        assert!(decomposition_error(&u, &set).unwrap() < 1e-12);

        // and for a dependent field
        let model = FieldModel::uniform_moving_average(1, 1).unwrap();
        let r = Rectangle::new(vec![6]).unwrap();
        let u = model.enumerate_universe(&r, 20).unwrap();
        let set: Vec<Point> = r.points().collect();
        assert!(decomposition_error(&u, &set).unwrap() < 1e-12);
    }

    #[test]
    fn iid_scale_zero_increment_is_the_field() {
        let model = FieldModel::iid(1).unwrap();
        let r = Rectangle::new(vec![4]).unwrap();
        let u = model.enumerate_universe(&r, 20).unwrap();
        let set: Vec<Point> = r.points().collect();
        let incs = martingale_increments(&u, &set, 0).unwrap();
        for (b, z) in incs {
            let column = u.field_column(&b).unwrap();
            for (a, v) in z.iter().zip(&column) {
                assert!((a - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_cell_has_one_increment() {
        let model = FieldModel::iid(2).unwrap();
        let r = Rectangle::cube(2, 2).unwrap();
        let u = model.enumerate_universe(&r, 20).unwrap();
        let set: Vec<Point> = r.points().collect(); // fits in C_{1,0}
        let incs = martingale_increments(&u, &set, 1).unwrap();
        assert_eq!(incs.len(), 1);
        assert!(incs[0].0.is_origin());
    }

    #[test]
    fn martingale_property_small() {
        let model = FieldModel::uniform_moving_average(1, 1).unwrap();
        let r = Rectangle::new(vec![8]).unwrap();
        let u = model.enumerate_universe(&r, 20).unwrap();
        let set: Vec<Point> = r.points().collect();
        for k in 0..=3u32 {
            let v = martingale_violation(&u, &set, k).unwrap();
            assert!(v <= 1e-10, "scale {k}: violation {v}");
        }
        // above the top scale there is a single base and nothing to check
        let v = martingale_violation(&u, &set, 6).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn compression_keeps_iid_independent() {
        let model = FieldModel::iid(2).unwrap();
        let a = ProductSet::new(vec![vec![0, 1, 3], vec![2]]);
        for r in 1..4u64 {
            let (coeff, env) =
                compression_wd_check(&model, &a, PNorm::finite(2.0).unwrap(), r, 20).unwrap();
            assert!(coeff < 1e-12);
            assert_eq!(env, 0.0);
        }
    }

    #[test]
    fn compression_identity_matches_original() {
        let model = FieldModel::uniform_moving_average(1, 1).unwrap();
        let a = ProductSet::new(vec![(0..6).collect()]);
        let window = Rectangle::new(vec![6]).unwrap();
        let u = model.enumerate_universe(&window, 20).unwrap();
        let p = PNorm::finite(2.0).unwrap();
        for r in 1..4u64 {
            let (compressed, _) = compression_wd_check(&model, &a, p, r, 20).unwrap();
            let direct = u
                .points()
                .to_vec()
                .iter()
                .map(|t| wd_coefficient(&u, t, r, p, SigmaAlgebra::OneSidedPast).unwrap())
                .fold(0.0, f64::max);
            assert!((compressed - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn compression_respects_envelope() {
        let model = FieldModel::uniform_moving_average(1, 1).unwrap();
        let a = ProductSet::new(vec![vec![0, 1, 3, 4, 6]]);
        let p = PNorm::finite(2.0).unwrap();
        for r in 1..=4u64 {
            let (coeff, env) = compression_wd_check(&model, &a, p, r, 20).unwrap();
            assert!(coeff <= env + 1e-12, "lag {r}: {coeff} > {env}");
        }
    }

    #[test]
    fn padded_field_keeps_envelope() {
        let window = Rectangle::new(vec![3]).unwrap();
        let model = FieldModel::iid(1).unwrap().pad_zero(window).unwrap();
        let r = Rectangle::new(vec![5]).unwrap();
        let u = model.enumerate_universe(&r, 20).unwrap();
        let p = PNorm::finite(2.0).unwrap();
        let env = model.wd_envelope(p);
        for t in u.points().to_vec() {
            for lag in 1..3u64 {
                let coeff = wd_coefficient(&u, &t, lag, p, SigmaAlgebra::OneSidedPast).unwrap();
                assert!(coeff <= env.m_p * env.phi(lag) + 1e-12);
            }
        }
    }
}
