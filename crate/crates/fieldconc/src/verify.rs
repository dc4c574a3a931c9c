//! Named verification suites: exhaustive order laws, separation and
//! cardinality identities, frame partitions, the exact martingale oracle,
//! weak-dependence coefficients, and compression checks. Each check returns
//! a pass/fail record with a quantitative detail string; the CLI renders
//! them and exits nonzero if any fails.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use crate::bounds::PNorm;
use crate::error::{Error, Result};
use crate::fields::FieldModel;
use crate::frames::{framed_partition, in_frame, Compression, DeltaSeq, ProductSet};
use crate::lattice::{
    cell_sum_of_squares, dyadic_cmp, dyadic_project, predecessors_at_scale, separation_distance,
    Point, PredecessorKind, Rectangle,
};
use crate::oracle::{
    compression_wd_check, decomposition_error, martingale_violation, wd_coefficient, SigmaAlgebra,
};

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

pub const SUITES: &[&str] = &["order", "frames", "martingale", "wd", "compression", "all"];

pub fn suite(name: &str) -> Result<Vec<Check>> {
    match name {
        "order" => Ok(order_suite()),
        "frames" => Ok(frames_suite()),
        "martingale" => Ok(martingale_suite()),
        "wd" => Ok(wd_suite()),
        "compression" => Ok(compression_suite()),
        "all" => {
            let mut all = order_suite();
            all.extend(frames_suite());
            all.extend(martingale_suite());
            all.extend(wd_suite());
            all.extend(compression_suite());
            Ok(all)
        }
        other => Err(Error::InvalidConfig(format!(
            "unknown suite '{other}' (expected one of {SUITES:?})"
        ))),
    }
}

/// Tiny deterministic generator for sampled checks.
struct Mix(u64);

impl Mix {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

fn grid(dim: usize, side: u64) -> Vec<Point> {
    Rectangle::cube(dim, side).unwrap().points().collect()
}

// ---------------------------------------------------------------------------
// order suite: total-order laws, projection lemmas, separation, cardinality
// ---------------------------------------------------------------------------

pub fn order_suite() -> Vec<Check> {
    let mut checks = order_laws();
    checks.push(separation_check());
    checks.push(cell_cardinality_check());
    checks
}

/// Total-order laws and the projection / predecessor-set lemmas.
pub fn order_laws() -> Vec<Check> {
    let mut checks = Vec::new();

    // totality and antisymmetry, exhaustive pairs on [8]^d
    for dim in 1..=3usize {
        let points = grid(dim, 8);
        let mut bad = 0u64;
        for a in &points {
            for b in &points {
                let ab = dyadic_cmp(a, b).unwrap();
                let ba = dyadic_cmp(b, a).unwrap();
                if ab.reverse() != ba || ((ab == Ordering::Equal) != (a == b)) {
                    bad += 1;
                }
            }
        }
        checks.push(Check::new(
            format!("order/totality_antisymmetry_d{dim}"),
            bad == 0,
            format!("{} pairs, {bad} violations", points.len() * points.len()),
        ));
    }

    // transitivity: full on [4]^d, sampled triples on [8]^d
    for dim in 1..=3usize {
        let points = grid(dim, 4);
        let mut bad = 0u64;
        for a in &points {
            for b in &points {
                if dyadic_cmp(a, b).unwrap() == Ordering::Greater {
                    continue;
                }
                for c in &points {
                    if dyadic_cmp(b, c).unwrap() != Ordering::Greater
                        && dyadic_cmp(a, c).unwrap() == Ordering::Greater
                    {
                        bad += 1;
                    }
                }
            }
        }
        checks.push(Check::new(
            format!("order/transitivity_full_d{dim}"),
            bad == 0,
            format!("all triples of [4]^{dim}, {bad} violations"),
        ));
    }
    for dim in 2..=3usize {
        let points = grid(dim, 8);
        let mut rng = Mix(0xfeed_0000 + dim as u64);
        let mut bad = 0u64;
        let samples = 200_000u64;
        for _ in 0..samples {
            let a = &points[rng.below(points.len() as u64) as usize];
            let b = &points[rng.below(points.len() as u64) as usize];
            let c = &points[rng.below(points.len() as u64) as usize];
            if dyadic_cmp(a, b).unwrap() != Ordering::Greater
                && dyadic_cmp(b, c).unwrap() != Ordering::Greater
                && dyadic_cmp(a, c).unwrap() == Ordering::Greater
            {
                bad += 1;
            }
        }
        checks.push(Check::new(
            format!("order/transitivity_sampled_d{dim}"),
            bad == 0,
            format!("{samples} sampled triples of [8]^{dim}, {bad} violations"),
        ));
    }

    // projection composition pi_l . pi_k = pi_max(k,l)
    {
        let mut bad = 0u64;
        for dim in 1..=2usize {
            for t in grid(dim, 16) {
                for k in 0..6 {
                    for l in 0..6 {
                        if dyadic_project(&dyadic_project(&t, k), l) != dyadic_project(&t, k.max(l))
                        {
                            bad += 1;
                        }
                    }
                }
            }
        }
        checks.push(Check::new(
            "order/projection_composition",
            bad == 0,
            format!("{bad} violations"),
        ));
    }

    // coordinate-wise order is refined by both lex and the multiscale order
    {
        let points = grid(2, 8);
        let mut bad = 0u64;
        for a in &points {
            for b in &points {
                if a.le_cw(b)
                    && (a.coords() > b.coords() || dyadic_cmp(a, b).unwrap() == Ordering::Greater)
                {
                    bad += 1;
                }
            }
        }
        checks.push(Check::new(
            "order/coordinatewise_compatible",
            bad == 0,
            format!("{bad} violations"),
        ));
    }

    // coarser projections never move a point up, and projections are monotone
    {
        let points = grid(2, 8);
        let mut bad = 0u64;
        for t in &points {
            for k in 0..5u32 {
                for l in 0..=k {
                    let hi = dyadic_project(t, k);
                    let lo = dyadic_project(t, l);
                    if dyadic_cmp(&hi, &lo).unwrap() == Ordering::Greater {
                        bad += 1;
                    }
                }
            }
        }
        for a in &points {
            for b in &points {
                if dyadic_cmp(a, b).unwrap() == Ordering::Greater {
                    continue;
                }
                for k in 0..5u32 {
                    if dyadic_cmp(&dyadic_project(a, k), &dyadic_project(b, k)).unwrap()
                        == Ordering::Greater
                    {
                        bad += 1;
                    }
                }
            }
        }
        checks.push(Check::new(
            "order/projection_monotone",
            bad == 0,
            format!("{bad} violations"),
        ));
    }

    // predecessor-set identities and nesting on a window
    {
        let window = Rectangle::cube(2, 8).unwrap();
        let mut bad = 0u64;
        for t in window.points() {
            for k in 0..4u32 {
                let strict: BTreeSet<Point> =
                    predecessors_at_scale(&t, k, &window, PredecessorKind::Strict)
                        .unwrap()
                        .into_iter()
                        .collect();
                let weak: BTreeSet<Point> =
                    predecessors_at_scale(&t, k, &window, PredecessorKind::Weak)
                        .unwrap()
                        .into_iter()
                        .collect();
                // strict set equals { u : u < pi_k(t) }
                let pivot = dyadic_project(&t, k);
                let alt: BTreeSet<Point> = window
                    .points()
                    .filter(|u| dyadic_cmp(u, &pivot).unwrap() == Ordering::Less)
                    .collect();
                if strict != alt {
                    bad += 1;
                }
                // weak = strict + the cell of t
                let mut cell_union = strict.clone();
                for u in window.points() {
                    if dyadic_project(&u, k) == pivot {
                        cell_union.insert(u);
                    }
                }
                if weak != cell_union {
                    bad += 1;
                }
                // members of the cell share both sets
                if k >= 1 {
                    let strict_b: BTreeSet<Point> =
                        predecessors_at_scale(&pivot, k, &window, PredecessorKind::Strict)
                            .unwrap()
                            .into_iter()
                            .collect();
                    if strict != strict_b {
                        bad += 1;
                    }
                }
                // nesting across scales
                if k >= 1 {
                    let strict_prev: BTreeSet<Point> =
                        predecessors_at_scale(&t, k - 1, &window, PredecessorKind::Strict)
                            .unwrap()
                            .into_iter()
                            .collect();
                    let weak_prev: BTreeSet<Point> =
                        predecessors_at_scale(&t, k - 1, &window, PredecessorKind::Weak)
                            .unwrap()
                            .into_iter()
                            .collect();
                    if !strict.is_subset(&strict_prev)
                        || !strict_prev.is_subset(&weak_prev)
                        || !weak_prev.is_subset(&weak)
                    {
                        bad += 1;
                    }
                }
            }
        }
        checks.push(Check::new(
            "order/predecessor_identities",
            bad == 0,
            format!("{bad} violations"),
        ));
    }

    checks
}

/// Exhaustive separation bound: excluded band widths force predecessors at
/// distance at least delta + 1 (d in {1,2}, scales <= 3, coordinates <= 31).
pub fn separation_check() -> Check {
    let mut bad = 0u64;
    let mut tested = 0u64;
    for dim in 1..=2usize {
        for k in 0..=3u32 {
            for delta in 0..(1u64 << k) {
                for t in grid(dim, 32) {
                    let outside = t
                        .coords()
                        .iter()
                        .all(|&x| !crate::frames::in_frame_band(x, k, delta).unwrap());
                    if !outside {
                        continue;
                    }
                    tested += 1;
                    if !separation_distance(&t, k).at_least(delta + 1) {
                        bad += 1;
                    }
                }
            }
        }
    }
    Check::new(
        "order/separation_bound",
        bad == 0,
        format!("{tested} framed points checked, {bad} violations"),
    )
}

/// Product formula for `sum_b |C_{k,b} cap R|^2` against a point-by-point
/// enumeration, plus the `|R| |C_k cap R|` majorant; exact integers.
pub fn cell_cardinality_check() -> Check {
    let mut rng = Mix(0xcafe);
    let mut bad = 0u64;
    for case in 0..200 {
        let dim = (case % 3) + 1;
        let sides: Vec<u64> = (0..dim).map(|_| 1 + rng.below(100)).collect();
        let k = rng.below(8) as u32;
        let rect = Rectangle::new(sides).unwrap();
        let mut counts: HashMap<Point, u128> = HashMap::new();
        for p in rect.points() {
            *counts.entry(dyadic_project(&p, k)).or_insert(0) += 1;
        }
        let brute: u128 = counts.values().map(|&c| c * c).sum();
        let (sum, bound) = cell_sum_of_squares(&rect, k).unwrap();
        if sum != brute || sum > bound {
            bad += 1;
        }
    }
    Check::new(
        "order/cell_sum_of_squares",
        bad == 0,
        format!("200 random boxes, {bad} mismatches"),
    )
}

// ---------------------------------------------------------------------------
// frames suite: partitions, band counts, strip bounds
// ---------------------------------------------------------------------------

fn constrained_sequences(dim: usize, m: u32) -> Vec<DeltaSeq> {
    let mut out = vec![DeltaSeq::zeros(m as usize)];
    // analytic sequences for a spread of decay exponents
    let rect = Rectangle::cube(dim, 1u64 << m).unwrap();
    for alpha in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let model = crate::bounds::DecayModel::new(
            crate::bounds::Decay::Polynomial { c: 1.0, alpha },
            1.0,
            PNorm::Finite(2.0),
        )
        .unwrap();
        out.push(crate::bounds::analytic_delta(&rect, &model));
    }
    // greedy maximal feasible sequence: saturate from the top scale down
    let mut widths = vec![0u64; m as usize];
    for k in (1..=m).rev() {
        let start = widths[k as usize - 1];
        let mut best = start;
        for cand in start..=(1u64 << k) {
            let mut trial = widths.clone();
            for j in k..=m {
                trial[j as usize - 1] = trial[j as usize - 1].max(cand);
            }
            let feasible = DeltaSeq::new(trial)
                .ok()
                .map(|s| s.satisfies_constraint(m, dim).unwrap())
                .unwrap_or(false);
            if feasible {
                best = cand;
            } else {
                break;
            }
        }
        for j in k..=m {
            widths[j as usize - 1] = widths[j as usize - 1].max(best);
        }
    }
    if let Ok(seq) = DeltaSeq::new(widths) {
        if seq.satisfies_constraint(m, dim).unwrap() {
            out.push(seq);
        }
    }
    out
}

pub fn frames_suite() -> Vec<Check> {
    let mut checks = Vec::new();

    // partition correctness on assorted boxes and sequences
    {
        let mut bad = 0u64;
        let cases: Vec<(Vec<u64>, Vec<u64>)> = vec![
            (vec![4, 4], vec![1]),
            (vec![12, 9], vec![1, 2, 2]),
            (vec![16], vec![0, 1, 4]),
            (vec![7, 5, 6], vec![1, 1]),
            (vec![32, 3], vec![0, 0, 2, 3]),
        ];
        for (sides, widths) in cases {
            let rect = Rectangle::new(sides).unwrap();
            let delta = DeltaSeq::new(widths).unwrap();
            let partition = framed_partition(&rect, &delta);
            for p in rect.points() {
                let hits = partition.parts().filter(|part| part.contains(&p)).count();
                if hits != 1 {
                    bad += 1;
                }
            }
            let total: u128 = partition.parts().map(|part| part.cardinality()).sum();
            if total != rect.cardinality() {
                bad += 1;
            }
        }
        checks.push(Check::new(
            "frames/partition_exact",
            bad == 0,
            format!("{bad} violations"),
        ));
    }

    // zero widths keep everything framed
    {
        let rect = Rectangle::new(vec![9, 5]).unwrap();
        let partition = framed_partition(&rect, &DeltaSeq::zeros(3));
        let pass = partition.framed.cardinality() == rect.cardinality()
            && partition.strips.iter().all(|s| s.is_empty());
        checks.push(Check::new("frames/zero_widths_trivial", pass, ""));
    }

    // per-axis band count: 4 d^2 |Lambda cap [N]_0| <= N for every N <= 2^12,
    // for every constraint-satisfying test sequence
    for dim in 1..=3usize {
        let mut worst: (u128, u128) = (0, 1);
        let mut bad = 0u64;
        for seq in constrained_sequences(dim, 12) {
            let mut banded: u128 = 0;
            for x in 0..4096u64 {
                if in_frame(x, &seq) {
                    banded += 1;
                }
                let n = (x + 1) as u128;
                let lhs = banded * 4 * (dim as u128) * (dim as u128);
                if lhs > n {
                    bad += 1;
                }
                if lhs * worst.1 > worst.0 * n {
                    worst = (lhs, n);
                }
            }
        }
        checks.push(Check::new(
            format!("frames/band_count_bound_d{dim}"),
            bad == 0,
            format!("worst 4d^2|band|/N = {}/{}", worst.0, worst.1),
        ));
    }

    // strip bound on boxes: |R cap Delta_i| * 4 d^2 <= |R|
    {
        let mut rng = Mix(0xbead);
        let mut bad = 0u64;
        for case in 0..60 {
            let dim = (case % 3) + 1;
            let sides: Vec<u64> = (0..dim).map(|_| 1 + rng.below(4096)).collect();
            let rect = Rectangle::new(sides).unwrap();
            let m = rect.max_scale();
            for seq in constrained_sequences(dim, m.max(1)) {
                let partition = framed_partition(&rect, &seq);
                for strip in &partition.strips {
                    let lhs = strip.cardinality() * 4 * (dim as u128) * (dim as u128);
                    if lhs > rect.cardinality() {
                        bad += 1;
                    }
                }
            }
        }
        checks.push(Check::new(
            "frames/strip_cardinality_bound",
            bad == 0,
            format!("{bad} violations"),
        ));
    }

    checks
}

// ---------------------------------------------------------------------------
// martingale suite
// ---------------------------------------------------------------------------

pub fn martingale_suite() -> Vec<Check> {
    let mut checks = Vec::new();

    // independent signs on [4]^2, all 2^16 outcomes
    {
        let model = FieldModel::iid(2).unwrap();
        let window = Rectangle::cube(2, 4).unwrap();
        let universe = model.enumerate_universe(&window, 20).unwrap();
        let set: Vec<Point> = window.points().collect();
        for k in 0..=2u32 {
            let v = martingale_violation(&universe, &set, k).unwrap();
            checks.push(Check::new(
                format!("martingale/iid_4x4_scale{k}"),
                v <= 1e-10,
                format!("max violation {v:.3e}"),
            ));
        }
        let e = decomposition_error(&universe, &set).unwrap();
        checks.push(Check::new(
            "martingale/iid_4x4_decomposition",
            e <= 1e-12,
            format!("max defect {e:.3e}"),
        ));
    }

    // moving average of radius 1 on [8], all 2^10 outcomes
    {
        let model = FieldModel::uniform_moving_average(1, 1).unwrap();
        let window = Rectangle::new(vec![8]).unwrap();
        let universe = model.enumerate_universe(&window, 20).unwrap();
        let set: Vec<Point> = window.points().collect();
        for k in 0..=3u32 {
            let v = martingale_violation(&universe, &set, k).unwrap();
            checks.push(Check::new(
                format!("martingale/ma_8_scale{k}"),
                v <= 1e-10,
                format!("max violation {v:.3e}"),
            ));
        }
        let e = decomposition_error(&universe, &set).unwrap();
        checks.push(Check::new(
            "martingale/ma_8_decomposition",
            e <= 1e-12,
            format!("max defect {e:.3e}"),
        ));
    }

    checks
}

// ---------------------------------------------------------------------------
// weak-dependence suite
// ---------------------------------------------------------------------------

pub fn wd_suite() -> Vec<Check> {
    let mut checks = Vec::new();
    let p2 = PNorm::Finite(2.0);

    // moving averages: coefficients vanish beyond twice the radius
    for (radius, len) in [(1u64, 8u64), (2, 6)] {
        let model = FieldModel::uniform_moving_average(1, radius).unwrap();
        let window = Rectangle::new(vec![len]).unwrap();
        let universe = model.enumerate_universe(&window, 20).unwrap();
        let mut worst = 0.0f64;
        for t in universe.points().to_vec() {
            for r in (2 * radius + 1)..(len + 2) {
                let c = wd_coefficient(&universe, &t, r, p2, SigmaAlgebra::OneSidedPast).unwrap();
                worst = worst.max(c);
            }
        }
        checks.push(Check::new(
            format!("wd/ma_radius{radius}_vanishes"),
            worst <= 1e-12,
            format!("max coefficient beyond 2w: {worst:.3e}"),
        ));
    }

    // coefficients are nonincreasing in the lag, and the symmetric
    // sigma-algebra dominates the one-sided one
    {
        let mut bad = 0u64;
        let configs: Vec<(FieldModel, Rectangle)> = vec![
            (
                FieldModel::iid(1).unwrap(),
                Rectangle::new(vec![8]).unwrap(),
            ),
            (
                FieldModel::uniform_moving_average(1, 1).unwrap(),
                Rectangle::new(vec![8]).unwrap(),
            ),
            (
                FieldModel::block(2, 4, 1.0).unwrap(),
                Rectangle::cube(2, 4).unwrap(),
            ),
            (
                FieldModel::causal_linear(1, 1.0, 2).unwrap(),
                Rectangle::new(vec![6]).unwrap(),
            ),
        ];
        for (model, window) in configs {
            let universe = model.enumerate_universe(&window, 20).unwrap();
            for t in universe.points().to_vec() {
                let mut last = f64::INFINITY;
                for r in 0..(window.sides()[0] + 2) {
                    let one =
                        wd_coefficient(&universe, &t, r, p2, SigmaAlgebra::OneSidedPast).unwrap();
                    let sym =
                        wd_coefficient(&universe, &t, r, p2, SigmaAlgebra::SupDistance).unwrap();
                    if one > last + 1e-12 || one > sym + 1e-12 {
                        bad += 1;
                    }
                    last = one;
                }
            }
        }
        checks.push(Check::new(
            "wd/nonincreasing_and_sigma_ordering",
            bad == 0,
            format!("{bad} violations"),
        ));
    }

    // block field: exact coefficient stays below min(1, r^-alpha) with unit
    // scale, and saturates at side^-alpha once an in-cube site is revealed
    {
        let model = FieldModel::block(2, 4, 1.0).unwrap();
        let window = Rectangle::cube(2, 4).unwrap();
        let universe = model.enumerate_universe(&window, 20).unwrap();
        let envelope = model.wd_envelope(p2);
        let mut bad = 0u64;
        let mut saturated = false;
        for t in universe.points().to_vec() {
            for r in 0..8u64 {
                let c = wd_coefficient(&universe, &t, r, p2, SigmaAlgebra::OneSidedPast).unwrap();
                if c > envelope.m_p * envelope.phi(r) + 1e-12 {
                    bad += 1;
                }
                if r >= 1 && r <= t.norm_inf() && (c - 0.25).abs() < 1e-12 {
                    saturated = true;
                }
            }
        }
        checks.push(Check::new(
            "wd/block_envelope",
            bad == 0 && envelope.m_p == 1.0 && saturated,
            format!("{bad} violations; M_p = {}", envelope.m_p),
        ));
    }

    // zero padding keeps the envelope while breaking stationarity
    {
        let inner = FieldModel::iid(1).unwrap();
        let model = inner.pad_zero(Rectangle::new(vec![3]).unwrap()).unwrap();
        let window = Rectangle::new(vec![5]).unwrap();
        let universe = model.enumerate_universe(&window, 20).unwrap();
        let envelope = model.wd_envelope(p2);
        let mut bad = 0u64;
        for t in universe.points().to_vec() {
            for r in 1..4u64 {
                let c = wd_coefficient(&universe, &t, r, p2, SigmaAlgebra::OneSidedPast).unwrap();
                if c > envelope.m_p * envelope.phi(r) + 1e-12 {
                    bad += 1;
                }
            }
        }
        checks.push(Check::new(
            "wd/padded_keeps_envelope",
            bad == 0,
            format!("{bad} violations"),
        ));
    }

    checks
}

// ---------------------------------------------------------------------------
// compression suite
// ---------------------------------------------------------------------------

pub fn compression_suite() -> Vec<Check> {
    let mut checks = Vec::new();

    // sum preservation on sampled realizations, exact equality
    {
        let mut bad = 0u64;
        let configs: Vec<(FieldModel, ProductSet)> = vec![
            (
                FieldModel::iid(2).unwrap(),
                ProductSet::new(vec![vec![0, 1, 3], vec![2]]),
            ),
            (
                FieldModel::uniform_moving_average(1, 1).unwrap(),
                ProductSet::new(vec![vec![0, 1, 3, 4, 6]]),
            ),
            (
                FieldModel::causal_linear(2, 1.0, 1).unwrap(),
                ProductSet::new(vec![vec![0, 2, 3], vec![1, 4]]),
            ),
        ];
        for (model, set) in configs {
            let compression = Compression::new(set.clone()).unwrap();
            let window = Rectangle::new(
                set.factors()
                    .iter()
                    .map(|f| f.last().unwrap() + 1)
                    .collect(),
            )
            .unwrap();
            for seed in [1u64, 2, 3] {
                let sample = model.sample(&window, seed).unwrap();
                let value_at = |p: &Point| -> f64 {
                    let idx = window
                        .points()
                        .position(|q| q == *p)
                        .expect("point inside window");
                    sample.values[idx]
                };
                let direct: f64 = set.points().iter().map(&value_at).sum();
                let compressed: f64 = compression
                    .target()
                    .points()
                    .map(|t| value_at(&compression.forward(&t).unwrap()))
                    .sum();
                if (direct - compressed).abs() > 0.0 {
                    bad += 1;
                }
            }
        }
        checks.push(Check::new(
            "compression/sum_preserved",
            bad == 0,
            format!("{bad} violations"),
        ));
    }

    // gap expansion: sup_i((t:A) - (u:A)) >= sup_i(t - u) whenever the
    // right side is nonnegative (the case the dependence argument uses),
    // exhaustive over K(A) pairs
    {
        let mut bad = 0u64;
        let sets = [
            ProductSet::new(vec![vec![0, 1, 3], vec![2, 5, 6]]),
            ProductSet::new(vec![vec![2, 7], vec![0, 1, 4], vec![3, 8]]),
            ProductSet::new(vec![vec![0, 1, 3, 4, 6]]),
            ProductSet::new(vec![vec![5, 6, 9, 12], vec![0, 3]]),
        ];
        for set in sets {
            let compression = Compression::new(set).unwrap();
            let domain: Vec<Point> = compression.target().points().collect();
            for t in &domain {
                for u in &domain {
                    let sup = |a: &Point, b: &Point| {
                        a.coords()
                            .iter()
                            .zip(b.coords())
                            .map(|(&x, &y)| x as i128 - y as i128)
                            .max()
                            .unwrap()
                    };
                    let orig = sup(t, u);
                    if orig < 0 {
                        continue;
                    }
                    let img = sup(
                        &compression.forward(t).unwrap(),
                        &compression.forward(u).unwrap(),
                    );
                    if img < orig {
                        bad += 1;
                    }
                }
            }
        }
        checks.push(Check::new(
            "compression/gap_expansion",
            bad == 0,
            format!("{bad} violations"),
        ));
    }

    // weak dependence survives compression on every tiny-universe config
    {
        let p2 = PNorm::Finite(2.0);
        let configs: Vec<(&str, FieldModel, ProductSet, u64)> = vec![
            (
                "iid_1d",
                FieldModel::iid(1).unwrap(),
                ProductSet::new(vec![vec![0, 1, 3]]),
                3,
            ),
            (
                "iid_2d",
                FieldModel::iid(2).unwrap(),
                ProductSet::new(vec![vec![0, 1, 3], vec![2]]),
                3,
            ),
            (
                "ma_1d",
                FieldModel::uniform_moving_average(1, 1).unwrap(),
                ProductSet::new(vec![vec![0, 1, 3, 4, 6]]),
                4,
            ),
            (
                "block_2d",
                FieldModel::block(2, 4, 1.0).unwrap(),
                ProductSet::new(vec![vec![0, 1, 3], vec![0, 2]]),
                4,
            ),
            (
                "causal_1d",
                FieldModel::causal_linear(1, 1.5, 2).unwrap(),
                ProductSet::new(vec![vec![0, 2, 3, 5]]),
                4,
            ),
        ];
        for (name, model, set, max_lag) in configs {
            let mut worst_gap = f64::NEG_INFINITY;
            let mut bad = 0u64;
            for r in 1..=max_lag {
                let (coeff, envelope) = compression_wd_check(&model, &set, p2, r, 20).unwrap();
                if coeff > envelope + 1e-12 {
                    bad += 1;
                }
                worst_gap = worst_gap.max(coeff - envelope);
            }
            checks.push(Check::new(
                format!("compression/wd_preserved_{name}"),
                bad == 0,
                format!("max coefficient minus envelope: {worst_gap:.3e}"),
            ));
        }
    }

    checks
}
