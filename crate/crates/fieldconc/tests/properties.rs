//! Property tests over randomly generated boxes, band-width sequences,
//! product sets, and lattice points.

use std::cmp::Ordering;

use proptest::prelude::*;

use fieldconc::bounds::{psi, Decay, DecayModel, PNorm};
use fieldconc::frames::{framed_partition, in_frame_band, Compression, DeltaSeq, ProductSet};
use fieldconc::lattice::{
    dyadic_cmp, dyadic_project, separation_distance, split_scale, Point, Rectangle,
};

fn point(dim: usize, max: u64) -> impl Strategy<Value = Point> {
    proptest::collection::vec(0..max, dim).prop_map(|coords| Point::new(coords).unwrap())
}

fn rectangle(dim: usize, max_side: u64) -> impl Strategy<Value = Rectangle> {
    proptest::collection::vec(1..=max_side, dim).prop_map(|sides| Rectangle::new(sides).unwrap())
}

/// Nondecreasing widths with `delta_k <= 2^k`, built as a running maximum.
fn delta_seq(max_len: usize) -> impl Strategy<Value = DeltaSeq> {
    proptest::collection::vec(0u64..16, 0..=max_len).prop_map(|raw| {
        let mut widths = Vec::with_capacity(raw.len());
        let mut run = 0u64;
        for (i, v) in raw.into_iter().enumerate() {
            let cap = 1u64 << (i as u32 + 1);
            run = run.max(v.min(cap));
            widths.push(run);
        }
        DeltaSeq::new(widths).unwrap()
    })
}

fn product_set(dim: usize) -> impl Strategy<Value = ProductSet> {
    proptest::collection::vec(proptest::collection::btree_set(0u64..32, 1..5), dim..=dim).prop_map(
        |factors| {
            ProductSet::new(
                factors
                    .into_iter()
                    .map(|f| f.into_iter().collect())
                    .collect(),
            )
        },
    )
}

proptest! {
    #[test]
    fn partition_covers_every_point_once(
        rect in (1usize..=3).prop_flat_map(|d| rectangle(d, 24)),
        delta in delta_seq(5),
    ) {
        let partition = framed_partition(&rect, &delta);
        for p in rect.points() {
            let hits = partition.parts().filter(|part| part.contains(&p)).count();
            prop_assert_eq!(hits, 1, "point {} covered {} times", p, hits);
        }
        let total: u128 = partition.parts().map(|part| part.cardinality()).sum();
        prop_assert_eq!(total, rect.cardinality());
    }

    #[test]
    fn compression_round_trips_and_stays_monotone(set in (1usize..=3).prop_flat_map(product_set)) {
        let compression = Compression::new(set.clone()).unwrap();
        let domain: Vec<Point> = compression.target().points().collect();
        let mut seen = std::collections::BTreeSet::new();
        for t in &domain {
            let image = compression.forward(t).unwrap();
            prop_assert!(set.contains(&image));
            prop_assert_eq!(compression.inverse(&image).unwrap(), t.clone());
            seen.insert(image);
        }
        prop_assert_eq!(seen.len() as u128, set.cardinality());
        for pair in domain.windows(2) {
            if pair[0].le_cw(&pair[1]) {
                let a = compression.forward(&pair[0]).unwrap();
                let b = compression.forward(&pair[1]).unwrap();
                prop_assert!(a.le_cw(&b));
            }
        }
    }

    #[test]
    fn order_laws_hold_for_large_coordinates(
        a in point(2, 1 << 20),
        b in point(2, 1 << 20),
        c in point(2, 1 << 20),
    ) {
        let ab = dyadic_cmp(&a, &b).unwrap();
        prop_assert_eq!(ab.reverse(), dyadic_cmp(&b, &a).unwrap());
        prop_assert_eq!(ab == Ordering::Equal, a == b);
        if ab != Ordering::Greater && dyadic_cmp(&b, &c).unwrap() != Ordering::Greater {
            prop_assert_ne!(dyadic_cmp(&a, &c).unwrap(), Ordering::Greater);
        }
        // projections agree exactly above the split scale and differ at it
        let kappa = split_scale(&a, &b).unwrap();
        if kappa >= 0 {
            let k = kappa as u32;
            prop_assert_ne!(dyadic_project(&a, k), dyadic_project(&b, k));
            prop_assert_eq!(dyadic_project(&a, k + 1), dyadic_project(&b, k + 1));
        }
    }

    #[test]
    fn separation_respects_band_exclusion(
        t in point(2, 1 << 12),
        k in 0u32..=4,
        width_seed in 0u64..16,
    ) {
        let width = width_seed.min((1u64 << k) - 1).min(width_seed);
        let outside = t
            .coords()
            .iter()
            .all(|&x| !in_frame_band(x, k, width).unwrap());
        if outside {
            prop_assert!(
                separation_distance(&t, k).at_least(width + 1),
                "t={} k={} width={}", t, k, width
            );
        }
    }

    #[test]
    fn psi_monotone_under_wider_bands_and_larger_boxes(
        side in 2u64..=512,
        alpha in 0.25f64..4.0,
    ) {
        let model = DecayModel::new(
            Decay::Polynomial { c: 1.0, alpha },
            1.0,
            PNorm::Finite(2.0),
        )
        .unwrap();
        let rect = Rectangle::cube(2, side).unwrap();
        let zeros = DeltaSeq::zeros(rect.max_scale() as usize);
        let analytic = fieldconc::bounds::analytic_delta(&rect, &model);
        let with_bands = psi(&analytic, &rect, &model).unwrap();
        let without = psi(&zeros, &rect, &model).unwrap();
        prop_assert!(with_bands <= without + 1e-9);
        // psi >= 4 M_p from the constant term
        prop_assert!(with_bands >= 4.0 * model.m_p);
        // growing the box never shrinks psi
        let bigger = Rectangle::cube(2, side + 1).unwrap();
        let delta_big = fieldconc::bounds::analytic_delta(&bigger, &model);
        prop_assert!(psi(&zeros, &bigger, &model).unwrap() >= without - 1e-9);
        prop_assert!(delta_big.satisfies_constraint(bigger.max_scale(), 2).unwrap());
    }
}
