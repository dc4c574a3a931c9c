//! Walk through the multiscale order on N^2: dyadic projections, the scale
//! at which two points split, sorting a window, predecessor sets, and
//! separation distances.
//!
//! ```bash
//! cargo run -p fieldconc --example dyadic_order
//! ```

use fieldconc::lattice::{
    dyadic_cmp, dyadic_project, predecessors_at_scale, separation_distance, split_scale, Point,
    PredecessorKind, Rectangle, Separation,
};

fn main() -> fieldconc::Result<()> {
    let t = Point::new(vec![3, 5])?;
    println!("projections of {t}:");
    for k in 0..4 {
        println!("  scale {k}: {}", dyadic_project(&t, k));
    }

    println!("\nsplit scales (last scale where projections disagree):");
    for (a, b) in [([1u64, 0], [0u64, 0]), ([2, 0], [1, 1]), ([3, 5], [3, 5])] {
        let a = Point::new(a.to_vec())?;
        let b = Point::new(b.to_vec())?;
        println!("  {a} vs {b}: {}", split_scale(&a, &b)?);
    }

    // sort a 4x4 window by the order; cells of each scale stay contiguous
    let window = Rectangle::new(vec![4, 4])?;
    let mut points: Vec<Point> = window.points().collect();
    points.sort_by(|a, b| dyadic_cmp(a, b).expect("same dimension"));
    println!("\n[4]^2 sorted by the multiscale order:");
    for chunk in points.chunks(4) {
        let row: Vec<String> = chunk.iter().map(|p| p.to_string()).collect();
        println!("  {}", row.join(" "));
    }

    let t = Point::new(vec![3, 3])?;
    for k in 0..3 {
        let strict = predecessors_at_scale(&t, k, &window, PredecessorKind::Strict)?;
        let weak = predecessors_at_scale(&t, k, &window, PredecessorKind::Weak)?;
        println!(
            "\nscale {k}: {} strict / {} weak predecessors of {t} in the window",
            strict.len(),
            weak.len()
        );
        match separation_distance(&t, k) {
            Separation::Unbounded => println!("  separation: unbounded (no predecessors)"),
            Separation::Finite(d) => {
                println!("  separation: nearest predecessor at sup-distance {d}")
            }
        }
    }
    Ok(())
}
