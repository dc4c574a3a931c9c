//! The saturation witness: a single random sign of magnitude n^-alpha
//! spread over the cube makes |N^-1 S| equal n^-alpha for every outcome, so
//! the polynomial rate N^-(alpha/d) is attained exactly (zero variance)
//! while the proven bound stays above it.
//!
//! ```bash
//! cargo run -p fieldconc --example tightness_witness
//! ```

use fieldconc::bounds::{analytic_delta, theorem_bound, PNorm};
use fieldconc::fields::FieldModel;
use fieldconc::lattice::Rectangle;
use fieldconc::mc::{estimate_lp_norm, rate_regression};

fn main() -> fieldconc::Result<()> {
    let alpha = 1.0;
    let dim = 2usize;
    println!("block field, alpha = {alpha}, d = {dim}:");
    println!(
        "{:>6} {:>8} {:>14} {:>14} {:>10} {:>14}",
        "n", "N", "|N^-1 S| exact", "estimate", "se", "bound / N"
    );
    for n in [4u64, 8, 16, 32, 64] {
        let model = FieldModel::block(dim, n, alpha)?;
        let rect = Rectangle::cube(dim, n)?;
        let big_n = rect.cardinality() as f64;
        let exact = big_n.powf(-alpha / dim as f64);
        let est = estimate_lp_norm(&model, &rect, 2.0, 64, 1)?;
        let envelope = model.wd_envelope(PNorm::finite(2.0)?);
        let delta = analytic_delta(&rect, &envelope);
        let bound = theorem_bound(&rect, &envelope, &delta)?.bound() / big_n;
        println!(
            "{:>6} {:>8} {:>14.6e} {:>14.6e} {:>10.1e} {:>14.6e}",
            n,
            rect.cardinality(),
            exact,
            est.estimate / big_n,
            est.std_error / big_n,
            bound
        );
    }

    let (fit, _) = rate_regression(
        |n| Ok((FieldModel::block(dim, n, alpha)?, Rectangle::cube(dim, n)?)),
        2.0,
        &[4, 8, 16, 32, 64],
        64,
        1,
    )?;
    println!(
        "\nlog-log slope of the normalized sums: {:.12} (exactly -alpha/d = {})",
        fit.slope,
        -alpha / dim as f64
    );
    Ok(())
}
