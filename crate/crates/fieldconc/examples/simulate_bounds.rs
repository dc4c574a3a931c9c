//! Seeded Monte Carlo estimates of |S_R|_p for each shipped field against
//! the proven bound at the analytic band widths.
//!
//! ```bash
//! cargo run -p fieldconc --example simulate_bounds
//! ```

use fieldconc::bounds::{analytic_delta, theorem_bound, PNorm};
use fieldconc::fields::FieldModel;
use fieldconc::lattice::Rectangle;
use fieldconc::mc::estimate_lp_norm;

fn main() -> fieldconc::Result<()> {
    let seed = 20260809;
    let rect = Rectangle::cube(2, 16)?;
    let models: Vec<(&str, FieldModel)> = vec![
        ("iid signs", FieldModel::iid(2)?),
        ("block (side 16, alpha 1)", FieldModel::block(2, 16, 1.0)?),
        (
            "moving average (radius 1)",
            FieldModel::uniform_moving_average(2, 1)?,
        ),
        (
            "causal linear (beta 1.5, trunc 2)",
            FieldModel::causal_linear(2, 1.5, 2)?,
        ),
    ];

    println!("[16]^2, 2048 replicates, seed {seed}");
    println!(
        "{:<34} {:>3} {:>12} {:>10} {:>12} {:>8}",
        "model", "p", "estimate", "3*se", "bound", "ratio"
    );
    for (name, model) in &models {
        for p in [2.0, 4.0] {
            let est = estimate_lp_norm(model, &rect, p, 2048, seed)?;
            let envelope = model.wd_envelope(PNorm::finite(p)?);
            let delta = analytic_delta(&rect, &envelope);
            let bound = theorem_bound(&rect, &envelope, &delta)?.bound();
            println!(
                "{:<34} {:>3} {:>12.4} {:>10.4} {:>12.4} {:>8.2}",
                name,
                p,
                est.estimate,
                3.0 * est.std_error,
                bound,
                bound / est.estimate
            );
        }
    }
    println!("\nratios above 1 everywhere: the bound is proven, not fitted.");
    Ok(())
}
