//! Evaluate the multiscale functional and the resulting moment and
//! sub-Gaussian bounds for a polynomially decaying envelope over growing
//! cubes, alongside the closed-form rate.
//!
//! ```bash
//! cargo run -p fieldconc --example bound_report
//! ```

use fieldconc::bounds::{analytic_delta, cube_rate_bound, theorem_bound, Decay, DecayModel, PNorm};
use fieldconc::lattice::Rectangle;

fn main() -> fieldconc::Result<()> {
    let decay = Decay::Polynomial { c: 1.0, alpha: 2.0 };
    let model = DecayModel::new(decay.clone(), 1.0, PNorm::finite(2.0)?)?;
    let sg_model = DecayModel::new(decay, 1.0, PNorm::Infinity)?;

    println!("polynomial decay, c = 1, alpha = 2, d = 2, p = 2:");
    println!(
        "{:>6} {:>12} {:>14} {:>14} {:>14}",
        "n", "psi", "|S|_p bound", "SG bound", "rate bound"
    );
    for n in [8u64, 16, 32, 64, 128, 256] {
        let rect = Rectangle::cube(2, n)?;
        let delta = analytic_delta(&rect, &model);
        let lp = theorem_bound(&rect, &model, &delta)?;
        let sg = theorem_bound(&rect, &sg_model, &analytic_delta(&rect, &sg_model))?;
        let rate = cube_rate_bound(n, 2, &model)?;
        println!(
            "{:>6} {:>12.4e} {:>14.4e} {:>14.4e} {:>14.4e}",
            n,
            lp.psi,
            lp.lp_bound.unwrap(),
            sg.sg_bound.unwrap(),
            rate.bound * rect.cardinality() as f64, // un-normalized for comparison
        );
    }

    println!("\nthe explicit rate constant for d = 2, alpha = 2:");
    let rate = cube_rate_bound(16, 2, &model)?;
    println!(
        "  C = {:.4e}, regime {:?}, |N^-1 S|_2 decays as N^-{}",
        rate.constant.unwrap(),
        rate.regime,
        rate.exponent
    );
    Ok(())
}
