//! Compare the closed-form band-width sequence with the integer coordinate
//! descent refinement, under the exact budget check.
//!
//! ```bash
//! cargo run -p fieldconc --example delta_search
//! ```

use fieldconc::bounds::{analytic_delta, optimize_delta, psi, Decay, DecayModel, PNorm};
use fieldconc::lattice::Rectangle;

fn main() -> fieldconc::Result<()> {
    let rect = Rectangle::cube(2, 1024)?;
    let m = rect.max_scale();
    println!("box [1024]^2, top scale {m}, budget 1/(4 d^2) = 1/16\n");

    for alpha in [0.5, 1.0, 2.0] {
        let model = DecayModel::new(
            Decay::Polynomial { c: 1.0, alpha },
            1.0,
            PNorm::finite(2.0)?,
        )?;
        let analytic = analytic_delta(&rect, &model);
        let numeric = optimize_delta(&rect, &model, 64)?;
        println!("alpha = {alpha}:");
        println!(
            "  analytic delta = {:?}  (budget used {})",
            analytic.values(),
            analytic.constraint_sum(m)?
        );
        println!(
            "  numeric  delta = {:?}  (budget used {})",
            numeric.values(),
            numeric.constraint_sum(m)?
        );
        let pa = psi(&analytic, &rect, &model)?;
        let pn = psi(&numeric, &rect, &model)?;
        println!(
            "  psi: analytic {pa:.6e}  numeric {pn:.6e}  gain {:.2}%\n",
            100.0 * (1.0 - pn / pa)
        );
    }
    Ok(())
}
