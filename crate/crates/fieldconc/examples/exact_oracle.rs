//! Enumerate the full outcome space of a small moving-average field and
//! measure everything exactly: weak-dependence coefficients against the
//! declared envelope, the martingale-difference property of the multiscale
//! increments, and the telescoping decomposition of the centered sum.
//!
//! ```bash
//! cargo run -p fieldconc --example exact_oracle
//! ```

use fieldconc::bounds::PNorm;
use fieldconc::fields::FieldModel;
use fieldconc::lattice::{Point, Rectangle};
use fieldconc::oracle::{decomposition_error, martingale_violation, wd_coefficient, SigmaAlgebra};

fn main() -> fieldconc::Result<()> {
    let model = FieldModel::uniform_moving_average(1, 1)?;
    let window = Rectangle::new(vec![8])?;
    let universe = model.enumerate_universe(&window, 20)?;
    println!(
        "moving average (radius 1) on [8]: {} noise bits, {} outcomes",
        universe.noise_bits(),
        universe.outcomes()
    );

    let p = PNorm::finite(2.0)?;
    let envelope = model.wd_envelope(p);
    let t = Point::new(vec![4])?;
    println!(
        "\nlag-r coefficients at t = {t} (envelope scale M_p = {}):",
        envelope.m_p
    );
    println!(
        "{:>4} {:>12} {:>12} {:>12}",
        "r", "one-sided", "symmetric", "envelope"
    );
    for r in 0..6u64 {
        let one = wd_coefficient(&universe, &t, r, p, SigmaAlgebra::OneSidedPast)?;
        let sym = wd_coefficient(&universe, &t, r, p, SigmaAlgebra::SupDistance)?;
        println!(
            "{:>4} {:>12.6} {:>12.6} {:>12.6}",
            r,
            one,
            sym,
            envelope.m_p * envelope.phi(r)
        );
    }

    let set: Vec<Point> = window.points().collect();
    println!("\nmartingale property of the scale increments:");
    for k in 0..=3u32 {
        println!(
            "  scale {k}: max conditional-expectation defect {:.3e}",
            martingale_violation(&universe, &set, k)?
        );
    }
    println!(
        "\ntelescoping decomposition defect over all outcomes: {:.3e}",
        decomposition_error(&universe, &set)?
    );
    Ok(())
}
