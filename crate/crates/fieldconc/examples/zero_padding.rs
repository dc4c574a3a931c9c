//! Zero-padding a field outside a window keeps its dependence envelope
//! while making it non-stationary, and sums over larger boxes reduce to
//! sums over the window.
//!
//! ```bash
//! cargo run -p fieldconc --example zero_padding
//! ```

use fieldconc::bounds::PNorm;
use fieldconc::fields::FieldModel;
use fieldconc::lattice::Rectangle;
use fieldconc::oracle::{wd_coefficient, SigmaAlgebra};

fn main() -> fieldconc::Result<()> {
    let window = Rectangle::new(vec![3])?;
    let inner = FieldModel::iid(1)?;
    let padded = inner.clone().pad_zero(window.clone())?;

    let big = Rectangle::new(vec![6])?;
    let sample_padded = padded.sample(&big, 7)?;
    let sample_inner = inner.sample(&window, 7)?;
    println!("padded realization on [6]: {:?}", sample_padded.values);
    println!(
        "sum over [6] = {}, sum of the inner field over [3] = {}",
        sample_padded.sum(),
        sample_inner.sum()
    );

    let universe = padded.enumerate_universe(&big, 20)?;
    let p = PNorm::finite(2.0)?;
    let envelope = padded.wd_envelope(p);
    println!("\nper-site variance is no longer constant (non-stationary):");
    for t in universe.points().to_vec() {
        let column = universe.field_column(&t)?;
        let norm = universe.lp_norm(&column, p);
        println!("  |X_{t}|_2 = {norm}");
    }
    println!("\nyet every lag-1 coefficient still meets the inner envelope:");
    for t in universe.points().to_vec() {
        let c = wd_coefficient(&universe, &t, 1, p, SigmaAlgebra::OneSidedPast)?;
        println!("  t = {t}: {c:.3e} <= {}", envelope.m_p * envelope.phi(1));
    }
    Ok(())
}
