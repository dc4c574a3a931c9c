//! Render the framed set and its strips for a small box, and compress one
//! strip onto an origin rectangle.
//!
//! ```bash
//! cargo run -p fieldconc --example frame_partition
//! ```

use fieldconc::frames::{framed_partition, Compression, DeltaSeq};
use fieldconc::lattice::{Point, Rectangle};

fn main() -> fieldconc::Result<()> {
    let rect = Rectangle::new(vec![12, 12])?;
    let delta = DeltaSeq::new(vec![0, 1, 2])?;
    let partition = framed_partition(&rect, &delta);

    println!("box [12]^2 with band widths (0, 1, 2):");
    println!("  framed points: {}", partition.framed.cardinality());
    for (i, strip) in partition.strips.iter().enumerate() {
        println!("  strip along axis {i}: {} points", strip.cardinality());
    }

    // '.' framed, digit = strip index (row = second coordinate, top down)
    println!();
    for y in (0..12u64).rev() {
        let mut line = String::new();
        for x in 0..12u64 {
            let p = Point::new(vec![x, y])?;
            let mut glyph = '.';
            for (i, strip) in partition.strips.iter().enumerate() {
                if strip.contains(&p) {
                    glyph = char::from_digit(i as u32, 10).unwrap();
                }
            }
            line.push(glyph);
        }
        println!("  {line}");
    }

    let strip = &partition.strips[0];
    let compression = Compression::new(strip.clone())?;
    let target = compression.target();
    println!(
        "\nstrip 0 compresses onto the box {:?} ({} points)",
        target.sides(),
        target.cardinality()
    );
    let corner = Point::new(vec![0, 0])?;
    println!(
        "  target {corner} maps back to source {}",
        compression.forward(&corner)?
    );
    Ok(())
}
