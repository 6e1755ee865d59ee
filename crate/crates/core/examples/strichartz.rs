//! Strichartz norms of a Gaussian datum on admissible and inadmissible pairs.

use dispersive_lab::angular::{builtin, closed_form_spectrum};
use dispersive_lab::estimates::strichartz::{strichartz_scan, TimeWindow};
use dispersive_lab::estimates::text_table;
use dispersive_lab::hankel::RadialGrid;

fn main() -> dispersive_lab::Result<()> {
    let spec = closed_form_spectrum(&builtin("constant_a:-3/16", 3)?, 4)?;
    println!("p(alpha) = {}", spec.p_alpha);
    let window = TimeWindow {
        panels_per_decade: 12,
        ..Default::default()
    };
    let mut reports = Vec::new();
    // (∞, 2) and (4, 3) are admissible; (8, 12) sits at p = p(α).
    for (q, p) in [(f64::INFINITY, 2.0), (4.0, 3.0), (8.0, 12.0)] {
        reports.push(strichartz_scan(&spec, 0, q, p, &window, RadialGrid::standard(3)?)?);
    }
    print!("{}", text_table(&reports));
    Ok(())
}
