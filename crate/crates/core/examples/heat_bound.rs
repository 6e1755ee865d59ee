//! Gaussian upper bound `|e^{-t𝓛}(x, y)| ≤ C t^{-n/2} w e^{-|x-y|²/(ct)}` on the
//! scale-invariant grid, free and inverse-square.

use dispersive_lab::angular::{builtin, closed_form_spectrum};
use dispersive_lab::estimates::dispersive::{heat_bound_scan, ScaledGrid};

fn main() -> dispersive_lab::Result<()> {
    let times = [0.05, 0.1, 0.2, 0.5, 1.0, 2.0];
    for (name, zs) in [("free", vec![]), ("constant_a:-3/16", vec![0.001, 0.01])] {
        let spec = closed_form_spectrum(&builtin(name, 3)?, 90)?;
        let r = heat_bound_scan(&spec, &times, &ScaledGrid::default(), 8.0, 3000, &zs)?;
        println!("{name}: sup ratio {:.4} ({})", r.observed, r.verdict.as_str());
        for c in &r.checks {
            println!("  {:<28} {:.4e}", c.name, c.observed);
        }
    }
    Ok(())
}
