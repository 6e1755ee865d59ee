//! Heat and Schrödinger kernels of `-Δ - (3/16)/|x|²` at a few point pairs,
//! with the discarded-tail bound of each mode sum.

use dispersive_lab::angular::{builtin, closed_form_spectrum};
use dispersive_lab::propagator::{full_kernel, Flavor, KernelOptions, PairGrid};

fn main() -> dispersive_lab::Result<()> {
    let spec = closed_form_spectrum(&builtin("constant_a:-3/16", 3)?, 20)?;
    let grid = PairGrid::geodesic(3, &[0.5, 1.0], &[1.0, 2.0], &[0.0, 1.0, std::f64::consts::PI]);
    for flavor in [Flavor::Heat, Flavor::Schrodinger] {
        let field = full_kernel(&spec, 1.0, &grid, 400, flavor, KernelOptions::default())?;
        println!("{flavor:?} t = 1, {} modes", field.cutoff);
        for s in &field.samples {
            println!(
                "  r1 {:.2} r2 {:.2} delta {:.3}  K = {:+.10e} {:+.10e}i  tail {:.1e}",
                s.r1, s.r2, s.delta, s.re, s.im, s.tail
            );
        }
        for w in &field.warnings {
            println!("  warning: {w}");
        }
    }
    Ok(())
}
