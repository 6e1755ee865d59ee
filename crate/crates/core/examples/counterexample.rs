//! Blow-up of the Strichartz ratio for the concentrating family, in the three
//! regimes `p > p(α)`, `p = p(α)`, `p < p(α)`.

use dispersive_lab::angular::{builtin, closed_form_spectrum};
use dispersive_lab::estimates::counterexample::{counterexample_blowup, default_eps_list, CounterexampleResolution};

fn main() -> dispersive_lab::Result<()> {
    let spec = closed_form_spectrum(&builtin("constant_a:-3/16", 3)?, 4)?;
    let eps = default_eps_list(4);
    println!("alpha = {}, p(alpha) = {}", spec.alpha, spec.p_alpha);
    for (q, p) in [(16.0 / 3.0, 24.0), (8.0, 12.0), (f64::INFINITY, 6.0)] {
        let r = counterexample_blowup(&spec, q, p, &eps, &CounterexampleResolution::default())?;
        println!("(q, p) = ({q:.4}, {p}): {}", r.verdict.as_str());
        for c in &r.checks {
            println!("  {:<26} {:+.5}", c.name, c.observed);
        }
    }
    Ok(())
}
