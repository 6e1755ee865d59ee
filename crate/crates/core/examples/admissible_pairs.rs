//! `Λ_s` against its restriction `Λ_{s,ν₀}` as `s` grows, and sample pairs.

use dispersive_lab::angular::{builtin, closed_form_spectrum};
use dispersive_lab::estimates::pairs::{compare_sets, enumerate_pairs};

fn main() -> dispersive_lab::Result<()> {
    let spec = closed_form_spectrum(&builtin("constant_a:-3/16", 3)?, 4)?;
    println!("nu0 = {}, p(alpha) = {}", spec.nu0, spec.p_alpha);
    for k in 0..=10 {
        let s = 0.125 * k as f64;
        println!("s = {s:.3}: {:?}", compare_sets(3, s, spec.nu0));
    }
    println!("pairs at s = 0:");
    for p in enumerate_pairs(0.0, &spec, 7) {
        println!("  q {:>8.4} p {:>8.4} defect {:+.1e} restricted {}", p.q, p.p, p.scaling_defect, p.in_restricted_set);
    }
    Ok(())
}
