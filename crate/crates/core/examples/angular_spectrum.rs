//! Angular eigenvalues of a built-in potential, Galerkin against closed form.
//!
//! Usage: `cargo run --example angular_spectrum [builtin] [degree]`

use dispersive_lab::angular::{builtin, compute_spectrum, Structure};

fn main() -> dispersive_lab::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "constant_a:-3/16".into());
    let degree: usize = args.next().map(|s| s.parse().expect("degree")).unwrap_or(12);
    let pot = builtin(&name, 3)?;
    let exact = compute_spectrum(&pot, degree, 49)?;
    let mut general = pot.clone();
    general.structure = Structure::General;
    let galerkin = compute_spectrum(&general, degree, 49)?;
    println!("{name}: nu0 = {:.12}, alpha = {:.12}, p(alpha) = {}", exact.nu0, exact.alpha, exact.p_alpha);
    println!("{:>3} {:>18} {:>18} {:>10} {:>5}", "c", "mu (closed)", "mu (galerkin)", "diff", "mult");
    for (i, c) in exact.clusters.iter().take(7).enumerate() {
        let g = galerkin.modes[c.start].mu;
        println!("{i:>3} {:>18.12} {:>18.12} {:>10.1e} {:>5}", c.mu, g, (g - c.mu).abs(), c.len);
    }
    if let Some(w) = galerkin.weyl_fit {
        println!("Weyl slope of log nu^2 vs log k: {w:.3} (expected 2/(n-1) = 1)");
    }
    Ok(())
}
