//! Free evolution of one angular mode through its Hankel transform.
//!
//! Prints the conserved L² norm and the decaying L^6 norm of the profile.
//! For `ν < 1/2` the evolved profile grows like `r^{ν−1/2}` at the origin, so
//! it leaves L^p for large p; try `cargo run --example hankel_evolution 0.25`.

use dispersive_lab::hankel::{HankelTransform, ModeCoefficient, RadialGrid};
use num_complex::Complex64;

fn main() -> dispersive_lab::Result<()> {
    let nu: f64 = std::env::args().nth(1).map(|s| s.parse().expect("nu")).unwrap_or(1.5);
    let grid = RadialGrid::standard(3)?;
    let f = grid.sample(|r| Complex64::new((-(r - 2.0) * (r - 2.0)).exp(), 0.0));
    let h = HankelTransform::symmetric(nu, grid.clone())?;
    let mode = ModeCoefficient::new(0, nu, f.clone())?;
    let l2 = grid.lp_norm(&f, 2.0);
    println!("nu = {nu}, |f|_2 = {l2:.12}");
    println!("{:>8} {:>16} {:>14} {:>14} {:>10}", "t", "|u|_2 - |f|_2", "|u|_6", "|u|_inf", "route");
    for t in [0.1, 0.5, 1.0, 4.0, 16.0, 64.0] {
        let u = h.evolve(&mode, t)?;
        println!(
            "{t:>8} {:>16.2e} {:>14.6e} {:>14.6e} {:>10?}",
            u.lp_norm(2.0) - l2,
            u.lp_norm(6.0),
            u.lp_norm(f64::INFINITY),
            u.route
        );
    }
    Ok(())
}
