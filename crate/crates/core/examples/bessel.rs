//! `J_ν` and scaled `I_ν` across their evaluation regimes.
//!
//! Usage: `cargo run --example bessel [nu]`

use dispersive_lab::special::{bessel_i_eval, bessel_j_eval, bessel_j_split};
use num_complex::Complex64;

fn main() -> dispersive_lab::Result<()> {
    let nu: f64 = std::env::args().nth(1).map(|s| s.parse().expect("nu")).unwrap_or(0.25);
    println!("J_{nu}(x): automatic choice vs Schlafli split");
    for x in [0.5, 3.0, 12.0, 35.0, 80.0, 400.0] {
        let e = bessel_j_eval(nu, x)?;
        let split = bessel_j_split(nu, x)?;
        println!("  x {x:>6}  {:+.16e}  {:?}  diff {:.1e}", e.value.re, e.method, (e.value.re - split).abs());
    }
    println!("e^(-Re z) I_{nu}(z) on the Weber contour z = x(eps + i)");
    for x in [0.1, 1.0, 10.0, 100.0] {
        let z = Complex64::new(1e-3 * x, x);
        let e = bessel_i_eval(nu, z, true)?;
        println!("  x {x:>6}  {:+.12e} {:+.12e}i  {:?}", e.value.re, e.value.im, e.method);
    }
    Ok(())
}
