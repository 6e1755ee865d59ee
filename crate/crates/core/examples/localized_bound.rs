//! Localized dispersive bound for `a ≡ −3/16`: patch sup of `|K|·t^{3/2}`
//! inside one cap as the mode cutoff doubles.

use dispersive_lab::angular::{builtin, closed_form_spectrum};
use dispersive_lab::estimates::dispersive::{dispersive_scan_localized, Cap};

fn main() -> dispersive_lab::Result<()> {
    let spec = closed_form_spectrum(&builtin("constant_a:-3/16", 3)?, 64)?;
    let zs = [2.0, 5.0, 10.0, 20.0];
    let angles = [0.0, 0.8, 1.6, 2.3];
    let mut k = 64;
    while k <= 2048 {
        let r = dispersive_scan_localized(&spec, &[1.0], &zs, &angles, &Cap::quadrant(3), k)?;
        let change = r.check_named("sup_cutoff_doubling_change").map(|c| c.observed).unwrap_or(f64::NAN);
        println!(
            "K = {:>5} -> {:>5}: sup {:.6e}, change {:>8.3}%  {}",
            r.provenance["cutoff"],
            r.provenance["doubled_cutoff"],
            r.observed,
            100.0 * change,
            r.verdict.as_str()
        );
        k *= 2;
    }
    Ok(())
}
