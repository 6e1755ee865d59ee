//! `T_ν` operator ratios against the `|t|^{−(n/2)(1−2/p)}` decay law.

use dispersive_lab::estimates::tnu::{tnu_decay_check, tnu_ratios, TnuSetup};

fn main() -> dispersive_lab::Result<()> {
    let setup = TnuSetup::default();
    let times: Vec<f64> = (0..=10).map(|k| 2f64.powi(k)).collect();
    for p in [4.0, 8.0] {
        let r = tnu_ratios(0.25, p, &times, &setup)?;
        println!("p = {p}, target slope {}", -1.5 * (1.0 - 2.0 / p));
        for w in 0..times.len() - 1 {
            let s = (r[w + 1] / r[w]).ln() / (times[w + 1] / times[w]).ln();
            println!("  t {:>6} .. {:>6}  local slope {s:+.4}", times[w], times[w + 1]);
        }
        let rep = tnu_decay_check(0.25, p, &[1.0, 2.0, 4.0, 8.0, 16.0, 32.0], &setup)?;
        println!("  fitted on [1, 32]: {:.4} ({})", rep.observed, rep.verdict.as_str());
    }
    Ok(())
}
