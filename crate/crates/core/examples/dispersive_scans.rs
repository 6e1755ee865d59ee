//! Dispersive-weight scans for an inverse-square potential: small-z weight
//! exponent, antipodal contrast and the mode-sum growth exponent.

use dispersive_lab::angular::{builtin, closed_form_spectrum};
use dispersive_lab::estimates::dispersive::{antipodal_contrast, dispersive_scan_small, mode_sum_exponent_scan};
use dispersive_lab::estimates::text_table;

fn main() -> dispersive_lab::Result<()> {
    let spec = closed_form_spectrum(&builtin("constant_a:-3/16", 3)?, 60)?;
    let reports = vec![
        dispersive_scan_small(&spec, &[0.5, 1.0, 2.0], &[0.001, 0.003, 0.01, 0.03], &[0.0, 1.5, 3.0], 64)?,
        antipodal_contrast(&spec, &[1.0], &[0.5, 1.0, 2.0], 64)?,
        mode_sum_exponent_scan(&spec, &[1.0, 4.0, 12.0], &[0.0, 0.7, 1.5], 1600, 8.0)?,
    ];
    print!("{}", text_table(&reports));
    for r in &reports {
        for c in &r.checks {
            println!("{:<24} {:<32} observed {:+.4e} pass {}", r.name, c.name, c.observed, c.pass);
        }
    }
    Ok(())
}
