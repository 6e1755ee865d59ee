//! Free 3D heat and Schrödinger kernels against their Gaussian closed forms.

use dispersive_lab::angular::{closed_form_spectrum, PotentialPair};
use dispersive_lab::estimates::dispersive::ScaledGrid;
use dispersive_lab::estimates::oracle::free_kernel_oracle;
use dispersive_lab::estimates::text_table;

fn main() -> dispersive_lab::Result<()> {
    let degree: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(60);
    let spec = closed_form_spectrum(&PotentialPair::free(3)?, degree)?;
    let report = free_kernel_oracle(&spec, &[0.1, 0.25, 1.0], &ScaledGrid::default(), usize::MAX)?;
    print!("{}", text_table(std::slice::from_ref(&report)));
    println!("runtime {:.2?}", report.runtime);
    Ok(())
}
