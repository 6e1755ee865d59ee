//! Numerical scans that probe the dispersive, heat, Strichartz and
//! counterexample statements.

pub mod counterexample;
pub mod dispersive;
pub mod fit;
pub mod oracle;
pub mod pairs;
pub mod report;
pub mod strichartz;
pub mod tnu;

pub use fit::{linear_fit, loglog_fit, LineFit};
pub use pairs::{compare_sets, enumerate_pairs, lambda_s, lambda_s_nu0, AdmissiblePair, SetRelation};
pub use report::{text_table, Check, ScanReport, Verdict};
