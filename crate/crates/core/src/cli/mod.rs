//! Scenario-driven batch runner behind the `dispersive-lab` binary.
//!
//! A run reads one JSON scenario, builds the angular spectrum, dumps kernels on
//! the scenario grids, executes the listed scans and writes
//!
//! ```text
//! <out>/spectrum.json
//! <out>/kernels/{heat,schrodinger}_t<i>.csv
//! <out>/reports/<i>_<kind>.json  (+ .csv samples)
//! <out>/summary.txt
//! <out>/runtime.json             wall times, kept apart so reports are reproducible
//! ```

pub mod scenario;

use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use scenario::{Exponent, Grids, Invalid, PotentialSpec, ScanSpec, Scenario};

use crate::angular::{compute_spectrum, list_builtins, SpectrumSummary};
use crate::error::LabError;
use crate::estimates::counterexample::{counterexample_blowup, default_eps_list, CounterexampleResolution};
use crate::estimates::dispersive::{
    antipodal_contrast, dispersive_scan_localized, dispersive_scan_small, heat_bound_scan, mode_sum_exponent_scan, Cap,
    ScaledGrid,
};
use crate::estimates::oracle::{free_kernel_oracle, hankel_l2_scan, path_equivalence};
use crate::estimates::pairs::{compare_sets, enumerate_pairs};
use crate::estimates::strichartz::{strichartz_scan, TimeWindow};
use crate::estimates::tnu::{tnu_decay_check, TnuSetup};
use crate::estimates::{text_table, ScanReport, Verdict};
use crate::hankel::{RadialGrid, DEFAULT_R_MIN};
use crate::propagator::{full_kernel, point_pair, Flavor, KernelOptions, PairGrid, PointPair};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SCENARIO: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Why a run stopped before producing verdicts.
#[derive(Debug)]
pub enum RunError {
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    Invalid { path: PathBuf, invalid: Invalid },
    Scenario(LabError),
    Io { path: PathBuf, source: std::io::Error },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Parse { .. } | RunError::Invalid { .. } => EXIT_CONFIG,
            RunError::Scenario(_) => EXIT_SCENARIO,
            RunError::Io { .. } => EXIT_IO,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Parse {
                path,
                line,
                column,
                message,
            } => write!(f, "{}:{line}:{column}: parse error: {message}", path.display()),
            RunError::Invalid { path, invalid } => write!(f, "{}: invalid scenario: {invalid}", path.display()),
            RunError::Scenario(LabError::NotPositive { mu0, shifted }) => write!(
                f,
                "scenario error: the run requires strict positivity of P = L + (n-2)^2/4, \
                 but its smallest eigenvalue is mu_0 + (n-2)^2/4 = {shifted:.6e} (mu_0 = {mu0:.6e})"
            ),
            RunError::Scenario(e) => write!(f, "scenario error: {e}"),
            RunError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for RunError {}

impl From<LabError> for RunError {
    fn from(e: LabError) -> Self {
        match e {
            LabError::Io(source) => RunError::Io {
                path: PathBuf::new(),
                source,
            },
            other => RunError::Scenario(other),
        }
    }
}

type RunResult<T> = std::result::Result<T, RunError>;

fn io_at<T>(path: &Path, r: std::io::Result<T>) -> RunResult<T> {
    r.map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads, parses and validates a scenario file.
pub fn load_scenario(path: &Path) -> RunResult<Scenario> {
    let text = io_at(path, fs::read_to_string(path))?;
    let scenario = Scenario::from_json(&text).map_err(|e| RunError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    scenario.validate().map_err(|invalid| RunError::Invalid {
        path: path.to_path_buf(),
        invalid,
    })?;
    Ok(scenario)
}

/// Spectrum for a validated scenario.
pub fn scenario_spectrum(s: &Scenario) -> RunResult<SpectrumSummary> {
    let potential = s.potential.resolve(s.n)?;
    Ok(compute_spectrum(&potential, s.basis_size, s.mode_count())?)
}

/// Text for `dispersive-lab list-builtins`.
pub fn builtins_text() -> String {
    let width = list_builtins().iter().map(|(n, _)| n.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (name, what) in list_builtins() {
        let _ = writeln!(out, "{name:<width$}  {what}");
    }
    out
}

/// Text for `dispersive-lab spectrum`: constants and the lowest clusters.
pub fn spectrum_text(summary: &SpectrumSummary, clusters: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "potential  {}", summary.label);
    let _ = writeln!(out, "n          {}", summary.n);
    let _ = writeln!(out, "modes      {}", summary.modes.len());
    let _ = writeln!(out, "nu0        {}", summary.nu0);
    let _ = writeln!(out, "alpha      {}", summary.alpha);
    let _ = writeln!(out, "p(alpha)   {}", fmt_exponent(summary.p_alpha));
    let _ = writeln!(out, "closed     {}", summary.closed_form);
    let _ = writeln!(out);
    let _ = writeln!(out, "{:>4}  {:>18}  {:>18}  {:>5}", "c", "mu", "nu", "mult");
    for (i, c) in summary.clusters.iter().take(clusters).enumerate() {
        let _ = writeln!(out, "{i:>4}  {:>18.12}  {:>18.12}  {:>5}", c.mu, c.nu, c.len);
    }
    out
}

fn fmt_exponent(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

/// What a finished run produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub summary: SpectrumSummary,
    pub reports: Vec<ScanReport>,
    pub exit_code: i32,
}

impl RunOutcome {
    pub fn inconclusive(&self) -> bool {
        self.reports.iter().any(|r| r.verdict == Verdict::Inconclusive)
    }
}

/// Output directory: `--out`, else the scenario's `output`, else `out/<name>`.
pub fn output_dir(s: &Scenario, out: Option<&Path>) -> PathBuf {
    match (out, &s.output) {
        (Some(o), _) => o.to_path_buf(),
        (None, Some(o)) => o.clone(),
        (None, None) => PathBuf::from("out").join(&s.name),
    }
}

/// Runs a scenario file with an optional worker cap.
pub fn run_file(path: &Path, out: Option<&Path>, threads: Option<usize>) -> RunResult<RunOutcome> {
    let scenario = load_scenario(path)?;
    let dir = output_dir(&scenario, out);
    with_threads(threads, || run_scenario(&scenario, &dir))
}

/// Executes `f` inside a rayon pool of `threads` workers (global pool if `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> RunResult<T> + Send) -> RunResult<T> {
    match threads {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .map_err(|e| RunError::Scenario(LabError::Parameter(format!("thread pool: {e}"))))?;
            pool.install(f)
        }
        None => f(),
    }
}

/// Runs a validated scenario and writes the artifact tree under `dir`.
pub fn run_scenario(s: &Scenario, dir: &Path) -> RunResult<RunOutcome> {
    let clock = std::time::Instant::now();
    let summary = scenario_spectrum(s)?;
    log::info!(
        "{}: {} modes, nu0 = {:.6}, alpha = {:.6}",
        s.name,
        summary.modes.len(),
        summary.nu0,
        summary.alpha
    );
    let kernels_dir = dir.join("kernels");
    let reports_dir = dir.join("reports");
    io_at(&kernels_dir, fs::create_dir_all(&kernels_dir))?;
    io_at(&reports_dir, fs::create_dir_all(&reports_dir))?;
    write_json(&dir.join("spectrum.json"), &summary)?;

    let kernel_warnings = dump_kernels(s, &summary, &kernels_dir)?;
    let mut reports = Vec::with_capacity(s.scans.len());
    for (i, spec) in s.scans.iter().enumerate() {
        log::info!("scan {i}: {}", spec.kind());
        let report = run_scan(s, &summary, spec, i)?;
        log::info!("scan {i}: {} in {:.2?}", report.verdict.as_str(), report.runtime);
        let stem = format!("{i:02}_{}", spec.kind());
        let json_path = reports_dir.join(format!("{stem}.json"));
        io_at(&json_path, fs::write(&json_path, report.to_json()? + "\n"))?;
        let csv_path = reports_dir.join(format!("{stem}.csv"));
        let file = io_at(&csv_path, fs::File::create(&csv_path))?;
        report.write_csv(BufWriter::new(file))?;
        reports.push(report);
    }

    let exit_code = if reports.iter().all(|r| r.verdict != Verdict::Fail && r.verdict != Verdict::Unstable) {
        EXIT_OK
    } else {
        EXIT_FAILED
    };
    let text = summary_text(s, &summary, &reports, &kernel_warnings, exit_code);
    let summary_path = dir.join("summary.txt");
    io_at(&summary_path, fs::write(&summary_path, text))?;

    let timing: Vec<serde_json::Value> = reports
        .iter()
        .map(|r| serde_json::json!({"scan": r.name, "seconds": r.runtime.as_secs_f64()}))
        .collect();
    let runtime = serde_json::json!({"total_seconds": clock.elapsed().as_secs_f64(), "scans": timing});
    write_json(&dir.join("runtime.json"), &runtime)?;
    Ok(RunOutcome {
        out_dir: dir.to_path_buf(),
        summary,
        reports,
        exit_code,
    })
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> RunResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(LabError::from)?;
    io_at(path, fs::write(path, text + "\n"))
}

/// Heat and Schrödinger kernels on the scenario grid, one CSV per flavor and time.
fn dump_kernels(s: &Scenario, summary: &SpectrumSummary, dir: &Path) -> RunResult<Vec<String>> {
    let m = s.grids.angles;
    let deltas: Vec<f64> = (0..m)
        .map(|i| if m == 1 { 0.0 } else { std::f64::consts::PI * i as f64 / (m - 1) as f64 })
        .collect();
    let grid = PairGrid::geodesic(s.n, &s.grids.radii, &s.grids.radii, &deltas);
    let mut warnings = Vec::new();
    if grid.is_empty() {
        return Ok(warnings);
    }
    for (i, &t) in s.grids.times.iter().enumerate() {
        for flavor in [Flavor::Heat, Flavor::Schrodinger] {
            if flavor == Flavor::Heat && t <= 0.0 {
                continue;
            }
            let field = full_kernel(summary, t, &grid, s.cutoff, flavor, KernelOptions::default())?;
            let name = match flavor {
                Flavor::Heat => "heat",
                Flavor::Schrodinger => "schrodinger",
            };
            warnings.extend(field.warnings.iter().map(|w| format!("{name} t = {t}: {w}")));
            let path = dir.join(format!("{name}_t{i}.csv"));
            let file = io_at(&path, fs::File::create(&path))?;
            field.write_csv(BufWriter::new(file))?;
        }
    }
    Ok(warnings)
}

fn random_direction(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
    if n == 2 {
        return vec![phi.cos(), phi.sin()];
    }
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let rho = (1.0 - z * z).sqrt();
    vec![rho * phi.cos(), rho * phi.sin(), z]
}

/// Seeded sample points `(t, x, y)` for the path-equivalence scan.
pub fn random_points(n: usize, seed: u64, count: usize, times: &[f64], r_min: f64, r_max: f64) -> Vec<(f64, PointPair)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let t = times[rng.gen_range(0..times.len())];
            let r1 = rng.gen_range(r_min..=r_max);
            let r2 = rng.gen_range(r_min..=r_max);
            let x = random_direction(&mut rng, n);
            let y = random_direction(&mut rng, n);
            (t, point_pair(r1, x, r2, y))
        })
        .collect()
}

fn run_scan(s: &Scenario, summary: &SpectrumSummary, spec: &ScanSpec, index: usize) -> RunResult<ScanReport> {
    let cutoff = spec.cutoff().unwrap_or(s.cutoff);
    let radial = || RadialGrid::new(s.n, DEFAULT_R_MIN, s.grids.r_max, s.grids.r_panels);
    let report = match spec {
        ScanSpec::FreeKernelOracle { times, grid, .. } => {
            free_kernel_oracle(summary, times, &grid.clone().unwrap_or_default(), cutoff)?
        }
        ScanSpec::PathEquivalence {
            samples,
            times,
            r_min,
            r_max,
            flavor,
            ..
        } => {
            let seed = s.seed.wrapping_add(index as u64);
            path_equivalence(summary, &random_points(s.n, seed, *samples, times, *r_min, *r_max), cutoff, *flavor)?
        }
        ScanSpec::DispersiveSmall { times, zs, angles, .. } => dispersive_scan_small(summary, times, zs, angles, cutoff)?,
        ScanSpec::DispersiveLocalized { times, zs, angles, .. } => {
            dispersive_scan_localized(summary, times, zs, angles, &Cap::quadrant(s.n), cutoff)?
        }
        ScanSpec::AntipodalContrast { times, zs, .. } => antipodal_contrast(summary, times, zs, cutoff)?,
        ScanSpec::HeatBound { times, grid, small_zs, .. } => {
            let grid: ScaledGrid = grid.clone().unwrap_or_default();
            heat_bound_scan(summary, times, &grid, s.heat_c, cutoff, small_zs)?
        }
        ScanSpec::ModeSum { zs, angles, n_max, .. } => mode_sum_exponent_scan(summary, zs, angles, cutoff, *n_max)?,
        ScanSpec::HankelL2 { nus, times } => hankel_l2_scan(&radial()?, nus, times)?,
        ScanSpec::Strichartz {
            q,
            p,
            mode,
            t_min,
            t_max,
            panels_per_decade,
        } => {
            let mut window = TimeWindow::default();
            if let Some(k) = panels_per_decade {
                window.panels_per_decade = *k;
            }
            if let Some(a) = t_min {
                window.t_min = *a;
            }
            if let Some(b) = t_max {
                window.t_max = *b;
            }
            strichartz_scan(summary, *mode, q.0, p.0, &window, radial()?)?
        }
        ScanSpec::Counterexample { q, p, eps_per_decade } => counterexample_blowup(
            summary,
            q.0,
            p.0,
            &default_eps_list(*eps_per_decade),
            &CounterexampleResolution::default(),
        )?,
        ScanSpec::Tnu { nu, p, times } => tnu_decay_check(
            *nu,
            *p,
            times,
            &TnuSetup {
                n: s.n,
                r_max: s.grids.r_max,
                panels: s.grids.r_panels,
            },
        )?,
        ScanSpec::Pairs { s: list, count } => pairs_report(summary, list, *count),
    };
    Ok(report)
}

fn pairs_report(summary: &SpectrumSummary, s_values: &[f64], count: usize) -> ScanReport {
    let mut report = ScanReport::new("pairs", "enumerate_pairs", &summary.label);
    report.range("s", s_values).provenance("p_alpha", crate::serde_util::Extended(summary.p_alpha));
    report.columns = ["s", "q", "p", "scaling_defect", "in_restricted_set"].map(String::from).to_vec();
    let mut relations = Vec::new();
    for &s in s_values {
        relations.push(format!("{:?}", compare_sets(summary.n, s, summary.nu0)));
        for pair in enumerate_pairs(s, summary, count) {
            report.samples.push(vec![
                s,
                pair.q,
                pair.p,
                pair.scaling_defect,
                if pair.in_restricted_set { 1.0 } else { 0.0 },
            ]);
        }
    }
    report.provenance("relations", relations);
    report.observed = report.samples.len() as f64;
    report.mark_report_only();
    report.finish();
    report
}

fn summary_text(s: &Scenario, spec: &SpectrumSummary, reports: &[ScanReport], kernel_warnings: &[String], exit_code: i32) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario   {}", s.name);
    let _ = writeln!(out, "n          {}", spec.n);
    let _ = writeln!(out, "potential  {}", spec.label);
    let _ = writeln!(out, "modes      {}", spec.modes.len());
    let _ = writeln!(out, "cutoff     {}", s.cutoff);
    let _ = writeln!(out, "nu0        {}", spec.nu0);
    let _ = writeln!(out, "alpha      {}", spec.alpha);
    let _ = writeln!(out, "p(alpha)   {}", fmt_exponent(spec.p_alpha));
    let _ = writeln!(out);
    if reports.is_empty() {
        let _ = writeln!(out, "no scans");
    } else {
        out.push_str(&text_table(reports));
    }
    let _ = writeln!(out);
    let inconclusive: Vec<&str> = reports
        .iter()
        .filter(|r| r.verdict == Verdict::Inconclusive)
        .map(|r| r.name.as_str())
        .collect();
    if !inconclusive.is_empty() {
        let _ = writeln!(out, "WARNING inconclusive: {}", inconclusive.join(", "));
    }
    for r in reports {
        for n in &r.notes {
            let _ = writeln!(out, "note [{}] {}", r.name, n);
        }
    }
    for w in kernel_warnings {
        let _ = writeln!(out, "kernel warning: {w}");
    }
    let status = match exit_code {
        EXIT_OK if inconclusive.is_empty() => "PASS",
        EXIT_OK => "PASS (with inconclusive scans)",
        _ => "FAIL",
    };
    let _ = writeln!(out, "status     {status}");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_points_are_seeded() {
        let a = random_points(3, 7, 5, &[0.5, 1.0], 0.5, 2.0);
        let b = random_points(3, 7, 5, &[0.5, 1.0], 0.5, 2.0);
        for ((ta, pa), (tb, pb)) in a.iter().zip(&b) {
            assert_eq!(ta, tb);
            assert_eq!(pa.x, pb.x);
            assert_eq!(pa.r2, pb.r2);
        }
        let c = random_points(3, 8, 5, &[0.5, 1.0], 0.5, 2.0);
        assert_ne!(a[0].1.r1, c[0].1.r1);
        for (_, p) in &a {
            let norm: f64 = p.y.iter().map(|v| v * v).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn builtins_listed() {
        let text = builtins_text();
        assert!(text.contains("paper_3d_example"));
        assert_eq!(text.lines().count(), list_builtins().len());
    }

    #[test]
    fn positivity_message() {
        let e = RunError::Scenario(LabError::NotPositive { mu0: -0.25, shifted: 0.0 });
        assert_eq!(e.exit_code(), EXIT_SCENARIO);
        assert!(e.to_string().contains("strict positivity of P"));
    }
}
