//! Command line front end for the elliptic-potential spectrum toolkit.
//!
//! Every subcommand computes one document and writes it to stdout or to
//! `--output`, as JSON (`{meta, data}`) or CSV (header row plus one record
//! per row, complex values split into `_re`/`_im` columns). All algorithms
//! are deterministic, so identical invocations produce identical bytes.
//!
//! Exit codes: 0 on success, 1 on a usage or validation failure, 2 on a
//! numerical failure inside the solvers.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use fbzs_core::elliptic::{jacobi_functions, EllipticParameter, EllipticValues};
use fbzs_core::monodromy;
use fbzs_core::operator::PotentialSpec;
use fbzs_core::spectrum;
use fbzs_core::tridiag::{self, FamilyTag, RecurrenceFamily};
use fbzs_core::{heun, C64, Error};
use serde::Serialize;

/// Merge radius used when combining the two band-edge detectors, and the
/// agreement bound reported by `validate`.
const EDGE_AGREEMENT: f64 = 1e-6;

#[derive(Parser)]
#[command(
    name = "fbzs",
    version,
    about = "Spectrum of the Dirac operator with potential q(x) = A dn(x; m)",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the Jacobi elliptic functions over one potential period.
    Elliptic(Common),
    /// Scan the Floquet discriminant along the real or imaginary axis.
    Discriminant {
        #[command(flatten)]
        common: Common,
        /// Axis to scan: the spectrum always contains the real axis, while
        /// the imaginary axis carries the band structure.
        #[arg(long, value_enum)]
        axis: Axis,
        /// Endpoint of the scan, starting from 0. Defaults to the amplitude
        /// on the imaginary axis and to 6 on the real axis.
        #[arg(long)]
        max: Option<f64>,
    },
    /// Locate band edges and classify the band/gap structure.
    Bands(Common),
    /// Track Dirichlet eigenvalues across base points.
    Dirichlet {
        #[command(flatten)]
        common: Common,
        /// Base points the transfer matrix starts at, comma separated.
        #[arg(long = "x0", value_delimiter = ',', default_value = "0")]
        x0: Vec<f64>,
    },
    /// Sweep the Floquet exponent and emit the eigenvalue point cloud.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Number of exponent steps covering [0, 1/2].
        #[arg(long = "nu-steps", default_value_t = 24)]
        nu_steps: usize,
    },
    /// Tabulate eigenvalues of the four truncated series recurrences.
    Tridiag(Common),
    /// Run the invariant suites and report one pass/fail line per suite.
    Validate(Common),
}

/// Flags shared by every subcommand. Defaults can also be supplied through
/// FBZS_-prefixed environment variables.
#[derive(Args)]
struct Common {
    /// Potential amplitude A; must be positive.
    #[arg(long = "A", env = "FBZS_A", allow_hyphen_values = true)]
    amplitude: f64,
    /// Elliptic parameter m; must lie in [0, 1).
    #[arg(long = "m", env = "FBZS_M", allow_hyphen_values = true)]
    m: f64,
    /// Truncation size for matrix methods; must be at least 2.
    #[arg(long = "N", env = "FBZS_N", default_value_t = 64)]
    n: usize,
    /// Tolerance for root finding, eigenvalue convergence, and integration.
    #[arg(long, env = "FBZS_TOL", default_value_t = 1e-10, allow_hyphen_values = true)]
    tol: f64,
    /// Number of grid intervals per scanned segment.
    #[arg(long, env = "FBZS_GRID", default_value_t = 2000)]
    grid: usize,
    /// Output file; stdout when omitted.
    #[arg(long, env = "FBZS_OUTPUT")]
    output: Option<PathBuf>,
    /// Output format; defaults to CSV for tables and JSON for reports.
    #[arg(long, value_enum, env = "FBZS_FORMAT")]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Axis {
    Real,
    Imag,
}

/// Run metadata echoed at the top of every JSON document.
#[derive(Serialize)]
struct Meta {
    #[serde(rename = "A")]
    amplitude: f64,
    m: f64,
    #[serde(rename = "N")]
    n: usize,
    tol: f64,
    version: &'static str,
}

/// One discriminant sample along an axis.
#[derive(Serialize)]
struct DiscriminantSample {
    coordinate: f64,
    #[serde(with = "fbzs_core::complex_parts")]
    delta: C64,
}

/// One eigenvalue of one truncated recurrence family.
#[derive(Serialize)]
struct TridiagRow {
    family: FamilyTag,
    index: usize,
    #[serde(with = "fbzs_core::complex_parts")]
    lambda: C64,
}

/// One point of the exponent-sweep cloud.
#[derive(Serialize)]
struct PointRow {
    re: f64,
    im: f64,
}

/// Outcome of one invariant suite.
#[derive(Serialize)]
struct SuiteRow {
    suite: &'static str,
    status: &'static str,
    worst: f64,
    note: String,
}

impl Common {
    /// Enforce the configuration invariants and build the potential.
    fn check(&self) -> fbzs_core::Result<PotentialSpec> {
        if !(self.amplitude > 0.0) {
            return Err(Error::Domain(format!(
                "amplitude must be positive, got {}",
                self.amplitude
            )));
        }
        if !(0.0..1.0).contains(&self.m) {
            return Err(Error::Domain(format!(
                "elliptic parameter must lie in [0, 1), got {}",
                self.m
            )));
        }
        if self.n < 2 {
            return Err(Error::Domain(format!(
                "truncation size must be at least 2, got {}",
                self.n
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Domain(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.grid < 1 {
            return Err(Error::Domain("grid needs at least one interval".into()));
        }
        let m = EllipticParameter::new(self.m)?;
        PotentialSpec::new(self.amplitude, m)
    }

    fn meta(&self) -> Meta {
        Meta {
            amplitude: self.amplitude,
            m: self.m,
            n: self.n,
            tol: self.tol,
            version: env!("CARGO_PKG_VERSION"),
        }
    }

    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Domain(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn execute(command: Command) -> fbzs_core::Result<ExitCode> {
    match command {
        Command::Elliptic(common) => run_elliptic(&common),
        Command::Discriminant { common, axis, max } => run_discriminant(&common, axis, max),
        Command::Bands(common) => run_bands(&common),
        Command::Dirichlet { common, x0 } => run_dirichlet(&common, &x0),
        Command::Spectrum { common, nu_steps } => run_spectrum(&common, nu_steps),
        Command::Tridiag(common) => run_tridiag(&common),
        Command::Validate(common) => run_validate(&common),
    }
}

fn run_elliptic(common: &Common) -> fbzs_core::Result<ExitCode> {
    let spec = common.check()?;
    let period = spec.period();
    let mut rows: Vec<EllipticValues> = Vec::with_capacity(common.grid + 1);
    for k in 0..=common.grid {
        let x = period * k as f64 / common.grid as f64;
        rows.push(jacobi_functions(x, spec.parameter()));
    }
    let text = match common.format_or(Format::Csv) {
        Format::Json => json_document(&common.meta(), &rows),
        Format::Csv => csv_document(
            "x,am,sn,cn,dn",
            rows.iter()
                .map(|v| format!("{},{},{},{},{}", v.x, v.am, v.sn, v.cn, v.dn)),
        ),
    };
    write_output(common.output.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn run_discriminant(common: &Common, axis: Axis, max: Option<f64>) -> fbzs_core::Result<ExitCode> {
    let spec = common.check()?;
    let max = max.unwrap_or(match axis {
        Axis::Imag => spec.amplitude(),
        Axis::Real => 6.0,
    });
    if !(max > 0.0) {
        return Err(Error::Domain(format!(
            "scan endpoint must be positive, got {max}"
        )));
    }
    // Never integrate looser than the library default, so the documented
    // accuracy of the scan does not depend on the root-finding tolerance.
    let itol = common.tol.min(monodromy::DEFAULT_TOL);
    let mut rows = Vec::with_capacity(common.grid + 1);
    for k in 0..=common.grid {
        let t = max * k as f64 / common.grid as f64;
        let z = match axis {
            Axis::Real => C64::new(t, 0.0),
            Axis::Imag => C64::new(0.0, t),
        };
        let delta = monodromy::floquet_discriminant(&spec, z, itol)?;
        rows.push(DiscriminantSample {
            coordinate: t,
            delta,
        });
    }
    let text = match common.format_or(Format::Csv) {
        Format::Json => json_document(&common.meta(), &rows),
        Format::Csv => csv_document(
            "coordinate,delta_re,delta_im",
            rows.iter()
                .map(|r| format!("{},{},{}", r.coordinate, r.delta.re, r.delta.im)),
        ),
    };
    write_output(common.output.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn run_bands(common: &Common) -> fbzs_core::Result<ExitCode> {
    let spec = common.check()?;
    let ode = spectrum::band_edges_ode_on_grid(&spec, common.tol, common.grid)?;
    let edges = if is_integer(spec.amplitude()) {
        // The recurrence detector resolves gaps far below the integrator
        // noise floor, so it leads and the scan corroborates.
        let tri = spectrum::band_edges_tridiag(&spec, common.tol)?;
        spectrum::merge_edge_lists(&tri, &ode, EDGE_AGREEMENT)
    } else {
        ode
    };
    let report = spectrum::classify(&spec, &edges)?;
    let text = match common.format_or(Format::Json) {
        Format::Json => json_document(&common.meta(), std::slice::from_ref(&report)),
        Format::Csv => {
            let mut rows = Vec::new();
            for (i, band) in report.bands.iter().enumerate() {
                rows.push(format!(
                    "band,{},{},{},{}",
                    band.z_lo.re, band.z_lo.im, band.z_hi.re, band.z_hi.im
                ));
                if let Some(gap) = report.gaps.get(i) {
                    rows.push(format!(
                        "gap,{},{},{},{}",
                        gap.z_lo.re, gap.z_lo.im, gap.z_hi.re, gap.z_hi.im
                    ));
                }
            }
            csv_document("kind,z_lo_re,z_lo_im,z_hi_re,z_hi_im", rows.into_iter())
        }
    };
    write_output(common.output.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn run_dirichlet(common: &Common, x0: &[f64]) -> fbzs_core::Result<ExitCode> {
    let spec = common.check()?;
    if x0.is_empty() {
        return Err(Error::Domain("need at least one base point".into()));
    }
    let records = spectrum::dirichlet_scan_on_grid(&spec, x0, common.tol, common.grid)?;
    let text = match common.format_or(Format::Json) {
        Format::Json => json_document(&common.meta(), &records),
        Format::Csv => {
            let mut rows = Vec::new();
            for (i, rec) in records.iter().enumerate() {
                for (x0, z) in rec.x0_values.iter().zip(&rec.positions) {
                    rows.push(format!("{i},{x0},{},{},{}", z.re, z.im, rec.movable));
                }
            }
            csv_document("record,x0,z_re,z_im,movable", rows.into_iter())
        }
    };
    write_output(common.output.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn run_spectrum(common: &Common, nu_steps: usize) -> fbzs_core::Result<ExitCode> {
    let spec = common.check()?;
    if nu_steps < 1 {
        return Err(Error::Domain("need at least one exponent step".into()));
    }
    let nu_grid: Vec<f64> = (0..=nu_steps)
        .map(|k| 0.5 * k as f64 / nu_steps as f64)
        .collect();
    let cloud = spectrum::nu_sweep(&spec, &nu_grid, common.n)?;
    let rows: Vec<PointRow> = cloud.iter().map(|z| PointRow { re: z.re, im: z.im }).collect();
    let text = match common.format_or(Format::Csv) {
        Format::Json => json_document(&common.meta(), &rows),
        Format::Csv => csv_document(
            "re,im",
            rows.iter().map(|p| format!("{},{}", p.re, p.im)),
        ),
    };
    write_output(common.output.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn run_tridiag(common: &Common) -> fbzs_core::Result<ExitCode> {
    let spec = common.check()?;
    let mut rows = Vec::new();
    for tag in HEUN_TAGS {
        let fam = RecurrenceFamily::heun(tag, spec.amplitude(), spec.parameter())?;
        let table = tridiag::eigenvalues_truncated(&fam, common.n)?;
        for (index, lambda) in table.values.into_iter().enumerate() {
            rows.push(TridiagRow {
                family: tag,
                index,
                lambda,
            });
        }
    }
    let text = match common.format_or(Format::Csv) {
        Format::Json => json_document(&common.meta(), &rows),
        Format::Csv => csv_document(
            "family,index,lambda_re,lambda_im",
            rows.iter().map(|r| {
                format!("{:?},{},{},{}", r.family, r.index, r.lambda.re, r.lambda.im)
            }),
        ),
    };
    write_output(common.output.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

const HEUN_TAGS: [FamilyTag; 4] = [
    FamilyTag::ToMinus,
    FamilyTag::ToPlus,
    FamilyTag::TinfMinus,
    FamilyTag::TinfPlus,
];

fn is_integer(a: f64) -> bool {
    (a - a.round()).abs() < 1e-12
}

fn run_validate(common: &Common) -> fbzs_core::Result<ExitCode> {
    let spec = common.check()?;
    let a = spec.amplitude();
    let integer = is_integer(a);
    let mut rows: Vec<SuiteRow> = Vec::new();

    // Origin: the discriminant at z = 0 equals cos(pi A) for every
    // amplitude; for integer A the whole matrix collapses to (-1)^A I.
    {
        let data = monodromy::monodromy(&spec, C64::new(0.0, 0.0), 0.0, monodromy::DEFAULT_TOL)?;
        let mut worst = (data.delta - C64::from((PI * a).cos())).norm();
        let note;
        if integer {
            let sign = if (a.round() as i64) % 2 == 0 { 1.0 } else { -1.0 };
            for i in 0..2 {
                for j in 0..2 {
                    let target = if i == j { C64::from(sign) } else { C64::new(0.0, 0.0) };
                    worst = worst.max((data.matrix[(i, j)] - target).norm());
                }
            }
            note = "monodromy at the origin is the signed identity".to_string();
        } else {
            note = "discriminant at the origin matches cos(pi A)".to_string();
        }
        rows.push(suite("origin", worst <= 1e-9, worst, note));
    }

    // Symmetry: determinant drift, Schwarz reflection, evenness, and axis
    // realness on a fixed sample set inside and off the axes.
    {
        let samples = [
            C64::new(0.4, 0.0),
            C64::new(1.7, 0.0),
            C64::new(0.0, 0.35 * a),
            C64::new(0.0, 0.8 * a),
            C64::new(0.6, 0.3),
            C64::new(-1.1, 0.8),
            C64::new(0.25, -0.45),
        ];
        let report = monodromy::symmetry_report(&spec, &samples, 1e-9)?;
        rows.push(suite(
            "symmetry",
            report.violations.is_empty(),
            report.max_residual,
            format!("{} samples checked", report.samples.len()),
        ));
    }

    // Reality: eigenvalues of the four truncated series recurrences stay on
    // the real axis. The similarity certificate backs this for integer
    // amplitude only, so other amplitudes are skipped.
    if integer {
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for tag in HEUN_TAGS {
            let fam = RecurrenceFamily::heun(tag, a, spec.parameter())?;
            let list = tridiag::eigenvalues_truncated(&fam, common.n)?;
            for lam in &list.values {
                worst = worst.max(lam.im.abs());
                scale = scale.max(lam.norm());
            }
        }
        let ratio = worst / (1.0 + scale);
        rows.push(suite(
            "reality",
            ratio <= 1e-8,
            ratio,
            format!("four families at truncation {}", common.n),
        ));
    } else {
        rows.push(skip("reality", "similarity certificate needs integer amplitude"));
    }

    // Edges: the two independent band-edge detectors agree and the
    // classified structure has the expected counts.
    {
        let ode = spectrum::band_edges_ode_on_grid(&spec, common.tol, common.grid)?;
        if integer {
            let tri = spectrum::band_edges_tridiag(&spec, common.tol)?;
            let mut worst = 0.0f64;
            for e in &ode {
                let nearest = tri
                    .iter()
                    .map(|t| (t.z - e.z).norm())
                    .fold(f64::INFINITY, f64::min);
                worst = worst.max(nearest);
            }
            let merged = spectrum::merge_edge_lists(&tri, &ode, EDGE_AGREEMENT);
            let report = spectrum::classify(&spec, &merged)?;
            let n = a.round() as usize;
            let ok = worst <= EDGE_AGREEMENT
                && report.bands.len() == 2 * n
                && report.genus == 2 * n - 1;
            rows.push(suite(
                "edges",
                ok,
                worst,
                format!(
                    "{} bands and genus {} from {} merged edges",
                    report.bands.len(),
                    report.genus,
                    merged.len()
                ),
            ));
        } else {
            let report = spectrum::classify(&spec, &ode)?;
            let ok = !report.central_gap_present && !report.bands.is_empty();
            rows.push(suite(
                "edges",
                ok,
                0.0,
                format!(
                    "{} bands with a band through the origin",
                    report.bands.len()
                ),
            ));
        }
    }

    // Leading coefficient of the diagonal asymmetry: quadrature versus
    // series, positive for m > 0. The closed forms exist for integer
    // amplitude only.
    if integer {
        let (integral, series) = spectrum::c0_diagnostic(&spec)?;
        let worst = (integral - series).abs();
        let positive = common.m == 0.0 || (integral > 0.0 && series > 0.0);
        rows.push(suite(
            "c0",
            worst <= 1e-8 && positive,
            worst,
            format!("integral {integral:.6e} vs series {series:.6e}"),
        ));
    } else {
        rows.push(skip("c0", "closed forms need integer amplitude"));
    }

    // Perron: the continued fraction brackets and relocates the smallest
    // converged eigenvalues of every series recurrence.
    {
        let mut worst = 0.0f64;
        let mut all_found = true;
        for tag in HEUN_TAGS {
            let fam = RecurrenceFamily::heun(tag, a, spec.parameter())?;
            let list = tridiag::converged_eigenvalues(&fam, 5, common.tol)?;
            for lam in list.values.iter().take(list.converged_count.min(5)) {
                match heun::localize_root(&fam, lam.re, 400)? {
                    Some(root) => worst = worst.max((root - lam.re).abs()),
                    None => all_found = false,
                }
            }
        }
        rows.push(suite(
            "perron",
            all_found && worst <= 1e-6,
            worst,
            if all_found {
                "five smallest eigenvalues per family relocated".to_string()
            } else {
                "a continued-fraction bracket is missing".to_string()
            },
        ));
    }

    // Real axis: for non-integer amplitude no periodic or antiperiodic
    // point may lie on the real axis.
    if integer {
        rows.push(skip("real-axis", "real double points are expected at integer amplitude"));
    } else {
        let report = spectrum::spine_check(&spec, (0.0, 6.0))?;
        let count = report.periodic_roots.len() + report.antiperiodic_roots.len();
        rows.push(suite(
            "real-axis",
            count == 0,
            count as f64,
            format!(
                "{} Floquet roots and {} critical points on [0, 6]",
                count,
                report.critical_points.len()
            ),
        ));
    }

    let all_pass = rows.iter().all(|r| r.status != "FAIL");
    let text = match common.format_or(Format::Csv) {
        Format::Json => json_document(&common.meta(), &rows),
        Format::Csv => csv_document(
            "suite,status,worst,note",
            rows.iter()
                .map(|r| format!("{},{},{:e},{}", r.suite, r.status, r.worst, r.note)),
        ),
    };
    write_output(common.output.as_deref(), &text)?;
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn suite(name: &'static str, pass: bool, worst: f64, note: String) -> SuiteRow {
    SuiteRow {
        suite: name,
        status: if pass { "PASS" } else { "FAIL" },
        worst,
        note,
    }
}

fn skip(name: &'static str, why: &str) -> SuiteRow {
    SuiteRow {
        suite: name,
        status: "SKIP",
        worst: 0.0,
        note: why.to_string(),
    }
}

fn json_document<T: Serialize>(meta: &Meta, data: &[T]) -> String {
    #[derive(Serialize)]
    struct Document<'a, T: Serialize> {
        meta: &'a Meta,
        data: &'a [T],
    }
    let mut text = serde_json::to_string_pretty(&Document { meta, data })
        .expect("document serialization does not fail");
    text.push('\n');
    text
}

fn csv_document<I: Iterator<Item = String>>(header: &str, rows: I) -> String {
    let mut text = String::from(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row);
        text.push('\n');
    }
    text
}

fn write_output(path: Option<&Path>, text: &str) -> fbzs_core::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Error::Domain(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
