//! Command-line front end. Every command is deterministic given the
//! instance file and the seed.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::json;

use crate::bratteli::build_diagram;
use crate::cocycles::{amplify_for_common_prefix, FloorCocycle};
use crate::error::{Error, Result};
use crate::iet::pf_lengths;
use crate::instance::{parse_grid_axis, RauzyInstance};
use crate::maharam::{continuity_profile, MaharamMeasure, MaharamParameter, MeasureTable, PsiGrid};
use crate::skew::check_periodic_type;
use crate::verify::{
    continuity_family, run_verification, Injection, Status, CONTINUITY_COARSEST, CONTINUITY_LEVEL,
    CONTINUITY_REFINEMENTS,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "skewadic", version, about = "Periodic-type skew-products over interval exchanges")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Loop matrix, tower heights and words, positivity and lengths.
    Inspect(CommonArgs),
    /// Integer solutions of A^T phi = phi.
    Eigencocycles(CommonArgs),
    /// Aperiodicity certificate of the floor cocycle.
    Certify(CommonArgs),
    /// Closed-form measures of cylinders, one table per psi.
    Maharam(CommonArgs),
    /// Cylinder measures over dyadically refined psi grids.
    Continuity(CommonArgs),
    /// Run every check in order, stopping at the first failure.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Comma-separated psi coordinates; repeat for several values.
    #[arg(long, allow_hyphen_values = true)]
    pub psi: Vec<String>,
    /// `min:max:steps`, one per fiber coordinate.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Vec<String>,
    #[arg(long)]
    pub level: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Corrupt the instance before checking.
    #[arg(long, value_enum)]
    pub inject: Option<InjectArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InjectArg {
    PhiPlusOne,
    SwapWord,
}

impl From<InjectArg> for Injection {
    fn from(a: InjectArg) -> Self {
        match a {
            InjectArg::PhiPlusOne => Injection::PhiPlusOne,
            InjectArg::SwapWord => Injection::SwapWord,
        }
    }
}

/// What a command produced: the main document, a human-readable summary for
/// stderr, and the exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Execution {
    fn ok(stdout: String, stderr: String) -> Self {
        Self {
            code: EXIT_OK,
            stdout,
            stderr,
        }
    }
}

pub fn run<I, T>(args: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => Execution {
            code: if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK },
            stdout: if e.use_stderr() { String::new() } else { e.to_string() },
            stderr: if e.use_stderr() { e.to_string() } else { String::new() },
        },
    }
}

pub fn execute(cli: &Cli) -> Execution {
    let (common, result) = match &cli.command {
        Command::Inspect(a) => (a, cmd_inspect(a)),
        Command::Eigencocycles(a) => (a, cmd_eigencocycles(a)),
        Command::Certify(a) => (a, cmd_certify(a)),
        Command::Maharam(a) => (a, cmd_maharam(a)),
        Command::Continuity(a) => (a, cmd_continuity(a)),
        Command::Verify(a) => (&a.common, cmd_verify(a)),
    };
    let mut exec = match result {
        Ok(exec) => exec,
        Err(e) => {
            return Execution {
                code: EXIT_VALIDATION,
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
            }
        }
    };
    if let Some(path) = &common.out {
        if let Err(e) = std::fs::write(path, &exec.stdout) {
            return Execution {
                code: EXIT_VALIDATION,
                stdout: String::new(),
                stderr: format!("error: {}: {e}\n", path.display()),
            };
        }
        exec.stderr.push_str(&format!("wrote {}\n", path.display()));
        exec.stdout.clear();
    }
    exec
}

fn load(a: &CommonArgs) -> Result<RauzyInstance> {
    RauzyInstance::load(&a.instance)
}

fn require_format(a: &CommonArgs, allowed: &[Format], default: Format) -> Result<Format> {
    let f = a.format.unwrap_or(default);
    if !allowed.contains(&f) {
        let name = f.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
        return Err(Error::Instance(format!("format {name} is not available for this command")));
    }
    Ok(f)
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data");
    s.push('\n');
    s
}

fn one_based(words: &[Vec<usize>]) -> Vec<Vec<usize>> {
    words.iter().map(|w| w.iter().map(|x| x + 1).collect()).collect()
}

#[derive(Serialize)]
struct InspectReport {
    name: String,
    d: usize,
    top: Vec<usize>,
    bottom: Vec<usize>,
    #[serde(rename = "loop")]
    given_loop: String,
    repetitions: u32,
    /// Entries as JSON numbers, or strings beyond the `i64` range.
    matrix: Vec<Vec<serde_json::Value>>,
    positive: bool,
    heights: Vec<u64>,
    words: Vec<Vec<usize>>,
    pf_lengths: Vec<f64>,
    eigenvalue: f64,
}

pub fn cmd_inspect(a: &CommonArgs) -> Result<Execution> {
    require_format(a, &[Format::Json], Format::Json)?;
    let inst = load(a)?;
    let m = inst.lp.matrix();
    let lengths = pf_lengths(&m)?;
    let report = InspectReport {
        name: inst.name.clone(),
        d: inst.d(),
        top: inst.lp.start().top_one_based(),
        bottom: inst.lp.start().bottom_one_based(),
        given_loop: inst.given.steps_string(),
        repetitions: inst.repetitions,
        matrix: (0..m.rows())
            .map(|i| m.row(i).iter().map(|x| x.to_i64().map_or_else(|| json!(x.to_string()), |v| json!(v))).collect())
            .collect(),
        positive: m.is_strictly_positive(),
        heights: inst.towers.heights().to_vec(),
        words: one_based(inst.towers.words()),
        pf_lengths: lengths.lengths_f64(),
        eigenvalue: lengths.eigenvalue(),
    };
    let mut text = format!(
        "{}: d = {}, loop {} x{}, eigenvalue {:.6}\n",
        report.name, report.d, report.given_loop, report.repetitions, report.eigenvalue
    );
    for row in &report.matrix {
        let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
        text.push_str(&format!("  [{}]\n", cells.join(" ")));
    }
    text.push_str(&format!("heights {:?}\n", report.heights));
    Ok(Execution::ok(pretty(&report), text))
}

pub fn cmd_eigencocycles(a: &CommonArgs) -> Result<Execution> {
    require_format(a, &[Format::Json], Format::Json)?;
    let inst = load(a)?;
    if inst.eigen.m == 0 {
        let doc = json!({ "m": 0, "basis": [], "phi": null });
        return Ok(Execution::ok(
            pretty(&doc),
            "m = 0: no periodic-type skew-product on this loop\n".into(),
        ));
    }
    let phi = inst.require_phi()?;
    let rows: Vec<Vec<i64>> = phi.values().iter().map(|v| v.coords().to_vec()).collect();
    let doc = json!({
        "m": inst.eigen.m,
        "basis": inst.eigen.basis,
        "phi": rows,
        "phi_m": phi.m(),
        "periodic_type": check_periodic_type(&inst.lp.matrix(), phi),
        "generates": phi.generates(),
    });
    Ok(Execution::ok(
        pretty(&doc),
        format!("m = {}, cocycle uses {} coordinate(s)\n", inst.eigen.m, phi.m()),
    ))
}

pub fn cmd_certify(a: &CommonArgs) -> Result<Execution> {
    require_format(a, &[Format::Json], Format::Json)?;
    let inst = load(a)?;
    let phi = inst.require_phi()?;
    match amplify_for_common_prefix(&inst.lp, phi) {
        Ok(cert) => {
            let revalidated = match cert.revalidate(&inst.lp, phi) {
                Ok(b) => Some(b),
                Err(Error::Overflow(_)) => None,
                Err(e) => return Err(e),
            };
            let doc = json!({
                "status": if cert.verdict { "aperiodic" } else { "not certified" },
                "certificate": cert,
                "revalidated": revalidated,
            });
            let code = if cert.verdict && revalidated != Some(false) {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            };
            Ok(Execution {
                code,
                stdout: pretty(&doc),
                stderr: format!(
                    "verdict {}: exponent {}, M = {}, invariant factors {:?}\n",
                    cert.verdict, cert.exponent, cert.m_prefix, cert.invariant_factors
                ),
            })
        }
        Err(e @ Error::AmplificationCap(_)) => Ok(inconclusive(&e)),
        Err(e) => Err(e),
    }
}

fn inconclusive(e: &Error) -> Execution {
    Execution {
        code: EXIT_INCONCLUSIVE,
        stdout: pretty(&json!({ "status": "inconclusive", "reason": e.to_string() })),
        stderr: format!("inconclusive: {e}\n"),
    }
}

fn parse_psi(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::Instance(format!("psi {s:?} is not a comma-separated list of numbers")))
        })
        .collect()
}

fn psi_values(a: &CommonArgs, inst: &RauzyInstance, m: usize) -> Result<Vec<Vec<f64>>> {
    let psis = if a.psi.is_empty() {
        inst.psi.clone()
    } else {
        a.psi.iter().map(|s| parse_psi(s)).collect::<Result<_>>()?
    };
    if let Some(bad) = psis.iter().find(|p| p.len() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: bad.len(),
        });
    }
    Ok(psis)
}

pub fn cmd_maharam(a: &CommonArgs) -> Result<Execution> {
    let format = require_format(a, &[Format::Csv, Format::Json], Format::Csv)?;
    let inst = load(a)?;
    let phi = inst.require_phi()?;
    let level = a.level.unwrap_or(inst.level);
    let diagram = build_diagram(&inst.towers);
    if level > diagram.max_level() {
        return Err(Error::Instance(format!(
            "level {level} exceeds the largest tabulated level {}",
            diagram.max_level()
        )));
    }
    let f = FloorCocycle::new(&diagram, phi)?;
    let mut tables = Vec::new();
    for psi in psi_values(a, &inst, phi.m())? {
        let mu = MaharamMeasure::new(&diagram, &f, MaharamParameter::new(psi)?)?;
        tables.push((MeasureTable::build(&mu, level), mu.perron().clone()));
    }
    let stdout = match format {
        Format::Csv => {
            let mut out = String::new();
            for (i, (t, _)) in tables.iter().enumerate() {
                let csv = t.to_csv();
                // one header for the whole file
                out.push_str(if i == 0 { &csv } else { csv.split_once('\n').map_or("", |x| x.1) });
            }
            out
        }
        Format::Json => {
            let docs: Vec<_> = tables
                .iter()
                .map(|(t, p)| {
                    json!({
                        "psi": t.psi,
                        "level": t.level,
                        "fiber_bound": t.fiber_bound,
                        "r": p.r,
                        "v": p.v,
                        "rows": t.rows.iter().map(|r| json!({
                            "level": r.level,
                            "path": r.cylinder,
                            "fiber": r.fiber.coords(),
                            "measure": r.measure,
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            pretty(&docs)
        }
    };
    let stderr = tables
        .iter()
        .map(|(t, p)| format!("psi {:?}: r = {:.12}, {} rows, fiber bound {}\n", t.psi, p.r, t.rows.len(), t.fiber_bound))
        .collect();
    Ok(Execution::ok(stdout, stderr))
}

/// Dyadic refinement of a grid axis: `n` points become `2n - 1`.
fn refine_axis(axis: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * axis.len());
    for w in axis.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.extend(axis.last());
    out
}

pub fn cmd_continuity(a: &CommonArgs) -> Result<Execution> {
    let format = require_format(a, &[Format::Csv, Format::Json], Format::Csv)?;
    let inst = load(a)?;
    let phi = inst.require_phi()?;
    let m = phi.m();
    let diagram = build_diagram(&inst.towers);
    let f = FloorCocycle::new(&diagram, phi)?;
    let seed = a.seed.unwrap_or(inst.seed);
    let level = a.level.unwrap_or(CONTINUITY_LEVEL).min(diagram.max_level());
    let axes_spec = if a.grid.is_empty() {
        inst.grid.clone()
    } else {
        Some(a.grid.clone())
    };
    let grids: Vec<PsiGrid> = match axes_spec {
        Some(spec) => {
            if spec.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: spec.len(),
                });
            }
            let mut axes = spec.iter().map(|s| parse_grid_axis(s)).collect::<Result<Vec<_>>>()?;
            let mut grids = vec![PsiGrid::from_axes(&axes)];
            for _ in 0..CONTINUITY_REFINEMENTS {
                axes = axes.iter().map(|x| refine_axis(x)).collect();
                grids.push(PsiGrid::from_axes(&axes));
            }
            grids
        }
        None => (CONTINUITY_COARSEST..=CONTINUITY_COARSEST + CONTINUITY_REFINEMENTS)
            .map(|r| PsiGrid::dyadic(m, -1.0, 1.0, r))
            .collect(),
    };
    let family = continuity_family(&diagram, &f, level, seed)?;
    let profile = continuity_profile(&diagram, &f, &grids, &family)?;
    let stdout = match format {
        Format::Csv => profile.to_csv(),
        Format::Json => pretty(&json!({
            "level": level,
            "seed": seed,
            "cylinders": family.iter().map(|(p, a)| json!({"path": p.to_string(), "fiber": a.coords()})).collect::<Vec<_>>(),
            "modulus": profile.modulus.iter().map(|(h, w)| json!({"grid_step": h, "modulus": w})).collect::<Vec<_>>(),
            "monotone": profile.is_monotone(),
        })),
    };
    let mut stderr: String = profile
        .modulus
        .iter()
        .map(|(h, w)| format!("grid step {h}: modulus {w:e}\n"))
        .collect();
    let monotone = profile.is_monotone();
    if !monotone {
        stderr.push_str("modulus does not decrease under refinement\n");
    }
    Ok(Execution {
        code: if monotone { EXIT_OK } else { EXIT_CHECK_FAILED },
        stdout,
        stderr,
    })
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<Execution> {
    require_format(&a.common, &[Format::Json], Format::Json)?;
    let inst = load(&a.common)?;
    let seed = a.common.seed.unwrap_or(inst.seed);
    let report = run_verification(&inst, seed, a.inject.map(Injection::from))?;
    let stderr = report
        .checks
        .iter()
        .map(|c| {
            let status = serde_json::to_value(c.status).expect("plain enum");
            format!("{} {:<26} {}\n", c.id, c.name, status.as_str().unwrap_or_default())
        })
        .collect();
    let code = match report.status {
        Status::Fail => EXIT_CHECK_FAILED,
        Status::Inconclusive => EXIT_INCONCLUSIVE,
        _ => EXIT_OK,
    };
    let mut stdout = report.to_json();
    stdout.push('\n');
    Ok(Execution { code, stdout, stderr })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_refinement() {
        assert_eq!(refine_axis(&[-1.0, 1.0]), vec![-1.0, 0.0, 1.0]);
        assert_eq!(refine_axis(&[0.0]), vec![0.0]);
        assert_eq!(refine_axis(&[0.0, 1.0, 2.0]).len(), 5);
    }

    #[test]
    fn cap_is_inconclusive() {
        let e = inconclusive(&Error::AmplificationCap("no covering prefix".into()));
        assert_eq!(e.code, EXIT_INCONCLUSIVE);
        assert!(e.stdout.contains("\"inconclusive\""));
    }

    #[test]
    fn psi_parsing() {
        assert_eq!(parse_psi("-0.5, 1").unwrap(), vec![-0.5, 1.0]);
        assert!(parse_psi("a,1").is_err());
    }

    #[test]
    fn bad_arguments_exit_one() {
        let e = run(["skewadic", "maharam"]);
        assert_eq!(e.code, EXIT_VALIDATION);
        let e = run(["skewadic", "inspect", "--instance", "/nonexistent.json"]);
        assert_eq!(e.code, EXIT_VALIDATION);
        assert!(e.stderr.contains("nonexistent"));
    }
}
