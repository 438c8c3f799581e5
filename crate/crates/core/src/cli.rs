//! The `sst` command-line front end.
//!
//! Every subcommand reads JSON inputs, writes one JSON document (or CSV with
//! `--format csv`) to stdout or `--out`, and reports errors on stderr as a
//! JSON object. Exit codes: 0 success, 1 invalid input, 2 solver failure,
//! 3 verification failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::argmax::solve_map;
use crate::error::Error;
use crate::grad::{gradcheck, FdConfig};
use crate::relax::{expfam_marginals, relax, Regularizer, RelaxationSpec, RelaxedPoint, DEFAULT_TOL};
use crate::structures::{StructureSpec, DEFAULT_ENUM_LIMIT};
use crate::utilities::UtilitySpec;
use crate::verify::{argmax_sampler, gibbs_marginals_bruteforce, mc_frequencies, run_suite, CheckResult, Suite};

/// Environment variable overriding the enumeration guard.
pub const MAX_ENUM_VAR: &str = "SST_MAX_ENUM";

#[derive(Parser, Debug)]
#[command(name = "sst", version, about = "Stochastic argmax and softmax tricks for combinatorial structures")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact argmax of u^T x over the structure.
    Solve(SolveArgs),
    /// Perturb-and-MAP samples tabulated by vertex.
    Sample(SampleArgs),
    /// Regularized relaxation at temperature t.
    Relax(RelaxArgs),
    /// Gibbs marginals E[x] under p(x) ~ exp(u^T x / t).
    Marginals(MarginalsArgs),
    /// Analytic vs finite-difference Jacobian and symmetry check.
    Gradcheck(GradcheckArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// List every vertex of the structure.
    Enumerate(EnumerateArgs),
}

#[derive(Args, Debug)]
struct SpecArg {
    /// Structure descriptor (JSON file).
    #[arg(long)]
    spec: PathBuf,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    spec: SpecArg,
    /// Utility vector: a JSON array or {"u": [...]}.
    #[arg(long)]
    utilities: PathBuf,
}

#[derive(Args, Debug)]
struct SampleArgs {
    /// Full instance (structure, utility, seed, draws) as one JSON file.
    #[arg(long, conflicts_with_all = ["spec", "noise"])]
    instance: Option<PathBuf>,
    /// Structure descriptor (JSON file).
    #[arg(long, requires = "noise")]
    spec: Option<PathBuf>,
    /// Utility distribution: {"family": ..., "theta": [...]}.
    #[arg(long, requires = "spec")]
    noise: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    draws: Option<usize>,
}

#[derive(Args, Debug)]
struct RelaxArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[arg(long)]
    utilities: PathBuf,
    #[arg(long)]
    regularizer: Regularizer,
    #[arg(long)]
    temperature: f64,
    #[arg(long)]
    clip_range: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Args, Debug)]
struct MarginalsArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[arg(long)]
    utilities: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    temperature: f64,
    #[arg(long)]
    clip_range: Option<f64>,
    /// Sum over every vertex instead of using the structured algorithm.
    #[arg(long)]
    bruteforce: bool,
}

#[derive(Args, Debug)]
struct GradcheckArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[arg(long)]
    utilities: PathBuf,
    #[arg(long)]
    regularizer: Regularizer,
    #[arg(long, default_value_t = 1.0)]
    temperature: f64,
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite name, or "all".
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo draws per sampler (instances per pair for `limits`).
    #[arg(long)]
    draws: Option<usize>,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[command(flatten)]
    spec: SpecArg,
}

/// One sampling experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub structure: StructureSpec,
    pub utility: UtilitySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relaxation: Option<RelaxationSpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_draws")]
    pub draws: usize,
}

fn default_draws() -> usize {
    1
}

impl Instance {
    pub fn validate(&self) -> crate::Result<()> {
        self.structure.validate()?;
        self.structure.check_dim(self.utility.dim())?;
        if self.draws == 0 {
            return Err(Error::InvalidArgument("draws must be positive".into()));
        }
        if let Some(r) = &self.relaxation {
            r.validate()?;
        }
        Ok(())
    }
}

/// Failure of a CLI invocation.
#[derive(Debug)]
enum Failure {
    Input(String),
    Solver(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Solver(_) => 2,
            Failure::Verification(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Input(_) => "invalid_input",
            Failure::Solver(_) => "solver_failure",
            Failure::Verification(_) => "verification_failure",
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Solver(m) | Failure::Verification(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Solver(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path, what: &str) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {what} {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("invalid {what} {}: {e}", path.display())))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum UtilityFile {
    Bare(Vec<f64>),
    Wrapped { u: Vec<f64> },
}

fn read_utilities(path: &Path) -> CliResult<Vec<f64>> {
    let u = match read_json::<UtilityFile>(path, "utilities")? {
        UtilityFile::Bare(u) | UtilityFile::Wrapped { u } => u,
    };
    Ok(u)
}

fn enum_limit() -> CliResult<usize> {
    match std::env::var(MAX_ENUM_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("{MAX_ENUM_VAR} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_ENUM_LIMIT),
    }
}

/// Serialized output plus whether it represents a verification failure.
struct Output {
    json: serde_json::Value,
    csv: String,
    failed: Option<String>,
}

fn csv_vector(header: &str, x: &[f64]) -> String {
    let mut s = format!("index,{header}\n");
    for (i, v) in x.iter().enumerate() {
        s.push_str(&format!("{i},{}\n", serde_json::Value::from(*v)));
    }
    s
}

fn to_json<T: Serialize>(v: &T) -> CliResult<serde_json::Value> {
    serde_json::to_value(v).map_err(|e| Failure::Solver(format!("serialization failed: {e}")))
}

fn relaxed_output(p: &RelaxedPoint) -> CliResult<Output> {
    Ok(Output {
        json: to_json(p)?,
        csv: csv_vector("x", &p.x),
        failed: None,
    })
}

fn execute(command: Command) -> CliResult<Output> {
    match command {
        Command::Solve(a) => {
            let spec: StructureSpec = read_json(&a.spec.spec, "spec")?;
            let u = read_utilities(&a.utilities)?;
            let sol = solve_map(&spec, &u)?;
            let csv = format!("vertex,objective\n{},{}\n", sol.vertex, serde_json::Value::from(sol.objective));
            Ok(Output {
                json: to_json(&sol)?,
                csv,
                failed: None,
            })
        }
        Command::Sample(a) => {
            let mut instance = match (&a.instance, &a.spec, &a.noise) {
                (Some(path), _, _) => read_json::<Instance>(path, "instance")?,
                (None, Some(spec), Some(noise)) => Instance {
                    structure: read_json(spec, "spec")?,
                    utility: read_json(noise, "noise")?,
                    relaxation: None,
                    seed: 0,
                    draws: 1,
                },
                _ => return Err(Failure::Input("sample needs --instance or both --spec and --noise".into())),
            };
            if let Some(s) = a.seed {
                instance.seed = s;
            }
            if let Some(d) = a.draws {
                instance.draws = d;
            }
            instance.validate()?;
            let sampler = argmax_sampler(&instance.structure, &instance.utility)?;
            let table = mc_frequencies(sampler, instance.draws, instance.seed)?;
            let mut csv = String::from("vertex,count\n");
            for (v, c) in table.support.iter().zip(&table.counts) {
                csv.push_str(&format!("{v},{c}\n"));
            }
            let json = serde_json::json!({
                "seed": instance.seed,
                "table": to_json(&table)?,
                "mean": table.mean(),
            });
            Ok(Output { json, csv, failed: None })
        }
        Command::Relax(a) => {
            let spec: StructureSpec = read_json(&a.spec.spec, "spec")?;
            let u = read_utilities(&a.utilities)?;
            let rspec = RelaxationSpec {
                regularizer: a.regularizer,
                temperature: a.temperature,
                tol: a.tol,
                max_iter: a.max_iter,
                clip_range: a.clip_range,
            };
            relaxed_output(&relax(&spec, &rspec, &u)?)
        }
        Command::Marginals(a) => {
            let spec: StructureSpec = read_json(&a.spec.spec, "spec")?;
            let u = read_utilities(&a.utilities)?;
            if a.bruteforce {
                let x = gibbs_marginals_bruteforce(&spec, &u, a.temperature, enum_limit()?)?;
                return relaxed_output(&RelaxedPoint {
                    x,
                    dual: None,
                    residual: 0.0,
                    condition_estimate: None,
                });
            }
            let p = match a.clip_range {
                None => expfam_marginals(&spec, &u, a.temperature)?,
                Some(c) => {
                    let mut rspec = RelaxationSpec::new(Regularizer::ExpFamilyEntropy, a.temperature);
                    rspec.clip_range = Some(c);
                    relax(&spec, &rspec, &u)?
                }
            };
            relaxed_output(&p)
        }
        Command::Gradcheck(a) => {
            let spec: StructureSpec = read_json(&a.spec.spec, "spec")?;
            let u = read_utilities(&a.utilities)?;
            let rspec = RelaxationSpec::new(a.regularizer, a.temperature);
            let report = gradcheck(&spec, &rspec, &u, a.tolerance, FdConfig::new(a.epsilon)?)?;
            let csv = format!(
                "max_discrepancy,symmetry_defect,pass\n{},{},{}\n",
                report.max_discrepancy.map_or(String::new(), |d| serde_json::Value::from(d).to_string()),
                serde_json::Value::from(report.symmetry_defect),
                report.pass
            );
            let failed = (!report.pass).then(|| "gradient check failed".to_string());
            Ok(Output {
                json: to_json(&report)?,
                csv,
                failed,
            })
        }
        Command::Verify(a) => {
            let suites: Vec<Suite> = if a.suite == "all" {
                Suite::ALL.to_vec()
            } else {
                vec![a.suite.parse()?]
            };
            let mut checks: Vec<CheckResult> = Vec::new();
            for s in suites {
                checks.extend(run_suite(s, a.seed, a.draws)?);
            }
            let mut csv = String::from("suite,check,statistic,threshold,p_value,pass\n");
            for c in &checks {
                csv.push_str(&format!(
                    "{},\"{}\",{},{},{},{}\n",
                    c.suite.name(),
                    c.check,
                    serde_json::Value::from(c.statistic),
                    serde_json::Value::from(c.threshold),
                    c.p_value.map_or(String::new(), |p| serde_json::Value::from(p).to_string()),
                    c.pass
                ));
            }
            let failures = checks.iter().filter(|c| !c.pass).count();
            let failed = (failures > 0).then(|| format!("{failures} verification check(s) failed"));
            Ok(Output {
                json: to_json(&checks)?,
                csv,
                failed,
            })
        }
        Command::Enumerate(a) => {
            let spec: StructureSpec = read_json(&a.spec.spec, "spec")?;
            let vertices = spec.enumerate_vertices(enum_limit()?)?;
            let mut csv = String::from("vertex\n");
            for v in &vertices {
                csv.push_str(&format!("{v}\n"));
            }
            let json = serde_json::json!({ "count": vertices.len(), "vertices": to_json(&vertices)? });
            Ok(Output { json, csv, failed: None })
        }
    }
}

fn report_failure(err: &mut dyn Write, f: &Failure) -> i32 {
    let body = serde_json::json!({
        "error": { "kind": f.kind(), "exit_code": f.code(), "message": f.message() }
    });
    let _ = writeln!(err, "{body}");
    f.code()
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let _ = write!(err, "{e}");
            return 1;
        }
    };
    let output = match execute(cli.command) {
        Ok(o) => o,
        Err(f) => return report_failure(err, &f),
    };
    let text = match cli.format {
        Format::Json => match serde_json::to_string_pretty(&output.json) {
            Ok(s) => s + "\n",
            Err(e) => return report_failure(err, &Failure::Solver(e.to_string())),
        },
        Format::Csv => output.csv,
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(m) = written {
        return report_failure(err, &Failure::Input(m));
    }
    match output.failed {
        Some(m) => report_failure(err, &Failure::Verification(m)),
        None => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut full = vec!["sst"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn bad_arguments_exit_one() {
        assert_eq!(call(&["frobnicate"]).0, 1);
        assert_eq!(call(&["solve", "--spec", "/nonexistent.json", "--utilities", "/nope.json"]).0, 1);
        let (code, _, err) = call(&["verify", "--suite", "nope"]);
        assert_eq!(code, 1);
        assert!(err.contains("invalid_input"));
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("enumerate"));
    }
}
