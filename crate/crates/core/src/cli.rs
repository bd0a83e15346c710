//! `circwit` command line: build, classify, detect, scan and decompose.
//!
//! Every artifact carries a run manifest (command, parameter echo,
//! tolerances, seed, version, timestamp). Apart from the timestamp, equal
//! manifests give byte-identical output. JSON reports go to stdout; CSV
//! files start with the manifest as a `# {...}` comment line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::detect::{detect_state, expectation, product_min, DetectionReport, SeeSawConfig};
use crate::error::{Error, Result};
use crate::gellmann::{expand_local, measurement_settings_report};
use crate::linalg::{is_positive_semidefinite, sig17, ComplexMatrix, Tolerance};
use crate::scalar::Scalar;
use crate::selftest;
use crate::states::{
    self, beta_lambdas, classify_beta, is_ppt, state_from_lambdas, BetaFamilyParams,
    StateDescription, StateLambdas, TaggedState,
};
use crate::witness::{
    self, alpha_admissible_range, AlphaWitnessParams, TaggedWitness, WitnessDescription,
};

pub const TOOL_NAME: &str = "circwit";

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "circwit",
    version,
    about = "Circulant entanglement witnesses for two qudits"
)]
pub struct Cli {
    /// Eigenvalue tolerance for PSD/PPT verdicts and detection.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_eig: f64,

    /// Tolerance for equality and Hermiticity checks.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol_eq: f64,

    /// Seed for see-saw restarts and self-test samples.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Random starts for product-state minimization.
    #[arg(long, global = true, default_value_t = 64)]
    pub restarts: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Build a witness operator.
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Build a circulant state.
    #[command(subcommand)]
    State(StateCommand),
    /// Evaluate a witness on a state.
    Detect(DetectArgs),
    /// Sweep α or β and write a CSV table.
    Scan(ScanArgs),
    /// Expand a witness in local Gell-Mann products.
    Decompose(DecomposeArgs),
    /// Run the closed-form oracle checks.
    Selftest,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum WitnessCommand {
    Build(WitnessBuildArgs),
}

#[derive(Debug, Subcommand, Serialize)]
pub enum StateCommand {
    Build(StateBuildArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct WitnessParams {
    /// Local dimension.
    #[arg(long)]
    pub d: Option<usize>,

    /// W_α parameter, e.g. 0.5 or 3/8.
    #[arg(long, conflicts_with = "a")]
    pub alpha: Option<Scalar>,

    /// Family coefficients a₀,…,a_{d−1}, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub a: Option<Vec<Scalar>>,

    /// Overall scale of the family witness.
    #[arg(long, requires = "a")]
    pub mu: Option<Scalar>,

    /// Build W′_α instead of W_α.
    #[arg(long, conflicts_with = "a")]
    pub primed: bool,
}

impl WitnessParams {
    fn description(&self) -> Result<WitnessDescription> {
        let d = self.d.ok_or_else(|| invalid("--d is required"))?;
        match (&self.alpha, &self.a) {
            (Some(alpha), None) => Ok(WitnessDescription::Alpha {
                d,
                alpha: *alpha,
                primed: self.primed,
            }),
            (None, Some(a)) => Ok(WitnessDescription::Family {
                d,
                a: a.clone(),
                mu: self.mu.unwrap_or(Scalar::int(1)),
            }),
            _ => Err(invalid("give one of --alpha or --a")),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct WitnessBuildArgs {
    #[command(flatten)]
    pub params: WitnessParams,

    /// Matrix output; the report is also written next to it as `*.report.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct WitnessSource {
    #[command(flatten)]
    pub params: WitnessParams,

    /// Witness matrix file, as written by `witness build`.
    #[arg(long, conflicts_with_all = ["alpha", "a"])]
    pub witness: Option<PathBuf>,
}

impl WitnessSource {
    fn load(&self, tol: &Tolerance) -> Result<TaggedWitness> {
        match &self.witness {
            Some(path) => load_witness(path, self.params.d, tol),
            None => TaggedWitness::build(&self.params.description()?),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct StateParams {
    /// β of the one-parameter family.
    #[arg(long, conflicts_with = "lambdas")]
    pub beta: Option<Scalar>,

    /// Weights λ₁,…,λ_d of O₁,…,O_{d−1} and P⁺, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<Scalar>>,
}

impl StateParams {
    fn description(&self, d: Option<usize>) -> Result<StateDescription> {
        let d = d.ok_or_else(|| invalid("state dimension is required"))?;
        match (&self.beta, &self.lambdas) {
            (Some(beta), None) => Ok(StateDescription::Beta { d, beta: *beta }),
            (None, Some(lambdas)) => Ok(StateDescription::Lambdas {
                d,
                lambdas: lambdas.clone(),
            }),
            _ => Err(invalid("give one of --beta or --lambdas")),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct StateBuildArgs {
    #[arg(long)]
    pub d: usize,

    #[command(flatten)]
    pub params: StateParams,

    /// Matrix output; the report is also written next to it as `*.report.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DetectArgs {
    #[command(flatten)]
    pub witness: WitnessSource,

    #[command(flatten)]
    pub state: StateParams,

    /// State dimension; defaults to the witness dimension.
    #[arg(long)]
    pub state_d: Option<usize>,

    /// State matrix file, as written by `state build`.
    #[arg(long, conflicts_with_all = ["beta", "lambdas"])]
    pub state_file: Option<PathBuf>,

    /// Skip the product-state minimization.
    #[arg(long)]
    pub no_product_min: bool,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ScanArgs {
    #[arg(long)]
    pub d: usize,

    /// α grid: `start:stop:step` (inclusive) or a comma list.
    #[arg(long, conflicts_with = "beta", required_unless_present = "beta")]
    pub alpha: Option<String>,

    /// β grid: `start:stop:step` (inclusive) or a comma list.
    #[arg(long)]
    pub beta: Option<String>,

    /// Scan W′_α instead of W_α.
    #[arg(long)]
    pub primed: bool,

    /// Reference state for an α scan; defaults to 1, or (d−1)² when primed.
    #[arg(long, conflicts_with = "beta")]
    pub at_beta: Option<Scalar>,

    /// Witness for a β scan; defaults to the upper end of the certified window.
    #[arg(long, conflicts_with = "alpha")]
    pub at_alpha: Option<Scalar>,

    /// CSV output; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub witness: WitnessSource,

    /// CSV output; the full table goes to the same path with a `.json` extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn invalid(msg: &str) -> Error {
    Error::InvalidParameter(msg.to_string())
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub params: Value,
    pub tolerances: Value,
    pub seed: u64,
    pub restarts: usize,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub timestamp: String,
}

impl RunManifest {
    fn new<T: Serialize>(cli: &Cli, command: &str, params: &T) -> Result<Self> {
        Ok(RunManifest {
            command: command.to_string(),
            params: serde_json::to_value(params)?,
            tolerances: json!({ "eig": cli.tol_eig, "eq": cli.tol_eq }),
            seed: cli.seed,
            restarts: cli.restarts,
            tool: TOOL_NAME,
            tool_version: env!("CARGO_PKG_VERSION"),
            timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
        })
    }

    fn csv_comment(&self) -> Result<String> {
        Ok(format!("# {}\n", serde_json::to_string(self)?))
    }
}

fn read_json(path: &Path) -> Result<Value> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("report.json")
}

fn dimension_of(rows: usize, d: Option<usize>) -> Result<usize> {
    let root = (rows as f64).sqrt().round() as usize;
    let d = d.unwrap_or(root);
    if d * d != rows {
        return Err(Error::NotBipartite { size: rows, d });
    }
    Ok(d)
}

/// Matrix file plus an optional `"description"` that restores provenance.
fn matrix_file(
    matrix: &ComplexMatrix,
    description: Value,
    manifest: &RunManifest,
) -> Result<Value> {
    let mut v = matrix.to_json_value();
    v["description"] = description;
    v["manifest"] = serde_json::to_value(manifest)?;
    Ok(v)
}

pub fn load_witness(path: &Path, d: Option<usize>, tol: &Tolerance) -> Result<TaggedWitness> {
    let v = read_json(path)?;
    let description = v.get("description").cloned();
    let matrix = ComplexMatrix::from_json_value(v)?;
    let d = dimension_of(matrix.rows(), d)?;
    if let Some(desc) =
        description.and_then(|x| serde_json::from_value::<WitnessDescription>(x).ok())
    {
        let tagged = TaggedWitness::build(&desc)?;
        if tagged.d == d && tagged.matrix.approx_eq(&matrix, tol.eq_tol) {
            return Ok(tagged);
        }
    }
    TaggedWitness::from_matrix(matrix, d, tol)
}

pub fn load_state(path: &Path, d: Option<usize>, tol: &Tolerance) -> Result<TaggedState> {
    let v = read_json(path)?;
    let description = v.get("description").cloned();
    let matrix = ComplexMatrix::from_json_value(v)?;
    let d = dimension_of(matrix.rows(), d)?;
    if let Some(desc) = description.and_then(|x| serde_json::from_value::<StateDescription>(x).ok())
    {
        let tagged = TaggedState::from_lambdas(desc.resolve(tol)?)?;
        if tagged.d == d && tagged.matrix.approx_eq(&matrix, tol.eq_tol) {
            return Ok(tagged);
        }
    }
    TaggedState::from_matrix(matrix, d, tol)
}

fn state_description_json(s: &StateLambdas) -> Value {
    match &s.beta {
        Some(p) => json!({ "d": p.d, "beta": p.beta }),
        None => json!({ "d": s.d, "lambdas": s.lambdas }),
    }
}

fn cmd_witness_build(
    cli: &Cli,
    args: &WitnessBuildArgs,
    tol: &Tolerance,
    out: &mut dyn Write,
) -> Result<()> {
    let manifest = RunManifest::new(cli, "witness build", args)?;
    let w = TaggedWitness::build(&args.params.description()?)?;
    let coeffs = w
        .coefficients()
        .expect("built witnesses carry coefficients");
    let alpha = match &w.provenance {
        witness::WitnessProvenance::Alpha(p) => Some(p),
        _ => None,
    };
    let summary = witness::summarize(&w.matrix, &coeffs, alpha, tol)?;
    let difference = summary
        .closed_form_min_eigenvalue
        .map(|c| summary.min_eigenvalue - c);
    let report = json!({
        "manifest": manifest,
        "witness": w.describe(),
        "summary": summary,
        "closed_form_difference": difference,
    });
    if let Some(path) = &args.out {
        write_json(path, &matrix_file(&w.matrix, w.describe(), &manifest)?)?;
        write_json(&sidecar(path), &report)?;
    }
    writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    Ok(())
}

fn cmd_state_build(
    cli: &Cli,
    args: &StateBuildArgs,
    tol: &Tolerance,
    out: &mut dyn Write,
) -> Result<()> {
    let manifest = RunManifest::new(cli, "state build", args)?;
    let lambdas = args.params.description(Some(args.d))?.resolve(tol)?;
    let summary = states::summarize(&lambdas, tol)?;
    let agree = summary
        .ppt_closed_form
        .map(|c| c == summary.ppt_eigenvalue.ppt);
    let report = json!({
        "manifest": manifest,
        "state": state_description_json(&lambdas),
        "summary": summary,
        "ppt_methods_agree": agree,
    });
    if let Some(path) = &args.out {
        let rho = state_from_lambdas(&lambdas)?;
        write_json(
            path,
            &matrix_file(&rho, state_description_json(&lambdas), &manifest)?,
        )?;
        write_json(&sidecar(path), &report)?;
    }
    writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    Ok(())
}

fn see_saw_config(cli: &Cli) -> SeeSawConfig {
    SeeSawConfig {
        restarts: cli.restarts,
        seed: cli.seed,
        ..SeeSawConfig::default()
    }
}

#[derive(Serialize)]
struct DetectOutput<'a> {
    manifest: &'a RunManifest,
    witness: Value,
    state: Value,
    #[serde(flatten)]
    report: &'a DetectionReport,
}

fn cmd_detect(cli: &Cli, args: &DetectArgs, tol: &Tolerance, out: &mut dyn Write) -> Result<()> {
    let manifest = RunManifest::new(cli, "detect", args)?;
    let w = args.witness.load(tol)?;
    let state_d = args.state_d.or(Some(w.d));
    let rho = match &args.state_file {
        Some(path) => load_state(path, args.state_d, tol)?,
        None => TaggedState::from_lambdas(args.state.description(state_d)?.resolve(tol)?)?,
    };
    let cfg = see_saw_config(cli);
    let report = detect_state(&w, &rho, (!args.no_product_min).then_some(&cfg), tol)?;
    let state = match &rho.lambdas {
        Some(s) => state_description_json(s),
        None => json!({ "d": rho.d, "dense": true }),
    };
    let v = serde_json::to_value(DetectOutput {
        manifest: &manifest,
        witness: w.describe(),
        state,
        report: &report,
    })?;
    if let Some(path) = &args.out {
        write_json(path, &v)?;
    }
    writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
    Ok(())
}

/// Upper bound on grid sizes, against typos like a zero-width step.
const MAX_GRID_POINTS: usize = 100_000;

/// `start:stop:step` (inclusive, exact when the endpoints are) or `x,y,z`.
pub fn parse_grid(spec: &str) -> Result<Vec<Scalar>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let grid = match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step): (Scalar, Scalar, Scalar) =
                (start.parse()?, stop.parse()?, step.parse()?);
            if step <= Scalar::int(0) {
                return Err(Error::Parse(format!(
                    "grid step must be positive in {spec:?}"
                )));
            }
            let mut out = Vec::new();
            for k in 0.. {
                let x = start + step * Scalar::from(k as usize);
                if x > stop {
                    break;
                }
                if out.len() == MAX_GRID_POINTS {
                    return Err(Error::Parse(format!("grid {spec:?} has too many points")));
                }
                out.push(x);
            }
            out
        }
        [list] => list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Scalar>>>()?,
        _ => return Err(Error::Parse(format!("bad grid {spec:?}"))),
    };
    if grid.is_empty() {
        return Err(Error::InvalidParameter(format!("empty grid {spec:?}")));
    }
    Ok(grid)
}

struct ScanRow {
    param: Scalar,
    min_eig: f64,
    ppt: Option<bool>,
    expectation: f64,
    product_min: Option<f64>,
    label: String,
}

fn scan_alpha(
    cli: &Cli,
    args: &ScanArgs,
    grid: &[Scalar],
    tol: &Tolerance,
) -> Result<Vec<ScanRow>> {
    let d = args.d;
    let range = alpha_admissible_range(d)?;
    let m = d as i64 - 1;
    let at_beta = args.at_beta.unwrap_or(if args.primed {
        Scalar::int(m * m)
    } else {
        Scalar::int(1)
    });
    let rho = state_from_lambdas(&beta_lambdas(&BetaFamilyParams::new(d, at_beta)?))?;
    let cfg = see_saw_config(cli);
    grid.iter()
        .map(|alpha| {
            let p = AlphaWitnessParams::new(d, *alpha, args.primed)?;
            let w = witness::witness_w_alpha(&p)?;
            Ok(ScanRow {
                param: *alpha,
                min_eig: is_positive_semidefinite(&w, tol)?.min_eigenvalue,
                ppt: None,
                expectation: expectation(&w, &rho, tol)?,
                product_min: Some(product_min(&w, d, &cfg, tol)?.value),
                label: if range.contains(alpha) {
                    "certified".into()
                } else {
                    "outside certified range".into()
                },
            })
        })
        .collect()
}

fn scan_beta(args: &ScanArgs, grid: &[Scalar], tol: &Tolerance) -> Result<Vec<ScanRow>> {
    let d = args.d;
    let at_alpha = match args.at_alpha {
        Some(a) => a,
        None => alpha_admissible_range(d)?.upper,
    };
    let w = witness::witness_w_alpha(&AlphaWitnessParams::new(d, at_alpha, args.primed)?)?;
    grid.iter()
        .map(|beta| {
            let rho = state_from_lambdas(&beta_lambdas(&BetaFamilyParams::new(d, *beta)?))?;
            let verdict = is_ppt(&rho, d, tol)?;
            let class = classify_beta(d, beta)?;
            Ok(ScanRow {
                param: *beta,
                min_eig: verdict.min_eigenvalue,
                ppt: Some(verdict.ppt),
                expectation: expectation(&w, &rho, tol)?,
                product_min: None,
                label: if class.per_literature() {
                    format!("{class} (per literature)")
                } else {
                    class.to_string()
                },
            })
        })
        .collect()
}

fn cmd_scan(cli: &Cli, args: &ScanArgs, tol: &Tolerance, out: &mut dyn Write) -> Result<()> {
    let manifest = RunManifest::new(cli, "scan", args)?;
    let rows = match (&args.alpha, &args.beta) {
        (Some(g), None) => scan_alpha(cli, args, &parse_grid(g)?, tol)?,
        (None, Some(g)) => scan_beta(args, &parse_grid(g)?, tol)?,
        _ => return Err(invalid("give one of --alpha or --beta")),
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "param",
        "param_exact",
        "min_eig",
        "ppt",
        "expectation",
        "product_min",
        "label",
    ])?;
    for r in &rows {
        w.write_record([
            sig17(r.param.to_f64()),
            r.param.to_string(),
            sig17(r.min_eig),
            r.ppt.map(|b| b.to_string()).unwrap_or_default(),
            sig17(r.expectation),
            r.product_min.map(sig17).unwrap_or_default(),
            r.label.clone(),
        ])?;
    }
    let body = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    let mut text = manifest.csv_comment()?;
    text.push_str(std::str::from_utf8(&body).expect("csv output is UTF-8"));
    match &args.out {
        Some(path) => fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_decompose(
    cli: &Cli,
    args: &DecomposeArgs,
    tol: &Tolerance,
    out: &mut dyn Write,
) -> Result<()> {
    let manifest = RunManifest::new(cli, "decompose", args)?;
    let w = args.witness.load(tol)?;
    let dec = expand_local(&w.matrix, w.d, tol)?;
    let residual = dec.reconstruct().max_abs_diff(&w.matrix);
    let report = json!({
        "manifest": manifest,
        "witness": w.describe(),
        "reconstruction_residual": residual,
        "settings": measurement_settings_report(&dec),
    });
    if let Some(path) = &args.out {
        let mut csv = manifest.csv_comment()?;
        csv.push_str(&dec.to_csv()?);
        fs::write(path, csv)?;
        let mut table = dec.to_json_value();
        table["manifest"] = serde_json::to_value(&manifest)?;
        write_json(&path.with_extension("json"), &table)?;
    }
    writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    Ok(())
}

fn cmd_selftest(cli: &Cli, tol: &Tolerance, out: &mut dyn Write) -> Result<()> {
    let manifest = RunManifest::new(cli, "selftest", &json!({}))?;
    let report = selftest::run(cli.seed, tol)?;
    let v = json!({ "manifest": manifest, "report": report });
    writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
    if !report.passed {
        let failed: Vec<_> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect();
        return Err(Error::CheckFailed(failed.join(", ")));
    }
    Ok(())
}

/// Runs a parsed command, writing its primary output to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let tol = Tolerance::new(cli.tol_eig, cli.tol_eq)?;
    match &cli.command {
        Command::Witness(WitnessCommand::Build(args)) => cmd_witness_build(cli, args, &tol, out),
        Command::State(StateCommand::Build(args)) => cmd_state_build(cli, args, &tol, out),
        Command::Detect(args) => cmd_detect(cli, args, &tol, out),
        Command::Scan(args) => cmd_scan(cli, args, &tol, out),
        Command::Decompose(args) => cmd_decompose(cli, args, &tol, out),
        Command::Selftest => cmd_selftest(cli, &tol, out),
    }
}

/// `{"error": {"kind": ..., "message": ...}}`.
pub fn error_json(kind: &str, message: &str) -> String {
    json!({ "error": { "kind": kind, "message": message } }).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<String> {
        let cli = Cli::try_parse_from(std::iter::once("circwit").chain(args.iter().copied()))
            .map_err(|e| Error::Parse(e.to_string()))?;
        let mut buf = Vec::new();
        run(&cli, &mut buf)?;
        Ok(String::from_utf8(buf).unwrap())
    }

    fn json_of(args: &[&str]) -> Value {
        serde_json::from_str(&run_args(args).unwrap()).unwrap()
    }

    #[test]
    fn grids() {
        let g = parse_grid("0:5:0.25").unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!(g[20], Scalar::int(5));
        assert_eq!(
            parse_grid("1/4,3/8").unwrap(),
            vec![Scalar::ratio(1, 4), Scalar::ratio(3, 8)]
        );
        assert!(parse_grid("").is_err());
        assert!(parse_grid("2:1:0.5").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("0:1").is_err());
    }

    #[test]
    fn witness_build_reports() {
        let v = json_of(&["witness", "build", "--d", "3", "--alpha", "0.5"]);
        assert_eq!(v["summary"]["alpha_range"]["in_certified_range"], true);
        let min = v["summary"]["min_eigenvalue"].as_f64().unwrap();
        assert!((min + 1.0 / 3.0).abs() < 1e-10);
        assert!(v["closed_form_difference"].as_f64().unwrap().abs() < 1e-10);
        assert_eq!(v["manifest"]["command"], "witness build");

        let v = json_of(&["witness", "build", "--d", "3", "--alpha", "0.3"]);
        assert_eq!(v["summary"]["alpha_range"]["in_certified_range"], false);

        let err = run_args(&["witness", "build", "--d", "2", "--alpha", "0.5"]).unwrap_err();
        assert_eq!(err.kind(), "invalid_parameter");
    }

    #[test]
    fn family_witness_build() {
        let v = json_of(&["witness", "build", "--d", "3", "--a", "1,1,1"]);
        assert_eq!(v["summary"]["psd"], false);
        assert!(run_args(&["witness", "build", "--d", "3", "--a", "2,1"]).is_err());
    }

    #[test]
    fn state_build_labels() {
        let v = json_of(&["state", "build", "--d", "3", "--beta", "1.5"]);
        assert_eq!(v["summary"]["label"], "PPT-ENTANGLED");
        assert_eq!(v["ppt_methods_agree"], true);
        let v = json_of(&["state", "build", "--d", "3", "--beta", "2.5"]);
        assert_eq!(v["summary"]["label"], "SEPARABLE");
        assert_eq!(v["summary"]["label_source"], "per literature");
        assert!(run_args(&["state", "build", "--d", "4", "--beta", "20"]).is_err());
    }

    #[test]
    fn detect_reports() {
        let v = json_of(&[
            "--restarts",
            "8",
            "detect",
            "--d",
            "3",
            "--alpha",
            "1/2",
            "--beta",
            "1",
        ]);
        assert!((v["expectation"].as_f64().unwrap() + 1.0 / 21.0).abs() < 1e-12);
        assert_eq!(v["detected"], true);
        assert!(v["closed_form_difference"].as_f64().unwrap().abs() < 1e-12);
        assert_eq!(v["product_min"]["certification"], "numerical");

        let err = run_args(&[
            "detect",
            "--d",
            "3",
            "--alpha",
            "1/2",
            "--state-d",
            "4",
            "--beta",
            "1",
        ])
        .unwrap_err();
        assert_eq!(err.kind(), "invalid_parameter");
    }

    #[test]
    fn files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let wpath = dir.path().join("w.json");
        let spath = dir.path().join("s.json");
        let w = wpath.to_str().unwrap();
        let s = spath.to_str().unwrap();
        run_args(&["witness", "build", "--d", "3", "--alpha", "1/2", "--out", w]).unwrap();
        run_args(&["state", "build", "--d", "3", "--beta", "1", "--out", s]).unwrap();
        assert!(dir.path().join("w.report.json").exists());
        let v = json_of(&[
            "detect",
            "--witness",
            w,
            "--state-file",
            s,
            "--no-product-min",
        ]);
        assert!((v["closed_form"].as_f64().unwrap() + 1.0 / 21.0).abs() < 1e-12);

        // identity witness: dense provenance, no closed form
        let ipath = dir.path().join("id.json");
        fs::write(&ipath, ComplexMatrix::identity(9).to_json()).unwrap();
        let i = ipath.to_str().unwrap();
        let v = json_of(&["detect", "--witness", i, "--beta", "1", "--no-product-min"]);
        assert!((v["expectation"].as_f64().unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(v["detected"], false);
        assert!(v["closed_form"].is_null());
    }

    #[test]
    fn decompose_outputs() {
        let v = json_of(&["decompose", "--d", "3", "--alpha", "0.5"]);
        assert!(v["reconstruction_residual"].as_f64().unwrap() < 1e-12);
        assert_eq!(v["settings"]["count"], 11);

        let dir = tempfile::tempdir().unwrap();
        let ipath = dir.path().join("id.json");
        fs::write(&ipath, ComplexMatrix::identity(4).to_json()).unwrap();
        let out = dir.path().join("dec.csv");
        run_args(&[
            "decompose",
            "--witness",
            ipath.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .unwrap();
        let csv = fs::read_to_string(&out).unwrap();
        let lines: Vec<_> = csv.lines().collect();
        assert!(lines[0].starts_with("# {"));
        assert_eq!(
            &lines[1..],
            [
                "mu_label,nu_label,coefficient",
                "id,id,1.0000000000000000e0"
            ]
        );
        assert!(dir.path().join("dec.json").exists());

        let mut bad = ComplexMatrix::identity(4);
        bad[(0, 1)] = crate::linalg::C64::new(1.0, 0.0);
        fs::write(&ipath, bad.to_json()).unwrap();
        let err = run_args(&["decompose", "--witness", ipath.to_str().unwrap()]).unwrap_err();
        assert_eq!(err.kind(), "not_hermitian");
    }

    #[test]
    fn beta_scan_ppt_column() {
        let text = run_args(&["scan", "--d", "3", "--beta", "0:5:0.25"]).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("# "));
        let mut r = csv::Reader::from_reader(
            lines
                .collect::<Vec<_>>()
                .join("\n")
                .as_bytes()
                .to_vec()
                .as_slice(),
        )
        .into_records()
        .map(|r| r.unwrap())
        .collect::<Vec<_>>();
        assert_eq!(r.len(), 21);
        for row in r.drain(..) {
            let beta: f64 = row[0].parse().unwrap();
            let ppt = &row[3] == "true";
            assert_eq!(ppt, (1.0..=4.0).contains(&beta), "beta {beta}");
        }
    }

    #[test]
    fn alpha_scan_labels() {
        let text = run_args(&[
            "--restarts",
            "4",
            "scan",
            "--d",
            "3",
            "--alpha",
            "1/3,1/2,2/3,3/4",
        ])
        .unwrap();
        let labels: Vec<_> = text
            .lines()
            .skip(2)
            .map(|l| l.rsplit(',').next().unwrap().to_string())
            .collect();
        assert_eq!(
            labels,
            [
                "outside certified range",
                "certified",
                "certified",
                "outside certified range"
            ]
        );
        assert!(run_args(&["scan", "--d", "3", "--alpha", ","]).is_err());
    }
}
