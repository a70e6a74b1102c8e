//! Command-line front end for the `conical-harvest` binary.
//!
//! Exit codes: 0 success, 1 computation or verification failure, 2 usage
//! error. Lengths are in units of σ and the gap is Ωσ.

pub mod config;
pub mod figures;
pub mod output;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::entanglement::{
    concurrence, d_max_curve, evaluate, nu_extremum, opposite_terminal_distance, sweep, Axis, DmaxScan,
    NuObjective, Spacing, SweepSpec, MAX_SWEEP_POINTS,
};
use crate::error::Error;
use crate::geometry::{Alignment, ConeParameter, PairConfig};
use crate::quadrature::Bracket;
use crate::verify::{checks_for, run_checks, Faults, Profile, VerifyOutcome};

use config::ConfigFile;
use output::{compute_json, dmax_csv, error_json, pretty, sweep_csv, sweep_json};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const THREADS_ENV: &str = "CONICAL_HARVEST_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// A computation failed; the payload is the JSON error object.
    #[error("{}", .0["error"]["message"].as_str().unwrap_or("computation failed"))]
    Failure(Value),
    #[error("{failed} verification check(s) failed")]
    VerifyFailed { failed: usize },
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Failure(error_json(&e))
    }
}

/// Parameter errors found before any computation are usage errors.
fn usage(e: Error) -> CliError {
    match e {
        Error::InvalidParameter(m) => CliError::Usage(m),
        other => other.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Text,
}

fn parse_format(s: &str) -> Result<Format, String> {
    match s {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        "text" => Ok(Format::Text),
        other => Err(format!("unknown format '{other}' (csv, json, text)")),
    }
}

fn parse_alignment(s: &str) -> Result<Alignment, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Comma-separated alignments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentList(pub Vec<Alignment>);

fn parse_alignments(s: &str) -> Result<AlignmentList, String> {
    s.split(',').map(|a| parse_alignment(a.trim())).collect::<Result<_, _>>().map(AlignmentList)
}

fn parse_axis(s: &str) -> Result<Axis, String> {
    Axis::parse(s).map_err(|e| e.to_string())
}

fn parse_spacing(s: &str) -> Result<Spacing, String> {
    match s {
        "linear" => Ok(Spacing::Linear),
        "log" => Ok(Spacing::Log),
        other => Err(format!("unknown spacing '{other}' (linear, log)")),
    }
}

fn parse_objective(s: &str) -> Result<NuObjective, String> {
    NuObjective::parse(s).map_err(|e| e.to_string())
}

fn parse_profile(s: &str) -> Result<Profile, String> {
    Profile::parse(s).ok_or_else(|| format!("unknown profile '{s}' (default, fast)"))
}

#[derive(Debug, Parser)]
#[command(name = "conical-harvest", version, about = "Entanglement harvesting near a cosmic string")]
pub struct Cli {
    /// Defaults from a `key = value` file; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Worker threads (overrides CONICAL_HARVEST_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file (directory for `figure`); stdout when absent.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_parser = parse_format)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a single configuration (JSON with term breakdowns).
    Compute(PointArgs),
    /// Tabulate P_A, P_B, |X| and the concurrence along one axis.
    Sweep(SweepArgs),
    /// Maximum harvesting separation against the string distance.
    Dmax(DmaxArgs),
    /// Extremum of an objective over ν.
    Nuscan(NuscanArgs),
    /// Write the CSV datasets of a figure preset.
    Figure(FigureArgs),
    /// Compare production values against the oracles.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct PointArgs {
    #[arg(long, value_parser = parse_alignment)]
    pub alignment: Option<Alignment>,
    #[arg(long)]
    pub nu: Option<f64>,
    /// Distance of detector A from the string or boundary.
    #[arg(long)]
    pub l: Option<f64>,
    /// Interdetector separation.
    #[arg(long)]
    pub d: Option<f64>,
    /// Ωσ.
    #[arg(long)]
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub lo: Option<f64>,
    #[arg(long)]
    pub hi: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_parser = parse_spacing)]
    pub spacing: Option<Spacing>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, value_parser = parse_axis)]
    pub axis: Option<Axis>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Comma-separated alignments (JSON output only when more than one).
    #[arg(long, value_parser = parse_alignments)]
    pub alignments: Option<AlignmentList>,
    /// Tie the separation to the string distance, d = ratio·l.
    #[arg(long)]
    pub d_over_l: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct DmaxArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Grid of string distances; `--l` alone gives a single point.
    #[command(flatten)]
    pub grid: GridArgs,
    /// Upper end of the separation scan.
    #[arg(long)]
    pub d_hi: Option<f64>,
    /// Samples in the separation scan.
    #[arg(long)]
    pub grid_n: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Opposite sides only: the string distance beyond which a symmetric
    /// pair stops harvesting.
    #[arg(long)]
    pub terminal: bool,
}

#[derive(Debug, Clone, Args)]
pub struct NuscanArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// ν bracket and optional sample table.
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_parser = parse_objective)]
    pub objective: Option<NuObjective>,
    #[arg(long)]
    pub d_over_l: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    /// Preset name, fig3a..fig11.
    pub name: Option<String>,
    /// List the presets and exit.
    #[arg(long)]
    pub list: bool,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_parser = parse_profile)]
    pub profile: Option<Profile>,
    /// Relative perturbation applied to the production image sum.
    #[arg(long, hide = true)]
    pub fault_p1: Option<f64>,
}

/// Flag value, else config-file value.
struct Layered {
    file: ConfigFile,
}

impl Layered {
    fn get<T>(&self, flag: Option<T>, key: &str, parse: fn(&str) -> Result<T, String>) -> Result<Option<T>, CliError> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.file.get_with(key, parse),
        }
    }

    fn num<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.file.get(key),
        }
    }

    fn need<T>(&self, value: Option<T>, key: &str) -> Result<T, CliError> {
        value.ok_or_else(|| CliError::Usage(format!("missing --{key} (or `{key}` in the config file)")))
    }
}

fn resolve_threads(flag: Option<usize>, file: &ConfigFile) -> Result<Option<usize>, CliError> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse::<usize>()
                    .map_err(|e| CliError::Usage(format!("{THREADS_ENV}={v}: {e}")))?,
            ),
            Err(_) => file.get::<usize>("threads")?,
        },
    };
    if n == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    Ok(n)
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

/// Checks every point of a sweep before any computation starts.
pub(crate) fn validate_sweep(spec: &SweepSpec) -> Result<(), CliError> {
    if spec.alignments.is_empty() {
        return Err(CliError::Usage("no alignment given".into()));
    }
    if let Some(r) = spec.d_over_l {
        if !(r.is_finite() && r > 0.0) {
            return Err(CliError::Usage(format!("--d-over-l {r} must be positive")));
        }
    }
    for x in spec.grid().map_err(usage)? {
        let (mut l, mut d, mut gap, mut nu) = (spec.l, spec.d, spec.gap, spec.nu);
        match spec.axis {
            Axis::L => l = x,
            Axis::D => d = x,
            Axis::Nu => nu = x,
            Axis::Gap => gap = x,
        }
        if let Some(r) = spec.d_over_l {
            d = r * l;
        }
        ConeParameter::new(nu).map_err(usage)?;
        for &a in &spec.alignments {
            PairConfig::new(a, l, d, gap)
                .map_err(|e| CliError::Usage(format!("{} at {}={x}: {e}", a, spec.axis.name())))?;
        }
    }
    Ok(())
}

struct Context {
    layered: Layered,
    out: Option<PathBuf>,
    format: Option<Format>,
}

impl Context {
    fn format(&self, default: Format, allowed: &[Format]) -> Result<Format, CliError> {
        let f = match self.format {
            Some(f) => f,
            None => self.layered.get(None, "format", parse_format)?.unwrap_or(default),
        };
        if !allowed.contains(&f) {
            return Err(CliError::Usage(format!("--format {f:?} is not available for this command").to_lowercase()));
        }
        Ok(f)
    }

    fn out(&self) -> Result<Option<PathBuf>, CliError> {
        match &self.out {
            Some(p) => Ok(Some(p.clone())),
            None => Ok(self.layered.file.raw("out").map(PathBuf::from)),
        }
    }

    fn emit(&self, text: &str) -> Result<(), CliError> {
        write_output(self.out()?.as_deref(), text)
    }

    fn alignment(&self, p: &PointArgs) -> Result<Alignment, CliError> {
        let a = self.layered.get(p.alignment, "alignment", parse_alignment)?;
        self.layered.need(a, "alignment")
    }

    /// ν when the alignment needs it; otherwise the flat value, still
    /// validated if one was given.
    fn nu(&self, p: &PointArgs, needed: bool) -> Result<f64, CliError> {
        let nu = self.layered.num(p.nu, "nu")?;
        let nu = if needed { self.layered.need(nu, "nu")? } else { nu.unwrap_or(1.0) };
        ConeParameter::new(nu).map_err(usage)?;
        Ok(nu)
    }

    fn value(&self, flag: Option<f64>, key: &str, needed: bool, fallback: f64) -> Result<f64, CliError> {
        let v = self.layered.num(flag, key)?;
        if needed {
            self.layered.need(v, key)
        } else {
            Ok(v.unwrap_or(fallback))
        }
    }

    fn grid(&self, g: &GridArgs, n_default: Option<usize>) -> Result<(Option<f64>, Option<f64>, Option<usize>, Spacing), CliError> {
        let lo = self.layered.num(g.lo, "lo")?;
        let hi = self.layered.num(g.hi, "hi")?;
        let n = self.layered.num(g.n, "n")?.or(n_default);
        if let Some(n) = n {
            if !(2..=MAX_SWEEP_POINTS).contains(&n) {
                return Err(CliError::Usage(format!("--n {n} must be in [2, {MAX_SWEEP_POINTS}]")));
            }
        }
        let spacing = self.layered.get(g.spacing, "spacing", parse_spacing)?.unwrap_or(Spacing::Linear);
        Ok((lo, hi, n, spacing))
    }
}

fn run_compute(ctx: &Context, p: &PointArgs) -> Result<(), CliError> {
    ctx.format(Format::Json, &[Format::Json])?;
    let alignment = ctx.alignment(p)?;
    let nu = ctx.nu(p, alignment.uses_cone())?;
    let l = ctx.value(p.l, "l", alignment != Alignment::Flat, 0.0)?;
    let d = ctx.value(p.d, "d", true, 0.0)?;
    let gap = ctx.value(p.gap, "gap", true, 0.0)?;
    let config = PairConfig::new(alignment, l, d, gap).map_err(usage)?;
    let nu = ConeParameter::new(nu).map_err(usage)?;
    let eval = evaluate(&config, nu)?;
    ctx.emit(&pretty(&compute_json(&config, nu, &eval)))
}

fn sweep_spec(ctx: &Context, a: &SweepArgs) -> Result<SweepSpec, CliError> {
    let axis = ctx.layered.get(a.axis, "axis", parse_axis)?;
    let axis = ctx.layered.need(axis, "axis")?;
    let alignments = match ctx.layered.get(a.alignments.clone(), "alignments", parse_alignments)? {
        Some(AlignmentList(list)) => list,
        None => vec![ctx.alignment(&a.point)?],
    };
    let d_over_l = ctx.layered.num(a.d_over_l, "d-over-l")?;
    let (lo, hi, n, spacing) = ctx.grid(&a.grid, Some(101))?;
    let any_cone = alignments.iter().any(|x| x.uses_cone());
    let any_placed = alignments.iter().any(|&x| x != Alignment::Flat);
    let spec = SweepSpec {
        axis,
        lo: ctx.layered.need(lo, "lo")?,
        hi: ctx.layered.need(hi, "hi")?,
        n: n.unwrap_or(101),
        spacing,
        nu: ctx.nu(&a.point, any_cone && axis != Axis::Nu)?,
        l: ctx.value(a.point.l, "l", any_placed && axis != Axis::L, 0.0)?,
        d: ctx.value(a.point.d, "d", axis != Axis::D && d_over_l.is_none(), 0.0)?,
        gap: ctx.value(a.point.gap, "gap", axis != Axis::Gap, 0.0)?,
        alignments,
        d_over_l,
    };
    validate_sweep(&spec)?;
    Ok(spec)
}

fn sweep_meta(spec: &SweepSpec) -> Value {
    json!({
        "axis": spec.axis,
        "lo": spec.lo,
        "hi": spec.hi,
        "n": spec.n,
        "spacing": spec.spacing,
        "nu": spec.nu,
        "l": spec.l,
        "d": spec.d,
        "gap": spec.gap,
        "d_over_l": spec.d_over_l,
    })
}

fn run_sweep(ctx: &Context, a: &SweepArgs) -> Result<(), CliError> {
    let format = ctx.format(Format::Csv, &[Format::Csv, Format::Json])?;
    let spec = sweep_spec(ctx, a)?;
    if format == Format::Csv && spec.alignments.len() != 1 {
        return Err(CliError::Usage("CSV output takes a single alignment; use --format json".into()));
    }
    let table = sweep(&spec)?;
    if let Some(row) = table.rows.iter().find(|r| r.error.is_some() && !r.diverged) {
        let kind = row.error.clone().unwrap_or_default();
        return Err(CliError::Failure(json!({ "error": {
            "kind": kind,
            "message": format!("{} failed at {} = {}", row.alignment, spec.axis.name(), row.param),
        }})));
    }
    match format {
        Format::Csv => ctx.emit(&sweep_csv(&table)),
        _ => ctx.emit(&pretty(&sweep_json(&table, sweep_meta(&spec)))),
    }
}

fn run_dmax(ctx: &Context, a: &DmaxArgs) -> Result<(), CliError> {
    let alignment = ctx.alignment(&a.point)?;
    let nu = ConeParameter::new(ctx.nu(&a.point, alignment.uses_cone())?).map_err(usage)?;
    let gap = ctx.value(a.point.gap, "gap", true, 0.0)?;
    let defaults = DmaxScan::default();
    let scan = DmaxScan {
        d_hi: ctx.value(a.d_hi, "d-hi", false, defaults.d_hi)?,
        grid_n: ctx.layered.num(a.grid_n, "grid-n")?.unwrap_or(defaults.grid_n),
        tol: ctx.value(a.tol, "tol", false, defaults.tol)?,
    };
    if !(scan.d_hi > 0.0) || scan.grid_n < 2 || !(scan.tol > 0.0) {
        return Err(CliError::Usage("--d-hi and --tol must be positive and --grid-n at least 2".into()));
    }
    let (lo, hi, n, spacing) = ctx.grid(&a.grid, None)?;
    if a.terminal {
        if alignment != Alignment::OrthogonalOppositeSides {
            return Err(CliError::Usage("--terminal applies to the opposite alignment".into()));
        }
        ctx.format(Format::Json, &[Format::Json])?;
        let l_hi = hi.unwrap_or(5.0);
        let r = opposite_terminal_distance(nu, gap, l_hi, scan.grid_n, scan.tol)?;
        let doc = json!({
            "version": VERSION,
            "input": { "nu": nu.value(), "gap": gap, "l_hi": l_hi, "grid_n": scan.grid_n, "tol": scan.tol },
            "l0": r.d_max,
            "capped": r.capped,
        });
        return ctx.emit(&pretty(&doc));
    }
    let format = ctx.format(Format::Csv, &[Format::Csv, Format::Json])?;
    let ls = match (lo, hi) {
        (Some(lo), Some(hi)) => SweepSpec {
            axis: Axis::L,
            lo,
            hi,
            n: n.unwrap_or(51),
            spacing,
            alignments: vec![alignment],
            nu: nu.value(),
            l: 0.0,
            d: 1.0,
            gap,
            d_over_l: None,
        }
        .grid()
        .map_err(usage)?,
        (None, None) => {
            let l = ctx.value(a.point.l, "l", alignment != Alignment::Flat, 0.0)?;
            vec![l]
        }
        _ => return Err(CliError::Usage("--lo and --hi must be given together".into())),
    };
    for &l in &ls {
        PairConfig::new(alignment, l, (2.0 * l).max(scan.d_hi), gap).map_err(usage)?;
        if alignment == Alignment::OrthogonalOppositeSides && 2.0 * l >= scan.d_hi {
            return Err(CliError::Usage(format!("opposite alignment needs 2l < --d-hi (l = {l})")));
        }
    }
    let results = d_max_curve(alignment, nu, gap, &ls, &scan)
        .into_iter()
        .collect::<crate::Result<Vec<_>>>()?;
    match format {
        Format::Csv => ctx.emit(&dmax_csv(&ls, &results)),
        _ => {
            let rows: Vec<Value> = ls
                .iter()
                .zip(&results)
                .map(|(l, r)| json!({ "l": l, "d_max": r.d_max, "capped": r.capped, "skipped": r.skipped }))
                .collect();
            let doc = json!({
                "version": VERSION,
                "input": { "alignment": alignment, "nu": nu.value(), "gap": gap, "scan": scan },
                "rows": rows,
            });
            ctx.emit(&pretty(&doc))
        }
    }
}

fn run_nuscan(ctx: &Context, a: &NuscanArgs) -> Result<(), CliError> {
    let format = ctx.format(Format::Json, &[Format::Csv, Format::Json])?;
    let alignment = ctx.alignment(&a.point)?;
    if !alignment.uses_cone() {
        return Err(CliError::Usage(format!("nuscan needs a string alignment, not {alignment}")));
    }
    let objective = ctx.layered.get(a.objective, "objective", parse_objective)?;
    let objective = objective.unwrap_or(NuObjective::CorrelationMinusResponse);
    let d_over_l = ctx.layered.num(a.d_over_l, "d-over-l")?;
    let l = ctx.value(a.point.l, "l", true, 0.0)?;
    let d = match d_over_l {
        Some(r) => r * l,
        None => ctx.value(a.point.d, "d", true, 0.0)?,
    };
    let gap = ctx.value(a.point.gap, "gap", true, 0.0)?;
    let config = PairConfig::new(alignment, l, d, gap).map_err(usage)?;
    let (lo, hi, n, spacing) = ctx.grid(&a.grid, None)?;
    let (lo, hi) = (ctx.layered.need(lo, "lo")?, ctx.layered.need(hi, "hi")?);
    ConeParameter::new(lo).map_err(usage)?;
    ConeParameter::new(hi).map_err(usage)?;
    let bracket = Bracket::new(lo, hi).map_err(usage)?;
    let tol = ctx.value(a.tol, "tol", false, 1e-6)?;
    let samples = match n {
        Some(n) => Some(sweep(&SweepSpec {
            axis: Axis::Nu,
            lo,
            hi,
            n,
            spacing,
            alignments: vec![alignment],
            nu: lo,
            l,
            d,
            gap,
            d_over_l: None,
        })?),
        None => None,
    };
    if format == Format::Csv {
        let table = samples.ok_or_else(|| CliError::Usage("CSV output needs --n samples".into()))?;
        return ctx.emit(&sweep_csv(&table));
    }
    let nu_star = nu_extremum(objective, &config, bracket, tol)?;
    let at = concurrence(&config, ConeParameter::new(nu_star)?)?;
    let doc = json!({
        "version": VERSION,
        "input": { "alignment": alignment, "l": l, "d": d, "gap": gap, "bracket": [lo, hi], "tol": tol },
        "objective": objective.name(),
        "nu_extremum": nu_star,
        "at_extremum": {
            "P_A": at.p_a,
            "P_B": at.p_b,
            "abs_X": at.abs_x,
            "concurrence": at.concurrence,
            "abs_X_minus_P_A": at.abs_x - at.p_a,
        },
        "samples": samples.map(|t| t.rows),
    });
    ctx.emit(&pretty(&doc))
}

fn run_figure(ctx: &Context, a: &FigureArgs) -> Result<(), CliError> {
    if a.list {
        let m = figures::manifest();
        let mut text = format!("manifest version {}\n", m.manifest_version);
        for p in &m.presets {
            text.push_str(&format!("{:<8} {}\n", p.name, p.title));
        }
        return write_output(None, &text);
    }
    let name = a.name.as_deref().ok_or_else(|| CliError::Usage("figure needs a preset name (or --list)".into()))?;
    let preset = figures::find(name)?;
    let dir = ctx.out()?.unwrap_or_else(|| PathBuf::from(name));
    let files = figures::render(&preset)?;
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    for (file, body) in &files {
        write_output(Some(&dir.join(file)), body)?;
    }
    eprintln!("wrote {} files to {}", files.len(), dir.display());
    Ok(())
}

fn verify_text(outcomes: &[VerifyOutcome]) -> String {
    let mut text = String::new();
    for o in outcomes {
        let line = match &o.report {
            Some(r) => format!(
                "{} {:<52} production={:+.15e} oracle={:+.15e} dev={:.2e} tol={:.0e}\n",
                if r.pass { "PASS" } else { "FAIL" },
                r.quantity,
                r.production,
                r.oracle,
                r.abs_deviation.min(r.rel_deviation),
                r.tolerance
            ),
            None => format!("FAIL {:?}: {}\n", o.check, o.error.as_deref().unwrap_or("")),
        };
        text.push_str(&line);
    }
    let passed = outcomes.iter().filter(|o| o.passed()).count();
    text.push_str(&format!("{passed}/{} checks passed\n", outcomes.len()));
    text
}

fn run_verify(ctx: &Context, a: &VerifyArgs) -> Result<(), CliError> {
    let format = ctx.format(Format::Text, &[Format::Text, Format::Json])?;
    let profile = ctx.layered.get(a.profile, "profile", parse_profile)?.unwrap_or(Profile::Default);
    let faults = Faults { p1_relative: a.fault_p1 };
    let outcomes = run_checks(&checks_for(profile), &faults);
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    let text = match format {
        Format::Json => pretty(&json!({
            "version": VERSION,
            "profile": profile,
            "passed": failed == 0,
            "failed": failed,
            "checks": outcomes,
        })),
        _ => verify_text(&outcomes),
    };
    ctx.emit(&text)?;
    if failed > 0 {
        return Err(CliError::VerifyFailed { failed });
    }
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let threads = resolve_threads(cli.threads, &file)?;
    let ctx = Context {
        layered: Layered { file },
        out: cli.out.clone(),
        format: cli.format,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Io(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Compute(a) => run_compute(&ctx, a),
        Command::Sweep(a) => run_sweep(&ctx, a),
        Command::Dmax(a) => run_dmax(&ctx, a),
        Command::Nuscan(a) => run_nuscan(&ctx, a),
        Command::Figure(a) => run_figure(&ctx, a),
        Command::Verify(a) => run_verify(&ctx, a),
    })
}

/// Entry point of the binary.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Failure(v) => {
                    let _ = write_output(None, &pretty(v));
                    eprintln!("error: {e}");
                }
                CliError::Usage(m) => eprintln!("usage error: {m}"),
                other => eprintln!("error: {other}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
