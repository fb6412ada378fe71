//! Argument definitions and subcommand drivers.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use tdosc_core::{
    build_time_map, propagate, states, suite, Frame, PropagatorConfig, SpatialGrid, StateLabel,
    System, SystemSpec, WaveSample,
};

use crate::output::{csv, emit, fmt};

#[derive(Debug)]
pub enum CliError {
    Core(tdosc_core::Error),
    Io(std::io::Error),
    Usage(String),
}

impl From<tdosc_core::Error> for CliError {
    fn from(e: tdosc_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "tdosc",
    version,
    about = "Exact states and verification for Schrodinger equations with \
             time-dependent P^2 and X^2 terms"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the auxiliary equation and emit its nodes as CSV.
    Solve(SolveArgs),
    /// Emit the (t, t') clock map as CSV.
    Timemap(TimemapArgs),
    /// Evaluate a state wavefunction on a grid.
    State(StateArgs),
    /// Run the verification suite and emit a JSON report.
    Verify(VerifyArgs),
    /// Crank-Nicolson propagation, optionally compared to the analytic state.
    Propagate(PropagateArgs),
}

/// Spec/config/output plumbing shared by every subcommand.
#[derive(Args)]
struct CommonArgs {
    /// Run-configuration JSON file ({"spec": ..., "output": ..., "t_end": ...}).
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// System spec JSON file (see README for the schema).
    #[arg(long, value_name = "FILE")]
    spec: Option<PathBuf>,
    /// Inline system spec JSON (overrides --spec and the config file).
    #[arg(long, value_name = "JSON")]
    spec_inline: Option<String>,
    /// Output path (stdout when omitted).
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Random seed (reserved; the numerics are deterministic).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FrameArg {
    To,
    Tm,
    Tq,
}

impl From<FrameArg> for Frame {
    fn from(f: FrameArg) -> Frame {
        match f {
            FrameArg::To => Frame::To,
            FrameArg::Tm => Frame::Tm,
            FrameArg::Tq => Frame::Tq,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Number,
    Coherent,
    Squeezed,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// End of the TM time span (defaults to three natural periods).
    #[arg(long, allow_negative_numbers = true)]
    t_end: Option<f64>,
    /// Minimum node density of the auxiliary solve.
    #[arg(long, default_value_t = 2048)]
    nodes: usize,
}

#[derive(Args)]
struct TimemapArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, allow_negative_numbers = true)]
    t_end: Option<f64>,
    /// Number of stored map nodes.
    #[arg(long, default_value_t = 2048)]
    nodes: usize,
}

#[derive(Args)]
struct StateParamArgs {
    /// Evaluation frame.
    #[arg(long, value_enum)]
    frame: FrameArg,
    /// State family.
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Number-state index.
    #[arg(short, long, default_value_t = 0)]
    n: usize,
    /// Phase-space center (coherent/squeezed).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    x0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    p0: f64,
    /// Squeeze modulus.
    #[arg(short, long, default_value_t = 0.0)]
    r: f64,
    /// Squeeze angle of z = r e^{i theta}.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    theta: f64,
    /// Evaluation time (t' for the TO frame, t otherwise).
    #[arg(long, allow_negative_numbers = true)]
    time: f64,
    /// Grid point count.
    #[arg(long, default_value_t = 1025)]
    grid: usize,
    /// Grid bounds override (defaults to an auto-sized box).
    #[arg(long, allow_negative_numbers = true)]
    xmin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    xmax: Option<f64>,
}

#[derive(Args)]
struct StateArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    params: StateParamArgs,
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// TM end time for the verification span.
    #[arg(long, allow_negative_numbers = true)]
    t_end: Option<f64>,
    /// Skip the (slower) Crank-Nicolson oracle comparison.
    #[arg(long)]
    no_oracle: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CompareArg {
    Analytic,
    None,
}

#[derive(Args)]
struct PropagateArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    params: StateParamArgs,
    /// Time step.
    #[arg(long)]
    dt: f64,
    /// Final time in the propagation frame's clock.
    #[arg(long, allow_negative_numbers = true)]
    t_final: f64,
    /// Compare the final state against the analytic one.
    #[arg(long, value_enum, default_value_t = CompareArg::Analytic)]
    compare: CompareArg,
    /// Where to write the JSON comparison record (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

pub fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Timemap(args) => run_timemap(args),
        Command::State(args) => run_state(args),
        Command::Verify(args) => run_verify(args),
        Command::Propagate(args) => run_propagate(args),
    }
}

/// Optional run-configuration document.
#[derive(Default)]
struct RunConfig {
    spec: Option<serde_json::Value>,
    output: Option<PathBuf>,
    t_end: Option<f64>,
}

fn load_config(path: Option<&Path>) -> CliResult<RunConfig> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    Ok(RunConfig {
        spec: value.get("spec").cloned(),
        output: value
            .get("output")
            .and_then(|v| v.as_str())
            .map(PathBuf::from),
        t_end: value.get("t_end").and_then(|v| v.as_f64()),
    })
}

/// Replace `{"params": {"csv": "file"}}` in tabulated profiles with the
/// loaded sample arrays; paths are taken relative to `base`.
fn inline_csv_profiles(value: &mut serde_json::Value, base: Option<&Path>) -> CliResult<()> {
    for key in ["nu", "h2"] {
        let Some(profile) = value.get_mut(key) else {
            continue;
        };
        let Some(csv_path) = profile
            .get("params")
            .and_then(|p| p.get("csv"))
            .and_then(|v| v.as_str())
            .map(PathBuf::from)
        else {
            continue;
        };
        let resolved = match base {
            Some(dir) if csv_path.is_relative() => dir.join(&csv_path),
            _ => csv_path,
        };
        let text = std::fs::read_to_string(&resolved)?;
        let profile_data = tdosc_core::TimeProfile::tabulated_from_csv(&text)?;
        let mut doc = profile_data.to_json_value();
        if let Some(domain) = profile.get("domain") {
            doc["domain"] = domain.clone();
        }
        *profile = doc;
    }
    Ok(())
}

fn spec_from_file(path: &Path) -> CliResult<SystemSpec> {
    let text = std::fs::read_to_string(path)?;
    let mut value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("spec {}: {e}", path.display())))?;
    inline_csv_profiles(&mut value, path.parent())?;
    Ok(SystemSpec::from_json_value(&value)?)
}

fn resolve_spec(common: &CommonArgs, config: &RunConfig) -> CliResult<SystemSpec> {
    if let Some(inline) = &common.spec_inline {
        let mut value: serde_json::Value = serde_json::from_str(inline)
            .map_err(|e| CliError::Usage(format!("inline spec: {e}")))?;
        inline_csv_profiles(&mut value, None)?;
        return Ok(SystemSpec::from_json_value(&value)?);
    }
    if let Some(path) = &common.spec {
        return spec_from_file(path);
    }
    match &config.spec {
        Some(serde_json::Value::String(path)) => spec_from_file(Path::new(path)),
        Some(value) => {
            let mut value = value.clone();
            inline_csv_profiles(&mut value, common.config.as_deref().and_then(Path::parent))?;
            Ok(SystemSpec::from_json_value(&value)?)
        }
        None => Err(CliError::Usage(
            "no system spec: pass --spec, --spec-inline, or a config with a `spec` entry".into(),
        )),
    }
}

fn spec_hash(spec: &SystemSpec) -> String {
    let canonical = spec.to_json_value().to_string();
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    format!("{:x}", hasher.finalize())
}

fn default_t_end(spec: &SystemSpec) -> f64 {
    let g2 = spec.g2_at_t(spec.t0).unwrap_or(0.0);
    let omega0 = if g2 > 0.0 { (2.0 * g2).sqrt() } else { 1.0 };
    let t_end = spec.t0 + 3.0 * 2.0 * std::f64::consts::PI / omega0;
    t_end.min(spec.domain().1)
}

/// Prepare a system whose clocks cover `time` in `frame`, with the
/// smallest span that does so (long spans can be needlessly stiff).
fn prepare_covering(spec: &SystemSpec, frame: Frame, time: f64) -> CliResult<System> {
    let domain_hi = spec.domain().1;
    let floor = 1e-3 * (time - spec.t0).abs().max(1.0);
    let mut t_end = ((time - spec.t0).max(floor) + spec.t0).min(domain_hi);
    let mut prev_gap = f64::INFINITY;
    for _ in 0..60 {
        let system = match System::prepare(spec.clone(), t_end) {
            Ok(s) => s,
            // A saturating clock map drives the auxiliary solve unresolvable
            // before it ever covers the requested time; report that clearly
            // once stagnation has been observed.
            Err(e) if prev_gap.is_finite() && e.is_numerical() => break,
            Err(e) => return Err(e.into()),
        };
        let sup = match frame {
            Frame::To => system.map.tprime_range().1,
            _ => system.map.t_range().1,
        };
        let gap = time - sup;
        if gap <= 0.0 {
            return Ok(system);
        }
        // t' bounded above: extending the TM span stops closing the gap.
        if t_end >= domain_hi || gap > 0.9 * prev_gap {
            break;
        }
        prev_gap = gap;
        t_end = (spec.t0 + 2.0 * (t_end - spec.t0)).min(domain_hi);
    }
    Err(CliError::Usage(format!(
        "requested time {time} is not reachable within the spec domain \
         (the clock map saturates below it)"
    )))
}

fn state_label(params: &StateParamArgs) -> CliResult<StateLabel> {
    let label = match params.kind {
        KindArg::Number => StateLabel::Number { n: params.n },
        KindArg::Coherent => StateLabel::Coherent {
            x0: params.x0,
            p0: params.p0,
        },
        KindArg::Squeezed => StateLabel::Squeezed {
            x0: params.x0,
            p0: params.p0,
            r: params.r,
            theta: params.theta,
        },
    };
    label.validate()?;
    Ok(label)
}

fn state_grid(
    system: &System,
    frame: Frame,
    label: &StateLabel,
    params: &StateParamArgs,
) -> CliResult<SpatialGrid> {
    match (params.xmin, params.xmax) {
        (Some(lo), Some(hi)) => Ok(SpatialGrid::new(lo, hi, params.grid)?),
        (None, None) => Ok(states::auto_grid(
            system,
            frame,
            label,
            params.time,
            params.grid,
        )?),
        _ => Err(CliError::Usage(
            "--xmin and --xmax must be given together".into(),
        )),
    }
}

fn run_solve(args: SolveArgs) -> CliResult<ExitCode> {
    let config = load_config(args.common.config.as_deref())?;
    let spec = resolve_spec(&args.common, &config)?;
    let t_end = args
        .t_end
        .or(config.t_end)
        .unwrap_or_else(|| default_t_end(&spec));
    let system = System::prepare_with(spec, t_end, None, 2048, args.nodes)?;
    let aux = &system.aux;
    let rows = (0..aux.node_count()).map(|i| {
        let (tp, xi, xi_dot, theta) = aux.node(i);
        let phi3 = 2.0 * xi.norm_sqr();
        let phi3_dot = 4.0 * (xi_dot * xi.conj()).re;
        let defect = tdosc_core::aux::wronskian_defect(xi, xi_dot);
        vec![
            fmt(tp),
            fmt(xi.re),
            fmt(xi.im),
            fmt(xi_dot.re),
            fmt(xi_dot.im),
            fmt(theta),
            fmt(phi3),
            fmt(phi3_dot),
            fmt(defect),
        ]
    });
    let doc = csv(
        "tprime,xi_re,xi_im,xi_dot_re,xi_dot_im,theta,phi3,phi3_dot,wronskian_defect",
        rows,
    );
    emit(
        args.common.output.as_deref().or(config.output.as_deref()),
        &doc,
    )?;
    Ok(ExitCode::SUCCESS)
}

fn run_timemap(args: TimemapArgs) -> CliResult<ExitCode> {
    let config = load_config(args.common.config.as_deref())?;
    let spec = resolve_spec(&args.common, &config)?;
    let t_end = args
        .t_end
        .or(config.t_end)
        .unwrap_or_else(|| default_t_end(&spec));
    let map = build_time_map(&spec, t_end, args.nodes)?;
    let doc = csv("t,tprime", map.nodes().map(|(t, tp)| vec![fmt(t), fmt(tp)]));
    emit(
        args.common.output.as_deref().or(config.output.as_deref()),
        &doc,
    )?;
    Ok(ExitCode::SUCCESS)
}

fn state_csv(wave: &WaveSample) -> String {
    csv(
        "x,psi_re,psi_im,density",
        wave.grid
            .points()
            .zip(wave.values.iter())
            .map(|(x, v)| vec![fmt(x), fmt(v.re), fmt(v.im), fmt(v.norm_sqr())]),
    )
}

fn run_state(args: StateArgs) -> CliResult<ExitCode> {
    let config = load_config(args.common.config.as_deref())?;
    let spec = resolve_spec(&args.common, &config)?;
    let frame: Frame = args.params.frame.into();
    let label = state_label(&args.params)?;
    let system = prepare_covering(&spec, frame, args.params.time)?;
    let grid = state_grid(&system, frame, &label, &args.params)?;
    let wave = states::state(&system, frame, &label, args.params.time, grid)?;
    if wave.coverage_defect() > 1e-8 {
        eprintln!(
            "warning: grid truncates the state (coverage defect {:.3e})",
            wave.coverage_defect()
        );
    }
    let doc = match args.format {
        FormatArg::Csv => state_csv(&wave),
        FormatArg::Json => {
            let p = states::gaussian_params(&system, frame, &label, args.params.time)?;
            let mut doc = serde_json::json!({
                "frame": frame.to_string(),
                "time": args.params.time,
                "q": p.q,
                "r": p.r,
                "x_plus": p.x_plus,
                "x_minus": p.x_minus,
                "x": wave.grid.points().collect::<Vec<f64>>(),
                "psi_re": wave.values.iter().map(|v| v.re).collect::<Vec<f64>>(),
                "psi_im": wave.values.iter().map(|v| v.im).collect::<Vec<f64>>(),
            })
            .to_string();
            doc.push('\n');
            doc
        }
    };
    emit(
        args.common.output.as_deref().or(config.output.as_deref()),
        &doc,
    )?;
    Ok(ExitCode::SUCCESS)
}

fn run_verify(args: VerifyArgs) -> CliResult<ExitCode> {
    let config = load_config(args.common.config.as_deref())?;
    let spec = resolve_spec(&args.common, &config)?;
    let options = suite::VerifyOptions {
        t_end: args.t_end.or(config.t_end),
        with_oracle: !args.no_oracle,
    };
    let checks = suite::run_verification(&spec, &options)?;
    let passed = checks.iter().filter(|c| c.pass).count();
    let all_pass = passed == checks.len();
    let report = serde_json::json!({
        "spec_hash": spec_hash(&spec),
        "checks": checks,
        "summary": {
            "total": checks.len(),
            "passed": passed,
            "pass": all_pass,
        },
    });
    let mut doc = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Usage(format!("report serialization: {e}")))?;
    doc.push('\n');
    emit(
        args.common.output.as_deref().or(config.output.as_deref()),
        &doc,
    )?;
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run_propagate(args: PropagateArgs) -> CliResult<ExitCode> {
    let config = load_config(args.common.config.as_deref())?;
    let spec = resolve_spec(&args.common, &config)?;
    let frame: Frame = args.params.frame.into();
    let label = state_label(&args.params)?;
    if frame == Frame::Tq {
        return Err(CliError::Usage(
            "propagation runs in the TO or TM frame; TQ states follow by dilation".into(),
        ));
    }
    let system = prepare_covering(&spec, frame, args.t_final.max(args.params.time))?;
    let grid = match (args.params.xmin, args.params.xmax) {
        (Some(lo), Some(hi)) => SpatialGrid::new(lo, hi, args.params.grid)?,
        (None, None) => tdosc_core::grid_covering_span(
            &system,
            frame,
            &label,
            (args.params.time, args.t_final),
            args.params.grid,
        )?,
        _ => {
            return Err(CliError::Usage(
                "--xmin and --xmax must be given together".into(),
            ))
        }
    };
    let cfg = PropagatorConfig::new(frame, grid, args.dt, args.t_final);
    let initial = states::state(&system, frame, &label, args.params.time, grid)?;
    let outcome = propagate(&system, &cfg, &initial)?;
    if let Some(path) = args.common.output.as_deref().or(config.output.as_deref()) {
        emit(Some(path), &state_csv(&outcome.wave))?;
    }
    match args.compare {
        CompareArg::Analytic => {
            let reference = states::state(&system, frame, &label, args.t_final, grid)?;
            let record = serde_json::json!({
                "frame": frame.to_string(),
                "t_start": args.params.time,
                "t_final": args.t_final,
                "dt": args.dt,
                "steps": outcome.steps,
                "l2": tdosc_core::l2_distance(&outcome.wave, &reference)?,
                "l2_aligned": tdosc_core::phase_aligned_distance(&outcome.wave, &reference)?,
                "norm_drift": outcome.norm_drift,
                "compare": "analytic",
            });
            let mut doc = serde_json::to_string_pretty(&record)
                .map_err(|e| CliError::Usage(format!("report serialization: {e}")))?;
            doc.push('\n');
            emit(args.report.as_deref(), &doc)?;
        }
        CompareArg::None => {
            if args.common.output.is_none() && config.output.is_none() {
                // No CSV sink was chosen either; emit the final state here.
                emit(None, &state_csv(&outcome.wave))?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
