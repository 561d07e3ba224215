//! `zeno`: run scenarios and sweeps, print closed-form rates, list presets.

mod bundle;
mod exit;
mod rates;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use zeno_core::parallel::Execution;
use zeno_core::perturbation::CouplingParams;
use zeno_core::scenarios::overrides::apply_all;
use zeno_core::scenarios::{calibrate_plateau, get, names, sweep, Scenario, SweepRow};
use zeno_core::system::{Frame, DEFAULT_DETUNING, DEFAULT_LAMBDA, DEFAULT_THETA};

use exit::Failure;

#[derive(Parser)]
#[command(name = "zeno", version, about = "Zeno-suppressed photon bunching in coupled waveguides")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one scenario and write a run bundle.
    Run {
        #[command(flatten)]
        common: Common,
        /// Calibrate the θ plateau before the run.
        #[arg(long)]
        calibrate: bool,
    },
    /// Run a scenario once per value of one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Override key to vary, e.g. `omega_r` or `system.lambda_max`.
        #[arg(long)]
        param: String,
        /// Inclusive range `LO:HI`.
        #[arg(long)]
        range: String,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        /// Run samples one after another.
        #[arg(long)]
        sequential: bool,
    },
    /// Print every closed-form amplitude and rate as JSON.
    Rates {
        #[arg(long, default_value_t = DEFAULT_THETA)]
        theta: f64,
        #[arg(long, default_value_t = DEFAULT_LAMBDA)]
        lambda: f64,
        /// Middle-level detuning Δ.
        #[arg(long, default_value_t = DEFAULT_DETUNING, allow_hyphen_values = true)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Two-level absorber detuning Δω_R.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        omega_r_detuning: f64,
        /// ω used by the alternative `(Δ·ω)²` reading of the second-order rate.
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
    },
    /// List the registered scenarios.
    List,
}

#[derive(Args)]
struct Common {
    /// Registered scenario name or path to a scenario JSON file.
    scenario: String,
    /// Parent directory for the output bundle.
    #[arg(long, default_value = "runs")]
    out: PathBuf,
    /// Override `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    dt: Option<f64>,
    /// Record every N-th step.
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long, value_enum)]
    frame: Option<FrameArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FrameArg {
    Lab,
    Rotating,
}

impl Common {
    fn resolve(&self) -> Result<Scenario, Failure> {
        let mut s = load(&self.scenario)?;
        apply_all(&mut s, &self.set)?;
        if let Some(dt) = self.dt {
            apply_all(&mut s, &[format!("dt={dt:?}")])?;
        }
        if let Some(stride) = self.stride {
            apply_all(&mut s, &[format!("stride={stride}")])?;
        }
        if let Some(frame) = self.frame {
            s.system.frame = match frame {
                FrameArg::Lab => Frame::Lab,
                FrameArg::Rotating => Frame::Rotating,
            };
        }
        s.validate()?;
        Ok(s)
    }
}

fn load(arg: &str) -> Result<Scenario, Failure> {
    let path = Path::new(arg);
    if path.extension().is_some_and(|e| e == "json") || path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::io(&format!("reading {arg}"), e))?;
        return Ok(Scenario::from_json(&text)?);
    }
    Ok(get(arg)?)
}

#[derive(Serialize)]
struct RunReport<'a> {
    out: &'a Path,
    summary: &'a zeno_core::observables::RunSummary,
    thresholds: Vec<zeno_core::scenarios::ThresholdCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    calibrated_plateau: Option<f64>,
}

fn cmd_run(common: &Common, calibrate: bool) -> Result<(), Failure> {
    let mut s = common.resolve()?;
    let mut plateau = None;
    if calibrate {
        let spec = s
            .calibration
            .clone()
            .ok_or_else(|| zeno_core::Error::Calibration(format!("scenario {} has no calibration block", s.name)))?;
        let cal = calibrate_plateau(&s, &spec)?;
        plateau = Some(cal.plateau);
        s = cal.scenario;
    }
    let out = s.run()?;
    let dir = bundle::create_dir(&common.out.join(&s.name))?;
    let config = s.to_json()?;
    out.series.save_csv(&dir.join("timeseries.csv"))?;
    bundle::write_json(&dir.join("summary.json"), &out.summary)?;
    bundle::write_config(&dir, &config)?;
    let report = RunReport {
        out: &dir,
        summary: &out.summary,
        thresholds: s.check_thresholds(&out.summary)?,
        calibrated_plateau: plateau,
    };
    emit(&pretty(&report)?)
}

fn emit(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::io("writing stdout", e)),
        _ => Ok(()),
    }
}

fn pretty<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(zeno_core::Error::from)?;
    text.push('\n');
    Ok(text)
}

fn parse_range(range: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::usage(format!("--range expects LO:HI with numeric bounds, got {range:?}"));
    let (lo, hi) = range.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// Flat per-sample row of the sweep table.
fn table(rows: &[SweepRow], param: &str) -> Result<String, Failure> {
    let mut out = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        let first = &rows[0].summary;
        let mut header = vec![param.to_string()];
        header.extend(first.final_probabilities.keys().map(|k| format!("P[{k}]")));
        header.extend(
            (0..first.max_occupation_probability.len()).map(|w| format!("max_occupation[{w}]")),
        );
        header.extend(
            ["max_bunched_probability", "final_bunched_probability", "fidelity", "w_fidelity", "norm_drift"]
                .map(String::from),
        );
        w.write_record(&header).map_err(zeno_core::Error::from)?;
        let opt = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v:.12e}"));
        for r in rows {
            let s = &r.summary;
            let mut rec = vec![format!("{:?}", r.value)];
            rec.extend(s.final_probabilities.values().map(|v| format!("{v:.12e}")));
            rec.extend(s.max_occupation_probability.iter().map(|v| format!("{v:.12e}")));
            rec.push(format!("{:.12e}", s.max_bunched_probability));
            rec.push(format!("{:.12e}", s.final_bunched_probability));
            rec.push(opt(s.fidelity));
            rec.push(opt(s.w_fidelity.as_ref().map(|w| w.fidelity)));
            rec.push(format!("{:.12e}", s.norm_drift));
            w.write_record(&rec).map_err(zeno_core::Error::from)?;
        }
        w.flush().map_err(|e| Failure::io("writing sweep table", e))?;
    }
    String::from_utf8(out).map_err(|e| Failure::usage(e.to_string()))
}

fn cmd_sweep(common: &Common, param: &str, range: &str, samples: usize, sequential: bool) -> Result<(), Failure> {
    let (lo, hi) = parse_range(range)?;
    if samples == 0 {
        return Err(Failure::usage("--samples must be at least 1"));
    }
    let s = common.resolve()?;
    let values = zeno_core::scenarios::sweep::linspace(lo, hi, samples);
    let exec = if sequential { Execution::Sequential } else { Execution::default() };
    let rows = sweep(&s, param, &values, exec)?;
    let dir = bundle::create_dir(&common.out.join(format!("{}-sweep-{}", s.name, param.replace('.', "_"))))?;
    let text = table(&rows, param)?;
    bundle::write(&dir.join("sweep.csv"), &text)?;
    bundle::write_json(&dir.join("sweep.json"), &rows)?;
    bundle::write_config(&dir, &s.to_json()?)?;
    emit(&text)
}

fn cmd_rates(p: CouplingParams, omega: f64) -> Result<(), Failure> {
    let report = rates::report(&p, omega)?;
    emit(&pretty(&report)?)
}

fn cmd_list() -> Result<(), Failure> {
    let mut text = String::new();
    for name in names() {
        text.push_str(&format!("{name:<8} {}\n", get(name)?.description));
    }
    emit(&text)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Run { common, calibrate } => cmd_run(common, *calibrate),
        Command::Sweep {
            common,
            param,
            range,
            samples,
            sequential,
        } => cmd_sweep(common, param, range, *samples, *sequential),
        Command::Rates {
            theta,
            lambda,
            delta,
            t,
            omega_r_detuning,
            omega,
        } => cmd_rates(
            CouplingParams {
                theta: *theta,
                lambda: *lambda,
                delta: *delta,
                t: *t,
                two_level_detuning: *omega_r_detuning,
            },
            *omega,
        ),
        Command::List => cmd_list(),
    };
    match result {
        Ok(()) => ExitCode::from(exit::OK),
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(f.code)
        }
    }
}
