//! Command-line front end: scenario files in, deterministic CSV curves and
//! machine-readable verification reports out.
//!
//! Exit codes: 0 on success, 1 when a verification check fails, 2 on
//! usage or configuration errors.

pub mod scenario;

use clap::{Args, Parser, Subcommand, ValueEnum};
use isac_rdb::channels::KlConvention;
use isac_rdb::occupancy::BoundComposition;
use isac_rdb::optimizer::{pareto_sweep_nakagami, pareto_sweep_occupancy, RegionPoint};
use isac_rdb::rd::{
    bernoulli_rd, blahut_arimoto, blahut_arimoto_at_distortion, slb_discrete, BaOptions,
    BernoulliSource, DiscreteSource,
};
use isac_rdb::verify::{run_all, VerifyOptions};
use scenario::ScenarioFile;
use std::f64::consts::LN_2;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "isac-rdb",
    version,
    about = "Converse bounds on sensing-distortion/communication-rate regions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the converse region for the Nakagami channel-estimation study.
    RegionNakagami(RegionArgs),
    /// Sweep the converse region for the occupancy-detection study.
    RegionOccupancy(RegionOccupancyArgs),
    /// Tabulate a rate-distortion curve (optionally with the iterative oracle).
    Rd(RdArgs),
    /// Run the verification suite and emit a JSON report.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RegionArgs {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the scenario channel-draw count.
    #[arg(long)]
    draws: Option<u64>,
    /// Override the scenario sweep-grid size.
    #[arg(long)]
    sweep: Option<usize>,
    /// Print rates in bits instead of nats (formatting only).
    #[arg(long)]
    bits: bool,
    /// Use the halved Gaussian-KL prefactor convention.
    #[arg(long, value_enum, default_value_t = OnOff::On)]
    paper_kl_convention: OnOff,
}

#[derive(Args)]
struct RegionOccupancyArgs {
    #[command(flatten)]
    common: RegionArgs,
    /// Invert the single relaxed display formula instead of the two-stage
    /// composition (the two agree numerically).
    #[arg(long)]
    relaxed_bound: bool,
}

#[derive(Args)]
struct RdArgs {
    /// Source spec: bernoulli:<p> or uniform:<n> (Hamming distortion).
    #[arg(long)]
    source: String,
    /// Number of distortion grid points.
    #[arg(long, default_value_t = 21)]
    grid: usize,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Add a Blahut-Arimoto oracle column.
    #[arg(long)]
    oracle: bool,
    /// Print rates in bits instead of nats (formatting only).
    #[arg(long)]
    bits: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only checks whose name contains this substring.
    #[arg(long)]
    only: Option<String>,
    /// Override the default verification seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report here as well as to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use the halved Gaussian-KL prefactor convention.
    #[arg(long, value_enum, default_value_t = OnOff::On)]
    paper_kl_convention: OnOff,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OnOff {
    On,
    Off,
}

impl OnOff {
    fn kl(self) -> KlConvention {
        match self {
            OnOff::On => KlConvention::HalfPrefactor,
            OnOff::Off => KlConvention::Standard,
        }
    }
}

enum CliError {
    /// Usage or configuration problem (exit 2).
    Config(String),
    /// A verification check failed (exit 1).
    VerificationFailed,
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::VerificationFailed => 1,
        }
    }
}

fn config_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            if let CliError::Config(msg) = &e {
                eprintln!("error: {msg}");
            }
            e.code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::RegionNakagami(args) => cmd_region_nakagami(args),
        Command::RegionOccupancy(args) => cmd_region_occupancy(args),
        Command::Rd(args) => cmd_rd(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn load_scenario(path: &Path) -> Result<ScenarioFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    ScenarioFile::parse(&text).map_err(CliError::Config)
}

fn write_output(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

struct RunParams {
    seed: u64,
    draws: u64,
    sweep: usize,
}

fn run_params(file: &ScenarioFile, args: &RegionArgs) -> RunParams {
    RunParams {
        seed: args.seed.unwrap_or(file.run.seed),
        draws: args.draws.unwrap_or(file.run.n_draws),
        sweep: args.sweep.unwrap_or(file.run.n_sweep),
    }
}

fn rate_scale(bits: bool) -> f64 {
    if bits {
        1.0 / LN_2
    } else {
        1.0
    }
}

fn warn_exclusions(points: &[RegionPoint]) {
    let excluded: u64 = points.iter().map(|p| p.excluded).sum();
    if excluded > 0 {
        eprintln!("warning: {excluded} channel draws were excluded for solver failure");
    }
}

fn cmd_region_nakagami(args: RegionArgs) -> Result<(), CliError> {
    let file = load_scenario(&args.scenario)?;
    let cfg = file.system_config().map_err(CliError::Config)?;
    let params = run_params(&file, &args);
    let points =
        pareto_sweep_nakagami(&cfg, params.draws, params.sweep, params.seed).map_err(config_err)?;
    warn_exclusions(&points);
    let scale = rate_scale(args.bits);
    let mut out =
        String::from("sweep_param,D_rdb,D_rdb_stderr,R_mean,R_stderr,D_bcrb,D_bcrb_stderr\n");
    for p in &points {
        let (bcrb, bcrb_se) = match p.bcrb {
            Some((mean, se)) => (format!("{mean}"), format!("{se}")),
            None => (String::new(), String::new()),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            p.sweep_param,
            p.d_bound,
            p.d_stderr,
            p.rate_mean * scale,
            p.rate_stderr * scale,
            bcrb,
            bcrb_se
        )
        .expect("string write");
    }
    write_output(&args.out, &out)
}

fn cmd_region_occupancy(args: RegionOccupancyArgs) -> Result<(), CliError> {
    let file = load_scenario(&args.common.scenario)?;
    let occ = file.occupancy_config().map_err(CliError::Config)?;
    let params = run_params(&file, &args.common);
    let comp = if args.relaxed_bound {
        BoundComposition::Relaxed
    } else {
        BoundComposition::TwoStage
    };
    let points = pareto_sweep_occupancy(
        &occ,
        params.draws,
        params.sweep,
        params.seed,
        comp,
        args.common.paper_kl_convention.kl(),
    )
    .map_err(config_err)?;
    warn_exclusions(&points);
    let scale = rate_scale(args.common.bits);
    let mut out = String::from("gamma,D_bound,R_mean,R_stderr\n");
    for p in &points {
        writeln!(
            out,
            "{},{},{},{}",
            p.sweep_param,
            p.d_bound,
            p.rate_mean * scale,
            p.rate_stderr * scale
        )
        .expect("string write");
    }
    write_output(&args.common.out, &out)
}

enum RdSource {
    Bernoulli(f64),
    Uniform(usize),
}

fn parse_source(spec: &str) -> Result<RdSource, CliError> {
    let (kind, value) = spec
        .split_once(':')
        .ok_or_else(|| CliError::Config(format!("source `{spec}` is not kind:value")))?;
    match kind {
        "bernoulli" => {
            let p: f64 = value
                .parse()
                .map_err(|_| CliError::Config(format!("bad probability `{value}`")))?;
            Ok(RdSource::Bernoulli(p))
        }
        "uniform" => {
            let n: usize = value
                .parse()
                .map_err(|_| CliError::Config(format!("bad alphabet size `{value}`")))?;
            if n < 2 {
                return Err(CliError::Config("uniform source needs >= 2 symbols".into()));
            }
            Ok(RdSource::Uniform(n))
        }
        other => Err(CliError::Config(format!(
            "unknown source kind `{other}` (expected bernoulli or uniform)"
        ))),
    }
}

fn cmd_rd(args: RdArgs) -> Result<(), CliError> {
    if args.grid < 2 {
        return Err(CliError::Config("need a grid of at least 2 points".into()));
    }
    type ClosedForm = Box<dyn Fn(f64) -> Result<f64, CliError>>;
    let (d_max, closed, discrete): (f64, ClosedForm, DiscreteSource) =
        match parse_source(&args.source)? {
            RdSource::Bernoulli(p) => {
                let src = BernoulliSource::new(p).map_err(config_err)?;
                let discrete = DiscreteSource::bernoulli_hamming(p).map_err(config_err)?;
                (
                    src.guessing_error(),
                    Box::new(move |d| bernoulli_rd(&src, d).map(|r| r.0).map_err(config_err)),
                    discrete,
                )
            }
            RdSource::Uniform(n) => {
                let discrete = DiscreteSource::uniform_hamming(n).map_err(config_err)?;
                let for_closure = discrete.clone();
                (
                    (n as f64 - 1.0) / n as f64,
                    Box::new(move |d| {
                        slb_discrete(&for_closure, d)
                            .map(|r| r.0)
                            .map_err(config_err)
                    }),
                    discrete,
                )
            }
        };

    let scale = rate_scale(args.bits);
    let mut out = String::from(if args.oracle {
        "D,R_closed,R_oracle\n"
    } else {
        "D,R\n"
    });
    let ba_opts = BaOptions::default();
    for k in 0..args.grid {
        let d = d_max * k as f64 / (args.grid - 1) as f64;
        let r_closed = closed(d)?;
        if args.oracle {
            let pt = if d == 0.0 {
                // the zero-distortion endpoint corresponds to a steep slope
                blahut_arimoto(&discrete, 500.0, ba_opts).map_err(config_err)?
            } else {
                blahut_arimoto_at_distortion(&discrete, d, ba_opts).map_err(config_err)?
            };
            if !pt.converged {
                eprintln!("warning: oracle did not converge at D = {d}");
            }
            writeln!(out, "{d},{},{}", r_closed * scale, pt.rate.0 * scale).expect("string write");
        } else {
            writeln!(out, "{d},{}", r_closed * scale).expect("string write");
        }
    }
    write_output(&args.out, &out)
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let mut opts = VerifyOptions::default();
    if let Some(seed) = args.seed {
        opts.seed = seed;
    }
    opts.kl = args.paper_kl_convention.kl();
    let mut reports = run_all(&opts);
    if let Some(filter) = &args.only {
        reports.retain(|r| r.name.contains(filter.as_str()));
        if reports.is_empty() {
            return Err(CliError::Config(format!(
                "no verification check matches `{filter}`"
            )));
        }
    }
    let json = serde_json::to_string_pretty(&reports).expect("serializable reports");
    println!("{json}");
    if let Some(path) = &args.out {
        write_output(path, &json)?;
    }
    if reports.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(CliError::VerificationFailed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_parsing() {
        assert!(matches!(parse_source("bernoulli:0.3"), Ok(RdSource::Bernoulli(p)) if p == 0.3));
        assert!(matches!(
            parse_source("uniform:4"),
            Ok(RdSource::Uniform(4))
        ));
        assert!(parse_source("uniform:1").is_err());
        assert!(parse_source("poisson:2").is_err());
        assert!(parse_source("bernoulli").is_err());
    }
}
