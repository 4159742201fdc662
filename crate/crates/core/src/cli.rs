//! Command-line front end. Results go to stdout as JSON (or CSV for the
//! sweeps), diagnostics to stderr. Exit status: 0 success, 1 computation
//! failure, 2 bad usage or malformed input.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::capacity::{
    ad_ce, ad_ch, basis_input_chi, ce_maximize_constrained, ce_maximize_with, CeOptions, CeResult,
    EnergyConstraint, FwProgress, DEFAULT_TOL, MAX_ITERS,
};
use crate::channels::ChannelSpec;
use crate::error::{Error, Result};
use crate::gaussian::{sweep, write_sweep_csv, GaussianGrid};
use crate::numfmt::{fmt_sig, round_sig};
use crate::qmath::matrix::{self, ComplexMatrix};
use crate::reverse_shannon::{
    cost_statistics, empirical_faithfulness, exact_faithfulness_oracle, receive, simulate, Dmc, InputSource,
    ProtocolConfig, SharedRandomness, SimChannel, Variant,
};
use crate::typeclasses::spectrum_report;

#[derive(Parser, Debug)]
#[command(name = "qcap", version, about = "Entanglement-assisted capacities, Gaussian channel formulas and channel simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Recompute the capacity table of four textbook channels.
    Table1,
    /// Channel capacities.
    #[command(subcommand)]
    Capacity(CapacityCmd),
    /// Parameter sweeps.
    #[command(subcommand)]
    Sweep(SweepCmd),
    /// Closed-form bosonic Gaussian channel quantities as CSV.
    Gaussian(GaussianArgs),
    /// Reverse Shannon simulation of a discrete memoryless channel.
    #[command(subcommand)]
    Rst(RstCmd),
    /// Typical subspace checks.
    #[command(subcommand)]
    Typical(TypicalCmd),
}

#[derive(Subcommand, Debug)]
pub enum CapacityCmd {
    /// Maximize the quantum mutual information (entanglement-assisted capacity).
    Ce(CeArgs),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct ChannelInput {
    /// Preset such as `amplitude-damping:0.5`, `depolarizing:2,0.6667`, `noiseless:2`.
    #[arg(long)]
    pub preset: Option<String>,
    /// ChannelSpec JSON file.
    #[arg(long, value_name = "FILE")]
    pub spec: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CeArgs {
    #[command(flatten)]
    pub channel: ChannelInput,
    /// Stop once the certified gap is at most this many bits.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = MAX_ITERS)]
    pub max_iters: usize,
    /// Hermitian observable H (matrix JSON) for the constraint tr(H rho) <= bound.
    #[arg(long, value_name = "FILE", requires = "bound")]
    pub observable: Option<PathBuf>,
    #[arg(long, requires = "observable")]
    pub bound: Option<f64>,
    /// Report value and gap on stderr every this many iterations.
    #[arg(long, value_name = "N")]
    pub progress: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum SweepCmd {
    /// Amplitude damping: assisted and unassisted capacity against p.
    Ad(AdArgs),
}

#[derive(Args, Debug)]
pub struct AdArgs {
    /// Damping probabilities.
    #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,0.99,0.999,0.9999")]
    pub p: Vec<f64>,
}

#[derive(Args, Debug)]
pub struct GaussianArgs {
    /// Input energies S.
    #[arg(long, value_delimiter = ',', default_value = "0.1,1,10")]
    pub s: Vec<f64>,
    /// Noise energies N.
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.1,1,10,100,1000,10000,100000,1000000")]
    pub n: Vec<f64>,
    /// Attenuation/amplification factors k.
    #[arg(long, value_delimiter = ',', default_value = "0.1,1,3")]
    pub k: Vec<f64>,
    /// Append the large-noise limit of C_E / C_Shan as a `limit` column.
    #[arg(long)]
    pub with_limit: bool,
}

#[derive(Subcommand, Debug)]
pub enum RstCmd {
    /// Monte-Carlo cost statistics.
    Simulate(SimulateArgs),
    /// Exhaustive faithfulness check at enumerable sizes.
    VerifyExact(VerifyArgs),
    /// Dump one run's transcript with its bit string.
    Transcript(TranscriptArgs),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct DmcInput {
    /// Binary symmetric channel with this crossover probability.
    #[arg(long)]
    pub bsc: Option<f64>,
    /// DMC JSON file `{"matrix": [[P(y|x), ...], ...]}`.
    #[arg(long, value_name = "FILE")]
    pub dmc: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum VariantArg {
    Bsc,
    General,
}

#[derive(Args, Debug)]
pub struct ProtocolArgs {
    #[command(flatten)]
    pub channel: DmcInput,
    /// Block length.
    #[arg(long)]
    pub n: usize,
    /// Rate slack epsilon.
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
    /// Protocol variant; defaults to `bsc` with --bsc and `general` with --dmc.
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// Force the size of every shared set.
    #[arg(long)]
    pub zsize: Option<u64>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// `fixed:0110`, `iid:0.5,0.5` or `itc-uniform`; default i.i.d. capacity-achieving.
    #[arg(long)]
    pub source: Option<String>,
    /// With a fixed source, also compare the output histogram with the channel.
    #[arg(long)]
    pub faithfulness: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    /// Include the induced transition table.
    #[arg(long)]
    pub matrix: bool,
}

#[derive(Args, Debug)]
pub struct TranscriptArgs {
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Input string, e.g. `0110` or `0,2,1`.
    #[arg(long)]
    pub x: String,
}

#[derive(Subcommand, Debug)]
pub enum TypicalCmd {
    /// Check the three typical-subspace properties exactly.
    Check(TypicalArgs),
}

#[derive(Args, Debug)]
pub struct TypicalArgs {
    /// Eigenvalues of rho.
    #[arg(long, value_delimiter = ',', required = true)]
    pub probs: Vec<f64>,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
}

/// Exit status for an error: malformed input and bad parameters are usage
/// errors, everything else a computation failure.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::Json(_)
        | Error::Io(_)
        | Error::InvalidParameter(_)
        | Error::InvalidState(_)
        | Error::DimensionMismatch(_)
        | Error::NotComplete { .. } => 2,
        _ => 1,
    }
}

/// Parse `args` (including the program name), run, and return the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match execute(&cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Table1 => emit(out, json!({}), table1()?),
        Command::Capacity(CapacityCmd::Ce(a)) => cmd_ce(a, out, err),
        Command::Sweep(SweepCmd::Ad(a)) => {
            config_to_stderr(err, &json!({ "command": "sweep ad", "p": a.p }))?;
            write_ad_csv(&a.p, out)
        }
        Command::Gaussian(a) => {
            config_to_stderr(
                err,
                &json!({ "command": "gaussian", "S": a.s, "N": a.n, "k": a.k, "with_limit": a.with_limit }),
            )?;
            let grid = GaussianGrid { s: a.s.clone(), n: a.n.clone(), k: a.k.clone() };
            write_sweep_csv(&sweep(&grid)?, a.with_limit, out)
        }
        Command::Rst(RstCmd::Simulate(a)) => cmd_simulate(a, out),
        Command::Rst(RstCmd::VerifyExact(a)) => cmd_verify(a, out),
        Command::Rst(RstCmd::Transcript(a)) => cmd_transcript(a, out),
        Command::Typical(TypicalCmd::Check(a)) => {
            let report = spectrum_report(&a.probs, a.n, a.delta, a.epsilon)?;
            let all_ok = report.bounds_ok.iter().all(|&b| b);
            let mut result = serde_json::to_value(&report)?;
            result["all_ok"] = json!(all_ok);
            emit(out, json!({ "probs": a.probs, "n": a.n, "delta": a.delta, "epsilon": a.epsilon }), result)
        }
    }
}

/// Round every float to the shared number of significant digits.
fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                *v = json!(round_sig(x));
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn emit(out: &mut dyn Write, config: Value, result: Value) -> Result<()> {
    let mut doc = json!({ "config": config, "result": result });
    round_floats(&mut doc);
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)?;
    Ok(())
}

fn config_to_stderr(err: &mut dyn Write, config: &Value) -> Result<()> {
    let mut c = config.clone();
    round_floats(&mut c);
    writeln!(err, "config: {c}")?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct Table1Row {
    channel: &'static str,
    ce: f64,
    ce_table: f64,
    ce_delta: f64,
    /// Holevo information of equiprobable computational-basis inputs.
    c_basis_chi: f64,
    c_table: f64,
    c_delta: f64,
    gap_bound: f64,
    within_tolerance: bool,
}

const TABLE1_TOL: f64 = 5e-4;

pub fn table1() -> Result<Value> {
    let rows = [
        ("noiseless qubit", "noiseless:2", 2.0, 1.0),
        ("50% erasure qubit", "erasure:0.5", 1.0, 0.5),
        ("2/3 depolarizing qubit", "depolarizing:2,0.6666666666666666", 0.2075, 0.0817),
        ("100% dephasing qubit", "dephasing:2", 1.0, 1.0),
    ];
    let mut out = Vec::new();
    for (name, preset, ce_table, c_table) in rows {
        let ch = ChannelSpec::from_preset(preset)?.build()?;
        let r = ce_maximize_with(&ch, &CeOptions::default(), None)?;
        let chi = basis_input_chi(&ch)?;
        let (ce_delta, c_delta) = ((r.value - ce_table).abs(), (chi - c_table).abs());
        out.push(Table1Row {
            channel: name,
            ce: r.value,
            ce_table,
            ce_delta,
            c_basis_chi: chi,
            c_table,
            c_delta,
            gap_bound: r.gap_bound,
            within_tolerance: ce_delta <= TABLE1_TOL && c_delta <= TABLE1_TOL,
        });
    }
    Ok(json!({ "tolerance": TABLE1_TOL, "rows": out }))
}

#[derive(Deserialize)]
struct Observable(#[serde(with = "matrix::json")] ComplexMatrix);

fn cmd_ce(a: &CeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let spec = match (&a.channel.preset, &a.channel.spec) {
        (Some(p), _) => ChannelSpec::from_preset(p)?,
        (None, Some(f)) => read_json(f)?,
        (None, None) => unreachable!("clap enforces one channel source"),
    };
    let ch = spec.build()?;
    let opts = CeOptions { tol: a.tol, max_iters: a.max_iters, initial: None };
    let mut config = json!({ "channel": spec, "tol": a.tol, "max_iters": a.max_iters });

    let every = a.progress.unwrap_or(0);
    let mut report = |p: &FwProgress| {
        if every > 0 && p.iteration % every == 0 {
            let _ = writeln!(err, "iter {} value {} gap {}", p.iteration, fmt_sig(p.value), fmt_sig(p.gap));
        }
        true
    };
    let result: Result<CeResult> = match (&a.observable, a.bound) {
        (Some(f), Some(bound)) => {
            let Observable(h) = read_json(f)?;
            config["observable"] = json!(matrix::json::to_nested(&h));
            config["bound"] = json!(bound);
            let c = EnergyConstraint::new(h, bound)?;
            ce_maximize_constrained(&ch, &c, &opts, Some(&mut report))
        }
        _ => ce_maximize_with(&ch, &opts, Some(&mut report)),
    };
    match result {
        Ok(r) => emit(out, config, serde_json::to_value(&r)?),
        Err(Error::NonConvergence { best }) => {
            // Still print the best iterate so the run is not wasted.
            let mut v = serde_json::to_value(&*best)?;
            v["converged"] = json!(false);
            emit(out, config, v)?;
            Err(Error::NonConvergence { best })
        }
        Err(e) => Err(e),
    }
}

fn write_ad_csv(ps: &[f64], out: &mut dyn Write) -> Result<()> {
    writeln!(out, "p,ce,ch,ratio")?;
    for &p in ps {
        let (ce, _) = ad_ce(p)?;
        let (ch, _) = ad_ch(p)?;
        let ratio = if ch > 0.0 { ce / ch } else { f64::NAN };
        writeln!(out, "{},{},{},{}", fmt_sig(p), fmt_sig(ce), fmt_sig(ch), fmt_sig(ratio))?;
    }
    Ok(())
}

struct Resolved {
    channel: SimChannel,
    cfg: ProtocolConfig,
    config: Value,
}

fn resolve(a: &ProtocolArgs) -> Result<Resolved> {
    let (channel, chan_json) = match (a.channel.bsc, &a.channel.dmc) {
        (Some(p), _) => (SimChannel::Bsc(p), json!({ "bsc": p })),
        (None, Some(f)) => {
            let d: Dmc = read_json(f)?;
            let j = json!({ "dmc": d });
            (SimChannel::Dmc(d), j)
        }
        (None, None) => unreachable!("clap enforces one channel source"),
    };
    let variant = match (a.variant, &channel) {
        (Some(VariantArg::Bsc), _) => Variant::Bsc,
        (Some(VariantArg::General), _) => Variant::General,
        (None, SimChannel::Bsc(_)) => Variant::Bsc,
        (None, SimChannel::Dmc(_)) => Variant::General,
    };
    let mut cfg = ProtocolConfig::new(a.n, a.eps, variant)?;
    cfg.z_size = a.zsize;
    cfg.validate()?;
    let mut config = serde_json::to_value(&cfg)?;
    config["channel"] = chan_json;
    Ok(Resolved { channel, cfg, config })
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let Resolved { channel, cfg, mut config } = resolve(&a.protocol)?;
    let source = match &a.source {
        Some(s) => s.parse::<InputSource>()?,
        None => {
            let dmc = channel.to_dmc()?;
            InputSource::Iid(crate::reverse_shannon::ba_capacity(&dmc, 1e-12)?.1)
        }
    };
    config["seed"] = json!(a.seed);
    config["trials"] = json!(a.trials);
    config["source"] = serde_json::to_value(&source)?;
    let stats = cost_statistics(&channel, &cfg, a.trials, &source, a.seed)?;
    let mut result = serde_json::to_value(&stats)?;
    if a.faithfulness {
        let InputSource::Fixed(x) = &source else {
            return Err(Error::param("--faithfulness needs a fixed:... source"));
        };
        result["faithfulness"] =
            serde_json::to_value(empirical_faithfulness(&channel, &cfg, x, a.trials, a.seed)?)?;
    }
    emit(out, config, result)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<()> {
    let Resolved { channel, cfg, config } = resolve(&a.protocol)?;
    let report = exact_faithfulness_oracle(&channel, &cfg)?;
    let mut result = json!({
        "deviation": report.deviation,
        "combinations": report.combinations,
        "exact": report.deviation <= 1e-12,
    });
    if a.matrix {
        result["induced"] = json!(report.induced);
    }
    emit(out, config, result)
}

fn parse_letters(s: &str) -> Result<Vec<usize>> {
    match s.parse::<InputSource>() {
        Ok(InputSource::Fixed(x)) => Ok(x),
        _ => format!("fixed:{s}").parse::<InputSource>().and_then(|src| match src {
            InputSource::Fixed(x) => Ok(x),
            _ => Err(Error::Parse(format!("bad input string `{s}`"))),
        }),
    }
}

fn cmd_transcript(a: &TranscriptArgs, out: &mut dyn Write) -> Result<()> {
    let Resolved { channel, cfg, mut config } = resolve(&a.protocol)?;
    let x = parse_letters(&a.x)?;
    config["seed"] = json!(a.seed);
    config["x"] = json!(x);
    let shared = SharedRandomness::new(a.seed);
    let mut private = Xoshiro256PlusPlus::seed_from_u64(shared.child("private", 0).seed);
    let (y, tr) = simulate(&channel, &cfg, &shared, &x, &mut private)?;
    let received = receive(&channel, &cfg, &shared, &tr.message)?;
    let result = json!({ "transcript": tr, "receiver_output": received, "consistent": received == y });
    emit(out, config, result)
}
