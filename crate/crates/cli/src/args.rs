use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "fanin",
    version,
    about = "Fan-in and inductance tables for SQUID dendritic trees"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Write to this file instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// JSON run configuration; flags given on the command line take
    /// precedence over its parameters.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fluxon rate versus applied flux for one or more bias currents.
    Response(ResponseArgs),
    /// Activity fraction needed for threshold versus bias and depth.
    Activity(ActivityArgs),
    /// Designed DI output inductance over a fan-in sweep.
    Design(DesignArgs),
    /// Check the minimum active synapse count of a small tree.
    TreeVerify(TreeVerifyArgs),
}

#[derive(Debug, Args)]
pub struct ResponseArgs {
    /// Bias ratios Ib/Ic, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.7,0.9")]
    pub bias: Vec<f64>,
    /// Applied flux range in Φ0, `start:end`.
    #[arg(long, value_parser = parse_span, default_value = "0:2")]
    pub range: (f64, f64),
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    /// Junction critical current in µA.
    #[arg(long = "ic-ua", default_value_t = 300.0)]
    pub ic_ua: f64,
    /// Stewart-McCumber parameter; 0 is overdamped.
    #[arg(long, default_value_t = 0.0)]
    pub beta_c: f64,
}

#[derive(Debug, Args)]
pub struct ActivityArgs {
    /// Explicit bias ratios; overrides `--bias-range`.
    #[arg(long, value_delimiter = ',')]
    pub bias: Option<Vec<f64>>,
    #[arg(long, value_parser = parse_span, default_value = "0.5:1")]
    pub bias_range: (f64, f64),
    #[arg(long, default_value_t = 51)]
    pub points: usize,
    /// Tree depths H, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    pub depths: Vec<u32>,
    /// Round to whole inputs per node, `p = ceil(n·f)`; needs `--fan-in`.
    #[arg(long, requires = "fan_in")]
    pub integer: bool,
    #[arg(long)]
    pub fan_in: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DesignMode {
    Collection,
    #[value(name = "no_collection", alias = "no-collection")]
    NoCollection,
    Sfq,
    #[value(name = "vary_ic", alias = "vary-ic")]
    VaryIc,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[arg(long, value_enum, default_value_t = DesignMode::Collection)]
    pub mode: DesignMode,
    /// JSON design file in SI units (`"units": "SI"`).
    #[arg(long)]
    pub design_file: Option<PathBuf>,
    /// Fan-in values: comma separated integers or inclusive `a:b` spans.
    #[arg(long = "n", value_parser = parse_counts, default_value = "2:100")]
    pub n: Counts,
    /// Coupling factor; sets both k1 and k2 in collection mode.
    #[arg(long)]
    pub k: Option<f64>,
    /// Shared (or DR) junction critical current in µA.
    #[arg(long = "ic-ua")]
    pub ic_ua: Option<f64>,
    /// DI junction critical current in µA (vary_ic mode).
    #[arg(long = "ic-di-ua")]
    pub ic_di_ua: Option<f64>,
    #[arg(long = "l-dc1-ph")]
    pub l_dc1_ph: Option<f64>,
    #[arg(long = "l-dc3-ph")]
    pub l_dc3_ph: Option<f64>,
    /// Check this DI output coil against the flux cap instead of solving
    /// for it (collection mode).
    #[arg(long = "l-di2-ph")]
    pub l_di2_ph: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Use the single-flux-quantum input rule in vary_ic mode.
    #[arg(long)]
    pub sfq: bool,
    /// Feasibility report path; defaults to `<output>.report.json`.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyMode {
    Exhaustive,
    Constructive,
    Dynamical,
}

#[derive(Debug, Args)]
pub struct TreeVerifyArgs {
    pub n: u64,
    #[arg(id = "H", value_name = "H")]
    pub h: u32,
    pub bias: f64,
    #[arg(long, value_enum, default_value_t = VerifyMode::Exhaustive)]
    pub mode: VerifyMode,
    /// Include per-node flux and rates in the report.
    #[arg(long)]
    pub snapshot: bool,
}

fn parse_span(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected start:end, got `{s}`"))?;
    let a: f64 = a.trim().parse().map_err(|e| format!("bad start `{a}`: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("bad end `{b}`: {e}"))?;
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(format!("range `{s}` must be finite with start <= end"));
    }
    Ok((a, b))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counts(pub Vec<u64>);

fn parse_counts(s: &str) -> Result<Counts, String> {
    let mut out = Vec::new();
    for item in s.split(',') {
        let item = item.trim();
        match item.split_once(':') {
            Some((a, b)) => {
                let a: u64 = a.parse().map_err(|e| format!("bad count `{a}`: {e}"))?;
                let b: u64 = b.parse().map_err(|e| format!("bad count `{b}`: {e}"))?;
                if b < a || b - a > 1_000_000 {
                    return Err(format!("span `{item}` is empty or too long"));
                }
                out.extend(a..=b);
            }
            None => out.push(item.parse().map_err(|e| format!("bad count `{item}`: {e}"))?),
        }
    }
    Ok(Counts(out))
}
