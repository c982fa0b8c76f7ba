//! Command-line front end. Every subcommand resolves to an
//! [`ExperimentConfig`], runs through [`gf2lab::experiment::run`], prints the
//! one-line summary, and optionally writes the CSV. Exit codes: 0 on
//! success, 2 on a configuration mistake, 3 when a request would blow an
//! enumeration cap.

use clap::{Args, Parser, Subcommand};
use gf2lab::channel::ChannelSpec;
use gf2lab::experiment::{
    parse_bernoulli_arg, parse_ns, parse_probs, parse_tuple_pmf, run, Command, ExperimentConfig,
    MacKind, P2pKind,
};
use gf2lab::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gf2lab", version, about = "Linear coding experiments over GF(2)")]
struct Cli {
    /// Master seed; the GF2LAB_SEED environment variable supplies the
    /// default, and 0 is used when neither is set.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo trials per configuration.
    #[arg(long, global = true, default_value_t = 1000)]
    trials: usize,
    /// Worker threads for trial loops; never changes the results.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Write the report as CSV to this path.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sum capacities of two-sender channels with input-dependent noise.
    #[command(subcommand)]
    Capacity(CapacityCmd),
    /// Systematic noise-free two-sender codes.
    #[command(subcommand)]
    Sysmac(SysmacCmd),
    /// Single-link compression, channel coding, and joint coding.
    #[command(subcommand)]
    P2p(P2pCmd),
    /// Two-sender source and channel coding.
    #[command(subcommand)]
    Mac(MacCmd),
    /// Multi-receiver source and channel coding.
    #[command(subcommand)]
    Broadcast(BroadcastCmd),
    /// Rate comparisons on small relay networks.
    #[command(subcommand)]
    Net(NetCmd),
    /// Error-rate decay of one code family across blocklengths.
    Decay(DecayArgs),
}

#[derive(Subcommand)]
enum CapacityCmd {
    /// Cooperative and non-cooperative sum capacities and their gap.
    Gap {
        /// Noise probabilities a00,a01,a10,a11 per input pair.
        #[arg(long)]
        alpha: String,
    },
    /// Frequency of unequal sum capacities over uniform random channels.
    Punequal,
    /// Grid maximum of the closed-form gap bound.
    Gdmax {
        /// Grid steps per axis.
        #[arg(long, default_value_t = 256)]
        grid: usize,
    },
}

#[derive(Subcommand)]
enum SysmacCmd {
    /// Build the rate-optimal code for the given information lengths.
    Build {
        #[arg(long)]
        na: usize,
        #[arg(long)]
        nb: usize,
        /// Round-trip every input pair through the decoder.
        #[arg(long)]
        exhaustive_check: bool,
    },
    /// Best code rate when both senders transmit only part of the time.
    Bursty {
        /// Activity probability of sender A.
        #[arg(long)]
        pa: f64,
        /// Activity probability of sender B.
        #[arg(long)]
        pb: f64,
        #[arg(long)]
        na: usize,
        #[arg(long)]
        nb: usize,
    },
    /// Region and rate table over all admissible redundancy choices.
    Sweep {
        /// Largest information length.
        #[arg(long, default_value_t = 6)]
        max_n: usize,
    },
}

#[derive(Args)]
struct P2pArgs {
    /// Blocklengths, comma separated.
    #[arg(long, default_value = "8,12,16")]
    n: String,
    /// Code rate in bits per symbol.
    #[arg(long)]
    rate: Option<f64>,
    /// Source distribution, e.g. p=0.11.
    #[arg(long)]
    source: Option<String>,
    /// Channel, e.g. erasure:q=0.3 or additive:q=0.05.
    #[arg(long)]
    channel: Option<String>,
    /// Typicality slack.
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
}

#[derive(Subcommand)]
enum P2pCmd {
    /// Fixed-rate compression round trips.
    Source(P2pArgs),
    /// Channel-coding round trips.
    Channel(P2pArgs),
    /// Joint source-channel round trips at rate one.
    Jscc(P2pArgs),
}

#[derive(Args)]
struct MacArgs {
    /// Blocklengths, comma separated.
    #[arg(long, default_value = "8,12,16")]
    n: String,
    /// Joint pair pmf p00,p01,p10,p11.
    #[arg(long)]
    joint: Option<String>,
    /// Description or message rates r1,r2.
    #[arg(long)]
    rates: Option<String>,
    /// Time share of sender 1.
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    /// Channel, e.g. macerasure:q=0.2 or macadditive:q=0.05.
    #[arg(long)]
    channel: Option<String>,
    /// Typicality slack.
    #[arg(long, default_value_t = 0.3)]
    eps: f64,
}

#[derive(Subcommand)]
enum MacCmd {
    /// Distributed compression of a correlated pair.
    Sw(MacArgs),
    /// Time-shared channel coding for two senders.
    Channel(MacArgs),
    /// Joint coding of a correlated pair over the channel.
    Jscc(MacArgs),
}

#[derive(Subcommand)]
enum BroadcastCmd {
    /// Seven-description source round trips to three receivers.
    Source {
        /// Blocklengths, comma separated.
        #[arg(long, default_value = "8,12,16")]
        n: String,
        /// Description rates r1,r2,r3,r12,r23,r13,r123.
        #[arg(long)]
        rates: String,
        /// Tuple pmf file of "<7 bits> <probability>" lines.
        #[arg(long, value_name = "FILE")]
        source: PathBuf,
        /// Typicality slack.
        #[arg(long, default_value_t = 0.3)]
        eps: f64,
    },
    /// Two-receiver degraded erasure channel round trips.
    Channel {
        /// Blocklengths, comma separated.
        #[arg(long, default_value = "64,128")]
        n: String,
        /// Erasure probability at the stronger receiver.
        #[arg(long)]
        q1: f64,
        /// Erasure probability at the weaker receiver.
        #[arg(long)]
        q2: f64,
        /// Private message rates r1,r2.
        #[arg(long)]
        rates: String,
        /// Common rate carried in message 2's tail.
        #[arg(long, default_value_t = 0.0)]
        r0: f64,
    },
}

#[derive(Subcommand)]
enum NetCmd {
    /// Separated vs joint feasibility for two correlated sources.
    Example1 {
        /// Pair pmf p00,p01,p10,p11.
        #[arg(long, default_value = "0.445,0.055,0.055,0.445")]
        joint: String,
        /// Link capacities cap1,cap2,cap_shared.
        #[arg(long, default_value = "1,1,1.5")]
        caps: String,
    },
    /// Separated vs end-to-end coding across a two-hop erasure path.
    Example2 {
        /// Per-hop erasure probability.
        #[arg(long)]
        q: f64,
        /// Blocklength for the empirical rate search.
        #[arg(long, default_value_t = 256)]
        n: usize,
    },
    /// Forwarding vs decode-and-reencode at a relay.
    Example3 {
        #[arg(long)]
        q1: f64,
        #[arg(long)]
        q2: f64,
        /// Blocklength for the empirical rate search.
        #[arg(long, default_value_t = 256)]
        n: usize,
    },
}

#[derive(Args)]
struct DecayArgs {
    /// One of: source, erasure, clean, additive, jscc, pairsource,
    /// mactimeshare, bsscommon, bcasttimeshare.
    #[arg(long)]
    family: String,
    /// Signed distance inside the family's feasibility boundary.
    #[arg(long)]
    margin: f64,
    /// Blocklengths, comma separated.
    #[arg(long, default_value = "8,12,16")]
    n: String,
}

fn need<T>(opt: Option<T>, flag: &str) -> Result<T, Error> {
    opt.ok_or_else(|| Error::invalid(format!("missing {flag}")))
}

fn floats<const N: usize>(s: &str, flag: &str) -> Result<[f64; N], Error> {
    <[f64; N]>::try_from(parse_probs(s)?)
        .map_err(|_| Error::invalid(format!("{flag} wants {N} comma-separated values")))
}

fn rate_pair(s: &str) -> Result<(f64, f64), Error> {
    let [r1, r2] = floats::<2>(s, "--rates")?;
    Ok((r1, r2))
}

fn p2p_command(kind: P2pKind, a: &P2pArgs) -> Result<Command, Error> {
    let rate = match kind {
        P2pKind::Jscc => 1.0,
        _ => need(a.rate, "--rate")?,
    };
    let source = match kind {
        P2pKind::Channel => 0.0,
        _ => parse_bernoulli_arg(need(a.source.as_deref(), "--source")?)?,
    };
    let channel = match kind {
        P2pKind::Source => ChannelSpec::Erasure { q1: 0.0 },
        _ => need(a.channel.as_deref(), "--channel")?.parse()?,
    };
    Ok(Command::P2p {
        kind,
        ns: parse_ns(&a.n)?,
        rate,
        source,
        channel,
        eps: a.eps,
    })
}

fn mac_command(kind: MacKind, a: &MacArgs) -> Result<Command, Error> {
    let joint = match kind {
        MacKind::Channel => [0.25; 4],
        _ => floats::<4>(need(a.joint.as_deref(), "--joint")?, "--joint")?,
    };
    let rates = match kind {
        MacKind::Jscc => (1.0, 1.0),
        _ => rate_pair(need(a.rates.as_deref(), "--rates")?)?,
    };
    let channel = match kind {
        MacKind::Sw => ChannelSpec::MacErasure { q1: 0.0 },
        _ => need(a.channel.as_deref(), "--channel")?.parse()?,
    };
    Ok(Command::Mac {
        kind,
        ns: parse_ns(&a.n)?,
        joint,
        rates,
        lambda: a.lambda,
        channel,
        eps: a.eps,
    })
}

fn build_command(cmd: &Cmd) -> Result<Command, Error> {
    Ok(match cmd {
        Cmd::Capacity(CapacityCmd::Gap { alpha }) => Command::CapacityGap {
            alpha: floats::<4>(alpha, "--alpha")?,
        },
        Cmd::Capacity(CapacityCmd::Punequal) => Command::CapacityPUnequal,
        Cmd::Capacity(CapacityCmd::Gdmax { grid }) => Command::CapacityGdMax { grid: *grid },
        Cmd::Sysmac(SysmacCmd::Build { na, nb, exhaustive_check }) => Command::SysmacBuild {
            na: *na,
            nb: *nb,
            exhaustive: *exhaustive_check,
        },
        Cmd::Sysmac(SysmacCmd::Bursty { pa, pb, na, nb }) => Command::SysmacBursty {
            pa: *pa,
            pb: *pb,
            na: *na,
            nb: *nb,
        },
        Cmd::Sysmac(SysmacCmd::Sweep { max_n }) => Command::SysmacSweep { max_n: *max_n },
        Cmd::P2p(P2pCmd::Source(a)) => p2p_command(P2pKind::Source, a)?,
        Cmd::P2p(P2pCmd::Channel(a)) => p2p_command(P2pKind::Channel, a)?,
        Cmd::P2p(P2pCmd::Jscc(a)) => p2p_command(P2pKind::Jscc, a)?,
        Cmd::Mac(MacCmd::Sw(a)) => mac_command(MacKind::Sw, a)?,
        Cmd::Mac(MacCmd::Channel(a)) => mac_command(MacKind::Channel, a)?,
        Cmd::Mac(MacCmd::Jscc(a)) => mac_command(MacKind::Jscc, a)?,
        Cmd::Broadcast(BroadcastCmd::Source { n, rates, source, eps }) => {
            let text = std::fs::read_to_string(source)?;
            Command::BroadcastSource {
                ns: parse_ns(n)?,
                rates: floats::<7>(rates, "--rates")?,
                source: parse_tuple_pmf(&text)?,
                source_label: source.display().to_string(),
                eps: *eps,
            }
        }
        Cmd::Broadcast(BroadcastCmd::Channel { n, q1, q2, rates, r0 }) => {
            Command::BroadcastChannel {
                ns: parse_ns(n)?,
                q1: *q1,
                q2: *q2,
                rates: rate_pair(rates)?,
                r0: *r0,
            }
        }
        Cmd::Net(NetCmd::Example1 { joint, caps }) => Command::Net1 {
            joint: floats::<4>(joint, "--joint")?,
            caps: floats::<3>(caps, "--caps")?,
        },
        Cmd::Net(NetCmd::Example2 { q, n }) => Command::Net2 { q: *q, n: *n },
        Cmd::Net(NetCmd::Example3 { q1, q2, n }) => Command::Net3 {
            q1: *q1,
            q2: *q2,
            n: *n,
        },
        Cmd::Decay(a) => Command::Decay {
            family: a.family.parse()?,
            margin: a.margin,
            ns: parse_ns(&a.n)?,
        },
    })
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let seed = match cli.seed {
        Some(s) => s,
        None => match std::env::var("GF2LAB_SEED") {
            Ok(v) => v
                .parse()
                .map_err(|_| Error::invalid(format!("GF2LAB_SEED '{v}' is not a u64")))?,
            Err(_) => 0,
        },
    };
    Ok(ExperimentConfig {
        command: build_command(&cli.cmd)?,
        seed,
        trials: cli.trials,
        threads: cli.threads,
        out: cli.out.clone(),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match build_config(&cli).and_then(|config| run(&config)) {
        Ok(report) => {
            println!("{}", report.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::EnumerationTooLarge { .. }) {
                eprintln!(
                    "hint: lower --n, or move the rate away from the boundary, \
                     so typical-set scans stay under the cap"
                );
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
