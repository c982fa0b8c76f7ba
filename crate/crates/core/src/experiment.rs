//! Experiment orchestration for the command-line tool: a config type per
//! subcommand, deterministic trial seeding, decay sweeps over the standard
//! code families, and CSV emission.
//!
//! Reproducibility contract: the config and the master seed determine every
//! output byte. Each trial seeds its own generator from (seed, stream salt,
//! trial index) and contributes one indicator to a commutative sum, so the
//! thread count cannot change any count. Wall-clock times are reported in
//! summaries and [`TrialRow`]s but stay out of the CSV for the same reason.

use crate::bcast::{sample_tuple, BcastChannelCode, BssCode, COMPONENT_NAMES, RECEIVER_SETS};
use crate::capacity::{
    cma_sum_capacity, extreme_cells, gd_upper_bound, nsma_sum_capacity, InputDepChannel,
};
use crate::channel::{
    transmit_additive, transmit_broadcast, transmit_erasure, transmit_mac, ChannelSpec,
    Correlation, MacOutput,
};
use crate::error::Error;
use crate::gf2::BitVector;
use crate::info::{
    binary_entropy, count_typical, joint_entropy, Pmf, TypicalityParams, ENUMERATION_CAP,
};
use crate::mac::{sample_pair, MacChannelCode, MacJointCode, MacSourceCode, LIST_CAP};
use crate::network::{example1_feasibility, example2_rates, example3_rates, RateComparison};
use crate::point::{ceil_rate, JointCode, LinearChannelCode, LinearSourceCode};
use crate::sysmac::{
    build_optimal_code, bursty_code_rate, region_code_rate, RedundancyAt, Region,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

/// Size sanity bound for rank-decoded blocks; list decoders cap far lower.
const MAX_BLOCK: usize = 1 << 14;

/// Budget for decoders that walk an affine solution set. Two bits under
/// their 2^24 assert, so a rank-deficient draw cannot push past it.
const SCAN_LIMIT_BITS: usize = 22;

// Stream salts keep unrelated experiments off shared generator streams.
const SALT_DECAY: u64 = 0x44454341;
const SALT_P2P: u64 = 0x503250;
const SALT_MAC: u64 = 0x4D4143;
const SALT_BCAST: u64 = 0x424353;
const SALT_PUNEQUAL: u64 = 0x50554E;
const SALT_NET: u64 = 0x4E4554;

/// SplitMix64 finalizer, a bijection on u64 with full avalanche.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The generator for one trial, decoupled from every other trial's stream.
fn trial_rng(seed: u64, salt: u64, index: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(mix64(seed ^ mix64(salt ^ mix64(index))))
}

/// One decode attempt under a fresh random code; Ok(true) means it erred.
type Trial = Box<dyn Fn(&mut ChaCha12Rng) -> Result<bool, Error> + Sync + Send>;

fn pool(threads: usize) -> Result<rayon::ThreadPool, Error> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))
}

/// Error count over `trials` runs of `trial`, each on its own generator.
/// The sum is commutative, so any thread count produces the same count.
fn run_trials(
    trials: usize,
    threads: usize,
    seed: u64,
    salt: u64,
    trial: &(dyn Fn(&mut ChaCha12Rng) -> Result<bool, Error> + Sync + Send),
) -> Result<usize, Error> {
    let one = |i: usize| trial(&mut trial_rng(seed, salt, i as u64));
    if threads <= 1 {
        let mut errors = 0;
        for i in 0..trials {
            errors += one(i)? as usize;
        }
        return Ok(errors);
    }
    pool(threads)?.install(|| {
        (0..trials)
            .into_par_iter()
            .try_fold(|| 0usize, |acc, i| one(i).map(|e| acc + e as usize))
            .try_reduce(|| 0, |a, b| Ok(a + b))
    })
}

fn cap_err() -> Error {
    Error::EnumerationTooLarge {
        limit: ENUMERATION_CAP,
    }
}

fn scan_check(bits: usize) -> Result<(), Error> {
    if bits > SCAN_LIMIT_BITS {
        return Err(cap_err());
    }
    Ok(())
}

fn check_rate(name: &str, r: f64) -> Result<(), Error> {
    if !r.is_finite() || r <= 0.0 || r > 1.0 {
        return Err(Error::invalid(format!("{name} {r} outside (0, 1]")));
    }
    Ok(())
}

/// CSV cell format for floats: 12 significant digits, locale-free.
fn csv_float(x: f64) -> String {
    format!("{x:.11e}")
}

/// Summary and echo format: rounded to 9 decimals, shortest round-trip.
fn pretty_float(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let r = (x * 1e9).round() / 1e9;
    (if r == 0.0 { 0.0 } else { r }).to_string()
}

fn csv_cell(c: &str) -> String {
    if c.contains(',') || c.contains('"') || c.contains('\n') {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

/// The CLI syntax for a channel spec, with list parameters separated by
/// semicolons so the echo stays a single CSV cell.
fn channel_label(spec: &ChannelSpec) -> String {
    match spec {
        ChannelSpec::Erasure { q1 } => format!("erasure:q={}", pretty_float(*q1)),
        ChannelSpec::Additive { q1 } => format!("additive:q={}", pretty_float(*q1)),
        ChannelSpec::MacErasure { q1 } => format!("macerasure:q={}", pretty_float(*q1)),
        ChannelSpec::MacAdditive { q1 } => format!("macadditive:q={}", pretty_float(*q1)),
        ChannelSpec::MacInputDep { alpha } => format!(
            "macdep:a={}",
            alpha.iter().map(|a| pretty_float(*a)).collect::<Vec<_>>().join(";")
        ),
        ChannelSpec::BroadcastErasure { q1, q2, correlation } => format!(
            "broadcast:q1={};q2={};mode={}",
            pretty_float(*q1),
            pretty_float(*q2),
            match correlation {
                Correlation::Degraded => "degraded",
                Correlation::Independent => "independent",
            }
        ),
    }
}

/// Per-blocklength tally of one experiment sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialRow {
    pub n: usize,
    pub trials: usize,
    pub errors: usize,
    pub error_rate: f64,
    pub wall_ms: u64,
}

/// A finished experiment: echoed configuration, result columns, stringified
/// rows, and a one-line human summary. The CSV is `param.<key>` columns
/// followed by the result columns, with the echo repeated on every row.
#[derive(Clone, Debug)]
pub struct TrialReport {
    pub params: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub summary: String,
}

impl TrialReport {
    pub fn to_csv(&self) -> String {
        let mut head: Vec<String> =
            self.params.iter().map(|(k, _)| format!("param.{k}")).collect();
        head.extend(self.columns.iter().map(|c| c.to_string()));
        let mut out = head.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = self
                .params
                .iter()
                .map(|(_, v)| csv_cell(v))
                .chain(row.iter().map(|c| csv_cell(c)))
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), Error> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

fn rows_report(
    params: Vec<(String, String)>,
    rows: &[TrialRow],
    headline: String,
    trend: Option<bool>,
) -> TrialReport {
    let mut summary = headline;
    let parts: Vec<String> = rows
        .iter()
        .map(|r| format!("n={} rate={} ({} ms)", r.n, pretty_float(r.error_rate), r.wall_ms))
        .collect();
    let _ = write!(summary, " {}", parts.join("; "));
    if let Some(d) = trend {
        let _ = write!(summary, " trend={}", if d { "decreasing" } else { "not-decreasing" });
    }
    TrialReport {
        params,
        columns: vec!["n", "trials", "errors", "error_rate"],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.n.to_string(),
                    r.trials.to_string(),
                    r.errors.to_string(),
                    csv_float(r.error_rate),
                ]
            })
            .collect(),
        summary,
    }
}

/// Runs `make(n)`'s trial at every requested blocklength.
fn sweep_rows(
    ns: &[usize],
    trials: usize,
    threads: usize,
    seed: u64,
    salt: u64,
    mut make: impl FnMut(usize) -> Result<Trial, Error>,
) -> Result<Vec<TrialRow>, Error> {
    if ns.is_empty() {
        return Err(Error::invalid("need at least one blocklength"));
    }
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        if n == 0 {
            return Err(Error::invalid("blocklength must be positive"));
        }
        if n > MAX_BLOCK {
            return Err(Error::invalid(format!(
                "blocklength {n} over the sanity bound {MAX_BLOCK}"
            )));
        }
        let trial = make(n)?;
        let start = Instant::now();
        let errors = run_trials(trials, threads, seed, salt ^ ((n as u64) << 20), trial.as_ref())?;
        rows.push(TrialRow {
            n,
            trials,
            errors,
            error_rate: errors as f64 / trials as f64,
            wall_ms: start.elapsed().as_millis() as u64,
        });
    }
    Ok(rows)
}

// === Trial builders =======================================================
//
// Every builder draws a fresh random code inside the trial, so the error
// rate averages over both the code ensemble and the channel realization.

/// Compression roundtrip at the given rate for a Bernoulli(p1) source.
fn source_trial(n: usize, rate: f64, p1: f64, eps: f64) -> Result<Trial, Error> {
    check_rate("rate", rate)?;
    // The decoder walks the description's fiber.
    scan_check(n.saturating_sub(ceil_rate(n, rate)))?;
    let src = Pmf::bernoulli(p1)?;
    Ok(Box::new(move |rng| {
        let code = LinearSourceCode::random(n, rate, src.clone(), eps, rng)?;
        let u = BitVector::bernoulli(n, p1, rng);
        Ok(code.decode(&code.encode(&u)) != Ok(u))
    }))
}

/// Channel-coding roundtrip over a single-user erasure or additive channel.
fn channel_trial(n: usize, rate: f64, channel: &ChannelSpec, eps: f64) -> Result<Trial, Error> {
    check_rate("rate", rate)?;
    let k = ceil_rate(n, rate);
    match *channel {
        ChannelSpec::Erasure { q1 } => {
            // The noise pmf is inert on the rank path.
            let noise = Pmf::bernoulli(0.0)?;
            Ok(Box::new(move |rng| {
                let code = LinearChannelCode::build_sized(n, k, noise.clone(), eps, rng)?;
                let m = BitVector::random(k, rng);
                let (y, _) = transmit_erasure(&code.encode(&m), q1, rng);
                Ok(code.decode_erasure(&y) != Ok(m))
            }))
        }
        ChannelSpec::Additive { q1 } => {
            // Syndrome decoding walks the 2^k coset of the parity solve.
            scan_check(k)?;
            let noise = Pmf::bernoulli(q1)?;
            Ok(Box::new(move |rng| {
                let code = LinearChannelCode::build_sized(n, k, noise.clone(), eps, rng)?;
                let m = BitVector::random(k, rng);
                let (y, _) = transmit_additive(&code.encode(&m), &noise, rng);
                Ok(code.decode_additive(&y) != Ok(m))
            }))
        }
        ref other => Err(Error::invalid(format!(
            "single-user channel required, got {}",
            channel_label(other)
        ))),
    }
}

/// Uncoded-rate joint roundtrip: source block in, source block out.
fn jscc_trial(n: usize, p1: f64, channel: &ChannelSpec, eps: f64) -> Result<Trial, Error> {
    // A bad erasure draw can push the solve dimension up to n.
    if n > SCAN_LIMIT_BITS + 2 {
        return Err(cap_err());
    }
    let src = Pmf::bernoulli(p1)?;
    match *channel {
        ChannelSpec::Erasure { q1 } => {
            let inert = Pmf::bernoulli(0.0)?;
            Ok(Box::new(move |rng| {
                let code = JointCode::random(n, src.clone(), inert.clone(), eps, rng)?;
                let u = BitVector::bernoulli(n, p1, rng);
                let (y, _) = transmit_erasure(&code.encode(&u), q1, rng);
                Ok(code.decode_erasure(&y) != Ok(u))
            }))
        }
        ChannelSpec::Additive { q1 } => {
            let noise = Pmf::bernoulli(q1)?;
            let tp = TypicalityParams::new(n, eps)?;
            if count_typical(&noise, &tp, ENUMERATION_CAP).is_none() {
                return Err(cap_err());
            }
            Ok(Box::new(move |rng| {
                let code = JointCode::random(n, src.clone(), noise.clone(), eps, rng)?;
                let u = BitVector::bernoulli(n, p1, rng);
                let (y, _) = transmit_additive(&code.encode(&u), &noise, rng);
                Ok(code.decode_additive(&y) != Ok(u))
            }))
        }
        ref other => Err(Error::invalid(format!(
            "single-user channel required, got {}",
            channel_label(other)
        ))),
    }
}

/// Distributed-compression roundtrip for a correlated pair source.
fn sw_trial(n: usize, joint: &Pmf, r1: f64, r2: f64, eps: f64) -> Result<Trial, Error> {
    check_rate("rate1", r1)?;
    check_rate("rate2", r2)?;
    let tp = TypicalityParams::new(n, eps)?;
    // Either the decoder materializes the typical pair list, or it falls
    // back to a walk over both descriptions' unconstrained bits.
    if count_typical(joint, &tp, LIST_CAP).is_none() {
        let free =
            n.saturating_sub(ceil_rate(n, r1)) + n.saturating_sub(ceil_rate(n, r2));
        scan_check(free)?;
    }
    let joint = joint.clone();
    Ok(Box::new(move |rng| {
        let code = MacSourceCode::random(n, r1, r2, joint.clone(), eps, rng)?;
        let (u1, u2) = sample_pair(&joint, n, rng);
        let (v1, v2) = code.encode(&u1, &u2);
        Ok(code.decode(&v1, &v2) != Ok((u1, u2)))
    }))
}

/// Two-sender channel roundtrip; erasure and additive kinds only.
fn mac_channel_trial(
    n: usize,
    r1: f64,
    r2: f64,
    lambda: f64,
    channel: &ChannelSpec,
    eps: f64,
) -> Result<Trial, Error> {
    let spec = channel.clone().into_mac()?;
    if let ChannelSpec::MacAdditive { .. } = spec {
        // The segment layout is arithmetic in (n, r1, r2, lambda), so one
        // probe build exposes the per-segment coset walk sizes.
        let probe =
            MacChannelCode::build(n, r1, r2, lambda, spec.clone(), eps, &mut ChaCha12Rng::seed_from_u64(0))?;
        let (k1, k2) = probe.message_lens();
        scan_check(k1)?;
        scan_check(k2)?;
    }
    Ok(Box::new(move |rng| {
        let code = MacChannelCode::build(n, r1, r2, lambda, spec.clone(), eps, rng)?;
        let (k1, k2) = code.message_lens();
        let m1 = BitVector::random(k1, rng);
        let m2 = BitVector::random(k2, rng);
        let (x1, x2) = code.encode(&m1, &m2);
        let got = match transmit_mac(&x1, &x2, &spec, rng)? {
            MacOutput::Erasure { symbols, .. } => code.decode_erasure(&symbols),
            MacOutput::Additive { y, .. } => code.decode_additive(&y),
        };
        Ok(got != Ok((m1, m2)))
    }))
}

/// Joint roundtrip of a correlated pair over a two-sender channel.
fn mac_jscc_trial(n: usize, joint: &Pmf, channel: &ChannelSpec, eps: f64) -> Result<Trial, Error> {
    let spec = channel.clone().into_mac()?;
    let noise = match spec {
        ChannelSpec::MacErasure { .. } => Pmf::bernoulli(0.0)?,
        ChannelSpec::MacAdditive { q1 } => Pmf::bernoulli(q1)?,
        _ => {
            return Err(Error::invalid(
                "joint decoding wants iid channel noise; input-dependent kinds have none",
            ))
        }
    };
    let tp = TypicalityParams::new(n, eps)?;
    if count_typical(joint, &tp, LIST_CAP).is_none() {
        return Err(cap_err());
    }
    let joint = joint.clone();
    Ok(Box::new(move |rng| {
        let code = MacJointCode::random(n, joint.clone(), noise.clone(), eps, rng)?;
        let (u1, u2) = sample_pair(&joint, n, rng);
        let (x1, x2) = code.encode(&u1, &u2);
        let got = match transmit_mac(&x1, &x2, &spec, rng)? {
            MacOutput::Erasure { symbols, .. } => code.decode_erasure(&symbols),
            MacOutput::Additive { y, .. } => code.decode_additive(&y),
        };
        Ok(got != Ok((u1, u2)))
    }))
}

/// Seven-description roundtrip: every receiver must recover its four
/// components exactly.
fn bss_trial(n: usize, rates: [f64; 7], joint: &Pmf, eps: f64) -> Result<Trial, Error> {
    if joint.alphabet_size() != 128 {
        return Err(Error::invalid("tuple source wants a 128-ary pmf"));
    }
    for r in rates {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::invalid(format!("description rate {r} must be finite and nonnegative")));
        }
    }
    let joint = joint.clone();
    Ok(Box::new(move |rng| {
        let code = BssCode::random(n, &rates, joint.clone(), eps, rng)?;
        let u = sample_tuple(&joint, n, rng);
        let v = code.encode(&u);
        let ok = (1..=3).all(|rec| match code.decode(rec, &v) {
            Ok(blocks) => (0..4).all(|k| blocks[k] == u[RECEIVER_SETS[rec - 1][k]]),
            Err(_) => false,
        });
        Ok(!ok)
    }))
}

/// Two-receiver degraded-erasure roundtrip. A positive `r0` marks that many
/// tail bits of message 2 as common; receiver 1 must recover them too.
fn bcast_channel_trial(
    n: usize,
    r1: f64,
    r2: f64,
    q1: f64,
    q2: f64,
    r0: f64,
) -> Result<Trial, Error> {
    check_rate("rate1", r1)?;
    check_rate("rate2", r2)?;
    if !r0.is_finite() || r0 < 0.0 {
        return Err(Error::invalid(format!("common rate {r0} must be finite and nonnegative")));
    }
    if r0 > 0.0 {
        crate::bcast::common_info_shift(r1, r2, r0)?;
    }
    let spec = ChannelSpec::BroadcastErasure {
        q1,
        q2,
        correlation: Correlation::Degraded,
    };
    spec.validate()?;
    Ok(Box::new(move |rng| {
        let code = BcastChannelCode::build_timeshare(n, r1, r2, q1, q2, rng)?;
        let (_, k2) = code.message_lens();
        let m1 = BitVector::random(code.message_lens().0, rng);
        let m2 = BitVector::random(k2, rng);
        let out = transmit_broadcast(&code.encode(&m1, &m2), &spec, rng)?;
        let ok1 = code.decode_own(1, &out.y1).is_ok_and(|d| d == m1);
        let ok2 = code.decode_own(2, &out.y2).is_ok_and(|d| d == m2);
        // A fractional r0 can round past m2's floored length; clamp.
        let k0 = ceil_rate(n, r0).min(k2);
        let common_ok = k0 == 0
            || match code.decode_both(&out.y1) {
                Ok((_, d2)) => (k2 - k0..k2).all(|i| d2.get(i) == m2.get(i)),
                Err(_) => false,
            };
        Ok(!(ok1 && ok2 && common_ok))
    }))
}

// === Decay families =======================================================

// Canonical decay scenarios. The margin shifts each family's operating
// point off its feasibility boundary: positive margins land inside, so
// errors must decay with blocklength; negative margins land outside.
const SOURCE_P1: f64 = 0.11;
const SOURCE_EPS: f64 = 0.3;
const ERASURE_Q: f64 = 0.3;
const CHANNEL_EPS: f64 = 0.2;
const ADDITIVE_Q: f64 = 0.05;
const ADDITIVE_EPS: f64 = 0.15;
const JSCC_EPS: f64 = 0.25;
const PAIR_JOINT: [f64; 4] = [0.45, 0.05, 0.05, 0.45];
const PAIR_EPS: f64 = 0.3;
const MAC_Q: f64 = 0.2;
const MAC_LAMBDA: f64 = 0.5;
const MAC_EPS: f64 = 0.3;
const BCAST_Q1: f64 = 0.2;
const BCAST_Q2: f64 = 0.4;

/// All mass on the fully shared tuple component, which the symbol packing
/// places at bit zero.
fn lone_common() -> Pmf {
    let mut probs = vec![0.0; 128];
    probs[0] = 1.0 - SOURCE_P1;
    probs[1] = SOURCE_P1;
    Pmf::new(probs).expect("fixed distribution sums to one")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CodeFamily {
    /// Compression of Bernoulli(0.11) at rate H + margin.
    Source,
    /// Erasure channel q = 0.3 at rate (1 - q) - margin.
    Erasure,
    /// Noiseless channel at rate 1 - margin; positive margins never err.
    Clean,
    /// Additive Bernoulli(0.05) noise at rate (1 - H(noise)) - margin.
    Additive,
    /// Joint source-channel: Bernoulli(0.11) source over an erasure channel
    /// with q = (1 - H(source)) - margin.
    Jscc,
    /// Distributed pair compression at symmetric rate H(pair)/2 + margin.
    PairSource,
    /// Time-shared two-sender erasure channel, q = 0.2, sum rate
    /// (1 - q) - margin split evenly.
    MacTimeShare,
    /// Seven-description source with only the shared component alive,
    /// described at rate H + margin.
    BssCommon,
    /// Degraded erasure broadcast (q1, q2) = (0.2, 0.4) at the rate pair
    /// (1 - margin) * 12/11 * (0.4, 0.25), which sits on the time-sharing
    /// boundary at margin zero.
    BcastTimeShare,
}

impl CodeFamily {
    pub const ALL: [CodeFamily; 9] = [
        CodeFamily::Source,
        CodeFamily::Erasure,
        CodeFamily::Clean,
        CodeFamily::Additive,
        CodeFamily::Jscc,
        CodeFamily::PairSource,
        CodeFamily::MacTimeShare,
        CodeFamily::BssCommon,
        CodeFamily::BcastTimeShare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CodeFamily::Source => "source",
            CodeFamily::Erasure => "erasure",
            CodeFamily::Clean => "clean",
            CodeFamily::Additive => "additive",
            CodeFamily::Jscc => "jscc",
            CodeFamily::PairSource => "pairsource",
            CodeFamily::MacTimeShare => "mactimeshare",
            CodeFamily::BssCommon => "bsscommon",
            CodeFamily::BcastTimeShare => "bcasttimeshare",
        }
    }

    /// Largest usable blocklength. List-decoded families must keep their
    /// enumerations under the element cap; the rest get the sanity bound.
    pub fn max_block(self) -> usize {
        match self {
            CodeFamily::Source | CodeFamily::Jscc | CodeFamily::PairSource => 24,
            CodeFamily::BssCommon => 20,
            CodeFamily::Additive => 32,
            _ => MAX_BLOCK,
        }
    }

    fn list_decoded(self) -> bool {
        self.max_block() < MAX_BLOCK
    }
}

impl fmt::Display for CodeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CodeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        CodeFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown code family '{s}'")))
    }
}

fn check_block(family: CodeFamily, n: usize) -> Result<(), Error> {
    if n == 0 {
        return Err(Error::invalid("blocklength must be positive"));
    }
    if n > family.max_block() {
        return Err(if family.list_decoded() {
            cap_err()
        } else {
            Error::invalid(format!(
                "blocklength {n} over the {} family's limit {}",
                family.name(),
                family.max_block()
            ))
        });
    }
    Ok(())
}

fn family_trial(family: CodeFamily, margin: f64, n: usize) -> Result<Trial, Error> {
    match family {
        CodeFamily::Source => {
            source_trial(n, binary_entropy(SOURCE_P1)? + margin, SOURCE_P1, SOURCE_EPS)
        }
        CodeFamily::Erasure => channel_trial(
            n,
            (1.0 - ERASURE_Q) - margin,
            &ChannelSpec::Erasure { q1: ERASURE_Q },
            CHANNEL_EPS,
        ),
        CodeFamily::Clean => {
            channel_trial(n, 1.0 - margin, &ChannelSpec::Erasure { q1: 0.0 }, CHANNEL_EPS)
        }
        CodeFamily::Additive => channel_trial(
            n,
            (1.0 - binary_entropy(ADDITIVE_Q)?) - margin,
            &ChannelSpec::Additive { q1: ADDITIVE_Q },
            ADDITIVE_EPS,
        ),
        CodeFamily::Jscc => {
            let q = (1.0 - binary_entropy(SOURCE_P1)?) - margin;
            if !(0.0..1.0).contains(&q) {
                return Err(Error::invalid(format!(
                    "margin {margin} pushes the erasure rate to {q}, outside [0, 1)"
                )));
            }
            jscc_trial(n, SOURCE_P1, &ChannelSpec::Erasure { q1: q }, JSCC_EPS)
        }
        CodeFamily::PairSource => {
            let joint = Pmf::new(PAIR_JOINT.to_vec())?;
            let r = joint_entropy(&joint) / 2.0 + margin;
            sw_trial(n, &joint, r, r, PAIR_EPS)
        }
        CodeFamily::MacTimeShare => {
            let r = ((1.0 - MAC_Q) - margin) / 2.0;
            mac_channel_trial(
                n,
                r,
                r,
                MAC_LAMBDA,
                &ChannelSpec::MacErasure { q1: MAC_Q },
                MAC_EPS,
            )
        }
        CodeFamily::BssCommon => {
            let mut rates = [0.0; 7];
            rates[6] = binary_entropy(SOURCE_P1)? + margin;
            check_rate("rate", rates[6])?;
            bss_trial(n, rates, &lone_common(), SOURCE_EPS)
        }
        CodeFamily::BcastTimeShare => {
            // (0.4/0.8) + (0.25/0.6) = 11/12, so 12/11 rescales the base
            // pair onto the boundary before the margin backs it off.
            let s = (1.0 - margin) * (12.0 / 11.0);
            bcast_channel_trial(n, 0.4 * s, 0.25 * s, BCAST_Q1, BCAST_Q2, 0.0)
        }
    }
}

/// Error rates of one code family across blocklengths.
#[derive(Clone, Debug)]
pub struct DecayReport {
    pub family: CodeFamily,
    pub margin: f64,
    pub rows: Vec<TrialRow>,
    /// Strictly decreasing rates, except that a floor of exact zeros may
    /// extend flat.
    pub decreasing: bool,
}

/// Error rate of the family's scenario at each blocklength, with a fresh
/// random code every trial.
pub fn decay_sweep(
    family: CodeFamily,
    margin: f64,
    ns: &[usize],
    trials: usize,
    seed: u64,
    threads: usize,
) -> Result<DecayReport, Error> {
    if !margin.is_finite() {
        return Err(Error::invalid(format!("margin {margin} must be finite")));
    }
    let salt = SALT_DECAY ^ ((family as u64) << 8);
    let rows = sweep_rows(ns, trials, threads, seed, salt, |n| {
        check_block(family, n)?;
        family_trial(family, margin, n)
    })?;
    let decreasing = rows.windows(2).all(|w| {
        w[1].error_rate < w[0].error_rate
            || (w[0].error_rate == 0.0 && w[1].error_rate == 0.0)
    });
    Ok(DecayReport {
        family,
        margin,
        rows,
        decreasing,
    })
}

// === Configs and runners ==================================================

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum P2pKind {
    Source,
    Channel,
    Jscc,
}

impl P2pKind {
    pub fn name(self) -> &'static str {
        match self {
            P2pKind::Source => "source",
            P2pKind::Channel => "channel",
            P2pKind::Jscc => "jscc",
        }
    }
}

impl FromStr for P2pKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "source" => Ok(P2pKind::Source),
            "channel" => Ok(P2pKind::Channel),
            "jscc" => Ok(P2pKind::Jscc),
            other => Err(Error::invalid(format!("unknown point-to-point kind '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MacKind {
    Sw,
    Channel,
    Jscc,
}

impl MacKind {
    pub fn name(self) -> &'static str {
        match self {
            MacKind::Sw => "sw",
            MacKind::Channel => "channel",
            MacKind::Jscc => "jscc",
        }
    }
}

impl FromStr for MacKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "sw" => Ok(MacKind::Sw),
            "channel" => Ok(MacKind::Channel),
            "jscc" => Ok(MacKind::Jscc),
            other => Err(Error::invalid(format!("unknown multiple-access kind '{other}'"))),
        }
    }
}

/// One subcommand's resolved arguments.
#[derive(Clone, Debug)]
pub enum Command {
    CapacityGap {
        alpha: [f64; 4],
    },
    CapacityPUnequal,
    CapacityGdMax {
        grid: usize,
    },
    SysmacBuild {
        na: usize,
        nb: usize,
        exhaustive: bool,
    },
    SysmacBursty {
        pa: f64,
        pb: f64,
        na: usize,
        nb: usize,
    },
    SysmacSweep {
        max_n: usize,
    },
    P2p {
        kind: P2pKind,
        ns: Vec<usize>,
        rate: f64,
        source: f64,
        channel: ChannelSpec,
        eps: f64,
    },
    Mac {
        kind: MacKind,
        ns: Vec<usize>,
        joint: [f64; 4],
        rates: (f64, f64),
        lambda: f64,
        channel: ChannelSpec,
        eps: f64,
    },
    BroadcastSource {
        ns: Vec<usize>,
        rates: [f64; 7],
        source: Pmf,
        source_label: String,
        eps: f64,
    },
    BroadcastChannel {
        ns: Vec<usize>,
        q1: f64,
        q2: f64,
        rates: (f64, f64),
        r0: f64,
    },
    Net1 {
        joint: [f64; 4],
        caps: [f64; 3],
    },
    Net2 {
        q: f64,
        n: usize,
    },
    Net3 {
        q1: f64,
        q2: f64,
        n: usize,
    },
    Decay {
        family: CodeFamily,
        margin: f64,
        ns: Vec<usize>,
    },
}

/// A fully resolved invocation: the subcommand plus the master seed, trial
/// count, thread count, and optional CSV destination shared by all of them.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub command: Command,
    pub seed: u64,
    pub trials: usize,
    pub threads: usize,
    pub out: Option<PathBuf>,
}

/// Runs the experiment and, when requested, writes its CSV.
pub fn run(config: &ExperimentConfig) -> Result<TrialReport, Error> {
    let (trials, seed, threads) = (config.trials, config.seed, config.threads);
    let report = match &config.command {
        Command::CapacityGap { alpha } => capacity_gap_report(*alpha),
        Command::CapacityPUnequal => punequal_report(trials, seed, threads),
        Command::CapacityGdMax { grid } => gdmax_report(*grid),
        Command::SysmacBuild { na, nb, exhaustive } => sysmac_build_report(*na, *nb, *exhaustive),
        Command::SysmacBursty { pa, pb, na, nb } => sysmac_bursty_report(*pa, *pb, *na, *nb),
        Command::SysmacSweep { max_n } => sysmac_sweep_report(*max_n),
        Command::P2p { kind, ns, rate, source, channel, eps } => {
            p2p_report(*kind, ns, *rate, *source, channel, *eps, trials, seed, threads)
        }
        Command::Mac { kind, ns, joint, rates, lambda, channel, eps } => {
            mac_report(*kind, ns, *joint, *rates, *lambda, channel, *eps, trials, seed, threads)
        }
        Command::BroadcastSource { ns, rates, source, source_label, eps } => {
            broadcast_source_report(ns, *rates, source, source_label, *eps, trials, seed, threads)
        }
        Command::BroadcastChannel { ns, q1, q2, rates, r0 } => {
            broadcast_channel_report(ns, *q1, *q2, *rates, *r0, trials, seed, threads)
        }
        Command::Net1 { joint, caps } => net1_report(*joint, *caps),
        Command::Net2 { q, n } => net2_report(*q, *n, trials, seed),
        Command::Net3 { q1, q2, n } => net3_report(*q1, *q2, *n, trials, seed),
        Command::Decay { family, margin, ns } => {
            decay_report(*family, *margin, ns, trials, seed, threads)
        }
    }?;
    if let Some(path) = &config.out {
        report.write_csv(path)?;
    }
    Ok(report)
}

fn capacity_gap_report(alpha: [f64; 4]) -> Result<TrialReport, Error> {
    let ch = InputDepChannel::new(alpha)?;
    let cma = cma_sum_capacity(&ch);
    let nsma = nsma_sum_capacity(&ch);
    let gap = cma.value - nsma.value;
    Ok(TrialReport {
        params: vec![
            ("alpha00".into(), pretty_float(alpha[0])),
            ("alpha01".into(), pretty_float(alpha[1])),
            ("alpha10".into(), pretty_float(alpha[2])),
            ("alpha11".into(), pretty_float(alpha[3])),
        ],
        columns: vec!["cma", "nsma", "gap"],
        rows: vec![vec![csv_float(cma.value), csv_float(nsma.value), csv_float(gap)]],
        summary: format!(
            "cma={} nsma={} gap={}",
            pretty_float(cma.value),
            pretty_float(nsma.value),
            pretty_float(gap)
        ),
    })
}

fn punequal_report(trials: usize, seed: u64, threads: usize) -> Result<TrialReport, Error> {
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    // Tally slots: the four diagonal (min, max) placements, then "equal".
    let tally = |i: usize| -> Result<[u64; 5], Error> {
        let mut rng = trial_rng(seed, SALT_PUNEQUAL, i as u64);
        let alpha = [
            rng.random::<f64>(),
            rng.random::<f64>(),
            rng.random::<f64>(),
            rng.random::<f64>(),
        ];
        let ch = InputDepChannel::new(alpha)?;
        let mut t = [0u64; 5];
        let slot = match extreme_cells(&ch) {
            Some((0, 3)) => 0,
            Some((3, 0)) => 1,
            Some((1, 2)) => 2,
            Some((2, 1)) => 3,
            Some(_) => unreachable!("extreme cells are always diagonal"),
            None => 4,
        };
        t[slot] = 1;
        Ok(t)
    };
    let add = |mut a: [u64; 5], b: [u64; 5]| {
        for k in 0..5 {
            a[k] += b[k];
        }
        a
    };
    let counts = if threads <= 1 {
        let mut acc = [0u64; 5];
        for i in 0..trials {
            acc = add(acc, tally(i)?);
        }
        acc
    } else {
        pool(threads)?.install(|| {
            (0..trials)
                .into_par_iter()
                .try_fold(|| [0u64; 5], |acc, i| tally(i).map(|t| add(acc, t)))
                .try_reduce(|| [0u64; 5], |a, b| Ok(add(a, b)))
        })?
    };
    let frac = |c: u64| c as f64 / trials as f64;
    let p = frac(counts[0] + counts[1] + counts[2] + counts[3]);
    let e: Vec<f64> = counts[..4].iter().map(|&c| frac(c)).collect();
    Ok(TrialReport {
        params: vec![("trials".into(), trials.to_string()), ("seed".into(), seed.to_string())],
        columns: vec!["p_unequal", "e1", "e2", "e3", "e4"],
        rows: vec![vec![
            csv_float(p),
            csv_float(e[0]),
            csv_float(e[1]),
            csv_float(e[2]),
            csv_float(e[3]),
        ]],
        summary: format!(
            "p_unequal={} e1={} e2={} e3={} e4={}",
            pretty_float(p),
            pretty_float(e[0]),
            pretty_float(e[1]),
            pretty_float(e[2]),
            pretty_float(e[3])
        ),
    })
}

fn gdmax_report(grid: usize) -> Result<TrialReport, Error> {
    if grid == 0 {
        return Err(Error::invalid("grid needs at least one step"));
    }
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..=grid {
        for j in 0..=grid {
            let a = i as f64 / grid as f64;
            let b = j as f64 / grid as f64;
            let g = gd_upper_bound(a, b)?;
            if g > best.0 {
                best = (g, a, b);
            }
        }
    }
    Ok(TrialReport {
        params: vec![("grid".into(), grid.to_string())],
        columns: vec!["max_gd", "alpha", "beta"],
        rows: vec![vec![csv_float(best.0), csv_float(best.1), csv_float(best.2)]],
        summary: format!(
            "max_gd={} at alpha={} beta={}",
            pretty_float(best.0),
            pretty_float(best.1),
            pretty_float(best.2)
        ),
    })
}

fn bits_of(value: u64, len: usize) -> BitVector {
    let mut v = BitVector::zeros(len);
    for i in 0..len {
        if (value >> i) & 1 == 1 {
            v.set(i, true);
        }
    }
    v
}

fn sysmac_build_report(na: usize, nb: usize, exhaustive: bool) -> Result<TrialReport, Error> {
    let code = build_optimal_code(na, nb)?;
    let p = code.params();
    let rate = code.code_rate();
    let (ok_cell, summary) = if exhaustive {
        if na + nb > 24 {
            return Err(cap_err());
        }
        let all_ok = (0..1u64 << na).all(|av| {
            (0..1u64 << nb).all(|bv| {
                let a = bits_of(av, na);
                let b = bits_of(bv, nb);
                code.decode(&code.encode(&a, &b)) == (a, b)
            })
        });
        (all_ok.to_string(), format!("rate={rate} ok={all_ok}"))
    } else {
        (String::new(), format!("rate={rate}"))
    };
    Ok(TrialReport {
        params: vec![
            ("na".into(), na.to_string()),
            ("nb".into(), nb.to_string()),
            ("exhaustive_check".into(), exhaustive.to_string()),
        ],
        columns: vec!["ma", "mb", "la", "lb", "rate", "ok"],
        rows: vec![vec![
            p.ma.to_string(),
            p.mb.to_string(),
            p.la().to_string(),
            p.lb().to_string(),
            rate.to_string(),
            ok_cell,
        ]],
        summary,
    })
}

fn sysmac_bursty_report(pa: f64, pb: f64, na: usize, nb: usize) -> Result<TrialReport, Error> {
    let (rate, side) = bursty_code_rate(pa, pb, na, nb)?;
    let side_name = match side {
        RedundancyAt::A => "A",
        RedundancyAt::B => "B",
        RedundancyAt::Either => "either",
    };
    Ok(TrialReport {
        params: vec![
            ("pa".into(), pretty_float(pa)),
            ("pb".into(), pretty_float(pb)),
            ("na".into(), na.to_string()),
            ("nb".into(), nb.to_string()),
        ],
        columns: vec!["rate", "redundancy_at"],
        rows: vec![vec![csv_float(rate), side_name.to_string()]],
        summary: format!("rate={} redundancy_at={side_name}", pretty_float(rate)),
    })
}

fn sysmac_sweep_report(max_n: usize) -> Result<TrialReport, Error> {
    if max_n == 0 || max_n > 64 {
        return Err(Error::invalid("information lengths swept up to 64 at most"));
    }
    let mut rows = Vec::new();
    let mut counts = [0usize; 4];
    for na in 1..=max_n {
        for nb in 1..=na {
            for ma in 0..=nb {
                for mb in 0..=na {
                    let rr = region_code_rate(na, nb, ma, mb)?;
                    counts[match rr.region {
                        Region::One => 0,
                        Region::Two => 1,
                        Region::Three => 2,
                        Region::Excluded => 3,
                    }] += 1;
                    rows.push(vec![
                        na.to_string(),
                        nb.to_string(),
                        ma.to_string(),
                        mb.to_string(),
                        rr.region.to_string(),
                        rr.rate.map(|r| r.to_string()).unwrap_or_default(),
                    ]);
                }
            }
        }
    }
    Ok(TrialReport {
        params: vec![("max_n".into(), max_n.to_string())],
        columns: vec!["na", "nb", "ma", "mb", "region", "rate"],
        summary: format!(
            "points={} region1={} region2={} region3={} excluded={}",
            rows.len(),
            counts[0],
            counts[1],
            counts[2],
            counts[3]
        ),
        rows,
    })
}

#[allow(clippy::too_many_arguments)]
fn p2p_report(
    kind: P2pKind,
    ns: &[usize],
    rate: f64,
    source: f64,
    channel: &ChannelSpec,
    eps: f64,
    trials: usize,
    seed: u64,
    threads: usize,
) -> Result<TrialReport, Error> {
    let mut params = vec![("kind".to_string(), kind.name().to_string())];
    match kind {
        P2pKind::Source => {
            params.push(("rate".into(), pretty_float(rate)));
            params.push(("source".into(), pretty_float(source)));
        }
        P2pKind::Channel => {
            params.push(("rate".into(), pretty_float(rate)));
            params.push(("channel".into(), channel_label(channel)));
        }
        P2pKind::Jscc => {
            params.push(("source".into(), pretty_float(source)));
            params.push(("channel".into(), channel_label(channel)));
        }
    }
    params.push(("eps".into(), pretty_float(eps)));
    params.push(("trials".into(), trials.to_string()));
    params.push(("seed".into(), seed.to_string()));
    let salt = SALT_P2P ^ ((kind as u64) << 8);
    let rows = sweep_rows(ns, trials, threads, seed, salt, |n| match kind {
        P2pKind::Source => source_trial(n, rate, source, eps),
        P2pKind::Channel => channel_trial(n, rate, channel, eps),
        P2pKind::Jscc => jscc_trial(n, source, channel, eps),
    })?;
    Ok(rows_report(params, &rows, format!("p2p {}:", kind.name()), None))
}

#[allow(clippy::too_many_arguments)]
fn mac_report(
    kind: MacKind,
    ns: &[usize],
    joint: [f64; 4],
    rates: (f64, f64),
    lambda: f64,
    channel: &ChannelSpec,
    eps: f64,
    trials: usize,
    seed: u64,
    threads: usize,
) -> Result<TrialReport, Error> {
    let pmf = Pmf::new(joint.to_vec())?;
    let (r1, r2) = rates;
    let mut params = vec![("kind".to_string(), kind.name().to_string())];
    if kind != MacKind::Channel {
        for (i, p) in joint.iter().enumerate() {
            params.push((format!("joint{}{}", i / 2, i % 2), pretty_float(*p)));
        }
    }
    if kind != MacKind::Jscc {
        params.push(("rate1".into(), pretty_float(r1)));
        params.push(("rate2".into(), pretty_float(r2)));
    }
    if kind == MacKind::Channel {
        params.push(("lambda".into(), pretty_float(lambda)));
    }
    if kind != MacKind::Sw {
        params.push(("channel".into(), channel_label(channel)));
    }
    params.push(("eps".into(), pretty_float(eps)));
    params.push(("trials".into(), trials.to_string()));
    params.push(("seed".into(), seed.to_string()));
    let salt = SALT_MAC ^ ((kind as u64) << 8);
    let rows = sweep_rows(ns, trials, threads, seed, salt, |n| match kind {
        MacKind::Sw => sw_trial(n, &pmf, r1, r2, eps),
        MacKind::Channel => mac_channel_trial(n, r1, r2, lambda, channel, eps),
        MacKind::Jscc => mac_jscc_trial(n, &pmf, channel, eps),
    })?;
    Ok(rows_report(params, &rows, format!("mac {}:", kind.name()), None))
}

#[allow(clippy::too_many_arguments)]
fn broadcast_source_report(
    ns: &[usize],
    rates: [f64; 7],
    source: &Pmf,
    source_label: &str,
    eps: f64,
    trials: usize,
    seed: u64,
    threads: usize,
) -> Result<TrialReport, Error> {
    let mut params = vec![("kind".to_string(), "source".to_string())];
    for (name, r) in COMPONENT_NAMES.iter().zip(rates) {
        params.push((format!("rate_{name}"), pretty_float(r)));
    }
    params.push(("source".into(), source_label.to_string()));
    params.push(("eps".into(), pretty_float(eps)));
    params.push(("trials".into(), trials.to_string()));
    params.push(("seed".into(), seed.to_string()));
    let rows = sweep_rows(ns, trials, threads, seed, SALT_BCAST, |n| {
        bss_trial(n, rates, source, eps)
    })?;
    Ok(rows_report(params, &rows, "broadcast source:".to_string(), None))
}

#[allow(clippy::too_many_arguments)]
fn broadcast_channel_report(
    ns: &[usize],
    q1: f64,
    q2: f64,
    rates: (f64, f64),
    r0: f64,
    trials: usize,
    seed: u64,
    threads: usize,
) -> Result<TrialReport, Error> {
    let (r1, r2) = rates;
    let params = vec![
        ("kind".to_string(), "channel".to_string()),
        ("q1".into(), pretty_float(q1)),
        ("q2".into(), pretty_float(q2)),
        ("rate1".into(), pretty_float(r1)),
        ("rate2".into(), pretty_float(r2)),
        ("r0".into(), pretty_float(r0)),
        ("trials".into(), trials.to_string()),
        ("seed".into(), seed.to_string()),
    ];
    let rows = sweep_rows(ns, trials, threads, seed, SALT_BCAST ^ (1 << 8), |n| {
        bcast_channel_trial(n, r1, r2, q1, q2, r0)
    })?;
    Ok(rows_report(params, &rows, "broadcast channel:".to_string(), None))
}

fn net1_report(joint: [f64; 4], caps: [f64; 3]) -> Result<TrialReport, Error> {
    let pmf = Pmf::new(joint.to_vec())?;
    let f = example1_feasibility(&pmf, caps[0], caps[1], caps[2])?;
    let mut params = Vec::new();
    for (i, p) in joint.iter().enumerate() {
        params.push((format!("joint{}{}", i / 2, i % 2), pretty_float(*p)));
    }
    params.push(("cap1".into(), pretty_float(caps[0])));
    params.push(("cap2".into(), pretty_float(caps[1])));
    params.push(("cap_shared".into(), pretty_float(caps[2])));
    Ok(TrialReport {
        params,
        columns: vec!["h1", "h2", "h12", "separated", "joint"],
        rows: vec![vec![
            csv_float(f.h1),
            csv_float(f.h2),
            csv_float(f.h12),
            f.separated.to_string(),
            f.joint.to_string(),
        ]],
        summary: format!(
            "h1={} h2={} h12={} separated={} joint={}",
            pretty_float(f.h1),
            pretty_float(f.h2),
            pretty_float(f.h12),
            f.separated,
            f.joint
        ),
    })
}

fn comparison_report(params: Vec<(String, String)>, rc: &RateComparison) -> TrialReport {
    let mut parts = Vec::new();
    let rows = rc
        .entries
        .iter()
        .map(|e| {
            let emp = e.empirical.map(csv_float).unwrap_or_default();
            let mut part = format!("{}: analytic={}", e.strategy, pretty_float(e.analytic));
            if let Some(v) = e.empirical {
                let _ = write!(part, " empirical={}", pretty_float(v));
            }
            parts.push(part);
            vec![e.strategy.to_string(), csv_float(e.analytic), emp]
        })
        .collect();
    TrialReport {
        params,
        columns: vec!["strategy", "analytic", "empirical"],
        rows,
        summary: parts.join("; "),
    }
}

fn net2_report(q: f64, n: usize, trials: usize, seed: u64) -> Result<TrialReport, Error> {
    let mut rng = trial_rng(seed, SALT_NET, 2);
    let rc = example2_rates(q, n, trials, &mut rng)?;
    Ok(comparison_report(
        vec![
            ("example".to_string(), "2".to_string()),
            ("q".into(), pretty_float(q)),
            ("n".into(), n.to_string()),
            ("trials".into(), trials.to_string()),
            ("seed".into(), seed.to_string()),
        ],
        &rc,
    ))
}

fn net3_report(q1: f64, q2: f64, n: usize, trials: usize, seed: u64) -> Result<TrialReport, Error> {
    let mut rng = trial_rng(seed, SALT_NET, 3);
    let rc = example3_rates(q1, q2, n, trials, &mut rng)?;
    Ok(comparison_report(
        vec![
            ("example".to_string(), "3".to_string()),
            ("q1".into(), pretty_float(q1)),
            ("q2".into(), pretty_float(q2)),
            ("n".into(), n.to_string()),
            ("trials".into(), trials.to_string()),
            ("seed".into(), seed.to_string()),
        ],
        &rc,
    ))
}

fn decay_report(
    family: CodeFamily,
    margin: f64,
    ns: &[usize],
    trials: usize,
    seed: u64,
    threads: usize,
) -> Result<TrialReport, Error> {
    let rep = decay_sweep(family, margin, ns, trials, seed, threads)?;
    let params = vec![
        ("family".to_string(), family.name().to_string()),
        ("margin".into(), pretty_float(margin)),
        ("trials".into(), trials.to_string()),
        ("seed".into(), seed.to_string()),
    ];
    Ok(rows_report(
        params,
        &rep.rows,
        format!("decay {} margin={}:", family.name(), pretty_float(margin)),
        Some(rep.decreasing),
    ))
}

// === CLI parsing helpers ==================================================

/// Comma-separated floats, e.g. "0.45,0.05,0.05,0.45".
pub fn parse_probs(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>().map_err(|_| Error::invalid(format!("bad number '{t}'")))
        })
        .collect()
}

/// Comma-separated blocklengths, e.g. "8,12,16".
pub fn parse_ns(s: &str) -> Result<Vec<usize>, Error> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<usize>().map_err(|_| Error::invalid(format!("bad blocklength '{t}'")))
        })
        .collect()
}

/// A Bernoulli parameter in bare ("0.11") or labeled ("p=0.11") form.
pub fn parse_bernoulli_arg(s: &str) -> Result<f64, Error> {
    let t = s.strip_prefix("p=").unwrap_or(s);
    t.parse().map_err(|_| Error::invalid(format!("bad source probability '{s}'")))
}

/// A 128-ary tuple pmf from "(tuple, probability)" lines: seven 0/1 digits
/// in component order, then the probability. Parentheses and commas are
/// optional, blank lines and '#' comments are skipped, unlisted tuples get
/// probability zero, and repeats accumulate.
pub fn parse_tuple_pmf(text: &str) -> Result<Pmf, Error> {
    let mut probs = vec![0.0; 128];
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").replace(['(', ')', ','], " ");
        let mut it = line.split_whitespace();
        let (tuple, prob) = match (it.next(), it.next(), it.next()) {
            (None, ..) => continue,
            (Some(t), Some(p), None) => (t, p),
            _ => {
                return Err(Error::invalid(format!(
                    "line {}: want '<7 bits> <probability>'",
                    ln + 1
                )))
            }
        };
        if tuple.len() != 7 || !tuple.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::invalid(format!(
                "line {}: tuple '{tuple}' is not 7 bits",
                ln + 1
            )));
        }
        let sym = usize::from_str_radix(tuple, 2).expect("checked digits");
        let p: f64 = prob
            .parse()
            .map_err(|_| Error::invalid(format!("line {}: bad probability '{prob}'", ln + 1)))?;
        probs[sym] += p;
    }
    Pmf::new(probs)
}
