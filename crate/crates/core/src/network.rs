//! Three small erasure-network case studies: two correlated sources feeding
//! one sink over capacitated links, a diamond of two forwarding relays, and
//! a two-hop line whose relay either forwards or re-encodes.
//!
//! Analytic throughputs are closed forms. Empirical ones scan a rate grid
//! downward, Monte Carlo decoding fresh random codes at each candidate,
//! until a rate's failure share drops under [`MC_FAILURE_BAR`].

use crate::channel::{ChannelSpec, ChannelSymbol};
use crate::error::Error;
use crate::gf2::BitVector;
use crate::info::{conditional_entropy, joint_entropy, marginal, Pmf};
use crate::point::{ceil_rate, LinearChannelCode};
use rand::RngCore;

/// Candidate rates in the empirical search are multiples of this pitch.
const RATE_GRID: u32 = 32;

/// A candidate rate counts as achieved when its Monte Carlo failure share
/// stays strictly below this bar.
const MC_FAILURE_BAR: f64 = 0.05;

/// Capacity comparisons accept a boundary match to within this slack; the
/// feasible regions are closed.
const CAP_SLACK: f64 = 1e-9;

/// What an internal node does with the block it receives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelayPolicy {
    /// Pass symbols on unchanged; an erased position stays erased.
    Forward,
    /// Decode the incoming block and re-encode it for the next hop.
    DecodeReencode,
}

/// A line of erasure links. Node 0 transmits, node `i + 1` applies
/// `policies[i]` to what arrives over `stages[i]`, the last node decodes.
#[derive(Clone, Debug)]
pub struct CascadeSpec {
    rates: Vec<f64>,
    policies: Vec<RelayPolicy>,
}

impl CascadeSpec {
    /// Only single-user erasure stages are allowed; `policies` needs one
    /// entry per internal node, so one fewer than there are stages.
    pub fn new(stages: &[ChannelSpec], policies: Vec<RelayPolicy>) -> Result<Self, Error> {
        if stages.is_empty() {
            return Err(Error::invalid("a cascade needs at least one stage"));
        }
        if policies.len() + 1 != stages.len() {
            return Err(Error::invalid(format!(
                "{} stages leave {} internal nodes, got {} relay policies",
                stages.len(),
                stages.len() - 1,
                policies.len()
            )));
        }
        let mut rates = Vec::with_capacity(stages.len());
        for stage in stages {
            stage.validate()?;
            match stage {
                ChannelSpec::Erasure { q1 } => rates.push(*q1),
                other => {
                    return Err(Error::invalid(format!(
                        "cascade stages must be single-user erasure links, got {other:?}"
                    )))
                }
            }
        }
        Ok(CascadeSpec { rates, policies })
    }

    pub fn stage_count(&self) -> usize {
        self.rates.len()
    }

    pub fn erasure_rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn policies(&self) -> &[RelayPolicy] {
        &self.policies
    }

    /// Erasure rate of the line when every relay forwards: a position
    /// survives only by surviving every stage.
    pub fn forwarding_erasure_rate(&self) -> f64 {
        1.0 - self.rates.iter().map(|q| 1.0 - q).product::<f64>()
    }

    /// Symbol-level pass through the whole line. Defined only when every
    /// relay forwards; a decoding relay needs a code per hop and lives in
    /// the rate experiments instead.
    pub fn transmit(
        &self,
        x: &BitVector,
        rng: &mut dyn RngCore,
    ) -> Result<Vec<ChannelSymbol>, Error> {
        if self.policies.contains(&RelayPolicy::DecodeReencode) {
            return Err(Error::invalid(
                "symbol-level transmission is only defined for forwarding relays",
            ));
        }
        let mut symbols: Vec<ChannelSymbol> =
            (0..x.len()).map(|i| ChannelSymbol::Bit(x.get(i))).collect();
        for &q in &self.rates {
            let pattern = BitVector::bernoulli(symbols.len(), q, rng);
            for (i, s) in symbols.iter_mut().enumerate() {
                if pattern.get(i) {
                    *s = ChannelSymbol::Erased;
                }
            }
        }
        Ok(symbols)
    }
}

/// One strategy's throughput in bits per channel use. `empirical` is the
/// largest grid rate whose Monte Carlo failure share stayed under
/// [`MC_FAILURE_BAR`], `None` when the comparison ran without trials.
#[derive(Clone, Debug)]
pub struct RateEntry {
    pub strategy: &'static str,
    pub analytic: f64,
    pub empirical: Option<f64>,
}

/// Named throughputs of the competing strategies on one topology.
#[derive(Clone, Debug)]
pub struct RateComparison {
    pub entries: Vec<RateEntry>,
}

impl RateComparison {
    pub fn get(&self, strategy: &str) -> Option<&RateEntry> {
        self.entries.iter().find(|e| e.strategy == strategy)
    }
}

/// Entropy bookkeeping for the two-source sink. `separated` treats the
/// coordinates as independent bit streams; `joint` only asks for a rate
/// pair compatible with the pair's entropy structure.
#[derive(Clone, Copy, Debug)]
pub struct SourceNetworkFeasibility {
    pub h1: f64,
    pub h2: f64,
    pub h12: f64,
    pub separated: bool,
    pub joint: bool,
}

/// Two terminals observe the coordinates of a correlated bit pair and
/// describe them to a common sink, one over a link of capacity `cap1`, the
/// other over `cap2`, with the sink's total intake capped at `cap_shared`
/// bits per pair. Separated operation compresses each coordinate to its
/// marginal entropy; joint operation needs only rates covering the
/// conditional entropies with a sum covering the pair entropy. Sources
/// whose coordinates are independent are rejected, since the two modes
/// then ask for exactly the same capacities.
pub fn example1_feasibility(
    joint: &Pmf,
    cap1: f64,
    cap2: f64,
    cap_shared: f64,
) -> Result<SourceNetworkFeasibility, Error> {
    if joint.alphabet_size() != 4 {
        return Err(Error::invalid("pair source wants a pmf over four pair symbols"));
    }
    for c in [cap1, cap2, cap_shared] {
        if !c.is_finite() || c < 0.0 {
            return Err(Error::invalid(format!(
                "link capacity {c} must be finite and nonnegative"
            )));
        }
    }
    let h1 = marginal(joint, 2, &[0]).entropy();
    let h2 = marginal(joint, 2, &[1]).entropy();
    let h12 = joint_entropy(joint);
    if h12 >= h1 + h2 - CAP_SLACK {
        return Err(Error::invalid(
            "the coordinates are independent, so joint coding has nothing to save",
        ));
    }
    let h1g2 = conditional_entropy(joint, 1);
    let h2g1 = conditional_entropy(joint, 0);
    let separated = cap1 + CAP_SLACK >= h1
        && cap2 + CAP_SLACK >= h2
        && cap_shared + CAP_SLACK >= h1 + h2;
    // The box [h1g2, cap1] x [h2g1, cap2] meets the band between pair
    // entropy and intake exactly when these four margins hold; the sum of
    // the conditionals never exceeds the pair entropy, so no fifth check.
    let joint_ok = cap1 + CAP_SLACK >= h1g2
        && cap2 + CAP_SLACK >= h2g1
        && cap1 + cap2 + CAP_SLACK >= h12
        && cap_shared + CAP_SLACK >= h12;
    Ok(SourceNetworkFeasibility {
        h1,
        h2,
        h12,
        separated,
        joint: joint_ok,
    })
}

/// Diamond: the source broadcasts each coded symbol to two relays over
/// independent erasure links of rate `q`; both forward over clean links and
/// the sink keeps whichever copy of each position survived. Committing to
/// one relay path tops out at the single-link capacity `1 - q`, while the
/// pair of paths together behaves like one link of rate `q^2`.
pub fn example2_rates(
    q: f64,
    n: usize,
    trials: usize,
    rng: &mut dyn RngCore,
) -> Result<RateComparison, Error> {
    check_erasure_prob(q)?;
    if n == 0 {
        return Err(Error::invalid("blocklength must be positive"));
    }
    let single = CascadeSpec::new(&[ChannelSpec::Erasure { q1: q }], Vec::new())?;
    let (sep_emp, end_emp) = if trials == 0 {
        (None, None)
    } else {
        let sep = largest_passing_rate(n, trials, rng, &mut |k, rng| {
            forwarded_line_trial(k, &single, n, rng)
        })?;
        let end =
            largest_passing_rate(n, trials, rng, &mut |k, rng| diamond_trial(k, n, q, rng))?;
        (Some(sep), Some(end))
    };
    Ok(RateComparison {
        entries: vec![
            RateEntry {
                strategy: "separated",
                analytic: 1.0 - q,
                empirical: sep_emp,
            },
            RateEntry {
                strategy: "end-to-end",
                analytic: 1.0 - q * q,
                empirical: end_emp,
            },
        ],
    })
}

/// Two-hop line: source to relay over erasure `q1`, relay to sink over
/// `q2`. A forwarding relay leaves erasures in place, so the line acts as
/// one link of erasure `1 - (1-q1)(1-q2)`; a decoding relay re-encodes and
/// each hop stands alone, leaving the bottleneck `min(1-q1, 1-q2)`.
pub fn example3_rates(
    q1: f64,
    q2: f64,
    n: usize,
    trials: usize,
    rng: &mut dyn RngCore,
) -> Result<RateComparison, Error> {
    check_erasure_prob(q1)?;
    check_erasure_prob(q2)?;
    if n == 0 {
        return Err(Error::invalid("blocklength must be positive"));
    }
    let line = CascadeSpec::new(
        &[ChannelSpec::Erasure { q1 }, ChannelSpec::Erasure { q1: q2 }],
        vec![RelayPolicy::Forward],
    )?;
    let (fwd_emp, relay_emp) = if trials == 0 {
        (None, None)
    } else {
        let fwd = largest_passing_rate(n, trials, rng, &mut |k, rng| {
            forwarded_line_trial(k, &line, n, rng)
        })?;
        let relay = largest_passing_rate(n, trials, rng, &mut |k, rng| {
            relay_line_trial(k, n, q1, q2, rng)
        })?;
        (Some(fwd), Some(relay))
    };
    Ok(RateComparison {
        entries: vec![
            RateEntry {
                strategy: "forward",
                analytic: (1.0 - q1) * (1.0 - q2),
                empirical: fwd_emp,
            },
            RateEntry {
                strategy: "decode-at-relay",
                analytic: (1.0 - q1).min(1.0 - q2),
                empirical: relay_emp,
            },
        ],
    })
}

fn check_erasure_prob(q: f64) -> Result<(), Error> {
    if q.is_finite() && (0.0..1.0).contains(&q) {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "erasure probability {q} outside [0, 1)"
        )))
    }
}

/// Largest grid rate whose failure share over `trials` attempts stays
/// under [`MC_FAILURE_BAR`]. Scans from the top down; a losing rate is
/// abandoned as soon as its failure count can no longer come in under the
/// bar, so the rates above the knee cost only a few trials each. Returns
/// 0.0 when even the bottom of the grid fails.
fn largest_passing_rate(
    n: usize,
    trials: usize,
    rng: &mut dyn RngCore,
    attempt: &mut dyn FnMut(usize, &mut dyn RngCore) -> Result<bool, Error>,
) -> Result<f64, Error> {
    let reject_at = (trials as f64 * MC_FAILURE_BAR).ceil().max(1.0) as usize;
    for step in (1..=RATE_GRID).rev() {
        let rate = f64::from(step) / f64::from(RATE_GRID);
        let k = ceil_rate(n, rate);
        let mut failures = 0usize;
        for _ in 0..trials {
            if !attempt(k, rng)? {
                failures += 1;
                if failures >= reject_at {
                    break;
                }
            }
        }
        if (failures as f64) < trials as f64 * MC_FAILURE_BAR {
            return Ok(rate);
        }
    }
    Ok(0.0)
}

/// Fresh random code for rank-based erasure decoding; the noise model and
/// window parameter are inert on that path.
fn fresh_erasure_code(
    n: usize,
    message_len: usize,
    rng: &mut dyn RngCore,
) -> Result<LinearChannelCode, Error> {
    LinearChannelCode::build_sized(n, message_len, Pmf::bernoulli(0.0)?, 0.1, rng)
}

/// Bits of `x` as channel symbols with an i.i.d. erasure pattern applied.
fn erase_block(x: &BitVector, q: f64, rng: &mut dyn RngCore) -> Vec<ChannelSymbol> {
    let pattern = BitVector::bernoulli(x.len(), q, rng);
    (0..x.len())
        .map(|i| {
            if pattern.get(i) {
                ChannelSymbol::Erased
            } else {
                ChannelSymbol::Bit(x.get(i))
            }
        })
        .collect()
}

/// One coded block through a forwarding line, fresh code per call.
fn forwarded_line_trial(
    k: usize,
    line: &CascadeSpec,
    n: usize,
    rng: &mut dyn RngCore,
) -> Result<bool, Error> {
    let code = fresh_erasure_code(n, k, rng)?;
    let m = BitVector::random(k, rng);
    let y = line.transmit(&code.encode(&m), rng)?;
    Ok(code.decode_erasure(&y) == Ok(m))
}

/// One coded block over the diamond; a position reaches the sink unless
/// both relays lost it.
fn diamond_trial(k: usize, n: usize, q: f64, rng: &mut dyn RngCore) -> Result<bool, Error> {
    let code = fresh_erasure_code(n, k, rng)?;
    let m = BitVector::random(k, rng);
    let x = code.encode(&m);
    let lost1 = BitVector::bernoulli(n, q, rng);
    let lost2 = BitVector::bernoulli(n, q, rng);
    let y: Vec<ChannelSymbol> = (0..n)
        .map(|i| {
            if lost1.get(i) && lost2.get(i) {
                ChannelSymbol::Erased
            } else {
                ChannelSymbol::Bit(x.get(i))
            }
        })
        .collect();
    Ok(code.decode_erasure(&y) == Ok(m))
}

/// One coded block over the two-hop line with a decoding relay: a fresh
/// code per hop, and the relay's failure fails the whole attempt.
fn relay_line_trial(
    k: usize,
    n: usize,
    q1: f64,
    q2: f64,
    rng: &mut dyn RngCore,
) -> Result<bool, Error> {
    let first = fresh_erasure_code(n, k, rng)?;
    let second = fresh_erasure_code(n, k, rng)?;
    let m = BitVector::random(k, rng);
    let y1 = erase_block(&first.encode(&m), q1, rng);
    let Ok(relayed) = first.decode_erasure(&y1) else {
        return Ok(false);
    };
    let y2 = erase_block(&second.encode(&relayed), q2, rng);
    Ok(second.decode_erasure(&y2) == Ok(m))
}
