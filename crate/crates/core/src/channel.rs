//! Stochastic simulators for the binary channels under study: erasure and
//! additive-noise point-to-point links, their two-sender sum versions, a
//! sum channel whose noise depends on the input pair, and a two-receiver
//! erasure broadcast.
//!
//! Every transmit function hands back the realized noise or erasure pattern
//! next to the output. Tests use it as ground truth; decoders never look.

use crate::error::Error;
use crate::gf2::BitVector;
use crate::info::Pmf;
use rand::Rng;
use std::str::FromStr;

/// One output symbol of an erasure channel.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ChannelSymbol {
    Bit(bool),
    Erased,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Correlation {
    Independent,
    /// Receiver 2 sees receiver 1's output through a second erasure stage,
    /// so erasures at receiver 1 always propagate to receiver 2.
    Degraded,
}

/// Which channel to simulate, with its parameters.
#[derive(Clone, PartialEq, Debug)]
pub enum ChannelSpec {
    Erasure { q1: f64 },
    Additive { q1: f64 },
    MacErasure { q1: f64 },
    MacAdditive { q1: f64 },
    /// Noise on the two-sender sum channel with Pr(z=1 | inputs a,b) read
    /// off alpha = (Pr(y=0|0,0), Pr(y=0|0,1), Pr(y=0|1,0), Pr(y=0|1,1)).
    MacInputDep { alpha: [f64; 4] },
    BroadcastErasure {
        q1: f64,
        q2: f64,
        correlation: Correlation,
    },
}

impl ChannelSpec {
    /// Checks every parameter is a probability and the degraded broadcast
    /// orders its erasure rates.
    pub fn validate(&self) -> Result<(), Error> {
        let check = |v: f64, what: &str| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::invalid(format!("{what} {v} outside [0, 1]")))
            }
        };
        match self {
            ChannelSpec::Erasure { q1 }
            | ChannelSpec::Additive { q1 }
            | ChannelSpec::MacErasure { q1 }
            | ChannelSpec::MacAdditive { q1 } => check(*q1, "noise probability"),
            ChannelSpec::MacInputDep { alpha } => {
                for &a in alpha {
                    check(a, "alpha entry")?;
                }
                Ok(())
            }
            ChannelSpec::BroadcastErasure {
                q1,
                q2,
                correlation,
            } => {
                check(*q1, "q1")?;
                check(*q2, "q2")?;
                if *correlation == Correlation::Degraded && q2 < q1 {
                    return Err(Error::invalid(format!(
                        "degraded broadcast needs q1 <= q2, got q1={q1} q2={q2}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Reinterprets a single-sender spec as the matching two-sender one, so
    /// command lines may say `erasure:q=0.3` in a multiple-access context.
    pub fn into_mac(self) -> Result<ChannelSpec, Error> {
        match self {
            ChannelSpec::Erasure { q1 } => Ok(ChannelSpec::MacErasure { q1 }),
            ChannelSpec::Additive { q1 } => Ok(ChannelSpec::MacAdditive { q1 }),
            s @ (ChannelSpec::MacErasure { .. }
            | ChannelSpec::MacAdditive { .. }
            | ChannelSpec::MacInputDep { .. }) => Ok(s),
            ChannelSpec::BroadcastErasure { .. } => Err(Error::invalid(
                "broadcast channel cannot serve as a multiple-access channel",
            )),
        }
    }
}

fn parse_field(s: &str, what: &str) -> Result<f64, Error> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::invalid(format!("cannot parse {what} from '{s}'")))
}

/// Syntax: `erasure:q=0.3`, `additive:q=0.05`, `macerasure:q=0.3`,
/// `macadditive:q=0.05`, `macdep:a=0,0.5,0.5,1`,
/// `broadcast:q1=0.2,q2=0.4[,mode=degraded|independent]` (degraded default).
impl FromStr for ChannelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("channel spec '{s}' lacks parameters")))?;
        let q_arg = |rest: &str| -> Result<f64, Error> {
            let val = rest
                .strip_prefix("q=")
                .ok_or_else(|| Error::invalid(format!("expected q=<prob> in '{s}'")))?;
            parse_field(val, "q")
        };
        let spec = match kind {
            "erasure" => ChannelSpec::Erasure { q1: q_arg(rest)? },
            "additive" => ChannelSpec::Additive { q1: q_arg(rest)? },
            "macerasure" => ChannelSpec::MacErasure { q1: q_arg(rest)? },
            "macadditive" => ChannelSpec::MacAdditive { q1: q_arg(rest)? },
            "macdep" => {
                let val = rest
                    .strip_prefix("a=")
                    .ok_or_else(|| Error::invalid(format!("expected a=<4 probs> in '{s}'")))?;
                let parts: Vec<&str> = val.split(',').collect();
                if parts.len() != 4 {
                    return Err(Error::invalid(format!(
                        "macdep needs 4 comma-separated alpha values, got '{val}'"
                    )));
                }
                let mut alpha = [0.0; 4];
                for (slot, part) in alpha.iter_mut().zip(&parts) {
                    *slot = parse_field(part, "alpha")?;
                }
                ChannelSpec::MacInputDep { alpha }
            }
            "broadcast" => {
                let (mut q1, mut q2) = (None, None);
                let mut correlation = Correlation::Degraded;
                for pair in rest.split(',') {
                    let (key, val) = pair
                        .split_once('=')
                        .ok_or_else(|| Error::invalid(format!("bad field '{pair}' in '{s}'")))?;
                    match key.trim() {
                        "q1" => q1 = Some(parse_field(val, "q1")?),
                        "q2" => q2 = Some(parse_field(val, "q2")?),
                        "mode" => {
                            correlation = match val.trim() {
                                "degraded" => Correlation::Degraded,
                                "independent" => Correlation::Independent,
                                other => {
                                    return Err(Error::invalid(format!(
                                        "unknown broadcast mode '{other}'"
                                    )))
                                }
                            }
                        }
                        other => {
                            return Err(Error::invalid(format!("unknown broadcast field '{other}'")))
                        }
                    }
                }
                let q1 = q1.ok_or_else(|| Error::invalid("broadcast spec needs q1"))?;
                let q2 = q2.ok_or_else(|| Error::invalid("broadcast spec needs q2"))?;
                ChannelSpec::BroadcastErasure {
                    q1,
                    q2,
                    correlation,
                }
            }
            other => return Err(Error::invalid(format!("unknown channel kind '{other}'"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn erase(x: &BitVector, pattern: &BitVector) -> Vec<ChannelSymbol> {
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

/// Erasure channel: each position independently becomes E with probability
/// `q1`. Returns the output symbols and the erasure pattern (1 = erased).
pub fn transmit_erasure<R: Rng>(
    x: &BitVector,
    q1: f64,
    rng: &mut R,
) -> (Vec<ChannelSymbol>, BitVector) {
    let pattern = BitVector::bernoulli(x.len(), q1, rng);
    (erase(x, &pattern), pattern)
}

/// Additive noise channel y = x + z with z i.i.d. from `qz` over {0,1}.
/// Returns (y, z).
pub fn transmit_additive<R: Rng>(
    x: &BitVector,
    qz: &Pmf,
    rng: &mut R,
) -> (BitVector, BitVector) {
    assert_eq!(qz.alphabet_size(), 2, "additive noise pmf must be binary");
    let z = BitVector::bernoulli(x.len(), qz.prob(1), rng);
    (x.xor(&z), z)
}

/// Input-dependent noise on the two-sender sum channel. Returns (y, z) with
/// y = x1 + x2 + z and Pr(z_i = 1) chosen by the input pair at position i
/// via q00 = 1 - alpha00, q01 = alpha01, q10 = alpha10, q11 = 1 - alpha11.
pub fn transmit_mac_inputdep<R: Rng>(
    x1: &BitVector,
    x2: &BitVector,
    alpha: &[f64; 4],
    rng: &mut R,
) -> (BitVector, BitVector) {
    assert_eq!(x1.len(), x2.len());
    let q = [1.0 - alpha[0], alpha[1], alpha[2], 1.0 - alpha[3]];
    let mut z = BitVector::zeros(x1.len());
    for i in 0..x1.len() {
        let pair = ((x1.get(i) as usize) << 1) | x2.get(i) as usize;
        if rng.random::<f64>() >= 1.0 - q[pair] {
            z.set(i, true);
        }
    }
    (x1.xor(x2).xor(&z), z)
}

/// Output of a two-sender channel: symbols for the erasure kind, bits plus
/// noise for the additive kinds (input-dependent included).
#[derive(Clone, Debug)]
pub enum MacOutput {
    Erasure {
        symbols: Vec<ChannelSymbol>,
        pattern: BitVector,
    },
    Additive {
        y: BitVector,
        noise: BitVector,
    },
}

/// Two-sender transmission dispatching on `spec`; errors on a spec that is
/// not a multiple-access kind.
pub fn transmit_mac<R: Rng>(
    x1: &BitVector,
    x2: &BitVector,
    spec: &ChannelSpec,
    rng: &mut R,
) -> Result<MacOutput, Error> {
    assert_eq!(x1.len(), x2.len());
    match spec {
        ChannelSpec::MacErasure { q1 } => {
            let (symbols, pattern) = transmit_erasure(&x1.xor(x2), *q1, rng);
            Ok(MacOutput::Erasure { symbols, pattern })
        }
        ChannelSpec::MacAdditive { q1 } => {
            let qz = Pmf::bernoulli(*q1)?;
            let (y, noise) = transmit_additive(&x1.xor(x2), &qz, rng);
            Ok(MacOutput::Additive { y, noise })
        }
        ChannelSpec::MacInputDep { alpha } => {
            let (y, noise) = transmit_mac_inputdep(x1, x2, alpha, rng);
            Ok(MacOutput::Additive { y, noise })
        }
        other => Err(Error::invalid(format!(
            "not a multiple-access channel: {other:?}"
        ))),
    }
}

/// What both receivers of the erasure broadcast channel observe, plus the
/// realized erasure sets.
#[derive(Clone, Debug)]
pub struct BroadcastOutput {
    pub y1: Vec<ChannelSymbol>,
    pub y2: Vec<ChannelSymbol>,
    pub erased1: BitVector,
    pub erased2: BitVector,
}

/// Erasure broadcast transmission. Independent mode runs two separate
/// erasure channels. Degraded mode erases at receiver 1 with rate q1, then
/// re-erases the survivors with rate (q2 - q1)/(1 - q1) so receiver 2's
/// marginal rate is exactly q2 and its erasure set contains receiver 1's.
pub fn transmit_broadcast<R: Rng>(
    x: &BitVector,
    spec: &ChannelSpec,
    rng: &mut R,
) -> Result<BroadcastOutput, Error> {
    let ChannelSpec::BroadcastErasure {
        q1,
        q2,
        correlation,
    } = spec
    else {
        return Err(Error::invalid(format!("not a broadcast channel: {spec:?}")));
    };
    spec.validate()?;
    let erased1 = BitVector::bernoulli(x.len(), *q1, rng);
    let erased2 = match correlation {
        Correlation::Independent => BitVector::bernoulli(x.len(), *q2, rng),
        Correlation::Degraded => {
            let alpha = if *q1 >= 1.0 {
                0.0 // everything is already erased at the first stage
            } else {
                (q2 - q1) / (1.0 - q1)
            };
            let mut e2 = BitVector::bernoulli(x.len(), alpha, rng);
            e2.or_assign(&erased1);
            e2
        }
    };
    Ok(BroadcastOutput {
        y1: erase(x, &erased1),
        y2: erase(x, &erased2),
        erased1,
        erased2,
    })
}

/// Splits erasure-channel output into the positions that carry bits and
/// those bits, shaped for row-restricted solving.
pub fn unerased(symbols: &[ChannelSymbol]) -> (Vec<usize>, BitVector) {
    let rows: Vec<usize> = symbols
        .iter()
        .enumerate()
        .filter_map(|(i, s)| matches!(s, ChannelSymbol::Bit(_)).then_some(i))
        .collect();
    let mut bits = BitVector::zeros(rows.len());
    for (j, &i) in rows.iter().enumerate() {
        if symbols[i] == ChannelSymbol::Bit(true) {
            bits.set(j, true);
        }
    }
    (rows, bits)
}
