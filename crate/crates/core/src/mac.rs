//! Codes for two senders sharing one binary sum channel: separate
//! compression of a correlated pair, time-shared channel coding, and the
//! joint scheme that pushes source blocks through square matrices with no
//! channel code in between.
//!
//! Every decoder searches for a jointly typical pair, with typicality
//! measured on the pair sequence (symbol = 2*u1 + u2) against the joint
//! pmf. Small typical pair sets are materialized once per code and walked
//! at decode time; the pair-compression decoder otherwise falls back to
//! scanning the product of its two affine solution sets.

use crate::channel::{unerased, ChannelSpec, ChannelSymbol};
use crate::error::{DecodeFailure, Error};
use crate::gf2::{solve_affine, BitMatrix, BitVector};
use crate::info::{count_typical, enumerate_typical, is_typical_counts, sample_iid, Pmf, TypicalityParams};
use crate::point::{ceil_rate, floor_rate, LinearChannelCode};
use rand::{Rng, RngCore};

/// Decode scans refuse to walk more than 2^24 candidate pairs, the same
/// loud-failure cap the single-sender codes use.
const SCAN_CAP_BITS: usize = 24;

/// Typical pair sets above this size are not materialized.
pub(crate) const LIST_CAP: u64 = 1 << 16;

/// Splits a pair-symbol sequence into the two senders' bit blocks. The
/// first sender owns the high bit of each symbol.
fn split_pair_symbols(seq: &[usize]) -> (BitVector, BitVector) {
    let mut u1 = BitVector::zeros(seq.len());
    let mut u2 = BitVector::zeros(seq.len());
    for (i, &s) in seq.iter().enumerate() {
        debug_assert!(s < 4);
        if s & 2 != 0 {
            u1.set(i, true);
        }
        if s & 1 != 0 {
            u2.set(i, true);
        }
    }
    (u1, u2)
}

/// Joint composition of two equal-length blocks, in pair-symbol order
/// (00, 01, 10, 11).
fn pair_counts(u1: &BitVector, u2: &BitVector) -> [u64; 4] {
    debug_assert_eq!(u1.len(), u2.len());
    let n = u1.len() as u64;
    let both = u1.ones_in_common(u2) as u64;
    let o1 = u1.count_ones() as u64;
    let o2 = u2.count_ones() as u64;
    // Evaluation order keeps every partial sum nonnegative.
    [n - o1 + both - o2, o2 - both, o1 - both, both]
}

/// Number of jointly typical pair sequences, or None once it exceeds the
/// materialization cap. Counts composition classes, so the cost is cubic in
/// the blocklength no matter how large the set is.
fn typical_pair_total(joint: &Pmf, tp: &TypicalityParams) -> Option<u64> {
    count_typical(joint, tp, LIST_CAP)
}

/// The typical pair set as sender blocks, when small enough to walk.
fn typical_pairs(joint: &Pmf, tp: &TypicalityParams) -> Option<Vec<(BitVector, BitVector)>> {
    typical_pair_total(joint, tp)?;
    let seqs = enumerate_typical(joint, tp).expect("pair total fits the enumeration cap");
    Some(seqs.iter().map(|s| split_pair_symbols(s)).collect())
}

/// Draws an i.i.d. block of pair symbols from `joint` and splits it into
/// the two senders' bit blocks.
pub fn sample_pair<R: Rng + ?Sized>(joint: &Pmf, n: usize, rng: &mut R) -> (BitVector, BitVector) {
    assert_eq!(joint.alphabet_size(), 4, "pair source wants four symbols");
    split_pair_symbols(&sample_iid(joint, n, rng))
}

struct SwEntry {
    u1: BitVector,
    u2: BitVector,
    v1: BitVector,
    v2: BitVector,
}

/// Separate linear compressors for a correlated pair: each sender applies
/// its own matrix, the decoder exploits the correlation.
pub struct MacSourceCode {
    a1: BitMatrix,
    a2: BitMatrix,
    joint: Pmf,
    tp: TypicalityParams,
    // Typical pairs with their images, when the set is small enough to
    // walk per decode. None sends decoding to the affine product scan.
    list: Option<Vec<SwEntry>>,
}

impl MacSourceCode {
    pub fn new(a1: BitMatrix, a2: BitMatrix, joint: Pmf, tp: TypicalityParams) -> Result<Self, Error> {
        if joint.alphabet_size() != 4 {
            return Err(Error::invalid("pair source wants a pmf over four pair symbols"));
        }
        if a1.cols() != tp.n() || a2.cols() != tp.n() {
            return Err(Error::invalid(format!(
                "compressor widths {} and {} must both match blocklength {}",
                a1.cols(),
                a2.cols(),
                tp.n()
            )));
        }
        let list = typical_pairs(&joint, &tp).map(|pairs| {
            pairs
                .into_iter()
                .map(|(u1, u2)| SwEntry {
                    v1: a1.mul_vec(&u1),
                    v2: a2.mul_vec(&u2),
                    u1,
                    u2,
                })
                .collect()
        });
        Ok(MacSourceCode {
            a1,
            a2,
            joint,
            tp,
            list,
        })
    }

    /// Fresh random compressors with `ceil(n * r1)` and `ceil(n * r2)` rows.
    pub fn random(
        n: usize,
        r1: f64,
        r2: f64,
        joint: Pmf,
        eps: f64,
        rng: &mut dyn RngCore,
    ) -> Result<Self, Error> {
        for r in [r1, r2] {
            if !r.is_finite() || r < 0.0 {
                return Err(Error::invalid(format!(
                    "rate {r} must be finite and nonnegative"
                )));
            }
        }
        let tp = TypicalityParams::new(n, eps)?;
        let a1 = BitMatrix::random(ceil_rate(n, r1), n, rng);
        let a2 = BitMatrix::random(ceil_rate(n, r2), n, rng);
        MacSourceCode::new(a1, a2, joint, tp)
    }

    pub fn blocklength(&self) -> usize {
        self.tp.n()
    }

    /// Description lengths in bits, one per sender.
    pub fn description_lens(&self) -> (usize, usize) {
        (self.a1.rows(), self.a2.rows())
    }

    pub fn a1(&self) -> &BitMatrix {
        &self.a1
    }

    pub fn a2(&self) -> &BitMatrix {
        &self.a2
    }

    pub fn encode(&self, u1: &BitVector, u2: &BitVector) -> (BitVector, BitVector) {
        (self.a1.mul_vec(u1), self.a2.mul_vec(u2))
    }

    /// The unique jointly typical pair consistent with both descriptions;
    /// zero candidates and ties are failures.
    ///
    /// Panics when the fallback scan would exceed 2^24 candidate pairs.
    pub fn decode(
        &self,
        v1: &BitVector,
        v2: &BitVector,
    ) -> Result<(BitVector, BitVector), DecodeFailure> {
        assert_eq!(v1.len(), self.a1.rows());
        assert_eq!(v2.len(), self.a2.rows());
        if let Some(list) = &self.list {
            let mut found: Option<&SwEntry> = None;
            for entry in list {
                if entry.v1 == *v1 && entry.v2 == *v2 {
                    if found.is_some() {
                        return Err(DecodeFailure::Ambiguous);
                    }
                    found = Some(entry);
                }
            }
            return found
                .map(|e| (e.u1.clone(), e.u2.clone()))
                .ok_or(DecodeFailure::NoCandidate);
        }
        let s1 = solve_affine(&self.a1, v1).ok_or(DecodeFailure::NoCandidate)?;
        let s2 = solve_affine(&self.a2, v2).ok_or(DecodeFailure::NoCandidate)?;
        assert!(
            s1.dim() + s2.dim() <= SCAN_CAP_BITS,
            "typicality scan over 2^{} candidate pairs; raise the rates or shrink the block",
            s1.dim() + s2.dim()
        );
        let mut found: Option<(BitVector, BitVector)> = None;
        let mut tied = false;
        s1.for_each(|u1| {
            s2.for_each(|u2| {
                if is_typical_counts(&self.joint, &pair_counts(u1, u2), &self.tp) {
                    if found.is_some() {
                        tied = true;
                        return false;
                    }
                    found = Some((u1.clone(), u2.clone()));
                }
                true
            });
            !tied
        });
        if tied {
            return Err(DecodeFailure::Ambiguous);
        }
        found.ok_or(DecodeFailure::NoCandidate)
    }
}

/// Places `gen` into rows [offset, offset + gen.rows()) of an otherwise
/// zero n x gen.cols() matrix.
fn embed_rows(gen: &BitMatrix, n: usize, offset: usize) -> BitMatrix {
    let mut b = BitMatrix::zeros(n, gen.cols());
    for r in 0..gen.rows() {
        for c in 0..gen.cols() {
            if gen.get(r, c) {
                b.set(offset + r, c, true);
            }
        }
    }
    b
}

/// Bits [start, start + len) of `v` as their own vector.
fn subrange(v: &BitVector, start: usize, len: usize) -> BitVector {
    let mut out = BitVector::zeros(len);
    for i in 0..len {
        if v.get(start + i) {
            out.set(i, true);
        }
    }
    out
}

/// Time-shared channel code: sender 1 owns the first `split` channel uses,
/// sender 2 the rest, each running its own single-sender code there. On the
/// sum channel the senders never collide, so each segment decodes as a
/// point-to-point link.
pub struct MacChannelCode {
    b1: BitMatrix,
    b2: BitMatrix,
    lambda: f64,
    split: usize,
    spec: ChannelSpec,
    seg1: Option<LinearChannelCode>,
    seg2: Option<LinearChannelCode>,
}

impl MacChannelCode {
    /// Builds the two segment codes. Message lengths are `ceil(n * r)` per
    /// sender, counted against the whole block; the split is
    /// `floor(lambda * n)` uses for sender 1 and the remainder for sender 2.
    /// Rates too high for a segment's length are a construction error;
    /// whether they are decodable at the channel's noise level is the
    /// caller's business.
    pub fn build(
        n: usize,
        r1: f64,
        r2: f64,
        lambda: f64,
        spec: ChannelSpec,
        eps: f64,
        rng: &mut dyn RngCore,
    ) -> Result<Self, Error> {
        let spec = spec.into_mac()?;
        spec.validate()?;
        let noise = match &spec {
            ChannelSpec::MacErasure { .. } => Pmf::bernoulli(0.0)?,
            ChannelSpec::MacAdditive { q1 } => Pmf::bernoulli(*q1)?,
            _ => {
                return Err(Error::invalid(
                    "time-sharing decodes each segment as a single-sender link; \
                     input-dependent noise has no such marginal",
                ))
            }
        };
        if n == 0 {
            return Err(Error::invalid("blocklength must be positive"));
        }
        if !lambda.is_finite() || !(0.0..=1.0).contains(&lambda) {
            return Err(Error::invalid(format!("lambda {lambda} outside [0, 1]")));
        }
        for r in [r1, r2] {
            if !r.is_finite() || r < 0.0 {
                return Err(Error::invalid(format!(
                    "rate {r} must be finite and nonnegative"
                )));
            }
        }
        let split = floor_rate(n, lambda);
        let (k1, k2) = (ceil_rate(n, r1), ceil_rate(n, r2));
        if k1 > split {
            return Err(Error::invalid(format!(
                "sender 1 wants {k1} message bits but its segment has {split} uses"
            )));
        }
        if k2 > n - split {
            return Err(Error::invalid(format!(
                "sender 2 wants {k2} message bits but its segment has {} uses",
                n - split
            )));
        }
        let seg1 = if k1 > 0 {
            Some(LinearChannelCode::build_sized(split, k1, noise.clone(), eps, rng)?)
        } else {
            None
        };
        let seg2 = if k2 > 0 {
            Some(LinearChannelCode::build_sized(n - split, k2, noise, eps, rng)?)
        } else {
            None
        };
        let b1 = match &seg1 {
            Some(code) => embed_rows(code.generator(), n, 0),
            None => BitMatrix::zeros(n, 0),
        };
        let b2 = match &seg2 {
            Some(code) => embed_rows(code.generator(), n, split),
            None => BitMatrix::zeros(n, 0),
        };
        Ok(MacChannelCode {
            b1,
            b2,
            lambda,
            split,
            spec,
            seg1,
            seg2,
        })
    }

    pub fn blocklength(&self) -> usize {
        self.b1.rows()
    }

    /// First segment's length in channel uses.
    pub fn split(&self) -> usize {
        self.split
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn spec(&self) -> &ChannelSpec {
        &self.spec
    }

    pub fn b1(&self) -> &BitMatrix {
        &self.b1
    }

    pub fn b2(&self) -> &BitMatrix {
        &self.b2
    }

    pub fn message_lens(&self) -> (usize, usize) {
        (self.b1.cols(), self.b2.cols())
    }

    /// Rates against the whole block, one per sender.
    pub fn rate_pair(&self) -> (f64, f64) {
        let n = self.blocklength() as f64;
        (self.b1.cols() as f64 / n, self.b2.cols() as f64 / n)
    }

    pub fn encode(&self, m1: &BitVector, m2: &BitVector) -> (BitVector, BitVector) {
        (self.b1.mul_vec(m1), self.b2.mul_vec(m2))
    }

    /// Segment-wise erasure decoding; either segment's failure fails the
    /// whole attempt.
    pub fn decode_erasure(
        &self,
        y: &[ChannelSymbol],
    ) -> Result<(BitVector, BitVector), DecodeFailure> {
        assert_eq!(y.len(), self.blocklength());
        let m1 = match &self.seg1 {
            Some(code) => code.decode_erasure(&y[..self.split])?,
            None => BitVector::zeros(0),
        };
        let m2 = match &self.seg2 {
            Some(code) => code.decode_erasure(&y[self.split..])?,
            None => BitVector::zeros(0),
        };
        Ok((m1, m2))
    }

    /// Segment-wise syndrome decoding against the built-in noise pmf.
    pub fn decode_additive(&self, y: &BitVector) -> Result<(BitVector, BitVector), DecodeFailure> {
        assert_eq!(y.len(), self.blocklength());
        let m1 = match &self.seg1 {
            Some(code) => code.decode_additive(&subrange(y, 0, self.split))?,
            None => BitVector::zeros(0),
        };
        let m2 = match &self.seg2 {
            Some(code) => {
                code.decode_additive(&subrange(y, self.split, self.blocklength() - self.split))?
            }
            None => BitVector::zeros(0),
        };
        Ok((m1, m2))
    }
}

struct JsccEntry {
    u1: BitVector,
    u2: BitVector,
    // c1 u1 + c2 u2, the only thing the channel sees of the pair.
    sum: BitVector,
}

/// Joint source-channel code for the two-sender sum channel: each sender
/// multiplies its source block by its own square matrix, built with no
/// cooperation. The decoder walks the typical pair set, so construction
/// fails when that set is too large to materialize.
pub struct MacJointCode {
    c1: BitMatrix,
    c2: BitMatrix,
    noise: Pmf,
    tp: TypicalityParams,
    candidates: Vec<JsccEntry>,
}

impl MacJointCode {
    pub fn new(
        c1: BitMatrix,
        c2: BitMatrix,
        joint: Pmf,
        noise: Pmf,
        tp: TypicalityParams,
    ) -> Result<Self, Error> {
        if joint.alphabet_size() != 4 {
            return Err(Error::invalid("joint code wants a pmf over four pair symbols"));
        }
        if noise.alphabet_size() != 2 {
            return Err(Error::invalid("joint code wants a binary noise pmf"));
        }
        let n = tp.n();
        if c1.rows() != n || c1.cols() != n || c2.rows() != n || c2.cols() != n {
            return Err(Error::invalid(format!("both matrices must be {n} x {n}")));
        }
        let pairs = typical_pairs(&joint, &tp).ok_or(Error::EnumerationTooLarge {
            limit: LIST_CAP,
        })?;
        let candidates = pairs
            .into_iter()
            .map(|(u1, u2)| JsccEntry {
                sum: c1.mul_vec(&u1).xor(&c2.mul_vec(&u2)),
                u1,
                u2,
            })
            .collect();
        Ok(MacJointCode {
            c1,
            c2,
            noise,
            tp,
            candidates,
        })
    }

    /// Two independent uniform draws, one matrix per sender.
    pub fn random(
        n: usize,
        joint: Pmf,
        noise: Pmf,
        eps: f64,
        rng: &mut dyn RngCore,
    ) -> Result<Self, Error> {
        let tp = TypicalityParams::new(n, eps)?;
        let c1 = BitMatrix::random(n, n, rng);
        let c2 = BitMatrix::random(n, n, rng);
        MacJointCode::new(c1, c2, joint, noise, tp)
    }

    pub fn blocklength(&self) -> usize {
        self.tp.n()
    }

    pub fn c1(&self) -> &BitMatrix {
        &self.c1
    }

    pub fn c2(&self) -> &BitMatrix {
        &self.c2
    }

    /// Size of the materialized typical pair set.
    pub fn typical_pair_count(&self) -> usize {
        self.candidates.len()
    }

    pub fn encode(&self, u1: &BitVector, u2: &BitVector) -> (BitVector, BitVector) {
        (self.c1.mul_vec(u1), self.c2.mul_vec(u2))
    }

    /// The unique typical pair whose image sum agrees with every unerased
    /// output position.
    pub fn decode_erasure(
        &self,
        y: &[ChannelSymbol],
    ) -> Result<(BitVector, BitVector), DecodeFailure> {
        assert_eq!(y.len(), self.tp.n());
        let (positions, seen) = unerased(y);
        let mut found: Option<&JsccEntry> = None;
        for cand in &self.candidates {
            let agrees = positions
                .iter()
                .enumerate()
                .all(|(j, &i)| cand.sum.get(i) == seen.get(j));
            if agrees {
                if found.is_some() {
                    return Err(DecodeFailure::Ambiguous);
                }
                found = Some(cand);
            }
        }
        found
            .map(|c| (c.u1.clone(), c.u2.clone()))
            .ok_or(DecodeFailure::NoCandidate)
    }

    /// The unique typical pair whose image sum leaves a typical noise
    /// residue against `y`.
    pub fn decode_additive(&self, y: &BitVector) -> Result<(BitVector, BitVector), DecodeFailure> {
        assert_eq!(y.len(), self.tp.n());
        let n = self.tp.n() as u64;
        let mut found: Option<&JsccEntry> = None;
        for cand in &self.candidates {
            let w = y.xor(&cand.sum).count_ones() as u64;
            if is_typical_counts(&self.noise, &[n - w, w], &self.tp) {
                if found.is_some() {
                    return Err(DecodeFailure::Ambiguous);
                }
                found = Some(cand);
            }
        }
        found
            .map(|c| (c.u1.clone(), c.u2.clone()))
            .ok_or(DecodeFailure::NoCandidate)
    }
}
