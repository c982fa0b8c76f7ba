//! One sender, several receivers. The source side describes a family of
//! seven correlated binary sources to three receivers, each entitled to a
//! different four of them; the channel side shares one block of erasure
//! channel uses between two receivers of unequal quality, by time-sharing
//! two single-receiver codes or by one flat random matrix.
//!
//! Tuple symbols pack the seven components as bits, component j at bit
//! (6 - j), so component order matches coordinate order everywhere a
//! marginal is taken.

use crate::channel::{unerased, ChannelSymbol};
use crate::error::{DecodeFailure, Error};
use crate::gf2::{rank, solve_restricted, BitMatrix, BitVector, SolveOutcome};
use crate::info::{count_typical, enumerate_typical, marginal, sample_iid, Pmf, TypicalityParams};
use crate::point::{ceil_rate, floor_rate};
use rand::{Rng, RngCore};

/// Component order of the seven-source family: the three specific sources,
/// the three pairwise shared ones, then the fully shared one.
pub const COMPONENT_NAMES: [&str; 7] = ["1", "2", "3", "12", "23", "13", "123"];

/// The four components each receiver holds descriptions of, as ascending
/// indices into the component order.
pub const RECEIVER_SETS: [[usize; 4]; 3] = [[0, 3, 5, 6], [1, 3, 4, 6], [2, 4, 5, 6]];

/// Typical tuple sets above this size are refused rather than materialized.
const LIST_CAP: u64 = 1 << 16;

/// Draw retries before a full-rank construction gives up.
const BUILD_ATTEMPTS: usize = 64;

/// Splits a sequence of 7-bit tuple symbols into per-component blocks.
pub fn split_tuple_symbols(seq: &[usize]) -> [BitVector; 7] {
    let mut blocks: [BitVector; 7] = std::array::from_fn(|_| BitVector::zeros(seq.len()));
    for (i, &s) in seq.iter().enumerate() {
        debug_assert!(s < 128);
        for (j, block) in blocks.iter_mut().enumerate() {
            if (s >> (6 - j)) & 1 != 0 {
                block.set(i, true);
            }
        }
    }
    blocks
}

/// Draws an i.i.d. block of seven-component tuples and splits it by
/// component.
pub fn sample_tuple<R: Rng + ?Sized>(joint: &Pmf, n: usize, rng: &mut R) -> [BitVector; 7] {
    assert_eq!(joint.alphabet_size(), 128, "tuple source wants 2^7 symbols");
    split_tuple_symbols(&sample_iid(joint, n, rng))
}

/// Splits a sequence of 4-bit marginal symbols into the four kept blocks,
/// kept coordinate k at bit (3 - k).
fn split_quad_symbols(seq: &[usize]) -> [BitVector; 4] {
    let mut blocks: [BitVector; 4] = std::array::from_fn(|_| BitVector::zeros(seq.len()));
    for (i, &s) in seq.iter().enumerate() {
        for (k, block) in blocks.iter_mut().enumerate() {
            if (s >> (3 - k)) & 1 != 0 {
                block.set(i, true);
            }
        }
    }
    blocks
}

/// Nonzero-probability symbols of `p` and the pmf restricted to them.
/// Typical sequences never touch a zero-probability symbol, so enumerating
/// over the support is exact and skips compositions of impossible symbols.
fn support(p: &Pmf) -> (Vec<usize>, Pmf) {
    let mut syms = Vec::new();
    let mut probs = Vec::new();
    for (s, &q) in p.probs().iter().enumerate() {
        if q > 0.0 {
            syms.push(s);
            probs.push(q);
        }
    }
    let reduced = Pmf::new(probs).expect("support of a valid pmf is a valid pmf");
    (syms, reduced)
}

/// The typical set of `marg` as original-alphabet sequences, when small
/// enough to materialize.
fn typical_sequences(marg: &Pmf, tp: &TypicalityParams) -> Option<Vec<Vec<usize>>> {
    let (syms, reduced) = support(marg);
    count_typical(&reduced, tp, LIST_CAP)?;
    let seqs = enumerate_typical(&reduced, tp).expect("counted set fits the enumeration cap");
    Some(
        seqs.into_iter()
            .map(|seq| seq.into_iter().map(|r| syms[r]).collect())
            .collect(),
    )
}

/// One receiver's precomputed candidate: a typical four-tuple of its
/// component blocks and their description images.
struct BssEntry {
    blocks: [BitVector; 4],
    images: [BitVector; 4],
}

/// Linear description code for the seven-source family: one matrix per
/// component, receiver r decoding the four components in RECEIVER_SETS[r]
/// from their four descriptions.
pub struct BssCode {
    mats: [BitMatrix; 7],
    tp: TypicalityParams,
    candidates: [Vec<BssEntry>; 3],
}

impl BssCode {
    /// Wraps explicit description matrices. Every receiver's typical tuple
    /// set must fit the materialization cap.
    pub fn new(mats: [BitMatrix; 7], joint: Pmf, tp: TypicalityParams) -> Result<Self, Error> {
        if joint.alphabet_size() != 128 {
            return Err(Error::invalid("tuple source wants a pmf over 2^7 symbols"));
        }
        for m in &mats {
            if m.cols() != tp.n() {
                return Err(Error::invalid(format!(
                    "description matrices must have {} columns",
                    tp.n()
                )));
            }
        }
        let mut candidates: [Vec<BssEntry>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for (r, set) in RECEIVER_SETS.iter().enumerate() {
            let marg = marginal(&joint, 7, set);
            let seqs = typical_sequences(&marg, &tp)
                .ok_or(Error::EnumerationTooLarge { limit: LIST_CAP })?;
            candidates[r] = seqs
                .iter()
                .map(|seq| {
                    let blocks = split_quad_symbols(seq);
                    let images = std::array::from_fn(|k| mats[set[k]].mul_vec(&blocks[k]));
                    BssEntry { blocks, images }
                })
                .collect();
        }
        Ok(BssCode { mats, tp, candidates })
    }

    /// Random description matrices with ceil(n * rate) rows per component.
    pub fn random(
        n: usize,
        rates: &[f64; 7],
        joint: Pmf,
        eps: f64,
        rng: &mut dyn RngCore,
    ) -> Result<Self, Error> {
        for r in rates {
            if !r.is_finite() || *r < 0.0 {
                return Err(Error::invalid(format!(
                    "description rate {r} must be finite and nonnegative"
                )));
            }
        }
        let tp = TypicalityParams::new(n, eps)?;
        let mats = std::array::from_fn(|j| BitMatrix::random(ceil_rate(n, rates[j]), n, rng));
        BssCode::new(mats, joint, tp)
    }

    /// All seven descriptions of a source realization.
    pub fn encode(&self, u: &[BitVector; 7]) -> [BitVector; 7] {
        std::array::from_fn(|j| self.mats[j].mul_vec(&u[j]))
    }

    /// Receiver r's decoder: the unique typical four-tuple of its
    /// components consistent with its four descriptions. Only the
    /// receiver's entries of `v` are read; blocks return in ascending
    /// component order.
    pub fn decode(
        &self,
        receiver: usize,
        v: &[BitVector; 7],
    ) -> Result<[BitVector; 4], DecodeFailure> {
        assert!((1..=3).contains(&receiver), "receivers are numbered 1 to 3");
        let set = &RECEIVER_SETS[receiver - 1];
        for &a in set {
            assert_eq!(v[a].len(), self.mats[a].rows(), "description length mismatch");
        }
        let mut found: Option<&BssEntry> = None;
        for cand in &self.candidates[receiver - 1] {
            if (0..4).all(|k| cand.images[k] == v[set[k]]) {
                if found.is_some() {
                    return Err(DecodeFailure::Ambiguous);
                }
                found = Some(cand);
            }
        }
        found.map(|e| e.blocks.clone()).ok_or(DecodeFailure::NoCandidate)
    }

    pub fn blocklength(&self) -> usize {
        self.tp.n()
    }

    /// Rows of each description matrix, in component order.
    pub fn description_lens(&self) -> [usize; 7] {
        std::array::from_fn(|j| self.mats[j].rows())
    }

    /// Size of receiver r's materialized typical tuple set.
    pub fn candidate_count(&self, receiver: usize) -> usize {
        assert!((1..=3).contains(&receiver));
        self.candidates[receiver - 1].len()
    }
}

/// Random rows x cols matrix with full column rank, retrying the draw.
fn random_full_column_rank(
    rows: usize,
    cols: usize,
    rng: &mut dyn RngCore,
) -> Result<BitMatrix, Error> {
    if cols == 0 {
        return Ok(BitMatrix::zeros(rows, 0));
    }
    if cols > rows {
        return Err(Error::invalid(format!(
            "{cols} message bits cannot have independent images in {rows} uses"
        )));
    }
    for _ in 0..BUILD_ATTEMPTS {
        let m = BitMatrix::random(rows, cols, rng);
        if rank(&m) == cols {
            return Ok(m);
        }
    }
    Err(Error::ConstructionFailed { attempts: BUILD_ATTEMPTS })
}

/// Stacks two segment generators into one block-diagonal n x (k1 + k2)
/// encoder matrix.
fn block_diagonal(g1: &BitMatrix, g2: &BitMatrix) -> BitMatrix {
    let (k1, k2) = (g1.cols(), g2.cols());
    let mut b = BitMatrix::zeros(g1.rows() + g2.rows(), k1 + k2);
    for r in 0..g1.rows() {
        for c in 0..k1 {
            if g1.get(r, c) {
                b.set(r, c, true);
            }
        }
    }
    for r in 0..g2.rows() {
        for c in 0..k2 {
            if g2.get(r, c) {
                b.set(g1.rows() + r, k1 + c, true);
            }
        }
    }
    b
}

enum Layout {
    Flat,
    TimeShare { split: usize, g1: BitMatrix, g2: BitMatrix },
}

/// Random linear code for two receivers on one erasure broadcast link. One
/// input block carries both messages; each receiver erasure-decodes from
/// whatever positions reach it.
pub struct BcastChannelCode {
    generator: BitMatrix,
    k1: usize,
    layout: Layout,
}

impl BcastChannelCode {
    /// Splits the block at a channel-weighted point and runs an independent
    /// full-rank random code in each segment. Receiver i is served only by
    /// segment i. Requires q1 <= q2: receiver 1 is the stronger one.
    pub fn build_timeshare(
        n: usize,
        r1: f64,
        r2: f64,
        q1: f64,
        q2: f64,
        rng: &mut dyn RngCore,
    ) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::invalid("blocklength must be positive"));
        }
        for q in [q1, q2] {
            if !q.is_finite() || !(0.0..1.0).contains(&q) {
                return Err(Error::invalid(format!("erasure rate {q} outside [0, 1)")));
            }
        }
        if q1 > q2 {
            return Err(Error::invalid("receiver 1 is the stronger one; call with q1 <= q2"));
        }
        check_rates(&[r1, r2])?;
        let k1 = floor_rate(n, r1);
        let k2 = floor_rate(n, r2);
        if k1 + k2 > n {
            return Err(Error::invalid(format!(
                "messages of {k1} and {k2} bits cannot share {n} uses"
            )));
        }
        // Channel-weighted share: each segment then runs at the same
        // fraction of its own receiver's capacity.
        let w1 = r1 / (1.0 - q1);
        let w2 = r2 / (1.0 - q2);
        let mut split = if w1 + w2 > 0.0 { floor_rate(n, w1 / (w1 + w2)) } else { 0 };
        // Rounding, or rates past capacity, can leave a segment shorter
        // than its own message; the block has room, so shift the boundary.
        split = split.clamp(k1, n - k2);
        let g1 = random_full_column_rank(split, k1, rng)?;
        let g2 = random_full_column_rank(n - split, k2, rng)?;
        let generator = block_diagonal(&g1, &g2);
        Ok(BcastChannelCode { generator, k1, layout: Layout::TimeShare { split, g1, g2 } })
    }

    /// One flat random full-column-rank matrix over the whole block, both
    /// messages decoded jointly by every receiver.
    pub fn build_flat(n: usize, r1: f64, r2: f64, rng: &mut dyn RngCore) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::invalid("blocklength must be positive"));
        }
        check_rates(&[r1, r2])?;
        let k1 = floor_rate(n, r1);
        let k2 = floor_rate(n, r2);
        if k1 + k2 > n {
            return Err(Error::invalid(format!(
                "messages of {k1} and {k2} bits cannot share {n} uses"
            )));
        }
        let generator = random_full_column_rank(n, k1 + k2, rng)?;
        Ok(BcastChannelCode { generator, k1, layout: Layout::Flat })
    }

    /// The channel input carrying both messages.
    pub fn encode(&self, m1: &BitVector, m2: &BitVector) -> BitVector {
        let (k1, k2) = self.message_lens();
        assert_eq!(m1.len(), k1, "message 1 length mismatch");
        assert_eq!(m2.len(), k2, "message 2 length mismatch");
        let mut m = BitVector::zeros(k1 + k2);
        for i in 0..k1 {
            if m1.get(i) {
                m.set(i, true);
            }
        }
        for i in 0..k2 {
            if m2.get(i) {
                m.set(k1 + i, true);
            }
        }
        self.generator.mul_vec(&m)
    }

    /// Both messages from one receiver's observation.
    pub fn decode_both(
        &self,
        y: &[ChannelSymbol],
    ) -> Result<(BitVector, BitVector), DecodeFailure> {
        assert_eq!(y.len(), self.generator.rows(), "observation length mismatch");
        match &self.layout {
            Layout::TimeShare { split, g1, g2 } => {
                let m1 = decode_segment(g1, &y[..*split])?;
                let m2 = decode_segment(g2, &y[*split..])?;
                Ok((m1, m2))
            }
            Layout::Flat => {
                let m = decode_segment(&self.generator, y)?;
                Ok(self.split_message(&m))
            }
        }
    }

    /// Receiver r's own message. A time-shared code reads only the
    /// receiver's segment; a flat code has no such structure, so both
    /// messages are recovered jointly and the other discarded.
    pub fn decode_own(
        &self,
        receiver: usize,
        y: &[ChannelSymbol],
    ) -> Result<BitVector, DecodeFailure> {
        assert!((1..=2).contains(&receiver), "receivers are numbered 1 and 2");
        match &self.layout {
            Layout::TimeShare { split, g1, g2 } => {
                assert_eq!(y.len(), self.generator.rows(), "observation length mismatch");
                if receiver == 1 {
                    decode_segment(g1, &y[..*split])
                } else {
                    decode_segment(g2, &y[*split..])
                }
            }
            Layout::Flat => {
                let (m1, m2) = self.decode_both(y)?;
                Ok(if receiver == 1 { m1 } else { m2 })
            }
        }
    }

    fn split_message(&self, m: &BitVector) -> (BitVector, BitVector) {
        let (k1, k2) = self.message_lens();
        let mut m1 = BitVector::zeros(k1);
        let mut m2 = BitVector::zeros(k2);
        for i in 0..k1 {
            if m.get(i) {
                m1.set(i, true);
            }
        }
        for i in 0..k2 {
            if m.get(k1 + i) {
                m2.set(i, true);
            }
        }
        (m1, m2)
    }

    pub fn blocklength(&self) -> usize {
        self.generator.rows()
    }

    pub fn message_lens(&self) -> (usize, usize) {
        (self.k1, self.generator.cols() - self.k1)
    }

    /// The time-share boundary, or None for a flat code.
    pub fn split(&self) -> Option<usize> {
        match &self.layout {
            Layout::TimeShare { split, .. } => Some(*split),
            Layout::Flat => None,
        }
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }
}

fn check_rates(rates: &[f64]) -> Result<(), Error> {
    for r in rates {
        if !r.is_finite() || *r < 0.0 {
            return Err(Error::invalid(format!("rate {r} must be finite and nonnegative")));
        }
    }
    Ok(())
}

/// Erasure-decodes one segment against its generator.
fn decode_segment(g: &BitMatrix, y: &[ChannelSymbol]) -> Result<BitVector, DecodeFailure> {
    assert_eq!(y.len(), g.rows());
    let (positions, seen) = unerased(y);
    if g.cols() == 0 {
        // Nothing was sent here; the only consistent observation is zero.
        return if seen.is_zero() {
            Ok(BitVector::zeros(0))
        } else {
            Err(DecodeFailure::NoCandidate)
        };
    }
    match solve_restricted(g, &positions, &seen) {
        SolveOutcome::Unique(m) => Ok(m),
        SolveOutcome::NonUnique => Err(DecodeFailure::Ambiguous),
        SolveOutcome::Inconsistent => Err(DecodeFailure::NoCandidate),
    }
}

/// Boundary of the two-receiver erasure broadcast rate region: the segment
/// from (0, 1-q2) to (1-q1, 0), swept as ((1-q1) h, (1-q2)(1-h)) by the
/// share h of channel entropy spent on receiver 1.
pub fn bcast_region_boundary(q1: f64, q2: f64, grid: usize) -> Result<Vec<(f64, f64)>, Error> {
    for q in [q1, q2] {
        if !q.is_finite() || !(0.0..1.0).contains(&q) {
            return Err(Error::invalid(format!("erasure rate {q} outside [0, 1)")));
        }
    }
    if grid == 0 {
        return Err(Error::invalid("grid needs at least one step"));
    }
    Ok((0..=grid)
        .map(|i| {
            let h = i as f64 / grid as f64;
            ((1.0 - q1) * h, (1.0 - q2) * (1.0 - h))
        })
        .collect())
}

/// Carves a common-information rate out of receiver 2's message: (r1, r2)
/// becomes private rates (r1, r2 - r0) plus a common rate r0 that the
/// stronger receiver can decode as well.
pub fn common_info_shift(r1: f64, r2: f64, r0: f64) -> Result<(f64, f64, f64), Error> {
    check_rates(&[r1, r2, r0])?;
    if r0 >= r2 {
        return Err(Error::invalid(format!(
            "common rate {r0} must stay below receiver 2's rate {r2}"
        )));
    }
    Ok((r1, r2 - r0, r0))
}
