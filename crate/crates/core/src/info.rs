//! Entropies, probability mass functions, and typical-set machinery.
//!
//! Every decoder in this crate asks the same question: does a candidate
//! sequence have empirical log-probability within ε of the source entropy?
//! All routes to that question (raw symbol sequences, bit counts from
//! popcounts, composition classes) funnel through one counting-form
//! evaluation so they agree bit for bit in floating point.

use crate::error::Error;
use rand::Rng;

/// Hard ceiling on how many sequences [`enumerate_typical`] will emit.
pub const ENUMERATION_CAP: u64 = 1 << 24;

/// Half-width safety margin applied inside the typicality window.
///
/// Some sources put whole composition classes exactly on a window endpoint
/// (Bernoulli(0.2) with ε = 0.1 does, at weights w/n = 0.15 and 0.25), and
/// rounding in the log-probability sum then decides membership arbitrarily.
/// Shrinking the open interval by 1e-9 on each side keeps those boundary
/// classes out regardless of rounding; every experiment in this crate
/// operates at least 1e-2 away from its window endpoints, so the margin is
/// otherwise invisible.
const BOUNDARY_GUARD: f64 = 1e-9;

/// Binary entropy in bits. Errors when `q` is not a probability.
pub fn binary_entropy(q: f64) -> Result<f64, Error> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid(format!("probability {q} outside [0, 1]")));
    }
    Ok(h2(q))
}

/// Binary entropy without the domain check; callers pass values already
/// known to be probabilities, possibly off by a few ulps from arithmetic.
#[inline]
pub(crate) fn h2(q: f64) -> f64 {
    let q = q.clamp(0.0, 1.0);
    xlog2(q) + xlog2(1.0 - q)
}

/// -x log2 x with the 0 log 0 = 0 convention.
#[inline]
fn xlog2(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.log2()
    } else {
        0.0
    }
}

/// A probability mass function over the alphabet `0..alphabet_size()`.
///
/// Entries may be zero; negative entries and totals off 1 by more than
/// 1e-12 are rejected at construction. The log table and entropy are fixed
/// at construction so all later arithmetic on them is reproducible.
#[derive(Clone, Debug)]
pub struct Pmf {
    probs: Vec<f64>,
    log2p: Vec<f64>,
    h: f64,
}

impl Pmf {
    pub fn new(probs: Vec<f64>) -> Result<Self, Error> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution(probs));
        }
        let mut sum = 0.0;
        for &q in &probs {
            if !q.is_finite() || q < 0.0 {
                return Err(Error::InvalidDistribution(probs));
            }
            sum += q;
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(probs));
        }
        let log2p: Vec<f64> = probs
            .iter()
            .map(|&q| if q > 0.0 { q.log2() } else { f64::NEG_INFINITY })
            .collect();
        // Canonical entropy: accumulate in ascending symbol order, the same
        // order log2_prob_counts uses, so window tests and entropy agree.
        let mut h = 0.0;
        for (&q, &l) in probs.iter().zip(&log2p) {
            if q > 0.0 {
                h -= q * l;
            }
        }
        Ok(Pmf { probs, log2p, h })
    }

    /// Two-symbol pmf with `Pr(1) = p1`.
    pub fn bernoulli(p1: f64) -> Result<Self, Error> {
        if !(0.0..=1.0).contains(&p1) {
            return Err(Error::invalid(format!("probability {p1} outside [0, 1]")));
        }
        Pmf::new(vec![1.0 - p1, p1])
    }

    pub fn uniform(k: usize) -> Self {
        assert!(k >= 1);
        Pmf::new(vec![1.0 / k as f64; k]).expect("uniform pmf is valid")
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn prob(&self, s: usize) -> f64 {
        self.probs[s]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Entropy in bits, fixed at construction.
    pub fn entropy(&self) -> f64 {
        self.h
    }

    /// One draw by inversion of the cumulative distribution.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let x: f64 = rng.random();
        let mut acc = 0.0;
        for (s, &q) in self.probs.iter().enumerate() {
            acc += q;
            if x < acc {
                return s;
            }
        }
        // Rounding can leave acc a hair under 1; charge the last symbol.
        self.probs.len() - 1
    }
}

/// Entropy of a pmf in bits.
pub fn entropy(p: &Pmf) -> f64 {
    p.entropy()
}

/// Entropy of a joint pmf. Identical to [`entropy`]; named for call sites
/// that hold a pmf over tuples.
pub fn joint_entropy(joint: &Pmf) -> f64 {
    joint.entropy()
}

/// Entropy of the remaining coordinate of a two-coordinate joint pmf,
/// conditioned on coordinate `given` (0 or 1). Index convention: symbol
/// `2*u1 + u2`, first coordinate in the high bit.
pub fn conditional_entropy(joint: &Pmf, given: usize) -> f64 {
    assert_eq!(joint.alphabet_size(), 4, "expected a pmf over bit pairs");
    assert!(given < 2);
    joint.entropy() - marginal(joint, 2, &[given]).entropy()
}

/// Marginal of a joint pmf over `k` binary coordinates onto the coordinates
/// in `keep` (strictly increasing). Coordinate 0 occupies the highest bit of
/// the symbol index; kept coordinates retain their relative order.
pub fn marginal(joint: &Pmf, k: usize, keep: &[usize]) -> Pmf {
    assert_eq!(joint.alphabet_size(), 1usize << k);
    assert!(!keep.is_empty() && keep.iter().all(|&c| c < k));
    assert!(keep.windows(2).all(|w| w[0] < w[1]));
    let m = keep.len();
    let mut probs = vec![0.0; 1 << m];
    for s in 0..(1usize << k) {
        let mut t = 0usize;
        for (j, &c) in keep.iter().enumerate() {
            t |= ((s >> (k - 1 - c)) & 1) << (m - 1 - j);
        }
        probs[t] += joint.probs[s];
    }
    Pmf::new(probs).expect("marginal of a valid pmf is valid")
}

/// Joint pmf of two independent coordinates; `a` lands in the high bits.
pub fn product(a: &Pmf, b: &Pmf) -> Pmf {
    let mut probs = Vec::with_capacity(a.alphabet_size() * b.alphabet_size());
    for &pa in &a.probs {
        for &pb in &b.probs {
            probs.push(pa * pb);
        }
    }
    Pmf::new(probs).expect("product of valid pmfs is valid")
}

/// Blocklength and slack of a typicality test.
#[derive(Clone, Copy, Debug)]
pub struct TypicalityParams {
    n: usize,
    eps: f64,
}

impl TypicalityParams {
    pub fn new(n: usize, eps: f64) -> Result<Self, Error> {
        if n < 1 {
            return Err(Error::invalid("blocklength must be at least 1"));
        }
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::invalid(format!("slack {eps} must be positive")));
        }
        Ok(TypicalityParams { n, eps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
}

/// Log2-probability of a sequence under `p`, in counting form: one multiply
/// per alphabet symbol, accumulated in ascending symbol order. Every
/// typicality route uses this form so that a sequence, its symbol counts,
/// and its composition class give the identical float.
pub fn log2_prob_counts(p: &Pmf, counts: &[u64]) -> f64 {
    debug_assert_eq!(counts.len(), p.alphabet_size());
    let mut lp = 0.0;
    for (&c, &l) in counts.iter().zip(&p.log2p) {
        if c > 0 {
            lp += c as f64 * l;
        }
    }
    lp
}

/// Log2-probability of an i.i.d. sequence; -inf when any symbol has
/// probability zero.
pub fn log2_prob(p: &Pmf, seq: &[usize]) -> f64 {
    let mut counts = vec![0u64; p.alphabet_size()];
    for &s in seq {
        counts[s] += 1;
    }
    log2_prob_counts(p, &counts)
}

fn window_contains(p: &Pmf, tp: &TypicalityParams, lp: f64) -> bool {
    let x = -lp / tp.n as f64;
    let h = p.h;
    x > h - tp.eps + BOUNDARY_GUARD && x < h + tp.eps - BOUNDARY_GUARD
}

/// Typicality test on symbol counts; `counts` must sum to the blocklength.
pub fn is_typical_counts(p: &Pmf, counts: &[u64], tp: &TypicalityParams) -> bool {
    debug_assert_eq!(counts.iter().sum::<u64>() as usize, tp.n);
    window_contains(p, tp, log2_prob_counts(p, counts))
}

/// Whether `seq` lies in the typical set: empirical per-symbol
/// log-probability strictly within ε of the entropy. A sequence touching a
/// zero-probability symbol is never typical.
pub fn is_typical(seq: &[usize], p: &Pmf, tp: &TypicalityParams) -> bool {
    assert_eq!(seq.len(), tp.n);
    window_contains(p, tp, log2_prob(p, seq))
}

/// All typical sequences of length `tp.n`, grouped by composition class.
///
/// Walks composition classes rather than the full `k^n` product space:
/// typicality depends only on symbol counts, so each class is tested once
/// and its distinct arrangements are emitted only when the class passes.
/// Errors once the output would exceed [`ENUMERATION_CAP`].
pub fn enumerate_typical(p: &Pmf, tp: &TypicalityParams) -> Result<Vec<Vec<usize>>, Error> {
    let k = p.alphabet_size();
    let mut counts = vec![0u64; k];
    let mut out = Vec::new();
    descend_compositions(p, tp, 0, tp.n as u64, &mut counts, &mut out)?;
    Ok(out)
}

fn descend_compositions(
    p: &Pmf,
    tp: &TypicalityParams,
    sym: usize,
    left: u64,
    counts: &mut Vec<u64>,
    out: &mut Vec<Vec<usize>>,
) -> Result<(), Error> {
    if sym + 1 == counts.len() {
        counts[sym] = left;
        if is_typical_counts(p, counts, tp) {
            emit_class(counts, out)?;
        }
        counts[sym] = 0;
        return Ok(());
    }
    for c in (0..=left).rev() {
        counts[sym] = c;
        descend_compositions(p, tp, sym + 1, left - c, counts, out)?;
    }
    counts[sym] = 0;
    Ok(())
}

/// Emits every arrangement of the multiset described by `counts`, in
/// lexicographic order, respecting the enumeration cap.
fn emit_class(counts: &[u64], out: &mut Vec<Vec<usize>>) -> Result<(), Error> {
    let mut seq = Vec::new();
    for (s, &c) in counts.iter().enumerate() {
        for _ in 0..c {
            seq.push(s);
        }
    }
    loop {
        if out.len() as u64 >= ENUMERATION_CAP {
            return Err(Error::EnumerationTooLarge {
                limit: ENUMERATION_CAP,
            });
        }
        out.push(seq.clone());
        if !next_permutation(&mut seq) {
            return Ok(());
        }
    }
}

/// Rearranges `seq` into its lexicographic successor; false at the last one.
fn next_permutation(seq: &mut [usize]) -> bool {
    if seq.len() < 2 {
        return false;
    }
    let mut i = seq.len() - 1;
    while i > 0 && seq[i - 1] >= seq[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = seq.len() - 1;
    while seq[j] <= seq[i - 1] {
        j -= 1;
    }
    seq.swap(i - 1, j);
    seq[i..].reverse();
    true
}

/// `n` i.i.d. draws from `p`; a pure function of the rng stream.
pub fn sample_iid<R: Rng + ?Sized>(p: &Pmf, n: usize, rng: &mut R) -> Vec<usize> {
    (0..n).map(|_| p.sample(rng)).collect()
}

/// Number of typical sequences, or None once the count passes `cap`. Walks
/// the same composition classes as [`enumerate_typical`] but only counts
/// arrangements, so it is cheap to call before deciding whether a full
/// enumeration is affordable.
pub(crate) fn count_typical(p: &Pmf, tp: &TypicalityParams, cap: u64) -> Option<u64> {
    // Relabeling symbols permutes sequences bijectively, so the total over
    // a probability-sorted copy is the same. Sorting descending and walking
    // counts largest-first reaches the typical shell (counts near n p_s)
    // right away, so an oversized set trips the cap early instead of after
    // a crawl through atypical corners of the composition space.
    let mut probs = p.probs().to_vec();
    probs.sort_by(|a, b| b.partial_cmp(a).expect("pmf entries are finite"));
    let sorted = Pmf::new(probs).expect("a permuted pmf is still a pmf");
    let m = sorted.alphabet_size();
    let cost: Vec<f64> = sorted.log2p.iter().map(|l| -l).collect();
    // Suffix extremes of the finite costs, for pruning subtrees whose every
    // completion misses the window. Infinite costs are excluded: a typical
    // completion never touches a zero-probability symbol.
    let mut suffix_min = vec![f64::INFINITY; m + 1];
    let mut suffix_max = vec![f64::NEG_INFINITY; m + 1];
    for s in (0..m).rev() {
        suffix_min[s] = suffix_min[s + 1];
        suffix_max[s] = suffix_max[s + 1];
        if cost[s].is_finite() {
            suffix_min[s] = suffix_min[s].min(cost[s]);
            suffix_max[s] = suffix_max[s].max(cost[s]);
        }
    }
    let n = tp.n() as f64;
    let walk = CountWalk {
        p: &sorted,
        tp,
        cost,
        suffix_min,
        suffix_max,
        lo: n * (sorted.entropy() - tp.eps()),
        hi: n * (sorted.entropy() + tp.eps()),
        cap,
    };
    let mut counts = vec![0u64; m];
    let mut total = 0u64;
    if walk.descend(0, tp.n() as u64, 0.0, &mut counts, &mut total) {
        Some(total)
    } else {
        None
    }
}

/// Pruning margin for the counting walk, far above float drift and far
/// below any window anyone would use.
const PRUNE_SLACK: f64 = 1e-6;

/// State shared across the counting recursion: the sorted pmf, per-symbol
/// costs -log2 p, their suffix extremes, the unnormalized typicality window
/// and the abort cap.
struct CountWalk<'a> {
    p: &'a Pmf,
    tp: &'a TypicalityParams,
    cost: Vec<f64>,
    suffix_min: Vec<f64>,
    suffix_max: Vec<f64>,
    lo: f64,
    hi: f64,
    cap: u64,
}

impl CountWalk<'_> {
    /// Adds the arrangements of every typical composition extending the
    /// first `sym` fixed counts, `spent` being their cost so far; false
    /// aborts the walk once `total` passes the cap.
    fn descend(
        &self,
        sym: usize,
        left: u64,
        spent: f64,
        counts: &mut [u64],
        total: &mut u64,
    ) -> bool {
        let leftf = left as f64;
        // Cheapest and costliest completions bracket every leaf under this
        // node; prune when even they cannot land in the window. (0 * inf is
        // NaN, which correctly fails both comparisons: nothing left to
        // place means the bracket is empty, not infinite.)
        if spent + leftf * self.suffix_min[sym] > self.hi + PRUNE_SLACK
            || spent + leftf * self.suffix_max[sym] < self.lo - PRUNE_SLACK
        {
            return true;
        }
        if sym + 1 == counts.len() {
            counts[sym] = left;
            if is_typical_counts(self.p, counts, self.tp) {
                *total = total.saturating_add(class_arrangements(counts, self.cap));
            }
            counts[sym] = 0;
            return *total <= self.cap;
        }
        for c in (0..=left).rev() {
            counts[sym] = c;
            // Skipping a zero-probability symbol must not poison `spent`
            // with 0 * inf.
            let add = if c == 0 { 0.0 } else { c as f64 * self.cost[sym] };
            if !self.descend(sym + 1, left - c, spent + add, counts, total) {
                counts[sym] = 0;
                return false;
            }
        }
        counts[sym] = 0;
        true
    }
}

/// Distinct sequences realizing a composition, saturating just past `cap`:
/// a product of binomials drawing each symbol's positions from the pool.
fn class_arrangements(counts: &[u64], cap: u64) -> u64 {
    let capw = cap as u128;
    let mut size: u128 = 1;
    let mut pool = 0u64;
    for &c in counts {
        pool += c;
        size = size.saturating_mul(binomial_capped(pool, c, capw));
        if size > capw {
            return cap.saturating_add(1);
        }
    }
    size as u64
}

/// C(n, k), exiting just past `cap`. The running value after step i is
/// C(n, i + 1), nondecreasing until the symmetric midpoint, so stopping
/// early never undercounts.
fn binomial_capped(n: u64, k: u64, cap: u128) -> u128 {
    let k = k.min(n - k);
    let mut value: u128 = 1;
    for i in 0..k {
        value = value * (n - i) as u128 / (i + 1) as u128;
        if value > cap {
            return value;
        }
    }
    value
}
