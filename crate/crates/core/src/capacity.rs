//! Sum capacities for the two-user binary adder channel with input-dependent
//! noise: the cooperative (joint-input) maximum in closed form, the separate
//! (product-input) maximum numerically, the half-bit bound on their gap, and
//! the odds that a random channel separates them at all. Also the triangular
//! region bookkeeping used by the separation criteria.

use rand::Rng;

use crate::error::Error;
use crate::info::{binary_entropy, conditional_entropy, h2, Pmf};

/// Two-user adder channel with input-dependent binary noise, described by
/// `alpha[2a + b] = Pr(Y = 0 | X1 = a, X2 = b)`.
#[derive(Clone, Copy, Debug)]
pub struct InputDepChannel {
    alpha: [f64; 4],
}

impl InputDepChannel {
    pub fn new(alpha: [f64; 4]) -> Result<Self, Error> {
        for &a in &alpha {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::invalid(format!(
                    "channel parameter {a} outside [0, 1]"
                )));
            }
        }
        Ok(InputDepChannel { alpha })
    }

    pub fn alpha(&self) -> [f64; 4] {
        self.alpha
    }

    pub fn alpha_min(&self) -> f64 {
        self.alpha.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn alpha_max(&self) -> f64 {
        self.alpha.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// How a capacity value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Numeric,
}

/// Optimizing input law: a joint distribution over the four input cells, or
/// a product law given by each user's probability of sending the zero
/// symbol.
#[derive(Clone, Copy, Debug)]
pub enum ArgMax {
    Joint([f64; 4]),
    Product { p1: f64, p2: f64 },
}

pub struct CapacityResult {
    pub value: f64,
    pub argmax: ArgMax,
    pub method: Method,
}

/// Sum rate H(Y) - H(Y | X1, X2) for a product input law; `p1`, `p2` are
/// the zero-symbol probabilities.
fn product_rate(alpha: &[f64; 4], halpha: &[f64; 4], p1: f64, p2: f64) -> f64 {
    let w00 = p1 * p2;
    let w01 = p1 - w00;
    let w10 = p2 - w00;
    let w11 = 1.0 - p1 - p2 + w00;
    let y0 = w00 * alpha[0] + w01 * alpha[1] + w10 * alpha[2] + w11 * alpha[3];
    h2(y0) - (w00 * halpha[0] + w01 * halpha[1] + w10 * halpha[2] + w11 * halpha[3])
}

/// Best sum rate from weighting only two noise levels, mass `p` on `a` and
/// `1 - p` on `b`, along with that optimal `p`. The optimum output bias
/// solves H'(x) = chord slope of H between the levels, which lands between
/// them, so `p` is a genuine probability.
fn two_point(a: f64, b: f64) -> (f64, f64) {
    debug_assert!(a != b);
    let phi = (h2(b) - h2(a)) / (b - a);
    let x = 1.0 / (1.0 + phi.exp2());
    let p = (b - x) / (b - a);
    debug_assert!((-1e-6..=1.0 + 1e-6).contains(&p), "weight {p} escaped [0, 1]");
    let p = p.clamp(0.0, 1.0);
    let value = h2(x) - p * h2(a) - (1.0 - p) * h2(b);
    (value.max(0.0), p)
}

/// Cooperative sum capacity. The optimum concentrates on one cell with the
/// smallest noise level and one with the largest, so the search collapses to
/// the two-level closed form. With repeated extremes the placement is free;
/// we prefer cells sharing an input coordinate, since that support is a
/// product law and keeps separate coding lossless.
pub fn cma_sum_capacity(ch: &InputDepChannel) -> CapacityResult {
    let a = ch.alpha;
    let lo = ch.alpha_min();
    let hi = ch.alpha_max();
    if lo == hi {
        // One noise level everywhere: the output says nothing about inputs.
        return CapacityResult {
            value: 0.0,
            argmax: ArgMax::Joint([1.0, 0.0, 0.0, 0.0]),
            method: Method::ClosedForm,
        };
    }
    let min_cells: Vec<usize> = (0..4).filter(|&i| a[i] == lo).collect();
    let max_cells: Vec<usize> = (0..4).filter(|&i| a[i] == hi).collect();
    let mut pair = (min_cells[0], max_cells[0]);
    'search: for &mc in &min_cells {
        for &xc in &max_cells {
            if mc ^ xc != 3 {
                pair = (mc, xc);
                break 'search;
            }
        }
    }
    let (value, p) = two_point(lo, hi);
    let mut joint = [0.0; 4];
    joint[pair.0] = p;
    joint[pair.1] = 1.0 - p;
    CapacityResult {
        value,
        argmax: ArgMax::Joint(joint),
        method: Method::ClosedForm,
    }
}

/// Separate-coding sum capacity: maximize the product-input sum rate over
/// `(p1, p2)` by a coarse grid followed by compass refinement. The surface
/// is not concave in general, so several of the best grid points seed the
/// refinement independently.
pub fn nsma_sum_capacity(ch: &InputDepChannel) -> CapacityResult {
    nsma_with(ch, 256, 4)
}

/// Cheaper optimizer profile for bulk channel sweeps; still a sound lower
/// bound on the separate-coding sum capacity.
pub fn nsma_sum_capacity_coarse(ch: &InputDepChannel) -> CapacityResult {
    nsma_with(ch, 32, 2)
}

fn nsma_with(ch: &InputDepChannel, steps: usize, starts: usize) -> CapacityResult {
    let alpha = ch.alpha;
    let h = [h2(alpha[0]), h2(alpha[1]), h2(alpha[2]), h2(alpha[3])];
    let mut tops = [(f64::NEG_INFINITY, 0.0f64, 0.0f64); 8];
    for i in 0..=steps {
        let p1 = i as f64 / steps as f64;
        for j in 0..=steps {
            let p2 = j as f64 / steps as f64;
            let v = product_rate(&alpha, &h, p1, p2);
            if v > tops[7].0 {
                tops[7] = (v, p1, p2);
                let mut k = 7;
                while k > 0 && tops[k].0 > tops[k - 1].0 {
                    tops.swap(k, k - 1);
                    k -= 1;
                }
            }
        }
    }
    let sep = 2.0 / steps as f64;
    let mut seeds: Vec<(f64, f64, f64)> = Vec::new();
    for &t in &tops {
        if t.0.is_finite()
            && seeds.len() < starts
            && !seeds
                .iter()
                .any(|s| (s.1 - t.1).abs() <= sep && (s.2 - t.2).abs() <= sep)
        {
            seeds.push(t);
        }
    }
    let mut best = (f64::NEG_INFINITY, 0.5, 0.5);
    for (v, p1, p2) in seeds {
        let refined = refine(&alpha, &h, p1, p2, v, 1.0 / steps as f64, 1e-9);
        if refined.0 > best.0 {
            best = refined;
        }
    }
    CapacityResult {
        value: best.0.max(0.0),
        argmax: ArgMax::Product {
            p1: best.1,
            p2: best.2,
        },
        method: Method::Numeric,
    }
}

/// Compass search with a shrinking step; axis and diagonal moves.
fn refine(
    alpha: &[f64; 4],
    h: &[f64; 4],
    mut p1: f64,
    mut p2: f64,
    mut best: f64,
    initial_step: f64,
    tol: f64,
) -> (f64, f64, f64) {
    let mut step = initial_step;
    while step > tol {
        let mut improved = false;
        for (d1, d2) in [
            (step, 0.0),
            (-step, 0.0),
            (0.0, step),
            (0.0, -step),
            (step, step),
            (step, -step),
            (-step, step),
            (-step, -step),
        ] {
            let q1 = (p1 + d1).clamp(0.0, 1.0);
            let q2 = (p2 + d2).clamp(0.0, 1.0);
            let v = product_rate(alpha, h, q1, q2);
            if v > best {
                best = v;
                p1 = q1;
                p2 = q2;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (best, p1, p2)
}

/// Cooperative minus separate sum capacity; nonnegative because product laws
/// are a subset of joint laws.
pub fn capacity_gap(ch: &InputDepChannel) -> f64 {
    cma_sum_capacity(ch).value - nsma_sum_capacity(ch).value
}

/// Gap bound for a channel with corner noise levels `alpha`, `beta` and
/// level 1/2 on the mixed cells: the two-level joint maximum minus the rate
/// of the nearest symmetric product law. The projection takes `p1 = p2 = p`
/// with `(p^2, (1-p)^2)` closest in squared distance to the joint optimum's
/// cell weights. Meaningful as a bound only when the corner levels straddle
/// 1/2, which is where the maximum gap lives; returns 0 on equal levels.
pub fn gd_upper_bound(alpha: f64, beta: f64) -> Result<f64, Error> {
    if !(0.0..=1.0).contains(&alpha) || !(0.0..=1.0).contains(&beta) {
        return Err(Error::invalid("noise levels must lie in [0, 1]"));
    }
    if alpha == beta {
        return Ok(0.0);
    }
    let (cma, p00) = two_point(alpha, beta);
    let p = symmetric_projection(p00);
    let q = 1.0 - p;
    let y0 = p * p * alpha + p * q + q * q * beta;
    let rd = h2(y0) - p * p * h2(alpha) - 2.0 * p * q - q * q * h2(beta);
    Ok(cma - rd)
}

/// Root in [0, 1] of 2p^3 - 3p^2 + 2p = t. The cubic's derivative
/// 6(p - 1/2)^2 + 1/2 is strictly positive, so the real root is unique and
/// bisection cannot miss it.
fn symmetric_projection(t: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&t));
    let f = |p: f64| 2.0 * p * p * p - 3.0 * p * p + 2.0 * p - t;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = 0.5 * (lo + hi);
    assert!(f(p).abs() < 1e-9, "cubic root residual too large");
    p
}

/// Whether cooperative and separate sum capacities differ for this channel:
/// exactly when the strict noise minimum and maximum are unique and sit on
/// cells differing in both input coordinates. Any tie admits a placement
/// sharing a coordinate, which a product law reproduces.
pub fn capacities_unequal(ch: &InputDepChannel) -> bool {
    diagonal_extremes(&ch.alpha).is_some()
}

/// The (min, max) noise cells behind an unequal-capacity verdict, as
/// row-major cell indices. None exactly when the capacities agree.
pub fn extreme_cells(ch: &InputDepChannel) -> Option<(usize, usize)> {
    diagonal_extremes(&ch.alpha)
}

/// Unique strict minimum and maximum on diagonally opposed cells, if any.
fn diagonal_extremes(a: &[f64; 4]) -> Option<(usize, usize)> {
    let mut lo = 0;
    let mut hi = 0;
    for i in 1..4 {
        if a[i] < a[lo] {
            lo = i;
        }
        if a[i] > a[hi] {
            hi = i;
        }
    }
    let lo_unique = (0..4).all(|i| i == lo || a[i] > a[lo]);
    let hi_unique = (0..4).all(|i| i == hi || a[i] < a[hi]);
    if lo_unique && hi_unique && lo ^ hi == 3 {
        Some((lo, hi))
    } else {
        None
    }
}

/// Empirical frequency of unequal capacities over channels drawn uniformly
/// from the parameter cube.
pub fn p_unequal_mc<R: Rng>(trials: u64, rng: &mut R) -> f64 {
    assert!(trials >= 1);
    let mut hits = 0u64;
    for _ in 0..trials {
        let alpha = [
            rng.random::<f64>(),
            rng.random::<f64>(),
            rng.random::<f64>(),
            rng.random::<f64>(),
        ];
        if capacities_unequal(&InputDepChannel { alpha }) {
            hits += 1;
        }
    }
    hits as f64 / trials as f64
}

/// Triangular two-user capacity region: the pairs (R1, R2) with positive
/// parts and R1 + R2 below the sum capacity.
#[derive(Clone, Copy, Debug)]
pub struct TriangleRegion {
    pub sum_cap: f64,
}

/// Region of the erasure adder channel, sum capacity 1 - q.
pub fn erasure_mac_region(q: f64) -> Result<TriangleRegion, Error> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid(format!("erasure rate {q} outside [0, 1]")));
    }
    Ok(TriangleRegion { sum_cap: 1.0 - q })
}

/// Region of the additive-noise adder channel, sum capacity 1 - H(qz1).
pub fn additive_mac_region(qz1: f64) -> Result<TriangleRegion, Error> {
    Ok(TriangleRegion {
        sum_cap: 1.0 - binary_entropy(qz1)?,
    })
}

/// Corner constraints for distributed compression of a pair source.
#[derive(Clone, Copy, Debug)]
pub struct SwRegion {
    pub h1_given_2: f64,
    pub h2_given_1: f64,
    pub h_joint: f64,
}

/// Reads the corner constraints off a joint pmf over bit pairs.
pub fn slepian_wolf_region(joint: &Pmf) -> SwRegion {
    SwRegion {
        h1_given_2: conditional_entropy(joint, 1),
        h2_given_1: conditional_entropy(joint, 0),
        h_joint: joint.entropy(),
    }
}

/// Some rate pair compresses the source and still fits inside the channel
/// triangle. The corner constraints leave room exactly when the joint
/// entropy sits below the sum capacity.
pub fn region_overlap(sw: &SwRegion, cap: TriangleRegion) -> bool {
    let floor = sw.h_joint.max(sw.h1_given_2 + sw.h2_given_1);
    floor < cap.sum_cap
}

/// Separate source and channel coding loses nothing exactly when the
/// product-input region already fills the joint-input one.
pub fn separation_sufficient(nsma: TriangleRegion, cma: TriangleRegion) -> bool {
    (nsma.sum_cap - cma.sum_cap).abs() <= 1e-9
}
