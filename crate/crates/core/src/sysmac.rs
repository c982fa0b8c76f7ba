//! Systematic codes for the noise-free two-user adder channel. Exact
//! code-rate analytics over the redundancy plane, the rate-optimal
//! generator/decoder construction with an explicit decoding matrix, a
//! brute-force row-space oracle for how many bits any decoder could ever
//! peel out, and the redundancy placement rule for bursty arrivals.

use std::fmt;

use num_rational::Ratio;

use crate::error::Error;
use crate::gf2::{row_reduce, BitMatrix, BitVector};

/// Exact code rate; information bits over transmitted bits.
pub type Rate = Ratio<u64>;

/// Parameter point of the systematic construction: information lengths
/// `na >= nb >= 1` (the constructor swaps the transmitters to normalize)
/// and redundancy lengths inside the analysis rectangle `ma <= nb`,
/// `mb <= na`. Anything outside the rectangle only lengthens codewords
/// without recovering more bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SysMacParams {
    pub na: usize,
    pub nb: usize,
    pub ma: usize,
    pub mb: usize,
}

impl SysMacParams {
    pub fn new(na: usize, nb: usize, ma: usize, mb: usize) -> Result<Self, Error> {
        let (na, nb, ma, mb) = if na >= nb {
            (na, nb, ma, mb)
        } else {
            (nb, na, mb, ma)
        };
        if nb == 0 {
            return Err(Error::invalid(
                "both transmitters need at least one information bit",
            ));
        }
        if ma > nb || mb > na {
            return Err(Error::invalid(format!(
                "redundancy ({ma}, {mb}) lies outside the analysis rectangle for ({na}, {nb})"
            )));
        }
        Ok(SysMacParams { na, nb, ma, mb })
    }

    pub fn la(&self) -> usize {
        self.na + self.ma
    }

    pub fn lb(&self) -> usize {
        self.nb + self.mb
    }

    /// Slot length: at least one transmitter spans the whole slot.
    pub fn slot(&self) -> usize {
        self.la().max(self.lb())
    }
}

/// Ceiling on the code rate of any scheme with information lengths
/// `na >= nb >= 1`: the sum-rate constraint forces the slot to hold at
/// least `na + nb` bits while the shorter codeword still spans at least
/// `nb` of its own.
pub fn max_code_rate(na: usize, nb: usize) -> Result<Rate, Error> {
    if nb == 0 || na < nb {
        return Err(Error::invalid(
            "information lengths must satisfy na >= nb >= 1",
        ));
    }
    Ok(Ratio::new((na + nb) as u64, (na + 2 * nb) as u64))
}

/// Generator pair and decoding matrix for one systematic code point.
///
/// Invariant: `dec * [gen_a | gen_b]` consists of `va + vb` distinct
/// weight-1 rows, `va` of them hitting the first `na` columns and `vb` the
/// last `nb`, so each decoder output coordinate is exactly one source bit.
#[derive(Clone, Debug)]
pub struct SysMacCode {
    gen_a: BitMatrix,
    gen_b: BitMatrix,
    dec: BitMatrix,
    params: SysMacParams,
    va: usize,
    vb: usize,
}

/// Builds the rate-optimal code: all redundancy on the longer vector,
/// sized like the shorter one. The first `nb` channel bits carry
/// `a_j + b_j`, the next `na - nb` carry the uninterfered tail of `a`, and
/// the last `nb` repeat `a_1..a_nb`; the decoder reads the tail directly,
/// the repeats for the head of `a`, and cancels the repeats out of the
/// interfered bits to free `b`.
pub fn build_optimal_code(na: usize, nb: usize) -> Result<SysMacCode, Error> {
    if nb == 0 || na < nb {
        return Err(Error::invalid(
            "information lengths must satisfy na >= nb >= 1",
        ));
    }
    let params = SysMacParams::new(na, nb, nb, 0)?;
    let m = na + nb;

    let id_a = BitMatrix::identity(na);
    let repeats: Vec<usize> = (0..nb).collect();
    let gen_a = id_a.vstack(&id_a.select_rows(&repeats));
    let gen_b = BitMatrix::identity(nb).vstack(&BitMatrix::zeros(na, nb));

    let mut dec = BitMatrix::zeros(m, m);
    for j in 0..nb {
        dec.set(j, na + j, true);
    }
    for i in nb..na {
        dec.set(i, i, true);
    }
    for j in 0..nb {
        dec.set(na + j, j, true);
        dec.set(na + j, na + j, true);
    }

    let code = SysMacCode {
        gen_a,
        gen_b,
        dec,
        params,
        va: na,
        vb: nb,
    };
    debug_assert!(code.decoder_rows_are_unit());
    Ok(code)
}

impl SysMacCode {
    pub fn params(&self) -> SysMacParams {
        self.params
    }

    pub fn generator_a(&self) -> &BitMatrix {
        &self.gen_a
    }

    pub fn generator_b(&self) -> &BitMatrix {
        &self.gen_b
    }

    pub fn decoder(&self) -> &BitMatrix {
        &self.dec
    }

    pub fn va(&self) -> usize {
        self.va
    }

    pub fn vb(&self) -> usize {
        self.vb
    }

    /// The two generators side by side, one row per channel bit.
    pub fn combined_generator(&self) -> BitMatrix {
        hconcat(&self.gen_a, &self.gen_b)
    }

    pub fn code_rate(&self) -> Rate {
        Ratio::new(
            (self.va + self.vb) as u64,
            (self.params.la() + self.params.lb()) as u64,
        )
    }

    pub fn sum_rate(&self) -> Rate {
        Ratio::new((self.va + self.vb) as u64, self.params.slot() as u64)
    }

    pub fn rate_a(&self) -> Rate {
        Ratio::new(self.va as u64, self.params.slot() as u64)
    }

    pub fn rate_b(&self) -> Rate {
        Ratio::new(self.vb as u64, self.params.slot() as u64)
    }

    pub fn encode(&self, a: &BitVector, b: &BitVector) -> BitVector {
        assert_eq!(a.len(), self.params.na);
        assert_eq!(b.len(), self.params.nb);
        self.gen_a.mul_vec(a).xor(&self.gen_b.mul_vec(b))
    }

    /// Applies the decoding matrix and splits the output into the recovered
    /// `a` bits followed by the recovered `b` bits, each in index order.
    /// The channel is noise-free, so this never fails.
    pub fn decode(&self, y: &BitVector) -> (BitVector, BitVector) {
        assert_eq!(y.len(), self.params.na + self.params.nb);
        let q = self.dec.mul_vec(y);
        let mut a = BitVector::zeros(self.va);
        for i in 0..self.va {
            a.set(i, q.get(i));
        }
        let mut b = BitVector::zeros(self.vb);
        for j in 0..self.vb {
            b.set(j, q.get(self.va + j));
        }
        (a, b)
    }

    fn decoder_rows_are_unit(&self) -> bool {
        let wa = self.dec.mul_mat(&self.gen_a);
        let wb = self.dec.mul_mat(&self.gen_b);
        let w = hconcat(&wa, &wb);
        let mut seen = vec![false; w.cols()];
        for r in 0..w.rows() {
            let row = w.row(r);
            if row.count_ones() != 1 {
                return false;
            }
            let pos = (0..w.cols()).find(|&c| row.get(c)).unwrap();
            if seen[pos] {
                return false;
            }
            seen[pos] = true;
        }
        true
    }
}

fn hconcat(a: &BitMatrix, b: &BitMatrix) -> BitMatrix {
    assert_eq!(a.rows(), b.rows());
    let mut out = BitMatrix::zeros(a.rows(), a.cols() + b.cols());
    for r in 0..a.rows() {
        for c in 0..a.cols() {
            if a.get(r, c) {
                out.set(r, c, true);
            }
        }
        for c in 0..b.cols() {
            if b.get(r, c) {
                out.set(r, a.cols() + c, true);
            }
        }
    }
    out
}

/// Counts the weight-1 vectors reachable by linear combinations of the
/// rows of `l`, by walking its entire row space in Gray-code order. This is
/// the ceiling on how many source bits any linear decoder built on `l` can
/// isolate. The row space has 2^rank elements; rank is capped at 20.
pub fn max_onerows_oracle(l: &BitMatrix) -> Result<usize, Error> {
    let reduction = row_reduce(l);
    let r = reduction.rank();
    if r > 20 {
        return Err(Error::EnumerationTooLarge { limit: 1 << 20 });
    }
    let basis: Vec<BitVector> = (0..r).map(|i| reduction.reduced.row(i)).collect();
    let mut current = BitVector::zeros(l.cols());
    let mut count = 0usize;
    for step in 1u64..(1u64 << r) {
        let flip = step.trailing_zeros() as usize;
        current.xor_assign(&basis[flip]);
        if current.count_ones() == 1 {
            count += 1;
        }
    }
    Ok(count)
}

/// Sub-regions of the redundancy rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    One,
    Two,
    Three,
    /// No optimal code exists here: either the codewords have equal length,
    /// so some appended row mixes both sources without freeing either, or
    /// the short side's redundancy is positive yet too small to outrun the
    /// length difference.
    Excluded,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::One => write!(f, "1"),
            Region::Two => write!(f, "2"),
            Region::Three => write!(f, "3"),
            Region::Excluded => write!(f, "excluded"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RegionRate {
    pub region: Region,
    /// Formula value for classified points; absent on excluded ones.
    pub rate: Option<Rate>,
    /// Recoverable information bits (va, vb) for classified points.
    pub recovered: Option<(usize, usize)>,
}

/// Classifies a redundancy point and evaluates its region's code-rate
/// formula.
pub fn region_code_rate(na: usize, nb: usize, ma: usize, mb: usize) -> Result<RegionRate, Error> {
    if nb == 0 || na < nb {
        return Err(Error::invalid(
            "information lengths must satisfy na >= nb >= 1",
        ));
    }
    if ma > nb || mb > na {
        return Err(Error::invalid(format!(
            "redundancy ({ma}, {mb}) lies outside the analysis rectangle for ({na}, {nb})"
        )));
    }
    let la = na + ma;
    let lb = nb + mb;
    let excluded = RegionRate {
        region: Region::Excluded,
        rate: None,
        recovered: None,
    };
    if la == lb {
        return Ok(excluded);
    }
    if mb == 0 {
        let va = ma + na - nb;
        let vb = ma;
        return Ok(RegionRate {
            region: Region::One,
            rate: Some(Ratio::new((va + vb) as u64, (na + nb + ma) as u64)),
            recovered: Some((va, vb)),
        });
    }
    if mb <= na - nb {
        return Ok(excluded);
    }
    if la > lb {
        let va = ma + na - nb;
        let vb = ma;
        Ok(RegionRate {
            region: Region::Two,
            rate: Some(Ratio::new((va + vb) as u64, (na + nb + ma + mb) as u64)),
            recovered: Some((va, vb)),
        })
    } else {
        let va = mb;
        let vb = mb - (na - nb);
        Ok(RegionRate {
            region: Region::Three,
            rate: Some(Ratio::new((va + vb) as u64, (na + nb + ma + mb) as u64)),
            recovered: Some((va, vb)),
        })
    }
}

/// Which transmitter carries the redundancy in the bursty optimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RedundancyAt {
    A,
    B,
    Either,
}

/// Expected-code-rate optimum for slotted transmitters that fire with
/// probabilities `pa`, `pb`. Redundancy goes to the transmitter with the
/// larger mean load `p * n`, sized by the smaller mean load; the rate is
/// `(n1 + n2) / (n1 + 2 n2)` on the ordered mean loads. A silent side
/// removes all interference and the rate climbs to 1; both sides silent is
/// degenerate and reported the same way with a free choice of side.
pub fn bursty_code_rate(
    pa: f64,
    pb: f64,
    na: usize,
    nb: usize,
) -> Result<(f64, RedundancyAt), Error> {
    for p in [pa, pb] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!(
                "transmission probability {p} outside [0, 1]"
            )));
        }
    }
    if nb == 0 || na < nb {
        return Err(Error::invalid(
            "information lengths must satisfy na >= nb >= 1",
        ));
    }
    let sa = pa * na as f64;
    let sb = pb * nb as f64;
    if sa == 0.0 && sb == 0.0 {
        return Ok((1.0, RedundancyAt::Either));
    }
    let n1 = sa.max(sb);
    let n2 = sa.min(sb);
    let rate = (n1 + n2) / (n1 + 2.0 * n2);
    let side = if sa > sb {
        RedundancyAt::A
    } else if sb > sa {
        RedundancyAt::B
    } else {
        RedundancyAt::Either
    };
    Ok((rate, side))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn rng(seed: u64) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(seed)
    }

    fn rr(n: u64, d: u64) -> Rate {
        Ratio::new(n, d)
    }

    #[test]
    fn max_code_rate_formula_and_ordering() {
        for n in 1..=8usize {
            assert_eq!(max_code_rate(n, n).unwrap(), rr(2, 3));
        }
        assert_eq!(max_code_rate(5, 3).unwrap(), rr(8, 11));
        assert_eq!(max_code_rate(100, 1).unwrap(), rr(101, 102));
        assert!(max_code_rate(3, 5).is_err());
        assert!(max_code_rate(3, 0).is_err());
    }

    #[test]
    fn params_normalize_and_validate() {
        let p = SysMacParams::new(3, 5, 3, 1).unwrap();
        assert_eq!((p.na, p.nb, p.ma, p.mb), (5, 3, 1, 3));
        assert_eq!(p.la(), 6);
        assert_eq!(p.lb(), 6);
        assert_eq!(p.slot(), 6);
        assert!(SysMacParams::new(5, 3, 4, 0).is_err());
        assert!(SysMacParams::new(5, 3, 0, 6).is_err());
        assert!(SysMacParams::new(5, 0, 0, 0).is_err());
    }

    #[test]
    fn optimal_code_has_the_promised_shape() {
        let code = build_optimal_code(5, 3).unwrap();
        assert_eq!((code.params().ma, code.params().mb), (3, 0));
        assert_eq!(code.generator_a().rows(), 8);
        assert_eq!(code.generator_a().cols(), 5);
        assert_eq!(code.generator_b().rows(), 8);
        assert_eq!(code.generator_b().cols(), 3);
        assert_eq!(code.va() + code.vb(), 8);
        assert_eq!(code.code_rate(), rr(8, 11));
        assert_eq!(code.code_rate(), max_code_rate(5, 3).unwrap());
        assert_eq!(code.sum_rate(), rr(1, 1));
        assert_eq!(code.rate_a(), rr(5, 8));
        assert_eq!(code.rate_b(), rr(3, 8));

        // Only the first la rows of each generator are nonzero; here la
        // spans everything and lb stops after the identity block.
        let lb = code.params().lb();
        for r in lb..code.generator_b().rows() {
            assert!(code.generator_b().row(r).is_zero());
        }

        // The decoder output is literally (a, b): each row of the combined
        // action matrix is a distinct unit row in order.
        let wa = code.decoder().mul_mat(code.generator_a());
        let wb = code.decoder().mul_mat(code.generator_b());
        let w = hconcat(&wa, &wb);
        assert_eq!(w, BitMatrix::identity(8));

        // Equal lengths: redundancy lands on the first transmitter.
        let sym = build_optimal_code(3, 3).unwrap();
        assert_eq!((sym.params().ma, sym.params().mb), (3, 0));
        assert_eq!(sym.code_rate(), rr(2, 3));
    }

    #[test]
    fn tiny_code_round_trips_exhaustively() {
        let code = build_optimal_code(2, 1).unwrap();
        assert_eq!(code.code_rate(), rr(3, 4));
        for mask in 0..8u32 {
            let mut a = BitVector::zeros(2);
            a.set(0, mask & 1 != 0);
            a.set(1, mask & 2 != 0);
            let mut b = BitVector::zeros(1);
            b.set(0, mask & 4 != 0);
            let y = code.encode(&a, &b);
            let (ahat, bhat) = code.decode(&y);
            assert_eq!(ahat, a);
            assert_eq!(bhat, b);
        }
    }

    #[test]
    fn random_messages_round_trip() {
        let code = build_optimal_code(6, 4).unwrap();
        let mut g = rng(0x5751);
        let zero_y = code.encode(&BitVector::zeros(6), &BitVector::zeros(4));
        assert!(zero_y.is_zero());
        let (za, zb) = code.decode(&zero_y);
        assert!(za.is_zero() && zb.is_zero());
        for _ in 0..1000 {
            let a = BitVector::random(6, &mut g);
            let b = BitVector::random(4, &mut g);
            let (ahat, bhat) = code.decode(&code.encode(&a, &b));
            assert_eq!(ahat, a);
            assert_eq!(bhat, b);
        }
    }

    #[test]
    fn onerows_oracle_counts_reachable_unit_vectors() {
        assert_eq!(max_onerows_oracle(&BitMatrix::identity(4)).unwrap(), 4);

        // A repeated row leaves the row space unchanged.
        let e = BitMatrix::identity(3);
        let dup = BitMatrix::from_rows(&[e.row(0), e.row(0), e.row(1)]);
        let clean = BitMatrix::from_rows(&[e.row(0), e.row(1)]);
        assert_eq!(
            max_onerows_oracle(&dup).unwrap(),
            max_onerows_oracle(&clean).unwrap()
        );

        // Pure interference rows pair every unit vector with another.
        let j = interference_rows(4, 2);
        assert_eq!(max_onerows_oracle(&BitMatrix::from_rows(&j)).unwrap(), 0);
    }

    // Rows e_j + e_{na+j} of width na + nb: bit j of each source summed.
    fn interference_rows(na: usize, nb: usize) -> Vec<BitVector> {
        (0..nb)
            .map(|jj| {
                let mut v = BitVector::zeros(na + nb);
                v.set(jj, true);
                v.set(na + jj, true);
                v
            })
            .collect()
    }

    #[test]
    fn oracle_matches_the_insertion_count_formula() {
        // Insert s independent unit rows into the interference stack for
        // (na, nb) = (4, 2); k of them isolated in the uninterfered middle
        // columns. The reachable unit vectors number 2s - k: each inserted
        // row in an interfered column frees its partner too, the middle
        // ones free only themselves.
        let na = 4;
        let nb = 2;
        let mut g = rng(0x1B0);
        use rand::Rng;
        for _ in 0..200 {
            let s = g.random_range(0..=2usize);
            let mut cols: Vec<usize> = Vec::new();
            while cols.len() < s {
                let c = g.random_range(0..na + nb);
                let partner_taken = c < nb && cols.contains(&(na + c))
                    || c >= na && cols.contains(&(c - na));
                if !cols.contains(&c) && !partner_taken {
                    cols.push(c);
                }
            }
            let k = cols.iter().filter(|&&c| (nb..na).contains(&c)).count();
            let mut rows = interference_rows(na, nb);
            for &c in &cols {
                let mut v = BitVector::zeros(na + nb);
                v.set(c, true);
                rows.push(v);
            }
            let l = BitMatrix::from_rows(&rows);
            assert_eq!(crate::gf2::rank(&l), nb + s, "insertions must stay independent");
            assert_eq!(
                max_onerows_oracle(&l).unwrap(),
                2 * s - k,
                "cols {cols:?}"
            );
        }
    }

    #[test]
    fn full_recovery_is_the_row_space_optimum() {
        for (na, nb) in [(2, 1), (3, 3), (5, 3), (6, 4)] {
            let code = build_optimal_code(na, nb).unwrap();
            let l = code.combined_generator();
            assert_eq!(max_onerows_oracle(&l).unwrap(), na + nb);
        }
    }

    #[test]
    fn region_classification_examples() {
        let r = region_code_rate(5, 3, 3, 0).unwrap();
        assert_eq!(r.region, Region::One);
        assert_eq!(r.rate, Some(rr(8, 11)));
        assert_eq!(r.recovered, Some((5, 3)));

        let r = region_code_rate(5, 3, 0, 3).unwrap();
        assert_eq!(r.region, Region::Three);
        assert_eq!(r.rate, Some(rr(4, 11)));
        assert_eq!(r.recovered, Some((3, 1)));

        let r = region_code_rate(5, 3, 3, 4).unwrap();
        assert_eq!(r.region, Region::Two);
        assert_eq!(r.rate, Some(rr(8, 15)));

        // Equal codeword lengths never host an optimal code.
        assert_eq!(region_code_rate(5, 3, 2, 4).unwrap().region, Region::Excluded);
        assert_eq!(region_code_rate(3, 3, 0, 0).unwrap().region, Region::Excluded);
        // Nor does a short positive redundancy on the small side.
        assert_eq!(region_code_rate(5, 3, 1, 2).unwrap().region, Region::Excluded);
        assert_eq!(region_code_rate(5, 3, 1, 1).unwrap().region, Region::Excluded);

        assert!(region_code_rate(5, 3, 4, 0).is_err());
        assert!(region_code_rate(3, 5, 0, 0).is_err());
    }

    #[test]
    fn rate_optimality_happens_exactly_at_the_corner_points() {
        // Over every classified point of the rectangle, the maximal code
        // rate is attained exactly where the shorter vector carries no
        // redundancy and the longer carries nb (or the mirrored corner when
        // the lengths tie); those points also have unit sum rate.
        for na in 1..=6usize {
            for nb in 1..=na {
                let best = max_code_rate(na, nb).unwrap();
                for ma in 0..=nb {
                    for mb in 0..=na {
                        let r = region_code_rate(na, nb, ma, mb).unwrap();
                        let Some(rate) = r.rate else { continue };
                        let at_corner =
                            (ma == nb && mb == 0) || (na == nb && ma == 0 && mb == na);
                        assert_eq!(
                            rate == best,
                            at_corner,
                            "({na},{nb},{ma},{mb}) rate {rate} vs best {best}"
                        );
                        let (va, vb) = r.recovered.unwrap();
                        let slot = (na + ma).max(nb + mb);
                        let sum = rr((va + vb) as u64, slot as u64);
                        if at_corner {
                            assert_eq!(sum, rr(1, 1));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn region_two_never_beats_region_one() {
        for na in 1..=6usize {
            for nb in 1..=na {
                let best_one = (0..=nb)
                    .filter_map(|ma| region_code_rate(na, nb, ma, 0).unwrap().rate)
                    .max()
                    .unwrap();
                assert_eq!(best_one, max_code_rate(na, nb).unwrap());
                for ma in 0..=nb {
                    for mb in 0..=na {
                        let r = region_code_rate(na, nb, ma, mb).unwrap();
                        if r.region == Region::Two {
                            assert!(r.rate.unwrap() <= best_one);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn bursty_rate_examples() {
        // Equal mean loads: the floor, side free.
        let (rate, side) = bursty_code_rate(0.5, 0.5, 4, 4).unwrap();
        assert!((rate - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(side, RedundancyAt::Either);
        let (rate, side) = bursty_code_rate(0.25, 0.5, 4, 2).unwrap();
        assert!((rate - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(side, RedundancyAt::Either);

        let (rate, side) = bursty_code_rate(0.5, 0.25, 4, 4).unwrap();
        assert!((rate - 0.75).abs() < 1e-12);
        assert_eq!(side, RedundancyAt::A);

        // One side silent: no interference at all.
        let (rate, side) = bursty_code_rate(0.0, 0.7, 4, 3).unwrap();
        assert_eq!(rate, 1.0);
        assert_eq!(side, RedundancyAt::B);
        let (rate, side) = bursty_code_rate(0.7, 0.0, 4, 3).unwrap();
        assert_eq!(rate, 1.0);
        assert_eq!(side, RedundancyAt::A);
        let (rate, side) = bursty_code_rate(0.0, 0.0, 4, 3).unwrap();
        assert_eq!(rate, 1.0);
        assert_eq!(side, RedundancyAt::Either);

        assert!(bursty_code_rate(1.2, 0.5, 4, 3).is_err());
        assert!(bursty_code_rate(0.5, 0.5, 3, 4).is_err());
    }

    #[test]
    fn bursty_rate_floors_at_two_thirds() {
        for (na, nb) in [(4usize, 4usize), (6, 3), (5, 2)] {
            for i in 0..=20usize {
                for j in 0..=20usize {
                    let pa = i as f64 / 20.0;
                    let pb = j as f64 / 20.0;
                    let (rate, _) = bursty_code_rate(pa, pb, na, nb).unwrap();
                    assert!(rate >= 2.0 / 3.0 - 1e-12);
                    let sa = pa * na as f64;
                    let sb = pb * nb as f64;
                    let tied = sa == sb && sa > 0.0;
                    assert_eq!(
                        (rate - 2.0 / 3.0).abs() < 1e-12,
                        tied,
                        "pa={pa} pb={pb} na={na} nb={nb}"
                    );
                    // The ratio form of the same rule must agree.
                    if pb > 0.0 {
                        let ab = (pa / pb) * (na as f64 / nb as f64);
                        let byratio = (1.0 + ab) / (1.0 + ab + ab.min(1.0));
                        assert!((rate - byratio).abs() < 1e-12);
                    }
                }
            }
        }
    }
}
