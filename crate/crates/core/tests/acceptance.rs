//! Acceptance gate: one test per release criterion, each printing a
//! PASS/FAIL line (visible with --nocapture) before asserting. Monte Carlo
//! criteria run on fixed seeds with envelopes wide enough for the binomial
//! noise at the stated trial counts.

use gf2lab::capacity::{
    cma_sum_capacity, gd_upper_bound, nsma_sum_capacity, nsma_sum_capacity_coarse, p_unequal_mc,
    InputDepChannel,
};
use gf2lab::channel::{ChannelSpec, ChannelSymbol};
use gf2lab::experiment::{decay_sweep, run, CodeFamily, Command, ExperimentConfig, MacKind};
use gf2lab::gf2::{BitMatrix, BitVector};
use gf2lab::info::{binary_entropy, Pmf};
use gf2lab::network::{example2_rates, example3_rates, CascadeSpec, RelayPolicy};
use gf2lab::point::check_output_independence;
use gf2lab::sysmac::{
    build_optimal_code, bursty_code_rate, max_code_rate, max_onerows_oracle, region_code_rate,
    Rate, RedundancyAt,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use std::time::{Duration, Instant};

fn check(id: &str, ok: bool, detail: String) {
    println!("{id} {}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{id}: {detail}");
}

fn within(t: Instant, limit: Duration) -> bool {
    t.elapsed() < limit
}

fn h2(q: f64) -> f64 {
    binary_entropy(q).unwrap()
}

fn mc_config(command: Command, seed: u64, trials: usize) -> ExperimentConfig {
    ExperimentConfig {
        command,
        seed,
        trials,
        threads: 1,
        out: None,
    }
}

fn strictly_decreasing(rates: &[f64]) -> bool {
    rates.windows(2).all(|w| w[1] < w[0])
}

#[test]
fn c01_capacity_gap_golden_values() {
    let t = Instant::now();
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_gf2lab"))
        .env_remove("GF2LAB_SEED")
        .args(["capacity", "gap", "--alpha", "0,0.5,0.5,1"])
        .output()
        .expect("spawn gf2lab");
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    let mut vals = [f64::NAN; 3];
    for tok in text.split_whitespace() {
        for (i, key) in ["cma=", "nsma=", "gap="].iter().enumerate() {
            if let Some(v) = tok.strip_prefix(key) {
                vals[i] = v.parse().unwrap_or(f64::NAN);
            }
        }
    }
    let ok = out.status.success()
        && (vals[0] - 1.0).abs() < 1e-6
        && (vals[1] - 0.5).abs() < 1e-6
        && (vals[2] - 0.5).abs() < 1e-6
        && within(t, Duration::from_secs(1));
    check(
        "c01",
        ok,
        format!("corner-channel capacities: stdout {:?} in {:?}", text.trim(), t.elapsed()),
    );
}

#[test]
fn c02_gap_grid_maximum_is_half() {
    let t = Instant::now();
    const STEP: usize = 16;
    // The coarse optimizer lower-bounds the separate-coding capacity, so
    // its gap upper-bounds the true gap. Shortlist by the cheap bound,
    // then settle every near-maximal channel with the full optimizer.
    let shortlist: Vec<[f64; 4]> = (0..(STEP + 1).pow(4))
        .into_par_iter()
        .filter_map(|i| {
            let cell = |k: u32| ((i / (STEP + 1).pow(k)) % (STEP + 1)) as f64 / STEP as f64;
            let alpha = [cell(0), cell(1), cell(2), cell(3)];
            let ch = InputDepChannel::new(alpha).unwrap();
            let bound = cma_sum_capacity(&ch).value - nsma_sum_capacity_coarse(&ch).value;
            (bound > 0.5 - 1e-3).then_some(alpha)
        })
        .collect();
    let max_gap = shortlist
        .par_iter()
        .map(|&alpha| {
            let ch = InputDepChannel::new(alpha).unwrap();
            cma_sum_capacity(&ch).value - nsma_sum_capacity(&ch).value
        })
        .reduce(|| 0.0, f64::max);
    let ok = max_gap <= 0.5 + 1e-6 && max_gap >= 0.5 - 1e-3 && within(t, Duration::from_secs(300));
    check(
        "c02",
        ok,
        format!(
            "gap over the 1/16 grid: max {max_gap:.9} from {} near-maximal channels in {:?}",
            shortlist.len(),
            t.elapsed()
        ),
    );
}

#[test]
fn c03_unequal_capacity_probability_is_a_third() {
    let t = Instant::now();
    let rep = run(&mc_config(Command::CapacityPUnequal, 0xACC3, 1_000_000)).unwrap();
    let cells: Vec<f64> = rep.rows[0].iter().map(|c| c.parse().unwrap()).collect();
    let p = cells[0];
    let placements = &cells[1..5];
    let mut rng = ChaCha12Rng::seed_from_u64(0x3ACC);
    let direct = p_unequal_mc(1_000_000, &mut rng);
    let ok = (0.331..=0.336).contains(&p)
        && (0.331..=0.336).contains(&direct)
        && placements.iter().all(|e| (0.081..=0.086).contains(e))
        && within(t, Duration::from_secs(30));
    check(
        "c03",
        ok,
        format!("p={p} direct={direct} placements={placements:?} in {:?}", t.elapsed()),
    );
}

#[test]
fn c04_gap_bound_peaks_only_on_the_corners() {
    let corners = [gd_upper_bound(0.0, 1.0).unwrap(), gd_upper_bound(1.0, 0.0).unwrap()];
    let mut interior_max = f64::NEG_INFINITY;
    for i in 1..64 {
        for j in 1..64 {
            let g = gd_upper_bound(i as f64 / 64.0, j as f64 / 64.0).unwrap();
            interior_max = interior_max.max(g);
        }
    }
    let ok = corners.iter().all(|c| (c - 0.5).abs() < 1e-9) && interior_max < 0.5;
    check(
        "c04",
        ok,
        format!("corners {corners:?}, interior 1/64-grid max {interior_max:.9}"),
    );
}

#[test]
fn c05_two_level_closed_form_matches_numeric_search() {
    let mut rng = ChaCha12Rng::seed_from_u64(0xACC5);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let (a, b) = loop {
            let a = rng.random::<f64>();
            let b = rng.random::<f64>();
            if (a - b).abs() > 1e-3 {
                break (a, b);
            }
        };
        let (lo, hi) = (a.min(b), a.max(b));
        // Mixed cells anywhere between the extremes leave them extreme.
        let mid = |r: &mut ChaCha12Rng| lo + (hi - lo) * r.random::<f64>();
        let ch = InputDepChannel::new([a, mid(&mut rng), mid(&mut rng), b]).unwrap();
        let closed = cma_sum_capacity(&ch).value;

        // Weight p on the low level; concave in p, so grid then ternary.
        let f = |p: f64| h2(p * lo + (1.0 - p) * hi) - (p * h2(lo) + (1.0 - p) * h2(hi));
        let mut best = (0.0, f(0.0));
        for i in 1..=512 {
            let p = i as f64 / 512.0;
            let v = f(p);
            if v > best.1 {
                best = (p, v);
            }
        }
        let (mut x0, mut x1) = ((best.0 - 1.0 / 512.0).max(0.0), (best.0 + 1.0 / 512.0).min(1.0));
        for _ in 0..200 {
            let m0 = x0 + (x1 - x0) / 3.0;
            let m1 = x1 - (x1 - x0) / 3.0;
            if f(m0) < f(m1) {
                x0 = m0;
            } else {
                x1 = m1;
            }
        }
        let numeric = f(0.5 * (x0 + x1)).max(best.1);
        worst = worst.max((closed - numeric).abs());
    }
    let ok = worst < 1e-6;
    check("c05", ok, format!("largest closed-vs-numeric deviation {worst:.3e}"));
}

#[test]
fn c06_compression_error_decays_above_entropy_only() {
    let t = Instant::now();
    let h = h2(0.11);
    let good = decay_sweep(CodeFamily::Source, 0.75 - h, &[8, 12, 16], 2000, 0xACC6, 1).unwrap();
    let good_rates: Vec<f64> = good.rows.iter().map(|r| r.error_rate).collect();
    let bad = decay_sweep(CodeFamily::Source, 0.4 - h, &[8, 12, 16], 2000, 0xBCC6, 1).unwrap();
    let bad_rates: Vec<f64> = bad.rows.iter().map(|r| r.error_rate).collect();
    let ok = strictly_decreasing(&good_rates)
        && bad_rates.iter().all(|r| *r > 0.5)
        && within(t, Duration::from_secs(120));
    check(
        "c06",
        ok,
        format!("rate 0.75: {good_rates:?}; rate 0.4: {bad_rates:?} in {:?}", t.elapsed()),
    );
}

#[test]
fn c07_erasure_error_decays_below_capacity_only() {
    let t = Instant::now();
    let good = decay_sweep(CodeFamily::Erasure, 0.2, &[32, 64, 128], 10_000, 0xACC7, 1).unwrap();
    let good_rates: Vec<f64> = good.rows.iter().map(|r| r.error_rate).collect();
    let bad = decay_sweep(CodeFamily::Erasure, -0.05, &[128], 10_000, 0xBCC7, 1).unwrap();
    let bad_rate = bad.rows[0].error_rate;
    let ok = strictly_decreasing(&good_rates)
        && *good_rates.last().unwrap() < 0.01
        && bad_rate > 0.3
        && within(t, Duration::from_secs(120));
    check(
        "c07",
        ok,
        format!("rate 0.5: {good_rates:?}; rate 0.75 at n=128: {bad_rate} in {:?}", t.elapsed()),
    );
}

#[test]
fn c08_time_sharing_decays_inside_both_regions() {
    let t = Instant::now();
    let mac = decay_sweep(CodeFamily::MacTimeShare, 0.8 - 0.6125, &[64, 128], 2000, 0xACC8, 1)
        .unwrap();
    let mac_rates: Vec<f64> = mac.rows.iter().map(|r| r.error_rate).collect();
    let mac_bad = decay_sweep(CodeFamily::MacTimeShare, -0.1, &[128], 1000, 0xBCC8, 1).unwrap();
    let bc = decay_sweep(CodeFamily::BcastTimeShare, 1.0 / 12.0, &[64, 128], 2000, 0xACC9, 1)
        .unwrap();
    let bc_rates: Vec<f64> = bc.rows.iter().map(|r| r.error_rate).collect();
    let bc_bad = decay_sweep(CodeFamily::BcastTimeShare, -0.2, &[128], 1000, 0xBCC9, 1).unwrap();
    let ok = strictly_decreasing(&mac_rates)
        && mac_bad.rows[0].error_rate > 0.2
        && strictly_decreasing(&bc_rates)
        && bc_bad.rows[0].error_rate > 0.2;
    check(
        "c08",
        ok,
        format!(
            "mac sum 0.6125: {mac_rates:?}, sum 0.9 at n=128: {}; \
             bcast (0.4, 0.25): {bc_rates:?}, 1.2x load at n=128: {} in {:?}",
            mac_bad.rows[0].error_rate,
            bc_bad.rows[0].error_rate,
            t.elapsed()
        ),
    );
}

#[test]
fn c09_systematic_codes_are_exhaustively_correct_and_extremal() {
    let t = Instant::now();
    let mut counterexamples = 0usize;
    for na in 1..=6usize {
        for nb in 1..=na {
            let code = build_optimal_code(na, nb).unwrap();
            let best = max_code_rate(na, nb).unwrap();
            assert_eq!(code.code_rate(), Rate::new((na + nb) as u64, (na + 2 * nb) as u64));
            assert_eq!(code.code_rate(), best);
            for av in 0..1u64 << na {
                for bv in 0..1u64 << nb {
                    let a = bits(av, na);
                    let b = bits(bv, nb);
                    if code.decode(&code.encode(&a, &b)) != (a, b) {
                        counterexamples += 1;
                    }
                }
            }
            // Rate optimality happens exactly on the two corner layouts,
            // and there the longer codeword is pure recovered information.
            for ma in 0..=nb {
                for mb in 0..=na {
                    let r = region_code_rate(na, nb, ma, mb).unwrap();
                    let Some(rate) = r.rate else { continue };
                    let (va, vb) = r.recovered.unwrap();
                    let (la, lb) = (na + ma, nb + mb);
                    let at_corner =
                        (ma == nb && mb == 0) || (na == nb && ma == 0 && mb == na);
                    if (rate == best) != at_corner {
                        counterexamples += 1;
                    }
                    if at_corner && va + vb != la.max(lb) {
                        counterexamples += 1;
                    }
                }
            }
        }
    }
    let ok = counterexamples == 0 && within(t, Duration::from_secs(60));
    check(
        "c09",
        ok,
        format!("exhaustive decode and extremality scan: {counterexamples} counterexamples in {:?}", t.elapsed()),
    );
}

fn bits(value: u64, len: usize) -> BitVector {
    let mut v = BitVector::zeros(len);
    for i in 0..len {
        if (value >> i) & 1 == 1 {
            v.set(i, true);
        }
    }
    v
}

#[test]
fn c10_onerows_oracle_matches_the_insertion_formula() {
    let mut rng = ChaCha12Rng::seed_from_u64(0xACCA);
    let mut checked = 0usize;
    while checked < 500 {
        let na = rng.random_range(1..=5usize);
        let nb = rng.random_range(1..=na.min(3));
        let s = rng.random_range(0..=na.min(3));
        // Unit-row insertions stay independent of the interference stack
        // as long as no interfered column appears together with its
        // partner.
        let mut cols: Vec<usize> = Vec::new();
        while cols.len() < s {
            let c = rng.random_range(0..na + nb);
            let partner_taken = c < nb && cols.contains(&(na + c))
                || c >= na && cols.contains(&(c - na));
            if !cols.contains(&c) && !partner_taken {
                cols.push(c);
            }
        }
        let isolated = cols.iter().filter(|&&c| (nb..na).contains(&c)).count();
        let mut rows: Vec<BitVector> = (0..nb)
            .map(|j| {
                let mut v = BitVector::zeros(na + nb);
                v.set(j, true);
                v.set(na + j, true);
                v
            })
            .collect();
        for &c in &cols {
            let mut v = BitVector::zeros(na + nb);
            v.set(c, true);
            rows.push(v);
        }
        let got = max_onerows_oracle(&BitMatrix::from_rows(&rows)).unwrap();
        assert_eq!(
            got,
            2 * s - isolated,
            "na={na} nb={nb} cols={cols:?}"
        );
        checked += 1;
    }
    check("c10", true, format!("{checked} random instances equal 2s - k"));
}

#[test]
fn c11_bursty_rate_matches_its_closed_form() {
    let mut worst: f64 = 0.0;
    for (na, nb) in [(4usize, 4usize), (5, 3), (2, 2)] {
        let mut grid_min = f64::INFINITY;
        for i in 0..=32 {
            for j in 0..=32 {
                let (pa, pb) = (i as f64 / 32.0, j as f64 / 32.0);
                let (rate, side) = bursty_code_rate(pa, pb, na, nb).unwrap();
                let (la, lb) = (pa * na as f64, pb * nb as f64);
                let (hi, lo) = (la.max(lb), la.min(lb));
                let expect = if hi == 0.0 { 1.0 } else { (hi + lo) / (hi + 2.0 * lo) };
                worst = worst.max((rate - expect).abs());
                let side_ok = match side {
                    RedundancyAt::A => la >= lb,
                    RedundancyAt::B => lb >= la,
                    RedundancyAt::Either => la == lb,
                };
                assert!(side_ok, "side {side:?} for loads ({la}, {lb})");
                if na == nb {
                    grid_min = grid_min.min(rate);
                }
            }
        }
        if na == nb {
            assert_eq!(grid_min, 2.0 / 3.0, "full-load floor for na = nb = {na}");
            assert_eq!(bursty_code_rate(1.0, 1.0, na, nb).unwrap().0, 2.0 / 3.0);
        }
    }
    let near_one = bursty_code_rate(1e-3, 1.0, 4, 4).unwrap().0;
    let ok = worst < 1e-12 && (1.0 - near_one).abs() < 1e-3;
    check(
        "c11",
        ok,
        format!("closed-form deviation {worst:.2e}; rate at a 1e-3 load {near_one:.6}"),
    );
}

#[test]
fn c12_cascade_analytics_and_empirical_erasure_rate() {
    let mut rng = ChaCha12Rng::seed_from_u64(0xACCC);
    let two = example2_rates(0.5, 8, 0, &mut rng).unwrap();
    let three = example3_rates(0.2, 0.2, 8, 0, &mut rng).unwrap();
    let sep = two.get("separated").unwrap().analytic;
    let e2e = two.get("end-to-end").unwrap().analytic;
    let fwd = three.get("forward").unwrap().analytic;
    let relay = three.get("decode-at-relay").unwrap().analytic;

    let spec = CascadeSpec::new(
        &[ChannelSpec::Erasure { q1: 0.3 }, ChannelSpec::Erasure { q1: 0.25 }],
        vec![RelayPolicy::Forward],
    )
    .unwrap();
    let x = BitVector::random(100_000, &mut rng);
    let symbols = spec.transmit(&x, &mut rng).unwrap();
    let erased =
        symbols.iter().filter(|s| matches!(s, ChannelSymbol::Erased)).count() as f64 / 1e5;
    let analytic_erasure = spec.forwarding_erasure_rate();

    let ok = (sep - 0.5).abs() < 1e-12
        && (e2e - 0.75).abs() < 1e-12
        && (fwd - 0.64).abs() < 1e-12
        && (relay - 0.8).abs() < 1e-12
        && (analytic_erasure - (1.0 - 0.7 * 0.75)).abs() < 1e-12
        && (erased - analytic_erasure).abs() <= 0.01;
    check(
        "c12",
        ok,
        format!(
            "two-hop {sep}/{e2e}, relay {fwd}/{relay}, cascade erasures {erased} vs {analytic_erasure}"
        ),
    );
}

#[test]
fn c13_output_independence_follows_column_weights() {
    let grid = [0.1, 0.3, 0.45];
    let mut cases = 0usize;
    for m in 1..=3usize {
        for k in 1..=3usize {
            for mask in 0..1u32 << (m * k) {
                let mut a = BitMatrix::zeros(m, k);
                for r in 0..m {
                    for c in 0..k {
                        if (mask >> (r * k + c)) & 1 == 1 {
                            a.set(r, c, true);
                        }
                    }
                }
                let multi = (0..k).any(|c| (0..m).filter(|&r| a.get(r, c)).count() >= 2);
                for combo in 0..3usize.pow(k as u32) {
                    let marginals: Vec<Pmf> = (0..k)
                        .map(|j| Pmf::bernoulli(grid[(combo / 3usize.pow(j as u32)) % 3]).unwrap())
                        .collect();
                    let oi = check_output_independence(&a, &marginals).unwrap();
                    assert_eq!(
                        oi.independent, !multi,
                        "matrix mask {mask:#b} ({m}x{k}), marginals combo {combo}"
                    );
                    cases += 1;
                }
            }
        }
    }
    check("c13", true, format!("{cases} matrix/marginal combinations classified"));
}

#[test]
fn c14_distributed_compression_decays_inside_the_region() {
    let t = Instant::now();
    let pair = [0.45, 0.05, 0.05, 0.45];
    let inside = run(&mc_config(
        Command::Mac {
            kind: MacKind::Sw,
            ns: vec![8, 12, 16],
            joint: pair,
            rates: (0.875, 0.875),
            lambda: 0.5,
            channel: ChannelSpec::MacErasure { q1: 0.0 },
            eps: 0.3,
        },
        0xACCE,
        600,
    ))
    .unwrap();
    let in_rates: Vec<f64> = inside.rows.iter().map(|r| r[3].parse().unwrap()).collect();
    let outside = run(&mc_config(
        Command::Mac {
            kind: MacKind::Sw,
            ns: vec![8, 12, 16],
            joint: pair,
            rates: (0.3, 0.3),
            lambda: 0.5,
            channel: ChannelSpec::MacErasure { q1: 0.0 },
            eps: 0.3,
        },
        0xBCCE,
        400,
    ))
    .unwrap();
    let out_rates: Vec<f64> = outside.rows.iter().map(|r| r[3].parse().unwrap()).collect();
    let ok = strictly_decreasing(&in_rates)
        && out_rates.iter().all(|r| *r > 0.5)
        && within(t, Duration::from_secs(180));
    check(
        "c14",
        ok,
        format!("inside: {in_rates:?}; outside: {out_rates:?} in {:?}", t.elapsed()),
    );
}
