use gf2lab::sysmac::{max_code_rate, region_code_rate};

fn main() {
    for na in 1..=6usize {
        for nb in 1..=na {
            let best = max_code_rate(na, nb).unwrap();
            for ma in 0..=nb {
                for mb in 0..=na {
                    let r = region_code_rate(na, nb, ma, mb).unwrap();
                    let Some(rate) = r.rate else { continue };
                    let (va, vb) = r.recovered.unwrap();
                    let (la, lb) = (na + ma, nb + mb);
                    let min_side_red = if la > lb { mb } else { ma };
                    let unit_sum = va + vb == la.max(lb);
                    if (rate == best) != (min_side_red == 0 && unit_sum) {
                        println!(
                            "na={na} nb={nb} ma={ma} mb={mb} region={} rate={rate} best={best} va={va} vb={vb} la={la} lb={lb} red={min_side_red} unit={unit_sum}",
                            r.region
                        );
                    }
                }
            }
        }
    }
}
