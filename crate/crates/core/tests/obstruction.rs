use slag_core::foundations::AngleClass;
use slag_core::obstruction::{hl_obstruction, homology_term, CalibratedSummand, HlVerdict};

#[test]
fn homology_term_is_one_exactly_on_multiples() {
    for n in 1..=6usize {
        for k in 1..=2 * n as i64 {
            for ka in 1..=2 * n as i64 {
                let one = (homology_term(k - ka, n) - 1.0).abs() <= 1e-12;
                assert_eq!(one, (k - ka) % n as i64 == 0, "n={n} k={k} ka={ka}");
            }
        }
    }
}

fn summands(ks: &[i64], n: usize, scale: f64) -> Vec<CalibratedSummand> {
    ks.iter()
        .enumerate()
        .map(|(i, &k)| CalibratedSummand::new(AngleClass::new(k, n as i64).unwrap(), n, scale * (1.0 + i as f64)).unwrap())
        .collect()
}

#[test]
fn verdicts_over_all_subsets() {
    for n in 2..=4usize {
        let m = 2 * n;
        for mask in 1u32..(1 << m) {
            let ks: Vec<i64> = (0..m).filter(|b| mask & (1 << b) != 0).map(|b| b as i64 + 1).collect();
            let verdict = hl_obstruction(&summands(&ks, n, 1.0), n).unwrap();
            let congruent = ks.iter().all(|k| (k - ks[0]) % n as i64 == 0);
            match &verdict {
                HlVerdict::NeverHl => assert!(!congruent),
                HlVerdict::Candidates { ks: c } => {
                    assert!(congruent);
                    let r = (ks[0] - 1).rem_euclid(n as i64) as usize + 1;
                    assert_eq!(c, &vec![r, r + n]);
                }
            }
            assert_eq!(hl_obstruction(&summands(&ks, n, 37.5), n).unwrap(), verdict);
            let reversed: Vec<i64> = ks.iter().rev().copied().collect();
            assert_eq!(hl_obstruction(&summands(&reversed, n, 1.0), n).unwrap(), verdict);
        }
    }
}

#[test]
fn full_rotation() {
    for n in 2..=6usize {
        let ks: Vec<i64> = (1..=2 * n as i64).collect();
        assert_eq!(hl_obstruction(&summands(&ks, n, 1.0), n).unwrap(), HlVerdict::NeverHl);
    }
}
