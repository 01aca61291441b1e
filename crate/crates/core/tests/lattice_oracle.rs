mod oracles;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nilcover::lattice::{quotient_invariants, smith_normal_form, IntMatrix};
use oracles::residue_enumeration;

fn to_matrix(n: usize, rows: &[Vec<i64>]) -> IntMatrix {
    IntMatrix::from_rows(n, rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()).unwrap()
}

fn det3(rows: &[Vec<i64>]) -> i64 {
    match rows.len() {
        1 => rows[0][0],
        2 => rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0],
        _ => {
            let m = rows;
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
    }
}

#[test]
fn quotient_order_matches_residue_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..500 {
        let n = rng.gen_range(1..=3);
        let m = rng.gen_range(1..=3);
        let rows: Vec<Vec<i64>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(-6..=6)).collect()).collect();
        let t = quotient_invariants(n, &to_matrix(n, &rows)).unwrap();
        let (order, free_rank) = residue_enumeration(&rows, n);
        assert_eq!(t.free_rank, free_rank, "{rows:?}");
        assert_eq!(t.order(), order, "{rows:?}");
    }
}

proptest! {
    #[test]
    fn diagonal_is_a_divisibility_chain(rows in prop::collection::vec(prop::collection::vec(-20i64..=20, 4), 1..5)) {
        let d = smith_normal_form(&to_matrix(4, &rows));
        prop_assert!(d.iter().all(|x| !x.is_negative()));
        for p in d.windows(2) {
            if p[0].is_zero() {
                prop_assert!(p[1].is_zero());
            } else {
                prop_assert!((&p[1] % &p[0]).is_zero());
            }
        }
    }

    #[test]
    fn diagonal_product_is_determinant(n in 1usize..=3, entries in prop::collection::vec(-9i64..=9, 9)) {
        let rows: Vec<Vec<i64>> = (0..n).map(|i| entries[i * 3..i * 3 + n].to_vec()).collect();
        let det = det3(&rows);
        let d = smith_normal_form(&to_matrix(n, &rows));
        let prod = d.iter().fold(BigInt::one(), |acc, x| acc * x);
        prop_assert_eq!(prod, BigInt::from(det.abs()));
    }

    #[test]
    fn invariant_under_unimodular_row_operations(
        rows in prop::collection::vec(prop::collection::vec(-8i64..=8, 3), 1..4),
        ops in prop::collection::vec((0usize..3, 0usize..3, 0u8..3), 0..6),
    ) {
        let before = quotient_invariants(3, &to_matrix(3, &rows)).unwrap();
        let mut r = rows.clone();
        let m = r.len();
        for (i, j, kind) in ops {
            let (i, j) = (i % m, j % m);
            match kind {
                0 => r.swap(i, j),
                1 => r[i].iter_mut().for_each(|x| *x = -*x),
                _ if i != j => {
                    let add = r[j].clone();
                    r[i].iter_mut().zip(add).for_each(|(x, y)| *x += y);
                }
                _ => {}
            }
        }
        prop_assert_eq!(quotient_invariants(3, &to_matrix(3, &r)).unwrap(), before);
    }
}
