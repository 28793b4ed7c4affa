//! Diagonal exit point against brute-force vertex enumeration of
//! `{omega >= 0, omega.P_j >= 1}`: the exit is `1 / min sum omega`.

use cytower::newton::{diagonal_exit, lct_at_origin, NewtonSupport};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Q = BigRational;

fn q(x: i64) -> Q {
    Q::from_integer(x.into())
}

fn gauss(mut m: Vec<Vec<Q>>) -> Option<Vec<Q>> {
    let n = m.len();
    for col in 0..n {
        let p = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, p);
        for r in 0..n {
            if r != col {
                let f = &m[r][col] / &m[col][col];
                for c in col..=n {
                    let t = &f * &m[col][c];
                    m[r][c] -= t;
                }
            }
        }
    }
    Some((0..n).map(|i| &m[i][n] / &m[i][i]).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

fn oracle_exit(nv: usize, pts: &[Vec<u32>]) -> Q {
    // constraint rows: (coeffs, rhs); first the points, then omega_k = 0
    let mut rows: Vec<(Vec<Q>, Q)> = pts
        .iter()
        .map(|p| (p.iter().map(|&e| q(e as i64)).collect(), Q::one()))
        .collect();
    for k in 0..nv {
        let mut e = vec![Q::zero(); nv];
        e[k] = Q::one();
        rows.push((e, Q::zero()));
    }
    let mut best: Option<Q> = None;
    for pick in combinations(rows.len(), nv) {
        let m: Vec<Vec<Q>> = pick
            .iter()
            .map(|&i| {
                let mut r = rows[i].0.clone();
                r.push(rows[i].1.clone());
                r
            })
            .collect();
        let Some(w) = gauss(m) else { continue };
        if w.iter().any(|x| x.is_negative()) {
            continue;
        }
        let feasible = pts.iter().all(|p| {
            let v: Q = w.iter().zip(p).map(|(a, &b)| a * q(b as i64)).sum();
            v >= Q::one()
        });
        if !feasible {
            continue;
        }
        let s: Q = w.iter().sum();
        if best.as_ref().is_none_or(|b| s < *b) {
            best = Some(s);
        }
    }
    best.expect("polyhedron has a vertex").recip()
}

#[test]
fn random_supports_match_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut checked = 0;
    while checked < 80 {
        let nv = rng.gen_range(1..=3);
        let npts = rng.gen_range(1..=5);
        let pts: Vec<Vec<u32>> = (0..npts)
            .map(|_| (0..nv).map(|_| rng.gen_range(0..=6)).collect())
            .filter(|p: &Vec<u32>| p.iter().any(|&e| e > 0))
            .collect();
        if pts.is_empty() {
            continue;
        }
        let support = NewtonSupport::new(nv, pts.clone()).unwrap();
        let exit = diagonal_exit(&support).unwrap();
        let expected = oracle_exit(nv, &support.points);
        assert_eq!(exit.c, expected, "support {pts:?}");
        assert!(exit.verify(&support));
        let lct = lct_at_origin(&support).unwrap();
        assert_eq!(lct, expected.recip().min(Q::one()));
        checked += 1;
    }
}

#[test]
fn diagonal_monomials_exit_at_their_exponent() {
    for nv in 1..=4usize {
        for a in 1..=4u32 {
            let support = NewtonSupport::new(nv, [vec![a; nv]]).unwrap();
            assert_eq!(diagonal_exit(&support).unwrap().c, q(a as i64));
        }
    }
}
