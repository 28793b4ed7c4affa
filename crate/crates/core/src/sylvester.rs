//! Sylvester numbers, the monomial weight function and the positive-weight
//! deformation monomials that coordinatize the moduli space at each level.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{to_i128, to_u128};

/// Default cap on the number of tuples `enumerate_positive` will materialize.
pub const DEFAULT_CAP: u64 = 10_000_000;

/// Largest level whose positive-monomial count is computed in practice.
pub const MAX_COUNT_LEVEL: usize = 5;

/// Integers attached to the Fermat-Sylvester polynomial `x_0^2 + x_1^3 + ... + x_n^{s_n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SylvesterContext {
    pub n: usize,
    /// `s_0, ..., s_n`.
    pub s: Vec<BigInt>,
    /// `d_n = s_0 * ... * s_n`.
    pub d: BigInt,
    /// `d_{n,j} = d_n / s_j`.
    pub d_row: Vec<BigInt>,
    /// Milnor number `prod (s_k - 1)`.
    pub mu: BigInt,
}

/// A deformation monomial `x_0^{i_0} ... x_n^{i_n}` together with its weight.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExponentTuple {
    pub i: Vec<u32>,
    pub weight: BigInt,
}

/// First `len` Sylvester numbers.
pub fn sylvester_numbers(len: usize) -> Vec<BigInt> {
    let mut s = Vec::with_capacity(len);
    let mut prod = BigInt::one();
    for _ in 0..len {
        let next = &prod + 1u32;
        prod *= &next;
        s.push(next);
    }
    s
}

impl SylvesterContext {
    pub fn new(n: usize) -> Self {
        let s = sylvester_numbers(n + 1);
        let d: BigInt = s.iter().product();
        let d_row = s.iter().map(|sk| &d / sk).collect();
        let mu = s.iter().map(|sk| sk - 1u32).product();
        SylvesterContext { n, s, d, d_row, mu }
    }

    /// Context one level down; `None` at `n = 0`.
    pub fn lower(&self) -> Option<SylvesterContext> {
        (self.n > 0).then(|| SylvesterContext::new(self.n - 1))
    }

    pub fn nvars(&self) -> usize {
        self.n + 1
    }

    /// `s_k` as u32; panics above the materializable range (s_5 still fits).
    pub fn s_u32(&self, k: usize) -> u32 {
        self.s[k].to_u32().expect("s_k exceeds u32; level too deep to materialize")
    }

    /// `w(i) = d_n - sum i_k d_{n,k}`; may be negative.
    pub fn weight(&self, i: &[u32]) -> Result<BigInt> {
        if i.len() != self.n + 1 {
            return Err(Error::LengthMismatch {
                expected: self.n + 1,
                got: i.len(),
            });
        }
        let mut w = self.d.clone();
        for (ik, dk) in i.iter().zip(&self.d_row) {
            w -= dk * *ik;
        }
        Ok(w)
    }

    /// Checks every arithmetic identity of the context exactly.
    pub fn check_invariants(&self) -> Result<()> {
        let fail = |what: String| Err(Error::Violation(what));
        if self.s[0] != BigInt::from(2) {
            return fail("s_0 != 2".into());
        }
        let mut prod = BigInt::one();
        for k in 0..self.n {
            prod *= &self.s[k];
            if self.s[k + 1] != &prod + 1u32 {
                return fail(format!("recursion fails at s_{}", k + 1));
            }
        }
        for j in 0..=self.n {
            for k in j + 1..=self.n {
                if !self.s[j].gcd(&self.s[k]).is_one() {
                    return fail(format!("gcd(s_{j}, s_{k}) != 1"));
                }
            }
        }
        let g = self.d_row.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if !g.is_one() {
            return fail(format!("gcd of d_row is {g}"));
        }
        let total: BigInt = self.d_row.iter().sum();
        if total + 1u32 != self.d {
            return fail("Egyptian fraction identity".into());
        }
        for k in 0..=self.n {
            if (&self.d_row[k] + 1u32).mod_floor(&self.s[k]) != BigInt::zero() {
                return fail(format!("d_{{n,{k}}} != -1 mod s_{k}"));
            }
            let others: BigInt = (0..=self.n)
                .filter(|&j| j != k)
                .map(|j| &self.d_row[j])
                .sum();
            if (others + 1u32).mod_floor(&self.d_row[k]) != BigInt::zero() {
                return fail(format!("sum_{{j != {k}}} d_{{n,j}} != -1 mod d_{{n,{k}}}"));
            }
        }
        Ok(())
    }

    /// Positive-weight tuples in the box `0 <= i_k <= s_k - 2`, lexicographic.
    pub fn enumerate_positive(&self, cap: u64) -> Result<Vec<ExponentTuple>> {
        let count = self.count_positive()?;
        if count > BigUint::from(cap) {
            return Err(Error::CapExceeded {
                count: count.to_string(),
                cap,
            });
        }
        let mut out = Vec::with_capacity(count.to_usize().unwrap_or(0));
        let mut cur = vec![0u32; self.n + 1];
        self.enumerate_rec(0, self.d.clone(), &mut cur, &mut out);
        Ok(out)
    }

    fn enumerate_rec(
        &self,
        k: usize,
        rem: BigInt,
        cur: &mut Vec<u32>,
        out: &mut Vec<ExponentTuple>,
    ) {
        if k > self.n {
            if rem.is_positive() {
                out.push(ExponentTuple {
                    i: cur.clone(),
                    weight: rem,
                });
            }
            return;
        }
        let top = self.s_u32(k) - 2;
        for ik in 0..=top {
            let r = &rem - &self.d_row[k] * ik;
            if !r.is_positive() {
                break;
            }
            cur[k] = ik;
            self.enumerate_rec(k + 1, r, cur, out);
        }
        cur[k] = 0;
    }

    /// `N_n = dim M_n + 1` without materializing tuples.
    ///
    /// Iterates prefixes `(i_0, ..., i_{n-1})` and counts the admissible last
    /// coordinate in closed form.
    pub fn count_positive(&self) -> Result<BigUint> {
        let n = self.n;
        let d = to_u128(&self.d, "d_n")?;
        let row: Vec<u128> = self
            .d_row
            .iter()
            .map(|x| to_u128(x, "d_{n,k}"))
            .collect::<Result<_>>()?;
        let tops: Vec<u128> = self
            .s
            .iter()
            .map(|x| to_u128(x, "s_k").map(|v| v - 2))
            .collect::<Result<_>>()?;
        let last = |rem: u128| -> u128 {
            // largest i_n with i_n * d_{n,n} < rem, clamped to [0, s_n - 2]
            ((rem - 1) / row[n]).min(tops[n]) + 1
        };
        if n == 0 {
            return Ok(BigUint::from(last(d)));
        }
        // split on the outermost prefix coordinate with a nontrivial range
        let split = (0..n).find(|&k| tops[k] > 0);
        let total: u128 = match split {
            None => last(d),
            Some(k0) => (0..=tops[k0])
                .into_par_iter()
                .map(|ik| {
                    let used = row[k0] * ik;
                    if used >= d {
                        return 0;
                    }
                    count_prefix(&row, &tops, k0 + 1, n, d - used, &last)
                })
                .sum(),
        };
        Ok(BigUint::from(total))
    }

    /// Number of negative-weight tuples in the deformation box.
    pub fn count_negative(&self) -> Result<BigUint> {
        let pos = BigInt::from(self.count_positive()?);
        let neg = &self.mu - pos;
        neg.to_biguint()
            .ok_or_else(|| Error::Violation("more positive tuples than mu".into()))
    }

    /// `dim M_n = N_n - 1`.
    pub fn dim(&self) -> Result<BigUint> {
        Ok(self.count_positive()? - 1u32)
    }

    /// Dimension of the ambient weighted projective space, as weights `(d_{n,0}, ..., d_{n,n}, 1)`.
    pub fn ambient_weights(&self) -> Vec<BigInt> {
        let mut w = self.d_row.clone();
        w.push(BigInt::one());
        w
    }

    pub fn d_i128(&self) -> Result<i128> {
        to_i128(&self.d, "d_n")
    }
}

fn count_prefix(
    row: &[u128],
    tops: &[u128],
    k: usize,
    n: usize,
    rem: u128,
    last: &impl Fn(u128) -> u128,
) -> u128 {
    if k == n {
        return last(rem);
    }
    let mut total = 0u128;
    for ik in 0..=tops[k] {
        let used = row[k] * ik;
        if used >= rem {
            break;
        }
        total += count_prefix(row, tops, k + 1, n, rem - used, last);
    }
    total
}

/// Multiset of weights of the moduli coordinates, sorted ascending.
pub fn weight_multiset(tuples: &[ExponentTuple]) -> Vec<BigInt> {
    let mut w: Vec<BigInt> = tuples.iter().map(|t| t.weight.clone()).collect();
    w.sort();
    w
}

/// Decimal estimates of the growth constants `s_n ~ c^{2^{n+1}}` and
/// `dim M_m + 1 ~ a c^{2^{m+2}} / (m-1)!`.
#[derive(Debug, Clone, Serialize)]
pub struct Asymptotics {
    pub depth: usize,
    pub c: f64,
    /// `c` lies in `[c - c_err, c]`.
    pub c_err: f64,
    pub c_digits: String,
    pub a: f64,
    pub a_level: usize,
    /// `(dim M_m + 1)(m-1)! / prod_{k=1..m} (s_k - 1)` at `m = a_level`.
    pub ratio: f64,
}

const FIXED_DIGITS: u32 = 40;

fn fixed_root_2pow(x_scaled: &BigUint, scale: &BigUint, times: usize) -> BigUint {
    let mut x = x_scaled.clone();
    for _ in 0..times {
        x = (&x * scale).sqrt();
    }
    x
}

fn fixed_to_f64(x: &BigUint, digits: u32) -> f64 {
    let s = x.to_string();
    let (int, frac) = if s.len() > digits as usize {
        s.split_at(s.len() - digits as usize)
    } else {
        ("0", s.as_str())
    };
    let frac = format!("{:0>width$}", frac, width = digits as usize);
    format!("{int}.{frac}").parse().unwrap_or(f64::NAN)
}

fn fixed_to_string(x: &BigUint, digits: u32, keep: usize) -> String {
    let s = format!("{:0>width$}", x.to_string(), width = digits as usize + 1);
    let (int, frac) = s.split_at(s.len() - digits as usize);
    format!("{int}.{}", &frac[..keep.min(frac.len())])
}

pub fn asymptotic_constants(depth: usize) -> Result<Asymptotics> {
    if depth < 5 {
        return Err(Error::Hypothesis(format!("depth {depth} < 5")));
    }
    let s = sylvester_numbers(depth + 1);
    let s_depth = s[depth].to_biguint().expect("positive");
    let scale = BigUint::from(10u32).pow(FIXED_DIGITS);
    let roots = depth + 1;

    // s_m^(2^-(m+1)) decreases to c, (s_m - 1/2)^(2^-(m+1)) increases to c
    let upper = fixed_root_2pow(&(&s_depth * &scale), &scale, roots);
    let lower_scaled = (&s_depth * 2u32 - 1u32) * &scale / 2u32;
    let lower = fixed_root_2pow(&lower_scaled, &scale, roots);
    let c_err = fixed_to_f64(&(&upper - &lower + 2u32), FIXED_DIGITS);

    let m = depth.min(MAX_COUNT_LEVEL);
    let ctx = SylvesterContext::new(m);
    let count = ctx.count_positive()?;
    let fact: BigUint = (1..m as u32).map(BigUint::from).product::<BigUint>().max(BigUint::one());

    // c^{2^{m+2}} by repeated squaring in fixed point
    let mut cpow = upper.clone();
    for _ in 0..m + 2 {
        cpow = &cpow * &cpow / &scale;
    }
    let a_scaled = &count * &fact * &scale * &scale / &cpow;
    let a = fixed_to_f64(&a_scaled, FIXED_DIGITS);

    let prod: BigUint = s[1..=m]
        .iter()
        .map(|x| (x - 1u32).to_biguint().expect("positive"))
        .product();
    let ratio_scaled = &count * &fact * &scale / &prod;
    let ratio = fixed_to_f64(&ratio_scaled, FIXED_DIGITS);

    Ok(Asymptotics {
        depth,
        c: fixed_to_f64(&upper, FIXED_DIGITS),
        c_err,
        c_digits: fixed_to_string(&upper, FIXED_DIGITS, 12),
        a,
        a_level: m,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn context_n3() {
        let c = SylvesterContext::new(3);
        assert_eq!(c.s, big(&[2, 3, 7, 43]));
        assert_eq!(c.d, BigInt::from(1806));
        assert_eq!(c.d_row, big(&[903, 602, 258, 42]));
    }

    #[test]
    fn context_n0() {
        let c = SylvesterContext::new(0);
        assert_eq!(c.s, big(&[2]));
        assert_eq!(c.d, BigInt::from(2));
        assert_eq!(c.d_row, big(&[1]));
        assert_eq!(c.mu, BigInt::from(1));
    }

    #[test]
    fn s5_and_deep_levels() {
        let c = SylvesterContext::new(5);
        assert_eq!(c.s[5], BigInt::from(3263443));
        assert_eq!(c.s[5], BigInt::from(1 + 2 * 3 * 7 * 43 * 1807i64));
        let deep = SylvesterContext::new(10);
        assert!(deep.s[10].to_string().len() > 150);
        deep.check_invariants().unwrap();
    }

    #[test]
    fn weights_examples() {
        let c = SylvesterContext::new(2);
        assert_eq!(c.weight(&[0, 0, 0]).unwrap(), BigInt::from(42));
        assert_eq!(c.weight(&[0, 1, 5]).unwrap(), BigInt::from(-2));
        assert_eq!(c.weight(&[0, 1, 4]).unwrap(), BigInt::from(4));
        assert!(matches!(
            c.weight(&[0, 1]),
            Err(Error::LengthMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn enumerate_small_levels() {
        let c0 = SylvesterContext::new(0).enumerate_positive(DEFAULT_CAP).unwrap();
        assert_eq!(c0.len(), 1);
        assert_eq!(c0[0].i, vec![0]);
        assert_eq!(c0[0].weight, BigInt::from(2));

        let c1 = SylvesterContext::new(1).enumerate_positive(DEFAULT_CAP).unwrap();
        assert_eq!(c1.iter().map(|t| t.i.clone()).collect::<Vec<_>>(), vec![vec![0, 0], vec![0, 1]]);
        assert_eq!(weight_multiset(&c1), big(&[4, 6]));

        let c2 = SylvesterContext::new(2).enumerate_positive(DEFAULT_CAP).unwrap();
        assert_eq!(
            weight_multiset(&c2),
            big(&[4, 10, 12, 16, 18, 22, 24, 28, 30, 36, 42])
        );
        // lexicographic order
        assert!(c2.windows(2).all(|w| w[0].i < w[1].i));
    }

    #[test]
    fn cap_is_enforced() {
        let err = SylvesterContext::new(3).enumerate_positive(100).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
        assert!(err.to_string().contains("count_positive"));
    }

    #[test]
    fn counts_match_known_dimensions() {
        let expected = [1u64, 10, 251, 151700];
        for (n, e) in (1..=4).zip(expected) {
            assert_eq!(SylvesterContext::new(n).dim().unwrap(), BigUint::from(e));
        }
        assert_eq!(SylvesterContext::new(0).dim().unwrap(), BigUint::zero());
    }

    #[test]
    fn positive_negative_split() {
        let c2 = SylvesterContext::new(2);
        assert_eq!(c2.count_positive().unwrap(), BigUint::from(11u32));
        assert_eq!(c2.count_negative().unwrap(), BigUint::from(1u32));
        let c3 = SylvesterContext::new(3);
        assert_eq!(c3.count_positive().unwrap(), BigUint::from(252u32));
        assert_eq!(c3.count_negative().unwrap(), BigUint::from(252u32));
    }

    /// Brute force over the whole deformation box; independent of the prefix counter.
    fn brute_split(c: &SylvesterContext) -> (u64, u64, u64) {
        let tops: Vec<u32> = (0..=c.n).map(|k| c.s_u32(k) - 2).collect();
        let mut cur = vec![0u32; c.n + 1];
        let (mut pos, mut neg, mut zero) = (0, 0, 0);
        loop {
            let w = c.weight(&cur).unwrap();
            match w.sign() {
                num_bigint::Sign::Plus => pos += 1,
                num_bigint::Sign::Minus => neg += 1,
                num_bigint::Sign::NoSign => zero += 1,
            }
            let mut k = 0;
            loop {
                if k > c.n {
                    return (pos, neg, zero);
                }
                if cur[k] < tops[k] {
                    cur[k] += 1;
                    break;
                }
                cur[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn brute_force_agrees_and_box_has_no_weight_zero() {
        for n in 0..=3 {
            let c = SylvesterContext::new(n);
            let (pos, neg, zero) = brute_split(&c);
            assert_eq!(zero, 0, "n={n}");
            assert_eq!(BigUint::from(pos), c.count_positive().unwrap());
            assert_eq!(BigInt::from(pos + neg), c.mu);
            assert_eq!(
                c.enumerate_positive(DEFAULT_CAP).unwrap().len() as u64,
                pos
            );
        }
    }

    #[test]
    fn wider_box_weight_zero_only_at_trivial_multiples() {
        // observational: only the narrow box is part of the contract
        for n in 1..=3 {
            let c = SylvesterContext::new(n);
            let tops: Vec<u32> = (0..=n).map(|k| c.s_u32(k) - 1).collect();
            let mut cur = vec![0u32; n + 1];
            'outer: loop {
                let w = c.weight(&cur).unwrap();
                assert!(!w.is_zero(), "weight 0 at {cur:?}");
                let mut k = 0;
                loop {
                    if k > n {
                        break 'outer;
                    }
                    if cur[k] < tops[k] {
                        cur[k] += 1;
                        break;
                    }
                    cur[k] = 0;
                    k += 1;
                }
            }
        }
    }

    #[test]
    fn weights_even_at_levels_one_and_two() {
        for n in [1, 2] {
            let t = SylvesterContext::new(n).enumerate_positive(DEFAULT_CAP).unwrap();
            assert!(t.iter().all(|x| x.weight.is_even()));
        }
    }

    #[test]
    fn invariants_hold_through_n6() {
        for n in 0..=6 {
            SylvesterContext::new(n).check_invariants().unwrap();
        }
    }

    #[test]
    fn asymptotics_depth5() {
        let a = asymptotic_constants(5).unwrap();
        assert!((a.c - 1.264).abs() < 1e-3, "c = {}", a.c);
        assert!((a.a - 0.2789).abs() < 1e-3, "a = {}", a.a);
        assert!(a.ratio > 0.99 && a.ratio < 1.01);
        assert!(a.c_err > 0.0);
        assert!(asymptotic_constants(4).is_err());
    }

    #[test]
    fn asymptotic_bounds_tighten_with_depth() {
        let a5 = asymptotic_constants(5).unwrap();
        let a8 = asymptotic_constants(8).unwrap();
        assert!(a8.c <= a5.c);
        assert!(a8.c_err < a5.c_err);
        assert!(a8.c >= a5.c - a5.c_err);
    }
}
