//! Sparse multivariate polynomials over exact rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_q, parse_q, pow, Q};

pub type Exponent = Vec<u32>;

/// Terms are kept in lexicographic exponent order and never store a zero coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Exponent, Q>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Q::one())
    }

    pub fn monomial(exp: Exponent, c: Q) -> Self {
        let mut p = Self::zero(exp.len());
        p.add_term(exp, c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &[u32]) -> Q {
        self.terms.get(exp).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, exp: Exponent, c: Q) {
        assert_eq!(exp.len(), self.nvars, "exponent length mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[var]).max()
    }

    /// Splits into `sum_k c_k * x_var^k` with `c_k` free of `x_var`.
    pub fn coefficients_in(&self, var: usize) -> BTreeMap<u32, MultiPoly> {
        let mut out: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = std::mem::replace(&mut e2[var], 0);
            out.entry(k)
                .or_insert_with(|| MultiPoly::zero(self.nvars))
                .add_term(e2, c.clone());
        }
        out
    }

    /// Replaces `x_var` by `q` (Horner in the powers of `x_var`).
    pub fn substitute(&self, var: usize, q: &MultiPoly) -> MultiPoly {
        assert_eq!(q.nvars, self.nvars);
        let parts = self.coefficients_in(var);
        let Some(&top) = parts.keys().next_back() else {
            return self.clone();
        };
        let mut acc = MultiPoly::zero(self.nvars);
        for k in (0..=top).rev() {
            acc = &acc * q;
            if let Some(c) = parts.get(&k) {
                acc = &acc + c;
            }
        }
        acc
    }

    /// Sets `x_var = value`, keeping the variable count.
    pub fn evaluate_var(&self, var: usize, value: &Q) -> MultiPoly {
        self.substitute(var, &MultiPoly::constant(self.nvars, value.clone()))
    }

    /// Weighted degree of every term, or `None` if terms disagree. Zero has no degree.
    pub fn quasi_homogeneous_degree(&self, weights: &[BigInt]) -> Option<BigInt> {
        assert_eq!(weights.len(), self.nvars);
        let mut degs = self.terms.keys().map(|e| weighted_degree(e, weights));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// Appends a variable of weight 1 raising every term to weighted degree `deg`.
    pub fn homogenize(&self, weights: &[BigInt], deg: &BigInt) -> Result<MultiPoly> {
        let mut out = MultiPoly::zero(self.nvars + 1);
        for (e, c) in &self.terms {
            let gap = deg - weighted_degree(e, weights);
            let gap: u32 = u32::try_from(gap.clone()).map_err(|_| {
                Error::NotNormalizable(format!("term {e:?} has weighted degree above {deg}"))
            })?;
            let mut e2 = e.clone();
            e2.push(gap);
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    /// Sets the last variable to 1 and drops it.
    pub fn dehomogenize(&self) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars - 1);
        for (e, c) in &self.terms {
            out.add_term(e[..self.nvars - 1].to_vec(), c.clone());
        }
        out
    }

    /// Appends `extra` unused variables.
    pub fn extend_vars(&self, extra: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars + extra);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2.extend(std::iter::repeat_n(0, extra));
            out.add_term(e2, c.clone());
        }
        out
    }

    /// Rescales `x_k -> c_k x_k`.
    pub fn rescale_vars(&self, factors: &[Q]) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut v = c.clone();
            for (ek, fk) in e.iter().zip(factors) {
                v *= pow(fk, *ek);
            }
            out.add_term(e.clone(), v);
        }
        out
    }

    /// Parses the text format: one `num/den : e_0 e_1 ... e_k` term per line.
    /// Blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<MultiPoly> {
        let mut terms = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (c, e) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("line {}: missing ':'", lineno + 1)))?;
            let c = parse_q(c)?;
            let e: Exponent = e
                .split_whitespace()
                .map(|x| {
                    x.parse::<u32>()
                        .map_err(|_| Error::Parse(format!("line {}: bad exponent {x:?}", lineno + 1)))
                })
                .collect::<Result<_>>()?;
            terms.push((e, c));
        }
        let nvars = terms
            .first()
            .map(|(e, _)| e.len())
            .ok_or_else(|| Error::Parse("no terms".into()))?;
        let mut p = MultiPoly::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::Parse("exponent vectors of different lengths".into()));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (e, c) in &self.terms {
            s.push_str(&format_q(c));
            s.push_str(" :");
            for x in e {
                s.push(' ');
                s.push_str(&x.to_string());
            }
            s.push('\n');
        }
        s
    }
}

pub fn weighted_degree(e: &[u32], weights: &[BigInt]) -> BigInt {
    e.iter().zip(weights).map(|(x, w)| w * *x).sum()
}

/// Completes the `s`-th power in `x_var`: substitutes `x_var -> x_var + shift`
/// with `shift = -(coefficient of x_var^{s-1}) / s`, which kills the
/// `x_var^{s-1}` term. Returns the new polynomial and the shift.
pub fn complete_power(p: &MultiPoly, var: usize, s: u32) -> Result<(MultiPoly, MultiPoly)> {
    let parts = p.coefficients_in(var);
    let lead = parts.get(&s).cloned().unwrap_or_else(|| MultiPoly::zero(p.nvars));
    if lead != MultiPoly::one(p.nvars) {
        return Err(Error::NotMonic { var, exp: s });
    }
    if let Some((&top, _)) = parts.iter().next_back() {
        if top > s {
            return Err(Error::NotNormalizable(format!(
                "degree {top} in x{var} exceeds {s}"
            )));
        }
    }
    let below = match parts.get(&(s - 1)) {
        Some(c) => c.clone(),
        None => return Ok((p.clone(), MultiPoly::zero(p.nvars))),
    };
    let shift = below.scale(&-Q::new(BigInt::one(), BigInt::from(s)));
    let replacement = &MultiPoly::var(p.nvars, var) + &shift;
    Ok((p.substitute(var, &replacement), shift))
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Q::one())
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = MultiPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (i, x) in e.iter().enumerate() {
                match x {
                    0 => {}
                    1 => write!(f, "*x{i}")?,
                    _ => write!(f, "*x{i}^{x}")?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};
    use proptest::prelude::*;

    fn x(i: usize, n: usize) -> MultiPoly {
        MultiPoly::var(n, i)
    }

    fn c(n: usize, v: i64) -> MultiPoly {
        MultiPoly::constant(n, q(v))
    }

    #[test]
    fn completing_the_square() {
        // x^2 + 2 b x + c with b = y, c = z
        let n = 3;
        let p = &(&x(0, n).pow(2) + &(&c(n, 2) * &(&x(1, n) * &x(0, n)))) + &x(2, n);
        let (r, shift) = complete_power(&p, 0, 2).unwrap();
        assert_eq!(shift, -&x(1, n));
        let expect = &(&x(0, n).pow(2) + &x(2, n)) - &x(1, n).pow(2);
        assert_eq!(r, expect);
    }

    #[test]
    fn completing_the_cube() {
        let p = &x(0, 1).pow(3) + &(&c(1, 3) * &x(0, 1).pow(2));
        let (r, shift) = complete_power(&p, 0, 3).unwrap();
        assert_eq!(shift, c(1, -1));
        let expect = &(&x(0, 1).pow(3) - &(&c(1, 3) * &x(0, 1))) + &c(1, 2);
        assert_eq!(r, expect);
    }

    #[test]
    fn complete_power_noop_and_errors() {
        let p = &x(0, 1).pow(3) + &c(1, 5);
        let (r, shift) = complete_power(&p, 0, 3).unwrap();
        assert_eq!(r, p);
        assert!(shift.is_zero());

        let bad = x(0, 1).pow(3).scale(&q(2));
        assert_eq!(complete_power(&bad, 0, 3), Err(Error::NotMonic { var: 0, exp: 3 }));
    }

    #[test]
    fn quasi_homogeneity() {
        // x0^2 + x1^3 + x1 x2^4 under weights (3, 2, 1)
        let n = 3;
        let p = &(&x(0, n).pow(2) + &x(1, n).pow(3)) + &(&x(1, n) * &x(2, n).pow(4));
        let w: Vec<BigInt> = [3, 2, 1].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(p.quasi_homogeneous_degree(&w), Some(BigInt::from(6)));
        let p2 = &p + &x(2, n);
        assert_eq!(p2.quasi_homogeneous_degree(&w), None);
    }

    #[test]
    fn homogenize_roundtrip() {
        let p = &(&x(0, 2).pow(2) + &x(1, 2).pow(3)) + &MultiPoly::constant(2, qf(2, 27));
        let w: Vec<BigInt> = [3, 2].iter().map(|&v| BigInt::from(v)).collect();
        let h = p.homogenize(&w, &BigInt::from(6)).unwrap();
        assert_eq!(h.coeff(&[0, 0, 6]), qf(2, 27));
        assert_eq!(h.dehomogenize(), p);
    }

    #[test]
    fn text_format() {
        let p = MultiPoly::parse("1/1 : 2 0\n# comment\n\n-3/4 : 0 1\n").unwrap();
        assert_eq!(p.coeff(&[2, 0]), q(1));
        assert_eq!(p.coeff(&[0, 1]), qf(-3, 4));
        assert_eq!(MultiPoly::parse(&p.to_text()).unwrap(), p);
        assert!(MultiPoly::parse("1 : 1 2\n1 : 1").is_err());
        assert!(MultiPoly::parse("").is_err());
    }

    fn arb_poly() -> impl Strategy<Value = MultiPoly> {
        prop::collection::vec(((0u32..3, 0u32..3, 0u32..3), -5i64..5, 1i64..4), 0..5).prop_map(
            |terms| {
                let mut p = MultiPoly::zero(3);
                for ((a, b, c), num, den) in terms {
                    p.add_term(vec![a, b, c], qf(num, den));
                }
                p
            },
        )
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
            prop_assert!(a.terms().all(|(_, v)| !v.is_zero()));
        }

        #[test]
        fn substitution_is_a_ring_map(a in arb_poly(), b in arb_poly(), s in arb_poly()) {
            let lhs = (&a * &b).substitute(1, &s);
            let rhs = &a.substitute(1, &s) * &b.substitute(1, &s);
            prop_assert_eq!(lhs, rhs);
        }
    }
}
