//! Dense univariate polynomials over exact rationals: Euclidean division,
//! gcd, squarefree parts and multiplicities at a factor.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::rational::{format_q, Q};

/// Coefficients low-to-high; no trailing zeros, so the zero polynomial is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UniPoly {
    coeffs: Vec<Q>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: vec![] }
    }

    pub fn constant(c: Q) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn x() -> Self {
        Self::new(vec![Q::zero(), Q::one()])
    }

    /// `x - c`.
    pub fn linear(c: &Q) -> Self {
        Self::new(vec![-c.clone(), Q::one()])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.coeffs.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Q> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn monic(&self) -> Self {
        match self.lead() {
            None => Self::zero(),
            Some(l) => self.scale(&l.recip()),
        }
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.coeffs
            .iter()
            .rev()
            .fold(Q::zero(), |acc, c| acc * x + c)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = Self::one();
        for _ in 0..k {
            r = &r * self;
        }
        r
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Q::from_integer(k.into()))
                .collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead_inv = d.lead().unwrap().recip();
        let mut r = self.coeffs.clone();
        let mut quot = vec![Q::zero(); self.coeffs.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let factor = r.last().unwrap() * &lead_inv;
            for (j, c) in d.coeffs.iter().enumerate() {
                r[k + j] -= &factor * c;
            }
            quot[k] = factor;
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        (UniPoly::new(quot), UniPoly::new(r))
    }

    /// Quotient when `d` divides `self`, else `None`.
    pub fn exact_div(&self, d: &UniPoly) -> Option<UniPoly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            // monic remainders keep coefficient growth in check
            b = r.monic();
        }
        a.monic()
    }

    /// Monic squarefree part.
    pub fn squarefree_part(&self) -> UniPoly {
        if self.is_constant() {
            return UniPoly::one();
        }
        let g = self.gcd(&self.derivative());
        self.exact_div(&g).expect("gcd divides").monic()
    }

    /// Largest `k` with `q^k | self`; `None` for the zero polynomial.
    pub fn multiplicity(&self, q: &UniPoly) -> Option<u32> {
        assert!(!q.is_constant(), "multiplicity at a constant");
        if self.is_zero() {
            return None;
        }
        let mut k = 0;
        let mut cur = self.clone();
        while let Some(next) = cur.exact_div(q) {
            cur = next;
            k += 1;
        }
        Some(k)
    }

    /// Taylor coefficients at `c`: `self(x) = sum a_k (x - c)^k`.
    pub fn taylor_at(&self, c: &Q) -> Vec<Q> {
        let mut work = self.coeffs.clone();
        let n = work.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let t = &work[j + 1] * c;
                work[j] += t;
            }
        }
        work
    }

    /// `self(x + c)`.
    pub fn shift(&self, c: &Q) -> UniPoly {
        UniPoly::new(self.taylor_at(c))
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(format_q).collect()
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Q::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{k}")?,
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

    fn p(v: &[i64]) -> UniPoly {
        UniPoly::new(v.iter().map(|&x| q(x)).collect())
    }

    #[test]
    fn gcd_and_division() {
        let x = UniPoly::x();
        let xm1 = UniPoly::linear(&q(1));
        let a = &x.pow(2) * &xm1;
        let b = &x * &xm1.pow(3);
        assert_eq!(a.gcd(&b), &x * &xm1);
        assert_eq!(a.multiplicity(&x), Some(2));
        assert_eq!(b.multiplicity(&xm1), Some(3));
        assert_eq!(p(&[1, 0, 1]).gcd(&p(&[0, 1])), UniPoly::one());
        assert_eq!(UniPoly::zero().multiplicity(&x), None);
    }

    #[test]
    fn squarefree() {
        let f = &UniPoly::linear(&q(2)).pow(3) * &p(&[1, 0, 1]);
        assert_eq!(f.squarefree_part(), &UniPoly::linear(&q(2)) * &p(&[1, 0, 1]));
        assert_eq!(p(&[5]).squarefree_part(), UniPoly::one());
    }

    #[test]
    fn taylor_shift() {
        // (x - 1/7)^2 expanded at 1/7 is y^2
        let l = UniPoly::linear(&qf(1, 7));
        let t = l.pow(2).taylor_at(&qf(1, 7));
        assert_eq!(t, vec![q(0), q(0), q(1)]);
        assert_eq!(p(&[1, 2, 3]).shift(&q(1)), p(&[6, 8, 3]));
    }

    fn arb() -> impl Strategy<Value = UniPoly> {
        prop::collection::vec(-6i64..6, 0..6).prop_map(|v| p(&v))
    }

    proptest! {
        #[test]
        fn division_identity(a in arb(), b in arb()) {
            prop_assume!(!b.is_zero());
            let (qq, r) = a.div_rem(&b);
            prop_assert_eq!(&(&qq * &b) + &r, a);
            prop_assert!(r.degree() < b.degree() || r.is_zero());
        }

        #[test]
        fn gcd_divides_both(a in arb(), b in arb()) {
            let g = a.gcd(&b);
            prop_assume!(!g.is_zero());
            prop_assert!(a.exact_div(&g).is_some());
            prop_assert!(b.exact_div(&g).is_some());
        }

        #[test]
        fn shift_matches_evaluation(a in arb(), c in -4i64..4, x in -4i64..4) {
            prop_assert_eq!(a.shift(&q(c)).eval(&q(x)), a.eval(&q(x + c)));
        }
    }
}
