//! Newton-polyhedron log canonical thresholds via the exit point of the
//! diagonal, toric (log) canonicity, weighted-blowup discrepancies, and an
//! exhaustive check of the lattice inequality behind them.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lp::{self, LpOutcome};
use crate::poly::MultiPoly;
use crate::rational::{format_q, q, Q};
use crate::sylvester::SylvesterContext;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonSupport {
    pub nvars: usize,
    pub points: Vec<Vec<u32>>,
}

impl NewtonSupport {
    pub fn new(nvars: usize, points: impl IntoIterator<Item = Vec<u32>>) -> Result<Self> {
        let set: BTreeSet<Vec<u32>> = points.into_iter().collect();
        if set.is_empty() {
            return Err(Error::Hypothesis("empty support".into()));
        }
        if set.iter().any(|p| p.len() != nvars) {
            return Err(Error::LengthMismatch {
                expected: nvars,
                got: set.iter().find(|p| p.len() != nvars).unwrap().len(),
            });
        }
        Ok(NewtonSupport {
            nvars,
            points: set.into_iter().collect(),
        })
    }

    /// Exponents of `p` at the origin.
    pub fn of(p: &MultiPoly) -> Result<Self> {
        Self::new(p.nvars(), p.terms().map(|(e, _)| e.clone()))
    }

    /// Exponents of `p` after moving `base` to the origin.
    pub fn at(p: &MultiPoly, base: &[Q]) -> Result<Self> {
        let mut moved = p.clone();
        for (k, a) in base.iter().enumerate() {
            if !a.is_zero() {
                let shift = &MultiPoly::var(p.nvars(), k) + &MultiPoly::constant(p.nvars(), a.clone());
                moved = moved.substitute(k, &shift);
            }
        }
        Self::of(&moved)
    }

    /// Support of `sum_k x_k^{s_k}`.
    pub fn fermat(ctx: &SylvesterContext) -> Self {
        let nv = ctx.n + 1;
        Self::new(
            nv,
            (0..nv).map(|k| {
                let mut e = vec![0; nv];
                e[k] = ctx.s_u32(k);
                e
            }),
        )
        .expect("nonempty")
    }
}

/// The point `c (1, ..., 1)` where the diagonal leaves the Newton polyhedron,
/// with a primal certificate `lambda` and a dual covector `omega`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalExit {
    pub c: Q,
    /// Convex weights over `support.points` with `sum lambda_j P_j <= c (1, ..., 1)`.
    pub lambda: Vec<Q>,
    /// Nonnegative, sums to 1, with `omega(P_j) >= omega_f` for all support points.
    pub omega: Vec<Q>,
    /// `min_j omega(P_j)`, equal to `c` by strong duality.
    pub omega_f: Q,
}

impl DiagonalExit {
    /// Re-verifies both certificates by substitution and checks equal objectives.
    pub fn verify(&self, support: &NewtonSupport) -> bool {
        let nv = support.nvars;
        let lambda_ok = self.lambda.len() == support.points.len()
            && self.lambda.iter().all(|l| !l.is_negative())
            && self.lambda.iter().sum::<Q>().is_one()
            && (0..nv).all(|k| {
                let s: Q = self
                    .lambda
                    .iter()
                    .zip(&support.points)
                    .map(|(l, p)| l * q(p[k] as i64))
                    .sum();
                s <= self.c
            });
        let omega_ok = self.omega.len() == nv
            && self.omega.iter().all(|w| !w.is_negative())
            && self.omega.iter().sum::<Q>().is_one()
            && support.points.iter().all(|p| dot(&self.omega, p) >= self.omega_f);
        lambda_ok && omega_ok && self.c == self.omega_f
    }

    pub fn to_json(&self, support: &NewtonSupport) -> Value {
        let lambda: Vec<Value> = self
            .lambda
            .iter()
            .zip(&support.points)
            .filter(|(l, _)| !l.is_zero())
            .map(|(l, p)| json!({ "point": p, "weight": format_q(l) }))
            .collect();
        json!({
            "c": format_q(&self.c),
            "lambda": lambda,
            "omega": self.omega.iter().map(format_q).collect::<Vec<_>>(),
            "omega_f": format_q(&self.omega_f),
        })
    }
}

fn dot(w: &[Q], p: &[u32]) -> Q {
    w.iter().zip(p).map(|(a, b)| a * q(*b as i64)).sum()
}

fn optimal(out: LpOutcome, what: &str) -> Result<(Vec<Q>, Q)> {
    match out {
        LpOutcome::Optimal { x, value } => Ok((x, value)),
        other => Err(Error::Lp(format!("{what}: {other:?}"))),
    }
}

pub fn diagonal_exit(support: &NewtonSupport) -> Result<DiagonalExit> {
    let nv = support.nvars;
    let m = support.points.len();

    // primal: vars lambda_1..m, c, slack_1..nv; min c
    // rows k: sum_j lambda_j P_jk - c + slack_k = 0; last row: sum lambda = 1
    let ncols = m + 1 + nv;
    let mut a = Vec::with_capacity(nv + 1);
    for k in 0..nv {
        let mut row = vec![Q::zero(); ncols];
        for (j, p) in support.points.iter().enumerate() {
            row[j] = q(p[k] as i64);
        }
        row[m] = -Q::one();
        row[m + 1 + k] = Q::one();
        a.push(row);
    }
    let mut sum_row = vec![Q::zero(); ncols];
    for x in sum_row.iter_mut().take(m) {
        *x = Q::one();
    }
    a.push(sum_row);
    let mut b = vec![Q::zero(); nv];
    b.push(Q::one());
    let mut cost = vec![Q::zero(); ncols];
    cost[m] = Q::one();
    let (x, c) = optimal(lp::solve(&a, &b, &cost)?, "primal")?;
    let lambda = x[..m].to_vec();

    // dual: vars omega_1..nv, mu, surplus_1..m; max mu
    // rows j: omega.P_j - mu - surplus_j = 0; last row: sum omega = 1
    let ncols = nv + 1 + m;
    let mut a = Vec::with_capacity(m + 1);
    for (j, p) in support.points.iter().enumerate() {
        let mut row = vec![Q::zero(); ncols];
        for k in 0..nv {
            row[k] = q(p[k] as i64);
        }
        row[nv] = -Q::one();
        row[nv + 1 + j] = -Q::one();
        a.push(row);
    }
    let mut sum_row = vec![Q::zero(); ncols];
    for x in sum_row.iter_mut().take(nv) {
        *x = Q::one();
    }
    a.push(sum_row);
    let mut b = vec![Q::zero(); m];
    b.push(Q::one());
    let mut cost = vec![Q::zero(); ncols];
    cost[nv] = -Q::one();
    let (y, neg_mu) = optimal(lp::solve(&a, &b, &cost)?, "dual")?;
    let omega = y[..nv].to_vec();

    let exit = DiagonalExit {
        c,
        lambda,
        omega,
        omega_f: -neg_mu,
    };
    if !exit.verify(support) {
        return Err(Error::Lp("certificates failed verification".into()));
    }
    Ok(exit)
}

/// `min(1, 1/c)`; a support containing the origin is off the hypersurface and gets 1.
pub fn lct_from_exit(exit: &DiagonalExit) -> Q {
    if exit.c.is_zero() {
        return Q::one();
    }
    exit.c.recip().min(Q::one())
}

pub fn lct_at_origin(support: &NewtonSupport) -> Result<Q> {
    Ok(lct_from_exit(&diagonal_exit(support)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ToricClass {
    /// `c < 1`: torically canonical.
    Canonical,
    /// `c = 1`: torically log canonical, not canonical.
    LogCanonicalBoundary,
    /// `c > 1`: not torically log canonical.
    NotLogCanonical,
}

#[derive(Debug, Clone)]
pub struct ToricClassification {
    pub class: ToricClass,
    pub exit: DiagonalExit,
    /// Honest (non-toric) statement only when the caller asserts nondegeneracy.
    pub nondegenerate_asserted: bool,
}

impl ToricClassification {
    pub fn label(&self) -> &'static str {
        match (self.class, self.nondegenerate_asserted) {
            (ToricClass::Canonical, false) => "torically canonical",
            (ToricClass::LogCanonicalBoundary, false) => "torically log canonical (boundary)",
            (ToricClass::NotLogCanonical, false) => "not torically log canonical",
            (ToricClass::Canonical, true) => "canonical",
            (ToricClass::LogCanonicalBoundary, true) => "strictly log canonical",
            (ToricClass::NotLogCanonical, true) => "not log canonical",
        }
    }
}

pub fn toric_classify(support: &NewtonSupport, nondegenerate: bool) -> Result<ToricClassification> {
    let exit = diagonal_exit(support)?;
    let class = match exit.c.cmp(&Q::one()) {
        std::cmp::Ordering::Less => ToricClass::Canonical,
        std::cmp::Ordering::Equal => ToricClass::LogCanonicalBoundary,
        std::cmp::Ordering::Greater => ToricClass::NotLogCanonical,
    };
    Ok(ToricClassification {
        class,
        exit,
        nondegenerate_asserted: nondegenerate,
    })
}

/// Discrepancy bookkeeping of the weighted blowup with weights `omega` for a
/// hypersurface of weighted degree `omega_f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discrepancy {
    /// `sum omega_k / omega_f`; the pair is log canonical along `E` iff this is `>= 1`.
    pub ratio: Q,
    /// `sum omega_k - omega_f`.
    pub numerator: Q,
    pub sign: std::cmp::Ordering,
}

pub fn blowup_discrepancy(weights: &[Q], omega_f: &Q) -> Result<Discrepancy> {
    if weights.iter().any(|w| !w.is_positive()) || !omega_f.is_positive() {
        return Err(Error::OutOfRange("blowup weights must be positive".into()));
    }
    let total: Q = weights.iter().sum();
    let numerator = &total - omega_f;
    Ok(Discrepancy {
        ratio: total / omega_f,
        sign: numerator.cmp(&Q::zero()),
        numerator,
    })
}

/// Coefficient of `E` in `beta^*(K_{X_u} + (1 - m c) F_u)` for the blowup with
/// `omega(x_k) = d_{n-1,k} m vbar`, `omega(u) = 1`, `omega(f) = d_{n-1} m vbar`.
/// `lower` is the level of the fibers; equals 1 exactly when `c = vbar`.
pub fn family_blowup_e_coefficient(lower: &SylvesterContext, vbar: &Q, m: u32, c: &Q) -> Q {
    let mq = q(m as i64);
    let scale = &mq * vbar;
    let sum_omega: Q = lower
        .d_row
        .iter()
        .map(|d| Q::from_integer(d.clone()) * &scale)
        .sum();
    let omega_f = Q::from_integer(lower.d.clone()) * &scale;
    let omega_u = Q::one();
    Q::one() - sum_omega + omega_f - mq * c * omega_u
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct NewtonLemmaReport {
    pub n: usize,
    pub tuples: u64,
    pub cases: u64,
    pub equality_cases: u64,
    pub violations: u64,
}

/// Exhaustive check over `Q = (i_0..i_n)` with `0 <= i_k <= s_k - 1`,
/// `sum i_k d_{n,k} < d_n`, and each `j` with `i_j != 0`.
pub fn verify_newton_lemma(ctx: &SylvesterContext) -> Result<NewtonLemmaReport> {
    if ctx.n == 0 || ctx.n > 4 {
        return Err(Error::Hypothesis("newton lemma scan needs 1 <= n <= 4".into()));
    }
    let n = ctx.n;
    let d = ctx.d_i128()?;
    let row: Vec<i128> = ctx.d_row.iter().map(|x| i128::try_from(x.clone()).unwrap()).collect();
    let lower = ctx.lower().unwrap();
    let lower_d = lower.d_i128()?;
    let lower_row: Vec<i128> = lower.d_row.iter().map(|x| i128::try_from(x.clone()).unwrap()).collect();
    let tops: Vec<u32> = (0..=n).map(|k| ctx.s_u32(k) - 1).collect();

    // parallel over i_1; i_0 in {0, 1}
    let parts: Vec<Result<NewtonLemmaReport>> = (0..=tops[1])
        .into_par_iter()
        .map(|i1| {
            let mut rep = NewtonLemmaReport { n, ..Default::default() };
            let mut cur = vec![0u32; n + 1];
            cur[1] = i1;
            for i0 in 0..=tops[0] {
                cur[0] = i0;
                let used = row[0] * i0 as i128 + row[1] * i1 as i128;
                if used >= d {
                    continue;
                }
                scan(&mut cur, 2, used, d, &row, &tops, &lower_row, lower_d, &mut rep)?;
            }
            Ok(rep)
        })
        .collect();
    let mut total = NewtonLemmaReport { n, ..Default::default() };
    for p in parts {
        let p = p?;
        total.tuples += p.tuples;
        total.cases += p.cases;
        total.equality_cases += p.equality_cases;
        total.violations += p.violations;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn scan(
    cur: &mut Vec<u32>,
    k: usize,
    used: i128,
    d: i128,
    row: &[i128],
    tops: &[u32],
    lower_row: &[i128],
    lower_d: i128,
    rep: &mut NewtonLemmaReport,
) -> Result<()> {
    let n = cur.len() - 1;
    if k > n {
        rep.tuples += 1;
        return check_tuple(cur, d, row, lower_row, lower_d, rep);
    }
    for ik in 0..=tops[k] {
        let u = used + row[k] * ik as i128;
        if u >= d {
            break;
        }
        cur[k] = ik;
        scan(cur, k + 1, u, d, row, tops, lower_row, lower_d, rep)?;
    }
    cur[k] = 0;
    Ok(())
}

fn check_tuple(
    cur: &[u32],
    d: i128,
    row: &[i128],
    lower_row: &[i128],
    lower_d: i128,
    rep: &mut NewtonLemmaReport,
) -> Result<()> {
    let n = cur.len() - 1;
    let full: i128 = cur.iter().zip(row).map(|(i, r)| *i as i128 * r).sum();
    for j in 0..=n {
        let ij = cur[j] as i128;
        if ij == 0 {
            continue;
        }
        rep.cases += 1;
        // w_k = d_{n,k} for k != j and w_j = (d - sum_{k != j} d_{n,k} i_k) / i_j;
        // compare i_j * sum_k w_k against i_j * d
        let others: i128 = row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, r)| r).sum();
        let wj_num = d - (full - row[j] * ij);
        let lhs = others * ij + wj_num;
        let rhs = d * ij;
        if lhs < rhs {
            rep.violations += 1;
            return Err(Error::Violation(format!("sum w < d_n at Q={cur:?}, j={j}")));
        }
        if lhs == rhs {
            rep.equality_cases += 1;
            let lin: i128 = (0..n).map(|k| lower_row[k] * cur[k] as i128).sum::<i128>() + cur[n] as i128;
            if lin != lower_d {
                rep.violations += 1;
                return Err(Error::Violation(format!(
                    "equality without sum d_(n-1,k) i_k + i_n = d_(n-1) at Q={cur:?}, j={j}"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    fn sup(nv: usize, pts: &[&[u32]]) -> NewtonSupport {
        NewtonSupport::new(nv, pts.iter().map(|p| p.to_vec())).unwrap()
    }

    #[test]
    fn cusp_exit() {
        // x^2 + y^3
        let s = sup(2, &[&[2, 0], &[0, 3]]);
        let e = diagonal_exit(&s).unwrap();
        assert_eq!(e.c, qf(6, 5));
        // points are sorted: (0,3) then (2,0)
        assert_eq!(e.lambda, vec![qf(2, 5), qf(3, 5)]);
        assert_eq!(lct_from_exit(&e), qf(5, 6));
        assert!(e.verify(&s));
    }

    #[test]
    fn diagonal_point_and_single_square() {
        let s = sup(3, &[&[1, 1, 1]]);
        assert_eq!(diagonal_exit(&s).unwrap().c, q(1));
        assert_eq!(lct_at_origin(&sup(1, &[&[2]])).unwrap(), qf(1, 2));
        // constant term: not on the hypersurface
        assert_eq!(lct_at_origin(&sup(2, &[&[0, 0], &[1, 0]])).unwrap(), q(1));
    }

    #[test]
    fn fermat_sylvester_thresholds() {
        let ctx = SylvesterContext::new(2);
        let e = diagonal_exit(&NewtonSupport::fermat(&ctx)).unwrap();
        assert_eq!(e.c, qf(42, 41));
        assert_eq!(lct_from_exit(&e), qf(41, 42));
        let ctx3 = SylvesterContext::new(3);
        assert_eq!(lct_at_origin(&NewtonSupport::fermat(&ctx3)).unwrap(), qf(1805, 1806));
    }

    #[test]
    fn classification() {
        let ctx = SylvesterContext::new(2);
        let c = toric_classify(&NewtonSupport::fermat(&ctx), false).unwrap();
        assert_eq!(c.class, ToricClass::NotLogCanonical);
        assert_eq!(c.label(), "not torically log canonical");
        let with_diag = sup(3, &[&[2, 0, 0], &[1, 1, 1], &[0, 0, 5]]);
        assert!(toric_classify(&with_diag, false).unwrap().exit.c <= q(1));
        let a1 = sup(2, &[&[2, 0], &[0, 2]]);
        assert_eq!(toric_classify(&a1, false).unwrap().class, ToricClass::LogCanonicalBoundary);
        let node = sup(3, &[&[2, 0, 0], &[0, 2, 0], &[0, 0, 2]]);
        let cl = toric_classify(&node, true).unwrap();
        assert_eq!(cl.class, ToricClass::Canonical);
        assert_eq!(cl.label(), "canonical");
    }

    #[test]
    fn translated_support() {
        // (x - 1)^2 + y^2 at base point (1, 0) is x^2 + y^2
        let p = MultiPoly::parse("1 : 2 0\n-2 : 1 0\n1 : 0 0\n1 : 0 2").unwrap();
        let s = NewtonSupport::at(&p, &[q(1), q(0)]).unwrap();
        assert_eq!(s.points, vec![vec![0, 2], vec![2, 0]]);
    }

    #[test]
    fn discrepancy_examples() {
        let node = blowup_discrepancy(&[q(1), q(1)], &q(2)).unwrap();
        assert_eq!(node.ratio, q(1));
        assert_eq!(node.sign, std::cmp::Ordering::Equal);
        let d = blowup_discrepancy(&[q(21), q(14), q(6)], &q(42)).unwrap();
        assert_eq!(d.ratio, qf(41, 42));
        assert_eq!(d.numerator, q(-1));
        assert!(blowup_discrepancy(&[q(0), q(1)], &q(1)).is_err());
    }

    #[test]
    fn e_coefficient_is_one_exactly_at_vbar() {
        for n in 1..=4 {
            let lower = SylvesterContext::new(n - 1);
            for (vbar, m) in [(qf(1, 2), 2), (qf(2, 3), 3), (q(1), 1), (qf(5, 7), 7)] {
                assert_eq!(family_blowup_e_coefficient(&lower, &vbar, m, &vbar), q(1));
                assert_ne!(family_blowup_e_coefficient(&lower, &vbar, m, &qf(1, 11)), q(1));
            }
        }
    }

    #[test]
    fn newton_lemma_small_levels() {
        for n in 1..=3 {
            let rep = verify_newton_lemma(&SylvesterContext::new(n)).unwrap();
            assert_eq!(rep.violations, 0);
            assert!(rep.cases > 0);
        }
        assert!(verify_newton_lemma(&SylvesterContext::new(0)).is_err());
    }
}
