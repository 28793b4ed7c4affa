//! Exact two-phase dense simplex with Bland's rule.
//!
//! Solves `min c.x  s.t.  A x = b, x >= 0` over the rationals.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { x: Vec<Q>, value: Q },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Q>>, // each row: coefficients then rhs
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Q {
        &self.rows[r][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[Q], allowed: usize) -> Vec<Q> {
        (0..allowed)
            .map(|j| {
                let mut z = cost[j].clone();
                for (r, &b) in self.basis.iter().enumerate() {
                    if !self.rows[r][j].is_zero() && !cost[b].is_zero() {
                        z -= &cost[b] * &self.rows[r][j];
                    }
                }
                z
            })
            .collect()
    }

    /// Runs Bland's rule over columns `< allowed`. Returns false when unbounded.
    fn optimize(&mut self, cost: &[Q], allowed: usize) -> bool {
        loop {
            let red = self.reduced_costs(cost, allowed);
            let Some(enter) = (0..allowed).find(|&j| red[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Q)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][enter];
                if a.is_positive() {
                    let ratio = self.rhs(r) / a;
                    let better = match &best {
                        None => true,
                        Some((br, bv)) => {
                            ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br])
                        }
                    };
                    if better {
                        best = Some((r, ratio));
                    }
                }
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, enter),
            }
        }
    }
}

pub fn solve(a: &[Vec<Q>], b: &[Q], cost: &[Q]) -> Result<LpOutcome> {
    let m = a.len();
    let n = cost.len();
    if b.len() != m || a.iter().any(|r| r.len() != n) {
        return Err(Error::Lp("dimension mismatch".into()));
    }
    let ncols = n + m;
    let mut rows = Vec::with_capacity(m);
    for (i, (ar, bi)) in a.iter().zip(b).enumerate() {
        let flip = bi.is_negative();
        let mut row: Vec<Q> = ar.iter().map(|x| if flip { -x.clone() } else { x.clone() }).collect();
        row.extend((0..m).map(|k| if k == i { Q::from_integer(1.into()) } else { Q::zero() }));
        row.push(if flip { -bi.clone() } else { bi.clone() });
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        basis: (n..n + m).collect(),
        ncols,
    };

    // phase 1: minimize the sum of artificials
    let mut phase1 = vec![Q::zero(); ncols];
    for c in phase1.iter_mut().skip(n) {
        *c = Q::from_integer(1.into());
    }
    t.optimize(&phase1, ncols);
    let infeas: Q = t
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &bv)| bv >= n)
        .map(|(r, _)| t.rhs(r).clone())
        .sum();
    if infeas.is_positive() {
        return Ok(LpOutcome::Infeasible);
    }
    // drive remaining artificials out, dropping redundant rows
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= n {
            match (0..n).find(|&j| !t.rows[r][j].is_zero()) {
                Some(j) => t.pivot(r, j),
                None => {
                    t.rows.remove(r);
                    t.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    let mut full_cost = cost.to_vec();
    full_cost.extend((0..m).map(|_| Q::zero()));
    if !t.optimize(&full_cost, n) {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![Q::zero(); n];
    for (r, &bv) in t.basis.iter().enumerate() {
        if bv < n {
            x[bv] = t.rhs(r).clone();
        }
    }
    let value = x.iter().zip(cost).map(|(a, c)| a * c).sum();
    Ok(LpOutcome::Optimal { x, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    fn v(x: &[i64]) -> Vec<Q> {
        x.iter().map(|&a| q(a)).collect()
    }

    #[test]
    fn small_lp() {
        // min -x - y s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let a = vec![v(&[1, 2, 1, 0]), v(&[3, 1, 0, 1])];
        let out = solve(&a, &v(&[4, 6]), &v(&[-1, -1, 0, 0])).unwrap();
        match out {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, qf(-14, 5));
                assert_eq!(&x[..2], &[qf(8, 5), qf(6, 5)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = vec![v(&[1, 1])];
        assert_eq!(solve(&a, &v(&[-1]), &v(&[1, 1])).unwrap(), LpOutcome::Infeasible);
        let a = vec![v(&[1, -1])];
        assert_eq!(solve(&a, &v(&[0]), &v(&[-1, 0])).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn degenerate_redundant_rows() {
        let a = vec![v(&[1, 1]), v(&[2, 2])];
        match solve(&a, &v(&[1, 2]), &v(&[1, 2])).unwrap() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, q(1)),
            other => panic!("{other:?}"),
        }
    }
}
