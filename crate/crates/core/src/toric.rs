//! Fan data of the ambient weighted projective space
//! `P(d_{n,0}, ..., d_{n,n}, 1)`: the Fano simplex, its quotient charts,
//! the crepant subdivision ray and a unimodular self-duality witness.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{determinant, solve};
use crate::rational::{is_integer, qi, Q};
use crate::sylvester::SylvesterContext;

/// Vertices `v_0 = e_0, ..., v_n = e_n, v_{n+1} = -sum d_{n,k} e_k` in `Z^{n+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanoSimplex {
    pub dim: usize,
    pub vertices: Vec<Vec<BigInt>>,
}

/// The chart `C^{n+1} / mu_{d_{n,j}}` with residues `(1, d_{n,k} mod d_{n,j} for k != j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientChart {
    pub j: usize,
    pub order: BigInt,
    pub residues: Vec<BigInt>,
}

impl QuotientChart {
    /// Reid's sum test: `1 + sum_{k != j} d_{n,k} = 0 mod d_{n,j}`.
    pub fn reid_sum_ok(&self) -> bool {
        let sum: BigInt = self.residues.iter().sum();
        sum.mod_floor(&self.order).is_zero()
    }
}

pub fn build_simplex(ctx: &SylvesterContext) -> FanoSimplex {
    let dim = ctx.n + 1;
    let mut vertices: Vec<Vec<BigInt>> = (0..dim)
        .map(|k| {
            let mut v = vec![BigInt::zero(); dim];
            v[k] = BigInt::one();
            v
        })
        .collect();
    vertices.push(ctx.d_row.iter().map(|x| -x).collect());
    FanoSimplex { dim, vertices }
}

impl FanoSimplex {
    /// `sum_k d_{n,k} v_k + v_{n+1}`; zero for a well-formed simplex.
    pub fn relation_residual(&self, ctx: &SylvesterContext) -> Vec<BigInt> {
        let mut acc = self.vertices[self.dim].clone();
        for (k, w) in ctx.d_row.iter().enumerate() {
            for (a, v) in acc.iter_mut().zip(&self.vertices[k]) {
                *a += w * v;
            }
        }
        acc
    }

    /// Vertex `u_j` of the polar dual: `<u_j, v_k> = -1` for all `k != j`.
    pub fn dual_vertices(&self) -> Vec<Vec<Q>> {
        (0..=self.dim)
            .map(|j| {
                let rows: Vec<Vec<Q>> = (0..=self.dim)
                    .filter(|&k| k != j)
                    .map(|k| self.vertices[k].iter().map(qi).collect())
                    .collect();
                let rhs = vec![-Q::one(); self.dim];
                solve(&rows, &rhs).expect("facets of a simplex are independent")
            })
            .collect()
    }
}

pub fn charts(ctx: &SylvesterContext) -> Vec<QuotientChart> {
    (0..=ctx.n)
        .map(|j| {
            let order = ctx.d_row[j].clone();
            let mut residues = vec![BigInt::one().mod_floor(&order)];
            residues.extend(
                (0..=ctx.n)
                    .filter(|&k| k != j)
                    .map(|k| ctx.d_row[k].mod_floor(&order)),
            );
            QuotientChart { j, order, residues }
        })
        .collect()
}

/// `v_n' = (d_{n,n} v_n + v_{n+1}) / s_n`, checked to be a lattice vector
/// satisfying `sum_{k<n} d_{n-1,k} v_k + v_n' = 0`.
pub fn crepant_ray(ctx: &SylvesterContext) -> Result<Vec<BigInt>> {
    if ctx.n == 0 {
        return Err(Error::Hypothesis("crepant ray needs n >= 1".into()));
    }
    let n = ctx.n;
    let simplex = build_simplex(ctx);
    let sn = &ctx.s[n];
    let mut ray = Vec::with_capacity(n + 1);
    for c in 0..=n {
        let num = &ctx.d_row[n] * &simplex.vertices[n][c] + &simplex.vertices[n + 1][c];
        let (q, r) = num.div_rem(sn);
        if !r.is_zero() {
            return Err(Error::NonIntegralRay(format!("coordinate {c}: {num}/{sn}")));
        }
        ray.push(q);
    }
    let lower = ctx.lower().expect("n >= 1");
    if &lower.d + 1u32 != *sn {
        return Err(Error::Violation("d_{n-1} + 1 != s_n".into()));
    }
    let mut acc = ray.clone();
    for k in 0..n {
        for (a, v) in acc.iter_mut().zip(&simplex.vertices[k]) {
            *a += &lower.d_row[k] * v;
        }
    }
    if acc.iter().any(|x| !x.is_zero()) {
        return Err(Error::Violation(format!("relation for v_n' fails: {acc:?}")));
    }
    Ok(ray)
}

/// Unimodular `T` with `T v_k = u_{sigma(k)}` for every vertex.
#[derive(Debug, Clone, Serialize)]
pub struct DualityWitness {
    /// Row-major integer matrix.
    pub matrix: Vec<Vec<String>>,
    pub permutation: Vec<usize>,
    pub determinant: i8,
    pub scanned: usize,
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

pub fn self_duality_witness(ctx: &SylvesterContext) -> Result<DualityWitness> {
    if ctx.n > 5 {
        return Err(Error::Hypothesis("permutation scan limited to n <= 5".into()));
    }
    let simplex = build_simplex(ctx);
    let dual = simplex.dual_vertices();
    for (j, u) in dual.iter().enumerate() {
        if !u.iter().all(is_integer) {
            return Err(Error::NotReflexive(j));
        }
        for (k, v) in simplex.vertices.iter().enumerate() {
            if k != j {
                let dot: Q = u.iter().zip(v).map(|(a, b)| a * qi(b)).sum();
                if dot != -Q::one() {
                    return Err(Error::Violation(format!("<u_{j}, v_{k}> = {dot}")));
                }
            }
        }
    }
    let dim = simplex.dim;
    let mut sigma: Vec<usize> = (0..=dim).collect();
    let mut scanned = 0;
    loop {
        scanned += 1;
        // v_0..v_n is the standard basis, so sigma fixes the columns of T
        let t: Vec<Vec<Q>> = (0..dim)
            .map(|r| (0..dim).map(|c| dual[sigma[c]][r].clone()).collect())
            .collect();
        if maps_vertices(&t, &simplex.vertices, &dual, &sigma) {
            let det = determinant(&t);
            if det.abs().is_one() {
                return Ok(DualityWitness {
                    matrix: t
                        .iter()
                        .map(|row| row.iter().map(|x| x.to_integer().to_string()).collect())
                        .collect(),
                    permutation: sigma,
                    determinant: if det.is_positive() { 1 } else { -1 },
                    scanned,
                });
            }
        }
        if !next_permutation(&mut sigma) {
            return Err(Error::NoWitness);
        }
    }
}

fn maps_vertices(t: &[Vec<Q>], vertices: &[Vec<BigInt>], dual: &[Vec<Q>], sigma: &[usize]) -> bool {
    vertices.iter().enumerate().all(|(k, v)| {
        let image: Vec<Q> = t
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * qi(b)).sum())
            .collect();
        image == dual[sigma[k]]
    })
}

/// Re-checks a witness by multiplication: integrality, `|det T| = 1`, bijection on vertices.
pub fn verify_witness(ctx: &SylvesterContext, w: &DualityWitness) -> bool {
    let simplex = build_simplex(ctx);
    let dual = simplex.dual_vertices();
    let t: Vec<Vec<Q>> = w
        .matrix
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| qi(&x.parse::<BigInt>().expect("integer entry")))
                .collect()
        })
        .collect();
    let mut seen = w.permutation.clone();
    seen.sort_unstable();
    seen == (0..=simplex.dim).collect::<Vec<_>>()
        && determinant(&t).abs().is_one()
        && maps_vertices(&t, &simplex.vertices, &dual, &w.permutation)
}
