//! Orbifold `h^{1,1}` of the generic member of `M_n` as the `z^d w^0`
//! coefficient of the orbifold generating function, summed over twisted
//! sectors `ell = 0..d-1`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{to_i128, Q};
use crate::sylvester::SylvesterContext;

/// Largest `d_n` that `h11_brute` scans by default (covers `n = 4`).
pub const DEFAULT_SCAN_CAP: u128 = 4_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaProfile {
    pub ell: u128,
    /// `{ell/s_i}` for `i <= n`, then `ell/d`.
    pub theta: Vec<Q>,
    pub t0: Vec<usize>,
    pub t1: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HodgeSummand {
    pub profile: ThetaProfile,
    /// `sum_{T1} (d/2 - a_i)`.
    pub a: Q,
    /// `sum_{T1} (d theta_i - d/2)`.
    pub b: Q,
    /// `ell - sum_{i<=n} floor(ell/s_i)`.
    pub s: BigInt,
    /// Solutions of `A + sum_{T0} k_i a_i = d` with `B = 0`.
    pub count: u128,
}

/// Integer data of one sector; `A` and `B` are doubled to stay integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SectorData {
    pub two_a: i128,
    pub two_b: i128,
    pub s: i128,
    /// `|T1|`.
    pub p: usize,
    /// Bit `i` set iff `i` is in `T0`.
    pub t0_mask: u64,
    pub count: u128,
}

/// Fixed-width copy of the weights `a_i = d/s_i` (and `a_{n+1} = 1`).
#[derive(Debug, Clone)]
pub struct SectorTable {
    pub n: usize,
    pub d: i128,
    pub s: Vec<i128>,
    pub a: Vec<i128>,
    /// Bounds on `k_i`: `s_i - 2`, and `d - 2` for the last index.
    pub bound: Vec<i128>,
}

impl SectorTable {
    pub fn new(ctx: &SylvesterContext) -> Result<Self> {
        let d = ctx.d_i128()?;
        let s: Vec<i128> = ctx
            .s
            .iter()
            .take(ctx.n + 1)
            .map(|x| to_i128(x, "s_i"))
            .collect::<Result<_>>()?;
        let mut a: Vec<i128> = ctx.d_row.iter().map(|x| to_i128(x, "a_i")).collect::<Result<_>>()?;
        a.push(1);
        let mut bound: Vec<i128> = s.iter().map(|x| x - 2).collect();
        bound.push(d - 2);
        Ok(SectorTable { n: ctx.n, d, s, a, bound })
    }

    pub fn sector(&self, ell: i128) -> SectorData {
        let n = self.n;
        let d = self.d;
        let mut two_a = 0;
        let mut two_b = 0;
        let mut t0_mask = 0u64;
        let mut p = 0;
        let mut floors = 0;
        for i in 0..=n + 1 {
            let d_theta = if i <= n {
                floors += ell / self.s[i];
                self.a[i] * (ell % self.s[i])
            } else {
                ell
            };
            if d_theta == 0 {
                t0_mask |= 1 << i;
            } else {
                p += 1;
                two_a += d - 2 * self.a[i];
                two_b += 2 * d_theta - d;
            }
        }
        let s = ell - floors;
        let count = if two_b != 0 || two_a % 2 != 0 {
            0
        } else {
            let t0: Vec<usize> = (0..=n + 1).filter(|i| t0_mask >> i & 1 == 1).collect();
            self.count_solutions(&t0, d - two_a / 2)
        };
        SectorData {
            two_a,
            two_b,
            s,
            p,
            t0_mask,
            count,
        }
    }

    /// Number of `(k_i)_{i in idx}` within bounds with `sum k_i a_i = target`.
    pub fn count_solutions(&self, idx: &[usize], target: i128) -> u128 {
        let mut order = idx.to_vec();
        order.sort_by(|x, y| self.a[*y].cmp(&self.a[*x]).then(x.cmp(y)));
        self.count_rec(&order, target)
    }

    fn count_rec(&self, order: &[usize], target: i128) -> u128 {
        if target < 0 {
            return 0;
        }
        match order {
            [] => u128::from(target == 0),
            [j] => {
                let a = self.a[*j];
                u128::from(target % a == 0 && target / a <= self.bound[*j])
            }
            [j, last] => {
                // closed form for the last two: k_j a_j + k_last a_last = target
                let (aj, al) = (self.a[*j], self.a[*last]);
                if al == 1 {
                    let lo = (target - self.bound[*last]).max(0);
                    let lo = (lo + aj - 1) / aj;
                    let hi = (target / aj).min(self.bound[*j]);
                    if hi < lo {
                        0
                    } else {
                        (hi - lo + 1) as u128
                    }
                } else {
                    (0..=self.bound[*j].min(target / aj))
                        .map(|k| self.count_rec(&order[1..], target - k * aj))
                        .sum()
                }
            }
            [j, rest @ ..] => {
                let a = self.a[*j];
                (0..=self.bound[*j].min(target / a))
                    .map(|k| self.count_rec(rest, target - k * a))
                    .sum()
            }
        }
    }
}

pub fn profile(ctx: &SylvesterContext, ell: u128) -> Result<ThetaProfile> {
    let d = BigInt::from(ell);
    if d >= ctx.d {
        return Err(Error::OutOfRange(format!("ell = {ell} not below d = {}", ctx.d)));
    }
    let mut theta: Vec<Q> = (0..=ctx.n)
        .map(|i| {
            let x = Q::new(d.clone(), ctx.s[i].clone());
            &x - x.floor()
        })
        .collect();
    theta.push(Q::new(d, ctx.d.clone()));
    let (t0, t1): (Vec<usize>, Vec<usize>) = (0..theta.len()).partition(|&i| theta[i].is_zero());
    Ok(ThetaProfile { ell, theta, t0, t1 })
}

pub fn summand(ctx: &SylvesterContext, ell: u128) -> Result<HodgeSummand> {
    let prof = profile(ctx, ell)?;
    let d = Q::from_integer(ctx.d.clone());
    let half = &d / Q::from_integer(2.into());
    let mut weights: Vec<Q> = ctx.d_row.iter().map(|x| Q::from_integer(x.clone())).collect();
    weights.push(Q::one());
    let a: Q = prof.t1.iter().map(|&i| &half - &weights[i]).sum();
    let b: Q = prof.t1.iter().map(|&i| &d * &prof.theta[i] - &half).sum();
    let ell_b = BigInt::from(ell);
    let s = &ell_b - (0..=ctx.n).map(|i| &ell_b / &ctx.s[i]).sum::<BigInt>();
    let count = if !b.is_zero() || !a.is_integer() {
        0
    } else {
        let target = (&d - &a).to_integer();
        let table = SectorTable::new(ctx)?;
        table.count_solutions(&prof.t0, to_i128(&target, "target")?)
    };
    Ok(HodgeSummand {
        profile: prof,
        a,
        b,
        s,
        count,
    })
}

impl HodgeSummand {
    /// `S = ell/d + sum {ell/s_i}` and `B = 0 <=> S = |T1|/2`.
    pub fn identities_hold(&self) -> bool {
        let s = Q::from_integer(self.s.clone());
        let theta_sum: Q = self.profile.theta.iter().sum();
        let p = Q::new(BigInt::from(self.profile.t1.len()), BigInt::from(2));
        s == theta_sum && (self.b.is_zero() == (s == p))
    }
}

impl SectorData {
    /// Integer form of the same identities, given the table.
    pub fn identities_hold(&self, table: &SectorTable, ell: i128) -> bool {
        let theta_num: i128 = (0..=table.n).map(|i| table.a[i] * (ell % table.s[i])).sum::<i128>() + ell;
        self.s * table.d == theta_num && ((self.two_b == 0) == (2 * self.s == self.p as i128))
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ScanReport {
    pub n: usize,
    pub h11: u128,
    /// Sectors `ell > 0` with a nonzero contribution.
    pub nonzero_twisted: u64,
    pub identity_failures: u64,
}

/// `sum_{ell=0}^{d-1} N(ell)` by scanning every sector.
pub fn h11_brute(ctx: &SylvesterContext, cap: u128) -> Result<ScanReport> {
    let table = SectorTable::new(ctx)?;
    if table.d as u128 > cap {
        return Err(Error::CapExceeded {
            count: table.d.to_string(),
            cap: u64::try_from(cap).unwrap_or(u64::MAX),
        });
    }
    const CHUNK: i128 = 1 << 14;
    let chunks = (table.d + CHUNK - 1) / CHUNK;
    let parts: Vec<ScanReport> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rep = ScanReport::default();
            for ell in c * CHUNK..((c + 1) * CHUNK).min(table.d) {
                let sec = table.sector(ell);
                rep.h11 += sec.count;
                if ell > 0 && sec.count > 0 {
                    rep.nonzero_twisted += 1;
                }
                if !sec.identities_hold(&table, ell) {
                    rep.identity_failures += 1;
                }
            }
            rep
        })
        .collect();
    let mut total = ScanReport {
        n: ctx.n,
        ..Default::default()
    };
    for p in parts {
        total.h11 += p.h11;
        total.nonzero_twisted += p.nonzero_twisted;
        total.identity_failures += p.identity_failures;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FastH11 {
    pub h11: u128,
    /// `count_positive - 1`.
    pub via_count: u128,
    /// Untwisted-sector lattice count `N(0)`.
    pub via_lattice: u128,
}

/// `N(0)` alone, which is all of `h^{1,1}` once every twisted sector vanishes.
pub fn h11_fast(ctx: &SylvesterContext) -> Result<FastH11> {
    if ctx.n < 3 {
        return Err(Error::Hypothesis("twisted sectors vanish only for n >= 3".into()));
    }
    let via_count = u128::try_from(ctx.count_positive()?).map_err(|_| Error::Overflow("count"))? - 1;
    let table = SectorTable::new(ctx)?;
    let all: Vec<usize> = (0..=ctx.n + 1).collect();
    let via_lattice = table.count_solutions(&all, table.d);
    if via_count != via_lattice {
        return Err(Error::Violation(format!(
            "count_positive - 1 = {via_count} but N(0) = {via_lattice}"
        )));
    }
    Ok(FastH11 {
        h11: via_count,
        via_count,
        via_lattice,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Gate {
    /// `|T0| < n - 1`: the z-equation has a non-positive right-hand side.
    FewZeros,
    /// `|T1|` odd or `S != |T1|/2`: `B != 0`.
    WeightParity,
    /// `T1 = {j, n+1}` and `sum k_i a_i = a_j + 1` forces `k_i = -1 mod s_i`.
    Residue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditOutcome {
    pub ell: u128,
    pub gate: Gate,
    pub j: Option<usize>,
}

/// Walks the vanishing argument for one twisted sector, checking each step
/// against the brute counter.
pub fn structure_audit(table: &SectorTable, ell: i128) -> Result<AuditOutcome> {
    let n = table.n;
    if n < 3 || ell <= 0 || ell >= table.d {
        return Err(Error::Hypothesis("audit needs n >= 3 and 0 < ell < d".into()));
    }
    let sec = table.sector(ell);
    let fail = |why: &str| Err(Error::Violation(format!("ell = {ell}: {why}")));
    if sec.count > 0 {
        return fail("brute counter finds solutions");
    }
    if sec.t0_mask >> (n + 1) & 1 == 1 {
        return fail("last index has vanishing fractional part");
    }
    let m = sec.t0_mask.count_ones() as usize;
    if m + sec.p != n + 2 {
        return fail("T0 and T1 do not partition the indices");
    }
    let outcome = |gate, j| {
        Ok(AuditOutcome {
            ell: ell as u128,
            gate,
            j,
        })
    };
    if m + 1 < n {
        return outcome(Gate::FewZeros, None);
    }
    if sec.p % 2 == 1 || 2 * sec.s != sec.p as i128 {
        if sec.two_b == 0 {
            return fail("B vanishes although S != p/2");
        }
        return outcome(Gate::WeightParity, None);
    }
    if sec.two_b != 0 {
        return fail("S = p/2 but B != 0");
    }
    if sec.p != 2 || m != n {
        return fail("B = 0 outside the two-element T1 shape");
    }
    let j = (0..=n).find(|&i| sec.t0_mask >> i & 1 == 0).expect("one index in T1");
    for i in (0..=n).filter(|&i| i != j) {
        if (table.a[i] + 1) % table.s[i] != 0 {
            return fail("a_i is not -1 mod s_i");
        }
        if (table.a[j] + 1) % table.s[i] != 1 % table.s[i] {
            return fail("a_j is not 0 mod s_i");
        }
    }
    outcome(Gate::Residue, Some(j))
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct AuditReport {
    pub n: usize,
    pub few_zeros: u64,
    pub weight_parity: u64,
    pub residue: u64,
}

pub fn audit_all(ctx: &SylvesterContext) -> Result<AuditReport> {
    let table = SectorTable::new(ctx)?;
    const CHUNK: i128 = 1 << 14;
    let chunks = (table.d + CHUNK - 1) / CHUNK;
    let parts: Vec<Result<AuditReport>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rep = AuditReport::default();
            for ell in (c * CHUNK).max(1)..((c + 1) * CHUNK).min(table.d) {
                match structure_audit(&table, ell)?.gate {
                    Gate::FewZeros => rep.few_zeros += 1,
                    Gate::WeightParity => rep.weight_parity += 1,
                    Gate::Residue => rep.residue += 1,
                }
            }
            Ok(rep)
        })
        .collect();
    let mut total = AuditReport {
        n: ctx.n,
        ..Default::default()
    };
    for p in parts {
        let p = p?;
        total.few_zeros += p.few_zeros;
        total.weight_parity += p.weight_parity;
        total.residue += p.residue;
    }
    Ok(total)
}

/// Coefficient of `z^{zexp} w^{wexp}` in the generating function (debugging
/// aid; only the `z^d w^0` coefficient carries a proven meaning).
pub fn coefficient(ctx: &SylvesterContext, zexp: &Q, wexp: &Q, cap: u128) -> Result<u128> {
    let table = SectorTable::new(ctx)?;
    if table.d as u128 > cap {
        return Err(Error::CapExceeded {
            count: table.d.to_string(),
            cap: u64::try_from(cap).unwrap_or(u64::MAX),
        });
    }
    let two_z = zexp * Q::from_integer(2.into());
    let two_w = wexp * Q::from_integer(2.into());
    if !two_z.is_integer() || !two_w.is_integer() {
        return Ok(0);
    }
    let two_z = to_i128(&two_z.to_integer(), "z exponent")?;
    let two_w = to_i128(&two_w.to_integer(), "w exponent")?;
    let total = (0..table.d)
        .into_par_iter()
        .map(|ell| {
            let sec = table.sector(ell);
            let rest = two_z - sec.two_a;
            if sec.two_b != two_w || rest % 2 != 0 {
                return 0;
            }
            let t0: Vec<usize> = (0..=table.n + 1).filter(|i| sec.t0_mask >> i & 1 == 1).collect();
            table.count_solutions(&t0, rest / 2)
        })
        .sum();
    Ok(total)
}
