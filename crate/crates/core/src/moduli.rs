//! Points of the moduli space `M_n`, the polynomials they define, and the
//! embedding `M_{n-1} -> M_n`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::poly::{complete_power, MultiPoly};
use crate::rational::{format_q, parse_q, pow, pow_i, Q};
use crate::sylvester::SylvesterContext;

/// Coordinates `t_i` of a point of `M_n`, keyed by positive-weight tuples
/// `(i_0, ..., i_n)`. Zero coordinates are not stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuliPoint {
    pub n: usize,
    coords: BTreeMap<Vec<u32>, Q>,
}

fn in_box(ctx: &SylvesterContext, i: &[u32]) -> bool {
    i.len() == ctx.n + 1 && (0..=ctx.n).all(|k| BigInt::from(i[k]) + 2u32 <= ctx.s[k])
}

impl ModuliPoint {
    /// Validates tuples and drops zero coordinates; rejects the origin.
    pub fn new(n: usize, coords: impl IntoIterator<Item = (Vec<u32>, Q)>) -> Result<Self> {
        let ctx = SylvesterContext::new(n);
        let mut map = BTreeMap::new();
        for (i, t) in coords {
            if !in_box(&ctx, &i) {
                return Err(Error::InvalidPoint(format!("tuple {i:?} outside the box")));
            }
            if !ctx.weight(&i)?.is_positive() {
                return Err(Error::InvalidPoint(format!("tuple {i:?} has non-positive weight")));
            }
            if !t.is_zero() {
                map.insert(i, t);
            }
        }
        if map.is_empty() {
            return Err(Error::InvalidPoint("all coordinates are zero".into()));
        }
        Ok(ModuliPoint { n, coords: map })
    }

    pub fn ctx(&self) -> SylvesterContext {
        SylvesterContext::new(self.n)
    }

    pub fn coords(&self) -> &BTreeMap<Vec<u32>, Q> {
        &self.coords
    }

    pub fn get(&self, i: &[u32]) -> Q {
        self.coords.get(i).cloned().unwrap_or_else(Q::zero)
    }

    /// `t -> lambda . t = (lambda^{w(i)} t_i)`.
    pub fn rescale(&self, lambda: &Q) -> Result<ModuliPoint> {
        if lambda.is_zero() {
            return Err(Error::ZeroScale);
        }
        let ctx = self.ctx();
        let coords = self
            .coords
            .iter()
            .map(|(i, t)| {
                let w = ctx.weight(i).expect("validated");
                let w: i64 = i64::try_from(w).expect("weight fits i64 at materializable levels");
                (i.clone(), t * pow_i(lambda, w))
            })
            .collect();
        Ok(ModuliPoint { n: self.n, coords })
    }

    /// Equality in the weighted projective space: some complex `lambda` maps one to the other.
    pub fn projectively_equal(&self, other: &ModuliPoint) -> bool {
        if self.n != other.n || self.coords.len() != other.coords.len() {
            return false;
        }
        if !self.coords.keys().eq(other.coords.keys()) {
            return false;
        }
        let ctx = self.ctx();
        let weights: Vec<BigInt> = self.coords.keys().map(|i| ctx.weight(i).unwrap()).collect();
        let ratios: Vec<Q> = self
            .coords
            .iter()
            .map(|(i, t)| other.coords[i].clone() / t)
            .collect();
        let g = weights.iter().fold(BigInt::zero(), |g, w| g.gcd(w));
        let reduced: Vec<BigInt> = weights.iter().map(|w| w / &g).collect();
        let bezout = bezout_coefficients(&reduced);
        let mut mu = Q::one();
        for (r, c) in ratios.iter().zip(&bezout) {
            let c: i64 = i64::try_from(c.clone()).expect("small Bezout coefficient");
            mu *= pow_i(r, c);
        }
        ratios.iter().zip(&reduced).all(|(r, e)| {
            let e: i64 = i64::try_from(e.clone()).expect("small weight");
            *r == pow_i(&mu, e)
        })
    }

    pub fn to_json(&self) -> Value {
        let mut coords = Map::new();
        for (i, t) in &self.coords {
            let key = i.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
            coords.insert(key, Value::String(format_q(t)));
        }
        json!({ "n": self.n, "coords": coords })
    }

    /// Accepts keys with `n+1` indices or `n` indices (with `i_0 = 0` omitted).
    pub fn from_json(v: &Value) -> Result<ModuliPoint> {
        let n = v
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("missing integer field \"n\"".into()))? as usize;
        let obj = v
            .get("coords")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Parse("missing object field \"coords\"".into()))?;
        let mut coords = Vec::new();
        for (key, val) in obj {
            let mut i: Vec<u32> = if key.trim().is_empty() {
                vec![]
            } else {
                key.split(',')
                    .map(|x| {
                        x.trim()
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad tuple key {key:?}")))
                    })
                    .collect::<Result<_>>()?
            };
            if i.len() == n {
                i.insert(0, 0);
            }
            if i.len() != n + 1 {
                return Err(Error::Parse(format!("tuple key {key:?} has wrong length")));
            }
            let t = match val {
                Value::String(s) => parse_q(s)?,
                Value::Number(x) if x.is_i64() => Q::from_integer(x.as_i64().unwrap().into()),
                _ => return Err(Error::Parse(format!("coordinate {key:?} must be a \"num/den\" string"))),
            };
            coords.push((i, t));
        }
        ModuliPoint::new(n, coords)
    }
}

/// Integers `c` with `sum c_i e_i = gcd(e)`.
fn bezout_coefficients(e: &[BigInt]) -> Vec<BigInt> {
    let mut coeffs = vec![BigInt::zero(); e.len()];
    if e.is_empty() {
        return coeffs;
    }
    let mut g = e[0].clone();
    coeffs[0] = BigInt::one();
    for k in 1..e.len() {
        let ext = g.extended_gcd(&e[k]);
        for c in coeffs.iter_mut().take(k) {
            *c *= &ext.x;
        }
        coeffs[k] = ext.y;
        g = ext.gcd;
    }
    if g.is_negative() {
        for c in coeffs.iter_mut() {
            *c = -c.clone();
        }
    }
    coeffs
}

fn fermat(ctx: &SylvesterContext, nvars: usize) -> MultiPoly {
    let mut p = MultiPoly::zero(nvars);
    for k in 0..=ctx.n {
        let mut e = vec![0; nvars];
        e[k] = ctx.s_u32(k);
        p.add_term(e, Q::one());
    }
    p
}

/// `x_0^{s_0} + ... + x_n^{s_n} + sum t_i x^i`, homogenized with `x_{n+1}^{w(i)}` when asked.
pub fn assemble(point: &ModuliPoint, homogeneous: bool) -> MultiPoly {
    let ctx = point.ctx();
    let nvars = ctx.n + 1 + usize::from(homogeneous);
    let mut p = fermat(&ctx, nvars);
    for (i, t) in &point.coords {
        let mut e = i.clone();
        if homogeneous {
            let w = ctx.weight(i).expect("validated");
            e.push(u32::try_from(w).expect("weight fits u32"));
        }
        p.add_term(e, t.clone());
    }
    p
}

/// Reads coordinates off an affine polynomial that is already in normal form.
fn read_normal_form(ctx: &SylvesterContext, affine: &MultiPoly) -> Result<BTreeMap<Vec<u32>, Q>> {
    let nv = ctx.n + 1;
    let mut coords = BTreeMap::new();
    for (e, c) in affine.terms() {
        let fermat_var = (0..nv).find(|&k| {
            BigInt::from(e[k]) == ctx.s[k] && e.iter().enumerate().all(|(j, x)| j == k || *x == 0)
        });
        if let Some(k) = fermat_var {
            if !c.is_one() {
                return Err(Error::NotNormalizable(format!(
                    "x{k}^{} has coefficient {c}",
                    ctx.s[k]
                )));
            }
            continue;
        }
        if !in_box(ctx, e) || !ctx.weight(e)?.is_positive() {
            return Err(Error::NotNormalizable(format!(
                "monomial {e:?} is not a positive-weight deformation monomial"
            )));
        }
        coords.insert(e.clone(), c.clone());
    }
    for k in 0..nv {
        if !fermat_present(ctx, affine, k) {
            return Err(Error::MissingPower {
                var: k,
                exp: ctx.s_u32(k),
            });
        }
    }
    Ok(coords)
}

fn fermat_present(ctx: &SylvesterContext, p: &MultiPoly, k: usize) -> bool {
    let mut e = vec![0; p.nvars()];
    e[k] = ctx.s_u32(k);
    !p.coeff(&e).is_zero()
}

/// Image of a point of `M_{n-1}` in `M_n`: cone over the equation, add
/// `x_n^{s_n}`, complete the `s_n`-th power in `x_n`, read off coordinates.
pub fn embed(point: &ModuliPoint) -> Result<ModuliPoint> {
    let (coords, _) = embed_coords(point.n, point.coords())?;
    Ok(ModuliPoint {
        n: point.n + 1,
        coords,
    })
}

/// Raw form of `embed` that also accepts the all-zero coordinate vector.
/// Returns the new coordinates and the intermediate affine polynomial.
pub fn embed_coords(
    lower_n: usize,
    lower: &BTreeMap<Vec<u32>, Q>,
) -> Result<(BTreeMap<Vec<u32>, Q>, MultiPoly)> {
    let lower_ctx = SylvesterContext::new(lower_n);
    let ctx = SylvesterContext::new(lower_n + 1);
    let n = ctx.n;
    // cone: the homogenizing variable of level n-1 becomes the affine x_n
    let mut cone = fermat(&lower_ctx, n + 1);
    for (i, t) in lower {
        let mut e = i.clone();
        let w = lower_ctx.weight(i)?;
        e.push(u32::try_from(w).map_err(|_| Error::InvalidPoint(format!("{i:?}")))?);
        cone.add_term(e, t.clone());
    }
    let sn = ctx.s_u32(n);
    let mut top = vec![0; n + 1];
    top[n] = sn;
    cone.add_term(top, Q::one());

    let (shifted, _shift) = complete_power(&cone, n, sn)?;
    let mut below = vec![0; n + 1];
    below[n] = sn - 1;
    if !shifted.coeff(&below).is_zero() {
        return Err(Error::Violation("x_n^{s_n - 1} survived completion".into()));
    }
    let coords = read_normal_form(&ctx, &shifted)?;
    Ok((coords, shifted))
}

/// Exact rational `k`-th root, if it exists.
pub fn rational_root(x: &Q, k: u32) -> Option<Q> {
    if x.is_zero() {
        return Some(Q::zero());
    }
    if x.is_negative() && k.is_multiple_of(2) {
        return None;
    }
    let root = |v: &BigInt| -> Option<BigInt> {
        let r = v.abs().nth_root(k);
        (num_traits::pow(r.clone(), k as usize) == v.abs()).then_some(r)
    };
    let n = root(x.numer())?;
    let d = root(x.denom())?;
    let r = Q::new(n, d);
    Some(if x.is_negative() { -r } else { r })
}

/// Brings an equation to normal form and reads off its moduli point.
///
/// Input is either homogeneous in `x_0..x_{n+1}` of weighted degree `d_n` or
/// affine in `x_0..x_n`. Returns the point and the factors `c_k` of the
/// rescaling `x_k -> c_k x_k` applied before completing powers.
pub fn normalize_equation(ctx: &SylvesterContext, p: &MultiPoly) -> Result<(ModuliPoint, Vec<Q>)> {
    let nv = ctx.n + 1;
    let weights = ctx.ambient_weights();
    let homog = if p.nvars() == nv + 1 {
        match p.quasi_homogeneous_degree(&weights) {
            Some(d) if d == ctx.d => p.clone(),
            _ => {
                return Err(Error::NotNormalizable(format!(
                    "not quasi-homogeneous of degree {}",
                    ctx.d
                )))
            }
        }
    } else if p.nvars() == nv {
        p.homogenize(&ctx.d_row, &ctx.d)?
    } else {
        return Err(Error::NotNormalizable(format!(
            "expected {nv} or {} variables, got {}",
            nv + 1,
            p.nvars()
        )));
    };

    let mut leads = Vec::with_capacity(nv);
    for k in 0..nv {
        let mut e = vec![0; nv + 1];
        e[k] = ctx.s_u32(k);
        let a = homog.coeff(&e);
        if a.is_zero() {
            return Err(Error::MissingPower {
                var: k,
                exp: ctx.s_u32(k),
            });
        }
        leads.push(a);
    }
    let candidates = std::iter::once(Q::one()).chain(leads.iter().map(|a| a.recip()));
    let mut chosen = None;
    for kappa in candidates {
        let factors: Option<Vec<Q>> = (0..nv)
            .map(|k| rational_root(&(&leads[k] * &kappa).recip(), ctx.s_u32(k)))
            .collect();
        if let Some(f) = factors {
            chosen = Some((kappa, f));
            break;
        }
    }
    let (kappa, mut factors) = chosen.ok_or_else(|| {
        Error::NotNormalizable("unit leading coefficients need irrational rescaling".into())
    })?;
    factors.push(Q::one());
    let mut work = homog.scale(&kappa).rescale_vars(&factors);
    factors.pop();

    for k in 0..nv {
        work = complete_power(&work, k, ctx.s_u32(k))?.0;
    }
    let coords = read_normal_form(ctx, &work.dehomogenize())?;
    if coords.is_empty() {
        return Err(Error::InvalidPoint("equation is the Fermat cone".into()));
    }
    Ok((
        ModuliPoint {
            n: ctx.n,
            coords,
        },
        factors,
    ))
}

/// `j = 1728 * 4 t_1^3 / (4 t_1^3 + 27 t_0^2)` on `M_1`; `None` where the denominator vanishes.
pub fn j_invariant(point: &ModuliPoint) -> Option<Q> {
    assert_eq!(point.n, 1);
    let t1 = point.get(&[0, 1]);
    let t0 = point.get(&[0, 0]);
    let num = pow(&t1, 3) * Q::from_integer(4.into());
    let den = &num + pow(&t0, 2) * Q::from_integer(27.into());
    (!den.is_zero()).then(|| num * Q::from_integer(1728.into()) / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    fn m1(t1: Q, t0: Q) -> ModuliPoint {
        ModuliPoint::new(1, [(vec![0, 1], t1), (vec![0, 0], t0)]).unwrap()
    }

    #[test]
    fn assemble_m1_example() {
        let p = assemble(&m1(q(1), q(0)), true);
        let expect = MultiPoly::parse("1 : 2 0 0\n1 : 0 3 0\n1 : 0 1 4").unwrap();
        assert_eq!(p, expect);
    }

    #[test]
    fn assemble_m0_example() {
        let p = ModuliPoint::new(0, [(vec![0], q(1))]).unwrap();
        let h = assemble(&p, true);
        assert_eq!(h, MultiPoly::parse("1 : 2 0\n1 : 0 2").unwrap());
        assert_eq!(h.dehomogenize(), assemble(&p, false));
    }

    #[test]
    fn assembled_equation_is_quasi_homogeneous() {
        let ctx = SylvesterContext::new(2);
        let tuples = ctx.enumerate_positive(100).unwrap();
        let pt = ModuliPoint::new(2, tuples.iter().enumerate().map(|(k, t)| (t.i.clone(), q(k as i64 + 1)))).unwrap();
        assert_eq!(
            assemble(&pt, true).quasi_homogeneous_degree(&ctx.ambient_weights()),
            Some(ctx.d.clone())
        );
    }

    #[test]
    fn rescale_examples() {
        let p = m1(q(1), q(1));
        assert_eq!(p.rescale(&q(1)).unwrap(), p);
        let r = p.rescale(&q(2)).unwrap();
        assert_eq!(r.get(&[0, 1]), q(16));
        assert_eq!(r.get(&[0, 0]), q(64));
        assert_eq!(j_invariant(&r), j_invariant(&p));
        assert_eq!(p.rescale(&q(0)), Err(Error::ZeroScale));
    }

    #[test]
    fn j_invariant_special_points() {
        assert_eq!(j_invariant(&m1(q(1), q(0))), Some(q(1728)));
        assert_eq!(j_invariant(&m1(q(0), q(1))), Some(q(0)));
        assert_eq!(j_invariant(&m1(qf(-1, 3), qf(2, 27))), None);
    }

    #[test]
    fn projective_equality() {
        let p = m1(qf(3, 5), qf(-2, 7));
        assert!(p.projectively_equal(&p.rescale(&qf(-5, 3)).unwrap()));
        // weights (4, 6): scaling t1 alone by 16 but t0 by -64 is lambda = 2i, allowed over C
        let r = m1(qf(48, 5), qf(128, 7));
        assert!(p.projectively_equal(&r));
        let bad = m1(qf(3, 5), qf(2, 7).recip());
        assert!(!p.projectively_equal(&bad));
        assert!(!p.projectively_equal(&m1(qf(3, 5), q(0))));
    }

    #[test]
    fn embed_m0_to_m1() {
        for t in [q(1), qf(-3, 4), q(5)] {
            let img = embed(&ModuliPoint::new(0, [(vec![0], t.clone())]).unwrap()).unwrap();
            assert_eq!(img.get(&[0, 1]), -pow(&t, 2) / q(3));
            assert_eq!(img.get(&[0, 0]), pow(&t, 3) * qf(2, 27));
        }
    }

    #[test]
    fn embed_zero_is_fermat() {
        let (coords, affine) = embed_coords(1, &BTreeMap::new()).unwrap();
        assert!(coords.is_empty());
        let expect = MultiPoly::parse("1 : 2 0 0\n1 : 0 3 0\n1 : 0 0 7").unwrap();
        assert_eq!(affine, expect);
    }

    #[test]
    fn normalize_roundtrip_and_idempotence() {
        let p = m1(qf(3, 5), qf(-2, 7));
        let (back, f) = normalize_equation(&p.ctx(), &assemble(&p, true)).unwrap();
        assert_eq!(back, p);
        assert!(f.iter().all(|x| x.is_one()));
        let (again, _) = normalize_equation(&p.ctx(), &assemble(&back, false)).unwrap();
        assert_eq!(again, back);
    }

    #[test]
    fn normalize_rescales_leading_coefficients() {
        // 4 x0^2 + x1^3 + 3 x1^2 x2^2 + x2^6: x0 -> x0/2 then complete the cube
        let ctx = SylvesterContext::new(1);
        let p = MultiPoly::parse("4 : 2 0 0\n1 : 0 3 0\n3 : 0 2 2\n1 : 0 0 6").unwrap();
        let (pt, f) = normalize_equation(&ctx, &p).unwrap();
        assert_eq!(f, vec![qf(1, 2), q(1)]);
        // (x1 - 1)^3 + 3 (x1 - 1)^2 + 1 = x1^3 - 3 x1 + 3
        assert_eq!(pt.get(&[0, 1]), q(-3));
        assert_eq!(pt.get(&[0, 0]), q(3));
        let (again, f2) = normalize_equation(&ctx, &assemble(&pt, true)).unwrap();
        assert_eq!(again, pt);
        assert!(f2.iter().all(|x| x.is_one()));
    }

    #[test]
    fn normalize_handles_cross_terms_in_weight_order() {
        // x0^2 + x1^3 + a x0 x1 x2 + x2^6
        let ctx = SylvesterContext::new(1);
        let p = MultiPoly::parse("1 : 2 0 0\n1 : 0 3 0\n2 : 1 1 1\n1 : 0 0 6").unwrap();
        let (pt, _) = normalize_equation(&ctx, &p).unwrap();
        let (again, _) = normalize_equation(&ctx, &assemble(&pt, true)).unwrap();
        assert_eq!(again, pt);
    }

    #[test]
    fn normalize_errors() {
        let ctx = SylvesterContext::new(1);
        let missing = MultiPoly::parse("1 : 2 0 0\n1 : 0 0 6").unwrap();
        assert!(matches!(
            normalize_equation(&ctx, &missing),
            Err(Error::MissingPower { var: 1, .. })
        ));
        let irr = MultiPoly::parse("2 : 2 0 0\n3 : 0 3 0\n1 : 0 0 6").unwrap();
        assert!(matches!(normalize_equation(&ctx, &irr), Err(Error::NotNormalizable(_))));
    }

    #[test]
    fn json_roundtrip_and_short_keys() {
        let p = m1(qf(3, 5), qf(-2, 7));
        let v = p.to_json();
        assert_eq!(ModuliPoint::from_json(&v).unwrap(), p);
        let short = serde_json::json!({"n": 1, "coords": {"1": "3/5", "0": "-2/7"}});
        assert_eq!(ModuliPoint::from_json(&short).unwrap(), p);
        let zero = serde_json::json!({"n": 1, "coords": {}});
        assert!(ModuliPoint::from_json(&zero).is_err());
        let neg = serde_json::json!({"n": 2, "coords": {"1,5": "1/1"}});
        assert!(ModuliPoint::from_json(&neg).is_err());
    }
}
