//! One-parameter families `f = sum_{k<n} x_k^{s_k} + sum_i t_i(x_n) x^i`
//! over the `x_n`-line: valuations at places, the normalized minimum `vbar`,
//! fiber thresholds, boundary detection and descent, limit fibers and the
//! fiber type.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::moduli::{assemble, embed, normalize_equation, ModuliPoint};
use crate::poly::{complete_power, MultiPoly};
use crate::rational::{format_q, parse_q, q, Q};
use crate::sylvester::SylvesterContext;
use crate::unipoly::UniPoly;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveFamily {
    pub n: usize,
    /// Keys `(i_0, ..., i_{n-1})`; the `(0, ..., 0)` entry carries `x_n^{s_n}`
    /// for families built from points. Zero polynomials are not stored.
    coeffs: BTreeMap<Vec<u32>, UniPoly>,
}

impl CurveFamily {
    pub fn new(n: usize, coeffs: impl IntoIterator<Item = (Vec<u32>, UniPoly)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Hypothesis("families need n >= 1".into()));
        }
        let lower = SylvesterContext::new(n - 1);
        let mut map = BTreeMap::new();
        for (i, t) in coeffs {
            if i.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: i.len(),
                });
            }
            if (0..n).any(|k| BigInt::from(i[k]) + 1u32 > lower.s[k]) {
                return Err(Error::InvalidPoint(format!("family key {i:?} outside the box")));
            }
            if t.is_zero() {
                continue;
            }
            if !lower.weight(&i)?.is_positive() {
                return Err(Error::InvalidPoint(format!(
                    "family key {i:?} has non-positive fiber weight"
                )));
            }
            map.insert(i, t);
        }
        Ok(CurveFamily { n, coeffs: map })
    }

    pub fn coeffs(&self) -> &BTreeMap<Vec<u32>, UniPoly> {
        &self.coeffs
    }

    pub fn coeff(&self, i: &[u32]) -> UniPoly {
        self.coeffs.get(i).cloned().unwrap_or_else(UniPoly::zero)
    }

    /// Context of the fibers, level `n - 1`.
    pub fn fiber_ctx(&self) -> SylvesterContext {
        SylvesterContext::new(self.n - 1)
    }

    /// `w^{(n-1)}(i) = d_{n-1} - sum i_k d_{n-1,k}`.
    pub fn fiber_weight(&self, i: &[u32]) -> BigInt {
        self.fiber_ctx().weight(i).expect("validated key")
    }

    /// Expands back to a polynomial in `x_0..x_n`, including `x_k^{s_k}` for `k < n`.
    pub fn reconstruct(&self) -> MultiPoly {
        let nv = self.n + 1;
        let lower = self.fiber_ctx();
        let mut p = MultiPoly::zero(nv);
        for k in 0..self.n {
            let mut e = vec![0; nv];
            e[k] = lower.s_u32(k);
            p.add_term(e, Q::one());
        }
        for (i, t) in &self.coeffs {
            for (deg, c) in t.coeffs().iter().enumerate() {
                let mut e = i.clone();
                e.push(deg as u32);
                p.add_term(e, c.clone());
            }
        }
        p
    }

    pub fn to_json(&self) -> Value {
        let mut coeffs = Map::new();
        for (i, t) in &self.coeffs {
            coeffs.insert(key_string(i), json!(t.to_strings()));
        }
        json!({ "n": self.n, "coeffs": coeffs })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let n = v
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("missing integer field \"n\"".into()))? as usize;
        let obj = v
            .get("coeffs")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Parse("missing object field \"coeffs\"".into()))?;
        let mut coeffs = Vec::new();
        for (key, val) in obj {
            let i = parse_key(key)?;
            let list = val
                .as_array()
                .ok_or_else(|| Error::Parse(format!("coefficient list for {key} is not an array")))?;
            let cs = list
                .iter()
                .map(|c| match c {
                    Value::String(s) => parse_q(s),
                    Value::Number(x) => parse_q(&x.to_string()),
                    _ => Err(Error::Parse(format!("bad coefficient {c}"))),
                })
                .collect::<Result<Vec<Q>>>()?;
            coeffs.push((i, UniPoly::new(cs)));
        }
        CurveFamily::new(n, coeffs)
    }
}

fn key_string(i: &[u32]) -> String {
    i.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_key(key: &str) -> Result<Vec<u32>> {
    if key.trim().is_empty() {
        return Ok(vec![]);
    }
    key.split(',')
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad key {key:?}")))
        })
        .collect()
}

/// Regroups the affine equation of `point` by powers of `x_n`.
pub fn family_from_point(point: &ModuliPoint) -> Result<CurveFamily> {
    let n = point.n;
    if n == 0 {
        return Err(Error::Hypothesis("families need n >= 1".into()));
    }
    let lower = SylvesterContext::new(n - 1);
    let affine = assemble(point, false);
    let mut grouped: BTreeMap<Vec<u32>, Vec<Q>> = BTreeMap::new();
    for (e, c) in affine.terms() {
        let is_fiber_fermat = (0..n).any(|k| {
            e[k] == lower.s_u32(k) && e.iter().enumerate().all(|(j, x)| j == k || *x == 0)
        });
        if is_fiber_fermat {
            continue;
        }
        let key = e[..n].to_vec();
        let deg = e[n] as usize;
        let entry = grouped.entry(key).or_default();
        if entry.len() <= deg {
            entry.resize(deg + 1, Q::zero());
        }
        entry[deg] = c.clone();
    }
    CurveFamily::new(n, grouped.into_iter().map(|(k, v)| (k, UniPoly::new(v))))
}

/// Coprime squarefree factors of the gcd of all coefficients, refined so each
/// coefficient has constant multiplicity along each factor. Sorted by degree,
/// then coefficients.
pub fn place_basis(fam: &CurveFamily) -> Result<Vec<UniPoly>> {
    if fam.coeffs.is_empty() {
        return Err(Error::ZeroFamily);
    }
    let mut coeffs: Vec<&UniPoly> = fam.coeffs.values().collect();
    coeffs.sort_by_key(|t| t.degree());
    let mut g = UniPoly::zero();
    for t in coeffs {
        g = g.gcd(t);
        if g.is_constant() {
            return Ok(vec![]);
        }
    }
    let mut basis = vec![g.squarefree_part()];
    for t in fam.coeffs.values() {
        basis = basis.iter().flat_map(|b| split_by_multiplicity(b, t)).collect();
    }
    basis.sort_by(|a, b| {
        a.degree()
            .cmp(&b.degree())
            .then_with(|| a.coeffs().cmp(b.coeffs()))
    });
    Ok(basis)
}

/// Splits squarefree `b` (every root of which divides `t`) into the parts
/// where `t` has multiplicity exactly 1, 2, ...
fn split_by_multiplicity(b: &UniPoly, t: &UniPoly) -> Vec<UniPoly> {
    let mut parts = Vec::new();
    let mut remaining = b.clone();
    let mut u = t.clone();
    while !remaining.is_constant() {
        let h = remaining.gcd(&u);
        let exact = remaining.exact_div(&h).expect("gcd divides").monic();
        if !exact.is_constant() {
            parts.push(exact);
        }
        if h.is_constant() {
            break;
        }
        u = u.exact_div(&h).expect("h divides u");
        remaining = h;
    }
    parts
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceValuation {
    pub place: UniPoly,
    pub vals: BTreeMap<Vec<u32>, u32>,
    /// `val / w^{(n-1)}`.
    pub normalized: BTreeMap<Vec<u32>, Q>,
    pub vbar: Q,
}

impl PlaceValuation {
    /// Smallest `m` with `m vbar` integral.
    pub fn ramification(&self) -> u32 {
        u32::try_from(self.vbar.denom().clone()).expect("small denominator")
    }

    /// `c` when the place is `x - c`.
    pub fn rational_point(&self) -> Option<Q> {
        rational_point(&self.place)
    }
}

pub fn rational_point(place: &UniPoly) -> Option<Q> {
    (place.degree() == Some(1)).then(|| -place.coeff(0) / place.coeff(1))
}

pub fn vbar_at(fam: &CurveFamily, place: &UniPoly) -> Result<PlaceValuation> {
    if fam.coeffs.is_empty() {
        return Err(Error::ZeroFamily);
    }
    if place.is_constant() {
        return Err(Error::Hypothesis("place must be a nonconstant polynomial".into()));
    }
    let place = place.monic();
    let mut vals = BTreeMap::new();
    let mut normalized = BTreeMap::new();
    for (i, t) in &fam.coeffs {
        let v = t.multiplicity(&place).expect("nonzero coefficient");
        let w = fam.fiber_weight(i);
        assert!(w.is_positive(), "fiber weight vanishes at {i:?}");
        normalized.insert(i.clone(), Q::new(BigInt::from(v), w));
        vals.insert(i.clone(), v);
    }
    let vbar = normalized.values().min().cloned().expect("nonempty");
    Ok(PlaceValuation {
        place,
        vals,
        normalized,
        vbar,
    })
}

/// `1 - vbar`, which is 1 away from the places of the gcd.
pub fn fiber_lct(fam: &CurveFamily, place: &UniPoly) -> Result<Q> {
    let pv = vbar_at(fam, place)?;
    lct_from_vbar(&pv.vbar)
}

fn lct_from_vbar(vbar: &Q) -> Result<Q> {
    if *vbar > Q::one() {
        return Err(Error::VbarAboveOne(format_q(vbar)));
    }
    Ok(Q::one() - vbar)
}

/// Preimage under `embed` of a boundary point, found by inverting the
/// substitution at the rational place where `vbar = 1`.
pub fn boundary_preimage(point: &ModuliPoint) -> Result<ModuliPoint> {
    if point.n == 0 {
        return Err(Error::Interior);
    }
    let fam = family_from_point(point)?;
    let mut irrational = None;
    for place in place_basis(&fam)? {
        let pv = vbar_at(&fam, &place)?;
        if !pv.vbar.is_one() {
            continue;
        }
        let Some(c) = pv.rational_point() else {
            irrational = Some(place.to_string());
            continue;
        };
        let pre = invert_at(&fam, &c)?;
        if !embed(&pre)?.projectively_equal(point) {
            return Err(Error::Violation(format!(
                "boundary preimage does not embed back at x_{} = {c}",
                point.n
            )));
        }
        return Ok(pre);
    }
    match irrational {
        Some(p) => Err(Error::IrrationalPlace(p)),
        None => Err(Error::Interior),
    }
}

fn invert_at(fam: &CurveFamily, c: &Q) -> Result<ModuliPoint> {
    let lower = fam.fiber_ctx();
    let sn = SylvesterContext::new(fam.n).s_u32(fam.n) as usize;
    let zero_key = vec![0u32; fam.n];
    let mut coords = Vec::new();
    for (i, t) in &fam.coeffs {
        let mut ell = t.taylor_at(c);
        let w = usize::try_from(lower.weight(i)?).expect("small weight");
        if *i == zero_key {
            if ell.get(sn).is_none_or(|x| !x.is_one()) {
                return Err(Error::Violation("constant coefficient lacks ell^{s_n}".into()));
            }
            ell[sn] = Q::zero();
        }
        for (k, a) in ell.iter().enumerate() {
            if k != w && !a.is_zero() {
                return Err(Error::Violation(format!(
                    "coefficient {i:?} is not a multiple of ell^{w} alone"
                )));
            }
        }
        coords.push((i.clone(), ell.get(w).cloned().unwrap_or_else(Q::zero)));
    }
    ModuliPoint::new(fam.n - 1, coords)
}

/// Number of successive boundary descents before reaching an interior point.
pub fn level(point: &ModuliPoint) -> Result<u32> {
    let mut cur = point.clone();
    let mut count = 0;
    loop {
        match boundary_preimage(&cur) {
            Ok(pre) => {
                cur = pre;
                count += 1;
            }
            Err(Error::Interior) => return Ok(count),
            Err(e) => return Err(e),
        }
    }
}

/// The fiber of the base-changed family over `u = 0` after factoring out
/// `ell^{vbar}`: coordinate `i` is the coefficient of `ell^{vbar w_i}` in
/// `t_i` when that is the exact valuation, else 0.
pub fn limit_fiber(fam: &CurveFamily, c: &Q) -> Result<ModuliPoint> {
    let pv = vbar_at(fam, &UniPoly::linear(c))?;
    if pv.vbar.is_zero() {
        return Err(Error::VbarZero);
    }
    if pv.vbar > Q::one() {
        return Err(Error::VbarAboveOne(format_q(&pv.vbar)));
    }
    let mut coords = Vec::new();
    for (i, t) in &fam.coeffs {
        let target = &pv.vbar * Q::from_integer(fam.fiber_weight(i));
        if target == q(pv.vals[i] as i64) {
            let ell = t.taylor_at(c);
            coords.push((i.clone(), ell[pv.vals[i] as usize].clone()));
        }
    }
    lower_point(fam, coords)
}

/// The fiber over `x_n = c` read as a point of the lower moduli space.
pub fn fiber_at(fam: &CurveFamily, c: &Q) -> Result<ModuliPoint> {
    lower_point(fam, fam.coeffs.iter().map(|(i, t)| (i.clone(), t.eval(c))).collect())
}

/// Fiber coordinates as a point of `M_{n-1}`. Terms `x_k^{s_k - 1}` are
/// removed first by completing the power.
fn lower_point(fam: &CurveFamily, coords: Vec<(Vec<u32>, Q)>) -> Result<ModuliPoint> {
    let lower = fam.fiber_ctx();
    let in_box = |i: &[u32]| (0..fam.n).all(|k| i[k] + 1 < lower.s_u32(k));
    if coords.iter().all(|(i, v)| v.is_zero() || in_box(i)) {
        return ModuliPoint::new(fam.n - 1, coords);
    }
    let mut p = MultiPoly::zero(fam.n);
    for k in 0..fam.n {
        let mut e = vec![0; fam.n];
        e[k] = lower.s_u32(k);
        p.add_term(e, Q::one());
    }
    for (i, v) in coords {
        p.add_term(i, v);
    }
    Ok(normalize_equation(&lower, &p)?.0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberType {
    pub vbar: Q,
    /// `None` at irrational places, where the relevant fiber has algebraic coordinates.
    pub level: Option<u32>,
    pub disc_val: Option<u32>,
    /// Why `disc_val` is absent, when it is.
    pub disc_note: Option<&'static str>,
    pub lct: Q,
}

impl FiberType {
    pub fn to_json(&self) -> Value {
        json!({
            "vbar": format_q(&self.vbar),
            "level": self.level,
            "disc_val": self.disc_val,
            "disc_note": self.disc_note,
            "lct": format_q(&self.lct),
        })
    }
}

pub fn fiber_type(fam: &CurveFamily, place: &UniPoly) -> Result<FiberType> {
    let pv = vbar_at(fam, place)?;
    let lct = lct_from_vbar(&pv.vbar)?;
    let level = match pv.rational_point() {
        None => None,
        Some(c) => {
            let fiber = if pv.vbar.is_zero() {
                fiber_at(fam, &c)?
            } else {
                limit_fiber(fam, &c)?
            };
            Some(level(&fiber)?)
        }
    };
    let (disc_val, disc_note) = if fam.n != 2 {
        (None, Some("no discriminant formula at this dimension"))
    } else {
        match weierstrass_discriminant(fam)? {
            None => (None, Some("family is not in Weierstrass form")),
            Some(d) if d.is_zero() => (None, Some("discriminant vanishes identically")),
            Some(d) => (d.multiplicity(&pv.place), None),
        }
    };
    Ok(FiberType {
        vbar: pv.vbar,
        level,
        disc_val,
        disc_note,
        lct,
    })
}

/// `4 t_1^3 + 27 t_0^2` for `x_0^2 + x_1^3 + t_1(x_2) x_1 + t_0(x_2)`, after
/// completing the square in `x_0` and the cube in `x_1`. `None` when other
/// monomials survive.
pub fn weierstrass_discriminant(fam: &CurveFamily) -> Result<Option<UniPoly>> {
    if fam.n != 2 {
        return Err(Error::Hypothesis("Weierstrass discriminant needs n = 2".into()));
    }
    let mut p = fam.reconstruct();
    p = complete_power(&p, 0, 2)?.0;
    p = match complete_power(&p, 1, 3) {
        Ok((r, _)) => r,
        Err(Error::NotNormalizable(_)) | Err(Error::NotMonic { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut t1 = vec![];
    let mut t0 = vec![];
    for (e, c) in p.terms() {
        let slot = match (e[0], e[1]) {
            (2, 0) | (0, 3) if e[2] == 0 => continue,
            (0, 1) => &mut t1,
            (0, 0) => &mut t0,
            _ => return Ok(None),
        };
        let deg = e[2] as usize;
        if slot.len() <= deg {
            slot.resize(deg + 1, Q::zero());
        }
        slot[deg] = c.clone();
    }
    let t1 = UniPoly::new(t1);
    let t0 = UniPoly::new(t0);
    Ok(Some(
        &t1.pow(3).scale(&q(4)) + &t0.pow(2).scale(&q(27)),
    ))
}
