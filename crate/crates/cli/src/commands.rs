//! Subcommand bodies. Each returns a JSON value; rendering happens in `main`.

use std::time::Instant;

use cytower::fibers::{family_from_point, fiber_type, place_basis, CurveFamily};
use cytower::hodge::{audit_all, h11_brute, h11_fast};
use cytower::moduli::{embed, ModuliPoint};
use cytower::newton::{lct_from_exit, toric_classify, NewtonSupport};
use cytower::rational::{format_q, parse_q};
use cytower::sylvester::weight_multiset;
use cytower::{Error, MultiPoly, Result, SylvesterContext, UniPoly};
use serde_json::{json, Value};

pub fn dim(n: usize, cap: u64) -> Result<Value> {
    let ctx = SylvesterContext::new(n);
    let positive = ctx.count_positive()?;
    let dim = ctx.dim()?;
    let weights: Option<Vec<String>> = if positive <= cap.into() {
        let tuples = ctx.enumerate_positive(cap)?;
        let mut w = weight_multiset(&tuples);
        w.sort();
        Some(w.iter().map(ToString::to_string).collect())
    } else {
        None
    };
    Ok(json!({
        "n": n,
        "dim": dim.to_string(),
        "positive_monomials": positive.to_string(),
        "weights": weights,
    }))
}

pub fn embed_point(input: &Value) -> Result<Value> {
    Ok(embed(&ModuliPoint::from_json(input)?)?.to_json())
}

/// Accepts either a curve family (coefficient lists) or a moduli point
/// (scalar coordinates), distinguished by the JSON shape.
pub fn classify(input: &Value) -> Result<Value> {
    let fam = if input.get("coeffs").is_some() {
        CurveFamily::from_json(input)?
    } else {
        family_from_point(&ModuliPoint::from_json(input)?)?
    };
    let mut places = place_basis(&fam)?;
    if !places.contains(&UniPoly::x()) {
        places.push(UniPoly::x());
    }
    let mut rows = Vec::new();
    for place in &places {
        let mut row = fiber_type(&fam, place)?.to_json();
        row["place"] = json!(place.to_string());
        rows.push(row);
    }
    Ok(json!({ "n": fam.n, "places": rows }))
}

pub fn lct(text: &str, base: Option<&str>, nondegenerate: bool) -> Result<Value> {
    let p = MultiPoly::parse(text)?;
    let support = match base {
        None => NewtonSupport::of(&p)?,
        Some(b) => {
            let point = b
                .split(',')
                .map(|c| parse_q(c.trim()))
                .collect::<Result<Vec<_>>>()?;
            if point.len() != p.nvars() {
                return Err(Error::Parse(format!(
                    "base point has {} coordinates, polynomial has {} variables",
                    point.len(),
                    p.nvars()
                )));
            }
            NewtonSupport::at(&p, &point)?
        }
    };
    let cls = toric_classify(&support, nondegenerate)?;
    let lct = lct_from_exit(&cls.exit);
    Ok(json!({
        "lct": format_q(&lct),
        "c": format_q(&cls.exit.c),
        "certificate": cls.exit.to_json(&support),
        "verified": cls.exit.verify(&support),
        "classification": cls.label(),
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum H11Method {
    Brute,
    Fast,
}

pub fn h11(n: usize, method: H11Method, cap: u128) -> Result<Value> {
    let ctx = SylvesterContext::new(n);
    let start = Instant::now();
    let mut out = match method {
        H11Method::Brute => {
            let r = h11_brute(&ctx, cap)?;
            if r.identity_failures > 0 {
                return Err(Error::Violation(format!("{} sectors fail the identities", r.identity_failures)));
            }
            json!({
                "n": n,
                "h11": r.h11.to_string(),
                "method": "brute",
                "nonzero_twisted": r.nonzero_twisted,
            })
        }
        H11Method::Fast => {
            let r = h11_fast(&ctx)?;
            json!({
                "n": n,
                "h11": r.h11.to_string(),
                "method": "fast",
                "via_count": r.via_count.to_string(),
                "via_lattice": r.via_lattice.to_string(),
            })
        }
    };
    if method == H11Method::Brute {
        let a = audit_all(&ctx)?;
        out["gates"] = json!({
            "few_zeros": a.few_zeros,
            "weight_parity": a.weight_parity,
            "residue": a.residue,
        });
    }
    out["elapsed_ms"] = json!(start.elapsed().as_millis() as u64);
    Ok(out)
}

/// Flat `key: value` rendering for `--format table`.
pub fn render_table(v: &Value) -> String {
    let mut out = String::new();
    render_into(&mut out, "", v);
    out
}

fn render_into(out: &mut String, prefix: &str, v: &Value) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                render_into(out, &key, x);
            }
        }
        Value::Array(xs) if xs.iter().any(|x| x.is_object()) => {
            for (i, x) in xs.iter().enumerate() {
                render_into(out, &format!("{prefix}[{i}]"), x);
            }
        }
        Value::Array(xs) => {
            let items: Vec<String> = xs.iter().map(scalar).collect();
            out.push_str(&format!("{prefix}: {}\n", items.join(" ")));
        }
        _ => out.push_str(&format!("{prefix}: {}\n", scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
