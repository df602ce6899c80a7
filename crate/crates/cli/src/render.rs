//! Text and JSON renderings of the computation results. Integers of
//! arbitrary size are written as JSON strings.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use pnrp2_core::klgroup::KlElement;
use pnrp2_core::obstruction::{BranchReport, Certificate, Feasibility, ObstructionReport};
use pnrp2_core::presentation::Presentation;
use pnrp2_core::rewrite::ProofOutcome;
use pnrp2_core::words::Word;

fn word(w: &Word) -> String {
    if w.is_identity() {
        "1".to_string()
    } else {
        w.to_string()
    }
}

pub fn presentation(p: &Presentation) -> Value {
    json!({
        "n": p.n(),
        "generators": p.generators().iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        "relators": p.relators().iter().map(|(w, f)| json!({ "family": f.tag(), "word": w.to_string() })).collect::<Vec<_>>(),
    })
}

pub fn kl(x: &KlElement) -> Value {
    json!({
        "n": x.n(),
        "normal_form": x.to_string(),
        "m0": x.m0.to_string(),
        "v": x.v.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    })
}

pub fn kl_text(x: &KlElement) -> String {
    let v: Vec<String> = x.v.iter().map(|c| c.to_string()).collect();
    format!("normal form: {x}\ncoordinates: m0={} v=({})\n", x.m0, v.join(", "))
}

pub fn proof_text(label: &str, outcome: &ProofOutcome) -> String {
    match outcome {
        ProofOutcome::Found(t) => {
            let mut out = format!("{label}: proved in {} steps from {}\n", t.len(), word(&t.start));
            out.push_str(&t.export());
            out
        }
        ProofOutcome::NotFound { depth } => format!("{label}: not found within depth {depth}\n"),
        ProofOutcome::ResourceExceeded { depth, frontier } => {
            format!("{label}: frontier of {frontier} words exceeded the limit at depth {depth}\n")
        }
    }
}

pub fn proof(label: &str, lhs: &Word, rhs: &Word, outcome: &ProofOutcome) -> Value {
    let mut v = json!({ "label": label, "lhs": word(lhs), "rhs": word(rhs) });
    let extra = match outcome {
        ProofOutcome::Found(t) => json!({
            "status": "found",
            "steps": t.steps.iter().map(|s| json!({ "rule": format!("R{}", s.rule), "pos": s.pos, "word": word(&s.word) })).collect::<Vec<_>>(),
        }),
        ProofOutcome::NotFound { depth } => json!({ "status": "not_found", "depth": depth }),
        ProofOutcome::ResourceExceeded { depth, frontier } => {
            json!({ "status": "resource_exceeded", "depth": depth, "frontier": frontier })
        }
    };
    merge(&mut v, extra);
    v
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

fn certificate(c: &Certificate) -> Value {
    json!({
        "modulus": c.modulus.to_string(),
        "verified": c.verify(),
        "entries": c.entries.iter().map(|e| json!({
            "index": e.index,
            "origin": e.equation.origin.to_string(),
            "equation": format!("{} = 0", e.equation.expr),
            "multiplier": e.multiplier.to_string(),
        })).collect::<Vec<_>>(),
    })
}

fn branch(b: &BranchReport) -> Value {
    let parity: Map<String, Value> =
        b.parity.iter().map(|(u, p)| (u.to_string(), json!(if p.is_odd() { 1 } else { 0 }))).collect();
    let mut v = json!({
        "parity": parity,
        "parity_bits": b.parity_bits(),
        "equations": b.equations,
        "cites_surface_parity": b.cites_surface_parity,
        "cites_beta232_clash": b.cites_beta232_clash,
    });
    let extra = match &b.outcome {
        Feasibility::Sat(w) => {
            let witness: Map<String, Value> = w.iter().map(|(u, x)| (u.to_string(), json!(x.to_string()))).collect();
            json!({ "outcome": "SAT", "witness": witness })
        }
        Feasibility::Unsat(c) => json!({ "outcome": "UNSAT", "certificate": certificate(c) }),
    };
    merge(&mut v, extra);
    v
}

pub fn obstruction_summary(r: &ObstructionReport, m: u32) -> Value {
    json!({
        "n": r.n,
        "m": m,
        "mode": r.mode.name(),
        "verdict": r.verdict.name(),
        "m0_equations": r.m0_equations,
        "parity_rank": r.parity_rank,
        "branches": r.branches.len(),
        "family_a_redundant": r.family_a_redundant,
        "note": r.note,
    })
}

pub fn obstruction(r: &ObstructionReport, m: u32) -> Value {
    let mut v = obstruction_summary(r, m);
    merge(
        &mut v,
        json!({
            "m0_refutation": r.m0_refutation.as_ref().map(certificate),
            "branches": r.branches.iter().map(branch).collect::<Vec<_>>(),
        }),
    );
    v
}

pub fn obstruction_text(r: &ObstructionReport) -> String {
    let mut out = r.to_string();
    for (k, b) in r.branches.iter().enumerate() {
        let _ = writeln!(out, "\nbranch {k}:");
        for (u, p) in b.parity.iter() {
            let _ = writeln!(out, "  parity {u} = {}", u8::from(p.is_odd()));
        }
        match &b.outcome {
            Feasibility::Sat(w) => {
                let _ = writeln!(out, "  witness:");
                for (u, x) in w {
                    let _ = writeln!(out, "    {u} = {x}");
                }
            }
            Feasibility::Unsat(c) => {
                for line in c.to_string().lines() {
                    let _ = writeln!(out, "  {line}");
                }
            }
        }
    }
    out
}
