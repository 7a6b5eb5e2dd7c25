//! `key: value` text reports. Counterexamples are printed as one
//! `counterexample:` line per basis row.

use std::fmt::Write as _;

use crate::certify::{LowerBoundCertificate, RefutationTrace};
use crate::families::{
    Confidence, Counterexample, ExpansionReport, LargeExpansionReport, SpreadingProfile, Verdict,
};
use crate::subspace::Subspace;

pub fn confidence(c: Confidence) -> String {
    match c {
        Confidence::Exhaustive { checked } => format!("exhaustive ({checked} subspaces)"),
        Confidence::RefutationOnly { samples } => format!("sampled ({samples} subspaces, not conclusive)"),
    }
}

fn rows(out: &mut String, key: &str, u: &Subspace) {
    let b = u.basis();
    for r in 0..b.rows() {
        let row: Vec<String> = b.row(r).iter().map(u32::to_string).collect();
        let _ = writeln!(out, "{key}: {}", row.join(" "));
    }
}

pub fn counterexample(cx: &Counterexample) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "counterexample-dim: {}", cx.subspace.dim());
    let _ = writeln!(out, "achieved: {}", cx.achieved);
    rows(&mut out, "counterexample", &cx.subspace);
    out
}

pub fn verdict(v: &Verdict) -> String {
    match v {
        Verdict::Holds(c) => format!("verdict: holds\nconfidence: {}\n", confidence(*c)),
        Verdict::Refuted(cx) => format!("verdict: refuted\n{}", counterexample(cx)),
    }
}

pub fn expansion(r: &ExpansionReport) -> String {
    let mut out = format!("tau-star: {}\nconfidence: {}\n", r.tau_star, confidence(r.confidence));
    for (dim, min) in &r.per_dimension {
        let _ = writeln!(out, "min-image-dim[{dim}]: {min}");
    }
    let _ = writeln!(out, "witness-dim: {}", r.witness.subspace.dim());
    let _ = writeln!(out, "witness-achieved: {}", r.witness.achieved);
    rows(&mut out, "witness", &r.witness.subspace);
    out
}

pub fn large_expansion(r: &LargeExpansionReport) -> String {
    let mut out = format!("expander-hypothesis-checked: {}\n", r.expander_checked);
    for s in &r.per_dimension {
        let _ = writeln!(
            out,
            "dim[{}]: alpha={} required={} min-achieved={} min-delta={} sharper-bound={} sharper-holds={}",
            s.dim, s.alpha, s.required, s.min_achieved, s.min_delta, s.sharper_bound, s.sharper_holds
        );
    }
    out.push_str(&verdict(&r.verdict));
    out
}

pub fn profile(p: &SpreadingProfile, n: usize) -> String {
    let mut out = String::new();
    for &(s, t) in &p.entries {
        let _ = writeln!(out, "t-max[{s}]: {t}");
    }
    let _ = writeln!(out, "best-rank-bound: {}", p.best_rank_bound(n));
    let _ = writeln!(out, "confidence: {}", confidence(p.confidence));
    out
}

pub fn certificate(c: &LowerBoundCertificate) -> String {
    format!(
        "n: {}\ns: {}\nt: {}\nbound: {}\nconclusive: {}\nconfidence: {}\n",
        c.family.n(),
        c.params.s,
        c.params.t,
        c.bound,
        c.is_conclusive(),
        confidence(c.confidence)
    )
}

pub fn trace(t: &RefutationTrace) -> String {
    let s: Vec<String> = t.s_indices.iter().map(|i| (i + 1).to_string()).collect();
    let mut out = format!(
        "terms: {}\nS: {}\nSbar-size: {}\nK_S-dim: {}\nI_Sbar-dim: {}\nachieved: {}\n",
        t.terms,
        if s.is_empty() { "-".to_string() } else { s.join(" ") },
        t.complement_size(),
        t.k_s.dim(),
        t.i_sbar.dim(),
        t.achieved
    );
    rows(&mut out, "counterexample", &t.violating);
    out
}
