//! Browser bindings for the demo page: recognize a graph, generate one,
//! and solve a disjoint-paths instance. Every entry point returns a JSON
//! string so the page needs no generated type definitions.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;
use wpc_core::generators::{gen_chordal_extension, gen_dp_instance, gen_gnp, gen_split, gen_wpc, GenParams, PRNG_NAME};
use wpc_core::graph::{parse_graph, sniff_format, write_edge_list};
use wpc_core::obstructions::write_certificate;
use wpc_core::partition::write_forest;
use wpc_core::paths::{parse_instance, solve as solve_instance, write_answer, write_instance, Answer, PathsError, Solution, Variant};
use wpc_core::recognizer::{recognize as recognize_graph, Certificate};

fn error(msg: impl std::fmt::Display) -> String {
    json!({ "ok": false, "error": msg.to_string() }).to_string()
}

/// Recognizes a graph given as an edge list or graph6 text.
#[wasm_bindgen]
pub fn recognize(graph_text: &str) -> String {
    let g = match parse_graph(graph_text.as_bytes(), sniff_format(graph_text.as_bytes())) {
        Ok(g) => g,
        Err(e) => return error(e),
    };
    let doc = match recognize_graph(&g) {
        Certificate::Accepted(f) => json!({
            "ok": true,
            "member": true,
            "forest": f.to_doc(),
            "text": write_forest(&f),
        }),
        Certificate::Rejected(c) => json!({
            "ok": true,
            "member": false,
            "obstruction": c.kind.to_string(),
            "vertices": c.vertices,
            "text": write_certificate(&c),
        }),
    };
    doc.to_string()
}

/// Generates `kind` (`wpc`, `split`, `chordal`, `gnp` or `instance`) with
/// roughly `size` vertices. Instances use `variant` and `k` pairs.
#[wasm_bindgen]
pub fn generate(kind: &str, seed: u32, size: u32, variant: &str, k: u32) -> String {
    let seed = u64::from(seed);
    let size = size.max(1) as usize;
    let Some(variant) = Variant::from_name(variant) else {
        return error(format!("unknown variant `{variant}`"));
    };
    let params = GenParams {
        seed,
        bag_count: (size / 2).max(1),
        k: k as usize,
        variant,
        domain_density: 0.8,
        ..GenParams::default()
    };
    let text = match kind {
        "wpc" => gen_wpc(&params).map(|(g, _)| write_edge_list(&g)),
        "split" => gen_split(seed, (size / 3).max(1), size - size / 3, 0.4).map(|(g, _)| write_edge_list(&g)),
        "chordal" => Ok(write_edge_list(&gen_chordal_extension(seed, size, 0.5))),
        "gnp" => Ok(write_edge_list(&gen_gnp(seed, size, 0.3))),
        "instance" => gen_wpc(&params).and_then(|(g, f)| gen_dp_instance(&g, &f, &params)).map(|i| write_instance(&i)),
        other => return error(format!("unknown kind `{other}`")),
    };
    match text {
        Ok(text) => json!({ "ok": true, "prng": PRNG_NAME, "seed": seed, "text": text }).to_string(),
        Err(e) => error(e),
    }
}

fn answer_value(answer: &Answer) -> Value {
    match answer {
        Answer::No => json!(null),
        Answer::Yes(Solution::Paths(p)) => json!(p),
        Answer::Yes(Solution::Sets(s)) => json!(s),
    }
}

/// Solves an instance in the text format; `variant` may be empty to keep
/// the instance's own.
#[wasm_bindgen]
pub fn solve(instance_text: &str, variant: &str) -> String {
    let fallback = if variant.is_empty() {
        None
    } else {
        match Variant::from_name(variant) {
            Some(v) => Some(v),
            None => return error(format!("unknown variant `{variant}`")),
        }
    };
    let inst = match parse_instance(instance_text, fallback) {
        Ok(i) => i,
        Err(e) => return error(e),
    };
    match solve_instance(&inst) {
        Ok(answer) => json!({
            "ok": true,
            "yes": answer.is_yes(),
            "solution": answer_value(&answer),
            "text": write_answer(&answer),
        })
        .to_string(),
        Err(PathsError::NotWpc(c)) => json!({
            "ok": true,
            "yes": false,
            "obstruction": c.kind.to_string(),
            "vertices": c.vertices,
            "text": write_certificate(&c),
        })
        .to_string(),
        Err(e) => error(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn recognize_reports_both_outcomes() {
        let p4 = parse(&recognize("p graph 4 3\ne 0 1\ne 1 2\ne 2 3\n"));
        assert_eq!(p4["member"], true);
        let c4 = parse(&recognize("p graph 4 4\ne 0 1\ne 1 2\ne 2 3\ne 0 3\n"));
        assert_eq!(c4["member"], false);
        assert_eq!(c4["obstruction"], "HOLE 4");
        assert_eq!(parse(&recognize("p graph 2 1\ne 0 5\n"))["ok"], false);
    }

    #[test]
    fn generated_instances_solve() {
        for seed in 0..20 {
            let g = parse(&generate("instance", seed, 16, "srdp", 2));
            assert_eq!(g["ok"], true, "{g}");
            let s = parse(&solve(g["text"].as_str().unwrap(), ""));
            assert_eq!(s["ok"], true, "{s}");
        }
        for kind in ["wpc", "split", "chordal", "gnp"] {
            let g = parse(&generate(kind, 3, 12, "dp", 1));
            assert_eq!(parse(&recognize(g["text"].as_str().unwrap()))["ok"], true);
        }
        assert_eq!(parse(&generate("nope", 1, 5, "dp", 1))["ok"], false);
    }

    #[test]
    fn solve_accepts_a_variant_override() {
        let text = "p graph 3 2\ne 0 1\ne 1 2\nk 1\nq 0 0 2\n";
        assert_eq!(parse(&solve(text, "dp"))["yes"], true);
        assert_eq!(parse(&solve(text, ""))["ok"], false);
    }
}
