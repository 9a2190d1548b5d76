//! Browser bindings: normal forms, equivalence and transition systems for
//! terms over a specification given as text.
//!
//! Every entry point returns JSON. The plain functions are usable natively;
//! the `#[wasm_bindgen]` wrappers turn errors into JavaScript exceptions.

use acpm::lts::{bisimilar, build_lts};
use acpm::normalizer::Normalizer;
use acpm::process::{ProcessTerm, SpecContext};
use acpm::speclang::{parse_spec, parse_term, SAMPLE_SPEC};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Upper bound on explored states, to keep the page responsive.
const MAX_STATES: usize = 2000;

fn context(spec: &str) -> Result<SpecContext, String> {
    parse_spec(spec).map_err(|e| format!("spec:{e}"))
}

fn term(src: &str, which: &str, ctx: &SpecContext) -> Result<ProcessTerm, String> {
    let t = parse_term(src, ctx).map_err(|e| format!("{which}:{e}"))?;
    ctx.inline_definitions(&t).map_err(|e| format!("{which}: {e}"))
}

pub fn normalize_term(spec: &str, src: &str) -> Result<String, String> {
    let ctx = context(spec)?;
    let t = term(src, "term", &ctx)?;
    let nf = Normalizer::new(&ctx).normalize(&t).map_err(|e| e.to_string())?;
    Ok(json!({ "term": t.to_string(), "normal_form": nf.to_string() }).to_string())
}

pub fn equiv_terms(spec: &str, left: &str, right: &str) -> Result<String, String> {
    let ctx = context(spec)?;
    let l = term(left, "left", &ctx)?;
    let r = term(right, "right", &ctx)?;
    let mut n = Normalizer::new(&ctx);
    let nl = n.normalize(&l).map_err(|e| e.to_string())?;
    let nr = n.normalize(&r).map_err(|e| e.to_string())?;
    let ll = build_lts(&l, &ctx).map_err(|e| e.to_string())?;
    let lr = build_lts(&r, &ctx).map_err(|e| e.to_string())?;
    Ok(json!({
        "equivalent": nl == nr,
        "bisimilar": bisimilar(&ll, &lr),
        "left": nl.to_string(),
        "right": nr.to_string(),
    })
    .to_string())
}

/// The transition system as `{initial, states, transitions}` plus its DOT text.
pub fn lts_of_term(spec: &str, src: &str) -> Result<String, String> {
    let ctx = context(spec)?;
    let t = term(src, "term", &ctx)?;
    let l = build_lts(&t, &ctx).map_err(|e| e.to_string())?;
    if l.num_states() > MAX_STATES {
        return Err(format!("{} states; the page draws at most {MAX_STATES}", l.num_states()));
    }
    let mut value = serde_json::to_value(&l).map_err(|e| e.to_string())?;
    value["dot"] = l.to_dot().into();
    Ok(value.to_string())
}

#[wasm_bindgen]
pub fn sample_spec() -> String {
    SAMPLE_SPEC.to_string()
}

#[wasm_bindgen]
pub fn normalize(spec: &str, term: &str) -> Result<String, JsValue> {
    normalize_term(spec, term).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn equiv(spec: &str, left: &str, right: &str) -> Result<String, JsValue> {
    equiv_terms(spec, left, right).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn lts(spec: &str, term: &str) -> Result<String, JsValue> {
    lts_of_term(spec, term).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn normalizes_against_the_sample() {
        let v = parse(&normalize_term(SAMPLE_SPEC, "a || b").unwrap());
        assert_eq!(v["normal_form"], "a . b + b . a + c");
    }

    #[test]
    fn equivalence() {
        let v = parse(&equiv_terms(SAMPLE_SPEC, "a + b", "b + a").unwrap());
        assert_eq!(v["equivalent"], true);
        assert_eq!(v["bisimilar"], true);
        let v = parse(&equiv_terms(SAMPLE_SPEC, "a . (b + c)", "a . b + a . c").unwrap());
        assert_eq!(v["equivalent"], false);
    }

    #[test]
    fn transition_system() {
        let v = parse(&lts_of_term(SAMPLE_SPEC, "System").unwrap());
        assert_eq!(v["states"].as_array().unwrap().len(), 3);
        assert!(v["dot"].as_str().unwrap().starts_with("digraph lts"));
    }

    #[test]
    fn errors_are_located() {
        assert_eq!(normalize_term(SAMPLE_SPEC, "a +").unwrap_err(), "term:1:4: expected a process term, found end of input");
        assert!(normalize_term("act a", "a").unwrap_err().starts_with("spec:1:"));
    }
}
