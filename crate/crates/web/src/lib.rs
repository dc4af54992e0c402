//! Browser bindings. Every export takes and returns JSON strings (the same
//! encodings as the command-line tool), so the page needs no glue beyond
//! `JSON.parse`.

use serde_json::json;
use wasm_bindgen::prelude::*;

use twodim_core::serial;
use twodim_core::{canonicalize, is_isomorphic, materialize, FamilyLabel, Field};

fn field(spec: &str) -> Result<Field, String> {
    Field::parse(spec.trim()).map_err(|e| e.to_string())
}

/// `msc` is a 2×4 entry array; returns the classification JSON.
#[wasm_bindgen]
pub fn classify(field_spec: &str, msc: &str) -> Result<String, String> {
    let f = field(field_spec)?;
    let a = serial::parse_msc(msc, Some(&f)).map_err(|e| e.to_string())?;
    let r = canonicalize(&a).map_err(|e| e.to_string())?;
    let mut v =
        serde_json::to_value(serial::class_result_to_json(&r)).map_err(|e| e.to_string())?;
    v["display"] = json!(r.label.to_string());
    Ok(v.to_string())
}

#[wasm_bindgen]
pub fn isomorphic(field_spec: &str, msc: &str, msc2: &str) -> Result<String, String> {
    let f = field(field_spec)?;
    let a = serial::parse_msc(msc, Some(&f)).map_err(|e| e.to_string())?;
    let b = serial::parse_msc(msc2, Some(&f)).map_err(|e| e.to_string())?;
    let w = is_isomorphic(&a, &b).map_err(|e| e.to_string())?;
    Ok(json!({
        "isomorphic": w.is_some(),
        "field": w.as_ref().map(|g| g.field().to_string()),
        "witness": w.as_ref().map(serial::gl2_to_json),
    })
    .to_string())
}

/// `params` is a JSON array of elements.
#[wasm_bindgen]
pub fn materialize_family(field_spec: &str, family: u8, params: &str) -> Result<String, String> {
    let f = field(field_spec)?;
    let items: Vec<serial::ElementJson> = serde_json::from_str(if params.trim().is_empty() {
        "[]"
    } else {
        params
    })
    .map_err(|e| format!("params: {e}"))?;
    let ps = items
        .iter()
        .map(|x| serial::element_from_json(&f, x))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let label = FamilyLabel::new(&f, family, ps).map_err(|e| e.to_string())?;
    let a = materialize(&label).map_err(|e| e.to_string())?;
    serde_json::to_string(&serial::msc_to_json(&a)).map_err(|e| e.to_string())
}
