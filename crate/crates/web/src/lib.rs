//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns JSON text; errors come back as thrown `Error`s.

pub mod demo;

use serde::Serialize;
use wasm_bindgen::prelude::*;

fn json<T: Serialize>(r: Result<T, demo::DemoError>) -> Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

/// Wasserstein distance and alignment between two weight lists.
#[wasm_bindgen]
pub fn alignment(p: &str, q: &str) -> Result<String, JsError> {
    json(demo::alignment(p, q))
}

#[wasm_bindgen(js_name = parseAnswer)]
pub fn parse_answer(text: &str, question: &str, country: &str) -> Result<String, JsError> {
    json(demo::parse_answer(text, question, country))
}

#[wasm_bindgen(js_name = previewPrompt)]
pub fn preview_prompt(
    question: &str,
    language: &str,
    base: &str,
    country: &str,
    seed: u32,
    shuffle: bool,
) -> Result<String, JsError> {
    json(demo::preview_prompt(question, language, base, country, seed.into(), shuffle))
}

#[wasm_bindgen]
pub fn questions() -> Result<String, JsError> {
    json(Ok(demo::questions()))
}

#[wasm_bindgen]
pub fn countries() -> Result<String, JsError> {
    json(Ok(demo::countries()))
}
