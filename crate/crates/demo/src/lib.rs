//! Browser bindings: each export takes plain strings or numbers and returns a
//! JSON string, `{"error": …}` on bad input.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;
use workbench_core::rational::{self, Rat};
use workbench_core::scenario::{self, RunOptions};
use workbench_core::setvalued::{sawtooth, vietoris_preimage};

fn render(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

/// Runs one command of a scenario given as JSON text.
#[wasm_bindgen]
pub fn run_scenario(text: &str, command: &str, seed: u32, budget: u32) -> String {
    let opts = RunOptions { seed: seed as u64, budget: budget as u64 };
    render(
        scenario::run_text(text, command, &opts)
            .map(|o| json!({ "report": o.report, "csv": o.csv }))
            .map_err(|e| e.to_string()),
    )
}

/// Parses `"a,b; c,d"` into open intervals.
fn parse_basics(text: &str) -> Result<Vec<(Rat, Rat)>, String> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (a, b) = pair.split_once(',').ok_or_else(|| format!("`{pair}` is not `lo,hi`"))?;
            let a = rational::parse(a.trim()).map_err(|e| e.to_string())?;
            let b = rational::parse(b.trim()).map_err(|e| e.to_string())?;
            Ok((a, b))
        })
        .collect()
}

/// Points of `[-1, 2]` whose section of the closed convex hull of the
/// indicator of `[0, 1]` lies inside the union of the given intervals and
/// meets each of them.
#[wasm_bindgen]
pub fn hull_preimage(basics: &str) -> String {
    render((|| {
        let basics = parse_basics(basics)?;
        let phi = scenario::indicator_hull();
        let (set, is_open) = vietoris_preimage(&phi, &basics).map_err(|e| e.to_string())?;
        Ok(json!({ "set": set.to_string(), "is_open": is_open, "spans": set }))
    })())
}

/// Sections of the sawtooth, its closure and the midpoint map, truncated after piece `n`.
#[wasm_bindgen]
pub fn sawtooth_sections(n: u32) -> String {
    let n = (n as usize).clamp(1, 200);
    let r = sawtooth::analyze(n);
    render(Ok(json!({
        "n_trunc": r.n_trunc,
        "sections_verified": r.sections_verified,
        "limit_section": r.limit_section.to_string(),
        "g_with_limit_usco": r.g_with_limit_usco,
        "witness": r.witness,
        "rows": r.rows.iter().map(|row| json!({
            "n": row.n,
            "a_n": rational::format(&row.a_n),
            "fbar_at_a": row.fbar_at_a.to_string(),
            "mid_n": rational::format(&row.mid_n),
            "fbar_at_mid": row.fbar_at_mid.to_string(),
            "g_at_mid": row.g_at_mid.to_string(),
        })).collect::<Vec<_>>(),
    })))
}
