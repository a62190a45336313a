//! Browser bindings for the demo page in `www/`. Each export takes primitive
//! arguments, returns one JSON document as a string, and surfaces bad input
//! as a thrown error. The `*_json` cores are plain Rust so the host test
//! suite covers them without a wasm toolchain.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use nilcone::boolmat::{bool_is_acyclic, bool_is_nilpotent_power, count_dags_recurrence, matrix_to_dag};
use nilcone::field::Field;
use nilcone::nilpairs::{
    balanced_probability, count_balanced_triples_of_length, count_nilpotent_pairs_closed,
    nilpotent_pair_probability,
};
use nilcone::setmaps::{
    count_ec_formula, count_spanning_trees_formula, ec_probability, pair_to_marked_tree,
    unique_two_cycle,
};
use nilcone::{BoolMatrix, ExactRational, SetPair};

/// The formulas are exact at any size; the bound only keeps the demo page
/// snappy and its numbers readable.
const MAX_DIM: u64 = 32;

fn ratio(r: &ExactRational) -> Value {
    json!({
        "num": r.numer().to_string(),
        "den": r.denom().to_string(),
        "approx": approx(r),
    })
}

fn approx(r: &ExactRational) -> f64 {
    let scale = 1u64 << 53;
    let scaled = (r.numer() * scale) / r.denom();
    let s: f64 = scaled.to_string().parse().unwrap_or(f64::NAN);
    s / scale as f64
}

fn check_dims(m: u64, n: u64) -> Result<(), String> {
    if m == 0 || n == 0 || m > MAX_DIM || n > MAX_DIM {
        return Err(format!("dimensions must lie in [1, {MAX_DIM}], got ({m}, {n})"));
    }
    Ok(())
}

fn counts_json(q: u64, m: u64, n: u64) -> Result<Value, String> {
    Field::gf(q).map_err(|e| e.to_string())?;
    check_dims(m, n)?;
    let e = |err: nilcone::CountError| err.to_string();
    let s = |err: nilcone::SetmapError| err.to_string();

    let mut spectrum = Vec::new();
    for ell in 0..=m.min(n) {
        spectrum.push(count_balanced_triples_of_length(m, n, q, ell).map_err(e)?.to_string());
    }
    let trees = count_spanning_trees_formula(m, n).map_err(s)?;
    Ok(json!({
        "q": q,
        "m": m,
        "n": n,
        "nilpotent_pairs": count_nilpotent_pairs_closed(m, n, q).map_err(e)?.to_string(),
        "nilpotent_probability": ratio(&nilpotent_pair_probability(m, n, q).map_err(e)?),
        "balanced_probability": ratio(&balanced_probability(m, n, q).map_err(e)?),
        "balanced_triples_by_length": spectrum,
        "ec_pairs": count_ec_formula(m, n).map_err(s)?.to_string(),
        "ec_probability": ratio(&ec_probability(m, n).map_err(s)?),
        "spanning_trees": trees.to_string(),
        "marked_spanning_trees": (trees * (m + n - 1)).to_string(),
    }))
}

fn parse_map(text: &str, len: usize, codomain: usize, name: &str) -> Result<Vec<usize>, String> {
    let entries: Vec<usize> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| format!("{name}: {t:?} is not an index")))
        .collect::<Result<_, _>>()?;
    if entries.len() != len {
        return Err(format!("{name} needs {len} entries, got {}", entries.len()));
    }
    if let Some(bad) = entries.iter().find(|&&v| v >= codomain) {
        return Err(format!("{name}: entry {bad} outside [0, {codomain})"));
    }
    Ok(entries)
}

fn pair_to_tree_json(m: u64, n: u64, f_text: &str, g_text: &str) -> Result<Value, String> {
    check_dims(m, n)?;
    let f = parse_map(f_text, m as usize, n as usize, "f")?;
    let g = parse_map(g_text, n as usize, m as usize, "g")?;
    let pair = SetPair::new(f, g).map_err(|e| e.to_string())?;
    let base = json!({
        "m": m,
        "n": n,
        "f": pair.f(),
        "g": pair.g(),
    });
    let mut out = base;
    match pair_to_marked_tree(&pair) {
        Ok(tree) => {
            let (x0, y0) = unique_two_cycle(&pair).expect("eventually constant pairs close a 2-cycle");
            out["eventually_constant"] = json!(true);
            out["two_cycle"] = json!([x0, y0]);
            out["tree"] = json!({
                "edges": tree.edges().iter().map(|&(x, y)| json!([x, y])).collect::<Vec<_>>(),
                "marked": [tree.marked_edge().0, tree.marked_edge().1],
            });
        }
        Err(_) => {
            out["eventually_constant"] = json!(false);
        }
    }
    Ok(out)
}

fn parse_bool_rows(rows_text: &str) -> Result<BoolMatrix, String> {
    let rows: Vec<&str> = rows_text
        .split(|c: char| c == ';' || c == '\n')
        .map(str::trim)
        .filter(|r| !r.is_empty())
        .collect();
    let n = rows.len();
    if n == 0 || n > 16 {
        return Err(format!("need between 1 and 16 rows, got {n}"));
    }
    let mut masks = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let bits: Vec<char> = row.chars().filter(|c| !c.is_whitespace() && *c != ',').collect();
        if bits.len() != n {
            return Err(format!("row {i} has {} entries, the matrix is {n}x{n}", bits.len()));
        }
        let mut mask = 0u64;
        for (j, c) in bits.iter().enumerate() {
            match c {
                '0' => {}
                '1' => mask |= 1 << j,
                other => return Err(format!("row {i}: {other:?} is not a bit")),
            }
        }
        masks.push(mask);
    }
    BoolMatrix::new(n, masks).map_err(|e| e.to_string())
}

fn bool_explorer_json(rows_text: &str) -> Result<Value, String> {
    let a = parse_bool_rows(rows_text)?;
    let n = a.n();
    let nilpotent = bool_is_nilpotent_power(&a);
    let acyclic = bool_is_acyclic(&a);
    let mut out = json!({
        "n": n,
        "nilpotent": nilpotent,
        "acyclic": acyclic,
        "dag_count_for_n": count_dags_recurrence(n as u64).to_string(),
    });
    if nilpotent {
        let edges = matrix_to_dag(&a).map_err(|e| e.to_string())?;
        out["dag_edges"] = json!(edges.iter().map(|&(i, j)| json!([i, j])).collect::<Vec<_>>());
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn counts(q: u32, m: u32, n: u32) -> Result<String, JsError> {
    counts_json(q as u64, m as u64, n as u64)
        .map(|v| v.to_string())
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn pair_to_tree(m: u32, n: u32, f_text: &str, g_text: &str) -> Result<String, JsError> {
    pair_to_tree_json(m as u64, n as u64, f_text, g_text)
        .map(|v| v.to_string())
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn bool_explorer(rows_text: &str) -> Result<String, JsError> {
    bool_explorer_json(rows_text)
        .map(|v| v.to_string())
        .map_err(|e| JsError::new(&e))
}
