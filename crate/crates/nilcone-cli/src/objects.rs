//! Text formats for bijection inputs and JSON rendering of the mapped
//! objects.
//!
//! All files are line oriented: blank lines and `#` comments are skipped,
//! entries are decimal integers separated by whitespace. Matrix-bearing
//! files open with the header `q m n`; matrix entries are field-element
//! indices, row-major, one row per line, under a `f`/`g` label line.
//! Map-pair files open with `m n`, tree files with `m n` followed by an
//! `edges` section of `x y` lines (x in [0,m), y in [0,n)) and a `marked`
//! section naming one edge.

use nilcone::field::{Fel, Field};
use nilcone::linalg::{LinearPair, MatrixFq};
use nilcone::setmaps::{MarkedSpanningTree, SetPair};
use nilcone::TaggedVector;
use serde_json::{json, Value};

pub struct Lines<'a> {
    lines: std::str::Lines<'a>,
    lineno: usize,
}

impl<'a> Lines<'a> {
    pub fn new(text: &'a str) -> Lines<'a> {
        Lines {
            lines: text.lines(),
            lineno: 0,
        }
    }

    /// Next significant line, trimmed.
    fn next(&mut self) -> Option<&'a str> {
        loop {
            let raw = self.lines.next()?;
            self.lineno += 1;
            let line = raw.trim();
            if !line.is_empty() && !line.starts_with('#') {
                return Some(line);
            }
        }
    }

    fn need(&mut self, what: &str) -> Result<&'a str, String> {
        self.next()
            .ok_or_else(|| format!("unexpected end of file, expected {what}"))
    }

    fn err(&self, msg: impl std::fmt::Display) -> String {
        format!("line {}: {msg}", self.lineno)
    }

    pub fn finish(&mut self) -> Result<(), String> {
        match self.next() {
            Some(extra) => Err(self.err(format!("trailing content {extra:?}"))),
            None => Ok(()),
        }
    }

    fn numbers(&mut self, count: usize, what: &str) -> Result<Vec<u64>, String> {
        let line = self.need(what)?;
        let parsed: Result<Vec<u64>, _> = line.split_whitespace().map(str::parse).collect();
        let nums = parsed.map_err(|_| self.err(format!("{what}: bad integer in {line:?}")))?;
        if nums.len() != count {
            return Err(self.err(format!(
                "{what}: expected {count} entries, got {}",
                nums.len()
            )));
        }
        Ok(nums)
    }

    fn label(&mut self, label: &str) -> Result<(), String> {
        let line = self.need(&format!("label {label:?}"))?;
        if line != label {
            return Err(self.err(format!("expected label {label:?}, got {line:?}")));
        }
        Ok(())
    }

    /// Header `q m n`; the field is built from q (and the optional modulus
    /// override).
    pub fn field_header(&mut self, modulus: Option<&[u64]>) -> Result<(Field, usize, usize), String> {
        let nums = self.numbers(3, "header \"q m n\"")?;
        let (q, m, n) = (nums[0], nums[1] as usize, nums[2] as usize);
        if m == 0 || n == 0 || m > 16 || n > 16 {
            return Err(self.err(format!("dimensions {m}x{n} outside [1, 16]")));
        }
        let field = match modulus {
            Some(coeffs) => Field::gf_with_modulus(q, coeffs),
            None => Field::gf(q),
        }
        .map_err(|e| self.err(e))?;
        Ok((field, m, n))
    }

    pub fn matrix(
        &mut self,
        field: &Field,
        rows: usize,
        cols: usize,
        name: &str,
    ) -> Result<MatrixFq, String> {
        self.label(name)?;
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            entries.extend(self.numbers(cols, &format!("row {r} of {name}"))?);
        }
        MatrixFq::from_indices(field, rows, cols, &entries).map_err(|e| self.err(e))
    }

    pub fn vector(&mut self, field: &Field, len: usize, name: &str) -> Result<Vec<Fel>, String> {
        self.label(name)?;
        self.numbers(len, name)?
            .into_iter()
            .map(|e| field.fel(e).map_err(|e| self.err(e)))
            .collect()
    }

    /// `tag V` or `tag W`, then one line of m (resp. n) entries.
    pub fn tagged(&mut self, field: &Field, m: usize, n: usize) -> Result<TaggedVector, String> {
        let line = self.need("tag line")?;
        let len = match line {
            "tag V" => m,
            "tag W" => n,
            other => return Err(self.err(format!("expected \"tag V\" or \"tag W\", got {other:?}"))),
        };
        let entries: Result<Vec<Fel>, String> = self
            .numbers(len, "tagged vector")?
            .into_iter()
            .map(|e| field.fel(e).map_err(|e| self.err(e)))
            .collect();
        Ok(match line {
            "tag V" => TaggedVector::V(entries?),
            _ => TaggedVector::W(entries?),
        })
    }
}

/// `m n`, then `f` with one line of m values in [0, n), then `g` with one
/// line of n values in [0, m).
pub fn parse_setpair(text: &str) -> Result<SetPair, String> {
    let mut cur = Lines::new(text);
    let nums = cur.numbers(2, "header \"m n\"")?;
    let (m, n) = (nums[0] as usize, nums[1] as usize);
    if m == 0 || n == 0 || m > 64 || n > 64 {
        return Err(format!("set sizes {m},{n} outside [1, 64]"));
    }
    cur.label("f")?;
    let f: Vec<usize> = cur.numbers(m, "f")?.into_iter().map(|v| v as usize).collect();
    cur.label("g")?;
    let g: Vec<usize> = cur.numbers(n, "g")?.into_iter().map(|v| v as usize).collect();
    cur.finish()?;
    SetPair::new(f, g).map_err(|e| e.to_string())
}

pub fn parse_tree(text: &str) -> Result<MarkedSpanningTree, String> {
    let mut cur = Lines::new(text);
    let nums = cur.numbers(2, "header \"m n\"")?;
    let (m, n) = (nums[0] as usize, nums[1] as usize);
    if m == 0 || n == 0 || m > 64 || n > 64 {
        return Err(format!("side sizes {m},{n} outside [1, 64]"));
    }
    cur.label("edges")?;
    let mut edges = Vec::with_capacity(m + n - 1);
    for i in 0..m + n - 1 {
        let e = cur.numbers(2, &format!("edge {i}"))?;
        edges.push((e[0] as usize, e[1] as usize));
    }
    cur.label("marked")?;
    let me = cur.numbers(2, "marked edge")?;
    cur.finish()?;
    MarkedSpanningTree::new(m, n, edges, (me[0] as usize, me[1] as usize))
        .map_err(|e| e.to_string())
}

pub fn matrix_value(mat: &MatrixFq) -> Value {
    let rows: Vec<Vec<u64>> = (0..mat.rows())
        .map(|i| mat.row(i).iter().map(|e| e.index() as u64).collect())
        .collect();
    json!(rows)
}

pub fn vector_value(v: &[Fel]) -> Value {
    json!(v.iter().map(|e| e.index() as u64).collect::<Vec<u64>>())
}

pub fn pair_value(pair: &LinearPair) -> Value {
    json!({
        "q": pair.field().q(),
        "m": pair.m(),
        "n": pair.n(),
        "f": matrix_value(pair.f()),
        "g": matrix_value(pair.g()),
    })
}

pub fn tagged_value(t: &TaggedVector) -> Value {
    match t {
        TaggedVector::V(v) => json!({ "side": "V", "vector": vector_value(v) }),
        TaggedVector::W(w) => json!({ "side": "W", "vector": vector_value(w) }),
    }
}

pub fn setpair_value(p: &SetPair) -> Value {
    json!({ "m": p.m(), "n": p.n(), "f": p.f(), "g": p.g() })
}

pub fn tree_value(t: &MarkedSpanningTree) -> Value {
    let edges: Vec<[usize; 2]> = t.edges().iter().map(|&(x, y)| [x, y]).collect();
    let (mx, my) = t.marked_edge();
    json!({
        "m": t.m(),
        "n": t.n(),
        "edges": edges,
        "marked": [mx, my],
    })
}
