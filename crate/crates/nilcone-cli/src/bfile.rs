//! OEIS b-file ingestion: optional `#` comment lines, then data lines of
//! "index value" separated by whitespace, indices strictly increasing,
//! values exact integers of any size.

use num_bigint::BigInt;

pub struct BFile {
    pub entries: Vec<(i64, BigInt)>,
}

pub fn parse_bfile(text: &str) -> Result<BFile, String> {
    let mut entries: Vec<(i64, BigInt)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(format!(
                "line {}: expected \"index value\", got {line:?}",
                lineno + 1
            ));
        };
        let index: i64 = a
            .parse()
            .map_err(|_| format!("line {}: bad index {a:?}", lineno + 1))?;
        let value: BigInt = b
            .parse()
            .map_err(|_| format!("line {}: bad value {b:?}", lineno + 1))?;
        if let Some(&(prev, _)) = entries.last() {
            if index <= prev {
                return Err(format!(
                    "line {}: index {index} does not increase past {prev}",
                    lineno + 1
                ));
            }
        }
        entries.push((index, value));
    }
    if entries.is_empty() {
        return Err("no data lines".into());
    }
    Ok(BFile { entries })
}
