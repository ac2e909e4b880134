//! Plain-text persistence for [`RecursionTable`].
//!
//! One entry per line, `"<d> <N_d>"`, with `d` running 1, 2, 3, ... without
//! gaps or blank lines. A loaded file is only trusted after `N_1 = 1` holds
//! and one randomly chosen entry is re-derived from the entries below it.

use std::fs;
use std::io;
use std::path::Path;

use rand::Rng;
use thiserror::Error;

use crate::invariants::{Count, RecursionTable};

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache io error: {0}")]
    Io(#[from] io::Error),
    #[error("corrupt cache at line {line}: {reason}")]
    Corrupt { line: usize, reason: String },
}

fn corrupt(line: usize, reason: impl Into<String>) -> CacheError {
    CacheError::Corrupt {
        line,
        reason: reason.into(),
    }
}

/// Parses cache contents, auditing one entry chosen by `rng`.
pub fn parse<R: Rng + ?Sized>(text: &str, rng: &mut R) -> Result<RecursionTable, CacheError> {
    let mut values = Vec::new();
    // `lines` tolerates one trailing newline; anything else blank is rejected.
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let (d, value) = line
            .split_once(' ')
            .ok_or_else(|| corrupt(lineno, format!("expected \"d value\", got {line:?}")))?;
        let d: usize = d
            .parse()
            .map_err(|_| corrupt(lineno, format!("bad degree {d:?}")))?;
        if d != lineno {
            return Err(corrupt(
                lineno,
                format!("expected degree {lineno}, found {d}"),
            ));
        }
        let value: Count = value
            .parse()
            .map_err(|_| corrupt(lineno, format!("bad value {value:?}")))?;
        values.push(value);
    }
    if values.is_empty() {
        return Err(corrupt(1, "empty cache (N_1 missing)"));
    }
    if values[0] != Count::one() {
        return Err(corrupt(1, format!("N_1 must be 1, found {}", values[0])));
    }
    let table = RecursionTable::from_values(values).map_err(|e| corrupt(1, e.to_string()))?;

    let max = table.max_degree();
    if max >= 2 {
        let d = rng.gen_range(2..=max);
        let derived = table
            .derive_entry(d)
            .map_err(|e| corrupt(d as usize, e.to_string()))?;
        if table.get(d) != Some(&derived) {
            return Err(corrupt(
                d as usize,
                format!("stored N_{d} does not match the recursion ({derived})"),
            ));
        }
    }
    Ok(table)
}

pub fn render(table: &RecursionTable) -> String {
    let mut out = String::new();
    for (i, v) in table.values().iter().enumerate() {
        out.push_str(&format!("{} {}\n", i + 1, v));
    }
    out
}

/// Loads a cache file, returning `None` if it does not exist.
pub fn load(path: &Path) -> Result<Option<RecursionTable>, CacheError> {
    match fs::read_to_string(path) {
        Ok(text) => parse(&text, &mut rand::thread_rng()).map(Some),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn save(path: &Path, table: &RecursionTable) -> Result<(), CacheError> {
    fs::write(path, render(table))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn table(d: u32) -> RecursionTable {
        let mut t = RecursionTable::new();
        t.fill_to(d).unwrap();
        t
    }

    fn line_of(err: CacheError) -> usize {
        match err {
            CacheError::Corrupt { line, .. } => line,
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn round_trip() {
        let t = table(20);
        let text = render(&t);
        assert!(text.starts_with("1 1\n2 1\n3 12\n4 620\n"));
        for seed in 0..10 {
            let back = parse(&text, &mut StdRng::seed_from_u64(seed)).unwrap();
            assert_eq!(back, t);
        }
    }

    #[test]
    fn rejects_gaps_and_blank_lines() {
        let mut rng = StdRng::seed_from_u64(1);
        assert_eq!(line_of(parse("1 1\n3 12\n", &mut rng).unwrap_err()), 2);
        assert_eq!(line_of(parse("1 1\n\n2 1\n", &mut rng).unwrap_err()), 2);
        assert_eq!(line_of(parse("", &mut rng).unwrap_err()), 1);
        assert_eq!(line_of(parse("1 2\n", &mut rng).unwrap_err()), 1);
        assert_eq!(line_of(parse("1 1\n2 x\n", &mut rng).unwrap_err()), 2);
        assert_eq!(line_of(parse("1  1\n", &mut rng).unwrap_err()), 1);
        assert_eq!(line_of(parse("1 -1\n", &mut rng).unwrap_err()), 1);
    }

    #[test]
    fn detects_tampered_entry() {
        // The audit picks d = 2 (honest) or d = 3 (tampered).
        let text = "1 1\n2 1\n3 13\n";
        let mut caught = 0;
        for seed in 0..20 {
            let mut rng = StdRng::seed_from_u64(seed);
            if let Err(e) = parse(text, &mut rng) {
                assert_eq!(line_of(e), 3);
                caught += 1;
            }
        }
        assert!(caught > 0);
        let mut rng = StdRng::seed_from_u64(0);
        assert!(parse("1 1\n2 2\n", &mut rng).is_err());
    }

    #[test]
    fn load_missing_and_save() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nd.txt");
        assert!(load(&path).unwrap().is_none());
        save(&path, &table(7)).unwrap();
        assert_eq!(load(&path).unwrap().unwrap(), table(7));
    }
}
