//! Line-oriented text format for codes.
//!
//! Generator mode:
//!
//! ```text
//! code hamming84
//! n 8
//! k 4
//! 10001101
//! 01000111
//! 00101110
//! 00011011
//! ```
//!
//! Enumerator mode (ascending weights, `truncated` optional and last). The
//! `k` line is optional when the enumerator is complete, since then
//! Σ A_w = 2^k; it is required for truncated enumerators.
//!
//! ```text
//! code ldpc128
//! n 128
//! k 64
//! dmin 14
//! A 14 16
//! A 16 512
//! A 18 5344
//! truncated
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use std::path::Path;

use thiserror::Error;

use crate::code::{Code, CodeError, EnumeratorCode, GeneratorMatrix, LinearCode, WeightEnumerator};

#[derive(Debug, Error)]
pub enum CodeFileError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Code(#[from] CodeError),
}

fn err<T>(line: usize, reason: impl Into<String>) -> Result<T, CodeFileError> {
    Err(CodeFileError::Parse { line, reason: reason.into() })
}

struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)> + 'a> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty() && !l.starts_with('#')),
        );
        Self { inner: it.peekable(), last: 0 }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let item = self.inner.next();
        if let Some((n, _)) = item {
            self.last = n;
        }
        item
    }

    fn peek(&mut self) -> Option<(usize, &'a str)> {
        self.inner.peek().copied()
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str), CodeFileError> {
        match self.next() {
            Some(l) => Ok(l),
            None => err(self.last + 1, format!("unexpected end of file, expected {what}")),
        }
    }
}

fn keyword_value<'a>(line: usize, text: &'a str, key: &str) -> Result<&'a str, CodeFileError> {
    let mut parts = text.splitn(2, char::is_whitespace);
    let head = parts.next().unwrap_or_default();
    if head != key {
        return err(line, format!("expected `{key} ...`, found `{text}`"));
    }
    match parts.next().map(str::trim) {
        Some(v) if !v.is_empty() => Ok(v),
        _ => err(line, format!("`{key}` needs a value")),
    }
}

fn parse_int(line: usize, s: &str, what: &str) -> Result<usize, CodeFileError> {
    s.parse().or_else(|_| err(line, format!("{what} must be a nonnegative integer, got `{s}`")))
}

/// Parses a code from the text format described in the module docs.
pub fn parse_code(text: &str) -> Result<Code, CodeFileError> {
    let mut lines = Lines::new(text);

    let (ln, l) = lines.expect("`code <name>`")?;
    let name = keyword_value(ln, l, "code")?.to_string();
    let (ln, l) = lines.expect("`n <int>`")?;
    let n = parse_int(ln, keyword_value(ln, l, "n")?, "n")?;
    if n == 0 {
        return err(ln, "n must be positive");
    }

    let (ln, l) = lines.expect("`k <int>` or `dmin <int>`")?;
    let mut k = None;
    let dmin_line = if l.starts_with("k") {
        let kv = parse_int(ln, keyword_value(ln, l, "k")?, "k")?;
        if kv == 0 || kv > n {
            return err(ln, format!("k must be in 1..={n}"));
        }
        k = Some(kv);
        match lines.peek() {
            Some((_, next)) if next.starts_with("dmin") => lines.next(),
            _ => return parse_generator(&mut lines, name, n, kv),
        }
    } else {
        Some((ln, l))
    };
    let (ln, l) = dmin_line.expect("dmin line present");
    let d_min = parse_int(ln, keyword_value(ln, l, "dmin")?, "dmin")?;
    parse_enumerator(&mut lines, name, n, k, d_min, ln)
}

fn parse_generator(lines: &mut Lines<'_>, name: String, n: usize, k: usize) -> Result<Code, CodeFileError> {
    let mut rows = Vec::with_capacity(k);
    for r in 0..k {
        let (ln, l) = lines.expect(&format!("generator row {}", r + 1))?;
        if l.len() != n {
            return err(ln, format!("generator row has {} symbols, expected n={n}", l.chars().count()));
        }
        let row: Vec<u8> = l
            .bytes()
            .map(|b| match b {
                b'0' => Ok(0),
                b'1' => Ok(1),
                _ => Err(()),
            })
            .collect::<Result<_, _>>()
            .or_else(|_| err(ln, "generator rows may contain only 0 and 1"))?;
        rows.push(row);
    }
    if let Some((ln, l)) = lines.next() {
        return err(ln, format!("unexpected content after generator matrix: `{l}`"));
    }
    let g = GeneratorMatrix::from_rows(&rows)?;
    Ok(Code::Linear(LinearCode::new(name, g)?))
}

fn parse_enumerator(
    lines: &mut Lines<'_>,
    name: String,
    n: usize,
    k: Option<usize>,
    d_min: usize,
    dmin_line: usize,
) -> Result<Code, CodeFileError> {
    let mut terms: Vec<(usize, u128)> = Vec::new();
    let mut truncated = false;
    while let Some((ln, l)) = lines.next() {
        if truncated {
            return err(ln, format!("`truncated` must be the last line, found `{l}`"));
        }
        if l == "truncated" {
            truncated = true;
            continue;
        }
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != 3 || parts[0] != "A" {
            return err(ln, format!("expected `A <w> <count>` or `truncated`, found `{l}`"));
        }
        let w = parse_int(ln, parts[1], "weight")?;
        let a: u128 = parts[2]
            .parse()
            .or_else(|_| err(ln, format!("count must be a nonnegative integer, got `{}`", parts[2])))?;
        if let Some(&(prev, _)) = terms.last() {
            if w <= prev {
                return err(ln, format!("weights must be strictly ascending ({w} after {prev})"));
            }
        }
        terms.push((w, a));
    }
    let enumerator = WeightEnumerator::from_terms(n, d_min, &terms, truncated)
        .or_else(|e| err(dmin_line, e.to_string()))?;
    let k = match k {
        Some(k) => k,
        None if !truncated && enumerator.total().is_power_of_two() => enumerator.total().trailing_zeros() as usize,
        None => {
            return err(
                dmin_line,
                "code dimension unknown: add a `k <int>` line before `dmin` (required for truncated or incomplete enumerators)",
            )
        }
    };
    if k == 0 || k > n {
        return err(dmin_line, format!("k={k} must be in 1..={n}"));
    }
    Ok(Code::Enumerator(EnumeratorCode { name, k, enumerator }))
}

/// Reads and parses a code file.
pub fn load_code(path: impl AsRef<Path>) -> Result<Code, CodeFileError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| CodeFileError::Io { path: path.display().to_string(), source })?;
    parse_code(&text)
}
