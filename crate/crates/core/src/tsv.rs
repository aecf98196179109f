//! Shared reader/writer for the `key<TAB>frequency` model files.
//!
//! Line 1 is `#lang=<hin|mag>\ttotal=<N>`; every further non-blank line is
//! `<key>\t<frequency>` with frequency ≥ 1. Entries are written by
//! descending frequency, ties by key, so output is byte-stable.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{LidError, Result};
use crate::lang::Language;

pub(crate) struct Header {
    pub language: Language,
    pub total: u64,
}

pub(crate) fn write_table<W: Write>(
    mut out: W,
    language: Language,
    total: u64,
    entries: &BTreeMap<String, u64>,
) -> std::io::Result<()> {
    writeln!(out, "#lang={}\ttotal={}", language.tag(), total)?;
    let mut rows: Vec<(&String, &u64)> = entries.iter().collect();
    rows.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
    for (key, freq) in rows {
        writeln!(out, "{key}\t{freq}")?;
    }
    out.flush()
}

pub(crate) fn save_table(
    path: &Path,
    language: Language,
    total: u64,
    entries: &BTreeMap<String, u64>,
) -> Result<()> {
    let file = File::create(path).map_err(|e| LidError::io(path, e))?;
    write_table(BufWriter::new(file), language, total, entries).map_err(|e| LidError::io(path, e))
}

fn parse_header(line: &str, source: &str) -> Result<Header> {
    let bad = || LidError::parse(source, 1, format!("expected `#lang=<hin|mag>\\ttotal=<N>` header, got `{line}`"));
    let mut fields = line.split('\t');
    let lang = fields
        .next()
        .and_then(|f| f.strip_prefix("#lang="))
        .ok_or_else(bad)?;
    let total = fields
        .next()
        .and_then(|f| f.strip_prefix("total="))
        .ok_or_else(bad)?;
    if fields.next().is_some() {
        return Err(bad());
    }
    let language = lang
        .parse::<Language>()
        .map_err(|e| LidError::parse(source, 1, e.to_string()))?;
    let total = total
        .parse::<u64>()
        .map_err(|_| LidError::parse(source, 1, format!("non-numeric total `{total}`")))?;
    Ok(Header { language, total })
}

pub(crate) fn read_table<R: BufRead>(
    reader: R,
    source: &str,
    validate_key: impl Fn(&str) -> std::result::Result<(), String>,
) -> Result<(Header, BTreeMap<String, u64>)> {
    let mut lines = reader.lines();
    let first = match lines.next() {
        Some(line) => line.map_err(|e| LidError::parse(source, 1, e.to_string()))?,
        None => return Err(LidError::parse(source, 1, "missing header")),
    };
    let header = parse_header(first.trim_end_matches('\r'), source)?;

    let mut entries = BTreeMap::new();
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line.map_err(|e| LidError::parse(source, lineno, e.to_string()))?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let (key, freq) = line
            .split_once('\t')
            .ok_or_else(|| LidError::parse(source, lineno, "expected `<key>\\t<frequency>`"))?;
        let freq: u64 = freq
            .parse()
            .map_err(|_| LidError::parse(source, lineno, format!("non-numeric frequency `{freq}`")))?;
        if freq == 0 {
            return Err(LidError::parse(source, lineno, "frequency must be at least 1"));
        }
        validate_key(key).map_err(|msg| LidError::parse(source, lineno, msg))?;
        if entries.insert(key.to_string(), freq).is_some() {
            return Err(LidError::Integrity(format!(
                "{source}:{lineno}: duplicate key `{key}`"
            )));
        }
    }
    Ok((header, entries))
}

pub(crate) fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| LidError::io(path, e))
}
