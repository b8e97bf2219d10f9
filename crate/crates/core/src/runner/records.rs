//! Per-round records and their CSV / JSON-lines persistence.
//!
//! Column order is fixed by [`CHSH_HEADER`] and [`EPD_HEADER`]. Floats are
//! written with 9 significant digits.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde_json::{Map, Value};

use super::config::OutputFormat;
use crate::epd::game::EpdAction;
use crate::error::{Error, Result};

pub const CHSH_HEADER: [&str; 20] = [
    "sim", "round", "winp", "expA", "expB", "entA", "entB", "xa1", "xa2", "xa3", "yb1", "yb2", "yb3", "w1", "w2",
    "w3", "aA0", "aA1", "aB0", "aB1",
];

pub const EPD_HEADER: [&str; 14] = [
    "sim", "round", "actA", "actB", "o1", "o2", "payA", "payB", "cumA", "cumB", "entA", "entB", "predA", "predB",
];

/// One CHSH round. `sim` is 0-based, `round` 1-based. Beliefs are those
/// held when the round's actions were chosen; `winp` is the referee's joint
/// winning probability for the strategies actually played.
#[derive(Debug, Clone, PartialEq)]
pub struct ChshRecord {
    pub sim: usize,
    pub round: usize,
    pub winp: f64,
    pub exp_a: f64,
    pub exp_b: f64,
    pub ent_a: f64,
    pub ent_b: f64,
    pub x: [u8; 3],
    pub y: [u8; 3],
    pub won: [u8; 3],
    /// Grid action indices for bit 0 and bit 1.
    pub actions_a: [usize; 2],
    pub actions_b: [usize; 2],
}

/// One prisoners' dilemma round; outcome bits are (A, B), 1 = defect.
#[derive(Debug, Clone, PartialEq)]
pub struct EpdRecord {
    pub sim: usize,
    pub round: usize,
    pub act_a: EpdAction,
    pub act_b: EpdAction,
    pub out_a: u8,
    pub out_b: u8,
    pub pay_a: f64,
    pub pay_b: f64,
    pub cum_a: f64,
    pub cum_b: f64,
    pub ent_a: f64,
    pub ent_b: f64,
    /// Each player's probability that the other plays D.
    pub pred_a: f64,
    pub pred_b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Records {
    Chsh(Vec<ChshRecord>),
    Epd(Vec<EpdRecord>),
}

impl Records {
    pub fn len(&self) -> usize {
        match self {
            Records::Chsh(r) => r.len(),
            Records::Epd(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn header(&self) -> &'static [&'static str] {
        match self {
            Records::Chsh(_) => &CHSH_HEADER,
            Records::Epd(_) => &EPD_HEADER,
        }
    }
}

enum Cell {
    Int(u64),
    Float(f64),
    Text(&'static str),
}

/// Rounds to 9 significant digits.
pub fn round9(v: f64) -> f64 {
    format!("{v:.8e}").parse().expect("formatted float parses")
}

impl Cell {
    fn to_text(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(f) => round9(*f).to_string(),
            Cell::Text(t) => t.to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Float(f) => Value::from(round9(*f)),
            Cell::Text(t) => Value::from(*t),
        }
    }
}

fn chsh_cells(r: &ChshRecord) -> Vec<Cell> {
    let mut c = vec![
        Cell::Int(r.sim as u64),
        Cell::Int(r.round as u64),
        Cell::Float(r.winp),
        Cell::Float(r.exp_a),
        Cell::Float(r.exp_b),
        Cell::Float(r.ent_a),
        Cell::Float(r.ent_b),
    ];
    for bits in [r.x, r.y, r.won] {
        c.extend(bits.iter().map(|&b| Cell::Int(b as u64)));
    }
    c.extend(r.actions_a.iter().chain(&r.actions_b).map(|&a| Cell::Int(a as u64)));
    c
}

fn epd_cells(r: &EpdRecord) -> Vec<Cell> {
    vec![
        Cell::Int(r.sim as u64),
        Cell::Int(r.round as u64),
        Cell::Text(r.act_a.symbol()),
        Cell::Text(r.act_b.symbol()),
        Cell::Int(r.out_a as u64),
        Cell::Int(r.out_b as u64),
        Cell::Float(r.pay_a),
        Cell::Float(r.pay_b),
        Cell::Float(r.cum_a),
        Cell::Float(r.cum_b),
        Cell::Float(r.ent_a),
        Cell::Float(r.ent_b),
        Cell::Float(r.pred_a),
        Cell::Float(r.pred_b),
    ]
}

fn rows(records: &Records) -> Box<dyn Iterator<Item = Vec<Cell>> + '_> {
    match records {
        Records::Chsh(r) => Box::new(r.iter().map(chsh_cells)),
        Records::Epd(r) => Box::new(r.iter().map(epd_cells)),
    }
}

pub fn write_csv<W: Write>(records: &Records, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(records.header())?;
    for row in rows(records) {
        w.write_record(row.iter().map(Cell::to_text))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json_lines<W: Write>(records: &Records, mut out: W) -> Result<()> {
    let header = records.header();
    for row in rows(records) {
        let obj: Map<String, Value> = header.iter().zip(&row).map(|(k, c)| (k.to_string(), c.to_json())).collect();
        serde_json::to_writer(&mut out, &obj)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Writes `records` to `path`, creating parent directories as needed.
pub fn write_records(records: &Records, path: &Path, format: OutputFormat) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let out = BufWriter::new(File::create(path)?);
    match format {
        OutputFormat::Csv => write_csv(records, out),
        OutputFormat::JsonLines => write_json_lines(records, out),
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(format!("malformed record: {}", msg.into()))
}

fn parse<T: std::str::FromStr>(s: &str, col: &str) -> Result<T> {
    s.trim().parse().map_err(|_| bad(format!("column {col} = '{s}'")))
}

fn parse_action(s: &str) -> Result<EpdAction> {
    match s {
        "Q" => Ok(EpdAction::Q),
        "D" => Ok(EpdAction::D),
        _ => Err(bad(format!("action '{s}'"))),
    }
}

fn chsh_from_fields(f: &[String]) -> Result<ChshRecord> {
    let h = &CHSH_HEADER;
    let bits = |start: usize| -> Result<[u8; 3]> {
        Ok([parse(&f[start], h[start])?, parse(&f[start + 1], h[start + 1])?, parse(&f[start + 2], h[start + 2])?])
    };
    Ok(ChshRecord {
        sim: parse(&f[0], h[0])?,
        round: parse(&f[1], h[1])?,
        winp: parse(&f[2], h[2])?,
        exp_a: parse(&f[3], h[3])?,
        exp_b: parse(&f[4], h[4])?,
        ent_a: parse(&f[5], h[5])?,
        ent_b: parse(&f[6], h[6])?,
        x: bits(7)?,
        y: bits(10)?,
        won: bits(13)?,
        actions_a: [parse(&f[16], h[16])?, parse(&f[17], h[17])?],
        actions_b: [parse(&f[18], h[18])?, parse(&f[19], h[19])?],
    })
}

fn epd_from_fields(f: &[String]) -> Result<EpdRecord> {
    let h = &EPD_HEADER;
    Ok(EpdRecord {
        sim: parse(&f[0], h[0])?,
        round: parse(&f[1], h[1])?,
        act_a: parse_action(&f[2])?,
        act_b: parse_action(&f[3])?,
        out_a: parse(&f[4], h[4])?,
        out_b: parse(&f[5], h[5])?,
        pay_a: parse(&f[6], h[6])?,
        pay_b: parse(&f[7], h[7])?,
        cum_a: parse(&f[8], h[8])?,
        cum_b: parse(&f[9], h[9])?,
        ent_a: parse(&f[10], h[10])?,
        ent_b: parse(&f[11], h[11])?,
        pred_a: parse(&f[12], h[12])?,
        pred_b: parse(&f[13], h[13])?,
    })
}

/// Reads a CSV written by [`write_csv`]; the game is inferred from the header.
pub fn read_csv(path: &Path) -> Result<Records> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect::<Vec<_>>()));
    if header == CHSH_HEADER {
        rows.map(|f| chsh_from_fields(&f?)).collect::<Result<_>>().map(Records::Chsh)
    } else if header == EPD_HEADER {
        rows.map(|f| epd_from_fields(&f?)).collect::<Result<_>>().map(Records::Epd)
    } else {
        Err(bad(format!("unrecognized header {}", header.join(","))))
    }
}

/// Reads a JSON-lines file written by [`write_json_lines`].
pub fn read_json_lines(path: &Path) -> Result<Records> {
    let mut chsh = Vec::new();
    let mut epd = Vec::new();
    for line in BufReader::new(File::open(path)?).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let obj: Map<String, Value> = serde_json::from_str(&line)?;
        let header: &[&str] = if obj.contains_key("winp") { &CHSH_HEADER } else { &EPD_HEADER };
        let fields: Vec<String> = header
            .iter()
            .map(|k| match obj.get(*k) {
                Some(Value::String(s)) => Ok(s.clone()),
                Some(v) => Ok(v.to_string()),
                None => Err(bad(format!("missing key {k}"))),
            })
            .collect::<Result<_>>()?;
        if header.len() == CHSH_HEADER.len() {
            chsh.push(chsh_from_fields(&fields)?);
        } else {
            epd.push(epd_from_fields(&fields)?);
        }
    }
    match (chsh.is_empty(), epd.is_empty()) {
        (_, true) => Ok(Records::Chsh(chsh)),
        (true, false) => Ok(Records::Epd(epd)),
        (false, false) => Err(bad("file mixes chsh and epd rows")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round9_keeps_nine_significant_digits() {
        assert_eq!(round9(0.7025), 0.7025);
        assert_eq!(round9(1.0 / 3.0).to_string(), "0.333333333");
        assert_eq!(round9(2.0 / 3.0e-5).to_string(), "66666.6667");
        assert_eq!(round9(0.0), 0.0);
    }

    #[test]
    fn header_strings() {
        assert_eq!(
            CHSH_HEADER.join(","),
            "sim,round,winp,expA,expB,entA,entB,xa1,xa2,xa3,yb1,yb2,yb3,w1,w2,w3,aA0,aA1,aB0,aB1"
        );
        assert_eq!(EPD_HEADER.join(","), "sim,round,actA,actB,o1,o2,payA,payB,cumA,cumB,entA,entB,predA,predB");
    }
}
