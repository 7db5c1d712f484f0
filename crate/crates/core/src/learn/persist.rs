//! Plain-text persistence for [`QTable`] and [`LinearQ`].
//!
//! Q-table format:
//!
//! ```text
//! qtable v1 states S actions A
//! s a value
//! ...
//! ```
//!
//! Only entries that differ from the initial value are written; absent
//! entries read back as the initial value. A table with a nonzero initial
//! value carries an extra ` initial X` suffix on the header. Values are
//! printed with shortest round-trip precision, so save/load is lossless.
//!
//! The linear model uses `linearq v1 features F actions A` followed by
//! `a j weight` rows.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{LinearQ, QTable};
use crate::error::{Error, Result};

pub fn qtable_to_string(table: &QTable) -> String {
    let mut out = format!(
        "qtable v1 states {} actions {}",
        table.n_states(),
        table.n_actions()
    );
    if table.initial() != 0.0 {
        let _ = write!(out, " initial {:?}", table.initial());
    }
    out.push('\n');
    for s in 0..table.n_states() {
        for a in 0..table.n_actions() {
            let v = table.get(s, a);
            if v.to_bits() != table.initial().to_bits() {
                let _ = writeln!(out, "{s} {a} {v:?}");
            }
        }
    }
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| parse_err(line, format!("bad {what}")))
}

pub fn qtable_from_str(text: &str) -> Result<QTable> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let shape_ok = matches!(toks.len(), 6 | 8)
        && toks[0] == "qtable"
        && toks[1] == "v1"
        && toks[2] == "states"
        && toks[4] == "actions"
        && (toks.len() == 6 || toks[6] == "initial");
    if !shape_ok {
        return Err(parse_err(ln, format!("bad header `{header}`")));
    }
    let n_states: usize = parse_num(Some(toks[3]), ln, "state count")?;
    let n_actions: usize = parse_num(Some(toks[5]), ln, "action count")?;
    let initial: f64 = if toks.len() == 8 {
        parse_num(Some(toks[7]), ln, "initial value")?
    } else {
        0.0
    };
    let mut table = QTable::with_initial(n_states, n_actions, initial)?;
    for (ln, line) in lines {
        let mut it = line.split_whitespace();
        let s: usize = parse_num(it.next(), ln, "state")?;
        let a: usize = parse_num(it.next(), ln, "action")?;
        let v: f64 = parse_num(it.next(), ln, "value")?;
        if it.next().is_some() {
            return Err(parse_err(ln, "trailing tokens"));
        }
        table
            .set(s, a, v)
            .map_err(|e| parse_err(ln, e.to_string()))?;
    }
    Ok(table)
}

pub fn save_qtable(table: &QTable, path: &Path) -> Result<()> {
    fs::write(path, qtable_to_string(table))?;
    Ok(())
}

pub fn load_qtable(path: &Path) -> Result<QTable> {
    qtable_from_str(&fs::read_to_string(path)?)
}

pub fn linear_to_string(model: &LinearQ) -> String {
    let mut out = format!(
        "linearq v1 features {} actions {}\n",
        model.n_features(),
        model.n_actions()
    );
    for (i, &w) in model.weights().iter().enumerate() {
        if w != 0.0 {
            let (a, j) = (i / model.n_features(), i % model.n_features());
            let _ = writeln!(out, "{a} {j} {w:?}");
        }
    }
    out
}

pub fn linear_from_str(text: &str) -> Result<LinearQ> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 6 || toks[..3] != ["linearq", "v1", "features"] || toks[4] != "actions" {
        return Err(parse_err(ln, format!("bad header `{header}`")));
    }
    let mut model = LinearQ::new(
        parse_num(Some(toks[3]), ln, "feature count")?,
        parse_num(Some(toks[5]), ln, "action count")?,
    );
    for (ln, line) in lines {
        let mut it = line.split_whitespace();
        let a: usize = parse_num(it.next(), ln, "action")?;
        let j: usize = parse_num(it.next(), ln, "feature")?;
        let w: f64 = parse_num(it.next(), ln, "weight")?;
        model
            .set_weight(a, j, w)
            .map_err(|e| parse_err(ln, e.to_string()))?;
    }
    Ok(model)
}
