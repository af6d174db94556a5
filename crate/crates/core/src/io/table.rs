use std::collections::BTreeSet;
use std::path::Path;

use super::{content, read_file, tokens, IoError};
use crate::model::{Table, Value};

/// A table file: column names plus the tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedTable {
    pub names: Vec<String>,
    pub table: Table,
}

/// Header line of names, then one whitespace-separated tuple per line.
/// Blank lines and `#` comments are ignored.
pub fn parse_table(text: &str) -> Result<NamedTable, IoError> {
    let mut names: Option<Vec<String>> = None;
    let mut tuples = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let toks = tokens(content(raw));
        if toks.is_empty() {
            continue;
        }
        match &names {
            None => {
                let mut seen = BTreeSet::new();
                for &(col, t) in &toks {
                    if !seen.insert(t) {
                        return Err(IoError::syntax(line, col, format!("duplicate column `{t}`")));
                    }
                }
                names = Some(toks.iter().map(|(_, t)| t.to_string()).collect());
            }
            Some(header) => {
                if toks.len() != header.len() {
                    let col = toks.get(header.len()).map_or(raw.len() + 1, |t| t.0);
                    return Err(IoError::syntax(
                        line,
                        col,
                        format!("expected {} values, found {}", header.len(), toks.len()),
                    ));
                }
                let tuple: Vec<Value> = toks.iter().map(|(_, t)| Value::parse(t)).collect();
                let ints = tuple.iter().filter(|v| v.is_int()).count();
                if ints != 0 && ints != tuple.len() {
                    return Err(IoError::syntax(line, toks[0].0, "integers and symbols mixed"));
                }
                tuples.push(tuple);
            }
        }
    }
    let names = names.ok_or_else(|| IoError::syntax(1, 1, "missing header line"))?;
    let table = Table::new(names.len(), tuples).map_err(|e| IoError::invalid("table", e))?;
    let kinds: BTreeSet<bool> = table.iter().flatten().map(Value::is_int).collect();
    if kinds.len() > 1 {
        return Err(IoError::invalid("table", "integers and symbols mixed"));
    }
    Ok(NamedTable { names, table })
}

pub fn read_table(path: &Path) -> Result<NamedTable, IoError> {
    parse_table(&read_file(path)?)
}

pub fn write_table(t: &NamedTable) -> String {
    let mut out = t.names.join(" ");
    out.push('\n');
    for tuple in t.table.iter() {
        let row: Vec<String> = tuple.iter().map(Value::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
