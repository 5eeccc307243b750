//! Reader and writer for the dense numeric/nominal subset of ARFF.
//!
//! The writer emits one canonical form: lowercase keywords, one blank line
//! after the relation and after the attribute block, comma separators and
//! `\n` line ends. Parsing a canonical document and writing it back is
//! byte-identical (comments are dropped).

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{AttributeKind, AttributeSpec, Dataset, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArffError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("undeclared category '{token}' at line {line}")]
    UndeclaredCategory { token: String, line: usize },
    #[error("expected {expected} values, got {got} at line {line}")]
    Arity { expected: usize, got: usize, line: usize },
    #[error("invalid numeric value '{token}' at line {line}")]
    BadNumber { token: String, line: usize },
    #[error("unsupported {what} at line {line}")]
    Unsupported { what: String, line: usize },
    #[error("syntax error at line {line}: {msg}")]
    Syntax { msg: String, line: usize },
    #[error("unknown class attribute '{0}'")]
    UnknownClass(String),
    #[error("ragged table: row {row} has {got} values for {expected} headers")]
    RaggedRow { row: usize, expected: usize, got: usize },
    #[error("duplicate column name '{0}'")]
    DuplicateColumn(String),
}

type Result<T> = std::result::Result<T, ArffError>;

#[derive(Debug, Clone, PartialEq)]
struct Token {
    text: String,
    quoted: bool,
}

/// Splits a line into tokens separated by commas and/or whitespace.
/// Quoted tokens use `'` or `"` with backslash escapes.
fn tokenize(line: &str, lineno: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let skip_ws = |i: &mut usize| {
        while *i < chars.len() && chars[*i].is_whitespace() {
            *i += 1;
        }
    };
    skip_ws(&mut i);
    while i < chars.len() {
        let tok = if chars[i] == '\'' || chars[i] == '"' {
            let quote = chars[i];
            i += 1;
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None => {
                        return Err(ArffError::Syntax {
                            msg: "unterminated quote".into(),
                            line: lineno,
                        })
                    }
                    Some('\\') => {
                        let esc = chars.get(i + 1).copied().ok_or(ArffError::Syntax {
                            msg: "dangling escape".into(),
                            line: lineno,
                        })?;
                        s.push(match esc {
                            'n' => '\n',
                            't' => '\t',
                            'r' => '\r',
                            other => other,
                        });
                        i += 2;
                    }
                    Some(&c) if c == quote => {
                        i += 1;
                        break;
                    }
                    Some(&c) => {
                        s.push(c);
                        i += 1;
                    }
                }
            }
            Token { text: s, quoted: true }
        } else {
            let start = i;
            while i < chars.len() && chars[i] != ',' && !chars[i].is_whitespace() {
                i += 1;
            }
            Token {
                text: chars[start..i].iter().collect(),
                quoted: false,
            }
        };
        out.push(tok);
        skip_ws(&mut i);
        if i < chars.len() && chars[i] == ',' {
            i += 1;
            skip_ws(&mut i);
            if i == chars.len() {
                return Err(ArffError::Syntax {
                    msg: "trailing separator".into(),
                    line: lineno,
                });
            }
        }
    }
    Ok(out)
}

fn parse_attribute(rest: &str, lineno: usize) -> Result<AttributeSpec> {
    // name first, then type (the type may contain separators when nominal)
    let rest = rest.trim_start();
    let (name, after) = if rest.starts_with('\'') || rest.starts_with('"') {
        let toks = tokenize(rest, lineno)?;
        let name = toks
            .first()
            .ok_or_else(|| ArffError::MalformedHeader(format!("attribute without name at line {lineno}")))?
            .text
            .clone();
        // find the end of the quoted name in the raw text
        let quote = rest.chars().next().unwrap_or('\'');
        let mut end = 1;
        let bytes: Vec<char> = rest.chars().collect();
        while end < bytes.len() {
            if bytes[end] == '\\' {
                end += 2;
                continue;
            }
            if bytes[end] == quote {
                break;
            }
            end += 1;
        }
        let consumed: String = bytes[..(end + 1).min(bytes.len())].iter().collect();
        (name, rest[consumed.len()..].trim())
    } else {
        match rest.find(char::is_whitespace) {
            Some(p) => (rest[..p].to_string(), rest[p..].trim()),
            None => {
                return Err(ArffError::MalformedHeader(format!(
                    "attribute '{rest}' has no type at line {lineno}"
                )))
            }
        }
    };
    if after.starts_with('{') {
        let inner = after
            .strip_prefix('{')
            .and_then(|s| s.trim_end().strip_suffix('}'))
            .ok_or_else(|| ArffError::Syntax {
                msg: "unterminated nominal specification".into(),
                line: lineno,
            })?;
        let cats: Vec<String> = tokenize(inner, lineno)?.into_iter().map(|t| t.text).collect();
        if cats.is_empty() {
            return Err(ArffError::MalformedHeader(format!(
                "nominal attribute '{name}' has no categories at line {lineno}"
            )));
        }
        let unique: BTreeSet<&String> = cats.iter().collect();
        if unique.len() != cats.len() {
            return Err(ArffError::MalformedHeader(format!(
                "duplicate category in '{name}' at line {lineno}"
            )));
        }
        return Ok(AttributeSpec::nominal(name, cats));
    }
    let ty = after.split_whitespace().next().unwrap_or("").to_ascii_lowercase();
    match ty.as_str() {
        "numeric" | "real" | "integer" => Ok(AttributeSpec::numeric(name)),
        "string" | "date" | "relational" => Err(ArffError::Unsupported {
            what: format!("{ty} attribute '{name}'"),
            line: lineno,
        }),
        "" => Err(ArffError::MalformedHeader(format!("attribute '{name}' has no type at line {lineno}"))),
        other => Err(ArffError::MalformedHeader(format!("unknown type '{other}' at line {lineno}"))),
    }
}

fn keyword(line: &str) -> Option<(String, &str)> {
    let line = line.trim_start();
    if !line.starts_with('@') {
        return None;
    }
    let end = line.find(char::is_whitespace).unwrap_or(line.len());
    Some((line[..end].to_ascii_lowercase(), &line[end..]))
}

/// Parses an ARFF document with the last attribute as class.
pub fn parse_arff(text: &str) -> Result<Dataset> {
    parse_arff_with_class(text, None)
}

/// Parses an ARFF document. `class` names the class attribute; `None`
/// selects the last declared attribute.
pub fn parse_arff_with_class(text: &str, class: Option<&str>) -> Result<Dataset> {
    let mut relation: Option<String> = None;
    let mut attributes: Vec<AttributeSpec> = Vec::new();
    let mut in_data = false;
    let mut rows: Vec<Vec<Value>> = Vec::new();
    let mut lookups: Vec<Option<HashMap<String, usize>>> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if !in_data {
            let (kw, rest) = keyword(line).ok_or_else(|| {
                ArffError::MalformedHeader(format!("unexpected content at line {lineno}"))
            })?;
            match kw.as_str() {
                "@relation" => {
                    let toks = tokenize(rest, lineno)?;
                    let name = toks.into_iter().next().map(|t| t.text).ok_or_else(|| {
                        ArffError::MalformedHeader(format!("relation without name at line {lineno}"))
                    })?;
                    relation = Some(name);
                }
                "@attribute" => {
                    if relation.is_none() {
                        return Err(ArffError::MalformedHeader(format!(
                            "attribute before @relation at line {lineno}"
                        )));
                    }
                    attributes.push(parse_attribute(rest, lineno)?);
                }
                "@data" => {
                    if relation.is_none() || attributes.is_empty() {
                        return Err(ArffError::MalformedHeader("@data before declarations".into()));
                    }
                    let mut names = BTreeSet::new();
                    for a in &attributes {
                        if !names.insert(a.name.as_str()) {
                            return Err(ArffError::MalformedHeader(format!(
                                "duplicate attribute '{}'",
                                a.name
                            )));
                        }
                    }
                    lookups = attributes
                        .iter()
                        .map(|a| {
                            a.categories().map(|cats| {
                                cats.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect()
                            })
                        })
                        .collect();
                    in_data = true;
                }
                other => {
                    return Err(ArffError::MalformedHeader(format!(
                        "unknown declaration '{other}' at line {lineno}"
                    )))
                }
            }
            continue;
        }

        if line.starts_with('{') {
            return Err(ArffError::Unsupported {
                what: "sparse data row".into(),
                line: lineno,
            });
        }
        let toks = tokenize(line, lineno)?;
        if toks.len() != attributes.len() {
            return Err(ArffError::Arity {
                expected: attributes.len(),
                got: toks.len(),
                line: lineno,
            });
        }
        let mut row = Vec::with_capacity(toks.len());
        for (tok, lookup) in toks.into_iter().zip(&lookups) {
            if tok.text == "?" && !tok.quoted {
                row.push(Value::Missing);
                continue;
            }
            match lookup {
                Some(map) => match map.get(&tok.text) {
                    Some(&i) => row.push(Value::Nominal(i)),
                    None => {
                        return Err(ArffError::UndeclaredCategory {
                            token: tok.text,
                            line: lineno,
                        })
                    }
                },
                None => {
                    let v: f64 = tok.text.parse().map_err(|_| ArffError::BadNumber {
                        token: tok.text.clone(),
                        line: lineno,
                    })?;
                    if !v.is_finite() {
                        return Err(ArffError::BadNumber {
                            token: tok.text,
                            line: lineno,
                        });
                    }
                    row.push(Value::Numeric(v));
                }
            }
        }
        rows.push(row);
    }

    if !in_data {
        return Err(ArffError::MalformedHeader("missing @data section".into()));
    }
    let class_index = match class {
        None => attributes.len() - 1,
        Some(name) => attributes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| ArffError::UnknownClass(name.to_string()))?,
    };
    Ok(Dataset::new(relation.unwrap_or_default(), attributes, class_index, rows))
}

fn is_bare(s: &str) -> bool {
    !s.is_empty()
        && s != "?"
        && s.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

/// Quotes a name or category when it cannot appear bare.
pub fn quote(s: &str) -> String {
    if is_bare(s) {
        return s.to_string();
    }
    let mut out = String::with_capacity(s.len() + 2);
    out.push('\'');
    for c in s.chars() {
        match c {
            '\'' => out.push_str("\\'"),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('\'');
    out
}

/// Renders a number with at most six decimals, trailing zeros trimmed.
pub fn format_number(v: f64) -> String {
    if !v.is_finite() {
        return "?".to_string();
    }
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn write_header(out: &mut String, relation: &str, attributes: &[AttributeSpec]) {
    let _ = writeln!(out, "@relation {}\n", quote(relation));
    for a in attributes {
        match &a.kind {
            AttributeKind::Numeric => {
                let _ = writeln!(out, "@attribute {} numeric", quote(&a.name));
            }
            AttributeKind::Nominal(cats) => {
                let cats: Vec<String> = cats.iter().map(|c| quote(c)).collect();
                let _ = writeln!(out, "@attribute {} {{{}}}", quote(&a.name), cats.join(","));
            }
        }
    }
    out.push_str("\n@data\n");
}

/// Writes a dataset in canonical form.
pub fn write_arff(dataset: &Dataset) -> String {
    let mut out = String::new();
    write_header(&mut out, &dataset.name, &dataset.attributes);
    for row in &dataset.rows {
        let cells: Vec<String> = row
            .iter()
            .zip(&dataset.attributes)
            .map(|(v, a)| match (v, &a.kind) {
                (Value::Missing, _) => "?".to_string(),
                (Value::Numeric(x), _) => format_number(*x),
                (Value::Nominal(i), AttributeKind::Nominal(cats)) => {
                    cats.get(*i).map(|c| quote(c)).unwrap_or_else(|| "?".to_string())
                }
                (Value::Nominal(i), AttributeKind::Numeric) => i.to_string(),
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// One cell of an exported meta-data table.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// Numeric value rendered by [`format_number`].
    Number(f64),
    /// Numeric value rendered with exactly `decimals` decimals (e.g. `96.80`).
    Fixed { value: f64, decimals: usize },
    /// Non-numeric token; makes its column nominal.
    Text(String),
    Missing,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Number(v) => format_number(*v),
            Cell::Fixed { value, decimals } if value.is_finite() => format!("{value:.decimals$}"),
            Cell::Fixed { .. } | Cell::Missing => "?".to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn from_option(v: Option<f64>) -> Cell {
        v.map_or(Cell::Missing, Cell::Number)
    }
}

/// Writes a table as an ARFF document. A column is numeric unless it holds
/// a text cell, in which case it is nominal over its observed tokens.
pub fn write_meta_table(headers: &[String], rows: &[Vec<Cell>], relation: &str) -> Result<String> {
    let mut names = BTreeSet::new();
    for h in headers {
        if !names.insert(h.as_str()) {
            return Err(ArffError::DuplicateColumn(h.clone()));
        }
    }
    for (r, row) in rows.iter().enumerate() {
        if row.len() != headers.len() {
            return Err(ArffError::RaggedRow {
                row: r,
                expected: headers.len(),
                got: row.len(),
            });
        }
    }
    let mut attributes = Vec::with_capacity(headers.len());
    let mut nominal = vec![false; headers.len()];
    for (c, h) in headers.iter().enumerate() {
        let has_text = rows.iter().any(|row| matches!(row[c], Cell::Text(_)));
        if has_text {
            nominal[c] = true;
            let tokens: BTreeSet<String> = rows
                .iter()
                .filter(|row| !matches!(row[c], Cell::Missing))
                .map(|row| row[c].render())
                .filter(|t| t != "?")
                .collect();
            attributes.push(AttributeSpec::nominal(h.clone(), tokens));
        } else {
            attributes.push(AttributeSpec::numeric(h.clone()));
        }
    }
    let mut out = String::new();
    write_header(&mut out, relation, &attributes);
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                let s = cell.render();
                if nominal[c] && s != "?" {
                    quote(&s)
                } else {
                    s
                }
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}
