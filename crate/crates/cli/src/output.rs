use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Text,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Text => "txt",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Text => "text",
        }
    }
}

/// Where `--out` sends the rendered result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    Stdout(Option<Format>),
    File(PathBuf, Format),
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "" => return Err("empty --out".into()),
            "csv" => Target::Stdout(Some(Format::Csv)),
            "json" => Target::Stdout(Some(Format::Json)),
            "text" | "txt" => Target::Stdout(Some(Format::Text)),
            path => {
                let path = PathBuf::from(path);
                let format = match path.extension().and_then(|e| e.to_str()) {
                    Some("csv") => Format::Csv,
                    Some("json") => Format::Json,
                    _ => Format::Text,
                };
                Target::File(path, format)
            }
        })
    }
}

pub fn parse_format(s: &str) -> Option<Format> {
    match s {
        "csv" => Some(Format::Csv),
        "json" => Some(Format::Json),
        "text" => Some(Format::Text),
        _ => None,
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Result of one command, renderable in every format it supports.
pub struct Output {
    pub json: Value,
    pub table: Option<Table>,
    pub text: Option<String>,
    pub default: Format,
    /// A verification step failed; the process exits with status 1.
    pub failed: bool,
}

impl Output {
    pub fn json(json: Value) -> Self {
        Output { json, table: None, text: None, default: Format::Json, failed: false }
    }

    pub fn table(json: Value, table: Table) -> Self {
        Output { json, table: Some(table), text: None, default: Format::Csv, failed: false }
    }

    pub fn with_text(mut self, text: String) -> Self {
        self.text = Some(text);
        self.default = Format::Text;
        self
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn with_default_json(mut self) -> Self {
        self.default = Format::Json;
        self
    }

    pub fn render(&self, format: Format) -> Result<String, String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).map_err(|e| e.to_string())?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => self.table.as_ref().map(Table::render).ok_or_else(|| "this command has no CSV form".into()),
            Format::Text => match (&self.text, &self.table) {
                (Some(t), _) => Ok(t.clone()),
                (None, Some(t)) => Ok(t.render()),
                (None, None) => self.render(Format::Json),
            },
        }
    }
}

/// Text block of `key: value` lines.
pub fn lines(pairs: &[(&str, String)]) -> String {
    let mut s = String::new();
    for (k, v) in pairs {
        let _ = writeln!(s, "{k}: {v}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn targets() {
        assert_eq!("csv".parse::<Target>().unwrap(), Target::Stdout(Some(Format::Csv)));
        assert_eq!("run/x.json".parse::<Target>().unwrap(), Target::File("run/x.json".into(), Format::Json));
        assert_eq!("edges".parse::<Target>().unwrap(), Target::File("edges".into(), Format::Text));
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.1 + 0.2, 1.0 / 3.0, 1e-300, 0.125] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(0.125), "0.125");
    }

    #[test]
    fn csv_rendering() {
        let mut t = Table::new(&["m", "P"]);
        t.push(vec!["0".into(), num(0.5)]);
        let out = Output::table(Value::Null, t);
        assert_eq!(out.render(Format::Csv).unwrap(), "m,P\n0,0.5\n");
        assert!(Output::json(Value::Null).render(Format::Csv).is_err());
    }
}
