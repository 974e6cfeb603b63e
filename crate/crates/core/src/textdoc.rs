//! Line-oriented key/value documents used for every structured artifact.
//!
//! A document starts with a header line `#qcldpc <kind> v<version>`, followed
//! by `key value` lines and free-form table rows. Blank lines are ignored.

use std::fmt::Display;
use std::str::FromStr;

use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Default)]
pub struct DocWriter {
    out: String,
}

impl DocWriter {
    pub fn new(kind: &str) -> Self {
        DocWriter {
            out: format!("#qcldpc {kind} v{FORMAT_VERSION}\n"),
        }
    }

    pub fn field(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.out.push_str(&format!("{key} {value}\n"));
        self
    }

    pub fn line(&mut self, line: impl Display) -> &mut Self {
        self.out.push_str(&format!("{line}\n"));
        self
    }

    pub fn numbers<T: Display>(&mut self, values: impl IntoIterator<Item = T>) -> &mut Self {
        let line = values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
        self.line(line)
    }

    pub fn finish(&mut self) -> String {
        std::mem::take(&mut self.out)
    }
}

/// Returns the document kind named by the header, if the text has one.
pub fn sniff_kind(text: &str) -> Option<&str> {
    let first = text.lines().find(|l| !l.trim().is_empty())?;
    let mut parts = first.split_whitespace();
    (parts.next()? == "#qcldpc").then_some(())?;
    parts.next()
}

pub struct DocReader<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
    last_line: usize,
}

impl<'a> DocReader<'a> {
    pub fn open(text: &'a str, kind: &str) -> Result<Self, ParseError> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        let last_line = text.lines().count();
        let mut reader = DocReader {
            lines,
            pos: 0,
            last_line,
        };
        let (n, header) = reader.next_line()?;
        let expected = format!("#qcldpc {kind} v{FORMAT_VERSION}");
        if header != expected {
            return Err(ParseError::new(
                n,
                format!("expected header `{expected}`, found `{header}`"),
            ));
        }
        Ok(reader)
    }

    pub fn next_line(&mut self) -> Result<(usize, &'a str), ParseError> {
        match self.lines.get(self.pos) {
            Some(&entry) => {
                self.pos += 1;
                Ok(entry)
            }
            None => Err(ParseError::new(self.last_line + 1, "unexpected end of document")),
        }
    }

    /// Reads a `key value` line and returns the raw value (may be empty).
    pub fn field(&mut self, key: &str) -> Result<(usize, &'a str), ParseError> {
        let (n, line) = self.next_line()?;
        let (found, rest) = line.split_once(' ').unwrap_or((line, ""));
        if found != key {
            return Err(ParseError::new(n, format!("expected field `{key}`, found `{found}`")));
        }
        Ok((n, rest.trim()))
    }

    pub fn parse_field<T: FromStr>(&mut self, key: &str) -> Result<T, ParseError> {
        let (n, raw) = self.field(key)?;
        raw.parse()
            .map_err(|_| ParseError::new(n, format!("invalid value `{raw}` for `{key}`")))
    }

    pub fn numbers<T: FromStr>(&mut self, expected: usize) -> Result<Vec<T>, ParseError> {
        let (n, line) = self.next_line()?;
        let values = parse_numbers(n, line)?;
        if values.len() != expected {
            return Err(ParseError::new(
                n,
                format!("expected {expected} values, found {}", values.len()),
            ));
        }
        Ok(values)
    }

    pub fn finish(&self) -> Result<(), ParseError> {
        match self.lines.get(self.pos) {
            Some(&(n, _)) => Err(ParseError::new(n, "trailing content")),
            None => Ok(()),
        }
    }
}

pub fn parse_numbers<T: FromStr>(line_no: usize, line: &str) -> Result<Vec<T>, ParseError> {
    line.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| ParseError::new(line_no, format!("invalid number `{t}`")))
        })
        .collect()
}
