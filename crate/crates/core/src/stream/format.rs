//! Plain-text stream format.
//!
//! ```text
//! n 4
//! # comment
//! + 0 1
//! - 0 1
//! ```

use std::fmt::Write as _;
use std::io::BufRead;

use super::StreamUpdate;
use crate::error::Error;

/// A fully loaded stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stream {
    pub n: u32,
    pub updates: Vec<StreamUpdate>,
}

impl Stream {
    pub fn parse(text: &str) -> Result<Stream, Error> {
        let mut reader = StreamReader::new(text.as_bytes())?;
        let n = reader.n();
        let updates = reader.by_ref().collect::<Result<Vec<_>, _>>()?;
        Ok(Stream { n, updates })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        write_stream(&mut out, self.n, &self.updates);
        out
    }
}

/// Appends the text form of a stream to `out`.
pub fn write_stream(out: &mut String, n: u32, updates: &[StreamUpdate]) {
    writeln!(out, "n {n}").unwrap();
    for up in updates {
        let sign = if up.delta > 0 { '+' } else { '-' };
        writeln!(out, "{sign} {} {}", up.u, up.v).unwrap();
    }
}

/// Incremental parser yielding one update per data line.
pub struct StreamReader<R> {
    inner: R,
    n: u32,
    line_no: usize,
    buf: String,
}

fn is_skippable(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

impl<R: BufRead> StreamReader<R> {
    /// Reads up to and including the `n <vertices>` header.
    pub fn new(inner: R) -> Result<Self, Error> {
        let mut r = StreamReader { inner, n: 0, line_no: 0, buf: String::new() };
        loop {
            if !r.next_line()? {
                return Err(Error::Parse { line: r.line_no, msg: "missing `n <vertices>` header".into() });
            }
            if is_skippable(&r.buf) {
                continue;
            }
            let mut parts = r.buf.split_whitespace();
            let n = match (parts.next(), parts.next(), parts.next()) {
                (Some("n"), Some(v), None) => v.parse::<u32>().ok(),
                _ => None,
            };
            return match n {
                Some(n) => {
                    r.n = n;
                    Ok(r)
                }
                None => Err(Error::Parse { line: r.line_no, msg: format!("expected `n <vertices>`, got {:?}", r.buf.trim()) }),
            };
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    fn next_line(&mut self) -> Result<bool, Error> {
        self.buf.clear();
        self.line_no += 1;
        match self.inner.read_line(&mut self.buf) {
            Ok(0) => Ok(false),
            Ok(_) => Ok(true),
            Err(e) => Err(Error::Parse { line: self.line_no, msg: e.to_string() }),
        }
    }

    fn parse_update(&self) -> Result<StreamUpdate, Error> {
        let err = |msg: String| Error::Parse { line: self.line_no, msg };
        let mut parts = self.buf.split_whitespace();
        let delta = match parts.next() {
            Some("+") => 1,
            Some("-") => -1,
            other => return Err(err(format!("expected `+` or `-`, got {other:?}"))),
        };
        let mut vertex = || -> Result<u32, Error> {
            parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err("expected two vertex ids".into()))
        };
        let (u, v) = (vertex()?, vertex()?);
        if parts.next().is_some() {
            return Err(err("trailing tokens".into()));
        }
        StreamUpdate::new(u, v, delta, self.n).map_err(|e| err(e.to_string()))
    }
}

impl<R: BufRead> Iterator for StreamReader<R> {
    type Item = Result<StreamUpdate, Error>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            match self.next_line() {
                Err(e) => return Some(Err(e)),
                Ok(false) => return None,
                Ok(true) if is_skippable(&self.buf) => continue,
                Ok(true) => return Some(self.parse_update()),
            }
        }
    }
}
