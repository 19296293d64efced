//! Tokenizer shared by the two-sender and multi-sender instance formats.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Raw records of an instance file, all indices 1-based as written.
#[derive(Debug, Default)]
pub(crate) struct Records {
    pub receivers: Vec<(usize, Vec<usize>, usize)>,
    pub senders: BTreeMap<usize, (Vec<usize>, usize)>,
    pub t: Option<u32>,
}

struct Scanner {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Scanner {
    fn new(src: &str) -> Scanner {
        Scanner { chars: src.chars().collect(), pos: 0, line: 1 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { line: self.line, msg: msg.into() })
    }

    /// Skips whitespace and comments but stops at separators.
    fn skip_blank(&mut self) {
        while let Some(&c) = self.chars.get(self.pos) {
            if c == '#' {
                while let Some(&c) = self.chars.get(self.pos) {
                    if c == '\n' {
                        break;
                    }
                    self.pos += 1;
                }
            } else if c.is_whitespace() {
                if c == '\n' {
                    self.line += 1;
                }
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_blank();
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn expect(&mut self, want: char) -> Result<()> {
        match self.bump() {
            Some(c) if c == want => Ok(()),
            Some(c) => self.err(format!("expected '{want}', found '{c}'")),
            None => self.err(format!("expected '{want}', found end of input")),
        }
    }

    fn number(&mut self) -> Result<usize> {
        self.skip_blank();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return match self.chars.get(self.pos) {
                Some(c) => self.err(format!("expected a number, found '{c}'")),
                None => self.err("expected a number, found end of input"),
            };
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().or_else(|_| self.err(format!("number {s} is too large")))
    }

    /// Comma-separated numbers up to (not including) `close`.
    fn number_list(&mut self, close: char) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        if self.peek() == Some(close) {
            return Ok(out);
        }
        loop {
            out.push(self.number()?);
            match self.peek() {
                Some(',') => {
                    self.pos += 1;
                }
                Some(c) if c == close => return Ok(out),
                Some(c) => return self.err(format!("expected ',' or '{close}', found '{c}'")),
                None => return self.err(format!("unterminated list, expected '{close}'")),
            }
        }
    }
}

pub(crate) fn records(text: &str) -> Result<Records> {
    let mut s = Scanner::new(text);
    let mut rec = Records::default();
    while let Some(c) = s.peek() {
        match c {
            ',' | ';' => {
                s.pos += 1;
            }
            '(' => {
                s.pos += 1;
                let line = s.line;
                let r = s.number()?;
                let known = match s.bump() {
                    Some(')') => Vec::new(),
                    Some('|') => {
                        let list = s.number_list(')')?;
                        s.expect(')')?;
                        list
                    }
                    Some(c) => return s.err(format!("expected '|' or ')', found '{c}'")),
                    None => return s.err("unterminated receiver record"),
                };
                rec.receivers.push((r, known, line));
            }
            'M' | 'm' => {
                s.pos += 1;
                let line = s.line;
                let k = s.number()?;
                s.expect('=')?;
                s.expect('{')?;
                let list = s.number_list('}')?;
                s.expect('}')?;
                if rec.senders.insert(k, (list, line)).is_some() {
                    return s.err(format!("M{k} given twice"));
                }
            }
            't' | 'T' => {
                s.pos += 1;
                s.expect('=')?;
                let t = s.number()?;
                if rec.t.is_some() {
                    return s.err("t given twice");
                }
                rec.t = Some(u32::try_from(t).or_else(|_| s.err("t is too large"))?);
            }
            other => return s.err(format!("unexpected character '{other}'")),
        }
    }
    Ok(rec)
}
