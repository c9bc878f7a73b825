use std::fmt;

use thiserror::Error;

/// Text parse failure with the byte offset where it was detected.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: {}", self.offset, self.message)
    }
}

impl ParseError {
    pub(crate) fn new(offset: usize, message: impl Into<String>) -> Self {
        Self {
            offset,
            message: message.into(),
        }
    }
}

pub(crate) type PResult<T> = Result<T, ParseError>;

/// Whitespace-tolerant cursor. A space inside a literal matches any run of
/// whitespace, including none.
pub(crate) struct Scanner<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Scanner<'a> {
    pub fn new(src: &'a str) -> Self {
        Self { src, pos: 0 }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.pos, message)
    }

    pub fn skip_ws(&mut self) {
        let rest = self.rest();
        self.pos += rest.len() - rest.trim_start().len();
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.src.len()
    }

    pub fn expect_end(&mut self) -> PResult<()> {
        if self.at_end() {
            Ok(())
        } else {
            let snippet: String = self.rest().chars().take(24).collect();
            Err(self.error(format!("unexpected trailing text '{snippet}'")))
        }
    }

    /// Try to consume `lit` after optional leading whitespace.
    pub fn eat(&mut self, lit: &str) -> bool {
        let save = self.pos;
        self.skip_ws();
        for part in lit.split(' ') {
            self.skip_ws();
            if part.is_empty() {
                continue;
            }
            if self.rest().starts_with(part) {
                self.pos += part.len();
            } else {
                self.pos = save;
                return false;
            }
        }
        true
    }

    pub fn peek(&mut self, lit: &str) -> bool {
        let save = self.pos;
        let hit = self.eat(lit);
        self.pos = save;
        hit
    }

    pub fn expect(&mut self, lit: &str) -> PResult<()> {
        if self.eat(lit) {
            Ok(())
        } else {
            self.skip_ws();
            let snippet: String = self.rest().chars().take(24).collect();
            Err(self.error(format!("expected '{lit}', found '{snippet}'")))
        }
    }

    /// Non-negative decimal integer.
    pub fn int(&mut self) -> PResult<i64> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        while bytes.get(end).is_some_and(u8::is_ascii_digit) {
            end += 1;
        }
        if end == start {
            return Err(self.error("expected an integer"));
        }
        let value = self.src[start..end]
            .parse::<i64>()
            .map_err(|_| self.error("integer out of range"))?;
        self.pos = end;
        Ok(value)
    }

    pub fn usize(&mut self) -> PResult<usize> {
        let at = self.pos;
        let v = self.int()?;
        usize::try_from(v).map_err(|_| ParseError::new(at, "integer out of range"))
    }

    /// Prefix immediately followed by an integer, e.g. `J3`.
    pub fn prefixed(&mut self, prefix: &str) -> PResult<i64> {
        self.expect(prefix)?;
        if !self.rest().starts_with(|c: char| c.is_ascii_digit()) {
            return Err(self.error(format!("expected a number right after '{prefix}'")));
        }
        self.int()
    }

    /// True if `prefix` followed by a digit comes next.
    pub fn peek_prefixed(&mut self, prefix: &str) -> bool {
        let save = self.pos;
        self.skip_ws();
        let hit = self
            .rest()
            .strip_prefix(prefix)
            .is_some_and(|r| r.starts_with(|c: char| c.is_ascii_digit()));
        self.pos = save;
        hit
    }

    /// Comma-separated items between `open` and `close`; empty lists allowed.
    pub fn list<T>(
        &mut self,
        open: &str,
        close: &str,
        mut item: impl FnMut(&mut Self) -> PResult<T>,
    ) -> PResult<Vec<T>> {
        self.expect(open)?;
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat(close) {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }
}
