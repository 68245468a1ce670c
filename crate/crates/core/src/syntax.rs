//! Text grammar for group elements.
//!
//! ```text
//! expr    := factor*                      juxtaposition is product
//! factor  := atom ( '^' '-'? digits )*
//! atom    := 'x' | 'y' | 'X' | 'Y' | '1'
//!          | '(' expr ')'
//!          | 'comm' '(' expr ',' expr ')' a^-1 b^-1 a b
//!          | 'z' '(' digits ')'            catalog element z_n
//! ```
//!
//! `X` and `Y` stand for `x^-1` and `y^-1`. Whitespace is ignored.

use thiserror::Error;

use crate::catalog;
use crate::tree::{Letter, TreeElement, TreeParams};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

pub fn parse_element(text: &str, params: TreeParams) -> Result<TreeElement, ParseError> {
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
        params,
    };
    let e = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.src.len() {
        return Err(parser.error("unexpected character"));
    }
    Ok(e)
}

/// Parses a `;`-separated tuple such as `"comm(x,y) x ; y"`.
pub fn parse_tuple(text: &str, params: TreeParams) -> Result<Vec<TreeElement>, ParseError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in text.split(';') {
        let e = parse_element(part, params).map_err(|mut err| {
            err.pos += offset;
            err
        })?;
        out.push(e);
        offset += part.len() + 1;
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    params: TreeParams,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> ParseError {
        ParseError {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn number(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| ParseError {
                pos: start,
                msg: "number too large".into(),
            })
    }

    fn expr(&mut self) -> Result<TreeElement, ParseError> {
        let mut acc: Option<TreeElement> = None;
        while let Some(c) = self.peek() {
            if c == b')' || c == b',' {
                break;
            }
            let f = self.factor()?;
            acc = Some(match acc {
                None => f,
                Some(a) => a.mul(&f),
            });
        }
        Ok(acc.unwrap_or_else(TreeElement::identity))
    }

    fn factor(&mut self) -> Result<TreeElement, ParseError> {
        let mut e = self.atom()?;
        while self.peek() == Some(b'^') {
            self.pos += 1;
            let neg = if self.peek() == Some(b'-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let k = self.number()?;
            e = e.pow(if neg { -k } else { k }, self.params);
        }
        Ok(e)
    }

    fn keyword(&mut self, kw: &str) -> bool {
        let end = self.pos + kw.len();
        if self.src.get(self.pos..end) == Some(kw.as_bytes()) {
            self.pos = end;
            true
        } else {
            false
        }
    }

    fn atom(&mut self) -> Result<TreeElement, ParseError> {
        let Some(c) = self.peek() else {
            return Err(self.error("unexpected end of input"));
        };
        if self.keyword("comm") {
            self.expect(b'(')?;
            let a = self.expr()?;
            self.expect(b',')?;
            let b = self.expr()?;
            self.expect(b')')?;
            return Ok(catalog::commutator(&a, &b, self.params));
        }
        let letter = match c {
            b'x' => Some(Letter::X),
            b'X' => Some(Letter::XInv),
            b'y' => Some(Letter::Y),
            b'Y' => Some(Letter::YInv),
            _ => None,
        };
        if let Some(l) = letter {
            self.pos += 1;
            return Ok(TreeElement::letter(l));
        }
        match c {
            b'1' => {
                self.pos += 1;
                Ok(TreeElement::identity())
            }
            b'(' => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            b'z' => {
                self.pos += 1;
                self.expect(b'(')?;
                let at = self.pos;
                let n = self.number()?;
                self.expect(b')')?;
                catalog::z(n as usize, self.params).map_err(|e| ParseError {
                    pos: at,
                    msg: e.to_string(),
                })
            }
            _ => Err(self.error("unexpected character")),
        }
    }
}
