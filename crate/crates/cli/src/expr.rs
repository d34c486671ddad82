//! Polynomial expressions such as `z^2 + 4zw + w - 1` or `0.5i*z*w^3`.

use fup_core::polymethod::BivarPoly;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at column {column}: {message}")]
pub struct ParseError {
    /// 1-based, counted in characters of the original source.
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyExpr {
    pub source: String,
    pub parsed: BivarPoly,
}

impl PolyExpr {
    /// The zero polynomial vanishes everywhere and carries no information.
    pub fn is_degenerate(&self) -> bool {
        self.parsed.is_zero()
    }

    pub fn canonical(&self) -> String {
        render(&self.parsed)
    }
}

struct Parser {
    // Non-whitespace characters with their source columns.
    chars: Vec<(char, usize)>,
    pos: usize,
    end_column: usize,
}

struct Term {
    coeff: Complex64,
    k: u32,
    l: u32,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|c| c.0)
    }

    fn column(&self) -> usize {
        self.chars.get(self.pos).map_or(self.end_column, |c| c.1)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { column: self.column(), message: message.into() }
    }

    fn unexpected(&self) -> ParseError {
        match self.peek() {
            Some(c) => self.error(format!("unexpected character {c:?}")),
            None => self.error("unexpected end of input"),
        }
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Some(c) if c.is_ascii_digit() || matches!(c, '.' | 'z' | 'w' | 'i'))
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        let start = self.column();
        let mut text = String::new();
        while let Some(c) = self.peek().filter(|c| c.is_ascii_digit() || *c == '.') {
            text.push(c);
            self.pos += 1;
        }
        if !text.chars().any(|c| c.is_ascii_digit()) || text.matches('.').count() > 1 {
            return Err(ParseError { column: start, message: format!("malformed number {text:?}") });
        }
        text.parse().map_err(|_| ParseError { column: start, message: format!("malformed number {text:?}") })
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        if self.peek() != Some('^') {
            return Ok(1);
        }
        self.pos += 1;
        if self.peek() == Some('-') {
            return Err(self.error("negative exponents are not allowed"));
        }
        let start = self.column();
        let mut text = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            text.push(c);
            self.pos += 1;
        }
        if text.is_empty() {
            return Err(self.error("expected an exponent"));
        }
        text.parse().map_err(|_| ParseError { column: start, message: "exponent too large".into() })
    }

    fn factor(&mut self, t: &mut Term) -> Result<(), ParseError> {
        let c = self.peek().ok_or_else(|| self.unexpected())?;
        let column = self.column();
        let overflow = || ParseError { column, message: "exponent too large".into() };
        match c {
            'z' | 'w' | 'i' => {
                self.pos += 1;
                let e = self.exponent()?;
                match c {
                    'z' => t.k = t.k.checked_add(e).ok_or_else(overflow)?,
                    'w' => t.l = t.l.checked_add(e).ok_or_else(overflow)?,
                    _ => t.coeff *= Complex64::i().powu(e % 4),
                }
            }
            _ if c.is_ascii_digit() || c == '.' => t.coeff *= self.number()?,
            _ => return Err(self.unexpected()),
        }
        Ok(())
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut t = Term { coeff: Complex64::new(1.0, 0.0), k: 0, l: 0 };
        self.factor(&mut t)?;
        loop {
            if self.peek() == Some('*') {
                self.pos += 1;
                self.factor(&mut t)?;
            } else if self.starts_factor() {
                self.factor(&mut t)?;
            } else {
                return Ok(t);
            }
        }
    }
}

/// Parses a polynomial in `z`, `w` and `i`. Whitespace is ignored entirely,
/// so `1 2` reads as `12`.
pub fn parse_poly(source: &str) -> Result<PolyExpr, ParseError> {
    let chars: Vec<(char, usize)> =
        source.chars().enumerate().filter(|(_, c)| !c.is_whitespace()).map(|(i, c)| (c, i + 1)).collect();
    let mut p = Parser { chars, pos: 0, end_column: source.chars().count() + 1 };
    if p.peek().is_none() {
        return Err(ParseError { column: 1, message: "empty expression".into() });
    }
    let mut terms = Vec::new();
    let mut first = true;
    while p.peek().is_some() {
        let sign = match p.peek() {
            Some('+') => {
                p.pos += 1;
                1.0
            }
            Some('-') => {
                p.pos += 1;
                -1.0
            }
            _ if first => 1.0,
            _ => return Err(p.unexpected()),
        };
        let t = p.term()?;
        terms.push(((t.k, t.l), t.coeff * sign));
        first = false;
    }
    Ok(PolyExpr { source: source.to_string(), parsed: BivarPoly::new(terms) })
}

fn monomial(k: u32, l: u32) -> Vec<String> {
    let var = |name: &str, e: u32| match e {
        0 => None,
        1 => Some(name.to_string()),
        _ => Some(format!("{name}^{e}")),
    };
    var("z", k).into_iter().chain(var("w", l)).collect()
}

/// Canonical text: terms by decreasing `(k, l)`, real part before imaginary
/// part. `parse_poly(render(p))` reproduces every coefficient exactly.
pub fn render(p: &BivarPoly) -> String {
    let mut out = String::new();
    for (&(k, l), c) in p.coeffs().iter().rev() {
        for (value, imaginary) in [(c.re, false), (c.im, true)] {
            if value == 0.0 {
                continue;
            }
            let mut factors = Vec::new();
            let mono = monomial(k, l);
            if value.abs() != 1.0 || (mono.is_empty() && !imaginary) {
                factors.push(format!("{}", value.abs()));
            }
            if imaginary {
                factors.push("i".to_string());
            }
            factors.extend(mono);
            let sign = if value < 0.0 { "-" } else { "+" };
            if out.is_empty() {
                if value < 0.0 {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            out.push_str(&factors.join("*"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
