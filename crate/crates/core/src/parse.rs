//! Convenience parser for polynomials written as text, e.g. `1 - 0.5z + 2i*z^2`
//! or `(1+2i)*z^3`.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! poly    := term (('+' | '-') term)*
//! term    := coeff ['*'] ['z' ['^' int]] | 'z' ['^' int]
//! coeff   := real ['i'] | 'i' | '(' complex ')'
//! complex := ['-'] real ['i'] [('+' | '-') real ['i']]
//! ```

use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::Poly;

impl FromStr for Poly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_poly(s)
    }
}

pub fn parse_poly(s: &str) -> Result<Poly> {
    let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut p = Parser { chars, pos: 0 };
    let mut coeffs: Vec<Complex64> = Vec::new();
    let mut sign = 1.0;
    if let Some(c) = p.peek() {
        if c == '-' || c == '+' {
            sign = if c == '-' { -1.0 } else { 1.0 };
            p.pos += 1;
        }
    }
    loop {
        let (c, k) = p.term()?;
        if coeffs.len() <= k {
            coeffs.resize(k + 1, Complex64::new(0.0, 0.0));
        }
        coeffs[k] += c * sign;
        match p.peek() {
            None => break,
            Some('+') => sign = 1.0,
            Some('-') => sign = -1.0,
            Some(c) => return Err(p.error(&format!("unexpected '{c}'"))),
        }
        p.pos += 1;
    }
    Ok(Poly::new(coeffs))
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at position {}", self.pos))
    }

    fn term(&mut self) -> Result<(Complex64, usize)> {
        let coeff = match self.peek() {
            Some('z') => Complex64::new(1.0, 0.0),
            Some('(') => {
                self.pos += 1;
                let c = self.complex()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                c
            }
            Some(_) => self.imaginary_or_real()?,
            None => return Err(self.error("expected a term")),
        };
        if self.peek() == Some('*') {
            self.pos += 1;
            if self.peek() != Some('z') {
                return Err(self.error("expected 'z' after '*'"));
            }
        }
        if self.peek() != Some('z') {
            return Ok((coeff, 0));
        }
        self.pos += 1;
        if self.peek() != Some('^') {
            return Ok((coeff, 1));
        }
        self.pos += 1;
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let exp: String = self.chars[start..self.pos].iter().collect();
        let k = exp
            .parse::<usize>()
            .map_err(|_| self.error("expected an exponent"))?;
        Ok((coeff, k))
    }

    fn complex(&mut self) -> Result<Complex64> {
        let mut sign = 1.0;
        if self.peek() == Some('-') {
            sign = -1.0;
            self.pos += 1;
        } else if self.peek() == Some('+') {
            self.pos += 1;
        }
        let mut total = self.imaginary_or_real()? * sign;
        if let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let s = if c == '-' { -1.0 } else { 1.0 };
            total += self.imaginary_or_real()? * s;
        }
        Ok(total)
    }

    fn imaginary_or_real(&mut self) -> Result<Complex64> {
        if self.peek() == Some('i') {
            self.pos += 1;
            return Ok(Complex64::new(0.0, 1.0));
        }
        let x = self.real()?;
        if self.peek() == Some('i') {
            self.pos += 1;
            Ok(Complex64::new(0.0, x))
        } else {
            Ok(Complex64::new(x, 0.0))
        }
    }

    fn real(&mut self) -> Result<f64> {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_digit() || c == '.')
        {
            self.pos += 1;
        }
        // exponent, e.g. 1e-3
        if self.peek().is_some_and(|c| c == 'e' || c == 'E') {
            let save = self.pos;
            self.pos += 1;
            if self.peek().is_some_and(|c| c == '-' || c == '+') {
                self.pos += 1;
            }
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                self.pos = save;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<f64>()
            .map_err(|_| self.error("expected a number"))
    }
}
