//! Angle expressions: numbers, `pi`, `+ - * /` and parentheses.

use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Pi,
    Op(char),
    Open,
    Close,
}

fn lex(src: &str) -> Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' | '*' | '/' => {
                out.push(Tok::Op(c));
                i += 1;
            }
            '-' | '\u{2212}' => {
                out.push(Tok::Op('-'));
                i += 1;
            }
            '(' => {
                out.push(Tok::Open);
                i += 1;
            }
            ')' => {
                out.push(Tok::Close);
                i += 1;
            }
            '\u{3c0}' => {
                out.push(Tok::Pi);
                i += 1;
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphabetic() {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                if !word.eq_ignore_ascii_case("pi") {
                    return Err(format!("unknown name `{word}`"));
                }
                out.push(Tok::Pi);
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                // exponent such as 1e-3
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let v = text.parse().map_err(|_| format!("bad number `{text}`"))?;
                out.push(Tok::Num(v));
            }
            other => return Err(format!("unexpected character `{other}`")),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<f64, String> {
        let mut v = self.term()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            v = if op == '+' { v + rhs } else { v - rhs };
        }
        Ok(v)
    }

    fn term(&mut self) -> Result<f64, String> {
        let mut v = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Op(op @ ('*' | '/'))) => {
                    let op = *op;
                    self.pos += 1;
                    let rhs = self.factor()?;
                    v = if op == '*' { v * rhs } else { v / rhs };
                }
                // implicit product: `3pi`, `2(pi/8)`
                Some(Tok::Pi | Tok::Open) => v *= self.factor()?,
                _ => return Ok(v),
            }
        }
    }

    fn factor(&mut self) -> Result<f64, String> {
        match self.next() {
            Some(Tok::Op('-')) => Ok(-self.factor()?),
            Some(Tok::Op('+')) => self.factor(),
            Some(Tok::Num(v)) => Ok(v),
            Some(Tok::Pi) => Ok(PI),
            Some(Tok::Open) => {
                let v = self.expr()?;
                match self.next() {
                    Some(Tok::Close) => Ok(v),
                    _ => Err("missing `)`".into()),
                }
            }
            Some(t) => Err(format!("unexpected {t:?}")),
            None => Err("unexpected end of expression".into()),
        }
    }
}

/// Evaluates an angle expression such as `3*pi/8` to radians.
pub fn parse_angle(src: &str) -> Result<f64, String> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err("empty angle expression".into());
    }
    let mut p = Parser { toks, pos: 0 };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(format!("trailing input in `{src}`"));
    }
    if !v.is_finite() {
        return Err(format!("`{src}` is not a finite angle"));
    }
    Ok(v)
}

/// Expands `start:end:step` into the points `start + k·step` up to `end`
/// inclusive.
pub fn parse_grid(src: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = src.split(':').collect();
    let [start, end, step] = parts[..] else {
        return Err(format!("grid `{src}` is not of the form start:end:step"));
    };
    let (start, end, step) = (parse_angle(start)?, parse_angle(end)?, parse_angle(step)?);
    if step <= 0.0 {
        return Err("grid step must be positive".into());
    }
    if end < start {
        return Err("grid end lies before its start".into());
    }
    let span = (end - start) / step;
    let n = (span + 1e-9).floor() as usize;
    if n > 100_000 {
        return Err(format!("grid has {n} points"));
    }
    Ok((0..=n).map(|k| start + k as f64 * step).collect())
}

/// Parses `lo:hi` into a pair of plain numbers.
pub fn parse_range(src: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = src.split_once(':').ok_or_else(|| format!("range `{src}` is not of the form lo:hi"))?;
    Ok((parse_angle(lo)?, parse_angle(hi)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_8, PI};

    #[test]
    fn evaluates_pi_expressions() {
        assert_eq!(parse_angle("pi/8").unwrap(), FRAC_PI_8);
        assert_eq!(parse_angle("3*pi/8").unwrap(), 3.0 * PI / 8.0);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert_eq!(parse_angle("-pi/4 + 1").unwrap(), -PI / 4.0 + 1.0);
        assert_eq!(parse_angle("(pi - 1) * 2").unwrap(), (PI - 1.0) * 2.0);
        assert_eq!(parse_angle("3pi/8").unwrap(), 3.0 * PI / 8.0);
        assert_eq!(parse_angle("π/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("1e-3").unwrap(), 1e-3);
        assert_eq!(parse_angle("2 - -1").unwrap(), 3.0);
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "pie", "1/0", "(pi", "pi)", "3 $", "1..2", "*2"] {
            assert!(parse_angle(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn grids() {
        let g = parse_grid("0:pi:pi/16").unwrap();
        assert_eq!(g.len(), 17);
        assert_eq!(g[16], PI);
        assert_eq!(parse_grid("0:0:1").unwrap(), vec![0.0]);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("1:0:0.1").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0.5:1.5").unwrap(), (0.5, 1.5));
        assert!(parse_range("0.5").is_err());
    }
}
