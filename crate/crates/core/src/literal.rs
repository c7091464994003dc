//! Parsers for the textual forms of fields, curves, groups, places and
//! function-field expressions.
//!
//! Grammar of expressions: integers, the variables `t` (on `P^1`) or `x`, `y`
//! (on an elliptic curve), the base-field generator `w`, `+ - * / ^`,
//! parentheses and juxtaposition (`2w`, `3t^2`).

use crate::error::{Error, Result};
use crate::finite_field::{FFElement, FieldExtension, Tower};
use crate::function_field::{Curve, FuncElement, Place};
use crate::poly::Poly;
use crate::semiabelian::SemiAbelian;

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Split at top-level occurrences of `sep` (outside brackets).
pub fn split_top(s: &str, sep: char) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' | '{' | '[' => depth += 1,
            ')' | '}' | ']' => depth -= 1,
            _ => {}
        }
        if ch == sep && depth == 0 {
            out.push(cur.trim().to_string());
            cur.clear();
        } else {
            cur.push(ch);
        }
    }
    out.push(cur.trim().to_string());
    out
}

/// Strip `head(` ... `)` and return the inside.
fn inside<'a>(s: &'a str, head: &str) -> Option<&'a str> {
    let s = s.trim();
    let rest = s.strip_prefix(head)?.trim_start();
    let rest = rest.strip_prefix('(')?;
    rest.strip_suffix(')')
}

fn parse_u64(s: &str) -> Result<u64> {
    s.trim().parse::<u64>().map_err(|_| perr(format!("expected a non-negative integer, got `{s}`")))
}

/// `GF(q)`, `GF(p^m)` (tower fields) or `GF(p^m; c_0,...,c_m)` (explicit
/// modulus, coefficients low to high).
pub fn parse_field(s: &str) -> Result<FieldExtension> {
    let body = inside(s, "GF").ok_or_else(|| perr(format!("expected GF(...), got `{s}`")))?;
    let mut parts = body.splitn(2, ';');
    let size = parts.next().unwrap_or("").trim();
    let modulus = parts.next();
    let (p, m) = match size.split_once('^') {
        Some((p, m)) => (parse_u64(p)?, parse_u64(m)? as usize),
        None => {
            let q = parse_u64(size)?;
            crate::arith::prime_power(q).ok_or(Error::NotPrime(q))?
        }
    };
    if !crate::arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if m == 0 {
        return Err(perr("field degree must be positive"));
    }
    match modulus {
        None => Tower::for_prime(p)?.field(m),
        Some(cs) => {
            let coeffs: Vec<u32> =
                cs.split(',').map(|c| parse_u64(c).map(|v| (v % p) as u32)).collect::<Result<_>>()?;
            if coeffs.len() != m + 1 {
                return Err(perr(format!("modulus of GF({p}^{m}) needs {} coefficients", m + 1)));
            }
            let tower = Tower::for_prime(p)?.field(m)?;
            if tower.modulus() == coeffs.as_slice() {
                return Ok(tower);
            }
            FieldExtension::new(p, &coeffs)
        }
    }
}

/// `P1(GF(q))` or `E(GF(q); a,b)` with `a`, `b` elements written in `w`.
pub fn parse_curve(s: &str) -> Result<Curve> {
    let s = s.trim();
    if let Some(body) = inside(s, "P1") {
        return Curve::rational_line(&parse_field(body)?);
    }
    if let Some(body) = inside(s, "E") {
        let (k, a, b) = parse_curve_body(body)?;
        return Curve::elliptic(&k, a, b);
    }
    Err(perr(format!("expected P1(...) or E(...), got `{s}`")))
}

fn parse_curve_body(body: &str) -> Result<(FieldExtension, FFElement, FFElement)> {
    let parts = split_top(body, ';');
    if parts.len() != 2 {
        return Err(perr(format!("expected `GF(..); a,b`, got `{body}`")));
    }
    let k = parse_field(&parts[0])?;
    let coeffs = split_top(&parts[1], ',');
    if coeffs.len() != 2 {
        return Err(perr("an elliptic curve needs two coefficients a,b"));
    }
    Ok((k.clone(), parse_element(&k, &coeffs[0])?, parse_element(&k, &coeffs[1])?))
}

/// A group over `k`: `Gm`, `Gm^n`, `E(GF(q); a,b)` or a product joined by ` x `.
pub fn parse_group(k: &FieldExtension, s: &str) -> Result<SemiAbelian> {
    let mut n = 0usize;
    let mut ell = None;
    for part in s.split(" x ").map(str::trim) {
        if part == "Gm" {
            n += 1;
        } else if let Some(e) = part.strip_prefix("Gm^") {
            n += parse_u64(e)? as usize;
        } else if let Some(body) = inside(part, "E") {
            if ell.is_some() {
                return Err(perr("at most one elliptic factor per group"));
            }
            let (kk, a, b) = parse_curve_body(body)?;
            if kk != *k {
                return Err(Error::Config(format!("group `{part}` is not defined over {}", k.literal())));
            }
            ell = Some((a, b));
        } else {
            return Err(perr(format!("unknown group `{part}`")));
        }
    }
    SemiAbelian::new(k, n, ell)
}

/// A place of `c`: `v(inf)`, `v(O)`, `v(pi)` for a monic irreducible `pi(t)`
/// on `P^1`, or `v(x0,y0)` for a rational point of an elliptic curve.
pub fn parse_place(c: &Curve, s: &str) -> Result<Place> {
    let body = inside(s, "v").ok_or_else(|| perr(format!("expected v(...), got `{s}`")))?.trim();
    match (body, c.is_elliptic()) {
        ("inf", false) => c.place_infinity(),
        ("O", true) => c.origin(),
        (_, false) => {
            let f = parse_function(c, body)?;
            if !f.a().is_polynomial() {
                return Err(perr("a place of P1 is given by a monic irreducible polynomial"));
            }
            c.place_finite(f.a().num())
        }
        (_, true) => {
            let xy = split_top(body, ',');
            if xy.len() != 2 {
                return Err(perr("a place of an elliptic curve is v(x0,y0) or v(O)"));
            }
            let k = c.base_field();
            c.place_at_point(k, parse_element(k, &xy[0])?, parse_element(k, &xy[1])?)
        }
    }
}

/// Entries of `{f_1,...,f_n}`.
pub fn parse_symbol_entries(s: &str) -> Result<Vec<String>> {
    let body = s
        .trim()
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| perr(format!("expected {{...}}, got `{s}`")))?;
    let parts = split_top(body, ',');
    if parts.iter().any(|p| p.is_empty()) {
        return Err(perr("empty symbol entry"));
    }
    Ok(parts)
}

pub fn parse_element(k: &FieldExtension, s: &str) -> Result<FFElement> {
    Parser::new(s, &FieldTarget(k))?.run()
}

pub fn parse_function(c: &Curve, s: &str) -> Result<FuncElement> {
    Parser::new(s, &CurveTarget(c))?.run()
}

/// Polynomial in `t` (or `x`) over the constants of `c`.
pub fn parse_poly(c: &Curve, s: &str) -> Result<Poly> {
    let f = parse_function(c, s)?;
    if !f.b().is_zero() || !f.a().is_polynomial() {
        return Err(perr(format!("`{s}` is not a polynomial")));
    }
    Ok(f.a().num().clone())
}

trait Target {
    type V: Clone;
    fn int(&self, n: i64) -> Self::V;
    fn var(&self, name: &str) -> Result<Self::V>;
    fn add(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn sub(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn mul(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn div(&self, a: &Self::V, b: &Self::V) -> Result<Self::V>;
    fn pow(&self, a: &Self::V, e: i64) -> Result<Self::V>;
}

fn generator_of(k: &FieldExtension) -> Result<FFElement> {
    if k.degree() < 2 {
        return Err(perr("`w` is only defined over non-prime fields"));
    }
    k.from_coeffs(&[0, 1])
}

struct FieldTarget<'a>(&'a FieldExtension);

impl Target for FieldTarget<'_> {
    type V = FFElement;
    fn int(&self, n: i64) -> FFElement {
        self.0.from_int(n)
    }
    fn var(&self, name: &str) -> Result<FFElement> {
        match name {
            "w" => generator_of(self.0),
            _ => Err(perr(format!("unknown symbol `{name}` in a field element"))),
        }
    }
    fn add(&self, a: &FFElement, b: &FFElement) -> FFElement {
        self.0.add(*a, *b)
    }
    fn sub(&self, a: &FFElement, b: &FFElement) -> FFElement {
        self.0.sub(*a, *b)
    }
    fn mul(&self, a: &FFElement, b: &FFElement) -> FFElement {
        self.0.mul(*a, *b)
    }
    fn div(&self, a: &FFElement, b: &FFElement) -> Result<FFElement> {
        self.0.div(*a, *b)
    }
    fn pow(&self, a: &FFElement, e: i64) -> Result<FFElement> {
        self.0.pow(*a, e)
    }
}

struct CurveTarget<'a>(&'a Curve);

impl Target for CurveTarget<'_> {
    type V = FuncElement;
    fn int(&self, n: i64) -> FuncElement {
        self.0.constant(self.0.base_field().from_int(n))
    }
    fn var(&self, name: &str) -> Result<FuncElement> {
        let c = self.0;
        match (name, c.is_elliptic()) {
            ("t", false) | ("x", true) => Ok(c.var()),
            ("y", true) => Ok(c.y()),
            ("w", _) => Ok(c.constant(generator_of(c.base_field())?)),
            _ => Err(perr(format!("unknown variable `{name}` on {}", c.literal()))),
        }
    }
    fn add(&self, a: &FuncElement, b: &FuncElement) -> FuncElement {
        self.0.add(a, b)
    }
    fn sub(&self, a: &FuncElement, b: &FuncElement) -> FuncElement {
        self.0.sub(a, b)
    }
    fn mul(&self, a: &FuncElement, b: &FuncElement) -> FuncElement {
        self.0.mul(a, b)
    }
    fn div(&self, a: &FuncElement, b: &FuncElement) -> Result<FuncElement> {
        self.0.div(a, b)
    }
    fn pow(&self, a: &FuncElement, e: i64) -> Result<FuncElement> {
        self.0.pow(a, e)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(i64),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < cs.len() {
        let ch = cs[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let txt: String = cs[st..i].iter().collect();
            out.push(Tok::Num(txt.parse().map_err(|_| perr(format!("integer `{txt}` too large")))?));
        } else if ch.is_ascii_alphabetic() {
            // identifiers are single letters so that `tw` reads as `t*w`
            out.push(Tok::Ident(ch.to_string()));
            i += 1;
        } else if "+-*/^()".contains(ch) {
            out.push(Tok::Op(ch));
            i += 1;
        } else {
            return Err(perr(format!("unexpected character `{ch}` in `{s}`")));
        }
    }
    if out.is_empty() {
        return Err(perr("empty expression"));
    }
    Ok(out)
}

struct Parser<'a, T: Target> {
    toks: Vec<Tok>,
    pos: usize,
    target: &'a T,
}

impl<'a, T: Target> Parser<'a, T> {
    fn new(s: &str, target: &'a T) -> Result<Self> {
        Ok(Parser { toks: lex(s)?, pos: 0, target })
    }

    fn run(mut self) -> Result<T::V> {
        let v = self.expr()?;
        if self.pos != self.toks.len() {
            return Err(perr(format!("trailing input at token {}", self.pos)));
        }
        Ok(v)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn expr(&mut self) -> Result<T::V> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { self.target.add(&acc, &rhs) } else { self.target.sub(&acc, &rhs) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<T::V> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().cloned() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = self.target.mul(&acc, &rhs);
                }
                Some(Tok::Op('/')) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = self.target.div(&acc, &rhs)?;
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Op('(')) => {
                    let rhs = self.power()?;
                    acc = self.target.mul(&acc, &rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<T::V> {
        if self.peek() == Some(&Tok::Op('-')) {
            self.pos += 1;
            let v = self.unary()?;
            return Ok(self.target.sub(&self.target.int(0), &v));
        }
        self.power()
    }

    fn power(&mut self) -> Result<T::V> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Op('^')) {
            self.pos += 1;
            let neg = if self.peek() == Some(&Tok::Op('-')) {
                self.pos += 1;
                true
            } else {
                false
            };
            let e = match self.toks.get(self.pos) {
                Some(Tok::Num(n)) => *n,
                _ => return Err(perr("exponent must be an integer")),
            };
            self.pos += 1;
            return self.target.pow(&base, if neg { -e } else { e });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<T::V> {
        let tok = self.toks.get(self.pos).cloned().ok_or_else(|| perr("unexpected end of expression"))?;
        self.pos += 1;
        match tok {
            Tok::Num(n) => Ok(self.target.int(n)),
            Tok::Ident(name) => self.target.var(&name),
            Tok::Op('(') => {
                let v = self.expr()?;
                if self.peek() != Some(&Tok::Op(')')) {
                    return Err(perr("missing `)`"));
                }
                self.pos += 1;
                Ok(v)
            }
            Tok::Op(c) => Err(perr(format!("unexpected `{c}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields_and_elements() {
        let k = parse_field("GF(9)").unwrap();
        assert_eq!((k.characteristic(), k.degree()), (3, 2));
        assert_eq!(parse_field("GF(3^2)").unwrap(), k);
        let w = parse_element(&k, "w").unwrap();
        assert_eq!(parse_element(&k, "w^2").unwrap(), k.mul(w, w));
        assert_eq!(parse_element(&k, "2w+1").unwrap(), k.add(k.mul(k.from_int(2), w), k.one()));
        let explicit = parse_field("GF(3^2; 1,0,1)").unwrap();
        assert_eq!(explicit.modulus(), &[1, 0, 1]);
        assert!(parse_field("GF(6)").is_err());
        assert!(parse_field("GF(5^2; 1,0)").is_err());
        let printed = parse_field(&explicit.literal()).unwrap();
        assert_eq!(printed.modulus(), explicit.modulus());
    }

    #[test]
    fn functions_places_symbols() {
        let c = parse_curve("P1(GF(5))").unwrap();
        let f = parse_function(&c, "1-t").unwrap();
        assert_eq!(f, c.sub(&c.one(), &c.var()));
        let g = parse_function(&c, "(t^2+2)/(t-1)").unwrap();
        assert_eq!(c.format(&g), parse_function(&c, &c.format(&g)).map(|h| c.format(&h)).unwrap());
        assert_eq!(parse_place(&c, "v(t^2+2)").unwrap().degree(), 2);
        assert!(parse_place(&c, "v(inf)").is_ok());
        assert_eq!(parse_symbol_entries("{t, (1-t)/(t+1)}").unwrap(), vec!["t", "(1-t)/(t+1)"]);
        let e = parse_curve("E(GF(5); 0,1)").unwrap();
        assert!(parse_function(&e, "y - x - 1").is_ok());
        assert_eq!(parse_place(&e, "v(0,1)").unwrap().degree(), 1);
        assert!(parse_place(&e, "v(1,1)").is_err());
        assert!(parse_function(&c, "y").is_err());
    }

    #[test]
    fn groups() {
        let k = parse_field("GF(5)").unwrap();
        let g = parse_group(&k, "Gm^2 x E(GF(5); 1,0)").unwrap();
        assert_eq!(g.torus_rank(), 2);
        assert!(g.has_elliptic());
        assert!(parse_group(&k, "E(GF(7); 1,0)").is_err());
        assert!(parse_group(&k, "Ga").is_err());
    }
}
