//! Text formats: expressions, symbol documents, coordinate-map documents and
//! degree-tagged reports.
//!
//! ```text
//! symbol P {
//!   dim=2 order=2 trunc=4
//!   term 2: "xi1^2 + (1+0.5*sin(x1))*xi2^2"
//! }
//!
//! map chi {
//!   dim=1
//!   forward: "2*x1"
//!   inverse: "x1/2"
//! }
//! ```
//!
//! Expressions use `x1..x9`, `xi1..xi9`, numeric literals, `i`, the binary
//! operators `+ - * / ^`, unary minus, `sin cos exp sqrt` and `|xi|`.
//! Exponents must be real constants.

use std::fmt::Write as _;

use thiserror::Error;

use crate::symbolic::{ClassicalSymbol, Diffeo, Expr, HomogeneousTerm, SymbolError, DEGREE_TOL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        column: usize,
        expected: String,
        found: String,
    },
    #[error("term of degree {degree} is not homogeneous (Euler residual {residual:e})")]
    Homogeneity { degree: f64, residual: f64 },
    #[error("degree error: {0}")]
    DegreeOrder(String),
    #[error(transparent)]
    Symbol(SymbolError),
}

impl From<SymbolError> for ParseError {
    fn from(e: SymbolError) -> Self {
        match e {
            SymbolError::NotHomogeneous { degree, residual } => {
                ParseError::Homogeneity { degree, residual }
            }
            SymbolError::DegreeAboveOrder { degree, order } => {
                ParseError::DegreeOrder(format!("term degree {degree} exceeds order {order}"))
            }
            other => ParseError::Symbol(other),
        }
    }
}

/// Line and column (both 1-based, columns in characters) of a byte offset.
fn locate(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Str(String),
    AbsXi,
    Punct(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::AbsXi => "'|xi|'".into(),
            Tok::Punct(c) => format!("'{c}'"),
            Tok::End => "end of input".into(),
        }
    }
}

/// Tokens with byte offsets. Quoted strings and `#` comments exist only in
/// documents, `|xi|` only in expressions.
fn lex(text: &str, base: usize, document: bool) -> Result<Vec<(Tok, usize)>, (usize, String)> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if document && c == '#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
        } else if c.is_ascii_digit()
            || (c == '.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit))
        {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s = &text[start..i];
            let v: f64 = s
                .parse()
                .map_err(|_| (base + start, format!("number '{s}'")))?;
            out.push((Tok::Num(v), base + start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), base + start));
        } else if document && c == '"' {
            let start = i;
            i += 1;
            while i < bytes.len() && bytes[i] != b'"' {
                i += 1;
            }
            if i == bytes.len() {
                return Err((base + start, "unterminated string".into()));
            }
            out.push((Tok::Str(text[start + 1..i].to_string()), base + start + 1));
            i += 1;
        } else if !document && text[i..].starts_with("|xi|") {
            out.push((Tok::AbsXi, base + i));
            i += 4;
        } else if "+-*/^(),{}=:".contains(c) {
            out.push((Tok::Punct(c), base + i));
            i += 1;
        } else {
            let ch = text[i..].chars().next().unwrap_or(c);
            return Err((base + i, format!("character '{ch}'")));
        }
    }
    out.push((Tok::End, base + text.len()));
    Ok(out)
}

struct Cursor<'a> {
    source: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn next(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        let (tok, offset) = &self.toks[self.pos];
        let (line, column) = locate(self.source, *offset);
        ParseError::Syntax {
            line,
            column,
            expected: expected.into(),
            found: tok.describe(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Punct(c) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("'{c}'")))
        }
    }
}

fn lex_error(source: &str, (offset, found): (usize, String)) -> ParseError {
    let (line, column) = locate(source, offset);
    ParseError::Syntax {
        line,
        column,
        expected: "a token".into(),
        found,
    }
}

struct ExprParser<'a> {
    cur: Cursor<'a>,
    dim: usize,
}

impl ExprParser<'_> {
    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.product()?;
        loop {
            if self.cur.eat('+') {
                acc = Expr::add(&acc, &self.product()?);
            } else if self.cur.eat('-') {
                acc = Expr::sub(&acc, &self.product()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.cur.eat('*') {
                acc = Expr::mul(&acc, &self.unary()?);
            } else if self.cur.eat('/') {
                acc = Expr::div(&acc, &self.unary()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.cur.eat('-') {
            return Ok(self.unary()?.neg_expr());
        }
        if self.cur.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if !self.cur.eat('^') {
            return Ok(base);
        }
        let at = self.cur.pos;
        let exponent = self.unary()?;
        match exponent.as_const() {
            Some(c) if c.im == 0.0 => Ok(base.powf(c.re)),
            _ => {
                self.cur.pos = at;
                Err(self.cur.error("a real constant exponent"))
            }
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (tok, _) = self.cur.toks[self.cur.pos].clone();
        match tok {
            Tok::Num(v) => {
                self.cur.next();
                Ok(Expr::real(v))
            }
            Tok::AbsXi => {
                self.cur.next();
                Ok(Expr::xi_norm(self.dim))
            }
            Tok::Punct('(') => {
                self.cur.next();
                let e = self.sum()?;
                self.cur.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(f) = function(&name) {
                    self.cur.next();
                    self.cur.expect('(')?;
                    let arg = self.sum()?;
                    self.cur.expect(')')?;
                    return Ok(f(&arg));
                }
                if name == "i" {
                    self.cur.next();
                    return Ok(Expr::imag_unit());
                }
                match variable(&name) {
                    Some(e) => {
                        self.cur.next();
                        Ok(e)
                    }
                    None => Err(self
                        .cur
                        .error("x1..x9, xi1..xi9, i, a function or a number")),
                }
            }
            _ => Err(self.cur.error("an operand")),
        }
    }
}

fn function(name: &str) -> Option<fn(&Expr) -> Expr> {
    match name {
        "sin" => Some(Expr::sin),
        "cos" => Some(Expr::cos),
        "exp" => Some(Expr::exp),
        "sqrt" => Some(Expr::sqrt),
        _ => None,
    }
}

fn variable(name: &str) -> Option<Expr> {
    let (digits, make): (&str, fn(usize) -> Expr) = match name.strip_prefix("xi") {
        Some(d) => (d, Expr::xi),
        None => (name.strip_prefix('x')?, Expr::x),
    };
    match digits.parse::<usize>() {
        Ok(k) if (1..=9).contains(&k) && digits.len() == 1 => Some(make(k - 1)),
        _ => None,
    }
}

/// Parses one expression; `|xi|` expands with `dim` frequency variables.
pub fn parse_expr(text: &str, dim: usize) -> Result<Expr, ParseError> {
    parse_expr_at(text, text, 0, dim)
}

/// Parses `text`, which sits at byte `base` of `source`, so errors point
/// into `source`.
fn parse_expr_at(source: &str, text: &str, base: usize, dim: usize) -> Result<Expr, ParseError> {
    let toks = lex(text, base, false).map_err(|e| lex_error(source, e))?;
    let mut p = ExprParser {
        cur: Cursor {
            source,
            toks,
            pos: 0,
        },
        dim,
    };
    let e = p.sum()?;
    if *p.cur.peek() != Tok::End {
        return Err(p.cur.error("an operator or end of expression"));
    }
    Ok(e)
}

/// A parsed symbol file.
#[derive(Debug, Clone)]
pub struct SymbolDocument {
    pub name: String,
    pub dim: usize,
    pub order: f64,
    pub truncation: usize,
    /// `(degree, expression text)` in file order.
    pub terms: Vec<(f64, String)>,
    pub symbol: ClassicalSymbol,
}

fn doc_cursor(text: &str) -> Result<Cursor<'_>, ParseError> {
    let toks = lex(text, 0, true).map_err(|e| lex_error(text, e))?;
    Ok(Cursor {
        source: text,
        toks,
        pos: 0,
    })
}

fn keyword(cur: &mut Cursor<'_>, word: &str) -> Result<(), ParseError> {
    match cur.peek() {
        Tok::Ident(s) if s == word => {
            cur.next();
            Ok(())
        }
        _ => Err(cur.error(&format!("'{word}'"))),
    }
}

fn name(cur: &mut Cursor<'_>) -> Result<String, ParseError> {
    match cur.peek().clone() {
        Tok::Ident(s) => {
            cur.next();
            Ok(s)
        }
        _ => Err(cur.error("a name")),
    }
}

/// `[-]number[/number]`
fn signed_number(cur: &mut Cursor<'_>) -> Result<f64, ParseError> {
    let neg = cur.eat('-');
    let mut v = match cur.peek() {
        Tok::Num(v) => *v,
        _ => return Err(cur.error("a number")),
    };
    cur.next();
    if cur.eat('/') {
        match cur.peek() {
            Tok::Num(d) if *d != 0.0 => {
                v /= *d;
                cur.next();
            }
            _ => return Err(cur.error("a nonzero denominator")),
        }
    }
    Ok(if neg { -v } else { v })
}

fn count(cur: &mut Cursor<'_>, what: &str) -> Result<usize, ParseError> {
    match cur.peek() {
        Tok::Num(v) if *v >= 0.0 && v.fract() == 0.0 => {
            let v = *v as usize;
            cur.next();
            Ok(v)
        }
        _ => Err(cur.error(what)),
    }
}

fn string(cur: &mut Cursor<'_>) -> Result<(String, usize), ParseError> {
    match cur.peek().clone() {
        Tok::Str(s) => {
            let at = cur.toks[cur.pos].1;
            cur.next();
            Ok((s, at))
        }
        _ => Err(cur.error("a quoted expression")),
    }
}

/// Parses and validates a symbol document. Every term is checked against
/// Euler's relation at its declared degree.
pub fn parse_symbol_document(text: &str) -> Result<SymbolDocument, ParseError> {
    let mut cur = doc_cursor(text)?;
    keyword(&mut cur, "symbol")?;
    let name = name(&mut cur)?;
    cur.expect('{')?;
    let (mut dim, mut order, mut truncation) = (None, None, None);
    let mut raw: Vec<(f64, String, usize)> = Vec::new();
    loop {
        match cur.peek().clone() {
            Tok::Punct('}') => {
                cur.next();
                break;
            }
            Tok::Ident(key) if key == "term" => {
                cur.next();
                let degree = signed_number(&mut cur)?;
                cur.expect(':')?;
                let (body, at) = string(&mut cur)?;
                raw.push((degree, body, at));
            }
            Tok::Ident(key) if ["dim", "order", "trunc"].contains(&key.as_str()) => {
                cur.next();
                cur.expect('=')?;
                match key.as_str() {
                    "dim" => dim = Some(count(&mut cur, "a dimension")?),
                    "trunc" => truncation = Some(count(&mut cur, "a truncation order")?),
                    _ => order = Some(signed_number(&mut cur)?),
                }
            }
            _ => return Err(cur.error("'dim', 'order', 'trunc', 'term' or '}'")),
        }
    }
    if *cur.peek() != Tok::End {
        return Err(cur.error("end of document"));
    }
    let dim = dim.ok_or_else(|| cur.error("a 'dim=' entry"))?;
    let truncation = truncation.ok_or_else(|| cur.error("a 'trunc=' entry"))?;
    let order = match (order, raw.first()) {
        (Some(m), _) => m,
        (None, Some(t)) => t.0,
        (None, None) => return Err(cur.error("an 'order=' entry for a symbol without terms")),
    };
    if truncation == 0 {
        return Err(ParseError::DegreeOrder("trunc must be positive".into()));
    }
    let floor = order - truncation as f64;
    let mut terms = Vec::with_capacity(raw.len());
    for (idx, (degree, body, at)) in raw.iter().enumerate() {
        if idx > 0 && *degree >= raw[idx - 1].0 - DEGREE_TOL {
            return Err(ParseError::DegreeOrder(format!(
                "degrees must strictly decrease ({} follows {})",
                degree,
                raw[idx - 1].0
            )));
        }
        if *degree <= floor + DEGREE_TOL {
            return Err(ParseError::DegreeOrder(format!(
                "degree {degree} is not above order - trunc = {floor}"
            )));
        }
        let expr = parse_expr_at(text, body, *at, dim)?;
        terms.push(HomogeneousTerm::new(expr, *degree, dim)?);
    }
    let symbol = ClassicalSymbol::new(order, truncation, dim, terms)?;
    Ok(SymbolDocument {
        name,
        dim,
        order,
        truncation,
        terms: raw.into_iter().map(|(d, s, _)| (d, s)).collect(),
        symbol,
    })
}

pub fn parse_symbol_text(text: &str) -> Result<ClassicalSymbol, ParseError> {
    Ok(parse_symbol_document(text)?.symbol)
}

/// Symbol document text that [`parse_symbol_text`] reads back.
pub fn symbol_text(name: &str, p: &ClassicalSymbol) -> String {
    let mut out = format!(
        "symbol {name} {{\n  dim={} order={} trunc={}\n",
        p.dim(),
        p.order(),
        p.truncation()
    );
    for t in p.terms() {
        let _ = writeln!(out, "  term {}: \"{}\"", t.degree(), t.expr());
    }
    out.push_str("}\n");
    out
}

/// One `degree <d>: <expression>` line per term.
pub fn report_text(p: &ClassicalSymbol) -> String {
    p.terms()
        .iter()
        .map(|t| format!("degree {}: {}\n", t.degree(), t.expr()))
        .collect()
}

/// Reads [`report_text`] output back as `(degree, expression)` pairs.
pub fn parse_report(text: &str, dim: usize) -> Result<Vec<(f64, Expr)>, ParseError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let body = line.trim_end();
        let start = offset;
        offset += line.len();
        if body.trim().is_empty() || body.trim_start().starts_with('#') {
            continue;
        }
        let syntax = |col: usize, expected: &str| {
            let (line, column) = locate(text, start + col);
            ParseError::Syntax {
                line,
                column,
                expected: expected.into(),
                found: body.to_string(),
            }
        };
        let rest = body
            .strip_prefix("degree ")
            .ok_or_else(|| syntax(0, "'degree <d>: <expr>'"))?;
        let colon = rest.find(':').ok_or_else(|| syntax(7, "':'"))?;
        let degree: f64 = rest[..colon]
            .trim()
            .parse()
            .map_err(|_| syntax(7, "a degree"))?;
        let expr_start = 7 + colon + 1;
        let expr = parse_expr_at(text, &body[expr_start..], start + expr_start, dim)?;
        out.push((degree, expr));
    }
    Ok(out)
}

/// Parses a `map` document into a validated [`Diffeo`].
pub fn parse_map_text(text: &str) -> Result<Diffeo, ParseError> {
    let mut cur = doc_cursor(text)?;
    keyword(&mut cur, "map")?;
    name(&mut cur)?;
    cur.expect('{')?;
    let mut dim = None;
    let mut parts: [Option<Vec<(String, usize)>>; 2] = [None, None];
    loop {
        match cur.peek().clone() {
            Tok::Punct('}') => {
                cur.next();
                break;
            }
            Tok::Ident(key) if key == "dim" => {
                cur.next();
                cur.expect('=')?;
                dim = Some(count(&mut cur, "a dimension")?);
            }
            Tok::Ident(key) if key == "forward" || key == "inverse" => {
                cur.next();
                cur.expect(':')?;
                let mut list = vec![string(&mut cur)?];
                while cur.eat(',') {
                    list.push(string(&mut cur)?);
                }
                parts[usize::from(key == "inverse")] = Some(list);
            }
            _ => return Err(cur.error("'dim', 'forward', 'inverse' or '}'")),
        }
    }
    if *cur.peek() != Tok::End {
        return Err(cur.error("end of document"));
    }
    let dim = dim.ok_or_else(|| cur.error("a 'dim=' entry"))?;
    let [Some(fwd), Some(inv)] = parts else {
        return Err(cur.error("both 'forward:' and 'inverse:' lists"));
    };
    let convert = |list: Vec<(String, usize)>| -> Result<Vec<Expr>, ParseError> {
        list.iter()
            .map(|(s, at)| parse_expr_at(text, s, *at, dim))
            .collect()
    };
    let (fwd, inv) = (convert(fwd)?, convert(inv)?);
    if fwd.len() != dim {
        return Err(SymbolError::DimensionMismatch {
            expected: dim,
            found: fwd.len(),
        }
        .into());
    }
    Ok(Diffeo::new(fwd, inv)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_unary_minus() {
        let e = parse_expr("-x1^2 + 2*x1*3 - 4/2", 1).unwrap();
        let v = e.eval(&[3.0f64], &[]).unwrap().re;
        assert_eq!(v, -9.0 + 18.0 - 2.0);
        let e = parse_expr("2^3^2", 1).unwrap();
        assert_eq!(e.eval::<f64>(&[], &[]).unwrap().re, 512.0);
        let e = parse_expr("x1^-2", 1).unwrap();
        assert_eq!(e.eval(&[2.0f64], &[]).unwrap().re, 0.25);
    }

    #[test]
    fn functions_imaginary_unit_and_norm() {
        let e = parse_expr("exp(i*x1) * |xi|", 2).unwrap();
        let v = e.eval(&[std::f64::consts::PI], &[3.0, 4.0]).unwrap();
        assert!((v.re + 5.0).abs() < 1e-14 && v.im.abs() < 1e-14);
        assert!(parse_expr("sqrt(xi1^2)", 1).is_ok());
        assert!(parse_expr("1.5e-3*x9", 9).is_ok());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_expr("xi1^^2", 1) {
            Err(ParseError::Syntax {
                line,
                column,
                found,
                ..
            }) => {
                assert_eq!((line, column), (1, 5));
                assert_eq!(found, "'^'");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_expr("x10", 1),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_expr("x1^x1", 1),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_expr("(x1", 1),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_expr("x1 $", 1),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn variable_laplacian_document() {
        let text = r#"symbol P { dim=2 order=2 trunc=4 term 2: "xi1^2 + (1+0.5*sin(x1))*xi2^2" }"#;
        let doc = parse_symbol_document(text).unwrap();
        assert_eq!(doc.name, "P");
        assert_eq!(doc.symbol.terms().len(), 1);
        assert_eq!(doc.symbol.order(), 2.0);
    }

    #[test]
    fn inhomogeneous_term_is_rejected() {
        let text = r#"symbol P { dim=1 trunc=2 term 1: "xi1 + 1" }"#;
        match parse_symbol_text(text) {
            Err(ParseError::Homogeneity { degree, residual }) => {
                assert_eq!(degree, 1.0);
                assert!((residual - 1.0).abs() < 1e-9, "{residual}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn document_errors() {
        let bad = r#"symbol P {
  dim=2 order=2 trunc=4
  term 2: "xi1^^2"
}"#;
        match parse_symbol_text(bad) {
            Err(ParseError::Syntax { line, column, .. }) => assert_eq!((line, column), (3, 16)),
            other => panic!("{other:?}"),
        }
        let order = r#"symbol P { dim=1 trunc=4 term 1: "xi1" term 2: "xi1^2" }"#;
        assert!(matches!(
            parse_symbol_text(order),
            Err(ParseError::DegreeOrder(_))
        ));
        let low = r#"symbol P { dim=1 trunc=1 term 1: "xi1" term 0: "x1" }"#;
        assert!(matches!(
            parse_symbol_text(low),
            Err(ParseError::DegreeOrder(_))
        ));
        let above = r#"symbol P { dim=1 order=0 trunc=1 term 1: "xi1" }"#;
        assert!(matches!(
            parse_symbol_text(above),
            Err(ParseError::DegreeOrder(_))
        ));
    }

    #[test]
    fn comments_fractions_and_round_trip() {
        let text = "# half-order example\nsymbol Q { dim=1 trunc=3\n  term 1/2: \"|xi|^0.5\"\n  term -1/2: \"x1*|xi|^(-0.5)\" }";
        let p = parse_symbol_text(text).unwrap();
        assert_eq!(p.order(), 0.5);
        let again = parse_symbol_text(&symbol_text("Q", &p)).unwrap();
        assert_eq!(again.terms().len(), 2);
        assert!(again.agrees_above(&p, f64::NEG_INFINITY).unwrap());
        let report = parse_report(&report_text(&p), 1).unwrap();
        assert_eq!(report.len(), 2);
        assert_eq!(report[1].0, -0.5);
    }

    #[test]
    fn map_document() {
        let text = r#"map chi { dim=2 forward: "x1 + x2", "x2" inverse: "x1 - x2", "x2" }"#;
        let d = parse_map_text(text).unwrap();
        assert_eq!(d.dim(), 2);
        let wrong = r#"map chi { dim=1 forward: "2*x1" inverse: "x1" }"#;
        assert!(matches!(
            parse_map_text(wrong),
            Err(ParseError::Symbol(SymbolError::InvalidDiffeo(_)))
        ));
    }
}
