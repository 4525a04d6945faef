//! Expression trees over phase-space variables.
//!
//! Nodes are reference counted so that derivative trees can share the
//! subexpressions they were built from. Evaluation and differentiation memoize
//! shared nodes per call, which keeps repeated differentiation linear in the
//! size of the DAG rather than the size of the unfolded tree.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_complex::{Complex, Complex64};
use thiserror::Error;

use crate::scalar::Real;

/// Denominators below this magnitude are reported as a domain error.
pub const DENOMINATOR_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("quotient denominator vanishes (|d| = {0:e})")]
    ZeroDenominator(f64),
    #[error("fractional power {exponent} of negative base {base}")]
    NegativeBase { base: f64, exponent: f64 },
    #[error("negative power {exponent} of zero base")]
    ZeroBase { exponent: f64 },
    #[error("variable {0} is not defined at this point")]
    MissingVariable(Var),
    #[error("evaluation produced a non-finite value")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    /// Base (position) variable.
    X,
    /// Fiber (covector) variable.
    Xi,
}

/// A phase-space coordinate; `index` is zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub kind: VarKind,
    pub index: usize,
}

impl Var {
    pub fn x(index: usize) -> Self {
        Var {
            kind: VarKind::X,
            index,
        }
    }

    pub fn xi(index: usize) -> Self {
        Var {
            kind: VarKind::Xi,
            index,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            VarKind::X => write!(f, "x{}", self.index + 1),
            VarKind::Xi => write!(f, "xi{}", self.index + 1),
        }
    }
}

#[derive(Debug)]
pub enum Node {
    Const(Complex64),
    Var(Var),
    Add(Expr, Expr),
    Mul(Expr, Expr),
    Neg(Expr),
    Div(Expr, Expr),
    /// Real constant exponent.
    Pow(Expr, f64),
    Sin(Expr),
    Cos(Expr),
    Exp(Expr),
    Sqrt(Expr),
}

#[derive(Clone, Debug)]
pub struct Expr(Arc<Node>);

type Key = *const Node;

impl Expr {
    fn wrap(node: Node) -> Self {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    fn key(&self) -> Key {
        Arc::as_ptr(&self.0)
    }

    fn shared(&self) -> bool {
        Arc::strong_count(&self.0) > 1
    }

    pub fn constant(c: Complex64) -> Self {
        Expr::wrap(Node::Const(c))
    }

    pub fn real(r: f64) -> Self {
        Expr::constant(Complex64::new(r, 0.0))
    }

    pub fn zero() -> Self {
        Expr::real(0.0)
    }

    pub fn one() -> Self {
        Expr::real(1.0)
    }

    pub fn imag_unit() -> Self {
        Expr::constant(Complex64::i())
    }

    pub fn var(v: Var) -> Self {
        Expr::wrap(Node::Var(v))
    }

    pub fn x(index: usize) -> Self {
        Expr::var(Var::x(index))
    }

    pub fn xi(index: usize) -> Self {
        Expr::var(Var::xi(index))
    }

    /// `xi1^2 + ... + xin^2`
    pub fn xi_norm_sq(n: usize) -> Self {
        (0..n).fold(Expr::zero(), |acc, j| acc + Expr::xi(j).powf(2.0))
    }

    /// `|xi|` as `sqrt(xi1^2 + ... + xin^2)`.
    pub fn xi_norm(n: usize) -> Self {
        if n == 1 {
            return Expr::xi(0).powf(2.0).sqrt();
        }
        Expr::xi_norm_sq(n).sqrt()
    }

    pub fn as_const(&self) -> Option<Complex64> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    /// Structural zero (after constant folding), not a semantic test.
    pub fn is_literal_zero(&self) -> bool {
        self.as_const()
            .is_some_and(|c| c == Complex64::new(0.0, 0.0))
    }

    pub fn is_literal_one(&self) -> bool {
        self.as_const()
            .is_some_and(|c| c == Complex64::new(1.0, 0.0))
    }

    pub fn add(a: &Expr, b: &Expr) -> Expr {
        if a.is_literal_zero() {
            return b.clone();
        }
        if b.is_literal_zero() {
            return a.clone();
        }
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            return Expr::constant(x + y);
        }
        Expr::wrap(Node::Add(a.clone(), b.clone()))
    }

    pub fn sub(a: &Expr, b: &Expr) -> Expr {
        Expr::add(a, &b.neg_expr())
    }

    pub fn neg_expr(&self) -> Expr {
        match self.node() {
            Node::Const(c) => Expr::constant(-*c),
            Node::Neg(inner) => inner.clone(),
            _ => Expr::wrap(Node::Neg(self.clone())),
        }
    }

    pub fn mul(a: &Expr, b: &Expr) -> Expr {
        if a.is_literal_zero() || b.is_literal_zero() {
            return Expr::zero();
        }
        if a.is_literal_one() {
            return b.clone();
        }
        if b.is_literal_one() {
            return a.clone();
        }
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => return Expr::constant(x * y),
            (None, Some(_)) => return Expr::mul(b, a),
            (Some(x), None) => {
                if x == Complex64::new(-1.0, 0.0) {
                    return b.neg_expr();
                }
                if let Node::Mul(l, r) = b.node() {
                    if let Some(y) = l.as_const() {
                        return Expr::mul(&Expr::constant(x * y), r);
                    }
                }
            }
            _ => {}
        }
        Expr::wrap(Node::Mul(a.clone(), b.clone()))
    }

    pub fn div(a: &Expr, b: &Expr) -> Expr {
        if b.is_literal_one() {
            return a.clone();
        }
        if a.is_literal_zero() {
            return Expr::zero();
        }
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            if y.norm() >= DENOMINATOR_FLOOR {
                return Expr::constant(x / y);
            }
        }
        if let Some(y) = b.as_const() {
            if y.norm() >= DENOMINATOR_FLOOR {
                return Expr::mul(&Expr::constant(1.0 / y), a);
            }
        }
        Expr::wrap(Node::Div(a.clone(), b.clone()))
    }

    pub fn powf(&self, exponent: f64) -> Expr {
        if exponent == 0.0 {
            return Expr::one();
        }
        if exponent == 1.0 {
            return self.clone();
        }
        if let Some(c) = self.as_const() {
            if let Ok(v) = pow_complex(c, exponent) {
                return Expr::constant(v);
            }
        }
        Expr::wrap(Node::Pow(self.clone(), exponent))
    }

    pub fn sin(&self) -> Expr {
        match self.as_const() {
            Some(c) => Expr::constant(c.sin()),
            None => Expr::wrap(Node::Sin(self.clone())),
        }
    }

    pub fn cos(&self) -> Expr {
        match self.as_const() {
            Some(c) => Expr::constant(c.cos()),
            None => Expr::wrap(Node::Cos(self.clone())),
        }
    }

    pub fn exp(&self) -> Expr {
        match self.as_const() {
            Some(c) => Expr::constant(c.exp()),
            None => Expr::wrap(Node::Exp(self.clone())),
        }
    }

    pub fn sqrt(&self) -> Expr {
        if let Some(c) = self.as_const() {
            if let Ok(v) = pow_complex(c, 0.5) {
                return Expr::constant(v);
            }
        }
        Expr::wrap(Node::Sqrt(self.clone()))
    }

    pub fn scale(&self, c: Complex64) -> Expr {
        Expr::mul(&Expr::constant(c), self)
    }

    /// Evaluates the tree at the phase-space point `(x, xi)`.
    pub fn eval<T: Real>(&self, x: &[T], xi: &[T]) -> Result<Complex<T>, DomainError> {
        let mut memo = HashMap::new();
        let v = self.eval_memo(x, xi, &mut memo)?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(DomainError::NonFinite);
        }
        Ok(v)
    }

    fn eval_memo<T: Real>(
        &self,
        x: &[T],
        xi: &[T],
        memo: &mut HashMap<Key, Complex<T>>,
    ) -> Result<Complex<T>, DomainError> {
        let shared = self.shared();
        if shared {
            if let Some(v) = memo.get(&self.key()) {
                return Ok(*v);
            }
        }
        let v = match self.node() {
            Node::Const(c) => Complex::new(T::of(c.re), T::of(c.im)),
            Node::Var(var) => {
                let slot = match var.kind {
                    VarKind::X => x.get(var.index),
                    VarKind::Xi => xi.get(var.index),
                };
                Complex::new(*slot.ok_or(DomainError::MissingVariable(*var))?, T::zero())
            }
            Node::Add(a, b) => a.eval_memo(x, xi, memo)? + b.eval_memo(x, xi, memo)?,
            Node::Mul(a, b) => a.eval_memo(x, xi, memo)? * b.eval_memo(x, xi, memo)?,
            Node::Neg(a) => -a.eval_memo(x, xi, memo)?,
            Node::Div(a, b) => {
                let num = a.eval_memo(x, xi, memo)?;
                let den = b.eval_memo(x, xi, memo)?;
                let mag = den.norm().to_f64_lossy();
                if mag < DENOMINATOR_FLOOR {
                    return Err(DomainError::ZeroDenominator(mag));
                }
                num / den
            }
            Node::Pow(a, p) => pow_generic(a.eval_memo(x, xi, memo)?, *p)?,
            Node::Sqrt(a) => pow_generic(a.eval_memo(x, xi, memo)?, 0.5)?,
            Node::Sin(a) => a.eval_memo(x, xi, memo)?.sin(),
            Node::Cos(a) => a.eval_memo(x, xi, memo)?.cos(),
            Node::Exp(a) => a.eval_memo(x, xi, memo)?.exp(),
        };
        if shared {
            memo.insert(self.key(), v);
        }
        Ok(v)
    }

    /// Plain partial derivative with respect to `v`.
    pub fn diff(&self, v: Var) -> Expr {
        let mut memo = HashMap::new();
        self.diff_memo(v, &mut memo)
    }

    fn diff_memo(&self, v: Var, memo: &mut HashMap<Key, Expr>) -> Expr {
        let shared = self.shared();
        if shared {
            if let Some(d) = memo.get(&self.key()) {
                return d.clone();
            }
        }
        let d = match self.node() {
            Node::Const(_) => Expr::zero(),
            Node::Var(w) => {
                if *w == v {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Add(a, b) => Expr::add(&a.diff_memo(v, memo), &b.diff_memo(v, memo)),
            Node::Mul(a, b) => {
                let da = a.diff_memo(v, memo);
                let db = b.diff_memo(v, memo);
                Expr::add(&Expr::mul(&da, b), &Expr::mul(a, &db))
            }
            Node::Neg(a) => a.diff_memo(v, memo).neg_expr(),
            Node::Div(a, b) => {
                let da = a.diff_memo(v, memo);
                let db = b.diff_memo(v, memo);
                if db.is_literal_zero() {
                    Expr::div(&da, b)
                } else {
                    // (a/b)' = (a' - (a/b) b') / b keeps the quotient shared
                    Expr::div(&Expr::sub(&da, &Expr::mul(self, &db)), b)
                }
            }
            Node::Pow(a, p) => {
                let da = a.diff_memo(v, memo);
                if da.is_literal_zero() {
                    Expr::zero()
                } else {
                    Expr::mul(&Expr::mul(&Expr::real(*p), &a.powf(p - 1.0)), &da)
                }
            }
            Node::Sqrt(a) => {
                let da = a.diff_memo(v, memo);
                if da.is_literal_zero() {
                    Expr::zero()
                } else {
                    Expr::div(&da, &Expr::mul(&Expr::real(2.0), self))
                }
            }
            Node::Sin(a) => Expr::mul(&a.cos(), &a.diff_memo(v, memo)),
            Node::Cos(a) => Expr::mul(&a.sin(), &a.diff_memo(v, memo)).neg_expr(),
            Node::Exp(a) => Expr::mul(self, &a.diff_memo(v, memo)),
        };
        if shared {
            memo.insert(self.key(), d.clone());
        }
        d
    }

    /// Complex conjugate; variables are real so only constants change.
    pub fn conjugate(&self) -> Expr {
        let mut memo = HashMap::new();
        self.map_memo(&mut memo, &|node| match node {
            Node::Const(c) => Some(Expr::constant(c.conj())),
            _ => None,
        })
    }

    /// Replaces variables by expressions. Missing entries leave the variable
    /// untouched.
    pub fn substitute(&self, x_map: Option<&[Expr]>, xi_map: Option<&[Expr]>) -> Expr {
        let mut memo = HashMap::new();
        self.map_memo(&mut memo, &|node| match node {
            Node::Var(v) => {
                let table = match v.kind {
                    VarKind::X => x_map,
                    VarKind::Xi => xi_map,
                };
                table.and_then(|t| t.get(v.index)).cloned()
            }
            _ => None,
        })
    }

    /// Rebuilds the tree bottom-up, replacing leaves for which `leaf` returns
    /// `Some`. Smart constructors re-fold constants on the way up.
    fn map_memo(
        &self,
        memo: &mut HashMap<Key, Expr>,
        leaf: &dyn Fn(&Node) -> Option<Expr>,
    ) -> Expr {
        if let Some(e) = memo.get(&self.key()) {
            return e.clone();
        }
        let out = if let Some(e) = leaf(self.node()) {
            e
        } else {
            match self.node() {
                Node::Const(_) | Node::Var(_) => self.clone(),
                Node::Add(a, b) => Expr::add(&a.map_memo(memo, leaf), &b.map_memo(memo, leaf)),
                Node::Mul(a, b) => Expr::mul(&a.map_memo(memo, leaf), &b.map_memo(memo, leaf)),
                Node::Neg(a) => a.map_memo(memo, leaf).neg_expr(),
                Node::Div(a, b) => Expr::div(&a.map_memo(memo, leaf), &b.map_memo(memo, leaf)),
                Node::Pow(a, p) => a.map_memo(memo, leaf).powf(*p),
                Node::Sqrt(a) => a.map_memo(memo, leaf).sqrt(),
                Node::Sin(a) => a.map_memo(memo, leaf).sin(),
                Node::Cos(a) => a.map_memo(memo, leaf).cos(),
                Node::Exp(a) => a.map_memo(memo, leaf).exp(),
            }
        };
        memo.insert(self.key(), out.clone());
        out
    }

    /// True when some variable of `kind` occurs in the tree.
    pub fn depends_on(&self, kind: VarKind) -> bool {
        let mut seen = HashMap::new();
        self.depends_memo(kind, &mut seen)
    }

    fn depends_memo(&self, kind: VarKind, seen: &mut HashMap<Key, bool>) -> bool {
        if let Some(b) = seen.get(&self.key()) {
            return *b;
        }
        let b = match self.node() {
            Node::Const(_) => false,
            Node::Var(v) => v.kind == kind,
            Node::Add(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.depends_memo(kind, seen) || b.depends_memo(kind, seen)
            }
            Node::Neg(a)
            | Node::Pow(a, _)
            | Node::Sqrt(a)
            | Node::Sin(a)
            | Node::Cos(a)
            | Node::Exp(a) => a.depends_memo(kind, seen),
        };
        seen.insert(self.key(), b);
        b
    }

    /// Largest variable index (zero-based) of the given kind, if any.
    pub fn max_index(&self, kind: VarKind) -> Option<usize> {
        match self.node() {
            Node::Const(_) => None,
            Node::Var(v) => (v.kind == kind).then_some(v.index),
            Node::Add(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                match (a.max_index(kind), b.max_index(kind)) {
                    (Some(p), Some(q)) => Some(p.max(q)),
                    (p, q) => p.or(q),
                }
            }
            Node::Neg(a)
            | Node::Pow(a, _)
            | Node::Sqrt(a)
            | Node::Sin(a)
            | Node::Cos(a)
            | Node::Exp(a) => a.max_index(kind),
        }
    }

    /// Number of distinct nodes in the DAG.
    pub fn node_count(&self) -> usize {
        fn walk(e: &Expr, seen: &mut std::collections::HashSet<Key>) {
            if !seen.insert(e.key()) {
                return;
            }
            match e.node() {
                Node::Const(_) | Node::Var(_) => {}
                Node::Add(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                    walk(a, seen);
                    walk(b, seen);
                }
                Node::Neg(a)
                | Node::Pow(a, _)
                | Node::Sqrt(a)
                | Node::Sin(a)
                | Node::Cos(a)
                | Node::Exp(a) => walk(a, seen),
            }
        }
        let mut seen = std::collections::HashSet::new();
        walk(self, &mut seen);
        seen.len()
    }

    /// Leaves of the top-level sum (through `Add` and `Neg`), used as the
    /// magnitude scale for semantic zero tests.
    pub fn summands(&self) -> Vec<Expr> {
        let mut out = Vec::new();
        fn walk(e: &Expr, out: &mut Vec<Expr>) {
            match e.node() {
                Node::Add(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Node::Neg(a) => walk(a, out),
                _ => out.push(e.clone()),
            }
        }
        walk(self, &mut out);
        out
    }
}

fn is_integer(p: f64) -> bool {
    p.fract() == 0.0 && p.abs() < 2f64.powi(30)
}

fn pow_complex(base: Complex64, p: f64) -> Result<Complex64, DomainError> {
    pow_generic(base, p)
}

fn pow_generic<T: Real>(base: Complex<T>, p: f64) -> Result<Complex<T>, DomainError> {
    let zero = base.re == T::zero() && base.im == T::zero();
    if is_integer(p) {
        if zero && p < 0.0 {
            return Err(DomainError::ZeroBase { exponent: p });
        }
        return Ok(base.powi(p as i32));
    }
    if zero {
        if p < 0.0 {
            return Err(DomainError::ZeroBase { exponent: p });
        }
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    let nearly_real = base.im.abs() <= T::of(1e-12) * base.re.abs();
    if nearly_real {
        if base.re < T::zero() {
            return Err(DomainError::NegativeBase {
                base: base.re.to_f64_lossy(),
                exponent: p,
            });
        }
        return Ok(Complex::new(base.re.powf(T::of(p)), T::zero()));
    }
    Ok(base.powf(T::of(p)))
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add(&self, &rhs)
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sub(&self, &rhs)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul(&self, &rhs)
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::div(&self, &rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.neg_expr()
    }
}

impl From<f64> for Expr {
    fn from(r: f64) -> Self {
        Expr::real(r)
    }
}

// Printing. The output is accepted by the symbol-file expression parser.

const PREC_ADD: u8 = 1;
const PREC_NEG: u8 = 2;
const PREC_MUL: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn fmt_real(r: f64) -> String {
    if r == r.trunc() && r.abs() < 1e15 {
        format!("{}", r as i64)
    } else {
        format!("{r}")
    }
}

fn const_text(c: Complex64) -> (String, u8) {
    match (c.re, c.im) {
        (re, 0.0) => {
            if re < 0.0 {
                (format!("-{}", fmt_real(-re)), PREC_NEG)
            } else {
                (fmt_real(re), PREC_ATOM)
            }
        }
        (0.0, im) => {
            let mag = im.abs();
            let body = if mag == 1.0 {
                "i".to_string()
            } else {
                format!("{}*i", fmt_real(mag))
            };
            let prec = if mag == 1.0 { PREC_ATOM } else { PREC_MUL };
            if im < 0.0 {
                (format!("-{body}"), PREC_NEG)
            } else {
                (body, prec)
            }
        }
        (re, im) => {
            let sign = if im < 0.0 { "-" } else { "+" };
            (
                format!("({}{}{}*i)", fmt_real(re), sign, fmt_real(im.abs())),
                PREC_ATOM,
            )
        }
    }
}

fn render(e: &Expr) -> (String, u8) {
    match e.node() {
        Node::Const(c) => const_text(*c),
        Node::Var(v) => (v.to_string(), PREC_ATOM),
        Node::Add(a, b) => {
            let left = wrap(a, PREC_ADD);
            match b.node() {
                Node::Neg(inner) => (format!("{left} - {}", wrap(inner, PREC_MUL)), PREC_ADD),
                Node::Const(c) if c.im == 0.0 && c.re < 0.0 => {
                    (format!("{left} - {}", fmt_real(-c.re)), PREC_ADD)
                }
                _ => (format!("{left} + {}", wrap(b, PREC_NEG)), PREC_ADD),
            }
        }
        Node::Neg(a) => (format!("-{}", wrap(a, PREC_MUL)), PREC_NEG),
        Node::Mul(a, b) => (
            format!("{}*{}", wrap(a, PREC_MUL), wrap(b, PREC_POW)),
            PREC_MUL,
        ),
        Node::Div(a, b) => (
            format!("{}/{}", wrap(a, PREC_MUL), wrap(b, PREC_POW)),
            PREC_MUL,
        ),
        Node::Pow(a, p) => {
            let exp = if *p < 0.0 {
                format!("({})", fmt_real(*p))
            } else {
                fmt_real(*p)
            };
            (format!("{}^{exp}", wrap(a, PREC_ATOM)), PREC_POW)
        }
        Node::Sqrt(a) => (format!("sqrt({})", render(a).0), PREC_ATOM),
        Node::Sin(a) => (format!("sin({})", render(a).0), PREC_ATOM),
        Node::Cos(a) => (format!("cos({})", render(a).0), PREC_ATOM),
        Node::Exp(a) => (format!("exp({})", render(a).0), PREC_ATOM),
    }
}

fn wrap(e: &Expr, min_prec: u8) -> String {
    let (s, p) = render(e);
    if p < min_prec {
        format!("({s})")
    } else {
        s
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self).0)
    }
}
