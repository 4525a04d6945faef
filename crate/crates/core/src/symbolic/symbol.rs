use num_complex::Complex64;

use super::expr::{DomainError, Expr};
use super::term::HomogeneousTerm;
use super::SymbolError;

/// Degrees closer than this are treated as equal when merging terms.
pub const DEGREE_TOL: f64 = 1e-12;

/// Truncated classical symbol `p ~ Σ p_{m−j}` with remainder of degree `m − N`.
///
/// Terms are kept sorted by strictly decreasing degree; terms of equal degree
/// are merged by summation and terms at or below the remainder degree are
/// dropped.
#[derive(Debug, Clone)]
pub struct ClassicalSymbol {
    order: f64,
    truncation: usize,
    dim: usize,
    terms: Vec<HomogeneousTerm>,
}

impl ClassicalSymbol {
    pub fn new(
        order: f64,
        truncation: usize,
        dim: usize,
        terms: Vec<HomogeneousTerm>,
    ) -> Result<Self, SymbolError> {
        if truncation == 0 {
            return Err(SymbolError::InvalidTruncation);
        }
        for t in &terms {
            if t.dim() != dim {
                return Err(SymbolError::DimensionMismatch {
                    expected: dim,
                    found: t.dim(),
                });
            }
            if t.degree() > order + DEGREE_TOL {
                return Err(SymbolError::DegreeAboveOrder {
                    degree: t.degree(),
                    order,
                });
            }
        }
        Ok(ClassicalSymbol::assemble(order, truncation, dim, terms))
    }

    /// Internal constructor: merges, sorts and truncates without validation.
    pub(crate) fn assemble(
        order: f64,
        truncation: usize,
        dim: usize,
        terms: Vec<HomogeneousTerm>,
    ) -> Self {
        let floor = order - truncation as f64 + DEGREE_TOL;
        let mut merged: Vec<HomogeneousTerm> = Vec::new();
        for t in terms {
            if t.degree() <= floor {
                continue;
            }
            match merged
                .iter_mut()
                .find(|m| (m.degree() - t.degree()).abs() <= DEGREE_TOL)
            {
                Some(m) => *m = m.add_same_degree(&t),
                None => merged.push(t),
            }
        }
        merged.sort_by(|a, b| b.degree().total_cmp(&a.degree()));
        ClassicalSymbol {
            order,
            truncation,
            dim,
            terms: merged,
        }
    }

    /// The identity operator: total and principal symbol `1`.
    pub fn identity(dim: usize, truncation: usize) -> Self {
        ClassicalSymbol::assemble(
            0.0,
            truncation,
            dim,
            vec![HomogeneousTerm::constant(Complex64::new(1.0, 0.0), dim)],
        )
    }

    pub fn from_term(term: HomogeneousTerm, truncation: usize) -> Self {
        ClassicalSymbol::assemble(term.degree(), truncation, term.dim(), vec![term])
    }

    pub fn zero(order: f64, dim: usize, truncation: usize) -> Self {
        ClassicalSymbol::assemble(order, truncation, dim, Vec::new())
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[HomogeneousTerm] {
        &self.terms
    }

    /// Degree of the remainder, `m − N`.
    pub fn remainder_degree(&self) -> f64 {
        self.order - self.truncation as f64
    }

    pub fn degrees(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.degree()).collect()
    }

    pub fn term_at(&self, degree: f64) -> Option<&HomogeneousTerm> {
        self.terms
            .iter()
            .find(|t| (t.degree() - degree).abs() <= DEGREE_TOL)
    }

    pub fn term_or_zero(&self, degree: f64) -> HomogeneousTerm {
        self.term_at(degree)
            .cloned()
            .unwrap_or_else(|| HomogeneousTerm::zero(degree, self.dim))
    }

    pub fn with_truncation(&self, truncation: usize) -> Self {
        ClassicalSymbol::assemble(self.order, truncation, self.dim, self.terms.clone())
    }

    fn check_dim(&self, other: &ClassicalSymbol) -> Result<(), SymbolError> {
        if self.dim != other.dim {
            return Err(SymbolError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    /// Sum; the remainder is the larger of the two remainders.
    pub fn add(&self, other: &ClassicalSymbol) -> Result<Self, SymbolError> {
        self.check_dim(other)?;
        let order = self.order.max(other.order);
        let rem = self.remainder_degree().max(other.remainder_degree());
        let n = ((order - rem) - 1e-9).ceil().max(1.0) as usize;
        let terms = self
            .terms
            .iter()
            .chain(&other.terms)
            .filter(|t| t.degree() > rem + DEGREE_TOL)
            .cloned()
            .collect();
        Ok(ClassicalSymbol::assemble(order, n, self.dim, terms))
    }

    pub fn neg(&self) -> Self {
        self.map_terms(|t| t.neg())
    }

    pub fn sub(&self, other: &ClassicalSymbol) -> Result<Self, SymbolError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map_terms(|t| t.scale(c))
    }

    pub fn conjugate(&self) -> Self {
        self.map_terms(|t| t.conjugate())
    }

    fn map_terms(&self, f: impl Fn(&HomogeneousTerm) -> HomogeneousTerm) -> Self {
        ClassicalSymbol {
            order: self.order,
            truncation: self.truncation,
            dim: self.dim,
            terms: self.terms.iter().map(f).collect(),
        }
    }

    /// Pointwise (not operator) product of the two series, truncated at
    /// `min(N_P, N_Q)`.
    pub fn product(&self, other: &ClassicalSymbol) -> Result<Self, SymbolError> {
        self.check_dim(other)?;
        let order = self.order + other.order;
        let n = self.truncation.min(other.truncation);
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                if a.degree() + b.degree() > order - n as f64 + DEGREE_TOL {
                    terms.push(a.mul(b));
                }
            }
        }
        Ok(ClassicalSymbol::assemble(order, n, self.dim, terms))
    }

    /// Removes terms that are semantically zero.
    pub fn prune_zeros(&self) -> Result<Self, DomainError> {
        let mut terms = Vec::new();
        for t in &self.terms {
            if !t.is_zero()? {
                terms.push(t.clone());
            }
        }
        Ok(ClassicalSymbol {
            terms,
            ..self.clone()
        })
    }

    /// Partial sum of the retained terms at `(x, ξ)`.
    pub fn eval(&self, x: &[f64], xi: &[f64]) -> Result<Complex64, DomainError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            acc += t.eval(x, xi)?;
        }
        Ok(acc)
    }

    /// Termwise difference `self − other` at every degree present in either
    /// series and strictly above `floor`.
    pub fn termwise_difference(&self, other: &ClassicalSymbol, floor: f64) -> Vec<HomogeneousTerm> {
        let mut degrees: Vec<f64> = self.degrees();
        for d in other.degrees() {
            if !degrees.iter().any(|e| (e - d).abs() <= DEGREE_TOL) {
                degrees.push(d);
            }
        }
        degrees.retain(|d| *d > floor + DEGREE_TOL);
        degrees.sort_by(|a, b| b.total_cmp(a));
        degrees
            .into_iter()
            .map(|d| {
                HomogeneousTerm::from_parts(
                    Expr::sub(self.term_or_zero(d).expr(), other.term_or_zero(d).expr()),
                    d,
                    self.dim,
                )
            })
            .collect()
    }

    /// True when every term of `self − other` above `floor` passes the
    /// semantic zero test.
    pub fn agrees_above(&self, other: &ClassicalSymbol, floor: f64) -> Result<bool, DomainError> {
        for t in self.termwise_difference(other, floor) {
            if !t.is_zero()? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Generalized binomial coefficient `C(a, k)`.
pub fn binomial(a: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (a - j as f64) / (j + 1) as f64)
}

/// `|ξ|^p` as an expression; `p = 0` gives the constant `1`.
pub fn xi_norm_pow(n: usize, p: f64) -> Expr {
    if p == 0.0 {
        return Expr::one();
    }
    Expr::xi_norm_sq(n).powf(p / 2.0)
}

/// Classical expansion of `⟨ξ⟩^s = |ξ|^s (1 + |ξ|^{−2})^{s/2}`:
/// `Σ_{k < ⌈N/2⌉} C(s/2, k) |ξ|^{s−2k}`. Terms with vanishing binomial
/// coefficient are omitted, so even non-negative `s` gives a terminating
/// polynomial.
pub fn make_lambda_s(s: f64, n: usize, truncation: usize) -> Result<ClassicalSymbol, SymbolError> {
    if truncation == 0 {
        return Err(SymbolError::InvalidTruncation);
    }
    let count = truncation.div_ceil(2);
    let terms = (0..count)
        .filter_map(|k| {
            let c = binomial(s / 2.0, k);
            (c != 0.0).then(|| {
                let deg = s - 2.0 * k as f64;
                HomogeneousTerm::from_parts(
                    xi_norm_pow(n, deg).scale(Complex64::new(c, 0.0)),
                    deg,
                    n,
                )
            })
        })
        .collect();
    Ok(ClassicalSymbol::assemble(s, truncation, n, terms))
}
