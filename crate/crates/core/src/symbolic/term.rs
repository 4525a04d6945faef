use num_complex::Complex64;

use super::expr::{DomainError, Expr, Var, VarKind};
use super::multi_index::MultiIndex;
use super::sampling::{phase_samples, SAMPLE_COUNT};
use super::SymbolError;

/// Acceptance threshold for the Euler-relation residual and the semantic zero
/// test.
pub const SEMANTIC_TOL: f64 = 1e-9;

/// Result of checking Euler's relation `(Σ ξⱼ∂_{ξⱼ} − d) p = 0` on the sample set.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneityReport {
    pub degree: f64,
    pub max_residual: f64,
    pub samples: usize,
    pub accepted: bool,
}

/// A function of `(x, ξ)` positively homogeneous of a fixed real degree in `ξ`.
#[derive(Debug, Clone)]
pub struct HomogeneousTerm {
    expr: Expr,
    degree: f64,
    dim: usize,
}

impl HomogeneousTerm {
    /// Builds a term and validates Euler's relation at the sample set.
    pub fn new(expr: Expr, degree: f64, dim: usize) -> Result<Self, SymbolError> {
        check_vars(&expr, dim)?;
        let term = HomogeneousTerm { expr, degree, dim };
        let report = term.check_homogeneity()?;
        if !report.accepted {
            return Err(SymbolError::NotHomogeneous {
                degree,
                residual: report.max_residual,
            });
        }
        Ok(term)
    }

    /// Builds a term whose homogeneity holds by construction (results of the
    /// calculus operations). No sampling is performed.
    pub fn from_parts(expr: Expr, degree: f64, dim: usize) -> Self {
        HomogeneousTerm { expr, degree, dim }
    }

    pub fn zero(degree: f64, dim: usize) -> Self {
        HomogeneousTerm::from_parts(Expr::zero(), degree, dim)
    }

    pub fn constant(c: Complex64, dim: usize) -> Self {
        HomogeneousTerm::from_parts(Expr::constant(c), 0.0, dim)
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn degree(&self) -> f64 {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[f64], xi: &[f64]) -> Result<Complex64, DomainError> {
        self.expr.eval(x, xi)
    }

    /// Applies `∂_x^α` (plain partials) or `D_ξ^α = (1/i)^{|α|} ∂_ξ^α`.
    ///
    /// The `1/i` factor is attached to ξ-derivatives only; x-derivatives in
    /// the composition formulas are plain partials.
    pub fn differentiate(&self, kind: VarKind, alpha: &MultiIndex) -> HomogeneousTerm {
        let mut e = self.expr.clone();
        for (j, &a) in alpha.entries().iter().enumerate() {
            let v = Var { kind, index: j };
            for _ in 0..a {
                e = e.diff(v);
            }
        }
        match kind {
            VarKind::X => HomogeneousTerm::from_parts(e, self.degree, self.dim),
            VarKind::Xi => {
                let k = alpha.order() % 4;
                // (1/i)^k = (-i)^k
                let factor = [
                    Complex64::new(1.0, 0.0),
                    Complex64::new(0.0, -1.0),
                    Complex64::new(-1.0, 0.0),
                    Complex64::new(0.0, 1.0),
                ][k as usize];
                HomogeneousTerm::from_parts(
                    e.scale(factor),
                    self.degree - alpha.order() as f64,
                    self.dim,
                )
            }
        }
    }

    pub fn d_xi(&self, alpha: &MultiIndex) -> HomogeneousTerm {
        self.differentiate(VarKind::Xi, alpha)
    }

    pub fn partial_x(&self, alpha: &MultiIndex) -> HomogeneousTerm {
        self.differentiate(VarKind::X, alpha)
    }

    /// Euler residual `max |Σ ξⱼ∂_{ξⱼ}p − d·p| / scale` over the sample set,
    /// with `scale = max(1, |p|, |Σ ξⱼ∂_{ξⱼ}p|)` per sample.
    pub fn check_homogeneity(&self) -> Result<HomogeneityReport, DomainError> {
        let euler = (0..self.dim).fold(Expr::zero(), |acc, j| {
            acc + Expr::xi(j) * self.expr.diff(Var::xi(j))
        });
        let mut worst: f64 = 0.0;
        for s in phase_samples(self.dim) {
            let p = self.expr.eval(&s.x, &s.xi)?;
            let e = euler.eval(&s.x, &s.xi)?;
            let scale = 1f64.max(p.norm()).max(e.norm());
            worst = worst.max((e - p * self.degree).norm() / scale);
        }
        Ok(HomogeneityReport {
            degree: self.degree,
            max_residual: worst,
            samples: SAMPLE_COUNT,
            accepted: worst <= SEMANTIC_TOL,
        })
    }

    /// Semantic zero test on the seeded sample set. The tolerance is relative
    /// to the largest summand of the top-level sum, so cancellations between
    /// large pieces are judged at their own scale.
    pub fn is_zero(&self) -> Result<bool, DomainError> {
        is_zero_expr(&self.expr, self.dim)
    }

    /// Conjugates every complex constant; the degree is unchanged.
    pub fn conjugate(&self) -> HomogeneousTerm {
        HomogeneousTerm::from_parts(self.expr.conjugate(), self.degree, self.dim)
    }

    pub fn scale(&self, c: Complex64) -> HomogeneousTerm {
        HomogeneousTerm::from_parts(self.expr.scale(c), self.degree, self.dim)
    }

    pub fn neg(&self) -> HomogeneousTerm {
        HomogeneousTerm::from_parts(self.expr.neg_expr(), self.degree, self.dim)
    }

    /// Pointwise product; degrees add.
    pub fn mul(&self, other: &HomogeneousTerm) -> HomogeneousTerm {
        HomogeneousTerm::from_parts(
            Expr::mul(&self.expr, &other.expr),
            self.degree + other.degree,
            self.dim,
        )
    }

    /// Sum of two terms of (numerically) equal degree.
    pub fn add_same_degree(&self, other: &HomogeneousTerm) -> HomogeneousTerm {
        HomogeneousTerm::from_parts(Expr::add(&self.expr, &other.expr), self.degree, self.dim)
    }
}

pub(crate) fn is_zero_expr(expr: &Expr, dim: usize) -> Result<bool, DomainError> {
    if expr.is_literal_zero() {
        return Ok(true);
    }
    let parts = expr.summands();
    for s in phase_samples(dim) {
        let v = expr.eval(&s.x, &s.xi)?;
        let mut scale: f64 = 1.0;
        if parts.len() > 1 {
            for p in &parts {
                scale = scale.max(p.eval(&s.x, &s.xi)?.norm());
            }
        }
        if v.norm() > SEMANTIC_TOL * scale {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_vars(expr: &Expr, dim: usize) -> Result<(), SymbolError> {
    for kind in [VarKind::X, VarKind::Xi] {
        if let Some(i) = expr.max_index(kind) {
            if i >= dim {
                return Err(SymbolError::DimensionMismatch {
                    expected: dim,
                    found: i + 1,
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn d_xi_of_monomial_is_minus_i() {
        let t = HomogeneousTerm::new(Expr::xi(0), 1.0, 1).unwrap();
        let d = t.d_xi(&MultiIndex::new(vec![1]));
        assert_eq!(d.degree(), 0.0);
        assert_eq!(d.expr().as_const(), Some(c(0.0, -1.0)));
    }

    #[test]
    fn d_xi_of_norm() {
        let t = HomogeneousTerm::new(Expr::xi_norm(2), 1.0, 2).unwrap();
        let d = t.d_xi(&MultiIndex::new(vec![1, 0]));
        assert_eq!(d.degree(), 0.0);
        let expect = HomogeneousTerm::from_parts(
            Expr::xi(0) / Expr::xi_norm(2) * Expr::constant(c(0.0, -1.0)),
            0.0,
            2,
        );
        let diff = HomogeneousTerm::from_parts(Expr::sub(d.expr(), expect.expr()), 0.0, 2);
        assert!(diff.is_zero().unwrap());
        assert!(d.check_homogeneity().unwrap().accepted);
    }

    #[test]
    fn x_derivative_keeps_degree() {
        let t = HomogeneousTerm::new(Expr::x(0).sin() * Expr::xi(1).powf(2.0), 2.0, 2).unwrap();
        let d = t.partial_x(&MultiIndex::new(vec![1, 0]));
        assert_eq!(d.degree(), 2.0);
        let expect = Expr::x(0).cos() * Expr::xi(1).powf(2.0);
        assert!(is_zero_expr(&Expr::sub(d.expr(), &expect), 2).unwrap());
    }

    #[test]
    fn homogeneity_of_powers_of_norm() {
        for m in [-3.5, -1.0, 0.0, 0.3, 2.0, 5.0] {
            let t = HomogeneousTerm::from_parts(Expr::xi_norm(3).powf(m), m, 3);
            let r = t.check_homogeneity().unwrap();
            assert!(r.accepted, "m={m}: {}", r.max_residual);
            assert!(r.max_residual < 1e-12);
        }
    }

    #[test]
    fn x_dependence_does_not_break_homogeneity() {
        let e = Expr::xi(0).powf(2.0) + Expr::x(0) * Expr::xi(1).powf(2.0);
        assert!(HomogeneousTerm::new(e, 2.0, 2).is_ok());
    }

    #[test]
    fn constant_breaks_homogeneity() {
        let e = Expr::xi(0) + Expr::one();
        match HomogeneousTerm::new(e, 1.0, 2) {
            Err(SymbolError::NotHomogeneous { residual, .. }) => {
                assert!((residual - 1.0).abs() < 0.05, "{residual}");
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn semantic_zero_identities() {
        let (a, b) = (Expr::xi(0), Expr::xi(1));
        let e = (a.clone() + b.clone()).powf(2.0)
            - a.clone().powf(2.0)
            - Expr::real(2.0) * a.clone() * b.clone()
            - b.clone().powf(2.0);
        assert!(HomogeneousTerm::from_parts(e, 2.0, 2).is_zero().unwrap());

        let s = Expr::x(0).sin().powf(2.0) * a.clone() + Expr::x(0).cos().powf(2.0) * a.clone()
            - a.clone();
        assert!(HomogeneousTerm::from_parts(s, 1.0, 2).is_zero().unwrap());

        let nz = a - b;
        assert!(!HomogeneousTerm::from_parts(nz, 1.0, 2).is_zero().unwrap());
    }

    #[test]
    fn conjugation() {
        let t = HomogeneousTerm::from_parts(Expr::imag_unit() * Expr::xi(0), 1.0, 1);
        assert_eq!(t.conjugate().eval(&[0.0], &[2.0]).unwrap(), c(0.0, -2.0));
        let r = HomogeneousTerm::from_parts(Expr::xi(0).powf(2.0), 2.0, 1);
        assert_eq!(r.conjugate().eval(&[0.0], &[3.0]).unwrap(), c(9.0, 0.0));
        let z = HomogeneousTerm::from_parts(
            Expr::constant(c(2.0, 3.0)) * Expr::x(0) * Expr::xi_norm(1),
            1.0,
            1,
        );
        let v = z.conjugate().eval(&[0.5], &[-2.0]).unwrap();
        assert_eq!(v, c(2.0, -3.0) * 0.5 * 2.0);
        assert_eq!(z.conjugate().degree(), 1.0);
    }

    #[test]
    fn rejects_out_of_range_variables() {
        assert!(matches!(
            HomogeneousTerm::new(Expr::xi(2), 1.0, 2),
            Err(SymbolError::DimensionMismatch { .. })
        ));
    }
}
