use super::expr::{Expr, Var, VarKind};
use super::sampling::phase_samples;
use super::SymbolError;

const DIFFEO_TOL: f64 = 1e-9;

/// A change of base coordinates `χ` with its inverse, both given as
/// expressions in `x`.
#[derive(Debug, Clone)]
pub struct Diffeo {
    forward: Vec<Expr>,
    inverse: Vec<Expr>,
}

impl Diffeo {
    /// Validates `χ ∘ χ⁻¹ = id` and `det ∂χ/∂x ≠ 0` on the sample set.
    pub fn new(forward: Vec<Expr>, inverse: Vec<Expr>) -> Result<Self, SymbolError> {
        let n = forward.len();
        if inverse.len() != n {
            return Err(SymbolError::DimensionMismatch {
                expected: n,
                found: inverse.len(),
            });
        }
        for e in forward.iter().chain(&inverse) {
            if e.depends_on(VarKind::Xi) {
                return Err(SymbolError::InvalidDiffeo(
                    "map components may depend on x only".into(),
                ));
            }
            if let Some(i) = e.max_index(VarKind::X) {
                if i >= n {
                    return Err(SymbolError::DimensionMismatch {
                        expected: n,
                        found: i + 1,
                    });
                }
            }
        }
        let d = Diffeo { forward, inverse };
        let det = d.jacobian_det();
        for s in phase_samples(n) {
            let y: Vec<f64> = d
                .inverse
                .iter()
                .map(|e| e.eval(&s.x, &[]).map(|v| v.re))
                .collect::<Result<_, _>>()?;
            for (j, e) in d.forward.iter().enumerate() {
                let back = e.eval(&y, &[])?;
                if (back.re - s.x[j]).abs() > DIFFEO_TOL * (1.0 + s.x[j].abs())
                    || back.im.abs() > DIFFEO_TOL
                {
                    return Err(SymbolError::InvalidDiffeo(format!(
                        "forward(inverse(x)) != x at component {}",
                        j + 1
                    )));
                }
            }
            if det.eval(&s.x, &[])?.norm() < 1e-12 {
                return Err(SymbolError::InvalidDiffeo("singular Jacobian".into()));
            }
        }
        Ok(d)
    }

    pub fn identity(n: usize) -> Self {
        let id: Vec<Expr> = (0..n).map(Expr::x).collect();
        Diffeo {
            forward: id.clone(),
            inverse: id,
        }
    }

    pub fn dim(&self) -> usize {
        self.forward.len()
    }

    pub fn forward(&self) -> &[Expr] {
        &self.forward
    }

    pub fn inverse(&self) -> &[Expr] {
        &self.inverse
    }

    /// `J[i][j] = ∂χᵢ/∂xⱼ`
    pub fn jacobian(&self) -> Vec<Vec<Expr>> {
        self.forward
            .iter()
            .map(|f| (0..self.dim()).map(|j| f.diff(Var::x(j))).collect())
            .collect()
    }

    pub fn jacobian_det(&self) -> Expr {
        det(&self.jacobian())
    }

    /// `(∂χ/∂x)^{−T}` assembled as cofactor matrix over determinant.
    pub fn inverse_transpose_jacobian(&self) -> Vec<Vec<Expr>> {
        let j = self.jacobian();
        let n = j.len();
        let d = det(&j);
        (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        let minor = det(&minor(&j, r, c));
                        let cof = if (r + c) % 2 == 0 {
                            minor
                        } else {
                            minor.neg_expr()
                        };
                        Expr::div(&cof, &d)
                    })
                    .collect()
            })
            .collect()
    }
}

fn minor(m: &[Vec<Expr>], row: usize, col: usize) -> Vec<Vec<Expr>> {
    m.iter()
        .enumerate()
        .filter(|(r, _)| *r != row)
        .map(|(_, rv)| {
            rv.iter()
                .enumerate()
                .filter(|(c, _)| *c != col)
                .map(|(_, e)| e.clone())
                .collect()
        })
        .collect()
}

/// Laplace expansion along the first row.
fn det(m: &[Vec<Expr>]) -> Expr {
    match m.len() {
        0 => Expr::one(),
        1 => m[0][0].clone(),
        n => (0..n).fold(Expr::zero(), |acc, c| {
            let term = Expr::mul(&m[0][c], &det(&minor(m, 0, c)));
            if c % 2 == 0 {
                Expr::add(&acc, &term)
            } else {
                Expr::sub(&acc, &term)
            }
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_is_valid() {
        let (c, s) = (0.6, 0.8);
        let fwd = vec![
            Expr::real(c) * Expr::x(0) - Expr::real(s) * Expr::x(1),
            Expr::real(s) * Expr::x(0) + Expr::real(c) * Expr::x(1),
        ];
        let inv = vec![
            Expr::real(c) * Expr::x(0) + Expr::real(s) * Expr::x(1),
            Expr::real(-s) * Expr::x(0) + Expr::real(c) * Expr::x(1),
        ];
        let d = Diffeo::new(fwd, inv).unwrap();
        let det = d.jacobian_det().eval(&[0.3f64, 0.1], &[]).unwrap();
        assert!((det.re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_wrong_inverse() {
        let fwd = vec![Expr::real(2.0) * Expr::x(0)];
        let inv = vec![Expr::x(0)];
        assert!(matches!(
            Diffeo::new(fwd, inv),
            Err(SymbolError::InvalidDiffeo(_))
        ));
    }

    #[test]
    fn affine_map_inverse_transpose() {
        // exp paired with the identity is not an inverse pair.
        let fwd = vec![Expr::x(0).exp()];
        let inv = vec![Expr::one() * Expr::x(0)];
        assert!(Diffeo::new(fwd, inv).is_err());

        let fwd = vec![Expr::real(3.0) * Expr::x(0) + Expr::real(1.0)];
        let inv = vec![(Expr::x(0) - Expr::real(1.0)) / Expr::real(3.0)];
        let d = Diffeo::new(fwd, inv).unwrap();
        let it = d.inverse_transpose_jacobian();
        assert!((it[0][0].eval(&[0.5f64], &[]).unwrap().re - 1.0 / 3.0).abs() < 1e-15);
    }
}
