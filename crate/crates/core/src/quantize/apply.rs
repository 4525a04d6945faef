use num_complex::Complex;

use super::grid::{GridFunction, GridSpectrum};
use super::separate::separate;
use super::QuantizeError;
use crate::symbolic::{ClassicalSymbol, Expr, HomogeneousTerm};
use crate::Real;

/// How a homogeneous term was treated at the `k = 0` mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroModePolicy {
    /// Positive degree: the excised term vanishes at the origin.
    Excised,
    /// Degree zero: the value along `e₁`, `p(x, e₁)`.
    LimitAlongE1,
    /// Negative degree: the limit along `e₁` is not finite, contributes 0.
    Singular,
}

impl ZeroModePolicy {
    pub fn for_degree(degree: f64) -> Self {
        if degree.abs() <= 1e-12 {
            ZeroModePolicy::LimitAlongE1
        } else if degree > 0.0 {
            ZeroModePolicy::Excised
        } else {
            ZeroModePolicy::Singular
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            ZeroModePolicy::Excised => "excised (0)",
            ZeroModePolicy::LimitAlongE1 => "limit along e1",
            ZeroModePolicy::Singular => "singular limit (0)",
        }
    }
}

/// Per-term bookkeeping of one quantization.
#[derive(Debug, Clone, PartialEq)]
pub struct TermQuantization {
    pub degree: f64,
    /// Number of `c(x)·h(ξ)` products, or `None` when the dense sum was used.
    pub separable_products: Option<usize>,
    pub zero_mode: ZeroModePolicy,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ApplyReport {
    pub terms: Vec<TermQuantization>,
}

/// `(Pu)(x) = Σ_{k≠0} e^{ik·x} p(x, k) û(k) + c₀(x) û(0)` on the lattice,
/// where `p` is the partial sum of the retained terms and `c₀` follows the
/// per-degree [`ZeroModePolicy`].
pub fn op_apply<T: Real>(
    p: &ClassicalSymbol,
    u: &GridFunction<T>,
) -> Result<GridFunction<T>, QuantizeError> {
    op_apply_with_report(p, u).map(|(g, _)| g)
}

pub fn op_apply_with_report<T: Real>(
    p: &ClassicalSymbol,
    u: &GridFunction<T>,
) -> Result<(GridFunction<T>, ApplyReport), QuantizeError> {
    if p.dim() != u.dim() {
        return Err(QuantizeError::DimensionMismatch {
            expected: u.dim(),
            found: p.dim(),
        });
    }
    let spec = u.spectrum();
    let zero = Complex::new(T::zero(), T::zero());
    let u0 = spec.get(&vec![0; u.dim()]);
    let mut out = GridFunction::zeros(u.dim(), u.points_per_axis())?;
    let mut report = ApplyReport::default();
    for t in p.terms() {
        let policy = ZeroModePolicy::for_degree(t.degree());
        let products = match separate(t.expr()) {
            Some(pairs) => {
                for (c, h) in &pairs {
                    let g = multiplier(h, &spec)?;
                    accumulate(&mut out, c, &g)?;
                }
                Some(pairs.len())
            }
            None => {
                dense_term(&mut out, t, &spec)?;
                None
            }
        };
        if policy == ZeroModePolicy::LimitAlongE1 && u0 != zero {
            let mut e1 = vec![T::zero(); u.dim()];
            e1[0] = T::one();
            for idx in 0..out.len() {
                let x = out.point(idx);
                let c0 = t.expr().eval(&x, &e1)?;
                out.values_mut()[idx] = out.values()[idx] + c0 * u0;
            }
        }
        report.terms.push(TermQuantization {
            degree: t.degree(),
            separable_products: products,
            zero_mode: policy,
        });
    }
    Ok((out, report))
}

/// Inverse transform of `h(k) û(k)` with the `k = 0` mode removed.
fn multiplier<T: Real>(h: &Expr, spec: &GridSpectrum<T>) -> Result<GridFunction<T>, QuantizeError> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut s = spec.clone();
    let constant = h.as_const();
    for idx in 0..s.len() {
        let c = s.coeffs()[idx];
        let k = s.wavenumber(idx);
        let v = if k.iter().all(|&kj| kj == 0) || c == zero {
            zero
        } else {
            let hk = match constant {
                Some(v) => Complex::new(T::of(v.re), T::of(v.im)),
                None => {
                    let kt: Vec<T> = k.iter().map(|&kj| T::of(kj as f64)).collect();
                    h.eval(&[], &kt)?
                }
            };
            hk * c
        };
        s.coeffs_mut()[idx] = v;
    }
    Ok(s.to_grid())
}

fn accumulate<T: Real>(
    out: &mut GridFunction<T>,
    c: &Expr,
    g: &GridFunction<T>,
) -> Result<(), QuantizeError> {
    let constant = c.as_const();
    for idx in 0..out.len() {
        let cv = match constant {
            Some(v) => Complex::new(T::of(v.re), T::of(v.im)),
            None => c.eval(&out.point(idx), &[])?,
        };
        out.values_mut()[idx] = out.values()[idx] + cv * g.values()[idx];
    }
    Ok(())
}

/// Direct sum over the nonzero, non-vanishing coefficients; cost is the grid
/// size times the number of active modes.
fn dense_term<T: Real>(
    out: &mut GridFunction<T>,
    t: &HomogeneousTerm,
    spec: &GridSpectrum<T>,
) -> Result<(), QuantizeError> {
    let zero = Complex::new(T::zero(), T::zero());
    let active: Vec<(Vec<i64>, Complex<T>)> = spec
        .iter()
        .filter(|(k, c)| *c != zero && k.iter().any(|&kj| kj != 0))
        .collect();
    for idx in 0..out.len() {
        let x = out.point(idx);
        let mut acc = zero;
        for (k, c) in &active {
            let kt: Vec<T> = k.iter().map(|&kj| T::of(kj as f64)).collect();
            let phase = x
                .iter()
                .zip(&kt)
                .fold(T::zero(), |a, (&xj, &kj)| a + xj * kj);
            acc = acc + Complex::new(phase.cos(), phase.sin()) * t.expr().eval(&x, &kt)? * *c;
        }
        out.values_mut()[idx] = out.values()[idx] + acc;
    }
    Ok(())
}
