//! Symbol-level operator calculus: composition, adjoints, left/right
//! conversion, ellipticity, parametrices and square roots.

use std::collections::HashMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::symbolic::sampling::{box_grid, phase_samples, scan_directions};
use crate::symbolic::{
    ClassicalSymbol, Diffeo, DomainError, Expr, HomogeneousTerm, MultiIndex, SymbolError, Var,
    VarKind, DEGREE_TOL,
};

/// Default lower bound on `|σ_m(P)|` on the unit cosphere for ellipticity.
pub const ELLIPTIC_THRESHOLD: f64 = 1e-8;

const OFFSET_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CalculusError {
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error(
        "principal symbol is not elliptic: min |p| = {min_modulus:e} at x = {x:?}, xi = {xi:?}"
    )]
    NotElliptic {
        min_modulus: f64,
        x: Vec<f64>,
        xi: Vec<f64>,
    },
    #[error("principal symbol is not real and positive: value {value} at x = {x:?}, xi = {xi:?}")]
    NotPositive {
        value: Complex64,
        x: Vec<f64>,
        xi: Vec<f64>,
    },
    #[error("covector is zero")]
    ZeroCovector,
    #[error("diffeomorphism acts on {found} coordinates, symbol has {expected}")]
    MapDimension { expected: usize, found: usize },
}

/// Direction of a left/right symbol conversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    LeftToRight,
    RightToLeft,
}

/// The term of degree `m`, or the zero term when it has cancelled.
pub fn principal(p: &ClassicalSymbol) -> HomogeneousTerm {
    p.term_or_zero(p.order())
}

/// Lazily built table of `∂_x^α` or `D_ξ^α` derivatives of a growing list of
/// terms. Higher derivatives are obtained from cached lower ones.
struct DerivTable {
    kind: VarKind,
    terms: Vec<HomogeneousTerm>,
    cache: HashMap<(usize, MultiIndex), HomogeneousTerm>,
}

impl DerivTable {
    fn new(kind: VarKind, terms: Vec<HomogeneousTerm>) -> Self {
        DerivTable {
            kind,
            terms,
            cache: HashMap::new(),
        }
    }

    fn push(&mut self, t: HomogeneousTerm) {
        self.terms.push(t);
    }

    fn len(&self) -> usize {
        self.terms.len()
    }

    fn degree(&self, i: usize) -> f64 {
        self.terms[i].degree()
    }

    fn get(&mut self, i: usize, alpha: &MultiIndex) -> HomogeneousTerm {
        let Some(j) = alpha.first_nonzero() else {
            return self.terms[i].clone();
        };
        if let Some(t) = self.cache.get(&(i, alpha.clone())) {
            return t.clone();
        }
        let lower = alpha.lower(j).expect("first nonzero entry");
        let parent = self.get(i, &lower);
        let t = if parent.expr().is_literal_zero() {
            HomogeneousTerm::zero(parent.degree(), parent.dim())
        } else {
            parent.differentiate(self.kind, &MultiIndex::unit(alpha.dim(), j))
        };
        self.cache.insert((i, alpha.clone()), t.clone());
        t
    }
}

fn inv_factorial(alpha: &MultiIndex) -> Complex64 {
    Complex64::new(1.0 / alpha.factorial() as f64, 0.0)
}

/// `Σ (1/α!) D_ξ^α a_i · ∂_x^α b_k` over all pairs and all `α` with
/// resulting degree strictly above `floor`, grouped by degree.
fn leibniz_sum(
    a: &mut DerivTable,
    b: &mut DerivTable,
    dim: usize,
    floor: f64,
    filter: impl Fn(usize, usize, f64) -> bool,
) -> Vec<HomogeneousTerm> {
    let mut out = Vec::new();
    for i in 0..a.len() {
        for k in 0..b.len() {
            let top = a.degree(i) + b.degree(k);
            let mut order = 0u32;
            while top - order as f64 > floor + DEGREE_TOL {
                let deg = top - order as f64;
                if filter(i, k, deg) {
                    for alpha in MultiIndex::of_order(dim, order) {
                        let da = a.get(i, &alpha);
                        if da.expr().is_literal_zero() {
                            continue;
                        }
                        let db = b.get(k, &alpha);
                        if db.expr().is_literal_zero() {
                            continue;
                        }
                        let prod = Expr::mul(da.expr(), db.expr()).scale(inv_factorial(&alpha));
                        if !prod.is_literal_zero() {
                            out.push(HomogeneousTerm::from_parts(prod, deg, dim));
                        }
                    }
                }
                order += 1;
            }
        }
    }
    out
}

fn check_dims(p: &ClassicalSymbol, q: &ClassicalSymbol) -> Result<(), CalculusError> {
    if p.dim() != q.dim() {
        return Err(CalculusError::DimensionMismatch(p.dim(), q.dim()));
    }
    Ok(())
}

/// Left symbol of `PQ`:
/// `r_{m+m′−l} = Σ_{j+k+|α|=l} (1/α!) D_ξ^α p_{m−j} ∂_x^α q_{m′−k}`,
/// truncated at `min(N_P, N_Q)`.
pub fn compose(p: &ClassicalSymbol, q: &ClassicalSymbol) -> Result<ClassicalSymbol, CalculusError> {
    check_dims(p, q)?;
    let order = p.order() + q.order();
    let trunc = p.truncation().min(q.truncation());
    let floor = order - trunc as f64;
    let mut a = DerivTable::new(VarKind::Xi, p.terms().to_vec());
    let mut b = DerivTable::new(VarKind::X, q.terms().to_vec());
    let terms = leibniz_sum(&mut a, &mut b, p.dim(), floor, |_, _, _| true);
    Ok(ClassicalSymbol::assemble(order, trunc, p.dim(), terms))
}

/// Left symbol of `P*`: `Σ (1/α!) ∂_x^α D_ξ^α p̄`.
pub fn adjoint(p: &ClassicalSymbol) -> ClassicalSymbol {
    let floor = p.remainder_degree();
    let mut terms = Vec::new();
    for t in p.terms() {
        let c = t.conjugate();
        let mut order = 0u32;
        while t.degree() - order as f64 > floor + DEGREE_TOL {
            for alpha in MultiIndex::of_order(p.dim(), order) {
                let d = c.d_xi(&alpha);
                if d.expr().is_literal_zero() {
                    continue;
                }
                let d = d.partial_x(&alpha);
                if !d.expr().is_literal_zero() {
                    terms.push(d.scale(inv_factorial(&alpha)));
                }
            }
            order += 1;
        }
    }
    ClassicalSymbol::assemble(p.order(), p.truncation(), p.dim(), terms)
}

/// Converts between left symbols `p(x, ξ)` and right symbols `p(y, ξ)`.
///
/// Left to right applies `Σ ((−1)^{|α|}/α!) D_ξ^α ∂_x^α`, right to left
/// applies `Σ (1/α!) D_ξ^α ∂_y^α`. Both representations use the `x`
/// variables for the spatial argument.
pub fn convert_left_right(p: &ClassicalSymbol, direction: Direction) -> ClassicalSymbol {
    let floor = p.remainder_degree();
    let mut terms = Vec::new();
    for t in p.terms() {
        let mut order = 0u32;
        while t.degree() - order as f64 > floor + DEGREE_TOL {
            let sign = match direction {
                Direction::LeftToRight if order % 2 == 1 => -1.0,
                _ => 1.0,
            };
            for alpha in MultiIndex::of_order(p.dim(), order) {
                let d = t.partial_x(&alpha);
                if d.expr().is_literal_zero() {
                    continue;
                }
                let d = d.d_xi(&alpha);
                if !d.expr().is_literal_zero() {
                    terms.push(d.scale(inv_factorial(&alpha) * sign));
                }
            }
            order += 1;
        }
    }
    ClassicalSymbol::assemble(p.order(), p.truncation(), p.dim(), terms)
}

/// Poisson bracket `{p, q} = Σ ∂_{ξ_j}p ∂_{x_j}q − ∂_{x_j}p ∂_{ξ_j}q`.
pub fn poisson_bracket(p: &HomogeneousTerm, q: &HomogeneousTerm) -> HomogeneousTerm {
    let n = p.dim();
    let mut e = Expr::zero();
    for j in 0..n {
        let a = Expr::mul(&p.expr().diff(Var::xi(j)), &q.expr().diff(Var::x(j)));
        let b = Expr::mul(&p.expr().diff(Var::x(j)), &q.expr().diff(Var::xi(j)));
        e = Expr::add(&e, &Expr::sub(&a, &b));
    }
    HomogeneousTerm::from_parts(e, p.degree() + q.degree() - 1.0, n)
}

/// `[P, Q] = PQ − QP` with semantically zero terms removed.
pub fn commutator(
    p: &ClassicalSymbol,
    q: &ClassicalSymbol,
) -> Result<ClassicalSymbol, CalculusError> {
    let pq = compose(p, q)?;
    let qp = compose(q, p)?;
    let terms = pq.termwise_difference(&qp, pq.remainder_degree());
    let kept = terms
        .into_iter()
        .map(|t| t.is_zero().map(|z| (!z).then_some(t)))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(ClassicalSymbol::assemble(
        pq.order(),
        pq.truncation(),
        p.dim(),
        kept,
    ))
}

/// Sampling density and threshold of the ellipticity scan.
#[derive(Debug, Clone, Copy)]
pub struct EllipticityOptions {
    pub x_per_axis: usize,
    pub directions: usize,
    pub threshold: f64,
}

impl Default for EllipticityOptions {
    fn default() -> Self {
        EllipticityOptions {
            x_per_axis: 16,
            directions: 64,
            threshold: ELLIPTIC_THRESHOLD,
        }
    }
}

/// Minimum of `|σ_m(P)|` over the scan grid and where it was attained.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticityReport {
    pub min_modulus: f64,
    pub argmin_x: Vec<f64>,
    pub argmin_xi: Vec<f64>,
    pub threshold: f64,
    pub elliptic: bool,
}

/// Scans `|σ_m(P)|` over a box grid in `x` times a direction grid on the
/// unit sphere. A sampled scan can miss isolated zeros; the argmin is
/// reported so that near-characteristic points can be inspected.
pub fn is_elliptic(
    p: &ClassicalSymbol,
    opts: &EllipticityOptions,
) -> Result<EllipticityReport, CalculusError> {
    let pm = principal(p);
    let xs = box_grid(p.dim(), opts.x_per_axis);
    let dirs = scan_directions(p.dim(), opts.directions);
    let mut best = (f64::INFINITY, Vec::new(), Vec::new());
    for x in &xs {
        for xi in &dirs {
            let v = pm.eval(x, xi)?.norm();
            if v < best.0 {
                best = (v, x.clone(), xi.clone());
            }
        }
    }
    Ok(EllipticityReport {
        min_modulus: best.0,
        argmin_x: best.1,
        argmin_xi: best.2,
        threshold: opts.threshold,
        elliptic: best.0 >= opts.threshold,
    })
}

/// `σ_m(P)(x₀, ξ₀/|ξ₀|) ≠ 0` at the default threshold.
pub fn micro_elliptic_at(
    p: &ClassicalSymbol,
    x0: &[f64],
    xi0: &[f64],
) -> Result<bool, CalculusError> {
    let norm = xi0.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(CalculusError::ZeroCovector);
    }
    let dir: Vec<f64> = xi0.iter().map(|v| v / norm).collect();
    Ok(principal(p).eval(x0, &dir)?.norm() >= ELLIPTIC_THRESHOLD)
}

/// Sorted offsets `o ∈ [0, limit)` reachable from 0 by adding elements of
/// `steps`. These are the possible distances below the leading order of the
/// terms of a parametrix or square root.
fn offset_closure(steps: &[f64], limit: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut frontier = vec![0.0];
    while let Some(o) = frontier.pop() {
        for &s in steps {
            if s <= OFFSET_TOL {
                continue;
            }
            let next = o + s;
            if next < limit - DEGREE_TOL
                && !out.iter().any(|v: &f64| (v - next).abs() <= OFFSET_TOL)
            {
                out.push(next);
                frontier.push(next);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

fn prune(terms: Vec<HomogeneousTerm>) -> Result<Vec<HomogeneousTerm>, DomainError> {
    let mut kept = Vec::new();
    for t in terms {
        if !t.expr().is_literal_zero() && !t.is_zero()? {
            kept.push(t);
        }
    }
    Ok(kept)
}

fn sum_terms(terms: &[HomogeneousTerm]) -> Expr {
    terms
        .iter()
        .fold(Expr::zero(), |acc, t| Expr::add(&acc, t.expr()))
}

/// Parametrix `Q` of an elliptic `P` with truncation `N`.
///
/// `q_{−m} = 1/p_m` and each lower term solves the vanishing of the
/// corresponding term of `PQ − 1`:
/// `q_{−m−l} = −p_m^{−1} Σ (1/α!) D_ξ^α p_{m−j} ∂_x^α q_{−m−k}` over
/// `j + k + |α| = l`, `k < l`. Semantically zero terms are dropped.
pub fn parametrix(
    p: &ClassicalSymbol,
    truncation: usize,
) -> Result<ClassicalSymbol, CalculusError> {
    parametrix_with(p, truncation, &EllipticityOptions::default())
}

pub fn parametrix_with(
    p: &ClassicalSymbol,
    truncation: usize,
    opts: &EllipticityOptions,
) -> Result<ClassicalSymbol, CalculusError> {
    if truncation == 0 {
        return Err(SymbolError::InvalidTruncation.into());
    }
    let report = is_elliptic(p, opts)?;
    if !report.elliptic {
        return Err(CalculusError::NotElliptic {
            min_modulus: report.min_modulus,
            x: report.argmin_x,
            xi: report.argmin_xi,
        });
    }
    let m = p.order();
    let n = p.dim();
    let pm = principal(p);
    let q0 = HomogeneousTerm::from_parts(Expr::div(&Expr::one(), pm.expr()), -m, n);

    let mut steps: Vec<f64> = p.degrees().iter().map(|d| m - d).collect();
    steps.push(1.0);
    let offsets = offset_closure(&steps, truncation as f64);

    let mut a = DerivTable::new(VarKind::Xi, p.terms().to_vec());
    let mut b = DerivTable::new(VarKind::X, vec![q0]);
    for &o in offsets.iter().skip(1) {
        // degree −o part of PQ built from the already known q terms
        let parts = leibniz_sum(&mut a, &mut b, n, -o - 0.5, |_, _, deg| {
            (deg + o).abs() <= OFFSET_TOL
        });
        if parts.is_empty() {
            continue;
        }
        let s = sum_terms(&parts);
        let q = HomogeneousTerm::from_parts(Expr::div(&s.neg_expr(), pm.expr()), -m - o, n);
        if !q.is_zero()? {
            b.push(q);
        }
    }
    let terms = prune(b.terms)?;
    Ok(ClassicalSymbol::assemble(-m, truncation, n, terms))
}

/// Approximate square root `Q` with `Q∘Q − P` of degree `≤ m − N`.
///
/// `q_{m/2} = √p_m` and each lower term is fixed by the corresponding term
/// of `Q² − P`: `q_{m/2−l} = (p_{m−l} − Σ′) / (2 q_{m/2})` where `Σ′` collects
/// every contribution to degree `m − l` except the two `α = 0` products
/// involving the new term.
pub fn sqrt_approx(
    p: &ClassicalSymbol,
    truncation: usize,
) -> Result<ClassicalSymbol, CalculusError> {
    if truncation == 0 {
        return Err(SymbolError::InvalidTruncation.into());
    }
    let m = p.order();
    let n = p.dim();
    let pm = principal(p);
    for s in phase_samples(n) {
        let v = pm.eval(&s.x, &s.xi)?;
        if v.re <= ELLIPTIC_THRESHOLD || v.im.abs() > 1e-9 * v.re.abs().max(1.0) {
            return Err(CalculusError::NotPositive {
                value: v,
                x: s.x,
                xi: s.xi,
            });
        }
    }
    let q0 = HomogeneousTerm::from_parts(pm.expr().sqrt(), m / 2.0, n);
    let two_q0 = Expr::mul(&Expr::real(2.0), q0.expr());

    let mut steps: Vec<f64> = p.degrees().iter().map(|d| m - d).collect();
    steps.push(1.0);
    let offsets = offset_closure(&steps, truncation as f64);

    let mut a = DerivTable::new(VarKind::Xi, vec![q0.clone()]);
    let mut b = DerivTable::new(VarKind::X, vec![q0]);
    for &o in offsets.iter().skip(1) {
        let target = m - o;
        let parts = leibniz_sum(&mut a, &mut b, n, target - 0.5, |_, _, deg| {
            (deg - target).abs() <= OFFSET_TOL
        });
        let rhs = Expr::sub(p.term_or_zero(target).expr(), &sum_terms(&parts));
        if rhs.is_literal_zero() {
            continue;
        }
        let q = HomogeneousTerm::from_parts(Expr::div(&rhs, &two_q0), m / 2.0 - o, n);
        if !q.is_zero()? {
            a.push(q.clone());
            b.push(q);
        }
    }
    let terms = prune(b.terms)?;
    Ok(ClassicalSymbol::assemble(m / 2.0, truncation, n, terms))
}

/// Principal symbol in new coordinates: `(x, η) ↦ p(χ(x), (∂χ/∂x)^{−T} η)`.
pub fn pullback_principal(
    p: &HomogeneousTerm,
    chi: &Diffeo,
) -> Result<HomogeneousTerm, CalculusError> {
    let n = p.dim();
    if chi.dim() != n {
        return Err(CalculusError::MapDimension {
            expected: n,
            found: chi.dim(),
        });
    }
    let m = chi.inverse_transpose_jacobian();
    let eta: Vec<Expr> = (0..n)
        .map(|i| {
            (0..n).fold(Expr::zero(), |acc, j| {
                Expr::add(&acc, &Expr::mul(&m[i][j], &Expr::xi(j)))
            })
        })
        .collect();
    let e = p.expr().substitute(Some(chi.forward()), Some(&eta));
    Ok(HomogeneousTerm::from_parts(e, p.degree(), n))
}
