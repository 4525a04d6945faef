//! Regularized oscillatory integrals `∬ e^{ixθ} a(x, θ) ψ(x) dθ dx` in one
//! dimension, evaluated by an ε-cutoff limit or by integration by parts with
//! `M = L / (iθ²(1 + x²))`, the operator satisfying `M e^{ixθ} = e^{ixθ}`.

use std::f64::consts::PI;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rustfft::FftPlanner;

use super::separate::separate;
use super::QuantizeError;
use crate::symbolic::{Expr, Var, VarKind};

/// The excision profile is 1 on `|θ| ≤ EXCISION_INNER` and 0 on
/// `|θ| ≥ EXCISION_OUTER`.
pub const EXCISION_INNER: f64 = 0.5;
pub const EXCISION_OUTER: f64 = 1.0;

const GL_DEGREE: usize = 16;
const PANEL_WIDTH: f64 = 2.0;
const INNER_PANELS: usize = 4;
const TRANSITION_PANELS: usize = 16;
const SPECTRUM_SAMPLES: usize = 4096;
const SPECTRUM_PAD: usize = 4;
const ROUNDOFF_FLOOR: f64 = 1e-15;

/// Amplitude `a(x, θ)` of order `m`, written with `x₁` for `x` and `ξ₁` for
/// `θ`. An excised amplitude is multiplied by `1 − φ(θ)` with `φ` the
/// excision profile.
#[derive(Debug, Clone)]
pub struct Amplitude {
    expr: Expr,
    order: f64,
    excised: bool,
    pairs: Vec<(Expr, Expr)>,
}

impl Amplitude {
    pub fn new(expr: Expr, order: f64, excised: bool) -> Result<Self, QuantizeError> {
        for kind in [VarKind::X, VarKind::Xi] {
            if let Some(i) = expr.max_index(kind) {
                if i > 0 {
                    return Err(QuantizeError::DimensionMismatch {
                        expected: 1,
                        found: i + 1,
                    });
                }
            }
        }
        let pairs = separate(&expr).ok_or_else(|| {
            QuantizeError::Unsupported("amplitude is not a sum of products a(x)b(θ)".into())
        })?;
        Ok(Amplitude {
            expr,
            order,
            excised,
            pairs,
        })
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn excised(&self) -> bool {
        self.excised
    }

    /// Smallest `r ≥ 0` with `m − r < −1`.
    pub fn parts_order(&self) -> usize {
        ((self.order + 1.0).floor() + 1.0).max(0.0) as usize
    }
}

/// Smooth test function `ψ(x₁)` vanishing outside `support`.
#[derive(Debug, Clone)]
pub struct TestFunction {
    expr: Expr,
    support: (f64, f64),
}

impl TestFunction {
    /// `expr` is only evaluated strictly inside `support`; it must vanish to
    /// infinite order at both ends.
    pub fn new(expr: Expr, lo: f64, hi: f64) -> Result<Self, QuantizeError> {
        if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less)
            || !lo.is_finite()
            || !hi.is_finite()
        {
            return Err(QuantizeError::Unsupported(format!(
                "bad support [{lo}, {hi}]"
            )));
        }
        if expr.depends_on(VarKind::Xi) || expr.max_index(VarKind::X).is_some_and(|i| i > 0) {
            return Err(QuantizeError::Unsupported(
                "test function must depend on x1 only".into(),
            ));
        }
        Ok(TestFunction {
            expr,
            support: (lo, hi),
        })
    }

    /// `exp(−1/(1 − u²))`, `u = (x − center)/radius`.
    pub fn bump(center: f64, radius: f64) -> Self {
        let u = (Expr::x(0) - Expr::real(center)) / Expr::real(radius);
        let expr = (Expr::one() / (Expr::one() - u.clone() * u))
            .neg_expr()
            .exp();
        TestFunction {
            expr,
            support: (center - radius, center + radius),
        }
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn eval(&self, x: f64) -> Result<Complex64, QuantizeError> {
        let (lo, hi) = self.support;
        if x <= lo || x >= hi {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(self.expr.eval(&[x], &[])?)
    }
}

/// Profile of the cutoff `χ`: 1 on `|t| ≤ 1`, 0 on `|t| ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CutoffProfile {
    /// `1 − s(|t| − 1)` with the `exp(−1/u)` smooth step `s`.
    #[default]
    Exponential,
    /// `(1 − tanh(tan(π(|t| − 3/2))))/2`.
    TanhTan,
}

impl CutoffProfile {
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.abs();
        if t <= 1.0 {
            return 1.0;
        }
        if t >= 2.0 {
            return 0.0;
        }
        match self {
            CutoffProfile::Exponential => 1.0 - smooth_step(t - 1.0),
            CutoffProfile::TanhTan => 0.5 * (1.0 - (PI * (t - 1.5)).tan().tanh()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OscMethod {
    EpsilonCutoff,
    Parts,
    /// Plain quadrature; only for amplitudes of order `< −1`.
    Direct,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscOptions {
    pub profile: CutoffProfile,
    /// `ε` runs over `2^{−k}` for `k` in this inclusive range.
    pub epsilon_exponents: (u32, u32),
    pub cauchy_tol: f64,
    /// Frequencies where `|ψ̂(θ)|(1 + |θ|)^{max(m, 0) + 2}` stays below this
    /// fraction of its peak are dropped.
    pub tail_tol: f64,
}

impl Default for OscOptions {
    fn default() -> Self {
        OscOptions {
            profile: CutoffProfile::Exponential,
            epsilon_exponents: (4, 10),
            cauchy_tol: 1e-6,
            tail_tol: 1e-13,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscReport {
    pub value: Complex64,
    pub method: OscMethod,
    /// Number of transposed-`M` applications (0 for the ε-cutoff method).
    pub parts_order: usize,
    pub epsilons: Vec<f64>,
    /// Cut-off integrals, one per entry of `epsilons`.
    pub sequence: Vec<Complex64>,
    pub theta_max: f64,
    pub theta_nodes: usize,
    pub x_nodes: usize,
}

/// `s(t) = f(t)/(f(t) + f(1 − t))`, `f(u) = exp(−1/u)` for `u > 0`.
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let (a, b) = ((-1.0 / t).exp(), (-1.0 / (1.0 - t)).exp());
    a / (a + b)
}

/// `1 − φ(θ)` on the transition band, as an expression in `ξ₁`.
fn excision_complement_expr() -> Expr {
    let t = (Expr::xi_norm(1) - Expr::real(EXCISION_INNER))
        / Expr::real(EXCISION_OUTER - EXCISION_INNER);
    let f = |u: Expr| (Expr::one() / u).neg_expr().exp();
    let a = f(t.clone());
    a.clone() / (a + f(Expr::one() - t))
}

fn excision_complement(theta: f64) -> f64 {
    smooth_step((theta.abs() - EXCISION_INNER) / (EXCISION_OUTER - EXCISION_INNER))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Region {
    /// `|θ| < EXCISION_INNER`
    Inner,
    Transition,
    /// `|θ| ≥ EXCISION_OUTER`
    Outer,
}

struct ThetaNodes {
    theta: Vec<f64>,
    weight: Vec<f64>,
    region: Vec<Region>,
}

impl ThetaNodes {
    /// Composite Gauss–Legendre on `[−Θ, Θ]` with panel edges at the
    /// excision radii and at every even integer beyond 2, so each window
    /// `[1/ε, 2/ε]` is a union of panels.
    fn new(theta_max: f64) -> Result<Self, QuantizeError> {
        let rule =
            GaussLegendre::new(GL_DEGREE).map_err(|e| QuantizeError::Quadrature(e.to_string()))?;
        let rule = rule.as_node_weight_pairs();
        let mut edges: Vec<(f64, f64, Region)> = Vec::new();
        let split = |a: f64, b: f64, n: usize, r: Region, out: &mut Vec<(f64, f64, Region)>| {
            let w = (b - a) / n as f64;
            for i in 0..n {
                out.push((a + w * i as f64, a + w * (i + 1) as f64, r));
            }
        };
        split(0.0, EXCISION_INNER, INNER_PANELS, Region::Inner, &mut edges);
        split(
            EXCISION_INNER,
            EXCISION_OUTER,
            TRANSITION_PANELS,
            Region::Transition,
            &mut edges,
        );
        edges.push((EXCISION_OUTER, PANEL_WIDTH, Region::Outer));
        let mut a = PANEL_WIDTH;
        while a < theta_max - 1e-9 {
            edges.push((a, a + PANEL_WIDTH, Region::Outer));
            a += PANEL_WIDTH;
        }
        let mut nodes = ThetaNodes {
            theta: Vec::new(),
            weight: Vec::new(),
            region: Vec::new(),
        };
        for sign in [1.0, -1.0] {
            for &(a, b, r) in &edges {
                let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
                for &(t, w) in rule {
                    nodes.theta.push(sign * (mid + half * t));
                    nodes.weight.push(half * w);
                    nodes.region.push(r);
                }
            }
        }
        Ok(nodes)
    }

    fn len(&self) -> usize {
        self.theta.len()
    }
}

/// Uniform interior grid of the support; the trapezoid rule on it is
/// spectrally accurate for functions vanishing to infinite order at the ends.
struct XGrid {
    first: f64,
    h: f64,
    count: usize,
}

impl XGrid {
    fn new(support: (f64, f64), theta_max: f64) -> Self {
        let width = support.1 - support.0;
        let cells = ((width * 1.25 * theta_max / PI).ceil() as usize).max(64);
        let h = width / cells as f64;
        XGrid {
            first: support.0 + h,
            h,
            count: cells - 1,
        }
    }

    fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|j| self.first + self.h * j as f64)
    }

    fn sample(&self, e: &Expr) -> Result<Vec<Complex64>, QuantizeError> {
        self.points()
            .map(|x| e.eval(&[x], &[]).map_err(QuantizeError::from))
            .collect()
    }

    /// `∫ f(x) e^{ixθ} dx` at each `θ`, from samples of `f`.
    fn transform(
        &self,
        f: &[Complex64],
        thetas: &[f64],
        select: impl Fn(usize) -> bool,
    ) -> Vec<Complex64> {
        thetas
            .iter()
            .enumerate()
            .map(|(n, &t)| {
                if !select(n) {
                    return Complex64::new(0.0, 0.0);
                }
                let step = Complex64::cis(self.h * t);
                let mut e = Complex64::cis(self.first * t);
                let mut acc = Complex64::new(0.0, 0.0);
                for &v in f {
                    acc += v * e;
                    e *= step;
                }
                acc * self.h
            })
            .collect()
    }
}

/// Frequency beyond which `ψ̂` times the amplitude growth is negligible,
/// read off a zero-padded FFT of `ψ`; capped at `cap`.
fn frequency_cutoff(
    psi: &TestFunction,
    order: f64,
    tail_tol: f64,
    cap: f64,
) -> Result<f64, QuantizeError> {
    let (lo, hi) = psi.support;
    let h = (hi - lo) / SPECTRUM_SAMPLES as f64;
    let len = SPECTRUM_SAMPLES * SPECTRUM_PAD;
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (j, slot) in buf.iter_mut().enumerate().take(SPECTRUM_SAMPLES).skip(1) {
        *slot = psi.eval(lo + h * j as f64)?;
    }
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let power = order.max(0.0) + 2.0;
    let dtheta = 2.0 * PI / (len as f64 * h);
    let spectrum: Vec<(f64, f64)> = (0..=len / 2)
        .map(|k| {
            (
                dtheta * k as f64,
                buf[k].norm().max(buf[(len - k) % len].norm()),
            )
        })
        .collect();
    let peak = spectrum.iter().fold(0.0f64, |a, &(_, v)| a.max(v));
    let weighted_peak = spectrum
        .iter()
        .fold(0.0f64, |a, &(t, v)| a.max(v * (1.0 + t).powf(power)));
    // values under the round-off floor of the transform carry no information
    let last = spectrum
        .iter()
        .filter(|&&(t, v)| {
            t <= cap
                && v > ROUNDOFF_FLOOR * peak
                && v * (1.0 + t).powf(power) > tail_tol * weighted_peak
        })
        .map(|&(t, _)| t)
        .fold(0.0f64, f64::max);
    let theta = ((1.25 * (last + dtheta)) / PANEL_WIDTH).ceil() * PANEL_WIDTH;
    Ok(theta.clamp(2.0 * PANEL_WIDTH, cap))
}

fn h_values(
    h: &Expr,
    nodes: &ThetaNodes,
    select: impl Fn(usize) -> bool,
) -> Result<Vec<Complex64>, QuantizeError> {
    (0..nodes.len())
        .map(|n| {
            if select(n) {
                Ok(h.eval(&[0.0], &[nodes.theta[n]])?)
            } else {
                Ok(Complex64::new(0.0, 0.0))
            }
        })
        .collect()
}

/// `Σ_pairs ∫ e^{ixθ} g(x) h(θ) dx` at every selected node.
fn pair_sum(
    pairs: &[(Expr, Expr)],
    grid: &XGrid,
    nodes: &ThetaNodes,
    select: impl Fn(usize) -> bool + Copy,
) -> Result<Vec<Complex64>, QuantizeError> {
    let mut out = vec![Complex64::new(0.0, 0.0); nodes.len()];
    for (g, h) in pairs {
        let gv = grid.sample(g)?;
        let gt = grid.transform(&gv, &nodes.theta, select);
        let hv = h_values(h, nodes, select)?;
        for n in 0..nodes.len() {
            out[n] += gt[n] * hv[n];
        }
    }
    Ok(out)
}

/// One application of `Mᵗ f = −∂ₓ(bₓ f) − ∂_θ(b_θ f)` with
/// `bₓ = β/(iθ)`, `b_θ = xβ/i`, `β = 1/(1 + x²)`, on a product `g(x)h(θ)`.
fn transpose_m(pairs: Vec<(Expr, Expr)>) -> Vec<(Expr, Expr)> {
    let i = Expr::imag_unit();
    let beta = Expr::one() / (Expr::one() + Expr::x(0) * Expr::x(0));
    let mut out = Vec::with_capacity(2 * pairs.len());
    for (g, h) in pairs {
        let bg = Expr::mul(&beta, &g);
        out.push((i.clone() * bg.diff(Var::x(0)), Expr::div(&h, &Expr::xi(0))));
        let dh = h.diff(Var::xi(0));
        if !dh.is_literal_zero() {
            out.push((i.clone() * Expr::x(0) * bg, dh));
        }
    }
    out
}

fn weighted_sum(
    nodes: &ThetaNodes,
    values: &[Complex64],
    factor: impl Fn(usize) -> f64,
) -> Complex64 {
    (0..nodes.len()).fold(Complex64::new(0.0, 0.0), |acc, n| {
        let f = factor(n);
        if f == 0.0 {
            acc
        } else {
            acc + values[n] * (nodes.weight[n] * f)
        }
    })
}

/// `⟨u, ψ⟩` for `u = ∫ e^{ixθ} a(x, θ) dθ`.
pub fn oscint_eval(
    a: &Amplitude,
    psi: &TestFunction,
    method: OscMethod,
    opts: &OscOptions,
) -> Result<OscReport, QuantizeError> {
    let (k0, k1) = opts.epsilon_exponents;
    if k0 >= k1 {
        return Err(QuantizeError::Unsupported(
            "need at least two epsilon values".into(),
        ));
    }
    let epsilons: Vec<f64> = (k0..=k1).map(|k| 0.5f64.powi(k as i32)).collect();
    let cap = 2.0 / epsilons[epsilons.len() - 1];
    let theta_max = frequency_cutoff(psi, a.order, opts.tail_tol, cap)?;
    let nodes = ThetaNodes::new(theta_max)?;
    let grid = XGrid::new(psi.support, theta_max);
    let with_psi: Vec<(Expr, Expr)> = a
        .pairs
        .iter()
        .map(|(g, h)| (Expr::mul(g, &psi.expr), h.clone()))
        .collect();
    let mut report = OscReport {
        value: Complex64::new(0.0, 0.0),
        method,
        parts_order: 0,
        epsilons: Vec::new(),
        sequence: Vec::new(),
        theta_max,
        theta_nodes: nodes.len(),
        x_nodes: grid.count,
    };
    let excision = |n: usize| match (a.excised, nodes.region[n]) {
        (false, _) | (true, Region::Outer) => 1.0,
        (true, Region::Inner) => 0.0,
        (true, Region::Transition) => excision_complement(nodes.theta[n]),
    };

    match method {
        OscMethod::EpsilonCutoff => {
            let base = pair_sum(&with_psi, &grid, &nodes, |_| true)?;
            let sequence: Vec<Complex64> = epsilons
                .iter()
                .map(|&eps| {
                    weighted_sum(&nodes, &base, |n| {
                        excision(n) * opts.profile.eval(eps * nodes.theta[n])
                    })
                })
                .collect();
            let (last, prev) = (sequence[sequence.len() - 1], sequence[sequence.len() - 2]);
            let difference = (last - prev).norm();
            let tolerance = opts.cauchy_tol * last.norm() + 1e-12 * psi_mass(psi, &grid)?;
            if difference > tolerance {
                return Err(QuantizeError::NonConvergent {
                    difference,
                    tolerance,
                });
            }
            report.value = last * 2.0 - prev;
            report.epsilons = epsilons;
            report.sequence = sequence;
        }
        OscMethod::Parts | OscMethod::Direct => {
            let r = a.parts_order();
            if method == OscMethod::Direct && r > 0 {
                return Err(QuantizeError::Unsupported(format!(
                    "direct quadrature needs order < -1, amplitude has order {}",
                    a.order
                )));
            }
            report.parts_order = r;
            let regions = &nodes.region;
            let region = |want: Region| move |n: usize| regions[n] == want;
            let mut total = Complex64::new(0.0, 0.0);

            // φ·a near θ = 0 is compactly supported: integrate it as is
            if !a.excised {
                let near = pair_sum(&with_psi, &grid, &nodes, |n| {
                    nodes.region[n] != Region::Outer
                })?;
                total += weighted_sum(&nodes, &near, |n| match nodes.region[n] {
                    Region::Inner => 1.0,
                    Region::Transition => 1.0 - excision_complement(nodes.theta[n]),
                    Region::Outer => 0.0,
                });
            }

            // (1 − φ)·a after r integrations by parts; 1 − φ = 1 on the outer region
            let mut outer = with_psi.clone();
            let complement = excision_complement_expr();
            let mut band: Vec<(Expr, Expr)> = with_psi
                .iter()
                .map(|(g, h)| (g.clone(), Expr::mul(h, &complement)))
                .collect();
            for _ in 0..r {
                outer = transpose_m(outer);
                band = transpose_m(band);
            }
            let v = pair_sum(&outer, &grid, &nodes, region(Region::Outer))?;
            total += weighted_sum(&nodes, &v, |n| {
                if nodes.region[n] == Region::Outer {
                    1.0
                } else {
                    0.0
                }
            });
            let v = pair_sum(&band, &grid, &nodes, region(Region::Transition))?;
            total += weighted_sum(&nodes, &v, |n| {
                if nodes.region[n] == Region::Transition {
                    1.0
                } else {
                    0.0
                }
            });
            report.value = total;
        }
    }
    Ok(report)
}

fn psi_mass(psi: &TestFunction, grid: &XGrid) -> Result<f64, QuantizeError> {
    Ok(grid
        .sample(&psi.expr)?
        .iter()
        .map(|v| v.norm())
        .sum::<f64>()
        * grid.h)
}
