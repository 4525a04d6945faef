//! Exterior calculus on the flat torus `Tⁿ = [0, 2π)ⁿ`, `n ≤ 3`, with the
//! Euclidean metric and orientation `dx₁∧…∧dxₙ`. All operators act on
//! Fourier coefficients, so they are exact for band-limited fields.

use nalgebra::DMatrix;
use num_complex::{Complex, Complex64};
use rand::Rng;
use thiserror::Error;

use crate::quantize::{duality_pair, GridFunction, GridSpectrum, QuantizeError};
use crate::symbolic::Expr;
use crate::Real;

/// Grid used by [`betti`] probes.
pub const BETTI_GRID: usize = 8;
/// Relative singular-value threshold of the rank probe.
pub const BETTI_RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HodgeError {
    #[error(transparent)]
    Quantize(#[from] QuantizeError),
    #[error("forms are only supported on tori of dimension 1 to 3, got {0}")]
    Dimension(usize),
    #[error("degree {degree} outside [0, {n}]")]
    Degree { n: usize, degree: usize },
    #[error("expected {expected} coefficient fields, found {found}")]
    CoefficientCount { expected: usize, found: usize },
    #[error("d of a top-degree form (n = {0})")]
    TopDegree(usize),
    #[error("codifferential of a 0-form")]
    BottomDegree,
    #[error("forms differ in (n, degree, M): {left:?} vs {right:?}")]
    Mismatch {
        left: (usize, usize, usize),
        right: (usize, usize, usize),
    },
}

/// Strictly increasing index sets of size `j` drawn from `0..n`, in
/// lexicographic order.
pub fn basis(n: usize, j: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if j <= n {
        rec(0, n, j, &mut Vec::new(), &mut out);
    }
    out
}

pub fn binomial(n: usize, j: usize) -> usize {
    if j > n {
        return 0;
    }
    (0..j).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `dx_j ∧ dx_α = sign · dx_β`, `β = sorted(α ∪ {j})`; `None` when `j ∈ α`.
pub fn wedge_sign(j: usize, alpha: &[usize]) -> Option<(i32, Vec<usize>)> {
    if alpha.contains(&j) {
        return None;
    }
    let below = alpha.iter().filter(|&&a| a < j).count();
    let mut beta = alpha.to_vec();
    beta.insert(below, j);
    Some((if below % 2 == 0 { 1 } else { -1 }, beta))
}

/// `*dx_α = sign · dx_{αᶜ}` with sign the parity of the permutation `(α, αᶜ)`.
pub fn star_sign(alpha: &[usize], n: usize) -> (i32, Vec<usize>) {
    let comp: Vec<usize> = (0..n).filter(|i| !alpha.contains(i)).collect();
    let inversions: usize = alpha
        .iter()
        .map(|&a| comp.iter().filter(|&&c| c < a).count())
        .sum();
    (if inversions.is_multiple_of(2) { 1 } else { -1 }, comp)
}

fn sign_of(parity: usize) -> i32 {
    if parity.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `Σ_α f_α dx_α`, one grid function per basis index set in [`basis`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct FormField<T> {
    n: usize,
    degree: usize,
    coeffs: Vec<GridFunction<T>>,
}

impl<T: Real> FormField<T> {
    pub fn new(n: usize, degree: usize, coeffs: Vec<GridFunction<T>>) -> Result<Self, HodgeError> {
        check_shape(n, degree)?;
        let expected = binomial(n, degree);
        if coeffs.len() != expected {
            return Err(HodgeError::CoefficientCount {
                expected,
                found: coeffs.len(),
            });
        }
        for c in &coeffs {
            if c.dim() != n {
                return Err(QuantizeError::DimensionMismatch {
                    expected: n,
                    found: c.dim(),
                }
                .into());
            }
            c.same_grid(&coeffs[0])?;
        }
        Ok(FormField { n, degree, coeffs })
    }

    pub fn zeros(n: usize, degree: usize, m: usize) -> Result<Self, HodgeError> {
        check_shape(n, degree)?;
        let coeffs = (0..binomial(n, degree))
            .map(|_| GridFunction::zeros(n, m))
            .collect::<Result<_, _>>()?;
        Ok(FormField { n, degree, coeffs })
    }

    /// Samples one expression in `x` per basis form.
    pub fn from_exprs(
        n: usize,
        degree: usize,
        m: usize,
        exprs: &[Expr],
    ) -> Result<Self, HodgeError> {
        let coeffs = exprs
            .iter()
            .map(|e| GridFunction::from_expr(e, n, m))
            .collect::<Result<_, _>>()?;
        FormField::new(n, degree, coeffs)
    }

    /// Random field with coefficients `û(k)` uniform in the unit square for
    /// `max |kᵢ| ≤ band` and zero otherwise.
    pub fn random<R: Rng>(
        n: usize,
        degree: usize,
        m: usize,
        band: i64,
        rng: &mut R,
    ) -> Result<Self, HodgeError> {
        check_shape(n, degree)?;
        let mut specs = Vec::new();
        for _ in 0..binomial(n, degree) {
            specs.push(GridSpectrum::from_fn(n, m, |k| {
                if k.iter().all(|&v| v.abs() <= band) {
                    Complex::new(
                        T::of(rng.gen_range(-1.0..1.0)),
                        T::of(rng.gen_range(-1.0..1.0)),
                    )
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            })?);
        }
        Ok(FormField::from_spectra(n, degree, &specs))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn points_per_axis(&self) -> usize {
        self.coeffs[0].points_per_axis()
    }

    pub fn basis(&self) -> Vec<Vec<usize>> {
        basis(self.n, self.degree)
    }

    pub fn coeffs(&self) -> &[GridFunction<T>] {
        &self.coeffs
    }

    pub fn coeff(&self, alpha: &[usize]) -> Option<&GridFunction<T>> {
        self.basis()
            .iter()
            .position(|b| b == alpha)
            .map(|i| &self.coeffs[i])
    }

    fn shape(&self) -> (usize, usize, usize) {
        (self.n, self.degree, self.points_per_axis())
    }

    fn check_same(&self, other: &FormField<T>) -> Result<(), HodgeError> {
        if self.shape() != other.shape() {
            return Err(HodgeError::Mismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }

    fn spectra(&self) -> Vec<GridSpectrum<T>> {
        self.coeffs.iter().map(|c| c.spectrum()).collect()
    }

    fn from_spectra(n: usize, degree: usize, specs: &[GridSpectrum<T>]) -> Self {
        FormField {
            n,
            degree,
            coeffs: specs.iter().map(|s| s.to_grid()).collect(),
        }
    }

    pub fn add(&self, other: &FormField<T>) -> Result<Self, HodgeError> {
        self.check_same(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_, _>>()?;
        Ok(FormField {
            coeffs,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &FormField<T>) -> Result<Self, HodgeError> {
        self.add(&other.scale(Complex::new(-T::one(), T::zero())))
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        FormField {
            coeffs: self.coeffs.iter().map(|f| f.scale(c)).collect(),
            ..self.clone()
        }
    }

    pub fn max_abs(&self) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |a, c| a.max(c.max_abs()))
    }

    /// `⟨ω, η⟩ = Σ_α Σ_k ω̂_α(k) conj(η̂_α(k))`.
    pub fn inner(&self, other: &FormField<T>) -> Result<Complex<T>, HodgeError> {
        self.check_same(other)?;
        let mut acc = Complex::new(T::zero(), T::zero());
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            acc = acc + duality_pair(a, b)?;
        }
        Ok(acc)
    }

    pub fn norm(&self) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |a, c| a + c.spectrum().energy())
            .sqrt()
    }
}

fn check_shape(n: usize, degree: usize) -> Result<(), HodgeError> {
    if !(1..=3).contains(&n) {
        return Err(HodgeError::Dimension(n));
    }
    if degree > n {
        return Err(HodgeError::Degree { n, degree });
    }
    Ok(())
}

fn zero_spectra<T: Real>(
    n: usize,
    degree: usize,
    m: usize,
) -> Result<Vec<GridSpectrum<T>>, HodgeError> {
    Ok((0..binomial(n, degree))
        .map(|_| GridSpectrum::zeros(n, m))
        .collect::<Result<_, _>>()?)
}

/// `dω = Σ_{α, j} ∂ⱼf_α dx_j ∧ dx_α`.
pub fn ext_d<T: Real>(omega: &FormField<T>) -> Result<FormField<T>, HodgeError> {
    let (n, p) = (omega.n, omega.degree);
    if p == n {
        return Err(HodgeError::TopDegree(n));
    }
    let m = omega.points_per_axis();
    let target = basis(n, p + 1);
    let mut out = zero_spectra::<T>(n, p + 1, m)?;
    for (alpha, spec) in omega.basis().iter().zip(omega.spectra()) {
        for j in 0..n {
            let Some((sign, beta)) = wedge_sign(j, alpha) else {
                continue;
            };
            let slot = target
                .iter()
                .position(|b| *b == beta)
                .expect("basis contains every sorted set");
            let dst = out[slot].coeffs_mut();
            for (idx, v) in spec.coeffs().iter().enumerate() {
                let k = spec.wavenumber(idx)[j];
                // ∂ⱼ multiplies û(k) by i kⱼ
                dst[idx] = dst[idx] + Complex::new(T::zero(), T::of((sign as i64 * k) as f64)) * *v;
            }
        }
    }
    Ok(FormField::from_spectra(n, p + 1, &out))
}

/// Maps each basis form to its signed complement; `** = (−1)^{j(n−j)}`.
pub fn hodge_star<T: Real>(omega: &FormField<T>) -> FormField<T> {
    let (n, p) = (omega.n, omega.degree);
    let target = basis(n, n - p);
    let mut coeffs = vec![None; target.len()];
    for (alpha, f) in omega.basis().iter().zip(&omega.coeffs) {
        let (sign, comp) = star_sign(alpha, n);
        let slot = target
            .iter()
            .position(|b| *b == comp)
            .expect("complement is a basis set");
        coeffs[slot] = Some(if sign > 0 {
            f.clone()
        } else {
            f.scale(Complex::new(-T::one(), T::zero()))
        });
    }
    FormField {
        n,
        degree: n - p,
        coeffs: coeffs
            .into_iter()
            .map(|c| c.expect("star is a bijection"))
            .collect(),
    }
}

/// `δ = (−1)^{j+1+j(n−j)} * d *` on `(j+1)`-forms.
pub fn codifferential<T: Real>(omega: &FormField<T>) -> Result<FormField<T>, HodgeError> {
    if omega.degree == 0 {
        return Err(HodgeError::BottomDegree);
    }
    let (n, j) = (omega.n, omega.degree - 1);
    let out = hodge_star(&ext_d(&hodge_star(omega))?);
    let sign = sign_of(j + 1 + j * (n - j));
    Ok(if sign > 0 {
        out
    } else {
        out.scale(Complex::new(-T::one(), T::zero()))
    })
}

/// `Δ = dδ + δd`, with the terms that leave `[0, n]` dropped.
pub fn laplacian<T: Real>(omega: &FormField<T>) -> Result<FormField<T>, HodgeError> {
    let mut out = FormField::zeros(omega.n, omega.degree, omega.points_per_axis())?;
    if omega.degree > 0 {
        out = out.add(&ext_d(&codifferential(omega)?)?)?;
    }
    if omega.degree < omega.n {
        out = out.add(&codifferential(&ext_d(omega)?)?)?;
    }
    Ok(out)
}

fn map_modes<T: Real>(
    omega: &FormField<T>,
    f: impl Fn(&[i64], Complex<T>) -> Complex<T>,
) -> FormField<T> {
    let specs: Vec<GridSpectrum<T>> = omega
        .spectra()
        .into_iter()
        .map(|mut s| {
            for idx in 0..s.len() {
                let k = s.wavenumber(idx);
                let v = s.coeffs()[idx];
                s.coeffs_mut()[idx] = f(&k, v);
            }
            s
        })
        .collect();
    FormField::from_spectra(omega.n, omega.degree, &specs)
}

/// Keeps the `k = 0` mode of every coefficient.
pub fn harmonic_part<T: Real>(omega: &FormField<T>) -> FormField<T> {
    map_modes(omega, |k, v| {
        if k.iter().all(|&c| c == 0) {
            v
        } else {
            Complex::new(T::zero(), T::zero())
        }
    })
}

/// Spectral pseudo-inverse of `Δ`: `û(k)/|k|²` for `k ≠ 0`, zero at `k = 0`.
pub fn green<T: Real>(omega: &FormField<T>) -> FormField<T> {
    map_modes(omega, |k, v| {
        let k2 = k.iter().map(|&c| c * c).sum::<i64>();
        if k2 == 0 {
            Complex::new(T::zero(), T::zero())
        } else {
            v / T::of(k2 as f64)
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HodgeDecomposition<T> {
    pub harmonic: FormField<T>,
    /// `dδGω`
    pub exact: FormField<T>,
    /// `δdGω`
    pub coexact: FormField<T>,
}

pub fn hodge_decompose<T: Real>(omega: &FormField<T>) -> Result<HodgeDecomposition<T>, HodgeError> {
    let g = green(omega);
    let zero = FormField::zeros(omega.n, omega.degree, omega.points_per_axis())?;
    let exact = if omega.degree > 0 {
        ext_d(&codifferential(&g)?)?
    } else {
        zero.clone()
    };
    let coexact = if omega.degree < omega.n {
        codifferential(&ext_d(&g)?)?
    } else {
        zero
    };
    Ok(HodgeDecomposition {
        harmonic: harmonic_part(omega),
        exact,
        coexact,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BettiReport {
    pub n: usize,
    pub degree: usize,
    /// Rank of the harmonic projector seen through the probes.
    pub rank: usize,
    /// `C(n, j)`, the number of `k = 0` coefficient slots.
    pub combinatorial: usize,
    pub singular_values: Vec<f64>,
}

impl BettiReport {
    pub fn consistent(&self) -> bool {
        self.rank == self.combinatorial
    }
}

/// Dimension of the harmonic `j`-forms, measured as the rank of the
/// harmonic projector applied to `probes` random fields on a
/// [`BETTI_GRID`] grid.
pub fn betti<R: Rng>(
    n: usize,
    degree: usize,
    probes: usize,
    rng: &mut R,
) -> Result<BettiReport, HodgeError> {
    check_shape(n, degree)?;
    let m = BETTI_GRID;
    let mut columns = Vec::with_capacity(probes);
    for _ in 0..probes {
        let w = FormField::<f64>::random(n, degree, m, (m / 2 - 1) as i64, rng)?;
        let h = harmonic_part(&w);
        columns.push(
            h.coeffs
                .iter()
                .flat_map(|c| c.values().iter().copied())
                .collect::<Vec<_>>(),
        );
    }
    let rows = binomial(n, degree) * m.pow(n as u32);
    let mat = DMatrix::<Complex64>::from_fn(rows, probes, |r, c| columns[c][r]);
    let sv: Vec<f64> = if probes == 0 {
        Vec::new()
    } else {
        mat.svd(false, false)
            .singular_values
            .iter()
            .copied()
            .collect()
    };
    let top = sv.iter().fold(0.0f64, |a, &v| a.max(v));
    let rank = sv.iter().filter(|&&v| v > BETTI_RANK_TOL * top).count();
    Ok(BettiReport {
        n,
        degree,
        rank,
        combinatorial: binomial(n, degree),
        singular_values: sv,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParametrixReport {
    pub n: usize,
    pub degree: usize,
    pub trials: usize,
    /// `max ‖(dQ_{j−1} + Q_j d − I + H)ω‖_∞` over the trials.
    pub max_residual: f64,
}

/// `(dQ_{j−1} + Q_j d − I + H)ω` with `Q = Gδ` and `H` the harmonic
/// projector.
pub fn parametrix_residual<T: Real>(omega: &FormField<T>) -> Result<FormField<T>, HodgeError> {
    let mut out = harmonic_part(omega).sub(omega)?;
    if omega.degree > 0 {
        out = out.add(&ext_d(&green(&codifferential(omega)?))?)?;
    }
    if omega.degree < omega.n {
        out = out.add(&green(&codifferential(&ext_d(omega)?)?))?;
    }
    Ok(out)
}

/// Runs [`parametrix_residual`] on `trials` random band-limited fields.
pub fn complex_parametrix_check<R: Rng>(
    n: usize,
    degree: usize,
    trials: usize,
    m: usize,
    rng: &mut R,
) -> Result<ParametrixReport, HodgeError> {
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let w = FormField::<f64>::random(n, degree, m, (m / 4) as i64, rng)?;
        worst = worst.max(parametrix_residual(&w)?.max_abs());
    }
    Ok(ParametrixReport {
        n,
        degree,
        trials,
        max_residual: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn wedge_signs_exhaustive() {
        // compare with the parity of the permutation sorting (j, α)
        for n in 1..=3 {
            for p in 0..n {
                for alpha in basis(n, p) {
                    for j in 0..n {
                        let mut seq = vec![j];
                        seq.extend(&alpha);
                        let r = wedge_sign(j, &alpha);
                        if alpha.contains(&j) {
                            assert!(r.is_none());
                            continue;
                        }
                        let inv = (0..seq.len())
                            .flat_map(|a| (a + 1..seq.len()).map(move |b| (a, b)))
                            .filter(|&(a, b)| seq[a] > seq[b])
                            .count();
                        let (sign, beta) = r.unwrap();
                        seq.sort();
                        assert_eq!((sign, beta), (sign_of(inv), seq));
                    }
                }
            }
        }
    }

    #[test]
    fn star_examples() {
        assert_eq!(star_sign(&[0], 2), (1, vec![1]));
        assert_eq!(star_sign(&[1], 2), (-1, vec![0]));
        assert_eq!(star_sign(&[], 3), (1, vec![0, 1, 2]));
        assert_eq!(star_sign(&[0, 2], 3), (-1, vec![1]));
    }

    #[test]
    fn star_star_sign_law() {
        let mut r = rng();
        for n in 1..=3 {
            for j in 0..=n {
                let w = FormField::<f64>::random(n, j, 8, 3, &mut r).unwrap();
                let ss = hodge_star(&hodge_star(&w));
                let expect = w.scale(Complex::new(sign_of(j * (n - j)) as f64, 0.0));
                assert_eq!(ss, expect);
            }
        }
    }

    #[test]
    fn d_of_sine() {
        let w = FormField::<f64>::from_exprs(2, 1, 16, &[Expr::zero(), Expr::x(0).sin()]).unwrap();
        let dw = ext_d(&w).unwrap();
        let expect = GridFunction::from_expr(&Expr::x(0).cos(), 2, 16).unwrap();
        assert!(dw.coeffs()[0].sub(&expect).unwrap().max_abs() < 1e-13);
        assert!(matches!(ext_d(&dw), Err(HodgeError::TopDegree(2))));
    }

    #[test]
    fn codifferential_examples() {
        let w = FormField::<f64>::from_exprs(2, 1, 16, &[Expr::x(0).sin(), Expr::zero()]).unwrap();
        let dw = codifferential(&w).unwrap();
        let expect = GridFunction::from_expr(&Expr::x(0).cos().neg_expr(), 2, 16).unwrap();
        assert!(dw.coeffs()[0].sub(&expect).unwrap().max_abs() < 1e-13);
        let w = FormField::<f64>::from_exprs(2, 1, 16, &[Expr::x(1).sin(), Expr::zero()]).unwrap();
        assert!(codifferential(&w).unwrap().max_abs() < 1e-13);
        let f = FormField::<f64>::zeros(2, 0, 8).unwrap();
        assert!(matches!(codifferential(&f), Err(HodgeError::BottomDegree)));
    }

    #[test]
    fn laplacian_is_scalar_on_modes() {
        let k = [2i64, -1, 3];
        let wave = GridFunction::<f64>::plane_wave(3, 16, &k).unwrap();
        let zero = GridFunction::zeros(3, 16).unwrap();
        for j in 0..=3 {
            for slot in 0..binomial(3, j) {
                let coeffs = (0..binomial(3, j))
                    .map(|i| {
                        if i == slot {
                            wave.clone()
                        } else {
                            zero.clone()
                        }
                    })
                    .collect();
                let w = FormField::new(3, j, coeffs).unwrap();
                let lap = laplacian(&w).unwrap();
                let diff = lap.sub(&w.scale(Complex::new(14.0, 0.0))).unwrap();
                assert!(diff.max_abs() < 1e-10, "j = {j}");
            }
        }
    }

    #[test]
    fn decomposition_of_constant_plus_sine() {
        let w = FormField::<f64>::from_exprs(
            2,
            1,
            16,
            &[Expr::real(3.0) + Expr::x(0).sin(), Expr::zero()],
        )
        .unwrap();
        let h = hodge_decompose(&w).unwrap();
        let three = GridFunction::from_expr(&Expr::real(3.0), 2, 16).unwrap();
        assert!(h.harmonic.coeffs()[0].sub(&three).unwrap().max_abs() < 1e-13);
        // sin(x₁)dx₁ = d(−cos x₁) is exact
        assert!(h.coexact.max_abs() < 1e-13);
        let sum = h.harmonic.add(&h.exact).unwrap().add(&h.coexact).unwrap();
        assert!(sum.sub(&w).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn betti_numbers() {
        let mut r = rng();
        for n in 1..=3 {
            for j in 0..=n {
                let b = betti(n, j, binomial(n, j) + 3, &mut r).unwrap();
                assert!(b.consistent(), "{b:?}");
            }
        }
    }

    #[test]
    fn single_mode_parametrix() {
        let wave = GridFunction::<f64>::plane_wave(2, 16, &[1, 2]).unwrap();
        let w =
            FormField::new(2, 1, vec![wave.clone(), wave.scale(Complex::new(0.0, 1.0))]).unwrap();
        assert!(parametrix_residual(&w).unwrap().max_abs() < 1e-12);
        let r = complex_parametrix_check(3, 2, 3, 8, &mut rng()).unwrap();
        assert!(r.max_residual < 1e-10);
    }
}
