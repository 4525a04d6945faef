use num_complex::Complex;
use rustfft::FftPlanner;

use super::QuantizeError;
use crate::symbolic::{DomainError, Expr};
use crate::Real;

/// Complex samples of a function on the periodic lattice
/// `(2π/M)·{0, …, M−1}ⁿ`, stored row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T> {
    n: usize,
    m: usize,
    values: Vec<Complex<T>>,
}

/// Discrete Fourier coefficients `û(k) = M^{−n} Σ_x u(x) e^{−ik·x}` for
/// `k ∈ {−M/2, …, M/2−1}ⁿ`, stored in transform order (index `i` holds
/// wavenumber `i` for `i < M/2` and `i − M` otherwise).
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpectrum<T> {
    n: usize,
    m: usize,
    coeffs: Vec<Complex<T>>,
}

fn check_shape(n: usize, m: usize) -> Result<(), QuantizeError> {
    if !(1..=3).contains(&n) || m < 2 || !m.is_power_of_two() {
        return Err(QuantizeError::InvalidGrid { n, m });
    }
    Ok(())
}

/// Multi-index of the flat position `idx`.
fn unravel(mut idx: usize, n: usize, m: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = idx % m;
        idx /= m;
    }
    out
}

fn ravel(ix: &[usize], m: usize) -> usize {
    ix.iter().fold(0, |acc, &i| acc * m + i)
}

pub(crate) fn wavenumber(i: usize, m: usize) -> i64 {
    if i < m / 2 {
        i as i64
    } else {
        i as i64 - m as i64
    }
}

fn slot_of(k: i64, m: usize) -> Option<usize> {
    let half = (m / 2) as i64;
    if k < -half || k >= half {
        return None;
    }
    Some(if k >= 0 {
        k as usize
    } else {
        (k + m as i64) as usize
    })
}

/// In-place transform along every axis; unnormalized in both directions.
fn fft_nd<T: Real>(data: &mut [Complex<T>], n: usize, m: usize, inverse: bool) {
    let mut planner = FftPlanner::<T>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(m)
    } else {
        planner.plan_fft_forward(m)
    };
    let total = data.len();
    let mut line = vec![Complex::new(T::zero(), T::zero()); m];
    for axis in 0..n {
        let stride = m.pow((n - 1 - axis) as u32);
        for start in 0..total {
            // first element of each line along `axis`
            if !(start / stride).is_multiple_of(m) {
                continue;
            }
            for (j, v) in line.iter_mut().enumerate() {
                *v = data[start + j * stride];
            }
            fft.process(&mut line);
            for (j, v) in line.iter().enumerate() {
                data[start + j * stride] = *v;
            }
        }
    }
}

impl<T: Real> GridFunction<T> {
    pub fn new(n: usize, m: usize, values: Vec<Complex<T>>) -> Result<Self, QuantizeError> {
        check_shape(n, m)?;
        if values.len() != m.pow(n as u32) {
            return Err(QuantizeError::ValueCount {
                expected: m.pow(n as u32),
                found: values.len(),
            });
        }
        Ok(GridFunction { n, m, values })
    }

    pub fn zeros(n: usize, m: usize) -> Result<Self, QuantizeError> {
        check_shape(n, m)?;
        Ok(GridFunction {
            n,
            m,
            values: vec![Complex::new(T::zero(), T::zero()); m.pow(n as u32)],
        })
    }

    pub fn from_fn(
        n: usize,
        m: usize,
        f: impl Fn(&[T]) -> Complex<T>,
    ) -> Result<Self, QuantizeError> {
        let mut g = GridFunction::zeros(n, m)?;
        for idx in 0..g.values.len() {
            let x = g.point(idx);
            g.values[idx] = f(&x);
        }
        Ok(g)
    }

    /// Samples an expression in `x` (ξ-free) on the lattice.
    pub fn from_expr(expr: &Expr, n: usize, m: usize) -> Result<Self, QuantizeError> {
        let mut g = GridFunction::zeros(n, m)?;
        for idx in 0..g.values.len() {
            let x = g.point(idx);
            g.values[idx] = expr.eval(&x, &[])?;
        }
        Ok(g)
    }

    /// `e^{ik·x}`.
    pub fn plane_wave(n: usize, m: usize, k: &[i64]) -> Result<Self, QuantizeError> {
        if k.len() != n {
            return Err(QuantizeError::DimensionMismatch {
                expected: n,
                found: k.len(),
            });
        }
        GridFunction::from_fn(n, m, |x| {
            let phase = x
                .iter()
                .zip(k)
                .fold(T::zero(), |a, (&xj, &kj)| a + xj * T::of(kj as f64));
            Complex::new(phase.cos(), phase.sin())
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn points_per_axis(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn index_of(&self, flat: usize) -> Vec<usize> {
        unravel(flat, self.n, self.m)
    }

    pub fn flat_index(&self, ix: &[usize]) -> usize {
        ravel(ix, self.m)
    }

    /// Lattice coordinates of the flat position `idx`.
    pub fn point(&self, idx: usize) -> Vec<T> {
        let h = (T::PI() + T::PI()) / T::of_usize(self.m);
        unravel(idx, self.n, self.m)
            .into_iter()
            .map(|i| T::of_usize(i) * h)
            .collect()
    }

    pub fn same_grid(&self, other: &GridFunction<T>) -> Result<(), QuantizeError> {
        if self.n != other.n || self.m != other.m {
            return Err(QuantizeError::GridMismatch {
                left: (self.n, self.m),
                right: (other.n, other.m),
            });
        }
        Ok(())
    }

    pub fn spectrum(&self) -> GridSpectrum<T> {
        let mut data = self.values.clone();
        fft_nd(&mut data, self.n, self.m, false);
        let scale = T::one() / T::of_usize(self.values.len());
        for v in &mut data {
            *v = *v * scale;
        }
        GridSpectrum {
            n: self.n,
            m: self.m,
            coeffs: data,
        }
    }

    pub fn zip_with(
        &self,
        other: &GridFunction<T>,
        f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>,
    ) -> Result<Self, QuantizeError> {
        self.same_grid(other)?;
        Ok(GridFunction {
            n: self.n,
            m: self.m,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        GridFunction {
            n: self.n,
            m: self.m,
            values: self.values.iter().map(|&a| f(a)).collect(),
        }
    }

    pub fn add(&self, other: &GridFunction<T>) -> Result<Self, QuantizeError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridFunction<T>) -> Result<Self, QuantizeError> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &GridFunction<T>) -> Result<Self, QuantizeError> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        self.map(|a| a * c)
    }

    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, v| acc.max(v.norm()))
    }

    /// `(M^{−n} Σ |u|²)^{1/2}`, equal to the `ℓ²` norm of the spectrum.
    pub fn rms(&self) -> T {
        let s = self
            .values
            .iter()
            .fold(T::zero(), |acc, v| acc + v.norm_sqr());
        (s / T::of_usize(self.values.len())).sqrt()
    }
}

impl<T: Real> GridSpectrum<T> {
    pub fn zeros(n: usize, m: usize) -> Result<Self, QuantizeError> {
        check_shape(n, m)?;
        Ok(GridSpectrum {
            n,
            m,
            coeffs: vec![Complex::new(T::zero(), T::zero()); m.pow(n as u32)],
        })
    }

    /// Builds a spectrum from a function of the wavenumber.
    pub fn from_fn(
        n: usize,
        m: usize,
        mut f: impl FnMut(&[i64]) -> Complex<T>,
    ) -> Result<Self, QuantizeError> {
        let mut s = GridSpectrum::zeros(n, m)?;
        for idx in 0..s.coeffs.len() {
            let k = s.wavenumber(idx);
            s.coeffs[idx] = f(&k);
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn points_per_axis(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.coeffs
    }

    /// Wavenumber `k` stored at flat position `idx`.
    pub fn wavenumber(&self, idx: usize) -> Vec<i64> {
        unravel(idx, self.n, self.m)
            .into_iter()
            .map(|i| wavenumber(i, self.m))
            .collect()
    }

    pub fn slot(&self, k: &[i64]) -> Option<usize> {
        if k.len() != self.n {
            return None;
        }
        let ix: Option<Vec<usize>> = k.iter().map(|&kj| slot_of(kj, self.m)).collect();
        ix.map(|ix| ravel(&ix, self.m))
    }

    /// `û(k)`, or zero outside the resolved band.
    pub fn get(&self, k: &[i64]) -> Complex<T> {
        self.slot(k)
            .map(|i| self.coeffs[i])
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn set(&mut self, k: &[i64], v: Complex<T>) -> Result<(), QuantizeError> {
        let i = self.slot(k).ok_or(QuantizeError::OutOfBand(k.to_vec()))?;
        self.coeffs[i] = v;
        Ok(())
    }

    /// Inverse transform back to lattice values.
    pub fn to_grid(&self) -> GridFunction<T> {
        let mut data = self.coeffs.clone();
        fft_nd(&mut data, self.n, self.m, true);
        GridFunction {
            n: self.n,
            m: self.m,
            values: data,
        }
    }

    /// `Σ_k |û(k)|²`
    pub fn energy(&self) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |acc, v| acc + v.norm_sqr())
    }

    /// Iterator over `(k, û(k))`.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<i64>, Complex<T>)> + '_ {
        (0..self.coeffs.len()).map(move |i| (self.wavenumber(i), self.coeffs[i]))
    }
}

impl From<DomainError> for QuantizeError {
    fn from(e: DomainError) -> Self {
        QuantizeError::Domain(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_grid(n: usize, m: usize, seed: u64) -> GridFunction<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vals = (0..m.pow(n as u32))
            .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        GridFunction::new(n, m, vals).unwrap()
    }

    #[test]
    fn round_trip_and_parseval() {
        for (n, m) in [(1, 64), (2, 16), (3, 8)] {
            let u = random_grid(n, m, 7);
            let s = u.spectrum();
            let back = s.to_grid();
            let err = back.sub(&u).unwrap().max_abs() / u.max_abs();
            assert!(err < 1e-12, "{err}");
            let lhs = s.energy();
            let rhs = u.rms().powi(2);
            assert!((lhs - rhs).abs() < 1e-12 * rhs);
        }
    }

    #[test]
    fn plane_wave_has_single_coefficient() {
        let u = GridFunction::<f64>::plane_wave(2, 16, &[3, -5]).unwrap();
        let s = u.spectrum();
        for (k, c) in s.iter() {
            let expect = if k == vec![3, -5] { 1.0 } else { 0.0 };
            assert!((c - Complex::new(expect, 0.0)).norm() < 1e-13, "{k:?} {c}");
        }
    }

    #[test]
    fn band_edges() {
        let s = GridSpectrum::<f64>::zeros(1, 8).unwrap();
        assert_eq!(s.slot(&[-4]), Some(4));
        assert_eq!(s.slot(&[3]), Some(3));
        assert_eq!(s.slot(&[4]), None);
        assert_eq!(s.wavenumber(5), vec![-3]);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(GridFunction::<f64>::zeros(1, 12).is_err());
        assert!(GridFunction::<f64>::zeros(4, 8).is_err());
        assert!(GridFunction::<f64>::new(1, 8, vec![Complex::new(0.0, 0.0); 7]).is_err());
    }

    #[test]
    fn single_precision_round_trip() {
        let u = GridFunction::<f32>::plane_wave(1, 32, &[4]).unwrap();
        let back = u.spectrum().to_grid();
        assert!(back.sub(&u).unwrap().max_abs() < 1e-5);
    }
}
