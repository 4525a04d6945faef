use num_complex::Complex;

use super::grid::{GridFunction, GridSpectrum};
use super::QuantizeError;
use crate::Real;

/// `⟨k⟩^{2s} = (1 + |k|²)^s`
fn weight<T: Real>(k: &[i64], s: T) -> T {
    let k2 = k
        .iter()
        .fold(T::zero(), |a, &kj| a + T::of((kj * kj) as f64));
    (T::one() + k2).powf(s)
}

/// `‖u‖_s = (Σ_k (1+|k|²)^s |û(k)|²)^{1/2}`
pub fn sobolev_norm<T: Real>(u: &GridFunction<T>, s: T) -> T {
    spectrum_sobolev_norm(&u.spectrum(), s)
}

pub fn spectrum_sobolev_norm<T: Real>(spec: &GridSpectrum<T>, s: T) -> T {
    spec.iter()
        .fold(T::zero(), |acc, (k, c)| acc + weight(&k, s) * c.norm_sqr())
        .sqrt()
}

/// `⟨u, v⟩ = Σ_k û(k) conj(v̂(k))`, the pairing of `H^s` with `H^{−s}`.
pub fn duality_pair<T: Real>(
    u: &GridFunction<T>,
    v: &GridFunction<T>,
) -> Result<Complex<T>, QuantizeError> {
    u.same_grid(v)?;
    let (a, b) = (u.spectrum(), v.spectrum());
    Ok(a.coeffs()
        .iter()
        .zip(b.coeffs())
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| {
            acc + x * y.conj()
        }))
}

/// Outcome of a resolution study of `‖u‖_s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SobolevVerdict {
    /// Increments shrink geometrically: the norm converges.
    Converges,
    /// Increments do not shrink: the norm grows without bound.
    Grows,
}

/// Sobolev norms of one function resolved on successively doubled grids.
#[derive(Debug, Clone, PartialEq)]
pub struct SobolevTrend {
    pub s: f64,
    /// `(M, ‖u_M‖_s²)` for each grid.
    pub squared_norms: Vec<(usize, f64)>,
    /// Differences of successive squared norms.
    pub increments: Vec<f64>,
    /// Ratios of successive increments; for `|û(k)| ~ |k|^{−a}` in one
    /// dimension these approach `2^{2s−2a+1}`.
    pub ratios: Vec<f64>,
    pub verdict: SobolevVerdict,
}

/// A ratio at or above this value counts as non-decaying. Logarithmic
/// divergence (ratio exactly 1 in the limit) approaches 1 from below at
/// finite resolution, hence the margin.
pub const GROWTH_RATIO: f64 = 0.99;

/// Classifies `‖u‖_s` as convergent or growing from squared norms on grids
/// of increasing size. No finite grid decides membership sharply, so the
/// verdict reads the trend of the last increment ratio.
pub fn sobolev_trend<T: Real>(
    grids: &[GridFunction<T>],
    s: f64,
) -> Result<SobolevTrend, QuantizeError> {
    if grids.len() < 3 {
        return Err(QuantizeError::TooFewGrids(grids.len()));
    }
    let squared_norms: Vec<(usize, f64)> = grids
        .iter()
        .map(|g| {
            (
                g.points_per_axis(),
                sobolev_norm(g, T::of(s)).to_f64_lossy().powi(2),
            )
        })
        .collect();
    let increments: Vec<f64> = squared_norms.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let ratios: Vec<f64> = increments.windows(2).map(|w| w[1] / w[0]).collect();
    let last = *ratios.last().expect("at least one ratio");
    Ok(SobolevTrend {
        s,
        squared_norms,
        increments,
        ratios,
        verdict: if last >= GROWTH_RATIO {
            SobolevVerdict::Grows
        } else {
            SobolevVerdict::Converges
        },
    })
}
