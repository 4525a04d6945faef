use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;

use super::QuantizeError;
use crate::symbolic::Expr;

/// Samples used for winding numbers and Fourier coefficients of `a±`.
pub const CIRCLE_SAMPLES: usize = 256;
/// Relative singular-value threshold for the rank decision.
pub const RANK_TOL: f64 = 1e-8;
/// Second truncation size is `K + STABILITY_STEP`.
pub const STABILITY_STEP: usize = 8;

/// Which half of the symbol vanished.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    Plus,
    Minus,
}

/// Kernel and cokernel counts of one truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub k: usize,
    pub dim_ker: usize,
    pub dim_coker: usize,
    /// Singular values of the two sections below `1e−2·σ_max`, ascending.
    pub small_singular_values: Vec<f64>,
}

impl Section {
    pub fn index(&self) -> i64 {
        self.dim_ker as i64 - self.dim_coker as i64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexReport {
    pub wind_plus: i64,
    pub wind_minus: i64,
    pub index: i64,
    pub k: usize,
    pub sections: [Section; 2],
    pub rank_tol: f64,
}

fn samples(a: &Expr, which: Half) -> Result<Vec<Complex64>, QuantizeError> {
    let mut out = Vec::with_capacity(CIRCLE_SAMPLES);
    for j in 0..CIRCLE_SAMPLES {
        let x = 2.0 * PI * j as f64 / CIRCLE_SAMPLES as f64;
        let v = a.eval(&[x], &[])?;
        if v.norm() < 1e-8 {
            return Err(QuantizeError::SymbolVanishes { half: which, x });
        }
        out.push(v);
    }
    Ok(out)
}

/// Winding number of a closed sampled curve around the origin.
pub fn winding_number(values: &[Complex64]) -> i64 {
    let total: f64 = (0..values.len())
        .map(|j| (values[(j + 1) % values.len()] / values[j]).arg())
        .sum();
    (total / (2.0 * PI)).round() as i64
}

/// Fourier coefficients `â(n)`, `|n| < CIRCLE_SAMPLES/2`, and the largest
/// `|n|` carrying a coefficient above round-off.
fn coefficients(values: &[Complex64]) -> (Vec<Complex64>, usize) {
    let mut data = values.to_vec();
    FftPlanner::new()
        .plan_fft_forward(data.len())
        .process(&mut data);
    let m = data.len();
    for v in &mut data {
        *v /= m as f64;
    }
    let peak = data.iter().fold(0.0f64, |a, v| a.max(v.norm()));
    let band = (0..m / 2)
        .filter(|&n| data[n].norm() > 1e-14 * peak || data[(m - n) % m].norm() > 1e-14 * peak)
        .max()
        .unwrap_or(0);
    (data, band)
}

fn coeff(c: &[Complex64], n: i64) -> Complex64 {
    let m = c.len() as i64;
    if n.abs() >= m / 2 {
        return Complex64::new(0.0, 0.0);
    }
    c[n.rem_euclid(m) as usize]
}

/// Matrix entry of `P = a₊Π₊ + a₋Π₋` on Fourier modes: column `j ≥ 0` uses
/// `a₊`, column `j < 0` uses `a₋`.
fn entry(cp: &[Complex64], cm: &[Complex64], k: i64, j: i64) -> Complex64 {
    if j >= 0 {
        coeff(cp, k - j)
    } else {
        coeff(cm, k - j)
    }
}

fn nullity(m: &DMatrix<Complex64>, small: &mut Vec<f64>) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().fold(0.0f64, |a, &v| a.max(v));
    for &v in sv.iter() {
        if v < 1e-2 * top {
            small.push(v);
        }
    }
    sv.iter().filter(|&&v| v <= RANK_TOL * top).count()
}

/// Kernel and cokernel of the truncation to input modes `[−K, K]`. Outputs
/// are kept on `[−K−B, K+B]` with `B` the bandwidth of `a±`, so the sections
/// are tall and see every image coefficient; a square truncation would
/// always report index 0.
fn section(cp: &[Complex64], cm: &[Complex64], band: usize, k: usize) -> Section {
    let (k, b) = (k as i64, band as i64);
    let cols = (2 * k + 1) as usize;
    let rows = (2 * (k + b) + 1) as usize;
    let a = DMatrix::from_fn(rows, cols, |r, c| {
        entry(cp, cm, r as i64 - k - b, c as i64 - k)
    });
    // adjoint: A*(r, c) = conj(A(c, r)) with the same tall shape
    let a_star = DMatrix::from_fn(rows, cols, |r, c| {
        entry(cp, cm, c as i64 - k, r as i64 - k - b).conj()
    });
    let mut small = Vec::new();
    let dim_ker = nullity(&a, &mut small);
    let dim_coker = nullity(&a_star, &mut small);
    small.sort_by(f64::total_cmp);
    Section {
        k: k as usize,
        dim_ker,
        dim_coker,
        small_singular_values: small,
    }
}

/// Index of `P = a₊(x)Π₊ + a₋(x)Π₋` on the circle, with `Π±` the Fourier
/// projections onto `j ≥ 0` and `j < 0`, together with the winding numbers
/// of `a±`.
pub fn circle_index(a_plus: &Expr, a_minus: &Expr, k: usize) -> Result<IndexReport, QuantizeError> {
    let sp = samples(a_plus, Half::Plus)?;
    let sm = samples(a_minus, Half::Minus)?;
    let (cp, bp) = coefficients(&sp);
    let (cm, bm) = coefficients(&sm);
    let band = bp.max(bm);
    let first = section(&cp, &cm, band, k);
    let second = section(&cp, &cm, band, k + STABILITY_STEP);
    if first.index() != second.index() {
        return Err(QuantizeError::Unstable {
            k,
            index: first.index(),
            index_next: second.index(),
        });
    }
    Ok(IndexReport {
        wind_plus: winding_number(&sp),
        wind_minus: winding_number(&sm),
        index: first.index(),
        k,
        sections: [first, second],
        rank_tol: RANK_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(w: i64) -> Expr {
        (Expr::imag_unit() * Expr::real(w as f64) * Expr::x(0)).exp()
    }

    #[test]
    fn identity_has_index_zero() {
        let r = circle_index(&Expr::one(), &Expr::one(), 32).unwrap();
        assert_eq!((r.wind_plus, r.wind_minus, r.index), (0, 0, 0));
    }

    #[test]
    fn shift_examples() {
        let r = circle_index(&e(1), &Expr::one(), 32).unwrap();
        assert_eq!((r.wind_plus, r.wind_minus), (1, 0));
        assert_eq!(r.index, -1);
        assert_eq!((r.sections[0].dim_ker, r.sections[0].dim_coker), (0, 1));
        let r = circle_index(&Expr::one(), &e(2), 32).unwrap();
        assert_eq!((r.wind_plus, r.wind_minus), (0, 2));
        assert_eq!(r.index, 2);
    }

    #[test]
    fn smooth_nonvanishing_factor_does_not_change_index() {
        let f = Expr::real(2.0) + Expr::x(0).cos();
        let r = circle_index(&(f.clone() * e(-1)), &(f * e(1)), 32).unwrap();
        assert_eq!((r.wind_plus, r.wind_minus, r.index), (-1, 1, 2));
    }

    #[test]
    fn vanishing_symbol_is_rejected() {
        let a = Expr::x(0).sin();
        assert!(matches!(
            circle_index(&a, &Expr::one(), 8),
            Err(QuantizeError::SymbolVanishes {
                half: Half::Plus,
                ..
            })
        ));
    }
}
