//! Hamiltonian vector fields of principal symbols and their integral curves.

use num_complex::Complex;
use thiserror::Error;

use crate::symbolic::sampling::phase_samples;
use crate::symbolic::{DomainError, Expr, HomogeneousTerm, Var};
use crate::Real;

/// Default local error tolerance of the adaptive integrator.
pub const DEFAULT_FLOW_TOL: f64 = 1e-9;
/// Trajectories entering `|ξ| <` this value are aborted.
pub const XI_BARRIER: f64 = 1e-8;
/// Largest `|p|` accepted as "on the characteristic variety".
pub const CHAR_TOL: f64 = 1e-6;

const MAX_STEPS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HamiltonError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("symbol is not real-valued: {value} at a sample point")]
    NotReal { value: Complex<f64> },
    #[error("integration failed at t = {t}: {reason}")]
    StepFailure { t: f64, reason: String },
    #[error("point {index} is not characteristic: |p| = {value:e}")]
    NotCharacteristic { index: usize, value: f64 },
    #[error("expected a symbol of degree {expected}, found {found}")]
    WrongDegree { expected: f64, found: f64 },
    #[error("phase point has dimension {found}, symbol has {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// A point `(x, ξ)` of the cotangent bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint<T> {
    pub x: Vec<T>,
    pub xi: Vec<T>,
}

impl<T: Real> PhasePoint<T> {
    pub fn new(x: Vec<T>, xi: Vec<T>) -> Self {
        PhasePoint { x, xi }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn xi_norm(&self) -> T {
        self.xi.iter().fold(T::zero(), |a, &v| a + v * v).sqrt()
    }

    /// Coordinates as one `2n` vector `(x, ξ)`.
    pub fn to_vec(&self) -> Vec<T> {
        self.x.iter().chain(&self.xi).copied().collect()
    }

    pub fn from_slice(v: &[T]) -> Self {
        let n = v.len() / 2;
        PhasePoint {
            x: v[..n].to_vec(),
            xi: v[n..].to_vec(),
        }
    }

    /// Euclidean distance in phase space.
    pub fn distance(&self, other: &PhasePoint<T>) -> T {
        self.to_vec()
            .iter()
            .zip(other.to_vec())
            .fold(T::zero(), |a, (&u, v)| a + (u - v) * (u - v))
            .sqrt()
    }

    /// The point with `x` reduced to the periodic box `[0, 2π)ⁿ`.
    pub fn wrapped(&self) -> Self {
        let period = T::PI() + T::PI();
        PhasePoint {
            x: self
                .x
                .iter()
                .map(|&v| {
                    let r = v % period;
                    if r < T::zero() {
                        r + period
                    } else {
                        r
                    }
                })
                .collect(),
            xi: self.xi.clone(),
        }
    }
}

/// `H_p = Σ ∂p/∂ξⱼ ∂/∂xⱼ − ∂p/∂xⱼ ∂/∂ξⱼ` of a real principal symbol.
#[derive(Debug, Clone)]
pub struct HamiltonianField {
    p: HomogeneousTerm,
    dp_dxi: Vec<Expr>,
    dp_dx: Vec<Expr>,
}

impl HamiltonianField {
    /// Builds the field, rejecting symbols with non-real sample values.
    pub fn new(p: &HomogeneousTerm) -> Result<Self, HamiltonError> {
        let n = p.dim();
        for s in phase_samples(n) {
            let v = p.eval(&s.x, &s.xi)?;
            if v.im.abs() > 1e-9 * v.re.abs().max(1.0) {
                return Err(HamiltonError::NotReal { value: v });
            }
        }
        Ok(HamiltonianField {
            p: p.clone(),
            dp_dxi: (0..n).map(|j| p.expr().diff(Var::xi(j))).collect(),
            dp_dx: (0..n).map(|j| p.expr().diff(Var::x(j))).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.p.dim()
    }

    pub fn symbol(&self) -> &HomogeneousTerm {
        &self.p
    }

    /// `(∂p/∂ξ, −∂p/∂x)` at `z`.
    pub fn eval<T: Real>(&self, z: &PhasePoint<T>) -> Result<Vec<T>, DomainError> {
        let mut out = Vec::with_capacity(2 * self.dim());
        for e in &self.dp_dxi {
            out.push(e.eval(&z.x, &z.xi)?.re);
        }
        for e in &self.dp_dx {
            out.push(-e.eval(&z.x, &z.xi)?.re);
        }
        Ok(out)
    }

    /// Real part of `p(z)`.
    pub fn value<T: Real>(&self, z: &PhasePoint<T>) -> Result<T, DomainError> {
        Ok(self.p.expr().eval(&z.x, &z.xi)?.re)
    }

    fn check_dim<T>(&self, z: &PhasePoint<T>) -> Result<(), HamiltonError> {
        if z.x.len() != self.dim() || z.xi.len() != self.dim() {
            return Err(HamiltonError::DimensionMismatch {
                expected: self.dim(),
                found: z.x.len().max(z.xi.len()),
            });
        }
        Ok(())
    }
}

/// Step statistics of one integration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlowStats {
    pub accepted: usize,
    pub rejected: usize,
    pub min_step: f64,
    pub max_step: f64,
}

/// Sampled integral curve of a Hamiltonian field. Sample times run from 0
/// towards the final time: increasing for forward flows, decreasing for
/// backward ones.
#[derive(Debug, Clone)]
pub struct Bicharacteristic<T> {
    pub samples: Vec<(T, PhasePoint<T>)>,
    pub p_values: Vec<T>,
    pub stats: FlowStats,
}

impl<T: Real> Bicharacteristic<T> {
    pub fn start(&self) -> &PhasePoint<T> {
        &self.samples[0].1
    }

    pub fn end(&self) -> &PhasePoint<T> {
        &self.samples[self.samples.len() - 1].1
    }

    pub fn final_time(&self) -> T {
        self.samples[self.samples.len() - 1].0
    }

    /// `max_t |p(γ(t)) − p(γ(0))|`.
    pub fn max_drift(&self) -> T {
        let p0 = self.p_values[0];
        self.p_values
            .iter()
            .fold(T::zero(), |a, &v| a.max((v - p0).abs()))
    }
}

// Dormand–Prince 5(4) tableau
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `H_p` from `start` for time `t_final` (either sign) with an
/// adaptive Dormand–Prince 5(4) pair at local tolerance `tol`.
pub fn flow<T: Real>(
    p: &HomogeneousTerm,
    start: &PhasePoint<T>,
    t_final: T,
    tol: f64,
) -> Result<Bicharacteristic<T>, HamiltonError> {
    let field = HamiltonianField::new(p)?;
    flow_field(&field, start, t_final, tol)
}

pub fn flow_field<T: Real>(
    field: &HamiltonianField,
    start: &PhasePoint<T>,
    t_final: T,
    tol: f64,
) -> Result<Bicharacteristic<T>, HamiltonError> {
    field.check_dim(start)?;
    let barrier = T::of(XI_BARRIER);
    if start.xi_norm() < barrier {
        return Err(HamiltonError::StepFailure {
            t: 0.0,
            reason: "start point has xi = 0".into(),
        });
    }
    // tolerances below a few ulps cannot be met in the working precision
    let tol = T::of(tol).max(T::epsilon() * T::of(100.0));
    let mut traj = Bicharacteristic {
        samples: vec![(T::zero(), start.clone())],
        p_values: vec![field.value(start)?],
        stats: FlowStats::default(),
    };
    if t_final == T::zero() {
        return Ok(traj);
    }
    let dir = t_final.signum();
    let span = t_final.abs();
    let mut t = T::zero();
    let mut y = start.to_vec();
    let mut h = span.min(T::of(0.05));
    let h_min = T::epsilon() * T::of(16.0) * span.max(T::one());
    let mut stats = FlowStats {
        min_step: f64::INFINITY,
        ..FlowStats::default()
    };
    let fail = |t: T, reason: &str| HamiltonError::StepFailure {
        t: t.to_f64_lossy(),
        reason: reason.to_string(),
    };

    let rhs = |y: &[T]| -> Result<Vec<T>, HamiltonError> {
        let z = PhasePoint::from_slice(y);
        if z.xi_norm() < barrier {
            return Err(HamiltonError::StepFailure {
                t: f64::NAN,
                reason: "trajectory reached xi = 0".into(),
            });
        }
        let v = field.eval(&z)?;
        if v.iter().any(|a| !a.is_finite()) {
            return Err(HamiltonError::StepFailure {
                t: f64::NAN,
                reason: "non-finite vector field".into(),
            });
        }
        Ok(v)
    };

    for _ in 0..MAX_STEPS {
        if t >= span {
            break;
        }
        let last = t + h >= span;
        if last {
            h = span - t;
        }
        let mut k: Vec<Vec<T>> = Vec::with_capacity(7);
        let mut ok = true;
        for row in A.iter() {
            let yi: Vec<T> = (0..y.len())
                .map(|c| {
                    let inc = k
                        .iter()
                        .zip(row)
                        .fold(T::zero(), |a, (ks, w)| a + T::of(*w) * ks[c]);
                    y[c] + dir * h * inc
                })
                .collect();
            match rhs(&yi) {
                Ok(v) => k.push(v),
                Err(HamiltonError::StepFailure { .. }) | Err(HamiltonError::Domain(_)) => {
                    ok = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        let (y_new, err) = if ok {
            let mut y5 = y.clone();
            let mut err = T::zero();
            for c in 0..y.len() {
                let s5 = (0..7).fold(T::zero(), |a, s| a + T::of(B5[s]) * k[s][c]);
                let s4 = (0..7).fold(T::zero(), |a, s| a + T::of(B4[s]) * k[s][c]);
                y5[c] = y[c] + dir * h * s5;
                let scale = tol * (T::one() + y[c].abs().max(y5[c].abs()));
                err = err.max((h * (s5 - s4)).abs() / scale);
            }
            (y5, err)
        } else {
            (y.clone(), T::infinity())
        };
        if err <= T::one() {
            t = if last { span } else { t + h };
            y = y_new;
            let z = PhasePoint::from_slice(&y);
            if z.xi_norm() < barrier {
                return Err(fail(dir * t, "trajectory reached xi = 0"));
            }
            traj.p_values.push(field.value(&z)?);
            traj.samples.push((dir * t, z));
            stats.accepted += 1;
            let hf = h.to_f64_lossy();
            stats.min_step = stats.min_step.min(hf);
            stats.max_step = stats.max_step.max(hf);
        } else {
            stats.rejected += 1;
        }
        let factor = if err == T::zero() {
            T::of(5.0)
        } else if err.is_finite() {
            (T::of(0.9) * err.powf(T::of(-0.2)))
                .max(T::of(0.2))
                .min(T::of(5.0))
        } else {
            T::of(0.25)
        };
        h = h * factor;
        if t < span && h < h_min {
            return Err(fail(dir * t, "step size underflow"));
        }
    }
    if t < span {
        return Err(fail(dir * t, "step budget exhausted"));
    }
    traj.stats = stats;
    Ok(traj)
}

/// Flows every point of a subset of the characteristic variety for time
/// `t_final`.
pub fn propagate_wavefront<T: Real>(
    p: &HomogeneousTerm,
    initial: &[PhasePoint<T>],
    t_final: T,
    tol: f64,
) -> Result<Vec<PhasePoint<T>>, HamiltonError> {
    let field = HamiltonianField::new(p)?;
    for (index, z) in initial.iter().enumerate() {
        field.check_dim(z)?;
        let v = field.value(z)?.abs().to_f64_lossy();
        if v > CHAR_TOL {
            return Err(HamiltonError::NotCharacteristic { index, value: v });
        }
    }
    initial
        .iter()
        .map(|z| flow_field(&field, z, t_final, tol).map(|b| b.end().clone()))
        .collect()
}

/// Solution of `∂q/∂t − H_{p₁} q = 0`, `q(0) = q_init`, at `(t, z)`:
/// `q(t, z) = q_init(Φ_t(z))`.
pub fn transport_solve<T: Real>(
    p1: &HomogeneousTerm,
    q_init: &Expr,
    t: T,
    z: &PhasePoint<T>,
    tol: f64,
) -> Result<Complex<T>, HamiltonError> {
    if (p1.degree() - 1.0).abs() > 1e-12 {
        return Err(HamiltonError::WrongDegree {
            expected: 1.0,
            found: p1.degree(),
        });
    }
    let traj = flow(p1, z, t, tol)?;
    let end = traj.end();
    Ok(q_init.eval(&end.x, &end.xi)?)
}
