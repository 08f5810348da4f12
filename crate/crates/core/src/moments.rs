//! First and second moments of `E`, `C`, `S` and `L`, and the covariance
//! matrix of the trigonometric components.
//!
//! Sign convention: `E = C - i S` with `E|l> = |l-1>`, so in the angle
//! representation `C = cos(phi)`, `S = sin(phi)` and
//! `<C> = Re <E>`, `<S> = -Im <E>`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{to_grid, CircleState};

/// Eigenvalues down to this are treated as roundoff and clamped to zero.
pub const PSD_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularMoments {
    /// `<E>`
    pub e1: Complex64,
    /// `<E^2>`
    pub e2: Complex64,
    /// `<L>`
    pub l1: f64,
    /// `<L^2>`
    pub l2: f64,
}

impl AngularMoments {
    pub fn mean_c(&self) -> f64 {
        self.e1.re
    }

    pub fn mean_s(&self) -> f64 {
        -self.e1.im
    }

    /// `<E^2> - <E>^2`, the second central moment of `E` without conjugation.
    pub fn pseudo_variance(&self) -> Complex64 {
        self.e2 - self.e1 * self.e1
    }
}

/// `Gamma = [[(dS)^2, d(CS)], [d(CS), (dC)^2]]` and its invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix {
    pub var_s: f64,
    pub var_c: f64,
    pub cov_cs: f64,
    pub trace: f64,
    pub det: f64,
    pub gamma_minus: f64,
    pub gamma_plus: f64,
}

impl CovarianceMatrix {
    /// Assembles the matrix from its entries, computing the eigenvalues in
    /// closed form. Fails if an eigenvalue is below `-PSD_SLACK`.
    pub fn from_entries(var_s: f64, var_c: f64, cov_cs: f64) -> Result<Self> {
        let trace = var_s + var_c;
        let det = var_s * var_c - cov_cs * cov_cs;
        let spread = (var_s - var_c).hypot(2.0 * cov_cs);
        let mut gamma_plus = 0.5 * (trace + spread);
        let mut gamma_minus = if gamma_plus > 0.0 {
            // det / gamma_plus avoids cancellation in (trace - spread) / 2
            det / gamma_plus
        } else {
            0.5 * (trace - spread)
        };
        for g in [&mut gamma_minus, &mut gamma_plus] {
            if *g < -PSD_SLACK {
                return Err(Error::NotPositive { eigenvalue: *g });
            }
            if *g < 0.0 {
                *g = 0.0;
            }
        }
        Ok(Self {
            var_s: var_s.max(0.0),
            var_c: var_c.max(0.0),
            cov_cs,
            trace,
            det,
            gamma_minus,
            gamma_plus,
        })
    }

    /// `x^t Gamma x` for `x = (x_s, x_c)` in the `(S, C)` ordering.
    pub fn quadratic_form(&self, x: [f64; 2]) -> f64 {
        self.var_s * x[0] * x[0] + 2.0 * self.cov_cs * x[0] * x[1] + self.var_c * x[1] * x[1]
    }

    /// `Gamma^{-1} v`, or `None` when singular.
    pub fn solve(&self, v: [f64; 2]) -> Option<[f64; 2]> {
        if self.det == 0.0 {
            return None;
        }
        Some([
            (self.var_c * v[0] - self.cov_cs * v[1]) / self.det,
            (self.var_s * v[1] - self.cov_cs * v[0]) / self.det,
        ])
    }
}

/// Moments as sums over adjacent coefficients:
/// `<E> = sum conj(c_{l-1}) c_l`, `<E^2> = sum conj(c_{l-2}) c_l`.
pub fn moments_from_coeffs(state: &CircleState) -> AngularMoments {
    let c = state.coeffs();
    let lag = |k: usize| -> Complex64 { c.iter().zip(&c[k.min(c.len())..]).map(|(a, b)| a.conj() * b).sum() };
    let (l1, l2) = l_moments(state);
    AngularMoments { e1: lag(1), e2: lag(2), l1, l2 }
}

fn l_moments(state: &CircleState) -> (f64, f64) {
    state.iter().fold((0.0, 0.0), |(m1, m2), (l, c)| {
        let w = c.norm_sqr();
        let lf = l as f64;
        (m1 + lf * w, m2 + lf * lf * w)
    })
}

/// Moments of `E` from the sampled density, `<E^n> = int e^{-i n phi} |psi|^2`.
///
/// `L` is unbounded on the grid, so its moments still come from the
/// coefficients. The grid needs at least `4 * width` points.
pub fn quadrature_oracle(state: &CircleState, n_points: usize) -> Result<AngularMoments> {
    let required = 4 * state.width();
    if n_points < required {
        return Err(Error::GridSize { n_points, required });
    }
    let grid = to_grid(state, n_points)?;
    let h = 2.0 * PI / n_points as f64;
    let mut e1 = Complex64::new(0.0, 0.0);
    let mut e2 = Complex64::new(0.0, 0.0);
    for (k, rho) in grid.density().into_iter().enumerate() {
        let phi = grid.phi(k);
        e1 += Complex64::from_polar(rho, -phi);
        e2 += Complex64::from_polar(rho, -2.0 * phi);
    }
    let (l1, l2) = l_moments(state);
    Ok(AngularMoments { e1: e1 * h, e2: e2 * h, l1, l2 })
}

/// Smallest power-of-two grid accepted by [`quadrature_oracle`].
pub fn oracle_grid_size(state: &CircleState) -> usize {
    (4 * state.width()).next_power_of_two()
}

/// Covariance of `(S, C)` from the moments.
///
/// `<C^2> = (1 + Re <E^2>)/2`, `<S^2> = (1 - Re <E^2>)/2`,
/// `<CS> = -Im <E^2> / 2`.
pub fn covariance(m: &AngularMoments) -> Result<CovarianceMatrix> {
    let mc = m.mean_c();
    let ms = m.mean_s();
    let var_c = 0.5 * (1.0 + m.e2.re) - mc * mc;
    let var_s = 0.5 * (1.0 - m.e2.re) - ms * ms;
    let cov_cs = -0.5 * m.e2.im - mc * ms;
    CovarianceMatrix::from_entries(var_s, var_c, cov_cs)
}

/// Circular variance `(dE)^2 = 1 - |<E>|^2`.
pub fn dispersion_e(m: &AngularMoments) -> f64 {
    (1.0 - m.e1.norm_sqr()).clamp(0.0, 1.0)
}

/// `(dL)^2 = <L^2> - <L>^2`.
pub fn dispersion_l(m: &AngularMoments) -> f64 {
    (m.l2 - m.l1 * m.l1).max(0.0)
}

/// Both sides of the two invariant identities tying `<E>` to `Gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantIdentities {
    /// `|<E>|^2`
    pub mean_sq: f64,
    /// `1 - tr Gamma`
    pub one_minus_trace: f64,
    /// `|<E^2> - <E>^2|^2`
    pub pseudo_variance_sq: f64,
    /// `(tr Gamma)^2 - 4 det Gamma`
    pub discriminant: f64,
    /// `((dE)^2)^2`, the scalar reading of the second identity; generally
    /// not equal to `discriminant`
    pub circular_variance_sq: f64,
}

impl InvariantIdentities {
    pub fn mean_residual(&self) -> f64 {
        (self.mean_sq - self.one_minus_trace).abs()
    }

    pub fn discriminant_residual(&self) -> f64 {
        (self.pseudo_variance_sq - self.discriminant).abs()
    }
}

pub fn invariant_identities(m: &AngularMoments, gamma: &CovarianceMatrix) -> InvariantIdentities {
    let var_e = dispersion_e(m);
    InvariantIdentities {
        mean_sq: m.e1.norm_sqr(),
        one_minus_trace: 1.0 - gamma.trace,
        pseudo_variance_sq: m.pseudo_variance().norm_sqr(),
        discriminant: gamma.trace * gamma.trace - 4.0 * gamma.det,
        circular_variance_sq: var_e * var_e,
    }
}
