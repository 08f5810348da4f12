//! Constructors for the named states: von Mises intelligent states, the
//! angular cat state, angular-momentum eigenstates and the Gaussian-damped
//! states that are extremal for the `X` ladder quadratures.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{from_wavefunction, CircleState, DEFAULT_L_MAX_HINT, MAX_L_MAX};
use crate::special_fn::bessel_i;

/// Largest concentration accepted by the constructors.
pub const MAX_KAPPA: f64 = 50.0;

/// Parameters of `psi(phi) ~ exp[i lambda phi + kappa cos(phi + alpha)]`.
///
/// `lambda` is an integer so the wavefunction is single valued on the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VonMisesParams {
    pub kappa: f64,
    pub lambda: i64,
    pub alpha: f64,
}

impl VonMisesParams {
    pub fn new(kappa: f64, lambda: i64, alpha: f64) -> Result<Self> {
        let p = Self { kappa, lambda, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_kappa(self.kappa)?;
        if !self.alpha.is_finite() {
            return Err(Error::Domain(format!("frame angle {} is not finite", self.alpha)));
        }
        if self.lambda.abs() > MAX_L_MAX / 2 {
            return Err(Error::Domain(format!("lambda {} too large", self.lambda)));
        }
        Ok(())
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(0.0..=MAX_KAPPA).contains(&kappa) {
        return Err(Error::Domain(format!("kappa {kappa} outside [0, {MAX_KAPPA}]")));
    }
    Ok(())
}

/// Window hint wide enough to hold a mean momentum of `lambda`.
fn hint_for(lambda: i64) -> i64 {
    DEFAULT_L_MAX_HINT.max(2 * lambda.abs())
}

/// Normalized von Mises wavefunction, evaluated pointwise.
pub fn von_mises_wavefunction(p: VonMisesParams) -> Result<impl Fn(f64) -> Complex64> {
    p.validate()?;
    let norm = (2.0 * PI * bessel_i(0, 2.0 * p.kappa)?).sqrt();
    Ok(move |phi: f64| {
        let amp = (p.kappa * (phi + p.alpha).cos()).exp() / norm;
        Complex64::from_polar(amp, p.lambda as f64 * phi)
    })
}

/// Von Mises state sampled on the angle grid and projected onto `|l>`.
pub fn von_mises(p: VonMisesParams, tail_tol: f64) -> Result<CircleState> {
    let psi = von_mises_wavefunction(p)?;
    from_wavefunction(psi, hint_for(p.lambda), tail_tol)
}

/// Cat-state wavefunction
/// `[e^{kappa cos phi} - i e^{i phi + kappa cos phi}] / sqrt(4 pi I_0(2 kappa))`.
pub fn cat_wavefunction(kappa: f64) -> Result<impl Fn(f64) -> Complex64> {
    check_kappa(kappa)?;
    let norm = (4.0 * PI * bessel_i(0, 2.0 * kappa)?).sqrt();
    Ok(move |phi: f64| {
        let envelope = (kappa * phi.cos()).exp() / norm;
        let shifted = Complex64::new(0.0, -1.0) * Complex64::from_polar(1.0, phi);
        (Complex64::new(1.0, 0.0) + shifted) * envelope
    })
}

/// Superposition of the `lambda = 0` and `lambda = 1` von Mises states.
///
/// Its density is `e^{2 kappa cos phi} (1 + sin phi) / (2 pi I_0(2 kappa))`,
/// computed from the wavefunction; a version with `e^{-2 kappa cos phi}` is
/// the mirror image `phi -> phi + pi` of this one, not the same state.
pub fn cat_state(kappa: f64, tail_tol: f64) -> Result<CircleState> {
    let psi = cat_wavefunction(kappa)?;
    from_wavefunction(psi, DEFAULT_L_MAX_HINT, tail_tol)
}

/// Angular-momentum eigenstate `|l>`.
pub fn l_eigenstate(l: i64) -> Result<CircleState> {
    if l.abs() > MAX_L_MAX {
        return Err(Error::Domain(format!("|l| = {} exceeds {MAX_L_MAX}", l.abs())));
    }
    Ok(CircleState::basis(l))
}

/// Von Mises state damped by `e^{-L^2/2}` and renormalized.
pub fn x_extremal_state(p: VonMisesParams, tail_tol: f64) -> Result<CircleState> {
    von_mises(p, tail_tol)?.reweighted(|l| (-0.5 * (l * l) as f64).exp())
}

/// Which rotated trigonometric component enters an intelligent-state equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameComponent {
    /// `C_alpha = C cos(alpha) - S sin(alpha)`, i.e. `cos(phi + alpha)`.
    Cosine,
    /// `S_alpha = S cos(alpha) + C sin(alpha)`, i.e. `sin(phi + alpha)`.
    Sine,
}

/// `|| (L - i kappa G_alpha - lambda) psi ||` with `G` the chosen component.
///
/// Evaluated exactly on coefficients: `(E psi)_l = c_{l+1}`,
/// `(E^dag psi)_l = c_{l-1}`, `C = (E + E^dag)/2`, `S = i (E - E^dag)/2`.
pub fn intelligent_residual(
    state: &CircleState,
    kappa: f64,
    lambda: f64,
    alpha: f64,
    component: FrameComponent,
) -> f64 {
    let (sa, ca) = alpha.sin_cos();
    let half = Complex64::new(0.5, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut sum = 0.0;
    for l in state.l_min() - 1..=state.l_max() + 1 {
        let e = state.coeff(l + 1);
        let ed = state.coeff(l - 1);
        let cos_part = half * (e + ed);
        let sin_part = i * half * (e - ed);
        let g = match component {
            FrameComponent::Cosine => cos_part * ca - sin_part * sa,
            FrameComponent::Sine => sin_part * ca + cos_part * sa,
        };
        let r = state.coeff(l) * (l as f64 - lambda) - i * kappa * g;
        sum += r.norm_sqr();
    }
    sum.sqrt()
}
