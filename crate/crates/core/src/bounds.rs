//! Lower bounds on `(dL)^2`:
//!
//! * the circular-variance bound `(1 - (dE)^2) / (4 (dE)^2)`,
//! * the invariant performance `V^2 = |c|^2 / (4 gamma_+)`,
//! * the frame-optimized performance
//!   `U^2 = max_alpha <C_alpha>^2 / (4 (dS_alpha)^2)`,
//!
//! which satisfy `(dL)^2 >= U^2 >= V^2 >= standard`.
//!
//! With `x = (cos a, sin a)` in the `(S, C)` ordering of `Gamma`,
//! `(dS_a)^2 = x^t Gamma x` and `<C_a> = <C> cos a - <S> sin a = f^t x` where
//! `f = (<C>, -<S>) = (Re <E>, Im <E>)` is the frame vector. The Rayleigh
//! quotient then peaks at `x ~ Gamma^{-1} f`, giving `U^2 = f^t Gamma^{-1} f / 4`.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::{covariance, dispersion_e, dispersion_l, moments_from_coeffs, AngularMoments, CovarianceMatrix};
use crate::state::CircleState;

/// Default tolerance for the saturation flags.
pub const DEFAULT_SATURATION_TOL: f64 = 1e-8;
/// Slack allowed in the ordering chain, relative to `max(1, (dL)^2)`.
pub const CHAIN_SLACK: f64 = 1e-10;
/// `det Gamma` at or below this is treated as singular.
pub const SINGULAR_DET: f64 = 1e-14;
/// Minimum number of dense samples in [`u2_alpha_sweep`].
pub const MIN_ALPHA_SAMPLES: usize = 360;

/// Circular-variance bound `(1 - var_e) / (4 var_e)`.
pub fn standard_bound(var_e: f64) -> Result<f64> {
    if !(var_e > 0.0 && var_e <= 1.0 + 1e-12) {
        return Err(Error::Domain(format!("circular variance {var_e} outside (0, 1]")));
    }
    Ok((0.25 * (1.0 - var_e) / var_e).max(0.0))
}

/// `f = (<C>, -<S>)`, the vector entering the closed form for `U^2`.
pub fn frame_vector(m: &AngularMoments) -> [f64; 2] {
    [m.mean_c(), -m.mean_s()]
}

/// `U^2 = f^t Gamma^{-1} f / 4`. Zero when `f = 0`.
pub fn u2_closed_form(gamma: &CovarianceMatrix, f: [f64; 2]) -> Result<f64> {
    if f == [0.0, 0.0] {
        return Ok(0.0);
    }
    if gamma.det <= SINGULAR_DET {
        return Err(Error::SingularCovariance { det: gamma.det });
    }
    let y = gamma.solve(f).ok_or(Error::SingularCovariance { det: gamma.det })?;
    Ok((0.25 * (f[0] * y[0] + f[1] * y[1])).max(0.0))
}

/// Frame angle maximizing the Rayleigh quotient, taken in `[0, 2 pi)` on the
/// branch where `<C_alpha> >= 0`; `0` when `f = 0`.
pub fn optimal_frame_angle(gamma: &CovarianceMatrix, f: [f64; 2]) -> Result<f64> {
    if f == [0.0, 0.0] {
        return Ok(0.0);
    }
    if gamma.det <= SINGULAR_DET {
        return Err(Error::SingularCovariance { det: gamma.det });
    }
    let y = gamma.solve(f).ok_or(Error::SingularCovariance { det: gamma.det })?;
    Ok(canonical_angle(y[1].atan2(y[0]), f))
}

fn canonical_angle(alpha: f64, f: [f64; 2]) -> f64 {
    let (s, c) = alpha.sin_cos();
    let a = if f[0] * c + f[1] * s < 0.0 { alpha + PI } else { alpha };
    let a = a.rem_euclid(TAU);
    // rem_euclid can return TAU itself for tiny negative inputs
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Means and variances of the components in the frame rotated by `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameStats {
    pub mean_c: f64,
    pub mean_s: f64,
    pub var_c: f64,
    pub var_s: f64,
}

/// `C_a = C cos a - S sin a`, `S_a = S cos a + C sin a`.
pub fn rotated_frame(m: &AngularMoments, gamma: &CovarianceMatrix, alpha: f64) -> FrameStats {
    let (sa, ca) = alpha.sin_cos();
    let (mc, ms) = (m.mean_c(), m.mean_s());
    FrameStats {
        mean_c: mc * ca - ms * sa,
        mean_s: ms * ca + mc * sa,
        // (S, C) coefficients of C_a are (-sin a, cos a); of S_a, (cos a, sin a)
        var_c: gamma.quadratic_form([-sa, ca]),
        var_s: gamma.quadratic_form([ca, sa]),
    }
}

/// Slack in the two component relations
/// `(dS_a)^2 (dL)^2 >= <C_a>^2 / 4` and `(dC_a)^2 (dL)^2 >= <S_a>^2 / 4`.
pub fn component_relation_slack(
    m: &AngularMoments,
    gamma: &CovarianceMatrix,
    alpha: f64,
) -> (f64, f64) {
    let var_l = dispersion_l(m);
    let fr = rotated_frame(m, gamma, alpha);
    (
        fr.var_s * var_l - 0.25 * fr.mean_c * fr.mean_c,
        fr.var_c * var_l - 0.25 * fr.mean_s * fr.mean_s,
    )
}

/// Maximizes `<C_a>^2 / (4 (dS_a)^2)` numerically: dense sampling over a
/// half-turn followed by golden-section refinement. Returns `(value, alpha)`.
pub fn u2_alpha_sweep(state: &CircleState, n_alpha: usize) -> Result<(f64, f64)> {
    let m = moments_from_coeffs(state);
    let gamma = covariance(&m)?;
    u2_alpha_sweep_moments(&m, &gamma, n_alpha)
}

/// [`u2_alpha_sweep`] on precomputed moments.
pub fn u2_alpha_sweep_moments(
    m: &AngularMoments,
    gamma: &CovarianceMatrix,
    n_alpha: usize,
) -> Result<(f64, f64)> {
    if n_alpha < MIN_ALPHA_SAMPLES {
        return Err(Error::Domain(format!(
            "n_alpha = {n_alpha} below {MIN_ALPHA_SAMPLES}"
        )));
    }
    let f = frame_vector(m);
    if f == [0.0, 0.0] {
        return Ok((0.0, 0.0));
    }
    let objective = |a: f64| -> f64 {
        let fr = rotated_frame(m, gamma, a);
        if fr.var_s <= 0.0 {
            return f64::INFINITY;
        }
        0.25 * fr.mean_c * fr.mean_c / fr.var_s
    };

    // period pi: f(a + pi) = f(a)
    let step = PI / n_alpha as f64;
    let (best_idx, _) = (0..n_alpha)
        .map(|i| (i, objective(i as f64 * step)))
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });

    let (mut lo, mut hi) = ((best_idx as f64 - 1.0) * step, (best_idx as f64 + 1.0) * step);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (objective(x1), objective(x2));
    while hi - lo > 1e-10 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1);
        }
    }
    let alpha = 0.5 * (lo + hi);
    let fr = rotated_frame(m, gamma, alpha);
    if fr.var_s < SINGULAR_DET {
        return Err(Error::Degenerate(format!(
            "(dS_alpha)^2 = {:e} at the maximizer",
            fr.var_s
        )));
    }
    Ok((objective(alpha), canonical_angle(alpha, f)))
}

/// `V^2 = (1 - tr) / (2 (tr + sqrt(tr^2 - 4 det)))`.
pub fn v2_bound(gamma: &CovarianceMatrix) -> Result<f64> {
    let tr = gamma.trace;
    if tr <= SINGULAR_DET {
        return Err(Error::Degenerate(format!("tr Gamma = {tr:e}")));
    }
    let disc = (tr * tr - 4.0 * gamma.det).max(0.0).sqrt();
    Ok((0.25 * 2.0 * (1.0 - tr) / (tr + disc)).max(0.0))
}

/// Which of the saturation conditions hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SaturationFlags {
    /// `d(CS) = 0`
    pub symmetric: bool,
    /// `(dS)^2 >= (dC)^2`
    pub s_dominant: bool,
    /// `U^2 = V^2`
    pub u_equals_v: bool,
    /// `(dL)^2 = U^2`
    pub l_equals_u: bool,
}

pub fn saturation_flags(state: &CircleState, tol: f64) -> Result<SaturationFlags> {
    let m = moments_from_coeffs(state);
    let gamma = covariance(&m)?;
    let var_l = dispersion_l(&m);
    let u2 = u2_closed_form(&gamma, frame_vector(&m))?;
    let v2 = v2_bound(&gamma)?;
    Ok(flags_from(&gamma, var_l, u2, v2, tol))
}

fn flags_from(gamma: &CovarianceMatrix, var_l: f64, u2: f64, v2: f64, tol: f64) -> SaturationFlags {
    let scaled = tol * var_l.max(1.0);
    SaturationFlags {
        symmetric: gamma.cov_cs.abs() <= tol,
        s_dominant: gamma.var_s >= gamma.var_c - tol,
        u_equals_v: (u2 - v2).abs() <= scaled,
        l_equals_u: (var_l - u2).abs() <= scaled,
    }
}

/// Everything the CLI reports for one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsReport {
    pub var_l: f64,
    pub var_e: f64,
    pub standard: f64,
    pub v2: f64,
    pub u2: f64,
    /// Optimal frame angle in `[0, 2 pi)`.
    pub alpha_star: f64,
    pub sat_u2: bool,
    pub sat_symmetry: bool,
    pub sat_uv: bool,
    pub sat_s_dominant: bool,
    pub sat_ordering_chain: bool,
}

impl BoundsReport {
    /// Gaps `(dL)^2 - U^2`, `U^2 - V^2`, `V^2 - standard`.
    pub fn gaps(&self) -> [f64; 3] {
        [self.var_l - self.u2, self.u2 - self.v2, self.v2 - self.standard]
    }
}

/// `true` when `(dL)^2 >= U^2 >= V^2 >= standard` up to [`CHAIN_SLACK`].
pub fn chain_holds(var_l: f64, u2: f64, v2: f64, standard: f64) -> bool {
    let slack = -CHAIN_SLACK * var_l.max(1.0);
    var_l - u2 >= slack && u2 - v2 >= slack && v2 - standard >= slack
}

pub fn full_report(state: &CircleState) -> Result<BoundsReport> {
    full_report_with_tol(state, DEFAULT_SATURATION_TOL)
}

pub fn full_report_with_tol(state: &CircleState, tol: f64) -> Result<BoundsReport> {
    let m = moments_from_coeffs(state);
    report_from_moments(&m, tol)
}

/// Report assembled from already computed moments.
pub fn report_from_moments(m: &AngularMoments, tol: f64) -> Result<BoundsReport> {
    let gamma = covariance(m)?;
    let var_l = dispersion_l(m);
    let var_e = dispersion_e(m);
    let f = frame_vector(m);
    let standard = standard_bound(var_e)?;
    let u2 = u2_closed_form(&gamma, f)?;
    let v2 = v2_bound(&gamma)?;
    let alpha_star = optimal_frame_angle(&gamma, f)?;
    let flags = flags_from(&gamma, var_l, u2, v2, tol);
    Ok(BoundsReport {
        var_l,
        var_e,
        standard,
        v2,
        u2,
        alpha_star,
        sat_u2: flags.l_equals_u,
        sat_symmetry: flags.symmetric,
        sat_uv: flags.u_equals_v,
        sat_s_dominant: flags.s_dominant,
        sat_ordering_chain: chain_holds(var_l, u2, v2, standard),
    })
}
