//! The weighted ladder operator `X = e^{-L - 1/2} E` and its quadratures
//! `Q = (X + X^dag)/2`, `P = (X - X^dag)/(2i)`.
//!
//! The weight is evaluated after the shift:
//! `X|l> = e^{-(l-1) - 1/2} |l-1> = e^{1/2 - l} |l-1>`, which is the reading
//! that agrees with the similarity form `e^{L^2/2} E e^{-L^2/2}`.
//! `[X, L] = X` holds exactly; `[Q, L] = iP`, `[P, L] = -iQ`.

use num_complex::Complex64;

use crate::bounds::{chain_holds, u2_closed_form};
use crate::error::{Error, Result};
use crate::moments::{dispersion_l, moments_from_coeffs, CovarianceMatrix};
use crate::state::CircleState;

/// Largest `|l|` for which `e^{|l|}` weights are applied.
pub const MAX_WEIGHT_L: i64 = 700;
/// Largest `|l|` for which `e^{l^2/2}` is finite.
pub const MAX_SIMILARITY_L: i64 = 37;

/// Unnormalized coefficient vector on `l_min..=l_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderVector {
    pub l_min: i64,
    pub coeffs: Vec<Complex64>,
}

impl LadderVector {
    fn from_state(state: &CircleState) -> Self {
        Self {
            l_min: state.l_min(),
            coeffs: state.coeffs().to_vec(),
        }
    }

    pub fn l_max(&self) -> i64 {
        self.l_min + self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, l: i64) -> Complex64 {
        let idx = l - self.l_min;
        if idx < 0 || idx >= self.coeffs.len() as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[idx as usize]
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &LadderVector) -> Complex64 {
        let lo = self.l_min.max(other.l_min);
        let hi = self.l_max().min(other.l_max());
        (lo..=hi).map(|l| self.coeff(l).conj() * other.coeff(l)).sum()
    }

    /// `L` applied coefficient-wise.
    pub fn apply_l(&self) -> LadderVector {
        LadderVector {
            l_min: self.l_min,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c * (self.l_min + i as i64) as f64)
                .collect(),
        }
    }

    fn sub(&self, other: &LadderVector) -> LadderVector {
        let lo = self.l_min.min(other.l_min);
        let hi = self.l_max().max(other.l_max());
        LadderVector {
            l_min: lo,
            coeffs: (lo..=hi).map(|l| self.coeff(l) - other.coeff(l)).collect(),
        }
    }

    fn check_weights(&self) -> Result<()> {
        for (i, c) in self.coeffs.iter().enumerate() {
            let l = self.l_min + i as i64;
            if c.norm_sqr() > 0.0 && (l - 1).abs() > MAX_WEIGHT_L {
                return Err(Error::Overflow { l });
            }
        }
        Ok(())
    }

    /// `X`: `c_l -> e^{1/2 - l} c_l` moved to `l - 1`.
    pub fn apply_x(&self) -> Result<LadderVector> {
        self.check_weights()?;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let l = self.l_min + i as i64;
                if c.norm_sqr() == 0.0 {
                    *c
                } else {
                    c * (0.5 - l as f64).exp()
                }
            })
            .collect();
        Ok(LadderVector { l_min: self.l_min - 1, coeffs })
    }

    /// `X^dag`: `c_l -> e^{-l - 1/2} c_l` moved to `l + 1`.
    pub fn apply_x_adjoint(&self) -> Result<LadderVector> {
        self.check_weights()?;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let l = self.l_min + i as i64;
                if c.norm_sqr() == 0.0 {
                    *c
                } else {
                    c * (-0.5 - l as f64).exp()
                }
            })
            .collect();
        Ok(LadderVector { l_min: self.l_min + 1, coeffs })
    }
}

/// `X psi` for a state.
pub fn apply_x(state: &CircleState) -> Result<LadderVector> {
    LadderVector::from_state(state).apply_x()
}

/// `X^dag psi` for a state.
pub fn apply_x_adjoint(state: &CircleState) -> Result<LadderVector> {
    LadderVector::from_state(state).apply_x_adjoint()
}

/// `X psi` through `e^{L^2/2} E e^{-L^2/2}`; only for `|l| <= 37`.
pub fn apply_x_similarity(state: &CircleState) -> Result<LadderVector> {
    if let Some((lo, hi)) = state.support() {
        for l in [lo - 1, hi] {
            if l.abs() > MAX_SIMILARITY_L {
                return Err(Error::Overflow { l });
            }
        }
    }
    let gauss = |l: i64, sign: f64| (sign * 0.5 * (l * l) as f64).exp();
    // e^{-L^2/2}, then E shifts l -> l-1, then e^{+L^2/2} on the new index
    let coeffs = state
        .iter()
        .map(|(l, c)| {
            if c.norm_sqr() == 0.0 {
                c
            } else {
                c * gauss(l, -1.0) * gauss(l - 1, 1.0)
            }
        })
        .collect();
    Ok(LadderVector { l_min: state.l_min() - 1, coeffs })
}

/// `X psi` with the weight read before the shift, `e^{-l - 1/2}`.
/// Kept to show that only the post-shift reading matches the similarity form.
pub fn apply_x_preshift(state: &CircleState) -> Result<LadderVector> {
    let v = apply_x(state)?;
    Ok(LadderVector {
        l_min: v.l_min,
        coeffs: v.coeffs.iter().map(|c| c / std::f64::consts::E).collect(),
    })
}

/// `||([X, L] - X) psi|| / ||X psi||`.
pub fn commutator_residual(state: &CircleState) -> Result<f64> {
    let psi = LadderVector::from_state(state);
    let x_psi = psi.apply_x()?;
    let xl = psi.apply_l().apply_x()?;
    let lx = x_psi.apply_l();
    let r = xl.sub(&lx).sub(&x_psi);
    let scale = x_psi.norm_sq().sqrt();
    Ok(if scale > 0.0 { r.norm_sq().sqrt() / scale } else { r.norm_sq().sqrt() })
}

/// Largest componentwise gap between `X psi` and its similarity form,
/// relative to `max |(X psi)_l|`.
pub fn similarity_residual(state: &CircleState) -> Result<f64> {
    let direct = apply_x(state)?;
    let similar = apply_x_similarity(state)?;
    componentwise_gap(&direct, &similar)
}

fn componentwise_gap(a: &LadderVector, b: &LadderVector) -> Result<f64> {
    let lo = a.l_min.min(b.l_min);
    let hi = a.l_max().max(b.l_max());
    let scale = a.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    Ok((lo..=hi).map(|l| (a.coeff(l) - b.coeff(l)).norm()).fold(0.0, f64::max) / scale)
}

/// Moments of `X` and its quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XMoments {
    /// `<X>`
    pub x1: Complex64,
    /// `<X^2>`
    pub x2: Complex64,
    /// `<X^dag X> = ||X psi||^2`
    pub xdx: f64,
    /// `<X X^dag> = ||X^dag psi||^2`
    pub xxd: f64,
    pub q1: f64,
    pub p1: f64,
    pub var_q: f64,
    pub var_p: f64,
    /// Symmetrized covariance `<(QP + PQ)/2> - <Q><P>`.
    pub cov_qp: f64,
}

impl XMoments {
    /// Covariance matrix of `(P, Q)`, ordered like `(S, C)` for `Gamma`.
    pub fn covariance(&self) -> Result<CovarianceMatrix> {
        CovarianceMatrix::from_entries(self.var_p, self.var_q, self.cov_qp)
    }
}

pub fn x_moments(state: &CircleState) -> Result<XMoments> {
    let psi = LadderVector::from_state(state);
    let x_psi = psi.apply_x()?;
    let xx_psi = x_psi.apply_x()?;
    let xd_psi = psi.apply_x_adjoint()?;
    let x1 = psi.inner(&x_psi);
    let x2 = psi.inner(&xx_psi);
    let xdx = x_psi.norm_sq();
    let xxd = xd_psi.norm_sq();
    let q1 = x1.re;
    let p1 = x1.im;
    let q2 = 0.25 * (2.0 * x2.re + xdx + xxd);
    let p2 = 0.25 * (xdx + xxd - 2.0 * x2.re);
    // (QP + PQ)/2 = (X^2 - X^dag^2) / (4i)
    let qp_sym = 0.5 * x2.im;
    Ok(XMoments {
        x1,
        x2,
        xdx,
        xxd,
        q1,
        p1,
        var_q: (q2 - q1 * q1).max(0.0),
        var_p: (p2 - p1 * p1).max(0.0),
        cov_qp: qp_sym - q1 * p1,
    })
}

/// The `Q`, `P` analogue of the angular bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XBounds {
    pub var_l: f64,
    /// `max_a <Q_a>^2 / (4 (dP_a)^2)`
    pub u2: f64,
    /// `|q|^2 / (4 gamma_+)` of the `(P, Q)` covariance
    pub v2: f64,
    /// `(dP)^2 (dL)^2 - <Q>^2/4`
    pub slack_pq: f64,
    /// `(dQ)^2 (dL)^2 - <P>^2/4`
    pub slack_qp: f64,
}

impl XBounds {
    pub fn chain_holds(&self) -> bool {
        chain_holds(self.var_l, self.u2, self.v2, 0.0)
    }
}

pub fn x_bounds(state: &CircleState) -> Result<XBounds> {
    let xm = x_moments(state)?;
    let gamma = xm.covariance()?;
    let var_l = dispersion_l(&moments_from_coeffs(state));
    let u2 = u2_closed_form(&gamma, [xm.q1, -xm.p1])?;
    let v2 = if gamma.gamma_plus > 0.0 {
        0.25 * (xm.q1 * xm.q1 + xm.p1 * xm.p1) / gamma.gamma_plus
    } else {
        0.0
    };
    Ok(XBounds {
        var_l,
        u2,
        v2,
        slack_pq: xm.var_p * var_l - 0.25 * xm.q1 * xm.q1,
        slack_qp: xm.var_q * var_l - 0.25 * xm.p1 * xm.p1,
    })
}
