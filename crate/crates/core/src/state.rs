//! Pure states on the circle in the angular-momentum basis.
//!
//! A state is the coefficient list `c_l` for `l = l_min..=l_max`; outside the
//! window every coefficient is zero. The angle representation is
//!
//! ```text
//! psi(phi) = (2 pi)^{-1/2} * sum_l c_l e^{i l phi}
//! ```
//!
//! so `L = -i d/dphi` and the shift `E|l> = |l-1>` acts as multiplication by
//! `e^{-i phi}`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};

/// Normalization tolerance on `sum |c_l|^2`.
pub const NORM_TOL: f64 = 1e-12;
/// Default edge-mass tolerance when sampling analytic wavefunctions.
pub const DEFAULT_TAIL_TOL: f64 = 1e-14;
/// Default starting half-width of the truncation window.
pub const DEFAULT_L_MAX_HINT: i64 = 64;
/// Widest window `from_wavefunction` will try.
pub const MAX_L_MAX: i64 = 4096;

/// A normalized pure state on a finite angular-momentum window.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleState {
    l_min: i64,
    coeffs: Vec<Complex64>,
}

impl CircleState {
    /// Builds a state from coefficients ordered `l = l_min, l_min + 1, ...`,
    /// rejecting anything not normalized to within [`NORM_TOL`].
    pub fn new(l_min: i64, coeffs: Vec<Complex64>) -> Result<Self> {
        let state = Self::unchecked(l_min, coeffs)?;
        let norm_sq = state.norm_sq();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(state)
    }

    /// Builds a state and rescales it to unit norm.
    pub fn normalized(l_min: i64, coeffs: Vec<Complex64>) -> Result<Self> {
        let mut state = Self::unchecked(l_min, coeffs)?;
        let norm = state.norm_sq().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState(format!("cannot normalize, norm = {norm}")));
        }
        state.coeffs.iter_mut().for_each(|c| *c /= norm);
        Ok(state)
    }

    /// Single basis vector `|l>`.
    pub fn basis(l: i64) -> Self {
        let (l_min, coeffs) = if l <= 0 {
            let mut v = vec![Complex64::new(0.0, 0.0); (1 - l) as usize];
            v[0] = Complex64::new(1.0, 0.0);
            (l, v)
        } else {
            let mut v = vec![Complex64::new(0.0, 0.0); (l + 1) as usize];
            v[l as usize] = Complex64::new(1.0, 0.0);
            (0, v)
        };
        Self { l_min, coeffs }
    }

    fn unchecked(l_min: i64, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidState("empty coefficient list".into()));
        }
        let l_max = l_min + coeffs.len() as i64 - 1;
        if l_min > 0 || l_max < 0 {
            return Err(Error::InvalidState(format!(
                "window [{l_min}, {l_max}] must contain l = 0"
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidState("non-finite coefficient".into()));
        }
        Ok(Self { l_min, coeffs })
    }

    pub fn l_min(&self) -> i64 {
        self.l_min
    }

    pub fn l_max(&self) -> i64 {
        self.l_min + self.coeffs.len() as i64 - 1
    }

    /// Number of coefficients in the window.
    pub fn width(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `c_l`, zero outside the window.
    pub fn coeff(&self, l: i64) -> Complex64 {
        let idx = l - self.l_min;
        if idx < 0 || idx >= self.coeffs.len() as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// `(l, c_l)` pairs over the window.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.l_min + i as i64, c))
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `|c_{l_min}|^2 + |c_{l_max}|^2`.
    pub fn edge_mass(&self) -> f64 {
        let first = self.coeffs[0].norm_sqr();
        if self.coeffs.len() == 1 {
            first
        } else {
            first + self.coeffs[self.coeffs.len() - 1].norm_sqr()
        }
    }

    /// Smallest and largest `l` with a nonzero coefficient.
    pub fn support(&self) -> Option<(i64, i64)> {
        let first = self.iter().find(|(_, c)| c.norm_sqr() > 0.0)?.0;
        let last = self.l_min + self.coeffs.iter().rposition(|c| c.norm_sqr() > 0.0)? as i64;
        Some((first, last))
    }

    /// Drops edge coefficients while the discarded weight stays within
    /// `tail`, then renormalizes.
    pub fn truncated(&self, tail: f64) -> Result<Self> {
        // the window keeps l = 0
        let zero = (-self.l_min) as usize;
        let (mut lo, mut hi) = (0, self.coeffs.len() - 1);
        let mut dropped = 0.0;
        while lo < zero || hi > zero {
            let a = if lo < zero { self.coeffs[lo].norm_sqr() } else { f64::INFINITY };
            let b = if hi > zero { self.coeffs[hi].norm_sqr() } else { f64::INFINITY };
            let (w, take_lo) = if a <= b { (a, true) } else { (b, false) };
            if dropped + w > tail {
                break;
            }
            dropped += w;
            if take_lo {
                lo += 1;
            } else {
                hi -= 1;
            }
        }
        Self::normalized(self.l_min + lo as i64, self.coeffs[lo..=hi].to_vec())
    }

    /// Coefficient-wise map `c_l -> f(l) c_l`, renormalized.
    pub fn reweighted(&self, weight: impl Fn(i64) -> f64) -> Result<Self> {
        let coeffs = self.iter().map(|(l, c)| c * weight(l)).collect();
        Self::normalized(self.l_min, coeffs)
    }

    /// Serializable snapshot of the coefficients.
    pub fn to_file(&self) -> StateFile {
        StateFile {
            l_min: self.l_min,
            l_max: self.l_max(),
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

/// Samples of a wavefunction on the uniform grid `phi_k = 2 pi k / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularGrid {
    values: Vec<Complex64>,
}

impl AngularGrid {
    pub fn n_points(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn phi(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.values.len() as f64
    }

    /// Probability density `|psi(phi_k)|^2` at each node.
    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Trapezoid estimate of `int |psi|^2 dphi`.
    pub fn norm_sq(&self) -> f64 {
        2.0 * PI / self.values.len() as f64 * self.density().iter().sum::<f64>()
    }
}

/// Table of `e^{-2 pi i k / n}` for `k = 0..n`.
fn twiddles(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64))
        .collect()
}

fn check_grid(n_points: usize, required: usize) -> Result<()> {
    if n_points < required || !n_points.is_power_of_two() {
        return Err(Error::GridSize { n_points, required });
    }
    Ok(())
}

/// Evaluates `psi(phi_k) = (2 pi)^{-1/2} sum_l c_l e^{i l phi_k}`.
pub fn to_grid(state: &CircleState, n_points: usize) -> Result<AngularGrid> {
    check_grid(n_points, 2 * state.width())?;
    let w = twiddles(n_points);
    let n = n_points as i64;
    let scale = 1.0 / (2.0 * PI).sqrt();
    let values = (0..n)
        .map(|k| {
            let sum: Complex64 = state
                .iter()
                .map(|(l, c)| c * w[(-l * k).rem_euclid(n) as usize])
                .sum();
            sum * scale
        })
        .collect();
    Ok(AngularGrid { values })
}

/// Discrete inverse transform of grid samples onto `l = -l_max..=l_max`.
fn grid_coefficients(samples: &[Complex64], l_max: i64) -> Vec<Complex64> {
    let n = samples.len() as i64;
    let w = twiddles(samples.len());
    let scale = (2.0 * PI).sqrt() / n as f64;
    (-l_max..=l_max)
        .map(|l| {
            let sum: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(k, s)| s * w[(l * k as i64).rem_euclid(n) as usize])
                .sum();
            sum * scale
        })
        .collect()
}

/// Recovers the coefficients of a sampled state on the window `[-l_max, l_max]`.
pub fn from_grid(grid: &AngularGrid, l_max: i64) -> Result<CircleState> {
    check_grid(grid.n_points(), 2 * (2 * l_max as usize + 1))?;
    CircleState::normalized(-l_max, grid_coefficients(grid.values(), l_max))
}

/// Projects a wavefunction onto the angular-momentum basis,
/// `c_l = (2 pi)^{-1/2} int e^{-i l phi} psi(phi) dphi`.
///
/// The symmetric window starts at `l_max_hint` and doubles until the edge
/// mass of the normalized coefficients is at most `tail_tol`.
pub fn from_wavefunction<F>(psi: F, l_max_hint: i64, tail_tol: f64) -> Result<CircleState>
where
    F: Fn(f64) -> Complex64,
{
    if !(tail_tol > 0.0 && tail_tol <= 1e-6) {
        return Err(Error::Domain(format!("tail_tol {tail_tol} outside (0, 1e-6]")));
    }
    let mut l_max = l_max_hint.clamp(1, MAX_L_MAX);
    loop {
        let width = 2 * l_max as usize + 1;
        let n_points = (4 * width).next_power_of_two();
        let samples: Vec<Complex64> = (0..n_points)
            .map(|k| psi(2.0 * PI * k as f64 / n_points as f64))
            .collect();
        let state = CircleState::normalized(-l_max, grid_coefficients(&samples, l_max))?;
        if state.edge_mass() <= tail_tol {
            return Ok(state);
        }
        if l_max >= MAX_L_MAX {
            return Err(Error::TailUnreachable { tail_tol, l_max });
        }
        l_max = (2 * l_max).min(MAX_L_MAX);
    }
}

/// Applies `e^{-i phi' L}`: `c_l -> e^{-i l phi'} c_l`.
pub fn rotate(state: &CircleState, phi_prime: f64) -> CircleState {
    let coeffs = state
        .iter()
        .map(|(l, c)| c * Complex64::from_polar(1.0, -(l as f64) * phi_prime))
        .collect();
    CircleState {
        l_min: state.l_min,
        coeffs,
    }
}

/// On-disk form: `{"l_min": int, "l_max": int, "coeffs": [[re, im], ...]}`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct StateFile {
    pub l_min: i64,
    pub l_max: i64,
    pub coeffs: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(text)?;
        let expected = file.l_max - file.l_min + 1;
        if expected != file.coeffs.len() as i64 {
            return Err(Error::InvalidState(format!(
                "window [{}, {}] needs {} coefficients, found {}",
                file.l_min,
                file.l_max,
                expected.max(0),
                file.coeffs.len()
            )));
        }
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// JSON text with every number at 17 significant digits.
    pub fn to_json(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{{\"l_min\": {}, \"l_max\": {}, \"coeffs\": [", self.l_min, self.l_max);
        for (i, [re, im]) in self.coeffs.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "[{re:.16e}, {im:.16e}]");
        }
        out.push_str("]}\n");
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|[re, im]| re * re + im * im).sum()
    }

    fn complex_coeffs(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
    }

    /// Converts to a state, enforcing normalization.
    pub fn into_state(&self) -> Result<CircleState> {
        CircleState::new(self.l_min, self.complex_coeffs())
    }
}
