//! Modified Bessel functions of the first kind, integer order.
//!
//! Small arguments use the ascending power series. For `x >= 10` the values
//! come from Miller's downward recurrence, normalized with the generating
//! function identity `I_0(x) + 2 * sum_{k>=1} I_k(x) = e^x`.

use crate::error::{Error, Result};

/// Largest supported order.
pub const MAX_ORDER: u32 = 200;
/// Largest supported argument; `e^x` must stay finite.
pub const MAX_ARGUMENT: f64 = 700.0;

const SERIES_CUTOFF: f64 = 10.0;
const RESCALE_ABOVE: f64 = 1e250;

/// `I_n(x)` for `0 <= n <= 200` and `0 <= x <= 700`.
pub fn bessel_i(n: u32, x: f64) -> Result<f64> {
    if n > MAX_ORDER {
        return Err(Error::Domain(format!("Bessel order {n} exceeds {MAX_ORDER}")));
    }
    if !(0.0..=MAX_ARGUMENT).contains(&x) {
        return Err(Error::Domain(format!(
            "Bessel argument {x} outside [0, {MAX_ARGUMENT}]"
        )));
    }
    if x == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    if x < SERIES_CUTOFF {
        Ok(power_series(n, x))
    } else {
        Ok(miller(n, x))
    }
}

/// Ratio `I_n(x) / I_0(x)`, used for the von Mises moments.
pub fn bessel_ratio(n: u32, x: f64) -> Result<f64> {
    Ok(bessel_i(n, x)? / bessel_i(0, x)?)
}

/// Starting order for the downward recurrence.
///
/// The `ceil(x)` term keeps the start above the turning point `n ~ x`;
/// below it the recurrence has not yet damped the `K_n` contamination.
pub fn miller_start(n: u32, x: f64) -> u32 {
    let n_f = f64::from(n);
    let base = (10.0 + 2.0 * (x * n_f + x).sqrt()).ceil();
    n + base as u32 + x.ceil() as u32
}

fn power_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut lead = 1.0;
    for k in 1..=n {
        lead *= half / f64::from(k);
    }
    let q = half * half;
    let mut term = lead;
    let mut sum = lead;
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + f64::from(n)));
        sum += term;
        if term <= sum * f64::EPSILON * 0.25 {
            break;
        }
        k += 1.0;
    }
    sum
}

fn miller(n: u32, x: f64) -> f64 {
    let start = miller_start(n, x);
    let two_over_x = 2.0 / x;
    // y_{j+1}, y_j; seeded with I_{start+1} = 0, I_start = 1
    let mut upper = 0.0_f64;
    let mut current = 1.0_f64;
    let mut norm = 2.0 * current;
    let mut wanted = if n == start { current } else { 0.0 };
    for j in (1..=start).rev() {
        let lower = upper + f64::from(j) * two_over_x * current;
        upper = current;
        current = lower;
        let order = j - 1;
        if order == n {
            wanted = current;
        }
        norm += if order == 0 { current } else { 2.0 * current };
        if current > RESCALE_ABOVE {
            upper /= RESCALE_ABOVE;
            current /= RESCALE_ABOVE;
            norm /= RESCALE_ABOVE;
            wanted /= RESCALE_ABOVE;
        }
    }
    x.exp() * (wanted / norm)
}
