//! Seeded random states and the catalog grid used by `verify` and the
//! acceptance suite.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::catalog::{cat_state, l_eigenstate, von_mises, x_extremal_state, VonMisesParams};
use crate::error::Result;
use crate::state::{CircleState, DEFAULT_TAIL_TOL};

/// Half-width of the random-state window, `l in [-16, 16]`.
pub const RANDOM_WINDOW: i64 = 16;
/// Concentrations of the catalog grid.
pub const CATALOG_KAPPAS: [f64; 6] = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0];
pub const CATALOG_LAMBDAS: [i64; 3] = [0, 1, 3];
pub const CATALOG_ALPHAS: [f64; 2] = [0.0, 1.1];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random state with complex Gaussian coefficients on a random sub-window
/// of `[-16, 16]` containing `l = 0`.
pub fn random_state<R: Rng>(rng: &mut R) -> CircleState {
    loop {
        let lo = rng.random_range(-RANDOM_WINDOW..=0);
        let hi = rng.random_range(0..=RANDOM_WINDOW);
        let coeffs: Vec<Complex64> = (lo..=hi)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        // single-coefficient draws are eigenstates; keep them, they are valid
        if let Ok(s) = CircleState::normalized(lo, coeffs) {
            return s;
        }
    }
}

/// `size` random states from `seed`.
pub fn random_corpus(seed: u64, size: usize) -> Vec<CircleState> {
    let mut r = rng(seed);
    (0..size).map(|_| random_state(&mut r)).collect()
}

/// Von Mises parameter grid `kappa x lambda x alpha`.
pub fn von_mises_grid() -> Vec<VonMisesParams> {
    let mut out = Vec::new();
    for &kappa in &CATALOG_KAPPAS {
        for &lambda in &CATALOG_LAMBDAS {
            for &alpha in &CATALOG_ALPHAS {
                out.push(VonMisesParams { kappa, lambda, alpha });
            }
        }
    }
    out
}

/// Labelled catalog states: the von Mises grid, cat and x-extremal states
/// at each catalog `kappa`, and a few eigenstates.
pub fn catalog_states() -> Result<Vec<(String, CircleState)>> {
    let mut out = Vec::new();
    for p in von_mises_grid() {
        out.push((
            format!("von-mises:k={},l={},a={}", p.kappa, p.lambda, p.alpha),
            von_mises(p, DEFAULT_TAIL_TOL)?,
        ));
    }
    for &kappa in &CATALOG_KAPPAS {
        out.push((format!("cat:k={kappa}"), cat_state(kappa, DEFAULT_TAIL_TOL)?));
        let p = VonMisesParams { kappa, lambda: 0, alpha: 0.0 };
        out.push((format!("x-extremal:k={kappa},l=0,a=0"), x_extremal_state(p, DEFAULT_TAIL_TOL)?));
    }
    for l in [-3, 0, 5] {
        out.push((format!("l-eigenstate:{l}"), l_eigenstate(l)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_reproducible() {
        let a = random_corpus(7, 20);
        let b = random_corpus(7, 20);
        assert_eq!(a, b);
        assert_ne!(a, random_corpus(8, 20));
        for s in &a {
            assert!(s.l_min() >= -RANDOM_WINDOW && s.l_max() <= RANDOM_WINDOW);
            assert!((s.norm_sq() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn catalog_size() {
        let states = catalog_states().unwrap();
        assert_eq!(states.len(), 36 + 12 + 3);
    }
}
