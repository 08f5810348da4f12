//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use circle_uncertainty::bounds::{
    full_report, frame_vector, u2_alpha_sweep_moments, u2_closed_form, CHAIN_SLACK,
};
use circle_uncertainty::catalog::{intelligent_residual, von_mises, FrameComponent};
use circle_uncertainty::cli::{self, Family, CSV_HEADER};
use circle_uncertainty::corpus::{catalog_states, random_corpus, rng, von_mises_grid};
use circle_uncertainty::ladder::{commutator_residual, similarity_residual, MAX_SIMILARITY_L};
use circle_uncertainty::moments::{
    covariance, invariant_identities, moments_from_coeffs, oracle_grid_size,
    quadrature_oracle,
};
use circle_uncertainty::state::{rotate, DEFAULT_TAIL_TOL};
use circle_uncertainty::CircleState;
use num_complex::Complex64;
use rand::Rng;

const SEED: u64 = 20_240_611;
const CORPUS_SIZE: usize = 1000;

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn corpus() -> Vec<(String, CircleState)> {
    let mut all: Vec<(String, CircleState)> = random_corpus(SEED, CORPUS_SIZE)
        .into_iter()
        .enumerate()
        .map(|(i, s)| (format!("random#{i}"), s))
        .collect();
    all.extend(catalog_states().expect("catalog"));
    all
}

/// `I_n(x)` by the trapezoid rule on `(1/pi) int_0^pi e^{x cos t} cos(nt) dt`,
/// scaled by `e^{-x}`. Spectrally accurate for a smooth periodic integrand.
fn scaled_bessel_quadrature(n: u32, x: f64) -> f64 {
    let m = 4096;
    let h = PI / m as f64;
    let f = |t: f64| (x * (t.cos() - 1.0)).exp() * (n as f64 * t).cos();
    let inner: f64 = (1..m).map(|k| f(k as f64 * h)).sum();
    (inner + 0.5 * (f(0.0) + f(PI))) * h / PI
}

fn ordering_chain(states: &[(String, CircleState)]) -> Outcome {
    let start = Instant::now();
    let mut worst = f64::INFINITY;
    let mut worst_label = String::new();
    for (label, s) in states {
        let r = match full_report(s) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("{label}: {e}")),
        };
        let g = r.gaps().into_iter().fold(f64::INFINITY, f64::min) / r.var_l.max(1.0);
        if g < worst {
            worst = g;
            worst_label = label.clone();
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst >= -CHAIN_SLACK && elapsed < Duration::from_secs(10),
        format!("{} states, min scaled gap {worst:.3e} ({worst_label}), {elapsed:.2?}", states.len()),
    )
}

fn von_mises_saturation() -> Outcome {
    let mut worst_lu = 0.0f64;
    let mut worst_uv = 0.0f64;
    let grid = von_mises_grid();
    for p in &grid {
        let r = match von_mises(*p, DEFAULT_TAIL_TOL).and_then(|s| full_report(&s)) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("{p:?}: {e}")),
        };
        worst_lu = worst_lu.max((r.var_l - r.u2) / r.var_l.max(1.0));
        worst_uv = worst_uv.max((r.u2 - r.v2).abs());
    }
    outcome(
        worst_lu <= 1e-8 && worst_uv <= 1e-8,
        format!("{} states, max (dL)^2-U^2 {worst_lu:.2e}, max |U^2-V^2| {worst_uv:.2e}", grid.len()),
    )
}

fn closed_form_vs_sweep(states: &[(String, CircleState)]) -> Outcome {
    let mut worst = 0.0f64;
    for (label, s) in states {
        let m = moments_from_coeffs(s);
        let res = covariance(&m).and_then(|g| {
            let closed = u2_closed_form(&g, frame_vector(&m))?;
            let (swept, _) = u2_alpha_sweep_moments(&m, &g, 720)?;
            Ok((closed - swept).abs())
        });
        match res {
            Ok(d) => worst = worst.max(d),
            Err(e) => return outcome(false, format!("{label}: {e}")),
        }
    }
    outcome(worst <= 1e-8, format!("max |closed - sweep| {worst:.2e}"))
}

fn oracle_equivalence(states: &[(String, CircleState)]) -> Outcome {
    let mut worst = 0.0f64;
    for (label, s) in states {
        let a = moments_from_coeffs(s);
        let b = match quadrature_oracle(s, oracle_grid_size(s)) {
            Ok(b) => b,
            Err(e) => return outcome(false, format!("{label}: {e}")),
        };
        let d = [
            (a.e1.re - b.e1.re).abs(),
            (a.e1.im - b.e1.im).abs(),
            (a.e2.re - b.e2.re).abs(),
            (a.e2.im - b.e2.im).abs(),
            (a.l1 - b.l1).abs(),
            (a.l2 - b.l2).abs(),
        ];
        worst = d.iter().fold(worst, |w, &x| w.max(x));
    }
    let mut worst_bessel = 0.0f64;
    for p in von_mises_grid() {
        let m = moments_from_coeffs(&von_mises(p, DEFAULT_TAIL_TOL).expect("von Mises"));
        let i0 = scaled_bessel_quadrature(0, 2.0 * p.kappa);
        let r1 = scaled_bessel_quadrature(1, 2.0 * p.kappa) / i0;
        let r2 = scaled_bessel_quadrature(2, 2.0 * p.kappa) / i0;
        let e1 = Complex64::from_polar(r1, p.alpha);
        let e2 = Complex64::from_polar(r2, 2.0 * p.alpha);
        worst_bessel = worst_bessel.max((m.e1 - e1).norm()).max((m.e2 - e2).norm());
    }
    outcome(
        worst <= 1e-10 && worst_bessel <= 1e-9,
        format!("max path difference {worst:.2e}, max Bessel-ratio error {worst_bessel:.2e}"),
    )
}

fn invariant_identity(states: &[(String, CircleState)]) -> Outcome {
    let mut worst = 0.0f64;
    for (label, s) in states {
        let m = moments_from_coeffs(s);
        match covariance(&m) {
            Ok(g) => worst = worst.max(invariant_identities(&m, &g).mean_residual()),
            Err(e) => return outcome(false, format!("{label}: {e}")),
        }
    }
    outcome(worst <= 1e-10, format!("max ||<E>|^2 - (1 - tr)| {worst:.2e}"))
}

fn rotation_behavior(states: &[(String, CircleState)]) -> Outcome {
    let mut r = rng(SEED ^ 0xA5A5);
    let mut worst = 0.0f64;
    let mut max_var_s_change = 0.0f64;
    for (label, s) in states {
        let phi = r.random_range(-PI..PI);
        let rotated = rotate(s, phi);
        let (a, b) = match (full_report(s), full_report(&rotated)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return outcome(false, format!("{label}: {e}")),
        };
        for d in [a.u2 - b.u2, a.v2 - b.v2, a.var_e - b.var_e, a.var_l - b.var_l] {
            worst = worst.max(d.abs());
        }
        let var_s = |st: &CircleState| covariance(&moments_from_coeffs(st)).map(|g| g.var_s).unwrap_or(0.0);
        max_var_s_change = max_var_s_change.max((var_s(s) - var_s(&rotated)).abs());
    }
    outcome(
        worst <= 1e-9 && max_var_s_change > 1e-3,
        format!("max invariant drift {worst:.2e}, largest (dS)^2 change {max_var_s_change:.3}"),
    )
}

fn cat_sweep() -> Outcome {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("cat.csv");
    let start = Instant::now();
    let code = cli::run(
        ["circle-uncertainty", "sweep", "--family", "cat", "--kmin", "0", "--kmax", "3", "--n", "61", "--out"]
            .iter()
            .map(|s| s.to_string())
            .chain([path.display().to_string()]),
        &mut Vec::new(),
        &mut Vec::new(),
    );
    let elapsed = start.elapsed();
    if code != cli::EXIT_OK {
        return outcome(false, format!("sweep exited with {code}"));
    }
    let text = std::fs::read_to_string(&path).expect("csv");
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return outcome(false, "unexpected CSV header");
    }
    let mut rows = 0;
    let mut min_gap = f64::INFINITY;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let num = |i: usize| f[i].parse::<f64>().expect("number");
        let (kappa, standard, v2, u2) = (num(1), num(4), num(5), num(6));
        rows += 1;
        if f[0] != Family::Cat.label() || f[8] != "true" {
            return outcome(false, format!("bad row {line}"));
        }
        if kappa > 0.0 {
            if !(standard < v2 && v2 < u2) {
                return outcome(false, format!("ordering fails at kappa={kappa}"));
            }
            min_gap = min_gap.min(u2 - v2);
        }
    }
    outcome(
        rows == 61 && min_gap > 0.0 && elapsed < Duration::from_secs(5),
        format!("{rows} rows, min U^2-V^2 for kappa>0 {min_gap:.3e}, {elapsed:.2?}"),
    )
}

fn intelligent_residuals() -> Outcome {
    let mut worst_c = 0.0f64;
    let mut worst_s = 0.0f64;
    for p in von_mises_grid() {
        let s = von_mises(p, DEFAULT_TAIL_TOL).expect("von Mises");
        let lam = p.lambda as f64;
        worst_c = worst_c.max(intelligent_residual(&s, p.kappa, lam, p.alpha, FrameComponent::Cosine));
        worst_s = worst_s.max(intelligent_residual(&s, p.kappa, lam, p.alpha, FrameComponent::Sine));
    }
    outcome(
        worst_c <= 1e-8,
        format!("max ||(L - i k C_a - l) psi|| {worst_c:.3e}; with S_a in place of C_a: {worst_s:.2e}"),
    )
}

fn ladder() -> Outcome {
    let mut states: Vec<CircleState> = random_corpus(SEED ^ 0x5A5A, 200);
    for p in von_mises_grid().into_iter().filter(|p| p.kappa <= 2.0) {
        let s = von_mises(p, DEFAULT_TAIL_TOL).and_then(|s| s.truncated(1e-30)).expect("von Mises");
        states.push(s);
    }
    states.retain(|s| s.l_min() >= -MAX_SIMILARITY_L && s.l_max() < MAX_SIMILARITY_L);
    let mut worst_comm = 0.0f64;
    let mut worst_sim = 0.0f64;
    for s in &states {
        match (commutator_residual(s), similarity_residual(s)) {
            (Ok(c), Ok(m)) => {
                worst_comm = worst_comm.max(c);
                worst_sim = worst_sim.max(m);
            }
            (Err(e), _) | (_, Err(e)) => return outcome(false, e.to_string()),
        }
    }
    outcome(
        worst_comm <= 1e-10 && worst_sim <= 1e-10,
        format!("{} states, max commutator {worst_comm:.2e}, max similarity {worst_sim:.2e}", states.len()),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("tempdir");
    let dump = dir.path().join("repro.json").display().to_string();
    let run = || {
        let mut out = Vec::new();
        let code = cli::run(
            ["circle-uncertainty", "verify", "--corpus", "200", "--seed", "42", "--out", dump.as_str()],
            &mut out,
            &mut Vec::new(),
        );
        (code, out)
    };
    let (c1, o1) = run();
    let (c2, o2) = run();
    outcome(
        c1 == cli::EXIT_OK && c1 == c2 && o1 == o2 && !o1.is_empty(),
        format!("exit codes {c1}/{c2}, {} output bytes, identical: {}", o1.len(), o1 == o2),
    )
}

fn main() {
    let states = corpus();
    let criteria: Vec<Criterion> = vec![
        ("1 ordering chain", Box::new(|| ordering_chain(&states))),
        ("2 von Mises saturation", Box::new(von_mises_saturation)),
        ("3 closed form vs frame sweep", Box::new(|| closed_form_vs_sweep(&states))),
        ("4 moment oracles", Box::new(|| oracle_equivalence(&states))),
        ("5 mean identity", Box::new(|| invariant_identity(&states))),
        ("6 rotation behavior", Box::new(|| rotation_behavior(&states))),
        ("7 cat sweep", Box::new(cat_sweep)),
        ("8 intelligent-state residual", Box::new(intelligent_residuals)),
        ("9 ladder operator", Box::new(ladder)),
        ("10 verify determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
