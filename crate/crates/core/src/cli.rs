//! `circle-uncertainty analyze | sweep | verify`.
//!
//! Exit codes: 0 success, 1 invariant failure, 2 input or I/O error,
//! 3 numeric-domain error.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;
use rayon::prelude::*;

use crate::bounds::{
    chain_holds, component_relation_slack, full_report_with_tol, report_from_moments, u2_alpha_sweep_moments,
    BoundsReport, DEFAULT_SATURATION_TOL,
};
use crate::catalog::{cat_state, l_eigenstate, von_mises, x_extremal_state, VonMisesParams, MAX_KAPPA};
use crate::corpus::{random_corpus, rng};
use crate::error::Error;
use crate::ladder::commutator_residual;
use crate::moments::{covariance, invariant_identities, moments_from_coeffs, oracle_grid_size, quadrature_oracle};
use crate::state::{rotate, CircleState, StateFile, DEFAULT_TAIL_TOL, NORM_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

pub const CSV_HEADER: &str = "family,kappa,var_e,var_l,standard,v2,u2,gap_uv,chain_ok";

#[derive(Debug, Parser)]
#[command(name = "circle-uncertainty", version, about = "Angle / angular-momentum uncertainty bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the bounds report of one state as JSON.
    Analyze {
        /// Named state, e.g. "von-mises:k=1,l=0,a=0" or "l-eigenstate:3".
        #[arg(long, conflicts_with = "state", required_unless_present = "state")]
        builtin: Option<String>,
        /// State file ({"l_min", "l_max", "coeffs"}).
        #[arg(long)]
        state: Option<PathBuf>,
        /// Saturation tolerance.
        #[arg(long, default_value_t = DEFAULT_SATURATION_TOL)]
        tol: f64,
    },
    /// Write the bounds of a state family over a kappa grid as CSV.
    Sweep {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        kmin: f64,
        #[arg(long)]
        kmax: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check every invariant on a seeded random corpus.
    Verify {
        #[arg(long, default_value_t = 100)]
        corpus: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Extra state file appended to the corpus (checked as stored).
        #[arg(long)]
        state: Option<PathBuf>,
        /// Where to dump the first failing state.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Saturation tolerance (unused by the corpus checks, accepted for symmetry).
        #[arg(long, default_value_t = DEFAULT_SATURATION_TOL)]
        tol: f64,
    },
}

/// State families accepted by `sweep`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    VonMises,
    Cat,
    XExtremal,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::VonMises => "von-mises",
            Family::Cat => "cat",
            Family::XExtremal => "x-extremal",
        }
    }

    pub fn state(self, kappa: f64) -> crate::Result<CircleState> {
        let p = VonMisesParams::new(kappa, 0, 0.0)?;
        match self {
            Family::VonMises => von_mises(p, DEFAULT_TAIL_TOL),
            Family::Cat => cat_state(kappa, DEFAULT_TAIL_TOL),
            Family::XExtremal => x_extremal_state(p, DEFAULT_TAIL_TOL),
        }
    }
}

/// Parsed `--builtin` argument.
#[derive(Debug, Clone, PartialEq)]
pub enum Builtin {
    VonMises(VonMisesParams),
    Cat { kappa: f64 },
    LEigenstate(i64),
    XExtremal(VonMisesParams),
}

impl Builtin {
    /// Parses `von-mises:k=..,l=..,a=..`, `cat:k=..`, `l-eigenstate:<int>`,
    /// `x-extremal:k=..,l=..,a=..`. Missing `l` and `a` default to 0.
    pub fn parse(text: &str) -> Result<Self, String> {
        let (name, args) = text
            .split_once(':')
            .ok_or_else(|| format!("builtin `{text}` lacks a `name:` prefix"))?;
        match name.trim() {
            "l-eigenstate" => args
                .trim()
                .parse::<i64>()
                .map(Builtin::LEigenstate)
                .map_err(|e| format!("bad eigenvalue `{args}`: {e}")),
            "cat" => {
                let (k, l, a) = parse_params(args, &["k"])?;
                debug_assert!(l.is_none() && a.is_none());
                Ok(Builtin::Cat { kappa: k })
            }
            "von-mises" | "x-extremal" => {
                let (kappa, l, a) = parse_params(args, &["k", "l", "a"])?;
                let p = VonMisesParams { kappa, lambda: l.unwrap_or(0), alpha: a.unwrap_or(0.0) };
                Ok(if name.trim() == "von-mises" { Builtin::VonMises(p) } else { Builtin::XExtremal(p) })
            }
            other => Err(format!("unknown builtin family `{other}`")),
        }
    }

    pub fn build(&self) -> crate::Result<CircleState> {
        match *self {
            Builtin::VonMises(p) => von_mises(p, DEFAULT_TAIL_TOL),
            Builtin::Cat { kappa } => cat_state(kappa, DEFAULT_TAIL_TOL),
            Builtin::LEigenstate(l) => l_eigenstate(l),
            Builtin::XExtremal(p) => x_extremal_state(p, DEFAULT_TAIL_TOL),
        }
    }
}

fn parse_params(args: &str, allowed: &[&str]) -> Result<(f64, Option<i64>, Option<f64>), String> {
    let (mut k, mut l, mut a) = (None, None, None);
    for pair in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, found `{pair}`"))?;
        let key = key.trim();
        if !allowed.contains(&key) {
            return Err(format!("unexpected parameter `{key}`"));
        }
        let value = value.trim();
        match key {
            "k" => k = Some(value.parse::<f64>().map_err(|e| format!("bad k `{value}`: {e}"))?),
            "l" => l = Some(value.parse::<i64>().map_err(|e| format!("bad l `{value}`: {e}"))?),
            "a" => a = Some(value.parse::<f64>().map_err(|e| format!("bad a `{value}`: {e}"))?),
            _ => unreachable!(),
        }
    }
    let k = k.ok_or("missing k=<real>")?;
    Ok((k, l, a))
}

/// Rounds to 12 significant digits and prints the shortest decimal form.
pub fn fmt12(v: f64) -> String {
    if !v.is_finite() {
        return "null".into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    serde_json::to_string(&rounded).unwrap_or_else(|_| "null".into())
}

/// Report as a flat JSON object with numbers at 12 significant digits.
pub fn report_json(source: &str, r: &BoundsReport) -> String {
    let mut s = String::from("{\n");
    let _ = writeln!(s, "  \"source\": {},", serde_json::to_string(source).unwrap_or_default());
    for (key, v) in [
        ("var_l", r.var_l),
        ("var_e", r.var_e),
        ("standard", r.standard),
        ("v2", r.v2),
        ("u2", r.u2),
        ("alpha_star", r.alpha_star),
    ] {
        let _ = writeln!(s, "  \"{key}\": {},", fmt12(v));
    }
    let flags = [
        ("sat_u2", r.sat_u2),
        ("sat_symmetry", r.sat_symmetry),
        ("sat_uv", r.sat_uv),
        ("sat_s_dominant", r.sat_s_dominant),
        ("sat_ordering_chain", r.sat_ordering_chain),
    ];
    for (i, (key, v)) in flags.iter().enumerate() {
        let sep = if i + 1 == flags.len() { "" } else { "," };
        let _ = writeln!(s, "  \"{key}\": {v}{sep}");
    }
    s.push_str("}\n");
    s
}

fn exit_code(e: &Error) -> i32 {
    if e.is_input_error() {
        EXIT_INPUT
    } else {
        EXIT_NUMERIC
    }
}

/// Entry point shared by the binary and the tests.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_INPUT
                }
            };
        }
    };
    match cli.command {
        Command::Analyze { builtin, state, tol } => cmd_analyze(builtin.as_deref(), state.as_deref(), tol, out, err),
        Command::Sweep { family, kmin, kmax, n, out: path } => cmd_sweep(family, kmin, kmax, n, &path, out, err),
        Command::Verify { corpus, seed, state, out: dump, tol: _ } => {
            cmd_verify(corpus, seed, state.as_deref(), dump.as_deref(), out, err)
        }
    }
}

pub fn cmd_analyze(
    builtin: Option<&str>,
    state_path: Option<&Path>,
    tol: f64,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    if !(tol > 0.0 && tol <= 1e-4) {
        let _ = writeln!(err, "error: --tol must lie in (0, 1e-4]");
        return EXIT_INPUT;
    }
    let (source, state) = match (builtin, state_path) {
        (Some(spec), _) => {
            let parsed = match Builtin::parse(spec) {
                Ok(b) => b,
                Err(msg) => {
                    let _ = writeln!(err, "error: {msg}");
                    return EXIT_INPUT;
                }
            };
            (spec.to_string(), parsed.build())
        }
        (None, Some(path)) => (
            path.display().to_string(),
            StateFile::read(path).and_then(|f| f.into_state()),
        ),
        (None, None) => {
            let _ = writeln!(err, "error: one of --builtin or --state is required");
            return EXIT_INPUT;
        }
    };
    let state = match state {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    match full_report_with_tol(&state, tol) {
        Ok(report) => {
            let _ = out.write_all(report_json(&source, &report).as_bytes());
            if report.sat_ordering_chain {
                EXIT_OK
            } else {
                let _ = writeln!(err, "error: ordering chain violated");
                EXIT_INVARIANT
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// One CSV record.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub family: Family,
    pub param: f64,
    pub var_e: f64,
    pub var_l: f64,
    pub standard: f64,
    pub v2: f64,
    pub u2: f64,
    pub gap_uv: f64,
    pub gap_chain_ok: bool,
}

impl SweepRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.family.label(),
            fmt12(self.param),
            fmt12(self.var_e),
            fmt12(self.var_l),
            fmt12(self.standard),
            fmt12(self.v2),
            fmt12(self.u2),
            fmt12(self.gap_uv),
            self.gap_chain_ok
        )
    }
}

/// Rows of a sweep over `n` evenly spaced `kappa` in `[k_min, k_max]`,
/// computed in parallel and returned in `kappa` order.
pub fn sweep_rows(family: Family, k_min: f64, k_max: f64, n: usize) -> crate::Result<Vec<SweepRow>> {
    if !(0.0 <= k_min && k_min < k_max && k_max <= MAX_KAPPA) || n < 2 {
        return Err(Error::InvalidState(format!(
            "sweep needs 0 <= kmin < kmax <= {MAX_KAPPA} and n >= 2"
        )));
    }
    (0..n)
        .into_par_iter()
        .map(|i| {
            let kappa = if i + 1 == n { k_max } else { k_min + (k_max - k_min) * i as f64 / (n - 1) as f64 };
            let r = full_report_with_tol(&family.state(kappa)?, DEFAULT_SATURATION_TOL)?;
            Ok(SweepRow {
                family,
                param: kappa,
                var_e: r.var_e,
                var_l: r.var_l,
                standard: r.standard,
                v2: r.v2,
                u2: r.u2,
                gap_uv: r.u2 - r.v2,
                gap_chain_ok: r.sat_ordering_chain,
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::with_capacity(64 * (rows.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for row in rows {
        s.push_str(&row.to_csv());
        s.push('\n');
    }
    s
}

pub fn cmd_sweep(
    family: Family,
    k_min: f64,
    k_max: f64,
    n: usize,
    path: &Path,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let rows = match sweep_rows(family, k_min, k_max, n) {
        Ok(rows) => rows,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    if let Err(e) = std::fs::write(path, sweep_csv(&rows)) {
        let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
        return EXIT_INPUT;
    }
    let violations = rows.iter().filter(|r| !r.gap_chain_ok).count();
    let _ = writeln!(out, "wrote {} rows to {}", rows.len(), path.display());
    if violations > 0 {
        let _ = writeln!(err, "error: ordering chain violated in {violations} rows");
        return EXIT_INVARIANT;
    }
    EXIT_OK
}

/// Names of the checks run by `verify`, in report order.
pub const VERIFY_CHECKS: [&str; 9] = [
    "normalization",
    "moment_oracle",
    "mean_identity",
    "discriminant_identity",
    "ordering_chain",
    "closed_form_vs_sweep",
    "rotation_invariance",
    "component_relations",
    "ladder_commutator",
];

/// Runs every check on one stored state; returns per-check outcomes, `None`
/// for checks skipped because an earlier one made them meaningless.
pub fn verify_state(file: &StateFile, phi: f64) -> [Option<bool>; 9] {
    let mut res = [None; 9];
    let normalized = (file.norm_sq() - 1.0).abs() <= NORM_TOL;
    res[0] = Some(normalized);
    let state = match (normalized, file.into_state()) {
        (true, Ok(s)) => s,
        _ => return res,
    };
    let m = moments_from_coeffs(&state);
    res[1] = Some(match quadrature_oracle(&state, oracle_grid_size(&state)) {
        Ok(q) => {
            (m.e1 - q.e1).norm() <= 1e-10
                && (m.e2 - q.e2).norm() <= 1e-10
                && (m.l1 - q.l1).abs() <= 1e-10
                && (m.l2 - q.l2).abs() <= 1e-10
        }
        Err(_) => false,
    });
    let gamma = match covariance(&m) {
        Ok(g) => g,
        Err(_) => return res,
    };
    let ids = invariant_identities(&m, &gamma);
    res[2] = Some(ids.mean_residual() <= 1e-10);
    res[3] = Some(ids.discriminant_residual() <= 1e-10);
    let report = report_from_moments(&m, DEFAULT_SATURATION_TOL);
    res[4] = Some(matches!(&report, Ok(r) if chain_holds(r.var_l, r.u2, r.v2, r.standard)));
    res[5] = Some(match (&report, u2_alpha_sweep_moments(&m, &gamma, 360)) {
        (Ok(r), Ok((u2, _))) => (u2 - r.u2).abs() <= 1e-8,
        _ => false,
    });
    res[6] = Some(match (&report, full_report_with_tol(&rotate(&state, phi), DEFAULT_SATURATION_TOL)) {
        (Ok(a), Ok(b)) => [a.u2 - b.u2, a.v2 - b.v2, a.var_e - b.var_e, a.var_l - b.var_l]
            .iter()
            .all(|d| d.abs() <= 1e-9),
        _ => false,
    });
    res[7] = Some((0..64).all(|k| {
        let (a, b) = component_relation_slack(&m, &gamma, TAU * k as f64 / 64.0);
        a >= -1e-10 && b >= -1e-10
    }));
    res[8] = Some(matches!(commutator_residual(&state), Ok(r) if r <= 1e-10));
    res
}

pub fn cmd_verify(
    corpus_size: usize,
    seed: u64,
    extra: Option<&Path>,
    dump: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    if corpus_size == 0 && extra.is_none() {
        let _ = writeln!(err, "error: --corpus must be at least 1");
        return EXIT_INPUT;
    }
    let mut files: Vec<StateFile> = random_corpus(seed, corpus_size).iter().map(CircleState::to_file).collect();
    if let Some(path) = extra {
        match StateFile::read(path) {
            Ok(f) => files.push(f),
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_INPUT;
            }
        }
    }
    let mut angles = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let phis: Vec<f64> = files.iter().map(|_| angles.random_range(-TAU..TAU)).collect();

    let results: Vec<[Option<bool>; 9]> =
        files.par_iter().zip(phis.par_iter()).map(|(f, &phi)| verify_state(f, phi)).collect();

    let _ = writeln!(out, "verify: seed={seed} corpus={corpus_size} extra={}", usize::from(extra.is_some()));
    for (i, name) in VERIFY_CHECKS.iter().enumerate() {
        let checked = results.iter().filter(|r| r[i].is_some()).count();
        let passed = results.iter().filter(|r| r[i] == Some(true)).count();
        let _ = writeln!(out, "{name:<24}{passed}/{checked}");
    }
    let first_failure = results.iter().position(|r| {
        r.contains(&Some(false)) || r[1..].iter().all(Option::is_none)
    });
    match first_failure {
        None => {
            let _ = writeln!(out, "result: PASS");
            EXIT_OK
        }
        Some(idx) => {
            let failed: Vec<&str> = VERIFY_CHECKS
                .iter()
                .zip(results[idx].iter())
                .filter(|(_, c)| **c == Some(false))
                .map(|(n, _)| *n)
                .collect();
            let path = dump.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("verify-reproducer.json"));
            let _ = writeln!(out, "result: FAIL (state #{idx}: {})", failed.join(", "));
            match files[idx].write(&path) {
                Ok(()) => {
                    let _ = writeln!(out, "reproducer: {}", path.display());
                }
                Err(e) => {
                    let _ = writeln!(err, "error: cannot write reproducer: {e}");
                }
            }
            EXIT_INVARIANT
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_grammar() {
        assert_eq!(Builtin::parse("l-eigenstate:3").unwrap(), Builtin::LEigenstate(3));
        assert_eq!(Builtin::parse("l-eigenstate:-2").unwrap(), Builtin::LEigenstate(-2));
        assert_eq!(Builtin::parse("cat:k=1.5").unwrap(), Builtin::Cat { kappa: 1.5 });
        assert_eq!(
            Builtin::parse("von-mises:k=1,l=0,a=0").unwrap(),
            Builtin::VonMises(VonMisesParams { kappa: 1.0, lambda: 0, alpha: 0.0 })
        );
        assert_eq!(
            Builtin::parse("x-extremal:a=0.5,k=2").unwrap(),
            Builtin::XExtremal(VonMisesParams { kappa: 2.0, lambda: 0, alpha: 0.5 })
        );
        for bad in ["von-mises", "cat:k=x", "cat:k=1,l=2", "von-mises:l=1", "foo:k=1", "l-eigenstate:1.5", "von-mises:k=1,l=0.5"] {
            assert!(Builtin::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn twelve_digit_formatting() {
        assert_eq!(fmt12(0.0), "0");
        assert_eq!(fmt12(0.25), "0.25");
        assert_eq!(fmt12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt12(-2.0e-20), "-2e-20");
        assert_eq!(fmt12(f64::NAN), "null");
        assert_eq!(fmt12(123456789.0123456), "123456789.012");
    }

    #[test]
    fn sweep_argument_checks() {
        assert!(sweep_rows(Family::Cat, 1.0, 0.5, 10).is_err());
        assert!(sweep_rows(Family::Cat, 0.0, 51.0, 10).is_err());
        assert!(sweep_rows(Family::Cat, 0.0, 1.0, 1).is_err());
        assert!(sweep_rows(Family::Cat, -0.5, 1.0, 3).is_err());
    }

    #[test]
    fn sweep_rows_are_ordered() {
        let rows = sweep_rows(Family::VonMises, 0.0, 2.0, 5).unwrap();
        let kappas: Vec<f64> = rows.iter().map(|r| r.param).collect();
        assert_eq!(kappas, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }
}
