mod args;
mod rates;
mod report;

use std::process::ExitCode;

use clap::Parser;
use rayon::prelude::*;

use asep_core::montecarlo::{estimate_duality_gap, SimulationConfig, RNG_ALGORITHM};
use asep_core::scalar::rational;
use asep_core::symmetry::{self, ShiftRule};
use asep_core::verification::{self, SuiteConfig};
use asep_core::{xxz, CheckResult, Configuration, Error, Mode, RateParameters, Residual, Scalar};

use args::{Cli, Command, Experiment, ModeArg, Options, ReportCommand, Which};
use rates::Rates;
use report::{Grid, Report};

/// Standard deviations allowed between the two Monte Carlo sides.
const MC_SIGMAS: f64 = 3.0;

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InternalConsistency(_) => Failure::Internal(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Usage(s)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

/// Returns whether every check passed.
fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Report {
            what: ReportCommand::Schema,
        } => {
            print!("{}", report::SCHEMA);
            Ok(true)
        }
        Command::Verify { which, opts } => {
            let checks = verify(which, &opts)?;
            emit(
                &opts,
                opts.mode.into(),
                format!("verify {}", name_of(which)),
                &checks,
            )
        }
        Command::Simulate {
            experiment:
                Experiment::DualityMc {
                    opts,
                    eta,
                    xi,
                    trajectories,
                    seed,
                },
        } => {
            let check = simulate(&opts, eta, xi, trajectories, seed)?;
            emit(
                &opts,
                Mode::Numeric,
                "simulate duality-mc".into(),
                std::slice::from_ref(&check),
            )
        }
    }
}

fn name_of(which: Which) -> String {
    use clap::ValueEnum;
    which
        .to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default()
}

fn emit(
    opts: &Options,
    mode: Mode,
    command: String,
    checks: &[CheckResult],
) -> Result<bool, Failure> {
    let grid = Grid {
        sites: opts.sites(),
        particles: opts.particles(),
    };
    let report = Report::new(mode, command, grid, checks);
    let to_stdout = opts.json.as_deref() == Some(std::path::Path::new("-"));
    if !to_stdout {
        report::print_text(checks);
    }
    if let Some(path) = &opts.json {
        report::write_json(&report, path)?;
    }
    Ok(report.passed())
}

fn verify(which: Which, opts: &Options) -> Result<Vec<CheckResult>, Failure> {
    if which == Which::All {
        return verify_all(opts);
    }
    let mut out = match rates::resolve(opts)? {
        Rates::Exact(r) => checks(which, opts, &r)?,
        Rates::Numeric(r) => {
            let mut out = checks(which, opts, &r)?;
            if which == Which::Prop1 {
                out.push(xxz::check_zeta(r.gamma, r.alpha, r.tau().value())?);
            }
            out
        }
    };
    if which == Which::Duality {
        if let Some(t) = opts.t {
            let r = rates::resolve_numeric(opts)?;
            let runs: Vec<_> = pairs(opts)
                .into_par_iter()
                .map(|(l, n)| verification::semigroup_check(l, n, &r, t))
                .collect::<Result<_, _>>()?;
            out.extend(runs);
        }
    }
    Ok(out)
}

fn pairs(opts: &Options) -> Vec<(usize, u32)> {
    let ns = opts.particles();
    opts.sites()
        .into_iter()
        .flat_map(|l| ns.iter().map(move |&n| (l, n)))
        .collect()
}

/// Runs `f` over the (L, N) grid concurrently, keeping grid order.
fn over_grid<F>(opts: &Options, f: F) -> Result<Vec<CheckResult>, Error>
where
    F: Fn(usize, u32) -> Result<Vec<CheckResult>, Error> + Sync,
{
    let runs: Vec<Vec<CheckResult>> = pairs(opts)
        .into_par_iter()
        .map(|(l, n)| f(l, n))
        .collect::<Result<_, _>>()?;
    Ok(runs.into_iter().flatten().collect())
}

fn checks<S: Scalar>(
    which: Which,
    opts: &Options,
    r: &RateParameters<S>,
) -> Result<Vec<CheckResult>, Failure> {
    let tau = r.tau();
    let out = match which {
        Which::All => unreachable!("handled by verify_all"),
        Which::Prop1 => {
            let mut out = vec![xxz::verify_proof_scalar_identities(tau, &r.gamma)];
            for l in opts.sites() {
                out.push(xxz::check_prop1(l, r)?);
            }
            out
        }
        Which::Lemma => opts
            .sites()
            .into_iter()
            .map(|l| verification::check_detailed_balance(l, r))
            .collect::<Result<_, _>>()?,
        Which::Duality => over_grid(opts, |l, n| Ok(vec![verification::check_duality(l, n, r)?]))?,
        Which::Corollary => over_grid(opts, |l, n| {
            Ok(vec![verification::check_corollary(l, n, r)?])
        })?,
        Which::Symmetry => {
            let mut out = vec![symmetry::check_matrix_m(tau)];
            if opts.printed {
                out.push(symmetry::verify_shift_relation(
                    -3..=3,
                    tau,
                    ShiftRule::Unit,
                ));
            }
            out.push(symmetry::verify_shift_relation(
                -3..=3,
                tau,
                ShiftRule::Representation,
            ));
            out.push(symmetry::verify_coproduct_identity(tau)?);
            out.extend(over_grid(opts, |l, n| {
                let mut v = vec![
                    symmetry::check_commutation(l, n, r)?,
                    symmetry::check_sn_explicit(l, n, tau, ShiftRule::Representation)?,
                ];
                if opts.printed {
                    v.push(symmetry::check_sn_explicit(l, n, tau, ShiftRule::Unit)?);
                }
                Ok(v)
            })?);
            out
        }
        Which::Examples => {
            let mut out = vec![verification::run_paper_example_l1(
                opts.n_max.or(opts.n).unwrap_or(6),
                tau,
                &r.gamma,
            )?];
            for l in opts.sites().into_iter().filter(|&l| l >= 3) {
                out.push(verification::run_paper_example_n1(l, r)?);
            }
            out
        }
        Which::Conventions => vec![symmetry::check_conventions(tau)?],
    };
    Ok(out)
}

fn verify_all(opts: &Options) -> Result<Vec<CheckResult>, Failure> {
    if opts.p.is_some() || opts.alpha.is_some() || opts.beta.is_some() || opts.delta.is_some() {
        return Err(Failure::Usage(
            "verify all runs the duality-regime family; set it with --gamma and (numeric) --tau"
                .into(),
        ));
    }
    if opts.l.is_some() || opts.n.is_some() {
        return Err(Failure::Usage("verify all takes --Lmax/--Nmax".into()));
    }
    let defaults = SuiteConfig::default();
    let mode: Mode = opts.mode.into();
    let tau0 = match (&opts.tau, opts.mode) {
        (Some(t), ModeArg::Numeric) => rates::number(t)?,
        (Some(_), ModeArg::Exact) => {
            return Err(Failure::Usage(
                "verify all in exact mode uses symbolic τ; drop --tau".into(),
            ))
        }
        (None, _) => defaults.tau0,
    };
    let config = SuiteConfig {
        l_max: opts.l_max.unwrap_or(defaults.l_max),
        n_max: opts.n_max.unwrap_or(defaults.n_max),
        mode,
        scale: rational(1, 1),
        gammas: vec![asep_core::scalar::parse_rational(&opts.gamma)?],
        tau0,
        times: opts.t.map(|t| vec![t]).unwrap_or(defaults.times),
        negative_controls: opts.negative_controls,
        printed_variants: opts.printed,
        ..defaults
    };
    Ok(verification::run_all(&config)?)
}

fn simulate(
    opts: &Options,
    eta: Option<String>,
    xi: Option<String>,
    trajectories: usize,
    seed: u64,
) -> Result<CheckResult, Failure> {
    let rates = rates::resolve_numeric(opts)?;
    let sites = opts.l.or(opts.l_max).unwrap_or(3);
    let n = opts.n.or(opts.n_max).unwrap_or(1);
    let t = opts.t.unwrap_or(1.0);
    let eta0 = match eta {
        Some(s) => Configuration::parse(&s)?,
        None => Configuration::parse(&"0".repeat(sites))?,
    };
    let xi0 = match xi {
        Some(s) => Configuration::parse(&s)?,
        None => Configuration::parse(&format!("1{}", "0".repeat(sites.saturating_sub(1))))?,
    };
    let config = SimulationConfig {
        sites,
        rates: rates.clone(),
        n,
        t_max: t,
        n_trajectories: trajectories,
        seed,
    };
    let est = estimate_duality_gap(&config, eta0, xi0)?;
    let mut check = CheckResult::new("montecarlo.duality_gap", Mode::Numeric)
        .param("L", sites)
        .param("N", n)
        .param("t", t)
        .param("trajectories", trajectories as u64)
        .param("seed", seed)
        .param("eta", eta0.to_string())
        .param("xi", xi0.to_string())
        .param("p", rates.p)
        .param("q", rates.q)
        .param("alpha", rates.alpha)
        .param("gamma", rates.gamma)
        .derive("lhs_mean", est.lhs_mean)
        .derive("rhs_mean", est.rhs_mean)
        .derive("gap", est.gap)
        .derive("lhs_stderr", est.lhs_stderr)
        .derive("rhs_stderr", est.rhs_stderr)
        .derive("combined_stderr", est.combined_stderr)
        .derive("sigmas", MC_SIGMAS)
        .derive("rng", RNG_ALGORITHM);
    check.residual = Residual::Numeric(est.gap.abs());
    check.passed = est.gap.abs() <= MC_SIGMAS * est.combined_stderr;
    Ok(check)
}
