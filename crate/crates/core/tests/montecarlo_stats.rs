//! Statistical checks of the simulator against exact oracles.

use asep_core::asep::build_generator;
use asep_core::expm::expm;
use asep_core::montecarlo::{
    empirical_distribution, estimate_duality_gap, next_event, simulate_trajectory, trajectory_rng,
    SimulationConfig,
};
use asep_core::symmetry::build_dn;
use asep_core::{Configuration, RateParameters};

const SAMPLES: usize = 100_000;
/// Asymptotic Kolmogorov distribution quantile at significance 1e−3.
const KS_CRITICAL: f64 = 1.9495;

fn rates() -> RateParameters<f64> {
    RateParameters::numeric(2.0, 0.5, 4.0, 0.0, 1.0, 0.0).unwrap()
}

fn ks_exponential(mut samples: Vec<f64>, rate: f64) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = 1.0 - (-rate * x).exp();
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
        * n.sqrt()
}

fn holding_times(r: &RateParameters<f64>, from: Configuration, seed: u64) -> Vec<f64> {
    (0..SAMPLES)
        .map(|i| {
            let mut rng = trajectory_rng(seed, i as u64);
            next_event(from, r, &mut rng).unwrap().0
        })
        .collect()
}

#[test]
fn single_site_holding_times_are_exponential() {
    let r = rates();
    let empty = Configuration::parse("0").unwrap();
    let full = Configuration::parse("1").unwrap();
    assert!(ks_exponential(holding_times(&r, empty, 1), 4.0) <= KS_CRITICAL);
    assert!(ks_exponential(holding_times(&r, full, 2), 1.0) <= KS_CRITICAL);
}

#[test]
fn holding_time_uses_total_exit_rate() {
    // "010": hop right (p), hop left (q), entry at site 1 (α).
    let r = rates();
    let eta = Configuration::parse("010").unwrap();
    assert!(ks_exponential(holding_times(&r, eta, 3), 2.0 + 0.5 + 4.0) <= KS_CRITICAL);
    // A wrong rate is rejected by the same statistic.
    assert!(ks_exponential(holding_times(&r, eta, 3), 2.0 + 0.5) > KS_CRITICAL);
}

#[test]
fn absorbing_limit() {
    let alpha = 2.0;
    let r = RateParameters::numeric(1.0, 1.0, alpha, 0.0, 0.0, 0.0).unwrap();
    let empty = Configuration::parse("0").unwrap();
    // P(still empty) = e^{−20} ≈ 2e−9 per sample.
    for i in 0..10_000 {
        let mut rng = trajectory_rng(9, i);
        assert!(simulate_trajectory(&r, empty, 20.0 / alpha, &mut rng).occupied(1));
    }
}

#[test]
fn finite_time_law_matches_exponential() {
    let r = rates();
    let start = Configuration::parse("010").unwrap();
    let t = 2.0;
    let g = build_generator(3, &r).unwrap().to_dense();
    let propagator = expm(&(g * -t)).unwrap();
    let empirical = empirical_distribution(&r, start, t, SAMPLES, 17);
    for (state, freq) in empirical.iter().enumerate() {
        let p = propagator[(state, start.index())];
        let sigma = (p * (1.0 - p) / SAMPLES as f64).sqrt();
        assert!(
            (freq - p).abs() <= 4.0 * sigma + 1e-12,
            "state {state}: empirical {freq}, exact {p}"
        );
    }
}

#[test]
fn long_run_law_is_reversible_measure() {
    let r = rates();
    let tau = r.tau().value();
    let weights: Vec<f64> = Configuration::all(3)
        .map(|eta| tau.powi(2 * eta.position_sum() as i32))
        .collect();
    let z: f64 = weights.iter().sum();
    let empirical =
        empirical_distribution(&r, Configuration::parse("000").unwrap(), 50.0, SAMPLES, 23);
    let tv: f64 = empirical
        .iter()
        .zip(&weights)
        .map(|(e, w)| (e - w / z).abs())
        .sum::<f64>()
        / 2.0;
    assert!(tv < 0.01, "total variation {tv}");
}

#[test]
fn duality_expectations_match_exact_propagation() {
    let r = rates();
    let t = 0.7;
    let config = SimulationConfig {
        sites: 3,
        rates: r.clone(),
        n: 2,
        t_max: t,
        n_trajectories: SAMPLES,
        seed: 31,
    };
    let eta0 = Configuration::parse("000").unwrap();
    let xi0 = Configuration::parse("100").unwrap();
    let est = estimate_duality_gap(&config, eta0, xi0).unwrap();
    let g = build_generator(3, &r).unwrap().to_dense();
    let propagator = expm(&(g * -t)).unwrap();
    let d = build_dn(3, 2, r.tau()).unwrap().to_dense();
    let lhs_exact = (propagator.transpose() * &d)[(eta0.index(), xi0.index())];
    let rhs_exact = (&d * &propagator)[(eta0.index(), xi0.index())];
    assert!((lhs_exact - rhs_exact).abs() < 1e-12);
    assert!(
        (est.lhs_mean - lhs_exact).abs() <= 4.0 * est.lhs_stderr,
        "{est:?} vs {lhs_exact}"
    );
    assert!(
        (est.rhs_mean - rhs_exact).abs() <= 4.0 * est.rhs_stderr,
        "{est:?} vs {rhs_exact}"
    );
}

#[test]
fn seeds_change_samples_but_not_the_law() {
    let r = rates();
    let base = SimulationConfig {
        sites: 3,
        rates: r,
        n: 1,
        t_max: 0.5,
        n_trajectories: 20_000,
        seed: 1,
    };
    let eta0 = Configuration::parse("000").unwrap();
    let xi0 = Configuration::parse("100").unwrap();
    let a = estimate_duality_gap(&base, eta0, xi0).unwrap();
    let b = estimate_duality_gap(
        &SimulationConfig {
            seed: 2,
            ..base.clone()
        },
        eta0,
        xi0,
    )
    .unwrap();
    assert_ne!(a.lhs_mean.to_bits(), b.lhs_mean.to_bits());
    assert!((a.lhs_mean - b.lhs_mean).abs() <= 5.0 * (a.lhs_stderr.hypot(b.lhs_stderr)));
}
