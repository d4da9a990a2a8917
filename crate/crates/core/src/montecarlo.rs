//! Continuous-time simulation of the open ASEP and a Monte Carlo estimate
//! of the duality gap `E[D(η_t, ξ)] − E[D(η, ξ_t)]`.
//!
//! The process has rate matrix `−𝓛`: bulk hops right at `p` and left at
//! `q`, entry `α` and exit `γ` at site 1, entry `δ` and exit `β` at site L.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;

use crate::asep::RateParameters;
use crate::error::{Error, Result};
use crate::operator::{Configuration, MAX_SITES};
use crate::symmetry::build_dn;

/// Recorded in reports next to simulation results.
pub const RNG_ALGORITHM: &str =
    "ChaCha8 (rand_chacha), seed = config seed, stream = trajectory index";

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationConfig {
    pub sites: usize,
    pub rates: RateParameters<f64>,
    pub n: u32,
    pub t_max: f64,
    pub n_trajectories: usize,
    pub seed: u64,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sites == 0 || self.sites > MAX_SITES {
            return Err(Error::Domain(format!(
                "lattice size out of range: {}",
                self.sites
            )));
        }
        if self.n == 0 {
            return Err(Error::Domain("N must be ≥ 1".into()));
        }
        if !self.t_max.is_finite() || self.t_max < 0.0 {
            return Err(Error::Domain(format!(
                "time must be finite and ≥ 0, got {}",
                self.t_max
            )));
        }
        if self.n_trajectories == 0 {
            return Err(Error::Domain("need at least one trajectory".into()));
        }
        let r = &self.rates;
        if [r.p, r.q, r.alpha, r.beta, r.gamma, r.delta]
            .iter()
            .any(|x| !x.is_finite() || *x < 0.0)
        {
            return Err(Error::Domain("rates must be finite and nonnegative".into()));
        }
        Ok(())
    }
}

/// Outcome of [`estimate_duality_gap`].
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct DualityEstimate {
    pub lhs_mean: f64,
    pub rhs_mean: f64,
    pub gap: f64,
    pub lhs_stderr: f64,
    pub rhs_stderr: f64,
    pub combined_stderr: f64,
}

/// The independent random stream of one trajectory.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Possible jumps out of `eta` with their rates.
pub fn transitions(eta: Configuration, rates: &RateParameters<f64>) -> Vec<(Configuration, f64)> {
    let sites = eta.sites();
    let mut out = Vec::with_capacity(sites + 1);
    let mut push = |to: Configuration, rate: f64| {
        if rate > 0.0 {
            out.push((to, rate));
        }
    };
    for j in 1..sites {
        match (eta.occupied(j), eta.occupied(j + 1)) {
            (true, false) => push(eta.with_flipped(j).with_flipped(j + 1), rates.p),
            (false, true) => push(eta.with_flipped(j).with_flipped(j + 1), rates.q),
            _ => {}
        }
    }
    push(
        eta.with_flipped(1),
        if eta.occupied(1) {
            rates.gamma
        } else {
            rates.alpha
        },
    );
    push(
        eta.with_flipped(sites),
        if eta.occupied(sites) {
            rates.beta
        } else {
            rates.delta
        },
    );
    out
}

/// One Gillespie step: holding time and next state, or `None` if `eta` is
/// absorbing.
pub fn next_event<R: Rng + ?Sized>(
    eta: Configuration,
    rates: &RateParameters<f64>,
    rng: &mut R,
) -> Option<(f64, Configuration)> {
    let moves = transitions(eta, rates);
    let total: f64 = moves.iter().map(|(_, r)| r).sum();
    if total <= 0.0 {
        return None;
    }
    let wait = Exp::new(total).expect("positive total rate").sample(rng);
    let mut u = rng.random::<f64>() * total;
    for (to, r) in &moves {
        if u < *r {
            return Some((wait, *to));
        }
        u -= r;
    }
    // Rounding left u at the top edge.
    Some((wait, moves.last().expect("nonempty").0))
}

/// Samples `η_t` started from `initial`.
pub fn simulate_trajectory<R: Rng + ?Sized>(
    rates: &RateParameters<f64>,
    initial: Configuration,
    t: f64,
    rng: &mut R,
) -> Configuration {
    let mut eta = initial;
    let mut clock = 0.0;
    while let Some((wait, next)) = next_event(eta, rates, rng) {
        clock += wait;
        if clock > t {
            break;
        }
        eta = next;
    }
    eta
}

/// Empirical law of `η_t` over `samples` trajectories, indexed by basis
/// index.
pub fn empirical_distribution(
    rates: &RateParameters<f64>,
    initial: Configuration,
    t: f64,
    samples: usize,
    seed: u64,
) -> Vec<f64> {
    let ends: Vec<usize> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = trajectory_rng(seed, i as u64);
            simulate_trajectory(rates, initial, t, &mut rng).index()
        })
        .collect();
    let mut counts = vec![0usize; 1 << initial.sites()];
    for e in ends {
        counts[e] += 1;
    }
    counts
        .into_iter()
        .map(|c| c as f64 / samples as f64)
        .collect()
}

/// Neumaier-compensated sum in slice order.
fn compensated_sum(xs: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn mean_and_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = compensated_sum(xs) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    (mean, compensated_sum(&sq) / (n - 1.0))
}

/// Compares `E_η₀[D_N(η_t, ξ₀)]` with `E_ξ₀[D_N(η₀, ξ_t)]`.
///
/// Trajectory `i` of the left side uses stream `2i`, of the right side
/// stream `2i + 1`; results are reduced in trajectory order, so the estimate
/// depends only on the seed.
pub fn estimate_duality_gap(
    config: &SimulationConfig,
    eta0: Configuration,
    xi0: Configuration,
) -> Result<DualityEstimate> {
    config.validate()?;
    config.rates.require_duality_regime()?;
    if eta0.sites() != config.sites || xi0.sites() != config.sites {
        return Err(Error::DimensionMismatch {
            left: eta0.sites().max(xi0.sites()),
            right: config.sites,
        });
    }
    let d = build_dn(config.sites, config.n, config.rates.tau())?;
    let n = config.n_trajectories;
    let samples: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut left_rng = trajectory_rng(config.seed, 2 * i as u64);
            let mut right_rng = trajectory_rng(config.seed, 2 * i as u64 + 1);
            let eta_t = simulate_trajectory(&config.rates, eta0, config.t_max, &mut left_rng);
            let xi_t = simulate_trajectory(&config.rates, xi0, config.t_max, &mut right_rng);
            (
                d.get(eta_t.index(), xi0.index()),
                d.get(eta0.index(), xi_t.index()),
            )
        })
        .collect();
    let (lhs, rhs): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
    let (lhs_mean, lhs_var) = mean_and_variance(&lhs);
    let (rhs_mean, rhs_var) = mean_and_variance(&rhs);
    Ok(DualityEstimate {
        lhs_mean,
        rhs_mean,
        gap: lhs_mean - rhs_mean,
        lhs_stderr: (lhs_var / n as f64).sqrt(),
        rhs_stderr: (rhs_var / n as f64).sqrt(),
        combined_stderr: (lhs_var / n as f64 + rhs_var / n as f64).sqrt(),
    })
}
