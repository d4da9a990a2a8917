//! Every identity as a named check, plus the suite runner.

use crate::asep::{
    build_generator, build_involution, build_reflected_generator, build_v, Mode, RateParameters,
};
use crate::check::{describe_scalar, CheckResult, ALGEBRAIC_TOL, EXPONENTIAL_TOL};
use crate::error::{Error, Result};
use crate::expm::expm;
use crate::operator::Configuration;
use crate::scalar::{rational, LaurentScalar, Rational, Residual, Scalar, Tau};
use crate::symmetry::{self, build_dn, matrix_m, ShiftRule};
use crate::xxz;

fn rate_params<S: Scalar>(out: CheckResult, rates: &RateParameters<S>) -> CheckResult {
    out.tau_param(rates.tau())
        .param("p", describe_scalar(&rates.p))
        .param("q", describe_scalar(&rates.q))
        .param("alpha", describe_scalar(&rates.alpha))
        .param("beta", describe_scalar(&rates.beta))
        .param("gamma", describe_scalar(&rates.gamma))
        .param("delta", describe_scalar(&rates.delta))
        .param("in_regime", rates.in_duality_regime())
}

/// `𝓛^T D_N − D_N 𝓛 = 0`.
///
/// Outside the duality regime the residual is still computed and the
/// record carries `in_regime = false`; see [`check_duality_strict`].
pub fn check_duality<S: Scalar>(
    sites: usize,
    n: u32,
    rates: &RateParameters<S>,
) -> Result<CheckResult> {
    let g = build_generator(sites, rates)?;
    let d = build_dn(sites, n, rates.tau())?;
    let residual = g.transpose().mul(&d)?.residual_against(&d.mul(&g)?)?;
    let out = CheckResult::for_ring::<S>("theorem.duality")
        .param("L", sites)
        .param("N", n);
    Ok(rate_params(out, rates).judged(residual, ALGEBRAIC_TOL))
}

/// [`check_duality`] that rejects rates outside the duality regime.
pub fn check_duality_strict<S: Scalar>(
    sites: usize,
    n: u32,
    rates: &RateParameters<S>,
) -> Result<CheckResult> {
    rates.require_duality_regime()?;
    check_duality(sites, n, rates)
}

/// `V²𝓛V⁻² = 𝓛^T` and the elementwise balance
/// `π(η)·𝓛[η′, η] = π(η′)·𝓛[η, η′]` with `π(η) = τ^{2Σ j η_j}`.
/// Both must hold, and they must agree with each other.
pub fn check_detailed_balance<S: Scalar>(
    sites: usize,
    rates: &RateParameters<S>,
) -> Result<CheckResult> {
    if !rates.beta.is_zero() || !rates.delta.is_zero() {
        return Err(Error::RegimeViolation(
            "detailed balance needs a closed right boundary (β = δ = 0)".into(),
        ));
    }
    let g = build_generator(sites, rates)?;
    let v2 = build_v(sites, 2, rates.tau())?;
    let v2_inv = build_v(sites, -2, rates.tau())?;
    let operator_residual = v2.mul(&g)?.mul(&v2_inv)?.residual_against(&g.transpose())?;
    let weights: Vec<S> = Configuration::all(sites)
        .map(|eta| rates.tau().pow(2 * eta.position_sum()))
        .collect();
    let violations = crate::asep::detailed_balance_violations(&g, &weights)?;
    let operator_ok = operator_residual.passes(ALGEBRAIC_TOL);
    let balance_ok = violations.is_empty();
    let out = CheckResult::for_ring::<S>("lemma.detailed_balance").param("L", sites);
    Ok(rate_params(out, rates)
        .judged(operator_residual, ALGEBRAIC_TOL)
        .require(balance_ok)
        .derive("operator_identity", operator_ok)
        .derive("elementwise_balance", balance_ok)
        .derive("balance_violations", violations.len())
        .derive("agree", operator_ok == balance_ok))
}

/// `𝓛^T D_N Π = D_N Π 𝓛̃`. Also records whether `Π𝓛Π` equals `𝓛̃` and
/// whether it equals `𝓛^T`.
pub fn check_corollary<S: Scalar>(
    sites: usize,
    n: u32,
    rates: &RateParameters<S>,
) -> Result<CheckResult> {
    let g = build_generator(sites, rates)?;
    let reflected = build_reflected_generator(sites, rates)?;
    let pi = build_involution(sites)?;
    let d = build_dn(sites, n, rates.tau())?;
    let dpi = d.mul(&pi)?;
    let residual = g
        .transpose()
        .mul(&dpi)?
        .residual_against(&dpi.mul(&reflected)?)?;
    let conj = pi.mul(&g)?.mul(&pi)?;
    let tilde = conj.sub(&reflected)?.residual().passes(ALGEBRAIC_TOL);
    let transpose = conj.sub(&g.transpose())?.residual().passes(ALGEBRAIC_TOL);
    let out = CheckResult::for_ring::<S>("corollary.particle_hole")
        .param("L", sites)
        .param("N", n);
    Ok(rate_params(out, rates)
        .judged(residual, ALGEBRAIC_TOL)
        .derive("pi_conjugate_is_reflected", tilde)
        .derive("pi_conjugate_is_transpose", transpose))
}

/// Single site: for `N = 1..=n_max`,
/// `−γ(M^N)₁₂τ⁻¹ + γ(M^N)₁₁ = −α(M^N)₂₁τ⁻¹ + α(M^N)₂₂τ⁻² = (−1)^N γ`
/// with `α = γτ²`. The `(hole, particle)` entries of `𝓛^T D_N` and
/// `D_N 𝓛` are also compared; with `𝓛`'s sign convention they equal the
/// negated display.
pub fn run_paper_example_l1<S: Scalar>(n_max: u32, tau: &Tau<S>, gamma: &S) -> Result<CheckResult> {
    let alpha = gamma.mul_ref(&tau.pow(2));
    let rates = RateParameters::from_parts(
        tau.pow(1),
        tau.pow(-1),
        alpha.clone(),
        S::zero(),
        gamma.clone(),
        S::zero(),
        S::one(),
        tau.clone(),
    );
    let g = build_generator(1, &rates)?;
    let m = matrix_m(tau);
    let mut power = crate::operator::SiteMatrix::identity();
    let mut diffs = Vec::new();
    let mut values = Vec::new();
    for n in 1..=n_max {
        power = power.mul(&m);
        let at = |r: usize, c: usize| power.get(r, c).clone();
        let lhs = gamma
            .mul_ref(&at(0, 0))
            .sub_ref(&gamma.mul_ref(&at(0, 1)).mul_ref(tau.inv()));
        let rhs = alpha
            .mul_ref(&at(1, 1))
            .mul_ref(&tau.pow(-2))
            .sub_ref(&alpha.mul_ref(&at(1, 0)).mul_ref(tau.inv()));
        let expected = if n % 2 == 0 {
            gamma.clone()
        } else {
            gamma.neg_ref()
        };
        let d = build_dn(1, n, tau)?;
        let left = g.transpose().mul(&d)?.get(0, 1);
        let right = d.mul(&g)?.get(0, 1);
        diffs.push(lhs.sub_ref(&expected));
        diffs.push(rhs.sub_ref(&expected));
        diffs.push(left.add_ref(&expected));
        diffs.push(right.add_ref(&expected));
        values.push(describe_scalar(&lhs));
    }
    Ok(CheckResult::for_ring::<S>("example.single_site")
        .param("N_max", n_max)
        .tau_param(tau)
        .param("gamma", describe_scalar(gamma))
        .judged(S::residual(diffs.iter()), ALGEBRAIC_TOL)
        .derive("display_values", values))
}

/// One particle, `N = 1`: the telescoping display
/// `pτ^{−x}τ^{−(L−x−1)} + qτ^{−(x−2)}τ^{−(L−x+1)} − (p+q)τ^{−(x−1)}τ^{−(L−x)} = 0`
/// for every interior `x`, and from the matrices: `⟨∅|𝓛^T D₁|x⟩ = ⟨∅|D₁𝓛|x⟩`,
/// with the bulk part of each side (generator without boundary rates)
/// vanishing.
pub fn run_paper_example_n1<S: Scalar>(
    sites: usize,
    rates: &RateParameters<S>,
) -> Result<CheckResult> {
    if sites < 3 {
        return Err(Error::Domain(
            "the single-particle example needs an interior site (L ≥ 3)".into(),
        ));
    }
    let tau = rates.tau();
    let l = sites as i64;
    let (p, q) = (&rates.p, &rates.q);
    let mut diffs = Vec::new();
    for x in 2..l {
        let a = p.mul_ref(&tau.pow(-x)).mul_ref(&tau.pow(-(l - x - 1)));
        let b = q
            .mul_ref(&tau.pow(-(x - 2)))
            .mul_ref(&tau.pow(-(l - x + 1)));
        let c = p
            .add_ref(q)
            .mul_ref(&tau.pow(-(x - 1)))
            .mul_ref(&tau.pow(-(l - x)));
        diffs.push(a.add_ref(&b).sub_ref(&c));
    }
    let display = S::residual(diffs.iter());

    let g = build_generator(sites, rates)?;
    let bulk_rates = RateParameters::from_parts(
        p.clone(),
        q.clone(),
        S::zero(),
        S::zero(),
        S::zero(),
        S::zero(),
        rates.scale().clone(),
        tau.clone(),
    );
    let bulk = build_generator(sites, &bulk_rates)?;
    let d = build_dn(sites, 1, tau)?;
    let left = g.transpose().mul(&d)?;
    let right = d.mul(&g)?;
    let left_bulk = bulk.transpose().mul(&d)?;
    let right_bulk = d.mul(&bulk)?;
    let empty = 0usize;
    let mut matrix_diffs = Vec::new();
    let mut common = Vec::new();
    for x in 2..sites {
        let col = 1usize << (x - 1);
        matrix_diffs.push(left.get(empty, col).sub_ref(&right.get(empty, col)));
        matrix_diffs.push(left_bulk.get(empty, col));
        matrix_diffs.push(right_bulk.get(empty, col));
        common.push(describe_scalar(&right.get(empty, col)));
    }
    let matrix = S::residual(matrix_diffs.iter());
    let out = CheckResult::for_ring::<S>("example.single_particle").param("L", sites);
    Ok(rate_params(out, rates)
        .judged(display.worst(matrix), ALGEBRAIC_TOL)
        .derive("boundary_entries", common))
}

/// `e^{−t𝓛^T} D_N = D_N e^{−t𝓛}` (the Markov semigroup of the process),
/// with the ∞-norm (max row sum) of the difference at most `1e−8`.
pub fn semigroup_check(
    sites: usize,
    n: u32,
    rates: &RateParameters<f64>,
    t: f64,
) -> Result<CheckResult> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Domain(format!(
            "time must be finite and ≥ 0, got {t}"
        )));
    }
    let g = build_generator(sites, rates)?.to_dense();
    let d = build_dn(sites, n, rates.tau())?.to_dense();
    let left = expm(&(g.transpose() * -t))? * &d;
    let right = &d * expm(&(g * -t))?;
    let residual = crate::expm::norm_inf(&(left - right));
    let out = CheckResult::new("semigroup.duality", Mode::Numeric)
        .param("L", sites)
        .param("N", n)
        .param("t", t);
    Ok(rate_params(out, rates).judged(Residual::Numeric(residual), EXPONENTIAL_TOL))
}

/// Grid and options for [`run_all`].
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub l_max: usize,
    pub n_max: u32,
    pub mode: Mode,
    /// `√(pq)`; rates are `p = cτ`, `q = cτ⁻¹`, `α = γτ²`.
    pub scale: Rational,
    pub gammas: Vec<Rational>,
    /// τ used in numeric mode.
    pub tau0: f64,
    /// Largest `N` for the single-site example.
    pub example_n_max: u32,
    /// Semigroup times (numeric mode only).
    pub times: Vec<f64>,
    /// Append duality checks with one hypothesis broken. Such a record
    /// passes when the identity is violated.
    pub negative_controls: bool,
    /// Also run the relations with the printed `+1` shift, which are known
    /// to fail.
    pub printed_variants: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            l_max: 4,
            n_max: 2,
            mode: Mode::Exact,
            scale: rational(1, 1),
            gammas: vec![rational(1, 1)],
            tau0: 2.0,
            example_n_max: 6,
            times: vec![0.5, 1.0],
            negative_controls: false,
            printed_variants: false,
        }
    }
}

impl SuiteConfig {
    /// A config whose grid is empty: [`run_all`] returns no checks.
    pub fn empty() -> Self {
        Self {
            l_max: 0,
            ..Self::default()
        }
    }
}

/// Runs the suite in a fixed order. Any internal-consistency error aborts.
pub fn run_all(config: &SuiteConfig) -> Result<Vec<CheckResult>> {
    if config.l_max == 0 || config.n_max == 0 || config.gammas.is_empty() {
        return Ok(Vec::new());
    }
    let exact: Vec<_> = config
        .gammas
        .iter()
        .map(|g| RateParameters::exact_regime(config.scale.clone(), g.clone()))
        .collect::<Result<_>>()?;
    let unit: Vec<_> = config
        .gammas
        .iter()
        .map(|g| RateParameters::exact_regime(rational(1, 1), g.clone()))
        .collect::<Result<_>>()?;
    match config.mode {
        Mode::Exact => run_grid(config, &exact, &unit),
        Mode::Numeric => {
            let eval = |v: &[RateParameters<LaurentScalar>]| -> Result<Vec<_>> {
                v.iter().map(|r| r.evaluate(config.tau0)).collect()
            };
            let mut out = run_grid(config, &eval(&exact)?, &eval(&unit)?)?;
            for r in eval(&exact)? {
                for sites in 1..=config.l_max {
                    for n in 1..=config.n_max {
                        for &t in &config.times {
                            out.push(semigroup_check(sites, n, &r, t)?);
                        }
                    }
                }
            }
            Ok(out)
        }
    }
}

/// Broken-hypothesis variants of regime rates: `β = 1/10`, `δ = 1/10`,
/// `α = (101/100)·γτ²`.
pub fn negative_control_rates<S: Scalar>(
    rates: &RateParameters<S>,
) -> Vec<(&'static str, RateParameters<S>)> {
    let tenth = S::from_rational(&rational(1, 10));
    let mut beta = rates.clone();
    beta.beta = tenth.clone();
    let mut delta = rates.clone();
    delta.delta = tenth;
    let mut alpha = rates.clone();
    alpha.alpha = rates.alpha.mul_ref(&S::from_rational(&rational(101, 100)));
    vec![("beta", beta), ("delta", delta), ("alpha", alpha)]
}

/// Renames a duality record broken on purpose; it passes iff the identity
/// failed.
pub fn negative_control(mut check: CheckResult, label: &str) -> CheckResult {
    check.name = format!("negative_control.{label}");
    check.passed = !check.passed;
    check
        .derived
        .insert("identity_holds".into(), (!check.passed).into());
    check
}

fn run_grid<S: Scalar>(
    config: &SuiteConfig,
    rates: &[RateParameters<S>],
    unit: &[RateParameters<S>],
) -> Result<Vec<CheckResult>> {
    let tau = rates[0].tau();
    let mut out = vec![symmetry::check_matrix_m(tau)];
    if config.printed_variants {
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
    out.push(symmetry::check_conventions(tau)?);
    for u in unit {
        out.push(xxz::verify_proof_scalar_identities(u.tau(), &u.gamma));
        for sites in 1..=config.l_max {
            out.push(xxz::check_prop1(sites, u)?);
        }
    }
    for g in &config.gammas {
        let g = crate::scalar::rational_to_f64(g);
        out.push(xxz::check_zeta(
            g,
            g * config.tau0 * config.tau0,
            config.tau0,
        )?);
    }
    for r in rates {
        for sites in 1..=config.l_max {
            out.push(check_detailed_balance(sites, r)?);
            for n in 1..=config.n_max {
                out.push(check_duality(sites, n, r)?);
                out.push(check_corollary(sites, n, r)?);
                out.push(symmetry::check_commutation(sites, n, r)?);
                out.push(symmetry::check_sn_explicit(
                    sites,
                    n,
                    tau,
                    ShiftRule::Representation,
                )?);
                if config.printed_variants {
                    out.push(symmetry::check_sn_explicit(sites, n, tau, ShiftRule::Unit)?);
                }
            }
        }
        out.push(run_paper_example_l1(config.example_n_max, tau, &r.gamma)?);
        for sites in 3..=config.l_max {
            out.push(run_paper_example_n1(sites, r)?);
        }
    }
    if config.negative_controls {
        for r in rates {
            for (label, broken) in negative_control_rates(r) {
                for sites in 1..=config.l_max.min(3) {
                    out.push(negative_control(check_duality(sites, 1, &broken)?, label));
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    type L = LaurentScalar;

    fn sym(c: (i64, i64), g: (i64, i64)) -> RateParameters<L> {
        RateParameters::exact_regime(rational(c.0, c.1), rational(g.0, g.1)).unwrap()
    }

    #[test]
    fn duality_small_exact() {
        for sites in 1..=3 {
            for n in 1..=2 {
                let r = check_duality(sites, n, &sym((1, 1), (1, 1))).unwrap();
                assert!(r.passed, "{r:?}");
            }
        }
        assert!(check_duality(3, 2, &sym((3, 2), (1, 3))).unwrap().passed);
    }

    #[test]
    fn duality_numeric() {
        let r = RateParameters::numeric(2.0, 0.5, 4.0, 0.0, 1.0, 0.0).unwrap();
        let c = check_duality(3, 1, &r).unwrap();
        assert!(c.passed, "{c:?}");
    }

    #[test]
    fn strict_rejects_outside_regime() {
        let r = RateParameters::numeric(2.0, 0.5, 1.0, 0.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            check_duality_strict(3, 1, &r),
            Err(Error::RegimeViolation(_))
        ));
        let c = check_duality(3, 1, &r).unwrap();
        assert!(!c.passed);
        assert_eq!(c.params["in_regime"], false);
    }

    #[test]
    fn negative_controls_fail() {
        for (label, broken) in negative_control_rates(&sym((1, 1), (1, 1))) {
            let failed = (1..=3).any(|l| !check_duality(l, 1, &broken).unwrap().passed);
            assert!(failed, "control {label} did not fail");
        }
    }

    #[test]
    fn detailed_balance() {
        for sites in 1..=3 {
            let c = check_detailed_balance(sites, &sym((1, 1), (2, 1))).unwrap();
            assert!(c.passed, "{c:?}");
        }
        let broken = sym((1, 1), (1, 1)).with_alpha(L::tau());
        let c = check_detailed_balance(2, &broken).unwrap();
        assert!(!c.passed);
        assert_eq!(c.derived["agree"], true);
        let open = sym((1, 1), (1, 1)).with_beta(L::one());
        assert!(check_detailed_balance(2, &open).is_err());
    }

    #[test]
    fn detailed_balance_single_site_pair() {
        // π(∅)·rate(∅ → 1) = π(1)·rate(1 → ∅): α = τ²γ.
        let r = sym((1, 1), (1, 1));
        let g = build_generator(1, &r).unwrap();
        assert_eq!(g.get(0, 1), -r.gamma.clone());
        assert_eq!(g.get(1, 0), -r.alpha.clone());
        assert_eq!(&r.alpha, &(&r.gamma * &r.tau().pow(2)));
    }

    #[test]
    fn corollary() {
        let c = check_corollary(2, 2, &sym((1, 1), (1, 1))).unwrap();
        assert!(c.passed);
        assert_eq!(c.derived["pi_conjugate_is_reflected"], true);
        assert_eq!(c.derived["pi_conjugate_is_transpose"], false);
    }

    #[test]
    fn example_l1() {
        let c = run_paper_example_l1(6, &Tau::symbolic(), &L::one()).unwrap();
        assert!(c.passed, "{c:?}");
        let values = c.derived["display_values"].as_array().unwrap();
        assert_eq!(values[0], "-1");
        assert_eq!(values[1], "1");
        let half = run_paper_example_l1(3, &Tau::symbolic(), &L::from(rational(1, 2))).unwrap();
        assert!(half.passed);
    }

    #[test]
    fn example_n1() {
        for sites in 3..=5 {
            let c = run_paper_example_n1(sites, &sym((1, 1), (1, 1))).unwrap();
            assert!(c.passed, "{c:?}");
        }
        let one = RateParameters::numeric(1.0, 1.0, 1.0, 0.0, 1.0, 0.0).unwrap();
        assert!(run_paper_example_n1(3, &one).unwrap().passed);
        assert!(run_paper_example_n1(2, &one).is_err());
    }

    #[test]
    fn semigroup() {
        let r = RateParameters::numeric(2.0, 0.5, 4.0, 0.0, 1.0, 0.0).unwrap();
        let zero = semigroup_check(3, 1, &r, 0.0).unwrap();
        assert_eq!(zero.residual, Residual::Numeric(0.0));
        for t in [0.5, 1.0] {
            assert!(semigroup_check(3, 1, &r, t).unwrap().passed);
        }
        assert!(semigroup_check(2, 2, &r, 1.0).unwrap().passed);
        assert!(semigroup_check(2, 1, &r, -1.0).is_err());
    }

    #[test]
    fn empty_grid() {
        assert!(run_all(&SuiteConfig::empty()).unwrap().is_empty());
    }

    #[test]
    fn small_suite_is_deterministic() {
        let config = SuiteConfig {
            l_max: 2,
            n_max: 1,
            ..SuiteConfig::default()
        };
        let a = run_all(&config).unwrap();
        let b = run_all(&config).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert!(a.iter().all(|c| c.passed));
        let printed = run_all(&SuiteConfig {
            printed_variants: true,
            negative_controls: true,
            ..config
        })
        .unwrap();
        let failing: Vec<_> = printed
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        assert_eq!(failing, ["symmetry.shift_relation.printed"]);
        assert!(printed.iter().any(|c| c.name == "negative_control.alpha"));
    }
}
