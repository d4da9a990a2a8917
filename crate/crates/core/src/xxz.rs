//! The XXZ side of the correspondence: the conjugated generator `V𝓛V⁻¹`,
//! the open-boundary Hamiltonian `2𝓗` rewritten in τ, and the boundary
//! parameter `ζ`.
//!
//! The complex variables are eliminated through `τ = e^{−iμ}`:
//! `cosh iμ = (τ+τ⁻¹)/2`, `sinh iμ = −(τ−τ⁻¹)/2`, and with `m = −1`,
//! `sinh(imμ) = −(τ^m − τ^{−m})/2`. The boundary prefactor
//! `sinh iμ / (4 sinh iμ(m/2+ζ) cosh iμ(m/2−ζ))` equals `−A₁⁺/2` once `ζ`
//! satisfies its defining relation, so the Hamiltonian is parametrized by
//! `A₁⁺` and `ζ` only has to be shown to exist ([`solve_zeta_parameter`]).

use crate::asep::{build_generator, build_v, RateParameters};
use crate::check::{describe_scalar, CheckResult, SCALAR_TOL};
use crate::error::{Error, Result};
use crate::operator::{Operator, SiteMatrix};
use crate::scalar::{rational, Residual, Scalar, Tau};

/// Boundary couplings of the conjugated generator.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryParameters<S> {
    /// `A₁⁺ = (γτ + ατ⁻¹)/2`, the σ₁ˣ coupling.
    pub a1_plus: S,
    /// `A₁⁻ = (γτ − ατ⁻¹)/2`, the iσ₁ʸ coupling; zero iff `α/γ = p/q`.
    pub a1_minus: S,
    /// `B₁ = (γ − α)/2 + √(pq)(τ − τ⁻¹)/4`.
    pub b1: S,
    pub al_plus: S,
    pub al_minus: S,
    /// `B_L = (β − δ)/2 − √(pq)(τ − τ⁻¹)/4`.
    pub bl: S,
    /// Roots `w = τ^{2ζ}` of the ζ relation, numeric mode only.
    pub zeta_roots: Option<(f64, f64)>,
}

fn half<S: Scalar>() -> S {
    S::from_rational(&rational(1, 2))
}

fn quarter<S: Scalar>() -> S {
    S::from_rational(&rational(1, 4))
}

impl<S: Scalar> BoundaryParameters<S> {
    pub fn new(sites: usize, rates: &RateParameters<S>) -> Self {
        let tau = rates.tau();
        let gamma_tau = rates.gamma.mul_ref(tau.get());
        let alpha_tau_inv = rates.alpha.mul_ref(tau.inv());
        let tau_l = tau.pow(sites as i64);
        let tau_neg_l = tau.pow(-(sites as i64));
        let beta_term = rates.beta.mul_ref(&tau_l);
        let delta_term = rates.delta.mul_ref(&tau_neg_l);
        let edge = rates
            .scale()
            .mul_ref(&tau.minus_inverse())
            .mul_ref(&quarter());
        Self {
            a1_plus: gamma_tau.add_ref(&alpha_tau_inv).mul_ref(&half()),
            a1_minus: gamma_tau.sub_ref(&alpha_tau_inv).mul_ref(&half()),
            b1: rates
                .gamma
                .sub_ref(&rates.alpha)
                .mul_ref(&half())
                .add_ref(&edge),
            al_plus: beta_term.add_ref(&delta_term).mul_ref(&half()),
            al_minus: beta_term.sub_ref(&delta_term).mul_ref(&half()),
            bl: rates
                .beta
                .sub_ref(&rates.delta)
                .mul_ref(&half())
                .sub_ref(&edge),
            zeta_roots: None,
        }
    }
}

impl BoundaryParameters<f64> {
    /// Attaches the ζ roots; fails when `A₁⁺ = 0`.
    pub fn with_zeta(mut self, tau: f64) -> Result<Self> {
        let roots = solve_zeta_from_coupling(self.a1_plus, tau)?;
        self.zeta_roots = Some((roots.w_plus, roots.w_minus));
        Ok(self)
    }
}

fn site<S: Scalar>(sites: usize, j: usize, m: &SiteMatrix<S>) -> Operator<S> {
    Operator::embed_site(sites, j, m).expect("site index in range")
}

fn bond<S: Scalar>(sites: usize, j: usize, a: &SiteMatrix<S>, b: &SiteMatrix<S>) -> Operator<S> {
    let factors: Vec<_> = (1..=sites)
        .map(|k| match k {
            _ if k == j => a.clone(),
            _ if k == j + 1 => b.clone(),
            _ => SiteMatrix::identity(),
        })
        .collect();
    Operator::embed_chain(&factors).expect("bond in range")
}

/// `σˣσˣ + σʸσʸ = 2(σ⁺⊗σ⁻ + σ⁻⊗σ⁺)` on bond `(j, j+1)`.
fn hopping<S: Scalar>(sites: usize, j: usize) -> Operator<S> {
    let pm = bond(
        sites,
        j,
        &SiteMatrix::sigma_plus(),
        &SiteMatrix::sigma_minus(),
    );
    let mp = bond(
        sites,
        j,
        &SiteMatrix::sigma_minus(),
        &SiteMatrix::sigma_plus(),
    );
    pm.add(&mp).expect("same dim").scale(&S::from_i64(2))
}

fn zz<S: Scalar>(sites: usize, j: usize) -> Operator<S> {
    bond(sites, j, &SiteMatrix::sigma_z(), &SiteMatrix::sigma_z())
}

/// `iσʸ = σ⁺ − σ⁻`, so the real operator `−A⁻·iσʸ` is built without complex
/// arithmetic.
fn i_sigma_y<S: Scalar>() -> SiteMatrix<S> {
    SiteMatrix::sigma_plus().sub(&SiteMatrix::sigma_minus())
}

struct Accumulator<S> {
    op: Operator<S>,
}

impl<S: Scalar> Accumulator<S> {
    fn new(dim: usize) -> Self {
        Self {
            op: Operator::zero(dim),
        }
    }

    fn add(&mut self, coeff: &S, term: &Operator<S>) {
        self.op = self.op.add(&term.scale(coeff)).expect("same dim");
    }
}

/// `V𝓛V⁻¹` computed by conjugation and, independently, from the XXZ form
/// with boundary couplings. Disagreement is an internal-consistency error.
pub fn build_conjugated_generator<S: Scalar>(
    sites: usize,
    rates: &RateParameters<S>,
) -> Result<Operator<S>> {
    let by_conjugation = conjugate_generator(sites, rates)?;
    let direct = xxz_form(sites, rates)?;
    let diff = by_conjugation.sub(&direct)?;
    let consistent = if S::EXACT {
        diff.is_zero()
    } else {
        diff.residual().passes(1e-10)
    };
    if !consistent {
        return Err(Error::InternalConsistency(format!(
            "V𝓛V⁻¹ by conjugation and by the XXZ form differ (L = {sites}, residual {})",
            diff.residual()
        )));
    }
    Ok(by_conjugation)
}

/// `V𝓛V⁻¹` by matrix conjugation.
pub fn conjugate_generator<S: Scalar>(
    sites: usize,
    rates: &RateParameters<S>,
) -> Result<Operator<S>> {
    let g = build_generator(sites, rates)?;
    let v = build_v(sites, 1, rates.tau())?;
    let v_inv = build_v(sites, -1, rates.tau())?;
    v.mul(&g)?.mul(&v_inv)
}

/// `V𝓛V⁻¹` assembled term by term from the XXZ expression.
pub fn xxz_form<S: Scalar>(sites: usize, rates: &RateParameters<S>) -> Result<Operator<S>> {
    let dim = 1usize << sites;
    let tau = rates.tau();
    let s = rates.scale();
    let bp = BoundaryParameters::new(sites, rates);
    let cosh_term = tau.plus_inverse().mul_ref(&half());
    let mut acc = Accumulator::new(dim);
    // −½√(pq) Σ [σˣσˣ + σʸσʸ + cosh·σᶻσᶻ − cosh]
    let bulk = s.mul_ref(&half()).neg_ref();
    for j in 1..sites {
        acc.add(&bulk, &hopping(sites, j));
        acc.add(&bulk.mul_ref(&cosh_term), &zz(sites, j));
        acc.add(
            &bulk.mul_ref(&cosh_term).neg_ref(),
            &Operator::identity(dim),
        );
    }
    let first = [
        (bp.a1_plus.neg_ref(), SiteMatrix::sigma_x()),
        (bp.a1_minus.neg_ref(), i_sigma_y()),
        (bp.b1.neg_ref(), SiteMatrix::sigma_z()),
    ];
    let last = [
        (bp.al_plus.neg_ref(), SiteMatrix::sigma_x()),
        (bp.al_minus.neg_ref(), i_sigma_y()),
        (bp.bl.neg_ref(), SiteMatrix::sigma_z()),
    ];
    for (c, m) in &first {
        acc.add(c, &site(sites, 1, m));
    }
    for (c, m) in &last {
        acc.add(c, &site(sites, sites, m));
    }
    let total = rates
        .alpha
        .add_ref(&rates.beta)
        .add_ref(&rates.gamma)
        .add_ref(&rates.delta)
        .mul_ref(&half());
    acc.add(&total, &Operator::identity(dim));
    Ok(acc.op)
}

/// Hyperbolic functions of the spectral parameters after `τ = e^{−iμ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperbolicSubstitution<S> {
    /// `cosh iμ = (τ + τ⁻¹)/2`
    pub cosh_imu: S,
    /// `sinh iμ = −(τ − τ⁻¹)/2`
    pub sinh_imu: S,
    /// `sinh(imμ)` at `m = −1`: `−(τ⁻¹ − τ)/2`
    pub sinh_immu: S,
}

impl<S: Scalar> HyperbolicSubstitution<S> {
    pub fn new(tau: &Tau<S>) -> Self {
        let m = -1;
        Self {
            cosh_imu: tau.plus_inverse().mul_ref(&half()),
            sinh_imu: tau.minus_inverse().mul_ref(&half()).neg_ref(),
            sinh_immu: tau.pow(m).sub_ref(&tau.pow(-m)).mul_ref(&half()).neg_ref(),
        }
    }
}

/// `2𝓗` in the duality regime with `√(pq) = 1`, additive constants dropped.
pub fn build_hamiltonian_2h<S: Scalar>(
    sites: usize,
    rates: &RateParameters<S>,
) -> Result<Operator<S>> {
    rates.require_duality_regime()?;
    require_unit_scale(rates)?;
    hamiltonian_2h(sites, rates.tau(), &rates.gamma)
}

fn require_unit_scale<S: Scalar>(rates: &RateParameters<S>) -> Result<()> {
    if rates.scale().approx_eq(&S::one()) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "the Hamiltonian normalization needs √(pq) = 1, got {}",
            rates.scale()
        )))
    }
}

/// `2𝓗` from τ and γ (with `α = γτ²` implied).
pub fn hamiltonian_2h<S: Scalar>(sites: usize, tau: &Tau<S>, gamma: &S) -> Result<Operator<S>> {
    if sites == 0 {
        return Err(Error::Domain("lattice size must be ≥ 1".into()));
    }
    let dim = 1usize << sites;
    let hyp = HyperbolicSubstitution::new(tau);
    let alpha = gamma.mul_ref(&tau.pow(2));
    let a1_plus = gamma
        .mul_ref(tau.get())
        .add_ref(&alpha.mul_ref(tau.inv()))
        .mul_ref(&half());
    // sinh iμ / (4 sinh iμ(m/2+ζ) cosh iμ(m/2−ζ)) once ζ solves its relation.
    let boundary_prefactor = a1_plus.mul_ref(&half()).neg_ref();
    let mut h = Accumulator::new(dim);
    let minus_quarter = quarter::<S>().neg_ref();
    for j in 1..sites {
        h.add(&minus_quarter, &hopping(sites, j));
        h.add(&minus_quarter.mul_ref(&hyp.cosh_imu), &zz(sites, j));
    }
    // −¼ sinh iμ (σ_Lᶻ − σ₁ᶻ)
    let edge = minus_quarter.mul_ref(&hyp.sinh_imu);
    h.add(&edge, &site(sites, sites, &SiteMatrix::sigma_z()));
    h.add(&edge.neg_ref(), &site(sites, 1, &SiteMatrix::sigma_z()));
    // prefactor · (−sinh(imμ) σ₁ᶻ + σ₁ˣ)
    h.add(
        &boundary_prefactor.mul_ref(&hyp.sinh_immu).neg_ref(),
        &site(sites, 1, &SiteMatrix::sigma_z()),
    );
    h.add(&boundary_prefactor, &site(sites, 1, &SiteMatrix::sigma_x()));
    Ok(h.op.scale(&S::from_i64(2)))
}

/// Checks `2𝓗 = V𝓛V⁻¹ + C·I` and extracts `C`.
///
/// `𝓗` is built from τ and γ; `V𝓛V⁻¹` from the given rates, so breaking
/// `α = γτ²` in `rates` makes the check fail through the σ₁ʸ term.
pub fn check_prop1<S: Scalar>(sites: usize, rates: &RateParameters<S>) -> Result<CheckResult> {
    require_unit_scale(rates)?;
    let lhs = hamiltonian_2h(sites, rates.tau(), &rates.gamma)?;
    let rhs = build_conjugated_generator(sites, rates)?;
    let test = lhs.sub(&rhs)?.identity_multiple();
    let bp = BoundaryParameters::new(sites, rates);
    let residual = test
        .offdiag_residual
        .clone()
        .worst(test.diagonal_spread.clone());
    let tol = crate::check::ALGEBRAIC_TOL;
    let mut out = CheckResult::for_ring::<S>("prop1.hamiltonian_conjugation")
        .param("L", sites)
        .tau_param(rates.tau())
        .param("gamma", describe_scalar(&rates.gamma))
        .judged(residual, tol)
        .require(test.is_multiple)
        .derive("a1_minus", describe_scalar(&bp.a1_minus));
    if let Some(c) = &test.constant {
        out = out.derive("C", describe_scalar(c));
    }
    Ok(out)
}

/// Closed form of the constant in `2𝓗 = V𝓛V⁻¹ + C·I` (with `√(pq) = 1`):
/// `C = −(L−1)(τ+τ⁻¹)/4 − γ(1+τ²)/2`. Derived by hand from the diagonal of
/// both sides; used as an independent cross-check.
pub fn prop1_constant<S: Scalar>(sites: usize, tau: &Tau<S>, gamma: &S) -> S {
    let bonds = S::from_i64(sites as i64 - 1);
    bonds
        .mul_ref(&tau.plus_inverse())
        .mul_ref(&quarter())
        .add_ref(
            &gamma
                .mul_ref(&S::one().add_ref(&tau.pow(2)))
                .mul_ref(&half()),
        )
        .neg_ref()
}

/// Both roots `w = τ^{2ζ}` of the ζ relation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZetaRoots {
    pub w_plus: f64,
    pub w_minus: f64,
    /// Substitution residuals of the defining relation.
    pub residual_plus: f64,
    pub residual_minus: f64,
    /// `ζ = ln w₊ / (2 ln τ)` when real and defined.
    pub zeta: Option<f64>,
}

/// Solves `(γτ + ατ⁻¹)/2 = (τ − τ⁻¹)/(τ + w⁻¹ − w − τ⁻¹)` for `w = τ^{2ζ}`.
pub fn solve_zeta_parameter(gamma: f64, alpha: f64, tau: f64) -> Result<ZetaRoots> {
    if tau.is_nan() || tau <= 0.0 {
        return Err(Error::Domain(format!("τ must be positive, got {tau}")));
    }
    let a1_plus = 0.5 * (gamma * tau + alpha / tau);
    solve_zeta_from_coupling(a1_plus, tau)
}

fn solve_zeta_from_coupling(a1_plus: f64, tau: f64) -> Result<ZetaRoots> {
    if a1_plus == 0.0 || !a1_plus.is_finite() {
        return Err(Error::Domain(
            "A₁⁺ = 0: the ζ relation has no solution".into(),
        ));
    }
    let d = tau - tau.recip();
    // w² − s·w − 1 = 0
    let s = d - d / a1_plus;
    let disc = (s * s + 4.0).sqrt();
    // Stable pair: the root with |w| ≥ 1 by the formula, the other from w₊w₋ = −1.
    let big = if s >= 0.0 {
        0.5 * (s + disc)
    } else {
        0.5 * (s - disc)
    };
    let small = -1.0 / big;
    let (w_plus, w_minus) = if big > 0.0 {
        (big, small)
    } else {
        (small, big)
    };
    let relation = |w: f64| {
        let denom = tau + w.recip() - w - tau.recip();
        // Cross-multiplied to stay finite at τ = 1.
        a1_plus * denom - d
    };
    let zeta = (w_plus > 0.0 && (tau - 1.0).abs() > 1e-15).then(|| w_plus.ln() / (2.0 * tau.ln()));
    Ok(ZetaRoots {
        w_plus,
        w_minus,
        residual_plus: relation(w_plus).abs(),
        residual_minus: relation(w_minus).abs(),
        zeta,
    })
}

/// Scalar identities behind the coefficient matching:
/// (i) `sinh(imμ)·(γτ + ατ⁻¹) = −(γ − α)`,
/// (ii) the σ₁ᶻ coefficient of `2𝓗` equals `−B₁`,
/// (iii) `A₁⁻ = 0`,
/// (iv) `sinh(imμ) = −(1 − τ²)/(2τ)`,
/// all with `α = γτ²` and `√(pq) = 1`.
pub fn verify_proof_scalar_identities<S: Scalar>(tau: &Tau<S>, gamma: &S) -> CheckResult {
    let hyp = HyperbolicSubstitution::new(tau);
    let alpha = gamma.mul_ref(&tau.pow(2));
    let gamma_tau = gamma.mul_ref(tau.get());
    let alpha_tau_inv = alpha.mul_ref(tau.inv());
    let a1_plus = gamma_tau.add_ref(&alpha_tau_inv).mul_ref(&half());
    let a1_minus = gamma_tau.sub_ref(&alpha_tau_inv).mul_ref(&half());
    let b1 = gamma
        .sub_ref(&alpha)
        .mul_ref(&half())
        .add_ref(&tau.minus_inverse().mul_ref(&quarter()));

    let identity_i = hyp
        .sinh_immu
        .mul_ref(&gamma_tau.add_ref(&alpha_tau_inv))
        .add_ref(&gamma.sub_ref(&alpha));
    // σ₁ᶻ coefficient of 2𝓗: ½ sinh iμ − 2·prefactor·sinh(imμ), prefactor = −A₁⁺/2.
    let sigma_z = hyp
        .sinh_imu
        .mul_ref(&half())
        .add_ref(&a1_plus.mul_ref(&hyp.sinh_immu));
    let identity_ii = sigma_z.add_ref(&b1);
    let identity_iii = a1_minus;
    // −(1 − τ²)/(2τ), multiplied through by 2τ.
    let identity_iv = hyp
        .sinh_immu
        .mul_ref(&S::from_i64(2))
        .mul_ref(tau.get())
        .add_ref(&S::one().sub_ref(&tau.pow(2)));

    let parts = [&identity_i, &identity_ii, &identity_iii, &identity_iv];
    let residual = S::residual(parts.iter().copied());
    let mut out = CheckResult::for_ring::<S>("prop1.scalar_identities")
        .tau_param(tau)
        .param("gamma", describe_scalar(gamma))
        .judged(residual, SCALAR_TOL);
    for (name, v) in [
        "i_sinh_times_a1",
        "ii_sigma_z_matches_b1",
        "iii_a1_minus",
        "iv_sinh_chain",
    ]
    .iter()
    .zip(parts)
    {
        out = out.derive(name, describe_scalar(v));
    }
    out
}

/// ζ existence as a check record (numeric).
pub fn check_zeta(gamma: f64, alpha: f64, tau: f64) -> Result<CheckResult> {
    let roots = solve_zeta_parameter(gamma, alpha, tau)?;
    let product = roots.w_plus * roots.w_minus + 1.0;
    let residual = Residual::Numeric(
        roots
            .residual_plus
            .max(roots.residual_minus)
            .max(product.abs()),
    );
    let mut out = CheckResult::new("prop1.zeta_relation", crate::asep::Mode::Numeric)
        .param("tau", tau)
        .param("gamma", gamma)
        .param("alpha", alpha)
        .judged(residual, SCALAR_TOL)
        .derive("w_plus", roots.w_plus)
        .derive("w_minus", roots.w_minus);
    if let Some(z) = roots.zeta {
        out = out.derive("zeta", z);
    }
    Ok(out)
}
