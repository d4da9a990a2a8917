//! Symmetry operators `S_N` and duality functions `D_N` built from the
//! two-dimensional evaluation image of `𝒬¹`.
//!
//! Representation: `k² = diag(τ⁻¹, τ)` and
//! `Q(l) = [[τ⁻¹ − 1, τ^{−l}], [τ^l, τ − 1]]` in the (hole, particle) basis,
//! i.e. `𝒬¹(τ^{l−1/2})` with `k₁ = diag(τ^{−1/2}, τ^{1/2})`, `e₁ = σ⁺`,
//! `f₁ = σ⁻` and `x₁ = 1`.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::asep::build_v;
use crate::check::{describe_scalar, CheckResult};
use crate::error::{Error, Result};
use crate::operator::{Operator, SiteMatrix};
use crate::scalar::{Residual, Scalar, Tau};

/// `k² = diag(τ⁻¹, τ)`: τ on particles, τ⁻¹ on holes.
pub fn k_squared<S: Scalar>(tau: &Tau<S>) -> SiteMatrix<S> {
    SiteMatrix::diag(tau.inv().clone(), tau.get().clone())
}

/// `Q(l) = ρ₀(𝒬¹(τ^{l−1/2}))`.
pub fn q1_site_matrix<S: Scalar>(l: i64, tau: &Tau<S>) -> SiteMatrix<S> {
    SiteMatrix::new([
        [tau.inv().sub_ref(&S::one()), tau.pow(-l)],
        [tau.pow(l), tau.get().sub_ref(&S::one())],
    ])
}

/// `[[τ⁻¹ − 1, 1], [1, τ − 1]]`, written out independently of
/// [`q1_site_matrix`].
pub fn matrix_m<S: Scalar>(tau: &Tau<S>) -> SiteMatrix<S> {
    SiteMatrix::new([
        [tau.inv().sub_ref(&S::one()), S::one()],
        [S::one(), tau.get().sub_ref(&S::one())],
    ])
}

/// How `l` moves when `k²` is commuted through `Q(l)`:
/// `Q(l)·k² = k²·Q(l + shift)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ShiftRule {
    /// `+1`, the relation `𝒬¹(sτ⁻¹)k₁² = k₁²𝒬¹(s)` as printed.
    Unit,
    /// `−2`, what the 2×2 matrices actually satisfy.
    Representation,
}

impl ShiftRule {
    pub fn step(self) -> i64 {
        match self {
            ShiftRule::Unit => 1,
            ShiftRule::Representation => -2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ShiftRule::Unit => "printed",
            ShiftRule::Representation => "representation",
        }
    }
}

/// Where the `k²` factors of each coproduct summand sit relative to `Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Orientation {
    /// `k²` on the sites `x+1..L` (toward the closed boundary). Equals the
    /// Kronecker-product reading of the coproduct under the site-1-least-
    /// significant basis order; the duality holds in this orientation.
    #[default]
    TowardClosedEnd,
    /// `k²` on the sites `1..x−1`.
    TowardOpenEnd,
}

impl Orientation {
    fn k_squared_at(self, site: usize, q_site: usize) -> bool {
        match self {
            Orientation::TowardClosedEnd => site > q_site,
            Orientation::TowardOpenEnd => site < q_site,
        }
    }
}

/// Checks `Q(l)·k² = k²·Q(l + shift)` for every `l` in the range.
pub fn verify_shift_relation<S: Scalar>(
    l_range: std::ops::RangeInclusive<i64>,
    tau: &Tau<S>,
    rule: ShiftRule,
) -> CheckResult {
    let k2 = k_squared(tau);
    let mut worst = Residual::exact_zero();
    let mut failing = Vec::new();
    let (lo, hi) = (*l_range.start(), *l_range.end());
    if !S::EXACT {
        worst = Residual::Numeric(0.0);
    }
    for l in l_range {
        let lhs = q1_site_matrix(l, tau).mul(&k2);
        let rhs = k2.mul(&q1_site_matrix(l + rule.step(), tau));
        let r = lhs.residual(&rhs);
        if !r.passes(crate::check::ALGEBRAIC_TOL) {
            failing.push(l);
        }
        worst = worst.worst(r);
    }
    CheckResult::for_ring::<S>(format!("symmetry.shift_relation.{}", rule.label()))
        .param("l_min", lo)
        .param("l_max", hi)
        .param("shift", rule.step())
        .tau_param(tau)
        .judged(worst, crate::check::ALGEBRAIC_TOL)
        .derive("failing_l", failing)
}

/// `S₁ = Σ_x` (chain with `Q(0)` at site `x`, `k²` on the sites selected by
/// the orientation, identity elsewhere).
pub fn build_s1<S: Scalar>(
    sites: usize,
    tau: &Tau<S>,
    orientation: Orientation,
) -> Result<Operator<S>> {
    check_sites(sites)?;
    let q = q1_site_matrix(0, tau);
    let k2 = k_squared(tau);
    let mut total = Operator::zero(1 << sites);
    for x in 1..=sites {
        let factors: Vec<_> = (1..=sites)
            .map(|j| {
                if j == x {
                    q.clone()
                } else if orientation.k_squared_at(j, x) {
                    k2.clone()
                } else {
                    SiteMatrix::identity()
                }
            })
            .collect();
        total = total.add(&Operator::embed_chain(&factors)?)?;
    }
    Ok(total)
}

/// `S_N = S₁^N` by repeated multiplication.
pub fn build_sn<S: Scalar>(
    sites: usize,
    n: u32,
    tau: &Tau<S>,
    orientation: Orientation,
) -> Result<Operator<S>> {
    if n == 0 {
        return Err(Error::Domain("N must be ≥ 1".into()));
    }
    Ok(build_s1(sites, tau, orientation)?.pow(n))
}

/// `Q^{a,b} = Σ_{l₁+…+l_a ≤ b} (k²)^b Q(c·(l₁+…+l_a)) Q(c·(l₂+…+l_a)) ⋯ Q(c·l_a)`
/// with `c` the shift step of `rule`.
pub fn build_q_ab<S: Scalar>(
    a: i64,
    b: i64,
    tau: &Tau<S>,
    rule: ShiftRule,
) -> Result<SiteMatrix<S>> {
    if a < 0 || b < 0 {
        return Err(Error::Domain(format!(
            "Q^{{a,b}} needs a, b ≥ 0, got ({a}, {b})"
        )));
    }
    let (a, b) = (a as usize, b as u32);
    let k2b = k_squared(tau).pow(b);
    if a == 0 {
        return Ok(k2b);
    }
    let mut sum = SiteMatrix::zero();
    let mut tuple = vec![0u32; a];
    loop {
        // Suffix sums: factor i carries l_i + … + l_a.
        let mut product = SiteMatrix::identity();
        let mut suffix = vec![0i64; a + 1];
        for i in (0..a).rev() {
            suffix[i] = suffix[i + 1] + tuple[i] as i64;
        }
        for s in suffix.iter().take(a) {
            product = product.mul(&q1_site_matrix(rule.step() * s, tau));
        }
        sum = sum.add(&product);
        if !next_bounded_tuple(&mut tuple, b) {
            break;
        }
    }
    Ok(k2b.mul(&sum))
}

/// Advances to the next nonnegative tuple with sum ≤ `bound` (lexicographic
/// from the right); false when exhausted.
fn next_bounded_tuple(tuple: &mut [u32], bound: u32) -> bool {
    for i in (0..tuple.len()).rev() {
        tuple[i] += 1;
        if tuple.iter().sum::<u32>() <= bound {
            return true;
        }
        tuple[i] = 0;
    }
    false
}

/// Weak compositions of `n` into `parts` parts, in lexicographic order.
pub fn compositions(n: u32, parts: usize) -> Vec<Vec<u32>> {
    fn rec(n: u32, parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            prefix.push(n);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=n {
            prefix.push(first);
            rec(n - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        rec(n, parts, &mut Vec::with_capacity(parts), &mut out);
    }
    out
}

/// `S_N` from the explicit formula: a sum over compositions `m` of `N`
/// of Kronecker chains whose factor at site `j` is `Q^{m_j, b_j}`, where
/// `b_j` counts the `Q` events on the side that contributes `k²` to site `j`.
/// Terms are built in parallel and summed in composition order.
pub fn build_sn_explicit<S: Scalar>(
    sites: usize,
    n: u32,
    tau: &Tau<S>,
    rule: ShiftRule,
    orientation: Orientation,
) -> Result<Operator<S>> {
    check_sites(sites)?;
    if n == 0 {
        return Err(Error::Domain("N must be ≥ 1".into()));
    }
    let comps = compositions(n, sites);
    let mut cache = HashMap::new();
    for m in &comps {
        for j in 0..sites {
            let key = (m[j], k_count(m, j, orientation));
            if let std::collections::hash_map::Entry::Vacant(e) = cache.entry(key) {
                e.insert(build_q_ab(key.0 as i64, key.1 as i64, tau, rule)?);
            }
        }
    }
    let terms: Vec<Operator<S>> = comps
        .par_iter()
        .map(|m| {
            let factors: Vec<_> = (0..sites)
                .map(|j| cache[&(m[j], k_count(m, j, orientation))].clone())
                .collect();
            Operator::embed_chain(&factors)
        })
        .collect::<Result<_>>()?;
    let mut total = Operator::zero(1 << sites);
    for t in &terms {
        total = total.add(t)?;
    }
    Ok(total)
}

/// Number of `k²` factors reaching site `j` (0-based) for composition `m`.
fn k_count(m: &[u32], j: usize, orientation: Orientation) -> u32 {
    match orientation {
        Orientation::TowardClosedEnd => m[..j].iter().sum(),
        Orientation::TowardOpenEnd => m[j + 1..].iter().sum(),
    }
}

/// `D_N = V S_N V`.
pub fn build_dn<S: Scalar>(sites: usize, n: u32, tau: &Tau<S>) -> Result<Operator<S>> {
    let v = build_v(sites, 1, tau)?;
    let s = build_sn(sites, n, tau, Orientation::default())?;
    v.mul(&s)?.mul(&v)
}

/// `Q(0)` reproduces `M`.
pub fn check_matrix_m<S: Scalar>(tau: &Tau<S>) -> CheckResult {
    let r = q1_site_matrix(0, tau).residual(&matrix_m(tau));
    CheckResult::for_ring::<S>("symmetry.eq_m")
        .tau_param(tau)
        .judged(r, crate::check::ALGEBRAIC_TOL)
}

/// The 4×4 content of `Δ(𝒬¹) = k₁² ⊗ 𝒬¹ + 𝒬¹ ⊗ 1`: the two-site `S₁`
/// equals the Kronecker display (first factor = site 2).
pub fn verify_coproduct_identity<S: Scalar>(tau: &Tau<S>) -> Result<CheckResult> {
    let q = q1_site_matrix(0, tau).to_operator();
    let k2 = k_squared(tau).to_operator();
    let id = Operator::identity(2);
    let display = k2.kron(&q).add(&q.kron(&id))?;
    let s1 = build_s1(2, tau, Orientation::TowardClosedEnd)?;
    let residual = s1.residual_against(&display)?;
    let open_end = build_s1(2, tau, Orientation::TowardOpenEnd)?;
    let open_matches = open_end
        .sub(&display)?
        .residual()
        .passes(crate::check::ALGEBRAIC_TOL);
    Ok(CheckResult::for_ring::<S>("symmetry.coproduct")
        .param("L", 2)
        .tau_param(tau)
        .judged(residual, crate::check::ALGEBRAIC_TOL)
        .derive("site_first_reading_matches", open_matches))
}

/// `build_sn_explicit` against the matrix power.
pub fn check_sn_explicit<S: Scalar>(
    sites: usize,
    n: u32,
    tau: &Tau<S>,
    rule: ShiftRule,
) -> Result<CheckResult> {
    let explicit = build_sn_explicit(sites, n, tau, rule, Orientation::default())?;
    let power = build_sn(sites, n, tau, Orientation::default())?;
    let residual = explicit.residual_against(&power)?;
    Ok(
        CheckResult::for_ring::<S>(format!("symmetry.sn_explicit.{}", rule.label()))
            .param("L", sites)
            .param("N", n)
            .tau_param(tau)
            .judged(residual, crate::check::ALGEBRAIC_TOL),
    )
}

/// `[V𝓛V⁻¹, S_N] = 0` for the given rates.
pub fn check_commutation<S: Scalar>(
    sites: usize,
    n: u32,
    rates: &crate::asep::RateParameters<S>,
) -> Result<CheckResult> {
    let conj = crate::xxz::conjugate_generator(sites, rates)?;
    let s = build_sn(sites, n, rates.tau(), Orientation::default())?;
    let residual = conj.commutator(&s)?.residual();
    Ok(CheckResult::for_ring::<S>("symmetry.commutation")
        .param("L", sites)
        .param("N", n)
        .tau_param(rates.tau())
        .param("gamma", describe_scalar(&rates.gamma))
        .param("in_regime", rates.in_duality_regime())
        .judged(residual, crate::check::ALGEBRAIC_TOL))
}

/// One convention for `ρ₀(k₁)` and how it fares against the anchors.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ConventionReport {
    pub name: &'static str,
    /// `k₁` on (hole, particle).
    pub k1: [String; 2],
    /// `𝒬¹(τ^{−1/2})` assembled in this convention equals `M`.
    pub reproduces_m: bool,
    /// `𝒬¹(sτ⁻¹)k₁² = k₁²𝒬¹(s)` as printed.
    pub printed_shift_relation: bool,
    /// `(τ − τ⁻¹)[e₁, f₁] = k₁² − k₁⁻²`.
    pub commutator_relation: bool,
    /// `d` with `𝒬(l)k² = k²𝒬(l + d)` for all tested `l`, if any.
    pub induced_shift: Option<i64>,
}

/// Both sign conventions `k₁ = τ^{∓σᶻ/2}` against `M`, the printed shift
/// relation and the `[e₁, f₁]` relation. Needs `√τ`.
pub fn diagnose_representation_conventions<S: Scalar>(
    tau: &Tau<S>,
) -> Result<Vec<ConventionReport>> {
    let half = tau.pow_half(1)?;
    let half_inv = tau.pow_half(-1)?;
    let conventions = [
        ("k1=diag(tau^-1/2,tau^1/2)", half_inv.clone(), half.clone()),
        ("k1=diag(tau^1/2,tau^-1/2)", half, half_inv),
    ];
    let e = SiteMatrix::<S>::sigma_plus();
    let f = SiteMatrix::<S>::sigma_minus();
    let m = matrix_m(tau);
    let mut out = Vec::new();
    for (name, hole, particle) in conventions {
        let k1 = SiteMatrix::diag(hole.clone(), particle.clone());
        // The entries are τ^{±1/2}, mutual inverses.
        let k1_inv = SiteMatrix::diag(particle.clone(), hole.clone());
        let k2 = k1.mul(&k1);
        let k2_inv = k1_inv.mul(&k1_inv);
        // 𝒬¹(s) at s = τ^{l−1/2}: s⁻¹k₁e₁ + s k₁f₁ + k₁² − 1.
        let q = |l: i64| -> Result<SiteMatrix<S>> {
            let s = tau.pow_half(2 * l - 1)?;
            let s_inv = tau.pow_half(1 - 2 * l)?;
            Ok(k1
                .mul(&e)
                .scale(&s_inv)
                .add(&k1.mul(&f).scale(&s))
                .add(&k2)
                .sub(&SiteMatrix::identity()))
        };
        let approx = |a: &SiteMatrix<S>, b: &SiteMatrix<S>| {
            a.residual(b).passes(crate::check::ALGEBRAIC_TOL)
        };
        let reproduces_m = approx(&q(0)?, &m);
        let mut printed = true;
        for l in -3..=3 {
            printed &= approx(&q(l - 1)?.mul(&k2), &k2.mul(&q(l)?));
        }
        let comm = e.mul(&f).sub(&f.mul(&e)).scale(&tau.minus_inverse());
        let commutator_relation = approx(&comm, &k2.sub(&k2_inv));
        let mut induced_shift = None;
        for d in -4..=4 {
            let mut ok = true;
            for l in -3..=3 {
                ok &= approx(&q(l)?.mul(&k2), &k2.mul(&q(l + d)?));
            }
            if ok {
                induced_shift = Some(d);
                break;
            }
        }
        out.push(ConventionReport {
            name,
            k1: [hole.to_string(), particle.to_string()],
            reproduces_m,
            printed_shift_relation: printed,
            commutator_relation,
            induced_shift,
        });
    }
    Ok(out)
}

/// The conventions diagnosis as a check record. Passes when the
/// convention used throughout (`k² = diag(τ⁻¹, τ)`) reproduces `M`.
pub fn check_conventions<S: Scalar>(tau: &Tau<S>) -> Result<CheckResult> {
    let reports = diagnose_representation_conventions(tau)?;
    let ok = reports[0].reproduces_m;
    let residual = if S::EXACT {
        Residual::exact_zero()
    } else {
        Residual::Numeric(0.0)
    };
    Ok(CheckResult::for_ring::<S>("symmetry.conventions")
        .tau_param(tau)
        .judged(residual, 0.0)
        .require(ok)
        .derive(
            "conventions",
            serde_json::to_value(&reports).expect("reports serialize"),
        ))
}

fn check_sites(sites: usize) -> Result<()> {
    if sites == 0 || sites > crate::operator::MAX_SITES {
        return Err(Error::Domain(format!("lattice size out of range: {sites}")));
    }
    Ok(())
}
