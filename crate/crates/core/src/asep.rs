//! The open ASEP generator and the diagonal/permutation operators built
//! around it.
//!
//! Sign convention: the generator here has nonpositive off-diagonal entries
//! and zero column sums, i.e. it is the *negative* of the probabilistic rate
//! matrix. Column `b`, row `a` holds minus the rate of the jump `b → a`.

use num::Signed;

use crate::error::{Error, Result};
use crate::operator::{Configuration, Operator, SiteMatrix};
use crate::scalar::{LaurentScalar, Rational, Scalar, Tau};

/// Arithmetic mode of a verification run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Numeric,
}

/// Bulk and boundary rates of the open ASEP together with the derived
/// asymmetry `τ = √(p/q)` and scale `√(pq)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RateParameters<S> {
    /// Right jump rate.
    pub p: S,
    /// Left jump rate.
    pub q: S,
    /// Entry at site 1.
    pub alpha: S,
    /// Exit at site L.
    pub beta: S,
    /// Exit at site 1.
    pub gamma: S,
    /// Entry at site L.
    pub delta: S,
    scale: S,
    tau: Tau<S>,
}

impl RateParameters<LaurentScalar> {
    /// Symbolic rates in the duality regime: `p = c t²`, `q = c t⁻²`,
    /// `α = γ t⁴`, `β = δ = 0`, so `τ = t²` and `√(pq) = c`.
    pub fn exact_regime(c: Rational, gamma: Rational) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::Domain(format!("scale c must be positive, got {c}")));
        }
        if gamma.is_negative() {
            return Err(Error::Domain(format!("γ must be nonnegative, got {gamma}")));
        }
        let tau = Tau::symbolic();
        Ok(Self {
            p: LaurentScalar::tau_power(2, c.clone()),
            q: LaurentScalar::tau_power(-2, c.clone()),
            alpha: LaurentScalar::tau_power(4, gamma.clone()),
            beta: LaurentScalar::zero(),
            gamma: LaurentScalar::constant(gamma),
            delta: LaurentScalar::zero(),
            scale: LaurentScalar::constant(c),
            tau,
        })
    }

    /// Concrete rational rates. `p/q` must be the square of a rational so
    /// that τ stays in the exact ring.
    pub fn exact_concrete(
        p: Rational,
        q: Rational,
        alpha: Rational,
        beta: Rational,
        gamma: Rational,
        delta: Rational,
    ) -> Result<Self> {
        check_rates(&p, &q, [&alpha, &beta, &gamma, &delta])?;
        let tau = rational_sqrt(&(&p / &q)).ok_or_else(|| {
            Error::Domain(format!(
                "exact mode needs p/q to be a rational square (got {}); use numeric mode",
                &p / &q
            ))
        })?;
        // √(pq) = τ q.
        let scale = &tau * &q;
        Ok(Self {
            p: p.into(),
            q: q.into(),
            alpha: alpha.into(),
            beta: beta.into(),
            gamma: gamma.into(),
            delta: delta.into(),
            scale: scale.into(),
            tau: Tau::rational(tau)?,
        })
    }

    /// Replaces α (e.g. to break the regime in a negative control).
    pub fn with_alpha(mut self, alpha: LaurentScalar) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_beta(mut self, beta: LaurentScalar) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_delta(mut self, delta: LaurentScalar) -> Self {
        self.delta = delta;
        self
    }

    /// Substitutes `τ = tau0` into symbolic rates.
    pub fn evaluate(&self, tau0: f64) -> Result<RateParameters<f64>> {
        let t0 = tau0.sqrt();
        let e = |s: &LaurentScalar| s.eval(t0);
        RateParameters::numeric(
            e(&self.p)?,
            e(&self.q)?,
            e(&self.alpha)?,
            e(&self.beta)?,
            e(&self.gamma)?,
            e(&self.delta)?,
        )
    }
}

impl RateParameters<f64> {
    pub fn numeric(p: f64, q: f64, alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let all = [p, q, alpha, beta, gamma, delta];
        if all.iter().any(|r| !r.is_finite()) {
            return Err(Error::Domain(format!("rates must be finite, got {all:?}")));
        }
        if !(p > 0.0 && q > 0.0) {
            return Err(Error::Domain(format!(
                "p and q must be positive, got p = {p}, q = {q}"
            )));
        }
        if [alpha, beta, gamma, delta].iter().any(|r| *r < 0.0) {
            return Err(Error::Domain(format!(
                "boundary rates must be nonnegative, got {all:?}"
            )));
        }
        Ok(Self {
            p,
            q,
            alpha,
            beta,
            gamma,
            delta,
            scale: (p * q).sqrt(),
            tau: Tau::numeric((p / q).sqrt())?,
        })
    }

    /// Duality-regime numeric rates: `α = γ p/q`, `β = δ = 0`.
    pub fn numeric_regime(p: f64, q: f64, gamma: f64) -> Result<Self> {
        Self::numeric(p, q, gamma * p / q, 0.0, gamma, 0.0)
    }
}

impl<S: Scalar> RateParameters<S> {
    /// Assembles rates from parts without validation; `scale` must be
    /// `√(pq)` and `tau` must be `√(p/q)`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        p: S,
        q: S,
        alpha: S,
        beta: S,
        gamma: S,
        delta: S,
        scale: S,
        tau: Tau<S>,
    ) -> Self {
        Self {
            p,
            q,
            alpha,
            beta,
            gamma,
            delta,
            scale,
            tau,
        }
    }

    pub fn tau(&self) -> &Tau<S> {
        &self.tau
    }

    /// `√(pq)`.
    pub fn scale(&self) -> &S {
        &self.scale
    }

    /// Hypotheses that fail for the duality regime (`αq = γp`, `β = δ = 0`).
    pub fn regime_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self
            .alpha
            .mul_ref(&self.q)
            .approx_eq(&self.gamma.mul_ref(&self.p))
        {
            out.push("α/γ ≠ p/q".to_string());
        }
        if !self.beta.is_zero() {
            out.push("β ≠ 0".to_string());
        }
        if !self.delta.is_zero() {
            out.push("δ ≠ 0".to_string());
        }
        out
    }

    pub fn in_duality_regime(&self) -> bool {
        self.regime_violations().is_empty()
    }

    pub fn require_duality_regime(&self) -> Result<()> {
        let v = self.regime_violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::RegimeViolation(v.join(", ")))
        }
    }

    /// Rates with the roles of the particle-hole mirror image: jumps
    /// reversed (`p ↔ q`) and entry/exit exchanged at both ends.
    pub fn reflected(&self) -> Self {
        Self {
            p: self.q.clone(),
            q: self.p.clone(),
            alpha: self.gamma.clone(),
            beta: self.delta.clone(),
            gamma: self.alpha.clone(),
            delta: self.beta.clone(),
            scale: self.scale.clone(),
            tau: Tau::clone(&self.tau),
        }
    }
}

fn check_rates(p: &Rational, q: &Rational, boundary: [&Rational; 4]) -> Result<()> {
    if !p.is_positive() || !q.is_positive() {
        return Err(Error::Domain(format!(
            "p and q must be positive, got p = {p}, q = {q}"
        )));
    }
    if boundary.iter().any(|r| r.is_negative()) {
        return Err(Error::Domain("boundary rates must be nonnegative".into()));
    }
    Ok(())
}

fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rational::new(n, d))
}

fn check_sites(sites: usize) -> Result<()> {
    if sites == 0 || sites > crate::operator::MAX_SITES {
        return Err(Error::Domain(format!(
            "lattice size must be ≥ 1, got {sites}"
        )));
    }
    Ok(())
}

/// The open ASEP generator `𝓛` on `sites` sites.
///
/// Bulk: right jumps at `p`, left jumps at `q`, with exclusion, over bonds
/// `(j, j+1)` for `j = 1..L−1`. Site 1: entry `α`, exit `γ`. Site L: entry
/// `δ`, exit `β`.
pub fn build_generator<S: Scalar>(sites: usize, rates: &RateParameters<S>) -> Result<Operator<S>> {
    check_sites(sites)?;
    let mut entries = Vec::new();
    let mut jump = |from: Configuration, to: Configuration, rate: &S| {
        if rate.is_zero() {
            return;
        }
        entries.push((to.index(), from.index(), rate.neg_ref()));
        entries.push((from.index(), from.index(), rate.clone()));
    };
    for eta in Configuration::all(sites) {
        for j in 1..sites {
            match (eta.occupied(j), eta.occupied(j + 1)) {
                (true, false) => jump(eta, eta.with_flipped(j).with_flipped(j + 1), &rates.p),
                (false, true) => jump(eta, eta.with_flipped(j).with_flipped(j + 1), &rates.q),
                _ => {}
            }
        }
        let first = if eta.occupied(1) {
            &rates.gamma
        } else {
            &rates.alpha
        };
        jump(eta, eta.with_flipped(1), first);
        let last = if eta.occupied(sites) {
            &rates.beta
        } else {
            &rates.delta
        };
        jump(eta, eta.with_flipped(sites), last);
    }
    Operator::from_entries(1 << sites, entries)
}

/// `𝓛̃`: the generator with left jumps at `p`, right jumps at `q`, exit at
/// site 1 at rate `α` and entry at rate `γ` (and β, δ exchanged at site L).
pub fn build_reflected_generator<S: Scalar>(
    sites: usize,
    rates: &RateParameters<S>,
) -> Result<Operator<S>> {
    build_generator(sites, &rates.reflected())
}

/// `V^k` with `V = τ^{−Σ_j j n_j}`.
pub fn build_v<S: Scalar>(sites: usize, power: i64, tau: &Tau<S>) -> Result<Operator<S>> {
    check_sites(sites)?;
    Ok(Operator::diagonal(
        Configuration::all(sites)
            .map(|eta| tau.pow(-power * eta.position_sum()))
            .collect(),
    ))
}

/// Particle-hole involution `Π = σˣ ⊗ … ⊗ σˣ`.
pub fn build_involution<S: Scalar>(sites: usize) -> Result<Operator<S>> {
    check_sites(sites)?;
    Operator::embed_chain(&vec![SiteMatrix::sigma_x(); sites])
}

/// Unnormalized reversible weights `π(η) = τ^{2 Σ_j j η_j}`, basis order.
pub fn reversible_weights<S: Scalar>(sites: usize, rates: &RateParameters<S>) -> Result<Vec<S>> {
    check_sites(sites)?;
    rates.require_duality_regime()?;
    Ok(Configuration::all(sites)
        .map(|eta| rates.tau().pow(2 * eta.position_sum()))
        .collect())
}

/// One failing detailed-balance pair.
#[derive(Clone, Debug, PartialEq)]
pub struct BalanceViolation<S> {
    pub from: usize,
    pub to: usize,
    /// `π(from)·𝓛[to, from] − π(to)·𝓛[from, to]`.
    pub difference: S,
}

/// Checks `π(η)·𝓛[η', η] = π(η')·𝓛[η, η']` for every unordered pair and
/// returns the violations (empty when balanced).
pub fn detailed_balance_violations<S: Scalar>(
    generator: &Operator<S>,
    weights: &[S],
) -> Result<Vec<BalanceViolation<S>>> {
    if weights.len() != generator.dim() {
        return Err(Error::DimensionMismatch {
            left: weights.len(),
            right: generator.dim(),
        });
    }
    let mut out = Vec::new();
    for a in 0..generator.dim() {
        for b in (a + 1)..generator.dim() {
            let lhs = weights[a].mul_ref(&generator.get(b, a));
            let rhs = weights[b].mul_ref(&generator.get(a, b));
            if !lhs.approx_eq(&rhs) {
                out.push(BalanceViolation {
                    from: a,
                    to: b,
                    difference: lhs.sub_ref(&rhs),
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    type L = LaurentScalar;

    fn sym(gamma: i64) -> RateParameters<L> {
        RateParameters::exact_regime(rational(1, 1), rational(gamma, 1)).unwrap()
    }

    #[test]
    fn single_site_generator() {
        let r = RateParameters::numeric(1.0, 1.0, 3.0, 0.0, 5.0, 0.0).unwrap();
        let g = build_generator(1, &r).unwrap();
        assert_eq!(g.get(0, 0), 3.0);
        assert_eq!(g.get(0, 1), -5.0);
        assert_eq!(g.get(1, 0), -3.0);
        assert_eq!(g.get(1, 1), 5.0);
    }

    #[test]
    fn two_site_bulk_only() {
        let r = RateParameters::numeric(2.0, 0.5, 0.0, 0.0, 0.0, 0.0).unwrap();
        let g = build_generator(2, &r).unwrap();
        // (1,0) is index 0b01, (0,1) is index 0b10.
        assert_eq!(g.get(0b01, 0b10), -0.5);
        assert_eq!(g.get(0b10, 0b01), -2.0);
        assert_eq!(g.get(0b10, 0b10), 0.5);
        assert_eq!(g.get(0b01, 0b01), 2.0);
        assert_eq!(g.nnz(), 4);
    }

    #[test]
    fn column_sums_vanish() {
        let r = sym(3).with_beta(L::from(2)).with_delta(L::tau());
        for sites in 1..=4 {
            let g = build_generator(sites, &r).unwrap();
            assert!(g.column_sums().iter().all(L::is_zero));
            let gt = build_reflected_generator(sites, &r).unwrap();
            assert!(gt.column_sums().iter().all(L::is_zero));
        }
    }

    #[test]
    fn v_examples() {
        let one = Tau::<L>::rational(rational(1, 1)).unwrap();
        assert_eq!(build_v(3, 2, &one).unwrap(), Operator::identity(8));
        let tau = Tau::symbolic();
        let v = build_v(1, 1, &tau).unwrap();
        assert_eq!(v, Operator::diagonal(vec![L::one(), tau.pow(-1)]));
        let v2 = build_v(2, 2, &tau).unwrap();
        assert_eq!(v2.get(3, 3), tau.pow(-6));
    }

    #[test]
    fn v_powers_compose() {
        let tau = Tau::symbolic();
        for (a, b) in [(1, 1), (2, -1), (-3, 2)] {
            let lhs = build_v(3, a, &tau)
                .unwrap()
                .mul(&build_v(3, b, &tau).unwrap())
                .unwrap();
            assert_eq!(lhs, build_v(3, a + b, &tau).unwrap());
        }
    }

    #[test]
    fn involution_examples() {
        let pi1 = build_involution::<L>(1).unwrap();
        assert_eq!(pi1.get(0, 1), L::one());
        assert_eq!(pi1.get(1, 0), L::one());
        assert_eq!(pi1.nnz(), 2);
        let pi3 = build_involution::<L>(3).unwrap();
        assert_eq!(pi3.mul(&pi3).unwrap(), Operator::identity(8));
        assert_eq!(pi3.get(7, 0), L::one());
    }

    #[test]
    fn reflected_single_site() {
        let r = RateParameters::numeric(1.0, 1.0, 3.0, 0.0, 5.0, 0.0).unwrap();
        let g = build_reflected_generator(1, &r).unwrap();
        assert_eq!(g.get(0, 0), 5.0);
        assert_eq!(g.get(0, 1), -3.0);
        assert_eq!(g.get(1, 0), -5.0);
        assert_eq!(g.get(1, 1), 3.0);
    }

    #[test]
    fn involution_conjugates_to_reflected() {
        let r = sym(2);
        for sites in 1..=4 {
            let pi = build_involution(sites).unwrap();
            let g = build_generator(sites, &r).unwrap();
            let conj = pi.mul(&g).unwrap().mul(&pi).unwrap();
            assert_eq!(conj, build_reflected_generator(sites, &r).unwrap());
        }
    }

    #[test]
    fn reversible_weights_single_site() {
        let r = sym(1);
        let w = reversible_weights(1, &r).unwrap();
        assert_eq!(
            w,
            vec![L::one(), L::tau_power(4, Rational::from_integer(1.into()))]
        );
        let g = build_generator(1, &r).unwrap();
        assert!(detailed_balance_violations(&g, &w).unwrap().is_empty());
    }

    #[test]
    fn reversible_weights_uniform_at_unit_tau() {
        let r = RateParameters::numeric_regime(1.5, 1.5, 2.0).unwrap();
        let w = reversible_weights(3, &r).unwrap();
        assert!(w.iter().all(|x| (*x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn reversible_weights_three_sites() {
        let r = sym(3);
        let w = reversible_weights(3, &r).unwrap();
        let g = build_generator(3, &r).unwrap();
        assert!(detailed_balance_violations(&g, &w).unwrap().is_empty());
    }

    #[test]
    fn reversible_weights_reject_regime_violation() {
        let r = sym(1).with_beta(L::from(1));
        assert!(matches!(
            reversible_weights(2, &r),
            Err(Error::RegimeViolation(_))
        ));
    }

    #[test]
    fn regime_flags() {
        assert!(sym(1).in_duality_regime());
        let broken = sym(1).with_alpha(L::tau_power(4, rational(101, 100)));
        assert_eq!(broken.regime_violations(), vec!["α/γ ≠ p/q".to_string()]);
        let n = RateParameters::numeric(2.0, 0.5, 1.0, 0.0, 1.0, 0.0).unwrap();
        assert!(!n.in_duality_regime());
        assert!(RateParameters::numeric_regime(2.0, 0.5, 1.0)
            .unwrap()
            .in_duality_regime());
    }

    #[test]
    fn exact_concrete_requires_rational_tau() {
        let r = RateParameters::exact_concrete(
            rational(2, 1),
            rational(1, 2),
            rational(4, 1),
            rational(0, 1),
            rational(1, 1),
            rational(0, 1),
        )
        .unwrap();
        assert_eq!(r.tau().get().as_constant(), Some(rational(2, 1)));
        assert_eq!(r.scale().as_constant(), Some(rational(1, 1)));
        assert!(r.in_duality_regime());
        let err = RateParameters::exact_concrete(
            rational(2, 1),
            rational(1, 1),
            rational(0, 1),
            rational(0, 1),
            rational(0, 1),
            rational(0, 1),
        );
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn numeric_rejects_bad_rates() {
        assert!(RateParameters::numeric(0.0, 1.0, 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(RateParameters::numeric(1.0, 1.0, -1.0, 0.0, 0.0, 0.0).is_err());
        assert!(RateParameters::numeric(1.0, f64::NAN, 0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn evaluate_symbolic_rates() {
        let r = sym(1).evaluate(2.0).unwrap();
        assert!((r.p - 2.0).abs() < 1e-14);
        assert!((r.q - 0.5).abs() < 1e-14);
        assert!((r.alpha - 4.0).abs() < 1e-14);
        assert!(r.in_duality_regime());
    }
}
