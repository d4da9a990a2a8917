//! Turns rate flags into rate parameters of the requested ring.

use asep_core::scalar::{parse_rational, rational, rational_to_f64};
use asep_core::{LaurentScalar, RateParameters, Rational};

use crate::args::Options;

pub enum Rates {
    Exact(RateParameters<LaurentScalar>),
    Numeric(RateParameters<f64>),
}

fn exact(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Accepts `a/b`, decimals and anything `f64` parses (e.g. `1e-3`).
pub fn number(s: &str) -> Result<f64, String> {
    match parse_rational(s) {
        Ok(r) => Ok(rational_to_f64(&r)),
        Err(_) => s.trim().parse().map_err(|_| format!("not a number: {s:?}")),
    }
}

fn optional<T>(
    s: &Option<String>,
    parse: impl Fn(&str) -> Result<T, String>,
) -> Result<Option<T>, String> {
    s.as_deref().map(parse).transpose()
}

pub fn resolve_exact(o: &Options) -> Result<RateParameters<LaurentScalar>, String> {
    let gamma = exact(&o.gamma)?;
    let alpha = optional(&o.alpha, exact)?;
    let beta = optional(&o.beta, exact)?.unwrap_or_else(|| rational(0, 1));
    let delta = optional(&o.delta, exact)?.unwrap_or_else(|| rational(0, 1));
    let pq = match (&o.p, &o.q, &o.tau) {
        (Some(p), Some(q), _) => Some((exact(p)?, exact(q)?)),
        (_, _, Some(tau)) => {
            let tau = exact(tau)?;
            if tau <= rational(0, 1) {
                return Err(format!("τ must be positive, got {tau}"));
            }
            Some((tau.clone(), tau.recip()))
        }
        _ => None,
    };
    let rates = match pq {
        Some((p, q)) => {
            let alpha = alpha.unwrap_or_else(|| &gamma * &p / &q);
            RateParameters::exact_concrete(p, q, alpha, beta, gamma, delta)
                .map_err(|e| e.to_string())?
        }
        None => {
            // Symbolic τ with √(pq) = 1.
            let mut r =
                RateParameters::exact_regime(rational(1, 1), gamma).map_err(|e| e.to_string())?;
            if let Some(a) = alpha {
                r = r.with_alpha(a.into());
            }
            r.with_beta(beta.into()).with_delta(delta.into())
        }
    };
    Ok(rates)
}

pub fn resolve_numeric(o: &Options) -> Result<RateParameters<f64>, String> {
    let gamma = number(&o.gamma)?;
    let (p, q) = match (&o.p, &o.q, &o.tau) {
        (Some(p), Some(q), _) => (number(p)?, number(q)?),
        (_, _, Some(tau)) => {
            let tau = number(tau)?;
            (tau, 1.0 / tau)
        }
        _ => (2.0, 0.5),
    };
    let alpha = optional(&o.alpha, number)?.unwrap_or(gamma * p / q);
    let beta = optional(&o.beta, number)?.unwrap_or(0.0);
    let delta = optional(&o.delta, number)?.unwrap_or(0.0);
    RateParameters::numeric(p, q, alpha, beta, gamma, delta).map_err(|e| e.to_string())
}

pub fn resolve(o: &Options) -> Result<Rates, String> {
    match o.mode {
        crate::args::ModeArg::Exact => resolve_exact(o).map(Rates::Exact),
        crate::args::ModeArg::Numeric => resolve_numeric(o).map(Rates::Numeric),
    }
}
