//! Outcome record shared by every verification.

use std::collections::BTreeMap;

use serde::ser::{Serialize, Serializer};
use serde_json::Value;

use crate::asep::Mode;
use crate::scalar::{Residual, Scalar, Tau};

/// Absolute ∞-norm threshold for numeric algebraic identities.
pub const ALGEBRAIC_TOL: f64 = 1e-10;
/// Threshold for identities involving matrix exponentials.
pub const EXPONENTIAL_TOL: f64 = 1e-8;
/// Threshold for scalar identities evaluated in floating point.
pub const SCALAR_TOL: f64 = 1e-12;

/// One named verification and its outcome.
///
/// In exact mode `passed` is true iff the residual is the zero polynomial.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct CheckResult {
    pub name: String,
    pub params: BTreeMap<String, Value>,
    pub passed: bool,
    #[serde(serialize_with = "serialize_residual")]
    pub residual: Residual,
    pub derived: BTreeMap<String, Value>,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, mode: Mode) -> Self {
        let mut params = BTreeMap::new();
        params.insert(
            "mode".to_string(),
            serde_json::to_value(mode).expect("mode serializes"),
        );
        Self {
            name: name.into(),
            params,
            passed: false,
            residual: Residual::exact_zero(),
            derived: BTreeMap::new(),
        }
    }

    /// Starts a record whose mode follows the scalar ring.
    pub fn for_ring<S: Scalar>(name: impl Into<String>) -> Self {
        Self::new(name, mode_of::<S>())
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn tau_param<S: Scalar + std::fmt::Display>(self, tau: &Tau<S>) -> Self {
        let v = describe_scalar(tau.get());
        self.param("tau", v)
    }

    pub fn derive(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.derived.insert(key.to_string(), value.into());
        self
    }

    /// Sets the residual and decides `passed` from it.
    pub fn judged(mut self, residual: Residual, tol: f64) -> Self {
        self.passed = residual.passes(tol);
        self.residual = residual;
        self
    }

    /// Overrides `passed` (for checks combining several criteria); the
    /// record still fails if the residual does.
    pub fn require(mut self, ok: bool) -> Self {
        self.passed &= ok;
        self
    }

    pub fn status_line(&self) -> String {
        format!(
            "[{}] {} residual={}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.residual
        )
    }
}

pub fn mode_of<S: Scalar>() -> Mode {
    if S::EXACT {
        Mode::Exact
    } else {
        Mode::Numeric
    }
}

/// JSON rendering of a scalar: numbers stay numbers, Laurent polynomials
/// become strings like `"t^2 - t^-2"`.
pub fn describe_scalar<S: Scalar + std::fmt::Display>(s: &S) -> Value {
    if S::EXACT {
        Value::String(s.to_string())
    } else {
        s.to_f64().map(Value::from).unwrap_or(Value::Null)
    }
}

fn serialize_residual<Se: Serializer>(r: &Residual, s: Se) -> Result<Se::Ok, Se::Error> {
    match r {
        Residual::Exact(p) => s.serialize_str(&p.to_string()),
        Residual::Numeric(x) if x.is_finite() => s.serialize_f64(*x),
        Residual::Numeric(_) => s.serialize_none(),
    }
}

impl Serialize for Residual {
    fn serialize<Se: Serializer>(&self, s: Se) -> Result<Se::Ok, Se::Error> {
        serialize_residual(self, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::LaurentScalar;

    #[test]
    fn exact_residual_serializes_as_string() {
        let c = CheckResult::new("x", Mode::Exact).judged(Residual::exact_zero(), 0.0);
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["residual"], "0");
        assert_eq!(v["passed"], true);
        assert_eq!(v["params"]["mode"], "exact");
        let c = c.judged(Residual::Exact(LaurentScalar::tau()), 0.0);
        assert_eq!(serde_json::to_value(&c).unwrap()["residual"], "t^2");
        assert!(!c.passed);
    }

    #[test]
    fn numeric_residual_serializes_as_number() {
        let c =
            CheckResult::new("x", Mode::Numeric).judged(Residual::Numeric(1e-13), ALGEBRAIC_TOL);
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["residual"], 1e-13);
        assert!(c.passed);
        let c = c.judged(Residual::Numeric(f64::NAN), 1.0);
        assert!(serde_json::to_value(&c).unwrap()["residual"].is_null());
    }

    #[test]
    fn require_cannot_rescue_a_failed_residual() {
        let c = CheckResult::new("x", Mode::Numeric)
            .judged(Residual::Numeric(1.0), 0.5)
            .require(true);
        assert!(!c.passed);
    }
}
