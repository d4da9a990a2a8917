//! Scalar rings for operator entries.
//!
//! The exact ring is `Q[t, t⁻¹]`, Laurent polynomials in `t = τ^{1/2}` with
//! rational coefficients. Every identity that holds "for all τ" becomes a
//! polynomial identity in this ring, and half-integer powers of τ (needed by
//! the quantum-group generator `k₁`) are ordinary integer powers of `t`.
//!
//! The numeric ring is plain `f64`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, always stored in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// `n / d` as a [`Rational`]. Panics if `d == 0`.
pub fn rational(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"a/b"`, an integer, or a finite decimal such as `"0.25"` into an
/// exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Domain(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.trim_start().starts_with('-');
        let int = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac = BigInt::from_str(frac).map_err(|_| bad())?;
        let magnitude = int.abs() * &scale + frac;
        let n = if negative { -magnitude } else { magnitude };
        return Ok(BigRational::new(n, scale));
    }
    BigInt::from_str(s)
        .map(BigRational::from_integer)
        .map_err(|_| bad())
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Element of `Q[t, t⁻¹]`.
///
/// Canonical form: no zero coefficients are stored, so structural equality is
/// ring equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentScalar {
    terms: BTreeMap<i32, Rational>,
}

impl LaurentScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    /// `coeff · t^exponent`.
    pub fn monomial(coeff: Rational, exponent: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exponent, coeff);
        }
        Self { terms }
    }

    /// `coeff · τ^{k_half/2}`, i.e. `coeff · t^{k_half}`.
    pub fn tau_power(k_half: i32, coeff: Rational) -> Self {
        Self::monomial(coeff, k_half)
    }

    /// The ring variable `t = τ^{1/2}`.
    pub fn t() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    /// `τ = t²`.
    pub fn tau() -> Self {
        Self::monomial(Rational::one(), 2)
    }

    /// Builds a scalar from arbitrary `(exponent, coefficient)` pairs,
    /// collecting repeated exponents and dropping zeros.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i32, Rational)>,
    {
        let mut out = Self::zero();
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    fn add_term(&mut self, exponent: i32, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exponent) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the scalar is a constant (including zero).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    /// `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &Rational)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coefficient(&self, exponent: i32) -> Rational {
        self.terms
            .get(&exponent)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Lowest and highest exponent of `t`, `None` for zero.
    pub fn degree_span(&self) -> Option<(i32, i32)> {
        let lo = *self.terms.keys().next()?;
        let hi = *self.terms.keys().next_back()?;
        Some((lo, hi))
    }

    /// Evaluates at `t = t0` in floating point.
    pub fn eval(&self, t0: f64) -> Result<f64> {
        if !t0.is_finite() || t0 <= 0.0 {
            return Err(Error::Domain(format!(
                "evaluation point must be positive and finite, got {t0}"
            )));
        }
        let v: f64 = self
            .terms
            .iter()
            .map(|(e, c)| rational_to_f64(c) * t0.powi(*e))
            .sum();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("evaluation overflowed at t = {t0}")))
        }
    }

    /// Evaluates at `τ = tau0` (so `t = √tau0`).
    pub fn eval_tau(&self, tau0: f64) -> Result<f64> {
        if tau0.is_nan() || tau0 <= 0.0 {
            return Err(Error::Domain(format!("τ must be positive, got {tau0}")));
        }
        self.eval(tau0.sqrt())
    }

    /// Rebuilds the canonical form. A no-op for values built through the
    /// public API; kept for property tests on the invariant.
    pub fn normalized(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| (*e, c.clone())))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }
}

impl fmt::Display for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // Highest power first, the way the polynomials read in the literature.
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            let unit = abs.is_one();
            match (*e, unit) {
                (0, _) => write!(f, "{abs}")?,
                (e, true) => write_power(f, e)?,
                (e, false) => {
                    write!(f, "{abs}*")?;
                    write_power(f, e)?;
                }
            }
        }
        Ok(())
    }
}

fn write_power(f: &mut fmt::Formatter<'_>, e: i32) -> fmt::Result {
    if e == 1 {
        f.write_str("t")
    } else {
        write!(f, "t^{e}")
    }
}

impl fmt::Debug for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentScalar({self})")
    }
}

impl From<Rational> for LaurentScalar {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

impl From<i64> for LaurentScalar {
    fn from(c: i64) -> Self {
        Self::constant(Rational::from_integer(c.into()))
    }
}

impl<'a> Add<&'a LaurentScalar> for &'a LaurentScalar {
    type Output = LaurentScalar;
    fn add(self, rhs: &'a LaurentScalar) -> LaurentScalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LaurentScalar {
    type Output = LaurentScalar;
    fn add(mut self, rhs: LaurentScalar) -> LaurentScalar {
        self += &rhs;
        self
    }
}

impl AddAssign<&LaurentScalar> for LaurentScalar {
    fn add_assign(&mut self, rhs: &LaurentScalar) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl<'a> Sub<&'a LaurentScalar> for &'a LaurentScalar {
    type Output = LaurentScalar;
    fn sub(self, rhs: &'a LaurentScalar) -> LaurentScalar {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Sub for LaurentScalar {
    type Output = LaurentScalar;
    fn sub(self, rhs: LaurentScalar) -> LaurentScalar {
        &self - &rhs
    }
}

impl<'a> Mul<&'a LaurentScalar> for &'a LaurentScalar {
    type Output = LaurentScalar;
    fn mul(self, rhs: &'a LaurentScalar) -> LaurentScalar {
        let mut out = LaurentScalar::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }
}

impl Mul for LaurentScalar {
    type Output = LaurentScalar;
    fn mul(self, rhs: LaurentScalar) -> LaurentScalar {
        &self * &rhs
    }
}

impl Neg for &LaurentScalar {
    type Output = LaurentScalar;
    fn neg(self) -> LaurentScalar {
        LaurentScalar {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

impl Neg for LaurentScalar {
    type Output = LaurentScalar;
    fn neg(self) -> LaurentScalar {
        -&self
    }
}

/// How far an operator identity is from holding.
///
/// Exact checks carry the first nonzero entry of the difference (row-major
/// order), so a passing exact check has residual exactly `0`. Numeric checks
/// carry the max-abs entry.
#[derive(Clone, Debug, PartialEq)]
pub enum Residual {
    Exact(LaurentScalar),
    Numeric(f64),
}

impl Residual {
    pub fn exact_zero() -> Self {
        Residual::Exact(LaurentScalar::zero())
    }

    /// Exact residuals pass only when literally zero; numeric ones when at
    /// most `tol`.
    pub fn passes(&self, tol: f64) -> bool {
        match self {
            Residual::Exact(r) => r.is_zero(),
            Residual::Numeric(r) => r.is_finite() && *r <= tol,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Residual::Exact(_))
    }

    /// Combines two residuals of the same kind, keeping the worse one.
    pub fn worst(self, other: Residual) -> Residual {
        match (self, other) {
            (Residual::Exact(a), Residual::Exact(b)) => {
                if a.is_zero() {
                    Residual::Exact(b)
                } else {
                    Residual::Exact(a)
                }
            }
            (Residual::Numeric(a), Residual::Numeric(b)) => Residual::Numeric(a.max(b)),
            (Residual::Exact(a), Residual::Numeric(b))
            | (Residual::Numeric(b), Residual::Exact(a)) => {
                if a.is_zero() {
                    Residual::Numeric(b)
                } else {
                    Residual::Exact(a)
                }
            }
        }
    }
}

impl fmt::Display for Residual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Residual::Exact(r) => write!(f, "{r}"),
            Residual::Numeric(r) => write!(f, "{r:e}"),
        }
    }
}

/// Commutative ring used for operator entries.
pub trait Scalar: Clone + fmt::Debug + fmt::Display + PartialEq + Send + Sync + 'static {
    /// True for exact rings, where equality is decidable.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_rational(r: &Rational) -> Self;
    fn add_ref(&self, rhs: &Self) -> Self;
    fn sub_ref(&self, rhs: &Self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn neg_ref(&self) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(n.into()))
    }

    fn add_assign_ref(&mut self, rhs: &Self) {
        *self = self.add_ref(rhs);
    }

    /// Equality up to the ring's notion of rounding: exact equality for
    /// exact rings, relative tolerance `1e-12` for floats.
    fn approx_eq(&self, rhs: &Self) -> bool;

    /// Residual summary of a collection of difference entries.
    fn residual<'a, I>(entries: I) -> Residual
    where
        I: IntoIterator<Item = &'a Self>,
        Self: 'a;

    /// Floating-point value if it has one (numeric scalars, or exact
    /// constants).
    fn to_f64(&self) -> Option<f64>;
}

impl Scalar for LaurentScalar {
    const EXACT: bool = true;

    fn zero() -> Self {
        LaurentScalar::zero()
    }
    fn one() -> Self {
        LaurentScalar::one()
    }
    fn is_zero(&self) -> bool {
        LaurentScalar::is_zero(self)
    }
    fn from_rational(r: &Rational) -> Self {
        LaurentScalar::constant(r.clone())
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn approx_eq(&self, rhs: &Self) -> bool {
        self == rhs
    }
    fn residual<'a, I>(entries: I) -> Residual
    where
        I: IntoIterator<Item = &'a Self>,
    {
        Residual::Exact(
            entries
                .into_iter()
                .find(|e| !e.is_zero())
                .cloned()
                .unwrap_or_default(),
        )
    }
    fn to_f64(&self) -> Option<f64> {
        self.as_constant().map(|c| rational_to_f64(&c))
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn approx_eq(&self, rhs: &Self) -> bool {
        let scale = self.abs().max(rhs.abs()).max(1.0);
        (self - rhs).abs() <= 1e-12 * scale
    }
    fn residual<'a, I>(entries: I) -> Residual
    where
        I: IntoIterator<Item = &'a Self>,
    {
        Residual::Numeric(entries.into_iter().fold(0.0, |m, e| m.max(e.abs())))
    }
    fn to_f64(&self) -> Option<f64> {
        Some(*self)
    }
}

/// The asymmetry parameter τ in a given ring, with its inverse and, when
/// available, its square root.
#[derive(Clone, Debug, PartialEq)]
pub struct Tau<S> {
    tau: S,
    tau_inv: S,
    sqrt: Option<(S, S)>,
}

impl Tau<LaurentScalar> {
    /// Symbolic τ = t².
    pub fn symbolic() -> Self {
        Tau {
            tau: LaurentScalar::tau(),
            tau_inv: LaurentScalar::tau_power(-2, Rational::one()),
            sqrt: Some((
                LaurentScalar::t(),
                LaurentScalar::tau_power(-1, Rational::one()),
            )),
        }
    }

    /// A concrete positive rational τ inside the exact ring. Half-integer
    /// powers are unavailable.
    pub fn rational(tau: Rational) -> Result<Self> {
        if !tau.is_positive() {
            return Err(Error::Domain(format!("τ must be positive, got {tau}")));
        }
        Ok(Tau {
            tau_inv: LaurentScalar::constant(tau.recip()),
            tau: LaurentScalar::constant(tau),
            sqrt: None,
        })
    }

    pub fn is_symbolic(&self) -> bool {
        self.sqrt.is_some()
    }

    /// Evaluates the symbolic τ at a number, for numeric cross-checks.
    pub fn evaluate(&self, tau0: f64) -> Result<Tau<f64>> {
        if self.is_symbolic() {
            Tau::numeric(tau0)
        } else {
            let c = self.tau.to_f64().unwrap_or(f64::NAN);
            Tau::numeric(c)
        }
    }
}

impl Tau<f64> {
    pub fn numeric(tau: f64) -> Result<Self> {
        if !tau.is_finite() || tau <= 0.0 {
            return Err(Error::Domain(format!(
                "τ must be positive and finite, got {tau}"
            )));
        }
        let t = tau.sqrt();
        Ok(Tau {
            tau,
            tau_inv: tau.recip(),
            sqrt: Some((t, t.recip())),
        })
    }

    pub fn value(&self) -> f64 {
        self.tau
    }
}

impl<S: Scalar> Tau<S> {
    pub fn get(&self) -> &S {
        &self.tau
    }

    pub fn inv(&self) -> &S {
        &self.tau_inv
    }

    /// τ^k for integer k.
    pub fn pow(&self, k: i64) -> S {
        let base = if k >= 0 { &self.tau } else { &self.tau_inv };
        pow_unsigned(base, k.unsigned_abs())
    }

    /// τ^{k/2}. Fails for odd `k` when no square root is available.
    pub fn pow_half(&self, k: i64) -> Result<S> {
        if k % 2 == 0 {
            return Ok(self.pow(k / 2));
        }
        let (t, t_inv) = self.sqrt.as_ref().ok_or_else(|| {
            Error::Domain("half-integer power of τ needs symbolic or numeric τ".into())
        })?;
        let base = if k >= 0 { t } else { t_inv };
        Ok(pow_unsigned(base, k.unsigned_abs()))
    }

    pub fn has_sqrt(&self) -> bool {
        self.sqrt.is_some()
    }

    /// τ − τ⁻¹.
    pub fn minus_inverse(&self) -> S {
        self.tau.sub_ref(&self.tau_inv)
    }

    /// τ + τ⁻¹.
    pub fn plus_inverse(&self) -> S {
        self.tau.add_ref(&self.tau_inv)
    }
}

fn pow_unsigned<S: Scalar>(base: &S, mut e: u64) -> S {
    let mut acc = S::one();
    let mut b = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul_ref(&b);
        }
        e >>= 1;
        if e > 0 {
            b = b.mul_ref(&b);
        }
    }
    acc
}
