//! Exact scalars and the flagged floating fallback.
//!
//! Every matrix entry, weight label and form value in the crate is a
//! [`Scalar`]. The exact variant is a Gaussian rational; the approximate
//! variant is a complex double carrying its comparison tolerance. Mixing the
//! two always yields an approximate value, so a single floating input taints
//! every result derived from it and the taint is visible through
//! [`Scalar::is_exact`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::KmxError;

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

/// Default tolerance of the approximate path.
pub const DEFAULT_EPSILON: f64 = 1e-9;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, KmxError> {
    let s = s.trim();
    let bad = || KmxError::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(KmxError::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Very large components: scale down through the bit lengths.
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000) as i32;
            let n: f64 = (r.numer() >> shift as usize).to_f64().unwrap_or(f64::NAN);
            let d: f64 = (r.denom() >> shift as usize).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

/// `serde(with = ...)` helpers for bare rationals.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        rational_from_json(&v).map_err(de::Error::custom)
    }
}

/// `serde(with = ...)` helpers for vectors of rationals.
pub mod serde_rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<String> = v.iter().map(format_rational).collect();
        strings.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<serde_json::Value>::deserialize(d)?;
        v.iter()
            .map(|x| rational_from_json(x).map_err(de::Error::custom))
            .collect()
    }
}

/// Accepts `"p/q"`, `"p"` or a JSON integer.
pub fn rational_from_json(v: &serde_json::Value) -> Result<Rational, KmxError> {
    match v {
        serde_json::Value::String(s) => parse_rational(s),
        serde_json::Value::Number(n) if n.is_i64() => Ok(int(n.as_i64().unwrap())),
        other => Err(KmxError::Parse(format!("expected a rational string, got {other}"))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn real(re: Rational) -> Self {
        GaussianRational { re, im: Rational::zero() }
    }

    pub fn i() -> Self {
        GaussianRational::new(Rational::zero(), Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational::new(self.re.clone(), -&self.im)
    }

    /// |z|^2, always a nonnegative rational.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(GaussianRational::new(&self.re / &n, -&self.im / &n))
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussianRational::real(&self.re * &o.re);
        }
        GaussianRational::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-&self.re, -&self.im)
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", format_rational(&self.re));
        }
        if self.re.is_zero() {
            return write!(f, "{}i", format_rational(&self.im));
        }
        let sign = if self.im.is_negative() { "-" } else { "+" };
        write!(
            f,
            "{}{}{}i",
            format_rational(&self.re),
            sign,
            format_rational(&self.im.abs())
        )
    }
}

/// Exact Gaussian rational or tolerance-carrying complex double.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(GaussianRational),
    Approx { value: Complex64, eps: f64 },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(GaussianRational::default())
    }

    pub fn one() -> Self {
        Scalar::from_rational(Rational::one())
    }

    pub fn i() -> Self {
        Scalar::Exact(GaussianRational::i())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_rational(int(n))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Scalar::from_rational(rat(n, d))
    }

    pub fn from_rational(r: Rational) -> Self {
        Scalar::Exact(GaussianRational::real(r))
    }

    pub fn gaussian(re: Rational, im: Rational) -> Self {
        Scalar::Exact(GaussianRational::new(re, im))
    }

    pub fn approx(value: Complex64, eps: f64) -> Self {
        Scalar::Approx { value, eps }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&GaussianRational> {
        match self {
            Scalar::Exact(g) => Some(g),
            Scalar::Approx { .. } => None,
        }
    }

    pub fn eps(&self) -> f64 {
        match self {
            Scalar::Exact(_) => 0.0,
            Scalar::Approx { eps, .. } => *eps,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(g) => g.to_complex(),
            Scalar::Approx { value, .. } => *value,
        }
    }

    /// Exact zero, or within tolerance on the approximate path.
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(g) => g.is_zero(),
            Scalar::Approx { value, eps } => value.norm() <= *eps,
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            Scalar::Exact(g) => Scalar::Exact(g.conj()),
            Scalar::Approx { value, eps } => Scalar::Approx { value: value.conj(), eps: *eps },
        }
    }

    /// |a|^2 as a (real) scalar.
    pub fn norm_sqr(&self) -> Scalar {
        match self {
            Scalar::Exact(g) => Scalar::from_rational(g.norm_sqr()),
            Scalar::Approx { value, eps } => {
                Scalar::Approx { value: Complex64::new(value.norm_sqr(), 0.0), eps: *eps }
            }
        }
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        match self {
            Scalar::Exact(g) => g.inv().map(Scalar::Exact).ok_or(ScalarError::DivisionByZero),
            Scalar::Approx { value, eps } => {
                if value.norm() <= *eps {
                    Err(ScalarError::DivisionByZero)
                } else {
                    Ok(Scalar::Approx { value: value.inv(), eps: *eps })
                }
            }
        }
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(self * &other.inv()?)
    }

    /// Sign of a real scalar. `None` when the imaginary part is nonzero
    /// (beyond tolerance on the approximate path).
    pub fn real_sign(&self) -> Option<Ordering> {
        match self {
            Scalar::Exact(g) => {
                if !g.im.is_zero() {
                    None
                } else {
                    Some(g.re.cmp(&Rational::zero()))
                }
            }
            Scalar::Approx { value, eps } => {
                if value.im.abs() > *eps {
                    None
                } else if value.re > *eps {
                    Some(Ordering::Greater)
                } else if value.re < -*eps {
                    Some(Ordering::Less)
                } else {
                    Some(Ordering::Equal)
                }
            }
        }
    }

    /// Equality: bit-exact on the exact path, tolerance-based as soon as one
    /// side is approximate.
    pub fn approx_eq(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => {
                let eps = self.eps().max(other.eps());
                (self.to_complex() - other.to_complex()).norm() <= eps.max(f64::MIN_POSITIVE)
            }
        }
    }

    /// Real rational value, if this is an exact real scalar.
    pub fn to_rational(&self) -> Option<Rational> {
        match self {
            Scalar::Exact(g) if g.im.is_zero() => Some(g.re.clone()),
            _ => None,
        }
    }

    fn combine(
        a: &Scalar,
        b: &Scalar,
        exact: impl Fn(&GaussianRational, &GaussianRational) -> GaussianRational,
        approx: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Scalar {
        match (a, b) {
            (Scalar::Exact(x), Scalar::Exact(y)) => Scalar::Exact(exact(x, y)),
            _ => Scalar::Approx {
                value: approx(a.to_complex(), b.to_complex()),
                eps: a.eps().max(b.eps()),
            },
        }
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::from_rational(r)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<GaussianRational> for Scalar {
    fn from(g: GaussianRational) -> Self {
        Scalar::Exact(g)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        Scalar::combine(self, o, |x, y| x + y, |x, y| x + y)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        Scalar::combine(self, o, |x, y| x - y, |x, y| x - y)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        Scalar::combine(self, o, |x, y| x * y, |x, y| x * y)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(g) => Scalar::Exact(-g),
            Scalar::Approx { value, eps } => Scalar::Approx { value: -value, eps: *eps },
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar { (&self).$m(&o) }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar { (&self).$m(o) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        match (&mut *self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                a.re += &b.re;
                a.im += &b.im;
            }
            _ => *self = &*self + o,
        }
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, o: Scalar) {
        *self += &o;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        *self = &*self - o;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, o: &Scalar) {
        *self = &*self * o;
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(g) => write!(f, "{g}"),
            Scalar::Approx { value, .. } => {
                if value.im == 0.0 {
                    write!(f, "~{}", value.re)
                } else {
                    write!(f, "~({}{:+}i)", value.re, value.im)
                }
            }
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(g) if g.im.is_zero() => s.serialize_str(&format_rational(&g.re)),
            Scalar::Exact(g) => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("re", &format_rational(&g.re))?;
                m.serialize_entry("im", &format_rational(&g.im))?;
                m.end()
            }
            Scalar::Approx { value, .. } => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("re", &value.re)?;
                m.serialize_entry("im", &value.im)?;
                m.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Scalar, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        scalar_from_json(&v, DEFAULT_EPSILON).map_err(de::Error::custom)
    }
}

/// Parses the JSON scalar encodings: a rational string, `{"re","im"}` with
/// rational strings (exact), or `{"re","im"}` / a bare number with JSON
/// floats (approximate, tolerance `eps`).
pub fn scalar_from_json(v: &serde_json::Value, eps: f64) -> Result<Scalar, KmxError> {
    use serde_json::Value;
    match v {
        Value::String(s) => Ok(Scalar::from_rational(parse_rational(s)?)),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Scalar::from_int(i))
            } else {
                Ok(Scalar::approx(Complex64::new(n.as_f64().unwrap_or(f64::NAN), 0.0), eps))
            }
        }
        Value::Object(map) => {
            let re = map.get("re").cloned().unwrap_or(Value::String("0".into()));
            let im = map.get("im").cloned().unwrap_or(Value::String("0".into()));
            let is_float = |x: &Value| matches!(x, Value::Number(n) if !n.is_i64());
            if is_float(&re) || is_float(&im) {
                let f = |x: &Value| -> Result<f64, KmxError> {
                    match x {
                        Value::Number(n) => Ok(n.as_f64().unwrap_or(f64::NAN)),
                        Value::String(s) => Ok(rational_to_f64(&parse_rational(s)?)),
                        other => Err(KmxError::Parse(format!("bad scalar component {other}"))),
                    }
                };
                Ok(Scalar::approx(Complex64::new(f(&re)?, f(&im)?), eps))
            } else {
                Ok(Scalar::gaussian(rational_from_json(&re)?, rational_from_json(&im)?))
            }
        }
        other => Err(KmxError::Parse(format!("not a scalar: {other}"))),
    }
}

/// Sum of scalars, exact when every summand is.
pub fn sum<'a>(it: impl IntoIterator<Item = &'a Scalar>) -> Scalar {
    let mut acc = Scalar::zero();
    for x in it {
        acc += x;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn field_examples() {
        assert_eq!(&Scalar::from_ratio(1, 2) + &Scalar::from_ratio(1, 3), Scalar::from_ratio(5, 6));
        assert_eq!(&Scalar::i() * &Scalar::i(), Scalar::from_int(-1));
        assert_eq!(Scalar::zero().inv(), Err(ScalarError::DivisionByZero));
        assert_eq!(
            Scalar::approx(Complex64::new(1e-12, 0.0), 1e-9).inv(),
            Err(ScalarError::DivisionByZero)
        );
    }

    #[test]
    fn conj_examples() {
        assert_eq!(Scalar::from_ratio(3, 4).conj(), Scalar::from_ratio(3, 4));
        let z = Scalar::gaussian(int(1), int(2));
        assert_eq!(z.conj(), Scalar::gaussian(int(1), int(-2)));
    }

    #[test]
    fn mixing_downgrades_to_approximate() {
        let a = Scalar::from_ratio(1, 2);
        let b = Scalar::approx(Complex64::new(0.25, 0.0), 1e-9);
        let c = &a + &b;
        assert!(!c.is_exact());
        assert!(c.approx_eq(&Scalar::approx(Complex64::new(0.75, 0.0), 1e-9)));
    }

    #[test]
    fn rational_text_roundtrip() {
        assert_eq!(format_rational(&rat(6, -4)), "-3/2");
        assert_eq!(format_rational(&int(7)), "7");
        assert_eq!(parse_rational(" -3/2 ").unwrap(), rat(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn json_encodings() {
        let z = Scalar::gaussian(rat(1, 2), rat(-3, 4));
        let js = serde_json::to_string(&z).unwrap();
        assert_eq!(js, r#"{"re":"1/2","im":"-3/4"}"#);
        assert_eq!(serde_json::from_str::<Scalar>(&js).unwrap(), z);
        assert_eq!(serde_json::to_string(&Scalar::from_ratio(5, 6)).unwrap(), r#""5/6""#);
        let a: Scalar = serde_json::from_str(r#"{"re":0.6,"im":0.8}"#).unwrap();
        assert!(!a.is_exact());
    }

    fn small_gauss() -> impl Strategy<Value = Scalar> {
        (-20i64..20, 1i64..9, -20i64..20, 1i64..9)
            .prop_map(|(a, b, c, d)| Scalar::gaussian(rat(a, b), rat(c, d)))
    }

    proptest! {
        #[test]
        fn exact_ring_axioms(a in small_gauss(), b in small_gauss(), c in small_gauss()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn conj_is_involutive_automorphism(a in small_gauss(), b in small_gauss()) {
            prop_assert_eq!(a.conj().conj(), a.clone());
            prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
            prop_assert_eq!((&a + &b).conj(), &a.conj() + &b.conj());
        }

        #[test]
        fn inverse_and_normalization(a in small_gauss()) {
            if let Ok(inv) = a.inv() {
                prop_assert_eq!(&a * &inv, Scalar::one());
                let g = inv.as_exact().unwrap();
                use num_integer::Integer;
                prop_assert!(g.re.numer().gcd(g.re.denom()).is_one());
                prop_assert!(g.re.denom() > &BigInt::zero());
            } else {
                prop_assert!(a.is_zero());
            }
        }
    }
}
