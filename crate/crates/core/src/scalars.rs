//! Exact coefficient arithmetic: Gaussian rationals and truncated formal
//! series in the deformation parameter `h` (written `ħ` in reports).
//!
//! All arithmetic is exact; there is no floating point anywhere in this
//! crate. Series live in the Artinian ring k[ħ]/(ħ^{N+1}) over k = ℚ(i),
//! optionally extended by a single pole order in ħ.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

/// A Gaussian rational: `re + im·i` with `i² = −1`.
///
/// `BigRational` keeps fractions reduced with positive denominators, which
/// is exactly the normal form the serialization layer requires.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    pub re: BigRational,
    pub im: BigRational,
}

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn one() -> Self {
        ExactScalar { re: BigRational::one(), im: BigRational::zero() }
    }

    /// The formal imaginary unit √−1.
    pub fn i() -> Self {
        ExactScalar { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn from_int(n: i64) -> Self {
        ExactScalar { re: BigRational::from_integer(BigInt::from(n)), im: BigRational::zero() }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        ExactScalar {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn from_rational(re: BigRational) -> Self {
        ExactScalar { re, im: BigRational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self) -> Result<ExactScalar, Error> {
        if self.is_zero() {
            return Err(Error::NotInvertible("division by zero scalar".into()));
        }
        // 1/(a+bi) = (a-bi)/(a²+b²)
        let norm = &self.re * &self.re + &self.im * &self.im;
        Ok(ExactScalar { re: &self.re / &norm, im: -(&self.im / &norm) })
    }

    pub fn scale_int(&self, n: i64) -> ExactScalar {
        let f = BigRational::from_integer(BigInt::from(n));
        ExactScalar { re: &self.re * &f, im: &self.im * &f }
    }

    pub fn conj(&self) -> ExactScalar {
        ExactScalar { re: self.re.clone(), im: -self.im.clone() }
    }
}

impl Add for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl AddAssign<&ExactScalar> for ExactScalar {
    fn add_assign(&mut self, rhs: &ExactScalar) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", rational_to_string(&self.re))
        } else if self.re.is_zero() {
            write!(f, "{}*i", rational_to_string(&self.im))
        } else {
            write!(f, "{}+{}*i", rational_to_string(&self.re), rational_to_string(&self.im))
        }
    }
}

/// Render a rational as `p` or `p/q` with `q > 0`.
pub fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Strict parser for the `p` / `p/q` wire format.
///
/// Rejects unreduced fractions and non-positive denominators so that
/// parse∘serialize is the identity byte-for-byte.
pub fn rational_from_string(s: &str) -> Result<BigRational, Error> {
    let bad = |m: &str| Error::Parse(format!("invalid rational {s:?}: {m}"));
    let (num, den) = match s.split_once('/') {
        None => (s, "1"),
        Some((n, d)) => (n, d),
    };
    let num = BigInt::from_str(num.trim()).map_err(|_| bad("bad numerator"))?;
    let den = BigInt::from_str(den.trim()).map_err(|_| bad("bad denominator"))?;
    if den <= BigInt::zero() {
        return Err(bad("denominator must be positive"));
    }
    if num.gcd(&den) != BigInt::one() {
        return Err(bad("fraction is not reduced"));
    }
    Ok(BigRational::new_raw(num, den))
}

trait GcdExt {
    fn gcd(&self, other: &BigInt) -> BigInt;
}

impl GcdExt for BigInt {
    fn gcd(&self, other: &BigInt) -> BigInt {
        num_integer::Integer::gcd(self, other)
    }
}

#[derive(Serialize, Deserialize)]
struct ScalarWire {
    re: String,
    im: String,
}

impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ScalarWire { re: rational_to_string(&self.re), im: rational_to_string(&self.im) }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = ScalarWire::deserialize(d)?;
        Ok(ExactScalar {
            re: rational_from_string(&w.re).map_err(D::Error::custom)?,
            im: rational_from_string(&w.im).map_err(D::Error::custom)?,
        })
    }
}

/// Truncated formal series in ħ over ℚ(i): an element of
/// k[ħ]/(ħ^{N+1}), or its Laurent extension when `pole > 0`.
///
/// Coefficients are indexed from `−pole` to `trunc` inclusive. Every
/// operation truncates at ħ^{N+1}; mixing different truncation orders is a
/// usage error and panics.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ArtinianSeries {
    pole: u32,
    trunc: i64,
    /// coefficient of ħ^{-pole+k} at index k; length = pole + trunc + 1
    coeffs: Vec<ExactScalar>,
}

impl ArtinianSeries {
    pub fn zero(trunc: i64) -> Self {
        assert!(trunc >= 0, "truncation order must be non-negative");
        ArtinianSeries {
            pole: 0,
            trunc,
            coeffs: vec![ExactScalar::zero(); (trunc + 1) as usize],
        }
    }

    pub fn one(trunc: i64) -> Self {
        let mut s = Self::zero(trunc);
        s.coeffs[0] = ExactScalar::one();
        s
    }

    pub fn constant(c: ExactScalar, trunc: i64) -> Self {
        let mut s = Self::zero(trunc);
        s.coeffs[0] = c;
        s
    }

    /// The monomial c·ħ^k (k may be negative, giving a pole).
    pub fn monomial(c: ExactScalar, k: i64, trunc: i64) -> Self {
        assert!(trunc >= 0);
        let pole = if k < 0 { (-k) as u32 } else { 0 };
        let mut s = ArtinianSeries {
            pole,
            trunc,
            coeffs: vec![ExactScalar::zero(); (pole as i64 + trunc + 1) as usize],
        };
        if k <= trunc {
            let idx = (k + pole as i64) as usize;
            s.coeffs[idx] = c;
        }
        s
    }

    pub fn from_coeffs(pole: u32, trunc: i64, coeffs: Vec<ExactScalar>) -> Result<Self, Error> {
        if coeffs.len() as i64 != pole as i64 + trunc + 1 {
            return Err(Error::Parse(format!(
                "series coefficient count {} does not match pole {} and truncation {}",
                coeffs.len(),
                pole,
                trunc
            )));
        }
        Ok(ArtinianSeries { pole, trunc, coeffs })
    }

    pub fn pole_order(&self) -> u32 {
        self.pole
    }

    pub fn truncation_order(&self) -> i64 {
        self.trunc
    }

    /// Coefficient of ħ^k (zero outside the stored window).
    pub fn coeff(&self, k: i64) -> ExactScalar {
        let idx = k + self.pole as i64;
        if idx < 0 || idx >= self.coeffs.len() as i64 {
            ExactScalar::zero()
        } else {
            self.coeffs[idx as usize].clone()
        }
    }

    pub fn set_coeff(&mut self, k: i64, c: ExactScalar) {
        assert!(k <= self.trunc, "coefficient index beyond truncation");
        if k < -(self.pole as i64) {
            // grow the pole window
            let extra = (-(k) - self.pole as i64) as usize;
            let mut v = vec![ExactScalar::zero(); extra];
            v.extend(self.coeffs.drain(..));
            self.coeffs = v;
            self.pole = (-k) as u32;
        }
        let idx = (k + self.pole as i64) as usize;
        self.coeffs[idx] = c;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// True iff the element lies in the maximal ideal 𝔪 = (ħ):
    /// no pole contribution and vanishing ħ⁰ coefficient.
    pub fn in_maximal_ideal(&self) -> bool {
        (-(self.pole as i64)..=0).all(|k| self.coeff(k).is_zero())
    }

    /// Drop an unused pole window and normalize storage. Values compare
    /// equal through `eq_value` regardless of window, but canonical storage
    /// keeps serializations deterministic.
    pub fn normalize(mut self) -> Self {
        while self.pole > 0 && self.coeffs.first().map(|c| c.is_zero()).unwrap_or(false) {
            self.coeffs.remove(0);
            self.pole -= 1;
        }
        self
    }

    /// Value equality: same truncation order and identical coefficients,
    /// ignoring how wide the stored pole window is.
    pub fn eq_value(&self, other: &ArtinianSeries) -> bool {
        if self.trunc != other.trunc {
            return false;
        }
        let lo = -(self.pole.max(other.pole) as i64);
        (lo..=self.trunc).all(|k| self.coeff(k) == other.coeff(k))
    }

    fn check_compatible(&self, other: &ArtinianSeries) {
        assert_eq!(
            self.trunc, other.trunc,
            "mixed truncation orders ({} vs {}) are rejected",
            self.trunc, other.trunc
        );
    }

    pub fn add(&self, other: &ArtinianSeries) -> ArtinianSeries {
        self.check_compatible(other);
        let pole = self.pole.max(other.pole);
        let mut out = ArtinianSeries {
            pole,
            trunc: self.trunc,
            coeffs: vec![ExactScalar::zero(); (pole as i64 + self.trunc + 1) as usize],
        };
        for k in -(pole as i64)..=self.trunc {
            out.coeffs[(k + pole as i64) as usize] = &self.coeff(k) + &other.coeff(k);
        }
        out.normalize()
    }

    pub fn sub(&self, other: &ArtinianSeries) -> ArtinianSeries {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ArtinianSeries {
        ArtinianSeries {
            pole: self.pole,
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// Product truncated at ħ^{N+1}; pole orders add.
    pub fn mul(&self, other: &ArtinianSeries) -> ArtinianSeries {
        self.check_compatible(other);
        let pole = self.pole + other.pole;
        let mut out = ArtinianSeries {
            pole,
            trunc: self.trunc,
            coeffs: vec![ExactScalar::zero(); (pole as i64 + self.trunc + 1) as usize],
        };
        for (ia, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let ka = ia as i64 - self.pole as i64;
            for (ib, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let kb = ib as i64 - other.pole as i64;
                let k = ka + kb;
                if k > self.trunc {
                    continue;
                }
                let idx = (k + pole as i64) as usize;
                let prod = a * b;
                out.coeffs[idx] += &prod;
            }
        }
        out.normalize()
    }

    pub fn scale(&self, c: &ExactScalar) -> ArtinianSeries {
        ArtinianSeries {
            pole: self.pole,
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Multiply by ħ^k (k may be negative; introduces a pole).
    pub fn shift(&self, k: i64) -> ArtinianSeries {
        let mono = ArtinianSeries::monomial(ExactScalar::one(), k, self.trunc);
        self.mul(&mono)
    }

    /// Exact inverse in the truncated ring.
    ///
    /// The element is written ħ^v·(unit) at its valuation v; the unit part
    /// is inverted by the terminating geometric series. A zero leading
    /// coefficient across the whole window means the element is not
    /// invertible.
    pub fn invert(&self) -> Result<ArtinianSeries, Error> {
        let s = self.clone().normalize();
        let lead_k = (-(s.pole as i64)..=s.trunc)
            .find(|k| !s.coeff(*k).is_zero())
            .ok_or_else(|| Error::NotInvertible("leading coefficient is zero".into()))?;
        let lead = s.coeff(lead_k);
        // a = lead·ħ^l (1 + u) with u in 𝔪; 1/a = ħ^{-l}/lead · Σ (−u)^k.
        let lead_inv = lead.inv()?;
        let unit_part = s.shift(-lead_k).scale(&lead_inv); // 1 + u
        let u = unit_part.sub(&ArtinianSeries::one(s.trunc));
        debug_assert!(u.in_maximal_ideal());
        let mut geom = ArtinianSeries::one(s.trunc);
        let mut term = ArtinianSeries::one(s.trunc);
        for _ in 0..=s.trunc {
            term = term.mul(&u).neg();
            if term.is_zero() {
                break;
            }
            geom = geom.add(&term);
        }
        Ok(geom.scale(&lead_inv).shift(-lead_k))
    }

    /// Exponential of an element of the maximal ideal (a finite sum).
    pub fn exp(&self) -> Result<ArtinianSeries, Error> {
        if !self.in_maximal_ideal() {
            return Err(Error::Domain("exp requires an argument in the maximal ideal".into()));
        }
        let mut out = ArtinianSeries::one(self.trunc);
        let mut term = ArtinianSeries::one(self.trunc);
        for k in 1..=(self.trunc + 1) {
            term = term.mul(self);
            if term.is_zero() {
                break;
            }
            out = out.add(&term.scale(&ExactScalar::from_ratio(1, factorial(k))));
        }
        Ok(out)
    }

    /// Logarithm of 1 + 𝔪, exact inverse of `exp`.
    pub fn log(&self) -> Result<ArtinianSeries, Error> {
        let u = self.sub(&ArtinianSeries::one(self.trunc));
        if !u.in_maximal_ideal() {
            return Err(Error::Domain("log requires an argument in 1 + 𝔪".into()));
        }
        let mut out = ArtinianSeries::zero(self.trunc);
        let mut term = ArtinianSeries::one(self.trunc);
        for k in 1..=(self.trunc + 1) {
            term = term.mul(&u);
            if term.is_zero() {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            out = out.add(&term.scale(&ExactScalar::from_ratio(sign, k)));
        }
        Ok(out)
    }
}

fn factorial(k: i64) -> i64 {
    (1..=k).product::<i64>().max(1)
}

impl fmt::Debug for ArtinianSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = i as i64 - self.pole as i64;
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})h")?,
                _ => write!(f, "({c})h^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " mod h^{}", self.trunc + 1)
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesWire {
    pole: u32,
    trunc: i64,
    coeffs: Vec<ExactScalar>,
}

impl Serialize for ArtinianSeries {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let norm = self.clone().normalize();
        SeriesWire { pole: norm.pole, trunc: norm.trunc, coeffs: norm.coeffs }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ArtinianSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = SeriesWire::deserialize(d)?;
        if w.trunc < 0 {
            return Err(D::Error::custom("truncation order must be non-negative"));
        }
        ArtinianSeries::from_coeffs(w.pole, w.trunc, w.coeffs).map_err(D::Error::custom)
    }
}
