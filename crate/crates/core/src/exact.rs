//! Exact scalars: canonical rationals, closed rational intervals, grid rounding
//! and certified enclosures of the few irrational constants the proof needs.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid interval: lo > hi")]
    InvalidInterval,
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
    #[error("remainder bound not finite: need x < terms + 2")]
    RemainderNotFinite,
}

pub(crate) fn fdiv(n: &Integer, d: &Integer) -> Integer {
    <(Integer, Integer)>::from(n.div_rem_floor_ref(d)).0
}

pub(crate) fn cdiv(n: &Integer, d: &Integer) -> Integer {
    <(Integer, Integer)>::from(n.div_rem_ceil_ref(d)).0
}

fn ten_pow(d: u32) -> Integer {
    thread_local! {
        static CACHE: std::cell::RefCell<Vec<Integer>> = const { std::cell::RefCell::new(Vec::new()) };
    }
    CACHE.with(|c| {
        let mut c = c.borrow_mut();
        while c.len() <= d as usize {
            let n = c.len() as u32;
            c.push(Integer::from(Integer::u_pow_u(10, n)));
        }
        c[d as usize].clone()
    })
}

/// Arbitrary-precision rational in lowest terms with a positive denominator.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(Rational);

impl Rat {
    pub fn zero() -> Rat {
        Rat(Rational::new())
    }

    pub fn one() -> Rat {
        Rat(Rational::from(1))
    }

    pub fn int(n: i64) -> Rat {
        Rat(Rational::from(n))
    }

    /// `n/d`; panics when `d == 0` (use [`Rat::try_new`] for untrusted input).
    pub fn frac(n: i64, d: i64) -> Rat {
        assert!(d != 0, "zero denominator");
        Rat(Rational::from((n, d)))
    }

    pub fn try_new(n: Integer, d: Integer) -> Result<Rat, ExactError> {
        if d == 0 {
            return Err(ExactError::DivisionByZero);
        }
        Ok(Rat(Rational::from((n, d))))
    }

    pub fn from_integer(n: Integer) -> Rat {
        Rat(Rational::from(n))
    }

    /// 10^k for any integer k.
    pub fn pow10(k: i32) -> Rat {
        let p = Integer::from(Integer::u_pow_u(10, k.unsigned_abs()));
        if k >= 0 {
            Rat(Rational::from(p))
        } else {
            Rat(Rational::from((Integer::from(1), p)))
        }
    }

    pub fn inner(&self) -> &Rational {
        &self.0
    }

    pub fn numer(&self) -> &Integer {
        self.0.numer()
    }

    pub fn denom(&self) -> &Integer {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.cmp0() == Ordering::Equal
    }

    pub fn signum(&self) -> i32 {
        match self.0.cmp0() {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn abs(&self) -> Rat {
        Rat(Rational::from(self.0.abs_ref()))
    }

    pub fn recip(&self) -> Result<Rat, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(Rat(Rational::from(self.0.recip_ref())))
    }

    pub fn checked_div(&self, other: &Rat) -> Result<Rat, ExactError> {
        if other.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(Rat(Rational::from(&self.0 / &other.0)))
    }

    /// Exact integer power; negative exponents of zero are an error.
    pub fn pow(&self, e: i32) -> Result<Rat, ExactError> {
        if e < 0 && self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(Rat(Rational::from((&self.0).pow(e))))
    }

    pub fn floor(&self) -> Integer {
        fdiv(self.0.numer(), self.0.denom())
    }

    pub fn ceil(&self) -> Integer {
        cdiv(self.0.numer(), self.0.denom())
    }

    /// Largest multiple of 10^-d not above self.
    pub fn floor_digits(&self, d: u32) -> Rat {
        let scale = ten_pow(d);
        let n = Integer::from(&scale * self.0.numer());
        let q = fdiv(&n, self.0.denom());
        Rat(Rational::from((q, scale)))
    }

    /// Smallest multiple of 10^-d not below self.
    pub fn ceil_digits(&self, d: u32) -> Rat {
        let scale = ten_pow(d);
        let n = Integer::from(&scale * self.0.numer());
        let q = cdiv(&n, self.0.denom());
        Rat(Rational::from((q, scale)))
    }

    pub fn min(self, other: Rat) -> Rat {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Rat) -> Rat {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Lossy, for display and diagnostics only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// Decimal rendering truncated toward zero to `digits` places, for humans.
    pub fn to_decimal(&self, digits: u32) -> String {
        let neg = self.signum() < 0;
        let a = self.abs();
        let scaled = a.floor_digits(digits);
        let scale = Integer::from(Integer::u_pow_u(10, digits));
        let n = Integer::from(scaled.numer() * &scale) / scaled.denom();
        let s = n.to_string();
        let s = format!("{:0>width$}", s, width = digits as usize + 1);
        let (ip, fp) = s.split_at(s.len() - digits as usize);
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{ip}")
        } else {
            format!("{sign}{ip}.{fp}")
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.0.denom() == 1 {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = ExactError;

    /// Accepts `p/q` or `p`; decimals are rejected on purpose.
    fn from_str(s: &str) -> Result<Rat, ExactError> {
        let t = s.trim();
        let bad = || ExactError::Parse(s.to_string());
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n: Integer = n.parse().map_err(|_| bad())?;
        let d: Integer = d.parse().map_err(|_| bad())?;
        Rat::try_new(n, d)
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Rat {
        Rat::int(n)
    }
}

impl From<Integer> for Rat {
    fn from(n: Integer) -> Rat {
        Rat::from_integer(n)
    }
}

macro_rules! rat_binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr<&Rat> for &Rat {
            type Output = Rat;
            fn $m(self, o: &Rat) -> Rat {
                Rat(Rational::from(&self.0 $op &o.0))
            }
        }
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $m(self, o: Rat) -> Rat {
                Rat(self.0 $op o.0)
            }
        }
        impl $tr<&Rat> for Rat {
            type Output = Rat;
            fn $m(self, o: &Rat) -> Rat {
                Rat(self.0 $op &o.0)
            }
        }
        impl $tr<Rat> for &Rat {
            type Output = Rat;
            fn $m(self, o: Rat) -> Rat {
                Rat(Rational::from(&self.0 $op &o.0))
            }
        }
    };
}

rat_binop!(Add, add, +);
rat_binop!(Sub, sub, -);
rat_binop!(Mul, mul, *);

impl Div<&Rat> for &Rat {
    type Output = Rat;
    /// Panics on a zero divisor; see [`Rat::checked_div`].
    fn div(self, o: &Rat) -> Rat {
        self.checked_div(o).expect("division by zero")
    }
}

impl Div<Rat> for Rat {
    type Output = Rat;
    fn div(self, o: Rat) -> Rat {
        (&self).div(&o)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(Rational::from(-&self.0))
    }
}

/// Closed interval `[lo, hi]` with rational endpoints.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ival {
    lo: Rat,
    hi: Rat,
}

impl Ival {
    pub fn new(lo: Rat, hi: Rat) -> Result<Ival, ExactError> {
        if lo > hi {
            return Err(ExactError::InvalidInterval);
        }
        Ok(Ival { lo, hi })
    }

    /// Builds from two endpoints in either order.
    pub fn hull_of(a: Rat, b: Rat) -> Ival {
        if a <= b {
            Ival { lo: a, hi: b }
        } else {
            Ival { lo: b, hi: a }
        }
    }

    pub fn point(x: Rat) -> Ival {
        Ival { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Ival {
        Ival::point(Rat::zero())
    }

    pub fn frac(ln: i64, ld: i64, hn: i64, hd: i64) -> Ival {
        Ival::new(Rat::frac(ln, ld), Rat::frac(hn, hd)).expect("ordered endpoints")
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn into_bounds(self) -> (Rat, Rat) {
        (self.lo, self.hi)
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rat {
        (&self.lo + &self.hi) * Rat::frac(1, 2)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() <= 0 && self.hi.signum() >= 0
    }

    pub fn subset_of(&self, other: &Ival) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Strictly inside the open interval `(other.lo, other.hi)`.
    pub fn strictly_inside(&self, other: &Ival) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    /// max |x| over the interval.
    pub fn mag(&self) -> Rat {
        self.lo.abs().max(self.hi.abs())
    }

    /// min |x| over the interval.
    pub fn mig(&self) -> Rat {
        if self.contains_zero() {
            Rat::zero()
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn hull(&self, other: &Ival) -> Ival {
        Ival {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn intersect(&self, other: &Ival) -> Option<Ival> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        if lo <= hi {
            Some(Ival { lo, hi })
        } else {
            None
        }
    }

    /// Shrinks by `e` on both sides; `None` if nothing is left.
    pub fn shrink(&self, e: &Rat) -> Option<Ival> {
        let lo = &self.lo + e;
        let hi = &self.hi - e;
        if lo <= hi {
            Some(Ival { lo, hi })
        } else {
            None
        }
    }

    pub fn inflate(&self, e: &Rat) -> Ival {
        Ival { lo: &self.lo - e, hi: &self.hi + e }
    }

    pub fn split(&self) -> (Ival, Ival) {
        let m = self.mid();
        (
            Ival { lo: self.lo.clone(), hi: m.clone() },
            Ival { lo: m, hi: self.hi.clone() },
        )
    }

    /// Outward rounding of both endpoints to multiples of 10^-d.
    pub fn round_out(&self, d: u32) -> Ival {
        Ival { lo: self.lo.floor_digits(d), hi: self.hi.ceil_digits(d) }
    }

    pub fn add(&self, o: &Ival) -> Ival {
        Ival { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Ival) -> Ival {
        Ival { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn neg(&self) -> Ival {
        Ival { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn scale(&self, c: &Rat) -> Ival {
        Ival::hull_of(&self.lo * c, &self.hi * c)
    }

    pub fn add_rat(&self, c: &Rat) -> Ival {
        Ival { lo: &self.lo + c, hi: &self.hi + c }
    }

    pub fn mul(&self, o: &Ival) -> Ival {
        if self.is_point() {
            return o.scale(&self.lo);
        }
        if o.is_point() {
            return self.scale(&o.lo);
        }
        if self.lo.signum() >= 0 && o.lo.signum() >= 0 {
            return Ival { lo: &self.lo * &o.lo, hi: &self.hi * &o.hi };
        }
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let mut lo = c[0].clone();
        let mut hi = c[0].clone();
        for v in &c[1..] {
            if *v < lo {
                lo = v.clone();
            }
            if *v > hi {
                hi = v.clone();
            }
        }
        Ival { lo, hi }
    }

    pub fn recip(&self) -> Result<Ival, ExactError> {
        if self.contains_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(Ival { lo: self.hi.recip()?, hi: self.lo.recip()? })
    }

    pub fn div(&self, o: &Ival) -> Result<Ival, ExactError> {
        Ok(self.mul(&o.recip()?))
    }

    /// Integer power with the tight even-power rule.
    pub fn powi(&self, e: i32) -> Result<Ival, ExactError> {
        if e < 0 {
            return self.recip()?.powi(-e);
        }
        if e == 0 {
            return Ok(Ival::point(Rat::one()));
        }
        let pl = self.lo.pow(e)?;
        let ph = self.hi.pow(e)?;
        if e % 2 == 1 || self.lo.signum() >= 0 {
            return Ok(Ival::hull_of(pl, ph));
        }
        if self.hi.signum() <= 0 {
            return Ok(Ival { lo: ph, hi: pl });
        }
        Ok(Ival { lo: Rat::zero(), hi: pl.max(ph) })
    }

    pub fn cmp_zero(&self) -> Option<Ordering> {
        if self.lo.signum() > 0 {
            Some(Ordering::Greater)
        } else if self.hi.signum() < 0 {
            Some(Ordering::Less)
        } else if self.is_point() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }
}

impl fmt::Display for Ival {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl fmt::Debug for Ival {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Ival {
    type Err = ExactError;
    fn from_str(s: &str) -> Result<Ival, ExactError> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| ExactError::Parse(s.to_string()))?;
        let (a, b) = inner.split_once(',').ok_or_else(|| ExactError::Parse(s.to_string()))?;
        Ival::new(a.parse()?, b.parse()?)
    }
}

impl Serialize for Ival {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Ival {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Ival, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundMode {
    Floor,
    Nearest,
}

/// The grid `H·Z` with `H = 10^-q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub q: u32,
    pub mode: RoundMode,
}

impl GridSpec {
    pub fn floor(q: u32) -> GridSpec {
        GridSpec { q, mode: RoundMode::Floor }
    }

    pub fn nearest(q: u32) -> GridSpec {
        GridSpec { q, mode: RoundMode::Nearest }
    }

    pub fn spacing(&self) -> Rat {
        Rat::pow10(-(self.q as i32))
    }

    pub fn is_on_grid(&self, x: &Rat) -> bool {
        let s = x * Rat::pow10(self.q as i32);
        *s.denom() == 1
    }
}

/// `H·floor(x/H)`.
pub fn floor_to_grid(x: &Rat, grid: GridSpec) -> Rat {
    x.floor_digits(grid.q)
}

/// Grid point nearest to the midpoint of `enc`, with a certificate that it is
/// within `H` of every point of `enc`.
pub fn nearest_grid_in(enc: &Ival, grid: GridSpec) -> (Rat, bool) {
    let h = grid.spacing();
    let m = enc.mid();
    let scaled = &m / &h + Rat::frac(1, 2);
    let r = Rat::from_integer(scaled.floor()) * &h;
    let d = (&r - enc.lo()).abs().max((&r - enc.hi()).abs());
    (r.clone(), d <= h)
}

/// The common floor grid point of every element of `enc`, if there is one.
pub fn certified_floor(enc: &Ival, grid: GridSpec) -> Option<Rat> {
    let a = floor_to_grid(enc.lo(), grid);
    let b = floor_to_grid(enc.hi(), grid);
    if a == b {
        Some(a)
    } else {
        None
    }
}

fn digits_for_width(width: &Rat) -> u32 {
    let mut d = 0u32;
    while Rat::pow10(-(d as i32)) > *width {
        d += 1;
    }
    d
}

/// Enclosure of `sqrt(r)` via integer square roots on the 10^-d grid.
pub fn sqrt_enclosure(r: &Rat, width: &Rat) -> Result<Ival, ExactError> {
    if r.signum() < 0 {
        return Err(ExactError::Domain(format!("sqrt of negative {r}")));
    }
    if width.signum() <= 0 {
        return Err(ExactError::Domain("width must be positive".into()));
    }
    if r.numer().is_perfect_square() && r.denom().is_perfect_square() {
        let n = Integer::from(r.numer().sqrt_ref());
        let d = Integer::from(r.denom().sqrt_ref());
        return Ok(Ival::point(Rat::try_new(n, d)?));
    }
    let d = digits_for_width(width);
    Ok(sqrt_digits(r, d))
}

/// `[floor(sqrt(r)·10^d), that + 1]·10^-d` for a non-square `r ≥ 0`.
pub(crate) fn sqrt_digits(r: &Rat, d: u32) -> Ival {
    let scale2 = Integer::from(Integer::u_pow_u(10, 2 * d));
    let n = Integer::from(&scale2 * r.numer());
    let n = fdiv(&n, r.denom());
    let s = n.sqrt();
    let scale = Integer::from(Integer::u_pow_u(10, d));
    let lo = Rat(Rational::from((s.clone(), scale.clone())));
    let hi = Rat(Rational::from((s + 1u32, scale)));
    if &lo * &lo == *r {
        Ival::point(lo)
    } else {
        Ival { lo, hi }
    }
}

/// Partial sum of the exponential series through `x^terms/terms!`.
pub fn exp_partial_sum(x: &Rat, terms: u32) -> Rat {
    let mut sum = Rat::one();
    let mut t = Rat::one();
    for i in 1..=terms {
        t = &t * x * Rat::frac(1, i as i64);
        sum = sum + &t;
    }
    sum
}

/// Rational majorant of `e^x` for `x ≥ 0`: the partial sum plus the tail bound
/// `x^(n+1)/(n+1)! · (n+2)/(n+2-x)`.
pub fn exp_upper_bound(x: &Rat, terms: u32) -> Result<Rat, ExactError> {
    if x.signum() < 0 {
        return Err(ExactError::Domain("exp_upper_bound needs x >= 0".into()));
    }
    let n2 = Rat::int(terms as i64 + 2);
    if *x >= n2 {
        return Err(ExactError::RemainderNotFinite);
    }
    let mut sum = Rat::one();
    let mut t = Rat::one();
    for i in 1..=terms {
        t = &t * x * Rat::frac(1, i as i64);
        sum = sum + &t;
    }
    let next = &t * x * Rat::frac(1, terms as i64 + 1);
    let tail = &next * &n2 / (&n2 - x);
    Ok(sum + tail)
}

/// Term count that keeps the exp tail comfortably finite and small.
pub fn exp_terms_for(x: &Rat) -> u32 {
    let c = x.ceil();
    let c = c.to_u32().unwrap_or(u32::MAX / 4);
    (3 * c + 40).max(40)
}

fn arctan_inv_bracket(k: u64, n: u32) -> (Rat, Rat) {
    // partial sums S_n and S_{n+1} of sum (-1)^j / ((2j+1) k^(2j+1)) bracket the limit
    let kk = Rat::int(k as i64);
    let k2 = &kk * &kk;
    let mut pw = kk.recip().expect("k > 0");
    let mut s = Rat::zero();
    let mut prev = Rat::zero();
    for j in 0..=n + 1 {
        prev = s.clone();
        let term = &pw * Rat::frac(1, 2 * j as i64 + 1);
        if j % 2 == 0 {
            s = s + term;
        } else {
            s = s - term;
        }
        pw = &pw / &k2;
    }
    if prev <= s {
        (prev, s)
    } else {
        (s, prev)
    }
}

/// Enclosure of π from Machin's formula `16 atan(1/5) - 4 atan(1/239)` with
/// alternating-series brackets.
pub fn pi_enclosure(width: &Rat) -> Result<Ival, ExactError> {
    if width.signum() <= 0 {
        return Err(ExactError::Domain("width must be positive".into()));
    }
    let mut n = 4u32;
    loop {
        let (a_lo, a_hi) = arctan_inv_bracket(5, n);
        let (b_lo, b_hi) = arctan_inv_bracket(239, n);
        let lo = Rat::int(16) * &a_lo - Rat::int(4) * &b_hi;
        let hi = Rat::int(16) * &a_hi - Rat::int(4) * &b_lo;
        let iv = Ival::new(lo, hi)?;
        if iv.width() <= *width {
            return Ok(iv);
        }
        n *= 2;
    }
}

/// `((p + L q0)/L)(1+L)^k - p/L`, the k-th iterate of `q -> (1+L) q + p`.
pub fn geometric_recurrence_closed_form(p: &Rat, l: &Rat, q0: &Rat, k: u32) -> Result<Rat, ExactError> {
    if l.is_zero() {
        return Err(ExactError::Domain("L must be nonzero".into()));
    }
    let g = (Rat::one() + l).pow(k as i32)?;
    Ok((p + l * q0) / l.clone() * g - p / l)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(r("6/4").to_string(), "3/2");
        assert_eq!(r("-10/5").to_string(), "-2");
        assert!("1.5".parse::<Rat>().is_err());
        assert!("1/0".parse::<Rat>().is_err());
        assert_eq!(r("-1/3").to_decimal(4), "-0.3333");
    }

    #[test]
    fn floor_grid_examples() {
        let g6 = GridSpec::floor(6);
        assert_eq!(floor_to_grid(&r("121/240"), g6), r("252083/500000"));
        assert_eq!(floor_to_grid(&Rat::zero(), g6), Rat::zero());
        assert_eq!(floor_to_grid(&r("-1/3"), GridSpec::floor(2)), r("-34/100"));
    }

    #[test]
    fn nearest_examples() {
        let g = GridSpec::nearest(6);
        let (z, ok) = nearest_grid_in(&Ival::point(r("1/2")), g);
        assert!(ok);
        assert_eq!(z, r("1/2"));
        let enc = Ival::new(r("5041660/10000000"), r("5041670/10000000")).unwrap();
        let (z, ok) = nearest_grid_in(&enc, g);
        assert!(ok);
        assert!(z == r("504166/1000000") || z == r("504167/1000000"));
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(sqrt_enclosure(&Rat::int(4), &r("1/1000")).unwrap(), Ival::point(Rat::int(2)));
        assert_eq!(sqrt_enclosure(&Rat::zero(), &r("1/7")).unwrap(), Ival::zero());
        let s = sqrt_enclosure(&Rat::int(2), &r("1/100")).unwrap();
        assert!(s.lo() * s.lo() <= Rat::int(2) && Rat::int(2) <= s.hi() * s.hi());
        assert!(s.width() <= r("1/100"));
        assert!(sqrt_enclosure(&Rat::int(-1), &r("1/10")).is_err());
    }

    #[test]
    fn exp_examples() {
        assert_eq!(exp_upper_bound(&Rat::zero(), 5).unwrap(), Rat::one());
        let e = exp_upper_bound(&Rat::one(), 20).unwrap();
        assert!(r("2718281828/1000000000") <= e && e <= r("2718281829/1000000000"));
        assert!(exp_upper_bound(&Rat::int(10), 5).is_err());
    }

    #[test]
    fn pi_examples() {
        let p = pi_enclosure(&r("1/100")).unwrap();
        assert!(p.subset_of(&Ival::new(r("314/100"), r("315/100")).unwrap()));
        let p = pi_enclosure(&Rat::pow10(-12)).unwrap();
        assert!(p.lo() >= &r("3141592653589/1000000000000"));
        assert!(p.hi() <= &r("3141592653590/1000000000000"));
    }

    #[test]
    fn recurrence_examples() {
        let v = geometric_recurrence_closed_form(&Rat::one(), &Rat::one(), &Rat::zero(), 3).unwrap();
        assert_eq!(v, Rat::int(7));
        let l = r("2/7");
        let v = geometric_recurrence_closed_form(&Rat::zero(), &l, &Rat::int(5), 2).unwrap();
        assert_eq!(v, Rat::int(5) * (Rat::one() + &l).pow(2).unwrap());
        assert!(geometric_recurrence_closed_form(&Rat::one(), &Rat::zero(), &Rat::zero(), 1).is_err());
    }

    #[test]
    fn interval_ops() {
        let a = Ival::new(r("-2"), r("3")).unwrap();
        assert_eq!(a.powi(2).unwrap(), Ival::new(Rat::zero(), Rat::int(9)).unwrap());
        assert!(a.recip().is_err());
        let b = Ival::new(r("1/2"), r("2")).unwrap();
        assert_eq!(b.powi(-1).unwrap(), b);
        assert_eq!(a.mul(&b), Ival::new(r("-4"), r("6")).unwrap());
        assert_eq!("[1/2, 3]".parse::<Ival>().unwrap().to_string(), "[1/2, 3]");
    }
}
