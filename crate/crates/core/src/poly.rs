//! Exact univariate polynomials over the rationals.
//!
//! Coefficients are stored in ascending degree order and every constructor
//! strips trailing zeros, so two polynomials are equal exactly when their
//! coefficient vectors are. The zero polynomial has no coefficients and no
//! degree.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// `n / d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"` or a plain decimal such as `"-0.8"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("cannot parse rational {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{whole}{frac}");
    let mut value = Rational::from_integer(all_digits.parse::<BigInt>().map_err(|_| bad())?);
    let scale = exponent - frac.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if negative { -value } else { value })
}

/// Univariate polynomial with exact rational coefficients, lowest degree first.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RatPoly {
    coeffs: Vec<Rational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The identity polynomial `x`.
    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.push(c);
        Self::new(coeffs)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    /// Monic product of `(x - r)` over the given roots.
    pub fn from_roots(roots: &[Rational]) -> Self {
        roots.iter().fold(Self::one(), |acc, r| {
            &acc * &Self::new(vec![-r.clone(), Rational::one()])
        })
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `x^k`; zero beyond the degree.
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    /// `None` for the zero polynomial (degree minus infinity).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RatPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplies by `x^k`.
    pub fn shift_mul_x(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        RatPoly { coeffs }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    /// `p(-x)`.
    pub fn reflect(&self) -> Self {
        RatPoly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { -c } else { c.clone() })
                .collect(),
        }
    }

    /// `p(x^2)`.
    pub fn compose_square(&self) -> Self {
        let mut coeffs = Vec::with_capacity(2 * self.coeffs.len());
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                coeffs.push(Rational::zero());
            }
            coeffs.push(c.clone());
        }
        Self::new(coeffs)
    }

    /// Coefficients of even index, as a polynomial in `x^2`: `[c0, c2, c4, ...]`.
    pub fn even_indexed(&self) -> Self {
        Self::new(self.coeffs.iter().step_by(2).cloned().collect())
    }

    /// Coefficients of odd index: `[c1, c3, ...]`.
    pub fn odd_indexed(&self) -> Self {
        Self::new(self.coeffs.iter().skip(1).step_by(2).cloned().collect())
    }

    pub fn div_rem(&self, divisor: &RatPoly) -> Result<(RatPoly, RatPoly)> {
        let d = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lead = divisor.coeffs[d].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![Rational::zero(); rem.len() - d];
        for k in (d..rem.len()).rev() {
            if rem[k].is_zero() {
                continue;
            }
            let q = &rem[k] / &lead;
            for (j, c) in divisor.coeffs.iter().enumerate() {
                rem[k - d + j] -= &q * c;
            }
            quot[k - d] = q;
        }
        rem.truncate(d);
        Ok((Self::new(quot), Self::new(rem)))
    }

    pub fn rem(&self, divisor: &RatPoly) -> Result<RatPoly> {
        Ok(self.div_rem(divisor)?.1)
    }

    /// Exact quotient; errors if the division leaves a remainder.
    pub fn div_exact(&self, divisor: &RatPoly) -> Result<RatPoly> {
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        // Gauss: primitive parts divide exactly over the integers
        let not_divisible = || Error::InvalidInput(format!("{self} is not divisible by {divisor}"));
        let q = IntPoly::from_rat(self)
            .div_exact(&IntPoly::from_rat(divisor))
            .ok_or_else(not_divisible)?;
        Ok(q.to_rat().scale(&(self.content() / divisor.content())))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lc) => self.scale(&lc.recip()),
        }
    }

    /// Positive rational `c` such that `self / c` has coprime integer coefficients.
    pub fn content(&self) -> Rational {
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in &self.coeffs {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        if num_gcd.is_zero() {
            return Rational::one();
        }
        Rational::new(num_gcd, den_lcm)
    }

    /// `self / content(self)`: integer coefficients, same signs.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&self.content().recip())
    }

    /// `p / gcd(p, p')`, normalized to its primitive part.
    pub fn squarefree_part(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial("squarefree_part"));
        }
        if self.is_constant() {
            return Ok(Self::one());
        }
        let g = gcd(self, &self.derivative())?;
        Ok(self.div_exact(&g)?.primitive_part())
    }

    /// Yun's square-free factorization: `p = c * prod(f_i^i)` with each `f_i`
    /// square-free and pairwise coprime. Only nonconstant factors are returned,
    /// paired with their multiplicity.
    pub fn squarefree_factors(&self) -> Result<Vec<(RatPoly, usize)>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial("squarefree_factors"));
        }
        let mut out = Vec::new();
        if self.is_constant() {
            return Ok(out);
        }
        let dp = self.derivative();
        let a0 = gcd(self, &dp)?;
        if a0.is_constant() {
            return Ok(vec![(self.primitive_part(), 1)]);
        }
        let mut b = self.div_exact(&a0)?;
        let mut c = dp.div_exact(&a0)?;
        let mut d = &c - &b.derivative();
        let mut i = 1;
        while !b.is_constant() {
            let a = gcd(&b, &d)?;
            if !a.is_constant() {
                out.push((a.primitive_part(), i));
            }
            b = b.div_exact(&a)?;
            c = d.div_exact(&a)?;
            d = &c - &b.derivative();
            i += 1;
        }
        Ok(out)
    }
}

/// Monic greatest common divisor, via the primitive remainder sequence over
/// the integers.
pub fn gcd(a: &RatPoly, b: &RatPoly) -> Result<RatPoly> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::GcdUndefined);
    }
    let (mut u, mut v) = (IntPoly::from_rat(a), IntPoly::from_rat(b));
    while !v.is_zero() {
        let (r, _) = u.prem(&v);
        u = v;
        v = r.primitive();
    }
    Ok(u.to_rat().monic())
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sep = if first {
                if c.is_negative() {
                    "-"
                } else {
                    ""
                }
            } else if c.is_negative() {
                " - "
            } else {
                " + "
            };
            first = false;
            let mag = c.abs();
            let unit = mag.is_one() && k > 0;
            let coef = if unit {
                String::new()
            } else if mag.is_integer() {
                mag.to_string()
            } else {
                format!("({mag})")
            };
            let star = if unit || k == 0 { "" } else { "*" };
            match k {
                0 => write!(f, "{sep}{coef}")?,
                1 => write!(f, "{sep}{coef}{star}x")?,
                _ => write!(f, "{sep}{coef}{star}x^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatPoly({self})")
    }
}

impl Add<&RatPoly> for &RatPoly {
    type Output = RatPoly;

    fn add(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new(
            (0..n)
                .map(|k| match (self.coeffs.get(k), rhs.coeffs.get(k)) {
                    (Some(a), Some(b)) => a + b,
                    (Some(a), None) | (None, Some(a)) => a.clone(),
                    (None, None) => unreachable!(),
                })
                .collect(),
        )
    }
}

impl Sub<&RatPoly> for &RatPoly {
    type Output = RatPoly;

    fn sub(self, rhs: &RatPoly) -> RatPoly {
        self + &(-rhs)
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;

    fn neg(self) -> RatPoly {
        RatPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul<&RatPoly> for &RatPoly {
    type Output = RatPoly;

    fn mul(self, rhs: &RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }
}

macro_rules! forward_owned_binop {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr<RatPoly> for RatPoly {
            type Output = RatPoly;
            fn $m(self, rhs: RatPoly) -> RatPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RatPoly> for RatPoly {
            type Output = RatPoly;
            fn $m(self, rhs: &RatPoly) -> RatPoly {
                (&self).$m(rhs)
            }
        }
    )*};
}

forward_owned_binop!(Add::add, Sub::sub, Mul::mul);

impl Neg for RatPoly {
    type Output = RatPoly;

    fn neg(self) -> RatPoly {
        -&self
    }
}

pub fn add(a: &RatPoly, b: &RatPoly) -> RatPoly {
    a + b
}

pub fn mul(a: &RatPoly, b: &RatPoly) -> RatPoly {
    a * b
}

pub fn scale(a: &RatPoly, c: &Rational) -> RatPoly {
    a.scale(c)
}

pub fn shift_mul_x(a: &RatPoly, k: usize) -> RatPoly {
    a.shift_mul_x(k)
}

pub fn derivative(p: &RatPoly) -> RatPoly {
    p.derivative()
}

/// Integer-coefficient copy of a polynomial used for fast exact sign
/// evaluation at rational points.
#[derive(Clone, Debug)]
pub(crate) struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub(crate) fn from_rat(p: &RatPoly) -> Self {
        let prim = p.primitive_part();
        IntPoly {
            coeffs: prim.coeffs.iter().map(|c| c.numer().clone()).collect(),
        }
    }

    fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn trim(mut self) -> Self {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        self
    }

    pub(crate) fn to_rat(&self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().cloned().map(Rational::from_integer).collect())
    }

    /// Divides out the positive gcd of the coefficients.
    fn primitive(self) -> Self {
        let g = self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if g.is_zero() || g.is_one() {
            return self;
        }
        IntPoly {
            coeffs: self.coeffs.into_iter().map(|c| c / &g).collect(),
        }
    }

    /// Pseudo-remainder: `r` with `lc(b)^e a = q b + r` and `deg r < deg b`,
    /// together with `e`.
    fn prem(&self, b: &IntPoly) -> (IntPoly, usize) {
        let db = b.degree();
        let lc = &b.coeffs[db];
        let mut r = self.clone();
        let mut e = 0;
        while !r.is_zero() && r.degree() >= db {
            let k = r.degree() - db;
            let lr = r.coeffs.last().expect("nonzero").clone();
            for c in r.coeffs.iter_mut() {
                *c *= lc;
            }
            for (j, c) in b.coeffs.iter().enumerate() {
                r.coeffs[k + j] -= &lr * c;
            }
            r = r.trim();
            e += 1;
        }
        (r, e)
    }

    /// Quotient when `b` divides `self` exactly over the integers.
    fn div_exact(&self, b: &IntPoly) -> Option<IntPoly> {
        if self.degree() < b.degree() {
            return None;
        }
        let db = b.degree();
        let lc = &b.coeffs[db];
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); r.len() - db];
        for k in (db..r.len()).rev() {
            if r[k].is_zero() {
                continue;
            }
            let (t, rest) = r[k].div_rem(lc);
            if !rest.is_zero() {
                return None;
            }
            for (j, c) in b.coeffs.iter().enumerate() {
                r[k - db + j] -= &t * c;
            }
            q[k - db] = t;
        }
        r[..db].iter().all(Zero::is_zero).then(|| IntPoly { coeffs: q }.trim())
    }

    /// Sign of `p(x)`, computed as the sign of `b^d p(a/b)` over the integers.
    pub(crate) fn sign_at(&self, x: &Rational) -> Ordering {
        if self.coeffs.is_empty() {
            return Ordering::Equal;
        }
        let (a, b) = (x.numer(), x.denom());
        if b.is_one() {
            let mut acc = BigInt::zero();
            for c in self.coeffs.iter().rev() {
                acc = acc * a + c;
            }
            return acc.sign_ordering();
        }
        let d = self.degree();
        let mut acc = self.coeffs[d].clone();
        let mut bpow = BigInt::one();
        for c in self.coeffs[..d].iter().rev() {
            bpow *= b;
            acc = acc * a + c * &bpow;
        }
        acc.sign_ordering()
    }

    /// Sign of `p(x)` as `x -> +inf` (`positive`) or `x -> -inf`.
    pub(crate) fn sign_at_infinity(&self, positive: bool) -> Ordering {
        match self.coeffs.last() {
            None => Ordering::Equal,
            Some(lc) => {
                let s = lc.sign_ordering();
                if !positive && self.degree() % 2 == 1 {
                    s.reverse()
                } else {
                    s
                }
            }
        }
    }
}

trait SignOrdering {
    fn sign_ordering(&self) -> Ordering;
}

impl SignOrdering for BigInt {
    fn sign_ordering(&self) -> Ordering {
        self.cmp(&BigInt::zero())
    }
}

/// Sturm sequence `p0 = p, p1 = p', p_{i+1} = -rem(p_{i-1}, p_i)`, each member
/// divided by its positive content.
#[derive(Clone, Debug)]
pub struct SturmChain {
    members: Vec<RatPoly>,
    evaluators: Vec<IntPoly>,
}

impl SturmChain {
    pub fn new(p: &RatPoly) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::ZeroPolynomial("sturm_chain"));
        }
        let mut evaluators = vec![IntPoly::from_rat(p)];
        let d = p.derivative();
        if !d.is_zero() {
            evaluators.push(IntPoly::from_rat(&d));
            loop {
                let n = evaluators.len();
                let b = &evaluators[n - 1];
                let (r, e) = evaluators[n - 2].prem(b);
                if r.is_zero() {
                    break;
                }
                // -rem(a, b) = -r / lc(b)^e, so the sign flips again when lc(b)^e < 0
                let flip = b.coeffs.last().expect("nonzero").is_negative() && e % 2 == 1;
                let r = if flip { r } else { IntPoly { coeffs: r.coeffs.into_iter().map(|c| -c).collect() } };
                evaluators.push(r.primitive());
            }
        }
        let members = evaluators.iter().map(IntPoly::to_rat).collect();
        Ok(SturmChain {
            members,
            evaluators,
        })
    }

    pub fn members(&self) -> &[RatPoly] {
        &self.members
    }

    pub fn into_members(self) -> Vec<RatPoly> {
        self.members
    }

    fn count_variations(signs: impl Iterator<Item = Ordering>) -> usize {
        let mut last = Ordering::Equal;
        let mut changes = 0;
        for s in signs {
            if s == Ordering::Equal {
                continue;
            }
            if last != Ordering::Equal && s != last {
                changes += 1;
            }
            last = s;
        }
        changes
    }

    /// Sign variations at `x`; `None` stands for an infinite endpoint whose
    /// direction is given by `positive`.
    pub fn variations_at(&self, x: Option<&Rational>, positive: bool) -> usize {
        match x {
            Some(x) => Self::count_variations(self.evaluators.iter().map(|e| e.sign_at(x))),
            None => Self::count_variations(
                self.evaluators.iter().map(|e| e.sign_at_infinity(positive)),
            ),
        }
    }

    /// Distinct real roots in the half-open interval `(lo, hi]`; `None` means
    /// an infinite endpoint. Exact for square-free chains.
    pub fn count(&self, lo: Option<&Rational>, hi: Option<&Rational>) -> usize {
        if let (Some(l), Some(h)) = (lo, hi) {
            if l >= h {
                return 0;
            }
        }
        let vl = self.variations_at(lo, false);
        let vh = self.variations_at(hi, true);
        vl.saturating_sub(vh)
    }
}

pub fn sturm_chain(p: &RatPoly) -> Result<Vec<RatPoly>> {
    Ok(SturmChain::new(p)?.into_members())
}

/// Number of distinct real roots of `p` in `(lo, hi]`; `None` endpoints are infinite.
pub fn count_real_roots(p: &RatPoly, lo: Option<&Rational>, hi: Option<&Rational>) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial("count_real_roots"));
    }
    let sf = p.squarefree_part()?;
    Ok(SturmChain::new(&sf)?.count(lo, hi))
}
