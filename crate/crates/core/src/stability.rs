//! Hurwitz stability over the rationals.
//!
//! A polynomial is Hurwitz stable when every zero has strictly negative real
//! part. The Routh table is built with exact pivots; a vanishing pivot is a
//! failure (the polynomial then has a zero on or right of the imaginary axis
//! or the test cannot certify stability), never an epsilon perturbation.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi::{f_poly, g_poly, phi_full, pochhammer, JacobiParams};
use crate::poly::{int, RatPoly, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouthWitness {
    /// Row of the Routh table whose leading entry is zero or has the wrong sign.
    pub stage: usize,
    #[serde(with = "crate::ratio_str")]
    pub quantity: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub stable: bool,
    pub failure_witness: Option<RouthWitness>,
}

impl StabilityVerdict {
    fn stable() -> Self {
        StabilityVerdict {
            stable: true,
            failure_witness: None,
        }
    }

    fn unstable(stage: usize, quantity: Rational) -> Self {
        StabilityVerdict {
            stable: false,
            failure_witness: Some(RouthWitness { stage, quantity }),
        }
    }
}

/// Routh-Hurwitz test. Constants have no zeros and are stable.
pub fn routh_hurwitz(p: &RatPoly) -> Result<StabilityVerdict> {
    let degree = p.degree().ok_or(Error::ZeroPolynomial("routh_hurwitz"))?;
    if degree == 0 {
        return Ok(StabilityVerdict::stable());
    }
    let desc: Vec<Rational> = p.coeffs().iter().rev().cloned().collect();
    let lead_positive = desc[0].is_positive();
    let mut prev: Vec<Rational> = desc.iter().step_by(2).cloned().collect();
    let mut cur: Vec<Rational> = desc.iter().skip(1).step_by(2).cloned().collect();
    let zero = Rational::zero();

    for stage in 1..=degree {
        let pivot = cur.first().cloned().unwrap_or_else(Rational::zero);
        if pivot.is_zero() || pivot.is_positive() != lead_positive {
            return Ok(StabilityVerdict::unstable(stage, pivot));
        }
        if stage == degree {
            break;
        }
        let next: Vec<Rational> = (0..prev.len().saturating_sub(1).max(1))
            .map(|j| {
                let a = prev.get(j + 1).unwrap_or(&zero);
                let b = cur.get(j + 1).unwrap_or(&zero);
                (&pivot * a - &prev[0] * b) / &pivot
            })
            .collect();
        prev = cur;
        cur = next;
    }
    Ok(StabilityVerdict::stable())
}

/// `b1^2 / (b0 b2)` for `p = sum b_k mu^k`.
pub fn necessary_ratio(p: &RatPoly) -> Result<Rational> {
    if p.degree().unwrap_or(0) < 2 {
        return Err(Error::RatioUndefined("degree below 2"));
    }
    let denom = p.coeff(0) * p.coeff(2);
    if denom.is_zero() {
        return Err(Error::RatioUndefined("b0 b2 = 0"));
    }
    let b1 = p.coeff(1);
    Ok(&b1 * &b1 / denom)
}

/// `2m / (m - 1)`, the lower bound the ratio must reach when all zeros are real.
pub fn necessary_ratio_bound(m: usize) -> Rational {
    assert!(m >= 2);
    Rational::new(BigInt::from(2 * m), BigInt::from(m - 1))
}

/// The 3x3 Hurwitz determinant
/// `| m b0, (m-1) b1, (m-2) b2 ; b0, b1, b2 ; 0, m b0, (m-1) b1 |`
/// of the reversed polynomial, with `m = deg p`.
pub fn necessary_determinant(p: &RatPoly) -> Result<Rational> {
    let m = p.degree().filter(|&m| m >= 2).ok_or(Error::RatioUndefined("degree below 2"))?;
    let (b0, b1, b2) = (p.coeff(0), p.coeff(1), p.coeff(2));
    let mr = int(m as i64);
    let m1 = int(m as i64 - 1);
    let m2 = int(m as i64 - 2);
    let row0 = [&mr * &b0, &m1 * &b1, &m2 * &b2];
    let row1 = [b0.clone(), b1.clone(), b2.clone()];
    let row2 = [Rational::zero(), &mr * &b0, &m1 * &b1];
    Ok(&row0[0] * (&row1[1] * &row2[2] - &row1[2] * &row2[1])
        - &row0[1] * (&row1[0] * &row2[2] - &row1[2] * &row2[0])
        + &row0[2] * (&row1[0] * &row2[1] - &row1[1] * &row2[0]))
}

/// Closed form of `b1^2 / (b0 b2)` for the coefficients of `phi_n`:
/// `n(n-1)(a+3)_2 (n+a+b+1)_2 / ((n-2)(n-3)(a+1)_2 (n+a+b+3)_2)`.
pub fn phi_ratio_closed_form(params: &JacobiParams) -> Result<Rational> {
    let n = params.n;
    if n < 4 {
        return Err(Error::RatioUndefined("needs n >= 4"));
    }
    let nr = int(n as i64);
    let al = &params.alpha;
    let s = &nr + al + &params.beta;
    let num = int((n * (n - 1)) as i64) * pochhammer(&(al + int(3)), 2) * pochhammer(&(&s + int(1)), 2);
    let den = int(((n - 2) * (n - 3)) as i64) * pochhammer(&(al + int(1)), 2) * pochhammer(&(&s + int(3)), 2);
    if den.is_zero() {
        return Err(Error::RatioUndefined("vanishing denominator"));
    }
    Ok(num / den)
}

/// `(a+3)(a+4) / ((a+1)(a+2))`, the large-`n` limit of the ratio.
pub fn ratio_limit(alpha: &Rational) -> Result<Rational> {
    let den = (alpha + int(1)) * (alpha + int(2));
    if den.is_zero() {
        return Err(Error::Pole(alpha.to_string()));
    }
    Ok((alpha + int(3)) * (alpha + int(4)) / den)
}

/// True iff the limit ratio is at most 2, i.e. `2a^2 - 2a - 16 >= 0`:
/// `alpha` outside `((1 - sqrt 33)/2, (1 + sqrt 33)/2)`.
pub fn alpha_window_violation(alpha: &Rational) -> Result<bool> {
    if *alpha == int(-1) || *alpha == int(-2) {
        return Err(Error::Pole(alpha.to_string()));
    }
    let q = int(2) * alpha * alpha - int(2) * alpha - int(16);
    Ok(!q.is_negative())
}

/// Stability of `Phi_n(1; mu)`, the full tower of `P_n^(alpha, beta-1)`.
pub fn stability_of_theorem4(n: usize, alpha: &Rational, beta: &Rational) -> Result<StabilityVerdict> {
    if n < 4 {
        return Err(Error::InvalidInput(format!("theorem-4 polynomial needs n >= 4, got {n}")));
    }
    routh_hurwitz(&phi_full(&JacobiParams::new(n, alpha.clone(), beta.clone()), true))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Intermediary {
    F,
    G,
}

/// Stability of `f(1; mu)` or `g(1; mu)`.
pub fn stability_of_fg(
    which: Intermediary,
    n: usize,
    alpha: &Rational,
    beta: &Rational,
    a: &Rational,
) -> Result<StabilityVerdict> {
    if n <= 3 {
        return Err(Error::InvalidInput(format!("f/g polynomials need n > 3, got {n}")));
    }
    if !a.is_positive() {
        return Err(Error::InvalidInput("A must be positive".into()));
    }
    let params = JacobiParams::new(n, alpha.clone(), beta.clone());
    let poly = match which {
        Intermediary::F => f_poly(&params, a),
        Intermediary::G => g_poly(&params, a),
    };
    routh_hurwitz(&poly)
}

/// Whether `p` passes the necessary real-rootedness test: `b1 > 0` and the
/// ratio reaches `2m/(m-1)` (for `b0 > 0`).
pub fn necessary_condition_holds(p: &RatPoly) -> Result<bool> {
    let m = p.degree().unwrap_or(0);
    let ratio = necessary_ratio(p)?;
    Ok(p.coeff(1).is_positive() && ratio >= necessary_ratio_bound(m))
}
