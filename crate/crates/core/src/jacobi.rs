//! Derivative towers of Jacobi polynomials at `x = 1` and the polynomials in
//! `mu` assembled from them.
//!
//! Everything here is built from the closed form
//!
//! ```text
//! d^k/dx^k P_n^(a,b)(1) = 2^-k (n+a+b+1)_k (a+k+1)_(n-k) / (n-k)!
//! ```
//!
//! so no polynomial in `x` is ever materialized. `phi` keeps the even orders
//! (one coefficient per power of `mu`), `phi_full` keeps all of them, and
//! `f_poly`/`g_poly` interleave the towers of degrees `n` and `n-1`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{int, RatPoly, Rational};

/// Identifies `P_n^(alpha,beta)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JacobiParams {
    pub n: usize,
    #[serde(with = "crate::ratio_str")]
    pub alpha: Rational,
    #[serde(with = "crate::ratio_str")]
    pub beta: Rational,
}

impl JacobiParams {
    pub fn new(n: usize, alpha: Rational, beta: Rational) -> Self {
        JacobiParams { n, alpha, beta }
    }

    /// Same family with degree `n` and parameters shifted by integers.
    pub fn at(&self, n: usize, dalpha: i64, dbeta: i64) -> Self {
        JacobiParams {
            n,
            alpha: &self.alpha + int(dalpha),
            beta: &self.beta + int(dbeta),
        }
    }

    fn n_rat(&self) -> Rational {
        Rational::from_integer(BigInt::from(self.n))
    }
}

/// Rising factorial `(x)_k = x (x+1) ... (x+k-1)`, with `(x)_0 = 1`.
///
/// The normalization `P_n(1) = (alpha+1)_n / n!` is `pochhammer(alpha + 1, n) / n!`.
pub fn pochhammer(x: &Rational, k: usize) -> Rational {
    let mut acc = Rational::one();
    let mut term = x.clone();
    for _ in 0..k {
        acc *= &term;
        term += Rational::one();
    }
    acc
}

fn factorial(k: usize) -> Rational {
    Rational::from_integer((1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i)))
}

/// `values[k]` is the `k`-th derivative of `P_n^(alpha,beta)` at `x = 1`, `k = 0..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivTower {
    pub params: JacobiParams,
    pub values: Vec<Rational>,
}

pub fn deriv_tower(params: &JacobiParams) -> DerivTower {
    let n = params.n;
    let upper = &params.n_rat() + &params.alpha + &params.beta + Rational::one();
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut values = Vec::with_capacity(n + 1);
    let mut two_pow = Rational::one();
    for k in 0..=n {
        let lower_start = &params.alpha + int(k as i64 + 1);
        let v = &two_pow * pochhammer(&upper, k) * pochhammer(&lower_start, n - k) / factorial(n - k);
        values.push(v);
        two_pow *= &half;
    }
    DerivTower {
        params: params.clone(),
        values,
    }
}

/// Same tower from the terminating hypergeometric series of `P_n`:
/// only the `j = k` term of `sum (-n)_j (n+a+b+1)_j / (j! (a+1)_j) ((1-x)/2)^j`
/// survives `k` differentiations at `x = 1`.
///
/// Returns `None` when some `(alpha+1)_k` vanishes (alpha a negative integer)
/// and the series form is undefined.
pub fn deriv_tower_hypergeometric(params: &JacobiParams) -> Option<DerivTower> {
    let n = params.n;
    let n_rat = params.n_rat();
    let a1 = &params.alpha + Rational::one();
    let upper = &n_rat + &params.alpha + &params.beta + Rational::one();
    let norm = pochhammer(&a1, n) / factorial(n);
    let minus_half = Rational::new(BigInt::from(-1), BigInt::from(2));
    let mut values = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let lower = pochhammer(&a1, k);
        if lower.is_zero() {
            return None;
        }
        let v = &norm * pochhammer(&(-&n_rat), k) * pochhammer(&upper, k)
            * num_traits::pow(minus_half.clone(), k)
            / lower;
        values.push(v);
    }
    Some(DerivTower {
        params: params.clone(),
        values,
    })
}

/// `phi_n(mu) = sum_{k=0}^{[n/2]} P_n^(2k)(1) mu^k`.
pub fn phi(params: &JacobiParams) -> RatPoly {
    let tower = deriv_tower(params);
    #[cfg(debug_assertions)]
    if let Some(check) = deriv_tower_hypergeometric(params) {
        debug_assert_eq!(tower.values, check.values, "tower routes disagree at {params:?}");
    }
    RatPoly::new(tower.values.into_iter().step_by(2).collect())
}

/// `Phi_n(1; mu) = sum_{k=0}^{n} P^(k)(1) mu^k` for the full tower.
///
/// With `beta_shift` the tower is taken from `P_n^(alpha, beta-1)`, which is
/// the polynomial whose Hurwitz stability is studied; without it `P_n^(alpha,beta)`
/// is used as-is.
pub fn phi_full(params: &JacobiParams, beta_shift: bool) -> RatPoly {
    let p = if beta_shift {
        params.at(params.n, 0, -1)
    } else {
        params.clone()
    };
    RatPoly::new(deriv_tower(&p).values)
}

/// `f(1; mu) = sum_k mu^k (A P_n^(k)(1) + mu P_{n-1}^(k)(1))`.
///
/// Its degree is `n`: the `mu^(n+1)` term would need `P_{n-1}^(n)`, which vanishes.
pub fn f_poly(params: &JacobiParams, a: &Rational) -> RatPoly {
    assert!(params.n >= 1, "f_poly needs n >= 1");
    let top = RatPoly::new(deriv_tower(params).values);
    let low = RatPoly::new(deriv_tower(&params.at(params.n - 1, 0, 0)).values);
    &top.scale(a) + &low.shift_mul_x(1)
}

/// `g(1; mu) = sum_k mu^k (mu P_n^(k)(1) + A P_{n-1}^(k)(1))`, of degree `n + 1`.
pub fn g_poly(params: &JacobiParams, a: &Rational) -> RatPoly {
    assert!(params.n >= 1, "g_poly needs n >= 1");
    let top = RatPoly::new(deriv_tower(params).values);
    let low = RatPoly::new(deriv_tower(&params.at(params.n - 1, 0, 0)).values);
    &top.shift_mul_x(1) + &low.scale(a)
}

/// The exact relations between members of the `phi` family with shifted
/// degree and parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Identity {
    /// `(2n+a+b) phi_n^(a,b-1) = (n+a+b) phi_n + (n+a) phi_{n-1}`
    Summ1,
    /// `(2n+a+b) phi_n^(a-1,b) = (n+a+b) phi_n - (n+b) phi_{n-1}`
    Summ2,
    /// `(n+a+b) phi_n = (n+b) phi_n^(a,b-1) + (n+a) phi_n^(a-1,b)`
    Summ3,
    /// `phi_{n-1} = phi_n^(a,b-1) - phi_n^(a-1,b)`
    Summ4,
    /// `(n+a) phi_{n-1}^(a,b+1) = n phi_n - 2 mu phi_n'`
    Diff1,
    /// `(n+a+b+1) phi_n^(a,b+1) = (n+a+b+1) phi_n + 2 mu phi_n'`
    Diff2,
    /// `(n+a) phi_n^(a-1,b+1) = a phi_n + 2 mu phi_n'`
    Diff3,
    /// `(n+b)/(n+a+b) 2 mu (phi_n^(a,b-1))' = (n+a) phi_n^(a-1,b) - a phi_n`
    Diff4,
    /// `2 mu (phi_n^(a,b-1))' = n phi_n^(a-1,b) - a phi_{n-1}`
    Diff5,
    /// `n phi_n - 2 mu phi_n' = (n+a) phi_{n-1} + (n+a)/(n+a+b) 2 mu phi_{n-1}'`
    Chain1,
    /// `n phi_n - (n+a) phi_{n-1} = (2n+a+b)/(n+a+b) 2 mu (phi_n^(a,b-1))'
    ///  = 2 mu phi_n' + (n+a)/(n+a+b) 2 mu phi_{n-1}'`
    Chain2,
    /// `(n+a+b)/(n+a) phi_n + A phi_{n-1}
    ///  = ((1+A)n+a+b)/(n+a) phi_n^(a,b-1) + 2 mu (1-A)/(n+a) (phi_n^(a,b-1))'`
    MainRel,
    /// `phi_n(mu) - phi_n(0) = 1/4 (n+a+b+1)_2 mu phi_{n-2}^(a+2,b+2)(mu)`
    PhiDifference,
}

impl Identity {
    pub const ALL: [Identity; 13] = [
        Identity::Summ1,
        Identity::Summ2,
        Identity::Summ3,
        Identity::Summ4,
        Identity::Diff1,
        Identity::Diff2,
        Identity::Diff3,
        Identity::Diff4,
        Identity::Diff5,
        Identity::Chain1,
        Identity::Chain2,
        Identity::MainRel,
        Identity::PhiDifference,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::Summ1 => "fl_summ1",
            Identity::Summ2 => "fl_summ2",
            Identity::Summ3 => "fl_summ3",
            Identity::Summ4 => "fl_summ4",
            Identity::Diff1 => "fl_diff1",
            Identity::Diff2 => "fl_diff2",
            Identity::Diff3 => "fl_diff3",
            Identity::Diff4 => "fl_diff4",
            Identity::Diff5 => "fl_diff5",
            Identity::Chain1 => "chain_rel_1",
            Identity::Chain2 => "chain_rel_2",
            Identity::MainRel => "main_rel",
            Identity::PhiDifference => "phi_difference",
        }
    }

    pub fn from_name(name: &str) -> Option<Identity> {
        Identity::ALL.into_iter().find(|id| id.name() == name)
    }

    fn min_degree(self) -> usize {
        match self {
            Identity::PhiDifference => 2,
            _ => 1,
        }
    }
}

/// Checks one identity as an exact equality of canonical polynomials.
///
/// `a` is the free scalar of [`Identity::MainRel`] and is ignored by the others.
pub fn verify_identity(id: Identity, params: &JacobiParams, a: Option<&Rational>) -> Result<bool> {
    let undefined = |reason: &'static str| Error::IdentityUndefined {
        identity: id.name(),
        n: params.n,
        alpha: params.alpha.to_string(),
        beta: params.beta.to_string(),
        reason,
    };
    if params.n < id.min_degree() {
        return Err(undefined("degree too small"));
    }
    let n = params.n;
    let nr = params.n_rat();
    let (al, be) = (&params.alpha, &params.beta);
    let n_ab = &nr + al + be;
    let two_n_ab = &n_ab + &nr;
    let n_a = &nr + al;
    let n_b = &nr + be;

    match id {
        Identity::Summ1 | Identity::Summ2 | Identity::Summ3 | Identity::Summ4 if two_n_ab.is_zero() => {
            return Err(undefined("2n+alpha+beta = 0"));
        }
        Identity::Diff4 | Identity::Chain1 | Identity::Chain2 if n_ab.is_zero() => {
            return Err(undefined("n+alpha+beta = 0"));
        }
        Identity::MainRel if n_a.is_zero() => return Err(undefined("n+alpha = 0")),
        _ => {}
    }

    let ph = |m: usize, da: i64, db: i64| phi(&params.at(m, da, db));
    let two_mu = RatPoly::monomial(int(2), 1);
    let two_mu_d = |p: &RatPoly| &two_mu * &p.derivative();

    let (lhs, rhs) = match id {
        Identity::Summ1 => (
            ph(n, 0, -1).scale(&two_n_ab),
            &ph(n, 0, 0).scale(&n_ab) + &ph(n - 1, 0, 0).scale(&n_a),
        ),
        Identity::Summ2 => (
            ph(n, -1, 0).scale(&two_n_ab),
            &ph(n, 0, 0).scale(&n_ab) - &ph(n - 1, 0, 0).scale(&n_b),
        ),
        Identity::Summ3 => (
            ph(n, 0, 0).scale(&n_ab),
            &ph(n, 0, -1).scale(&n_b) + &ph(n, -1, 0).scale(&n_a),
        ),
        Identity::Summ4 => (ph(n - 1, 0, 0), &ph(n, 0, -1) - &ph(n, -1, 0)),
        Identity::Diff1 => {
            let p = ph(n, 0, 0);
            (ph(n - 1, 0, 1).scale(&n_a), &p.scale(&nr) - &two_mu_d(&p))
        }
        Identity::Diff2 => {
            let p = ph(n, 0, 0);
            let c = &n_ab + Rational::one();
            (ph(n, 0, 1).scale(&c), &p.scale(&c) + &two_mu_d(&p))
        }
        Identity::Diff3 => {
            let p = ph(n, 0, 0);
            (ph(n, -1, 1).scale(&n_a), &p.scale(al) + &two_mu_d(&p))
        }
        Identity::Diff4 => (
            two_mu_d(&ph(n, 0, -1)).scale(&(&n_b / &n_ab)),
            &ph(n, -1, 0).scale(&n_a) - &ph(n, 0, 0).scale(al),
        ),
        Identity::Diff5 => (
            two_mu_d(&ph(n, 0, -1)),
            &ph(n, -1, 0).scale(&nr) - &ph(n - 1, 0, 0).scale(al),
        ),
        Identity::Chain1 => {
            let p = ph(n, 0, 0);
            let q = ph(n - 1, 0, 0);
            (
                &p.scale(&nr) - &two_mu_d(&p),
                &q.scale(&n_a) + &two_mu_d(&q).scale(&(&n_a / &n_ab)),
            )
        }
        Identity::Chain2 => {
            let p = ph(n, 0, 0);
            let q = ph(n - 1, 0, 0);
            let lhs = &p.scale(&nr) - &q.scale(&n_a);
            let mid = two_mu_d(&ph(n, 0, -1)).scale(&(&two_n_ab / &n_ab));
            let rhs = &two_mu_d(&p) + &two_mu_d(&q).scale(&(&n_a / &n_ab));
            if lhs != mid {
                return Ok(false);
            }
            (mid, rhs)
        }
        Identity::MainRel => {
            let a = a.ok_or_else(|| Error::InvalidInput("main_rel needs the scalar A".into()))?;
            let shifted = ph(n, 0, -1);
            let one = Rational::one();
            let lhs = &ph(n, 0, 0).scale(&(&n_ab / &n_a)) + &ph(n - 1, 0, 0).scale(a);
            let c0 = ((&one + a) * &nr + al + be) / &n_a;
            let c1 = (&one - a) / &n_a;
            (lhs, &shifted.scale(&c0) + &two_mu_d(&shifted).scale(&c1))
        }
        Identity::PhiDifference => {
            let p = ph(n, 0, 0);
            let lhs = &p - &RatPoly::constant(p.coeff(0));
            let c = pochhammer(&(&n_ab + Rational::one()), 2) / int(4);
            (lhs, ph(n - 2, 2, 2).shift_mul_x(1).scale(&c))
        }
    };
    Ok(lhs == rhs)
}
