//! Interlacing of zeros and the Hermite-Biehler correspondence.
//!
//! Two polynomials interlace strictly when their zeros are real, simple and
//! distinct and alternate along the line. Verdicts are decided by certified
//! root comparisons; no floating-point value takes part in a decision.
//!
//! Conventions for degenerate inputs: a nonzero constant has no zeros, so the
//! alternation condition only constrains the other polynomial. A (constant,
//! linear) pair with a real zero is strict; a (constant, quadratic) pair is not.

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{gcd, RatPoly, Rational};
use crate::realroots::{is_real_rooted, real_roots, RealRoot};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterlaceVerdict {
    Strict,
    Nonstrict,
    Fail,
}

/// One zero in the merged sequence, tagged with the polynomial it belongs to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledZero {
    pub poly: char,
    #[serde(with = "crate::ratio_str")]
    pub lo: Rational,
    #[serde(with = "crate::ratio_str")]
    pub hi: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterlaceCertificate {
    /// Zeros of both polynomials (after removing a common factor) in
    /// increasing order.
    pub sequence: Vec<LabeledZero>,
    /// Coefficients of `gcd(p, q)` when it is nonconstant.
    #[serde(with = "crate::ratio_str::vec", default, skip_serializing_if = "Vec::is_empty")]
    pub common_factor: Vec<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterlaceOutcome {
    pub verdict: InterlaceVerdict,
    pub certificate: InterlaceCertificate,
}

impl InterlaceOutcome {
    fn fail(violation: impl Into<String>) -> Self {
        InterlaceOutcome {
            verdict: InterlaceVerdict::Fail,
            certificate: InterlaceCertificate {
                sequence: Vec::new(),
                common_factor: Vec::new(),
                violation: Some(violation.into()),
            },
        }
    }

    pub fn is_strict(&self) -> bool {
        self.verdict == InterlaceVerdict::Strict
    }

    /// Strict or non-strict.
    pub fn interlaces(&self) -> bool {
        self.verdict != InterlaceVerdict::Fail
    }
}

pub fn interlace_check(p: &RatPoly, q: &RatPoly) -> InterlaceOutcome {
    if p.is_zero() || q.is_zero() {
        return InterlaceOutcome::fail("zero polynomial");
    }
    let g = gcd(p, q).expect("both nonzero");
    if g.is_constant() {
        return strict_check(p, q);
    }
    match is_real_rooted(&g) {
        Ok(true) => {}
        _ => return InterlaceOutcome::fail(format!("common factor {g} has non-real zeros")),
    }
    let reduced_p = p.div_exact(&g).expect("gcd divides p");
    let reduced_q = q.div_exact(&g).expect("gcd divides q");
    let mut out = strict_check(&reduced_p, &reduced_q);
    if out.verdict == InterlaceVerdict::Strict {
        out.verdict = InterlaceVerdict::Nonstrict;
    }
    out.certificate.common_factor = g.coeffs().to_vec();
    out
}

/// Strict interlacing of coprime `p`, `q`.
fn strict_check(p: &RatPoly, q: &RatPoly) -> InterlaceOutcome {
    let mut sides = Vec::with_capacity(2);
    for (label, poly) in [('p', p), ('q', q)] {
        let roots = real_roots(poly).expect("nonzero");
        if let Some(r) = roots.iter().find(|r| r.multiplicity() > 1) {
            return InterlaceOutcome::fail(format!(
                "{label} has a zero of multiplicity {} (factor {})",
                r.multiplicity(),
                r.factor()
            ));
        }
        if roots.len() != poly.degree().unwrap_or(0) {
            return InterlaceOutcome::fail(format!("{label} has non-real zeros"));
        }
        sides.push(roots);
    }
    let mut qs = sides.pop().unwrap().into_iter().peekable();
    let mut ps = sides.pop().unwrap().into_iter().peekable();

    let mut merged: Vec<(char, RealRoot)> = Vec::new();
    loop {
        let take_p = match (ps.peek_mut(), qs.peek_mut()) {
            (None, None) => break,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => a.cmp_distinct(b).is_lt(),
        };
        if take_p {
            merged.push(('p', ps.next().unwrap()));
        } else {
            merged.push(('q', qs.next().unwrap()));
        }
    }

    let sequence: Vec<LabeledZero> = merged
        .iter()
        .map(|(label, r)| LabeledZero {
            poly: *label,
            lo: r.lo().clone(),
            hi: r.hi().clone(),
        })
        .collect();
    let violation = merged.windows(2).position(|w| w[0].0 == w[1].0).map(|i| {
        let (label, a) = &merged[i];
        let b = &merged[i + 1].1;
        let other = if *label == 'p' { 'q' } else { 'p' };
        format!(
            "consecutive zeros of {label} near {:.8} and {:.8} with no zero of {other} between",
            crate::to_f64(&a.midpoint()),
            crate::to_f64(&b.midpoint())
        )
    });
    InterlaceOutcome {
        verdict: if violation.is_some() {
            InterlaceVerdict::Fail
        } else {
            InterlaceVerdict::Strict
        },
        certificate: InterlaceCertificate {
            sequence,
            common_factor: Vec::new(),
            violation,
        },
    }
}

/// `f(z) = p(z^2) + z q(z^2)`.
pub fn hb_compose(p: &RatPoly, q: &RatPoly) -> RatPoly {
    &p.compose_square() + &q.compose_square().shift_mul_x(1)
}

/// Right-hand side of the Hermite-Biehler theorem: `p(0) q(0) > 0` and the
/// zeros of `p(z)` and `z q(z)` are nonpositive and strictly interlacing.
pub fn hb_check(p: &RatPoly, q: &RatPoly) -> bool {
    let (p0, q0) = (p.coeff(0), q.coeff(0));
    if !(&p0 * &q0).is_positive() {
        return false;
    }
    let zq = q.shift_mul_x(1);
    if !interlace_check(p, &zq).is_strict() {
        return false;
    }
    // all zeros are real by now; none of them may be positive
    [p, q].into_iter().all(|poly| {
        real_roots(poly)
            .map(|rs| rs.into_iter().all(|mut r| r.sign().is_lt()))
            .unwrap_or(false)
    })
}

/// `h(x) = even(x^2) + x odd_div(x^2)`.
pub fn even_odd_split(h: &RatPoly) -> (RatPoly, RatPoly) {
    (h.even_indexed(), h.odd_indexed())
}

/// Which of the two sampled combinations failed to be real-rooted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealPairFalsifier {
    /// `"A p + B x q"` or `"A p + B q"`.
    pub combination: String,
    #[serde(with = "crate::ratio_str")]
    pub a: Rational,
    #[serde(with = "crate::ratio_str")]
    pub b: Rational,
}

/// First sampled `(A, B)` for which `A p + B x q` or `A p + B q` has a
/// non-real zero (or vanishes identically).
///
/// This samples a necessary condition only; the certified real-pair decision
/// is [`interlace_check`], to which real pairs are equivalent.
pub fn real_pair_falsifier(
    p: &RatPoly,
    q: &RatPoly,
    samples: &[(Rational, Rational)],
) -> Result<Option<RealPairFalsifier>> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("real_pair_probe needs at least one sample".into()));
    }
    let xq = q.shift_mul_x(1);
    for (a, b) in samples {
        for (combination, second) in [("A p + B x q", &xq), ("A p + B q", q)] {
            let r = &p.scale(a) + &second.scale(b);
            if r.is_zero() || !is_real_rooted(&r)? {
                return Ok(Some(RealPairFalsifier {
                    combination: combination.to_string(),
                    a: a.clone(),
                    b: b.clone(),
                }));
            }
        }
    }
    Ok(None)
}

pub fn real_pair_probe(p: &RatPoly, q: &RatPoly, samples: &[(Rational, Rational)]) -> Result<bool> {
    Ok(real_pair_falsifier(p, q, samples)?.is_none())
}
