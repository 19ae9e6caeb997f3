//! Certified isolation of real roots by Sturm bisection.
//!
//! A [`RealRoot`] pins one root of a square-free factor either exactly
//! (`lo == hi`) or inside an open interval `(lo, hi)` whose endpoints are not
//! roots, where the factor changes sign and has no other root. Refinement
//! halves the interval by sign evaluation; comparisons between roots of
//! different polynomials refine until the intervals separate, after an exact
//! gcd test has ruled out equality.

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{gcd, int, IntPoly, RatPoly, Rational, SturmChain};

/// A square-free polynomial with its Sturm chain and a fast sign evaluator.
#[derive(Debug)]
pub struct Squarefree {
    poly: RatPoly,
    eval: IntPoly,
    chain: SturmChain,
}

impl Squarefree {
    /// `poly` must be square-free and nonconstant.
    fn new(poly: RatPoly) -> Result<Self> {
        let chain = SturmChain::new(&poly)?;
        Ok(Squarefree {
            eval: IntPoly::from_rat(&poly),
            poly,
            chain,
        })
    }

    pub fn poly(&self) -> &RatPoly {
        &self.poly
    }

    fn sign_at(&self, x: &Rational) -> Ordering {
        self.eval.sign_at(x)
    }

    /// Number of roots in the closed interval `[lo, hi]`.
    fn count_closed(&self, lo: &Rational, hi: &Rational) -> usize {
        let at_lo = usize::from(self.sign_at(lo) == Ordering::Equal);
        if lo == hi {
            return at_lo;
        }
        at_lo + self.chain.count(Some(lo), Some(hi))
    }
}

#[derive(Clone, Debug)]
pub struct RealRoot {
    factor: Arc<Squarefree>,
    lo: Rational,
    hi: Rational,
    /// Sign of the factor at `lo`; `Equal` for exact roots.
    sign_lo: Ordering,
    multiplicity: usize,
}

impl RealRoot {
    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// The square-free factor this root belongs to.
    pub fn factor(&self) -> &RatPoly {
        &self.factor.poly
    }

    pub fn refine_once(&mut self) {
        if self.is_exact() {
            return;
        }
        let mid = self.midpoint();
        match self.factor.sign_at(&mid) {
            Ordering::Equal => {
                self.lo = mid.clone();
                self.hi = mid;
                self.sign_lo = Ordering::Equal;
            }
            s if s == self.sign_lo => self.lo = mid,
            _ => self.hi = mid,
        }
    }

    /// Refines until the interval is narrower than `width`.
    pub fn refine_to(&mut self, width: &Rational) {
        while !self.is_exact() && &self.width() >= width {
            self.refine_once();
        }
    }

    /// Certified sign of the root.
    pub fn sign(&mut self) -> Ordering {
        loop {
            if self.lo.is_positive() {
                return Ordering::Greater;
            }
            if self.hi.is_negative() {
                return Ordering::Less;
            }
            if self.is_exact() {
                return Ordering::Equal;
            }
            // 0 lies in the interval; if it is a root of this factor it is our root
            if self.factor.sign_at(&Rational::zero()) == Ordering::Equal {
                return Ordering::Equal;
            }
            self.refine_once();
        }
    }

    /// The same root reflected through the origin, as a root of `f(-x)`.
    fn negated(&self) -> RealRoot {
        let poly = self.factor.poly.reflect();
        let factor = Arc::new(Squarefree::new(poly).expect("reflection of a nonzero polynomial"));
        // f(-x) at -hi equals f(hi), whose sign is opposite to f(lo)
        let sign_lo = if self.is_exact() {
            Ordering::Equal
        } else {
            self.sign_lo.reverse()
        };
        RealRoot {
            factor,
            lo: -&self.hi,
            hi: -&self.lo,
            sign_lo,
            multiplicity: self.multiplicity,
        }
    }

    /// Exact comparison of two real roots, refining both as needed.
    pub fn cmp_refining(&mut self, other: &mut RealRoot) -> Ordering {
        self.cmp_inner(other, false)
    }

    /// Like [`cmp_refining`](Self::cmp_refining) for roots already known to
    /// differ (e.g. roots of coprime polynomials); skips the gcd test.
    pub fn cmp_distinct(&mut self, other: &mut RealRoot) -> Ordering {
        self.cmp_inner(other, true)
    }

    fn cmp_inner(&mut self, other: &mut RealRoot, known_distinct: bool) -> Ordering {
        if self.is_exact() && other.is_exact() {
            return self.lo.cmp(&other.lo);
        }
        let mut equality_ruled_out = known_distinct;
        loop {
            if self.hi <= other.lo && !(self.is_exact() && other.is_exact()) {
                return Ordering::Less;
            }
            if other.hi <= self.lo && !(self.is_exact() && other.is_exact()) {
                return Ordering::Greater;
            }
            if self.is_exact() && other.is_exact() {
                return self.lo.cmp(&other.lo);
            }
            if !equality_ruled_out {
                if self.same_root_as(other) {
                    return Ordering::Equal;
                }
                equality_ruled_out = true;
            }
            if self.width() >= other.width() {
                self.refine_once();
            } else {
                other.refine_once();
            }
        }
    }

    /// The intervals overlap; decide whether they hold the same number.
    fn same_root_as(&self, other: &RealRoot) -> bool {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        if lo > hi {
            return false;
        }
        let g = match gcd(&self.factor.poly, &other.factor.poly) {
            Ok(g) => g,
            Err(_) => return false,
        };
        if g.is_constant() {
            return false;
        }
        // a common root inside both isolating intervals is the unique root of each
        let g = Squarefree::new(g).expect("nonconstant gcd");
        g.count_closed(&lo, &hi) > 0
    }

    pub fn cmp_exact(&self, other: &RealRoot) -> Ordering {
        self.clone().cmp_refining(&mut other.clone())
    }

    /// Compares distances from the origin.
    pub fn cmp_abs(&self, other: &RealRoot) -> Ordering {
        let abs = |r: &RealRoot| {
            let mut r = r.clone();
            match r.sign() {
                Ordering::Less => r.negated(),
                _ => r,
            }
        };
        abs(self).cmp_refining(&mut abs(other))
    }
}

/// Isolates the roots of a square-free polynomial, in increasing order.
fn isolate_squarefree(factor: Arc<Squarefree>, multiplicity: usize) -> Vec<RealRoot> {
    let coeffs = factor.poly.coeffs();
    let lead = coeffs.last().expect("nonzero").abs();
    // Cauchy: every root satisfies |x| < 1 + max |c_i / c_d|; rounded up to a
    // power of two so that bisection points stay dyadic
    let cauchy = coeffs[..coeffs.len() - 1]
        .iter()
        .map(|c| c.abs() / &lead)
        .max()
        .unwrap_or_else(Rational::zero)
        + Rational::one();
    let bound = Rational::from_integer(BigInt::one() << cauchy.ceil().to_integer().bits());
    let mut out = Vec::new();
    let mut stack = vec![(-bound.clone(), bound)];
    while let Some((lo, hi)) = stack.pop() {
        let count = factor.chain.count(Some(&lo), Some(&hi));
        match count {
            0 => {}
            1 => {
                let sign_lo = factor.sign_at(&lo);
                out.push(RealRoot {
                    factor: Arc::clone(&factor),
                    lo,
                    hi,
                    sign_lo,
                    multiplicity,
                });
            }
            _ => {
                let mid = split_point(&factor, &lo, &hi);
                stack.push((lo, mid.clone()));
                stack.push((mid, hi));
            }
        }
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    out
}

/// A point strictly inside `(lo, hi)` that is not a root of the factor,
/// trying the midpoint first.
fn split_point(factor: &Squarefree, lo: &Rational, hi: &Rational) -> Rational {
    let width = hi - lo;
    for den in 2i64.. {
        for num in 1..den {
            let cand = lo + &width * Rational::new(num.into(), den.into());
            if factor.sign_at(&cand) != Ordering::Equal {
                return cand;
            }
        }
    }
    unreachable!()
}

/// All distinct real roots of `p` in increasing order, with multiplicities.
pub fn real_roots(p: &RatPoly) -> Result<Vec<RealRoot>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial("real_roots"));
    }
    let mut all: Vec<RealRoot> = Vec::new();
    for (f, m) in p.squarefree_factors()? {
        let sf = Arc::new(Squarefree::new(f)?);
        all.extend(isolate_squarefree(sf, m));
    }
    sort_roots(&mut all, RealRoot::cmp_exact);
    Ok(all)
}

fn sort_roots(roots: &mut [RealRoot], cmp: impl Fn(&RealRoot, &RealRoot) -> Ordering) {
    // insertion sort: comparisons refine, so keep their count small and stable
    for i in 1..roots.len() {
        let mut j = i;
        while j > 0 && cmp(&roots[j - 1], &roots[j]) == Ordering::Greater {
            roots.swap(j - 1, j);
            j -= 1;
        }
    }
}

/// A root as reported to callers: isolating interval, refined midpoint, multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsolatedRoot {
    #[serde(with = "crate::ratio_str")]
    pub lo: Rational,
    #[serde(with = "crate::ratio_str")]
    pub hi: Rational,
    #[serde(with = "crate::ratio_str")]
    pub mid: Rational,
    pub mult: usize,
}

impl From<&RealRoot> for IsolatedRoot {
    fn from(r: &RealRoot) -> Self {
        IsolatedRoot {
            lo: r.lo.clone(),
            hi: r.hi.clone(),
            mid: r.midpoint(),
            mult: r.multiplicity,
        }
    }
}

/// Real roots of a polynomial ordered by distance from the origin, so that
/// `roots[i - 1]` is the `i`-th zero in the `zr_i` sense.
#[derive(Clone, Debug)]
pub struct RootList {
    pub roots: Vec<IsolatedRoot>,
    /// Every root is real, counted with multiplicity.
    pub all_real: bool,
    /// Number of distinct negative roots.
    pub negative_count: usize,
    handles: Vec<RealRoot>,
}

impl RootList {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn real_roots(&self) -> &[RealRoot] {
        &self.handles
    }
}

/// Isolates all real roots of `p` and refines each below `precision`.
pub fn isolate(p: &RatPoly, precision: &Rational) -> Result<RootList> {
    if !precision.is_positive() {
        return Err(Error::InvalidInput("precision must be positive".into()));
    }
    let degree = p.degree().ok_or(Error::ZeroPolynomial("isolate"))?;
    let mut roots = real_roots(p)?;
    let mut negative_count = 0;
    for r in roots.iter_mut() {
        r.refine_to(precision);
        if r.sign() == Ordering::Less {
            negative_count += 1;
        }
    }
    let total: usize = roots.iter().map(|r| r.multiplicity).sum();
    sort_roots(&mut roots, |a, b| a.cmp_abs(b).then_with(|| a.cmp_exact(b)));
    Ok(RootList {
        roots: roots.iter().map(IsolatedRoot::from).collect(),
        all_real: total == degree,
        negative_count,
        handles: roots,
    })
}

/// `zr_i`: the `i`-th distinct zero by distance from the origin.
#[derive(Clone, Debug)]
pub enum Zr {
    /// `i = 0`: the origin, by convention.
    Origin,
    /// Fewer than `i` distinct real zeros.
    NegInfinity,
    Root(RealRoot),
}

pub fn zr(rl: &RootList, i: usize) -> Zr {
    if i == 0 {
        return Zr::Origin;
    }
    match rl.handles.get(i - 1) {
        Some(r) => Zr::Root(r.clone()),
        None => Zr::NegInfinity,
    }
}

impl Zr {
    pub fn is_neg_infinity(&self) -> bool {
        matches!(self, Zr::NegInfinity)
    }

    /// Strict `self < other`. Two absent zeros (`-inf < -inf`) compare as
    /// satisfied: the inequality has nothing to constrain.
    pub fn lt(&self, other: &Zr) -> bool {
        match (self, other) {
            (Zr::NegInfinity, _) => true,
            (_, Zr::NegInfinity) => false,
            (Zr::Origin, Zr::Origin) => false,
            (Zr::Origin, Zr::Root(r)) => r.clone().sign() == Ordering::Greater,
            (Zr::Root(r), Zr::Origin) => r.clone().sign() == Ordering::Less,
            (Zr::Root(a), Zr::Root(b)) => a.cmp_exact(b) == Ordering::Less,
        }
    }

    pub fn le(&self, other: &Zr) -> bool {
        match (self, other) {
            (Zr::Root(a), Zr::Root(b)) => a.cmp_exact(b) != Ordering::Greater,
            (Zr::Origin, Zr::Origin) => true,
            (Zr::Origin, Zr::Root(r)) => r.clone().sign() != Ordering::Less,
            (Zr::Root(r), Zr::Origin) => r.clone().sign() != Ordering::Greater,
            _ => self.lt(other),
        }
    }

    /// Decimal rendering for reports.
    pub fn describe(&self) -> String {
        match self {
            Zr::Origin => "0".into(),
            Zr::NegInfinity => "-inf".into(),
            Zr::Root(r) => {
                let mut r = r.clone();
                r.refine_to(&Rational::new(1.into(), 1_000_000_000_000i64.into()));
                format!("{:.10}", crate::to_f64(&r.midpoint()))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootVerdict {
    NegativeSimple,
    NegativeWithMultiplicity,
    HasNonnegativeOrComplex,
}

/// Three-way verdict on whether all roots of `p` are real, negative and simple.
/// A nonzero constant has no roots and is reported `NegativeSimple`.
pub fn all_negative_simple(p: &RatPoly) -> Result<RootVerdict> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial("all_negative_simple"));
    }
    let zero = Rational::zero();
    let mut multiple = false;
    for (f, m) in p.squarefree_factors()? {
        let chain = SturmChain::new(&f)?;
        let deg = f.degree().expect("nonconstant factor");
        // roots in (-inf, 0]; a root at 0 is not negative
        let mut negative = chain.count(None, Some(&zero));
        if f.coeff(0).is_zero() {
            negative -= 1;
        }
        if negative != deg {
            return Ok(RootVerdict::HasNonnegativeOrComplex);
        }
        multiple |= m > 1;
    }
    Ok(if multiple {
        RootVerdict::NegativeWithMultiplicity
    } else {
        RootVerdict::NegativeSimple
    })
}

/// Every root of `p` is real (counted with multiplicity).
pub fn is_real_rooted(p: &RatPoly) -> Result<bool> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial("is_real_rooted"));
    }
    for (f, _) in p.squarefree_factors()? {
        let deg = f.degree().expect("nonconstant factor");
        if SturmChain::new(&f)?.count(None, None) != deg {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn tol() -> Rational {
        rat(1, 1_000_000)
    }

    #[test]
    fn quadratic_from_phi4() {
        // (-45 +- sqrt(1605)) / 210
        let rl = isolate(&RatPoly::from_ints(&[1, 45, 105]), &tol()).unwrap();
        assert!(rl.all_real);
        assert_eq!(rl.len(), 2);
        assert_eq!(rl.negative_count, 2);
        let s = 1605f64.sqrt();
        let expected = [(-45.0 + s) / 210.0, (-45.0 - s) / 210.0];
        for (r, e) in rl.roots.iter().zip(expected) {
            assert!(&r.hi - &r.lo < tol());
            assert!((crate::to_f64(&r.mid) - e).abs() < 1e-6);
        }
    }

    #[test]
    fn no_real_roots() {
        let rl = isolate(&RatPoly::from_ints(&[1, 0, 1]), &tol()).unwrap();
        assert!(rl.is_empty());
        assert!(!rl.all_real);
    }

    #[test]
    fn multiplicities() {
        // (x+1)^2 (x+2)
        let p = RatPoly::from_ints(&[2, 5, 4, 1]);
        let rl = isolate(&p, &tol()).unwrap();
        assert!(rl.all_real);
        assert_eq!(rl.len(), 2);
        assert_eq!(rl.roots[0].mult, 2);
        assert!(rl.roots[0].lo <= int(-1) && int(-1) <= rl.roots[0].hi);
        assert_eq!(rl.roots[1].mult, 1);
        assert!(rl.roots[1].lo <= int(-2) && int(-2) <= rl.roots[1].hi);
    }

    #[test]
    fn isolate_rejects_bad_inputs() {
        assert!(isolate(&RatPoly::zero(), &tol()).is_err());
        assert!(isolate(&RatPoly::from_ints(&[1, 1]), &int(0)).is_err());
    }

    #[test]
    fn zr_indexing() {
        let rl = isolate(&RatPoly::from_ints(&[1, 45, 105]), &tol()).unwrap();
        match zr(&rl, 1) {
            Zr::Root(r) => assert!((crate::to_f64(&r.midpoint()) + 0.02352).abs() < 1e-4),
            other => panic!("{other:?}"),
        }
        assert!(zr(&rl, 3).is_neg_infinity());
        assert!(matches!(zr(&rl, 0), Zr::Origin));
        let c = isolate(&RatPoly::from_ints(&[5]), &tol()).unwrap();
        assert!(zr(&c, 1).is_neg_infinity());
    }

    #[test]
    fn zr_ordering_by_distance() {
        // roots -3, 1, 2: distances 1, 2, 3
        let p = RatPoly::from_roots(&[int(-3), int(1), int(2)]);
        let rl = isolate(&p, &tol()).unwrap();
        let mids: Vec<f64> = rl.roots.iter().map(|r| crate::to_f64(&r.mid)).collect();
        assert!((mids[0] - 1.0).abs() < 1e-6);
        assert!((mids[1] - 2.0).abs() < 1e-6);
        assert!((mids[2] + 3.0).abs() < 1e-6);
        assert_eq!(rl.negative_count, 1);
    }

    #[test]
    fn certified_comparison_detects_equal_roots() {
        // x^2 - 2 and x^2 + x - 2 - sqrt... use (x^2-2)(x+1) vs (x^2-2)(x-5)
        let a = real_roots(&(RatPoly::from_ints(&[-2, 0, 1]) * RatPoly::from_ints(&[1, 1]))).unwrap();
        let b = real_roots(&(RatPoly::from_ints(&[-2, 0, 1]) * RatPoly::from_ints(&[-5, 1]))).unwrap();
        // ascending: a = [-sqrt2, -1, sqrt2], b = [-sqrt2, sqrt2, 5]
        assert_eq!(a[0].cmp_exact(&b[0]), Ordering::Equal);
        assert_eq!(a[2].cmp_exact(&b[1]), Ordering::Equal);
        assert_eq!(a[1].cmp_exact(&b[0]), Ordering::Greater);
        assert_eq!(a[2].cmp_exact(&b[2]), Ordering::Less);
        // sqrt2 vs 1.41421 (close but distinct)
        let c = real_roots(&RatPoly::new(vec![rat(-141421, 100000), int(1)])).unwrap();
        assert_eq!(a[2].cmp_exact(&c[0]), Ordering::Greater);
    }

    #[test]
    fn verdicts() {
        assert_eq!(
            all_negative_simple(&RatPoly::from_ints(&[1, 45, 105])).unwrap(),
            RootVerdict::NegativeSimple
        );
        assert_eq!(
            all_negative_simple(&RatPoly::from_ints(&[1, 2, 1])).unwrap(),
            RootVerdict::NegativeWithMultiplicity
        );
        assert_eq!(
            all_negative_simple(&RatPoly::from_ints(&[-1, 1])).unwrap(),
            RootVerdict::HasNonnegativeOrComplex
        );
        assert_eq!(
            all_negative_simple(&RatPoly::from_ints(&[0, 1])).unwrap(),
            RootVerdict::HasNonnegativeOrComplex
        );
        assert_eq!(
            all_negative_simple(&RatPoly::from_ints(&[1, 0, 1])).unwrap(),
            RootVerdict::HasNonnegativeOrComplex
        );
        assert!(is_real_rooted(&RatPoly::from_ints(&[2, 5, 4, 1])).unwrap());
        assert!(!is_real_rooted(&RatPoly::from_ints(&[1, 1, 1])).unwrap());
    }

    #[test]
    fn zr_strict_comparisons() {
        let a = isolate(&RatPoly::from_ints(&[1, 45, 105]), &tol()).unwrap();
        let b = isolate(&RatPoly::from_ints(&[1, 15]), &tol()).unwrap();
        // zr_2(phi_4) < zr_1(phi_3) < zr_1(phi_4) < 0
        assert!(zr(&a, 2).lt(&zr(&b, 1)));
        assert!(zr(&b, 1).lt(&zr(&a, 1)));
        assert!(zr(&a, 1).lt(&zr(&a, 0)));
        assert!(!zr(&a, 1).lt(&zr(&a, 1)));
        assert!(zr(&a, 1).le(&zr(&a, 1)));
        assert!(zr(&a, 5).lt(&zr(&b, 5)));
        assert!(!zr(&a, 1).lt(&zr(&b, 2)));
    }
}
