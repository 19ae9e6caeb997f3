//! Parameter-region scans, threshold bisection and Vieta sums.
//!
//! A scan evaluates one [`Check`] at every point of a [`GridSpec`] in
//! parallel. Each evaluation yields a [`ScanReport`]; reports are sorted by
//! check, `n`, `alpha`, `beta` and extra parameters, so the output does not
//! depend on scheduling. A failing report carries a witness that names its
//! grid point exactly and can be re-evaluated with [`reverify_witness`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::interlace::{even_odd_split, interlace_check, InterlaceOutcome};
use crate::jacobi::{f_poly, g_poly, phi, JacobiParams};
use crate::poly::{int, parse_rational, rat, RatPoly, Rational};
use crate::realroots::{all_negative_simple, is_real_rooted, isolate, zr, RootList, RootVerdict, Zr};
use crate::stability::{stability_of_fg, stability_of_theorem4, Intermediary};

/// Inclusive arithmetic progression `start, start + step, ..., <= end`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalRange {
    pub start: Rational,
    pub end: Rational,
    pub step: Rational,
}

impl RationalRange {
    pub fn new(start: Rational, end: Rational, step: Rational) -> Result<Self> {
        if !step.is_positive() {
            return Err(Error::InvalidInput(format!("range step must be positive, got {step}")));
        }
        if start > end {
            return Err(Error::InvalidInput(format!("empty range {start}:{end}")));
        }
        Ok(RationalRange { start, end, step })
    }

    pub fn single(value: Rational) -> Self {
        RationalRange {
            start: value.clone(),
            end: value,
            step: int(1),
        }
    }

    pub fn values(&self) -> Vec<Rational> {
        let mut out = Vec::new();
        let mut x = self.start.clone();
        while x <= self.end {
            out.push(x.clone());
            x += &self.step;
        }
        out
    }
}

impl FromStr for RationalRange {
    type Err = Error;

    /// `"a:b:step"`, or a single value `"a"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [v] => Ok(RationalRange::single(parse_rational(v)?)),
            [a, b, step] => RationalRange::new(parse_rational(a)?, parse_rational(b)?, parse_rational(step)?),
            _ => Err(Error::InvalidInput(format!("expected a:b:step, got {s:?}"))),
        }
    }
}

impl fmt::Display for RationalRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.step)
    }
}

/// `"a:b"` (inclusive) or a single `"n"`.
pub fn parse_n_range(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidInput(format!("expected n range a:b, got {s:?}"));
    let (lo, hi) = match s.split_once(':') {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub alpha: RationalRange,
    pub beta: RationalRange,
    pub n_min: usize,
    pub n_max: usize,
    /// Values of `A` for checks that take one (`thmB_chain`, `fg_stability`).
    pub a_values: Vec<Rational>,
}

impl GridSpec {
    pub fn new(alpha: RationalRange, beta: RationalRange, n_min: usize, n_max: usize) -> Self {
        GridSpec {
            alpha,
            beta,
            n_min,
            n_max,
            a_values: vec![rat(1, 2), int(1), int(3)],
        }
    }

    pub fn with_a_values(mut self, a_values: Vec<Rational>) -> Self {
        self.a_values = a_values;
        self
    }

    /// Step `1/8` on both parameters, `alpha` in `[-7/8, 15/8]`, `beta` in
    /// `[-15/8, 8]`, and `n` from 4 (5 for checks involving `n - 2`) to 20.
    pub fn default_for(check: Check) -> Self {
        let eighth = rat(1, 8);
        let n_min = match check {
            Check::ConjB | Check::Chains => 5,
            _ => 4,
        };
        GridSpec::new(
            RationalRange::new(rat(-7, 8), rat(15, 8), eighth.clone()).expect("valid range"),
            RationalRange::new(rat(-15, 8), int(8), eighth).expect("valid range"),
            n_min,
            20,
        )
    }

    pub fn points(&self) -> Vec<(usize, Rational, Rational)> {
        let alphas = self.alpha.values();
        let betas = self.beta.values();
        let mut out = Vec::with_capacity(alphas.len() * betas.len() * (self.n_max + 1 - self.n_min));
        for n in self.n_min..=self.n_max {
            for a in &alphas {
                for b in &betas {
                    out.push((n, a.clone(), b.clone()));
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Check {
    #[serde(rename = "conjA")]
    ConjA,
    #[serde(rename = "conjB")]
    ConjB,
    #[serde(rename = "ccw")]
    Ccw,
    #[serde(rename = "thm4")]
    Thm4,
    #[serde(rename = "lemma_derivs")]
    LemmaDerivs,
    #[serde(rename = "thmB_chain")]
    Chains,
    #[serde(rename = "sec5_implications")]
    Sec5,
    #[serde(rename = "lemma_main")]
    LemmaMain,
    #[serde(rename = "cor_main")]
    CorMain,
    #[serde(rename = "fg_stability")]
    FgStability,
}

impl Check {
    pub const ALL: [Check; 10] = [
        Check::ConjA,
        Check::ConjB,
        Check::Ccw,
        Check::Thm4,
        Check::LemmaDerivs,
        Check::Chains,
        Check::Sec5,
        Check::LemmaMain,
        Check::CorMain,
        Check::FgStability,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Check::ConjA => "conjA",
            Check::ConjB => "conjB",
            Check::Ccw => "ccw",
            Check::Thm4 => "thm4",
            Check::LemmaDerivs => "lemma_derivs",
            Check::Chains => "thmB_chain",
            Check::Sec5 => "sec5_implications",
            Check::LemmaMain => "lemma_main",
            Check::CorMain => "cor_main",
            Check::FgStability => "fg_stability",
        }
    }

    /// Report id or the short command-line name.
    pub fn from_name(name: &str) -> Option<Check> {
        let alias = match name {
            "lemma-derivs" => Some(Check::LemmaDerivs),
            "chains" => Some(Check::Chains),
            "sec5" => Some(Check::Sec5),
            "lemma-main" => Some(Check::LemmaMain),
            "cor-main" => Some(Check::CorMain),
            "fg" => Some(Check::FgStability),
            _ => None,
        };
        alias.or_else(|| Check::ALL.into_iter().find(|c| c.id() == name))
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanVerdict {
    Holds,
    Fails,
    Undefined,
}

impl fmt::Display for ScanVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScanVerdict::Holds => "holds",
            ScanVerdict::Fails => "fails",
            ScanVerdict::Undefined => "undefined",
        })
    }
}

/// Grid coordinates plus check-specific inputs such as the pair under test
/// or the value of `A`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridPoint {
    pub n: usize,
    #[serde(with = "crate::ratio_str")]
    pub alpha: Rational,
    #[serde(with = "crate::ratio_str")]
    pub beta: Rational,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, String>,
}

impl GridPoint {
    pub fn new(n: usize, alpha: Rational, beta: Rational) -> Self {
        GridPoint {
            n,
            alpha,
            beta,
            extra: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.extra.insert(key.to_string(), value.to_string());
        self
    }

    fn extra_str(&self, key: &str) -> Result<&str> {
        self.extra
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::InvalidInput(format!("grid point lacks {key:?}")))
    }

    fn extra_rational(&self, key: &str) -> Result<Rational> {
        parse_rational(self.extra_str(key)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub check_id: Check,
    #[serde(flatten)]
    pub point: GridPoint,
    /// Named parameter region the point falls in.
    pub region: String,
    /// Whether a proven statement covers this point, so a failure here is
    /// unexpected.
    pub claimed: bool,
    pub verdict: ScanVerdict,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub info: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    pub elapsed_ms: f64,
}

impl ScanReport {
    pub fn unexpected(&self) -> bool {
        self.claimed && self.verdict == ScanVerdict::Fails
    }
}

/// Counts by verdict, split by whether the point was claimed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub total: usize,
    pub holds: usize,
    pub fails: usize,
    pub undefined: usize,
    pub claimed_fails: usize,
    pub unclaimed_fails: usize,
    pub by_region: BTreeMap<String, BTreeMap<String, usize>>,
}

pub fn summarize(reports: &[ScanReport]) -> ScanSummary {
    let mut s = ScanSummary::default();
    for r in reports {
        s.total += 1;
        match r.verdict {
            ScanVerdict::Holds => s.holds += 1,
            ScanVerdict::Fails if r.claimed => {
                s.fails += 1;
                s.claimed_fails += 1
            }
            ScanVerdict::Fails => {
                s.fails += 1;
                s.unclaimed_fails += 1
            }
            ScanVerdict::Undefined => s.undefined += 1,
        }
        *s.by_region
            .entry(r.region.clone())
            .or_default()
            .entry(r.verdict.to_string())
            .or_default() += 1;
    }
    s
}

struct Outcome {
    region: &'static str,
    claimed: bool,
    verdict: ScanVerdict,
    info: BTreeMap<String, String>,
    detail: Value,
}

impl Outcome {
    fn new(region: &'static str, claimed: bool) -> Self {
        Outcome {
            region,
            claimed,
            verdict: ScanVerdict::Undefined,
            info: BTreeMap::new(),
            detail: Value::Null,
        }
    }

    fn undefined(region: &'static str, reason: impl Into<String>) -> Self {
        let mut o = Outcome::new(region, false);
        o.info.insert("reason".into(), reason.into());
        o
    }

    fn decide(mut self, holds: bool) -> Self {
        self.verdict = if holds { ScanVerdict::Holds } else { ScanVerdict::Fails };
        self
    }

    fn note(&mut self, key: &str, value: impl ToString) {
        self.info.insert(key.into(), value.to_string());
    }
}

fn phi_at(n: usize, alpha: &Rational, beta: &Rational, da: i64, db: i64) -> RatPoly {
    phi(&JacobiParams::new(n, alpha + int(da), beta + int(db)))
}

fn gt(x: &Rational, v: i64) -> bool {
    *x > int(v)
}

fn lt(x: &Rational, v: i64) -> bool {
    *x < int(v)
}

fn in_open(x: &Rational, lo: i64, hi: i64) -> bool {
    gt(x, lo) && lt(x, hi)
}

fn to_json<T: Serialize>(value: T) -> Value {
    serde_json::to_value(value).expect("serializable")
}

fn cert(outcome: &InterlaceOutcome) -> Value {
    to_json(outcome)
}

fn verdict_name(outcome: &InterlaceOutcome) -> &'static str {
    match outcome.verdict {
        crate::interlace::InterlaceVerdict::Strict => "strict",
        crate::interlace::InterlaceVerdict::Nonstrict => "nonstrict",
        crate::interlace::InterlaceVerdict::Fail => "fail",
    }
}

fn fine() -> Rational {
    rat(1, 1 << 20)
}

fn roots(p: &RatPoly) -> Result<RootList> {
    isolate(p, &fine())
}

fn eval_conj_a(pt: &GridPoint) -> Result<Outcome> {
    let (n, a, b) = (pt.n, &pt.alpha, &pt.beta);
    let region = if in_open(a, -1, 0) && gt(b, -1)
        || !lt(a, 0) && lt(a, 1) && gt(b, 0)
        || !lt(a, 1) && lt(a, 2) && gt(b, 1)
    {
        "cw_star"
    } else if in_open(a, -1, 1) && gt(b, -1) {
        "conjectured"
    } else {
        "outside"
    };
    if !gt(a, -1) || n < 2 {
        return Ok(Outcome::undefined(region, "needs alpha > -1 and n >= 2"));
    }
    let out = interlace_check(&phi_at(n, a, b, 0, 0), &phi_at(n - 1, a, b, 0, 0));
    let mut o = Outcome::new(region, region == "cw_star" && n >= 4);
    o.note("interlace", verdict_name(&out));
    o.detail = cert(&out);
    Ok(o.decide(out.is_strict()))
}

fn conj_b_region(a: &Rational, b: &Rational) -> &'static str {
    if in_open(a, -1, 0) && gt(b, 0) {
        "neg_alpha_pos_beta"
    } else if in_open(a, 0, 1) && gt(b, 1) {
        "pos_alpha_beta_gt_1"
    } else if in_open(b, -1, 0) && in_open(a, 0, 1) {
        "pocket"
    } else {
        "other"
    }
}

fn eval_conj_b(pt: &GridPoint) -> Result<Outcome> {
    let (n, a, b) = (pt.n, &pt.alpha, &pt.beta);
    let region = conj_b_region(a, b);
    let pair = pt.extra_str("pair")?;
    if !gt(a, -1) || n < 3 {
        return Ok(Outcome::undefined(region, "needs alpha > -1 and n >= 3"));
    }
    let (shift, claimed) = match pair {
        "main" => (0, region == "neg_alpha_pos_beta" || region == "pos_alpha_beta_gt_1"),
        // only the negative-alpha region is proven for the shifted pair
        "shifted" => (1, region == "neg_alpha_pos_beta"),
        other => return Err(Error::InvalidInput(format!("unknown pair {other:?}"))),
    };
    let out = interlace_check(&phi_at(n, a, b, shift, shift), &phi_at(n - 2, a, b, shift, shift));
    let mut o = Outcome::new(region, claimed && n >= 5);
    o.note("interlace", verdict_name(&out));
    o.detail = cert(&out);
    Ok(o.decide(out.is_strict()))
}

fn eval_ccw(pt: &GridPoint) -> Result<Outcome> {
    let (n, a, b) = (pt.n, &pt.alpha, &pt.beta);
    let region = if in_open(a, -1, 1) && gt(b, -1) {
        "ccw"
    } else if !lt(a, 1) && lt(a, 2) && gt(b, 0) {
        "remark_alpha"
    } else if in_open(a, -1, 0) && gt(b, -2) {
        "remark_beta"
    } else {
        "outside"
    };
    let p = phi_at(n, a, b, 0, 0);
    if p.is_zero() {
        return Ok(Outcome::undefined(region, "phi vanishes identically"));
    }
    let verdict = all_negative_simple(&p)?;
    let mut o = Outcome::new(region, region != "outside");
    o.note("roots", to_json(verdict).as_str().unwrap_or_default());
    if verdict != RootVerdict::NegativeSimple {
        o.detail = json!({ "coeffs": p.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>() });
    }
    Ok(o.decide(verdict == RootVerdict::NegativeSimple))
}

fn eval_thm4(pt: &GridPoint) -> Result<Outcome> {
    let (n, a, b) = (pt.n, &pt.alpha, &pt.beta);
    let region = if in_open(a, -1, 0) && gt(b, -1) { "thm4" } else { "outside" };
    if n < 4 {
        return Ok(Outcome::undefined(region, "needs n >= 4"));
    }
    let v = stability_of_theorem4(n, a, b)?;
    let mut o = Outcome::new(region, region == "thm4");
    o.detail = to_json(&v.failure_witness);
    Ok(o.decide(v.stable))
}

fn eval_lemma_derivs(pt: &GridPoint) -> Result<Outcome> {
    let (n, a, b) = (pt.n, &pt.alpha, &pt.beta);
    let region = if in_open(a, -1, 1) && gt(b, -1) || !lt(a, 1) && lt(a, 2) && gt(b, 0) {
        "lemma"
    } else {
        "outside"
    };
    if n < 2 {
        return Ok(Outcome::undefined(region, "needs n >= 2"));
    }
    let polys = [
        ("phi_n'", phi_at(n, a, b, 0, 0).derivative()),
        ("phi_{n-1}'", phi_at(n - 1, a, b, 0, 0).derivative()),
        ("phi_n^(a,b-1)'", phi_at(n, a, b, 0, -1).derivative()),
    ];
    if polys.iter().any(|(_, p)| p.is_zero()) {
        return Ok(Outcome::undefined(region, "a derivative vanishes identically"));
    }
    let mut o = Outcome::new(region, region == "lemma");
    let mut holds = true;
    let mut failures = Vec::new();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let out = interlace_check(&polys[i].1, &polys[j].1);
        let key = format!("{} vs {}", polys[i].0, polys[j].0);
        o.note(&key, verdict_name(&out));
        if !out.interlaces() {
            holds = false;
            failures.push(json!({ "pair": key, "outcome": cert(&out) }));
        }
    }
    o.detail = Value::Array(failures);
    Ok(o.decide(holds))
}

/// Records `lhs < rhs` (or `<=`) in `failures` when it does not hold.
struct ChainLog {
    checked: usize,
    failures: Vec<String>,
}

impl ChainLog {
    fn new() -> Self {
        ChainLog {
            checked: 0,
            failures: Vec::new(),
        }
    }

    fn lt(&mut self, label: &str, lhs: (&str, &Zr), rhs: (&str, &Zr)) {
        self.checked += 1;
        if !lhs.1.lt(rhs.1) {
            self.failures.push(format!(
                "{label}: {} = {} < {} = {}",
                lhs.0,
                lhs.1.describe(),
                rhs.0,
                rhs.1.describe()
            ));
        }
    }
}

fn eval_chains(pt: &GridPoint) -> Result<Outcome> {
    let (n, a, b) = (pt.n, &pt.alpha, &pt.beta);
    let region = if in_open(a, -1, 0) && gt(b, 0) { "thm_b" } else { "outside" };
    if n < 5 || !gt(a, -1) {
        return Ok(Outcome::undefined(region, "needs n >= 5 and alpha > -1"));
    }
    let phi_n = phi_at(n, a, b, 0, 0);
    let phi_n1 = phi_at(n - 1, a, b, 0, 0);
    let up_n = phi_at(n, a, b, 1, 1);
    let up_n1 = phi_at(n - 1, a, b, 1, 1);
    let up_n2 = phi_at(n - 2, a, b, 1, 1);
    let (r_phi, r_n, r_n1, r_n2) = (roots(&phi_n)?, roots(&up_n)?, roots(&up_n1)?, roots(&up_n2)?);

    let mut log = ChainLog::new();
    for i in 1..=n / 2 {
        let z = |rl: &RootList, k: usize| zr(rl, k);
        let (p_i, n_i, n_im) = (z(&r_phi, i), z(&r_n, i), z(&r_n, i - 1));
        let (n1_i, n1_im) = (z(&r_n1, i), z(&r_n1, i - 1));
        let (n2_i, n2_im) = (z(&r_n2, i), z(&r_n2, i - 1));
        let s = |name: &str, k: usize| format!("zr_{k}({name})");
        let (ph, pn, pn1, pn2) = ("phi_n", "phi_n^+", "phi_{n-1}^+", "phi_{n-2}^+");
        let tag = |eq: &str| format!("{eq}[i={i}]");
        log.lt(&tag("z_rel0"), (&s(pn2, i), &n2_i), (&s(pn1, i), &n1_i));
        log.lt(&tag("z_rel0"), (&s(pn1, i), &n1_i), (&s(pn2, i - 1), &n2_im));
        log.lt(&tag("z_rel0"), (&s(pn1, i), &n1_i), (&s(pn, i), &n_i));
        log.lt(&tag("z_rel0"), (&s(pn, i), &n_i), (&s(pn1, i - 1), &n1_im));
        log.lt(&tag("cz_rel3"), (&s(pn2, i), &n2_i), (&s(ph, i), &p_i));
        log.lt(&tag("cz_rel3"), (&s(ph, i), &p_i), (&s(pn2, i - 1), &n2_im));
        log.lt(&tag("cz_rel5"), (&s(pn, i), &n_i), (&s(ph, i), &p_i));
        log.lt(&tag("cz_rel5"), (&s(ph, i), &p_i), (&s(pn, i - 1), &n_im));
        log.lt(&tag("z_rel1"), (&s(pn2, i), &n2_i), (&s(pn1, i), &n1_i));
        log.lt(&tag("z_rel1"), (&s(pn1, i), &n1_i), (&s(pn, i), &n_i));
        log.lt(&tag("z_rel1"), (&s(pn, i), &n_i), (&s(ph, i), &p_i));
        log.lt(&tag("z_rel1"), (&s(ph, i), &p_i), (&s(pn2, i - 1), &n2_im));
    }

    let mut pair_failures = Vec::new();
    let mut pairs_checked = 0;
    let mut check_pair = |name: String, p: &RatPoly, q: &RatPoly| {
        pairs_checked += 1;
        let out = interlace_check(p, q);
        if !out.is_strict() {
            pair_failures.push(json!({ "pair": name, "outcome": cert(&out) }));
        }
    };
    check_pair("(phi_n, mu phi_{n-2}^+)".into(), &phi_n, &up_n2.shift_mul_x(1));
    check_pair("(phi_n, mu phi_n^+)".into(), &phi_n, &up_n.shift_mul_x(1));
    let s = int(n as i64) + a + b;
    for big_a in &pt_a_values(pt)? {
        let [e2, o2, e3, o3] = comb_pairs(big_a, &s, &phi_n, &phi_n1, &up_n1, &up_n2);
        // Hermite-Biehler form: the even part against mu times the odd part
        check_pair(format!("r_comb_2[A={big_a}]"), &e2, &o2.shift_mul_x(1));
        check_pair(format!("r_comb_3[A={big_a}]"), &e3, &o3.shift_mul_x(1));
    }

    let mut o = Outcome::new(region, region == "thm_b");
    o.note("inequalities", log.checked);
    o.note("pairs", pairs_checked);
    let holds = log.failures.is_empty() && pair_failures.is_empty();
    o.detail = json!({ "inequalities": log.failures, "pairs": pair_failures });
    Ok(o.decide(holds))
}

fn pt_a_values(pt: &GridPoint) -> Result<Vec<Rational>> {
    match pt.extra.get("A") {
        Some(list) => list.split(',').map(parse_rational).collect(),
        None => Ok(vec![rat(1, 2), int(1), int(3)]),
    }
}

/// The four polynomials of the combination pairs, in the order
/// `[2 even(f), 2 odd(f), 2 even(g), 2 odd(g)]` written through `phi`:
///
/// ```text
/// 2A phi_n + s mu phi_{n-2}^+        A (s+1) phi_{n-1}^+ + 2 phi_{n-1}
/// (s+1) mu phi_{n-1}^+ + 2A phi_{n-1}    2 phi_n + A s phi_{n-2}^+
/// ```
///
/// with `s = n + alpha + beta` and `^+` meaning parameters `(alpha+1, beta+1)`.
fn comb_pairs(
    big_a: &Rational,
    s: &Rational,
    phi_n: &RatPoly,
    phi_n1: &RatPoly,
    up_n1: &RatPoly,
    up_n2: &RatPoly,
) -> [RatPoly; 4] {
    let two = int(2);
    let s1 = s + int(1);
    [
        &phi_n.scale(&(&two * big_a)) + &up_n2.shift_mul_x(1).scale(s),
        &up_n1.scale(&(big_a * &s1)) + &phi_n1.scale(&two),
        &up_n1.shift_mul_x(1).scale(&s1) + &phi_n1.scale(&(&two * big_a)),
        &phi_n.scale(&two) + &up_n2.scale(&(big_a * s)),
    ]
}

/// Whether the even/odd parts of `f(1; mu)` and `g(1; mu)` equal the
/// combinations of `phi` polynomials, exactly.
pub fn fg_split_identity(which: Intermediary, params: &JacobiParams, big_a: &Rational) -> Result<bool> {
    if params.n < 2 {
        return Err(Error::InvalidInput("split identity needs n >= 2".into()));
    }
    let (n, a, b) = (params.n, &params.alpha, &params.beta);
    let s = int(n as i64) + a + b;
    let phi_n = phi_at(n, a, b, 0, 0);
    let phi_n1 = phi_at(n - 1, a, b, 0, 0);
    let up_n1 = phi_at(n - 1, a, b, 1, 1);
    let up_n2 = phi_at(n - 2, a, b, 1, 1);
    let [e2, o2, e3, o3] = comb_pairs(big_a, &s, &phi_n, &phi_n1, &up_n1, &up_n2);
    let two = int(2);
    let (even, odd) = match which {
        Intermediary::F => (even_odd_split(&f_poly(params, big_a)), (e2, o2)),
        Intermediary::G => (even_odd_split(&g_poly(params, big_a)), (e3, o3)),
    };
    Ok(even.0.scale(&two) == odd.0 && even.1.scale(&two) == odd.1)
}

fn eval_sec5(pt: &GridPoint) -> Result<Outcome> {
    let (n, a, b) = (pt.n, &pt.alpha, &pt.beta);
    let lemma = pt.extra_str("lemma")?;
    if n < 4 || !gt(a, -1) {
        return Ok(Outcome::undefined("implication", "needs n >= 4 and alpha > -1"));
    }
    let (hypothesis, conclusion) = match lemma {
        "instr1" => {
            let (p0, p1, p2) = (phi_at(n, a, b, 0, 0), phi_at(n - 1, a, b, 0, 0), phi_at(n - 2, a, b, 0, 0));
            let pairwise = interlace_check(&p0, &p1).interlaces()
                && interlace_check(&p0, &p2).interlaces()
                && interlace_check(&p1, &p2).interlaces();
            let hyp = pairwise && {
                let (r0, r1, r2) = (roots(&p0)?, roots(&p1)?, roots(&p2)?);
                zr(&r2, 1).lt(&zr(&r1, 1)) && zr(&r1, 1).lt(&zr(&r0, 1)) && !zr(&r2, 1).is_neg_infinity()
            };
            let concl = interlace_check(&phi_at(n, a, b, 0, -1), &phi_at(n - 1, a, b, 0, -1));
            (hyp, concl)
        }
        "final" => {
            let p0 = phi_at(n, a, b, 0, 0);
            let (u0, u1) = (phi_at(n, a, b, 1, 1), phi_at(n - 1, a, b, 1, 1));
            let pairwise = interlace_check(&p0, &u0).interlaces() && interlace_check(&p0, &u1).interlaces();
            let hyp = pairwise && {
                let (r0, ru0, ru1) = (roots(&p0)?, roots(&u0)?, roots(&u1)?);
                let z0 = zr(&r0, 1);
                !z0.is_neg_infinity()
                    && !zr(&ru1, 1).is_neg_infinity()
                    && zr(&ru1, 1).lt(&z0)
                    && zr(&ru0, 1).lt(&z0)
            };
            let concl = interlace_check(&phi_at(n, a, b, 1, 0), &phi_at(n - 1, a, b, 1, 0));
            (hyp, concl)
        }
        other => return Err(Error::InvalidInput(format!("unknown lemma {other:?}"))),
    };
    if !hypothesis {
        return Ok(Outcome::undefined("implication", "hypothesis does not hold"));
    }
    let mut o = Outcome::new("implication", true);
    o.note("conclusion", verdict_name(&conclusion));
    o.detail = cert(&conclusion);
    Ok(o.decide(conclusion.interlaces()))
}

fn eval_lemma_main(pt: &GridPoint) -> Result<Outcome> {
    let (n, a, b) = (pt.n, &pt.alpha, &pt.beta);
    if n < 4 || !gt(a, -1) || !(int(n as i64) + a + b).is_positive() {
        return Ok(Outcome::undefined("lemma_main", "needs n >= 4, alpha > -1, n + alpha + beta > 0"));
    }
    let shifted = phi_at(n, a, b, 0, -1);
    let (p0, p1) = (phi_at(n, a, b, 0, 0), phi_at(n - 1, a, b, 0, 0));
    let left_simple = all_negative_simple(&shifted)? == RootVerdict::NegativeSimple;
    let left_real = is_real_rooted(&shifted)?;
    let negative = all_negative_simple(&p0)? != RootVerdict::HasNonnegativeOrComplex
        && all_negative_simple(&p1)? != RootVerdict::HasNonnegativeOrComplex;
    let out = interlace_check(&p0, &p1);
    let strict_ok = left_simple == (negative && out.is_strict());
    let nonstrict_ok = left_real == (negative && out.interlaces());
    let zr_ok = !left_real || zr(&roots(&p1)?, 1).le(&zr(&roots(&p0)?, 1));

    let mut o = Outcome::new("lemma_main", true);
    o.note("shifted_simple_real", left_simple);
    o.note("shifted_real", left_real);
    o.note("interlace", verdict_name(&out));
    o.note("zr1_order", zr_ok);
    o.detail = json!({
        "strict_biconditional": strict_ok,
        "nonstrict_biconditional": nonstrict_ok,
        "zr1_order": zr_ok,
        "interlace": cert(&out),
    });
    Ok(o.decide(strict_ok && nonstrict_ok && zr_ok))
}

fn eval_cor_main(pt: &GridPoint) -> Result<Outcome> {
    let (n, a, b) = (pt.n, &pt.alpha, &pt.beta);
    let region = if in_open(a, -1, 1) && gt(b, 0) || !lt(a, 1) && lt(a, 2) && gt(b, 1) {
        "cor_main"
    } else {
        "outside"
    };
    if n < 4 || !gt(a, -1) {
        return Ok(Outcome::undefined(region, "needs n >= 4 and alpha > -1"));
    }
    let (p0, p1) = (phi_at(n, a, b, 0, 0), phi_at(n - 1, a, b, 0, 0));
    let plain = interlace_check(&p0, &p1);
    let with_mu = interlace_check(&p0, &p1.shift_mul_x(1));
    let mut o = Outcome::new(region, region == "cor_main");
    o.note("interlace", verdict_name(&plain));
    o.note("interlace_mu", verdict_name(&with_mu));
    o.detail = json!({ "plain": cert(&plain), "with_mu": cert(&with_mu) });
    Ok(o.decide(plain.interlaces() && with_mu.interlaces()))
}

fn eval_fg(pt: &GridPoint) -> Result<Outcome> {
    let (n, a, b) = (pt.n, &pt.alpha, &pt.beta);
    let which = match pt.extra_str("which")? {
        "f" => Intermediary::F,
        "g" => Intermediary::G,
        other => return Err(Error::InvalidInput(format!("unknown intermediary {other:?}"))),
    };
    let big_a = pt.extra_rational("A")?;
    let region = match which {
        Intermediary::F if in_open(a, -1, 1) && b.is_positive() => "f_stable",
        Intermediary::G if in_open(a, -1, 0) && b.is_positive() => "g_stable",
        _ => "outside",
    };
    if n < 4 || !big_a.is_positive() {
        return Ok(Outcome::undefined(region, "needs n > 3 and A > 0"));
    }
    let v = stability_of_fg(which, n, a, b, &big_a)?;
    let split = fg_split_identity(which, &JacobiParams::new(n, a.clone(), b.clone()), &big_a)?;
    let mut o = Outcome::new(region, region != "outside");
    o.note("stable", v.stable);
    o.note("split_identity", split);
    o.detail = to_json(&v.failure_witness);
    Ok(o.decide(v.stable && split))
}

fn evaluate_inner(check: Check, pt: &GridPoint) -> Result<Outcome> {
    match check {
        Check::ConjA => eval_conj_a(pt),
        Check::ConjB => eval_conj_b(pt),
        Check::Ccw => eval_ccw(pt),
        Check::Thm4 => eval_thm4(pt),
        Check::LemmaDerivs => eval_lemma_derivs(pt),
        Check::Chains => eval_chains(pt),
        Check::Sec5 => eval_sec5(pt),
        Check::LemmaMain => eval_lemma_main(pt),
        Check::CorMain => eval_cor_main(pt),
        Check::FgStability => eval_fg(pt),
    }
}

/// Runs one check at one point. Errors become `undefined` reports.
pub fn evaluate(check: Check, point: GridPoint) -> ScanReport {
    let start = Instant::now();
    let outcome = evaluate_inner(check, &point).unwrap_or_else(|e| Outcome::undefined("error", e.to_string()));
    let witness = (outcome.verdict == ScanVerdict::Fails).then(|| {
        json!({
            "check_id": check,
            "point": &point,
            "detail": outcome.detail,
        })
    });
    ScanReport {
        check_id: check,
        point,
        region: outcome.region.to_string(),
        claimed: outcome.claimed,
        verdict: outcome.verdict,
        info: outcome.info,
        witness,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

fn units(check: Check, grid: &GridSpec) -> Vec<GridPoint> {
    let a_list = grid.a_values.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",");
    let mut out = Vec::new();
    for (n, a, b) in grid.points() {
        let base = GridPoint::new(n, a, b);
        match check {
            Check::ConjB => {
                out.push(base.clone().with("pair", "main"));
                out.push(base.with("pair", "shifted"));
            }
            Check::Sec5 => {
                out.push(base.clone().with("lemma", "instr1"));
                out.push(base.with("lemma", "final"));
            }
            Check::Chains => out.push(base.with("A", &a_list)),
            Check::FgStability => {
                for which in ["f", "g"] {
                    for big_a in &grid.a_values {
                        out.push(base.clone().with("which", which).with("A", big_a));
                    }
                }
            }
            _ => out.push(base),
        }
    }
    out
}

/// Evaluates `check` over the grid in parallel; reports come back in
/// canonical order.
pub fn scan(check: Check, grid: &GridSpec) -> Vec<ScanReport> {
    let mut reports: Vec<ScanReport> = units(check, grid)
        .into_par_iter()
        .map(|pt| evaluate(check, pt))
        .collect();
    reports.sort_by(|x, y| (x.check_id, &x.point).cmp(&(y.check_id, &y.point)));
    if check == Check::ConjB {
        annotate_onsets(&mut reports, &grid.alpha.step);
    }
    reports
}

/// For a failing report whose neighbour at `alpha - step` holds, bisects the
/// gap twice and records the smallest failing `alpha` found as `onset_alpha`.
fn annotate_onsets(reports: &mut [ScanReport], step: &Rational) {
    let index: HashMap<GridPoint, ScanVerdict> = reports.iter().map(|r| (r.point.clone(), r.verdict)).collect();
    let onsets: Vec<Option<(Rational, Rational)>> = reports
        .par_iter()
        .map(|r| {
            if r.verdict != ScanVerdict::Fails {
                return None;
            }
            let mut below = r.point.clone();
            below.alpha = &r.point.alpha - step;
            if index.get(&below) != Some(&ScanVerdict::Holds) {
                return None;
            }
            let (mut lo, mut hi) = (below.alpha.clone(), r.point.alpha.clone());
            for _ in 0..2 {
                let mid = (&lo + &hi) / int(2);
                let mut probe = r.point.clone();
                probe.alpha = mid.clone();
                match evaluate(r.check_id, probe).verdict {
                    ScanVerdict::Fails => hi = mid,
                    _ => lo = mid,
                }
            }
            Some((lo, hi))
        })
        .collect();
    for (r, onset) in reports.iter_mut().zip(onsets) {
        if let Some((lo, hi)) = onset {
            r.info.insert("onset_alpha".into(), hi.to_string());
            r.info.insert("onset_bracket".into(), format!("{lo}:{hi}"));
        }
    }
}

pub fn scan_conjecture_a(grid: &GridSpec) -> Vec<ScanReport> {
    scan(Check::ConjA, grid)
}

pub fn scan_conjecture_b(grid: &GridSpec) -> Vec<ScanReport> {
    scan(Check::ConjB, grid)
}

pub fn scan_ccw(grid: &GridSpec) -> Vec<ScanReport> {
    scan(Check::Ccw, grid)
}

pub fn check_section2_lemma(grid: &GridSpec) -> Vec<ScanReport> {
    scan(Check::LemmaDerivs, grid)
}

pub fn check_chains(grid: &GridSpec) -> Vec<ScanReport> {
    scan(Check::Chains, grid)
}

pub fn check_section5(grid: &GridSpec) -> Vec<ScanReport> {
    scan(Check::Sec5, grid)
}

/// Re-evaluates the point named in a witness and returns the fresh verdict.
pub fn reverify_witness(witness: &Value) -> Result<ScanVerdict> {
    let check: Check = serde_json::from_value(witness["check_id"].clone())
        .map_err(|e| Error::InvalidInput(format!("witness check_id: {e}")))?;
    let point: GridPoint = serde_json::from_value(witness["point"].clone())
        .map_err(|e| Error::InvalidInput(format!("witness point: {e}")))?;
    let fresh = evaluate(check, point);
    if fresh.verdict == ScanVerdict::Undefined {
        if let Some(reason) = fresh.info.get("reason") {
            return Err(Error::InvalidInput(format!("witness point is undefined: {reason}")));
        }
    }
    Ok(fresh.verdict)
}

/// A failing report re-verifies when its witness alone reproduces the failure.
pub fn reverify(report: &ScanReport) -> Result<bool> {
    let witness = report
        .witness
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("report has no witness".into()))?;
    Ok(reverify_witness(witness)? == report.verdict)
}

/// Bisects on `alpha` for the onset of instability of `Phi_n(1; mu)` at
/// fixed `beta`, stopping once the bracket is narrower than `tol`. Returns
/// the bracket end at which the polynomial is unstable.
pub fn find_threshold_thm4(
    n: usize,
    beta: &Rational,
    bracket: (Rational, Rational),
    tol: &Rational,
) -> Result<Rational> {
    if !tol.is_positive() {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let (mut lo, mut hi) = bracket;
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let stable = |a: &Rational| stability_of_theorem4(n, a, beta).map(|v| v.stable);
    let lo_stable = stable(&lo)?;
    let hi_stable = stable(&hi)?;
    if lo_stable == hi_stable {
        return Err(Error::BracketDoesNotStraddle(if lo_stable { "stable" } else { "unstable" }));
    }
    while &hi - &lo >= *tol {
        let mid = (&lo + &hi) / int(2);
        if stable(&mid)? == lo_stable {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if lo_stable { hi } else { lo })
}

/// `-b_{m-1} / b_m`: the sum of the zeros of `p`, counted with multiplicity.
pub fn root_sum(p: &RatPoly) -> Result<Rational> {
    let m = p.degree().filter(|&m| m >= 1).ok_or(Error::InvalidInput("root sum needs degree >= 1".into()))?;
    Ok(-p.coeff(m - 1) / p.coeff(m))
}

/// Root sums of `phi_n` for `n = 4..=n_max`.
pub fn vieta_asymptotics(n_max: usize, alpha: &Rational, beta: &Rational) -> Result<Vec<(usize, Rational)>> {
    if n_max < 4 {
        return Err(Error::InvalidInput(format!("n_max must be >= 4, got {n_max}")));
    }
    (4..=n_max)
        .into_par_iter()
        .map(|n| Ok((n, root_sum(&phi_at(n, alpha, beta, 0, 0))?)))
        .collect()
}

pub type VietaRow = (usize, Rational);

/// Splits Vieta rows into even-`n` and odd-`n` subsequences.
pub fn split_by_parity(rows: &[VietaRow]) -> (Vec<VietaRow>, Vec<VietaRow>) {
    rows.iter().cloned().partition(|(n, _)| n % 2 == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(n: usize, a: Rational, b: Rational) -> GridPoint {
        GridPoint::new(n, a, b)
    }

    #[test]
    fn range_parsing() {
        let r: RationalRange = "-7/8:1/8:1/8".parse().unwrap();
        assert_eq!(r.values().len(), 9);
        assert_eq!(r.values()[0], rat(-7, 8));
        let single: RationalRange = "1/2".parse().unwrap();
        assert_eq!(single.values(), vec![rat(1, 2)]);
        assert!("1:0:1".parse::<RationalRange>().is_err());
        assert!("0:1:0".parse::<RationalRange>().is_err());
        assert_eq!(parse_n_range("4:20").unwrap(), (4, 20));
        assert!(parse_n_range("20:4").is_err());
    }

    #[test]
    fn check_names_round_trip() {
        for c in Check::ALL {
            assert_eq!(Check::from_name(c.id()), Some(c));
            let s = serde_json::to_string(&c).unwrap();
            assert_eq!(s, format!("\"{}\"", c.id()));
        }
        assert_eq!(Check::from_name("chains"), Some(Check::Chains));
        assert_eq!(Check::from_name("sec5"), Some(Check::Sec5));
        assert_eq!(Check::from_name("nope"), None);
    }

    #[test]
    fn conj_a_small_example() {
        let r = evaluate(Check::ConjA, point(4, int(0), int(0)));
        assert_eq!(r.verdict, ScanVerdict::Holds);
        let r = evaluate(Check::ConjA, point(4, int(-1), int(0)));
        assert_eq!(r.verdict, ScanVerdict::Undefined);
    }

    #[test]
    fn conj_b_pocket_witness_reverifies() {
        let pt = point(5, rat(29, 32), rat(-31, 32)).with("pair", "main");
        let r = evaluate(Check::ConjB, pt);
        assert_eq!(r.verdict, ScanVerdict::Fails);
        assert!(!r.claimed);
        let text = serde_json::to_string(&r).unwrap();
        let back: ScanReport = serde_json::from_str(&text).unwrap();
        assert!(reverify(&back).unwrap());
    }

    #[test]
    fn chain_examples() {
        for a_n in [(7, rat(-1, 2), int(1)), (5, rat(-1, 2), int(1))] {
            let r = evaluate(Check::Chains, point(a_n.0, a_n.1, a_n.2).with("A", "1/2,1,3"));
            assert_eq!(r.verdict, ScanVerdict::Holds, "{:?}", r.witness);
            assert!(r.claimed);
        }
    }

    #[test]
    fn lemma_derivs_examples() {
        for (n, a, b) in [(6, int(0), rat(1, 2)), (5, rat(3, 2), rat(1, 2)), (4, int(0), int(0))] {
            let r = evaluate(Check::LemmaDerivs, point(n, a, b));
            assert_eq!(r.verdict, ScanVerdict::Holds, "{:?}", r.witness);
        }
    }

    #[test]
    fn section5_example() {
        for lemma in ["instr1", "final"] {
            let r = evaluate(Check::Sec5, point(6, rat(-1, 2), rat(3, 2)).with("lemma", lemma));
            assert_eq!(r.verdict, ScanVerdict::Holds, "{lemma}: {:?}", r.info);
        }
    }

    #[test]
    fn thresholds() {
        let tol = rat(1, 100_000);
        let a = find_threshold_thm4(12, &rat(-4, 5), (rat(9, 10), int(1)), &tol).unwrap();
        assert!((crate::to_f64(&a) - 0.97842).abs() < 5e-4);
        let b = find_threshold_thm4(12, &rat(-9, 10), (rat(9, 10), int(1)), &tol).unwrap();
        assert!((crate::to_f64(&b) - 0.97140).abs() < 5e-4);
        assert!(a > b);
        let err = find_threshold_thm4(12, &rat(-4, 5), (rat(1, 2), rat(9, 10)), &tol).unwrap_err();
        assert!(matches!(err, Error::BracketDoesNotStraddle(_)));
    }

    #[test]
    fn vieta_small() {
        let rows = vieta_asymptotics(5, &int(0), &int(0)).unwrap();
        assert_eq!(rows[0], (4, rat(-3, 7)));
        assert_eq!(root_sum(&phi_at(3, &int(0), &int(0), 0, 0)).unwrap(), rat(-1, 15));
        let (even, odd) = split_by_parity(&rows);
        assert_eq!(even.len(), 1);
        assert_eq!(odd.len(), 1);
    }

    #[test]
    fn fg_splits_match() {
        let params = JacobiParams::new(5, rat(-1, 2), int(1));
        for which in [Intermediary::F, Intermediary::G] {
            assert!(fg_split_identity(which, &params, &int(1)).unwrap());
            assert!(fg_split_identity(which, &params, &rat(7, 3)).unwrap());
        }
    }

    #[test]
    fn scan_is_sorted_and_summarized() {
        let grid = GridSpec::new("-1/2:1/2:1/2".parse().unwrap(), "1/2:1:1/2".parse().unwrap(), 4, 6);
        let reports = scan_conjecture_a(&grid);
        assert_eq!(reports.len(), 18);
        assert!(reports.windows(2).all(|w| w[0].point <= w[1].point));
        let s = summarize(&reports);
        assert_eq!(s.total, 18);
        assert_eq!(s.claimed_fails, 0);
    }
}
