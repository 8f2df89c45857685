//! Differential operators on polynomials in `x`.
//!
//! A [`DiffOp`] is a sum of `c · x^a D^b` with `D = d/dx`, always kept
//! normal-ordered (powers of `x` to the left). Composition re-orders with
//! the Leibniz rule `D^b x^c = Σ_i C(b,i) c!/(c−i)! x^(c−i) D^(b−i)`.
//! Operators act on [`Poly1`], so applying them to the seed `1` never
//! leaves the polynomial ring.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::binomial::Expander;
use crate::freealg::{render_term, AlgebraError, Alphabet, NCPoly};
use crate::rewrite::{Family, RelationSystem};
use crate::scalars::{binom_coeff, factorial, forward_owned_binop, int, ParamPoly, Rational};

/// Name of the scalar in `B = λ d/dx`.
pub const LAMBDA_PARAM: &str = "lambda";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiffOpError {
    #[error("generator `{0}` has no operator image")]
    Unmapped(String),
    #[error("malformed polynomial JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// `m! / (m − b)!`, zero when `b > m`.
fn falling(m: u32, b: u32) -> Rational {
    if b > m {
        return int(0);
    }
    (m - b + 1..=m).fold(int(1), |acc, i| acc * int(i64::from(i)))
}

/// Univariate polynomial in `x` with [`ParamPoly`] coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly1 {
    coeffs: BTreeMap<u32, ParamPoly>,
}

impl Poly1 {
    pub fn zero() -> Self {
        Poly1::default()
    }

    pub fn one() -> Self {
        Poly1::monomial(0, ParamPoly::one())
    }

    pub fn x_pow(n: u32) -> Self {
        Poly1::monomial(n, ParamPoly::one())
    }

    pub fn monomial(degree: u32, coeff: ParamPoly) -> Self {
        let mut p = Poly1::zero();
        p.add_term(degree, &coeff);
        p
    }

    fn add_term(&mut self, degree: u32, coeff: &ParamPoly) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(degree).or_default();
        *entry += coeff;
        if entry.is_zero() {
            self.coeffs.remove(&degree);
        }
    }

    pub fn coeff(&self, degree: u32) -> ParamPoly {
        self.coeffs.get(&degree).cloned().unwrap_or_default()
    }

    /// Terms in ascending degree.
    pub fn terms(&self) -> impl Iterator<Item = (u32, &ParamPoly)> {
        self.coeffs.iter().map(|(&d, c)| (d, c))
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, c: &ParamPoly) -> Poly1 {
        let mut out = Poly1::zero();
        for (&d, v) in &self.coeffs {
            out.add_term(d, &(v * c));
        }
        out
    }

    pub fn substitute(&self, name: &str, value: &Rational) -> Poly1 {
        let mut out = Poly1::zero();
        for (&d, v) in &self.coeffs {
            out.add_term(d, &v.substitute(name, value));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("polynomial JSON is always serializable")
    }

    pub fn from_json(json: &str) -> Result<Poly1, DiffOpError> {
        #[derive(Deserialize)]
        struct Schema {
            coeffs: BTreeMap<String, ParamPoly>,
        }
        let schema: Schema =
            serde_json::from_str(json).map_err(|e| DiffOpError::Json(e.to_string()))?;
        let mut out = Poly1::zero();
        for (key, c) in schema.coeffs {
            let d = key
                .parse::<u32>()
                .map_err(|_| DiffOpError::Json(format!("invalid degree key `{key}`")))?;
            out.add_term(d, &c);
        }
        Ok(out)
    }
}

/// `{"coeffs":{"<degree>":"<coefficient>", ...}}`, highest degree first.
impl Serialize for Poly1 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        struct Coeffs<'a>(&'a BTreeMap<u32, ParamPoly>);
        impl Serialize for Coeffs<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let mut map = serializer.serialize_map(Some(self.0.len()))?;
                for (d, c) in self.0.iter().rev() {
                    map.serialize_entry(&d.to_string(), c)?;
                }
                map.end()
            }
        }
        let mut map = serializer.serialize_map(Some(1))?;
        map.serialize_entry("coeffs", &Coeffs(&self.coeffs))?;
        map.end()
    }
}

impl fmt::Display for Poly1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (i, (&d, c)) in self.coeffs.iter().rev().enumerate() {
            let body = match d {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{d}"),
            };
            let term = render_term(c, &body, d == 0);
            match (i, term.strip_prefix('-')) {
                (0, _) => f.write_str(&term)?,
                (_, Some(rest)) => write!(f, " - {rest}")?,
                (_, None) => write!(f, " + {term}")?,
            }
        }
        Ok(())
    }
}

impl Add<&Poly1> for &Poly1 {
    type Output = Poly1;
    fn add(self, rhs: &Poly1) -> Poly1 {
        let mut out = self.clone();
        for (&d, c) in &rhs.coeffs {
            out.add_term(d, c);
        }
        out
    }
}

impl Sub<&Poly1> for &Poly1 {
    type Output = Poly1;
    fn sub(self, rhs: &Poly1) -> Poly1 {
        self + &(-rhs)
    }
}

impl Mul<&Poly1> for &Poly1 {
    type Output = Poly1;
    fn mul(self, rhs: &Poly1) -> Poly1 {
        let mut out = Poly1::zero();
        for (&da, ca) in &self.coeffs {
            for (&db, cb) in &rhs.coeffs {
                out.add_term(da + db, &(ca * cb));
            }
        }
        out
    }
}

impl Neg for &Poly1 {
    type Output = Poly1;
    fn neg(self) -> Poly1 {
        self.scale(&ParamPoly::from(-1))
    }
}

forward_owned_binop!(Poly1, Add, add);
forward_owned_binop!(Poly1, Sub, sub);
forward_owned_binop!(Poly1, Mul, mul);

/// Normal-ordered differential operator `Σ c_(a,b) x^a D^b`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiffOp {
    terms: BTreeMap<(u32, u32), ParamPoly>,
}

impl DiffOp {
    pub fn zero() -> Self {
        DiffOp::default()
    }

    pub fn identity() -> Self {
        DiffOp::term(0, 0, ParamPoly::one())
    }

    pub fn x() -> Self {
        DiffOp::term(1, 0, ParamPoly::one())
    }

    pub fn d() -> Self {
        DiffOp::term(0, 1, ParamPoly::one())
    }

    pub fn scalar(c: ParamPoly) -> Self {
        DiffOp::term(0, 0, c)
    }

    /// `c · x^x_power D^order`.
    pub fn term(x_power: u32, order: u32, c: ParamPoly) -> Self {
        let mut op = DiffOp::zero();
        op.add_term(x_power, order, &c);
        op
    }

    fn add_term(&mut self, a: u32, b: u32, c: &ParamPoly) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((a, b)).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    /// Terms keyed by `(power of x, order of D)`.
    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), &ParamPoly)> {
        self.terms.iter().map(|(&k, c)| (k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &ParamPoly) -> DiffOp {
        let mut out = DiffOp::zero();
        for (&(a, b), v) in &self.terms {
            out.add_term(a, b, &(v * c));
        }
        out
    }

    pub fn apply(&self, p: &Poly1) -> Poly1 {
        let mut out = Poly1::zero();
        for (&(a, b), c) in &self.terms {
            for (&m, v) in &p.coeffs {
                if b > m {
                    continue;
                }
                let k = falling(m, b);
                out.add_term(m - b + a, &(c * v).scale(&k));
            }
        }
        out
    }

    /// `self ∘ other`, re-normalized.
    pub fn compose(&self, other: &DiffOp) -> DiffOp {
        let mut out = DiffOp::zero();
        for (&(a, b), cf) in &self.terms {
            for (&(c, d), cg) in &other.terms {
                let base = cf * cg;
                for i in 0..=b.min(c) {
                    let k = binom_coeff(b, i) * falling(c, i);
                    out.add_term(a + c - i, b + d - i, &base.scale(&k));
                }
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> DiffOp {
        let mut acc = DiffOp::identity();
        for _ in 0..n {
            acc = self.compose(&acc);
        }
        acc
    }

    /// `self^n` applied to `p`, one application at a time.
    pub fn apply_pow(&self, n: u32, p: &Poly1) -> Poly1 {
        (0..n).fold(p.clone(), |acc, _| self.apply(&acc))
    }
}

impl Add<&DiffOp> for &DiffOp {
    type Output = DiffOp;
    fn add(self, rhs: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (&(a, b), c) in &rhs.terms {
            out.add_term(a, b, c);
        }
        out
    }
}

impl Sub<&DiffOp> for &DiffOp {
    type Output = DiffOp;
    fn sub(self, rhs: &DiffOp) -> DiffOp {
        self + &rhs.scale(&ParamPoly::from(-1))
    }
}

impl Mul<&DiffOp> for &DiffOp {
    type Output = DiffOp;
    fn mul(self, rhs: &DiffOp) -> DiffOp {
        self.compose(rhs)
    }
}

forward_owned_binop!(DiffOp, Add, add);
forward_owned_binop!(DiffOp, Sub, sub);
forward_owned_binop!(DiffOp, Mul, mul);

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (&(a, b), c)) in self.terms.iter().enumerate() {
            let mut factors = Vec::new();
            match a {
                0 => {}
                1 => factors.push("x".to_string()),
                _ => factors.push(format!("x^{a}")),
            }
            match b {
                0 => {}
                1 => factors.push("D".to_string()),
                _ => factors.push(format!("D^{b}")),
            }
            let term = render_term(c, &factors.join("*"), factors.is_empty());
            match (i, term.strip_prefix('-')) {
                (0, _) => f.write_str(&term)?,
                (_, Some(rest)) => write!(f, " - {rest}")?,
                (_, None) => write!(f, " + {term}")?,
            }
        }
        Ok(())
    }
}

/// Algebra homomorphism from the free algebra to operators, fixed by the
/// image of each generator.
#[derive(Clone, Debug)]
pub struct Realization {
    alphabet: Arc<Alphabet>,
    images: Vec<DiffOp>,
}

impl Realization {
    pub fn new(alphabet: &Arc<Alphabet>, images: &[(&str, DiffOp)]) -> Result<Self, DiffOpError> {
        let images = alphabet
            .generators()
            .iter()
            .map(|g| {
                images
                    .iter()
                    .find(|(n, _)| *n == g.name)
                    .map(|(_, op)| op.clone())
                    .ok_or_else(|| DiffOpError::Unmapped(g.name.clone()))
            })
            .collect::<Result<_, _>>()?;
        Ok(Realization {
            alphabet: Arc::clone(alphabet),
            images,
        })
    }

    /// `A = x`, `B = λ D`, and `C = λ` when the alphabet has `C`.
    pub fn lambda_d(alphabet: &Arc<Alphabet>) -> Result<Self, DiffOpError> {
        let lambda = ParamPoly::param(LAMBDA_PARAM);
        Realization::new(
            alphabet,
            &[
                ("A", DiffOp::x()),
                ("B", DiffOp::d().scale(&lambda)),
                ("C", DiffOp::scalar(lambda)),
            ],
        )
    }

    /// `A = x`, `B = x² D`.
    pub fn x2d(alphabet: &Arc<Alphabet>) -> Result<Self, DiffOpError> {
        Realization::new(
            alphabet,
            &[("A", DiffOp::x()), ("B", DiffOp::term(2, 1, ParamPoly::one()))],
        )
    }

    pub fn realize(&self, p: &NCPoly) -> Result<DiffOp, DiffOpError> {
        if p.alphabet() != &self.alphabet {
            return Err(AlgebraError::ContextMismatch.into());
        }
        let mut out = DiffOp::zero();
        for (w, c) in p.terms() {
            let op = w
                .letters()
                .iter()
                .fold(DiffOp::identity(), |acc, g| acc.compose(&self.images[g.index()]));
            out = &out + &op.scale(c);
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HermiteVia {
    /// `(x − D)^n 1`
    Operator,
    /// `n! Σ_k (−1)^k x^(n−2k) / ((n−2k)! k! 2^k)`
    ExplicitSum,
    /// `He_(n+1) = x He_n − n He_(n−1)`
    RecurrenceOracle,
}

/// Probabilists' Hermite polynomial `He_n`.
pub fn hermite_he(n: u32, via: HermiteVia) -> Poly1 {
    match via {
        HermiteVia::Operator => (DiffOp::x() - DiffOp::d()).apply_pow(n, &Poly1::one()),
        HermiteVia::ExplicitSum => {
            let mut out = Poly1::zero();
            for k in 0..=n / 2 {
                let sign = if k % 2 == 0 { int(1) } else { int(-1) };
                let denom = factorial(n - 2 * k) * factorial(k) * int(2).pow(k as i32);
                let c = factorial(n) * sign / denom;
                out = &out + &Poly1::monomial(n - 2 * k, c.into());
            }
            out
        }
        HermiteVia::RecurrenceOracle => {
            let (mut prev, mut cur) = (Poly1::zero(), Poly1::one());
            for m in 0..n {
                let next = &(&Poly1::x_pow(1) * &cur) - &prev.scale(&ParamPoly::from(i64::from(m)));
                prev = std::mem::replace(&mut cur, next);
            }
            cur
        }
    }
}

/// `Σ_k x^(n−2k) n!/((n−2k)! k! 2^k) λ^k`, the value of `(x + λD)^n 1`.
pub fn lambda_expansion(n: u32) -> Poly1 {
    let lambda = ParamPoly::param(LAMBDA_PARAM);
    let mut out = Poly1::zero();
    for k in 0..=n / 2 {
        let denom = factorial(n - 2 * k) * factorial(k) * int(2).pow(k as i32);
        let c = lambda.pow(k).scale(&(factorial(n) / denom));
        out = &out + &Poly1::monomial(n - 2 * k, c);
    }
    out
}

/// Compares `(x + x²D)^n x^seed` with `Σ_k n!/(n−k)! x^k (x²D)^(n−k) x^seed`.
pub fn x2d_check(n: u32, seed_degree: u32) -> bool {
    let a = DiffOp::x();
    let b = DiffOp::term(2, 1, ParamPoly::one());
    let seed = Poly1::x_pow(seed_degree);
    let lhs = (&a + &b).apply_pow(n, &seed);
    let mut rhs_op = DiffOp::zero();
    for k in 0..=n {
        let c = factorial(n) / factorial(n - k);
        rhs_op = &rhs_op + &a.pow(k).compose(&b.pow(n - k)).scale(&c.into());
    }
    lhs == rhs_op.apply(&seed)
}

/// Realizes the Weyl closed form with `A = x`, `B = λD`, `C = λ` and
/// applies it to `1`.
pub fn weyl_closed_form_on_one(n: u32) -> Result<Poly1, DiffOpError> {
    let sys = RelationSystem::family(Family::Weyl);
    let ex = Expander::for_system(&sys).expect("weyl alphabet has A and B");
    let closed = ex
        .closed_form_weyl(n)
        .expect("weyl alphabet has C");
    let normal = sys
        .normal_form(&closed)
        .expect("built-in weyl system terminates");
    let op = Realization::lambda_d(sys.alphabet())?.realize(&normal)?;
    Ok(op.apply(&Poly1::one()))
}
