//! Expansion engines for `(A + B)^n` in a non-commutative algebra.
//!
//! Every engine produces an element of the free algebra. The general
//! engines ([`Expander::theorem1_expand`], [`Expander::corollary1_expand`],
//! [`Expander::theorem2_expand`]) agree with the brute-force power
//! [`Expander::brute`] exactly, without any relation. The closed forms only
//! agree modulo their relation family, see [`crate::rewrite`].

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::freealg::{a_plus_db_iterates, nc_derivation, AlgebraError, Alphabet, NCPoly};
use crate::rewrite::{Family, RelationSystem, RewriteError};
use crate::scalars::{binom_coeff, factorial, int, inv_factorial, ParamPoly, Rational};

/// Name of the scalar in the relation `d_B A = h A²`.
pub const HSQ_PARAM: &str = "h";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BinomialError {
    #[error("A_{{{n},{k}}} is undefined: k must not exceed floor(n/2)")]
    OutOfRange { n: u32, k: u32 },
    #[error("method `{method}` requires the `{required}` relation family")]
    Incompatible { method: Method, required: Family },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

/// How an expansion is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Brute,
    Theorem1,
    Corollary1,
    Theorem2,
    ClosedHsq,
    ClosedWeyl,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Brute,
        Method::Theorem1,
        Method::Corollary1,
        Method::Theorem2,
        Method::ClosedHsq,
        Method::ClosedWeyl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Theorem1 => "theorem1",
            Method::Corollary1 => "corollary1",
            Method::Theorem2 => "theorem2",
            Method::ClosedHsq => "closed_hsq",
            Method::ClosedWeyl => "closed_weyl",
        }
    }

    /// The relation family a closed form is only valid under.
    pub fn required_family(self) -> Option<Family> {
        match self {
            Method::ClosedHsq => Some(Family::Hsq),
            Method::ClosedWeyl => Some(Family::Weyl),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method `{s}`"))
    }
}

/// Two computation routes for the same quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Via {
    Recurrence,
    /// `D_k` as `(A + d_B)^k 1 − A^k`.
    Difference,
    /// `A_{n,k}` from its factorial formula.
    Closed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpIdentity {
    /// `e^{A+B} = [e^{A+d_B} 1] e^B`
    Corollary2,
    /// `e^{A+B} = e^A e^B + Σ_k (1/k!) D_k e^B`
    Corollary3,
}

/// `γ_n(h) = (1 + h)(1 + 2h)⋯(1 + (n−1)h)`, `γ_0 = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaFactor {
    pub n: u32,
    pub value: ParamPoly,
}

/// Builds `γ_n` with `γ_{k+1} = (1 + k·h) γ_k`.
pub fn gamma(n: u32) -> GammaFactor {
    let h = ParamPoly::param(HSQ_PARAM);
    let mut value = ParamPoly::one();
    for k in 1..n {
        value = &value * &(&ParamPoly::one() + &h.scale(&int(k as i64)));
    }
    GammaFactor { n, value }
}

/// Central coefficient `A_{n,k}` of `M_{n−2k}` in the Weyl expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylCoeff {
    pub n: u32,
    pub k: u32,
    /// A rational multiple of `C^k`.
    pub value: NCPoly,
}

impl WeylCoeff {
    /// The rational in front of `C^k`.
    pub fn scalar(&self) -> Rational {
        self.value
            .terms()
            .next()
            .and_then(|(_, c)| c.as_constant())
            .unwrap_or_default()
    }
}

/// Expansion engines bound to an alphabet containing `A` and `B` (and `C`
/// for the Weyl closed form).
#[derive(Clone, Debug)]
pub struct Expander {
    alphabet: Arc<Alphabet>,
    a: NCPoly,
    b: NCPoly,
}

impl Default for Expander {
    fn default() -> Self {
        Expander::new(&Alphabet::standard()).expect("standard alphabet has A and B")
    }
}

impl Expander {
    pub fn new(alphabet: &Arc<Alphabet>) -> Result<Self, BinomialError> {
        Ok(Expander {
            alphabet: Arc::clone(alphabet),
            a: NCPoly::generator(alphabet, "A")?,
            b: NCPoly::generator(alphabet, "B")?,
        })
    }

    pub fn for_system(sys: &RelationSystem) -> Result<Self, BinomialError> {
        Expander::new(sys.alphabet())
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn a(&self) -> &NCPoly {
        &self.a
    }

    pub fn b(&self) -> &NCPoly {
        &self.b
    }

    pub fn one(&self) -> NCPoly {
        NCPoly::one(&self.alphabet)
    }

    /// `(A + B)^n` by repeated multiplication: the oracle.
    pub fn brute(&self, n: u32) -> NCPoly {
        (&self.a + &self.b).pow(n)
    }

    /// `M_n = Σ_k C(n,k) A^k B^(n−k)`.
    pub fn m_n(&self, n: u32) -> NCPoly {
        let mut out = NCPoly::zero(&self.alphabet);
        for k in 0..=n {
            let term = &self.a.pow(k) * &self.b.pow(n - k);
            out = &out + &term.scale_rat(&binom_coeff(n, k));
        }
        out
    }

    /// `Σ_k C(n,k) {(A + d_B)^k 1} B^(n−k)`.
    pub fn theorem1_expand(&self, n: u32) -> NCPoly {
        let iterates = a_plus_db_iterates(&self.a, &self.b, n);
        let mut out = NCPoly::zero(&self.alphabet);
        for (k, x) in (0..=n).zip(&iterates) {
            let term = x * &self.b.pow(n - k);
            out = &out + &term.scale_rat(&binom_coeff(n, k));
        }
        out
    }

    /// The essential non-commutative part `D_k = (A + d_B)^k 1 − A^k`.
    ///
    /// `Via::Recurrence` uses `D_{j+1} = d_B A^j + (A + d_B) D_j`, `D_0 = 0`.
    /// Any other route takes the difference.
    pub fn essential_d(&self, k: u32, via: Via) -> NCPoly {
        match via {
            Via::Recurrence => {
                let mut d = NCPoly::zero(&self.alphabet);
                for j in 0..k {
                    let next = &(&nc_derivation(&self.b, &self.a.pow(j)) + &(&self.a * &d))
                        + &nc_derivation(&self.b, &d);
                    d = next;
                }
                d
            }
            Via::Difference | Via::Closed => {
                let x = a_plus_db_iterates(&self.a, &self.b, k)
                    .pop()
                    .expect("iterates include X_0");
                &x - &self.a.pow(k)
            }
        }
    }

    /// `M_n + Σ_k C(n,k) D_k B^(n−k)`.
    pub fn corollary1_expand(&self, n: u32) -> NCPoly {
        let mut out = self.m_n(n);
        for k in 0..=n {
            let term = &self.essential_d(k, Via::Recurrence) * &self.b.pow(n - k);
            out = &out + &term.scale_rat(&binom_coeff(n, k));
        }
        out
    }

    /// `M_n + Σ_{k=0}^{n−2} (A + B)^k d_B M_(n−1−k)`, with `(A + B)^k` taken
    /// from the brute-force power.
    pub fn theorem2_expand(&self, n: u32) -> NCPoly {
        let mut out = self.m_n(n);
        for k in 0..n.saturating_sub(1) {
            let term = &self.brute(k) * &nc_derivation(&self.b, &self.m_n(n - 1 - k));
            out = &out + &term;
        }
        out
    }

    /// `M_1 M_n − M_(n+1) − d_B M_n`; identically zero.
    pub fn lemma3_defect(&self, n: u32) -> NCPoly {
        let lhs = &self.m_n(1) * &self.m_n(n);
        &(&lhs - &self.m_n(n + 1)) - &nc_derivation(&self.b, &self.m_n(n))
    }

    /// `M_1^n − M_n − Σ_{k=0}^{n−2} M_1^k d_B M_(n−1−k)`; identically zero.
    pub fn lemma4_defect(&self, n: u32) -> NCPoly {
        let m1 = self.m_n(1);
        let mut out = &m1.pow(n) - &self.m_n(n);
        for k in 0..n.saturating_sub(1) {
            out = &out - &(&m1.pow(k) * &nc_derivation(&self.b, &self.m_n(n - 1 - k)));
        }
        out
    }

    /// `Σ_k C(n,k) γ_k(h) A^k B^(n−k)`, valid modulo `d_B A = h A²`.
    pub fn closed_form_hsq(&self, n: u32) -> NCPoly {
        let mut out = NCPoly::zero(&self.alphabet);
        for k in 0..=n {
            let coeff = gamma(k).value.scale(&binom_coeff(n, k));
            out = &out + &(&self.a.pow(k) * &self.b.pow(n - k)).scale(&coeff);
        }
        out
    }

    fn c(&self) -> Result<NCPoly, BinomialError> {
        Ok(NCPoly::generator(&self.alphabet, "C")?)
    }

    /// `A_{n,k}` either from `A_{m+1,j} = A_{m,j} + (m + 2 − 2j) C A_{m,j−1}`
    /// with `A_{m,0} = 1`, or from `n! / ((n−2k)! k! 2^k) C^k`.
    pub fn weyl_coeff(&self, n: u32, k: u32, via: Via) -> Result<WeylCoeff, BinomialError> {
        if 2 * k > n {
            return Err(BinomialError::OutOfRange { n, k });
        }
        let c = self.c()?;
        let value = match via {
            Via::Closed | Via::Difference => {
                let denom = factorial(n - 2 * k) * factorial(k) * int(2).pow(k as i32);
                c.pow(k).scale_rat(&(factorial(n) / denom))
            }
            Via::Recurrence => {
                // row[j] holds A_{m,j} for j <= m/2
                let mut row = vec![self.one()];
                for m in 0..n {
                    let mut next = Vec::with_capacity((m as usize).div_ceil(2) + 1);
                    for j in 0..=m.div_ceil(2) {
                        let keep = row.get(j as usize).cloned().unwrap_or_else(|| self.zero());
                        let value = if j == 0 {
                            keep
                        } else {
                            let factor = int(i64::from(m) + 2 - 2 * i64::from(j));
                            &keep + &(&c * &row[j as usize - 1]).scale_rat(&factor)
                        };
                        next.push(value);
                    }
                    row = next;
                }
                row.swap_remove(k as usize)
            }
        };
        Ok(WeylCoeff { n, k, value })
    }

    fn zero(&self) -> NCPoly {
        NCPoly::zero(&self.alphabet)
    }

    /// `Σ_{k=0}^{floor(n/2)} M_(n−2k) A_{n,k}`, valid modulo `BA = AB + C`.
    pub fn closed_form_weyl(&self, n: u32) -> Result<NCPoly, BinomialError> {
        let mut out = self.zero();
        for k in 0..=n / 2 {
            let coeff = self.weyl_coeff(n, k, Via::Closed)?;
            out = &out + &(&self.m_n(n - 2 * k) * &coeff.value);
        }
        Ok(out)
    }

    /// Renders the Weyl closed form in the `M`-basis, e.g. `M_3 + 3*C*M_1`.
    pub fn weyl_m_basis_text(&self, n: u32) -> Result<String, BinomialError> {
        let mut parts = Vec::new();
        for k in 0..=n / 2 {
            let r = self.weyl_coeff(n, k, Via::Closed)?.scalar();
            let mut factors = Vec::new();
            if r != int(1) {
                factors.push(r.to_string());
            }
            match k {
                0 => {}
                1 => factors.push("C".to_string()),
                _ => factors.push(format!("C^{k}")),
            }
            if n - 2 * k > 0 || factors.is_empty() {
                factors.push(format!("M_{}", n - 2 * k));
            }
            parts.push(factors.join("*"));
        }
        Ok(parts.join(" + "))
    }

    /// Truncation of `e^{A+B}` minus the chosen right-hand side, both cut
    /// at total degree `order`. Zero for both identities.
    pub fn exp_identity_defect(&self, which: ExpIdentity, order: u32) -> NCPoly {
        let mut lhs = self.zero();
        for n in 0..=order {
            lhs = &lhs + &self.brute(n).scale_rat(&inv_factorial(n));
        }
        let b_pows: Vec<NCPoly> = (0..=order).map(|j| self.b.pow(j)).collect();
        let mut rhs = self.zero();
        match which {
            ExpIdentity::Corollary2 => {
                let iterates = a_plus_db_iterates(&self.a, &self.b, order);
                for k in 0..=order {
                    for j in 0..=order - k {
                        let w = inv_factorial(k) * inv_factorial(j);
                        rhs = &rhs + &(&iterates[k as usize] * &b_pows[j as usize]).scale_rat(&w);
                    }
                }
            }
            ExpIdentity::Corollary3 => {
                for i in 0..=order {
                    for j in 0..=order - i {
                        let w = inv_factorial(i) * inv_factorial(j);
                        rhs = &rhs + &(&self.a.pow(i) * &b_pows[j as usize]).scale_rat(&w);
                    }
                }
                // D_0 = D_1 = 0, so the correction starts at k = 2
                for k in 2..=order {
                    let d = self.essential_d(k, Via::Recurrence);
                    for j in 0..=order - k {
                        let w = inv_factorial(k) * inv_factorial(j);
                        rhs = &rhs + &(&d * &b_pows[j as usize]).scale_rat(&w);
                    }
                }
            }
        }
        &lhs - &rhs
    }
}

/// Both sides of an expansion identity, packaged for reporting.
#[derive(Clone, Debug)]
pub struct ExpansionReport {
    pub n: u32,
    pub method: Method,
    pub result: NCPoly,
    pub relation: Option<String>,
    pub oracle_match: bool,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    n: u32,
    method: Method,
    relation: Option<&'a str>,
    oracle_match: bool,
    result: serde_json::Value,
}

impl ExpansionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ReportJson {
            n: self.n,
            method: self.method,
            relation: self.relation.as_deref(),
            oracle_match: self.oracle_match,
            result: self.result.to_json_value(),
        })
        .expect("report JSON is always serializable")
    }
}

/// Runs one engine and compares it with the brute-force power, in the
/// free algebra or modulo `relation`.
pub fn expand(
    method: Method,
    n: u32,
    relation: Option<&RelationSystem>,
) -> Result<ExpansionReport, BinomialError> {
    if let Some(required) = method.required_family() {
        if relation.and_then(RelationSystem::builtin_family) != Some(required) {
            return Err(BinomialError::Incompatible { method, required });
        }
    }
    let ex = match relation {
        Some(sys) => Expander::for_system(sys)?,
        None => Expander::default(),
    };
    let raw = match method {
        Method::Brute => ex.brute(n),
        Method::Theorem1 => ex.theorem1_expand(n),
        Method::Corollary1 => ex.corollary1_expand(n),
        Method::Theorem2 => ex.theorem2_expand(n),
        Method::ClosedHsq => ex.closed_form_hsq(n),
        Method::ClosedWeyl => ex.closed_form_weyl(n)?,
    };
    let oracle = ex.brute(n);
    let (result, oracle_match) = match relation {
        Some(sys) => {
            let result = sys.normal_form(&raw)?;
            let matches = result == sys.normal_form(&oracle)?;
            (result, matches)
        }
        None => {
            let matches = raw == oracle;
            (raw, matches)
        }
    };
    Ok(ExpansionReport {
        n,
        method,
        result,
        relation: relation.map(|s| s.name().to_string()),
        oracle_match,
    })
}
