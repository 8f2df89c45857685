//! The free associative algebra with identity over [`ParamPoly`].
//!
//! An [`NCPoly`] is a finite linear combination of [`Word`]s over an
//! [`Alphabet`]. No relations are ever applied here: `AB` and `BA` are
//! distinct basis elements. Quotients by commutation relations live in
//! [`crate::rewrite`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalars::{forward_owned_binop, int, ParamPoly, Rational, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("generator `{0}` is declared more than once")]
    DuplicateGenerator(String),
    #[error("invalid generator name `{0}`")]
    InvalidName(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("operands belong to different alphabets")]
    ContextMismatch,
    #[error("malformed polynomial JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    #[serde(default)]
    pub central: bool,
}

impl Generator {
    pub fn new(name: &str) -> Self {
        Generator {
            name: name.to_string(),
            central: false,
        }
    }

    pub fn central(name: &str) -> Self {
        Generator {
            name: name.to_string(),
            central: true,
        }
    }
}

/// Index of a generator within its alphabet. The index order is the
/// canonical letter order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenId(u16);

impl GenId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Ordered set of generators; the algebra context shared by polynomials.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    gens: Vec<Generator>,
}

impl Alphabet {
    pub fn new(gens: Vec<Generator>) -> Result<Arc<Self>, AlgebraError> {
        for (i, g) in gens.iter().enumerate() {
            let valid = g
                .name
                .chars()
                .next()
                .is_some_and(|c| c.is_alphabetic() || c == '_')
                && g.name.chars().all(|c| c.is_alphanumeric() || c == '_');
            if !valid {
                return Err(AlgebraError::InvalidName(g.name.clone()));
            }
            if gens[..i].iter().any(|h| h.name == g.name) {
                return Err(AlgebraError::DuplicateGenerator(g.name.clone()));
            }
        }
        if gens.len() > u16::MAX as usize {
            return Err(AlgebraError::InvalidName("<alphabet too large>".into()));
        }
        Ok(Arc::new(Alphabet { gens }))
    }

    /// The two-letter alphabet `{A, B}` used by the binomial engines.
    pub fn standard() -> Arc<Self> {
        Alphabet::new(vec![Generator::new("A"), Generator::new("B")]).expect("valid alphabet")
    }

    pub fn lookup(&self, name: &str) -> Option<GenId> {
        self.gens
            .iter()
            .position(|g| g.name == name)
            .map(|i| GenId(i as u16))
    }

    pub fn generator(&self, id: GenId) -> &Generator {
        &self.gens[id.index()]
    }

    pub fn is_central(&self, id: GenId) -> bool {
        self.gens[id.index()].central
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = GenId> + '_ {
        (0..self.gens.len()).map(|i| GenId(i as u16))
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn word(&self, names: &[&str]) -> Result<Word, AlgebraError> {
        names
            .iter()
            .map(|n| {
                self.lookup(n)
                    .ok_or_else(|| AlgebraError::UnknownGenerator(n.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }

    pub fn word_names<'a>(&'a self, w: &'a Word) -> impl Iterator<Item = &'a str> + 'a {
        w.0.iter().map(|&id| self.gens[id.index()].name.as_str())
    }

    /// Renders a word with runs collapsed, e.g. `A^2*B*A`. The empty word is `1`.
    pub fn render_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < w.0.len() {
            let mut j = i;
            while j < w.0.len() && w.0[j] == w.0[i] {
                j += 1;
            }
            let name = &self.gens[w.0[i].index()].name;
            if j - i == 1 {
                parts.push(name.clone());
            } else {
                parts.push(format!("{name}^{}", j - i));
            }
            i = j;
        }
        parts.join("*")
    }
}

/// A monomial of the free algebra: a finite sequence of generators.
/// Ordered by length, then lexicographically by generator index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<GenId>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<GenId>) -> Self {
        Word(letters)
    }

    pub fn letter(id: GenId) -> Self {
        Word(vec![id])
    }

    pub fn letters(&self) -> &[GenId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn pow(&self, n: usize) -> Word {
        Word(self.0.repeat(n))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Element of the free algebra: a `ParamPoly`-weighted sum of words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NCPoly {
    alphabet: Arc<Alphabet>,
    terms: BTreeMap<Word, ParamPoly>,
}

impl NCPoly {
    pub fn zero(alphabet: &Arc<Alphabet>) -> Self {
        NCPoly {
            alphabet: Arc::clone(alphabet),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(alphabet: &Arc<Alphabet>) -> Self {
        NCPoly::monomial(alphabet, ParamPoly::one(), Word::empty())
    }

    pub fn generator(alphabet: &Arc<Alphabet>, name: &str) -> Result<Self, AlgebraError> {
        let id = alphabet
            .lookup(name)
            .ok_or_else(|| AlgebraError::UnknownGenerator(name.to_string()))?;
        Ok(NCPoly::from_word(alphabet, Word::letter(id)))
    }

    pub fn from_word(alphabet: &Arc<Alphabet>, word: Word) -> Self {
        NCPoly::monomial(alphabet, ParamPoly::one(), word)
    }

    pub fn monomial(alphabet: &Arc<Alphabet>, coeff: ParamPoly, word: Word) -> Self {
        let mut p = NCPoly::zero(alphabet);
        p.add_term(word, &coeff);
        p
    }

    /// Central scalar `c·1`.
    pub fn scalar(alphabet: &Arc<Alphabet>, coeff: ParamPoly) -> Self {
        NCPoly::monomial(alphabet, coeff, Word::empty())
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn same_context(&self, other: &NCPoly) -> bool {
        Arc::ptr_eq(&self.alphabet, &other.alphabet) || self.alphabet == other.alphabet
    }

    pub(crate) fn add_term(&mut self, word: Word, coeff: &ParamPoly) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &ParamPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, word: &Word) -> ParamPoly {
        self.terms.get(word).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Length of the longest word; `0` for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self, degree: usize) -> bool {
        self.terms.keys().all(|w| w.len() == degree)
    }

    /// Drops every word longer than `max_degree`.
    pub fn truncate(&self, max_degree: usize) -> NCPoly {
        NCPoly {
            alphabet: Arc::clone(&self.alphabet),
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.len() <= max_degree)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn checked_add(&self, other: &NCPoly) -> Result<NCPoly, AlgebraError> {
        if !self.same_context(other) {
            return Err(AlgebraError::ContextMismatch);
        }
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &NCPoly) -> Result<NCPoly, AlgebraError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &NCPoly) -> Result<NCPoly, AlgebraError> {
        if !self.same_context(other) {
            return Err(AlgebraError::ContextMismatch);
        }
        let mut out = NCPoly::zero(&self.alphabet);
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                out.add_term(wa.concat(wb), &(ca * cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &ParamPoly) -> NCPoly {
        let mut out = NCPoly::zero(&self.alphabet);
        for (w, v) in &self.terms {
            out.add_term(w.clone(), &(v * c));
        }
        out
    }

    pub fn scale_rat(&self, c: &Rational) -> NCPoly {
        self.scale(&ParamPoly::constant(c.clone()))
    }

    /// `p^0 = 1`, `p^n = p · p^(n-1)`.
    pub fn pow(&self, n: u32) -> NCPoly {
        let mut acc = NCPoly::one(&self.alphabet);
        for _ in 0..n {
            acc = self * &acc;
        }
        acc
    }

    /// Applies `f` to every coefficient, pruning zeros.
    pub fn map_coeffs<F: FnMut(&ParamPoly) -> ParamPoly>(&self, mut f: F) -> NCPoly {
        let mut out = NCPoly::zero(&self.alphabet);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), &f(c));
        }
        out
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_schema()).expect("polynomial JSON is always serializable")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_schema()).expect("polynomial JSON is always serializable")
    }

    fn to_schema(&self) -> NCPolyJson {
        NCPolyJson {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| TermJson {
                    coeff: c.clone(),
                    word: self.alphabet.word_names(w).map(str::to_string).collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(alphabet: &Arc<Alphabet>, json: &str) -> Result<NCPoly, AlgebraError> {
        let value: serde_json::Value =
            serde_json::from_str(json).map_err(|e| AlgebraError::Json(e.to_string()))?;
        NCPoly::from_json_value(alphabet, value)
    }

    pub fn from_json_value(
        alphabet: &Arc<Alphabet>,
        value: serde_json::Value,
    ) -> Result<NCPoly, AlgebraError> {
        let schema: NCPolyJson =
            serde_json::from_value(value).map_err(|e| AlgebraError::Json(e.to_string()))?;
        let mut out = NCPoly::zero(alphabet);
        for term in schema.terms {
            let names: Vec<&str> = term.word.iter().map(String::as_str).collect();
            out.add_term(alphabet.word(&names)?, &term.coeff);
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    coeff: ParamPoly,
    word: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct NCPolyJson {
    terms: Vec<TermJson>,
}

impl Add<&NCPoly> for &NCPoly {
    type Output = NCPoly;
    fn add(self, rhs: &NCPoly) -> NCPoly {
        self.checked_add(rhs).expect("cannot add polynomials over different alphabets")
    }
}

impl Sub<&NCPoly> for &NCPoly {
    type Output = NCPoly;
    fn sub(self, rhs: &NCPoly) -> NCPoly {
        self.checked_sub(rhs)
            .expect("cannot subtract polynomials over different alphabets")
    }
}

impl Mul<&NCPoly> for &NCPoly {
    type Output = NCPoly;
    fn mul(self, rhs: &NCPoly) -> NCPoly {
        self.checked_mul(rhs)
            .expect("cannot multiply polynomials over different alphabets")
    }
}

forward_owned_binop!(NCPoly, Add, add);
forward_owned_binop!(NCPoly, Sub, sub);
forward_owned_binop!(NCPoly, Mul, mul);

impl Neg for &NCPoly {
    type Output = NCPoly;
    fn neg(self) -> NCPoly {
        self.map_coeffs(|c| -c)
    }
}

impl Neg for NCPoly {
    type Output = NCPoly;
    fn neg(self) -> NCPoly {
        -&self
    }
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let term = render_term(c, &self.alphabet.render_word(w), w.is_empty());
            match (i, term.strip_prefix('-')) {
                (0, _) => f.write_str(&term)?,
                (_, Some(rest)) => write!(f, " - {rest}")?,
                (_, None) => write!(f, " + {term}")?,
            }
        }
        Ok(())
    }
}

/// Renders `coeff * body`, parenthesizing multi-term coefficients.
pub(crate) fn render_term(coeff: &ParamPoly, body: &str, body_is_one: bool) -> String {
    if body_is_one {
        return if coeff.len() > 1 {
            format!("({coeff})")
        } else {
            coeff.to_string()
        };
    }
    if coeff.len() > 1 {
        return format!("({coeff})*{body}");
    }
    if coeff.is_one() {
        return body.to_string();
    }
    if (-coeff).is_one() {
        return format!("-{body}");
    }
    format!("{coeff}*{body}")
}

/// `d_x(p) = x·p − p·x`.
pub fn nc_derivation(x: &NCPoly, p: &NCPoly) -> NCPoly {
    &(x * p) - &(p * x)
}

/// `{(a + d_b)^k 1}`: iterate `X_0 = 1`, `X_{j+1} = a·X_j + d_b(X_j)`.
pub fn a_plus_db_pow_one(a: &NCPoly, b: &NCPoly, k: u32) -> NCPoly {
    a_plus_db_iterates(a, b, k)
        .pop()
        .expect("iterates always include X_0")
}

/// All iterates `X_0, ..., X_k` of `X ↦ a·X + d_b(X)` starting from `1`.
pub fn a_plus_db_iterates(a: &NCPoly, b: &NCPoly, k: u32) -> Vec<NCPoly> {
    let mut out = Vec::with_capacity(k as usize + 1);
    let mut x = NCPoly::one(a.alphabet());
    for _ in 0..k {
        let next = &(a * &x) + &nc_derivation(b, &x);
        out.push(std::mem::replace(&mut x, next));
    }
    out.push(x);
    out
}

/// Random element with small non-zero integer coefficients and up to
/// `max_terms` words of length at most `max_degree`.
pub fn random_ncpoly<R: Rng + ?Sized>(
    rng: &mut R,
    alphabet: &Arc<Alphabet>,
    max_degree: usize,
    max_terms: usize,
) -> NCPoly {
    let mut out = NCPoly::zero(alphabet);
    if alphabet.is_empty() {
        return out;
    }
    let n_terms = rng.random_range(1..=max_terms.max(1));
    for _ in 0..n_terms {
        let len = rng.random_range(0..=max_degree);
        let letters = (0..len)
            .map(|_| GenId(rng.random_range(0..alphabet.len()) as u16))
            .collect();
        let mut c = rng.random_range(-3i64..=3);
        if c == 0 {
            c = 1;
        }
        out.add_term(Word(letters), &ParamPoly::constant(int(c)));
    }
    out
}
