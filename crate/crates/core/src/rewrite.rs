//! Normal-ordering rewrite systems.
//!
//! A [`RelationSystem`] quotients the free algebra by adjacent-swap rules
//! `g_j g_i → replacement` where `g_j` comes after `g_i` in the canonical
//! letter order (central generators first, then the rest in declaration
//! order). Central generators commute with everything without an explicit
//! rule. A non-central out-of-order pair with no rule is left alone, so a
//! system with no rules is the free algebra itself.
//!
//! Termination rests on the word measure
//! `(non-central degree, letter counts from the last generator down, inversions)`
//! compared lexicographically. Every admissible rule strictly lowers it and
//! the measure is compatible with concatenation.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::freealg::{random_ncpoly, AlgebraError, Alphabet, GenId, Generator, NCPoly, Word};
use crate::scalars::ParamPoly;

/// Default bound on rule applications per `normal_form` call.
pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("rewrite budget of {0} rule applications exhausted; the system may not terminate")]
    BudgetExhausted(usize),
    #[error("invalid relation system: {0}")]
    Invalid(String),
    #[error("malformed relation system JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// The built-in relation families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `BA = AB`
    Commutative,
    /// `BA = AB + h·A²`, i.e. `d_B A = h A²`
    Hsq,
    /// `BA = AB + C` with `C` central
    Weyl,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Commutative, Family::Hsq, Family::Weyl];

    pub fn name(self) -> &'static str {
        match self {
            Family::Commutative => "commutative",
            Family::Hsq => "hsq",
            Family::Weyl => "weyl",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = RewriteError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| RewriteError::Invalid(format!("unknown relation family `{s}`")))
    }
}

/// Which redex a single rewrite step contracts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    #[default]
    Leftmost,
    Rightmost,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// The pair is already in canonical order, so it can never be a redex.
    InOrder,
    /// Pairs involving a central generator are swapped implicitly.
    CentralPair,
    /// A replacement term neither transposes the pair nor lowers the measure.
    NotDecreasing { word: String },
    /// A replacement term is itself reducible.
    NotNormal { word: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub pair: (String, String),
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (l, r) = &self.pair;
        match &self.kind {
            ViolationKind::InOrder => write!(f, "rule {l}*{r}: pair is already in canonical order"),
            ViolationKind::CentralPair => {
                write!(f, "rule {l}*{r}: central generators commute implicitly")
            }
            ViolationKind::NotDecreasing { word } => write!(
                f,
                "rule {l}*{r}: term {word} neither transposes the pair nor lowers the termination measure"
            ),
            ViolationKind::NotNormal { word } => {
                write!(f, "rule {l}*{r}: replacement term {word} is not in normal form")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Set for user-defined systems: strategy independence has only been
    /// established for the built-in families.
    pub confluence_unverified: bool,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Ordering used for termination and for the reduction worklist.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Measure {
    noncentral_degree: usize,
    counts_desc: Vec<usize>,
    inversions: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationSystem {
    name: String,
    family: Option<Family>,
    alphabet: Arc<Alphabet>,
    rules: BTreeMap<(GenId, GenId), NCPoly>,
}

impl RelationSystem {
    pub fn family(family: Family) -> Self {
        let (alphabet, extra) = match family {
            Family::Commutative | Family::Hsq => (Alphabet::standard(), None),
            Family::Weyl => (
                Alphabet::new(vec![
                    Generator::central("C"),
                    Generator::new("A"),
                    Generator::new("B"),
                ])
                .expect("valid alphabet"),
                Some("C"),
            ),
        };
        let a = NCPoly::generator(&alphabet, "A").expect("A is declared");
        let b = NCPoly::generator(&alphabet, "B").expect("B is declared");
        let ab = &a * &b;
        let replacement = match family {
            Family::Commutative => ab,
            Family::Hsq => &ab + &a.pow(2).scale(&ParamPoly::param("h")),
            Family::Weyl => {
                &ab + &NCPoly::generator(&alphabet, extra.unwrap()).expect("C is declared")
            }
        };
        let mut rules = BTreeMap::new();
        let (ia, ib) = (alphabet.lookup("A").unwrap(), alphabet.lookup("B").unwrap());
        rules.insert((ib, ia), replacement);
        RelationSystem {
            name: family.name().to_string(),
            family: Some(family),
            alphabet,
            rules,
        }
    }

    /// The system with no relations: normal forms are the inputs.
    pub fn free(alphabet: &Arc<Alphabet>) -> Self {
        RelationSystem {
            name: "free".to_string(),
            family: None,
            alphabet: Arc::clone(alphabet),
            rules: BTreeMap::new(),
        }
    }

    /// Builds a user-defined system. The alphabet must list central
    /// generators first; each rule is keyed by the pair as it appears in a
    /// word, e.g. `("B", "A")` for `BA → ...`.
    pub fn new(
        name: &str,
        alphabet: &Arc<Alphabet>,
        rules: Vec<((&str, &str), NCPoly)>,
    ) -> Result<Self, RewriteError> {
        let gens = alphabet.generators();
        if let Some(pos) = gens.iter().position(|g| !g.central) {
            if let Some(g) = gens[pos..].iter().find(|g| g.central) {
                return Err(RewriteError::Invalid(format!(
                    "central generator `{}` must be listed before non-central ones",
                    g.name
                )));
            }
        }
        let mut map = BTreeMap::new();
        for ((l, r), replacement) in rules {
            let lookup = |n: &str| {
                alphabet
                    .lookup(n)
                    .ok_or_else(|| AlgebraError::UnknownGenerator(n.to_string()))
            };
            let key = (lookup(l)?, lookup(r)?);
            if replacement.alphabet() != alphabet {
                return Err(AlgebraError::ContextMismatch.into());
            }
            if map.insert(key, replacement).is_some() {
                return Err(RewriteError::Invalid(format!("duplicate rule for pair {l}*{r}")));
            }
        }
        Ok(RelationSystem {
            name: name.to_string(),
            family: None,
            alphabet: Arc::clone(alphabet),
            rules: map,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn builtin_family(&self) -> Option<Family> {
        self.family
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn rules(&self) -> impl Iterator<Item = ((GenId, GenId), &NCPoly)> {
        self.rules.iter().map(|(&k, v)| (k, v))
    }

    pub fn rule(&self, left: &str, right: &str) -> Option<&NCPoly> {
        let key = (self.alphabet.lookup(left)?, self.alphabet.lookup(right)?);
        self.rules.get(&key)
    }

    fn measure(&self, w: &Word) -> Measure {
        let n = self.alphabet.len();
        let mut counts = vec![0usize; n];
        let mut noncentral_degree = 0;
        let mut inversions = 0;
        for &g in w.letters() {
            // earlier letters that sort after g
            inversions += counts[g.index() + 1..].iter().sum::<usize>();
            counts[g.index()] += 1;
            if !self.alphabet.is_central(g) {
                noncentral_degree += 1;
            }
        }
        counts.reverse();
        Measure {
            noncentral_degree,
            counts_desc: counts,
            inversions,
        }
    }

    fn redex_at(&self, w: &Word, pos: usize) -> Option<Redex<'_>> {
        let (l, r) = (w.letters()[pos], w.letters()[pos + 1]);
        if l <= r {
            return None;
        }
        if self.alphabet.is_central(l) || self.alphabet.is_central(r) {
            return Some(Redex::Swap);
        }
        self.rules.get(&(l, r)).map(Redex::Rule)
    }

    fn find_redex(&self, w: &Word, strategy: Strategy) -> Option<(usize, Redex<'_>)> {
        let n = w.len().saturating_sub(1);
        let mut positions: Box<dyn Iterator<Item = usize>> = match strategy {
            Strategy::Leftmost => Box::new(0..n),
            Strategy::Rightmost => Box::new((0..n).rev()),
        };
        positions.find_map(|p| self.redex_at(w, p).map(|r| (p, r)))
    }

    /// True when no rule or implicit central swap applies anywhere in `w`.
    pub fn is_normal_word(&self, w: &Word) -> bool {
        self.find_redex(w, Strategy::Leftmost).is_none()
    }

    pub fn is_normal(&self, p: &NCPoly) -> bool {
        p.terms().all(|(w, _)| self.is_normal_word(w))
    }

    /// Checks that every rule is admissible and already normal.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (&(l, r), replacement) in &self.rules {
            let pair = (
                self.alphabet.generator(l).name.clone(),
                self.alphabet.generator(r).name.clone(),
            );
            let mut push = |kind| {
                violations.push(Violation {
                    pair: pair.clone(),
                    kind,
                })
            };
            if l <= r {
                push(ViolationKind::InOrder);
                continue;
            }
            if self.alphabet.is_central(l) || self.alphabet.is_central(r) {
                push(ViolationKind::CentralPair);
                continue;
            }
            let lhs = Word::from_letters(vec![l, r]);
            let transposed = Word::from_letters(vec![r, l]);
            let bound = self.measure(&lhs);
            for (w, _) in replacement.terms() {
                let m = self.measure(w);
                let lowers = (m.noncentral_degree, &m.counts_desc)
                    < (bound.noncentral_degree, &bound.counts_desc);
                if *w != transposed && !lowers {
                    push(ViolationKind::NotDecreasing {
                        word: self.alphabet.render_word(w),
                    });
                }
                if !self.is_normal_word(w) {
                    push(ViolationKind::NotNormal {
                        word: self.alphabet.render_word(w),
                    });
                }
            }
        }
        ValidationReport {
            violations,
            confluence_unverified: self.family.is_none(),
        }
    }

    pub fn normal_form(&self, p: &NCPoly) -> Result<NCPoly, RewriteError> {
        self.normal_form_with(p, Strategy::default(), DEFAULT_BUDGET)
    }

    /// Reduces `p` to ordered-monomial form.
    ///
    /// Pending words are kept in a worklist sorted by the termination
    /// measure and the largest is always rewritten first, so equal words
    /// produced along different paths are merged before being reduced.
    pub fn normal_form_with(
        &self,
        p: &NCPoly,
        strategy: Strategy,
        budget: usize,
    ) -> Result<NCPoly, RewriteError> {
        if p.alphabet() != &self.alphabet {
            return Err(AlgebraError::ContextMismatch.into());
        }
        let mut pending: BTreeMap<(Measure, Word), ParamPoly> = BTreeMap::new();
        let push = |pending: &mut BTreeMap<(Measure, Word), ParamPoly>, w: Word, c: ParamPoly| {
            match pending.entry((self.measure(&w), w)) {
                Entry::Vacant(e) => {
                    e.insert(c);
                }
                Entry::Occupied(mut e) => {
                    *e.get_mut() += &c;
                    if e.get().is_zero() {
                        e.remove();
                    }
                }
            }
        };
        for (w, c) in p.terms() {
            push(&mut pending, w.clone(), c.clone());
        }
        let mut out = NCPoly::zero(&self.alphabet);
        let mut applications = 0usize;
        while let Some(((_, w), c)) = pending.pop_last() {
            let Some((pos, redex)) = self.find_redex(&w, strategy) else {
                out.add_term(w, &c);
                continue;
            };
            applications += 1;
            if applications > budget {
                return Err(RewriteError::BudgetExhausted(budget));
            }
            let letters = w.letters();
            let prefix = Word::from_letters(letters[..pos].to_vec());
            let suffix = Word::from_letters(letters[pos + 2..].to_vec());
            match redex {
                Redex::Swap => {
                    let mid = Word::from_letters(vec![letters[pos + 1], letters[pos]]);
                    push(&mut pending, prefix.concat(&mid).concat(&suffix), c);
                }
                Redex::Rule(replacement) => {
                    for (rw, rc) in replacement.terms() {
                        push(&mut pending, prefix.concat(rw).concat(&suffix), &c * rc);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Equality in the quotient algebra.
    pub fn quotient_eq(&self, p: &NCPoly, q: &NCPoly) -> Result<bool, RewriteError> {
        Ok(self.normal_form(p)? == self.normal_form(q)?)
    }

    /// Compares leftmost and rightmost reduction on random inputs and
    /// returns the first input on which they disagree.
    pub fn check_confluence<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        samples: usize,
        max_degree: usize,
    ) -> Result<Option<NCPoly>, RewriteError> {
        for _ in 0..samples {
            let p = random_ncpoly(rng, &self.alphabet, max_degree, 4);
            let left = self.normal_form_with(&p, Strategy::Leftmost, DEFAULT_BUDGET)?;
            let right = self.normal_form_with(&p, Strategy::Rightmost, DEFAULT_BUDGET)?;
            if left != right {
                return Ok(Some(p));
            }
        }
        Ok(None)
    }

    /// Loads `{"alphabet":[{"name":..,"central":..}],"rules":[{"pair":[..],"replacement":<NCPoly JSON>}]}`.
    /// Generators are reordered so central ones come first.
    pub fn from_json(json: &str) -> Result<Self, RewriteError> {
        let doc: SystemJson =
            serde_json::from_str(json).map_err(|e| RewriteError::Json(e.to_string()))?;
        let (mut gens, rest): (Vec<Generator>, Vec<Generator>) =
            doc.alphabet.into_iter().partition(|g| g.central);
        gens.extend(rest);
        let alphabet = Alphabet::new(gens)?;
        let mut rules = Vec::with_capacity(doc.rules.len());
        for rule in &doc.rules {
            let replacement = NCPoly::from_json_value(&alphabet, rule.replacement.clone())?;
            rules.push(((rule.pair[0].as_str(), rule.pair[1].as_str()), replacement));
        }
        RelationSystem::new(doc.name.as_deref().unwrap_or("custom"), &alphabet, rules)
    }

    pub fn to_json(&self) -> String {
        let doc = SystemJson {
            name: Some(self.name.clone()),
            alphabet: self.alphabet.generators().to_vec(),
            rules: self
                .rules
                .iter()
                .map(|(&(l, r), rep)| RuleJson {
                    pair: [
                        self.alphabet.generator(l).name.clone(),
                        self.alphabet.generator(r).name.clone(),
                    ],
                    replacement: rep.to_json_value(),
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("relation system JSON is always serializable")
    }
}

enum Redex<'a> {
    Swap,
    Rule(&'a NCPoly),
}

#[derive(Serialize, Deserialize)]
struct SystemJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    alphabet: Vec<Generator>,
    rules: Vec<RuleJson>,
}

#[derive(Serialize, Deserialize)]
struct RuleJson {
    pair: [String; 2],
    replacement: serde_json::Value,
}

#[cfg(test)]
mod tests {
    use super::{
        random_ncpoly, AlgebraError, Alphabet, Family, Generator, NCPoly, ParamPoly,
        RelationSystem, RewriteError, ViolationKind,
    };
    use crate::freealg::nc_derivation;
    use crate::scalars::int;
    use proptest::prelude::*;
    use super::Strategy as Reduction;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gen(sys: &RelationSystem, name: &str) -> NCPoly {
        NCPoly::generator(sys.alphabet(), name).unwrap()
    }

    fn word(sys: &RelationSystem, names: &[&str]) -> NCPoly {
        NCPoly::from_word(sys.alphabet(), sys.alphabet().word(names).unwrap())
    }

    #[test]
    fn family_rules() {
        let comm = RelationSystem::family(Family::Commutative);
        assert_eq!(comm.rules().count(), 1);
        assert_eq!(comm.rule("B", "A").unwrap().to_string(), "A*B");
        let hsq = RelationSystem::family(Family::Hsq);
        assert_eq!(hsq.rule("B", "A").unwrap().to_string(), "h*A^2 + A*B");
        let weyl = RelationSystem::family(Family::Weyl);
        assert_eq!(weyl.rule("B", "A").unwrap().to_string(), "C + A*B");
        assert!(weyl.alphabet().is_central(weyl.alphabet().lookup("C").unwrap()));
        assert_eq!("weyl".parse::<Family>().unwrap(), Family::Weyl);
        assert!("nope".parse::<Family>().is_err());
    }

    #[test]
    fn builtin_families_validate() {
        for f in Family::ALL {
            let report = RelationSystem::family(f).validate();
            assert!(report.is_ok(), "{f}: {:?}", report.violations);
            assert!(!report.confluence_unverified);
        }
    }

    #[test]
    fn inadmissible_rules_are_reported() {
        let alpha = Alphabet::standard();
        let b2 = NCPoly::from_word(&alpha, alpha.word(&["B", "B"]).unwrap());
        let sys = RelationSystem::new("bad", &alpha, vec![(("B", "A"), b2)]).unwrap();
        let report = sys.validate();
        assert!(!report.is_ok());
        assert!(report.confluence_unverified);
        assert_eq!(
            report.violations[0].kind,
            ViolationKind::NotDecreasing { word: "B^2".into() }
        );
        assert!(report.violations[0].to_string().contains("B*A"));

        let ab = NCPoly::from_word(&alpha, alpha.word(&["A", "B"]).unwrap());
        let in_order = RelationSystem::new("bad", &alpha, vec![(("A", "B"), ab.clone())]).unwrap();
        assert_eq!(in_order.validate().violations[0].kind, ViolationKind::InOrder);

        // BA → AB + BA: the second term is reducible and does not decrease
        let ba = NCPoly::from_word(&alpha, alpha.word(&["B", "A"]).unwrap());
        let looping = RelationSystem::new("loop", &alpha, vec![(("B", "A"), &ab + &ba)]).unwrap();
        let kinds: Vec<_> = looping.validate().violations.into_iter().map(|v| v.kind).collect();
        assert!(kinds.contains(&ViolationKind::NotNormal { word: "B*A".into() }));
        assert!(matches!(
            looping.normal_form_with(&ba, Reduction::Leftmost, 1000),
            Err(RewriteError::BudgetExhausted(1000))
        ));
    }

    #[test]
    fn construction_errors() {
        let alpha = Alphabet::standard();
        let ab = NCPoly::from_word(&alpha, alpha.word(&["A", "B"]).unwrap());
        assert!(matches!(
            RelationSystem::new("x", &alpha, vec![(("B", "Z"), ab.clone())]),
            Err(RewriteError::Algebra(AlgebraError::UnknownGenerator(_)))
        ));
        assert!(matches!(
            RelationSystem::new("x", &alpha, vec![(("B", "A"), ab.clone()), (("B", "A"), ab.clone())]),
            Err(RewriteError::Invalid(_))
        ));
        let misordered = Alphabet::new(vec![Generator::new("A"), Generator::central("C")]).unwrap();
        assert!(matches!(
            RelationSystem::new("x", &misordered, vec![]),
            Err(RewriteError::Invalid(_))
        ));
        let weyl = RelationSystem::family(Family::Weyl);
        assert_eq!(
            weyl.normal_form(&ab),
            Err(RewriteError::Algebra(AlgebraError::ContextMismatch))
        );
    }

    #[test]
    fn normal_form_examples() {
        let weyl = RelationSystem::family(Family::Weyl);
        let nf = weyl.normal_form(&word(&weyl, &["B", "A"])).unwrap();
        assert_eq!(nf, &word(&weyl, &["A", "B"]) + &gen(&weyl, "C"));
        let nf = weyl.normal_form(&word(&weyl, &["B", "B", "A"])).unwrap();
        let expected = &word(&weyl, &["A", "B", "B"]) + &word(&weyl, &["C", "B"]).scale_rat(&int(2));
        assert_eq!(nf, expected);

        let hsq = RelationSystem::family(Family::Hsq);
        let nf = hsq.normal_form(&word(&hsq, &["B", "A", "A"])).unwrap();
        let expected = &word(&hsq, &["A", "A", "B"])
            + &word(&hsq, &["A", "A", "A"]).scale(&"2*h".parse().unwrap());
        assert_eq!(nf, expected);
    }

    #[test]
    fn central_letters_move_to_the_front() {
        let weyl = RelationSystem::family(Family::Weyl);
        let nf = weyl.normal_form(&word(&weyl, &["A", "C", "B", "C"])).unwrap();
        assert_eq!(nf, word(&weyl, &["C", "C", "A", "B"]));
    }

    #[test]
    fn quotient_eq_examples() {
        let comm = RelationSystem::family(Family::Commutative);
        assert!(comm.quotient_eq(&word(&comm, &["A", "B"]), &word(&comm, &["B", "A"])).unwrap());

        let weyl = RelationSystem::family(Family::Weyl);
        let (a, b, c) = (gen(&weyl, "A"), gen(&weyl, "B"), gen(&weyl, "C"));
        let lhs = (&a + &b).pow(2);
        let rhs = &(&(&a.pow(2) + &(&a * &b).scale_rat(&int(2))) + &b.pow(2)) + &c;
        assert!(weyl.quotient_eq(&lhs, &rhs).unwrap());

        let free = RelationSystem::free(&Alphabet::standard());
        assert!(free.validate().is_ok());
        assert!(!free.quotient_eq(&word(&free, &["A", "B"]), &word(&free, &["B", "A"])).unwrap());
    }

    #[test]
    fn normal_forms_are_sorted_and_idempotent() {
        for f in Family::ALL {
            let sys = RelationSystem::family(f);
            let sum = &gen(&sys, "A") + &gen(&sys, "B");
            let sum = if f == Family::Weyl { &sum + &gen(&sys, "C") } else { sum };
            let nf = sys.normal_form(&sum.pow(10)).unwrap();
            for (w, _) in nf.terms() {
                assert!(w.letters().windows(2).all(|p| p[0] <= p[1]), "{f}");
            }
            assert_eq!(sys.normal_form(&nf).unwrap(), nf);
        }
    }

    #[test]
    fn terminates_on_worst_case_words() {
        for f in Family::ALL {
            let sys = RelationSystem::family(f);
            let worst = &gen(&sys, "B").pow(5) * &gen(&sys, "A").pow(5);
            let nf = sys.normal_form(&worst).unwrap();
            assert!(sys.is_normal(&nf));
        }
    }

    #[test]
    fn strategies_agree_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for f in Family::ALL {
            let sys = RelationSystem::family(f);
            assert_eq!(sys.check_confluence(&mut rng, 200, 6).unwrap(), None, "{f}");
        }
    }

    #[test]
    fn weyl_generator_c_is_central() {
        let weyl = RelationSystem::family(Family::Weyl);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = gen(&weyl, "C");
        for _ in 0..100 {
            let x = random_ncpoly(&mut rng, weyl.alphabet(), 4, 4);
            assert!(weyl.normal_form(&nc_derivation(&c, &x)).unwrap().is_zero());
        }
    }

    #[test]
    fn derivation_transport() {
        let hsq = RelationSystem::family(Family::Hsq);
        let (a, b) = (gen(&hsq, "A"), gen(&hsq, "B"));
        for k in 1..=8u32 {
            let lhs = hsq.normal_form(&nc_derivation(&b, &a.pow(k))).unwrap();
            let rhs = a.pow(k + 1).scale(&"h".parse::<ParamPoly>().unwrap().scale(&int(k as i64)));
            assert_eq!(lhs, rhs, "k={k}");
        }
        let weyl = RelationSystem::family(Family::Weyl);
        let (a, b, c) = (gen(&weyl, "A"), gen(&weyl, "B"), gen(&weyl, "C"));
        for k in 1..=8u32 {
            let lhs = weyl.normal_form(&nc_derivation(&b, &a.pow(k))).unwrap();
            let rhs = (&c * &a.pow(k - 1)).scale_rat(&int(k as i64));
            assert_eq!(lhs, rhs, "k={k}");
        }
    }

    #[test]
    fn json_round_trip_and_reordering() {
        let json = r#"{"alphabet":[{"name":"A"},{"name":"B"},{"name":"C","central":true}],
            "rules":[{"pair":["B","A"],"replacement":{"terms":[{"coeff":"1","word":["A","B"]},{"coeff":"1","word":["C"]}]}}]}"#;
        let sys = RelationSystem::from_json(json).unwrap();
        assert_eq!(sys.name(), "custom");
        assert_eq!(sys.alphabet(), RelationSystem::family(Family::Weyl).alphabet());
        let report = sys.validate();
        assert!(report.is_ok() && report.confluence_unverified);
        let back = RelationSystem::from_json(&sys.to_json()).unwrap();
        assert_eq!(back, sys);
        let weyl = RelationSystem::family(Family::Weyl);
        let p = word(&weyl, &["B", "B", "A", "C"]);
        assert_eq!(sys.normal_form(&p).unwrap(), weyl.normal_form(&p).unwrap());
        assert!(matches!(RelationSystem::from_json("{"), Err(RewriteError::Json(_))));
    }

    fn arb_word_poly(sys: RelationSystem) -> impl Strategy<Value = NCPoly> {
        let n = sys.alphabet().len();
        let names: Vec<String> = sys.alphabet().generators().iter().map(|g| g.name.clone()).collect();
        let term = (prop::collection::vec(0..n, 0..=4), -3i64..=3);
        prop::collection::vec(term, 0..4).prop_map(move |terms| {
            let mut p = NCPoly::zero(sys.alphabet());
            for (letters, c) in terms {
                let ns: Vec<&str> = letters.iter().map(|&i| names[i].as_str()).collect();
                let w = NCPoly::from_word(sys.alphabet(), sys.alphabet().word(&ns).unwrap());
                p = &p + &w.scale_rat(&int(c));
            }
            p
        })
    }

    proptest! {
        #[test]
        fn normal_form_is_a_congruence(
            fam in prop::sample::select(Family::ALL.to_vec()),
            seed in any::<u64>(),
        ) {
            let sys = RelationSystem::family(fam);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_ncpoly(&mut rng, sys.alphabet(), 4, 3);
            let q = random_ncpoly(&mut rng, sys.alphabet(), 4, 3);
            let direct = sys.normal_form(&(&p * &q)).unwrap();
            let via = sys.normal_form(&(&sys.normal_form(&p).unwrap() * &sys.normal_form(&q).unwrap())).unwrap();
            prop_assert_eq!(direct, via);
        }

        #[test]
        fn weyl_normal_form_is_linear(p in arb_word_poly(RelationSystem::family(Family::Weyl)),
                                      q in arb_word_poly(RelationSystem::family(Family::Weyl))) {
            let sys = RelationSystem::family(Family::Weyl);
            let lhs = sys.normal_form(&(&p + &q)).unwrap();
            let rhs = &sys.normal_form(&p).unwrap() + &sys.normal_form(&q).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
