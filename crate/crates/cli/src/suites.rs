//! Verification suites run by `ncbinom verify`.

use ncbinom::binomial::{gamma, ExpIdentity, Expander, Via, HSQ_PARAM};
use ncbinom::diffop::{hermite_he, HermiteVia};
use ncbinom::freealg::{nc_derivation, random_ncpoly};
use ncbinom::scalars::{factorial, int};
use ncbinom::{Alphabet, Family, NCPoly, ParamPoly, RelationSystem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Random instances drawn by the statements suite.
pub const STATEMENT_CASES: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Statements,
    Theorem1,
    Theorem2,
    Hsq,
    Weyl,
    Exp,
    Hermite,
    All,
}

impl Suite {
    fn expand(self) -> Vec<Suite> {
        use Suite::*;
        match self {
            All => vec![Statements, Theorem1, Theorem2, Hsq, Weyl, Exp, Hermite],
            s => vec![s],
        }
    }
}

/// Outcome of one property: the first counterexample as JSON on failure.
pub struct Check {
    pub name: String,
    pub counterexample: Option<String>,
}

impl Check {
    fn pass(name: impl Into<String>) -> Self {
        Check { name: name.into(), counterexample: None }
    }

    fn first_failure<I>(name: impl Into<String>, cases: I) -> Self
    where
        I: IntoIterator<Item = Option<String>>,
    {
        Check { name: name.into(), counterexample: cases.into_iter().flatten().next() }
    }
}

/// JSON of `p` when it is nonzero, used for defect-style properties.
fn nonzero(p: NCPoly) -> Option<String> {
    (!p.is_zero()).then(|| p.to_json())
}

fn system(family: Family) -> (RelationSystem, Expander) {
    let sys = RelationSystem::family(family);
    let ex = Expander::for_system(&sys).expect("built-in families contain A and B");
    (sys, ex)
}

/// Difference of normal forms, or `None` when the two agree.
fn quotient_defect(sys: &RelationSystem, p: &NCPoly, q: &NCPoly) -> Option<String> {
    match sys.normal_form(&(p - q)) {
        Ok(d) => nonzero(d),
        Err(e) => Some(serde_json::json!({ "error": e.to_string() }).to_string()),
    }
}

pub fn run(suite: Suite, max_n: u32, seed: u64) -> Vec<Check> {
    suite
        .expand()
        .into_iter()
        .flat_map(|s| match s {
            Suite::Statements => statements(seed),
            Suite::Theorem1 => theorem1(max_n),
            Suite::Theorem2 => theorem2(max_n),
            Suite::Hsq => hsq(max_n),
            Suite::Weyl => weyl(max_n),
            Suite::Exp => exp(max_n),
            Suite::Hermite => hermite(max_n),
            Suite::All => unreachable!("expanded above"),
        })
        .collect()
}

fn statements(seed: u64) -> Vec<Check> {
    let alpha = Alphabet::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: [Option<String>; 4] = Default::default();
    for _ in 0..STATEMENT_CASES {
        let a = random_ncpoly(&mut rng, &alpha, 3, 4);
        let b = random_ncpoly(&mut rng, &alpha, 3, 4);
        let x = random_ncpoly(&mut rng, &alpha, 3, 4);
        let y = random_ncpoly(&mut rng, &alpha, 3, 4);
        let d = nc_derivation;
        let defects = [
            &(&a * &d(&a, &x)) - &d(&a, &(&a * &x)),
            &d(&a, &(&x * &y)) - &(&(&d(&a, &x) * &y) + &(&x * &d(&a, &y))),
            &(&(&a * &x) - &d(&a, &x)) - &(&x * &a),
            &(&d(&a, &d(&b, &x)) + &d(&b, &d(&x, &a))) + &d(&x, &d(&a, &b)),
        ];
        for (slot, defect) in found.iter_mut().zip(defects) {
            if slot.is_none() && !defect.is_zero() {
                *slot = Some(x.to_json());
            }
        }
    }
    let names = [
        "statements: A d_A(X) = d_A(A X)",
        "statements: d_A(XY) = d_A(X) Y + X d_A(Y)",
        "statements: (A - d_A) X = X A",
        "statements: Jacobi identity",
    ];
    names
        .into_iter()
        .zip(found)
        .map(|(name, counterexample)| Check {
            name: format!("{name} ({STATEMENT_CASES} cases, seed {seed})"),
            counterexample,
        })
        .collect()
}

fn theorem1(max_n: u32) -> Vec<Check> {
    let ex = Expander::default();
    vec![Check::first_failure(
        format!("theorem1: expansion equals (A+B)^n for n <= {max_n}"),
        (0..=max_n).map(|n| nonzero(&ex.theorem1_expand(n) - &ex.brute(n))),
    )]
}

fn theorem2(max_n: u32) -> Vec<Check> {
    let ex = Expander::default();
    let (comm, comm_ex) = system(Family::Commutative);
    vec![
        Check::first_failure(
            format!("theorem2: expansion equals (A+B)^n for n <= {max_n}"),
            (0..=max_n).map(|n| nonzero(&ex.theorem2_expand(n) - &ex.brute(n))),
        ),
        Check::first_failure(
            format!("theorem2: (A + d_B)^k 1 expansion equals (A+B)^n for n <= {max_n}"),
            (0..=max_n).map(|n| nonzero(&ex.corollary1_expand(n) - &ex.brute(n))),
        ),
        Check::first_failure(
            format!("theorem2: D_k recurrence equals (A + d_B)^k 1 - A^k for k <= {max_n}"),
            (0..=max_n).map(|k| {
                nonzero(&ex.essential_d(k, Via::Recurrence) - &ex.essential_d(k, Via::Difference))
            }),
        ),
        Check::first_failure(
            format!("theorem2: M_n and D_n defect identities vanish for n <= {max_n}"),
            (0..=max_n).map(|n| nonzero(ex.lemma3_defect(n)).or_else(|| nonzero(ex.lemma4_defect(n)))),
        ),
        Check::first_failure(
            format!("theorem2: D_k vanishes under the commutative relation for k <= {max_n}"),
            (0..=max_n).map(|k| {
                let zero = NCPoly::zero(comm.alphabet());
                quotient_defect(&comm, &comm_ex.essential_d(k, Via::Recurrence), &zero)
            }),
        ),
    ]
}

fn hsq(max_n: u32) -> Vec<Check> {
    let (sys, ex) = system(Family::Hsq);
    let at = |v: i64| -> BTreeMap<String, _> { [(HSQ_PARAM.to_string(), int(v))].into() };
    let gamma_ok = (0..=max_n.max(12)).all(|n| {
        let g = gamma(n).value;
        g.eval(&at(0)).ok() == Some(int(1)) && g.eval(&at(1)).ok() == Some(factorial(n))
    });
    let gamma_check = if gamma_ok {
        Check::pass(format!("hsq: gamma_n(0) = 1 and gamma_n(1) = n! for n <= {}", max_n.max(12)))
    } else {
        Check {
            name: "hsq: gamma checkpoints".into(),
            counterexample: Some(serde_json::json!({ "error": "gamma checkpoint mismatch" }).to_string()),
        }
    };
    vec![
        Check::first_failure(
            format!("hsq: closed form equals (A+B)^n modulo BA = AB + hA^2 for n <= {max_n}"),
            (0..=max_n).map(|n| quotient_defect(&sys, &ex.closed_form_hsq(n), &ex.brute(n))),
        ),
        Check::first_failure(
            format!("hsq: D_k = (gamma_k - 1) A^k for k <= {max_n}"),
            (0..=max_n).map(|k| {
                let expected = ex.a().pow(k).scale(&(&gamma(k).value - &ParamPoly::one()));
                quotient_defect(&sys, &ex.essential_d(k, Via::Recurrence), &expected)
            }),
        ),
        gamma_check,
    ]
}

fn weyl(max_n: u32) -> Vec<Check> {
    let (sys, ex) = system(Family::Weyl);
    let c = NCPoly::generator(sys.alphabet(), "C").expect("weyl alphabet has C");
    let coeff_mismatch = (0..=max_n).flat_map(|n| (0..=n / 2).map(move |k| (n, k))).find(|&(n, k)| {
        let rec = ex.weyl_coeff(n, k, Via::Recurrence).map(|w| w.value);
        let closed = ex.weyl_coeff(n, k, Via::Closed).map(|w| w.value);
        rec.is_err() || rec != closed
    });
    vec![
        Check::first_failure(
            format!("weyl: closed form equals (A+B)^n modulo BA = AB + C for n <= {max_n}"),
            (0..=max_n).map(|n| match ex.closed_form_weyl(n) {
                Ok(closed) => quotient_defect(&sys, &closed, &ex.brute(n)),
                Err(e) => Some(serde_json::json!({ "error": e.to_string() }).to_string()),
            }),
        ),
        Check {
            name: format!("weyl: A_(n,k) recurrence equals factorial formula for n <= {max_n}"),
            counterexample: coeff_mismatch
                .map(|(n, k)| serde_json::json!({ "n": n, "k": k }).to_string()),
        },
        Check::first_failure(
            format!("weyl: d_B M_n = n C M_(n-1) for 1 <= n <= {max_n}"),
            (1..=max_n).map(|n| {
                let rhs = (&c * &ex.m_n(n - 1)).scale_rat(&int(n as i64));
                quotient_defect(&sys, &nc_derivation(ex.b(), &ex.m_n(n)), &rhs)
            }),
        ),
    ]
}

fn exp(max_n: u32) -> Vec<Check> {
    let ex = Expander::default();
    [(ExpIdentity::Corollary2, "e^(A+B) = [e^(A+d_B) 1] e^B"), (ExpIdentity::Corollary3, "e^(A+B) = e^A e^B + sum D_k/k! e^B")]
        .into_iter()
        .map(|(which, label)| {
            Check::first_failure(
                format!("exp: {label} through degree {max_n}"),
                [nonzero(ex.exp_identity_defect(which, max_n))],
            )
        })
        .collect()
}

fn hermite(max_n: u32) -> Vec<Check> {
    let mismatch = (0..=max_n).find_map(|n| {
        let oracle = hermite_he(n, HermiteVia::RecurrenceOracle);
        [HermiteVia::Operator, HermiteVia::ExplicitSum]
            .into_iter()
            .map(|via| hermite_he(n, via))
            .find(|p| *p != oracle)
            .map(|p| p.to_json())
    });
    vec![Check {
        name: format!("hermite: operator, explicit sum and recurrence agree for n <= {max_n}"),
        counterexample: mismatch,
    }]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_at_small_n() {
        for suite in Suite::All.expand() {
            for check in run(suite, 4, 7) {
                assert!(check.counterexample.is_none(), "{}", check.name);
            }
        }
    }

    #[test]
    fn all_covers_each_suite_once() {
        assert_eq!(Suite::All.expand().len(), 7);
        assert_eq!(Suite::Hsq.expand(), vec![Suite::Hsq]);
    }
}
