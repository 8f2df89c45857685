//! Acceptance suite: one line per criterion, non-zero exit on any failure.
//!
//! Every check is exact (zero tolerance). Runtime bounds are enforced where
//! a criterion states one.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ncbinom::binomial::{gamma, ExpIdentity, Expander, Via, HSQ_PARAM};
use ncbinom::diffop::{
    hermite_he, lambda_expansion, weyl_closed_form_on_one, x2d_check, DiffOp, HermiteVia, Poly1,
    Realization, LAMBDA_PARAM,
};
use ncbinom::freealg::{nc_derivation, random_ncpoly};
use ncbinom::rewrite::Strategy;
use ncbinom::scalars::{binom_coeff, factorial, int, ParamPoly, Rational};
use ncbinom::{Alphabet, Family, NCPoly, RelationSystem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let spent = start.elapsed();
    ensure(spent <= limit, || format!("took {spent:?}, limit {limit:?}"))
}

fn theorem1_oracle() -> Outcome {
    let start = Instant::now();
    let ex = Expander::default();
    for n in 0..=8 {
        ensure(ex.theorem1_expand(n) == ex.brute(n), || format!("n={n}"))?;
    }
    within(start, Duration::from_secs(10))?;
    Ok("theorem1_expand(n) == (A+B)^n for n in 0..=8".into())
}

fn theorem2_corollary1_lemmas() -> Outcome {
    let ex = Expander::default();
    for n in 0..=8 {
        let oracle = ex.brute(n);
        ensure(ex.theorem2_expand(n) == oracle, || format!("theorem2 n={n}"))?;
        ensure(ex.corollary1_expand(n) == oracle, || format!("corollary1 n={n}"))?;
        ensure(ex.lemma3_defect(n).is_zero(), || format!("M_n defect n={n}"))?;
        ensure(ex.lemma4_defect(n).is_zero(), || format!("D_n defect n={n}"))?;
    }
    Ok("both essential-part expansions match brute force; defect identities vanish for n <= 8".into())
}

fn statements_suite() -> Outcome {
    const CASES: usize = 500;
    let alpha = Alphabet::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for case in 0..CASES {
        let a = random_ncpoly(&mut rng, &alpha, 3, 4);
        let b = random_ncpoly(&mut rng, &alpha, 3, 4);
        let x = random_ncpoly(&mut rng, &alpha, 3, 4);
        let y = random_ncpoly(&mut rng, &alpha, 3, 4);
        let fail = |eq: &str| format!("{eq} fails on case {case}: X = {}", x.to_json());
        ensure(&a * &nc_derivation(&a, &x) == nc_derivation(&a, &(&a * &x)), || fail("left multiplication commutes with d_A"))?;
        let leibniz = &(&nc_derivation(&a, &x) * &y) + &(&x * &nc_derivation(&a, &y));
        ensure(nc_derivation(&a, &(&x * &y)) == leibniz, || fail("Leibniz rule"))?;
        ensure(&(&a * &x) - &nc_derivation(&a, &x) == &x * &a, || fail("(A - d_A)X = XA"))?;
        let jacobi = &(&nc_derivation(&a, &nc_derivation(&b, &x))
            + &nc_derivation(&b, &nc_derivation(&x, &a)))
            + &nc_derivation(&x, &nc_derivation(&a, &b));
        ensure(jacobi.is_zero(), || fail("Jacobi identity"))?;
    }
    Ok(format!("four identities hold on {CASES} random instances (seed 42, degree <= 3)"))
}

fn commutative_collapse() -> Outcome {
    let sys = RelationSystem::family(Family::Commutative);
    let ex = Expander::for_system(&sys).map_err(|e| e.to_string())?;
    for k in 0..=8 {
        let nf = sys.normal_form(&ex.essential_d(k, Via::Recurrence)).map_err(|e| e.to_string())?;
        ensure(nf.is_zero(), || format!("D_{k} = {nf}"))?;
    }
    Ok("normal_form(D_k) = 0 under the commutative relation for k <= 8".into())
}

fn hsq_closed_form() -> Outcome {
    let sys = RelationSystem::family(Family::Hsq);
    let ex = Expander::for_system(&sys).map_err(|e| e.to_string())?;
    let h = ParamPoly::param(HSQ_PARAM);
    let bind = |v: i64| -> BTreeMap<String, Rational> { [(HSQ_PARAM.to_string(), int(v))].into() };
    // the product (1+h)(1+2h)...(1+(k-1)h), built independently of `gamma`
    let product = |k: u32| {
        (1..k).fold(ParamPoly::one(), |acc, j| &acc * &(&ParamPoly::one() + &h.scale(&int(j as i64))))
    };
    for n in 0..=8 {
        let closed = ex.closed_form_hsq(n);
        let eq = sys.quotient_eq(&closed, &ex.brute(n)).map_err(|e| e.to_string())?;
        ensure(eq, || format!("closed form differs from (A+B)^{n} modulo the relation"))?;
        let nf = sys.normal_form(&ex.brute(n)).map_err(|e| e.to_string())?;
        for k in 0..=n {
            let word = &ex.a().pow(k) * &ex.b().pow(n - k);
            let (w, _) = word.terms().next().expect("monomial");
            let coeff = nf.coeff(w);
            ensure(coeff == product(k).scale(&binom_coeff(n, k)), || {
                format!("coefficient of A^{k}B^{} in (A+B)^{n} is {coeff}", n - k)
            })?;
            let at_one = coeff.eval(&bind(1)).map_err(|e| e.to_string())?;
            ensure(at_one == factorial(n) / factorial(n - k), || format!("h=1, n={n}, k={k}"))?;
        }
    }
    for n in 0..=12 {
        let g = gamma(n).value;
        ensure(g == product(n), || format!("gamma_{n} = {g}"))?;
        ensure(g.eval(&bind(0)).unwrap() == int(1), || format!("gamma_{n}(0)"))?;
        ensure(g.eval(&bind(1)).unwrap() == factorial(n), || format!("gamma_{n}(1)"))?;
    }
    Ok("closed form, C(n,k)*gamma_k coefficients, h=1 specialization (n <= 8), gamma checkpoints (n <= 12)".into())
}

fn weyl_closed_form() -> Outcome {
    let sys = RelationSystem::family(Family::Weyl);
    let ex = Expander::for_system(&sys).map_err(|e| e.to_string())?;
    let c = NCPoly::generator(sys.alphabet(), "C").map_err(|e| e.to_string())?;
    for n in 0..=8 {
        let closed = ex.closed_form_weyl(n).map_err(|e| e.to_string())?;
        let eq = sys.quotient_eq(&closed, &ex.brute(n)).map_err(|e| e.to_string())?;
        ensure(eq, || format!("closed form differs from (A+B)^{n} modulo the relation"))?;
    }
    for n in 0..=20 {
        for k in 0..=n / 2 {
            let rec = ex.weyl_coeff(n, k, Via::Recurrence).map_err(|e| e.to_string())?;
            let closed = ex.weyl_coeff(n, k, Via::Closed).map_err(|e| e.to_string())?;
            ensure(rec == closed, || format!("A_{{{n},{k}}}: {} vs {}", rec.value, closed.value))?;
        }
    }
    for n in 1..=8u32 {
        let lhs = sys.normal_form(&nc_derivation(ex.b(), &ex.m_n(n))).map_err(|e| e.to_string())?;
        let rhs = sys
            .normal_form(&(&c * &ex.m_n(n - 1)).scale_rat(&int(n as i64)))
            .map_err(|e| e.to_string())?;
        ensure(lhs == rhs, || format!("d_B M_{n} = {lhs}"))?;
    }
    Ok("closed form (n <= 8), A_{n,k} recurrence == closed (n <= 20), d_B M_n = n C M_{n-1} (n <= 8)".into())
}

fn exponential_truncations() -> Outcome {
    let start = Instant::now();
    let ex = Expander::default();
    for order in 0..=6 {
        for which in [ExpIdentity::Corollary2, ExpIdentity::Corollary3] {
            let defect = ex.exp_identity_defect(which, order);
            ensure(defect.is_zero(), || format!("{which:?} order {order}: {defect}"))?;
        }
    }
    within(start, Duration::from_secs(30))?;
    Ok("both exponential identities exact through total degree 6".into())
}

fn hermite() -> Outcome {
    for n in 0..=20 {
        let oracle = hermite_he(n, HermiteVia::RecurrenceOracle);
        ensure(hermite_he(n, HermiteVia::Operator) == oracle, || format!("operator path n={n}"))?;
        ensure(hermite_he(n, HermiteVia::ExplicitSum) == oracle, || format!("explicit sum n={n}"))?;
    }
    let he2 = hermite_he(2, HermiteVia::Operator).to_string();
    let he3 = hermite_he(3, HermiteVia::Operator).to_string();
    ensure(he2 == "x^2 - 1", || format!("He_2 = {he2}"))?;
    ensure(he3 == "x^3 - 3*x", || format!("He_3 = {he3}"))?;
    Ok("three Hermite routes agree for n <= 20; He_2 = x^2 - 1, He_3 = x^3 - 3*x".into())
}

fn operator_realizations() -> Outcome {
    let ex = Expander::default();
    let real = Realization::lambda_d(ex.alphabet()).map_err(|e| e.to_string())?;
    let op = DiffOp::x() + DiffOp::d().scale(&ParamPoly::param(LAMBDA_PARAM));
    for n in 0..=10 {
        let mn = real.realize(&ex.m_n(n)).map_err(|e| e.to_string())?;
        ensure(mn.apply(&Poly1::one()) == Poly1::x_pow(n), || format!("M_{n} 1 != x^{n}"))?;
        let direct = op.apply_pow(n, &Poly1::one());
        ensure(direct == lambda_expansion(n), || format!("lambda expansion n={n}: {direct}"))?;
    }
    for n in 0..=8 {
        let realized = weyl_closed_form_on_one(n).map_err(|e| e.to_string())?;
        ensure(realized == lambda_expansion(n), || format!("weyl correspondence n={n}"))?;
    }
    for n in 0..=6 {
        for seed in 0..=3 {
            ensure(x2d_check(n, seed), || format!("x^2 D representation n={n} seed=x^{seed}"))?;
        }
    }
    Ok("M_n 1 = x^n (n <= 10), lambda expansion (n <= 10), x^2 D check (n <= 6)".into())
}

fn rewrite_robustness() -> Outcome {
    const CASES: usize = 500;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for family in Family::ALL {
        let sys = RelationSystem::family(family);
        for case in 0..CASES {
            let p = random_ncpoly(&mut rng, sys.alphabet(), 6, 4);
            let left = sys
                .normal_form_with(&p, Strategy::Leftmost, ncbinom::rewrite::DEFAULT_BUDGET)
                .map_err(|e| e.to_string())?;
            let right = sys
                .normal_form_with(&p, Strategy::Rightmost, ncbinom::rewrite::DEFAULT_BUDGET)
                .map_err(|e| e.to_string())?;
            ensure(left == right, || format!("{family} case {case}: strategies disagree on {}", p.to_json()))?;
            let again = sys.normal_form(&left).map_err(|e| e.to_string())?;
            ensure(again == left, || format!("{family} case {case}: not idempotent"))?;
        }
    }
    Ok(format!("strategies agree and normal_form is idempotent on {CASES} inputs per family"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("AC1 derivation expansion equals brute force", theorem1_oracle),
        ("AC2 essential-part expansions and defect identities", theorem2_corollary1_lemmas),
        ("AC3 statements suite", statements_suite),
        ("AC4 commutative collapse", commutative_collapse),
        ("AC5 hsq closed form", hsq_closed_form),
        ("AC6 weyl closed form", weyl_closed_form),
        ("AC7 exponential truncations", exponential_truncations),
        ("AC8 hermite", hermite),
        ("AC9 operator realizations", operator_realizations),
        ("AC10 rewrite robustness", rewrite_robustness),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail} [{:.2?}]", start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
