//! Acceptance checks, one line per criterion.

mod common;

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use selfsim_core::{
    act_word, afd_hypothesis_check, build_report, compute_nucleus, count_fixed,
    count_nontrivial_sections, equal, exact_fixed_measure, fixed_measure, generic_defect,
    genericity_classify, pre_kms_check, section_closure, y_measure, AfdCheck, Conclusion,
    Genericity, GroupWord, Limits, Monomial, StarAlgebra, Verdict,
};

type Outcome = Result<String, String>;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn pow2(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(2).pow(n as u32))
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn criterion_1() -> Outcome {
    let spec = grigorchuk();
    let l = Limits::default();
    let start = Instant::now();
    let mut got = Vec::new();
    for t in ["a", "b", "c", "d"] {
        let r =
            fixed_measure(&spec, &spec.parse_word(t).unwrap(), &l).map_err(|e| e.to_string())?;
        got.push(r.exact.ok_or(format!("{t} not exact"))?);
    }
    let elapsed = start.elapsed();
    ensure!(
        got == [q(0, 1), q(1, 7), q(2, 7), q(4, 7)],
        "measures {got:?}"
    );
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");

    let b = spec.parse_word("b").unwrap();
    let mut prev: Option<BigRational> = None;
    for n in 1..=20 {
        let c = count_fixed(&spec, &b, n, &l).map_err(|e| e.to_string())?;
        let v = BigRational::from_integer(c.into()) / pow2(n);
        if let Some(p) = &prev {
            ensure!(&v <= p, "count_fixed(b, {n}) increased");
        }
        prev = Some(v);
    }
    let at20 = prev.unwrap();
    let gap = (&at20 - q(1, 7)).abs();
    ensure!(
        gap <= BigRational::one() / pow2(10),
        "2^-20 count(b,20) = {at20}"
    );
    Ok(format!(
        "a,b,c,d -> 0, 1/7, 2/7, 4/7 in {elapsed:.2?}; 2^-20 count(b,20) = {at20}"
    ))
}

fn criterion_2() -> Outcome {
    let spec = builtin("dihedral");
    let l = Limits::default();
    for t in ["a", "b"] {
        let v = exact_fixed_measure(&spec, &spec.parse_word(t).unwrap(), &l)
            .map_err(|e| e.to_string())?;
        ensure!(v.is_zero(), "dihedral {t} -> {v}");
    }
    Ok("a, b -> 0, 0".into())
}

fn criterion_3(rng: &mut ChaCha8Rng) -> Outcome {
    let spec = grigorchuk();
    let l = Limits::default();
    let nucleus = compute_nucleus(&spec, &l).map_err(|e| e.to_string())?;
    let mut sample = nucleus.words();
    let mut random = 0;
    while random < 100 {
        let g = random_word(rng, &spec, 8);
        if !section_closure(&spec, &g, &l).truncated() {
            sample.push(g);
            random += 1;
        }
    }
    let ok = pre_kms_check(&spec, |g| exact_fixed_measure(&spec, g, &l), &sample)
        .map_err(|e| e.to_string())?;
    ensure!(ok, "pre-KMS recursion failed");
    Ok(format!(
        "{} nucleus elements + 100 random words",
        nucleus.len()
    ))
}

fn criterion_4(rng: &mut ChaCha8Rng) -> Outcome {
    let alg = StarAlgebra::new(grigorchuk(), Limits::default());
    for i in 0..200 {
        let a = random_monomial(rng, alg.spec(), 3, 4);
        let b = random_monomial(rng, alg.spec(), 3, 4);
        ensure!(
            alg.kms_check(&a, &b).map_err(|e| e.to_string())?,
            "kms pair {i}: {} / {}",
            alg.format_monomial(&a),
            alg.format_monomial(&b)
        );
    }
    for i in 0..200 {
        let mut degree_zero = || {
            let n = rng.gen_range(0..=3);
            let u1: Vec<usize> = (0..n).map(|_| rng.gen_range(0..2)).collect();
            let u2: Vec<usize> = (0..n).map(|_| rng.gen_range(0..2)).collect();
            Monomial::new(u1, random_word(rng, alg.spec(), 4), u2)
        };
        let (a, b) = (degree_zero(), degree_zero());
        ensure!(
            alg.trace_check(&a, &b).map_err(|e| e.to_string())?,
            "trace pair {i}"
        );
    }
    Ok("200 KMS pairs, 200 degree-0 trace pairs".into())
}

fn criterion_5(rng: &mut ChaCha8Rng) -> Outcome {
    let alg = StarAlgebra::new(grigorchuk(), Limits::default());
    let spec = alg.spec();
    let base: Vec<GroupWord> = ["e", "a", "b", "c", "d"]
        .iter()
        .map(|t| spec.parse_word(t).unwrap())
        .collect();
    ensure!(
        alg.gram_psd(&base).map_err(|e| e.to_string())?.is_psd(),
        "{{e,a,b,c,d}} not PSD"
    );
    let pool: Vec<GroupWord> = (0..40).map(|_| random_word(rng, spec, 6)).collect();
    for i in 0..20 {
        let size = rng.gen_range(1..=6);
        let family: Vec<GroupWord> = pool.choose_multiple(rng, size).cloned().collect();
        ensure!(
            alg.gram_psd(&family).map_err(|e| e.to_string())?.is_psd(),
            "random family {i} not PSD"
        );
    }
    Ok("{e,a,b,c,d} and 20 random families".into())
}

fn criterion_6() -> Outcome {
    let spec = grigorchuk();
    let l = Limits::default();
    let report = genericity_classify(&spec, &l).map_err(|e| e.to_string())?;
    ensure!(report.class == Genericity::One, "class {:?}", report.class);
    let b = spec.parse_word("b").unwrap();
    let mut values = Vec::new();
    for n in 1..=20 {
        values.push(generic_defect(&spec, &b, n, &l).map_err(|e| e.to_string())?);
    }
    ensure!(values.windows(2).all(|w| w[1] <= w[0]), "defect increased");
    ensure!(values[1] == q(1, 2), "defect(b,2) = {}", values[1]);
    ensure!(values[2] == q(1, 8), "defect(b,3) = {}", values[2]);
    ensure!(values[19] <= q(1, 64), "defect(b,20) = {}", values[19]);
    Ok(format!(
        "One over {} elements; defect(b,20) = {}",
        report.tested.len(),
        values[19]
    ))
}

fn criterion_7() -> Outcome {
    let alg = StarAlgebra::new(grigorchuk(), Limits::default());
    let b = alg.spec().parse_word("b").unwrap();
    let expected = [q(1, 1), q(1, 2), q(1, 8)];
    for n in 1..=12 {
        let d = alg.an_distance(&b, n).map_err(|e| e.to_string())?;
        let count = count_nontrivial_sections(alg.spec(), &b, n, alg.limits())
            .map_err(|e| e.to_string())?;
        let closed = BigRational::from_integer(count.count.into()) / pow2(n);
        ensure!(d == closed, "n = {n}: {d} vs {closed}");
        if n <= 3 {
            ensure!(d == expected[n - 1], "an_distance(b, {n}) = {d}");
        }
    }
    Ok("1, 1/2, 1/8; psi agrees with the count for n <= 12".into())
}

fn criterion_8() -> Outcome {
    let spec = grigorchuk();
    let l = Limits::default();
    let nucleus = compute_nucleus(&spec, &l).map_err(|e| e.to_string())?;
    ensure!(nucleus.len() == 5, "nucleus has {} elements", nucleus.len());
    ensure!(
        nucleus.witness_depth <= 4,
        "witness depth {}",
        nucleus.witness_depth
    );
    let AfdCheck::Holds(witnesses) = afd_hypothesis_check(&spec, &nucleus, &l) else {
        return Err("AFD hypothesis does not hold".into());
    };
    ensure!(witnesses.iter().all(|(_, u)| u.len() <= 2), "long witness");
    let d = spec.parse_word("d").unwrap();
    ensure!(
        witnesses.iter().any(|(g, u)| *g == d && u == &[0]),
        "witness for d is not 0"
    );
    for g in nucleus.words() {
        let y = y_measure(&spec, &g, &l).map_err(|e| e.to_string())?;
        ensure!(
            y.exact.as_ref().is_some_and(One::is_one),
            "y({}) != 1",
            spec.format_word(&g)
        );
    }
    let report = build_report(&spec, "grigorchuk", true, &l).map_err(|e| e.to_string())?;
    ensure!(
        report.conclusion == Conclusion::AfdTypeIII && report.headline() == "AFD-III_{1/2}",
        "report {}",
        report.headline()
    );
    Ok(format!(
        "5 elements, witness depth {}; report {}",
        nucleus.witness_depth,
        report.headline()
    ))
}

fn criterion_9(rng: &mut ChaCha8Rng) -> Outcome {
    let start = Instant::now();
    let alg = StarAlgebra::new(grigorchuk(), Limits::default());
    let spec = alg.spec();
    let random_element = |rng: &mut ChaCha8Rng| {
        let terms = rng.gen_range(1..=4);
        let parts: Vec<(BigRational, Monomial)> = (0..terms)
            .map(|_| {
                (
                    q(rng.gen_range(-4..=4), rng.gen_range(1..=3)),
                    random_monomial(rng, spec, 3, 3),
                )
            })
            .collect();
        alg.element(parts).unwrap()
    };
    for i in 0..100 {
        let x = alg.monomial(&random_monomial(rng, spec, 3, 3)).unwrap();
        let y = alg.monomial(&random_monomial(rng, spec, 3, 3)).unwrap();
        let z = alg.monomial(&random_monomial(rng, spec, 3, 3)).unwrap();
        ensure!(
            alg.multiply(&alg.multiply(&x, &y), &z) == alg.multiply(&x, &alg.multiply(&y, &z)),
            "associativity {i}"
        );
    }
    for i in 0..100 {
        let (x, y) = (random_element(rng), random_element(rng));
        ensure!(
            alg.adjoint(&alg.multiply(&x, &y)) == alg.multiply(&alg.adjoint(&y), &alg.adjoint(&x)),
            "involution {i}"
        );
    }
    for i in 0..100 {
        let x = random_element(rng);
        let m = alg.monomial(&random_monomial(rng, spec, 3, 3)).unwrap();
        let n = rng.gen_range(0..=2);
        let lhs = alg
            .psi(&alg.multiply(&alg.cuntz_expand(&x, n), &m))
            .map_err(|e| e.to_string())?;
        let rhs = alg.psi(&alg.multiply(&x, &m)).map_err(|e| e.to_string())?;
        ensure!(lhs == rhs, "partition of unity {i}");
    }
    for i in 0..100 {
        let x = random_element(rng);
        let v = alg
            .psi(&alg.multiply(&alg.adjoint(&x), &x))
            .map_err(|e| e.to_string())?;
        ensure!(v >= BigRational::zero(), "positivity {i}: {v}");
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("4 x 100 cases in {elapsed:.2?}"))
}

fn criterion_10(rng: &mut ChaCha8Rng) -> Outcome {
    let spec = grigorchuk();
    let l = Limits::default();
    for i in 0..500 {
        let g1 = random_word(rng, &spec, 6);
        let g2 = random_word(rng, &spec, 6);
        let u = random_letters(rng, 2, 8);
        let (v12, h12) = act_word(&spec, &spec.multiply(&g1, &g2), &u);
        let (v2, h2) = act_word(&spec, &g2, &u);
        let (v1, h1) = act_word(&spec, &g1, &v2);
        ensure!(v12 == v1, "homomorphism {i}");
        ensure!(
            equal(&spec, &h12, &spec.multiply(&h1, &h2), &l) == Verdict::Yes,
            "section homomorphism {i}"
        );
        ensure!(v2 == oracle_act(&spec, &g2, &u), "recursion table {i}");

        let (back, h_inv) = act_word(&spec, &spec.inverse(&g2), &v2);
        ensure!(back == u, "inverse {i}");
        ensure!(
            equal(&spec, &h_inv, &spec.inverse(&h2), &l) == Verdict::Yes,
            "section inverse {i}"
        );

        let images: HashSet<Vec<usize>> = all_words(2, u.len())
            .iter()
            .map(|w| act_word(&spec, &g2, w).0)
            .collect();
        ensure!(images.len() == 1 << u.len(), "bijectivity {i}");
    }
    Ok("500 pairs".into())
}

type Criterion = Box<dyn FnMut(&mut ChaCha8Rng) -> Outcome>;

fn main() -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(0x005e_1f51);
    let criteria: Vec<(&str, Criterion)> = vec![
        ("grigorchuk fixed measures", Box::new(|_| criterion_1())),
        ("dihedral fixed measures", Box::new(|_| criterion_2())),
        ("pre-KMS recursion", Box::new(criterion_3)),
        ("KMS and trace identities", Box::new(criterion_4)),
        ("positive semidefinite Gram matrices", Box::new(criterion_5)),
        ("genericity dichotomy", Box::new(|_| criterion_6())),
        ("a_n convergence", Box::new(|_| criterion_7())),
        ("nucleus and AFD conclusion", Box::new(|_| criterion_8())),
        ("algebra laws", Box::new(criterion_9)),
        ("action laws", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (i, (name, mut check)) in criteria.into_iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(|| check(&mut rng)))
            .unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("[PASS] {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {:>2} {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
