#![allow(dead_code)]

use rand::Rng;
use selfsim_core::{GroupSpec, GroupWord, Letter, Monomial, Symbol};

pub const BUILTINS: [&str; 3] = ["grigorchuk", "dihedral", "odometer"];

pub fn builtin(name: &str) -> GroupSpec {
    GroupSpec::builtin(name).unwrap()
}

pub fn grigorchuk() -> GroupSpec {
    builtin("grigorchuk")
}

pub fn word_from(spec: &GroupSpec, raw: &[(usize, bool)]) -> GroupWord {
    let n = spec.generators().len();
    spec.normalize_symbols(raw.iter().map(|&(g, inv)| Symbol::new(g % n, inv)))
}

pub fn random_word<R: Rng>(rng: &mut R, spec: &GroupSpec, max_len: usize) -> GroupWord {
    let len = rng.gen_range(0..=max_len);
    let raw: Vec<(usize, bool)> = (0..len)
        .map(|_| (rng.gen_range(0..spec.generators().len()), rng.gen_bool(0.5)))
        .collect();
    word_from(spec, &raw)
}

pub fn random_letters<R: Rng>(rng: &mut R, k: usize, max_len: usize) -> Vec<Letter> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| rng.gen_range(0..k)).collect()
}

pub fn random_monomial<R: Rng>(
    rng: &mut R,
    spec: &GroupSpec,
    max_u: usize,
    max_g: usize,
) -> Monomial {
    let k = spec.alphabet_size();
    Monomial::new(
        random_letters(rng, k, max_u),
        random_word(rng, spec, max_g),
        random_letters(rng, k, max_u),
    )
}

/// All words of length `n` over `0..k`.
pub fn all_words(k: usize, n: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..k).map(move |x| {
                    let mut w = w.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// Applies one generator symbol to a finite word straight from the wreath
/// recursion table, recursing into section words.
fn oracle_symbol(spec: &GroupSpec, s: Symbol, u: &[Letter]) -> Vec<Letter> {
    let Some((&x, rest)) = u.split_first() else {
        return Vec::new();
    };
    let gen = &spec.generators()[s.generator];
    let (y, section) = if s.inverse {
        let y = gen.perm.iter().position(|&p| p == x).unwrap();
        (y, gen.sections[y].inverse())
    } else {
        (gen.perm[x], gen.sections[x].clone())
    };
    let mut out = vec![y];
    out.extend(oracle_act(spec, &section, rest));
    out
}

/// `v(g, u)` computed without any library action code.
pub fn oracle_act(spec: &GroupSpec, g: &GroupWord, u: &[Letter]) -> Vec<Letter> {
    let mut w = u.to_vec();
    for &s in g.symbols().iter().rev() {
        w = oracle_symbol(spec, s, &w);
    }
    w
}

/// `|{u ∈ X^n : v(g, u) = u}|` by enumeration.
pub fn oracle_count_fixed(spec: &GroupSpec, g: &GroupWord, n: usize) -> usize {
    all_words(spec.alphabet_size(), n)
        .into_iter()
        .filter(|u| oracle_act(spec, g, u) == *u)
        .count()
}

/// Whether `g` acts trivially on all words of length `n`.
pub fn oracle_trivial_up_to(spec: &GroupSpec, g: &GroupWord, n: usize) -> bool {
    all_words(spec.alphabet_size(), n)
        .into_iter()
        .all(|u| oracle_act(spec, g, &u) == u)
}
