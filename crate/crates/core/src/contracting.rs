//! Nuclei of contracting actions and the escape-to-identity hypothesis.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::closure::{section_closure, ElementKey, SectionClosure};
use crate::measure::{count_nontrivial_sections, scaled, survival_limit, MeasureReport, Rational};
use crate::word::{GroupWord, Letter};
use crate::{GroupSpec, Limits, Result};

/// A nucleus element: canonical key plus the shortest known word for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NucleusElement {
    pub key: ElementKey,
    pub word: GroupWord,
}

/// The smallest section-closed set into which all long enough sections fall.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nucleus {
    /// Sorted by representative word, shortest first.
    pub elements: Vec<NucleusElement>,
    /// Every section at depth `≥ witness_depth` of every generator and of every
    /// product of two nucleus elements lies in the nucleus.
    pub witness_depth: usize,
}

impl Nucleus {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, key: &ElementKey) -> bool {
        self.elements.iter().any(|e| &e.key == key)
    }

    pub fn words(&self) -> Vec<GroupWord> {
        self.elements.iter().map(|e| e.word.clone()).collect()
    }
}

/// Why a nucleus search gave up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inconclusive {
    pub reason: String,
}

impl std::fmt::Display for Inconclusive {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.reason)
    }
}

/// Largest nucleus searched before giving up; pair products make the work quadratic.
fn nucleus_cap(limits: &Limits) -> usize {
    ((limits.max_states as f64).sqrt() as usize).max(16)
}

struct Builder<'a> {
    spec: &'a GroupSpec,
    limits: &'a Limits,
    elements: BTreeMap<ElementKey, GroupWord>,
}

impl Builder<'_> {
    fn closure(&self, g: &GroupWord) -> std::result::Result<SectionClosure, Inconclusive> {
        let c = section_closure(self.spec, g, self.limits);
        if c.truncated() {
            Err(Inconclusive {
                reason: format!(
                    "section closure of {} exceeded {} states",
                    self.spec.format_word(g),
                    self.limits.max_states
                ),
            })
        } else {
            Ok(c)
        }
    }

    /// Adds every state lying on or below a cycle; returns whether anything was new.
    fn absorb(&mut self, c: &SectionClosure) -> bool {
        let mut changed = false;
        for (s, recurrent) in c.recurrent_reach().into_iter().enumerate() {
            if !recurrent {
                continue;
            }
            let key = c.state_key(s).expect("finite closure");
            let word = c.word(s).clone();
            match self.elements.get_mut(&key) {
                Some(existing) => {
                    if word.shortlex_cmp(existing).is_lt() {
                        *existing = word;
                    }
                }
                None => {
                    self.elements.insert(key, word);
                    changed = true;
                }
            }
        }
        changed
    }

    /// Smallest `d` such that every state reached by a word of length `≥ d` is in the set.
    fn landing_depth(&self, c: &SectionClosure) -> usize {
        let outside: Vec<bool> = (0..c.len())
            .map(|s| {
                !self
                    .elements
                    .contains_key(&c.state_key(s).expect("finite closure"))
            })
            .collect();
        if !outside[c.root()] {
            return 0;
        }
        // States outside the set are not recurrent, so they form a DAG below the root.
        let mut longest = vec![None::<usize>; c.len()];
        longest[c.root()] = Some(0);
        let mut frontier = vec![c.root()];
        let mut deepest = 0;
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for s in frontier {
                let d = longest[s].unwrap();
                deepest = deepest.max(d);
                for x in 0..c.alphabet_size() {
                    let t = c.target(s, x).expect("finite closure");
                    if outside[t] && longest[t].is_none_or(|old| old < d + 1) {
                        longest[t] = Some(d + 1);
                        next.push(t);
                    }
                }
            }
            next.sort_unstable();
            next.dedup();
            frontier = next;
        }
        deepest + 1
    }
}

/// Computes the nucleus: recurrent sections of the generators and their
/// inverses, enlarged by the recurrent sections of pairwise products until
/// stable.
pub fn compute_nucleus(
    spec: &GroupSpec,
    limits: &Limits,
) -> std::result::Result<Nucleus, Inconclusive> {
    let mut b = Builder {
        spec,
        limits,
        elements: BTreeMap::new(),
    };
    let mut seeds = spec.generators_and_inverses();
    seeds.push(GroupWord::identity());
    let mut seed_closures = Vec::new();
    for g in &seeds {
        let c = b.closure(g)?;
        b.absorb(&c);
        seed_closures.push(c);
    }

    let cap = nucleus_cap(limits);
    let mut rounds = 0;
    loop {
        rounds += 1;
        if rounds > limits.max_depth {
            return Err(Inconclusive {
                reason: format!(
                    "nucleus did not stabilize within {} rounds",
                    limits.max_depth
                ),
            });
        }
        if b.elements.len() > cap {
            return Err(Inconclusive {
                reason: format!("nucleus candidate grew beyond {cap} elements"),
            });
        }
        let current: Vec<GroupWord> = b.elements.values().cloned().collect();
        let mut changed = false;
        let mut pair_closures = Vec::new();
        for s in &current {
            for t in &current {
                let c = b.closure(&spec.multiply(s, t))?;
                changed |= b.absorb(&c);
                pair_closures.push(c);
            }
        }
        if !changed {
            let witness_depth = seed_closures
                .iter()
                .chain(&pair_closures)
                .map(|c| b.landing_depth(c))
                .max()
                .unwrap_or(0);
            let mut elements: Vec<NucleusElement> = b
                .elements
                .into_iter()
                .map(|(key, word)| NucleusElement { key, word })
                .collect();
            elements.sort_by(|x, y| x.word.shortlex_cmp(&y.word));
            return Ok(Nucleus {
                elements,
                witness_depth,
            });
        }
    }
}

/// Outcome of checking that every nucleus element has a trivial section.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AfdCheck {
    /// One shortest word `u` per element with `h(g, u) = e`.
    Holds(Vec<(GroupWord, Vec<Letter>)>),
    Fails(GroupWord),
    Inconclusive(GroupWord),
}

impl AfdCheck {
    pub fn holds(&self) -> bool {
        matches!(self, AfdCheck::Holds(_))
    }
}

/// For each `g` in the nucleus, searches breadth first for `u` with `h(g, u) = e`.
pub fn afd_hypothesis_check(spec: &GroupSpec, nucleus: &Nucleus, limits: &Limits) -> AfdCheck {
    let mut witnesses = Vec::with_capacity(nucleus.len());
    for e in &nucleus.elements {
        let c = section_closure(spec, &e.word, limits);
        match c.shortest_path_to_identity() {
            Some(u) => witnesses.push((e.word.clone(), u)),
            None if c.truncated() => return AfdCheck::Inconclusive(e.word.clone()),
            None => return AfdCheck::Fails(e.word.clone()),
        }
    }
    AfdCheck::Holds(witnesses)
}

/// `μ(⋃_n Y_g^n)` where `Y_g^n = {w : h(g, w_1…w_n) = e}`, i.e. one minus the
/// limit of `|X|^{-n} |{u ∈ X^n : h(g, u) ≠ e}|`.
pub fn y_measure(spec: &GroupSpec, g: &GroupWord, limits: &Limits) -> Result<MeasureReport> {
    let c = section_closure(spec, g, limits);
    if !c.truncated() {
        let survival = survival_limit(&c, |_, _| true)?;
        return Ok(MeasureReport::exact(
            Rational::one() - &survival.values[c.root()],
        ));
    }
    let n = limits.max_depth;
    let nontrivial = count_nontrivial_sections(spec, g, n, limits)?;
    let lower = Rational::one() - scaled(&nontrivial.count, spec.alphabet_size(), n);
    let lower = if lower < Rational::zero() {
        Rational::zero()
    } else {
        lower
    };
    Ok(MeasureReport::bounds(lower, Rational::one(), n))
}

/// The smallest `m` with a trivial section at depth `m` for every nucleus
/// element, read off the witnesses.
pub fn escape_depth(check: &AfdCheck) -> Option<usize> {
    match check {
        AfdCheck::Holds(w) => Some(w.iter().map(|(_, u)| u.len()).max().unwrap_or(0)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::element_key;

    fn names(spec: &GroupSpec, n: &Nucleus) -> Vec<String> {
        n.elements
            .iter()
            .map(|e| spec.format_word(&e.word))
            .collect()
    }

    #[test]
    fn grigorchuk_nucleus() {
        let spec = GroupSpec::builtin("grigorchuk").unwrap();
        let n = compute_nucleus(&spec, &Limits::default()).unwrap();
        assert_eq!(names(&spec, &n), ["e", "a", "b", "c", "d"]);
        assert!(n.witness_depth <= 4);
    }

    #[test]
    fn odometer_and_dihedral_nuclei() {
        let odo = GroupSpec::builtin("odometer").unwrap();
        let n = compute_nucleus(&odo, &Limits::default()).unwrap();
        assert_eq!(names(&odo, &n), ["e", "a", "a'"]);

        let dih = GroupSpec::builtin("dihedral").unwrap();
        let n = compute_nucleus(&dih, &Limits::default()).unwrap();
        assert_eq!(names(&dih, &n), ["e", "a", "b"]);
    }

    #[test]
    fn trivial_group_nucleus() {
        let spec =
            GroupSpec::parse("alphabet_size = 2\ngen t perm = [0,1] sections = [\"t\",\"t\"]\n")
                .unwrap();
        let n = compute_nucleus(&spec, &Limits::default()).unwrap();
        assert_eq!(names(&spec, &n), ["e"]);
    }

    #[test]
    fn nucleus_is_section_closed() {
        let l = Limits::default();
        for name in crate::spec::BUILTIN_NAMES {
            let spec = GroupSpec::builtin(name).unwrap();
            let n = compute_nucleus(&spec, &l).unwrap();
            for e in &n.elements {
                for x in 0..spec.alphabet_size() {
                    let (_, h) = crate::act_letter(&spec, &e.word, x);
                    assert!(n.contains(&element_key(&spec, &h, &l)), "{name}");
                }
            }
        }
    }

    #[test]
    fn non_contracting_is_inconclusive() {
        // Aleshin's automaton generates a free group.
        let spec = GroupSpec::parse(
            "alphabet_size = 2\n\
             gen a perm = [1,0] sections = [\"c\",\"b\"]\n\
             gen b perm = [1,0] sections = [\"b\",\"c\"]\n\
             gen c perm = [0,1] sections = [\"a\",\"a\"]\n",
        )
        .unwrap();
        assert!(compute_nucleus(&spec, &Limits::new(400, 8)).is_err());
    }

    #[test]
    fn afd_witnesses() {
        let spec = GroupSpec::builtin("grigorchuk").unwrap();
        let l = Limits::default();
        let n = compute_nucleus(&spec, &l).unwrap();
        let AfdCheck::Holds(w) = afd_hypothesis_check(&spec, &n, &l) else {
            panic!("hypothesis must hold for the Grigorchuk group")
        };
        let find = |t: &str| {
            w.iter()
                .find(|(g, _)| spec.format_word(g) == t)
                .map(|(_, u)| u.clone())
                .unwrap()
        };
        assert_eq!(find("d"), vec![0]);
        assert_eq!(find("b"), vec![0, 0]);
        assert_eq!(find("e"), Vec::<Letter>::new());
        assert!(w.iter().all(|(_, u)| u.len() <= 2));
    }

    #[test]
    fn afd_fails_without_trivial_sections() {
        let spec = GroupSpec::parse(
            "alphabet_size = 2\n\
             gen a perm = [1,0] sections = [\"c\",\"b\"]\n\
             gen b perm = [1,0] sections = [\"b\",\"c\"]\n\
             gen c perm = [0,1] sections = [\"a\",\"a\"]\n",
        )
        .unwrap();
        let l = Limits::default();
        let c = section_closure(&spec, &spec.parse_word("a").unwrap(), &l);
        let nucleus = Nucleus {
            elements: vec![NucleusElement {
                key: c.canonical_key().unwrap(),
                word: spec.parse_word("a").unwrap(),
            }],
            witness_depth: 0,
        };
        assert!(matches!(
            afd_hypothesis_check(&spec, &nucleus, &l),
            AfdCheck::Fails(_)
        ));
        // Every section of a is nontrivial, so no point ever escapes.
        let y = y_measure(&spec, &spec.parse_word("a").unwrap(), &l).unwrap();
        assert_eq!(y.exact, Some(Rational::zero()));
    }

    #[test]
    fn y_measure_examples() {
        let l = Limits::default();
        let spec = GroupSpec::builtin("grigorchuk").unwrap();
        for t in ["b", "e", "abcd"] {
            let y = y_measure(&spec, &spec.parse_word(t).unwrap(), &l).unwrap();
            assert_eq!(y.exact, Some(Rational::one()), "{t}");
        }
        let odo = GroupSpec::builtin("odometer").unwrap();
        let y = y_measure(&odo, &odo.parse_word("a").unwrap(), &l).unwrap();
        assert_eq!(y.exact, Some(Rational::one()));
    }
}
