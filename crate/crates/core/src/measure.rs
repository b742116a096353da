//! Bernoulli-measure quantities of fixed-point sets.
//!
//! For the uniform Bernoulli measure `μ` on `X^ω`, the cylinder of a word of
//! length `n` has measure `|X|^{-n}`. Everything here is exact: counts are
//! big integers, measures are big rationals, and limits come from rational
//! linear systems over finite section automata.

use std::cell::RefCell;
use std::collections::HashMap;
use std::hash::Hash;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::closure::{is_identity, section_closure, SectionClosure, Verdict};
use crate::linalg::solve;
use crate::word::{GroupWord, Letter};
use crate::{act_letter, Error, GroupSpec, Limits, Result};

pub type Rational = BigRational;

pub(crate) fn rational(n: u64, d: u64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// `|X|^{-n}`.
pub(crate) fn cylinder(alphabet_size: usize, n: usize) -> Rational {
    Rational::new(
        1.into(),
        num_bigint::BigInt::from(alphabet_size).pow(n as u32),
    )
}

pub(crate) fn scaled(count: &BigUint, alphabet_size: usize, n: usize) -> Rational {
    Rational::from_integer(count.clone().into()) * cylinder(alphabet_size, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureMethod {
    LinearSystem,
    CountingBounds,
}

/// An exact value, or bounds obtained by counting cylinders.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureReport {
    pub exact: Option<Rational>,
    pub lower: Rational,
    pub upper: Rational,
    pub depth_used: usize,
    pub method: MeasureMethod,
}

impl MeasureReport {
    pub(crate) fn exact(value: Rational) -> Self {
        MeasureReport {
            lower: value.clone(),
            upper: value.clone(),
            exact: Some(value),
            depth_used: 0,
            method: MeasureMethod::LinearSystem,
        }
    }

    pub(crate) fn bounds(lower: Rational, upper: Rational, depth: usize) -> Self {
        MeasureReport {
            exact: None,
            lower,
            upper,
            depth_used: depth,
            method: MeasureMethod::CountingBounds,
        }
    }
}

/// A count that may over-approximate because some sections could not be
/// decided; `tainted` records that.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaintedCount {
    pub count: BigUint,
    pub tainted: bool,
}

// ---------------------------------------------------------------------------
// Counting

/// Walks sections either through a finite closure or directly on words.
trait Sections {
    type Node: Clone + Eq + Hash;
    fn step(&self, node: &Self::Node, x: Letter) -> (Letter, Self::Node);
    fn triviality(&self, node: &Self::Node) -> Verdict;
}

struct ClosureSections<'a>(&'a SectionClosure);

impl Sections for ClosureSections<'_> {
    type Node = usize;

    fn step(&self, &s: &usize, x: Letter) -> (Letter, usize) {
        (
            self.0.perm(s)[x],
            self.0.target(s, x).expect("closed closure"),
        )
    }

    fn triviality(&self, &s: &usize) -> Verdict {
        if self.0.is_identity_state(s) {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }
}

struct WordSections<'a> {
    spec: &'a GroupSpec,
    limits: &'a Limits,
    verdicts: RefCell<HashMap<GroupWord, Verdict>>,
}

impl Sections for WordSections<'_> {
    type Node = GroupWord;

    fn step(&self, node: &GroupWord, x: Letter) -> (Letter, GroupWord) {
        act_letter(self.spec, node, x)
    }

    fn triviality(&self, node: &GroupWord) -> Verdict {
        if node.is_empty() {
            return Verdict::Yes;
        }
        if let Some(&v) = self.verdicts.borrow().get(node) {
            return v;
        }
        let v = is_identity(self.spec, node, self.limits);
        self.verdicts.borrow_mut().insert(node.clone(), v);
        v
    }
}

#[derive(Debug, Clone, Default)]
struct Counts {
    /// Words `u` counted: those with `v(g, u) = u`, or all words when not
    /// restricted to fixed letters.
    fixed: BigUint,
    /// Of those, words with `h(g, u)` proven trivial.
    trivial: BigUint,
    tainted: bool,
}

impl Counts {
    fn nontrivial(&self) -> BigUint {
        &self.fixed - &self.trivial
    }
}

struct Counter<S: Sections> {
    sections: S,
    alphabet_size: usize,
    /// Descend only along letters fixed by the current section.
    fixed_only: bool,
    memo: HashMap<(S::Node, usize), Counts>,
}

impl<S: Sections> Counter<S> {
    fn new(sections: S, alphabet_size: usize, fixed_only: bool) -> Self {
        Counter {
            sections,
            alphabet_size,
            fixed_only,
            memo: HashMap::new(),
        }
    }

    /// Depth-first descent along fixed letters, memoized on (node, remaining depth).
    fn count(&mut self, node: &S::Node, depth: usize) -> Counts {
        if let Some(c) = self.memo.get(&(node.clone(), depth)) {
            return c.clone();
        }
        let verdict = self.sections.triviality(node);
        let result = if verdict == Verdict::Yes {
            let all = BigUint::from(self.alphabet_size).pow(depth as u32);
            Counts {
                fixed: all.clone(),
                trivial: all,
                tainted: false,
            }
        } else if depth == 0 {
            Counts {
                fixed: BigUint::one(),
                trivial: BigUint::zero(),
                tainted: verdict == Verdict::Unknown,
            }
        } else {
            let mut acc = Counts::default();
            for x in 0..self.alphabet_size {
                let (y, child) = self.sections.step(node, x);
                if self.fixed_only && y != x {
                    continue;
                }
                let c = self.count(&child, depth - 1);
                acc.fixed += c.fixed;
                acc.trivial += c.trivial;
                acc.tainted |= c.tainted;
            }
            acc
        };
        self.memo.insert((node.clone(), depth), result.clone());
        result
    }
}

fn counts(
    spec: &GroupSpec,
    g: &GroupWord,
    n: usize,
    limits: &Limits,
    fixed_only: bool,
) -> Result<Counts> {
    limits.check_depth(n)?;
    let closure = section_closure(spec, g, limits);
    let k = spec.alphabet_size();
    Ok(if closure.truncated() {
        let sections = WordSections {
            spec,
            limits,
            verdicts: RefCell::new(HashMap::new()),
        };
        Counter::new(sections, k, fixed_only).count(&spec.normalize(g), n)
    } else {
        Counter::new(ClosureSections(&closure), k, fixed_only).count(&closure.root(), n)
    })
}

/// `|{u ∈ X^n : v(g, u) = u}|`.
pub fn count_fixed(spec: &GroupSpec, g: &GroupWord, n: usize, limits: &Limits) -> Result<BigUint> {
    Ok(counts(spec, g, n, limits, true)?.fixed)
}

/// `|{u ∈ X^n : v(g, u) = u, h(g, u) ≠ e}|`; undecided sections count as
/// nontrivial and taint the result.
pub fn count_fixed_nontrivial(
    spec: &GroupSpec,
    g: &GroupWord,
    n: usize,
    limits: &Limits,
) -> Result<TaintedCount> {
    let c = counts(spec, g, n, limits, true)?;
    Ok(TaintedCount {
        count: c.nontrivial(),
        tainted: c.tainted,
    })
}

/// `|{u ∈ X^n : h(g, u) ≠ e}|`, with undecided sections counted as nontrivial.
pub fn count_nontrivial_sections(
    spec: &GroupSpec,
    g: &GroupWord,
    n: usize,
    limits: &Limits,
) -> Result<TaintedCount> {
    let c = counts(spec, g, n, limits, false)?;
    Ok(TaintedCount {
        count: c.nontrivial(),
        tainted: c.tainted,
    })
}

/// `|X|^{-n} · count_fixed_nontrivial(g, n)`, nonincreasing in `n` with limit
/// the measure of the non-generic points of `g`.
pub fn generic_defect(
    spec: &GroupSpec,
    g: &GroupWord,
    n: usize,
    limits: &Limits,
) -> Result<Rational> {
    let c = count_fixed_nontrivial(spec, g, n, limits)?;
    Ok(scaled(&c.count, spec.alphabet_size(), n))
}

// ---------------------------------------------------------------------------
// Fixed-point measure

/// `μ(fix(g))`, exactly from the recursion
/// `m_s = |X|^{-1} Σ_{x : s(x) = x} m_{h(s, x)}` on a finite closure, or as
/// counting bounds at `max_depth` otherwise.
pub fn fixed_measure(spec: &GroupSpec, g: &GroupWord, limits: &Limits) -> Result<MeasureReport> {
    let closure = section_closure(spec, g, limits);
    if closure.truncated() {
        let n = limits.max_depth;
        let c = counts(spec, g, n, limits, true)?;
        let k = spec.alphabet_size();
        return Ok(MeasureReport::bounds(
            scaled(&c.trivial, k, n),
            scaled(&c.fixed, k, n),
            n,
        ));
    }
    Ok(MeasureReport::exact(
        fixed_measure_on(&closure)?[closure.root()].clone(),
    ))
}

/// Exact `μ(fix(s))` for every state of a finite closure.
pub fn fixed_measure_on(closure: &SectionClosure) -> Result<Vec<Rational>> {
    let k = closure.alphabet_size();
    let unknowns: Vec<usize> = (0..closure.len())
        .filter(|&s| !closure.is_identity_state(s))
        .collect();
    let mut slot = vec![usize::MAX; closure.len()];
    for (i, &s) in unknowns.iter().enumerate() {
        slot[s] = i;
    }
    let step = rational(1, k as u64);
    let n = unknowns.len();
    let mut a = vec![vec![Rational::zero(); n]; n];
    let mut b = vec![Rational::zero(); n];
    for (i, &s) in unknowns.iter().enumerate() {
        a[i][i] += Rational::one();
        for x in 0..k {
            if !closure.fixes(s, x) {
                continue;
            }
            let t = closure.target(s, x).expect("closed closure");
            if closure.is_identity_state(t) {
                b[i] += &step;
            } else {
                a[i][slot[t]] -= &step;
            }
        }
    }
    let solution = solve(a, b)?;
    Ok((0..closure.len())
        .map(|s| {
            if closure.is_identity_state(s) {
                Rational::one()
            } else {
                solution[slot[s]].clone()
            }
        })
        .collect())
}

/// Exact `μ(fix(g))`, or `InexactInput` when only bounds are available.
pub fn exact_fixed_measure(spec: &GroupSpec, g: &GroupWord, limits: &Limits) -> Result<Rational> {
    fixed_measure(spec, g, limits)?
        .exact
        .ok_or_else(|| Error::InexactInput(spec.format_word(g)))
}

// ---------------------------------------------------------------------------
// Survival limits on finite closures

/// `lim_n |X|^{-n} · #(paths of length n from s)` in the subgraph of
/// non-identity states using only the letters accepted by `allow`.
///
/// Closed strongly connected classes where every state keeps all `|X|`
/// letters have limit 1; states that cannot reach such a class have limit 0;
/// the rest solve the averaged recursion, which is then nonsingular.
#[derive(Debug, Clone)]
pub(crate) struct SurvivalLimit {
    pub values: Vec<Rational>,
    /// States of full closed classes, each class sorted.
    pub full_classes: Vec<Vec<usize>>,
}

pub(crate) fn survival_limit<F>(closure: &SectionClosure, allow: F) -> Result<SurvivalLimit>
where
    F: Fn(usize, Letter) -> bool,
{
    assert!(
        !closure.truncated(),
        "survival limits need a finite closure"
    );
    let n = closure.len();
    let k = closure.alphabet_size();
    let edges: Vec<Vec<usize>> = (0..n)
        .map(|s| {
            if closure.is_identity_state(s) {
                return Vec::new();
            }
            (0..k)
                .filter(|&x| allow(s, x))
                .map(|x| closure.target(s, x).expect("closed closure"))
                .filter(|&t| !closure.is_identity_state(t))
                .collect()
        })
        .collect();

    let mut graph = DiGraph::<usize, ()>::new();
    let nodes: Vec<_> = (0..n).map(|s| graph.add_node(s)).collect();
    for (s, targets) in edges.iter().enumerate() {
        for &t in targets {
            graph.add_edge(nodes[s], nodes[t], ());
        }
    }
    let mut class_of = vec![usize::MAX; n];
    let sccs = tarjan_scc(&graph);
    for (c, scc) in sccs.iter().enumerate() {
        for &node in scc {
            class_of[graph[node]] = c;
        }
    }
    let mut full = vec![false; n];
    let mut full_classes = Vec::new();
    for (c, scc) in sccs.iter().enumerate() {
        let states: Vec<usize> = scc.iter().map(|&v| graph[v]).collect();
        let is_full = states.iter().all(|&s| {
            !closure.is_identity_state(s)
                && edges[s].len() == k
                && edges[s].iter().all(|&t| class_of[t] == c)
        });
        if is_full {
            let mut states = states;
            states.sort_unstable();
            for &s in &states {
                full[s] = true;
            }
            full_classes.push(states);
        }
    }
    full_classes.sort();

    // Backward reachability to full classes.
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (s, targets) in edges.iter().enumerate() {
        for &t in targets {
            preds[t].push(s);
        }
    }
    let mut reaches = full.clone();
    let mut stack: Vec<usize> = (0..n).filter(|&s| full[s]).collect();
    while let Some(t) = stack.pop() {
        for &s in &preds[t] {
            if !reaches[s] {
                reaches[s] = true;
                stack.push(s);
            }
        }
    }

    let transient: Vec<usize> = (0..n).filter(|&s| reaches[s] && !full[s]).collect();
    let mut slot = vec![usize::MAX; n];
    for (i, &s) in transient.iter().enumerate() {
        slot[s] = i;
    }
    let step = rational(1, k as u64);
    let m = transient.len();
    let mut a = vec![vec![Rational::zero(); m]; m];
    let mut b = vec![Rational::zero(); m];
    for (i, &s) in transient.iter().enumerate() {
        a[i][i] += Rational::one();
        for &t in &edges[s] {
            if full[t] {
                b[i] += &step;
            } else if reaches[t] {
                a[i][slot[t]] -= &step;
            }
        }
    }
    let solution = solve(a, b)?;
    let values = (0..n)
        .map(|s| {
            if full[s] {
                Rational::one()
            } else if reaches[s] {
                solution[slot[s]].clone()
            } else {
                Rational::zero()
            }
        })
        .collect();
    Ok(SurvivalLimit {
        values,
        full_classes,
    })
}

// ---------------------------------------------------------------------------
// Genericity

/// The 0-1 law for the measure of the set of points generic for every element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Genericity {
    One,
    Zero,
    Unknown,
}

/// Evidence about `lim_n generic_defect(g, n)` for one tested element.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectEvidence {
    pub element: GroupWord,
    pub exact: Option<Rational>,
    pub lower: Rational,
    pub upper: Rational,
    /// Representatives of non-identity classes fixing every letter with all
    /// sections inside the class; nonempty only for a positive defect.
    pub witness: Vec<GroupWord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenericityReport {
    pub class: Genericity,
    /// True when the tested set includes a computed nucleus.
    pub contracting: bool,
    pub tested: Vec<DefectEvidence>,
}

/// Limit of the genericity defect of `g`: exact on finite closures, an
/// interval `[0, generic_defect(g, max_depth)]` otherwise.
pub fn defect_limit(spec: &GroupSpec, g: &GroupWord, limits: &Limits) -> Result<DefectEvidence> {
    let closure = section_closure(spec, g, limits);
    if closure.truncated() {
        let upper = generic_defect(spec, g, limits.max_depth, limits)?;
        return Ok(DefectEvidence {
            element: spec.normalize(g),
            exact: None,
            lower: Rational::zero(),
            upper,
            witness: Vec::new(),
        });
    }
    let survival = survival_limit(&closure, |s, x| closure.fixes(s, x))?;
    let value = survival.values[closure.root()].clone();
    let witness = if value.is_zero() {
        Vec::new()
    } else {
        survival
            .full_classes
            .iter()
            .flatten()
            .map(|&s| closure.word(s).clone())
            .collect()
    };
    Ok(DefectEvidence {
        element: spec.normalize(g),
        lower: value.clone(),
        upper: value.clone(),
        exact: Some(value),
        witness,
    })
}

/// Classifies `μ(G_gen)` over the generators and, when the action is found to
/// be contracting, every element of its nucleus.
pub fn genericity_classify(spec: &GroupSpec, limits: &Limits) -> Result<GenericityReport> {
    let mut elements = spec.generator_words();
    let nucleus = crate::contracting::compute_nucleus(spec, limits).ok();
    if let Some(n) = &nucleus {
        for e in &n.elements {
            elements.push(e.word.clone());
        }
    }
    let mut tested: Vec<DefectEvidence> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for g in elements {
        let g = spec.normalize(&g);
        if !seen.insert(g.clone()) {
            continue;
        }
        tested.push(defect_limit(spec, &g, limits)?);
    }
    let class = if tested.iter().any(|t| !t.witness.is_empty()) {
        Genericity::Zero
    } else if tested
        .iter()
        .all(|t| t.exact.as_ref().is_some_and(Zero::is_zero))
    {
        Genericity::One
    } else {
        Genericity::Unknown
    };
    Ok(GenericityReport {
        class,
        contracting: nucleus.is_some(),
        tested,
    })
}

// ---------------------------------------------------------------------------
// Pre-KMS functions

/// Checks `φ(e) = 1` and `φ(g) = |X|^{-1} Σ_{x : g(x) = x} φ(h(g, x))` exactly
/// on every sampled element.
pub fn pre_kms_check<F>(spec: &GroupSpec, mut phi: F, sample: &[GroupWord]) -> Result<bool>
where
    F: FnMut(&GroupWord) -> Result<Rational>,
{
    if !phi(&GroupWord::identity())?.is_one() {
        return Ok(false);
    }
    let k = spec.alphabet_size();
    let step = rational(1, k as u64);
    for g in sample {
        let lhs = phi(g)?;
        let mut rhs = Rational::zero();
        for x in 0..k {
            let (y, h) = act_letter(spec, g, x);
            if y == x {
                rhs += phi(&h)?;
            }
        }
        if lhs != rhs * &step {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grig() -> GroupSpec {
        GroupSpec::builtin("grigorchuk").unwrap()
    }

    fn w(spec: &GroupSpec, t: &str) -> GroupWord {
        spec.parse_word(t).unwrap()
    }

    /// Exhaustive count over all of `X^n`, independent of the memoized descent.
    fn brute_counts(spec: &GroupSpec, g: &GroupWord, n: usize) -> (u64, u64) {
        let k = spec.alphabet_size();
        let l = Limits::default();
        let (mut fixed, mut nontrivial) = (0, 0);
        for code in 0..k.pow(n as u32) {
            let mut u = Vec::with_capacity(n);
            let mut c = code;
            for _ in 0..n {
                u.push(c % k);
                c /= k;
            }
            let (v, h) = crate::act_word(spec, g, &u);
            if v == u {
                fixed += 1;
                if is_identity(spec, &h, &l) != Verdict::Yes {
                    nontrivial += 1;
                }
            }
        }
        (fixed, nontrivial)
    }

    #[test]
    fn count_fixed_examples() {
        let spec = grig();
        let l = Limits::default();
        assert_eq!(
            count_fixed(&spec, &w(&spec, "b"), 1, &l).unwrap(),
            2u32.into()
        );
        assert_eq!(
            count_fixed(&spec, &w(&spec, "a"), 1, &l).unwrap(),
            0u32.into()
        );
        assert_eq!(
            count_fixed(&spec, &w(&spec, "b"), 3, &l).unwrap(),
            2u32.into()
        );
        assert_eq!(brute_counts(&spec, &w(&spec, "b"), 3).0, 2);
    }

    #[test]
    fn count_nontrivial_examples() {
        let spec = grig();
        let l = Limits::default();
        let c = count_fixed_nontrivial(&spec, &w(&spec, "b"), 2, &l).unwrap();
        assert_eq!(
            c,
            TaintedCount {
                count: 2u32.into(),
                tainted: false
            }
        );
        let c = count_fixed_nontrivial(&spec, &w(&spec, "d"), 1, &l).unwrap();
        assert_eq!(c.count, 1u32.into());
        for n in 0..5 {
            let c = count_fixed_nontrivial(&spec, &GroupWord::identity(), n, &l).unwrap();
            assert!(c.count.is_zero());
        }
    }

    #[test]
    fn counts_match_enumeration() {
        let spec = grig();
        let l = Limits::default();
        for t in ["b", "c", "d", "ab", "bada", "cacab", "dabacd"] {
            let g = w(&spec, t);
            for n in 0..=7 {
                let (fixed, nontrivial) = brute_counts(&spec, &g, n);
                assert_eq!(
                    count_fixed(&spec, &g, n, &l).unwrap(),
                    fixed.into(),
                    "{t} {n}"
                );
                assert_eq!(
                    count_fixed_nontrivial(&spec, &g, n, &l).unwrap().count,
                    nontrivial.into(),
                    "{t} {n}"
                );
            }
        }
    }

    #[test]
    fn depth_budget() {
        let spec = grig();
        let l = Limits::new(100, 4);
        assert!(matches!(
            count_fixed(&spec, &w(&spec, "b"), 5, &l),
            Err(Error::DepthExceeded {
                depth: 5,
                max_depth: 4
            })
        ));
    }

    #[test]
    fn grigorchuk_fixed_measures() {
        let spec = grig();
        let l = Limits::default();
        let expect = [
            ("a", 0, 1),
            ("b", 1, 7),
            ("c", 2, 7),
            ("d", 4, 7),
            ("e", 1, 1),
        ];
        for (t, p, q) in expect {
            let r = fixed_measure(&spec, &w(&spec, t), &l).unwrap();
            assert_eq!(r.exact, Some(rational(p, q)), "{t}");
            assert_eq!(r.method, MeasureMethod::LinearSystem);
        }
    }

    #[test]
    fn dihedral_fixed_measures() {
        let spec = GroupSpec::builtin("dihedral").unwrap();
        let l = Limits::default();
        for t in ["a", "b"] {
            assert_eq!(
                exact_fixed_measure(&spec, &w(&spec, t), &l).unwrap(),
                Rational::zero()
            );
        }
    }

    #[test]
    fn truncated_closure_gives_bounds() {
        let spec = GroupSpec::parse(
            "alphabet_size = 2\n\
             gen a perm = [1,0] sections = [\"ab\",\"ba\"]\n\
             gen b perm = [0,1] sections = [\"ab\",\"ba\"]\n",
        )
        .unwrap();
        let l = Limits::new(40, 6);
        let r = fixed_measure(&spec, &w(&spec, "b"), &l).unwrap();
        assert_eq!(r.method, MeasureMethod::CountingBounds);
        assert!(r.exact.is_none());
        assert!(r.lower <= r.upper);
        assert_eq!(r.depth_used, 6);
        assert!(matches!(
            exact_fixed_measure(&spec, &w(&spec, "b"), &l),
            Err(Error::InexactInput(_))
        ));
    }

    #[test]
    fn generic_defect_examples() {
        let spec = grig();
        let l = Limits::default();
        assert_eq!(
            generic_defect(&spec, &w(&spec, "b"), 2, &l).unwrap(),
            rational(1, 2)
        );
        assert_eq!(
            generic_defect(&spec, &w(&spec, "b"), 3, &l).unwrap(),
            rational(1, 8)
        );
        assert!(generic_defect(&spec, &GroupWord::identity(), 6, &l)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn classification() {
        let l = Limits::default();
        for name in ["grigorchuk", "dihedral", "odometer"] {
            let spec = GroupSpec::builtin(name).unwrap();
            let r = genericity_classify(&spec, &l).unwrap();
            assert_eq!(r.class, Genericity::One, "{name}");
            assert!(r.contracting);
        }
    }

    #[test]
    fn classification_unknown_when_everything_truncates() {
        let spec = GroupSpec::parse(
            "alphabet_size = 2\n\
             gen a perm = [1,0] sections = [\"ab\",\"ba\"]\n\
             gen b perm = [0,1] sections = [\"ab\",\"ba\"]\n",
        )
        .unwrap();
        let r = genericity_classify(&spec, &Limits::new(40, 6)).unwrap();
        assert_eq!(r.class, Genericity::Unknown);
        assert!(!r.contracting);
        assert!(r
            .tested
            .iter()
            .all(|t| t.exact.is_none() && t.lower <= t.upper));
    }

    #[test]
    fn survival_on_grigorchuk_vanishes() {
        let spec = grig();
        let c = section_closure(&spec, &w(&spec, "b"), &Limits::default());
        let all = survival_limit(&c, |_, _| true).unwrap();
        assert!(all.full_classes.is_empty());
        assert!(all.values.iter().all(Zero::is_zero));
    }

    #[test]
    fn full_class_is_a_zero_witness() {
        // A class fixing every letter acts trivially, so it can only stay
        // non-identity when an equality test failed upstream. Model that by
        // clearing the identity flags: s0 -> (s1, s1), s1 -> (s1, s1).
        let c = SectionClosure::from_parts(
            2,
            vec![vec![0, 1], vec![0, 1]],
            vec![vec![1, 1], vec![1, 1]],
            vec![false, false],
        );
        let r = survival_limit(&c, |s, x| c.fixes(s, x)).unwrap();
        assert_eq!(r.full_classes, vec![vec![1]]);
        assert_eq!(r.values, vec![Rational::one(), Rational::one()]);

        // Half the mass escapes to a letter-moving state each step: s0 -> (s0, s2).
        let c = SectionClosure::from_parts(
            2,
            vec![vec![0, 1], vec![0, 1], vec![1, 0]],
            vec![vec![0, 2], vec![1, 1], vec![2, 2]],
            vec![false; 3],
        );
        let r = survival_limit(&c, |s, x| c.fixes(s, x)).unwrap();
        assert_eq!(r.values[0], Rational::zero());
        assert_eq!(r.values[1], Rational::one());
    }

    #[test]
    fn transient_states_solve_the_recursion() {
        // s0 -> (s1, s2): s1 is a full class, s2 dies; limit at s0 is 1/2.
        let c = SectionClosure::from_parts(
            2,
            vec![vec![0, 1], vec![0, 1], vec![1, 0]],
            vec![vec![1, 2], vec![1, 1], vec![2, 2]],
            vec![false; 3],
        );
        let r = survival_limit(&c, |s, x| c.fixes(s, x)).unwrap();
        assert_eq!(r.values[0], rational(1, 2));
    }

    #[test]
    fn nontrivial_sections_count() {
        let spec = grig();
        let l = Limits::default();
        // b: depth 1 sections a, c; depth 2 sections e, e, a, d.
        let c = count_nontrivial_sections(&spec, &w(&spec, "b"), 1, &l).unwrap();
        assert_eq!(c.count, 2u32.into());
        let c = count_nontrivial_sections(&spec, &w(&spec, "b"), 2, &l).unwrap();
        assert_eq!(c.count, 2u32.into());
    }

    #[test]
    fn pre_kms_examples() {
        let spec = grig();
        let l = Limits::default();
        let phi = |g: &GroupWord| exact_fixed_measure(&spec, g, &l);
        let gens = spec.generator_words();
        assert!(pre_kms_check(&spec, phi, &gens).unwrap());
        assert!(pre_kms_check(&spec, phi, &[GroupWord::identity()]).unwrap());

        let b = w(&spec, "b");
        let perturbed = |g: &GroupWord| {
            if crate::equal(&spec, g, &b, &l).is_yes() {
                Ok(rational(1, 6))
            } else {
                exact_fixed_measure(&spec, g, &l)
            }
        };
        assert!(!pre_kms_check(&spec, perturbed, &gens).unwrap());
    }
}
