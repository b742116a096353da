//! Section closures, the word problem and canonical element keys.
//!
//! The sections `{h(g, u) : u ∈ X*}` of a group word form a Mealy automaton
//! (letter permutation per state, one transition per letter). Exploring it
//! breadth first and minimizing by partition refinement yields an automaton
//! that depends only on the action of `g`, so its canonical encoding decides
//! equality in the group.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use crate::word::{GroupWord, Letter};
use crate::GroupSpec;

/// Exploration budgets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Section-closure state budget.
    pub max_states: usize,
    /// Word-length budget for counting operations.
    pub max_depth: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: 10_000,
            max_depth: 24,
        }
    }
}

impl Limits {
    pub fn new(max_states: usize, max_depth: usize) -> Self {
        assert!(max_states > 0 && max_depth > 0, "limits must be positive");
        Limits {
            max_states,
            max_depth,
        }
    }

    /// Total number of generator symbols a closure may store across its states.
    pub(crate) fn symbol_budget(&self) -> usize {
        self.max_states.saturating_mul(SYMBOLS_PER_STATE)
    }

    pub(crate) fn check_depth(&self, depth: usize) -> crate::Result<()> {
        if depth > self.max_depth {
            Err(crate::Error::DepthExceeded {
                depth,
                max_depth: self.max_depth,
            })
        } else {
            Ok(())
        }
    }
}

/// Three-valued answer for questions that a bounded exploration may not settle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

impl Verdict {
    pub fn is_yes(self) -> bool {
        self == Verdict::Yes
    }
}

/// Key identifying a group element. Two words with finite closures share an
/// `Automaton` key iff they act identically; `Word` keys are a fallback for
/// truncated closures and are not canonical.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElementKey {
    Automaton(Arc<[u32]>),
    Word(GroupWord),
}

impl ElementKey {
    pub fn is_canonical(&self) -> bool {
        matches!(self, ElementKey::Automaton(_))
    }
}

/// State budget of the equality test used to merge growing sections.
const MERGE_BUDGET: usize = 128;
/// Sections longer than this multiple of the root length are not merge candidates.
const MERGE_GROWTH: usize = 8;
/// Number of words in the action signature used to shortlist merge candidates.
const SIGNATURE_WORDS: usize = 16;
/// Average word length allowed per state before exploration counts as truncated.
const SYMBOLS_PER_STATE: usize = 64;

/// The automaton of sections of a group word.
#[derive(Debug, Clone)]
pub struct SectionClosure {
    alphabet_size: usize,
    words: Vec<GroupWord>,
    perms: Vec<Vec<Letter>>,
    trans: Vec<Vec<Option<usize>>>,
    identity: Vec<bool>,
    truncated: bool,
}

impl SectionClosure {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// The root is always state 0.
    pub fn root(&self) -> usize {
        0
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// Representative word of a state (shortlex-least among merged words).
    pub fn word(&self, state: usize) -> &GroupWord {
        &self.words[state]
    }

    pub fn perm(&self, state: usize) -> &[Letter] {
        &self.perms[state]
    }

    /// `h(state, x)`; `None` only in truncated closures.
    pub fn target(&self, state: usize, x: Letter) -> Option<usize> {
        self.trans[state][x]
    }

    pub fn is_identity_state(&self, state: usize) -> bool {
        self.identity[state]
    }

    pub fn identity_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&s| self.identity[s])
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn fixes(&self, state: usize, x: Letter) -> bool {
        self.perms[state][x] == x
    }

    /// Canonical encoding of the minimized automaton, `None` when truncated.
    pub fn canonical_key(&self) -> Option<ElementKey> {
        self.state_key(self.root())
    }

    /// States reachable by arbitrarily long paths, i.e. lying on or below a cycle.
    pub fn recurrent_reach(&self) -> Vec<bool> {
        let n = self.len();
        let succ: Vec<Vec<usize>> = (0..n)
            .map(|s| self.trans[s].iter().flatten().copied().collect())
            .collect();
        // Iteratively peel states with no predecessors left; whatever survives
        // is reachable from a cycle within the explored part.
        let mut indeg = vec![0usize; n];
        for row in &succ {
            for &t in row {
                indeg[t] += 1;
            }
        }
        let mut alive = vec![true; n];
        let mut stack: Vec<usize> = (0..n).filter(|&s| indeg[s] == 0).collect();
        while let Some(s) = stack.pop() {
            alive[s] = false;
            for &t in &succ[s] {
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    stack.push(t);
                }
            }
        }
        alive
    }

    /// Shortest, then numerically least, word `u` with `h(root, u)` an identity state.
    pub fn shortest_path_to_identity(&self) -> Option<Vec<Letter>> {
        let mut parent: Vec<Option<(usize, Letter)>> = vec![None; self.len()];
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([self.root()]);
        seen[self.root()] = true;
        while let Some(s) = queue.pop_front() {
            if self.identity[s] {
                let mut path = Vec::new();
                let mut cur = s;
                while let Some((p, x)) = parent[cur] {
                    path.push(x);
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            for x in 0..self.alphabet_size {
                if let Some(t) = self.trans[s][x] {
                    if !seen[t] {
                        seen[t] = true;
                        parent[t] = Some((s, x));
                        queue.push_back(t);
                    }
                }
            }
        }
        None
    }
}

impl SectionClosure {
    /// Builds an automaton from raw tables, with identity flags as given.
    #[cfg(test)]
    pub(crate) fn from_parts(
        alphabet_size: usize,
        perms: Vec<Vec<Letter>>,
        targets: Vec<Vec<usize>>,
        identity: Vec<bool>,
    ) -> Self {
        let trans: Vec<Vec<Option<usize>>> = targets
            .into_iter()
            .map(|row| row.into_iter().map(Some).collect())
            .collect();
        SectionClosure {
            alphabet_size,
            words: vec![GroupWord::identity(); perms.len()],
            perms,
            trans,
            identity,
            truncated: false,
        }
    }

    /// Canonical key of the element acting as `state`: breadth-first
    /// renumbering of the part reachable from it. Sub-automata of a minimized
    /// closure are minimal, so this is canonical too.
    pub fn state_key(&self, state: usize) -> Option<ElementKey> {
        if self.truncated {
            return None;
        }
        let k = self.alphabet_size;
        let mut order = vec![usize::MAX; self.len()];
        let mut bfs = vec![state];
        order[state] = 0;
        let mut i = 0;
        while i < bfs.len() {
            let s = bfs[i];
            for x in 0..k {
                let t = self.trans[s][x].expect("closed closure");
                if order[t] == usize::MAX {
                    order[t] = bfs.len();
                    bfs.push(t);
                }
            }
            i += 1;
        }
        let mut code = Vec::with_capacity(1 + 2 * bfs.len() * k);
        code.push(bfs.len() as u32);
        for &s in &bfs {
            code.extend(self.perms[s].iter().map(|&y| y as u32));
        }
        for &s in &bfs {
            code.extend((0..k).map(|x| order[self.trans[s][x].unwrap()] as u32));
        }
        Some(ElementKey::Automaton(code.into()))
    }
}

/// Explores and minimizes the section automaton of `g`.
pub fn section_closure(spec: &GroupSpec, g: &GroupWord, limits: &crate::Limits) -> SectionClosure {
    let raw = explore(spec, &spec.normalize(g), limits);
    if raw.truncated {
        raw
    } else {
        minimize(raw)
    }
}

/// Decides whether `g` acts trivially; `No` as soon as some section moves a letter.
pub fn is_identity(spec: &GroupSpec, g: &GroupWord, limits: &crate::Limits) -> Verdict {
    let root = spec.normalize(g);
    if root.is_empty() {
        return Verdict::Yes;
    }
    let mut seen: HashSet<GroupWord> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(root.clone());
    queue.push_back(root);
    let mut truncated = false;
    let mut symbols = 0;
    while let Some(w) = queue.pop_front() {
        for x in 0..spec.alphabet_size() {
            let (y, h) = spec.letter_action(&w, x);
            if y != x {
                return Verdict::No;
            }
            if h.is_empty() || seen.contains(&h) {
                continue;
            }
            if seen.len() >= limits.max_states || symbols + h.len() > limits.symbol_budget() {
                truncated = true;
                continue;
            }
            symbols += h.len();
            seen.insert(h.clone());
            queue.push_back(h);
        }
    }
    if truncated {
        Verdict::Unknown
    } else {
        Verdict::Yes
    }
}

/// Equality in the group: `is_identity(g1 · g2⁻¹)`.
pub fn equal(spec: &GroupSpec, g1: &GroupWord, g2: &GroupWord, limits: &crate::Limits) -> Verdict {
    is_identity(spec, &spec.multiply(g1, &spec.inverse(g2)), limits)
}

/// Key of the element represented by `g`.
pub fn element_key(spec: &GroupSpec, g: &GroupWord, limits: &crate::Limits) -> ElementKey {
    let closure = section_closure(spec, g, limits);
    closure
        .canonical_key()
        .unwrap_or_else(|| ElementKey::Word(spec.normalize(g)))
}

fn explore(spec: &GroupSpec, root: &GroupWord, limits: &crate::Limits) -> SectionClosure {
    let k = spec.alphabet_size();
    let mut words: Vec<GroupWord> = vec![root.clone()];
    let mut index: HashMap<GroupWord, usize> = HashMap::from([(root.clone(), 0)]);
    let mut perms: Vec<Vec<Letter>> = Vec::new();
    let mut trans: Vec<Vec<Option<usize>>> = Vec::new();
    let mut truncated = false;
    let mut symbols = root.len();

    let grow_limit = root.len().max(1);
    let sig_depth = signature_depth(k);
    let inner = crate::Limits::new(limits.max_states.min(MERGE_BUDGET), limits.max_depth);
    // Built on the first growing section; maps action signatures to states.
    let mut by_signature: Option<HashMap<Vec<Letter>, Vec<usize>>> = None;

    let mut next = 0;
    while next < words.len() {
        let w = words[next].clone();
        let mut perm = Vec::with_capacity(k);
        let mut row = Vec::with_capacity(k);
        for x in 0..k {
            let (y, h) = spec.letter_action(&w, x);
            perm.push(y);
            if let Some(&t) = index.get(&h) {
                row.push(Some(t));
                continue;
            }
            // A growing section: look for an equal, already known state.
            let mut merged = None;
            let mut sig = None;
            if h.len() > grow_limit && h.len() <= MERGE_GROWTH * grow_limit {
                let table = by_signature.get_or_insert_with(|| {
                    let mut table: HashMap<Vec<Letter>, Vec<usize>> = HashMap::new();
                    for (s, word) in words.iter().enumerate() {
                        table
                            .entry(signature(spec, word, sig_depth))
                            .or_default()
                            .push(s);
                    }
                    table
                });
                let hs = signature(spec, &h, sig_depth);
                merged = table
                    .get(&hs)
                    .into_iter()
                    .flatten()
                    .copied()
                    .find(|&s| equal(spec, &h, &words[s], &inner).is_yes());
                sig = Some(hs);
            }
            if let Some(s) = merged {
                index.insert(h, s);
                row.push(Some(s));
            } else if words.len() < limits.max_states && symbols + h.len() <= limits.symbol_budget()
            {
                let id = words.len();
                symbols += h.len();
                if let Some(table) = by_signature.as_mut() {
                    if h.len() <= MERGE_GROWTH * grow_limit {
                        let hs = sig.unwrap_or_else(|| signature(spec, &h, sig_depth));
                        table.entry(hs).or_default().push(id);
                    }
                }
                index.insert(h.clone(), id);
                words.push(h);
                row.push(Some(id));
            } else {
                truncated = true;
                row.push(None);
            }
        }
        perms.push(perm);
        trans.push(row);
        next += 1;
    }
    let identity = identity_fixpoint(&perms, &trans);
    SectionClosure {
        alphabet_size: k,
        words,
        perms,
        trans,
        identity,
        truncated,
    }
}

fn signature_depth(k: usize) -> usize {
    let mut depth = 0;
    let mut count = 1;
    while count * k <= SIGNATURE_WORDS {
        count *= k;
        depth += 1;
    }
    depth.max(1)
}

/// Images of all words of length `depth`, concatenated.
fn signature(spec: &GroupSpec, g: &GroupWord, depth: usize) -> Vec<Letter> {
    let k = spec.alphabet_size();
    let mut out = Vec::new();
    let mut frontier = vec![g.clone()];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(frontier.len() * k);
        for w in &frontier {
            for x in 0..k {
                let (y, h) = spec.letter_action(w, x);
                out.push(y);
                next.push(h);
            }
        }
        frontier = next;
    }
    out
}

/// Greatest set of states with identity permutation whose transitions are all
/// known and stay inside the set.
fn identity_fixpoint(perms: &[Vec<Letter>], trans: &[Vec<Option<usize>>]) -> Vec<bool> {
    let mut ident: Vec<bool> = perms
        .iter()
        .zip(trans)
        .map(|(p, row)| {
            p.iter().enumerate().all(|(x, &y)| x == y) && row.iter().all(Option::is_some)
        })
        .collect();
    loop {
        let mut changed = false;
        for s in 0..ident.len() {
            if ident[s] && trans[s].iter().any(|t| !ident[t.unwrap()]) {
                ident[s] = false;
                changed = true;
            }
        }
        if !changed {
            return ident;
        }
    }
}

/// Moore-style partition refinement seeded by letter permutations, followed by
/// breadth-first renumbering from the root.
fn minimize(raw: SectionClosure) -> SectionClosure {
    let n = raw.len();
    let k = raw.alphabet_size;
    let mut class = vec![0usize; n];
    {
        let mut ids: HashMap<&[Letter], usize> = HashMap::new();
        for (c, perm) in class.iter_mut().zip(&raw.perms) {
            let next = ids.len();
            *c = *ids.entry(perm.as_slice()).or_insert(next);
        }
    }
    let mut count = class.iter().copied().max().map_or(0, |m| m + 1);
    loop {
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut next_class = vec![0usize; n];
        for s in 0..n {
            let mut key = Vec::with_capacity(k + 1);
            key.push(class[s]);
            key.extend(raw.trans[s].iter().map(|t| class[t.unwrap()]));
            let fresh = ids.len();
            next_class[s] = *ids.entry(key).or_insert(fresh);
        }
        let new_count = ids.len();
        class = next_class;
        if new_count == count {
            break;
        }
        count = new_count;
    }

    // Renumber classes breadth first from the root's class.
    let mut order = vec![usize::MAX; count];
    let mut members: Vec<usize> = vec![usize::MAX; count];
    for (s, &c) in class.iter().enumerate() {
        if members[c] == usize::MAX || raw.words[s].shortlex_cmp(&raw.words[members[c]]).is_lt() {
            members[c] = s;
        }
    }
    let mut queue = VecDeque::from([class[0]]);
    let mut bfs = Vec::with_capacity(count);
    order[class[0]] = 0;
    bfs.push(class[0]);
    while let Some(c) = queue.pop_front() {
        let s = members[c];
        for x in 0..k {
            let t = class[raw.trans[s][x].unwrap()];
            if order[t] == usize::MAX {
                order[t] = bfs.len();
                bfs.push(t);
                queue.push_back(t);
            }
        }
    }
    let words = bfs.iter().map(|&c| raw.words[members[c]].clone()).collect();
    let perms: Vec<Vec<Letter>> = bfs.iter().map(|&c| raw.perms[members[c]].clone()).collect();
    let trans: Vec<Vec<Option<usize>>> = bfs
        .iter()
        .map(|&c| {
            let s = members[c];
            (0..k)
                .map(|x| Some(order[class[raw.trans[s][x].unwrap()]]))
                .collect()
        })
        .collect();
    let identity = identity_fixpoint(&perms, &trans);
    SectionClosure {
        alphabet_size: k,
        words,
        perms,
        trans,
        identity,
        truncated: false,
    }
}
