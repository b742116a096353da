//! Group definitions by wreath recursion.
//!
//! A generator `t` is given by a permutation of the alphabet and one section
//! word per letter, so that `t(xw) = perm[x] · sections[x](w)`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::sync::OnceLock;

use regex::Regex;
use sha2::{Digest, Sha256};

use crate::word::{GroupWord, Letter, Symbol};
use crate::{Error, Result};

pub const GRIGORCHUK: &str = "\
# Grigorchuk group
alphabet_size = 2
gen a perm = [1,0] sections = [\"\",\"\"]
gen b perm = [0,1] sections = [\"a\",\"c\"]
gen c perm = [0,1] sections = [\"a\",\"d\"]
gen d perm = [0,1] sections = [\"\",\"b\"]
";

pub const DIHEDRAL: &str = "\
# infinite dihedral group Z/2 * Z/2
alphabet_size = 2
gen a perm = [1,0] sections = [\"\",\"\"]
gen b perm = [0,1] sections = [\"a\",\"b\"]
";

pub const ODOMETER: &str = "\
# binary adding machine
alphabet_size = 2
gen a perm = [1,0] sections = [\"\",\"a\"]
";

/// Names accepted by [`GroupSpec::builtin`].
pub const BUILTIN_NAMES: [&str; 3] = ["grigorchuk", "dihedral", "odometer"];

/// State budget for the load-time detection of involutive and trivial generators.
const DETECTION_BUDGET: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub perm: Vec<Letter>,
    pub sections: Vec<GroupWord>,
    inv_perm: Vec<Letter>,
}

/// A validated self-similar action given by wreath recursion.
#[derive(Debug, Clone)]
pub struct GroupSpec {
    alphabet_size: usize,
    generators: Vec<Generator>,
    by_name: HashMap<String, usize>,
    /// Generators proven to satisfy `t² = e`; their inverse symbols are rewritten to `t`.
    involution: Vec<bool>,
    /// Generators proven to act trivially; erased by normalization.
    trivial: Vec<bool>,
}

/// Raw generator row: name, permutation, section words as text.
pub type GeneratorRow = (String, Vec<Letter>, Vec<String>);

impl GroupSpec {
    /// Validates a wreath recursion table. Section words are parsed against the
    /// declared generator names.
    pub fn new(alphabet_size: usize, rows: Vec<GeneratorRow>) -> Result<Self> {
        if alphabet_size < 2 {
            return Err(Error::MalformedSpec(format!(
                "alphabet_size must be at least 2, got {alphabet_size}"
            )));
        }
        let mut by_name = HashMap::new();
        for (i, (name, _, _)) in rows.iter().enumerate() {
            if !is_token(name) {
                return Err(Error::MalformedSpec(format!(
                    "invalid generator token {name:?}"
                )));
            }
            if by_name.insert(name.clone(), i).is_some() {
                return Err(Error::MalformedSpec(format!(
                    "generator {name:?} declared twice"
                )));
            }
        }
        let mut spec = GroupSpec {
            alphabet_size,
            generators: Vec::with_capacity(rows.len()),
            by_name,
            involution: vec![false; rows.len()],
            trivial: vec![false; rows.len()],
        };
        let mut generators = Vec::with_capacity(rows.len());
        for (name, perm, sections) in rows {
            if perm.len() != alphabet_size || sections.len() != alphabet_size {
                return Err(Error::MalformedSpec(format!(
                    "generator {name:?} needs {alphabet_size} permutation entries and sections"
                )));
            }
            let mut inv_perm = vec![usize::MAX; alphabet_size];
            for (x, &y) in perm.iter().enumerate() {
                if y >= alphabet_size || inv_perm[y] != usize::MAX {
                    return Err(Error::MalformedSpec(format!(
                        "permutation of {name:?} is not a bijection: {perm:?}"
                    )));
                }
                inv_perm[y] = x;
            }
            let sections = sections
                .iter()
                .map(|s| {
                    spec.parse_word(s)
                        .map_err(|e| Error::MalformedSpec(format!("section of {name:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            generators.push(Generator {
                name,
                perm,
                sections,
                inv_perm,
            });
        }
        spec.generators = generators;
        spec.detect_relations();
        Ok(spec)
    }

    /// Resolves a built-in group by name.
    pub fn builtin(name: &str) -> Option<Self> {
        let text = match name {
            "grigorchuk" => GRIGORCHUK,
            "dihedral" => DIHEDRAL,
            "odometer" => ODOMETER,
            _ => return None,
        };
        Some(Self::parse(text).expect("built-in definitions are well formed"))
    }

    /// Parses a group-definition document.
    ///
    /// ```text
    /// alphabet_size = 2
    /// gen b perm = [0,1] sections = ["a","c"]
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        static SIZE: OnceLock<Regex> = OnceLock::new();
        static GEN: OnceLock<Regex> = OnceLock::new();
        let size_re = SIZE.get_or_init(|| Regex::new(r"^alphabet_size\s*=\s*(\d+)$").unwrap());
        let gen_re = GEN.get_or_init(|| {
            Regex::new(r#"^gen\s+(\S+)\s+perm\s*=\s*\[([^\]]*)\]\s+sections\s*=\s*\[([^\]]*)\]$"#)
                .unwrap()
        });

        let mut alphabet_size = None;
        let mut rows = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| Error::MalformedSpec(format!("line {}: {what}", lineno + 1));
            if let Some(c) = size_re.captures(line) {
                if alphabet_size.is_some() {
                    return Err(bad("alphabet_size given twice"));
                }
                alphabet_size = Some(c[1].parse::<usize>().map_err(|_| bad("bad size"))?);
            } else if let Some(c) = gen_re.captures(line) {
                let perm = split_list(&c[2])
                    .into_iter()
                    .map(|t| t.parse::<usize>().map_err(|_| bad("bad permutation entry")))
                    .collect::<Result<Vec<_>>>()?;
                let sections = split_list(&c[3])
                    .into_iter()
                    .map(|t| {
                        t.strip_prefix('"')
                            .and_then(|t| t.strip_suffix('"'))
                            .map(str::to_owned)
                            .ok_or_else(|| bad("section words must be quoted"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if sections.iter().any(|s| s.chars().any(char::is_whitespace)) {
                    return Err(bad("section words must be space free"));
                }
                rows.push((c[1].to_owned(), perm, sections));
            } else {
                return Err(bad(&format!("unrecognized line {line:?}")));
            }
        }
        let alphabet_size =
            alphabet_size.ok_or_else(|| Error::MalformedSpec("missing alphabet_size".into()))?;
        Self::new(alphabet_size, rows)
    }

    /// Serializes back to the document format.
    pub fn to_document(&self) -> String {
        let mut out = format!("alphabet_size = {}\n", self.alphabet_size);
        for g in &self.generators {
            let perm: Vec<String> = g.perm.iter().map(|p| p.to_string()).collect();
            let sections: Vec<String> = g
                .sections
                .iter()
                .map(|s| {
                    if s.is_empty() {
                        "\"\"".to_owned()
                    } else {
                        format!("\"{}\"", self.format_word(s))
                    }
                })
                .collect();
            let _ = writeln!(
                out,
                "gen {} perm = [{}] sections = [{}]",
                g.name,
                perm.join(","),
                sections.join(",")
            );
        }
        out
    }

    /// Hex SHA-256 of the normalized document.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_document().as_bytes()))
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn is_involution(&self, generator: usize) -> bool {
        self.involution[generator]
    }

    /// The generators as one-letter words, in declaration order.
    pub fn generator_words(&self) -> Vec<GroupWord> {
        (0..self.generators.len())
            .map(GroupWord::generator)
            .collect()
    }

    /// Generators together with their inverses (after normalization, so
    /// involutions appear once).
    pub fn generators_and_inverses(&self) -> Vec<GroupWord> {
        let mut out = Vec::new();
        for g in self.generator_words() {
            let inv = self.inverse(&g);
            out.push(self.normalize(&g));
            if !out.contains(&inv) {
                out.push(inv);
            }
        }
        out
    }

    /// Reduces a symbol sequence: free cancellation, erasure of trivial
    /// generators and `t⁻¹ → t`, `t t → e` for involutions.
    pub fn normalize_symbols<I: IntoIterator<Item = Symbol>>(&self, symbols: I) -> GroupWord {
        reduce_with(symbols, &self.involution, &self.trivial)
    }

    pub fn normalize(&self, word: &GroupWord) -> GroupWord {
        self.normalize_symbols(word.symbols().iter().copied())
    }

    pub fn multiply(&self, left: &GroupWord, right: &GroupWord) -> GroupWord {
        self.normalize_symbols(left.symbols().iter().chain(right.symbols()).copied())
    }

    pub fn inverse(&self, word: &GroupWord) -> GroupWord {
        self.normalize(&word.inverse())
    }

    /// `(v(t, x), h(t, x))` for a single symbol; inverse symbols use
    /// `v = perm⁻¹(x)` and `h = sections[perm⁻¹(x)]⁻¹`.
    pub(crate) fn symbol_action(&self, symbol: Symbol, x: Letter) -> (Letter, SectionRef<'_>) {
        let g = &self.generators[symbol.generator];
        if symbol.inverse {
            let y = g.inv_perm[x];
            (y, SectionRef::Inverse(&g.sections[y]))
        } else {
            (g.perm[x], SectionRef::Forward(&g.sections[x]))
        }
    }

    /// Parses a group word. Tokens are matched greedily against declared
    /// generator names; `'` marks an inverse; whitespace and `.` separate
    /// tokens; `e` (when not a generator) and the empty string denote the unit.
    pub fn parse_word(&self, text: &str) -> Result<GroupWord> {
        let bad = |reason: String| Error::BadWord {
            word: text.to_owned(),
            reason,
        };
        let chars: Vec<char> = text.chars().collect();
        let mut symbols = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() || c == '.' || c == '·' {
                i += 1;
                continue;
            }
            if !c.is_ascii_alphabetic() {
                return Err(bad(format!("unexpected character {c:?}")));
            }
            let mut end = i + 1;
            while end < chars.len() && (chars[end].is_ascii_alphanumeric() || chars[end] == '_') {
                end += 1;
            }
            // Longest declared token starting at i.
            let mut matched = None;
            for stop in (i + 1..=end).rev() {
                let candidate: String = chars[i..stop].iter().collect();
                if let Some(&idx) = self.by_name.get(&candidate) {
                    matched = Some((idx, stop));
                    break;
                }
            }
            let (generator, stop) = match matched {
                Some(m) => m,
                None if c == 'e' => {
                    i += 1;
                    if chars.get(i) == Some(&'\'') {
                        i += 1;
                    }
                    continue;
                }
                None => {
                    let token: String = chars[i..end].iter().collect();
                    return Err(bad(format!("unknown generator in {token:?}")));
                }
            };
            i = stop;
            let mut inverse = false;
            while chars.get(i) == Some(&'\'') {
                inverse = !inverse;
                i += 1;
            }
            symbols.push(Symbol::new(generator, inverse));
        }
        Ok(GroupWord::from_symbols(symbols))
    }

    /// Formats a word with generator names; `'` marks inverses, `e` is the unit.
    pub fn format_word(&self, word: &GroupWord) -> String {
        if word.is_empty() {
            return "e".to_owned();
        }
        let single = self.generators.iter().all(|g| g.name.len() == 1);
        let parts: Vec<String> = word
            .symbols()
            .iter()
            .map(|s| {
                let name = &self.generators[s.generator].name;
                if s.inverse {
                    format!("{name}'")
                } else {
                    name.clone()
                }
            })
            .collect();
        parts.join(if single { "" } else { "." })
    }

    fn detect_relations(&mut self) {
        let none = vec![false; self.generators.len()];
        let trivial: Vec<bool> = (0..self.generators.len())
            .map(|i| self.acts_trivially_free(&GroupWord::generator(i), &none))
            .collect();
        let involution: Vec<bool> = (0..self.generators.len())
            .map(|i| {
                trivial[i] || {
                    let g = GroupWord::generator(i);
                    self.acts_trivially_free(&g.concat(&g), &none)
                }
            })
            .collect();
        self.trivial = trivial;
        self.involution = involution;
    }

    /// Bounded triviality test using free reduction only.
    fn acts_trivially_free(&self, word: &GroupWord, mask: &[bool]) -> bool {
        let mut seen: HashSet<GroupWord> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(word.clone());
        queue.push_back(word.clone());
        while let Some(w) = queue.pop_front() {
            for x in 0..self.alphabet_size {
                let (y, section) = self.raw_letter_action(&w, x, mask, mask);
                if y != x {
                    return false;
                }
                if seen.insert(section.clone()) {
                    if seen.len() > DETECTION_BUDGET {
                        return false;
                    }
                    queue.push_back(section);
                }
            }
        }
        true
    }

    pub(crate) fn raw_letter_action(
        &self,
        word: &GroupWord,
        x: Letter,
        involution: &[bool],
        trivial: &[bool],
    ) -> (Letter, GroupWord) {
        let mut letter = x;
        let mut pieces: Vec<SectionRef<'_>> = Vec::with_capacity(word.len());
        for &s in word.symbols().iter().rev() {
            let (y, h) = self.symbol_action(s, letter);
            pieces.push(h);
            letter = y;
        }
        let symbols = pieces.iter().rev().flat_map(|p| p.symbols());
        (letter, reduce_with(symbols, involution, trivial))
    }

    pub(crate) fn letter_action(&self, word: &GroupWord, x: Letter) -> (Letter, GroupWord) {
        self.raw_letter_action(word, x, &self.involution, &self.trivial)
    }
}

/// A generator section, possibly to be read inverted.
#[derive(Clone, Copy)]
pub(crate) enum SectionRef<'a> {
    Forward(&'a GroupWord),
    Inverse(&'a GroupWord),
}

impl<'a> SectionRef<'a> {
    fn symbols(&self) -> Box<dyn Iterator<Item = Symbol> + 'a> {
        match *self {
            SectionRef::Forward(w) => Box::new(w.symbols().iter().copied()),
            SectionRef::Inverse(w) => Box::new(w.symbols().iter().rev().map(|s| s.inverted())),
        }
    }
}

fn reduce_with<I: IntoIterator<Item = Symbol>>(
    symbols: I,
    involution: &[bool],
    trivial: &[bool],
) -> GroupWord {
    let mut out: Vec<Symbol> = Vec::new();
    for mut s in symbols {
        if trivial.get(s.generator).copied().unwrap_or(false) {
            continue;
        }
        let invol = involution.get(s.generator).copied().unwrap_or(false);
        if invol {
            s.inverse = false;
        }
        match out.last() {
            Some(top) if top.generator == s.generator && (invol || top.inverse != s.inverse) => {
                out.pop();
            }
            _ => out.push(s),
        }
    }
    // Already reduced; from_symbols keeps the invariant explicit.
    GroupWord::from_symbols(out)
}

fn is_token(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn split_list(body: &str) -> Vec<&str> {
    if body.trim().is_empty() {
        return Vec::new();
    }
    body.split(',').map(str::trim).collect()
}
