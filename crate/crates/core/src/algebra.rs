//! The dense *-algebra spanned by `S_{u1} g S_{u2}*`, with the KMS functional
//! `ψ(S_{u1} g S_{u2}*) = δ_{u1,u2} |X|^{-|u1|} μ(fix(g))`.
//!
//! Products are brought to normal form with `S_x* S_y = δ_{x,y}` and
//! `g S_x = S_{v(g,x)} h(g,x)`. Group parts are keyed by their minimized
//! section automaton, so like terms merge exactly whenever closures are finite.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::linalg::{ldlt_psd, Matrix, PsdOutcome};
use crate::measure::{cylinder, scaled};
use crate::word::{format_letters, parse_letters};
use crate::{
    act_word, count_nontrivial_sections, element_key, fixed_measure, is_identity, ElementKey,
    Error, GroupSpec, GroupWord, Letter, Limits, MeasureReport, Rational, Result, Verdict,
};

/// `S_{u1} g S_{u2}*`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub u1: Vec<Letter>,
    pub g: GroupWord,
    pub u2: Vec<Letter>,
}

impl Monomial {
    pub fn new(u1: Vec<Letter>, g: GroupWord, u2: Vec<Letter>) -> Self {
        Monomial { u1, g, u2 }
    }

    pub fn unit() -> Self {
        Monomial::new(Vec::new(), GroupWord::identity(), Vec::new())
    }

    pub fn group(g: GroupWord) -> Self {
        Monomial::new(Vec::new(), g, Vec::new())
    }

    /// Gauge degree `|u1| − |u2|`.
    pub fn degree(&self) -> i64 {
        self.u1.len() as i64 - self.u2.len() as i64
    }
}

/// A monomial with its coefficient.
#[derive(Debug, Clone)]
pub struct Term {
    pub coeff: Rational,
    pub monomial: Monomial,
}

type TermKey = (Vec<Letter>, ElementKey, Vec<Letter>);

/// A finite rational combination of monomials in normal form; zero is the
/// empty combination.
///
/// Equality compares keys and coefficients, not the representative words.
#[derive(Debug, Clone, Default)]
pub struct AlgebraElement {
    terms: BTreeMap<TermKey, Term>,
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.terms.len() == other.terms.len()
            && self
                .terms
                .iter()
                .zip(other.terms.iter())
                .all(|((k1, t1), (k2, t2))| k1 == k2 && t1.coeff == t2.coeff)
    }
}

impl Eq for AlgebraElement {}

impl AlgebraElement {
    pub fn zero() -> Self {
        AlgebraElement::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.terms.values()
    }

    /// False when some group part could only be keyed by its word, so that
    /// equal terms may have been left unmerged.
    pub fn is_canonical(&self) -> bool {
        self.terms.keys().all(|(_, k, _)| k.is_canonical())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return AlgebraElement::zero();
        }
        let mut out = self.clone();
        for t in out.terms.values_mut() {
            t.coeff *= c;
        }
        out
    }

    pub fn add(&self, other: &AlgebraElement) -> Self {
        let mut out = self.clone();
        for (key, t) in &other.terms {
            out.insert(key.clone(), t.monomial.clone(), t.coeff.clone());
        }
        out
    }

    pub fn sub(&self, other: &AlgebraElement) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    fn insert(&mut self, key: TermKey, monomial: Monomial, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(t) => {
                t.coeff += coeff;
                if t.coeff.is_zero() {
                    self.terms.remove(&key);
                } else if monomial.g.shortlex_cmp(&t.monomial.g).is_lt() {
                    t.monomial = monomial;
                }
            }
            None => {
                self.terms.insert(key, Term { coeff, monomial });
            }
        }
    }
}

/// The algebra of a fixed group, with caches for element keys and measures.
#[derive(Debug)]
pub struct StarAlgebra {
    spec: GroupSpec,
    limits: Limits,
    keys: Mutex<HashMap<GroupWord, ElementKey>>,
    representatives: Mutex<HashMap<ElementKey, GroupWord>>,
    measures: Mutex<HashMap<ElementKey, MeasureReport>>,
}

impl StarAlgebra {
    pub fn new(spec: GroupSpec, limits: Limits) -> Self {
        let alg = StarAlgebra {
            spec,
            limits,
            keys: Mutex::new(HashMap::new()),
            representatives: Mutex::new(HashMap::new()),
            measures: Mutex::new(HashMap::new()),
        };
        // Seed representatives so that products print with generator names.
        alg.canonicalize(&GroupWord::identity());
        for g in alg.spec.generators_and_inverses() {
            alg.canonicalize(&g);
        }
        alg
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    /// Key of `g` and the shortest word known to represent the same element.
    fn canonicalize(&self, g: &GroupWord) -> (ElementKey, GroupWord) {
        let g = self.spec.normalize(g);
        let cached = self.keys.lock().unwrap().get(&g).cloned();
        let key = match cached {
            Some(k) => k,
            None => {
                let k = element_key(&self.spec, &g, &self.limits);
                self.keys.lock().unwrap().insert(g.clone(), k.clone());
                k
            }
        };
        if !key.is_canonical() {
            return (key, g);
        }
        let mut reps = self.representatives.lock().unwrap();
        let rep = reps.entry(key.clone()).or_insert_with(|| g.clone());
        if g.shortlex_cmp(rep).is_lt() {
            *rep = g;
        }
        let rep = rep.clone();
        (key, rep)
    }

    fn push(&self, out: &mut AlgebraElement, m: Monomial, coeff: Rational) {
        let (key, rep) = self.canonicalize(&m.g);
        let m = Monomial::new(m.u1, rep, m.u2);
        out.insert((m.u1.clone(), key, m.u2.clone()), m, coeff);
    }

    fn check_letters(&self, u: &[Letter]) -> Result<()> {
        let k = self.spec.alphabet_size();
        match u.iter().find(|&&x| x >= k) {
            Some(&letter) => Err(Error::BadLetter {
                letter,
                alphabet_size: k,
            }),
            None => Ok(()),
        }
    }

    /// Builds `Σ c·m`, merging like terms.
    pub fn element<I>(&self, terms: I) -> Result<AlgebraElement>
    where
        I: IntoIterator<Item = (Rational, Monomial)>,
    {
        let mut out = AlgebraElement::zero();
        for (c, m) in terms {
            self.check_letters(&m.u1)?;
            self.check_letters(&m.u2)?;
            self.push(&mut out, m, c);
        }
        Ok(out)
    }

    pub fn monomial(&self, m: &Monomial) -> Result<AlgebraElement> {
        self.element([(Rational::one(), m.clone())])
    }

    pub fn unit(&self) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        self.push(&mut out, Monomial::unit(), Rational::one());
        out
    }

    pub fn group_element(&self, g: &GroupWord) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        self.push(&mut out, Monomial::group(g.clone()), Rational::one());
        out
    }

    /// Product of two monomials, or `None` when `S_{u2}* S_{u3}` vanishes.
    pub fn monomial_product(&self, a: &Monomial, b: &Monomial) -> Option<Monomial> {
        let spec = &self.spec;
        if let Some(w) = b.u1.strip_prefix(a.u2.as_slice()) {
            // g S_w = S_{v(g,w)} h(g,w)
            let (v, s) = act_word(spec, &a.g, w);
            let mut u1 = a.u1.clone();
            u1.extend(v);
            Some(Monomial::new(u1, spec.multiply(&s, &b.g), b.u2.clone()))
        } else if let Some(w) = a.u2.strip_prefix(b.u1.as_slice()) {
            // S_w* h = h(h⁻¹,w)⁻¹ S_{v(h⁻¹,w)}*
            let (v, s) = act_word(spec, &spec.inverse(&b.g), w);
            let mut u2 = b.u2.clone();
            u2.extend(v);
            Some(Monomial::new(
                a.u1.clone(),
                spec.multiply(&a.g, &spec.inverse(&s)),
                u2,
            ))
        } else {
            None
        }
    }

    pub fn multiply(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        // Right factors indexed by their left word: the partners of a left
        // factor ending in S_{u2}* are the prefixes of u2 and its extensions.
        let mut by_left: BTreeMap<&[Letter], Vec<&Term>> = BTreeMap::new();
        for t in b.terms.values() {
            by_left.entry(t.monomial.u1.as_slice()).or_default().push(t);
        }
        let mut out = AlgebraElement::zero();
        for ta in a.terms.values() {
            let u2 = ta.monomial.u2.as_slice();
            let prefixes = (0..u2.len()).filter_map(|l| by_left.get(&u2[..l]));
            let extensions = by_left
                .range(u2..)
                .take_while(|(k, _)| k.starts_with(u2))
                .map(|(_, v)| v);
            for tb in prefixes.chain(extensions).flatten() {
                if let Some(m) = self.monomial_product(&ta.monomial, &tb.monomial) {
                    self.push(&mut out, m, &ta.coeff * &tb.coeff);
                }
            }
        }
        out
    }

    /// `(S_{u1} g S_{u2}*)* = S_{u2} g⁻¹ S_{u1}*`, extended linearly.
    pub fn adjoint(&self, a: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for t in a.terms.values() {
            let m = &t.monomial;
            let adj = Monomial::new(m.u2.clone(), self.spec.inverse(&m.g), m.u1.clone());
            self.push(&mut out, adj, t.coeff.clone());
        }
        out
    }

    /// Rewrites `g` as `Σ_{w ∈ X^n} S_{v(g,w)} h(g,w) S_w*` in every term.
    pub fn cuntz_expand(&self, a: &AlgebraElement, n: usize) -> AlgebraElement {
        let k = self.spec.alphabet_size();
        let mut out = AlgebraElement::zero();
        for t in a.terms.values() {
            let m = &t.monomial;
            for w in all_words(k, n) {
                let (v, s) = act_word(&self.spec, &m.g, &w);
                let mut u1 = m.u1.clone();
                u1.extend(v);
                let mut u2 = m.u2.clone();
                u2.extend(w);
                self.push(&mut out, Monomial::new(u1, s, u2), t.coeff.clone());
            }
        }
        out
    }

    /// `μ(fix(g))`, exact or bounded.
    pub fn fixed_measure(&self, g: &GroupWord) -> Result<MeasureReport> {
        let (key, rep) = self.canonicalize(g);
        self.measure_of(&key, &rep)
    }

    fn measure_of(&self, key: &ElementKey, word: &GroupWord) -> Result<MeasureReport> {
        if let Some(r) = self.measures.lock().unwrap().get(key) {
            return Ok(r.clone());
        }
        let r = fixed_measure(&self.spec, word, &self.limits)?;
        self.measures.lock().unwrap().insert(key.clone(), r.clone());
        Ok(r)
    }

    /// `ψ(a)`; `InexactMeasure` carries the enclosing interval when some
    /// needed fixed-point measure is only bounded.
    pub fn psi(&self, a: &AlgebraElement) -> Result<Rational> {
        let k = self.spec.alphabet_size();
        let mut lower = Rational::zero();
        let mut upper = Rational::zero();
        let mut exact = true;
        for ((u1, key, u2), t) in &a.terms {
            if u1 != u2 {
                continue;
            }
            let r = self.measure_of(key, &t.monomial.g)?;
            exact &= r.exact.is_some() || r.lower == r.upper;
            let c = &t.coeff * cylinder(k, u1.len());
            let (lo, hi) = if c.is_negative() {
                (&c * &r.upper, &c * &r.lower)
            } else {
                (&c * &r.lower, &c * &r.upper)
            };
            lower += lo;
            upper += hi;
        }
        if exact {
            Ok(lower)
        } else {
            Err(Error::InexactMeasure {
                lower: Box::new(lower),
                upper: Box::new(upper),
            })
        }
    }

    /// `ψ(ab) = |X|^{-d(a)} ψ(ba)`, the KMS condition at `β = log|X|`.
    pub fn kms_check(&self, a: &Monomial, b: &Monomial) -> Result<bool> {
        let ea = self.monomial(a)?;
        let eb = self.monomial(b)?;
        let lhs = self.psi(&self.multiply(&ea, &eb))?;
        let rhs = self.psi(&self.multiply(&eb, &ea))?;
        let k = BigInt::from(self.spec.alphabet_size());
        let d = a.degree();
        let factor = if d >= 0 {
            Rational::new(BigInt::one(), k.pow(d as u32))
        } else {
            Rational::from_integer(k.pow((-d) as u32))
        };
        Ok(lhs == rhs * factor)
    }

    /// `ψ(ab) = ψ(ba)` for two monomials of gauge degree 0.
    pub fn trace_check(&self, a: &Monomial, b: &Monomial) -> Result<bool> {
        for m in [a, b] {
            if m.degree() != 0 {
                return Err(Error::DegreeNonZero(m.degree()));
            }
        }
        let ea = self.monomial(a)?;
        let eb = self.monomial(b)?;
        Ok(self.psi(&self.multiply(&ea, &eb))? == self.psi(&self.multiply(&eb, &ea))?)
    }

    /// The matrix `M_ij = μ(fix(g_i⁻¹ g_j))`.
    pub fn gram_matrix(&self, family: &[GroupWord]) -> Result<Matrix> {
        let mut m = Vec::with_capacity(family.len());
        for gi in family {
            let inv = self.spec.inverse(gi);
            let mut row = Vec::with_capacity(family.len());
            for gj in family {
                let r = self.fixed_measure(&self.spec.multiply(&inv, gj))?;
                match r.exact {
                    Some(v) => row.push(v),
                    None if r.lower == r.upper => row.push(r.lower),
                    None => {
                        return Err(Error::InexactMeasure {
                            lower: Box::new(r.lower),
                            upper: Box::new(r.upper),
                        })
                    }
                }
            }
            m.push(row);
        }
        Ok(m)
    }

    /// Decides whether `g ↦ μ(fix(g))` is positive semidefinite on `family`.
    pub fn gram_psd(&self, family: &[GroupWord]) -> Result<PsdOutcome> {
        Ok(ldlt_psd(&self.gram_matrix(family)?))
    }

    /// `a_n = Σ_{u ∈ X^n, h(g,u) = e} S_{v(g,u)} S_u*`.
    pub fn a_n(&self, g: &GroupWord, n: usize) -> Result<AlgebraElement> {
        self.limits.check_depth(n)?;
        let mut out = AlgebraElement::zero();
        for u in all_words(self.spec.alphabet_size(), n) {
            let (v, s) = act_word(&self.spec, g, &u);
            if is_identity(&self.spec, &s, &self.limits) == Verdict::Yes {
                self.push(
                    &mut out,
                    Monomial::new(v, GroupWord::identity(), u),
                    Rational::one(),
                );
            }
        }
        Ok(out)
    }

    /// `ψ((g − a_n)*(g − a_n))`, checked against the count
    /// `|X|^{-n} |{u ∈ X^n : h(g,u) ≠ e}|`.
    pub fn an_distance(&self, g: &GroupWord, n: usize) -> Result<Rational> {
        let x = self.group_element(g).sub(&self.a_n(g, n)?);
        let value = self.psi(&self.multiply(&self.adjoint(&x), &x))?;
        let count = count_nontrivial_sections(&self.spec, g, n, &self.limits)?;
        let closed = scaled(&count.count, self.spec.alphabet_size(), n);
        if value != closed {
            return Err(Error::Inconsistent(format!(
                "a_n distance {value} differs from the section count {closed}"
            )));
        }
        Ok(value)
    }

    // -----------------------------------------------------------------------
    // Text form

    pub fn format_monomial(&self, m: &Monomial) -> String {
        let k = self.spec.alphabet_size();
        let mut parts = Vec::new();
        if !m.u1.is_empty() {
            parts.push(format!("S[{}]", format_letters(k, &m.u1)));
        }
        if !m.g.is_empty() {
            parts.push(self.spec.format_word(&m.g));
        }
        if !m.u2.is_empty() {
            parts.push(format!("S[{}]*", format_letters(k, &m.u2)));
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" ")
        }
    }

    /// Terms ordered by their letters and then by representative word.
    pub fn format(&self, a: &AlgebraElement) -> String {
        if a.is_zero() {
            return "0".to_string();
        }
        let mut terms: Vec<&Term> = a.terms().collect();
        terms.sort_by(|x, y| {
            let (mx, my) = (&x.monomial, &y.monomial);
            (mx.u1.len(), &mx.u1, mx.u2.len(), &mx.u2)
                .cmp(&(my.u1.len(), &my.u1, my.u2.len(), &my.u2))
                .then_with(|| mx.g.shortlex_cmp(&my.g))
        });
        let mut out = String::new();
        for (i, t) in terms.iter().enumerate() {
            let negative = t.coeff.is_negative();
            match (i, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let c = t.coeff.abs();
            let body = self.format_monomial(&t.monomial);
            if c.is_one() {
                out.push_str(&body);
            } else if body == "1" {
                out.push_str(&c.to_string());
            } else {
                out.push_str(&format!("{c} {body}"));
            }
        }
        out
    }

    /// Parses `term (('+'|'-') term)*` where a term is an optional rational
    /// coefficient (optionally followed by `*`) and a product of factors
    /// `S[u]`, `S[u]*`, group words and `1`.
    pub fn parse(&self, text: &str) -> Result<AlgebraElement> {
        Parser {
            alg: self,
            text,
            chars: text.chars().collect(),
            pos: 0,
        }
        .element()
    }

    /// Parses an expression that must reduce to a single monomial with coefficient 1.
    pub fn parse_monomial(&self, text: &str) -> Result<Monomial> {
        let e = self.parse(text)?;
        let mut terms = e.terms();
        match (terms.next(), terms.next()) {
            (Some(t), None) if t.coeff.is_one() => Ok(t.monomial.clone()),
            _ => Err(Error::BadExpression(format!(
                "{text:?} is not a single monomial"
            ))),
        }
    }
}

/// All words of length `n`, in lexicographic order.
fn all_words(k: usize, n: usize) -> impl Iterator<Item = Vec<Letter>> {
    let mut next = Some(vec![0; n]);
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut w = current.clone();
        let mut i = n;
        while i > 0 {
            i -= 1;
            w[i] += 1;
            if w[i] < k {
                next = Some(w);
                break;
            }
            w[i] = 0;
        }
        Some(current)
    })
}

struct Parser<'a> {
    alg: &'a StarAlgebra,
    text: &'a str,
    chars: Vec<char>,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> Error {
        Error::BadExpression(format!("{what} at offset {} in {:?}", self.pos, self.text))
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn element(&mut self) -> Result<AlgebraElement> {
        self.skip_ws();
        let mut negative = false;
        match self.peek() {
            Some('-') => {
                negative = true;
                self.pos += 1;
            }
            Some('+') => self.pos += 1,
            _ => {}
        }
        let mut out = AlgebraElement::zero();
        loop {
            let t = self.term()?;
            out = if negative { out.sub(&t) } else { out.add(&t) };
            self.skip_ws();
            match self.peek() {
                None => return Ok(out),
                Some('+') => negative = false,
                Some('-') => negative = true,
                Some(_) => return Err(self.error("expected '+' or '-'")),
            }
            self.pos += 1;
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits
            .parse()
            .map_err(|_| self.error("expected an integer"))
    }

    fn coefficient(&mut self) -> Result<Option<Rational>> {
        if !self.peek().is_some_and(|c| c.is_ascii_digit()) {
            return Ok(None);
        }
        let num = self.integer()?;
        let den = if self.peek() == Some('/') {
            self.pos += 1;
            let d = self.integer()?;
            if d.is_zero() {
                return Err(self.error("zero denominator"));
            }
            d
        } else {
            BigInt::one()
        };
        self.skip_ws();
        if self.peek() == Some('*') {
            self.pos += 1;
        }
        Ok(Some(Rational::new(num, den)))
    }

    fn term(&mut self) -> Result<AlgebraElement> {
        self.skip_ws();
        let coeff = self.coefficient()?;
        let mut value = self.alg.unit();
        let mut factors = 0;
        loop {
            self.skip_ws();
            let factor = match self.peek() {
                None | Some('+') | Some('-') => break,
                Some('S') if self.peek_at(1) == Some('[') => self.cuntz_factor()?,
                Some('1')
                    if !self
                        .peek_at(1)
                        .is_some_and(|c| c.is_ascii_digit() || c == '/') =>
                {
                    self.pos += 1;
                    self.alg.unit()
                }
                Some(_) => self.word_factor()?,
            };
            value = self.alg.multiply(&value, &factor);
            factors += 1;
        }
        match coeff {
            Some(c) => Ok(value.scale(&c)),
            None if factors > 0 => Ok(value),
            None => Err(self.error("empty term")),
        }
    }

    fn cuntz_factor(&mut self) -> Result<AlgebraElement> {
        self.pos += 2;
        let start = self.pos;
        while self.peek().is_some_and(|c| c != ']') {
            self.pos += 1;
        }
        if self.peek() != Some(']') {
            return Err(self.error("unclosed 'S['"));
        }
        let inner: String = self.chars[start..self.pos].iter().collect();
        self.pos += 1;
        let u = parse_letters(self.alg.spec.alphabet_size(), &inner)?;
        let m = if self.peek() == Some('*') {
            self.pos += 1;
            Monomial::new(Vec::new(), GroupWord::identity(), u)
        } else {
            Monomial::new(u, GroupWord::identity(), Vec::new())
        };
        self.alg.monomial(&m)
    }

    fn word_factor(&mut self) -> Result<AlgebraElement> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace()
                || "+-*[]".contains(c)
                || (c == 'S' && self.peek_at(1) == Some('['))
            {
                break;
            }
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("unexpected character"));
        }
        let token: String = self.chars[start..self.pos].iter().collect();
        let g = self.alg.spec.parse_word(&token)?;
        Ok(self.alg.group_element(&g))
    }
}
