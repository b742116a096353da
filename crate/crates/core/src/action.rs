//! The action of group words on finite and eventually periodic words.

use std::collections::HashMap;

use crate::closure::Limits;
use crate::word::{GroupWord, Letter};
use crate::{Error, GroupSpec, Result};

/// `(v(g, x), h(g, x))`, composing the recursion over the symbols of `g` from
/// right to left.
pub fn act_letter(spec: &GroupSpec, g: &GroupWord, x: Letter) -> (Letter, GroupWord) {
    assert!(x < spec.alphabet_size(), "letter {x} outside the alphabet");
    spec.letter_action(g, x)
}

/// `(v(g, u), h(g, u))` for a finite word `u`.
pub fn act_word(spec: &GroupSpec, g: &GroupWord, u: &[Letter]) -> (Vec<Letter>, GroupWord) {
    let mut image = Vec::with_capacity(u.len());
    let mut section = spec.normalize(g);
    for &x in u {
        let (y, h) = act_letter(spec, &section, x);
        image.push(y);
        section = h;
    }
    (image, section)
}

/// An eventually periodic infinite word `prefix · period^∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicWord {
    pub prefix: Vec<Letter>,
    pub period: Vec<Letter>,
}

impl PeriodicWord {
    pub fn new(prefix: Vec<Letter>, period: Vec<Letter>) -> Self {
        PeriodicWord { prefix, period }
    }

    /// Shortest representation: primitive period, and the prefix shortened as
    /// far as the period can absorb it by rotation.
    pub fn canonical(mut self) -> Self {
        let n = self.period.len();
        if n == 0 {
            return self;
        }
        if let Some(p) = (1..=n)
            .find(|&p| n.is_multiple_of(p) && (p..n).all(|i| self.period[i] == self.period[i - p]))
        {
            self.period.truncate(p);
        }
        while let (Some(&last), Some(&tail)) = (self.prefix.last(), self.period.last()) {
            if last != tail {
                break;
            }
            self.prefix.pop();
            self.period.rotate_right(1);
        }
        self
    }

    /// The first `n` letters.
    pub fn take(&self, n: usize) -> Vec<Letter> {
        self.prefix
            .iter()
            .chain(self.period.iter().cycle())
            .take(n)
            .copied()
            .collect()
    }
}

/// Image of `prefix · period^∞` under `g`, as a canonical eventually periodic word.
///
/// Walks the periodic tail one period at a time, tracking the section reached
/// at each period boundary until one repeats.
pub fn act_periodic(
    spec: &GroupSpec,
    g: &GroupWord,
    word: &PeriodicWord,
    limits: &Limits,
) -> Result<PeriodicWord> {
    assert!(!word.period.is_empty(), "period must be nonempty");
    let (mut out, mut section) = act_word(spec, g, &word.prefix);
    let mut seen: HashMap<GroupWord, usize> = HashMap::new();
    loop {
        if let Some(&start) = seen.get(&section) {
            let period = out.split_off(start);
            return Ok(PeriodicWord::new(out, period).canonical());
        }
        if seen.len() >= limits.max_states {
            return Err(Error::ClosureBudgetExceeded {
                max_states: limits.max_states,
            });
        }
        seen.insert(section.clone(), out.len());
        let (image, next) = act_word(spec, &section, &word.period);
        out.extend(image);
        section = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grig() -> GroupSpec {
        GroupSpec::builtin("grigorchuk").unwrap()
    }

    #[test]
    fn b_on_one() {
        let spec = grig();
        let b = spec.parse_word("b").unwrap();
        let (y, h) = act_letter(&spec, &b, 1);
        assert_eq!((y, spec.format_word(&h)), (1, "c".to_owned()));
    }

    #[test]
    fn unit_acts_trivially() {
        let spec = grig();
        for x in 0..2 {
            assert_eq!(
                act_letter(&spec, &GroupWord::identity(), x),
                (x, GroupWord::identity())
            );
        }
    }

    #[test]
    fn inverse_generator_recursion() {
        let spec = grig();
        let a_inv = GroupWord::from_symbols([crate::word::Symbol::new(0, true)]);
        assert_eq!(act_letter(&spec, &a_inv, 0), (1, GroupWord::identity()));

        // Odometer: a is not an involution, so a⁻¹ uses the derived recursion.
        let odo = GroupSpec::builtin("odometer").unwrap();
        let a = odo.parse_word("a").unwrap();
        let a_inv = odo.parse_word("a'").unwrap();
        assert_eq!(act_letter(&odo, &a_inv, 0), (1, a_inv.clone()));
        assert_eq!(act_letter(&odo, &a_inv, 1), (0, GroupWord::identity()));
        for u in [vec![0, 0, 1], vec![1, 1, 0], vec![1, 1, 1]] {
            let (v, _) = act_word(&odo, &a, &u);
            assert_eq!(act_word(&odo, &a_inv, &v).0, u);
        }
    }

    #[test]
    fn act_word_examples() {
        let spec = grig();
        let b = spec.parse_word("b").unwrap();
        let (v, h) = act_word(&spec, &b, &[1, 1]);
        assert_eq!(v, vec![1, 1]);
        assert_eq!(spec.format_word(&h), "d");

        let a = spec.parse_word("a").unwrap();
        let (v, h) = act_word(&spec, &a, &[0, 1]);
        assert_eq!(v, vec![1, 1]);
        assert!(h.is_empty());

        assert_eq!(act_word(&spec, &b, &[]), (vec![], b));
    }

    #[test]
    fn periodic_examples() {
        let spec = grig();
        let limits = Limits::default();
        let a = spec.parse_word("a").unwrap();
        let b = spec.parse_word("b").unwrap();
        let r = act_periodic(&spec, &a, &PeriodicWord::new(vec![], vec![0]), &limits).unwrap();
        assert_eq!(r, PeriodicWord::new(vec![1], vec![0]));
        let r = act_periodic(&spec, &b, &PeriodicWord::new(vec![], vec![1]), &limits).unwrap();
        assert_eq!(r, PeriodicWord::new(vec![], vec![1]));

        let w = PeriodicWord::new(vec![0, 1, 1], vec![0, 1]);
        let r = act_periodic(&spec, &GroupWord::identity(), &w, &limits).unwrap();
        assert_eq!(r, w.clone().canonical());
        assert_eq!(r.take(12), w.take(12));
    }

    #[test]
    fn periodic_agrees_with_truncations() {
        let spec = grig();
        let limits = Limits::default();
        for text in ["abcd", "dacab", "bab"] {
            let g = spec.parse_word(text).unwrap();
            let w = PeriodicWord::new(vec![1, 0], vec![0, 1, 1]);
            let r = act_periodic(&spec, &g, &w, &limits).unwrap();
            assert_eq!(r.take(30), act_word(&spec, &g, &w.take(30)).0);
        }
    }

    #[test]
    fn odometer_carries_through_periodic_ones() {
        let odo = GroupSpec::builtin("odometer").unwrap();
        let a = odo.parse_word("a").unwrap();
        let r = act_periodic(
            &odo,
            &a,
            &PeriodicWord::new(vec![], vec![1]),
            &Limits::default(),
        )
        .unwrap();
        assert_eq!(r, PeriodicWord::new(vec![], vec![0]));
    }

    #[test]
    fn canonical_form() {
        let w = PeriodicWord::new(vec![1, 0, 1], vec![0, 1, 0, 1]).canonical();
        assert_eq!(w, PeriodicWord::new(vec![], vec![1, 0]));
        let w = PeriodicWord::new(vec![0, 0, 1], vec![0, 1]).canonical();
        assert_eq!(w, PeriodicWord::new(vec![0], vec![0, 1]));
    }
}
