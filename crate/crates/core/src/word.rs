//! Group words over generator symbols and finite words over the alphabet.

/// A letter of the alphabet `0..alphabet_size`.
pub type Letter = usize;

/// A generator or its inverse, identified by the generator's index in its [`GroupSpec`].
///
/// [`GroupSpec`]: crate::GroupSpec
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    pub generator: usize,
    pub inverse: bool,
}

impl Symbol {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Symbol { generator, inverse }
    }

    pub fn inverted(self) -> Self {
        Symbol {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    fn cancels(self, other: Symbol) -> bool {
        self.generator == other.generator && self.inverse != other.inverse
    }
}

/// A freely reduced word over generator symbols; the empty word is the unit.
///
/// Group words are read as products acting on the left, so `[s1, s2]` acts as
/// `w ↦ s1(s2(w))`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupWord {
    symbols: Vec<Symbol>,
}

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord::default()
    }

    /// Builds a word, freely reducing adjacent `t t⁻¹` pairs.
    pub fn from_symbols<I: IntoIterator<Item = Symbol>>(symbols: I) -> Self {
        let mut out: Vec<Symbol> = Vec::new();
        for s in symbols {
            match out.last() {
                Some(&top) if top.cancels(s) => {
                    out.pop();
                }
                _ => out.push(s),
            }
        }
        GroupWord { symbols: out }
    }

    pub fn generator(index: usize) -> Self {
        GroupWord {
            symbols: vec![Symbol::new(index, false)],
        }
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Free inverse; callers that know about involutions should renormalize
    /// through [`GroupSpec::normalize`](crate::GroupSpec::normalize).
    pub fn inverse(&self) -> Self {
        GroupWord {
            symbols: self.symbols.iter().rev().map(|s| s.inverted()).collect(),
        }
    }

    pub fn concat(&self, other: &GroupWord) -> Self {
        GroupWord::from_symbols(self.symbols.iter().chain(other.symbols.iter()).copied())
    }

    /// Ordering used to pick representatives: shorter first, then symbol order.
    pub fn shortlex_cmp(&self, other: &GroupWord) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.symbols.cmp(&other.symbols))
    }
}

/// Formats a finite word over the alphabet. Letters are written as digits when
/// the alphabet fits, otherwise comma separated.
pub fn format_letters(alphabet_size: usize, word: &[Letter]) -> String {
    if alphabet_size <= 10 {
        word.iter().map(|l| char::from(b'0' + *l as u8)).collect()
    } else {
        word.iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Parses a finite word over the alphabet: either a string of digits, or a
/// comma separated list for alphabets larger than ten letters.
pub fn parse_letters(alphabet_size: usize, text: &str) -> crate::Result<Vec<Letter>> {
    let text = text.trim();
    let letters: Vec<Letter> = if text.is_empty() {
        Vec::new()
    } else if text.contains(',') {
        text.split(',')
            .map(|t| {
                t.trim().parse::<usize>().map_err(|_| {
                    crate::Error::BadExpression(format!("bad letter {t:?} in {text:?}"))
                })
            })
            .collect::<crate::Result<_>>()?
    } else {
        text.chars()
            .map(|c| {
                c.to_digit(10).map(|d| d as usize).ok_or_else(|| {
                    crate::Error::BadExpression(format!("bad letter {c:?} in {text:?}"))
                })
            })
            .collect::<crate::Result<_>>()?
    };
    if let Some(&bad) = letters.iter().find(|&&l| l >= alphabet_size) {
        return Err(crate::Error::BadLetter {
            letter: bad,
            alphabet_size,
        });
    }
    Ok(letters)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_reduction_cancels_nested_pairs() {
        let a = Symbol::new(0, false);
        let b = Symbol::new(1, false);
        let w = GroupWord::from_symbols([a, b, b.inverted(), a.inverted(), b]);
        assert_eq!(w.symbols(), &[b]);
    }

    #[test]
    fn inverse_reverses_and_flips() {
        let w = GroupWord::from_symbols([Symbol::new(0, false), Symbol::new(1, true)]);
        assert_eq!(
            w.inverse().symbols(),
            &[Symbol::new(1, false), Symbol::new(0, true)]
        );
        assert!(w.concat(&w.inverse()).is_empty());
    }

    #[test]
    fn letters_round_trip() {
        assert_eq!(parse_letters(2, "0110").unwrap(), vec![0, 1, 1, 0]);
        assert_eq!(parse_letters(12, "11,0").unwrap(), vec![11, 0]);
        assert_eq!(format_letters(12, &[11, 0]), "11,0");
        assert!(matches!(
            parse_letters(2, "2"),
            Err(crate::Error::BadLetter { letter: 2, .. })
        ));
    }
}
