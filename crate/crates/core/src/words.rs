//! Letters and words over the three-letter alphabet `{a, b, c}`.
//!
//! A [`Word`] is packed two bits per letter into a `u64`, first letter in the
//! most significant position. With that layout the derived ordering on
//! `(len, bits)` is exactly "shorter first, then lexicographic", which is the
//! order used everywhere terms are listed.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Longest word that fits the packed representation.
pub const MAX_WORD_LEN: usize = 32;

/// One of the three generators. The derived order is the alphabetical
/// `A < B < C`; the Hall order lives in [`crate::hall`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    A = 0,
    B = 1,
    C = 2,
}

impl Letter {
    pub const ALL: [Letter; 3] = [Letter::A, Letter::B, Letter::C];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    fn from_bits(bits: u64) -> Letter {
        match bits & 3 {
            0 => Letter::A,
            1 => Letter::B,
            2 => Letter::C,
            _ => unreachable!("invalid packed letter"),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
            Letter::C => 'c',
        }
    }

    pub fn from_char(ch: char) -> Option<Letter> {
        match ch {
            'a' => Some(Letter::A),
            'b' => Some(Letter::B),
            'c' => Some(Letter::C),
            _ => None,
        }
    }

    /// The substitution `a <-> c`, `b` fixed.
    #[inline]
    pub fn flipped(self) -> Letter {
        match self {
            Letter::A => Letter::C,
            Letter::B => Letter::B,
            Letter::C => Letter::A,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A finite word, possibly empty.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word {
    // field order matters for the derived Ord
    len: u8,
    bits: u64,
}

impl Word {
    pub const EMPTY: Word = Word { len: 0, bits: 0 };

    #[inline]
    pub fn empty() -> Word {
        Word::EMPTY
    }

    #[inline]
    pub fn letter(l: Letter) -> Word {
        Word { len: 1, bits: l as u64 }
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
        letters.into_iter().fold(Word::EMPTY, |w, l| w.push(l))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Letter at position `i` (0-based from the left).
    #[inline]
    pub fn at(&self, i: usize) -> Letter {
        assert!(i < self.len(), "letter index {i} out of range for {self}");
        Letter::from_bits(self.bits >> (2 * (self.len() - 1 - i)))
    }

    #[inline]
    pub fn first(&self) -> Option<Letter> {
        (!self.is_empty()).then(|| self.at(0))
    }

    #[inline]
    pub fn last(&self) -> Option<Letter> {
        (!self.is_empty()).then(|| Letter::from_bits(self.bits))
    }

    pub fn letters(&self) -> impl DoubleEndedIterator<Item = Letter> + ExactSizeIterator + '_ {
        (0..self.len()).map(move |i| self.at(i))
    }

    /// Appends one letter on the right.
    #[inline]
    pub fn push(self, l: Letter) -> Word {
        assert!(self.len() < MAX_WORD_LEN, "word length exceeds {MAX_WORD_LEN}");
        Word {
            len: self.len + 1,
            bits: (self.bits << 2) | l as u64,
        }
    }

    /// Prepends one letter on the left.
    #[inline]
    pub fn prepend(self, l: Letter) -> Word {
        assert!(self.len() < MAX_WORD_LEN, "word length exceeds {MAX_WORD_LEN}");
        Word {
            len: self.len + 1,
            bits: ((l as u64) << (2 * self.len())) | self.bits,
        }
    }

    /// Juxtaposition `vw`.
    #[inline]
    pub fn concat(self, other: Word) -> Word {
        let len = self.len() + other.len();
        assert!(len <= MAX_WORD_LEN, "word length exceeds {MAX_WORD_LEN}");
        if other.is_empty() {
            return self;
        }
        Word {
            len: len as u8,
            bits: (self.bits << (2 * other.len())) | other.bits,
        }
    }

    /// The first `n` letters.
    #[inline]
    pub fn prefix(&self, n: usize) -> Word {
        assert!(n <= self.len());
        Word {
            len: n as u8,
            bits: if n == 0 { 0 } else { self.bits >> (2 * (self.len() - n)) },
        }
    }

    /// Everything after the first `n` letters.
    #[inline]
    pub fn suffix_from(&self, n: usize) -> Word {
        assert!(n <= self.len());
        let rest = self.len() - n;
        Word {
            len: rest as u8,
            bits: if rest == 0 {
                0
            } else {
                self.bits & (u64::MAX >> (64 - 2 * rest))
            },
        }
    }

    /// Splits off the last letter: `w = init · last`.
    #[inline]
    pub fn split_last(&self) -> Option<(Word, Letter)> {
        let last = self.last()?;
        Some((
            Word {
                len: self.len - 1,
                bits: self.bits >> 2,
            },
            last,
        ))
    }

    /// Splits off the first letter: `w = first · rest`.
    #[inline]
    pub fn split_first(&self) -> Option<(Letter, Word)> {
        let first = self.first()?;
        Some((first, self.suffix_from(1)))
    }

    /// `|w|_d`, the number of occurrences of `d`.
    pub fn letter_count(&self, d: Letter) -> usize {
        self.letters().filter(|&l| l == d).count()
    }

    /// Mirror image `a_n ... a_1`.
    pub fn reversed(&self) -> Word {
        Word::from_letters(self.letters().rev())
    }

    /// Letterwise `a <-> c`.
    pub fn flipped(&self) -> Word {
        Word::from_letters(self.letters().map(Letter::flipped))
    }

    /// Packed representation; equal words have equal keys.
    #[inline]
    pub fn key(&self) -> (u8, u64) {
        (self.len, self.bits)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.letters() {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "Word(ε)")
        } else {
            write!(f, "Word({self})")
        }
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n = s.chars().count();
        if n > MAX_WORD_LEN {
            return Err(Error::Parse(format!(
                "word of length {n} exceeds the maximum {MAX_WORD_LEN}"
            )));
        }
        s.chars()
            .map(|ch| Letter::from_char(ch).ok_or_else(|| Error::Parse(format!("invalid letter {ch:?} in word {s:?}"))))
            .collect::<Result<Vec<_>, _>>()
            .map(Word::from_letters)
    }
}

/// Shorthand used heavily in tests: panics on bad input.
pub fn w(s: &str) -> Word {
    s.parse().expect("valid word literal")
}

/// All words of length exactly `n`, in lexicographic order.
pub fn words_of_length(n: usize) -> impl Iterator<Item = Word> {
    assert!(n <= 20, "refusing to enumerate 3^{n} words");
    let count = 3u64.pow(n as u32);
    (0..count).map(move |mut idx| {
        let mut letters = [Letter::A; 20];
        for slot in letters[..n].iter_mut().rev() {
            *slot = Letter::ALL[(idx % 3) as usize];
            idx /= 3;
        }
        Word::from_letters(letters[..n].iter().copied())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn concat_examples() {
        assert_eq!(Word::EMPTY.concat(w("abc")), w("abc"));
        assert_eq!(w("ab").concat(w("c")), w("abc"));
        assert_eq!(w("ac").concat(w("bc")), w("acbc"));
    }

    #[test]
    fn letter_count_examples() {
        assert_eq!(w("abbc").letter_count(Letter::B), 2);
        assert_eq!(Word::EMPTY.letter_count(Letter::A), 0);
        assert_eq!(w("aacc").letter_count(Letter::A), 2);
    }

    #[test]
    fn rendering_and_parsing() {
        assert_eq!(w("abbc").to_string(), "abbc");
        assert_eq!(Word::EMPTY.to_string(), "");
        assert!("abd".parse::<Word>().is_err());
        assert!("aBc".parse::<Word>().is_err());
        assert!("a".repeat(33).parse::<Word>().is_err());
        assert_eq!("".parse::<Word>().unwrap(), Word::EMPTY);
    }

    #[test]
    fn ordering_is_length_then_lexicographic() {
        let mut v = [w("ca"), w("b"), w("abc"), w("ac"), w(""), w("c"), w("aa")];
        v.sort();
        let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        assert_eq!(s, ["", "b", "c", "aa", "ac", "ca", "abc"]);
        assert!(Letter::A < Letter::B && Letter::B < Letter::C);
    }

    #[test]
    fn splitting() {
        let x = w("abcab");
        assert_eq!(x.prefix(2), w("ab"));
        assert_eq!(x.suffix_from(2), w("cab"));
        assert_eq!(x.split_last(), Some((w("abca"), Letter::B)));
        assert_eq!(x.split_first(), Some((Letter::A, w("bcab"))));
        assert_eq!(Word::EMPTY.split_last(), None);
        assert_eq!(w("bc").prepend(Letter::A), w("abc"));
        assert_eq!(w("abc").reversed(), w("cba"));
        assert_eq!(w("abc").flipped(), w("cba"));
        assert_eq!(w("aab").flipped(), w("ccb"));
    }

    #[test]
    fn enumerates_all_words() {
        let all: Vec<Word> = words_of_length(2).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0], w("aa"));
        assert_eq!(all[8], w("cc"));
        assert!(all.windows(2).all(|p| p[0] < p[1]));
    }

    fn arb_word(max: usize) -> impl Strategy<Value = Word> {
        proptest::collection::vec(0usize..3, 0..=max)
            .prop_map(|v| Word::from_letters(v.into_iter().map(|i| Letter::ALL[i])))
    }

    proptest! {
        #[test]
        fn monoid_laws(u in arb_word(8), v in arb_word(8), x in arb_word(8)) {
            prop_assert_eq!(u.concat(v).concat(x), u.concat(v.concat(x)));
            prop_assert_eq!(Word::EMPTY.concat(u), u);
            prop_assert_eq!(u.concat(Word::EMPTY), u);
        }

        #[test]
        fn length_and_counts_are_additive(u in arb_word(10), v in arb_word(10)) {
            let uv = u.concat(v);
            prop_assert_eq!(uv.len(), u.len() + v.len());
            for d in Letter::ALL {
                prop_assert_eq!(uv.letter_count(d), u.letter_count(d) + v.letter_count(d));
            }
            let total: usize = Letter::ALL.iter().map(|&d| u.letter_count(d)).sum();
            prop_assert_eq!(total, u.len());
        }

        #[test]
        fn text_roundtrip(u in arb_word(32)) {
            prop_assert_eq!(u.to_string().parse::<Word>().unwrap(), u);
        }
    }
}
