//! Degree-truncated noncommutative series with exact rational coefficients.
//!
//! An [`NcSeries`] stores its terms bucketed by word length. The
//! truncation degree records up to which length the coefficients are
//! known; every coefficient beyond it is unknown, not zero.

use std::fmt;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::shuffle::shuffle_words;
use crate::words::{Letter, Word, MAX_WORD_LEN};

type Grade = FxHashMap<Word, Rational>;

#[derive(Clone)]
pub struct NcSeries {
    degree: usize,
    // grades[n] holds the words of length n; no zero coefficients
    grades: Vec<Grade>,
}

impl NcSeries {
    /// The zero series, known up to `degree`.
    pub fn zero(degree: usize) -> NcSeries {
        assert!(
            degree <= MAX_WORD_LEN,
            "truncation degree {degree} exceeds {MAX_WORD_LEN}"
        );
        NcSeries {
            degree,
            grades: vec![Grade::default(); degree + 1],
        }
    }

    /// The unit `𝟙` (empty word).
    pub fn one(degree: usize) -> NcSeries {
        NcSeries::monomial(Word::EMPTY, Rational::ONE, degree)
    }

    pub fn monomial(word: Word, coeff: Rational, degree: usize) -> NcSeries {
        let mut s = NcSeries::zero(degree);
        s.add_term(word, &coeff);
        s
    }

    pub fn letter(l: Letter, degree: usize) -> NcSeries {
        NcSeries::monomial(Word::letter(l), Rational::ONE, degree)
    }

    /// Builds a series from terms; like terms are summed and words longer
    /// than `degree` are dropped.
    pub fn from_terms<I>(terms: I, degree: usize) -> NcSeries
    where
        I: IntoIterator<Item = (Word, Rational)>,
    {
        let mut s = NcSeries::zero(degree);
        for (w, c) in terms {
            s.add_term(w, &c);
        }
        s
    }

    /// Parses a compact textual form such as `"b - ac - 2abc + 1/2 aacc"`.
    /// Mainly a convenience for fixtures.
    pub fn parse(text: &str, degree: usize) -> Result<NcSeries> {
        let mut s = NcSeries::zero(degree);
        let cleaned = text.replace('−', "-");
        let mut sign = 1i64;
        let mut tokens = cleaned.split_whitespace().peekable();
        while let Some(token) = tokens.next() {
            match token {
                "+" => sign = 1,
                "-" => sign = -1,
                _ => {
                    let (tok, neg) = match token.strip_prefix('-') {
                        Some(rest) => (rest, true),
                        None => (token, false),
                    };
                    // "1/2 aacc": a bare number followed by a word
                    let joined;
                    let tok = match tokens.peek() {
                        Some(next)
                            if !tok.contains(|c: char| c.is_ascii_alphabetic())
                                && next.starts_with(|c: char| c.is_ascii_alphabetic()) =>
                        {
                            joined = format!("{tok}{}", tokens.next().expect("peeked"));
                            joined.as_str()
                        }
                        _ => tok,
                    };
                    let split = tok.find(|c: char| c.is_ascii_alphabetic()).unwrap_or(tok.len());
                    let (num, word) = tok.split_at(split);
                    let mut coeff = if num.is_empty() {
                        Rational::ONE
                    } else {
                        num.trim_end_matches('*').parse::<Rational>()?
                    };
                    let word = if word.is_empty() || word == "1" {
                        Word::EMPTY
                    } else {
                        word.parse::<Word>()?
                    };
                    if neg != (sign < 0) {
                        coeff = -coeff;
                    }
                    if word.len() > degree {
                        return Err(Error::Parse(format!("word {word} exceeds degree {degree}")));
                    }
                    s.add_term(word, &coeff);
                    sign = 1;
                }
            }
        }
        Ok(s)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.grades.iter().map(|g| g.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.grades.iter().all(|g| g.is_empty())
    }

    /// Lowest length carrying a nonzero term, or `degree + 1` for zero.
    pub fn valuation(&self) -> usize {
        self.grades
            .iter()
            .position(|g| !g.is_empty())
            .unwrap_or(self.degree + 1)
    }

    /// Exact coefficient; zero for absent or over-degree words.
    pub fn coefficient(&self, w: Word) -> Rational {
        self.grades
            .get(w.len())
            .and_then(|g| g.get(&w))
            .cloned()
            .unwrap_or(Rational::ZERO)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(Word::EMPTY)
    }

    /// Terms of length exactly `n`, in arbitrary order.
    pub fn grade(&self, n: usize) -> impl Iterator<Item = (&Word, &Rational)> {
        self.grades.get(n).into_iter().flat_map(|g| g.iter())
    }

    /// All terms sorted by (length, lexicographic word).
    pub fn terms(&self) -> Vec<(Word, Rational)> {
        let mut out = Vec::with_capacity(self.len());
        for g in &self.grades {
            let mut v: Vec<_> = g.iter().map(|(w, c)| (*w, c.clone())).collect();
            v.sort_unstable_by_key(|p| p.0);
            out.extend(v);
        }
        out
    }

    /// Words carrying nonzero coefficients, unordered.
    pub fn support(&self) -> impl Iterator<Item = Word> + '_ {
        self.grades.iter().flat_map(|g| g.keys().copied())
    }

    pub fn add_term(&mut self, w: Word, c: &Rational) {
        if w.len() > self.degree || c.is_zero() {
            return;
        }
        let g = &mut self.grades[w.len()];
        match g.get_mut(&w) {
            Some(slot) => {
                *slot += c;
                if slot.is_zero() {
                    g.remove(&w);
                }
            }
            None => {
                g.insert(w, c.clone());
            }
        }
    }

    /// Homogeneous component of length `n`, carried at this series' degree.
    pub fn homogeneous(&self, n: usize) -> NcSeries {
        let mut s = NcSeries::zero(self.degree);
        if n <= self.degree {
            s.grades[n] = self.grades[n].clone();
        }
        s
    }

    /// Drops every word longer than `degree` (which must not exceed the
    /// current degree).
    pub fn truncate(&self, degree: usize) -> NcSeries {
        assert!(
            degree <= self.degree,
            "cannot raise the truncation degree by truncating"
        );
        NcSeries {
            degree,
            grades: self.grades[..=degree].to_vec(),
        }
    }

    fn map_words(&self, f: impl Fn(Word) -> Word) -> NcSeries {
        let grades = self
            .grades
            .iter()
            .map(|g| g.iter().map(|(w, c)| (f(*w), c.clone())).collect())
            .collect();
        NcSeries {
            degree: self.degree,
            grades,
        }
    }

    pub fn add(&self, other: &NcSeries) -> NcSeries {
        let degree = self.degree.min(other.degree);
        let mut out = self.truncate(degree);
        for g in other.grades.iter().take(degree + 1) {
            for (w, c) in g {
                out.add_term(*w, c);
            }
        }
        out
    }

    pub fn sub(&self, other: &NcSeries) -> NcSeries {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> NcSeries {
        self.scale(&Rational::from_int(-1))
    }

    pub fn scale(&self, k: &Rational) -> NcSeries {
        if k.is_zero() {
            return NcSeries::zero(self.degree);
        }
        NcSeries {
            degree: self.degree,
            grades: self
                .grades
                .iter()
                .map(|g| g.iter().map(|(w, c)| (*w, c * k)).collect())
                .collect(),
        }
    }

    /// Degree up to which a product of `self` and `other` is exactly known:
    /// a coefficient of length `n` pairs lengths `i + j = n`, and every such
    /// pair is known when `n <= min(d1 + v2, d2 + v1)`.
    fn product_degree(&self, other: &NcSeries) -> usize {
        let a = self.degree + other.valuation();
        let b = other.degree + self.valuation();
        a.min(b).min(MAX_WORD_LEN)
    }

    /// Concatenation (Cauchy) product.
    pub fn concat_mul(&self, other: &NcSeries) -> NcSeries {
        let degree = self.product_degree(other);
        let mut out = NcSeries::zero(degree);
        for (i, gp) in self.grades.iter().enumerate() {
            for (j, gq) in other.grades.iter().enumerate().take(degree.saturating_sub(i) + 1) {
                if i + j > degree {
                    break;
                }
                for (u, cu) in gp {
                    for (v, cv) in gq {
                        out.add_term(u.concat(*v), &(cu * cv));
                    }
                }
            }
        }
        out
    }

    /// Shuffle product.
    pub fn shuffle_mul(&self, other: &NcSeries) -> NcSeries {
        let degree = self.product_degree(other);
        let mut out = NcSeries::zero(degree);
        for (i, gp) in self.grades.iter().enumerate() {
            for (j, gq) in other.grades.iter().enumerate() {
                if i + j > degree {
                    break;
                }
                accumulate_shuffle(&mut out.grades[i + j], gp, gq);
            }
        }
        out
    }

    /// `P^{⧢k}`, with `P^{⧢0} = 𝟙`.
    pub fn shuffle_pow(&self, k: usize) -> NcSeries {
        let mut acc = NcSeries::one(self.degree);
        for _ in 0..k {
            acc = acc.shuffle_mul(self);
        }
        acc
    }

    /// Right derivative `∂_d`: the coefficient of `w` in the result is the
    /// coefficient of `w·d` here. Lowers the degree by one.
    pub fn right_derivative(&self, d: Letter) -> NcSeries {
        assert!(self.degree >= 1);
        let mut out = NcSeries::zero(self.degree - 1);
        for g in &self.grades[1..] {
            for (w, c) in g {
                let (init, last) = w.split_last().expect("nonempty");
                if last == d {
                    out.grades[init.len()].insert(init, c.clone());
                }
            }
        }
        out
    }

    fn require_no_constant(&self) -> Result<()> {
        if self.constant_term().is_zero() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "exp⧢ needs a zero constant term, got {}",
                self.constant_term()
            )))
        }
    }

    /// Shuffle exponential `𝟙 + Σ_k P^{⧢k}/k!`.
    ///
    /// Computed grade by grade from `∂_d exp⧢(P) = exp⧢(P) ⧢ ∂_d P`, which
    /// holds because every right derivative is a derivation of `⧢`.
    pub fn shuffle_exp(&self) -> Result<NcSeries> {
        self.require_no_constant()?;
        let degree = self.degree;
        let derivs: Vec<NcSeries> = if degree == 0 {
            Vec::new()
        } else {
            Letter::ALL.iter().map(|&d| self.right_derivative(d)).collect()
        };
        let mut e = NcSeries::one(degree);
        for n in 1..=degree {
            let mut grade = Grade::default();
            for (d, deriv) in Letter::ALL.iter().zip(&derivs) {
                // (E ⧢ ∂_d P) restricted to length n-1, then ·d
                let mut inner = Grade::default();
                for j in 0..n {
                    let dp = &deriv.grades[j];
                    if dp.is_empty() {
                        continue;
                    }
                    accumulate_shuffle(&mut inner, &e.grades[n - 1 - j], dp);
                }
                for (w, c) in inner {
                    grade.insert(w.push(*d), c);
                }
            }
            e.grades[n] = grade;
        }
        Ok(e)
    }

    /// Shuffle exponential by summing shuffle powers directly; `k` only runs
    /// up to the degree since `P^{⧢k}` starts at length `k`.
    pub fn shuffle_exp_by_powers(&self) -> Result<NcSeries> {
        self.require_no_constant()?;
        let mut acc = NcSeries::one(self.degree);
        let mut power = NcSeries::one(self.degree);
        for k in 1..=self.degree {
            power = power.shuffle_mul(self).truncate(self.degree);
            acc = acc.add(&power.scale(&Rational::factorial(k as u32).recip()));
        }
        Ok(acc)
    }

    /// Antipode `σ`: reverses every word.
    pub fn antipode(&self) -> NcSeries {
        self.map_words(|w| w.reversed())
    }

    /// `φ`: substitutes `a <-> c` letterwise.
    pub fn flip(&self) -> NcSeries {
        self.map_words(|w| w.flipped())
    }

    /// Largest absolute coefficient (zero for the zero series).
    pub fn max_abs_coefficient(&self) -> Rational {
        self.grades
            .iter()
            .flat_map(|g| g.values())
            .map(Rational::abs)
            .max()
            .unwrap_or(Rational::ZERO)
    }

    /// Exact equality of coefficients up to `degree`.
    pub fn agrees_up_to(&self, other: &NcSeries, degree: usize) -> bool {
        degree <= self.degree && degree <= other.degree && (0..=degree).all(|n| self.grades[n] == other.grades[n])
    }
}

/// `out += P_i ⧢ Q_j` for two homogeneous grades.
fn accumulate_shuffle(out: &mut Grade, p: &Grade, q: &Grade) {
    if p.is_empty() || q.is_empty() {
        return;
    }
    for (x, cx) in p {
        for (y, cy) in q {
            let c = cx * cy;
            for &(w, m) in shuffle_words(*x, *y).iter() {
                let term = if m == 1 {
                    c.clone()
                } else {
                    &c * &Rational::from_int(m as i64)
                };
                match out.get_mut(&w) {
                    Some(slot) => {
                        *slot += &term;
                        if slot.is_zero() {
                            out.remove(&w);
                        }
                    }
                    None => {
                        out.insert(w, term);
                    }
                }
            }
        }
    }
}

/// Equality means same truncation degree and same terms.
impl PartialEq for NcSeries {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.grades == other.grades
    }
}

impl Eq for NcSeries {}

impl fmt::Display for NcSeries {
    /// Renders as `b - ac - 2abc + 1/2 aacc`; `0` for the zero series.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let word = if w.is_empty() { "1".to_string() } else { w.to_string() };
            if mag == Rational::ONE {
                write!(f, "{word}")?;
            } else if mag.is_integer() {
                write!(f, "{mag}{word}")?;
            } else {
                write!(f, "{mag} {word}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for NcSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NcSeries[deg {}]({self})", self.degree)
    }
}

/// One term of the JSON series format; numbers travel as decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub word: String,
    pub num: String,
    pub den: String,
}

/// `{ "truncation_degree": N, "terms": [ {"word", "num", "den"}, ... ] }`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub truncation_degree: usize,
    pub terms: Vec<TermJson>,
}

impl From<&NcSeries> for SeriesJson {
    fn from(s: &NcSeries) -> Self {
        SeriesJson {
            truncation_degree: s.degree,
            terms: s
                .terms()
                .into_iter()
                .map(|(w, c)| TermJson {
                    word: w.to_string(),
                    num: c.numer().to_string(),
                    den: c.denom().to_string(),
                })
                .collect(),
        }
    }
}

impl TryFrom<&SeriesJson> for NcSeries {
    type Error = Error;

    fn try_from(j: &SeriesJson) -> Result<Self> {
        if j.truncation_degree > MAX_WORD_LEN {
            return Err(Error::Parse(format!(
                "truncation degree {} exceeds {MAX_WORD_LEN}",
                j.truncation_degree
            )));
        }
        let mut s = NcSeries::zero(j.truncation_degree);
        for t in &j.terms {
            let w: Word = t.word.parse()?;
            if w.len() > j.truncation_degree {
                return Err(Error::Parse(format!(
                    "term {} exceeds truncation degree {}",
                    t.word, j.truncation_degree
                )));
            }
            let c: Rational = format!("{}/{}", t.num, t.den).parse()?;
            if c.is_zero() {
                return Err(Error::Parse(format!("zero coefficient stored for {}", t.word)));
            }
            if !s.coefficient(w).is_zero() {
                return Err(Error::Parse(format!("duplicate term {}", t.word)));
            }
            s.add_term(w, &c);
        }
        Ok(s)
    }
}

impl NcSeries {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SeriesJson::from(self)).expect("series serializes")
    }

    pub fn from_json(text: &str) -> Result<NcSeries> {
        let j: SeriesJson = serde_json::from_str(text)?;
        NcSeries::try_from(&j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::w;
    use proptest::prelude::*;

    fn s(text: &str, deg: usize) -> NcSeries {
        NcSeries::parse(text, deg).unwrap()
    }

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn add_examples() {
        assert!(s("b", 3).add(&s("-b", 3)).is_zero());
        assert_eq!(s("b - ac", 3).add(&s("ac", 3)), s("b", 3));
        assert_eq!(s("2abc", 3).add(&s("3abc", 3)), s("5abc", 3));
        assert_eq!(s("b", 5).add(&s("c", 3)).degree(), 3);
    }

    #[test]
    fn scale_examples() {
        assert_eq!(s("b - ac", 3).scale(&q(2)), s("2b - 2ac", 3));
        assert!(s("b - ac", 3).scale(&q(0)).is_zero());
        assert_eq!(s("b - ac", 3).scale(&q(-1)), s("-b + ac", 3));
    }

    #[test]
    fn concat_examples() {
        let a = NcSeries::letter(Letter::A, 2);
        assert_eq!(a.concat_mul(&NcSeries::letter(Letter::C, 2)), s("ac", 3));
        // the exponential factor known only to degree 1 still yields degree 2
        let e1 = s("1 + 2b", 1);
        let prod = a.concat_mul(&e1);
        assert_eq!(prod.degree(), 2);
        assert_eq!(prod, s("a + 2ab", 2));
        assert_eq!(s("b - ac", 3).concat_mul(&NcSeries::one(3)), s("b - ac", 3));
    }

    #[test]
    fn shuffle_examples() {
        assert_eq!(s("a", 2).shuffle_mul(&s("b", 2)), s("ab + ba", 3));
        assert_eq!(s("a", 2).shuffle_mul(&s("a", 2)), s("2aa", 3));
        assert_eq!(s("c", 3).shuffle_mul(&s("bc", 3)), s("cbc + 2bcc", 4));
    }

    #[test]
    fn shuffle_exp_examples() {
        assert_eq!(NcSeries::zero(4).shuffle_exp().unwrap(), NcSeries::one(4));
        // (2b)⧢(2b)/2! = 4·(2bb)/2 = 4bb
        let e = s("2b", 2).shuffle_exp().unwrap();
        assert_eq!(e, s("1 + 2b + 4bb", 2));
        assert_eq!(e, s("2b", 2).shuffle_exp_by_powers().unwrap());
        // S to degree 2 is b - ac; exp⧢(2S) at degree 3 by the power oracle
        let two_s = s("2b - 2ac", 3);
        let oracle = two_s.shuffle_exp_by_powers().unwrap();
        assert_eq!(two_s.shuffle_exp().unwrap(), oracle);
        assert_eq!(oracle, s("1 + 2b + 4bb - 2ac + 8bbb - 4acb - 4abc - 4bac", 3));
        assert!(matches!(s("1 + b", 2).shuffle_exp(), Err(Error::Domain(_))));
    }

    #[test]
    fn antipode_and_flip_examples() {
        assert_eq!(s("abc", 3).antipode(), s("cba", 3));
        assert_eq!(s("b", 3).antipode(), s("b", 3));
        assert_eq!(s("2aacc - 4abbc", 4).antipode(), s("2ccaa - 4cbba", 4));
        assert_eq!(s("ac", 3).flip(), s("ca", 3));
        assert_eq!(s("b", 3).flip(), s("b", 3));
        assert_eq!(s("abc", 3).flip(), s("cba", 3));
    }

    #[test]
    fn coefficient_lookup() {
        let x = s("b - ac - 2abc - 4abbc + 2aacc", 4);
        assert_eq!(x.coefficient(w("ac")), q(-1));
        assert_eq!(x.coefficient(w("abbc")), q(-4));
        assert_eq!(x.coefficient(w("ca")), q(0));
        assert_eq!(x.coefficient(w("aaaaaaa")), q(0));
    }

    #[test]
    fn display_and_parse() {
        let x = s("b - ac - 2abc + 1/2 aacc", 4);
        assert_eq!(x.to_string(), "b - ac - 2abc + 1/2 aacc");
        assert_eq!(NcSeries::zero(2).to_string(), "0");
        assert_eq!(s("-1 + a", 2).to_string(), "-1 + a");
        assert!(NcSeries::parse("abcd", 3).is_err());
    }

    #[test]
    fn json_format() {
        let x = s("b - 4abbc", 4);
        let j = SeriesJson::from(&x);
        assert_eq!(j.truncation_degree, 4);
        assert_eq!(
            j.terms[1],
            TermJson {
                word: "abbc".into(),
                num: "-4".into(),
                den: "1".into()
            }
        );
        assert_eq!(NcSeries::from_json(&x.to_json()).unwrap(), x);
        let bad = r#"{"truncation_degree": 1, "terms": [{"word": "ab", "num": "1", "den": "1"}]}"#;
        assert!(NcSeries::from_json(bad).is_err());
        let bad = r#"{"truncation_degree": 2, "terms": [{"word": "ad", "num": "1", "den": "1"}]}"#;
        assert!(NcSeries::from_json(bad).is_err());
    }

    fn arb_series(max_len: usize, degree: usize) -> impl Strategy<Value = NcSeries> {
        let word = proptest::collection::vec(0usize..3, 0..=max_len)
            .prop_map(|v| Word::from_letters(v.into_iter().map(|i| Letter::ALL[i])));
        proptest::collection::vec((word, -3i64..=3), 0..4).prop_map(move |terms| {
            NcSeries::from_terms(terms.into_iter().map(|(w, c)| (w, Rational::from_int(c))), degree)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn shuffle_commutative_associative(p in arb_series(4, 8), r in arb_series(4, 8), t in arb_series(4, 8)) {
            prop_assert_eq!(p.shuffle_mul(&r), r.shuffle_mul(&p));
            prop_assert_eq!(p.shuffle_mul(&r).shuffle_mul(&t), p.shuffle_mul(&r.shuffle_mul(&t)));
        }

        #[test]
        fn antipode_laws(p in arb_series(4, 6), r in arb_series(4, 6)) {
            prop_assert_eq!(p.concat_mul(&r).antipode(), r.antipode().concat_mul(&p.antipode()));
            prop_assert_eq!(p.shuffle_mul(&r).antipode(), p.antipode().shuffle_mul(&r.antipode()));
            prop_assert_eq!(p.antipode().antipode(), p.clone());
            prop_assert_eq!(p.flip().flip(), p.clone());
            prop_assert_eq!(p.concat_mul(&r).flip(), p.flip().concat_mul(&r.flip()));
        }

        #[test]
        fn concat_associative(p in arb_series(3, 6), r in arb_series(3, 6), t in arb_series(3, 6)) {
            prop_assert_eq!(p.concat_mul(&r).concat_mul(&t), p.concat_mul(&r.concat_mul(&t)));
        }

        #[test]
        fn exp_inverse(p in arb_series(3, 5)) {
            let p = p.sub(&p.homogeneous(0));
            let e = p.shuffle_exp().unwrap();
            let inv = p.neg().shuffle_exp().unwrap();
            prop_assert_eq!(e.shuffle_mul(&inv).truncate(5), NcSeries::one(5));
            prop_assert_eq!(e, p.shuffle_exp_by_powers().unwrap());
        }
    }
}
