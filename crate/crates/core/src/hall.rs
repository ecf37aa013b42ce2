//! Hall words adapted to `sl(2)` and the series built from them.
//!
//! Only words are stored, never bracketed trees. Each entry keeps the
//! factorization its generating rule produced: a head letter followed by a
//! non-increasing list of Hall factors. That is all the dual polynomial
//! `ξ` needs:
//!
//! ```text
//! ξ(head · f_1^{i_1} ⋯ f_k^{i_k}) = head · (ξ(f_1)^{⧢i_1} ⧢ ⋯ ⧢ ξ(f_k)^{⧢i_k}) / (i_1! ⋯ i_k!)
//! ```
//!
//! Ordering. Within one kind and length, entries are listed greatest first
//! (top to bottom of the usual table). Across lengths of the same kind the
//! longer word is the smaller one, and across kinds `a < b < c`.

use std::cmp::{Ordering, Reverse};
use std::sync::Arc;

use parking_lot::RwLock;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ncseries::NcSeries;
use crate::rational::Rational;
use crate::words::{Letter, Word};

/// Default ceiling on truncation degrees; the number of words grows like 3ⁿ.
pub const DEFAULT_DEGREE_CAP: usize = 12;

/// Rejects degrees above the cap unless explicitly allowed.
pub fn check_degree(degree: usize, allow_large: bool) -> Result<()> {
    if degree == 0 {
        return Err(Error::Input("degree must be at least 1".into()));
    }
    if degree > DEFAULT_DEGREE_CAP && !allow_large {
        return Err(Error::DegreeCap {
            requested: degree,
            cap: DEFAULT_DEGREE_CAP,
        });
    }
    Ok(())
}

/// Which generator a Hall element reduces to. The derived order is the
/// cross-kind Hall order `a < b < c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HallKind {
    A,
    B,
    C,
}

impl HallKind {
    pub fn letter(self) -> Letter {
        match self {
            HallKind::A => Letter::A,
            HallKind::B => Letter::B,
            HallKind::C => Letter::C,
        }
    }
}

/// The generating rule behind an entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HallRule {
    /// A single letter.
    Letter,
    /// b-type `a·v`, `v` c-type.
    APrefixed,
    /// c-type `b·w`, `w` c-type.
    BPrefixed,
    /// c-type `(a v')·w` with `a v'` b-type of length at least 2.
    Concatenated,
    /// c-type `a·v·w` with `v >= w` c-type of equal length.
    Odd,
    /// a-type `a·v_1⋯v_i` with `v_1 >= ⋯ >= v_i` b-type.
    AProduct,
}

#[derive(Clone, Debug)]
pub struct HallEntry {
    pub word: Word,
    pub kind: HallKind,
    pub rule: HallRule,
    /// First letter of the word.
    pub head: Letter,
    /// Non-increasing Hall factorization of the rest of the word.
    pub tail: Vec<Word>,
    /// Position within its (kind, length) list, 0 = greatest.
    pub position: usize,
}

/// A Hall word located in the global order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HallIndex {
    pub word: Word,
    pub kind: HallKind,
    /// Position in the ascending global order of the table.
    pub rank: usize,
}

/// Sort key realizing the global order (ascending).
type OrderKey = (HallKind, Reverse<usize>, Reverse<usize>);

pub struct HallTable {
    max_length: usize,
    // by_kind[kind][len] lists entries greatest first; index 0 unused
    by_kind: [Vec<Vec<HallEntry>>; 3],
    lookup: FxHashMap<Word, (HallKind, usize, usize)>,
    ranks: FxHashMap<Word, usize>,
    xi_memo: RwLock<FxHashMap<Word, Arc<NcSeries>>>,
}

fn kind_slot(kind: HallKind) -> usize {
    kind as usize
}

impl HallTable {
    /// Generates every a-, b- and c-type Hall word of length at most
    /// `max_length`.
    pub fn generate(max_length: usize) -> HallTable {
        assert!(max_length >= 1, "max_length must be at least 1");
        let empty = || vec![Vec::new(); max_length + 1];
        let mut table = HallTable {
            max_length,
            by_kind: [empty(), empty(), empty()],
            lookup: FxHashMap::default(),
            ranks: FxHashMap::default(),
            xi_memo: RwLock::new(FxHashMap::default()),
        };
        for kind in [HallKind::A, HallKind::B, HallKind::C] {
            table.push(kind, 1, HallRule::Letter, kind.letter(), Vec::new());
        }
        for n in 2..=max_length {
            table.generate_c(n);
            table.generate_b(n);
        }
        for n in 2..=max_length {
            table.generate_a(n);
        }
        table.assign_ranks();
        table
    }

    fn push(&mut self, kind: HallKind, len: usize, rule: HallRule, head: Letter, tail: Vec<Word>) {
        let word = tail.iter().fold(Word::letter(head), |acc, f| acc.concat(*f));
        debug_assert_eq!(word.len(), len);
        let list = &mut self.by_kind[kind_slot(kind)][len];
        let position = list.len();
        let previous = self.lookup.insert(word, (kind, len, position));
        assert!(previous.is_none(), "Hall word {word} generated twice");
        list.push(HallEntry {
            word,
            kind,
            rule,
            head,
            tail,
            position,
        });
    }

    fn words(&self, kind: HallKind, len: usize) -> Vec<Word> {
        self.by_kind[kind_slot(kind)][len].iter().map(|e| e.word).collect()
    }

    fn generate_b(&mut self, n: usize) {
        for v in self.words(HallKind::C, n - 1) {
            self.push(HallKind::B, n, HallRule::APrefixed, Letter::A, vec![v]);
        }
    }

    fn generate_c(&mut self, n: usize) {
        let k = n / 2;
        // pairs (v, w), v b-type of length i, ordered by v then w, greatest first;
        // shorter v is the greater one, so i runs upward
        for i in 1..=k {
            for v in self.words(HallKind::B, i) {
                for w in self.words(HallKind::C, n - i) {
                    if i == 1 {
                        self.push(HallKind::C, n, HallRule::BPrefixed, Letter::B, vec![w]);
                    } else {
                        let inner = v.suffix_from(1);
                        self.push(HallKind::C, n, HallRule::Concatenated, Letter::A, vec![inner, w]);
                    }
                }
            }
        }
        if n % 2 == 1 {
            // the odd set sits below every concatenation
            let half = self.words(HallKind::C, k);
            for (pv, v) in half.iter().enumerate() {
                for w in &half[pv..] {
                    self.push(HallKind::C, n, HallRule::Odd, Letter::A, vec![*v, *w]);
                }
            }
        }
    }

    fn generate_a(&mut self, n: usize) {
        // b-type words of length < n, greatest first in the global order
        let mut parts: Vec<Word> = Vec::new();
        for len in 1..n {
            parts.extend(self.words(HallKind::B, len));
        }
        let mut tuples: Vec<Vec<usize>> = Vec::new();
        let mut current = Vec::new();
        fn extend(parts: &[Word], start: usize, remaining: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if remaining == 0 {
                out.push(current.clone());
                return;
            }
            // indices into `parts` only move forward: non-increasing factors
            for idx in start..parts.len() {
                if parts[idx].len() <= remaining {
                    current.push(idx);
                    extend(parts, idx, remaining - parts[idx].len(), current, out);
                    current.pop();
                }
            }
        }
        extend(&parts, 0, n - 1, &mut current, &mut tuples);
        // fewer factors first, then lexicographic with greater factors first
        tuples.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
        for t in tuples {
            let tail = t.iter().map(|&i| parts[i]).collect();
            self.push(HallKind::A, n, HallRule::AProduct, Letter::A, tail);
        }
    }

    fn order_key(&self, kind: HallKind, len: usize, position: usize) -> OrderKey {
        (kind, Reverse(len), Reverse(position))
    }

    fn assign_ranks(&mut self) {
        let mut all: Vec<(OrderKey, Word)> = self
            .lookup
            .iter()
            .map(|(w, &(k, l, p))| (self.order_key(k, l, p), *w))
            .collect();
        all.sort();
        self.ranks = all.into_iter().enumerate().map(|(r, (_, w))| (w, r)).collect();
    }

    pub fn max_length(&self) -> usize {
        self.max_length
    }

    /// Entries of one kind and length, greatest first.
    pub fn entries(&self, kind: HallKind, len: usize) -> &[HallEntry] {
        self.by_kind[kind_slot(kind)]
            .get(len)
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    /// Words of one kind and length, greatest first.
    pub fn listing(&self, kind: HallKind, len: usize) -> Vec<Word> {
        self.entries(kind, len).iter().map(|e| e.word).collect()
    }

    pub fn entry(&self, w: Word) -> Option<&HallEntry> {
        let &(k, l, p) = self.lookup.get(&w)?;
        Some(&self.by_kind[kind_slot(k)][l][p])
    }

    pub fn kind_of(&self, w: Word) -> Option<HallKind> {
        self.lookup.get(&w).map(|t| t.0)
    }

    pub fn index_of(&self, w: Word) -> Option<HallIndex> {
        let kind = self.kind_of(w)?;
        Some(HallIndex {
            word: w,
            kind,
            rank: self.ranks[&w],
        })
    }

    /// Compares two Hall words of the table in the Hall order.
    pub fn compare(&self, v: Word, w: Word) -> Option<Ordering> {
        Some(self.ranks.get(&v)?.cmp(self.ranks.get(&w)?))
    }

    /// All Hall words in ascending global order.
    pub fn ordered(&self) -> Vec<HallIndex> {
        let mut v: Vec<HallIndex> = self.ranks.keys().filter_map(|w| self.index_of(*w)).collect();
        v.sort_by_key(|h| h.rank);
        v
    }

    fn require(&self, w: Word, kind: HallKind) -> Result<&HallEntry> {
        match self.entry(w) {
            Some(e) if e.kind == kind => Ok(e),
            Some(e) => Err(Error::Domain(format!(
                "{w} is a {:?}-type Hall word, expected {:?}-type",
                e.kind, kind
            ))),
            None if w.len() > self.max_length => Err(Error::Domain(format!(
                "{w} is longer than the table's maximum length {}",
                self.max_length
            ))),
            None => Err(Error::Domain(format!("{w} is not a Hall word"))),
        }
    }

    /// `Γ_b` on a b-type Hall word.
    pub fn gamma_b(&self, w: Word) -> Result<Rational> {
        self.require(w, HallKind::B)?;
        Ok(gamma_b_formula(w))
    }

    /// `γ_c` on a c-type Hall word.
    pub fn gamma_c(&self, w: Word) -> Result<Rational> {
        self.require(w, HallKind::C)?;
        Ok(gamma_c_formula(w))
    }

    /// `γ_a` of the a-type element `a·v_1⋯v_i`: `2^i Γ_b(v_1)⋯Γ_b(v_i)`.
    pub fn gamma_a(&self, parts: &[Word]) -> Result<Rational> {
        let mut acc = Rational::ONE;
        for (i, v) in parts.iter().enumerate() {
            acc = &acc * &(&Rational::from_int(2) * &self.gamma_b(*v)?);
            if i > 0 && self.compare(parts[i - 1], *v) == Some(Ordering::Less) {
                return Err(Error::Domain(format!(
                    "factors must be non-increasing, but {} < {}",
                    parts[i - 1],
                    v
                )));
            }
        }
        Ok(acc)
    }

    /// The dual polynomial `ξ(w)` of a Hall word, memoized.
    pub fn xi(&self, w: Word) -> Result<Arc<NcSeries>> {
        if let Some(hit) = self.xi_memo.read().get(&w) {
            return Ok(hit.clone());
        }
        let entry = self
            .entry(w)
            .ok_or_else(|| Error::Domain(format!("{w} is not a Hall word of this table")))?;
        let mut factors = Vec::with_capacity(entry.tail.len());
        for f in &entry.tail {
            factors.push(self.xi(*f)?);
        }
        let inner = weighted_shuffle(&entry.tail, &factors, self.max_length);
        let xi = NcSeries::letter(entry.head, self.max_length)
            .concat_mul(&inner)
            .truncate(self.max_length);
        let xi = Arc::new(xi);
        self.xi_memo.write().entry(w).or_insert_with(|| xi.clone());
        Ok(xi)
    }

    fn sum_over(&self, kind: HallKind, degree: usize, gamma: impl Fn(&HallEntry) -> Rational) -> NcSeries {
        assert!(degree <= self.max_length, "degree exceeds the table");
        let mut out = NcSeries::zero(degree);
        for len in 1..=degree {
            for e in self.entries(kind, len) {
                let g = gamma(e);
                let xi = self.xi(e.word).expect("table entry");
                for (w, c) in xi.grade(len) {
                    out.add_term(*w, &(&g * c));
                }
            }
        }
        out
    }

    /// `S = Σ_{w b-type} Γ_b(w) ξ(w)` truncated at `degree`.
    pub fn main_series(&self, degree: usize) -> NcSeries {
        self.sum_over(HallKind::B, degree, |e| gamma_b_formula(e.word))
    }

    /// `Σ_{h a-type} γ_a(h) ξ(h)`, which equals `a·exp⧢(2S)`.
    pub fn z_a(&self, degree: usize) -> NcSeries {
        self.sum_over(HallKind::A, degree, |e| {
            self.gamma_a(&e.tail).expect("a-type factors are b-type and ordered")
        })
    }

    /// `Σ_{h c-type} γ_c(h) ξ(h)`, which equals `exp⧢(2S)·c`.
    pub fn z_c(&self, degree: usize) -> NcSeries {
        self.sum_over(HallKind::C, degree, |e| gamma_c_formula(e.word))
    }
}

/// `ξ(f_1) ⧢′ ⋯ ⧢′ ξ(f_k)` for non-increasing factors: runs of `i` equal
/// factors contribute a `1/i!`.
fn weighted_shuffle(factors: &[Word], xis: &[Arc<NcSeries>], degree: usize) -> NcSeries {
    let mut acc = NcSeries::one(degree);
    let mut run = 0u32;
    let mut norm = Rational::ONE;
    for (i, xi) in xis.iter().enumerate() {
        run = if i > 0 && factors[i - 1] == factors[i] {
            run + 1
        } else {
            1
        };
        norm = &norm * &Rational::from_int(run as i64);
        acc = acc.shuffle_mul(xi).truncate(degree);
    }
    acc.scale(&norm.recip())
}

/// `Γ_b(b) = 1`, `Γ_b(a w') = -(-2)^{|w'|_a} 2^{|w'|_b}`. No membership check.
pub fn gamma_b_formula(w: Word) -> Rational {
    if w == Word::letter(Letter::B) {
        return Rational::ONE;
    }
    -gamma_c_formula(w.suffix_from(1))
}

/// `γ_c(w) = (-2)^{|w|_a} 2^{|w|_b}`. No membership check.
pub fn gamma_c_formula(w: Word) -> Rational {
    let na = w.letter_count(Letter::A) as u32;
    let nb = w.letter_count(Letter::B) as u32;
    let sign = if na % 2 == 1 { -1 } else { 1 };
    Rational::from_int(sign) * Rational::from_int(2).pow(na + nb)
}

/// `S` from the Hall words, truncated at `degree`.
pub fn main_series_hall(degree: usize) -> NcSeries {
    assert!(degree >= 1);
    HallTable::generate(degree).main_series(degree)
}

/// `S` from `S = b - a·exp⧢(2S)·c`, grade by grade:
/// `S_1 = b` and `S_n = -a (Σ_{i>=0} 2^i/i! Σ_{k_1+⋯+k_i = n-2} S_{k_1} ⧢ ⋯ ⧢ S_{k_i}) c`.
pub fn main_series_fixpoint(degree: usize) -> NcSeries {
    assert!(degree >= 1);
    let a = NcSeries::letter(Letter::A, degree);
    let c = NcSeries::letter(Letter::C, degree);
    // grades[n] = S_n, powers[i][m] = Σ_{k_1+⋯+k_i = m} S_{k_1} ⧢ ⋯ ⧢ S_{k_i}
    let mut grades: Vec<NcSeries> = vec![NcSeries::zero(degree), NcSeries::letter(Letter::B, degree)];
    let mut powers: Vec<Vec<NcSeries>> = vec![vec![NcSeries::one(degree)]];
    for n in 2..=degree {
        let m = n - 2;
        if m >= 1 {
            powers.push(Vec::new());
            for i in 1..=m {
                let mut p = NcSeries::zero(degree);
                // the last factor has grade j, the others share m - j
                for j in 1..=m + 1 - i {
                    let prev = &powers[i - 1];
                    if m - j < prev.len() {
                        p = p.add(&prev[m - j].shuffle_mul(&grades[j]).truncate(degree));
                    }
                }
                while powers[i].len() < m {
                    powers[i].push(NcSeries::zero(degree));
                }
                powers[i].push(p);
            }
        }
        let mut inner = NcSeries::zero(degree);
        let mut coeff = Rational::ONE;
        for (i, row) in powers.iter().enumerate().take(m + 1) {
            if i > 0 {
                coeff = &coeff * &Rational::new(2, i as i64);
            }
            if let Some(p) = row.get(m) {
                inner = inner.add(&p.scale(&coeff));
            }
        }
        let s_n = a.concat_mul(&inner).concat_mul(&c).truncate(degree).neg();
        grades.push(s_n);
    }
    grades.iter().fold(NcSeries::zero(degree), |acc, g| acc.add(g))
}

/// The Wei–Norman series at one truncation degree.
#[derive(Clone, Debug)]
pub struct ZSeries {
    pub degree: usize,
    /// `S`, which is also `Z_b`.
    pub s: NcSeries,
    /// `exp⧢(2S)`.
    pub exp2s: NcSeries,
    pub za: NcSeries,
    pub zc: NcSeries,
}

impl ZSeries {
    pub fn zb(&self) -> &NcSeries {
        &self.s
    }
}

/// `Z_a = a·exp⧢(2S)`, `Z_b = S`, `Z_c = exp⧢(2S)·c`, all truncated at `degree`.
pub fn z_series(degree: usize) -> ZSeries {
    assert!(degree >= 1);
    let s = main_series_fixpoint(degree);
    let exp2s = s
        .scale(&Rational::from_int(2))
        .shuffle_exp()
        .expect("S has no constant term");
    let za = NcSeries::letter(Letter::A, degree).concat_mul(&exp2s);
    let zc = exp2s.concat_mul(&NcSeries::letter(Letter::C, degree));
    debug_assert_eq!(za.degree(), degree);
    debug_assert_eq!(zc.degree(), degree);
    ZSeries {
        degree,
        s,
        exp2s,
        za,
        zc,
    }
}

/// `a·(1 + Σ_i 2^i Σ_{w_1 >= ⋯ >= w_i} Γ_b(w_1)⋯Γ_b(w_i) ξ(w_1) ⧢′ ⋯ ⧢′ ξ(w_i))`
/// from the a-type Hall words.
pub fn z_a_hall(degree: usize) -> NcSeries {
    assert!(degree >= 1);
    HallTable::generate(degree).z_a(degree)
}

/// Words of a series whose coefficient is not an integer.
pub fn non_integer_terms(s: &NcSeries) -> Vec<Word> {
    s.terms()
        .into_iter()
        .filter(|(_, c)| !c.is_integer())
        .map(|(w, _)| w)
        .collect()
}

/// JSON dump of a table: per kind, one ordered list of words per length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallTableJson {
    pub max_length: usize,
    pub a: Vec<Vec<String>>,
    pub b: Vec<Vec<String>>,
    pub c: Vec<Vec<String>>,
}

impl From<&HallTable> for HallTableJson {
    fn from(t: &HallTable) -> Self {
        let dump = |kind| {
            (1..=t.max_length)
                .map(|n| t.listing(kind, n).iter().map(|w| w.to_string()).collect())
                .collect()
        };
        HallTableJson {
            max_length: t.max_length,
            a: dump(HallKind::A),
            b: dump(HallKind::B),
            c: dump(HallKind::C),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::w;

    fn names(ws: &[Word]) -> Vec<String> {
        ws.iter().map(|x| x.to_string()).collect()
    }

    fn s(text: &str, deg: usize) -> NcSeries {
        NcSeries::parse(text, deg).unwrap()
    }

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn short_tables() {
        let t = HallTable::generate(3);
        assert_eq!(names(&t.listing(HallKind::B, 1)), ["b"]);
        assert_eq!(names(&t.listing(HallKind::B, 2)), ["ac"]);
        assert_eq!(names(&t.listing(HallKind::B, 3)), ["abc"]);
        assert_eq!(names(&t.listing(HallKind::C, 1)), ["c"]);
        assert_eq!(names(&t.listing(HallKind::C, 2)), ["bc"]);
        assert_eq!(names(&t.listing(HallKind::C, 3)), ["bbc", "acc"]);
        assert_eq!(names(&t.listing(HallKind::A, 3)), ["aac", "abb"]);
        assert_eq!(t.compare(w("bbc"), w("acc")), Some(Ordering::Greater));
    }

    #[test]
    fn length_four_and_five() {
        let t = HallTable::generate(5);
        assert_eq!(names(&t.listing(HallKind::C, 4)), ["bbbc", "bacc", "acbc"]);
        assert_eq!(names(&t.listing(HallKind::B, 5)), ["abbbc", "abacc", "aacbc"]);
        let e = t.entry(w("acbc")).unwrap();
        assert_eq!(e.rule, HallRule::Concatenated);
        assert_eq!(e.tail, vec![w("c"), w("bc")]);
        let e = t.entry(w("abcbc")).unwrap();
        assert_eq!(e.rule, HallRule::Odd);
        assert_eq!(e.tail, vec![w("bc"), w("bc")]);
        assert_eq!(names(&t.listing(HallKind::A, 4)), ["aabc", "abac", "abbb"]);
        assert_eq!(
            names(&t.listing(HallKind::A, 5)),
            ["aabbc", "aaacc", "ababc", "aacac", "abbac", "abbbb"]
        );
        assert_eq!(
            names(&t.listing(HallKind::C, 5)),
            ["bbbbc", "bbacc", "bacbc", "acbbc", "acacc", "abcbc"]
        );
    }

    #[test]
    fn global_order() {
        let t = HallTable::generate(3);
        let order: Vec<String> = t.ordered().iter().map(|h| h.word.to_string()).collect();
        assert_eq!(
            order,
            ["abb", "aac", "ab", "a", "abc", "ac", "b", "acc", "bbc", "bc", "c"]
        );
        let h = t.index_of(w("ac")).unwrap();
        assert_eq!((h.kind, h.rank), (HallKind::B, 5));
        assert!(t.index_of(w("ca")).is_none());
    }

    #[test]
    fn gamma_values() {
        let t = HallTable::generate(5);
        assert_eq!(t.gamma_b(w("b")).unwrap(), q(1));
        assert_eq!(t.gamma_b(w("ac")).unwrap(), q(-1));
        assert_eq!(t.gamma_b(w("abbc")).unwrap(), q(-4));
        assert_eq!(t.gamma_c(w("c")).unwrap(), q(1));
        assert_eq!(t.gamma_c(w("bc")).unwrap(), q(2));
        assert_eq!(t.gamma_c(w("acc")).unwrap(), q(-2));
        assert_eq!(t.gamma_a(&[]).unwrap(), q(1));
        assert_eq!(t.gamma_a(&[w("b")]).unwrap(), q(2));
        assert_eq!(t.gamma_a(&[w("b"), w("b")]).unwrap(), q(4));
        assert_eq!(t.gamma_a(&[w("ac")]).unwrap(), q(-2));
        assert!(matches!(t.gamma_b(w("bc")), Err(Error::Domain(_))));
        assert!(matches!(t.gamma_c(w("ca")), Err(Error::Domain(_))));
        assert!(matches!(t.gamma_b(w("abbbbbc")), Err(Error::Domain(_))));
        assert!(matches!(t.gamma_a(&[w("ac"), w("b")]), Err(Error::Domain(_))));
    }

    /// Brackets in sl(2) with `[a,b] = 2a`, `[a,c] = -b`, `[b,c] = 2c`, on
    /// coordinate vectors (a, b, c).
    fn bracket(x: [i64; 3], y: [i64; 3]) -> [i64; 3] {
        let ab = x[0] * y[1] - x[1] * y[0];
        let ac = x[0] * y[2] - x[2] * y[0];
        let bc = x[1] * y[2] - x[2] * y[1];
        [2 * ab, -ac, 2 * bc]
    }

    #[test]
    fn gammas_agree_with_bracket_oracle() {
        let a = [1, 0, 0];
        let b = [0, 1, 0];
        let c = [0, 0, 1];
        assert_eq!(bracket(b, c), [0, 0, 2]);
        assert_eq!(bracket(bracket(a, c), c), [0, 0, -2]);
        assert_eq!(bracket(a, b), [2, 0, 0]);
        assert_eq!(bracket(bracket(a, b), b), [4, 0, 0]);
        // every c-type word of length <= 6 through its generating bracket
        let t = HallTable::generate(6);
        let mut memo: FxHashMap<Word, [i64; 3]> = FxHashMap::default();
        fn eval(t: &HallTable, x: Word, memo: &mut FxHashMap<Word, [i64; 3]>) -> [i64; 3] {
            if let Some(v) = memo.get(&x) {
                return *v;
            }
            let e = t.entry(x).unwrap();
            let unit = |l: Letter| {
                let mut v = [0; 3];
                v[l.index()] = 1;
                v
            };
            let v = match e.rule {
                HallRule::Letter => unit(e.head),
                HallRule::APrefixed | HallRule::BPrefixed => bracket(unit(e.head), eval(t, e.tail[0], memo)),
                HallRule::Concatenated | HallRule::Odd => {
                    let left = bracket(unit(Letter::A), eval(t, e.tail[0], memo));
                    bracket(left, eval(t, e.tail[1], memo))
                }
                HallRule::AProduct => e
                    .tail
                    .iter()
                    .fold(unit(Letter::A), |acc, f| bracket(acc, eval(t, *f, memo))),
            };
            memo.insert(x, v);
            v
        }
        for n in 1..=6 {
            for e in t.entries(HallKind::C, n) {
                let v = eval(&t, e.word, &mut memo);
                assert_eq!([v[0], v[1]], [0, 0]);
                assert_eq!(q(v[2]), t.gamma_c(e.word).unwrap(), "{}", e.word);
            }
            for e in t.entries(HallKind::B, n) {
                let v = eval(&t, e.word, &mut memo);
                assert_eq!(q(v[1]), t.gamma_b(e.word).unwrap(), "{}", e.word);
            }
            for e in t.entries(HallKind::A, n) {
                let v = eval(&t, e.word, &mut memo);
                assert_eq!([v[1], v[2]], [0, 0]);
                assert_eq!(q(v[0]), t.gamma_a(&e.tail).unwrap(), "{}", e.word);
            }
        }
    }

    #[test]
    fn xi_examples() {
        let t = HallTable::generate(5);
        assert_eq!(*t.xi(w("abc")).unwrap(), s("abc", 5));
        assert_eq!(*t.xi(w("aacc")).unwrap(), s("aacc", 5));
        assert_eq!(*t.xi(w("acbc")).unwrap(), s("acbc + 2abcc", 5));
        assert_eq!(*t.xi(w("abcbc")).unwrap(), s("abcbc + 2abbcc", 5));
        assert!(t.xi(w("ca")).is_err());
    }

    #[test]
    fn main_series_both_routes() {
        let printed = "b - ac - 2abc - 4abbc + 2aacc - 8abbbc + 4aacbc + 8aabcc + 4abacc";
        assert_eq!(main_series_hall(2), s("b - ac", 2));
        assert_eq!(main_series_hall(4), s("b - ac - 2abc - 4abbc + 2aacc", 4));
        assert_eq!(main_series_hall(5), s(printed, 5));
        assert_eq!(main_series_fixpoint(1), s("b", 1));
        assert_eq!(main_series_fixpoint(2), s("b - ac", 2));
        assert_eq!(main_series_fixpoint(5), s(printed, 5));
        assert_eq!(main_series_hall(7), main_series_fixpoint(7));
    }

    #[test]
    fn z_series_small() {
        let z = z_series(2);
        assert_eq!(z.za, s("a + 2ab", 2));
        assert_eq!(z.zc, s("c + 2bc", 2));
        assert_eq!(z_a_hall(1), s("a", 1));
        assert_eq!(z_a_hall(2), s("a + 2ab", 2));
        let z3 = z_series(3);
        let b = NcSeries::letter(Letter::B, 3);
        let a = NcSeries::letter(Letter::A, 3);
        assert_eq!(b.sub(&a.concat_mul(&z3.zc)).truncate(3), z3.s);
        assert_eq!(z_series(6).za, z_a_hall(6));
        assert_eq!(z_series(6).zc, HallTable::generate(6).z_c(6));
    }

    #[test]
    fn degree_cap() {
        assert!(check_degree(12, false).is_ok());
        assert!(matches!(check_degree(13, false), Err(Error::DegreeCap { .. })));
        assert!(check_degree(13, true).is_ok());
        assert!(check_degree(0, true).is_err());
    }

    #[test]
    fn counting_and_shapes() {
        let t = HallTable::generate(9);
        for n in 2..=9 {
            assert_eq!(t.entries(HallKind::B, n).len(), t.entries(HallKind::C, n - 1).len());
            for e in t.entries(HallKind::B, n) {
                assert_eq!(e.word.first(), Some(Letter::A));
                assert_eq!(e.word.last(), Some(Letter::C));
            }
            for e in t.entries(HallKind::C, n) {
                assert_eq!(e.word.last(), Some(Letter::C));
            }
        }
    }

    #[test]
    fn json_dump() {
        let j = HallTableJson::from(&HallTable::generate(3));
        assert_eq!(j.c[2], ["bbc", "acc"]);
        assert_eq!(j.a[1], ["ab"]);
        let text = serde_json::to_string(&j).unwrap();
        assert_eq!(serde_json::from_str::<HallTableJson>(&text).unwrap(), j);
    }
}
