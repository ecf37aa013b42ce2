//! Shuffle product of single words.
//!
//! The product is computed by the right recursion
//!
//! ```text
//! (u·x) ⧢ (v·y) = (u ⧢ v·y)·x + (u·x ⧢ v)·y
//! ```
//!
//! memoized on the (unordered) word pair. Results are lists of
//! `(word, multiplicity)` sorted by word, so the two branches of the
//! recursion can be merged linearly.

use std::sync::{Arc, LazyLock};

use parking_lot::RwLock;
use rustc_hash::FxHashMap;

use crate::words::Word;

pub type ShuffleTerms = Arc<[(Word, u64)]>;

/// Pairs whose combined length exceeds this are computed but not cached;
/// the number of such pairs grows too fast for a table to pay off.
const MEMO_MAX_LEN: usize = 14;

static MEMO: LazyLock<RwLock<FxHashMap<(Word, Word), ShuffleTerms>>> =
    LazyLock::new(|| RwLock::new(FxHashMap::default()));

/// `x ⧢ y` as a sorted list of words with multiplicities.
pub fn shuffle_words(x: Word, y: Word) -> ShuffleTerms {
    if x.is_empty() {
        return Arc::from([(y, 1)]);
    }
    if y.is_empty() {
        return Arc::from([(x, 1)]);
    }
    let key = if x <= y { (x, y) } else { (y, x) };
    let cacheable = x.len() + y.len() <= MEMO_MAX_LEN;
    if cacheable {
        if let Some(hit) = MEMO.read().get(&key) {
            return hit.clone();
        }
    }

    let (x_init, x_last) = x.split_last().expect("nonempty");
    let (y_init, y_last) = y.split_last().expect("nonempty");
    let left = shuffle_words(x_init, y);
    let right = shuffle_words(x, y_init);
    let merged: ShuffleTerms = merge_appended(&left, x_last, &right, y_last).into();

    if cacheable {
        MEMO.write().entry(key).or_insert_with(|| merged.clone());
    }
    merged
}

fn merge_appended(
    left: &[(Word, u64)],
    lx: crate::words::Letter,
    right: &[(Word, u64)],
    ly: crate::words::Letter,
) -> Vec<(Word, u64)> {
    let mut out = Vec::with_capacity(left.len() + right.len());
    let mut li = left.iter().map(|&(w, m)| (w.push(lx), m)).peekable();
    let mut ri = right.iter().map(|&(w, m)| (w.push(ly), m)).peekable();
    loop {
        match (li.peek(), ri.peek()) {
            (Some(&(a, ma)), Some(&(b, mb))) => {
                if a < b {
                    out.push((a, ma));
                    li.next();
                } else if b < a {
                    out.push((b, mb));
                    ri.next();
                } else {
                    out.push((a, ma + mb));
                    li.next();
                    ri.next();
                }
            }
            (Some(_), None) => {
                out.extend(li);
                break;
            }
            (None, Some(_)) => {
                out.extend(ri);
                break;
            }
            (None, None) => break,
        }
    }
    out
}

/// Number of cached word pairs.
pub fn memo_len() -> usize {
    MEMO.read().len()
}

/// Drops every cached shuffle.
pub fn clear_memo() {
    MEMO.write().clear();
}
