//! The word structures `A_n = (Σ*, ≤, concatenation, Λ)` over `Σ = {t, s_0, …, s_n}`.
//!
//! The strict order rewrites the last character once: `ασ < ασ⁺` for
//! `(σ, σ⁺) ∈ L = {(s_0, s_n)} ∪ {(s_i, s_{i+1}t) : i < n}`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{RelicError, Result};

/// A character: `0` is `t`, `i + 1` is `s_i`.
pub type Char = u8;

pub const T: Char = 0;

pub fn s(i: usize) -> Char {
    (i + 1) as Char
}

/// A word, ordered shortlex so enumeration order is stable and short words come first.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Char>);

impl Word {
    pub const EMPTY: Word = Word(Vec::new());

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn single(c: Char) -> Word {
        Word(vec![c])
    }

    /// `Some(i)` when the word is the single character `s_i`.
    pub fn as_s(&self) -> Option<usize> {
        match self.0.as_slice() {
            [c] if *c != T => Some(*c as usize - 1),
            _ => None,
        }
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("Λ");
        }
        for &c in &self.0 {
            if c == T {
                f.write_str("t")?;
            } else {
                write!(f, "s{}", c - 1)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderReport {
    pub n: usize,
    pub max_len: usize,
    pub words: usize,
    pub comparisons: u64,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct An {
    pub n: usize,
}

impl An {
    pub fn new(n: usize) -> Result<An> {
        if n == 0 || n > 200 {
            return Err(RelicError::Invalid(format!("A_n needs 1 <= n <= 200, got {n}")));
        }
        Ok(An { n })
    }

    pub fn alphabet(&self) -> Vec<Char> {
        (0..=self.n as Char + 1).collect()
    }

    /// Successors of a single character under `L`.
    fn successors(&self, c: Char) -> Vec<Word> {
        if c == T {
            return Vec::new();
        }
        let i = c as usize - 1;
        let mut out = Vec::new();
        if i == 0 {
            out.push(Word::single(s(self.n)));
        }
        if i < self.n {
            out.push(Word(vec![s(i + 1), T]));
        }
        out
    }

    /// `w^↑`: the word and every one-step rewrite of its last character.
    pub fn upclose(&self, w: &Word) -> Vec<Word> {
        let mut out = vec![w.clone()];
        if let Some((&last, prefix)) = w.0.split_last() {
            for succ in self.successors(last) {
                out.push(Word(prefix.to_vec()).concat(&succ));
            }
        }
        out.sort();
        out
    }

    pub fn lt(&self, a: &Word, b: &Word) -> bool {
        a != b && self.upclose(a).contains(b)
    }

    pub fn leq(&self, a: &Word, b: &Word) -> bool {
        a == b || self.lt(a, b)
    }

    /// Every `a ≤ w`: the word and its predecessor, if any.
    pub fn downclose(&self, w: &Word) -> Vec<Word> {
        let mut out = vec![w.clone()];
        let v = &w.0;
        let k = v.len();
        if k >= 1 && v[k - 1] == s(self.n) {
            out.push(Word([&v[..k - 1], &[s(0)]].concat()));
        }
        if k >= 2 && v[k - 1] == T && v[k - 2] != T && v[k - 2] != s(0) {
            let i = v[k - 2] as usize - 1;
            out.push(Word([&v[..k - 2], &[s(i - 1)]].concat()));
        }
        out.sort();
        out
    }

    pub fn splits(&self, w: &Word) -> Vec<(Word, Word)> {
        (0..=w.len()).map(|k| (Word(w.0[..k].to_vec()), Word(w.0[k..].to_vec()))).collect()
    }

    /// Every word of length at most `max_len`, shortlex.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Word> {
        let alpha = self.alphabet();
        let mut out = vec![Word::EMPTY];
        let mut layer = vec![Word::EMPTY];
        for _ in 0..max_len {
            let mut next = Vec::with_capacity(layer.len() * alpha.len());
            for w in &layer {
                for &c in &alpha {
                    next.push(w.concat(&Word::single(c)));
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    /// Check the order facts over every word of length at most `max_len`: `≤` is a partial
    /// order, there is no chain `a < b < c`, each word has at most one strict predecessor,
    /// `|w^↑| ≤ 3`, and `αβ ≥ α` forces `β = Λ`.
    pub fn check_order_properties(&self, max_len: usize) -> OrderReport {
        let words = self.words_up_to(max_len);
        let mut violations = Vec::new();
        let mut preds: HashMap<&Word, usize> = HashMap::new();
        let mut comparisons = 0u64;
        for a in &words {
            let up = self.upclose(a);
            if up.len() > 3 {
                violations.push(format!("|{a}^↑| = {}", up.len()));
            }
            for b in up.iter().filter(|b| *b != a) {
                comparisons += 1;
                if self.leq(b, a) {
                    violations.push(format!("antisymmetry: {a} ≤ {b} ≤ {a}"));
                }
                if let Some(c) = self.upclose(b).into_iter().find(|c| c != b) {
                    violations.push(format!("3-chain: {a} < {b} < {c}"));
                }
                if let Some(k) = words.binary_search_by(|w| w.cmp(b)).ok().map(|i| &words[i]) {
                    *preds.entry(k).or_default() += 1;
                }
            }
            for (alpha, beta) in self.splits(a) {
                comparisons += 1;
                if !beta.is_empty() && self.leq(&alpha, a) {
                    violations.push(format!("{alpha}·{beta} ≥ {alpha} with a non-empty suffix"));
                }
            }
        }
        for (w, k) in preds {
            if k > 1 {
                violations.push(format!("{w} has {k} strict predecessors"));
            }
        }
        violations.sort();
        OrderReport {
            n: self.n,
            max_len,
            words: words.len(),
            comparisons,
            violations,
        }
    }

    /// Parse `s0t`, `s3`, `tt`; `Λ` or `1'` is the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text == "Λ" || text == "1'" {
            return Ok(Word::EMPTY);
        }
        let bytes = text.as_bytes();
        let mut out = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            match bytes[i] {
                b't' => {
                    out.push(T);
                    i += 1;
                }
                b's' => {
                    let start = i + 1;
                    let mut j = start;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    let idx: usize = text[start..j]
                        .parse()
                        .map_err(|_| RelicError::Invalid(format!("bad character in word `{text}` at {i}")))?;
                    if idx > self.n {
                        return Err(RelicError::Invalid(format!("s{idx} is outside the alphabet of A_{}", self.n)));
                    }
                    out.push(s(idx));
                    i = j;
                }
                _ => return Err(RelicError::Invalid(format!("bad character in word `{text}` at {i}"))),
            }
        }
        Ok(Word(out))
    }
}
