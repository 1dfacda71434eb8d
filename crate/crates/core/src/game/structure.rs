use std::fmt::Debug;
use std::hash::Hash;

use crate::algebra::{ClassTag, OrderedAlgebra};
use crate::error::{RelicError, Result};

use super::an::{An, Word};

/// What the game needs from an ordered structure `(A, ≤, ∗)` with a total product.
pub trait Structure: Sync {
    type Elem: Clone + Ord + Hash + Debug + Send + Sync;

    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// `a^↑`, sorted.
    fn up(&self, a: &Self::Elem) -> Vec<Self::Elem>;
    /// Every element below `a`, sorted.
    fn down(&self, a: &Self::Elem) -> Vec<Self::Elem>;
    /// Every `(a, b)` with `a ∗ b = c`.
    fn splits(&self, c: &Self::Elem) -> Vec<(Self::Elem, Self::Elem)>;
    fn identity(&self) -> Option<Self::Elem>;
    fn show(&self, a: &Self::Elem) -> String;
    fn parse_elem(&self, text: &str) -> Result<Self::Elem>;
}

impl Structure for An {
    type Elem = Word;

    fn leq(&self, a: &Word, b: &Word) -> bool {
        An::leq(self, a, b)
    }

    fn mul(&self, a: &Word, b: &Word) -> Word {
        a.concat(b)
    }

    fn up(&self, a: &Word) -> Vec<Word> {
        self.upclose(a)
    }

    fn down(&self, a: &Word) -> Vec<Word> {
        self.downclose(a)
    }

    fn splits(&self, c: &Word) -> Vec<(Word, Word)> {
        An::splits(self, c)
    }

    fn identity(&self) -> Option<Word> {
        Some(Word::EMPTY)
    }

    fn show(&self, a: &Word) -> String {
        a.to_string()
    }

    fn parse_elem(&self, text: &str) -> Result<Word> {
        self.parse_word(text)
    }
}

/// A finite ordered semigroup played over its element indices.
#[derive(Debug, Clone)]
pub struct Finite {
    pub algebra: OrderedAlgebra,
}

impl Finite {
    pub fn new(algebra: OrderedAlgebra) -> Result<Finite> {
        let report = algebra.check_class(ClassTag::OrderedSemigroup);
        if !report.is_member() {
            return Err(RelicError::Invalid(format!(
                "the game needs an ordered semigroup:\n{}",
                report.render(&algebra)
            )));
        }
        Ok(Finite { algebra })
    }
}

impl Structure for Finite {
    type Elem = usize;

    fn leq(&self, a: &usize, b: &usize) -> bool {
        self.algebra.leq(*a, *b)
    }

    fn mul(&self, a: &usize, b: &usize) -> usize {
        self.algebra.mul(*a, *b).expect("ordered semigroups have total products")
    }

    fn up(&self, a: &usize) -> Vec<usize> {
        (0..self.algebra.size()).filter(|&b| self.algebra.leq(*a, b)).collect()
    }

    fn down(&self, a: &usize) -> Vec<usize> {
        (0..self.algebra.size()).filter(|&b| self.algebra.leq(b, *a)).collect()
    }

    fn splits(&self, c: &usize) -> Vec<(usize, usize)> {
        let n = self.algebra.size();
        (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| self.algebra.mul(a, b) == Some(*c))
            .collect()
    }

    fn identity(&self) -> Option<usize> {
        self.algebra.identity()
    }

    fn show(&self, a: &usize) -> String {
        self.algebra.name(*a).to_string()
    }

    fn parse_elem(&self, text: &str) -> Result<usize> {
        self.algebra
            .index_of(text.trim())
            .ok_or_else(|| RelicError::UnknownName(text.trim().to_string()))
    }
}
