//! Bounded game search: `∀` tries to force a win within a number of moves against every
//! sequence of `∃`'s minimal responses. When no win is found, complete plays are saturated
//! and read back as a candidate representation.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;

use rayon::prelude::*;

use crate::algebra::OrderedAlgebra;
use crate::error::{RelicError, Result};
use crate::relation::Relation;
use crate::repr::{verify_embedding, EmbeddingReport, Representation, Symbol};
use crate::space::StateSpace;

use super::network::{Game, GameState, Move, Network};
use super::structure::{Finite, Structure};

/// Qualifier attached to every non-representability verdict from the search.
pub const SEMANTICS: &str = "under minimal-response semantics";

/// `∀`'s winning strategy: a move, then one branch per minimal response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinTree<E> {
    pub mv: Move<E>,
    pub replies: Vec<Reply<E>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reply<E> {
    /// The response itself hands `∀` the win.
    Wins(String),
    Next(Arc<WinTree<E>>),
}

impl<E> WinTree<E> {
    /// Moves after the opening along the longest branch.
    pub fn height(&self) -> usize {
        let below = self
            .replies
            .iter()
            .map(|r| match r {
                Reply::Wins(_) => 0,
                Reply::Next(t) => t.height(),
            })
            .max()
            .unwrap_or(0);
        usize::from(!matches!(self.mv, Move::Init { .. })) + below
    }

    pub fn size(&self) -> usize {
        1 + self
            .replies
            .iter()
            .map(|r| match r {
                Reply::Wins(_) => 0,
                Reply::Next(t) => t.size(),
            })
            .sum::<usize>()
    }
}

impl<E: Clone + Ord + std::hash::Hash + std::fmt::Debug + Send + Sync> WinTree<E> {
    pub fn render<S: Structure<Elem = E>>(&self, game: &Game<'_, S>) -> String {
        let mut out = String::new();
        self.render_into(game, 0, &mut out);
        out
    }

    fn render_into<S: Structure<Elem = E>>(&self, game: &Game<'_, S>, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        let _ = writeln!(out, "{pad}{}", game.show_move(&self.mv));
        for (i, r) in self.replies.iter().enumerate() {
            match r {
                Reply::Wins(why) => {
                    let _ = writeln!(out, "{pad}  response {i}: forall wins ({why})");
                }
                Reply::Next(t) => {
                    let _ = writeln!(out, "{pad}  response {i}:");
                    t.render_into(game, indent + 2, out);
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum SearchVerdict<E> {
    NotRepresentable {
        /// Moves after the opening `∀` needs.
        depth: usize,
        tree: Arc<WinTree<E>>,
    },
    Unknown {
        reason: String,
        budget_exhausted: bool,
    },
}

#[derive(Debug, Clone)]
pub struct SearchOutcome<E> {
    pub verdict: SearchVerdict<E>,
    pub positions: u64,
}

struct Searcher<'a, 'g, S: Structure> {
    game: &'a Game<'g, S>,
    universe: &'a BTreeSet<S::Elem>,
    budget: u64,
    visited: &'a AtomicU64,
    exhausted: &'a AtomicBool,
}

type Memo<E> = HashMap<(GameState<E>, usize), Option<Arc<WinTree<E>>>>;

impl<S: Structure> Searcher<'_, '_, S> {
    /// A winning tree for `∀` of at most `left` moves from `st`, if one exists.
    fn win(&self, st: &GameState<S::Elem>, left: usize, memo: &mut Memo<S::Elem>) -> Option<Arc<WinTree<S::Elem>>> {
        if left == 0 || self.exhausted.load(Ordering::Relaxed) {
            return None;
        }
        let key = (st.clone(), left);
        if let Some(hit) = memo.get(&key) {
            return hit.clone();
        }
        if self.visited.fetch_add(1, Ordering::Relaxed) >= self.budget {
            self.exhausted.store(true, Ordering::Relaxed);
            return None;
        }
        let keep = |e: &S::Elem| self.universe.contains(e);
        let mut found = None;
        for m in self.game.nontrivial_moves(st, &keep) {
            if let Some(tree) = self.answer_all(st, &m, left - 1, memo) {
                found = Some(tree);
                break;
            }
        }
        memo.insert(key, found.clone());
        found
    }

    /// `∀` wins after `m` whatever minimal response `∃` picks, with `left` moves to spare.
    fn answer_all(&self, st: &GameState<S::Elem>, m: &Move<S::Elem>, left: usize, memo: &mut Memo<S::Elem>) -> Option<Arc<WinTree<S::Elem>>> {
        let mut replies = Vec::new();
        for r in self.game.minimal_responses(st, m) {
            match self.game.forall_win_reason(&r) {
                Some(why) => replies.push(Reply::Wins(why)),
                None => replies.push(Reply::Next(self.win(&r, left, memo)?)),
            }
        }
        Some(Arc::new(WinTree { mv: m.clone(), replies }))
    }
}

/// Openings `a ≰ b` over the universe, in element order.
fn openings<S: Structure>(s: &S, universe: &BTreeSet<S::Elem>) -> Vec<Move<S::Elem>> {
    let mut out = Vec::new();
    for a in universe {
        for b in universe {
            if !s.leq(a, b) {
                out.push(Move::Init { a: a.clone(), b: b.clone() });
            }
        }
    }
    out
}

/// Look for a `∀` win of at most `depth` moves after the opening, where `∀` only names
/// elements of `universe`. Shallower wins are preferred; among openings the first in
/// element order wins.
pub fn bounded_search<S: Structure>(game: &Game<'_, S>, universe: &BTreeSet<S::Elem>, depth: usize, budget: u64) -> SearchOutcome<S::Elem> {
    let visited = AtomicU64::new(0);
    let exhausted = AtomicBool::new(false);
    let searcher = Searcher {
        game,
        universe,
        budget,
        visited: &visited,
        exhausted: &exhausted,
    };
    let empty = GameState {
        net: Network::empty(),
        goal: None,
    };
    let opens = openings(game.s, universe);
    for d in 1..=depth {
        let hit = opens.par_iter().find_map_first(|m| searcher.answer_all(&empty, m, d, &mut Memo::new()));
        if let Some(tree) = hit {
            return SearchOutcome {
                verdict: SearchVerdict::NotRepresentable { depth: d, tree },
                positions: visited.load(Ordering::Relaxed),
            };
        }
        if exhausted.load(Ordering::Relaxed) {
            break;
        }
    }
    let budget_exhausted = exhausted.load(Ordering::Relaxed);
    let reason = if depth == 0 {
        "depth 0 allows no moves after the opening".to_string()
    } else if budget_exhausted {
        format!("budget of {budget} positions exhausted before depth {depth} was settled")
    } else {
        format!("no forced win within {depth} moves after the opening")
    };
    SearchOutcome {
        verdict: SearchVerdict::Unknown { reason, budget_exhausted },
        positions: visited.load(Ordering::Relaxed),
    }
}

/// Play `∀`'s first non-trivial move until none is left, backtracking over `∃`'s minimal
/// responses; the first complete play that `∃` survives.
pub fn saturate<S: Structure>(game: &Game<'_, S>, opening: &Move<S::Elem>, max_moves: usize, budget: &AtomicU64) -> Option<GameState<S::Elem>> {
    fn go<S: Structure>(game: &Game<'_, S>, st: &GameState<S::Elem>, left: usize, budget: &AtomicU64) -> Option<GameState<S::Elem>> {
        if game.forall_win_reason(st).is_some() {
            return None;
        }
        if budget.fetch_update(Ordering::Relaxed, Ordering::Relaxed, |b| b.checked_sub(1)).is_err() {
            return None;
        }
        let moves = game.nontrivial_moves(st, &|_| true);
        let Some(m) = moves.first() else {
            return Some(st.clone());
        };
        if left == 0 {
            return None;
        }
        game.minimal_responses(st, m)
            .iter()
            .find_map(|r| go(game, r, left - 1, budget))
    }
    let empty = GameState {
        net: Network::empty(),
        goal: None,
    };
    game.minimal_responses(&empty, opening)
        .iter()
        .find_map(|r| go(game, r, max_moves, budget))
}

/// `θ(a) = {(x,y) : a ∈ N(x,y)}` over the disjoint union of the plays.
pub fn theta(alg: &OrderedAlgebra, plays: &[GameState<usize>], with_identity: bool) -> Result<Representation> {
    let total: usize = plays.iter().map(|p| p.net.nodes).sum();
    let base: Arc<StateSpace> = StateSpace::numbered(total, false)?;
    let mut images = vec![Relation::empty(&base); alg.size()];
    let mut offset = 0;
    for p in plays {
        for (&(x, y), label) in &p.net.labels {
            for &a in label {
                images[a].insert(offset + x, offset + y);
            }
        }
        offset += p.net.nodes;
    }
    let mut signature = vec![Symbol::Demonic, Symbol::Inclusion];
    if with_identity && alg.identity().is_some() {
        signature.push(Symbol::Identity);
    }
    Ok(Representation {
        source: alg.clone(),
        base,
        images,
        signature,
    })
}

/// A saturated family of plays and the map read off them.
#[derive(Debug, Clone)]
pub struct Saturation {
    pub plays: usize,
    pub nodes: usize,
    pub representation: Representation,
    pub report: EmbeddingReport,
}

#[derive(Debug, Clone)]
pub struct AlgebraSearch {
    pub outcome: SearchOutcome<usize>,
    /// Present when the search found no win and every opening saturated.
    pub saturation: Option<Saturation>,
    pub saturation_note: Option<String>,
}

/// Moves a saturating play may take before it is abandoned.
const SATURATION_MOVES: usize = 48;

/// Game-based search on a finite ordered semigroup: a forced `∀` win within `depth`
/// moves, or else a saturated family of plays checked as a representation.
pub fn bounded_nonrep_search(alg: &OrderedAlgebra, depth: usize, with_identity: bool, budget: u64) -> Result<AlgebraSearch> {
    let finite = Finite::new(alg.clone())?;
    let game = Game::new(&finite, with_identity)?;
    let universe: BTreeSet<usize> = (0..alg.size()).collect();
    let outcome = bounded_search(&game, &universe, depth, budget);
    let mut result = AlgebraSearch {
        outcome,
        saturation: None,
        saturation_note: None,
    };
    if matches!(result.outcome.verdict, SearchVerdict::NotRepresentable { .. }) {
        return Ok(result);
    }
    let left = AtomicU64::new(budget);
    let mut plays = Vec::new();
    for opening in openings(&finite, &universe) {
        match saturate(&game, &opening, SATURATION_MOVES, &left) {
            Some(p) => plays.push(p),
            None => {
                result.saturation_note = Some(format!("no saturated play found after {}", game.show_move(&opening)));
                return Ok(result);
            }
        }
    }
    let nodes: usize = plays.iter().map(|p| p.net.nodes).sum();
    if nodes > 64 {
        result.saturation_note = Some(format!("saturated plays use {nodes} nodes, more than a relation base holds"));
        return Ok(result);
    }
    let representation = theta(alg, &plays, with_identity)?;
    let report = verify_embedding(&representation)?;
    result.saturation = Some(Saturation {
        plays: plays.len(),
        nodes,
        representation,
        report,
    });
    Ok(result)
}

/// Parse a universe of elements for [`bounded_search`], comma or space separated.
pub fn parse_universe<S: Structure>(s: &S, text: &str) -> Result<BTreeSet<S::Elem>> {
    let out: BTreeSet<S::Elem> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|w| !w.is_empty())
        .map(|w| s.parse_elem(w))
        .collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(RelicError::Invalid("the universe is empty".into()));
    }
    Ok(out)
}
