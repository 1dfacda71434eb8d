//! `∀`'s scripted win on `A_n` in `n + 2` moves after the opening:
//! open with `s_0t ≰ s_nt`, force the `s_0` witness, offer the `s_n·t` choice, climb
//! `s_1 … s_{n-1}` by witness moves and finish with a demonic move into the rejection node.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use super::an::{s, An, Word, T};
use super::network::{Game, GameState, Move};
use super::structure::Structure;

/// Where the script stands: how many moves it has made and the nodes it has pinned down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptPlayer {
    pub n: usize,
    step: usize,
    x0: usize,
    /// `y_0` is the witness node of the first round; `y_i` the node added for `s_i`.
    ys: Vec<usize>,
    /// The node `∃` added when rejecting the choice move.
    reject: usize,
}

impl ScriptPlayer {
    pub fn new(n: usize) -> ScriptPlayer {
        ScriptPlayer {
            n,
            step: 0,
            x0: 0,
            ys: Vec::new(),
            reject: 0,
        }
    }

    /// Moves after the opening.
    pub fn length(&self) -> usize {
        self.n + 2
    }

    fn word(c: &[u8]) -> Word {
        Word(c.to_vec())
    }

    fn first_node(st: &GameState<Word>, pred: impl Fn(usize) -> bool) -> Result<usize, String> {
        (0..st.net.nodes).find(|&z| pred(z)).ok_or_else(|| "no node plays the expected role".to_string())
    }

    /// The next move given the position after `∃`'s last response, or `None` once the script
    /// is exhausted. Roles are resolved against the response as the least fitting node.
    pub fn next_move(&mut self, game: &Game<'_, An>, st: &GameState<Word>) -> Result<Option<Move<Word>>, String> {
        let n = self.n;
        let net = &st.net;
        let (t, sn) = (Self::word(&[T]), Self::word(&[s(n)]));
        let step = self.step;
        let m = if step == 0 {
            Move::Init {
                a: Self::word(&[s(0), T]),
                b: Self::word(&[s(n), T]),
            }
        } else if step > n + 2 {
            return Ok(None);
        } else {
            let goal = st.goal.as_ref().ok_or("the opening has not been answered")?;
            let x0 = goal.x0;
            match step {
                1 => {
                    self.x0 = x0;
                    Move::Witness { x: x0, y: goal.y0, a: Self::word(&[s(0)]), b: t }
                }
                2 => {
                    let s0 = Self::word(&[s(0)]);
                    let one = Self::first_node(st, |z| net.has(x0, z, &s0) && net.has(z, goal.y0, &t))?;
                    self.ys = vec![one];
                    Move::Choice { x: x0, y: goal.y0, z: one, a: sn, b: t }
                }
                _ => {
                    let id = game.s.identity();
                    if step == 3 {
                        self.reject = Self::first_node(st, |w| net.has(x0, w, &sn) && net.forb[w].contains(&t, id.as_ref()))?;
                    } else {
                        // Step k answered the witness move for s_{k-3}.
                        let i = step - 3;
                        let si = Self::word(&[s(i)]);
                        let prev = self.ys[i - 1];
                        let y = Self::first_node(st, |z| net.has(x0, z, &si) && net.has(z, prev, &t))?;
                        self.ys.push(y);
                    }
                    let i = step - 2;
                    let last = *self.ys.last().expect("y_0 is set");
                    if i < n {
                        Move::Witness { x: x0, y: last, a: Self::word(&[s(i)]), b: t }
                    } else {
                        Move::Demonic { x: x0, y: last, z: self.reject, a: sn.clone(), a_plus: sn, b: t }
                    }
                }
            }
        };
        self.step += 1;
        Ok(Some(m))
    }
}

/// The minimax over `∃`'s minimal responses against the script.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScriptOutcome {
    /// Every leaf is a `∀` win and the budget held.
    pub proven: bool,
    /// Positions visited, the root included.
    pub positions: u64,
    /// Finished plays, each a `∀` win when `proven`.
    pub leaves: u64,
    /// Most moves after the opening in any play.
    pub longest: usize,
    /// The first play (in response order) where the script did not win.
    pub failure: Option<ScriptFailure>,
    pub budget_exhausted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptFailure {
    /// Each move with the index of the minimal response `∃` chose.
    pub play: Vec<(Move<Word>, usize)>,
    pub reason: String,
}

struct Walk<'a, 'g> {
    game: &'a Game<'g, An>,
    budget: u64,
    visited: AtomicU64,
}

impl Walk<'_, '_> {
    fn explore(&self, st: &GameState<Word>, player: &ScriptPlayer, depth: usize, path: &mut Vec<(Move<Word>, usize)>) -> ScriptOutcome {
        let fail = |path: &Vec<(Move<Word>, usize)>, reason: String| ScriptOutcome {
            positions: 1,
            leaves: 1,
            longest: depth,
            failure: Some(ScriptFailure { play: path.clone(), reason }),
            ..Default::default()
        };
        if self.visited.fetch_add(1, Ordering::Relaxed) >= self.budget {
            return ScriptOutcome {
                positions: 1,
                budget_exhausted: true,
                ..Default::default()
            };
        }
        if st.goal.is_some() && self.game.forall_win_reason(st).is_some() {
            return ScriptOutcome {
                proven: true,
                positions: 1,
                leaves: 1,
                longest: depth,
                ..Default::default()
            };
        }
        let mut player = player.clone();
        let m = match player.next_move(self.game, st) {
            Ok(Some(m)) => m,
            Ok(None) => return fail(path, "the script ran out of moves and ∃ survived".into()),
            Err(e) => return fail(path, format!("script stuck: {e}")),
        };
        if let Err(e) = self.game.playable(st, &m) {
            return fail(path, format!("scripted move {} is not playable: {e}", self.game.show_move(&m)));
        }
        let responses = self.game.minimal_responses(st, &m);
        let next_depth = depth + usize::from(!matches!(m, Move::Init { .. }));
        let children: Vec<ScriptOutcome> = responses
            .par_iter()
            .enumerate()
            .map(|(i, r)| {
                let mut path = path.clone();
                path.push((m.clone(), i));
                let v = self.game.apply_move(st, &m, r);
                if !v.legal {
                    return fail(&path, format!("minimal response {i} is illegal: {}", v.reason.unwrap_or_default()));
                }
                self.explore(r, &player, next_depth, &mut path)
            })
            .collect();
        let mut out = ScriptOutcome {
            proven: !children.is_empty(),
            positions: 1,
            ..Default::default()
        };
        for c in children {
            out.proven &= c.proven;
            out.positions += c.positions;
            out.leaves += c.leaves;
            out.longest = out.longest.max(c.longest);
            out.budget_exhausted |= c.budget_exhausted;
            if out.failure.is_none() {
                out.failure = c.failure;
            }
        }
        out.proven &= !out.budget_exhausted;
        out
    }
}

/// Play the script against every sequence of minimal responses on `A_n`.
pub fn script_minimax(an: &An, with_identity: bool, budget: u64) -> ScriptOutcome {
    let game = Game {
        s: an,
        with_identity,
    };
    let walk = Walk {
        game: &game,
        budget,
        visited: AtomicU64::new(0),
    };
    let empty = GameState {
        net: super::network::Network::empty(),
        goal: None,
    };
    walk.explore(&empty, &ScriptPlayer::new(an.n), 0, &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn script_wins_for_small_n() {
        for n in 1..=3 {
            let an = An::new(n).unwrap();
            let out = script_minimax(&an, true, 1 << 30);
            assert!(out.proven, "n={n}: {:?}", out.failure);
            assert_eq!(out.longest, n + 2);
            assert!(out.leaves >= 2);
        }
    }

    #[test]
    fn script_also_wins_without_identity() {
        let an = An::new(2).unwrap();
        assert!(script_minimax(&an, false, 1 << 30).proven);
    }

    #[test]
    fn tiny_budget_is_inconclusive() {
        let an = An::new(3).unwrap();
        let out = script_minimax(&an, true, 3);
        assert!(out.budget_exhausted && !out.proven);
    }

    #[test]
    fn script_opening_matches_the_known_play() {
        let an = An::new(3).unwrap();
        let game = Game::new(&an, true).unwrap();
        let mut p = ScriptPlayer::new(3);
        let empty = GameState { net: super::super::network::Network::empty(), goal: None };
        let init = p.next_move(&game, &empty).unwrap().unwrap();
        assert_eq!(game.show_move(&init), "init s0t s3t");
        let n0 = game.minimal_responses(&empty, &init).pop().unwrap();
        let w = p.next_move(&game, &n0).unwrap().unwrap();
        assert_eq!(game.show_move(&w), "witness 0 1 s0 t");
        let n1 = game.minimal_responses(&n0, &w).pop().unwrap();
        let c = p.next_move(&game, &n1).unwrap().unwrap();
        assert_eq!(game.show_move(&c), "choice 0 1 2 s3 t");
    }
}
