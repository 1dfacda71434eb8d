//! `∃`'s survival strategy on `A_n`: every response is the network determined by a grid
//! `(D, T, f)`, a partial reflexive word labelling with terminal nodes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::an::{s, An, Word, T};
use super::network::{Forb, Game, GameState, Goal, Move, Network};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Grid {
    pub nodes: usize,
    pub terminals: BTreeSet<usize>,
    pub f: BTreeMap<(usize, usize), Word>,
}

/// Why the grid strategy could not answer a move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GridFailure {
    /// The strategy is only claimed for rounds `1..=n-2`.
    OutOfContract { round: usize, last: usize },
    /// A non-trivial move of a shape the strategy has no answer for.
    Stuck(String),
}

impl fmt::Display for GridFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridFailure::OutOfContract { round, last } => {
                write!(f, "round {round} is outside the strategy's range (last round {last})")
            }
            GridFailure::Stuck(why) => write!(f, "no grid response: {why}"),
        }
    }
}

impl Grid {
    /// `D = {0..p}`, `f(i,j) = a[i..j]` for `i ≤ j`, no terminals.
    pub fn initial(a: &Word) -> Grid {
        let p = a.len();
        let mut f = BTreeMap::new();
        for i in 0..=p {
            for j in i..=p {
                f.insert((i, j), Word(a.0[i..j].to_vec()));
            }
        }
        Grid {
            nodes: p + 1,
            terminals: BTreeSet::new(),
            f,
        }
    }

    pub fn get(&self, x: usize, y: usize) -> Option<&Word> {
        self.f.get(&(x, y))
    }

    fn is(&self, x: usize, y: usize, w: &Word) -> bool {
        self.get(x, y) == Some(w)
    }

    /// `N_{D,T,f}`: labels `f(x,y)^↑`, `Forb(w) = Σ⁺` on terminals.
    pub fn network(&self, an: &An) -> Network<Word> {
        let labels = self.f.iter().map(|(&k, w)| (k, an.upclose(w).into_iter().collect())).collect();
        let forb = (0..self.nodes)
            .map(|w| Forb {
                elems: BTreeSet::new(),
                all_but_identity: self.terminals.contains(&w),
            })
            .collect();
        Network {
            nodes: self.nodes,
            labels,
            forb,
        }
    }

    fn add_node(&mut self, terminal: bool) -> usize {
        let v = self.nodes;
        self.nodes += 1;
        self.f.insert((v, v), Word::EMPTY);
        if terminal {
            self.terminals.insert(v);
        }
        v
    }

    /// For every `u` with `f(u,x)` defined, set `f(u,v) = f(u,x)·suffix`.
    fn extend_through(&mut self, x: usize, v: usize, suffix: &Word) {
        let sources: Vec<(usize, Word)> = self
            .f
            .iter()
            .filter(|(&(u, x2), _)| x2 == x && u != v)
            .map(|(&(u, _), w)| (u, w.clone()))
            .collect();
        for (u, w) in sources {
            self.f.insert((u, v), w.concat(suffix));
        }
    }

    /// The node `x` with `f(x', x) = γ` and `f(x, y) = last`.
    fn split_node(&self, x_prime: usize, y: usize, gamma: &Word, last: &Word) -> Option<usize> {
        (0..self.nodes).find(|&x| self.is(x_prime, x, gamma) && self.is(x, y, last))
    }

    /// Grid conditions (i)–(iv) and hypotheses (2)–(4) at round `k`, one message per failure.
    pub fn violations(&self, n: usize, k: usize) -> Vec<String> {
        let an = An { n };
        let mut out = Vec::new();
        let nodes = 0..self.nodes;
        for x in nodes.clone() {
            if !self.is(x, x, &Word::EMPTY) {
                out.push(format!("(i) f({x},{x}) is not Λ"));
            }
        }
        for (&(x, y), w) in &self.f {
            if x >= self.nodes || y >= self.nodes {
                out.push(format!("f({x},{y}) on an unknown node"));
                continue;
            }
            if x != y && w.is_empty() {
                out.push(format!("(i) f({x},{y}) = Λ for distinct nodes"));
            }
            for (alpha, beta) in an.splits(w) {
                if !nodes.clone().any(|z| self.is(x, z, &alpha) && self.is(z, y, &beta)) {
                    out.push(format!("(iii) no node splits f({x},{y}) = {w} as {alpha}·{beta}"));
                }
            }
            if x != y && self.terminals.contains(&x) {
                out.push(format!("(iv) terminal {x} has an edge to {y}"));
            }
        }
        for (&(x, y), fxy) in &self.f {
            for (&(_, z), fyz) in self.f.range((y, 0)..(y + 1, 0)) {
                match self.get(x, z) {
                    Some(fxz) => {
                        if !an.leq(fxz, &fxy.concat(fyz)) {
                            out.push(format!("(ii) f({x},{y})f({y},{z}) = {} is not above f({x},{z}) = {fxz}", fxy.concat(fyz)));
                        }
                    }
                    None => {
                        if *fxy != Word::single(T) {
                            out.push(format!("(2) ({x},{z}) undefined but f({x},{y}) = {fxy} is not t"));
                        }
                    }
                }
            }
        }
        // (3): f(x,z) ≤ f(x,w) and some y with (x,y), (w,y) defined, f(w,y) ≠ Λ, forces z = w.
        for x in nodes.clone() {
            let row: Vec<(usize, &Word)> = self.f.range((x, 0)..(x + 1, 0)).map(|(&(_, y), w)| (y, w)).collect();
            for &(w, fxw) in &row {
                let has_y = row
                    .iter()
                    .any(|&(y, _)| self.get(w, y).is_some_and(|fwy| !fwy.is_empty()));
                if !has_y {
                    continue;
                }
                for &(z, fxz) in &row {
                    if z != w && an.leq(fxz, fxw) {
                        out.push(format!("(3) f({x},{z}) = {fxz} <= f({x},{w}) = {fxw} with {z} != {w}"));
                    }
                }
            }
            // (4): s_i-labelled edges out of x.
            let singles: Vec<(usize, usize)> = row.iter().filter_map(|&(y, w)| w.as_s().map(|i| (i, y))).collect();
            for &(i, y) in &singles {
                for &(j, z) in &singles {
                    if i == j && y != z {
                        out.push(format!("(4) f({x},{y}) = f({x},{z}) = s{i}"));
                    }
                    if i < j {
                        let near = j - i <= k
                            && nodes.clone().any(|w| self.is(x, w, &Word::single(s(i + 1))) && self.is(w, y, &Word::single(T)));
                        let far = j == n
                            && self.terminals.contains(&z)
                            && nodes.clone().any(|v| self.is(x, v, &Word::single(s(0))));
                        if !near && !far {
                            out.push(format!("(4) f({x},{y}) = s{i}, f({x},{z}) = s{j} with neither alternative at round {k}"));
                        }
                    }
                }
            }
        }
        out
    }
}

/// `∃` playing the grid strategy on `A_n`, tracking the round number.
#[derive(Debug, Clone)]
pub struct GridPlayer {
    pub n: usize,
    pub grid: Option<Grid>,
    pub round: usize,
}

impl GridPlayer {
    pub fn new(n: usize) -> GridPlayer {
        GridPlayer { n, grid: None, round: 0 }
    }

    /// The last round the strategy is claimed to survive.
    pub fn last_round(&self) -> usize {
        self.n.saturating_sub(2)
    }

    pub fn respond(&mut self, game: &Game<'_, An>, st: &GameState<Word>, m: &Move<Word>) -> Result<GameState<Word>, GridFailure> {
        let an = game.s;
        if let Move::Init { a, b } = m {
            let g = Grid::initial(a);
            let next = GameState {
                net: g.network(an),
                goal: Some(Goal {
                    x0: 0,
                    y0: a.len(),
                    b0: b.clone(),
                }),
            };
            self.grid = Some(g);
            self.round = 0;
            return Ok(next);
        }
        let grid = self
            .grid
            .as_mut()
            .ok_or_else(|| GridFailure::Stuck("the game has not been opened".into()))?;
        self.round += 1;
        if self.round > self.n.saturating_sub(2) {
            return Err(GridFailure::OutOfContract {
                round: self.round,
                last: self.n.saturating_sub(2),
            });
        }
        if game.is_trivial(st, m) {
            return Ok(st.clone());
        }
        let n = self.n;
        let stuck = |why: String| GridFailure::Stuck(why);
        match m {
            Move::Init { .. } => unreachable!(),
            Move::Demonic { .. } => return Err(stuck(format!("non-trivial demonic move {}", game.show_move(m)))),
            Move::Witness { x: xp, y, a, b } => {
                // Only α = γs_{i+1}, β = t over f(x',y) = γs_i is non-trivial.
                let fxy = grid.get(*xp, *y).cloned().ok_or_else(|| stuck(format!("f({xp},{y}) undefined")))?;
                let (gamma, i) = last_s(&fxy).ok_or_else(|| stuck(format!("f({xp},{y}) = {fxy} does not end in some s_i")))?;
                if *b != Word::single(T) || i >= n || *a != gamma.concat(&Word::single(s(i + 1))) {
                    return Err(stuck(format!("unexpected witness split {a}·{b} of {fxy}")));
                }
                let x = grid
                    .split_node(*xp, *y, &gamma, &Word::single(s(i)))
                    .ok_or_else(|| stuck(format!("no node splits f({xp},{y}) = {fxy}")))?;
                if let Some(z) = (0..grid.nodes).find(|&z| grid.is(x, z, &Word::single(s(i + 1)))) {
                    return Err(stuck(format!("f({x},{z}) = s{} already exists", i + 1)));
                }
                let v = grid.add_node(false);
                grid.extend_through(x, v, &Word::single(s(i + 1)));
                grid.f.insert((v, *y), Word::single(T));
            }
            Move::Choice { x: xp, y, z, a: alpha, .. } => {
                let fxz = grid.get(*xp, *z).cloned().ok_or_else(|| stuck(format!("f({xp},{z}) undefined")))?;
                if *alpha == fxz {
                    if fxz != Word::single(T) || grid.get(*xp, *y).is_some() {
                        return Err(stuck(format!("unexpected choice over f({xp},{z}) = {fxz}")));
                    }
                    let w = grid.add_node(true);
                    grid.extend_through(*xp, w, &Word::single(T));
                } else {
                    let (gamma, i) = last_s(&fxz).ok_or_else(|| stuck(format!("f({xp},{z}) = {fxz} has no strict successor")))?;
                    let x = grid
                        .split_node(*xp, *z, &gamma, &Word::single(s(i)))
                        .ok_or_else(|| stuck(format!("no node splits f({xp},{z}) = {fxz}")))?;
                    if i == 0 && *alpha == gamma.concat(&Word::single(s(n))) {
                        let w = grid.add_node(true);
                        grid.extend_through(x, w, &Word::single(s(n)));
                    } else if i < n && *alpha == gamma.concat(&Word(vec![s(i + 1), T])) {
                        let up = Word::single(s(i + 1));
                        let v = match (0..grid.nodes).find(|&v| grid.is(x, v, &up)) {
                            Some(v) => {
                                if !grid.is(v, *z, &Word::single(T)) {
                                    return Err(stuck(format!("f({v},{z}) is not t")));
                                }
                                v
                            }
                            None => {
                                let v = grid.add_node(false);
                                grid.extend_through(x, v, &up);
                                grid.f.insert((v, *z), Word::single(T));
                                v
                            }
                        };
                        let w = grid.add_node(true);
                        grid.f.insert((v, w), Word::single(T));
                        grid.extend_through(x, w, &Word(vec![s(i + 1), T]));
                    } else {
                        return Err(stuck(format!("{alpha} is not a strict successor of {fxz}")));
                    }
                }
            }
        }
        Ok(GameState {
            net: grid.network(an),
            goal: st.goal.clone(),
        })
    }
}

/// `(γ, i)` with `w = γs_i`.
fn last_s(w: &Word) -> Option<(Word, usize)> {
    let (&c, prefix) = w.0.split_last()?;
    (c != T).then(|| (Word(prefix.to_vec()), c as usize - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_grid_is_a_chain() {
        let an = An::new(4).unwrap();
        let a = an.parse_word("s0s2t").unwrap();
        let g = Grid::initial(&a);
        assert_eq!(g.nodes, 4);
        assert_eq!(g.f.len(), 10);
        assert_eq!(g.get(1, 3).unwrap().to_string(), "s2t");
        assert!(g.get(3, 1).is_none());
        assert!(g.violations(4, 0).is_empty(), "{:?}", g.violations(4, 0));
    }

    #[test]
    fn checker_flags_broken_grids() {
        let an = An::new(4).unwrap();
        let mut g = Grid::initial(&an.parse_word("s0t").unwrap());
        g.f.remove(&(0, 1));
        let v = g.violations(4, 0);
        assert!(v.iter().any(|m| m.starts_with("(iii)")), "{v:?}");
        let mut g = Grid::initial(&an.parse_word("s1").unwrap());
        g.terminals.insert(0);
        assert!(g.violations(4, 0).iter().any(|m| m.starts_with("(iv)")));
    }

    #[test]
    fn out_of_contract_round() {
        let an = An::new(3).unwrap();
        let game = Game::new(&an, true).unwrap();
        let mut p = GridPlayer::new(3);
        let init = Move::Init {
            a: an.parse_word("s0t").unwrap(),
            b: an.parse_word("s3t").unwrap(),
        };
        let empty = GameState { net: Network::empty(), goal: None };
        let st = p.respond(&game, &empty, &init).unwrap();
        let w = Move::Witness { x: 0, y: 2, a: an.parse_word("s0").unwrap(), b: Word::single(T) };
        let st = p.respond(&game, &st, &w).unwrap();
        let again = p.respond(&game, &st, &w);
        assert_eq!(again, Err(GridFailure::OutOfContract { round: 2, last: 1 }));
    }
}
