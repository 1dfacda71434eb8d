use std::collections::{BTreeMap, BTreeSet};

use crate::error::{RelicError, Result};

use super::structure::Structure;

/// Forbidden labels at a node: an explicit set, optionally with every non-identity element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Forb<E: Ord> {
    pub elems: BTreeSet<E>,
    pub all_but_identity: bool,
}

impl<E: Ord> Default for Forb<E> {
    fn default() -> Self {
        Forb {
            elems: BTreeSet::new(),
            all_but_identity: false,
        }
    }
}

impl<E: Ord + Clone> Forb<E> {
    pub fn contains(&self, e: &E, identity: Option<&E>) -> bool {
        self.elems.contains(e) || (self.all_but_identity && identity != Some(e))
    }

    fn includes(&self, other: &Forb<E>) -> bool {
        (self.all_but_identity || !other.all_but_identity) && other.elems.is_subset(&self.elems)
    }
}

/// A game position `(X, N, Forb)` with nodes `0..nodes`. Labels are stored up-closed;
/// missing pairs carry the empty label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Network<E: Ord> {
    pub nodes: usize,
    pub labels: BTreeMap<(usize, usize), BTreeSet<E>>,
    pub forb: Vec<Forb<E>>,
}

impl<E: Ord + Clone> Network<E> {
    pub fn empty() -> Self {
        Network {
            nodes: 0,
            labels: BTreeMap::new(),
            forb: Vec::new(),
        }
    }

    pub fn label(&self, x: usize, y: usize) -> Option<&BTreeSet<E>> {
        self.labels.get(&(x, y))
    }

    pub fn has(&self, x: usize, y: usize, e: &E) -> bool {
        self.labels.get(&(x, y)).is_some_and(|l| l.contains(e))
    }

    /// `N ⊆ N'`: nodes, labels and forbidden sets all grow.
    pub fn is_sub(&self, other: &Network<E>) -> bool {
        self.nodes <= other.nodes
            && self
                .labels
                .iter()
                .all(|(k, l)| other.labels.get(k).is_some_and(|m| l.is_subset(m)))
            && self.forb.iter().zip(&other.forb).all(|(a, b)| b.includes(a))
    }
}

/// A position plus the pair `∃` committed to in the initial round.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GameState<E: Ord> {
    pub net: Network<E>,
    pub goal: Option<Goal<E>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Goal<E> {
    pub x0: usize,
    pub y0: usize,
    pub b0: E,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move<E> {
    /// `a ≰ b`.
    Init { a: E, b: E },
    /// `a ∗ b ∈ N(x,y)`; a node `z` with `a ∈ N(x,z)`, `b ∈ N(z,y)` is required.
    Witness { x: usize, y: usize, a: E, b: E },
    /// `a ≤ a⁺`, `a⁺ ∗ b ∈ N(x,y)`, `a ∈ N(x,z)`; a node `w` with `b ∈ N(z,w)` is required.
    Demonic { x: usize, y: usize, z: usize, a: E, a_plus: E, b: E },
    /// `a ∈ N(x,z)`, `b ∈ N(z,y)`; accept puts `a ∗ b` in `N(x,y)`, reject adds `w` with
    /// `a ∈ N(x,w)` and `b ∈ Forb(w)`.
    Choice { x: usize, y: usize, z: usize, a: E, b: E },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChoiceOutcome {
    Accept,
    Reject,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveVerdict {
    pub legal: bool,
    pub reason: Option<String>,
    pub choice: Option<ChoiceOutcome>,
    /// Illegal response, inconsistency, or the initial non-inclusion reached.
    pub forall_wins: bool,
}

/// A structure with the rules of one game variant.
#[derive(Debug, Clone, Copy)]
pub struct Game<'a, S: Structure> {
    pub s: &'a S,
    /// Require `1' ∈ N(x,y)` exactly when `x = y`.
    pub with_identity: bool,
}

impl<'a, S: Structure> Game<'a, S> {
    pub fn new(s: &'a S, with_identity: bool) -> Result<Self> {
        if with_identity && s.identity().is_none() {
            return Err(RelicError::Invalid("the identity variant needs a structure with identity".into()));
        }
        Ok(Game { s, with_identity })
    }

    pub fn show_move(&self, m: &Move<S::Elem>) -> String {
        let e = |a: &S::Elem| self.s.show(a);
        match m {
            Move::Init { a, b } => format!("init {} {}", e(a), e(b)),
            Move::Witness { x, y, a, b } => format!("witness {x} {y} {} {}", e(a), e(b)),
            Move::Demonic { x, y, z, a, a_plus, b } => format!("demonic {x} {y} {z} {} {} {}", e(a), e(a_plus), e(b)),
            Move::Choice { x, y, z, a, b } => format!("choice {x} {y} {z} {} {}", e(a), e(b)),
        }
    }

    pub fn parse_move(&self, line: &str) -> Result<Move<S::Elem>> {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let bad = || RelicError::Invalid(format!("cannot read move `{line}`"));
        let node = |i: usize| -> Result<usize> { parts.get(i).ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let elem = |i: usize| -> Result<S::Elem> { self.s.parse_elem(parts.get(i).ok_or_else(bad)?) };
        let arity = |k: usize| if parts.len() == k { Ok(()) } else { Err(bad()) };
        match parts.first().copied() {
            Some("init") => {
                arity(3)?;
                Ok(Move::Init { a: elem(1)?, b: elem(2)? })
            }
            Some("witness") => {
                arity(5)?;
                Ok(Move::Witness { x: node(1)?, y: node(2)?, a: elem(3)?, b: elem(4)? })
            }
            Some("demonic") => {
                arity(7)?;
                Ok(Move::Demonic { x: node(1)?, y: node(2)?, z: node(3)?, a: elem(4)?, a_plus: elem(5)?, b: elem(6)? })
            }
            Some("choice") => {
                arity(6)?;
                Ok(Move::Choice { x: node(1)?, y: node(2)?, z: node(3)?, a: elem(4)?, b: elem(5)? })
            }
            _ => Err(bad()),
        }
    }

    pub fn render(&self, st: &GameState<S::Elem>) -> String {
        let mut out = format!("nodes {}\n", st.net.nodes);
        if let Some(g) = &st.goal {
            out.push_str(&format!("goal {} {} avoid {}\n", g.x0, g.y0, self.s.show(&g.b0)));
        }
        for ((x, y), l) in &st.net.labels {
            let names: Vec<String> = l.iter().map(|e| self.s.show(e)).collect();
            out.push_str(&format!("N({x},{y}) = {{{}}}\n", names.join(",")));
        }
        for (x, f) in st.net.forb.iter().enumerate() {
            if f.all_but_identity || !f.elems.is_empty() {
                let mut names: Vec<String> = f.elems.iter().map(|e| self.s.show(e)).collect();
                if f.all_but_identity {
                    names.insert(0, "all-but-identity".into());
                }
                out.push_str(&format!("Forb({x}) = {{{}}}\n", names.join(",")));
            }
        }
        out
    }

    fn identity(&self) -> Option<S::Elem> {
        if self.with_identity {
            self.s.identity()
        } else {
            None
        }
    }

    /// Add `e^↑` to `N(x,y)`; false when that puts `1'` between distinct nodes in the
    /// identity variant.
    pub fn add_label(&self, net: &mut Network<S::Elem>, x: usize, y: usize, e: &S::Elem) -> bool {
        let id = self.identity();
        let l = net.labels.entry((x, y)).or_default();
        let mut ok = true;
        for u in self.s.up(e) {
            ok &= x == y || id.as_ref() != Some(&u);
            l.insert(u);
        }
        ok
    }

    pub fn add_node(&self, net: &mut Network<S::Elem>) -> usize {
        let v = net.nodes;
        net.nodes += 1;
        net.forb.push(Forb::default());
        if let Some(id) = self.identity() {
            self.add_label(net, v, v, &id);
        }
        v
    }

    /// Up-closed labels and, in the identity variant, `1' ∈ N(x,y)` iff `x = y`.
    pub fn well_formed(&self, net: &Network<S::Elem>) -> std::result::Result<(), String> {
        if net.forb.len() != net.nodes {
            return Err("forbidden sets do not match the node count".into());
        }
        for (&(x, y), l) in &net.labels {
            if x >= net.nodes || y >= net.nodes {
                return Err(format!("label on unknown node pair ({x},{y})"));
            }
            for e in l {
                if let Some(u) = self.s.up(e).into_iter().find(|u| !l.contains(u)) {
                    return Err(format!("N({x},{y}) is not up-closed: missing {}", self.s.show(&u)));
                }
            }
        }
        if let Some(id) = self.identity() {
            for x in 0..net.nodes {
                if !net.has(x, x, &id) {
                    return Err(format!("1' missing from N({x},{x})"));
                }
            }
            if let Some((&(x, y), _)) = net.labels.iter().find(|(&(x, y), l)| x != y && l.contains(&id)) {
                return Err(format!("1' in N({x},{y}) for distinct nodes"));
            }
        }
        Ok(())
    }

    /// The first `(x, y, e)` with `e ∈ N(x,y) ∩ Forb(x)`.
    pub fn inconsistency(&self, net: &Network<S::Elem>) -> Option<(usize, usize, S::Elem)> {
        let id = self.s.identity();
        for (&(x, y), l) in &net.labels {
            if let Some(e) = l.iter().find(|e| net.forb[x].contains(e, id.as_ref())) {
                return Some((x, y, e.clone()));
            }
        }
        None
    }

    /// Why `∀` has already won in a well-formed position, if he has.
    pub fn forall_win_reason(&self, st: &GameState<S::Elem>) -> Option<String> {
        if let Some((x, y, e)) = self.inconsistency(&st.net) {
            return Some(format!("inconsistent: {} in N({x},{y}) and Forb({x})", self.s.show(&e)));
        }
        if let Some(g) = &st.goal {
            if st.net.has(g.x0, g.y0, &g.b0) {
                return Some(format!("{} reached N({},{})", self.s.show(&g.b0), g.x0, g.y0));
            }
        }
        None
    }

    /// Whether `∀` may play `m` in `st`.
    pub fn playable(&self, st: &GameState<S::Elem>, m: &Move<S::Elem>) -> std::result::Result<(), String> {
        let net = &st.net;
        let live = |v: usize| {
            if v < net.nodes {
                Ok(())
            } else {
                Err(format!("node {v} does not exist"))
            }
        };
        let need = |x: usize, y: usize, e: &S::Elem| {
            if net.has(x, y, e) {
                Ok(())
            } else {
                Err(format!("{} is not in N({x},{y})", self.s.show(e)))
            }
        };
        match m {
            Move::Init { a, b } => {
                if st.goal.is_some() || net.nodes > 0 {
                    return Err("the initial move opens the game".into());
                }
                if self.s.leq(a, b) {
                    return Err(format!("{} <= {}", self.s.show(a), self.s.show(b)));
                }
                Ok(())
            }
            _ if st.goal.is_none() => Err("the game opens with an initial move".into()),
            Move::Witness { x, y, a, b } => {
                live(*x)?;
                live(*y)?;
                need(*x, *y, &self.s.mul(a, b))
            }
            Move::Demonic { x, y, z, a, a_plus, b } => {
                live(*x)?;
                live(*y)?;
                live(*z)?;
                if !self.s.leq(a, a_plus) {
                    return Err(format!("{} is not below {}", self.s.show(a), self.s.show(a_plus)));
                }
                need(*x, *y, &self.s.mul(a_plus, b))?;
                need(*x, *z, a)
            }
            Move::Choice { x, y, z, a, b } => {
                live(*x)?;
                live(*y)?;
                live(*z)?;
                need(*x, *z, a)?;
                need(*z, *y, b)
            }
        }
    }

    /// Check `next` as a response to `m` played in `prev`.
    pub fn apply_move(&self, prev: &GameState<S::Elem>, m: &Move<S::Elem>, next: &GameState<S::Elem>) -> MoveVerdict {
        let illegal = |reason: String| MoveVerdict {
            legal: false,
            reason: Some(reason),
            choice: None,
            forall_wins: true,
        };
        if let Err(e) = self.playable(prev, m) {
            return illegal(format!("move not playable: {e}"));
        }
        if !prev.net.is_sub(&next.net) {
            return illegal("response does not extend the current network".into());
        }
        if prev.goal.is_some() && prev.goal != next.goal {
            return illegal("response changes the initial pair".into());
        }
        if let Err(e) = self.well_formed(&next.net) {
            return illegal(format!("ill-formed response: {e}"));
        }
        let net = &next.net;
        let nodes = 0..net.nodes;
        let id = self.s.identity();
        let mut choice = None;
        let ok = match m {
            Move::Init { a, b } => match &next.goal {
                Some(g) => g.b0 == *b && g.x0 < net.nodes && g.y0 < net.nodes && net.has(g.x0, g.y0, a),
                None => false,
            },
            Move::Witness { x, y, a, b } => nodes.clone().any(|z| net.has(*x, z, a) && net.has(z, *y, b)),
            Move::Demonic { z, b, .. } => nodes.clone().any(|w| net.has(*z, w, b)),
            Move::Choice { x, y, a, b, .. } => {
                if net.has(*x, *y, &self.s.mul(a, b)) {
                    choice = Some(ChoiceOutcome::Accept);
                } else if nodes.clone().any(|w| net.has(*x, w, a) && net.forb[w].contains(b, id.as_ref())) {
                    choice = Some(ChoiceOutcome::Reject);
                }
                choice.is_some()
            }
        };
        if !ok {
            return illegal("response does not meet the move's requirement".into());
        }
        let win = self.forall_win_reason(next);
        MoveVerdict {
            legal: true,
            forall_wins: win.is_some(),
            reason: win,
            choice,
        }
    }

    /// A move is trivial when the unchanged position is a legal response.
    pub fn is_trivial(&self, st: &GameState<S::Elem>, m: &Move<S::Elem>) -> bool {
        let net = &st.net;
        let mut nodes = 0..net.nodes;
        match m {
            Move::Init { .. } => false,
            Move::Witness { x, y, a, b } => nodes.any(|z| net.has(*x, z, a) && net.has(z, *y, b)),
            Move::Demonic { z, b, .. } => nodes.any(|w| net.has(*z, w, b)),
            Move::Choice { x, y, a, b, .. } => {
                let id = self.s.identity();
                net.has(*x, *y, &self.s.mul(a, b))
                    || nodes.any(|w| net.has(*x, w, a) && net.forb[w].contains(b, id.as_ref()))
            }
        }
    }

    /// `∃`'s minimal responses, each well-formed, in a fixed order: existing nodes first,
    /// then one fresh node. Losing responses are kept; the caller decides.
    pub fn minimal_responses(&self, st: &GameState<S::Elem>, m: &Move<S::Elem>) -> Vec<GameState<S::Elem>> {
        let mut out = Vec::new();
        let mut push = |next: GameState<S::Elem>, ok: bool| {
            if ok && !out.contains(&next) {
                out.push(next);
            }
        };
        match m {
            Move::Init { a, b } => {
                let mut one = st.clone();
                let x = self.add_node(&mut one.net);
                let ok = self.add_label(&mut one.net, x, x, a);
                one.goal = Some(Goal { x0: x, y0: x, b0: b.clone() });
                push(one, ok);
                let mut two = st.clone();
                let x = self.add_node(&mut two.net);
                let y = self.add_node(&mut two.net);
                let ok = self.add_label(&mut two.net, x, y, a);
                two.goal = Some(Goal { x0: x, y0: y, b0: b.clone() });
                push(two, ok);
            }
            Move::Witness { x, y, a, b } => {
                for z in 0..=st.net.nodes {
                    let mut next = st.clone();
                    if z == st.net.nodes {
                        self.add_node(&mut next.net);
                    }
                    let ok = self.add_label(&mut next.net, *x, z, a) & self.add_label(&mut next.net, z, *y, b);
                    push(next, ok);
                }
            }
            Move::Demonic { z, b, .. } => {
                for w in 0..=st.net.nodes {
                    let mut next = st.clone();
                    if w == st.net.nodes {
                        self.add_node(&mut next.net);
                    }
                    let ok = self.add_label(&mut next.net, *z, w, b);
                    push(next, ok);
                }
            }
            Move::Choice { x, y, a, b, .. } => {
                let mut accept = st.clone();
                let ok = self.add_label(&mut accept.net, *x, *y, &self.s.mul(a, b));
                push(accept, ok);
                let mut reject = st.clone();
                let w = self.add_node(&mut reject.net);
                let ok = self.add_label(&mut reject.net, *x, w, a);
                reject.net.forb[w].elems.insert(b.clone());
                push(reject, ok);
            }
        }
        debug_assert!(out.iter().all(|r| self.well_formed(&r.net).is_ok()));
        out
    }

    /// Every non-trivial non-initial move whose elements pass `keep`, in a fixed order:
    /// demonic, then choice, then witness.
    pub fn nontrivial_moves(&self, st: &GameState<S::Elem>, keep: &dyn Fn(&S::Elem) -> bool) -> Vec<Move<S::Elem>> {
        let net = &st.net;
        let mut out = Vec::new();
        // Each move arises from exactly one label and split, so there are no duplicates.
        let mut push = |m: Move<S::Elem>| {
            if !self.is_trivial(st, &m) {
                out.push(m);
            }
        };
        for (&(x, y), l) in &net.labels {
            for c in l {
                for (a_plus, b) in self.s.splits(c) {
                    if !keep(&a_plus) || !keep(&b) {
                        continue;
                    }
                    for a in self.s.down(&a_plus).into_iter().filter(|a| keep(a)) {
                        for z in 0..net.nodes {
                            if net.has(x, z, &a) {
                                push(Move::Demonic { x, y, z, a: a.clone(), a_plus: a_plus.clone(), b: b.clone() });
                            }
                        }
                    }
                }
            }
        }
        for (&(x, z), la) in &net.labels {
            for (&(z2, y), lb) in net.labels.range((z, 0)..(z + 1, 0)) {
                debug_assert_eq!(z2, z);
                for a in la.iter().filter(|a| keep(a)) {
                    for b in lb.iter().filter(|b| keep(b)) {
                        push(Move::Choice { x, y, z, a: a.clone(), b: b.clone() });
                    }
                }
            }
        }
        for (&(x, y), l) in &net.labels {
            for c in l {
                for (a, b) in self.s.splits(c) {
                    if keep(&a) && keep(&b) {
                        push(Move::Witness { x, y, a, b });
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::an::{An, Word};

    fn w(a: &An, s: &str) -> Word {
        a.parse_word(s).unwrap()
    }

    fn two_node_start(g: &Game<'_, An>, a: &An) -> GameState<Word> {
        let init = Move::Init { a: w(a, "s0t"), b: w(a, "s3t") };
        let rs = g.minimal_responses(&GameState { net: Network::empty(), goal: None }, &init);
        rs.into_iter().find(|r| r.net.nodes == 2).unwrap()
    }

    #[test]
    fn initial_round_and_witness() {
        let a = An::new(3).unwrap();
        let g = Game::new(&a, true).unwrap();
        let empty = GameState { net: Network::empty(), goal: None };
        let init = Move::Init { a: w(&a, "s0t"), b: w(&a, "s3t") };
        let n0 = two_node_start(&g, &a);
        let v = g.apply_move(&empty, &init, &n0);
        assert!(v.legal && !v.forall_wins, "{v:?}");
        assert_eq!(n0.net.label(0, 1).unwrap().iter().cloned().collect::<Vec<_>>(), vec![w(&a, "s0t")]);

        let wit = Move::Witness { x: 0, y: 1, a: w(&a, "s0"), b: w(&a, "t") };
        let rs = g.minimal_responses(&n0, &wit);
        assert!(rs.len() <= 3);
        for r in &rs {
            assert!(g.apply_move(&n0, &wit, r).legal);
        }
        let fresh = rs.last().unwrap();
        assert_eq!(fresh.net.nodes, 3);
        assert_eq!(fresh.net.label(0, 2).unwrap().len(), 3);
    }

    #[test]
    fn accepting_the_choice_loses() {
        let a = An::new(3).unwrap();
        let g = Game::new(&a, true).unwrap();
        let n0 = two_node_start(&g, &a);
        let wit = Move::Witness { x: 0, y: 1, a: w(&a, "s0"), b: w(&a, "t") };
        let n1 = g.minimal_responses(&n0, &wit).pop().unwrap();
        let ch = Move::Choice { x: 0, y: 1, z: 2, a: w(&a, "s3"), b: w(&a, "t") };
        let rs = g.minimal_responses(&n1, &ch);
        assert_eq!(rs.len(), 2);
        let acc = g.apply_move(&n1, &ch, &rs[0]);
        assert_eq!(acc.choice, Some(ChoiceOutcome::Accept));
        assert!(acc.legal && acc.forall_wins);
        let rej = g.apply_move(&n1, &ch, &rs[1]);
        assert_eq!(rej.choice, Some(ChoiceOutcome::Reject));
        assert!(!rej.forall_wins);
    }

    #[test]
    fn dropping_a_label_is_illegal() {
        let a = An::new(3).unwrap();
        let g = Game::new(&a, true).unwrap();
        let n0 = two_node_start(&g, &a);
        let wit = Move::Witness { x: 0, y: 1, a: w(&a, "s0"), b: w(&a, "t") };
        let mut bad = g.minimal_responses(&n0, &wit).pop().unwrap();
        bad.net.labels.remove(&(0, 1));
        let v = g.apply_move(&n0, &wit, &bad);
        assert!(!v.legal && v.forall_wins);
    }

    #[test]
    fn trivial_moves_and_parsing() {
        let a = An::new(3).unwrap();
        let g = Game::new(&a, true).unwrap();
        let n0 = two_node_start(&g, &a);
        let m = Move::Witness { x: 0, y: 1, a: w(&a, "s0t"), b: Word::EMPTY };
        assert!(g.is_trivial(&n0, &m));
        let text = g.show_move(&m);
        assert_eq!(text, "witness 0 1 s0t Λ");
        assert_eq!(g.parse_move(&text).unwrap(), m);
        assert!(g.nontrivial_moves(&n0, &|_| true).iter().all(|m| !g.is_trivial(&n0, m)));
    }

    #[test]
    fn triviality_agrees_with_the_unchanged_response() {
        let a = An::new(3).unwrap();
        let g = Game::new(&a, true).unwrap();
        let n0 = two_node_start(&g, &a);
        let wit = Move::Witness { x: 0, y: 1, a: w(&a, "s0"), b: w(&a, "t") };
        let n1 = g.minimal_responses(&n0, &wit).pop().unwrap();
        let words = a.words_up_to(2);
        for x in 0..3 {
            for y in 0..3 {
                for z in 0..3 {
                    for p in &words {
                        for q in &words {
                            let moves = [
                                Move::Witness { x, y, a: p.clone(), b: q.clone() },
                                Move::Choice { x, y, z, a: p.clone(), b: q.clone() },
                                Move::Demonic { x, y, z, a: p.clone(), a_plus: p.clone(), b: q.clone() },
                            ];
                            for m in moves.iter().filter(|m| g.playable(&n1, m).is_ok()) {
                                assert_eq!(g.is_trivial(&n1, m), g.apply_move(&n1, m, &n1).legal, "{m:?}");
                            }
                        }
                    }
                }
            }
        }
    }
}
