use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;

use super::an::{An, Word, T};
use super::grid::{Grid, GridPlayer};
use super::network::{Game, GameState, Move, Network};
use super::script::{script_minimax, ScriptOutcome};

/// Knobs for [`verify_game_lemmas`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LemmaOptions {
    /// Positions either side may visit before the report is marked inconclusive.
    pub budget: u64,
    /// Opening words `a` for the grid check have at most this many characters.
    pub init_len: usize,
    /// Largest `n` whose grid check enumerates every move sequence; above it, sampling.
    pub exhaustive_up_to: usize,
    pub samples: u64,
    pub seed: u64,
    pub with_identity: bool,
}

impl Default for LemmaOptions {
    fn default() -> Self {
        LemmaOptions {
            budget: crate::config::DEFAULT_BUDGET,
            init_len: 3,
            exhaustive_up_to: 4,
            samples: 10_000,
            seed: 0,
            with_identity: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ForallReport {
    pub proven: bool,
    pub positions: u64,
    pub leaves: u64,
    pub longest: usize,
    pub failure: Option<String>,
    pub inconclusive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coverage {
    Exhaustive,
    Sampled { seed: u64, samples: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridViolation {
    pub opening: String,
    pub moves: Vec<String>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExistsReport {
    pub coverage: Coverage,
    /// Rounds after the opening, `n - 2`.
    pub rounds: usize,
    pub openings: usize,
    /// Distinct `(grid, round)` positions checked.
    pub positions: u64,
    /// Move sequences covered; a sequence stops early when only trivial moves remain.
    pub sequences: u128,
    /// Positions after which a grid condition or hypothesis failed, by condition.
    pub invariant_failures: BTreeMap<String, u64>,
    /// Responses that lost, were illegal, or could not be computed.
    pub strategy_failures: u64,
    /// The first play breaking each condition, then the first few strategy failures.
    pub examples: Vec<GridViolation>,
    pub inconclusive: bool,
}

impl ExistsReport {
    pub fn invariant_failure_count(&self) -> u64 {
        self.invariant_failures.values().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub n: usize,
    pub forall: ForallReport,
    pub exists: ExistsReport,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.forall.proven && self.exists.strategy_failures == 0 && self.exists.invariant_failure_count() == 0 && !self.exists.inconclusive
    }

    pub fn inconclusive(&self) -> bool {
        self.forall.inconclusive || self.exists.inconclusive
    }

    pub fn render(&self) -> String {
        let f = &self.forall;
        let e = &self.exists;
        let mut out = format!(
            "A_{}: forall script {} ({} positions, {} plays, longest {} moves)\n",
            self.n,
            if f.proven { "wins every play" } else if f.inconclusive { "inconclusive" } else { "FAILS" },
            f.positions,
            f.leaves,
            f.longest
        );
        if let Some(why) = &f.failure {
            out.push_str(&format!("  {why}\n"));
        }
        let coverage = match e.coverage {
            Coverage::Exhaustive => "exhaustive".to_string(),
            Coverage::Sampled { seed, samples } => format!("sampled {samples} sequences, seed {seed}"),
        };
        out.push_str(&format!(
            "A_{}: grid strategy over {} rounds, {coverage}: {} openings, {} positions, {} sequences, {} unanswered or lost, {} invariant failures{}\n",
            self.n,
            e.rounds,
            e.openings,
            e.positions,
            e.sequences,
            e.strategy_failures,
            e.invariant_failure_count(),
            if e.inconclusive { " (inconclusive)" } else { "" }
        ));
        for (cond, count) in &e.invariant_failures {
            out.push_str(&format!("  {cond} failed after {count} positions\n"));
        }
        for v in &e.examples {
            out.push_str(&format!("  opening {}; moves [{}]: {}\n", v.opening, v.moves.join("; "), v.reason));
        }
        out
    }
}

/// Check both strategies on `A_n`: the script beats every minimal-response line in
/// `n + 2` moves, and the grid strategy survives `n - 2` non-trivial moves with its
/// invariants intact after every round.
pub fn verify_game_lemmas(n: usize, opts: &LemmaOptions) -> Result<LemmaReport> {
    let an = An::new(n)?;
    let s: ScriptOutcome = script_minimax(&an, opts.with_identity, opts.budget);
    let game = Game::new(&an, opts.with_identity)?;
    let forall = ForallReport {
        proven: s.proven,
        positions: s.positions,
        leaves: s.leaves,
        longest: s.longest,
        failure: s.failure.map(|f| {
            let moves: Vec<String> = f.play.iter().map(|(m, i)| format!("{} -> {i}", game.show_move(m))).collect();
            format!("[{}]: {}", moves.join("; "), f.reason)
        }),
        inconclusive: s.budget_exhausted,
    };
    let exists = if n <= opts.exhaustive_up_to {
        grid_exhaustive(&game, opts)
    } else {
        grid_sampled(&game, opts)
    };
    Ok(LemmaReport { n, forall, exists })
}

/// The opening `a ≰ at`; the avoided word never matters since `N(x₀,y₀)` is fixed.
fn opening(a: &Word) -> Move<Word> {
    Move::Init {
        a: a.clone(),
        b: a.concat(&Word::single(T)),
    }
}

/// What happened when the grid strategy answered a move.
enum Step {
    /// The play goes on; `failed` lists the grid conditions and hypotheses that broke.
    Continue { next: GameState<Word>, failed: Vec<String> },
    /// `∃` lost, answered illegally, or had no answer.
    Lost(String),
}

/// The condition label of a violation message, e.g. `(ii)`.
fn condition(msg: &str) -> String {
    msg.split_whitespace().next().unwrap_or(msg).to_string()
}

/// Answer `m` with the grid strategy and check everything the strategy promises.
fn grid_step(game: &Game<'_, An>, player: &mut GridPlayer, st: &GameState<Word>, m: &Move<Word>) -> Step {
    let before: Option<Grid> = player.grid.clone();
    let next = match player.respond(game, st, m) {
        Ok(next) => next,
        Err(e) => return Step::Lost(e.to_string()),
    };
    let v = game.apply_move(st, m, &next);
    if !v.legal || v.forall_wins {
        return Step::Lost(format!("response loses: {}", v.reason.unwrap_or_default()));
    }
    let grid = player.grid.as_ref().expect("the grid exists after a response");
    let mut failed = Vec::new();
    if next.net != grid.network(game.s) {
        failed.push("(1) the network is not the one the grid determines".to_string());
    }
    if let Some(old) = before {
        let kept = old.f.iter().all(|(k, w)| grid.f.get(k) == Some(w))
            && grid.f.keys().all(|&(x, y)| x >= old.nodes || y >= old.nodes || old.f.contains_key(&(x, y)))
            && grid.terminals.iter().filter(|&&w| w < old.nodes).eq(old.terminals.iter());
        if !kept {
            failed.push("(extension) the new grid does not extend the old one".to_string());
        }
    }
    failed.extend(grid.violations(game.s.n, player.round));
    Step::Continue { next, failed }
}

/// Cap on the example failures kept in a report.
const EXAMPLES: usize = 8;

type Example = (Vec<Move<Word>>, String);

#[derive(Default)]
struct Tally {
    positions: u64,
    sequences: u128,
    failures: BTreeMap<String, u64>,
    by_condition: BTreeMap<String, Example>,
    strategy_failures: u64,
    unanswered: Vec<Example>,
    exhausted: bool,
}

impl Tally {
    fn note(&mut self, path: &[Move<Word>], round: usize, failed: &[String]) {
        let mut seen = BTreeSet::new();
        for f in failed {
            let c = condition(f);
            if seen.insert(c.clone()) {
                *self.failures.entry(c.clone()).or_default() += 1;
                self.by_condition.entry(c).or_insert_with(|| (path.to_vec(), format!("round {round}: {f}")));
            }
        }
    }

    fn lose(&mut self, path: &[Move<Word>], why: String) {
        self.strategy_failures += 1;
        if self.unanswered.len() < EXAMPLES {
            self.unanswered.push((path.to_vec(), why));
        }
    }
}

struct Enumeration<'a, 'g> {
    game: &'a Game<'g, An>,
    rounds: usize,
    budget: u64,
    visited: &'a AtomicU64,
}

impl Enumeration<'_, '_> {
    /// Sequences below `(player, st)`; the memo is keyed by the grid and round, which
    /// determine everything the strategy does next. Failures are counted once per position.
    fn walk(&self, player: &GridPlayer, st: &GameState<Word>, path: &mut Vec<Move<Word>>, memo: &mut HashMap<(Grid, usize), u128>, tally: &mut Tally) -> u128 {
        let key = (player.grid.clone().expect("opened"), player.round);
        if let Some(&c) = memo.get(&key) {
            return c;
        }
        if self.visited.fetch_add(1, Ordering::Relaxed) >= self.budget {
            tally.exhausted = true;
            return 0;
        }
        tally.positions += 1;
        let moves = if player.round < self.rounds {
            self.game.nontrivial_moves(st, &|_| true)
        } else {
            Vec::new()
        };
        let mut count = u128::from(moves.is_empty());
        for m in moves {
            let mut p = player.clone();
            path.push(m.clone());
            match grid_step(self.game, &mut p, st, &m) {
                Step::Continue { next, failed } => {
                    let fresh = !memo.contains_key(&(p.grid.clone().expect("opened"), p.round));
                    if fresh && !failed.is_empty() {
                        tally.note(path, p.round, &failed);
                    }
                    count += self.walk(&p, &next, path, memo, tally);
                }
                Step::Lost(why) => {
                    count += 1;
                    tally.lose(path, why);
                }
            }
            path.pop();
        }
        memo.insert(key, count);
        count
    }
}

fn exists_report(coverage: Coverage, rounds: usize, openings: usize, game: &Game<'_, An>, tallies: Vec<(Word, Tally)>) -> ExistsReport {
    let mut report = ExistsReport {
        coverage,
        rounds,
        openings,
        positions: 0,
        sequences: 0,
        invariant_failures: BTreeMap::new(),
        strategy_failures: 0,
        examples: Vec::new(),
        inconclusive: false,
    };
    let show = |a: &Word, (moves, reason): Example| GridViolation {
        opening: game.show_move(&opening(a)),
        moves: moves.iter().map(|m| game.show_move(m)).collect(),
        reason,
    };
    let mut by_condition: BTreeMap<String, GridViolation> = BTreeMap::new();
    let mut unanswered = Vec::new();
    for (a, t) in tallies {
        report.positions += t.positions;
        report.sequences += t.sequences;
        report.strategy_failures += t.strategy_failures;
        report.inconclusive |= t.exhausted;
        for (c, k) in t.failures {
            *report.invariant_failures.entry(c).or_default() += k;
        }
        for (c, ex) in t.by_condition {
            by_condition.entry(c).or_insert_with(|| show(&a, ex));
        }
        for ex in t.unanswered {
            if unanswered.len() < EXAMPLES {
                unanswered.push(show(&a, ex));
            }
        }
    }
    report.examples = by_condition.into_values().chain(unanswered).collect();
    report
}

/// Open with `a` and check the opening response.
fn open(game: &Game<'_, An>, a: &Word, tally: &mut Tally) -> Option<(GridPlayer, GameState<Word>)> {
    let mut player = GridPlayer::new(game.s.n);
    let empty = GameState { net: Network::empty(), goal: None };
    tally.positions += 1;
    match grid_step(game, &mut player, &empty, &opening(a)) {
        Step::Continue { next, failed } => {
            tally.note(&[], 0, &failed);
            Some((player, next))
        }
        Step::Lost(why) => {
            tally.lose(&[], why);
            None
        }
    }
}

fn grid_exhaustive(game: &Game<'_, An>, opts: &LemmaOptions) -> ExistsReport {
    let rounds = game.s.n.saturating_sub(2);
    let openings = game.s.words_up_to(opts.init_len);
    let visited = AtomicU64::new(0);
    let e = Enumeration {
        game,
        rounds,
        budget: opts.budget,
        visited: &visited,
    };
    let tallies: Vec<(Word, Tally)> = openings
        .par_iter()
        .map(|a| {
            let mut tally = Tally::default();
            if let Some((player, st)) = open(game, a, &mut tally) {
                // The opening was counted by `open`; `walk` counts it again as a position.
                tally.positions -= 1;
                tally.sequences = e.walk(&player, &st, &mut Vec::new(), &mut HashMap::new(), &mut tally);
            } else {
                tally.sequences = 1;
            }
            (a.clone(), tally)
        })
        .collect();
    exists_report(Coverage::Exhaustive, rounds, openings.len(), game, tallies)
}

fn grid_sampled(game: &Game<'_, An>, opts: &LemmaOptions) -> ExistsReport {
    let rounds = game.s.n.saturating_sub(2);
    let openings = game.s.words_up_to(opts.init_len);
    let samples = opts.samples.min(opts.budget);
    let tallies: Vec<(Word, Tally)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(i);
            let a = openings[rng.gen_range(0..openings.len())].clone();
            let mut tally = Tally {
                sequences: 1,
                ..Default::default()
            };
            let Some((mut player, mut st)) = open(game, &a, &mut tally) else {
                return (a, tally);
            };
            let mut moves = Vec::new();
            while player.round < rounds {
                let options = game.nontrivial_moves(&st, &|_| true);
                if options.is_empty() {
                    break;
                }
                let m = options[rng.gen_range(0..options.len())].clone();
                moves.push(m.clone());
                tally.positions += 1;
                match grid_step(game, &mut player, &st, &m) {
                    Step::Continue { next, failed } => {
                        tally.note(&moves, player.round, &failed);
                        st = next;
                    }
                    Step::Lost(why) => {
                        tally.lose(&moves, why);
                        break;
                    }
                }
            }
            (a, tally)
        })
        .collect();
    let mut report = exists_report(Coverage::Sampled { seed: opts.seed, samples }, rounds, openings.len(), game, tallies);
    report.inconclusive = samples < opts.samples;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::script::ScriptPlayer;

    fn clean_step(game: &Game<'_, An>, p: &mut GridPlayer, st: &GameState<Word>, m: &Move<Word>) -> GameState<Word> {
        match grid_step(game, p, st, m) {
            Step::Continue { next, failed } if failed.is_empty() => next,
            Step::Continue { failed, .. } => panic!("{failed:?}"),
            Step::Lost(why) => panic!("{why}"),
        }
    }

    #[test]
    fn lemmas_hold_for_n3() {
        let r = verify_game_lemmas(3, &LemmaOptions::default()).unwrap();
        assert!(r.holds(), "{}", r.render());
        assert_eq!(r.exists.coverage, Coverage::Exhaustive);
        assert_eq!(r.forall.longest, 5);
        assert!(r.exists.sequences > u128::from(r.exists.positions) / 2);
    }

    #[test]
    fn sampling_is_deterministic() {
        let opts = LemmaOptions {
            exhaustive_up_to: 2,
            samples: 300,
            seed: 7,
            ..Default::default()
        };
        let a = verify_game_lemmas(4, &opts).unwrap();
        let b = verify_game_lemmas(4, &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.exists.sequences, 300);
        assert!(a.forall.proven);
    }

    #[test]
    fn grid_replays_the_script_for_three_rounds_at_n5() {
        let an = An::new(5).unwrap();
        let game = Game::new(&an, true).unwrap();
        let mut forall = ScriptPlayer::new(5);
        let mut exists = GridPlayer::new(5);
        let mut st = GameState { net: Network::empty(), goal: None };
        for _ in 0..4 {
            let m = forall.next_move(&game, &st).unwrap().unwrap();
            st = clean_step(&game, &mut exists, &st, &m);
        }
        assert_eq!(exists.round, 3);
        assert_eq!(exists.grid.as_ref().unwrap().terminals.len(), 1);
    }

    #[test]
    fn witness_response_adds_one_node() {
        let an = An::new(4).unwrap();
        let game = Game::new(&an, true).unwrap();
        let mut p = GridPlayer::new(4);
        let empty = GameState { net: Network::empty(), goal: None };
        let st = clean_step(&game, &mut p, &empty, &opening(&an.parse_word("ts1").unwrap()));
        let m = Move::Witness { x: 1, y: 2, a: an.parse_word("s2").unwrap(), b: Word::single(T) };
        let st2 = clean_step(&game, &mut p, &st, &m);
        let g = p.grid.clone().unwrap();
        assert_eq!(g.nodes, 4);
        assert_eq!(g.get(3, 2).unwrap().to_string(), "t");
        assert_eq!(g.get(0, 3).unwrap().to_string(), "ts2");
        assert!(g.get(3, 1).is_none());
        assert!(game.nontrivial_moves(&st2, &|_| true).iter().all(|m| !matches!(m, Move::Demonic { .. })));
    }

    #[test]
    fn choice_over_a_t_edge_gets_a_terminal() {
        let an = An::new(4).unwrap();
        let game = Game::new(&an, true).unwrap();
        let mut p = GridPlayer::new(4);
        let empty = GameState { net: Network::empty(), goal: None };
        let w = |text: &str| an.parse_word(text).unwrap();
        let st = clean_step(&game, &mut p, &empty, &opening(&w("s0s1")));
        let st = clean_step(&game, &mut p, &st, &Move::Witness { x: 0, y: 1, a: w("s1"), b: w("t") });
        // Node 3 has f(3,1) = t and f(3,2) undefined.
        let m = Move::Choice { x: 3, y: 2, z: 1, a: w("t"), b: w("s1") };
        assert!(!game.is_trivial(&st, &m));
        let next = clean_step(&game, &mut p, &st, &m);
        let g = p.grid.as_ref().unwrap();
        assert_eq!(g.terminals.iter().copied().collect::<Vec<_>>(), vec![4]);
        assert_eq!(g.get(3, 4), Some(&w("t")));
        assert_eq!(g.get(0, 4), Some(&w("s1t")));
        assert_eq!(game.apply_move(&st, &m, &next).choice, Some(crate::game::ChoiceOutcome::Reject));
    }
}
