//! Playing single games on `A_n` between pluggable agents, and the move-list trace format
//! that records a play and replays it with every move re-validated.
//!
//! ```text
//! game A_n n=3 identity=on
//! init s0t s3t | minimal 1
//! witness 0 1 s0 t | minimal 2
//! outcome forall-wins after 1 rounds: ...
//! ```

use std::fmt;

use crate::error::{RelicError, Result};

use super::an::{An, Word};
use super::grid::{GridFailure, GridPlayer};
use super::network::{Game, GameState, Move, Network};
use super::script::ScriptPlayer;

/// Who produced `∃`'s answer to a move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Responder {
    Grid,
    /// The given index into the minimal responses.
    Minimal(usize),
}

pub trait ForallAgent {
    /// `None` ends the play with `∃` surviving.
    fn next_move(&mut self, game: &Game<'_, An>, st: &GameState<Word>) -> Result<Option<Move<Word>>>;
}

pub trait ExistsAgent {
    /// On failure, the responder is recorded with the move it gave up on.
    fn respond(&mut self, game: &Game<'_, An>, st: &GameState<Word>, m: &Move<Word>) -> std::result::Result<(GameState<Word>, Responder), (Responder, String)>;
}

impl ForallAgent for ScriptPlayer {
    fn next_move(&mut self, game: &Game<'_, An>, st: &GameState<Word>) -> Result<Option<Move<Word>>> {
        ScriptPlayer::next_move(self, game, st).map_err(RelicError::Invalid)
    }
}

impl ExistsAgent for GridPlayer {
    fn respond(&mut self, game: &Game<'_, An>, st: &GameState<Word>, m: &Move<Word>) -> std::result::Result<(GameState<Word>, Responder), (Responder, String)> {
        GridPlayer::respond(self, game, st, m).map(|r| (r, Responder::Grid)).map_err(|e| match e {
            GridFailure::OutOfContract { .. } => (Responder::Grid, format!("out of contract: {e}")),
            GridFailure::Stuck(_) => (Responder::Grid, e.to_string()),
        })
    }
}

/// `∀` driven by a callback, e.g. a prompt.
pub struct FnForall<F>(pub F);

impl<F: FnMut(&GameState<Word>) -> Result<Option<Move<Word>>>> ForallAgent for FnForall<F> {
    fn next_move(&mut self, _: &Game<'_, An>, st: &GameState<Word>) -> Result<Option<Move<Word>>> {
        (self.0)(st)
    }
}

/// `∃` choosing among the minimal responses through a callback.
pub struct MinimalExists<F>(pub F);

impl<F: FnMut(&GameState<Word>, &Move<Word>, &[GameState<Word>]) -> usize> ExistsAgent for MinimalExists<F> {
    fn respond(&mut self, game: &Game<'_, An>, st: &GameState<Word>, m: &Move<Word>) -> std::result::Result<(GameState<Word>, Responder), (Responder, String)> {
        let rs = game.minimal_responses(st, m);
        let i = (self.0)(st, m, &rs);
        let r = rs.get(i).cloned().ok_or_else(|| (Responder::Minimal(i), format!("no minimal response {i} (there are {})", rs.len())))?;
        Ok((r, Responder::Minimal(i)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    ForallWins { rounds: usize, reason: String },
    /// `∀` stopped, or the round cap was hit.
    ExistsSurvives { rounds: usize },
    /// `∃` had no answer; for the grid strategy this includes moves past its range.
    ExistsGaveUp { rounds: usize, reason: String },
}

impl Outcome {
    pub fn forall_won(&self) -> bool {
        matches!(self, Outcome::ForallWins { .. })
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::ForallWins { rounds, reason } => write!(f, "forall-wins after {rounds} rounds: {reason}"),
            Outcome::ExistsSurvives { rounds } => write!(f, "exists-survives after {rounds} rounds"),
            Outcome::ExistsGaveUp { rounds, reason } => write!(f, "exists-gave-up after {rounds} rounds: {reason}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub mv: Move<Word>,
    pub responder: Responder,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub n: usize,
    pub with_identity: bool,
    pub steps: Vec<TraceStep>,
    pub outcome: Outcome,
    /// The final position.
    pub last: GameState<Word>,
}

fn empty() -> GameState<Word> {
    GameState {
        net: Network::empty(),
        goal: None,
    }
}

/// Play until `∀` wins, stops, `∃` gives up, or `max_rounds` moves after the opening.
/// A move `∃` gave up on is the last step of the trace.
pub fn play(game: &Game<'_, An>, forall: &mut dyn ForallAgent, exists: &mut dyn ExistsAgent, max_rounds: usize) -> Result<Trace> {
    let mut st = empty();
    let mut steps = Vec::new();
    let rounds = |steps: &Vec<TraceStep>| steps.len().saturating_sub(1);
    let outcome = loop {
        if !steps.is_empty() && rounds(&steps) >= max_rounds {
            break Outcome::ExistsSurvives { rounds: rounds(&steps) };
        }
        let Some(m) = forall.next_move(game, &st)? else {
            break Outcome::ExistsSurvives { rounds: rounds(&steps) };
        };
        if steps.is_empty() != matches!(m, Move::Init { .. }) {
            return Err(RelicError::Invalid(format!("`{}`: the opening move comes first and only once", game.show_move(&m))));
        }
        game.playable(&st, &m)
            .map_err(|e| RelicError::Invalid(format!("`{}` is not playable: {e}", game.show_move(&m))))?;
        let (next, responder) = match exists.respond(game, &st, &m) {
            Ok(r) => r,
            Err((responder, reason)) => {
                let done = rounds(&steps);
                steps.push(TraceStep { mv: m, responder });
                break Outcome::ExistsGaveUp { rounds: done, reason };
            }
        };
        let v = game.apply_move(&st, &m, &next);
        steps.push(TraceStep { mv: m, responder });
        st = next;
        if v.forall_wins {
            let reason = v.reason.unwrap_or_else(|| "∀ wins".into());
            break Outcome::ForallWins { rounds: rounds(&steps), reason };
        }
    };
    Ok(Trace {
        n: game.s.n,
        with_identity: game.with_identity,
        steps,
        outcome,
        last: st,
    })
}

impl Trace {
    pub fn render(&self, game: &Game<'_, An>) -> String {
        let mut out = format!("game A_n n={} identity={}\n", self.n, if self.with_identity { "on" } else { "off" });
        for s in &self.steps {
            let who = match s.responder {
                Responder::Grid => "grid".to_string(),
                Responder::Minimal(i) => format!("minimal {i}"),
            };
            out.push_str(&format!("{} | {who}\n", game.show_move(&s.mv)));
        }
        out.push_str(&format!("outcome {}\n", self.outcome));
        out
    }
}

fn trace_error(line: usize, msg: impl Into<String>) -> RelicError {
    RelicError::Invalid(format!("trace line {line}: {}", msg.into()))
}

/// A parsed but not yet validated trace.
#[derive(Debug, Clone)]
pub struct TraceLog {
    pub n: usize,
    pub with_identity: bool,
    pub steps: Vec<(usize, String, Responder)>,
    pub outcome: Option<String>,
}

pub fn parse_trace(text: &str) -> Result<TraceLog> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (no, head) = lines.next().ok_or_else(|| trace_error(1, "empty trace"))?;
    let parts: Vec<&str> = head.split_whitespace().collect();
    let (n, with_identity) = match parts.as_slice() {
        ["game", "A_n", n, id] => {
            let n = n.strip_prefix("n=").and_then(|v| v.parse().ok()).ok_or_else(|| trace_error(no, "expected n=<number>"))?;
            let id = match *id {
                "identity=on" => true,
                "identity=off" => false,
                _ => return Err(trace_error(no, "expected identity=on or identity=off")),
            };
            (n, id)
        }
        _ => return Err(trace_error(no, "expected `game A_n n=<n> identity=on|off`")),
    };
    let mut log = TraceLog {
        n,
        with_identity,
        steps: Vec::new(),
        outcome: None,
    };
    for (no, line) in lines {
        if log.outcome.is_some() {
            return Err(trace_error(no, "nothing may follow the outcome line"));
        }
        if let Some(rest) = line.strip_prefix("outcome ") {
            log.outcome = Some(rest.to_string());
            continue;
        }
        let (mv, who) = line.split_once('|').ok_or_else(|| trace_error(no, "expected `<move> | grid` or `<move> | minimal <i>`"))?;
        let who: Vec<&str> = who.split_whitespace().collect();
        let responder = match who.as_slice() {
            ["grid"] => Responder::Grid,
            ["minimal", i] => Responder::Minimal(i.parse().map_err(|_| trace_error(no, format!("bad response index `{i}`")))?),
            _ => return Err(trace_error(no, "unknown responder")),
        };
        log.steps.push((no, mv.trim().to_string(), responder));
    }
    Ok(log)
}

/// Re-run a trace: every move must be playable, every response is recomputed and checked
/// legal, and the recomputed outcome must match the recorded one when present.
pub fn replay(text: &str) -> Result<Trace> {
    let log = parse_trace(text)?;
    let an = An::new(log.n)?;
    let game = Game::new(&an, log.with_identity)?;
    let grid = log.steps.iter().any(|s| s.2 == Responder::Grid);
    if grid && log.steps.iter().any(|s| s.2 != Responder::Grid) {
        return Err(RelicError::Invalid("a trace cannot mix grid and minimal responses".into()));
    }
    let mut moves = Vec::new();
    for (no, text, _) in &log.steps {
        let m = game.parse_move(text).map_err(|e| trace_error(*no, e.to_string()))?;
        moves.push((*no, m));
    }
    let total = moves.len();
    let mut script = moves.clone().into_iter();
    let mut forall = FnForall(|_: &GameState<Word>| Ok(script.next().map(|(_, m)| m)));
    let trace = if grid {
        play(&game, &mut forall, &mut GridPlayer::new(log.n), usize::MAX)?
    } else {
        let mut picks = log.steps.iter().map(|s| match s.2 {
            Responder::Minimal(i) => i,
            Responder::Grid => unreachable!(),
        });
        let mut exists = MinimalExists(|_: &GameState<Word>, _: &Move<Word>, _: &[GameState<Word>]| picks.next().unwrap_or(usize::MAX));
        play(&game, &mut forall, &mut exists, usize::MAX)?
    };
    if trace.steps.len() < total {
        let no = moves[trace.steps.len()].0;
        return Err(trace_error(no, format!("the play already ended: {}", trace.outcome)));
    }
    if let Some(rec) = &log.outcome {
        if *rec != trace.outcome.to_string() {
            return Err(RelicError::Consistency(format!("recorded outcome `{rec}` but replay gives `{}`", trace.outcome)));
        }
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn script_against_first_response_round_trips() {
        let an = An::new(2).unwrap();
        let game = Game::new(&an, true).unwrap();
        let mut exists = MinimalExists(|_: &GameState<Word>, _: &Move<Word>, rs: &[GameState<Word>]| rs.len() - 1);
        let t = play(&game, &mut ScriptPlayer::new(2), &mut exists, 10).unwrap();
        assert!(t.outcome.forall_won(), "{}", t.outcome);
        let text = t.render(&game);
        assert!(text.starts_with("game A_n n=2 identity=on\ninit s0t s2t | minimal 1\n"));
        let again = replay(&text).unwrap();
        assert_eq!(again.render(&game), text);
    }

    #[test]
    fn grid_against_script_gives_up_past_its_range() {
        let an = An::new(3).unwrap();
        let game = Game::new(&an, true).unwrap();
        let t = play(&game, &mut ScriptPlayer::new(3), &mut GridPlayer::new(3), 10).unwrap();
        assert_eq!(t.steps.len(), 3);
        assert!(matches!(t.outcome, Outcome::ExistsGaveUp { rounds: 1, .. }), "{}", t.outcome);
        assert_eq!(replay(&t.render(&game)).unwrap().outcome, t.outcome);
    }

    #[test]
    fn tampered_traces_are_rejected() {
        let an = An::new(2).unwrap();
        let game = Game::new(&an, true).unwrap();
        let mut exists = MinimalExists(|_: &GameState<Word>, _: &Move<Word>, _: &[GameState<Word>]| 0);
        let text = play(&game, &mut ScriptPlayer::new(2), &mut exists, 10).unwrap().render(&game);
        let wrong_outcome = text.replace("forall-wins after", "forall-wins  after");
        assert!(replay(&wrong_outcome).is_err());
        let mixed = text.replacen("| minimal 0", "| grid", 1);
        assert!(replay(&mixed).is_err());
        let bad_index = text.replacen("| minimal 0", "| minimal 9", 1);
        assert!(replay(&bad_index).is_err());
        assert!(replay("game A_n n=2\n").is_err());
    }
}
