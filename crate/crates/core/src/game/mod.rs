//! Representation games on ordered structures, the word structures `A_n`, and the
//! scripted and grid-based strategies for both players.

pub mod an;
pub mod grid;
pub mod network;
pub mod play;
pub mod script;
pub mod search;
pub mod structure;
pub mod verify;

pub use an::{An, Word};
pub use grid::{Grid, GridFailure, GridPlayer};
pub use network::{ChoiceOutcome, Forb, Game, GameState, Goal, Move, MoveVerdict, Network};
pub use structure::{Finite, Structure};
pub use play::{play, replay, ExistsAgent, FnForall, ForallAgent, MinimalExists, Outcome, Responder, Trace};
pub use script::{script_minimax, ScriptFailure, ScriptOutcome, ScriptPlayer};
pub use verify::{verify_game_lemmas, Coverage, ExistsReport, ForallReport, GridViolation, LemmaOptions, LemmaReport};
pub use search::{bounded_nonrep_search, bounded_search, parse_universe, AlgebraSearch, Reply, Saturation, SearchOutcome, SearchVerdict, WinTree, SEMANTICS};
