use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use relic::algebra::{enumerate_small, parse_algebra, ClassTag, OrderedAlgebra};
use relic::config::{OutputFormat, RunConfig, BUDGET_ENV, DEFAULT_BUDGET};
use relic::correctness::{denote, parse_triple, partially_correct_rel, totally_correct_rel, ProgramEnv};
use relic::game::{
    bounded_nonrep_search, bounded_search, parse_universe, play, replay, verify_game_lemmas, An, FnForall, ForallAgent,
    Game, GameState, GridPlayer, LemmaOptions, MinimalExists, ExistsAgent, Move, ScriptPlayer, SearchVerdict, Word, SEMANTICS,
};
use relic::law::{check_validity, eval_term, parse_formula, parse_term, preset_suite, CheckMode, Domain, Formula, Verdict};
use relic::repr::{
    represent_dual_zero, represent_preconstellation, represent_weak_zero, represent_zero_angelic, verify_embedding, zareckii,
    DualZeroMode, Representation, Symbol,
};
use relic::syntax::parse_env;
use relic::{RelicError, Result};

/// Relational semantics of non-deterministic programs: operations, correctness,
/// representations, law checking and representation games.
#[derive(Parser)]
#[command(name = "relic", version)]
struct Cli {
    /// Cap on evaluations or visited positions.
    #[arg(long, global = true, env = BUDGET_ENV, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; all cores when omitted.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    output: Output,
    /// Compute every redundant characterization and fail on disagreement.
    #[arg(long, global = true)]
    self_check: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Relations.
    #[command(subcommand)]
    Rel(RelCmd),
    /// Hoare triples.
    #[command(subcommand)]
    Hoare(HoareCmd),
    /// Laws and quasi-equations.
    #[command(subcommand)]
    Law(LawCmd),
    /// Relational representations of finite algebras.
    #[command(subcommand)]
    Repr(ReprCmd),
    /// Representation games.
    #[command(subcommand)]
    Game(GameCmd),
    /// Finite ordered algebras.
    #[command(subcommand)]
    Algebra(AlgebraCmd),
}

#[derive(Subcommand)]
enum RelCmd {
    /// Evaluate a term over the relations bound in an environment file.
    Eval {
        #[arg(long)]
        env: String,
        #[arg(long)]
        term: String,
    },
}

#[derive(Subcommand)]
enum HoareCmd {
    /// Decide `{e} prog {f}` over the programs bound in an environment file.
    Check {
        #[arg(long)]
        env: String,
        #[arg(long)]
        triple: String,
        #[arg(long, value_enum, default_value_t = Correctness::Total)]
        mode: Correctness,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Correctness {
    Partial,
    Total,
}

#[derive(Subcommand)]
enum LawCmd {
    /// Check formulas, given inline, in a file (one per line), or as a named preset.
    Check(LawArgs),
}

#[derive(Args)]
struct LawArgs {
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    formula: Option<String>,
    #[arg(long)]
    preset: Option<String>,
    /// Size of the parametrized preset families.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Ignored for presets, which carry their own domain.
    #[arg(long, default_value = "REL")]
    domain: String,
    /// Carrier sizes; repeat for several.
    #[arg(long = "size", default_values_t = [2])]
    sizes: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
    mode: Mode,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Random,
}

#[derive(Subcommand)]
enum ReprCmd {
    /// Build a representation and print it as relation literals.
    Build {
        #[arg(long)]
        algebra: String,
        #[arg(long, value_enum)]
        construction: Construction,
    },
    /// Check a representation, built or read from a file, for being an embedding.
    Verify {
        #[arg(long)]
        algebra: String,
        #[arg(long, value_enum, required_unless_present = "rep")]
        construction: Option<Construction>,
        /// A space declaration and one `name = {...}` line per element.
        #[arg(long, requires = "signature")]
        rep: Option<String>,
        /// Symbols to check, e.g. "; <= 0=empty".
        #[arg(long)]
        signature: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Construction {
    Zareckii,
    WeakZero,
    Zero,
    DualZeroTotal,
    DualZeroDemonic,
    Preconstellation,
}

#[derive(Subcommand)]
enum GameCmd {
    /// Check the script for `∀` and the grid strategy for `∃` on `A_n`.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        /// Largest `n` whose grid check is exhaustive.
        #[arg(long, default_value_t = 4)]
        exhaustive_up_to: usize,
        #[arg(long, default_value_t = 3)]
        init_len: usize,
        #[arg(long)]
        no_identity: bool,
    },
    /// Play one game on `A_n` and print its trace.
    Play {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = ForallSide::Script)]
        forall: ForallSide,
        #[arg(long, value_enum, default_value_t = ExistsSide::Grid)]
        exists: ExistsSide,
        #[arg(long, default_value_t = 64)]
        max_rounds: usize,
        #[arg(long)]
        no_identity: bool,
        /// Also write the trace to this file.
        #[arg(long)]
        trace: Option<String>,
    },
    /// Search for a forced `∀` win within `depth` moves.
    Search {
        #[arg(long, conflicts_with = "an", required_unless_present = "an")]
        algebra: Option<String>,
        /// Search `A_n` restricted to `--universe` instead of a finite algebra.
        #[arg(long, requires = "universe")]
        an: Option<usize>,
        #[arg(long)]
        universe: Option<String>,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        no_identity: bool,
    },
    /// Re-validate a trace written by `game play`.
    Replay { file: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum ForallSide {
    Script,
    Manual,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExistsSide {
    Grid,
    Manual,
}

#[derive(Subcommand)]
enum AlgebraCmd {
    /// Check class membership; every class when none is given.
    Check {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        class: Option<String>,
    },
    /// Every algebra of a class up to isomorphism.
    Enumerate {
        #[arg(long)]
        class: String,
        #[arg(long)]
        size: usize,
    },
}

/// What a command produced: an exit status, human text, and one record per line.
struct Report {
    code: u8,
    text: String,
    records: Vec<Value>,
}

impl Report {
    fn new(code: u8, text: String, record: Value) -> Report {
        Report {
            code,
            text,
            records: vec![record],
        }
    }
}

const OK: u8 = 0;
const FOUND: u8 = 1;
const INCONCLUSIVE: u8 = 3;

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| RelicError::Invalid(format!("{path}: {e}")))
}

/// Prefix syntax errors with the file they came from.
fn in_file<T>(path: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        RelicError::Syntax(s) => RelicError::Invalid(format!("{path}:{s}")),
        other => RelicError::Invalid(format!("{path}: {other}")),
    })
}

fn load_algebra(path: &str) -> Result<OrderedAlgebra> {
    in_file(path, parse_algebra(&read(path)?))
}

fn rel_eval(env: &str, term: &str) -> Result<Report> {
    let e = in_file(env, parse_env(&read(env)?))?;
    let t = parse_term(term)?;
    let assignment: BTreeMap<_, _> = e.bindings.clone();
    let value = eval_term(&t, &e.space, &assignment)?;
    let shown = value.as_ref().map_or("undefined".to_string(), |r| r.to_string());
    Ok(Report::new(
        OK,
        format!("{t} = {shown}\n"),
        json!({"command": "rel eval", "term": t.to_string(), "defined": value.is_some(), "value": shown}),
    ))
}

fn hoare_check(cfg: &RunConfig, env: &str, triple: &str, mode: Correctness) -> Result<Report> {
    let e = in_file(env, parse_env(&read(env)?))?;
    let penv = ProgramEnv::from_env(&e)?;
    let t = parse_triple(triple, &penv)?;
    let rho = denote(&t.prog, &penv)?;
    let (holds, kind) = match mode {
        Correctness::Partial => (partially_correct_rel(&t.pre, &rho, &t.post, cfg.self_check)?, "partial"),
        Correctness::Total => (totally_correct_rel(&t.pre, &rho, &t.post, cfg.self_check)?, "total"),
    };
    let text = format!("{triple}: {kind} correctness {}\nprogram relation {rho}\n", if holds { "holds" } else { "fails" });
    Ok(Report::new(
        if holds { OK } else { FOUND },
        text,
        json!({"command": "hoare check", "triple": triple, "mode": kind, "holds": holds, "relation": rho.to_string()}),
    ))
}

fn verdict_record(name: &str, f: &Formula, domain: Domain, v: &Verdict) -> Value {
    match v {
        Verdict::Valid { sizes, instances, exhaustive } => json!({
            "formula": name, "text": f.to_string(), "domain": domain, "verdict": "valid",
            "sizes": sizes, "instances": instances.to_string(), "exhaustive": exhaustive,
        }),
        Verdict::Counterexample(c) => json!({
            "formula": name, "text": f.to_string(), "domain": domain, "verdict": "counterexample",
            "space": c.space.to_string(),
            "assignment": c.assignment.iter().map(|(v, r)| json!([v, r.to_string()])).collect::<Vec<_>>(),
            "fails": c.failed,
        }),
    }
}

fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::Valid { sizes, instances, exhaustive } => {
            let how = if *exhaustive { "exhaustively" } else { "on random samples" };
            format!("valid at sizes {sizes:?}, {instances} instances checked {how}\n")
        }
        Verdict::Counterexample(c) => format!("counterexample\n{}", c.render()),
    }
}

fn law_check(cfg: &RunConfig, a: &LawArgs) -> Result<Report> {
    let mode = match a.mode {
        Mode::Exhaustive => CheckMode::Exhaustive,
        Mode::Random => CheckMode::Random { seed: cfg.seed, samples: a.samples },
    };
    let mut text = String::new();
    let mut records = Vec::new();
    let mut code = OK;
    if let Some(name) = &a.preset {
        for p in preset_suite(name, a.n)? {
            let v = check_validity(&p.formula, p.domain, &a.sizes, p.mode, cfg.budget)?;
            let as_expected = v.is_valid() == p.expect_valid;
            if !as_expected {
                code = FOUND;
            }
            text.push_str(&format!(
                "{} over {}: {}{}",
                p.name,
                p.domain.as_str(),
                if as_expected { "" } else { "UNEXPECTED " },
                verdict_text(&v)
            ));
            let mut r = verdict_record(&p.name, &p.formula, p.domain, &v);
            r["expected"] = json!(if p.expect_valid { "valid" } else { "counterexample" });
            records.push(r);
        }
        return Ok(Report { code, text, records });
    }
    let src = a.formula.as_deref().expect("clap requires a formula or a preset");
    let domain: Domain = a.domain.parse()?;
    let from_file = std::path::Path::new(src).is_file();
    let body = if from_file { read(src)? } else { src.to_string() };
    let lines: Vec<(usize, &str)> = if from_file {
        body.lines().enumerate().map(|(i, l)| (i, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#')).collect()
    } else {
        vec![(0, body.as_str())]
    };
    for (lineno, line) in lines {
        let f = parse_formula(line).map_err(|e| match (e, from_file) {
            (RelicError::Syntax(s), true) => RelicError::Invalid(format!("{src}:{}", s.shifted(lineno))),
            (e, _) => e,
        })?;
        let v = check_validity(&f, domain, &a.sizes, mode, cfg.budget)?;
        if !v.is_valid() {
            code = FOUND;
        }
        text.push_str(&format!("{f}: {}", verdict_text(&v)));
        records.push(verdict_record(line, &f, domain, &v));
    }
    Ok(Report { code, text, records })
}

fn build(alg: &OrderedAlgebra, c: Construction) -> Result<Representation> {
    match c {
        Construction::Zareckii => zareckii(alg),
        Construction::WeakZero => represent_weak_zero(alg),
        Construction::Zero => represent_zero_angelic(alg),
        Construction::DualZeroTotal => represent_dual_zero(alg, DualZeroMode::TotalAngelic),
        Construction::DualZeroDemonic => represent_dual_zero(alg, DualZeroMode::Demonic),
        Construction::Preconstellation => represent_preconstellation(alg),
    }
}

const SYMBOLS: [Symbol; 11] = [
    Symbol::Angelic,
    Symbol::Demonic,
    Symbol::Constellation,
    Symbol::Union,
    Symbol::DemonicJoin,
    Symbol::Inclusion,
    Symbol::Refinement,
    Symbol::Identity,
    Symbol::ZeroEmpty,
    Symbol::ZeroFull,
    Symbol::ZeroAbort,
];

fn parse_signature(text: &str) -> Result<Vec<Symbol>> {
    text.split_whitespace()
        .map(|w| {
            SYMBOLS.into_iter().find(|s| s.to_string() == w).ok_or_else(|| {
                let known: Vec<String> = SYMBOLS.iter().map(ToString::to_string).collect();
                RelicError::UnknownName(format!("symbol `{w}` (known: {})", known.join(" ")))
            })
        })
        .collect()
}

fn signature_text(rep: &Representation) -> String {
    rep.signature.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn repr_build(algebra: &str, c: Construction) -> Result<Report> {
    let alg = load_algebra(algebra)?;
    let rep = build(&alg, c)?;
    let text = format!("# signature {}\n{}", signature_text(&rep), rep.render());
    let images: Vec<Value> = (0..alg.size()).map(|a| json!([alg.name(a), rep.image(a).to_string()])).collect();
    Ok(Report::new(
        OK,
        text,
        json!({"command": "repr build", "base": rep.base.to_string(), "signature": signature_text(&rep), "images": images}),
    ))
}

fn repr_verify(algebra: &str, c: Option<Construction>, rep: Option<&str>, signature: Option<&str>) -> Result<Report> {
    let alg = load_algebra(algebra)?;
    let rep = match rep {
        Some(path) => {
            let env = in_file(path, parse_env(&read(path)?))?;
            let images = (0..alg.size()).map(|a| env.get(alg.name(a)).cloned()).collect::<Result<Vec<_>>>()?;
            Representation {
                source: alg.clone(),
                base: env.space.clone(),
                images,
                signature: parse_signature(signature.unwrap_or_default())?,
            }
        }
        None => {
            let mut r = build(&alg, c.expect("clap requires a construction or a file"))?;
            if let Some(s) = signature {
                r.signature = parse_signature(s)?;
            }
            r
        }
    };
    let report = verify_embedding(&rep)?;
    Ok(Report::new(
        if report.is_embedding() { OK } else { FOUND },
        format!("signature {}\n{}", signature_text(&rep), report.render(&alg)),
        json!({"command": "repr verify", "signature": signature_text(&rep), "embedding": report.is_embedding(), "violations": report.violations}),
    ))
}

fn algebra_check(algebra: &str, class: Option<&str>) -> Result<Report> {
    let alg = load_algebra(algebra)?;
    let tags = match class {
        Some(c) => vec![c.parse::<ClassTag>()?],
        None => ClassTag::ALL.to_vec(),
    };
    let mut text = String::new();
    let mut records = Vec::new();
    let mut code = OK;
    for tag in tags {
        let r = alg.check_class(tag);
        if class.is_some() && !r.is_member() {
            code = FOUND;
        }
        text.push_str(&r.render(&alg));
        if !text.ends_with('\n') {
            text.push('\n');
        }
        records.push(json!({"command": "algebra check", "class": tag, "member": r.is_member(), "report": r}));
    }
    Ok(Report { code, text, records })
}

fn algebra_enumerate(class: &str, size: usize) -> Result<Report> {
    let tag: ClassTag = class.parse()?;
    let algs = enumerate_small(tag, size)?;
    let mut text = format!("# {} algebras of class {tag} with at most {size} elements\n", algs.len());
    let mut records = Vec::new();
    for a in &algs {
        text.push_str(&format!("\n{a}"));
        records.push(json!({"command": "algebra enumerate", "class": tag, "size": a.size(), "algebra": a.to_string()}));
    }
    Ok(Report { code: OK, text, records })
}

fn game_verify(cfg: &RunConfig, n: usize, samples: u64, exhaustive_up_to: usize, init_len: usize, no_identity: bool) -> Result<Report> {
    let opts = LemmaOptions {
        budget: cfg.budget,
        seed: cfg.seed,
        samples,
        exhaustive_up_to,
        init_len,
        with_identity: !no_identity,
    };
    let r = verify_game_lemmas(n, &opts)?;
    let code = if r.holds() {
        OK
    } else if r.inconclusive() && r.forall.failure.is_none() && r.exists.strategy_failures == 0 && r.exists.invariant_failure_count() == 0 {
        INCONCLUSIVE
    } else {
        FOUND
    };
    let mut record = serde_json::to_value(&r).map_err(|e| RelicError::Invalid(e.to_string()))?;
    record["command"] = json!("game verify");
    record["holds"] = json!(r.holds());
    Ok(Report::new(code, r.render(), record))
}

fn prompt(text: &str) -> io::Result<Option<String>> {
    let mut err = io::stderr();
    write!(err, "{text}")?;
    err.flush()?;
    let mut line = String::new();
    if io::stdin().lock().read_line(&mut line)? == 0 {
        return Ok(None);
    }
    Ok(Some(line.trim().to_string()))
}

fn game_play(n: usize, forall: ForallSide, exists: ExistsSide, max_rounds: usize, no_identity: bool, trace: Option<&str>) -> Result<Report> {
    let an = An::new(n)?;
    let game = Game::new(&an, !no_identity)?;
    let io_err = |e: io::Error| RelicError::Invalid(format!("reading a move: {e}"));
    let mut script = ScriptPlayer::new(n);
    let mut manual_forall = FnForall(|st: &GameState<Word>| -> Result<Option<Move<Word>>> {
        eprint!("{}", game.render(st));
        loop {
            match prompt("forall move (empty line to stop)> ").map_err(io_err)? {
                None => return Ok(None),
                Some(l) if l.is_empty() => return Ok(None),
                Some(l) => match game.parse_move(&l).and_then(|m| game.playable(st, &m).map(|_| m).map_err(RelicError::Invalid)) {
                    Ok(m) => return Ok(Some(m)),
                    Err(e) => eprintln!("{e}"),
                },
            }
        }
    });
    let mut grid = GridPlayer::new(n);
    let mut manual_exists = MinimalExists(|_: &GameState<Word>, m: &Move<Word>, rs: &[GameState<Word>]| -> usize {
        eprintln!("responses to {}:", game.show_move(m));
        for (i, r) in rs.iter().enumerate() {
            eprintln!("[{i}]\n{}", game.render(r));
        }
        loop {
            match prompt("exists response index> ") {
                Ok(Some(l)) => match l.parse::<usize>() {
                    Ok(i) if i < rs.len() => return i,
                    _ => eprintln!("enter a number below {}", rs.len()),
                },
                _ => return usize::MAX,
            }
        }
    });
    let f: &mut dyn ForallAgent = match forall {
        ForallSide::Script => &mut script,
        ForallSide::Manual => &mut manual_forall,
    };
    let e: &mut dyn ExistsAgent = match exists {
        ExistsSide::Grid => &mut grid,
        ExistsSide::Manual => &mut manual_exists,
    };
    let t = play(&game, f, e, max_rounds)?;
    let text = t.render(&game);
    if let Some(path) = trace {
        std::fs::write(path, &text).map_err(|e| RelicError::Invalid(format!("{path}: {e}")))?;
    }
    let moves: Vec<String> = t.steps.iter().map(|s| game.show_move(&s.mv)).collect();
    Ok(Report::new(
        OK,
        text,
        json!({"command": "game play", "n": n, "moves": moves, "outcome": t.outcome.to_string(), "forall_won": t.outcome.forall_won()}),
    ))
}

fn game_search(cfg: &RunConfig, algebra: Option<&str>, an: Option<usize>, universe: Option<&str>, depth: usize, no_identity: bool) -> Result<Report> {
    let with_identity = !no_identity;
    if let Some(n) = an {
        let s = An::new(n)?;
        let game = Game::new(&s, with_identity)?;
        let universe = parse_universe(&s, universe.unwrap_or_default())?;
        let out = bounded_search(&game, &universe, depth, cfg.budget);
        return Ok(search_report(&out.verdict, out.positions, |t| t.render(&game), None));
    }
    let path = algebra.expect("clap requires an algebra or A_n");
    let alg = load_algebra(path)?;
    if with_identity && alg.identity().is_none() {
        return Err(RelicError::Invalid(format!("{path} declares no identity; pass --no-identity")));
    }
    let r = bounded_nonrep_search(&alg, depth, with_identity, cfg.budget)?;
    let game_s = relic::game::Finite::new(alg.clone())?;
    let game = Game::new(&game_s, with_identity)?;
    let mut rep = search_report(&r.outcome.verdict, r.outcome.positions, |t| t.render(&game), None);
    if let Some(sat) = &r.saturation {
        rep.text.push_str(&format!(
            "saturated {} plays on {} nodes; the read-off map is {}\n{}",
            sat.plays,
            sat.nodes,
            if sat.report.is_embedding() { "an embedding" } else { "not an embedding" },
            sat.report.render(&alg)
        ));
        rep.text.push_str(&sat.representation.render());
        rep.records[0]["saturation"] = json!({
            "plays": sat.plays, "nodes": sat.nodes, "embedding": sat.report.is_embedding(),
            "representation": sat.representation.render(),
        });
        if !sat.report.is_embedding() {
            rep.code = FOUND;
        }
    }
    if let Some(note) = &r.saturation_note {
        rep.text.push_str(&format!("no saturation: {note}\n"));
        rep.records[0]["saturation_note"] = json!(note);
    }
    Ok(rep)
}

fn search_report<E>(verdict: &SearchVerdict<E>, positions: u64, render: impl Fn(&relic::game::WinTree<E>) -> String, _: Option<()>) -> Report {
    match verdict {
        SearchVerdict::NotRepresentable { depth, tree } => Report::new(
            FOUND,
            format!("not representable {SEMANTICS}: forall wins within {depth} moves ({positions} positions)\n{}", render(tree)),
            json!({"command": "game search", "verdict": "not-representable", "semantics": SEMANTICS, "depth": depth, "positions": positions, "tree_size": tree.size()}),
        ),
        SearchVerdict::Unknown { reason, budget_exhausted } => Report::new(
            if *budget_exhausted { INCONCLUSIVE } else { OK },
            format!("unknown: {reason} ({positions} positions)\n"),
            json!({"command": "game search", "verdict": "unknown", "reason": reason, "budget_exhausted": budget_exhausted, "positions": positions}),
        ),
    }
}

fn game_replay(file: &str) -> Result<Report> {
    let text = read(file)?;
    let t = in_file(file, replay(&text))?;
    let an = An::new(t.n)?;
    let game = Game::new(&an, t.with_identity)?;
    Ok(Report::new(
        OK,
        format!("{}replayed {} moves\n", t.render(&game), t.steps.len()),
        json!({"command": "game replay", "n": t.n, "moves": t.steps.len(), "outcome": t.outcome.to_string(), "valid": true}),
    ))
}

fn run(cli: &Cli, cfg: &RunConfig) -> Result<Report> {
    match &cli.command {
        Command::Rel(RelCmd::Eval { env, term }) => rel_eval(env, term),
        Command::Hoare(HoareCmd::Check { env, triple, mode }) => hoare_check(cfg, env, triple, *mode),
        Command::Law(LawCmd::Check(a)) => law_check(cfg, a),
        Command::Repr(ReprCmd::Build { algebra, construction }) => repr_build(algebra, *construction),
        Command::Repr(ReprCmd::Verify { algebra, construction, rep, signature }) => {
            repr_verify(algebra, *construction, rep.as_deref(), signature.as_deref())
        }
        Command::Algebra(AlgebraCmd::Check { algebra, class }) => algebra_check(algebra, class.as_deref()),
        Command::Algebra(AlgebraCmd::Enumerate { class, size }) => algebra_enumerate(class, *size),
        Command::Game(GameCmd::Verify { n, samples, exhaustive_up_to, init_len, no_identity }) => {
            game_verify(cfg, *n, *samples, *exhaustive_up_to, *init_len, *no_identity)
        }
        Command::Game(GameCmd::Play { n, forall, exists, max_rounds, no_identity, trace }) => {
            game_play(*n, *forall, *exists, *max_rounds, *no_identity, trace.as_deref())
        }
        Command::Game(GameCmd::Search { algebra, an, universe, depth, no_identity }) => {
            game_search(cfg, algebra.as_deref(), *an, universe.as_deref(), *depth, *no_identity)
        }
        Command::Game(GameCmd::Replay { file }) => game_replay(file),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = RunConfig {
        budget: cli.budget,
        seed: cli.seed,
        workers: cli.workers,
        output: match cli.output {
            Output::Text => OutputFormat::Text,
            Output::Structured => OutputFormat::Structured,
        },
        self_check: cli.self_check,
    };
    let result = cfg.validate().and_then(|_| cfg.install(|| run(&cli, &cfg)).and_then(|r| r));
    match result {
        Ok(report) => {
            let mut out = io::stdout().lock();
            let written = match cfg.output {
                OutputFormat::Text => out.write_all(report.text.as_bytes()),
                OutputFormat::Structured => report.records.iter().try_for_each(|r| writeln!(out, "{r}")),
            };
            if written.is_err() {
                return ExitCode::from(2);
            }
            ExitCode::from(report.code)
        }
        Err(e) => {
            match cfg.output {
                OutputFormat::Text => eprintln!("error: {e}"),
                OutputFormat::Structured => println!("{}", json!({"error": e.to_string()})),
            }
            ExitCode::from(2)
        }
    }
}
