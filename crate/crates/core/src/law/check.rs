use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{RelicError, Result};
use crate::program::ProgramRelation;
use crate::relation::Relation;
use crate::space::StateSpace;

use super::{Atom, Cmp, Const, Formula, Op, Term};

/// Largest carrier (including any fail element) that random mode samples over.
pub const MAX_RANDOM_CARRIER: usize = 8;

/// The family of relations variables range over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Domain {
    /// All relations on `X`.
    #[serde(rename = "REL")]
    Rel,
    /// Left-total relations on `X`.
    #[serde(rename = "LTREL")]
    Ltrel,
    /// Relations with `dom = ran = X`.
    #[serde(rename = "TOTAL")]
    Total,
    /// `Ltrel₀` over `X` extended with a fail element.
    #[serde(rename = "LTREL0")]
    Ltrel0,
}

impl Domain {
    pub const ALL: [Domain; 4] = [Domain::Rel, Domain::Ltrel, Domain::Total, Domain::Ltrel0];

    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Rel => "REL",
            Domain::Ltrel => "LTREL",
            Domain::Total => "TOTAL",
            Domain::Ltrel0 => "LTREL0",
        }
    }

    /// The carrier used for `|X| = n`.
    pub fn space(self, n: usize) -> Result<Arc<StateSpace>> {
        if n == 0 {
            return Err(RelicError::Invalid("carrier sizes start at 1".into()));
        }
        StateSpace::numbered(n, self == Domain::Ltrel0)
    }

    pub fn contains(self, r: &Relation) -> bool {
        let c = r.classify();
        match self {
            Domain::Rel => true,
            Domain::Ltrel => c.is_left_total,
            Domain::Total => c.is_total,
            Domain::Ltrel0 => c.is_in_ltrel0 == Some(true),
        }
    }

    /// Every member, sorted by relation code.
    pub fn members(self, space: &Arc<StateSpace>) -> Result<Vec<Relation>> {
        let mut out: Vec<Relation> = match self {
            Domain::Ltrel0 => ProgramRelation::all_over(space)?
                .into_iter()
                .map(ProgramRelation::into_relation)
                .collect(),
            _ => Relation::all_over(space)?.into_iter().filter(|r| self.contains(r)).collect(),
        };
        out.sort_by_key(Relation::code);
        Ok(out)
    }

    fn sample(self, space: &Arc<StateSpace>, rng: &mut ChaCha8Rng) -> Relation {
        let n = space.size();
        let bits = if n * n == 64 { u64::MAX } else { (1u64 << (n * n)) - 1 };
        loop {
            let mut r = Relation::from_code(space, rng.gen::<u64>() & bits);
            if let Some(f) = space.fail() {
                for y in 0..n {
                    r.remove(f, y);
                }
                r.insert(f, f);
            }
            if self.contains(&r) {
                return r;
            }
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Domain {
    type Err = RelicError;

    fn from_str(s: &str) -> Result<Self> {
        Domain::ALL
            .into_iter()
            .find(|d| d.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| RelicError::UnknownName(format!("domain `{s}` (expected REL, LTREL, TOTAL or LTREL0)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    Exhaustive,
    Random { seed: u64, samples: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub space: Arc<StateSpace>,
    pub assignment: Vec<(String, Relation)>,
    /// The first conclusion that fails.
    pub failed: String,
}

impl Counterexample {
    /// Base-space declaration followed by one literal per variable.
    pub fn render(&self) -> String {
        let mut out = format!("{}\n", self.space);
        for (v, r) in &self.assignment {
            out.push_str(&format!("{v} = {r}\n"));
        }
        out.push_str(&format!("# fails: {}\n", self.failed));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// No counterexample among the instances tried at the listed sizes.
    Valid { sizes: Vec<usize>, instances: u128, exhaustive: bool },
    Counterexample(Counterexample),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid { .. })
    }
}

/// A term with variables resolved to positions and constants built for one carrier.
enum Compiled {
    Var(usize),
    Const(Relation),
    Op(Op, Box<Compiled>, Box<Compiled>),
}

fn constant(c: Const, space: &Arc<StateSpace>) -> Result<Relation> {
    Ok(match c {
        Const::Empty => Relation::empty(space),
        Const::Identity => Relation::diagonal(space),
        Const::Full => Relation::full(space),
        Const::Abort => ProgramRelation::abort(space)
            .map_err(|_| RelicError::Invalid("`Z` needs a carrier with a fail element (domain LTREL0)".into()))?
            .into_relation(),
    })
}

fn compile(t: &Term, vars: &[String], space: &Arc<StateSpace>) -> Result<Compiled> {
    Ok(match t {
        Term::Var(v) => Compiled::Var(
            vars.iter()
                .position(|w| w == v)
                .ok_or_else(|| RelicError::UnknownName(format!("unassigned variable `{v}`")))?,
        ),
        Term::Const(c) => Compiled::Const(constant(*c, space)?),
        Term::Op(op, l, r) => Compiled::Op(*op, Box::new(compile(l, vars, space)?), Box::new(compile(r, vars, space)?)),
    })
}

fn apply(op: Op, a: &Relation, b: &Relation) -> Result<Option<Relation>> {
    Ok(match op {
        Op::Angelic => Some(a.compose(b)?),
        Op::Demonic => Some(a.compose_demonic(b)?),
        Op::Constellation => a.product_constellation(b)?,
        Op::Union => Some(a.union(b)?),
        Op::DemonicJoin => Some(a.join_demonic(b)?),
    })
}

impl Compiled {
    /// `None` is the undefined value; it propagates through every operation.
    fn eval(&self, env: &[&Relation]) -> Result<Option<Relation>> {
        match self {
            Compiled::Var(i) => Ok(Some(env[*i].clone())),
            Compiled::Const(r) => Ok(Some(r.clone())),
            Compiled::Op(op, l, r) => {
                let Some(a) = l.eval(env)? else { return Ok(None) };
                let Some(b) = r.eval(env)? else { return Ok(None) };
                apply(*op, &a, &b)
            }
        }
    }
}

enum CompiledAtom {
    Cmp(Cmp, Compiled, Compiled),
    Exists(Compiled),
}

impl CompiledAtom {
    /// Atoms with an undefined side are false.
    fn holds(&self, env: &[&Relation]) -> Result<bool> {
        match self {
            CompiledAtom::Exists(t) => Ok(t.eval(env)?.is_some()),
            CompiledAtom::Cmp(c, l, r) => {
                let (Some(a), Some(b)) = (l.eval(env)?, r.eval(env)?) else { return Ok(false) };
                match c {
                    Cmp::Eq => Ok(a == b),
                    Cmp::Incl => a.includes_in(&b),
                    Cmp::Refines => a.refines_demonic(&b),
                }
            }
        }
    }
}

fn compile_atom(a: &Atom, vars: &[String], space: &Arc<StateSpace>) -> Result<CompiledAtom> {
    Ok(match a {
        Atom::Cmp(c, l, r) => CompiledAtom::Cmp(*c, compile(l, vars, space)?, compile(r, vars, space)?),
        Atom::Exists(t) => CompiledAtom::Exists(compile(t, vars, space)?),
    })
}

struct Instance {
    premises: Vec<CompiledAtom>,
    conclusions: Vec<CompiledAtom>,
    labels: Vec<String>,
}

impl Instance {
    fn new(f: &Formula, vars: &[String], space: &Arc<StateSpace>) -> Result<Self> {
        Ok(Instance {
            premises: f.premises.iter().map(|a| compile_atom(a, vars, space)).collect::<Result<_>>()?,
            conclusions: f.conclusions.iter().map(|a| compile_atom(a, vars, space)).collect::<Result<_>>()?,
            labels: f.conclusions.iter().map(ToString::to_string).collect(),
        })
    }

    /// The first failing conclusion when every premise holds.
    fn failure(&self, env: &[&Relation]) -> Result<Option<usize>> {
        for p in &self.premises {
            if !p.holds(env)? {
                return Ok(None);
            }
        }
        for (i, c) in self.conclusions.iter().enumerate() {
            if !c.holds(env)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }
}

/// Evaluate a term structurally. `None` means undefined.
pub fn eval_term(t: &Term, space: &Arc<StateSpace>, assignment: &BTreeMap<String, Relation>) -> Result<Option<Relation>> {
    let vars: Vec<String> = assignment.keys().cloned().collect();
    let env: Vec<&Relation> = assignment.values().collect();
    compile(t, &vars, space)?.eval(&env)
}

/// Greedily drop pairs while the instance stays in the domain and still fails.
fn minimize(inst: &Instance, domain: Domain, mut vals: Vec<Relation>) -> Result<Vec<Relation>> {
    loop {
        let mut changed = false;
        for k in 0..vals.len() {
            let pairs: Vec<(usize, usize)> = vals[k].pairs().collect();
            for (x, y) in pairs {
                let mut cand = vals[k].clone();
                cand.remove(x, y);
                if !domain.contains(&cand) {
                    continue;
                }
                let mut trial = vals.clone();
                trial[k] = cand;
                let env: Vec<&Relation> = trial.iter().collect();
                if inst.failure(&env)?.is_some() {
                    vals = trial;
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(vals);
        }
    }
}

fn report(inst: &Instance, domain: Domain, vars: &[String], space: &Arc<StateSpace>, vals: Vec<Relation>) -> Result<Verdict> {
    let vals = minimize(inst, domain, vals)?;
    let env: Vec<&Relation> = vals.iter().collect();
    let Some(i) = inst.failure(&env)? else {
        return Err(RelicError::Consistency("counterexample does not replay".into()));
    };
    Ok(Verdict::Counterexample(Counterexample {
        space: space.clone(),
        assignment: vars.iter().cloned().zip(vals).collect(),
        failed: inst.labels[i].clone(),
    }))
}

fn first_failure<F>(count: u64, build: F) -> Result<Option<Vec<Relation>>>
where
    F: Fn(u64) -> Result<(Vec<Relation>, bool)> + Sync,
{
    let hit = (0..count)
        .into_par_iter()
        .map(|i| build(i).map(|(vals, fails)| fails.then_some(vals)))
        .find_first(|r| !matches!(r, Ok(None)));
    hit.transpose().map(Option::flatten)
}

/// Decide a formula over every carrier size listed. Exhaustive mode walks assignments in
/// lexicographic order of member codes (first variable most significant) and reports the
/// first failure, so the verdict does not depend on the number of workers.
pub fn check_validity(f: &Formula, domain: Domain, sizes: &[usize], mode: CheckMode, budget: u64) -> Result<Verdict> {
    if sizes.is_empty() {
        return Err(RelicError::Invalid("at least one carrier size is required".into()));
    }
    if f.uses_const(Const::Abort) && domain != Domain::Ltrel0 {
        return Err(RelicError::Invalid("`Z` needs a carrier with a fail element (domain LTREL0)".into()));
    }
    let vars = f.variables();
    let v = vars.len() as u32;
    let mut instances: u128 = 0;
    match mode {
        CheckMode::Exhaustive => {
            let mut plans = Vec::new();
            for &n in sizes {
                let space = domain.space(n)?;
                let members = domain.members(&space)?;
                let count = (members.len() as u128).checked_pow(v).unwrap_or(u128::MAX);
                instances = instances.saturating_add(count);
                plans.push((space, members, count));
            }
            if instances > budget as u128 {
                return Err(RelicError::BudgetExceeded { needed: instances, budget });
            }
            for (space, members, count) in plans {
                let inst = Instance::new(f, &vars, &space)?;
                let m = members.len() as u64;
                let found = first_failure(count as u64, |mut i| {
                    let mut vals = vec![members[0].clone(); vars.len()];
                    for slot in vals.iter_mut().rev() {
                        *slot = members[(i % m) as usize].clone();
                        i /= m;
                    }
                    let env: Vec<&Relation> = vals.iter().collect();
                    let fails = inst.failure(&env)?.is_some();
                    Ok((vals, fails))
                })?;
                if let Some(vals) = found {
                    return report(&inst, domain, &vars, &space, vals);
                }
            }
            Ok(Verdict::Valid {
                sizes: sizes.to_vec(),
                instances,
                exhaustive: true,
            })
        }
        CheckMode::Random { seed, samples } => {
            for &n in sizes {
                let space = domain.space(n)?;
                if space.size() > MAX_RANDOM_CARRIER {
                    return Err(RelicError::Invalid(format!(
                        "random mode samples carriers of at most {MAX_RANDOM_CARRIER} elements"
                    )));
                }
                let inst = Instance::new(f, &vars, &space)?;
                let found = first_failure(samples, |i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(((n as u64) << 48) | i);
                    let vals: Vec<Relation> = (0..vars.len()).map(|_| domain.sample(&space, &mut rng)).collect();
                    let env: Vec<&Relation> = vals.iter().collect();
                    let fails = inst.failure(&env)?.is_some();
                    Ok((vals, fails))
                })?;
                if let Some(vals) = found {
                    return report(&inst, domain, &vars, &space, vals);
                }
                instances += samples as u128;
            }
            Ok(Verdict::Valid {
                sizes: sizes.to_vec(),
                instances,
                exhaustive: false,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::law::parse_formula;

    fn exhaustive(s: &str, d: Domain, n: usize) -> Verdict {
        check_validity(&parse_formula(s).unwrap(), d, &[n], CheckMode::Exhaustive, 1 << 30).unwrap()
    }

    #[test]
    fn domain_sizes() {
        let s2 = Domain::Rel.space(2).unwrap();
        assert_eq!(Domain::Rel.members(&s2).unwrap().len(), 16);
        assert_eq!(Domain::Ltrel.members(&s2).unwrap().len(), 9);
        assert_eq!(Domain::Total.members(&s2).unwrap().len(), 7);
        let s2f = Domain::Ltrel0.space(2).unwrap();
        assert_eq!(Domain::Ltrel0.members(&s2f).unwrap().len(), 49);
    }

    #[test]
    fn identity_and_undefined_terms() {
        let x = Domain::Rel.space(2).unwrap();
        let r = Relation::from_pairs(&x, [(0, 1)]).unwrap();
        let s = Relation::from_pairs(&x, [(0, 0)]).unwrap();
        let env: BTreeMap<String, Relation> = [("x".to_string(), r.clone()), ("y".to_string(), s)].into();
        let t = parse_formula("1' ; x = x").unwrap();
        let Atom::Cmp(_, lhs, _) = &t.conclusions[0] else { unreachable!() };
        assert_eq!(eval_term(lhs, &x, &env).unwrap(), Some(r));
        let dot = Term::op(Op::Constellation, Term::var("x"), Term::var("y"));
        assert_eq!(eval_term(&dot, &x, &env).unwrap(), None);
        assert!(exhaustive("ex(x . nabla)", Domain::Rel, 2).is_valid());
        let Verdict::Counterexample(c) = exhaustive("ex(x . y)", Domain::Rel, 1) else { panic!() };
        assert_eq!(c.assignment[0].1.len(), 1);
        assert!(c.assignment[1].1.is_empty());
        let unbound = Term::var("z");
        assert!(eval_term(&unbound, &x, &env).is_err());
    }

    #[test]
    fn left_monotonicity_fails_but_restricted_form_holds() {
        assert!(exhaustive("s0 <= s1 & s0 <= (s1 * t) => (s0 * t) <= (s1 * t)", Domain::Rel, 2).is_valid());
        let Verdict::Counterexample(c) = exhaustive("s0 <= s1 => (s0 * t) <= (s1 * t)", Domain::Rel, 2) else {
            panic!("left monotonicity should fail");
        };
        let get = |n: &str| c.assignment.iter().find(|(v, _)| v == n).unwrap().1.clone();
        let (s0, s1, t) = (get("s0"), get("s1"), get("t"));
        assert!(s0.includes_in(&s1).unwrap());
        assert!(!s0.compose_demonic(&t).unwrap().includes_in(&s1.compose_demonic(&t).unwrap()).unwrap());
    }

    #[test]
    fn identity_law_separates_rel_from_ltrel() {
        assert!(exhaustive("s <= 1' => s = 1'", Domain::Ltrel, 2).is_valid());
        let Verdict::Counterexample(c) = exhaustive("s <= 1' => s = 1'", Domain::Rel, 2) else { panic!() };
        assert!(c.assignment[0].1.is_empty(), "minimized to the empty relation");
    }

    #[test]
    fn zero_constants() {
        assert!(exhaustive("x cup 0e = x", Domain::Rel, 2).is_valid());
        assert!(!exhaustive("x cup Z = x", Domain::Ltrel0, 2).is_valid());
        assert!(check_validity(&parse_formula("x cup Z = x").unwrap(), Domain::Rel, &[2], CheckMode::Exhaustive, 100).is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let f = parse_formula("a ; b ; c ; d = a").unwrap();
        match check_validity(&f, Domain::Rel, &[2], CheckMode::Exhaustive, 1000) {
            Err(RelicError::BudgetExceeded { needed, .. }) => assert_eq!(needed, 65536),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn random_mode_replays_and_is_deterministic() {
        let f = parse_formula("s0 <= s1 => (s0 * t) <= (s1 * t)").unwrap();
        let mode = CheckMode::Random { seed: 7, samples: 5000 };
        let a = check_validity(&f, Domain::Rel, &[3], mode, 1).unwrap();
        let b = check_validity(&f, Domain::Rel, &[3], mode, 1).unwrap();
        assert_eq!(a, b);
        assert!(!a.is_valid());
        let g = parse_formula("(a * b) * c = a * (b * c)").unwrap();
        assert!(check_validity(&g, Domain::Rel, &[5], CheckMode::Random { seed: 1, samples: 500 }, 1).unwrap().is_valid());
    }

    #[test]
    fn exhaustive_and_random_agree_on_a_valid_law() {
        let f = parse_formula("t1 <= t2 => (s * t1) <= (s * t2)").unwrap();
        assert!(check_validity(&f, Domain::Rel, &[2], CheckMode::Exhaustive, 1 << 20).unwrap().is_valid());
        assert!(check_validity(&f, Domain::Rel, &[2, 3], CheckMode::Random { seed: 3, samples: 2000 }, 1).unwrap().is_valid());
    }
}
