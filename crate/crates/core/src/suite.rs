//! The fixed acceptance sweeps. Each returns a report of named boolean checks, with
//! witnesses in the details, and no timing so that reruns compare byte for byte.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{enumerate_small, ClassTag, OrderedAlgebra};
use crate::correctness::{
    partially_correct_rel, partially_refines, totally_correct_rel, totally_correct_seq_composite, totally_refines,
    RefinementMode, Test,
};
use crate::error::Result;
use crate::game::{verify_game_lemmas, An, LemmaOptions};
use crate::law::{check_validity, preset_suite, Verdict};
use crate::program::{psi1, psi2, psi3, ProgramRelation};
use crate::repr::{
    represent_dual_zero, represent_preconstellation, represent_weak_zero, represent_zero_angelic, verify_embedding,
    zareckii, DualZeroMode, Representation,
};
use crate::{Relation, StateSpace};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionReport {
    pub criterion: u8,
    pub title: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl CriterionReport {
    fn new(criterion: u8, title: &str, checks: Vec<Check>) -> Self {
        CriterionReport {
            criterion,
            title: title.into(),
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Settings shared by the sweeps that search or sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteOptions {
    pub budget: u64,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            budget: crate::config::DEFAULT_BUDGET,
            seed: 0,
        }
    }
}

fn check(name: &str, witness: Option<String>) -> Check {
    Check {
        name: name.into(),
        passed: witness.is_none(),
        detail: witness.map(|w| format!("counterexample: {w}")).unwrap_or_default(),
    }
}

fn first<T>(items: &[T], mut bad: impl FnMut(&T) -> Result<Option<String>>) -> Result<Option<String>> {
    for x in items {
        if let Some(w) = bad(x)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

fn pairs<T: Clone>(xs: &[T]) -> Vec<(T, T)> {
    xs.iter().flat_map(|a| xs.iter().map(move |b| (a.clone(), b.clone()))).collect()
}

fn triples<T: Clone>(xs: &[T]) -> Vec<(T, T, T)> {
    pairs(xs).into_iter().flat_map(|(a, b)| xs.iter().map(move |c| (a.clone(), b.clone(), c.clone()))).collect()
}

type Op = fn(&Relation, &Relation) -> Result<Relation>;

fn associative(rels: &[Relation], op: Op) -> Result<Option<String>> {
    first(&triples(rels), |(a, b, c)| {
        Ok((op(&op(a, b)?, c)? != op(a, &op(b, c)?)?).then(|| format!("a={a} b={b} c={c}")))
    })
}

/// Semilattice laws for `add` and `(a+b)(c+d) = ac+ad+bc+bd`.
fn idempotent_semiring(rels: &[Relation], mul: Op, add: Op) -> Result<Option<String>> {
    if let Some(w) = associative(rels, mul)? {
        return Ok(Some(format!("product not associative: {w}")));
    }
    if let Some(w) = associative(rels, add)? {
        return Ok(Some(format!("join not associative: {w}")));
    }
    let lattice = first(&pairs(rels), |(a, b)| {
        Ok((add(a, b)? != add(b, a)? || add(a, a)? != *a).then(|| format!("join not commutative or idempotent at a={a} b={b}")))
    })?;
    if lattice.is_some() {
        return Ok(lattice);
    }
    let quads: Vec<(Relation, Relation, Relation, Relation)> = pairs(rels)
        .into_iter()
        .flat_map(|(a, b)| pairs(rels).into_iter().map(move |(c, d)| (a.clone(), b.clone(), c, d)))
        .collect();
    first(&quads, |(a, b, c, d)| {
        let lhs = mul(&add(a, b)?, &add(c, d)?)?;
        let rhs = add(&add(&add(&mul(a, c)?, &mul(a, d)?)?, &mul(b, c)?)?, &mul(b, d)?)?;
        Ok((lhs != rhs).then(|| format!("not additive at a={a} b={b} c={c} d={d}")))
    })
}

fn relations(n: usize) -> Result<(Arc<StateSpace>, Vec<Relation>)> {
    let x = StateSpace::numbered(n, false)?;
    let rels = Relation::all_over(&x)?;
    Ok((x, rels))
}

/// Laws of the relation operations over every relation on a two-point set.
pub fn operation_laws() -> Result<CriterionReport> {
    let (_, rels) = relations(2)?;
    let angelic: Op = |a, b| a.compose(b);
    let demonic: Op = |a, b| a.compose_demonic(b);
    let union: Op = |a, b| a.union(b);
    let dj: Op = |a, b| a.join_demonic(b);
    let refines = |a: &Relation, b: &Relation| a.refines_demonic(b);
    let mut checks = vec![
        check("; associative", associative(&rels, angelic)?),
        check("* associative", associative(&rels, demonic)?),
        check(
            "* quantifier form agrees",
            first(&pairs(&rels), |(a, b)| {
                Ok((a.compose_demonic(b)? != a.compose_demonic_quantified(b)).then(|| format!("s={a} t={b}")))
            })?,
        ),
        check("ref<= reflexive", first(&rels, |a| Ok((!refines(a, a)?).then(|| a.to_string())))?),
        check(
            "ref<= antisymmetric",
            first(&pairs(&rels), |(a, b)| Ok((a != b && refines(a, b)? && refines(b, a)?).then(|| format!("s={a} t={b}"))))?,
        ),
        check(
            "ref<= transitive",
            first(&triples(&rels), |(a, b, c)| {
                Ok((refines(a, b)? && refines(b, c)? && !refines(a, c)?).then(|| format!("s={a} t={b} u={c}")))
            })?,
        ),
        check(
            "* left monotone over ref<=",
            first(&triples(&rels), |(s, s1, t)| {
                Ok((refines(s, s1)? && !refines(&s.compose_demonic(t)?, &s1.compose_demonic(t)?)?).then(|| format!("s={s} s'={s1} t={t}")))
            })?,
        ),
        check(
            "* right monotone over ref<=",
            first(&triples(&rels), |(t, t1, s)| {
                Ok((refines(t, t1)? && !refines(&s.compose_demonic(t)?, &s.compose_demonic(t1)?)?).then(|| format!("s={s} t={t} t'={t1}")))
            })?,
        ),
        check("(*, dj) idempotent semiring", idempotent_semiring(&rels, demonic, dj)?),
        check("(;, cup) idempotent semiring", idempotent_semiring(&rels, angelic, union)?),
    ];
    let witness = first(&triples(&rels), |(s0, s1, t)| {
        Ok((s0.includes_in(s1)? && !s0.compose_demonic(t)?.includes_in(&s1.compose_demonic(t)?)?).then(|| {
            format!("s0={s0} s1={s1} t={t}: s0*t={} is not inside s1*t={}", s0.compose_demonic(t).unwrap(), s1.compose_demonic(t).unwrap())
        }))
    })?;
    checks.push(Check {
        name: "* left monotone over <= refuted".into(),
        passed: witness.is_some(),
        detail: witness.unwrap_or_else(|| "no counterexample found".into()),
    });
    Ok(CriterionReport::new(1, "operation laws over |X| = 2", checks))
}

fn injective<T: Ord>(images: impl IntoIterator<Item = T>, count: usize) -> Option<String> {
    let distinct: BTreeSet<T> = images.into_iter().collect();
    (distinct.len() != count).then(|| format!("{} images for {count} arguments", distinct.len()))
}

/// The restriction homomorphisms and the three embeddings into programs.
pub fn program_embeddings() -> Result<CriterionReport> {
    let (x, rels) = relations(2)?;
    let x0 = x.with_fail()?;
    let progs = ProgramRelation::all_over(&x0)?;
    let pp = pairs(&progs);
    let rp = pairs(&rels);
    let empty = Relation::empty(&x);
    let mut checks = vec![
        check(
            "(p;q)^a = p^a;q^a",
            first(&pp, |(p, q)| Ok((p.seq(q)?.restrict_angelic() != p.restrict_angelic().compose(&q.restrict_angelic())?).then(|| format!("p={p} q={q}"))))?,
        ),
        check(
            "(p;q)^d = p^d*q^d",
            first(&pp, |(p, q)| {
                Ok((p.seq(q)?.restrict_demonic() != p.restrict_demonic().compose_demonic(&q.restrict_demonic())?).then(|| format!("p={p} q={q}")))
            })?,
        ),
        check(
            "(p cup q)^a = p^a cup q^a",
            first(&pp, |(p, q)| Ok((p.choice(q)?.restrict_angelic() != p.restrict_angelic().union(&q.restrict_angelic())?).then(|| format!("p={p} q={q}"))))?,
        ),
        check(
            "(p cup q)^d = p^d dj q^d",
            first(&pp, |(p, q)| {
                Ok((p.choice(q)?.restrict_demonic() != p.restrict_demonic().join_demonic(&q.restrict_demonic())?).then(|| format!("p={p} q={q}")))
            })?,
        ),
        check(
            "p = q iff both restrictions agree",
            injective(progs.iter().map(|p| (p.restrict_angelic().code(), p.restrict_demonic().code())), progs.len()),
        ),
        check(
            "approx iff both quasi-orders",
            first(&pp, |(p, q)| Ok((p.approx(q)? != (p.quasi_partial(q)? && p.quasi_total(q)?)).then(|| format!("p={p} q={q}"))))?,
        ),
    ];
    let psi1s = rels.iter().map(psi1).collect::<Result<Vec<_>>>()?;
    let psi2s = rels.iter().map(psi2).collect::<Result<Vec<_>>>()?;
    let psi3s = rels.iter().map(psi3).collect::<Result<Vec<_>>>()?;
    let idx = |r: &Relation| r.code() as usize;
    // psi1
    checks.push(check("psi1 injective", injective(psi1s.iter().map(|p| p.relation().code()), rels.len())));
    checks.push(check(
        "psi1 preserves ;",
        first(&rp, |(r, s)| Ok((psi1(&r.compose(s)?)? != psi1s[idx(r)].seq(&psi1s[idx(s)])?).then(|| format!("r={r} s={s}"))))?,
    ));
    checks.push(check(
        "psi1 preserves cup",
        first(&rp, |(r, s)| Ok((psi1(&r.union(s)?)? != psi1s[idx(r)].choice(&psi1s[idx(s)])?).then(|| format!("r={r} s={s}"))))?,
    ));
    checks.push(check(
        "psi1 maps empty to abort",
        (psi1(&empty)? != ProgramRelation::abort(&x0)?).then(|| psi1(&empty).unwrap().to_string()),
    ));
    checks.push(check(
        "psi1 preserves and reflects <=",
        first(&rp, |(r, s)| Ok((r.includes_in(s)? != psi1s[idx(r)].approx(&psi1s[idx(s)])?).then(|| format!("r={r} s={s}"))))?,
    ));
    // psi2
    checks.push(check("psi2 injective", injective(psi2s.iter().map(|p| p.code()), rels.len())));
    checks.push(check(
        "psi2 maps * to ;",
        first(&rp, |(r, s)| Ok((psi2(&r.compose_demonic(s)?)? != psi2s[idx(r)].compose(&psi2s[idx(s)])?).then(|| format!("r={r} s={s}"))))?,
    ));
    checks.push(check(
        "psi2 maps dj to cup",
        first(&rp, |(r, s)| Ok((psi2(&r.join_demonic(s)?)? != psi2s[idx(r)].union(&psi2s[idx(s)])?).then(|| format!("r={r} s={s}"))))?,
    ));
    checks.push(check(
        "psi2 maps empty to nabla",
        (psi2(&empty)? != Relation::full(&x0)).then(|| psi2(&empty).unwrap().to_string()),
    ));
    checks.push(check(
        "psi2 maps ref<= to <=",
        first(&rp, |(r, s)| Ok((r.refines_demonic(s)? != psi2s[idx(r)].includes_in(&psi2s[idx(s)])?).then(|| format!("r={r} s={s}"))))?,
    ));
    // psi3
    checks.push(check("psi3 injective", injective(psi3s.iter().map(|p| p.relation().code()), rels.len())));
    checks.push(check(
        "psi3 maps * to ;",
        first(&rp, |(r, s)| {
            Ok((psi3(&r.compose_demonic(s)?)? != psi3s[idx(r)].seq(&psi3s[idx(s)])?).then(|| {
                format!("r={r} s={s}: psi3(r*s)={} but psi3(r);psi3(s)={}", psi3(&r.compose_demonic(s).unwrap()).unwrap(), psi3s[idx(r)].seq(&psi3s[idx(s)]).unwrap())
            }))
        })?,
    ));
    checks.push(check(
        "psi3 maps dj to cup",
        first(&rp, |(r, s)| Ok((psi3(&r.join_demonic(s)?)? != psi3s[idx(r)].choice(&psi3s[idx(s)])?).then(|| format!("r={r} s={s}"))))?,
    ));
    checks.push(check(
        "psi3 maps 1' to 1'",
        (psi3(&Relation::diagonal(&x))? != ProgramRelation::skip(&x0)?).then(|| psi3(&Relation::diagonal(&x)).unwrap().to_string()),
    ));
    checks.push(check(
        "psi3 maps ref<= to <=",
        first(&rp, |(r, s)| Ok((r.refines_demonic(s)? != psi3s[idx(r)].approx(&psi3s[idx(s)])?).then(|| format!("r={r} s={s}"))))?,
    ));
    checks.push(check(
        "psi3(r) strictly inside psi2(r)",
        first(&rels, |r| {
            let (a, b) = (psi3s[idx(r)].relation(), &psi2s[idx(r)]);
            Ok((!a.includes_in(b)? || a == b).then(|| r.to_string()))
        })?,
    ));
    Ok(CriterionReport::new(2, "restriction homomorphisms and program embeddings over |X| = 2", checks))
}

/// Correctness characterizations over every program and test pair on two states.
pub fn correctness_sweep() -> Result<CriterionReport> {
    let x0 = StateSpace::numbered(2, true)?;
    let progs = ProgramRelation::all_over(&x0)?;
    let tests = Test::all_over(&x0)?;
    let tp = pairs(&tests);
    let mut disagreement = None;
    let mut total_not_partial = None;
    let mut triples_checked = 0u64;
    for p in &progs {
        for (e, f) in &tp {
            triples_checked += 1;
            let partial = partially_correct_rel(e, p, f, true);
            let total = totally_correct_rel(e, p, f, true);
            match (partial, total) {
                (Ok(pc), Ok(tc)) => {
                    if tc && !pc && total_not_partial.is_none() {
                        total_not_partial = Some(format!("e={} p={p} f={}", x0.format_set(e.truth_set()), x0.format_set(f.truth_set())));
                    }
                }
                (Err(err), _) | (_, Err(err)) => {
                    disagreement.get_or_insert_with(|| format!("p={p}: {err}"));
                }
            }
        }
    }
    let pp = pairs(&progs);
    let refine = first(&pp, |(p, q)| {
        let pa = partially_refines(p, q, RefinementMode::Algebraic)?;
        let pt = partially_refines(p, q, RefinementMode::Tests)?;
        let ta = totally_refines(p, q, RefinementMode::Algebraic)?;
        let tt = totally_refines(p, q, RefinementMode::Tests)?;
        Ok((pa != pt || ta != tt).then(|| format!("p={p} q={q}: partial {pa}/{pt}, total {ta}/{tt}")))
    })?;
    let approx = first(&pp, |(p, q)| {
        let both = partially_refines(p, q, RefinementMode::Algebraic)? && totally_refines(p, q, RefinementMode::Algebraic)?;
        Ok((p.approx(q)? != both).then(|| format!("p={p} q={q}")))
    })?;
    let seq = first(&pp, |(p, q)| {
        let pq = p.seq(q)?;
        first(&tp, |(e, f)| {
            Ok((totally_correct_rel(e, &pq, f, false)? != totally_correct_seq_composite(e, p, q, f)?).then(|| format!("p={p} q={q}")))
        })
    })?;
    let mut checks = vec![
        check("correctness characterizations agree", disagreement),
        check("total correctness implies partial", total_not_partial),
        check("refinement modes agree", refine),
        check("inclusion iff partial and total refinement", approx),
        check("sequencing form of total correctness", seq),
    ];
    if checks[0].passed {
        checks[0].detail = format!("{triples_checked} triples");
    }
    Ok(CriterionReport::new(3, "correctness sweep over |X| = 2", checks))
}

type ZeroImage = fn(&Arc<StateSpace>) -> Result<Relation>;

struct Construction {
    name: &'static str,
    tag: ClassTag,
    build: fn(&OrderedAlgebra) -> Result<Representation>,
    /// What the zero must map to, given the base.
    zero_image: Option<ZeroImage>,
    left_total: bool,
}

/// Every construction on every small algebra of its class.
pub fn representation_suite() -> Result<CriterionReport> {
    let empty = |b: &Arc<StateSpace>| Ok(Relation::empty(b));
    let abort = |b: &Arc<StateSpace>| Ok(ProgramRelation::abort(b)?.into_relation());
    let nabla = |b: &Arc<StateSpace>| Ok(Relation::full(b));
    let constructions = [
        Construction { name: "ordered semigroups (left-total images)", tag: ClassTag::OrderedSemigroup, build: zareckii, zero_image: None, left_total: true },
        Construction { name: "weak zero (zero to abort)", tag: ClassTag::WeakZero, build: represent_weak_zero, zero_image: Some(abort), left_total: false },
        Construction { name: "zero (zero to empty)", tag: ClassTag::Zero, build: represent_zero_angelic, zero_image: Some(empty), left_total: false },
        Construction {
            name: "dual zero, total relations (zero to nabla)",
            tag: ClassTag::DualZero,
            build: |a| represent_dual_zero(a, DualZeroMode::TotalAngelic),
            zero_image: Some(nabla),
            left_total: false,
        },
        Construction {
            name: "dual zero, demonic (zero to empty)",
            tag: ClassTag::DualZero,
            build: |a| represent_dual_zero(a, DualZeroMode::Demonic),
            zero_image: Some(empty),
            left_total: false,
        },
        Construction {
            name: "ordered pre-constellations",
            tag: ClassTag::OrderedPreconstellation,
            build: represent_preconstellation,
            zero_image: None,
            left_total: false,
        },
        Construction {
            name: "pre-constellations with zero (zero to empty)",
            tag: ClassTag::PreconstellationZero,
            build: represent_preconstellation,
            zero_image: Some(empty),
            left_total: false,
        },
    ];
    let mut checks = Vec::new();
    for c in &constructions {
        let algs = enumerate_small(c.tag, 3)?;
        let mut witness = None;
        for alg in &algs {
            let rep = (c.build)(alg)?;
            let report = verify_embedding(&rep)?;
            let why = if !report.is_embedding() {
                Some(report.render(alg))
            } else if c.left_total && !rep.images.iter().all(|r| r.classify().is_left_total) {
                Some("an image is not left total".into())
            } else if let (Some(z), Some(img)) = (alg.zero(), c.zero_image) {
                let want = img(&rep.base)?;
                (rep.images[z] != want).then(|| format!("zero maps to {}, expected {want}", rep.images[z]))
            } else {
                None
            };
            if let Some(w) = why {
                witness = Some(format!("{}: {}", alg.to_string().trim_end().replace('\n', "; "), w.trim_end().replace('\n', "; ")));
                break;
            }
        }
        let mut ch = check(c.name, witness);
        if ch.passed {
            ch.detail = format!("{} algebras", algs.len());
        }
        checks.push(ch);
    }
    Ok(CriterionReport::new(4, "representations of every algebra with at most 3 elements", checks))
}

/// The preset laws with their expected verdicts at `|X| = 2`.
pub fn law_presets(opts: &SuiteOptions) -> Result<CriterionReport> {
    let mut presets = preset_suite("eq-valn", 3)?;
    presets.extend(preset_suite("identity-below", 1)?);
    presets.extend(preset_suite("zero-union", 1)?);
    let mut checks = Vec::new();
    for p in presets {
        let verdict = check_validity(&p.formula, p.domain, &[2], p.mode, opts.budget)?;
        let detail = match &verdict {
            Verdict::Valid { instances, .. } => format!("valid over {instances} instances"),
            Verdict::Counterexample(c) => format!("counterexample: {}", c.render().trim_end().replace('\n', "; ")),
        };
        let expected = if p.expect_valid { "valid" } else { "refuted" };
        checks.push(Check {
            name: format!("{} is {expected}", p.name),
            passed: verdict.is_valid() == p.expect_valid,
            detail,
        });
    }
    Ok(CriterionReport::new(5, "law-checker presets at |X| = 2", checks))
}

/// Both strategies on `A_3`, `A_4` (every move sequence) and `A_5` (sampled).
pub fn game_lemmas(opts: &SuiteOptions) -> Result<CriterionReport> {
    let mut checks = Vec::new();
    for n in 3..=5 {
        let lo = LemmaOptions {
            budget: opts.budget,
            seed: opts.seed,
            samples: 10_000,
            exhaustive_up_to: 4,
            ..LemmaOptions::default()
        };
        let r = verify_game_lemmas(n, &lo)?;
        checks.push(Check {
            name: format!("A_{n}: the script wins every play"),
            passed: r.forall.proven,
            detail: format!("{} positions, {} plays, longest {} moves", r.forall.positions, r.forall.leaves, r.forall.longest),
        });
        let e = &r.exists;
        let mut detail = format!(
            "{} sequences over {} openings, {} positions, {} lost or unanswered, {} invariant failures",
            e.sequences,
            e.openings,
            e.positions,
            e.strategy_failures,
            e.invariant_failure_count()
        );
        for (cond, count) in &e.invariant_failures {
            detail.push_str(&format!("; {cond} after {count} positions"));
        }
        if let Some(v) = e.examples.first() {
            detail.push_str(&format!("; first: opening {}, moves [{}]: {}", v.opening, v.moves.join("; "), v.reason));
        }
        checks.push(Check {
            name: format!("A_{n}: the grid strategy survives with its invariants"),
            passed: e.strategy_failures == 0 && e.invariant_failure_count() == 0 && !e.inconclusive,
            detail,
        });
    }
    Ok(CriterionReport::new(6, "representation game strategies on A_3, A_4, A_5", checks))
}

/// Order facts of `A_n` over every word of length at most 4, `n ≤ 5`.
pub fn an_order() -> Result<CriterionReport> {
    let mut checks = Vec::new();
    for n in 1..=5 {
        let r = An::new(n)?.check_order_properties(4);
        checks.push(Check {
            name: format!("A_{n} order facts"),
            passed: r.violations.is_empty(),
            detail: match r.violations.first() {
                None => format!("{} words, {} comparisons", r.words, r.comparisons),
                Some(v) => format!("{} violations, first: {v}", r.violations.len()),
            },
        });
    }
    Ok(CriterionReport::new(7, "order of A_n", checks))
}

/// Criteria 1 to 7 in order.
pub fn run_all(opts: &SuiteOptions) -> Result<Vec<CriterionReport>> {
    Ok(vec![
        operation_laws()?,
        program_embeddings()?,
        correctness_sweep()?,
        representation_suite()?,
        law_presets(opts)?,
        game_lemmas(opts)?,
        an_order()?,
    ])
}
