use serde::Serialize;

use crate::error::{RelicError, Result};

use super::{parse_formula, CheckMode, Domain, Formula};

/// A named law with the domain it is checked over and the verdict it should get.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preset {
    pub name: String,
    pub formula: Formula,
    pub domain: Domain,
    pub expect_valid: bool,
    pub mode: CheckMode,
}

#[derive(Serialize)]
struct Row<'a> {
    name: &'a str,
    formula: String,
    domain: Domain,
    expect_valid: bool,
}

impl Serialize for Preset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Row {
            name: &self.name,
            formula: self.formula.to_string(),
            domain: self.domain,
            expect_valid: self.expect_valid,
        }
        .serialize(s)
    }
}

pub const PRESET_NAMES: [&str; 9] = [
    "eq-val",
    "eq-valn",
    "monotonicity",
    "refinement-order",
    "semiring",
    "semiring-angelic",
    "identity-below",
    "zero-union",
    "open-problems-family",
];

/// Samples used for presets whose exhaustive instance count is too large at `|X| = 2`.
const PRESET_SAMPLES: u64 = 200_000;

fn law(name: impl Into<String>, text: &str, domain: Domain, expect_valid: bool) -> Preset {
    Preset {
        name: name.into(),
        formula: parse_formula(text).expect("preset formulas parse"),
        domain,
        expect_valid,
        mode: CheckMode::Exhaustive,
    }
}

/// `s₀ ⊆ sₙ ∧ ⋀_{i<n} sᵢ ⊆ sᵢ₊₁ ∗ t ⇒ s₀ ∗ t ⊆ sₙ ∗ t`.
pub fn eq_valn(n: usize) -> String {
    let mut premises = vec![format!("s0 <= s{n}")];
    premises.extend((0..n).map(|i| format!("s{i} <= (s{} * t)", i + 1)));
    format!("{} => (s0 * t) <= (s{n} * t)", premises.join(" & "))
}

/// `s ⊑ t ∧ ∃(((x·t)·u₁)…·uₙ) ⇒ ∃(((x·s)·u₁)…·uₙ)`.
pub fn open_family(n: usize) -> String {
    let chain = |head: &str| {
        let mut t = format!("(x . {head})");
        for i in 1..=n {
            t = format!("({t} . u{i})");
        }
        t
    };
    format!("s ref<= t & ex({}) => ex({})", chain("t"), chain("s"))
}

fn semiring(mul: &str, add: &str) -> Vec<(String, String)> {
    [
        ("associativity", format!("(a {mul} b) {mul} c = a {mul} (b {mul} c)")),
        ("join associativity", format!("(a {add} b) {add} c = a {add} (b {add} c)")),
        ("join commutativity", format!("a {add} b = b {add} a")),
        ("join idempotence", format!("a {add} a = a")),
        (
            "additivity",
            format!("(a {add} b) {mul} (c {add} d) = (((a {mul} c) {add} (a {mul} d)) {add} (b {mul} c)) {add} (b {mul} d)"),
        ),
    ]
    .into_iter()
    .map(|(n, f)| (n.to_string(), f))
    .collect()
}

/// The laws of a named suite. `n` sizes the parametrized families (`eq-valn`,
/// `open-problems-family`) and is ignored elsewhere.
pub fn preset_suite(name: &str, n: usize) -> Result<Vec<Preset>> {
    let out = match name {
        "eq-val" => vec![law("eq-val", "s0 <= s1 & s0 <= (s1 * t) => (s0 * t) <= (s1 * t)", Domain::Rel, true)],
        "eq-valn" => {
            if n == 0 {
                return Err(RelicError::Invalid("eq-valn needs n >= 1".into()));
            }
            (1..=n).map(|k| law(format!("eq-valn n={k}"), &eq_valn(k), Domain::Rel, true)).collect()
        }
        "monotonicity" => vec![
            law("right monotonicity of * over <=", "t1 <= t2 => (s * t1) <= (s * t2)", Domain::Rel, true),
            law("left monotonicity of * over <=", "s0 <= s1 => (s0 * t) <= (s1 * t)", Domain::Rel, false),
            law("left monotonicity of * over ref<=", "s ref<= t => (s * u) ref<= (t * u)", Domain::Rel, true),
            law("right monotonicity of * over ref<=", "s ref<= t => (u * s) ref<= (u * t)", Domain::Rel, true),
        ],
        "refinement-order" => vec![
            law("ref<= reflexive", "s ref<= s", Domain::Rel, true),
            law("ref<= antisymmetric", "s ref<= t & t ref<= s => s = t", Domain::Rel, true),
            law("ref<= transitive", "s ref<= t & t ref<= u => s ref<= u", Domain::Rel, true),
            law("dj is the ref<= join", "s ref<= u & t ref<= u => (s dj t) ref<= u & s ref<= (s dj t)", Domain::Rel, true),
        ],
        "semiring" => semiring("*", "dj")
            .into_iter()
            .map(|(n, f)| law(format!("(*, dj) {n}"), &f, Domain::Rel, true))
            .collect(),
        "semiring-angelic" => semiring(";", "cup")
            .into_iter()
            .map(|(n, f)| law(format!("(;, cup) {n}"), &f, Domain::Rel, true))
            .collect(),
        "identity-below" => vec![
            law("s <= 1' => s = 1' over LTREL", "s <= 1' => s = 1'", Domain::Ltrel, true),
            law("s <= 1' => s = 1' over REL", "s <= 1' => s = 1'", Domain::Rel, false),
        ],
        "zero-union" => vec![
            law("x cup 0e = x over REL", "x cup 0e = x", Domain::Rel, true),
            law("x cup Z = x over LTREL0", "x cup Z = x", Domain::Ltrel0, false),
        ],
        "open-problems-family" => {
            if n == 0 {
                return Err(RelicError::Invalid("open-problems-family needs n >= 1".into()));
            }
            (1..=n)
                .map(|k| {
                    let mut p = law(format!("open-problems-family n={k}"), &open_family(k), Domain::Rel, true);
                    // 16^(k+3) instances: beyond k = 3 the family is sampled.
                    if k >= 4 {
                        p.mode = CheckMode::Random {
                            seed: 0,
                            samples: PRESET_SAMPLES,
                        };
                    }
                    p
                })
                .collect()
        }
        _ => {
            return Err(RelicError::UnknownName(format!(
                "preset `{name}` (known: {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(out)
}

/// Every suite, with the parametrized families instantiated for `n = 1..=4`
/// (`eq-valn` up to 3).
pub fn preset_suites() -> Vec<(&'static str, Vec<Preset>)> {
    PRESET_NAMES
        .iter()
        .map(|&name| {
            let n = match name {
                "eq-valn" => 3,
                "open-problems-family" => 4,
                _ => 0,
            };
            (name, preset_suite(name, n).expect("built-in presets"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::law::check_validity;

    #[test]
    fn eq_valn_one_is_eq_val() {
        let a = preset_suite("eq-valn", 1).unwrap().remove(0).formula;
        let b = preset_suite("eq-val", 0).unwrap().remove(0).formula;
        assert_eq!(a.to_string(), b.to_string());
        assert_eq!(a, b);
    }

    #[test]
    fn suite_sizes() {
        assert_eq!(preset_suite("eq-valn", 3).unwrap().len(), 3);
        assert_eq!(preset_suite("open-problems-family", 4).unwrap().len(), 4);
        assert!(preset_suite("nope", 1).is_err());
        assert!(preset_suites().iter().all(|(_, v)| !v.is_empty()));
    }

    #[test]
    fn family_shape() {
        assert_eq!(
            open_family(2),
            "s ref<= t & ex((((x . t) . u1) . u2)) => ex((((x . s) . u1) . u2))"
        );
        let f = parse_formula(&open_family(2)).unwrap();
        assert_eq!(f.variables(), ["s", "t", "x", "u1", "u2"]);
    }

    #[test]
    fn semiring_suites_hold_at_two_points() {
        for name in ["semiring", "semiring-angelic", "refinement-order"] {
            for p in preset_suite(name, 0).unwrap() {
                let v = check_validity(&p.formula, p.domain, &[2], p.mode, 1 << 24).unwrap();
                assert_eq!(v.is_valid(), p.expect_valid, "{}", p.name);
            }
        }
    }
}
