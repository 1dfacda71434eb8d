use std::collections::BTreeMap;

use crate::error::{RelicError, Result};

use super::check::{scan, Cell, View};
use super::{ClassTag, OrderedAlgebra};

/// Largest carrier `enumerate_small` accepts.
pub const MAX_ENUMERATION_SIZE: usize = 4;

fn permutations(n: usize, fix_first: bool) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    let mut used = vec![false; n];
    let mut prefix = Vec::new();
    if fix_first && n > 0 {
        used[0] = true;
        prefix.push(0);
    }
    go(&mut prefix, &mut used, &mut out);
    out
}

fn permute_order(leq: &[u64], perm: &[usize]) -> Vec<u64> {
    let n = leq.len();
    let mut out = vec![0u64; n];
    for a in 0..n {
        for b in 0..n {
            if leq[a] >> b & 1 == 1 {
                out[perm[a]] |= 1 << perm[b];
            }
        }
    }
    out
}

/// Labelled partial orders on `n` points, one per isomorphism class under `perms`.
fn canonical_posets(n: usize, perms: &[Vec<usize>]) -> Vec<Vec<u64>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|(a, b)| a != b).collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let mut leq: Vec<u64> = (0..n).map(|a| 1 << a).collect();
        for (k, &(a, b)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                leq[a] |= 1 << b;
            }
        }
        let le = |a: usize, b: usize| leq[a] >> b & 1 == 1;
        let antisym = pairs.iter().all(|&(a, b)| !(le(a, b) && le(b, a)));
        let trans = (0..n).all(|a| (0..n).all(|b| !le(a, b) || leq[b] & !leq[a] == 0));
        if antisym && trans && perms.iter().all(|p| permute_order(&leq, p) >= leq) {
            out.push(leq);
        }
    }
    out
}

fn encode(alg: &OrderedAlgebra, perm: &[usize]) -> Vec<u8> {
    let n = alg.size();
    let mut inv = vec![0; n];
    for (a, &p) in perm.iter().enumerate() {
        inv[p] = a;
    }
    let mut code = Vec::with_capacity(2 * n * n + 2);
    for i in 0..n {
        for j in 0..n {
            code.push(alg.leq(inv[i], inv[j]) as u8);
        }
    }
    for i in 0..n {
        for j in 0..n {
            code.push(alg.mul(inv[i], inv[j]).map_or(n as u8, |c| perm[c] as u8));
        }
    }
    code.push(alg.identity().map_or(u8::MAX, |e| perm[e] as u8));
    code.push(alg.zero().map_or(u8::MAX, |z| perm[z] as u8));
    code
}

/// The least encoding over all relabellings that keep the zero (if any) at index 0.
pub(crate) fn canonical_key(alg: &OrderedAlgebra) -> (Vec<u8>, Vec<usize>) {
    let fix = alg.zero() == Some(0);
    permutations(alg.size(), fix)
        .into_iter()
        .map(|p| (encode(alg, &p), p))
        .min()
        .expect("at least one permutation")
}

fn element_names(n: usize, with_zero: bool) -> Vec<String> {
    let letters = ["a", "b", "c", "d"];
    if with_zero {
        std::iter::once("0".to_string()).chain(letters[..n - 1].iter().map(|s| s.to_string())).collect()
    } else {
        letters[..n].iter().map(|s| s.to_string()).collect()
    }
}

fn order_fits(tag: ClassTag, leq: &[u64]) -> bool {
    let n = leq.len();
    let le = |a: usize, b: usize| leq[a] >> b & 1 == 1;
    match tag {
        ClassTag::WeakZero => (1..n).all(|a| !le(a, 0)),
        ClassTag::Zero | ClassTag::PreconstellationZero => (0..n).all(|a| le(0, a)),
        ClassTag::DualZero => (0..n).all(|a| le(a, 0)),
        ClassTag::IdempotentSemiring => (0..n).all(|a| {
            (0..n).all(|b| {
                let ub = leq[a] & leq[b];
                (0..n).any(|u| ub >> u & 1 == 1 && ub & !leq[u] == 0)
            })
        }),
        _ => true,
    }
}

struct Search<'a> {
    tag: ClassTag,
    n: usize,
    leq: &'a [u64],
    zero: Option<usize>,
    cells: Vec<Cell>,
    free: Vec<usize>,
    choices: Vec<Cell>,
    found: &'a mut BTreeMap<Vec<u8>, OrderedAlgebra>,
}

impl Search<'_> {
    fn consistent(&self) -> bool {
        let cells = &self.cells;
        let n = self.n;
        let cell = |a: usize, b: usize| cells[a * n + b];
        let view = View {
            n,
            leq: self.leq,
            cell: &cell,
            zero: self.zero,
        };
        scan(self.tag, &view, &mut |_| false)
    }

    fn run(&mut self, k: usize) -> Result<()> {
        if !self.consistent() {
            return Ok(());
        }
        if k == self.free.len() {
            return self.emit();
        }
        let pos = self.free[k];
        for i in 0..self.choices.len() {
            self.cells[pos] = self.choices[i];
            self.run(k + 1)?;
        }
        self.cells[pos] = Cell::Unknown;
        Ok(())
    }

    fn emit(&mut self) -> Result<()> {
        let n = self.n;
        let product = self
            .cells
            .iter()
            .map(|c| match c {
                Cell::Val(v) => Some(*v),
                _ => None,
            })
            .collect();
        let names = element_names(n, self.zero.is_some());
        let alg = OrderedAlgebra::new(names.clone(), product, self.leq.to_vec(), None, self.zero)?;
        if !alg.check_class(self.tag).is_member() {
            return Ok(());
        }
        let (key, perm) = canonical_key(&alg);
        if let std::collections::btree_map::Entry::Vacant(slot) = self.found.entry(key) {
            slot.insert(alg.permuted(&perm, names)?);
        }
        Ok(())
    }
}

/// Every algebra of class `tag` with at most `size_bound` elements, one per isomorphism
/// class, ordered by size and then by canonical table encoding.
pub fn enumerate_small(tag: ClassTag, size_bound: usize) -> Result<Vec<OrderedAlgebra>> {
    if size_bound > MAX_ENUMERATION_SIZE {
        return Err(RelicError::Invalid(format!(
            "enumeration is limited to {MAX_ENUMERATION_SIZE} elements, got {size_bound}"
        )));
    }
    let mut out = Vec::new();
    for n in 1..=size_bound {
        let with_zero = tag.needs_zero();
        let zero = with_zero.then_some(0);
        let perms = permutations(n, with_zero);
        let mut found = BTreeMap::new();
        let mut choices: Vec<Cell> = (0..n).map(Cell::Val).collect();
        if tag.is_partial() {
            choices.insert(0, Cell::Undef);
        }
        for leq in canonical_posets(n, &perms) {
            if !order_fits(tag, &leq) {
                continue;
            }
            let mut cells = vec![Cell::Unknown; n * n];
            if with_zero {
                for a in 0..n {
                    cells[a] = Cell::Val(0);
                    cells[a * n] = if tag.is_partial() && a != 0 { Cell::Undef } else { Cell::Val(0) };
                }
            }
            let free = (0..n * n).filter(|&i| cells[i] == Cell::Unknown).collect();
            let mut search = Search {
                tag,
                n,
                leq: &leq,
                zero,
                cells,
                free,
                choices: choices.clone(),
                found: &mut found,
            };
            search.run(0)?;
        }
        out.extend(found.into_values());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    /// Oracle: every labelled binary operation on `n` points, filtered by associativity,
    /// deduplicated by trying every relabelling.
    fn brute_force_semigroups(n: usize, identify_anti: bool) -> usize {
        let perms = permutations(n, false);
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let cells = n * n;
        for code in 0..n.pow(cells as u32) {
            let mut t = vec![0; cells];
            let mut c = code;
            for slot in t.iter_mut() {
                *slot = c % n;
                c /= n;
            }
            let m = |a: usize, b: usize| t[a * n + b];
            let assoc = (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| m(m(a, b), c) == m(a, m(b, c)))));
            if !assoc {
                continue;
            }
            let mut variants = vec![t.clone()];
            if identify_anti {
                variants.push((0..cells).map(|i| t[(i % n) * n + i / n]).collect());
            }
            let key = variants
                .iter()
                .flat_map(|v| {
                    perms.iter().map(move |p| {
                        let mut inv = vec![0; n];
                        for (a, &q) in p.iter().enumerate() {
                            inv[q] = a;
                        }
                        (0..cells).map(|i| p[v[inv[i / n] * n + inv[i % n]]]).collect::<Vec<_>>()
                    })
                })
                .min()
                .unwrap();
            seen.insert(key);
        }
        seen.len()
    }

    fn transpose(a: &OrderedAlgebra) -> OrderedAlgebra {
        let n = a.size();
        let product = (0..n * n).map(|i| a.mul(i % n, i / n)).collect();
        OrderedAlgebra::new(a.names().to_vec(), product, a.leq_rows().to_vec(), a.identity(), a.zero()).unwrap()
    }

    #[test]
    fn one_element_ordered_semigroup() {
        assert_eq!(enumerate_small(ClassTag::OrderedSemigroup, 1).unwrap().len(), 1);
    }

    #[test]
    fn two_element_semigroups_with_equality_order() {
        let discrete: Vec<_> = enumerate_small(ClassTag::OrderedSemigroup, 2)
            .unwrap()
            .into_iter()
            .filter(|a| a.size() == 2 && a.is_discrete())
            .collect();
        assert_eq!(discrete.len(), brute_force_semigroups(2, false));
        assert_eq!(discrete.len(), 5);
        let up_to_anti: BTreeSet<Vec<u8>> = discrete
            .iter()
            .map(|a| canonical_key(a).0.min(canonical_key(&transpose(a)).0))
            .collect();
        assert_eq!(up_to_anti.len(), brute_force_semigroups(2, true));
        assert_eq!(up_to_anti.len(), 4);
    }

    #[test]
    fn three_element_semigroup_count() {
        let n = enumerate_small(ClassTag::OrderedSemigroup, 3)
            .unwrap()
            .into_iter()
            .filter(|a| a.size() == 3 && a.is_discrete())
            .count();
        assert_eq!(n, brute_force_semigroups(3, false));
        assert_eq!(n, 24);
    }

    #[test]
    fn every_emitted_algebra_is_a_member() {
        for tag in ClassTag::ALL {
            let algs = enumerate_small(tag, 3).unwrap();
            assert!(!algs.is_empty(), "{tag}");
            let mut keys = BTreeSet::new();
            for a in &algs {
                assert!(a.check_class(tag).is_member(), "{tag}\n{a}");
                assert!(keys.insert(canonical_key(a).0), "duplicate in {tag}");
            }
        }
    }

    #[test]
    fn deterministic_order() {
        let a = enumerate_small(ClassTag::Preconstellation, 2).unwrap();
        let b = enumerate_small(ClassTag::Preconstellation, 2).unwrap();
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[0].size() <= w[1].size()));
    }

    #[test]
    fn bound_is_enforced() {
        assert!(enumerate_small(ClassTag::OrderedSemigroup, 5).is_err());
    }
}
