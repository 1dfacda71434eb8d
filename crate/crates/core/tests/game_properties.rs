use proptest::prelude::*;

use relic::game::an::{s, T};
use relic::game::{An, Game, GameState, Move, Network, Word};

/// `x^↑` by scanning the generating pairs of the order for a matching suffix.
fn up_by_scan(n: usize, x: &Word) -> Vec<Word> {
    let mut gens = vec![(vec![s(0)], vec![s(n)])];
    for i in 0..n {
        gens.push((vec![s(i)], vec![s(i + 1), T]));
    }
    let mut out = vec![x.clone()];
    for (lo, hi) in gens {
        if x.0.ends_with(&lo) {
            let mut w = x.0[..x.len() - lo.len()].to_vec();
            w.extend(hi);
            out.push(Word(w));
        }
    }
    out
}

fn leq_by_scan(n: usize, a: &Word, b: &Word) -> bool {
    up_by_scan(n, a).contains(b)
}

fn word(n: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..=(n as u8 + 1), 0..=max_len).prop_map(Word)
}

fn n_and_words(k: usize) -> impl Strategy<Value = (usize, Vec<Word>)> {
    (1usize..=5).prop_flat_map(move |n| (Just(n), prop::collection::vec(word(n, 6), k)))
}

proptest! {
    #[test]
    fn order_agrees_with_the_generating_pairs((n, ws) in n_and_words(2)) {
        let an = An::new(n).unwrap();
        prop_assert_eq!(an.leq(&ws[0], &ws[1]), leq_by_scan(n, &ws[0], &ws[1]));
    }

    #[test]
    fn order_is_antisymmetric_and_has_no_three_chains((n, ws) in n_and_words(1)) {
        let an = An::new(n).unwrap();
        let a = &ws[0];
        for b in up_by_scan(n, a).iter().filter(|b| *b != a) {
            prop_assert!(!an.leq(b, a));
            prop_assert_eq!(up_by_scan(n, b), vec![b.clone()]);
        }
        prop_assert!(an.upclose(a).len() <= 3);
    }

    #[test]
    fn predecessors_are_unique((n, b) in (1usize..=5).prop_flat_map(|n| (Just(n), word(n, 4)))) {
        let an = An::new(n).unwrap();
        let b = &b;
        // Any a < b is at most one character shorter or longer than b.
        let strict: Vec<Word> = an
            .words_up_to(b.len() + 1)
            .into_iter()
            .filter(|a| a.len() + 1 >= b.len() && a != b && leq_by_scan(n, a, b))
            .collect();
        prop_assert!(strict.len() <= 1, "{:?}", strict);
        prop_assert_eq!(an.downclose(b).len(), strict.len() + 1);
    }

    #[test]
    fn a_suffix_never_climbs((n, ws) in n_and_words(2)) {
        let an = An::new(n).unwrap();
        let (alpha, beta) = (&ws[0], &ws[1]);
        let ab = alpha.concat(beta);
        prop_assert_eq!(an.leq(alpha, &ab), beta.is_empty());
    }

    #[test]
    fn networks_only_grow_along_a_play(n in 1usize..=4, choices in prop::collection::vec(any::<prop::sample::Index>(), 13)) {
        let an = An::new(n).unwrap();
        let game = Game::new(&an, true).unwrap();
        let mut st = GameState { net: Network::empty(), goal: None };
        let opening = Move::Init { a: Word(vec![s(0), T]), b: Word(vec![s(n), T]) };
        let rs = game.minimal_responses(&st, &opening);
        let mut next = choices[0].get(&rs).clone();
        prop_assert!(game.apply_move(&st, &opening, &next).legal);
        st = next;
        for pick in choices[1..].chunks(2) {
            if game.forall_win_reason(&st).is_some() {
                break;
            }
            let moves = game.nontrivial_moves(&st, &|w: &Word| w.len() <= 3);
            if moves.is_empty() {
                break;
            }
            let m = pick[0].get(&moves).clone();
            let rs = game.minimal_responses(&st, &m);
            next = pick[1].get(&rs).clone();
            let v = game.apply_move(&st, &m, &next);
            prop_assert!(v.legal, "{}: {:?}", game.show_move(&m), v.reason);
            prop_assert!(st.net.is_sub(&next.net));
            prop_assert!(st.net.forb.iter().zip(&next.net.forb).all(|(a, b)| a.elems.is_subset(&b.elems)));
            prop_assert!(next.net.nodes >= st.net.nodes);
            st = next;
        }
    }
}
