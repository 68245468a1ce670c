use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sidki::group::{GroupElement, GroupHandle};
use sidki::nielsen::{
    explore_exhaustive, explore_seeded, fingerprint, ExploreOptions, MoveSet, NielsenGraph,
    TupleVertex,
};
use sidki::tree::{GeneratorWord, Letter, TreeParams};

fn word(max_len: usize) -> impl Strategy<Value = GeneratorWord> {
    prop::collection::vec(0..4usize, 0..=max_len)
        .prop_map(|v| GeneratorWord::new(v.into_iter().map(|i| Letter::ALL[i])))
}

fn tuple_of_words(h: &GroupHandle, words: &[GeneratorWord]) -> TupleVertex {
    TupleVertex::new(h, words.iter().map(|w| h.word_element(w)).collect()).unwrap()
}

fn generating_tuples(h: &GroupHandle, k: usize) -> Vec<TupleVertex> {
    let elems = h.enumerate(100_000).unwrap();
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        let t: Vec<GroupElement> = idx.iter().map(|&i| elems[i].clone()).collect();
        if h.is_generating(&t).unwrap() {
            out.push(TupleVertex::new(h, t).unwrap());
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < elems.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn q3(depth: usize) -> GroupHandle {
    GroupHandle::quotient(TreeParams::new(3).unwrap(), depth)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn fingerprint_survives_single_moves(u in word(20), v in word(20), m in 0..6usize) {
        let h = q3(3);
        let g = NielsenGraph::new(&h, MoveSet::nielsen(2));
        let t = tuple_of_words(&h, &[u, v]);
        let mv = g.move_list()[m];
        let moved = g.apply_move(mv, &t).unwrap();
        prop_assert_eq!(fingerprint(&moved, &h).unwrap(), fingerprint(&t, &h).unwrap());
    }

    #[test]
    fn every_move_has_an_inverse_move(
        words in prop::collection::vec(word(12), 2..=3),
        conj in prop::collection::vec(word(4), 0..3),
        abelian in any::<bool>(),
        m in any::<prop::sample::Index>(),
    ) {
        let h = if abelian { GroupHandle::abelian(&[6, 2]).unwrap() } else { q3(3) };
        let ms = MoveSet::andrews_curtis(words.len(), (!conj.is_empty()).then_some(conj));
        let g = NielsenGraph::new(&h, ms.clone());
        let t = tuple_of_words(&h, &words);
        let mv = *m.get(g.move_list());
        let inv = ms.inverse_of(mv);
        prop_assert!(g.move_list().contains(&inv));
        let there = g.apply_move(mv, &t).unwrap();
        prop_assert_eq!(g.apply_move(inv, &there).unwrap(), t);
    }
}

// Exhaustive over every generating tuple of several small groups.
#[test]
fn moves_preserve_generation() {
    let cases: Vec<(GroupHandle, usize)> = vec![
        (GroupHandle::abelian(&[3, 3]).unwrap(), 2),
        (GroupHandle::abelian(&[3, 3]).unwrap(), 3),
        (GroupHandle::abelian(&[5, 5]).unwrap(), 2),
        (GroupHandle::abelian(&[4, 2]).unwrap(), 2),
        (GroupHandle::abelian(&[6]).unwrap(), 2),
        (q3(2), 2),
    ];
    let mut trials = 0;
    for (h, k) in &cases {
        let tuples = generating_tuples(h, *k);
        assert!(!tuples.is_empty());
        for ms in [MoveSet::nielsen(*k), MoveSet::andrews_curtis(*k, None)] {
            let g = NielsenGraph::new(h, ms);
            for t in &tuples {
                for n in g.neighbors(t).unwrap() {
                    assert!(
                        h.is_generating(n.elements()).unwrap(),
                        "{} {:?}",
                        h.descriptor(),
                        n
                    );
                    trials += 1;
                }
            }
        }
    }
    assert!(trials >= 1000, "{trials}");
}

#[test]
fn neighbor_relation_is_symmetric() {
    let h = GroupHandle::abelian(&[5, 5]).unwrap();
    let g = NielsenGraph::new(&h, MoveSet::nielsen(2));
    for t in generating_tuples(&h, 2) {
        for n in g.neighbors(&t).unwrap() {
            assert!(g.neighbors(&n).unwrap().contains(&t));
        }
    }
}

type Partition = BTreeSet<BTreeSet<Vec<u8>>>;

fn seeded_partition(h: &GroupHandle, ms: &MoveSet, tuples: &[TupleVertex]) -> Partition {
    let r = explore_seeded(h, tuples, ms, usize::MAX).unwrap();
    r.components
        .iter()
        .map(|c| c.seeds.iter().map(|&s| tuples[s].key().to_vec()).collect())
        .collect()
}

#[test]
fn component_partition_ignores_traversal_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (moduli, k) in [(vec![7u64, 7], 2usize), (vec![5, 5], 2), (vec![3, 3], 3)] {
        let h = GroupHandle::abelian(&moduli).unwrap();
        let ms = MoveSet::nielsen(k);
        let mut tuples = generating_tuples(&h, k);
        let exact = explore_exhaustive(&h, &ms, ExploreOptions::default()).unwrap();
        let reference = seeded_partition(&h, &ms, &tuples);
        assert_eq!(reference.len(), exact.component_count);
        let mut sizes: Vec<u64> = reference.iter().map(|c| c.len() as u64).collect();
        let mut exact_sizes: Vec<u64> = exact.components.iter().map(|c| c.size.unwrap()).collect();
        sizes.sort_unstable();
        exact_sizes.sort_unstable();
        assert_eq!(sizes, exact_sizes);
        for _ in 0..3 {
            tuples.shuffle(&mut rng);
            assert_eq!(seeded_partition(&h, &ms, &tuples), reference);
        }
    }
}
