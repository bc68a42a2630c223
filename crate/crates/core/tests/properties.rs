//! Randomized laws over small universes: canonical forms, stream evaluation,
//! substitution, centrality of the projection constants, and generated
//! congruences.

use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;

use blockalg::{
    central_range, congruence_enumerate, congruence_generate, materialize, min_padding,
    q_blocks_at, term_clone, top_eval, Block, BlockAlgebra, CloneAlgebra, Congruence,
    ConstantsAlgebra, FinAlgebra, FinUniverse, OpTable, Stream, Thread,
};

fn numeric(size: usize) -> Arc<FinUniverse> {
    FinUniverse::numeric("u", size).unwrap()
}

/// A random operation over a numeric universe of bounded size and arity.
fn arb_op(max_size: usize, max_arity: usize) -> impl Strategy<Value = OpTable> {
    (1..=max_size, 0..=max_arity).prop_flat_map(|(size, arity)| {
        proptest::collection::vec(0..size, size.pow(arity as u32))
            .prop_map(move |table| OpTable::new(numeric(size), arity, table).unwrap())
    })
}

/// Random blocks sharing one universe.
fn arb_blocks_over(size: usize, count: usize, max_arity: usize) -> impl Strategy<Value = Vec<Block>> {
    proptest::collection::vec(
        (0..=max_arity).prop_flat_map(move |arity| {
            proptest::collection::vec(0..size, size.pow(arity as u32)).prop_map(move |table| {
                Block::canonicalize(&OpTable::new(numeric(size), arity, table).unwrap())
            })
        }),
        count,
    )
}

proptest! {
    /// The canonical generator never has an unread last argument, wrapping it
    /// again changes nothing, and padding an operation never changes its block.
    #[test]
    fn canonicalize_is_stable_under_expansion(f in arb_op(3, 3), pad in 0usize..3) {
        let b = Block::canonicalize(&f);
        prop_assert!(b.arity() == 0 || !b.generator().has_unread_last());
        prop_assert_eq!(&Block::canonicalize(b.generator()), &b);
        let expanded = f.expand(f.arity() + pad).unwrap();
        prop_assert_eq!(Block::canonicalize(&expanded), b);
    }

    /// The stream value of a block equals the member evaluation on the prefix,
    /// so similar operations are indistinguishable on every stream.
    #[test]
    fn stream_value_depends_only_on_the_block(
        f in arb_op(3, 3),
        tail in 0usize..3,
        patch in proptest::collection::btree_map(1usize..6, 0usize..3, 0..4),
    ) {
        let size = f.universe().size();
        let overrides: BTreeMap<usize, usize> =
            patch.into_iter().map(|(i, v)| (i, v % size)).collect();
        let s = Stream::new(Thread::Constant(tail % size), overrides);
        let direct = f.evaluate(&s.prefix(f.arity())).unwrap();
        prop_assert_eq!(top_eval(&Block::canonicalize(&f), &s).unwrap(), direct);
    }

    /// Substitution computed at any legal padding arity gives the same block.
    #[test]
    fn substitution_is_padding_free(blocks in arb_blocks_over(2, 3, 2), extra in 0usize..3) {
        let a = &blocks[0];
        let bs = &blocks[1..];
        let base = min_padding(a, bs);
        let at_base = q_blocks_at(a, bs, base).unwrap();
        prop_assert_eq!(q_blocks_at(a, bs, base + extra).unwrap(), at_base);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The map x -> q(x, b1, b2) commutes with every basic operation of the
    /// section it acts on.
    #[test]
    fn substitution_commutes_with_basic_operations(
        table in proptest::collection::vec(0usize..2, 4),
        picks in proptest::collection::vec(0usize..64, 4),
    ) {
        let u = numeric(2);
        let f = OpTable::new(u.clone(), 2, table).unwrap();
        let alg = FinAlgebra::new(u, vec![("f".into(), f)]).unwrap();
        let h = BlockAlgebra::new(term_clone(&alg, 2).unwrap()).unwrap();
        let elems = h.elements().unwrap();
        let pick = |i: usize| elems[picks[i] % elems.len()].clone();
        let (x, y, b1, b2) = (pick(0), pick(1), pick(2), pick(3));
        let bs = [b1, b2];
        let lhs = h.q(&h.sigma("f", &[x.clone(), y.clone()]).unwrap(), &bs).unwrap();
        let rhs = h
            .sigma("f", &[h.q(&x, &bs).unwrap(), h.q(&y, &bs).unwrap()])
            .unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    /// On every materialized section the i-th projection constant is central
    /// exactly at the widths from i up to the cap.
    #[test]
    fn projection_constants_are_central_from_their_index(
        t1 in proptest::collection::vec(0usize..2, 2),
        t2 in proptest::collection::vec(0usize..2, 2),
    ) {
        let u = numeric(2);
        let g1 = OpTable::new(u.clone(), 1, t1).unwrap();
        let g2 = OpTable::new(u.clone(), 1, t2).unwrap();
        let alg = FinAlgebra::new(u, vec![("g1".into(), g1), ("g2".into(), g2)]).unwrap();
        let handle =
            ConstantsAlgebra::new(BlockAlgebra::new(term_clone(&alg, 2).unwrap()).unwrap())
                .unwrap();
        let (mat, _) = materialize(&handle).unwrap();
        for i in 1..=2usize {
            let ei = mat.op(&format!("e{i}")).unwrap().table()[0];
            let range = central_range(&mat, ei).unwrap();
            prop_assert_eq!(range, (i..=2).collect::<Vec<_>>());
        }
    }

    /// The congruence generated by one pair is the meet of all congruences
    /// relating the pair.
    #[test]
    fn generated_congruence_is_the_meet_over_the_lattice(
        (size, table, x, y) in (2usize..=4).prop_flat_map(|size| {
            (
                Just(size),
                proptest::collection::vec(0..size, size * size),
                0..size,
                0..size,
            )
        }),
    ) {
        let u = numeric(size);
        let f = OpTable::new(u.clone(), 2, table).unwrap();
        let alg = FinAlgebra::new(u, vec![("f".into(), f)]).unwrap();
        let generated = congruence_generate(&alg, &[(x, y)]).unwrap();
        let lattice = congruence_enumerate(&alg, 64).unwrap();
        let mut meet = Congruence::full(size);
        for th in lattice.iter() {
            if th.related(x, y) {
                meet = meet.meet(th);
            }
        }
        prop_assert_eq!(generated, meet);
    }
}
