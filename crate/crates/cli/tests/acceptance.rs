//! The acceptance gate: ten independently checkable criteria, each printing
//! a single PASS or FAIL line. Run with
//! `cargo test -p blockalg-cli --test acceptance -- --nocapture`.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::AssertUnwindSafe;
use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use blockalg::{
    central_range, check_axioms, clone_close, clv_block_algebra, congruence_enumerate, decompose,
    is_nba, materialize, npartition_algebra, product_minimality_check, rca_embed, rep_iso_check,
    selector_algebra, term_clone, to_constants, Block, BlockAlgebra, CheckMode, CloneAlgebra,
    ClonePresentation, ConstantsAlgebra, FinAlgebra, FinUniverse, MinimalityVerdict, MutatedQ,
    NbaVerdict, OpTable, RepresentedAlgebra, DEFAULT_SIZE_GUARD,
};

fn criterion<F: FnOnce()>(n: usize, name: &str, body: F) {
    let result = std::panic::catch_unwind(AssertUnwindSafe(body));
    let verdict = if result.is_ok() { "PASS" } else { "FAIL" };
    println!("criterion {n} ({name}): {verdict}");
    if let Err(cause) = result {
        std::panic::resume_unwind(cause);
    }
}

fn bool_universe() -> Arc<FinUniverse> {
    FinUniverse::numeric("bool", 2).unwrap()
}

fn nand_algebra() -> FinAlgebra {
    let u = bool_universe();
    let nand = OpTable::new(u.clone(), 2, vec![1, 1, 1, 0]).unwrap();
    FinAlgebra::new(u, vec![("nand".into(), nand)]).unwrap()
}

fn boolean_algebra() -> FinAlgebra {
    let u = bool_universe();
    let ops = vec![
        ("and".into(), OpTable::new(u.clone(), 2, vec![0, 0, 0, 1]).unwrap()),
        ("or".into(), OpTable::new(u.clone(), 2, vec![0, 1, 1, 1]).unwrap()),
        ("not".into(), OpTable::new(u.clone(), 1, vec![1, 0]).unwrap()),
        ("zero".into(), OpTable::constant(u.clone(), 0, 0).unwrap()),
        ("one".into(), OpTable::constant(u.clone(), 1, 0).unwrap()),
    ];
    FinAlgebra::new(u, ops).unwrap()
}

fn sets_algebra() -> FinAlgebra {
    FinAlgebra::new(FinUniverse::numeric("two", 2).unwrap(), vec![]).unwrap()
}

fn left_zero() -> FinAlgebra {
    let u = FinUniverse::numeric("lz", 2).unwrap();
    let mul = OpTable::new(u.clone(), 2, vec![0, 0, 1, 1]).unwrap();
    FinAlgebra::new(u, vec![("mul".into(), mul)]).unwrap()
}

fn right_zero() -> FinAlgebra {
    let u = FinUniverse::numeric("rz", 2).unwrap();
    let mul = OpTable::new(u.clone(), 2, vec![0, 1, 0, 1]).unwrap();
    FinAlgebra::new(u, vec![("mul".into(), mul)]).unwrap()
}

fn block_handle(a: &FinAlgebra, cap: usize) -> BlockAlgebra {
    BlockAlgebra::new(term_clone(a, cap).unwrap()).unwrap()
}

/// Criterion 1: the clone-algebra laws hold exhaustively on the nand block
/// algebra at cap 3 for widths up to 3, quantified over the arity-at-most-2
/// blocks, within the time budget; planting a single substitution fault
/// makes the same sweep report a violation.
#[test]
fn criterion_01_law_suite_with_mutation_control() {
    criterion(1, "law suite", || {
        let started = Instant::now();
        let h = block_handle(&nand_algebra(), 3);
        let domain = h.section().members_with_arity_at_most(2);
        assert_eq!(domain.len(), 16);
        let mode = CheckMode::Exhaustive { max_n: 3 };
        let report = check_axioms(&h, &domain, &mode).unwrap();
        assert!(report.passed(), "violations: {:?}", report.violations);
        assert!(report.total_instances() > 0);

        let nand = h.sigma_block("nand").unwrap();
        let planted = MutatedQ::new(
            h.clone(),
            nand,
            vec![h.e(1).unwrap(), h.e(2).unwrap()],
            h.e(1).unwrap(),
        );
        let control = check_axioms(&planted, &domain, &mode).unwrap();
        assert!(!control.passed());
        assert!(!control.violations.is_empty());

        let elapsed = started.elapsed();
        assert!(
            elapsed.as_secs() < 120,
            "law suite took {elapsed:?}, budget is 2 minutes"
        );
    });
}

/// Criterion 2: expanding every block of the cap-2 nand section back into
/// operations reproduces exactly the 22-operation set.
#[test]
fn criterion_02_block_union_round_trip() {
    criterion(2, "block union round trip", || {
        let section = term_clone(&nand_algebra(), 2).unwrap();
        let ops: BTreeSet<OpTable> = section.operations().into_iter().collect();
        assert_eq!(ops.len(), 22);
        let mut union: BTreeSet<OpTable> = BTreeSet::new();
        for block in section.members() {
            for k in block.arity()..=section.cap() {
                union.insert(block.member(k).unwrap());
            }
        }
        assert_eq!(union, ops);
    });
}

/// Criterion 3: the representation map is an isomorphism onto a block
/// section for the nand clone, the projections-only clone, and the
/// left-zero clone.
#[test]
fn criterion_03_representation_isomorphism() {
    criterion(3, "representation isomorphism", || {
        let nand = block_handle(&nand_algebra(), 2);
        assert!(rep_iso_check(&nand, 2).unwrap().passed());

        let empty = FinAlgebra::new(bool_universe(), vec![]).unwrap();
        let pres = ClonePresentation::new(empty, vec![], vec![], 3).unwrap();
        let projections = BlockAlgebra::new(clone_close(&pres).unwrap()).unwrap();
        assert!(rep_iso_check(&projections, 3).unwrap().passed());

        let lz = block_handle(&left_zero(), 2);
        assert!(rep_iso_check(&lz, 2).unwrap().passed());
    });
}

/// Criterion 4: trading operations for constants and back is the identity
/// on the Boolean block algebra, in both directions.
#[test]
fn criterion_04_signature_constant_equivalence() {
    criterion(4, "signature and constants", || {
        let h = block_handle(&boolean_algebra(), 2);
        let elems = h.elements().unwrap();

        // operations -> pointed constants -> operations
        let pointed = ConstantsAlgebra::new(h.clone()).unwrap();
        let rebuilt =
            RepresentedAlgebra::new(pointed.clone(), pointed.constants().to_vec()).unwrap();
        assert_eq!(rebuilt.signature(), h.signature());
        for (name, arity) in h.signature() {
            let mut args = vec![0usize; arity];
            loop {
                let tuple: Vec<Block> = args.iter().map(|&i| elems[i].clone()).collect();
                assert_eq!(
                    rebuilt.sigma(&name, &tuple).unwrap(),
                    h.sigma(&name, &tuple).unwrap()
                );
                let mut pos = arity;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    args[pos] += 1;
                    if args[pos] < elems.len() {
                        break;
                    }
                    args[pos] = 0;
                }
                if args.iter().all(|&i| i == 0) {
                    break;
                }
            }
        }

        // pointed constants -> operations -> pointed constants
        assert_eq!(to_constants(&rebuilt).unwrap(), pointed.constants());
    });
}

/// Criterion 5: in the selector structures and their squares every element
/// is central at the structure's width; decomposition splits the square
/// into factors multiplying back to it; the central widths of the i-th
/// projection block run from i to the cap.
#[test]
fn criterion_05_centrality_and_decomposition() {
    criterion(5, "centrality and decomposition", || {
        for n in [2usize, 3] {
            let single = selector_algebra(n).unwrap();
            assert!(matches!(
                is_nba(&single, n).unwrap(),
                NbaVerdict::Nba { elements } if elements == n
            ));

            // the n-partitions of a 2-element set, counted by the power
            let square = npartition_algebra(n, 2).unwrap();
            assert_eq!(square.size(), n * n);
            assert!(matches!(is_nba(&square, n).unwrap(), NbaVerdict::Nba { .. }));
            for c in 0..square.size() {
                let dec = decompose(&square, c, n).unwrap();
                assert_eq!(dec.factors.len(), n);
                assert_eq!(dec.factor_sizes().iter().product::<usize>(), n * n);
                assert_eq!(dec.product.size(), square.size());
            }
        }

        let (nand_section, _) =
            materialize(&clv_block_algebra(&nand_algebra(), 2).unwrap()).unwrap();
        let e1 = nand_section.op("e1").unwrap().table()[0];
        let e2 = nand_section.op("e2").unwrap().table()[0];
        assert_eq!(central_range(&nand_section, e1).unwrap(), vec![1, 2]);
        assert_eq!(central_range(&nand_section, e2).unwrap(), vec![2]);

        let (proj_section, _) =
            materialize(&clv_block_algebra(&sets_algebra(), 3).unwrap()).unwrap();
        assert_eq!(proj_section.size(), 3);
        for i in 1..=3usize {
            let e = proj_section.op(&format!("e{i}")).unwrap().table()[0];
            let expect: Vec<usize> = (i..=3).collect();
            assert_eq!(central_range(&proj_section, e).unwrap(), expect);
        }
    });
}

/// Criterion 6: congruence counts of materialized sections match the known
/// lattices of equational theories: 2 over the projections-only section on
/// four variables, 2 over the full Boolean section at cap 2.
#[test]
fn criterion_06_section_congruence_counts() {
    criterion(6, "section congruence counts", || {
        let started = Instant::now();
        let (sets_section, _) =
            materialize(&clv_block_algebra(&sets_algebra(), 4).unwrap()).unwrap();
        let sets_lattice = congruence_enumerate(&sets_section, DEFAULT_SIZE_GUARD).unwrap();
        assert_eq!(sets_lattice.len(), 2);

        let (bool_section, _) =
            materialize(&clv_block_algebra(&boolean_algebra(), 2).unwrap()).unwrap();
        assert_eq!(bool_section.size(), 16);
        let bool_lattice = congruence_enumerate(&bool_section, DEFAULT_SIZE_GUARD).unwrap();
        assert_eq!(bool_lattice.len(), 2);

        let elapsed = started.elapsed();
        assert!(
            elapsed.as_secs() < 300,
            "enumeration took {elapsed:?}, budget is 5 minutes"
        );
    });
}

/// Criterion 7: the left-zero and right-zero groupoids admit the witness
/// (mul v1 v2) at depth 1 and their product section is minimal; two copies
/// of the empty signature admit no witness and the product is not minimal;
/// the two verdicts must agree in both runs.
#[test]
fn criterion_07_independence_matches_minimality() {
    criterion(7, "independence and minimality", || {
        let found = product_minimality_check(&left_zero(), &right_zero(), 1, 2).unwrap();
        assert_eq!(found.witness.as_deref(), Some("(mul v1 v2)"));
        assert!(matches!(found.minimality.verdict, MinimalityVerdict::Minimal));
        assert!(found.agree);

        let missing = product_minimality_check(&sets_algebra(), &sets_algebra(), 2, 2).unwrap();
        assert!(missing.witness.is_none());
        assert!(matches!(
            missing.minimality.verdict,
            MinimalityVerdict::NotMinimal { .. }
        ));
        assert!(missing.agree);
    });
}

/// Criterion 8: the substitution identity
/// q2(y, q2(y,x11,x12), q2(y,x21,x22)) = q2(y, x11, x22) holds in the
/// projections-only section and fails in the full Boolean section, where
/// taking y = or and constants for the corners gives 1 on the left and 0
/// on the right.
#[test]
fn criterion_08_substitution_identity_regression() {
    criterion(8, "substitution identity", || {
        let nested = |h: &BlockAlgebra, y: &Block, xs: [&Block; 4]| {
            let row1 = h.q(y, &[xs[0].clone(), xs[1].clone()]).unwrap();
            let row2 = h.q(y, &[xs[2].clone(), xs[3].clone()]).unwrap();
            h.q(y, &[row1, row2]).unwrap()
        };
        let flat = |h: &BlockAlgebra, y: &Block, x11: &Block, x22: &Block| {
            h.q(y, &[x11.clone(), x22.clone()]).unwrap()
        };

        let sets = block_handle(&sets_algebra(), 2);
        let sets_elems = sets.elements().unwrap();
        for y in &sets_elems {
            for x11 in &sets_elems {
                for x12 in &sets_elems {
                    for x21 in &sets_elems {
                        for x22 in &sets_elems {
                            assert_eq!(
                                nested(&sets, y, [x11, x12, x21, x22]),
                                flat(&sets, y, x11, x22)
                            );
                        }
                    }
                }
            }
        }

        let full = block_handle(&nand_algebra(), 2);
        let u = full.section().universe().clone();
        let or = Block::canonicalize(&OpTable::new(u.clone(), 2, vec![0, 1, 1, 1]).unwrap());
        let c0 = Block::constant(u.clone(), 0).unwrap();
        let c1 = Block::constant(u, 1).unwrap();
        let lhs = nested(&full, &or, [&c0, &c1, &c1, &c0]);
        let rhs = flat(&full, &or, &c0, &c0);
        assert_eq!(lhs, c1);
        assert_eq!(rhs, c0);
        assert_ne!(lhs, rhs);
    });
}

/// Criterion 9: anchoring each block as a representable function is
/// injective across the full cap-2 nand section, and the anchoring turns
/// substitution into composition on a thousand seeded random instances.
#[test]
fn criterion_09_embedding_injective_and_q_preserving() {
    criterion(9, "representable embedding", || {
        let h = block_handle(&nand_algebra(), 2);
        let elems = h.elements().unwrap();
        assert_eq!(elems.len(), 16);

        let value_at = |c: &Block, x1: &Block, x2: &Block| {
            let point = BTreeMap::from([(1, x1.clone()), (2, x2.clone())]);
            rca_embed(&h, c, &point).unwrap()
        };
        let mut graphs: Vec<Vec<Block>> = Vec::with_capacity(elems.len());
        for c in &elems {
            let mut graph = Vec::with_capacity(elems.len() * elems.len());
            for x1 in &elems {
                for x2 in &elems {
                    graph.push(value_at(c, x1, x2));
                }
            }
            graphs.push(graph);
        }
        for i in 0..graphs.len() {
            for j in (i + 1)..graphs.len() {
                assert_ne!(
                    graphs[i], graphs[j],
                    "blocks {} and {} embed to the same function",
                    elems[i], elems[j]
                );
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(0xB10C);
        let pick = |rng: &mut ChaCha8Rng| elems[rng.gen_range(0..elems.len())].clone();
        for _ in 0..1000 {
            let n = rng.gen_range(0..=2usize);
            let c = pick(&mut rng);
            let bs: Vec<Block> = (0..n).map(|_| pick(&mut rng)).collect();
            let x1 = pick(&mut rng);
            let x2 = pick(&mut rng);
            let substituted = h.q(&c, &bs).unwrap();
            let lhs = value_at(&substituted, &x1, &x2);
            let point = [&x1, &x2];
            let mut outer = BTreeMap::new();
            for i in 1..=2usize {
                let v = if i <= n {
                    value_at(&bs[i - 1], &x1, &x2)
                } else {
                    point[i - 1].clone()
                };
                outer.insert(i, v);
            }
            let rhs = rca_embed(&h, &c, &outer).unwrap();
            assert_eq!(lhs, rhs);
        }
    });
}

/// Criterion 10: every CLI command, run twice with the same inputs and
/// seeds, writes byte-identical stdout and artifacts.
#[test]
fn criterion_10_cli_determinism() {
    criterion(10, "CLI determinism", || {
        let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
        let fx = |name: &str| fixtures.join(name).to_str().unwrap().to_string();
        let dir = tempfile::tempdir().unwrap();
        let art = |name: &str| dir.path().join(name).to_str().unwrap().to_string();

        let commands: Vec<(Vec<String>, Vec<String>)> = vec![
            (
                vec!["close".into(), fx("nand.alg"), "--cap".into(), "2".into(),
                     "--json".into(), art("close.json")],
                vec![art("close.json")],
            ),
            (
                vec!["blocks".into(), fx("bool2.alg"), "--json".into(), art("blocks.json")],
                vec![art("blocks.json")],
            ),
            (
                vec!["axioms".into(), fx("nand.alg"), "--cap".into(), "2".into(),
                     "--samples".into(), "200".into(), "--seed".into(), "42".into(),
                     "--json".into(), art("axioms.json")],
                vec![art("axioms.json")],
            ),
            (
                vec!["dim".into(), fx("bool2.alg"), "(and v1 (or v1 v2))".into(),
                     "--cap".into(), "2".into(), "--json".into(), art("dim.json")],
                vec![art("dim.json")],
            ),
            (
                vec!["central".into(), fx("sel2.alg"), "e1".into(), "--n".into(), "2".into(),
                     "--json".into(), art("central.json")],
                vec![art("central.json")],
            ),
            (
                vec!["decompose".into(), fx("npart2_2.alg"), "e1.e2".into(),
                     "--n".into(), "2".into(), "--json".into(), art("decompose.json")],
                vec![art("decompose.json")],
            ),
            (
                vec!["congruences".into(), fx("sets.alg"), "--section".into(), "4".into(),
                     "--dot".into(), art("congruences.dot"),
                     "--json".into(), art("congruences.json")],
                vec![art("congruences.dot"), art("congruences.json")],
            ),
            (
                vec!["derive".into(), fx("lz.alg"), "(mul v1 v2)".into(), "(mul v2 v1)".into(),
                     "--cap".into(), "2".into(), "--axiom".into(), "(mul v1 v2) = v2".into(),
                     "--json".into(), art("derive.json")],
                vec![art("derive.json")],
            ),
            (
                vec!["clv".into(), fx("nand.alg"), "--cap".into(), "2".into(),
                     "--json".into(), art("clv.json")],
                vec![art("clv.json")],
            ),
            (
                vec!["repiso".into(), fx("nand.alg"), "--cap".into(), "2".into(),
                     "--json".into(), art("repiso.json")],
                vec![art("repiso.json")],
            ),
            (
                vec!["independence".into(), fx("lz.alg"), fx("rz.alg"),
                     "--depth".into(), "2".into(), "--json".into(), art("independence.json")],
                vec![art("independence.json")],
            ),
            (
                vec!["minimal".into(), fx("nand.alg"), "--cap".into(), "2".into(),
                     "--depth".into(), "4".into(), "--json".into(), art("minimal.json")],
                vec![art("minimal.json")],
            ),
        ];

        for (args, artifacts) in &commands {
            let first = Command::new(env!("CARGO_BIN_EXE_blockalg"))
                .args(args)
                .output()
                .unwrap();
            let first_files: Vec<Vec<u8>> = artifacts
                .iter()
                .map(|p| std::fs::read(p).unwrap())
                .collect();
            let second = Command::new(env!("CARGO_BIN_EXE_blockalg"))
                .args(args)
                .output()
                .unwrap();
            let second_files: Vec<Vec<u8>> = artifacts
                .iter()
                .map(|p| std::fs::read(p).unwrap())
                .collect();
            assert_eq!(first.status, second.status, "status differs: {args:?}");
            assert_eq!(first.stdout, second.stdout, "stdout differs: {args:?}");
            assert_eq!(first_files, second_files, "artifacts differ: {args:?}");
            for bytes in &first_files {
                assert!(!bytes.is_empty(), "empty artifact: {args:?}");
            }
        }
    });
}
