//! Clone sections: the operations generated by a finite algebra (or an
//! explicit generator set) under composition, cut at an arity cap.
//!
//! The section is stored as a set of blocks. When every generator has arity
//! at most the cap, the cut is exact: any generated operation of arity <= cap
//! arises from compositions whose inner and outer arities both stay <= cap,
//! so raising the cap never adds or removes a block of arity <= cap.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::algebra::FinAlgebra;
use crate::error::{Error, Result};
use crate::ops::{Block, OpTable};
use crate::term::Term;
use crate::universe::FinUniverse;

/// Generators for a clone over the universe of a finite algebra.
#[derive(Debug, Clone)]
pub struct ClonePresentation {
    algebra: FinAlgebra,
    generator_names: Vec<String>,
    extra_generators: Vec<OpTable>,
    cap: usize,
}

impl ClonePresentation {
    /// All basic operations of the algebra as generators.
    pub fn of_algebra(algebra: FinAlgebra, cap: usize) -> Result<Self> {
        let names = algebra.signature().into_iter().map(|(n, _)| n).collect();
        ClonePresentation::new(algebra, names, vec![], cap)
    }

    /// A subset of named operations plus extra unnamed tables as generators.
    pub fn new(
        algebra: FinAlgebra,
        generator_names: Vec<String>,
        extra_generators: Vec<OpTable>,
        cap: usize,
    ) -> Result<Self> {
        if cap == 0 {
            return Err(Error::CapExceeded {
                cap,
                needed: 1,
                what: "the first projection".into(),
            });
        }
        for name in &generator_names {
            let op = algebra.op(name)?;
            if op.arity() > cap {
                return Err(Error::CapExceeded {
                    cap,
                    needed: op.arity(),
                    what: format!("generator {name:?}"),
                });
            }
        }
        for op in &extra_generators {
            if op.universe() != algebra.universe() {
                return Err(Error::UniverseMismatch);
            }
            if op.arity() > cap {
                return Err(Error::CapExceeded {
                    cap,
                    needed: op.arity(),
                    what: "an extra generator".into(),
                });
            }
        }
        Ok(ClonePresentation {
            algebra,
            generator_names,
            extra_generators,
            cap,
        })
    }

    pub fn algebra(&self) -> &FinAlgebra {
        &self.algebra
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn generator_tables(&self) -> Result<Vec<OpTable>> {
        let mut gens = Vec::new();
        for name in &self.generator_names {
            gens.push(self.algebra.op(name)?.clone());
        }
        gens.extend(self.extra_generators.iter().cloned());
        Ok(gens)
    }
}

/// Three-valued membership answer for a section with an arity cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Yes,
    No,
    /// The canonical arity of the queried operation exceeds the cap, so the
    /// cut section cannot decide membership.
    UndecidedAtCap,
}

/// The blocks of arity <= cap of a generated clone, in canonical order
/// (ascending block arity, then value table).
#[derive(Debug, Clone)]
pub struct CloneSection {
    algebra: FinAlgebra,
    cap: usize,
    members: Vec<Block>,
    index: HashMap<Block, usize>,
}

impl CloneSection {
    pub fn universe(&self) -> &Arc<FinUniverse> {
        self.algebra.universe()
    }

    /// The algebra whose basic operations name the section's signature.
    pub fn algebra(&self) -> &FinAlgebra {
        &self.algebra
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn members(&self) -> &[Block] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains_block(&self, b: &Block) -> bool {
        self.index.contains_key(b)
    }

    pub fn position(&self, b: &Block) -> Option<usize> {
        self.index.get(b).copied()
    }

    /// Membership of an arbitrary operation. The answer is exact whenever
    /// the operation's canonical arity fits under the cap, even if the given
    /// table is wider than the cap.
    pub fn contains(&self, op: &OpTable) -> Containment {
        let b = Block::canonicalize(op);
        if b.arity() > self.cap {
            Containment::UndecidedAtCap
        } else if self.contains_block(&b) {
            Containment::Yes
        } else {
            Containment::No
        }
    }

    /// The union of the member blocks cut at the cap: every operation of
    /// arity <= cap in the clone, sorted by (arity, table).
    pub fn operations(&self) -> Vec<OpTable> {
        let mut ops: Vec<OpTable> = Vec::new();
        for b in &self.members {
            for k in b.arity()..=self.cap {
                ops.push(b.member(k).expect("k >= block arity"));
            }
        }
        ops.sort_by(|a, b| (a.arity(), a.table()).cmp(&(b.arity(), b.table())));
        ops
    }

    /// Members of block arity <= bound, in canonical order.
    pub fn members_with_arity_at_most(&self, bound: usize) -> Vec<Block> {
        self.members
            .iter()
            .filter(|b| b.arity() <= bound)
            .cloned()
            .collect()
    }
}

/// Least set of blocks containing the generators and all projections up to
/// the cap, closed under composition at arities <= cap.
///
/// The scan applies generators to member tuples only: every composite of
/// members is a generator applied to substituted members, so the fixpoint
/// equals the all-members composition closure (the closure invariant is
/// exercised separately by tests).
pub fn clone_close(p: &ClonePresentation) -> Result<CloneSection> {
    let universe = p.algebra.universe().clone();
    let gens = p.generator_tables()?;
    let mut members: BTreeSet<Block> = BTreeSet::new();
    for i in 1..=p.cap {
        members.insert(Block::projection(universe.clone(), i)?);
    }
    for g in &gens {
        members.insert(Block::canonicalize(g));
    }
    loop {
        let snapshot: Vec<Block> = members.iter().cloned().collect();
        let mut added = false;
        for g in &gens {
            let n = g.arity();
            let mut tuple_idx = vec![0usize; n];
            loop {
                let tuple: Vec<&Block> = tuple_idx.iter().map(|&i| &snapshot[i]).collect();
                let k = tuple.iter().map(|b| b.arity()).max().unwrap_or(0);
                let inner: Vec<OpTable> = tuple
                    .iter()
                    .map(|b| b.member(k))
                    .collect::<Result<_>>()?;
                let composite = g.compose(&inner, k)?;
                if members.insert(Block::canonicalize(&composite)) {
                    added = true;
                }
                // advance the tuple counter over the snapshot
                let mut d = n;
                loop {
                    if d == 0 {
                        break;
                    }
                    d -= 1;
                    tuple_idx[d] += 1;
                    if tuple_idx[d] < snapshot.len() {
                        break;
                    }
                    tuple_idx[d] = 0;
                }
                if tuple_idx.iter().all(|&i| i == 0) {
                    break;
                }
            }
        }
        if !added {
            break;
        }
    }
    let members: Vec<Block> = members.into_iter().collect();
    let index = members
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, b)| (b, i))
        .collect();
    Ok(CloneSection {
        algebra: p.algebra.clone(),
        cap: p.cap,
        members,
        index,
    })
}

/// The clone of term operations of the algebra, cut at the cap.
pub fn term_clone(a: &FinAlgebra, cap: usize) -> Result<CloneSection> {
    clone_close(&ClonePresentation::of_algebra(a.clone(), cap)?)
}

/// The k-ary term operation of `t` on `a`. Requires k >= every variable
/// index in `t`.
pub fn term_eval(t: &Term, a: &FinAlgebra, k: usize) -> Result<OpTable> {
    let m = t.max_var();
    if m > k {
        return Err(Error::VariableAboveArity { index: m, k });
    }
    eval(t, a, k)
}

/// The block of the term operation of `t` on `a`. The cap bounds the
/// variable indices `t` may use; the canonical arity is at most that.
pub fn term_block(a: &FinAlgebra, t: &Term, cap: usize) -> Result<Block> {
    let k = t.max_var();
    if k > cap {
        return Err(Error::CapExceeded {
            cap,
            needed: k,
            what: format!("term {t}"),
        });
    }
    Ok(Block::canonicalize(&term_eval(t, a, k)?))
}

fn eval(t: &Term, a: &FinAlgebra, k: usize) -> Result<OpTable> {
    match t {
        Term::Var(i) => OpTable::projection(a.universe().clone(), *i, k),
        Term::App(name, args) => {
            let op = a.op(name)?;
            if op.arity() != args.len() {
                return Err(Error::ArityMismatch {
                    expected: op.arity(),
                    got: args.len(),
                });
            }
            let inner: Vec<OpTable> = args.iter().map(|s| eval(s, a, k)).collect::<Result<_>>()?;
            op.compose(&inner, k)
        }
    }
}
