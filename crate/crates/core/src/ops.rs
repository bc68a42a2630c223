//! Finitary operations on a finite universe and their equivalence blocks.
//!
//! An `OpTable` stores a total k-ary operation as a flat row-major table:
//! the leftmost argument is the most significant digit, so the entry for
//! arguments `(a1, .., ak)` sits at index `((a1*s + a2)*s + ..)*s + ak`
//! where `s` is the universe size. Nullary operations have a single entry.
//!
//! Two operations are *similar* when one arises from the other by adding
//! arguments the value never reads. Each similarity class is a [`Block`];
//! its canonical representative is the unique member that depends on its
//! last argument (or is nullary), obtained by stripping unread trailing
//! arguments.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::universe::{Elem, FinUniverse};

/// A total operation of fixed arity on a finite universe, stored as a flat
/// row-major value table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpTable {
    universe: Arc<FinUniverse>,
    arity: usize,
    table: Vec<Elem>,
}

/// Number of rows of a k-ary table over a universe of `size` elements.
pub(crate) fn row_count(size: usize, arity: usize) -> usize {
    size.pow(arity as u32)
}

impl OpTable {
    pub fn new(universe: Arc<FinUniverse>, arity: usize, table: Vec<Elem>) -> Result<Self> {
        let expected = row_count(universe.size(), arity);
        if table.len() != expected {
            return Err(Error::TableSize {
                expected,
                got: table.len(),
            });
        }
        if let Some(&bad) = table.iter().find(|&&v| v >= universe.size()) {
            return Err(Error::ElementOutOfRange {
                entry: bad,
                size: universe.size(),
            });
        }
        Ok(OpTable {
            universe,
            arity,
            table,
        })
    }

    /// Builds the table of a k-ary operation from a closure over argument rows.
    pub fn from_fn(
        universe: Arc<FinUniverse>,
        arity: usize,
        mut f: impl FnMut(&[Elem]) -> Elem,
    ) -> Result<Self> {
        let rows = row_count(universe.size(), arity);
        let mut table = Vec::with_capacity(rows);
        let mut args = vec![0usize; arity];
        for _ in 0..rows {
            table.push(f(&args));
            // increment the row counter, least significant digit last
            for d in (0..arity).rev() {
                args[d] += 1;
                if args[d] < universe.size() {
                    break;
                }
                args[d] = 0;
            }
        }
        OpTable::new(universe, arity, table)
    }

    /// The i-th projection of arity k (1-based i, i <= k).
    pub fn projection(universe: Arc<FinUniverse>, i: usize, k: usize) -> Result<Self> {
        if i == 0 || i > k {
            return Err(Error::ArgIndexOutOfRange { index: i, arity: k });
        }
        OpTable::from_fn(universe, k, |args| args[i - 1])
    }

    /// The basic i-th projection: arity i, returning its last argument.
    pub fn basic_projection(universe: Arc<FinUniverse>, i: usize) -> Result<Self> {
        OpTable::projection(universe, i, i)
    }

    /// The k-ary constant with value `value`.
    pub fn constant(universe: Arc<FinUniverse>, value: Elem, k: usize) -> Result<Self> {
        if value >= universe.size() {
            return Err(Error::ElementOutOfRange {
                entry: value,
                size: universe.size(),
            });
        }
        let rows = row_count(universe.size(), k);
        OpTable::new(universe, k, vec![value; rows])
    }

    pub fn universe(&self) -> &Arc<FinUniverse> {
        &self.universe
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    /// Row index of an argument tuple (leftmost argument most significant).
    pub fn row_index(&self, args: &[Elem]) -> Result<usize> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: args.len(),
            });
        }
        let s = self.universe.size();
        let mut idx = 0usize;
        for &a in args {
            if a >= s {
                return Err(Error::ElementOutOfRange { entry: a, size: s });
            }
            idx = idx * s + a;
        }
        Ok(idx)
    }

    pub fn evaluate(&self, args: &[Elem]) -> Result<Elem> {
        Ok(self.table[self.row_index(args)?])
    }

    /// Composition `self(g1, .., gn)` at outer arity k: all `gs` must be
    /// k-ary over the same universe, and `gs.len()` must equal `self.arity`.
    /// A nullary `self` composes with an empty `gs` into the k-ary constant.
    pub fn compose(&self, gs: &[OpTable], k: usize) -> Result<OpTable> {
        if gs.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: gs.len(),
            });
        }
        for g in gs {
            if g.universe != self.universe {
                return Err(Error::UniverseMismatch);
            }
            if g.arity != k {
                return Err(Error::ArityMismatch {
                    expected: k,
                    got: g.arity,
                });
            }
        }
        let rows = row_count(self.universe.size(), k);
        let s = self.universe.size();
        let mut table = Vec::with_capacity(rows);
        let mut inner = vec![0usize; self.arity];
        for row in 0..rows {
            let mut idx = 0usize;
            for (slot, g) in inner.iter_mut().zip(gs) {
                *slot = g.table[row];
                idx = idx * s + *slot;
            }
            table.push(self.table[idx]);
        }
        OpTable::new(self.universe.clone(), k, table)
    }

    /// Whether the value depends on the i-th argument (1-based).
    pub fn depends_on(&self, i: usize) -> Result<bool> {
        if i == 0 || i > self.arity {
            return Err(Error::ArgIndexOutOfRange {
                index: i,
                arity: self.arity,
            });
        }
        let s = self.universe.size();
        let stride = row_count(s, self.arity - i);
        let block = stride * s;
        for start in (0..self.table.len()).step_by(block) {
            for off in 0..stride {
                let base = self.table[start + off];
                for v in 1..s {
                    if self.table[start + off + v * stride] != base {
                        return Ok(true);
                    }
                }
            }
        }
        Ok(false)
    }

    /// Drops the last argument; requires that the value never reads it.
    pub fn restrict(&self) -> Result<OpTable> {
        if self.arity == 0 {
            return Err(Error::ArgIndexOutOfRange { index: 0, arity: 0 });
        }
        debug_assert!(!self.depends_on(self.arity)?);
        let s = self.universe.size();
        let table = self.table.iter().step_by(s).copied().collect();
        OpTable::new(self.universe.clone(), self.arity - 1, table)
    }

    /// Adds unread trailing arguments up to arity `k >= self.arity`.
    pub fn expand(&self, k: usize) -> Result<OpTable> {
        if k < self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: k,
            });
        }
        if k == self.arity {
            return Ok(self.clone());
        }
        let pad = row_count(self.universe.size(), k - self.arity);
        let mut table = Vec::with_capacity(self.table.len() * pad);
        for &v in &self.table {
            table.extend(std::iter::repeat(v).take(pad));
        }
        OpTable::new(self.universe.clone(), k, table)
    }

    /// True when the value never reads the last argument (never true for
    /// nullary operations).
    pub fn has_unread_last(&self) -> bool {
        self.arity > 0 && !self.depends_on(self.arity).unwrap()
    }

    /// Short display form: arity and the value table in element symbols.
    pub fn display(&self) -> String {
        let syms: Vec<&str> = self.table.iter().map(|&v| self.universe.symbol(v)).collect();
        format!("{}ary[{}]", self.arity, syms.join(","))
    }
}

impl fmt::Display for OpTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display())
    }
}

/// A similarity class of operations, stored by its canonical generator.
///
/// The generator is the unique member that is nullary or depends on its last
/// argument; every member of the block is `generator.expand(k)` for some k.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Block {
    generator: OpTable,
}

impl Block {
    /// Canonicalizes an arbitrary operation: strips unread trailing
    /// arguments until the result is nullary or reads its last argument.
    pub fn canonicalize(op: &OpTable) -> Block {
        let mut g = op.clone();
        while g.has_unread_last() {
            g = g.restrict().expect("unread last argument is strippable");
        }
        Block { generator: g }
    }

    /// Wraps an operation already in canonical form.
    pub fn from_generator(generator: OpTable) -> Result<Block> {
        if generator.has_unread_last() {
            return Err(Error::Internal(format!(
                "not a canonical generator: {generator}"
            )));
        }
        Ok(Block { generator })
    }

    pub fn generator(&self) -> &OpTable {
        &self.generator
    }

    /// Block arity = generator arity.
    pub fn arity(&self) -> usize {
        self.generator.arity()
    }

    pub fn universe(&self) -> &Arc<FinUniverse> {
        self.generator.universe()
    }

    /// The unique k-ary member of the block (k >= block arity).
    pub fn member(&self, k: usize) -> Result<OpTable> {
        self.generator.expand(k)
    }

    /// The i-th projection block (generator `p_i` of arity i).
    pub fn projection(universe: Arc<FinUniverse>, i: usize) -> Result<Block> {
        // on a one-element universe every projection collapses to the constant
        Ok(Block::canonicalize(&OpTable::basic_projection(
            universe, i,
        )?))
    }

    /// The constant block of `value` (nullary generator).
    pub fn constant(universe: Arc<FinUniverse>, value: Elem) -> Result<Block> {
        Ok(Block {
            generator: OpTable::constant(universe, value, 0)?,
        })
    }

    pub fn display(&self) -> String {
        format!("B{}", self.generator.display())
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display())
    }
}

/// Whether two operations lie in the same block.
pub fn similar(f: &OpTable, g: &OpTable) -> bool {
    Block::canonicalize(f) == Block::canonicalize(g)
}
