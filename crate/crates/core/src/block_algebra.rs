//! The block algebra of a clone section: blocks as elements, projection
//! blocks as constants, and substitution by padded composition.
//!
//! For blocks a, b1..bn the n-ary substitution is computed at a padding
//! arity k >= n that also covers every participating block arity:
//!
//! ```text
//! q(a, b1..bn) = canonicalize( a@k ( b1@k, .., bn@k, p(n+1)@k, .., p(k)@k ) )
//! ```
//!
//! where `x@k` is the k-ary member of the block and `p(i)@k` the i-th k-ary
//! projection. The resulting block does not depend on the choice of k, which
//! is what lets a finite cap stand in for the unbounded operator family.

use std::collections::BTreeMap;

use crate::clone::CloneSection;
use crate::error::{Error, Result};
use crate::handle::{CloneAlgebra, Dimension};
use crate::ops::{Block, OpTable};

/// Substitution on raw blocks at an explicit padding arity.
pub fn q_blocks_at(a: &Block, bs: &[Block], k: usize) -> Result<Block> {
    let n = bs.len();
    let u = a.universe();
    for b in bs {
        if b.universe() != u {
            return Err(Error::UniverseMismatch);
        }
    }
    let needed = min_padding(a, bs);
    if k < needed {
        return Err(Error::ArityMismatch {
            expected: needed,
            got: k,
        });
    }
    let mut inner: Vec<OpTable> = bs.iter().map(|b| b.member(k)).collect::<Result<_>>()?;
    for i in (n + 1)..=k {
        inner.push(OpTable::projection(u.clone(), i, k)?);
    }
    let composed = a.member(k)?.compose(&inner, k)?;
    Ok(Block::canonicalize(&composed))
}

/// Substitution on raw blocks at the minimal padding arity.
pub fn q_blocks(a: &Block, bs: &[Block]) -> Result<Block> {
    q_blocks_at(a, bs, min_padding(a, bs))
}

/// Smallest padding arity: at least the width, the outer block arity, and
/// every inner block arity.
pub fn min_padding(a: &Block, bs: &[Block]) -> usize {
    bs.iter()
        .map(Block::arity)
        .chain([bs.len(), a.arity()])
        .max()
        .unwrap_or(0)
}

/// A clone section viewed as a finite clone-algebra handle.
#[derive(Debug, Clone)]
pub struct BlockAlgebra {
    section: CloneSection,
    pure: bool,
}

impl BlockAlgebra {
    /// Section plus the basic operations of its algebra. Every basic
    /// operation's block must lie in the section.
    pub fn new(section: CloneSection) -> Result<Self> {
        for (name, op) in section.algebra().ops() {
            if op.arity() > section.cap() {
                return Err(Error::CapExceeded {
                    cap: section.cap(),
                    needed: op.arity(),
                    what: format!("basic operation {name:?}"),
                });
            }
            let b = Block::canonicalize(op);
            if !section.contains_block(&b) {
                return Err(Error::SectionNotClosed(format!(
                    "basic operation {name:?} has no block in the section"
                )));
            }
        }
        Ok(BlockAlgebra {
            section,
            pure: false,
        })
    }

    /// Section with the basic operations forgotten.
    pub fn pure(section: CloneSection) -> Self {
        BlockAlgebra {
            section,
            pure: true,
        }
    }

    pub fn section(&self) -> &CloneSection {
        &self.section
    }

    pub fn cap(&self) -> usize {
        self.section.cap()
    }

    pub fn is_pure(&self) -> bool {
        self.pure
    }

    /// The block of a named basic operation.
    pub fn sigma_block(&self, name: &str) -> Result<Block> {
        if self.pure {
            return Err(Error::PureHandle(name.to_string()));
        }
        Ok(Block::canonicalize(self.section.algebra().op(name)?))
    }

    fn require_member(&self, b: &Block) -> Result<()> {
        if self.section.contains_block(b) {
            Ok(())
        } else {
            Err(Error::SectionNotClosed(format!(
                "block {b} is not in the section"
            )))
        }
    }
}

impl CloneAlgebra for BlockAlgebra {
    type Elem = Block;

    fn e(&self, i: usize) -> Result<Block> {
        if i == 0 || i > self.cap() {
            return Err(Error::CapExceeded {
                cap: self.cap(),
                needed: i.max(1),
                what: format!("constant e{i}"),
            });
        }
        Block::projection(self.section.universe().clone(), i)
    }

    fn q(&self, a: &Block, bs: &[Block]) -> Result<Block> {
        self.require_member(a)?;
        for b in bs {
            self.require_member(b)?;
        }
        let k = min_padding(a, bs);
        if bs.len() > self.cap() || k > self.cap() {
            return Err(Error::CapExceeded {
                cap: self.cap(),
                needed: k.max(bs.len()),
                what: format!("substitution of width {}", bs.len()),
            });
        }
        let out = q_blocks_at(a, bs, k)?;
        debug_assert!(
            self.section.contains_block(&out),
            "section not closed under substitution"
        );
        Ok(out)
    }

    fn signature(&self) -> Vec<(String, usize)> {
        if self.pure {
            vec![]
        } else {
            self.section.algebra().signature()
        }
    }

    fn sigma(&self, name: &str, args: &[Block]) -> Result<Block> {
        if self.pure {
            return Err(Error::PureHandle(name.to_string()));
        }
        let op = self.section.algebra().op(name)?;
        if op.arity() != args.len() {
            return Err(Error::ArityMismatch {
                expected: op.arity(),
                got: args.len(),
            });
        }
        for b in args {
            self.require_member(b)?;
        }
        let k = args.iter().map(Block::arity).max().unwrap_or(0);
        let inner: Vec<OpTable> = args.iter().map(|b| b.member(k)).collect::<Result<_>>()?;
        Ok(Block::canonicalize(&op.compose(&inner, k)?))
    }

    fn dim_bound(&self) -> Option<usize> {
        Some(self.cap())
    }

    /// Block dimension is the block arity: the generator reads its last
    /// argument, and unread trailing arguments were stripped.
    fn dimension(&self, a: &Block) -> Result<Dimension> {
        Ok(Dimension::Finite(a.arity()))
    }

    fn elements(&self) -> Option<Vec<Block>> {
        Some(self.section.members().to_vec())
    }

    fn label(&self, a: &Block) -> String {
        a.display()
    }

    fn describe(&self) -> String {
        let sig: Vec<String> = self
            .signature()
            .into_iter()
            .map(|(n, k)| format!("{n}/{k}"))
            .collect();
        format!(
            "block-section(cap={}, {} blocks) over {} sig[{}]",
            self.cap(),
            self.section.len(),
            self.section.universe(),
            sig.join(",")
        )
    }
}

/// Embeds `c` as a finitely supported stream function and evaluates it.
///
/// The stream is the identity thread (position i holds `e(i)`) patched by
/// the given overrides. With k the largest position where the stream differs
/// from the thread, the value is `q(c, s1, .., sk)`; for the unpatched
/// thread it is `c` itself, which makes the embedding injective.
pub fn rca_embed<H: CloneAlgebra>(
    h: &H,
    c: &H::Elem,
    overrides: &BTreeMap<usize, H::Elem>,
) -> Result<H::Elem> {
    let mut k = 0usize;
    for (&i, v) in overrides {
        if i == 0 {
            return Err(Error::ArgIndexOutOfRange { index: 0, arity: 0 });
        }
        if v != &h.e(i)? {
            k = k.max(i);
        }
    }
    let mut args = Vec::with_capacity(k);
    for i in 1..=k {
        match overrides.get(&i) {
            Some(v) => args.push(v.clone()),
            None => args.push(h.e(i)?),
        }
    }
    h.q(c, &args)
}
