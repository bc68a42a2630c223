//! Infinite argument streams with finite support, and evaluation of a block
//! on a stream.
//!
//! A k-ary operation only reads the first k stream positions, so every block
//! determines a single stream-to-value function shared by all its members:
//! evaluate the generator on the first `arity` positions.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::ops::Block;
use crate::universe::Elem;

/// The default tail of a stream, queried at positions with no override.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Thread<T> {
    /// Every position takes the same value.
    Constant(T),
    /// Position i (1-based) takes `values[(i-1) % values.len()]`.
    Cycle(Vec<T>),
}

impl<T: Clone> Thread<T> {
    fn at(&self, i: usize) -> T {
        match self {
            Thread::Constant(v) => v.clone(),
            Thread::Cycle(vs) => vs[(i - 1) % vs.len()].clone(),
        }
    }
}

/// An infinite assignment of values to positions 1, 2, .. given by a thread
/// plus finitely many overrides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stream<T> {
    thread: Thread<T>,
    overrides: BTreeMap<usize, T>,
}

impl<T: Clone + Eq> Stream<T> {
    pub fn new(thread: Thread<T>, overrides: BTreeMap<usize, T>) -> Self {
        let mut overrides = overrides;
        overrides.remove(&0); // positions are 1-based
        Stream { thread, overrides }
    }

    pub fn constant(value: T) -> Self {
        Stream {
            thread: Thread::Constant(value),
            overrides: BTreeMap::new(),
        }
    }

    pub fn with(mut self, position: usize, value: T) -> Self {
        if position > 0 {
            self.overrides.insert(position, value);
        }
        self
    }

    /// Value at 1-based position i.
    pub fn at(&self, i: usize) -> T {
        match self.overrides.get(&i) {
            Some(v) => v.clone(),
            None => self.thread.at(i),
        }
    }

    /// Largest position whose value differs from the thread (0 if none):
    /// past this point the stream equals its thread.
    pub fn support(&self) -> usize {
        self.overrides
            .iter()
            .filter(|(i, v)| **v != self.thread.at(**i))
            .map(|(i, _)| *i)
            .max()
            .unwrap_or(0)
    }

    pub fn prefix(&self, k: usize) -> Vec<T> {
        (1..=k).map(|i| self.at(i)).collect()
    }
}

/// Value of the block's stream function at `s`: the generator applied to the
/// first `arity` positions. All members of a block agree with this value on
/// every stream, so similar operations are indistinguishable here.
pub fn top_eval(block: &Block, s: &Stream<Elem>) -> Result<Elem> {
    let args = s.prefix(block.arity());
    block.generator().evaluate(&args)
}
