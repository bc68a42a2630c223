//! The abstract interface shared by every clone-algebra realization.
//!
//! A handle exposes the distinguished constants `e(i)`, the substitution
//! operators `q(a, b1..bn)` for each width n, and the named basic operations
//! of its signature. Finite realizations also enumerate their elements, which
//! is what every exhaustive checker in this crate quantifies over.

use std::fmt::Debug;
use std::hash::Hash;

use crate::error::{Error, Result};

/// Dimension of an element: the largest i such that the element depends on
/// `e(i)`, or zero when it depends on none.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dimension {
    Finite(usize),
    /// Dependence reaches past every index the handle can test.
    ExceedsBound,
}

impl Dimension {
    pub fn finite(self) -> Option<usize> {
        match self {
            Dimension::Finite(k) => Some(k),
            Dimension::ExceedsBound => None,
        }
    }

    pub fn at_most(self, k: usize) -> bool {
        matches!(self, Dimension::Finite(d) if d <= k)
    }
}

pub trait CloneAlgebra {
    type Elem: Clone + Eq + Ord + Hash + Debug + Send + Sync;

    /// The i-th distinguished constant (1-based). Errors past the handle's
    /// index bound.
    fn e(&self, i: usize) -> Result<Self::Elem>;

    /// The n-ary substitution operator applied to `a`, where n = `bs.len()`.
    /// `q(a, [])` is the identity on zero-dimensional structure: it returns
    /// `a` unchanged.
    fn q(&self, a: &Self::Elem, bs: &[Self::Elem]) -> Result<Self::Elem>;

    /// Basic operation names with arities, in declaration order. Empty for
    /// pure handles.
    fn signature(&self) -> Vec<(String, usize)>;

    fn sigma(&self, name: &str, args: &[Self::Elem]) -> Result<Self::Elem>;

    /// Largest index usable with `e` and largest substitution width usable
    /// with `q`, when the handle imposes one.
    fn dim_bound(&self) -> Option<usize>;

    fn dimension(&self, a: &Self::Elem) -> Result<Dimension>;

    /// The finite element section, when the handle can enumerate it. Order
    /// is canonical and stable.
    fn elements(&self) -> Option<Vec<Self::Elem>>;

    /// Human-readable element form for reports.
    fn label(&self, a: &Self::Elem) -> String;

    /// One-line description of the handle and its section.
    fn describe(&self) -> String;
}

/// Dimension measured through the defining independence test: `a` is
/// independent of `e(n)` exactly when `q(a, e1, .., e(n-1), e(n+1)) = a`.
/// Probes n = 1..=max_n, so the handle must supply `e(max_n + 1)`.
///
/// Returns the largest dependent index found. This is the defining
/// characterization; concrete handles implement `dimension` by structure
/// and are cross-checked against this probe in tests.
pub fn dimension_by_probe<H: CloneAlgebra>(
    h: &H,
    a: &H::Elem,
    max_n: usize,
) -> Result<usize> {
    let mut dim = 0usize;
    for n in 1..=max_n {
        let mut args = Vec::with_capacity(n);
        for i in 1..n {
            args.push(h.e(i)?);
        }
        args.push(h.e(n + 1)?);
        if &h.q(a, &args)? != a {
            dim = n;
        }
    }
    Ok(dim)
}

/// Componentwise product of two handles over one signature.
#[derive(Debug, Clone)]
pub struct ProductAlgebra<A, B> {
    left: A,
    right: B,
}

impl<A: CloneAlgebra, B: CloneAlgebra> ProductAlgebra<A, B> {
    pub fn new(left: A, right: B) -> Result<Self> {
        if left.signature() != right.signature() {
            return Err(Error::SignatureMismatch(format!(
                "{:?} vs {:?}",
                left.signature(),
                right.signature()
            )));
        }
        Ok(ProductAlgebra { left, right })
    }

    pub fn left(&self) -> &A {
        &self.left
    }

    pub fn right(&self) -> &B {
        &self.right
    }
}

impl<A: CloneAlgebra, B: CloneAlgebra> CloneAlgebra for ProductAlgebra<A, B> {
    type Elem = (A::Elem, B::Elem);

    fn e(&self, i: usize) -> Result<Self::Elem> {
        Ok((self.left.e(i)?, self.right.e(i)?))
    }

    fn q(&self, a: &Self::Elem, bs: &[Self::Elem]) -> Result<Self::Elem> {
        let ls: Vec<A::Elem> = bs.iter().map(|(l, _)| l.clone()).collect();
        let rs: Vec<B::Elem> = bs.iter().map(|(_, r)| r.clone()).collect();
        Ok((self.left.q(&a.0, &ls)?, self.right.q(&a.1, &rs)?))
    }

    fn signature(&self) -> Vec<(String, usize)> {
        self.left.signature()
    }

    fn sigma(&self, name: &str, args: &[Self::Elem]) -> Result<Self::Elem> {
        let ls: Vec<A::Elem> = args.iter().map(|(l, _)| l.clone()).collect();
        let rs: Vec<B::Elem> = args.iter().map(|(_, r)| r.clone()).collect();
        Ok((self.left.sigma(name, &ls)?, self.right.sigma(name, &rs)?))
    }

    fn dim_bound(&self) -> Option<usize> {
        match (self.left.dim_bound(), self.right.dim_bound()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (Some(a), None) | (None, Some(a)) => Some(a),
            (None, None) => None,
        }
    }

    fn dimension(&self, a: &Self::Elem) -> Result<Dimension> {
        match (self.left.dimension(&a.0)?, self.right.dimension(&a.1)?) {
            (Dimension::Finite(x), Dimension::Finite(y)) => Ok(Dimension::Finite(x.max(y))),
            _ => Ok(Dimension::ExceedsBound),
        }
    }

    fn elements(&self) -> Option<Vec<Self::Elem>> {
        let ls = self.left.elements()?;
        let rs = self.right.elements()?;
        let mut out = Vec::with_capacity(ls.len() * rs.len());
        for l in &ls {
            for r in &rs {
                out.push((l.clone(), r.clone()));
            }
        }
        Some(out)
    }

    fn label(&self, a: &Self::Elem) -> String {
        format!("({},{})", self.left.label(&a.0), self.right.label(&a.1))
    }

    fn describe(&self) -> String {
        format!("product[{} x {}]", self.left.describe(), self.right.describe())
    }
}

/// Fault-injection wrapper: behaves like the inner handle except that one
/// chosen `q` application returns a planted wrong value. Used to verify that
/// the law checkers actually detect broken structure.
#[derive(Debug, Clone)]
pub struct MutatedQ<H: CloneAlgebra> {
    inner: H,
    at_first: H::Elem,
    at_args: Vec<H::Elem>,
    planted: H::Elem,
}

impl<H: CloneAlgebra> MutatedQ<H> {
    pub fn new(inner: H, at_first: H::Elem, at_args: Vec<H::Elem>, planted: H::Elem) -> Self {
        MutatedQ {
            inner,
            at_first,
            at_args,
            planted,
        }
    }
}

impl<H: CloneAlgebra> CloneAlgebra for MutatedQ<H> {
    type Elem = H::Elem;

    fn e(&self, i: usize) -> Result<Self::Elem> {
        self.inner.e(i)
    }

    fn q(&self, a: &Self::Elem, bs: &[Self::Elem]) -> Result<Self::Elem> {
        if a == &self.at_first && bs == self.at_args.as_slice() {
            return Ok(self.planted.clone());
        }
        self.inner.q(a, bs)
    }

    fn signature(&self) -> Vec<(String, usize)> {
        self.inner.signature()
    }

    fn sigma(&self, name: &str, args: &[Self::Elem]) -> Result<Self::Elem> {
        self.inner.sigma(name, args)
    }

    fn dim_bound(&self) -> Option<usize> {
        self.inner.dim_bound()
    }

    fn dimension(&self, a: &Self::Elem) -> Result<Dimension> {
        self.inner.dimension(a)
    }

    fn elements(&self) -> Option<Vec<Self::Elem>> {
        self.inner.elements()
    }

    fn label(&self, a: &Self::Elem) -> String {
        self.inner.label(a)
    }

    fn describe(&self) -> String {
        format!("{} [one planted q fault]", self.inner.describe())
    }
}
