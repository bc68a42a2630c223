//! Trading named basic operations for distinguished constants and back.
//!
//! A basic operation sigma of arity m pins down the constant
//! c = sigma(e1..em), and a constant c with dim(c) <= m recovers an m-ary
//! operation a1..am -> q_m(c, a1..am). The passages invert each other:
//! the signature of a handle carries no information beyond the constants
//! it distinguishes.

use crate::error::{Error, Result};
use crate::handle::{CloneAlgebra, Dimension};

/// A named constant standing in for a basic operation of the given arity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpConstant<T> {
    pub name: String,
    pub arity: usize,
    pub value: T,
}

/// The constant of one named basic operation: `sigma(e1..em)`.
pub fn op_constant<H: CloneAlgebra>(h: &H, name: &str) -> Result<H::Elem> {
    let arity = h
        .signature()
        .into_iter()
        .find(|(n, _)| n == name)
        .map(|(_, m)| m)
        .ok_or_else(|| Error::UnknownOperation(name.to_string()))?;
    let es: Vec<H::Elem> = (1..=arity).map(|i| h.e(i)).collect::<Result<_>>()?;
    h.sigma(name, &es)
}

/// Every basic operation as a named constant, in signature order.
pub fn to_constants<H: CloneAlgebra>(h: &H) -> Result<Vec<OpConstant<H::Elem>>> {
    h.signature()
        .into_iter()
        .map(|(name, arity)| {
            let value = op_constant(h, &name)?;
            Ok(OpConstant { name, arity, value })
        })
        .collect()
}

/// The inner handle with its named operations forgotten and their constants
/// kept as distinguished elements: a pointed pure view.
///
/// The constants are data, not operations. Treating c as a nullary basic
/// operation would subject it to the compatibility law, which reads
/// `q_n(c, ys) = c` and fails for any constant of positive dimension. So the
/// signature here is empty and the pointing travels alongside.
#[derive(Debug, Clone)]
pub struct ConstantsAlgebra<H: CloneAlgebra> {
    inner: H,
    consts: Vec<OpConstant<H::Elem>>,
}

impl<H: CloneAlgebra> ConstantsAlgebra<H> {
    pub fn new(inner: H) -> Result<Self> {
        let consts = to_constants(&inner)?;
        Ok(ConstantsAlgebra { inner, consts })
    }

    pub fn inner(&self) -> &H {
        &self.inner
    }

    pub fn constants(&self) -> &[OpConstant<H::Elem>] {
        &self.consts
    }

    pub fn constant(&self, name: &str) -> Result<&OpConstant<H::Elem>> {
        self.consts
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownOperation(name.to_string()))
    }
}

impl<H: CloneAlgebra> CloneAlgebra for ConstantsAlgebra<H> {
    type Elem = H::Elem;

    fn e(&self, i: usize) -> Result<H::Elem> {
        self.inner.e(i)
    }

    fn q(&self, a: &H::Elem, bs: &[H::Elem]) -> Result<H::Elem> {
        self.inner.q(a, bs)
    }

    fn signature(&self) -> Vec<(String, usize)> {
        vec![]
    }

    fn sigma(&self, name: &str, _args: &[H::Elem]) -> Result<H::Elem> {
        Err(Error::PureHandle(name.to_string()))
    }

    fn dim_bound(&self) -> Option<usize> {
        self.inner.dim_bound()
    }

    fn dimension(&self, a: &H::Elem) -> Result<Dimension> {
        self.inner.dimension(a)
    }

    fn elements(&self) -> Option<Vec<H::Elem>> {
        self.inner.elements()
    }

    fn label(&self, a: &H::Elem) -> String {
        self.inner.label(a)
    }

    fn describe(&self) -> String {
        format!("pointed pure view of {}", self.inner.describe())
    }
}

/// The inner handle with a signature reconstructed from constants:
/// `sigma(a1..am) = q_m(c, a1..am)`.
///
/// Each constant must have dimension at most its declared arity, otherwise
/// the reconstructed operation would not return the constant on e1..em and
/// the round trip would break.
#[derive(Debug, Clone)]
pub struct RepresentedAlgebra<H: CloneAlgebra> {
    inner: H,
    ops: Vec<OpConstant<H::Elem>>,
}

impl<H: CloneAlgebra> RepresentedAlgebra<H> {
    pub fn new(inner: H, ops: Vec<OpConstant<H::Elem>>) -> Result<Self> {
        for (i, c) in ops.iter().enumerate() {
            if ops[..i].iter().any(|d| d.name == c.name) {
                return Err(Error::DuplicateOperation(c.name.clone()));
            }
            if let Some(bound) = inner.dim_bound() {
                if c.arity > bound {
                    return Err(Error::CapExceeded {
                        cap: bound,
                        needed: c.arity,
                        what: format!("represented operation {:?}", c.name),
                    });
                }
            }
            match inner.dimension(&c.value)? {
                Dimension::Finite(d) if d <= c.arity => {}
                Dimension::Finite(d) => {
                    return Err(Error::DimensionExceedsArity {
                        dim: d,
                        arity: c.arity,
                    });
                }
                Dimension::ExceedsBound => {
                    return Err(Error::DimensionExceedsArity {
                        dim: usize::MAX,
                        arity: c.arity,
                    });
                }
            }
        }
        Ok(RepresentedAlgebra { inner, ops })
    }

    pub fn inner(&self) -> &H {
        &self.inner
    }

    pub fn constants(&self) -> &[OpConstant<H::Elem>] {
        &self.ops
    }

    fn find(&self, name: &str) -> Result<&OpConstant<H::Elem>> {
        self.ops
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownOperation(name.to_string()))
    }
}

impl<H: CloneAlgebra> CloneAlgebra for RepresentedAlgebra<H> {
    type Elem = H::Elem;

    fn e(&self, i: usize) -> Result<H::Elem> {
        self.inner.e(i)
    }

    fn q(&self, a: &H::Elem, bs: &[H::Elem]) -> Result<H::Elem> {
        self.inner.q(a, bs)
    }

    fn signature(&self) -> Vec<(String, usize)> {
        self.ops.iter().map(|c| (c.name.clone(), c.arity)).collect()
    }

    fn sigma(&self, name: &str, args: &[H::Elem]) -> Result<H::Elem> {
        let c = self.find(name)?;
        if args.len() != c.arity {
            return Err(Error::ArityMismatch {
                expected: c.arity,
                got: args.len(),
            });
        }
        self.inner.q(&c.value, args)
    }

    fn dim_bound(&self) -> Option<usize> {
        self.inner.dim_bound()
    }

    fn dimension(&self, a: &H::Elem) -> Result<Dimension> {
        self.inner.dimension(a)
    }

    fn elements(&self) -> Option<Vec<H::Elem>> {
        self.inner.elements()
    }

    fn label(&self, a: &H::Elem) -> String {
        self.inner.label(a)
    }

    fn describe(&self) -> String {
        let sig: Vec<String> = self
            .ops
            .iter()
            .map(|c| format!("{}/{}", c.name, c.arity))
            .collect();
        format!(
            "represented[{}] over {}",
            sig.join(","),
            self.inner.describe()
        )
    }
}
