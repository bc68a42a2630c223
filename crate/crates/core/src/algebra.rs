//! Finite algebras: a universe together with named basic operations.

use std::sync::Arc;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::ops::OpTable;
use crate::universe::{Elem, FinUniverse};

/// A finite algebra. Operation order is the declaration order; it fixes the
/// enumeration order everywhere operations are iterated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinAlgebra {
    universe: Arc<FinUniverse>,
    ops: IndexMap<String, OpTable>,
}

impl FinAlgebra {
    pub fn new(universe: Arc<FinUniverse>, ops: Vec<(String, OpTable)>) -> Result<Self> {
        let mut map = IndexMap::new();
        for (name, op) in ops {
            if op.universe() != &universe {
                return Err(Error::UniverseMismatch);
            }
            if map.insert(name.clone(), op).is_some() {
                return Err(Error::DuplicateOperation(name));
            }
        }
        Ok(FinAlgebra { universe, ops: map })
    }

    pub fn universe(&self) -> &Arc<FinUniverse> {
        &self.universe
    }

    pub fn size(&self) -> usize {
        self.universe.size()
    }

    pub fn op(&self, name: &str) -> Result<&OpTable> {
        self.ops
            .get(name)
            .ok_or_else(|| Error::UnknownOperation(name.to_string()))
    }

    pub fn ops(&self) -> impl Iterator<Item = (&str, &OpTable)> {
        self.ops.iter().map(|(n, o)| (n.as_str(), o))
    }

    pub fn op_count(&self) -> usize {
        self.ops.len()
    }

    /// Signature: operation names with arities, in declaration order.
    pub fn signature(&self) -> Vec<(String, usize)> {
        self.ops
            .iter()
            .map(|(n, o)| (n.clone(), o.arity()))
            .collect()
    }

    /// The m-th direct power. Element symbols are the component symbols
    /// joined by `.`; operations act componentwise.
    pub fn power(&self, m: usize, name: &str) -> Result<FinAlgebra> {
        if m == 0 {
            return Err(Error::EmptyUniverse);
        }
        let factors: Vec<&FinAlgebra> = (0..m).map(|_| self).collect();
        FinAlgebra::product(name, &factors)
    }

    /// Direct product of finitely many algebras over a common signature.
    /// Element symbols are the component symbols joined by `.`; the leftmost
    /// factor is the most significant in the element encoding. Operations act
    /// componentwise.
    pub fn product(name: &str, factors: &[&FinAlgebra]) -> Result<FinAlgebra> {
        let first = factors.first().ok_or(Error::EmptyUniverse)?;
        let sig = first.signature();
        for f in &factors[1..] {
            if f.signature() != sig {
                return Err(Error::SignatureMismatch(format!(
                    "product factor {} does not share the signature of factor {}",
                    f.universe().name(),
                    first.universe().name()
                )));
            }
        }
        let sizes: Vec<usize> = factors.iter().map(|f| f.size()).collect();
        let count: usize = sizes.iter().product();
        let decode = |mut idx: usize| -> Vec<Elem> {
            let mut comps = vec![0usize; factors.len()];
            for d in (0..factors.len()).rev() {
                comps[d] = idx % sizes[d];
                idx /= sizes[d];
            }
            comps
        };
        let symbols: Vec<String> = (0..count)
            .map(|idx| {
                decode(idx)
                    .iter()
                    .enumerate()
                    .map(|(d, &c)| factors[d].universe().symbol(c).to_string())
                    .collect::<Vec<_>>()
                    .join(".")
            })
            .collect();
        let universe = FinUniverse::new(name, symbols)?;
        let mut ops = Vec::new();
        for (op_name, op_arity) in &sig {
            let tables: Vec<&OpTable> = factors
                .iter()
                .map(|f| f.op(op_name).expect("signature checked"))
                .collect();
            let table = OpTable::from_fn(universe.clone(), *op_arity, |args| {
                let decoded: Vec<Vec<Elem>> = args.iter().map(|&a| decode(a)).collect();
                let mut out = 0usize;
                for d in 0..factors.len() {
                    let comp_args: Vec<Elem> = decoded.iter().map(|t| t[d]).collect();
                    out = out * sizes[d] + tables[d].evaluate(&comp_args).expect("component in range");
                }
                out
            })?;
            ops.push((op_name.clone(), table));
        }
        FinAlgebra::new(universe, ops)
    }
}

/// The n-element selector algebra: universe `{e1, .., en}`, one (n+1)-ary
/// operation `qn` with `qn(ei, x1, .., xn) = xi`, and each `ei` as a nullary
/// operation.
pub fn selector_algebra(n: usize) -> Result<FinAlgebra> {
    if n == 0 {
        return Err(Error::EmptyUniverse);
    }
    let symbols: Vec<String> = (1..=n).map(|i| format!("e{i}")).collect();
    let universe = FinUniverse::new(format!("sel{n}"), symbols)?;
    let q = OpTable::from_fn(universe.clone(), n + 1, |args| args[1 + args[0]])?;
    let mut ops = vec![(format!("q{n}"), q)];
    for i in 1..=n {
        ops.push((
            format!("e{i}"),
            OpTable::constant(universe.clone(), i - 1, 0)?,
        ));
    }
    FinAlgebra::new(universe, ops)
}
