use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Index of an element inside a [`FinUniverse`].
pub type Elem = usize;

/// A finite, nonempty base set with named elements.
///
/// Element order is the order given at construction; it is part of the
/// universe identity and fixes the row-major layout of every operation table
/// over the universe.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FinUniverse {
    name: String,
    elements: Vec<String>,
}

impl FinUniverse {
    pub fn new(name: impl Into<String>, elements: Vec<String>) -> Result<Arc<Self>> {
        if elements.is_empty() {
            return Err(Error::EmptyUniverse);
        }
        let mut seen = std::collections::HashSet::new();
        for e in &elements {
            if !seen.insert(e.clone()) {
                return Err(Error::InvalidAlgebraFile(format!(
                    "duplicate element symbol {e:?}"
                )));
            }
        }
        Ok(Arc::new(FinUniverse {
            name: name.into(),
            elements,
        }))
    }

    /// Universe `{0, 1, .., size-1}` with decimal symbols.
    pub fn numeric(name: impl Into<String>, size: usize) -> Result<Arc<Self>> {
        FinUniverse::new(name, (0..size).map(|i| i.to_string()).collect())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn symbols(&self) -> &[String] {
        &self.elements
    }

    pub fn symbol(&self, e: Elem) -> &str {
        &self.elements[e]
    }

    pub fn index_of(&self, symbol: &str) -> Result<Elem> {
        self.elements
            .iter()
            .position(|s| s == symbol)
            .ok_or_else(|| Error::UnknownElement(symbol.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = Elem> {
        0..self.size()
    }
}

impl fmt::Display for FinUniverse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{{{}}}", self.name, self.elements.join(","))
    }
}
