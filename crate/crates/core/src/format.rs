//! On-disk algebra files: a JSON object naming the universe and listing
//! operation tables by element symbol.
//!
//! Tables are row-major with the leftmost argument most significant, the
//! same layout `OpTable` uses in memory. Entries are element symbols rather
//! than indices, so a file is readable on its own and stable under any
//! re-indexing of the universe. The writer is canonical: pretty-printed
//! JSON, two-space indent, trailing newline; reading a written file and
//! writing it again reproduces the bytes.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::FinAlgebra;
use crate::error::{Error, Result};
use crate::ops::OpTable;
use crate::universe::FinUniverse;

/// The file form of a finite algebra.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub name: String,
    /// Element symbols in universe order; the order fixes the table layout.
    pub universe: Vec<String>,
    pub operations: Vec<OpEntry>,
}

/// One named operation: a row-major value table in element symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpEntry {
    pub name: String,
    pub arity: usize,
    pub table: Vec<String>,
}

impl AlgebraFile {
    pub fn from_algebra(a: &FinAlgebra) -> AlgebraFile {
        let u = a.universe();
        AlgebraFile {
            name: u.name().to_string(),
            universe: u.symbols().to_vec(),
            operations: a
                .ops()
                .map(|(name, op)| OpEntry {
                    name: name.to_string(),
                    arity: op.arity(),
                    table: op
                        .table()
                        .iter()
                        .map(|&v| u.symbol(v).to_string())
                        .collect(),
                })
                .collect(),
        }
    }

    /// Validates and builds the algebra: symbols must resolve, every table
    /// must have exactly |universe|^arity entries, names must be unique.
    pub fn to_algebra(&self) -> Result<FinAlgebra> {
        let universe = FinUniverse::new(self.name.clone(), self.universe.clone())?;
        let mut ops = Vec::with_capacity(self.operations.len());
        for entry in &self.operations {
            let expected = (universe.size() as u128).checked_pow(entry.arity as u32);
            if expected != Some(entry.table.len() as u128) {
                return Err(Error::InvalidAlgebraFile(format!(
                    "operation {:?}: table has {} entries, expected {}^{}",
                    entry.name,
                    entry.table.len(),
                    universe.size(),
                    entry.arity
                )));
            }
            let table = entry
                .table
                .iter()
                .map(|sym| universe.index_of(sym))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| {
                    Error::InvalidAlgebraFile(format!("operation {:?}: {e}", entry.name))
                })?;
            ops.push((
                entry.name.clone(),
                OpTable::new(universe.clone(), entry.arity, table)?,
            ));
        }
        FinAlgebra::new(universe, ops)
    }

    pub fn from_json(text: &str) -> Result<AlgebraFile> {
        serde_json::from_str(text).map_err(|e| Error::InvalidAlgebraFile(e.to_string()))
    }

    /// Canonical text form: pretty JSON plus a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }
}

/// Reads and validates an algebra file.
pub fn parse_algebra(path: impl AsRef<Path>) -> Result<FinAlgebra> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidAlgebraFile(format!("{}: {e}", path.display())))?;
    AlgebraFile::from_json(&text)?.to_algebra()
}

/// The canonical text form of an algebra.
pub fn serialize_algebra(a: &FinAlgebra) -> String {
    AlgebraFile::from_algebra(a).to_json()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::universe::FinUniverse;

    fn boolean_algebra() -> FinAlgebra {
        let u = FinUniverse::numeric("bool", 2).unwrap();
        let mk = |arity, table: &[usize]| OpTable::new(u.clone(), arity, table.to_vec()).unwrap();
        FinAlgebra::new(
            u.clone(),
            vec![
                ("and".into(), mk(2, &[0, 0, 0, 1])),
                ("or".into(), mk(2, &[0, 1, 1, 1])),
                ("not".into(), mk(1, &[1, 0])),
                ("zero".into(), mk(0, &[0])),
                ("one".into(), mk(0, &[1])),
            ],
        )
        .unwrap()
    }

    #[test]
    fn algebra_round_trips_through_the_file_form() {
        let a = boolean_algebra();
        let file = AlgebraFile::from_algebra(&a);
        assert_eq!(file.operations.len(), 5);
        assert_eq!(file.to_algebra().unwrap(), a);

        let text = file.to_json();
        let reread = AlgebraFile::from_json(&text).unwrap();
        assert_eq!(reread, file);
        assert_eq!(reread.to_json(), text, "writer is canonical");
    }

    #[test]
    fn symbols_survive_non_numeric_universes() {
        let u = FinUniverse::new("tri", vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let cyc = OpTable::new(u.clone(), 1, vec![1, 2, 0]).unwrap();
        let a = FinAlgebra::new(u, vec![("s".into(), cyc)]).unwrap();
        let file = AlgebraFile::from_algebra(&a);
        assert_eq!(file.operations[0].table, vec!["b", "c", "a"]);
        assert_eq!(file.to_algebra().unwrap(), a);
    }

    #[test]
    fn empty_signature_is_a_valid_file() {
        let file = AlgebraFile {
            name: "two".into(),
            universe: vec!["0".into(), "1".into()],
            operations: vec![],
        };
        let a = file.to_algebra().unwrap();
        assert_eq!(a.op_count(), 0);
        assert_eq!(a.size(), 2);
    }

    #[test]
    fn wrong_table_size_names_the_operation() {
        let file = AlgebraFile {
            name: "two".into(),
            universe: vec!["0".into(), "1".into()],
            operations: vec![OpEntry {
                name: "bad".into(),
                arity: 2,
                table: vec!["0".into(), "1".into(), "0".into()],
            }],
        };
        match file.to_algebra() {
            Err(Error::InvalidAlgebraFile(msg)) => {
                assert!(msg.contains("bad"), "{msg}");
                assert!(msg.contains("expected 2^2"), "{msg}");
            }
            other => panic!("expected a validation error, got {other:?}"),
        }
    }

    #[test]
    fn unresolved_symbol_names_the_operation() {
        let file = AlgebraFile {
            name: "two".into(),
            universe: vec!["0".into(), "1".into()],
            operations: vec![OpEntry {
                name: "f".into(),
                arity: 1,
                table: vec!["0".into(), "2".into()],
            }],
        };
        match file.to_algebra() {
            Err(Error::InvalidAlgebraFile(msg)) => {
                assert!(msg.contains("\"f\""), "{msg}");
                assert!(msg.contains('2'), "{msg}");
            }
            other => panic!("expected a validation error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_operation_names_are_rejected() {
        let entry = OpEntry {
            name: "f".into(),
            arity: 1,
            table: vec!["0".into(), "1".into()],
        };
        let file = AlgebraFile {
            name: "two".into(),
            universe: vec!["0".into(), "1".into()],
            operations: vec![entry.clone(), entry],
        };
        assert!(matches!(
            file.to_algebra(),
            Err(Error::DuplicateOperation(n)) if n == "f"
        ));
    }

    #[test]
    fn duplicate_element_symbols_are_rejected() {
        let file = AlgebraFile {
            name: "two".into(),
            universe: vec!["x".into(), "x".into()],
            operations: vec![],
        };
        assert!(matches!(
            file.to_algebra(),
            Err(Error::InvalidAlgebraFile(_))
        ));
    }

    #[test]
    fn json_syntax_errors_carry_position() {
        let err = AlgebraFile::from_json("{\"name\": ").unwrap_err();
        match err {
            Error::InvalidAlgebraFile(msg) => assert!(msg.contains("line"), "{msg}"),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_algebra_reads_files_and_reports_missing_ones() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bool2.alg");
        fs::write(&path, serialize_algebra(&boolean_algebra())).unwrap();
        let a = parse_algebra(&path).unwrap();
        assert_eq!(a, boolean_algebra());

        let missing = parse_algebra(dir.path().join("nope.alg"));
        assert!(matches!(missing, Err(Error::InvalidAlgebraFile(_))));
    }
}
