#![doc = include_str!("../../../README.md")]

pub mod algebra;
pub mod axioms;
pub mod block_algebra;
pub mod central;
pub mod clone;
pub mod congruence;
pub mod constants;
pub mod error;
pub mod format;
pub mod handle;
pub mod ops;
pub mod representable;
pub mod stream;
pub mod term;
pub mod universe;
pub mod varieties;

pub use algebra::{selector_algebra, FinAlgebra};
pub use axioms::{check_axioms, check_axioms_all, AxiomReport, CheckMode, LawReport, Violation};
pub use block_algebra::{min_padding, q_blocks, q_blocks_at, rca_embed, BlockAlgebra};
pub use central::{
    central_range, check_n_central, check_n_central_via, decompose, factor_congruences,
    is_n_central, is_nba, npartition_algebra, CentralityReport, CentralityRoute, Decomposition,
    NbaVerdict, CENTRAL_DIRECT_BUDGET,
};
pub use clone::{
    clone_close, term_block, term_clone, term_eval, ClonePresentation, CloneSection, Containment,
};
pub use congruence::{
    clv_block_algebra, congruence_enumerate, congruence_generate, equation_derivable, materialize,
    quotient, unary_translations, Congruence, CongruenceLattice, DEFAULT_SIZE_GUARD,
};
pub use constants::{op_constant, to_constants, ConstantsAlgebra, OpConstant, RepresentedAlgebra};
pub use error::{Error, Result};
pub use format::{parse_algebra, serialize_algebra, AlgebraFile, OpEntry};
pub use handle::{dimension_by_probe, CloneAlgebra, Dimension, MutatedQ, ProductAlgebra};
pub use ops::{similar, Block, OpTable};
pub use representable::{
    fi_section, rep_iso_check, representable_anchor, RepIsoReport, Representation,
};
pub use stream::{top_eval, Stream, Thread};
pub use term::Term;
pub use universe::{Elem, FinUniverse};
pub use varieties::{
    f_expansion, independence_search, interp_to_purehom, is_minimal_bounded, minimal_section,
    product_minimality_check, Interpretation, InterpretedHom, MinimalSection, MinimalityReport,
    MinimalityVerdict, ProductMinimalityReport, PureHom,
};
