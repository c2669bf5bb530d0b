//! Exact enumeration, classification and identification of Butson-type
//! complex Hadamard matrices `BH(q, n)` for `q` in {1, 2, 4}.
//!
//! All arithmetic is exact: entries are stored as root-of-unity exponents
//! and every sum, minor and normal form lives in the Gaussian integers.
//!
//! ```
//! use bh_core::{classify, GenerationMode};
//!
//! let classes = classify(4, 4, GenerationMode::Pruned).unwrap();
//! assert_eq!(classes.len(), 2);
//! ```

pub mod arith;
pub mod catalog;
pub mod enumeration;
pub mod equivalence;
pub mod error;
pub mod families;
pub mod invariants;
pub mod matrix;

pub use arith::{
    canonical_associate, det_exact, gaussian_gcd, phase_to_gaussian, GaussianInt, PhaseExponent,
};
pub use catalog::{Catalog, CatalogSummary};
pub use enumeration::{
    brute_force_classify, classify, generate_dephased, ClassRecord, FamilyTag, GenerationMode,
};
pub use equivalence::{
    are_equivalent, canonical_form, search_equivalence, transpose_class, verify_witness,
    CanonicalForm, TransposeClass,
};
pub use error::{Error, Result};
pub use families::{
    builtin_families, builtin_family, coverage_union, scan_family, self_cognate_check, FamilySpec,
    ScanReport,
};
pub use invariants::{
    fingerprint, haagerup, smith_normal_form, Fingerprint, HaagerupSet, SnfDiagonal,
};
pub use matrix::{ButsonMatrix, EquivalenceWitness};
