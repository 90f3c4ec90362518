//! Groupoid extensions of transposition categories and the partial chord
//! transformations they induce.
//!
//! The crate is organised bottom-up:
//!
//! * [`modular`]: residues, unit multipliers, linear solving and invariant factors in `Z_n`;
//! * [`groupoid`]: finite groupoids with explicit composition tables;
//! * [`extension`]: category extensions `1 -> Z -> G -> H -> 1`, cocycles and coboundaries;
//! * [`enumerate`]: isomorphism classes of group extensions `1 -> Z_n -> G -> Z_m -> 1`;
//! * [`chord`]: set classes, chords, voicings and affine voicing maps;
//! * [`action`]: representable actions of an extension on chords;
//! * [`perm`]: permutations of chord indices;
//! * [`packaged`]: packaged operators and their permutation representations;
//! * [`group`]: closure of permutation groups and structure certificates;
//! * [`instance`], [`suite`], [`dot`]: instance files, presets, verification and graph export.

pub mod action;
pub mod chord;
pub mod dot;
pub mod enumerate;
pub mod extension;
pub mod group;
pub mod groupoid;
pub mod instance;
pub mod modular;
pub mod packaged;
pub mod perm;
pub mod report;
pub mod suite;

pub use action::{ActionError, RepresentableAction, Variance};
pub use chord::{AffineMap, Chord, ChordError, SetClass, SetClassRegistry, Voicing};
pub use enumerate::{
    enumerate_group_extensions, enumerate_group_extensions_with, ActionFilter, Enumeration,
};
pub use extension::{
    ActionFunctor, BaseCategory, ExtensionCategory, ExtensionError, GMorphism, TwoCocycle,
};
pub use group::{
    analyze_group, dihedral_certificate, wreath_certificate, GeneratedGroup, GroupAnalysis,
};
pub use groupoid::{Groupoid, MorphId, ObjIdx, ObjectId};
pub use instance::{Instance, InstanceError, InstanceSpec};
pub use modular::{unit_group, AutMultiplier, InvariantFactors, Residue};
pub use packaged::{
    compile_root_law, compose_packaged, inverse_packaged, package, permutation_rep,
    PackagedOperator,
};
pub use perm::Permutation;
pub use report::ValidationReport;
