//! Finite-model workbench for functional Menger systems and their stabilizers.

pub mod algebra;
pub mod assignment;
pub mod equivalence;
pub mod error;
pub mod format;
pub mod function;
pub mod harness;
pub mod representation;
pub mod set;
pub mod stabilizer;
pub mod transforms;
pub mod tuples;

pub use algebra::{abstractify, check_axioms, chi, zeta, Axiom, AxiomReport, BinaryRelation, MengerAlgebra};
pub use assignment::{Assignment, PropFlag};
pub use equivalence::{intersect_equivalences, EquivalenceRelation};
pub use error::{Error, Result};
pub use format::{instance_to_json, parse_instance, Instance};
pub use function::{close_system, compose_menger, meet, project, Carrier, FunctionSystem, NPlaceFunction};
pub use representation::{simplest_representation, verify_representation, Representation, VerifyReport};
pub use set::ElementSet;
pub use stabilizer::{
    build_witness, check_theorem1, check_theorem2, check_theorem3, check_theorem4, check_theorem5, concretize,
    faithful_representation, CheckMode, Verdict, Witness, WitnessMode,
};
pub use transforms::{ch_closure, stage_condition, tn_closure, TransformSet};
