//! Local-passivity certification and extractable-energy optimization for
//! bipartite quantum batteries.
//!
//! A battery is a pair `{rho_AB, H_AB}`. The crate certifies whether energy
//! can be extracted from it by maps acting on subsystem `A` alone:
//!
//! - ordinary unitary passivity and ergotropy,
//! - CPTP-local passivity via the Choi-operator condition, including its
//!   closure under tensor copies,
//! - NCPTP-local passivity for dilation-generated positive maps via the
//!   `C - C' >= 0` condition, plus independent necessary conditions
//!   (a commutator residual and a 6x6 Hessian test),
//! - optimized energy extraction over Cartan-parametrized environment-system
//!   unitaries, with a Stinespring-dilation CPTP oracle for cross-validation.
//!
//! All numerics are dense, deterministic, and seeded; every optimizer-backed
//! quantity is reproducible bit-for-bit from its seed.

pub mod battery;
pub mod dynamics;
pub mod error;
pub mod extraction;
pub mod json;
pub mod optimize;
pub mod passivity;
pub mod qmath;
pub mod random;

pub use battery::{
    bell_mixture, energy, entanglement_entropy, purify, rank_two_state, xy_hamiltonian,
    BipartiteBattery, DensityMatrix, Hamiltonian, RankTwoAmplitudes, TripartiteState, XYParams,
};
pub use dynamics::{
    apply_local_map, block_unitary, cartan_unitary, controlled_unitary, givens_unitary, local_su2,
    BlockUnitaryParams, CartanParams,
};
pub use error::{Error, Result};
pub use extraction::{
    controlled_work_analytic, cptp_oracle, ergotropy, extract_ncptp, extract_ncptp_from_battery,
    max_over_rank_two, max_work_cptp, surpass_condition, witness, CptpMax, ExtractionResult,
    ParamSpace, WitnessVerdict,
};
pub use optimize::{global_minimize, local_polish, GlobalMin, OptimizerConfig};
pub use passivity::{
    build_c_global, build_c_local, build_c_prime, commutator_check, cptp_local_passive,
    hessian_check, ncptp_local_passive, tensor_copies, unitary_passive, PassivityKind,
    PassivityVerdict,
};
pub use qmath::{
    eig_hermitian, kron, partial_trace, partial_transpose, permute_subsystems, psd_check,
    Complex64, ComplexMatrix, DimList, PsdReport,
};
