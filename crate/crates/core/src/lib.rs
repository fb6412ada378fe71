//! Exact quantum states for Schrodinger equations with time-dependent
//! P^2 and X^2 terms.
//!
//! Three related pictures of one problem are supported:
//!
//! * **TO** -- time-dependent oscillator, `H = (1/2) P^2 + g2(t') X^2`;
//! * **TM** -- time-dependent mass, `H = (1/2) e^{-2 nu} P^2 + h2 e^{2 nu} X^2`,
//!   reached from TO by the clock change `t'(t)`;
//! * **TQ** -- time-dependent quadratic, TM plus a dilation drift term,
//!   reached from TM by the unitary rescaling `x -> x e^{-nu}`.
//!
//! A complex solution of the auxiliary equation `xi'' + 2 g2 xi = 0` with
//! Wronskian normalization generates closed-form number, coherent, and
//! squeezed state wavefunctions in every frame ([`states`]), the ladder and
//! number operators of the underlying oscillator algebra ([`operators`]),
//! and an independent Crank-Nicolson propagator used to verify them
//! ([`propagator`]).

// Negated float comparisons below are deliberate NaN guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aux;
pub mod error;
pub mod numerics;
pub mod operators;
pub mod profile;
pub mod propagator;
pub mod states;
pub mod suite;
pub mod system;
pub mod timemap;
pub mod wave;

pub use aux::{
    default_ic, solve_for_system, solve_xi, wronskian_scan_tm, AuxInitialConditions, AuxSample,
    AuxSolution, HattedValues, PhiValues, WronskianScan, WRONSKIAN_TOL,
};
pub use error::{Error, Result};
pub use operators::{
    apply_casimir, apply_ladder, apply_number_operator, casimir_residual, commutator_check,
    ladder_action_residual, number_eigen_residual, schrodinger_residual, squeeze_eigen_check,
    CommutatorPair, LadderCoeffs, LadderDirection, NumberCoeffs, OperatorCoefficients, WaveTriplet,
};
pub use profile::{ProfileFamily, SystemSpec, TimeProfile};
pub use propagator::{
    grid_covering_span, propagate, propagate_against_analytic, OracleComparison,
    PropagationOutcome, PropagatorConfig,
};
pub use states::{
    alpha_from_phase_space, appendix_reference_state, auto_grid, coherent_state,
    dilation_transform, gaussian_params, number_state, squeezed_state, state, tq_state_direct,
    GaussianParams, StateLabel,
};
pub use suite::{run_verification, CheckRecord, VerifyOptions};
pub use system::System;
pub use timemap::{build_time_map, TimeMap, DEFAULT_MAP_NODES};
pub use wave::{
    inner_product, l2_distance, phase_aligned_distance, relative_l2, Frame, SpatialGrid, WaveSample,
};
