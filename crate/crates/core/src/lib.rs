//! Discrete-time quantum walk on the line with a four-dimensional coin.
//!
//! The coin space is polarization tensor orbital angular momentum, ordered
//! `[H+, H-, V+, V-]`. The crate provides:
//!
//! - complex 2/4/6-dimensional matrices and tolerance conventions
//!   ([`matrix`]),
//! - named coins, two-qubit gate circuits and their compilation ([`coins`]),
//! - Jones-calculus optical elements, the Sagnac-loop composite and initial
//!   state preparation ([`optics`]),
//! - the sparse walk engine with conditional shifts and recentering
//!   ([`walk`]),
//! - the 1D-to-2D lattice embedding with overlap verification ([`embed`]),
//! - config parsing, figure presets and CSV/JSON/SVG output ([`io`]).

pub mod coins;
pub mod embed;
pub mod error;
pub mod io;
pub mod matrix;
pub mod optics;
pub mod walk;

pub use coins::{
    compile_circuit, grover4, hadamard4, modified_coin, sagnac_swap, CoinOperator, GateCircuit,
    GateLayer,
};
pub use embed::{decode_position, oracle_2d_walk, run_embedded_2d, EmbeddingParams};
pub use error::{Error, Result};
pub use matrix::{C64, CoinVec, SquareMatrix, TOL_ALGEBRAIC, TOL_CIRCUIT};
pub use walk::{evolve, position_distribution, ShiftVector, WalkConfig, WalkState};
