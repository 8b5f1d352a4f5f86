// SPDX-License-Identifier: MIT
//! Quantum systems over tensor products of finite-dimensional spaces, the
//! probabilistic teams they induce, and non-local games as teams.

pub mod game;
pub mod linalg;
pub mod presets;
pub mod system;

pub use game::{chsh, game_to_team, GameSpec, NonLocalGame};
pub use linalg::{ket, projector, tensor, CMatrix};
pub use presets::{epr_system, ghz_system, hardy_system, Preset};
pub use system::{quantum_team, QuantumError, QuantumSystem, ValidationReport};
