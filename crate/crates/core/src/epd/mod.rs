//! The Eisert prisoners' dilemma and its 1-fold rational players.

pub mod agent;
pub mod game;
