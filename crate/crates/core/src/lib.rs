//! Learning a chess player's style as the weights of a linear evaluation
//! function, trained by TD(0) from the player's game records, and using the
//! learned styles to tell two players apart in games between them.

pub mod board;
pub mod classify;
pub mod cli;
pub mod eval;
pub mod learn;
pub mod pgn;
pub mod search;
pub mod synth;
