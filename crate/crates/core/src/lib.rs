//! Finite selection games, strategy translations between them, and exact
//! analysis of set-valued maps on the real line.

pub mod funcspace;
pub mod game;
pub mod rational;
pub mod scenario;
pub mod setvalued;
pub mod topology;
pub mod translation;
