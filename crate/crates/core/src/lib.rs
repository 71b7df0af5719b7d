pub mod kleene;
pub mod syntax;
pub mod unify;
pub mod engine;
pub mod semantics;
pub mod cli;
