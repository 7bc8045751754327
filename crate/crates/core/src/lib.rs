pub mod diagnostic;
pub mod grammar;
pub mod analysis;
pub mod tables;
pub mod engine;
pub mod scanner;
