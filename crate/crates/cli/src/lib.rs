//! JSON formats, the demo pipeline and the self-test behind the `hnntree`
//! binary.

pub mod commands;
pub mod config;
pub mod demo;
pub mod error;
pub mod json;
pub mod output;
pub mod selftest;
