//! Command-line front end for `dirac-darboux`: builds models from a flat
//! key-value config, runs transforms and checks, and writes sampled tables.

pub mod commands;
pub mod config;
pub mod error;
pub mod models;
pub mod reproduce;
pub mod table;
