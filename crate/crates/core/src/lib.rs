//! Hybrid agent architecture for autonomous satellite station-keeping.
//!
//! A discrete agent, split into an abstraction engine and a reasoning
//! engine that communicate through shared beliefs, drives a continuous
//! engine (bounds checks, maneuver planning, controller synthesis) and a
//! simulated real-time control system in Clohessy-Wiltshire dynamics.

pub mod agent;
pub mod lang;
pub mod continuous;
pub mod store;
pub mod sim;
pub mod orchestrator;
