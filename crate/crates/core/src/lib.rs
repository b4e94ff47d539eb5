//! Membership authentication for ad-hoc networks built on a shared graph
//! whose Hamiltonian cycle is the network secret.

pub mod graph;
pub mod time;
pub mod zkp;
pub mod protocol;
pub mod netsim;
pub mod attacks;
