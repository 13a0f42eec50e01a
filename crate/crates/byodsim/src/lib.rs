//! Campus BYOD gateway core and deterministic WLAN simulator.
//!
//! The crate models a campus wireless network end to end: the physical
//! topology and address assignment ([`net_model`]), the throughput
//! degradation chain ([`capacity_model`]), WLAN policy regimes
//! ([`policy_engine`]), the NAC/MDM registry with device-bound
//! certificates ([`access_control`]), the captive-portal gateway state
//! machine ([`captive_portal`]), zone-based firewalling ([`segmentation`]),
//! an append-only audit log ([`audit_log`]), and a seeded discrete-event
//! simulation harness with security probes ([`sim_harness`]).

pub mod access_control;
pub mod audit_log;
pub mod capacity_model;
pub mod captive_portal;
pub mod net_model;
pub mod policy_engine;
pub mod segmentation;
pub mod sim_harness;
