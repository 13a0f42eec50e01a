//! Throughput degradation chain and slow-client airtime model.
//!
//! The raw channel rates of an AP are cut down by three multiplicative
//! factors (protocol overhead, client contention, everything else), and the
//! remainder is shared among clients either equally or weighted by airtime.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CapacityError {
    #[error("client count must be at least 1")]
    ZeroClients,
    #[error("degradation fraction out of range: {0}")]
    FractionOutOfRange(String),
}

/// Multiplicative throughput reduction factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegradationFactors {
    /// Protocol and packet overhead, nominally 0.40..=0.50.
    #[serde(default = "default_overhead")]
    pub overhead_frac: f64,
    /// Uneven client distribution and contention.
    #[serde(default = "default_contention")]
    pub contention_frac: f64,
    /// Retransmission, rogue-network interference and the rest.
    #[serde(default = "default_misc")]
    pub misc_frac: f64,
}

fn default_overhead() -> f64 {
    0.45
}
fn default_contention() -> f64 {
    0.50
}
fn default_misc() -> f64 {
    0.25
}

impl Default for DegradationFactors {
    fn default() -> Self {
        DegradationFactors {
            overhead_frac: default_overhead(),
            contention_frac: default_contention(),
            misc_frac: default_misc(),
        }
    }
}

impl DegradationFactors {
    pub fn validate(&self) -> Result<(), CapacityError> {
        for (name, f) in [
            ("overhead", self.overhead_frac),
            ("contention", self.contention_frac),
            ("misc", self.misc_frac),
        ] {
            if !(0.0..1.0).contains(&f) {
                return Err(CapacityError::FractionOutOfRange(format!("{name}={f}")));
            }
        }
        Ok(())
    }
}

/// One client's demand on the channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClientLoad {
    pub device_id: String,
    /// PHY rate at which this client transmits, Mbps.
    pub phy_rate: f64,
    /// Offered packets per unit time, uniform packet size.
    pub offered_packets: f64,
}

/// Sum of channel raw rates cut down by the factor chain.
pub fn effective_ap_throughput(ap: &crate::net_model::AccessPoint, f: &DegradationFactors) -> f64 {
    let raw: f64 = ap.channels.iter().map(|c| c.raw_rate_mbps).sum();
    raw * (1.0 - f.overhead_frac) * (1.0 - f.contention_frac) * (1.0 - f.misc_frac)
}

/// Equal-share per-client throughput for `n_clients` clients at equal PHY
/// rates.
pub fn per_client_throughput(
    ap: &crate::net_model::AccessPoint,
    n_clients: usize,
    f: &DegradationFactors,
) -> Result<f64, CapacityError> {
    if n_clients == 0 {
        return Err(CapacityError::ZeroClients);
    }
    Ok(effective_ap_throughput(ap, f) / n_clients as f64)
}

/// Airtime fraction per client: slow transmitters consume proportionally
/// more channel time per packet, so client i gets
/// (packets_i / rate_i) / sum_j (packets_j / rate_j).
pub fn airtime_share(loads: &[ClientLoad]) -> Vec<f64> {
    let times: Vec<f64> = loads.iter().map(|l| l.offered_packets / l.phy_rate).collect();
    let total: f64 = times.iter().sum();
    times.iter().map(|t| t / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net_model::{AccessPoint, Band, SecurityMode};

    fn dual300() -> AccessPoint {
        AccessPoint::dual("ap", 300.0, "WIFI-KNUST", SecurityMode::Open)
    }

    #[test]
    fn effective_throughput_default_chain() {
        // 600 * 0.55 * 0.50 * 0.75
        let got = effective_ap_throughput(&dual300(), &DegradationFactors::default());
        assert!((got - 123.75).abs() < 1e-9);
    }

    #[test]
    fn effective_throughput_identity_when_no_losses() {
        let f = DegradationFactors { overhead_frac: 0.0, contention_frac: 0.0, misc_frac: 0.0 };
        assert!((effective_ap_throughput(&dual300(), &f) - 600.0).abs() < 1e-9);
    }

    #[test]
    fn effective_throughput_single_channel() {
        let mut ap = dual300();
        ap.channels.retain(|c| c.band == Band::Ghz5);
        let got = effective_ap_throughput(&ap, &DegradationFactors::default());
        assert!((got - 61.875).abs() < 1e-9);
    }

    #[test]
    fn per_client_headline_figure() {
        let got = per_client_throughput(&dual300(), 50, &DegradationFactors::default()).unwrap();
        assert!((got - 2.475).abs() < 1e-9);
        assert!((2.0..=3.0).contains(&got));
    }

    #[test]
    fn per_client_single_client_gets_everything() {
        let got = per_client_throughput(&dual300(), 1, &DegradationFactors::default()).unwrap();
        assert!((got - 123.75).abs() < 1e-9);
    }

    #[test]
    fn per_client_rejects_zero_clients() {
        assert_eq!(
            per_client_throughput(&dual300(), 0, &DegradationFactors::default()),
            Err(CapacityError::ZeroClients)
        );
    }

    #[test]
    fn airtime_slow_client_dominates() {
        let loads = vec![
            ClientLoad { device_id: "slow".into(), phy_rate: 1.0, offered_packets: 1.0 },
            ClientLoad { device_id: "fast".into(), phy_rate: 100.0, offered_packets: 1.0 },
        ];
        let shares = airtime_share(&loads);
        assert!((shares[0] - 100.0 / 101.0).abs() < 1e-12);
        assert!((shares[1] - 1.0 / 101.0).abs() < 1e-12);
    }

    #[test]
    fn airtime_identical_clients_split_evenly() {
        let loads: Vec<ClientLoad> = (0..7)
            .map(|i| ClientLoad {
                device_id: format!("c{i}"),
                phy_rate: 54.0,
                offered_packets: 3.0,
            })
            .collect();
        for s in airtime_share(&loads) {
            assert!((s - 1.0 / 7.0).abs() < 1e-12);
        }
    }

    #[test]
    fn airtime_hand_computed_three_clients() {
        let loads = vec![
            ClientLoad { device_id: "a".into(), phy_rate: 10.0, offered_packets: 1.0 },
            ClientLoad { device_id: "b".into(), phy_rate: 20.0, offered_packets: 1.0 },
            ClientLoad { device_id: "c".into(), phy_rate: 20.0, offered_packets: 1.0 },
        ];
        let shares = airtime_share(&loads);
        assert!((shares[0] - 0.5).abs() < 1e-12);
        assert!((shares[1] - 0.25).abs() < 1e-12);
        assert!((shares[2] - 0.25).abs() < 1e-12);
    }
}
