//! WLAN policy regimes: security mode, domain/protocol filtering, bandwidth
//! caps, captive-portal and NAC switches. Ships the five historical
//! campus configurations as presets plus the proposed hardened design.

use std::collections::BTreeSet;
use std::net::Ipv4Addr;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use crate::net_model::SecurityMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Protocol {
    #[serde(rename = "HTTP")]
    Http,
    #[serde(rename = "HTTPS")]
    Https,
    #[serde(rename = "FTP")]
    Ftp,
    #[serde(rename = "P2P")]
    P2p,
    #[serde(rename = "DNS")]
    Dns,
    #[serde(rename = "ICMP")]
    Icmp,
}

impl Protocol {
    pub const ALL: [Protocol; 6] = [
        Protocol::Http,
        Protocol::Https,
        Protocol::Ftp,
        Protocol::P2p,
        Protocol::Dns,
        Protocol::Icmp,
    ];
}

impl FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "HTTP" => Ok(Protocol::Http),
            "HTTPS" => Ok(Protocol::Https),
            "FTP" => Ok(Protocol::Ftp),
            "P2P" => Ok(Protocol::P2p),
            "DNS" => Ok(Protocol::Dns),
            "ICMP" => Ok(Protocol::Icmp),
            other => Err(format!("unknown protocol: {other}")),
        }
    }
}

/// One WLAN policy regime. Immutable once constructed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyConfig {
    pub name: String,
    pub ssid: String,
    pub security_mode: SecurityMode,
    #[serde(default)]
    pub domain_blacklist: BTreeSet<String>,
    pub allowed_protocols: BTreeSet<Protocol>,
    /// Where blacklisted domains are sent.
    #[serde(default)]
    pub redirect_target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth_cap: Option<f64>,
    pub portal_enabled: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session_timeout: Option<u64>,
    pub nac_enabled: bool,
    /// Traffic on this SSID is fully observed by the administrators.
    #[serde(default)]
    pub monitored: bool,
}

impl PolicyConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.portal_enabled && self.session_timeout.is_none() {
            return Err("portal_enabled requires session_timeout".into());
        }
        if !self.domain_blacklist.is_empty() && self.redirect_target.is_empty() {
            return Err("non-empty blacklist requires a redirect_target".into());
        }
        Ok(())
    }

    /// The recommended configuration: NAC posture gating plus a monitored
    /// captive portal over WPA2.
    pub fn proposed_design() -> Self {
        PolicyConfig {
            name: "proposed".into(),
            ssid: "WIFI-KNUST".into(),
            security_mode: SecurityMode::Wpa2,
            domain_blacklist: BTreeSet::new(),
            allowed_protocols: Protocol::ALL.into_iter().collect(),
            redirect_target: String::new(),
            bandwidth_cap: None,
            portal_enabled: true,
            session_timeout: Some(600),
            nac_enabled: true,
            monitored: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolicyVersion {
    V1,
    V2,
    V3,
    V4,
    V5,
}

impl FromStr for PolicyVersion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "v1" => Ok(PolicyVersion::V1),
            "v2" => Ok(PolicyVersion::V2),
            "v3" => Ok(PolicyVersion::V3),
            "v4" => Ok(PolicyVersion::V4),
            "v5" => Ok(PolicyVersion::V5),
            other => Err(format!("unknown policy version: {other}")),
        }
    }
}

fn all_protocols() -> BTreeSet<Protocol> {
    Protocol::ALL.into_iter().collect()
}

fn base(name: &str) -> PolicyConfig {
    PolicyConfig {
        name: name.into(),
        ssid: "WIFI-KNUST".into(),
        security_mode: SecurityMode::Open,
        domain_blacklist: BTreeSet::new(),
        allowed_protocols: all_protocols(),
        redirect_target: String::new(),
        bandwidth_cap: None,
        portal_enabled: false,
        session_timeout: None,
        nac_enabled: false,
        monitored: false,
    }
}

/// The historical configuration for one version of the campus WLAN.
pub fn preset(version: PolicyVersion) -> PolicyConfig {
    match version {
        // Launch: wide open, no filters, no caps.
        PolicyVersion::V1 => base("v1"),
        // Domain and protocol restrictions; blocked domains bounce to the
        // university site.
        PolicyVersion::V2 => PolicyConfig {
            domain_blacklist: ["youtube.com".to_string()].into(),
            allowed_protocols: [Protocol::Http, Protocol::Https, Protocol::Dns].into(),
            redirect_target: "knust.edu.gh".into(),
            ..base("v2")
        },
        // Filters lifted again; the isolated SEC test network appears
        // alongside (see preset_companion).
        PolicyVersion::V3 => base("v3"),
        // Gateway proxy with a captive portal; sessions lapse every ten
        // minutes.
        PolicyVersion::V4 => PolicyConfig {
            portal_enabled: true,
            session_timeout: Some(600),
            ..base("v4")
        },
        // Portal dropped on the main SSID; SEC keeps a monitored portal.
        PolicyVersion::V5 => base("v5"),
    }
}

/// Companion configuration for the isolated "KNUST WIFI SEC" SSID, present
/// from V3 onward.
pub fn preset_companion(version: PolicyVersion) -> Option<PolicyConfig> {
    match version {
        PolicyVersion::V1 | PolicyVersion::V2 => None,
        // Closed off behind a proxy with no forwarding; used to trial
        // policies under full monitoring.
        PolicyVersion::V3 | PolicyVersion::V4 => Some(PolicyConfig {
            ssid: "KNUST WIFI SEC".into(),
            allowed_protocols: BTreeSet::new(),
            monitored: true,
            ..base(&format!("{}-sec", name_of(version)))
        }),
        PolicyVersion::V5 => Some(PolicyConfig {
            ssid: "KNUST WIFI SEC".into(),
            portal_enabled: true,
            session_timeout: Some(600),
            monitored: true,
            ..base("v5-sec")
        }),
    }
}

fn name_of(version: PolicyVersion) -> &'static str {
    match version {
        PolicyVersion::V1 => "v1",
        PolicyVersion::V2 => "v2",
        PolicyVersion::V3 => "v3",
        PolicyVersion::V4 => "v4",
        PolicyVersion::V5 => "v5",
    }
}

/// One request against the policy filter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccessRequest {
    pub src_ip: Ipv4Addr,
    pub dst_domain: String,
    pub protocol: Protocol,
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DenyReason {
    ProtocolBlocked,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    Allow,
    Redirect(String),
    Deny(DenyReason),
}

/// DNS and ICMP pass every preset regardless of the configured protocol
/// set; the portal's hijack-and-redirect machinery depends on them.
fn protocol_allowed(policy: &PolicyConfig, protocol: Protocol) -> bool {
    matches!(protocol, Protocol::Dns | Protocol::Icmp)
        || policy.allowed_protocols.contains(&protocol)
}

/// Case-insensitive domain-suffix match: "youtube.com" covers
/// "www.youtube.com" but not "notyoutube.com".
fn domain_matches(pattern: &str, domain: &str) -> bool {
    let p = pattern.to_ascii_lowercase();
    let d = domain.to_ascii_lowercase();
    d == p || d.ends_with(&format!(".{p}"))
}

/// Protocol check first, then domain blacklist; a blocked protocol never
/// produces a redirect.
pub fn evaluate_request(policy: &PolicyConfig, req: &AccessRequest) -> Verdict {
    if !protocol_allowed(policy, req.protocol) {
        return Verdict::Deny(DenyReason::ProtocolBlocked);
    }
    if policy.domain_blacklist.iter().any(|p| domain_matches(p, &req.dst_domain)) {
        return Verdict::Redirect(policy.redirect_target.clone());
    }
    Verdict::Allow
}

/// Clamp a computed throughput to the policy's bandwidth cap, if any.
pub fn apply_cap(policy: &PolicyConfig, computed_mbps: f64) -> f64 {
    match policy.bandwidth_cap {
        Some(cap) => computed_mbps.min(cap),
        None => computed_mbps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(domain: &str, protocol: Protocol) -> AccessRequest {
        AccessRequest {
            src_ip: Ipv4Addr::new(10, 9, 1, 1),
            dst_domain: domain.into(),
            protocol,
            timestamp: 0,
        }
    }

    #[test]
    fn v1_is_wide_open() {
        let p = preset(PolicyVersion::V1);
        assert_eq!(p.security_mode, SecurityMode::Open);
        assert!(p.domain_blacklist.is_empty());
        assert_eq!(p.allowed_protocols.len(), 6);
        assert!(!p.portal_enabled);
        assert!(p.bandwidth_cap.is_none());
        assert_eq!(evaluate_request(&p, &req("anything.example", Protocol::P2p)), Verdict::Allow);
    }

    #[test]
    fn v2_redirects_blacklisted_domains() {
        let p = preset(PolicyVersion::V2);
        assert_eq!(
            evaluate_request(&p, &req("youtube.com", Protocol::Http)),
            Verdict::Redirect("knust.edu.gh".into())
        );
        assert_eq!(
            evaluate_request(&p, &req("www.youtube.com", Protocol::Http)),
            Verdict::Redirect("knust.edu.gh".into())
        );
    }

    #[test]
    fn v2_denies_ftp_before_domain_check() {
        let p = preset(PolicyVersion::V2);
        assert_eq!(
            evaluate_request(&p, &req("example.com", Protocol::Ftp)),
            Verdict::Deny(DenyReason::ProtocolBlocked)
        );
        // blocked protocol wins even for a blacklisted domain
        assert_eq!(
            evaluate_request(&p, &req("youtube.com", Protocol::Ftp)),
            Verdict::Deny(DenyReason::ProtocolBlocked)
        );
    }

    #[test]
    fn v4_has_ten_minute_sessions() {
        let p = preset(PolicyVersion::V4);
        assert!(p.portal_enabled);
        assert_eq!(p.session_timeout, Some(600));
        assert!(!p.nac_enabled);
    }

    #[test]
    fn v5_main_open_and_sec_monitored() {
        let main = preset(PolicyVersion::V5);
        assert!(!main.portal_enabled);
        assert_eq!(main.security_mode, SecurityMode::Open);
        let sec = preset_companion(PolicyVersion::V5).unwrap();
        assert!(sec.portal_enabled);
        assert!(sec.monitored);
        assert_eq!(sec.ssid, "KNUST WIFI SEC");
    }

    #[test]
    fn v3_ships_an_isolated_companion() {
        let sec = preset_companion(PolicyVersion::V3).unwrap();
        assert!(sec.monitored);
        assert!(sec.allowed_protocols.is_empty());
        assert_eq!(
            evaluate_request(&sec, &req("example.com", Protocol::Http)),
            Verdict::Deny(DenyReason::ProtocolBlocked)
        );
    }

    #[test]
    fn presets_are_idempotent_and_valid() {
        for v in [
            PolicyVersion::V1,
            PolicyVersion::V2,
            PolicyVersion::V3,
            PolicyVersion::V4,
            PolicyVersion::V5,
        ] {
            assert_eq!(preset(v), preset(v));
            preset(v).validate().unwrap();
            if let Some(sec) = preset_companion(v) {
                sec.validate().unwrap();
                assert_eq!(Some(sec), preset_companion(v));
            }
        }
    }

    #[test]
    fn dns_and_icmp_implicitly_allowed() {
        let p = preset(PolicyVersion::V2);
        assert!(!p.allowed_protocols.contains(&Protocol::Icmp));
        assert_eq!(evaluate_request(&p, &req("example.com", Protocol::Icmp)), Verdict::Allow);
    }

    #[test]
    fn apply_cap_behaviour() {
        let mut p = preset(PolicyVersion::V4);
        p.bandwidth_cap = Some(1.0);
        assert!((apply_cap(&p, 2.475) - 1.0).abs() < 1e-12);
        p.bandwidth_cap = Some(5.0);
        assert!((apply_cap(&p, 2.475) - 2.475).abs() < 1e-12);
        p.bandwidth_cap = None;
        assert!((apply_cap(&p, 2.475) - 2.475).abs() < 1e-12);
    }

    // Brute-force oracle: every Allow verdict implies the protocol is in
    // the allowed set (or implicit) and the domain is off the blacklist.
    #[test]
    fn allow_verdicts_agree_with_exhaustive_oracle() {
        let domains = [
            "youtube.com",
            "www.youtube.com",
            "notyoutube.com",
            "knust.edu.gh",
            "example.com",
        ];
        for v in [
            PolicyVersion::V1,
            PolicyVersion::V2,
            PolicyVersion::V3,
            PolicyVersion::V4,
            PolicyVersion::V5,
        ] {
            let p = preset(v);
            for d in domains {
                for proto in Protocol::ALL {
                    let verdict = evaluate_request(&p, &req(d, proto));
                    let proto_ok = matches!(proto, Protocol::Dns | Protocol::Icmp)
                        || p.allowed_protocols.contains(&proto);
                    let blacklisted =
                        p.domain_blacklist.iter().any(|pat| domain_matches(pat, d));
                    let expected = if !proto_ok {
                        Verdict::Deny(DenyReason::ProtocolBlocked)
                    } else if blacklisted {
                        Verdict::Redirect(p.redirect_target.clone())
                    } else {
                        Verdict::Allow
                    };
                    assert_eq!(verdict, expected, "policy {v:?} domain {d} proto {proto:?}");
                }
            }
        }
    }

    #[test]
    fn preset_round_trips_through_json() {
        for v in [
            PolicyVersion::V1,
            PolicyVersion::V2,
            PolicyVersion::V3,
            PolicyVersion::V4,
            PolicyVersion::V5,
        ] {
            let p = preset(v);
            let json = serde_json::to_string(&p).unwrap();
            let back: PolicyConfig = serde_json::from_str(&json).unwrap();
            assert_eq!(p, back);
        }
    }
}
