//! Zone-based firewall model: public/private DMZs, the access network,
//! the Internet, and the management path, with a first-match-wins ordered
//! ACL.

use std::fmt;
use std::net::{Ipv4Addr, Ipv6Addr};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::net_model::Cidr4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SegError {
    #[error("ruleset lacks a terminal catch-all rule")]
    NoDefaultRule,
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ZoneName {
    #[serde(rename = "PublicDMZ")]
    PublicDmz,
    #[serde(rename = "PrivateDMZ")]
    PrivateDmz,
    AccessNet,
    Internet,
    Management,
}

impl ZoneName {
    pub const ALL: [ZoneName; 5] = [
        ZoneName::PublicDmz,
        ZoneName::PrivateDmz,
        ZoneName::AccessNet,
        ZoneName::Internet,
        ZoneName::Management,
    ];

    fn as_str(self) -> &'static str {
        match self {
            ZoneName::PublicDmz => "PublicDMZ",
            ZoneName::PrivateDmz => "PrivateDMZ",
            ZoneName::AccessNet => "AccessNet",
            ZoneName::Internet => "Internet",
            ZoneName::Management => "Management",
        }
    }
}

impl FromStr for ZoneName {
    type Err = SegError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ZoneName::ALL
            .into_iter()
            .find(|z| z.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| SegError::Parse(format!("unknown zone: {s}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum HostRole {
    Server(String),
    Host,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HostDescriptor {
    pub address: String,
    pub role: HostRole,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Zone {
    pub name: ZoneName,
    pub members: Vec<HostDescriptor>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Service {
    #[serde(rename = "HTTP")]
    Http,
    #[serde(rename = "HTTPS")]
    Https,
    #[serde(rename = "DNS")]
    Dns,
    #[serde(rename = "SQL")]
    Sql,
    Mail,
    #[serde(rename = "VoIP")]
    Voip,
    Mgmt,
    Any,
}

impl Service {
    /// The seven concrete services (Any excluded).
    pub const CONCRETE: [Service; 7] = [
        Service::Http,
        Service::Https,
        Service::Dns,
        Service::Sql,
        Service::Mail,
        Service::Voip,
        Service::Mgmt,
    ];
}

/// Rule endpoint selector: a zone, an address prefix (IPv4 or IPv6), or
/// anything. Serialized as a plain string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selector {
    Any,
    Zone(ZoneName),
    PrefixV4(Cidr4),
    PrefixV6 { prefix: Ipv6Addr, prefix_len: u8 },
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selector::Any => write!(f, "Any"),
            Selector::Zone(z) => write!(f, "{}", z.as_str()),
            Selector::PrefixV4(c) => write!(f, "{c}"),
            Selector::PrefixV6 { prefix, prefix_len } => write!(f, "{prefix}/{prefix_len}"),
        }
    }
}

impl FromStr for Selector {
    type Err = SegError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("any") {
            return Ok(Selector::Any);
        }
        if let Ok(z) = s.parse::<ZoneName>() {
            return Ok(Selector::Zone(z));
        }
        if s.contains(':') {
            let (net, len) = s
                .split_once('/')
                .ok_or_else(|| SegError::Parse(format!("bad prefix: {s}")))?;
            let prefix: Ipv6Addr =
                net.parse().map_err(|_| SegError::Parse(format!("bad prefix: {s}")))?;
            let prefix_len: u8 =
                len.parse().map_err(|_| SegError::Parse(format!("bad prefix: {s}")))?;
            if prefix_len > 128 {
                return Err(SegError::Parse(format!("bad prefix length: {s}")));
            }
            return Ok(Selector::PrefixV6 { prefix, prefix_len });
        }
        s.parse::<Cidr4>()
            .map(Selector::PrefixV4)
            .map_err(|e| SegError::Parse(e.to_string()))
    }
}

impl Serialize for Selector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Selector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Action {
    Allow,
    Deny,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AclRule {
    pub src: Selector,
    pub dst: Selector,
    pub service: Service,
    pub action: Action,
}

/// A traffic endpoint: address plus the zone it currently sits in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Endpoint {
    pub address: String,
    pub zone: ZoneName,
}

impl Endpoint {
    pub fn new(address: &str, zone: ZoneName) -> Self {
        Endpoint { address: address.to_string(), zone }
    }
}

fn v6_prefix_contains(prefix: Ipv6Addr, len: u8, addr: Ipv6Addr) -> bool {
    let p = u128::from(prefix);
    let a = u128::from(addr);
    let mask = if len == 0 { 0 } else { u128::MAX << (128 - len) };
    p & mask == a & mask
}

fn selector_matches(sel: &Selector, ep: &Endpoint) -> bool {
    match sel {
        Selector::Any => true,
        Selector::Zone(z) => *z == ep.zone,
        Selector::PrefixV4(cidr) => {
            ep.address.parse::<Ipv4Addr>().is_ok_and(|a| cidr.contains(a))
        }
        Selector::PrefixV6 { prefix, prefix_len } => ep
            .address
            .parse::<Ipv6Addr>()
            .is_ok_and(|a| v6_prefix_contains(*prefix, *prefix_len, a)),
    }
}

fn rule_matches(rule: &AclRule, src: &Endpoint, dst: &Endpoint, service: Service) -> bool {
    selector_matches(&rule.src, src)
        && selector_matches(&rule.dst, dst)
        && (rule.service == Service::Any || rule.service == service)
}

fn is_catch_all(rule: &AclRule) -> bool {
    rule.src == Selector::Any && rule.dst == Selector::Any && rule.service == Service::Any
}

/// Verdict of the first matching rule. The ruleset must end with an
/// explicit catch-all.
pub fn permits(
    ruleset: &[AclRule],
    src: &Endpoint,
    dst: &Endpoint,
    service: Service,
) -> Result<Action, SegError> {
    match ruleset.last() {
        Some(last) if is_catch_all(last) => {}
        _ => return Err(SegError::NoDefaultRule),
    }
    Ok(ruleset
        .iter()
        .find(|r| rule_matches(r, src, dst, service))
        .map(|r| r.action)
        .expect("catch-all guarantees a match"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    NonServerInDmz { zone: ZoneName, address: String },
    MgmtBackdoor { rule_index: usize },
    MissingDefaultDeny,
}

/// Structural checks: DMZs hold servers only, the Mgmt service is opened
/// to the Management zone alone, and the ruleset falls through to deny.
pub fn validate_topology(zones: &[Zone], ruleset: &[AclRule]) -> Vec<Violation> {
    let mut violations = Vec::new();
    for zone in zones {
        if matches!(zone.name, ZoneName::PublicDmz | ZoneName::PrivateDmz) {
            for m in &zone.members {
                if m.role == HostRole::Host {
                    violations.push(Violation::NonServerInDmz {
                        zone: zone.name,
                        address: m.address.clone(),
                    });
                }
            }
        }
    }
    for (i, rule) in ruleset.iter().enumerate() {
        let opens_mgmt = rule.action == Action::Allow
            && matches!(rule.service, Service::Mgmt | Service::Any);
        if opens_mgmt && rule.src != Selector::Zone(ZoneName::Management) && !is_catch_all(rule) {
            violations.push(Violation::MgmtBackdoor { rule_index: i });
        }
    }
    match ruleset.last() {
        Some(last) if is_catch_all(last) && last.action == Action::Deny => {}
        _ => violations.push(Violation::MissingDefaultDeny),
    }
    violations
}

/// The shipped ruleset: public DMZ open to everyone for web and DNS,
/// private DMZ reachable from the access network and management only,
/// management service restricted to the Management zone, terminal deny.
pub fn default_ruleset() -> Vec<AclRule> {
    let mut rules = vec![AclRule {
        src: Selector::Zone(ZoneName::Management),
        dst: Selector::Any,
        service: Service::Mgmt,
        action: Action::Allow,
    }];
    for svc in [Service::Http, Service::Https, Service::Dns] {
        rules.push(AclRule {
            src: Selector::Any,
            dst: Selector::Zone(ZoneName::PublicDmz),
            service: svc,
            action: Action::Allow,
        });
    }
    for src in [ZoneName::AccessNet, ZoneName::Management] {
        for svc in [
            Service::Http,
            Service::Https,
            Service::Dns,
            Service::Sql,
            Service::Mail,
            Service::Voip,
        ] {
            rules.push(AclRule {
                src: Selector::Zone(src),
                dst: Selector::Zone(ZoneName::PrivateDmz),
                service: svc,
                action: Action::Allow,
            });
        }
    }
    rules.push(AclRule {
        src: Selector::Any,
        dst: Selector::Any,
        service: Service::Any,
        action: Action::Deny,
    });
    rules
}

/// A small well-formed topology to pair with [`default_ruleset`].
pub fn default_zones() -> Vec<Zone> {
    vec![
        Zone {
            name: ZoneName::PublicDmz,
            members: vec![
                HostDescriptor {
                    address: "10.1.0.10".into(),
                    role: HostRole::Server("web".into()),
                },
                HostDescriptor {
                    address: "10.1.0.11".into(),
                    role: HostRole::Server("dns".into()),
                },
            ],
        },
        Zone {
            name: ZoneName::PrivateDmz,
            members: vec![
                HostDescriptor {
                    address: "10.2.0.10".into(),
                    role: HostRole::Server("mail".into()),
                },
                HostDescriptor {
                    address: "10.2.0.11".into(),
                    role: HostRole::Server("database".into()),
                },
                HostDescriptor {
                    address: "10.2.0.12".into(),
                    role: HostRole::Server("portal".into()),
                },
            ],
        },
        Zone {
            name: ZoneName::AccessNet,
            members: vec![HostDescriptor { address: "10.9.1.1".into(), role: HostRole::Host }],
        },
        Zone {
            name: ZoneName::Internet,
            members: vec![HostDescriptor { address: "198.51.100.7".into(), role: HostRole::Host }],
        },
        Zone {
            name: ZoneName::Management,
            members: vec![HostDescriptor { address: "10.0.0.2".into(), role: HostRole::Host }],
        },
    ]
}

pub fn load_ruleset(json: &str) -> Result<Vec<AclRule>, SegError> {
    serde_json::from_str(json).map_err(|e| SegError::Parse(e.to_string()))
}
