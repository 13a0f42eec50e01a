//! Campus network model: WAN link, 2-tier access points, client devices,
//! and dual-stack (DHCPv4 + SLAAC) address assignment.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::net::{Ipv4Addr, Ipv6Addr};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetError {
    #[error("DHCP pool exhausted")]
    PoolExhausted,
    #[error("device does not support IPv6")]
    UnsupportedDevice,
    #[error("device shares no radio band with the access point")]
    IncompatibleTech,
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// 48-bit hardware address. Serialized in the usual colon-hex form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MacAddr(pub [u8; 6]);

impl fmt::Display for MacAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = self.0;
        write!(
            f,
            "{:02x}:{:02x}:{:02x}:{:02x}:{:02x}:{:02x}",
            b[0], b[1], b[2], b[3], b[4], b[5]
        )
    }
}

impl FromStr for MacAddr {
    type Err = NetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 6 {
            return Err(NetError::Parse(format!("bad MAC address: {s}")));
        }
        let mut bytes = [0u8; 6];
        for (i, p) in parts.iter().enumerate() {
            bytes[i] = u8::from_str_radix(p, 16)
                .map_err(|_| NetError::Parse(format!("bad MAC address: {s}")))?;
        }
        Ok(MacAddr(bytes))
    }
}

impl Serialize for MacAddr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MacAddr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Band {
    #[serde(rename = "2.4GHz")]
    Ghz2_4,
    #[serde(rename = "5GHz")]
    Ghz5,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub band: Band,
    #[serde(rename = "mbps")]
    pub raw_rate_mbps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ApKind {
    Autonomous,
    Lightweight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SecurityMode {
    Open,
    #[serde(rename = "WEP")]
    Wep,
    #[serde(rename = "WPA")]
    Wpa,
    #[serde(rename = "WPA2")]
    Wpa2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccessPoint {
    pub id: String,
    pub kind: ApKind,
    /// 1 = autonomous/root layer, 2 = lightweight layer behind a controller.
    pub tier: u8,
    pub channels: Vec<Channel>,
    pub ssid: String,
    #[serde(rename = "security")]
    pub security_mode: SecurityMode,
    pub location: String,
}

impl AccessPoint {
    /// Convenience constructor for a dual-channel AP (one 2.4 GHz and one
    /// 5 GHz radio at the same raw rate).
    pub fn dual(id: &str, rate_mbps: f64, ssid: &str, security: SecurityMode) -> Self {
        AccessPoint {
            id: id.to_string(),
            kind: ApKind::Autonomous,
            tier: 1,
            channels: vec![
                Channel { band: Band::Ghz2_4, raw_rate_mbps: rate_mbps },
                Channel { band: Band::Ghz5, raw_rate_mbps: rate_mbps },
            ],
            ssid: ssid.to_string(),
            security_mode: security,
            location: String::new(),
        }
    }

    pub fn channel(&self, band: Band) -> Option<&Channel> {
        self.channels.iter().find(|c| c.band == band)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum WifiTech {
    #[serde(rename = "802.11b")]
    B,
    #[serde(rename = "802.11g")]
    G,
    #[serde(rename = "802.11a")]
    A,
    #[serde(rename = "802.11n")]
    N,
}

impl WifiTech {
    /// 802.11n radios operate on both bands; b/g are 2.4 GHz only and a is
    /// 5 GHz only.
    fn supports(self, band: Band) -> bool {
        matches!(
            (self, band),
            (WifiTech::B | WifiTech::G, Band::Ghz2_4) | (WifiTech::A, Band::Ghz5) | (WifiTech::N, _)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IpSupport {
    V4Only,
    DualStack,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OsInfo {
    pub name: String,
    pub version: String,
    pub date: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AntivirusInfo {
    pub product: String,
    pub version: String,
    /// Simulated-epoch seconds of the last definitions update.
    pub definitions_date: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DriverInfo {
    pub vendor: String,
    pub version: String,
}

/// The MDM identity of a user-owned device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClientDevice {
    /// The MAC address in string form doubles as the device id.
    pub device_id: String,
    pub name: String,
    pub model: String,
    pub serial_imei: String,
    pub mac: MacAddr,
    pub manufacturer: String,
    pub manufacture_date: String,
    pub os: OsInfo,
    pub ip_support: IpSupport,
    pub wifi_tech: BTreeSet<WifiTech>,
    pub antivirus: AntivirusInfo,
    pub drivers: Vec<DriverInfo>,
}

impl ClientDevice {
    /// A minimally-populated device for tests and simulation.
    pub fn sample(mac: MacAddr, imei: &str, tech: &[WifiTech]) -> Self {
        ClientDevice {
            device_id: mac.to_string(),
            name: format!("device-{mac}"),
            model: "Generic".to_string(),
            serial_imei: imei.to_string(),
            mac,
            manufacturer: "Acme".to_string(),
            manufacture_date: "2015-01-01".to_string(),
            os: OsInfo {
                name: "Android".to_string(),
                version: "6.0".to_string(),
                date: "2015-10-05".to_string(),
            },
            ip_support: IpSupport::DualStack,
            wifi_tech: tech.iter().copied().collect(),
            antivirus: AntivirusInfo {
                product: "DefenderX".to_string(),
                version: "1.0".to_string(),
                definitions_date: 0,
            },
            drivers: vec![],
        }
    }
}

/// IPv4 network in CIDR notation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cidr4 {
    pub network: Ipv4Addr,
    pub prefix_len: u8,
}

impl Cidr4 {
    pub fn contains(&self, addr: Ipv4Addr) -> bool {
        let mask = self.mask();
        u32::from(addr) & mask == u32::from(self.network) & mask
    }

    fn mask(&self) -> u32 {
        if self.prefix_len == 0 {
            0
        } else {
            u32::MAX << (32 - self.prefix_len)
        }
    }

    /// First and last assignable host addresses (network and broadcast
    /// addresses excluded).
    fn host_range(&self) -> (u32, u32) {
        let base = u32::from(self.network) & self.mask();
        let bcast = base | !self.mask();
        (base + 1, bcast.saturating_sub(1))
    }
}

impl fmt::Display for Cidr4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.network, self.prefix_len)
    }
}

impl FromStr for Cidr4 {
    type Err = NetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (net, len) = s
            .split_once('/')
            .ok_or_else(|| NetError::Parse(format!("bad CIDR: {s}")))?;
        let network: Ipv4Addr =
            net.parse().map_err(|_| NetError::Parse(format!("bad CIDR: {s}")))?;
        let prefix_len: u8 =
            len.parse().map_err(|_| NetError::Parse(format!("bad CIDR: {s}")))?;
        if prefix_len > 32 {
            return Err(NetError::Parse(format!("bad CIDR prefix length: {s}")));
        }
        Ok(Cidr4 { network, prefix_len })
    }
}

impl Serialize for Cidr4 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Cidr4 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// IPv6 prefix; SLAAC requires exactly /64.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ipv6Prefix {
    pub prefix: Ipv6Addr,
    pub prefix_len: u8,
}

impl fmt::Display for Ipv6Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.prefix, self.prefix_len)
    }
}

impl FromStr for Ipv6Prefix {
    type Err = NetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (net, len) = s
            .split_once('/')
            .ok_or_else(|| NetError::Parse(format!("bad IPv6 prefix: {s}")))?;
        let prefix: Ipv6Addr =
            net.parse().map_err(|_| NetError::Parse(format!("bad IPv6 prefix: {s}")))?;
        let prefix_len: u8 =
            len.parse().map_err(|_| NetError::Parse(format!("bad IPv6 prefix: {s}")))?;
        if prefix_len != 64 {
            return Err(NetError::Parse(format!("SLAAC prefix must be /64, got /{prefix_len}")));
        }
        Ok(Ipv6Prefix { prefix, prefix_len })
    }
}

impl Serialize for Ipv6Prefix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ipv6Prefix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

pub const DEFAULT_LEASE_SECONDS: u64 = 3600;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DhcpPoolConfig {
    pub cidr: Cidr4,
    pub gateway: Ipv4Addr,
    pub dns_suffix: String,
    #[serde(default = "default_lease")]
    pub lease_s: u64,
}

fn default_lease() -> u64 {
    DEFAULT_LEASE_SECONDS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampusNetwork {
    pub wan_mbps: f64,
    pub dhcp: DhcpPoolConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v6_prefix: Option<Ipv6Prefix>,
    #[serde(default)]
    pub host_isolation: bool,
    pub aps: Vec<AccessPoint>,
}

impl CampusNetwork {
    pub fn validate(&self) -> Result<(), NetError> {
        if self.wan_mbps <= 0.0 {
            return Err(NetError::InvalidTopology("wan_mbps must be positive".into()));
        }
        let mut ids = BTreeSet::new();
        for ap in &self.aps {
            if !ids.insert(&ap.id) {
                return Err(NetError::InvalidTopology(format!("duplicate AP id {}", ap.id)));
            }
            if ap.kind == ApKind::Lightweight && ap.tier != 2 {
                return Err(NetError::InvalidTopology(format!(
                    "lightweight AP {} must sit at tier 2 behind a controller",
                    ap.id
                )));
            }
            if !(1..=2).contains(&ap.tier) {
                return Err(NetError::InvalidTopology(format!("AP {} tier out of range", ap.id)));
            }
            if ap.channels.is_empty() {
                return Err(NetError::InvalidTopology(format!("AP {} has no channels", ap.id)));
            }
            for ch in &ap.channels {
                if ch.raw_rate_mbps <= 0.0 {
                    return Err(NetError::InvalidTopology(format!(
                        "AP {} channel rate must be positive",
                        ap.id
                    )));
                }
            }
            if ap.channels.len() == 2 {
                let bands: BTreeSet<Band> = ap.channels.iter().map(|c| c.band).collect();
                if bands.len() != 2 {
                    return Err(NetError::InvalidTopology(format!(
                        "dual-channel AP {} needs one 2.4 GHz and one 5 GHz radio",
                        ap.id
                    )));
                }
            }
        }
        Ok(())
    }

    /// The default topology: a single dual-channel 300 Mbps AP behind a
    /// 144 Mbps WAN link, pool 10.9.0.0/16 with gateway 10.9.0.5.
    pub fn default_campus() -> Self {
        CampusNetwork {
            wan_mbps: 144.0,
            dhcp: DhcpPoolConfig {
                cidr: "10.9.0.0/16".parse().unwrap(),
                gateway: Ipv4Addr::new(10, 9, 0, 5),
                dns_suffix: "knust.edu.gh".to_string(),
                lease_s: DEFAULT_LEASE_SECONDS,
            },
            v6_prefix: Some("2001:db8::/64".parse().unwrap()),
            host_isolation: false,
            aps: vec![AccessPoint::dual("ap-1", 300.0, "WIFI-KNUST", SecurityMode::Open)],
        }
    }
}

/// Parse and validate a topology JSON document.
pub fn load_topology(json: &str) -> Result<CampusNetwork, NetError> {
    let net: CampusNetwork =
        serde_json::from_str(json).map_err(|e| NetError::Parse(e.to_string()))?;
    net.validate()?;
    Ok(net)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IpAssignment {
    pub v4: Ipv4Addr,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v6: Option<Ipv6Addr>,
    pub gateway: Ipv4Addr,
    pub dns_suffix: String,
    pub lease_start: u64,
    pub lease_seconds: u64,
}

#[derive(Debug, Clone, Copy)]
struct Lease {
    addr: Ipv4Addr,
    start: u64,
}

/// DHCPv4 allocator over a campus pool. Single-writer: callers serialize
/// mutation externally.
#[derive(Debug, Clone)]
pub struct DhcpServer {
    pool: DhcpPoolConfig,
    v6_prefix: Option<Ipv6Prefix>,
    leases: BTreeMap<MacAddr, Lease>,
}

impl DhcpServer {
    pub fn new(network: &CampusNetwork) -> Self {
        DhcpServer {
            pool: network.dhcp.clone(),
            v6_prefix: network.v6_prefix,
            leases: BTreeMap::new(),
        }
    }

    pub fn pool(&self) -> &DhcpPoolConfig {
        &self.pool
    }

    fn lease_expired(&self, lease: &Lease, now: u64) -> bool {
        lease.start + self.pool.lease_s <= now
    }

    /// Assign (or renew) an address for `device`. Renewal inside the lease
    /// window returns the same v4 address with a fresh lease_start.
    pub fn assign(&mut self, device: &ClientDevice, now: u64) -> Result<IpAssignment, NetError> {
        self.leases.retain(|_, l| l.start + self.pool.lease_s > now);

        let addr = if let Some(lease) = self.leases.get(&device.mac) {
            debug_assert!(!self.lease_expired(lease, now));
            lease.addr
        } else {
            self.next_free().ok_or(NetError::PoolExhausted)?
        };
        self.leases.insert(device.mac, Lease { addr, start: now });

        let v6 = match (device.ip_support, self.v6_prefix) {
            (IpSupport::DualStack, Some(prefix)) => Some(slaac_assign_mac(device.mac, prefix)),
            _ => None,
        };
        Ok(IpAssignment {
            v4: addr,
            v6,
            gateway: self.pool.gateway,
            dns_suffix: self.pool.dns_suffix.clone(),
            lease_start: now,
            lease_seconds: self.pool.lease_s,
        })
    }

    pub fn release(&mut self, mac: MacAddr) {
        self.leases.remove(&mac);
    }

    pub fn active_lease(&self, mac: MacAddr, now: u64) -> Option<Ipv4Addr> {
        self.leases
            .get(&mac)
            .filter(|l| !self.lease_expired(l, now))
            .map(|l| l.addr)
    }

    fn next_free(&self) -> Option<Ipv4Addr> {
        let (lo, hi) = self.pool.cidr.host_range();
        let used: BTreeSet<u32> = self.leases.values().map(|l| u32::from(l.addr)).collect();
        let gw = u32::from(self.pool.gateway);
        (lo..=hi)
            .find(|a| *a != gw && !used.contains(a))
            .map(Ipv4Addr::from)
    }
}

/// Stateless address assignment helper for the spec-level operation.
pub fn dhcp_assign(
    server: &mut DhcpServer,
    device: &ClientDevice,
    now: u64,
) -> Result<IpAssignment, NetError> {
    server.assign(device, now)
}

/// EUI-64 expansion of a MAC: flip the universal/local bit of the first
/// octet and splice FF:FE into the middle.
pub fn eui64_interface_id(mac: MacAddr) -> [u8; 8] {
    let m = mac.0;
    [m[0] ^ 0x02, m[1], m[2], 0xff, 0xfe, m[3], m[4], m[5]]
}

fn slaac_assign_mac(mac: MacAddr, prefix: Ipv6Prefix) -> Ipv6Addr {
    let iid = eui64_interface_id(mac);
    let mut octets = prefix.prefix.octets();
    octets[8..16].copy_from_slice(&iid);
    Ipv6Addr::from(octets)
}

/// SLAAC address for a dual-stack device under a /64 prefix.
pub fn slaac_assign(device: &ClientDevice, prefix: Ipv6Prefix) -> Result<Ipv6Addr, NetError> {
    if device.ip_support == IpSupport::V4Only {
        return Err(NetError::UnsupportedDevice);
    }
    Ok(slaac_assign_mac(device.mac, prefix))
}

/// Invert EUI-64: recover the MAC from a SLAAC address. Returns None when
/// the FF:FE marker is absent.
pub fn mac_from_slaac(addr: Ipv6Addr) -> Option<MacAddr> {
    let o = addr.octets();
    if o[11] != 0xff || o[12] != 0xfe {
        return None;
    }
    Some(MacAddr([o[8] ^ 0x02, o[9], o[10], o[13], o[14], o[15]]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Association {
    pub ap_id: String,
    pub channel: Channel,
}

/// Band selection: 5 GHz whenever the device supports 802.11a/n and the AP
/// has a 5 GHz radio, otherwise the 2.4 GHz radio.
pub fn associate(device: &ClientDevice, ap: &AccessPoint) -> Result<Association, NetError> {
    let wants_5ghz = device.wifi_tech.iter().any(|t| t.supports(Band::Ghz5));
    if wants_5ghz {
        if let Some(ch) = ap.channel(Band::Ghz5) {
            return Ok(Association { ap_id: ap.id.clone(), channel: *ch });
        }
    }
    let can_2_4 = device.wifi_tech.iter().any(|t| t.supports(Band::Ghz2_4));
    match (can_2_4, ap.channel(Band::Ghz2_4)) {
        (true, Some(ch)) => Ok(Association { ap_id: ap.id.clone(), channel: *ch }),
        _ => Err(NetError::IncompatibleTech),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dev(mac: &str) -> ClientDevice {
        ClientDevice::sample(mac.parse().unwrap(), "350000000000001", &[WifiTech::N])
    }

    #[test]
    fn dhcp_copies_gateway_and_suffix_from_pool() {
        let net = CampusNetwork::default_campus();
        let mut srv = DhcpServer::new(&net);
        let a = srv.assign(&dev("00:1b:44:11:3a:b7"), 0).unwrap();
        assert_eq!(a.gateway, Ipv4Addr::new(10, 9, 0, 5));
        assert_eq!(a.dns_suffix, "knust.edu.gh");
        assert!(net.dhcp.cidr.contains(a.v4));
        assert_ne!(a.v4, a.gateway);
    }

    #[test]
    fn dhcp_renewal_is_idempotent() {
        let net = CampusNetwork::default_campus();
        let mut srv = DhcpServer::new(&net);
        let d = dev("00:1b:44:11:3a:b7");
        let first = srv.assign(&d, 0).unwrap();
        let renewed = srv.assign(&d, 100).unwrap();
        assert_eq!(first.v4, renewed.v4);
    }

    #[test]
    fn dhcp_pool_exhaustion() {
        let mut net = CampusNetwork::default_campus();
        net.dhcp.cidr = "10.0.0.0/30".parse().unwrap(); // two usable hosts
        let mut srv = DhcpServer::new(&net);
        srv.assign(&dev("00:00:00:00:00:01"), 0).unwrap();
        srv.assign(&dev("00:00:00:00:00:02"), 0).unwrap();
        assert_eq!(srv.assign(&dev("00:00:00:00:00:03"), 0), Err(NetError::PoolExhausted));
    }

    #[test]
    fn dhcp_skips_gateway_address() {
        let mut net = CampusNetwork::default_campus();
        net.dhcp.cidr = "10.9.0.0/29".parse().unwrap();
        net.dhcp.gateway = Ipv4Addr::new(10, 9, 0, 1);
        let mut srv = DhcpServer::new(&net);
        let a = srv.assign(&dev("00:00:00:00:00:01"), 0).unwrap();
        assert_eq!(a.v4, Ipv4Addr::new(10, 9, 0, 2));
    }

    #[test]
    fn dhcp_reuses_expired_leases() {
        let mut net = CampusNetwork::default_campus();
        net.dhcp.cidr = "10.0.0.0/30".parse().unwrap();
        net.dhcp.lease_s = 100;
        let mut srv = DhcpServer::new(&net);
        srv.assign(&dev("00:00:00:00:00:01"), 0).unwrap();
        srv.assign(&dev("00:00:00:00:00:02"), 0).unwrap();
        // both leases expire at t=100
        let a = srv.assign(&dev("00:00:00:00:00:03"), 100).unwrap();
        assert_eq!(a.v4, Ipv4Addr::new(10, 0, 0, 1));
    }

    #[test]
    fn slaac_matches_eui64_expansion() {
        let d = dev("00:1b:44:11:3a:b7");
        let prefix: Ipv6Prefix = "2001:db8::/64".parse().unwrap();
        let addr = slaac_assign(&d, prefix).unwrap();
        assert_eq!(addr, "2001:db8::21b:44ff:fe11:3ab7".parse::<Ipv6Addr>().unwrap());
    }

    #[test]
    fn slaac_flips_local_bit_both_ways() {
        let d = dev("02:00:00:00:00:01");
        let prefix: Ipv6Prefix = "2001:db8::/64".parse().unwrap();
        let addr = slaac_assign(&d, prefix).unwrap();
        assert_eq!(addr, "2001:db8::ff:fe00:1".parse::<Ipv6Addr>().unwrap());
    }

    #[test]
    fn slaac_rejects_v4only_devices() {
        let mut d = dev("00:1b:44:11:3a:b7");
        d.ip_support = IpSupport::V4Only;
        let prefix: Ipv6Prefix = "2001:db8::/64".parse().unwrap();
        assert_eq!(slaac_assign(&d, prefix), Err(NetError::UnsupportedDevice));
    }

    #[test]
    fn slaac_round_trips_back_to_mac() {
        let mac: MacAddr = "a4:5e:60:e2:75:4f".parse().unwrap();
        let d = ClientDevice::sample(mac, "1", &[WifiTech::N]);
        let prefix: Ipv6Prefix = "fd00::/64".parse().unwrap();
        let addr = slaac_assign(&d, prefix).unwrap();
        assert_eq!(mac_from_slaac(addr), Some(mac));
    }

    #[test]
    fn associate_prefers_5ghz_for_modern_clients() {
        let ap = AccessPoint::dual("ap", 300.0, "WIFI-KNUST", SecurityMode::Open);
        let d = ClientDevice::sample("00:00:00:00:00:01".parse().unwrap(), "1", &[WifiTech::N]);
        assert_eq!(associate(&d, &ap).unwrap().channel.band, Band::Ghz5);
    }

    #[test]
    fn associate_falls_back_to_2_4ghz_for_legacy_clients() {
        let ap = AccessPoint::dual("ap", 300.0, "WIFI-KNUST", SecurityMode::Open);
        let d = ClientDevice::sample("00:00:00:00:00:01".parse().unwrap(), "1", &[WifiTech::B]);
        assert_eq!(associate(&d, &ap).unwrap().channel.band, Band::Ghz2_4);
    }

    #[test]
    fn associate_rejects_band_mismatch() {
        let mut ap = AccessPoint::dual("ap", 300.0, "WIFI-KNUST", SecurityMode::Open);
        ap.channels.retain(|c| c.band == Band::Ghz2_4);
        let d = ClientDevice::sample("00:00:00:00:00:01".parse().unwrap(), "1", &[WifiTech::A]);
        assert_eq!(associate(&d, &ap), Err(NetError::IncompatibleTech));
    }

    #[test]
    fn topology_json_round_trip() {
        let json = r#"{
            "wan_mbps": 144.0,
            "dhcp": {"cidr": "10.9.0.0/16", "gateway": "10.9.0.5",
                     "dns_suffix": "knust.edu.gh", "lease_s": 3600},
            "v6_prefix": "2001:db8::/64",
            "host_isolation": false,
            "aps": [{"id": "ap-1", "kind": "Autonomous", "tier": 1,
                     "channels": [{"band": "2.4GHz", "mbps": 300.0},
                                  {"band": "5GHz", "mbps": 300.0}],
                     "ssid": "WIFI-KNUST", "security": "Open", "location": "lecture hall"}]
        }"#;
        let net = load_topology(json).unwrap();
        assert_eq!(net.aps.len(), 1);
        let back = serde_json::to_string(&net).unwrap();
        let reparsed = load_topology(&back).unwrap();
        assert_eq!(net, reparsed);
    }

    #[test]
    fn topology_rejects_misplaced_lightweight_ap() {
        let mut net = CampusNetwork::default_campus();
        net.aps[0].kind = ApKind::Lightweight;
        net.aps[0].tier = 1;
        assert!(matches!(net.validate(), Err(NetError::InvalidTopology(_))));
    }
}
