//! NAC + MDM core: device registration per owner, posture assessment
//! gating, and device-bound certificate issuance and verification.
//!
//! Certificates bind to a fingerprint of the device's MAC and IMEI and
//! carry a keyed MAC tag, so a certificate copied to another device fails
//! verification as `WrongDevice` and a tampered one as `Forged`.

use std::collections::{BTreeMap, BTreeSet};

use base64::Engine as _;
use hmac::{Hmac, Mac};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::net_model::{ClientDevice, MacAddr};

type HmacSha256 = Hmac<Sha256>;

const FINGERPRINT_DOMAIN: &str = "byod-cert-v1";

pub const DEFAULT_DEVICE_LIMIT: usize = 3;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AccessError {
    #[error("owner not present in the directory")]
    UnknownOwner,
    #[error("owner already holds the maximum number of registered devices")]
    DeviceLimitReached,
    #[error("MAC address already registered to a different owner")]
    MacAlreadyRegistered,
    #[error("device record not found")]
    NotFound,
    #[error("device belongs to a different owner")]
    NotOwner,
    #[error("device has not been cleared by posture assessment")]
    NotCleared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Deficiency {
    OutdatedAntivirus,
    DiscontinuedOs,
    CompromisedDriver,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeviceStatus {
    Unassessed,
    Blocked(Vec<Deficiency>),
    Cleared,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IpHistoryEntry {
    pub address: String,
    pub first_seen: u64,
    pub last_seen: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceRecord {
    pub device: ClientDevice,
    pub owner: String,
    pub status: DeviceStatus,
    pub registered_at: u64,
    pub ip_history: Vec<IpHistoryEntry>,
}

/// Thresholds a device must meet before the NAC clears it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostureRules {
    pub max_av_definition_age_days: u64,
    /// (os name, version) pairs no longer receiving support.
    pub discontinued_os: BTreeSet<(String, String)>,
    /// (vendor, version) pairs of known-compromised drivers.
    pub banned_drivers: BTreeSet<(String, String)>,
}

impl Default for PostureRules {
    fn default() -> Self {
        PostureRules {
            max_av_definition_age_days: 30,
            discontinued_os: [("Windows XP".to_string(), "SP3".to_string())].into(),
            banned_drivers: BTreeSet::new(),
        }
    }
}

/// What the latest assessment entitles the device to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AccessLevel {
    /// Only DHCP/DNS-to-portal traffic permitted.
    NetworkOnly,
    FullPipeline,
}

/// Device-bound, expiring credential.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    /// Hex digest of the canonical MAC ‖ IMEI string.
    pub device_fingerprint: String,
    pub issued_at: u64,
    pub expires_at: u64,
    /// Base64 keyed-MAC tag over the other fields.
    pub tag: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertVerdict {
    Valid,
    Expired,
    WrongDevice,
    Forged,
    Revoked,
}

/// Issuer secret for certificate tags.
#[derive(Clone)]
pub struct ServerKey(pub Vec<u8>);

pub fn device_fingerprint(mac: MacAddr, imei: &str) -> String {
    let mut h = Sha256::new();
    h.update(FINGERPRINT_DOMAIN.as_bytes());
    h.update(b"|");
    h.update(mac.to_string().as_bytes());
    h.update(b"|");
    h.update(imei.as_bytes());
    hex::encode(h.finalize())
}

fn tag_input(fingerprint: &str, issued_at: u64, expires_at: u64) -> String {
    format!("{fingerprint}|{issued_at}|{expires_at}")
}

fn compute_tag(key: &ServerKey, fingerprint: &str, issued_at: u64, expires_at: u64) -> String {
    let mut mac = HmacSha256::new_from_slice(&key.0).expect("HMAC accepts any key length");
    mac.update(tag_input(fingerprint, issued_at, expires_at).as_bytes());
    base64::engine::general_purpose::STANDARD.encode(mac.finalize().into_bytes())
}

/// Issue a certificate for an already-cleared device record.
pub fn issue_certificate(
    record: &DeviceRecord,
    key: &ServerKey,
    validity_seconds: u64,
    now: u64,
) -> Result<Certificate, AccessError> {
    if record.status != DeviceStatus::Cleared {
        return Err(AccessError::NotCleared);
    }
    let fingerprint = device_fingerprint(record.device.mac, &record.device.serial_imei);
    let expires_at = now + validity_seconds;
    let tag = compute_tag(key, &fingerprint, now, expires_at);
    Ok(Certificate { device_fingerprint: fingerprint, issued_at: now, expires_at, tag })
}

/// Verification order: tag, revocation, expiry, device binding.
pub fn verify_certificate(
    cert: &Certificate,
    presenting_mac: MacAddr,
    presenting_imei: &str,
    key: &ServerKey,
    revoked: &BTreeSet<String>,
    now: u64,
) -> CertVerdict {
    let expected =
        compute_tag(key, &cert.device_fingerprint, cert.issued_at, cert.expires_at);
    if expected != cert.tag {
        return CertVerdict::Forged;
    }
    if revoked.contains(&cert.device_fingerprint) {
        return CertVerdict::Revoked;
    }
    if now > cert.expires_at {
        return CertVerdict::Expired;
    }
    if device_fingerprint(presenting_mac, presenting_imei) != cert.device_fingerprint {
        return CertVerdict::WrongDevice;
    }
    CertVerdict::Valid
}

/// MDM registry: owners, their device records, and the revocation list.
/// Mutations are single-writer; callers serialize externally.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Registry {
    pub device_limit: usize,
    /// Owners known to the directory.
    pub owners: BTreeSet<String>,
    records: BTreeMap<MacAddr, DeviceRecord>,
    revoked: BTreeSet<String>,
}

impl Default for Registry {
    fn default() -> Self {
        Registry {
            device_limit: DEFAULT_DEVICE_LIMIT,
            owners: BTreeSet::new(),
            records: BTreeMap::new(),
            revoked: BTreeSet::new(),
        }
    }
}

impl Registry {
    pub fn new(device_limit: usize) -> Self {
        Registry { device_limit, ..Default::default() }
    }

    pub fn add_owner(&mut self, owner: &str) {
        self.owners.insert(owner.to_string());
    }

    pub fn record(&self, mac: MacAddr) -> Option<&DeviceRecord> {
        self.records.get(&mac)
    }

    pub fn records(&self) -> impl Iterator<Item = &DeviceRecord> {
        self.records.values()
    }

    pub fn revoked(&self) -> &BTreeSet<String> {
        &self.revoked
    }

    pub fn is_registered(&self, mac: MacAddr) -> bool {
        self.records.contains_key(&mac)
    }

    pub fn register_device(
        &mut self,
        owner: &str,
        device: ClientDevice,
        now: u64,
    ) -> Result<&DeviceRecord, AccessError> {
        if !self.owners.contains(owner) {
            return Err(AccessError::UnknownOwner);
        }
        if let Some(existing) = self.records.get(&device.mac) {
            if existing.owner != owner {
                return Err(AccessError::MacAlreadyRegistered);
            }
        }
        let owned = self.records.values().filter(|r| r.owner == owner).count();
        if !self.records.contains_key(&device.mac) && owned >= self.device_limit {
            return Err(AccessError::DeviceLimitReached);
        }
        let mac = device.mac;
        let record = DeviceRecord {
            device,
            owner: owner.to_string(),
            status: DeviceStatus::Unassessed,
            registered_at: now,
            ip_history: Vec::new(),
        };
        self.records.insert(mac, record);
        Ok(&self.records[&mac])
    }

    /// Remove a device and revoke any certificate bound to it.
    pub fn remove_device(&mut self, owner: &str, device_id: &str) -> Result<(), AccessError> {
        let mac: MacAddr = device_id.parse().map_err(|_| AccessError::NotFound)?;
        let record = self.records.get(&mac).ok_or(AccessError::NotFound)?;
        if record.owner != owner {
            return Err(AccessError::NotOwner);
        }
        let fp = device_fingerprint(record.device.mac, &record.device.serial_imei);
        self.revoked.insert(fp);
        self.records.remove(&mac);
        Ok(())
    }

    /// Evaluate the posture rules and update the record's status.
    pub fn assess_posture(
        &mut self,
        mac: MacAddr,
        rules: &PostureRules,
        now: u64,
    ) -> Result<DeviceStatus, AccessError> {
        let record = self.records.get_mut(&mac).ok_or(AccessError::NotFound)?;
        let status = evaluate_posture(&record.device, rules, now);
        record.status = status.clone();
        Ok(status)
    }

    /// Record an address observation for the device's IP history.
    pub fn record_ip(&mut self, mac: MacAddr, address: &str, now: u64) {
        if let Some(record) = self.records.get_mut(&mac) {
            match record.ip_history.last_mut() {
                Some(last) if last.address == address => last.last_seen = now,
                _ => record.ip_history.push(IpHistoryEntry {
                    address: address.to_string(),
                    first_seen: now,
                    last_seen: now,
                }),
            }
        }
    }

    pub fn verify_certificate(
        &self,
        cert: &Certificate,
        presenting_mac: MacAddr,
        presenting_imei: &str,
        key: &ServerKey,
        now: u64,
    ) -> CertVerdict {
        verify_certificate(cert, presenting_mac, presenting_imei, key, &self.revoked, now)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("registry serializes")
    }

    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }
}

/// Pure posture check: every violated rule is listed.
pub fn evaluate_posture(device: &ClientDevice, rules: &PostureRules, now: u64) -> DeviceStatus {
    let mut deficiencies = Vec::new();
    let av_age = now.saturating_sub(device.antivirus.definitions_date);
    if av_age > rules.max_av_definition_age_days * 86_400 {
        deficiencies.push(Deficiency::OutdatedAntivirus);
    }
    let os_key = (device.os.name.clone(), device.os.version.clone());
    if rules.discontinued_os.contains(&os_key) {
        deficiencies.push(Deficiency::DiscontinuedOs);
    }
    if device
        .drivers
        .iter()
        .any(|d| rules.banned_drivers.contains(&(d.vendor.clone(), d.version.clone())))
    {
        deficiencies.push(Deficiency::CompromisedDriver);
    }
    if deficiencies.is_empty() {
        DeviceStatus::Cleared
    } else {
        DeviceStatus::Blocked(deficiencies)
    }
}

/// Network privileges implied by the record's current status.
pub fn nac_gate(record: &DeviceRecord) -> AccessLevel {
    match record.status {
        DeviceStatus::Cleared => AccessLevel::FullPipeline,
        _ => AccessLevel::NetworkOnly,
    }
}
