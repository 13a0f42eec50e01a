//! Append-only audit log keyed by the five authentication facets:
//! who is on the network, what they are using, where, when, and what they
//! can do. Persisted as JSON lines, one record per line, with simple
//! suspicion heuristics over the event stream.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::net::Ipv4Addr;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::access_control::AccessLevel;
use crate::net_model::MacAddr;

#[derive(Debug, Error)]
pub enum AuditError {
    #[error("storage failure: {0}")]
    StorageFailure(#[from] std::io::Error),
    #[error("corrupt log line {line}: {reason}")]
    Corrupt { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EventKind {
    Connect,
    Disconnect,
    DhcpLease,
    LoginOk,
    LoginFail,
    SessionExpire,
    Logout,
    PostureBlock,
    CertReject,
    PolicyDeny,
    Redirect,
}

/// The "what are they using" facet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct WhatFacet {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub device_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mac: Option<MacAddr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ip: Option<Ipv4Addr>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Traffic {
    pub bytes_up: u64,
    pub bytes_down: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub seq: u64,
    pub when: u64,
    /// Pre-login events carry no user.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub who: Option<String>,
    #[serde(default)]
    pub what: WhatFacet,
    /// AP id or switch port.
    #[serde(rename = "where", skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
    pub event: EventKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub access_level: Option<AccessLevel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub traffic: Option<Traffic>,
    /// Certificate fingerprint, on certificate-related events.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fingerprint: Option<String>,
}

/// Everything of a record except the seq number, which the log assigns.
#[derive(Debug, Clone, Default)]
pub struct RecordDraft {
    pub when: u64,
    pub who: Option<String>,
    pub what: WhatFacet,
    pub location: Option<String>,
    pub event: Option<EventKind>,
    pub access_level: Option<AccessLevel>,
    pub traffic: Option<Traffic>,
    pub fingerprint: Option<String>,
}

impl RecordDraft {
    pub fn new(event: EventKind, when: u64) -> Self {
        RecordDraft { when, event: Some(event), ..Default::default() }
    }

    pub fn who(mut self, who: &str) -> Self {
        self.who = Some(who.to_string());
        self
    }

    pub fn device(mut self, device_id: &str, mac: MacAddr) -> Self {
        self.what.device_id = Some(device_id.to_string());
        self.what.mac = Some(mac);
        self
    }

    pub fn ip(mut self, ip: Ipv4Addr) -> Self {
        self.what.ip = Some(ip);
        self
    }

    pub fn location(mut self, loc: &str) -> Self {
        self.location = Some(loc.to_string());
        self
    }

    pub fn access_level(mut self, level: AccessLevel) -> Self {
        self.access_level = Some(level);
        self
    }

    pub fn traffic(mut self, bytes_up: u64, bytes_down: u64) -> Self {
        self.traffic = Some(Traffic { bytes_up, bytes_down });
        self
    }

    pub fn fingerprint(mut self, fp: &str) -> Self {
        self.fingerprint = Some(fp.to_string());
        self
    }
}

/// Append-only log. Records are durable (written and flushed) before
/// `append` returns when a file sink is attached.
pub struct AuditLog {
    records: Vec<AuditRecord>,
    sink: Option<File>,
}

impl AuditLog {
    pub fn in_memory() -> Self {
        AuditLog { records: Vec::new(), sink: None }
    }

    /// Open (or create) a file-backed log, loading any existing records.
    pub fn open(path: &Path) -> Result<Self, AuditError> {
        let mut records = Vec::new();
        if path.exists() {
            let reader = BufReader::new(File::open(path)?);
            for (i, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: AuditRecord = serde_json::from_str(&line)
                    .map_err(|e| AuditError::Corrupt { line: i + 1, reason: e.to_string() })?;
                records.push(rec);
            }
        }
        let sink = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(AuditLog { records, sink: Some(sink) })
    }

    pub fn append(&mut self, draft: RecordDraft) -> Result<&AuditRecord, AuditError> {
        let seq = self.records.last().map_or(1, |r| r.seq + 1);
        let record = AuditRecord {
            seq,
            when: draft.when,
            who: draft.who,
            what: draft.what,
            location: draft.location,
            event: draft.event.expect("draft carries an event kind"),
            access_level: draft.access_level,
            traffic: draft.traffic,
            fingerprint: draft.fingerprint,
        };
        if let Some(sink) = &mut self.sink {
            let line = serde_json::to_string(&record).expect("record serializes");
            writeln!(sink, "{line}")?;
            sink.flush()?;
        }
        self.records.push(record);
        Ok(self.records.last().unwrap())
    }

    pub fn records(&self) -> &[AuditRecord] {
        &self.records
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn query(&self, filter: &QueryFilter) -> Vec<&AuditRecord> {
        self.records.iter().filter(|r| filter.matches(r)).collect()
    }
}

#[derive(Debug, Clone, Default)]
pub struct QueryFilter {
    pub who: Option<String>,
    pub device: Option<String>,
    pub location: Option<String>,
    pub from: Option<u64>,
    pub to: Option<u64>,
    pub events: Option<BTreeSet<EventKind>>,
}

impl QueryFilter {
    fn matches(&self, r: &AuditRecord) -> bool {
        if let Some(who) = &self.who {
            if r.who.as_deref() != Some(who.as_str()) {
                return false;
            }
        }
        if let Some(device) = &self.device {
            if r.what.device_id.as_deref() != Some(device.as_str()) {
                return false;
            }
        }
        if let Some(loc) = &self.location {
            if r.location.as_deref() != Some(loc.as_str()) {
                return false;
            }
        }
        if let Some(from) = self.from {
            if r.when < from {
                return false;
            }
        }
        if let Some(to) = self.to {
            if r.when > to {
                return false;
            }
        }
        if let Some(events) = &self.events {
            if !events.contains(&r.event) {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SuspicionKind {
    CertCloneAttempt,
    LoginFailBurst,
    UnregisteredMac,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuspicionFlag {
    pub kind: SuspicionKind,
    /// Device or user id.
    pub subject: String,
    /// Seq numbers of the records backing the flag.
    pub evidence: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct SuspicionThresholds {
    /// LoginFail count per user that triggers a burst flag.
    pub login_fail_burst: usize,
    /// When known, DHCP leases to MACs outside this set are flagged.
    pub registered_macs: Option<BTreeSet<MacAddr>>,
}

impl Default for SuspicionThresholds {
    fn default() -> Self {
        SuspicionThresholds { login_fail_burst: 5, registered_macs: None }
    }
}

/// Scan the log for the misuse patterns: one certificate fingerprint
/// presented from two MACs inside the window, login-failure bursts, and
/// (when a registry is supplied) leases to unregistered MACs.
pub fn detect_suspicion(
    records: &[AuditRecord],
    window_s: u64,
    thresholds: &SuspicionThresholds,
) -> Vec<SuspicionFlag> {
    let mut flags = Vec::new();

    // CertCloneAttempt: fingerprint seen from >= 2 distinct MACs within the window
    let mut by_fp: BTreeMap<&str, Vec<&AuditRecord>> = BTreeMap::new();
    for r in records {
        if let (Some(fp), Some(_)) = (&r.fingerprint, &r.what.mac) {
            by_fp.entry(fp).or_default().push(r);
        }
    }
    for (fp, events) in by_fp {
        let mut evidence = BTreeSet::new();
        for a in &events {
            for b in &events {
                if a.seq < b.seq
                    && a.what.mac != b.what.mac
                    && b.when.saturating_sub(a.when) <= window_s
                {
                    evidence.insert(a.seq);
                    evidence.insert(b.seq);
                }
            }
        }
        if !evidence.is_empty() {
            flags.push(SuspicionFlag {
                kind: SuspicionKind::CertCloneAttempt,
                subject: fp.to_string(),
                evidence: evidence.into_iter().collect(),
            });
        }
    }

    // LoginFailBurst: >= threshold failures for one user within the window
    let mut fails: BTreeMap<&str, Vec<&AuditRecord>> = BTreeMap::new();
    for r in records {
        if r.event == EventKind::LoginFail {
            if let Some(who) = &r.who {
                fails.entry(who).or_default().push(r);
            }
        }
    }
    for (who, events) in fails {
        let n = thresholds.login_fail_burst;
        if n == 0 {
            continue;
        }
        let mut flagged: Option<Vec<u64>> = None;
        for start in 0..events.len() {
            let end = start + n - 1;
            if end < events.len()
                && events[end].when.saturating_sub(events[start].when) <= window_s
            {
                flagged = Some(events[start..=end].iter().map(|r| r.seq).collect());
                break;
            }
        }
        if let Some(evidence) = flagged {
            flags.push(SuspicionFlag {
                kind: SuspicionKind::LoginFailBurst,
                subject: who.to_string(),
                evidence,
            });
        }
    }

    // UnregisteredMac: leases handed to MACs the registry does not know
    if let Some(known) = &thresholds.registered_macs {
        let mut by_mac: BTreeMap<MacAddr, Vec<u64>> = BTreeMap::new();
        for r in records {
            if r.event == EventKind::DhcpLease {
                if let Some(mac) = r.what.mac {
                    if !known.contains(&mac) {
                        by_mac.entry(mac).or_default().push(r.seq);
                    }
                }
            }
        }
        for (mac, evidence) in by_mac {
            flags.push(SuspicionFlag {
                kind: SuspicionKind::UnregisteredMac,
                subject: mac.to_string(),
                evidence,
            });
        }
    }

    flags
}
