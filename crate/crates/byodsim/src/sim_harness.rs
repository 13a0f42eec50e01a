//! Deterministic discrete-event simulation: clients move through
//! connect → DHCP → NAC → onboarding → portal → browsing under a chosen
//! policy, with the four security-risk probes available as standalone
//! checks.
//!
//! A run is fully determined by the scenario plus its seed: one seeded
//! generator supplies all randomness and events are ordered by
//! (simulated time, insertion seq).

use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::cmp::Reverse;
use std::net::Ipv4Addr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::access_control::{
    self, AccessLevel, CertVerdict, Certificate, DeviceStatus, PostureRules, Registry, ServerKey,
};
use crate::audit_log::{AuditLog, EventKind, RecordDraft, SuspicionFlag, SuspicionThresholds};
use crate::capacity_model::{airtime_share, effective_ap_throughput, ClientLoad, DegradationFactors};
use crate::captive_portal::{Credentials, Directory, GatewayState, Intercept, PortalError};
use crate::net_model::{
    associate, CampusNetwork, ClientDevice, DhcpServer, MacAddr, SecurityMode, WifiTech,
};
use crate::policy_engine::{
    apply_cap, evaluate_request, preset, AccessRequest, PolicyConfig, PolicyVersion, Protocol,
    Verdict,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Venue {
    Classroom,
    LectureHall,
    PublicVenue,
}

impl Venue {
    /// User-density band for the venue type.
    pub fn client_band(self) -> (usize, usize) {
        match self {
            Venue::Classroom => (10, 500),
            Venue::LectureHall => (20, 1000),
            Venue::PublicVenue => (100, 2000),
        }
    }
}

/// Composition of the simulated client fleet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClientMix {
    /// Fraction of clients with 802.11n radios (the rest are b/g-only).
    #[serde(default = "one")]
    pub dual_band_frac: f64,
    /// Fraction of clients that fail posture assessment.
    #[serde(default)]
    pub bad_posture_frac: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for ClientMix {
    fn default() -> Self {
        ClientMix { dual_band_frac: 1.0, bad_posture_frac: 0.0 }
    }
}

/// Policy selection: a historical version tag, the proposed design, or an
/// inline config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolicyChoice {
    Named(String),
    Custom(PolicyConfig),
}

impl PolicyChoice {
    pub fn resolve(&self) -> Result<PolicyConfig, SimError> {
        match self {
            PolicyChoice::Custom(c) => Ok(c.clone()),
            PolicyChoice::Named(name) if name.eq_ignore_ascii_case("proposed") => {
                Ok(PolicyConfig::proposed_design())
            }
            PolicyChoice::Named(name) => name
                .parse::<PolicyVersion>()
                .map(preset)
                .map_err(SimError::InvalidScenario),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProbeKind {
    OutsiderJoin,
    Eavesdrop,
    Discovery,
    CertClone,
}

pub const DEFAULT_BROWSE_INTERVAL_S: u64 = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub venue: Venue,
    pub n_clients: usize,
    #[serde(default)]
    pub client_mix: ClientMix,
    pub policy: PolicyChoice,
    #[serde(default)]
    pub factors: DegradationFactors,
    /// Simulated seconds.
    pub duration: u64,
    pub seed: u64,
    #[serde(default)]
    pub probes: BTreeSet<ProbeKind>,
    /// Topology override; the default campus is used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<CampusNetwork>,
    #[serde(default = "default_browse_interval")]
    pub browse_interval_s: u64,
}

fn default_browse_interval() -> u64 {
    DEFAULT_BROWSE_INTERVAL_S
}

impl Scenario {
    pub fn validate(&self) -> Result<(), SimError> {
        let (lo, hi) = self.venue.client_band();
        if !(lo..=hi).contains(&self.n_clients) {
            return Err(SimError::InvalidScenario(format!(
                "n_clients {} outside venue band [{lo}, {hi}]",
                self.n_clients
            )));
        }
        self.factors.validate().map_err(|e| SimError::InvalidScenario(e.to_string()))?;
        let policy = self.policy.resolve()?;
        policy.validate().map_err(SimError::InvalidScenario)?;
        if self.browse_interval_s == 0 {
            return Err(SimError::InvalidScenario("browse_interval_s must be positive".into()));
        }
        if let Some(net) = &self.network {
            net.validate().map_err(|e| SimError::InvalidScenario(e.to_string()))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThroughputStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbeOutcome {
    Succeeded,
    Prevented,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Metrics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_client_throughput: Option<ThroughputStats>,
    pub login_success: u64,
    pub login_fail: u64,
    pub relogin_events: u64,
    pub blocked_devices: u64,
    pub redirects: u64,
    pub probe_outcomes: BTreeMap<ProbeKind, ProbeOutcome>,
}

pub struct SimOutput {
    pub metrics: Metrics,
    pub audit_jsonl: String,
    pub suspicion: Vec<SuspicionFlag>,
}

#[derive(Debug, PartialEq, Eq, PartialOrd, Ord)]
enum EvKind {
    Connect(usize),
    Browse(usize),
}

#[derive(Debug, PartialEq, Eq, PartialOrd, Ord)]
struct QEvent {
    time: u64,
    seq: u64,
    kind: EvKind,
}

struct SimClient {
    device: ClientDevice,
    owner: String,
    password: String,
    ip: Option<Ipv4Addr>,
    ap_index: usize,
    phy_rate: f64,
    blocked: bool,
    cert: Option<Certificate>,
    logged_in_before: bool,
    online: bool,
    bytes_up: u64,
    bytes_down: u64,
}

struct Sim<'a> {
    scenario: &'a Scenario,
    policy: PolicyConfig,
    network: CampusNetwork,
    dhcp: DhcpServer,
    gateway: GatewayState,
    directory: Directory,
    registry: Registry,
    rules: PostureRules,
    key: ServerKey,
    clients: Vec<SimClient>,
    log: AuditLog,
    metrics: Metrics,
    rng: ChaCha8Rng,
    event_seq: u64,
    queue: BinaryHeap<Reverse<QEvent>>,
}

const BROWSE_DOMAINS: [&str; 5] =
    ["example.com", "youtube.com", "news.example", "files.example", "knust.edu.gh"];

fn client_mac(i: usize) -> MacAddr {
    // locally administered, unique per index
    MacAddr([0x02, 0x00, 0x5e, (i >> 16) as u8, (i >> 8) as u8, i as u8])
}

impl<'a> Sim<'a> {
    fn new(scenario: &'a Scenario) -> Result<Self, SimError> {
        let policy = scenario.policy.resolve()?;
        let network = scenario.network.clone().unwrap_or_else(CampusNetwork::default_campus);
        let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
        let mut directory = Directory::default();
        let mut registry = Registry::new(usize::MAX); // per-owner limit is irrelevant here
        let mut clients = Vec::with_capacity(scenario.n_clients);
        for i in 0..scenario.n_clients {
            let owner = format!("student-{i:04}");
            let password = format!("pw-{i:04}");
            directory.add_student(&owner, &password, &format!("REF-{i:04}"));
            registry.add_owner(&owner);
            let dual = rng.gen_bool(scenario.client_mix.dual_band_frac.clamp(0.0, 1.0));
            let bad = rng.gen_bool(scenario.client_mix.bad_posture_frac.clamp(0.0, 1.0));
            let tech: &[WifiTech] =
                if dual { &[WifiTech::N] } else { &[WifiTech::B, WifiTech::G] };
            let mut device =
                ClientDevice::sample(client_mac(i), &format!("35{i:012}"), tech);
            if bad {
                device.os.name = "Windows XP".into();
                device.os.version = "SP3".into();
            }
            let ap_index = i % network.aps.len();
            let phy_rate = associate(&device, &network.aps[ap_index])
                .map(|a| a.channel.raw_rate_mbps)
                .unwrap_or(1.0);
            clients.push(SimClient {
                device,
                owner,
                password,
                ip: None,
                ap_index,
                phy_rate,
                blocked: false,
                cert: None,
                logged_in_before: false,
                online: false,
                bytes_up: 0,
                bytes_down: 0,
            });
        }
        Ok(Sim {
            scenario,
            policy,
            dhcp: DhcpServer::new(&network),
            network,
            gateway: GatewayState::default(),
            directory,
            registry,
            rules: PostureRules::default(),
            key: ServerKey(scenario.seed.to_le_bytes().to_vec()),
            clients,
            log: AuditLog::in_memory(),
            metrics: Metrics::default(),
            rng,
            event_seq: 0,
            queue: BinaryHeap::new(),
        })
    }

    fn schedule(&mut self, time: u64, kind: EvKind) {
        self.event_seq += 1;
        self.queue.push(Reverse(QEvent { time, seq: self.event_seq, kind }));
    }

    fn append(&mut self, draft: RecordDraft) {
        self.log.append(draft).expect("in-memory log cannot fail");
    }

    fn expire_sessions(&mut self, now: u64) {
        for s in self.gateway.expire_sessions(now) {
            self.append(
                RecordDraft::new(EventKind::SessionExpire, now).who(&s.user).ip(s.device_ip),
            );
        }
    }

    fn do_login(&mut self, i: usize, now: u64) {
        let client = &self.clients[i];
        let ip = client.ip.expect("login requires an address");
        let mac = client.device.mac;
        let device_id = client.device.device_id.clone();
        let creds = Credentials {
            student_id: client.owner.clone(),
            password: client.password.clone(),
            reference: None,
        };
        let cert_check = if self.policy.nac_enabled {
            client.cert.as_ref().map(|c| {
                self.registry.verify_certificate(
                    c,
                    mac,
                    &client.device.serial_imei,
                    &self.key,
                    now,
                )
            })
        } else {
            None
        };
        let fingerprint = self.clients[i].cert.as_ref().map(|c| c.device_fingerprint.clone());
        let result = self.gateway.login(
            &self.directory,
            &creds,
            ip,
            mac,
            cert_check,
            &self.policy,
            now,
        );
        match result {
            Ok(session) => {
                let mut draft = RecordDraft::new(EventKind::LoginOk, now)
                    .who(&session.user)
                    .device(&device_id, mac)
                    .ip(ip)
                    .access_level(AccessLevel::FullPipeline);
                if let Some(fp) = &fingerprint {
                    draft = draft.fingerprint(fp);
                }
                self.append(draft);
                self.metrics.login_success += 1;
                if self.clients[i].logged_in_before {
                    self.metrics.relogin_events += 1;
                }
                self.clients[i].logged_in_before = true;
            }
            Err(PortalError::CertificateRejected) => {
                let mut draft = RecordDraft::new(EventKind::CertReject, now)
                    .who(&self.clients[i].owner)
                    .device(&device_id, mac)
                    .ip(ip);
                if let Some(fp) = &fingerprint {
                    draft = draft.fingerprint(fp);
                }
                self.append(draft);
            }
            Err(_) => {
                self.append(
                    RecordDraft::new(EventKind::LoginFail, now)
                        .who(&self.clients[i].owner)
                        .device(&device_id, mac)
                        .ip(ip),
                );
                self.metrics.login_fail += 1;
            }
        }
    }

    fn on_connect(&mut self, i: usize, now: u64) {
        let ap_id = self.network.aps[self.clients[i].ap_index].id.clone();
        let device_id = self.clients[i].device.device_id.clone();
        let mac = self.clients[i].device.mac;
        self.append(
            RecordDraft::new(EventKind::Connect, now).device(&device_id, mac).location(&ap_id),
        );

        let assignment = match self.dhcp.assign(&self.clients[i].device, now) {
            Ok(a) => a,
            Err(_) => return, // pool exhausted: client stays offline
        };
        self.clients[i].ip = Some(assignment.v4);
        self.clients[i].online = true;
        self.append(
            RecordDraft::new(EventKind::DhcpLease, now)
                .device(&device_id, mac)
                .ip(assignment.v4)
                .location(&ap_id),
        );

        if self.policy.nac_enabled {
            let owner = self.clients[i].owner.clone();
            let device = self.clients[i].device.clone();
            self.registry.register_device(&owner, device, now).expect("owner exists");
            self.registry.record_ip(mac, &assignment.v4.to_string(), now);
            let status = self.registry.assess_posture(mac, &self.rules, now).unwrap();
            match status {
                DeviceStatus::Cleared => {
                    let record = self.registry.record(mac).unwrap();
                    let cert = access_control::issue_certificate(
                        record,
                        &self.key,
                        30 * 86_400,
                        now,
                    )
                    .expect("cleared device");
                    self.clients[i].cert = Some(cert);
                }
                _ => {
                    self.clients[i].blocked = true;
                    self.metrics.blocked_devices += 1;
                    self.append(
                        RecordDraft::new(EventKind::PostureBlock, now)
                            .who(&self.clients[i].owner)
                            .device(&device_id, mac)
                            .ip(assignment.v4)
                            .access_level(AccessLevel::NetworkOnly),
                    );
                    return; // NetworkOnly: no browsing for this client
                }
            }
        }

        if self.policy.portal_enabled {
            self.do_login(i, now);
        }
        let next = now + self.scenario.browse_interval_s;
        if next <= self.scenario.duration {
            self.schedule(next, EvKind::Browse(i));
        }
    }

    fn on_browse(&mut self, i: usize, now: u64) {
        self.expire_sessions(now);
        let ip = match self.clients[i].ip {
            Some(ip) => ip,
            None => return,
        };
        let domain = BROWSE_DOMAINS[self.rng.gen_range(0..BROWSE_DOMAINS.len())];
        let req = AccessRequest {
            src_ip: ip,
            dst_domain: domain.to_string(),
            protocol: Protocol::Http,
            timestamp: now,
        };
        let device_id = self.clients[i].device.device_id.clone();
        let mac = self.clients[i].device.mac;

        if self.policy.portal_enabled && !self.gateway.authorized_ips().contains(&ip) {
            // DNS hijack bounces the client to the portal; it logs back in
            let dns = AccessRequest {
                src_ip: ip,
                dst_domain: domain.to_string(),
                protocol: Protocol::Dns,
                timestamp: now,
            };
            if let Intercept::DnsAnswer(_) = self.gateway.intercept(&dns) {
                self.append(
                    RecordDraft::new(EventKind::Redirect, now)
                        .who(&self.clients[i].owner)
                        .device(&device_id, mac)
                        .ip(ip),
                );
                self.metrics.redirects += 1;
            }
            self.do_login(i, now);
        }

        match evaluate_request(&self.policy, &req) {
            Verdict::Allow => {
                // uniform 64 KiB page per browse tick; totals land on the
                // client's Disconnect record
                self.clients[i].bytes_up += 2_048;
                self.clients[i].bytes_down += 65_536;
            }
            Verdict::Redirect(_) => {
                self.append(
                    RecordDraft::new(EventKind::Redirect, now).device(&device_id, mac).ip(ip),
                );
                self.metrics.redirects += 1;
            }
            Verdict::Deny(_) => {
                self.append(
                    RecordDraft::new(EventKind::PolicyDeny, now).device(&device_id, mac).ip(ip),
                );
            }
        }

        let next = now + self.scenario.browse_interval_s;
        if next <= self.scenario.duration {
            self.schedule(next, EvKind::Browse(i));
        }
    }

    /// Per-client throughput: airtime-weighted share of each AP's
    /// effective throughput, scaled down when the APs' aggregate exceeds
    /// the WAN link, then clamped to the policy cap.
    fn throughput_stats(&self) -> Option<ThroughputStats> {
        let mut per_client: Vec<f64> = Vec::new();
        let mut ap_totals = 0.0;
        let mut shares: Vec<(usize, f64)> = Vec::new(); // (client idx, pre-WAN Mbps)
        for (ap_idx, ap) in self.network.aps.iter().enumerate() {
            let members: Vec<usize> = (0..self.clients.len())
                .filter(|&i| {
                    self.clients[i].online && !self.clients[i].blocked
                        && self.clients[i].ap_index == ap_idx
                })
                .collect();
            if members.is_empty() {
                continue;
            }
            let loads: Vec<ClientLoad> = members
                .iter()
                .map(|&i| ClientLoad {
                    device_id: self.clients[i].device.device_id.clone(),
                    phy_rate: self.clients[i].phy_rate,
                    offered_packets: 1.0,
                })
                .collect();
            let effective = effective_ap_throughput(ap, &self.scenario.factors);
            ap_totals += effective;
            for (&i, share) in members.iter().zip(airtime_share(&loads)) {
                shares.push((i, share * effective));
            }
        }
        if shares.is_empty() {
            return None;
        }
        let wan_scale = if ap_totals > self.network.wan_mbps {
            self.network.wan_mbps / ap_totals
        } else {
            1.0
        };
        for (_, mbps) in &shares {
            per_client.push(apply_cap(&self.policy, mbps * wan_scale));
        }
        let n = per_client.len() as f64;
        let mean = per_client.iter().sum::<f64>() / n;
        let min = per_client.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = per_client.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Some(ThroughputStats { mean, min, max })
    }

    fn run_probes(&mut self) {
        let probes: Vec<ProbeKind> = self.scenario.probes.iter().copied().collect();
        for probe in probes {
            let outcome = match probe {
                ProbeKind::OutsiderJoin => probe_outsider_join(&self.policy),
                ProbeKind::Eavesdrop => probe_eavesdrop(
                    self.network.aps[0].security_mode,
                    self.clients.iter().filter(|c| c.online && c.ap_index == 0).count(),
                ),
                ProbeKind::Discovery => {
                    let n = self.clients.iter().filter(|c| c.online).count().max(1);
                    if probe_discovery(self.network.host_isolation, n) > 0 {
                        ProbeOutcome::Succeeded
                    } else {
                        ProbeOutcome::Prevented
                    }
                }
                ProbeKind::CertClone => {
                    let now = self.scenario.duration;
                    let holder = (0..self.clients.len())
                        .find(|&i| self.clients[i].cert.is_some());
                    match holder {
                        Some(i) => {
                            let cert = self.clients[i].cert.clone().unwrap();
                            let intruder = ClientDevice::sample(
                                MacAddr([0x02, 0xff, 0xff, 0, 0, 1]),
                                "350000000099999",
                                &[WifiTech::N],
                            );
                            let a_mac = self.clients[i].device.mac;
                            let a_id = self.clients[i].device.device_id.clone();
                            let (outcome, _) = probe_cert_clone(
                                &self.registry,
                                &self.key,
                                &cert,
                                a_mac,
                                &a_id,
                                &intruder,
                                &mut self.log,
                                now,
                            );
                            outcome
                        }
                        // no certificate in play: nothing to clone
                        None => ProbeOutcome::Prevented,
                    }
                }
            };
            self.metrics.probe_outcomes.insert(probe, outcome);
        }
    }

    fn finish(mut self) -> SimOutput {
        // graceful shutdown: every online client disconnects
        let duration = self.scenario.duration;
        for i in 0..self.clients.len() {
            if !self.clients[i].online {
                continue;
            }
            let device_id = self.clients[i].device.device_id.clone();
            let mac = self.clients[i].device.mac;
            let ip = self.clients[i].ip;
            if let Some(ip) = ip {
                if let Some(s) = self.gateway.on_disconnect(ip) {
                    self.append(
                        RecordDraft::new(EventKind::Logout, duration).who(&s.user).ip(ip),
                    );
                }
            }
            let mut draft = RecordDraft::new(EventKind::Disconnect, duration)
                .device(&device_id, mac);
            if let Some(ip) = ip {
                draft = draft.ip(ip);
            }
            if self.clients[i].bytes_up > 0 || self.clients[i].bytes_down > 0 {
                draft = draft.traffic(self.clients[i].bytes_up, self.clients[i].bytes_down);
            }
            self.append(draft);
        }
        self.metrics.per_client_throughput = self.throughput_stats();
        let suspicion =
            crate::audit_log::detect_suspicion(self.log.records(), 60, &SuspicionThresholds::default());
        SimOutput {
            metrics: self.metrics,
            audit_jsonl: self.log.to_jsonl(),
            suspicion,
        }
    }
}

/// Execute a scenario. Identical scenario + seed produce byte-identical
/// metrics and audit output.
pub fn run(scenario: &Scenario) -> Result<SimOutput, SimError> {
    scenario.validate()?;
    if scenario.duration == 0 {
        return Ok(SimOutput {
            metrics: Metrics::default(),
            audit_jsonl: String::new(),
            suspicion: Vec::new(),
        });
    }
    let mut sim = Sim::new(scenario)?;
    for i in 0..sim.clients.len() {
        sim.schedule(0, EvKind::Connect(i));
    }
    while let Some(Reverse(ev)) = sim.queue.pop() {
        match ev.kind {
            EvKind::Connect(i) => sim.on_connect(i, ev.time),
            EvKind::Browse(i) => sim.on_browse(i, ev.time),
        }
    }
    sim.run_probes();
    Ok(sim.finish())
}

/// Risk probe: an unregistered device takes a lease and tries to browse.
/// Succeeded means it reached an Allow verdict without ever logging in.
pub fn probe_outsider_join(policy: &PolicyConfig) -> ProbeOutcome {
    if policy.nac_enabled {
        // NAC holds unassessed devices at NetworkOnly
        return ProbeOutcome::Prevented;
    }
    if policy.portal_enabled {
        // unauthorized source never passes the gateway
        return ProbeOutcome::Prevented;
    }
    let req = AccessRequest {
        src_ip: Ipv4Addr::new(10, 9, 200, 200),
        dst_domain: "example.com".into(),
        protocol: Protocol::Http,
        timestamp: 0,
    };
    match evaluate_request(policy, &req) {
        Verdict::Allow => ProbeOutcome::Succeeded,
        _ => ProbeOutcome::Prevented,
    }
}

/// Risk probe: a peer on the same AP reads frames. Only an Open AP with at
/// least two associated clients leaks plaintext in this model.
pub fn probe_eavesdrop(security: SecurityMode, clients_on_ap: usize) -> ProbeOutcome {
    if security == SecurityMode::Open && clients_on_ap >= 2 {
        ProbeOutcome::Succeeded
    } else {
        ProbeOutcome::Prevented
    }
}

/// Risk probe: how many peers one host can discover.
pub fn probe_discovery(host_isolation: bool, n_peers: usize) -> usize {
    if host_isolation || n_peers <= 1 {
        0
    } else {
        n_peers - 1
    }
}

/// Risk probe: device B presents A's certificate. Returns the outcome and
/// the suspicion flags raised by the attempt; the legitimate use and the
/// clone attempt are both appended to the log.
#[allow(clippy::too_many_arguments)]
pub fn probe_cert_clone(
    registry: &Registry,
    key: &ServerKey,
    cert: &Certificate,
    holder_mac: MacAddr,
    holder_id: &str,
    intruder: &ClientDevice,
    log: &mut AuditLog,
    now: u64,
) -> (ProbeOutcome, Vec<SuspicionFlag>) {
    // legitimate presentation by the holder
    log.append(
        RecordDraft::new(EventKind::LoginOk, now)
            .device(holder_id, holder_mac)
            .fingerprint(&cert.device_fingerprint),
    )
    .expect("append");
    let verdict =
        registry.verify_certificate(cert, intruder.mac, &intruder.serial_imei, key, now + 1);
    let outcome = if verdict == CertVerdict::Valid {
        ProbeOutcome::Succeeded
    } else {
        log.append(
            RecordDraft::new(EventKind::CertReject, now + 1)
                .device(&intruder.device_id, intruder.mac)
                .fingerprint(&cert.device_fingerprint),
        )
        .expect("append");
        ProbeOutcome::Prevented
    };
    let flags = crate::audit_log::detect_suspicion(
        log.records(),
        60,
        &SuspicionThresholds::default(),
    );
    (outcome, flags)
}
