//! Captive-portal gateway: intercept unauthenticated traffic, authenticate
//! against the student directory, authorize device IPs, expire sessions,
//! and log users out on disconnect.
//!
//! The gateway is a single logical state machine; all mutations (login,
//! expire, disconnect) are serialized by the owner. `intercept` is
//! read-only.

use std::collections::{BTreeMap, BTreeSet};
use std::net::Ipv4Addr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::net_model::MacAddr;
use crate::policy_engine::{AccessRequest, PolicyConfig, Protocol};

pub const DEFAULT_PORTAL_IP: Ipv4Addr = Ipv4Addr::new(10, 5, 0, 7);
pub const DEFAULT_PORTAL_PORT: u16 = 3905;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PortalError {
    #[error("credentials rejected")]
    AuthFailed,
    #[error("directory server unavailable")]
    DirectoryUnavailable,
    #[error("device certificate rejected")]
    CertificateRejected,
    #[error("policy has no session timeout; portal cannot create sessions")]
    NoSessionTimeout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RedirectMode {
    DnsHijack,
    HttpRedirect,
    /// Stub; deliberately bypassable by source spoofing (see
    /// [`GatewayState::intercept_with_spoof`]).
    IcmpRedirect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SessionState {
    Active,
    Expired,
    LoggedOut,
}

/// Authenticated user ↔ device ↔ IP binding with expiry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortalSession {
    pub user: String,
    pub device_ip: Ipv4Addr,
    pub device_mac: MacAddr,
    pub started_at: u64,
    pub expires_at: u64,
    pub state: SessionState,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct DirectoryEntry {
    password_digest: String,
    reference: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Availability {
    Up,
    Down,
}

/// Student directory backing the portal's credential check. The
/// availability switch exists for fault injection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Directory {
    entries: BTreeMap<String, DirectoryEntry>,
    pub availability: Availability,
}

impl Default for Directory {
    fn default() -> Self {
        Directory { entries: BTreeMap::new(), availability: Availability::Up }
    }
}

fn digest(password: &str) -> String {
    hex::encode(Sha256::digest(password.as_bytes()))
}

impl Directory {
    pub fn add_student(&mut self, student_id: &str, password: &str, reference: &str) {
        self.entries.insert(
            student_id.to_string(),
            DirectoryEntry { password_digest: digest(password), reference: reference.to_string() },
        );
    }

    fn check(&self, student_id: &str, password: &str, reference: Option<&str>) -> bool {
        match self.entries.get(student_id) {
            Some(e) => {
                e.password_digest == digest(password)
                    && reference.is_none_or(|r| r == e.reference)
            }
            None => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Credentials {
    pub student_id: String,
    pub password: String,
    /// Optional second factor.
    pub reference: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Intercept {
    PassThrough,
    DnsAnswer(Ipv4Addr),
    HttpRedirect302(String),
    Drop,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GatewayState {
    pub portal_ip: Ipv4Addr,
    pub portal_port: u16,
    pub portal_domain: String,
    pub redirect_mode: RedirectMode,
    authorized_ips: BTreeSet<Ipv4Addr>,
    whitelist_ips: BTreeSet<Ipv4Addr>,
    whitelist_domains: BTreeSet<String>,
    sessions: Vec<PortalSession>,
}

impl Default for GatewayState {
    fn default() -> Self {
        GatewayState::new(DEFAULT_PORTAL_IP, DEFAULT_PORTAL_PORT, "portal.knust.edu.gh")
    }
}

impl GatewayState {
    pub fn new(portal_ip: Ipv4Addr, portal_port: u16, portal_domain: &str) -> Self {
        let mut whitelist_ips = BTreeSet::new();
        whitelist_ips.insert(portal_ip); // portal must always be reachable
        let mut whitelist_domains = BTreeSet::new();
        whitelist_domains.insert(portal_domain.to_string());
        GatewayState {
            portal_ip,
            portal_port,
            portal_domain: portal_domain.to_string(),
            redirect_mode: RedirectMode::DnsHijack,
            authorized_ips: BTreeSet::new(),
            whitelist_ips,
            whitelist_domains,
            sessions: Vec::new(),
        }
    }

    pub fn whitelist_domain(&mut self, domain: &str) {
        self.whitelist_domains.insert(domain.to_string());
    }

    pub fn authorized_ips(&self) -> &BTreeSet<Ipv4Addr> {
        &self.authorized_ips
    }

    pub fn sessions(&self) -> &[PortalSession] {
        &self.sessions
    }

    pub fn login_url(&self) -> String {
        format!("http://{}:{}/login", self.portal_ip, self.portal_port)
    }

    pub fn active_session(&self, ip: Ipv4Addr) -> Option<&PortalSession> {
        self.sessions
            .iter()
            .find(|s| s.device_ip == ip && s.state == SessionState::Active)
    }

    pub fn intercept(&self, req: &AccessRequest) -> Intercept {
        self.intercept_with_spoof(req, false)
    }

    /// `spoofed_src` models the classic ICMP-redirect bypass: in
    /// IcmpRedirect mode a spoofed source sails straight through.
    pub fn intercept_with_spoof(&self, req: &AccessRequest, spoofed_src: bool) -> Intercept {
        if self.whitelist_domains.iter().any(|d| d.eq_ignore_ascii_case(&req.dst_domain)) {
            return Intercept::PassThrough;
        }
        if let Ok(dst_ip) = req.dst_domain.parse::<Ipv4Addr>() {
            if self.whitelist_ips.contains(&dst_ip) {
                return Intercept::PassThrough;
            }
        }
        if self.authorized_ips.contains(&req.src_ip) {
            return Intercept::PassThrough;
        }
        match self.redirect_mode {
            RedirectMode::DnsHijack => match req.protocol {
                Protocol::Dns => Intercept::DnsAnswer(self.portal_ip),
                _ => Intercept::Drop,
            },
            RedirectMode::HttpRedirect => match req.protocol {
                Protocol::Http => Intercept::HttpRedirect302(self.login_url()),
                _ => Intercept::Drop,
            },
            RedirectMode::IcmpRedirect => {
                if spoofed_src {
                    Intercept::PassThrough
                } else {
                    Intercept::Drop
                }
            }
        }
    }

    /// Authenticate and authorize a device IP. When the policy runs NAC, a
    /// certificate verdict other than Valid is rejected before any
    /// credential check.
    #[allow(clippy::too_many_arguments)]
    pub fn login(
        &mut self,
        directory: &Directory,
        credentials: &Credentials,
        device_ip: Ipv4Addr,
        device_mac: MacAddr,
        cert_check: Option<crate::access_control::CertVerdict>,
        policy: &PolicyConfig,
        now: u64,
    ) -> Result<PortalSession, PortalError> {
        if policy.nac_enabled && cert_check != Some(crate::access_control::CertVerdict::Valid) {
            return Err(PortalError::CertificateRejected);
        }
        if directory.availability == Availability::Down {
            return Err(PortalError::DirectoryUnavailable);
        }
        if !directory.check(
            &credentials.student_id,
            &credentials.password,
            credentials.reference.as_deref(),
        ) {
            return Err(PortalError::AuthFailed);
        }
        let timeout = policy.session_timeout.ok_or(PortalError::NoSessionTimeout)?;
        // at most one Active session per IP
        if let Some(old) = self
            .sessions
            .iter_mut()
            .find(|s| s.device_ip == device_ip && s.state == SessionState::Active)
        {
            old.state = SessionState::LoggedOut;
        }
        let session = PortalSession {
            user: credentials.student_id.clone(),
            device_ip,
            device_mac,
            started_at: now,
            expires_at: now + timeout,
            state: SessionState::Active,
        };
        self.sessions.push(session.clone());
        self.authorized_ips.insert(device_ip);
        Ok(session)
    }

    /// Transition every lapsed session to Expired and de-authorize its IP.
    pub fn expire_sessions(&mut self, now: u64) -> Vec<PortalSession> {
        let mut expired = Vec::new();
        for s in &mut self.sessions {
            if s.state == SessionState::Active && s.expires_at <= now {
                s.state = SessionState::Expired;
                self.authorized_ips.remove(&s.device_ip);
                expired.push(s.clone());
            }
        }
        expired
    }

    /// Wi-Fi disconnect: auto-logout the device's active session.
    pub fn on_disconnect(&mut self, device_ip: Ipv4Addr) -> Option<PortalSession> {
        let s = self
            .sessions
            .iter_mut()
            .find(|s| s.device_ip == device_ip && s.state == SessionState::Active)?;
        s.state = SessionState::LoggedOut;
        self.authorized_ips.remove(&device_ip);
        Some(s.clone())
    }

    /// Session table export for the audit module.
    pub fn sessions_json(&self) -> String {
        serde_json::to_string_pretty(&self.sessions).expect("sessions serialize")
    }

    /// True when authorized_ips is exactly the set of Active-session IPs.
    pub fn invariant_holds(&self) -> bool {
        let active: BTreeSet<Ipv4Addr> = self
            .sessions
            .iter()
            .filter(|s| s.state == SessionState::Active)
            .map(|s| s.device_ip)
            .collect();
        active == self.authorized_ips
    }
}

/// Minimal HTTP front end for the portal: the gateway serves its own login
/// page at /login and accepts form posts against the directory.
pub mod http {
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::{Ipv4Addr, TcpListener, TcpStream};
    use std::sync::atomic::{AtomicU64, Ordering};
    use std::sync::{Arc, Mutex};

    use super::{Credentials, Directory, GatewayState, PortalError};
    use crate::policy_engine::PolicyConfig;

    const LOGIN_FORM: &str = r#"<!DOCTYPE html>
<html><head><title>Campus Wi-Fi Login</title></head>
<body>
<h1>Campus Wi-Fi Login</h1>
<form method="POST" action="/login">
  <label>Student ID <input name="student_id"></label>
  <label>Password <input type="password" name="password"></label>
  <label>Reference number (optional) <input name="reference"></label>
  <button type="submit">Log in</button>
</form>
</body></html>
"#;

    pub struct PortalHttpServer {
        pub gateway: Arc<Mutex<GatewayState>>,
        pub directory: Arc<Mutex<Directory>>,
        pub policy: PolicyConfig,
        /// Simulated clock, seconds.
        pub clock: Arc<AtomicU64>,
    }

    fn percent_decode(s: &str) -> String {
        let bytes = s.as_bytes();
        let mut out = Vec::with_capacity(bytes.len());
        let mut i = 0;
        while i < bytes.len() {
            match bytes[i] {
                b'+' => out.push(b' '),
                b'%' if i + 2 < bytes.len() + 1 && i + 2 < bytes.len() + 1 => {
                    if let (Some(h), Some(l)) = (bytes.get(i + 1), bytes.get(i + 2)) {
                        if let Ok(v) =
                            u8::from_str_radix(&format!("{}{}", *h as char, *l as char), 16)
                        {
                            out.push(v);
                            i += 3;
                            continue;
                        }
                    }
                    out.push(b'%');
                }
                b => out.push(b),
            }
            i += 1;
        }
        String::from_utf8_lossy(&out).into_owned()
    }

    fn parse_form(body: &str) -> Vec<(String, String)> {
        body.split('&')
            .filter_map(|pair| {
                let (k, v) = pair.split_once('=')?;
                Some((percent_decode(k), percent_decode(v)))
            })
            .collect()
    }

    fn form_value(form: &[(String, String)], key: &str) -> Option<String> {
        form.iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.clone())
            .filter(|v| !v.is_empty())
    }

    fn respond(stream: &mut TcpStream, status: &str, content_type: &str, body: &str) {
        let _ = write!(
            stream,
            "HTTP/1.1 {status}\r\nContent-Type: {content_type}\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
            body.len()
        );
    }

    impl PortalHttpServer {
        /// Handle exactly one connection. Callers drive the accept loop so
        /// tests and the simulator control lifetime.
        pub fn handle_one(&self, listener: &TcpListener) -> std::io::Result<()> {
            let (mut stream, peer) = listener.accept()?;
            let mut reader = BufReader::new(stream.try_clone()?);
            let mut request_line = String::new();
            reader.read_line(&mut request_line)?;
            let mut parts = request_line.split_whitespace();
            let method = parts.next().unwrap_or("").to_string();
            let path = parts.next().unwrap_or("").to_string();

            let mut content_length = 0usize;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line)?;
                let line = line.trim_end();
                if line.is_empty() {
                    break;
                }
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    content_length = v.trim().parse().unwrap_or(0);
                }
            }

            match (method.as_str(), path.as_str()) {
                ("GET", "/login") => respond(&mut stream, "200 OK", "text/html", LOGIN_FORM),
                ("POST", "/login") => {
                    let mut body = vec![0u8; content_length];
                    reader.read_exact(&mut body)?;
                    let form = parse_form(&String::from_utf8_lossy(&body));
                    let creds = Credentials {
                        student_id: form_value(&form, "student_id").unwrap_or_default(),
                        password: form_value(&form, "password").unwrap_or_default(),
                        reference: form_value(&form, "reference"),
                    };
                    let device_ip = match peer.ip() {
                        std::net::IpAddr::V4(v4) => v4,
                        _ => Ipv4Addr::LOCALHOST,
                    };
                    let device_mac = form_value(&form, "mac")
                        .and_then(|m| m.parse().ok())
                        .unwrap_or(crate::net_model::MacAddr([0; 6]));
                    let now = self.clock.load(Ordering::SeqCst);
                    let directory = self.directory.lock().unwrap();
                    let mut gw = self.gateway.lock().unwrap();
                    match gw.login(
                        &directory,
                        &creds,
                        device_ip,
                        device_mac,
                        None,
                        &self.policy,
                        now,
                    ) {
                        Ok(session) => {
                            let body = serde_json::to_string(&session).unwrap();
                            respond(&mut stream, "200 OK", "application/json", &body);
                        }
                        Err(PortalError::AuthFailed) => respond(
                            &mut stream,
                            "401 Unauthorized",
                            "text/plain",
                            "authentication failed",
                        ),
                        Err(PortalError::DirectoryUnavailable) => respond(
                            &mut stream,
                            "503 Service Unavailable",
                            "text/plain",
                            "directory unavailable",
                        ),
                        Err(e) => {
                            respond(&mut stream, "403 Forbidden", "text/plain", &e.to_string())
                        }
                    }
                }
                _ => respond(&mut stream, "404 Not Found", "text/plain", "not found"),
            }
            Ok(())
        }
    }
}
