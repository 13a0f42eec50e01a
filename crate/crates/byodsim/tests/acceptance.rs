//! Acceptance suite. Each criterion runs as its own test and prints one
//! pass/fail line; run with `cargo test --test acceptance -- --nocapture`
//! to see the lines.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, UnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use byodsim::access_control::{
    issue_certificate, nac_gate, verify_certificate, AccessLevel, CertVerdict, DeviceStatus,
    PostureRules, Registry, ServerKey,
};
use byodsim::audit_log::{AuditRecord, EventKind, SuspicionKind};
use byodsim::capacity_model::{per_client_throughput, DegradationFactors};
use byodsim::captive_portal::{Credentials, Directory, GatewayState};
use byodsim::net_model::{AccessPoint, ClientDevice, MacAddr, SecurityMode, WifiTech};
use byodsim::policy_engine::{
    evaluate_request, preset, AccessRequest, DenyReason, PolicyConfig, PolicyVersion, Protocol,
    Verdict,
};
use byodsim::segmentation::{
    default_ruleset, permits, AclRule, Action, Endpoint, Selector, Service, ZoneName,
};
use byodsim::sim_harness::{
    probe_cert_clone, probe_discovery, probe_eavesdrop, probe_outsider_join, run, ClientMix,
    PolicyChoice, ProbeOutcome, Scenario, Venue,
};

fn check(name: &str, f: impl FnOnce() + UnwindSafe) {
    match catch_unwind(f) {
        Ok(()) => println!("[acceptance] {name}: PASS"),
        Err(e) => {
            println!("[acceptance] {name}: FAIL");
            std::panic::resume_unwind(e);
        }
    }
}

fn mac_of(rng: &mut ChaCha8Rng) -> MacAddr {
    let mut b = [0u8; 6];
    rng.fill(&mut b);
    b[0] |= 0x02; // locally administered
    MacAddr(b)
}

fn base_scenario(policy: &str, n: usize, duration: u64, seed: u64) -> Scenario {
    Scenario {
        venue: Venue::Classroom,
        n_clients: n,
        client_mix: ClientMix::default(),
        policy: PolicyChoice::Named(policy.into()),
        factors: DegradationFactors::default(),
        duration,
        seed,
        probes: BTreeSet::new(),
        network: None,
        browse_interval_s: 10,
    }
}

#[test]
fn criterion_1_capacity_headline() {
    check("1 capacity headline (2-3 Mbps for 42-61 clients, 2.475 at 50)", || {
        let start = Instant::now();
        let ap = AccessPoint::dual("ap", 300.0, "WIFI-KNUST", SecurityMode::Open);
        let f = DegradationFactors::default();
        assert!((f.overhead_frac, f.contention_frac, f.misc_frac) == (0.45, 0.50, 0.25));
        for n in 42..=61 {
            let mbps = per_client_throughput(&ap, n, &f).unwrap();
            assert!((2.0..=3.0).contains(&mbps), "n={n} gives {mbps}");
        }
        let at_50 = per_client_throughput(&ap, 50, &f).unwrap();
        assert!((at_50 - 2.475).abs() <= 1e-9, "50 clients give {at_50}");
        assert!(start.elapsed().as_secs_f64() < 1.0);
    });
}

#[test]
fn criterion_2_session_cycle() {
    check("2 session cycle (3 LoginOk at ~0/600/1200 under V4)", || {
        let start = Instant::now();
        let out = run(&base_scenario("v4", 10, 1500, 42)).unwrap();
        let records: Vec<AuditRecord> = out
            .audit_jsonl
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        // examine one client end to end
        let who = "student-0000";
        let logins: Vec<u64> = records
            .iter()
            .filter(|r| r.event == EventKind::LoginOk && r.who.as_deref() == Some(who))
            .map(|r| r.when)
            .collect();
        let tick = 10; // one browse interval
        assert_eq!(logins.len(), 3, "logins at {logins:?}");
        assert!(logins[0] <= tick);
        assert!((600..=600 + tick).contains(&logins[1]), "second login at {}", logins[1]);
        assert!((1200..=1200 + tick).contains(&logins[2]), "third login at {}", logins[2]);
        assert!(start.elapsed().as_secs_f64() < 1.0);
    });
}

#[test]
fn criterion_3_certificate_non_transferability() {
    check("3 certificate non-transferability + bit-flip fuzzing", || {
        let key = ServerKey(b"acceptance-issuer".to_vec());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let revoked = BTreeSet::new();
        for _ in 0..1000 {
            let mac_a = mac_of(&mut rng);
            let mac_b = mac_of(&mut rng);
            let imei_a = format!("{:015}", rng.gen_range(0u64..1_000_000_000_000_000));
            let imei_b = format!("{:015}", rng.gen_range(0u64..1_000_000_000_000_000));
            if mac_a == mac_b && imei_a == imei_b {
                continue;
            }
            let mut registry = Registry::default();
            registry.add_owner("u");
            let mut device = ClientDevice::sample(mac_a, &imei_a, &[WifiTech::N]);
            device.antivirus.definitions_date = 0;
            registry.register_device("u", device, 0).unwrap();
            registry.assess_posture(mac_a, &PostureRules::default(), 0).unwrap();
            let cert =
                issue_certificate(registry.record(mac_a).unwrap(), &key, 86_400, 0).unwrap();
            let verdict = verify_certificate(&cert, mac_b, &imei_b, &key, &revoked, 1);
            assert_ne!(verdict, CertVerdict::Valid, "cert transferred to {mac_b}/{imei_b}");

            // bit-flip fuzzing over the serialized certificate
            let holder = verify_certificate(&cert, mac_a, &imei_a, &key, &revoked, 1);
            assert_eq!(holder, CertVerdict::Valid);
            let mut bytes = serde_json::to_vec(&cert).unwrap();
            let bit = rng.gen_range(0..bytes.len() * 8);
            bytes[bit / 8] ^= 1 << (bit % 8);
            if let Ok(mutated) = serde_json::from_slice::<byodsim::access_control::Certificate>(&bytes)
            {
                if mutated != cert {
                    let v = verify_certificate(&mutated, mac_a, &imei_a, &key, &revoked, 1);
                    assert_ne!(v, CertVerdict::Valid, "mutated cert accepted");
                }
            }
        }
    });
}

#[test]
fn criterion_4_nac_gating() {
    check("4 NAC gating over a 200-device randomized fleet", || {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rules = PostureRules::default();
        let now = 1_000 * 86_400; // far enough in that AV staleness is expressible
        let mut registry = Registry::new(usize::MAX);
        registry.add_owner("fleet");
        let mut violators = Vec::new();
        let mut macs = Vec::new();
        for i in 0..200 {
            let mac = mac_of(&mut rng);
            let mut device = ClientDevice::sample(mac, &format!("35{i:013}"), &[WifiTech::N]);
            let violating = rng.gen_bool(0.5);
            device.antivirus.definitions_date = if violating {
                now - 400 * 86_400 // 400-day-old definitions
            } else {
                now - 86_400
            };
            registry.register_device("fleet", device, now).unwrap();
            registry.assess_posture(mac, &rules, now).unwrap();
            macs.push(mac);
            if violating {
                violators.push(mac);
            }
        }
        assert!(!violators.is_empty());
        for &mac in &violators {
            let record = registry.record(mac).unwrap();
            assert!(matches!(record.status, DeviceStatus::Blocked(_)));
            assert_eq!(nac_gate(record), AccessLevel::NetworkOnly);
        }
        assert_eq!(
            probe_outsider_join(&PolicyConfig::proposed_design()),
            ProbeOutcome::Prevented
        );
        // remediation: fresh AV definitions flip the verdict
        for &mac in &violators {
            let mut device = registry.record(mac).unwrap().device.clone();
            device.antivirus.definitions_date = now;
            registry.register_device("fleet", device, now).unwrap();
            let status = registry.assess_posture(mac, &rules, now).unwrap();
            assert_eq!(status, DeviceStatus::Cleared);
            assert_eq!(nac_gate(registry.record(mac).unwrap()), AccessLevel::FullPipeline);
        }
    });
}

/// Independent linear-scan interpreter used as the ACL oracle.
fn oracle_permits(rules: &[AclRule], src: &Endpoint, dst: &Endpoint, service: Service) -> Action {
    for rule in rules {
        let src_ok = match &rule.src {
            Selector::Any => true,
            Selector::Zone(z) => *z == src.zone,
            _ => false, // shipped ruleset uses zones only
        };
        let dst_ok = match &rule.dst {
            Selector::Any => true,
            Selector::Zone(z) => *z == dst.zone,
            _ => false,
        };
        let svc_ok = rule.service == Service::Any || rule.service == service;
        if src_ok && dst_ok && svc_ok {
            return rule.action;
        }
    }
    Action::Deny
}

#[test]
fn criterion_5_acl_oracle_equivalence() {
    check("5 ACL oracle equivalence over 224 triples", || {
        let rules = default_ruleset();
        let src_zones =
            [ZoneName::Internet, ZoneName::AccessNet, ZoneName::Management, ZoneName::PublicDmz];
        let hosts = [
            ("10.1.0.10", ZoneName::PublicDmz),
            ("10.1.0.11", ZoneName::PublicDmz),
            ("10.2.0.10", ZoneName::PrivateDmz),
            ("10.2.0.11", ZoneName::PrivateDmz),
            ("10.2.0.12", ZoneName::PrivateDmz),
            ("10.9.1.1", ZoneName::AccessNet),
            ("198.51.100.7", ZoneName::Internet),
            ("10.0.0.2", ZoneName::Management),
        ];
        let mut triples = 0;
        for src_zone in src_zones {
            let src = Endpoint::new("192.0.2.1", src_zone);
            for (addr, zone) in hosts {
                let dst = Endpoint::new(addr, zone);
                for service in Service::CONCRETE {
                    let got = permits(&rules, &src, &dst, service).unwrap();
                    let want = oracle_permits(&rules, &src, &dst, service);
                    assert_eq!(got, want, "{src_zone:?} -> {addr} {service:?}");
                    if src_zone == ZoneName::Internet && zone == ZoneName::PrivateDmz {
                        assert_eq!(got, Action::Deny, "Internet reached the private DMZ");
                    }
                    triples += 1;
                }
            }
        }
        assert_eq!(triples, 224);
    });
}

#[test]
fn criterion_6_gateway_safety_invariant() {
    check("6 gateway safety invariant over 10000 random event sequences", || {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let policy = preset(PolicyVersion::V4);
        let mut directory = Directory::default();
        for i in 0..8 {
            directory.add_student(&format!("u{i}"), "pw", "r");
        }
        for _ in 0..10_000 {
            let mut gw = GatewayState::default();
            let mut now = 0u64;
            for _ in 0..rng.gen_range(1..=12) {
                now += rng.gen_range(0..400);
                let ip = std::net::Ipv4Addr::new(10, 9, 0, rng.gen_range(1..=6));
                match rng.gen_range(0..3) {
                    0 => {
                        let user = format!("u{}", rng.gen_range(0..8));
                        let creds = Credentials {
                            student_id: user,
                            password: "pw".into(),
                            reference: None,
                        };
                        let mac = MacAddr([2, 0, 0, 0, 0, rng.gen_range(1..=6)]);
                        let _ = gw.login(&directory, &creds, ip, mac, None, &policy, now);
                    }
                    1 => {
                        gw.expire_sessions(now);
                    }
                    _ => {
                        gw.on_disconnect(ip);
                    }
                }
                assert!(gw.invariant_holds(), "authorized_ips diverged from active sessions");
            }
        }
    });
}

#[test]
fn criterion_7_risk_probe_matrix() {
    check("7 risk-probe matrix reproduces the four risks", || {
        // eavesdrop
        assert_eq!(probe_eavesdrop(SecurityMode::Open, 2), ProbeOutcome::Succeeded);
        assert_eq!(probe_eavesdrop(SecurityMode::Wpa2, 2), ProbeOutcome::Prevented);
        // outsider join
        assert_eq!(probe_outsider_join(&preset(PolicyVersion::V1)), ProbeOutcome::Succeeded);
        assert_eq!(probe_outsider_join(&preset(PolicyVersion::V5)), ProbeOutcome::Succeeded);
        assert_eq!(probe_outsider_join(&preset(PolicyVersion::V4)), ProbeOutcome::Prevented);
        assert_eq!(
            probe_outsider_join(&PolicyConfig::proposed_design()),
            ProbeOutcome::Prevented
        );
        // discovery
        assert_eq!(probe_discovery(false, 25), 24);
        assert_eq!(probe_discovery(true, 25), 0);
        // certificate clone, with the suspicion flag in the log
        let key = ServerKey(b"acceptance-issuer".to_vec());
        let mut registry = Registry::default();
        registry.add_owner("u");
        let mac_a: MacAddr = "02:00:00:00:00:aa".parse().unwrap();
        registry
            .register_device("u", ClientDevice::sample(mac_a, "350000000000001", &[WifiTech::N]), 0)
            .unwrap();
        registry.assess_posture(mac_a, &PostureRules::default(), 0).unwrap();
        let cert = issue_certificate(registry.record(mac_a).unwrap(), &key, 86_400, 0).unwrap();
        let intruder = ClientDevice::sample(
            "02:00:00:00:00:bb".parse().unwrap(),
            "350000000000002",
            &[WifiTech::N],
        );
        let mut log = byodsim::audit_log::AuditLog::in_memory();
        let (outcome, flags) = probe_cert_clone(
            &registry,
            &key,
            &cert,
            mac_a,
            &mac_a.to_string(),
            &intruder,
            &mut log,
            0,
        );
        assert_eq!(outcome, ProbeOutcome::Prevented);
        assert!(flags.iter().any(|f| f.kind == SuspicionKind::CertCloneAttempt));
    });
}

#[test]
fn criterion_8_simulate_determinism() {
    check("8 byte-identical metrics and audit output for equal seeds", || {
        let exe = env!("CARGO_BIN_EXE_byodsim");
        let dir = tempfile::tempdir().unwrap();
        let scenario_path = dir.path().join("scenario.json");
        let scenario = base_scenario("v4", 25, 900, 0);
        std::fs::write(&scenario_path, serde_json::to_string(&scenario).unwrap()).unwrap();
        let mut outputs = Vec::new();
        for run_idx in 0..2 {
            let metrics = dir.path().join(format!("m{run_idx}.json"));
            let audit = dir.path().join(format!("a{run_idx}.jsonl"));
            let status = std::process::Command::new(exe)
                .args(["simulate", "--scenario"])
                .arg(&scenario_path)
                .args(["--seed", "42", "--out"])
                .arg(&metrics)
                .arg("--audit-out")
                .arg(&audit)
                .output()
                .unwrap();
            assert!(status.status.success());
            outputs.push((
                std::fs::read(&metrics).unwrap(),
                std::fs::read(&audit).unwrap(),
                status.stdout,
            ));
        }
        assert_eq!(outputs[0].0, outputs[1].0, "metrics differ");
        assert_eq!(outputs[0].1, outputs[1].1, "audit logs differ");
        assert_eq!(outputs[0].2, outputs[1].2, "stdout differs");
        assert!(!outputs[0].1.is_empty());
    });
}

#[test]
fn criterion_9_policy_presets() {
    check("9 preset JSON round-trip and the three verdict examples", || {
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
            assert_eq!(p, back, "{v:?} changed across JSON round-trip");
        }
        let v2 = preset(PolicyVersion::V2);
        let req = |domain: &str, protocol| AccessRequest {
            src_ip: "10.9.0.10".parse().unwrap(),
            dst_domain: domain.to_string(),
            protocol,
            timestamp: 0,
        };
        assert_eq!(
            evaluate_request(&v2, &req("youtube.com", Protocol::Http)),
            Verdict::Redirect("knust.edu.gh".into())
        );
        assert_eq!(
            evaluate_request(&v2, &req("example.com", Protocol::Ftp)),
            Verdict::Deny(DenyReason::ProtocolBlocked)
        );
        let v1 = preset(PolicyVersion::V1);
        assert_eq!(evaluate_request(&v1, &req("anything.example", Protocol::P2p)), Verdict::Allow);
    });
}
