//! Command-line front end: simulate scenarios, print policy presets,
//! estimate capacity, run risk probes, query audit logs, and validate
//! firewall topologies. Machine-readable JSON goes to stdout, diagnostics
//! to stderr. Exit codes: 0 success, 1 domain error, 2 usage error.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use byodsim::audit_log::{AuditLog, EventKind, QueryFilter};
use byodsim::capacity_model::DegradationFactors;
use byodsim::net_model::{AccessPoint, ApKind, Band, Channel, SecurityMode};
use byodsim::policy_engine::{preset, preset_companion, PolicyConfig, PolicyVersion};
use byodsim::segmentation::{self, Zone};
use byodsim::sim_harness::{self, probe_discovery, probe_eavesdrop, probe_outsider_join, ProbeOutcome, Scenario};

#[derive(Parser)]
#[command(name = "byodsim", version, about = "Campus BYOD gateway core and WLAN simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and emit metrics JSON plus an audit JSONL file.
    Simulate(SimulateArgs),
    /// Print policy configurations.
    Policy {
        #[command(subcommand)]
        action: PolicyAction,
    },
    /// Per-client throughput for an AP under the degradation chain.
    Capacity(CapacityArgs),
    /// Run a single risk probe.
    Probe(ProbeArgs),
    /// Query an audit JSONL log.
    Audit {
        #[command(subcommand)]
        action: AuditAction,
    },
    /// Validate a firewall ruleset and zone topology.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Seed for the run; overrides the scenario's seed. Required: no
    /// hidden entropy.
    #[arg(long)]
    seed: u64,
    /// Where to write the metrics JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write the audit JSONL.
    #[arg(long)]
    audit_out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum PolicyAction {
    /// Print the JSON for a preset: v1..v5 or proposed.
    Preset {
        version: String,
        /// Print the companion SEC-SSID config instead, when one exists.
        #[arg(long)]
        companion: bool,
    },
}

#[derive(Args)]
struct CapacityArgs {
    /// Comma-separated channel raw rates in Mbps, e.g. 300,300.
    #[arg(long)]
    channels: String,
    #[arg(long)]
    clients: usize,
    #[arg(long)]
    overhead: Option<f64>,
    #[arg(long)]
    contention: Option<f64>,
    #[arg(long)]
    misc: Option<f64>,
}

#[derive(Args)]
struct ProbeArgs {
    /// outsider-join | eavesdrop | discovery | cert-clone
    probe: String,
    /// Policy preset name for outsider-join and cert-clone.
    #[arg(long, default_value = "v1")]
    preset: String,
    /// AP security mode for eavesdrop: Open | WEP | WPA | WPA2.
    #[arg(long, default_value = "Open")]
    security: String,
    /// Clients on the AP (eavesdrop) or peers on the network (discovery).
    #[arg(long, default_value_t = 2)]
    peers: usize,
    /// Peer-to-peer discovery blocked?
    #[arg(long, default_value_t = false)]
    isolation: bool,
}

#[derive(Subcommand)]
enum AuditAction {
    /// Emit matching records as JSONL, verbatim, in seq order.
    Query {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        who: Option<String>,
        #[arg(long)]
        device: Option<String>,
        #[arg(long, name = "where")]
        location: Option<String>,
        #[arg(long)]
        from: Option<u64>,
        #[arg(long)]
        to: Option<u64>,
        /// Event kind filter; repeatable.
        #[arg(long)]
        event: Vec<String>,
    },
}

#[derive(Args)]
struct ValidateArgs {
    /// Ruleset JSON: ordered array of {src, dst, service, action}.
    #[arg(long)]
    ruleset: PathBuf,
    /// Zone topology JSON; shipped defaults when absent.
    #[arg(long)]
    zones: Option<PathBuf>,
}

/// Optional defaults file; explicit flags win.
#[derive(Deserialize, Default)]
struct EnvConfig {
    overhead: Option<f64>,
    contention: Option<f64>,
    misc: Option<f64>,
}

fn env_config() -> EnvConfig {
    match std::env::var("BYODSIM_CONFIG") {
        Ok(path) => fs::read_to_string(&path)
            .ok()
            .and_then(|s| serde_json::from_str(&s).ok())
            .unwrap_or_default(),
        Err(_) => EnvConfig::default(),
    }
}

fn fail(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn run_simulate(args: SimulateArgs) -> ExitCode {
    let text = match fs::read_to_string(&args.scenario) {
        Ok(t) => t,
        Err(e) => return fail(&format!("cannot read {}: {e}", args.scenario.display())),
    };
    let mut scenario: Scenario = match serde_json::from_str(&text) {
        Ok(s) => s,
        Err(e) => return fail(&format!("bad scenario: {e}")),
    };
    scenario.seed = args.seed;
    let output = match sim_harness::run(&scenario) {
        Ok(o) => o,
        Err(e) => return fail(&e.to_string()),
    };
    let metrics_json = serde_json::to_string_pretty(&output.metrics).unwrap();
    if let Some(out) = &args.out {
        if let Err(e) = fs::write(out, &metrics_json) {
            return fail(&format!("cannot write {}: {e}", out.display()));
        }
    }
    if let Some(audit_out) = &args.audit_out {
        if let Err(e) = fs::write(audit_out, &output.audit_jsonl) {
            return fail(&format!("cannot write {}: {e}", audit_out.display()));
        }
    }
    println!("{metrics_json}");
    ExitCode::SUCCESS
}

fn run_policy(action: PolicyAction) -> ExitCode {
    let PolicyAction::Preset { version, companion } = action;
    let config: Option<PolicyConfig> = if version.eq_ignore_ascii_case("proposed") {
        if companion {
            None
        } else {
            Some(PolicyConfig::proposed_design())
        }
    } else {
        match version.parse::<PolicyVersion>() {
            Ok(v) => {
                if companion {
                    preset_companion(v)
                } else {
                    Some(preset(v))
                }
            }
            Err(e) => return fail(&e),
        }
    };
    match config {
        Some(c) => {
            println!("{}", serde_json::to_string_pretty(&c).unwrap());
            ExitCode::SUCCESS
        }
        None => fail(&format!("no companion config for {version}")),
    }
}

fn run_capacity(args: CapacityArgs) -> ExitCode {
    let defaults = env_config();
    let base = DegradationFactors::default();
    let factors = DegradationFactors {
        overhead_frac: args.overhead.or(defaults.overhead).unwrap_or(base.overhead_frac),
        contention_frac: args.contention.or(defaults.contention).unwrap_or(base.contention_frac),
        misc_frac: args.misc.or(defaults.misc).unwrap_or(base.misc_frac),
    };
    if let Err(e) = factors.validate() {
        return fail(&e.to_string());
    }
    let mut channels = Vec::new();
    for (i, part) in args.channels.split(',').enumerate() {
        match part.trim().parse::<f64>() {
            Ok(rate) if rate > 0.0 => channels.push(Channel {
                band: if i == 0 { Band::Ghz2_4 } else { Band::Ghz5 },
                raw_rate_mbps: rate,
            }),
            _ => return fail(&format!("bad channel rate: {part}")),
        }
    }
    let ap = AccessPoint {
        id: "cli".into(),
        kind: ApKind::Autonomous,
        tier: 1,
        channels,
        ssid: String::new(),
        security_mode: SecurityMode::Open,
        location: String::new(),
    };
    match byodsim::capacity_model::per_client_throughput(&ap, args.clients, &factors) {
        Ok(mbps) => {
            println!("{}", serde_json::json!({ "per_client_mbps": mbps }));
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e.to_string()),
    }
}

fn parse_policy(name: &str) -> Result<PolicyConfig, String> {
    if name.eq_ignore_ascii_case("proposed") {
        Ok(PolicyConfig::proposed_design())
    } else {
        name.parse::<PolicyVersion>().map(preset)
    }
}

fn run_probe(args: ProbeArgs) -> ExitCode {
    let result = match args.probe.as_str() {
        "outsider-join" => match parse_policy(&args.preset) {
            Ok(policy) => serde_json::json!({
                "probe": "outsider-join",
                "preset": args.preset,
                "outcome": probe_outsider_join(&policy),
            }),
            Err(e) => return fail(&e),
        },
        "eavesdrop" => {
            let security: SecurityMode =
                match serde_json::from_value(serde_json::json!(args.security)) {
                    Ok(s) => s,
                    Err(_) => return fail(&format!("bad security mode: {}", args.security)),
                };
            serde_json::json!({
                "probe": "eavesdrop",
                "security": security,
                "outcome": probe_eavesdrop(security, args.peers),
            })
        }
        "discovery" => {
            let n = probe_discovery(args.isolation, args.peers);
            serde_json::json!({
                "probe": "discovery",
                "isolation": args.isolation,
                "discoverable_peers": n,
                "outcome": if n > 0 { ProbeOutcome::Succeeded } else { ProbeOutcome::Prevented },
            })
        }
        "cert-clone" => {
            // self-contained replay: register + clear a device, issue its
            // certificate, and let a second device present it
            use byodsim::access_control::{issue_certificate, PostureRules, Registry, ServerKey};
            use byodsim::net_model::{ClientDevice, MacAddr, WifiTech};
            use byodsim::sim_harness::probe_cert_clone;
            let key = ServerKey(b"byodsim-cli".to_vec());
            let mut registry = Registry::default();
            registry.add_owner("holder");
            let mac_a: MacAddr = "02:00:00:00:00:0a".parse().unwrap();
            let device_a = ClientDevice::sample(mac_a, "350000000000010", &[WifiTech::N]);
            registry.register_device("holder", device_a, 0).unwrap();
            registry.assess_posture(mac_a, &PostureRules::default(), 0).unwrap();
            let cert =
                issue_certificate(registry.record(mac_a).unwrap(), &key, 86_400, 0).unwrap();
            let intruder = ClientDevice::sample(
                "02:00:00:00:00:0b".parse().unwrap(),
                "350000000000011",
                &[WifiTech::N],
            );
            let mut log = AuditLog::in_memory();
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
            serde_json::json!({
                "probe": "cert-clone",
                "outcome": outcome,
                "suspicion": flags,
            })
        }
        other => return fail(&format!("unknown probe: {other}")),
    };
    println!("{result}");
    ExitCode::SUCCESS
}

fn run_audit(action: AuditAction) -> ExitCode {
    let AuditAction::Query { log, who, device, location, from, to, event } = action;
    let log = match AuditLog::open(&log) {
        Ok(l) => l,
        Err(e) => return fail(&e.to_string()),
    };
    let mut events: Option<BTreeSet<EventKind>> = None;
    for name in event {
        let kind: EventKind = match serde_json::from_value(serde_json::json!(name)) {
            Ok(k) => k,
            Err(_) => return fail(&format!("unknown event kind: {name}")),
        };
        events.get_or_insert_with(BTreeSet::new).insert(kind);
    }
    let filter = QueryFilter { who, device, location, from, to, events };
    for record in log.query(&filter) {
        println!("{}", serde_json::to_string(record).unwrap());
    }
    ExitCode::SUCCESS
}

fn run_validate(args: ValidateArgs) -> ExitCode {
    let ruleset = match fs::read_to_string(&args.ruleset)
        .map_err(|e| e.to_string())
        .and_then(|t| segmentation::load_ruleset(&t).map_err(|e| e.to_string()))
    {
        Ok(r) => r,
        Err(e) => return fail(&format!("bad ruleset: {e}")),
    };
    let zones: Vec<Zone> = match &args.zones {
        Some(path) => match fs::read_to_string(path)
            .map_err(|e| e.to_string())
            .and_then(|t| serde_json::from_str(&t).map_err(|e| e.to_string()))
        {
            Ok(z) => z,
            Err(e) => return fail(&format!("bad zones: {e}")),
        },
        None => segmentation::default_zones(),
    };
    let violations = segmentation::validate_topology(&zones, &ruleset);
    for violation in &violations {
        println!("{}", serde_json::to_string(violation).unwrap());
    }
    if violations.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Simulate(args) => run_simulate(args),
        Command::Policy { action } => run_policy(action),
        Command::Capacity(args) => run_capacity(args),
        Command::Probe(args) => run_probe(args),
        Command::Audit { action } => run_audit(action),
        Command::Validate(args) => run_validate(args),
    }
}
