//! Two-party sessions with an auditable message transcript.
//!
//! Each round the source sends one frame to each party (distribution phase).
//! The parties then measure on their own, using only their own frame, setting
//! and random stream. The transcript records every message so an audit can
//! confirm that nothing passes between A and B while they measure, and
//! [`verify_no_signaling`] tests that A's outcome statistics do not depend on
//! B's setting.

use std::fmt;
use std::io::{self, BufRead, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::generators::{Particle, ParticleKind, Sign};
use crate::measurement::probability_plus;
use crate::montecarlo::trial_rng;
use crate::source::produce_pair;
use crate::with_particle;

/// Fewest samples per remote-setting group for a conclusive test.
pub const MIN_GROUP_SAMPLES: u64 = 1000;
/// Default pass threshold on `|z|`.
pub const DEFAULT_Z_THRESHOLD: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    #[serde(rename = "source")]
    Source,
    A,
    B,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::Source => "source",
            Party::A => "A",
            Party::B => "B",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Distribution,
    Measurement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub phase: Phase,
    pub sender: Party,
    pub receiver: Party,
    pub round: u64,
    pub payload: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub messages: Vec<Message>,
}

impl Transcript {
    pub fn push(&mut self, round: u64, phase: Phase, sender: Party, receiver: Party, payload: impl Into<String>) {
        self.messages.push(Message { phase, sender, receiver, round, payload: payload.into() });
    }

    pub fn count_phase(&self, phase: Phase) -> usize {
        self.messages.iter().filter(|m| m.phase == phase).count()
    }

    /// Messages exchanged directly between A and B during measurement.
    pub fn inter_party_measurement_messages(&self) -> usize {
        self.messages
            .iter()
            .filter(|m| {
                m.phase == Phase::Measurement
                    && matches!((m.sender, m.receiver), (Party::A, Party::B) | (Party::B, Party::A))
            })
            .count()
    }

    /// One JSON object per line.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> io::Result<()> {
        for m in &self.messages {
            serde_json::to_writer(&mut w, m)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> io::Result<Self> {
        let mut messages = Vec::new();
        for line in r.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            messages.push(serde_json::from_str(&line)?);
        }
        Ok(Self { messages })
    }
}

/// One local measurement in a party's log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub round: u64,
    pub setting: f64,
    pub outcome: Sign,
}

/// A party's local state. It never sees the other party's setting.
#[derive(Debug, Clone)]
pub struct PartyState<P: Particle> {
    pub id: Party,
    frame: Option<P::Frame>,
    pub log: Vec<LogEntry>,
}

impl<P: Particle> PartyState<P> {
    pub fn new(id: Party) -> Self {
        Self { id, frame: None, log: Vec::new() }
    }

    pub fn holds_frame(&self) -> bool {
        self.frame.is_some()
    }

    pub fn receive(&mut self, frame: P::Frame) {
        self.frame = Some(frame);
    }

    /// Consumes the held frame and records the outcome. `bias` shifts `P(+1)`
    /// and is only nonzero in fault-injection runs.
    fn measure<R: Rng + ?Sized>(&mut self, round: u64, setting: f64, bias: f64, rng: &mut R) -> Result<Sign> {
        let frame = self
            .frame
            .take()
            .ok_or_else(|| Error::InvalidArgument(format!("party {} has no frame in round {round}", self.id)))?;
        let p = (probability_plus::<P>(&frame, &P::direction(setting)) + bias).clamp(0.0, 1.0);
        let outcome = Sign::from_bool(rng.random::<f64>() < p);
        self.log.push(LogEntry { round, setting, outcome });
        Ok(outcome)
    }
}

/// Deliberate non-local fault for testing the audit: B tells A its setting,
/// and A raises `P(+1)` by `bias` whenever B's setting equals `trigger`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalingFault {
    pub bias: f64,
    pub trigger: f64,
}

#[derive(Debug, Clone)]
pub struct Session {
    pub kind: ParticleKind,
    pub transcript: Transcript,
    pub log_a: Vec<LogEntry>,
    pub log_b: Vec<LogEntry>,
}

/// Runs one round per `(a, b)` setting pair in `schedule` (angles in radians).
pub fn run_session(
    kind: ParticleKind,
    schedule: &[(f64, f64)],
    seed: u64,
    fault: Option<SignalingFault>,
) -> Result<Session> {
    with_particle!(kind, P => run_session_for::<P>(schedule, seed, fault))
}

pub fn run_session_for<P: Particle>(
    schedule: &[(f64, f64)],
    seed: u64,
    fault: Option<SignalingFault>,
) -> Result<Session> {
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("settings schedule is empty".into()));
    }
    let mut transcript = Transcript::default();
    let mut alice = PartyState::<P>::new(Party::A);
    let mut bob = PartyState::<P>::new(Party::B);

    for (round, &(setting_a, setting_b)) in schedule.iter().enumerate() {
        let round = round as u64;
        let pair = produce_pair::<P, _>(&mut trial_rng(seed, 3 * round));
        alice.receive(pair.frame_1);
        transcript.push(round, Phase::Distribution, Party::Source, Party::A, "frame");
        bob.receive(pair.frame_2);
        transcript.push(round, Phase::Distribution, Party::Source, Party::B, "frame");

        let mut bias = 0.0;
        if let Some(f) = fault {
            transcript.push(round, Phase::Measurement, Party::B, Party::A, format!("setting {setting_b}"));
            if setting_b == f.trigger {
                bias = f.bias;
            }
        }
        alice.measure(round, setting_a, bias, &mut trial_rng(seed, 3 * round + 1))?;
        bob.measure(round, setting_b, 0.0, &mut trial_rng(seed, 3 * round + 2))?;
    }

    Ok(Session { kind: P::KIND, transcript, log_a: alice.log, log_b: bob.log })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestStatus {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettingGroup {
    pub remote_setting: f64,
    pub n: u64,
    pub n_plus: u64,
}

impl SettingGroup {
    pub fn p_plus(&self) -> f64 {
        self.n_plus as f64 / self.n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticKind {
    /// Two-proportion z statistic.
    Z,
    /// Pearson χ² on the 2×k table.
    ChiSquared,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoSignalingReport {
    pub groups: Vec<SettingGroup>,
    pub statistic_kind: StatisticKind,
    pub statistic: f64,
    /// Two-sided p-value of the statistic.
    pub p_value: f64,
    pub z_threshold: f64,
    pub status: TestStatus,
}

/// Tests whether `local` outcomes depend on the `remote` party's setting,
/// joining the two logs on round index. Passes at `|z| < 4`.
pub fn verify_no_signaling(local: &[LogEntry], remote: &[LogEntry]) -> NoSignalingReport {
    verify_no_signaling_with(local, remote, DEFAULT_Z_THRESHOLD)
}

pub fn verify_no_signaling_with(local: &[LogEntry], remote: &[LogEntry], z_threshold: f64) -> NoSignalingReport {
    let remote_setting: std::collections::HashMap<u64, f64> = remote.iter().map(|e| (e.round, e.setting)).collect();
    let mut groups: Vec<SettingGroup> = Vec::new();
    for e in local {
        let Some(&setting) = remote_setting.get(&e.round) else { continue };
        let idx = match groups.iter().position(|g| g.remote_setting.to_bits() == setting.to_bits()) {
            Some(i) => i,
            None => {
                groups.push(SettingGroup { remote_setting: setting, n: 0, n_plus: 0 });
                groups.len() - 1
            }
        };
        groups[idx].n += 1;
        if e.outcome == Sign::Plus {
            groups[idx].n_plus += 1;
        }
    }

    let conclusive = groups.len() >= 2 && groups.iter().all(|g| g.n >= MIN_GROUP_SAMPLES);
    let total: u64 = groups.iter().map(|g| g.n).sum();
    let total_plus: u64 = groups.iter().map(|g| g.n_plus).sum();
    let pooled = if total > 0 { total_plus as f64 / total as f64 } else { 0.5 };

    let (statistic_kind, statistic, p_value) = if groups.len() == 2 {
        let (g1, g2) = (groups[0], groups[1]);
        let diff = g1.p_plus() - g2.p_plus();
        let se = (pooled * (1.0 - pooled) * (1.0 / g1.n as f64 + 1.0 / g2.n as f64)).sqrt();
        let z = if diff == 0.0 { 0.0 } else { diff / se };
        (StatisticKind::Z, z, erfc(z.abs() / std::f64::consts::SQRT_2))
    } else if groups.len() > 2 {
        let mut chi2 = 0.0;
        if pooled > 0.0 && pooled < 1.0 {
            for g in &groups {
                let n = g.n as f64;
                let exp_plus = n * pooled;
                let exp_minus = n * (1.0 - pooled);
                let obs_plus = g.n_plus as f64;
                chi2 += (obs_plus - exp_plus).powi(2) / exp_plus + ((n - obs_plus) - exp_minus).powi(2) / exp_minus;
            }
        }
        let dof = (groups.len() - 1) as f64;
        let p = ChiSquared::new(dof).map(|d| d.sf(chi2)).unwrap_or(f64::NAN);
        (StatisticKind::ChiSquared, chi2, p)
    } else {
        (StatisticKind::Z, 0.0, 1.0)
    };

    let status = if !conclusive {
        TestStatus::Inconclusive
    } else {
        let passed = match statistic_kind {
            StatisticKind::Z => statistic.abs() < z_threshold,
            StatisticKind::ChiSquared => p_value >= erfc(z_threshold / std::f64::consts::SQRT_2),
        };
        if passed {
            TestStatus::Pass
        } else {
            TestStatus::Fail
        }
    };

    NoSignalingReport { groups, statistic_kind, statistic, p_value, z_threshold, status }
}

/// Schedule with A fixed at `a` and B alternating between `b` and `b_prime`.
pub fn alternating_schedule(a: f64, b: f64, b_prime: f64, rounds: usize) -> Vec<(f64, f64)> {
    (0..rounds).map(|i| (a, if i % 2 == 0 { b } else { b_prime })).collect()
}
