//! Measurement records, per-channel tallies and the CHSH correlation
//! `C = m₁/n₁ − m₂/n₂ + m₃/n₃ + m₄/n₄`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{ChshError, Result};

/// Classical bound on `|C|`.
pub const CLASSICAL_BOUND: i64 = 2;
/// Tsirelson bound `2√2`, for reference only; nothing here computes it.
pub const TSIRELSON_BOUND: f64 = 2.0 * std::f64::consts::SQRT_2;

/// A polarizer setting pair `(i, j)`, listed in the order the correlation
/// sums them. Only `(1, 2)` enters with a minus sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Channel {
    A1B1,
    A1B2,
    A2B1,
    A2B2,
}

impl Channel {
    pub const ALL: [Channel; 4] = [Channel::A1B1, Channel::A1B2, Channel::A2B1, Channel::A2B2];

    pub fn from_settings(i: u8, j: u8) -> Option<Channel> {
        match (i, j) {
            (1, 1) => Some(Channel::A1B1),
            (1, 2) => Some(Channel::A1B2),
            (2, 1) => Some(Channel::A2B1),
            (2, 2) => Some(Channel::A2B2),
            _ => None,
        }
    }

    pub fn settings(self) -> (u8, u8) {
        match self {
            Channel::A1B1 => (1, 1),
            Channel::A1B2 => (1, 2),
            Channel::A2B1 => (2, 1),
            Channel::A2B2 => (2, 2),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// +1 or −1: the channel's sign in the correlation.
    pub fn sign(self) -> i64 {
        if self == Channel::A1B2 {
            -1
        } else {
            1
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, j) = self.settings();
        write!(f, "({i},{j})")
    }
}

/// Which side of the bound counts as a violation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Threshold {
    /// `|C| > 2`
    Strict,
    /// `|C| ≥ 2`
    NonStrict,
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Threshold::Strict => "strict",
            Threshold::NonStrict => "non-strict",
        })
    }
}

/// Largest accepted per-channel round count.
pub const MAX_ROUNDS: u32 = 1 << 30;

/// Round counts `(n₁, n₂, n₃, n₄)` per channel, in [`Channel::ALL`] order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[u32; 4]", into = "[u32; 4]")]
pub struct ExperimentConfig {
    rounds: [u32; 4],
}

impl ExperimentConfig {
    pub fn new(rounds: [u32; 4]) -> Result<Self> {
        if let Some(k) = rounds.iter().position(|&n| n == 0) {
            return Err(ChshError::InvalidConfig(format!(
                "channel {} needs at least one round",
                Channel::ALL[k]
            )));
        }
        if let Some(k) = rounds.iter().position(|&n| n > MAX_ROUNDS) {
            return Err(ChshError::InvalidConfig(format!(
                "channel {} has more than {MAX_ROUNDS} rounds",
                Channel::ALL[k]
            )));
        }
        Ok(ExperimentConfig { rounds })
    }

    /// `n` rounds in every channel.
    pub fn equal(n: u32) -> Result<Self> {
        Self::new([n; 4])
    }

    pub fn rounds(&self) -> [u32; 4] {
        self.rounds
    }

    pub fn rounds_f64(&self) -> [f64; 4] {
        self.rounds.map(f64::from)
    }

    /// Total number of rounds `N`.
    pub fn total(&self) -> u64 {
        self.rounds.iter().map(|&n| u64::from(n)).sum()
    }
}

impl TryFrom<[u32; 4]> for ExperimentConfig {
    type Error = ChshError;

    fn try_from(rounds: [u32; 4]) -> Result<Self> {
        Self::new(rounds)
    }
}

impl From<ExperimentConfig> for [u32; 4] {
    fn from(config: ExperimentConfig) -> Self {
        config.rounds
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.rounds;
        write!(f, "({a},{b},{c},{d})")
    }
}

/// One measurement round: outcomes `a`, `b`, their product `c`, and the
/// settings `(i, j)` in force.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub time_index: u32,
    pub a: i8,
    pub b: i8,
    pub c: i8,
    pub i: u8,
    pub j: u8,
}

impl MeasurementRecord {
    /// Builds a record with `c = a·b`.
    pub fn new(time_index: u32, a: i8, b: i8, i: u8, j: u8) -> Result<Self> {
        let rec = MeasurementRecord {
            time_index,
            a,
            b,
            c: a.wrapping_mul(b),
            i,
            j,
        };
        rec.validate()?;
        Ok(rec)
    }

    pub fn validate(&self) -> Result<Channel> {
        let unit = |v: i8| v == 1 || v == -1;
        if !unit(self.a) || !unit(self.b) || !unit(self.c) {
            return Err(ChshError::InvalidConfig(format!(
                "record #{}: outcomes must be ±1",
                self.time_index
            )));
        }
        let channel = Channel::from_settings(self.i, self.j).ok_or_else(|| {
            ChshError::InvalidConfig(format!(
                "record #{}: settings ({}, {}) are not in {{1,2}}²",
                self.time_index, self.i, self.j
            ))
        })?;
        if self.c != self.a * self.b {
            return Err(ChshError::CorruptRecord {
                time_index: self.time_index,
                c: self.c,
                product: self.a * self.b,
            });
        }
        Ok(channel)
    }

    /// What this round adds to the correlation when its channel has one round.
    pub fn contribution(&self) -> Result<i64> {
        let channel = self.validate()?;
        Ok(channel.sign() * i64::from(self.c))
    }
}

/// The four rows of the maximally violating four-round dataset.
pub fn table_one() -> Vec<MeasurementRecord> {
    [
        (1, 1, 1, 1, 1),
        (2, 1, -1, 1, 2),
        (3, 1, 1, 2, 1),
        (4, 1, 1, 2, 2),
    ]
    .into_iter()
    .map(|(t, a, b, i, j)| MeasurementRecord::new(t, a, b, i, j).expect("built-in rows are valid"))
    .collect()
}

/// Displacement `m` and round count `n` of one channel.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelCount {
    pub m: i64,
    pub n: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTally {
    channels: [ChannelCount; 4],
}

impl RoundTally {
    pub fn from_counts(m: [i64; 4], n: [u64; 4]) -> Result<Self> {
        let mut channels = [ChannelCount::default(); 4];
        for k in 0..4 {
            if m[k].unsigned_abs() > n[k] || (m[k].unsigned_abs() % 2) != n[k] % 2 {
                return Err(ChshError::InvalidConfig(format!(
                    "channel {}: m = {} is unreachable in {} rounds",
                    Channel::ALL[k],
                    m[k],
                    n[k]
                )));
            }
            channels[k] = ChannelCount { m: m[k], n: n[k] };
        }
        Ok(RoundTally { channels })
    }

    pub fn channel(&self, channel: Channel) -> ChannelCount {
        self.channels[channel.index()]
    }

    pub fn displacements(&self) -> [i64; 4] {
        self.channels.map(|c| c.m)
    }

    pub fn round_counts(&self) -> [u64; 4] {
        self.channels.map(|c| c.n)
    }

    pub(crate) fn record_step(&mut self, channel: Channel, c: i64) {
        let slot = &mut self.channels[channel.index()];
        slot.m += c;
        slot.n += 1;
    }
}

/// Aggregates records by channel. Rejects a record whose `c` is not `a·b`.
pub fn tally(records: &[MeasurementRecord]) -> Result<RoundTally> {
    let mut t = RoundTally::default();
    for rec in records {
        let channel = rec.validate()?;
        t.record_step(channel, i64::from(rec.c));
    }
    Ok(t)
}

/// Exact `C = Σ sign_k · m_k / n_k`. Every channel must have rounds.
pub fn chsh_correlation(tally: &RoundTally) -> Result<BigRational> {
    let mut c = BigRational::from_integer(BigInt::from(0));
    for channel in Channel::ALL {
        let ChannelCount { m, n } = tally.channel(channel);
        if n == 0 {
            return Err(ChshError::EmptyChannel(channel));
        }
        c += BigRational::new(BigInt::from(channel.sign() * m), BigInt::from(n));
    }
    Ok(c)
}

pub fn is_violation(c: &BigRational, threshold: Threshold) -> bool {
    let bound = BigRational::from_integer(BigInt::from(CLASSICAL_BOUND));
    let magnitude = c.abs();
    match threshold {
        Threshold::Strict => magnitude > bound,
        Threshold::NonStrict => magnitude >= bound,
    }
}

/// Integer form of the violation test for a fixed configuration:
/// `|Σ w_k m_k|` against `2·Π n_k` with `w_k = sign_k · Π n_k / n_k`, so no
/// division or rounding ever happens.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ViolationTest {
    weights: [i128; 4],
    bound: i128,
}

impl ViolationTest {
    pub(crate) fn new(config: &ExperimentConfig) -> Self {
        // n_k ≤ 2³⁰ keeps |w_k m_k| ≤ 2¹²⁰ and the sum of four well inside i128
        let product: i128 = config.rounds().iter().map(|&n| i128::from(n)).product();
        let weights = std::array::from_fn(|k| {
            Channel::ALL[k].sign() as i128 * (product / i128::from(config.rounds()[k]))
        });
        ViolationTest {
            weights,
            bound: 2 * product,
        }
    }

    /// `Π n_k · C`.
    pub(crate) fn scaled_correlation(&self, m: [i64; 4]) -> i128 {
        self.weights
            .iter()
            .zip(m)
            .map(|(w, m)| w * i128::from(m))
            .sum()
    }

    pub(crate) fn weights(&self) -> [i128; 4] {
        self.weights
    }

    pub(crate) fn bound(&self) -> i128 {
        self.bound
    }

    pub(crate) fn violates(&self, m: [i64; 4], threshold: Threshold) -> bool {
        let s = self.scaled_correlation(m).abs();
        match threshold {
            Threshold::Strict => s > self.bound,
            Threshold::NonStrict => s >= self.bound,
        }
    }
}

/// Lossy view of an exact correlation, for display.
pub fn correlation_to_f64(c: &BigRational) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}
