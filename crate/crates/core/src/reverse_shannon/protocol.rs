//! Sender and receiver of the simulation protocol.
//!
//! Message layout (most significant bit first):
//!
//! ```text
//! [ITC index, general variant only] [flag] [payload]
//! flag 0: payload is the index of the chosen element of Z, ceil(log2 |Z|) bits
//! flag 1: payload is the provisional output itself, ceil(n log2 d_out) bits
//! ```
//!
//! The sender draws a provisional output `y` through the real channel,
//! then looks in the shared random set `Z` for elements that are
//! equivalent to `y` given `x` (same Hamming distance for the BSC, same
//! joint type in general) and names one of them uniformly at random.
//! Because the channel's transition probability is constant on each
//! equivalence class and the members of `Z` are exchangeable within it,
//! the substitution leaves the output distribution exactly unchanged.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::randomness::{mix, SharedRandomness};
use super::{constrained_mi, Dmc};
use crate::error::{Error, Result};
use crate::typeclasses::{joint_type, sample_from_type, type_count, type_from_rank, type_of, TypeClass};

/// Largest shared set the sender will scan, `2^40` elements.
pub const MAX_Z_LOG2: f64 = 40.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Hamming-distance matching on bit strings packed in a `u64`.
    Bsc,
    /// Joint-type matching with one shared set per input type class.
    General,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub n: usize,
    pub eps: f64,
    pub variant: Variant,
    /// Overrides the size of every shared set (used by the exact checks).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_size: Option<u64>,
}

impl ProtocolConfig {
    pub fn new(n: usize, eps: f64, variant: Variant) -> Result<Self> {
        let cfg = ProtocolConfig { n, eps, variant, z_size: None };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_z_size(mut self, z: u64) -> Self {
        self.z_size = Some(z);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::param("block length n must be at least 1"));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::param(format!("slack eps = {} must be positive", self.eps)));
        }
        if self.z_size == Some(0) {
            return Err(Error::param("shared set size must be at least 1"));
        }
        if self.variant == Variant::Bsc && self.n > 64 {
            return Err(Error::LimitExceeded("the BSC variant packs strings in 64 bits".into()));
        }
        Ok(())
    }
}

/// The channel being simulated.
#[derive(Clone, Debug, PartialEq)]
pub enum SimChannel {
    Bsc(f64),
    Dmc(Dmc),
}

impl SimChannel {
    pub fn to_dmc(&self) -> Result<Dmc> {
        match self {
            SimChannel::Bsc(p) => Dmc::bsc(*p),
            SimChannel::Dmc(d) => Ok(d.clone()),
        }
    }
}

/// Bit-level record of one protocol run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub bits_sent: usize,
    pub fallback: bool,
    pub itc_bits: usize,
    pub index_bits: usize,
    pub raw_bits: usize,
    /// Size of the shared set that was scanned.
    pub z_size: u64,
    /// Output the receiver produces.
    pub output: Vec<usize>,
    /// The message as a string of `0`/`1`.
    pub message: String,
}

pub(crate) fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

/// `ceil(2^{n(C + eps/2)})`, or `2^{ceil(n eps / 2)}` when `C = 0`.
pub fn z_size(rate: f64, cfg: &ProtocolConfig) -> Result<u64> {
    if let Some(z) = cfg.z_size {
        return Ok(z);
    }
    let n = cfg.n as f64;
    let exponent = if rate > 1e-15 { n * (rate + cfg.eps / 2.0) } else { (n * cfg.eps / 2.0).ceil() };
    if exponent > MAX_Z_LOG2 {
        return Err(Error::LimitExceeded(format!("shared set of 2^{exponent:.2} elements")));
    }
    Ok((exponent.exp2().ceil() as u64).max(1))
}

/// Fixed width of an index into a set of `count` elements.
pub(crate) fn width_for(count: u128) -> usize {
    if count <= 1 {
        0
    } else {
        (128 - (count - 1).leading_zeros()) as usize
    }
}

fn raw_width(n: usize, d_out: usize) -> usize {
    let total = BigUint::from(d_out).pow(n as u32);
    if total <= BigUint::from(1u8) {
        0
    } else {
        (total - 1u8).bits() as usize
    }
}

fn push_bits(msg: &mut String, value: u128, width: usize) {
    for b in (0..width).rev() {
        msg.push(if (value >> b) & 1 == 1 { '1' } else { '0' });
    }
}

fn encode_letters(y: &[usize], d_out: usize) -> BigUint {
    y.iter().fold(BigUint::zero(), |acc, &b| acc * d_out + b)
}

fn decode_letters(mut v: BigUint, n: usize, d_out: usize) -> Vec<usize> {
    let mut y = vec![0; n];
    for slot in y.iter_mut().rev() {
        *slot = (&v % d_out).to_usize().expect("digit below alphabet size");
        v /= d_out;
    }
    y
}

fn push_big(msg: &mut String, v: &BigUint, width: usize) {
    for b in (0..width as u64).rev() {
        msg.push(if v.bit(b) { '1' } else { '0' });
    }
}

struct BitReader<'a> {
    bits: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    fn new(msg: &'a str) -> Result<Self> {
        if msg.bytes().any(|b| b != b'0' && b != b'1') {
            return Err(Error::Parse("message must consist of 0 and 1".into()));
        }
        Ok(BitReader { bits: msg.as_bytes(), pos: 0 })
    }

    fn take(&mut self, width: usize) -> Result<u128> {
        if width > 128 || self.pos + width > self.bits.len() {
            return Err(Error::Parse("message is too short".into()));
        }
        let v = self.bits[self.pos..self.pos + width]
            .iter()
            .fold(0u128, |acc, &b| (acc << 1) | u128::from(b - b'0'));
        self.pos += width;
        Ok(v)
    }

    fn take_big(&mut self, width: usize) -> Result<BigUint> {
        if self.pos + width > self.bits.len() {
            return Err(Error::Parse("message is too short".into()));
        }
        let v = BigUint::parse_bytes(&self.bits[self.pos..self.pos + width], 2).unwrap_or_default();
        self.pos += width;
        Ok(v)
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.bits.len() {
            return Err(Error::Parse("trailing bits in message".into()));
        }
        Ok(())
    }
}

fn check_letters(x: &[usize], n: usize, d: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::dims(format!("input has length {}, block length is {n}", x.len())));
    }
    if let Some(&a) = x.iter().find(|&&a| a >= d) {
        return Err(Error::param(format!("input letter {a} outside [0,{d})")));
    }
    Ok(())
}

fn bsc_setup(p: f64, cfg: &ProtocolConfig) -> Result<(u64, usize, u64)> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("crossover {p} outside [0,1]")));
    }
    cfg.validate()?;
    if cfg.n > 64 {
        return Err(Error::LimitExceeded("the BSC variant packs strings in 64 bits".into()));
    }
    let z = z_size(1.0 - h2(p), cfg)?;
    let mask = if cfg.n == 64 { u64::MAX } else { (1u64 << cfg.n) - 1 };
    Ok((z, width_for(u128::from(z)), mask))
}

/// Element `i` of the BSC shared set, a uniform `n`-bit string.
#[inline]
fn bsc_element(base: u64, i: u64, mask: u64) -> u64 {
    mix(base, i) & mask
}

fn pack(x: &[usize]) -> u64 {
    x.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i))
}

fn unpack(v: u64, n: usize) -> Vec<usize> {
    (0..n).map(|i| ((v >> i) & 1) as usize).collect()
}

/// Simulate `n` uses of BSC(`p`) on input `x`. `private` is the sender's
/// own randomness (channel noise and the uniform pick).
pub fn bsc_simulate(
    p: f64,
    cfg: &ProtocolConfig,
    shared: &SharedRandomness,
    x: &[usize],
    private: &mut dyn RngCore,
) -> Result<(Vec<usize>, Transcript)> {
    let (z, index_bits, mask) = bsc_setup(p, cfg)?;
    let n = cfg.n;
    check_letters(x, n, 2)?;
    let xb = pack(x);
    let mut noise = 0u64;
    for i in 0..n {
        if private.random::<f64>() < p {
            noise |= 1 << i;
        }
    }
    let yb = xb ^ noise;
    let dist = noise.count_ones();

    let base = shared.word("Z", &[]);
    let mut matches = 0u64;
    let mut chosen = 0u64;
    for i in 0..z {
        if (bsc_element(base, i, mask) ^ xb).count_ones() == dist {
            matches += 1;
            if private.random_range(0..matches) == 0 {
                chosen = i;
            }
        }
    }

    let mut message = String::new();
    let raw_bits = n;
    let (fallback, output) = if matches > 0 {
        message.push('0');
        push_bits(&mut message, u128::from(chosen), index_bits);
        (false, unpack(bsc_element(base, chosen, mask), n))
    } else {
        message.push('1');
        push_bits(&mut message, u128::from(yb), raw_bits);
        (true, unpack(yb, n))
    };
    let t = Transcript {
        bits_sent: message.len(),
        fallback,
        itc_bits: 0,
        index_bits,
        raw_bits,
        z_size: z,
        output: output.clone(),
        message,
    };
    Ok((output, t))
}

/// Receiver side of [`bsc_simulate`].
pub fn bsc_receive(p: f64, cfg: &ProtocolConfig, shared: &SharedRandomness, message: &str) -> Result<Vec<usize>> {
    let (z, index_bits, mask) = bsc_setup(p, cfg)?;
    let mut r = BitReader::new(message)?;
    let y = if r.take(1)? == 0 {
        let i = r.take(index_bits)? as u64;
        if i >= z {
            return Err(Error::Parse(format!("index {i} outside shared set of size {z}")));
        }
        unpack(bsc_element(shared.word("Z", &[]), i, mask), cfg.n)
    } else {
        unpack(r.take(cfg.n)? as u64, cfg.n)
    };
    r.finish()?;
    Ok(y)
}

/// Element `i` of the shared set for input type class `k`: an input drawn
/// uniformly from the class, passed through the channel.
pub(crate) fn dmc_element(dmc: &Dmc, shared: &SharedRandomness, tc: &TypeClass, k: u128, i: u64) -> Vec<usize> {
    let (hi, lo) = ((k >> 64) as u64, k as u64);
    let xs = sample_from_type(tc, &mut shared.stream("X", &[hi, lo, i]));
    let mut ys = shared.stream("Y", &[hi, lo, i]);
    xs.iter().map(|&a| dmc.sample(a, &mut ys)).collect()
}

struct GeneralSetup {
    tc: TypeClass,
    rank: u128,
    itc_bits: usize,
    z: u64,
    index_bits: usize,
    raw_bits: usize,
}

fn general_setup(dmc: &Dmc, cfg: &ProtocolConfig, tc: TypeClass) -> Result<GeneralSetup> {
    let count = type_count(cfg.n, dmc.inputs())
        .ok_or_else(|| Error::LimitExceeded("too many input type classes".into()))?;
    let rate = constrained_mi(dmc, &tc.frequencies())?;
    let z = z_size(rate, cfg)?;
    Ok(GeneralSetup {
        rank: tc.rank(),
        tc,
        itc_bits: width_for(count),
        z,
        index_bits: width_for(u128::from(z)),
        raw_bits: raw_width(cfg.n, dmc.outputs()),
    })
}

/// Simulate `n` uses of a general DMC on input `x`.
pub fn dmc_simulate(
    dmc: &Dmc,
    cfg: &ProtocolConfig,
    shared: &SharedRandomness,
    x: &[usize],
    private: &mut dyn RngCore,
) -> Result<(Vec<usize>, Transcript)> {
    cfg.validate()?;
    let (d_in, d_out) = (dmc.inputs(), dmc.outputs());
    check_letters(x, cfg.n, d_in)?;
    let s = general_setup(dmc, cfg, type_of(x, d_in)?)?;

    let y: Vec<usize> = x.iter().map(|&a| dmc.sample(a, private)).collect();
    let target = joint_type(x, &y, d_in, d_out)?;

    let mut matches = 0u64;
    let mut chosen: Option<(u64, Vec<usize>)> = None;
    for i in 0..s.z {
        let cand = dmc_element(dmc, shared, &s.tc, s.rank, i);
        if joint_type(x, &cand, d_in, d_out)? == target {
            matches += 1;
            if private.random_range(0..matches) == 0 {
                chosen = Some((i, cand));
            }
        }
    }

    let mut message = String::new();
    push_bits(&mut message, s.rank, s.itc_bits);
    let (fallback, output) = match chosen {
        Some((i, cand)) => {
            message.push('0');
            push_bits(&mut message, u128::from(i), s.index_bits);
            (false, cand)
        }
        None => {
            message.push('1');
            push_big(&mut message, &encode_letters(&y, d_out), s.raw_bits);
            (true, y)
        }
    };
    let t = Transcript {
        bits_sent: message.len(),
        fallback,
        itc_bits: s.itc_bits,
        index_bits: s.index_bits,
        raw_bits: s.raw_bits,
        z_size: s.z,
        output: output.clone(),
        message,
    };
    Ok((output, t))
}

/// Receiver side of [`dmc_simulate`].
pub fn dmc_receive(dmc: &Dmc, cfg: &ProtocolConfig, shared: &SharedRandomness, message: &str) -> Result<Vec<usize>> {
    cfg.validate()?;
    let count = type_count(cfg.n, dmc.inputs())
        .ok_or_else(|| Error::LimitExceeded("too many input type classes".into()))?;
    let mut r = BitReader::new(message)?;
    let rank = r.take(width_for(count))?;
    let s = general_setup(dmc, cfg, type_from_rank(cfg.n, dmc.inputs(), rank)?)?;
    let y = if r.take(1)? == 0 {
        let i = r.take(s.index_bits)? as u64;
        if i >= s.z {
            return Err(Error::Parse(format!("index {i} outside shared set of size {}", s.z)));
        }
        dmc_element(dmc, shared, &s.tc, s.rank, i)
    } else {
        let v = r.take_big(s.raw_bits)?;
        decode_letters(v, cfg.n, dmc.outputs())
    };
    r.finish()?;
    Ok(y)
}

/// Dispatch on the configured variant.
pub fn simulate(
    ch: &SimChannel,
    cfg: &ProtocolConfig,
    shared: &SharedRandomness,
    x: &[usize],
    private: &mut dyn RngCore,
) -> Result<(Vec<usize>, Transcript)> {
    match (cfg.variant, ch) {
        (Variant::Bsc, SimChannel::Bsc(p)) => bsc_simulate(*p, cfg, shared, x, private),
        (Variant::Bsc, SimChannel::Dmc(_)) => {
            Err(Error::param("the BSC variant needs a binary symmetric channel"))
        }
        (Variant::General, SimChannel::Bsc(p)) => dmc_simulate(&Dmc::bsc(*p)?, cfg, shared, x, private),
        (Variant::General, SimChannel::Dmc(d)) => dmc_simulate(d, cfg, shared, x, private),
    }
}

/// Receiver side of [`simulate`].
pub fn receive(ch: &SimChannel, cfg: &ProtocolConfig, shared: &SharedRandomness, message: &str) -> Result<Vec<usize>> {
    match (cfg.variant, ch) {
        (Variant::Bsc, SimChannel::Bsc(p)) => bsc_receive(*p, cfg, shared, message),
        (Variant::Bsc, SimChannel::Dmc(_)) => {
            Err(Error::param("the BSC variant needs a binary symmetric channel"))
        }
        (Variant::General, ch) => dmc_receive(&ch.to_dmc()?, cfg, shared, message),
    }
}
