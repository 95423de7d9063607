//! Versioned little-endian model file.
//!
//! ```text
//! "OTAE" | version u16 | d, c, m, N, T: u32 | s: f64 | boost: u8 | seed: u64
//! | epochs, examples, accumulation: u32
//! | d × (len u32, utf-8 bytes) | m × output id u32
//! | c × 2d state u16 (row-major) | c × m weight i32 (row-major)
//! ```

use std::fs;
use std::path::Path;

use crate::autoencoder::TrainedModel;
use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::tm::{ClauseBank, TmConfig, WeightMatrix};

pub const MAGIC: &[u8; 4] = b"OTAE";
pub const VERSION: u16 = 1;

pub fn to_bytes(model: &TrainedModel) -> Vec<u8> {
    let d = model.vocab.len();
    let c = model.bank.clauses();
    let m = model.outputs.len();
    let mut out = Vec::with_capacity(64 + c * 2 * d * 2 + c * m * 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for v in [d, c, m, model.bank.half() as usize, model.config.threshold as usize] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    out.extend_from_slice(&model.config.specificity.to_le_bytes());
    out.push(model.config.boost_true_positive as u8);
    out.extend_from_slice(&model.config.seed.to_le_bytes());
    for v in [
        model.config.epochs,
        model.config.number_of_examples,
        model.config.accumulation,
    ] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    for token in model.vocab.tokens() {
        out.extend_from_slice(&(token.len() as u32).to_le_bytes());
        out.extend_from_slice(token.as_bytes());
    }
    for &o in &model.outputs {
        out.extend_from_slice(&o.to_le_bytes());
    }
    for &s in model.bank.states() {
        out.extend_from_slice(&s.to_le_bytes());
    }
    for &w in model.weights.as_slice() {
        out.extend_from_slice(&w.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() < n {
            return Err(Error::ModelFormat("truncated".into()));
        }
        let (head, rest) = self.buf.split_at(n);
        self.buf = rest;
        Ok(head)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    fn usize(&mut self) -> Result<usize> {
        Ok(self.u32()? as usize)
    }
}

pub fn from_bytes(bytes: &[u8]) -> Result<TrainedModel> {
    let bad = |m: &str| Error::ModelFormat(m.to_string());
    let mut r = Reader { buf: bytes };
    if r.take(4).map_err(|_| bad("bad magic"))? != MAGIC {
        return Err(bad("bad magic"));
    }
    let version = u16::from_le_bytes(r.array()?);
    if version != VERSION {
        return Err(Error::ModelFormat(format!("unsupported version {version}")));
    }
    let d = r.usize()?;
    let c = r.usize()?;
    let m = r.usize()?;
    let half = r.u32()?;
    let threshold = r.u32()?;
    let specificity = f64::from_le_bytes(r.array()?);
    let boost = match r.array::<1>()?[0] {
        0 => false,
        1 => true,
        _ => return Err(bad("boost flag must be 0 or 1")),
    };
    let seed = u64::from_le_bytes(r.array()?);
    let epochs = r.usize()?;
    let number_of_examples = r.usize()?;
    let accumulation = r.usize()?;

    if !half.is_power_of_two() || half > 1 << 14 {
        return Err(bad("N must be a power of two up to 2^14"));
    }
    let config = TmConfig {
        clauses: c,
        threshold,
        specificity,
        state_bits: half.trailing_zeros() + 1,
        epochs,
        number_of_examples,
        accumulation,
        boost_true_positive: boost,
        seed,
    };
    config.validate()?;

    let mut tokens = Vec::with_capacity(d.min(1 << 20));
    for _ in 0..d {
        let len = r.usize()?;
        let raw = r.take(len)?;
        let token = std::str::from_utf8(raw).map_err(|_| bad("token is not UTF-8"))?;
        tokens.push(token.to_string());
    }
    let vocab = Vocabulary::from_tokens(tokens)?;

    let mut outputs = Vec::with_capacity(m.min(1 << 20));
    for _ in 0..m {
        let o = r.u32()?;
        if o as usize >= d {
            return Err(bad("output id out of range"));
        }
        outputs.push(o);
    }

    let n_states = c
        .checked_mul(2 * d)
        .ok_or_else(|| bad("state matrix too large"))?;
    let states = r
        .take(n_states.checked_mul(2).ok_or_else(|| bad("state matrix too large"))?)?
        .chunks_exact(2)
        .map(|b| u16::from_le_bytes([b[0], b[1]]))
        .collect();
    let bank = ClauseBank::from_states(c, d, half as u16, states)
        .ok_or_else(|| bad("state out of range"))?;

    let n_weights = c.checked_mul(m).ok_or_else(|| bad("weight matrix too large"))?;
    let weights = r
        .take(n_weights.checked_mul(4).ok_or_else(|| bad("weight matrix too large"))?)?
        .chunks_exact(4)
        .map(|b| i32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .collect();
    let weights = WeightMatrix::from_vec(c, m, weights).expect("sized");

    if !r.buf.is_empty() {
        return Err(bad("trailing bytes"));
    }
    Ok(TrainedModel {
        vocab,
        bank,
        weights,
        config,
        outputs,
    })
}

pub fn save(model: &TrainedModel, path: &Path) -> Result<()> {
    fs::write(path, to_bytes(model))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<TrainedModel> {
    from_bytes(&fs::read(path)?)
}
