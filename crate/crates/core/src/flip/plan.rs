//! Sign-flip plans: `w` sign vectors in `{-1, +1}^n`, the first being all `+1`.
//!
//! Signs are stored bit-packed, one row per flip; a set bit means `-1`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::RngCore;

use crate::error::{Error, Result};
use crate::rng::stream;

/// Largest `n` for which full enumeration is allowed.
pub const MAX_EXHAUSTIVE_N: usize = 20;

/// Stream id reserved for without-replacement draws.
const SAMPLING_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMode {
    WithReplacement,
    WithoutReplacement,
    Exhaustive,
}

impl SamplingMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SamplingMode::WithReplacement => "with-replacement",
            SamplingMode::WithoutReplacement => "without-replacement",
            SamplingMode::Exhaustive => "exhaustive",
        }
    }
}

impl fmt::Display for SamplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SamplingMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "with-replacement" => Ok(SamplingMode::WithReplacement),
            "without-replacement" => Ok(SamplingMode::WithoutReplacement),
            "exhaustive" => Ok(SamplingMode::Exhaustive),
            other => Err(Error::InvalidInput(format!(
                "unknown sampling mode `{other}` (expected with-replacement, \
                 without-replacement or exhaustive)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipPlan {
    n: usize,
    w: usize,
    mode: SamplingMode,
    seed: u64,
    words: usize,
    bits: Vec<u64>,
}

fn tail_mask(n: usize) -> u64 {
    match n % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

impl FlipPlan {
    pub fn new(n: usize, w: usize, mode: SamplingMode, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Plan("no observations".into()));
        }
        if w < 2 {
            return Err(Error::Plan(format!("w = {w}, need at least 2")));
        }
        let words = n.div_ceil(64);
        let bits = match mode {
            SamplingMode::WithReplacement => with_replacement(n, w, words, seed),
            SamplingMode::WithoutReplacement => without_replacement(n, w, words, seed)?,
            SamplingMode::Exhaustive => {
                if n > MAX_EXHAUSTIVE_N {
                    return Err(Error::Plan(format!(
                        "exhaustive plan needs n <= {MAX_EXHAUSTIVE_N}, got {n}"
                    )));
                }
                if w != 1usize << n {
                    return Err(Error::Plan(format!(
                        "exhaustive plan needs w = 2^{n} = {}, got {w}",
                        1usize << n
                    )));
                }
                (0..w as u64).collect()
            }
        };
        Ok(Self {
            n,
            w,
            mode,
            seed,
            words,
            bits,
        })
    }

    /// All `2^n` sign vectors; row `j` has `-1` exactly at the set bits of `j`.
    pub fn exhaustive(n: usize) -> Result<Self> {
        if n > MAX_EXHAUSTIVE_N {
            return Err(Error::Plan(format!(
                "exhaustive plan needs n <= {MAX_EXHAUSTIVE_N}, got {n}"
            )));
        }
        Self::new(n, 1usize << n, SamplingMode::Exhaustive, 0)
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn w(&self) -> usize {
        self.w
    }
    pub fn mode(&self) -> SamplingMode {
        self.mode
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Packed row `j`: bit `i` of word `i / 64` is set when `g_ji = -1`.
    pub fn row_bits(&self, j: usize) -> &[u64] {
        &self.bits[j * self.words..(j + 1) * self.words]
    }

    pub fn is_negative(&self, j: usize, i: usize) -> bool {
        self.row_bits(j)[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn sign(&self, j: usize, i: usize) -> f64 {
        if self.is_negative(j, i) {
            -1.0
        } else {
            1.0
        }
    }

    pub fn signs_row(&self, j: usize) -> Vec<i8> {
        (0..self.n)
            .map(|i| if self.is_negative(j, i) { -1 } else { 1 })
            .collect()
    }
}

/// Row `j` comes from stream `j` of the seed, so any row can be regenerated alone.
fn random_row(n: usize, words: usize, seed: u64, j: usize, out: &mut [u64]) {
    let mut rng = stream(seed, j as u64);
    for word in out.iter_mut() {
        *word = rng.next_u64();
    }
    out[words - 1] &= tail_mask(n);
}

fn with_replacement(n: usize, w: usize, words: usize, seed: u64) -> Vec<u64> {
    let mut bits = vec![0u64; w * words];
    let fill = |(j, row): (usize, &mut [u64])| {
        if j > 0 {
            random_row(n, words, seed, j, row);
        }
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        bits.par_chunks_mut(words).enumerate().for_each(fill);
    }
    #[cfg(not(feature = "parallel"))]
    bits.chunks_mut(words).enumerate().for_each(fill);
    bits
}

fn without_replacement(n: usize, w: usize, words: usize, seed: u64) -> Result<Vec<u64>> {
    if n <= MAX_EXHAUSTIVE_N {
        let total = 1usize << n;
        if w > total {
            return Err(Error::Plan(format!(
                "w = {w} exceeds the 2^{n} = {total} distinct sign vectors"
            )));
        }
        let mut rng = stream(seed, SAMPLING_STREAM);
        let mut bits = Vec::with_capacity(w);
        bits.push(0u64);
        bits.extend(
            index::sample(&mut rng, total - 1, w - 1)
                .into_iter()
                .map(|k| (k + 1) as u64),
        );
        return Ok(bits);
    }
    // 2^n is astronomically larger than any feasible w here; rejection sampling
    // against the rows seen so far.
    let mut bits = vec![0u64; words];
    let mut seen: HashSet<Vec<u64>> = HashSet::with_capacity(w);
    seen.insert(vec![0u64; words]);
    let mut row = vec![0u64; words];
    let mut draw = 0usize;
    while seen.len() < w {
        draw += 1;
        random_row(n, words, seed, draw, &mut row);
        if seen.insert(row.clone()) {
            bits.extend_from_slice(&row);
        }
    }
    Ok(bits)
}

pub fn make_flip_plan(n: usize, w: usize, mode: SamplingMode, seed: u64) -> Result<FlipPlan> {
    FlipPlan::new(n, w, mode, seed)
}
