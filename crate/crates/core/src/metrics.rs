//! PUF quality metrics over recorded responses, and avalanche (SAC) probes.
//!
//! A response is an n-bit vector whose bit j is the output for the j-th
//! challenge of a challenge set. [`ResponseRecord`] holds one response per
//! (instance, challenge set, trial).
//!
//! Pairwise Hamming-distance metrics are computed from per-bit one counts: for
//! K vectors with k_j ones at bit j, the sum of HD over all pairs equals
//! Σ_j k_j (K − k_j). Totals stay integral until the final percentage.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::crossbar::Selection;
use crate::device::Environment;
use crate::error::{Error, Result};
use crate::puf::{Architecture, ArrayId, Challenge, PufInstance};
use crate::stats::Summary;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; word_count(len)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn hamming_distance(&self, other: &Self) -> Result<usize> {
        if self.len != other.len {
            return Err(Error::invalid("bit vectors differ in length"));
        }
        Ok(self.words.iter().zip(&other.words).map(|(a, b)| (a ^ b).count_ones() as usize).sum())
    }

    pub fn complement(&self) -> Self {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        if self.len % 64 != 0 {
            if let Some(last) = out.words.last_mut() {
                *last &= (1u64 << (self.len % 64)) - 1;
            }
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }
}

/// Responses indexed by (instance, challenge set, trial), each `n` bits wide.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResponseRecord {
    p: usize,
    c: usize,
    tr: usize,
    n: usize,
    stride: usize,
    data: Vec<u64>,
}

impl ResponseRecord {
    pub fn new(p: usize, c: usize, tr: usize, n: usize) -> Result<Self> {
        if p == 0 || c == 0 || tr == 0 || n == 0 {
            return Err(Error::invalid("response record dimensions must be >= 1"));
        }
        let stride = word_count(n);
        Ok(Self {
            p,
            c,
            tr,
            n,
            stride,
            data: vec![0; p * c * tr * stride],
        })
    }

    pub fn from_fn(
        p: usize,
        c: usize,
        tr: usize,
        n: usize,
        mut f: impl FnMut(usize, usize, usize, usize) -> bool,
    ) -> Result<Self> {
        let mut rec = Self::new(p, c, tr, n)?;
        for i in 0..p {
            for ch in 0..c {
                for t in 0..tr {
                    for j in 0..n {
                        rec.set(i, ch, t, j, f(i, ch, t, j));
                    }
                }
            }
        }
        Ok(rec)
    }

    /// `(p, c, tr, n)`.
    pub fn dims(&self) -> (usize, usize, usize, usize) {
        (self.p, self.c, self.tr, self.n)
    }

    fn offset(&self, i: usize, ch: usize, t: usize) -> usize {
        assert!(i < self.p && ch < self.c && t < self.tr, "response index out of range");
        ((i * self.c + ch) * self.tr + t) * self.stride
    }

    fn words(&self, i: usize, ch: usize, t: usize) -> &[u64] {
        let o = self.offset(i, ch, t);
        &self.data[o..o + self.stride]
    }

    pub fn get(&self, i: usize, ch: usize, t: usize, j: usize) -> bool {
        assert!(j < self.n, "bit {j} out of range {}", self.n);
        self.words(i, ch, t)[j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, ch: usize, t: usize, j: usize, bit: bool) {
        assert!(j < self.n, "bit {j} out of range {}", self.n);
        let o = self.offset(i, ch, t) + j / 64;
        let mask = 1u64 << (j % 64);
        if bit {
            self.data[o] |= mask;
        } else {
            self.data[o] &= !mask;
        }
    }

    /// Stores a whole response.
    pub fn set_response(&mut self, i: usize, ch: usize, t: usize, bits: &BitVector) -> Result<()> {
        if bits.len() != self.n {
            return Err(Error::invalid(format!("response has {} bits, record expects {}", bits.len(), self.n)));
        }
        let o = self.offset(i, ch, t);
        self.data[o..o + self.stride].copy_from_slice(&bits.words);
        Ok(())
    }

    pub fn response(&self, i: usize, ch: usize, t: usize) -> BitVector {
        BitVector {
            len: self.n,
            words: self.words(i, ch, t).to_vec(),
        }
    }

    /// Σ over all unordered pairs of HD among the given responses.
    fn pairwise_hd_total<'a>(&'a self, responses: impl Iterator<Item = &'a [u64]>) -> u64 {
        let mut ones = vec![0u64; self.n];
        let mut k = 0u64;
        for words in responses {
            k += 1;
            for (j, o) in ones.iter_mut().enumerate() {
                *o += words[j / 64] >> (j % 64) & 1;
            }
        }
        ones.iter().map(|&kj| kj * (k - kj)).sum()
    }
}

fn pairs(k: usize) -> u64 {
    (k as u64) * (k as u64).saturating_sub(1) / 2
}

fn percent(total: u64, denom: u64) -> f64 {
    100.0 * total as f64 / denom as f64
}

/// Fraction of ones in a response, in percent.
pub fn uniformity(response: &BitVector) -> Result<f64> {
    if response.is_empty() {
        return Err(Error::EmptyInput("uniformity of an empty response"));
    }
    Ok(percent(response.count_ones() as u64, response.len() as u64))
}

/// Fraction of instances producing 1 at bit `j` of one (challenge, trial)
/// slice, in percent.
pub fn bit_aliasing(rec: &ResponseRecord, ch: usize, t: usize, j: usize) -> Result<f64> {
    let (p, c, tr, n) = rec.dims();
    if p < 2 {
        return Err(Error::InsufficientData("bit-aliasing needs at least 2 instances".into()));
    }
    for (idx, len, what) in [(ch, c, "challenge"), (t, tr, "trial"), (j, n, "bit")] {
        if idx >= len {
            return Err(Error::IndexOutOfRange { what, index: idx, len });
        }
    }
    let ones = (0..p).filter(|&i| rec.get(i, ch, t, j)).count();
    Ok(percent(ones as u64, p as u64))
}

/// Mean inter-instance fractional HD over all instance pairs, averaged over
/// every (challenge, trial) slice, in percent.
pub fn uniqueness(rec: &ResponseRecord) -> Result<f64> {
    let (p, c, tr, n) = rec.dims();
    if p < 2 {
        return Err(Error::InsufficientData("uniqueness needs at least 2 instances".into()));
    }
    let mut total = 0;
    for ch in 0..c {
        for t in 0..tr {
            total += rec.pairwise_hd_total((0..p).map(|i| rec.words(i, ch, t)));
        }
    }
    Ok(percent(total, pairs(p) * (n * c * tr) as u64))
}

/// Mean intra-instance fractional HD over all challenge-set pairs of
/// instance `i`, averaged over trials, in percent.
pub fn diffuseness(rec: &ResponseRecord, i: usize) -> Result<f64> {
    let (p, c, tr, n) = rec.dims();
    if i >= p {
        return Err(Error::IndexOutOfRange { what: "instance", index: i, len: p });
    }
    if c < 2 {
        return Err(Error::InsufficientData("diffuseness needs at least 2 challenge sets".into()));
    }
    let total: u64 = (0..tr)
        .map(|t| rec.pairwise_hd_total((0..c).map(|ch| rec.words(i, ch, t))))
        .sum();
    Ok(percent(total, pairs(c) * (n * tr) as u64))
}

/// Mean fractional HD over all trial pairs of one (instance, challenge set),
/// in percent.
pub fn bit_error_rate(rec: &ResponseRecord, i: usize, ch: usize) -> Result<f64> {
    let (p, c, tr, n) = rec.dims();
    if i >= p {
        return Err(Error::IndexOutOfRange { what: "instance", index: i, len: p });
    }
    if ch >= c {
        return Err(Error::IndexOutOfRange { what: "challenge", index: ch, len: c });
    }
    if tr < 2 {
        return Err(Error::InsufficientData("bit error rate needs at least 2 trials".into()));
    }
    let total = rec.pairwise_hd_total((0..tr).map(|t| rec.words(i, ch, t)));
    Ok(percent(total, pairs(tr) * n as u64))
}

pub fn reliability(rec: &ResponseRecord, i: usize, ch: usize) -> Result<f64> {
    Ok(100.0 - bit_error_rate(rec, i, ch)?)
}

/// Per-response uniformity over every instance and challenge set of trial `t`.
pub fn uniformity_values(rec: &ResponseRecord, t: usize) -> Vec<f64> {
    let (p, c, _, _) = rec.dims();
    let mut out = Vec::with_capacity(p * c);
    for i in 0..p {
        for ch in 0..c {
            out.push(uniformity(&rec.response(i, ch, t)).expect("n >= 1"));
        }
    }
    out
}

/// Bit-aliasing of every (challenge set, bit) at trial `t`.
pub fn bit_aliasing_values(rec: &ResponseRecord, t: usize) -> Result<Vec<f64>> {
    let (_, c, _, n) = rec.dims();
    let mut out = Vec::with_capacity(c * n);
    for ch in 0..c {
        for j in 0..n {
            out.push(bit_aliasing(rec, ch, t, j)?);
        }
    }
    Ok(out)
}

/// Fractional HD of every instance pair for every challenge set at trial `t`.
pub fn uniqueness_values(rec: &ResponseRecord, t: usize) -> Result<Vec<f64>> {
    let (p, c, _, n) = rec.dims();
    if p < 2 {
        return Err(Error::InsufficientData("uniqueness needs at least 2 instances".into()));
    }
    let mut out = Vec::with_capacity(pairs(p) as usize * c);
    for ch in 0..c {
        for a in 0..p {
            for b in a + 1..p {
                let hd: u32 = rec
                    .words(a, ch, t)
                    .iter()
                    .zip(rec.words(b, ch, t))
                    .map(|(x, y)| (x ^ y).count_ones())
                    .sum();
                out.push(percent(hd as u64, n as u64));
            }
        }
    }
    Ok(out)
}

pub fn diffuseness_values(rec: &ResponseRecord) -> Result<Vec<f64>> {
    (0..rec.dims().0).map(|i| diffuseness(rec, i)).collect()
}

pub fn bit_error_rate_values(rec: &ResponseRecord) -> Result<Vec<f64>> {
    let (p, c, _, _) = rec.dims();
    let mut out = Vec::with_capacity(p * c);
    for i in 0..p {
        for ch in 0..c {
            out.push(bit_error_rate(rec, i, ch)?);
        }
    }
    Ok(out)
}

/// Means and spreads of every metric distribution in a record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub uniformity: Summary,
    pub bit_aliasing: Option<Summary>,
    pub uniqueness: Option<Summary>,
    pub diffuseness: Option<Summary>,
    pub bit_error_rate: Option<Summary>,
}

impl MetricSummary {
    /// Metrics whose preconditions the record does not meet are `None`.
    pub fn of(rec: &ResponseRecord) -> Self {
        let (p, c, tr, _) = rec.dims();
        Self {
            uniformity: Summary::of(&uniformity_values(rec, 0)),
            bit_aliasing: (p >= 2).then(|| Summary::of(&bit_aliasing_values(rec, 0).expect("p >= 2"))),
            uniqueness: (p >= 2).then(|| Summary::of(&uniqueness_values(rec, 0).expect("p >= 2"))),
            diffuseness: (c >= 2).then(|| Summary::of(&diffuseness_values(rec).expect("c >= 2"))),
            bit_error_rate: (tr >= 2).then(|| Summary::of(&bit_error_rate_values(rec).expect("tr >= 2"))),
        }
    }
}

/// Output transition rates indexed by (replaced columns j, replaced rows k).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SacMap {
    /// `rates[j][k]` in percent.
    pub rates: Vec<Vec<f64>>,
    pub samples: usize,
}

impl SacMap {
    pub fn max_j(&self) -> usize {
        self.rates.len() - 1
    }

    pub fn max_k(&self) -> usize {
        self.rates[0].len() - 1
    }

    pub fn rate(&self, j: usize, k: usize) -> f64 {
        self.rates[j][k]
    }

    /// Largest |rate − 50| over every cell except the unperturbed (0, 0).
    pub fn max_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for (j, row) in self.rates.iter().enumerate() {
            for (k, &r) in row.iter().enumerate() {
                if (j, k) != (0, 0) {
                    worst = worst.max((r - 50.0).abs());
                }
            }
        }
        worst
    }

    /// Cell-wise mean of several maps with the same shape and sample count.
    pub fn average(maps: &[SacMap]) -> Result<SacMap> {
        let first = maps.first().ok_or(Error::EmptyInput("no maps to average"))?;
        let shape = (first.rates.len(), first.rates[0].len());
        if maps.iter().any(|m| (m.rates.len(), m.rates[0].len()) != shape) {
            return Err(Error::invalid("maps differ in shape"));
        }
        let mut rates = vec![vec![0.0; shape.1]; shape.0];
        for m in maps {
            for (acc, row) in rates.iter_mut().zip(&m.rates) {
                for (a, r) in acc.iter_mut().zip(row) {
                    *a += r / maps.len() as f64;
                }
            }
        }
        Ok(SacMap {
            rates,
            samples: first.samples * maps.len(),
        })
    }
}

/// Replaces `j` column positions and `k` row positions of `reference` with
/// indices it does not contain. The result differs from the reference in
/// exactly `j` columns and `k` rows as sets.
pub fn perturb_selection<R: Rng + ?Sized>(
    reference: &Selection,
    j: usize,
    k: usize,
    dims: (usize, usize),
    rng: &mut R,
) -> Result<Selection> {
    let (rows, cols) = dims;
    reference.validate(rows, cols)?;
    let cs = reference.columns.len();
    if j > cs || j > cols - cs {
        return Err(Error::invalid(format!("cannot replace {j} of {cs} columns in a {cols}-column array")));
    }
    if k > 2 || k > rows - 2 {
        return Err(Error::invalid(format!("cannot replace {k} rows in a {rows}-row array")));
    }
    let mut out = reference.clone();

    let free_cols: Vec<usize> = (0..cols).filter(|c| !reference.columns.contains(c)).collect();
    let positions = sample(rng, cs, j);
    let picks = sample(rng, free_cols.len(), j);
    for (pos, pick) in positions.iter().zip(picks.iter()) {
        out.columns[pos] = free_cols[pick];
    }

    let (p, q) = reference.rows;
    let free_rows: Vec<usize> = (0..rows).filter(|&r| r != p && r != q).collect();
    let positions = sample(rng, 2, k);
    let picks = sample(rng, free_rows.len(), k);
    for (pos, pick) in positions.iter().zip(picks.iter()) {
        if pos == 0 {
            out.rows.0 = free_rows[pick];
        } else {
            out.rows.1 = free_rows[pick];
        }
    }
    Ok(out)
}

/// Avalanche map at selection level.
///
/// For every (j, k) up to the limits, `samples` selections are drawn that
/// replace j columns and k rows of the reference, and the noise-free output
/// is compared with the reference output.
///
/// With [`Architecture::Single`] the reference addresses crossbar A and its
/// comparison is the output. With [`Architecture::Dual`] two crossbar-B
/// selections are drawn first, one per hidden-bit value; crossbar A's decision
/// picks which of them is used, and the chosen B selection is perturbed by the
/// same (j, k) as A.
#[allow(clippy::too_many_arguments)]
pub fn sac_map<R: Rng + ?Sized>(
    puf: &PufInstance,
    env: &Environment,
    reference: &Selection,
    max_j: usize,
    max_k: usize,
    samples: usize,
    arch: Architecture,
    rng: &mut R,
) -> Result<SacMap> {
    let dims = puf.dims();
    let (rows, cols) = dims;
    reference.validate(rows, cols)?;
    let cs = reference.columns.len();
    if samples == 0 {
        return Err(Error::invalid("samples must be >= 1"));
    }
    if max_j > cs || max_j > cols - cs {
        return Err(Error::invalid(format!("max_j = {max_j} exceeds what cs = {cs} allows")));
    }
    if max_k > 2 || max_k > rows - 2 {
        return Err(Error::invalid(format!("max_k = {max_k} exceeds the available rows")));
    }

    let b_refs = match arch {
        Architecture::Single => None,
        Architecture::Dual => Some([random_selection(cs, dims, rng), random_selection(cs, dims, rng)]),
    };
    let output = |sel_a: &Selection, j: usize, k: usize, rng: &mut R| -> Result<bool> {
        let hidden = puf.compare_ideal(ArrayId::A, sel_a, env)?;
        match &b_refs {
            None => Ok(hidden),
            Some(refs) => {
                let base = &refs[hidden as usize];
                let sel_b = if (j, k) == (0, 0) {
                    base.clone()
                } else {
                    perturb_selection(base, j, k, dims, rng)?
                };
                puf.compare_ideal(ArrayId::B, &sel_b, env)
            }
        }
    };

    let reference_out = output(reference, 0, 0, rng)?;
    let mut rates = vec![vec![0.0; max_k + 1]; max_j + 1];
    for (j, row) in rates.iter_mut().enumerate() {
        for (k, rate) in row.iter_mut().enumerate() {
            let mut flips = 0u64;
            for _ in 0..samples {
                let sel = perturb_selection(reference, j, k, dims, rng)?;
                if output(&sel, j, k, rng)? != reference_out {
                    flips += 1;
                }
            }
            *rate = percent(flips, samples as u64);
        }
    }
    Ok(SacMap { rates, samples })
}

/// Uniformly random selection: `cs` distinct columns and two distinct rows.
pub fn random_selection<R: Rng + ?Sized>(cs: usize, dims: (usize, usize), rng: &mut R) -> Selection {
    let (rows, cols) = dims;
    let columns = sample(rng, cols, cs).into_vec();
    let r = sample(rng, rows, 2);
    Selection::new(columns, (r.index(0), r.index(1)))
}

/// Flips `hd` distinct random bits of `c`.
pub fn flip_bits<R: Rng + ?Sized>(c: Challenge, hd: usize, rng: &mut R) -> Result<Challenge> {
    if hd > 64 {
        return Err(Error::invalid(format!("cannot flip {hd} of 64 bits")));
    }
    let mask = sample(rng, 64, hd).iter().fold(0u64, |m, b| m | 1 << b);
    Ok(Challenge(c.0 ^ mask))
}

/// Percentage of base challenges whose noise-free output changes when `hd`
/// random challenge bits are flipped.
pub fn sac_challenge_test<R: Rng + ?Sized>(
    puf: &PufInstance,
    env: &Environment,
    base_challenges: &[Challenge],
    hd: usize,
    arch: Architecture,
    rng: &mut R,
) -> Result<f64> {
    if base_challenges.is_empty() {
        return Err(Error::EmptyInput("no base challenges"));
    }
    let mut flips = 0u64;
    for &c in base_challenges {
        let neighbour = flip_bits(c, hd, rng)?;
        if puf.evaluate_ideal(c, env, arch)? != puf.evaluate_ideal(neighbour, env, arch)? {
            flips += 1;
        }
    }
    Ok(percent(flips, base_challenges.len() as u64))
}

/// A worst-case challenge set: `n` challenges, each within Hamming distance
/// `max_hd` (and at least 1) of a random base challenge.
pub fn clustered_challenges<R: Rng + ?Sized>(n: usize, max_hd: usize, rng: &mut R) -> Result<Vec<Challenge>> {
    if max_hd == 0 || max_hd > 64 {
        return Err(Error::invalid("max_hd must lie in 1..=64"));
    }
    let base = Challenge::random(rng);
    (0..n)
        .map(|_| {
            let hd = rng.random_range(1..=max_hd);
            flip_bits(base, hd, rng)
        })
        .collect()
}
