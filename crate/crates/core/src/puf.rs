//! The dual-crossbar PUF: challenge expansion, sense-amplifier model, hidden
//! challenge and bit evaluation.
//!
//! Evaluation of one response bit:
//!
//! 1. Crossbar A is addressed directly by the challenge. Its two row currents
//!    are compared, producing the hidden bit.
//! 2. Crossbar B is addressed through the LFSR, seeded by the whitened
//!    challenge with the hidden bit folded in. Its comparison is the output.
//! 3. A random draw of dummy cells adds challenge-independent current to the
//!    supply power.

use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::crossbar::{CrossbarArray, Selection, CS_MAX};
use crate::device::{DeviceParams, Environment, Fluctuation, OperatingPoint};
use crate::error::{Error, Result};
use crate::lfsr::{Gf2Matrix, Lfsr64};
use crate::rng::{SimRng, Substreams};

/// Whitening applied to the challenge before seeding crossbar B's LFSR.
pub const B_WHITENING_MASK: u64 = 0x6a09_e667_f3bc_c908;

/// Clocks applied to crossbar B's LFSR before the first word is drawn.
///
/// The feedback polynomial is sparse, so after 64·2^k clocks a single-bit
/// seed difference is still confined to a handful of positions. This count
/// spreads every seed bit into the low bits of each of the first words.
pub const B_WARMUP_CLOCKS: u64 = 49_105;

/// Upper bound on LFSR words consumed by one expansion.
const MAX_EXPANSION_WORDS: usize = 4096;

static B_WARMUP: LazyLock<Gf2Matrix> = LazyLock::new(|| Gf2Matrix::step().pow(B_WARMUP_CLOCKS));

/// A 64-bit challenge word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Challenge(pub u64);

impl Challenge {
    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn hamming_distance(self, other: Challenge) -> u32 {
        (self.0 ^ other.0).count_ones()
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self(rng.random())
    }
}

impl fmt::Display for Challenge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

impl FromStr for Challenge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits = s.trim().trim_start_matches("0x").trim_start_matches("0X");
        if digits.is_empty() || digits.len() > 16 {
            return Err(Error::invalid(format!("challenge {s:?} must be 1-16 hex digits")));
        }
        u64::from_str_radix(digits, 16)
            .map(Challenge)
            .map_err(|e| Error::invalid(format!("challenge {s:?}: {e}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArrayId {
    A,
    B,
}

/// Which pipeline produces the response bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Architecture {
    /// Both crossbars with the hidden challenge.
    Dual,
    /// Crossbar A alone; its comparison is the response.
    Single,
}

/// Maps a challenge (and, for crossbar B, the hidden bit) to a selection.
///
/// Words are drawn from the LFSR and reduced modulo the column count until
/// `cs` distinct columns are collected, then modulo the row count until two
/// distinct rows are collected. For crossbar A the first word is the
/// challenge itself, so the leading column index is decoded directly from the
/// low challenge bits. For crossbar B the seed is
/// `challenge ^ B_WHITENING_MASK ^ hidden_bit` and the register is clocked
/// [`B_WARMUP_CLOCKS`] times first, so every seed bit (including the hidden
/// bit) reaches every drawn index.
pub fn expand_challenge(
    challenge: Challenge,
    hidden_bit: Option<bool>,
    array: ArrayId,
    cs: usize,
    dims: (usize, usize),
) -> Result<Selection> {
    let (rows, cols) = dims;
    if cs == 0 || cs > CS_MAX || cs > cols {
        return Err(Error::invalid(format!("cs = {cs} not selectable from {cols} columns")));
    }
    if rows < 2 {
        return Err(Error::invalid("at least two rows are required"));
    }
    let mut lfsr = match (array, hidden_bit) {
        (ArrayId::A, None) => Lfsr64::new(challenge.0),
        (ArrayId::B, Some(h)) => {
            let seed = challenge.0 ^ B_WHITENING_MASK ^ h as u64;
            Lfsr64::new(B_WARMUP.apply(Lfsr64::new(seed).state()))
        }
        (ArrayId::A, Some(_)) => {
            return Err(Error::invalid("crossbar A takes no hidden bit"));
        }
        (ArrayId::B, None) => return Err(Error::invalid("crossbar B requires the hidden bit")),
    };

    let mut columns = Vec::with_capacity(cs);
    let mut words = 0;
    while columns.len() < cs && words < MAX_EXPANSION_WORDS {
        let c = (lfsr.next_word() % cols as u64) as usize;
        words += 1;
        if !columns.contains(&c) {
            columns.push(c);
        }
    }
    // Deterministic fill-in for pathological tiny dimensions.
    let mut fill = 0;
    while columns.len() < cs {
        if !columns.contains(&fill) {
            columns.push(fill);
        }
        fill += 1;
    }

    let mut picked: Vec<usize> = Vec::with_capacity(2);
    while picked.len() < 2 && words < 2 * MAX_EXPANSION_WORDS {
        let r = (lfsr.next_word() % rows as u64) as usize;
        words += 1;
        if !picked.contains(&r) {
            picked.push(r);
        }
    }
    let mut fill = 0;
    while picked.len() < 2 {
        if !picked.contains(&fill) {
            picked.push(fill);
        }
        fill += 1;
    }
    Ok(Selection::new(columns, (picked[0], picked[1])))
}

/// Offset standard deviation scaled with transistor area, relative to a
/// reference device: sigma ∝ 1/sqrt(W·L).
pub fn pelgrom_offset(sigma_ref: f64, w: f64, l: f64, w_ref: f64, l_ref: f64) -> Result<f64> {
    if [w, l, w_ref, l_ref].iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return Err(Error::invalid("transistor dimensions must be positive"));
    }
    Ok(sigma_ref * (w_ref * l_ref / (w * l)).sqrt())
}

/// Comparator design parameters shared by all instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComparatorConfig {
    /// Std dev (A) of the per-comparator input-referred current offset.
    pub offset_sigma: f64,
    /// Half-width (A) of the band of |ΔI| the latch cannot resolve.
    pub sense_margin: f64,
    /// When present, `offset_sigma` is the reference-device value and is
    /// rescaled to these input-pair dimensions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizing: Option<TransistorSizing>,
}

/// Input-pair geometry relative to a reference device (any consistent unit).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransistorSizing {
    pub w: f64,
    pub l: f64,
    pub w_ref: f64,
    pub l_ref: f64,
}

impl Default for ComparatorConfig {
    fn default() -> Self {
        Self {
            offset_sigma: 5e-9,
            sense_margin: 20e-9,
            sizing: None,
        }
    }
}

impl ComparatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.offset_sigma >= 0.0 && self.offset_sigma.is_finite()) {
            return Err(Error::invalid("offset_sigma must be >= 0"));
        }
        if !(self.sense_margin >= 0.0 && self.sense_margin.is_finite()) {
            return Err(Error::invalid("sense_margin must be >= 0"));
        }
        self.effective_offset_sigma().map(|_| ())
    }

    pub fn effective_offset_sigma(&self) -> Result<f64> {
        match &self.sizing {
            None => Ok(self.offset_sigma),
            Some(t) => pelgrom_offset(self.offset_sigma, t.w, t.l, t.w_ref, t.l_ref),
        }
    }

    /// Manufactures one comparator: the offset is fixed for its lifetime.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ComparatorParams> {
        let sigma = self.effective_offset_sigma()?;
        let offset_value = if sigma > 0.0 {
            Normal::new(0.0, sigma).expect("validated").sample(rng)
        } else {
            0.0
        };
        Ok(ComparatorParams {
            offset_sigma: sigma,
            sense_margin: self.sense_margin,
            offset_value,
        })
    }
}

/// One manufactured sense amplifier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparatorParams {
    pub offset_sigma: f64,
    pub sense_margin: f64,
    pub offset_value: f64,
}

impl ComparatorParams {
    pub fn ideal() -> Self {
        Self {
            offset_sigma: 0.0,
            sense_margin: 0.0,
            offset_value: 0.0,
        }
    }

    /// Decision with the offset but no metastability.
    pub fn decide_ideal(&self, i_p: f64, i_q: f64) -> bool {
        (i_p - i_q) + self.offset_value > 0.0
    }
}

/// Latch decision: resolved when the offset-shifted difference clears the
/// sense margin, otherwise a fair coin.
pub fn msal_compare<R: Rng + ?Sized>(i_p: f64, i_q: f64, comp: &ComparatorParams, rng: &mut R) -> bool {
    let delta = (i_p - i_q) + comp.offset_value;
    if delta.abs() > comp.sense_margin {
        delta > 0.0
    } else {
        rng.random::<bool>()
    }
}

/// Non-crossbar contributions to the supply power.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerModel {
    /// Constant peripheral (CMOS) power in W.
    pub baseline_cmos_power: f64,
    /// Std dev (W) of additive measurement noise.
    pub noise_sigma: f64,
    /// Extra power (W) drawn by the output stage when it resolves to 1.
    pub output_bit_power: f64,
}

impl Default for PowerModel {
    fn default() -> Self {
        Self {
            baseline_cmos_power: 0.0,
            noise_sigma: 5e-9,
            output_bit_power: 100e-9,
        }
    }
}

impl PowerModel {
    pub fn quiet() -> Self {
        Self {
            baseline_cmos_power: 0.0,
            noise_sigma: 0.0,
            output_bit_power: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (v, name) in [
            (self.baseline_cmos_power, "baseline_cmos_power"),
            (self.noise_sigma, "noise_sigma"),
            (self.output_bit_power, "output_bit_power"),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be >= 0")));
            }
        }
        Ok(())
    }
}

/// Everything needed to manufacture instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PufConfig {
    pub device: DeviceParams,
    pub rows: usize,
    pub cols: usize,
    pub dummy_rows: usize,
    pub dummy_cols: usize,
    pub cs: usize,
    pub comparator: ComparatorConfig,
    pub power: PowerModel,
}

impl Default for PufConfig {
    fn default() -> Self {
        Self {
            device: DeviceParams::default(),
            rows: 128,
            cols: 128,
            dummy_rows: 128,
            dummy_cols: 128,
            cs: 5,
            comparator: ComparatorConfig::default(),
            power: PowerModel::default(),
        }
    }
}

impl PufConfig {
    pub fn validate(&self) -> Result<()> {
        self.device.validate()?;
        self.comparator.validate()?;
        self.power.validate()?;
        if self.rows < 2 {
            return Err(Error::invalid("crossbars need at least 2 rows"));
        }
        if self.cs == 0 || self.cs > CS_MAX {
            return Err(Error::invalid(format!("cs must lie in 1..={CS_MAX}")));
        }
        if self.cols < self.cs {
            return Err(Error::invalid("crossbars need at least cs columns"));
        }
        if self.dummy_rows == 0 || self.dummy_cols == 0 {
            return Err(Error::invalid("dummy array dimensions must be >= 1"));
        }
        Ok(())
    }
}

/// One manufactured PUF. Immutable after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct PufInstance {
    pub(crate) device: DeviceParams,
    pub(crate) cba_a: CrossbarArray,
    pub(crate) cba_b: CrossbarArray,
    pub(crate) dummy: CrossbarArray,
    pub(crate) comp_a: ComparatorParams,
    pub(crate) comp_b: ComparatorParams,
    pub(crate) power: PowerModel,
    pub(crate) cs: usize,
    pub(crate) instance_seed: u64,
}

/// Result of one bit evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalOutcome {
    pub bit: bool,
    pub hidden_bit: bool,
    /// Row currents of the output comparison (crossbar B, or A when single).
    pub i_p: f64,
    pub i_q: f64,
    /// Row currents of crossbar A's comparison.
    pub i_p_a: f64,
    pub i_q_a: f64,
    pub i_d: f64,
    pub power: f64,
}

impl PufInstance {
    /// Manufactures an instance. All variability derives from `instance_seed`.
    pub fn build(config: &PufConfig, instance_seed: u64) -> Result<Self> {
        config.validate()?;
        let streams = Substreams::new(instance_seed);
        let (r, c) = (config.rows, config.cols);
        let cba_a = CrossbarArray::build(r, c, &config.device, &mut streams.named("cba_a").rng())?;
        let cba_b = CrossbarArray::build(r, c, &config.device, &mut streams.named("cba_b").rng())?;
        let dummy = CrossbarArray::build(
            config.dummy_rows,
            config.dummy_cols,
            &config.device,
            &mut streams.named("dummy").rng(),
        )?;
        let mut comp_rng = streams.named("comparators").rng();
        let comp_a = config.comparator.sample(&mut comp_rng)?;
        let comp_b = config.comparator.sample(&mut comp_rng)?;
        Ok(Self {
            device: config.device.clone(),
            cba_a,
            cba_b,
            dummy,
            comp_a,
            comp_b,
            power: config.power.clone(),
            cs: config.cs,
            instance_seed,
        })
    }

    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        device: DeviceParams,
        cba_a: CrossbarArray,
        cba_b: CrossbarArray,
        dummy: CrossbarArray,
        comp_a: ComparatorParams,
        comp_b: ComparatorParams,
        power: PowerModel,
        cs: usize,
        instance_seed: u64,
    ) -> Result<Self> {
        device.validate()?;
        power.validate()?;
        if (cba_a.rows(), cba_a.cols()) != (cba_b.rows(), cba_b.cols()) {
            return Err(Error::invalid("crossbars A and B must have equal dimensions"));
        }
        if cba_a.rows() < 2 || cs == 0 || cs > CS_MAX || cs > cba_a.cols() {
            return Err(Error::invalid("crossbar dimensions incompatible with cs"));
        }
        Ok(Self {
            device,
            cba_a,
            cba_b,
            dummy,
            comp_a,
            comp_b,
            power,
            cs,
            instance_seed,
        })
    }

    pub fn device(&self) -> &DeviceParams {
        &self.device
    }
    pub fn cba_a(&self) -> &CrossbarArray {
        &self.cba_a
    }
    pub fn cba_b(&self) -> &CrossbarArray {
        &self.cba_b
    }
    pub fn dummy(&self) -> &CrossbarArray {
        &self.dummy
    }
    pub fn comparator_a(&self) -> &ComparatorParams {
        &self.comp_a
    }
    pub fn comparator_b(&self) -> &ComparatorParams {
        &self.comp_b
    }
    pub fn power_model(&self) -> &PowerModel {
        &self.power
    }
    pub fn cs(&self) -> usize {
        self.cs
    }
    /// Width of the hidden challenge; this architecture uses one bit.
    pub fn hidden_bits(&self) -> usize {
        1
    }
    pub fn instance_seed(&self) -> u64 {
        self.instance_seed
    }
    pub fn dims(&self) -> (usize, usize) {
        (self.cba_a.rows(), self.cba_a.cols())
    }

    /// Same arrays and comparators with a different number of selected columns.
    pub fn with_cs(&self, cs: usize) -> Result<Self> {
        if cs == 0 || cs > CS_MAX || cs > self.cba_a.cols() {
            return Err(Error::invalid(format!("cs = {cs} unsupported")));
        }
        Ok(Self { cs, ..self.clone() })
    }

    /// Same instance with both latches given a different sense margin.
    pub fn with_sense_margin(&self, margin: f64) -> Result<Self> {
        if !(margin >= 0.0 && margin.is_finite()) {
            return Err(Error::invalid("sense margin must be >= 0"));
        }
        let mut out = self.clone();
        out.comp_a.sense_margin = margin;
        out.comp_b.sense_margin = margin;
        Ok(out)
    }

    pub fn with_power_model(&self, power: PowerModel) -> Result<Self> {
        power.validate()?;
        Ok(Self { power, ..self.clone() })
    }

    pub fn selection(&self, challenge: Challenge, array: ArrayId, hidden: Option<bool>) -> Result<Selection> {
        expand_challenge(challenge, hidden, array, self.cs, self.dims())
    }

    fn array(&self, id: ArrayId) -> (&CrossbarArray, &ComparatorParams) {
        match id {
            ArrayId::A => (&self.cba_a, &self.comp_a),
            ArrayId::B => (&self.cba_b, &self.comp_b),
        }
    }

    /// Row currents (I_P, I_Q) of a selection at an operating point.
    pub fn selection_currents(&self, id: ArrayId, sel: &Selection, op: &OperatingPoint) -> Result<(f64, f64)> {
        let (arr, _) = self.array(id);
        let scale = self.device.current_scale(op);
        let p = arr.row_conductance(sel.rows.0, &sel.columns)?;
        let q = arr.row_conductance(sel.rows.1, &sel.columns)?;
        Ok((scale * p, scale * q))
    }

    fn read_pair<R: Rng + ?Sized>(
        &self,
        id: ArrayId,
        sel: &Selection,
        env: &Environment,
        shared: &Fluctuation,
        rng: &mut R,
    ) -> Result<(f64, f64)> {
        let (arr, _) = self.array(id);
        let (p, q) = sel.rows;
        Ok((
            arr.row_current_shared(&self.device, p, &sel.columns, env, shared, rng)?,
            arr.row_current_shared(&self.device, q, &sel.columns, env, shared, rng)?,
        ))
    }

    /// Offset-aware, metastability-free decision on a selection at the
    /// nominal point of `env`.
    pub fn compare_ideal(&self, id: ArrayId, sel: &Selection, env: &Environment) -> Result<bool> {
        let (i_p, i_q) = self.selection_currents(id, sel, &env.nominal_point())?;
        Ok(self.array(id).1.decide_ideal(i_p, i_q))
    }

    /// The dual-crossbar response bit.
    pub fn evaluate_bit(
        &self,
        challenge: Challenge,
        env: &Environment,
        dummy_count: usize,
        rng: &mut SimRng,
    ) -> Result<EvalOutcome> {
        self.evaluate(challenge, env, dummy_count, Architecture::Dual, rng)
    }

    /// One read event. Supply and temperature deviations are drawn once for
    /// the event; each cell adds its local share on top (see
    /// [`Environment::local_fraction`]).
    pub fn evaluate<R: Rng + ?Sized>(
        &self,
        challenge: Challenge,
        env: &Environment,
        dummy_count: usize,
        arch: Architecture,
        rng: &mut R,
    ) -> Result<EvalOutcome> {
        if dummy_count > self.dummy.len() {
            return Err(Error::invalid(format!(
                "dummy_count {dummy_count} exceeds dummy array size {}",
                self.dummy.len()
            )));
        }
        let shared = env.sample_fluctuation(rng);
        let sel_a = self.selection(challenge, ArrayId::A, None)?;
        let (i_p_a, i_q_a) = self.read_pair(ArrayId::A, &sel_a, env, &shared, rng)?;
        let hidden_bit = msal_compare(i_p_a, i_q_a, &self.comp_a, rng);

        let (bit, i_p, i_q, b_current) = match arch {
            Architecture::Dual => {
                let sel_b = self.selection(challenge, ArrayId::B, Some(hidden_bit))?;
                let (i_p, i_q) = self.read_pair(ArrayId::B, &sel_b, env, &shared, rng)?;
                (msal_compare(i_p, i_q, &self.comp_b, rng), i_p, i_q, i_p + i_q)
            }
            Architecture::Single => (hidden_bit, i_p_a, i_q_a, 0.0),
        };

        // Noise is drawn before the dummy cells so that sweeping dummy_count
        // leaves every other random quantity unchanged.
        let noise = if self.power.noise_sigma > 0.0 {
            Normal::new(0.0, self.power.noise_sigma).expect("validated").sample(rng)
        } else {
            0.0
        };
        let i_d = if dummy_count > 0 {
            let picks = rand::seq::index::sample(rng, self.dummy.len(), dummy_count);
            self.dummy.flat_current(&self.device, picks.into_iter(), env, &shared, rng)
        } else {
            0.0
        };

        let crossbar = env.read_voltage * (i_p_a + i_q_a + b_current + i_d);
        let output = if bit { self.power.output_bit_power } else { 0.0 };
        let power = (crossbar + self.power.baseline_cmos_power + output + noise).max(0.0);
        Ok(EvalOutcome {
            bit,
            hidden_bit,
            i_p,
            i_q,
            i_p_a,
            i_q_a,
            i_d,
            power,
        })
    }

    /// Deterministic response: nominal operating point, offsets applied,
    /// metastability ignored.
    pub fn evaluate_ideal(&self, challenge: Challenge, env: &Environment, arch: Architecture) -> Result<bool> {
        let sel_a = self.selection(challenge, ArrayId::A, None)?;
        let hidden = self.compare_ideal(ArrayId::A, &sel_a, env)?;
        match arch {
            Architecture::Single => Ok(hidden),
            Architecture::Dual => {
                let sel_b = self.selection(challenge, ArrayId::B, Some(hidden))?;
                self.compare_ideal(ArrayId::B, &sel_b, env)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrpFormula {
    /// C(N, cs) · C(M, 2) · l
    Eq5,
    /// C(N, cs) · C(M, 2) · log2 C(M, 2), real-valued logarithm.
    Table1,
    /// As `Table1` with the logarithm truncated to an integer.
    Table1Floor,
}

impl FromStr for CrpFormula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eq5" => Ok(Self::Eq5),
            "table1" => Ok(Self::Table1),
            "table1-floor" => Ok(Self::Table1Floor),
            other => Err(Error::invalid(format!(
                "unknown CRP formula {other:?} (eq5, table1, table1-floor)"
            ))),
        }
    }
}

/// Size of a challenge-response space.
#[derive(Clone, Debug, PartialEq)]
pub struct CrpCount {
    /// Exact count when the formula yields an integer.
    pub exact: Option<BigUint>,
    pub approx: f64,
}

impl fmt::Display for CrpCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(n) => write!(f, "{n}"),
            None => write!(f, "{:.6e}", self.approx),
        }
    }
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        // Exact at every step: the running product is C(n, i + 1).
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Number of challenge-response pairs of an N-column, M-row crossbar with
/// `cs` selected columns and an `l`-bit hidden challenge.
pub fn crp_count(n: u64, m: u64, cs: u64, l: u64, formula: CrpFormula) -> Result<CrpCount> {
    if cs == 0 || cs > n {
        return Err(Error::invalid(format!("cs = {cs} must lie in 1..={n}")));
    }
    if m < 2 {
        return Err(Error::invalid("M must be >= 2"));
    }
    let base = binomial(n, cs) * binomial(m, 2);
    let base_f = base.to_f64().unwrap_or(f64::INFINITY);
    let pairs = binomial(m, 2);
    let out = match formula {
        CrpFormula::Eq5 => {
            if l == 0 {
                return Err(Error::invalid("l must be >= 1"));
            }
            let exact = base * BigUint::from(l);
            CrpCount {
                approx: exact.to_f64().unwrap_or(f64::INFINITY),
                exact: Some(exact),
            }
        }
        CrpFormula::Table1 => CrpCount {
            exact: None,
            approx: base_f * pairs.to_f64().unwrap_or(f64::INFINITY).log2(),
        },
        CrpFormula::Table1Floor => {
            // floor(log2 x) for x >= 1 is bits - 1.
            let exact = base * BigUint::from(pairs.bits() - 1);
            CrpCount {
                approx: exact.to_f64().unwrap_or(f64::INFINITY),
                exact: Some(exact),
            }
        }
    };
    Ok(out)
}
