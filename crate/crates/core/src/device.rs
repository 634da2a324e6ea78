//! Behavioral ReRAM cell model.
//!
//! Cells are operated in their high-resistance state (HRS). Base resistance is
//! lognormal across devices; a fraction of devices fail to program and are
//! stuck in their low-resistance range. Read current is Ohmic at the reference
//! point, grows semi-exponentially per 100 mV of read voltage above it, and is
//! thermally activated (Arrhenius) around the reference temperature.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::crossbar::SumStats;
use crate::error::{Error, Result};

/// Boltzmann constant in eV/K.
pub const BOLTZMANN_EV: f64 = 8.617_333_262e-5;

/// Voltage step over which the nonlinearity factor applies once.
const NONLIN_STEP_V: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceParams {
    /// Mean of ln(R / 1 Ω) over the HRS population.
    pub mu_ln_r: f64,
    /// Standard deviation of ln(R / 1 Ω).
    pub sigma_ln_r: f64,
    pub stuck_on_prob: f64,
    /// Resistance interval (Ω) of stuck-at-ON cells.
    pub lrs_range: (f64, f64),
    /// Current multiplication per +100 mV above `ref_voltage`.
    pub nonlin_alpha: f64,
    /// Arrhenius activation energy in eV.
    pub activation_energy: f64,
    pub ref_voltage: f64,
    pub ref_temperature: f64,
}

impl Default for DeviceParams {
    /// HRS median at 316 kΩ (the geometric centre of 100 kΩ..1 MΩ) with
    /// ln-sigma 0.57, so about 96% of devices land inside that decade.
    fn default() -> Self {
        Self {
            mu_ln_r: (1.0e5f64 * 1.0e6).sqrt().ln(),
            sigma_ln_r: 0.57,
            stuck_on_prob: 0.1,
            lrs_range: (20.0e3, 30.0e3),
            nonlin_alpha: 2.0,
            activation_energy: 0.1,
            ref_voltage: 0.1,
            ref_temperature: 300.0,
        }
    }
}

impl DeviceParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.mu_ln_r,
            self.sigma_ln_r,
            self.stuck_on_prob,
            self.lrs_range.0,
            self.lrs_range.1,
            self.nonlin_alpha,
            self.activation_energy,
            self.ref_voltage,
            self.ref_temperature,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("device parameters must be finite"));
        }
        if self.sigma_ln_r <= 0.0 {
            return Err(Error::invalid("sigma_ln_r must be > 0"));
        }
        if !(0.0..=1.0).contains(&self.stuck_on_prob) {
            return Err(Error::invalid("stuck_on_prob must lie in [0, 1]"));
        }
        if self.nonlin_alpha < 1.0 {
            return Err(Error::invalid("nonlin_alpha must be >= 1"));
        }
        let (lo, hi) = self.lrs_range;
        if !(lo > 0.0 && lo < hi) {
            return Err(Error::invalid("lrs_range must satisfy 0 < low < high"));
        }
        if self.activation_energy < 0.0 {
            return Err(Error::invalid("activation_energy must be >= 0"));
        }
        if self.ref_voltage <= 0.0 || self.ref_temperature <= 0.0 {
            return Err(Error::invalid("reference voltage and temperature must be > 0"));
        }
        Ok(())
    }

    pub fn median_hrs_resistance(&self) -> f64 {
        self.mu_ln_r.exp()
    }

    pub fn sample_cell<R: Rng + ?Sized>(&self, rng: &mut R) -> ReRamCell {
        if rng.random::<f64>() < self.stuck_on_prob {
            let (lo, hi) = self.lrs_range;
            ReRamCell {
                state: CellState::StuckOn,
                resistance: rng.random_range(lo..hi),
            }
        } else {
            let ln_r = Normal::new(self.mu_ln_r, self.sigma_ln_r)
                .expect("validated sigma")
                .sample(rng);
            ReRamCell {
                state: CellState::Hrs,
                resistance: ln_r.exp(),
            }
        }
    }

    /// Conductance multiplier at an operating point: `I = scale / R`.
    ///
    /// Folds the applied voltage, the semi-exponential nonlinearity and the
    /// Arrhenius factor into one number so a row read is a single sum of
    /// inverse resistances.
    pub fn current_scale(&self, op: &OperatingPoint) -> f64 {
        let v = op.voltage;
        let nonlin = self
            .nonlin_alpha
            .powf((v - self.ref_voltage) / NONLIN_STEP_V);
        let thermal = (-(self.activation_energy / BOLTZMANN_EV)
            * (1.0 / op.temperature - 1.0 / self.ref_temperature))
            .exp();
        v * nonlin * thermal
    }

    pub fn current_at(&self, cell: &ReRamCell, op: &OperatingPoint) -> f64 {
        self.current_scale(op) / cell.resistance
    }

    /// Current of one cell for a single read event; supply and temperature
    /// jitter are drawn from `rng`.
    pub fn cell_current<R: Rng + ?Sized>(
        &self,
        cell: &ReRamCell,
        env: &Environment,
        rng: &mut R,
    ) -> f64 {
        let op = env.sample_operating_point(rng);
        self.current_at(cell, &op)
    }

    /// Analytic mean and variance of a randomly sampled cell's current at a
    /// fixed operating point (HRS lognormal / uniform-LRS mixture).
    pub fn cell_current_stats(&self, op: &OperatingPoint) -> SumStats {
        let c = self.current_scale(op);
        let (mu, s2) = (self.mu_ln_r, self.sigma_ln_r * self.sigma_ln_r);
        // 1/R is lognormal(-mu, s).
        let hrs_m1 = c * (-mu + s2 / 2.0).exp();
        let hrs_m2 = c * c * (-2.0 * mu + 2.0 * s2).exp();
        let (a, b) = self.lrs_range;
        let lrs_m1 = c * (b / a).ln() / (b - a);
        let lrs_m2 = c * c / (a * b);
        let p = self.stuck_on_prob;
        let m1 = (1.0 - p) * hrs_m1 + p * lrs_m1;
        let m2 = (1.0 - p) * hrs_m2 + p * lrs_m2;
        SumStats {
            mean: m1,
            variance: (m2 - m1 * m1).max(0.0),
        }
    }

    /// Shifts `mu_ln_r` so the HRS single-cell current standard deviation at
    /// `op` equals `target_sigma`, keeping `sigma_ln_r`.
    pub fn with_hrs_current_sigma(&self, target_sigma: f64, op: &OperatingPoint) -> Result<Self> {
        if !(target_sigma > 0.0 && target_sigma.is_finite()) {
            return Err(Error::invalid("target sigma must be positive"));
        }
        let s2 = self.sigma_ln_r * self.sigma_ln_r;
        let c = self.current_scale(op);
        // sigma_I = c * exp(-mu + s2/2) * sqrt(exp(s2) - 1)
        let mu = (c * (s2 / 2.0).exp() * (s2.exp() - 1.0).sqrt() / target_sigma).ln();
        Ok(Self {
            mu_ln_r: mu,
            ..self.clone()
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellState {
    Hrs,
    StuckOn,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReRamCell {
    pub state: CellState,
    /// Resistance in Ω at the reference voltage and temperature.
    pub resistance: f64,
}

impl ReRamCell {
    pub fn hrs(resistance: f64) -> Self {
        Self {
            state: CellState::Hrs,
            resistance,
        }
    }
}

/// Operating condition of a read.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Environment {
    pub read_voltage: f64,
    pub temperature: f64,
    /// One-sigma fractional supply variation (a 3-sigma tolerance divided by 3).
    pub supply_sigma_frac: f64,
    /// Half-width in K of the uniform temperature fluctuation.
    pub temp_jitter: f64,
    /// Share of the supply and temperature variance that is independent from
    /// cell to cell. The rest is common to every cell read in one event.
    pub local_fraction: f64,
}

/// Default share of cell-local fluctuation.
pub const DEFAULT_LOCAL_FRACTION: f64 = 0.01;

/// Deviation from the nominal operating point: fractional supply offset and
/// temperature offset in K.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Fluctuation {
    pub supply: f64,
    pub temperature: f64,
}

impl Default for Environment {
    /// 100 mV read at 300 K with 10% (3σ) supply variation and ±10 K
    /// temperature fluctuation.
    fn default() -> Self {
        Self {
            read_voltage: 0.1,
            temperature: 300.0,
            supply_sigma_frac: 0.1 / 3.0,
            temp_jitter: 10.0,
            local_fraction: DEFAULT_LOCAL_FRACTION,
        }
    }
}

impl Environment {
    /// Reference conditions with every jitter source disabled.
    pub fn quiet() -> Self {
        Self {
            supply_sigma_frac: 0.0,
            temp_jitter: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.read_voltage > 0.0 && self.read_voltage <= 0.5) {
            return Err(Error::invalid("read_voltage must lie in (0, 0.5] V"));
        }
        if !(275.0..=450.0).contains(&self.temperature) {
            return Err(Error::invalid("temperature must lie in [275, 450] K"));
        }
        if !(self.supply_sigma_frac >= 0.0 && self.supply_sigma_frac.is_finite()) {
            return Err(Error::invalid("supply_sigma_frac must be >= 0"));
        }
        if !(self.temp_jitter >= 0.0 && self.temp_jitter < self.temperature) {
            return Err(Error::invalid("temp_jitter must be >= 0 and below the temperature"));
        }
        if !(0.0..=1.0).contains(&self.local_fraction) {
            return Err(Error::invalid("local_fraction must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn nominal_point(&self) -> OperatingPoint {
        OperatingPoint {
            voltage: self.read_voltage,
            temperature: self.temperature,
        }
    }

    /// Draws one full-magnitude deviation: Gaussian supply, uniform temperature.
    pub fn sample_fluctuation<R: Rng + ?Sized>(&self, rng: &mut R) -> Fluctuation {
        let mut f = Fluctuation::default();
        if self.supply_sigma_frac > 0.0 {
            f.supply = Normal::new(0.0, self.supply_sigma_frac)
                .expect("validated sigma")
                .sample(rng);
        }
        if self.temp_jitter > 0.0 {
            f.temperature = rng.random_range(-self.temp_jitter..=self.temp_jitter);
        }
        f
    }

    pub fn point_at(&self, f: &Fluctuation) -> OperatingPoint {
        OperatingPoint {
            voltage: self.read_voltage * (1.0 + f.supply),
            temperature: self.temperature + f.temperature,
        }
    }

    /// Operating point of a single cell read on its own.
    pub fn sample_operating_point<R: Rng + ?Sized>(&self, rng: &mut R) -> OperatingPoint {
        self.point_at(&self.sample_fluctuation(rng))
    }

    /// Whether cells of one read event can see different operating points.
    pub fn has_local_variation(&self) -> bool {
        self.local_fraction > 0.0 && (self.supply_sigma_frac > 0.0 || self.temp_jitter > 0.0)
    }

    /// Operating point of one cell within a read event whose shared deviation
    /// is `shared`: sqrt(1 - f) of the shared deviation plus sqrt(f) of a
    /// fresh local one, so the per-cell variance is unchanged.
    pub fn cell_point<R: Rng + ?Sized>(&self, shared: &Fluctuation, rng: &mut R) -> OperatingPoint {
        if !self.has_local_variation() {
            return self.point_at(shared);
        }
        let local = self.sample_fluctuation(rng);
        let (a, b) = ((1.0 - self.local_fraction).sqrt(), self.local_fraction.sqrt());
        self.point_at(&Fluctuation {
            supply: a * shared.supply + b * local.supply,
            temperature: a * shared.temperature + b * local.temperature,
        })
    }
}

/// A realised (voltage, temperature) pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatingPoint {
    pub voltage: f64,
    pub temperature: f64,
}
