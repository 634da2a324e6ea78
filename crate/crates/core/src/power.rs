//! Supply-power traces and leakage SNR.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::device::Environment;
use crate::error::{Error, Result};
use crate::puf::{Architecture, Challenge, PufInstance};
use crate::rng::Substreams;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSample {
    pub challenge_index: usize,
    pub output_bit: bool,
    pub power_w: f64,
    pub dummy_count: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PowerTrace {
    pub samples: Vec<PowerSample>,
}

impl PowerTrace {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Writes `challenge_index,output_bit,power_w,dummy_count` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["challenge_index", "output_bit", "power_w", "dummy_count"])?;
        for s in &self.samples {
            w.write_record([
                s.challenge_index.to_string(),
                u8::from(s.output_bit).to_string(),
                format!("{:e}", s.power_w),
                s.dummy_count.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Evaluates every challenge once and records the supply power.
///
/// Challenge `i` draws from `streams.child(i)`, so the trace does not depend
/// on scheduling. Reusing `streams` across dummy counts keeps every random
/// quantity except the dummy selection fixed.
pub fn collect_traces(
    puf: &PufInstance,
    challenges: &[Challenge],
    env: &Environment,
    dummy_count: usize,
    streams: &Substreams,
) -> Result<PowerTrace> {
    if challenges.is_empty() {
        return Err(Error::EmptyInput("no challenges to trace"));
    }
    let samples = challenges
        .par_iter()
        .enumerate()
        .map(|(i, &c)| {
            let mut rng = streams.child(i as u64).rng();
            let out = puf.evaluate(c, env, dummy_count, Architecture::Dual, &mut rng)?;
            Ok(PowerSample {
                challenge_index: i,
                output_bit: out.bit,
                power_w: out.power,
                dummy_count,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PowerTrace { samples })
}

/// |mean(P | bit=1) − mean(P | bit=0)| divided by the pooled within-class
/// standard deviation.
pub fn snr(trace: &PowerTrace) -> Result<f64> {
    let class = |b: bool| -> Vec<f64> {
        trace.samples.iter().filter(|s| s.output_bit == b).map(|s| s.power_w).collect()
    };
    let (ones, zeros) = (class(true), class(false));
    if ones.is_empty() || zeros.is_empty() {
        return Err(Error::UndefinedSnr("trace contains a single output class"));
    }
    if ones.len() + zeros.len() < 3 {
        return Err(Error::UndefinedSnr("pooled variance needs at least three samples"));
    }
    let stats = |xs: &[f64]| {
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
        (m, ss)
    };
    let (m1, ss1) = stats(&ones);
    let (m0, ss0) = stats(&zeros);
    let pooled = ((ss1 + ss0) / (ones.len() + zeros.len() - 2) as f64).sqrt();
    if pooled == 0.0 {
        return Err(Error::UndefinedSnr("pooled standard deviation is zero"));
    }
    Ok((m1 - m0).abs() / pooled)
}
