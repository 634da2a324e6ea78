//! Instance files.
//!
//! Line 1 is a JSON header carrying the format version, dimensions, seed and
//! the SHA-256 of everything after the first newline. The remainder is a JSON
//! payload in which every resistance is a shortest round-trip decimal string,
//! so a reloaded instance is bit-identical to the saved one.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::crossbar::CrossbarArray;
use crate::device::{CellState, DeviceParams, ReRamCell};
use crate::error::{Error, Result};
use crate::puf::{ComparatorParams, PowerModel, PufInstance};

pub const FORMAT_NAME: &str = "nrpuf-instance";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    format: String,
    version: u32,
    rows: usize,
    cols: usize,
    dummy_rows: usize,
    dummy_cols: usize,
    instance_seed: u64,
    payload_bytes: usize,
    payload_sha256: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArrayRecord {
    rows: usize,
    cols: usize,
    /// One character per cell, row-major: `H` (HRS) or `S` (stuck-on).
    states: String,
    resistances: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Payload {
    device: DeviceParams,
    power: PowerModel,
    cs: usize,
    instance_seed: u64,
    comparator_a: ComparatorParams,
    comparator_b: ComparatorParams,
    cba_a: ArrayRecord,
    cba_b: ArrayRecord,
    dummy: ArrayRecord,
}

impl ArrayRecord {
    fn of(a: &CrossbarArray) -> Self {
        Self {
            rows: a.rows(),
            cols: a.cols(),
            states: a
                .cells()
                .iter()
                .map(|c| match c.state {
                    CellState::Hrs => 'H',
                    CellState::StuckOn => 'S',
                })
                .collect(),
            resistances: a.cells().iter().map(|c| c.resistance.to_string()).collect(),
        }
    }

    fn into_array(self, what: &str) -> Result<CrossbarArray> {
        let n = self.rows * self.cols;
        if self.states.len() != n || self.resistances.len() != n {
            return Err(Error::MalformedInstance(format!("{what}: cell count does not match dimensions")));
        }
        let cells = self
            .states
            .chars()
            .zip(&self.resistances)
            .map(|(s, r)| {
                let state = match s {
                    'H' => CellState::Hrs,
                    'S' => CellState::StuckOn,
                    other => return Err(Error::MalformedInstance(format!("{what}: unknown cell state {other:?}"))),
                };
                let resistance = r
                    .parse::<f64>()
                    .map_err(|e| Error::MalformedInstance(format!("{what}: resistance {r:?}: {e}")))?;
                Ok(ReRamCell { state, resistance })
            })
            .collect::<Result<Vec<_>>>()?;
        CrossbarArray::from_cells(self.rows, self.cols, cells)
            .map_err(|e| Error::MalformedInstance(format!("{what}: {e}")))
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Serializes an instance to the file format.
pub fn instance_to_string(puf: &PufInstance) -> String {
    let payload = Payload {
        device: puf.device().clone(),
        power: puf.power_model().clone(),
        cs: puf.cs(),
        instance_seed: puf.instance_seed(),
        comparator_a: *puf.comparator_a(),
        comparator_b: *puf.comparator_b(),
        cba_a: ArrayRecord::of(puf.cba_a()),
        cba_b: ArrayRecord::of(puf.cba_b()),
        dummy: ArrayRecord::of(puf.dummy()),
    };
    let mut body = serde_json::to_string(&payload).expect("payload serializes");
    body.push('\n');
    let (rows, cols) = puf.dims();
    let header = Header {
        format: FORMAT_NAME.into(),
        version: FORMAT_VERSION,
        rows,
        cols,
        dummy_rows: puf.dummy().rows(),
        dummy_cols: puf.dummy().cols(),
        instance_seed: puf.instance_seed(),
        payload_bytes: body.len(),
        payload_sha256: sha256_hex(body.as_bytes()),
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    out.push_str(&body);
    out
}

/// Parses and verifies an instance file's contents.
pub fn instance_from_str(text: &str) -> Result<PufInstance> {
    let (head, body) = text
        .split_once('\n')
        .ok_or_else(|| Error::MalformedInstance("missing header line".into()))?;
    let header: Header =
        serde_json::from_str(head).map_err(|e| Error::MalformedInstance(format!("header: {e}")))?;
    if header.format != FORMAT_NAME {
        return Err(Error::MalformedInstance(format!("unexpected format {:?}", header.format)));
    }
    if header.version != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            found: header.version,
            expected: FORMAT_VERSION,
        });
    }
    let actual = sha256_hex(body.as_bytes());
    if actual != header.payload_sha256 || body.len() != header.payload_bytes {
        return Err(Error::ChecksumMismatch {
            expected: header.payload_sha256,
            actual,
        });
    }
    let p: Payload = serde_json::from_str(body).map_err(|e| Error::MalformedInstance(format!("payload: {e}")))?;
    if p.instance_seed != header.instance_seed {
        return Err(Error::MalformedInstance("header and payload seeds differ".into()));
    }
    let cba_a = p.cba_a.into_array("cba_a")?;
    let cba_b = p.cba_b.into_array("cba_b")?;
    let dummy = p.dummy.into_array("dummy")?;
    if (cba_a.rows(), cba_a.cols(), dummy.rows(), dummy.cols())
        != (header.rows, header.cols, header.dummy_rows, header.dummy_cols)
    {
        return Err(Error::MalformedInstance("header dimensions do not match payload".into()));
    }
    PufInstance::from_parts(
        p.device,
        cba_a,
        cba_b,
        dummy,
        p.comparator_a,
        p.comparator_b,
        p.power,
        p.cs,
        p.instance_seed,
    )
    .map_err(|e| Error::MalformedInstance(e.to_string()))
}

pub fn save_instance(puf: &PufInstance, path: &Path) -> Result<()> {
    fs::write(path, instance_to_string(puf))?;
    Ok(())
}

pub fn load_instance(path: &Path) -> Result<PufInstance> {
    instance_from_str(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::Environment;
    use crate::puf::{Architecture, Challenge, PufConfig};
    use crate::rng::Substreams;

    fn instance() -> PufInstance {
        let cfg = PufConfig {
            rows: 16,
            cols: 16,
            dummy_rows: 4,
            dummy_cols: 4,
            ..Default::default()
        };
        PufInstance::build(&cfg, 1234).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let puf = instance();
        let back = instance_from_str(&instance_to_string(&puf)).unwrap();
        assert_eq!(back, puf);
        let env = Environment::quiet();
        let mut rng = Substreams::new(1).rng();
        for _ in 0..100 {
            let c = Challenge::random(&mut rng);
            assert_eq!(
                puf.evaluate_ideal(c, &env, Architecture::Dual).unwrap(),
                back.evaluate_ideal(c, &env, Architecture::Dual).unwrap()
            );
        }
    }

    #[test]
    fn truncation_is_a_checksum_error() {
        let text = instance_to_string(&instance());
        for cut in [text.len() - 1, text.len() - 100, text.len() / 2] {
            assert!(
                matches!(instance_from_str(&text[..cut]), Err(Error::ChecksumMismatch { .. })),
                "cut at {cut}"
            );
        }
    }

    #[test]
    fn tampering_detected() {
        let text = instance_to_string(&instance());
        let tampered = text.replacen("\"H\"", "\"S\"", 1).replacen('H', "S", 40);
        assert!(matches!(instance_from_str(&tampered), Err(Error::ChecksumMismatch { .. })));
    }

    #[test]
    fn version_and_format_checked() {
        let text = instance_to_string(&instance());
        let v2 = text.replacen("\"version\":1", "\"version\":2", 1);
        assert!(matches!(
            instance_from_str(&v2),
            Err(Error::VersionMismatch { found: 2, expected: 1 })
        ));
        assert!(matches!(instance_from_str("garbage"), Err(Error::MalformedInstance(_))));
        assert!(matches!(instance_from_str("{}\n{}"), Err(Error::MalformedInstance(_))));
        let other = text.replacen(FORMAT_NAME, "something-else", 1);
        assert!(matches!(instance_from_str(&other), Err(Error::MalformedInstance(_))));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("puf.json");
        let puf = instance();
        save_instance(&puf, &path).unwrap();
        assert_eq!(load_instance(&path).unwrap(), puf);
        assert!(matches!(load_instance(&dir.path().join("missing")), Err(Error::Io(_))));
    }
}
