//! Deterministic, splittable random streams.
//!
//! A [`Substreams`] node is a 64-bit key. Children are derived by mixing the
//! parent key with a label, so the stream used for, say, instance 7 /
//! challenge 12 / trial 3 depends only on the master seed and that path, never
//! on the order in which work was scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Concrete generator handed to simulation code.
pub type SimRng = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Substreams {
    key: u64,
}

impl Substreams {
    pub fn new(master_seed: u64) -> Self {
        Self {
            key: splitmix64(master_seed ^ 0x6e72_7075_665f_7331),
        }
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    /// Child stream for a numeric label (instance index, challenge index, ...).
    pub fn child(&self, label: u64) -> Self {
        Self {
            key: splitmix64(self.key.rotate_left(17) ^ splitmix64(label.wrapping_add(0x9e37_79b9))),
        }
    }

    /// Child stream for a named domain.
    pub fn named(&self, name: &str) -> Self {
        self.child(fnv1a(name.as_bytes()))
    }

    pub fn path(&self, labels: &[u64]) -> Self {
        labels.iter().fold(*self, |s, &l| s.child(l))
    }

    pub fn rng(&self) -> SimRng {
        ChaCha8Rng::seed_from_u64(self.key)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_path_same_stream() {
        let a = Substreams::new(42).path(&[3, 9, 1]).rng().random::<u64>();
        let b = Substreams::new(42).child(3).child(9).child(1).rng().random::<u64>();
        assert_eq!(a, b);
    }

    #[test]
    fn siblings_differ() {
        let root = Substreams::new(7);
        assert_ne!(root.child(0).key(), root.child(1).key());
        assert_ne!(root.child(1).child(2).key(), root.child(2).child(1).key());
        assert_ne!(root.named("a").key(), root.named("b").key());
    }
}
