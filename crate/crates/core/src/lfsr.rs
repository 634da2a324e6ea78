//! 64-bit Fibonacci LFSR used to expand challenges into crossbar selections.
//!
//! Taps 64, 63, 61, 60 (counted from the input end, stage 64 being the output
//! bit). The register shifts right, emits bit 0 and feeds
//! `s0 ^ s1 ^ s3 ^ s4` into bit 63. The characteristic polynomial
//! x^64 + x^4 + x^3 + x + 1 is primitive, so every nonzero state lies on the
//! single cycle of length 2^64 - 1.

use std::sync::LazyLock;

/// Replacement for the all-zero state, which the register cannot leave.
pub const ZERO_STATE_SUBSTITUTE: u64 = 0x9e37_79b9_7f4a_7c15;

/// Clocks per drawn word: each word is a fresh 64-bit slice of the sequence.
pub const WORD_CLOCKS: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lfsr64 {
    state: u64,
}

impl Lfsr64 {
    pub fn new(seed: u64) -> Self {
        Self {
            state: if seed == 0 { ZERO_STATE_SUBSTITUTE } else { seed },
        }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    /// One clock; returns the bit shifted out.
    #[inline]
    pub fn clock(&mut self) -> u64 {
        let s = self.state;
        let fb = (s ^ (s >> 1) ^ (s >> 3) ^ (s >> 4)) & 1;
        self.state = (s >> 1) | (fb << 63);
        s & 1
    }

    /// Advances by `n` clocks using a precomputed transition matrix where one
    /// is available.
    pub fn advance(&mut self, n: u64) {
        if n == WORD_CLOCKS {
            self.state = WORD_JUMP.apply(self.state);
        } else {
            self.state = Gf2Matrix::step().pow(n).apply(self.state);
        }
    }

    /// Current state as a word, then moves one word ahead.
    #[inline]
    pub fn next_word(&mut self) -> u64 {
        let w = self.state;
        self.state = WORD_JUMP.apply(w);
        w
    }
}

static WORD_JUMP: LazyLock<Gf2Matrix> = LazyLock::new(|| Gf2Matrix::step().pow(WORD_CLOCKS));

/// Linear map on GF(2)^64 stored by columns: `cols[i]` is the image of bit i.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gf2Matrix {
    cols: [u64; 64],
}

impl Gf2Matrix {
    pub fn identity() -> Self {
        let mut cols = [0u64; 64];
        for (i, c) in cols.iter_mut().enumerate() {
            *c = 1 << i;
        }
        Self { cols }
    }

    /// Transition matrix of a single clock.
    pub fn step() -> Self {
        let mut cols = [0u64; 64];
        for (i, c) in cols.iter_mut().enumerate() {
            let mut l = Lfsr64 { state: 1 << i };
            l.clock();
            *c = l.state;
        }
        Self { cols }
    }

    #[inline]
    pub fn apply(&self, mut v: u64) -> u64 {
        let mut out = 0;
        while v != 0 {
            let i = v.trailing_zeros() as usize;
            out ^= self.cols[i];
            v &= v - 1;
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut cols = [0u64; 64];
        for (c, &o) in cols.iter_mut().zip(&other.cols) {
            *c = self.apply(o);
        }
        Self { cols }
    }

    pub fn pow(&self, mut n: u64) -> Self {
        let mut base = *self;
        let mut acc = Self::identity();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            n >>= 1;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_seed_substituted() {
        assert_eq!(Lfsr64::new(0).state(), ZERO_STATE_SUBSTITUTE);
        let mut l = Lfsr64::new(0);
        for _ in 0..1000 {
            l.clock();
            assert_ne!(l.state(), 0);
        }
    }

    #[test]
    fn first_word_is_the_seed() {
        let mut l = Lfsr64::new(0xdead_beef_1234_5678);
        assert_eq!(l.next_word(), 0xdead_beef_1234_5678);
    }

    #[test]
    fn jump_matches_clocking() {
        for n in [1u64, 7, 64, 100, 1000] {
            let mut a = Lfsr64::new(0x0123_4567_89ab_cdef);
            let mut b = a;
            for _ in 0..n {
                a.clock();
            }
            b.advance(n);
            assert_eq!(a, b, "n = {n}");
        }
    }

    #[test]
    fn emitted_bits_start_with_the_seed() {
        let seed = 0xa5a5_0f0f_3c3c_9999u64;
        let mut l = Lfsr64::new(seed);
        let out = (0..64).fold(0u64, |acc, i| acc | (l.clock() << i));
        assert_eq!(out, seed);
    }

    // The order of x modulo the feedback polynomial must be exactly 2^64 - 1.
    // Equivalent statement on the state matrix: T^(2^64-1) = I and
    // T^((2^64-1)/q) != I for every prime q dividing 2^64 - 1.
    #[test]
    fn period_is_maximal() {
        let t = Gf2Matrix::step();
        let full = u64::MAX;
        assert_eq!(t.pow(full), Gf2Matrix::identity());
        let primes = [3u64, 5, 17, 257, 641, 65_537, 6_700_417];
        assert_eq!(primes.iter().product::<u64>(), full);
        for q in primes {
            assert_ne!(t.pow(full / q), Gf2Matrix::identity(), "q = {q}");
        }
    }
}
