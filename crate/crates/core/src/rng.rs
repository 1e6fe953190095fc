//! Deterministic, position-addressed random streams.
//!
//! A [`RandomStream`] is a ChaCha12 keystream keyed by the 64-bit seed and a
//! 64-bit stream id. ChaCha keeps distinct stream ids in disjoint counter
//! spaces, so sub-streams obtained with [`RandomStream::substream`] never
//! overlap each other or their parent. The position counts 64-bit words
//! consumed, and `(seed, stream id, position)` fixes every later draw.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

#[derive(Clone, Debug)]
pub struct RandomStream {
    seed: u64,
    stream_id: u64,
    position: u64,
    rng: ChaCha12Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    fn with_stream(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha12Rng::from_seed(expand_seed(seed));
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            position: 0,
            rng,
        }
    }

    /// Stream for `seed` fast-forwarded to `position` words.
    pub fn at(seed: u64, position: u64) -> Self {
        let mut s = Self::new(seed);
        s.seek(position);
        s
    }

    pub fn seek(&mut self, position: u64) {
        self.position = position;
        self.rng.set_word_pos(u128::from(position) * 2);
    }

    /// Child stream number `index`. The child id hashes `(parent id, index)`,
    /// so nested splits stay reproducible and independent of the parent's
    /// position.
    pub fn substream(&self, index: u64) -> Self {
        let id = mix64(
            mix64(self.stream_id ^ 0x6A09_E667_F3BC_C909)
                ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15),
        );
        Self::with_stream(self.seed, id)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Number of 64-bit words drawn so far.
    pub fn position(&self) -> u64 {
        self.position
    }

    pub fn next_u64(&mut self) -> u64 {
        self.position += 1;
        self.rng.next_u64()
    }

    /// Uniform on the open interval (0, 1); never returns 0 or 1.
    pub fn next_open01(&mut self) -> f64 {
        // 52 bits keep k + 0.5 exact, so the largest value is 1 - 2^-53.
        const SCALE: f64 = 1.0 / (1u64 << 52) as f64;
        ((self.next_u64() >> 12) as f64 + 0.5) * SCALE
    }

    /// Uniform on the open interval (-1, 1).
    pub fn next_open_signed(&mut self) -> f64 {
        2.0 * self.next_open01() - 1.0
    }

    /// Fair +1/-1.
    pub fn next_sign(&mut self) -> f64 {
        if self.next_u64() >> 63 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

fn expand_seed(seed: u64) -> [u8; 32] {
    let mut out = [0u8; 32];
    let mut z = seed;
    for chunk in out.chunks_exact_mut(8) {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        chunk.copy_from_slice(&mix64(z).to_le_bytes());
    }
    out
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_draws() {
        let mut a = RandomStream::new(42);
        let mut b = RandomStream::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn seek_reproduces_later_draws() {
        let mut a = RandomStream::new(7);
        for _ in 0..37 {
            a.next_u64();
        }
        let mut b = RandomStream::at(7, 37);
        assert_eq!(a.position(), 37);
        for _ in 0..10 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn clone_keeps_position() {
        let mut a = RandomStream::new(3);
        a.next_u64();
        let mut b = a.clone();
        assert_eq!(a.next_open01().to_bits(), b.next_open01().to_bits());
    }

    #[test]
    fn substreams_differ_and_ignore_parent_position() {
        let root = RandomStream::new(1);
        let mut advanced = root.clone();
        advanced.next_u64();
        let mut s0 = root.substream(0);
        let mut s1 = root.substream(1);
        let mut s0b = advanced.substream(0);
        let x0 = s0.next_u64();
        assert_ne!(x0, s1.next_u64());
        assert_eq!(x0, s0b.next_u64());
        assert_ne!(
            root.substream(0).stream_id(),
            root.substream(0).substream(0).stream_id()
        );
    }

    #[test]
    fn open_unit_interval_never_hits_endpoints() {
        let mut s = RandomStream::new(9);
        for _ in 0..100_000 {
            let u = s.next_open01();
            assert!(u > 0.0 && u < 1.0);
        }
        let min = ((0u64 >> 12) as f64 + 0.5) / (1u64 << 52) as f64;
        let max = ((u64::MAX >> 12) as f64 + 0.5) / (1u64 << 52) as f64;
        assert!(min > 0.0 && max < 1.0);
    }
}
