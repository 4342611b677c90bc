use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random source used by every stochastic component.
pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a. Stable across platforms and toolchains, unlike `DefaultHasher`.
#[derive(Clone, Copy, Debug)]
pub struct Fnv64(u64);

impl Default for Fnv64 {
    fn default() -> Self {
        Self(FNV_OFFSET)
    }
}

impl Fnv64 {
    pub fn write(&mut self, bytes: &[u8]) -> &mut Self {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(FNV_PRIME);
        }
        self
    }

    pub fn write_u64(&mut self, v: u64) -> &mut Self {
        self.write(&v.to_le_bytes())
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

/// Combines a base seed with a sequence of labelled components.
///
/// Each part is length-prefixed so `["ab", "c"]` and `["a", "bc"]` differ.
pub fn derive_seed(base: u64, parts: &[&[u8]]) -> u64 {
    let mut h = Fnv64::default();
    for p in parts {
        h.write_u64(p.len() as u64).write(p);
    }
    base ^ h.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_reference_vectors() {
        assert_eq!(Fnv64::default().write(b"").finish(), 0xcbf29ce484222325);
        assert_eq!(Fnv64::default().write(b"a").finish(), 0xaf63dc4c8601ec8c);
        assert_eq!(Fnv64::default().write(b"foobar").finish(), 0x85944171f73967e8);
    }

    #[test]
    fn derive_seed_separates_parts() {
        let a = derive_seed(7, &[b"ab", b"c"]);
        let b = derive_seed(7, &[b"a", b"bc"]);
        assert_ne!(a, b);
        assert_eq!(a, derive_seed(7, &[b"ab", b"c"]));
    }
}
