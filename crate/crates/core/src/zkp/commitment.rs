use std::fmt;

use rand::RngCore;
use sha2::{Digest, Sha256};

/// Identifier of the commitment hash, recorded in trace headers.
pub const HASH_ID: &str = "sha256";
pub const DIGEST_LEN: usize = 32;
pub const NONCE_LEN: usize = 16;

pub type Nonce = [u8; NONCE_LEN];

pub(crate) fn random_nonce<R: RngCore + ?Sized>(rng: &mut R) -> Nonce {
    let mut n = [0u8; NONCE_LEN];
    rng.fill_bytes(&mut n);
    n
}

/// Hiding, binding commitment to a byte payload.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Commitment([u8; DIGEST_LEN]);

impl Commitment {
    pub fn to(nonce: &Nonce, payload: &[u8]) -> Self {
        let digest: [u8; DIGEST_LEN] = Sha256::new()
            .chain_update(nonce)
            .chain_update(payload)
            .finalize()
            .into();
        Commitment(digest)
    }

    pub fn opens_to(&self, nonce: &Nonce, payload: &[u8]) -> bool {
        Commitment::to(nonce, payload) == *self
    }

    pub fn as_bytes(&self) -> &[u8; DIGEST_LEN] {
        &self.0
    }
}

impl fmt::Debug for Commitment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Commitment({})", hex::encode(&self.0[..8]))
    }
}

impl fmt::Display for Commitment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

/// Commitments to the permuted graph and to the permuted cycle of one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CommitmentPair {
    pub graph: Commitment,
    pub cycle: Commitment,
}

impl CommitmentPair {
    pub const WIRE_LEN: usize = 2 * DIGEST_LEN;

    pub fn encode(&self) -> [u8; 2 * DIGEST_LEN] {
        let mut out = [0u8; 2 * DIGEST_LEN];
        out[..DIGEST_LEN].copy_from_slice(self.graph.as_bytes());
        out[DIGEST_LEN..].copy_from_slice(self.cycle.as_bytes());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_length_and_binding() {
        let nonce = [7u8; NONCE_LEN];
        let c = Commitment::to(&nonce, b"payload");
        assert_eq!(c.as_bytes().len(), DIGEST_LEN);
        assert!(c.opens_to(&nonce, b"payload"));
        assert!(!c.opens_to(&nonce, b"payloae"));
        assert!(!c.opens_to(&[8u8; NONCE_LEN], b"payload"));
    }

    #[test]
    fn known_vector() {
        // sha256(16 zero bytes || "abc"), computed with an independent implementation
        let c = Commitment::to(&[0u8; NONCE_LEN], b"abc");
        assert_eq!(
            c.to_string(),
            "277e7ff6d232b9763f4a66e8d05d210da32dac9c6dbce1026ad4cc98acb5fefe"
        );
    }
}
