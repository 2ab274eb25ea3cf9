//! Sealed votes and certifications.
//!
//! The digest is `SHA-256(position_byte || nonce)` where the position byte is
//! `0x00` for false, `0x01` for true and `0x02` for unknown, and the nonce is
//! 32 bytes.

use std::fmt;

use rand::RngCore;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest as _, Sha256};

use super::types::{Money, PlayerId, Position, PropositionId};

macro_rules! hex_bytes32 {
    ($name:ident) => {
        #[derive(Clone, Copy, PartialEq, Eq, Hash)]
        pub struct $name(pub [u8; 32]);

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!(stringify!($name), "({})"), hex::encode(self.0))
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&hex::encode(self.0))
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&hex::encode(self.0))
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let text = String::deserialize(d)?;
                let mut out = [0u8; 32];
                hex::decode_to_slice(&text, &mut out).map_err(serde::de::Error::custom)?;
                Ok($name(out))
            }
        }
    };
}

hex_bytes32!(Digest);
hex_bytes32!(Nonce);

impl Nonce {
    pub fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let mut bytes = [0u8; 32];
        rng.fill_bytes(&mut bytes);
        Nonce(bytes)
    }
}

/// Digest binding a position to a nonce.
pub fn commitment_digest(value: Position, nonce: &Nonce) -> Digest {
    let mut hasher = Sha256::new();
    hasher.update([value.position_byte()]);
    hasher.update(nonce.0);
    Digest(hasher.finalize().into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Vote,
    Certify,
}

/// A sealed position with its stake.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Commitment {
    pub player: PlayerId,
    pub target: PropositionId,
    pub role: Role,
    pub stake: Money,
    pub digest: Digest,
    pub revealed: Option<(Position, Nonce)>,
}

impl Commitment {
    /// Whether `(value, nonce)` opens this commitment.
    pub fn opens_with(&self, value: Position, nonce: &Nonce) -> bool {
        commitment_digest(value, nonce) == self.digest
    }
}
