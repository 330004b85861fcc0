//! Key pairs over a curve group.

use num_bigint::BigUint;

use super::curve::{CurveGroup, GroupPoint};
use crate::rng::DetRng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyPair {
    pub private_scalar: BigUint,
    pub public_point: GroupPoint,
}

/// Deterministic key pair from a seed: the private scalar is uniform in
/// [1, order-1], the public point is scalar * generator.
pub fn generate_keypair(group: &CurveGroup, rng_seed: u64) -> KeyPair {
    let mut rng = DetRng::from_seed(rng_seed).split("keygen");
    keypair_from_rng(group, &mut rng)
}

/// Key pair drawn from an existing stream, for wallet flows.
pub fn keypair_from_rng(group: &CurveGroup, rng: &mut DetRng) -> KeyPair {
    let private_scalar = rng.scalar_nonzero(group.order());
    keypair_from_scalar(group, private_scalar)
}

/// Key pair with a known scalar, used when an attack recovers one.
pub fn keypair_from_scalar(group: &CurveGroup, private_scalar: BigUint) -> KeyPair {
    let private_scalar = private_scalar % group.order();
    let public_point = group.mul_generator(&private_scalar);
    KeyPair {
        private_scalar,
        public_point,
    }
}
