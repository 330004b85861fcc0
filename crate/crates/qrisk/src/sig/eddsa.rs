//! Deterministic Schnorr-family signatures in two wire-incompatible variants.
//!
//! Both variants commit to an ephemeral point R = r*G with r derived by
//! hashing secret material together with the message, then bind a challenge
//! c = H(R, pubkey, message). They differ in how the response folds in the
//! long-term secret, and the difference changes what the verifier can check.
//!
//! The additive variant ("zcash" here) responds s = r + c*a for account
//! secret a and verifies s*G == R + c*A against the public key A = a*G.
//!
//! The multiplied variant ("monero" here) multiplies the signing exponent
//! into the whole sum: s = (r + c)*k. A verifier holding K = k*G cannot
//! check that form, because s*G == R' requires knowing k*R which is a
//! Diffie-Hellman combination of two public points. The scheme therefore
//! publishes the inverse point as the account key: the stored secret is x,
//! the public key is X = x*G, and the signing exponent is k = x^-1 mod n.
//! Then s*X = (r + c)*k*x*G = (r + c)*G, so the public check becomes
//! s*X == R + c*G, computable from the signature and the key alone.
//! Recovering x from X by discrete log yields k immediately, so the
//! inversion does not change the attack surface.
//!
//! The two variants reject each other's signatures both structurally (the
//! verification equations differ) and cryptographically (the challenge
//! hashes use distinct domain tags).

use num_bigint::BigUint;

use super::SigError;
use crate::ec::curve::{CurveGroup, GroupPoint};
use crate::ec::field::mod_inv;
use crate::ec::hash::hash_to_scalar;
use crate::ec::keys::KeyPair;

const MONERO_NONCE_TAG: &str = "eddsa-m/r";
const MONERO_CHALLENGE_TAG: &str = "eddsa-m/c";
const ZCASH_NONCE_TAG: &str = "eddsa-z/r";
const ZCASH_CHALLENGE_TAG: &str = "eddsa-z/c";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EddsaSignature {
    pub commitment: GroupPoint,
    pub response: BigUint,
}

fn scalar_bytes(v: &BigUint) -> Vec<u8> {
    v.to_bytes_be()
}

/// Multiplied-form signing. The signing exponent is the inverse of the
/// stored account secret; see the module docs for why.
pub fn eddsa_sign_monero(
    message: &[u8],
    signer: &KeyPair,
    group: &CurveGroup,
) -> Result<EddsaSignature, SigError> {
    let n = group.order();
    let k = mod_inv(&signer.private_scalar, n)?;
    let r = hash_to_scalar(MONERO_NONCE_TAG, &[&scalar_bytes(&k), message], n);
    let commitment = group.mul_generator(&r);
    let c = hash_to_scalar(
        MONERO_CHALLENGE_TAG,
        &[
            &commitment.to_bytes(),
            &signer.public_point.to_bytes(),
            message,
        ],
        n,
    );
    let response = (((&r + &c) % n) * &k) % n;
    Ok(EddsaSignature {
        commitment,
        response,
    })
}

/// Multiplied-form verification: s*X == R + c*G.
pub fn eddsa_verify_monero(
    message: &[u8],
    sig: &EddsaSignature,
    public_key: &GroupPoint,
    group: &CurveGroup,
) -> bool {
    let n = group.order();
    if &sig.response >= n {
        return false;
    }
    if !group.contains(public_key) || public_key.is_identity() {
        return false;
    }
    if !group.contains(&sig.commitment) {
        return false;
    }
    let c = hash_to_scalar(
        MONERO_CHALLENGE_TAG,
        &[&sig.commitment.to_bytes(), &public_key.to_bytes(), message],
        n,
    );
    let lhs = match group.scalar_mul(&sig.response, public_key) {
        Ok(p) => p,
        Err(_) => return false,
    };
    let rhs = group.add_unchecked(&sig.commitment, &group.mul_generator(&c));
    lhs == rhs
}

/// Additive-form signing: s = r + c*a.
pub fn eddsa_sign_zcash(
    message: &[u8],
    signer: &KeyPair,
    group: &CurveGroup,
) -> Result<EddsaSignature, SigError> {
    let n = group.order();
    let r = hash_to_scalar(
        ZCASH_NONCE_TAG,
        &[&scalar_bytes(&signer.private_scalar), message],
        n,
    );
    let commitment = group.mul_generator(&r);
    let c = hash_to_scalar(
        ZCASH_CHALLENGE_TAG,
        &[
            &commitment.to_bytes(),
            &signer.public_point.to_bytes(),
            message,
        ],
        n,
    );
    let response = (&r + &c * &signer.private_scalar) % n;
    Ok(EddsaSignature {
        commitment,
        response,
    })
}

/// Additive-form verification: s*G == R + c*A.
pub fn eddsa_verify_zcash(
    message: &[u8],
    sig: &EddsaSignature,
    public_key: &GroupPoint,
    group: &CurveGroup,
) -> bool {
    let n = group.order();
    if &sig.response >= n {
        return false;
    }
    if !group.contains(public_key) || public_key.is_identity() {
        return false;
    }
    if !group.contains(&sig.commitment) {
        return false;
    }
    let c = hash_to_scalar(
        ZCASH_CHALLENGE_TAG,
        &[&sig.commitment.to_bytes(), &public_key.to_bytes(), message],
        n,
    );
    let lhs = group.mul_generator(&sig.response);
    let c_a = match group.scalar_mul(&c, public_key) {
        Ok(p) => p,
        Err(_) => return false,
    };
    let rhs = group.add_unchecked(&sig.commitment, &c_a);
    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ec::keys::generate_keypair;
    use crate::ec::params::{curve_by_label, TOY_EDWARDS_LABEL, TOY_WEIERSTRASS_LABEL};
    use num_traits::One;

    fn ed() -> CurveGroup {
        curve_by_label(TOY_EDWARDS_LABEL).unwrap()
    }

    #[test]
    fn monero_roundtrip() {
        let g = ed();
        let kp = generate_keypair(&g, 7);
        let sig = eddsa_sign_monero(b"transfer", &kp, &g).unwrap();
        assert!(eddsa_verify_monero(b"transfer", &sig, &kp.public_point, &g));
    }

    #[test]
    fn zcash_roundtrip() {
        let g = ed();
        let kp = generate_keypair(&g, 7);
        let sig = eddsa_sign_zcash(b"transfer", &kp, &g).unwrap();
        assert!(eddsa_verify_zcash(b"transfer", &sig, &kp.public_point, &g));
    }

    #[test]
    fn works_on_weierstrass_groups_too() {
        let g = curve_by_label(TOY_WEIERSTRASS_LABEL).unwrap();
        let kp = generate_keypair(&g, 7);
        let sig = eddsa_sign_monero(b"m", &kp, &g).unwrap();
        assert!(eddsa_verify_monero(b"m", &sig, &kp.public_point, &g));
        let sig = eddsa_sign_zcash(b"m", &kp, &g).unwrap();
        assert!(eddsa_verify_zcash(b"m", &sig, &kp.public_point, &g));
    }

    #[test]
    fn tampered_message_rejected() {
        let g = ed();
        let kp = generate_keypair(&g, 7);
        let sig = eddsa_sign_monero(b"transfer 10", &kp, &g).unwrap();
        assert!(!eddsa_verify_monero(b"transfer 99", &sig, &kp.public_point, &g));
        let sig = eddsa_sign_zcash(b"transfer 10", &kp, &g).unwrap();
        assert!(!eddsa_verify_zcash(b"transfer 99", &sig, &kp.public_point, &g));
    }

    #[test]
    fn tampered_response_rejected() {
        let g = ed();
        let kp = generate_keypair(&g, 7);
        let mut sig = eddsa_sign_monero(b"m", &kp, &g).unwrap();
        sig.response = (&sig.response + BigUint::one()) % g.order();
        assert!(!eddsa_verify_monero(b"m", &sig, &kp.public_point, &g));
    }

    #[test]
    fn wrong_key_rejected() {
        let g = ed();
        let kp = generate_keypair(&g, 7);
        let other = generate_keypair(&g, 8);
        let sig = eddsa_sign_monero(b"m", &kp, &g).unwrap();
        assert!(!eddsa_verify_monero(b"m", &sig, &other.public_point, &g));
        let sig = eddsa_sign_zcash(b"m", &kp, &g).unwrap();
        assert!(!eddsa_verify_zcash(b"m", &sig, &other.public_point, &g));
    }

    #[test]
    fn variants_reject_each_other() {
        let g = ed();
        let kp = generate_keypair(&g, 7);
        let m_sig = eddsa_sign_monero(b"m", &kp, &g).unwrap();
        let z_sig = eddsa_sign_zcash(b"m", &kp, &g).unwrap();
        assert!(!eddsa_verify_zcash(b"m", &m_sig, &kp.public_point, &g));
        assert!(!eddsa_verify_monero(b"m", &z_sig, &kp.public_point, &g));
    }

    #[test]
    fn deterministic() {
        let g = ed();
        let kp = generate_keypair(&g, 7);
        assert_eq!(
            eddsa_sign_monero(b"m", &kp, &g).unwrap(),
            eddsa_sign_monero(b"m", &kp, &g).unwrap()
        );
        assert_ne!(
            eddsa_sign_zcash(b"m1", &kp, &g).unwrap(),
            eddsa_sign_zcash(b"m2", &kp, &g).unwrap()
        );
    }

    #[test]
    fn oversized_response_rejected() {
        let g = ed();
        let kp = generate_keypair(&g, 7);
        let mut sig = eddsa_sign_zcash(b"m", &kp, &g).unwrap();
        sig.response += g.order();
        assert!(!eddsa_verify_zcash(b"m", &sig, &kp.public_point, &g));
    }

    #[test]
    fn foreign_commitment_rejected() {
        let g = ed();
        let w = curve_by_label(TOY_WEIERSTRASS_LABEL).unwrap();
        let kp = generate_keypair(&g, 7);
        let mut sig = eddsa_sign_zcash(b"m", &kp, &g).unwrap();
        sig.commitment = w.mul_generator(&BigUint::from(3u32));
        assert!(!eddsa_verify_zcash(b"m", &sig, &kp.public_point, &g));
    }

    #[test]
    fn forged_after_discrete_log_recovery() {
        // the takeover path: knowing x lets anyone recompute the signing
        // exponent and produce valid signatures for X
        let g = ed();
        let kp = generate_keypair(&g, 7);
        let stolen = KeyPair {
            private_scalar: kp.private_scalar.clone(),
            public_point: kp.public_point.clone(),
        };
        let sig = eddsa_sign_monero(b"drain", &stolen, &g).unwrap();
        assert!(eddsa_verify_monero(b"drain", &sig, &kp.public_point, &g));
    }
}
