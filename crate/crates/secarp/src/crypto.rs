//! Authentication primitives: shared-key message tags for DHCP↔Central
//! traffic, and certificate-backed signatures for everything the Central
//! Server emits.
//!
//! The tag is defined for interoperability as SHA-256(key ‖ message). The
//! signature scheme is pluggable by contract (any 64-byte scheme); this
//! implementation uses Ed25519, which is deterministic, so repeated signing
//! and certificate issuance over identical inputs yield identical bytes.
//!
//! Tags and signatures always cover a frame's bytes from `dest` through the
//! body inclusive — never the auth section or the FCS — via
//! [`Frame::signable_bytes`].

use ed25519_dalek::{Signature, Signer, SigningKey, Verifier, VerifyingKey};
use sha2::{Digest, Sha256};

use crate::wire::{AuthSection, Frame, SIGNATURE_LEN, TAG_LEN};

/// Symmetric secret shared between the DHCP server and the Central Server.
/// Never serialized into frames or reports.
#[derive(Clone)]
pub struct SharedKey([u8; 32]);

impl SharedKey {
    pub fn new(key_bytes: [u8; 32]) -> Self {
        SharedKey(key_bytes)
    }
}

/// Ed25519 key pair.
#[derive(Clone)]
pub struct KeyPair {
    signing: SigningKey,
}

impl KeyPair {
    pub fn from_seed(seed: [u8; 32]) -> Self {
        KeyPair {
            signing: SigningKey::from_bytes(&seed),
        }
    }

    /// Serializable public part.
    pub fn public_bytes(&self) -> [u8; 32] {
        self.signing.verifying_key().to_bytes()
    }

    pub fn trust_root(&self) -> TrustRoot {
        TrustRoot {
            key: self.signing.verifying_key(),
        }
    }
}

/// The public key hosts use to verify the Central Server's certificate.
/// Distributed out of band at scenario setup.
#[derive(Clone)]
pub struct TrustRoot {
    key: VerifyingKey,
}

/// A certificate binding a subject name to a public key, signed by the root.
///
/// Wire form: subject_len(2, big-endian) | subject | key_len(2) | key
/// | signature(64).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub subject: String,
    pub subject_public_key: Vec<u8>,
    pub issuer_signature: [u8; SIGNATURE_LEN],
}

impl Certificate {
    fn signed_prefix(subject: &str, key: &[u8]) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + subject.len() + key.len());
        out.extend_from_slice(&(subject.len() as u16).to_be_bytes());
        out.extend_from_slice(subject.as_bytes());
        out.extend_from_slice(&(key.len() as u16).to_be_bytes());
        out.extend_from_slice(key);
        out
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Self::signed_prefix(&self.subject, &self.subject_public_key);
        out.extend_from_slice(&self.issuer_signature);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Option<Certificate> {
        let subject_len = u16::from_be_bytes([*bytes.first()?, *bytes.get(1)?]) as usize;
        let subject = std::str::from_utf8(bytes.get(2..2 + subject_len)?).ok()?;
        let at = 2 + subject_len;
        let key_len = u16::from_be_bytes([*bytes.get(at)?, *bytes.get(at + 1)?]) as usize;
        let key = bytes.get(at + 2..at + 2 + key_len)?;
        let sig_at = at + 2 + key_len;
        let issuer_signature: [u8; SIGNATURE_LEN] =
            bytes.get(sig_at..sig_at + SIGNATURE_LEN)?.try_into().ok()?;
        if bytes.len() != sig_at + SIGNATURE_LEN {
            return None;
        }
        Some(Certificate {
            subject: subject.to_string(),
            subject_public_key: key.to_vec(),
            issuer_signature,
        })
    }
}

/// Deterministic keyed tag: SHA-256(key ‖ msg).
pub fn tag_message(key: &SharedKey, msg: &[u8]) -> [u8; TAG_LEN] {
    let mut hasher = Sha256::new();
    hasher.update(key.0);
    hasher.update(msg);
    hasher.finalize().into()
}

/// True iff `tag` equals the recomputed tag. Constant-time in intent: the
/// comparison folds over every byte regardless of mismatches.
pub fn verify_tag(key: &SharedKey, msg: &[u8], tag: &[u8; TAG_LEN]) -> bool {
    let expected = tag_message(key, msg);
    expected
        .iter()
        .zip(tag.iter())
        .fold(0u8, |acc, (a, b)| acc | (a ^ b))
        == 0
}

/// 64-byte signature over `msg`.
pub fn sign(kp: &KeyPair, msg: &[u8]) -> [u8; SIGNATURE_LEN] {
    kp.signing.sign(msg).to_bytes()
}

/// True iff `cert` chains to `root` and `sig` validates `msg` under the
/// certificate's subject key.
pub fn verify(cert: &Certificate, msg: &[u8], sig: &[u8; SIGNATURE_LEN], root: &TrustRoot) -> bool {
    let prefix = Certificate::signed_prefix(&cert.subject, &cert.subject_public_key);
    let issuer_sig = Signature::from_bytes(&cert.issuer_signature);
    if root.key.verify(&prefix, &issuer_sig).is_err() {
        return false;
    }
    let Ok(key_bytes) = <[u8; 32]>::try_from(cert.subject_public_key.as_slice()) else {
        return false;
    };
    let Ok(subject_key) = VerifyingKey::from_bytes(&key_bytes) else {
        return false;
    };
    subject_key.verify(msg, &Signature::from_bytes(sig)).is_ok()
}

/// Issue a certificate for `subject_public_key` under the root key pair.
/// Deterministic: identical inputs yield identical certificates.
///
/// The serialized certificate must fit the frames' 2-byte length field,
/// which bounds the subject to 65435 bytes; panics beyond that.
pub fn issue_certificate(
    root_keypair: &KeyPair,
    subject: &str,
    subject_public_key: &[u8],
) -> Certificate {
    let prefix = Certificate::signed_prefix(subject, subject_public_key);
    assert!(
        prefix.len() + SIGNATURE_LEN <= u16::MAX as usize,
        "certificate exceeds the 2-byte length field"
    );
    Certificate {
        subject: subject.to_string(),
        subject_public_key: subject_public_key.to_vec(),
        issuer_signature: sign(root_keypair, &prefix),
    }
}

/// Key pair plus the certificate vouching for it — what the Central Server
/// attaches to everything it signs.
#[derive(Clone)]
pub struct SignerIdentity {
    pub keypair: KeyPair,
    pub certificate: Certificate,
}

impl SignerIdentity {
    pub fn issue(root_keypair: &KeyPair, subject: &str, seed: [u8; 32]) -> Self {
        let keypair = KeyPair::from_seed(seed);
        let certificate = issue_certificate(root_keypair, subject, &keypair.public_bytes());
        SignerIdentity {
            keypair,
            certificate,
        }
    }

    pub fn certificate_bytes(&self) -> Vec<u8> {
        self.certificate.to_bytes()
    }
}

/// Compute and attach the keyed tag of an IP_send/IP_reply frame.
pub fn tag_frame(key: &SharedKey, frame: &mut Frame) {
    let tag = tag_message(key, &frame.signable_bytes());
    frame.set_tag(tag);
}

/// True iff the frame carries a keyed tag that verifies under `key`.
pub fn frame_tag_ok(key: &SharedKey, frame: &Frame) -> bool {
    match frame.auth() {
        AuthSection::KeyedTag(tag) => verify_tag(key, &frame.signable_bytes(), tag),
        _ => false,
    }
}

/// Compute and attach the signature of a signed frame. The frame's auth
/// section must already carry the identity's certificate.
pub fn sign_frame(identity: &SignerIdentity, frame: &mut Frame) {
    let sig = sign(&identity.keypair, &frame.signable_bytes());
    frame.set_signature(sig);
}

/// True iff the frame carries a certificate chaining to `root` and a
/// signature valid over the frame's signable bytes.
pub fn frame_signature_ok(root: &TrustRoot, frame: &Frame) -> bool {
    match frame.auth() {
        AuthSection::Signature {
            signature,
            certificate,
        } => match Certificate::from_bytes(certificate) {
            Some(cert) => verify(&cert, &frame.signable_bytes(), signature, root),
            None => false,
        },
        _ => false,
    }
}

/// Deterministic 32-byte material derived from a scenario seed and a label;
/// used to set up keys without an entropy source.
pub fn derive_bytes(seed: u64, label: &str) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(label.as_bytes());
    hasher.update(seed.to_le_bytes());
    hasher.finalize().into()
}
