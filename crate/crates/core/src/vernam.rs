//! One-time pad algebra and its photon-pair realization.
//!
//! Alice prepares photon 1 from a fresh random bit `p` and photon 3 from
//! `m ⊕ p`. Bob measures both in the agreed basis and adds the outcomes.
//! Either photon alone is maximally mixed over the random `p`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::value::RawValue;

use crate::cdm::reduce;
use crate::error::{Error, Result};
use crate::numfmt::{dec3, raw, raw_complex, raw_sig12};
use crate::qstate::{
    density, orthogonal_state, spin_state, BlochVector, DensityMatrix, Sign, StateVector,
};
use crate::scenarios::four_photon_conditional;
use crate::tensor::ComplexMatrix;

/// Preparation and measurement outcomes closer than this to 0 or 1 are
/// treated as deterministic.
pub const OUTCOME_TOL: f64 = 1e-9;

/// Ordered bits; index 0 is the most significant and prints first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![false; len])
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Self {
        Self((0..len).map(|_| rng.random::<bool>()).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Bitwise addition modulo 2.
    pub fn xor(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(Self(
            self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect(),
        ))
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidBit(other)),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub fn otp_encrypt(message: &BitString, key: &BitString) -> Result<BitString> {
    message.xor(key)
}

pub fn otp_decrypt(cipher: &BitString, key: &BitString) -> Result<BitString> {
    cipher.xor(key)
}

/// `s₁ ⊕ s₂`; equals `m₁ ⊕ m₂` whenever both ciphertexts share a key.
pub fn two_time_pad_leak(s1: &BitString, s2: &BitString) -> Result<BitString> {
    s1.xor(s2)
}

/// Polarization encoding a bit: 0 is `χ_basis`, 1 is the orthogonal state.
pub fn bit_to_state(bit: bool, basis: &BlochVector) -> StateVector {
    let zero = spin_state(basis, Sign::Plus);
    if bit {
        orthogonal_state(&zero).expect("spin state is a normalized qubit")
    } else {
        zero
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhotonPairRecord {
    pub index: usize,
    /// Alice's key bit, fixing photon 1.
    pub p: bool,
    /// `m ⊕ p`, fixing photon 3.
    pub m_xor_p: bool,
    pub photon1: StateVector,
    pub photon3: StateVector,
    pub basis: BlochVector,
}

pub fn encode_pair(m_bit: bool, p_bit: bool, basis: &BlochVector) -> PhotonPairRecord {
    PhotonPairRecord {
        index: 0,
        p: p_bit,
        m_xor_p: m_bit ^ p_bit,
        photon1: bit_to_state(p_bit, basis),
        photon3: bit_to_state(m_bit ^ p_bit, basis),
        basis: *basis,
    }
}

/// Prepares the pair by conditioning photons 2 and 4 of two singlets, then
/// checks the resulting (1, 3) state against [`encode_pair`].
pub fn physical_pair(m_bit: bool, p_bit: bool, basis: &BlochVector) -> Result<PhotonPairRecord> {
    let direct = encode_pair(m_bit, p_bit, basis);
    // each partner ends up orthogonal to the photon it was paired with
    let photon2 = bit_to_state(!p_bit, basis);
    let photon4 = bit_to_state(!(m_bit ^ p_bit), basis);
    let report = four_photon_conditional(&photon2, &photon4)?;
    let expected = density(&direct.photon1.tensor(&direct.photon3))?;
    let residual = report.conditional.matrix().distance(expected.matrix());
    if residual > OUTCOME_TOL {
        return Err(Error::PreparationMismatch { residual });
    }
    let photon1 = StateVector::from_pure_density(&reduce(&report.conditional, &[0])?, OUTCOME_TOL)?;
    let photon3 = StateVector::from_pure_density(&reduce(&report.conditional, &[1])?, OUTCOME_TOL)?;
    Ok(PhotonPairRecord {
        photon1,
        photon3,
        ..direct
    })
}

/// Deterministic projective measurement in `basis`: 0 for `χ_basis`.
pub fn measure_in_basis(photon: &StateVector, basis: &BlochVector) -> Result<bool> {
    let p0 = bit_to_state(false, basis).inner(photon)?.norm_sqr();
    if p0 >= 1.0 - OUTCOME_TOL {
        Ok(false)
    } else if p0 <= OUTCOME_TOL {
        Ok(true)
    } else {
        Err(Error::BasisMismatch)
    }
}

/// Bob's decoding: measure both photons in the agreed basis and add.
pub fn bob_decode(record: &PhotonPairRecord, basis: &BlochVector) -> Result<bool> {
    if 1.0 - record.basis.dot(basis) > OUTCOME_TOL {
        return Err(Error::BasisMismatch);
    }
    Ok(measure_in_basis(&record.photon1, basis)? ^ measure_in_basis(&record.photon3, basis)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrepMode {
    Direct,
    Physical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolTranscript {
    pub message: BitString,
    pub seed: u64,
    pub basis: BlochVector,
    pub mode: PrepMode,
    pub key: BitString,
    pub records: Vec<PhotonPairRecord>,
    pub decoded: BitString,
    pub eve: Option<EveStats>,
}

pub fn run_session(
    message: &BitString,
    seed: u64,
    basis: &BlochVector,
    mode: PrepMode,
) -> Result<ProtocolTranscript> {
    if message.is_empty() {
        return Err(Error::EmptyMessage);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let key = BitString::random(&mut rng, message.len());

    // only four distinct preparations exist per basis
    let mut prepared: HashMap<(bool, bool), PhotonPairRecord> = HashMap::new();
    let mut records = Vec::with_capacity(message.len());
    for (index, (&m, &p)) in message.bits().iter().zip(key.bits()).enumerate() {
        let template = match prepared.get(&(m, p)) {
            Some(r) => r.clone(),
            None => {
                let r = match mode {
                    PrepMode::Direct => encode_pair(m, p, basis),
                    PrepMode::Physical => physical_pair(m, p, basis)?,
                };
                prepared.insert((m, p), r.clone());
                r
            }
        };
        records.push(PhotonPairRecord { index, ..template });
    }

    let decoded = records
        .iter()
        .map(|r| bob_decode(r, basis))
        .collect::<Result<Vec<_>>>()
        .map(BitString::new)?;

    Ok(ProtocolTranscript {
        message: message.clone(),
        seed,
        basis: *basis,
        mode,
        key,
        records,
        decoded,
        eve: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Photon {
    One,
    Three,
}

/// Exact state of one intercepted photon, averaged over the uniform key bit.
pub fn eve_marginal(which: Photon, m_bit: bool, basis: &BlochVector) -> Result<DensityMatrix> {
    let mut sum = ComplexMatrix::zeros(2, 2);
    for p in [false, true] {
        let record = encode_pair(m_bit, p, basis);
        let photon = match which {
            Photon::One => &record.photon1,
            Photon::Three => &record.photon3,
        };
        sum = &sum + density(photon)?.matrix();
    }
    DensityMatrix::new(crate::tensor::FactorShape::qubits(1), sum.scale_real(0.5))
}

/// Outcome counts of Eve's single-photon measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct EveStats {
    pub trials: u64,
    pub eve_basis: BlochVector,
    pub basis: BlochVector,
    /// Outcome counts `[0, 1]` over all trials.
    pub counts: [u64; 2],
    /// Outcome counts split by the message bit carried by the pair.
    pub counts_by_message: [[u64; 2]; 2],
}

impl EveStats {
    pub fn frequencies(&self) -> [f64; 2] {
        let n = self.trials as f64;
        [self.counts[0] as f64 / n, self.counts[1] as f64 / n]
    }

    /// One standard deviation of a fair-coin frequency over `trials`.
    pub fn sigma(&self) -> f64 {
        0.5 / (self.trials as f64).sqrt()
    }
}

/// Simulates `trials` interceptions. Each trial draws a message bit, a key
/// bit, and which photon of the pair Eve taps, then samples her outcome in
/// `eve_basis` by the Born rule.
pub fn eve_measure_stats(
    trials: u64,
    seed: u64,
    eve_basis: &BlochVector,
    basis: &BlochVector,
) -> Result<EveStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probe = bit_to_state(false, eve_basis);
    let mut counts = [0u64; 2];
    let mut counts_by_message = [[0u64; 2]; 2];
    for _ in 0..trials {
        let m: bool = rng.random();
        let p: bool = rng.random();
        let tap_first: bool = rng.random();
        let record = encode_pair(m, p, basis);
        let photon = if tap_first {
            &record.photon1
        } else {
            &record.photon3
        };
        let p0 = probe.inner(photon)?.norm_sqr();
        let outcome = usize::from(rng.random::<f64>() >= p0);
        counts[outcome] += 1;
        counts_by_message[usize::from(m)][outcome] += 1;
    }
    Ok(EveStats {
        trials,
        eve_basis: *eve_basis,
        basis: *basis,
        counts,
        counts_by_message,
    })
}

#[derive(Serialize)]
struct RecordDoc {
    index: usize,
    p: u8,
    m_xor_p: u8,
    photon1: Vec<[Box<RawValue>; 2]>,
    photon3: Vec<[Box<RawValue>; 2]>,
}

#[derive(Serialize)]
struct EveDoc {
    trials: u64,
    eve_basis: [Box<RawValue>; 3],
    counts: [u64; 2],
    frequencies: [Box<RawValue>; 2],
}

#[derive(Serialize)]
struct TranscriptDoc {
    message: String,
    seed: u64,
    basis: [Box<RawValue>; 3],
    records: Vec<RecordDoc>,
    decoded: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    eve: Option<EveDoc>,
}

fn raw_direction(v: &BlochVector) -> [Box<RawValue>; 3] {
    v.components().map(|x| raw(dec3(x)))
}

fn raw_state(v: &StateVector) -> Vec<[Box<RawValue>; 2]> {
    v.amplitudes().iter().map(|&z| raw_complex(z)).collect()
}

impl ProtocolTranscript {
    fn document(&self) -> TranscriptDoc {
        TranscriptDoc {
            message: self.message.to_string(),
            seed: self.seed,
            basis: raw_direction(&self.basis),
            records: self
                .records
                .iter()
                .map(|r| RecordDoc {
                    index: r.index,
                    p: u8::from(r.p),
                    m_xor_p: u8::from(r.m_xor_p),
                    photon1: raw_state(&r.photon1),
                    photon3: raw_state(&r.photon3),
                })
                .collect(),
            decoded: self.decoded.to_string(),
            eve: self.eve.as_ref().map(|e| EveDoc {
                trials: e.trials,
                eve_basis: raw_direction(&e.eve_basis),
                counts: e.counts,
                frequencies: e.frequencies().map(raw_sig12),
            }),
        }
    }

    /// JSON transcript with fields `message`, `seed`, `basis`, `records`,
    /// `decoded`, and optionally `eve`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.document()).expect("transcript serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.document()).expect("transcript serializes")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::from_str(&self.to_json()).expect("transcript round-trips")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn amps(v: &StateVector) -> Vec<Complex64> {
        v.amplitudes().to_vec()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn xor_examples() {
        assert_eq!(
            otp_encrypt(&bits("1010"), &bits("0110")).unwrap(),
            bits("1100")
        );
        assert_eq!(
            otp_encrypt(&bits("1011"), &BitString::zeros(4)).unwrap(),
            bits("1011")
        );
        assert_eq!(
            otp_encrypt(&bits("10"), &bits("101")),
            Err(Error::LengthMismatch { left: 2, right: 3 })
        );
        assert_eq!(
            two_time_pad_leak(&bits("0110"), &bits("0110")).unwrap(),
            bits("0000")
        );
    }

    #[test]
    fn bit_string_parsing() {
        assert_eq!(bits("1011").to_string(), "1011");
        assert_eq!("10a1".parse::<BitString>(), Err(Error::InvalidBit('a')));
        assert!(bits("").is_empty());
    }

    #[test]
    fn leak_with_distinct_keys_is_not_plaintext_sum() {
        // exhaustive over 4-bit strings: some (m1, m2, k1, k2) breaks the identity
        let all: Vec<BitString> = (0u8..16)
            .map(|v| BitString::new((0..4).rev().map(|i| v >> i & 1 == 1).collect()))
            .collect();
        let m1 = &all[3];
        let m2 = &all[5];
        let found = all.iter().any(|k1| {
            all.iter().any(|k2| {
                k1 != k2
                    && two_time_pad_leak(
                        &otp_encrypt(m1, k1).unwrap(),
                        &otp_encrypt(m2, k2).unwrap(),
                    )
                    .unwrap()
                        != m1.xor(m2).unwrap()
            })
        });
        assert!(found);
    }

    #[test]
    fn encode_pair_examples() {
        let r = encode_pair(true, false, &BlochVector::Z);
        assert_eq!(amps(&r.photon1), vec![c(1.0), c(0.0)]);
        assert_eq!(amps(&r.photon3), vec![c(0.0), c(1.0)]);
        let r = encode_pair(false, true, &BlochVector::Z);
        assert_eq!(amps(&r.photon1), vec![c(0.0), c(1.0)]);
        assert_eq!(amps(&r.photon3), vec![c(0.0), c(1.0)]);
    }

    #[test]
    fn bob_recovers_message_bit() {
        for m in [false, true] {
            for p in [false, true] {
                for basis in [BlochVector::Z, BlochVector::X, BlochVector::Y] {
                    let r = encode_pair(m, p, &basis);
                    assert_eq!(bob_decode(&r, &basis).unwrap(), m);
                }
            }
        }
    }

    #[test]
    fn bob_rejects_wrong_basis() {
        let r = encode_pair(true, false, &BlochVector::Z);
        assert_eq!(bob_decode(&r, &BlochVector::X), Err(Error::BasisMismatch));
        let mut r = r;
        r.basis = BlochVector::X;
        // record claims x but photons are z-aligned
        assert_eq!(bob_decode(&r, &BlochVector::X), Err(Error::BasisMismatch));
    }

    #[test]
    fn session_round_trip() {
        let msg = bits("1011");
        let t = run_session(&msg, 42, &BlochVector::Z, PrepMode::Direct).unwrap();
        assert_eq!(t.decoded, msg);
        assert_eq!(t.key.len(), 4);
        assert_eq!(t.records.len(), 4);
        assert_eq!(t.records[3].index, 3);
        assert_eq!(
            run_session(&BitString::zeros(0), 1, &BlochVector::Z, PrepMode::Direct),
            Err(Error::EmptyMessage)
        );
    }

    #[test]
    fn physical_matches_direct_for_all_bits() {
        let basis = BlochVector::normalized(0.3, -0.4, 0.5).unwrap();
        for m in [false, true] {
            for p in [false, true] {
                let d = encode_pair(m, p, &basis);
                let ph = physical_pair(m, p, &basis).unwrap();
                for (a, b) in [(&d.photon1, &ph.photon1), (&d.photon3, &ph.photon3)] {
                    assert!((a.inner(b).unwrap().norm() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn keys_are_seeded() {
        let msg = BitString::zeros(64);
        let a = run_session(&msg, 7, &BlochVector::Z, PrepMode::Direct).unwrap();
        let b = run_session(&msg, 7, &BlochVector::Z, PrepMode::Direct).unwrap();
        let c = run_session(&msg, 8, &BlochVector::Z, PrepMode::Direct).unwrap();
        assert_eq!(a.key, b.key);
        assert_ne!(a.key, c.key);
    }

    #[test]
    fn eve_marginal_examples() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        let rho = eve_marginal(Photon::One, false, &BlochVector::Z).unwrap();
        assert!(rho.matrix().max_abs_diff(&half) < 1e-15);
        let rho = eve_marginal(Photon::Three, true, &BlochVector::X).unwrap();
        assert!(rho.matrix().max_abs_diff(&half) < 1e-15);
    }

    #[test]
    fn single_trial_has_one_outcome() {
        let s = eve_measure_stats(1, 3, &BlochVector::Z, &BlochVector::Z).unwrap();
        assert_eq!(s.counts.iter().sum::<u64>(), 1);
    }

    #[test]
    fn transcript_json_fields() {
        let t = run_session(&bits("10"), 1, &BlochVector::X, PrepMode::Direct).unwrap();
        let v = t.to_json_value();
        assert_eq!(v["message"], "10");
        assert_eq!(v["decoded"], "10");
        assert_eq!(v["seed"], 1);
        assert_eq!(v["records"].as_array().unwrap().len(), 2);
        assert!(t.to_json().contains("\"basis\":[1.000,0.000,0.000]"));
        assert!(t
            .to_json_pretty()
            .contains("\"basis\": [\n    1.000,\n    0.000,\n    0.000\n  ]"));
        assert!(v.get("eve").is_none());
        let p = v["records"][0]["p"].as_u64().unwrap();
        let mx = v["records"][0]["m_xor_p"].as_u64().unwrap();
        assert_eq!(p ^ mx, 1);
    }
}
