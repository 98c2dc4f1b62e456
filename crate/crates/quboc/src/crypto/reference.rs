//! Bit-exact reference implementations of AES-128/192/256, MD5, SHA-1 and
//! SHA-256, used as oracles for witness construction and differential tests.
//!
//! The AES S-box is computed from the field definition (multiplicative
//! inverse in GF(2⁸) modulo x⁸+x⁴+x³+x+1, followed by the standard affine
//! map) rather than transcribed, so the table itself is covered by the
//! FIPS-197 vector tests.

use crate::error::{Error, Result};

/// Multiplication in GF(2⁸) modulo the AES polynomial x⁸+x⁴+x³+x+1.
pub fn gf256_mul(mut a: u8, mut b: u8) -> u8 {
    let mut r = 0u8;
    while b != 0 {
        if b & 1 != 0 {
            r ^= a;
        }
        let hi = a & 0x80 != 0;
        a <<= 1;
        if hi {
            a ^= 0x1b;
        }
        b >>= 1;
    }
    r
}

/// Multiplicative inverse in GF(2⁸); 0 maps to 0.
pub fn gf256_inv(a: u8) -> u8 {
    if a == 0 {
        return 0;
    }
    // a^254 by square-and-multiply
    let mut acc = 1u8;
    let mut base = a;
    let mut e = 254u8;
    while e != 0 {
        if e & 1 != 0 {
            acc = gf256_mul(acc, base);
        }
        base = gf256_mul(base, base);
        e >>= 1;
    }
    acc
}

/// The AES S-box affine transformation over GF(2).
pub fn sbox_affine(x: u8) -> u8 {
    let mut r = 0u8;
    for i in 0..8 {
        let bit = (x >> i
            ^ x >> ((i + 4) % 8)
            ^ x >> ((i + 5) % 8)
            ^ x >> ((i + 6) % 8)
            ^ x >> ((i + 7) % 8)
            ^ 0x63 >> i)
            & 1;
        r |= bit << i;
    }
    r
}

pub fn aes_sbox() -> [u8; 256] {
    let mut t = [0u8; 256];
    for (x, e) in t.iter_mut().enumerate() {
        *e = sbox_affine(gf256_inv(x as u8));
    }
    t
}

pub fn aes_inv_sbox() -> [u8; 256] {
    let s = aes_sbox();
    let mut t = [0u8; 256];
    for (x, &y) in s.iter().enumerate() {
        t[y as usize] = x as u8;
    }
    t
}

/// AES key sizes with their round counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AesVariant {
    Aes128,
    Aes192,
    Aes256,
}

impl AesVariant {
    pub fn key_bytes(self) -> usize {
        match self {
            AesVariant::Aes128 => 16,
            AesVariant::Aes192 => 24,
            AesVariant::Aes256 => 32,
        }
    }

    pub fn rounds(self) -> usize {
        match self {
            AesVariant::Aes128 => 10,
            AesVariant::Aes192 => 12,
            AesVariant::Aes256 => 14,
        }
    }

    fn nk(self) -> usize {
        self.key_bytes() / 4
    }
}

/// Expanded round keys: `rounds + 1` blocks of 16 bytes.
pub fn aes_key_schedule(variant: AesVariant, key: &[u8]) -> Result<Vec<[u8; 16]>> {
    if key.len() != variant.key_bytes() {
        return Err(Error::Dimension {
            expected: variant.key_bytes(),
            got: key.len(),
        });
    }
    let sbox = aes_sbox();
    let nk = variant.nk();
    let n_words = 4 * (variant.rounds() + 1);
    let mut w: Vec<[u8; 4]> = key.chunks(4).map(|c| [c[0], c[1], c[2], c[3]]).collect();
    let mut rcon = 1u8;
    for i in nk..n_words {
        let mut t = w[i - 1];
        if i % nk == 0 {
            t = [
                sbox[t[1] as usize] ^ rcon,
                sbox[t[2] as usize],
                sbox[t[3] as usize],
                sbox[t[0] as usize],
            ];
            rcon = gf256_mul(rcon, 2);
        } else if nk > 6 && i % nk == 4 {
            t = t.map(|b| sbox[b as usize]);
        }
        let prev = w[i - nk];
        w.push([t[0] ^ prev[0], t[1] ^ prev[1], t[2] ^ prev[2], t[3] ^ prev[3]]);
    }
    Ok(w
        .chunks(4)
        .map(|c| {
            let mut blk = [0u8; 16];
            for (j, word) in c.iter().enumerate() {
                blk[4 * j..4 * j + 4].copy_from_slice(word);
            }
            blk
        })
        .collect())
}

fn shift_rows(state: &mut [u8; 16]) {
    // state[r + 4c] layout (column-major as in FIPS-197)
    let s = *state;
    for r in 1..4 {
        for c in 0..4 {
            state[r + 4 * c] = s[r + 4 * ((c + r) % 4)];
        }
    }
}

fn inv_shift_rows(state: &mut [u8; 16]) {
    let s = *state;
    for r in 1..4 {
        for c in 0..4 {
            state[r + 4 * ((c + r) % 4)] = s[r + 4 * c];
        }
    }
}

fn mix_columns(state: &mut [u8; 16]) {
    for c in 0..4 {
        let col: [u8; 4] = [state[4 * c], state[4 * c + 1], state[4 * c + 2], state[4 * c + 3]];
        for r in 0..4 {
            state[4 * c + r] = gf256_mul(col[r], 2)
                ^ gf256_mul(col[(r + 1) % 4], 3)
                ^ col[(r + 2) % 4]
                ^ col[(r + 3) % 4];
        }
    }
}

fn inv_mix_columns(state: &mut [u8; 16]) {
    for c in 0..4 {
        let col: [u8; 4] = [state[4 * c], state[4 * c + 1], state[4 * c + 2], state[4 * c + 3]];
        for r in 0..4 {
            state[4 * c + r] = gf256_mul(col[r], 14)
                ^ gf256_mul(col[(r + 1) % 4], 11)
                ^ gf256_mul(col[(r + 2) % 4], 13)
                ^ gf256_mul(col[(r + 3) % 4], 9);
        }
    }
}

fn add_round_key(state: &mut [u8; 16], rk: &[u8; 16]) {
    for (s, k) in state.iter_mut().zip(rk) {
        *s ^= k;
    }
}

/// Encrypts one block, returning the state after every round (index 0 is
/// the whitened input); supports reduced round counts.
pub fn aes_encrypt_trace(
    variant: AesVariant,
    rounds: usize,
    key: &[u8],
    plaintext: &[u8; 16],
) -> Result<Vec<[u8; 16]>> {
    if rounds == 0 || rounds > variant.rounds() {
        return Err(Error::Contract(format!(
            "round count {rounds} outside 1..={}",
            variant.rounds()
        )));
    }
    let sbox = aes_sbox();
    let rk = aes_key_schedule(variant, key)?;
    let mut state = *plaintext;
    add_round_key(&mut state, &rk[0]);
    let mut trace = vec![state];
    for round in 1..=rounds {
        for b in state.iter_mut() {
            *b = sbox[*b as usize];
        }
        shift_rows(&mut state);
        if round != variant.rounds() {
            mix_columns(&mut state);
        }
        add_round_key(&mut state, &rk[round]);
        trace.push(state);
    }
    Ok(trace)
}

pub fn aes_encrypt(variant: AesVariant, key: &[u8], plaintext: &[u8; 16]) -> Result<[u8; 16]> {
    Ok(*aes_encrypt_trace(variant, variant.rounds(), key, plaintext)?
        .last()
        .unwrap())
}

/// Decrypts one block with the straightforward inverse cipher, returning
/// the state after every inverse round.
pub fn aes_decrypt_trace(
    variant: AesVariant,
    rounds: usize,
    key: &[u8],
    ciphertext: &[u8; 16],
) -> Result<Vec<[u8; 16]>> {
    if rounds == 0 || rounds > variant.rounds() {
        return Err(Error::Contract(format!(
            "round count {rounds} outside 1..={}",
            variant.rounds()
        )));
    }
    let inv = aes_inv_sbox();
    let rk = aes_key_schedule(variant, key)?;
    let mut state = *ciphertext;
    add_round_key(&mut state, &rk[rounds]);
    let mut trace = vec![state];
    for round in (1..=rounds).rev() {
        if round != variant.rounds() {
            inv_mix_columns(&mut state);
        }
        inv_shift_rows(&mut state);
        for b in state.iter_mut() {
            *b = inv[*b as usize];
        }
        add_round_key(&mut state, &rk[round - 1]);
        trace.push(state);
    }
    Ok(trace)
}

pub fn aes_decrypt(variant: AesVariant, key: &[u8], ciphertext: &[u8; 16]) -> Result<[u8; 16]> {
    Ok(*aes_decrypt_trace(variant, variant.rounds(), key, ciphertext)?
        .last()
        .unwrap())
}

/// Appends the standard Merkle–Damgård padding (0x80, zeros, 64-bit length;
/// little-endian length for MD5, big-endian for the SHAs).
pub fn pad_message(msg: &[u8], little_endian_length: bool) -> Vec<u8> {
    let mut m = msg.to_vec();
    let bit_len = (msg.len() as u64).wrapping_mul(8);
    m.push(0x80);
    while m.len() % 64 != 56 {
        m.push(0);
    }
    if little_endian_length {
        m.extend_from_slice(&bit_len.to_le_bytes());
    } else {
        m.extend_from_slice(&bit_len.to_be_bytes());
    }
    m
}

pub const MD5_INIT: [u32; 4] = [0x6745_2301, 0xefcd_ab89, 0x98ba_dcfe, 0x1032_5476];

pub const MD5_S: [u32; 64] = [
    7, 12, 17, 22, 7, 12, 17, 22, 7, 12, 17, 22, 7, 12, 17, 22, //
    5, 9, 14, 20, 5, 9, 14, 20, 5, 9, 14, 20, 5, 9, 14, 20, //
    4, 11, 16, 23, 4, 11, 16, 23, 4, 11, 16, 23, 4, 11, 16, 23, //
    6, 10, 15, 21, 6, 10, 15, 21, 6, 10, 15, 21, 6, 10, 15, 21,
];

/// T[i] = floor(2³² · |sin(i+1)|) per RFC 1321.
pub fn md5_t() -> [u32; 64] {
    let mut t = [0u32; 64];
    for (i, e) in t.iter_mut().enumerate() {
        *e = ((i as f64 + 1.0).sin().abs() * 4294967296.0) as u32;
    }
    t
}

pub fn md5_msg_index(step: usize) -> usize {
    match step / 16 {
        0 => step,
        1 => (1 + 5 * step) % 16,
        2 => (5 + 3 * step) % 16,
        _ => (7 * step) % 16,
    }
}

/// One MD5 compression over a 64-byte block; returns the (a,b,c,d) state
/// after every step plus the final chained state.
pub fn md5_compress_trace(h: [u32; 4], block: &[u8]) -> (Vec<[u32; 4]>, [u32; 4]) {
    assert_eq!(block.len(), 64);
    let x: Vec<u32> = block
        .chunks(4)
        .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    let t = md5_t();
    let [mut a, mut b, mut c, mut d] = h;
    let mut trace = Vec::with_capacity(64);
    for i in 0..64 {
        let f = match i / 16 {
            0 => (b & c) | (!b & d),
            1 => (d & b) | (!d & c),
            2 => b ^ c ^ d,
            _ => c ^ (b | !d),
        };
        let sum = a
            .wrapping_add(f)
            .wrapping_add(x[md5_msg_index(i)])
            .wrapping_add(t[i]);
        let new_b = b.wrapping_add(sum.rotate_left(MD5_S[i]));
        a = d;
        d = c;
        c = b;
        b = new_b;
        trace.push([a, b, c, d]);
    }
    let out = [
        h[0].wrapping_add(a),
        h[1].wrapping_add(b),
        h[2].wrapping_add(c),
        h[3].wrapping_add(d),
    ];
    (trace, out)
}

pub fn md5(msg: &[u8]) -> [u8; 16] {
    let padded = pad_message(msg, true);
    let mut h = MD5_INIT;
    for block in padded.chunks(64) {
        h = md5_compress_trace(h, block).1;
    }
    let mut out = [0u8; 16];
    for (i, w) in h.iter().enumerate() {
        out[4 * i..4 * i + 4].copy_from_slice(&w.to_le_bytes());
    }
    out
}

pub const SHA1_INIT: [u32; 5] = [
    0x6745_2301,
    0xefcd_ab89,
    0x98ba_dcfe,
    0x1032_5476,
    0xc3d2_e1f0,
];

pub const SHA1_K: [u32; 4] = [0x5a82_7999, 0x6ed9_eba1, 0x8f1b_bcdc, 0xca62_c1d6];

/// One SHA-1 compression; returns (expanded schedule, per-step states,
/// chained output).
pub fn sha1_compress_trace(h: [u32; 5], block: &[u8]) -> (Vec<u32>, Vec<[u32; 5]>, [u32; 5]) {
    assert_eq!(block.len(), 64);
    let mut w: Vec<u32> = block
        .chunks(4)
        .map(|c| u32::from_be_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    for t in 16..80 {
        w.push((w[t - 3] ^ w[t - 8] ^ w[t - 14] ^ w[t - 16]).rotate_left(1));
    }
    let [mut a, mut b, mut c, mut d, mut e] = h;
    let mut trace = Vec::with_capacity(80);
    for t in 0..80 {
        let f = match t / 20 {
            0 => (b & c) | (!b & d),
            1 | 3 => b ^ c ^ d,
            _ => (b & c) | (b & d) | (c & d),
        };
        let tmp = a
            .rotate_left(5)
            .wrapping_add(f)
            .wrapping_add(e)
            .wrapping_add(w[t])
            .wrapping_add(SHA1_K[t / 20]);
        e = d;
        d = c;
        c = b.rotate_left(30);
        b = a;
        a = tmp;
        trace.push([a, b, c, d, e]);
    }
    let out = [
        h[0].wrapping_add(a),
        h[1].wrapping_add(b),
        h[2].wrapping_add(c),
        h[3].wrapping_add(d),
        h[4].wrapping_add(e),
    ];
    (w, trace, out)
}

pub fn sha1(msg: &[u8]) -> [u8; 20] {
    let padded = pad_message(msg, false);
    let mut h = SHA1_INIT;
    for block in padded.chunks(64) {
        h = sha1_compress_trace(h, block).2;
    }
    let mut out = [0u8; 20];
    for (i, w) in h.iter().enumerate() {
        out[4 * i..4 * i + 4].copy_from_slice(&w.to_be_bytes());
    }
    out
}

pub const SHA256_INIT: [u32; 8] = [
    0x6a09_e667,
    0xbb67_ae85,
    0x3c6e_f372,
    0xa54f_f53a,
    0x510e_527f,
    0x9b05_688c,
    0x1f83_d9ab,
    0x5be0_cd19,
];

pub const SHA256_K: [u32; 64] = [
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
    0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
    0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
    0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
    0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2,
];

/// One SHA-256 compression; returns (expanded schedule, per-step states,
/// chained output).
pub fn sha256_compress_trace(h: [u32; 8], block: &[u8]) -> (Vec<u32>, Vec<[u32; 8]>, [u32; 8]) {
    assert_eq!(block.len(), 64);
    let mut w: Vec<u32> = block
        .chunks(4)
        .map(|c| u32::from_be_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    for t in 16..64 {
        let s0 = w[t - 15].rotate_right(7) ^ w[t - 15].rotate_right(18) ^ (w[t - 15] >> 3);
        let s1 = w[t - 2].rotate_right(17) ^ w[t - 2].rotate_right(19) ^ (w[t - 2] >> 10);
        w.push(
            w[t - 16]
                .wrapping_add(s0)
                .wrapping_add(w[t - 7])
                .wrapping_add(s1),
        );
    }
    let [mut a, mut b, mut c, mut d, mut e, mut f, mut g, mut hh] = h;
    let mut trace = Vec::with_capacity(64);
    for t in 0..64 {
        let big_s1 = e.rotate_right(6) ^ e.rotate_right(11) ^ e.rotate_right(25);
        let ch = (e & f) ^ (!e & g);
        let t1 = hh
            .wrapping_add(big_s1)
            .wrapping_add(ch)
            .wrapping_add(SHA256_K[t])
            .wrapping_add(w[t]);
        let big_s0 = a.rotate_right(2) ^ a.rotate_right(13) ^ a.rotate_right(22);
        let maj = (a & b) ^ (a & c) ^ (b & c);
        let t2 = big_s0.wrapping_add(maj);
        hh = g;
        g = f;
        f = e;
        e = d.wrapping_add(t1);
        d = c;
        c = b;
        b = a;
        a = t1.wrapping_add(t2);
        trace.push([a, b, c, d, e, f, g, hh]);
    }
    let out = [
        h[0].wrapping_add(a),
        h[1].wrapping_add(b),
        h[2].wrapping_add(c),
        h[3].wrapping_add(d),
        h[4].wrapping_add(e),
        h[5].wrapping_add(f),
        h[6].wrapping_add(g),
        h[7].wrapping_add(hh),
    ];
    (w, trace, out)
}

pub fn sha256(msg: &[u8]) -> [u8; 32] {
    let padded = pad_message(msg, false);
    let mut h = SHA256_INIT;
    for block in padded.chunks(64) {
        h = sha256_compress_trace(h, block).2;
    }
    let mut out = [0u8; 32];
    for (i, w) in h.iter().enumerate() {
        out[4 * i..4 * i + 4].copy_from_slice(&w.to_be_bytes());
    }
    out
}

pub fn hex_decode(s: &str) -> Result<Vec<u8>> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.len() % 2 != 0 {
        return Err(Error::Contract("odd-length hex string".into()));
    }
    (0..s.len())
        .step_by(2)
        .map(|i| {
            u8::from_str_radix(&s[i..i + 2], 16)
                .map_err(|_| Error::Contract(format!("invalid hex at offset {i}")))
        })
        .collect()
}

pub fn hex_encode(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sbox_spot_values() {
        let s = aes_sbox();
        // FIPS-197 Figure 7 corners and a middle entry
        assert_eq!(s[0x00], 0x63);
        assert_eq!(s[0x01], 0x7c);
        assert_eq!(s[0x53], 0xed);
        assert_eq!(s[0xff], 0x16);
        let inv = aes_inv_sbox();
        for x in 0..256 {
            assert_eq!(inv[s[x] as usize] as usize, x);
        }
    }

    #[test]
    fn aes128_fips197_vector() {
        // FIPS-197 Appendix C.1
        let key = hex_decode("000102030405060708090a0b0c0d0e0f").unwrap();
        let pt: [u8; 16] = hex_decode("00112233445566778899aabbccddeeff")
            .unwrap()
            .try_into()
            .unwrap();
        let ct = aes_encrypt(AesVariant::Aes128, &key, &pt).unwrap();
        assert_eq!(hex_encode(&ct), "69c4e0d86a7b0430d8cdb78070b4c55a");
        let back = aes_decrypt(AesVariant::Aes128, &key, &ct).unwrap();
        assert_eq!(back, pt);
    }

    #[test]
    fn aes192_aes256_fips197_vectors() {
        // FIPS-197 Appendix C.2 / C.3
        let pt: [u8; 16] = hex_decode("00112233445566778899aabbccddeeff")
            .unwrap()
            .try_into()
            .unwrap();
        let k192 = hex_decode("000102030405060708090a0b0c0d0e0f1011121314151617").unwrap();
        let ct = aes_encrypt(AesVariant::Aes192, &k192, &pt).unwrap();
        assert_eq!(hex_encode(&ct), "dda97ca4864cdfe06eaf70a0ec0d7191");
        assert_eq!(aes_decrypt(AesVariant::Aes192, &k192, &ct).unwrap(), pt);

        let k256 =
            hex_decode("000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f").unwrap();
        let ct = aes_encrypt(AesVariant::Aes256, &k256, &pt).unwrap();
        assert_eq!(hex_encode(&ct), "8ea2b7ca516745bfeafc49904b496089");
        assert_eq!(aes_decrypt(AesVariant::Aes256, &k256, &ct).unwrap(), pt);
    }

    #[test]
    fn aes128_appendix_b_vector() {
        // FIPS-197 Appendix B
        let key = hex_decode("2b7e151628aed2a6abf7158809cf4f3c").unwrap();
        let pt: [u8; 16] = hex_decode("3243f6a8885a308d313198a2e0370734")
            .unwrap()
            .try_into()
            .unwrap();
        let ct = aes_encrypt(AesVariant::Aes128, &key, &pt).unwrap();
        assert_eq!(hex_encode(&ct), "3925841d02dc09fbdc118597196a0b32");
    }

    #[test]
    fn key_schedule_first_and_last_words() {
        // FIPS-197 Appendix A.1 expansion of the Appendix-B key
        let key = hex_decode("2b7e151628aed2a6abf7158809cf4f3c").unwrap();
        let rk = aes_key_schedule(AesVariant::Aes128, &key).unwrap();
        assert_eq!(rk.len(), 11);
        assert_eq!(hex_encode(&rk[0]), "2b7e151628aed2a6abf7158809cf4f3c");
        assert_eq!(&hex_encode(&rk[10])[24..], "b6630ca6");
    }

    #[test]
    fn md5_rfc1321_vectors() {
        assert_eq!(hex_encode(&md5(b"")), "d41d8cd98f00b204e9800998ecf8427e");
        assert_eq!(hex_encode(&md5(b"a")), "0cc175b9c0f1b6a831c399e269772661");
        assert_eq!(hex_encode(&md5(b"abc")), "900150983cd24fb0d6963f7d28e17f72");
        assert_eq!(
            hex_encode(&md5(b"message digest")),
            "f96b697d7cb7938d525a2f31aaf161d0"
        );
    }

    #[test]
    fn sha1_fips180_vectors() {
        assert_eq!(
            hex_encode(&sha1(b"abc")),
            "a9993e364706816aba3e25717850c26c9cd0d89d"
        );
        assert_eq!(
            hex_encode(&sha1(b"abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq")),
            "84983e441c3bd26ebaae4aa1f95129e5e54670f1"
        );
    }

    #[test]
    fn sha256_fips180_vectors() {
        assert_eq!(
            hex_encode(&sha256(b"abc")),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_eq!(
            hex_encode(&sha256(b"")),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn padding_layout() {
        let p = pad_message(b"abc", false);
        assert_eq!(p.len(), 64);
        assert_eq!(p[3], 0x80);
        assert_eq!(&p[56..], &[0, 0, 0, 0, 0, 0, 0, 24]);
        let p = pad_message(&[0u8; 56], true);
        assert_eq!(p.len(), 128);
        // 56 bytes = 448 bits = 0x01c0, little-endian
        assert_eq!(&p[120..122], &[0xc0, 0x01]);
    }

    #[test]
    fn hex_round_trip() {
        let b = hex_decode("00ff10aB").unwrap();
        assert_eq!(b, vec![0x00, 0xff, 0x10, 0xab]);
        assert_eq!(hex_encode(&b), "00ff10ab");
        assert!(hex_decode("abc").is_err());
        assert!(hex_decode("zz").is_err());
    }
}
