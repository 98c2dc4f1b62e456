//! A miniature 8-bit cipher small enough for exhaustive verification.
//!
//! One round over an 8-bit block with an 8-bit key: key addition, a 4-bit
//! S-box on each nibble (the GF(2⁴) inversion table, applied in its own
//! basis), a linear nibble mix, and a round constant. The key-recovery
//! instance stays at 18 variables, so its entire zero-energy set can be
//! enumerated and compared against the true key preimage set.

use super::build::{Bx, CryptoBuilder, CryptoInstance};
use crate::error::Result;
use crate::patterns::{gf16_inv_table, Literal};
use crate::qubo::VarKind;

pub const TOY_ROUND_CONST: u8 = 0x5a;

/// The reference cipher: ct = mix(S(pt ⊕ k)) ⊕ 0x5a, with S the GF(2⁴)
/// inversion table per nibble and mix(lo, hi) = (lo ⊕ hi, hi).
pub fn toy_encrypt(key: u8, pt: u8) -> u8 {
    let table = gf16_inv_table();
    let x = pt ^ key;
    let lo = table[(x & 15) as usize];
    let hi = table[(x >> 4) as usize];
    ((hi << 4) | (lo ^ hi)) ^ TOY_ROUND_CONST
}

/// Key-recovery instance: which 8-bit keys map `pt` to `ct`?
pub fn build_toy(pt: u8, ct: u8) -> Result<CryptoInstance> {
    let mut b = CryptoBuilder::new(None)?;
    let key = b.fresh_word(8, VarKind::CircuitInput, "key")?;
    let table = gf16_inv_table();

    // whitened state bits are single key literals
    let state: Vec<Literal> = (0..8)
        .map(|i| {
            let l = Literal::pos(key[i]);
            if pt >> i & 1 == 1 {
                l.negate()
            } else {
                l
            }
        })
        .collect();
    let lo = b.gf16_inv(&table, [state[0], state[1], state[2], state[3]], "toy-sbox")?;
    let hi = b.gf16_inv(&table, [state[4], state[5], state[6], state[7]], "toy-sbox")?;

    let out = ct ^ TOY_ROUND_CONST;
    for i in 0..4 {
        let mut low_bit = Bx::from_var(lo[i]);
        low_bit.xor_assign(&Bx::from_var(hi[i]));
        b.constrain(&low_bit, out >> i & 1 == 1)?;
        b.constrain(&Bx::from_var(hi[i]), out >> (i + 4) & 1 == 1)?;
    }
    b.finish("toy", key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::brute_force_zero_set;
    use std::collections::BTreeSet;

    #[test]
    fn toy_cipher_is_a_key_permutation() {
        // for fixed pt, k → ct must be a bijection
        let pt = 0x3c;
        let mut seen = [false; 256];
        for k in 0..=255u8 {
            let ct = toy_encrypt(k, pt);
            assert!(!seen[ct as usize]);
            seen[ct as usize] = true;
        }
    }

    #[test]
    fn zero_energy_keys_match_preimages() {
        for (pt, ct_key) in [(0x00u8, 0x00u8), (0x3c, 0xa5), (0xff, 0x17)] {
            let ct = toy_encrypt(ct_key, pt);
            let inst = build_toy(pt, ct).unwrap();
            assert!(inst.qubo.num_vars() <= 26);
            let report = brute_force_zero_set(&inst.qubo, &inst.input_vars).unwrap();
            assert!(!report.has_negative);
            let keys: BTreeSet<u8> = report.zero_set.iter().map(|&m| m as u8).collect();
            let expected: BTreeSet<u8> =
                (0..=255u8).filter(|&k| toy_encrypt(k, pt) == ct).collect();
            assert_eq!(keys, expected);
            assert!(expected.contains(&ct_key));
        }
    }
}
