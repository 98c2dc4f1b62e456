//! Key-recovery instances for AES-128/192/256, both directions.
//!
//! The unknowns are the key bits. A known block (plaintext for the forward
//! cipher, ciphertext for the inverse cipher) is propagated symbolically
//! through the rounds, and the resulting block is pinned to its known
//! value, so the zero-energy assignments are exactly the keys mapping one
//! to the other.
//!
//! All GF(2)-linear structure — ShiftRows, (Inv)MixColumns, AddRoundKey,
//! the key schedule's word XORs, both S-box basis changes and the affine
//! map — stays in XOR-expression form. Each S-box spends substitution
//! markers on the tower-basis bits at the input of the GF(2⁸)
//! multiplicative inversion, then three GF(2⁴) multiplications of three
//! GF(2²) multiplication fragments each, and one GF(2⁴) inversion
//! fragment.

use super::build::{Bx, CryptoBuilder, CryptoInstance};
use super::reference::{gf256_mul, sbox_affine, AesVariant};
use super::sbox::{invert_lin, Tower};
use crate::error::{Error, Result};
use crate::patterns::Literal;
use crate::qubo::{VarId, VarKind};

/// One AES key-recovery instance description.
#[derive(Debug, Clone)]
pub struct AesJob {
    pub variant: AesVariant,
    /// Inverse cipher when set.
    pub decrypt: bool,
    /// Round count, `1..=variant.rounds()`.
    pub rounds: usize,
    /// The known input block: plaintext (forward) or ciphertext (inverse).
    pub known_block: [u8; 16],
    /// The block the output state is pinned to.
    pub target: [u8; 16],
    pub clause_limit: Option<usize>,
}

type Byte = Vec<Bx>;

/// Applies a GF(2)-linear map given by basis-bit images.
fn lin(images: &[u8], width_out: usize, x: &[Bx]) -> Vec<Bx> {
    (0..width_out)
        .map(|i| {
            let mut acc = Bx::default();
            for (j, img) in images.iter().enumerate() {
                if img >> i & 1 == 1 {
                    acc.xor_assign(&x[j]);
                }
            }
            acc
        })
        .collect()
}

fn const_byte(v: u8) -> Byte {
    (0..8).map(|i| Bx::from_const(v >> i & 1 == 1)).collect()
}

fn xor_byte(a: &Byte, b: &Byte) -> Byte {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let mut r = x.clone();
            r.xor_assign(y);
            r
        })
        .collect()
}

fn lit_bx(l: Literal) -> Bx {
    let mut b = Bx::from_var(l.var);
    b.xor_const(l.negated);
    b
}

struct AesBuilder {
    b: CryptoBuilder,
    tw: Tower,
    /// Images of the S-box affine map's linear part L (Sbox = L∘inv ⊕ 0x63).
    affine: [u8; 8],
    affine_inv: [u8; 8],
    scale4_alpha: [u8; 2],
    scale4_beta: [u8; 2],
    scale16_tau: [u8; 4],
    sq_scale16_nu: [u8; 4],
    sq_scale16_id: [u8; 4],
}

impl AesBuilder {
    fn new(clause_limit: Option<usize>) -> Result<Self> {
        let tw = Tower::derive()?;
        let affine: [u8; 8] = std::array::from_fn(|i| sbox_affine(1 << i) ^ 0x63);
        let affine_inv: [u8; 8] = invert_lin(&affine)
            .ok_or_else(|| Error::Structure("S-box affine map not invertible".into()))?
            .try_into()
            .unwrap();
        Ok(AesBuilder {
            b: CryptoBuilder::new(clause_limit)?,
            scale4_alpha: tw.scale4_images(tw.alpha),
            scale4_beta: tw.scale4_images(tw.beta),
            scale16_tau: tw.scale16_images(tw.tau),
            sq_scale16_nu: tw.sq_scale16_images(tw.nu),
            sq_scale16_id: tw.sq_scale16_images(tw.e4),
            tw,
            affine,
            affine_inv,
        })
    }

    /// Expression bits as literals, pinning the rare constant bit.
    fn mat_bits(&mut self, bits: &[Bx], origin: &str) -> Result<Vec<Literal>> {
        bits.iter()
            .map(|e| match e.as_const() {
                None => self.b.materialize(e, origin),
                Some(c) => self.b.pinned_const(c, origin),
            })
            .collect()
    }

    /// GF(2⁴) Karatsuba product of two materialized nibbles (bits 0–1 the
    /// low GF(2²) half, bits 2–3 the high half): three GF(2²) fragments.
    fn gf16_mult(&mut self, p: &[Literal], q: &[Literal], origin: &str) -> Result<Vec<Bx>> {
        let sum_half = |b: &mut AesBuilder, x: &[Literal]| -> Result<[Literal; 2]> {
            let lo = {
                let mut e = lit_bx(x[0]);
                e.xor_assign(&lit_bx(x[2]));
                b.b.materialize(&e, origin)?
            };
            let hi = {
                let mut e = lit_bx(x[1]);
                e.xor_assign(&lit_bx(x[3]));
                b.b.materialize(&e, origin)?
            };
            Ok([lo, hi])
        };
        let psum = sum_half(self, p)?;
        let qsum = sum_half(self, q)?;
        let table = self.tw.m4;
        let m0 = self.b.gf4_mult(&table, [p[0], p[1]], [q[0], q[1]], origin)?;
        let m1 = self.b.gf4_mult(&table, [p[2], p[3]], [q[2], q[3]], origin)?;
        let m2 = self.b.gf4_mult(&table, psum, qsum, origin)?;
        let bx2 = |vs: [VarId; 2]| vec![Bx::from_var(vs[0]), Bx::from_var(vs[1])];
        let (m0, m1, m2) = (bx2(m0), bx2(m1), bx2(m2));
        // (p1·t + p0)(q1·t + q0) mod t² + αt + β:
        //   hi = m2 ⊕ m0 ⊕ m1 ⊕ α·m1, lo = m0 ⊕ β·m1
        let alpha_m1 = lin(&self.scale4_alpha, 2, &m1);
        let beta_m1 = lin(&self.scale4_beta, 2, &m1);
        let mut out = Vec::with_capacity(4);
        for i in 0..2 {
            let mut lo = m0[i].clone();
            lo.xor_assign(&beta_m1[i]);
            out.push(lo);
        }
        for i in 0..2 {
            let mut hi = m2[i].clone();
            hi.xor_assign(&m0[i]);
            hi.xor_assign(&m1[i]);
            hi.xor_assign(&alpha_m1[i]);
            out.push(hi);
        }
        Ok(out)
    }

    /// GF(2⁸) inversion of a tower-basis byte expression: the Canright
    /// pair decomposition with substitution markers on the eight input
    /// bits.
    fn inv256(&mut self, t: &[Bx]) -> Result<Byte> {
        let lits = self.mat_bits(t, "sbox-in")?;
        let b_half: Vec<Literal> = lits[0..4].to_vec();
        let a_half: Vec<Literal> = lits[4..8].to_vec();
        let a_bx: Vec<Bx> = a_half.iter().map(|&l| lit_bx(l)).collect();
        let b_bx: Vec<Bx> = b_half.iter().map(|&l| lit_bx(l)).collect();

        // d = ν·a² ⊕ τ·(a·b) ⊕ b²
        let ab = self.gf16_mult(&a_half, &b_half, "sbox-mult")?;
        let nu_a2 = lin(&self.sq_scale16_nu, 4, &a_bx);
        let tau_ab = lin(&self.scale16_tau, 4, &ab);
        let b2 = lin(&self.sq_scale16_id, 4, &b_bx);
        let mut d = Vec::with_capacity(4);
        for i in 0..4 {
            let mut e = nu_a2[i].clone();
            e.xor_assign(&tau_ab[i]);
            e.xor_assign(&b2[i]);
            d.push(e);
        }

        // invert in the inversion polynomial's own basis via ψ
        let d_psi = lin(&self.tw.psi, 4, &d);
        let d_lits: Vec<Literal> = self.mat_bits(&d_psi, "sbox-inv")?;
        let table = self.tw.inv16_pattern;
        let inv_out = self.b.gf16_inv(
            &table,
            [d_lits[0], d_lits[1], d_lits[2], d_lits[3]],
            "sbox-inv",
        )?;
        let inv_bx: Vec<Bx> = inv_out.iter().map(|&v| Bx::from_var(v)).collect();
        let dp = lin(&self.tw.psi_inv, 4, &inv_bx);
        let dp_lits = self.mat_bits(&dp, "sbox-inv")?;

        // hi = a·d', lo = (τ·a ⊕ b)·d' = τ·(a·d') ⊕ b·d'
        let hi = self.gf16_mult(&a_half, &dp_lits, "sbox-mult")?;
        let bdp = self.gf16_mult(&b_half, &dp_lits, "sbox-mult")?;
        let tau_hi = lin(&self.scale16_tau, 4, &hi);
        let mut out = Vec::with_capacity(8);
        for i in 0..4 {
            let mut lo = tau_hi[i].clone();
            lo.xor_assign(&bdp[i]);
            out.push(lo);
        }
        out.extend(hi);
        Ok(out)
    }

    fn sbox(&mut self, x: &Byte) -> Result<Byte> {
        let t = lin(&self.tw.to_tower, 8, x);
        let inv = self.inv256(&t)?;
        let y = lin(&self.tw.from_tower, 8, &inv);
        let mut out = lin(&self.affine, 8, &y);
        for (i, e) in out.iter_mut().enumerate() {
            e.xor_const(0x63 >> i & 1 == 1);
        }
        Ok(out)
    }

    fn inv_sbox(&mut self, y: &Byte) -> Result<Byte> {
        let mut shifted = y.clone();
        for (i, e) in shifted.iter_mut().enumerate() {
            e.xor_const(0x63 >> i & 1 == 1);
        }
        let u = lin(&self.affine_inv, 8, &shifted);
        let t = lin(&self.tw.to_tower, 8, &u);
        let inv = self.inv256(&t)?;
        Ok(lin(&self.tw.from_tower, 8, &inv))
    }
}

/// Images of multiplication by `c` in the AES byte field.
fn gf256_scale_images(c: u8) -> [u8; 8] {
    std::array::from_fn(|i| gf256_mul(c, 1 << i))
}

fn mix_column(cols: &[Byte], weights: [u8; 4]) -> Vec<Byte> {
    let images: Vec<[u8; 8]> = weights.iter().map(|&w| gf256_scale_images(w)).collect();
    (0..4)
        .map(|r| {
            let mut acc = const_byte(0);
            for k in 0..4 {
                let scaled = lin(&images[k], 8, &cols[(r + k) % 4]);
                acc = xor_byte(&acc, &scaled);
            }
            acc
        })
        .collect()
}

fn mix_columns_state(state: &[Byte], inverse: bool) -> Vec<Byte> {
    let weights = if inverse { [14, 11, 13, 9] } else { [2, 3, 1, 1] };
    let mut out = Vec::with_capacity(16);
    for c in 0..4 {
        let cols: Vec<Byte> = (0..4).map(|r| state[4 * c + r].clone()).collect();
        out.extend(mix_column(&cols, weights));
    }
    out
}

fn shift_rows_state(state: &[Byte], inverse: bool) -> Vec<Byte> {
    let mut out = state.to_vec();
    for r in 1..4 {
        for c in 0..4 {
            if inverse {
                out[r + 4 * ((c + r) % 4)] = state[r + 4 * c].clone();
            } else {
                out[r + 4 * c] = state[r + 4 * ((c + r) % 4)].clone();
            }
        }
    }
    out
}

/// Builds the symbolic key schedule: `4(rounds+1)` words of four bytes.
fn key_schedule(
    ab: &mut AesBuilder,
    variant: AesVariant,
    rounds: usize,
    key_bytes: &[Byte],
) -> Result<Vec<Vec<Byte>>> {
    let nk = variant.nk_words();
    let mut w: Vec<Vec<Byte>> = key_bytes.chunks(4).map(|c| c.to_vec()).collect();
    let mut rcon = 1u8;
    for i in nk..4 * (rounds + 1) {
        let mut t = w[i - 1].clone();
        if i % nk == 0 {
            let rot: Vec<Byte> = vec![t[1].clone(), t[2].clone(), t[3].clone(), t[0].clone()];
            t = rot
                .iter()
                .map(|b| ab.sbox(b))
                .collect::<Result<Vec<Byte>>>()?;
            for (j, e) in t[0].iter_mut().enumerate() {
                e.xor_const(rcon >> j & 1 == 1);
            }
            rcon = gf256_mul(rcon, 2);
        } else if nk > 6 && i % nk == 4 {
            t = t
                .iter()
                .map(|b| ab.sbox(b))
                .collect::<Result<Vec<Byte>>>()?;
        }
        let prev = &w[i - nk];
        let next: Vec<Byte> = (0..4).map(|j| xor_byte(&t[j], &prev[j])).collect();
        w.push(next);
    }
    Ok(w)
}

fn round_key(w: &[Vec<Byte>], round: usize) -> Vec<Byte> {
    (0..16).map(|i| w[4 * round + i / 4][i % 4].clone()).collect()
}

trait VariantExt {
    fn nk_words(&self) -> usize;
}
impl VariantExt for AesVariant {
    fn nk_words(&self) -> usize {
        self.key_bytes() / 4
    }
}

/// Builds one AES key-recovery instance.
pub fn build_aes(job: &AesJob) -> Result<CryptoInstance> {
    if job.rounds == 0 || job.rounds > job.variant.rounds() {
        return Err(Error::Contract(format!(
            "round count {} outside 1..={}",
            job.rounds,
            job.variant.rounds()
        )));
    }
    let mut ab = AesBuilder::new(job.clause_limit)?;
    let key_vars = ab
        .b
        .fresh_word(job.variant.key_bytes() * 8, VarKind::CircuitInput, "key")?;
    let key_bytes: Vec<Byte> = key_vars
        .chunks(8)
        .map(|c| c.iter().map(|&v| Bx::from_var(v)).collect())
        .collect();
    let w = key_schedule(&mut ab, job.variant, job.rounds, &key_bytes)?;

    let known: Vec<Byte> = job.known_block.iter().map(|&b| const_byte(b)).collect();
    let mut state: Vec<Byte>;
    if !job.decrypt {
        state = (0..16)
            .map(|i| xor_byte(&known[i], &round_key(&w, 0)[i]))
            .collect();
        for round in 1..=job.rounds {
            state = state
                .iter()
                .map(|b| ab.sbox(b))
                .collect::<Result<Vec<Byte>>>()?;
            state = shift_rows_state(&state, false);
            if round != job.variant.rounds() {
                state = mix_columns_state(&state, false);
            }
            let rk = round_key(&w, round);
            state = (0..16).map(|i| xor_byte(&state[i], &rk[i])).collect();
        }
    } else {
        let rk = round_key(&w, job.rounds);
        state = (0..16).map(|i| xor_byte(&known[i], &rk[i])).collect();
        for round in (1..=job.rounds).rev() {
            if round != job.variant.rounds() {
                state = mix_columns_state(&state, true);
            }
            state = shift_rows_state(&state, true);
            state = state
                .iter()
                .map(|b| ab.inv_sbox(b))
                .collect::<Result<Vec<Byte>>>()?;
            let rk = round_key(&w, round - 1);
            state = (0..16).map(|i| xor_byte(&state[i], &rk[i])).collect();
        }
    }

    for (i, byte) in state.iter().enumerate() {
        for (j, bit) in byte.iter().enumerate() {
            ab.b.constrain(bit, job.target[i] >> j & 1 == 1)?;
        }
    }
    let name = format!(
        "aes{}{}",
        job.variant.key_bytes() * 8,
        if job.decrypt { "d" } else { "e" }
    );
    ab.b.finish(&name, key_vars)
}


#[cfg(test)]
mod measure {
    use super::*;
    #[test]
    #[ignore]
    fn print_stats() {
        for variant in [AesVariant::Aes128, AesVariant::Aes192, AesVariant::Aes256] {
            for decrypt in [false, true] {
                let job = AesJob {
                    variant,
                    decrypt,
                    rounds: variant.rounds(),
                    known_block: [0u8; 16],
                    target: [0u8; 16],
                    clause_limit: None,
                };
                let r = build_aes(&job).unwrap().report();
                println!(
                    "{} vars={} density={:.3}% max={}",
                    r.algorithm, r.num_vars, r.density_percent, r.max_abs_coeff
                );
            }
        }
    }
}
