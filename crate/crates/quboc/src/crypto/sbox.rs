//! Tower-field decomposition of the AES S-box, derived at runtime.
//!
//! The nonlinear fragments (GF(2²) multiplication, GF(2⁴) inversion) are
//! fixed by their penalty polynomials; everything else here is linear glue
//! recovered by search so that the composite matches the standard S-box:
//!
//! 1. the GF(2²) multiplication table and GF(2⁴) inversion table are read
//!    off the polynomials' zero sets;
//! 2. GF(2⁴) is rebuilt as pairs over GF(2²) modulo t² + αt + β, and a
//!    GF(2)-linear change of basis ψ is found that conjugates the pair
//!    representation's inverse into the polynomial's table;
//! 3. GF(2⁸) is built as pairs over GF(2⁴) modulo Y² + τY + ν, and a root
//!    of the AES polynomial x⁸+x⁴+x³+x+1 in that representation defines the
//!    isomorphism to the standard byte basis.
//!
//! All searches run in a fixed order, so the derived constants are
//! deterministic.

use super::reference::{aes_sbox, sbox_affine};
use crate::error::{Error, Result};
use crate::patterns::{gf4_mult_table, gf16_inv_table};

/// Applies a GF(2)-linear map given by the images of the basis bits.
pub fn apply_lin(images: &[u8], x: u8) -> u8 {
    let mut r = 0;
    for (i, &img) in images.iter().enumerate() {
        if x >> i & 1 == 1 {
            r ^= img;
        }
    }
    r
}

/// Inverts a square GF(2)-linear map (images of basis bits), if invertible.
pub fn invert_lin(images: &[u8]) -> Option<Vec<u8>> {
    let n = images.len();
    // rows of [A | I]: images are the columns of A, so row r collects bit r
    // of every image
    let mut rows: Vec<(u8, u8)> = (0..n)
        .map(|r| {
            let mut bits = 0u8;
            for (i, &img) in images.iter().enumerate() {
                bits |= (img >> r & 1) << i;
            }
            (bits, 1u8 << r)
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| rows[r].0 >> col & 1 == 1)?;
        rows.swap(col, pivot);
        let (pa, pb) = rows[col];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != col && row.0 >> col & 1 == 1 {
                row.0 ^= pa;
                row.1 ^= pb;
            }
        }
    }
    // rows now hold [I | A^{-1}]; column i of A^{-1} is the inverse image
    let mut out = vec![0u8; n];
    for (i, o) in out.iter_mut().enumerate() {
        for (r, &(_, tag)) in rows.iter().enumerate() {
            if tag >> i & 1 == 1 {
                *o |= 1 << r;
            }
        }
    }
    Some(out)
}

/// The derived tower structure and its isomorphism to the AES byte basis.
pub struct Tower {
    /// GF(2²) multiplication table, encoding from the penalty polynomial.
    pub m4: [[u8; 4]; 4],
    /// Multiplicative identity of the GF(2²) table.
    pub e4: u8,
    /// GF(2⁴) inversion table in the penalty polynomial's own basis.
    pub inv16_pattern: [u8; 16],
    /// GF(2⁴) = GF(2²)[t] / (t² + αt + β).
    pub alpha: u8,
    pub beta: u8,
    /// ψ: pair representation → polynomial basis (images of the four bits).
    pub psi: [u8; 4],
    pub psi_inv: [u8; 4],
    /// GF(2⁸) = GF(2⁴)[Y] / (Y² + τY + ν).
    pub tau: u8,
    pub nu: u8,
    /// Isomorphism: image of standard-basis bit i as a tower byte.
    pub to_tower: [u8; 8],
    pub from_tower: [u8; 8],
    mul16: [[u8; 16]; 16],
    inv16: [u8; 16],
}

impl Tower {
    pub fn mul4(&self, a: u8, b: u8) -> u8 {
        self.m4[a as usize][b as usize]
    }

    pub fn mul16(&self, a: u8, b: u8) -> u8 {
        self.mul16[a as usize][b as usize]
    }

    /// GF(2⁴) inverse in the pair representation.
    pub fn inv16(&self, a: u8) -> u8 {
        self.inv16[a as usize]
    }

    pub fn mul256(&self, p: u8, q: u8) -> u8 {
        let (p1, p0) = (p >> 4, p & 15);
        let (q1, q0) = (q >> 4, q & 15);
        let m0 = self.mul16(p0, q0);
        let m1 = self.mul16(p1, q1);
        let m2 = self.mul16(p0 ^ p1, q0 ^ q1);
        let hi = m2 ^ m0 ^ m1 ^ self.mul16(self.tau, m1);
        let lo = m0 ^ self.mul16(self.nu, m1);
        hi << 4 | lo
    }

    /// GF(2⁸) inverse via the Canright-style pair decomposition: for
    /// P = aY + b, the discriminant d = a²ν + abτ + b² is inverted in
    /// GF(2⁴) and scaled back onto both halves.
    pub fn inv256_tower(&self, p: u8) -> u8 {
        let (a, b) = (p >> 4, p & 15);
        let d = self.mul16(self.mul16(a, a), self.nu)
            ^ self.mul16(self.mul16(a, b), self.tau)
            ^ self.mul16(b, b);
        let dp = self.inv16(d);
        let hi = self.mul16(a, dp);
        let lo = self.mul16(self.mul16(a, self.tau) ^ b, dp);
        hi << 4 | lo
    }

    /// The composite S-box: basis change, tower inverse, basis change back,
    /// standard affine map. Matches `aes_sbox()` on every byte.
    pub fn sbox(&self, x: u8) -> u8 {
        let t = apply_lin(&self.to_tower, x);
        let inv = self.inv256_tower(t);
        sbox_affine(apply_lin(&self.from_tower, inv))
    }

    /// Images of multiplication by the GF(2²) constant `c`.
    pub fn scale4_images(&self, c: u8) -> [u8; 2] {
        [self.mul4(c, 1), self.mul4(c, 2)]
    }

    /// Images of multiplication by the GF(2⁴) constant `c`.
    pub fn scale16_images(&self, c: u8) -> [u8; 4] {
        [0, 1, 2, 3].map(|i| self.mul16(c, 1 << i))
    }

    /// Images of x ↦ c·x² over GF(2⁴) (Frobenius squaring is linear).
    pub fn sq_scale16_images(&self, c: u8) -> [u8; 4] {
        [0u8, 1, 2, 3].map(|i| {
            let b = 1u8 << i;
            self.mul16(c, self.mul16(b, b))
        })
    }

    pub fn derive() -> Result<Tower> {
        let m4 = gf4_mult_table();
        let inv16_pattern = gf16_inv_table();
        let e4 = (0..4)
            .find(|&e| (0..4).all(|b| m4[e as usize][b as usize] == b))
            .ok_or_else(|| Error::Structure("GF(4) table has no identity".into()))?;

        // Step 2: quadratic extension of the GF(4) table plus ψ.
        let (alpha, beta, psi, mul16, inv16) = derive_gf16(&m4, e4, &inv16_pattern)?;
        let psi_inv: [u8; 4] = invert_lin(&psi)
            .ok_or_else(|| Error::Structure("ψ not invertible".into()))?
            .try_into()
            .unwrap();

        // Step 3: quadratic extension to GF(256) and the AES isomorphism.
        let reference = aes_sbox();
        for tau in 1..16u8 {
            for nu in 1..16u8 {
                // Y² + τY + ν must have no root in GF(2⁴)
                if (0..16).any(|r| mul16[r][r] ^ mul16[tau as usize][r] ^ nu == 0) {
                    continue;
                }
                let mut t = Tower {
                    m4,
                    e4,
                    inv16_pattern,
                    alpha,
                    beta,
                    psi,
                    psi_inv,
                    tau,
                    nu,
                    to_tower: [0; 8],
                    from_tower: [0; 8],
                    mul16,
                    inv16,
                };
                let e256 = e4; // (0, e₄) is the identity of the pair field
                let pow = |t: &Tower, v: u8, k: usize| {
                    let mut r = e256;
                    for _ in 0..k {
                        r = t.mul256(r, v);
                    }
                    r
                };
                let root = (0..=255u8).find(|&v| {
                    pow(&t, v, 8) ^ pow(&t, v, 4) ^ pow(&t, v, 3) ^ v ^ e256 == 0
                });
                let Some(root) = root else { continue };
                let mut acc = e256;
                let mut images = [0u8; 8];
                for img in images.iter_mut() {
                    *img = acc;
                    acc = t.mul256(acc, root);
                }
                t.to_tower = images;
                let Some(from) = invert_lin(&t.to_tower) else {
                    continue;
                };
                t.from_tower = from.try_into().unwrap();
                if (0..=255u8).all(|x| t.sbox(x) == reference[x as usize]) {
                    return Ok(t);
                }
            }
        }
        Err(Error::Structure(
            "no tower representation matches the S-box".into(),
        ))
    }
}

/// Finds (α, β) with t²+αt+β irreducible over the GF(4) table and a linear
/// ψ conjugating the pair-representation inverse into the polynomial table.
#[allow(clippy::type_complexity)]
fn derive_gf16(
    m4: &[[u8; 4]; 4],
    e4: u8,
    inv16_pattern: &[u8; 16],
) -> Result<(u8, u8, [u8; 4], [[u8; 16]; 16], [u8; 16])> {
    for alpha in 1..4u8 {
        for beta in 1..4u8 {
            // irreducible: r² + αr + β ≠ 0 for every r in GF(4)
            let irred = (0..4u8).all(|r| {
                m4[r as usize][r as usize] ^ m4[alpha as usize][r as usize] ^ beta != 0
            });
            if !irred {
                continue;
            }
            let mut mul16 = [[0u8; 16]; 16];
            for (a, row) in mul16.iter_mut().enumerate() {
                for (b, cell) in row.iter_mut().enumerate() {
                    let (a1, a0) = ((a >> 2) as u8, (a & 3) as u8);
                    let (b1, b0) = ((b >> 2) as u8, (b & 3) as u8);
                    let m0 = m4[a0 as usize][b0 as usize];
                    let m1 = m4[a1 as usize][b1 as usize];
                    let m2 = m4[(a0 ^ a1) as usize][(b0 ^ b1) as usize];
                    let hi = m2 ^ m0 ^ m1 ^ m4[alpha as usize][m1 as usize];
                    let lo = m0 ^ m4[beta as usize][m1 as usize];
                    *cell = hi << 2 | lo;
                }
            }
            if mul16[e4 as usize].iter().enumerate().any(|(b, &p)| p != b as u8) {
                continue;
            }
            let mut inv16 = [0u8; 16];
            for a in 1..16 {
                inv16[a] = (0..16)
                    .find(|&b| mul16[a][b as usize] == e4)
                    .expect("field element has an inverse");
            }
            // ψ: images of the four bits, first match in lexicographic order
            let mut images = [0u8; 4];
            'psi: for code in 0..(1u32 << 16) {
                for (i, img) in images.iter_mut().enumerate() {
                    *img = (code >> (4 * i) & 15) as u8;
                }
                let mut seen = [false; 16];
                seen[0] = true;
                for v in 1..16u8 {
                    let w = apply_lin(&images, v);
                    if seen[w as usize] {
                        continue 'psi;
                    }
                    seen[w as usize] = true;
                }
                let conjugates = (0..16u8).all(|d| {
                    apply_lin(&images, inv16[d as usize])
                        == inv16_pattern[apply_lin(&images, d) as usize]
                });
                if conjugates {
                    return Ok((alpha, beta, images, mul16, inv16));
                }
            }
        }
    }
    Err(Error::Structure(
        "no GF(16) pair representation conjugates the inversion table".into(),
    ))
}
