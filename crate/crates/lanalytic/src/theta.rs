//! Characters of Pic(O_c), theta series theta_chi = sum_A chi^{-1}(A) theta_{Q_A},
//! and the passage from an imprimitive character to the primitive one below it.

use crate::LError;
use classgroup::{reduced_forms, ClassForm, PicGroup};
use ecarith::numth::{gcd, is_prime};
use num_complex::Complex64;
use std::f64::consts::PI;

/// chi(A_i) = exp(2 pi i exps[i] / modulus).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Character {
    pub modulus: u64,
    pub exps: Vec<u64>,
}

impl Character {
    pub fn trivial(h: usize) -> Self {
        Character { modulus: 1, exps: vec![0; h] }
    }

    pub fn value(&self, i: usize) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * self.exps[i] as f64 / self.modulus as f64)
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&e| e % self.modulus == 0)
    }

    pub fn order(&self) -> u64 {
        let g = self.exps.iter().fold(self.modulus, |g, &e| gcd(g, e));
        self.modulus / g
    }

    pub fn conj(&self) -> Self {
        Character { modulus: self.modulus, exps: self.exps.iter().map(|&e| (self.modulus - e % self.modulus) % self.modulus).collect() }
    }

    /// Same character with the exponents reduced to lowest terms.
    pub fn normalized(&self) -> Self {
        let o = self.order();
        let f = self.modulus / o;
        Character { modulus: o, exps: self.exps.iter().map(|&e| (e / f) % o).collect() }
    }

    pub fn is_homomorphism(&self, pic: &PicGroup) -> bool {
        let h = pic.h();
        (0..h).all(|i| (0..h).all(|j| (self.exps[i] + self.exps[j]) % self.modulus == self.exps[pic.mul(i, j)] % self.modulus))
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// All h characters, trivial first, in a fixed order.
pub fn characters(pic: &PicGroup) -> Vec<Character> {
    let h = pic.h();
    let exponent = (0..h).fold(1, |e, i| lcm(e, pic.order(i) as u64));
    // greedy generating set, largest orders first
    let mut by_order: Vec<usize> = (0..h).collect();
    by_order.sort_by_key(|&i| (std::cmp::Reverse(pic.order(i)), i));
    let mut gens = vec![];
    let mut span = vec![false; h];
    span[pic.identity] = true;
    for g in by_order {
        if span[g] {
            continue;
        }
        gens.push(g);
        let mut changed = true;
        while changed {
            changed = false;
            for x in 0..h {
                if span[x] && !span[pic.mul(x, g)] {
                    span[pic.mul(x, g)] = true;
                    changed = true;
                }
                for &k in &gens {
                    if span[x] && !span[pic.mul(x, k)] {
                        span[pic.mul(x, k)] = true;
                        changed = true;
                    }
                }
            }
        }
    }
    let mut out = vec![];
    let r = gens.len();
    let total = (exponent as usize).pow(r as u32);
    for code in 0..total {
        let mut ks = vec![0u64; r];
        let mut c = code;
        for k in ks.iter_mut().rev() {
            *k = (c % exponent as usize) as u64;
            c /= exponent as usize;
        }
        if let Some(ch) = extend(pic, &gens, &ks, exponent) {
            out.push(ch);
        }
    }
    out
}

fn extend(pic: &PicGroup, gens: &[usize], ks: &[u64], modulus: u64) -> Option<Character> {
    let h = pic.h();
    let mut val: Vec<Option<u64>> = vec![None; h];
    val[pic.identity] = Some(0);
    let mut stack = vec![pic.identity];
    while let Some(x) = stack.pop() {
        let vx = val[x].unwrap();
        for (g, k) in gens.iter().zip(ks) {
            let y = pic.mul(x, *g);
            let vy = (vx + k) % modulus;
            match val[y] {
                None => {
                    val[y] = Some(vy);
                    stack.push(y);
                }
                Some(v) if v != vy => return None,
                _ => {}
            }
        }
    }
    let ch = Character { modulus, exps: val.into_iter().map(|v| v.unwrap_or(0)).collect() };
    ch.is_homomorphism(pic).then_some(ch)
}

/// Coefficients b_m = sum_A chi^{-1}(A) #{(u,v) : Q_A(u,v) = m}, m = 0..n_max.
#[derive(Clone, Debug)]
pub struct ThetaSeries {
    pub disc: i64,
    pub chi: Character,
    pub b: Vec<Complex64>,
}

/// Lattice sweep over every reduced form.
pub fn theta_coeffs(pic: &PicGroup, chi: &Character, n_max: usize) -> ThetaSeries {
    let mut b = vec![Complex64::new(0.0, 0.0); n_max + 1];
    let dabs = pic.disc.unsigned_abs() as f64;
    for (i, f) in pic.forms.iter().enumerate() {
        let w = chi.value(i).conj();
        let (a, bb, c) = (f.a as i128, f.b as i128, f.c as i128);
        let m = n_max as i128;
        let vmax = ((4.0 * f.a as f64 * n_max as f64 / dabs).sqrt()).floor() as i128 + 1;
        for v in -vmax..=vmax {
            // a u^2 + b v u + c v^2 <= m
            let disc = (bb * v) * (bb * v) - 4 * a * (c * v * v - m);
            if disc < 0 {
                continue;
            }
            let r = (disc as f64).sqrt();
            let lo = ((-(bb * v) as f64 - r) / (2 * a) as f64).floor() as i128 - 1;
            let hi = ((-(bb * v) as f64 + r) / (2 * a) as f64).ceil() as i128 + 1;
            for u in lo..=hi {
                let q = a * u * u + bb * u * v + c * v * v;
                if (0..=m).contains(&q) {
                    b[q as usize] += w;
                }
            }
        }
    }
    ThetaSeries { disc: pic.disc, chi: chi.clone(), b }
}

fn xgcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1, mut s0, mut s1, mut t0, mut t1) = (a, b, 1, 0, 0, 1);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0, s0, t0)
}

/// An equivalent form [m, b', .] with m an odd prime prime to `avoid`.
fn prime_form(f: &ClassForm, avoid: u64) -> Option<ClassForm> {
    for bound in 1..60i64 {
        for u in -bound..=bound {
            for v in -bound..=bound {
                if u.abs().max(v.abs()) != bound || xgcd(u, v).0.abs() != 1 {
                    continue;
                }
                let m = f.a * u * u + f.b * u * v + f.c * v * v;
                if m <= 2 || !is_prime(m as u64) || gcd(m as u64, avoid) != 1 {
                    continue;
                }
                // [[u, r], [v, s]] with u s - r v = 1
                let (g, x, y) = xgcd(u, v);
                let (s, r) = (x * g, -y * g);
                let b2 = 2 * f.a * u * r + f.b * (u * s + r * v) + 2 * f.c * v * s;
                return ClassForm::from_ab(m, b2, f.discriminant());
            }
        }
    }
    None
}

fn modinv(a: i64, m: i64) -> i64 {
    xgcd(a.rem_euclid(m), m).1.rem_euclid(m)
}

/// Class index in Pic(O_{c'}) of A O_{c'} for each A in Pic(O_c), c' | c.
pub fn image_map(big_d: u64, c: u64, pic_c: &PicGroup, c_prime: u64, pic_cp: &PicGroup) -> Result<Vec<usize>, LError> {
    let k = (c / c_prime) as i64;
    let d_cp = pic_cp.disc;
    pic_c
        .forms
        .iter()
        .map(|f| {
            let pf = prime_form(f, c * big_d).ok_or_else(|| LError::Domain(format!("no prime represented by {f:?}")))?;
            let m = pf.a;
            // sqrt(d_c) = k sqrt(d_c'): b' = b k^{-1} mod m, with the parity of d_c'
            let mut b = (pf.b.rem_euclid(m) * modinv(k, m)).rem_euclid(m);
            if (b - d_cp).rem_euclid(2) != 0 {
                b += m;
            }
            let g = ClassForm::from_ab(m, b, d_cp).ok_or_else(|| LError::Domain("image form is not integral".into()))?;
            pic_cp.index_of(&g).ok_or_else(|| LError::Domain("image form not found".into()))
        })
        .collect()
}

/// The primitive character below chi: its conductor c', Pic(O_{c'}) and the
/// character there.
#[derive(Clone, Debug)]
pub struct PrimitiveCharacter {
    pub c: u64,
    pub pic: PicGroup,
    pub chi: Character,
}

pub fn primitive_character(big_d: u64, c: u64, pic_c: &PicGroup, chi: &Character) -> Result<PrimitiveCharacter, LError> {
    for cp in 1..=c {
        if !c.is_multiple_of(cp) {
            continue;
        }
        if cp == c {
            return Ok(PrimitiveCharacter { c, pic: pic_c.clone(), chi: chi.clone() });
        }
        let pic = reduced_forms(-((cp * cp * big_d) as i64)).map_err(|e| LError::Domain(e.to_string()))?;
        let img = image_map(big_d, c, pic_c, cp, &pic)?;
        let mut exps: Vec<Option<u64>> = vec![None; pic.h()];
        let mut ok = true;
        for (a, &j) in img.iter().enumerate() {
            let e = chi.exps[a] % chi.modulus;
            match exps[j] {
                None => exps[j] = Some(e),
                Some(x) if x != e => ok = false,
                _ => {}
            }
        }
        if ok && exps.iter().all(|e| e.is_some()) {
            let chi = Character { modulus: chi.modulus, exps: exps.into_iter().map(|e| e.unwrap()).collect() };
            return Ok(PrimitiveCharacter { c: cp, pic, chi });
        }
    }
    unreachable!("cp = c always succeeds")
}
