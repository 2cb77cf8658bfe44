//! Is P in n E(K[c])? The x-coordinates of the n-th parts of P are the roots of
//! g(x) = phi_n(x) - X(P) psi_n(x)^2. A rootless reduction of g at a degree-1 place
//! proves non-divisibility; a divisibility verdict needs an exact global root.

use crate::operator::DerivedPoint;
use crate::KolyError;
use ecarith::numth::{is_prime, kronecker};
use ecarith::ring::{Field, PrimeField, Rationals, Ring};
use ecarith::{division_polys, Point, Poly, PolyRing};
use mpkernel::lll::{lll_reduce, IntLattice};
use rayon::prelude::*;
use ringclass::{QuadElem, RcfElem, RingClassField};
use rug::ops::{Pow, RemRounding};
use rug::{Integer, Rational};
use sha2::{Digest, Sha256};

/// A degree-1 place of K[c] over q: sqrt(-D) -> s and alpha -> r in F_q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Place {
    pub q: u64,
    pub s: u64,
    pub r: u64,
}

/// Number of roots of g mod the place, i.e. deg gcd(x^q - x, g).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Probe {
    pub place: Place,
    pub roots: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    NonDivisible { witness: Place, g_mod: Vec<u64>, transcript: Vec<Probe> },
    /// n Q = P exactly on the short model.
    Divisible { quotient: Point<RcfElem>, transcript: Vec<Probe> },
    Inconclusive { reason: String, transcript: Vec<Probe> },
}

impl Verdict {
    pub fn transcript(&self) -> &[Probe] {
        match self {
            Verdict::NonDivisible { transcript, .. } | Verdict::Divisible { transcript, .. } | Verdict::Inconclusive { transcript, .. } => transcript,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::NonDivisible { .. } => "non-divisible",
            Verdict::Divisible { .. } => "divisible",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

#[derive(Clone, Debug)]
pub struct DivisibilityOptions {
    pub place_budget: usize,
    /// Largest q-adic precision tried by the reconstruction, in bits.
    pub max_lift_bits: u32,
    /// How many places the reconstruction lifts from.
    pub lift_places: usize,
}

impl Default for DivisibilityOptions {
    fn default() -> Self {
        DivisibilityOptions { place_budget: 64, max_lift_bits: 4096, lift_places: 4 }
    }
}

/// Everything needed to form g and reduce it; built from exact data only, so
/// certificate replay goes through the same code.
#[derive(Clone, Debug)]
pub struct DivisionProblem {
    pub field: RingClassField,
    pub a: Rational,
    pub b: Rational,
    pub x: RcfElem,
    pub n: u64,
    pub phi: Poly<Rational>,
    pub psi_sq: Poly<Rational>,
    pub psi: Poly<Rational>,
    pub omega: Poly<Rational>,
    /// g over K[c], monic of degree n^2.
    pub g: Vec<RcfElem>,
}

impl DivisionProblem {
    /// n must be odd so that psi_n and omega_n / y are polynomials in x.
    pub fn new(field: &RingClassField, a: &Rational, b: &Rational, x: &RcfElem, n: u64) -> Result<Self, KolyError> {
        if n.is_multiple_of(2) || n == 0 {
            return Err(KolyError::BadP(n));
        }
        let ring = PolyRing::new(Rationals);
        let d = division_polys(&ring, a, b, n as i64).map_err(|e| KolyError::Unsupported(e.to_string()))?;
        let len = d.phi.len();
        let mut g = Vec::with_capacity(len);
        let zero = Rational::new();
        for i in 0..len {
            let ph = field.from_rational(&d.phi[i])?;
            let ps = field.from_rational(d.psi_sq.get(i).unwrap_or(&zero))?;
            g.push(field.sub(&ph, &field.mul(x, &ps)));
        }
        Ok(DivisionProblem {
            field: field.clone(),
            a: a.clone(),
            b: b.clone(),
            x: x.clone(),
            n,
            phi: d.phi,
            psi_sq: d.psi_sq,
            psi: d.psi,
            omega: d.omega,
            g,
        })
    }

    pub fn from_point(dp: &DerivedPoint, n: u64) -> Result<Self, KolyError> {
        let Point::Affine(x, _) = &dp.short else {
            return Err(KolyError::Unsupported("P is the point at infinity".into()));
        };
        Self::new(&dp.field, &dp.model.a, &dp.model.b, x, n)
    }

    /// SHA-256 of the coefficients of g, one `format_elem` per line from degree 0 up.
    pub fn g_hash(&self) -> String {
        let mut h = Sha256::new();
        for c in &self.g {
            h.update(self.field.format_elem(c).as_bytes());
            h.update(b"\n");
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Primes dividing some denominator of the data, and hence excluded.
    fn denominators(&self) -> Integer {
        let mut den = Integer::from(self.a.denom() * self.b.denom());
        let mut take = |q: &QuadElem| {
            den *= q.u.denom();
            den *= q.v.denom();
        };
        self.field.f.iter().for_each(&mut take);
        self.x.iter().for_each(&mut take);
        den
    }

    /// One degree-1 place per prime of K above q, for q prime to 2 n D and the
    /// denominators with F squarefree mod the prime; sorted by (q, s).
    pub fn places(&self, budget: usize) -> Vec<Place> {
        let big_d = self.field.base.big_d;
        let den = self.denominators();
        let mut out = vec![];
        let mut q = 3u64;
        while out.len() < budget && q < 1 << 20 {
            q += 2;
            if !is_prime(q) || self.n.is_multiple_of(q) || big_d.is_multiple_of(q) || den.is_divisible_u(q as u32) {
                continue;
            }
            if kronecker(-(big_d as i64), q) != 1 {
                continue;
            }
            let fq = PrimeField::new(q);
            let s0 = fq.sqrt(fq.neg(&fq.from_i64(big_d as i64))).expect("split prime");
            let mut ss = vec![s0, q - s0];
            ss.sort();
            for s in ss {
                let Some(fl) = reduce_k_poly(&self.field.f, q, s) else { continue };
                let ring = PolyRing::new(fq);
                let g = ring.gcd(&fl, &ring.derivative(&fl)).unwrap();
                if ring.degree(&g) != Some(0) {
                    continue;
                }
                // places over one prime of K are Galois conjugate and P_c is invariant
                // mod p E(K[c]), so they all give the same verdict; keep the first
                if let Some(r) = (0..q).find(|r| ring.eval(&fl, r) == 0) {
                    out.push(Place { q, s, r });
                }
            }
        }
        out.truncate(budget);
        out
    }

    /// g reduced at the place, low degree first.
    pub fn reduce_g(&self, pl: &Place) -> Option<Vec<u64>> {
        let fq = PrimeField::new(pl.q);
        let xl = reduce_elem(&self.x, pl)?;
        let zero = Rational::new();
        (0..self.phi.len())
            .map(|i| {
                let ph = fq.reduce_rational(&self.phi[i]).ok()?;
                let ps = fq.reduce_rational(self.psi_sq.get(i).unwrap_or(&zero)).ok()?;
                Some(fq.sub(&ph, &fq.mul(&xl, &ps)))
            })
            .collect()
    }

    pub fn probe(&self, pl: &Place) -> Option<Probe> {
        let g = self.reduce_g(pl)?;
        Some(Probe { place: *pl, roots: count_roots(&g, pl.q) })
    }

    /// Checks that the place is a degree-1 place of K[c] for the stored data.
    pub fn place_is_valid(&self, pl: &Place) -> bool {
        let q = pl.q;
        if !is_prime(q) || q < 5 || self.denominators().is_divisible_u(q as u32) {
            return false;
        }
        let fq = PrimeField::new(q);
        if fq.add(&fq.mul(&pl.s, &pl.s), &fq.from_i64(self.field.base.big_d as i64)) != 0 {
            return false;
        }
        match reduce_k_poly(&self.field.f, q, pl.s) {
            Some(fl) => PolyRing::new(fq).eval(&fl, &pl.r) == 0,
            None => false,
        }
    }

    /// x0 in K[c] with g(x0) = 0, found by lifting a simple root at a few places and
    /// reducing a lattice; verified exactly.
    fn reconstruct(&self, transcript: &[Probe], opts: &DivisibilityOptions) -> Option<RcfElem> {
        let mut with_roots: Vec<&Probe> = transcript.iter().filter(|p| p.roots > 0).collect();
        with_roots.sort_by_key(|p| (p.roots, p.place));
        let mut starts = vec![];
        for p in with_roots {
            if starts.len() >= opts.lift_places {
                break;
            }
            let g = self.reduce_g(&p.place)?;
            let roots = simple_roots(&g, p.place.q);
            if !roots.is_empty() {
                starts.push((p.place, roots));
            }
        }
        let mut bits = 64u32;
        while bits <= opts.max_lift_bits {
            for (pl, roots) in &starts {
                for &t in roots {
                    if let Some(x0) = self.lattice_candidate(pl, t, bits) {
                        return Some(x0);
                    }
                }
            }
            bits *= 2;
        }
        None
    }

    fn lattice_candidate(&self, pl: &Place, t: u64, bits: u32) -> Option<RcfElem> {
        let q = Integer::from(pl.q);
        let k = (bits as f64 / (pl.q as f64).log2()).ceil() as u32;
        let m = q.pow(k);
        let big_d = Integer::from(self.field.base.big_d);
        // sqrt(-D), alpha and the root, all mod q^k
        let sk = hensel(&[big_d, Integer::new(), Integer::from(1)], pl.s, &m)?;
        let fk: Vec<Integer> = self.field.f.iter().map(|c| red_quad(c, &sk, &m)).collect::<Option<_>>()?;
        let rk = hensel(&fk, pl.r, &m)?;
        let xk = eval_mod(&self.x.iter().map(|c| red_quad(c, &sk, &m)).collect::<Option<Vec<_>>>()?, &rk, &m);
        let zero = Rational::new();
        let gk: Vec<Integer> = (0..self.phi.len())
            .map(|i| {
                let ph = red_rat(&self.phi[i], &m)?;
                let ps = red_rat(self.psi_sq.get(i).unwrap_or(&zero), &m)?;
                Some((ph - xk.clone() * ps).rem_euc(&m))
            })
            .collect::<Option<_>>()?;
        let tk = hensel(&gk, t, &m)?;

        // unknowns U_0..U_{h-1}, V_0..V_{h-1}, d with sum (U_i + V_i s) r^i = d t mod q^k
        let h = self.field.degree();
        let dim = 2 * h + 1;
        let mut coef = Vec::with_capacity(dim);
        let mut rp = Integer::from(1);
        for _ in 0..h {
            coef.push(rp.clone());
            rp = (rp * &rk).rem_euc(&m);
        }
        for i in 0..h {
            let c = Integer::from(&coef[i] * &sk).rem_euc(&m);
            coef.push(c);
        }
        coef.push(Integer::from(-&tk).rem_euc(&m));
        let weight = m.clone();
        let mut rows = Vec::with_capacity(dim + 1);
        for (j, c) in coef.iter().enumerate() {
            let mut row = vec![Integer::new(); dim + 1];
            row[j] = Integer::from(1);
            row[dim] = Integer::from(c * &weight);
            rows.push(row);
        }
        let mut last = vec![Integer::new(); dim + 1];
        last[dim] = Integer::from(&m * &weight);
        rows.push(last);
        let red = lll_reduce(&IntLattice::new(rows).ok()?, &Rational::from((99, 100))).ok()?;
        for v in red.basis.iter().take(3) {
            if v[dim] != 0 || v[dim - 1] == 0 {
                continue;
            }
            let d = &v[dim - 1];
            let elem: Vec<QuadElem> = (0..h).map(|i| QuadElem::new(Rational::from((v[i].clone(), d.clone())), Rational::from((v[h + i].clone(), d.clone())))).collect();
            let x0 = self.field.reduce(self.field.poly_ring().normalize(elem));
            if self.field.is_zero(&self.eval_g(&x0)) {
                return Some(x0);
            }
        }
        None
    }

    pub fn eval_g(&self, x0: &RcfElem) -> RcfElem {
        let l = &self.field;
        self.g.iter().rev().fold(l.zero(), |acc, c| l.add(&l.mul(&acc, x0), c))
    }

    fn eval_rat(&self, p: &Poly<Rational>, x0: &RcfElem) -> RcfElem {
        let l = &self.field;
        p.iter().rev().fold(l.zero(), |acc, c| l.add(&l.mul(&acc, x0), &l.from_rational(c).unwrap()))
    }

    /// The point Q = (x0, y0) with n Q = P; y0 = y(P) psi_n(x0)^3 / W_n(x0).
    fn quotient(&self, x0: &RcfElem, yp: &RcfElem) -> Option<Point<RcfElem>> {
        let l = &self.field;
        let ps = self.eval_rat(&self.psi, x0);
        let w = self.eval_rat(&self.omega, x0);
        let y0 = l.div(&l.mul(yp, &l.mul(&ps, &l.mul(&ps, &ps))), &w).ok()?;
        Some(Point::Affine(x0.clone(), y0))
    }
}

fn reduce_elem(x: &RcfElem, pl: &Place) -> Option<u64> {
    let fq = PrimeField::new(pl.q);
    let c = reduce_k_poly(x, pl.q, pl.s)?;
    Some(PolyRing::new(fq).eval(&c, &pl.r))
}

/// Coefficientwise u + v s mod q; None if a denominator vanishes.
pub fn reduce_k_poly(f: &[QuadElem], q: u64, s: u64) -> Option<Poly<u64>> {
    let fq = PrimeField::new(q);
    let c: Option<Vec<u64>> = f
        .iter()
        .map(|c| {
            let u = fq.reduce_rational(&c.u).ok()?;
            let v = fq.reduce_rational(&c.v).ok()?;
            Some(fq.add(&u, &fq.mul(&v, &s)))
        })
        .collect();
    Some(PolyRing::new(fq).normalize(c?))
}

/// deg gcd(x^q - x, g) over F_q.
pub fn count_roots(g: &[u64], q: u64) -> usize {
    let ring = PolyRing::new(PrimeField::new(q));
    let g = ring.normalize(g.to_vec());
    if ring.degree(&g).unwrap_or(0) == 0 {
        return 0;
    }
    let xq = ring.powmod(&ring.x(), &Integer::from(q), &g).unwrap();
    let h = ring.sub(&xq, &ring.x());
    let d = ring.gcd(&g, &h).unwrap();
    ring.degree(&d).unwrap_or(0)
}

/// Roots t in F_q with g(t) = 0 and g'(t) != 0.
fn simple_roots(g: &[u64], q: u64) -> Vec<u64> {
    let ring = PolyRing::new(PrimeField::new(q));
    let g = ring.normalize(g.to_vec());
    let dg = ring.derivative(&g);
    (0..q).filter(|t| ring.eval(&g, t) == 0 && ring.eval(&dg, t) != 0).collect()
}

fn red_rat(x: &Rational, m: &Integer) -> Option<Integer> {
    let inv = x.denom().clone().invert(m).ok()?;
    Some((x.numer().clone() * inv).rem_euc(m))
}

fn red_quad(c: &QuadElem, s: &Integer, m: &Integer) -> Option<Integer> {
    Some((red_rat(&c.u, m)? + red_rat(&c.v, m)? * s).rem_euc(m))
}

fn eval_mod(f: &[Integer], x: &Integer, m: &Integer) -> Integer {
    f.iter().rev().fold(Integer::new(), |acc, c| (acc * x + c).rem_euc(m))
}

/// Newton lift of a simple root mod q to a root mod m = q^k.
fn hensel(f: &[Integer], x0: u64, m: &Integer) -> Option<Integer> {
    let df: Vec<Integer> = f.iter().enumerate().skip(1).map(|(i, c)| Integer::from(c * i as u32)).collect();
    let mut x = Integer::from(x0);
    for _ in 0..64 {
        let v = eval_mod(f, &x, m);
        if v == 0 {
            return Some(x);
        }
        let d = eval_mod(&df, &x, m).invert(m).ok()?;
        x = (x - v * d).rem_euc(m);
    }
    None
}

/// Probes the first `budget` places; a rootless one certifies P not in n E(K[c]).
/// With roots everywhere, an exact global root gives the divisibility witness.
pub fn divisible_by_p(dp: &DerivedPoint, p: u64, m: u32, opts: &DivisibilityOptions) -> Result<Verdict, KolyError> {
    if p.is_multiple_of(2) || p < 3 {
        return Err(KolyError::BadP(p));
    }
    let n = p.pow(m);
    let prob = DivisionProblem::from_point(dp, n)?;
    let places = prob.places(opts.place_budget);
    let transcript: Vec<Probe> = places.par_iter().filter_map(|pl| prob.probe(pl)).collect();
    if let Some(w) = transcript.iter().find(|p| p.roots == 0) {
        let g_mod = prob.reduce_g(&w.place).expect("probed place reduces");
        return Ok(Verdict::NonDivisible { witness: w.place, g_mod, transcript });
    }
    if transcript.len() < opts.place_budget {
        return Ok(Verdict::Inconclusive { reason: format!("only {} usable places found", transcript.len()), transcript });
    }
    let Point::Affine(_, yp) = &dp.short else { unreachable!() };
    let curve = dp.short_curve();
    if let Some(x0) = prob.reconstruct(&transcript, opts) {
        if let Some(qpt) = prob.quotient(&x0, yp) {
            if curve.on_curve(&qpt) && curve.mul_i64(n as i64, &qpt)? == dp.short {
                return Ok(Verdict::Divisible { quotient: qpt, transcript });
            }
        }
    }
    Ok(Verdict::Inconclusive { reason: "roots at every probed place but no global root reconstructed".into(), transcript })
}
