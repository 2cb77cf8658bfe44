//! The ring Z[A, B], for checking division polynomials symbol by symbol.

use crate::ring::Ring;
use rug::Integer;
use std::collections::BTreeMap;

/// Sparse map from exponents (i, j) of A^i B^j to nonzero integer coefficients.
pub type Bivariate = BTreeMap<(u32, u32), Integer>;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ZAB;

impl ZAB {
    pub fn term(&self, c: i64, i: u32, j: u32) -> Bivariate {
        let mut m = BTreeMap::new();
        if c != 0 {
            m.insert((i, j), Integer::from(c));
        }
        m
    }

    pub fn a(&self) -> Bivariate {
        self.term(1, 1, 0)
    }

    pub fn b(&self) -> Bivariate {
        self.term(1, 0, 1)
    }

    /// Sum of (coefficient, i, j) terms.
    pub fn from_terms(&self, terms: &[(i64, u32, u32)]) -> Bivariate {
        terms.iter().fold(self.zero(), |acc, &(c, i, j)| self.add(&acc, &self.term(c, i, j)))
    }
}

fn clean(mut m: Bivariate) -> Bivariate {
    m.retain(|_, c| *c != 0);
    m
}

impl Ring for ZAB {
    type Elem = Bivariate;

    fn zero(&self) -> Bivariate {
        BTreeMap::new()
    }
    fn one(&self) -> Bivariate {
        self.term(1, 0, 0)
    }
    fn from_i64(&self, n: i64) -> Bivariate {
        self.term(n, 0, 0)
    }
    fn add(&self, a: &Bivariate, b: &Bivariate) -> Bivariate {
        let mut out = a.clone();
        for (k, v) in b {
            *out.entry(*k).or_default() += v;
        }
        clean(out)
    }
    fn sub(&self, a: &Bivariate, b: &Bivariate) -> Bivariate {
        let mut out = a.clone();
        for (k, v) in b {
            *out.entry(*k).or_default() -= v;
        }
        clean(out)
    }
    fn mul(&self, a: &Bivariate, b: &Bivariate) -> Bivariate {
        let mut out = BTreeMap::new();
        for ((i1, j1), c1) in a {
            for ((i2, j2), c2) in b {
                *out.entry((i1 + i2, j1 + j2)).or_insert_with(Integer::new) += Integer::from(c1 * c2);
            }
        }
        clean(out)
    }
    fn neg(&self, a: &Bivariate) -> Bivariate {
        a.iter().map(|(k, v)| (*k, Integer::from(-v))).collect()
    }
    fn is_zero(&self, a: &Bivariate) -> bool {
        a.values().all(|c| *c == 0)
    }
    fn div_exact_i64(&self, a: &Bivariate, n: i64) -> Bivariate {
        a.iter()
            .map(|(k, v)| {
                assert!(v.is_divisible(&Integer::from(n)), "inexact division by {n}");
                (*k, Integer::from(v / n))
            })
            .collect()
    }
    fn fmt_elem(&self, a: &Bivariate) -> String {
        if a.is_empty() {
            return "0".into();
        }
        let mut parts = vec![];
        for ((i, j), c) in a.iter().rev() {
            let mut mono = vec![];
            if *i > 0 {
                mono.push(if *i == 1 { "A".to_string() } else { format!("A^{i}") });
            }
            if *j > 0 {
                mono.push(if *j == 1 { "B".to_string() } else { format!("B^{j}") });
            }
            let body = mono.join("*");
            parts.push(match (body.is_empty(), c.to_i32()) {
                (true, _) => c.to_string(),
                (false, Some(1)) => body,
                (false, Some(-1)) => format!("-{body}"),
                _ => format!("{c}*{body}"),
            });
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let z = ZAB;
        let s = z.add(&z.a(), &z.b());
        let sq = z.mul(&s, &s);
        assert_eq!(sq, z.from_terms(&[(1, 2, 0), (2, 1, 1), (1, 0, 2)]));
        assert_eq!(z.fmt_elem(&z.from_terms(&[(3, 2, 0), (-1, 0, 1)])), "3*A^2 - B");
        assert!(z.is_zero(&z.sub(&sq, &sq)));
    }
}
