//! Small-integer number theory helpers.

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Primes up to n inclusive (Eratosthenes).
pub fn primes_up_to(n: usize) -> Vec<u64> {
    if n < 2 {
        return vec![];
    }
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u64).collect()
}

/// Smallest prime factor table for 0..=n (entries 0 and 1 are 0 and 1).
pub fn smallest_prime_factors(n: usize) -> Vec<u32> {
    let mut spf: Vec<u32> = (0..=n as u32).collect();
    let mut i = 2;
    while i * i <= n {
        if spf[i] == i as u32 {
            let mut j = i * i;
            while j <= n {
                if spf[j] == j as u32 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
        i += 1;
    }
    spf
}

/// Factorization by trial division as (prime, exponent) pairs.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = vec![];
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Kronecker symbol (a/n) for n > 0.
pub fn kronecker(a: i64, mut n: u64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1;
    while n.is_multiple_of(2) {
        n /= 2;
        match a.rem_euclid(8) {
            0 | 2 | 4 | 6 => return 0,
            3 | 5 => result = -result,
            _ => {}
        }
    }
    // Jacobi symbol for odd n
    let mut a = a.rem_euclid(n as i64) as u64;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        (a, n) = (n, a);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Largest e with p^e | n (n nonzero).
pub fn valuation(mut n: i64, p: u64) -> u32 {
    if n == 0 {
        return u32::MAX;
    }
    let mut e = 0;
    while n % p as i64 == 0 {
        n /= p as i64;
        e += 1;
    }
    e
}
