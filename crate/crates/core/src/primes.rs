//! Prime factorisation of group orders.
//!
//! Trial division up to 10^6, then deterministic Miller–Rabin and Pollard rho
//! for whatever is left.

const TRIAL_LIMIT: u64 = 1_000_000;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic for every 64-bit input.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd(a: u64, b: u64) -> u64 {
    crate::perm::gcd(a, b)
}

fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn factor_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

/// Prime factorisation as sorted `(prime, exponent)` pairs.
pub fn factorize(mut n: u128) -> Vec<(u64, u32)> {
    let mut primes = Vec::new();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT && (p as u128) * (p as u128) <= n {
        while n % p as u128 == 0 {
            primes.push(p);
            n /= p as u128;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        if n <= u64::MAX as u128 {
            factor_into(n as u64, &mut primes);
        } else {
            // Beyond 64 bits and free of small factors: not a group order we
            // ever meet; keep it whole rather than guess.
            primes.push(u64::MAX);
        }
    }
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for q in primes {
        match out.last_mut() {
            Some((r, e)) if *r == q => *e += 1,
            _ => out.push((q, 1)),
        }
    }
    out
}

pub fn prime_divisors(n: u128) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_factorisations() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(prime_divisors(95040), vec![2, 3, 5, 11]);
        assert_eq!(prime_divisors(1451520), vec![2, 3, 5, 7]);
        assert_eq!(factorize(1), vec![]);
    }

    #[test]
    fn large_semiprime() {
        let p = 1_000_000_007u64;
        let q = 998_244_353u64;
        assert_eq!(factorize(p as u128 * q as u128), vec![(q, 1), (p, 1)]);
        assert!(is_prime(18_446_744_073_709_551_557));
    }
}
