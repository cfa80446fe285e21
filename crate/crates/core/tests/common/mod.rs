//! Independent reference implementations used to check the library.
#![allow(dead_code)]

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, Zero};

// i128 arithmetic panics on overflow in test builds, so a silent wrong
// answer is not possible
type Q = Ratio<i128>;

fn q(x: i64) -> Q {
    Q::from_integer(x as i128)
}

fn matmul(x: &[Vec<Q>], y: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let n = x.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(Q::zero(), |acc, k| acc + x[i][k] * y[k][j]))
                .collect()
        })
        .collect()
}

/// Matrix of multiplication by `alpha` on the power basis of Q[t]/(t^n - a).
fn companion(n: usize, a: i64) -> Vec<Vec<Q>> {
    let mut m = vec![vec![Q::zero(); n]; n];
    for i in 0..n - 1 {
        m[i + 1][i] = Q::one();
    }
    m[0][n - 1] = q(a);
    m
}

/// Characteristic polynomial coefficients (Faddeev-LeVerrier), leading 1 omitted.
fn char_poly(m: &[Vec<Q>]) -> Vec<Q> {
    let n = m.len();
    let ident = |c: &Q| -> Vec<Vec<Q>> {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { *c } else { Q::zero() }).collect())
            .collect()
    };
    let mut coeffs = Vec::new();
    let mut mk = ident(&Q::one());
    for k in 1..=n {
        let am = matmul(m, &mk);
        let tr = (0..n).fold(Q::zero(), |acc, i| acc + am[i][i]);
        let c = -tr / q(k as i64);
        mk = am;
        for (i, row) in mk.iter_mut().enumerate() {
            row[i] += c;
        }
        coeffs.push(c);
    }
    coeffs
}

/// Is the element with power-basis coordinates `c` integral over Z?
fn is_integral(c: &[Q], alpha: &[Vec<Q>], a: i64) -> bool {
    let n = c.len();
    // Tr(y) = n c_0 and Tr(y alpha^(n-k)) = n a c_k must be integers
    let nq = q(n as i64);
    if !(nq * c[0]).is_integer() || c[1..].iter().any(|ck| !(nq * q(a) * ck).is_integer()) {
        return false;
    }
    let mut acc = vec![vec![Q::zero(); n]; n];
    let mut pow = companion_identity(n);
    for ci in c {
        for i in 0..n {
            for j in 0..n {
                acc[i][j] += ci * pow[i][j];
            }
        }
        pow = matmul(alpha, &pow);
    }
    char_poly(&acc).iter().all(|x| x.is_integer())
}

fn companion_identity(n: usize) -> Vec<Vec<Q>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect()
}

fn inv_mod(k: u64, p: u64) -> u64 {
    (1..p).find(|u| u * k % p == 1).expect("unit mod p")
}

/// `v_p([O_K : Z[alpha]])` for `alpha^n = a`, by brute force: repeatedly
/// adjoin an integral element of `(1/p)O \ O` until none is left.
pub fn index_exponent_brute(n: usize, a: i64, p: u64) -> u32 {
    let alpha = companion(n, a);
    let mut basis: Vec<Vec<Q>> = companion_identity(n);
    let mut steps = 0;
    'grow: loop {
        let total = (p as usize).pow(n as u32);
        for code in 1..total {
            let mut k = Vec::with_capacity(n);
            let mut c = code;
            for _ in 0..n {
                k.push((c % p as usize) as u64);
                c /= p as usize;
            }
            let y: Vec<Q> = (0..n)
                .map(|j| {
                    (0..n).fold(Q::zero(), |acc, i| acc + q(k[i] as i64) * basis[i][j]) / q(p as i64)
                })
                .collect();
            if !is_integral(&y, &alpha, a) {
                continue;
            }
            // normalize so one coefficient is 1, then swap it into the basis
            let i = (0..n).find(|&i| k[i] != 0).unwrap();
            let u = inv_mod(k[i], p);
            let y: Vec<Q> = (0..n)
                .map(|j| {
                    (0..n).fold(Q::zero(), |acc, l| acc + q((u * k[l] % p) as i64) * basis[l][j])
                        / q(p as i64)
                })
                .collect();
            basis[i] = y;
            steps += 1;
            continue 'grow;
        }
        return steps;
    }
}

fn vp(mut m: u64, p: u64) -> u32 {
    let mut v = 0;
    while m % p == 0 {
        m /= p;
        v += 1;
    }
    v
}

/// `|disc(Q[t]/(t^n - a))|` from `|disc(t^n - a)| = n^n |a|^(n-1)` and
/// the local indices. `a` must be n-th-power free. Eisenstein primes
/// (`v_p(a) = 1`) contribute no index; every other prime is brute forced.
pub fn disc_oracle(n: usize, a: i64) -> u128 {
    assert!(a != 0);
    let abs = a.unsigned_abs();
    let primes: Vec<u64> = (2..=abs.max(n as u64))
        .filter(|&p| is_prime(p) && (abs % p == 0 || n as u64 % p == 0))
        .collect();
    let mut d: u128 = 1;
    for p in primes {
        let poly_v = n as u32 * vp(n as u64, p) + (n as u32 - 1) * vp(abs, p);
        let idx = if vp(abs, p) == 1 { 0 } else { index_exponent_brute(n, a, p) };
        d *= (p as u128).pow(poly_v - 2 * idx);
    }
    d
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Does `t^n - a` factor over Q? Tries every proper subset of the complex
/// roots and tests whether the partial product has integer coefficients.
pub fn reducible_numeric(n: usize, a: i64) -> bool {
    let r = (a.unsigned_abs() as f64).powf(1.0 / n as f64);
    let theta = if a < 0 { std::f64::consts::PI } else { 0.0 };
    let roots: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r, (theta + 2.0 * std::f64::consts::PI * k as f64) / n as f64))
        .collect();
    for mask in 1u32..(1 << n) - 1 {
        // only subsets containing root 0 need checking (complements cover the rest)
        if mask & 1 == 0 {
            continue;
        }
        let mut poly = vec![Complex64::new(1.0, 0.0)];
        for (k, root) in roots.iter().enumerate() {
            if mask >> k & 1 == 1 {
                let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
                for (i, c) in poly.iter().enumerate() {
                    next[i + 1] += c;
                    next[i] -= c * root;
                }
                poly = next;
            }
        }
        if poly.iter().all(|c| c.im.abs() < 1e-6 && (c.re - c.re.round()).abs() < 1e-6) {
            return true;
        }
    }
    false
}

/// Canonical n-th-power-free integers `a` with `|a| <= bound`, by trial
/// division.
pub fn power_free_scan(n: u32, bound: i64) -> Vec<i64> {
    let mut out = Vec::new();
    for m in 1..=bound {
        let mut x = m;
        let mut ok = true;
        let mut d = 2;
        while d * d <= x {
            let mut e = 0;
            while x % d == 0 {
                x /= d;
                e += 1;
            }
            if e >= n {
                ok = false;
                break;
            }
            d += 1;
        }
        if ok {
            out.push(m);
            // for odd n, -1 is an n-th power and -m lies in the class of m
            if n % 2 == 0 {
                out.push(-m);
            }
        }
    }
    out
}
