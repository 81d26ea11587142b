//! Factorization of `p ± 1`, divisor enumeration and the factor trie.

use crate::arith::pow_mod;

/// Deterministic Miller–Rabin for all `n < 2^64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n % q == 0 {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = (x as u128 * x as u128 % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Finds a nontrivial factor of the odd composite `n` (Brent's variant).
fn pollard_rho(n: u64) -> u64 {
    let mulmod = |a: u64, b: u64| (a as u128 * b as u128 % n as u128) as u64;
    for c in 1u64.. {
        let f = |x: u64| (mulmod(x, x) + c) % n;
        let mut y = 2u64;
        let mut r = 1u64;
        let mut q = 1u64;
        let mut g = 1u64;
        let mut x = y;
        let mut ys = y;
        const BATCH: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mulmod(q, x.abs_diff(y));
                }
                g = gcd(q, n);
                k += BATCH;
            }
            r <<= 1;
        }
        if g == n {
            g = 1;
            while g == 1 {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

const TRIAL_LIMIT: u64 = 1_000_000;

/// Prime-power decomposition `n = prod q_i^{e_i}` with ascending primes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Factors `1 <= n < 2^63`: trial division up to `10^6`, then Pollard rho.
    pub fn of(n: u64) -> Self {
        assert!(n >= 1, "cannot factor zero");
        let mut factors = Vec::new();
        let mut m = n;
        let mut push = |q: u64, m: &mut u64| {
            let mut e = 0;
            while *m % q == 0 {
                *m /= q;
                e += 1;
            }
            if e > 0 {
                factors.push((q, e));
            }
        };
        push(2, &mut m);
        let mut q = 3;
        while q <= TRIAL_LIMIT && q * q <= m {
            push(q, &mut m);
            q += 2;
        }
        if m > 1 {
            let mut rest = Vec::new();
            split(m, &mut rest);
            rest.sort_unstable();
            for q in rest {
                match factors.last_mut() {
                    Some((last, e)) if *last == q => *e += 1,
                    _ => factors.push((q, 1)),
                }
            }
        }
        Factorization { factors }
    }

    /// Builds a factorization from `(prime, exponent)` pairs. The primes are
    /// trusted; they are sorted and merged here.
    pub fn from_pairs(pairs: &[(u64, u32)]) -> Self {
        let mut factors: Vec<(u64, u32)> = Vec::new();
        let mut sorted = pairs.to_vec();
        sorted.sort_unstable();
        for (q, e) in sorted {
            if e == 0 {
                continue;
            }
            match factors.last_mut() {
                Some((last, le)) if *last == q => *le += e,
                _ => factors.push((q, e)),
            }
        }
        Factorization { factors }
    }

    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(q, _)| q)
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// `q_i^{e_i}` for each prime.
    pub fn prime_powers(&self) -> Vec<u64> {
        self.factors.iter().map(|&(q, e)| q.pow(e)).collect()
    }

    pub fn value(&self) -> u64 {
        self.factors.iter().map(|&(q, e)| q.pow(e)).product()
    }

    /// Number of divisors.
    pub fn tau(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64 + 1).product()
    }

    /// Euler's totient.
    pub fn phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(q, e)| q.pow(e - 1) * (q - 1))
            .product()
    }

    /// All divisors in ascending order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut ds = vec![1u64];
        for &(q, e) in &self.factors {
            let len = ds.len();
            let mut qk = 1;
            for _ in 0..e {
                qk *= q;
                for i in 0..len {
                    ds.push(ds[i] * qk);
                }
            }
        }
        ds.sort_unstable();
        ds
    }

    /// Exponent of each prime in `d`, which must divide the factored value.
    pub fn exponents_of(&self, mut d: u64) -> Vec<u32> {
        self.factors
            .iter()
            .map(|&(q, _)| {
                let mut e = 0;
                while d % q == 0 {
                    d /= q;
                    e += 1;
                }
                e
            })
            .collect()
    }

    /// The divisors `d <= x` not properly dividing any other divisor `<= x`.
    ///
    /// `d` is maximal exactly when `d * q > x` for every prime `q` with
    /// `d * q` still a divisor, so one pass over the divisors suffices.
    pub fn maximal_divisors(&self, x: u64) -> Vec<u64> {
        let n = self.value();
        self.divisors()
            .into_iter()
            .take_while(|&d| d <= x)
            .filter(|&d| {
                self.factors.iter().all(|&(q, _)| {
                    (n / d) % q != 0 || d.checked_mul(q).map_or(true, |dq| dq > x)
                })
            })
            .collect()
    }

    /// Renders as `2^2*3*7`; the empty product renders as `1`.
    pub fn render(&self) -> String {
        if self.factors.is_empty() {
            return "1".to_string();
        }
        self.factors
            .iter()
            .map(|&(q, e)| if e == 1 { q.to_string() } else { format!("{q}^{e}") })
            .collect::<Vec<_>>()
            .join("*")
    }
}

fn split(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    split(d, out);
    split(n / d, out);
}

/// Primes in `[lo, hi)` by a segmented sieve of Eratosthenes.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    if hi <= lo.max(2) {
        return Vec::new();
    }
    let lo = lo.max(2);
    let root = (hi as f64).sqrt() as u64 + 1;
    let mut small = vec![true; root as usize + 1];
    let mut base = Vec::new();
    for i in 2..=root as usize {
        if small[i] {
            base.push(i as u64);
            for j in (i * i..=root as usize).step_by(i) {
                small[j] = false;
            }
        }
    }
    const SEGMENT: u64 = 1 << 18;
    let mut out = Vec::new();
    let mut start = lo;
    while start < hi {
        let end = (start + SEGMENT).min(hi);
        let mut mark = vec![true; (end - start) as usize];
        for &q in &base {
            if q * q >= end {
                break;
            }
            let first = (start.div_ceil(q) * q).max(q * q);
            for j in (first..end).step_by(q as usize) {
                mark[(j - start) as usize] = false;
            }
        }
        out.extend(
            mark.iter()
                .enumerate()
                .filter(|&(_, &m)| m)
                .map(|(i, _)| start + i as u64),
        );
        start = end;
    }
    out
}

/// Shorthand for [`Factorization::of`].
pub fn factorize(n: u64) -> Factorization {
    Factorization::of(n)
}

/// A node of a [`FactorTrie`]: the divisor `d`, its exponent vector, the index
/// of the last prime in its word, and its children keyed by prime index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrieNode {
    pub divisor: u64,
    pub exponents: Vec<u32>,
    /// Index of the last prime in `w(d)`; `None` for the root `w(1)`.
    pub last: Option<usize>,
    /// `(prime index, node id)` with ascending prime index.
    pub children: Vec<(usize, usize)>,
}

/// The trie of divisor words `w(d)`: the word lists each prime of `d` with
/// multiplicity in ascending order, and `l -> m` is an edge when `w(m)`
/// extends `w(l)` by one letter.
#[derive(Debug, Clone)]
pub struct FactorTrie {
    factorization: Factorization,
    nodes: Vec<TrieNode>,
}

impl FactorTrie {
    pub const ROOT: usize = 0;

    pub fn new(factorization: &Factorization) -> Self {
        let pairs = factorization.pairs();
        let mut nodes = vec![TrieNode {
            divisor: 1,
            exponents: vec![0; pairs.len()],
            last: None,
            children: Vec::new(),
        }];
        let mut stack = vec![FactorTrie::ROOT];
        while let Some(id) = stack.pop() {
            let first = nodes[id].last.unwrap_or(0);
            let mut children = Vec::new();
            for (i, &(q, t)) in pairs.iter().enumerate().skip(first) {
                if nodes[id].exponents[i] < t {
                    let mut exponents = nodes[id].exponents.clone();
                    exponents[i] += 1;
                    let child = nodes.len();
                    nodes.push(TrieNode {
                        divisor: nodes[id].divisor * q,
                        exponents,
                        last: Some(i),
                        children: Vec::new(),
                    });
                    children.push((i, child));
                    stack.push(child);
                }
            }
            nodes[id].children = children;
        }
        FactorTrie {
            factorization: factorization.clone(),
            nodes,
        }
    }

    pub fn factorization(&self) -> &Factorization {
        &self.factorization
    }

    pub fn nodes(&self) -> &[TrieNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &TrieNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The child reached by appending prime index `i`, if any.
    pub fn child(&self, id: usize, i: usize) -> Option<usize> {
        self.nodes[id]
            .children
            .iter()
            .find(|&&(j, _)| j == i)
            .map(|&(_, c)| c)
    }

    /// The word `w(d)` of a node as a list of primes.
    pub fn word(&self, id: usize) -> Vec<u64> {
        let node = &self.nodes[id];
        self.factorization
            .pairs()
            .iter()
            .zip(&node.exponents)
            .flat_map(|(&(q, _), &e)| std::iter::repeat(q).take(e as usize))
            .collect()
    }
}
