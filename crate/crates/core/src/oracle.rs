//! Brute-force ground truth for small primes.
//!
//! Everything here enumerates the whole surface: all triples, the Vieta
//! graph with union-find, rotation orbits and the bad sets straight from
//! their definitions. It uses plain `u64` arithmetic with a square-root
//! table and shares nothing with the sieve except [`MarkoffTriple`], so it
//! can serve as an independent check.

use thiserror::Error;

use crate::sieve::{Config, MarkoffTriple, PrimeContext, SieveError};

/// Largest prime the graph enumeration accepts.
pub const MAX_GRAPH_PRIME: u64 = 10_000;
/// Largest prime the bad-set enumeration accepts.
pub const MAX_BAD_SET_PRIME: u64 = 2_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("p = {p} exceeds the brute-force limit {limit}")]
    TooLarge { p: u64, limit: u64 },
    #[error("{0} is not a prime greater than 3")]
    NotPrime(u64),
    #[error("no Markoff triple has coordinate {0}")]
    NoSuchCoordinate(u64),
    #[error(transparent)]
    Sieve(#[from] SieveError),
}

fn naive_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Arithmetic mod a small prime with a table of square roots.
struct Small {
    p: u64,
    // Lemire's constant for division-free reduction of values below 2^32
    m: u64,
    // root[x] = some s with s^2 = x, or u32::MAX
    root: Vec<u32>,
}

impl Small {
    fn new(p: u64, limit: u64) -> Result<Self, OracleError> {
        if p > limit {
            return Err(OracleError::TooLarge { p, limit });
        }
        if p <= 3 || !naive_prime(p) {
            return Err(OracleError::NotPrime(p));
        }
        let mut root = vec![u32::MAX; p as usize];
        for s in 0..p {
            root[(s * s % p) as usize] = s as u32;
        }
        Ok(Small {
            p,
            m: (u64::MAX / p).wrapping_add(1),
            root,
        })
    }

    #[inline]
    fn reduce(&self, x: u64) -> u64 {
        debug_assert!(x < 1 << 32);
        ((self.m.wrapping_mul(x) as u128 * self.p as u128) >> 64) as u64
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a * b)
    }

    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    fn half(&self, x: u64) -> u64 {
        if x % 2 == 0 {
            x / 2
        } else {
            (x + self.p) / 2
        }
    }

    /// The roots `c` of `c^2 - abc + a^2 + b^2`, ascending and distinct.
    #[inline]
    fn third(&self, a: u64, b: u64) -> ([u64; 2], usize) {
        let p = self.p;
        let ab = self.mul(a, b);
        let disc = self.sub(self.mul(ab, ab), self.reduce(4 * (a * a + b * b)));
        let s = self.root[disc as usize];
        if s == u32::MAX {
            return ([0, 0], 0);
        }
        let s = s as u64;
        let c1 = self.half(if ab + s >= p { ab + s - p } else { ab + s });
        let c2 = self.half(self.sub(ab, s));
        if c1 == c2 {
            ([c1, c1], 1)
        } else {
            ([c1.min(c2), c1.max(c2)], 2)
        }
    }

    fn rot1(&self, t: MarkoffTriple) -> MarkoffTriple {
        MarkoffTriple::new(t.a, t.c, self.sub(self.mul(t.a, t.c), t.b))
    }
}

/// All solutions of `x^2 + y^2 + z^2 = xyz` mod `p`, in lexicographic order.
pub fn enumerate_triples(p: u64, include_zero: bool) -> Result<Vec<MarkoffTriple>, OracleError> {
    let s = Small::new(p, MAX_GRAPH_PRIME)?;
    let mut out = Vec::new();
    for a in 0..p {
        for b in 0..p {
            let (cs, n) = s.third(a, b);
            for &c in &cs[..n] {
                if include_zero || (a, b, c) != (0, 0, 0) {
                    out.push(MarkoffTriple::new(a, b, c));
                }
            }
        }
    }
    Ok(out)
}

/// Union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let gp = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = gp;
            x = gp;
        }
        x
    }

    pub fn union(&mut self, a: u32, b: u32) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a as usize] < self.size[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
    }
}

/// The graph on nonzero triples with the three Vieta involutions as edges.
///
/// The involution in the third coordinate only swaps the two roots `c` of
/// a pair `(a, b)`, so both triples over a pair share one union-find node
/// with index `a p + b`, weighted by its number of triples.
pub struct MarkoffGraph {
    p: u64,
    weight: Vec<u8>,
    uf: UnionFind,
    vertices: u64,
}

impl MarkoffGraph {
    pub fn new(p: u64) -> Result<Self, OracleError> {
        let s = Small::new(p, MAX_GRAPH_PRIME)?;
        let mut weight = vec![0u8; (p * p) as usize];
        let mut uf = UnionFind::new(weight.len());
        let mut vertices = 0;
        for a in 0..p {
            for b in 0..p {
                let (cs, n) = s.third(a, b);
                let v = (a * p + b) as u32;
                for &c in &cs[..n] {
                    if (a, b, c) == (0, 0, 0) {
                        continue;
                    }
                    weight[v as usize] += 1;
                    let a2 = s.sub(s.mul(b, c), a);
                    let b2 = s.sub(s.mul(a, c), b);
                    uf.union(v, (a2 * p + b) as u32);
                    uf.union(v, (a * p + b2) as u32);
                }
                vertices += weight[v as usize] as u64;
            }
        }
        Ok(MarkoffGraph {
            p,
            weight,
            uf,
            vertices,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn vertex_count(&self) -> u64 {
        self.vertices
    }

    /// Component sizes in triples, largest first.
    pub fn component_sizes(&mut self) -> Vec<u64> {
        let mut counts = std::collections::HashMap::new();
        for v in 0..self.weight.len() {
            if self.weight[v] > 0 {
                *counts.entry(self.uf.find(v as u32)).or_insert(0u64) += self.weight[v] as u64;
            }
        }
        let mut sizes: Vec<u64> = counts.into_values().collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    /// Representative of the component of `t`.
    pub fn root_of(&mut self, t: MarkoffTriple) -> u32 {
        self.uf.find((t.a * self.p + t.b) as u32)
    }
}

/// Sizes of the connected components of the nonzero Markoff graph mod `p`.
pub fn connected_components(p: u64) -> Result<Vec<u64>, OracleError> {
    Ok(MarkoffGraph::new(p)?.component_sizes())
}

/// Length of the `rot_1` orbit through some triple with first coordinate `a`.
pub fn orbit_length(a: u64, p: u64) -> Result<u64, OracleError> {
    let s = Small::new(p, MAX_GRAPH_PRIME)?;
    let a = a % p;
    let start = (0..p)
        .find_map(|b| {
            let (cs, n) = s.third(a, b);
            cs[..n]
                .iter()
                .map(|&c| MarkoffTriple::new(a, b, c))
                .find(|&t| t != MarkoffTriple::new(0, 0, 0))
        })
        .ok_or(OracleError::NoSuchCoordinate(a))?;
    Ok(orbit_of(&s, start).len() as u64)
}

fn orbit_of(s: &Small, start: MarkoffTriple) -> Vec<MarkoffTriple> {
    let mut orbit = vec![start];
    let mut t = s.rot1(start);
    while t != start {
        orbit.push(t);
        t = s.rot1(t);
    }
    orbit
}

/// Whether each residue occurs as a coordinate of some nonzero triple.
pub fn coordinate_values(p: u64) -> Result<Vec<bool>, OracleError> {
    let s = Small::new(p, MAX_GRAPH_PRIME)?;
    let mut seen = vec![false; p as usize];
    for a in 0..p {
        for b in 0..p {
            let (cs, n) = s.third(a, b);
            if cs[..n].iter().any(|&c| (a, b, c) != (0, 0, 0)) {
                seen[a as usize] = true;
                break;
            }
        }
    }
    Ok(seen)
}

/// Order of the rotation matrix `[[0, 1], [-1, a]]`, which equals the
/// orbit length of every nonzero triple with first coordinate `a` and is
/// defined even when no such triple exists.
pub fn matrix_order(a: u64, p: u64) -> u64 {
    let a = a % p;
    // M^n = [[x, y], [z, w]]; multiply on the right by M
    let (mut x, mut y, mut z, mut w) = (0, 1, p - 1, a);
    let mut n = 1;
    while (x, y, z, w) != (1, 0, 0, 1) {
        (x, y) = (p - y, (x + a * y) % p);
        (z, w) = (p - w, (z + a * w) % p);
        (x, z) = (x % p, z % p);
        n += 1;
    }
    n
}

/// Orders and classes of all coordinates, measured without any group
/// theory: matrix orders, orbit walks and quadratic residuosity by table.
#[derive(Debug, Clone)]
pub struct OrderTable {
    pub p: u64,
    /// Order of the rotation matrix of each coordinate.
    pub order: Vec<u64>,
    /// Orbit length through some nonzero triple; 0 where none exists.
    pub orbit: Vec<u64>,
    /// `a^2 - 4` is a nonzero square.
    pub hyperbolic: Vec<bool>,
}

pub fn order_table(p: u64) -> Result<OrderTable, OracleError> {
    let s = Small::new(p, MAX_GRAPH_PRIME)?;
    let mut order = vec![0u64; p as usize];
    let mut orbit = vec![0u64; p as usize];
    let mut hyperbolic = vec![false; p as usize];
    for a in 0..p {
        let disc = (a * a + p - 4) % p;
        hyperbolic[a as usize] = disc != 0 && s.root[disc as usize] != u32::MAX;
        order[a as usize] = matrix_order(a, p);
        orbit[a as usize] = match orbit_length(a, p) {
            Ok(n) => n,
            Err(OracleError::NoSuchCoordinate(_)) => 0,
            Err(e) => return Err(e),
        };
    }
    Ok(OrderTable {
        p,
        order,
        orbit,
        hyperbolic,
    })
}

impl OrderTable {
    /// The small-order set for exclusive cutoffs `(hyperbolic, elliptic)`.
    pub fn small(&self, cutoffs: (u64, u64)) -> Vec<bool> {
        let p = self.p;
        (0..p)
            .map(|a| {
                let d = self.order[a as usize];
                let parabolic = a == 2 || a == p - 2;
                let cut = if self.hyperbolic[a as usize] { cutoffs.0 } else { cutoffs.1 };
                !parabolic && d > 2 && d < cut
            })
            .collect()
    }
}

/// The two bad sets for a given small-order membership vector.
#[derive(Debug, Clone, Default)]
pub struct BadSets {
    /// Triples with all three coordinates small.
    pub all_small: Vec<MarkoffTriple>,
    /// Triples whose whole `rot_1` orbit consists of all-small triples.
    pub orbit_bad: Vec<MarkoffTriple>,
}

impl BadSets {
    /// Counts per first coordinate, `(all_small, orbit_bad)`.
    pub fn slices(&self, p: u64) -> (Vec<u64>, Vec<u64>) {
        let mut x = vec![0; p as usize];
        let mut y = vec![0; p as usize];
        for t in &self.all_small {
            x[t.a as usize] += 1;
        }
        for t in &self.orbit_bad {
            y[t.a as usize] += 1;
        }
        (x, y)
    }
}

pub fn definition_level_bad_set(p: u64, small: &[bool]) -> Result<BadSets, OracleError> {
    let s = Small::new(p, MAX_BAD_SET_PRIME)?;
    let mut out = BadSets::default();
    let all = |t: &MarkoffTriple| small[t.a as usize] && small[t.b as usize] && small[t.c as usize];
    // one slot per (a, b) and root, the larger root in the odd slot
    let slot = |t: &MarkoffTriple| {
        let other = s.sub(s.mul(t.a, t.b), t.c);
        2 * (t.a * p + t.b) as usize + (t.c > other) as usize
    };
    let mut visited = vec![false; 2 * (p * p) as usize];
    for a in (0..p).filter(|&a| small[a as usize]) {
        for b in 0..p {
            let (cs, n) = s.third(a, b);
            for &c in &cs[..n] {
                let t = MarkoffTriple::new(a, b, c);
                if !all(&t) || (a, b, c) == (0, 0, 0) {
                    continue;
                }
                out.all_small.push(t);
                if !visited[slot(&t)] {
                    let orbit = orbit_of(&s, t);
                    for u in &orbit {
                        visited[slot(u)] = true;
                    }
                    if orbit.iter().all(all) {
                        out.orbit_bad.extend(orbit);
                    }
                }
            }
        }
    }
    out.orbit_bad.sort_unstable();
    Ok(out)
}

/// Outcome of [`cross_check`]: empty `failures` means every check passed.
#[derive(Debug, Clone, Default)]
pub struct CrossCheck {
    pub p: u64,
    pub components: Vec<u64>,
    pub vertices: u64,
    pub checks: Vec<&'static str>,
    pub failures: Vec<String>,
}

impl CrossCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs every brute-force comparison available at `p` against the sieve
/// (with the orbit cap disabled).
pub fn cross_check(p: u64) -> Result<CrossCheck, OracleError> {
    let mut graph = MarkoffGraph::new(p)?;
    let mut out = CrossCheck {
        p,
        components: graph.component_sizes(),
        vertices: graph.vertex_count(),
        ..Default::default()
    };
    let mut check = |name: &'static str, failures: Vec<String>| {
        out.checks.push(name);
        out.failures.extend(failures.into_iter().map(|f| format!("{name}: {f}")));
    };

    check(
        "connectivity",
        if out.components.len() == 1 {
            vec![]
        } else {
            vec![format!("{} components", out.components.len())]
        },
    );
    let n = out.vertices as i64;
    let p2 = (p * p) as i64;
    check(
        "triple count",
        if (n - p2).abs() <= 3 * p as i64 {
            vec![]
        } else {
            vec![format!("{n} nonzero triples")]
        },
    );
    let values = coordinate_values(p)?;
    let expect_two = p % 4 == 1;
    check(
        "parabolic coordinates",
        [2, p - 2]
            .iter()
            .filter(|&&v| values[v as usize] != expect_two)
            .map(|v| format!("coordinate {v} present = {}", values[*v as usize]))
            .collect(),
    );

    let config = Config {
        cap: None,
        ..Config::default()
    };
    let ctx = PrimeContext::new(p, config)?;
    let table = order_table(p)?;
    let mut failures = Vec::new();
    for a in 0..p {
        if let Some(d) = ctx.classify(a).order() {
            let (m, o) = (table.order[a as usize], table.orbit[a as usize]);
            if m != d || (o != 0 && o != d) {
                failures.push(format!("a = {a}: matrix {m}, orbit {o} vs order {d}"));
            }
        }
    }
    check("orbit lengths", failures);

    let cut = (
        ctx.breakpoints.cutoff(crate::decomp::Side::Minus),
        ctx.breakpoints.cutoff(crate::decomp::Side::Plus),
    );
    let small = table.small(cut);
    let s = ctx.small_order_set();
    check(
        "small-order set",
        (0..p)
            .filter(|&a| small[a as usize] != s.contains(a))
            .map(|a| format!("a = {a}: oracle {} vs sieve {}", small[a as usize], s.contains(a)))
            .collect(),
    );

    if p <= MAX_BAD_SET_PRIME {
        let sets = definition_level_bad_set(p, &small)?;
        let (all_small, orbit_bad) = sets.slices(p);
        let mut f1 = Vec::new();
        let mut f2 = Vec::new();
        for &a in s.values() {
            let c1 = ctx.cartesian_count(a, &s);
            if c1 != all_small[a as usize] {
                f1.push(format!("a = {a}: {c1} vs {}", all_small[a as usize]));
            }
            let c2 = ctx.coset_count_for(a, &s, None).bad;
            if c2 != orbit_bad[a as usize] {
                f2.push(format!("a = {a}: {c2} vs {}", orbit_bad[a as usize]));
            }
        }
        check("cartesian counts", f1);
        check("coset counts", f2);
    }

    Ok(out)
}
