//! Generator bases of `F_p^*` and of the norm-one subgroup `E` of
//! `F_{p^2}^*`, exponent vectors over those bases, element orders, and the
//! factor-trie traversal that enumerates elements by order.
//!
//! Both groups are cyclic, so each splits as a direct sum of its Sylow
//! subgroups `Z/q_i` with `q_i = p_i^{t_i}`. An element is stored as the
//! exponent vector `(r_1, .., r_n)` of `prod g_i^{r_i}`; its order is
//! `prod_i q_i / gcd(r_i, q_i)`.

use std::fmt::Debug;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arith::{Field, QuadExt};
use crate::factor::{FactorTrie, Factorization};

/// Which of the two cyclic groups: `F_p^*` (order `p - 1`) or `E` (order `p + 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    /// `p - 1` or `p + 1`.
    pub fn group_order(self, p: u64) -> u64 {
        match self {
            Side::Minus => p - 1,
            Side::Plus => p + 1,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecompError {
    #[error("exponent vector has order 1 or 2, so it has no lower-half index")]
    TrivialOrder,
}

/// A finite cyclic group realized inside `F_{p^2}^*`.
pub trait Group: Sync + Send {
    type Elem: Copy + Eq + Debug + Send + Sync;

    fn field(&self) -> &Field;
    fn side(&self) -> Side;
    fn one(&self) -> Self::Elem;
    fn mul(&self, x: Self::Elem, y: Self::Elem) -> Self::Elem;
    fn inv(&self, x: Self::Elem) -> Self::Elem;
    fn pow(&self, x: Self::Elem, e: u64) -> Self::Elem;
    /// `x + x^{-1}`, which lies in `F_p` for both groups.
    fn trace(&self, x: Self::Elem) -> u64;
    /// A uniformly random group element.
    fn sample(&self, rng: &mut ChaCha8Rng) -> Self::Elem;

    fn order(&self) -> u64 {
        self.side().group_order(self.field().modulus())
    }
}

/// `F_p^*`.
#[derive(Debug, Clone)]
pub struct Multiplicative {
    field: Field,
}

impl Multiplicative {
    pub fn new(field: Field) -> Self {
        Multiplicative { field }
    }
}

impl Group for Multiplicative {
    type Elem = u64;

    fn field(&self) -> &Field {
        &self.field
    }
    fn side(&self) -> Side {
        Side::Minus
    }
    fn one(&self) -> u64 {
        1
    }
    #[inline]
    fn mul(&self, x: u64, y: u64) -> u64 {
        self.field.mul(x, y)
    }
    fn inv(&self, x: u64) -> u64 {
        self.field.inv(x).expect("group elements are nonzero")
    }
    fn pow(&self, x: u64, e: u64) -> u64 {
        self.field.pow(x, e)
    }
    fn trace(&self, x: u64) -> u64 {
        self.field.add(x, self.inv(x))
    }
    fn sample(&self, rng: &mut ChaCha8Rng) -> u64 {
        rng.gen_range(1..self.field.modulus())
    }
}

/// The norm-one subgroup `E = { x : x^{p+1} = 1 }` of `F_{p^2}^*`, where
/// inversion is conjugation.
#[derive(Debug, Clone)]
pub struct NormOne {
    field: Field,
}

impl NormOne {
    pub fn new(field: Field) -> Self {
        NormOne { field }
    }

    pub fn contains(&self, x: QuadExt) -> bool {
        self.field.norm(x) == 1
    }
}

impl Group for NormOne {
    type Elem = QuadExt;

    fn field(&self) -> &Field {
        &self.field
    }
    fn side(&self) -> Side {
        Side::Plus
    }
    fn one(&self) -> QuadExt {
        QuadExt::base(1)
    }
    #[inline]
    fn mul(&self, x: QuadExt, y: QuadExt) -> QuadExt {
        self.field.ext_mul(x, y)
    }
    fn inv(&self, x: QuadExt) -> QuadExt {
        self.field.frobenius(x)
    }
    fn pow(&self, x: QuadExt, e: u64) -> QuadExt {
        self.field.ext_pow(x, e as u128)
    }
    fn trace(&self, x: QuadExt) -> u64 {
        self.field.add(x.re, x.re)
    }
    /// Projects a random nonzero element of `F_{p^2}` with `xi -> xi^{p-1}`.
    fn sample(&self, rng: &mut ChaCha8Rng) -> QuadExt {
        let p = self.field.modulus();
        loop {
            let xi = QuadExt::new(rng.gen_range(0..p), rng.gen_range(0..p));
            if xi != QuadExt::default() {
                return self.field.ext_pow(xi, (p - 1) as u128);
            }
        }
    }
}

/// Order of `x` in a group of order `n = f.value()`.
pub fn element_order<G: Group>(group: &G, x: G::Elem, f: &Factorization) -> u64 {
    let mut ord = f.value();
    for &(q, e) in f.pairs() {
        for _ in 0..e {
            if group.pow(x, ord / q) == group.one() {
                ord /= q;
            } else {
                break;
            }
        }
    }
    ord
}

/// An exponent vector over a [`GroupBasis`], `0 <= r_i < q_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupVector(pub Vec<u64>);

/// Generators `g_i` of order exactly `q_i = p_i^{t_i}` for each prime power
/// of the group order.
#[derive(Debug, Clone)]
pub struct GroupBasis<G: Group> {
    group: G,
    factorization: Factorization,
    prime_powers: Vec<u64>,
    generators: Vec<G::Elem>,
    inverses: Vec<G::Elem>,
}

fn basis_rng(p: u64, side: Side) -> ChaCha8Rng {
    let tag = match side {
        Side::Minus => 0x6d69_6e75_73u64,
        Side::Plus => 0x706c_7573u64,
    };
    ChaCha8Rng::seed_from_u64(p ^ tag.rotate_left(40))
}

impl<G: Group> GroupBasis<G> {
    /// Searches for a basis with a PRNG seeded by `p`, so the result is
    /// reproducible. `fixed` pins generators for chosen slots; each must
    /// already have the right order.
    pub fn find(group: G, factorization: Factorization, fixed: &[(usize, G::Elem)]) -> Self {
        let n = group.order();
        assert_eq!(factorization.value(), n, "factorization does not match group order");
        let mut rng = basis_rng(group.field().modulus(), group.side());
        let prime_powers = factorization.prime_powers();
        let mut generators = Vec::with_capacity(prime_powers.len());
        for (i, (&(q, _), &qt)) in factorization.pairs().iter().zip(&prime_powers).enumerate() {
            if let Some(&(_, g)) = fixed.iter().find(|&&(slot, _)| slot == i) {
                generators.push(g);
                continue;
            }
            loop {
                let h = group.sample(&mut rng);
                let g = group.pow(h, n / qt);
                if group.pow(g, qt / q) != group.one() {
                    generators.push(g);
                    break;
                }
            }
        }
        let inverses = generators.iter().map(|&x| group.inv(x)).collect();
        let basis = GroupBasis {
            group,
            factorization,
            prime_powers,
            generators,
            inverses,
        };
        debug_assert!(basis.verify());
        basis
    }

    /// Checks `g_i^{q_i} = 1` and `g_i^{q_i / p_i} != 1` for every slot.
    pub fn verify(&self) -> bool {
        let g = &self.group;
        self.factorization
            .pairs()
            .iter()
            .zip(&self.prime_powers)
            .zip(&self.generators)
            .all(|((&(q, _), &qt), &x)| g.pow(x, qt) == g.one() && g.pow(x, qt / q) != g.one())
    }

    pub fn group(&self) -> &G {
        &self.group
    }

    pub fn factorization(&self) -> &Factorization {
        &self.factorization
    }

    pub fn prime_powers(&self) -> &[u64] {
        &self.prime_powers
    }

    pub fn generators(&self) -> &[G::Elem] {
        &self.generators
    }

    /// `g_i^{-1}` for each generator.
    pub fn inverses(&self) -> &[G::Elem] {
        &self.inverses
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// `prod g_i^{r_i}`.
    pub fn vector_to_element(&self, v: &GroupVector) -> G::Elem {
        let g = &self.group;
        v.0.iter()
            .zip(&self.generators)
            .fold(g.one(), |acc, (&r, &gen)| g.mul(acc, g.pow(gen, r)))
    }

    /// `lcm_i q_i / gcd(r_i, q_i)`; the factors are coprime so this is a product.
    pub fn vector_order(&self, v: &GroupVector) -> u64 {
        v.0.iter()
            .zip(self.factorization.pairs())
            .zip(&self.prime_powers)
            .map(|((&r, &(q, _)), &qt)| {
                let mut o = qt;
                let mut r = r % qt;
                if r == 0 {
                    return 1;
                }
                while r % q == 0 {
                    r /= q;
                    o /= q;
                }
                o
            })
            .product()
    }

    /// The exponent vector of the inverse.
    pub fn inverse_vector(&self, v: &GroupVector) -> GroupVector {
        GroupVector(
            v.0.iter()
                .zip(&self.prime_powers)
                .map(|(&r, &qt)| (qt - r % qt) % qt)
                .collect(),
        )
    }

    /// Whether `v` is the canonical member of `{v, -v}`: at the first slot
    /// that is nonzero and not the order-two element of the 2-part, the
    /// exponent is at most half the slot modulus.
    pub fn lower_half(&self, v: &GroupVector) -> Result<bool, DecompError> {
        for ((&r, &(q, _)), &qt) in v.0.iter().zip(self.factorization.pairs()).zip(&self.prime_powers) {
            if r == 0 || (q == 2 && r == qt / 2) {
                continue;
            }
            return Ok(r <= qt / 2);
        }
        Err(DecompError::TrivialOrder)
    }

    /// Brute-force discrete log against the basis, for tests on tiny groups.
    pub fn vector_of(&self, x: G::Elem) -> Option<GroupVector> {
        let mut v = vec![0u64; self.len()];
        loop {
            if self.vector_to_element(&GroupVector(v.clone())) == x {
                return Some(GroupVector(v));
            }
            let mut i = self.len();
            loop {
                if i == 0 {
                    return None;
                }
                i -= 1;
                v[i] += 1;
                if v[i] < self.prime_powers[i] {
                    break;
                }
                v[i] = 0;
            }
        }
    }
}

/// Builds a basis of `F_p^*`.
pub fn find_basis_minus(field: &Field) -> GroupBasis<Multiplicative> {
    let f = Factorization::of(field.modulus() - 1);
    GroupBasis::find(Multiplicative::new(field.clone()), f, &[])
}

/// An element `m` of order `2^{s+1}` in `F_{p^2}^*`, where `2^s || p + 1`.
///
/// Then `m^{p+1} = -1`, so the coset `m E` is exactly the set of elements of
/// norm `-1`, and `m^2` generates the 2-part of `E`.
pub fn find_twist(field: &Field) -> QuadExt {
    let p = field.modulus();
    let s = (p + 1).trailing_zeros();
    let full = (p as u128) * (p as u128) - 1;
    let exp = full >> (s + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(p ^ 0x7477_6973_74);
    loop {
        let h = QuadExt::new(rng.gen_range(0..p), rng.gen_range(0..p));
        if h == QuadExt::default() {
            continue;
        }
        let m = field.ext_pow(h, exp);
        if field.ext_pow(m, 1u128 << s) != QuadExt::base(1) {
            return m;
        }
    }
}

/// Builds a basis of `E` whose 2-part generator is `m^2` for the given twist.
pub fn find_basis_plus(field: &Field, twist: QuadExt) -> GroupBasis<NormOne> {
    let f = Factorization::of(field.modulus() + 1);
    let g1 = field.ext_mul(twist, twist);
    GroupBasis::find(NormOne::new(field.clone()), f, &[(0, g1)])
}

/// Classification of a coordinate `a = chi + chi^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoordinateClass {
    /// `a = 2` or `a = -2`.
    Parabolic,
    /// `chi` lies in `F_p^*`; the payload is its order.
    Hyperbolic(u64),
    /// `chi` lies in `E`; the payload is its order.
    Elliptic(u64),
}

impl CoordinateClass {
    pub fn order(&self) -> Option<u64> {
        match *self {
            CoordinateClass::Parabolic => None,
            CoordinateClass::Hyperbolic(d) | CoordinateClass::Elliptic(d) => Some(d),
        }
    }
}

/// A root `chi` of `chi^2 - a chi + 1`, as an element of `F_{p^2}`.
pub fn root_of_trace(field: &Field, a: u64) -> QuadExt {
    let disc = field.sub(field.square(a), 4);
    match field.legendre(disc) {
        -1 => {
            // disc = k s^2
            let k_inv = field.inv(field.nonresidue()).expect("k is nonzero");
            let s = match field.sqrt(field.mul(disc, k_inv)) {
                crate::arith::Roots::Pair(s, _) => s,
                _ => unreachable!("disc / k is a nonzero square"),
            };
            QuadExt::new(field.half(a), field.half(s))
        }
        _ => {
            let s = field.sqrt(disc).iter().next().expect("disc is a square");
            QuadExt::base(field.half(field.add(a, s)))
        }
    }
}

/// Order data of a coordinate; `minus`/`plus` factor `p - 1` and `p + 1`.
pub fn classify_coordinate(
    field: &Field,
    minus: &Factorization,
    plus: &Factorization,
    a: u64,
) -> CoordinateClass {
    let p = field.modulus();
    let a = a % p;
    if a == 2 || a == p - 2 {
        return CoordinateClass::Parabolic;
    }
    let chi = root_of_trace(field, a);
    if chi.is_base() {
        let g = Multiplicative::new(field.clone());
        CoordinateClass::Hyperbolic(element_order(&g, chi.re, minus))
    } else {
        let g = NormOne::new(field.clone());
        CoordinateClass::Elliptic(element_order(&g, chi, plus))
    }
}

/// One element produced by [`propagate_small_orders`].
#[derive(Debug)]
pub struct Found<'a, E> {
    pub elem: E,
    pub inv: E,
    pub order: u64,
    pub exponents: &'a [u64],
}

struct Frame<E> {
    node: usize,
    slot: usize,
    depth: u32,
    digit: u64,
    // next child to visit for the current digit; usize::MAX means "yield first"
    child: usize,
    base: u64,
    elem: E,
    inv: E,
    meaningful: bool,
}

/// Walks the factor trie of the group order and reports exactly one of each
/// inverse pair `{chi, chi^{-1}}` with `2 < |chi|` and `admit(|chi|)`.
///
/// `admit` must be downward closed along divisibility (if it admits `d`, it
/// admits every divisor of `d`), so a node whose divisor is rejected prunes
/// its whole subtree.
pub fn propagate_small_orders<G, A, S>(basis: &GroupBasis<G>, trie: &FactorTrie, admit: A, mut sink: S)
where
    G: Group,
    A: Fn(u64) -> bool,
    S: FnMut(&Found<'_, G::Elem>),
{
    let g = basis.group();
    let pairs = basis.factorization().pairs();
    let n = pairs.len();
    // step[i][e] = g_i^{p_i^{t_i - e}}, the increment of the digit at depth e
    let steps: Vec<Vec<(G::Elem, G::Elem, u64)>> = (0..n)
        .map(|i| {
            let (q, t) = pairs[i];
            let gi = basis.generators()[i];
            let gi_inv = g.inv(gi);
            (0..=t)
                .map(|e| {
                    let place = if e == 0 { 0 } else { q.pow(t - e) };
                    (g.pow(gi, place), g.pow(gi_inv, place), place)
                })
                .collect()
        })
        .collect();
    let half: Vec<u64> = basis.prime_powers().iter().map(|&qt| qt / 2).collect();
    let mut r = vec![0u64; n];
    let mut stack: Vec<Frame<G::Elem>> = Vec::new();

    let push = |stack: &mut Vec<Frame<G::Elem>>, node: usize, base: u64, elem, inv, meaningful| {
        let nd = trie.node(node);
        let slot = nd.last.expect("non-root node");
        stack.push(Frame {
            node,
            slot,
            depth: nd.exponents[slot],
            digit: 0,
            child: usize::MAX,
            base,
            elem,
            inv,
            meaningful,
        });
    };

    for &(_, c) in trie.node(FactorTrie::ROOT).children.iter().rev() {
        if admit(trie.node(c).divisor) {
            push(&mut stack, c, 0, g.one(), g.one(), false);
        }
    }

    while let Some(top) = stack.last_mut() {
        let m = top.slot;
        let (q, _) = pairs[m];
        let (_, _, place) = steps[m][top.depth as usize];
        let value = top.base + top.digit * place;
        if top.digit >= q || (!top.meaningful && value > half[m]) {
            r[m] = top.base;
            stack.pop();
            continue;
        }
        r[m] = value;
        let node = trie.node(top.node);
        if top.child == usize::MAX {
            if top.digit != 0 && node.divisor > 2 {
                sink(&Found {
                    elem: top.elem,
                    inv: top.inv,
                    order: node.divisor,
                    exponents: &r,
                });
            }
            top.child = 0;
        }
        // next admissible child for this digit
        let mut next = None;
        while top.child < node.children.len() {
            let (j, c) = node.children[top.child];
            top.child += 1;
            if (j == m || top.digit != 0) && admit(trie.node(c).divisor) {
                next = Some((j, c));
                break;
            }
        }
        match next {
            Some((j, c)) => {
                let (elem, inv) = (top.elem, top.inv);
                if j == m {
                    let meaningful = top.meaningful;
                    push(&mut stack, c, value, elem, inv, meaningful);
                } else {
                    let slot_meaningful = value != 0 && !(q == 2 && value == half[m]);
                    let meaningful = top.meaningful || slot_meaningful;
                    push(&mut stack, c, 0, elem, inv, meaningful);
                }
            }
            None => {
                let (s, s_inv, _) = steps[m][top.depth as usize];
                top.digit += 1;
                top.child = usize::MAX;
                top.elem = g.mul(top.elem, s);
                top.inv = g.mul(top.inv, s_inv);
            }
        }
    }
}

/// Most prime slots a basis can have: 15 distinct primes exceed `2^64`.
const MAX_SLOTS: usize = 16;

/// Enumerates representatives of the cosets of the subgroup of order
/// `sub_order` (which must divide the group order), paired under
/// `u -> u^{-1}`.
///
/// Representatives are `u = start * prod g_i^{r_i}` with `0 <= r_i < q_i / s_i`,
/// where `s_i` is the `p_i`-part of `sub_order`. `start^{-2}` must equal
/// `prod g_i^{twist_i}`, so that the coset of `u^{-1}` has digits
/// `-r - twist`. Each class `{coset, inverse coset}` is reported once, as its
/// lexicographically smaller digit vector, with weight 2 if the two cosets
/// differ and 1 if the coset is closed under inversion.
pub fn coset_reps<G, S>(
    basis: &GroupBasis<G>,
    sub_order: u64,
    start: (G::Elem, G::Elem),
    twist: &[u64],
    sink: S,
) where
    G: Group,
    S: FnMut(&[u64], G::Elem, G::Elem, u64),
{
    CosetWalk::new(basis, sub_order, twist, true, sink).descend(0, true, start.0, start.1);
}

/// As [`coset_reps`] without maintaining `u^{-1}`; the sink gets `u` only.
pub fn coset_reps_forward<G, S>(basis: &GroupBasis<G>, sub_order: u64, start: G::Elem, twist: &[u64], mut sink: S)
where
    G: Group,
    S: FnMut(&[u64], G::Elem, u64),
{
    let one = basis.group().one();
    CosetWalk::new(basis, sub_order, twist, false, |d: &[u64], u, _, w| sink(d, u, w)).descend(0, true, start, one);
}

struct CosetWalk<'a, G: Group, S> {
    group: &'a G,
    n: usize,
    // basis slots with a nontrivial quotient, slowest digit first
    slots: [usize; MAX_SLOTS],
    len: usize,
    moduli: [u64; MAX_SLOTS],
    twist: [u64; MAX_SLOTS],
    step: [(G::Elem, G::Elem); MAX_SLOTS],
    digits: [u64; MAX_SLOTS],
    track_inverse: bool,
    sink: S,
}

impl<'a, G, S> CosetWalk<'a, G, S>
where
    G: Group,
    S: FnMut(&[u64], G::Elem, G::Elem, u64),
{
    fn new(basis: &'a GroupBasis<G>, sub_order: u64, twist: &[u64], track_inverse: bool, sink: S) -> Self {
        let g = basis.group();
        let n = basis.len();
        assert!(n <= MAX_SLOTS);
        let mut walk = CosetWalk {
            group: g,
            n,
            slots: [0; MAX_SLOTS],
            len: 0,
            moduli: [1; MAX_SLOTS],
            twist: [0; MAX_SLOTS],
            step: [(g.one(), g.one()); MAX_SLOTS],
            digits: [0; MAX_SLOTS],
            track_inverse,
            sink,
        };
        let slots = basis.prime_powers().iter().zip(basis.generators()).zip(basis.inverses());
        for (i, ((&qt, &x), &xi)) in slots.enumerate() {
            let q = qt / gcd(qt, sub_order);
            walk.moduli[i] = q;
            walk.twist[i] = twist[i] % q;
            if q > 1 {
                walk.slots[walk.len] = i;
                walk.len += 1;
                walk.step[i] = (x, xi);
            }
        }
        debug_assert_eq!(
            walk.moduli[..n].iter().product::<u64>() * sub_order,
            basis.factorization().value(),
            "subgroup order must divide the group order"
        );
        walk
    }

    /// `tied`: the digits so far equal those of the inverse coset, so this
    /// slot still decides which of the two is reported.
    fn descend(&mut self, level: usize, tied: bool, u: G::Elem, u_inv: G::Elem) {
        if level == self.len {
            let weight = if tied { 1 } else { 2 };
            (self.sink)(&self.digits[..self.n], u, u_inv, weight);
            return;
        }
        let i = self.slots[level];
        let (q, tw) = (self.moduli[i], self.twist[i]);
        let (x, xi) = self.step[i];
        let (mut u, mut u_inv) = (u, u_inv);
        for d in 0..q {
            // digit of the inverse coset in this slot
            let partner = if tied {
                let mut r = 2 * q - d - tw;
                if r >= q {
                    r -= q;
                }
                if r >= q {
                    r -= q;
                }
                r
            } else {
                q
            };
            if d <= partner {
                self.digits[i] = d;
                self.descend(level + 1, tied && d == partner, u, u_inv);
            }
            u = self.group.mul(u, x);
            if self.track_inverse {
                u_inv = self.group.mul(u_inv, xi);
            }
        }
        self.digits[i] = 0;
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::{factorize, primes_between};
    use std::collections::{HashMap, HashSet};

    fn minus(p: u64) -> (Field, GroupBasis<Multiplicative>) {
        let f = Field::new(p).unwrap();
        let b = find_basis_minus(&f);
        (f, b)
    }

    fn plus(p: u64) -> (Field, GroupBasis<NormOne>) {
        let f = Field::new(p).unwrap();
        let m = find_twist(&f);
        let b = find_basis_plus(&f, m);
        (f, b)
    }

    fn all_vectors(moduli: &[u64]) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for &q in moduli {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..q).map(move |r| {
                        let mut w = v.clone();
                        w.push(r);
                        w
                    })
                })
                .collect();
        }
        out
    }

    fn brute_order<G: Group>(g: &G, x: G::Elem) -> u64 {
        let mut y = x;
        let mut k = 1;
        while y != g.one() {
            y = g.mul(y, x);
            k += 1;
        }
        k
    }

    #[test]
    fn basis_examples() {
        let (_, b) = minus(7);
        assert_eq!(b.prime_powers(), &[2, 3]);
        assert!(b.verify());
        let (_, b) = plus(7);
        assert_eq!(b.prime_powers(), &[8]);
        assert_eq!(brute_order(b.group(), b.generators()[0]), 8);
        let (_, b) = minus(5);
        assert_eq!(b.prime_powers(), &[4]);
        assert!([2, 3].contains(&b.generators()[0]));
    }

    #[test]
    fn bases_are_reproducible() {
        let (_, a) = plus(1_000_003);
        let (_, b) = plus(1_000_003);
        assert_eq!(a.generators(), b.generators());
    }

    #[test]
    fn twist_has_norm_minus_one() {
        for p in [5u64, 7, 11, 13, 17, 31, 97, 101, 1_000_003, 998_244_353] {
            let f = Field::new(p).unwrap();
            let m = find_twist(&f);
            assert_eq!(f.norm(m), p - 1, "p = {p}");
            let s = (p + 1).trailing_zeros();
            assert_eq!(f.ext_pow(m, 1u128 << (s + 1)), QuadExt::base(1));
            assert_ne!(f.ext_pow(m, 1u128 << s), QuadExt::base(1));
        }
    }

    #[test]
    fn vector_orders_match_brute_force() {
        for p in primes_between(5, 50) {
            let (_, b) = minus(p);
            for v in all_vectors(b.prime_powers()) {
                let v = GroupVector(v);
                let x = b.vector_to_element(&v);
                assert_eq!(b.vector_order(&v), brute_order(b.group(), x));
            }
            let (_, b) = plus(p);
            for v in all_vectors(b.prime_powers()) {
                let v = GroupVector(v);
                let x = b.vector_to_element(&v);
                assert!(b.group().contains(x));
                assert_eq!(b.vector_order(&v), brute_order(b.group(), x));
            }
        }
    }

    #[test]
    fn vector_examples() {
        let (_, b) = minus(7);
        assert_eq!(b.vector_to_element(&GroupVector(vec![0, 0])), 1);
        assert_eq!(b.vector_order(&GroupVector(vec![0, 0])), 1);
        assert_eq!(b.vector_order(&GroupVector(vec![1, 0])), 2);
        assert_eq!(b.vector_order(&GroupVector(vec![1, 2])), 6);
        assert_eq!(b.vector_to_element(&GroupVector(vec![0, 2])), b.group().pow(b.generators()[1], 2));
    }

    #[test]
    fn classify_examples() {
        let f = Field::new(7).unwrap();
        let (m, pl) = (factorize(6), factorize(8));
        assert_eq!(classify_coordinate(&f, &m, &pl, 2), CoordinateClass::Parabolic);
        assert_eq!(classify_coordinate(&f, &m, &pl, 5), CoordinateClass::Parabolic);
        assert_eq!(classify_coordinate(&f, &m, &pl, 0), CoordinateClass::Elliptic(4));
        assert_eq!(classify_coordinate(&f, &m, &pl, 3), CoordinateClass::Elliptic(8));
    }

    #[test]
    fn classify_inverts_trace() {
        for p in primes_between(5, 50) {
            let f = Field::new(p).unwrap();
            let (fm, fp) = (factorize(p - 1), factorize(p + 1));
            let (_, bm) = minus(p);
            for x in 1..p {
                let d = brute_order(bm.group(), x);
                if d > 2 {
                    let a = bm.group().trace(x);
                    assert_eq!(classify_coordinate(&f, &fm, &fp, a), CoordinateClass::Hyperbolic(d));
                }
            }
            let (_, bp) = plus(p);
            for v in all_vectors(bp.prime_powers()) {
                let x = bp.vector_to_element(&GroupVector(v));
                let d = brute_order(bp.group(), x);
                if d > 2 {
                    let a = bp.group().trace(x);
                    assert_eq!(classify_coordinate(&f, &fm, &fp, a), CoordinateClass::Elliptic(d));
                }
            }
        }
    }

    #[test]
    fn lower_half_examples() {
        let (_, b) = minus(7);
        assert_eq!(b.lower_half(&GroupVector(vec![0, 1])), Ok(true));
        assert_eq!(b.lower_half(&GroupVector(vec![0, 2])), Ok(false));
        assert_eq!(b.lower_half(&GroupVector(vec![1, 1])), Ok(true));
        assert_eq!(b.lower_half(&GroupVector(vec![1, 0])), Err(DecompError::TrivialOrder));
        assert_eq!(b.lower_half(&GroupVector(vec![0, 0])), Err(DecompError::TrivialOrder));
    }

    fn collect<G: Group>(b: &GroupBasis<G>, bound: u64) -> Vec<(Vec<u64>, G::Elem, u64)> {
        let trie = FactorTrie::new(b.factorization());
        let mut out = Vec::new();
        propagate_small_orders(b, &trie, |d| d < bound, |f| {
            assert_eq!(b.group().mul(f.elem, f.inv), b.group().one());
            out.push((f.exponents.to_vec(), f.elem, f.order))
        });
        out
    }

    #[test]
    fn propagate_examples() {
        let (_, b) = minus(11);
        let got = collect(&b, u64::MAX);
        let mut orders: Vec<u64> = got.iter().map(|x| x.2).collect();
        orders.sort_unstable();
        assert_eq!(orders, vec![5, 5, 10, 10]);
        let (_, b) = minus(7);
        assert!(collect(&b, 3).is_empty());
        let (_, b) = plus(7);
        let mut orders: Vec<u64> = collect(&b, u64::MAX).iter().map(|x| x.2).collect();
        orders.sort_unstable();
        assert_eq!(orders, vec![4, 8, 8]);
    }

    fn check_propagate<G: Group>(b: &GroupBasis<G>, bound: u64)
    where
        G::Elem: std::hash::Hash,
    {
        let got = collect(b, bound);
        let mut seen = HashSet::new();
        for (v, x, d) in &got {
            let v = GroupVector(v.clone());
            assert_eq!(b.vector_to_element(&v), *x);
            assert_eq!(b.vector_order(&v), *d);
            assert_eq!(b.lower_half(&v), Ok(true));
            assert!(seen.insert(*x), "duplicate");
            assert!(!seen.contains(&b.group().inv(*x)) || b.group().inv(*x) == *x);
        }
        // expected: one per inverse pair of order in (2, bound)
        let mut expected: HashMap<u64, usize> = HashMap::new();
        for v in all_vectors(b.prime_powers()) {
            let d = b.vector_order(&GroupVector(v));
            if d > 2 && d < bound {
                *expected.entry(d).or_default() += 1;
            }
        }
        let mut actual: HashMap<u64, usize> = HashMap::new();
        for (_, _, d) in &got {
            *actual.entry(*d).or_default() += 2;
        }
        assert_eq!(actual, expected, "p = {}", b.group().field().modulus());
    }

    #[test]
    fn propagate_yields_each_pair_once() {
        for p in primes_between(5, 100) {
            let (_, b) = minus(p);
            check_propagate(&b, u64::MAX);
            check_propagate(&b, p / 3);
            let (_, b) = plus(p);
            check_propagate(&b, u64::MAX);
            check_propagate(&b, p / 4 + 3);
        }
        for p in [1009u64, 2003, 4621] {
            let (_, b) = minus(p);
            check_propagate(&b, u64::MAX);
            let (_, b) = plus(p);
            check_propagate(&b, u64::MAX);
        }
    }

    #[test]
    fn lower_half_picks_one_of_each_pair() {
        for p in primes_between(5, 100) {
            let (_, b) = minus(p);
            for v in all_vectors(b.prime_powers()) {
                let v = GroupVector(v);
                if b.vector_order(&v) > 2 {
                    let w = b.inverse_vector(&v);
                    assert_ne!(b.lower_half(&v).unwrap(), b.lower_half(&w).unwrap());
                }
            }
        }
    }

    fn check_cosets<G: Group>(b: &GroupBasis<G>, start: (G::Elem, G::Elem), twist: &[u64], sub: u64)
    where
        G::Elem: std::hash::Hash + Ord,
    {
        let g = b.group();
        let mut chi = g.one();
        for v in all_vectors(b.prime_powers()) {
            if b.vector_order(&GroupVector(v.clone())) == sub {
                chi = b.vector_to_element(&GroupVector(v));
                break;
            }
        }
        let coset = |u: G::Elem| -> Vec<G::Elem> {
            let mut c = Vec::new();
            let mut y = u;
            for _ in 0..sub {
                c.push(y);
                y = g.mul(y, chi);
            }
            c.sort();
            c
        };
        let mut covered = HashSet::new();
        let mut classes = HashSet::new();
        let mut total = 0;
        coset_reps(b, sub, start, twist, |_, u, ui, w| {
            assert_eq!(g.mul(u, ui), g.one());
            let c = coset(u);
            let ci = coset(ui);
            assert_eq!(w == 1, c == ci);
            let key = c.clone().min(ci.clone());
            assert!(classes.insert(key), "two reps in one class");
            total += w * sub;
            covered.extend(c);
            covered.extend(ci);
        });
        assert_eq!(total, g.order(), "weights must count every element once");
        assert_eq!(covered.len() as u64, g.order());
        for x in covered {
            // every covered element lies in start * group
            assert!(b.vector_of(g.mul(x, start.1)).is_some());
        }
    }

    #[test]
    fn coset_examples() {
        let (_, b) = minus(11);
        let mut n = 0;
        coset_reps(&b, 5, (1, 1), &[0, 0], |_, _, _, w| {
            assert_eq!(w, 1);
            n += 1
        });
        assert_eq!(n, 2);
        let mut n = 0;
        coset_reps(&b, 10, (1, 1), &[0, 0], |_, _, _, _| n += 1);
        assert_eq!(n, 1);
        let (_, b) = minus(13);
        check_cosets(&b, (1, 1), &vec![0; b.len()], 3);
    }

    #[test]
    fn cosets_cover_the_group() {
        for p in primes_between(5, 60) {
            let (_, b) = minus(p);
            for sub in b.factorization().divisors() {
                check_cosets(&b, (1, 1), &vec![0; b.len()], sub);
            }
        }
    }

    #[test]
    fn twisted_cosets_cover_the_norm_minus_one_coset() {
        for p in primes_between(5, 60) {
            let f = Field::new(p).unwrap();
            let m = find_twist(&f);
            let b = find_basis_plus(&f, m);
            let mut twist = vec![0; b.len()];
            twist[0] = 1;
            let start = (m, f.ext_inv(m).unwrap());
            for sub in b.factorization().divisors() {
                coset_reps(&b, sub, start, &twist, |_, u, _, _| assert_eq!(f.norm(u), p - 1));
                check_cosets(&b, start, &twist, sub);
            }
        }
    }
}
