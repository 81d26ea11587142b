//! Endgame and middle-game breakpoints.
//!
//! A coordinate whose order `d` (a divisor of `N = p +- 1`) satisfies
//! `d > 8 sqrt(p) N tau(N) / phi(N)` is known to be connected to the giant
//! component. The bound is irrational, so it is handled through exact
//! integer comparisons: `d` exceeds it iff `(d phi)^2 > 64 p (N tau)^2`.
//!
//! The middle-game breakpoint `L` is the least divisor `t` of `p +- 1`
//! from which every larger divisor satisfies
//! `t > sum_d (3/2) max(cbrt(6 t d), 4 t d / p)`, the sum running over the
//! divisor set chosen by [`MiddleGameConfig`].

use num_bigint::BigUint;

use crate::decomp::Side;
use crate::factor::Factorization;

/// Relative guard on the floating-point middle-game comparison. Success
/// needs `t > sum * (1 + GUARD)`, so rounding can only produce `None`.
pub const GUARD: f64 = 1e-9;

/// The endgame bound for one side, `8 sqrt(p) N tau(N) / phi(N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Endgame {
    p: u64,
    n: u64,
    tau: u64,
    phi: u64,
    /// `floor` of the bound, clamped to `n`.
    floor: u64,
}

impl Endgame {
    pub fn new(p: u64, f: &Factorization) -> Self {
        let (n, tau, phi) = (f.value(), f.tau(), f.phi());
        let rhs = BigUint::from(64u32) * BigUint::from(p) * (BigUint::from(n) * BigUint::from(tau)).pow(2);
        // floor(sqrt(X) / phi) = floor(isqrt(X) / phi)
        let floor = rhs.sqrt() / BigUint::from(phi);
        let floor = u64::try_from(floor).map_or(n, |x| x.min(n));
        Endgame { p, n, tau, phi, floor }
    }

    /// Whether `d > 8 sqrt(p) N tau / phi`, decided exactly.
    pub fn exceeds(&self, d: u64) -> bool {
        let lhs = (BigUint::from(d) * BigUint::from(self.phi)).pow(2);
        let rhs = BigUint::from(64u32)
            * BigUint::from(self.p)
            * (BigUint::from(self.n) * BigUint::from(self.tau)).pow(2);
        lhs > rhs
    }

    /// The largest integer below the bound (the bound is irrational), or
    /// `N` if the bound is larger than `N`.
    pub fn floor(&self) -> u64 {
        self.floor
    }

    /// The bound as a float, for display only.
    pub fn value(&self) -> f64 {
        8.0 * (self.p as f64).sqrt() * self.n as f64 * self.tau as f64 / self.phi as f64
    }
}

/// Exact endgame test for a divisor `d` of `p - 1` (`Side::Minus`) or
/// `p + 1` (`Side::Plus`).
pub fn exceeds_endgame(d: u64, p: u64, side: Side) -> bool {
    let f = Factorization::of(side.group_order(p));
    Endgame::new(p, &f).exceeds(d)
}

/// Which divisors `d < t` enter the middle-game sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Variant {
    /// Maximal elements, under divisibility, of the admissible divisors of
    /// `p - 1` and of `p + 1` (each side separately, then united).
    #[default]
    Maximal,
    /// Every admissible divisor.
    AllDivisors,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Maximal => "maximal",
            Variant::AllDivisors => "all-divisors",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "maximal" => Ok(Variant::Maximal),
            "all-divisors" => Ok(Variant::AllDivisors),
            _ => Err(format!("unknown variant `{s}` (expected maximal or all-divisors)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MiddleGameConfig {
    pub variant: Variant,
    /// Admit `d = t` as well as `d < t`.
    pub include_t: bool,
    /// Drop divisors that already clear the endgame bound of their side;
    /// the bound is evaluated with `sqrt(p)` rounded up, so borderline
    /// divisors stay in the sum.
    pub skip_certified: bool,
}

impl Default for MiddleGameConfig {
    fn default() -> Self {
        MiddleGameConfig {
            variant: Variant::Maximal,
            include_t: false,
            skip_certified: true,
        }
    }
}

fn ceil_sqrt(p: u64) -> u64 {
    let r = p.isqrt();
    if r * r == p {
        r
    } else {
        r + 1
    }
}

/// Largest divisor value still counted as uncertified on one side:
/// `d phi < 8 ceil(sqrt(p)) N tau`.
fn uncertified_limit(p: u64, f: &Factorization) -> u64 {
    let rhs = 8 * ceil_sqrt(p) as u128 * f.value() as u128 * f.tau() as u128;
    let lim = (rhs - 1) / f.phi() as u128;
    lim.min(f.value() as u128) as u64
}

/// One summand, `(3/2) max(cbrt(6 t d), 4 t d / p)`.
pub fn summand(t: u64, d: u64, p: u64) -> f64 {
    let td = t as f64 * d as f64;
    1.5 * (6.0 * td).cbrt().max(4.0 * td / p as f64)
}

/// Precomputed divisor data for the middle-game scan of one prime.
#[derive(Debug, Clone)]
pub struct MiddleGame {
    p: u64,
    minus: Factorization,
    plus: Factorization,
    minus_divisors: Vec<u64>,
    plus_divisors: Vec<u64>,
    minus_limit: u64,
    plus_limit: u64,
    config: MiddleGameConfig,
}

impl MiddleGame {
    pub fn new(p: u64, minus: &Factorization, plus: &Factorization, config: MiddleGameConfig) -> Self {
        let (minus_limit, plus_limit) = if config.skip_certified {
            (uncertified_limit(p, minus), uncertified_limit(p, plus))
        } else {
            (minus.value(), plus.value())
        };
        MiddleGame {
            p,
            minus: minus.clone(),
            plus: plus.clone(),
            minus_divisors: minus.divisors(),
            plus_divisors: plus.divisors(),
            minus_limit,
            plus_limit,
            config,
        }
    }

    /// The divisors `d` summed over for a given `t`, ascending, deduplicated.
    pub fn divisor_set(&self, t: u64) -> Vec<u64> {
        let top = if self.config.include_t { t } else { t - 1 };
        let (xm, xp) = (top.min(self.minus_limit), top.min(self.plus_limit));
        let mut ds: Vec<u64> = match self.config.variant {
            Variant::Maximal => {
                let mut v = self.minus.maximal_divisors(xm);
                v.extend(self.plus.maximal_divisors(xp));
                v
            }
            Variant::AllDivisors => {
                let m = self.minus_divisors.iter().take_while(|&&d| d <= xm);
                let p = self.plus_divisors.iter().take_while(|&&d| d <= xp);
                m.chain(p).copied().collect()
            }
        };
        ds.sort_unstable();
        ds.dedup();
        ds
    }

    /// The right-hand side of the middle-game inequality for `t`.
    pub fn sum(&self, t: u64) -> f64 {
        self.divisor_set(t).iter().map(|&d| summand(t, d, self.p)).sum()
    }

    pub fn satisfied(&self, t: u64) -> bool {
        t as f64 > self.sum(t) * (1.0 + GUARD)
    }

    /// Candidate values of `t`: the divisors of `p - 1` and `p + 1` above 2.
    pub fn candidates(&self) -> Vec<u64> {
        let mut ts: Vec<u64> = self
            .minus_divisors
            .iter()
            .chain(&self.plus_divisors)
            .copied()
            .filter(|&t| t > 2)
            .collect();
        ts.sort_unstable();
        ts.dedup();
        ts
    }

    /// The least candidate from which every larger candidate satisfies the
    /// inequality, if the largest candidate does.
    pub fn breakpoint(&self) -> Option<u64> {
        let mut l = None;
        for t in self.candidates() {
            if self.satisfied(t) {
                l.get_or_insert(t);
            } else {
                l = None;
            }
        }
        l
    }
}

/// `sum` over the configured divisor set for `t`.
pub fn middle_game_sum(t: u64, p: u64, config: MiddleGameConfig) -> f64 {
    let (m, pl) = (Factorization::of(p - 1), Factorization::of(p + 1));
    MiddleGame::new(p, &m, &pl, config).sum(t)
}

pub fn middle_game_breakpoint(p: u64, config: MiddleGameConfig) -> Option<u64> {
    let (m, pl) = (Factorization::of(p - 1), Factorization::of(p + 1));
    MiddleGame::new(p, &m, &pl, config).breakpoint()
}

/// Both endgame bounds and the optional middle-game breakpoint of a prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Breakpoints {
    pub minus: Endgame,
    pub plus: Endgame,
    pub middle: Option<u64>,
}

impl Breakpoints {
    pub fn new(p: u64, minus: &Factorization, plus: &Factorization, config: MiddleGameConfig) -> Self {
        Breakpoints {
            minus: Endgame::new(p, minus),
            plus: Endgame::new(p, plus),
            middle: MiddleGame::new(p, minus, plus, config).breakpoint(),
        }
    }

    pub fn endgame(&self, side: Side) -> &Endgame {
        match side {
            Side::Minus => &self.minus,
            Side::Plus => &self.plus,
        }
    }

    /// Exclusive upper bound on small orders for a side:
    /// `d` is small iff `d < min(L, B)`.
    pub fn cutoff(&self, side: Side) -> u64 {
        let b = self.endgame(side).floor() + 1;
        self.middle.map_or(b, |l| l.min(b))
    }

    pub fn is_small(&self, d: u64, side: Side) -> bool {
        d < self.cutoff(side)
    }
}
