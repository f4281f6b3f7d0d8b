//! Brute-force reference implementations.
//!
//! Everything here works on bitmask adjacency built directly from the edge
//! list and shares no code with the branching engine.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::OracleError;
use crate::graph::Graph;
use crate::reductions::CardinalityFunction;

pub const ENUMERATION_CAP: usize = 20;
pub const MITM_CAP: usize = 30;
pub const CHROMATIC_CAP: usize = 16;

/// Live vertices relabeled `0..n` with adjacency bitmasks.
struct Masks {
    ids: Vec<u32>,
    adj: Vec<u32>,
}

fn masks(g: &Graph) -> Masks {
    let ids: Vec<u32> = g.vertices().collect();
    let mut index = vec![usize::MAX; g.capacity()];
    for (i, &v) in ids.iter().enumerate() {
        index[v as usize] = i;
    }
    let mut adj = vec![0u32; ids.len()];
    for (u, v) in g.edges() {
        let (a, b) = (index[u as usize], index[v as usize]);
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    Masks { ids, adj }
}

fn independent(adj: &[u32], set: u32) -> bool {
    let mut rest = set;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if adj[v] & set != 0 {
            return false;
        }
    }
    true
}

fn weights(m: &Masks, c: Option<&CardinalityFunction>) -> Option<Vec<(BigUint, BigUint)>> {
    c.map(|c| {
        m.ids
            .iter()
            .map(|&v| (c.c_out(v).clone(), c.c_in(v).clone()))
            .collect()
    })
}

/// Weight of `set` within the vertex range `lo..hi`.
fn set_weight(w: &[(BigUint, BigUint)], set: u32, lo: usize, hi: usize) -> BigUint {
    let mut acc = BigUint::one();
    for v in lo..hi {
        if set >> v & 1 == 1 {
            acc *= &w[v].1;
        } else {
            acc *= &w[v].0;
        }
        if acc.is_zero() {
            break;
        }
    }
    acc
}

/// Exact `ind(g, c)`; `c = None` means unit weights. Enumeration up to 20
/// vertices, meet-in-the-middle up to 30.
pub fn brute_force_ind(g: &Graph, c: Option<&CardinalityFunction>) -> Result<BigUint, OracleError> {
    let n = g.n();
    if n > MITM_CAP {
        return Err(OracleError::TooLarge { n, cap: MITM_CAP });
    }
    if n <= ENUMERATION_CAP {
        Ok(enumerate_ind(g, c))
    } else {
        Ok(mitm_ind(g, c))
    }
}

/// Direct enumeration of all `2^n` subsets.
pub fn enumerate_ind(g: &Graph, c: Option<&CardinalityFunction>) -> BigUint {
    let m = masks(g);
    let n = m.ids.len();
    assert!(n <= MITM_CAP, "enumeration limited to {MITM_CAP} vertices");
    let w = weights(&m, c);
    let mut unit: u64 = 0;
    let mut total = BigUint::zero();
    for set in 0..(1u64 << n) {
        let set = set as u32;
        if !independent(&m.adj, set) {
            continue;
        }
        match &w {
            None => unit += 1,
            Some(w) => total += set_weight(w, set, 0, n),
        }
    }
    match w {
        None => BigUint::from(unit),
        Some(_) => total,
    }
}

/// Meet in the middle: split the vertices in two halves, tabulate
/// subset sums over the second half by a zeta transform, then combine with
/// every independent set of the first half.
pub fn mitm_ind(g: &Graph, c: Option<&CardinalityFunction>) -> BigUint {
    let m = masks(g);
    let n = m.ids.len();
    assert!(
        n <= MITM_CAP,
        "meet-in-the-middle limited to {MITM_CAP} vertices"
    );
    let h = n / 2;
    let k = n - h;
    let w = weights(&m, c);
    let high_adj: Vec<u32> = m.adj.iter().map(|a| a >> h).collect();
    let low_mask = (1u32 << h) - 1;
    match w {
        None => {
            let mut table = vec![0u64; 1 << k];
            for y in 0..(1u32 << k) {
                if independent_shifted(&high_adj[h..], y) {
                    table[y as usize] = 1;
                }
            }
            zeta(&mut table, k, |a, b| *a += *b);
            let mut total: u64 = 0;
            for x in 0..(1u32 << h) {
                if !independent(&m.adj, x) {
                    continue;
                }
                let blocked = blocked_high(&high_adj, x, h);
                total += table[(!blocked & ((1u32 << k) - 1)) as usize];
            }
            BigUint::from(total)
        }
        Some(w) => {
            let mut table = vec![BigUint::zero(); 1 << k];
            for y in 0..(1u32 << k) {
                if independent_shifted(&high_adj[h..], y) {
                    table[y as usize] = set_weight(&w, y << h, h, n);
                }
            }
            zeta(&mut table, k, |a, b| *a += b);
            let mut total = BigUint::zero();
            for x in 0..(1u32 << h) {
                if !independent(&m.adj, x & low_mask) {
                    continue;
                }
                let wx = set_weight(&w, x, 0, h);
                if wx.is_zero() {
                    continue;
                }
                let blocked = blocked_high(&high_adj, x, h);
                total += wx * &table[(!blocked & ((1u32 << k) - 1)) as usize];
            }
            total
        }
    }
}

fn independent_shifted(adj_high: &[u32], set: u32) -> bool {
    let mut rest = set;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if adj_high[v] & set != 0 {
            return false;
        }
    }
    true
}

fn blocked_high(high_adj: &[u32], low_set: u32, h: usize) -> u32 {
    let mut blocked = 0;
    for v in 0..h {
        if low_set >> v & 1 == 1 {
            blocked |= high_adj[v];
        }
    }
    blocked
}

/// In-place subset-sum transform: `t[Y] = Σ_{X ⊆ Y} t[X]`.
fn zeta<T: Clone>(t: &mut [T], k: usize, add: impl Fn(&mut T, &T)) {
    for bit in 0..k {
        for y in 0..t.len() {
            if y >> bit & 1 == 1 {
                let lower = t[y ^ (1 << bit)].clone();
                add(&mut t[y], &lower);
            }
        }
    }
}

/// Chromatic number by dynamic programming over vertex subsets.
pub fn brute_force_chromatic(g: &Graph) -> Result<usize, OracleError> {
    let n = g.n();
    if n > CHROMATIC_CAP {
        return Err(OracleError::TooLarge {
            n,
            cap: CHROMATIC_CAP,
        });
    }
    let m = masks(g);
    let full = (1usize << n) - 1;
    let indep: Vec<bool> = (0..=full).map(|s| independent(&m.adj, s as u32)).collect();
    let mut best = vec![usize::MAX; full + 1];
    best[0] = 0;
    for set in 1..=full {
        let low = set & set.wrapping_neg();
        let rest = set ^ low;
        // color class containing the lowest vertex: low ∪ sub for sub ⊆ rest
        let mut sub = rest;
        loop {
            let class = sub | low;
            if indep[class] {
                let prev = best[set ^ class];
                if prev != usize::MAX && prev + 1 < best[set] {
                    best[set] = prev + 1;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    Ok(best[full])
}

/// Coefficients `a_0..a_α` of the independence polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndependencePolynomial {
    pub coefficients: Vec<u64>,
}

impl IndependencePolynomial {
    pub fn total(&self) -> u64 {
        self.coefficients.iter().sum()
    }
}

pub fn independence_polynomial(g: &Graph) -> Result<IndependencePolynomial, OracleError> {
    let n = g.n();
    if n > ENUMERATION_CAP {
        return Err(OracleError::TooLarge {
            n,
            cap: ENUMERATION_CAP,
        });
    }
    let m = masks(g);
    let mut coefficients = vec![0u64; n + 1];
    for set in 0..(1u32 << n) {
        if independent(&m.adj, set) {
            coefficients[set.count_ones() as usize] += 1;
        }
    }
    while coefficients.len() > 1 && *coefficients.last().unwrap() == 0 {
        coefficients.pop();
    }
    Ok(IndependencePolynomial { coefficients })
}
