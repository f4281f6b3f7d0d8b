//! Chromatic number by inclusion–exclusion over independent-set counts of
//! induced subgraphs.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::ColoringError;
use crate::graph::{Graph, Vertex};
use crate::reductions::CardinalityFunction;
use crate::solver::{count_with, SolveOptions};

pub const COLORING_CAP: usize = 24;

fn check_cap(g: &Graph) -> Result<(), ColoringError> {
    if g.n() > COLORING_CAP {
        return Err(ColoringError::CapExceeded {
            n: g.n(),
            cap: COLORING_CAP,
        });
    }
    Ok(())
}

/// Folds `f(acc, |X|, s(X))` over every subset `X` of the live vertices,
/// where `s(X) = ind(G[X])`. The range of subsets is cut into chunks walked
/// in Gray-code order; with `opts.parallel` the chunks run on a worker pool
/// and their accumulators are combined with `merge`.
fn fold_subsets<A: Send>(
    g: &Graph,
    opts: &SolveOptions,
    init: impl Fn() -> A + Sync,
    f: impl Fn(&mut A, usize, &BigUint) + Sync,
    merge: impl Fn(A, A) -> A + Sync,
) -> A {
    let ids: Vec<Vertex> = g.vertices().collect();
    let n = ids.len();
    let inner = SolveOptions {
        parallel: false,
        ..opts.clone()
    };
    let total = 1u64 << n;
    let chunk = |lo: u64, hi: u64| {
        let unit = CardinalityFunction::unit(g.capacity());
        let mut gone = vec![true; g.capacity()];
        let gray = lo ^ (lo >> 1);
        let mut size = 0usize;
        for (bit, &v) in ids.iter().enumerate() {
            if gray >> bit & 1 == 1 {
                gone[v as usize] = false;
                size += 1;
            }
        }
        let mut acc = init();
        for i in lo..hi {
            if i > lo {
                let v = ids[i.trailing_zeros() as usize] as usize;
                gone[v] = !gone[v];
                if gone[v] {
                    size -= 1;
                } else {
                    size += 1;
                }
            }
            let s = if size == 0 {
                BigUint::one()
            } else {
                count_with(&g.restrict_mask(&gone), &unit, &inner).0
            };
            f(&mut acc, size, &s);
        }
        acc
    };
    if !opts.parallel || n < 8 {
        return chunk(0, total);
    }
    let pieces = 256u64.min(total);
    let step = total / pieces;
    let run = || {
        (0..pieces)
            .into_par_iter()
            .map(|p| chunk(p * step, (p + 1) * step))
            .reduce(&init, &merge)
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = opts.threads {
        builder = builder.num_threads(t.max(1));
    }
    match builder.build() {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    }
}

/// `Σ_{X ⊆ V} (−1)^{n−|X|} s(X)^k`; positive exactly when `g` is
/// `k`-colorable.
pub fn k_cover_count(g: &Graph, k: u32) -> Result<BigInt, ColoringError> {
    check_cap(g)?;
    let n = g.n();
    Ok(fold_subsets(
        g,
        &SolveOptions::default(),
        BigInt::zero,
        |total, size, s| {
            let term = BigInt::from(s.pow(k));
            if (n - size).is_multiple_of(2) {
                *total += term;
            } else {
                *total -= term;
            }
        },
        |a, b| a + b,
    ))
}

fn is_bipartite(g: &Graph) -> bool {
    let mut color = vec![u8::MAX; g.capacity()];
    for s in g.vertices() {
        if color[s as usize] != u8::MAX {
            continue;
        }
        color[s as usize] = 0;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &u in g.neighbors(v) {
                if color[u as usize] == u8::MAX {
                    color[u as usize] = 1 - color[v as usize];
                    stack.push(u);
                } else if color[u as usize] == color[v as usize] {
                    return false;
                }
            }
        }
    }
    true
}

pub fn chromatic_number(g: &Graph) -> Result<usize, ColoringError> {
    chromatic_number_with(g, &SolveOptions::default())
}

/// Per component: 0 for no vertices, 1 without edges, 2 when bipartite,
/// otherwise the smallest `k ≥ 3` with a positive cover count. One pass over
/// the subsets accumulates the sums for every `k` at once.
pub fn chromatic_number_with(g: &Graph, opts: &SolveOptions) -> Result<usize, ColoringError> {
    check_cap(g)?;
    let mut best = 0;
    for comp in g.components() {
        let h = g.induced(&comp);
        best = best.max(component_chromatic(&h, opts));
    }
    Ok(best)
}

fn component_chromatic(g: &Graph, opts: &SolveOptions) -> usize {
    let n = g.n();
    if n == 0 {
        return 0;
    }
    if g.m() == 0 {
        return 1;
    }
    if is_bipartite(g) {
        return 2;
    }
    // sums[k - 3] accumulates the cover count for k colors
    let sums = fold_subsets(
        g,
        opts,
        || vec![BigInt::zero(); n - 2],
        |sums, size, s| {
            let s = BigInt::from(s.clone());
            let mut power = s.pow(3);
            let negative = (n - size) % 2 == 1;
            for acc in sums.iter_mut() {
                if negative {
                    *acc -= &power;
                } else {
                    *acc += &power;
                }
                power *= &s;
            }
        },
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        },
    );
    sums.iter()
        .position(|x| x.is_positive())
        .map(|i| i + 3)
        .unwrap_or(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{generate, GraphSpec};

    fn gen(s: &str) -> Graph {
        generate(&s.parse::<GraphSpec>().unwrap()).unwrap()
    }

    #[test]
    fn cover_counts() {
        let k2 = gen("path(2)");
        assert_eq!(k_cover_count(&k2, 1).unwrap(), BigInt::zero());
        assert_eq!(k_cover_count(&k2, 2).unwrap(), BigInt::from(2));
        assert_eq!(k_cover_count(&Graph::empty(1), 1).unwrap(), BigInt::one());
    }

    #[test]
    fn fixtures() {
        assert_eq!(chromatic_number(&gen("complete(5)")).unwrap(), 5);
        assert_eq!(chromatic_number(&gen("cycle(7)")).unwrap(), 3);
        assert_eq!(chromatic_number(&gen("petersen")).unwrap(), 3);
        assert_eq!(chromatic_number(&Graph::empty(0)).unwrap(), 0);
        assert_eq!(chromatic_number(&Graph::empty(3)).unwrap(), 1);
    }
}
