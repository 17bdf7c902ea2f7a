//! Brute-force reference implementations over algebras with at most
//! [`ORACLE_ATOMS`](crate::ORACLE_ATOMS) atoms. Elements are `u32` atom masks.
//! Nothing here shares code with the production paths it checks.

use std::collections::BTreeSet;

/// All elements of the subalgebra generated by `gens` inside the power set
/// of `n` atoms, by closing under meet, join and complement.
pub fn closure(n: usize, gens: &[u32]) -> Vec<u32> {
    assert!(n <= crate::ORACLE_ATOMS);
    let one = full(n);
    let mut set: BTreeSet<u32> = BTreeSet::new();
    let mut frontier = vec![0, one];
    frontier.extend(gens.iter().copied());
    while let Some(x) = frontier.pop() {
        if !set.insert(x) {
            continue;
        }
        frontier.push(!x & one);
        let existing: Vec<u32> = set.iter().copied().collect();
        for y in existing {
            for z in [x & y, x | y] {
                if !set.contains(&z) {
                    frontier.push(z);
                }
            }
        }
    }
    set.into_iter().collect()
}

pub fn full(n: usize) -> u32 {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Atoms (minimal nonzero elements) of a finite subalgebra given by its
/// element list, sorted by least atom.
pub fn subalgebra_atoms(elems: &[u32]) -> Vec<u32> {
    let mut atoms: Vec<u32> = elems
        .iter()
        .copied()
        .filter(|&a| a != 0 && !elems.iter().any(|&b| b != 0 && b != a && b & !a == 0))
        .collect();
    atoms.sort_by_key(|a| a.trailing_zeros());
    atoms
}

/// All elements of the subalgebra whose atoms are the given disjoint blocks.
pub fn elements_of_blocks(blocks: &[u32]) -> Vec<u32> {
    assert!(blocks.len() <= 20);
    (0u32..1 << blocks.len())
        .map(|m| {
            blocks
                .iter()
                .enumerate()
                .filter(|(i, _)| m >> i & 1 == 1)
                .fold(0, |acc, (_, b)| acc | b)
        })
        .collect()
}

/// `max { a ∈ elems : a ≤ b }`; panics if the maximum does not exist.
pub fn lpr(elems: &[u32], b: u32) -> u32 {
    let below: Vec<u32> = elems.iter().copied().filter(|a| a & !b == 0).collect();
    let top = below.iter().fold(0, |acc, a| acc | a);
    assert!(below.contains(&top), "no largest element below {b:#x}");
    top
}

/// `min { a ∈ elems : b ≤ a }`.
pub fn upr(elems: &[u32], b: u32) -> u32 {
    let above: Vec<u32> = elems.iter().copied().filter(|a| b & !a == 0).collect();
    let bot = above.iter().fold(u32::MAX, |acc, a| acc & a);
    assert!(above.contains(&bot), "no least element above {b:#x}");
    bot
}

/// Every nonzero subalgebra element meets every sign cell of `xs`
/// (`x^0 = x`, `x^1 = -x`).
pub fn independent(n: usize, elems: &[u32], xs: &[u32]) -> bool {
    let one = full(n);
    (0u32..1 << xs.len()).all(|signs| {
        let cell = xs.iter().enumerate().fold(one, |acc, (i, &x)| {
            acc & if signs >> i & 1 == 0 { x } else { !x & one }
        });
        elems.iter().all(|&a| a == 0 || a & cell != 0)
    })
}

/// Exhaustive search for a family independent over the subalgebra `elems`
/// that together with it generates everything. Returns the family size.
pub fn free_search(n: usize, elems: &[u32]) -> Option<usize> {
    assert!(n <= 8, "free_search is exhaustive; keep n <= 8");
    let one = full(n);
    let blocks = subalgebra_atoms(elems);
    let mut m = 0;
    while blocks.len() << m <= n {
        if blocks.len() << m == n {
            let cands: Vec<u32> = (1..one).filter(|x| x & 1 == 0).collect();
            let mut fam = Vec::new();
            if search(n, elems, &blocks, &cands, 0, m, &mut fam) {
                return Some(m);
            }
        }
        m += 1;
    }
    None
}

fn search(
    n: usize,
    elems: &[u32],
    blocks: &[u32],
    cands: &[u32],
    from: usize,
    m: usize,
    fam: &mut Vec<u32>,
) -> bool {
    if fam.len() == m {
        let mut gens = blocks.to_vec();
        gens.extend(fam.iter().copied());
        return closure(n, &gens).len() == 1 << n;
    }
    for i in from..cands.len() {
        fam.push(cands[i]);
        if independent(n, elems, fam) && search(n, elems, blocks, cands, i + 1, m, fam) {
            return true;
        }
        fam.pop();
    }
    false
}

/// Satisfying assignments of `g` boolean variables under implications
/// `lower -> upper`, as assignment masks in increasing order. These are the
/// atoms of the free algebra on `g` generators modulo the inequalities.
pub fn implication_models(g: usize, implications: &[(usize, usize)]) -> Vec<u32> {
    assert!(g <= 20);
    (0u32..1 << g)
        .filter(|&t| {
            implications
                .iter()
                .all(|&(lo, hi)| t >> lo & 1 == 0 || t >> hi & 1 == 1)
        })
        .collect()
}

/// Size of a maximum matching of a bipartite graph (left `i` adjacent to
/// the right vertices in `adj[i]`), by trying every injective choice.
pub fn max_matching(adj: &[Vec<usize>]) -> usize {
    fn go(adj: &[Vec<usize>], i: usize, used: &mut BTreeSet<usize>) -> usize {
        if i == adj.len() {
            return 0;
        }
        let mut best = go(adj, i + 1, used);
        for &r in &adj[i] {
            if used.insert(r) {
                best = best.max(1 + go(adj, i + 1, used));
                used.remove(&r);
            }
        }
        best
    }
    go(adj, 0, &mut BTreeSet::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_of_one_generator_in_two_atoms() {
        assert_eq!(closure(2, &[1]), vec![0, 1, 2, 3]);
        assert_eq!(closure(3, &[1]), vec![0, 1, 6, 7]);
    }

    #[test]
    fn lpr_in_free_two() {
        // Fr(2): g0 = atoms {1,3} = 0b1010, g1 = {2,3} = 0b1100.
        let a = closure(4, &[0b1010]);
        assert_eq!(lpr(&a, 0b1000), 0);
        assert_eq!(lpr(&a, 0b1110), 0b1010);
        assert_eq!(upr(&a, 0b1000), 0b1010);
    }

    #[test]
    fn free_search_block_sizes() {
        assert_eq!(free_search(4, &closure(4, &[0b1010])), Some(1));
        assert_eq!(free_search(3, &closure(3, &[1])), None);
    }

    #[test]
    fn matching_small() {
        assert_eq!(max_matching(&[vec![0], vec![0]]), 1);
        assert_eq!(max_matching(&[vec![0, 1], vec![0]]), 2);
    }
}
