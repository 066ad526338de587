//! Coset enumeration over the trivial subgroup (HLT with coincidences).

use serde::Serialize;

use super::{Presentation, Word};

/// Right regular action of a finite group: `action[g][i]` is i·g.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CosetTable {
    pub order: usize,
    pub action: Vec<Vec<usize>>,
}

impl CosetTable {
    /// i·w for a word w.
    pub fn act(&self, mut i: usize, w: &Word) -> usize {
        for &(g, pos) in w {
            i = if pos {
                self.action[g][i]
            } else {
                self.action[g].iter().position(|&j| j == i).expect("permutation")
            };
        }
        i
    }

    /// Every generator acts by a permutation and every relator fixes every coset.
    pub fn verify(&self, p: &Presentation) -> bool {
        let perms = self.action.iter().all(|a| {
            let mut seen = vec![false; self.order];
            a.len() == self.order && a.iter().all(|&j| j < self.order && !std::mem::replace(&mut seen[j], true))
        });
        perms
            && self.action.len() == p.generators.len()
            && p.relators.iter().all(|r| (0..self.order).all(|i| self.act(i, r) == i))
    }
}

/// Default cap on cosets defined during enumeration.
pub const COSET_LIMIT: usize = 20_000;

struct Enum {
    table: Vec<Vec<Option<usize>>>,
    parent: Vec<usize>,
    queue: Vec<usize>,
}

impl Enum {
    fn rep(&mut self, mut c: usize) -> usize {
        let mut r = c;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    fn alive(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn define(&mut self, c: usize, x: usize) -> usize {
        let d = self.table.len();
        self.table.push(vec![None; self.table[0].len()]);
        self.parent.push(d);
        self.table[c][x] = Some(d);
        self.table[d][x ^ 1] = Some(c);
        d
    }

    fn merge(&mut self, k: usize, l: usize) {
        let (k, l) = (self.rep(k), self.rep(l));
        if k != l {
            let (a, b) = (k.min(l), k.max(l));
            self.parent[b] = a;
            self.queue.push(b);
        }
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let e = self.queue[i];
            i += 1;
            for x in 0..self.table[e].len() {
                let Some(f) = self.table[e][x].take() else { continue };
                self.table[f][x ^ 1] = None;
                let (e1, f1) = (self.rep(e), self.rep(f));
                if let Some(g) = self.table[e1][x] {
                    self.merge(f1, g);
                } else if let Some(g) = self.table[f1][x ^ 1] {
                    self.merge(e1, g);
                } else {
                    self.table[e1][x] = Some(f1);
                    self.table[f1][x ^ 1] = Some(e1);
                }
            }
        }
    }

    fn scan_and_fill(&mut self, c: usize, w: &[usize]) {
        if w.is_empty() {
            return;
        }
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0usize, w.len() as isize - 1);
        loop {
            while (i as isize) <= j {
                match self.table[f][w[i]] {
                    Some(g) => {
                        f = g;
                        i += 1;
                    }
                    None => break,
                }
            }
            if (i as isize) > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return;
            }
            while j >= i as isize {
                match self.table[b][w[j as usize] ^ 1] {
                    Some(g) => {
                        b = g;
                        j -= 1;
                    }
                    None => break,
                }
            }
            if j < i as isize {
                self.coincidence(f, b);
                return;
            }
            if j == i as isize {
                self.table[f][w[i]] = Some(b);
                self.table[b][w[i] ^ 1] = Some(f);
                return;
            }
            self.define(f, w[i]);
        }
    }
}

/// Enumerates the cosets of the trivial subgroup. `None` when more than
/// `limit` cosets get defined, which happens for every infinite group.
pub fn enumerate_cosets(p: &Presentation, limit: usize) -> Option<CosetTable> {
    let n = p.generators.len();
    if n == 0 {
        return Some(CosetTable {
            order: 1,
            action: Vec::new(),
        });
    }
    let col = |&(g, pos): &(usize, bool)| 2 * g + usize::from(!pos);
    let relators: Vec<Vec<usize>> = p.relators.iter().map(|r| r.iter().map(col).collect()).collect();
    let mut e = Enum {
        table: vec![vec![None; 2 * n]],
        parent: vec![0],
        queue: Vec::new(),
    };
    let mut c = 0;
    while c < e.table.len() {
        if e.table.len() > limit {
            return None;
        }
        for r in &relators {
            if !e.alive(c) {
                break;
            }
            e.scan_and_fill(c, r);
        }
        for x in 0..2 * n {
            if e.alive(c) && e.table[c][x].is_none() {
                e.define(c, x);
            }
        }
        c += 1;
    }
    let live: Vec<usize> = (0..e.table.len()).filter(|&c| e.alive(c)).collect();
    let mut renum = vec![usize::MAX; e.table.len()];
    for (i, &c) in live.iter().enumerate() {
        renum[c] = i;
    }
    let action = (0..n)
        .map(|g| live.iter().map(|&c| renum[e.table[c][2 * g].expect("complete table")]).collect())
        .collect();
    let t = CosetTable {
        order: live.len(),
        action,
    };
    t.verify(p).then_some(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{pi1_presentation, reduce_by_tree, SimplicialComplex};

    fn pres(relators: Vec<Word>, n: usize) -> Presentation {
        Presentation {
            generators: (0..n).map(|i| (i, i + 1)).collect(),
            relators,
        }
    }

    #[test]
    fn small_groups() {
        let c5 = pres(vec![vec![(0, true); 5]], 1);
        assert_eq!(enumerate_cosets(&c5, 1000).unwrap().order, 5);
        // ⟨a, b | a², b³, (ab)³⟩ = A₄
        let a4 = pres(
            vec![
                vec![(0, true); 2],
                vec![(1, true); 3],
                [(0, true), (1, true)].repeat(3),
            ],
            2,
        );
        assert_eq!(enumerate_cosets(&a4, 1000).unwrap().order, 12);
        // ⟨a, b | a b a⁻¹ b⁻¹⟩ = ℤ² is infinite
        let z2 = pres(vec![vec![(0, true), (1, true), (0, false), (1, false)]], 2);
        assert_eq!(enumerate_cosets(&z2, 500), None);
    }

    #[test]
    fn surface_groups() {
        let order = |k: SimplicialComplex| {
            enumerate_cosets(&pi1_presentation(&reduce_by_tree(&k, 0).unwrap()), 2000).map(|t| t.order)
        };
        assert_eq!(order(SimplicialComplex::sphere2()), Some(1));
        assert_eq!(order(SimplicialComplex::rp2_min()), Some(2));
        assert_eq!(order(SimplicialComplex::torus7()), None);
        assert_eq!(order(SimplicialComplex::circle(4).unwrap()), None);
    }
}
