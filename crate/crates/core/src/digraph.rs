use serde::{Deserialize, Serialize};

/// Largest digraph the bitmask representation supports.
pub const MAX_VERTICES: usize = 32;

/// Side-information digraph on vertices `0..n`.
///
/// Arc `(u, v)` means receiver `u` knows the message requested by receiver `v`.
/// Out-neighbourhoods are stored as bitmasks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Digraph {
    n: usize,
    out: Vec<u32>,
}

impl Digraph {
    pub fn empty(n: usize) -> Digraph {
        assert!(n <= MAX_VERTICES, "at most {MAX_VERTICES} vertices");
        Digraph { n, out: vec![0; n] }
    }

    /// Builds from out-neighbour lists; self-loops and out-of-range entries panic.
    pub fn from_out_lists(lists: &[Vec<usize>]) -> Digraph {
        let mut d = Digraph::empty(lists.len());
        for (u, list) in lists.iter().enumerate() {
            for &v in list {
                d.add_arc(u, v);
            }
        }
        d
    }

    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Digraph {
        let mut d = Digraph::empty(n);
        for &(u, v) in arcs {
            d.add_arc(u, v);
        }
        d
    }

    /// Every vertex knows every other message.
    pub fn complete(n: usize) -> Digraph {
        let mut d = Digraph::empty(n);
        for u in 0..n {
            d.out[u] = full_mask(n) & !(1 << u);
        }
        d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_arc(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n && u != v, "bad arc ({u},{v})");
        self.out[u] |= 1 << v;
    }

    pub fn remove_arc(&mut self, u: usize, v: usize) {
        self.out[u] &= !(1 << v);
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.out[u] >> v & 1 == 1
    }

    pub fn out_mask(&self, u: usize) -> u32 {
        self.out[u]
    }

    pub fn out_neighbors(&self, u: usize) -> Vec<usize> {
        bits(self.out[u]).collect()
    }

    pub fn arcs(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| bits(self.out[u]).map(move |v| (u, v)))
            .collect()
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(|m| m.count_ones() as usize).sum()
    }

    /// Sub-digraph induced by `vertices`, relabelled `0..k` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Digraph {
        let mut d = Digraph::empty(vertices.len());
        for (a, &u) in vertices.iter().enumerate() {
            for (b, &v) in vertices.iter().enumerate() {
                if a != b && self.has_arc(u, v) {
                    d.add_arc(a, b);
                }
            }
        }
        d
    }

    /// Reachability closure: bit `v` of entry `u` is set iff `v` is reachable from `u`
    /// by a path of length at least zero.
    pub fn reachability(&self) -> Vec<u32> {
        let mut reach: Vec<u32> = (0..self.n).map(|u| self.out[u] | 1 << u).collect();
        loop {
            let mut changed = false;
            for u in 0..self.n {
                let mut r = reach[u];
                for v in bits(reach[u]) {
                    r |= reach[v];
                }
                if r != reach[u] {
                    reach[u] = r;
                    changed = true;
                }
            }
            if !changed {
                return reach;
            }
        }
    }

    /// Strongly connected components in a topological order of the condensation
    /// (sources first). Each component is sorted ascending.
    pub fn sccs(&self) -> Vec<Vec<usize>> {
        let reach = self.reachability();
        let mut seen = 0u32;
        let mut comps: Vec<(u32, Vec<usize>)> = Vec::new();
        for u in 0..self.n {
            if seen >> u & 1 == 1 {
                continue;
            }
            let comp: Vec<usize> = (0..self.n)
                .filter(|&v| reach[u] >> v & 1 == 1 && reach[v] >> u & 1 == 1)
                .collect();
            for &v in &comp {
                seen |= 1 << v;
            }
            comps.push((reach[u], comp));
        }
        // A component reaching more vertices comes earlier; ties cannot reach each other.
        comps.sort_by(|a, b| {
            b.0.count_ones()
                .cmp(&a.0.count_ones())
                .then_with(|| a.1[0].cmp(&b.1[0]))
        });
        comps.into_iter().map(|(_, c)| c).collect()
    }

    pub fn is_acyclic(&self) -> bool {
        self.sccs().iter().all(|c| c.len() == 1)
    }

    /// True iff some vertex of `from` knows some message of `to`.
    pub fn interacts(&self, from: &[usize], to: &[usize]) -> bool {
        let to_mask = mask_of(to);
        from.iter().any(|&u| self.out[u] & to_mask != 0)
    }

    /// True iff every vertex of `from` knows every message of `to`.
    pub fn fully_knows(&self, from: &[usize], to: &[usize]) -> bool {
        let to_mask = mask_of(to);
        from.iter().all(|&u| self.out[u] & to_mask == to_mask)
    }
}

pub(crate) fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

pub(crate) fn mask_of(vertices: &[usize]) -> u32 {
    vertices.iter().fold(0, |m, &v| m | 1 << v)
}

/// Indices of the set bits of `m`, ascending.
pub(crate) fn bits(mut m: u32) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(v)
        }
    })
}
