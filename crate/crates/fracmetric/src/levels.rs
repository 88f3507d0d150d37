//! Level-`m` vertex meshes: every address `(word, j)` with `|word| = m` is
//! canonicalized into an identification class.
//!
//! Identifications at level `m` are generated by the level-1 glues applied
//! under every prefix, combined with the fixed-point rule that lets an
//! identification at a shallower level ride along by appending the boundary
//! letter: for a prefix `u` of length `l < m` and a glue
//! `(i,j) = (i',j')`, the addresses `u·i·j^(m-l-1) . j` and
//! `u·i'·j'^(m-l-1) . j'` are joined.

use crate::spec::FractalSpec;
use crate::word::{Address, Word};
use thiserror::Error;

/// Straightforward union-find with path halving and union by size.
pub(crate) struct UnionFind {
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

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let grandparent = self.parent[self.parent[x] as usize];
            self.parent[x] = grandparent;
            x = grandparent as usize;
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra as u32;
        self.size[ra] += self.size[rb];
    }
}

/// A canonical identification class at a fixed level.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct VertexId {
    pub level: u32,
    pub class: u32,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LevelError {
    #[error("address has level {found}, expected {expected}")]
    LevelMismatch { found: usize, expected: usize },
    #[error("level {level} needs {addresses} addresses, above the supported limit")]
    LevelTooLarge { level: usize, addresses: u128 },
    #[error("word of length {len} does not fit in level {level}")]
    WordTooLong { len: usize, level: usize },
}

const MAX_ADDRESSES: u128 = 1 << 27;

/// The canonicalized vertex set of one level, with class membership data.
pub struct LevelVertices {
    cell_count: usize,
    boundary_count: usize,
    level: usize,
    /// k^i for i = 0..=level.
    powers: Vec<u64>,
    /// Repunit values (k^len - 1)/(k - 1) for len = 0..=level; the base-k
    /// number whose digits are `len` copies of 1.
    repunits: Vec<u64>,
    class_of: Vec<u32>,
    member_offsets: Vec<u32>,
    members: Vec<u32>,
}

impl LevelVertices {
    pub fn build(spec: &FractalSpec, level: usize) -> Result<Self, LevelError> {
        let k = spec.cell_count();
        let n = spec.boundary_count();

        let mut count: u128 = n as u128;
        for _ in 0..level {
            count *= k as u128;
            if count > MAX_ADDRESSES {
                return Err(LevelError::LevelTooLarge {
                    level,
                    addresses: count,
                });
            }
        }
        let n_addr = count as usize;

        let mut powers = Vec::with_capacity(level + 1);
        let mut repunits = Vec::with_capacity(level + 1);
        powers.push(1u64);
        repunits.push(0u64);
        for i in 1..=level {
            powers.push(powers[i - 1] * k as u64);
            repunits.push(repunits[i - 1] * k as u64 + 1);
        }

        let mut uf = UnionFind::new(n_addr);
        for prefix_len in 0..level {
            let tail = level - prefix_len - 1;
            for prefix in 0..powers[prefix_len] {
                let base = prefix * k as u64;
                for glue in spec.glues() {
                    let wa = (base + glue.a.cell as u64) * powers[tail]
                        + repunits[tail] * glue.a.corner as u64;
                    let wb = (base + glue.b.cell as u64) * powers[tail]
                        + repunits[tail] * glue.b.corner as u64;
                    let ia = wa as usize * n + glue.a.corner as usize;
                    let ib = wb as usize * n + glue.b.corner as usize;
                    uf.union(ia, ib);
                }
            }
        }

        // Dense class ids in order of least member address, so class 0 is the
        // lexicographically first address.
        let mut class_of = vec![u32::MAX; n_addr];
        let mut class_sizes = Vec::new();
        for addr in 0..n_addr {
            let root = uf.find(addr);
            if class_of[root] == u32::MAX {
                class_of[root] = class_sizes.len() as u32;
                class_sizes.push(0u32);
            }
            class_of[addr] = class_of[root];
            class_sizes[class_of[addr] as usize] += 1;
        }

        let class_count = class_sizes.len();
        let mut member_offsets = vec![0u32; class_count + 1];
        for (c, &s) in class_sizes.iter().enumerate() {
            member_offsets[c + 1] = member_offsets[c] + s;
        }
        let mut members = vec![0u32; n_addr];
        let mut cursor = member_offsets.clone();
        for addr in 0..n_addr {
            let c = class_of[addr] as usize;
            members[cursor[c] as usize] = addr as u32;
            cursor[c] += 1;
        }

        Ok(LevelVertices {
            cell_count: k,
            boundary_count: n,
            level,
            powers,
            repunits,
            class_of,
            member_offsets,
            members,
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn cell_count(&self) -> usize {
        self.cell_count
    }

    pub fn boundary_count(&self) -> usize {
        self.boundary_count
    }

    pub fn vertex_count(&self) -> usize {
        self.member_offsets.len() - 1
    }

    fn word_number(&self, word: &Word) -> u64 {
        let mut acc = 0u64;
        for &letter in word.letters() {
            acc = acc * self.cell_count as u64 + letter as u64;
        }
        acc
    }

    fn address_index(&self, addr: &Address) -> usize {
        self.word_number(&addr.word) as usize * self.boundary_count + addr.boundary as usize
    }

    fn decode_address(&self, index: u32) -> Address {
        let n = self.boundary_count as u32;
        let boundary = (index % n) as u16;
        let mut word_num = (index / n) as u64;
        let mut letters = vec![0u16; self.level];
        for slot in (0..self.level).rev() {
            letters[slot] = (word_num % self.cell_count as u64) as u16;
            word_num /= self.cell_count as u64;
        }
        Address::new(Word::from_letters(letters), boundary)
    }

    /// Maps an address of exactly this level to its class.
    pub fn canonicalize(&self, addr: &Address) -> Result<VertexId, LevelError> {
        if addr.level() != self.level {
            return Err(LevelError::LevelMismatch {
                found: addr.level(),
                expected: self.level,
            });
        }
        Ok(VertexId {
            level: self.level as u32,
            class: self.class_of[self.address_index(addr)],
        })
    }

    /// Maps an address of level at most this one, lifting it first.
    pub fn canonicalize_lifted(&self, addr: &Address) -> Result<VertexId, LevelError> {
        let lifted = addr
            .lift(self.level)
            .ok_or(LevelError::LevelMismatch {
                found: addr.level(),
                expected: self.level,
            })?;
        self.canonicalize(&lifted)
    }

    /// Class of a lifted corner without allocating the word, given the base
    /// word as a number.
    pub(crate) fn corner_class(&self, word_num: u64, word_len: usize, corner: u16) -> u32 {
        let tail = self.level - word_len;
        let full = word_num * self.powers[tail] + self.repunits[tail] * corner as u64;
        self.class_of[full as usize * self.boundary_count + corner as usize]
    }

    /// The boundary point `P_j` at this level.
    pub fn boundary_vertex(&self, j: u16) -> VertexId {
        VertexId {
            level: self.level as u32,
            class: self.corner_class(0, 0, j),
        }
    }

    /// The lexicographically least member address of a class.
    pub fn canonical_address(&self, v: VertexId) -> Address {
        debug_assert_eq!(v.level as usize, self.level);
        self.decode_address(self.members[self.member_offsets[v.class as usize] as usize])
    }

    /// All member addresses of a class, in lexicographic order.
    pub fn class_members(&self, v: VertexId) -> impl Iterator<Item = Address> + '_ {
        let lo = self.member_offsets[v.class as usize] as usize;
        let hi = self.member_offsets[v.class as usize + 1] as usize;
        self.members[lo..hi].iter().map(|&i| self.decode_address(i))
    }

    /// Whether the class has a member address whose word starts with `word`.
    pub fn class_in_cell(&self, v: VertexId, word: &Word) -> Result<bool, LevelError> {
        let (lo_idx, hi_idx) = self.cell_address_range(word)?;
        let lo = self.member_offsets[v.class as usize] as usize;
        let hi = self.member_offsets[v.class as usize + 1] as usize;
        let slice = &self.members[lo..hi];
        let start = slice.partition_point(|&a| a < lo_idx);
        Ok(start < slice.len() && slice[start] < hi_idx)
    }

    fn cell_address_range(&self, word: &Word) -> Result<(u32, u32), LevelError> {
        if word.len() > self.level {
            return Err(LevelError::WordTooLong {
                len: word.len(),
                level: self.level,
            });
        }
        let tail = self.level - word.len();
        let lo = self.word_number(word) * self.powers[tail] * self.boundary_count as u64;
        let span = self.powers[tail] * self.boundary_count as u64;
        Ok((lo as u32, (lo + span) as u32))
    }

    /// All vertices of this level lying in the copy named by `word`.
    pub fn cell_vertices(&self, word: &Word) -> Result<Vec<VertexId>, LevelError> {
        let (lo, hi) = self.cell_address_range(word)?;
        let mut classes: Vec<u32> = (lo..hi).map(|i| self.class_of[i as usize]).collect();
        classes.sort_unstable();
        classes.dedup();
        Ok(classes
            .into_iter()
            .map(|class| VertexId {
                level: self.level as u32,
                class,
            })
            .collect())
    }

    /// The `N` corner vertices of the copy named by `word` (its boundary set).
    pub fn cell_corners(&self, word: &Word) -> Result<Vec<VertexId>, LevelError> {
        if word.len() > self.level {
            return Err(LevelError::WordTooLong {
                len: word.len(),
                level: self.level,
            });
        }
        let word_num = self.word_number(word);
        Ok((0..self.boundary_count)
            .map(|j| VertexId {
                level: self.level as u32,
                class: self.corner_class(word_num, word.len(), j as u16),
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::parse_spec;

    fn gasket() -> FractalSpec {
        parse_spec(
            "fractal gasket\ncells 3\nboundary 3\nglue 1.2 = 2.1\nglue 1.3 = 3.1\nglue 2.3 = 3.2\n",
        )
        .unwrap()
    }

    fn interval() -> FractalSpec {
        parse_spec("fractal interval\ncells 2\nboundary 2\nglue 1.2 = 2.1\n").unwrap()
    }

    fn addr(text: &str, k: usize, n: usize) -> Address {
        Address::parse(text, k, n).unwrap()
    }

    #[test]
    fn interval_level_1_has_three_vertices() {
        let lv = LevelVertices::build(&interval(), 1).unwrap();
        assert_eq!(lv.vertex_count(), 3);
        let m1 = lv.canonicalize(&addr("1.2", 2, 2)).unwrap();
        let m2 = lv.canonicalize(&addr("2.1", 2, 2)).unwrap();
        assert_eq!(m1, m2);
    }

    #[test]
    fn gasket_counts_by_level() {
        let spec = gasket();
        assert_eq!(LevelVertices::build(&spec, 0).unwrap().vertex_count(), 3);
        assert_eq!(LevelVertices::build(&spec, 1).unwrap().vertex_count(), 6);
        assert_eq!(LevelVertices::build(&spec, 2).unwrap().vertex_count(), 15);
    }

    #[test]
    fn glued_addresses_share_a_class_at_level_2() {
        let spec = gasket();
        let lv = LevelVertices::build(&spec, 2).unwrap();
        let a = lv.canonicalize(&addr("11.2", 3, 3)).unwrap();
        let b = lv.canonicalize(&addr("12.1", 3, 3)).unwrap();
        assert_eq!(a, b);
        // The level-1 gluing point also exists at level 2 through lifting.
        let c = lv.canonicalize(&addr("12.2", 3, 3)).unwrap();
        let d = lv.canonicalize(&addr("21.1", 3, 3)).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn fixed_points_have_singleton_classes() {
        let spec = gasket();
        let lv = LevelVertices::build(&spec, 3).unwrap();
        for j in 0..3u16 {
            let a = addr(&format!("e.{}", j + 1), 3, 3).lift(3).unwrap();
            let v = lv.canonicalize(&a).unwrap();
            assert_eq!(lv.canonical_address(v), a);
            assert_eq!(lv.class_members(v).count(), 1);
            assert_eq!(lv.boundary_vertex(j), v);
        }
    }

    #[test]
    fn canonicalize_rejects_level_mismatch() {
        let lv = LevelVertices::build(&gasket(), 2).unwrap();
        let err = lv.canonicalize(&addr("1.2", 3, 3)).unwrap_err();
        assert!(matches!(err, LevelError::LevelMismatch { found: 1, expected: 2 }));
    }

    #[test]
    fn cell_vertices_examples() {
        let spec = gasket();
        let lv1 = LevelVertices::build(&spec, 1).unwrap();
        let w1 = Word::parse("1", 3).unwrap();
        assert_eq!(lv1.cell_vertices(&w1).unwrap().len(), 3);
        let lv2 = LevelVertices::build(&spec, 2).unwrap();
        assert_eq!(lv2.cell_vertices(&w1).unwrap().len(), 6);
        assert_eq!(
            lv2.cell_vertices(&Word::empty()).unwrap().len(),
            lv2.vertex_count()
        );
        assert!(lv1.cell_vertices(&Word::parse("11", 3).unwrap()).is_err());
    }

    #[test]
    fn class_in_cell_matches_cell_vertices() {
        let spec = gasket();
        let lv = LevelVertices::build(&spec, 2).unwrap();
        for w in ["1", "2", "3", "12", "31"] {
            let word = Word::parse(w, 3).unwrap();
            let inside = lv.cell_vertices(&word).unwrap();
            for class in 0..lv.vertex_count() as u32 {
                let v = VertexId { level: 2, class };
                assert_eq!(
                    lv.class_in_cell(v, &word).unwrap(),
                    inside.contains(&v),
                    "cell {w}, class {class}"
                );
            }
        }
    }

    #[test]
    fn vertex_count_stays_within_address_bound() {
        let spec = gasket();
        for m in 0..=3 {
            let lv = LevelVertices::build(&spec, m).unwrap();
            assert!(lv.vertex_count() <= 3 * 3usize.pow(m as u32));
        }
    }
}
