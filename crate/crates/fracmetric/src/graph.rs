//! The labeled weighted graph on a level-`m` vertex mesh, with exact
//! shortest-path queries.
//!
//! For every word `w` with `|w| <= m` and every unordered pair of boundary
//! indices, the copies of the two boundary points under `w` are joined by one
//! edge. The edge remembers the ordered pair convention `(j1,j2)` with
//! `j1 < j2` and the word; its weight under a contraction vector is the word
//! weight, so refining a level never changes existing edges.

use crate::levels::{LevelError, LevelVertices, UnionFind, VertexId};
use crate::rational::{fmt_ratio, PolyRatio, Ratio};
use crate::spec::FractalSpec;
use crate::word::{BoundaryPair, Word};
use num_traits::Zero;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error(transparent)]
    Level(#[from] LevelError),
    #[error("vertex belongs to level {found}, graph is at level {expected}")]
    VertexLevel { found: u32, expected: u32 },
    #[error("no path between the requested vertices")]
    Unreachable,
    #[error("contraction vector has {found} entries, fractal has {expected} cells")]
    AlphaLength { found: usize, expected: usize },
}

/// One edge of the level graph. `a` is the copy of the smaller boundary
/// index: traversing `a -> b` carries the ordered label `(j1,j2)` and the
/// reverse traversal carries `(j2,j1)`.
#[derive(Clone, Debug)]
pub struct LabeledEdge {
    pub a: u32,
    pub b: u32,
    pub pair: BoundaryPair,
    pub word: Word,
}

impl LabeledEdge {
    pub fn weight(&self, alpha: &PolyRatio) -> Ratio {
        alpha.word_weight(&self.word)
    }
}

/// Adjacency entry: `forward` is true when the traversal goes `a -> b`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Arc {
    pub to: u32,
    pub edge: u32,
    pub forward: bool,
}

impl Arc {
    /// Ordered label carried by this traversal direction.
    pub fn label(&self, edges: &[LabeledEdge]) -> BoundaryPair {
        let pair = edges[self.edge as usize].pair;
        if self.forward {
            pair
        } else {
            pair.swapped()
        }
    }
}

pub struct LevelGraph {
    levels: LevelVertices,
    edges: Vec<LabeledEdge>,
    adj: Vec<Vec<Arc>>,
    endpoint_pairs: HashMap<(u32, u32), u32>,
}

impl LevelGraph {
    /// Builds the level-`m` graph. Intended for descriptions that pass
    /// validation; a closure that makes two labels share an endpoint pair is
    /// reported as a panic because it breaks the unique-representation
    /// invariant every downstream computation relies on.
    pub fn build(spec: &FractalSpec, level: usize) -> Result<Self, LevelError> {
        let levels = LevelVertices::build(spec, level)?;
        let k = spec.cell_count();
        let n = spec.boundary_count();

        let mut edges = Vec::new();
        let mut endpoint_pairs = HashMap::new();
        for len in 0..=level {
            let words = (k as u64).pow(len as u32);
            for word_num in 0..words {
                let corners: Vec<u32> = (0..n)
                    .map(|j| levels.corner_class(word_num, len, j as u16))
                    .collect();
                for j1 in 0..n {
                    for j2 in (j1 + 1)..n {
                        let (a, b) = (corners[j1], corners[j2]);
                        assert_ne!(
                            a, b,
                            "degenerate cell: two corners of the same copy coincide"
                        );
                        let key = (a.min(b), a.max(b));
                        let id = edges.len() as u32;
                        let previous = endpoint_pairs.insert(key, id);
                        assert!(
                            previous.is_none(),
                            "two edge labels share an endpoint pair; \
                             the glue closure lets two copies meet in more than one point"
                        );
                        edges.push(LabeledEdge {
                            a,
                            b,
                            pair: BoundaryPair::new(j1 as u16, j2 as u16),
                            word: decode_word(word_num, len, k),
                        });
                    }
                }
            }
        }

        let mut adj = vec![Vec::new(); levels.vertex_count()];
        for (id, edge) in edges.iter().enumerate() {
            adj[edge.a as usize].push(Arc {
                to: edge.b,
                edge: id as u32,
                forward: true,
            });
            adj[edge.b as usize].push(Arc {
                to: edge.a,
                edge: id as u32,
                forward: false,
            });
        }

        Ok(LevelGraph {
            levels,
            edges,
            adj,
            endpoint_pairs,
        })
    }

    pub fn level(&self) -> usize {
        self.levels.level()
    }

    pub fn levels(&self) -> &LevelVertices {
        &self.levels
    }

    pub fn vertex_count(&self) -> usize {
        self.levels.vertex_count()
    }

    pub fn edges(&self) -> &[LabeledEdge] {
        &self.edges
    }

    pub(crate) fn adjacency(&self) -> &[Vec<Arc>] {
        &self.adj
    }

    /// The unique edge joining two distinct vertices, if any.
    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<u32> {
        let key = (u.class.min(v.class), u.class.max(v.class));
        self.endpoint_pairs.get(&key).copied()
    }

    fn expect_alpha(&self, alpha: &PolyRatio) -> Result<(), GraphError> {
        if alpha.len() != self.levels.cell_count() {
            return Err(GraphError::AlphaLength {
                found: alpha.len(),
                expected: self.levels.cell_count(),
            });
        }
        Ok(())
    }

    fn expect_vertex(&self, v: VertexId) -> Result<u32, GraphError> {
        if v.level as usize != self.level() {
            return Err(GraphError::VertexLevel {
                found: v.level,
                expected: self.level() as u32,
            });
        }
        Ok(v.class)
    }

    pub(crate) fn edge_weights(&self, alpha: &PolyRatio) -> Vec<Ratio> {
        self.edges.iter().map(|e| e.weight(alpha)).collect()
    }

    /// Exact single-source shortest distances.
    pub fn distances_from(
        &self,
        alpha: &PolyRatio,
        source: VertexId,
    ) -> Result<Vec<Option<Ratio>>, GraphError> {
        self.expect_alpha(alpha)?;
        let s = self.expect_vertex(source)?;
        let weights = self.edge_weights(alpha);
        let sssp = sssp_by(
            &self.adj,
            s,
            |arc| weights[arc.edge as usize].clone(),
            None,
            SsspStop::All,
        );
        Ok(sssp.dist)
    }

    /// Exact shortest distance between two vertices of this level.
    pub fn shortest_distance(
        &self,
        alpha: &PolyRatio,
        a: VertexId,
        b: VertexId,
    ) -> Result<Ratio, GraphError> {
        self.expect_alpha(alpha)?;
        let s = self.expect_vertex(a)?;
        let t = self.expect_vertex(b)?;
        if s == t {
            return Ok(Ratio::zero());
        }
        let weights = self.edge_weights(alpha);
        let sssp = sssp_by(
            &self.adj,
            s,
            |arc| weights[arc.edge as usize].clone(),
            None,
            SsspStop::Target(t),
        );
        sssp.dist[t as usize].clone().ok_or(GraphError::Unreachable)
    }

    /// Largest exact distance between two vertices of the copy named by
    /// `word`, measured in the full graph (paths may leave the copy).
    pub fn cell_diameter(&self, alpha: &PolyRatio, word: &Word) -> Result<Ratio, GraphError> {
        self.expect_alpha(alpha)?;
        let members = self.levels.cell_vertices(word)?;
        let classes: Vec<u32> = members.iter().map(|v| v.class).collect();
        let weights = self.edge_weights(alpha);
        let mut best = Ratio::zero();
        for &s in &classes {
            let sssp = sssp_by(
                &self.adj,
                s,
                |arc| weights[arc.edge as usize].clone(),
                None,
                SsspStop::TargetSet(&classes),
            );
            for &t in &classes {
                if let Some(d) = &sssp.dist[t as usize] {
                    if *d > best {
                        best = d.clone();
                    }
                }
            }
        }
        Ok(best)
    }

    /// Connectivity in the sense of the mesh definition: only steps inside a
    /// common copy count, so edges with the empty word are ignored. A level-0
    /// graph therefore reports false.
    pub fn connectedness(&self) -> bool {
        let n = self.vertex_count();
        if n <= 1 {
            return true;
        }
        let mut uf = UnionFind::new(n);
        for edge in &self.edges {
            if !edge.word.is_empty() {
                uf.union(edge.a as usize, edge.b as usize);
            }
        }
        let root = uf.find(0);
        (1..n).all(|v| uf.find(v) == root)
    }

    /// DOT rendering; edge labels carry the ordered pair and word, plus the
    /// exact weight when a contraction vector is supplied.
    pub fn to_dot(&self, name: &str, alpha: Option<&PolyRatio>) -> String {
        let k = self.levels.cell_count();
        let mut out = String::new();
        out.push_str(&format!("graph \"{}\" {{\n", name.replace('"', "'")));
        for class in 0..self.vertex_count() as u32 {
            let v = VertexId {
                level: self.level() as u32,
                class,
            };
            out.push_str(&format!(
                "  n{} [label=\"{}\"];\n",
                class,
                self.levels.canonical_address(v).display(k)
            ));
        }
        for edge in &self.edges {
            let label = match alpha {
                Some(alpha) => format!(
                    "{}/{}/{}",
                    edge.pair,
                    edge.word.display(k),
                    fmt_ratio(&edge.weight(alpha))
                ),
                None => format!("{}/{}", edge.pair, edge.word.display(k)),
            };
            out.push_str(&format!(
                "  n{} -- n{} [label=\"{}\"];\n",
                edge.a, edge.b, label
            ));
        }
        out.push_str("}\n");
        out
    }
}

fn decode_word(word_num: u64, len: usize, k: usize) -> Word {
    let mut letters = vec![0u16; len];
    let mut rest = word_num;
    for slot in (0..len).rev() {
        letters[slot] = (rest % k as u64) as u16;
        rest /= k as u64;
    }
    Word::from_letters(letters)
}

pub(crate) enum SsspStop<'a> {
    All,
    Target(u32),
    /// Stop once every vertex in the (deduplicated) set is settled.
    TargetSet(&'a [u32]),
    /// Stop as soon as any vertex other than the source settles.
    FirstOther,
}

pub(crate) struct Sssp {
    pub dist: Vec<Option<Ratio>>,
    pub pred: Vec<Option<Arc>>,
}

/// Dijkstra over nonnegative exact costs. `cost` sees the traversal
/// direction through the arc; `skip_edge` removes one edge entirely.
pub(crate) fn sssp_by<F>(
    adj: &[Vec<Arc>],
    source: u32,
    mut cost: F,
    skip_edge: Option<u32>,
    stop: SsspStop,
) -> Sssp
where
    F: FnMut(&Arc) -> Ratio,
{
    let n = adj.len();
    let mut dist: Vec<Option<Ratio>> = vec![None; n];
    let mut pred: Vec<Option<Arc>> = vec![None; n];
    let mut settled = vec![false; n];
    let mut remaining = match stop {
        SsspStop::TargetSet(set) => {
            let mut unique: Vec<u32> = set.to_vec();
            unique.sort_unstable();
            unique.dedup();
            unique.len()
        }
        _ => 0,
    };
    let in_target_set = |v: u32| -> bool {
        match stop {
            SsspStop::TargetSet(set) => set.contains(&v),
            _ => false,
        }
    };

    let mut heap: BinaryHeap<Reverse<(Ratio, u32)>> = BinaryHeap::new();
    dist[source as usize] = Some(Ratio::zero());
    heap.push(Reverse((Ratio::zero(), source)));

    while let Some(Reverse((d, v))) = heap.pop() {
        if settled[v as usize] {
            continue;
        }
        settled[v as usize] = true;
        match stop {
            SsspStop::Target(t) if v == t => break,
            SsspStop::FirstOther if v != source => break,
            SsspStop::TargetSet(_) => {
                if in_target_set(v) {
                    remaining -= 1;
                    if remaining == 0 {
                        break;
                    }
                }
            }
            _ => {}
        }
        for arc in &adj[v as usize] {
            if settled[arc.to as usize] || Some(arc.edge) == skip_edge {
                continue;
            }
            let nd = &d + cost(arc);
            let better = match &dist[arc.to as usize] {
                None => true,
                Some(old) => nd < *old,
            };
            if better {
                dist[arc.to as usize] = Some(nd.clone());
                pred[arc.to as usize] = Some(*arc);
                heap.push(Reverse((nd, arc.to)));
            }
        }
    }

    // Unsettled vertices keep tentative labels only; report settled exact
    // distances plus the frontier, which is still an upper bound. Callers
    // that need guarantees use SsspStop::All.
    Sssp { dist, pred }
}

/// Float twin of [`sssp_by`]; advisory use only.
pub(crate) fn sssp_f64_by<F>(
    adj: &[Vec<Arc>],
    source: u32,
    mut cost: F,
    skip_edge: Option<u32>,
    target: Option<u32>,
) -> (Vec<f64>, Vec<Option<Arc>>)
where
    F: FnMut(&Arc) -> f64,
{
    #[derive(PartialEq)]
    struct Key(f64, u32);
    impl Eq for Key {}
    impl PartialOrd for Key {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Key {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0
                .total_cmp(&other.0)
                .then_with(|| self.1.cmp(&other.1))
        }
    }

    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred: Vec<Option<Arc>> = vec![None; n];
    let mut settled = vec![false; n];
    let mut heap: BinaryHeap<Reverse<Key>> = BinaryHeap::new();
    dist[source as usize] = 0.0;
    heap.push(Reverse(Key(0.0, source)));
    while let Some(Reverse(Key(d, v))) = heap.pop() {
        if settled[v as usize] {
            continue;
        }
        settled[v as usize] = true;
        if target == Some(v) {
            break;
        }
        for arc in &adj[v as usize] {
            if settled[arc.to as usize] || Some(arc.edge) == skip_edge {
                continue;
            }
            let nd = d + cost(arc);
            if nd < dist[arc.to as usize] {
                dist[arc.to as usize] = nd;
                pred[arc.to as usize] = Some(*arc);
                heap.push(Reverse(Key(nd, arc.to)));
            }
        }
    }
    (dist, pred)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;
    use crate::rational::parse_ratio;
    use crate::word::Address;

    fn alpha(text: &str) -> PolyRatio {
        PolyRatio::parse(text).unwrap()
    }

    fn vertex(g: &LevelGraph, text: &str) -> VertexId {
        let k = g.levels().cell_count();
        let n = g.levels().boundary_count();
        g.levels()
            .canonicalize_lifted(&Address::parse(text, k, n).unwrap())
            .unwrap()
    }

    #[test]
    fn edge_counts_match_the_label_enumeration() {
        let gasket = builtin("gasket").unwrap();
        let g = LevelGraph::build(&gasket, 1).unwrap();
        assert_eq!(g.edges().len(), 12);
        let g0 = LevelGraph::build(&gasket, 0).unwrap();
        assert_eq!(g0.edges().len(), 3);
        assert!(g0.edges().iter().all(|e| e.word.is_empty()));

        let interval = builtin("interval").unwrap();
        let g = LevelGraph::build(&interval, 1).unwrap();
        assert_eq!(g.edges().len(), 3);
        let words: Vec<String> = g.edges().iter().map(|e| e.word.display(2)).collect();
        assert_eq!(words, vec!["e", "1", "2"]);
    }

    #[test]
    fn interval_distance_examples() {
        let interval = builtin("interval").unwrap();
        let g = LevelGraph::build(&interval, 3).unwrap();
        let a = alpha("3/10,3/10");
        let d = g
            .shortest_distance(&a, vertex(&g, "e.1"), vertex(&g, "e.2"))
            .unwrap();
        assert_eq!(d, parse_ratio("27/125").unwrap());
        let self_d = g
            .shortest_distance(&a, vertex(&g, "e.1"), vertex(&g, "e.1"))
            .unwrap();
        assert_eq!(self_d, Ratio::zero());
    }

    #[test]
    fn gasket_distance_is_stable_for_one_half() {
        let gasket = builtin("gasket").unwrap();
        let a = alpha("1/2,1/2,1/2");
        for m in 0..=4 {
            let g = LevelGraph::build(&gasket, m).unwrap();
            let d = g
                .shortest_distance(&a, vertex(&g, "e.1"), vertex(&g, "e.2"))
                .unwrap();
            assert_eq!(d, Ratio::from_integer(1.into()), "level {m}");
        }
    }

    #[test]
    fn cell_diameter_examples() {
        let gasket = builtin("gasket").unwrap();
        let g = LevelGraph::build(&gasket, 3).unwrap();
        let a = alpha("1/2,1/2,1/2");
        let w1 = Word::parse("1", 3).unwrap();
        assert_eq!(g.cell_diameter(&a, &w1).unwrap(), parse_ratio("1/2").unwrap());
        assert_eq!(
            g.cell_diameter(&a, &Word::empty()).unwrap(),
            parse_ratio("1").unwrap()
        );

        let interval = builtin("interval").unwrap();
        let g = LevelGraph::build(&interval, 2).unwrap();
        let a = alpha("1/2,1/2");
        assert_eq!(
            g.cell_diameter(&a, &Word::parse("1", 2).unwrap()).unwrap(),
            parse_ratio("1/2").unwrap()
        );
    }

    #[test]
    fn connectedness_examples() {
        assert!(LevelGraph::build(&builtin("gasket").unwrap(), 1)
            .unwrap()
            .connectedness());
        assert!(LevelGraph::build(&builtin("vicsek").unwrap(), 1)
            .unwrap()
            .connectedness());
        let cantor =
            crate::spec::parse_spec("fractal cantor\ncells 2\nboundary 2\n").unwrap();
        assert!(!LevelGraph::build(&cantor, 1).unwrap().connectedness());
    }

    #[test]
    fn distances_are_symmetric_and_triangular() {
        let gasket = builtin("gasket").unwrap();
        let g = LevelGraph::build(&gasket, 2).unwrap();
        let a = alpha("2/5,1/2,3/5");
        let n = g.vertex_count();
        let all: Vec<Vec<Option<Ratio>>> = (0..n as u32)
            .map(|c| {
                g.distances_from(
                    &a,
                    VertexId {
                        level: 2,
                        class: c,
                    },
                )
                .unwrap()
            })
            .collect();
        for x in 0..n {
            for y in 0..n {
                let dxy = all[x][y].as_ref().unwrap();
                assert_eq!(dxy, all[y][x].as_ref().unwrap());
                for z in 0..n {
                    let dxz = all[x][z].as_ref().unwrap();
                    let dzy = all[z][y].as_ref().unwrap();
                    assert!(*dxy <= dxz + dzy);
                }
            }
        }
    }

    #[test]
    fn level_refinement_never_increases_distances() {
        let gasket = builtin("gasket").unwrap();
        let a = alpha("2/5,1/2,3/5");
        let mut previous: Option<Ratio> = None;
        for m in 0..=4 {
            let g = LevelGraph::build(&gasket, m).unwrap();
            let d = g
                .shortest_distance(&a, vertex(&g, "e.1"), vertex(&g, "e.3"))
                .unwrap();
            if let Some(p) = previous {
                assert!(d <= p);
            }
            previous = Some(d);
        }
    }

    #[test]
    fn dot_export_is_deterministic_and_labeled() {
        let interval = builtin("interval").unwrap();
        let g = LevelGraph::build(&interval, 1).unwrap();
        let a = alpha("3/10,3/10");
        let dot = g.to_dot("interval", Some(&a));
        assert_eq!(dot, g.to_dot("interval", Some(&a)));
        assert!(dot.contains("label=\"(1,2)/e/1\""));
        assert!(dot.contains("label=\"(1,2)/1/3/10\""));
        assert!(dot.contains("label=\"1.2\""));
    }
}
