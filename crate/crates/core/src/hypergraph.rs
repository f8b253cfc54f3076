//! Hypergraphs with multiset edge lists, greedy matching decompositions and
//! homogenization.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// A hypergraph on vertices `0..n` whose edges form a multiset.
///
/// Edges are stored in insertion order, each as a strictly increasing list of
/// vertices. Parallel edges are allowed; empty edges are not.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// The hypergraph on `n` vertices without edges.
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
        }
    }

    /// Builds a hypergraph, sorting each edge into canonical form.
    ///
    /// Rejects empty edges, repeated vertices inside an edge and vertices
    /// outside `0..n`.
    pub fn new<E, I>(n: usize, edges: E) -> Result<Self>
    where
        E: IntoIterator<Item = I>,
        I: IntoIterator<Item = usize>,
    {
        let mut out = Self::empty(n);
        for edge in edges {
            out.push_edge(edge)?;
        }
        Ok(out)
    }

    /// Appends one edge, canonicalizing it.
    pub fn push_edge<I: IntoIterator<Item = usize>>(&mut self, edge: I) -> Result<()> {
        let index = self.edges.len();
        let mut e: Vec<usize> = edge.into_iter().collect();
        if e.is_empty() {
            return Err(Error::InvalidEdge {
                index,
                reason: "edges must contain at least one vertex".into(),
            });
        }
        e.sort_unstable();
        if let Some(w) = e.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidEdge {
                index,
                reason: format!("vertex {} repeated", w[0]),
            });
        }
        if let Some(&v) = e.last().filter(|&&v| v >= self.n) {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
        }
        self.edges.push(e);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Largest edge size (0 for the empty hypergraph).
    pub fn max_edge_size(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Whether every edge has exactly `d` vertices. Vacuously true without edges.
    pub fn is_uniform(&self, d: usize) -> bool {
        self.edges.iter().all(|e| e.len() == d)
    }

    /// Number of edges incident to each vertex, and the maximum degree.
    pub fn degree_profile(&self) -> (Vec<usize>, usize) {
        let mut deg = vec![0usize; self.n];
        for e in &self.edges {
            for &v in e {
                deg[v] += 1;
            }
        }
        let max = deg.iter().copied().max().unwrap_or(0);
        (deg, max)
    }

    pub fn max_degree(&self) -> usize {
        self.degree_profile().1
    }

    /// Whether no two edges share a vertex.
    pub fn is_matching(&self) -> bool {
        let mut seen = vec![false; self.n];
        for e in &self.edges {
            for &v in e {
                if std::mem::replace(&mut seen[v], true) {
                    return false;
                }
            }
        }
        true
    }

    /// Edges as bit masks over the vertex set. Requires `n <= 64`.
    pub fn edge_masks(&self) -> Vec<u64> {
        assert!(self.n <= 64, "bit masks need n <= 64");
        self.edges
            .iter()
            .map(|e| e.iter().fold(0u64, |m, &v| m | (1u64 << v)))
            .collect()
    }

    /// First-fit edge coloring in stored order.
    ///
    /// Each edge receives the smallest color not already used by an earlier
    /// edge sharing a vertex with it. An edge meets at most `d(Δ-1)` other
    /// edges, so at most `d(Δ-1)+1` colors are used.
    pub fn greedy_edge_coloring(&self) -> EdgeColoring {
        let mut at_vertex: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        let mut colors = Vec::with_capacity(self.edges.len());
        let mut blocked: Vec<bool> = Vec::new();
        let mut num_colors = 0;
        for e in &self.edges {
            blocked.clear();
            blocked.resize(num_colors + 1, false);
            for &v in e {
                for &c in &at_vertex[v] {
                    blocked[c] = true;
                }
            }
            let c = blocked.iter().position(|b| !b).expect("slot num_colors is free");
            for &v in e {
                at_vertex[v].push(c);
            }
            num_colors = num_colors.max(c + 1);
            colors.push(c);
        }
        EdgeColoring { colors, num_colors }
    }

    /// Splits the edge multiset into the color classes of `coloring`.
    pub fn matchings(&self, coloring: &EdgeColoring) -> Vec<Hypergraph> {
        assert_eq!(coloring.colors.len(), self.edges.len());
        let mut classes = vec![Hypergraph::empty(self.n); coloring.num_colors];
        for (e, &c) in self.edges.iter().zip(&coloring.colors) {
            classes[c].edges.push(e.clone());
        }
        classes
    }

    /// The derived hypergraph at vertex `i`: edges `e \ {i}` for every edge
    /// `e` containing `i`. Its polynomial is the partial derivative of this
    /// hypergraph's polynomial in coordinate `i`.
    ///
    /// Fails if `i` forms a singleton edge, since the derivative would then
    /// have a constant term.
    pub fn link(&self, i: usize) -> Result<Hypergraph> {
        if i >= self.n {
            return Err(Error::VertexOutOfRange { vertex: i, n: self.n });
        }
        let mut out = Hypergraph::empty(self.n);
        for (index, e) in self.edges.iter().enumerate() {
            if e.binary_search(&i).is_ok() {
                if e.len() == 1 {
                    return Err(Error::InvalidEdge {
                        index,
                        reason: format!("singleton edge {{{i}}} has a constant derivative"),
                    });
                }
                out.edges.push(e.iter().copied().filter(|&v| v != i).collect());
            }
        }
        Ok(out)
    }

    /// Number of edges containing every vertex of `set`.
    pub fn edges_containing(&self, set: &[usize]) -> usize {
        self.edges
            .iter()
            .filter(|e| set.iter().all(|v| e.binary_search(v).is_ok()))
            .count()
    }
}

/// A proper edge coloring: intersecting edges get different colors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeColoring {
    /// One color per edge, parallel to [`Hypergraph::edges`].
    pub colors: Vec<usize>,
    /// One more than the largest color used; 0 when there are no edges.
    pub num_colors: usize,
}

impl EdgeColoring {
    /// Checks properness by comparing every pair of edges.
    pub fn is_proper_for(&self, h: &Hypergraph) -> bool {
        if self.colors.len() != h.num_edges() {
            return false;
        }
        let edges = h.edges();
        for i in 0..edges.len() {
            for j in i + 1..edges.len() {
                if self.colors[i] == self.colors[j] && intersects(&edges[i], &edges[j]) {
                    return false;
                }
            }
        }
        true
    }
}

fn intersects(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// Extends a matching of `2r`-sets to a maximal one.
///
/// Vertices not covered by `matching` are taken in ascending order and cut
/// into consecutive blocks of `2r`; fewer than `2r` vertices remain uncovered.
/// Existing edges keep their positions and the new blocks follow.
pub fn complete_to_maximal_matching(matching: &Hypergraph, r: usize) -> Result<Hypergraph> {
    if r == 0 {
        return Err(Error::param("r", "must be positive"));
    }
    let block = 2 * r;
    if matching.n() < block {
        return Err(Error::param("n", format!("need at least 2r = {block} vertices")));
    }
    if let Some(index) = matching.edges().iter().position(|e| e.len() != block) {
        return Err(Error::InvalidEdge {
            index,
            reason: format!("expected an edge of size {block}"),
        });
    }
    if !matching.is_matching() {
        return Err(Error::NotMatching("two edges share a vertex".into()));
    }
    let mut covered = vec![false; matching.n()];
    for e in matching.edges() {
        for &v in e {
            covered[v] = true;
        }
    }
    let free: Vec<usize> = (0..matching.n()).filter(|&v| !covered[v]).collect();
    let mut out = matching.clone();
    for chunk in free.chunks_exact(block) {
        out.edges.push(chunk.to_vec());
    }
    Ok(out)
}

/// Result of [`homogenize`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Homogenized {
    /// `d`-uniform hypergraph on `d * n` vertices.
    pub hypergraph: Hypergraph,
    /// Padding vertices added to each original edge, parallel to its edges.
    pub pads: Vec<Vec<usize>>,
}

/// Pads every edge to size `d` while keeping the maximum degree.
///
/// With `t = Δ(H)` the edges (in stored order) fill `n` groups of at most `t`
/// edges each; group `i` draws its padding from the fresh block
/// `n + i(d-1) .. n + (i+1)(d-1)`. Every fresh vertex is then used by at most
/// `t` edges. Since `|E| <= t n`, `n` groups always suffice.
pub fn homogenize(h: &Hypergraph, d: usize) -> Result<Homogenized> {
    if d == 0 {
        return Err(Error::param("d", "must be positive"));
    }
    if let Some(index) = h.edges().iter().position(|e| e.len() > d) {
        return Err(Error::InvalidEdge {
            index,
            reason: format!("edge has more than d = {d} vertices"),
        });
    }
    let n = h.n();
    let t = h.max_degree();
    let mut out = Hypergraph::empty(d * n);
    let mut pads = Vec::with_capacity(h.num_edges());
    for (j, e) in h.edges().iter().enumerate() {
        let group = j / t;
        debug_assert!(group < n);
        let base = n + group * (d - 1);
        let pad: Vec<usize> = (base..base + (d - e.len())).collect();
        let mut padded = e.clone();
        padded.extend_from_slice(&pad);
        out.edges.push(padded);
        pads.push(pad);
    }
    Ok(Homogenized {
        hypergraph: out,
        pads,
    })
}

/// Text format: a header line `n m`, then `m` lines of whitespace-separated
/// vertex indices. Blank lines and lines starting with `#` are skipped.
impl FromStr for Hypergraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            reason: "missing header `n m`".into(),
        })?;
        let nums = parse_numbers(line, header)?;
        let [n, m] = nums[..] else {
            return Err(Error::Parse {
                line,
                reason: "header must be `n m`".into(),
            });
        };
        let mut h = Hypergraph::empty(n);
        for _ in 0..m {
            let (line, text) = lines.next().ok_or(Error::Parse {
                line,
                reason: format!("expected {m} edge lines"),
            })?;
            h.push_edge(parse_numbers(line, text)?).map_err(|e| Error::Parse {
                line,
                reason: e.to_string(),
            })?;
        }
        if let Some((line, _)) = lines.next() {
            return Err(Error::Parse {
                line,
                reason: "trailing content after the edge list".into(),
            });
        }
        Ok(h)
    }
}

fn parse_numbers(line: usize, text: &str) -> Result<Vec<usize>> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse().map_err(|_| Error::Parse {
                line,
                reason: format!("`{tok}` is not a nonnegative integer"),
            })
        })
        .collect()
}

impl fmt::Display for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.n, self.edges.len())?;
        for e in &self.edges {
            let line: Vec<String> = e.iter().map(usize::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    fn triangle() -> Hypergraph {
        Hypergraph::new(3, [vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    #[test]
    fn degree_profile_examples() {
        let m = Hypergraph::new(4, [vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(m.degree_profile(), (vec![1, 1, 1, 1], 1));
        assert_eq!(triangle().max_degree(), 2);
        // 3-term progressions {x, x+1, x+2} mod 7: each vertex starts, sits in
        // the middle of, and ends exactly one of them.
        let ap = Hypergraph::new(7, (0..7).map(|x| [x, (x + 1) % 7, (x + 2) % 7])).unwrap();
        assert_eq!(ap.degree_profile(), (vec![3; 7], 3));
    }

    #[test]
    fn edges_are_canonicalized_and_validated() {
        let h = Hypergraph::new(5, [vec![3, 1, 4]]).unwrap();
        assert_eq!(h.edges(), &[vec![1, 3, 4]]);
        assert!(matches!(
            Hypergraph::new(3, [vec![0, 3]]),
            Err(Error::VertexOutOfRange { vertex: 3, n: 3 })
        ));
        assert!(matches!(
            Hypergraph::new(3, [vec![1, 1]]),
            Err(Error::InvalidEdge { index: 0, .. })
        ));
        assert!(Hypergraph::new(3, [Vec::<usize>::new()]).is_err());
    }

    #[test]
    fn greedy_coloring_examples() {
        let m = Hypergraph::new(4, [vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(m.greedy_edge_coloring().num_colors, 1);

        let t = triangle();
        let c = t.greedy_edge_coloring();
        assert_eq!(c.num_colors, 3);
        assert!(c.is_proper_for(&t));
        // no proper 2-coloring exists: every pair of triangle edges meets
        for mask in 0u32..8 {
            let colors: Vec<usize> = (0..3).map(|i| (mask >> i & 1) as usize).collect();
            let alt = EdgeColoring { colors, num_colors: 2 };
            assert!(!alt.is_proper_for(&t));
        }

        assert_eq!(Hypergraph::empty(3).greedy_edge_coloring().num_colors, 0);
    }

    #[test]
    fn maximal_completion_examples() {
        let empty = Hypergraph::empty(8);
        let m = complete_to_maximal_matching(&empty, 2).unwrap();
        assert_eq!(m.edges(), &[vec![0, 1, 2, 3], vec![4, 5, 6, 7]]);

        let one = Hypergraph::new(8, [vec![0, 1, 2, 3]]).unwrap();
        let m = complete_to_maximal_matching(&one, 2).unwrap();
        assert_eq!(m.edges(), &[vec![0, 1, 2, 3], vec![4, 5, 6, 7]]);

        let odd = Hypergraph::new(8, [vec![1, 2, 4, 5]]).unwrap();
        let m = complete_to_maximal_matching(&odd, 2).unwrap();
        assert_eq!(m.edges(), &[vec![1, 2, 4, 5], vec![0, 3, 6, 7]]);
    }

    #[test]
    fn maximal_completion_rejects_bad_input() {
        let overlapping = Hypergraph::new(6, [vec![0, 1], vec![1, 2]]).unwrap();
        assert!(matches!(
            complete_to_maximal_matching(&overlapping, 1),
            Err(Error::NotMatching(_))
        ));
        let wrong_size = Hypergraph::new(6, [vec![0, 1, 2]]).unwrap();
        assert!(complete_to_maximal_matching(&wrong_size, 1).is_err());
        assert!(complete_to_maximal_matching(&Hypergraph::empty(3), 2).is_err());
    }

    #[test]
    fn homogenize_examples() {
        let h = Hypergraph::new(2, [vec![0], vec![1]]).unwrap();
        let out = homogenize(&h, 2).unwrap();
        assert!(out.hypergraph.is_uniform(2));
        assert_eq!(out.hypergraph.n(), 4);
        assert_ne!(out.pads[0], out.pads[1]);
        assert_eq!(out.hypergraph.max_degree(), 1);

        let h = Hypergraph::new(2, [vec![0], vec![0, 1]]).unwrap();
        let out = homogenize(&h, 2).unwrap();
        assert!(out.hypergraph.is_uniform(2));
        assert_eq!(out.hypergraph.max_degree(), 2);
        assert_eq!(out.pads[1], Vec::<usize>::new());

        let too_big = Hypergraph::new(3, [vec![0, 1, 2]]).unwrap();
        assert!(homogenize(&too_big, 2).is_err());
    }

    #[test]
    fn link_drops_the_vertex() {
        let h = Hypergraph::new(4, [vec![0, 1, 2], vec![1, 3], vec![2, 3]]).unwrap();
        let l = h.link(1).unwrap();
        assert_eq!(l.edges(), &[vec![0, 2], vec![3]]);
        let s = Hypergraph::new(2, [vec![0]]).unwrap();
        assert!(s.link(0).is_err());
        assert!(s.link(1).unwrap().is_empty());
    }

    #[test]
    fn text_format_parses_and_canonicalizes() {
        let text = "# comment\n5 2\n4 0 2\n\n1 3\n";
        let h: Hypergraph = text.parse().unwrap();
        assert_eq!(h.n(), 5);
        assert_eq!(h.edges(), &[vec![0, 2, 4], vec![1, 3]]);
        assert_eq!(h.to_string(), "5 2\n0 2 4\n1 3\n");
        assert!("3 1\n0 5\n".parse::<Hypergraph>().is_err());
        assert!("3 2\n0 1\n".parse::<Hypergraph>().is_err());
        assert!("3\n".parse::<Hypergraph>().is_err());
        assert!("3 1\n0 x\n".parse::<Hypergraph>().is_err());
    }

    pub(crate) fn arb_hypergraph(
        max_n: usize,
        max_d: usize,
        max_edges: usize,
    ) -> impl Strategy<Value = Hypergraph> {
        (1..=max_n).prop_flat_map(move |n| {
            let edge = proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=max_d.min(n));
            proptest::collection::vec(edge, 0..=max_edges)
                .prop_map(move |edges| Hypergraph::new(n, edges).unwrap())
        })
    }

    /// `d`-uniform hypergraphs with `d <= max_d`.
    pub(crate) fn arb_uniform_hypergraph(
        max_n: usize,
        max_d: usize,
        max_edges: usize,
    ) -> impl Strategy<Value = Hypergraph> {
        (1..=max_n)
            .prop_flat_map(move |n| (Just(n), 1..=max_d.min(n)))
            .prop_flat_map(move |(n, d)| {
                let edge = proptest::sample::subsequence((0..n).collect::<Vec<_>>(), d);
                proptest::collection::vec(edge, 1..=max_edges)
                    .prop_map(move |edges| Hypergraph::new(n, edges).unwrap())
            })
    }

    proptest! {
        #[test]
        fn greedy_coloring_is_proper_and_bounded(h in arb_hypergraph(10, 4, 20)) {
            let c = h.greedy_edge_coloring();
            prop_assert!(c.is_proper_for(&h));
            let delta = h.max_degree();
            let d = h.max_edge_size();
            prop_assert!(c.num_colors >= delta);
            if delta > 0 {
                prop_assert!(c.num_colors <= d * (delta - 1) + 1);
            }
            for class in h.matchings(&c) {
                prop_assert!(class.is_matching());
                prop_assert!(!class.is_empty());
            }
        }

        #[test]
        fn maximal_completion_is_maximal(n in 2usize..20, r in 1usize..4, seed in any::<u64>()) {
            prop_assume!(n >= 2 * r);
            // a random starting matching: shuffle and take some blocks
            let mut verts: Vec<usize> = (0..n).collect();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                verts.swap(i, (s >> 33) as usize % (i + 1));
            }
            let take = (seed % (n / (2 * r) + 1) as u64) as usize;
            let start = Hypergraph::new(n, verts.chunks_exact(2 * r).take(take).map(|c| c.to_vec())).unwrap();
            let m = complete_to_maximal_matching(&start, r).unwrap();
            prop_assert!(m.is_matching());
            prop_assert!(m.is_uniform(2 * r));
            prop_assert_eq!(&m.edges()[..take], start.edges());
            let covered: usize = m.edges().iter().map(Vec::len).sum();
            prop_assert!(n - covered < 2 * r);
            prop_assert_eq!(m.num_edges(), n / (2 * r));
        }

        #[test]
        fn homogenize_structure(h in arb_hypergraph(10, 4, 20), extra in 0usize..2) {
            let d = h.max_edge_size().max(1) + extra;
            let out = homogenize(&h, d).unwrap();
            let hp = &out.hypergraph;
            prop_assert_eq!(hp.n(), d * h.n());
            prop_assert!(hp.is_uniform(d));
            prop_assert_eq!(hp.max_degree(), h.max_degree());
            prop_assert_eq!(hp.num_edges(), h.num_edges());
            for ((e, ep), pad) in h.edges().iter().zip(hp.edges()).zip(&out.pads) {
                let mut joined = e.clone();
                joined.extend(pad);
                joined.sort_unstable();
                prop_assert_eq!(&joined, ep);
                prop_assert!(pad.iter().all(|&v| v >= h.n()));
            }
        }

        #[test]
        fn text_round_trip(h in arb_hypergraph(12, 5, 15)) {
            let back: Hypergraph = h.to_string().parse().unwrap();
            prop_assert_eq!(back, h);
        }
    }
}
