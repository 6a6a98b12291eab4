//! Signed-graphic matroids on quotient gain graphs and their unions.
//!
//! A set of edges is independent in the signed-graphic matroid when every
//! connected component has at most one cycle and that cycle is negative.
//! The union of the `C(d+1,2)` matroids induced by the labelings
//! `ψ_g^{i,j}` decides the rank of the `ρ_g`-orbit rigidity matrix at a
//! generic configuration.

use std::collections::VecDeque;

use serde::Serialize;

use crate::algebra::{binomial, LexIndex};
use crate::error::{Error, Result};
use crate::gaingraph::{remove_zero_loops, EdgeId, GainGraph};
use crate::linalg::Matrix;
use crate::scalar::{int, Rational};
use crate::symmetry::{induced_labelings, trivial_motion_dim, GroupElement, PointRepresentation};

/// Largest edge set the exhaustive counting oracle will enumerate.
pub const COUNTING_GUARD: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignedEdge {
    pub id: EdgeId,
    pub u: usize,
    pub v: usize,
    pub negative: bool,
}

impl SignedEdge {
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedGraph {
    vertices: usize,
    edges: Vec<SignedEdge>,
}

impl SignedGraph {
    pub fn new(vertices: usize, edges: Vec<SignedEdge>) -> Result<Self> {
        if let Some(e) = edges.iter().find(|e| e.u >= vertices || e.v >= vertices) {
            return Err(Error::Input(format!("signed edge {} has an unknown endpoint", e.id)));
        }
        Ok(Self { vertices, edges })
    }

    /// Convenience constructor from `(u, v, sign)` triples with sequential ids.
    pub fn from_triples(vertices: usize, triples: &[(usize, usize, i8)]) -> Result<Self> {
        let mut edges = Vec::with_capacity(triples.len());
        for (i, &(u, v, s)) in triples.iter().enumerate() {
            if s != 1 && s != -1 {
                return Err(Error::Input(format!("sign {s} is not ±1")));
            }
            edges.push(SignedEdge {
                id: EdgeId(i as u32),
                u,
                v,
                negative: s == -1,
            });
        }
        Self::new(vertices, edges)
    }

    /// The gain graph with each gain replaced by its value under `labeling`
    /// (indexed by group element).
    pub fn from_gain_graph(h: &GainGraph, labeling: &[i8]) -> Self {
        let group = h.group();
        let edges = h
            .edges()
            .iter()
            .map(|e| SignedEdge {
                id: e.id,
                u: e.tail,
                v: e.head,
                negative: labeling[group.index_of(&e.gain)] == -1,
            })
            .collect();
        Self {
            vertices: h.vertex_count(),
            edges,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[SignedEdge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn all(&self) -> Vec<usize> {
        (0..self.edges.len()).collect()
    }
}

/// Union-find whose nodes carry a sign relative to their root. An edge joining
/// a component to itself reveals the sign of the cycle it closes.
struct SignedForest {
    parent: Vec<usize>,
    parity: Vec<bool>,
    size: Vec<usize>,
    cyclic: Vec<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Join {
    Merged,
    NegativeCycle,
    PositiveCycle,
}

impl SignedForest {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            parity: vec![false; n],
            size: vec![1; n],
            cyclic: vec![false; n],
        }
    }

    fn find(&mut self, x: usize) -> (usize, bool) {
        let p = self.parent[x];
        if p == x {
            return (x, false);
        }
        let (root, par) = self.find(p);
        self.parent[x] = root;
        self.parity[x] ^= par;
        (root, self.parity[x])
    }

    fn join(&mut self, e: &SignedEdge) -> (usize, Join) {
        let (ru, pu) = self.find(e.u);
        let (rv, pv) = self.find(e.v);
        if ru == rv {
            let kind = if pu ^ pv ^ e.negative {
                Join::NegativeCycle
            } else {
                Join::PositiveCycle
            };
            return (ru, kind);
        }
        let (big, small) = if self.size[ru] >= self.size[rv] { (ru, rv) } else { (rv, ru) };
        self.parent[small] = big;
        self.parity[small] = pu ^ pv ^ e.negative;
        self.size[big] += self.size[small];
        self.cyclic[big] |= self.cyclic[small];
        (big, Join::Merged)
    }

    /// Adds an edge under the independence rule; false if it would create a
    /// positive cycle or a second cycle in a component.
    fn insert(&mut self, e: &SignedEdge) -> bool {
        let (ru, pu) = self.find(e.u);
        let (rv, pv) = self.find(e.v);
        if ru == rv {
            if pu ^ pv ^ e.negative && !self.cyclic[ru] {
                self.cyclic[ru] = true;
                return true;
            }
            return false;
        }
        if self.cyclic[ru] && self.cyclic[rv] {
            return false;
        }
        self.join(e);
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum CircuitKind {
    /// A cycle whose sign product is +1.
    PositiveCycle,
    /// Two negative cycles in one component (joined or sharing vertices).
    TwoCycles,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Circuit {
    pub kind: CircuitKind,
    /// Positions into the signed graph's edge list.
    pub edges: Vec<usize>,
}

fn independent_positions(sg: &SignedGraph, f: impl IntoIterator<Item = usize>) -> bool {
    let mut forest = SignedForest::new(sg.vertices);
    f.into_iter().all(|i| forest.insert(&sg.edges[i]))
}

fn touched_vertices(sg: &SignedGraph, f: &[usize]) -> usize {
    let mut seen = vec![false; sg.vertices];
    for &i in f {
        seen[sg.edges[i].u] = true;
        seen[sg.edges[i].v] = true;
    }
    seen.into_iter().filter(|&b| b).count()
}

/// The unique circuit in `base + x`, given that `base` is independent and
/// `base + x` is not.
fn fundamental_circuit(sg: &SignedGraph, base: &[usize], x: usize) -> Vec<usize> {
    let mut circuit: Vec<usize> = base
        .iter()
        .copied()
        .filter(|&y| independent_positions(sg, base.iter().copied().filter(|&z| z != y).chain([x])))
        .collect();
    circuit.push(x);
    circuit
}

/// Independence of the edge positions `f`, with a circuit as witness when
/// dependent.
pub fn is_independent_signed(sg: &SignedGraph, f: &[usize]) -> Result<(), Circuit> {
    let mut forest = SignedForest::new(sg.vertices);
    for (k, &x) in f.iter().enumerate() {
        if !forest.insert(&sg.edges[x]) {
            let edges = fundamental_circuit(sg, &f[..k], x);
            let kind = if edges.len() == touched_vertices(sg, &edges) {
                CircuitKind::PositiveCycle
            } else {
                CircuitKind::TwoCycles
            };
            return Err(Circuit { kind, edges });
        }
    }
    Ok(())
}

/// Per-component sum `|V(X)| - 1 + α(X)` where `α(X) = 1` iff `X` contains a
/// negative cycle.
pub fn signed_rank(sg: &SignedGraph, f: &[usize]) -> usize {
    let mut forest = SignedForest::new(sg.vertices);
    let mut touched = vec![false; sg.vertices];
    let mut unbalanced = vec![false; sg.vertices];
    for &i in f {
        let e = &sg.edges[i];
        touched[e.u] = true;
        touched[e.v] = true;
        let (root, kind) = forest.join(e);
        if kind == Join::NegativeCycle {
            unbalanced[root] = true;
        }
    }
    let mut rank = 0;
    for (v, _) in touched.iter().enumerate().filter(|(_, &t)| t) {
        let (root, _) = forest.find(v);
        if root == v {
            rank += forest.size[v] - 1;
        }
    }
    // unbalanced flags were set on roots at the time; carry them to the
    // final roots
    let mut final_unbalanced = vec![false; sg.vertices];
    for (v, _) in unbalanced.iter().enumerate().filter(|(_, &b)| b) {
        let (root, _) = forest.find(v);
        final_unbalanced[root] = true;
    }
    rank + final_unbalanced.into_iter().filter(|&b| b).count()
}

/// `α(F)`: whether `F` contains a negative cycle.
pub fn has_negative_cycle(sg: &SignedGraph, f: &[usize]) -> bool {
    let mut forest = SignedForest::new(sg.vertices);
    f.iter().any(|&i| forest.join(&sg.edges[i]).1 == Join::NegativeCycle)
}

/// The `|E| × |V|` representation: `-ψ(e)` at the tail and `1` at the head
/// of a non-loop, `1 - ψ(e)` at the vertex of a loop.
pub fn incidence_matrix(sg: &SignedGraph) -> Matrix<Rational> {
    let mut m = Matrix::zeros(sg.edges.len(), sg.vertices);
    for (r, e) in sg.edges.iter().enumerate() {
        let psi = e.sign() as i64;
        if e.u == e.v {
            m.set(r, e.u, int(1 - psi));
        } else {
            m.set(r, e.u, int(-psi));
            m.set(r, e.v, int(1));
        }
    }
    m
}

/// Assignment of edges to the constituent matroids of a union.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnionDecomposition {
    /// `parts[k]` holds edge positions assigned to matroid `k`.
    pub parts: Vec<Vec<usize>>,
}

impl UnionDecomposition {
    pub fn size(&self) -> usize {
        self.parts.iter().map(Vec::len).sum()
    }

    /// Matroid index of every assigned edge position.
    pub fn assignment(&self, edge_count: usize) -> Vec<Option<usize>> {
        let mut a = vec![None; edge_count];
        for (k, part) in self.parts.iter().enumerate() {
            for &e in part {
                a[e] = Some(k);
            }
        }
        a
    }

    /// Checks that parts are disjoint and each is independent in its matroid.
    pub fn validate(&self, sgs: &[SignedGraph]) -> Result<()> {
        if self.parts.len() != sgs.len() {
            return Err(Error::Consistency("decomposition has the wrong number of parts".into()));
        }
        let n = sgs.first().map_or(0, SignedGraph::edge_count);
        let mut used = vec![false; n];
        for (k, part) in self.parts.iter().enumerate() {
            for &e in part {
                if e >= n || std::mem::replace(&mut used[e], true) {
                    return Err(Error::Consistency(format!("edge position {e} assigned twice")));
                }
            }
            if let Err(c) = is_independent_signed(&sgs[k], part) {
                return Err(Error::Consistency(format!(
                    "part {k} is dependent: {:?} on {:?}",
                    c.kind, c.edges
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnionRank {
    pub rank: usize,
    pub decomposition: UnionDecomposition,
    /// A set `X ⊆ S` attaining `rank = |S \ X| + Σ_k r_k(X)`.
    pub tight_set: Vec<usize>,
}

/// Nash-Williams bound `|S \ X| + Σ_k r_k(X)` for one `X ⊆ S`.
pub fn union_bound(sgs: &[SignedGraph], s: &[usize], x: &[usize]) -> usize {
    let outside = s.iter().filter(|e| !x.contains(e)).count();
    outside + sgs.iter().map(|sg| signed_rank(sg, x)).sum::<usize>()
}

/// Rank of `S` in the union of the matroids, by shortest augmenting paths in
/// the exchange graph. Edges are inserted in the order of `s`.
pub fn matroid_union_rank(sgs: &[SignedGraph], s: &[usize]) -> Result<UnionRank> {
    let Some(first) = sgs.first() else {
        return Err(Error::Input("matroid union of zero matroids".into()));
    };
    let n = first.edge_count();
    for sg in sgs {
        let same = sg.vertices == first.vertices
            && sg.edges.len() == n
            && sg.edges.iter().zip(&first.edges).all(|(a, b)| (a.id, a.u, a.v) == (b.id, b.u, b.v));
        if !same {
            return Err(Error::Input("signed graphs do not share their edge set".into()));
        }
    }
    if let Some(&e) = s.iter().find(|&&e| e >= n) {
        return Err(Error::Input(format!("edge position {e} out of range")));
    }

    let m = sgs.len();
    let mut parts: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut owner: Vec<Option<usize>> = vec![None; n];

    for &x in s {
        if owner[x].is_some() {
            continue;
        }
        if let Some(path) = augmenting_path(sgs, &parts, &owner, &[x]) {
            apply_path(&mut parts, &mut owner, path);
        }
    }

    let unassigned: Vec<usize> = s.iter().copied().filter(|&e| owner[e].is_none()).collect();
    let tight_set = reachable(sgs, &parts, &owner, &unassigned);
    let decomposition = UnionDecomposition { parts };
    let rank = decomposition.size();
    Ok(UnionRank {
        rank,
        decomposition,
        tight_set,
    })
}

/// Exchange step: `(element, matroid)` meaning the element enters that part.
type Path = Vec<(usize, usize)>;

fn exchange_search(
    sgs: &[SignedGraph],
    parts: &[Vec<usize>],
    owner: &[Option<usize>],
    sources: &[usize],
) -> (Option<Path>, Vec<bool>) {
    let n = owner.len();
    let mut visited = vec![false; n];
    let mut pred: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut queue = VecDeque::new();
    for &x in sources {
        visited[x] = true;
        queue.push_back(x);
    }
    while let Some(y) = queue.pop_front() {
        for (k, sg) in sgs.iter().enumerate() {
            if owner[y] == Some(k) {
                continue;
            }
            let part = &parts[k];
            if independent_positions(sg, part.iter().copied().chain([y])) {
                let mut path = vec![(y, k)];
                let mut cur = y;
                while let Some((p, pk)) = pred[cur] {
                    path.push((p, pk));
                    cur = p;
                }
                return (Some(path), visited);
            }
            for z in fundamental_circuit(sg, part, y) {
                if z != y && !visited[z] {
                    visited[z] = true;
                    pred[z] = Some((y, k));
                    queue.push_back(z);
                }
            }
        }
    }
    (None, visited)
}

fn augmenting_path(
    sgs: &[SignedGraph],
    parts: &[Vec<usize>],
    owner: &[Option<usize>],
    sources: &[usize],
) -> Option<Path> {
    exchange_search(sgs, parts, owner, sources).0
}

fn reachable(
    sgs: &[SignedGraph],
    parts: &[Vec<usize>],
    owner: &[Option<usize>],
    sources: &[usize],
) -> Vec<usize> {
    let (path, visited) = exchange_search(sgs, parts, owner, sources);
    debug_assert!(path.is_none(), "union is not maximal");
    (0..owner.len()).filter(|&e| visited[e]).collect()
}

fn apply_path(parts: &mut [Vec<usize>], owner: &mut [Option<usize>], path: Path) {
    // Each step moves an element into a part; the element it displaces is
    // the next step's element, so removals happen before insertions.
    for &(e, k) in &path {
        if let Some(old) = owner[e] {
            parts[old].retain(|&z| z != e);
        }
        parts[k].push(e);
        owner[e] = Some(k);
    }
    for part in parts.iter_mut() {
        part.sort_unstable();
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountingViolation {
    pub edges: Vec<EdgeId>,
    pub size: usize,
    pub bound: usize,
    /// `α^{i,j}(F)` per screw coordinate pair.
    pub alphas: Vec<u8>,
}

/// Exhaustively checks `|F| ≤ m|V(F)| - m + Σ α_k(F)` for every nonempty
/// `F ⊆ S`, where `m` is the number of matroids.
pub fn check_counting_condition(
    sgs: &[SignedGraph],
    s: &[usize],
) -> Result<Option<CountingViolation>> {
    if s.len() > COUNTING_GUARD {
        return Err(Error::SizeGuard {
            size: s.len(),
            limit: COUNTING_GUARD,
        });
    }
    let Some(first) = sgs.first() else {
        return Ok(None);
    };
    let m = sgs.len();
    for mask in 1u32..(1u32 << s.len()) {
        let f: Vec<usize> = (0..s.len()).filter(|&i| mask >> i & 1 == 1).map(|i| s[i]).collect();
        let alphas: Vec<u8> = sgs.iter().map(|sg| has_negative_cycle(sg, &f) as u8).collect();
        let bound = m * touched_vertices(first, &f) - m + alphas.iter().map(|&a| a as usize).sum::<usize>();
        if f.len() > bound {
            return Ok(Some(CountingViolation {
                edges: f.iter().map(|&i| first.edges[i].id).collect(),
                size: f.len(),
                bound,
                alphas,
            }));
        }
    }
    Ok(None)
}

/// Combinatorial decision for one irrep `ρ_g` of a `(Z/2)^l` framework.
#[derive(Clone, Debug)]
pub struct CombinatorialVerdict {
    pub irrep: GroupElement,
    pub target: usize,
    pub rank: usize,
    pub rigid: bool,
    /// `target - rank`, the number of independent nontrivial `ρ_g`-symmetric
    /// flexes at a generic configuration.
    pub deficiency: usize,
    /// Number of edges of `H_g`.
    pub edge_count: usize,
    /// Loops of `L` whose rows vanish for this irrep.
    pub removed_loops: Vec<EdgeId>,
    /// The signed graphs `(H_g, ψ_g^{i,j})`, one per screw coordinate pair.
    pub signed_graphs: Vec<SignedGraph>,
    pub decomposition: UnionDecomposition,
    /// Positions in `H_g` attaining the Nash-Williams minimum.
    pub tight_set: Vec<usize>,
    /// Filled only when the exhaustive oracle was requested.
    pub counting_violation: Option<CountingViolation>,
}

impl CombinatorialVerdict {
    /// `(|E(H_g)|, target)` when `H_g` does not have exactly `target` edges,
    /// so it cannot itself be the spanning subgraph asked for by the count.
    pub fn count_mismatch(&self) -> Option<(usize, usize)> {
        (self.edge_count != self.target).then_some((self.edge_count, self.target))
    }

    /// Edge ids per screw coordinate pair, labelled `(i,j)` 1-based.
    pub fn labelled_parts(&self, d: usize) -> Vec<(String, Vec<EdgeId>)> {
        let idx = LexIndex::new(d + 1, 2);
        let ids = self.signed_graphs.first().map(|sg| sg.edges.clone()).unwrap_or_default();
        self.decomposition
            .parts
            .iter()
            .enumerate()
            .map(|(k, part)| (idx.label(k), part.iter().map(|&e| ids[e].id).collect()))
            .collect()
    }

    pub fn tight_set_ids(&self) -> Vec<EdgeId> {
        let ids = self.signed_graphs.first().map(|sg| sg.edges.clone()).unwrap_or_default();
        self.tight_set.iter().map(|&e| ids[e].id).collect()
    }
}

/// The `C(d+1,2)` signed graphs on `H_g`.
pub fn signed_graphs_for(
    h: &GainGraph,
    rep: &PointRepresentation,
    g: &GroupElement,
) -> Result<(GainGraph, Vec<SignedGraph>)> {
    let hg = remove_zero_loops(h, g);
    let labelings = induced_labelings(rep, g)?;
    let sgs = labelings.iter().map(|l| SignedGraph::from_gain_graph(&hg, l)).collect();
    Ok((hg, sgs))
}

pub fn combinatorial_verdict(
    h: &GainGraph,
    rep: &PointRepresentation,
    g: &GroupElement,
    oracle: bool,
) -> Result<CombinatorialVerdict> {
    rep.require_combinatorial()?;
    if h.group() != rep.group() {
        return Err(Error::Input("gain graph and representation use different groups".into()));
    }
    let (hg, sgs) = signed_graphs_for(h, rep, g)?;
    let all: Vec<usize> = (0..hg.edge_count()).collect();
    let union = matroid_union_rank(&sgs, &all)?;
    union.decomposition.validate(&sgs)?;
    let m = binomial(rep.dim() + 1, 2);
    let target = m * h.vertex_count() - trivial_motion_dim(rep, g)?;
    let counting_violation = if oracle {
        check_counting_condition(&sgs, &all)?
    } else {
        None
    };
    let kept: Vec<EdgeId> = hg.edges().iter().map(|e| e.id).collect();
    Ok(CombinatorialVerdict {
        irrep: g.clone(),
        target,
        rank: union.rank,
        rigid: union.rank >= target,
        deficiency: target.saturating_sub(union.rank),
        edge_count: hg.edge_count(),
        removed_loops: h
            .edges()
            .iter()
            .map(|e| e.id)
            .filter(|id| !kept.contains(id))
            .collect(),
        signed_graphs: sgs,
        decomposition: union.decomposition,
        tight_set: union.tight_set,
        counting_violation,
    })
}
