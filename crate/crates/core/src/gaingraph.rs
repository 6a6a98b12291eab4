//! Quotient gain graphs of symmetric multigraphs and their covering graphs.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symmetry::{irrep_value, AbelianGroup, GroupElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Where a multiplied edge came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeOrigin {
    pub parent: EdgeId,
    pub copy: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GainEdge {
    pub id: EdgeId,
    pub tail: usize,
    pub head: usize,
    pub gain: GroupElement,
    /// The edge orbit is not free (a loop fixed by its order-2 gain).
    pub in_l: bool,
    pub origin: Option<EdgeOrigin>,
}

impl GainEdge {
    pub fn new(id: u32, tail: usize, head: usize, gain: GroupElement) -> Self {
        Self {
            id: EdgeId(id),
            tail,
            head,
            gain,
            in_l: false,
            origin: None,
        }
    }

    pub fn in_l(mut self, in_l: bool) -> Self {
        self.in_l = in_l;
        self
    }

    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }
}

/// A directed multigraph with gains in `Γ` and a distinguished set `L` of
/// loops whose edge orbits are not free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GainGraph {
    group: AbelianGroup,
    vertices: Vec<String>,
    edges: Vec<GainEdge>,
}

impl GainGraph {
    pub fn new(group: AbelianGroup, vertices: Vec<String>, edges: Vec<GainEdge>) -> Result<Self> {
        let mut names = HashSet::new();
        for v in &vertices {
            if !names.insert(v.as_str()) {
                return Err(Error::Input(format!("duplicate vertex {v:?}")));
            }
        }
        let mut ids = HashSet::new();
        for e in &edges {
            if !ids.insert(e.id) {
                return Err(Error::Input(format!("duplicate edge id {}", e.id)));
            }
            if e.tail >= vertices.len() || e.head >= vertices.len() {
                return Err(Error::Input(format!("edge {} has an unknown endpoint", e.id)));
            }
            if !group.contains(&e.gain) {
                return Err(Error::Input(format!(
                    "edge {} has gain {} outside the group",
                    e.id, e.gain
                )));
            }
            if e.is_loop() && group.is_identity(&e.gain) {
                return Err(Error::Input(format!(
                    "loop {} carries the identity gain",
                    e.id
                )));
            }
            if e.in_l && (!e.is_loop() || group.element_order(&e.gain) != 2) {
                return Err(Error::Input(format!(
                    "edge {} is marked inL but is not a loop with a gain of order 2",
                    e.id
                )));
            }
        }
        Ok(Self {
            group,
            vertices,
            edges,
        })
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn edges(&self) -> &[GainEdge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_position(&self, id: EdgeId) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn has_nonfree_loops(&self) -> bool {
        self.edges.iter().any(|e| e.in_l)
    }

    /// Same graph without the given edge positions.
    fn without(&self, drop: impl Fn(&GainEdge) -> bool) -> Self {
        Self {
            group: self.group.clone(),
            vertices: self.vertices.clone(),
            edges: self.edges.iter().filter(|e| !drop(e)).cloned().collect(),
        }
    }
}

/// `H_g`: drops the loops in `L` whose gain has `ρ_g(ψ) = -1`. These are
/// exactly the loops whose orbit-matrix rows vanish.
pub fn remove_zero_loops(h: &GainGraph, g: &GroupElement) -> GainGraph {
    h.without(|e| e.in_l && irrep_value(&h.group, g, &e.gain).sign() == Some(-1))
}

/// Replaces each edge by `m` parallel copies with the same gain. Copies get
/// fresh sequential ids and remember their parent.
pub fn multiply_edges(h: &GainGraph, m: usize) -> Result<GainGraph> {
    if m == 0 {
        return Err(Error::Input("edge multiplicity must be at least 1".into()));
    }
    let mut edges = Vec::with_capacity(h.edges.len() * m);
    for e in &h.edges {
        for copy in 0..m {
            edges.push(GainEdge {
                id: EdgeId(edges.len() as u32),
                tail: e.tail,
                head: e.head,
                gain: e.gain.clone(),
                in_l: e.in_l,
                origin: Some(EdgeOrigin {
                    parent: e.id,
                    copy: copy as u32,
                }),
            });
        }
    }
    Ok(GainGraph {
        group: h.group.clone(),
        vertices: h.vertices.clone(),
        edges,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveredEdge {
    pub u: usize,
    pub v: usize,
    /// `(quotient edge position, γ)` for lifted graphs: this is the edge
    /// `θ(γ)e` of the orbit of that quotient edge.
    pub lift: Option<(usize, GroupElement)>,
}

/// A `Γ`-symmetric multigraph together with the action on vertices and edges.
#[derive(Clone, Debug)]
pub struct CoveredGraph {
    group: AbelianGroup,
    vertices: Vec<String>,
    edges: Vec<CoveredEdge>,
    /// `[element index][vertex] -> vertex`
    vertex_action: Vec<Vec<usize>>,
    /// `[element index][edge] -> edge`
    edge_action: Vec<Vec<usize>>,
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    // (a ∘ b)(x) = a(b(x))
    b.iter().map(|&x| a[x]).collect()
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&x| x < p.len() && !std::mem::replace(&mut seen[x], true))
}

impl CoveredGraph {
    /// Builds the action from generator permutations and validates it.
    pub fn from_generators(
        group: AbelianGroup,
        vertices: Vec<String>,
        edges: Vec<(usize, usize)>,
        vertex_generators: Vec<Vec<usize>>,
        edge_generators: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let (nv, ne) = (vertices.len(), edges.len());
        if vertex_generators.len() != group.rank() || edge_generators.len() != group.rank() {
            return Err(Error::Input("one permutation per generator is required".into()));
        }
        for p in &vertex_generators {
            if p.len() != nv || !is_permutation(p) {
                return Err(Error::Input("vertex action is not a permutation".into()));
            }
        }
        for p in &edge_generators {
            if p.len() != ne || !is_permutation(p) {
                return Err(Error::Input("edge action is not a permutation".into()));
            }
        }
        if edges.iter().any(|&(u, v)| u >= nv || v >= nv) {
            return Err(Error::Input("edge endpoint out of range".into()));
        }
        let power = |gens: &[Vec<usize>], e: &GroupElement, n: usize| {
            e.0.iter()
                .zip(gens)
                .fold((0..n).collect::<Vec<_>>(), |acc, (&k, g)| {
                    (0..k).fold(acc, |m, _| compose(g, &m))
                })
        };
        let elements = group.elements();
        let vertex_action: Vec<Vec<usize>> =
            elements.iter().map(|e| power(&vertex_generators, e, nv)).collect();
        let edge_action: Vec<Vec<usize>> =
            elements.iter().map(|e| power(&edge_generators, e, ne)).collect();
        let g = Self {
            group,
            vertices,
            edges: edges
                .into_iter()
                .map(|(u, v)| CoveredEdge { u, v, lift: None })
                .collect(),
            vertex_action,
            edge_action,
        };
        g.validate_action()?;
        Ok(g)
    }

    fn validate_action(&self) -> Result<()> {
        let elements = self.group.elements();
        for a in &elements {
            for b in &elements {
                let ab = self.group.index_of(&self.group.add(a, b));
                let (ia, ib) = (self.group.index_of(a), self.group.index_of(b));
                if self.vertex_action[ab] != compose(&self.vertex_action[ia], &self.vertex_action[ib])
                    || self.edge_action[ab] != compose(&self.edge_action[ia], &self.edge_action[ib])
                {
                    return Err(Error::Input("group action is not a homomorphism".into()));
                }
            }
        }
        for (gi, (vp, ep)) in self.vertex_action.iter().zip(&self.edge_action).enumerate() {
            for (i, e) in self.edges.iter().enumerate() {
                let image = &self.edges[ep[i]];
                let mapped = (vp[e.u], vp[e.v]);
                if mapped != (image.u, image.v) && mapped != (image.v, image.u) {
                    return Err(Error::Input(format!(
                        "element {} maps edge {i} onto an edge with different endpoints",
                        self.group.element_at(gi)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[CoveredEdge] {
        &self.edges
    }

    pub fn endpoints(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.u, e.v)).collect()
    }

    pub fn vertex_image(&self, g: &GroupElement, v: usize) -> usize {
        self.vertex_action[self.group.index_of(g)][v]
    }

    pub fn edge_image(&self, g: &GroupElement, e: usize) -> usize {
        self.edge_action[self.group.index_of(g)][e]
    }

    pub fn is_free_on_vertices(&self) -> bool {
        self.vertex_action
            .iter()
            .skip(1)
            .all(|p| p.iter().enumerate().all(|(v, &w)| v != w))
    }

    pub fn is_free_on_edges(&self) -> bool {
        self.edge_action
            .iter()
            .skip(1)
            .all(|p| p.iter().enumerate().all(|(e, &f)| e != f))
    }
}

/// Rebuilds the symmetric multigraph from its quotient: `V(H) × Γ` with one
/// edge `{(u,γ), (v,γ+h)}` per `γ` for a free edge orbit and one edge per
/// coset `{γ, γ+h}` for a loop in `L`.
pub fn lift_cover(h: &GainGraph) -> CoveredGraph {
    let group = h.group.clone();
    let elements = group.elements();
    let n = elements.len();
    let vid = |v: usize, g: &GroupElement| v * n + group.index_of(g);

    let mut vertices = Vec::with_capacity(h.vertex_count() * n);
    for name in &h.vertices {
        for g in &elements {
            vertices.push(format!("{name}@{g}"));
        }
    }

    let mut edges = Vec::new();
    // (quotient edge, element index) -> lifted edge; both coset members for L
    let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
    for (pos, e) in h.edges.iter().enumerate() {
        for g in &elements {
            let gi = group.index_of(g);
            if lookup.contains_key(&(pos, gi)) {
                continue;
            }
            let gh = group.add(g, &e.gain);
            let idx = edges.len();
            edges.push(CoveredEdge {
                u: vid(e.tail, g),
                v: vid(e.head, &gh),
                lift: Some((pos, g.clone())),
            });
            lookup.insert((pos, gi), idx);
            if e.in_l {
                lookup.insert((pos, group.index_of(&gh)), idx);
            }
        }
    }

    let mut vertex_action = Vec::with_capacity(n);
    let mut edge_action = Vec::with_capacity(n);
    for delta in &elements {
        let mut vp = vec![0; vertices.len()];
        for v in 0..h.vertex_count() {
            for g in &elements {
                vp[vid(v, g)] = vid(v, &group.add(delta, g));
            }
        }
        let ep: Vec<usize> = edges
            .iter()
            .map(|ce| {
                let (pos, g) = ce.lift.as_ref().expect("lifted edge");
                lookup[&(*pos, group.index_of(&group.add(delta, g)))]
            })
            .collect();
        vertex_action.push(vp);
        edge_action.push(ep);
    }

    CoveredGraph {
        group,
        vertices,
        edges,
        vertex_action,
        edge_action,
    }
}

/// Quotient gain graph. The representative of each vertex orbit is its
/// lowest-index vertex and each edge orbit is represented by its lowest-index
/// edge, oriented as stored.
pub fn quotient(g: &CoveredGraph) -> Result<GainGraph> {
    if !g.is_free_on_vertices() {
        return Err(Error::Unsupported("group does not act freely on the vertices".into()));
    }
    let group = &g.group;
    let elements = group.elements();
    // vertex -> (orbit index, γ) with vertex = γ · representative
    let mut place: Vec<Option<(usize, usize)>> = vec![None; g.vertex_count()];
    let mut names = Vec::new();
    for v in 0..g.vertex_count() {
        if place[v].is_some() {
            continue;
        }
        let orbit = names.len();
        names.push(g.vertices[v].clone());
        for (gi, p) in g.vertex_action.iter().enumerate() {
            place[p[v]] = Some((orbit, gi));
        }
    }

    let mut seen = vec![false; g.edges.len()];
    let mut edges = Vec::new();
    for (i, e) in g.edges.iter().enumerate() {
        if seen[i] {
            continue;
        }
        let mut stabilized = false;
        for (gi, p) in g.edge_action.iter().enumerate() {
            seen[p[i]] = true;
            if gi != 0 && p[i] == i {
                stabilized = true;
            }
        }
        let (tail, ga) = place[e.u].unwrap();
        let (head, gb) = place[e.v].unwrap();
        let gain = group.add(&elements[gb], &group.neg(&elements[ga]));
        edges.push(GainEdge::new(edges.len() as u32, tail, head, gain).in_l(stabilized));
    }
    GainGraph::new(group.clone(), names, edges)
}
