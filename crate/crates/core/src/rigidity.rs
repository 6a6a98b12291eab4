//! Rigidity matrices, orbit rigidity matrices and their ranks.
//!
//! Rows store raw Plücker coordinates of the bars and motions pair with them
//! through the coordinate dot product. For a body-bar framework `(G, b)` the
//! row of an edge `{u, v}` is `b(e)` in the block of `u` and `-b(e)` in the
//! block of `v`. For a quotient `(H, ψ, b̃)` and an irrep `ρ_j` the row of a
//! non-loop is `b̃` at the tail and `-(τ̂²_j(ψ))^{-1} b̃` at the head; a loop
//! gets `(I - (τ̂²_j(ψ))^{-1}) b̃`.
//!
//! A `ρ_j`-symmetric motion is a kernel vector of the entrywise conjugate
//! of the orbit matrix, which only matters for non-real characters.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{binomial, Extensor};
use crate::error::{Error, Result};
use crate::gaingraph::GainGraph;
use crate::linalg::Matrix;
use crate::scalar::{Field, Rational};
use crate::symmetry::{
    fixed_subspace_basis, tau_hat2_j, trivial_motion_dim, GroupElement, PointRepresentation,
};

/// A bar: its grade-2 extensor and, when known, the two homogeneous points
/// spanning it.
#[derive(Clone, Debug, PartialEq)]
pub struct Bar {
    pub extensor: Extensor,
    pub points: Option<(Vec<Rational>, Vec<Rational>)>,
}

impl Bar {
    pub fn through(p: Vec<Rational>, q: Vec<Rational>) -> Result<Self> {
        let extensor = crate::algebra::wedge2(&p, &q)?;
        Ok(Self {
            extensor,
            points: Some((p, q)),
        })
    }

    pub fn from_extensor(extensor: Extensor) -> Self {
        Self {
            extensor,
            points: None,
        }
    }
}

/// One bar per edge, in edge order.
#[derive(Clone, Debug, PartialEq)]
pub struct BarConfiguration {
    d: usize,
    bars: Vec<Bar>,
}

impl BarConfiguration {
    pub fn new(d: usize, bars: Vec<Bar>) -> Result<Self> {
        for (i, b) in bars.iter().enumerate() {
            if b.extensor.dim() != d || b.extensor.grade() != 2 {
                return Err(Error::Input(format!("bar {i} is not a line in dimension {d}")));
            }
            if b.extensor.is_zero() || !b.extensor.is_decomposable() {
                return Err(Error::Input(format!("bar {i} is not a nonzero decomposable 2-extensor")));
            }
        }
        Ok(Self { d, bars })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn bars(&self) -> &[Bar] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn extensors(&self) -> Vec<Extensor> {
        self.bars.iter().map(|b| b.extensor.clone()).collect()
    }
}

/// `R(G, b)` for a multigraph given by its endpoint list.
pub fn rigidity_matrix(
    vertex_count: usize,
    endpoints: &[(usize, usize)],
    bars: &[Extensor],
) -> Result<Matrix<Rational>> {
    if endpoints.len() != bars.len() {
        return Err(Error::Input(format!(
            "{} edges but {} bars",
            endpoints.len(),
            bars.len()
        )));
    }
    let m = bars.first().map_or(0, |b| b.coords().len());
    let mut r = Matrix::zeros(endpoints.len(), m * vertex_count);
    for (row, (&(u, v), b)) in endpoints.iter().zip(bars).enumerate() {
        if u >= vertex_count || v >= vertex_count {
            return Err(Error::Input(format!("edge {row} has an unknown endpoint")));
        }
        if u == v {
            continue;
        }
        for (c, x) in b.coords().iter().enumerate() {
            r.set(row, u * m + c, x.clone());
            r.set(row, v * m + c, -x.clone());
        }
    }
    Ok(r)
}

/// Checks that every loop in `L` carries a bar of the form `p̂ ∧ τ̂(ψ)p̂`:
/// a decomposable extensor negated by `τ̂^(2)(ψ)`.
pub fn check_loop_form(
    h: &GainGraph,
    config: &BarConfiguration,
    rep: &PointRepresentation,
) -> Result<()> {
    for (e, bar) in h.edges().iter().zip(config.bars()) {
        if !e.in_l {
            continue;
        }
        let image = bar.extensor.transform(rep.tau_hat2(&e.gain));
        if image != bar.extensor.neg() {
            return Err(Error::LoopForm { edge: e.id.0 });
        }
    }
    Ok(())
}

fn check_shapes(h: &GainGraph, config: &BarConfiguration, rep: &PointRepresentation) -> Result<()> {
    if h.group() != rep.group() {
        return Err(Error::Input("gain graph and representation use different groups".into()));
    }
    if config.len() != h.edge_count() {
        return Err(Error::Input(format!(
            "{} edges but {} bars",
            h.edge_count(),
            config.len()
        )));
    }
    if config.dim() != rep.dim() {
        return Err(Error::Dimension {
            expected: rep.dim(),
            found: config.dim(),
        });
    }
    Ok(())
}

/// `O_j(H, ψ, b̃)` over the field `T`.
pub fn orbit_matrix_in<T: Field>(
    h: &GainGraph,
    config: &BarConfiguration,
    rep: &PointRepresentation,
    j: &GroupElement,
) -> Result<Matrix<T>> {
    check_shapes(h, config, rep)?;
    check_loop_form(h, config, rep)?;
    let m = rep.screw_dim();
    let mut o = Matrix::zeros(h.edge_count(), m * h.vertex_count());
    for (row, (e, bar)) in h.edges().iter().zip(config.bars()).enumerate() {
        let inv = tau_hat2_j(rep, j, &e.gain)
            .inverse_to_field::<T>()
            .ok_or_else(|| Error::Unsupported(format!("irrep {j} needs complex scalars")))?;
        let b: Vec<T> = bar.extensor.coords().iter().map(T::from_rational).collect();
        let moved = inv.mul_vec(&b);
        for c in 0..m {
            if e.is_loop() {
                o.set(row, e.tail * m + c, b[c].clone() - moved[c].clone());
            } else {
                o.set(row, e.tail * m + c, b[c].clone());
                o.set(row, e.head * m + c, -moved[c].clone());
            }
        }
    }
    Ok(o)
}

/// An orbit rigidity matrix in the field its character lives in.
#[derive(Clone, Debug)]
pub enum OrbitMatrix {
    Exact(GroupElement, Matrix<Rational>),
    Complex(GroupElement, Matrix<Complex64>),
}

impl OrbitMatrix {
    pub fn irrep(&self) -> &GroupElement {
        match self {
            Self::Exact(g, _) | Self::Complex(g, _) => g,
        }
    }

    pub fn field(&self) -> &'static str {
        match self {
            Self::Exact(..) => Rational::NAME,
            Self::Complex(..) => Complex64::NAME,
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            Self::Exact(_, m) => matrix_rank(m),
            Self::Complex(_, m) => matrix_rank(m),
        }
    }

    pub fn nrows(&self) -> usize {
        match self {
            Self::Exact(_, m) => m.nrows(),
            Self::Complex(_, m) => m.nrows(),
        }
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        match self {
            Self::Exact(_, m) => m.row(i).iter().all(Field::is_negligible),
            Self::Complex(_, m) => m.row(i).iter().all(Field::is_negligible),
        }
    }
}

pub fn orbit_matrix(
    h: &GainGraph,
    config: &BarConfiguration,
    rep: &PointRepresentation,
    j: &GroupElement,
) -> Result<OrbitMatrix> {
    if rep.group().is_real_character(j) {
        Ok(OrbitMatrix::Exact(j.clone(), orbit_matrix_in(h, config, rep, j)?))
    } else {
        Ok(OrbitMatrix::Complex(j.clone(), orbit_matrix_in(h, config, rep, j)?))
    }
}

/// Exact rank over the rationals; over complex floats, the number of
/// singular values above `2^-40 · max(m, n) · σ_max`.
pub fn matrix_rank<T: Field>(m: &Matrix<T>) -> usize {
    T::rank(m)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IrrepReport {
    pub irrep: GroupElement,
    pub field: &'static str,
    pub rank: usize,
    pub trivial: usize,
    pub flex: usize,
    pub rigid: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RigidityReport {
    pub d: usize,
    pub vertices: usize,
    pub edges: usize,
    pub irreps: Vec<IrrepReport>,
    pub total_flex: usize,
    pub rigid: bool,
}

impl RigidityReport {
    pub fn irrep(&self, g: &GroupElement) -> Option<&IrrepReport> {
        self.irreps.iter().find(|r| &r.irrep == g)
    }
}

pub fn analyze_irrep(
    h: &GainGraph,
    config: &BarConfiguration,
    rep: &PointRepresentation,
    g: &GroupElement,
) -> Result<IrrepReport> {
    let o = orbit_matrix(h, config, rep, g)?;
    let rank = o.rank();
    let trivial = trivial_motion_dim(rep, g)?;
    let columns = rep.screw_dim() * h.vertex_count();
    let flex = columns
        .checked_sub(rank + trivial)
        .ok_or_else(|| Error::Consistency(format!("rank {rank} plus {trivial} trivial motions exceeds {columns} columns for irrep {g}")))?;
    Ok(IrrepReport {
        irrep: g.clone(),
        field: o.field(),
        rank,
        trivial,
        flex,
        rigid: flex == 0,
    })
}

/// Per-irrep ranks, trivial dimensions and flex counts; the irreps are
/// processed in parallel.
pub fn analyze(
    h: &GainGraph,
    config: &BarConfiguration,
    rep: &PointRepresentation,
) -> Result<RigidityReport> {
    analyze_irreps(h, config, rep, &rep.group().elements())
}

pub fn analyze_irreps(
    h: &GainGraph,
    config: &BarConfiguration,
    rep: &PointRepresentation,
    irreps: &[GroupElement],
) -> Result<RigidityReport> {
    check_shapes(h, config, rep)?;
    let irreps: Vec<IrrepReport> = irreps
        .par_iter()
        .map(|g| analyze_irrep(h, config, rep, g))
        .collect::<Result<_>>()?;
    let total_flex = irreps.iter().map(|r| r.flex).sum();
    Ok(RigidityReport {
        d: rep.dim(),
        vertices: h.vertex_count(),
        edges: h.edge_count(),
        rigid: total_flex == 0,
        total_flex,
        irreps,
    })
}

/// Nontrivial `ρ_g`-symmetric infinitesimal motions: a basis of the kernel
/// part orthogonal to the constant trivial motions.
#[derive(Clone, Debug, PartialEq)]
pub struct Flex<T> {
    pub irrep: GroupElement,
    /// Each vector holds one screw per quotient vertex, concatenated.
    pub motions: Vec<Vec<T>>,
    pub screw_dim: usize,
}

impl<T: Field> Flex<T> {
    pub fn screw(&self, motion: usize, vertex: usize) -> &[T] {
        &self.motions[motion][vertex * self.screw_dim..(vertex + 1) * self.screw_dim]
    }
}

fn conj_matrix<T: Field>(m: &Matrix<T>) -> Matrix<T> {
    m.map(Field::conj)
}

fn hermitian_dot<T: Field>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.conj() * y.clone())
}

/// Constant assignments of the fixed-subspace vectors to every vertex.
pub fn trivial_motions<T: Field>(
    rep: &PointRepresentation,
    g: &GroupElement,
    vertices: usize,
) -> Result<Vec<Vec<T>>> {
    Ok(fixed_subspace_basis::<T>(rep, g)?
        .into_iter()
        .map(|t| (0..vertices).flat_map(|_| t.iter().cloned()).collect())
        .collect())
}

pub fn extract_flex<T: Field>(
    h: &GainGraph,
    config: &BarConfiguration,
    rep: &PointRepresentation,
    g: &GroupElement,
) -> Result<Option<Flex<T>>> {
    let o = orbit_matrix_in::<T>(h, config, rep, g)?;
    let kernel = T::nullspace(&conj_matrix(&o));
    let trivial = trivial_motions::<T>(rep, g, h.vertex_count())?;
    if kernel.len() <= trivial.len() {
        return Ok(None);
    }
    // coefficients c with <t_i, K c> = 0 for every trivial t_i
    let gram = Matrix::from_fn(trivial.len(), kernel.len(), |i, k| hermitian_dot(&trivial[i], &kernel[k]));
    let coeffs = if trivial.is_empty() {
        (0..kernel.len())
            .map(|k| (0..kernel.len()).map(|i| if i == k { T::one() } else { T::zero() }).collect())
            .collect()
    } else {
        T::nullspace(&gram)
    };
    let len = kernel[0].len();
    let motions: Vec<Vec<T>> = coeffs
        .iter()
        .map(|c: &Vec<T>| {
            (0..len)
                .map(|x| {
                    kernel
                        .iter()
                        .zip(c)
                        .fold(T::zero(), |acc, (k, ci)| acc + k[x].clone() * ci.clone())
                })
                .collect()
        })
        .collect();
    Ok(Some(Flex {
        irrep: g.clone(),
        motions,
        screw_dim: rep.screw_dim(),
    }))
}

/// Residual check: every motion satisfies each edge constraint.
pub fn verify_flex<T: Field>(
    h: &GainGraph,
    config: &BarConfiguration,
    rep: &PointRepresentation,
    flex: &Flex<T>,
) -> Result<bool> {
    let o = conj_matrix(&orbit_matrix_in::<T>(h, config, rep, &flex.irrep)?);
    Ok(flex
        .motions
        .iter()
        .all(|m| o.mul_vec(m).iter().all(Field::is_negligible)))
}

/// Exact rank of `R(G, b)` for the covering framework.
pub fn lifted_rank(
    h: &GainGraph,
    config: &BarConfiguration,
    rep: &PointRepresentation,
) -> Result<usize> {
    check_shapes(h, config, rep)?;
    let (cover, lifted) = crate::genframe::lift_bars(h, config, rep)?;
    Ok(matrix_rank(&rigidity_matrix(
        cover.vertex_count(),
        &cover.endpoints(),
        &lifted.extensors(),
    )?))
}

/// Rank of the lifted rigidity matrix and the sum of the orbit-matrix
/// ranks, which must agree.
pub fn crosscheck_block_ranks(
    h: &GainGraph,
    config: &BarConfiguration,
    rep: &PointRepresentation,
) -> Result<(usize, usize)> {
    if !rep.group().is_elementary_abelian_2() {
        return Err(Error::Unsupported(
            "exact block crosscheck needs a group of the form (Z/2Z)^l".into(),
        ));
    }
    let full = lifted_rank(h, config, rep)?;
    let blocks: usize = rep
        .group()
        .elements()
        .par_iter()
        .map(|g| orbit_matrix(h, config, rep, g).map(|o| o.rank()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    if full != blocks {
        return Err(Error::Consistency(format!(
            "lifted rank {full} differs from the sum of orbit ranks {blocks}"
        )));
    }
    Ok((full, blocks))
}

/// `C(d+1,2)(|V| - 1)`, the rank of an infinitesimally rigid body-bar
/// framework on `|V| ≥ 1` bodies.
pub fn rigid_rank(d: usize, vertices: usize) -> usize {
    binomial(d + 1, 2) * vertices.saturating_sub(1)
}
