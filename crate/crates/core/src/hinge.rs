//! Body-hinge frameworks.
//!
//! A hinge is a `(d-2)`-dimensional affine subspace spanned by `d-1`
//! homogeneous points, and it constrains its two bodies exactly like
//! `C(d+1,2) - 1` bars meeting it. The bars used here are lines through a
//! random point of the hinge, so they are decomposable and lie in the
//! orthogonal complement of `∗h̃`.

use rand::Rng;
use serde::Serialize;

use crate::algebra::{binomial, cap_product, combinations, complement, hodge_star, wedge, Extensor};
use crate::error::{Error, Result};
use crate::gaingraph::{multiply_edges, GainGraph};
use crate::genframe::{random_point, GenericSeed};
use crate::linalg::{rational_nullspace, rational_rank, Matrix};
use crate::matroid::{combinatorial_verdict, CombinatorialVerdict};
use crate::rigidity::{analyze, orbit_matrix, Bar, BarConfiguration, RigidityReport};
use crate::scalar::{int, Rational};
use crate::symmetry::{GroupElement, PointRepresentation};

/// Attempts at drawing bars before a hinge is declared degenerate.
const MAX_DRAWS: usize = 32;

#[derive(Clone, Debug, PartialEq)]
pub struct Hinge {
    pub extensor: Extensor,
    pub points: Vec<Vec<Rational>>,
}

impl Hinge {
    pub fn through(points: Vec<Vec<Rational>>, d: usize) -> Result<Self> {
        if points.len() + 1 != d {
            return Err(Error::Input(format!(
                "a hinge in dimension {d} needs {} points, got {}",
                d - 1,
                points.len()
            )));
        }
        let extensor = wedge(&points, d)?;
        if extensor.is_zero() {
            return Err(Error::Input("hinge points are affinely dependent".into()));
        }
        Ok(Self { extensor, points })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HingeConfiguration {
    d: usize,
    hinges: Vec<Hinge>,
}

impl HingeConfiguration {
    pub fn new(d: usize, hinges: Vec<Hinge>) -> Result<Self> {
        if d < 2 {
            return Err(Error::Input("body-hinge frameworks need d ≥ 2".into()));
        }
        for (i, h) in hinges.iter().enumerate() {
            if h.extensor.dim() != d || h.extensor.grade() + 1 != d {
                return Err(Error::Input(format!("hinge {i} has the wrong grade")));
            }
        }
        Ok(Self { d, hinges })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn hinges(&self) -> &[Hinge] {
        &self.hinges
    }
}

fn require_free_edges(h: &GainGraph) -> Result<()> {
    if h.has_nonfree_loops() {
        return Err(Error::Unsupported(
            "body-hinge analysis needs a free action on the edges (L must be empty)".into(),
        ));
    }
    Ok(())
}

pub fn random_generic_hinges(
    h: &GainGraph,
    rep: &PointRepresentation,
    seed: GenericSeed,
) -> Result<HingeConfiguration> {
    require_free_edges(h)?;
    let d = rep.dim();
    let mut rng = seed.rng();
    let mut hinges = Vec::with_capacity(h.edge_count());
    for _ in h.edges() {
        let hinge = loop {
            let points = (0..d - 1).map(|_| random_point(&mut rng, d, seed.bound)).collect();
            if let Ok(hinge) = Hinge::through(points, d) {
                break hinge;
            }
        };
        hinges.push(hinge);
    }
    HingeConfiguration::new(d, hinges)
}

/// `τ̂^(d-1)(γ) h̃` for every lifted edge, aligned with `lift_cover(h)`.
pub fn lift_hinges(
    h: &GainGraph,
    config: &HingeConfiguration,
    rep: &PointRepresentation,
) -> Vec<Extensor> {
    let cover = crate::gaingraph::lift_cover(h);
    cover
        .edges()
        .iter()
        .map(|ce| {
            let (pos, gamma) = ce.lift.as_ref().expect("lifted edge");
            config.hinges[*pos]
                .extensor
                .transform(&rep.tau_hat_k(gamma, config.d - 1))
        })
        .collect()
}

/// Basis of `{x : ⟨x, ∗h̃⟩ = 0}` from the exact nullspace of the single row.
pub fn complement_basis(hinge: &Extensor) -> Vec<Vec<Rational>> {
    let star = hodge_star(hinge);
    rational_nullspace(&Matrix::from_rows(vec![star.coords().to_vec()], star.coords().len()))
}

/// `C(d+1,2) - 1` independent bars meeting the hinge, each the line through
/// a random point of the hinge and a random point of space.
pub fn bars_for_hinge(hinge: &Hinge, d: usize, rng: &mut impl Rng, bound: i64) -> Result<Vec<Bar>> {
    let count = binomial(d + 1, 2) - 1;
    for _ in 0..MAX_DRAWS {
        let mut bars = Vec::with_capacity(count);
        for _ in 0..count {
            // an affine combination of the hinge points, integer weights
            let k = hinge.points.len();
            let mut weights: Vec<i64> = (0..k.saturating_sub(1)).map(|_| rng.random_range(-bound..=bound)).collect();
            weights.push(1 - weights.iter().sum::<i64>());
            let a: Vec<Rational> = (0..=d)
                .map(|c| {
                    hinge
                        .points
                        .iter()
                        .zip(&weights)
                        .fold(int(0), |acc, (p, &w)| acc + p[c].clone() * int(w))
                })
                .collect();
            let c = random_point(rng, d, bound);
            bars.push(Bar::through(a, c)?);
        }
        let rows = Matrix::from_rows(bars.iter().map(|b| b.extensor.coords().to_vec()).collect(), binomial(d + 1, 2));
        if rational_rank(&rows) == count && bars.iter().all(|b| !b.extensor.is_zero()) {
            return Ok(bars);
        }
    }
    Err(Error::Input("could not draw independent bars for a hinge".into()))
}

/// The bar framework on `(C(d+1,2)-1)H` equivalent to the hinges.
pub fn hinge_to_bars(
    h: &GainGraph,
    config: &HingeConfiguration,
    seed: GenericSeed,
) -> Result<(GainGraph, BarConfiguration)> {
    require_free_edges(h)?;
    if config.hinges.len() != h.edge_count() {
        return Err(Error::Input(format!(
            "{} edges but {} hinges",
            h.edge_count(),
            config.hinges.len()
        )));
    }
    let d = config.d;
    let multiplied = multiply_edges(h, binomial(d + 1, 2) - 1)?;
    let mut rng = seed.rng();
    let mut bars = Vec::with_capacity(multiplied.edge_count());
    for hinge in &config.hinges {
        if hinge.extensor.is_zero() {
            return Err(Error::Input("zero hinge extensor".into()));
        }
        bars.extend(bars_for_hinge(hinge, d, &mut rng, seed.bound)?);
    }
    Ok((multiplied, BarConfiguration::new(d, bars)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct IrrepAgreement {
    pub irrep: GroupElement,
    pub numeric_flex: usize,
    pub combinatorial_deficiency: usize,
    pub agree: bool,
}

#[derive(Clone, Debug)]
pub struct HingeReport {
    pub multiplied: GainGraph,
    pub numeric: RigidityReport,
    /// Present when the group and representation admit the combinatorial test.
    pub combinatorial: Option<Vec<CombinatorialVerdict>>,
    pub agreement: Vec<IrrepAgreement>,
}

impl HingeReport {
    pub fn agree(&self) -> bool {
        self.agreement.iter().all(|a| a.agree)
    }

    pub fn ensure_agreement(&self) -> Result<()> {
        match self.agreement.iter().find(|a| !a.agree) {
            None => Ok(()),
            Some(a) => Err(Error::Consistency(format!(
                "irrep {}: numeric flex {} but combinatorial deficiency {}",
                a.irrep, a.numeric_flex, a.combinatorial_deficiency
            ))),
        }
    }
}

/// Numeric analysis of the equivalent bar framework and, for diagonal
/// `(Z/2)^l` representations, the matroid-union count on the multiplied
/// quotient graph.
pub fn analyze_hinge(
    h: &GainGraph,
    rep: &PointRepresentation,
    seed: GenericSeed,
    oracle: bool,
) -> Result<HingeReport> {
    let hinges = random_generic_hinges(h, rep, seed)?;
    analyze_hinge_configuration(h, &hinges, rep, seed.next(), oracle)
}

pub fn analyze_hinge_configuration(
    h: &GainGraph,
    hinges: &HingeConfiguration,
    rep: &PointRepresentation,
    bar_seed: GenericSeed,
    oracle: bool,
) -> Result<HingeReport> {
    let (multiplied, bars) = hinge_to_bars(h, hinges, bar_seed)?;
    let numeric = analyze(&multiplied, &bars, rep)?;
    let combinatorial = if rep.require_combinatorial().is_ok() {
        let verdicts = rep
            .group()
            .elements()
            .iter()
            .map(|g| combinatorial_verdict(&multiplied, rep, g, oracle))
            .collect::<Result<Vec<_>>>()?;
        Some(verdicts)
    } else {
        None
    };
    let agreement = combinatorial
        .iter()
        .flatten()
        .zip(&numeric.irreps)
        .map(|(c, n)| IrrepAgreement {
            irrep: n.irrep.clone(),
            numeric_flex: n.flex,
            combinatorial_deficiency: c.deficiency,
            agree: n.flex == c.deficiency,
        })
        .collect();
    Ok(HingeReport {
        multiplied,
        numeric,
        combinatorial,
        agreement,
    })
}

/// The special configuration from a union decomposition of the multiplied
/// graph: the copy in part `(i,j)` gets the bar `e_i ∧ e_j`, and the hinge of
/// each original edge is `e_K` for `K` the complement of a pair `(a,b)` whose
/// part holds none of its copies. Unassigned copies take the remaining pairs.
pub fn proof_configuration(
    h: &GainGraph,
    verdict: &CombinatorialVerdict,
    d: usize,
) -> Result<(Vec<Extensor>, BarConfiguration)> {
    require_free_edges(h)?;
    let m = binomial(d + 1, 2);
    let copies = m - 1;
    let pairs = combinations(d + 1, 2);
    let assignment = verdict.decomposition.assignment(h.edge_count() * copies);
    let mut hinges = Vec::with_capacity(h.edge_count());
    let mut bars = Vec::with_capacity(h.edge_count() * copies);
    for e in 0..h.edge_count() {
        let own = &assignment[e * copies..(e + 1) * copies];
        let used: Vec<usize> = own.iter().flatten().copied().collect();
        let free = (0..m).find(|k| !used.contains(k)).expect("more pairs than copies");
        let mut spare = (0..m).filter(|k| *k != free && !used.contains(k));
        for slot in own {
            let k = match slot {
                Some(k) => *k,
                None => spare.next().expect("enough spare pairs"),
            };
            bars.push(Bar::from_extensor(Extensor::basis(d, &pairs[k])));
        }
        hinges.push(Extensor::basis(d, &complement(&pairs[free], d + 1)));
    }
    for (e, hinge) in hinges.iter().enumerate() {
        for bar in &bars[e * copies..(e + 1) * copies] {
            let pairing = cap_product(&bar.extensor, hinge)?;
            if pairing != int(0) {
                return Err(Error::Consistency("special bar does not meet its hinge".into()));
            }
        }
    }
    Ok((hinges, BarConfiguration::new(d, bars)?))
}

/// Rank of the orbit matrix at the special configuration equals the union
/// rank of the multiplied graph.
pub fn proof_self_test(h: &GainGraph, rep: &PointRepresentation, g: &GroupElement) -> Result<bool> {
    let d = rep.dim();
    let multiplied = multiply_edges(h, binomial(d + 1, 2) - 1)?;
    let verdict = combinatorial_verdict(&multiplied, rep, g, false)?;
    let (_, bars) = proof_configuration(h, &verdict, d)?;
    let rank = orbit_matrix(&multiplied, &bars, rep, g)?.rank();
    Ok(rank == verdict.rank)
}

/// Lines meeting a hinge pair to zero with its star; a sanity helper for
/// callers holding raw extensors.
pub fn meets(bar: &Extensor, hinge: &Extensor) -> Result<bool> {
    Ok(cap_product(bar, hinge)? == int(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaingraph::GainEdge;
    use crate::rigidity::{matrix_rank, rigidity_matrix};
    use crate::symmetry::{presets, AbelianGroup};

    fn pt(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn axis_hinge_complement() {
        let e12 = Extensor::basis(3, &[0, 1]);
        let basis = complement_basis(&e12);
        assert_eq!(basis.len(), 5);
        for v in &basis {
            assert_eq!(v[5], int(0));
        }
    }

    #[test]
    fn generic_hinge_bars() {
        let hinge = Hinge::through(vec![pt(&[1, 2, 3, 1]), pt(&[-4, 0, 7, 1])], 3).unwrap();
        let mut rng = GenericSeed::new(5).rng();
        let bars = bars_for_hinge(&hinge, 3, &mut rng, 1000).unwrap();
        assert_eq!(bars.len(), 5);
        let star = hodge_star(&hinge.extensor);
        for b in &bars {
            assert_eq!(b.extensor.dot(&star).unwrap(), int(0));
            assert!(meets(&b.extensor, &hinge.extensor).unwrap());
        }
    }

    #[test]
    fn two_bodies_one_hinge() {
        let rep = presets::trivial(3);
        let h = GainGraph::new(
            rep.group().clone(),
            vec!["a".into(), "b".into()],
            vec![GainEdge::new(0, 0, 1, rep.group().identity())],
        )
        .unwrap();
        let hinges = random_generic_hinges(&h, &rep, GenericSeed::new(11)).unwrap();
        let (m, bars) = hinge_to_bars(&h, &hinges, GenericSeed::new(12)).unwrap();
        let endpoints: Vec<(usize, usize)> = m.edges().iter().map(|e| (e.tail, e.head)).collect();
        let r = rigidity_matrix(2, &endpoints, &bars.extensors()).unwrap();
        assert_eq!(matrix_rank(&r), 5);
        let report = analyze_hinge(&h, &rep, GenericSeed::new(11), false).unwrap();
        assert_eq!(report.numeric.total_flex, 1);
        assert!(report.agree());
    }

    #[test]
    fn cs_three_loops() {
        let rep = presets::mirror_xy();
        let s = GroupElement(vec![1]);
        let h = GainGraph::new(
            AbelianGroup::elementary(1),
            vec!["u".into()],
            (0..3).map(|i| GainEdge::new(i, 0, 0, s.clone())).collect(),
        )
        .unwrap();
        let report = analyze_hinge(&h, &rep, GenericSeed::new(1), false).unwrap();
        assert!(report.agree());
        let hinges = random_generic_hinges(&h, &rep, GenericSeed::new(2)).unwrap();
        let lifted = lift_hinges(&h, &hinges, &rep);
        assert_eq!(lifted.len(), 6);
        for g in rep.group().elements() {
            assert!(proof_self_test(&h, &rep, &g).unwrap());
        }
    }

    #[test]
    fn nonfree_loops_are_rejected() {
        let rep = presets::mirror_xy();
        let h = GainGraph::new(
            AbelianGroup::elementary(1),
            vec!["u".into()],
            vec![GainEdge::new(0, 0, 0, GroupElement(vec![1])).in_l(true)],
        )
        .unwrap();
        assert!(matches!(
            random_generic_hinges(&h, &rep, GenericSeed::new(0)),
            Err(Error::Unsupported(_))
        ));
    }
}
