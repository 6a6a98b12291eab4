//! Random symmetric configurations and their lifts to the covering graph.
//!
//! Coordinates are integers drawn uniformly from `[-bound, bound]` by a
//! seeded ChaCha8 generator. Integer points are never algebraically
//! independent, so genericity is judged in practice by agreement of exact
//! ranks across independent seeds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::gaingraph::{lift_cover, CoveredGraph, GainGraph};
use crate::rigidity::{Bar, BarConfiguration};
use crate::scalar::{int, Rational};
use crate::symmetry::PointRepresentation;

pub const DEFAULT_BOUND: i64 = 1_000_000;
pub const PRNG_NAME: &str = "ChaCha8";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GenericSeed {
    pub seed: u64,
    pub bound: i64,
}

impl GenericSeed {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            bound: DEFAULT_BOUND,
        }
    }

    pub fn with_bound(seed: u64, bound: i64) -> Self {
        Self {
            seed,
            bound: bound.max(1),
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// A second, independent stream for agreement checks.
    pub fn next(&self) -> Self {
        Self {
            seed: self.seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407),
            bound: self.bound,
        }
    }
}

/// A homogeneous point `(x_1, .., x_d, 1)` with random integer coordinates.
pub fn random_point(rng: &mut impl Rng, d: usize, bound: i64) -> Vec<Rational> {
    let mut p: Vec<Rational> = (0..d).map(|_| int(rng.random_range(-bound..=bound))).collect();
    p.push(int(1));
    p
}

/// For an edge outside `L` the bar joins two random points; a loop in `L`
/// gets `p̂ ∧ τ̂(ψ)p̂` for a random `p̂`.
pub fn random_generic_bars(
    h: &GainGraph,
    rep: &PointRepresentation,
    seed: GenericSeed,
) -> Result<BarConfiguration> {
    let d = rep.dim();
    let mut rng = seed.rng();
    let mut bars = Vec::with_capacity(h.edge_count());
    for e in h.edges() {
        let tau = rep.augmented(&e.gain);
        let bar = loop {
            let p = random_point(&mut rng, d, seed.bound);
            let q = if e.in_l {
                tau.mul_vec(&p)
            } else {
                random_point(&mut rng, d, seed.bound)
            };
            let bar = Bar::through(p, q)?;
            if !bar.extensor.is_zero() {
                break bar;
            }
        };
        bars.push(bar);
    }
    BarConfiguration::new(d, bars)
}

/// The covering framework: the lifted edge `θ(γ)e` carries `τ̂^(2)(γ) b̃(e)`,
/// realized on the points as `τ̂(γ)p̂` and `τ̂(γ)q̂` when they are known.
pub fn lift_bars(
    h: &GainGraph,
    config: &BarConfiguration,
    rep: &PointRepresentation,
) -> Result<(CoveredGraph, BarConfiguration)> {
    let cover = lift_cover(h);
    let mut bars = Vec::with_capacity(cover.edges().len());
    for ce in cover.edges() {
        let (pos, gamma) = ce.lift.as_ref().expect("lifted edge");
        let base = &config.bars()[*pos];
        let bar = match &base.points {
            Some((p, q)) => {
                let tau = rep.augmented(gamma);
                Bar::through(tau.mul_vec(p), tau.mul_vec(q))?
            }
            None => Bar::from_extensor(base.extensor.transform(rep.tau_hat2(gamma))),
        };
        bars.push(bar);
    }
    Ok((cover, BarConfiguration::new(rep.dim(), bars)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use crate::gaingraph::GainEdge;
    use crate::rigidity::check_loop_form;
    use crate::symmetry::{presets, AbelianGroup, GroupElement};

    fn cs_stewart() -> GainGraph {
        let s = GroupElement(vec![1]);
        GainGraph::new(
            AbelianGroup::elementary(1),
            vec!["u".into()],
            (0..4).map(|i| GainEdge::new(i, 0, 0, s.clone()).in_l(i < 2)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn deterministic_and_in_range() {
        let rep = presets::mirror_xy();
        let h = cs_stewart();
        let a = random_generic_bars(&h, &rep, GenericSeed::new(42)).unwrap();
        let b = random_generic_bars(&h, &rep, GenericSeed::new(42)).unwrap();
        assert_eq!(a, b);
        let c = random_generic_bars(&h, &rep, GenericSeed::new(43)).unwrap();
        assert_ne!(a, c);
        for bar in a.bars() {
            let (p, q) = bar.points.as_ref().unwrap();
            assert_eq!(p[3], int(1));
            assert_eq!(q[3], int(1));
            assert!(p.iter().all(|x| x.abs() <= int(DEFAULT_BOUND)));
        }
        check_loop_form(&h, &a, &rep).unwrap();
    }

    #[test]
    fn mirror_loop_points() {
        let rep = presets::mirror_xy();
        let h = cs_stewart();
        let conf = random_generic_bars(&h, &rep, GenericSeed::new(7)).unwrap();
        let (p, q) = conf.bars()[0].points.clone().unwrap();
        assert_eq!((&p[0], &p[1], &p[3]), (&q[0], &q[1], &q[3]));
        assert_eq!(p[2], -q[2].clone());
    }

    #[test]
    fn lifted_bars_are_equivariant() {
        let rep = presets::two_mirrors();
        let group = rep.group().clone();
        let g = |a, b| GroupElement(vec![a, b]);
        let h = GainGraph::new(
            group.clone(),
            vec!["a".into(), "b".into()],
            vec![
                GainEdge::new(0, 0, 1, g(0, 1)),
                GainEdge::new(1, 0, 0, g(1, 0)).in_l(true),
                GainEdge::new(2, 1, 1, g(1, 1)),
                GainEdge::new(3, 1, 0, g(0, 0)),
            ],
        )
        .unwrap();
        let conf = random_generic_bars(&h, &rep, GenericSeed::new(3)).unwrap();
        let (cover, lifted) = lift_bars(&h, &conf, &rep).unwrap();
        assert_eq!(lifted.len(), 4 + 2 + 4 + 4);
        for (i, bar) in lifted.bars().iter().enumerate() {
            for delta in group.elements() {
                let j = cover.edge_image(&delta, i);
                let moved = bar.extensor.transform(rep.tau_hat2(&delta));
                let target = &lifted.bars()[j].extensor;
                // edges over L may come back with the opposite orientation
                let over_l = h.edges()[cover.edges()[i].lift.as_ref().unwrap().0].in_l;
                assert!(moved == *target || (over_l && moved == target.neg()));
            }
        }
    }
}
