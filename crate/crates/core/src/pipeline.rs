//! End-to-end analyses at random generic configurations and the randomized
//! agreement harness shared by the command line tool and the test suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaingraph::{GainEdge, GainGraph};
use crate::genframe::{random_generic_bars, GenericSeed};
use crate::matroid::combinatorial_verdict;
use crate::rigidity::{analyze_irreps, lifted_rank, orbit_matrix, BarConfiguration, RigidityReport};
use crate::schema::{Framework, Model};
use crate::symmetry::{irrep_value, AbelianGroup, GroupElement, PointRepresentation};

/// A report at a random configuration, confirmed against a second seed.
#[derive(Clone, Debug)]
pub struct GenericAnalysis {
    pub report: RigidityReport,
    pub config: BarConfiguration,
    pub seeds: [u64; 2],
    /// Both samples gave the same rank for every irrep.
    pub agree: bool,
}

fn total_rank(r: &RigidityReport) -> usize {
    r.irreps.iter().map(|i| i.rank).sum()
}

/// Analyzes two independent random configurations and keeps the one of
/// larger rank; generic rank is the maximum over configurations.
pub fn analyze_generic(
    h: &GainGraph,
    rep: &PointRepresentation,
    seed: GenericSeed,
    irreps: &[GroupElement],
) -> Result<GenericAnalysis> {
    let second = seed.next();
    let (a, b) = rayon::join(
        || -> Result<_> {
            let c = random_generic_bars(h, rep, seed)?;
            Ok((analyze_irreps(h, &c, rep, irreps)?, c))
        },
        || -> Result<_> {
            let c = random_generic_bars(h, rep, second)?;
            Ok((analyze_irreps(h, &c, rep, irreps)?, c))
        },
    );
    let (ra, ca) = a?;
    let (rb, cb) = b?;
    let agree = ra.irreps.iter().zip(&rb.irreps).all(|(x, y)| x.rank == y.rank);
    let (report, config) = if total_rank(&rb) > total_rank(&ra) { (rb, cb) } else { (ra, ca) };
    Ok(GenericAnalysis {
        report,
        config,
        seeds: [seed.seed, second.seed],
        agree,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct InstanceParams {
    pub max_vertices: usize,
    pub max_edges: usize,
    /// Loops with an order-2 gain may be placed into `L`.
    pub allow_l: bool,
    /// Force at least one loop in `L`.
    pub require_l: bool,
}

impl Default for InstanceParams {
    fn default() -> Self {
        Self {
            max_vertices: 4,
            max_edges: 10,
            allow_l: true,
            require_l: false,
        }
    }
}

fn random_element(rng: &mut impl Rng, group: &AbelianGroup) -> GroupElement {
    group.element_at(rng.random_range(0..group.order()))
}

/// A random quotient gain graph with at most `max_vertices` vertices (at
/// least two for the trivial group) and `1..=max_edges` edges; loops never
/// carry the identity gain.
pub fn random_gain_graph(rng: &mut impl Rng, group: &AbelianGroup, params: InstanceParams) -> Result<GainGraph> {
    if params.max_vertices == 0 || params.max_edges == 0 {
        return Err(Error::Input("instance bounds must be positive".into()));
    }
    let order_two: Vec<GroupElement> = group
        .elements()
        .into_iter()
        .filter(|g| group.element_order(g) == 2)
        .collect();
    if params.require_l && order_two.is_empty() {
        return Err(Error::Input("no element of order 2 for a loop in L".into()));
    }
    if group.order() == 1 && params.max_vertices == 1 {
        return Err(Error::Input("the trivial group admits no loops".into()));
    }
    let min_vertices = if group.order() == 1 { 2 } else { 1 };
    let n = rng.random_range(min_vertices..=params.max_vertices);
    let m = rng.random_range(1..=params.max_edges);
    let mut edges = Vec::with_capacity(m);
    for i in 0..m {
        let forced_l = params.require_l && i == 0;
        let (tail, head) = if forced_l || (n == 1 && group.order() > 1) {
            let v = rng.random_range(0..n);
            (v, v)
        } else {
            loop {
                let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
                if u != v || group.order() > 1 {
                    break (u, v);
                }
            }
        };
        let (gain, in_l) = if tail == head {
            let in_l = forced_l || (params.allow_l && rng.random_bool(0.5) && !order_two.is_empty());
            if in_l {
                (order_two[rng.random_range(0..order_two.len())].clone(), true)
            } else {
                loop {
                    let g = random_element(rng, group);
                    if !group.is_identity(&g) {
                        break (g, false);
                    }
                }
            }
        } else {
            (random_element(rng, group), false)
        };
        edges.push(GainEdge::new(i as u32, tail, head, gain).in_l(in_l));
    }
    let names = (0..n).map(|v| format!("v{v}")).collect();
    GainGraph::new(group.clone(), names, edges)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IrrepComparison {
    pub irrep: GroupElement,
    pub numeric_rank: usize,
    pub union_rank: usize,
    pub flex: usize,
    pub deficiency: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceCheck {
    pub lifted_rank: usize,
    pub block_rank_sum: usize,
    pub irreps: Vec<IrrepComparison>,
    pub seeds_agree: bool,
}

impl InstanceCheck {
    pub fn additivity_holds(&self) -> bool {
        self.lifted_rank == self.block_rank_sum
    }

    pub fn matroid_agrees(&self) -> bool {
        self.irreps
            .iter()
            .all(|c| c.numeric_rank == c.union_rank && c.flex == c.deficiency)
    }

    pub fn passed(&self) -> bool {
        self.additivity_holds() && self.matroid_agrees()
    }
}

/// Rank additivity against the lifted framework and agreement of the
/// matroid-union rank with the orbit-matrix rank for every irrep.
pub fn check_instance(h: &GainGraph, rep: &PointRepresentation, seed: GenericSeed) -> Result<(InstanceCheck, BarConfiguration)> {
    let irreps = rep.group().elements();
    let generic = analyze_generic(h, rep, seed, &irreps)?;
    let lifted_rank = lifted_rank(h, &generic.config, rep)?;
    let block_rank_sum = total_rank(&generic.report);
    let irreps = generic
        .report
        .irreps
        .iter()
        .map(|r| {
            let v = combinatorial_verdict(h, rep, &r.irrep, false)?;
            Ok(IrrepComparison {
                irrep: r.irrep.clone(),
                numeric_rank: r.rank,
                union_rank: v.rank,
                flex: r.flex,
                deficiency: v.deficiency,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((
        InstanceCheck {
            lifted_rank,
            block_rank_sum,
            irreps,
            seeds_agree: generic.agree,
        },
        generic.config,
    ))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ZeroLoopCheck {
    /// Loops in `L` with `ρ_g(ψ) = -1` over all irreps.
    pub expected_zero: usize,
    pub zero_rows_ok: usize,
    /// The remaining loops in `L`.
    pub expected_nonzero: usize,
    pub nonzero_rows_ok: usize,
}

impl ZeroLoopCheck {
    pub fn passed(&self) -> bool {
        self.expected_zero == self.zero_rows_ok && self.expected_nonzero == self.nonzero_rows_ok
    }
}

/// Zero rows of loops in `L` must be exactly the ones with `ρ_g(ψ) = -1`.
/// A row counts as nonzero if it is nonzero in at least one of the two
/// seeded configurations.
pub fn check_zero_loops(h: &GainGraph, rep: &PointRepresentation, seed: GenericSeed) -> Result<ZeroLoopCheck> {
    let configs = [
        random_generic_bars(h, rep, seed)?,
        random_generic_bars(h, rep, seed.next())?,
    ];
    let mut out = ZeroLoopCheck::default();
    for g in rep.group().elements() {
        let matrices = configs
            .iter()
            .map(|c| orbit_matrix(h, c, rep, &g))
            .collect::<Result<Vec<_>>>()?;
        for (row, e) in h.edges().iter().enumerate() {
            if !e.in_l {
                continue;
            }
            if irrep_value(rep.group(), &g, &e.gain).sign() == Some(-1) {
                out.expected_zero += 1;
                if matrices.iter().all(|m| m.is_zero_row(row)) {
                    out.zero_rows_ok += 1;
                }
            } else {
                out.expected_nonzero += 1;
                if matrices.iter().any(|m| !m.is_zero_row(row)) {
                    out.nonzero_rows_ok += 1;
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct Mismatch {
    pub index: usize,
    pub seed: u64,
    pub reason: String,
    /// The failing framework in the input format, for replay.
    pub instance: serde_json::Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrosscheckSummary {
    pub instances: usize,
    pub additivity_failures: usize,
    pub matroid_failures: usize,
    pub seed_disagreements: usize,
    pub mismatches: Vec<Mismatch>,
}

impl CrosscheckSummary {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Seed of instance `i` derived from a master seed.
pub fn instance_seed(master: u64, i: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.random()
}

/// Runs `count` random instances in parallel.
pub fn run_crosscheck(
    count: usize,
    params: InstanceParams,
    rep: &PointRepresentation,
    master_seed: u64,
) -> Result<CrosscheckSummary> {
    rep.require_combinatorial()?;
    let results = (0..count)
        .into_par_iter()
        .map(|i| -> Result<(InstanceCheck, Option<Mismatch>)> {
            let seed = instance_seed(master_seed, i);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_gain_graph(&mut rng, rep.group(), params)?;
            let (check, config) = check_instance(&h, rep, GenericSeed::new(seed))?;
            let mismatch = (!check.passed()).then(|| {
                let framework = Framework {
                    model: Model::BodyBar,
                    rep: rep.clone(),
                    graph: h.clone(),
                    bars: Some(config),
                    hinges: None,
                };
                let reason = if !check.additivity_holds() {
                    format!("lifted rank {} but block sum {}", check.lifted_rank, check.block_rank_sum)
                } else {
                    let c = check.irreps.iter().find(|c| c.numeric_rank != c.union_rank || c.flex != c.deficiency).unwrap();
                    format!(
                        "irrep {}: orbit rank {} but union rank {}",
                        c.irrep, c.numeric_rank, c.union_rank
                    )
                };
                Mismatch {
                    index: i,
                    seed,
                    reason,
                    instance: serde_json::to_value(framework.to_document()).expect("serializable"),
                }
            });
            Ok((check, mismatch))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut summary = CrosscheckSummary {
        instances: count,
        additivity_failures: 0,
        matroid_failures: 0,
        seed_disagreements: 0,
        mismatches: Vec::new(),
    };
    for (check, mismatch) in results {
        summary.additivity_failures += usize::from(!check.additivity_holds());
        summary.matroid_failures += usize::from(!check.matroid_agrees());
        summary.seed_disagreements += usize::from(!check.seeds_agree);
        summary.mismatches.extend(mismatch);
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::presets;

    #[test]
    fn random_graphs_respect_bounds() {
        let rep = presets::two_mirrors();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let params = InstanceParams {
            require_l: true,
            ..InstanceParams::default()
        };
        for _ in 0..50 {
            let h = random_gain_graph(&mut rng, rep.group(), params).unwrap();
            assert!(h.vertex_count() <= 4 && h.edge_count() <= 10);
            assert!(h.has_nonfree_loops());
        }
    }

    #[test]
    fn trivial_group_graphs_have_no_loops() {
        let group = AbelianGroup::trivial();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let h = random_gain_graph(&mut rng, &group, InstanceParams::default()).unwrap();
            assert!(h.vertex_count() >= 2);
            assert!(h.edges().iter().all(|e| !e.is_loop()));
        }
    }

    #[test]
    fn small_crosscheck_passes() {
        let rep = presets::half_turn_x();
        let summary = run_crosscheck(5, InstanceParams::default(), &rep, 1).unwrap();
        assert!(summary.passed(), "{:?}", summary.mismatches);
        assert_eq!(run_crosscheck(0, InstanceParams::default(), &rep, 1).unwrap().instances, 0);
    }

    #[test]
    fn zero_loops() {
        let rep = presets::mirror_xy();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let params = InstanceParams {
            require_l: true,
            ..InstanceParams::default()
        };
        let h = random_gain_graph(&mut rng, rep.group(), params).unwrap();
        let check = check_zero_loops(&h, &rep, GenericSeed::new(5)).unwrap();
        assert!(check.passed());
        assert!(check.expected_zero > 0);
    }
}
