use std::collections::BTreeMap;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use symrig::algebra::{binomial, cap_product, combinations, hodge_star, induced_rep, wedge, Extensor, LexIndex};
use symrig::gaingraph::{lift_cover, quotient, GainGraph};
use symrig::genframe::{lift_bars, random_generic_bars, GenericSeed};
use symrig::hinge::{analyze_hinge, hinge_to_bars, meets, proof_self_test, random_generic_hinges};
use symrig::linalg::{determinant, rational_rank, Matrix};
use symrig::matroid::{
    check_counting_condition, combinatorial_verdict, incidence_matrix, is_independent_signed, matroid_union_rank, signed_rank, union_bound, SignedGraph,
};
use symrig::pipeline::{check_instance, check_zero_loops, random_gain_graph, InstanceParams};
use symrig::rigidity::{analyze, extract_flex, orbit_matrix_in, trivial_motions, verify_flex, BarConfiguration};
use symrig::scalar::{int, Rational};
use symrig::symmetry::{
    fixed_subspace_basis, induced_labelings, presets, tau_hat2_j, trivial_motion_dim, AbelianGroup,
    PointRepresentation,
};

fn rationals(xs: &[i64]) -> Vec<Rational> {
    xs.iter().map(|&x| int(x)).collect()
}

fn small_vectors(n: usize, count: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-6i64..=6, n), count)
}

fn square(n: usize) -> impl Strategy<Value = Matrix<Rational>> {
    prop::collection::vec(-4i64..=4, n * n)
        .prop_map(move |xs| Matrix::from_fn(n, n, |i, j| int(xs[i * n + j])))
}

fn signed_permutation(n: usize) -> impl Strategy<Value = Matrix<Rational>> {
    (Just((0..n).collect::<Vec<_>>()).prop_shuffle(), prop::collection::vec(any::<bool>(), n)).prop_map(
        move |(perm, signs)| {
            Matrix::from_fn(n, n, |i, j| {
                if perm[i] == j {
                    int(if signs[i] { -1 } else { 1 })
                } else {
                    int(0)
                }
            })
        },
    )
}

fn elementary_reps() -> Vec<PointRepresentation> {
    presets::all_elementary_d3().into_iter().map(|(_, r)| r).collect()
}

fn close(a: &Matrix<Complex64>, b: &Matrix<Complex64>) -> bool {
    (0..a.nrows()).all(|i| (0..a.ncols()).all(|j| (a.get(i, j) - b.get(i, j)).norm() < 1e-9))
}

// exterior algebra

proptest! {
    #[test]
    fn wedge_alternates_under_swaps(d in 2usize..=5, seed in any::<u64>()) {
        let k = 2 + (seed as usize) % d;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vs: Vec<Vec<Rational>> = (0..k)
            .map(|_| symrig::genframe::random_point(&mut rng, d, 7))
            .collect();
        let base = wedge(&vs, d).unwrap();
        let (a, b) = ((seed as usize / 7) % k, (seed as usize / 11) % k);
        prop_assume!(a != b);
        let mut swapped = vs.clone();
        swapped.swap(a, b);
        prop_assert_eq!(wedge(&swapped, d).unwrap(), base.neg());
    }

    #[test]
    fn wedge_of_dependent_vectors_vanishes(vs in small_vectors(5, 3), c in -3i64..=3) {
        let d = 4;
        let mut vs: Vec<Vec<Rational>> = vs.iter().map(|v| rationals(v)).collect();
        let combo: Vec<Rational> = (0..=d).map(|i| vs[0][i].clone() * int(c) - vs[2][i].clone()).collect();
        vs.push(combo);
        prop_assert!(wedge(&vs, d).unwrap().is_zero());
    }

    #[test]
    fn cap_product_is_the_joint_determinant(d in 1usize..=4, k_seed in any::<u8>(), raw in small_vectors(5, 5)) {
        let n = d + 1;
        let k = 1 + (k_seed as usize) % d;
        let vs: Vec<Vec<Rational>> = raw.iter().take(n).map(|v| rationals(&v[..n])).collect();
        let p = wedge(&vs[..k], d).unwrap();
        let q = wedge(&vs[k..], d).unwrap();
        let m = Matrix::from_fn(n, n, |r, c| vs[c][r].clone());
        prop_assert_eq!(cap_product(&p, &q).unwrap(), determinant(&m));
    }

    #[test]
    fn induced_rep_is_multiplicative(a in square(4), b in square(4)) {
        let lhs = induced_rep(&a.mul(&b), 2).unwrap();
        let rhs = induced_rep(&a, 2).unwrap().mul(&induced_rep(&b, 2).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn induced_rep_commutes_with_transpose(a in square(5), k in 1usize..=4) {
        prop_assert_eq!(induced_rep(&a.transpose(), k).unwrap(), induced_rep(&a, k).unwrap().transpose());
    }

    #[test]
    fn induced_rep_preserves_orthogonality(a in signed_permutation(4)) {
        let a2 = induced_rep(&a, 2).unwrap();
        prop_assert_eq!(a2.transpose().mul(&a2), Matrix::identity(6));
    }
}

#[test]
fn hodge_star_is_an_isometry_on_bivectors() {
    let idx = LexIndex::new(4, 2);
    for s in idx.tuples() {
        for t in idx.tuples() {
            let (x, y) = (Extensor::<Rational>::basis(3, s), Extensor::<Rational>::basis(3, t));
            assert_eq!(
                hodge_star(&x).dot(&hodge_star(&y)).unwrap(),
                x.dot(&y).unwrap(),
                "{s:?} {t:?}"
            );
        }
    }
}

// symmetry

#[test]
fn twisted_images_are_homomorphisms() {
    let mut reps = elementary_reps();
    reps.push(presets::quarter_turn());
    reps.push(presets::axis_cycle());
    for rep in reps {
        let group = rep.group().clone();
        for j in group.elements() {
            for a in group.elements() {
                for b in group.elements() {
                    let ab = tau_hat2_j(&rep, &j, &group.add(&a, &b)).to_field::<Complex64>().unwrap();
                    let prod = tau_hat2_j(&rep, &j, &a)
                        .to_field::<Complex64>()
                        .unwrap()
                        .mul(&tau_hat2_j(&rep, &j, &b).to_field::<Complex64>().unwrap());
                    assert!(close(&ab, &prod), "irrep {j}, {a} + {b}");
                }
            }
        }
    }
}

fn sign_rep(l: usize, signs: &[bool]) -> Option<PointRepresentation> {
    let group = AbelianGroup::elementary(l);
    let gens = (0..l)
        .map(|t| {
            Matrix::diagonal(
                &(0..3)
                    .map(|i| int(if signs[3 * t + i] { -1 } else { 1 }))
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    PointRepresentation::new(group, 3, gens).ok()
}

proptest! {
    #[test]
    fn twisted_images_of_sign_reps_are_homomorphisms(l in 1usize..=3, signs in prop::collection::vec(any::<bool>(), 9)) {
        let Some(rep) = sign_rep(l, &signs) else { return Ok(()); };
        let group = rep.group().clone();
        for j in group.elements() {
            for a in group.elements() {
                for b in group.elements() {
                    let ab = tau_hat2_j(&rep, &j, &group.add(&a, &b)).to_field::<Rational>().unwrap();
                    let prod = tau_hat2_j(&rep, &j, &a).to_field::<Rational>().unwrap()
                        .mul(&tau_hat2_j(&rep, &j, &b).to_field::<Rational>().unwrap());
                    prop_assert_eq!(ab, prod);
                }
            }
        }
    }

    #[test]
    fn induced_labelings_multiply(l in 1usize..=3, signs in prop::collection::vec(any::<bool>(), 9)) {
        let Some(rep) = sign_rep(l, &signs) else { return Ok(()); };
        let group = rep.group().clone();
        for g in group.elements() {
            let labels = induced_labelings(&rep, &g).unwrap();
            for pair in &labels {
                for a in group.elements() {
                    for b in group.elements() {
                        let ab = pair[group.index_of(&group.add(&a, &b))];
                        prop_assert_eq!(ab, pair[group.index_of(&a)] * pair[group.index_of(&b)]);
                    }
                }
            }
        }
    }
}

#[test]
fn trivial_motion_dims_partition_the_screws() {
    for rep in elementary_reps() {
        let total: usize = rep
            .group()
            .elements()
            .iter()
            .map(|j| trivial_motion_dim(&rep, j).unwrap())
            .sum();
        assert_eq!(total, binomial(4, 2));
    }
}

#[test]
fn trivial_motion_dim_counts_the_fixed_basis() {
    let mut reps = elementary_reps();
    reps.push(presets::quarter_turn());
    reps.push(presets::axis_cycle());
    for rep in reps {
        for j in rep.group().elements() {
            let dim = trivial_motion_dim(&rep, &j).unwrap();
            let basis = fixed_subspace_basis::<Complex64>(&rep, &j).unwrap();
            assert_eq!(dim, basis.len(), "irrep {j}");
            if rep.group().is_real_character(&j) {
                assert_eq!(dim, fixed_subspace_basis::<Rational>(&rep, &j).unwrap().len());
            }
        }
    }
}

// gain graphs

fn small_groups() -> Vec<AbelianGroup> {
    vec![
        AbelianGroup::new(vec![2]).unwrap(),
        AbelianGroup::new(vec![3]).unwrap(),
        AbelianGroup::new(vec![4]).unwrap(),
        AbelianGroup::elementary(2),
    ]
}

/// Canonical multiset of the edges: unordered endpoints with the gain read
/// from the smaller endpoint, loops up to inversion.
fn edge_signature(h: &GainGraph) -> BTreeMap<(usize, usize, Vec<u32>, bool), usize> {
    let group = h.group();
    let mut out = BTreeMap::new();
    for e in h.edges() {
        let key = if e.tail < e.head {
            (e.tail, e.head, e.gain.0.clone(), e.in_l)
        } else if e.tail > e.head {
            (e.head, e.tail, group.neg(&e.gain).0, e.in_l)
        } else {
            let inv = group.neg(&e.gain).0;
            (e.tail, e.head, e.gain.0.clone().min(inv), e.in_l)
        };
        *out.entry(key).or_insert(0) += 1;
    }
    out
}

fn gain_graph(seed: u64, group: &AbelianGroup, params: InstanceParams) -> GainGraph {
    random_gain_graph(&mut ChaCha8Rng::seed_from_u64(seed), group, params).unwrap()
}

proptest! {
    #[test]
    fn lift_cover_sizes_and_freeness(seed in any::<u64>(), gi in 0usize..4) {
        let group = &small_groups()[gi];
        let h = gain_graph(seed, group, InstanceParams { max_vertices: 6, max_edges: 12, allow_l: true, require_l: false });
        let cover = lift_cover(&h);
        let order = group.order();
        let expected: usize = h.edges().iter().map(|e| if e.in_l { order / 2 } else { order }).sum();
        prop_assert_eq!(cover.vertex_count(), h.vertex_count() * order);
        prop_assert_eq!(cover.edges().len(), expected);
        prop_assert!(cover.is_free_on_vertices());
        prop_assert_eq!(cover.is_free_on_edges(), !h.has_nonfree_loops());
    }

    #[test]
    fn quotient_inverts_lift(seed in any::<u64>(), gi in 0usize..4) {
        let group = &small_groups()[gi];
        let h = gain_graph(seed, group, InstanceParams { max_vertices: 6, max_edges: 12, allow_l: true, require_l: false });
        let back = quotient(&lift_cover(&h)).unwrap();
        prop_assert_eq!(back.vertex_count(), h.vertex_count());
        prop_assert_eq!(edge_signature(&back), edge_signature(&h));
    }
}

// signed-graphic matroid

fn signed_graph() -> impl Strategy<Value = SignedGraph> {
    (1usize..=6).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n, any::<bool>()), 0..=12).prop_map(move |es| {
            let triples: Vec<(usize, usize, i8)> = es
                .into_iter()
                .map(|(u, v, neg)| (u, v, if neg { -1 } else { 1 }))
                .collect();
            SignedGraph::from_triples(n, &triples).unwrap()
        })
    })
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..(1 << n)).map(move |mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn signed_independence_matches_incidence_rank(sg in signed_graph(), mask in any::<u16>()) {
        let f: Vec<usize> = (0..sg.edge_count()).filter(|&i| mask >> i & 1 == 1).collect();
        let rows = incidence_matrix(&sg).select_rows(&f);
        let rank = rational_rank(&rows);
        prop_assert_eq!(is_independent_signed(&sg, &f).is_ok(), rank == f.len());
        prop_assert_eq!(signed_rank(&sg, &f), rank);
    }

    #[test]
    fn circuits_are_minimally_dependent(sg in signed_graph()) {
        let all = sg.all();
        if let Err(c) = is_independent_signed(&sg, &all) {
            prop_assert!(is_independent_signed(&sg, &c.edges).is_err());
            for skip in 0..c.edges.len() {
                let rest: Vec<usize> = c.edges.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &e)| e).collect();
                prop_assert!(is_independent_signed(&sg, &rest).is_ok());
            }
        }
    }
}

/// Same underlying graph, `m` different signings.
fn union_instance() -> impl Strategy<Value = Vec<SignedGraph>> {
    (1usize..=4, 1usize..=3).prop_flat_map(|(n, m)| {
        prop::collection::vec((0..n, 0..n, prop::collection::vec(any::<bool>(), m)), 0..=10).prop_map(
            move |es| {
                (0..m)
                    .map(|k| {
                        let triples: Vec<(usize, usize, i8)> = es
                            .iter()
                            .map(|(u, v, signs)| (*u, *v, if signs[k] { -1 } else { 1 }))
                            .collect();
                        SignedGraph::from_triples(n, &triples).unwrap()
                    })
                    .collect()
            },
        )
    })
}

/// Largest subset that splits into one independent set per matroid, by a
/// subset dynamic program.
fn brute_union_rank(sgs: &[SignedGraph]) -> usize {
    let n = sgs[0].edge_count();
    let full = 1usize << n;
    let members = |mask: usize| -> Vec<usize> { (0..n).filter(|&i| mask >> i & 1 == 1).collect() };
    let mut reachable = vec![false; full];
    reachable[0] = true;
    for sg in sgs {
        let indep: Vec<bool> = (0..full).map(|m| is_independent_signed(sg, &members(m)).is_ok()).collect();
        let mut next = vec![false; full];
        for mask in 0..full {
            let mut sub = mask;
            loop {
                if indep[sub] && reachable[mask & !sub] {
                    next[mask] = true;
                    break;
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & mask;
            }
        }
        reachable = next;
    }
    (0..full).filter(|&m| reachable[m]).map(|m| m.count_ones() as usize).max().unwrap_or(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn union_rank_matches_exhaustive_oracles(sgs in union_instance()) {
        let s = sgs[0].all();
        let u = matroid_union_rank(&sgs, &s).unwrap();
        prop_assert_eq!(u.rank, brute_union_rank(&sgs));
        let nash_williams = subsets(s.len()).map(|x| union_bound(&sgs, &s, &x)).min().unwrap();
        prop_assert_eq!(u.rank, nash_williams);
        prop_assert_eq!(union_bound(&sgs, &s, &u.tight_set), u.rank);
        prop_assert_eq!(u.decomposition.size(), u.rank);
        prop_assert!(u.decomposition.validate(&sgs).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_count_subgraph_exists_iff_union_rank_reaches_target(seed in any::<u64>(), ri in 0usize..6) {
        let rep = presets::all_elementary_d3().swap_remove(ri).1;
        let h = gain_graph(seed, rep.group(), InstanceParams { max_vertices: 2, max_edges: 9, allow_l: true, require_l: false });
        for g in rep.group().elements() {
            let v = combinatorial_verdict(&h, &rep, &g, false).unwrap();
            let exists = v.target <= v.edge_count
                && combinations(v.edge_count, v.target)
                    .iter()
                    .any(|f| check_counting_condition(&v.signed_graphs, f).unwrap().is_none());
            prop_assert_eq!(exists, v.rigid, "irrep {} target {} rank {}", g, v.target, v.rank);
        }
    }
}

// numeric rigidity against the matroid count

fn elementary_rep(i: usize) -> PointRepresentation {
    elementary_reps().swap_remove(i % 6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn orbit_rank_equals_union_rank(seed in any::<u64>(), ri in 0usize..6) {
        let rep = elementary_rep(ri);
        let h = gain_graph(seed, rep.group(), InstanceParams { max_vertices: 3, max_edges: 8, allow_l: true, require_l: false });
        let (check, _) = check_instance(&h, &rep, GenericSeed::new(seed)).unwrap();
        prop_assert!(check.additivity_holds(), "{:?}", check);
        prop_assert!(check.matroid_agrees(), "{:?}", check);
    }

    #[test]
    fn zero_rows_are_exactly_the_sign_flipped_loops(seed in any::<u64>(), ri in 0usize..6) {
        let rep = elementary_rep(ri);
        let h = gain_graph(seed, rep.group(), InstanceParams { max_vertices: 3, max_edges: 8, allow_l: true, require_l: true });
        let zl = check_zero_loops(&h, &rep, GenericSeed::new(seed)).unwrap();
        prop_assert!(zl.passed(), "{:?}", zl);
    }

    #[test]
    fn generic_rank_is_stable_across_seeds(seed in any::<u64>(), ri in 0usize..6) {
        let rep = elementary_rep(ri);
        let h = gain_graph(seed, rep.group(), InstanceParams { max_vertices: 3, max_edges: 8, allow_l: true, require_l: false });
        let mut s = GenericSeed::new(seed);
        let mut ranks = Vec::new();
        for _ in 0..3 {
            let config = random_generic_bars(&h, &rep, s).unwrap();
            ranks.push(analyze(&h, &config, &rep).unwrap().irreps.iter().map(|r| r.rank).collect::<Vec<_>>());
            s = s.next();
        }
        prop_assert_eq!(&ranks[0], &ranks[1]);
        prop_assert_eq!(&ranks[1], &ranks[2]);
    }

    #[test]
    fn flexes_and_trivial_motions_lie_in_the_kernel(seed in any::<u64>(), ri in 0usize..6) {
        let rep = elementary_rep(ri);
        let h = gain_graph(seed, rep.group(), InstanceParams { max_vertices: 3, max_edges: 6, allow_l: true, require_l: false });
        let config = random_generic_bars(&h, &rep, GenericSeed::new(seed)).unwrap();
        for g in rep.group().elements() {
            let o = orbit_matrix_in::<Rational>(&h, &config, &rep, &g).unwrap();
            for t in trivial_motions::<Rational>(&rep, &g, h.vertex_count()).unwrap() {
                prop_assert!(o.mul_vec(&t).iter().all(|x| *x == int(0)));
            }
            if let Some(f) = extract_flex::<Rational>(&h, &config, &rep, &g).unwrap() {
                prop_assert!(verify_flex(&h, &config, &rep, &f).unwrap());
            }
        }
    }

    #[test]
    fn lifted_bars_are_symmetric(seed in any::<u64>(), ri in 0usize..6) {
        let rep = elementary_rep(ri);
        let h = gain_graph(seed, rep.group(), InstanceParams { max_vertices: 3, max_edges: 6, allow_l: true, require_l: false });
        let config = random_generic_bars(&h, &rep, GenericSeed::new(seed)).unwrap();
        let (cover, lifted) = lift_bars(&h, &config, &rep).unwrap();
        for g in rep.group().elements() {
            for e in 0..cover.edges().len() {
                let image = lifted.bars()[cover.edge_image(&g, e)].extensor.clone();
                let moved = lifted.bars()[e].extensor.transform(rep.tau_hat2(&g));
                let (u, v) = cover.endpoints()[e];
                let (iu, iv) = cover.endpoints()[cover.edge_image(&g, e)];
                let forward = (cover.vertex_image(&g, u), cover.vertex_image(&g, v)) == (iu, iv);
                prop_assert_eq!(image, if forward { moved } else { moved.neg() });
            }
        }
    }
}

// body-hinge

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn hinge_bars_meet_their_hinge_and_are_independent(seed in any::<u64>(), ri in 0usize..6) {
        let rep = elementary_rep(ri);
        let h = gain_graph(seed, rep.group(), InstanceParams { max_vertices: 3, max_edges: 4, allow_l: false, require_l: false });
        let hinges = random_generic_hinges(&h, &rep, GenericSeed::new(seed)).unwrap();
        let (_, bars) = hinge_to_bars(&h, &hinges, GenericSeed::new(seed).next()).unwrap();
        let copies = binomial(4, 2) - 1;
        for (e, hinge) in hinges.hinges().iter().enumerate() {
            let group: Vec<&Extensor> = bars.bars()[e * copies..(e + 1) * copies].iter().map(|b| &b.extensor).collect();
            for b in &group {
                prop_assert!(meets(b, &hinge.extensor).unwrap());
            }
            let m = Matrix::from_rows(group.iter().map(|b| b.coords().to_vec()).collect(), 6);
            prop_assert_eq!(rational_rank(&m), copies);
        }
    }

    #[test]
    fn hinge_verdicts_agree(seed in any::<u64>(), ri in 0usize..6) {
        let rep = elementary_rep(ri);
        let h = gain_graph(seed, rep.group(), InstanceParams { max_vertices: 3, max_edges: 4, allow_l: false, require_l: false });
        let report = analyze_hinge(&h, &rep, GenericSeed::new(seed), false).unwrap();
        prop_assert!(report.agree(), "{:?}", report.agreement);
        for g in rep.group().elements() {
            prop_assert!(proof_self_test(&h, &rep, &g).unwrap());
        }
    }
}

#[test]
fn every_pair_of_unit_bars_appears_in_the_special_hinge_basis() {
    // the special hinge for a free pair (a,b) is e_K, K the complement of {a,b};
    // every other unit bar meets it
    let d = 3;
    for pair in combinations(d + 1, 2) {
        let k = symrig::algebra::complement(&pair, d + 1);
        let hinge = Extensor::<Rational>::basis(d, &k);
        for other in combinations(d + 1, 2) {
            let bar = Extensor::<Rational>::basis(d, &other);
            assert_eq!(meets(&bar, &hinge).unwrap(), other != pair, "{pair:?} {other:?}");
        }
    }
}

#[test]
fn bar_configuration_rejects_non_decomposable_input() {
    let x = Extensor::new(3, 2, rationals(&[1, 0, 0, 0, 0, 1])).unwrap();
    assert!(!x.is_decomposable());
    let r = BarConfiguration::new(3, vec![symrig::rigidity::Bar::from_extensor(x)]);
    assert!(r.is_err());
}
