use std::path::PathBuf;

use symrig::genframe::GenericSeed;
use symrig::hinge::analyze_hinge;
use symrig::matroid::combinatorial_verdict;
use symrig::pipeline::analyze_generic;
use symrig::rigidity::{analyze, crosscheck_block_ranks, extract_flex, verify_flex};
use symrig::scalar::Rational;
use symrig::schema::{Framework, Model};
use symrig::symmetry::GroupElement;
use symrig::Error;

fn read(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    std::fs::read_to_string(path).unwrap()
}

const ALL: [&str; 8] = [
    "c2_hinge.json",
    "c2_stewart.json",
    "cs_hinge.json",
    "cs_stewart.json",
    "cs_stewart_explicit.json",
    "mirror_quotient_3v.json",
    "trivial_2body_5bars.json",
    "trivial_2body_6bars.json",
];

#[test]
fn fixtures_round_trip_through_the_schema() {
    for name in ALL {
        let fw = Framework::from_json(&read(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        let again = Framework::from_json(&fw.to_json()).unwrap();
        assert_eq!(again.to_json(), fw.to_json(), "{name}");
        assert_eq!(again.graph.edge_count(), fw.graph.edge_count());
    }
}

#[test]
fn explicit_cs_configuration_matches_the_generic_ranks() {
    let fw = Framework::from_json(&read("cs_stewart_explicit.json")).unwrap();
    let config = fw.bars.as_ref().unwrap();
    let report = analyze(&fw.graph, config, &fw.rep).unwrap();
    let ranks: Vec<usize> = report.irreps.iter().map(|r| r.rank).collect();
    assert_eq!(ranks, [3, 2]);
    assert_eq!(crosscheck_block_ranks(&fw.graph, config, &fw.rep).unwrap(), (5, 5));
    let flex = extract_flex::<Rational>(&fw.graph, config, &fw.rep, &GroupElement(vec![1]))
        .unwrap()
        .unwrap();
    assert_eq!(flex.motions.len(), 1);
    assert!(verify_flex(&fw.graph, config, &fw.rep, &flex).unwrap());
}

#[test]
fn numeric_and_combinatorial_paths_agree_on_fixtures() {
    for name in ALL {
        let fw = Framework::from_json(&read(name)).unwrap();
        if fw.rep.require_combinatorial().is_err() {
            continue;
        }
        match fw.model {
            Model::BodyBar => {
                let irreps = fw.rep.group().elements();
                let generic = analyze_generic(&fw.graph, &fw.rep, GenericSeed::new(11), &irreps).unwrap();
                for r in &generic.report.irreps {
                    let v = combinatorial_verdict(&fw.graph, &fw.rep, &r.irrep, false).unwrap();
                    assert_eq!((r.rank, r.flex), (v.rank, v.deficiency), "{name} irrep {}", r.irrep);
                }
            }
            Model::BodyHinge => {
                let report = analyze_hinge(&fw.graph, &fw.rep, GenericSeed::new(11), false).unwrap();
                assert!(report.agree(), "{name}: {:?}", report.agreement);
            }
        }
    }
}

const CS_HEADER: &str = r#""schema": 1,
    "group": {"orders": [2]},
    "representation": {"d": 3, "generators": [[["1","0","0"],["0","1","0"],["0","0","-1"]]]},
    "vertices": ["u"]"#;

#[test]
fn bars_on_loops_in_l_must_have_the_loop_form() {
    let text = format!(
        r#"{{{CS_HEADER},
        "edges": [{{"id": 0, "tail": "u", "head": "u", "gain": [1], "inL": true}}],
        "configuration": {{"bars": [{{"points": [[1, 2, 3], [4, 5, 6]]}}]}}}}"#
    );
    let fw = Framework::from_json(&text).unwrap();
    let err = analyze(&fw.graph, fw.bars.as_ref().unwrap(), &fw.rep).unwrap_err();
    assert!(matches!(err, Error::LoopForm { edge: 0 }), "{err}");
}

#[test]
fn schema_errors_are_reported() {
    let cases = [
        (r#"{"schema": 2, "group": {"orders": []}, "representation": {"d": 3, "generators": []}, "vertices": [], "edges": []}"#, "schema version"),
        (r#"{"schema": 1, "group": {"orders": [2]}, "representation": {"d": 3, "generators": [[["2","0","0"],["0","1","0"],["0","0","1"]]]}, "vertices": [], "edges": []}"#, "orthogonal"),
        (r#"{"schema": 1, "group": {"orders": [2]}, "representation": {"d": 3, "generators": [[["1","0","0"],["0","1","0"],["0","0","1"]]]}, "vertices": [], "edges": []}"#, "faithful"),
        (r#"{"schema": 1, "group": {"orders": []}, "representation": {"d": 3, "generators": []}, "vertices": ["a"], "edges": [{"id": 0, "tail": "a", "head": "b", "gain": []}]}"#, "unknown vertex"),
        (r#"{"schema": 1, "group": {"orders": []}, "representation": {"d": 3, "generators": []}, "vertices": [], "edges": [], "extra": 1}"#, "unknown field"),
    ];
    for (text, needle) in cases {
        let err = Framework::from_json(text).unwrap_err().to_string();
        assert!(err.contains(needle), "{needle}: {err}");
    }
}
